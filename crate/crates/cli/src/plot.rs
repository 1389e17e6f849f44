//! Hand-written SVG for arrangements with `d ∈ {2, 3}`.
//!
//! `d = 3` draws the affine chart `ℓ_1 = 1` with coordinates `(ℓ_b/ℓ_1, ℓ_c/ℓ_1)`
//! for the first rows `b < c` completing `ℓ_1` to a basis; `ℓ_1` is the line
//! at infinity and is drawn as the frame. `d = 2` draws `P^1` as the angle
//! segment `[0, π)` with its endpoints identified, plus the probability
//! triangle with log-normal fibers when `n = 3`.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde_json::{json, Value};
use slm_core::arrangement::{enumerate_regions, Region};
use slm_core::degeneration::{estimate_valuations, unit_data_solutions, ValuationEstimate};
use slm_core::geometry::{chamber_arrangement, lognormal_polytope};
use slm_core::mle::{solve_all, CriticalPoint, SolveOptions};
use slm_core::model::SquaredLinearModel;
use slm_core::scalar::rational_to_f64;
use slm_core::{Error, QMatrix, Rational};

use crate::input::{self, has};
use crate::{CliError, CliResult};

const SIZE: f64 = 560.0;
const MARGIN: f64 = 40.0;
const OVERLAYS: [&str; 5] = ["regions", "critical", "arcs", "chamber", "fiber"];

/// Plot arcs start near uniform data so they cross their whole region.
pub fn default_arc_grid() -> Vec<f64> {
    vec![0.9, 0.7, 0.5, 0.35, 0.2, 0.1, 0.05, 0.02, 0.01, 0.003, 0.001]
}

struct Data {
    critical: Vec<CriticalPoint>,
    arcs: Vec<(ValuationEstimate, Vec<f64>)>,
    chamber: Vec<Vec<f64>>,
    regions: Vec<Region>,
    s: Option<Vec<f64>>,
    labels: bool,
    fiber: bool,
}

fn overlays(model: &SquaredLinearModel, doc: &Value) -> CliResult<Vec<String>> {
    let fiber_ok = model.d() == 2 && model.n() == 3;
    let Some(raw) = doc.get("overlays").filter(|v| !v.is_null()) else {
        let mut out = vec!["regions".to_owned()];
        if has(doc, "s") {
            out.push("critical".into());
        }
        if has(doc, "w") {
            out.push("arcs".into());
        }
        if fiber_ok {
            out.push("fiber".into());
        }
        return Ok(out);
    };
    let list = raw
        .as_array()
        .and_then(|a| a.iter().map(|v| v.as_str().map(str::to_owned)).collect::<Option<Vec<_>>>())
        .ok_or_else(|| CliError::invalid("\"overlays\" must be an array of strings"))?;
    for o in &list {
        if !OVERLAYS.contains(&o.as_str()) {
            return Err(CliError::invalid(format!("unknown overlay {o:?}; expected one of {OVERLAYS:?}")));
        }
    }
    let want = |k: &str| list.iter().any(|o| o == k);
    if want("critical") && !has(doc, "s") {
        return Err(CliError::invalid("overlay \"critical\" needs data \"s\""));
    }
    if want("arcs") && !has(doc, "w") {
        return Err(CliError::invalid("overlay \"arcs\" needs valuations \"w\""));
    }
    if want("fiber") && !fiber_ok {
        return Err(CliError::invalid("overlay \"fiber\" needs d = 2 and n = 3"));
    }
    Ok(list)
}

fn gather(model: &SquaredLinearModel, doc: &Value, grid: &[f64], opts: &SolveOptions) -> CliResult<Data> {
    let list = overlays(model, doc)?;
    let want = |k: &str| list.iter().any(|o| o == k);
    let s = if has(doc, "s") { Some(input::floats(doc, "s", model.n())?) } else { None };
    let mut critical = Vec::new();
    if want("critical") || (want("fiber") && s.is_some()) {
        let rep = solve_all(model, s.as_ref().expect("checked above"), opts)?;
        if let Some(f) = rep.failures.first() {
            return Err(f.error.clone().into());
        }
        critical = rep.points;
    }
    let mut arcs = Vec::new();
    if want("arcs") {
        let w = input::rationals(doc, "w", model.n())?;
        let est = estimate_valuations(model, &w, grid, opts)?;
        let anchor = slm_core::degeneration::tropical_anchor(&w)?;
        let exact = unit_data_solutions(model, anchor)?;
        for e in est {
            // the closed form is the limit whenever its support matches
            let limit = match exact.for_support(&e.support()) {
                Some(sol) if model.d() == 3 => sol.y.iter().map(rational_to_f64).collect(),
                _ => e.limit().to_vec(),
            };
            arcs.push((e, limit));
        }
    }
    let mut chamber = Vec::new();
    if want("chamber") {
        let ch = chamber_arrangement(model)?;
        chamber = (model.n()..ch.arrangement.n())
            .map(|i| ch.arrangement.row(i).iter().map(rational_to_f64).collect())
            .collect();
    }
    let regions = if want("regions") || want("fiber") { enumerate_regions(model.arrangement())? } else { Vec::new() };
    Ok(Data { critical, arcs, chamber, regions, s, labels: want("regions"), fiber: want("fiber") })
}

pub fn plot(model: &SquaredLinearModel, doc: &Value, grid: &[f64], opts: &SolveOptions) -> CliResult<(String, Value)> {
    let d = model.d();
    if !(2..=3).contains(&d) {
        return Err(Error::DimensionUnsupported { d }.into());
    }
    let data = gather(model, doc, grid, opts)?;
    let mut svg = Svg::default();
    let summary = if d == 3 { plane(model, &data, &mut svg) } else { segment(model, &data, &mut svg)? };
    let body = json!({
        "d": d,
        "n": model.n(),
        "chart": summary,
        "counts": svg.counts,
    });
    Ok((svg.finish(), body))
}

#[derive(Default)]
struct Svg {
    body: String,
    height: f64,
    counts: BTreeMap<&'static str, usize>,
}

impl Svg {
    fn push(&mut self, class: &'static str, element: String) {
        *self.counts.entry(class).or_default() += 1;
        self.body.push_str("  ");
        self.body.push_str(&element);
        self.body.push('\n');
    }

    fn text(&mut self, class: &'static str, x: f64, y: f64, text: &str) {
        self.push(class, format!(r#"<text class="{class}" x="{x:.2}" y="{y:.2}">{}</text>"#, escape(text)));
    }

    fn finish(self) -> String {
        let w = SIZE + 2.0 * MARGIN;
        let h = self.height;
        let mut out = String::new();
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
        )
        .unwrap();
        out.push_str(STYLE);
        out.push_str(&self.body);
        out.push_str("</svg>\n");
        out
    }
}

const STYLE: &str = r#"  <style>
    .hyperplane { stroke: #222; stroke-width: 1.5; fill: none; }
    .chamber { stroke: #888; stroke-width: 0.8; stroke-dasharray: 4 3; fill: none; }
    .arc { stroke: #1f77b4; stroke-width: 1.2; fill: none; }
    .limit { fill: #1f77b4; }
    .critical { fill: #d62728; }
    .fiber { stroke: #2ca02c; stroke-width: 1.5; }
    .simplex, .axis { stroke: #222; fill: none; }
    .data { fill: #000; }
    text { font-family: sans-serif; font-size: 11px; }
    .region { fill: #666; }
  </style>
"#;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn points_attr(pts: &[(f64, f64)]) -> String {
    pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect::<Vec<_>>().join(" ")
}

/// Axis-aligned square window of the chart.
struct View {
    cx: f64,
    cy: f64,
    half: f64,
}

impl View {
    fn contains(&self, p: (f64, f64)) -> bool {
        (p.0 - self.cx).abs() <= self.half && (p.1 - self.cy).abs() <= self.half
    }

    /// Points outside the window slide toward the center onto its border.
    fn clamp(&self, p: (f64, f64)) -> (f64, f64) {
        let (dx, dy) = (p.0 - self.cx, p.1 - self.cy);
        let m = dx.abs().max(dy.abs());
        if m <= self.half {
            return p;
        }
        let t = self.half / m;
        (self.cx + t * dx, self.cy + t * dy)
    }

    fn px(&self, p: (f64, f64)) -> (f64, f64) {
        let scale = SIZE / (2.0 * self.half);
        (MARGIN + (p.0 - self.cx + self.half) * scale, MARGIN + (self.cy + self.half - p.1) * scale)
    }

    /// Segment of `a + b u + c v = 0` inside the window.
    fn clip(&self, (a, b, c): (f64, f64, f64)) -> Option<((f64, f64), (f64, f64))> {
        let (lo_x, hi_x) = (self.cx - self.half, self.cx + self.half);
        let (lo_y, hi_y) = (self.cy - self.half, self.cy + self.half);
        let slack = 1e-9 * self.half;
        let mut hits: Vec<(f64, f64)> = Vec::new();
        if b.abs() > 1e-15 {
            for v in [lo_y, hi_y] {
                hits.push((-(a + c * v) / b, v));
            }
        }
        if c.abs() > 1e-15 {
            for u in [lo_x, hi_x] {
                hits.push((u, -(a + b * u) / c));
            }
        }
        hits.retain(|&(u, v)| u >= lo_x - slack && u <= hi_x + slack && v >= lo_y - slack && v <= hi_y + slack);
        let mut best: Option<((f64, f64), (f64, f64))> = None;
        let mut len = -1.0;
        for i in 0..hits.len() {
            for j in i + 1..hits.len() {
                let l = (hits[i].0 - hits[j].0).hypot(hits[i].1 - hits[j].1);
                if l > len {
                    len = l;
                    best = Some((hits[i], hits[j]));
                }
            }
        }
        best.filter(|_| len > slack)
    }
}

/// Coordinates of row `i` in the basis `ℓ_1, ℓ_b, ℓ_c`, i.e. the line `α + βu + γv = 0`.
struct Chart {
    basis: [usize; 3],
    inverse: QMatrix,
}

impl Chart {
    fn new(model: &SquaredLinearModel) -> Chart {
        let a = model.arrangement().matrix();
        let mut basis = vec![0];
        for i in 1..model.n() {
            let mut trial = basis.clone();
            trial.push(i);
            if a.select_rows(&trial).rank() == trial.len() {
                basis = trial;
            }
            if basis.len() == 3 {
                break;
            }
        }
        let m = a.select_rows(&basis);
        let inverse = m.inverse().expect("the arrangement is essential");
        Chart { basis: [basis[0], basis[1], basis[2]], inverse }
    }

    fn line(&self, normal: &[f64]) -> (f64, f64, f64) {
        // ℓ = Σ_k c_k ℓ_{basis_k}, so c = normal · M^{-1}
        let inv = self.inverse.to_f64();
        let c: Vec<f64> = (0..3).map(|k| (0..3).map(|r| normal[r] * inv[(r, k)]).sum()).collect();
        (c[0], c[1], c[2])
    }

    /// Chart point of form values `y`; a vanishing `y_1` lands far out along its direction.
    fn point(&self, y: &[f64]) -> (f64, f64) {
        let [o, b, c] = self.basis;
        let scale = y[b].abs().max(y[c].abs()).max(y[o].abs());
        let y0 = if y[o].abs() <= 1e-12 * scale { 1e-12 * scale * if y[o] < 0.0 { -1.0 } else { 1.0 } } else { y[o] };
        (y[b] / y0, y[c] / y0)
    }
}

fn forms(model: &SquaredLinearModel, x: &[Rational]) -> Vec<f64> {
    model.arrangement().values(x).iter().map(rational_to_f64).collect()
}

fn plane(model: &SquaredLinearModel, data: &Data, svg: &mut Svg) -> Value {
    let chart = Chart::new(model);
    let arr = model.arrangement();
    let to_f = |r: &[Rational]| r.iter().map(rational_to_f64).collect::<Vec<f64>>();
    let lines: Vec<(usize, (f64, f64, f64))> =
        (1..model.n()).map(|i| (i, chart.line(&to_f(arr.row(i))))).collect();

    // window: pairwise intersections and the feet of all finite lines
    let mut anchors: Vec<(f64, f64)> = Vec::new();
    for (_, (a, b, c)) in &lines {
        let nn = b * b + c * c;
        anchors.push((-a * b / nn, -a * c / nn));
    }
    for (i, (_, l)) in lines.iter().enumerate() {
        for (_, m) in &lines[i + 1..] {
            let det = l.1 * m.2 - l.2 * m.1;
            if det.abs() > 1e-12 {
                anchors.push(((-l.0 * m.2 + l.2 * m.0) / det, (-l.1 * m.0 + l.0 * m.1) / det));
            }
        }
    }
    let fold = |f: fn(f64, f64) -> f64, init: f64, k: usize| {
        anchors.iter().map(|p| if k == 0 { p.0 } else { p.1 }).fold(init, f)
    };
    let (x0, x1) = (fold(f64::min, f64::INFINITY, 0), fold(f64::max, f64::NEG_INFINITY, 0));
    let (y0, y1) = (fold(f64::min, f64::INFINITY, 1), fold(f64::max, f64::NEG_INFINITY, 1));
    let span = (x1 - x0).max(y1 - y0).max(1.0);
    let view = View { cx: 0.5 * (x0 + x1), cy: 0.5 * (y0 + y1), half: span };
    svg.height = SIZE + 2.0 * MARGIN + 10.0;

    svg.push(
        "hyperplane",
        format!(
            r#"<rect class="hyperplane" data-index="{}" data-at-infinity="true" x="{MARGIN:.2}" y="{MARGIN:.2}" width="{SIZE:.2}" height="{SIZE:.2}"/>"#,
            chart.basis[0] + 1
        ),
    );
    svg.text("hyperplane-label", MARGIN, MARGIN + SIZE + 16.0, &format!("{} at infinity", arr.label(chart.basis[0])));
    for normal in &data.chamber {
        if let Some((p, q)) = view.clip(chart.line(normal)) {
            let (p, q) = (view.px(p), view.px(q));
            svg.push(
                "chamber",
                format!(r#"<line class="chamber" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#, p.0, p.1, q.0, q.1),
            );
        }
    }
    for (i, l) in &lines {
        if let Some((p, q)) = view.clip(*l) {
            let (p, q) = (view.px(p), view.px(q));
            svg.push(
                "hyperplane",
                format!(
                    r#"<line class="hyperplane" data-index="{}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
                    i + 1,
                    p.0,
                    p.1,
                    q.0,
                    q.1
                ),
            );
            svg.text("hyperplane-label", q.0 + 3.0, q.1 - 3.0, &arr.label(*i));
        }
    }
    let inset = View { cx: view.cx, cy: view.cy, half: 0.94 * view.half };
    for r in data.regions.iter().filter(|_| data.labels) {
        let p = view.px(inset.clamp(chart.point(&forms(model, &r.witness))));
        svg.text("region", p.0, p.1, &r.sign.to_string());
    }
    for (est, limit) in &data.arcs {
        let pts: Vec<(f64, f64)> = est.path.iter().map(|s| view.px(view.clamp(chart.point(&s.y)))).collect();
        let end = view.px(view.clamp(chart.point(limit)));
        let mut all = pts;
        all.push(end);
        svg.push("arc", format!(r#"<polyline class="arc" data-region="{}" points="{}"/>"#, est.region, points_attr(&all)));
        svg.push("limit", format!(r#"<circle class="limit" cx="{:.2}" cy="{:.2}" r="3"/>"#, end.0, end.1));
    }
    for cp in &data.critical {
        let p = chart.point(&cp.y);
        let clipped = !view.contains(p);
        let q = view.px(view.clamp(p));
        svg.push(
            "critical",
            format!(
                r#"<circle class="critical" data-region="{}" data-clipped="{clipped}" cx="{:.2}" cy="{:.2}" r="4"><title>{} logL={:.6}</title></circle>"#,
                cp.region, q.0, q.1, cp.region, cp.log_l
            ),
        );
    }
    json!({
        "kind": "affine",
        "at_infinity": chart.basis[0] + 1,
        "coordinates": [chart.basis[1] + 1, chart.basis[2] + 1],
        "window": [view.cx - view.half, view.cx + view.half, view.cy - view.half, view.cy + view.half],
    })
}

/// Angle in `[0, π)` of the projective point `x ∈ R^2`.
fn angle(x: &[f64]) -> f64 {
    x[1].atan2(x[0]).rem_euclid(std::f64::consts::PI)
}

fn segment(model: &SquaredLinearModel, data: &Data, svg: &mut Svg) -> CliResult<Value> {
    use std::f64::consts::PI;
    let arr = model.arrangement();
    let base = MARGIN + 140.0;
    let px = |t: f64| MARGIN + t / PI * SIZE;
    svg.height = if data.fiber { base + 80.0 + SIZE * 0.7 + MARGIN } else { base + 60.0 };

    svg.push(
        "axis",
        format!(r#"<line class="axis" x1="{MARGIN:.2}" y1="{base:.2}" x2="{:.2}" y2="{base:.2}"/>"#, MARGIN + SIZE),
    );
    svg.text("axis-label", MARGIN - 4.0, base - 14.0, "0 ≡ π");
    for (i, row) in (0..model.n()).map(|i| (i, arr.row(i))) {
        // V(ℓ) is spanned by (-b, a)
        let t = angle(&[-rational_to_f64(&row[1]), rational_to_f64(&row[0])]);
        let x = px(t);
        svg.push(
            "hyperplane",
            format!(r#"<line class="hyperplane" data-index="{}" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}"/>"#, i + 1, base - 10.0, base + 10.0),
        );
        svg.text("hyperplane-label", x - 4.0, base + 24.0, &arr.label(i));
    }
    for normal in &data.chamber {
        let x = px(angle(&[-normal[1], normal[0]]));
        svg.push(
            "chamber",
            format!(r#"<line class="chamber" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}"/>"#, base - 6.0, base + 6.0),
        );
    }
    for r in data.regions.iter().filter(|_| data.labels) {
        let t = angle(&r.witness_f64());
        svg.text("region", px(t) - 12.0, base + 42.0, &r.sign.to_string());
    }
    for (est, _) in &data.arcs {
        let mut prev: Option<f64> = None;
        let mut pts = Vec::new();
        for (k, s) in est.path.iter().enumerate() {
            let mut t = angle(&s.x);
            if let Some(p) = prev {
                // unwrap across the identified endpoints
                t += PI * ((p - t) / PI).round();
            }
            prev = Some(t);
            pts.push((px(t.clamp(0.0, PI)), base - 16.0 - 10.0 * k as f64));
        }
        let end = *pts.last().expect("paths are nonempty");
        svg.push("arc", format!(r#"<polyline class="arc" data-region="{}" points="{}"/>"#, est.region, points_attr(&pts)));
        svg.push("limit", format!(r#"<circle class="limit" cx="{:.2}" cy="{:.2}" r="3"/>"#, end.0, end.1));
    }
    for cp in &data.critical {
        svg.push(
            "critical",
            format!(
                r#"<circle class="critical" data-region="{}" cx="{:.2}" cy="{base:.2}" r="4"><title>{} logL={:.6}</title></circle>"#,
                cp.region,
                px(angle(&cp.x)),
                cp.region,
                cp.log_l
            ),
        );
    }
    if data.fiber {
        triangle(model, data, svg, base + 80.0)?;
    }
    Ok(json!({"kind": "angle", "range": [0.0, PI]}))
}

/// Probability triangle with the log-normal fiber of every critical point,
/// or of every region witness when no data is given.
fn triangle(model: &SquaredLinearModel, data: &Data, svg: &mut Svg, top: f64) -> CliResult<()> {
    let side = SIZE * 0.8;
    let h = side * 3f64.sqrt() / 2.0;
    let left = MARGIN + 0.1 * SIZE;
    let corners = [(left, top + h), (left + side, top + h), (left + side / 2.0, top)];
    let bary = |s: &[f64]| {
        let total: f64 = s.iter().sum();
        let x = (0..3).map(|i| s[i] / total * corners[i].0).sum::<f64>();
        let y = (0..3).map(|i| s[i] / total * corners[i].1).sum::<f64>();
        (x, y)
    };
    let mut outline = corners.to_vec();
    outline.push(corners[0]);
    svg.push("simplex", format!(r#"<polyline class="simplex" points="{}"/>"#, points_attr(&outline)));
    for (i, c) in corners.iter().enumerate() {
        svg.text("simplex-label", c.0 - 8.0, if i == 2 { c.1 - 6.0 } else { c.1 + 16.0 }, &format!("s{}", i + 1));
    }
    let fibers: Vec<Vec<Vec<f64>>> = if data.critical.is_empty() {
        data.regions
            .iter()
            .map(|r| {
                let y = model.arrangement().values(&r.witness);
                lognormal_polytope(model, &y).map(|p| p.to_f64().vertices)
            })
            .collect::<Result<_, _>>()?
    } else {
        data.critical
            .iter()
            .map(|cp| lognormal_polytope(model, &cp.y).map(|p| p.vertices))
            .collect::<Result<_, _>>()?
    };
    for verts in fibers.iter().filter(|v| v.len() == 2) {
        let (p, q) = (bary(&verts[0]), bary(&verts[1]));
        svg.push(
            "fiber",
            format!(r#"<line class="fiber" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#, p.0, p.1, q.0, q.1),
        );
    }
    if let Some(s) = &data.s {
        let p = bary(s);
        svg.push("data", format!(r#"<circle class="data" cx="{:.2}" cy="{:.2}" r="3"/>"#, p.0, p.1));
    }
    Ok(())
}
