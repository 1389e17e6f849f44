use serde_json::{json, Value};
use slm_core::arrangement::{characteristic_polynomial, enumerate_regions, ml_degree};
use slm_core::degeneration::{
    estimate_valuations, tropical_predictions, unit_data_solutions, DegenerateSolution,
};
use slm_core::dpp::{
    dpp_ml_degree, dpp_ml_degree_l2, dpp_probabilities, linear_projection_arrangement, DPPModel,
};
use slm_core::geometry::{
    chamber_arrangement, combinatorial_type_scan, dual_polytope, log_voronoi_scan, lognormal_polytope,
    swap_candidates,
};
use slm_core::json::{arrangement_to_json, matrix_to_json, rationals_to_json, SCHEMA};
use slm_core::mle::{solve_all, SolveOptions};
use slm_core::model::{singular_subspaces, veronese_generators};
use slm_core::scalar::{format_rational, primitive_integer_vector};
use slm_core::Rational;

use crate::input::{self, has};
use crate::{plot, CliError, CliResult, Command, Options, Output};

/// Voronoi steps when `--samples` is absent.
const DEFAULT_STEPS: usize = 20;

fn one_based(idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|i| i + 1).collect()
}

fn tagged(mut body: Value) -> Value {
    body.as_object_mut().expect("command bodies are objects").insert("schema".into(), json!(SCHEMA));
    body
}

fn bad_option(message: impl Into<String>) -> CliError {
    CliError::Invalid { kind: "InvalidOption", message: message.into() }
}

/// Option checks that need no input.
pub fn validate(cmd: Command, opts: &Options) -> CliResult<()> {
    if let Some(tol) = opts.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(bad_option(format!("--tol must be positive, got {tol}")));
        }
    }
    if opts.anchor == Some(0) {
        return Err(bad_option("--anchor is 1-based"));
    }
    if let Some(grid) = &opts.eps_grid {
        if grid.len() < 2 || grid.iter().any(|e| !(*e > 0.0 && *e < 1.0)) || grid.windows(2).any(|w| w[1] >= w[0]) {
            return Err(bad_option("--eps-grid needs at least two strictly decreasing values in (0, 1)"));
        }
    }
    if opts.samples == Some(0) {
        return Err(bad_option("--samples must be positive"));
    }
    if opts.svg.is_some() && cmd != Command::Plot {
        return Err(bad_option("--svg applies to plot only"));
    }
    Ok(())
}

pub fn solve_options(opts: &Options) -> SolveOptions {
    let mut o = SolveOptions::default();
    if let Some(tol) = opts.tol {
        o.tol = tol;
    }
    o
}

pub fn dispatch(cmd: Command, doc: &Value, opts: &Options) -> CliResult<Output> {
    if cmd == Command::Dpp {
        return dpp(doc).map(|v| Output::Json(tagged(v)));
    }
    let model = input::model(doc)?;
    let body = match cmd {
        Command::Regions => {
            let regions = enumerate_regions(model.arrangement())?;
            json!({
                "count": regions.len(),
                "regions": regions
                    .iter()
                    .map(|r| json!({"sign": r.sign, "witness": rationals_to_json(&r.witness)}))
                    .collect::<Vec<_>>(),
            })
        }
        Command::Charpoly => {
            let chi = characteristic_polynomial(model.arrangement())?;
            json!({"char_poly": chi.coeffs, "at_minus_one": chi.eval(-1)})
        }
        Command::Mldegree => {
            let chi = characteristic_polynomial(model.arrangement())?;
            json!({"ml_degree": ml_degree(model.arrangement())?, "char_poly": chi.coeffs})
        }
        Command::Mle => {
            let s = input::floats(doc, "s", model.n())?;
            let rep = solve_all(&model, &s, &solve_options(opts))?;
            if let Some(f) = rep.failures.first() {
                return Err(f.error.clone().into());
            }
            json!({"points": rep.points, "mle": rep.mle.map(|i| i + 1)})
        }
        Command::Degenerate => {
            let anchor = opts.anchor.unwrap_or(1) - 1;
            let rep = unit_data_solutions(&model, anchor)?;
            json!({
                "anchor": anchor + 1,
                "generic": rep.is_generic(),
                "solutions": rep.solutions.iter().map(degenerate_json).collect::<Vec<_>>(),
                "singular_gram": rep.singular_gram.iter().map(|j| one_based(j)).collect::<Vec<_>>(),
            })
        }
        Command::Tropical => {
            let w = input::rationals(doc, "w", model.n())?;
            let rep = tropical_predictions(&model, &w)?;
            let predictions: Vec<Value> = rep
                .predictions
                .iter()
                .map(|p| json!({"J": one_based(&p.support), "z": rationals_to_json(&p.z)}))
                .collect();
            let mut body = json!({"anchor": rep.anchor + 1, "predictions": predictions, "warning": rep.warning});
            if let Some(grid) = &opts.eps_grid {
                let est = estimate_valuations(&model, &w, grid, &solve_options(opts))?;
                body["eps_grid"] = json!(grid);
                body["estimates"] = json!(est);
            }
            body
        }
        Command::Lognormal => {
            let y = input::model_point(doc, &model)?;
            let pi = lognormal_polytope(&model, &y)?;
            let q = dual_polytope(&model, &y)?;
            let swaps: Vec<Value> = swap_candidates(&model, &y)?
                .iter()
                .map(|c| json!({"i": c.i + 1, "j": c.j + 1, "sigma": c.sigma, "image": rationals_to_json(&c.image)}))
                .collect();
            json!({
                "y": rationals_to_json(&y),
                "polytope": pi.to_json(),
                "dual": q.to_json(),
                "signature": pi.signature(),
                "simple": pi.is_simple(),
                "swap_candidates": swaps,
            })
        }
        Command::Chamber => {
            let ch = chamber_arrangement(&model)?;
            let hyperplanes: Vec<Value> = ch
                .hyperplanes
                .iter()
                .map(|h| json!({"subset": one_based(&h.subset), "normal": rationals_to_json(&h.normal)}))
                .collect();
            let duplicates: Vec<Value> =
                ch.duplicates().iter().map(|(later, first)| json!([later + 1, first + 1])).collect();
            let mut body = json!({
                "hyperplanes": hyperplanes,
                "raw_count": ch.raw_count(),
                "distinct_count": ch.arrangement.n(),
                "duplicates": duplicates,
                "arrangement": arrangement_to_json(&ch.arrangement),
            });
            if let Some(samples) = opts.samples {
                let scan = combinatorial_type_scan(&model, samples, opts.seed)?;
                let regions: Vec<Value> = scan
                    .regions
                    .iter()
                    .map(|r| json!({"sign": r.sign, "constant": r.is_constant(), "signatures": r.signatures}))
                    .collect();
                body["type_scan"] = json!({
                    "samples": samples,
                    "seed": opts.seed,
                    "all_constant": scan.all_constant(),
                    "regions": regions,
                });
            }
            body
        }
        Command::Voronoi => {
            let y = input::model_point(doc, &model)?;
            let (a, b) = input::segment(doc, model.n())?;
            let steps = opts.samples.unwrap_or(DEFAULT_STEPS);
            let scan = log_voronoi_scan(&model, &y, &a, &b, steps, &solve_options(opts))?;
            json!({
                "y": rationals_to_json(&y),
                "steps": steps,
                "own_region": scan.own_region,
                "samples": scan.samples,
                "crossings": scan.crossings,
            })
        }
        Command::Ideal => {
            let g = veronese_generators(&model)?;
            let minors: Vec<Value> = g
                .minors()
                .iter()
                .map(|f| {
                    f.terms
                        .iter()
                        .map(|((a, b), c)| json!({"p": [a + 1, b + 1], "coeff": format_rational(c)}))
                        .collect::<Vec<_>>()
                        .into()
                })
                .collect();
            json!({
                "linear_forms": g.linear_forms.iter().map(|f| rationals_to_json(f)).collect::<Vec<_>>(),
                "r_coeffs": matrix_to_json(&g.r_coeffs),
                "minors": minors,
            })
        }
        Command::Singular => {
            let subspaces: Vec<Value> = singular_subspaces(&model)?
                .iter()
                .map(|s| {
                    let witness = s.witness(&model).map(|w| {
                        json!({
                            "x": rationals_to_json(&w.x),
                            "x_prime": rationals_to_json(&w.x_prime),
                            "image_distance": w.image_distance,
                        })
                    });
                    json!({
                        "I": one_based(&s.i),
                        "J": one_based(&s.j),
                        "projective_dim": s.projective_dim(),
                        "basis": s.basis.iter().map(|v| rationals_to_json(v)).collect::<Vec<_>>(),
                        "witness": witness,
                    })
                })
                .collect();
            json!({"count": subspaces.len(), "subspaces": subspaces})
        }
        Command::Plot => {
            let grid = opts.eps_grid.clone().unwrap_or_else(plot::default_arc_grid);
            let (svg, summary) = plot::plot(&model, doc, &grid, &solve_options(opts))?;
            return Ok(Output::Svg { svg, summary: tagged(summary) });
        }
        Command::Dpp => unreachable!("handled above"),
    };
    Ok(Output::Json(tagged(body)))
}

fn degenerate_json(s: &DegenerateSolution) -> Value {
    let y: Vec<String> = primitive_integer_vector(&s.y).iter().map(|v| v.to_string()).collect();
    json!({
        "J": one_based(&s.support_zeros),
        "y": y,
        "y_scaled": rationals_to_json(&s.y),
        "generic_flag": s.generic_flag,
    })
}

fn distribution_json(states: &[Vec<usize>], probs: Vec<Value>) -> Value {
    states.iter().zip(probs).map(|(s, p)| json!({"sigma": one_based(s), "prob": p})).collect()
}

fn dpp(doc: &Value) -> CliResult<Value> {
    if has(doc, "Theta") {
        let theta = input::matrix(doc, "Theta")?;
        let dist = dpp_probabilities::<Rational>(&theta)?;
        let probs = dist.probs.iter().map(|p| json!(format_rational(p))).collect();
        return Ok(json!({"distribution": distribution_json(&dist.states, probs)}));
    }
    let k = input::count(doc, "k")?;
    let n = input::count(doc, "n")?;
    let fixed = if k > 1 { input::matrix(doc, "Theta_fixed")? } else { slm_core::QMatrix::zeros(0, n) };
    let model = DPPModel::new(fixed, k, n)?;
    let lp = linear_projection_arrangement(&model)?;
    let mut body = json!({
        "k": k,
        "n": n,
        "states": lp.states.iter().map(|s| one_based(s)).collect::<Vec<_>>(),
        "columns": one_based(&lp.columns),
        "permuted": lp.permuted(),
        "points": matrix_to_json(&lp.points),
        "arrangement": arrangement_to_json(&lp.arrangement),
        "ml_degree": dpp_ml_degree(&model)?,
    });
    if n - k == 2 {
        body["ml_degree_formula"] = json!(dpp_ml_degree_l2(n as u64));
    }
    if has(doc, "theta") {
        let theta = input::floats(doc, "theta", n)?;
        let dist = dpp_probabilities(&model.theta(&theta))?;
        let probs = dist.probs.iter().map(|p| json!(p)).collect();
        body["theta"] = json!(theta);
        body["theta_reduced"] = json!(lp.reduce_theta(&theta));
        body["distribution"] = distribution_json(&dist.states, probs);
    }
    Ok(body)
}
