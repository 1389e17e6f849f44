use rayon::prelude::*;
use serde::Serialize;

use super::lognormal_polytope;
use crate::arrangement::{enumerate_regions, Region, SignVector};
use crate::error::{Error, Result};
use crate::mle::{solve_regions, SolveOptions};
use crate::model::SquaredLinearModel;
use crate::Rational;

/// Bisection stops once the bracket is this short in segment parameter.
const BISECTION_TOL: f64 = 1e-4;
/// Slack for accepting endpoints given to finite precision.
const MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct VoronoiSample {
    pub t: f64,
    pub s: Vec<f64>,
    /// Region of the global maximizer.
    pub region: SignVector,
    /// Whether the maximizer is the fixed point's own region.
    pub own: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Crossing {
    pub t: f64,
    pub from: SignVector,
    pub to: SignVector,
}

#[derive(Clone, Debug, Serialize)]
pub struct VoronoiScan {
    pub own_region: SignVector,
    pub samples: Vec<VoronoiSample>,
    pub crossings: Vec<Crossing>,
}

fn point_on(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(u, v)| (1.0 - t) * u + t * v).collect()
}

fn maximizer(model: &SquaredLinearModel, regions: &[Region], s: &[f64], opts: &SolveOptions) -> Result<SignVector> {
    let report = solve_regions(model, s, regions, opts)?;
    if let Some(f) = report.failures.first() {
        return Err(f.error.clone());
    }
    Ok(report.mle_point().expect("at least one region").region.clone())
}

/// Sample the segment `[a, b] ⊂ Π(y)` at `steps + 1` equally spaced points,
/// record which region holds the global maximizer, and localize every
/// switch by bisection.
pub fn log_voronoi_scan(
    model: &SquaredLinearModel,
    y: &[Rational],
    a: &[f64],
    b: &[f64],
    steps: usize,
    opts: &SolveOptions,
) -> Result<VoronoiScan> {
    let pi = lognormal_polytope(model, y)?.to_f64();
    for end in [a, b] {
        if end.len() != model.n() || end.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::InvalidInput("segment endpoints must be strictly positive".into()));
        }
        let inside = pi.equations.iter().all(|h| {
            let scale = h.normal.iter().zip(end).map(|(u, v)| (u * v).abs()).sum::<f64>() + h.offset.abs();
            h.slack(end).abs() <= MEMBERSHIP_TOL * scale.max(1.0)
        });
        if !inside {
            return Err(Error::InvalidInput("segment endpoint is not in the log-normal polytope".into()));
        }
    }
    let steps = steps.max(1);
    let own_region = SignVector::from_values(y).expect("no zero coordinate");
    let regions = enumerate_regions(model.arrangement())?;
    let samples = (0..=steps)
        .into_par_iter()
        .map(|k| {
            let t = k as f64 / steps as f64;
            let s = point_on(a, b, t);
            let region = maximizer(model, &regions, &s, opts)?;
            let own = region == own_region;
            Ok(VoronoiSample { t, s, region, own })
        })
        .collect::<Result<Vec<_>>>()?;
    let crossings = samples
        .par_windows(2)
        .filter(|w| w[0].region != w[1].region)
        .map(|w| {
            let (mut lo, mut hi) = (w[0].t, w[1].t);
            let from = w[0].region.clone();
            let mut to = w[1].region.clone();
            while hi - lo > BISECTION_TOL {
                let mid = 0.5 * (lo + hi);
                let r = maximizer(model, &regions, &point_on(a, b, mid), opts)?;
                if r == from {
                    lo = mid;
                } else {
                    hi = mid;
                    to = r;
                }
            }
            Ok(Crossing { t: 0.5 * (lo + hi), from, to })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VoronoiScan { own_region, samples, crossings })
}
