//! Critical points at degenerate data.
//!
//! At a unit data vector `e_i` the critical points have closed forms, one
//! per subset `J ⊆ [n] ∖ {i}` of size at most `d - 1`. Along data
//! `s(ε) = (ε^{w_1}, …, ε^{w_n})` the coordinates of each critical point
//! vanish like `ε^{z_j}` with `z_j ∈ {0, w_j - w_i}`.

use itertools::Itertools;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arrangement::{enumerate_regions, SignVector};
use crate::error::{Error, Result};
use crate::mle::{solve_from, SolveOptions};
use crate::model::SquaredLinearModel;
use crate::scalar::Scalar;
use crate::Rational;

/// Subsets `J ⊆ [n] ∖ {i}` with `|J| ≤ d - 1`, by size then lexicographically.
pub fn supports(n: usize, d: usize, anchor: usize) -> Vec<Vec<usize>> {
    let others: Vec<usize> = (0..n).filter(|&j| j != anchor).collect();
    (0..d.min(n))
        .flat_map(|k| others.iter().copied().combinations(k))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegenerateSolution {
    /// Coordinates forced to zero.
    pub support_zeros: Vec<usize>,
    /// Critical point in `y`-coordinates, scaled so `y_anchor = 1`.
    pub y: Vec<Rational>,
    /// False when a coordinate outside `J` vanishes or another support gives the same point.
    pub generic_flag: bool,
}

#[derive(Clone, Debug)]
pub struct UnitDataReport {
    pub anchor: usize,
    pub solutions: Vec<DegenerateSolution>,
    /// Supports whose Gram matrix `B_K B_Kᵀ` is singular.
    pub singular_gram: Vec<Vec<usize>>,
}

impl UnitDataReport {
    pub fn is_generic(&self) -> bool {
        self.singular_gram.is_empty() && self.solutions.iter().all(|s| s.generic_flag)
    }

    pub fn for_support(&self, j: &[usize]) -> Option<&DegenerateSolution> {
        self.solutions.iter().find(|s| s.support_zeros == j)
    }
}

/// Closed-form critical points at data `e_anchor`:
/// `y_K = -B_Kᵀ (B_K B_Kᵀ)^{-1} b_anchor` with `K = [n] ∖ (J ∪ {anchor})`.
pub fn unit_data_solutions(model: &SquaredLinearModel, anchor: usize) -> Result<UnitDataReport> {
    let n = model.n();
    if anchor >= n {
        return Err(Error::InvalidInput(format!("anchor {anchor} out of range for {n} states")));
    }
    let b = model.kernel_complement().matrix();
    let b_anchor = b.column(anchor);
    let mut solutions = Vec::new();
    let mut singular_gram = Vec::new();
    for j in supports(n, model.d(), anchor) {
        let k: Vec<usize> = (0..n).filter(|c| *c != anchor && !j.contains(c)).collect();
        let bk = b.select_columns(&k);
        let gram = bk.mul(&bk.transpose());
        let Some(t) = gram.solve(&b_anchor) else {
            singular_gram.push(j);
            continue;
        };
        let yk = bk.transpose().mul_vec(&t);
        let mut y = vec![Rational::zero(); n];
        y[anchor] = Rational::from_i64(1);
        for (c, v) in k.iter().zip(yk) {
            y[*c] = -v;
        }
        let clean = k.iter().all(|c| !y[*c].is_zero());
        solutions.push(DegenerateSolution { support_zeros: j, y, generic_flag: clean });
    }
    for a in 0..solutions.len() {
        for c in a + 1..solutions.len() {
            if solutions[a].y == solutions[c].y {
                solutions[a].generic_flag = false;
                solutions[c].generic_flag = false;
            }
        }
    }
    Ok(UnitDataReport { anchor, solutions, singular_gram })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TropicalPoint {
    #[serde(rename = "J")]
    pub support: Vec<usize>,
    /// Valuation vector with `z_anchor = 0`.
    #[serde(serialize_with = "crate::json::ser_rationals")]
    pub z: Vec<Rational>,
}

#[derive(Clone, Debug)]
pub struct TropicalReport {
    pub anchor: usize,
    pub predictions: Vec<TropicalPoint>,
    /// Set when the model fails the genericity test at this anchor.
    pub warning: Option<String>,
}

pub fn tropical_anchor(w: &[Rational]) -> Result<usize> {
    let min = w.iter().min().ok_or_else(|| Error::InvalidInput("empty valuation vector".into()))?;
    let idx: Vec<usize> = (0..w.len()).filter(|&i| &w[i] == min).collect();
    if idx.len() > 1 {
        return Err(Error::AnchorNotUnique { indices: idx });
    }
    Ok(idx[0])
}

/// `z = Σ_{j ∈ J} (w_j - w_i) e_j` for every admissible support `J`.
pub fn tropical_predictions(model: &SquaredLinearModel, w: &[Rational]) -> Result<TropicalReport> {
    if w.len() != model.n() {
        return Err(Error::InvalidInput(format!("w has length {}, model has {} states", w.len(), model.n())));
    }
    let anchor = tropical_anchor(w)?;
    let predictions = supports(model.n(), model.d(), anchor)
        .into_iter()
        .map(|j| {
            let z = (0..model.n())
                .map(|c| if j.contains(&c) { w[c].clone() - w[anchor].clone() } else { Rational::zero() })
                .collect();
            TropicalPoint { support: j, z }
        })
        .collect();
    let warning = match unit_data_solutions(model, anchor) {
        Ok(r) if r.is_generic() => None,
        Ok(_) => Some("model is not generic at this anchor; valuations may collide".into()),
        Err(e) => Some(e.to_string()),
    };
    Ok(TropicalReport { anchor, predictions, warning })
}

/// Default grid `10^{-1}, 10^{-1.5}, 10^{-2}, 10^{-2.5}`.
pub fn default_eps_grid() -> Vec<f64> {
    (0..4).map(|k| 10f64.powf(-1.0 - 0.5 * k as f64)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct PathSample {
    pub eps: f64,
    /// Critical point scaled so `y_anchor = 1`.
    pub y: Vec<f64>,
    pub x: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValuationEstimate {
    pub region: SignVector,
    /// Least-squares slopes of `log|y_j|` against `log ε`.
    pub z_hat: Vec<f64>,
    /// Slopes rounded to `{0, w_j - w_i}`.
    #[serde(serialize_with = "crate::json::ser_rationals")]
    pub z: Vec<Rational>,
    /// Largest distance between a slope and its rounded value.
    pub residual: f64,
    pub path: Vec<PathSample>,
}

impl ValuationEstimate {
    pub fn support(&self) -> Vec<usize> {
        (0..self.z.len()).filter(|&j| !self.z[j].is_zero()).collect()
    }

    /// The tracked point at the smallest `ε`.
    pub fn limit(&self) -> &[f64] {
        &self.path.last().expect("paths are nonempty").y
    }
}

/// Track every region's critical point along `s(ε) = ε^w`, warm-starting
/// each `ε` from the previous one, and fit valuations.
pub fn estimate_valuations(
    model: &SquaredLinearModel,
    w: &[Rational],
    eps_grid: &[f64],
    opts: &SolveOptions,
) -> Result<Vec<ValuationEstimate>> {
    if eps_grid.len() < 2 || eps_grid.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
        return Err(Error::InvalidInput("eps grid needs at least two values in (0, 1)".into()));
    }
    if eps_grid.windows(2).any(|p| p[1] >= p[0]) {
        return Err(Error::InvalidInput("eps grid must be strictly decreasing".into()));
    }
    if w.len() != model.n() {
        return Err(Error::InvalidInput(format!("w has length {}, model has {} states", w.len(), model.n())));
    }
    let anchor = tropical_anchor(w)?;
    let wf: Vec<f64> = w.iter().map(Scalar::to_f64).collect();
    let regions = enumerate_regions(model.arrangement())?;
    regions
        .par_iter()
        .map(|region| {
            let mut x = region.witness_f64();
            let mut path = Vec::with_capacity(eps_grid.len());
            for &eps in eps_grid {
                let s: Vec<f64> = wf.iter().map(|wj| eps.powf(*wj)).collect();
                let cp = solve_from(model, &s, &region.sign, &x, opts)?;
                if !region.sign.matches(&cp.y) {
                    return Err(Error::PathLost { region: region.sign.to_string(), eps });
                }
                let ya = cp.y[anchor];
                path.push(PathSample { eps, y: cp.y.iter().map(|v| v / ya).collect(), x: cp.x.clone() });
                x = cp.x;
            }
            Ok(fit_valuations(region.sign.clone(), w, anchor, path))
        })
        .collect()
}

fn fit_valuations(region: SignVector, w: &[Rational], anchor: usize, path: Vec<PathSample>) -> ValuationEstimate {
    let n = w.len();
    let logs: Vec<f64> = path.iter().map(|p| p.eps.ln()).collect();
    let mean_t = logs.iter().sum::<f64>() / logs.len() as f64;
    let var_t: f64 = logs.iter().map(|t| (t - mean_t).powi(2)).sum();
    let mut z_hat = vec![0.0; n];
    let mut z = vec![Rational::zero(); n];
    let mut residual = 0.0f64;
    for j in 0..n {
        let vals: Vec<f64> = path.iter().map(|p| p.y[j].abs().ln()).collect();
        let mean_v = vals.iter().sum::<f64>() / vals.len() as f64;
        let cov: f64 = logs.iter().zip(&vals).map(|(t, v)| (t - mean_t) * (v - mean_v)).sum();
        z_hat[j] = cov / var_t;
        let candidate = w[j].clone() - w[anchor].clone();
        let dist_zero = z_hat[j].abs();
        let dist_cand = (z_hat[j] - candidate.to_f64()).abs();
        if dist_cand < dist_zero {
            z[j] = candidate;
            residual = residual.max(dist_cand);
        } else {
            residual = residual.max(dist_zero);
        }
    }
    ValuationEstimate { region, z_hat, z, residual, path }
}

/// Largest coordinate distance between a tracked limit and a closed-form solution.
pub fn limit_distance(limit: &[f64], sol: &DegenerateSolution) -> f64 {
    limit
        .iter()
        .zip(&sol.y)
        .map(|(a, b)| (a - b.to_f64()).abs())
        .fold(0.0, f64::max)
}

/// Signs of a closed-form solution, zero where it vanishes.
pub fn solution_signs(sol: &DegenerateSolution) -> Vec<i8> {
    sol.y.iter().map(|v| if v.is_zero() { 0 } else if v.is_positive() { 1 } else { -1 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::scalar::int;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn steiner_unit_data_matches_closed_forms() {
        let m = SquaredLinearModel::new(catalog::steiner()).unwrap();
        let r = unit_data_solutions(&m, 0).unwrap();
        assert_eq!(r.solutions.len(), 7);
        assert!(r.is_generic());
        let third: Vec<Rational> = ints(&[3, -1, -1, 1]).into_iter().map(|v| v / int(3)).collect();
        assert_eq!(r.for_support(&[]).unwrap().y, third);
        for sol in &r.solutions {
            assert!(m.kernel_complement().contains(&sol.y));
            for j in &sol.support_zeros {
                assert!(sol.y[*j].is_zero());
            }
        }
    }

    #[test]
    fn nongeneric_model_collides() {
        let m = SquaredLinearModel::new(catalog::nongeneric_uniform()).unwrap();
        let r = unit_data_solutions(&m, 0).unwrap();
        assert_eq!(r.solutions.len(), 4);
        assert!(!r.is_generic());
    }

    #[test]
    fn supports_count_is_mu() {
        assert_eq!(supports(4, 3, 0).len(), 7);
        assert_eq!(supports(6, 3, 2).len(), 16);
    }

    #[test]
    fn tropical_formula() {
        let m = SquaredLinearModel::new(catalog::circle()).unwrap();
        let r = tropical_predictions(&m, &ints(&[0, 1, 2])).unwrap();
        let zs: Vec<Vec<Rational>> = r.predictions.iter().map(|p| p.z.clone()).collect();
        assert_eq!(zs, vec![ints(&[0, 0, 0]), ints(&[0, 1, 0]), ints(&[0, 0, 2])]);
        assert_eq!(
            tropical_predictions(&m, &ints(&[1, 1, 2])).unwrap_err(),
            Error::AnchorNotUnique { indices: vec![0, 1] }
        );
        let shifted = tropical_predictions(&m, &ints(&[5, 6, 7])).unwrap();
        assert_eq!(shifted.predictions, r.predictions);
    }

    #[test]
    fn eps_grid_validation() {
        let m = SquaredLinearModel::new(catalog::circle()).unwrap();
        let opts = SolveOptions::default();
        assert!(estimate_valuations(&m, &ints(&[0, 1, 2]), &[0.01, 0.1], &opts).is_err());
        assert_eq!(default_eps_grid().len(), 4);
    }

    #[test]
    fn circle_paths_match_predictions() {
        let m = SquaredLinearModel::new(catalog::circle()).unwrap();
        let w = ints(&[0, 1, 2]);
        let est = estimate_valuations(&m, &w, &default_eps_grid(), &SolveOptions::default()).unwrap();
        let mut got: Vec<Vec<Rational>> = est.iter().map(|e| e.z.clone()).collect();
        got.sort();
        let mut want: Vec<Vec<Rational>> = tropical_predictions(&m, &w).unwrap().predictions.into_iter().map(|p| p.z).collect();
        want.sort();
        assert_eq!(got, want);
        assert!(est.iter().all(|e| e.residual < 0.1));
    }

    #[test]
    fn steiner_paths_limit_to_closed_forms() {
        let m = SquaredLinearModel::new(catalog::steiner()).unwrap();
        let w = ints(&[0, 3, 4, 5]);
        let est = estimate_valuations(&m, &w, &default_eps_grid(), &SolveOptions::default()).unwrap();
        let unit = unit_data_solutions(&m, 0).unwrap();
        assert_eq!(est.len(), 7);
        let mut seen = Vec::new();
        for e in &est {
            assert!(e.residual <= 0.1);
            let sol = unit.for_support(&e.support()).unwrap();
            assert!(limit_distance(e.limit(), sol) < 1e-3);
            seen.push(e.support());
        }
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 7);
        // the path limiting to (1:0:0:1) has y_2 ≈ 2ε³
        let e = est.iter().find(|e| e.support() == vec![1, 2]).unwrap();
        let at = e.path.iter().find(|p| (p.eps - 1e-2).abs() < 1e-12).unwrap();
        let ratio = at.y[1].abs() / 1e-6;
        assert!((ratio - 2.0).abs() < 0.1, "{ratio}");
    }
}
