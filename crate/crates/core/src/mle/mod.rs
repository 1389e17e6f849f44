//! Per-region maximum likelihood and the determinantal likelihood matrix.

mod newton;

use rayon::prelude::*;
use serde::Serialize;

use crate::arrangement::{enumerate_regions, Region, SignVector};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::SquaredLinearModel;
use crate::FMatrix;

pub use newton::{solve_from, solve_region};

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Stop when the gradient at the unit-norm parameter drops below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-10, max_iter: 200 }
    }
}

/// The unique critical point of one region. `x` has unit norm and is
/// oriented so that `y = Ax` carries exactly the region's sign vector.
#[derive(Clone, Debug, Serialize)]
pub struct CriticalPoint {
    pub region: SignVector,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub p: Vec<f64>,
    /// `Σ s_i log p_i` with `s` scaled to unit sum.
    #[serde(rename = "logL")]
    pub log_l: f64,
    pub grad_norm: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct RegionFailure {
    pub region: SignVector,
    pub error: Error,
}

#[derive(Clone, Debug)]
pub struct SolveAllReport {
    /// Converged points in canonical region order.
    pub points: Vec<CriticalPoint>,
    pub failures: Vec<RegionFailure>,
    /// Index into `points` of the largest log-likelihood.
    pub mle: Option<usize>,
}

impl SolveAllReport {
    pub fn mle_point(&self) -> Option<&CriticalPoint> {
        self.mle.map(|i| &self.points[i])
    }
}

/// Validate strictly positive data and scale it to unit sum.
pub(crate) fn prepare_data(model: &SquaredLinearModel, s: &[f64]) -> Result<Vec<f64>> {
    if s.len() != model.n() {
        return Err(Error::InvalidInput(format!("data has length {}, model has {} states", s.len(), model.n())));
    }
    if s.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidInput("data must be finite and nonnegative".into()));
    }
    let zeros: Vec<usize> = (0..s.len()).filter(|&i| s[i] == 0.0).collect();
    if !zeros.is_empty() {
        return Err(Error::BoundaryData { zeros });
    }
    let total: f64 = s.iter().sum();
    Ok(s.iter().map(|v| v / total).collect())
}

/// One critical point per region, solved concurrently.
pub fn solve_all(model: &SquaredLinearModel, s: &[f64], opts: &SolveOptions) -> Result<SolveAllReport> {
    let regions = enumerate_regions(model.arrangement())?;
    solve_regions(model, s, &regions, opts)
}

pub fn solve_regions(
    model: &SquaredLinearModel,
    s: &[f64],
    regions: &[Region],
    opts: &SolveOptions,
) -> Result<SolveAllReport> {
    prepare_data(model, s)?;
    let results: Vec<Result<CriticalPoint>> = regions.par_iter().map(|r| solve_region(model, s, r, opts)).collect();
    let mut points = Vec::new();
    let mut failures = Vec::new();
    for (region, res) in regions.iter().zip(results) {
        match res {
            Ok(p) => points.push(p),
            Err(error) => failures.push(RegionFailure { region: region.sign.clone(), error }),
        }
    }
    let mle = (0..points.len()).max_by(|&i, &j| points[i].log_l.total_cmp(&points[j].log_l));
    Ok(SolveAllReport { points, failures, mle })
}

/// `[s; ℓ(x)²; B·diag(ℓ(x))]`, of shape `(n-d+2) × n`.
#[derive(Clone, Debug)]
pub struct LikelihoodMatrix {
    pub rows: FMatrix,
}

pub fn likelihood_matrix(model: &SquaredLinearModel, s: &[f64], x: &[f64]) -> LikelihoodMatrix {
    let l = model.forms(x);
    likelihood_matrix_from_forms(model, s, &l)
}

/// Same matrix built from precomputed `y = Ax`.
pub fn likelihood_matrix_from_forms(model: &SquaredLinearModel, s: &[f64], y: &[f64]) -> LikelihoodMatrix {
    let n = model.n();
    let b = model.kernel_complement().matrix_as::<f64>();
    let rows = Matrix::from_fn(b.nrows() + 2, n, |r, j| match r {
        0 => s[j],
        1 => y[j] * y[j],
        _ => b[(r - 2, j)] * y[j],
    });
    LikelihoodMatrix { rows }
}

impl LikelihoodMatrix {
    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self.rows.to_nalgebra().singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// `σ_{n-d+2} / σ_1`; zero exactly when the maximal minors vanish.
    pub fn rank_ratio(&self) -> f64 {
        let sv = self.singular_values();
        let k = self.rows.nrows().min(self.rows.ncols());
        if sv[0] == 0.0 {
            return 0.0;
        }
        if k < self.rows.nrows() {
            return 0.0;
        }
        sv[k - 1] / sv[0]
    }
}

/// Row count minus numerical rank, counting singular values above `tol·σ_1`.
pub fn rank_defect(m: &LikelihoodMatrix, tol: f64) -> usize {
    let sv = m.singular_values();
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&v| v > tol * top).count();
    m.rows.nrows() - rank
}
