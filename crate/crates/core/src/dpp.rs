//! Projection determinantal point processes.
//!
//! A `k × n` matrix `Θ` of rank `k` gives the distribution on `k`-subsets
//! `σ ⊆ [n]` with `P(σ) = det(Θ_σ)² / det(ΘΘᵀ)`. Fixing the first `k-1`
//! rows and letting the last one vary gives a squared linear model whose
//! arrangement is the discriminantal arrangement of `n` points in `P^{n-k}`.

use itertools::Itertools;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::arrangement::{enumerate_regions, Arrangement};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::{QMatrix, Rational};

/// Probabilities of all `k`-subsets in lexicographic order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsetDistribution<T> {
    pub states: Vec<Vec<usize>>,
    pub probs: Vec<T>,
}

impl<T: Scalar> SubsetDistribution<T> {
    pub fn prob(&self, sigma: &[usize]) -> Option<&T> {
        self.states.iter().position(|s| s == sigma).map(|i| &self.probs[i])
    }
}

/// `det(Θ_σ)² / det(ΘΘᵀ)` for every `k`-subset `σ`.
pub fn dpp_probabilities<T: Scalar>(theta: &Matrix<T>) -> Result<SubsetDistribution<T>> {
    let (k, n) = (theta.nrows(), theta.ncols());
    let rank = theta.rank();
    if rank < k || k == 0 {
        return Err(Error::RankDeficient { rank, expected: k });
    }
    let states: Vec<Vec<usize>> = (0..n).combinations(k).collect();
    let squares: Vec<T> = states
        .par_iter()
        .map(|s| {
            let m = theta.select_columns(s).determinant();
            m.clone() * m
        })
        .collect();
    let gram = theta.mul(&theta.transpose()).determinant();
    let probs = squares.into_iter().map(|v| v / gram.clone()).collect();
    Ok(SubsetDistribution { states, probs })
}

/// `|Σ_σ det(Θ_σ)² − det(ΘΘᵀ)| / det(ΘΘᵀ)`.
pub fn cauchy_binet_residual(theta: &Matrix<f64>) -> f64 {
    let k = theta.nrows();
    let sum: f64 = (0..theta.ncols())
        .combinations(k)
        .map(|s| theta.select_columns(&s).determinant().powi(2))
        .sum();
    let gram = theta.mul(&theta.transpose()).determinant();
    ((sum - gram) / gram).abs()
}

/// A linear projection DPP: `Θ` with fixed first `k-1` rows and a free last row.
#[derive(Clone, Debug, PartialEq)]
pub struct DPPModel {
    theta_fixed: QMatrix,
    k: usize,
    n: usize,
}

impl DPPModel {
    pub fn new(theta_fixed: QMatrix, k: usize, n: usize) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::InvalidInput(format!("need 0 < k < n, got k = {k}, n = {n}")));
        }
        if theta_fixed.nrows() != k - 1 || (k > 1 && theta_fixed.ncols() != n) {
            return Err(Error::InvalidInput(format!(
                "fixed rows must be {}×{n}, got {}×{}",
                k - 1,
                theta_fixed.nrows(),
                theta_fixed.ncols()
            )));
        }
        let rank = theta_fixed.rank();
        if rank < k - 1 {
            return Err(Error::RankDeficient { rank, expected: k - 1 });
        }
        Ok(DPPModel { theta_fixed, k, n })
    }

    pub fn theta_fixed(&self) -> &QMatrix {
        &self.theta_fixed
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The full `k × n` matrix with `theta` as its last row.
    pub fn theta(&self, theta: &[f64]) -> Matrix<f64> {
        let mut rows = self.theta_fixed.to_f64().to_rows();
        rows.push(theta.to_vec());
        Matrix::from_rows(rows)
    }
}

/// The reduced form `[I | -Aᵀ | θ']` of a linear projection DPP.
#[derive(Clone, Debug)]
pub struct LinearProjection {
    /// One form in `θ' ∈ R^{n-k+1}` per state, in the order of `states`.
    pub arrangement: Arrangement,
    /// States `σ` in lexicographic order; state `σ` owns the minor on the
    /// point columns outside `σ`.
    pub states: Vec<Vec<usize>>,
    /// Original column indices in reduced order: free columns, then pivots.
    pub columns: Vec<usize>,
    /// The points in `P^{n-k}`, one column of `[I | -Aᵀ]` per original column.
    pub points: QMatrix,
    /// `A`, with `[A | I]` row-equivalent to the fixed rows after permuting columns.
    pub reduced: QMatrix,
}

impl LinearProjection {
    /// Whether the columns had to be permuted to find an invertible pivot block.
    pub fn permuted(&self) -> bool {
        self.columns.windows(2).any(|w| w[0] > w[1])
    }

    /// Reduced parameters `θ'` for a full last row `θ`.
    pub fn reduce_theta(&self, theta: &[f64]) -> Vec<f64> {
        let free = self.reduced.ncols();
        let a = self.reduced.to_f64();
        (0..free)
            .map(|j| {
                let own = theta[self.columns[j]];
                own - (0..a.nrows()).map(|i| theta[self.columns[free + i]] * a[(i, j)]).sum::<f64>()
            })
            .collect()
    }
}

/// Pivot block: the trailing `k-1` columns when invertible, otherwise the
/// rightmost independent columns.
fn pivot_columns(fixed: &QMatrix) -> Result<Vec<usize>> {
    let (r, n) = (fixed.nrows(), fixed.ncols());
    let trailing: Vec<usize> = (n - r..n).collect();
    if fixed.select_columns(&trailing).rank() == r {
        return Ok(trailing);
    }
    let mut cols: Vec<usize> = Vec::new();
    for j in (0..n).rev() {
        cols.push(j);
        if fixed.select_columns(&cols).rank() < cols.len() {
            cols.pop();
        }
        if cols.len() == r {
            cols.reverse();
            return Ok(cols);
        }
    }
    Err(Error::ReductionFailed { block: trailing })
}

/// Row-reduce to `[A | I]`, then take the maximal minors of
/// `[I | -Aᵀ | θ']` that contain the `θ'` column as linear forms in `θ'`.
pub fn linear_projection_arrangement(dpp: &DPPModel) -> Result<LinearProjection> {
    let (k, n) = (dpp.k, dpp.n);
    let free_count = n - k + 1;
    let (reduced, columns) = if k == 1 {
        (Matrix::zeros(0, n), (0..n).collect::<Vec<_>>())
    } else {
        let pivots = pivot_columns(&dpp.theta_fixed)?;
        let free: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
        let inv = dpp
            .theta_fixed
            .select_columns(&pivots)
            .inverse()
            .ok_or_else(|| Error::ReductionFailed { block: pivots.clone() })?;
        let a = inv.mul(&dpp.theta_fixed.select_columns(&free));
        (a, free.into_iter().chain(pivots).collect())
    };
    // points: column j of [I | -Aᵀ], indexed by reduced position
    let points_reduced = Matrix::from_fn(free_count, n, |r, j| {
        if j < free_count {
            if r == j {
                Rational::from_integer(1.into())
            } else {
                Rational::zero()
            }
        } else {
            -reduced[(j - free_count, r)].clone()
        }
    });
    let mut position = vec![0; n];
    for (p, &c) in columns.iter().enumerate() {
        position[c] = p;
    }
    let points = Matrix::from_fn(free_count, n, |r, c| points_reduced[(r, position[c])].clone());

    let states: Vec<Vec<usize>> = (0..n).combinations(k).collect();
    let forms: Vec<Vec<Rational>> = states
        .par_iter()
        .map(|sigma| {
            let span: Vec<usize> = (0..n).filter(|j| !sigma.contains(j)).collect();
            minor_form(&points, &span)
        })
        .collect();
    let arrangement = Arrangement::from_rows(forms)?;
    Ok(LinearProjection { arrangement, states, columns, points, reduced })
}

/// Coefficients of `det[P_span | θ]` in `θ`, by cofactor expansion along the last column.
fn minor_form(points: &QMatrix, span: &[usize]) -> Vec<Rational> {
    let m = points.nrows();
    let block = points.select_columns(span);
    (0..m)
        .map(|r| {
            let rows: Vec<usize> = (0..m).filter(|&t| t != r).collect();
            let minor = block.select_rows(&rows).determinant();
            if (r + m - 1).is_multiple_of(2) {
                minor
            } else {
                -minor
            }
        })
        .collect()
}

/// Normal of the hyperplane through the given points, by elimination.
pub fn span_hyperplane(points: &QMatrix, span: &[usize]) -> Option<Vec<Rational>> {
    let ns = points.select_columns(span).transpose().nullspace();
    (ns.len() == 1).then(|| ns.into_iter().next().expect("one vector"))
}

/// `(n-1)(n³ - 5n² + 14n - 8) / 8`, the ML degree of a generic linear
/// projection DPP with `n - k = 2`.
pub fn dpp_ml_degree_l2(n: u64) -> u64 {
    (n - 1) * (n * n * n + 14 * n - 5 * n * n - 8) / 8
}

/// ML degree by counting regions of the reduced arrangement. Works for any `n - k`.
pub fn dpp_ml_degree(dpp: &DPPModel) -> Result<usize> {
    let lp = linear_projection_arrangement(dpp)?;
    let (arr, _) = lp.arrangement.dedup_parallel();
    Ok(enumerate_regions(&arr)?.len())
}
