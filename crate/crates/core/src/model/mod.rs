//! The squared linear model `p_i = ℓ_i(x)² / q(x)` with `q = Σ_j ℓ_j²`.

mod singular;
mod veronese;

use serde::{Deserialize, Serialize};

use crate::arrangement::{kernel_complement, Arrangement, KernelComplement};
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::scalar::Scalar;
use crate::FMatrix;

pub use singular::{singular_subspaces, SingularSubspace, SingularWitness};
pub use veronese::{
    minor_space_dimension, quadric_monomials, steiner_quartic, veronese_generators, QuadraticForm,
    VeroneseGenerators,
};

#[derive(Clone, Debug)]
pub struct SquaredLinearModel {
    arr: Arrangement,
    b: KernelComplement,
    a_f64: FMatrix,
}

impl SquaredLinearModel {
    /// Requires `n > d > 1`, an essential arrangement and no parallel rows.
    pub fn new(arr: Arrangement) -> Result<Self> {
        let (n, d) = (arr.n(), arr.d());
        if d < 2 || n <= d {
            return Err(Error::InvalidInput(format!("model needs n > d > 1, got n = {n}, d = {d}")));
        }
        arr.require_no_parallel()?;
        let b = kernel_complement(&arr)?;
        let a_f64 = arr.matrix_as::<f64>();
        Ok(SquaredLinearModel { arr, b, a_f64 })
    }

    pub fn arrangement(&self) -> &Arrangement {
        &self.arr
    }

    pub fn kernel_complement(&self) -> &KernelComplement {
        &self.b
    }

    pub fn n(&self) -> usize {
        self.arr.n()
    }

    pub fn d(&self) -> usize {
        self.arr.d()
    }

    /// Dimension `d(d+1)/2` of the space of quadrics in `x`.
    pub fn quadric_dim(&self) -> usize {
        self.d() * (self.d() + 1) / 2
    }

    pub fn matrix_f64(&self) -> &FMatrix {
        &self.a_f64
    }

    /// `ℓ(x) = Ax` in floating point.
    pub fn forms(&self, x: &[f64]) -> Vec<f64> {
        self.a_f64.mul_vec(x)
    }
}

/// Unit-norm representative of a point of `P^{d-1}`, first nonzero coordinate positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterPoint(Vec<f64>);

impl ParameterPoint {
    pub fn new(x: &[f64]) -> Result<Self> {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroPoint);
        }
        let lead = x.iter().find(|v| **v != 0.0).copied().unwrap_or(1.0);
        let scale = norm.copysign(lead);
        Ok(ParameterPoint(x.iter().map(|v| v / scale).collect()))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Probabilities `ℓ_i² / Σ ℓ_j²` over any scalar type.
pub fn evaluate<T: Scalar>(model: &SquaredLinearModel, x: &[T]) -> Result<Vec<T>> {
    if x.iter().all(|v| v.is_zero()) {
        return Err(Error::ZeroPoint);
    }
    let a = model.arrangement().matrix_as::<T>();
    let sq: Vec<T> = a.mul_vec(x).into_iter().map(|l| l.clone() * l).collect();
    let q = sq.iter().fold(T::zero(), |acc, v| acc + v.clone());
    Ok(sq.into_iter().map(|v| v / q.clone()).collect())
}

/// Value, gradient and (optionally) Hessian of
/// `Λ(x) = Σ s_i log ℓ_i² − S log q` for the forms given by the rows of `a`.
#[derive(Clone, Debug)]
pub(crate) struct LikelihoodParts {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Option<FMatrix>,
}

pub(crate) fn likelihood_parts(a: &FMatrix, s: &[f64], x: &[f64], with_hessian: bool) -> Result<LikelihoodParts> {
    let (n, d) = (a.nrows(), a.ncols());
    if s.len() != n || x.len() != d {
        return Err(Error::InvalidInput(format!(
            "expected s of length {n} and x of length {d}, got {} and {}",
            s.len(),
            x.len()
        )));
    }
    let l = a.mul_vec(x);
    let q: f64 = l.iter().map(|v| v * v).sum();
    if q == 0.0 {
        return Err(Error::ZeroPoint);
    }
    let total: f64 = s.iter().sum();
    let mut value = -total * q.ln();
    let mut grad = vec![0.0; d];
    // g = AᵀAx
    let mut g = vec![0.0; d];
    for i in 0..n {
        let row = a.row(i);
        for k in 0..d {
            g[k] += l[i] * row[k];
        }
        if s[i] == 0.0 {
            continue;
        }
        if l[i] == 0.0 {
            return Err(Error::OnHyperplane { index: i });
        }
        value += s[i] * (l[i] * l[i]).ln();
        for k in 0..d {
            grad[k] += 2.0 * s[i] * row[k] / l[i];
        }
    }
    for k in 0..d {
        grad[k] -= 2.0 * total * g[k] / q;
    }
    let hess = with_hessian.then(|| {
        let mut h = Matrix::<f64>::zeros(d, d);
        for i in 0..n {
            let row = a.row(i);
            let w = if s[i] == 0.0 { 0.0 } else { -2.0 * s[i] / (l[i] * l[i]) };
            let gram = -2.0 * total / q;
            for j in 0..d {
                for k in 0..d {
                    h[(j, k)] += (w + gram) * row[j] * row[k];
                }
            }
        }
        for j in 0..d {
            for k in 0..d {
                h[(j, k)] += 4.0 * total * g[j] * g[k] / (q * q);
            }
        }
        h
    });
    Ok(LikelihoodParts { value, grad, hess })
}

/// `Σ s_i log ℓ_i² − (Σ s_i) log q`, which equals `Σ s_i log p_i`.
pub fn log_likelihood(model: &SquaredLinearModel, s: &[f64], x: &[f64]) -> Result<f64> {
    Ok(likelihood_parts(model.matrix_f64(), s, x, false)?.value)
}

pub fn gradient(model: &SquaredLinearModel, s: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    Ok(likelihood_parts(model.matrix_f64(), s, x, false)?.grad)
}

pub fn hessian(model: &SquaredLinearModel, s: &[f64], x: &[f64]) -> Result<FMatrix> {
    Ok(likelihood_parts(model.matrix_f64(), s, x, true)?.hess.expect("requested"))
}

/// Euclidean norm.
pub fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}
