use itertools::Itertools;
use num_traits::Zero;

use super::{evaluate, SquaredLinearModel};
use crate::error::Result;
use crate::linalg::Matrix;
use crate::scalar::{int, Scalar};
use crate::Rational;

/// A linear subspace of parameter space on which the parametrization fails
/// to be injective.
#[derive(Clone, Debug)]
pub struct SingularSubspace {
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    /// Basis of `ker(B·A_{I,J})`.
    pub basis: Vec<Vec<Rational>>,
}

impl SingularSubspace {
    pub fn projective_dim(&self) -> isize {
        self.basis.len() as isize - 1
    }
}

/// Two parameter points with the same image, `Ax' = A_{I,J} x`.
#[derive(Clone, Debug)]
pub struct SingularWitness {
    pub x: Vec<Rational>,
    pub x_prime: Vec<Rational>,
    pub image_distance: f64,
}

/// One subspace per unordered partition `I ⊔ J = [n]` with `|I|, |J| ≤ d-1`
/// whose kernel is nonzero. Empty when `n > 2d - 2`.
pub fn singular_subspaces(model: &SquaredLinearModel) -> Result<Vec<SingularSubspace>> {
    let (n, d) = (model.n(), model.d());
    let a = model.arrangement().matrix();
    let b = model.kernel_complement().matrix();
    let mut out = Vec::new();
    if n > 2 * d - 2 {
        return Ok(out);
    }
    // index 0 always sits in I so each unordered partition appears once
    for size_j in 1..=(d - 1).min(n - 1) {
        if n - size_j > d - 1 {
            continue;
        }
        for j in (1..n).combinations(size_j) {
            let i: Vec<usize> = (0..n).filter(|k| !j.contains(k)).collect();
            let signed = flip_rows(a, &j);
            let basis = b.mul(&signed).nullspace();
            if !basis.is_empty() {
                out.push(SingularSubspace { i, j, basis });
            }
        }
    }
    Ok(out)
}

fn flip_rows(a: &Matrix<Rational>, j: &[usize]) -> Matrix<Rational> {
    Matrix::from_fn(a.nrows(), a.ncols(), |r, c| {
        if j.contains(&r) {
            -a[(r, c)].clone()
        } else {
            a[(r, c)].clone()
        }
    })
}

impl SingularSubspace {
    /// A point of the subspace together with a second preimage of its image.
    pub fn witness(&self, model: &SquaredLinearModel) -> Option<SingularWitness> {
        let a = model.arrangement().matrix();
        let signed = flip_rows(a, &self.j);
        // try a few fixed combinations until x' is not ±x
        for attempt in 1..20i64 {
            let mut x = vec![Rational::zero(); model.d()];
            for (k, v) in self.basis.iter().enumerate() {
                let coef = int(attempt * (2 * k as i64 + 1) + k as i64 * k as i64);
                for (xi, vi) in x.iter_mut().zip(v) {
                    *xi += coef.clone() * vi;
                }
            }
            if x.iter().all(Zero::is_zero) {
                continue;
            }
            let target = signed.mul_vec(&x);
            let x_prime = solve_consistent(a, &target)?;
            if crate::arrangement::are_parallel(&x, &x_prime) {
                continue;
            }
            let p: Vec<f64> = evaluate(model, &x).ok()?.iter().map(Scalar::to_f64).collect();
            let pp: Vec<f64> = evaluate(model, &x_prime).ok()?.iter().map(Scalar::to_f64).collect();
            let image_distance = p.iter().zip(&pp).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
            return Some(SingularWitness { x, x_prime, image_distance });
        }
        None
    }
}

/// Exact solution of `A x = b` for full column rank `A`, if consistent.
fn solve_consistent(a: &Matrix<Rational>, b: &[Rational]) -> Option<Vec<Rational>> {
    let (_, pivots) = a.transpose().rref();
    let sub = a.select_rows(&pivots);
    let rhs: Vec<Rational> = pivots.iter().map(|&p| b[p].clone()).collect();
    let x = sub.solve(&rhs)?;
    (a.mul_vec(&x) == b).then_some(x)
}
