//! Safeguarded Newton ascent inside one region.
//!
//! The iteration runs in a frame `z = A_B x` where `B` is a set of `d`
//! independent rows chosen among the smallest `|ℓ_i|` at the start. In that
//! frame the forms are `ℓ = C z` with `C = A A_B^{-1}` computed exactly, so
//! the forms closest to vanishing are plain coordinates and keep full
//! relative precision. Each step fixes the largest coordinate of `z` and
//! moves the others.

use nalgebra::{DMatrix, DVector};

use super::{prepare_data, CriticalPoint, SolveOptions};
use crate::arrangement::{Region, SignVector};
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::model::{likelihood_parts, SquaredLinearModel};
use crate::scalar::Scalar;
use crate::{FMatrix, Rational};

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-20;

struct Frame {
    /// `A A_B^{-1}`; rows indexed by `basis` are unit vectors.
    c: FMatrix,
    /// `A_B^{-1}`, maps frame coordinates back to `x`.
    ab_inv: FMatrix,
    ab_t: FMatrix,
    basis: Vec<usize>,
}

impl Frame {
    /// Greedy independent rows in order of increasing `|ℓ_i|`.
    fn choose_basis(model: &SquaredLinearModel, l: &[f64]) -> Vec<usize> {
        let a = model.arrangement().matrix();
        let mut order: Vec<usize> = (0..model.n()).collect();
        order.sort_by(|&i, &j| l[i].abs().total_cmp(&l[j].abs()).then(i.cmp(&j)));
        let mut basis: Vec<usize> = Vec::with_capacity(model.d());
        for i in order {
            basis.push(i);
            if a.select_rows(&basis).rank() < basis.len() {
                basis.pop();
            }
            if basis.len() == model.d() {
                break;
            }
        }
        basis
    }

    fn new(model: &SquaredLinearModel, basis: Vec<usize>) -> Frame {
        let a = model.arrangement().matrix();
        let ab = a.select_rows(&basis);
        let inv: Matrix<Rational> = ab.inverse().expect("basis rows are independent");
        Frame {
            c: a.mul(&inv).to_f64(),
            ab_inv: inv.to_f64(),
            ab_t: ab.transpose().to_f64(),
            basis,
        }
    }

    /// Frame coordinates of the point with forms `l`, scaled to max-abs one.
    fn coords(&self, l: &[f64]) -> Vec<f64> {
        let mut z: Vec<f64> = self.basis.iter().map(|&i| l[i]).collect();
        scale_max_abs(&mut z);
        z
    }

    /// Norm of the `x`-gradient at the unit-norm representative of `A_B^{-1} z`.
    fn grad_norm(&self, z: &[f64], grad_z: &[f64]) -> f64 {
        let x = self.ab_inv.mul_vec(z);
        let gx = self.ab_t.mul_vec(grad_z);
        dot(&x, &x).sqrt() * dot(&gx, &gx).sqrt()
    }
}

fn signs_of(v: &[f64]) -> Vec<i8> {
    v.iter().map(Scalar::sign).collect()
}

fn scale_max_abs(z: &mut [f64]) {
    let m = z.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if m > 0.0 {
        z.iter_mut().for_each(|v| *v /= m);
    }
}

/// Ascent direction `(-H + μI)^{-1} g`, raising `μ` until the shifted
/// matrix is positive definite.
fn modified_newton_direction(h: &DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    let k = h.nrows();
    let neg = -h;
    let scale = neg.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    let mut mu = 0.0;
    loop {
        let shifted = &neg + DMatrix::<f64>::identity(k, k) * mu;
        if let Some(ch) = shifted.cholesky() {
            return ch.solve(g);
        }
        mu = if mu == 0.0 { 1e-8 * scale } else { mu * 10.0 };
        if !mu.is_finite() {
            return g.clone();
        }
    }
}

/// Solve from a given interior start, confined to the start's region.
pub fn solve_from(
    model: &SquaredLinearModel,
    s: &[f64],
    region: &SignVector,
    x0: &[f64],
    opts: &SolveOptions,
) -> Result<CriticalPoint> {
    let s = prepare_data(model, s)?;
    let l0 = model.forms(x0);
    if let Some(index) = l0.iter().position(|v| *v == 0.0) {
        return Err(Error::OnHyperplane { index });
    }
    if !region.matches(&l0) {
        return Err(Error::InvalidInput(format!("start point is not in region {region}")));
    }
    let mut frame = Frame::new(model, Frame::choose_basis(model, &l0));
    let mut z = frame.coords(&l0);
    let pattern = signs_of(&frame.c.mul_vec(&z));
    let d = model.d();
    let mut trace = Vec::new();
    for iter in 0..=opts.max_iter {
        let parts = likelihood_parts(&frame.c, &s, &z, true)?;
        let grad_norm = frame.grad_norm(&z, &parts.grad);
        trace.push(grad_norm);
        if grad_norm <= opts.tol {
            return Ok(finish(&frame, &s, region, &z, grad_norm, iter));
        }
        if iter == opts.max_iter {
            break;
        }
        let fixed = (0..d).max_by(|&i, &j| z[i].abs().total_cmp(&z[j].abs())).unwrap_or(0);
        let free: Vec<usize> = (0..d).filter(|&k| k != fixed).collect();
        let hess = parts.hess.expect("requested");
        let h = DMatrix::from_fn(free.len(), free.len(), |i, j| hess[(free[i], free[j])]);
        let g = DVector::from_iterator(free.len(), free.iter().map(|&k| parts.grad[k]));
        let dir = modified_newton_direction(&h, &g);
        let slope = g.dot(&dir);
        let slack = 16.0 * f64::EPSILON * (parts.value.abs() + 1.0);
        let mut t = 1.0;
        let mut accepted = None;
        while t >= MIN_STEP {
            let mut trial = z.clone();
            for (k, &f) in free.iter().enumerate() {
                trial[f] += t * dir[k];
            }
            if signs_of(&frame.c.mul_vec(&trial)) == pattern {
                if let Ok(p) = likelihood_parts(&frame.c, &s, &trial, false) {
                    if p.value >= parts.value + ARMIJO * t * slope - slack {
                        accepted = Some(trial);
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some(next) if next != z => z = next,
            _ => break,
        }
        // keep the smallest forms as coordinates so they retain relative precision
        let l = frame.c.mul_vec(&z);
        let basis = Frame::choose_basis(model, &l);
        if basis != frame.basis {
            frame = Frame::new(model, basis);
            z = frame.coords(&l);
        } else {
            scale_max_abs(&mut z);
        }
    }
    let iterations = trace.len().saturating_sub(1);
    let grad_norm = trace.last().copied().unwrap_or(f64::INFINITY);
    Err(Error::NoConvergence { iterations, grad_norm, trace })
}

fn finish(
    frame: &Frame,
    s: &[f64],
    region: &SignVector,
    z: &[f64],
    grad_norm: f64,
    iterations: usize,
) -> CriticalPoint {
    let x = frame.ab_inv.mul_vec(z);
    let y = frame.c.mul_vec(z);
    // unit norm, oriented so that ℓ_1 > 0 like the canonical sign vector
    let scale = dot(&x, &x).sqrt().copysign(y[0]);
    let x: Vec<f64> = x.iter().map(|v| v / scale).collect();
    let y: Vec<f64> = y.iter().map(|v| v / scale).collect();
    let q: f64 = y.iter().map(|v| v * v).sum();
    let p: Vec<f64> = y.iter().map(|v| v * v / q).collect();
    let log_l = s.iter().zip(&p).map(|(si, pi)| si * pi.ln()).sum();
    debug_assert!(region.matches(&y));
    CriticalPoint {
        region: region.clone(),
        x,
        y,
        p,
        log_l,
        grad_norm,
        iterations,
    }
}

/// Solve in `region`, starting from its witness.
pub fn solve_region(
    model: &SquaredLinearModel,
    s: &[f64],
    region: &Region,
    opts: &SolveOptions,
) -> Result<CriticalPoint> {
    solve_from(model, s, &region.sign, &region.witness_f64(), opts)
}
