//! Phase-one simplex for systems `G x ≥ h` with free `x`.
//!
//! Bland's rule throughout, so the method terminates on degenerate input.
//! Over [`Rational`](crate::Rational) the answer is exact.


use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// A point with `G x ≥ h`, or `None` when the system is infeasible.
pub fn feasible_point<T: Scalar>(g: &Matrix<T>, h: &[T]) -> Option<Vec<T>> {
    let m = g.nrows();
    let d = g.ncols();
    assert_eq!(h.len(), m);
    if m == 0 {
        return Some(vec![T::zero(); d]);
    }
    // columns: x+ (d) | x- (d) | surplus (m) | artificial (m) | rhs
    let ncols = 2 * d + 2 * m;
    let rhs = ncols;
    let mut tab = Matrix::<T>::zeros(m + 1, ncols + 1);
    for i in 0..m {
        let flip = h[i] < T::zero();
        let sgn = |v: T| if flip { -v } else { v };
        for j in 0..d {
            tab[(i, j)] = sgn(g[(i, j)].clone());
            tab[(i, d + j)] = sgn(-g[(i, j)].clone());
        }
        tab[(i, 2 * d + i)] = sgn(-T::one());
        tab[(i, 2 * d + m + i)] = T::one();
        tab[(i, rhs)] = sgn(h[i].clone());
    }
    // reduced costs of the phase-one objective (sum of artificials)
    for j in 0..2 * d + m {
        let mut acc = T::zero();
        for i in 0..m {
            acc = acc - tab[(i, j)].clone();
        }
        tab[(m, j)] = acc;
    }
    let mut obj = T::zero();
    for i in 0..m {
        obj = obj - tab[(i, rhs)].clone();
    }
    tab[(m, rhs)] = obj;

    let mut basis: Vec<usize> = (0..m).map(|i| 2 * d + m + i).collect();
    loop {
        let entering = (0..ncols).find(|&j| {
            let c = &tab[(m, j)];
            *c < T::zero() && !c.is_negligible()
        });
        let Some(e) = entering else { break };
        let mut leave: Option<usize> = None;
        for i in 0..m {
            let a = &tab[(i, e)];
            if *a <= T::zero() || a.is_negligible() {
                continue;
            }
            let ratio = tab[(i, rhs)].clone() / a.clone();
            leave = match leave {
                None => Some(i),
                Some(l) => {
                    let best = tab[(l, rhs)].clone() / tab[(l, e)].clone();
                    if ratio < best || (ratio == best && basis[i] < basis[l]) {
                        Some(i)
                    } else {
                        Some(l)
                    }
                }
            };
        }
        // the phase-one objective is bounded below, so a pivot row exists
        let l = leave?;
        pivot(&mut tab, l, e);
        basis[l] = e;
    }
    if !tab[(m, rhs)].is_negligible() {
        return None;
    }
    let mut x = vec![T::zero(); d];
    for (i, &b) in basis.iter().enumerate() {
        if b < d {
            x[b] = x[b].clone() + tab[(i, rhs)].clone();
        } else if b < 2 * d {
            x[b - d] = x[b - d].clone() - tab[(i, rhs)].clone();
        }
    }
    Some(x)
}

fn pivot<T: Scalar>(tab: &mut Matrix<T>, r: usize, c: usize) {
    let cols = tab.ncols();
    let p = tab[(r, c)].clone();
    for j in 0..cols {
        tab[(r, j)] = tab[(r, j)].clone() / p.clone();
    }
    for i in 0..tab.nrows() {
        if i == r {
            continue;
        }
        let f = tab[(i, c)].clone();
        if f.is_zero() {
            continue;
        }
        for j in 0..cols {
            let v = tab[(r, j)].clone() * f.clone();
            tab[(i, j)] = tab[(i, j)].clone() - v;
        }
    }
}

/// A point in the open cone `{x : σ_i g_i·x > 0}` (rows already signed),
/// found as a solution of `G x ≥ 1`.
pub fn open_cone_point<T: Scalar>(g: &Matrix<T>) -> Option<Vec<T>> {
    let ones = vec![T::one(); g.nrows()];
    feasible_point(g, &ones)
}
