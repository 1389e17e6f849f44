use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::Arrangement;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::Rational;

/// Largest `n` for which the `2^n` subset expansion is attempted.
pub const CHARPOLY_BUDGET: usize = 24;

/// Integer coefficients, highest degree first. Always monic of degree `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacteristicPolynomial {
    pub coeffs: Vec<i64>,
}

impl CharacteristicPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, t: i64) -> i64 {
        self.coeffs.iter().fold(0i64, |acc, &c| acc * t + c)
    }

    /// Product `∏ (t - r)` for the given integer roots.
    pub fn from_roots(roots: &[i64]) -> Self {
        let mut coeffs = vec![1i64];
        for &r in roots {
            let mut next = vec![0i64; coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k] += c;
                next[k + 1] -= r * c;
            }
            coeffs = next;
        }
        CharacteristicPolynomial { coeffs }
    }
}

/// Whitney's subset expansion `χ(t) = Σ_S (-1)^{|S|} t^{d - rank S}`.
///
/// Subsets are walked depth-first while an integer echelon basis of the
/// chosen rows is kept on a stack, so each step costs one fraction-free
/// row reduction.
pub fn characteristic_polynomial(arr: &Arrangement) -> Result<CharacteristicPolynomial> {
    let n = arr.n();
    if n > CHARPOLY_BUDGET {
        return Err(Error::BudgetExceeded { n, limit: CHARPOLY_BUDGET });
    }
    let rows: Vec<Vec<BigInt>> = (0..n).map(|i| integer_row(arr.row(i))).collect();
    let mut by_rank = vec![0i64; arr.d() + 1];
    let mut basis: Vec<(usize, Vec<BigInt>)> = Vec::new();
    whitney_walk(&rows, 0, 0, &mut basis, &mut by_rank);
    Ok(CharacteristicPolynomial { coeffs: by_rank })
}

fn whitney_walk(
    rows: &[Vec<BigInt>],
    next: usize,
    size: usize,
    basis: &mut Vec<(usize, Vec<BigInt>)>,
    by_rank: &mut [i64],
) {
    if next == rows.len() {
        by_rank[basis.len()] += if size.is_multiple_of(2) { 1 } else { -1 };
        return;
    }
    whitney_walk(rows, next + 1, size, basis, by_rank);
    match reduce_against(basis, rows[next].clone()) {
        Some(reduced) => {
            basis.push(reduced);
            whitney_walk(rows, next + 1, size + 1, basis, by_rank);
            basis.pop();
        }
        None => whitney_walk(rows, next + 1, size + 1, basis, by_rank),
    }
}

/// Eliminate `v` against an echelon basis; `None` if it lies in the span.
fn reduce_against(basis: &[(usize, Vec<BigInt>)], mut v: Vec<BigInt>) -> Option<(usize, Vec<BigInt>)> {
    for (p, b) in basis {
        if v[*p].is_zero() {
            continue;
        }
        let (vp, bp) = (v[*p].clone(), b[*p].clone());
        for (vi, bi) in v.iter_mut().zip(b) {
            *vi = &bp * &*vi - &vp * bi;
        }
        let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if !g.is_zero() && !g.is_one() {
            for vi in v.iter_mut() {
                *vi /= &g;
            }
        }
    }
    let p = v.iter().position(|x| !x.is_zero())?;
    Some((p, v))
}

fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    row.iter()
        .map(|q| (q * Rational::from_integer(lcm.clone())).to_integer())
        .collect()
}

/// Number of regions of the projective complement, `|χ(-1)| / 2`.
pub fn ml_degree(arr: &Arrangement) -> Result<u64> {
    arr.require_essential()?;
    let chi = characteristic_polynomial(arr)?;
    Ok(chi.eval(-1).unsigned_abs() / 2)
}

/// ML degree of a generic arrangement of `n` hyperplanes in `P^{d-1}`,
/// computed both as `Σ_{i<d} C(n-1, i)` and as the coefficient of `z^{d-1}`
/// in `1 / ((1-z)^{n-d} (1-2z))`.
pub fn generic_ml_degree(d: usize, n: usize) -> u64 {
    assert!(n > d && d > 1, "generic_ml_degree needs n > d > 1");
    let by_binomials: u64 = (0..d).map(|i| binomial(n - 1, i)).sum();
    // coefficient of z^k in (1-z)^{-m} is C(m-1+k, k); convolve with 2^j
    let m = n - d;
    let by_series: u64 = (0..d)
        .map(|k| binomial(m - 1 + k, k) * (1u64 << (d - 1 - k)))
        .sum();
    assert_eq!(by_binomials, by_series, "generating function disagrees with binomial sum");
    by_binomials
}

pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// A closed subset of hyperplanes with a basis of its intersection.
#[derive(Clone, Debug, PartialEq)]
pub struct Flat {
    pub elements: Vec<usize>,
    pub rank: usize,
    /// Basis of `⋂_{i ∈ elements} V(ℓ_i)` in `Q^d`.
    pub subspace: Vec<Vec<Rational>>,
}

/// All flats of rank at most `max_codim`, ordered by rank then elements.
pub fn flats(arr: &Arrangement, max_codim: usize) -> Result<Vec<Flat>> {
    arr.require_essential()?;
    let d = arr.d();
    let mut seen: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    seen.insert((0, Vec::new()));
    for rank in 1..=max_codim.min(d) {
        let mut next = BTreeSet::new();
        for f in &layer {
            for i in (0..arr.n()).filter(|i| !f.contains(i)) {
                let mut gen = f.clone();
                gen.push(i);
                next.insert(closure(arr, &gen));
            }
        }
        layer = next.into_iter().collect();
        for f in &layer {
            seen.insert((rank, f.clone()));
        }
    }
    Ok(seen
        .into_iter()
        .map(|(rank, elements)| {
            let subspace = if elements.is_empty() {
                Matrix::<Rational>::identity(d).to_rows()
            } else {
                arr.matrix().select_rows(&elements).nullspace()
            };
            Flat { elements, rank, subspace }
        })
        .collect())
}

fn closure(arr: &Arrangement, gen: &[usize]) -> Vec<usize> {
    let base = arr.matrix().select_rows(gen).rank();
    (0..arr.n())
        .filter(|&i| {
            if gen.contains(&i) {
                return true;
            }
            let mut idx = gen.to_vec();
            idx.push(i);
            arr.matrix().select_rows(&idx).rank() == base
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlatVerdict {
    pub flat: Flat,
    /// Determinant of the partition function restricted to the flat.
    pub determinant: Rational,
    pub transverse: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SncReport {
    pub verdicts: Vec<FlatVerdict>,
}

impl SncReport {
    pub fn all_transverse(&self) -> bool {
        self.verdicts.iter().all(|v| v.transverse)
    }
}

/// Restrict `q(x) = xᵀAᵀAx` to every flat of codimension `≤ d-1` and test
/// the restricted Gram matrix for nondegeneracy.
pub fn snc_check(arr: &Arrangement) -> Result<SncReport> {
    arr.require_essential()?;
    let a = arr.matrix();
    let gram = a.transpose().mul(a);
    let verdicts = flats(arr, arr.d() - 1)?
        .into_iter()
        .map(|flat| {
            let v = Matrix::from_rows(flat.subspace.clone()).transpose();
            let restricted = v.transpose().mul(&gram).mul(&v);
            let determinant = restricted.determinant();
            let transverse = !determinant.is_zero();
            FlatVerdict { flat, determinant, transverse }
        })
        .collect();
    Ok(SncReport { verdicts })
}
