use std::collections::BTreeMap;

use itertools::Itertools;
use num_traits::Zero;

use super::SquaredLinearModel;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{int, Scalar};
use crate::{FMatrix, QMatrix, Rational};

/// Quadric monomials `x_k x_l`, `k ≤ l`, in lexicographic order.
pub fn quadric_monomials(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|k| (k..d).map(move |l| (k, l))).collect()
}

fn monomial_index(d: usize, k: usize, l: usize) -> usize {
    let (k, l) = if k <= l { (k, l) } else { (l, k) };
    // rows before k contribute d, d-1, ..., d-k+1 monomials
    k * d - k * k.saturating_sub(1) / 2 + (l - k)
}

/// Homogeneous quadratic polynomial in `p` with exact coefficients on `p_a p_b`, `a ≤ b`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QuadraticForm {
    pub terms: BTreeMap<(usize, usize), Rational>,
}

impl QuadraticForm {
    fn add(&mut self, a: usize, b: usize, c: Rational) {
        let key = if a <= b { (a, b) } else { (b, a) };
        let entry = self.terms.entry(key).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval<T: Scalar>(&self, p: &[T]) -> T {
        self.terms.iter().fold(T::zero(), |acc, ((a, b), c)| {
            acc + T::from_rational(c) * p[*a].clone() * p[*b].clone()
        })
    }

    pub fn coefficient_norm(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().powi(2)).sum::<f64>().sqrt()
    }
}

/// Implicit generators of the model from the Veronese factorization
/// `p = L · (x_k x_l)`: linear forms in the left kernel of `L`, and the
/// rank-one symmetric matrix `R` whose entries are `L'^{-1} p_{1..N}`.
#[derive(Clone, Debug)]
pub struct VeroneseGenerators {
    pub d: usize,
    /// `n × N`, row `i` holds the coefficients of `ℓ_i²`.
    pub l: QMatrix,
    /// First `N` rows of `L`.
    pub l_prime: QMatrix,
    /// Row `m` expresses the monomial `m` as a linear form in `p_1, …, p_N`.
    pub r_coeffs: QMatrix,
    /// Basis of the left kernel of `L`, as coefficient vectors in `p`.
    pub linear_forms: Vec<Vec<Rational>>,
}

impl VeroneseGenerators {
    /// Coefficients of `R_{kl}` in `p_1, …, p_N`.
    pub fn r_entry(&self, k: usize, l: usize) -> &[Rational] {
        self.r_coeffs.row(monomial_index(self.d, k, l))
    }

    pub fn r_matrix(&self, p: &[f64]) -> FMatrix {
        let r = self.r_coeffs.to_f64();
        let n_q = r.nrows();
        Matrix::from_fn(self.d, self.d, |k, l| {
            let row = r.row(monomial_index(self.d, k, l));
            (0..n_q).map(|j| row[j] * p[j]).sum()
        })
    }

    /// All `2 × 2` minors of `R`, expanded exactly in `p`.
    pub fn minors(&self) -> Vec<QuadraticForm> {
        symmetric_minors(&self.r_coeffs, self.d)
    }

    /// Largest scale-free residual of all generators at `p`: `p` is scaled to
    /// unit sum and every coefficient vector to unit norm.
    pub fn max_residual(&self, p: &[f64]) -> f64 {
        let total: f64 = p.iter().sum();
        let p: Vec<f64> = p.iter().map(|v| v / total).collect();
        let linear = self.linear_forms.iter().map(|f| {
            let c: Vec<f64> = f.iter().map(Scalar::to_f64).collect();
            let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            c.iter().zip(&p).map(|(a, b)| a * b).sum::<f64>().abs() / norm
        });
        let quadratic = self
            .minors()
            .into_iter()
            .filter(|m| !m.is_zero())
            .map(|m| m.eval(&p).abs() / m.coefficient_norm());
        linear.chain(quadratic).fold(0.0, f64::max)
    }
}

fn symmetric_minors(r_coeffs: &QMatrix, d: usize) -> Vec<QuadraticForm> {
    let entry = |k: usize, l: usize| r_coeffs.row(monomial_index(d, k, l));
    let mut out = Vec::new();
    for (i, j) in (0..d).tuple_combinations() {
        for (k, l) in (0..d).tuple_combinations() {
            let mut form = QuadraticForm::default();
            for (sign, (u, v)) in [(1, (entry(i, k), entry(j, l))), (-1, (entry(i, l), entry(j, k)))] {
                for (a, ca) in u.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                    for (b, cb) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                        form.add(a, b, int(sign) * ca * cb);
                    }
                }
            }
            out.push(form);
        }
    }
    out
}

pub fn veronese_generators(model: &SquaredLinearModel) -> Result<VeroneseGenerators> {
    let (n, d) = (model.n(), model.d());
    let monos = quadric_monomials(d);
    let big_n = monos.len();
    if n < big_n {
        return Err(Error::InvalidInput(format!("need n >= {big_n} forms for d = {d}, got {n}")));
    }
    let a = model.arrangement().matrix();
    let l = Matrix::from_fn(n, big_n, |i, m| {
        let (k, j) = monos[m];
        let v = a[(i, k)].clone() * a[(i, j)].clone();
        if k == j {
            v
        } else {
            v * int(2)
        }
    });
    let l_prime = l.select_rows(&(0..big_n).collect::<Vec<_>>());
    let Some(r_coeffs) = l_prime.inverse() else {
        return Err(repair_hint(&l, big_n));
    };
    let linear_forms = l.left_nullspace();
    Ok(VeroneseGenerators { d, l, l_prime, r_coeffs, linear_forms })
}

fn repair_hint(l: &QMatrix, big_n: usize) -> Error {
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..l.nrows() {
        let mut trial = chosen.clone();
        trial.push(i);
        if l.select_rows(&trial).rank() == trial.len() {
            chosen = trial;
        }
        if chosen.len() == big_n {
            return Error::DegenerateLeadingBlock { repair: chosen };
        }
    }
    Error::InvalidInput(format!("squares of the forms span only {} of {big_n} quadrics", chosen.len()))
}

/// Rank of the span of all `2 × 2` minors of a generic symmetric `d × d` matrix.
pub fn minor_space_dimension(d: usize) -> usize {
    assert!(d >= 2);
    let big_n = d * (d + 1) / 2;
    let minors = symmetric_minors(&Matrix::identity(big_n), d);
    let columns: Vec<(usize, usize)> = (0..big_n).flat_map(|a| (a..big_n).map(move |b| (a, b))).collect();
    let m = Matrix::from_fn(minors.len(), columns.len(), |r, c| {
        minors[r].terms.get(&columns[c]).cloned().unwrap_or_else(Rational::zero)
    });
    m.rank()
}

/// The quartic that cuts out the Steiner surface in `P^3`.
pub fn steiner_quartic<T: Scalar>(p: &[T]) -> T {
    assert_eq!(p.len(), 4);
    let c = |v: i64| T::from_i64(v);
    let mut acc = T::zero();
    for i in 0..4 {
        let pi2 = p[i].clone() * p[i].clone();
        acc = acc + pi2.clone() * pi2.clone();
        for j in 0..4 {
            if j == i {
                continue;
            }
            if j > i {
                acc = acc + c(6) * pi2.clone() * p[j].clone() * p[j].clone();
            }
            acc = acc - c(4) * pi2.clone() * p[i].clone() * p[j].clone();
        }
        for (j, k) in (0..4).filter(|&j| j != i).tuple_combinations() {
            acc = acc + c(4) * pi2.clone() * p[j].clone() * p[k].clone();
        }
    }
    acc - c(40) * p[0].clone() * p[1].clone() * p[2].clone() * p[3].clone()
}
