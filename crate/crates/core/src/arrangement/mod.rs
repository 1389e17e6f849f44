//! Central hyperplane arrangements over the rationals.
//!
//! An [`Arrangement`] is an `n × d` matrix whose rows are the coefficient
//! vectors of linear forms `ℓ_i`. Everything in this module is exact.

mod matroid;
mod regions;

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::scalar::Scalar;
use crate::Rational;

pub use matroid::{
    characteristic_polynomial, flats, generic_ml_degree, ml_degree, snc_check, CharacteristicPolynomial,
    Flat, FlatVerdict, SncReport, CHARPOLY_BUDGET,
};
pub use regions::enumerate_regions;

#[derive(Clone, Debug, PartialEq)]
pub struct Arrangement {
    a: Matrix<Rational>,
    labels: Option<Vec<String>>,
}

impl Arrangement {
    pub fn new(a: Matrix<Rational>) -> Result<Self> {
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(Error::InvalidInput("arrangement needs at least one row and one column".into()));
        }
        if let Some(i) = (0..a.nrows()).find(|&i| a.row(i).iter().all(Zero::is_zero)) {
            return Err(Error::ZeroRow(i));
        }
        Ok(Arrangement { a, labels: None })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != c) {
            return Err(Error::InvalidInput("rows have different lengths".into()));
        }
        Self::new(Matrix::from_rows(rows))
    }

    pub fn from_integer_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rational::from_i64(v)).collect())
                .collect(),
        )
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::InvalidInput(format!(
                "{} labels for {} hyperplanes",
                labels.len(),
                self.n()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Number of hyperplanes (model states).
    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// Ambient dimension (model parameters).
    pub fn d(&self) -> usize {
        self.a.ncols()
    }

    pub fn matrix(&self) -> &Matrix<Rational> {
        &self.a
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        self.a.row(i)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => format!("{}", i + 1),
        }
    }

    pub fn rank(&self) -> usize {
        self.a.rank()
    }

    pub fn require_essential(&self) -> Result<()> {
        let rank = self.rank();
        if rank < self.d() {
            return Err(Error::RankDeficient { rank, expected: self.d() });
        }
        Ok(())
    }

    /// The coefficient matrix converted to another scalar type.
    pub fn matrix_as<T: Scalar>(&self) -> Matrix<T> {
        self.a.map(T::from_rational)
    }

    /// `Ax`, the values of all forms at an exact point.
    pub fn values(&self, x: &[Rational]) -> Vec<Rational> {
        self.a.mul_vec(x)
    }

    pub fn first_parallel_pair(&self) -> Option<(usize, usize)> {
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                if are_parallel(self.row(i), self.row(j)) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn require_no_parallel(&self) -> Result<()> {
        match self.first_parallel_pair() {
            Some((i, j)) => Err(Error::ParallelRows(i, j)),
            None => Ok(()),
        }
    }

    /// Drop rows parallel to an earlier row. Returns the reduced arrangement
    /// and, for every original row, the index it maps to.
    pub fn dedup_parallel(&self) -> (Arrangement, Vec<usize>) {
        let mut kept: Vec<usize> = Vec::new();
        let mut map = Vec::with_capacity(self.n());
        for i in 0..self.n() {
            match kept.iter().position(|&k| are_parallel(self.row(k), self.row(i))) {
                Some(pos) => map.push(pos),
                None => {
                    map.push(kept.len());
                    kept.push(i);
                }
            }
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| kept.iter().map(|&k| l[k].clone()).collect());
        let arr = Arrangement {
            a: self.a.select_rows(&kept),
            labels,
        };
        (arr, map)
    }

    pub fn sign_vector(&self, x: &[Rational]) -> Option<SignVector> {
        SignVector::from_values(&self.values(x))
    }

    pub fn kernel_complement(&self) -> Result<KernelComplement> {
        kernel_complement(self)
    }
}

pub(crate) fn are_parallel(u: &[Rational], v: &[Rational]) -> bool {
    Matrix::from_rows(vec![u.to_vec(), v.to_vec()]).rank() < 2
}

/// Rows span the linear relations among the forms: `B·A = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelComplement {
    b: Matrix<Rational>,
}

impl KernelComplement {
    pub fn matrix(&self) -> &Matrix<Rational> {
        &self.b
    }

    pub fn matrix_as<T: Scalar>(&self) -> Matrix<T> {
        self.b.map(T::from_rational)
    }

    /// Column `j`, the vector `b_j`.
    pub fn column(&self, j: usize) -> Vec<Rational> {
        self.b.column(j)
    }

    pub fn contains(&self, y: &[Rational]) -> bool {
        self.b.mul_vec(y).iter().all(Zero::is_zero)
    }
}

/// `B` from the reduced row echelon form of `Aᵀ`: one row per free column.
pub fn kernel_complement(arr: &Arrangement) -> Result<KernelComplement> {
    arr.require_essential()?;
    let rows = arr.matrix().left_nullspace();
    let b = if rows.is_empty() {
        Matrix::zeros(0, arr.n())
    } else {
        Matrix::from_rows(rows)
    };
    Ok(KernelComplement { b })
}

/// Sign pattern of a region, canonicalized so the first entry is `+`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    /// Canonical sign vector of a point off every hyperplane.
    pub fn from_values<T: Scalar>(values: &[T]) -> Option<Self> {
        let raw: Vec<i8> = values.iter().map(Scalar::sign).collect();
        Self::from_signs(raw)
    }

    pub fn from_signs(raw: Vec<i8>) -> Option<Self> {
        if raw.is_empty() || raw.iter().any(|&s| s != 1 && s != -1) {
            return None;
        }
        let flip = raw[0] < 0;
        Some(SignVector(raw.into_iter().map(|s| if flip { -s } else { s }).collect()))
    }

    /// Raw signs without canonicalization; used while building regions.
    pub(crate) fn from_raw(raw: Vec<i8>) -> Self {
        SignVector(raw)
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when `values` has exactly this sign pattern or its negation.
    pub fn matches<T: Scalar>(&self, values: &[T]) -> bool {
        SignVector::from_values(values).as_ref() == Some(self)
    }

    pub fn parse(s: &str) -> Option<Self> {
        let raw = s
            .chars()
            .map(|c| match c {
                '+' => Some(1),
                '-' => Some(-1),
                _ => None,
            })
            .collect::<Option<Vec<i8>>>()?;
        Self::from_signs(raw)
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl Ord for SignVector {
    // '+' sorts before '-', as in the string form
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.cmp(&self.0)
    }
}

impl PartialOrd for SignVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for SignVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SignVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        SignVector::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("bad sign vector {s:?}")))
    }
}

/// A region of the projective complement with a strictly interior witness.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub sign: SignVector,
    /// Exact interior point, scaled so the largest coordinate magnitude is one.
    pub witness: Vec<Rational>,
}

impl Region {
    pub fn witness_f64(&self) -> Vec<f64> {
        self.witness.iter().map(Scalar::to_f64).collect()
    }

    /// Strict exact check that the witness realizes the sign vector.
    pub fn verify(&self, arr: &Arrangement) -> bool {
        let vals = arr.values(&self.witness);
        let s = self.sign.signs();
        // canonical sign may be the negation of the witness' raw pattern
        let direct = vals
            .iter()
            .zip(s)
            .all(|(v, &si)| if si > 0 { v.is_positive() } else { v.is_negative() });
        let flipped = vals
            .iter()
            .zip(s)
            .all(|(v, &si)| if si > 0 { v.is_negative() } else { v.is_positive() });
        direct || flipped
    }
}

pub(crate) fn normalize_max_abs(x: &mut [Rational]) {
    let m = x
        .iter()
        .map(|v| v.abs())
        .fold(Rational::zero(), |a, b| if b > a { b } else { a });
    if !m.is_zero() {
        for v in x.iter_mut() {
            *v = v.clone() / m.clone();
        }
    }
}

pub(crate) fn form_value(row: &[Rational], x: &[Rational]) -> Rational {
    dot(row, x)
}
