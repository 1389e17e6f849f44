//! Scalar abstraction shared by the exact and floating-point code paths.
//!
//! Everything combinatorial (ranks, kernels, region witnesses, polytope
//! vertices at rational points) runs over [`Rational`]; the likelihood
//! solver runs over `f64`. Linear algebra, the simplex method and the
//! polytope code are written once against [`Scalar`].

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

use crate::Rational;

pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// True when arithmetic is exact and zero tests need no tolerance.
    const EXACT: bool;

    fn from_rational(q: &Rational) -> Self;

    fn from_i64(v: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Absolute threshold below which a value is treated as zero.
    fn epsilon() -> Self;

    fn is_negligible(&self) -> bool {
        self.abs() <= Self::epsilon()
    }

    /// Exact sign as -1, 0, +1; region membership never uses a tolerance.
    fn sign(&self) -> i8 {
        if *self > Self::zero() {
            1
        } else if *self < Self::zero() {
            -1
        } else {
            0
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q)
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn epsilon() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q) as f32
    }

    fn from_i64(v: i64) -> Self {
        v as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn epsilon() -> Self {
        1e-5
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn epsilon() -> Self {
        BigRational::zero()
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
}

/// Correctly scaled conversion that survives numerators and denominators
/// beyond the `f64` range.
pub fn rational_to_f64(q: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let shift = q.numer().bits() as i64 - q.denom().bits() as i64;
    let scaled = if shift > 0 {
        q / BigRational::from_integer(BigInt::one() << (shift as usize))
    } else {
        q * BigRational::from_integer(BigInt::one() << ((-shift) as usize))
    };
    let n = scaled.numer().to_f64().unwrap_or(f64::NAN);
    let d = scaled.denom().to_f64().unwrap_or(f64::NAN);
    (n / d) * 2f64.powi(shift as i32)
}

/// Exact binary expansion of a finite double.
pub fn rational_from_f64(v: f64) -> Option<Rational> {
    BigRational::from_f64(v)
}

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parse `"p/q"`, `"p"` or a decimal literal such as `"-0.25"` exactly.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Some(BigRational::from_integer(n));
    }
    // decimal with optional exponent, parsed exactly
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{whole}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(digits);
    if scale >= 0 {
        q *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        q /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -q } else { q })
}

pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Scale a rational vector to a primitive integer vector (same direction).
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<BigInt> {
    use num_integer::Integer;
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|q| (q * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_and_decimal_forms() {
        assert_eq!(parse_rational("3/6"), Some(rat(1, 2)));
        assert_eq!(parse_rational("-7"), Some(int(-7)));
        assert_eq!(parse_rational("0.125"), Some(rat(1, 8)));
        assert_eq!(parse_rational("-2.5e-1"), Some(rat(-1, 4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }

    #[test]
    fn huge_rationals_convert_to_f64() {
        let big = BigRational::new(BigInt::one() << 2000usize, (BigInt::one() << 1999usize) * 3);
        assert!((rational_to_f64(&big) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn primitive_vector_clears_denominators() {
        let v = vec![rat(1, 1), rat(-1, 3), rat(-1, 3), rat(1, 3)];
        let p = primitive_integer_vector(&v);
        assert_eq!(p, vec![3.into(), (-1).into(), (-1).into(), 1.into()]);
    }

    #[test]
    fn sign_is_exact() {
        assert_eq!(1e-300f64.sign(), 1);
        assert_eq!(0.0f64.sign(), 0);
        assert!(1e-12f64.is_negligible());
        assert_eq!((-1e-3f64).sign(), -1);
        assert_eq!(rat(1, 1_000_000_000).sign(), 1);
    }
}
