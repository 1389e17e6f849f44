use num_traits::{Signed, Zero};

use super::{form_value, normalize_max_abs, Arrangement, Region, SignVector};
use crate::error::Result;
use crate::linalg::Matrix;
use crate::lp::open_cone_point;
use crate::Rational;

/// Regions of `P^{d-1} ∖ A` by incremental insertion of hyperplanes.
///
/// Each region is the cone `{σ_i ℓ_i > 0}` with `σ_1 = +`. When hyperplane
/// `h` is inserted, the current witness already certifies one side; only the
/// opposite side needs an exact feasibility LP.
pub fn enumerate_regions(arr: &Arrangement) -> Result<Vec<Region>> {
    arr.require_essential()?;
    arr.require_no_parallel()?;
    let n = arr.n();
    let first = open_cone_point(&signed_rows(arr, &[1])).expect("a single half-space is never empty");
    let mut cells: Vec<(Vec<i8>, Vec<Rational>)> = vec![(vec![1], first)];
    for h in 1..n {
        let mut next = Vec::with_capacity(cells.len() * 2);
        for (signs, witness) in cells {
            let v = form_value(arr.row(h), &witness);
            let kept = if v.is_zero() { None } else { Some(if v.is_positive() { 1i8 } else { -1 }) };
            for side in [1i8, -1] {
                let mut s = signs.clone();
                s.push(side);
                if kept == Some(side) {
                    next.push((s, witness.clone()));
                } else if let Some(w) = open_cone_point(&signed_rows(arr, &s)) {
                    next.push((s, w));
                }
            }
        }
        cells = next;
    }
    let mut regions: Vec<Region> = cells
        .into_iter()
        .map(|(s, mut w)| {
            normalize_max_abs(&mut w);
            Region { sign: SignVector::from_raw(s), witness: w }
        })
        .collect();
    regions.sort_by(|a, b| a.sign.cmp(&b.sign));
    Ok(regions)
}

fn signed_rows(arr: &Arrangement, signs: &[i8]) -> Matrix<Rational> {
    Matrix::from_rows(
        signs
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                arr.row(i)
                    .iter()
                    .map(|v| if s > 0 { v.clone() } else { -v.clone() })
                    .collect()
            })
            .collect(),
    )
}
