use itertools::Itertools;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{lognormal_polytope, Signature};
use crate::arrangement::{enumerate_regions, Arrangement, SignVector};
use crate::error::{Error, Result};
use crate::model::SquaredLinearModel;
use crate::scalar::{int, rat};
use crate::Rational;

/// The determinantal form of one `(n-d+1)`-subset `S = {j_0 < … < j_{n-d}}`:
/// `Σ_k (-1)^k det(B_{S∖j_k}) ℓ_{j_k}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChamberHyperplane {
    pub subset: Vec<usize>,
    #[serde(serialize_with = "crate::json::ser_rationals")]
    pub normal: Vec<Rational>,
}

#[derive(Clone, Debug)]
pub struct ChamberArrangement {
    /// One per subset, before deduplication.
    pub hyperplanes: Vec<ChamberHyperplane>,
    /// The original forms followed by the distinct new ones.
    pub arrangement: Arrangement,
    /// Row of `arrangement` for every original form and then every hyperplane.
    pub map: Vec<usize>,
}

impl ChamberArrangement {
    /// Total count `n + C(n, d-1)` before deduplication.
    pub fn raw_count(&self) -> usize {
        self.map.len()
    }

    /// Pairs `(later, earlier)` of raw indices that define the same hyperplane.
    pub fn duplicates(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, &r) in self.map.iter().enumerate() {
            if let Some(first) = self.map[..i].iter().position(|&q| q == r) {
                out.push((i, first));
            }
        }
        out
    }
}

pub fn chamber_arrangement(model: &SquaredLinearModel) -> Result<ChamberArrangement> {
    let (n, d) = (model.n(), model.d());
    let b = model.kernel_complement().matrix();
    let a = model.arrangement().matrix();
    let mut hyperplanes = Vec::new();
    for subset in (0..n).combinations(n - d + 1) {
        let mut normal = vec![Rational::zero(); d];
        for (k, &j) in subset.iter().enumerate() {
            let rest: Vec<usize> = subset.iter().copied().filter(|&t| t != j).collect();
            let mut minor = b.select_columns(&rest).determinant();
            if k % 2 == 1 {
                minor = -minor;
            }
            for (c, v) in normal.iter_mut().enumerate() {
                *v += minor.clone() * a[(j, c)].clone();
            }
        }
        if normal.iter().all(Zero::is_zero) {
            return Err(Error::DegenerateMinor { subset });
        }
        hyperplanes.push(ChamberHyperplane { subset, normal });
    }
    let mut rows = a.to_rows();
    rows.extend(hyperplanes.iter().map(|h| h.normal.clone()));
    let (arrangement, map) = Arrangement::from_rows(rows)?.dedup_parallel();
    Ok(ChamberArrangement { hyperplanes, arrangement, map })
}

/// Signature of `Π(Ax)` for an exact parameter point.
pub fn signature_at(model: &SquaredLinearModel, x: &[Rational]) -> Result<Signature> {
    let y = model.arrangement().values(x);
    Ok(lognormal_polytope(model, &y)?.signature())
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionTypes {
    pub sign: SignVector,
    #[serde(skip)]
    pub samples: Vec<Vec<Rational>>,
    pub signatures: Vec<Signature>,
}

impl RegionTypes {
    pub fn is_constant(&self) -> bool {
        self.signatures.windows(2).all(|w| w[0] == w[1])
    }
}

#[derive(Clone, Debug)]
pub struct TypeScan {
    pub chamber: ChamberArrangement,
    pub regions: Vec<RegionTypes>,
}

impl TypeScan {
    pub fn all_constant(&self) -> bool {
        self.regions.iter().all(RegionTypes::is_constant)
    }
}

/// Evaluate the signature of `Π(y)` at `samples` exact interior points of
/// every region of the chamber arrangement. Deterministic for a given seed.
pub fn combinatorial_type_scan(model: &SquaredLinearModel, samples: usize, seed: u64) -> Result<TypeScan> {
    let d = model.d();
    if !(2..=3).contains(&d) {
        return Err(Error::DimensionUnsupported { d });
    }
    let chamber = chamber_arrangement(model)?;
    let regions = enumerate_regions(&chamber.arrangement)?;
    let regions = regions
        .par_iter()
        .enumerate()
        .map(|(idx, region)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(idx as u64));
            let mut pts = vec![region.witness.clone()];
            while pts.len() < samples.max(1) {
                pts.push(perturb_within(&chamber.arrangement, &region.sign, &region.witness, &mut rng));
            }
            let signatures = pts.iter().map(|x| signature_at(model, x)).collect::<Result<Vec<_>>>()?;
            Ok(RegionTypes { sign: region.sign.clone(), samples: pts, signatures })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TypeScan { chamber, regions })
}

/// A random rational point near `w` with the same sign vector.
fn perturb_within(arr: &Arrangement, sign: &SignVector, w: &[Rational], rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let dir: Vec<Rational> = w.iter().map(|_| rat(rng.gen_range(-100..=100), 100)).collect();
    let mut scale = rat(1, 2);
    loop {
        let x: Vec<Rational> = w.iter().zip(&dir).map(|(a, b)| a.clone() + scale.clone() * b.clone()).collect();
        if arr.sign_vector(&x).as_ref() == Some(sign) {
            return x;
        }
        scale /= int(2);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn moment_line_has_twelve_points() {
        let m = SquaredLinearModel::new(catalog::moment_line(6)).unwrap();
        let ch = chamber_arrangement(&m).unwrap();
        assert_eq!(ch.raw_count(), 12);
        assert_eq!(ch.arrangement.n(), 12);
        assert!(ch.duplicates().is_empty());
        let h = ch.hyperplanes.iter().find(|h| h.subset == vec![0, 1, 2, 4, 5]).unwrap();
        // parallel to 3x_1 − 7x_2
        assert_eq!(h.normal[0].clone() * int(-7), h.normal[1].clone() * int(3));
    }

    #[test]
    fn steiner_has_ten_lines() {
        let m = SquaredLinearModel::new(catalog::steiner()).unwrap();
        let ch = chamber_arrangement(&m).unwrap();
        assert_eq!(ch.raw_count(), 10);
        let scan = combinatorial_type_scan(&m, 3, 7).unwrap();
        assert!(scan.all_constant());
        assert!(scan.regions.iter().all(|r| r.samples.len() == 3));
    }

    #[test]
    fn types_change_across_seven_to_three() {
        let m = SquaredLinearModel::new(catalog::moment_line(6)).unwrap();
        let left = signature_at(&m, &[int(69), int(30)]).unwrap();
        let right = signature_at(&m, &[int(71), int(30)]).unwrap();
        assert_ne!(left, right);
        let counts = [left.f_vector[0], right.f_vector[0]];
        assert!(counts.iter().all(|c| [5, 8, 9].contains(c)), "{counts:?}");
    }
}
