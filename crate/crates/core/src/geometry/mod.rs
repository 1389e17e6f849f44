//! Log-normal polytopes and the chamber arrangement.
//!
//! For a model point `y = Ax` with no zero coordinate, the data `s` for
//! which `y` is critical form the polytope `Π(y)`: probability vectors `s`
//! with `s ∘ y^{-2}` in the row span of `B̃ = [1; B·Y^{-1}]`. Its face
//! lattice is dual to that of `Q = conv(columns of B·Y^{-1})`, and its
//! combinatorial type only changes across the chamber arrangement.

mod chamber;
mod polytope;
mod voronoi;

use itertools::Itertools;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::model::SquaredLinearModel;
use crate::scalar::{format_rational, Scalar};
use crate::Rational;

pub use chamber::{
    chamber_arrangement, combinatorial_type_scan, signature_at, ChamberArrangement, ChamberHyperplane, RegionTypes,
    TypeScan,
};
pub use polytope::{convex_hull, Halfspace, Polytope, Signature};
pub use voronoi::{log_voronoi_scan, Crossing, VoronoiSample, VoronoiScan};

/// Validate `y` against the model and return `B·Y^{-1}` as a `(n-d) × n` matrix.
fn scaled_kernel_matrix<T: Scalar>(model: &SquaredLinearModel, y: &[T]) -> Result<Matrix<T>> {
    let n = model.n();
    if y.len() != n {
        return Err(Error::InvalidInput(format!("point has length {}, model has {n} states", y.len())));
    }
    if let Some(i) = y.iter().position(|v| v.is_zero()) {
        return Err(Error::ZeroCoordinate(i));
    }
    let b = model.kernel_complement().matrix_as::<T>();
    for r in 0..b.nrows() {
        let row = b.row(r);
        let residual = dot(row, y);
        let size = row
            .iter()
            .zip(y)
            .fold(T::zero(), |acc, (u, v)| acc + (u.clone() * v.clone()).abs());
        if !(residual / size).is_negligible() {
            return Err(Error::NotInKernel);
        }
    }
    Ok(Matrix::from_fn(b.nrows(), n, |r, j| b[(r, j)].clone() / y[j].clone()))
}

fn approx_eq<T: Scalar>(u: &[T], v: &[T]) -> bool {
    u.iter().zip(v).all(|(a, b)| (a.clone() - b.clone()).is_negligible())
}

/// The log-normal polytope `Π(y)` in the probability simplex.
///
/// Vertices come from the extreme rays of `{z : zᵀB̃ ≥ 0}`, each mapped to
/// `s = (zᵀB̃) ∘ y²` and scaled to unit sum. Facets are the coordinate
/// inequalities `s_i ≥ 0` that support a ridge; `equations` cut out the
/// affine hull.
pub fn lognormal_polytope<T: Scalar>(model: &SquaredLinearModel, y: &[T]) -> Result<Polytope<T>> {
    let n = model.n();
    let k = n - model.d();
    let by = scaled_kernel_matrix(model, y)?;
    let mut rows = vec![vec![T::one(); n]];
    rows.extend(by.to_rows());
    let bt = Matrix::from_rows(rows);
    let cols: Vec<Vec<T>> = (0..n).map(|j| bt.column(j)).collect();
    let y2: Vec<T> = y.iter().map(|v| v.clone() * v.clone()).collect();

    let mut vertices: Vec<Vec<T>> = Vec::new();
    for subset in (0..n).combinations(k) {
        let tight = Matrix::from_rows(subset.iter().map(|&j| cols[j].clone()).collect());
        let ns = tight.nullspace();
        if ns.len() != 1 {
            continue;
        }
        let mut vals: Vec<T> = cols.iter().map(|c| dot(&ns[0], c)).collect();
        let m = vals.iter().fold(T::zero(), |a, v| if v.abs() > a { v.abs() } else { a });
        vals.iter_mut().for_each(|v| {
            *v = v.clone() / m.clone();
            if v.is_negligible() {
                *v = T::zero();
            }
        });
        let flip = if vals.iter().all(|v| *v >= T::zero()) {
            false
        } else if vals.iter().all(|v| *v <= T::zero()) {
            true
        } else {
            continue;
        };
        let mut s: Vec<T> = vals
            .into_iter()
            .zip(&y2)
            .map(|(v, w)| if flip { -v * w.clone() } else { v * w.clone() })
            .collect();
        let total = s.iter().fold(T::zero(), |a, v| a + v.clone());
        s.iter_mut().for_each(|v| *v = v.clone() / total.clone());
        if !vertices.iter().any(|u| approx_eq(u, &s)) {
            vertices.push(s);
        }
    }

    let candidates = (0..n)
        .map(|i| Halfspace {
            normal: (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect(),
            offset: T::zero(),
        })
        .collect();
    let mut equations = vec![Halfspace { normal: vec![T::one(); n], offset: T::one() }];
    for u in bt.nullspace() {
        let normal = u.iter().zip(&y2).map(|(a, w)| a.clone() / w.clone()).collect();
        equations.push(Halfspace { normal, offset: T::zero() });
    }
    Ok(Polytope::assemble(n, vertices, candidates, equations))
}

/// `Q`, the convex hull of the columns of `B·Y^{-1}` in `R^{n-d}`.
pub fn dual_polytope<T: Scalar>(model: &SquaredLinearModel, y: &[T]) -> Result<Polytope<T>> {
    let by = scaled_kernel_matrix(model, y)?;
    let points: Vec<Vec<T>> = (0..model.n()).map(|j| by.column(j)).collect();
    Ok(convex_hull(&points))
}

/// A coordinate swap followed by a sign change that maps `y` into another
/// region while staying in the model.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SwapCandidate {
    pub i: usize,
    pub j: usize,
    pub sigma: Vec<i8>,
    #[serde(serialize_with = "crate::json::ser_rationals")]
    pub image: Vec<Rational>,
}

/// All `(i, j, σ)` with `B·(σ ∘ swap_ij(y)) = 0` whose image has a different
/// sign vector from `y`. `σ_1 = +1` fixes the projective sign.
pub fn swap_candidates(model: &SquaredLinearModel, y: &[Rational]) -> Result<Vec<SwapCandidate>> {
    scaled_kernel_matrix(model, y)?;
    let n = model.n();
    let b = model.kernel_complement();
    let own = crate::arrangement::SignVector::from_values(y).expect("no zero coordinate");
    let mut out = Vec::new();
    for (i, j) in (0..n).tuple_combinations() {
        let mut swapped = y.to_vec();
        swapped.swap(i, j);
        for mask in 0u64..(1 << (n - 1)) {
            let sigma: Vec<i8> = (0..n)
                .map(|t| if t > 0 && mask >> (t - 1) & 1 == 1 { -1 } else { 1 })
                .collect();
            let image: Vec<Rational> = swapped
                .iter()
                .zip(&sigma)
                .map(|(v, &g)| if g < 0 { -v.clone() } else { v.clone() })
                .collect();
            if !b.contains(&image) {
                continue;
            }
            let sign = crate::arrangement::SignVector::from_values(&image).expect("no zero coordinate");
            if sign != own {
                out.push(SwapCandidate { i, j, sigma, image });
            }
        }
    }
    Ok(out)
}

impl Polytope<Rational> {
    pub fn to_json(&self) -> Value {
        let q = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>();
        let half = |h: &Halfspace<Rational>| json!({"normal": q(&h.normal), "offset": format_rational(&h.offset)});
        json!({
            "ambient_dim": self.ambient_dim,
            "dim": self.dim,
            "vertices": self.vertices.iter().map(|v| q(v)).collect::<Vec<_>>(),
            "facets": self.facets.iter().map(half).collect::<Vec<_>>(),
            "equations": self.equations.iter().map(half).collect::<Vec<_>>(),
            "facet_vertices": self.facet_vertices,
            "f_vector": self.f_vector,
        })
    }
}

impl Polytope<f64> {
    pub fn to_json(&self) -> Value {
        let half = |h: &Halfspace<f64>| json!({"normal": h.normal, "offset": h.offset});
        json!({
            "ambient_dim": self.ambient_dim,
            "dim": self.dim,
            "vertices": self.vertices,
            "facets": self.facets.iter().map(half).collect::<Vec<_>>(),
            "equations": self.equations.iter().map(half).collect::<Vec<_>>(),
            "facet_vertices": self.facet_vertices,
            "f_vector": self.f_vector,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::scalar::{int, rat};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    fn uniform() -> SquaredLinearModel {
        SquaredLinearModel::new(catalog::nongeneric_uniform()).unwrap()
    }

    #[test]
    fn quadrilateral_vertices_are_exact() {
        let p = lognormal_polytope(&uniform(), &ints(&[3, 2, 1, -1])).unwrap();
        assert_eq!(p.dim, 2);
        assert_eq!(p.f_vector, vec![4, 4]);
        let mut expect = vec![
            vec![rat(3, 5), rat(2, 5), int(0), int(0)],
            vec![rat(9, 10), int(0), rat(1, 10), int(0)],
            vec![int(0), rat(4, 5), int(0), rat(1, 5)],
            vec![int(0), int(0), rat(2, 5), rat(3, 5)],
        ];
        let mut got = p.vertices.clone();
        got.sort();
        expect.sort();
        assert_eq!(got, expect);
        // s* = y² / Σ y² is inside
        let star = vec![rat(9, 15), rat(4, 15), rat(1, 15), rat(1, 15)];
        assert!(p.contains(&star));
        // the affine hull is cut out by 2s_1 − 3s_2 − 18s_3 + 12s_4 = 0
        for v in &p.vertices {
            assert_eq!(dot(&ints(&[2, -3, -18, 12]), v), int(0));
        }
    }

    #[test]
    fn dual_of_quadrilateral() {
        let q = dual_polytope(&uniform(), &ints(&[3, 2, 1, -1])).unwrap();
        assert_eq!((q.dim, q.vertices.len()), (2, 4));
        assert_eq!(q.f_vector, vec![4, 4]);
    }

    #[test]
    fn float_mode_matches_exact() {
        let y = [3.0, 2.0, 1.0, -1.0];
        let p = lognormal_polytope(&uniform(), &y).unwrap();
        assert_eq!(p.f_vector, vec![4, 4]);
        assert!(p.vertices.iter().any(|v| approx_eq(v, &[0.9, 0.0, 0.1, 0.0])));
    }

    #[test]
    fn circle_fiber_is_a_segment() {
        let m = SquaredLinearModel::new(catalog::circle()).unwrap();
        let y = m.arrangement().values(&ints(&[2, -5]));
        let p = lognormal_polytope(&m, &y).unwrap();
        assert_eq!((p.dim, p.vertices.len()), (1, 2));
        assert_eq!(dual_polytope(&m, &y).unwrap().f_vector, vec![2]);
    }

    #[test]
    fn invalid_points_are_rejected() {
        assert_eq!(lognormal_polytope(&uniform(), &ints(&[1, 1, 1, 0])).unwrap_err(), Error::ZeroCoordinate(3));
        assert_eq!(lognormal_polytope(&uniform(), &ints(&[1, 1, 1, 1])).unwrap_err(), Error::NotInKernel);
    }

    #[test]
    fn swaps_of_the_quadrilateral_point() {
        let c = swap_candidates(&uniform(), &ints(&[3, 2, 1, -1])).unwrap();
        let found: Vec<(usize, usize, Vec<i8>, Vec<Rational>)> =
            c.into_iter().map(|s| (s.i, s.j, s.sigma, s.image)).collect();
        assert!(found.contains(&(0, 2, vec![1, 1, 1, -1], ints(&[1, 2, 3, 1]))));
        assert!(found.contains(&(1, 3, vec![1, -1, -1, -1], ints(&[3, 1, -1, -2]))));
    }
}
