use std::collections::BTreeSet;

use itertools::Itertools;
use serde::Serialize;

use crate::linalg::{affine_rank, dot, Matrix};
use crate::scalar::Scalar;

/// Inequality `normal · v ≥ offset`, or an equation when used as such.
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace<T> {
    pub normal: Vec<T>,
    pub offset: T,
}

impl<T: Scalar> Halfspace<T> {
    pub fn slack(&self, v: &[T]) -> T {
        dot(&self.normal, v) - self.offset.clone()
    }
}

/// A polytope carried in both representations, with its vertex-facet
/// incidences and face counts.
#[derive(Clone, Debug)]
pub struct Polytope<T> {
    pub ambient_dim: usize,
    pub dim: usize,
    pub vertices: Vec<Vec<T>>,
    pub facets: Vec<Halfspace<T>>,
    /// Equations of the affine hull.
    pub equations: Vec<Halfspace<T>>,
    /// Vertex indices on each facet.
    pub facet_vertices: Vec<Vec<usize>>,
    /// Face counts `f_0, …, f_{dim-1}`.
    pub f_vector: Vec<usize>,
}

/// Combinatorial fingerprint: f-vector and the sorted number of facets through each vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Signature {
    pub f_vector: Vec<usize>,
    pub vertex_degrees: Vec<usize>,
}

impl<T: Scalar> Polytope<T> {
    /// Assemble from vertices and candidate facets; facets whose tight
    /// vertices do not span a ridge of dimension `dim - 1` are dropped, as
    /// are facets duplicating another one's vertex set.
    pub(crate) fn assemble(
        ambient_dim: usize,
        vertices: Vec<Vec<T>>,
        candidates: Vec<Halfspace<T>>,
        equations: Vec<Halfspace<T>>,
    ) -> Self {
        let dim = affine_rank(&vertices).max(0) as usize;
        let mut facets = Vec::new();
        let mut facet_vertices: Vec<Vec<usize>> = Vec::new();
        for h in candidates {
            let tight: Vec<usize> = (0..vertices.len()).filter(|&v| h.slack(&vertices[v]).is_negligible()).collect();
            if tight.len() == vertices.len() || facet_vertices.contains(&tight) {
                continue;
            }
            let pts: Vec<Vec<T>> = tight.iter().map(|&v| vertices[v].clone()).collect();
            if dim >= 1 && affine_rank(&pts) == dim as isize - 1 {
                facets.push(h);
                facet_vertices.push(tight);
            }
        }
        let f_vector = face_counts(&vertices, &facet_vertices, dim);
        Polytope { ambient_dim, dim, vertices, facets, equations, facet_vertices, f_vector }
    }

    pub fn contains(&self, v: &[T]) -> bool {
        self.facets.iter().all(|h| {
            let s = h.slack(v);
            s >= T::zero() || s.is_negligible()
        }) && self.equations.iter().all(|h| h.slack(v).is_negligible())
    }

    /// Number of facets through each vertex.
    pub fn vertex_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for f in &self.facet_vertices {
            for &v in f {
                deg[v] += 1;
            }
        }
        deg
    }

    /// Every vertex lies on exactly `dim` facets.
    pub fn is_simple(&self) -> bool {
        self.vertex_degrees().iter().all(|&k| k == self.dim)
    }

    /// Every facet has exactly `dim` vertices.
    pub fn is_simplicial(&self) -> bool {
        self.facet_vertices.iter().all(|f| f.len() == self.dim)
    }

    pub fn signature(&self) -> Signature {
        let mut vertex_degrees = self.vertex_degrees();
        vertex_degrees.sort_unstable();
        Signature { f_vector: self.f_vector.clone(), vertex_degrees }
    }

    pub fn to_f64(&self) -> Polytope<f64> {
        let conv = |h: &Halfspace<T>| Halfspace {
            normal: h.normal.iter().map(Scalar::to_f64).collect(),
            offset: h.offset.to_f64(),
        };
        Polytope {
            ambient_dim: self.ambient_dim,
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| v.iter().map(Scalar::to_f64).collect()).collect(),
            facets: self.facets.iter().map(conv).collect(),
            equations: self.equations.iter().map(conv).collect(),
            facet_vertices: self.facet_vertices.clone(),
            f_vector: self.f_vector.clone(),
        }
    }
}

/// Proper faces are the nonempty intersections of facets; count them by
/// the affine dimension of their vertex sets.
fn face_counts<T: Scalar>(vertices: &[Vec<T>], facet_vertices: &[Vec<usize>], dim: usize) -> Vec<usize> {
    let facet_sets: Vec<BTreeSet<usize>> = facet_vertices.iter().map(|f| f.iter().copied().collect()).collect();
    let mut faces: BTreeSet<Vec<usize>> = facet_vertices.iter().cloned().collect();
    let mut frontier: Vec<Vec<usize>> = faces.iter().cloned().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for f in &frontier {
            for g in &facet_sets {
                let meet: Vec<usize> = f.iter().copied().filter(|v| g.contains(v)).collect();
                if !meet.is_empty() && faces.insert(meet.clone()) {
                    next.push(meet);
                }
            }
        }
        frontier = next;
    }
    let mut counts = vec![0usize; dim];
    for f in faces {
        let pts: Vec<Vec<T>> = f.iter().map(|&v| vertices[v].clone()).collect();
        let r = affine_rank(&pts);
        if r >= 0 && (r as usize) < dim {
            counts[r as usize] += 1;
        }
    }
    if dim == 0 {
        return Vec::new();
    }
    counts
}

/// Convex hull of a full-dimensional point set by brute force over
/// `D`-subsets. Points that are not extreme are dropped.
pub fn convex_hull<T: Scalar>(points: &[Vec<T>]) -> Polytope<T> {
    let big_d = points.first().map_or(0, Vec::len);
    let mut candidates: Vec<(Halfspace<T>, Vec<usize>)> = Vec::new();
    for subset in (0..points.len()).combinations(big_d) {
        // normal·p - c = 0 for p in the subset
        let rows: Vec<Vec<T>> = subset
            .iter()
            .map(|&i| points[i].iter().cloned().chain(std::iter::once(-T::one())).collect())
            .collect();
        let ns = Matrix::from_rows(rows).nullspace();
        if ns.len() != 1 {
            continue;
        }
        let mut normal = ns[0][..big_d].to_vec();
        let mut offset = ns[0][big_d].clone();
        if normal.iter().all(|v| v.is_negligible()) {
            continue;
        }
        let slacks: Vec<T> = points.iter().map(|p| dot(&normal, p) - offset.clone()).collect();
        let pos = slacks.iter().any(|s| *s > T::zero() && !s.is_negligible());
        let neg = slacks.iter().any(|s| *s < T::zero() && !s.is_negligible());
        if pos && neg {
            continue;
        }
        if neg {
            normal = normal.into_iter().map(|v| -v).collect();
            offset = -offset;
        }
        let tight: Vec<usize> = (0..points.len()).filter(|&i| slacks[i].is_negligible()).collect();
        if candidates.iter().all(|(_, t)| *t != tight) {
            candidates.push((Halfspace { normal, offset }, tight));
        }
    }
    // a point is a vertex when the facets through it meet only in it
    let mut keep = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let through: Vec<&Vec<usize>> = candidates.iter().filter(|(_, t)| t.contains(&i)).map(|(_, t)| t).collect();
        if through.is_empty() {
            continue;
        }
        let meet: Vec<usize> = (0..points.len()).filter(|j| through.iter().all(|t| t.contains(j))).collect();
        let pts: Vec<Vec<T>> = meet.iter().map(|&j| points[j].clone()).collect();
        if affine_rank(&pts) == 0 && keep.iter().all(|&k: &usize| points[k] != *p) {
            keep.push(i);
        }
    }
    let vertices: Vec<Vec<T>> = keep.iter().map(|&i| points[i].clone()).collect();
    Polytope::assemble(big_d, vertices, candidates.into_iter().map(|(h, _)| h).collect(), Vec::new())
}
