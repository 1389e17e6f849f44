//! Named arrangements used throughout the literature on squared linear models,
//! plus a sampler for arrangements in general position.

use itertools::Itertools;
use rand::Rng;

use crate::arrangement::Arrangement;
use crate::linalg::Matrix;
use crate::scalar::int;
use crate::Rational;

fn from_rows(rows: &[&[i64]]) -> Arrangement {
    Arrangement::from_integer_rows(rows).expect("catalog rows are nonzero")
}

/// `x_1, x_2, x_3, x_1 + x_2 + x_3`; the Steiner surface.
pub fn steiner() -> Arrangement {
    from_rows(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1]])
}

/// Braid arrangement `x_i - x_j` for `i < j ≤ c`, in essential coordinates
/// `x_c = 0`. Rows follow lexicographic pair order, labelled `"ij"`.
pub fn braid(c: usize) -> Arrangement {
    assert!(c >= 3, "braid arrangement needs c >= 3");
    let d = c - 1;
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, j) in (0..c).tuple_combinations() {
        let mut r = vec![int(0); d];
        r[i] = int(1);
        if j < d {
            r[j] = int(-1);
        }
        rows.push(r);
        labels.push(format!("{}{}", i + 1, j + 1));
    }
    Arrangement::from_rows(rows)
        .and_then(|a| a.with_labels(labels))
        .expect("braid rows are nonzero")
}

/// `x_1, x_2, x_1 + x_2`: three points on `P^1`, a conic inscribed in the triangle.
pub fn circle() -> Arrangement {
    from_rows(&[&[1, 0], &[0, 1], &[1, 1]])
}

/// `x_1, x_1 + x_2, x_1 + 2x_2, x_2`: uniform rank-two matroid whose model is not generic.
pub fn nongeneric_uniform() -> Arrangement {
    from_rows(&[&[1, 0], &[1, 1], &[1, 2], &[0, 1]])
}

/// `x_1, x_1 + x_2, x_1 - 2x_2, x_2`, a perturbation of [`nongeneric_uniform`].
pub fn perturbed_uniform() -> Arrangement {
    from_rows(&[&[1, 0], &[1, 1], &[1, -2], &[0, 1]])
}

/// `x_1 + i·x_2` for `i = 1..=n`.
pub fn moment_line(n: usize) -> Arrangement {
    let rows = (1..=n as i64).map(|i| vec![int(1), int(i)]).collect();
    Arrangement::from_rows(rows).expect("rows are nonzero")
}

/// Seven lines in `P^2` with a single linear relation among their squares.
pub fn seven_lines() -> Arrangement {
    from_rows(&[
        &[1, 0, 0],
        &[0, 1, 0],
        &[0, 0, 1],
        &[1, 1, 1],
        &[1, 2, 3],
        &[1, 5, 7],
        &[1, 11, 13],
    ])
}

/// Coordinate hyperplanes plus their sum, `n = d + 1`.
pub fn coordinate_plus_sum(d: usize) -> Arrangement {
    let mut rows: Vec<Vec<Rational>> = Matrix::<Rational>::identity(d).to_rows();
    rows.push(vec![int(1); d]);
    Arrangement::from_rows(rows).expect("rows are nonzero")
}

/// True when every `d` rows are linearly independent.
pub fn is_uniform(arr: &Arrangement) -> bool {
    (0..arr.n())
        .combinations(arr.d())
        .all(|idx| arr.matrix().select_rows(&idx).rank() == arr.d())
}

/// Random integer arrangement with entries in `[-bound, bound]` whose matroid is uniform.
pub fn random_generic<R: Rng>(d: usize, n: usize, bound: i64, rng: &mut R) -> Arrangement {
    loop {
        let rows: Vec<Vec<Rational>> = (0..n)
            .map(|_| (0..d).map(|_| int(rng.gen_range(-bound..=bound))).collect())
            .collect();
        if let Ok(arr) = Arrangement::from_rows(rows) {
            if is_uniform(&arr) {
                return arr;
            }
        }
    }
}
