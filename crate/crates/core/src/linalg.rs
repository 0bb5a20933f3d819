//! Small dense linear-algebra helpers on top of `nalgebra`.
//!
//! Everything in this crate works with problems of modest dimension (exhaustive
//! principal-minor enumeration caps out at 20), so plain dense routines are
//! used throughout.

use nalgebra::{DMatrix, DVector};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Largest dimension for which all `2^m - 1` principal submatrices are enumerated.
pub const ENUMERATION_LIMIT: usize = 20;

/// A principal submatrix together with the (0-based, ascending) index set it
/// was taken on.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalSubmatrix {
    pub indices: Vec<usize>,
    pub matrix: Matrix,
}

impl PrincipalSubmatrix {
    pub fn of(a: &Matrix, indices: &[usize]) -> Self {
        assert!(!indices.is_empty(), "principal index set must be nonempty");
        let k = indices.len();
        let matrix = Matrix::from_fn(k, k, |r, c| a[(indices[r], indices[c])]);
        Self {
            indices: indices.to_vec(),
            matrix,
        }
    }
}

/// Iterates over every nonempty subset of `0..m`, ordered by size and then
/// lexicographically.
#[derive(Debug, Clone)]
pub struct IndexSubsets {
    m: usize,
    current: Vec<usize>,
    done: bool,
}

impl IndexSubsets {
    pub fn new(m: usize) -> Self {
        Self {
            m,
            current: Vec::new(),
            done: m == 0,
        }
    }

    /// Only subsets of exactly `k` elements.
    pub fn of_size(m: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
        Self::new(m)
            .skip_while(move |s| s.len() < k)
            .take_while(move |s| s.len() == k)
    }
}

impl Iterator for IndexSubsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if self.current.is_empty() {
            self.current.push(0);
            return Some(self.current.clone());
        }
        let k = self.current.len();
        // advance to the next k-combination in lexicographic order
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.current[i] < self.m - k + i {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
                return Some(self.current.clone());
            }
        }
        if k == self.m {
            self.done = true;
            return None;
        }
        self.current = (0..=k).collect();
        Some(self.current.clone())
    }
}

pub fn determinant(a: &Matrix) -> f64 {
    match a.nrows() {
        0 => 1.0,
        1 => a[(0, 0)],
        _ => a.clone().determinant(),
    }
}

/// Singular values in no particular order.
pub fn singular_values(a: &Matrix) -> Vector {
    if a.nrows() == 1 && a.ncols() == 1 {
        return Vector::from_element(1, a[(0, 0)].abs());
    }
    a.clone().svd(false, false).singular_values
}

pub fn sigma_min(a: &Matrix) -> f64 {
    singular_values(a).min()
}

pub fn spectral_norm(a: &Matrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    singular_values(a).max()
}

/// Smallest eigenvalue of the symmetric part `(A + Aᵀ)/2`.
pub fn lambda_min_sym(a: &Matrix) -> f64 {
    if a.nrows() == 1 {
        return a[(0, 0)];
    }
    let sym = (a + a.transpose()) * 0.5;
    sym.symmetric_eigenvalues().min()
}

pub fn is_symmetric(a: &Matrix) -> bool {
    a.is_square()
        && (0..a.nrows()).all(|i| (0..i).all(|j| a[(i, j)].to_bits() == a[(j, i)].to_bits()))
}

/// Solves `A x = b` by LU with partial pivoting; `None` when `A` is singular.
pub fn solve(a: &Matrix, b: &Vector) -> Option<Vector> {
    a.clone().lu().solve(b)
}

pub fn max_abs(v: &Vector) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}
