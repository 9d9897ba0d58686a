use num_traits::{One, Zero};

use super::matrix::{Echelon, Matrix};
use super::rat::Rat;
use crate::error::{Error, Result};

/// Linear subspace of `Rat^n` stored as its reduced row echelon basis.
///
/// Two subspaces are equal exactly when their stored bases are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<Rat>>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim).map(|i| unit(ambient_dim, i)).collect();
        Self { ambient_dim, basis }
    }

    /// Span of `vectors`, reduced to canonical form.
    pub fn from_vectors(ambient_dim: usize, vectors: Vec<Vec<Rat>>) -> Result<Self> {
        let mut ech = Echelon::new(ambient_dim);
        for v in vectors {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    context: "Subspace::from_vectors",
                    expected: ambient_dim,
                    found: v.len(),
                });
            }
            ech.push(v);
        }
        Ok(Self::from_echelon(&ech))
    }

    pub(crate) fn from_echelon(ech: &Echelon) -> Self {
        Self {
            ambient_dim: ech.width(),
            basis: ech.pivot_rows().iter().map(|(_, r)| r.clone()).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient_dim
    }

    pub fn basis(&self) -> &[Vec<Rat>] {
        &self.basis
    }

    /// Basis as the rows of a `dim x ambient_dim` matrix.
    pub fn basis_matrix(&self) -> Matrix {
        Matrix::from_fn(self.dim(), self.ambient_dim, |i, j| {
            self.basis[i][j].clone()
        })
    }

    fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.basis.iter().map(|row| {
            row.iter()
                .position(|x| !x.is_zero())
                .expect("basis rows are nonzero")
        })
    }

    /// Coordinates of `v` in the stored basis, or `None` if `v` is not in the span.
    pub fn coordinates(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(v.len(), self.ambient_dim, "vector length mismatch");
        let coords: Vec<Rat> = self.pivots().map(|p| v[p].clone()).collect();
        let mut residual = v.to_vec();
        for (c, row) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (r, b) in residual.iter_mut().zip(row) {
                if !b.is_zero() {
                    *r -= c * b;
                }
            }
        }
        residual.iter().all(Zero::is_zero).then_some(coords)
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.coordinates(v).is_some()
    }

    /// Vector with the given coordinates in the stored basis.
    pub fn element(&self, coords: &[Rat]) -> Vec<Rat> {
        assert_eq!(coords.len(), self.dim());
        let mut out = vec![Rat::zero(); self.ambient_dim];
        for (c, row) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (o, b) in out.iter_mut().zip(row) {
                if !b.is_zero() {
                    *o += c * b;
                }
            }
        }
        out
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient_dim == other.ambient_dim && self.basis.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other, "Subspace::sum")?;
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Subspace::from_vectors(self.ambient_dim, vs)
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other, "Subspace::intersect")?;
        if self.is_full() {
            return Ok(other.clone());
        }
        if other.is_full() {
            return Ok(self.clone());
        }
        let (a, b) = (self.dim(), other.dim());
        // x in A ∩ B iff x = sum a_i u_i = sum b_j v_j; kernel of [U^T | -V^T].
        let m = Matrix::from_fn(self.ambient_dim, a + b, |row, col| {
            if col < a {
                self.basis[col][row].clone()
            } else {
                -other.basis[col - a][row].clone()
            }
        });
        let vectors = m
            .kernel()
            .basis()
            .iter()
            .map(|k| self.element(&k[..a]))
            .collect();
        Subspace::from_vectors(self.ambient_dim, vectors)
    }

    /// Image of the subspace under the linear map `m`.
    pub fn image(&self, m: &Matrix) -> Result<Subspace> {
        if m.cols() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                context: "Subspace::image",
                expected: self.ambient_dim,
                found: m.cols(),
            });
        }
        Subspace::from_vectors(m.rows(), self.basis.iter().map(|v| m.mul_vec(v)).collect())
    }

    pub fn is_invariant_under(&self, m: &Matrix) -> bool {
        self.basis.iter().all(|v| self.contains(&m.mul_vec(v)))
    }

    /// Restriction of `m` to an invariant subspace, in stored-basis coordinates
    /// (column `j` holds the coordinates of `m` applied to basis vector `j`).
    pub fn restrict(&self, m: &Matrix) -> Option<Matrix> {
        let k = self.dim();
        let mut out = Matrix::zeros(k, k);
        for (j, v) in self.basis.iter().enumerate() {
            let coords = self.coordinates(&m.mul_vec(v))?;
            for (i, c) in coords.into_iter().enumerate() {
                out[(i, j)] = c;
            }
        }
        Some(out)
    }

    fn check_ambient(&self, other: &Subspace, context: &'static str) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        Ok(())
    }
}

pub(crate) fn unit(n: usize, i: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); n];
    v[i] = Rat::one();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat::int;

    fn span(n: usize, vs: &[&[i64]]) -> Subspace {
        Subspace::from_vectors(
            n,
            vs.iter()
                .map(|v| v.iter().map(|&x| int(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn intersect_examples() {
        let a = span(3, &[&[1, 1, 0], &[0, 1, 2]]);
        assert_eq!(a.intersect(&a).unwrap(), a);
        let e1 = span(2, &[&[1, 0]]);
        let e2 = span(2, &[&[0, 1]]);
        assert!(e1.intersect(&e2).unwrap().is_zero());
        let a = span(3, &[&[1, 0, 0], &[0, 1, 0]]);
        let b = span(3, &[&[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(a.intersect(&b).unwrap(), span(3, &[&[0, 1, 0]]));
    }

    #[test]
    fn intersect_rejects_mismatch() {
        assert!(Subspace::full(2).intersect(&Subspace::full(3)).is_err());
    }

    #[test]
    fn canonical_form_ignores_spanning_set() {
        let a = span(3, &[&[1, 2, 3], &[0, 1, 1]]);
        let b = span(3, &[&[1, 3, 4], &[2, 5, 7], &[1, 1, 2]]);
        assert_eq!(a, b);
    }

    #[test]
    fn coordinates_round_trip() {
        let a = span(4, &[&[1, 2, 0, 1], &[0, 0, 1, 3]]);
        let v = a.element(&[int(3), int(-2)]);
        assert_eq!(a.coordinates(&v).unwrap(), vec![int(3), int(-2)]);
        assert!(a.coordinates(&[int(0), int(1), int(0), int(0)]).is_none());
    }
}
