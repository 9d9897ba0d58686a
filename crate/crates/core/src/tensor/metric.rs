use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::dense::Tensor;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rat, Subspace};

/// `Rat^n` with a symmetric nondegenerate bilinear form `g`.
///
/// Also carries the Lie algebra `so(V) = {a : a^T g + g a = 0}` as a subspace
/// of the `n*n` matrix entries, together with its basis; "so coordinates"
/// always mean coordinates with respect to that basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricSpace {
    g: Matrix,
    g_inv: Matrix,
    signature: (usize, usize),
    so: Subspace,
    so_basis: Vec<Matrix>,
}

impl MetricSpace {
    pub fn new(g: Matrix) -> Result<Self> {
        if !g.is_square() {
            return Err(Error::Metric("metric matrix is not square".into()));
        }
        if g != g.transpose() {
            return Err(Error::Metric("metric matrix is not symmetric".into()));
        }
        let g_inv = g
            .inverse()
            .ok_or_else(|| Error::Metric("metric matrix is singular".into()))?;
        let signature = signature(&g)?;
        let so = skew_subspace(&g);
        let n = g.rows();
        let so_basis = so
            .basis()
            .iter()
            .map(|v| Matrix::from_entries(n, n, v.clone()).expect("n*n entries"))
            .collect();
        Ok(Self {
            g,
            g_inv,
            signature,
            so,
            so_basis,
        })
    }

    /// Like [`MetricSpace::new`], additionally checking the declared signature.
    pub fn with_signature(g: Matrix, plus: usize, minus: usize) -> Result<Self> {
        let space = Self::new(g)?;
        if space.signature != (plus, minus) {
            return Err(Error::Metric(format!(
                "declared signature ({plus},{minus}) but metric has {:?}",
                space.signature
            )));
        }
        Ok(space)
    }

    /// Diagonal metric with `plus` entries `+1` followed by `minus` entries `-1`.
    pub fn diagonal(plus: usize, minus: usize) -> Self {
        let n = plus + minus;
        let g = Matrix::from_fn(n, n, |i, j| match (i == j, i < plus) {
            (false, _) => Rat::zero(),
            (true, true) => Rat::one(),
            (true, false) => -Rat::one(),
        });
        Self::new(g).expect("diagonal signs give a valid metric")
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    pub fn g(&self) -> &Matrix {
        &self.g
    }

    pub fn g_inv(&self) -> &Matrix {
        &self.g_inv
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn is_definite(&self) -> bool {
        self.signature.0 == 0 || self.signature.1 == 0
    }

    pub fn metric_tensor(&self) -> Tensor {
        Tensor::from_bilinear(&self.g)
    }

    pub fn inner(&self, x: &[Rat], y: &[Rat]) -> Rat {
        let gy = self.g.mul_vec(y);
        x.iter().zip(&gy).map(|(a, b)| a * b).sum()
    }

    pub fn so_dim(&self) -> usize {
        self.so_basis.len()
    }

    pub fn so_basis(&self) -> &[Matrix] {
        &self.so_basis
    }

    /// `so(V)` as a subspace of the flattened `n*n` matrices.
    pub fn so_subspace(&self) -> &Subspace {
        &self.so
    }

    pub fn is_skew(&self, a: &Matrix) -> bool {
        a.rows() == self.dim() && a.cols() == self.dim() && self.so.contains(a.entries())
    }

    /// Coordinates of `a` in the so basis, `None` if `a` is not skew.
    pub fn so_coords(&self, a: &Matrix) -> Option<Vec<Rat>> {
        if a.rows() != self.dim() || a.cols() != self.dim() {
            return None;
        }
        self.so.coordinates(a.entries())
    }

    pub fn so_element(&self, coords: &[Rat]) -> Matrix {
        let n = self.dim();
        Matrix::combination(coords, &self.so_basis, n, n)
    }

    /// Elements of `so(V)` spanning the subspace `h` given in so coordinates.
    pub fn so_elements(&self, h: &Subspace) -> Vec<Matrix> {
        h.basis().iter().map(|c| self.so_element(c)).collect()
    }

    /// Matrix of `ad_a = [a, ·]` on `so(V)` in so coordinates.
    pub fn ad(&self, a: &Matrix) -> Matrix {
        let m = self.so_dim();
        let mut out = Matrix::zeros(m, m);
        for (j, b) in self.so_basis.iter().enumerate() {
            let c = self
                .so_coords(&a.commutator(b))
                .expect("so(V) is closed under commutators");
            for (i, x) in c.into_iter().enumerate() {
                out[(i, j)] = x;
            }
        }
        out
    }

    /// Curvature-type tensor `R_{xyzw} = c (g_xz g_yw - g_yz g_xw)`.
    pub fn constant_curvature(&self, c: &Rat) -> Tensor {
        let n = self.dim();
        let mut t = Tensor::zeros(0, 4, n);
        if c.is_zero() {
            return t;
        }
        let g = &self.g;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for w in 0..n {
                        let v = &g[(x, z)] * &g[(y, w)] - &g[(y, z)] * &g[(x, w)];
                        if !v.is_zero() {
                            t.set(&[x, y, z, w], c * v);
                        }
                    }
                }
            }
        }
        t
    }

    /// Endomorphism `z ↦ R(x, y, z, ·)^♯` of a `(0,4)` tensor, the last slot
    /// raised with `g^{-1}`: `out[d][c] = sum_w ginv[d][w] R[x][y][c][w]`.
    pub fn curvature_endo(&self, r0: &Tensor, x: &[Rat], y: &[Rat]) -> Result<Matrix> {
        if r0.valence() != (0, 4) || r0.dim() != self.dim() {
            return Err(Error::Tensor(
                "curvature_endo: expected a (0,4) tensor".into(),
            ));
        }
        let n = self.dim();
        let rxy = r0.interior_product(x)?.interior_product(y)?;
        let lowered = Matrix::from_entries(n, n, rxy.comps().to_vec())?; // [c][w]
        Ok(self.g_inv.mul(&lowered.transpose()))
    }

    /// `curvature_endo` on basis vectors `e_a, e_b`.
    pub fn curvature_endo_basis(&self, r0: &Tensor, a: usize, b: usize) -> Matrix {
        let n = self.dim();
        let lowered = Matrix::from_fn(n, n, |c, w| r0.get(&[a, b, c, w]).clone());
        self.g_inv.mul(&lowered.transpose())
    }

    /// All `curvature_endo_basis(r0, a, b)`, indexed `[a * n + b]`.
    pub fn curvature_endos(&self, r0: &Tensor) -> Vec<Matrix> {
        let n = self.dim();
        (0..n * n)
            .into_par_iter()
            .map(|ab| self.curvature_endo_basis(r0, ab / n, ab % n))
            .collect()
    }

    /// Congruent metric `f^T g f` (the pullback of `g` by `f`).
    pub fn pulled_back(&self, f: &Matrix) -> Result<MetricSpace> {
        if f.inverse().is_none() {
            return Err(Error::Singular);
        }
        MetricSpace::new(f.transpose().mul(&self.g).mul(f))
    }
}

/// `{a : a^T g + g a = 0}` over the row-major entries of `a`.
fn skew_subspace(g: &Matrix) -> Subspace {
    let n = g.rows();
    let var = |p: usize, q: usize| p * n + q;
    let mut rows = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut row = vec![Rat::zero(); n * n];
            for k in 0..n {
                // (a^T g)[i][j] = sum_k a[k][i] g[k][j]; (g a)[i][j] = sum_k g[i][k] a[k][j]
                row[var(k, i)] += &g[(k, j)];
                row[var(k, j)] += &g[(i, k)];
            }
            rows.push(row);
        }
    }
    Matrix::from_rows(rows).expect("rectangular").kernel()
}

/// `(positive, negative)` counts from an exact congruence diagonalization.
pub fn signature(g: &Matrix) -> Result<(usize, usize)> {
    let n = g.rows();
    let mut m = g.clone();
    let mut plus = 0;
    let mut minus = 0;
    for i in 0..n {
        if m[(i, i)].is_zero() {
            if let Some(j) = (i + 1..n).find(|&j| !m[(j, j)].is_zero()) {
                swap_congruent(&mut m, i, j);
            } else if let Some(j) = (i + 1..n).find(|&j| !m[(i, j)].is_zero()) {
                // e_i + e_j has norm 2 g_ij != 0
                add_congruent(&mut m, i, j, &Rat::one());
            } else {
                return Err(Error::Metric("metric matrix is degenerate".into()));
            }
        }
        let pivot = m[(i, i)].clone();
        for j in i + 1..n {
            if m[(j, i)].is_zero() {
                continue;
            }
            let f = -(&m[(j, i)] / &pivot);
            add_congruent(&mut m, j, i, &f);
        }
        if pivot.is_positive() {
            plus += 1;
        } else {
            minus += 1;
        }
    }
    Ok((plus, minus))
}

fn swap_congruent(m: &mut Matrix, i: usize, j: usize) {
    let n = m.rows();
    for k in 0..n {
        let t = m[(i, k)].clone();
        m[(i, k)] = m[(j, k)].clone();
        m[(j, k)] = t;
    }
    for k in 0..n {
        let t = m[(k, i)].clone();
        m[(k, i)] = m[(k, j)].clone();
        m[(k, j)] = t;
    }
}

/// Row `target += f * row source`, then the same on columns.
fn add_congruent(m: &mut Matrix, target: usize, source: usize, f: &Rat) {
    let n = m.rows();
    for k in 0..n {
        let d = f * &m[(source, k)];
        m[(target, k)] += d;
    }
    for k in 0..n {
        let d = f * &m[(k, source)];
        m[(k, target)] += d;
    }
}
