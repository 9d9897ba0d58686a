use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rat};

/// Dense tensor over `Rat^n` with `contra` upper slots followed by `co`
/// lower slots, stored row-major in that slot order.
///
/// For derivative tensors the derivative index is the first lower slot, so
/// `R^{i+1}[x, ...]` is `(∇_x ∇^i R)(...)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tensor {
    contra: usize,
    co: usize,
    dim: usize,
    comps: Vec<Rat>,
}

impl Tensor {
    pub fn zeros(contra: usize, co: usize, dim: usize) -> Self {
        Self {
            contra,
            co,
            dim,
            comps: vec![Rat::zero(); dim.pow((contra + co) as u32)],
        }
    }

    pub fn from_comps(contra: usize, co: usize, dim: usize, comps: Vec<Rat>) -> Result<Self> {
        let expected = dim.pow((contra + co) as u32);
        if comps.len() != expected {
            return Err(Error::DimensionMismatch {
                context: "Tensor::from_comps",
                expected,
                found: comps.len(),
            });
        }
        Ok(Self {
            contra,
            co,
            dim,
            comps,
        })
    }

    /// The `(1,1)` tensor with components `t^i_j = m[i][j]`.
    pub fn from_endo(m: &Matrix) -> Self {
        assert!(m.is_square());
        Self {
            contra: 1,
            co: 1,
            dim: m.rows(),
            comps: m.entries().to_vec(),
        }
    }

    /// The `(0,2)` tensor with components `m[i][j]`.
    pub fn from_bilinear(m: &Matrix) -> Self {
        assert!(m.is_square());
        Self {
            contra: 0,
            co: 2,
            dim: m.rows(),
            comps: m.entries().to_vec(),
        }
    }

    pub fn valence(&self) -> (usize, usize) {
        (self.contra, self.co)
    }

    pub fn rank(&self) -> usize {
        self.contra + self.co
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn comps(&self) -> &[Rat] {
        &self.comps
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Zero::is_zero)
    }

    pub fn same_shape(&self, other: &Tensor) -> bool {
        self.contra == other.contra && self.co == other.co && self.dim == other.dim
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| {
            debug_assert!(i < self.dim);
            acc * self.dim + i
        })
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.rank()];
        for slot in (0..self.rank()).rev() {
            idx[slot] = flat % self.dim;
            flat /= self.dim;
        }
        idx
    }

    pub fn get(&self, idx: &[usize]) -> &Rat {
        &self.comps[self.flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: Rat) {
        let f = self.flat_index(idx);
        self.comps[f] = value;
    }

    pub fn add_at(&mut self, idx: &[usize], value: &Rat) {
        let f = self.flat_index(idx);
        self.comps[f] += value;
    }

    /// Nonzero components as `(multi-index, value)` in flat order.
    pub fn nonzeros(&self) -> impl Iterator<Item = (Vec<usize>, &Rat)> + '_ {
        self.comps
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(f, v)| (self.multi_index(f), v))
    }

    fn check_shape(&self, other: &Tensor, context: &str) -> Result<()> {
        if !self.same_shape(other) {
            return Err(Error::Tensor(format!(
                "{context}: shape ({},{};{}) vs ({},{};{})",
                self.contra, self.co, self.dim, other.contra, other.co, other.dim
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        self.check_shape(other, "add")?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a + b)
            .collect();
        Ok(self.with_comps(comps))
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        self.check_shape(other, "sub")?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a - b)
            .collect();
        Ok(self.with_comps(comps))
    }

    pub fn scale(&self, c: &Rat) -> Tensor {
        let comps = self.comps.iter().map(|a| a * c).collect();
        self.with_comps(comps)
    }

    fn with_comps(&self, comps: Vec<Rat>) -> Tensor {
        Tensor {
            contra: self.contra,
            co: self.co,
            dim: self.dim,
            comps,
        }
    }

    /// First index (slot order, lexicographic) where two same-shape tensors differ.
    pub fn first_difference(&self, other: &Tensor) -> Option<Vec<usize>> {
        if !self.same_shape(other) {
            return Some(Vec::new());
        }
        self.comps
            .iter()
            .zip(&other.comps)
            .position(|(a, b)| a != b)
            .map(|f| self.multi_index(f))
    }

    /// Natural action of the endomorphism `a` as a derivation: `+a` on each
    /// upper slot, `-a` composed into each lower slot.
    pub fn derivation_action(&self, a: &Matrix) -> Result<Tensor> {
        if a.rows() != self.dim || a.cols() != self.dim {
            return Err(Error::Tensor(format!(
                "derivation_action: {}x{} endomorphism on dimension {}",
                a.rows(),
                a.cols(),
                self.dim
            )));
        }
        let n = self.dim;
        let mut out = Tensor::zeros(self.contra, self.co, n);
        for (idx, t) in self.nonzeros() {
            let mut target = idx.clone();
            for slot in 0..self.rank() {
                let k = idx[slot];
                for other in 0..n {
                    // upper: a[other][k] * t ; lower: -t * a[k][other]
                    let (coef, negate) = if slot < self.contra {
                        (&a[(other, k)], false)
                    } else {
                        (&a[(k, other)], true)
                    };
                    if coef.is_zero() {
                        continue;
                    }
                    target[slot] = other;
                    let v = coef * t;
                    let f = out.flat_index(&target);
                    if negate {
                        out.comps[f] -= v;
                    } else {
                        out.comps[f] += v;
                    }
                }
                target[slot] = k;
            }
        }
        Ok(out)
    }

    /// Contracts the vector `x` into the first lower slot.
    pub fn interior_product(&self, x: &[Rat]) -> Result<Tensor> {
        if self.co == 0 {
            return Err(Error::Tensor("interior_product: no covariant slot".into()));
        }
        if x.len() != self.dim {
            return Err(Error::Tensor(format!(
                "interior_product: vector of length {} on dimension {}",
                x.len(),
                self.dim
            )));
        }
        let n = self.dim;
        let slot = self.contra;
        let before = n.pow(slot as u32);
        let after = n.pow((self.rank() - slot - 1) as u32);
        let mut out = Tensor::zeros(self.contra, self.co - 1, n);
        for b in 0..before {
            for (k, xk) in x.iter().enumerate() {
                if xk.is_zero() {
                    continue;
                }
                let src = (b * n + k) * after;
                let dst = b * after;
                for j in 0..after {
                    let t = &self.comps[src + j];
                    if !t.is_zero() {
                        out.comps[dst + j] += xk * t;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Interior product with the `k`-th basis vector.
    pub fn interior_basis(&self, k: usize) -> Result<Tensor> {
        let mut x = vec![Rat::zero(); self.dim];
        x[k] = num_traits::One::one();
        self.interior_product(&x)
    }

    /// Replaces slot `slot` by `new[.., i, ..] = sum_k m[i][k] old[.., k, ..]`.
    fn transform_slot(&self, slot: usize, m: &Matrix) -> Tensor {
        let mut out = Tensor::zeros(self.contra, self.co, self.dim);
        for (idx, t) in self.nonzeros() {
            let k = idx[slot];
            let mut target = idx.clone();
            for i in 0..self.dim {
                let c = &m[(i, k)];
                if c.is_zero() {
                    continue;
                }
                target[slot] = i;
                let f = out.flat_index(&target);
                out.comps[f] += c * t;
            }
        }
        out
    }

    /// Pullback by the invertible map `f`: lower slots are composed with `f`,
    /// upper slots with `f^{-1}`.
    pub fn pullback(&self, f: &Matrix) -> Result<Tensor> {
        if f.rows() != self.dim || f.cols() != self.dim {
            return Err(Error::Tensor("pullback: map dimension mismatch".into()));
        }
        let finv = f.inverse().ok_or(Error::Singular)?;
        let ft = f.transpose();
        let mut out = self.clone();
        for slot in 0..self.rank() {
            let m = if slot < self.contra { &finv } else { &ft };
            out = out.transform_slot(slot, m);
        }
        Ok(out)
    }

    /// Tensor product; upper slots of both factors come first.
    pub fn tensor_product(&self, other: &Tensor) -> Result<Tensor> {
        if self.dim != other.dim {
            return Err(Error::Tensor("tensor_product: dimension mismatch".into()));
        }
        let mut out = Tensor::zeros(self.contra + other.contra, self.co + other.co, self.dim);
        for (i, a) in self.nonzeros() {
            for (j, b) in other.nonzeros() {
                let mut idx = Vec::with_capacity(out.rank());
                idx.extend_from_slice(&i[..self.contra]);
                idx.extend_from_slice(&j[..other.contra]);
                idx.extend_from_slice(&i[self.contra..]);
                idx.extend_from_slice(&j[other.contra..]);
                out.set(&idx, a * b);
            }
        }
        Ok(out)
    }

    /// New first lower slot: `out[up.., x, low..] = parts[x][up.., low..]`.
    pub fn stack_derivative(parts: &[Tensor]) -> Result<Tensor> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Tensor("stack_derivative: no parts".into()))?;
        if parts.len() != first.dim {
            return Err(Error::Tensor(format!(
                "stack_derivative: {} parts for dimension {}",
                parts.len(),
                first.dim
            )));
        }
        for p in parts {
            first.check_shape(p, "stack_derivative")?;
        }
        if first.contra == 0 {
            let comps = parts.iter().flat_map(|p| p.comps.iter().cloned()).collect();
            return Tensor::from_comps(0, first.co + 1, first.dim, comps);
        }
        let mut out = Tensor::zeros(first.contra, first.co + 1, first.dim);
        for (x, p) in parts.iter().enumerate() {
            for (mut idx, v) in p.nonzeros() {
                idx.insert(first.contra, x);
                out.set(&idx, v.clone());
            }
        }
        Ok(out)
    }

    /// `(1,1)` tensor as a matrix.
    pub fn to_endo(&self) -> Result<Matrix> {
        if self.valence() != (1, 1) {
            return Err(Error::Tensor("to_endo: valence is not (1,1)".into()));
        }
        Matrix::from_entries(self.dim, self.dim, self.comps.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stacking_inverts_interior_product() {
        let n = 3;
        let mut t = Tensor::zeros(1, 2, n);
        t.set(&[0, 1, 2], crate::linalg::int(4));
        t.set(&[2, 0, 1], crate::linalg::rat(-1, 3));
        let parts: Vec<Tensor> = (0..n).map(|k| t.interior_basis(k).unwrap()).collect();
        assert_eq!(Tensor::stack_derivative(&parts).unwrap(), t);
    }
    use crate::linalg::rat::{int, rat};

    fn covector(n: usize, i: usize) -> Tensor {
        let mut t = Tensor::zeros(0, 1, n);
        t.set(&[i], int(1));
        t
    }

    #[test]
    fn interior_product_examples() {
        let e1 = covector(2, 0);
        let s = e1.interior_product(&[int(1), int(0)]).unwrap();
        assert_eq!(s.comps(), &[int(1)]);
        let e2 = covector(2, 1);
        let t = e1.tensor_product(&e2).unwrap();
        assert_eq!(t.interior_product(&[int(1), int(0)]).unwrap(), e2);
        assert!(Tensor::zeros(1, 0, 2)
            .interior_product(&[int(1), int(0)])
            .is_err());
    }

    #[test]
    fn zero_endomorphism_acts_trivially() {
        let mut t = Tensor::zeros(1, 2, 3);
        t.set(&[0, 1, 2], int(5));
        let out = t.derivation_action(&Matrix::zeros(3, 3)).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn action_on_vector_and_covector() {
        let a = Matrix::from_rows(vec![vec![int(1), int(2)], vec![int(3), int(4)]]).unwrap();
        let mut v = Tensor::zeros(1, 0, 2);
        v.set(&[0], int(1));
        // a · e_0 = first column of a
        assert_eq!(v.derivation_action(&a).unwrap().comps(), &[int(1), int(3)]);
        // a · e^0 = -(e^0 ∘ a) = -(first row of a)
        let w = covector(2, 0);
        assert_eq!(
            w.derivation_action(&a).unwrap().comps(),
            &[int(-1), int(-2)]
        );
    }

    #[test]
    fn scalar_pullback() {
        let mut t = Tensor::zeros(0, 2, 2);
        t.set(&[0, 1], int(3));
        t.set(&[1, 1], rat(1, 2));
        let f = Matrix::identity(2).scale(&int(2));
        assert_eq!(t.pullback(&f).unwrap(), t.scale(&int(4)));
        assert_eq!(t.pullback(&Matrix::identity(2)).unwrap(), t);
        assert_eq!(t.pullback(&Matrix::zeros(2, 2)), Err(Error::Singular));
    }
}
