//! Lie algebras attached to an infinitesimal model: the Nomizu algebra
//! `g0 = h0 ⊕ V` and the transvection algebra `g0' = h0' ⊕ V`.

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtration::annihilator;
use crate::linalg::{Matrix, Rat, Subspace};
use crate::model::InfinitesimalModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "lowercase")]
pub enum BasisLabel {
    Isotropy(usize),
    Translation(usize),
}

/// Finite-dimensional Lie algebra given by structure constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    pub labels: Vec<BasisLabel>,
    /// `brackets[i][j]` = coordinates of `[b_i, b_j]`.
    brackets: Vec<Vec<Vec<Rat>>>,
}

impl LieAlgebra {
    pub fn from_brackets(labels: Vec<BasisLabel>, brackets: Vec<Vec<Vec<Rat>>>) -> Result<Self> {
        let n = labels.len();
        if brackets.len() != n
            || brackets
                .iter()
                .any(|r| r.len() != n || r.iter().any(|v| v.len() != n))
        {
            return Err(Error::Closure(
                "structure constant array has the wrong shape".into(),
            ));
        }
        Ok(Self { labels, brackets })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn isotropy_dim(&self) -> usize {
        self.labels
            .iter()
            .filter(|l| matches!(l, BasisLabel::Isotropy(_)))
            .count()
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &[Rat] {
        &self.brackets[i][j]
    }

    pub fn bracket(&self, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        let n = self.dim();
        let mut out = vec![Rat::zero(); n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi * yj;
                for (o, b) in out.iter_mut().zip(&self.brackets[i][j]) {
                    if !b.is_zero() {
                        *o += &c * b;
                    }
                }
            }
        }
        out
    }

    pub fn antisymmetry_failure(&self) -> Option<(usize, usize)> {
        let n = self.dim();
        (0..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .find(|&(i, j)| {
                self.brackets[i][j]
                    .iter()
                    .zip(&self.brackets[j][i])
                    .any(|(a, b)| !(a + b).is_zero())
            })
    }

    /// First basis triple `i < j < k` violating the Jacobi identity.
    pub fn jacobi_failure(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim();
        let triples: Vec<(usize, usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| (i, j, k))))
            .collect();
        let unit = |i: usize| {
            let mut v = vec![Rat::zero(); n];
            v[i] = num_traits::One::one();
            v
        };
        triples
            .par_iter()
            .find_first(|&&(i, j, k)| {
                let a = self.bracket(&self.brackets[i][j], &unit(k));
                let b = self.bracket(&self.brackets[j][k], &unit(i));
                let c = self.bracket(&self.brackets[k][i], &unit(j));
                a.iter()
                    .zip(&b)
                    .zip(&c)
                    .any(|((x, y), z)| !(x + y + z).is_zero())
            })
            .copied()
    }

    /// Nonzero structure constants `(i, j, k, c^k_ij)` with `i < j`.
    pub fn structure_constants(&self) -> Vec<(usize, usize, usize, &Rat)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for (k, c) in self.brackets[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out.push((i, j, k, c));
                    }
                }
            }
        }
        out
    }
}

/// `h0 = {A in so(V) : A·T = 0, A·K = 0, A·P = 0}` in so coordinates.
pub fn compute_h0(m: &InfinitesimalModel) -> Subspace {
    annihilator(&m.space, &m.invariant_tensors())
}

pub fn check_h_equals_h0(h: &Subspace, h0: &Subspace) -> bool {
    h == h0
}

/// `h0 ⊕ V` with `[A,B] = AB - BA`, `[A,X] = AX`, `[X,Y] = -T_XY + K_XY`.
/// The isotropy part must be a subalgebra of `so(V)` containing every
/// `K_XY`; Jacobi is verified on every basis triple.
pub fn build_nomizu(m: &InfinitesimalModel, h0: &Subspace) -> Result<LieAlgebra> {
    build_reductive(m, h0)
}

/// Bracket closure of `span{K_XY}` in so coordinates; must stay inside `h0`.
pub fn transvection_isotropy(m: &InfinitesimalModel, h0: &Subspace) -> Result<Subspace> {
    let space = &m.space;
    let coords = |a: &Matrix| {
        space
            .so_coords(a)
            .ok_or_else(|| Error::Closure("curvature endomorphism is not skew".into()))
    };
    let gens = m
        .curvature_endos()
        .iter()
        .map(coords)
        .collect::<Result<Vec<_>>>()?;
    let mut current = Subspace::from_vectors(space.so_dim(), gens)?;
    for _ in 0..=h0.dim() {
        let elems = space.so_elements(&current);
        let mut vs = current.basis().to_vec();
        for (i, a) in elems.iter().enumerate() {
            for b in &elems[i + 1..] {
                vs.push(coords(&a.commutator(b))?);
            }
        }
        let next = Subspace::from_vectors(space.so_dim(), vs)?;
        if next == current {
            break;
        }
        current = next;
    }
    if !current.is_subspace_of(h0) {
        return Err(Error::Closure(
            "span of curvature endomorphisms escapes h0".into(),
        ));
    }
    Ok(current)
}

/// `h0' ⊕ V` with the same brackets as the Nomizu algebra.
pub fn build_transvection(m: &InfinitesimalModel, h0: &Subspace) -> Result<LieAlgebra> {
    let h0p = transvection_isotropy(m, h0)?;
    build_reductive(m, &h0p)
}

fn build_reductive(m: &InfinitesimalModel, iso: &Subspace) -> Result<LieAlgebra> {
    let space = &m.space;
    let n = m.dim();
    let k = iso.dim();
    let dim = k + n;
    let elems = space.so_elements(iso);
    let in_iso = |a: &Matrix, what: &str| -> Result<Vec<Rat>> {
        space
            .so_coords(a)
            .and_then(|c| iso.coordinates(&c))
            .ok_or_else(|| Error::Closure(format!("{what} is not in the isotropy algebra")))
    };
    let mut brackets = vec![vec![vec![Rat::zero(); dim]; dim]; dim];
    for i in 0..k {
        for j in i + 1..k {
            let c = in_iso(&elems[i].commutator(&elems[j]), "[A, B]")?;
            for (l, x) in c.into_iter().enumerate() {
                brackets[j][i][l] = -x.clone();
                brackets[i][j][l] = x;
            }
        }
        for b in 0..n {
            for c in 0..n {
                let x = elems[i][(c, b)].clone();
                brackets[k + b][i][k + c] = -x.clone();
                brackets[i][k + b][k + c] = x;
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            let kc = in_iso(&m.curvature_endo(a, b), "K_xy")?;
            let t = m.torsion_vec(a, b);
            let mut v = kc;
            v.extend(t.into_iter().map(|x| -x));
            brackets[k + b][k + a] = v.iter().map(|x| -x.clone()).collect();
            brackets[k + a][k + b] = v;
        }
    }
    let mut labels: Vec<BasisLabel> = (0..k).map(BasisLabel::Isotropy).collect();
    labels.extend((0..n).map(BasisLabel::Translation));
    let alg = LieAlgebra { labels, brackets };
    if let Some((i, j)) = alg.antisymmetry_failure() {
        return Err(Error::Closure(format!(
            "bracket not antisymmetric on ({i}, {j})"
        )));
    }
    if let Some(triple) = alg.jacobi_failure() {
        return Err(Error::Jacobi { triple });
    }
    Ok(alg)
}
