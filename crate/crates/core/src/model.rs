//! The map `S`, the infinitesimal model `(T, K, P)` and its axioms.
//!
//! Sign convention: `S = ∇ - ∇̃`, so that `i_X R^{i+1} = S_X · R^i` and
//! `T_XY = S_Y X - S_X Y`.

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::data::InfinitesimalData;
use crate::error::{Error, Result};
use crate::filtration::MuSystem;
use crate::linalg::{Matrix, Rat, Subspace};
use crate::reductivity::ReductivityVerdict;
use crate::tensor::{MetricSpace, Tensor};

/// Linear map `V → so(V)` stored by its values on the basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SMap {
    pub mats: Vec<Matrix>,
}

impl SMap {
    pub fn zero(n: usize) -> Self {
        Self {
            mats: vec![Matrix::zeros(n, n); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.mats.len()
    }

    pub fn is_zero(&self) -> bool {
        self.mats.iter().all(Matrix::is_zero)
    }

    pub fn apply(&self, x: &[Rat]) -> Matrix {
        let n = self.dim();
        Matrix::combination(x, &self.mats, n, n)
    }

    /// `S` as the `(1,2)` tensor `S[c, a, b] = (S_{e_a} e_b)^c`.
    pub fn to_tensor(&self) -> Tensor {
        let n = self.dim();
        let mut t = Tensor::zeros(1, 2, n);
        for (a, m) in self.mats.iter().enumerate() {
            for c in 0..n {
                for b in 0..n {
                    let v = &m[(c, b)];
                    if !v.is_zero() {
                        t.set(&[c, a, b], v.clone());
                    }
                }
            }
        }
        t
    }

    pub fn from_tensor(t: &Tensor) -> Result<Self> {
        if t.valence() != (1, 2) {
            return Err(Error::Tensor("S must be a (1,2) tensor".into()));
        }
        let n = t.dim();
        Ok(Self {
            mats: (0..n)
                .map(|a| Matrix::from_fn(n, n, |c, b| t.get(&[c, a, b]).clone()))
                .collect(),
        })
    }
}

/// Decomposition `so(V) = h ⊕ n` in so coordinates.
pub struct Splitting {
    k: usize,
    n: Subspace,
    inv: Matrix,
}

impl Splitting {
    pub fn new(h: &Subspace, n: &Subspace) -> Result<Self> {
        let m = h.ambient_dim();
        if h.dim() + n.dim() != m {
            return Err(Error::Precondition {
                module: "model",
                reason: "subspaces are not complementary".into(),
            });
        }
        let cols: Vec<&Vec<Rat>> = h.basis().iter().chain(n.basis()).collect();
        let b = Matrix::from_fn(m, m, |i, j| cols[j][i].clone());
        let inv = b.inverse().ok_or_else(|| Error::Precondition {
            module: "model",
            reason: "subspaces intersect".into(),
        })?;
        Ok(Self {
            k: h.dim(),
            n: n.clone(),
            inv,
        })
    }

    /// Component in `n` along `h`.
    pub fn project_n(&self, v: &[Rat]) -> Vec<Rat> {
        let c = self.inv.mul_vec(v);
        self.n.element(&c[self.k..])
    }
}

/// Solves for `A(e_a)` at the pair's shifted system and projects onto `n`.
pub fn compute_s(mu: &MuSystem<'_>, verdict: &ReductivityVerdict) -> Result<SMap> {
    let n_sub = match (&verdict.n, verdict.strongly_reductive) {
        (Some(n), true) => n,
        _ => {
            return Err(Error::Precondition {
                module: "model",
                reason: format!("not strongly reductive at {}", verdict.pair),
            })
        }
    };
    let split = Splitting::new(&verdict.h, n_sub)?;
    let sols = mu.solve_basis(verdict.pair.r + 1, verdict.pair.s + 1)?;
    let space = &mu.data().space;
    let mut mats = Vec::with_capacity(sols.len());
    for (a, sol) in sols.into_iter().enumerate() {
        let coords = sol.ok_or_else(|| Error::Infeasible {
            module: "model",
            reason: format!("no A with i_x R^(i+1) = A.R^i for basis vector {a}"),
        })?;
        mats.push(space.so_element(&split.project_n(&coords)));
    }
    Ok(SMap { mats })
}

/// Canonical solution `A(e_a)` of the system at `(r, s)` without projection.
pub fn solve_a(mu: &MuSystem<'_>, r: i32, s: i32) -> Result<SMap> {
    let space = &mu.data().space;
    let sols = mu.solve_basis(r, s)?;
    let mats = sols
        .into_iter()
        .enumerate()
        .map(|(a, sol)| {
            sol.map(|c| space.so_element(&c))
                .ok_or_else(|| Error::Infeasible {
                    module: "model",
                    reason: format!("system at ({r},{s}) inconsistent for basis vector {a}"),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SMap { mats })
}

/// Appends `R^{r+2}` defined by `i_x R^{r+2} = A(x)·R^{r+1}`, where `A(x)`
/// solves the system at `(r, s)`. Requires `d.r = r - 1` and
/// `ker mu_{r,s} = ker mu_{r+1,s}`, which makes the result independent of
/// the choice of `A(x)`.
pub fn complete_curvature(d: &InfinitesimalData, r: i32, s: i32) -> Result<InfinitesimalData> {
    if d.r != r - 1 {
        return Err(Error::Precondition {
            module: "model",
            reason: format!("completion at r={r} needs data with r={}", r - 1),
        });
    }
    let mu = MuSystem::new(d);
    if mu.kernel(r, s)? != mu.kernel_stored(r + 1, s)? {
        return Err(Error::Precondition {
            module: "model",
            reason: format!("ker mu_({r},{s}) does not annihilate R^{}", r + 1),
        });
    }
    let a = solve_a(&mu, r, s)?;
    let top = &d.curvature[(r + 1) as usize];
    let parts = a
        .mats
        .par_iter()
        .map(|m| top.derivation_action(m))
        .collect::<Result<Vec<_>>>()?;
    let mut out = d.clone();
    out.curvature.push(Tensor::stack_derivative(&parts)?);
    out.r = r;
    out.check_shapes()?;
    Ok(out)
}

/// Torsion, curvature and structure tensor of a canonical connection at a point.
///
/// `t[c, a, b] = (T_{e_a} e_b)^c`, `k[d, a, b, c] = (K_{e_a e_b} e_c)^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfinitesimalModel {
    pub space: MetricSpace,
    pub t: Tensor,
    pub k: Tensor,
    pub p: Option<Tensor>,
}

impl InfinitesimalModel {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `T_{e_a} e_b`
    pub fn torsion_vec(&self, a: usize, b: usize) -> Vec<Rat> {
        (0..self.dim())
            .map(|c| self.t.get(&[c, a, b]).clone())
            .collect()
    }

    /// `T_{e_a}` as a matrix.
    pub fn torsion_endo(&self, a: usize) -> Matrix {
        let n = self.dim();
        Matrix::from_fn(n, n, |c, b| self.t.get(&[c, a, b]).clone())
    }

    /// `K_{e_a e_b}` as a matrix.
    pub fn curvature_endo(&self, a: usize, b: usize) -> Matrix {
        let n = self.dim();
        Matrix::from_fn(n, n, |d, c| self.k.get(&[d, a, b, c]).clone())
    }

    pub fn curvature_endos(&self) -> Vec<Matrix> {
        let n = self.dim();
        (0..n * n)
            .map(|ab| self.curvature_endo(ab / n, ab % n))
            .collect()
    }

    /// `K_{x y}` for arbitrary vectors.
    pub fn curvature_at(&self, x: &[Rat], y: &[Rat]) -> Matrix {
        let n = self.dim();
        let mut out = Matrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let c = &x[a] * &y[b];
                if !c.is_zero() {
                    out = out.add(&self.curvature_endo(a, b).scale(&c));
                }
            }
        }
        out
    }

    /// Tensors annihilated by the isotropy algebra: `T`, `K` and `P`.
    pub fn invariant_tensors(&self) -> Vec<&Tensor> {
        let mut v = vec![&self.t, &self.k];
        if let Some(p) = &self.p {
            v.push(p);
        }
        v
    }
}

/// `T_XY = S_Y X - S_X Y`, `K_XY = R^0_XY + [S_X, S_Y] + S_{T_XY}`, `P = P^0`.
pub fn build_model(d: &InfinitesimalData, s: &SMap) -> Result<InfinitesimalModel> {
    let n = d.dim();
    if s.dim() != n {
        return Err(Error::DimensionMismatch {
            context: "build_model",
            expected: n,
            found: s.dim(),
        });
    }
    let mut t = Tensor::zeros(1, 2, n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let v = &s.mats[b][(c, a)] - &s.mats[a][(c, b)];
                if !v.is_zero() {
                    t.set(&[c, a, b], v);
                }
            }
        }
    }
    let r_endos = d.space.curvature_endos(d.r0());
    let blocks: Vec<Matrix> = (0..n * n)
        .into_par_iter()
        .map(|ab| {
            let (a, b) = (ab / n, ab % n);
            let txy: Vec<Rat> = (0..n).map(|c| t.get(&[c, a, b]).clone()).collect();
            r_endos[ab]
                .add(&s.mats[a].commutator(&s.mats[b]))
                .add(&s.apply(&txy))
        })
        .collect();
    let mut k = Tensor::zeros(1, 3, n);
    for (ab, m) in blocks.iter().enumerate() {
        let (a, b) = (ab / n, ab % n);
        for dd in 0..n {
            for c in 0..n {
                let v = &m[(dd, c)];
                if !v.is_zero() {
                    k.set(&[dd, a, b, c], v.clone());
                }
            }
        }
    }
    Ok(InfinitesimalModel {
        space: d.space.clone(),
        t,
        k,
        p: d.structure_tensors().first().cloned(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub name: String,
    pub description: String,
    pub passed: bool,
    pub skipped: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn axiom(name: &str, description: &str, witness: Option<Vec<usize>>) -> AxiomCheck {
    AxiomCheck {
        name: name.into(),
        description: description.into(),
        passed: witness.is_none(),
        skipped: false,
        witness,
    }
}

fn first_tuple(n: usize, k: usize, f: impl Fn(&[usize]) -> bool + Sync) -> Option<Vec<usize>> {
    let decode = |mut flat: usize| {
        let mut idx = vec![0; k];
        for slot in (0..k).rev() {
            idx[slot] = flat % n;
            flat /= n;
        }
        idx
    };
    (0..n.pow(k as u32))
        .into_par_iter()
        .find_first(|&f_| !f(&decode(f_)))
        .map(decode)
}

/// Checks the eight defining identities of an infinitesimal model exactly.
/// The structure-tensor identity is skipped (and counted as passed) when
/// `P` is absent.
pub fn verify_model(m: &InfinitesimalModel) -> AxiomReport {
    let n = m.dim();
    let (t, k) = (&m.t, &m.k);
    let g = m.space.g();
    let kendos = m.curvature_endos();
    let lowered = |a: usize, b: usize, c: usize, w: usize| -> Rat {
        (0..n).map(|d| k.get(&[d, a, b, c]) * &g[(d, w)]).sum()
    };
    // (T_{T_ab} e_c)^d = sum_e T^e_ab T^d_ec
    let tt = |a: usize, b: usize, c: usize, d: usize| -> Rat {
        (0..n).map(|e| t.get(&[e, a, b]) * t.get(&[d, e, c])).sum()
    };
    // (K_{T_ab, c} e_f)^d = sum_e T^e_ab K^d_ecf
    let kt = |a: usize, b: usize, c: usize, d: usize, f: usize| -> Rat {
        (0..n)
            .map(|e| t.get(&[e, a, b]) * k.get(&[d, e, c, f]))
            .sum()
    };
    let annihilates = |target: &Tensor| {
        first_tuple(n, 2, |ab| {
            target
                .derivation_action(&kendos[ab[0] * n + ab[1]])
                .expect("dimensions agree")
                .is_zero()
        })
    };

    let mut checks = vec![
        axiom(
            "torsion-skew",
            "T_xy + T_yx = 0",
            first_tuple(n, 3, |i| {
                (t.get(&[i[2], i[0], i[1]]) + t.get(&[i[2], i[1], i[0]])).is_zero()
            }),
        ),
        axiom(
            "curvature-skew",
            "K_xy z + K_yx z = 0",
            first_tuple(n, 4, |i| {
                (k.get(&[i[3], i[0], i[1], i[2]]) + k.get(&[i[3], i[1], i[0], i[2]])).is_zero()
            }),
        ),
        axiom(
            "curvature-metric",
            "<K_xy z, w> + <K_wz x, y> = 0",
            first_tuple(n, 4, |i| {
                (lowered(i[0], i[1], i[2], i[3]) + lowered(i[3], i[2], i[0], i[1])).is_zero()
            }),
        ),
        axiom(
            "curvature-preserves-torsion",
            "K_xy . T = 0",
            annihilates(t),
        ),
        axiom(
            "curvature-preserves-curvature",
            "K_xy . K = 0",
            annihilates(k),
        ),
    ];
    match &m.p {
        Some(p) => checks.push(axiom(
            "curvature-preserves-structure",
            "K_xy . P = 0",
            annihilates(p),
        )),
        None => checks.push(AxiomCheck {
            name: "curvature-preserves-structure".into(),
            description: "K_xy . P = 0 (no structure tensor)".into(),
            passed: true,
            skipped: true,
            witness: None,
        }),
    }
    checks.push(axiom(
        "first-bianchi",
        "cyclic sum over x,y,z of K_xy z + T_{T_xy} z vanishes",
        first_tuple(n, 4, |i| {
            let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
            let term = |a: usize, b: usize, c: usize| k.get(&[d, a, b, c]) + tt(a, b, c, d);
            (term(a, b, c) + term(b, c, a) + term(c, a, b)).is_zero()
        }),
    ));
    checks.push(axiom(
        "second-bianchi",
        "cyclic sum over x,y,z of K_{T_xy z} vanishes",
        first_tuple(n, 5, |i| {
            let (a, b, c, d, f) = (i[0], i[1], i[2], i[3], i[4]);
            (kt(a, b, c, d, f) + kt(b, c, a, d, f) + kt(c, a, b, d, f)).is_zero()
        }),
    ));
    AxiomReport { checks }
}

/// `[A, S_x] = S_{A x}` for every `A` in `h` and basis vector `x`. Returns the
/// first failing `(index of A, x)`.
pub fn check_equivariance(s: &SMap, h: &[Matrix]) -> Option<(usize, usize)> {
    let n = s.dim();
    for (i, a) in h.iter().enumerate() {
        for x in 0..n {
            let ax = a.column(x);
            if a.commutator(&s.mats[x]) != s.apply(&ax) {
                return Some((i, x));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::fixtures;
    use crate::filtration::StabilizingPair;
    use crate::linalg::int;
    use crate::reductivity::decide_strong_reductivity;

    #[test]
    fn space_form_model() {
        let d = fixtures::constant_curvature(1, 3, &int(-1)).unwrap();
        let mu = MuSystem::new(&d);
        let v = decide_strong_reductivity(&mu, StabilizingPair { r: -1, s: -1 }).unwrap();
        let s = compute_s(&mu, &v).unwrap();
        assert!(s.is_zero());
        let m = build_model(&d, &s).unwrap();
        assert!(m.t.is_zero());
        assert!(verify_model(&m).passed());
        // K_xy z = -(g(x,z) y - g(y,z) x)
        let g = d.space.g();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for e in 0..4 {
                        let mut want = Rat::zero();
                        if e == b {
                            want -= &g[(a, c)];
                        }
                        if e == a {
                            want += &g[(b, c)];
                        }
                        assert_eq!(m.k.get(&[e, a, b, c]), &want);
                    }
                }
            }
        }
    }

    #[test]
    fn perturbed_curvature_breaks_bianchi() {
        let d = fixtures::constant_curvature(1, 2, &int(1)).unwrap();
        let mut m = build_model(&d, &SMap::zero(3)).unwrap();
        m.k.add_at(&[2, 0, 1, 2], &int(1));
        m.k.add_at(&[2, 1, 0, 2], &int(-1));
        let report = verify_model(&m);
        let bianchi = report
            .checks
            .iter()
            .find(|c| c.name == "first-bianchi")
            .unwrap();
        assert!(!bianchi.passed);
        assert!(bianchi.witness.is_some());
    }

    #[test]
    fn b3_has_no_s() {
        let d = fixtures::b3();
        let mu = MuSystem::new(&d);
        let v = decide_strong_reductivity(&mu, StabilizingPair { r: 0, s: -1 }).unwrap();
        assert!(matches!(
            compute_s(&mu, &v),
            Err(Error::Precondition { .. })
        ));
    }
}
