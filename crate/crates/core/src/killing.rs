//! Infinitesimal Killing generators: pairs `(X, A)` in `V ⊕ so(V)` with
//! `A·R^i + i_X R^{i+1} = 0` and `A·P^j + i_X P^{j+1} = 0`.

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::data::InfinitesimalData;
use crate::error::Result;
use crate::linalg::{Echelon, Matrix, Rat, Subspace};
use crate::model::SMap;
use crate::nomizu::{BasisLabel, LieAlgebra};
use crate::tensor::Tensor;

/// Coordinates are `(X^1..X^n, a_1..a_m)` with `A = sum a_k E_k` over the so basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KillingSpace {
    pub dim_v: usize,
    pub generators: Subspace,
    /// Conditions imposed on curvature for `i <= r_imposed`.
    pub r_imposed: i32,
    /// Conditions imposed on the structure tensor for `j <= s_imposed`, if any.
    pub s_imposed: Option<i32>,
    /// Dropping the top condition family leaves the space unchanged.
    pub apparently_stabilized: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureReport {
    pub closed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_pair: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jacobi: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jacobi_witness: Option<(usize, usize, usize)>,
}

impl KillingSpace {
    pub fn dim(&self) -> usize {
        self.generators.dim()
    }

    /// `{A : (0, A) is a generator}` in so coordinates.
    pub fn isotropy_slice(&self) -> Result<Subspace> {
        let n = self.dim_v;
        let total = self.generators.ambient_dim();
        let rot = Subspace::from_vectors(
            total,
            (n..total)
                .map(|i| {
                    let mut v = vec![Rat::zero(); total];
                    v[i] = num_traits::One::one();
                    v
                })
                .collect(),
        )?;
        let both = self.generators.intersect(&rot)?;
        Subspace::from_vectors(
            total - n,
            both.basis().iter().map(|v| v[n..].to_vec()).collect(),
        )
    }

    pub fn split(&self, d: &InfinitesimalData, v: &[Rat]) -> (Vec<Rat>, Matrix) {
        let n = self.dim_v;
        (v[..n].to_vec(), d.space.so_element(&v[n..]))
    }

    pub fn join(&self, d: &InfinitesimalData, x: &[Rat], a: &Matrix) -> Option<Vec<Rat>> {
        let mut v = x.to_vec();
        v.extend(d.space.so_coords(a)?);
        Some(v)
    }

    pub fn contains(&self, d: &InfinitesimalData, x: &[Rat], a: &Matrix) -> bool {
        self.join(d, x, a)
            .is_some_and(|v| self.generators.contains(&v))
    }
}

/// Imposes curvature conditions for `0 <= i <= d.r + 1` and, when
/// `with_structure` holds and `P` is present, structure conditions for
/// `0 <= j <= d.s + 1`.
pub fn compute_killing(d: &InfinitesimalData, with_structure: bool) -> Result<KillingSpace> {
    let n = d.dim();
    let basis = d.space.so_basis();
    let m = basis.len();
    let use_p = with_structure && d.has_structure();

    // (action of so basis on lower tensor, contraction of basis vectors into upper tensor)
    let family = |lower: &Tensor, upper: &Tensor| -> Result<(Vec<Tensor>, Vec<Tensor>)> {
        let acts = basis
            .par_iter()
            .map(|a| lower.derivation_action(a))
            .collect::<Result<Vec<_>>>()?;
        let ints = (0..n)
            .into_par_iter()
            .map(|b| upper.interior_basis(b))
            .collect::<Result<Vec<_>>>()?;
        Ok((acts, ints))
    };
    let mut families = Vec::new();
    for i in 0..=(d.r + 1) as usize {
        families.push((
            family(&d.curvature[i], &d.curvature[i + 1])?,
            i == (d.r + 1) as usize,
        ));
    }
    if use_p {
        let ps = d.structure_tensors();
        for j in 0..=(d.s + 1) as usize {
            families.push((family(&ps[j], &ps[j + 1])?, j == (d.s + 1) as usize));
        }
    }

    let push_family = |ech: &mut Echelon, (acts, ints): &(Vec<Tensor>, Vec<Tensor>)| {
        for f in 0..acts[0].len() {
            if ech.is_full() {
                return;
            }
            let row: Vec<Rat> = ints
                .iter()
                .map(|t| t.comps()[f].clone())
                .chain(acts.iter().map(|t| t.comps()[f].clone()))
                .collect();
            if row.iter().any(|x| !x.is_zero()) {
                ech.push(row);
            }
        }
    };
    let mut ech = Echelon::new(n + m);
    for (fam, top) in &families {
        if !top {
            push_family(&mut ech, fam);
        }
    }
    let before = ech.rank();
    for (fam, top) in &families {
        if *top {
            push_family(&mut ech, fam);
        }
    }
    Ok(KillingSpace {
        dim_v: n,
        apparently_stabilized: ech.rank() == before,
        generators: ech.kernel(),
        r_imposed: d.r + 1,
        s_imposed: use_p.then_some(d.s + 1),
    })
}

/// `[(X, A), (Y, B)] = (AY - BX, R^0_XY + [A, B])`.
pub fn killing_bracket(
    d: &InfinitesimalData,
    (x, a): (&[Rat], &Matrix),
    (y, b): (&[Rat], &Matrix),
) -> Result<(Vec<Rat>, Matrix)> {
    let v: Vec<Rat> = a
        .mul_vec(y)
        .iter()
        .zip(b.mul_vec(x))
        .map(|(p, q)| p - q)
        .collect();
    let e = d.space.curvature_endo(d.r0(), x, y)?.add(&a.commutator(b));
    Ok((v, e))
}

/// The generators as a Lie algebra, when the bracket closes on them.
pub fn killing_algebra(d: &InfinitesimalData, k: &KillingSpace) -> Result<Option<LieAlgebra>> {
    let gens: Vec<(Vec<Rat>, Matrix)> =
        k.generators.basis().iter().map(|v| k.split(d, v)).collect();
    let q = gens.len();
    let mut brackets = vec![vec![vec![Rat::zero(); q]; q]; q];
    for i in 0..q {
        for j in i + 1..q {
            let (v, e) = killing_bracket(d, (&gens[i].0, &gens[i].1), (&gens[j].0, &gens[j].1))?;
            let Some(c) = k.join(d, &v, &e).and_then(|w| k.generators.coordinates(&w)) else {
                return Ok(None);
            };
            brackets[j][i] = c.iter().map(|x| -x.clone()).collect();
            brackets[i][j] = c;
        }
    }
    let labels = (0..q).map(BasisLabel::Translation).collect();
    LieAlgebra::from_brackets(labels, brackets).map(Some)
}

pub fn verify_closure(d: &InfinitesimalData, k: &KillingSpace) -> Result<ClosureReport> {
    let gens: Vec<(Vec<Rat>, Matrix)> =
        k.generators.basis().iter().map(|v| k.split(d, v)).collect();
    let q = gens.len();
    for i in 0..q {
        for j in i + 1..q {
            let (v, e) = killing_bracket(d, (&gens[i].0, &gens[i].1), (&gens[j].0, &gens[j].1))?;
            if !k.contains(d, &v, &e) {
                return Ok(ClosureReport {
                    closed: false,
                    failing_pair: Some((i, j)),
                    jacobi: None,
                    jacobi_witness: None,
                });
            }
        }
    }
    let alg = killing_algebra(d, k)?.expect("closure checked above");
    let witness = alg.jacobi_failure();
    Ok(ClosureReport {
        closed: true,
        failing_pair: None,
        jacobi: Some(witness.is_none()),
        jacobi_witness: witness,
    })
}

/// `X + A ↦ (-X, S_X + A)` from the Nomizu algebra into `V ⊕ so(V)`.
pub fn psi(s: &SMap, x: &[Rat], a: &Matrix) -> (Vec<Rat>, Matrix) {
    (x.iter().map(|v| -v.clone()).collect(), s.apply(x).add(a))
}

/// `X + A ↦ (X, S_X + A)`.
pub fn phi_direct(s: &SMap, x: &[Rat], a: &Matrix) -> (Vec<Rat>, Matrix) {
    (x.to_vec(), s.apply(x).add(a))
}

/// First Nomizu basis element (isotropy first, then `e_1..e_n`) whose image
/// under `map` is not a Killing generator.
pub fn image_failure(
    d: &InfinitesimalData,
    k: &KillingSpace,
    s: &SMap,
    h0: &[Matrix],
    map: fn(&SMap, &[Rat], &Matrix) -> (Vec<Rat>, Matrix),
) -> Option<usize> {
    let n = d.dim();
    let zero_v = vec![Rat::zero(); n];
    let zero_a = Matrix::zeros(n, n);
    let iso = h0.iter().map(|a| map(s, &zero_v, a));
    let trans = (0..n).map(|b| {
        let mut e = zero_v.clone();
        e[b] = num_traits::One::one();
        map(s, &e, &zero_a)
    });
    iso.chain(trans).position(|(x, a)| !k.contains(d, &x, &a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::fixtures;
    use crate::linalg::int;

    #[test]
    fn space_form_has_maximal_symmetry() {
        let d = fixtures::constant_curvature(3, 1, &int(2)).unwrap();
        let k = compute_killing(&d, true).unwrap();
        assert_eq!(k.dim(), 10);
        assert!(k.apparently_stabilized);
        let c = verify_closure(&d, &k).unwrap();
        assert!(c.closed);
        assert_eq!(c.jacobi, Some(true));
    }

    #[test]
    fn b3_generators() {
        let d = fixtures::b3();
        let k = compute_killing(&d, true).unwrap();
        assert_eq!(k.dim(), 8);
        assert!(verify_closure(&d, &k).unwrap().closed);
        let mu = crate::filtration::MuSystem::new(&d);
        assert_eq!(k.isotropy_slice().unwrap(), mu.kernel(1, -1).unwrap());
    }

    #[test]
    fn zero_s_maps_are_inclusions() {
        let d = fixtures::flat(2, 0).unwrap();
        let k = compute_killing(&d, true).unwrap();
        let s = SMap::zero(2);
        let h0 = d.space.so_basis().to_vec();
        assert_eq!(image_failure(&d, &k, &s, &h0, psi), None);
        assert_eq!(image_failure(&d, &k, &s, &h0, phi_direct), None);
    }
}
