//! Rebuilding infinitesimal data from a model and comparing data sets.

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::data::{InfinitesimalData, Structure};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rat};
use crate::model::{InfinitesimalModel, SMap};
use crate::tensor::{MetricSpace, Tensor};

/// The unique skew-valued `S` with torsion `T`:
/// `2<S_X Y, Z> = -<T_XY, Z> + <T_YZ, X> - <T_ZX, Y>`.
pub fn recover_s_from_t(space: &MetricSpace, t: &Tensor) -> Result<SMap> {
    let n = space.dim();
    if t.valence() != (1, 2) || t.dim() != n {
        return Err(Error::Tensor("torsion must be a (1,2) tensor".into()));
    }
    let g = space.g();
    // low[c][a][b] = <T_{e_a} e_b, e_c>
    let low = |a: usize, b: usize, c: usize| -> Rat {
        (0..n)
            .map(|d| t.get(&[d, a, b]) * &g[(d, c)])
            .fold(Rat::zero(), |acc, v| acc + v)
    };
    let two = Rat::from_integer(2.into());
    let mats = (0..n)
        .into_par_iter()
        .map(|x| {
            let lowered = Matrix::from_fn(n, n, |z, y| {
                (-low(x, y, z) + low(y, z, x) - low(z, x, y)) / &two
            });
            space.g_inv().mul(&lowered)
        })
        .collect();
    Ok(SMap { mats })
}

/// Lowers `out[d][c]` endomorphisms `E_ab` into `R[a][b][c][w] = sum_d g[w][d] E_ab[d][c]`.
fn lower_curvature(space: &MetricSpace, endos: &[Matrix]) -> Tensor {
    let n = space.dim();
    let mut r = Tensor::zeros(0, 4, n);
    for (ab, e) in endos.iter().enumerate() {
        let low = space.g().mul(e); // [w][c]
        for c in 0..n {
            for w in 0..n {
                let v = &low[(w, c)];
                if !v.is_zero() {
                    r.set(&[ab / n, ab % n, c, w], v.clone());
                }
            }
        }
    }
    r
}

fn derivatives(s: &SMap, base: Tensor, count: usize) -> Result<Vec<Tensor>> {
    let mut out = vec![base];
    for _ in 0..count {
        let last = out.last().expect("nonempty");
        let parts = s
            .mats
            .par_iter()
            .map(|m| last.derivation_action(m))
            .collect::<Result<Vec<_>>>()?;
        out.push(Tensor::stack_derivative(&parts)?);
    }
    Ok(out)
}

/// `R^0 = K - [S, S] - S_T` lowered with `g`, then `R^{i+1} = S·R^i` and
/// `P^{j+1} = S·P^j`. Without `s_override`, `S` is recovered from `T`.
pub fn recover_data(
    m: &InfinitesimalModel,
    r: i32,
    s: i32,
    s_override: Option<&SMap>,
) -> Result<InfinitesimalData> {
    let n = m.dim();
    let smap = match s_override {
        Some(x) if x.dim() != n => {
            return Err(Error::DimensionMismatch {
                context: "recover_data",
                expected: n,
                found: x.dim(),
            })
        }
        Some(x) => x.clone(),
        None => recover_s_from_t(&m.space, &m.t)?,
    };
    if r < -1 || s < -1 || (m.p.is_none() && s != -1) {
        return Err(Error::Precondition {
            module: "recovery",
            reason: format!("orders ({r},{s}) incompatible with the model"),
        });
    }
    let endos: Vec<Matrix> = (0..n * n)
        .into_par_iter()
        .map(|ab| {
            let (a, b) = (ab / n, ab % n);
            m.curvature_endo(a, b)
                .sub(&smap.mats[a].commutator(&smap.mats[b]))
                .sub(&smap.apply(&m.torsion_vec(a, b)))
        })
        .collect();
    let r0 = lower_curvature(&m.space, &endos);
    let curvature = derivatives(&smap, r0, (r + 2) as usize)?;
    let structure = match &m.p {
        None => None,
        Some(p) => Some(Structure {
            valence: p.valence(),
            tensors: derivatives(&smap, p.clone(), (s + 2) as usize)?,
        }),
    };
    InfinitesimalData::new(m.space.clone(), r, s, curvature, structure)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub equal: bool,
    /// Name of the first differing tensor (`R^i`, `P^j`, `g`) and index.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_difference: Option<(String, Vec<usize>)>,
}

impl Comparison {
    fn diff(name: String, idx: Vec<usize>) -> Self {
        Self {
            equal: false,
            first_difference: Some((name, idx)),
        }
    }
}

/// Compares `d1` with `F^* d2`, or with `d2` itself when `f` is `None`.
/// `F` must be an isometry from `(V, g1)` to `(V, g2)`.
pub fn compare_data(
    d1: &InfinitesimalData,
    d2: &InfinitesimalData,
    f: Option<&Matrix>,
) -> Result<Comparison> {
    if d1.dim() != d2.dim() {
        return Err(Error::DimensionMismatch {
            context: "compare_data",
            expected: d1.dim(),
            found: d2.dim(),
        });
    }
    if d1.r != d2.r || d1.s != d2.s || d1.has_structure() != d2.has_structure() {
        return Err(Error::Precondition {
            module: "recovery",
            reason: format!("orders differ: ({},{}) vs ({},{})", d1.r, d1.s, d2.r, d2.s),
        });
    }
    let pulled;
    let other = match f {
        None => d2,
        Some(f) => {
            if f.transpose().mul(d2.space.g()).mul(f) != *d1.space.g() {
                return Err(Error::Precondition {
                    module: "recovery",
                    reason: "comparison map is not an isometry".into(),
                });
            }
            pulled = d2.pullback(f)?;
            &pulled
        }
    };
    if d1.space.g() != other.space.g() {
        let i = (0..d1.dim() * d1.dim())
            .find(|&k| {
                let (a, b) = (k / d1.dim(), k % d1.dim());
                d1.space.g()[(a, b)] != other.space.g()[(a, b)]
            })
            .expect("metrics differ");
        return Ok(Comparison::diff(
            "g".into(),
            vec![i / d1.dim(), i % d1.dim()],
        ));
    }
    for (i, (a, b)) in d1.curvature.iter().zip(&other.curvature).enumerate() {
        if let Some(idx) = a.first_difference(b) {
            return Ok(Comparison::diff(format!("R^{i}"), idx));
        }
    }
    for (j, (a, b)) in d1
        .structure_tensors()
        .iter()
        .zip(other.structure_tensors())
        .enumerate()
    {
        if let Some(idx) = a.first_difference(b) {
            return Ok(Comparison::diff(format!("P^{j}"), idx));
        }
    }
    Ok(Comparison {
        equal: true,
        first_difference: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::fixtures;
    use crate::linalg::int;
    use crate::model::build_model;

    #[test]
    fn space_form_round_trip() {
        let d = fixtures::constant_curvature(2, 1, &int(3)).unwrap();
        let m = build_model(&d, &SMap::zero(3)).unwrap();
        let back = recover_data(&m, d.r, d.s, None).unwrap();
        assert!(compare_data(&d, &back, None).unwrap().equal);
    }

    #[test]
    fn s_from_t_inverts_torsion() {
        let space = MetricSpace::diagonal(2, 1);
        let mut s = SMap::zero(3);
        s.mats[0] = space.so_basis()[0].clone();
        s.mats[2] = space.so_basis()[2].scale(&int(5));
        let d = fixtures::flat(2, 1).unwrap();
        let m = build_model(&d, &s).unwrap();
        assert_eq!(recover_s_from_t(&space, &m.t).unwrap(), s);
    }

    #[test]
    fn difference_is_located() {
        let d = fixtures::constant_curvature(2, 0, &int(1)).unwrap();
        let e = fixtures::constant_curvature(2, 0, &int(2)).unwrap();
        let c = compare_data(&d, &e, None).unwrap();
        assert!(!c.equal);
        assert_eq!(c.first_difference.unwrap().0, "R^0");
    }
}
