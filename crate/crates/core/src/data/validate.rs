//! Exact componentwise check of the algebraic identities satisfied by the
//! curvature, the structure tensor and their covariant derivatives.

use rayon::prelude::*;
use serde::Serialize;

use super::InfinitesimalData;
use crate::linalg::Rat;
use crate::tensor::Tensor;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub description: String,
    pub passed: bool,
    /// Index tuple at which the identity fails, in the identity's own slot order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<IdentityCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn check(name: impl Into<String>, description: &str, witness: Option<Vec<usize>>) -> IdentityCheck {
    IdentityCheck {
        name: name.into(),
        description: description.to_string(),
        passed: witness.is_none(),
        witness,
    }
}

fn decode(mut flat: usize, n: usize, k: usize) -> Vec<usize> {
    let mut idx = vec![0; k];
    for slot in (0..k).rev() {
        idx[slot] = flat % n;
        flat /= n;
    }
    idx
}

/// First index tuple over `[0, n)^k` where `f` returns false.
fn find_failure(n: usize, k: usize, f: impl Fn(&[usize]) -> bool + Sync) -> Option<Vec<usize>> {
    (0..n.pow(k as u32))
        .into_par_iter()
        .find_first(|&flat| !f(&decode(flat, n, k)))
        .map(|flat| decode(flat, n, k))
}

fn sum3(a: &Rat, b: &Rat, c: &Rat) -> Rat {
    a + b + c
}

/// Checks every identity family on the stored tensors. The commutation
/// identities are checked for `R^{i+2}` with `0 <= i <= r` and for `P^{j+2}`
/// with `0 <= j <= s`.
pub fn validate_identities(d: &InfinitesimalData) -> ValidationReport {
    let n = d.dim();
    let r0 = d.r0();
    let mut checks = Vec::new();

    checks.push(check(
        "r0-skew",
        "R^0_{xyzw} = -R^0_{yxzw}",
        find_failure(n, 4, |i| {
            *r0.get(&[i[0], i[1], i[2], i[3]]) == -r0.get(&[i[1], i[0], i[2], i[3]]).clone()
        }),
    ));
    checks.push(check(
        "r0-pair-symmetry",
        "R^0_{xyzw} = R^0_{zwxy}",
        find_failure(n, 4, |i| {
            r0.get(&[i[0], i[1], i[2], i[3]]) == r0.get(&[i[2], i[3], i[0], i[1]])
        }),
    ));
    checks.push(check(
        "r0-bianchi",
        "cyclic sum over x,y,z of R^0_{xyzw} vanishes",
        find_failure(n, 4, |i| {
            let (x, y, z, w) = (i[0], i[1], i[2], i[3]);
            num_traits::Zero::is_zero(&sum3(
                r0.get(&[x, y, z, w]),
                r0.get(&[y, z, x, w]),
                r0.get(&[z, x, y, w]),
            ))
        }),
    ));

    if let Some(r1) = d.curvature.get(1) {
        checks.push(check(
            "r1-symmetries",
            "R^1_{xyzvw} = -R^1_{xzyvw} = R^1_{xvwyz}",
            find_failure(n, 5, |i| {
                let (x, y, z, v, w) = (i[0], i[1], i[2], i[3], i[4]);
                let a = r1.get(&[x, y, z, v, w]);
                *a == -r1.get(&[x, z, y, v, w]).clone() && a == r1.get(&[x, v, w, y, z])
            }),
        ));
        checks.push(check(
            "r1-first-bianchi",
            "cyclic sum over y,z,v of R^1_{xyzvw} vanishes",
            find_failure(n, 5, |i| {
                let (x, y, z, v, w) = (i[0], i[1], i[2], i[3], i[4]);
                num_traits::Zero::is_zero(&sum3(
                    r1.get(&[x, y, z, v, w]),
                    r1.get(&[x, z, v, y, w]),
                    r1.get(&[x, v, y, z, w]),
                ))
            }),
        ));
        checks.push(check(
            "r1-second-bianchi",
            "cyclic sum over x,y,z of R^1_{xyzvw} vanishes",
            find_failure(n, 5, |i| {
                let (x, y, z, v, w) = (i[0], i[1], i[2], i[3], i[4]);
                num_traits::Zero::is_zero(&sum3(
                    r1.get(&[x, y, z, v, w]),
                    r1.get(&[y, z, x, v, w]),
                    r1.get(&[z, x, y, v, w]),
                ))
            }),
        ));
    }

    let endos = d.space.curvature_endos(r0);
    for i in 0..=d.r.max(-1) {
        let i = i as usize;
        if let (Some(top), Some(base)) = (d.curvature.get(i + 2), d.curvature.get(i)) {
            checks.push(check(
                format!("ricci-r{i}"),
                "R^{i+2}_{yx} - R^{i+2}_{xy} = R^0_{xy} . R^i",
                ricci_failure(top, base, &endos, n),
            ));
        }
    }
    if d.s >= 0 {
        let ps = d.structure_tensors();
        for j in 0..=d.s as usize {
            if let (Some(top), Some(base)) = (ps.get(j + 2), ps.get(j)) {
                checks.push(check(
                    format!("ricci-p{j}"),
                    "P^{j+2}_{yx} - P^{j+2}_{xy} = R^0_{xy} . P^j",
                    ricci_failure(top, base, &endos, n),
                ));
            }
        }
    }
    ValidationReport { checks }
}

/// Witness is `(x, y)` followed by the first differing index of the tensors.
fn ricci_failure(
    top: &Tensor,
    base: &Tensor,
    endos: &[crate::linalg::Matrix],
    n: usize,
) -> Option<Vec<usize>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
        .collect();
    pairs
        .par_iter()
        .map(|&(x, y)| {
            let t_x = top.interior_basis(x).expect("derivative slot");
            let t_y = top.interior_basis(y).expect("derivative slot");
            let t_xy = t_x.interior_basis(y).expect("derivative slot");
            let t_yx = t_y.interior_basis(x).expect("derivative slot");
            let lhs = t_yx.sub(&t_xy).expect("same shape");
            let rhs = base
                .derivation_action(&endos[x * n + y])
                .expect("same dimension");
            lhs.first_difference(&rhs).map(|idx| {
                let mut w = vec![x, y];
                w.extend(idx);
                w
            })
        })
        .find_first(Option::is_some)
        .flatten()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::fixtures;
    use crate::linalg::int;

    #[test]
    fn fixtures_pass() {
        assert!(validate_identities(&fixtures::b3()).passed());
        let cc = fixtures::constant_curvature(1, 3, &int(-1)).unwrap();
        assert!(validate_identities(&cc).passed());
    }

    #[test]
    fn symmetric_first_pair_fails_with_witness() {
        let mut d = fixtures::constant_curvature(2, 0, &int(0)).unwrap();
        d.curvature[0].set(&[0, 1, 0, 1], int(1));
        d.curvature[0].set(&[1, 0, 0, 1], int(1));
        let report = validate_identities(&d);
        let skew = &report.checks[0];
        assert_eq!(skew.name, "r0-skew");
        assert!(!skew.passed);
        assert!(skew.witness.is_some());
    }
}
