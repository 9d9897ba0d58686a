//! Compatibility conditions at a pair `(r, s)` and the strong reductivity
//! decision.

use serde::Serialize;

use crate::data::InfinitesimalData;
use crate::error::{Error, Result};
use crate::filtration::{MuSystem, StabilizingPair};
use crate::linalg::{invariant_complement, Matrix, Subspace};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionOutcome {
    pub passed: bool,
    /// Basis vector index (for the image condition) or the first failing
    /// cell `(r', s')` (for the kernel condition), flattened.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<i32>>,
}

impl ConditionOutcome {
    fn pass() -> Self {
        Self {
            passed: true,
            witness: None,
        }
    }

    fn fail(witness: Vec<i32>) -> Self {
        Self {
            passed: false,
            witness: Some(witness),
        }
    }
}

/// How much of the isotropy group the complement was tested against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvarianceLevel {
    /// Only the Lie algebra `h` acting by `ad`.
    Infinitesimal,
    /// `ad(h)` together with user-supplied group elements.
    WithGroupElements,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductivityVerdict {
    pub pair: StabilizingPair,
    /// `ker mu_{r,s}` in so coordinates.
    pub h: Subspace,
    /// Invariant complement of `h` in so coordinates.
    pub n: Option<Subspace>,
    pub condition_nu: ConditionOutcome,
    pub condition_ker: ConditionOutcome,
    pub strongly_reductive: bool,
    pub invariance: InvarianceLevel,
}

/// Every `nu(e_a) = (i_a R^1..i_a R^{r+2}, i_a P^1..i_a P^{s+2})` lies in the
/// image of `mu_{r+1,s+1}`.
pub fn check_condition_nu(mu: &MuSystem<'_>, pair: StabilizingPair) -> Result<ConditionOutcome> {
    let sols = mu.solve_basis(pair.r + 1, pair.s + 1)?;
    Ok(match sols.iter().position(Option::is_none) {
        None => ConditionOutcome::pass(),
        Some(a) => ConditionOutcome::fail(vec![a as i32]),
    })
}

/// `ker mu_{r,s} = ker mu_{r+1,s} = ker mu_{r,s+1} = ker mu_{r+1,s+1}`.
pub fn check_condition_ker(mu: &MuSystem<'_>, pair: StabilizingPair) -> Result<ConditionOutcome> {
    let (r, s) = (pair.r, pair.s);
    let base = mu.kernel(r, s)?;
    for (dr, ds) in [(1, 0), (0, 1), (1, 1)] {
        if mu.kernel(r + dr, s + ds)? != base {
            return Ok(ConditionOutcome::fail(vec![r + dr, s + ds]));
        }
    }
    Ok(ConditionOutcome::pass())
}

/// Matrix of `X ↦ B X B^{-1}` on so coordinates.
fn group_action(d: &InfinitesimalData, b: &Matrix) -> Result<Matrix> {
    let space = &d.space;
    let binv = b.inverse().ok_or(Error::Singular)?;
    let isometry = b.transpose().mul(space.g()).mul(b) == *space.g();
    if !isometry {
        return Err(Error::Precondition {
            module: "reductivity",
            reason: "supplied group element is not an isometry".into(),
        });
    }
    let m = space.so_dim();
    let mut out = Matrix::zeros(m, m);
    for (j, e) in space.so_basis().iter().enumerate() {
        let c = space
            .so_coords(&b.mul(e).mul(&binv))
            .expect("conjugation by an isometry preserves so(V)");
        for (i, x) in c.into_iter().enumerate() {
            out[(i, j)] = x;
        }
    }
    Ok(out)
}

/// Looks for an `ad(h)`-invariant complement of `h = ker mu_{r,s}` (and
/// invariant under any group elements carried by the data).
pub fn decide_strong_reductivity(
    mu: &MuSystem<'_>,
    pair: StabilizingPair,
) -> Result<ReductivityVerdict> {
    let d = mu.data();
    let condition_ker = check_condition_ker(mu, pair)?;
    if !condition_ker.passed {
        return Err(Error::Precondition {
            module: "reductivity",
            reason: format!("kernel condition fails at {pair}"),
        });
    }
    let condition_nu = check_condition_nu(mu, pair)?;
    let h = mu.kernel(pair.r, pair.s)?;
    let mut actions: Vec<Matrix> = d
        .space
        .so_elements(&h)
        .iter()
        .map(|a| d.space.ad(a))
        .collect();
    for b in &d.group_elements {
        actions.push(group_action(d, b)?);
    }
    let n = invariant_complement(&h, &actions).map_err(|e| match e {
        Error::ActionNotInvariant { index } => Error::Precondition {
            module: "reductivity",
            reason: format!("action {index} does not preserve ker mu at {pair}"),
        },
        other => other,
    })?;
    Ok(ReductivityVerdict {
        pair,
        strongly_reductive: n.is_some(),
        h,
        n,
        condition_nu,
        condition_ker,
        invariance: if d.group_elements.is_empty() {
            InvarianceLevel::Infinitesimal
        } else {
            InvarianceLevel::WithGroupElements
        },
    })
}
