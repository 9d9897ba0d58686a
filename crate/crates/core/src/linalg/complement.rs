use num_traits::{One, Zero};

use super::matrix::{Echelon, Matrix};
use super::rat::Rat;
use super::subspace::Subspace;
use crate::error::{Error, Result};

/// Finds a complement `n` of `h` with `h ⊕ n` the whole ambient space and
/// `a(n) ⊆ n` for every action matrix `a`.
///
/// The unknown is a `k x d` matrix `C` (k = dim h) with `C·B = I` on the basis
/// `B` of `h` and `ã·C = C·a` for each action, `ã` the restriction of `a` to `h`.
/// Then `B·C` is an equivariant projection onto `h` and `n = ker C`.
/// Returns `Ok(None)` when no such projection exists.
pub fn invariant_complement(h: &Subspace, actions: &[Matrix]) -> Result<Option<Subspace>> {
    let d = h.ambient_dim();
    let k = h.dim();
    let mut restricted = Vec::with_capacity(actions.len());
    for (index, a) in actions.iter().enumerate() {
        if a.rows() != d || a.cols() != d {
            return Err(Error::DimensionMismatch {
                context: "invariant_complement",
                expected: d,
                found: a.rows().max(a.cols()),
            });
        }
        restricted.push(h.restrict(a).ok_or(Error::ActionNotInvariant { index })?);
    }

    let unknowns = k * d;
    let var = |i: usize, m: usize| i * d + m;
    let mut ech = Echelon::with_pivot_limit(unknowns + 1, unknowns);

    // C·B = I
    for i in 0..k {
        for j in 0..k {
            let mut row = vec![Rat::zero(); unknowns + 1];
            for m in 0..d {
                row[var(i, m)] = h.basis()[j][m].clone();
            }
            if i == j {
                row[unknowns] = Rat::one();
            }
            ech.push(row);
        }
    }

    // ã·C − C·a = 0
    for (a, at) in actions.iter().zip(&restricted) {
        for i in 0..k {
            for m in 0..d {
                let mut row = vec![Rat::zero(); unknowns + 1];
                for l in 0..k {
                    if !at[(i, l)].is_zero() {
                        row[var(l, m)] += &at[(i, l)];
                    }
                }
                for l in 0..d {
                    if !a[(l, m)].is_zero() {
                        row[var(i, l)] -= &a[(l, m)];
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    ech.push(row);
                }
            }
        }
    }

    let Some(x) = ech.particular_solution(0) else {
        return Ok(None);
    };
    let c = Matrix::from_entries(k, d, x)?;
    Ok(Some(c.kernel()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat::int;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn trivial_cases() {
        let a = m(&[&[1, 2], &[0, 3]]);
        let n = invariant_complement(&Subspace::full(2), std::slice::from_ref(&a))
            .unwrap()
            .unwrap();
        assert!(n.is_zero());
        let n = invariant_complement(&Subspace::zero(2), &[a])
            .unwrap()
            .unwrap();
        assert!(n.is_full());
    }

    #[test]
    fn jordan_block_has_no_invariant_complement() {
        let j = m(&[&[0, 1], &[0, 0]]);
        let h = Subspace::from_vectors(2, vec![vec![int(1), int(0)]]).unwrap();
        assert!(invariant_complement(&h, &[j]).unwrap().is_none());
    }

    #[test]
    fn diagonalizable_action_splits() {
        let a = m(&[&[1, 1], &[0, 2]]);
        let h = Subspace::from_vectors(2, vec![vec![int(1), int(0)]]).unwrap();
        let n = invariant_complement(&h, std::slice::from_ref(&a))
            .unwrap()
            .unwrap();
        assert_eq!(n.dim(), 1);
        assert!(n.is_invariant_under(&a));
        assert!(n.contains(&[int(1), int(1)]));
    }

    #[test]
    fn non_invariant_h_is_an_error() {
        let a = m(&[&[0, 0], &[1, 0]]);
        let h = Subspace::from_vectors(2, vec![vec![int(1), int(0)]]).unwrap();
        assert_eq!(
            invariant_complement(&h, &[a]),
            Err(Error::ActionNotInvariant { index: 0 })
        );
    }
}
