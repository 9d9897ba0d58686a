//! Built-in example data sets.

use num_traits::Zero;

use super::{InfinitesimalData, Structure};
use crate::error::{Error, Result};
use crate::linalg::{int, Matrix, Rat};
use crate::tensor::{MetricSpace, Tensor};

fn metric_from(n: usize, entries: &[(usize, usize, i64)]) -> Matrix {
    let mut g = Matrix::zeros(n, n);
    for &(i, j, v) in entries {
        g[(i, j)] = int(v);
        g[(j, i)] = int(v);
    }
    g
}

/// Space form of curvature `c` in signature `(plus, minus)`, stored with
/// `r = 0` and vanishing derivatives.
pub fn constant_curvature(plus: usize, minus: usize, c: &Rat) -> Result<InfinitesimalData> {
    let n = plus + minus;
    if n < 2 {
        return Err(Error::Precondition {
            module: "fixtures",
            reason: format!("dimension {n} is below 2"),
        });
    }
    let space = MetricSpace::diagonal(plus, minus);
    let r0 = space.constant_curvature(c);
    InfinitesimalData::new(
        space,
        0,
        -1,
        vec![r0, Tensor::zeros(0, 5, n), Tensor::zeros(0, 6, n)],
        None,
    )
}

/// Locally symmetric split-signature metric on `R^4` at the origin:
/// `g = 2(dy1 dy4 - dy2 dy3) + dy2^2`, the only independent curvature
/// component being `R_{1212} = -3`, with `∇R = 0`.
pub fn b3() -> InfinitesimalData {
    let g = metric_from(4, &[(0, 3, 1), (1, 2, -1), (1, 1, 1)]);
    let space = MetricSpace::with_signature(g, 2, 2).expect("b3 metric is valid");
    let mut r0 = Tensor::zeros(0, 4, 4);
    r0.set(&[0, 1, 0, 1], int(-3));
    r0.set(&[1, 0, 1, 0], int(-3));
    r0.set(&[1, 0, 0, 1], int(3));
    r0.set(&[0, 1, 1, 0], int(3));
    InfinitesimalData::new(
        space,
        0,
        -1,
        vec![r0, Tensor::zeros(0, 5, 4), Tensor::zeros(0, 6, 4)],
        None,
    )
    .expect("b3 shapes")
}

/// Prefix `form ⊗ t` for a covector `form`.
fn with_covector(form: &[Rat], t: &Tensor) -> Tensor {
    let parts: Vec<Tensor> = form.iter().map(|c| t.scale(c)).collect();
    Tensor::stack_derivative(&parts).expect("covariant parts of equal shape")
}

/// Pseudo-Kähler data in coordinates `(w1, w2, z1, z2)` with
/// `g = dw^k dz^k + b (dw^1)^2 + b (dw^2)^2`, `R = dw1∧dw2 ⊗ dw1∧dw2`,
/// `∇R = 4 dw1 ⊗ R`, `∇²R = (20 dw1⊗dw1 - 4 dw2⊗dw2) ⊗ R`, standard complex
/// structure `J` with `∇J = 0`.
///
/// Stored with `r = 0` (curvature through `∇²R`). With `structure_order`
/// equal to `Some(s)` the complex structure is included with `s` in `{-1, 0}`
/// and all its derivatives zero.
pub fn pseudo_kahler_base(b: &Rat, structure_order: Option<i32>) -> Result<InfinitesimalData> {
    let n = 4;
    let mut g = metric_from(n, &[(0, 2, 1), (1, 3, 1)]);
    g[(0, 0)] = b.clone();
    g[(1, 1)] = b.clone();
    let space = MetricSpace::with_signature(g, 2, 2)?;

    let mut r0 = Tensor::zeros(0, 4, n);
    r0.set(&[0, 1, 0, 1], int(1));
    r0.set(&[0, 1, 1, 0], int(-1));
    r0.set(&[1, 0, 0, 1], int(-1));
    r0.set(&[1, 0, 1, 0], int(1));

    let dw1 = [int(1), int(0), int(0), int(0)];
    let r1 = with_covector(&dw1, &r0).scale(&int(4));
    let mut inner = Tensor::zeros(0, 2, n);
    inner.set(&[0, 0], int(20));
    inner.set(&[1, 1], int(-4));
    let r2 = inner.tensor_product(&r0)?;

    let structure = match structure_order {
        None => None,
        Some(s) if s == -1 || s == 0 => {
            let mut j = Matrix::zeros(n, n);
            j[(1, 0)] = int(1);
            j[(0, 1)] = int(-1);
            j[(3, 2)] = int(1);
            j[(2, 3)] = int(-1);
            let mut tensors = vec![Tensor::from_endo(&j)];
            for k in 1..(s + 3) as usize {
                tensors.push(Tensor::zeros(1, 1 + k, n));
            }
            Some((
                s,
                Structure {
                    valence: (1, 1),
                    tensors,
                },
            ))
        }
        Some(s) => {
            return Err(Error::Precondition {
                module: "fixtures",
                reason: format!("structure order {s} not supported, use -1 or 0"),
            })
        }
    };
    let (s, structure) = match structure {
        Some((s, p)) => (s, Some(p)),
        None => (-1, None),
    };
    InfinitesimalData::new(space, 0, s, vec![r0, r1, r2], structure)
}

/// [`pseudo_kahler_base`] extended by `∇³R`. The new tensor is generated
/// from the lower orders through the pair `(1, 0)` with the complex structure
/// present (see [`crate::model::complete_curvature`]), whatever structure
/// order is requested for the result.
pub fn pseudo_kahler(b: &Rat, structure_order: Option<i32>) -> Result<InfinitesimalData> {
    let full = crate::model::complete_curvature(&pseudo_kahler_base(b, Some(0))?, 1, 0)?;
    let mut out = pseudo_kahler_base(b, structure_order)?;
    out.curvature = full.curvature;
    out.r = full.r;
    out.check_shapes()?;
    Ok(out)
}

/// Flat data of the given signature with all derivatives zero.
pub fn flat(plus: usize, minus: usize) -> Result<InfinitesimalData> {
    constant_curvature(plus, minus, &Rat::zero())
}
