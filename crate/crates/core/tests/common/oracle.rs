//! Brute-force reference computations. Unknowns live in `gl(V)` with
//! skewness imposed as explicit equations, and tensor actions are evaluated
//! index by index.

use homogeneity::data::InfinitesimalData;
use homogeneity::linalg::{rat, Matrix, Rat};
use homogeneity::tensor::{MetricSpace, Tensor};
use num_traits::{One, Zero};

/// Rank by forward elimination into a reduced set of pivot rows.
pub fn rank(rows: impl IntoIterator<Item = Vec<Rat>>) -> usize {
    let mut basis: Vec<(usize, Vec<Rat>)> = Vec::new();
    for mut row in rows {
        for (p, b) in &basis {
            if !row[*p].is_zero() {
                let f = row[*p].clone();
                for (x, y) in row.iter_mut().zip(b) {
                    *x -= &f * y;
                }
            }
        }
        if let Some(p) = row.iter().position(|x| !x.is_zero()) {
            let inv = Rat::one() / &row[p];
            for x in row.iter_mut() {
                *x *= &inv;
            }
            for (_, b) in basis.iter_mut() {
                if !b[p].is_zero() {
                    let f = b[p].clone();
                    for (x, y) in b.iter_mut().zip(&row) {
                        *x -= &f * y;
                    }
                }
            }
            basis.push((p, row));
        }
    }
    basis.len()
}

fn multi(flat: usize, n: usize, k: usize) -> Vec<usize> {
    let mut idx = vec![0; k];
    let mut f = flat;
    for slot in (0..k).rev() {
        idx[slot] = f % n;
        f /= n;
    }
    idx
}

fn flat(idx: &[usize], n: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

/// `A·T` evaluated from the definition, component by component.
pub fn act(a: &Matrix, t: &Tensor) -> Vec<Rat> {
    let n = t.dim();
    let (contra, co) = t.valence();
    let k = contra + co;
    let comps = t.comps();
    (0..comps.len())
        .map(|f| {
            let idx = multi(f, n, k);
            let mut acc = Rat::zero();
            for slot in 0..k {
                for m in 0..n {
                    let mut j = idx.clone();
                    j[slot] = m;
                    let v = &comps[flat(&j, n)];
                    if v.is_zero() {
                        continue;
                    }
                    if slot < contra {
                        acc += &a[(idx[slot], m)] * v;
                    } else {
                        acc -= &a[(m, idx[slot])] * v;
                    }
                }
            }
            acc
        })
        .collect()
}

/// Components of `i_{e_b} T` (first lower slot fixed to `b`).
pub fn contract(t: &Tensor, b: usize) -> Vec<Rat> {
    let n = t.dim();
    let (contra, co) = t.valence();
    let k = contra + co;
    (0..t.len())
        .filter_map(|f| {
            let idx = multi(f, n, k);
            (idx[contra] == b).then(|| t.comps()[f].clone())
        })
        .collect()
}

fn unit(n: usize, p: usize, q: usize) -> Matrix {
    Matrix::from_fn(n, n, |i, j| {
        if (i, j) == (p, q) {
            Rat::one()
        } else {
            Rat::zero()
        }
    })
}

/// Rows in the `n^2` entries of `A` expressing `g A + A^T g = 0`.
fn skew_rows(g: &Matrix, offset: usize, width: usize) -> Vec<Vec<Rat>> {
    let n = g.rows();
    let mut rows = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut row = vec![Rat::zero(); width];
            for k in 0..n {
                row[offset + k * n + j] += &g[(i, k)];
                row[offset + k * n + i] += &g[(k, j)];
            }
            rows.push(row);
        }
    }
    rows
}

/// `dim {A in so(V) : A·T = 0 for every T}`.
pub fn annihilator_dim(g: &Matrix, tensors: &[&Tensor]) -> usize {
    let n = g.rows();
    let w = n * n;
    let mut rows = skew_rows(g, 0, w);
    for t in tensors {
        let cols: Vec<Vec<Rat>> = (0..w).map(|pq| act(&unit(n, pq / n, pq % n), t)).collect();
        for f in 0..t.len() {
            rows.push(cols.iter().map(|c| c[f].clone()).collect());
        }
    }
    w - rank(rows)
}

/// `dim g(r) ∩ p(s)` from scratch.
pub fn h_dim(d: &InfinitesimalData, r: i32, s: i32) -> usize {
    let mut ts: Vec<&Tensor> = d.curvature.iter().take((r + 1).max(0) as usize).collect();
    ts.extend(d.structure_tensors().iter().take((s + 1).max(0) as usize));
    annihilator_dim(d.space.g(), &ts)
}

/// Dimension of the Killing generator space with conditions up to the
/// stored orders, and the dimension of its `X = 0` slice.
pub fn killing_dims(d: &InfinitesimalData, with_structure: bool) -> (usize, usize) {
    let n = d.dim();
    let w = n + n * n;
    let mut families: Vec<(&Tensor, &Tensor)> =
        d.curvature.windows(2).map(|p| (&p[0], &p[1])).collect();
    if with_structure {
        families.extend(d.structure_tensors().windows(2).map(|p| (&p[0], &p[1])));
    }
    let mut rows = skew_rows(d.space.g(), n, w);
    for (lower, upper) in families {
        let acts: Vec<Vec<Rat>> = (0..n * n)
            .map(|pq| act(&unit(n, pq / n, pq % n), lower))
            .collect();
        let ints: Vec<Vec<Rat>> = (0..n).map(|b| contract(upper, b)).collect();
        for f in 0..lower.len() {
            let row: Vec<Rat> = ints
                .iter()
                .map(|c| c[f].clone())
                .chain(acts.iter().map(|c| c[f].clone()))
                .collect();
            rows.push(row);
        }
    }
    let total = w - rank(rows.clone());
    for b in 0..n {
        let mut row = vec![Rat::zero(); w];
        row[b] = Rat::one();
        rows.push(row);
    }
    (total, w - rank(rows))
}

/// Data of a left-invariant metric `g` on the Lie group with structure
/// constants `c[i][j][k]` (`[e_i, e_j] = c[i][j][k] e_k`), stored with order `r`.
pub fn lie_group_data(g: &Matrix, c: &[Vec<Vec<Rat>>], r: i32) -> InfinitesimalData {
    let n = g.rows();
    let ginv = g.inverse().expect("nondegenerate");
    let ip = |x: &[Rat], y: &[Rat]| -> Rat {
        let mut acc = Rat::zero();
        for i in 0..n {
            for j in 0..n {
                acc += &x[i] * &g[(i, j)] * &y[j];
            }
        }
        acc
    };
    let e = |i: usize| -> Vec<Rat> {
        (0..n)
            .map(|k| if k == i { Rat::one() } else { Rat::zero() })
            .collect()
    };
    let half = rat(1, 2);
    // Koszul: <L_x y, z> = 1/2 (<[x,y],z> - <[y,z],x> + <[z,x],y>)
    let l: Vec<Matrix> = (0..n)
        .map(|x| {
            let low = Matrix::from_fn(n, n, |z, y| {
                &half * (ip(&c[x][y], &e(z)) - ip(&c[y][z], &e(x)) + ip(&c[z][x], &e(y)))
            });
            ginv.mul(&low)
        })
        .collect();
    let l_of = |v: &[Rat]| -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for (k, vk) in v.iter().enumerate() {
            if !vk.is_zero() {
                m = m.add(&l[k].scale(vk));
            }
        }
        m
    };
    // R^0_xy = -([L_x, L_y] - L_[x,y]) as an endomorphism, lowered with g
    let mut r0 = Tensor::zeros(0, 4, n);
    for x in 0..n {
        for y in 0..n {
            let endo = l_of(&c[x][y]).sub(&l[x].commutator(&l[y]));
            let low = g.mul(&endo);
            for cc in 0..n {
                for w in 0..n {
                    if !low[(w, cc)].is_zero() {
                        r0.set(&[x, y, cc, w], low[(w, cc)].clone());
                    }
                }
            }
        }
    }
    let mut chain = vec![r0];
    for _ in 0..(r + 2) {
        let last = chain.last().unwrap();
        let mut comps = Vec::with_capacity(last.len() * n);
        for lx in &l {
            comps.extend(act(lx, last));
        }
        let (_, co) = last.valence();
        chain.push(Tensor::from_comps(0, co + 1, n, comps).unwrap());
    }
    let space = MetricSpace::new(g.clone()).unwrap();
    InfinitesimalData::new(space, r, -1, chain, None).unwrap()
}
