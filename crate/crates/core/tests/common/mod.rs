#![allow(dead_code)]

pub mod oracle;

use homogeneity::data::{InfinitesimalData, Structure};
use homogeneity::linalg::{int, rat, Matrix, Rat};
use homogeneity::tensor::{MetricSpace, Tensor};
use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rat(rng: &mut ChaCha8Rng) -> Rat {
    let num = rng.gen_range(-4i64..=4);
    let den = rng.gen_range(1i64..=3);
    rat(num, den)
}

pub fn nonzero_rat(rng: &mut ChaCha8Rng) -> Rat {
    loop {
        let r = small_rat(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

pub fn random_signature(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    let minus = rng.gen_range(0..=n);
    (n - minus, minus)
}

/// Product of unit lower and upper triangular integer matrices, so always invertible.
pub fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let lower = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => int(1),
        std::cmp::Ordering::Greater => int(rng.gen_range(-1..=1)),
        std::cmp::Ordering::Less => Rat::zero(),
    });
    let upper = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => {
            if rng.gen_bool(0.5) {
                int(1)
            } else {
                int(-2)
            }
        }
        std::cmp::Ordering::Less => int(rng.gen_range(-1..=1)),
        std::cmp::Ordering::Greater => Rat::zero(),
    });
    lower.mul(&upper)
}

/// Cayley transform `(I - A)^{-1}(I + A)` of a random skew `A`; an exact isometry.
pub fn random_isometry(rng: &mut ChaCha8Rng, space: &MetricSpace) -> Matrix {
    let n = space.dim();
    loop {
        let coords: Vec<Rat> = (0..space.so_dim()).map(|_| small_rat(rng)).collect();
        let a = space.so_element(&coords);
        let id = Matrix::identity(n);
        if let Some(inv) = id.sub(&a).inverse() {
            return inv.mul(&id.add(&a));
        }
    }
}

pub fn zero_chain(first: Tensor, count: usize) -> Vec<Tensor> {
    let (contra, co) = first.valence();
    let n = first.dim();
    let mut v = vec![first];
    for k in 1..=count {
        v.push(Tensor::zeros(contra, co + k, n));
    }
    v
}

/// Space form of random signature and curvature, pulled back by a random
/// invertible map.
pub fn space_form_instance(rng: &mut ChaCha8Rng, n: usize) -> InfinitesimalData {
    let (p, q) = random_signature(rng, n);
    let space = MetricSpace::diagonal(p, q);
    let c = small_rat(rng);
    let r0 = space.constant_curvature(&c);
    let d = InfinitesimalData::new(space, 0, -1, zero_chain(r0, 2), None).unwrap();
    let f = random_invertible(rng, n);
    d.pullback(&f).unwrap()
}

/// `V = V1 ⊕ V2`, product of two space forms with `P = λ1 id_1 + λ2 id_2`,
/// all derivatives zero, then pulled back by a random map.
pub fn product_instance(rng: &mut ChaCha8Rng, n: usize) -> InfinitesimalData {
    let n1 = rng.gen_range(1..n);
    let (p1, q1) = random_signature(rng, n1);
    let (p2, q2) = random_signature(rng, n - n1);
    let s1 = MetricSpace::diagonal(p1, q1);
    let s2 = MetricSpace::diagonal(p2, q2);
    let (c1, c2) = (nonzero_rat(rng), nonzero_rat(rng));
    let (r1, r2) = (s1.constant_curvature(&c1), s2.constant_curvature(&c2));
    let mut g = Matrix::zeros(n, n);
    let mut r0 = Tensor::zeros(0, 4, n);
    for i in 0..n1 {
        g[(i, i)] = s1.g()[(i, i)].clone();
    }
    for i in 0..n - n1 {
        g[(n1 + i, n1 + i)] = s2.g()[(i, i)].clone();
    }
    for (idx, v) in r1.nonzeros() {
        r0.set(&idx, v.clone());
    }
    for (idx, v) in r2.nonzeros() {
        let shifted: Vec<usize> = idx.iter().map(|i| i + n1).collect();
        r0.set(&shifted, v.clone());
    }
    let (l1, l2) = (small_rat(rng), nonzero_rat(rng));
    let p = Matrix::from_fn(n, n, |i, j| {
        if i != j {
            Rat::zero()
        } else if i < n1 {
            l1.clone()
        } else {
            &l1 + &l2
        }
    });
    let space = MetricSpace::new(g).unwrap();
    let s = rng.gen_range(-1..=0);
    let structure = Structure {
        valence: (1, 1),
        tensors: zero_chain(Tensor::from_endo(&p), (s + 2) as usize),
    };
    let d = InfinitesimalData::new(space, 0, s, zero_chain(r0, 2), Some(structure)).unwrap();
    d.pullback(&random_invertible(rng, n)).unwrap()
}

/// Left-invariant metric on `R ⋉_D R^{n-1}`, `[e_0, e_i] = D e_i`, with
/// curvature and derivatives from the Koszul formula.
pub fn lie_group_instance(rng: &mut ChaCha8Rng, n: usize, r: i32) -> InfinitesimalData {
    let dmat = Matrix::from_fn(n - 1, n - 1, |_, _| int(rng.gen_range(-1..=1)));
    let mut c = vec![vec![vec![Rat::zero(); n]; n]; n];
    for i in 1..n {
        for j in 1..n {
            let v = dmat[(j - 1, i - 1)].clone();
            c[0][i][j] = v.clone();
            c[i][0][j] = -v;
        }
    }
    let (p, q) = random_signature(rng, n);
    let g = MetricSpace::diagonal(p, q).g().clone();
    let f = random_invertible(rng, n);
    let g = f.transpose().mul(&g).mul(&f);
    oracle::lie_group_data(&g, &c, r)
}
