//! Annihilator filtrations of `so(V)` and stabilizing pairs.
//!
//! `g(r)` annihilates `R^0..R^r`, `p(s)` annihilates `P^0..P^s` and
//! `h(r, s) = ker mu_{r,s}` annihilates both. Index `-1` means "no
//! condition", so `g(-1) = p(-1) = so(V)`. All subspaces are in so
//! coordinates.

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::data::InfinitesimalData;
use crate::error::{Error, Result};
use crate::linalg::{Echelon, Rat, Subspace};
use crate::tensor::{MetricSpace, Tensor};

/// The linear maps `A ↦ (A·R^0, …, A·R^i, A·P^0, …, A·P^j)` on `so(V)`,
/// with the action of every so basis element on every stored tensor
/// precomputed.
pub struct MuSystem<'a> {
    data: &'a InfinitesimalData,
    /// `on_r[i][k] = E_k · R^i`
    on_r: Vec<Vec<Tensor>>,
    on_p: Vec<Vec<Tensor>>,
}

impl<'a> MuSystem<'a> {
    pub fn new(data: &'a InfinitesimalData) -> Self {
        let basis = data.space.so_basis();
        let act = |t: &Tensor| -> Vec<Tensor> {
            basis
                .par_iter()
                .map(|a| t.derivation_action(a).expect("dimensions agree"))
                .collect()
        };
        let on_r = data.curvature.par_iter().map(act).collect();
        let on_p = data.structure_tensors().par_iter().map(act).collect();
        Self { data, on_r, on_p }
    }

    pub fn data(&self) -> &InfinitesimalData {
        self.data
    }

    fn so_dim(&self) -> usize {
        self.data.space.so_dim()
    }

    fn check_range(&self, r: i32, s: i32) -> Result<()> {
        let (r_max, s_max) = (self.data.r + 1, self.data.s + 1);
        if r < -1 || s < -1 || r > r_max || s > s_max {
            return Err(Error::OutOfRange { r, s, r_max, s_max });
        }
        Ok(())
    }

    /// Orders `(i, j)` whose action families take part in `mu_{r,s}`.
    fn families(&self, r: i32, s: i32) -> impl Iterator<Item = &Vec<Tensor>> {
        let nr = (r + 1).max(0) as usize;
        let np = if self.on_p.is_empty() {
            0
        } else {
            (s + 1).max(0) as usize
        };
        self.on_r[..nr].iter().chain(self.on_p[..np].iter())
    }

    /// `ker mu_{r,s}` in so coordinates.
    pub fn kernel(&self, r: i32, s: i32) -> Result<Subspace> {
        self.check_range(r, s)?;
        Ok(self.kernel_unchecked(r, s))
    }

    /// `ker mu_{r,s}` for any orders backed by stored tensors, including the
    /// top ones that the filtration table leaves out.
    pub(crate) fn kernel_stored(&self, r: i32, s: i32) -> Result<Subspace> {
        if r < -1 || s < -1 || r > self.data.r + 2 || s > self.data.s + 2 {
            return Err(Error::OutOfRange {
                r,
                s,
                r_max: self.data.r + 2,
                s_max: self.data.s + 2,
            });
        }
        Ok(self.kernel_unchecked(r, s))
    }

    fn kernel_unchecked(&self, r: i32, s: i32) -> Subspace {
        let m = self.so_dim();
        let mut ech = Echelon::new(m);
        'outer: for family in self.families(r, s) {
            for f in 0..family[0].len() {
                if ech.is_full() {
                    break 'outer;
                }
                let row: Vec<Rat> = family.iter().map(|t| t.comps()[f].clone()).collect();
                if row.iter().any(|x| !x.is_zero()) {
                    ech.push(row);
                }
            }
        }
        ech.kernel()
    }

    /// Solves `A·R^i = i_x R^{i+1}` for `0 <= i <= r` and
    /// `A·P^j = i_x P^{j+1}` for `0 <= j <= s`, one system per `x` sharing
    /// the coefficient matrix. Returns so coordinates of the canonical
    /// solution (free variables zero), `None` where inconsistent.
    pub fn solve(&self, r: i32, s: i32, xs: &[Vec<Rat>]) -> Result<Vec<Option<Vec<Rat>>>> {
        self.check_range(r, s)?;
        let m = self.so_dim();
        let q = xs.len();
        let nr = (r + 1).max(0) as usize;
        let np = if self.on_p.is_empty() {
            0
        } else {
            (s + 1).max(0) as usize
        };
        let mut rhs_r: Vec<Vec<Tensor>> = Vec::with_capacity(nr);
        for i in 0..nr {
            rhs_r.push(
                xs.par_iter()
                    .map(|x| self.data.curvature[i + 1].interior_product(x))
                    .collect::<Result<_>>()?,
            );
        }
        let ps = self.data.structure_tensors();
        let mut rhs_p: Vec<Vec<Tensor>> = Vec::with_capacity(np);
        for j in 0..np {
            rhs_p.push(
                xs.par_iter()
                    .map(|x| ps[j + 1].interior_product(x))
                    .collect::<Result<_>>()?,
            );
        }
        let mut ech = Echelon::with_pivot_limit(m + q, m);
        let blocks = self.on_r[..nr]
            .iter()
            .zip(&rhs_r)
            .chain(self.on_p[..np].iter().zip(&rhs_p));
        for (family, rhs) in blocks {
            for f in 0..family[0].len() {
                let mut row: Vec<Rat> = family.iter().map(|t| t.comps()[f].clone()).collect();
                row.extend(rhs.iter().map(|t| t.comps()[f].clone()));
                if row.iter().any(|x| !x.is_zero()) {
                    ech.push(row);
                }
            }
        }
        Ok((0..q).map(|k| ech.particular_solution(k)).collect())
    }

    /// [`MuSystem::solve`] for the basis vectors `e_0..e_{n-1}`.
    pub fn solve_basis(&self, r: i32, s: i32) -> Result<Vec<Option<Vec<Rat>>>> {
        let n = self.data.dim();
        let xs: Vec<Vec<Rat>> = (0..n)
            .map(|k| crate::linalg::subspace::unit(n, k))
            .collect();
        self.solve(r, s, &xs)
    }
}

/// Elements of `so(V)` annihilating every tensor in `tensors`, in so coordinates.
pub fn annihilator(space: &MetricSpace, tensors: &[&Tensor]) -> Subspace {
    let basis = space.so_basis();
    let mut ech = Echelon::new(space.so_dim());
    'outer: for t in tensors {
        let acted: Vec<Tensor> = basis
            .par_iter()
            .map(|a| t.derivation_action(a).expect("dimensions agree"))
            .collect();
        for f in 0..t.len() {
            if ech.is_full() {
                break 'outer;
            }
            let row: Vec<Rat> = acted.iter().map(|x| x.comps()[f].clone()).collect();
            if row.iter().any(|x| !x.is_zero()) {
                ech.push(row);
            }
        }
    }
    ech.kernel()
}

/// `ker mu_{r,s}` for `-1 <= r <= d.r + 1`, `-1 <= s <= d.s + 1`.
pub fn compute_mu_kernel(d: &InfinitesimalData, r: i32, s: i32) -> Result<Subspace> {
    MuSystem::new(d).kernel(r, s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct StabilizingPair {
    pub r: i32,
    pub s: i32,
}

impl std::fmt::Display for StabilizingPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.r, self.s)
    }
}

/// Table of `h(r, s)` for `-1 <= r <= r_max`, `-1 <= s <= s_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationComplex {
    pub so_dim: usize,
    pub r_max: i32,
    pub s_max: i32,
    /// `cells[r + 1][s + 1] = h(r, s)`
    cells: Vec<Vec<Subspace>>,
    /// First `k >= 0` with `g(k) = g(k+1)` inside the table.
    pub k: Option<i32>,
    /// First `l >= 0` with `p(l) = p(l+1)`; `0` without a structure tensor.
    pub l: Option<i32>,
    pub has_structure: bool,
}

impl FiltrationComplex {
    pub fn h(&self, r: i32, s: i32) -> &Subspace {
        &self.cells[(r + 1) as usize][(s + 1) as usize]
    }

    pub fn get(&self, r: i32, s: i32) -> Option<&Subspace> {
        if r < -1 || s < -1 || r > self.r_max || s > self.s_max {
            return None;
        }
        Some(self.h(r, s))
    }

    pub fn g(&self, r: i32) -> &Subspace {
        self.h(r, -1)
    }

    pub fn p(&self, s: i32) -> &Subspace {
        self.h(-1, s)
    }

    pub fn indices(&self) -> impl Iterator<Item = (i32, i32)> + '_ {
        (-1..=self.r_max).flat_map(move |r| (-1..=self.s_max).map(move |s| (r, s)))
    }

    /// Containment along both indices for every adjacent pair of cells.
    pub fn is_monotone(&self) -> bool {
        self.indices().all(|(r, s)| {
            let here = self.h(r, s);
            let down = r == self.r_max || self.h(r + 1, s).is_subspace_of(here);
            let right = s == self.s_max || self.h(r, s + 1).is_subspace_of(here);
            down && right
        })
    }

    /// `h(r, s) = g(r) ∩ p(s)` on every cell.
    pub fn intersections_agree(&self) -> bool {
        self.indices()
            .all(|(r, s)| self.g(r).intersect(self.p(s)).expect("same ambient") == *self.h(r, s))
    }

    /// The four cells `h(r,s), h(r+1,s), h(r,s+1), h(r+1,s+1)` coincide.
    pub fn block_equal(&self, r: i32, s: i32) -> bool {
        if r + 1 > self.r_max || s + 1 > self.s_max {
            return false;
        }
        let a = self.h(r, s);
        a == self.h(r + 1, s) && a == self.h(r, s + 1) && a == self.h(r + 1, s + 1)
    }

    /// Pairs `(r, s)` whose 2x2 block is constant and with `r <= k`, `s <= l`
    /// whenever `k`, `l` are known; sorted lexicographically.
    pub fn stabilizing_pairs(&self) -> Vec<StabilizingPair> {
        let mut out: Vec<StabilizingPair> = (-1..self.r_max)
            .flat_map(|r| (-1..self.s_max).map(move |s| StabilizingPair { r, s }))
            .filter(|p| self.block_equal(p.r, p.s))
            .filter(|p| self.k.is_none_or(|k| p.r <= k))
            .filter(|p| self.l.is_none_or(|l| p.s <= l))
            .collect();
        out.sort();
        out
    }

    pub fn dims(&self) -> Vec<Vec<usize>> {
        self.cells
            .iter()
            .map(|row| row.iter().map(Subspace::dim).collect())
            .collect()
    }
}

pub fn build_complex(d: &InfinitesimalData) -> Result<FiltrationComplex> {
    build_complex_with(&MuSystem::new(d))
}

pub fn build_complex_with(mu: &MuSystem<'_>) -> Result<FiltrationComplex> {
    let d = mu.data();
    let r_max = d.r + 1;
    let s_max = d.s + 1;
    let idx: Vec<(i32, i32)> = (-1..=r_max)
        .flat_map(|r| (-1..=s_max).map(move |s| (r, s)))
        .collect();
    let flat: Vec<Subspace> = idx
        .par_iter()
        .map(|&(r, s)| mu.kernel(r, s))
        .collect::<Result<_>>()?;
    let width = (s_max + 2) as usize;
    let cells: Vec<Vec<Subspace>> = flat.chunks(width).map(<[Subspace]>::to_vec).collect();
    let k = (0..r_max).find(|&k| cells[(k + 1) as usize][0] == cells[(k + 2) as usize][0]);
    let l = if d.has_structure() {
        (0..s_max).find(|&l| cells[0][(l + 1) as usize] == cells[0][(l + 2) as usize])
    } else {
        Some(0)
    };
    Ok(FiltrationComplex {
        so_dim: d.space.so_dim(),
        r_max,
        s_max,
        cells,
        k,
        l,
        has_structure: d.has_structure(),
    })
}
