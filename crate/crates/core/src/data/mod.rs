//! Pointwise input data: a metric, curvature with its covariant derivatives,
//! and an optional structure tensor with its covariant derivatives.

pub mod fixtures;
pub mod json;
pub mod validate;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::tensor::{MetricSpace, Tensor};

pub use validate::{validate_identities, IdentityCheck, ValidationReport};

/// Structure tensor `P` of valence `(v, u)` and its derivatives `P^0, P^1, ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    pub valence: (usize, usize),
    pub tensors: Vec<Tensor>,
}

/// `(V, g, R^0..R^{r+2}, P^0..P^{s+2})`.
///
/// `R^i` has valence `(0, i + 4)` and `P^j` valence `(v, u + j)`; derivative
/// slots are prepended. Without a structure tensor `s` is `-1` and the
/// filtration treats `p(s)` as all of `so(V)`. With one, `s = -1` still
/// stores `P^0` and `P^1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfinitesimalData {
    pub space: MetricSpace,
    pub r: i32,
    pub s: i32,
    pub curvature: Vec<Tensor>,
    pub structure: Option<Structure>,
    /// Optional exact elements of the isotropy group used to extend the
    /// invariance test beyond `ad`.
    pub group_elements: Vec<Matrix>,
}

impl InfinitesimalData {
    pub fn new(
        space: MetricSpace,
        r: i32,
        s: i32,
        curvature: Vec<Tensor>,
        structure: Option<Structure>,
    ) -> Result<Self> {
        let d = Self {
            space,
            r,
            s,
            curvature,
            structure,
            group_elements: Vec::new(),
        };
        d.check_shapes()?;
        Ok(d)
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn has_structure(&self) -> bool {
        self.structure.is_some()
    }

    pub fn r0(&self) -> &Tensor {
        &self.curvature[0]
    }

    pub fn structure_tensors(&self) -> &[Tensor] {
        self.structure.as_ref().map_or(&[], |p| &p.tensors)
    }

    pub fn check_shapes(&self) -> Result<()> {
        let n = self.dim();
        if self.r < -1 || self.s < -1 {
            return Err(Error::Shape(format!(
                "r and s must be at least -1, got r={} s={}",
                self.r, self.s
            )));
        }
        let want = (self.r + 3) as usize;
        if self.curvature.len() != want {
            return Err(Error::Shape(format!(
                "r={} needs {want} curvature tensors, got {}",
                self.r,
                self.curvature.len()
            )));
        }
        for (i, t) in self.curvature.iter().enumerate() {
            if t.valence() != (0, i + 4) || t.dim() != n {
                return Err(Error::Shape(format!(
                    "R^{i} has valence {:?} in dimension {}, expected (0, {}) in dimension {n}",
                    t.valence(),
                    t.dim(),
                    i + 4
                )));
            }
        }
        match &self.structure {
            None if self.s != -1 => Err(Error::Shape(format!(
                "s={} given without a structure tensor",
                self.s
            ))),
            None => Ok(()),
            Some(p) => {
                let want = (self.s + 3) as usize;
                if p.tensors.len() != want {
                    return Err(Error::Shape(format!(
                        "s={} needs {want} structure tensors, got {}",
                        self.s,
                        p.tensors.len()
                    )));
                }
                let (v, u) = p.valence;
                for (j, t) in p.tensors.iter().enumerate() {
                    if t.valence() != (v, u + j) || t.dim() != n {
                        return Err(Error::Shape(format!(
                            "P^{j} has valence {:?}, expected ({v}, {})",
                            t.valence(),
                            u + j
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Data transported by the linear isomorphism `f`: every tensor and the
    /// metric are pulled back by `f`.
    pub fn pullback(&self, f: &Matrix) -> Result<InfinitesimalData> {
        let space = self.space.pulled_back(f)?;
        let curvature = self
            .curvature
            .iter()
            .map(|t| t.pullback(f))
            .collect::<Result<Vec<_>>>()?;
        let structure = match &self.structure {
            None => None,
            Some(p) => Some(Structure {
                valence: p.valence,
                tensors: p
                    .tensors
                    .iter()
                    .map(|t| t.pullback(f))
                    .collect::<Result<Vec<_>>>()?,
            }),
        };
        let finv = f.inverse().ok_or(Error::Singular)?;
        let group_elements = self
            .group_elements
            .iter()
            .map(|b| finv.mul(b).mul(f))
            .collect();
        Ok(InfinitesimalData {
            space,
            r: self.r,
            s: self.s,
            curvature,
            structure,
            group_elements,
        })
    }

    /// Keeps `R^0..R^{r+2}` and `P^0..P^{s+2}`.
    pub fn truncated(&self, r: i32, s: i32) -> Result<InfinitesimalData> {
        if r > self.r || s > self.s || r < -1 || s < -1 {
            return Err(Error::OutOfRange {
                r,
                s,
                r_max: self.r,
                s_max: self.s,
            });
        }
        let structure = self.structure.as_ref().map(|p| Structure {
            valence: p.valence,
            tensors: p.tensors[..(s + 3) as usize].to_vec(),
        });
        InfinitesimalData::new(
            self.space.clone(),
            r,
            if structure.is_some() { s } else { -1 },
            self.curvature[..(r + 3) as usize].to_vec(),
            structure,
        )
        .map(|mut d| {
            d.group_elements = self.group_elements.clone();
            d
        })
    }
}
