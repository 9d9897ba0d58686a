//! JSON encoding of [`InfinitesimalData`].
//!
//! ```json
//! {"dim": 2, "metric": [["1","0"],["0","-1"]], "r": 0, "s": -1,
//!  "R": [[{"idx":[0,1,0,1],"val":"-1"}, ...], [], []],
//!  "P": [[...], ...], "p_valence": [1, 1]}
//! ```
//!
//! Tensors are sparse lists of `{idx, val}` with 0-based indices in slot
//! order (upper slots first) and values as `"p"` or `"p/q"` strings.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{InfinitesimalData, Structure};
use crate::error::{Error, Result};
use crate::linalg::{format_rat, parse_rat, Matrix};
use crate::model::SMap;
use crate::tensor::{MetricSpace, Tensor};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub idx: Vec<usize>,
    pub val: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DataFile {
    dim: usize,
    metric: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    signature: Option<[usize; 2]>,
    r: i32,
    s: i32,
    #[serde(rename = "R")]
    curvature: Vec<Vec<Entry>>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    structure: Option<Vec<Vec<Entry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p_valence: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    group_elements: Vec<Vec<Vec<String>>>,
}

pub fn matrix_to_strings(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(format_rat).collect())
        .collect()
}

pub fn matrix_from_strings(rows: &[Vec<String>]) -> Result<Matrix> {
    let parsed = rows
        .iter()
        .map(|row| row.iter().map(|x| parse_rat(x)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(parsed).map_err(|e| Error::Shape(e.to_string()))
}

pub fn tensor_to_entries(t: &Tensor) -> Vec<Entry> {
    t.nonzeros()
        .map(|(idx, v)| Entry {
            idx,
            val: format_rat(v),
        })
        .collect()
}

pub fn tensor_from_entries(
    entries: &[Entry],
    contra: usize,
    co: usize,
    dim: usize,
    name: &str,
) -> Result<Tensor> {
    let mut t = Tensor::zeros(contra, co, dim);
    let mut seen = BTreeSet::new();
    for e in entries {
        if e.idx.len() != contra + co {
            return Err(Error::Shape(format!(
                "{name}: index {:?} has {} slots, expected {}",
                e.idx,
                e.idx.len(),
                contra + co
            )));
        }
        if let Some(bad) = e.idx.iter().find(|&&i| i >= dim) {
            return Err(Error::Shape(format!(
                "{name}: index {bad} out of range for dimension {dim}"
            )));
        }
        if !seen.insert(e.idx.clone()) {
            return Err(Error::Parse(format!("{name}: duplicate index {:?}", e.idx)));
        }
        t.set(&e.idx, parse_rat(&e.val)?);
    }
    Ok(t)
}

pub fn to_json(d: &InfinitesimalData) -> String {
    let file = DataFile {
        dim: d.dim(),
        metric: matrix_to_strings(d.space.g()),
        signature: Some([d.space.signature().0, d.space.signature().1]),
        r: d.r,
        s: d.s,
        curvature: d.curvature.iter().map(tensor_to_entries).collect(),
        structure: d
            .structure
            .as_ref()
            .map(|p| p.tensors.iter().map(tensor_to_entries).collect()),
        p_valence: d.structure.as_ref().map(|p| [p.valence.0, p.valence.1]),
        group_elements: d.group_elements.iter().map(matrix_to_strings).collect(),
    };
    serde_json::to_string_pretty(&file).expect("data file serializes")
}

pub fn to_value(d: &InfinitesimalData) -> serde_json::Value {
    serde_json::from_str(&to_json(d)).expect("round trip through serde_json")
}

pub fn from_json(text: &str) -> Result<InfinitesimalData> {
    let file: DataFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    from_file(file)
}

pub fn from_value(value: serde_json::Value) -> Result<InfinitesimalData> {
    let file: DataFile = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    from_file(file)
}

fn from_file(file: DataFile) -> Result<InfinitesimalData> {
    let n = file.dim;
    let g = matrix_from_strings(&file.metric)?;
    if g.rows() != n || g.cols() != n {
        return Err(Error::Shape(format!(
            "metric is {}x{}, expected {n}x{n}",
            g.rows(),
            g.cols()
        )));
    }
    let space = match file.signature {
        Some([p, q]) => MetricSpace::with_signature(g, p, q)?,
        None => MetricSpace::new(g)?,
    };
    let curvature = file
        .curvature
        .iter()
        .enumerate()
        .map(|(i, e)| tensor_from_entries(e, 0, i + 4, n, &format!("R^{i}")))
        .collect::<Result<Vec<_>>>()?;
    let structure = match (file.structure, file.p_valence) {
        (None, None) => None,
        (Some(_), None) => return Err(Error::Parse("P given without p_valence".into())),
        (None, Some(_)) => return Err(Error::Parse("p_valence given without P".into())),
        (Some(list), Some([v, u])) => Some(Structure {
            valence: (v, u),
            tensors: list
                .iter()
                .enumerate()
                .map(|(j, e)| tensor_from_entries(e, v, u + j, n, &format!("P^{j}")))
                .collect::<Result<Vec<_>>>()?,
        }),
    };
    let mut d = InfinitesimalData::new(space, file.r, file.s, curvature, structure)?;
    for m in &file.group_elements {
        let b = matrix_from_strings(m)?;
        if b.rows() != n || b.cols() != n {
            return Err(Error::Shape("group element has wrong size".into()));
        }
        d.group_elements.push(b);
    }
    Ok(d)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SFile {
    dim: usize,
    #[serde(rename = "S")]
    s: Vec<Entry>,
}

/// `{"dim": n, "S": [{"idx": [c, a, b], "val": ...}]}` with
/// `S[c, a, b] = (S_{e_a})^c_b`.
pub fn smap_to_json(s: &SMap) -> String {
    let f = SFile {
        dim: s.dim(),
        s: tensor_to_entries(&s.to_tensor()),
    };
    serde_json::to_string_pretty(&f).expect("S serializes")
}

pub fn smap_from_json(text: &str) -> Result<SMap> {
    let f: SFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    SMap::from_tensor(&tensor_from_entries(&f.s, 1, 2, f.dim, "S")?)
}
