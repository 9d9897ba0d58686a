//! End-to-end analysis pipeline and its JSON / markdown report.

use std::fmt::Write as _;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::validate::validate_identities;
use crate::data::InfinitesimalData;
use crate::error::{Error, Result};
use crate::filtration::{build_complex_with, FiltrationComplex, MuSystem, StabilizingPair};
use crate::killing::{
    compute_killing, image_failure, phi_direct, psi, verify_closure, KillingSpace,
};
use crate::linalg::{format_rat, parse_rat, Rat, Subspace};
use crate::model::{
    build_model, check_equivariance, compute_s, solve_a, verify_model, InfinitesimalModel, SMap,
};
use crate::nomizu::{
    build_nomizu, build_transvection, check_h_equals_h0, compute_h0, BasisLabel, LieAlgebra,
};
use crate::recovery::{compare_data, recover_data};
use crate::reductivity::decide_strong_reductivity;
use crate::tensor::Tensor;

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn strings(v: &[Rat]) -> Vec<String> {
    v.iter().map(format_rat).collect()
}

fn basis_strings(s: &Subspace) -> Vec<Vec<String>> {
    s.basis().iter().map(|v| strings(v)).collect()
}

fn parse_basis(ambient: usize, b: &[Vec<String>]) -> Result<Subspace> {
    let vs = b
        .iter()
        .map(|v| v.iter().map(|x| parse_rat(x)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Subspace::from_vectors(ambient, vs)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub skipped: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataSummary {
    pub dim: usize,
    pub signature: (usize, usize),
    pub r: i32,
    pub s: i32,
    pub has_structure: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub r: i32,
    pub s: i32,
    pub dim: usize,
    pub basis: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationSection {
    pub so_dim: usize,
    pub r_max: i32,
    pub s_max: i32,
    /// `dims[r + 1][s + 1] = dim h(r, s)`
    pub dims: Vec<Vec<usize>>,
    pub cells: Vec<Cell>,
    pub k: Option<i32>,
    pub l: Option<i32>,
    pub stabilizing_pairs: Vec<(i32, i32)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constant {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraSection {
    pub dim: usize,
    pub isotropy_dim: usize,
    pub labels: Vec<String>,
    pub structure_constants: Vec<Constant>,
    pub jacobi: bool,
}

impl AlgebraSection {
    fn from_algebra(a: &LieAlgebra) -> Self {
        Self {
            dim: a.dim(),
            isotropy_dim: a.isotropy_dim(),
            labels: a
                .labels
                .iter()
                .map(|l| match l {
                    BasisLabel::Isotropy(i) => format!("A{}", i + 1),
                    BasisLabel::Translation(i) => format!("e{}", i + 1),
                })
                .collect(),
            structure_constants: a
                .structure_constants()
                .into_iter()
                .map(|(i, j, k, c)| Constant {
                    i,
                    j,
                    k,
                    value: format_rat(c),
                })
                .collect(),
            jacobi: a.jacobi_failure().is_none(),
        }
    }

    fn to_algebra(&self) -> Result<LieAlgebra> {
        let n = self.dim;
        let mut br = vec![vec![vec![Rat::zero(); n]; n]; n];
        for c in &self.structure_constants {
            if c.i >= n || c.j >= n || c.k >= n {
                return Err(Error::Parse("structure constant index out of range".into()));
            }
            let v = parse_rat(&c.value)?;
            br[c.j][c.i][c.k] = -v.clone();
            br[c.i][c.j][c.k] = v;
        }
        let labels = (0..n)
            .map(|i| {
                if i < self.isotropy_dim {
                    BasisLabel::Isotropy(i)
                } else {
                    BasisLabel::Translation(i - self.isotropy_dim)
                }
            })
            .collect();
        LieAlgebra::from_brackets(labels, br)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coframe {
    /// `(alpha, beta, gamma, T^alpha_{beta gamma})`
    pub torsion: Vec<(Vec<usize>, String)>,
    /// `(delta, alpha, beta, gamma, K^delta_{alpha beta gamma})`
    pub curvature: Vec<(Vec<usize>, String)>,
    /// `omega^alpha_beta = sum_i (A_i)^alpha_beta theta^i` over the isotropy basis.
    pub connection: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSection {
    /// Nonzero `S[c, a, b] = (S_{e_a})^c_b`.
    pub s: Vec<(Vec<usize>, String)>,
    pub axioms: Vec<Check>,
    pub equivariant: bool,
    pub h0_dim: usize,
    pub h0_basis: Vec<Vec<String>>,
    pub h_equals_h0: bool,
    pub nomizu: Option<AlgebraSection>,
    pub transvection: Option<AlgebraSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
    pub regularity: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coframe: Option<Coframe>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSection {
    pub pair: (i32, i32),
    pub condition_ker: bool,
    pub condition_nu: Option<bool>,
    pub h_dim: usize,
    pub complement: Option<Vec<Vec<String>>>,
    pub strongly_reductive: Option<bool>,
    pub invariance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSection>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KillingSection {
    pub dim: usize,
    pub r_imposed: i32,
    pub s_imposed: Option<i32>,
    pub apparently_stabilized: bool,
    pub basis: Vec<Vec<String>>,
    pub closed: bool,
    pub jacobi: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failing_pair: Option<(usize, usize)>,
    pub isotropy_dim: usize,
}

impl KillingSection {
    fn new(d: &InfinitesimalData, k: &KillingSpace) -> Result<Self> {
        let c = verify_closure(d, k)?;
        Ok(Self {
            dim: k.dim(),
            r_imposed: k.r_imposed,
            s_imposed: k.s_imposed,
            apparently_stabilized: k.apparently_stabilized,
            basis: basis_strings(&k.generators),
            closed: c.closed,
            jacobi: c.jacobi,
            failing_pair: c.failing_pair,
            isotropy_dim: k.isotropy_slice()?.dim(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KillingReport {
    pub kill: KillingSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gkill: Option<KillingSection>,
    /// Isotropy slice of `kill` equals `g(r + 1)`.
    pub slice_matches_filtration: bool,
    /// For the first strongly reductive pair: images of the Nomizu basis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nomizu_image: Option<NomizuImage>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NomizuImage {
    pub pair: (i32, i32),
    /// `X + A ↦ (-X, S_X + A)`
    pub psi_first_failure: Option<usize>,
    /// `X + A ↦ (X, S_X + A)`
    pub direct_first_failure: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTrip {
    pub source: String,
    pub pair: Option<(i32, i32)>,
    pub equal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_difference: Option<(String, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input_digest: String,
    pub data: DataSummary,
    pub validation: Vec<Check>,
    pub filtration: FiltrationSection,
    pub pairs: Vec<PairSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub killing: Option<KillingReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roundtrip: Option<RoundTrip>,
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub pair: Option<StabilizingPair>,
    pub killing: bool,
    pub coframe: bool,
}

fn sparse(t: &Tensor) -> Vec<(Vec<usize>, String)> {
    t.nonzeros().map(|(i, v)| (i, format_rat(v))).collect()
}

fn filtration_section(c: &FiltrationComplex) -> FiltrationSection {
    FiltrationSection {
        so_dim: c.so_dim,
        r_max: c.r_max,
        s_max: c.s_max,
        dims: c.dims(),
        cells: c
            .indices()
            .map(|(r, s)| {
                let h = c.h(r, s);
                Cell {
                    r,
                    s,
                    dim: h.dim(),
                    basis: basis_strings(h),
                }
            })
            .collect(),
        k: c.k,
        l: c.l,
        stabilizing_pairs: c.stabilizing_pairs().iter().map(|p| (p.r, p.s)).collect(),
    }
}

fn model_section(m: &InfinitesimalModel, s: &SMap, h: &Subspace, coframe: bool) -> ModelSection {
    let space = &m.space;
    let h0 = compute_h0(m);
    let mut errors = Vec::new();
    let nomizu = build_nomizu(m, &h0)
        .map_err(|e| errors.push(format!("nomizu: {e}")))
        .ok();
    let transvection = build_transvection(m, &h0)
        .map_err(|e| errors.push(format!("transvection: {e}")))
        .ok();
    let h_elems = space.so_elements(h);
    let coframe = coframe.then(|| Coframe {
        torsion: sparse(&m.t),
        curvature: sparse(&m.k),
        connection: space
            .so_elements(&h0)
            .iter()
            .map(|a| (0..a.rows()).map(|i| strings(a.row(i))).collect())
            .collect(),
    });
    ModelSection {
        s: sparse(&s.to_tensor()),
        axioms: verify_model(m)
            .checks
            .into_iter()
            .map(|c| Check {
                name: c.name,
                passed: c.passed,
                skipped: c.skipped,
                witness: c.witness,
            })
            .collect(),
        equivariant: check_equivariance(s, &h_elems).is_none(),
        h0_dim: h0.dim(),
        h0_basis: basis_strings(&h0),
        h_equals_h0: check_h_equals_h0(h, &h0),
        nomizu: nomizu.as_ref().map(AlgebraSection::from_algebra),
        transvection: transvection.as_ref().map(AlgebraSection::from_algebra),
        errors,
        regularity: "undecided".into(),
        coframe,
    }
}

/// Strongly reductive pair used for the round trip and the Nomizu image:
/// the largest one in the table.
fn chosen_pair(pairs: &[PairSection]) -> Option<(i32, i32)> {
    pairs
        .iter()
        .filter(|p| p.strongly_reductive == Some(true))
        .map(|p| p.pair)
        .max()
}

/// S for the round trip: from the chosen strongly reductive pair, or the
/// canonical unprojected solution at the top of the table otherwise.
pub fn roundtrip_s(
    d: &InfinitesimalData,
    mu: &MuSystem<'_>,
    pair: Option<(i32, i32)>,
) -> Result<(String, SMap)> {
    match pair {
        Some((r, s)) => {
            let v = decide_strong_reductivity(mu, StabilizingPair { r, s })?;
            Ok((
                format!("projected solution at ({r},{s})"),
                compute_s(mu, &v)?,
            ))
        }
        None => {
            let (r, s) = (d.r + 1, d.s + 1);
            Ok((
                format!("canonical solution at ({r},{s})"),
                solve_a(mu, r, s)?,
            ))
        }
    }
}

/// Builds the model from `s` and recovers the data. With a strongly
/// reductive `pair` the recovery derives `S` from the torsion; otherwise the
/// given `s` is handed to the recovery.
pub fn run_roundtrip(
    d: &InfinitesimalData,
    source: String,
    s: &SMap,
    pair: Option<(i32, i32)>,
) -> Result<RoundTrip> {
    let m = build_model(d, s)?;
    let back = recover_data(&m, d.r, d.s, pair.is_none().then_some(s))?;
    let c = compare_data(d, &back, None)?;
    Ok(RoundTrip {
        source,
        pair,
        equal: c.equal,
        first_difference: c.first_difference,
    })
}

pub fn summary(d: &InfinitesimalData) -> DataSummary {
    DataSummary {
        dim: d.dim(),
        signature: d.space.signature(),
        r: d.r,
        s: d.s,
        has_structure: d.has_structure(),
    }
}

pub fn validation_checks(d: &InfinitesimalData) -> Vec<Check> {
    validate_identities(d)
        .checks
        .into_iter()
        .map(|c| Check {
            name: c.name,
            passed: c.passed,
            skipped: false,
            witness: c.witness,
        })
        .collect()
}

pub fn analyze(d: &InfinitesimalData, input: &[u8], opts: &Options) -> Result<AnalysisReport> {
    let mu = MuSystem::new(d);
    let complex = build_complex_with(&mu)?;
    let filtration = filtration_section(&complex);
    let mut targets = complex.stabilizing_pairs();
    if let Some(p) = opts.pair {
        targets.retain(|q| *q == p);
        if targets.is_empty() {
            targets.push(p);
        }
    }
    let mut pairs = Vec::new();
    for p in targets {
        let h = mu.kernel(p.r, p.s)?;
        let mut sec = PairSection {
            pair: (p.r, p.s),
            condition_ker: crate::reductivity::check_condition_ker(&mu, p)?.passed,
            condition_nu: None,
            h_dim: h.dim(),
            complement: None,
            strongly_reductive: None,
            invariance: None,
            error: None,
            model: None,
        };
        match decide_strong_reductivity(&mu, p) {
            Err(e) => sec.error = Some(e.to_string()),
            Ok(v) => {
                sec.condition_nu = Some(v.condition_nu.passed);
                sec.complement = v.n.as_ref().map(basis_strings);
                sec.strongly_reductive = Some(v.strongly_reductive);
                sec.invariance = Some(
                    serde_json::to_value(v.invariance)
                        .ok()
                        .and_then(|x| x.as_str().map(String::from))
                        .unwrap_or_default(),
                );
                if v.strongly_reductive {
                    match compute_s(&mu, &v).and_then(|s| Ok((build_model(d, &s)?, s))) {
                        Ok((m, s)) => sec.model = Some(model_section(&m, &s, &v.h, opts.coframe)),
                        Err(e) => sec.error = Some(e.to_string()),
                    }
                }
            }
        }
        pairs.push(sec);
    }
    let chosen = chosen_pair(&pairs);

    let killing = if opts.killing {
        let k = compute_killing(d, false)?;
        let slice = k.isotropy_slice()?;
        let slice_matches_filtration = mu.kernel(d.r + 1, -1).map(|g| g == slice).unwrap_or(false);
        let kill = KillingSection::new(d, &k)?;
        let (gkill, gk) = if d.has_structure() {
            let gk = compute_killing(d, true)?;
            (Some(KillingSection::new(d, &gk)?), gk)
        } else {
            (None, k)
        };
        let nomizu_image = match chosen {
            None => None,
            Some((r, s)) => {
                let (_, smap) = roundtrip_s(d, &mu, chosen)?;
                let m = build_model(d, &smap)?;
                let h0 = d.space.so_elements(&compute_h0(&m));
                Some(NomizuImage {
                    pair: (r, s),
                    psi_first_failure: image_failure(d, &gk, &smap, &h0, psi),
                    direct_first_failure: image_failure(d, &gk, &smap, &h0, phi_direct),
                })
            }
        };
        Some(KillingReport {
            kill,
            gkill,
            slice_matches_filtration,
            nomizu_image,
        })
    } else {
        None
    };

    let roundtrip = match chosen {
        Some(p) => {
            let (src, s) = roundtrip_s(d, &mu, Some(p))?;
            Some(run_roundtrip(d, src, &s, Some(p))?)
        }
        None => None,
    };

    Ok(AnalysisReport {
        input_digest: digest(input),
        data: summary(d),
        validation: validation_checks(d),
        filtration,
        pairs,
        killing,
        roundtrip,
    })
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Every mathematical verdict in the report holds.
    pub fn passed(&self) -> bool {
        self.validation.iter().all(|c| c.passed)
            && self.pairs.iter().all(|p| {
                p.model.as_ref().is_none_or(|m| {
                    m.axioms.iter().all(|c| c.passed)
                        && m.errors.is_empty()
                        && m.nomizu.as_ref().is_none_or(|a| a.jacobi)
                })
            })
            && self.roundtrip.as_ref().is_none_or(|r| r.equal)
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let d = &self.data;
        let _ = writeln!(out, "# Analysis report\n");
        let _ = writeln!(out, "- input sha256: `{}`", self.input_digest);
        let _ = writeln!(
            out,
            "- dim {} signature ({},{}), r = {}, s = {}, structure tensor: {}\n",
            d.dim,
            d.signature.0,
            d.signature.1,
            d.r,
            d.s,
            if d.has_structure { "yes" } else { "no" }
        );

        out.push_str("## Identities\n\n");
        for c in &self.validation {
            let _ = writeln!(
                out,
                "- {} {}{}",
                mark(c.passed),
                c.name,
                witness(&c.witness)
            );
        }

        let f = &self.filtration;
        out.push_str("\n## Filtration\n\n");
        out.push_str(&filtration_table(f, d.has_structure));
        let opt = |x: Option<i32>| x.map_or("undetermined".to_string(), |v| v.to_string());
        let _ = writeln!(out, "\nk = {}, l = {}", opt(f.k), opt(f.l));
        let pairs: Vec<String> = f
            .stabilizing_pairs
            .iter()
            .map(|(r, s)| format!("({r},{s})"))
            .collect();
        let _ = writeln!(
            out,
            "stabilizing pairs: {}",
            if pairs.is_empty() {
                "none".into()
            } else {
                pairs.join(", ")
            }
        );

        for p in &self.pairs {
            let _ = writeln!(out, "\n## Pair ({},{})\n", p.pair.0, p.pair.1);
            let _ = writeln!(out, "- dim h = {}", p.h_dim);
            let _ = writeln!(out, "- kernel condition: {}", mark(p.condition_ker));
            if let Some(nu) = p.condition_nu {
                let _ = writeln!(out, "- image condition: {}", mark(nu));
            }
            match p.strongly_reductive {
                Some(true) => out.push_str("- verdict: strongly reductive\n"),
                Some(false) => out.push_str("- verdict: not strongly reductive\n"),
                None => {}
            }
            if let Some(e) = &p.error {
                let _ = writeln!(out, "- error: {e}");
            }
            if let Some(m) = &p.model {
                let _ = writeln!(out, "- S has {} nonzero components", m.s.len());
                for c in &m.axioms {
                    let status = if c.skipped { "skip" } else { mark(c.passed) };
                    let _ = writeln!(out, "  - {status} {}{}", c.name, witness(&c.witness));
                }
                let _ = writeln!(out, "- equivariance: {}", mark(m.equivariant));
                let _ = writeln!(
                    out,
                    "- dim h0 = {}, h = h0: {}",
                    m.h0_dim,
                    mark(m.h_equals_h0)
                );
                for (name, a) in [("Nomizu", &m.nomizu), ("transvection", &m.transvection)] {
                    if let Some(a) = a {
                        let _ = writeln!(
                            out,
                            "- {name} algebra: dim {} (isotropy {}), Jacobi {}",
                            a.dim,
                            a.isotropy_dim,
                            mark(a.jacobi)
                        );
                    }
                }
                for e in &m.errors {
                    let _ = writeln!(out, "- error: {e}");
                }
                let _ = writeln!(out, "- regularity: {}", m.regularity);
            }
        }

        if let Some(k) = &self.killing {
            out.push_str("\n## Killing generators\n\n");
            for (name, s) in [("kill", Some(&k.kill)), ("gkill", k.gkill.as_ref())] {
                if let Some(s) = s {
                    let _ = writeln!(
                        out,
                        "- {name}: dim {} (isotropy slice {}), closed {}, Jacobi {}, apparently stabilized: {}",
                        s.dim,
                        s.isotropy_dim,
                        mark(s.closed),
                        s.jacobi.map_or("n/a", mark),
                        if s.apparently_stabilized { "yes" } else { "no" }
                    );
                }
            }
            let _ = writeln!(
                out,
                "- isotropy slice equals g(r+1): {}",
                mark(k.slice_matches_filtration)
            );
            if let Some(im) = &k.nomizu_image {
                let _ = writeln!(
                    out,
                    "- Nomizu basis under X+A -> (-X, S_X+A): {}",
                    im.psi_first_failure
                        .map_or("all generators".into(), |i| format!("fails at {i}"))
                );
                let _ = writeln!(
                    out,
                    "- Nomizu basis under X+A -> (X, S_X+A): {}",
                    im.direct_first_failure
                        .map_or("all generators".into(), |i| format!("fails at {i}"))
                );
            }
        }

        if let Some(rt) = &self.roundtrip {
            out.push_str("\n## Round trip\n\n");
            let _ = writeln!(out, "- S: {}", rt.source);
            let _ = writeln!(out, "- recovered data equal: {}", mark(rt.equal));
            if let Some((name, idx)) = &rt.first_difference {
                let _ = writeln!(out, "- first difference: {name} at {idx:?}");
            }
        }
        out
    }
}

fn mark(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

fn witness(w: &Option<Vec<usize>>) -> String {
    w.as_ref()
        .map_or(String::new(), |w| format!(" (witness {w:?})"))
}

fn superscript(n: usize) -> String {
    const SUP: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string()
        .chars()
        .map(|c| SUP[c.to_digit(10).unwrap() as usize])
        .collect()
}

fn cell_name(r: i32, s: i32, has_structure: bool) -> String {
    match (r, s) {
        (-1, -1) => "so".into(),
        (r, -1) => format!("g({r})"),
        (-1, s) if has_structure => format!("p({s})"),
        (r, s) => format!("h({r},{s})"),
    }
}

fn filtration_table(f: &FiltrationSection, has_structure: bool) -> String {
    let mut out = String::from("| |");
    for s in -1..=f.s_max {
        let _ = write!(out, " s={s} |");
    }
    out.push_str("\n|---|");
    for _ in -1..=f.s_max {
        out.push_str("---|");
    }
    out.push('\n');
    for (ri, row) in f.dims.iter().enumerate() {
        let r = ri as i32 - 1;
        let _ = write!(out, "| r={r} |");
        for (si, dim) in row.iter().enumerate() {
            let s = si as i32 - 1;
            let _ = write!(
                out,
                " {}{} |",
                cell_name(r, s, has_structure),
                superscript(*dim)
            );
        }
        out.push('\n');
    }
    out
}

/// Re-verifies the facts a report claims against the data: every cell
/// basis spans exactly `ker mu_{r,s}`, the stabilizing pairs follow from the
/// dimensions, and every serialized Lie algebra satisfies Jacobi.
pub fn check_report(
    rep: &AnalysisReport,
    d: &InfinitesimalData,
    input: &[u8],
) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    if rep.input_digest != digest(input) {
        failures.push("input digest differs".into());
    }
    if rep.data != summary(d) {
        failures.push("data summary differs".into());
    }
    let mu = MuSystem::new(d);
    let m = d.space.so_dim();
    if rep.filtration.so_dim != m {
        failures.push(format!(
            "so(V) has dim {m}, report says {}",
            rep.filtration.so_dim
        ));
    }
    for c in &rep.filtration.cells {
        let claimed = parse_basis(m, &c.basis)?;
        if claimed.dim() != c.dim {
            failures.push(format!(
                "cell ({},{}): basis has dim {}",
                c.r,
                c.s,
                claimed.dim()
            ));
        }
        if claimed != mu.kernel(c.r, c.s)? {
            failures.push(format!("cell ({},{}): basis is not ker mu", c.r, c.s));
        }
        let (ri, si) = ((c.r + 1) as usize, (c.s + 1) as usize);
        if rep.filtration.dims.get(ri).and_then(|row| row.get(si)) != Some(&c.dim) {
            failures.push(format!("cell ({},{}): dims table disagrees", c.r, c.s));
        }
    }
    let complex = build_complex_with(&mu)?;
    let pairs: Vec<(i32, i32)> = complex
        .stabilizing_pairs()
        .iter()
        .map(|p| (p.r, p.s))
        .collect();
    if pairs != rep.filtration.stabilizing_pairs {
        failures.push("stabilizing pairs differ".into());
    }
    if (complex.k, complex.l) != (rep.filtration.k, rep.filtration.l) {
        failures.push("(k, l) differ".into());
    }
    for p in &rep.pairs {
        if let Some(model) = &p.model {
            let h0 = parse_basis(m, &model.h0_basis)?;
            let s = SMap::from_tensor(&tensor_from_sparse(1, 2, d.dim(), &model.s)?)?;
            let built = build_model(d, &s)?;
            if h0 != compute_h0(&built) {
                failures.push(format!("pair {:?}: h0 basis differs", p.pair));
            }
            for (name, a) in [
                ("nomizu", &model.nomizu),
                ("transvection", &model.transvection),
            ] {
                if let Some(a) = a {
                    let alg = a.to_algebra()?;
                    if (alg.jacobi_failure().is_none()) != a.jacobi {
                        failures.push(format!("pair {:?}: {name} Jacobi verdict differs", p.pair));
                    }
                }
            }
            if let Some(n) = &model.nomizu {
                match build_nomizu(&built, &h0) {
                    Ok(alg) if AlgebraSection::from_algebra(&alg) == *n => {}
                    _ => failures.push(format!("pair {:?}: nomizu constants differ", p.pair)),
                }
            }
        }
    }
    if let Some(k) = &rep.killing {
        let ks = compute_killing(d, false)?;
        let claimed = parse_basis(ks.generators.ambient_dim(), &k.kill.basis)?;
        if claimed != ks.generators {
            failures.push("kill basis differs".into());
        }
        if let Some(g) = &k.gkill {
            let gk = compute_killing(d, true)?;
            if parse_basis(gk.generators.ambient_dim(), &g.basis)? != gk.generators {
                failures.push("gkill basis differs".into());
            }
        }
    }
    Ok(failures)
}

fn tensor_from_sparse(
    contra: usize,
    co: usize,
    n: usize,
    entries: &[(Vec<usize>, String)],
) -> Result<Tensor> {
    let mut t = Tensor::zeros(contra, co, n);
    for (idx, v) in entries {
        if idx.len() != contra + co || idx.iter().any(|&i| i >= n) {
            return Err(Error::Parse(format!("bad index {idx:?}")));
        }
        t.set(idx, parse_rat(v)?);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::fixtures;
    use crate::linalg::int;

    fn full() -> Options {
        Options {
            pair: None,
            killing: true,
            coframe: true,
        }
    }

    #[test]
    fn space_form_report_checks() {
        let d = fixtures::constant_curvature(1, 3, &int(-1)).unwrap();
        let rep = analyze(&d, b"x", &full()).unwrap();
        assert!(rep.passed());
        let back = AnalysisReport::from_json(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
        assert!(check_report(&back, &d, b"x").unwrap().is_empty());
        assert!(rep.to_markdown().contains("so⁶"));
    }

    #[test]
    fn tampered_report_is_caught() {
        let d = fixtures::b3();
        let mut rep = analyze(&d, b"y", &full()).unwrap();
        rep.filtration.cells[1].basis.pop();
        assert!(!check_report(&rep, &d, b"y").unwrap().is_empty());
    }
}
