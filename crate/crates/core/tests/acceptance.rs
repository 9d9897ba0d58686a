//! One test per acceptance criterion. Every check is exact. Each test prints
//! a single status line to stderr whether or not it passes.

mod common;

use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use common::oracle;
use homogeneity::data::{fixtures, InfinitesimalData};
use homogeneity::filtration::{build_complex, MuSystem, StabilizingPair};
use homogeneity::killing::{compute_killing, image_failure, phi_direct, verify_closure};
use homogeneity::linalg::{int, Matrix};
use homogeneity::model::{build_model, compute_s, verify_model, SMap};
use homogeneity::nomizu::{build_nomizu, build_transvection, compute_h0};
use homogeneity::recovery::{compare_data, recover_data};
use homogeneity::reductivity::{check_condition_ker, decide_strong_reductivity};
use homogeneity::report::{analyze, Options};
use rand::Rng;

/// Written straight to stderr so the line survives output capture.
fn status(id: u32, failures: &[String], elapsed: Duration, limit: Option<Duration>) {
    let mut failures = failures.to_vec();
    if let Some(limit) = limit {
        if elapsed > limit {
            failures.push(format!("runtime {elapsed:?} exceeds {limit:?}"));
        }
    }
    let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
    let detail = if failures.is_empty() {
        String::new()
    } else {
        format!(" -- {}", failures.join("; "))
    };
    let line = format!(
        "acceptance criterion {id}: {verdict} ({:.3}s){detail}\n",
        elapsed.as_secs_f64()
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(
        failures.is_empty(),
        "criterion {id}: {}",
        failures.join("; ")
    );
}

fn expect<T: PartialEq + std::fmt::Debug>(failures: &mut Vec<String>, what: &str, got: T, want: T) {
    if got != want {
        failures.push(format!("{what}: got {got:?}, expected {want:?}"));
    }
}

/// The largest strongly reductive stabilizing pair, if any.
fn reductive_pair(d: &InfinitesimalData) -> Option<StabilizingPair> {
    let mu = MuSystem::new(d);
    let complex = build_complex(d).unwrap();
    complex
        .stabilizing_pairs()
        .into_iter()
        .rev()
        .find(|p| decide_strong_reductivity(&mu, *p).is_ok_and(|v| v.strongly_reductive))
}

fn s_at(d: &InfinitesimalData, p: StabilizingPair) -> SMap {
    let mu = MuSystem::new(d);
    let v = decide_strong_reductivity(&mu, p).unwrap();
    compute_s(&mu, &v).unwrap()
}

/// The 100 strongly reductive random instances shared by several criteria.
fn shared_instances() -> &'static [InfinitesimalData] {
    static CELL: OnceLock<Vec<InfinitesimalData>> = OnceLock::new();
    CELL.get_or_init(|| random_instances(100, 2024).0)
}

/// Strongly reductive random instances of dimension 2 to 5, with the
/// number of rejected draws.
fn random_instances(count: usize, seed: u64) -> (Vec<InfinitesimalData>, usize) {
    let mut rng = common::rng(seed);
    let mut out = Vec::new();
    let mut rejected = 0;
    let mut i = 0;
    while out.len() < count {
        let n = 2 + (i / 4) % 4;
        let d = match i % 4 {
            0 => common::space_form_instance(&mut rng, n),
            1 => {
                let base =
                    fixtures::constant_curvature(n - n / 2, n / 2, &common::small_rat(&mut rng))
                        .unwrap();
                let f = common::random_isometry(&mut rng, &base.space);
                base.pullback(&f).unwrap()
            }
            2 => common::product_instance(&mut rng, n),
            _ => {
                let r = rng.gen_range(0..=1);
                common::lie_group_instance(&mut rng, n.min(4), if n > 3 { 0 } else { r })
            }
        };
        i += 1;
        if reductive_pair(&d).is_some() {
            out.push(d);
        } else {
            rejected += 1;
        }
    }
    (out, rejected)
}

#[test]
fn criterion_1_b3() {
    let t = Instant::now();
    let mut f = Vec::new();
    let d = fixtures::b3();
    let c = build_complex(&d).unwrap();
    expect(&mut f, "dim so(V)", c.so_dim, 6);
    expect(&mut f, "dim g(0)", c.g(0).dim(), 4);
    expect(&mut f, "g(0) = g(1)", c.g(0) == c.g(1), true);
    expect(&mut f, "k", c.k, Some(0));
    let mu = MuSystem::new(&d);
    match decide_strong_reductivity(&mu, StabilizingPair { r: 0, s: -1 }) {
        Ok(v) => {
            expect(&mut f, "complement at (0,-1)", v.n.is_some(), false);
            expect(&mut f, "strongly reductive", v.strongly_reductive, false);
        }
        Err(e) => f.push(format!("decision failed: {e}")),
    }
    status(1, &f, t.elapsed(), Some(Duration::from_secs(1)));
}

#[test]
fn criterion_2_pseudo_kahler() {
    let t = Instant::now();
    let mut f = Vec::new();
    let mut tables = Vec::new();
    for b in [int(0), int(1)] {
        let d = fixtures::pseudo_kahler(&b, Some(0)).unwrap();
        let c = build_complex(&d).unwrap();
        let tag = format!("b={b}");
        expect(&mut f, &format!("{tag} dim so(V)"), c.so_dim, 6);
        let g: Vec<usize> = (0..=2).map(|r| c.g(r).dim()).collect();
        expect(&mut f, &format!("{tag} dims g(0..2)"), g, vec![2, 1, 1]);
        let p: Vec<usize> = (0..=1).map(|s| c.p(s).dim()).collect();
        expect(&mut f, &format!("{tag} dims p(0..1)"), p, vec![4, 4]);
        let h0: Vec<usize> = (0..=2).map(|r| c.h(r, 0).dim()).collect();
        expect(&mut f, &format!("{tag} dims h(0..2,0)"), h0, vec![2, 1, 1]);
        let rows_agree = (0..=2).all(|r| c.h(r, 1) == c.h(r, 0));
        expect(&mut f, &format!("{tag} h(.,1) = h(.,0)"), rows_agree, true);
        expect(
            &mut f,
            &format!("{tag} (k,l)"),
            (c.k, c.l),
            (Some(1), Some(0)),
        );
        let pairs = c.stabilizing_pairs();
        expect(
            &mut f,
            &format!("{tag} (1,-1) stabilizing"),
            pairs.contains(&StabilizingPair { r: 1, s: -1 }),
            true,
        );
        tables.push(c.dims());
    }
    if tables.len() == 2 {
        expect(
            &mut f,
            "tables for b=0 and b=1 agree",
            tables[0] == tables[1],
            true,
        );
    }
    status(2, &f, t.elapsed(), Some(Duration::from_secs(5)));
}

#[test]
fn criterion_3_space_form() {
    let t = Instant::now();
    let mut f = Vec::new();
    let d = fixtures::constant_curvature(1, 3, &int(-1)).unwrap();
    let c = build_complex(&d).unwrap();
    match c.stabilizing_pairs().first() {
        None => f.push("no stabilizing pair".into()),
        Some(&p) => {
            let mu = MuSystem::new(&d);
            let v = decide_strong_reductivity(&mu, p).unwrap();
            let s = compute_s(&mu, &v).unwrap();
            expect(&mut f, "S = 0", s.is_zero(), true);
            let m = build_model(&d, &s).unwrap();
            let axioms = verify_model(&m);
            let failed: Vec<&str> = axioms
                .checks
                .iter()
                .filter(|a| !a.passed)
                .map(|a| a.name.as_str())
                .collect();
            expect(&mut f, "failed axioms", failed, vec![]);
            expect(&mut f, "axiom count", axioms.checks.len(), 8);
            let h0 = compute_h0(&m);
            match build_nomizu(&m, &h0) {
                Ok(g0) => {
                    expect(&mut f, "Nomizu dim", g0.dim(), 10);
                    expect(&mut f, "isotropy dim", g0.isotropy_dim(), 6);
                    expect(&mut f, "Jacobi", g0.jacobi_failure(), None);
                    match build_transvection(&m, &h0) {
                        Ok(tv) => expect(&mut f, "transvection = Nomizu", tv == g0, true),
                        Err(e) => f.push(format!("transvection: {e}")),
                    }
                }
                Err(e) => f.push(format!("nomizu: {e}")),
            }
        }
    }
    status(3, &f, t.elapsed(), Some(Duration::from_secs(1)));
}

#[test]
fn criterion_4_round_trip() {
    let t = Instant::now();
    let mut f = Vec::new();
    let instances = shared_instances();
    for (i, d) in instances.iter().enumerate() {
        let p = reductive_pair(d).expect("filtered");
        let s = s_at(d, p);
        let m = build_model(d, &s).unwrap();
        let back = match recover_data(&m, d.r, d.s, None) {
            Ok(b) => b,
            Err(e) => {
                f.push(format!("instance {i}: {e}"));
                continue;
            }
        };
        let c = compare_data(d, &back, None).unwrap();
        if !c.equal {
            f.push(format!(
                "instance {i} (dim {}): differs at {:?}",
                d.dim(),
                c.first_difference
            ));
        }
    }
    expect(&mut f, "instances", instances.len(), 100);
    status(4, &f, t.elapsed(), Some(Duration::from_secs(60)));
}

fn consistency(d: &InfinitesimalData, tag: &str, f: &mut Vec<String>) {
    let c = build_complex(d).unwrap();
    if !c.intersections_agree() {
        f.push(format!("{tag}: ker mu differs from g ∩ p"));
    }
    let mu = MuSystem::new(d);
    for p in c.stabilizing_pairs() {
        if !check_condition_ker(&mu, p).unwrap().passed {
            f.push(format!("{tag}: kernel condition fails at {p}"));
        }
        let Ok(v) = decide_strong_reductivity(&mu, p) else {
            f.push(format!("{tag}: decision fails at {p}"));
            continue;
        };
        if !v.strongly_reductive {
            continue;
        }
        let s = compute_s(&mu, &v).unwrap();
        let m = build_model(d, &s).unwrap();
        for (ab, k) in m.curvature_endos().iter().enumerate() {
            let inside = d.space.so_coords(k).is_some_and(|x| v.h.contains(&x));
            if !inside {
                f.push(format!(
                    "{tag}: K_(e{},e{}) not in h at {p}",
                    ab / d.dim(),
                    ab % d.dim()
                ));
                break;
            }
        }
    }
}

#[test]
fn criterion_5_condition_consistency() {
    let t = Instant::now();
    let mut f = Vec::new();
    let mut named: Vec<(String, InfinitesimalData)> = vec![
        ("b3".into(), fixtures::b3()),
        ("flat(2,1)".into(), fixtures::flat(2, 1).unwrap()),
        (
            "space form (1,3)".into(),
            fixtures::constant_curvature(1, 3, &int(-1)).unwrap(),
        ),
        (
            "space form (3,0)".into(),
            fixtures::constant_curvature(3, 0, &int(2)).unwrap(),
        ),
    ];
    for b in [int(0), int(1)] {
        for order in [None, Some(-1), Some(0)] {
            named.push((
                format!("pseudo-kahler b={b} s={order:?}"),
                fixtures::pseudo_kahler(&b, order).unwrap(),
            ));
        }
    }
    for (tag, d) in &named {
        consistency(d, tag, &mut f);
    }
    for (i, d) in shared_instances().iter().enumerate() {
        consistency(d, &format!("random {i}"), &mut f);
    }
    status(5, &f, t.elapsed(), None);
}

#[test]
fn criterion_6_killing() {
    let t = Instant::now();
    let mut f = Vec::new();

    let cc = fixtures::constant_curvature(1, 3, &int(-1)).unwrap();
    let k = compute_killing(&cc, true).unwrap();
    expect(
        &mut f,
        "space form dim kill (oracle)",
        oracle::killing_dims(&cc, false).0,
        10,
    );
    expect(&mut f, "space form dim kill", k.dim(), 10);
    let closure = verify_closure(&cc, &k).unwrap();
    expect(
        &mut f,
        "space form closure",
        (closure.closed, closure.jacobi),
        (true, Some(true)),
    );

    let b3 = fixtures::b3();
    let k = compute_killing(&b3, true).unwrap();
    expect(
        &mut f,
        "b3 dim kill (oracle)",
        oracle::killing_dims(&b3, false).0,
        8,
    );
    expect(&mut f, "b3 dim kill", k.dim(), 8);
    expect(
        &mut f,
        "b3 closure",
        verify_closure(&b3, &k).unwrap().closed,
        true,
    );

    for (tag, d) in [("space form", &cc), ("b3", &b3)] {
        let slice = compute_killing(d, false).unwrap().isotropy_slice().unwrap();
        let g0 = build_complex(d).unwrap().g(0).clone();
        expect(&mut f, &format!("{tag} kill^0 = g(0)"), slice == g0, true);
    }

    let mut reductive: Vec<(String, InfinitesimalData)> = vec![
        ("space form (1,3)".into(), cc.clone()),
        (
            "space form (2,2)".into(),
            fixtures::constant_curvature(2, 2, &int(3)).unwrap(),
        ),
        ("flat(3,0)".into(), fixtures::flat(3, 0).unwrap()),
    ];
    let mut rng = common::rng(77);
    for n in 3..=5 {
        let d = loop {
            let d = common::product_instance(&mut rng, n);
            if reductive_pair(&d).is_some() {
                break d;
            }
        };
        reductive.push((format!("product dim {n}"), d));
    }
    for (tag, d) in &reductive {
        let Some(p) = reductive_pair(d) else {
            f.push(format!("{tag}: not strongly reductive"));
            continue;
        };
        let s = s_at(d, p);
        let m = build_model(d, &s).unwrap();
        let h0: Vec<Matrix> = d.space.so_elements(&compute_h0(&m));
        let gk = compute_killing(d, true).unwrap();
        if let Some(i) = image_failure(d, &gk, &s, &h0, phi_direct) {
            f.push(format!(
                "{tag}: image of Nomizu basis element {i} not in gkill"
            ));
        }
    }
    status(6, &f, t.elapsed(), Some(Duration::from_secs(5)));
}

#[test]
fn criterion_7_determinism() {
    let t = Instant::now();
    let mut f = Vec::new();
    let opts = Options {
        pair: None,
        killing: true,
        coframe: true,
    };
    let inputs = [
        ("b3", fixtures::b3()),
        (
            "pseudo-kahler",
            fixtures::pseudo_kahler(&int(1), Some(0)).unwrap(),
        ),
        (
            "space form",
            fixtures::constant_curvature(1, 3, &int(-1)).unwrap(),
        ),
    ];
    for (tag, d) in &inputs {
        let bytes = homogeneity::data::json::to_json(d);
        let a = analyze(d, bytes.as_bytes(), &opts).unwrap().to_json();
        let b = analyze(d, bytes.as_bytes(), &opts).unwrap().to_json();
        if a != b {
            f.push(format!("{tag}: reports differ"));
        }
    }
    status(7, &f, t.elapsed(), None);
}
