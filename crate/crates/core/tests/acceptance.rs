//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so the lines are always printed.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lfgraph::autos::{
    self, check_structure, chi_p, count_automorphisms, count_automorphisms_vertex_level, decompose,
    delta_for, for_each_automorphism, for_each_automorphism_vertex_level, formula_card_n2,
    line_action, phi_bar, pi_extend, random_frobenius, random_generated_automorphism, random_phi,
    random_plane_automorphism, random_twin_table, sigma_swap, tau_from_table, BigCount,
    VertexPermutation,
};
use lfgraph::budget::Deadline;
use lfgraph::graph::{domination_number, is_dominating, pencil_witness, DomMode, Target};
use lfgraph::harness::{run_verify, Verdict, VerifyOptions};
use lfgraph::{LfGraph, Matrix, Side};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

/// Name, time limit in seconds, check.
type Criterion = (&'static str, u64, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn graph(q: usize, n: usize) -> LfGraph {
    LfGraph::for_order(q, n).expect("supported instance")
}

const MATRIX: [(usize, usize); 8] = [
    (2, 2),
    (3, 2),
    (4, 2),
    (5, 2),
    (2, 3),
    (3, 3),
    (4, 3),
    (5, 3),
];

fn regularity() -> Check {
    for (q, n) in MATRIX {
        let g = graph(q, n);
        let want = q.pow(n as u32 - 1) - 1;
        if let Some(v) = (0..g.vertex_count()).find(|&v| g.degree(v).unwrap() != want) {
            return Err(format!(
                "({q},{n}) vertex {v} has degree {}",
                g.degree(v).unwrap()
            ));
        }
    }
    Ok(format!("{} instances regular", MATRIX.len()))
}

fn line_counts() -> Check {
    for (q, n) in MATRIX {
        let g = graph(q, n);
        let want = (q.pow(n as u32) - 1) / (q - 1);
        for side in [Side::Vec, Side::Fun] {
            let got = g.lines().iter().filter(|l| l.side == side).count();
            ensure(got == want, || {
                format!("({q},{n}) {side:?}: {got} lines, expected {want}")
            })?;
        }
        ensure(g.twin_classes() == g.line_partition(), || {
            format!("({q},{n}) twin classes differ from lines")
        })?;
    }
    Ok("line counts and twin partitions agree".into())
}

fn connectivity() -> Check {
    for (q, n) in MATRIX {
        let g = graph(q, n);
        let comps = g.components();
        if n == 2 {
            ensure(comps.len() == q + 1, || {
                format!("({q},2) has {} components", comps.len())
            })?;
            for c in &comps {
                let set = |s: Side| {
                    lfgraph::bitset::BitSet::from_iter(
                        g.vertex_count(),
                        c.iter().copied().filter(|&v| g.side(v) == s),
                    )
                };
                let (l, r) = (set(Side::Vec), set(Side::Fun));
                ensure(
                    l.count() == q - 1 && r.count() == q - 1 && g.is_complete_bipartite(&l, &r),
                    || format!("({q},2) component {c:?} is not K_(q-1,q-1)"),
                )?;
            }
        } else {
            ensure(comps.len() == 1, || {
                format!("({q},{n}) has {} components", comps.len())
            })?;
        }
    }
    Ok("n=2: q+1 complete bipartite components; n=3: connected".into())
}

fn one_sided_domination() -> Check {
    let mut seen = vec![];
    for (q, n) in [(2, 2), (3, 2), (2, 3), (3, 3)] {
        let g = graph(q, n);
        let d = domination_number(&g, Target::Vec, DomMode::Standard, &Deadline::none())
            .map_err(|e| e.to_string())?;
        ensure(d.size == q + 1, || {
            format!("({q},{n}) vector side needs {}", d.size)
        })?;
        let w = pencil_witness(&g);
        ensure(
            w.len() == q + 1 && is_dominating(&g, Target::Vec, DomMode::Standard, &w),
            || format!("({q},{n}) pencil witness does not dominate"),
        )?;
        seen.push(format!("({q},{n})={}", d.size));
    }
    Ok(seen.join(" "))
}

fn whole_domination() -> Check {
    let mut seen = vec![];
    for (q, n) in [(2, 2), (3, 2), (2, 3)] {
        let g = graph(q, n);
        let std = domination_number(&g, Target::Whole, DomMode::Standard, &Deadline::none())
            .map_err(|e| e.to_string())?;
        let tot = domination_number(&g, Target::Whole, DomMode::Total, &Deadline::none())
            .map_err(|e| e.to_string())?;
        if n == 2 {
            ensure(tot.size == 2 * q + 2, || {
                format!("({q},2) total domination {}", tot.size)
            })?;
        }
        let opts = VerifyOptions {
            claims: Some(vec!["DOM-WHOLE-STD".into(), "DOM-WHOLE-TOT".into()]),
            ..Default::default()
        };
        let report = run_verify(q, n, &opts).map_err(|e| e.to_string())?;
        for id in ["DOM-WHOLE-STD", "DOM-WHOLE-TOT"] {
            let c = report.claim(id).unwrap();
            ensure(
                matches!(c.verdict, Verdict::Match | Verdict::Mismatch),
                || format!("{id} verdict {:?}", c.verdict),
            )?;
            ensure(
                c.formula.as_deref() == Some(&(2 * q + 2).to_string()),
                || format!("{id} formula missing"),
            )?;
            if c.verdict == Verdict::Mismatch {
                ensure(
                    c.witness
                        .as_ref()
                        .is_some_and(|w| w["dominating_set"].is_array()),
                    || format!("{id} mismatch without witness"),
                )?;
            }
        }
        seen.push(format!(
            "({q},{n}) std={} tot={} closed_form={}",
            std.size,
            tot.size,
            2 * q + 2
        ));
    }
    Ok(seen.join("; "))
}

fn plane_counts() -> Check {
    for (q, want) in [(2, 48u64), (3, 98304)] {
        let g = graph(q, 2);
        let c = count_automorphisms(&g, &Deadline::none()).map_err(|e| e.to_string())?;
        let f = formula_card_n2(q).unwrap();
        ensure(c.total == BigCount::from(want) && f == c.total, || {
            format!("q={q}: brute {} formula {f}", c.total)
        })?;
    }
    let direct = count_automorphisms_vertex_level(&graph(2, 2), &Deadline::none())
        .map_err(|e| e.to_string())?;
    ensure(direct == BigCount::from(48u32), || {
        format!("vertex-level (2,2) gave {direct}")
    })?;
    Ok("(2,2)=48 (3,2)=98304, quotient and vertex-level agree at (2,2)".into())
}

fn fano_count() -> Check {
    let g = graph(2, 3);
    let quotient = count_automorphisms(&g, &Deadline::none())
        .map_err(|e| e.to_string())?
        .total;
    let direct =
        count_automorphisms_vertex_level(&g, &Deadline::none()).map_err(|e| e.to_string())?;
    ensure(quotient == direct, || {
        format!("oracles disagree: {quotient} vs {direct}")
    })?;
    let opts = VerifyOptions {
        claims: Some(vec!["CARD-GEN".into()]),
        ..Default::default()
    };
    let c = run_verify(2, 3, &opts)
        .map_err(|e| e.to_string())?
        .claim("CARD-GEN")
        .cloned()
        .unwrap();
    ensure(
        matches!(c.verdict, Verdict::Match | Verdict::Mismatch),
        || format!("verdict {:?}", c.verdict),
    )?;
    Ok(format!(
        "oracles agree on {quotient}; formula {} -> {}",
        c.formula.unwrap(),
        c.verdict.label()
    ))
}

fn twin_stabilizer() -> Check {
    let g = graph(3, 2);
    let mut fixing = 0u64;
    let total = for_each_automorphism_vertex_level(&g, &Deadline::none(), |p| {
        if (0..g.vertex_count()).all(|x| g.line_of(p.apply(x)) == g.line_of(x)) {
            fixing += 1;
        }
    })
    .map_err(|e| e.to_string())?;
    ensure(fixing == 256, || {
        format!("{fixing} class-stabilizing automorphisms")
    })?;
    Ok(format!("{fixing} of {total} automorphisms fix every class"))
}

fn generators() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let instances = [(2, 2), (3, 2), (4, 2), (5, 2), (2, 3), (3, 3), (4, 3)];
    let graphs: Vec<LfGraph> = instances.iter().map(|&(q, n)| graph(q, n)).collect();
    let planes: Vec<&LfGraph> = graphs.iter().filter(|g| g.n() == 2).collect();
    let extension: Vec<&LfGraph> = graphs.iter().filter(|g| g.field().k() > 1).collect();
    let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
    let mut check =
        |name: &'static str, g: &LfGraph, p: &VertexPermutation| -> Result<(), String> {
            ensure(autos::is_automorphism(g, p), || {
                format!("{name} at ({},{}) is not an automorphism", g.q(), g.n())
            })?;
            *tally.entry(name).or_default() += 1;
            Ok(())
        };
    for i in 0..140 {
        let g = &graphs[i % graphs.len()];
        let p = Matrix::random_invertible(g.field(), g.n(), &mut rng);
        check("chi_P", g, &chi_p(g, &p).unwrap())?;
        check("sigma", g, &sigma_swap(g))?;
        check(
            "tau",
            g,
            &tau_from_table(g, &random_twin_table(g, &mut rng)).unwrap(),
        )?;
        let e = extension[i % extension.len()];
        check(
            "pi",
            e,
            &pi_extend(e, random_frobenius(e.field(), &mut rng)).unwrap(),
        )?;
        let pl = planes[i % planes.len()];
        check(
            "phi_bar",
            pl,
            &phi_bar(pl, &random_phi(pl.field(), &mut rng)).unwrap(),
        )?;
        let rho = random_plane_automorphism(pl, &mut rng).unwrap();
        check("delta", pl, &delta_for(pl, &rho).unwrap().perm)?;
        check(
            "composite",
            g,
            &random_generated_automorphism(g, &mut rng, true).unwrap(),
        )?;
    }
    let mut pairs = 0;
    for i in 0..120 {
        let g = &graphs[i % graphs.len()];
        let a = Matrix::random_invertible(g.field(), g.n(), &mut rng);
        let b = Matrix::random_invertible(g.field(), g.n(), &mut rng);
        let lhs = chi_p(g, &a).unwrap().compose(&chi_p(g, &b).unwrap());
        ensure(lhs == chi_p(g, &a.mul(&b).unwrap()).unwrap(), || {
            format!("homomorphism fails at ({},{})", g.q(), g.n())
        })?;
        pairs += 1;
    }
    let counts: Vec<String> = tally.iter().map(|(k, v)| format!("{k}:{v}")).collect();
    Ok(format!(
        "{}; homomorphism on {pairs} pairs",
        counts.join(" ")
    ))
}

fn structure() -> Check {
    let mut summary = vec![];
    for (q, n) in [(2, 3), (3, 2)] {
        let g = graph(q, n);
        let mut checked = 0u64;
        let mut failure: Option<String> = None;
        for_each_automorphism(&g, &Deadline::none(), |p| {
            if failure.is_some() {
                return;
            }
            checked += 1;
            if let Err(e) = line_action(&g, p) {
                failure = Some(format!("line action: {} {:?}", e.reason, e.witness));
                return;
            }
            if n == 3 {
                let v = check_structure(&g, p).unwrap();
                let ok = v.side_pure && v.n_commutation && v.intersection_identity != Some(false);
                if !ok {
                    failure = Some(format!("{v:?}"));
                }
            }
        })
        .map_err(|e| e.to_string())?;
        if let Some(f) = failure {
            return Err(format!("({q},{n}): {f}"));
        }
        summary.push(format!("({q},{n}) {checked} automorphisms"));
    }
    Ok(summary.join(", "))
}

fn decomposition() -> Check {
    let mut summary = vec![];
    for (q, n) in [(2, 3), (3, 2)] {
        let g = graph(q, n);
        let mut failure = None;
        let mut count = 0u64;
        for_each_automorphism(&g, &Deadline::none(), |p| {
            if failure.is_none() {
                count += 1;
                if let Err(e) = decompose(&g, p) {
                    failure = Some(e.to_string());
                }
            }
        })
        .map_err(|e| e.to_string())?;
        if let Some(f) = failure {
            return Err(format!("({q},{n}): {f}"));
        }
        summary.push(format!("({q},{n}) all {count}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (q, n) in [(3, 3), (4, 3)] {
        let g = graph(q, n);
        let mut swaps = 0;
        for _ in 0..100 {
            let rho = random_generated_automorphism(&g, &mut rng, true).unwrap();
            let d = decompose(&g, &rho).map_err(|e| format!("({q},{n}): {e}"))?;
            ensure(autos::compose(&g, &d).unwrap() == rho, || {
                format!("({q},{n}) round trip differs")
            })?;
            swaps += usize::from(d.swap);
        }
        ensure(swaps > 0, || format!("({q},{n}) no swap cases sampled"))?;
        summary.push(format!("({q},{n}) 100 random, {swaps} with swap"));
    }
    Ok(summary.join(", "))
}

fn determinism() -> Check {
    let opts = VerifyOptions {
        seed: 42,
        ..Default::default()
    };
    let a = run_verify(3, 2, &opts)
        .map_err(|e| e.to_string())?
        .to_json();
    let b = run_verify(3, 2, &opts)
        .map_err(|e| e.to_string())?
        .to_json();
    ensure(a == b, || "(3,2) reports differ".into())?;
    Ok(format!("two (3,2) reports identical ({} bytes)", a.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("regularity", 1, regularity),
        ("line count and twin classes", 1, line_counts),
        ("connectivity", 1, connectivity),
        ("one-sided domination", 30, one_sided_domination),
        ("whole-graph domination", 60, whole_domination),
        ("automorphism count n=2", 60, plane_counts),
        ("automorphism count n=3", 120, fano_count),
        ("twin-class stabilizer", 60, twin_stabilizer),
        ("generator soundness", 30, generators),
        ("structural properties", 120, structure),
        ("decomposition round trip", 120, decomposition),
        ("report determinism", 5, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match result {
            Ok(d) if elapsed > Duration::from_secs(limit) => {
                Err(format!("{d}; took {elapsed:.2?}, limit {limit}s"))
            }
            r => r,
        };
        match result {
            Ok(detail) => println!(
                "PASS criterion {:>2} {name} ({elapsed:.2?}): {detail}",
                i + 1
            ),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name} ({elapsed:.2?}): {why}", i + 1);
            }
        }
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
