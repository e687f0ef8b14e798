//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line, then exits nonzero if any
//! failed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rimcheck_core::blockdata::{clifford_counts, load_block_file, CartanMatrix, CliffordError};
use rimcheck_core::corpus::{default_corpus_dir, verify_corpus, Outcome};
use rimcheck_core::exactmat::IntMatrix;
use rimcheck_core::kawata::{
    detect_patterns, exclude_by_lower_bounds, synth_pattern_matrix, ExclusionResult, KawataPattern,
};
use rimcheck_core::verdict::{
    apply_rules, citation, load_dossier_file, replay, GroupDossier, RuleId, Status, VerdictContext,
};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn matrix(rows: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_rows(rows.iter().map(|r| r.iter().copied())).unwrap()
}

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("{what} took {elapsed:?}, limit {limit:?}")
    })
}

/// Every (T, s) checked entry by entry; T ranges over all nonempty subsets.
fn brute_force(c: &[Vec<i64>]) -> Vec<KawataPattern> {
    let k = c.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << k) {
        let t_set: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).collect();
        for s in (0..k).filter(|&s| mask >> s & 1 == 0) {
            let fits = t_set.iter().all(|&t| {
                (0..k).all(|j| {
                    let want = if j == t {
                        2
                    } else if j == s || mask >> j & 1 == 1 {
                        1
                    } else {
                        0
                    };
                    c[t][j] == want
                })
            });
            if fits {
                out.push(KawataPattern::new(s, t_set.clone(), k));
            }
        }
    }
    out.sort();
    out
}

fn random_symmetric(
    rng: &mut ChaCha8Rng,
    k: usize,
    values: &[i64],
    min_diag: i64,
) -> Vec<Vec<i64>> {
    let mut c = vec![vec![0; k]; k];
    for i in 0..k {
        for j in i..k {
            let mut v = values[rng.gen_range(0..values.len())];
            if i == j {
                v = v.max(min_diag);
            }
            c[i][j] = v;
            c[j][i] = v;
        }
    }
    c
}

fn golden_products() -> Check {
    let expected = [
        (
            "gl4_unipotent",
            vec![
                vec![4, 2, 1, 2, 1],
                vec![2, 3, 2, 1, 0],
                vec![1, 2, 2, 1, 0],
                vec![2, 1, 1, 2, 1],
                vec![1, 0, 0, 1, 1],
            ],
        ),
        (
            "gl5_unipotent",
            vec![
                vec![3, 1, 2, 0, 1],
                vec![1, 3, 2, 1, 0],
                vec![2, 2, 3, 1, 1],
                vec![0, 1, 1, 1, 0],
                vec![1, 0, 1, 0, 1],
            ],
        ),
    ];
    let mut slowest = Duration::ZERO;
    for (id, want) in expected {
        let rec = load_block_file(&default_corpus_dir().join(format!("blocks/{id}.block.json")))
            .map_err(|e| e.to_string())?;
        let d = rec
            .decomposition
            .as_ref()
            .ok_or(format!("{id}: no decomposition matrix"))?;
        let start = Instant::now();
        let c = d.matrix.transpose_multiply().map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed());
        ensure(c == matrix(&want), || {
            format!("{id}: product differs:\n{c:?}")
        })?;
    }
    within(slowest, Duration::from_millis(10), "product")?;
    Ok(format!("2 matrices equal, slowest {slowest:?}"))
}

fn golden_exclusion() -> Check {
    let mut slowest = Duration::ZERO;
    for id in ["gl4_unipotent", "gl5_unipotent"] {
        let rec = load_block_file(&default_corpus_dir().join(format!("blocks/{id}.block.json")))
            .map_err(|e| e.to_string())?;
        let d = rec
            .decomposition
            .as_ref()
            .ok_or(format!("{id}: no decomposition matrix"))?;
        let start = Instant::now();
        let lb = CartanMatrix::lower_bound(d.matrix.transpose_multiply().unwrap()).unwrap();
        let r = exclude_by_lower_bounds(&lb).map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed());
        ensure(r == ExclusionResult::Excluded, || format!("{id}: {r:?}"))?;
    }
    within(slowest, Duration::from_millis(10), "exclusion")?;
    Ok(format!("both Excluded, slowest {slowest:?}"))
}

fn oracle_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let start = Instant::now();
    let (mut with_patterns, total) = (0, 10_000);
    for case in 0..total {
        let k = rng.gen_range(1..=8);
        // Bias towards 1 and 2 so that patterns actually occur.
        let c = random_symmetric(&mut rng, k, &[0, 0, 1, 1, 1, 2, 2, 3], 1);
        let cm = CartanMatrix::exact(matrix(&c)).map_err(|e| e.to_string())?;
        let got = detect_patterns(&cm).map_err(|e| e.to_string())?;
        let want = brute_force(&c);
        ensure(got == want, || {
            format!("case {case}: {c:?}\n detector {got:?}\n oracle {want:?}")
        })?;
        with_patterns += usize::from(!want.is_empty());
    }
    within(start.elapsed(), Duration::from_secs(60), "oracle run")?;
    ensure(with_patterns > 500, || {
        format!("only {with_patterns} matrices had patterns")
    })?;
    Ok(format!(
        "{total} matrices, 0 mismatches, {with_patterns} with patterns, {:?}",
        start.elapsed()
    ))
}

fn planted_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut total = 0;
    for n in 2..=6 {
        for ell in 1..=4 {
            for _ in 0..1000 {
                let mut f = random_symmetric(&mut rng, ell, &[0, 1, 2, 3, 4], 1);
                f[0][0] = rng.gen_range(2..6);
                let c = synth_pattern_matrix(n, &matrix(&f)).map_err(|e| e.to_string())?;
                let planted = KawataPattern::new(n - 1, (0..n - 1).collect(), n - 1 + ell);
                let found = detect_patterns(&c).map_err(|e| e.to_string())?;
                ensure(found.contains(&planted), || {
                    format!("n={n} ell={ell} filler {f:?}: planted pattern missing from {found:?}")
                })?;
                total += 1;
            }
        }
    }
    Ok(format!("{total} planted matrices, 0 misses"))
}

fn exclusion_soundness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut excluded, mut completions) = (0, 0);
    for _ in 0..3000 {
        let k = rng.gen_range(1..=7);
        let lb = random_symmetric(&mut rng, k, &[0, 0, 0, 1, 1, 2, 3], 1);
        let r = exclude_by_lower_bounds(&CartanMatrix::lower_bound(matrix(&lb)).unwrap())
            .map_err(|e| e.to_string())?;
        if !r.is_excluded() {
            continue;
        }
        excluded += 1;
        for _ in 0..100 {
            let mut c = lb.clone();
            for i in 0..k {
                for j in i..k {
                    if rng.gen_bool(0.3) {
                        let inc = rng.gen_range(1..3);
                        c[i][j] += inc;
                        if i != j {
                            c[j][i] += inc;
                        }
                    }
                }
            }
            let cm = CartanMatrix::exact(matrix(&c)).map_err(|e| e.to_string())?;
            let found = detect_patterns(&cm).map_err(|e| e.to_string())?;
            ensure(found.is_empty(), || {
                format!("lower bound {lb:?} was Excluded but completion {c:?} has {found:?}")
            })?;
            completions += 1;
        }
    }
    ensure(excluded >= 100, || {
        format!("only {excluded} Excluded samples")
    })?;
    Ok(format!(
        "{excluded} Excluded lower bounds, {completions} completions, 0 violations"
    ))
}

fn corpus_reproduction() -> Check {
    let start = Instant::now();
    let report = verify_corpus(&default_corpus_dir(), None).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    for e in &report.entries {
        ensure(e.outcome == Outcome::Pass, || {
            format!("{}: {:?} {:?}", e.id, e.outcome, e.reason)
        })?;
    }
    let required = [
        "a8_p3",
        "m22_p3",
        "on_p3",
        "a7_p3",
        "m11_p3",
        "m23_p3",
        "hs_p3",
        "gl4_unipotent",
        "gl5_unipotent",
        "psl2_9",
        "psu3_q5",
        "psp4_q4",
        "psu4_q4",
        "psu5_q4",
    ];
    for id in required {
        ensure(report.entries.iter().any(|e| e.id == id), || {
            format!("entry {id} missing")
        })?;
    }
    let psl2_9 = report.entries.iter().find(|e| e.id == "psl2_9").unwrap();
    let trace_has_r3 = psl2_9
        .checks
        .iter()
        .flat_map(|c| c.trace.iter().flatten())
        .any(|s| s.rule_id == RuleId::R3 && s.citation.starts_with(&citation(RuleId::R3).label));
    ensure(trace_has_r3, || "psl2_9 trace lacks the R3 step".into())?;
    for id in ["psu3_q5", "psp4_q4", "psu4_q4", "psu5_q4"] {
        let e = report.entries.iter().find(|e| e.id == id).unwrap();
        let chain = e
            .checks
            .iter()
            .flat_map(|c| c.trace.iter().flatten())
            .any(|s| {
                s.rule_id == RuleId::R11
                    && s.inputs.get("equivalence").map(String::as_str) == Some("puig")
            });
        ensure(chain, || format!("{id}: no Puig transfer step"))?;
    }
    within(elapsed, Duration::from_secs(5), "corpus run")?;
    Ok(format!("{} entries pass in {elapsed:?}", report.passed))
}

fn rule_engine_suite() -> Check {
    let empty = VerdictContext::default();
    let mut cases: Vec<(GroupDossier, RuleId)> = Vec::new();

    let mut d = GroupDossier::new("abelian_p3", 3);
    d.sylow.abelian = Some(true);
    d.wild = Some(true);
    cases.push((d, RuleId::R8));
    let mut d = GroupDossier::new("normal_p", 5);
    d.predicates.has_nontrivial_normal_p_subgroup = Some(true);
    cases.push((d, RuleId::R1));
    let mut d = GroupDossier::new("p_solvable", 5);
    d.predicates.p_solvable = Some(true);
    cases.push((d, RuleId::R2));
    let mut d = GroupDossier::new("lie_type", 3);
    d.predicates.perfect_lie_type_defining_char = Some(true);
    d.predicates.full_defect = Some(true);
    cases.push((d, RuleId::R3));
    let mut d = GroupDossier::new("abelian_p2", 2);
    d.sylow.abelian = Some(true);
    cases.push((d, RuleId::R4));
    let mut d = GroupDossier::new("alternating", 5);
    d.predicates.symmetric_alternating_or_cover = Some(true);
    d.predicates.defect_divisible_by_p_cubed = Some(true);
    cases.push((d, RuleId::R5));

    for (d, rule) in &cases {
        let v = apply_rules(d, &empty).map_err(|e| format!("{}: {e}", d.name))?;
        ensure(v.status == Status::AllAtEnd, || {
            format!("{}: {:?}", d.name, v.status)
        })?;
        let rules: Vec<RuleId> = v.trace.iter().map(|s| s.rule_id).collect();
        ensure(rules == vec![*rule], || {
            format!("{}: rules {rules:?}", d.name)
        })?;
        replay(&v, d, &empty).map_err(|e| format!("{}: replay: {e}", d.name))?;
    }

    let data = data_dir();
    let mut ctx = VerdictContext::default();
    ctx.add_blocks_dir(&data.join("blocks"))
        .map_err(|e| e.to_string())?;
    let f4 =
        load_dossier_file(&data.join("dossiers/f4_2.dossier.json")).map_err(|e| e.to_string())?;
    let v = apply_rules(&f4, &ctx).map_err(|e| e.to_string())?;
    ensure(v.status == Status::NotAllAtEnd, || {
        format!("F4(2)-style: {:?}", v.status)
    })?;
    replay(&v, &f4, &ctx).map_err(|e| format!("F4(2)-style replay: {e}"))?;

    let out = Command::new(env!("CARGO_BIN_EXE_rimcheck"))
        .arg("verdict")
        .arg(data.join("dossiers/f4_2_conflict.dossier.json"))
        .arg("--blocks")
        .arg(data.join("blocks"))
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(3), || {
        format!("conflict exit status {:?}", out.status)
    })?;
    Ok(format!(
        "{} AllAtEnd dossiers, F4(2)-style NotAllAtEnd, conflict exits 3, all traces replay",
        cases.len()
    ))
}

fn clifford_counting() -> Check {
    let mut checked = 0;
    for q in [2u64, 3, 5, 7] {
        for m in 0..=50u64 {
            for ell in 0..=50u64 {
                let (nb, ns) = (m * q + ell, m + ell * q);
                let c = clifford_counts(nb, ns, q)
                    .map_err(|e| format!("m={m} ell={ell} q={q}: {e}"))?;
                ensure((c.m, c.ell) == (m, ell), || {
                    format!(
                        "q={q} ({nb}, {ns}) solved as ({}, {}), planted ({m}, {ell})",
                        c.m, c.ell
                    )
                })?;
                checked += 1;
            }
        }
    }
    ensure(checked == 10_404, || format!("{checked} cases"))?;

    // A pair is realizable iff some m in 0..=nb/q leaves ell = nb - m·q with
    // m + ell·q = ns.
    let realizable = |nb: u64, ns: u64, q: u64| (0..=nb / q).any(|m| m + (nb - m * q) * q == ns);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut rejected = 0;
    while rejected < 1000 {
        let q = [2u64, 3, 5, 7][rng.gen_range(0..4)];
        let (nb, ns) = (rng.gen_range(0..400), rng.gen_range(0..400));
        if realizable(nb, ns, q) {
            continue;
        }
        match clifford_counts(nb, ns, q) {
            Err(CliffordError::InconsistentCounts { .. }) => rejected += 1,
            other => return Err(format!("({nb}, {ns}, q={q}) gave {other:?}")),
        }
    }
    Ok(format!(
        "{checked} inverse cases exact, {rejected} non-realizable pairs rejected"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("transpose-product golden matrices", golden_products),
        (
            "lower-bound exclusion of the GL4/GL5 products",
            golden_exclusion,
        ),
        ("detector vs brute-force oracle", oracle_equivalence),
        ("planted-pattern round trip", planted_round_trip),
        ("exclusion soundness sampling", exclusion_soundness),
        ("corpus reproduction", corpus_reproduction),
        ("verdict engine rule suite", rule_engine_suite),
        ("Clifford counting", clifford_counting),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>())));
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {reason}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
