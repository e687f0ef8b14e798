use proptest::prelude::*;

use rimcheck_core::blockdata::{BlockRecord, CartanMatrix};
use rimcheck_core::exactmat::IntMatrix;
use rimcheck_core::verdict::{
    apply_rules, citation, render_verdict, replay, Equivalence, EquivalenceKind, Family,
    GroupDossier, NormalChainLink, OpPrimeDecomposition, RuleId, SimpleFactorRef, Status, Verdict,
    VerdictContext, VerdictError,
};

fn block(tag: &str, wild: bool, rows: &[&[i64]], exact: bool) -> BlockRecord {
    let m = IntMatrix::from_rows(rows.iter().map(|r| r.iter().copied())).unwrap();
    let c = if exact {
        CartanMatrix::exact(m)
    } else {
        CartanMatrix::lower_bound(m)
    }
    .unwrap();
    BlockRecord {
        group_id: "G".into(),
        prime: 5,
        block_tag: tag.into(),
        defect: 2,
        group_p_valuation: 2,
        p_rank: 2,
        wild,
        decomposition: None,
        cartan: Some(c),
        simple_dims: None,
        notes: None,
    }
    .finalize()
    .unwrap()
}

fn rules(v: &Verdict) -> Vec<RuleId> {
    v.trace.iter().map(|s| s.rule_id).collect()
}

fn run(d: &GroupDossier, ctx: &VerdictContext) -> Verdict {
    let v = apply_rules(d, ctx).unwrap();
    replay(&v, d, ctx).unwrap_or_else(|e| panic!("replay failed: {e}\n{}", render_verdict(&v)));
    v
}

#[test]
fn empty_dossier_is_unknown() {
    let v = run(&GroupDossier::new("G", 5), &VerdictContext::default());
    assert_eq!(v.status, Status::Unknown);
    assert!(v.trace.is_empty());
}

#[test]
fn blanket_p3() {
    let mut d = GroupDossier::new("G", 3);
    d.sylow.abelian = Some(true);
    d.wild = Some(true);
    let v = run(&d, &VerdictContext::default());
    assert_eq!(v.status, Status::AllAtEnd);
    assert_eq!(rules(&v), vec![RuleId::R8]);
    assert!(v.trace[0].citation.starts_with(&citation(RuleId::R8).label));

    // wildness is never assumed
    d.wild = None;
    assert_eq!(run(&d, &VerdictContext::default()).status, Status::Unknown);
    // nor is the principal block
    d.wild = Some(true);
    d.non_principal = true;
    assert_eq!(run(&d, &VerdictContext::default()).status, Status::Unknown);
}

#[test]
fn local_criteria_each_fire_their_rule() {
    let ctx = VerdictContext::default();
    let mut cases: Vec<(GroupDossier, RuleId)> = Vec::new();

    let mut d = GroupDossier::new("a", 5);
    d.predicates.has_nontrivial_normal_p_subgroup = Some(true);
    cases.push((d, RuleId::R1));
    let mut d = GroupDossier::new("b", 5);
    d.predicates.p_solvable = Some(true);
    cases.push((d, RuleId::R2));
    let mut d = GroupDossier::new("c", 3);
    d.predicates.perfect_lie_type_defining_char = Some(true);
    d.predicates.full_defect = Some(true);
    cases.push((d, RuleId::R3));
    let mut d = GroupDossier::new("d", 2);
    d.sylow.abelian = Some(true);
    cases.push((d, RuleId::R4));
    let mut d = GroupDossier::new("e", 5);
    d.predicates.symmetric_alternating_or_cover = Some(true);
    d.predicates.defect_divisible_by_p_cubed = Some(true);
    cases.push((d, RuleId::R5));

    for (d, rule) in cases {
        let v = run(&d, &ctx);
        assert_eq!(v.status, Status::AllAtEnd, "{}", d.name);
        assert_eq!(rules(&v), vec![rule], "{}", d.name);
    }
}

#[test]
fn lie_type_needs_full_defect_flag() {
    let mut d = GroupDossier::new("c", 3);
    d.predicates.perfect_lie_type_defining_char = Some(true);
    assert_eq!(run(&d, &VerdictContext::default()).status, Status::Unknown);
}

fn f42_context() -> (GroupDossier, VerdictContext) {
    let mut ctx = VerdictContext::default();
    ctx.blocks.insert(
        "f4_2_p5".into(),
        block(
            "principal",
            true,
            &[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]],
            true,
        ),
    );
    let mut d = GroupDossier::new("F4(2)", 5);
    d.block_refs = Some(vec!["f4_2_p5".into()]);
    (d, ctx)
}

#[test]
fn confirmed_off_rim_block() {
    let (d, ctx) = f42_context();
    let v = run(&d, &ctx);
    assert_eq!(v.status, Status::NotAllAtEnd);
    assert_eq!(rules(&v), vec![RuleId::R10]);
}

#[test]
fn not_wild_block_is_ignored() {
    let (d, mut ctx) = f42_context();
    ctx.blocks.get_mut("f4_2_p5").unwrap().wild = false;
    let v = run(&d, &ctx);
    assert_eq!(v.status, Status::Unknown);
    assert_eq!(v.advisories.len(), 1);
}

#[test]
fn candidate_patterns_only_advise() {
    let mut ctx = VerdictContext::default();
    ctx.blocks.insert(
        "b".into(),
        block(
            "principal",
            true,
            &[&[2, 1, 1, 0], &[1, 2, 1, 0], &[1, 1, 3, 1], &[0, 0, 1, 3]],
            true,
        ),
    );
    let mut d = GroupDossier::new("G", 5);
    d.block_refs = Some(vec!["b".into()]);
    let v = run(&d, &ctx);
    assert_eq!(v.status, Status::Unknown);
    assert!(v.advisories.iter().any(|a| a.rule_id == RuleId::R10));
}

#[test]
fn lower_bound_exclusion_gives_all_at_end() {
    let mut ctx = VerdictContext::default();
    ctx.blocks.insert(
        "gl".into(),
        block(
            "principal",
            true,
            &[
                &[3, 1, 2, 0, 1],
                &[1, 3, 2, 1, 0],
                &[2, 2, 3, 1, 1],
                &[0, 1, 1, 1, 0],
                &[1, 0, 1, 0, 1],
            ],
            false,
        ),
    );
    let mut d = GroupDossier::new("GL5", 3);
    d.block_refs = Some(vec!["gl".into()]);
    let v = run(&d, &ctx);
    assert_eq!(v.status, Status::AllAtEnd);
    assert_eq!(rules(&v), vec![RuleId::R9]);
}

#[test]
fn conflict_is_reported() {
    let (mut d, ctx) = f42_context();
    d.predicates.p_solvable = Some(true);
    match apply_rules(&d, &ctx) {
        Err(VerdictError::ConflictingDerivations {
            all_at_end,
            not_all_at_end,
            ..
        }) => {
            assert_eq!(all_at_end[0].rule_id, RuleId::R2);
            assert_eq!(not_all_at_end[0].rule_id, RuleId::R10);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn puig_chain_transfers_normalizer_verdict() {
    let mut ctx = VerdictContext::default();
    let mut n = GroupDossier::new("N", 3);
    n.predicates.has_nontrivial_normal_p_subgroup = Some(true);
    ctx.dossiers.insert("N".into(), n);
    let mut g = GroupDossier::new("G", 3);
    g.equivalences.push(Equivalence {
        target: "N".into(),
        kind: EquivalenceKind::Puig,
        citation: "KY10".into(),
    });
    let v = run(&g, &ctx);
    assert_eq!(v.status, Status::AllAtEnd);
    assert_eq!(rules(&v), vec![RuleId::R1, RuleId::R11]);
    assert_eq!(v.trace[0].subject(), "N");
    assert_eq!(v.trace[1].subject(), "G");
}

#[test]
fn equivalence_cycles_terminate() {
    let mut ctx = VerdictContext::default();
    for (a, b) in [("X", "Y"), ("Y", "X")] {
        let mut d = GroupDossier::new(a, 3);
        d.equivalences.push(Equivalence {
            target: b.into(),
            kind: EquivalenceKind::Morita,
            citation: "assumed".into(),
        });
        ctx.dossiers.insert(a.into(), d);
    }
    let x = ctx.dossiers["X"].clone();
    let v = run(&x, &ctx);
    assert_eq!(v.status, Status::Unknown);
    assert!(v
        .advisories
        .iter()
        .any(|a| a.inputs["note"].contains("cycle")));
}

#[test]
fn missing_reference_is_unknown_with_advisory() {
    let mut g = GroupDossier::new("G", 3);
    g.o_p_prime_quotient = Some("nowhere".into());
    let v = run(&g, &VerdictContext::default());
    assert_eq!(v.status, Status::Unknown);
    assert_eq!(v.advisories[0].rule_id, RuleId::R12);
}

#[test]
fn solvable_quotient_lift() {
    let mut ctx = VerdictContext::default();
    let mut n = GroupDossier::new("N", 5);
    n.predicates.p_solvable = Some(true);
    ctx.dossiers.insert("N".into(), n);
    let mut g = GroupDossier::new("G", 5);
    g.normal_chain = Some(vec![NormalChainLink {
        subgroup_name: "N".into(),
        quotient_solvable_p_prime: true,
        same_block_idempotent: true,
    }]);
    let v = run(&g, &ctx);
    assert_eq!(rules(&v), vec![RuleId::R2, RuleId::R6]);

    g.normal_chain.as_mut().unwrap()[0].same_block_idempotent = false;
    assert_eq!(run(&g, &ctx).status, Status::Unknown);
}

#[test]
fn solvable_quotient_does_not_lift_not_all_at_end() {
    let (n, mut ctx) = f42_context();
    ctx.dossiers.insert(n.name.clone(), n);
    let mut g = GroupDossier::new("G", 5);
    g.normal_chain = Some(vec![NormalChainLink {
        subgroup_name: "F4(2)".into(),
        quotient_solvable_p_prime: true,
        same_block_idempotent: true,
    }]);
    assert_eq!(run(&g, &ctx).status, Status::Unknown);
}

fn r7_dossier(q: bool, factors: usize, factor_ref: Option<&str>) -> GroupDossier {
    let mut d = GroupDossier::new("G", 5);
    d.sylow.abelian = Some(true);
    d.sylow.cyclic = Some(false);
    d.predicates.o_p_prime_trivial = Some(true);
    d.o_pprime_decomposition = Some(OpPrimeDecomposition {
        q_part_nontrivial: q,
        simple_factors: (0..factors)
            .map(|_| SimpleFactorRef {
                family: Family::Other,
                params: None,
                verdict_ref: factor_ref.map(str::to_string),
            })
            .collect(),
    });
    d
}

#[test]
fn r7_cases_are_exclusive_and_exhaustive() {
    let mut ctx = VerdictContext::default();
    let mut h = GroupDossier::new("H", 5);
    h.predicates.has_nontrivial_normal_p_subgroup = Some(true);
    ctx.dossiers.insert("H".into(), h);

    for q in [false, true] {
        for m in 0..4 {
            for r in [None, Some("H")] {
                let d = r7_dossier(q, m, r);
                let v = run(&d, &ctx);
                let cases: Vec<&str> = v
                    .trace
                    .iter()
                    .filter(|s| s.rule_id == RuleId::R7)
                    .map(|s| s.inputs["case"].as_str())
                    .collect();
                let expected: Vec<&str> = match (q, m, r) {
                    (true, _, _) => vec!["i"],
                    (false, m, _) if m >= 2 => vec!["ii"],
                    (false, 1, Some(_)) => vec!["iii"],
                    _ => vec![],
                };
                assert_eq!(cases, expected, "q={q} m={m} ref={r:?}");
            }
        }
    }
}

#[test]
fn r7_needs_noncyclic_and_odd_prime() {
    let ctx = VerdictContext::default();
    let mut d = r7_dossier(true, 0, None);
    d.sylow.cyclic = None;
    assert_eq!(run(&d, &ctx).status, Status::Unknown);
    let mut d = r7_dossier(true, 0, None);
    d.prime = 2;
    // R4 applies instead
    assert_eq!(rules(&run(&d, &ctx)), vec![RuleId::R4]);
    let mut d = r7_dossier(true, 0, None);
    d.non_principal = true;
    assert_eq!(run(&d, &ctx).status, Status::Unknown);
}

#[test]
fn r7_case_iii_via_block_ref() {
    let mut ctx = VerdictContext::default();
    ctx.blocks.insert(
        "h_p5".into(),
        block("principal", true, &[&[3, 1], &[1, 3]], true),
    );
    let v = run(&r7_dossier(false, 1, Some("h_p5")), &ctx);
    assert_eq!(rules(&v), vec![RuleId::R9, RuleId::R7]);
}

#[test]
fn periodic_product_gate() {
    let mut d = r7_dossier(false, 2, None);
    d.wild = Some(true);
    d.periodic_simple_claimed = Some(true);
    let v = run(&d, &VerdictContext::default());
    assert!(v.advisories.iter().any(|a| a.rule_id == RuleId::R13));
}

#[test]
fn malformed_dossier() {
    let mut d = GroupDossier::new("G", 4);
    assert!(matches!(
        apply_rules(&d, &VerdictContext::default()),
        Err(VerdictError::Malformed { .. })
    ));
    d.prime = 3;
    d.o_pprime_decomposition = Some(OpPrimeDecomposition {
        q_part_nontrivial: true,
        simple_factors: vec![],
    });
    assert!(apply_rules(&d, &VerdictContext::default()).is_err());
}

#[test]
fn tampered_trace_fails_replay() {
    let mut d = GroupDossier::new("G", 5);
    d.predicates.p_solvable = Some(true);
    let ctx = VerdictContext::default();
    let v = apply_rules(&d, &ctx).unwrap();
    d.predicates.p_solvable = None;
    assert!(replay(&v, &d, &ctx).is_err());

    let (d, ctx) = f42_context();
    let mut v = apply_rules(&d, &ctx).unwrap();
    v.trace[0]
        .inputs
        .insert("pattern".into(), "s=0 T=[1] n=2".into());
    assert!(replay(&v, &d, &ctx).is_err());
}

fn opt_bool() -> impl Strategy<Value = Option<bool>> {
    prop_oneof![Just(None), Just(Some(false)), Just(Some(true))]
}

fn random_dossier() -> impl Strategy<Value = GroupDossier> {
    (
        prop_oneof![Just(2u64), Just(3), Just(5)],
        proptest::collection::vec(opt_bool(), 12),
        0usize..3,
        0usize..4,
    )
        .prop_map(|(prime, b, blocks, m)| {
            let mut d = GroupDossier::new("G", prime);
            d.sylow.abelian = b[0];
            d.sylow.cyclic = b[1];
            d.predicates.p_solvable = b[2];
            d.predicates.has_nontrivial_normal_p_subgroup = b[3];
            d.predicates.perfect_lie_type_defining_char = b[4];
            d.predicates.full_defect = b[5];
            d.predicates.symmetric_alternating_or_cover = b[6];
            d.predicates.defect_divisible_by_p_cubed = b[7];
            d.predicates.o_p_prime_trivial = b[8];
            d.wild = b[9];
            if b[8] == Some(true) && b[10].is_some() {
                d.o_pprime_decomposition = Some(OpPrimeDecomposition {
                    q_part_nontrivial: b[10] == Some(true),
                    simple_factors: (0..m)
                        .map(|_| SimpleFactorRef {
                            family: Family::Other,
                            params: None,
                            verdict_ref: Some("h".into()),
                        })
                        .collect(),
                });
            }
            d.block_refs = match blocks {
                0 => None,
                1 => Some(vec!["off".into()]),
                _ => Some(vec!["empty".into()]),
            };
            if b[11] == Some(true) {
                d.equivalences.push(Equivalence {
                    target: "N".into(),
                    kind: EquivalenceKind::Puig,
                    citation: "assumed".into(),
                });
            }
            d
        })
}

fn rich_context() -> VerdictContext {
    let mut ctx = VerdictContext::default();
    ctx.blocks.insert(
        "off".into(),
        block("principal", true, &[&[2, 1], &[1, 3]], true),
    );
    ctx.blocks.insert(
        "empty".into(),
        block("principal", true, &[&[3, 1], &[1, 3]], true),
    );
    ctx.blocks
        .insert("h".into(), block("principal", true, &[&[4]], true));
    let mut n = GroupDossier::new("N", 3);
    n.predicates.has_nontrivial_normal_p_subgroup = Some(true);
    ctx.dossiers.insert("N".into(), n);
    ctx
}

/// Fills one absent fact of `d`, chosen by `k`.
fn add_fact(d: &GroupDossier, k: usize, v: bool) -> GroupDossier {
    let mut e = d.clone();
    let slots: [&mut Option<bool>; 9] = [
        &mut e.sylow.abelian,
        &mut e.sylow.cyclic,
        &mut e.predicates.p_solvable,
        &mut e.predicates.has_nontrivial_normal_p_subgroup,
        &mut e.predicates.perfect_lie_type_defining_char,
        &mut e.predicates.full_defect,
        &mut e.predicates.symmetric_alternating_or_cover,
        &mut e.predicates.defect_divisible_by_p_cubed,
        &mut e.wild,
    ];
    let slot = slots.into_iter().nth(k % 9).unwrap();
    if slot.is_none() {
        *slot = Some(v);
    }
    e
}

proptest! {
    #[test]
    fn traces_replay(d in random_dossier()) {
        let ctx = rich_context();
        if let Ok(v) = apply_rules(&d, &ctx) {
            prop_assert!(replay(&v, &d, &ctx).is_ok(), "{}", render_verdict(&v));
            prop_assert!(v.status == Status::Unknown || !v.trace.is_empty());
            if v.status == Status::NotAllAtEnd {
                prop_assert!(v.trace.iter().any(|s| s.rule_id == RuleId::R10));
            }
        }
    }

    #[test]
    fn knowledge_is_monotone(d in random_dossier(), k in 0usize..9, val in any::<bool>()) {
        let ctx = rich_context();
        let e = add_fact(&d, k, val);
        let (Ok(before), after) = (apply_rules(&d, &ctx), apply_rules(&e, &ctx)) else {
            return Ok(());
        };
        match after {
            Ok(after) => match before.status {
                Status::Unknown => {}
                s => prop_assert_eq!(after.status, s),
            },
            Err(VerdictError::ConflictingDerivations { .. }) => {}
            Err(other) => prop_assert!(false, "{other}"),
        }
    }

    #[test]
    fn output_is_deterministic(d in random_dossier()) {
        let ctx = rich_context();
        let a = apply_rules(&d, &ctx).map(|v| serde_json::to_string(&v).unwrap());
        let b = apply_rules(&d, &ctx).map(|v| serde_json::to_string(&v).unwrap());
        prop_assert_eq!(a, b);
    }
}
