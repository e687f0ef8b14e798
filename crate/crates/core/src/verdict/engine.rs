use std::collections::BTreeMap;

use super::{
    citation, Conclusion, GroupDossier, RuleId, Status, TraceStep, Verdict, VerdictContext,
    VerdictError,
};
use crate::blockdata::{BlockRecord, Exactness};
use crate::kawata::{classify_pattern, detect_patterns, exclude_by_lower_bounds, PatternClass};

fn step(
    rule: RuleId,
    subject: &str,
    inputs: &[(&str, String)],
    conclusion: Conclusion,
) -> TraceStep {
    let mut map = BTreeMap::new();
    map.insert("subject".to_string(), subject.to_string());
    for (k, v) in inputs {
        map.insert((*k).to_string(), v.clone());
    }
    TraceStep {
        rule_id: rule,
        citation: citation(rule).render(),
        inputs: map,
        conclusion,
    }
}

fn yes(b: Option<bool>) -> bool {
    b == Some(true)
}

/// Derivations collected for one subject. Each entry is a chain of steps
/// whose last step concludes about the subject.
#[derive(Default)]
struct Findings {
    derivations: Vec<(Status, Vec<TraceStep>)>,
    advisories: Vec<TraceStep>,
}

impl Findings {
    fn derive(&mut self, status: Status, mut prefix: Vec<TraceStep>, last: TraceStep) {
        prefix.push(last);
        self.derivations.push((status, prefix));
    }

    fn advise(&mut self, rule: RuleId, subject: &str, note: String) {
        self.advisories
            .push(step(rule, subject, &[("note", note)], Conclusion::Advisory));
    }

    fn finish(self, subject: &str) -> Result<Verdict, VerdictError> {
        let mut all = Vec::new();
        let mut not = Vec::new();
        for (status, steps) in self.derivations {
            match status {
                Status::AllAtEnd => push_unique(&mut all, steps),
                Status::NotAllAtEnd => push_unique(&mut not, steps),
                Status::Unknown => {}
            }
        }
        if !all.is_empty() && !not.is_empty() {
            return Err(VerdictError::ConflictingDerivations {
                subject: subject.to_string(),
                all_at_end: all,
                not_all_at_end: not,
            });
        }
        let (status, trace) = if !all.is_empty() {
            (Status::AllAtEnd, all)
        } else if !not.is_empty() {
            (Status::NotAllAtEnd, not)
        } else {
            (Status::Unknown, Vec::new())
        };
        let mut advisories = Vec::new();
        push_unique(&mut advisories, self.advisories);
        Ok(Verdict {
            subject: subject.to_string(),
            status,
            trace,
            advisories,
        })
    }
}

/// Appends steps not already present, so a shared sub-derivation is listed
/// once.
fn push_unique(out: &mut Vec<TraceStep>, steps: Vec<TraceStep>) {
    for s in steps {
        if !out.contains(&s) {
            out.push(s);
        }
    }
}

struct Engine<'a> {
    ctx: &'a VerdictContext,
    in_progress: Vec<String>,
}

/// Outcome of consulting another dossier or block.
enum Lookup {
    Found(Verdict),
    Missing,
    Cycle,
}

impl<'a> Engine<'a> {
    fn lookup_dossier(&mut self, name: &str) -> Result<Lookup, VerdictError> {
        if self.in_progress.iter().any(|n| n == name) {
            return Ok(Lookup::Cycle);
        }
        match self.ctx.dossiers.get(name) {
            Some(d) => self.dossier(d).map(Lookup::Found),
            None => Ok(Lookup::Missing),
        }
    }

    /// Block ids take precedence over dossier names.
    fn lookup_ref(&mut self, name: &str) -> Result<Lookup, VerdictError> {
        match self.ctx.blocks.get(name) {
            Some(b) => block_verdict(name, b, true).map(Lookup::Found),
            None => self.lookup_dossier(name),
        }
    }

    /// Common handling of rules that carry a verdict over from `target`.
    fn transfer(
        &mut self,
        f: &mut Findings,
        rule: RuleId,
        subject: &str,
        target: &str,
        lookup: Lookup,
        allowed: &[Status],
        inputs: &[(&str, String)],
    ) {
        match lookup {
            Lookup::Found(v) => {
                f.advisories.extend(v.advisories.iter().cloned());
                if allowed.contains(&v.status) {
                    let mut ins = inputs.to_vec();
                    ins.push(("source", target.to_string()));
                    ins.push(("source_status", v.status.to_string()));
                    let last = step(rule, subject, &ins, v.status.into());
                    f.derive(v.status, v.trace, last);
                }
            }
            Lookup::Missing => f.advise(rule, subject, format!("reference `{target}` not found")),
            Lookup::Cycle => f.advise(
                rule,
                subject,
                format!("reference `{target}` is already being evaluated (cycle)"),
            ),
        }
    }

    fn dossier(&mut self, d: &GroupDossier) -> Result<Verdict, VerdictError> {
        d.check()?;
        self.in_progress.push(d.name.clone());
        let out = self.rules(d);
        self.in_progress.pop();
        out?.finish(&d.name)
    }

    fn rules(&mut self, d: &GroupDossier) -> Result<Findings, VerdictError> {
        let mut f = Findings::default();
        let name = d.name.as_str();
        let principal = d.is_principal() && !self.ctx.force_non_principal;
        let p = &d.predicates;
        let s = &d.sylow;
        let t = || "true".to_string();

        for rule in RuleId::ALL {
            match rule {
                RuleId::R1 if yes(p.has_nontrivial_normal_p_subgroup) => f.derive(
                    Status::AllAtEnd,
                    vec![],
                    step(
                        rule,
                        name,
                        &[("has_nontrivial_normal_p_subgroup", t())],
                        Conclusion::AllAtEnd,
                    ),
                ),
                RuleId::R2 if yes(p.p_solvable) => f.derive(
                    Status::AllAtEnd,
                    vec![],
                    step(rule, name, &[("p_solvable", t())], Conclusion::AllAtEnd),
                ),
                RuleId::R3 if yes(p.perfect_lie_type_defining_char) && yes(p.full_defect) => f
                    .derive(
                        Status::AllAtEnd,
                        vec![],
                        step(
                            rule,
                            name,
                            &[
                                ("perfect_lie_type_defining_char", t()),
                                ("full_defect", t()),
                            ],
                            Conclusion::AllAtEnd,
                        ),
                    ),
                RuleId::R4 if principal && d.prime == 2 && yes(s.abelian) => f.derive(
                    Status::AllAtEnd,
                    vec![],
                    step(
                        rule,
                        name,
                        &[
                            ("prime", "2".into()),
                            ("sylow.abelian", t()),
                            ("block", "principal".into()),
                        ],
                        Conclusion::AllAtEnd,
                    ),
                ),
                RuleId::R5
                    if yes(p.symmetric_alternating_or_cover)
                        && yes(p.defect_divisible_by_p_cubed) =>
                {
                    f.derive(
                        Status::AllAtEnd,
                        vec![],
                        step(
                            rule,
                            name,
                            &[
                                ("symmetric_alternating_or_cover", t()),
                                ("defect_divisible_by_p_cubed", t()),
                            ],
                            Conclusion::AllAtEnd,
                        ),
                    )
                }
                RuleId::R6 => {
                    for link in d.normal_chain.iter().flatten() {
                        if !(link.quotient_solvable_p_prime && link.same_block_idempotent) {
                            continue;
                        }
                        let lookup = self.lookup_dossier(&link.subgroup_name)?;
                        self.transfer(
                            &mut f,
                            rule,
                            name,
                            &link.subgroup_name,
                            lookup,
                            &[Status::AllAtEnd],
                            &[
                                ("quotient_solvable_p_prime", t()),
                                ("same_block_idempotent", t()),
                            ],
                        );
                    }
                }
                RuleId::R7 => self.rule7(&mut f, d, principal)?,
                RuleId::R8 if principal && d.prime == 3 && yes(s.abelian) && yes(d.wild) => f
                    .derive(
                        Status::AllAtEnd,
                        vec![],
                        step(
                            rule,
                            name,
                            &[
                                ("prime", "3".into()),
                                ("sylow.abelian", t()),
                                ("wild", t()),
                                ("block", "principal".into()),
                            ],
                            Conclusion::AllAtEnd,
                        ),
                    ),
                // R9 and R10 read the same blocks and are handled together
                RuleId::R9 => {
                    for id in d.block_refs.iter().flatten() {
                        match self.ctx.blocks.get(id) {
                            None => f.advise(rule, name, format!("block `{id}` not found")),
                            Some(b) if principal && b.block_tag != "principal" => f.advise(
                                rule,
                                name,
                                format!("block `{id}` is tagged `{}`, not principal", b.block_tag),
                            ),
                            Some(b) => kawata_findings(&mut f, name, id, b)?,
                        }
                    }
                }
                RuleId::R11 => {
                    for eq in &d.equivalences {
                        let lookup = self.lookup_dossier(&eq.target)?;
                        self.transfer(
                            &mut f,
                            rule,
                            name,
                            &eq.target,
                            lookup,
                            &[Status::AllAtEnd, Status::NotAllAtEnd],
                            &[
                                ("equivalence", format!("{:?}", eq.kind).to_lowercase()),
                                ("equivalence_citation", eq.citation.clone()),
                            ],
                        );
                    }
                }
                RuleId::R12 if principal => {
                    if let Some(q) = &d.o_p_prime_quotient {
                        let lookup = self.lookup_dossier(q)?;
                        self.transfer(
                            &mut f,
                            rule,
                            name,
                            q,
                            lookup,
                            &[Status::AllAtEnd, Status::NotAllAtEnd],
                            &[("relation", "G/O_{p'}(G)".into())],
                        );
                    }
                }
                RuleId::R13 => {
                    if let Some(dec) = &d.o_pprime_decomposition {
                        let factors = dec.simple_factors.len() + usize::from(dec.q_part_nontrivial);
                        if principal
                            && yes(d.wild)
                            && yes(d.periodic_simple_claimed)
                            && factors >= 2
                        {
                            f.advise(
                                rule,
                                name,
                                format!(
                                    "inconsistent: periodic simple module claimed in a wild principal \
                                     block of a product with {factors} factors of order divisible by p"
                                ),
                            );
                        }
                    }
                }
                _ => {}
            }
        }
        Ok(f)
    }

    fn rule7(
        &mut self,
        f: &mut Findings,
        d: &GroupDossier,
        principal: bool,
    ) -> Result<(), VerdictError> {
        let rule = RuleId::R7;
        let Some(dec) = &d.o_pprime_decomposition else {
            return Ok(());
        };
        let s = &d.sylow;
        if !(principal
            && d.prime % 2 == 1
            && yes(s.abelian)
            && s.cyclic == Some(false)
            && yes(d.predicates.o_p_prime_trivial))
        {
            return Ok(());
        }
        let m = dec.simple_factors.len();
        let mut inputs = vec![
            ("prime", d.prime.to_string()),
            ("sylow.abelian", "true".into()),
            ("sylow.cyclic", "false".into()),
            ("o_p_prime_trivial", "true".into()),
            ("q_part_nontrivial", dec.q_part_nontrivial.to_string()),
            ("m", m.to_string()),
        ];
        match (dec.q_part_nontrivial, m) {
            (true, _) => {
                inputs.push(("case", "i".into()));
                f.derive(
                    Status::AllAtEnd,
                    vec![],
                    step(rule, &d.name, &inputs, Conclusion::AllAtEnd),
                );
            }
            (false, m) if m >= 2 => {
                inputs.push(("case", "ii".into()));
                f.derive(
                    Status::AllAtEnd,
                    vec![],
                    step(rule, &d.name, &inputs, Conclusion::AllAtEnd),
                );
            }
            (false, 1) => {
                let factor = &dec.simple_factors[0];
                let Some(target) = &factor.verdict_ref else {
                    f.advise(
                        rule,
                        &d.name,
                        "case (iii) needs a verdict_ref for H_1".into(),
                    );
                    return Ok(());
                };
                inputs.push(("case", "iii".into()));
                let lookup = self.lookup_ref(target)?;
                self.transfer(
                    f,
                    rule,
                    &d.name,
                    target,
                    lookup,
                    &[Status::AllAtEnd],
                    &inputs,
                );
            }
            _ => {}
        }
        Ok(())
    }
}

/// R9/R10 for one linked block, concluding about `subject`.
fn kawata_findings(
    f: &mut Findings,
    subject: &str,
    id: &str,
    b: &BlockRecord,
) -> Result<(), VerdictError> {
    let malformed = |detail: String| VerdictError::Malformed {
        dossier: subject.to_string(),
        detail,
    };
    if !b.wild {
        f.advise(
            RuleId::R9,
            subject,
            format!("block `{id}` is not asserted wild; Cartan criteria do not apply"),
        );
        return Ok(());
    }
    let c = b.cartan();
    match c.exactness {
        Exactness::Exact => {
            let patterns =
                detect_patterns(c).map_err(|e| malformed(format!("block `{id}`: {e}")))?;
            if patterns.is_empty() {
                f.derive(
                    Status::AllAtEnd,
                    vec![],
                    step(
                        RuleId::R9,
                        subject,
                        &[
                            ("block", id.to_string()),
                            ("wild", "true".into()),
                            ("exactness", "exact".into()),
                            ("patterns", "0".into()),
                        ],
                        Conclusion::AllAtEnd,
                    ),
                );
                return Ok(());
            }
            for pat in &patterns {
                let desc = format!("s={} T={:?} n={}", pat.s, pat.t_set, pat.n);
                match classify_pattern(pat) {
                    PatternClass::ConfirmedOffRim => f.derive(
                        Status::NotAllAtEnd,
                        vec![],
                        step(
                            RuleId::R10,
                            subject,
                            &[
                                ("block", id.to_string()),
                                ("wild", "true".into()),
                                ("pattern", desc),
                            ],
                            Conclusion::NotAllAtEnd,
                        ),
                    ),
                    PatternClass::CandidateOnly => f.advise(
                        RuleId::R10,
                        subject,
                        format!("block `{id}`: candidate pattern {desc} (n >= 3, necessary condition only)"),
                    ),
                }
            }
        }
        Exactness::LowerBound => {
            let r =
                exclude_by_lower_bounds(c).map_err(|e| malformed(format!("block `{id}`: {e}")))?;
            if r.is_excluded() {
                f.derive(
                    Status::AllAtEnd,
                    vec![],
                    step(
                        RuleId::R9,
                        subject,
                        &[
                            ("block", id.to_string()),
                            ("wild", "true".into()),
                            ("exactness", "lower_bound".into()),
                            ("exclusion", "excluded".into()),
                        ],
                        Conclusion::AllAtEnd,
                    ),
                );
            } else {
                f.advise(
                    RuleId::R9,
                    subject,
                    format!("block `{id}`: lower bounds do not exclude the pattern"),
                );
            }
        }
    }
    Ok(())
}

fn block_verdict(id: &str, b: &BlockRecord, principal: bool) -> Result<Verdict, VerdictError> {
    let mut f = Findings::default();
    if principal && b.block_tag != "principal" {
        f.advise(
            RuleId::R9,
            id,
            format!("block `{id}` is tagged `{}`, not principal", b.block_tag),
        );
    } else {
        kawata_findings(&mut f, id, id, b)?;
    }
    f.finish(id)
}

/// Runs the rule catalog on `dossier`, consulting `ctx` for referenced
/// dossiers and blocks.
pub fn apply_rules(dossier: &GroupDossier, ctx: &VerdictContext) -> Result<Verdict, VerdictError> {
    Engine {
        ctx,
        in_progress: Vec::new(),
    }
    .dossier(dossier)
}

/// R9/R10 alone, for a block record without a dossier.
pub fn apply_rules_to_block(
    id: &str,
    block: &BlockRecord,
    principal: bool,
) -> Result<Verdict, VerdictError> {
    block_verdict(id, block, principal)
}
