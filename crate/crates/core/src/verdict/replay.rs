//! Audit of a derivation: every step is re-checked against the dossier or
//! block it names, and every transferred verdict must have been derived
//! earlier in the same trace.

use thiserror::Error;

use super::{Conclusion, GroupDossier, RuleId, Status, TraceStep, Verdict, VerdictContext};
use crate::blockdata::{BlockRecord, Exactness};
use crate::kawata::{detect_patterns, exclude_by_lower_bounds};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {index} ({rule}, subject `{subject}`): {reason}")]
pub struct ReplayError {
    pub index: usize,
    pub rule: RuleId,
    pub subject: String,
    pub reason: String,
}

fn input<'s>(s: &'s TraceStep, key: &str) -> Option<&'s str> {
    s.inputs.get(key).map(String::as_str)
}

struct Replayer<'a> {
    top: &'a GroupDossier,
    ctx: &'a VerdictContext,
}

impl<'a> Replayer<'a> {
    fn dossier(&self, name: &str) -> Option<&'a GroupDossier> {
        if name == self.top.name {
            Some(self.top)
        } else {
            self.ctx.dossiers.get(name)
        }
    }

    fn principal(&self, d: &GroupDossier) -> bool {
        d.is_principal() && !self.ctx.force_non_principal
    }

    fn check(&self, s: &TraceStep, earlier: &[TraceStep]) -> Result<(), String> {
        if s.citation != super::citation(s.rule_id).render() {
            return Err("citation does not match the catalog".into());
        }
        let subject = s.subject();
        let derived_before = |name: &str, status: Status| {
            earlier
                .iter()
                .any(|e| e.subject() == name && e.conclusion.status() == Some(status))
        };
        let source_status = || -> Result<(String, Status), String> {
            let src = input(s, "source").ok_or("missing `source` input")?;
            let st = match input(s, "source_status") {
                Some("AllAtEnd") => Status::AllAtEnd,
                Some("NotAllAtEnd") => Status::NotAllAtEnd,
                other => return Err(format!("bad source_status {other:?}")),
            };
            if s.conclusion.status() != Some(st) {
                return Err("conclusion differs from the transferred status".into());
            }
            if !derived_before(src, st) {
                return Err(format!("`{src}` is not derived {st} earlier in the trace"));
            }
            Ok((src.to_string(), st))
        };

        if matches!(s.rule_id, RuleId::R9 | RuleId::R10) {
            return self.check_block_step(s, subject);
        }
        let d = self
            .dossier(subject)
            .ok_or_else(|| format!("no dossier `{subject}`"))?;
        let p = &d.predicates;
        let yes = |b: Option<bool>| b == Some(true);
        let all = s.conclusion == Conclusion::AllAtEnd;
        let ok = match s.rule_id {
            RuleId::R1 => all && yes(p.has_nontrivial_normal_p_subgroup),
            RuleId::R2 => all && yes(p.p_solvable),
            RuleId::R3 => all && yes(p.perfect_lie_type_defining_char) && yes(p.full_defect),
            RuleId::R4 => all && self.principal(d) && d.prime == 2 && yes(d.sylow.abelian),
            RuleId::R5 => {
                all && yes(p.symmetric_alternating_or_cover) && yes(p.defect_divisible_by_p_cubed)
            }
            RuleId::R6 => {
                let (src, st) = source_status()?;
                st == Status::AllAtEnd
                    && d.normal_chain.iter().flatten().any(|l| {
                        l.subgroup_name == src
                            && l.quotient_solvable_p_prime
                            && l.same_block_idempotent
                    })
            }
            RuleId::R7 => {
                let Some(dec) = &d.o_pprime_decomposition else {
                    return Err("no o_pprime_decomposition".into());
                };
                let base = all
                    && self.principal(d)
                    && d.prime % 2 == 1
                    && yes(d.sylow.abelian)
                    && d.sylow.cyclic == Some(false)
                    && yes(p.o_p_prime_trivial);
                let m = dec.simple_factors.len();
                base && match input(s, "case") {
                    Some("i") => dec.q_part_nontrivial,
                    Some("ii") => !dec.q_part_nontrivial && m >= 2,
                    Some("iii") => {
                        let (src, _) = source_status()?;
                        !dec.q_part_nontrivial
                            && m == 1
                            && dec.simple_factors[0].verdict_ref.as_deref() == Some(src.as_str())
                    }
                    _ => false,
                }
            }
            RuleId::R8 => {
                all && self.principal(d) && d.prime == 3 && yes(d.sylow.abelian) && yes(d.wild)
            }
            RuleId::R11 => {
                let (src, _) = source_status()?;
                d.equivalences.iter().any(|e| e.target == src)
            }
            RuleId::R12 => {
                let (src, _) = source_status()?;
                self.principal(d) && d.o_p_prime_quotient.as_deref() == Some(src.as_str())
            }
            RuleId::R9 | RuleId::R10 => unreachable!(),
            RuleId::R13 => false,
        };
        if ok {
            Ok(())
        } else {
            Err("rule conditions do not hold for this subject".into())
        }
    }

    fn check_block_step(&self, s: &TraceStep, subject: &str) -> Result<(), String> {
        let id = input(s, "block").ok_or("missing `block` input")?;
        let b: &BlockRecord = self
            .ctx
            .blocks
            .get(id)
            .ok_or_else(|| format!("no block `{id}`"))?;
        let linked = subject == id
            || self
                .dossier(subject)
                .is_some_and(|d| d.block_refs.iter().flatten().any(|r| r == id));
        if !linked {
            return Err(format!("block `{id}` is not linked to `{subject}`"));
        }
        if !b.wild {
            return Err(format!("block `{id}` is not asserted wild"));
        }
        let c = b.cartan();
        let ok = match (s.rule_id, c.exactness) {
            (RuleId::R9, Exactness::Exact) => {
                detect_patterns(c).map_err(|e| e.to_string())?.is_empty()
            }
            (RuleId::R9, Exactness::LowerBound) => exclude_by_lower_bounds(c)
                .map_err(|e| e.to_string())?
                .is_excluded(),
            (RuleId::R10, Exactness::Exact) => detect_patterns(c)
                .map_err(|e| e.to_string())?
                .iter()
                .any(|p| {
                    p.n == 2
                        && input(s, "pattern")
                            == Some(format!("s={} T={:?} n={}", p.s, p.t_set, p.n).as_str())
                }),
            _ => false,
        };
        let conclusion_ok = match s.rule_id {
            RuleId::R9 => s.conclusion == Conclusion::AllAtEnd,
            _ => s.conclusion == Conclusion::NotAllAtEnd,
        };
        if ok && conclusion_ok {
            Ok(())
        } else {
            Err("block data does not support this step".into())
        }
    }
}

/// Re-derives every step of `verdict` for the top-level `dossier`.
pub fn replay(
    verdict: &Verdict,
    dossier: &GroupDossier,
    ctx: &VerdictContext,
) -> Result<(), ReplayError> {
    let r = Replayer { top: dossier, ctx };
    for (index, s) in verdict.trace.iter().enumerate() {
        r.check(s, &verdict.trace[..index])
            .map_err(|reason| ReplayError {
                index,
                rule: s.rule_id,
                subject: s.subject().to_string(),
                reason,
            })?;
    }
    let fail = |reason: &str| ReplayError {
        index: verdict.trace.len(),
        rule: verdict.trace.last().map_or(RuleId::R1, |s| s.rule_id),
        subject: verdict.subject.clone(),
        reason: reason.into(),
    };
    match verdict.status {
        Status::Unknown if !verdict.trace.is_empty() => {
            Err(fail("Unknown verdict with a nonempty trace"))
        }
        Status::Unknown => Ok(()),
        st => {
            let concluding = verdict
                .trace
                .iter()
                .any(|s| s.subject() == verdict.subject && s.conclusion.status() == Some(st));
            if concluding {
                Ok(())
            } else {
                Err(fail("no step concludes the verdict for its subject"))
            }
        }
    }
}
