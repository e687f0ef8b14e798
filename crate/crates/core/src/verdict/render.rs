use std::fmt::Write;

use super::{Conclusion, TraceStep, Verdict};

fn render_step(out: &mut String, i: usize, s: &TraceStep) {
    let facts: Vec<String> = s
        .inputs
        .iter()
        .filter(|(k, _)| k.as_str() != "subject")
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    let concl = match s.conclusion {
        Conclusion::AllAtEnd => "AllAtEnd",
        Conclusion::NotAllAtEnd => "NotAllAtEnd",
        Conclusion::Advisory => "advisory",
    };
    let _ = writeln!(
        out,
        "  {i:>2}. [{}] {}: {} => {concl}",
        s.rule_id,
        s.subject(),
        facts.join(", ")
    );
    let _ = writeln!(out, "      {}", s.citation);
}

/// Human-readable form: status line, numbered trace, then advisories.
pub fn render_verdict(v: &Verdict) -> String {
    let mut out = format!("{}: {}\n", v.subject, v.status);
    if v.trace.is_empty() {
        out.push_str("  (no rule fired)\n");
    }
    for (i, s) in v.trace.iter().enumerate() {
        render_step(&mut out, i + 1, s);
    }
    if !v.advisories.is_empty() {
        out.push_str("advisories:\n");
        for (i, s) in v.advisories.iter().enumerate() {
            render_step(&mut out, i + 1, s);
        }
    }
    out
}
