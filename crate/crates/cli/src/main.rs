use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rimcheck_core::blockdata::{
    clifford_counts, format_gap_display, load_block_file, parse_gap_display, validate_block,
    BlockRecord, BrauerCheck, Exactness, MatrixDocument,
};
use rimcheck_core::corpus::{default_corpus_dir, verify_corpus, CorpusReport, Outcome};
use rimcheck_core::kawata::{
    classify_pattern, detect_patterns_with, exclude_by_lower_bounds_with, heart_report,
    DetectOptions, ExclusionResult, KawataPattern, PatternClass,
};
use rimcheck_core::verdict::{
    apply_rules, classify_simple_group, load_dossier_file, message, render_verdict, Family,
    FamilyParams, SimpleFactorRef, TraceStep, VerdictContext, VerdictError,
};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_CONFLICT: u8 = 3;
const EXIT_CORPUS: u8 = 4;

#[derive(Parser)]
#[command(name = "rimcheck", version)]
#[command(about = "Cartan-matrix rim criteria and verdicts for simple modules of p-blocks")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Omit the version line in text output
    #[arg(long, global = true)]
    no_banner: bool,

    /// Lift the 64-column cap on pattern searches
    #[arg(long, global = true)]
    allow_large: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Cartan matrix transpose(D)·D of a block record
    Cartan { file: PathBuf },
    /// Find rim patterns in an exact Cartan matrix
    Kawata { file: PathBuf },
    /// Try to rule out rim patterns from lower-bound Cartan data
    Exclude { file: PathBuf },
    /// Consistency report for a block record
    Validate { file: PathBuf },
    /// Solve for the Clifford-theory counts m and ell
    Clifford { n_big: u64, n_small: u64, q: u64 },
    /// Check membership in a simple-group family, e.g. `classify PSL3 q=4`
    Classify {
        family: String,
        /// Parameters as key=value (q=…, n=…)
        params: Vec<String>,
    },
    /// Run the rule engine on a dossier
    Verdict {
        dossier: PathBuf,
        /// Directory of *.block.json files [default: bundled corpus]
        #[arg(long)]
        blocks: Option<PathBuf>,
        /// Directory of *.dossier.json files [default: the dossier's directory]
        #[arg(long)]
        dossiers: Option<PathBuf>,
        /// Treat the block as non-principal
        #[arg(long)]
        non_principal: bool,
    },
    /// Bundled corpus commands
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// Convert GAP matrix display text into the JSON matrix form
    Parse { file: PathBuf },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Re-run every corpus check, optionally only ids matching a glob
    Verify {
        pattern: Option<String>,
        /// Corpus directory [default: $RIMCHECK_CORPUS_DIR or the bundled one]
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn data_err(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_DATA,
        message: e.to_string(),
    }
}

/// Text for stdout and the exit code to finish with.
struct Done {
    out: String,
    code: u8,
}

impl Done {
    fn ok(out: String) -> Self {
        Self { out, code: 0 }
    }
}

struct Ctx {
    format: Format,
    detect: DetectOptions,
}

impl Ctx {
    fn emit(&self, text: impl FnOnce() -> String, value: impl FnOnce() -> Value) -> String {
        match self.format {
            Format::Text => text(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&value()).expect("JSON values serialize");
                s.push('\n');
                s
            }
        }
    }
}

fn load(path: &Path) -> Result<BlockRecord, Failure> {
    load_block_file(path).map_err(data_err)
}

fn label_of(labels: &[String], i: usize) -> String {
    format!("{} [{}]", i + 1, labels[i])
}

fn exactness_name(e: Exactness) -> &'static str {
    match e {
        Exactness::Exact => "exact",
        Exactness::LowerBound => "lower bound",
    }
}

fn cmd_cartan(ctx: &Ctx, file: &Path) -> Result<Done, Failure> {
    let rec = load(file)?;
    let c = rec.cartan();
    let from_d = rec.decomposition.is_some();
    Ok(Done::ok(ctx.emit(
        || {
            let source = if from_d {
                "transpose(D)·D"
            } else {
                "as given, no decomposition matrix"
            };
            format!(
                "Cartan matrix of {} ({}; {}):\n{}\n",
                rec.group_id,
                exactness_name(c.exactness),
                source,
                format_gap_display(&c.matrix)
            )
        },
        || serde_json::to_value(c).expect("Cartan matrices serialize"),
    )))
}

fn pattern_text(out: &mut String, i: usize, p: &KawataPattern, labels: &[String]) {
    let t: Vec<String> = p.t_set.iter().map(|&t| label_of(labels, t)).collect();
    let _ = writeln!(
        out,
        "pattern {}: n = {}, S = column {}, T = {{{}}}",
        i + 1,
        p.n,
        label_of(labels, p.s),
        t.join(", ")
    );
    let (class, note) = match classify_pattern(p) {
        PatternClass::ConfirmedOffRim => ("ConfirmedOffRim", message("confirmed_off_rim")),
        PatternClass::CandidateOnly => ("CandidateOnly", message("candidate_only")),
    };
    let _ = writeln!(out, "  classification: {class} ({note})");
    if let Ok(h) = heart_report(p, labels) {
        let _ = writeln!(
            out,
            "  heart of P({}): uniserial [{}] (+) {}, {} nonzero",
            h.s_label,
            h.uniserial_ladder.join(", "),
            h.remainder_label,
            h.remainder_label
        );
        for l in &h.pim_ladders {
            let _ = writeln!(out, "  P({}) uniserial: {}", l.simple, l.layers.join(" / "));
        }
        let _ = writeln!(out, "  note: {}", h.ordering_note);
    }
}

fn cmd_kawata(ctx: &Ctx, file: &Path) -> Result<Done, Failure> {
    let rec = load(file)?;
    let c = rec.cartan();
    if c.exactness == Exactness::LowerBound {
        return Err(data_err(format!(
            "{}: Cartan matrix is only a lower bound; use `exclude` instead",
            file.display()
        )));
    }
    let patterns = detect_patterns_with(c, ctx.detect).map_err(data_err)?;
    let labels = rec.simple_labels();
    Ok(Done::ok(ctx.emit(
        || {
            let mut out = String::new();
            if !rec.wild {
                out.push_str("warning: block is not asserted wild; the criterion does not apply\n");
            }
            if patterns.is_empty() {
                let _ = writeln!(out, "{}", message("no_patterns"));
            } else {
                let _ = writeln!(out, "{}: {} pattern(s)", rec.group_id, patterns.len());
                for (i, p) in patterns.iter().enumerate() {
                    pattern_text(&mut out, i, p, &labels);
                }
            }
            out
        },
        || {
            let items: Vec<Value> = patterns
                .iter()
                .map(|p| {
                    json!({
                        "pattern": p,
                        "classification": classify_pattern(p),
                        "heart": heart_report(p, &labels).ok(),
                    })
                })
                .collect();
            json!({ "group_id": rec.group_id, "wild": rec.wild, "patterns": items })
        },
    )))
}

fn cmd_exclude(ctx: &Ctx, file: &Path) -> Result<Done, Failure> {
    let rec = load(file)?;
    let result = exclude_by_lower_bounds_with(rec.cartan(), ctx.detect).map_err(data_err)?;
    let labels = rec.simple_labels();
    Ok(Done::ok(ctx.emit(
        || match &result {
            ExclusionResult::Excluded => format!("Excluded: {}\n", message("excluded")),
            ExclusionResult::NotExcluded { witness } => {
                let t: Vec<String> = witness
                    .t_set
                    .iter()
                    .map(|&t| label_of(&labels, t))
                    .collect();
                format!(
                    "NotExcluded: witness n = {}, S = column {}, T = {{{}}}\n  {}\n",
                    witness.n,
                    label_of(&labels, witness.s),
                    t.join(", "),
                    message("not_excluded")
                )
            }
        },
        || serde_json::to_value(&result).expect("exclusion results serialize"),
    )))
}

fn cmd_validate(ctx: &Ctx, file: &Path) -> Result<Done, Failure> {
    let rec = load(file)?;
    let report = validate_block(&rec);
    Ok(Done::ok(ctx.emit(
        || {
            let mut out = format!("validation report for {}\n", report.group_id);
            if let Some(cols) = &report.columns {
                out.push_str(
                    "columns (nonzero entries of D, lower bound for the Cartan diagonal):\n",
                );
                for c in cols {
                    let _ = writeln!(
                        out,
                        "  {}: {} nonzero, C >= {}",
                        label_of(&rec.simple_labels(), c.column),
                        c.nonzero,
                        c.diagonal_lower_bound
                    );
                }
            }
            let twos: Vec<String> = report
                .diagonal_two
                .iter()
                .map(|i| (i + 1).to_string())
                .collect();
            let _ = writeln!(
                out,
                "diagonal entries equal to 2: {}",
                if twos.is_empty() {
                    "none".into()
                } else {
                    twos.join(", ")
                }
            );
            let brauer = match &report.brauer {
                BrauerCheck::Consistent {
                    min_valuation,
                    expected,
                } => {
                    format!("consistent (min valuation {min_valuation} = {expected})")
                }
                BrauerCheck::Violation {
                    min_valuation,
                    expected,
                } => {
                    format!("VIOLATION (min valuation {min_valuation}, expected {expected})")
                }
                BrauerCheck::Skipped => "skipped".into(),
            };
            let _ = writeln!(out, "Brauer valuation check: {brauer}");
            let _ = writeln!(
                out,
                "symmetric: {}, nonnegative: {}",
                report.symmetric, report.nonnegative
            );
            for s in &report.skipped {
                let _ = writeln!(out, "skipped {}: {}", s.check, s.reason);
            }
            let _ = writeln!(
                out,
                "{}",
                if report.is_clean() {
                    "no flags".to_string()
                } else {
                    format!("flags: {:?}", report.flags)
                }
            );
            out
        },
        || serde_json::to_value(&report).expect("reports serialize"),
    )))
}

fn cmd_clifford(ctx: &Ctx, n_big: u64, n_small: u64, q: u64) -> Result<Done, Failure> {
    let c = clifford_counts(n_big, n_small, q).map_err(data_err)?;
    Ok(Done::ok(ctx.emit(
        || {
            let mut out = format!(
                "m = {}, ell = {} (|IBr(B)| = {}·{} + {} = {}, |IBr(b)| = {} + {}·{} = {})\n",
                c.m, c.ell, c.m, q, c.ell, n_big, c.m, c.ell, q, n_small
            );
            if let Some(a) = &c.advisory {
                let _ = writeln!(out, "advisory: {a}");
            }
            out
        },
        || serde_json::to_value(&c).expect("counts serialize"),
    )))
}

fn parse_params(family: Family, params: &[String]) -> Result<SimpleFactorRef, Failure> {
    let mut p = FamilyParams::default();
    for kv in params {
        let usage = || Failure {
            code: EXIT_USAGE,
            message: format!("bad parameter `{kv}`: expected q=<int> or n=<int>"),
        };
        let (k, v) = kv.split_once('=').ok_or_else(usage)?;
        let v: u64 = v.trim().parse().map_err(|_| usage())?;
        match k.trim() {
            "q" => p.q = Some(v),
            "n" => p.n = Some(v),
            _ => return Err(usage()),
        }
    }
    Ok(SimpleFactorRef {
        family,
        params: (p != FamilyParams::default()).then_some(p),
        verdict_ref: None,
    })
}

fn cmd_classify(ctx: &Ctx, family: &str, params: &[String]) -> Result<Done, Failure> {
    let fam = Family::parse(family).ok_or_else(|| Failure {
        code: EXIT_USAGE,
        message: format!("unknown family `{family}`"),
    })?;
    let r = parse_params(fam, params)?;
    let tag = classify_simple_group(&r).map_err(data_err)?;
    Ok(Done::ok(ctx.emit(
        || format!("{family}: family ({}), {}\n", tag.case.roman(), tag.condition),
        || json!({ "family": fam, "params": r.params, "case": tag.case, "condition": tag.condition }),
    )))
}

fn render_steps(steps: &[TraceStep]) -> String {
    steps
        .iter()
        .map(|s| {
            format!(
                "  [{}] {} => {:?}; {}\n",
                s.rule_id,
                s.subject(),
                s.conclusion,
                s.citation
            )
        })
        .collect()
}

fn cmd_verdict(
    ctx: &Ctx,
    dossier: &Path,
    blocks: Option<&Path>,
    dossiers: Option<&Path>,
    non_principal: bool,
) -> Result<Done, Failure> {
    let d = load_dossier_file(dossier).map_err(data_err)?;
    let mut vctx = VerdictContext {
        force_non_principal: non_principal,
        ..VerdictContext::default()
    };
    let blocks_dir = blocks.map_or_else(|| default_corpus_dir().join("blocks"), Path::to_path_buf);
    vctx.add_blocks_dir(&blocks_dir).map_err(data_err)?;
    let dossier_dir = dossiers.map(Path::to_path_buf).or_else(|| {
        dossier.parent().map(|p| {
            if p.as_os_str().is_empty() {
                PathBuf::from(".")
            } else {
                p.to_path_buf()
            }
        })
    });
    if let Some(dir) = dossier_dir {
        vctx.add_dossiers_dir(&dir).map_err(data_err)?;
    }
    match apply_rules(&d, &vctx) {
        Ok(v) => Ok(Done::ok(ctx.emit(
            || render_verdict(&v),
            || serde_json::to_value(&v).expect("verdicts serialize"),
        ))),
        Err(VerdictError::ConflictingDerivations {
            subject,
            all_at_end,
            not_all_at_end,
        }) => Err(Failure {
            code: EXIT_CONFLICT,
            message: format!(
                "conflicting derivations for {subject}\nAllAtEnd:\n{}NotAllAtEnd:\n{}",
                render_steps(&all_at_end),
                render_steps(&not_all_at_end)
            ),
        }),
        Err(e) => Err(data_err(e)),
    }
}

fn corpus_text(r: &CorpusReport) -> String {
    let mut out = String::new();
    for e in &r.entries {
        let tag = match e.outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Skip => "SKIP",
        };
        let _ = writeln!(out, "{tag} {}", e.id);
        if let Some(reason) = &e.reason {
            let _ = writeln!(out, "     {reason}");
        }
        for c in &e.checks {
            let mark = if c.passed { "ok" } else { "MISMATCH" };
            let _ = write!(out, "     {:?}: {} [{mark}]", c.check, c.actual);
            if !c.passed {
                let _ = write!(out, " expected {}", c.expected);
            }
            let _ = writeln!(out, "; {}", c.citation);
            if let Some(d) = &c.detail {
                let _ = writeln!(out, "       {d}");
            }
            for s in c.trace.iter().flatten() {
                let _ = writeln!(
                    out,
                    "       [{}] {}: {}",
                    s.rule_id,
                    s.subject(),
                    s.citation
                );
            }
        }
    }
    let _ = writeln!(
        out,
        "{} passed, {} failed, {} skipped",
        r.passed, r.failed, r.skipped
    );
    out
}

fn cmd_corpus(ctx: &Ctx, pattern: Option<&str>, dir: Option<&Path>) -> Result<Done, Failure> {
    let dir = dir.map_or_else(default_corpus_dir, Path::to_path_buf);
    let report = verify_corpus(&dir, pattern).map_err(data_err)?;
    let out = ctx.emit(
        || corpus_text(&report),
        || serde_json::to_value(&report).expect("reports serialize"),
    );
    Ok(Done {
        out,
        code: if report.failed > 0 { EXIT_CORPUS } else { 0 },
    })
}

fn cmd_parse(ctx: &Ctx, file: &Path) -> Result<Done, Failure> {
    let text =
        std::fs::read_to_string(file).map_err(|e| data_err(format!("{}: {e}", file.display())))?;
    let matrix =
        parse_gap_display(&text).map_err(|e| data_err(format!("{}: {e}", file.display())))?;
    let doc = MatrixDocument { matrix };
    Ok(Done::ok(ctx.emit(
        || {
            let rows: Vec<String> = doc
                .matrix
                .row_iter()
                .map(|r| {
                    let cells: Vec<String> = r.iter().map(ToString::to_string).collect();
                    format!("[{}]", cells.join(", "))
                })
                .collect();
            format!("{{\"matrix\": [\n  {}\n]}}\n", rows.join(",\n  "))
        },
        || serde_json::to_value(&doc).expect("matrices serialize"),
    )))
}

fn run(cli: Cli) -> Result<Done, Failure> {
    let ctx = Ctx {
        format: cli.format,
        detect: if cli.allow_large {
            DetectOptions::uncapped()
        } else {
            DetectOptions::default()
        },
    };
    match &cli.command {
        Command::Cartan { file } => cmd_cartan(&ctx, file),
        Command::Kawata { file } => cmd_kawata(&ctx, file),
        Command::Exclude { file } => cmd_exclude(&ctx, file),
        Command::Validate { file } => cmd_validate(&ctx, file),
        Command::Clifford { n_big, n_small, q } => cmd_clifford(&ctx, *n_big, *n_small, *q),
        Command::Classify { family, params } => cmd_classify(&ctx, family, params),
        Command::Verdict {
            dossier,
            blocks,
            dossiers,
            non_principal,
        } => cmd_verdict(
            &ctx,
            dossier,
            blocks.as_deref(),
            dossiers.as_deref(),
            *non_principal,
        ),
        Command::Corpus {
            action: CorpusAction::Verify { pattern, corpus },
        } => cmd_corpus(&ctx, pattern.as_deref(), corpus.as_deref()),
        Command::Parse { file } => cmd_parse(&ctx, file),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let banner = cli.format == Format::Text && !cli.no_banner;
    match run(cli) {
        Ok(done) => {
            if banner {
                println!("rimcheck {}", env!("CARGO_PKG_VERSION"));
            }
            print!("{}", done.out);
            ExitCode::from(done.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message.trim_end());
            ExitCode::from(f.code)
        }
    }
}
