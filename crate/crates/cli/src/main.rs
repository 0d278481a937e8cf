//! Command-line surface for the universal-algebra workbench.
//!
//! Exit codes: 0 = requested checks hold / completed, 1 = a check failed
//! (counterexample found, ledger violation, or fixture drift), 2 = usage or
//! IO error, 3 = inconclusive (budget or sampling limit reached).

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ualgebra_core::congruence::{
    congruence_lattice, is_distributive, is_modular, permutability,
};
use ualgebra_core::harness::{verify_algebra, verify_corpus, AlgebraReport};
use ualgebra_core::lemmas::{
    check_lemma, check_majority_inequality, verify_lemma_counterexample,
    LemmaCounterexample, LemmaKind, TripleClasses,
};
use ualgebra_core::properties::{
    check_dd, check_difunctional_all, check_eeo_commute, check_positive_are_equiv,
    check_pp, check_ppoppo, check_refl_symmetric, verify_property_witness,
    PropertyVerdict, PropertyWitness,
};
use ualgebra_core::rel::{enumerate_relations, RelClass, RelLiteral};
use ualgebra_core::terms::{solve_identity_system, system_by_kind, SearchStatus};
use ualgebra_core::{corpus, FiniteAlgebra, DEFAULT_BUDGET};

#[derive(Parser)]
#[command(name = "ualgebra", about = "decision procedures for finite algebras")]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Work budget (relation triples / closure vectors).
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct AlgebraArg {
    /// Path to an algebra JSON file.
    #[arg(long)]
    algebra: Option<PathBuf>,
    /// Name of a bundled corpus algebra.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Show carrier size and operation signature.
    Info(AlgebraArg),
    /// List all congruences as partition block lists.
    Congruences(AlgebraArg),
    /// Congruence lattice with meet/join tables and Horn-sentence verdicts.
    Lattice(AlgebraArg),
    /// Check a lemma or relation property; exits 1 on a counterexample.
    Check {
        #[command(flatten)]
        algebra: AlgebraArg,
        /// shifting | triangular | trapezoid | majority
        #[arg(long)]
        lemma: Option<String>,
        /// difunctional-all | refl-symmetric | eeo-commute | ppoppo | dd |
        /// pp | positive-are-equiv
        #[arg(long)]
        property: Option<String>,
        /// Single class (cong|refl|pos|all) or R=...,S=...,T=...
        #[arg(long, default_value = "cong")]
        classes: String,
        /// Re-verify a previously reported counterexample JSON file.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Search for a term system; exits 3 if the budget was exceeded.
    FindTerm {
        #[command(flatten)]
        algebra: AlgebraArg,
        /// maltsev | pixley | majority | quaternary-pq | quaternary-pqx |
        /// lipparini-rs
        #[arg(long)]
        kind: String,
    },
    /// Enumerate a relation class.
    Enumerate {
        #[command(flatten)]
        algebra: AlgebraArg,
        /// cong | refl | pos | all
        #[arg(long, default_value = "cong")]
        class: String,
    },
    /// Compute all facts and check the cross-validation ledger.
    Verify {
        #[command(flatten)]
        algebra: AlgebraArg,
        /// Compare computed facts against a fixture file; drift exits 1.
        #[arg(long)]
        expect: Option<PathBuf>,
    },
    /// List bundled algebras; --regen rewrites JSON files and fact fixtures.
    Corpus {
        #[arg(long)]
        regen: bool,
        #[arg(long, default_value = "corpus")]
        dir: PathBuf,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failed(String),
}

type CliResult<T> = std::result::Result<T, CliError>;

impl From<ualgebra_core::UalgError> for CliError {
    fn from(e: ualgebra_core::UalgError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!(
            "malformed JSON at line {}, column {}: {}",
            e.line(),
            e.column(),
            e
        ))
    }
}

fn load_algebra(arg: &AlgebraArg) -> CliResult<FiniteAlgebra> {
    match (&arg.algebra, &arg.name) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)?;
            Ok(FiniteAlgebra::from_json(&text)?)
        }
        (None, Some(name)) => corpus::by_name(name)
            .ok_or_else(|| CliError::Usage(format!("no bundled algebra `{}`", name))),
        _ => Err(CliError::Usage(
            "provide exactly one of --algebra FILE or --name NAME".into(),
        )),
    }
}

fn parse_classes(spec: &str) -> CliResult<TripleClasses> {
    Ok(TripleClasses::parse(spec)?)
}

fn emit(cli_json: bool, value: &Value, text: impl FnOnce() -> String) {
    if cli_json {
        println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
    } else {
        println!("{}", text());
    }
}

fn blocks_json(alg: &FiniteAlgebra) -> CliResult<Vec<Vec<Vec<usize>>>> {
    Ok(ualgebra_core::all_congruences(alg)?
        .iter()
        .map(|c| c.blocks())
        .collect())
}

fn cmd_info(json: bool, arg: &AlgebraArg) -> CliResult<ExitCode> {
    let alg = load_algebra(arg)?;
    let ops: Vec<Value> = alg
        .operations
        .iter()
        .map(|o| json!({"name": o.name, "arity": o.arity}))
        .collect();
    let v = json!({"name": alg.name, "size": alg.size, "operations": ops});
    emit(json, &v, || {
        let ops: Vec<String> = alg
            .operations
            .iter()
            .map(|o| format!("{}/{}", o.name, o.arity))
            .collect();
        format!("{}: size {}, operations [{}]", alg.name, alg.size, ops.join(", "))
    });
    Ok(ExitCode::SUCCESS)
}

fn cmd_congruences(json: bool, arg: &AlgebraArg) -> CliResult<ExitCode> {
    let alg = load_algebra(arg)?;
    let blocks = blocks_json(&alg)?;
    let v = json!({"algebra": alg.name, "count": blocks.len(), "congruences": blocks});
    emit(json, &v, || {
        let mut out = format!("{} congruences on {}:\n", blocks.len(), alg.name);
        for b in &blocks {
            out.push_str(&format!("  {:?}\n", b));
        }
        out.trim_end().to_string()
    });
    Ok(ExitCode::SUCCESS)
}

fn cmd_lattice(json: bool, arg: &AlgebraArg) -> CliResult<ExitCode> {
    let alg = load_algebra(arg)?;
    let lat = congruence_lattice(&alg)?;
    let perm = permutability(&alg)?;
    let blocks: Vec<Vec<Vec<usize>>> = lat.elements.iter().map(|c| c.blocks()).collect();
    let v = json!({
        "algebra": alg.name,
        "elements": blocks,
        "meet": lat.meet,
        "join": lat.join,
        "modular": is_modular(&lat),
        "distributive": is_distributive(&lat),
        "perm2": perm.perm2,
        "perm3": perm.perm3,
    });
    emit(json, &v, || {
        format!(
            "Cong({}): {} elements; modular: {}, distributive: {}, 2-permutable: {}, 3-permutable: {}",
            alg.name,
            lat.len(),
            is_modular(&lat),
            is_distributive(&lat),
            perm.perm2,
            perm.perm3
        )
    });
    Ok(ExitCode::SUCCESS)
}

fn verdict_exit(holds: bool, exhaustive: bool) -> ExitCode {
    if !holds {
        ExitCode::from(1)
    } else if !exhaustive {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}

fn run_property(
    alg: &FiniteAlgebra,
    property: &str,
    budget: usize,
) -> CliResult<PropertyVerdict> {
    Ok(match property {
        "difunctional-all" => check_difunctional_all(alg)?,
        "refl-symmetric" => check_refl_symmetric(alg)?,
        "eeo-commute" => check_eeo_commute(alg)?,
        "ppoppo" => check_ppoppo(alg)?,
        "dd" => check_dd(alg)?,
        "pp" => check_pp(alg)?,
        "positive-are-equiv" => check_positive_are_equiv(alg, budget)?,
        other => {
            return Err(CliError::Usage(format!("unknown property `{}`", other)))
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    json: bool,
    budget: usize,
    arg: &AlgebraArg,
    lemma: &Option<String>,
    property: &Option<String>,
    classes: &str,
    replay: &Option<PathBuf>,
) -> CliResult<ExitCode> {
    let alg = load_algebra(arg)?;
    match (lemma, property) {
        (Some(lemma), None) if lemma == "majority" => {
            let class = if classes.contains('=') {
                return Err(CliError::Usage(
                    "majority takes a single class, not per-role classes".into(),
                ));
            } else {
                RelClass::parse(classes)?
            };
            let v = check_majority_inequality(&alg, class, budget)?;
            let out = json!({
                "algebra": alg.name,
                "lemma": "majority",
                "holds": v.holds,
                "exhaustive": v.exhaustive,
                "counterexample": v.counterexample,
            });
            emit(json, &out, || {
                format!(
                    "majority inequality on {}: {} ({})",
                    alg.name,
                    if v.holds { "holds" } else { "fails" },
                    if v.exhaustive { "exact" } else { "sampled" }
                )
            });
            Ok(verdict_exit(v.holds, v.exhaustive))
        }
        (Some(lemma), None) => {
            let kind = LemmaKind::parse(lemma)?;
            let tc = parse_classes(classes)?;
            if let Some(path) = replay {
                let text = fs::read_to_string(path)?;
                let cx: LemmaCounterexample = serde_json::from_str(&text)?;
                let ok = verify_lemma_counterexample(&alg, kind, tc, &cx)?;
                emit(json, &json!({"replay_verified": ok}), || {
                    format!("replay {}", if ok { "verified" } else { "rejected" })
                });
                return if ok {
                    Ok(ExitCode::from(1))
                } else {
                    Err(CliError::Failed("counterexample did not re-verify".into()))
                };
            }
            let v = check_lemma(&alg, kind, tc, budget)?;
            let out = json!({
                "algebra": alg.name,
                "lemma": kind.name(),
                "holds": v.holds,
                "exhaustive": v.exhaustive,
                "triples_checked": v.triples_checked,
                "counterexample": v.counterexample,
            });
            emit(json, &out, || {
                format!(
                    "{} lemma on {}: {} ({})",
                    kind.name(),
                    alg.name,
                    if v.holds { "holds" } else { "fails" },
                    if v.exhaustive { "exact" } else { "sampled" }
                )
            });
            Ok(verdict_exit(v.holds, v.exhaustive))
        }
        (None, Some(property)) => {
            if let Some(path) = replay {
                let text = fs::read_to_string(path)?;
                let w: PropertyWitness = serde_json::from_str(&text)?;
                let ok = verify_property_witness(&alg, property, &w)?;
                emit(json, &json!({"replay_verified": ok}), || {
                    format!("replay {}", if ok { "verified" } else { "rejected" })
                });
                return if ok {
                    Ok(ExitCode::from(1))
                } else {
                    Err(CliError::Failed("witness did not re-verify".into()))
                };
            }
            let v = run_property(&alg, property, budget)?;
            let out = json!({
                "algebra": alg.name,
                "property": property,
                "holds": v.holds,
                "exhaustive": v.exhaustive,
                "witness": v.witness,
            });
            emit(json, &out, || {
                format!(
                    "{} on {}: {} ({})",
                    property,
                    alg.name,
                    if v.holds { "holds" } else { "fails" },
                    if v.exhaustive { "exact" } else { "sampled" }
                )
            });
            Ok(verdict_exit(v.holds, v.exhaustive))
        }
        _ => Err(CliError::Usage(
            "provide exactly one of --lemma or --property".into(),
        )),
    }
}

fn cmd_find_term(
    json: bool,
    budget: usize,
    arg: &AlgebraArg,
    kind: &str,
) -> CliResult<ExitCode> {
    let alg = load_algebra(arg)?;
    let sys = system_by_kind(kind)?;
    let res = solve_identity_system(&alg, &sys, budget)?;
    let witnesses: Vec<Value> = res
        .witnesses
        .iter()
        .map(|w| {
            json!({
                "unknown": w.unknown,
                "coords": w.coords,
                "values": w.values,
                "term": w.term.as_ref().map(|t| t.display()),
            })
        })
        .collect();
    let out = json!({
        "algebra": alg.name,
        "kind": kind,
        "found": res.found(),
        "status": res.status,
        "witness_tables": witnesses,
    });
    emit(json, &out, || {
        let status = match res.status {
            SearchStatus::Found => "found",
            SearchStatus::NotFound => "not found",
            SearchStatus::Inconclusive => "inconclusive (budget exceeded)",
        };
        let mut text = format!("{} on {}: {}", kind, alg.name, status);
        for w in &res.witnesses {
            if let Some(t) = &w.term {
                text.push_str(&format!("\n  {} = {}", w.unknown, t.display()));
            }
        }
        text
    });
    match res.status {
        SearchStatus::Inconclusive => Ok(ExitCode::from(3)),
        _ => Ok(ExitCode::SUCCESS),
    }
}

fn cmd_enumerate(
    json: bool,
    budget: usize,
    arg: &AlgebraArg,
    class: &str,
) -> CliResult<ExitCode> {
    let alg = load_algebra(arg)?;
    let c = RelClass::parse(class)?;
    let e = enumerate_relations(&alg, c, budget)?;
    let rels: Vec<RelLiteral> = e.rels.iter().map(RelLiteral::of).collect();
    let out = json!({
        "algebra": alg.name,
        "class": c,
        "exhaustive": e.exhaustive,
        "count": rels.len(),
        "relations": rels,
    });
    emit(json, &out, || {
        format!(
            "{} relations in class {} on {} ({})",
            rels.len(),
            class,
            alg.name,
            if e.exhaustive { "exhaustive" } else { "sampled" }
        )
    });
    Ok(ExitCode::SUCCESS)
}

/// Stable fixture form: fact name -> {value, exhaustive}, no witnesses.
fn fixture_of(report: &AlgebraReport) -> Value {
    let facts: BTreeMap<&String, Value> = report
        .facts
        .iter()
        .map(|(k, f)| (k, json!({"value": f.value, "exhaustive": f.exhaustive})))
        .collect();
    json!({"algebra": report.algebra, "size": report.size, "facts": facts})
}

fn report_text(report: &AlgebraReport) -> String {
    let held = report.facts.values().filter(|f| f.value).count();
    format!(
        "{}: {} facts ({} hold), {} violations, {} conditional",
        report.algebra,
        report.facts.len(),
        held,
        report.violations.len(),
        report.conditional.len()
    )
}

fn check_fixture(report: &AlgebraReport, expected: &Value) -> Vec<String> {
    let mut drift = Vec::new();
    let empty = serde_json::Map::new();
    let exp_facts = expected
        .get("facts")
        .and_then(|f| f.as_object())
        .unwrap_or(&empty);
    for (name, f) in &report.facts {
        match exp_facts.get(name) {
            None => drift.push(format!("fact {} missing from fixture", name)),
            Some(e) => {
                let ev = e.get("value").and_then(Value::as_bool);
                let ex = e.get("exhaustive").and_then(Value::as_bool);
                if ev != Some(f.value) || ex != Some(f.exhaustive) {
                    drift.push(format!(
                        "fact {}: computed value={} exhaustive={}, fixture {}",
                        name, f.value, f.exhaustive, e
                    ));
                }
            }
        }
    }
    for name in exp_facts.keys() {
        if !report.facts.contains_key(name) {
            drift.push(format!("fixture fact {} was not computed", name));
        }
    }
    drift
}

fn cmd_verify(
    json: bool,
    budget: usize,
    arg: &AlgebraArg,
    expect: &Option<PathBuf>,
) -> CliResult<ExitCode> {
    let reports: Vec<AlgebraReport> =
        if arg.algebra.is_none() && arg.name.is_none() {
            verify_corpus(budget)?
        } else {
            vec![verify_algebra(&load_algebra(arg)?, budget)?]
        };

    let mut failed = false;
    let mut drift_lines: Vec<String> = Vec::new();
    if let Some(path) = expect {
        let text = fs::read_to_string(path)?;
        let expected: Value = serde_json::from_str(&text)?;
        for report in &reports {
            let exp = if expected.is_array() {
                expected
                    .as_array()
                    .unwrap()
                    .iter()
                    .find(|e| e.get("algebra").and_then(Value::as_str) == Some(&report.algebra))
                    .cloned()
                    .unwrap_or(Value::Null)
            } else {
                expected.clone()
            };
            for d in check_fixture(report, &exp) {
                drift_lines.push(format!("{}: {}", report.algebra, d));
            }
        }
        failed |= !drift_lines.is_empty();
    }
    failed |= reports.iter().any(|r| !r.violations.is_empty());

    let out = if reports.len() == 1 {
        json!({"report": reports[0], "fixture_drift": drift_lines})
    } else {
        json!({"reports": reports, "fixture_drift": drift_lines})
    };
    emit(json, &out, || {
        let mut text: Vec<String> = reports.iter().map(report_text).collect();
        text.extend(drift_lines.iter().cloned());
        text.join("\n")
    });
    if failed {
        Ok(ExitCode::from(1))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn cmd_corpus(json: bool, budget: usize, regen: bool, dir: &PathBuf) -> CliResult<ExitCode> {
    let algebras = corpus::bundled_corpus();
    if !regen {
        let names: Vec<Value> = algebras
            .iter()
            .map(|a| json!({"name": a.name, "size": a.size}))
            .collect();
        emit(json, &json!({"corpus": names}), || {
            algebras
                .iter()
                .map(|a| format!("{} (size {})", a.name, a.size))
                .collect::<Vec<_>>()
                .join("\n")
        });
        return Ok(ExitCode::SUCCESS);
    }
    fs::create_dir_all(dir)?;
    for alg in &algebras {
        let report = verify_algebra(alg, budget)?;
        fs::write(dir.join(format!("{}.json", alg.name)), alg.to_json())?;
        fs::write(
            dir.join(format!("{}.facts.json", alg.name)),
            serde_json::to_string_pretty(&fixture_of(&report)).expect("serializable"),
        )?;
    }
    emit(
        json,
        &json!({"regenerated": algebras.len(), "dir": dir}),
        || format!("regenerated {} algebras into {}", algebras.len(), dir.display()),
    );
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Info(arg) => cmd_info(cli.json, arg),
        Command::Congruences(arg) => cmd_congruences(cli.json, arg),
        Command::Lattice(arg) => cmd_lattice(cli.json, arg),
        Command::Check {
            algebra,
            lemma,
            property,
            classes,
            replay,
        } => cmd_check(cli.json, cli.budget, algebra, lemma, property, classes, replay),
        Command::FindTerm { algebra, kind } => {
            cmd_find_term(cli.json, cli.budget, algebra, kind)
        }
        Command::Enumerate { algebra, class } => {
            cmd_enumerate(cli.json, cli.budget, algebra, class)
        }
        Command::Verify { algebra, expect } => {
            cmd_verify(cli.json, cli.budget, algebra, expect)
        }
        Command::Corpus { regen, dir } => cmd_corpus(cli.json, cli.budget, *regen, dir),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("check failed: {}", msg);
            ExitCode::from(2)
        }
    }
}
