//! Command-line interface.
//!
//! Every subcommand is a pure function of its arguments, input files, and
//! seeds: identical invocations produce byte-identical reports. Exit codes
//! are `0` for success, `1` when a check finds a violation (an unsatisfied
//! condition, non-dominant revelation, or a failed reproduction run), and
//! `2` for malformed inputs or invalid arguments, with a one-line
//! diagnostic naming the problem.
//!
//! JSON reports always carry a top-level `"schema": 1` marker.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::aggregators::{self, Strategy, TabularSpec, TabularStrategy};
use crate::catalog;
use crate::gaussian_families::{GaussianFamily, GaussianKind};
use crate::guarantees;
use crate::info_core::{InfoStructure, InstanceFile, SignalSubset};
use crate::repro;
use crate::revelation;
use crate::substitutes::{self, SubstitutesReport};

/// Outcome of one CLI invocation: the process exit code and the rendered
/// report (stdout for codes 0/1, stderr for diagnostics).
#[derive(Debug, Clone)]
pub struct CommandResult {
    pub exit_code: i32,
    pub report: String,
}

#[derive(Parser)]
#[command(
    name = "robust-agg",
    version,
    about = "Robust aggregation of expert forecasts on finite information structures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConditionArg {
    Weak,
    Projective,
    ProjectiveRestricted,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BoundsFormat {
    Table,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check a substitutes condition on an instance file
    Check {
        /// Instance file (JSON: {"n": ..., "states": [...]})
        file: PathBuf,
        /// Condition to check
        #[arg(long, value_enum)]
        condition: ConditionArg,
        /// Margin tolerance: margins below -TOL are violations
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Accept probability sums within 1e-6 of 1 and renormalize
        #[arg(long)]
        renormalize: bool,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Evaluate an aggregation strategy's approximation ratio on an instance
    Ratio {
        /// Instance file (JSON: {"n": ..., "states": [...]})
        file: PathBuf,
        /// average | extremize:D | random-expert | prior | tabular:FILE
        #[arg(long)]
        strategy: String,
        /// Accept probability sums within 1e-6 of 1 and renormalize
        #[arg(long)]
        renormalize: bool,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Print the guarantee table for n = 1..=N
    Bounds {
        /// Largest expert count to tabulate
        #[arg(long = "n-max", default_value_t = 10)]
        n_max: u64,
        #[arg(long, value_enum, default_value_t = BoundsFormat::Table)]
        format: BoundsFormat,
    },
    /// Closed-form and Monte Carlo ratios for the Gaussian families
    Gaussian {
        /// imu:MU | ind | dep
        #[arg(long)]
        family: String,
        /// Number of experts
        #[arg(long)]
        n: usize,
        /// Extremization factor
        #[arg(long, default_value_t = 1.0)]
        d: f64,
        /// Also draw this many Monte Carlo samples
        #[arg(long)]
        mc: Option<u64>,
        /// Sampler seed
        #[arg(long, default_value_t = 0xC0FFEE)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// List or emit the reference instances
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Check whether revealing one's signal is dominant on an instance
    Reveal {
        /// Instance file (JSON: {"n": ..., "states": [...]})
        file: PathBuf,
        /// Margin tolerance: margins below -TOL are violations
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Accept probability sums within 1e-6 of 1 and renormalize
        #[arg(long)]
        renormalize: bool,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Sample random projective structures and report the worst ratio seen
    Search {
        /// Number of experts
        #[arg(long)]
        n: usize,
        /// Number of structures to sample
        #[arg(long, default_value_t = 20)]
        trials: u64,
        /// average | extremize:D | random-expert | prior | tabular:FILE
        #[arg(long, default_value = "average")]
        strategy: String,
        /// Base seed; trial t uses seed + t
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Signal alphabet size per expert
        #[arg(long, default_value_t = 2)]
        alphabet: usize,
        /// Rejection-sampling budget per trial
        #[arg(long = "max-attempts", default_value_t = 100_000)]
        max_attempts: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Re-run the full acceptance suite and print one line per criterion
    Repro {
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// List catalog instances and their expected quantities
    List {
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Emit a catalog instance as an instance file
    Emit {
        /// Instance name (see `catalog list`), `secret-sharing`, or
        /// `random-projective`
        name: String,
        /// Expert count (secret-sharing, random-projective)
        #[arg(long)]
        n: Option<usize>,
        /// Prime modulus (secret-sharing)
        #[arg(long)]
        p: Option<u64>,
        /// Signal alphabet size (random-projective)
        #[arg(long, default_value_t = 2)]
        alphabet: usize,
        /// Sampler seed (random-projective)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rejection-sampling budget (random-projective)
        #[arg(long = "max-attempts", default_value_t = 100_000)]
        max_attempts: u64,
        /// Write to this file instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Runs the CLI on an argv slice (including the program name).
pub fn run(argv: &[String]) -> CommandResult {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let benign = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            return CommandResult {
                exit_code: if benign { 0 } else { 2 },
                report: e.to_string().trim_end().to_string(),
            };
        }
    };
    let outcome = match cli.command {
        Command::Check { file, condition, tol, renormalize, format } => {
            cmd_check(&file, condition, tol, renormalize, format)
        }
        Command::Ratio { file, strategy, renormalize, format } => {
            cmd_ratio(&file, &strategy, renormalize, format)
        }
        Command::Bounds { n_max, format } => cmd_bounds(n_max, format),
        Command::Gaussian { family, n, d, mc, seed, format } => {
            cmd_gaussian(&family, n, d, mc, seed, format)
        }
        Command::Catalog { action } => match action {
            CatalogAction::List { format } => cmd_catalog_list(format),
            CatalogAction::Emit { name, n, p, alphabet, seed, max_attempts, output } => {
                cmd_catalog_emit(&name, n, p, alphabet, seed, max_attempts, output.as_deref())
            }
        },
        Command::Reveal { file, tol, renormalize, format } => {
            cmd_reveal(&file, tol, renormalize, format)
        }
        Command::Search { n, trials, strategy, seed, alphabet, max_attempts, format } => {
            cmd_search(n, trials, &strategy, seed, alphabet, max_attempts, format)
        }
        Command::Repro { format } => cmd_repro(format),
    };
    outcome.unwrap_or_else(|msg| CommandResult { exit_code: 2, report: format!("error: {msg}") })
}

fn load_instance(path: &Path, renormalize: bool) -> Result<InfoStructure, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let file: InstanceFile = serde_json::from_str(&text)
        .map_err(|e| format!("invalid instance file {}: {e}", path.display()))?;
    let built = if renormalize {
        InfoStructure::new_renormalizing(file.n, file.states)
    } else {
        InfoStructure::from_instance_file(file)
    };
    built.map_err(|e| format!("invalid instance {}: {e}", path.display()))
}

fn parse_strategy(spec: &str) -> Result<Strategy, String> {
    if spec == "average" {
        return Ok(Strategy::Average);
    }
    if spec == "random-expert" {
        return Ok(Strategy::RandomExpertExpectation);
    }
    if spec == "prior" {
        return Ok(Strategy::PriorOnly);
    }
    if let Some(rest) = spec.strip_prefix("extremize:") {
        let d: f64 = rest
            .parse()
            .map_err(|_| format!("invalid extremization factor `{rest}` in --strategy"))?;
        if !d.is_finite() {
            return Err(format!("extremization factor `{rest}` must be finite"));
        }
        return Ok(Strategy::Extremize { d });
    }
    if let Some(path) = spec.strip_prefix("tabular:") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read tabular strategy {path}: {e}"))?;
        let table_spec: TabularSpec = serde_json::from_str(&text)
            .map_err(|e| format!("invalid tabular strategy {path}: {e}"))?;
        let table = TabularStrategy::from_spec(&table_spec)
            .map_err(|e| format!("invalid tabular strategy {path}: {e}"))?;
        return Ok(Strategy::Tabular(table));
    }
    Err(format!(
        "unknown strategy `{spec}`; expected average, extremize:D, random-expert, prior, or tabular:FILE"
    ))
}

fn parse_family(spec: &str, n: usize) -> Result<GaussianFamily, String> {
    let kind = if spec == "ind" {
        GaussianKind::IndependentStandard
    } else if spec == "dep" {
        GaussianKind::FullyDependent
    } else if let Some(rest) = spec.strip_prefix("imu:") {
        let mu: f64 = rest.parse().map_err(|_| format!("invalid mean `{rest}` in --family"))?;
        GaussianKind::IndependentMu { mu }
    } else {
        return Err(format!("unknown family `{spec}`; expected imu:MU, ind, or dep"));
    };
    GaussianFamily::new(kind, n).map_err(|e| format!("invalid family: {e}"))
}

fn validate_tol(tol: f64) -> Result<f64, String> {
    if !tol.is_finite() || tol < 0.0 {
        return Err(format!("--tol must be a nonnegative finite number, got {tol}"));
    }
    Ok(tol)
}

/// Serializes a report value with the top-level schema marker added.
fn with_schema(value: Value) -> String {
    let mut map = match value {
        Value::Object(map) => map,
        other => {
            let mut map = Map::new();
            map.insert("report".to_string(), other);
            map
        }
    };
    map.insert("schema".to_string(), Value::from(1));
    serde_json::to_string_pretty(&Value::Object(map)).expect("reports serialize")
}

fn fmt_subset(s: SignalSubset) -> String {
    let indices: Vec<String> = s.indices().iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", indices.join(","))
}

fn render_substitutes_text(report: &SubstitutesReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("condition: {}\n", report.condition));
    out.push_str(&format!("satisfied: {}\n", report.satisfied));
    out.push_str(&format!(
        "worst margin: {:e} (tolerance {:e})\n",
        report.worst_margin, report.tolerance
    ));
    if report.satisfied {
        if let Some(w) = report.witnesses.first() {
            out.push_str(&format!(
                "tightest triple: A={} B={} i={} lhs={} rhs={}\n",
                fmt_subset(w.a),
                fmt_subset(w.b),
                w.i,
                w.lhs,
                w.rhs
            ));
        }
    } else {
        out.push_str(&format!("violations reported: {}\n", report.witnesses.len()));
        for w in report.witnesses.iter().take(5) {
            out.push_str(&format!(
                "  A={} B={} i={} lhs={} rhs={} margin={:e}\n",
                fmt_subset(w.a),
                fmt_subset(w.b),
                w.i,
                w.lhs,
                w.rhs,
                w.margin
            ));
        }
        if report.witnesses.len() > 5 {
            out.push_str(&format!("  ... and {} more\n", report.witnesses.len() - 5));
        }
    }
    out.trim_end().to_string()
}

fn cmd_check(
    file: &Path,
    condition: ConditionArg,
    tol: f64,
    renormalize: bool,
    format: OutputFormat,
) -> Result<CommandResult, String> {
    let tol = validate_tol(tol)?;
    let info = load_instance(file, renormalize)?;
    let report = match condition {
        ConditionArg::Weak => substitutes::check_weak(&info, tol),
        ConditionArg::Projective => substitutes::check_projective(&info, tol),
        ConditionArg::ProjectiveRestricted => substitutes::check_projective_restricted(&info, tol),
    }
    .map_err(|e| e.to_string())?;
    let rendered = match format {
        OutputFormat::Text => render_substitutes_text(&report),
        OutputFormat::Json => {
            with_schema(serde_json::to_value(&report).expect("report serializes"))
        }
    };
    Ok(CommandResult { exit_code: if report.satisfied { 0 } else { 1 }, report: rendered })
}

fn cmd_ratio(
    file: &Path,
    strategy_spec: &str,
    renormalize: bool,
    format: OutputFormat,
) -> Result<CommandResult, String> {
    let strategy = parse_strategy(strategy_spec)?;
    let info = load_instance(file, renormalize)?;
    let benchmark = info.conditional_expectation(info.all_experts());
    let v_full = info.value(&benchmark);
    let ratio = aggregators::approximation_ratio_of(&info, &strategy)
        .map_err(|e| format!("cannot evaluate strategy: {e}"))?;
    let value = if matches!(strategy, Strategy::RandomExpertExpectation) {
        aggregators::random_expert_value(&info)
    } else {
        let output = aggregators::apply(&info, &strategy)
            .map_err(|e| format!("cannot evaluate strategy: {e}"))?;
        info.value(&output)
    };
    let rendered = match format {
        OutputFormat::Text => format!(
            "strategy: {strategy}\nratio: {ratio}\nvalue: {value}\nbenchmark value: {v_full}\nuses prior: {}",
            strategy.uses_prior()
        ),
        OutputFormat::Json => with_schema(json!({
            "strategy": strategy_spec,
            "ratio": ratio,
            "value": value,
            "benchmark_value": v_full,
            "n": info.n_experts(),
            "uses_prior": strategy.uses_prior(),
        })),
    };
    Ok(CommandResult { exit_code: 0, report: rendered })
}

fn cmd_bounds(n_max: u64, format: BoundsFormat) -> Result<CommandResult, String> {
    if n_max == 0 {
        return Err("--n-max must be at least 1".to_string());
    }
    let table = guarantees::emit_guarantee_table(n_max);
    let rendered = match format {
        BoundsFormat::Csv => table.to_csv().trim_end().to_string(),
        BoundsFormat::Table => {
            let mut out = String::new();
            out.push_str(&format!(
                "{:>4} {:>12} {:>9} {:>9} {:>9} {:>9} {:>9} {:>12} {:>9} {:>9} {:>12} {:>5}\n",
                "n",
                "pf_bound",
                "a_pf",
                "b_pf",
                "kp_d",
                "a_kp",
                "b_kp",
                "kp_bound",
                "neg_pf",
                "neg_kp",
                "kp_closed",
                "match"
            ));
            let mut any_mismatch = false;
            for r in &table.rows {
                let disc = guarantees::known_prior_discrepancy(r.n);
                any_mismatch |= !disc.matches;
                out.push_str(&format!(
                    "{:>4} {:>12.9} {:>9.6} {:>9.6} {:>9.6} {:>9.6} {:>9.6} {:>12.9} {:>9.6} {:>9.6} {:>12.9} {:>5}\n",
                    r.n,
                    r.prior_free_bound,
                    r.a_pf,
                    r.b_pf,
                    r.known_prior_d,
                    r.a_kp,
                    r.b_kp,
                    r.known_prior_bound,
                    r.neg_pf,
                    r.neg_kp_conditional,
                    disc.closed_form,
                    disc.matches
                ));
            }
            if any_mismatch {
                out.push_str(
                    "note: the directly stated known-prior closed form (kp_closed) disagrees \
                     with the optimization chain (kp_bound) at small n\n",
                );
            }
            out.trim_end().to_string()
        }
        BoundsFormat::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| {
                    let mut row = match serde_json::to_value(r).expect("row serializes") {
                        Value::Object(map) => map,
                        _ => unreachable!("rows are structs"),
                    };
                    let disc = guarantees::known_prior_discrepancy(r.n);
                    row.insert("known_prior_closed_form".into(), Value::from(disc.closed_form));
                    row.insert(
                        "closed_form_matches_optimization".into(),
                        Value::from(disc.matches),
                    );
                    Value::Object(row)
                })
                .collect();
            with_schema(json!({ "rows": rows }))
        }
    };
    Ok(CommandResult { exit_code: 0, report: rendered })
}

fn cmd_gaussian(
    family_spec: &str,
    n: usize,
    d: f64,
    mc: Option<u64>,
    seed: u64,
    format: OutputFormat,
) -> Result<CommandResult, String> {
    let family = parse_family(family_spec, n)?;
    let closed = family.closed_form_ratio(d).map_err(|e| e.to_string())?;
    let estimate = match mc {
        Some(samples) => {
            Some(family.sample_and_estimate_ratio(d, samples, seed).map_err(|e| e.to_string())?)
        }
        None => None,
    };
    let rendered = match format {
        OutputFormat::Text => {
            let mut out =
                format!("family: {family_spec} (n={n})\nd: {d}\nclosed-form ratio: {closed}");
            if let Some(est) = &estimate {
                out.push_str(&format!(
                    "\nmonte carlo: {} (stderr {:e}, {} samples, seed {})",
                    est.ratio_hat, est.stderr, est.samples, est.seed
                ));
            }
            out
        }
        OutputFormat::Json => with_schema(json!({
            "family": family.kind(),
            "n": n,
            "d": d,
            "closed_form_ratio": closed,
            "monte_carlo": estimate,
        })),
    };
    Ok(CommandResult { exit_code: 0, report: rendered })
}

fn cmd_catalog_list(format: OutputFormat) -> Result<CommandResult, String> {
    let entries = catalog::entries();
    let rendered = match format {
        OutputFormat::Text => {
            let mut out = String::new();
            for e in &entries {
                out.push_str(&format!(
                    "{}: n={}, states={}\n",
                    e.name,
                    e.structure.n_experts(),
                    e.structure.n_states()
                ));
                for (key, value) in &e.expected {
                    out.push_str(&format!("  {key} = {value}\n"));
                }
            }
            out.push_str(
                "parameterized: secret-sharing (--n, --p), random-projective (--n, --alphabet, --seed)\n",
            );
            out.trim_end().to_string()
        }
        OutputFormat::Json => {
            let items: Vec<Value> = entries
                .iter()
                .map(|e| {
                    let expected: Map<String, Value> =
                        e.expected.iter().map(|(k, v)| (k.clone(), Value::from(*v))).collect();
                    json!({
                        "name": e.name,
                        "n": e.structure.n_experts(),
                        "states": e.structure.n_states(),
                        "expected": expected,
                    })
                })
                .collect();
            with_schema(json!({ "entries": items }))
        }
    };
    Ok(CommandResult { exit_code: 0, report: rendered })
}

#[allow(clippy::too_many_arguments)]
fn cmd_catalog_emit(
    name: &str,
    n: Option<usize>,
    p: Option<u64>,
    alphabet: usize,
    seed: u64,
    max_attempts: u64,
    output: Option<&Path>,
) -> Result<CommandResult, String> {
    let info = if name == "secret-sharing" {
        let n = n.ok_or("secret-sharing requires --n")?;
        let p = p.ok_or("secret-sharing requires --p")?;
        catalog::secret_sharing(n, p).map_err(|e| e.to_string())?
    } else if name == "random-projective" {
        let n = n.ok_or("random-projective requires --n")?;
        catalog::random_projective_structure(n, alphabet, seed, max_attempts)
            .map_err(|e| e.to_string())?
    } else {
        let entries = catalog::entries();
        match entries.into_iter().find(|e| e.name == name) {
            Some(e) => e.structure,
            None => {
                let names: Vec<String> = catalog::entries()
                    .iter()
                    .map(|e| e.name.clone())
                    .chain(["secret-sharing".to_string(), "random-projective".to_string()])
                    .collect();
                return Err(format!(
                    "unknown catalog instance `{name}`; valid names: {}",
                    names.join(", ")
                ));
            }
        }
    };
    let payload =
        serde_json::to_string_pretty(&info.to_instance_file()).expect("instances serialize") + "\n";
    match output {
        Some(path) => {
            std::fs::write(path, &payload)
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            Ok(CommandResult {
                exit_code: 0,
                report: format!(
                    "wrote {} ({} states, {} experts)",
                    path.display(),
                    info.n_states(),
                    info.n_experts()
                ),
            })
        }
        None => Ok(CommandResult { exit_code: 0, report: payload.trim_end().to_string() }),
    }
}

fn cmd_reveal(
    file: &Path,
    tol: f64,
    renormalize: bool,
    format: OutputFormat,
) -> Result<CommandResult, String> {
    let tol = validate_tol(tol)?;
    let info = load_instance(file, renormalize)?;
    let report = revelation::check_revelation_dominance(&info, tol).map_err(|e| e.to_string())?;
    let rendered = match format {
        OutputFormat::Text => {
            let mut out = String::new();
            out.push_str(&format!("revelation dominant: {}\n", report.dominant));
            out.push_str(&format!(
                "worst margin: {:e} (tolerance {:e})\n",
                report.worst_margin, report.tolerance
            ));
            for w in report.witnesses.iter().take(5) {
                out.push_str(&format!(
                    "  expert {} team={} revealers={} reveal={} withhold={}\n",
                    w.expert,
                    fmt_subset(w.team),
                    fmt_subset(w.revealers),
                    w.loss_reveal,
                    w.loss_withhold
                ));
            }
            if report.witnesses.len() > 5 {
                out.push_str(&format!("  ... and {} more\n", report.witnesses.len() - 5));
            }
            out.trim_end().to_string()
        }
        OutputFormat::Json => {
            with_schema(serde_json::to_value(&report).expect("report serializes"))
        }
    };
    Ok(CommandResult { exit_code: if report.dominant { 0 } else { 1 }, report: rendered })
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    n: usize,
    trials: u64,
    strategy_spec: &str,
    seed: u64,
    alphabet: usize,
    max_attempts: u64,
    format: OutputFormat,
) -> Result<CommandResult, String> {
    if trials == 0 {
        return Err("--trials must be at least 1".to_string());
    }
    let strategy = parse_strategy(strategy_spec)?;
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = f64::NEG_INFINITY;
    let mut min_seed = seed;
    for t in 0..trials {
        let trial_seed = seed.wrapping_add(t);
        let info = catalog::random_projective_structure(n, alphabet, trial_seed, max_attempts)
            .map_err(|e| format!("trial {t} (seed {trial_seed}): {e}"))?;
        let ratio = aggregators::approximation_ratio_of(&info, &strategy)
            .map_err(|e| format!("trial {t} (seed {trial_seed}): {e}"))?;
        if ratio < min_ratio {
            min_ratio = ratio;
            min_seed = trial_seed;
        }
        max_ratio = max_ratio.max(ratio);
    }
    const NOTE: &str =
        "empirical minimum over sampled projective instances; not a worst-case certificate";
    let rendered = match format {
        OutputFormat::Text => format!(
            "strategy: {strategy}\ntrials: {trials} (n={n}, alphabet={alphabet}, base seed {seed})\nworst ratio: {min_ratio} (seed {min_seed})\nbest ratio: {max_ratio}\nnote: {NOTE}"
        ),
        OutputFormat::Json => with_schema(json!({
            "n": n,
            "alphabet": alphabet,
            "trials": trials,
            "strategy": strategy_spec,
            "base_seed": seed,
            "min_ratio": min_ratio,
            "min_ratio_seed": min_seed,
            "max_ratio": max_ratio,
            "certified": false,
            "note": NOTE,
        })),
    };
    Ok(CommandResult { exit_code: 0, report: rendered })
}

fn cmd_repro(format: OutputFormat) -> Result<CommandResult, String> {
    let results = repro::run_all();
    let all_passed = results.iter().all(|r| r.passed);
    let rendered = match format {
        OutputFormat::Text => {
            let mut out = String::new();
            for r in &results {
                out.push_str(&format!(
                    "criterion {:>2} {} [{}] {}\n",
                    r.id,
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.details
                ));
            }
            out.push_str(if all_passed { "all criteria passed" } else { "some criteria FAILED" });
            out
        }
        OutputFormat::Json => with_schema(json!({
            "criteria": serde_json::to_value(&results).expect("results serialize"),
            "all_passed": all_passed,
        })),
    };
    Ok(CommandResult { exit_code: if all_passed { 0 } else { 1 }, report: rendered })
}
