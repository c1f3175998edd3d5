//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification or certification failure, 2 input
//! error, 3 union rewrite inapplicable.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::coalition::Coalition;
use crate::data::{PopulationTable, RuleConfig};
use crate::decomposition::{DSummary, TheoremOneOptions, DEFAULT_MEMBER_CAP};
use crate::error::GameError;
use crate::eu::{eu_upper_bound, BoundOptions, BoundReport, Roles};
use crate::game::WeightedGame;
use crate::lower_bound::{
    search_certificate_set, verify_certificate_set, CertificateSetReport, PairStatus,
    DEFAULT_DELTA_CAP,
};
use crate::sweep::{equivalent, Equivalence, SweepConfig};
use crate::EuRule;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INAPPLICABLE: i32 = 3;

/// Gap members listed in reports only up to this many.
const REPORT_MEMBER_LIMIT: u64 = 1000;

#[derive(Debug, Parser)]
#[command(name = "votedim", version, about = "Dimension bounds for the EU Council voting rule")]
pub struct Cli {
    /// Worker threads for coalition sweeps (default: available parallelism).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the dimension upper bound for a dataset.
    Analyze {
        #[command(flatten)]
        dataset: DatasetArgs,
        /// Emit the machine-readable report.
        #[arg(long)]
        json: bool,
    },
    /// Exhaustively check the emitted intersection against the rule.
    Verify {
        #[command(flatten)]
        dataset: DatasetArgs,
        #[arg(long)]
        json: bool,
        #[arg(long, hide = true, default_value_t = 0, allow_hyphen_values = true)]
        corrupt_u_offset: i64,
    },
    /// Lower-bound certificates.
    #[command(subcommand)]
    LowerBound(LowerBoundCommand),
}

#[derive(Debug, Subcommand)]
pub enum LowerBoundCommand {
    /// Check a coalition list for pairwise incompatibility.
    Verify {
        #[command(flatten)]
        dataset: DatasetArgs,
        /// One coalition per line as comma-separated 1-based ranks.
        #[arg(long)]
        coalitions: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DELTA_CAP)]
        delta_cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Heuristic search for a certified coalition set.
    Search {
        #[command(flatten)]
        dataset: DatasetArgs,
        /// Pool size; the pair budget defaults to all pool pairs.
        #[arg(long)]
        budget: usize,
        #[arg(long)]
        pair_budget: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    /// `builtin:2014|2016|2017|2018` or a CSV path.
    #[arg(long)]
    pub data: String,
    /// Countries to drop, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub exclude: Vec<String>,
    /// Use the blocking game as v_A and the population game as v_B.
    #[arg(long)]
    pub swap_roles: bool,
    /// Accept a CSV whose populations are not in descending order.
    #[arg(long)]
    pub allow_unordered: bool,
    #[arg(long, default_value_t = DEFAULT_MEMBER_CAP)]
    pub member_cap: usize,
    /// Smallest group able to block regardless of population.
    #[arg(long, default_value_t = 4)]
    pub blocking_minority: usize,
}

impl DatasetArgs {
    fn load(&self) -> Result<PopulationTable, GameError> {
        if let Some(year) = self.data.strip_prefix("builtin:") {
            return PopulationTable::builtin(year);
        }
        let bytes = std::fs::read(&self.data)
            .map_err(|e| GameError::Table(format!("{}: {e}", self.data)))?;
        let label = std::path::Path::new(&self.data)
            .file_stem()
            .map_or_else(|| self.data.clone(), |s| s.to_string_lossy().into_owned());
        PopulationTable::load_with(
            &bytes,
            &label,
            crate::data::LoadOptions {
                allow_unordered: self.allow_unordered,
            },
        )
    }

    fn rule_config(&self) -> RuleConfig {
        RuleConfig {
            blocking_minority_size: self.blocking_minority,
            ..RuleConfig::default()
        }
    }

    fn excluded(&self) -> Vec<&str> {
        self.exclude.iter().map(|s| s.trim()).filter(|s| !s.is_empty()).collect()
    }

    fn options(&self, u_offset: i64) -> BoundOptions {
        BoundOptions {
            roles: if self.swap_roles {
                Roles::BlockingFirst
            } else {
                Roles::PopulationFirst
            },
            theorem: TheoremOneOptions {
                member_cap: self.member_cap,
                u_offset,
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RuleEcho {
    pub member_quota_fraction: String,
    pub population_quota_fraction: String,
    pub blocking_minority_size: usize,
    pub member_quota: u64,
    pub blocking_quota: u64,
    pub population_scale: u64,
}

#[derive(Debug, Serialize)]
pub struct GapEcho {
    pub count: u64,
    /// Source-table ranks; `null` when too many to list.
    pub members: Option<Vec<Vec<usize>>>,
    pub core: Vec<usize>,
    pub min_weight_scaled: Option<u64>,
}

#[derive(Debug, Serialize)]
pub struct SlackEcho {
    pub scaled: u64,
    pub exact: String,
    pub ceiling: u64,
}

#[derive(Debug, Serialize)]
pub struct GameRow {
    pub quota: u64,
    pub weights: Vec<u64>,
}

/// Everything `analyze` prints, in both renderings.
#[derive(Debug, Serialize)]
pub struct ReportDocument {
    pub dataset: String,
    pub excluded: Vec<String>,
    pub members: usize,
    pub ranks: Vec<usize>,
    pub rule: RuleEcho,
    pub roles: Roles,
    pub method: crate::Method,
    pub d: Option<GapEcho>,
    pub u: Option<SlackEcho>,
    pub t: Vec<usize>,
    pub f: Vec<Vec<usize>>,
    pub games: Vec<GameRow>,
    pub bound: usize,
    pub verification: Option<VerificationEcho>,
}

#[derive(Debug, Serialize)]
pub struct VerificationEcho {
    pub passed: bool,
    pub coalitions_checked: u64,
    pub counterexample: Option<Vec<usize>>,
    pub intersection_wins: Option<bool>,
}

fn gap_echo(rule: &EuRule, d: &DSummary) -> GapEcho {
    let members = d
        .members
        .as_ref()
        .filter(|_| d.member_count <= REPORT_MEMBER_LIMIT)
        .map(|ms| ms.iter().map(|m| rule.ranks_of(m)).collect());
    GapEcho {
        count: d.member_count,
        members,
        core: if d.is_empty() {
            Vec::new()
        } else {
            rule.ranks_of(&d.t_set)
        },
        min_weight_scaled: d.min_weight_in_a,
    }
}

impl ReportDocument {
    pub fn from_report(r: &BoundReport) -> Self {
        let rule = &r.rule;
        let cfg = rule.config;
        Self {
            dataset: r.dataset.clone(),
            excluded: r.excluded.clone(),
            members: rule.n(),
            ranks: rule.ranks(),
            rule: RuleEcho {
                member_quota_fraction: cfg.member_quota_fraction.to_string(),
                population_quota_fraction: cfg.population_quota_fraction.to_string(),
                blocking_minority_size: cfg.blocking_minority_size,
                member_quota: rule.count_game.quota(),
                blocking_quota: rule.blocking_game.quota(),
                population_scale: rule.population_scale(),
            },
            roles: r.roles,
            method: r.decomposition.method,
            d: r.decomposition.d_summary.as_ref().map(|d| gap_echo(rule, d)),
            u: r.slack.map(|s| {
                let (num, den) = s.exact();
                SlackEcho {
                    scaled: s.scaled,
                    exact: format!("{num}/{den}"),
                    ceiling: s.ceiling,
                }
            }),
            t: r
                .decomposition
                .boosted
                .iter()
                .map(|&k| rule.players[k].rank)
                .collect(),
            f: r.decomposition.f_set.iter().map(|s| rule.ranks_of(s)).collect(),
            games: r.all_games().iter().map(game_row).collect(),
            bound: r.bound,
            verification: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "dataset: {}", self.dataset);
        if !self.excluded.is_empty() {
            let _ = writeln!(w, "excluded: {}", self.excluded.join(", "));
        }
        let _ = writeln!(w, "members: {}", self.members);
        let _ = writeln!(
            w,
            "rule: count >= {} ({} of members) AND (population >= {} OR count >= {} (blocking minority {}))",
            self.rule.member_quota,
            self.rule.member_quota_fraction,
            self.rule.population_quota_fraction,
            self.rule.blocking_quota,
            self.rule.blocking_minority_size
        );
        let _ = writeln!(w, "roles: {:?}", self.roles);
        let _ = writeln!(w, "method: {:?}", self.method);
        if let Some(d) = &self.d {
            let _ = writeln!(w, "D: {} coalitions", d.count);
            if let Some(members) = &d.members {
                for m in members {
                    let _ = writeln!(w, "  {}", set_notation(m, &self.ranks));
                }
            }
            if let Some(min) = d.min_weight_scaled {
                let _ = writeln!(w, "min weight in D (scaled): {min}");
            }
        }
        if let Some(u) = &self.u {
            let _ = writeln!(
                w,
                "u: {} (scaled) = {} = ceiling {}",
                u.scaled, u.exact, u.ceiling
            );
        }
        let _ = writeln!(w, "T: {}", braces(&self.t));
        let _ = writeln!(w, "F: {} coalitions", self.f.len());
        for s in &self.f {
            let _ = writeln!(w, "  {}", braces(s));
        }
        let _ = writeln!(w, "upper bound: {}", self.bound);
        let _ = writeln!(
            w,
            "games (population weights scaled by {}):",
            self.rule.population_scale
        );
        for g in &self.games {
            let weights: Vec<String> = g.weights.iter().map(u64::to_string).collect();
            let _ = writeln!(w, "  {}; {}", g.quota, weights.join(","));
        }
        if let Some(v) = &self.verification {
            let _ = writeln!(
                w,
                "verification: {} ({} coalitions)",
                if v.passed { "pass" } else { "FAIL" },
                v.coalitions_checked
            );
            if let Some(c) = &v.counterexample {
                let _ = writeln!(
                    w,
                    "counterexample: {} (intersection {}, rule {})",
                    braces(c),
                    if v.intersection_wins == Some(true) { "wins" } else { "loses" },
                    if v.intersection_wins == Some(true) { "loses" } else { "wins" },
                );
            }
        }
        out
    }
}

fn game_row(g: &WeightedGame) -> GameRow {
    GameRow {
        quota: g.quota(),
        weights: g.weights().to_vec(),
    }
}

fn braces(ranks: &[usize]) -> String {
    let parts: Vec<String> = ranks.iter().map(usize::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

/// `{a,b,c}^c` when the complement is the shorter listing.
fn set_notation(members: &[usize], universe: &[usize]) -> String {
    if members.len() * 2 > universe.len() {
        let rest: Vec<usize> = universe
            .iter()
            .copied()
            .filter(|r| !members.contains(r))
            .collect();
        format!("{}^c", braces(&rest))
    } else {
        braces(members)
    }
}

fn input_error(err: &mut dyn Write, e: &GameError) -> i32 {
    let _ = writeln!(err, "error: {e}");
    match e {
        GameError::Inapplicable { .. } => EXIT_INAPPLICABLE,
        _ => EXIT_INPUT,
    }
}

fn inapplicable(err: &mut dyn Write, e: &GameError) -> i32 {
    if let GameError::Inapplicable { summary } = e {
        let _ = writeln!(
            err,
            "union rewrite inapplicable: {} gap coalitions share no common player; no bound",
            summary.member_count
        );
    }
    EXIT_INAPPLICABLE
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let cfg = SweepConfig::with_threads(cli.threads);
    match cli.command {
        Command::Analyze { dataset, json } => analyze(&dataset, json, cfg, out, err),
        Command::Verify {
            dataset,
            json,
            corrupt_u_offset,
        } => verify(&dataset, json, corrupt_u_offset, cfg, out, err),
        Command::LowerBound(LowerBoundCommand::Verify {
            dataset,
            coalitions,
            delta_cap,
            json,
        }) => lower_bound_verify(&dataset, &coalitions, delta_cap, json, cfg, out, err),
        Command::LowerBound(LowerBoundCommand::Search {
            dataset,
            budget,
            pair_budget,
            seed,
            json,
        }) => {
            let pairs = pair_budget.unwrap_or(budget.saturating_mul(budget));
            lower_bound_search(&dataset, budget, pairs, seed, json, cfg, out, err)
        }
    }
}

fn bound_report(
    dataset: &DatasetArgs,
    u_offset: i64,
    cfg: SweepConfig,
    err: &mut dyn Write,
) -> Result<BoundReport, i32> {
    let table = dataset.load().map_err(|e| input_error(err, &e))?;
    for warning in &table.warnings {
        let _ = writeln!(err, "warning: {warning}");
    }
    eu_upper_bound(
        &table,
        &dataset.excluded(),
        dataset.rule_config(),
        dataset.options(u_offset),
        cfg,
    )
    .map_err(|e| match e {
        GameError::Inapplicable { .. } => inapplicable(err, &e),
        _ => input_error(err, &e),
    })
}

fn analyze(
    dataset: &DatasetArgs,
    json: bool,
    cfg: SweepConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let started = Instant::now();
    let report = match bound_report(dataset, 0, cfg, err) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let doc = ReportDocument::from_report(&report);
    if json {
        let _ = out.write_all(doc.to_json().as_bytes());
    } else {
        let _ = out.write_all(doc.to_text().as_bytes());
        let _ = writeln!(out, "elapsed: {:.2?}", started.elapsed());
    }
    EXIT_OK
}

fn verify(
    dataset: &DatasetArgs,
    json: bool,
    u_offset: i64,
    cfg: SweepConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let started = Instant::now();
    let report = match bound_report(dataset, u_offset, cfg, err) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let intersection = match report.intersection() {
        Ok(e) => e,
        Err(e) => return input_error(err, &e),
    };
    let result = match equivalent(&intersection, &report.rule.expr, cfg) {
        Ok(r) => r,
        Err(e) => return input_error(err, &e),
    };
    let mut doc = ReportDocument::from_report(&report);
    let rule = &report.rule;
    doc.verification = Some(match result {
        Equivalence::Equal => VerificationEcho {
            passed: true,
            coalitions_checked: 1u64 << rule.n(),
            counterexample: None,
            intersection_wins: None,
        },
        Equivalence::Differ {
            coalition,
            left_wins,
        } => VerificationEcho {
            passed: false,
            coalitions_checked: 1u64 << rule.n(),
            counterexample: Some(rule.ranks_of(&coalition)),
            intersection_wins: Some(left_wins),
        },
    });
    let passed = result.is_equal();
    if json {
        let _ = out.write_all(doc.to_json().as_bytes());
    } else {
        let v = doc.verification.as_ref().unwrap();
        let _ = writeln!(
            out,
            "dataset {}: {} games intersected, {} coalitions checked: {}",
            doc.dataset,
            doc.games.len(),
            v.coalitions_checked,
            if passed { "pass" } else { "FAIL" }
        );
        if let Some(c) = &v.counterexample {
            let _ = writeln!(
                out,
                "counterexample {}: intersection {}, rule {}",
                braces(c),
                if left_wins_of(&result) { "wins" } else { "loses" },
                if left_wins_of(&result) { "loses" } else { "wins" }
            );
        }
        let _ = writeln!(out, "elapsed: {:.2?}", started.elapsed());
    }
    if passed {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn left_wins_of(e: &Equivalence) -> bool {
    matches!(e, Equivalence::Differ { left_wins: true, .. })
}

/// Parses the coalition-list format: comma-separated ranks per line, `#`
/// comments, blank lines ignored. Returns each coalition with its line.
pub fn parse_coalition_file(
    text: &str,
    rule: &EuRule,
) -> Result<Vec<(usize, Coalition)>, GameError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut ranks = Vec::new();
        for field in body.split(',') {
            let field = field.trim();
            let rank: usize = field.parse().map_err(|_| GameError::CoalitionFile {
                line,
                message: format!("{field:?} is not a rank"),
            })?;
            ranks.push(rank);
        }
        let c = rule
            .coalition_from_ranks(&ranks)
            .map_err(|_| GameError::CoalitionFile {
                line,
                message: format!(
                    "rank out of range; valid ranks are {}",
                    braces(&rule.ranks())
                ),
            })?;
        out.push((line, c));
    }
    if out.is_empty() {
        return Err(GameError::CoalitionFile {
            line: 0,
            message: "no coalitions".into(),
        });
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct PairEcho {
    pub i: usize,
    pub j: usize,
    pub status: &'static str,
    pub p: Option<Vec<usize>>,
    pub q: Option<Vec<usize>>,
}

#[derive(Debug, Serialize)]
pub struct LowerBoundDocument {
    pub dataset: String,
    pub excluded: Vec<String>,
    pub coalitions: Vec<Vec<usize>>,
    pub losing: Vec<bool>,
    pub pairs: Vec<PairEcho>,
    pub certified_pairs: usize,
    pub lower_bound: Option<usize>,
}

impl LowerBoundDocument {
    fn new(dataset: &str, excluded: Vec<String>, rule: &EuRule, r: &CertificateSetReport) -> Self {
        Self {
            dataset: dataset.to_string(),
            excluded,
            coalitions: r.coalitions.iter().map(|c| rule.ranks_of(c)).collect(),
            losing: r.losing.clone(),
            pairs: r
                .pairs
                .iter()
                .map(|p| {
                    let (status, cert) = match &p.status {
                        PairStatus::Certified { certificate } => ("certified", Some(certificate)),
                        PairStatus::NotCertified => ("not-certified", None),
                        PairStatus::Skipped => ("skipped", None),
                        PairStatus::NotAttempted { .. } => ("not-attempted", None),
                    };
                    PairEcho {
                        i: p.i + 1,
                        j: p.j + 1,
                        status,
                        p: cert.map(|c| rule.ranks_of(&c.p)),
                        q: cert.map(|c| rule.ranks_of(&c.q)),
                    }
                })
                .collect(),
            certified_pairs: r.certified_pairs(),
            lower_bound: r.lower_bound,
        }
    }

    fn to_text(&self, lines: Option<&[usize]>) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "dataset: {}", self.dataset);
        for (k, c) in self.coalitions.iter().enumerate() {
            let origin = lines.map_or(String::new(), |l| format!(" (line {})", l[k]));
            let _ = writeln!(
                w,
                "C{}{}: {} {}",
                k + 1,
                origin,
                braces(c),
                if self.losing[k] { "losing" } else { "WINNING" }
            );
        }
        for p in &self.pairs {
            let _ = write!(w, "C{} x C{}: {}", p.i, p.j, p.status);
            if let (Some(a), Some(b)) = (&p.p, &p.q) {
                let _ = write!(w, " p={} q={}", braces(a), braces(b));
            }
            let _ = writeln!(w);
        }
        let _ = writeln!(
            w,
            "certified pairs: {} of {}",
            self.certified_pairs,
            self.pairs.len()
        );
        match self.lower_bound {
            Some(k) => {
                let _ = writeln!(w, "certified lower bound: {k}");
            }
            None => {
                let _ = writeln!(w, "not certified");
            }
        }
        out
    }
}

fn rule_for(dataset: &DatasetArgs, err: &mut dyn Write) -> Result<(String, EuRule), i32> {
    let table = dataset.load().map_err(|e| input_error(err, &e))?;
    let rule = crate::data::build_eu_rule(&table, &dataset.excluded(), dataset.rule_config())
        .map_err(|e| input_error(err, &e))?;
    Ok((table.year_label, rule))
}

fn lower_bound_verify(
    dataset: &DatasetArgs,
    path: &PathBuf,
    delta_cap: usize,
    json: bool,
    cfg: SweepConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let (label, rule) = match rule_for(dataset, err) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return EXIT_INPUT;
        }
    };
    let parsed = match parse_coalition_file(&text, &rule) {
        Ok(p) => p,
        Err(e) => return input_error(err, &e),
    };
    let lines: Vec<usize> = parsed.iter().map(|(l, _)| *l).collect();
    let coalitions: Vec<Coalition> = parsed.iter().map(|(_, c)| *c).collect();
    let report = match verify_certificate_set(&rule.expr, &coalitions, delta_cap, cfg) {
        Ok(r) => r,
        Err(GameError::DuplicateCoalition(c)) => {
            let _ = writeln!(err, "error: duplicate coalition {}", braces(&rule.ranks_of(&c)));
            return EXIT_INPUT;
        }
        Err(e) => return input_error(err, &e),
    };
    for (k, losing) in report.losing.iter().enumerate() {
        if !losing {
            let _ = writeln!(
                err,
                "line {}: coalition {} is winning",
                lines[k],
                braces(&rule.ranks_of(&coalitions[k]))
            );
        }
    }
    let doc = LowerBoundDocument::new(&label, dataset.exclude.clone(), &rule, &report);
    if json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializes"));
    } else {
        let _ = out.write_all(doc.to_text(Some(&lines)).as_bytes());
    }
    if report.lower_bound.is_some() {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

#[allow(clippy::too_many_arguments)]
fn lower_bound_search(
    dataset: &DatasetArgs,
    budget: usize,
    pair_budget: usize,
    seed: u64,
    json: bool,
    cfg: SweepConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let (label, rule) = match rule_for(dataset, err) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let report = match search_certificate_set(&rule.expr, budget, pair_budget, seed, cfg) {
        Ok(r) => r,
        Err(e) => return input_error(err, &e),
    };
    let doc = LowerBoundDocument::new(&label, dataset.exclude.clone(), &rule, &report);
    if json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializes"));
    } else {
        let _ = out.write_all(doc.to_text(None).as_bytes());
    }
    if report.lower_bound.is_some() {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}
