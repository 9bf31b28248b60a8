//! Command-line front end: `dual`, `norms`, `apply` and `verify`.
//!
//! Exit codes are 0 on success, 1 when a verification check fails, 2 for
//! usage and input errors and 3 when a numerical method does not converge.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::convolution::{convolve, gamma, gamma_adjoint, gamma_check, gamma_check_adjoint, BiBlockOperator, BiFunction};
use crate::error::{Error, Result};
use crate::fourier::{
    norm_a, norm_adelta, norm_adelta_dual, norm_agamma, norm_vn, BlockOperator, ScalarFunction,
};
use crate::group::{FiniteGroup, GroupSpec};
use crate::normcalc::{
    cb_norm_gamma_adjoint, cb_norm_gamma_check_adjoint, quotient_norm_projective, SolverConfig, SolverReport,
};
use crate::rep::{compute_dual, UnitaryDual};
use crate::serial::{fmt_num, matrix_to_json, round_json};
use crate::verify::{self, CheckSpec, RunConfig, VerifyReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ncfourier", version, about = "Fourier algebra norms and twisted convolutions on finite groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the unitary dual of a group.
    Dual(DualArgs),
    /// Evaluate the norms of a function or of a block operator read from JSON.
    Norms(NormsArgs),
    /// Apply a map to JSON inputs.
    Apply(ApplyArgs),
    /// Run the verification checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct GroupSource {
    /// Builtin group: cyclic:n, dihedral:n, s:n, q8, klein4, product:A,B or file:PATH.
    #[arg(long)]
    pub group: Option<GroupSpec>,
    /// Cayley table file.
    #[arg(long, value_name = "PATH")]
    pub cayley: Option<PathBuf>,
}

impl GroupSource {
    fn spec(&self) -> GroupSpec {
        match (&self.group, &self.cayley) {
            (Some(g), _) => g.clone(),
            (None, Some(path)) => GroupSpec::File(path.clone()),
            (None, None) => unreachable!("clap requires one group source"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DualArgs {
    #[command(flatten)]
    pub source: GroupSource,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct NormsArgs {
    #[command(flatten)]
    pub source: GroupSource,
    /// JSON file with a function (array of complex numbers) or a block
    /// operator (array of matrices); `-` reads standard input.
    pub input: PathBuf,
    /// Also run the quotient-norm or cb-norm solvers.
    #[arg(long)]
    pub solve: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative bracket tolerance of the solvers.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum MapKind {
    /// Function w on G×G, or two functions taken as u⊗v, to s ↦ Σ_r w(sr, r)/|G|.
    Gamma,
    /// Same inputs, to s ↦ Σ_r w(sr, r⁻¹)/|G|.
    GammaCheck,
    /// Two functions to their convolution.
    Convolve,
    /// Block operator to its image on the product dual.
    GammaAdjoint,
    /// Block operator to its image under the adjoint of gamma_check.
    GammaCheckAdjoint,
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    #[command(flatten)]
    pub source: GroupSource,
    #[arg(value_enum)]
    pub map: MapKind,
    /// One or two JSON input files; `-` reads standard input.
    #[arg(required = true, num_args = 1..=2)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("which").required(true).args(["check", "all"])))]
pub struct VerifyArgs {
    /// Check id to run; may be repeated.
    #[arg(long)]
    pub check: Vec<String>,
    /// Run every registered check.
    #[arg(long)]
    pub all: bool,
    /// Roster group; may be repeated. Defaults to the builtin roster.
    #[arg(long)]
    pub group: Vec<GroupSpec>,
    /// Roster group from a Cayley table file; may be repeated.
    #[arg(long, value_name = "PATH")]
    pub cayley: Vec<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance for every selected check instead of its default.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Trials per check instead of the defaults.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Highest amplification level of the level checks.
    #[arg(long, default_value_t = 3)]
    pub max_level: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// How a successful command ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    CheckFailed,
    NotConverged,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => EXIT_OK,
            Status::CheckFailed => EXIT_CHECK_FAILED,
            Status::NotConverged => EXIT_NOT_CONVERGED,
        }
    }
}

pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::ClusteringFailure { .. } | Error::Tolerance { .. } | Error::Internal(_) => EXIT_NOT_CONVERGED,
        _ => EXIT_USAGE,
    }
}

/// Rendered output of a command.
pub struct Outcome {
    pub body: String,
    /// Short summary printed to standard output when the body goes to a file.
    pub summary: Option<String>,
    pub status: Status,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let out = match &cli.command {
        Command::Dual(a) => &a.output.out,
        Command::Norms(a) => &a.output.out,
        Command::Apply(a) => &a.output.out,
        Command::Verify(a) => &a.output.out,
    };
    match execute(&cli.command).and_then(|o| emit(&o, out.as_deref()).map(|_| o.status)) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            error_exit_code(&e)
        }
    }
}

fn emit(outcome: &Outcome, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, &outcome.body)?;
            if let Some(s) = &outcome.summary {
                print!("{s}");
            }
        }
        None => print!("{}", outcome.body),
    }
    Ok(())
}

pub fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Dual(a) => cmd_dual(a),
        Command::Norms(a) => cmd_norms(a),
        Command::Apply(a) => cmd_apply(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn ok(body: String) -> Outcome {
    Outcome {
        body,
        summary: None,
        status: Status::Ok,
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

fn read_json(path: &Path) -> Result<Value> {
    let text = if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin())?
    } else {
        std::fs::read_to_string(path)?
    };
    Ok(serde_json::from_str(&text)?)
}

fn load(source: &GroupSource, seed: u64) -> Result<(GroupSpec, FiniteGroup, UnitaryDual)> {
    let spec = source.spec();
    let g = spec.build()?;
    let dual = compute_dual(&g, seed)?;
    Ok((spec, g, dual))
}

/// Left-aligned columns separated by two spaces.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let text: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", text.join("  ").trim_end());
    };
    line(header.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}

fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn tabular(format: Format, header: &[&str], rows: &[Vec<String>]) -> String {
    match format {
        Format::Csv => csv(header, rows),
        _ => table(header, rows),
    }
}

fn cmd_dual(a: &DualArgs) -> Result<Outcome> {
    let (_, _, dual) = load(&a.source, a.seed)?;
    if a.output.format == Format::Json {
        return Ok(ok(pretty(&dual.to_json())));
    }
    let rows: Vec<Vec<String>> = dual
        .irreps()
        .iter()
        .enumerate()
        .flat_map(|(p, irrep)| {
            let conj = dual.irreps()[dual.conj_map()[p]].label.clone();
            irrep.character().into_iter().enumerate().map(move |(s, z)| {
                vec![
                    irrep.label.clone(),
                    irrep.dim.to_string(),
                    conj.clone(),
                    s.to_string(),
                    fmt_num(denoise(z.re)),
                    fmt_num(denoise(z.im)),
                ]
            })
        })
        .collect();
    Ok(ok(tabular(
        a.output.format,
        &["irrep", "dim", "conj", "element", "chi_re", "chi_im"],
        &rows,
    )))
}

/// Drops rounding noise from character values, which are bounded by the
/// dimension.
fn denoise(x: f64) -> f64 {
    if x.abs() < 1e-14 {
        0.0
    } else {
        x
    }
}

/// Function input is an array of complex numbers; operator input is an
/// array of matrices.
fn is_operator(v: &Value) -> bool {
    v.as_array()
        .and_then(|items| items.first())
        .and_then(Value::as_array)
        .and_then(|m| m.first())
        .is_some_and(Value::is_array)
}

fn cmd_norms(a: &NormsArgs) -> Result<Outcome> {
    let (spec, g, dual) = load(&a.source, a.seed)?;
    let input = read_json(&a.input)?;
    let cfg = SolverConfig {
        seed: a.seed,
        tol_rel: a.tol.unwrap_or(SolverConfig::default().tol_rel),
        ..SolverConfig::default()
    };
    let mut norms: Vec<(&str, f64)> = Vec::new();
    let mut reports: Vec<(&str, SolverReport)> = Vec::new();
    let kind = if is_operator(&input) {
        let t = BlockOperator::from_json(&dual, &input)?;
        norms.push(("norm_vn", norm_vn(&t)));
        norms.push(("norm_adelta_dual", norm_adelta_dual(&t)));
        norms.push(("gamma_adjoint", gamma_adjoint(&dual, &t)?.norm()));
        norms.push(("gamma_check_adjoint", gamma_check_adjoint(&dual, &t)?.norm()));
        if a.solve {
            reports.push(("cb_gamma_adjoint", cb_norm_gamma_adjoint(&dual, &t, &cfg)?));
            reports.push(("cb_gamma_check_adjoint", cb_norm_gamma_check_adjoint(&dual, &t, &cfg)?));
        }
        "operator"
    } else {
        let u = ScalarFunction::from_json(&input)?;
        if u.len() != g.order() {
            return Err(Error::DimensionMismatch(format!(
                "function has {} values, group has order {}",
                u.len(),
                g.order()
            )));
        }
        norms.push(("norm_a", norm_a(&dual, &u)));
        norms.push(("norm_adelta", norm_adelta(&dual, &u)));
        norms.push(("norm_agamma", norm_agamma(&dual, &u)));
        if a.solve {
            let prod = UnitaryDual::product(&dual, &dual);
            reports.push(("quotient_adelta", quotient_norm_projective(&g, &prod, &u, &cfg)?));
        }
        "function"
    };
    let status = if reports.iter().all(|(_, r)| r.converged) {
        Status::Ok
    } else {
        Status::NotConverged
    };
    let body = match a.output.format {
        Format::Json => {
            let norm_map: Map<String, Value> = norms.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
            let solver_map: Map<String, Value> = reports
                .iter()
                .map(|(k, r)| (k.to_string(), serde_json::to_value(r).expect("report serializes")))
                .collect();
            let mut v = json!({ "group": spec.to_string(), "kind": kind, "norms": norm_map });
            if !solver_map.is_empty() {
                v["solver"] = Value::Object(solver_map);
            }
            pretty(&round_json(v))
        }
        format => {
            let mut rows: Vec<Vec<String>> = norms
                .iter()
                .map(|(k, v)| vec![k.to_string(), fmt_num(*v), String::new(), String::new(), String::new(), String::new()])
                .collect();
            for (k, r) in &reports {
                rows.push(vec![
                    k.to_string(),
                    fmt_num(r.value),
                    fmt_num(r.lower_bracket),
                    fmt_num(r.upper_bracket),
                    r.iterations.to_string(),
                    r.converged.to_string(),
                ]);
            }
            tabular(
                format,
                &["name", "value", "lower_bracket", "upper_bracket", "iterations", "converged"],
                &rows,
            )
        }
    };
    Ok(Outcome {
        body,
        summary: None,
        status,
    })
}

fn read_function(path: &Path, g: &FiniteGroup) -> Result<ScalarFunction> {
    let u = ScalarFunction::from_json(&read_json(path)?)?;
    if u.len() != g.order() {
        return Err(Error::DimensionMismatch(format!(
            "{} has {} values, group has order {}",
            path.display(),
            u.len(),
            g.order()
        )));
    }
    Ok(u)
}

fn bi_function(inputs: &[PathBuf], g: &FiniteGroup) -> Result<BiFunction> {
    match inputs {
        [w] => BiFunction::from_json(&read_json(w)?),
        [u, v] => BiFunction::tensor(&read_function(u, g)?, &read_function(v, g)?),
        _ => Err(Error::InvalidArgument("expected one or two inputs".into())),
    }
}

fn cmd_apply(a: &ApplyArgs) -> Result<Outcome> {
    let (_, g, dual) = load(&a.source, a.seed)?;
    let function = match a.map {
        MapKind::Gamma => gamma(&g, &bi_function(&a.inputs, &g)?)?,
        MapKind::GammaCheck => gamma_check(&g, &bi_function(&a.inputs, &g)?)?,
        MapKind::Convolve => match a.inputs.as_slice() {
            [u, v] => convolve(&g, &read_function(u, &g)?, &read_function(v, &g)?)?,
            _ => return Err(Error::InvalidArgument("convolve needs two inputs".into())),
        },
        MapKind::GammaAdjoint | MapKind::GammaCheckAdjoint => {
            let [input] = a.inputs.as_slice() else {
                return Err(Error::InvalidArgument("adjoint maps take one block operator".into()));
            };
            let t = BlockOperator::from_json(&dual, &read_json(input)?)?;
            let op = if a.map == MapKind::GammaAdjoint {
                gamma_adjoint(&dual, &t)?
            } else {
                gamma_check_adjoint(&dual, &t)?
            };
            return Ok(ok(render_bi_block(&op, &dual, a.output.format)));
        }
    };
    let body = match a.output.format {
        Format::Json => pretty(&round_json(function.to_json())),
        format => {
            let rows: Vec<Vec<String>> = function
                .values
                .iter()
                .enumerate()
                .map(|(s, z)| vec![s.to_string(), fmt_num(z.re), fmt_num(z.im)])
                .collect();
            tabular(format, &["element", "re", "im"], &rows)
        }
    };
    Ok(ok(body))
}

fn render_bi_block(op: &BiBlockOperator, dual: &UnitaryDual, format: Format) -> String {
    let k = dual.len();
    match format {
        Format::Csv => op.norm_table_csv(),
        Format::Table => {
            let rows: Vec<Vec<String>> = op
                .blocks()
                .iter()
                .enumerate()
                .map(|(idx, b)| {
                    vec![
                        (idx / k).to_string(),
                        (idx % k).to_string(),
                        op.level().to_string(),
                        fmt_num(crate::linalg::spectral_norm(b)),
                    ]
                })
                .collect();
            table(&["pi_prime", "pi", "n", "norm"], &rows)
        }
        Format::Json => {
            let blocks: Vec<Value> = op
                .blocks()
                .iter()
                .enumerate()
                .map(|(idx, b)| json!({ "pi_prime": idx / k, "pi": idx % k, "matrix": matrix_to_json(b) }))
                .collect();
            pretty(&round_json(json!({ "level": op.level(), "norm": op.norm(), "blocks": blocks })))
        }
    }
}

fn cmd_verify(a: &VerifyArgs) -> Result<Outcome> {
    // Unknown ids are usage errors, reported before any group is built.
    for id in &a.check {
        verify::lookup(id)?;
    }
    let mut roster: Vec<GroupSpec> = a.group.clone();
    roster.extend(a.cayley.iter().cloned().map(GroupSpec::File));
    if roster.is_empty() {
        roster = verify::default_roster();
    }
    let cfg = RunConfig {
        seed: a.seed,
        trials: a.trials,
        tolerance: a.tol,
        max_level: a.max_level,
        solver: SolverConfig {
            seed: a.seed,
            ..SolverConfig::default()
        },
    };
    let checks = if a.all {
        verify::run_all(&roster, &cfg)?
    } else {
        a.check
            .iter()
            .map(|id| verify::run_check(&CheckSpec::new(id, roster.clone(), &cfg)?))
            .collect::<Result<Vec<_>>>()?
    };
    let report = VerifyReport::new(a.seed, checks);
    let status = if !report.pass {
        Status::CheckFailed
    } else if !report.converged {
        Status::NotConverged
    } else {
        Status::Ok
    };
    let summary = verify_table(&report);
    let body = match a.output.format {
        Format::Json => pretty(&round_json(serde_json::to_value(&report)?)),
        Format::Table => summary.clone(),
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .checks
                .iter()
                .flat_map(|c| {
                    c.groups.iter().map(move |g| {
                        vec![
                            c.check_id.clone(),
                            g.group.clone(),
                            g.order.to_string(),
                            g.trials.to_string(),
                            fmt_num(g.worst_deviation),
                            fmt_num(c.tolerance),
                            g.pass.to_string(),
                        ]
                    })
                })
                .collect();
            csv(
                &["check_id", "group", "order", "trials", "worst_deviation", "tolerance", "pass"],
                &rows,
            )
        }
    };
    Ok(Outcome {
        body,
        summary: Some(summary),
        status,
    })
}

fn verify_table(report: &VerifyReport) -> String {
    let rows: Vec<Vec<String>> = report
        .checks
        .iter()
        .map(|c| {
            vec![
                c.check_id.clone(),
                if c.pass { "PASS" } else { "FAIL" }.to_string(),
                fmt_num(c.worst_deviation),
                fmt_num(c.tolerance),
                c.groups.len().to_string(),
                c.converged.to_string(),
                format!("{:.2}", c.wall_time_s),
            ]
        })
        .collect();
    table(
        &["check_id", "result", "worst", "tolerance", "groups", "converged", "seconds"],
        &rows,
    )
}
