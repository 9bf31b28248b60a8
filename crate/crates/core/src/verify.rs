//! Seeded verification harness.
//!
//! Every registered check draws random inputs on each group of a roster,
//! compares two independent computations of the same quantity and records
//! the worst deviation. Trials on a group use their own random stream keyed
//! by the check and the group spec, so a report does not depend on the rest
//! of the roster or on scheduling.

use std::sync::OnceLock;
use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::convolution::{
    assembled_projection, bi_pairing, convolve, flip_unitary, gamma, gamma_adjoint,
    gamma_check, gamma_check_adjoint, swap_matrix, tracial_expectation, BiFunction, BlockOperatorMatrix,
};
use crate::error::{Error, Result};
use crate::fourier::{
    check_function, check_operator, dual_pairing, fourier_transform, norm_a, norm_adelta, norm_adelta_dual,
    norm_vn, BlockOperator, ScalarFunction,
};
use crate::group::{FiniteGroup, GroupSpec};
use crate::linalg::{hermitian_eig, identity, kron, max_abs_diff, random_complex, spectral_norm, unitarity_defect, CMatrix};
use crate::normcalc::{
    amplified_lower_bound, cb_norm_gamma_adjoint, cb_norm_gamma_check_adjoint, haagerup_solve,
    level_n_dual_norm_check, quotient_norm_projective, ElementaryMapCoefficients, SolverConfig, SolverReport,
};
use crate::rep::{compute_dual, representation_defect, verify_schur, UnitaryDual};

pub const SCHEMA: &str = "v1";

/// Largest group order on which solver-backed checks run.
pub const SOLVER_MAX_ORDER: usize = 12;

/// Direction in which a check's statistic is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Pass when the largest value is at most the tolerance.
    AtMost,
    /// Pass when the smallest value is at least the tolerance.
    AtLeast,
}

#[derive(Debug, Clone, Copy)]
pub struct CheckInfo {
    pub id: &'static str,
    pub description: &'static str,
    pub tolerance: f64,
    pub trials: usize,
    pub bound: Bound,
    pub solver_backed: bool,
}

const fn check(id: &'static str, description: &'static str, tolerance: f64, trials: usize) -> CheckInfo {
    CheckInfo {
        id,
        description,
        tolerance,
        trials,
        bound: Bound::AtMost,
        solver_backed: false,
    }
}

const fn solver(id: &'static str, description: &'static str, trials: usize) -> CheckInfo {
    CheckInfo {
        solver_backed: true,
        ..check(id, description, 1e-4, trials)
    }
}

static REGISTRY: [CheckInfo; 19] = [
    check("rep_schur", "sum of d^2 equals |G|, Schur orthogonality, homomorphism defect, reproducible dual", 1e-9, 1),
    check("check_pairing", "<u, T check> equals <u check, T>", 1e-10, 100),
    check("tracial_expectation", "averaging pi(s)* A pi(s) gives (Tr A / d) I", 1e-10, 100),
    check("gamma_identities", "gamma(u x v) = u * v check and gamma check(u x v) = u * v", 1e-12, 100),
    check("convolution_transform", "transform of u * v equals v hat times u hat", 1e-10, 100),
    check("adjoint_pairings", "<gamma w, T> = <w, gamma* T> for both maps", 1e-10, 100),
    check("thm_adelta_levels", "norm of the amplified gamma adjoint against the closed form at levels 1..N", 1e-8, 100),
    solver("thm_adelta", "quotient norm through A(GxG) against the A_Delta closed form", 20),
    solver("thm_gamma_haag", "cb norm of the gamma adjoint against the dual A_Delta norm", 20),
    solver("thm_cgamma_haag", "cb norm of the gamma check adjoint against the operator norm", 20),
    solver("solver_gate", "transpose map on d x d has cb norm d, bracketed by the amplified lower bound", 1),
    check("prop_agamma", "norm of the gamma check adjoint equals max ||T_pi|| / d_pi", 1e-8, 100),
    check("flip_unitary", "flip operators are unitary and equal the swap", 1e-9, 1),
    check("cor_check_isometry", "u -> u check preserves the A_Delta norm", 1e-10, 100),
    check("cor_row_tensor", "A_Delta norm on GxG is multiplicative on elementary tensors", 1e-9, 100),
    check("cor_operator_algebra", "A and A_Delta norms are submultiplicative under convolution", 1e-12, 100),
    CheckInfo {
        bound: Bound::AtLeast,
        ..check(
            "prop_semisimple",
            "smallest normalized singular value of the point-evaluation Gram matrix on GxG",
            1e-8,
            1,
        )
    },
    check("projection_p", "assembled P is an orthogonal projection supported on conjugate pairs", 1e-9, 1),
    check("dual_duality", "sup of |<u, T>| over the dual unit ball is attained at the closed-form extremizer", 1e-10, 100),
];

pub fn registry() -> &'static [CheckInfo] {
    &REGISTRY
}

pub fn lookup(id: &str) -> Result<&'static CheckInfo> {
    REGISTRY
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::UnknownCheck(id.to_string()))
}

/// Groups of order at most 12 plus `s:4` for the closed-form checks.
pub fn default_roster() -> Vec<GroupSpec> {
    [
        "cyclic:1",
        "cyclic:2",
        "cyclic:4",
        "cyclic:6",
        "klein4",
        "s:3",
        "dihedral:4",
        "q8",
        "product:cyclic:2,s:3",
        "s:4",
    ]
    .iter()
    .map(|s| s.parse().expect("builtin spec"))
    .collect()
}

/// Shared settings for a verification run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    /// Replaces every check's default trial count.
    pub trials: Option<usize>,
    /// Replaces every check's default tolerance.
    pub tolerance: Option<f64>,
    pub max_level: usize,
    pub solver: SolverConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            trials: None,
            tolerance: None,
            max_level: 3,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckSpec {
    pub check_id: String,
    pub groups: Vec<GroupSpec>,
    pub trials: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub max_level: usize,
    pub solver: SolverConfig,
}

impl CheckSpec {
    /// A spec with the registry defaults for `check_id` and the overrides of `cfg`.
    pub fn new(check_id: &str, groups: Vec<GroupSpec>, cfg: &RunConfig) -> Result<Self> {
        let info = lookup(check_id)?;
        let spec = CheckSpec {
            check_id: info.id.to_string(),
            groups,
            trials: cfg.trials.unwrap_or(info.trials),
            tolerance: cfg.tolerance.unwrap_or(info.tolerance),
            seed: cfg.seed,
            max_level: cfg.max_level,
            solver: cfg.solver,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        lookup(&self.check_id)?;
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        if self.max_level == 0 {
            return Err(Error::InvalidArgument("max level must be at least 1".into()));
        }
        self.solver.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub deviation: f64,
}

/// Certificates of the solver runs behind one group result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverSummary {
    pub runs: usize,
    /// Runs whose own stopping test failed.
    pub unconverged: usize,
    pub worst_relative_gap: f64,
    pub max_iterations: usize,
    /// The report with the widest bracket.
    pub worst: SolverReport,
}

impl SolverSummary {
    fn from_reports(reports: &[SolverReport]) -> Option<Self> {
        let worst = *reports
            .iter()
            .max_by(|a, b| a.relative_gap().total_cmp(&b.relative_gap()))?;
        Some(SolverSummary {
            runs: reports.len(),
            unconverged: reports.iter().filter(|r| !r.converged).count(),
            worst_relative_gap: worst.relative_gap(),
            max_iterations: reports.iter().map(|r| r.iterations).max().unwrap_or(0),
            worst,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupResult {
    pub group: String,
    pub order: usize,
    pub trials: usize,
    pub worst_deviation: f64,
    pub pass: bool,
    pub failures: Vec<TrialFailure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub schema: &'static str,
    pub check_id: String,
    pub description: &'static str,
    pub seed: u64,
    pub trials: usize,
    pub tolerance: f64,
    pub bound: Bound,
    pub max_level: usize,
    pub groups: Vec<GroupResult>,
    pub worst_deviation: f64,
    pub pass: bool,
    /// False when a solver bracket is wider than the tolerance.
    pub converged: bool,
    pub wall_time_s: f64,
}

/// A whole run: one report per check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub schema: &'static str,
    pub seed: u64,
    pub pass: bool,
    pub converged: bool,
    pub checks: Vec<CheckReport>,
}

impl VerifyReport {
    pub fn new(seed: u64, checks: Vec<CheckReport>) -> Self {
        VerifyReport {
            schema: SCHEMA,
            seed,
            pass: checks.iter().all(|c| c.pass),
            converged: checks.iter().all(|c| c.converged),
            checks,
        }
    }
}

/// A group with its dual, built once and shared by all checks.
pub struct GroupContext {
    label: String,
    group: FiniteGroup,
    dual: UnitaryDual,
    product: OnceLock<UnitaryDual>,
}

impl GroupContext {
    pub fn new(spec: &GroupSpec, seed: u64) -> Result<Self> {
        let group = spec.build()?;
        let dual = compute_dual(&group, seed)?;
        Ok(GroupContext {
            label: spec.to_string(),
            group,
            dual,
            product: OnceLock::new(),
        })
    }

    fn product(&self) -> &UnitaryDual {
        self.product.get_or_init(|| UnitaryDual::product(&self.dual, &self.dual))
    }
}

pub fn run_check(spec: &CheckSpec) -> Result<CheckReport> {
    spec.validate()?;
    let contexts = build_contexts(&spec.groups, spec.seed)?;
    let info = lookup(&spec.check_id)?;
    Ok(run_on(info, spec, &contexts.iter().collect::<Vec<_>>()))
}

/// Runs every registered check on `roster`. All groups and duals are built
/// before any check starts, so an invalid group stops the run early.
pub fn run_all(roster: &[GroupSpec], cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let contexts = build_contexts(roster, cfg.seed)?;
    let specs = REGISTRY
        .iter()
        .map(|info| CheckSpec::new(info.id, roster.to_vec(), cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(REGISTRY
        .par_iter()
        .zip(&specs)
        .map(|(info, spec)| run_on(info, spec, &contexts.iter().collect::<Vec<_>>()))
        .collect())
}

fn build_contexts(groups: &[GroupSpec], seed: u64) -> Result<Vec<GroupContext>> {
    groups.par_iter().map(|g| GroupContext::new(g, seed)).collect()
}

fn run_on(info: &CheckInfo, spec: &CheckSpec, contexts: &[&GroupContext]) -> CheckReport {
    let start = Instant::now();
    let groups: Vec<GroupResult> = if info.id == "solver_gate" {
        (2..=4).into_par_iter().map(|d| solver_gate(spec, d)).collect()
    } else {
        contexts
            .par_iter()
            .filter(|c| !info.solver_backed || c.group.order() <= SOLVER_MAX_ORDER)
            .map(|c| run_group(info, spec, c))
            .collect()
    };
    let worst_deviation = match info.bound {
        Bound::AtMost => groups.iter().map(|g| g.worst_deviation).fold(0.0, f64::max),
        Bound::AtLeast => groups.iter().map(|g| g.worst_deviation).fold(f64::INFINITY, f64::min),
    };
    let converged = groups
        .iter()
        .filter_map(|g| g.solver)
        .all(|s| s.worst_relative_gap <= spec.tolerance);
    CheckReport {
        schema: SCHEMA,
        check_id: spec.check_id.clone(),
        description: info.description,
        seed: spec.seed,
        trials: spec.trials,
        tolerance: spec.tolerance,
        bound: info.bound,
        max_level: spec.max_level,
        pass: groups.iter().all(|g| g.pass),
        groups,
        worst_deviation,
        converged,
        wall_time_s: start.elapsed().as_secs_f64(),
    }
}

/// Independent random stream per (check, group).
fn stream(seed: u64, check_id: &str, group: &str) -> ChaCha8Rng {
    // FNV-1a keeps the stream id stable across toolchains.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in check_id.bytes().chain([0]).chain(group.bytes()) {
        h = (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(h);
    rng
}

fn relative(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn run_group(info: &CheckInfo, spec: &CheckSpec, ctx: &GroupContext) -> GroupResult {
    let mut rng = stream(spec.seed, info.id, &ctx.label);
    let mut reports = Vec::new();
    let deviations: Vec<f64> = match info.id {
        "rep_schur" => vec![rep_schur(ctx, spec.seed)],
        "flip_unitary" => ctx
            .dual
            .irreps()
            .iter()
            .map(|p| {
                let u = flip_unitary(p);
                unitarity_defect(&u).max(max_abs_diff(&u, &swap_matrix(p.dim)))
            })
            .collect(),
        "prop_semisimple" => vec![semisimplicity(ctx)],
        "projection_p" => vec![projection_defect(&ctx.dual)],
        _ => (0..spec.trials)
            .map(|_| trial(info.id, spec, ctx, &mut rng, &mut reports))
            .collect(),
    };
    let passes = |d: f64| match info.bound {
        Bound::AtMost => d <= spec.tolerance,
        Bound::AtLeast => d >= spec.tolerance,
    };
    let worst_deviation = match info.bound {
        Bound::AtMost => deviations.iter().copied().fold(0.0, f64::max),
        Bound::AtLeast => deviations.iter().copied().fold(f64::INFINITY, f64::min),
    };
    let failures: Vec<TrialFailure> = deviations
        .iter()
        .enumerate()
        .filter(|(_, &d)| !passes(d))
        .map(|(trial, &deviation)| TrialFailure { trial, deviation })
        .collect();
    GroupResult {
        group: ctx.label.clone(),
        order: ctx.group.order(),
        trials: deviations.len(),
        worst_deviation,
        pass: failures.is_empty(),
        failures,
        solver: SolverSummary::from_reports(&reports),
    }
}

/// One random trial. Solver reports are pushed to `reports`; an error
/// counts as an infinite deviation.
fn trial(id: &str, spec: &CheckSpec, ctx: &GroupContext, rng: &mut ChaCha8Rng, reports: &mut Vec<SolverReport>) -> f64 {
    let (g, dual) = (&ctx.group, &ctx.dual);
    let n = g.order();
    let outcome: Result<f64> = (|| match id {
        "check_pairing" => {
            let u = ScalarFunction::random(n, rng);
            let t = BlockOperator::random(dual, rng);
            let lhs = dual_pairing(dual, &u, &check_operator(dual, &t)?)?;
            let rhs = dual_pairing(dual, &inverted(g, &u), &t)?;
            Ok((lhs - rhs).norm())
        }
        "tracial_expectation" => Ok(dual
            .irreps()
            .iter()
            .map(|p| {
                let a = random_complex(p.dim, p.dim, rng);
                let expect = identity(p.dim) * (a.trace() / p.dim as f64);
                tracial_expectation(p, &a).map(|e| spectral_norm(&(e - expect)))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max)),
        "gamma_identities" => {
            let u = ScalarFunction::random(n, rng);
            let v = ScalarFunction::random(n, rng);
            let w = BiFunction::tensor(&u, &v)?;
            let a = gamma(g, &w)?.max_abs_diff(&convolve(g, &u, &inverted(g, &v))?);
            let b = gamma_check(g, &w)?.max_abs_diff(&convolve(g, &u, &v)?);
            Ok(a.max(b))
        }
        "convolution_transform" => {
            let u = ScalarFunction::random(n, rng);
            let v = ScalarFunction::random(n, rng);
            let lhs = fourier_transform(dual, &convolve(g, &u, &v)?)?;
            let rhs = fourier_transform(dual, &v)?.mul(&fourier_transform(dual, &u)?);
            Ok(lhs.max_abs_diff(&rhs))
        }
        "adjoint_pairings" => {
            let w = BiFunction::random(n, rng);
            let t = BlockOperator::random(dual, rng);
            let prod = ctx.product();
            let a = dual_pairing(dual, &gamma(g, &w)?, &t)? - bi_pairing(prod, &w, &gamma_adjoint(dual, &t)?)?;
            let b = dual_pairing(dual, &gamma_check(g, &w)?, &t)?
                - bi_pairing(prod, &w, &gamma_check_adjoint(dual, &t)?)?;
            Ok(a.norm().max(b.norm()))
        }
        "thm_adelta_levels" => {
            let t = BlockOperator::random(dual, rng);
            let mut worst = relative(gamma_adjoint(dual, &t)?.norm(), dual_norm_oracle(dual, &t));
            for level in 2..=spec.max_level {
                let m = BlockOperatorMatrix::random(level, dual, rng)?;
                let (materialized, closed) = level_n_dual_norm_check(dual, &m)?;
                worst = worst.max(relative(materialized, closed));
            }
            Ok(worst)
        }
        "thm_adelta" => {
            let u = ScalarFunction::random(n, rng);
            let report = quotient_norm_projective(g, ctx.product(), &u, &spec.solver)?;
            reports.push(report);
            Ok(relative(report.value, norm_adelta(dual, &u)))
        }
        "thm_gamma_haag" => {
            let t = BlockOperator::random(dual, rng);
            let report = cb_norm_gamma_adjoint(dual, &t, &spec.solver)?;
            reports.push(report);
            Ok(relative(report.value, dual_norm_oracle(dual, &t)))
        }
        "thm_cgamma_haag" => {
            let t = BlockOperator::random(dual, rng);
            let report = cb_norm_gamma_check_adjoint(dual, &t, &spec.solver)?;
            reports.push(report);
            Ok(relative(report.value, norm_vn(&t)))
        }
        "prop_agamma" => {
            let t = BlockOperator::random(dual, rng);
            let closed = t
                .blocks
                .iter()
                .map(|b| spectral_norm(b) / b.nrows() as f64)
                .fold(0.0, f64::max);
            Ok(relative(gamma_check_adjoint(dual, &t)?.norm(), closed))
        }
        "cor_check_isometry" => {
            let u = ScalarFunction::random(n, rng);
            Ok(relative(norm_adelta(dual, &check_function(dual, &u)?), norm_adelta(dual, &u)))
        }
        "cor_row_tensor" => {
            let u = ScalarFunction::random(n, rng);
            let v = ScalarFunction::random(n, rng);
            let w = BiFunction::tensor(&u, &v)?.as_product_function();
            Ok(relative(
                norm_adelta(ctx.product(), &w),
                norm_adelta(dual, &u) * norm_adelta(dual, &v),
            ))
        }
        "cor_operator_algebra" => {
            let u = ScalarFunction::random(n, rng);
            let v = ScalarFunction::random(n, rng);
            let uv = convolve(g, &u, &v)?;
            let excess = |f: fn(&UnitaryDual, &ScalarFunction) -> f64| {
                let bound = f(dual, &u) * f(dual, &v);
                ((f(dual, &uv) - bound) / bound).max(0.0)
            };
            Ok(excess(norm_a).max(excess(norm_adelta)))
        }
        "dual_duality" => {
            let u = ScalarFunction::random(n, rng);
            let uhat = fourier_transform(dual, &u)?;
            // T_π ∝ d_π^{1/2} û(π)* / ‖û(π)‖₂, scaled into the dual unit ball.
            let blocks: Vec<CMatrix> = uhat
                .blocks
                .iter()
                .map(|b| {
                    let hs = b.norm();
                    if hs == 0.0 {
                        b.clone()
                    } else {
                        b.adjoint() * Complex64::new((b.nrows() as f64).sqrt() / hs, 0.0)
                    }
                })
                .collect();
            let t = BlockOperator::new(dual, blocks)?;
            let value = dual_pairing(dual, &u, &t)?.norm() / norm_adelta_dual(&t);
            Ok(relative(value, norm_adelta(dual, &u)))
        }
        other => Err(Error::UnknownCheck(other.to_string())),
    })();
    outcome.unwrap_or(f64::INFINITY)
}

fn inverted(g: &FiniteGroup, u: &ScalarFunction) -> ScalarFunction {
    ScalarFunction::new((0..g.order()).map(|s| u.values[g.inv(s)]).collect())
}

/// `max_π d_π^{-1/2} ‖T_π‖₂` straight from the blocks.
fn dual_norm_oracle(dual: &UnitaryDual, t: &BlockOperator) -> f64 {
    dual.irreps()
        .iter()
        .zip(&t.blocks)
        .map(|(p, b)| b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / (p.dim as f64).sqrt())
        .fold(0.0, f64::max)
}

fn rep_schur(ctx: &GroupContext, seed: u64) -> f64 {
    let dual = &ctx.dual;
    let sum: usize = dual.dims().iter().map(|d| d * d).sum();
    if sum != ctx.group.order() {
        return f64::INFINITY;
    }
    let again = match compute_dual(&ctx.group, seed) {
        Ok(d) => d,
        Err(_) => return f64::INFINITY,
    };
    if again.to_json() != dual.to_json() {
        return f64::INFINITY;
    }
    verify_schur(dual).max(representation_defect(&ctx.group, dual))
}

/// Smallest singular value of the Gram matrix of `{λ(s)⊗λ(t)}` in the
/// Plancherel inner product, relative to the largest diagonal entry.
fn semisimplicity(ctx: &GroupContext) -> f64 {
    let dual = &ctx.dual;
    let n = ctx.group.order();
    let len: usize = dual.dims().iter().map(|d| d * d).sum::<usize>().pow(2);
    let mut vectors = CMatrix::zeros(len, n * n);
    for s in 0..n {
        for t in 0..n {
            let mut row = 0;
            for a in dual.irreps() {
                for b in dual.irreps() {
                    let weight = ((a.dim * b.dim) as f64).sqrt();
                    let block = kron(&a.matrices[s], &b.matrices[t]);
                    for z in block.iter() {
                        vectors[(row, s * n + t)] = z * weight;
                        row += 1;
                    }
                }
            }
        }
    }
    let gram = vectors.adjoint() * &vectors;
    let scale = (0..gram.nrows()).map(|i| gram[(i, i)].re).fold(0.0, f64::max);
    let (values, _) = hermitian_eig(&gram);
    values.first().map_or(0.0, |&v| v.max(0.0) / scale)
}

fn projection_defect(dual: &UnitaryDual) -> f64 {
    let p = assembled_projection(dual);
    let k = dual.len();
    let mut worst = 0.0f64;
    for a in 0..k {
        for b in 0..k {
            let blk = p.block(a, b);
            worst = worst
                .max(spectral_norm(&(blk * blk - blk)))
                .max(spectral_norm(&(blk - blk.adjoint())));
            if b != dual.conj_map()[a] {
                worst = worst.max(spectral_norm(blk));
            }
        }
    }
    worst
}

/// Cone solver and amplified ascent on the transpose map of `d × d` matrices.
fn solver_gate(spec: &CheckSpec, d: usize) -> GroupResult {
    let c = ElementaryMapCoefficients::transpose_map(d);
    let (deviation, reports) = match haagerup_solve(&c, &spec.solver) {
        Ok(sol) => {
            let lower = amplified_lower_bound(&c, d, Some((&sol.rho, &sol.sigma)), 2, 500, spec.seed);
            let value = sol.report.value;
            let dev = relative(value, d as f64).max(relative(lower, value));
            (dev, vec![sol.report])
        }
        Err(_) => (f64::INFINITY, Vec::new()),
    };
    let pass = deviation <= spec.tolerance;
    GroupResult {
        group: format!("transpose:{d}"),
        order: d,
        trials: 1,
        worst_deviation: deviation,
        pass,
        failures: if pass {
            Vec::new()
        } else {
            vec![TrialFailure { trial: 0, deviation }]
        },
        solver: SolverSummary::from_reports(&reports),
    }
}
