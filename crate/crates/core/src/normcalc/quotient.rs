//! Quotient norm of `Γ : A(G×G) → A(G)` by trace-norm minimization, and the
//! amplified dual-norm comparison.
//!
//! The `A(G×G)` norm is written through a unitary Fourier matrix `F` on
//! `C^{G×G}`: row `(b, i, j)` of `F` is `√(d_b/N) ρ_b(g⁻¹)_ij` with `N = |G|²`,
//! so that `‖w‖_A = Σ_b √(d_b/N) ‖(Fw)_b‖₁`. ADMM splits `z = Fx`; the
//! `x`-step is an exact projection onto `{Γx = u}` because the fibres
//! `{(s·r, r)}` of `Γ` partition `G×G`.

use num_complex::Complex64;

use super::{SolverConfig, SolverReport};
use crate::convolution::{gamma_adjoint_amplified, BlockOperatorMatrix};
use crate::error::{Error, Result};
use crate::fourier::ScalarFunction;
use crate::group::FiniteGroup;
use crate::linalg::{lambda_max, svd, spectral_norm, trace_norm, zeros, CMatrix};
use crate::rep::UnitaryDual;

/// Bracket checks happen every this many iterations.
const CHECK_EVERY: usize = 10;

struct FourierFrame {
    /// `N × N` unitary.
    f: CMatrix,
    /// `(offset, dim, weight)` of each block inside `Fx`.
    blocks: Vec<(usize, usize, f64)>,
}

impl FourierFrame {
    fn new(prod: &UnitaryDual) -> Self {
        let big_n = prod.order();
        let mut f = zeros(big_n, big_n);
        let mut blocks = Vec::with_capacity(prod.len());
        let mut row = 0;
        for irrep in prod.irreps() {
            let d = irrep.dim;
            let c = (d as f64 / big_n as f64).sqrt();
            for g in 0..big_n {
                // ρ(g⁻¹) = ρ(g)*
                let m = &irrep.matrices[g];
                for i in 0..d {
                    for j in 0..d {
                        f[(row + i * d + j, g)] = m[(j, i)].conj() * c;
                    }
                }
            }
            blocks.push((row, d, c));
            row += d * d;
        }
        FourierFrame { f, blocks }
    }

    fn block(&self, v: &CMatrix, k: usize) -> CMatrix {
        let (o, d, _) = self.blocks[k];
        CMatrix::from_fn(d, d, |i, j| v[(o + i * d + j, 0)])
    }

    /// `Σ_b c_b ‖(Fx)_b‖₁`.
    fn norm(&self, fx: &CMatrix) -> f64 {
        (0..self.blocks.len())
            .map(|k| self.blocks[k].2 * trace_norm(&self.block(fx, k)))
            .sum()
    }

    /// Dual norm `max_b ‖(Fy)_b‖ / c_b`.
    fn dual_norm(&self, fy: &CMatrix) -> f64 {
        (0..self.blocks.len())
            .map(|k| spectral_norm(&self.block(fy, k)) / self.blocks[k].2)
            .fold(0.0, f64::max)
    }

    /// Blockwise singular value soft-thresholding with thresholds `c_b · tau`.
    fn shrink(&self, v: &CMatrix, tau: f64) -> CMatrix {
        let mut out = zeros(v.nrows(), 1);
        for (k, &(o, d, c)) in self.blocks.iter().enumerate() {
            let m = self.block(v, k);
            let mut f = svd(&m);
            f.s.iter_mut().for_each(|x| *x = (*x - c * tau).max(0.0));
            let shrunk = f.recompose();
            for i in 0..d {
                for j in 0..d {
                    out[(o + i * d + j, 0)] = shrunk[(i, j)];
                }
            }
        }
        out
    }
}

/// Moves `x` onto `{Γx = u}` along the fibres `{(s·r, r)}`.
fn project_fibres(g: &FiniteGroup, x: &mut CMatrix, u: &[Complex64]) {
    let n = g.order();
    for s in 0..n {
        let mean = (0..n).map(|r| x[(g.mul(s, r) * n + r, 0)]).sum::<Complex64>() / n as f64;
        let shift = u[s] - mean;
        for r in 0..n {
            x[(g.mul(s, r) * n + r, 0)] += shift;
        }
    }
}

/// `Γ` on a flat `G×G` vector.
fn gamma_flat(g: &FiniteGroup, x: &CMatrix) -> Vec<Complex64> {
    let n = g.order();
    (0..n)
        .map(|s| (0..n).map(|r| x[(g.mul(s, r) * n + r, 0)]).sum::<Complex64>() / n as f64)
        .collect()
}

/// Adjoint of `Γ` for the standard inner products: `(a, b) ↦ λ(a b⁻¹) / n`.
fn gamma_transpose_flat(g: &FiniteGroup, lambda: &[Complex64]) -> CMatrix {
    let n = g.order();
    CMatrix::from_fn(n * n, 1, |k, _| lambda[g.mul(k / n, g.inv(k % n))] / n as f64)
}

/// `inf { ‖w‖_{A(G×G)} : Γw = u }` by ADMM, bracketed below by the dual
/// certificate recovered from the scaled multiplier.
///
/// `prod` must be the dual of `G × G` built by [`UnitaryDual::product`].
pub fn quotient_norm_projective(
    g: &FiniteGroup,
    prod: &UnitaryDual,
    u: &ScalarFunction,
    cfg: &SolverConfig,
) -> Result<SolverReport> {
    cfg.validate()?;
    let n = g.order();
    if prod.order() != n * n {
        return Err(Error::DimensionMismatch("product dual does not match G×G".into()));
    }
    if u.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "function has {} values, group has order {n}",
            u.len()
        )));
    }
    let scale = u.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if scale == 0.0 {
        return Ok(SolverReport::exact(0.0));
    }
    let target: Vec<Complex64> = u.values.iter().map(|z| z / scale).collect();
    let frame = FourierFrame::new(prod);
    let f = &frame.f;
    let fh = f.adjoint();

    let mut rho = cfg.admm_rho;
    let mut x = zeros(n * n, 1);
    project_fibres(g, &mut x, &target);
    let mut z = f * &x;
    let mut y = zeros(n * n, 1);
    let mut best_upper = frame.norm(&z);
    let mut best_lower = 0.0f64;
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    for k in 1..=cfg.max_iter {
        iterations = k;
        let mut xn = &fh * (&z - &y);
        project_fibres(g, &mut xn, &target);
        x = xn;
        let fx = f * &x;
        let z_prev = z.clone();
        z = frame.shrink(&(&fx + &y), 1.0 / rho);
        let r_primal = &fx - &z;
        y += &r_primal;
        let primal = r_primal.norm();
        let dual = rho * (&z - &z_prev).norm();
        residual = primal.max(dual);

        if k % CHECK_EVERY == 0 || k == cfg.max_iter {
            best_upper = best_upper.min(frame.norm(&fx));
            // Multiplier of the affine constraint, read off from the scaled dual.
            let ry = (&fh * &y).scale(rho);
            let lambda: Vec<Complex64> = gamma_flat(g, &ry).iter().map(|z| z * n as f64).collect();
            let denom = frame.dual_norm(&(f * gamma_transpose_flat(g, &lambda)));
            if denom > 0.0 {
                let pairing: Complex64 = target
                    .iter()
                    .zip(&lambda)
                    .map(|(a, b)| a * b.conj())
                    .sum();
                best_lower = best_lower.max(pairing.norm() / denom);
            }
            if best_upper - best_lower <= cfg.tol_rel * best_upper {
                converged = true;
                break;
            }
            // Residual balancing.
            if primal > 10.0 * dual {
                rho *= 2.0;
                y.unscale_mut(2.0);
            } else if dual > 10.0 * primal {
                rho /= 2.0;
                y.scale_mut(2.0);
            }
        }
    }
    Ok(SolverReport {
        value: best_upper,
        lower_bracket: best_lower.min(best_upper),
        upper_bracket: best_upper,
        iterations,
        residual,
        converged,
    }
    .scaled(scale))
}

/// Spectral norm of the materialized `Γ^{*(n)}[T_ij]` and the closed form
/// `max_π d_π^{-1/2} ‖[Σ_k Tr(T_{ki,π̄}* T_{kj,π̄})]_{ij}‖^{1/2}`.
pub fn level_n_dual_norm_check(dual: &UnitaryDual, t: &BlockOperatorMatrix) -> Result<(f64, f64)> {
    let materialized = gamma_adjoint_amplified(dual, t)?.norm();
    let n = t.level();
    let mut closed = 0.0f64;
    for (p, irrep) in dual.irreps().iter().enumerate() {
        let c = dual.conj_map()[p];
        let gram = CMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| (t.get(k, i).blocks[c].adjoint() * &t.get(k, j).blocks[c]).trace())
                .sum::<Complex64>()
        });
        let value = lambda_max(&gram).max(0.0).sqrt() / (irrep.dim as f64).sqrt();
        closed = closed.max(value);
    }
    Ok((materialized, closed))
}
