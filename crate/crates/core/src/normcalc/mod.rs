//! Completely bounded norms of elementary operators and quotient norms.
//!
//! An elementary operator `Φ(A) = Σ_k V_k A W_k` is described by its
//! coefficient pairs. Its cb norm equals
//! `min_{P ≻ 0} ‖Σ P_jk V_j V_k*‖^{1/2} ‖Σ (P⁻¹)_jk W_j* W_k‖^{1/2}`
//! once the coefficients are reduced to linearly independent families.

mod haagerup;
mod quotient;

pub use haagerup::{
    amplified_lower_bound, cb_norm_gamma_adjoint, cb_norm_gamma_check_adjoint,
    gamma_adjoint_coefficients, gamma_check_adjoint_coefficients, haagerup_norm, haagerup_solve,
    HaagerupSolution,
};
pub use quotient::{level_n_dual_norm_check, quotient_norm_projective};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{identity, kron, lambda_max, matrix_unit, svd, zeros, CMatrix};

pub use crate::linalg::{hs_norm, spectral_norm, trace_norm};

/// Relative threshold below which a singular value counts as zero when
/// reducing coefficient families.
const REDUCTION_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryMapCoefficients {
    dim: usize,
    pairs: Vec<(CMatrix, CMatrix)>,
}

impl ElementaryMapCoefficients {
    pub fn new(pairs: Vec<(CMatrix, CMatrix)>) -> Result<Self> {
        let dim = pairs
            .first()
            .ok_or_else(|| Error::InvalidArgument("coefficient list is empty".into()))?
            .0
            .nrows();
        if pairs
            .iter()
            .any(|(v, w)| v.shape() != (dim, dim) || w.shape() != (dim, dim))
        {
            return Err(Error::DimensionMismatch(format!(
                "all coefficients must be {dim}×{dim}"
            )));
        }
        Ok(ElementaryMapCoefficients { dim, pairs })
    }

    /// Coefficients `{(E_ij, E_ij)}` of the transpose map on `d × d` matrices.
    pub fn transpose_map(d: usize) -> Self {
        let pairs = (0..d * d)
            .map(|k| {
                let e = matrix_unit(d, k / d, k % d);
                (e.clone(), e)
            })
            .collect();
        ElementaryMapCoefficients { dim: d, pairs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pairs(&self) -> &[(CMatrix, CMatrix)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn apply(&self, a: &CMatrix) -> CMatrix {
        let mut out = zeros(self.dim, self.dim);
        for (v, w) in &self.pairs {
            out += v * a * w;
        }
        out
    }

    /// `Φ^{(m)}(X) = Σ_k (I_m ⊗ V_k) X (I_m ⊗ W_k)` for an `mD × mD` matrix `X`.
    pub fn apply_amplified(&self, x: &CMatrix, m: usize) -> CMatrix {
        let id = identity(m);
        let mut out = zeros(m * self.dim, m * self.dim);
        for (v, w) in &self.pairs {
            out += kron(&id, v) * x * kron(&id, w);
        }
        out
    }

    /// `‖Σ V_k V_k*‖^{1/2} ‖Σ W_k* W_k‖^{1/2}`, the bound from the given
    /// representation with `P = I`.
    pub fn naive_upper_bound(&self) -> f64 {
        let mut vv = zeros(self.dim, self.dim);
        let mut ww = zeros(self.dim, self.dim);
        for (v, w) in &self.pairs {
            vv += v * v.adjoint();
            ww += w.adjoint() * w;
        }
        (lambda_max(&vv).max(0.0) * lambda_max(&ww).max(0.0)).sqrt()
    }

    /// An equivalent representation of the same map in which both the `V`s
    /// and the `W`s are linearly independent. May return no pairs when the
    /// map is zero.
    pub fn reduce(&self) -> ElementaryMapCoefficients {
        // Re-express the W side in an orthogonal basis, then the V side.
        let (vs, ws): (Vec<_>, Vec<_>) = self.pairs.iter().cloned().unzip();
        let (ws, mix) = independent_basis(&ws, self.dim);
        let vs: Vec<CMatrix> = mix.iter().map(|row| combine(&vs, row, self.dim)).collect();
        let (vs, mix) = independent_basis(&vs, self.dim);
        let ws: Vec<CMatrix> = mix.iter().map(|row| combine(&ws, row, self.dim)).collect();
        ElementaryMapCoefficients {
            dim: self.dim,
            pairs: vs.into_iter().zip(ws).collect(),
        }
    }
}

fn combine(mats: &[CMatrix], coeffs: &[num_complex::Complex64], dim: usize) -> CMatrix {
    let mut out = zeros(dim, dim);
    for (m, &c) in mats.iter().zip(coeffs) {
        out += m * c;
    }
    out
}

/// Writes `mats[k] = Σ_j basis[j] · mix[j][k]` with linearly independent
/// `basis`; returns `(basis, mix)` with `mix` as rows indexed by `j`.
fn independent_basis(mats: &[CMatrix], dim: usize) -> (Vec<CMatrix>, Vec<Vec<num_complex::Complex64>>) {
    let r = mats.len();
    let stacked = CMatrix::from_fn(dim * dim, r, |i, k| mats[k][(i / dim, i % dim)]);
    let f = svd(&stacked);
    let top = f.s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return (Vec::new(), Vec::new());
    }
    let mut basis = Vec::new();
    let mut mix = Vec::new();
    for (j, &s) in f.s.iter().enumerate() {
        if s <= REDUCTION_THRESHOLD * top {
            continue;
        }
        basis.push(CMatrix::from_fn(dim, dim, |a, b| f.u[(a * dim + b, j)] * s));
        mix.push((0..r).map(|k| f.v[(k, j)].conj()).collect());
    }
    (basis, mix)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iter: usize,
    pub tol_rel: f64,
    pub seed: u64,
    pub admm_rho: f64,
    /// Step shrink factor for the line search of the cone solver.
    pub cone_damping: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iter: 20000,
            tol_rel: 1e-6,
            seed: 0,
            admm_rho: 1.0,
            cone_damping: 0.5,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tol_rel.is_nan() || self.tol_rel <= 0.0 {
            return Err(Error::InvalidArgument("tol_rel must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        if self.admm_rho.is_nan() || self.admm_rho <= 0.0 {
            return Err(Error::InvalidArgument("admm_rho must be positive".into()));
        }
        if !(self.cone_damping > 0.0 && self.cone_damping < 1.0) {
            return Err(Error::InvalidArgument("cone_damping must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Outcome of a bracketing solver. `value` is the best upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub value: f64,
    pub lower_bracket: f64,
    pub upper_bracket: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

impl SolverReport {
    pub fn exact(value: f64) -> Self {
        SolverReport {
            value,
            lower_bracket: value,
            upper_bracket: value,
            iterations: 0,
            residual: 0.0,
            converged: true,
        }
    }

    /// Relative width of the bracket.
    pub fn relative_gap(&self) -> f64 {
        if self.upper_bracket == 0.0 {
            0.0
        } else {
            (self.upper_bracket - self.lower_bracket) / self.upper_bracket
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        SolverReport {
            value: self.value * factor,
            lower_bracket: self.lower_bracket * factor,
            upper_bracket: self.upper_bracket * factor,
            ..self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, random_complex};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn transpose_coefficients_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = random_complex(3, 3, &mut rng);
        let phi = ElementaryMapCoefficients::transpose_map(3);
        assert!(max_abs_diff(&phi.apply(&a), &a.transpose()) < 1e-15);
    }

    #[test]
    fn reduction_preserves_the_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = random_complex(3, 3, &mut rng);
        let w = random_complex(3, 3, &mut rng);
        let w2 = random_complex(3, 3, &mut rng);
        // (V, W), (2V, W), (V, W2): rank 2 on both sides after reduction.
        let c = ElementaryMapCoefficients::new(vec![
            (v.clone(), w.clone()),
            (v.scale(2.0), w.clone()),
            (v.clone(), w2),
        ])
        .unwrap();
        let r = c.reduce();
        assert!(r.len() <= 2);
        let a = random_complex(3, 3, &mut rng);
        assert!(max_abs_diff(&c.apply(&a), &r.apply(&a)) < 1e-12);
    }

    #[test]
    fn zero_map_reduces_to_nothing() {
        let c = ElementaryMapCoefficients::new(vec![(zeros(2, 2), identity(2))]).unwrap();
        assert!(c.reduce().is_empty());
    }

    #[test]
    fn invalid_inputs() {
        assert!(ElementaryMapCoefficients::new(vec![]).is_err());
        assert!(ElementaryMapCoefficients::new(vec![(identity(2), identity(3))]).is_err());
        let bad = SolverConfig {
            tol_rel: 0.0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(SolverConfig::default().validate().is_ok());
    }

    #[test]
    fn amplification_at_level_one_is_apply() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = ElementaryMapCoefficients::new(vec![
            (random_complex(2, 2, &mut rng), random_complex(2, 2, &mut rng)),
            (random_complex(2, 2, &mut rng), random_complex(2, 2, &mut rng)),
        ])
        .unwrap();
        let a = random_complex(2, 2, &mut rng);
        assert!(max_abs_diff(&c.apply(&a), &c.apply_amplified(&a, 1)) < 1e-14);
    }

    #[test]
    fn report_serializes_with_stable_fields() {
        let json = serde_json::to_value(SolverReport::exact(1.5)).unwrap();
        for key in ["value", "lower_bracket", "upper_bracket", "iterations", "residual", "converged"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }
}
