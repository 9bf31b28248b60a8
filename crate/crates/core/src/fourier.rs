//! Fourier transform on a finite group and the closed-form norm family.
//!
//! Conventions: `û(π) = (1/|G|) Σ_s u(s) π(s⁻¹)`, inversion
//! `u(s) = Σ_π d_π Tr(û(π) π(s))`, and the bilinear pairing
//! `⟨u, T⟩ = Σ_π d_π Tr(û(π) T_π)`, so that `⟨u, λ(s)⟩ = u(s)`.

use num_complex::Complex64;
use rand::Rng;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{
    hs_norm, identity, random_complex, random_complex_vec, spectral_norm, trace_norm, zeros,
    CMatrix,
};
use crate::rep::{Irrep, UnitaryDual};
use crate::serial::{matrix_from_json, matrix_to_json, vector_from_json, vector_to_json};

/// A complex function on the group, `values[s] = u(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFunction {
    pub values: Vec<Complex64>,
}

impl ScalarFunction {
    pub fn new(values: Vec<Complex64>) -> Self {
        ScalarFunction { values }
    }

    pub fn constant(order: usize, c: Complex64) -> Self {
        Self::new(vec![c; order])
    }

    /// `scale · 1_{s}`.
    pub fn point_mass(order: usize, s: usize, scale: f64) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); order];
        values[s] = Complex64::new(scale, 0.0);
        Self::new(values)
    }

    /// `s ↦ Tr π(s)`.
    pub fn character(pi: &Irrep) -> Self {
        Self::new(pi.character())
    }

    pub fn random<R: Rng + ?Sized>(order: usize, rng: &mut R) -> Self {
        Self::new(random_complex_vec(order, rng))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.values.iter().map(|z| z * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Value {
        vector_to_json(&self.values)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        Ok(Self::new(vector_from_json(v)?))
    }

    fn expect_len(&self, order: usize) -> Result<()> {
        if self.len() == order {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "function has {} values, group has order {order}",
                self.len()
            )))
        }
    }
}

/// An element of `⊕_π B(H_π)`: one `d_π × d_π` block per irrep.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    pub blocks: Vec<CMatrix>,
}

impl BlockOperator {
    pub fn new(dual: &UnitaryDual, blocks: Vec<CMatrix>) -> Result<Self> {
        let op = BlockOperator { blocks };
        op.check_shape(dual)?;
        Ok(op)
    }

    pub fn identity(dual: &UnitaryDual) -> Self {
        BlockOperator {
            blocks: dual.dims().into_iter().map(identity).collect(),
        }
    }

    pub fn zero(dual: &UnitaryDual) -> Self {
        BlockOperator {
            blocks: dual.dims().into_iter().map(|d| zeros(d, d)).collect(),
        }
    }

    /// Left translation `λ(s)`, whose blocks are `π(s)`.
    pub fn lambda(dual: &UnitaryDual, s: usize) -> Self {
        BlockOperator {
            blocks: dual.irreps().iter().map(|p| p.matrices[s].clone()).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(dual: &UnitaryDual, rng: &mut R) -> Self {
        BlockOperator {
            blocks: dual.dims().into_iter().map(|d| random_complex(d, d, rng)).collect(),
        }
    }

    pub fn check_shape(&self, dual: &UnitaryDual) -> Result<()> {
        let dims = dual.dims();
        if self.blocks.len() != dims.len()
            || self.blocks.iter().zip(&dims).any(|(b, &d)| b.shape() != (d, d))
        {
            return Err(Error::DimensionMismatch(format!(
                "block operator does not match irrep dimensions {dims:?}"
            )));
        }
        Ok(())
    }

    /// The operator as a block-diagonal matrix on `⊕_π H_π`.
    pub fn to_matrix(&self) -> CMatrix {
        let total: usize = self.blocks.iter().map(|b| b.nrows()).sum();
        let mut out = zeros(total, total);
        let mut offset = 0;
        for b in &self.blocks {
            let d = b.nrows();
            out.view_mut((offset, offset), (d, d)).copy_from(b);
            offset += d;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        BlockOperator {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        BlockOperator {
            blocks: self.blocks.iter().map(|b| b * c).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| crate::linalg::max_abs_diff(a, b))
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.blocks.iter().map(matrix_to_json).collect())
    }

    pub fn from_json(dual: &UnitaryDual, v: &Value) -> Result<Self> {
        let blocks = v
            .as_array()
            .ok_or_else(|| Error::InvalidArgument("expected a JSON array of blocks".into()))?
            .iter()
            .map(matrix_from_json)
            .collect::<Result<Vec<_>>>()?;
        Self::new(dual, blocks)
    }
}

pub fn fourier_transform(dual: &UnitaryDual, u: &ScalarFunction) -> Result<BlockOperator> {
    u.expect_len(dual.order())?;
    let n = dual.order() as f64;
    let blocks = dual
        .irreps()
        .iter()
        .map(|p| {
            let mut acc = zeros(p.dim, p.dim);
            for (s, m) in p.matrices.iter().enumerate() {
                acc += m.adjoint() * u.values[s];
            }
            acc.unscale(n)
        })
        .collect();
    Ok(BlockOperator { blocks })
}

pub fn inverse_transform(dual: &UnitaryDual, t: &BlockOperator) -> Result<ScalarFunction> {
    t.check_shape(dual)?;
    let values = (0..dual.order())
        .map(|s| {
            dual.irreps()
                .iter()
                .zip(&t.blocks)
                .map(|(p, b)| crate::linalg::trace_of_product(b, &p.matrices[s]) * p.dim as f64)
                .sum()
        })
        .collect();
    Ok(ScalarFunction::new(values))
}

/// Bilinear pairing `⟨u, T⟩ = Σ_π d_π Tr(û(π) T_π)`.
pub fn dual_pairing(dual: &UnitaryDual, u: &ScalarFunction, t: &BlockOperator) -> Result<Complex64> {
    t.check_shape(dual)?;
    let uhat = fourier_transform(dual, u)?;
    Ok(pair_transformed(dual, &uhat, t))
}

/// Pairing when the transform of `u` is already known.
pub fn pair_transformed(dual: &UnitaryDual, uhat: &BlockOperator, t: &BlockOperator) -> Complex64 {
    dual.irreps()
        .iter()
        .zip(uhat.blocks.iter().zip(&t.blocks))
        .map(|(p, (a, b))| crate::linalg::trace_of_product(a, b) * p.dim as f64)
        .sum()
}

/// `ǔ(s) = u(s⁻¹)`.
pub fn check_function(dual: &UnitaryDual, u: &ScalarFunction) -> Result<ScalarFunction> {
    u.expect_len(dual.order())?;
    Ok(ScalarFunction::new(
        (0..dual.order()).map(|s| u.values[dual.inv(s)]).collect(),
    ))
}

/// The operator `Ť` with `⟨u, Ť⟩ = ⟨ǔ, T⟩` for all `u`.
///
/// Block `π` is `Ω_c* T_cᵗ Ω_c` with `c` the conjugate partner of `π`; the
/// intertwiner accounts for `π̄` being realized in a different basis.
pub fn check_operator(dual: &UnitaryDual, t: &BlockOperator) -> Result<BlockOperator> {
    t.check_shape(dual)?;
    let blocks = (0..dual.len())
        .map(|p| {
            let c = dual.conj_map()[p];
            let omega = dual.intertwiner(c);
            omega.adjoint() * t.blocks[c].transpose() * omega
        })
        .collect();
    Ok(BlockOperator { blocks })
}

fn weighted_sum(dual: &UnitaryDual, u: &ScalarFunction, weight: impl Fn(f64, &CMatrix) -> f64) -> Result<f64> {
    let uhat = fourier_transform(dual, u)?;
    Ok(dual
        .irreps()
        .iter()
        .zip(&uhat.blocks)
        .map(|(p, b)| weight(p.dim as f64, b))
        .sum())
}

/// Fourier algebra norm `Σ_π d_π ‖û(π)‖₁`.
pub fn norm_a(dual: &UnitaryDual, u: &ScalarFunction) -> f64 {
    weighted_sum(dual, u, |d, b| d * trace_norm(b)).expect("function length matches the group")
}

/// `Σ_π d_π^{3/2} ‖û(π)‖₂`.
pub fn norm_adelta(dual: &UnitaryDual, u: &ScalarFunction) -> f64 {
    weighted_sum(dual, u, |d, b| d.powf(1.5) * hs_norm(b)).expect("function length matches the group")
}

/// `Σ_π d_π² ‖û(π)‖₁`.
pub fn norm_agamma(dual: &UnitaryDual, u: &ScalarFunction) -> f64 {
    weighted_sum(dual, u, |d, b| d * d * trace_norm(b)).expect("function length matches the group")
}

/// `max_π ‖T_π‖`.
pub fn norm_vn(t: &BlockOperator) -> f64 {
    t.blocks.iter().map(spectral_norm).fold(0.0, f64::max)
}

/// `max_π d_π^{-1/2} ‖T_π‖₂`, the norm dual to [`norm_adelta`].
///
/// Hilbert-Schmidt norms do not see entrywise conjugation or a change of
/// basis, so the conjugate relabelling of blocks leaves the maximum unchanged
/// and is skipped.
pub fn norm_adelta_dual(t: &BlockOperator) -> f64 {
    t.blocks
        .iter()
        .map(|b| hs_norm(b) / (b.nrows() as f64).sqrt())
        .fold(0.0, f64::max)
}
