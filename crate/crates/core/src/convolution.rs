//! The averaging maps `Γ`, `Γ̌` from functions on `G×G` to functions on `G`,
//! convolution, and the dual side: the adjoints `Γ*`, `Γ̌*` as block
//! operators on `H⊗H`, the tracial expectation, the projection
//! `∫ λ(s)⊗λ(s) ds` and the flip unitary.

use num_complex::Complex64;
use rand::Rng;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fourier::{check_operator, BlockOperator, ScalarFunction};
use crate::group::FiniteGroup;
use crate::linalg::{kron, max_abs_diff, random_complex_vec, spectral_norm, zeros, CMatrix};
use crate::rep::{Irrep, UnitaryDual};
use crate::serial::{fmt_num, matrix_from_json, matrix_to_json};

/// A function on `G×G`, stored row-major: `values[s·n + t] = w(s, t)`.
///
/// The flat layout coincides with the element indexing of the product group,
/// so [`BiFunction::as_product_function`] is free.
#[derive(Debug, Clone, PartialEq)]
pub struct BiFunction {
    order: usize,
    values: Vec<Complex64>,
}

impl BiFunction {
    pub fn new(order: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != order * order {
            return Err(Error::DimensionMismatch(format!(
                "bi-function has {} values, expected {}",
                values.len(),
                order * order
            )));
        }
        Ok(BiFunction { order, values })
    }

    /// Elementary tensor `(s, t) ↦ u(s) v(t)`.
    pub fn tensor(u: &ScalarFunction, v: &ScalarFunction) -> Result<Self> {
        let n = u.len();
        if v.len() != n {
            return Err(Error::DimensionMismatch("tensor factors differ in length".into()));
        }
        let values = u
            .values
            .iter()
            .flat_map(|a| v.values.iter().map(move |b| a * b))
            .collect();
        Ok(BiFunction { order: n, values })
    }

    pub fn random<R: Rng + ?Sized>(order: usize, rng: &mut R) -> Self {
        BiFunction {
            order,
            values: random_complex_vec(order * order, rng),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, s: usize, t: usize) -> Complex64 {
        self.values[s * self.order + t]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn as_product_function(&self) -> ScalarFunction {
        ScalarFunction::new(self.values.clone())
    }

    pub fn to_json(&self) -> Value {
        matrix_to_json(&CMatrix::from_fn(self.order, self.order, |s, t| self.get(s, t)))
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let m = matrix_from_json(v)?;
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch("bi-function must be square".into()));
        }
        let n = m.nrows();
        Ok(BiFunction {
            order: n,
            values: (0..n * n).map(|k| m[(k / n, k % n)]).collect(),
        })
    }
}

fn expect_order(g: &FiniteGroup, len: usize, what: &str) -> Result<()> {
    if len == g.order() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "{what} has order {len}, group has order {}",
            g.order()
        )))
    }
}

/// `(Γw)(s) = (1/|G|) Σ_r w(s·r, r)`.
pub fn gamma(g: &FiniteGroup, w: &BiFunction) -> Result<ScalarFunction> {
    expect_order(g, w.order, "bi-function")?;
    let n = g.order();
    Ok(ScalarFunction::new(
        (0..n)
            .map(|s| (0..n).map(|r| w.get(g.mul(s, r), r)).sum::<Complex64>() / n as f64)
            .collect(),
    ))
}

/// `(Γ̌w)(s) = (1/|G|) Σ_r w(s·r, r⁻¹)`.
pub fn gamma_check(g: &FiniteGroup, w: &BiFunction) -> Result<ScalarFunction> {
    expect_order(g, w.order, "bi-function")?;
    let n = g.order();
    Ok(ScalarFunction::new(
        (0..n)
            .map(|s| (0..n).map(|r| w.get(g.mul(s, r), g.inv(r))).sum::<Complex64>() / n as f64)
            .collect(),
    ))
}

/// `(u∗v)(s) = (1/|G|) Σ_r u(r) v(r⁻¹·s)`.
pub fn convolve(g: &FiniteGroup, u: &ScalarFunction, v: &ScalarFunction) -> Result<ScalarFunction> {
    expect_order(g, u.len(), "function")?;
    expect_order(g, v.len(), "function")?;
    let n = g.order();
    Ok(ScalarFunction::new(
        (0..n)
            .map(|s| {
                (0..n)
                    .map(|r| u.values[r] * v.values[g.mul(g.inv(r), s)])
                    .sum::<Complex64>()
                    / n as f64
            })
            .collect(),
    ))
}

/// An `n × n` matrix of block operators, the input of an amplified adjoint.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperatorMatrix {
    level: usize,
    entries: Vec<BlockOperator>,
}

impl BlockOperatorMatrix {
    pub fn new(level: usize, entries: Vec<BlockOperator>) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidArgument("amplification level must be at least 1".into()));
        }
        if entries.len() != level * level {
            return Err(Error::DimensionMismatch(format!(
                "level {level} needs {} entries, got {}",
                level * level,
                entries.len()
            )));
        }
        Ok(BlockOperatorMatrix { level, entries })
    }

    pub fn diagonal(level: usize, dual: &UnitaryDual, t: &BlockOperator) -> Result<Self> {
        let entries = (0..level * level)
            .map(|k| if k / level == k % level { t.clone() } else { BlockOperator::zero(dual) })
            .collect();
        Self::new(level, entries)
    }

    pub fn random<R: Rng + ?Sized>(level: usize, dual: &UnitaryDual, rng: &mut R) -> Result<Self> {
        Self::new(level, (0..level * level).map(|_| BlockOperator::random(dual, rng)).collect())
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn get(&self, i: usize, j: usize) -> &BlockOperator {
        &self.entries[i * self.level + j]
    }
}

/// Operator on `M_n(H⊗H)` that is block diagonal over pairs `(π′, π)`.
///
/// Block `p′·|Ĝ| + p` acts on `C^n ⊗ H_{π′} ⊗ H_π` and has size
/// `n·d_{π′}·d_π`, arranged as an `n × n` grid of `d_{π′}d_π` squares.
#[derive(Debug, Clone, PartialEq)]
pub struct BiBlockOperator {
    dims: Vec<usize>,
    level: usize,
    blocks: Vec<CMatrix>,
}

impl BiBlockOperator {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn block(&self, p_prime: usize, p: usize) -> &CMatrix {
        &self.blocks[p_prime * self.dims.len() + p]
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(spectral_norm).fold(0.0, f64::max)
    }

    /// Full matrix, blocks laid out along the diagonal in index order.
    pub fn assemble(&self) -> CMatrix {
        let total: usize = self.blocks.iter().map(|b| b.nrows()).sum();
        let mut out = zeros(total, total);
        let mut o = 0;
        for b in &self.blocks {
            out.view_mut((o, o), b.shape()).copy_from(b);
            o += b.nrows();
        }
        out
    }

    /// CSV table of per-block spectral norms.
    pub fn norm_table_csv(&self) -> String {
        let k = self.dims.len();
        let mut out = String::from("pi_prime,pi,n,norm\n");
        for (idx, b) in self.blocks.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                idx / k,
                idx % k,
                self.level,
                fmt_num(spectral_norm(b))
            ));
        }
        out
    }
}

/// Builds an amplified bi-block operator whose `(i, j)` entry in block
/// `(π′, π)` is `(1/|G|) Σ_s π′(s) ⊗ left(π, s, T_ij) · right(π, s)`.
fn averaged_tensor<F>(dual: &UnitaryDual, t: &BlockOperatorMatrix, factor: F) -> Result<BiBlockOperator>
where
    F: Fn(usize, usize, &BlockOperator) -> CMatrix,
{
    for e in &t.entries {
        e.check_shape(dual)?;
    }
    let n = dual.order() as f64;
    let level = t.level;
    let dims = dual.dims();
    let mut blocks = Vec::with_capacity(dims.len() * dims.len());
    for pp in dual.irreps() {
        for (p, _) in dual.irreps().iter().enumerate() {
            let d = pp.dim * dims[p];
            let mut block = zeros(level * d, level * d);
            for i in 0..level {
                for j in 0..level {
                    let entry = t.get(i, j);
                    let mut acc = zeros(d, d);
                    for s in 0..dual.order() {
                        acc += kron(&pp.matrices[s], &factor(p, s, entry));
                    }
                    block.view_mut((i * d, j * d), (d, d)).copy_from(&acc.unscale(n));
                }
            }
            blocks.push(block);
        }
    }
    Ok(BiBlockOperator { dims, level, blocks })
}

/// `Γ*(T) = ∫ λ(s) ⊗ Ť λ(s) ds`, the adjoint of [`gamma`] under the bilinear
/// pairings on `G` and `G×G`.
pub fn gamma_adjoint(dual: &UnitaryDual, t: &BlockOperator) -> Result<BiBlockOperator> {
    gamma_adjoint_amplified(dual, &BlockOperatorMatrix::new(1, vec![t.clone()])?)
}

/// Entrywise amplification `[T_ij] ↦ [Γ*(T_ij)]`.
pub fn gamma_adjoint_amplified(dual: &UnitaryDual, t: &BlockOperatorMatrix) -> Result<BiBlockOperator> {
    let checked = t
        .entries
        .iter()
        .map(|e| check_operator(dual, e))
        .collect::<Result<Vec<_>>>()?;
    let checked = BlockOperatorMatrix::new(t.level, checked)?;
    averaged_tensor(dual, &checked, |p, s, e| &e.blocks[p] * &dual.irreps()[p].matrices[s])
}

/// `Γ̌*(T) = ∫ λ(s) ⊗ λ(s⁻¹) T ds`, the adjoint of [`gamma_check`].
pub fn gamma_check_adjoint(dual: &UnitaryDual, t: &BlockOperator) -> Result<BiBlockOperator> {
    gamma_check_adjoint_amplified(dual, &BlockOperatorMatrix::new(1, vec![t.clone()])?)
}

pub fn gamma_check_adjoint_amplified(
    dual: &UnitaryDual,
    t: &BlockOperatorMatrix,
) -> Result<BiBlockOperator> {
    averaged_tensor(dual, t, |p, s, e| dual.irreps()[p].matrices[s].adjoint() * &e.blocks[p])
}

/// Bilinear pairing of a function on `G×G` with a level-1 bi-block operator,
/// through the product dual `prod = D × D`.
pub fn bi_pairing(prod: &UnitaryDual, w: &BiFunction, op: &BiBlockOperator) -> Result<Complex64> {
    if op.level != 1 || op.blocks.len() != prod.len() {
        return Err(Error::DimensionMismatch(
            "pairing needs a level-1 operator over the product dual".into(),
        ));
    }
    let t = BlockOperator::new(prod, op.blocks.clone())?;
    crate::fourier::dual_pairing(prod, &w.as_product_function(), &t)
}

/// `(1/|G|) Σ_s π(s⁻¹) A π(s)`.
pub fn tracial_expectation(pi: &Irrep, a: &CMatrix) -> Result<CMatrix> {
    if a.shape() != (pi.dim, pi.dim) {
        return Err(Error::DimensionMismatch(format!(
            "expected a {0}×{0} matrix",
            pi.dim
        )));
    }
    let mut acc = zeros(pi.dim, pi.dim);
    for m in &pi.matrices {
        acc += m.adjoint() * a * m;
    }
    Ok(acc.unscale(pi.matrices.len() as f64))
}

/// `(1/|G|) Σ_s π′(s) ⊗ π(s)`, block `(π′, π)` of `∫ λ(s)⊗λ(s) ds`.
pub fn projection_p(pi_prime: &Irrep, pi: &Irrep) -> CMatrix {
    let mut acc = zeros(pi_prime.dim * pi.dim, pi_prime.dim * pi.dim);
    for (a, b) in pi_prime.matrices.iter().zip(&pi.matrices) {
        acc += kron(a, b);
    }
    acc.unscale(pi.matrices.len() as f64)
}

/// `∫ λ(s)⊗λ(s) ds` on `H⊗H`, block diagonal over `(π′, π)`.
pub fn assembled_projection(dual: &UnitaryDual) -> BiBlockOperator {
    let blocks = dual
        .irreps()
        .iter()
        .flat_map(|a| dual.irreps().iter().map(move |b| projection_p(a, b)))
        .collect();
    BiBlockOperator {
        dims: dual.dims(),
        level: 1,
        blocks,
    }
}

/// `U_π = d_π (1/|G|) Σ_s π(s) ⊗ π(s⁻¹)`.
pub fn flip_unitary(pi: &Irrep) -> CMatrix {
    let d = pi.dim;
    let mut acc = zeros(d * d, d * d);
    for m in &pi.matrices {
        acc += kron(m, &m.adjoint());
    }
    acc * Complex64::new(d as f64 / pi.matrices.len() as f64, 0.0)
}

/// The swap `x ⊗ y ↦ y ⊗ x` on `C^d ⊗ C^d`.
pub fn swap_matrix(d: usize) -> CMatrix {
    let mut m = zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(j * d + i, i * d + j)] = Complex64::new(1.0, 0.0);
        }
    }
    m
}

/// Entrywise distance of `U_π` from the swap permutation.
pub fn flip_swap_distance(pi: &Irrep) -> f64 {
    max_abs_diff(&flip_unitary(pi), &swap_matrix(pi.dim))
}

/// `‖Γ̌*(T)‖` in closed form: `max_π ‖T_π‖ / d_π`.
pub fn gamma_check_adjoint_closed_form(t: &BlockOperator) -> f64 {
    t.blocks
        .iter()
        .map(|b| spectral_norm(b) / b.nrows() as f64)
        .fold(0.0, f64::max)
}
