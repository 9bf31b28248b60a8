//! Numerical unitary dual of a finite group.
//!
//! The right regular representation is split into irreducible pieces by
//! diagonalizing random Hermitian elements of its commutant. One
//! representative per equivalence class is kept, and each irrep `π` is paired
//! with the representative `σ` of its entrywise conjugate together with a
//! unitary `Ω` such that `conj(π(s)) = Ω σ(s) Ω*`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::{
    hermitian_eig, identity, kron, matrix_unit, max_abs_diff, polar_unitary, random_hermitian,
    unitarity_defect, zeros, CMatrix,
};
use crate::serial::{matrix_from_json, matrix_to_json, vector_to_json};

/// Absolute tolerance for homomorphism, unitarity and orthogonality.
pub const TAU_REP: f64 = 1e-9;
/// Relative eigenvalue gap separating clusters.
const CLUSTER_GAP: f64 = 1e-6;
const SPLIT_ATTEMPTS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct Irrep {
    pub label: String,
    pub dim: usize,
    /// `matrices[s]` is `π(s)`.
    pub matrices: Vec<CMatrix>,
}

impl Irrep {
    pub fn character(&self) -> Vec<Complex64> {
        self.matrices.iter().map(|m| m.trace()).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.dim == 1 && self.matrices.iter().all(|m| (m[(0, 0)] - 1.0).norm() < TAU_REP)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryDual {
    irreps: Vec<Irrep>,
    conj_map: Vec<usize>,
    intertwiners: Vec<CMatrix>,
    inverse: Vec<usize>,
}

impl UnitaryDual {
    pub fn irreps(&self) -> &[Irrep] {
        &self.irreps
    }

    pub fn len(&self) -> usize {
        self.irreps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irreps.is_empty()
    }

    pub fn order(&self) -> usize {
        self.inverse.len()
    }

    pub fn inv(&self, s: usize) -> usize {
        self.inverse[s]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.irreps.iter().map(|p| p.dim).collect()
    }

    /// Dimension of the model space `⊕_π H_π`.
    pub fn total_dim(&self) -> usize {
        self.irreps.iter().map(|p| p.dim).sum()
    }

    /// Offset of block `p` inside `⊕_π H_π`.
    pub fn offsets(&self) -> Vec<usize> {
        self.irreps
            .iter()
            .scan(0, |acc, p| {
                let o = *acc;
                *acc += p.dim;
                Some(o)
            })
            .collect()
    }

    /// Index of the representative equivalent to `conj(π_p)`.
    pub fn conj_map(&self) -> &[usize] {
        &self.conj_map
    }

    /// `Ω_p` with `conj(π_p(s)) = Ω_p π_{conj_map[p]}(s) Ω_p*`.
    pub fn intertwiner(&self, p: usize) -> &CMatrix {
        &self.intertwiners[p]
    }

    pub fn conjugate_partner(&self, p: usize) -> (&Irrep, &CMatrix) {
        (&self.irreps[self.conj_map[p]], &self.intertwiners[p])
    }

    /// Dual of `G × H` from duals of the factors. Irrep `(a, b)` sits at index
    /// `a·|Ĥ| + b` and element `(g, h)` at `g·|H| + h`, matching
    /// [`FiniteGroup::product`].
    pub fn product(left: &UnitaryDual, right: &UnitaryDual) -> UnitaryDual {
        let (m, n) = (left.order(), right.order());
        let k = right.len();
        let mut irreps = Vec::with_capacity(left.len() * k);
        let mut conj_map = Vec::with_capacity(left.len() * k);
        let mut intertwiners = Vec::with_capacity(left.len() * k);
        for (a, pa) in left.irreps.iter().enumerate() {
            for (b, pb) in right.irreps.iter().enumerate() {
                let matrices = (0..m * n)
                    .map(|x| kron(&pa.matrices[x / n], &pb.matrices[x % n]))
                    .collect();
                irreps.push(Irrep {
                    label: format!("{}x{}", pa.label, pb.label),
                    dim: pa.dim * pb.dim,
                    matrices,
                });
                conj_map.push(left.conj_map[a] * k + right.conj_map[b]);
                intertwiners.push(kron(&left.intertwiners[a], &right.intertwiners[b]));
            }
        }
        let inverse = (0..m * n)
            .map(|x| left.inv(x / n) * n + right.inv(x % n))
            .collect();
        UnitaryDual {
            irreps,
            conj_map,
            intertwiners,
            inverse,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "order": self.order(),
            "inverse": self.inverse,
            "irreps": self.irreps.iter().map(|p| json!({
                "label": p.label,
                "dim": p.dim,
                "character": vector_to_json(&p.character()),
                "matrices": p.matrices.iter().map(matrix_to_json).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "conj_map": self.conj_map,
            "intertwiners": self.intertwiners.iter().map(matrix_to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::InvalidArgument(format!("dual json: {what}"));
        let indices = |key: &str| -> Result<Vec<usize>> {
            v[key]
                .as_array()
                .ok_or_else(|| bad(&format!("missing `{key}`")))?
                .iter()
                .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(|| bad(key)))
                .collect()
        };
        let inverse = indices("inverse")?;
        let conj_map = indices("conj_map")?;
        let irreps = v["irreps"]
            .as_array()
            .ok_or_else(|| bad("missing `irreps`"))?
            .iter()
            .map(|p| {
                let matrices = p["matrices"]
                    .as_array()
                    .ok_or_else(|| bad("irrep without matrices"))?
                    .iter()
                    .map(matrix_from_json)
                    .collect::<Result<Vec<_>>>()?;
                Ok(Irrep {
                    label: p["label"].as_str().unwrap_or_default().to_string(),
                    dim: p["dim"].as_u64().ok_or_else(|| bad("irrep without dim"))? as usize,
                    matrices,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let intertwiners = v["intertwiners"]
            .as_array()
            .ok_or_else(|| bad("missing `intertwiners`"))?
            .iter()
            .map(matrix_from_json)
            .collect::<Result<Vec<_>>>()?;
        if conj_map.len() != irreps.len() || intertwiners.len() != irreps.len() {
            return Err(bad("conj_map and intertwiners must have one entry per irrep"));
        }
        for p in &irreps {
            if p.matrices.len() != inverse.len()
                || p.matrices.iter().any(|m| m.shape() != (p.dim, p.dim))
            {
                return Err(bad(&format!("irrep `{}` has inconsistent shapes", p.label)));
            }
        }
        Ok(UnitaryDual {
            irreps,
            conj_map,
            intertwiners,
            inverse,
        })
    }
}

/// `(1/n) Σ_s χ_a(s) conj(χ_b(s))`.
fn character_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let n = a.len() as f64;
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<Complex64>() / n
}

/// Restriction of the right regular representation to the span of the
/// orthonormal columns of `basis`: `ρ(s)_ij = Σ_x conj(V_xi) V_{x·s, j}`.
fn restrict_regular(g: &FiniteGroup, basis: &CMatrix) -> Vec<CMatrix> {
    let n = g.order();
    let m = basis.ncols();
    (0..n)
        .map(|s| {
            let shifted = CMatrix::from_fn(n, m, |x, j| basis[(g.mul(x, s), j)]);
            basis.adjoint() * shifted
        })
        .collect()
}

/// Groups ascending eigenvalues into clusters separated by a relative gap.
fn clusters(values: &[f64]) -> Vec<std::ops::Range<usize>> {
    let scale = values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > CLUSTER_GAP * scale {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Splits the invariant subspace spanned by `basis` into irreducible pieces.
fn split(
    g: &FiniteGroup,
    basis: CMatrix,
    rng: &mut ChaCha8Rng,
    seed: u64,
    out: &mut Vec<Vec<CMatrix>>,
) -> Result<()> {
    let rho = restrict_regular(g, &basis);
    let n = g.order() as f64;
    let char_norm = rho.iter().map(|m| m.trace().norm_sqr()).sum::<f64>() / n;
    if (char_norm - 1.0).abs() < 1e-6 {
        out.push(rho);
        return Ok(());
    }
    let m = basis.ncols();
    for _ in 0..SPLIT_ATTEMPTS {
        let x = random_hermitian(m, rng);
        let mut a = zeros(m, m);
        for r in &rho {
            a += r * &x * r.adjoint();
        }
        let (values, vectors) = hermitian_eig(&a.unscale(n));
        let parts = clusters(&values);
        if parts.len() < 2 {
            continue;
        }
        for range in parts {
            let sub = &basis * vectors.columns(range.start, range.len());
            split(g, sub, rng, seed, out)?;
        }
        return Ok(());
    }
    Err(Error::ClusteringFailure { seed })
}

/// Computes a complete set of inequivalent unitary irreps of `g`.
/// Deterministic in `(g, seed)`.
pub fn compute_dual(g: &FiniteGroup, seed: u64) -> Result<UnitaryDual> {
    let n = g.order();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pieces = Vec::new();
    split(g, identity(n), &mut rng, seed, &mut pieces)?;

    // One representative per character.
    let mut reps: Vec<(Vec<CMatrix>, Vec<Complex64>)> = Vec::new();
    for rho in pieces {
        let chi: Vec<Complex64> = rho.iter().map(|m| m.trace()).collect();
        if !reps
            .iter()
            .any(|(_, c)| (character_inner(c, &chi) - 1.0).norm() < 1e-6)
        {
            reps.push((rho, chi));
        }
    }
    let dim_sq: usize = reps.iter().map(|(r, _)| r[0].nrows().pow(2)).sum();
    if dim_sq != n || reps.len() != g.class_count() {
        return Err(Error::Internal(format!(
            "decomposition is incomplete: Σ d² = {dim_sq}, |G| = {n}"
        )));
    }

    // Canonical order: by dimension, then by character values.
    let key = |(r, chi): &(Vec<CMatrix>, Vec<Complex64>)| {
        let round = |x: f64| (x * 1e6).round() as i64;
        let values: Vec<(i64, i64)> = chi.iter().map(|z| (-round(z.re), -round(z.im))).collect();
        (r[0].nrows(), values)
    };
    reps.sort_by_cached_key(key);

    let irreps: Vec<Irrep> = reps
        .into_iter()
        .enumerate()
        .map(|(i, (matrices, _))| Irrep {
            label: format!("pi{i}"),
            dim: matrices[0].nrows(),
            matrices,
        })
        .collect();

    let mut conj_map = Vec::with_capacity(irreps.len());
    let mut intertwiners = Vec::with_capacity(irreps.len());
    for p in &irreps {
        let conj_chi: Vec<Complex64> = p.character().iter().map(|z| z.conj()).collect();
        let c = irreps
            .iter()
            .position(|q| (character_inner(&q.character(), &conj_chi) - 1.0).norm() < 1e-6)
            .ok_or_else(|| Error::Internal(format!("no conjugate partner for {}", p.label)))?;
        conj_map.push(c);
        intertwiners.push(intertwiner(p, &irreps[c])?);
    }

    let dual = UnitaryDual {
        irreps,
        conj_map,
        intertwiners,
        inverse: g.inverses().to_vec(),
    };
    let defect = representation_defect(g, &dual);
    if defect > TAU_REP {
        return Err(Error::Tolerance {
            what: "computed representations".into(),
            deviation: defect,
            tolerance: TAU_REP,
        });
    }
    Ok(dual)
}

/// Unitary `Ω` with `conj(π(s)) Ω = Ω σ(s)`, found by averaging a matrix unit
/// over the group and taking the polar factor.
fn intertwiner(pi: &Irrep, sigma: &Irrep) -> Result<CMatrix> {
    let d = pi.dim;
    let n = pi.matrices.len() as f64;
    let mut best = (0.0, zeros(d, d));
    for a in 0..d {
        for b in 0..d {
            let e = matrix_unit(d, a, b);
            let mut m = zeros(d, d);
            for (p, s) in pi.matrices.iter().zip(&sigma.matrices) {
                m += p.map(|z| z.conj()) * &e * s.adjoint();
            }
            let size = m.norm();
            if size > best.0 {
                best = (size, m.unscale(n));
            }
        }
    }
    if best.0 == 0.0 {
        return Err(Error::Internal(format!("{} has no intertwiner", pi.label)));
    }
    Ok(polar_unitary(&best.1))
}

/// Worst violation of the homomorphism, unitarity and intertwining
/// conditions over the whole dual.
pub fn representation_defect(g: &FiniteGroup, dual: &UnitaryDual) -> f64 {
    let n = g.order();
    let mut worst: f64 = 0.0;
    for (p, pi) in dual.irreps.iter().enumerate() {
        let (sigma, omega) = dual.conjugate_partner(p);
        worst = worst.max(unitarity_defect(omega));
        for s in 0..n {
            worst = worst.max(unitarity_defect(&pi.matrices[s]));
            let routed = omega * &sigma.matrices[s] * omega.adjoint();
            worst = worst.max(max_abs_diff(&pi.matrices[s].map(|z| z.conj()), &routed));
            for t in 0..n {
                let prod = &pi.matrices[s] * &pi.matrices[t];
                worst = worst.max(max_abs_diff(&pi.matrices[g.mul(s, t)], &prod));
            }
        }
    }
    worst
}

/// Largest deviation of `(1/n) Σ_s π_ij(s) conj(π'_kl(s))` from
/// `δ_{ππ'} δ_ik δ_jl / d_π`.
pub fn verify_schur(dual: &UnitaryDual) -> f64 {
    let n = dual.order() as f64;
    let mut worst: f64 = 0.0;
    for (a, pa) in dual.irreps.iter().enumerate() {
        for (b, pb) in dual.irreps.iter().enumerate() {
            for i in 0..pa.dim {
                for j in 0..pa.dim {
                    for k in 0..pb.dim {
                        for l in 0..pb.dim {
                            let integral = pa
                                .matrices
                                .iter()
                                .zip(&pb.matrices)
                                .map(|(x, y)| x[(i, j)] * y[(k, l)].conj())
                                .sum::<Complex64>()
                                / n;
                            let target = if a == b && i == k && j == l {
                                1.0 / pa.dim as f64
                            } else {
                                0.0
                            };
                            worst = worst.max((integral - target).norm());
                        }
                    }
                }
            }
        }
    }
    worst
}
