//! Dense complex linear algebra helpers on top of `nalgebra`.
//!
//! Everything in the crate works with [`CMatrix`], a heap-allocated complex
//! matrix. The helpers here cover the handful of spectral quantities the rest
//! of the crate needs: singular values, Hermitian eigendecompositions,
//! matrix powers of positive semidefinite matrices and the unitary polar
//! factor.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMatrix = DMatrix<Complex64>;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

/// Kronecker product `a ⊗ b` with `a` as the outer (slow) index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Matrix unit `E_ij` of size `n × n`.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut e = zeros(n, n);
    e[(i, j)] = c64(1.0, 0.0);
    e
}

/// Thin singular value decomposition `m = u · diag(s) · v*`, singular values
/// descending. `u` and `v` have `min(rows, cols)` orthonormal columns.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    pub fn recompose(&self) -> CMatrix {
        let mut us = self.u.clone();
        for (j, &sj) in self.s.iter().enumerate() {
            us.column_mut(j).scale_mut(sj);
        }
        us * self.v.adjoint()
    }
}

/// One-sided Jacobi SVD.
///
/// nalgebra's complex SVD with singular vectors can return inaccurate factors
/// when singular values are highly degenerate, which is the normal situation
/// for the structured operators here, so vectors come from this routine.
pub fn svd(m: &CMatrix) -> Svd {
    let (rows, cols) = m.shape();
    if rows < cols {
        let t = svd(&m.adjoint());
        return Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        };
    }
    let mut a = m.clone();
    let mut v = identity(cols);
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if g <= 1e-15 * (alpha * beta).sqrt() || g <= 1e-300 * scale.max(1e-300) {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut a, &mut v] {
                    for i in 0..mat.nrows() {
                        let x = mat[(i, p)];
                        let y = mat[(i, q)] * phase.conj();
                        mat[(i, p)] = x * c - y * s;
                        mat[(i, q)] = x * s + y * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(f64, usize)> = (0..cols).map(|j| (a.column(j).norm(), j)).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0));
    let top = order.first().map_or(0.0, |x| x.0);
    let mut u = zeros(rows, cols);
    let mut vs = zeros(cols, cols);
    let mut s = Vec::with_capacity(cols);
    let mut missing = Vec::new();
    for (k, &(sigma, j)) in order.iter().enumerate() {
        s.push(sigma);
        vs.set_column(k, &v.column(j));
        if sigma > 1e-14 * top && sigma > 0.0 {
            u.set_column(k, &a.column(j).unscale(sigma));
        } else {
            missing.push(k);
        }
    }
    complete_orthonormal(&mut u, &missing);
    Svd { u, s, v: vs }
}

/// Fills the listed columns of `u` with unit vectors orthogonal to the rest.
fn complete_orthonormal(u: &mut CMatrix, missing: &[usize]) {
    let rows = u.nrows();
    let mut filled: Vec<usize> = (0..u.ncols()).filter(|k| !missing.contains(k)).collect();
    let mut candidate = 0;
    for &k in missing {
        while candidate < rows {
            let mut x = CMatrix::zeros(rows, 1);
            x[(candidate, 0)] = c64(1.0, 0.0);
            candidate += 1;
            for _ in 0..2 {
                for &j in &filled {
                    let proj = u.column(j).dotc(&x.column(0));
                    let col = u.column(j).into_owned();
                    x.column_mut(0).axpy(-proj, &col, c64(1.0, 0.0));
                }
            }
            let len = x.norm();
            if len > 1e-8 {
                u.set_column(k, &x.column(0).unscale(len));
                filled.push(k);
                break;
            }
        }
    }
}

pub fn singular_values(m: &CMatrix) -> DVector<f64> {
    if m.is_empty() {
        return DVector::zeros(0);
    }
    DVector::from_vec(svd(m).s)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).iter().cloned().fold(0.0, f64::max)
}

/// Sum of singular values (Schatten 1-norm).
pub fn trace_norm(m: &CMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// Frobenius norm (Schatten 2-norm).
pub fn hs_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending, with the
/// eigenvectors as the matching columns.
pub fn hermitian_eig(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn lambda_max(m: &CMatrix) -> f64 {
    SymmetricEigen::new(hermitian_part(m))
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `m^power` for a positive semidefinite `m`. Eigenvalues below
/// `floor · λ_max` are clamped to that floor first.
pub fn psd_power(m: &CMatrix, power: f64, floor: f64) -> CMatrix {
    let (values, vectors) = hermitian_eig(m);
    let top = values.iter().cloned().fold(0.0, f64::max);
    let lo = floor * top;
    let scaled: Vec<f64> = values.iter().map(|&v| v.max(lo).max(0.0)).collect();
    let mut left = vectors.clone();
    for (j, &v) in scaled.iter().enumerate() {
        let f = if v == 0.0 { 0.0 } else { v.powf(power) };
        left.column_mut(j).scale_mut(f);
    }
    left * vectors.adjoint()
}

/// Unitary factor `U` of the polar decomposition `m = U |m|`.
pub fn polar_unitary(m: &CMatrix) -> CMatrix {
    let f = svd(m);
    f.u * f.v.adjoint()
}

/// Entrywise maximum of `|a - b|`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Distance of `m` from being unitary, `‖m m* − I‖` in spectral norm.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    spectral_norm(&(m * m.adjoint() - identity(m.nrows())))
}

/// Trace of `a * b` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Matrix with independent standard complex Gaussian entries.
pub fn random_complex<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_complex_vec<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<Complex64> {
    (0..len)
        .map(|_| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    hermitian_part(&random_complex(n, n, rng))
}

/// Contraction in the spectral norm, obtained by rescaling a Gaussian matrix.
pub fn random_contraction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let m = random_complex(n, n, rng);
    let s = spectral_norm(&m);
    if s > 0.0 {
        m.unscale(s)
    } else {
        m
    }
}

/// Cholesky factor of a Hermitian positive definite matrix, `None` otherwise.
///
/// `nalgebra` takes complex square roots of non-positive pivots instead of
/// failing, so the pivots are checked to be real and positive.
pub fn cholesky_pd(m: CMatrix) -> Option<Cholesky<Complex64, Dyn>> {
    let c = Cholesky::new(m)?;
    let ok = c
        .l_dirty()
        .diagonal()
        .iter()
        .all(|z| z.re.is_finite() && z.re > 0.0 && z.im.abs() <= 1e-8 * z.re);
    ok.then_some(c)
}

/// Real-valued Cholesky solve for Newton systems, with LU fallback.
pub(crate) fn solve_spd(h: &DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(ch) = h.clone().cholesky() {
        return Some(ch.solve(g));
    }
    h.clone().lu().solve(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cholesky_rejects_indefinite() {
        assert!(cholesky_pd(identity(3)).is_some());
        let mut m = identity(3);
        m[(1, 1)] = c64(-1.0, 0.0);
        assert!(cholesky_pd(m).is_none());
        let m = CMatrix::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(2.0, 0.0), c64(2.0, 0.0), c64(1.0, 0.0)]);
        assert!(cholesky_pd(m).is_none());
    }

    #[test]
    fn norms_of_identity() {
        let i = identity(3);
        assert!((spectral_norm(&i) - 1.0).abs() < 1e-14);
        assert!((trace_norm(&i) - 3.0).abs() < 1e-14);
        assert!((hs_norm(&i) - 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rank_one_spectral_norm_is_product_of_lengths() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_complex(4, 1, &mut rng);
        let y = random_complex(4, 1, &mut rng);
        let m = &x * y.adjoint();
        let expect = x.norm() * y.norm();
        assert!((spectral_norm(&m) - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn spectral_norm_agrees_with_power_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_complex(5, 5, &mut rng);
        let gram = m.adjoint() * &m;
        let mut v = random_complex(5, 1, &mut rng);
        let mut estimate = 0.0;
        for _ in 0..2000 {
            let w = &gram * &v;
            estimate = w.norm() / v.norm();
            v = w.unscale(w.norm());
        }
        let oracle = estimate.sqrt();
        assert!((spectral_norm(&m) - oracle).abs() < 1e-9 * oracle);
    }

    #[test]
    fn trace_and_hs_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_complex(4, 4, &mut rng);
        assert!(trace_norm(&m) >= m.trace().norm());
        let hs2 = (m.adjoint() * &m).trace().re;
        assert!((hs_norm(&m).powi(2) - hs2).abs() < 1e-10 * hs2);
    }

    #[test]
    fn unitary_trace_norm_is_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = polar_unitary(&random_complex(4, 4, &mut rng));
        assert!(unitarity_defect(&u) < 1e-12);
        assert!((trace_norm(&u) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_svd_recomposes() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (r, c) in [(5, 5), (6, 3), (3, 6)] {
            let m = random_complex(r, c, &mut rng);
            let f = svd(&m);
            assert!(max_abs_diff(&f.recompose(), &m) < 1e-12);
            assert!(f.s.windows(2).all(|w| w[0] >= w[1]));
            let k = r.min(c);
            assert!(max_abs_diff(&(f.u.adjoint() * &f.u), &identity(k)) < 1e-12);
            assert!(max_abs_diff(&(f.v.adjoint() * &f.v), &identity(k)) < 1e-12);
        }
    }

    #[test]
    fn jacobi_svd_handles_degenerate_and_singular_input() {
        // Partial transpose of a unitary: singular values cluster at 1 and d.
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let u = polar_unitary(&random_complex(9, 9, &mut rng));
        let pt = CMatrix::from_fn(9, 9, |i, j| u[((i / 3) * 3 + j % 3, (j / 3) * 3 + i % 3)]);
        let f = svd(&pt);
        assert!(max_abs_diff(&f.recompose(), &pt) < 1e-12);
        let rank_one = random_complex(4, 1, &mut rng) * random_complex(1, 4, &mut rng);
        let p = polar_unitary(&rank_one);
        assert!(unitarity_defect(&p) < 1e-12);
        let f = svd(&rank_one);
        assert!(max_abs_diff(&f.recompose(), &rank_one) < 1e-12);
        let (values, _) = hermitian_eig(&(rank_one.adjoint() * &rank_one));
        assert!((f.s[0] - values[3].sqrt()).abs() < 1e-10);
    }

    #[test]
    fn psd_square_root_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_complex(4, 4, &mut rng);
        let p = &a * a.adjoint();
        let r = psd_power(&p, 0.5, 0.0);
        assert!(max_abs_diff(&(&r * &r), &p) < 1e-10);
    }
}
