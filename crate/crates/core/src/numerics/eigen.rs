use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{QopError, Result};

const QL_MAX_SWEEPS: usize = 60;
const INVERSE_ITERATION_CAP: usize = 12;

/// One eigenpair of a real symmetric matrix; `vector` has unit 2-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

/// Infinity norm of the symmetric tridiagonal matrix.
pub(crate) fn tridiag_norm(diag: &[f64], off: &[f64]) -> f64 {
    (0..diag.len())
        .map(|i| {
            let l = if i > 0 { off[i - 1].abs() } else { 0.0 };
            let r = if i < off.len() { off[i].abs() } else { 0.0 };
            diag[i].abs() + l + r
        })
        .fold(0.0, f64::max)
}

/// All eigenvalues of a symmetric tridiagonal matrix by implicit-shift QL, ascending.
pub fn tridiag_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(off);
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > QL_MAX_SWEEPS {
                return Err(QopError::Numerical(format!(
                    "QL did not deflate eigenvalue {l} of {n} after {QL_MAX_SWEEPS} sweeps (|e| = {:e})",
                    e[l].abs()
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// LU factors of a shifted tridiagonal matrix with partial pivoting.
struct TridiagLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(diag: &[f64], off: &[f64], shift: f64, tiny: f64) -> Self {
        let n = diag.len();
        let mut dl = off.to_vec();
        let mut du = off.to_vec();
        let mut d: Vec<f64> = diag.iter().map(|v| v - shift).collect();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        for v in d.iter_mut() {
            if v.abs() < tiny {
                *v = tiny.copysign(*v);
            }
        }
        Self { dl, d, du, du2, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let t = b[i];
                b[i] = b[i + 1];
                b[i + 1] = t - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                s -= self.du2[i] * b[i + 2];
            }
            b[i] = s / self.d[i];
        }
    }
}

fn tridiag_apply(diag: &[f64], off: &[f64], x: &[f64]) -> Vec<f64> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut s = diag[i] * x[i];
            if i > 0 {
                s += off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += off[i] * x[i + 1];
            }
            s
        })
        .collect()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// The `k` lowest eigenpairs of a symmetric tridiagonal matrix, ascending.
///
/// Eigenvalues come from implicit QL; eigenvectors from inverse iteration,
/// reorthogonalized against earlier vectors of the same cluster.
pub fn sym_tridiag_eigen(diag: &[f64], offdiag: &[f64], k: usize) -> Result<Vec<EigenPair>> {
    let n = diag.len();
    if n == 0 || offdiag.len() + 1 != n {
        return Err(QopError::Structural(format!(
            "tridiagonal shape mismatch: {} diagonal, {} off-diagonal entries",
            n,
            offdiag.len()
        )));
    }
    if k > n {
        return Err(QopError::Input(format!("requested {k} eigenpairs of a {n}x{n} matrix")));
    }
    if diag.iter().chain(offdiag).any(|v| !v.is_finite()) {
        return Err(QopError::Input("non-finite tridiagonal entry".into()));
    }
    let values = tridiag_eigenvalues(diag, offdiag)?;
    let tnorm = tridiag_norm(diag, offdiag).max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * tnorm;
    let cluster_gap = 1e-3 * tnorm;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut pairs: Vec<EigenPair> = Vec::with_capacity(k);
    for (j, &lambda) in values.iter().take(k).enumerate() {
        let cluster_start = pairs
            .iter()
            .rposition(|p| (lambda - p.value).abs() > cluster_gap)
            .map_or(0, |i| i + 1);
        let lu = TridiagLu::factor(diag, offdiag, lambda, tiny);
        let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        normalize(&mut x);
        let mut residual = f64::INFINITY;
        for _ in 0..INVERSE_ITERATION_CAP {
            lu.solve(&mut x);
            for p in &pairs[cluster_start..] {
                let dot: f64 = p.vector.iter().zip(&x).map(|(a, b)| a * b).sum();
                x.iter_mut().zip(&p.vector).for_each(|(xi, pi)| *xi -= dot * pi);
            }
            if normalize(&mut x) == 0.0 {
                return Err(QopError::Numerical(format!("inverse iteration collapsed for eigenvalue {j}")));
            }
            let tx = tridiag_apply(diag, offdiag, &x);
            residual = tx.iter().zip(&x).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
            if residual <= 1e-13 * tnorm {
                break;
            }
        }
        if residual > 1e-10 * tnorm {
            return Err(QopError::Numerical(format!(
                "inverse iteration for eigenvalue {j} (λ = {lambda:e}) stalled at residual {residual:e}, ‖T‖ = {tnorm:e}"
            )));
        }
        // Fix the sign so the first significant component is positive.
        if let Some(first) = x.iter().find(|v| v.abs() > 1e-8) {
            if *first < 0.0 {
                x.iter_mut().for_each(|v| *v = -*v);
            }
        }
        pairs.push(EigenPair { value: lambda, vector: x });
    }
    Ok(pairs)
}

/// Eigenvalues of a dense real symmetric matrix, ascending.
pub fn dense_symmetric_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(QopError::Structural(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| QopError::Numerical("dense symmetric eigensolver did not converge".into()))?;
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Eigenvalues of a hermitian matrix via the real embedding `[[A, -B], [B, A]]`.
///
/// The embedding doubles every eigenvalue; pairs are merged at relative tolerance 1e-9.
pub fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let n = h.nrows();
    if !h.is_square() {
        return Err(QopError::Structural(format!("{}x{} matrix is not square", n, h.ncols())));
    }
    let mut big = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            big[(i, j)] = z.re;
            big[(i + n, j + n)] = z.re;
            big[(i, j + n)] = -z.im;
            big[(i + n, j)] = z.im;
        }
    }
    let doubled = dense_symmetric_eigenvalues(&big)?;
    let scale = doubled.iter().map(|v| v.abs()).fold(1.0, f64::max);
    doubled
        .chunks(2)
        .map(|pair| {
            if (pair[0] - pair[1]).abs() <= 1e-9 * scale {
                Ok(0.5 * (pair[0] + pair[1]))
            } else {
                Err(QopError::Numerical(format!(
                    "doubled spectrum failed to pair: {} vs {}",
                    pair[0], pair[1]
                )))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn three_node_laplacian() {
        let h: f64 = 0.5;
        let s = 1.0 / (h * h);
        let pairs = sym_tridiag_eigen(&[2.0 * s; 3], &[-s; 2], 3).unwrap();
        let want = [2.0 - SQRT_2, 2.0, 2.0 + SQRT_2];
        for (p, w) in pairs.iter().zip(want) {
            assert!((p.value - w * s).abs() < 1e-12 * s);
        }
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let pairs = sym_tridiag_eigen(&[1.0; 6], &[0.0; 5], 6).unwrap();
        assert!(pairs.iter().all(|p| (p.value - 1.0).abs() < 1e-15));
        for (i, p) in pairs.iter().enumerate() {
            for q in &pairs[i + 1..] {
                let dot: f64 = p.vector.iter().zip(&q.vector).map(|(a, b)| a * b).sum();
                assert!(dot.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn large_laplacian_pairs_are_accurate_and_orthonormal() {
        let n = 2001;
        let h = 2.0 / 2002.0;
        let s = 1.0 / (h * h);
        let diag = vec![2.0 * s; n];
        let off = vec![-s; n - 1];
        let pairs = sym_tridiag_eigen(&diag, &off, 10).unwrap();
        let tnorm = tridiag_norm(&diag, &off);
        for (i, p) in pairs.iter().enumerate() {
            let tx = tridiag_apply(&diag, &off, &p.vector);
            let r: f64 = tx.iter().zip(&p.vector).map(|(a, b)| (a - p.value * b).powi(2)).sum::<f64>().sqrt();
            assert!(r <= 1e-10 * tnorm);
            for q in &pairs[i..] {
                let dot: f64 = p.vector.iter().zip(&q.vector).map(|(a, b)| a * b).sum();
                let want = if std::ptr::eq(p, q) { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-10, "dot {dot}");
            }
        }
    }

    #[test]
    fn hermitian_doubling_recovers_pauli_y() {
        let i = Complex64::new(0.0, 1.0);
        let m = DMatrix::from_row_slice(2, 2, &[Complex64::new(0.0, 0.0), -i, i, Complex64::new(0.0, 0.0)]);
        let v = hermitian_eigenvalues(&m).unwrap();
        assert!((v[0] + 1.0).abs() < 1e-12 && (v[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(sym_tridiag_eigen(&[1.0, 2.0], &[], 1), Err(QopError::Structural(_))));
        assert!(matches!(sym_tridiag_eigen(&[1.0, 2.0], &[0.5], 3), Err(QopError::Input(_))));
    }
}
