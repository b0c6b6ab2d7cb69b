//! Small dense complex linear algebra shared by the boundary and domain code.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOL: f64 = 1e-9;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Singular values and V^H of `m`, padded with zero rows so V^H is square.
fn svd_square(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let n = m.ncols();
    let rows = m.nrows().max(n);
    let mut padded = DMatrix::from_element(rows, n, zero());
    padded.rows_mut(0, m.nrows()).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    (svd.singular_values.iter().copied().collect(), v_t)
}

fn threshold(s: &[f64]) -> f64 {
    RANK_TOL * s.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE)
}

pub fn rank(m: &DMatrix<Complex64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let (s, _) = svd_square(m);
    let t = threshold(&s);
    s.iter().filter(|v| **v > t).count()
}

/// Orthonormal basis (as columns) of {x : m x = 0}.
pub fn null_space(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = m.ncols();
    if m.nrows() == 0 || m.iter().all(|v| *v == zero()) {
        return DMatrix::identity(n, n);
    }
    let (s, v_t) = svd_square(m);
    let t = threshold(&s);
    let null: Vec<usize> = (0..n).filter(|&i| s[i] <= t).collect();
    DMatrix::from_fn(n, null.len(), |r, c| v_t[(null[c], r)].conj())
}

/// Orthonormal basis of the column span of `m`.
pub fn orthonormal_columns(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    if m.ncols() == 0 {
        return DMatrix::from_element(m.nrows(), 0, zero());
    }
    let h = m.adjoint();
    let (s, v_t) = svd_square(&h);
    let t = threshold(&s);
    let keep: Vec<usize> = (0..s.len()).filter(|&i| s[i] > t && s[i] > 0.0).collect();
    DMatrix::from_fn(m.nrows(), keep.len(), |r, c| v_t[(keep[c], r)].conj())
}

/// Reduced row echelon form with zero rows dropped; ker is unchanged.
pub fn row_reduce(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let tol = RANK_TOL * scale.max(f64::MIN_POSITIVE);
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        let (best, best_abs) = (pivot_row..rows)
            .map(|r| (r, a[(r, col)].norm()))
            .fold((pivot_row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_abs <= tol {
            for r in pivot_row..rows {
                a[(r, col)] = zero();
            }
            continue;
        }
        a.swap_rows(pivot_row, best);
        let p = a[(pivot_row, col)];
        for c in 0..cols {
            a[(pivot_row, c)] /= p;
        }
        for r in 0..rows {
            if r != pivot_row {
                let f = a[(r, col)];
                if f != zero() {
                    for c in 0..cols {
                        let v = a[(pivot_row, c)];
                        a[(r, c)] -= f * v;
                    }
                }
            }
        }
        pivot_row += 1;
    }
    for v in a.iter_mut() {
        if v.re.abs() <= tol {
            v.re = 0.0;
        }
        if v.im.abs() <= tol {
            v.im = 0.0;
        }
    }
    a.rows(0, pivot_row).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn null_space_of_a_rank_one_row() {
        let m = DMatrix::from_row_slice(1, 2, &[c(1.0), c(-1.0)]);
        let n = null_space(&m);
        assert_eq!(n.ncols(), 1);
        assert!((n[(0, 0)] - n[(1, 0)]).norm() < 1e-12);
        assert!(((&m * &n)[(0, 0)]).norm() < 1e-12);
    }

    #[test]
    fn rank_and_reduction() {
        let m = DMatrix::from_row_slice(3, 3, &[c(1.0), c(2.0), c(3.0), c(2.0), c(4.0), c(6.0), c(0.0), c(1.0), c(1.0)]);
        assert_eq!(rank(&m), 2);
        let r = row_reduce(&m);
        assert_eq!(r.nrows(), 2);
        assert_eq!(r[(0, 0)], c(1.0));
        assert_eq!(null_space(&r).ncols(), 1);
        assert_eq!(null_space(&DMatrix::zeros(0, 3)).ncols(), 3);
        assert_eq!(orthonormal_columns(&m).ncols(), 2);
    }
}
