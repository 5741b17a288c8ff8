use nalgebra::DMatrix;
use num::complex::Complex64;

use crate::scalar::{ExactScalar, Sign};

/// Exact positive-semidefiniteness of a Hermitian matrix over Q(i, sqrt2),
/// by symmetric elimination with exact pivot signs.
///
/// A zero pivot is admissible only when its whole row (hence column, by
/// Hermiticity) is zero. Requires a Hermitian input; the caller checks that.
pub(crate) fn exact_psd(entries: &[ExactScalar], n: usize) -> bool {
    let mut m = entries.to_vec();
    for k in 0..n {
        let pivot = m[k * n + k].clone();
        if !pivot.is_real() {
            return false;
        }
        match pivot.real_sign().expect("pivot is real") {
            Sign::Negative => return false,
            Sign::Zero => {
                if (k + 1..n).any(|j| !m[k * n + j].is_zero()) {
                    return false;
                }
            }
            Sign::Positive => {
                let inv = pivot.checked_inv().expect("positive pivot is invertible");
                for i in k + 1..n {
                    let li = &m[i * n + k] * &inv;
                    for j in k + 1..n {
                        let delta = &li * &m[j * n + k].conj();
                        m[i * n + j] = &m[i * n + j] - &delta;
                    }
                }
            }
        }
    }
    true
}

/// Float positive-semidefiniteness: smallest eigenvalue of the Hermitian
/// part must stay above `-eps_abs`.
pub(crate) fn float_psd(entries: &[Complex64], n: usize, eps_abs: f64) -> bool {
    let h = DMatrix::from_fn(n, n, |i, j| {
        0.5 * (entries[i * n + j] + entries[j * n + i].conj())
    });
    let eigenvalues = h.symmetric_eigenvalues();
    eigenvalues.iter().all(|&ev| ev >= -eps_abs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(n: i64, d: i64) -> ExactScalar {
        ExactScalar::from_ratio(n, d)
    }

    #[test]
    fn exact_psd_on_small_matrices() {
        // identity
        let id = vec![ex(1, 1), ex(0, 1), ex(0, 1), ex(1, 1)];
        assert!(exact_psd(&id, 2));

        // diag(2, -1)
        let neg = vec![ex(2, 1), ex(0, 1), ex(0, 1), ex(-1, 1)];
        assert!(!exact_psd(&neg, 2));

        // rank-one [[1,1],[1,1]]
        let rank1 = vec![ex(1, 1), ex(1, 1), ex(1, 1), ex(1, 1)];
        assert!(exact_psd(&rank1, 2));

        // [[1,2],[2,1]] has a negative eigenvalue
        let indef = vec![ex(1, 1), ex(2, 1), ex(2, 1), ex(1, 1)];
        assert!(!exact_psd(&indef, 2));

        // zero pivot with nonzero row: [[0,1],[1,0]]
        let hollow = vec![ex(0, 1), ex(1, 1), ex(1, 1), ex(0, 1)];
        assert!(!exact_psd(&hollow, 2));

        // zero pivot with zero row: diag(0, 1)
        let ok0 = vec![ex(0, 1), ex(0, 1), ex(0, 1), ex(1, 1)];
        assert!(exact_psd(&ok0, 2));
    }

    #[test]
    fn exact_psd_handles_complex_hermitian() {
        // [[1, -i],[i, 1]] is PSD (eigenvalues 0 and 2)
        let i = ExactScalar::i();
        let m = vec![ex(1, 1), -&i, i.clone(), ex(1, 1)];
        assert!(exact_psd(&m, 2));
        // [[1, -2i],[2i, 1]] is indefinite
        let two_i = &ex(2, 1) * &i;
        let m2 = vec![ex(1, 1), -&two_i, two_i.clone(), ex(1, 1)];
        assert!(!exact_psd(&m2, 2));
    }

    #[test]
    fn float_psd_matches_exact_on_samples() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let m = vec![c(1.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(1.0, 0.0)];
        assert!(float_psd(&m, 2, 1e-9));
        let m2 = vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)];
        assert!(!float_psd(&m2, 2, 1e-9));
    }
}
