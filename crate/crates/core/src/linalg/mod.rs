//! Dense complex matrices and the spectral kernels built on an LDL^H definiteness test.

mod band;
mod eigen;
mod matrix;

use thiserror::Error;

pub use band::{lower_bandwidth, Definiteness, HermitianBand, ShiftedGram};
pub use eigen::{
    characteristic_polynomial, complex_eigenvalues_small, hermitian_eigenvalues, hermitian_eigenvalues_with,
    polynomial_roots, relative_residual, MAX_SMALL_EIG,
};
pub use matrix::{conj_transpose, gram, CMatrix, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not Hermitian (max entrywise defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix dimension {dim} exceeds the limit {max}")]
    TooLarge { dim: usize, max: usize },
    #[error("iteration did not converge within {iterations} steps")]
    NonConvergence { iterations: usize },
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("expected {expected} entries, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}

/// Maximum allowed entrywise `|M - M^H|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianCheck {
    pub tolerance: f64,
}

impl Default for HermitianCheck {
    fn default() -> Self {
        Self { tolerance: 1e-12 }
    }
}

/// Numerical tolerances shared by the kernels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub hermitian: HermitianCheck,
    /// Pivots within `pivot_rel * max|diag|` of zero count as zero.
    pub pivot_rel: f64,
    /// Absolute bisection tolerance for singular values, applied to both `s` and `s^2`.
    pub sv: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: HermitianCheck::default(),
            pivot_rel: 1e-13,
            sv: 1e-12,
        }
    }
}

/// Whether `h - shift I` is positive semidefinite.
pub fn is_psd(h: &CMatrix, shift: f64) -> Result<bool, LinalgError> {
    is_psd_with(h, shift, &Tolerances::default())
}

pub fn is_psd_with(h: &CMatrix, shift: f64, tol: &Tolerances) -> Result<bool, LinalgError> {
    let band = HermitianBand::from_matrix(h, tol)?;
    Ok(band.definiteness(shift, tol.pivot_rel).is_psd())
}

/// Smallest singular value of a matrix with at least one column.
///
/// Wide matrices (`rows < cols`) have a nontrivial kernel and return 0.
pub fn smallest_singular_value(m: &CMatrix) -> f64 {
    smallest_singular_value_with(m, &Tolerances::default())
}

pub fn smallest_singular_value_with(m: &CMatrix, tol: &Tolerances) -> f64 {
    let g = m.gram();
    let band = HermitianBand::from_matrix(&g, tol).expect("gram output is square and Hermitian");
    band.sqrt_min_eigenvalue(m.frobenius_norm(), tol)
}

/// `μ(m) = s_min(m)` for square `m`.
pub fn mu_square(m: &CMatrix) -> Result<f64, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(smallest_singular_value(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn real(rows: &[&[f64]]) -> CMatrix {
        CMatrix::from_real_rows(rows).unwrap()
    }

    fn shift_block(n: usize) -> CMatrix {
        let mut v = CMatrix::zeros(n, n);
        for i in 1..n {
            v[(i, i - 1)] = c(1.0, 0.0);
        }
        v
    }

    fn laplacian_b(n: usize) -> CMatrix {
        let mut b = CMatrix::zeros(n + 1, n);
        for j in 0..n {
            b[(j, j)] = c(1.0, 0.0);
            b[(j + 1, j)] = c(-1.0, 0.0);
        }
        b
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            CMatrix::from_vec(2, 2, vec![c(0.0, 0.0); 3]),
            Err(LinalgError::Shape { .. })
        ));
        assert!(matches!(
            CMatrix::from_vec(1, 2, vec![c(0.0, 0.0), c(f64::NAN, 0.0)]),
            Err(LinalgError::NonFinite { row: 0, col: 1 })
        ));
    }

    #[test]
    fn conj_transpose_examples() {
        let m = CMatrix::scalar(c(2.0, 3.0));
        assert_eq!(conj_transpose(&m), CMatrix::scalar(c(2.0, -3.0)));
        assert_eq!(conj_transpose(&CMatrix::identity(3)), CMatrix::identity(3));
        let z = conj_transpose(&CMatrix::zeros(2, 3));
        assert_eq!((z.rows(), z.cols()), (3, 2));
        assert_eq!(z, CMatrix::zeros(3, 2));
    }

    #[test]
    fn gram_examples() {
        assert_eq!(gram(&CMatrix::identity(4)), CMatrix::identity(4));
        let d = 0.3;
        let b = real(&[&[d, 0.0], &[0.0, 0.0], &[1.0, 1.0], &[0.0, d]]);
        let g = gram(&b);
        // Hand product: [[δ²+1, 1], [1, δ²+1]]
        assert_abs_diff_eq!(g[(0, 0)].re, 1.09, epsilon = 1e-15);
        assert_abs_diff_eq!(g[(0, 1)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g[(1, 0)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g[(1, 1)].re, 1.09, epsilon = 1e-15);
        assert_eq!(
            gram(&shift_block(3)),
            CMatrix::diag(&[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
        );
    }

    #[test]
    fn gram_of_complex_matrix_matches_product() {
        let m = CMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(0.0, -1.0), c(0.5, 0.0)],
            vec![c(0.0, 0.0), c(3.0, 1.0), c(-2.0, 0.5)],
        ])
        .unwrap();
        let direct = m.conj_transpose().matmul(&m).unwrap();
        let g = m.gram();
        assert!(g.sub(&direct).unwrap().max_abs() < 1e-14);
        assert_eq!(g.hermitian_defect(), 0.0);
    }

    #[test]
    fn is_psd_examples() {
        let i2 = CMatrix::identity(2);
        assert!(is_psd(&i2, 1.0).unwrap());
        assert!(!is_psd(&i2, 1.0 + 1e-6).unwrap());
        // Smallest Laplacian eigenvalue for n = 3 is 4 sin^2(π/8) = 2 - √2.
        let g = gram(&laplacian_b(3));
        assert!(is_psd(&g, 2.0 - 2f64.sqrt() - 1e-9).unwrap());
        assert!(!is_psd(&g, 2.0 - 2f64.sqrt() + 1e-9).unwrap());
    }

    #[test]
    fn is_psd_rejects_non_hermitian() {
        let m = real(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(is_psd(&m, 0.0), Err(LinalgError::NotHermitian { .. })));
        let r = CMatrix::zeros(2, 3);
        assert!(matches!(is_psd(&r, 0.0), Err(LinalgError::NotSquare { .. })));
    }

    #[test]
    fn is_psd_handles_singular_and_indefinite() {
        // Rank one [[1,1],[1,1]]: semidefinite at 0, indefinite for any positive shift.
        let m = real(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(is_psd(&m, 0.0).unwrap());
        assert!(!is_psd(&m, 1e-6).unwrap());
        // Zero leading pivot with nonzero coupling.
        let m = real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(!is_psd(&m, 0.0).unwrap());
        assert!(is_psd(&CMatrix::zeros(3, 3), 0.0).unwrap());
    }

    #[test]
    fn smallest_singular_value_examples() {
        assert_abs_diff_eq!(smallest_singular_value(&CMatrix::identity(5)), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(smallest_singular_value(&shift_block(3)), 0.0, epsilon = 1e-12);
        // V_2^+ - 0.5 I_2^+
        let m = real(&[&[0.0, 0.0], &[-0.5, 0.0], &[1.0, -0.5], &[0.0, 1.0]]);
        let expect = (1.0 + 0.25 - 2.0 * 0.5 * (PI / 3.0).cos()).sqrt();
        assert_abs_diff_eq!(smallest_singular_value(&m), expect, epsilon = 1e-12);
        assert_abs_diff_eq!(expect, 0.8660254037844386, epsilon = 1e-15);
    }

    #[test]
    fn wide_matrix_has_zero_lower_norm() {
        let m = real(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        assert_eq!(smallest_singular_value(&m), 0.0);
    }

    #[test]
    fn mu_square_examples() {
        assert_abs_diff_eq!(mu_square(&CMatrix::identity(3)).unwrap(), 1.0, epsilon = 1e-12);
        let d = CMatrix::diag(&[c(2.0, 0.0), c(0.5, 0.0)]);
        assert_abs_diff_eq!(mu_square(&d).unwrap(), 0.5, epsilon = 1e-12);
        let s = real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_abs_diff_eq!(mu_square(&s).unwrap(), 1.0, epsilon = 1e-12);
        assert!(matches!(
            mu_square(&CMatrix::zeros(2, 3)),
            Err(LinalgError::NotSquare { .. })
        ));
    }

    #[test]
    fn hermitian_eigenvalue_examples() {
        let d = CMatrix::diag(&[c(3.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(hermitian_eigenvalues(&d).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(hermitian_eigenvalues(&CMatrix::scalar(c(5.0, 0.0))).unwrap(), vec![5.0]);
        let ev = hermitian_eigenvalues(&gram(&laplacian_b(4))).unwrap();
        for (j, v) in ev.iter().enumerate() {
            let expect = 4.0 * (((j + 1) as f64) * PI / 10.0).sin().powi(2);
            assert_abs_diff_eq!(*v, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn hermitian_eigenvalues_complex_2x2() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let m = CMatrix::from_rows(&[vec![c(2.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(2.0, 0.0)]]).unwrap();
        let ev = hermitian_eigenvalues(&m).unwrap();
        assert_abs_diff_eq!(ev[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[1], 3.0, epsilon = 1e-14);
        assert!(matches!(
            hermitian_eigenvalues(&real(&[&[0.0, 1.0], &[0.0, 0.0]])),
            Err(LinalgError::NotHermitian { .. })
        ));
    }

    #[test]
    fn complex_eigenvalue_examples() {
        let d = CMatrix::diag(&[c(1.0, 1.0), c(2.0, 0.0)]);
        let ev = complex_eigenvalues_small(&d).unwrap();
        assert!((ev[0] - c(1.0, 1.0)).norm() < 1e-12);
        assert!((ev[1] - c(2.0, 0.0)).norm() < 1e-12);
        let s = real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let ev = complex_eigenvalues_small(&s).unwrap();
        assert!((ev[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((ev[1] - c(1.0, 0.0)).norm() < 1e-12);
        let ev = complex_eigenvalues_small(&CMatrix::scalar(c(0.0, 1.0))).unwrap();
        assert_eq!(ev, vec![c(0.0, 1.0)]);
    }

    #[test]
    fn complex_eigenvalues_limits() {
        assert!(matches!(
            complex_eigenvalues_small(&CMatrix::identity(17)),
            Err(LinalgError::TooLarge { dim: 17, max: 16 })
        ));
        let ev = complex_eigenvalues_small(&CMatrix::identity(3)).unwrap();
        for z in ev {
            assert!((z - c(1.0, 0.0)).norm() < 1e-5);
        }
        let nilpotent = real(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
        assert_eq!(complex_eigenvalues_small(&nilpotent).unwrap(), vec![c(0.0, 0.0); 3]);
        let roots = polynomial_roots(&[c(0.0, 0.0), c(-4.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let mut re: Vec<f64> = roots.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        for (a, b) in re.iter().zip([-2.0, 0.0, 2.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn characteristic_polynomial_of_companion() {
        // Companion of x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let m = real(&[&[0.0, 0.0, 6.0], &[1.0, 0.0, -11.0], &[0.0, 1.0, 6.0]]);
        let p = characteristic_polynomial(&m).unwrap();
        let expect = [-6.0, 11.0, -6.0, 1.0];
        for (a, b) in p.iter().zip(expect) {
            assert_abs_diff_eq!(a.re, b, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-12);
        }
        let ev = complex_eigenvalues_small(&m).unwrap();
        for (z, e) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert!((z - c(e, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn shifted_gram_matches_direct() {
        let m = CMatrix::from_rows(&[
            vec![c(0.3, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.5), c(0.2, 0.0), c(0.0, 0.0)],
            vec![c(0.7, 0.0), c(-1.0, 0.0), c(2.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, -1.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.4, 0.0)],
        ])
        .unwrap();
        let sg = ShiftedGram::new(&m, 1).unwrap();
        let tol = Tolerances::default();
        for lambda in [c(0.0, 0.0), c(0.5, -0.25), c(-1.0, 2.0)] {
            let direct = smallest_singular_value(&m.shift_diagonal(lambda, 1));
            assert_abs_diff_eq!(sg.lower_norm(lambda, &tol), direct, epsilon = 1e-11);
            assert!(sg.lower_norm_at_most(lambda, direct + 1e-8, &tol));
            assert!(!sg.lower_norm_at_most(lambda, direct - 1e-8, &tol));
        }
    }
}
