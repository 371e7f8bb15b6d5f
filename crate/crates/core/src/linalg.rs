//! Minimal dense complex-matrix layer: Hermitian checks, eigenvalue-based
//! positivity tests, trace inner products, and operator validation.
//!
//! All operators in this crate are square matrices of `Complex64` entries.
//! Eigenvalue computations go through nalgebra's Hermitian eigensolver; only
//! the extreme eigenvalues matter to the validation contracts.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

pub type Complex64 = num_complex::Complex<f64>;
pub type ComplexMatrix = DMatrix<Complex64>;

/// Default entrywise tolerance for Hermiticity and validity checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Outcome of a validation check.
///
/// `ok` holds exactly when `max_violation` is within the tolerance supplied
/// to the operation that produced the report.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub max_violation: f64,
    pub messages: Vec<String>,
}

impl ValidationReport {
    /// Builds a report from a list of `(violation, description)` findings.
    /// Messages are kept for findings that exceed `tol`.
    pub fn from_findings(tol: f64, findings: &[(f64, String)]) -> Self {
        let max_violation = findings.iter().map(|f| f.0).fold(0.0, f64::max);
        let messages = findings
            .iter()
            .filter(|(v, _)| *v > tol)
            .map(|(_, m)| m.clone())
            .collect();
        ValidationReport {
            ok: max_violation <= tol,
            max_violation,
            messages,
        }
    }
}

/// n-by-n identity operator.
pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// Largest entrywise deviation between `a` and its conjugate transpose.
pub fn hermiticity_violation(a: &ComplexMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let dev = (a[(i, j)] - a[(j, i)].conj()).norm();
            worst = worst.max(dev);
        }
    }
    worst
}

/// Largest entrywise absolute difference between two same-shaped matrices.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn require_square(a: &ComplexMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

/// Real part of tr(a . b), the trace pairing between two Hermitian operators.
///
/// Computed as an element-wise sum so no intermediate product matrix is
/// allocated. Errors on non-square or mismatched inputs.
pub fn trace_inner_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let n = require_square(a)?;
    let m = require_square(b)?;
    if n != m {
        return Err(Error::ShapeMismatch(format!(
            "trace pairing needs equal sizes, got {n}x{n} and {m}x{m}"
        )));
    }
    // tr(ab) = sum_ij a[i,j] b[j,i]; only the real part is wanted.
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = a[(i, j)];
            let y = b[(j, i)];
            sum += x.re * y.re - x.im * y.im;
        }
    }
    Ok(sum)
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// The input is symmetrized as (a + a†)/2 first so that tiny Hermiticity
/// violations cannot poison the solver.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> DVector<f64> {
    let sym = (a + a.adjoint()).scale(0.5);
    let mut vals = sym.symmetric_eigenvalues();
    vals.as_mut_slice()
        .sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    vals
}

/// Full eigendecomposition of a Hermitian matrix: `(eigenvalues, eigenvectors)`
/// with eigenvectors as columns, matching the eigenvalue order.
pub fn hermitian_eigen(a: &ComplexMatrix) -> (DVector<f64>, ComplexMatrix) {
    let sym = (a + a.adjoint()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(sym);
    (eig.eigenvalues, eig.eigenvectors)
}

/// Positive-semidefiniteness check via the minimum eigenvalue.
///
/// `ok` iff the minimum eigenvalue is at least `-tol`; `max_violation` is
/// `max(0, -lambda_min)`. Errors if the input is not Hermitian within `tol`.
pub fn check_psd(a: &ComplexMatrix, tol: f64) -> Result<ValidationReport> {
    require_square(a)?;
    let herm = hermiticity_violation(a);
    if herm > tol {
        return Err(Error::NotHermitian {
            deviation: herm,
            tol,
        });
    }
    let lambda_min = hermitian_eigenvalues(a)[0];
    let violation = (-lambda_min).max(0.0);
    Ok(ValidationReport::from_findings(
        tol,
        &[(
            violation,
            format!("minimum eigenvalue {lambda_min:.6e} is below -{tol:.1e}"),
        )],
    ))
}

/// Checks that `rho` is a density operator: Hermitian, positive semidefinite,
/// unit trace. All findings go into the report; nothing errors.
pub fn validate_density(rho: &ComplexMatrix, tol: f64) -> ValidationReport {
    if rho.nrows() != rho.ncols() {
        return ValidationReport {
            ok: false,
            max_violation: f64::INFINITY,
            messages: vec![format!(
                "density operator must be square, got {}x{}",
                rho.nrows(),
                rho.ncols()
            )],
        };
    }
    let mut findings = Vec::new();
    let herm = hermiticity_violation(rho);
    findings.push((herm, format!("Hermiticity deviation {herm:.6e}")));
    let lambda_min = hermitian_eigenvalues(rho)[0];
    let psd = (-lambda_min).max(0.0);
    findings.push((psd, format!("minimum eigenvalue {lambda_min:.6e}")));
    let trace_dev = (rho.trace().re - 1.0).abs().max(rho.trace().im.abs());
    findings.push((trace_dev, format!("trace deviates from 1 by {trace_dev:.6e}")));
    ValidationReport::from_findings(tol, &findings)
}

/// Checks that a sequence of effects forms a POVM: every element positive
/// semidefinite within `tol` and the elements summing to the identity within
/// `tol` entrywise. Errors on an empty sequence or mismatched shapes.
pub fn validate_povm(effects: &[ComplexMatrix], tol: f64) -> Result<ValidationReport> {
    if effects.is_empty() {
        return Err(Error::InvalidPovm("empty effect sequence".into()));
    }
    let n = require_square(&effects[0])?;
    for (j, e) in effects.iter().enumerate() {
        if e.nrows() != n || e.ncols() != n {
            return Err(Error::ShapeMismatch(format!(
                "effect {j} is {}x{}, expected {n}x{n}",
                e.nrows(),
                e.ncols()
            )));
        }
    }
    let mut findings = Vec::new();
    let mut sum = ComplexMatrix::zeros(n, n);
    for (j, e) in effects.iter().enumerate() {
        let herm = hermiticity_violation(e);
        findings.push((herm, format!("effect {j}: Hermiticity deviation {herm:.6e}")));
        let lambda_min = hermitian_eigenvalues(e)[0];
        let psd = (-lambda_min).max(0.0);
        findings.push((psd, format!("effect {j}: minimum eigenvalue {lambda_min:.6e}")));
        sum += e;
    }
    let completeness = max_abs_diff(&sum, &identity(n));
    findings.push((
        completeness,
        format!("effects sum deviates from identity by {completeness:.6e}"),
    ));
    Ok(ValidationReport::from_findings(tol, &findings))
}
