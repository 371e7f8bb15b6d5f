//! Construction and verification of symmetric informationally complete
//! reference measurements.
//!
//! A unit vector (the fiducial) generates N = d^2 rank-1 projectors through
//! the discrete displacement group; when the squared overlaps with every
//! non-identity displacement equal 1/(d+1), the rescaled projectors form a
//! symmetric informationally complete POVM. Fiducials are found numerically
//! by seeded multistart quasi-Newton minimization of the squared overlap
//! deviations.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, Complex64, ComplexMatrix, ValidationReport};
use crate::optim;

/// Smallest supported system dimension.
pub const MIN_DIM: usize = 2;
/// Largest supported system dimension (N = 256 outcomes).
pub const MAX_DIM: usize = 16;

/// Unit-norm generating vector for a reference measurement.
///
/// Stored in a canonical gauge: the first amplitude of non-negligible
/// modulus is real and non-negative, so file round-trips are stable.
#[derive(Debug, Clone, PartialEq)]
pub struct Fiducial {
    d: usize,
    amplitudes: Vec<Complex64>,
}

const NORM_TOL: f64 = 1e-12;
const GAUGE_EPS: f64 = 1e-12;

impl Fiducial {
    /// Validating constructor: requires unit norm within 1e-12 and the
    /// canonical gauge (first non-negligible amplitude real non-negative).
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let d = amplitudes.len();
        if !(MIN_DIM..=MAX_DIM).contains(&d) {
            return Err(Error::UnsupportedDimension {
                d,
                min: MIN_DIM,
                max: MAX_DIM,
            });
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidFiducial("non-finite amplitude".into()));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidFiducial(format!(
                "squared norm {norm_sq} deviates from 1 beyond {NORM_TOL:.1e}"
            )));
        }
        if let Some(first) = amplitudes.iter().find(|a| a.norm() > GAUGE_EPS) {
            if first.im.abs() > 1e-9 * first.norm() || first.re < 0.0 {
                return Err(Error::InvalidFiducial(
                    "not in canonical gauge: first nonzero amplitude must be real non-negative"
                        .into(),
                ));
            }
        }
        Ok(Fiducial { d, amplitudes })
    }

    /// Normalizes and gauges an arbitrary nonzero vector.
    pub fn canonical(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(Error::InvalidFiducial("zero or non-finite vector".into()));
        }
        let mut amps: Vec<Complex64> = amplitudes.iter().map(|a| a / norm).collect();
        if let Some(k0) = amps.iter().position(|a| a.norm() > GAUGE_EPS) {
            let phase = Complex64::from_polar(1.0, -amps[k0].arg());
            let modulus = amps[k0].norm();
            for a in amps.iter_mut() {
                *a *= phase;
            }
            amps[k0] = Complex64::new(modulus, 0.0);
        }
        Fiducial::new(amps)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// The d = 2 fiducial with |psi_0|^2 = (3+sqrt(3))/6, |psi_1|^2 =
    /// (3-sqrt(3))/6 and relative phase pi/4, confirmed by the overlap
    /// check in this module's tests.
    pub fn qubit() -> Fiducial {
        let a0 = ((3.0 + 3.0f64.sqrt()) / 6.0).sqrt();
        let a1 = ((3.0 - 3.0f64.sqrt()) / 6.0).sqrt();
        Fiducial::canonical(vec![
            Complex64::new(a0, 0.0),
            Complex64::from_polar(a1, PI / 4.0),
        ])
        .expect("built-in fiducial is well-formed")
    }
}

/// A reference measurement generated from a fiducial: displacement
/// operators, rank-1 projectors, effects, and the recorded worst overlap
/// deviation. Immutable after construction.
#[derive(Debug, Clone)]
pub struct SicSystem {
    d: usize,
    fiducial: Fiducial,
    displacements: Vec<ComplexMatrix>,
    projectors: Vec<ComplexMatrix>,
    effects: Vec<ComplexMatrix>,
    sic_error: f64,
}

impl SicSystem {
    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of outcomes, d^2.
    pub fn n(&self) -> usize {
        self.d * self.d
    }

    pub fn fiducial(&self) -> &Fiducial {
        &self.fiducial
    }

    pub fn displacements(&self) -> &[ComplexMatrix] {
        &self.displacements
    }

    /// Rank-1 projectors onto the orbit of the fiducial.
    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    /// POVM effects, each a projector divided by d.
    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    /// Worst deviation of tr(E_i E_j) from the constant-overlap target,
    /// recorded at construction time.
    pub fn sic_error(&self) -> f64 {
        self.sic_error
    }
}

/// Sparse form of one displacement operator: a cyclic shift by `shift`
/// combined with per-column phases, i.e. D[(k+shift) mod d, k] = phase[k].
#[derive(Debug, Clone)]
struct Displacement {
    shift: usize,
    phases: Vec<Complex64>,
}

impl Displacement {
    fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        let d = v.len();
        for k in 0..d {
            out[(k + self.shift) % d] = self.phases[k] * v[k];
        }
    }

    fn apply_adjoint(&self, v: &[Complex64], out: &mut [Complex64]) {
        let d = v.len();
        for k in 0..d {
            out[k] = self.phases[k].conj() * v[(k + self.shift) % d];
        }
    }

    fn dense(&self, d: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(d, d);
        for k in 0..d {
            m[((k + self.shift) % d, k)] = self.phases[k];
        }
        m
    }
}

/// All N = d^2 displacement operators in sparse form, indexed by
/// `a * d + b` where `a` is the shift power and `b` the clock power.
fn displacement_table(d: usize) -> Result<Vec<Displacement>> {
    if !(MIN_DIM..=MAX_DIM).contains(&d) {
        return Err(Error::UnsupportedDimension {
            d,
            min: MIN_DIM,
            max: MAX_DIM,
        });
    }
    let df = d as f64;
    let mut table = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            // Overall phase tau^{ab} with tau = -exp(i pi / d); the clock
            // part contributes omega^{kb} on column k. Exponents are
            // reduced modulo the phase period before evaluating trig.
            let tau_pow = ((a * b) % (2 * d)) as f64;
            let tau_phase = Complex64::from_polar(1.0, PI * (df + 1.0) * tau_pow / df);
            let phases = (0..d)
                .map(|k| {
                    let w = ((k * b) % d) as f64;
                    tau_phase * Complex64::from_polar(1.0, 2.0 * PI * w / df)
                })
                .collect();
            table.push(Displacement { shift: a, phases });
        }
    }
    Ok(table)
}

/// The N = d^2 displacement operators D_(a,b) = tau^{ab} X^a Z^b as dense
/// unitary matrices, indexed by a*d + b.
pub fn wh_displacements(d: usize) -> Result<Vec<ComplexMatrix>> {
    Ok(displacement_table(d)?
        .iter()
        .map(|disp| disp.dense(d))
        .collect())
}

/// Evaluates the fiducial objective and its gradient on interleaved
/// (re, im) coordinates. Owns the sparse displacement table so repeated
/// evaluations avoid rebuilding it.
struct FrameObjective {
    d: usize,
    /// Non-identity displacements only.
    displacements: Vec<Displacement>,
    target: f64,
}

impl FrameObjective {
    fn new(d: usize) -> Result<Self> {
        let displacements = displacement_table(d)?.split_off(1);
        Ok(FrameObjective {
            d,
            displacements,
            target: 1.0 / (d as f64 + 1.0),
        })
    }

    fn unpack(&self, x: &[f64]) -> Vec<Complex64> {
        (0..self.d)
            .map(|k| Complex64::new(x[2 * k], x[2 * k + 1]))
            .collect()
    }

    /// Sum over non-identity displacements of (|<psi|D psi>|^2 - t)^2,
    /// with psi = v / |v| folded into the expression so the objective is
    /// scale invariant.
    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let v = self.unpack(x);
        let d = self.d;
        let n2: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        let mut dv = vec![Complex64::ZERO; d];
        let mut dadj_v = vec![Complex64::ZERO; d];
        let mut gbar = vec![Complex64::ZERO; d]; // df/d(conj v)
        let mut f = 0.0;
        for disp in &self.displacements {
            disp.apply(&v, &mut dv);
            disp.apply_adjoint(&v, &mut dadj_v);
            let a: Complex64 = v.iter().zip(&dv).map(|(vi, di)| vi.conj() * di).sum();
            let g = a.norm_sqr() / (n2 * n2);
            let r = g - self.target;
            f += r * r;
            let coeff = 2.0 * r / (n2 * n2);
            let abar = a.conj();
            for k in 0..d {
                gbar[k] += coeff * (abar * dv[k] + a * dadj_v[k] - v[k].scale(2.0 * g * n2));
            }
        }
        for k in 0..d {
            grad[2 * k] = 2.0 * gbar[k].re;
            grad[2 * k + 1] = 2.0 * gbar[k].im;
        }
        f
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut scratch = vec![0.0; x.len()];
        self.value_grad(x, &mut scratch)
    }
}

fn renormalize(x: &mut [f64]) {
    let norm: f64 = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm > 0.0 {
        for a in x.iter_mut() {
            *a /= norm;
        }
    }
}

/// Sum over non-identity displacements of the squared deviation of the
/// squared overlap |<psi|D psi>|^2 from 1/(d+1). Zero exactly when the
/// orbit of the fiducial is symmetric informationally complete.
pub fn frame_potential_error(fiducial: &Fiducial) -> f64 {
    let objective = FrameObjective::new(fiducial.d()).expect("fiducial dimension is in range");
    let x: Vec<f64> = fiducial
        .amplitudes()
        .iter()
        .flat_map(|a| [a.re, a.im])
        .collect();
    objective.value(&x)
}

/// Searches for a fiducial whose frame-potential error is at most `tol`.
///
/// Each restart draws a fresh start vector from a ChaCha12 stream seeded
/// with `seed + restart_index` and runs a quasi-Newton descent with norm
/// re-projection after every step. All restarts are evaluated and merged
/// by (error, restart-index) ordering, so the result is deterministic for
/// fixed `(d, seed, restarts)` and independent of evaluation order.
pub fn find_fiducial(d: usize, seed: u64, restarts: usize, tol: f64) -> Result<Fiducial> {
    if restarts == 0 {
        return Err(Error::OutOfRange("restarts must be at least 1".into()));
    }
    let objective = FrameObjective::new(d)?;
    let opts = optim::Options {
        // Push far below any verification tolerance; the overlap deviation
        // scales like the square root of the objective.
        f_target: 1e-28,
        ..optim::Options::default()
    };

    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    for r in 0..restarts {
        let mut rng = ChaCha12Rng::seed_from_u64(seed.wrapping_add(r as u64));
        let mut x0 = vec![0.0; 2 * d];
        for xi in x0.iter_mut() {
            *xi = StandardNormal.sample(&mut rng);
        }
        renormalize(&mut x0);
        let result = optim::minimize(
            |x, g| objective.value_grad(x, g),
            renormalize,
            &x0,
            &opts,
        );
        let better = match &best {
            None => true,
            Some((f, _, _)) => result.f < *f,
        };
        if better {
            best = Some((result.f, r, result.x));
        }
    }

    let (error, _, x) = best.expect("at least one restart");
    if error <= tol {
        Fiducial::canonical(
            x.chunks_exact(2)
                .map(|c| Complex64::new(c[0], c[1]))
                .collect(),
        )
    } else {
        Err(Error::Convergence {
            best: error,
            tol,
            restarts,
        })
    }
}

/// Builds the full reference measurement from a fiducial: projectors
/// Pi_i = D_i |psi><psi| D_i^dag, effects E_i = Pi_i / d, and the worst
/// overlap deviation recorded as `sic_error`.
pub fn build_sic(fiducial: &Fiducial) -> SicSystem {
    let d = fiducial.d();
    let table = displacement_table(d).expect("fiducial dimension is in range");
    let psi = fiducial.amplitudes();

    let mut orbit: Vec<Vec<Complex64>> = Vec::with_capacity(d * d);
    for disp in &table {
        let mut out = vec![Complex64::ZERO; d];
        disp.apply(psi, &mut out);
        orbit.push(out);
    }

    let projectors: Vec<ComplexMatrix> = orbit
        .iter()
        .map(|v| ComplexMatrix::from_fn(d, d, |i, j| v[i] * v[j].conj()))
        .collect();
    let effects: Vec<ComplexMatrix> = projectors
        .iter()
        .map(|p| p.scale(1.0 / d as f64))
        .collect();

    let sic_error = max_overlap_deviation(d, &effects);
    SicSystem {
        d,
        fiducial: fiducial.clone(),
        displacements: table.iter().map(|disp| disp.dense(d)).collect(),
        projectors,
        effects,
        sic_error,
    }
}

/// max_{i,j} |tr(E_i E_j) - (d delta_ij + 1) / (d^2 (d+1))|.
fn max_overlap_deviation(d: usize, effects: &[ComplexMatrix]) -> f64 {
    let df = d as f64;
    let denom = df * df * (df + 1.0);
    let mut worst = 0.0f64;
    for i in 0..effects.len() {
        for j in i..effects.len() {
            let overlap = linalg::trace_inner_product(&effects[i], &effects[j])
                .expect("effects are square and equal-sized");
            let target = if i == j { (df + 1.0) / denom } else { 1.0 / denom };
            worst = worst.max((overlap - target).abs());
        }
    }
    worst
}

/// Checks the constant-overlap condition together with POVM validity.
pub fn verify_sic(sic: &SicSystem, tol: f64) -> ValidationReport {
    let overlap = max_overlap_deviation(sic.d, &sic.effects);
    let povm = linalg::validate_povm(&sic.effects, tol)
        .expect("a built system always has well-shaped effects");
    let mut findings = vec![(
        overlap,
        format!("worst overlap deviation {overlap:.6e} exceeds {tol:.1e}"),
    )];
    findings.push((
        povm.max_violation,
        format!("effects fail POVM validity by {:.6e}", povm.max_violation),
    ));
    ValidationReport::from_findings(tol, &findings)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_displacements_are_pauli_like() {
        let disp = wh_displacements(2).unwrap();
        assert_eq!(disp.len(), 4);
        // Index 0: identity. Index 2 (a=1, b=0): the shift X.
        assert!(linalg::max_abs_diff(&disp[0], &linalg::identity(2)) < 1e-15);
        let x = ComplexMatrix::from_fn(2, 2, |i, j| {
            if i != j { Complex64::ONE } else { Complex64::ZERO }
        });
        assert!(linalg::max_abs_diff(&disp[2], &x) < 1e-15);
        // Index 1 (a=0, b=1): the clock Z.
        let z = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => Complex64::ONE,
            (1, 1) => -Complex64::ONE,
            _ => Complex64::ZERO,
        });
        assert!(linalg::max_abs_diff(&disp[1], &z) < 1e-12);
        // Index 3 (a=1, b=1): proportional to XZ.
        let xz = &x * &z;
        let ratio = disp[3][(0, 1)] / xz[(0, 1)];
        assert!((ratio.norm() - 1.0).abs() < 1e-12);
        assert!(linalg::max_abs_diff(&disp[3], &xz.scale_complex(ratio)) < 1e-12);
    }

    // nalgebra lacks a complex scalar `scale`; tiny local helper for tests.
    trait ScaleComplex {
        fn scale_complex(&self, z: Complex64) -> ComplexMatrix;
    }
    impl ScaleComplex for ComplexMatrix {
        fn scale_complex(&self, z: Complex64) -> ComplexMatrix {
            self.map(|e| e * z)
        }
    }

    #[test]
    fn displacements_are_unitary() {
        for d in [2, 3, 5, 8] {
            for u in wh_displacements(d).unwrap() {
                let prod = &u * u.adjoint();
                assert!(
                    linalg::max_abs_diff(&prod, &linalg::identity(d)) <= 1e-12,
                    "d = {d}"
                );
            }
        }
    }

    #[test]
    fn shift_displacement_is_cycle_permutation() {
        let disp = wh_displacements(3).unwrap();
        // Index (a=1, b=0) -> 1*3 + 0 = 3.
        let d10 = &disp[3];
        let expect = ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == (j + 1) % 3 { Complex64::ONE } else { Complex64::ZERO }
        });
        assert!(linalg::max_abs_diff(d10, &expect) < 1e-15);
    }

    #[test]
    fn dimension_range_is_enforced() {
        assert!(matches!(
            wh_displacements(1),
            Err(Error::UnsupportedDimension { .. })
        ));
        assert!(matches!(
            wh_displacements(17),
            Err(Error::UnsupportedDimension { .. })
        ));
    }

    #[test]
    fn builtin_qubit_fiducial_has_constant_overlaps() {
        // Direct evaluation of every |<psi|D_p psi>|^2 against 1/(d+1),
        // independently of frame_potential_error.
        let fid = Fiducial::qubit();
        let disp = wh_displacements(2).unwrap();
        let psi = nalgebra::DVector::from_vec(fid.amplitudes().to_vec());
        for dp in disp.iter().skip(1) {
            let overlap = psi.dotc(&(dp * &psi)).norm_sqr();
            assert!(
                (overlap - 1.0 / 3.0).abs() < 1e-14,
                "overlap {overlap} deviates from 1/3"
            );
        }
        assert!(frame_potential_error(&fid) <= 1e-12);
    }

    #[test]
    fn basis_vector_is_not_a_fiducial() {
        let basis = Fiducial::new(vec![Complex64::ONE, Complex64::ZERO]).unwrap();
        let err = frame_potential_error(&basis);
        // <psi|Z psi> = 1, so the clock term alone contributes (1 - 1/3)^2.
        assert!(err > 0.4, "err = {err}");
    }

    #[test]
    fn frame_potential_is_nonnegative() {
        use rand::Rng;
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..25 {
            let amps: Vec<Complex64> = (0..3)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let fid = Fiducial::canonical(amps).unwrap();
            assert!(frame_potential_error(&fid) >= 0.0);
        }
    }

    #[test]
    fn objective_gradient_matches_finite_differences() {
        use rand::Rng;
        let objective = FrameObjective::new(3).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..6).map(|_| rng.random::<f64>() - 0.5).collect();
        let mut grad = vec![0.0; 6];
        objective.value_grad(&x, &mut grad);
        let h = 1e-6;
        for k in 0..6 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let fd = (objective.value(&xp) - objective.value(&xm)) / (2.0 * h);
            assert!(
                (fd - grad[k]).abs() < 1e-6 * (1.0 + fd.abs()),
                "component {k}: analytic {} vs fd {fd}",
                grad[k]
            );
        }
    }

    #[test]
    fn search_reports_best_error_when_tolerance_is_unreachable() {
        // No double-precision run can reach 1e-40; the error must carry
        // the best frame-potential value found.
        match find_fiducial(2, 1, 2, 1e-40) {
            Err(Error::Convergence { best, restarts, .. }) => {
                assert!(best > 1e-40 && best < 1e-9);
                assert_eq!(restarts, 2);
            }
            other => panic!("expected convergence failure, got {other:?}"),
        }
    }

    #[test]
    fn search_is_deterministic() {
        let a = find_fiducial(2, 1, 4, 1e-10).unwrap();
        let b = find_fiducial(2, 1, 4, 1e-10).unwrap();
        assert_eq!(a.amplitudes(), b.amplitudes());
    }

    #[test]
    fn search_finds_qubit_fiducial_up_to_symmetry() {
        let found = find_fiducial(2, 1, 8, 1e-10).unwrap();
        assert!(frame_potential_error(&found) <= 1e-10);

        // The found vector must lie on the displacement orbit of the
        // built-in fiducial or of its complex conjugate (the orbit of the
        // conjugate is the other symmetric tetrahedron).
        let builtin = Fiducial::qubit();
        let disp = wh_displacements(2).unwrap();
        let f = nalgebra::DVector::from_vec(found.amplitudes().to_vec());
        let candidates = [
            nalgebra::DVector::from_vec(builtin.amplitudes().to_vec()),
            nalgebra::DVector::from_vec(
                builtin.amplitudes().iter().map(|a| a.conj()).collect(),
            ),
        ];
        let mut matched = false;
        for base in &candidates {
            for dp in &disp {
                let overlap = f.dotc(&(dp * base)).norm();
                if (overlap - 1.0).abs() < 1e-7 {
                    matched = true;
                }
            }
        }
        assert!(matched, "found fiducial not on a known symmetry orbit");
    }

    #[test]
    fn build_sums_to_identity_for_any_unit_fiducial() {
        // Group covariance makes the effects resolve the identity even for
        // a non-fiducial unit vector.
        let arbitrary = Fiducial::canonical(vec![
            Complex64::new(0.9, 0.0),
            Complex64::new(0.1, 0.3),
            Complex64::new(-0.2, 0.2),
        ])
        .unwrap();
        let sic = build_sic(&arbitrary);
        let mut sum = ComplexMatrix::zeros(3, 3);
        for e in sic.effects() {
            sum += e;
        }
        assert!(linalg::max_abs_diff(&sum, &linalg::identity(3)) < 1e-12);
        for p in sic.projectors() {
            assert!((p.trace().re - 1.0).abs() < 1e-12);
            assert!(p.trace().im.abs() < 1e-14);
        }
    }

    #[test]
    fn built_qubit_system_verifies() {
        let sic = build_sic(&Fiducial::qubit());
        assert!(sic.sic_error() <= 1e-10);
        assert!(verify_sic(&sic, 1e-9).ok);

        // Effects are the projectors divided by d.
        for (e, p) in sic.effects().iter().zip(sic.projectors()) {
            assert!(linalg::max_abs_diff(&e.scale(2.0), p) < 1e-15);
        }

        // Diagonal overlaps: setting i = j in the constant-overlap condition
        // gives tr(E_i E_i) = (d+1)/(d^2(d+1)) = 1/d^2, so 1/4 at d = 2.
        let e0 = &sic.effects()[0];
        let diag = linalg::trace_inner_product(e0, e0).unwrap();
        assert!((diag - 0.25).abs() < 1e-12);
    }

    #[test]
    fn non_fiducial_system_fails_verification() {
        let basis = Fiducial::new(vec![Complex64::ONE, Complex64::ZERO]).unwrap();
        let sic = build_sic(&basis);
        assert!(!verify_sic(&sic, 1e-9).ok);
    }

    #[test]
    fn gram_matrix_of_projectors_has_full_rank() {
        // Informational completeness: the N x N Gram of the projectors has
        // all singular values above 1e-8.
        let sic = build_sic(&Fiducial::qubit());
        let n = sic.n();
        let gram = nalgebra::DMatrix::<f64>::from_fn(n, n, |i, j| {
            linalg::trace_inner_product(&sic.projectors()[i], &sic.projectors()[j]).unwrap()
        });
        let svals = gram.singular_values();
        assert_eq!(svals.len(), n);
        assert!(svals.iter().all(|s| *s > 1e-8));
    }

    #[test]
    fn reference_state_symmetry_of_overlaps() {
        // tr(Pi_i E_j) = (1 - N c) delta_ij + c with c = 1/(d(d+1)).
        let sic = build_sic(&Fiducial::qubit());
        let c = 1.0 / (2.0 * 3.0);
        let n = sic.n() as f64;
        for i in 0..sic.n() {
            for j in 0..sic.n() {
                let overlap =
                    linalg::trace_inner_product(&sic.projectors()[i], &sic.effects()[j]).unwrap();
                let expect = if i == j { (1.0 - n * c) + c } else { c };
                assert!((overlap - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn canonical_gauge_round_trip() {
        let fid = Fiducial::canonical(vec![
            Complex64::new(0.0, 0.7),
            Complex64::new(0.4, -0.2),
        ])
        .unwrap();
        // First amplitude is now real and non-negative.
        assert!(fid.amplitudes()[0].im == 0.0);
        assert!(fid.amplitudes()[0].re > 0.0);
        // Re-validating the canonical form succeeds.
        assert!(Fiducial::new(fid.amplitudes().to_vec()).is_ok());
    }
}
