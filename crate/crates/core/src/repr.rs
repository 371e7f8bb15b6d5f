//! Conversions between operator objects and probability objects, and the
//! probabilistic form of the Born rule.
//!
//! With a verified reference measurement in hand, a density operator becomes
//! the vector of its outcome probabilities p(i) = tr(rho E_i), and a POVM
//! becomes the column-stochastic matrix R(j|i) = tr(Pi_i D_j) of conditional
//! probabilities on the post-measurement states. The Born rule then reads
//! q = R Phi p with Phi = (d+1) I - (1/d) J; replacing Phi by the identity
//! recovers the classical Law of Total Probability.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::sic::SicSystem;

/// Simplex tolerance shared by the probability-vector types.
pub const SIMPLEX_TOL: f64 = 1e-12;

fn check_simplex(values: &[f64], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidProbability(format!("{what} is empty")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidProbability(format!(
            "{what} has a non-finite entry"
        )));
    }
    if let Some(v) = values.iter().find(|v| **v < -SIMPLEX_TOL) {
        return Err(Error::InvalidProbability(format!(
            "{what} has negative entry {v}"
        )));
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::InvalidProbability(format!(
            "{what} sums to {sum}, expected 1"
        )));
    }
    Ok(())
}

fn clamp_tiny(values: &mut [f64]) {
    for v in values.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
}

/// Probability vector over the reference-measurement outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbState {
    p: Vec<f64>,
}

impl ProbState {
    /// Validates nonnegativity (entries down to -1e-12 are clamped to 0)
    /// and unit sum within 1e-12.
    pub fn new(mut p: Vec<f64>) -> Result<Self> {
        check_simplex(&p, "probability vector")?;
        clamp_tiny(&mut p);
        Ok(ProbState { p })
    }

    pub fn uniform(n: usize) -> Self {
        ProbState {
            p: vec![1.0 / n as f64; n],
        }
    }

    /// Point mass on outcome `k` (a simplex vertex).
    pub fn delta(n: usize, k: usize) -> Self {
        let mut p = vec![0.0; n];
        p[k] = 1.0;
        ProbState { p }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }
}

/// Distribution over the outcomes of the second measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDist {
    q: Vec<f64>,
}

impl OutcomeDist {
    pub fn new(mut q: Vec<f64>) -> Result<Self> {
        check_simplex(&q, "outcome distribution")?;
        clamp_tiny(&mut q);
        Ok(OutcomeDist { q })
    }

    pub fn uniform(n: usize) -> Self {
        OutcomeDist {
            q: vec![1.0 / n as f64; n],
        }
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.q
    }
}

/// J x N matrix of conditional probabilities R(j|i); every column (fixed
/// reference outcome i) is a distribution over j.
#[derive(Debug, Clone, PartialEq)]
pub struct CondMatrix {
    m: DMatrix<f64>,
}

impl CondMatrix {
    /// Builds from row-major entries, validating the unit interval (within
    /// 1e-12, tiny excursions clamped) and column sums within 1e-12.
    pub fn new(j: usize, n: usize, row_major: Vec<f64>) -> Result<Self> {
        if row_major.len() != j * n {
            return Err(Error::InvalidConditional(format!(
                "expected {j}x{n} = {} entries, got {}",
                j * n,
                row_major.len()
            )));
        }
        Self::from_matrix(DMatrix::from_row_slice(j, n, &row_major))
    }

    pub fn from_matrix(mut m: DMatrix<f64>) -> Result<Self> {
        if m.is_empty() {
            return Err(Error::InvalidConditional("empty matrix".into()));
        }
        for v in m.iter() {
            if !v.is_finite() {
                return Err(Error::InvalidConditional("non-finite entry".into()));
            }
            if *v < -SIMPLEX_TOL || *v > 1.0 + SIMPLEX_TOL {
                return Err(Error::InvalidConditional(format!(
                    "entry {v} outside [0, 1]"
                )));
            }
        }
        for i in 0..m.ncols() {
            let sum: f64 = m.column(i).iter().sum();
            if (sum - 1.0).abs() > SIMPLEX_TOL {
                return Err(Error::InvalidConditional(format!(
                    "column {i} sums to {sum}, expected 1"
                )));
            }
        }
        for v in m.iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }
        Ok(CondMatrix { m })
    }

    /// The apparatus that outputs every one of its `j` outcomes with equal
    /// probability regardless of input.
    pub fn garbage_disposal(j: usize, n: usize) -> Self {
        CondMatrix {
            m: DMatrix::from_element(j, n, 1.0 / j as f64),
        }
    }

    /// Number of outcomes J.
    pub fn j(&self) -> usize {
        self.m.nrows()
    }

    /// Number of reference outcomes N.
    pub fn n(&self) -> usize {
        self.m.ncols()
    }

    pub fn entry(&self, j: usize, i: usize) -> f64 {
        self.m[(j, i)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// Row `j` as a plain vector (the measurement vector r_j).
    pub fn row(&self, j: usize) -> Vec<f64> {
        self.m.row(j).iter().copied().collect()
    }
}

/// Born-rule output. The entries always sum to 1, but they are a genuine
/// probability distribution only when the inputs are jointly physically
/// valid; `valid` reports whether all entries lie in the unit interval.
/// Negative entries are left in place deliberately: they are the signal the
/// coherence checker works with.
#[derive(Debug, Clone, PartialEq)]
pub struct BornOutcome {
    pub q: Vec<f64>,
    pub valid: bool,
}

impl BornOutcome {
    /// Converts into a checked distribution; errors when entries leave the
    /// unit interval.
    pub fn into_dist(self) -> Result<OutcomeDist> {
        OutcomeDist::new(self.q)
    }
}

/// The N = d^2 post-measurement states of the reference apparatus,
/// e_k(i) = delta_ik / (d+1) + 1 / (d(d+1)). Closed form; no system needed.
pub fn reference_states(d: usize) -> Vec<ProbState> {
    assert!(d >= 2, "dimension must be at least 2");
    let n = d * d;
    let df = d as f64;
    let off = 1.0 / (df * (df + 1.0));
    let diag = 1.0 / (df + 1.0) + off;
    (0..n)
        .map(|k| {
            let mut p = vec![off; n];
            p[k] = diag;
            ProbState { p }
        })
        .collect()
}

/// Phi = (d+1) I - (1/d) J on N = d^2 outcomes; the inverse of the matrix
/// whose columns are the reference states.
pub fn phi_matrix(d: usize) -> DMatrix<f64> {
    assert!(d >= 2, "dimension must be at least 2");
    let n = d * d;
    let df = d as f64;
    DMatrix::from_fn(n, n, |i, j| {
        if i == j { df + 1.0 - 1.0 / df } else { -1.0 / df }
    })
}

/// Conditional matrix of the reference measurement followed by itself;
/// column i is the reference state e_i. Applying the Born rule with this
/// matrix returns the input state unchanged.
pub fn double_pass_matrix(d: usize) -> CondMatrix {
    let states = reference_states(d);
    let n = d * d;
    let m = DMatrix::from_fn(n, n, |j, i| states[i].values()[j]);
    CondMatrix { m }
}

/// p(i) = tr(rho E_i). Requires a valid density operator and a system of
/// matching dimension.
pub fn state_to_prob(rho: &ComplexMatrix, sic: &SicSystem) -> Result<ProbState> {
    let report = linalg::validate_density(rho, linalg::DEFAULT_TOL);
    if !report.ok {
        return Err(Error::InvalidDensity(report.messages.join("; ")));
    }
    if rho.nrows() != sic.d() {
        return Err(Error::ShapeMismatch(format!(
            "density operator is {}x{}, reference system has d = {}",
            rho.nrows(),
            rho.ncols(),
            sic.d()
        )));
    }
    let p: Vec<f64> = sic
        .effects()
        .iter()
        .map(|e| linalg::trace_inner_product(rho, e))
        .collect::<Result<_>>()?;
    ProbState::new(p)
}

/// rho = sum_i ((d+1) p(i) - 1/d) Pi_i. The output has unit trace and is
/// Hermitian but need not be positive; positivity is exactly the physical-
/// validity test provided by the qplex module.
pub fn prob_to_state(p: &ProbState, sic: &SicSystem) -> Result<ComplexMatrix> {
    if p.len() != sic.n() {
        return Err(Error::ShapeMismatch(format!(
            "probability vector has {} entries, system expects N = {}",
            p.len(),
            sic.n()
        )));
    }
    let d = sic.d();
    let df = d as f64;
    let mut rho = ComplexMatrix::zeros(d, d);
    for (pi, proj) in p.values().iter().zip(sic.projectors()) {
        let coeff = (df + 1.0) * pi - 1.0 / df;
        rho += proj.scale(coeff);
    }
    Ok(rho)
}

/// R(j|i) = tr(Pi_i D_j) for a POVM {D_j}.
pub fn povm_to_cond(effects: &[ComplexMatrix], sic: &SicSystem) -> Result<CondMatrix> {
    let report = linalg::validate_povm(effects, linalg::DEFAULT_TOL)?;
    if !report.ok {
        return Err(Error::InvalidPovm(report.messages.join("; ")));
    }
    if effects[0].nrows() != sic.d() {
        return Err(Error::ShapeMismatch(format!(
            "POVM acts on dimension {}, reference system has d = {}",
            effects[0].nrows(),
            sic.d()
        )));
    }
    let j = effects.len();
    let n = sic.n();
    let mut m = DMatrix::zeros(j, n);
    for (jj, d_j) in effects.iter().enumerate() {
        for (i, proj) in sic.projectors().iter().enumerate() {
            m[(jj, i)] = linalg::trace_inner_product(proj, d_j)?;
        }
    }
    CondMatrix::from_matrix(m)
}

/// D_j = sum_i R(j|i) ((d+1) E_i - (1/d) I). The operators are Hermitian
/// and sum to the identity; positivity is again a separate membership test.
pub fn cond_to_povm(r: &CondMatrix, sic: &SicSystem) -> Result<Vec<ComplexMatrix>> {
    if r.n() != sic.n() {
        return Err(Error::ShapeMismatch(format!(
            "conditional matrix has N = {}, system expects N = {}",
            r.n(),
            sic.n()
        )));
    }
    let d = sic.d();
    let df = d as f64;
    let identity = linalg::identity(d);
    // Building blocks (d+1) E_i - (1/d) I.
    let blocks: Vec<ComplexMatrix> = sic
        .effects()
        .iter()
        .map(|e| e.scale(df + 1.0) - identity.scale(1.0 / df))
        .collect();
    let povm = (0..r.j())
        .map(|j| {
            let mut op = ComplexMatrix::zeros(d, d);
            for (i, block) in blocks.iter().enumerate() {
                op += block.scale(r.entry(j, i));
            }
            op
        })
        .collect();
    Ok(povm)
}

/// The Born rule in probability form: q(j) = sum_i ((d+1) p(i) - 1/d) R(j|i).
///
/// Outputs are not clamped; when the inputs did not come from a jointly
/// physical (state, measurement) pair the entries can leave the unit
/// interval and the attached `valid` flag is lowered.
pub fn born(p: &ProbState, r: &CondMatrix, d: usize) -> Result<BornOutcome> {
    let n = d * d;
    if p.len() != n || r.n() != n {
        return Err(Error::ShapeMismatch(format!(
            "Born rule at d = {d} needs N = {n}; got state length {} and matrix N = {}",
            p.len(),
            r.n()
        )));
    }
    let df = d as f64;
    let coeffs: Vec<f64> = p.values().iter().map(|pi| (df + 1.0) * pi - 1.0 / df).collect();
    let q: Vec<f64> = (0..r.j())
        .map(|j| (0..n).map(|i| coeffs[i] * r.entry(j, i)).sum())
        .collect();
    let valid = q
        .iter()
        .all(|v| *v >= -SIMPLEX_TOL && *v <= 1.0 + SIMPLEX_TOL);
    Ok(BornOutcome { q, valid })
}

/// The Law of Total Probability: s(j) = sum_i R(j|i) p(i).
pub fn ltp(p: &ProbState, r: &CondMatrix) -> Result<OutcomeDist> {
    if p.len() != r.n() {
        return Err(Error::ShapeMismatch(format!(
            "state length {} does not match matrix N = {}",
            p.len(),
            r.n()
        )));
    }
    let s: Vec<f64> = (0..r.j())
        .map(|j| (0..r.n()).map(|i| r.entry(j, i) * p.values()[i]).sum())
        .collect();
    OutcomeDist::new(s)
}

/// Largest elementwise gap between the Born rule and the Law of Total
/// Probability on the same inputs.
pub fn ltp_deviation(p: &ProbState, r: &CondMatrix, d: usize) -> Result<f64> {
    let q = born(p, r, d)?;
    let s = ltp(p, r)?;
    Ok(q.q
        .iter()
        .zip(s.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
