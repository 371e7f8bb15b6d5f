//! Convex geometry of the probability-vector state space: inner-product
//! bounds, mutually-maximally-distant sets, polarity, in/out-ball radii,
//! physical-validity membership, and a constructive linear-extension
//! certifier.
//!
//! Membership tests reconstruct the operator behind a probability vector and
//! check eigenvalues directly; that is exact for the quantum state space,
//! whereas finite polar checks are only necessary conditions.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, ValidationReport};
use crate::repr::{self, ProbState};
use crate::sic::SicSystem;

/// Inner-product bounds and ball radii of the state space for dimension d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QplexGeometry {
    pub d: usize,
    /// Number of reference outcomes, d^2.
    #[serde(rename = "N")]
    pub n: usize,
    /// Lower inner-product bound, 1/(d^2 + d).
    #[serde(rename = "L")]
    pub l: f64,
    /// Upper inner-product bound, 2L.
    #[serde(rename = "U")]
    pub u: f64,
    /// 1/N - L, positive whenever the bounds are nondegenerate.
    #[serde(rename = "Lprime")]
    pub lprime: f64,
    /// U - 1/N.
    #[serde(rename = "Uprime")]
    pub uprime: f64,
    /// Radius of the largest ball inscribed in the probability simplex,
    /// centered at the uniform distribution.
    pub r_in: f64,
    /// Radius of the sphere through the reference states.
    pub r_out: f64,
}

/// Result of a mutually-maximally-distant subset search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MmdResult {
    /// Indices into the candidate list, ascending.
    pub indices: Vec<usize>,
    pub size: usize,
    /// True when the subset came from the exact branch-and-bound search,
    /// false when the greedy fallback produced it.
    pub certified: bool,
}

/// In-ball and out-ball radii for dimension d: the inscribed-simplex ball
/// radius 1/sqrt(N(N-1)) and sqrt(U - 1/N).
pub fn ball_radii(d: usize) -> (f64, f64) {
    assert!(d >= 2, "dimension must be at least 2");
    let n = (d * d) as f64;
    let df = d as f64;
    let u = 2.0 / (df * df + df);
    let r_in = 1.0 / (n * (n - 1.0)).sqrt();
    let r_out = (u - 1.0 / n).sqrt();
    (r_in, r_out)
}

/// The quantum bounds for dimension d: N = d^2, L = 1/(d^2+d), U = 2L, and
/// the derived shifted bounds and ball radii.
pub fn quantum_bounds(d: usize) -> QplexGeometry {
    assert!(d >= 2, "dimension must be at least 2");
    let n = d * d;
    let df = d as f64;
    let l = 1.0 / (df * df + df);
    let u = 2.0 * l;
    let (r_in, r_out) = ball_radii(d);
    QplexGeometry {
        d,
        n,
        l,
        u,
        lprime: 1.0 / n as f64 - l,
        uprime: u - 1.0 / n as f64,
        r_in,
        r_out,
    }
}

/// Upper bound forced on states of maximal norm: U = 1 + L(N-1)(NL-2).
pub fn u_from_nl(n: usize, l: f64) -> Result<f64> {
    let nf = n as f64;
    if !(0.0..=1.0 / nf).contains(&l) {
        return Err(Error::OutOfRange(format!(
            "L = {l} must lie in [0, 1/N] = [0, {}]",
            1.0 / nf
        )));
    }
    Ok(1.0 + l * (nf - 1.0) * (nf * l - 2.0))
}

/// Cardinality bound for mutually-maximally-distant sets:
/// floor(1 + (U - 1/N)/(1/N - L)).
pub fn mmd_bound(n: usize, l: f64, u: f64) -> Result<usize> {
    let inv_n = 1.0 / n as f64;
    if l >= inv_n {
        return Err(Error::OutOfRange(format!(
            "degenerate bounds: L = {l} must be strictly below 1/N = {inv_n}"
        )));
    }
    if u <= inv_n {
        return Err(Error::OutOfRange(format!(
            "degenerate bounds: U = {u} must be strictly above 1/N = {inv_n}"
        )));
    }
    let ratio = (u - inv_n) / (inv_n - l);
    // The ratio is integral for the quantum and classical bounds; a small
    // epsilon keeps floating-point rounding from flooring through it.
    Ok((1.0 + ratio + 1e-9).floor() as usize)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exact maximum clique by branch and bound over an adjacency matrix,
/// visiting vertices in ascending order so ties break toward the
/// lexicographically smallest subset.
fn max_clique(adj: &[Vec<bool>]) -> Vec<usize> {
    let n = adj.len();
    let mut best: Vec<usize> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    fn recurse(
        adj: &[Vec<bool>],
        candidates: &[usize],
        current: &mut Vec<usize>,
        best: &mut Vec<usize>,
    ) {
        if current.len() + candidates.len() <= best.len() {
            return;
        }
        if candidates.is_empty() {
            if current.len() > best.len() {
                *best = current.clone();
            }
            return;
        }
        for (pos, &v) in candidates.iter().enumerate() {
            if current.len() + (candidates.len() - pos) <= best.len() {
                break;
            }
            current.push(v);
            let next: Vec<usize> = candidates[pos + 1..]
                .iter()
                .copied()
                .filter(|&w| adj[v][w])
                .collect();
            recurse(adj, &next, current, best);
            current.pop();
        }
    }
    let all: Vec<usize> = (0..n).collect();
    recurse(adj, &all, &mut current, &mut best);
    best
}

/// Cutoff between the exact search and the greedy fallback.
const MMD_EXACT_CUTOFF: usize = 20;

/// Finds a maximum-cardinality subset of `states` in which every member has
/// self-inner-product within `tol` of U and every pair sits within `tol` of
/// L. States failing the self-overlap test are never candidates. Up to 20
/// candidates the search is exact (branch and bound); beyond that a greedy
/// pass seeded on the lowest-index admissible pair runs with
/// `certified = false`.
pub fn find_mmd(states: &[ProbState], geom: &QplexGeometry, tol: f64) -> MmdResult {
    let eligible: Vec<usize> = states
        .iter()
        .enumerate()
        .filter(|(_, p)| (dot(p.values(), p.values()) - geom.u).abs() <= tol)
        .map(|(i, _)| i)
        .collect();

    let k = eligible.len();
    let pair_ok = |a: usize, b: usize| {
        (dot(states[a].values(), states[b].values()) - geom.l).abs() <= tol
    };

    if k <= MMD_EXACT_CUTOFF {
        let adj: Vec<Vec<bool>> = (0..k)
            .map(|x| (0..k).map(|y| x != y && pair_ok(eligible[x], eligible[y])).collect())
            .collect();
        let clique = max_clique(&adj);
        let mut indices: Vec<usize> = clique.into_iter().map(|x| eligible[x]).collect();
        indices.sort_unstable();
        MmdResult {
            size: indices.len(),
            indices,
            certified: true,
        }
    } else {
        // Greedy: seed with the lowest-index admissible pair, then extend by
        // lowest index first.
        let mut chosen: Vec<usize> = Vec::new();
        'seed: for (a_pos, &a) in eligible.iter().enumerate() {
            for &b in &eligible[a_pos + 1..] {
                if pair_ok(a, b) {
                    chosen = vec![a, b];
                    break 'seed;
                }
            }
        }
        if chosen.is_empty() {
            if let Some(&first) = eligible.first() {
                chosen.push(first);
            }
        } else {
            for &c in &eligible {
                if !chosen.contains(&c) && chosen.iter().all(|&x| pair_ok(x, c)) {
                    chosen.push(c);
                }
            }
        }
        chosen.sort_unstable();
        MmdResult {
            size: chosen.len(),
            indices: chosen,
            certified: false,
        }
    }
}

/// True when `s` (a unit-sum vector, possibly with negative entries) has
/// inner product at least L - 1e-12 with every state in `set`.
pub fn in_polar(s: &[f64], set: &[ProbState], l: f64) -> Result<bool> {
    let sum: f64 = s.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidProbability(format!(
            "polar test needs a unit-sum vector, got sum {sum}"
        )));
    }
    Ok(set.iter().all(|p| dot(s, p.values()) >= l - 1e-12))
}

/// Physical validity of a state vector: the reconstructed operator must be
/// a density operator within `tol`.
pub fn valid_state(p: &ProbState, sic: &SicSystem, tol: f64) -> Result<ValidationReport> {
    let rho = repr::prob_to_state(p, sic)?;
    Ok(linalg::validate_density(&rho, tol))
}

/// Physical validity of a measurement-row vector with entries in [0, 1]:
/// the reconstructed operator D = sum_i r(i) ((d+1)E_i - I/d) must satisfy
/// 0 <= D <= I within `tol`. Entries outside the unit interval are a hard
/// error (such a row is not even Dutch-book valid).
pub fn valid_effect(r: &[f64], sic: &SicSystem, tol: f64) -> Result<ValidationReport> {
    if r.len() != sic.n() {
        return Err(Error::ShapeMismatch(format!(
            "effect row has {} entries, system expects N = {}",
            r.len(),
            sic.n()
        )));
    }
    if let Some(v) = r
        .iter()
        .find(|v| **v < -1e-12 || **v > 1.0 + 1e-12 || !v.is_finite())
    {
        return Err(Error::OutOfRange(format!(
            "effect row entry {v} outside the unit interval"
        )));
    }
    let d = sic.d();
    let df = d as f64;
    let identity = linalg::identity(d);
    let mut op = crate::linalg::ComplexMatrix::zeros(d, d);
    for (ri, e) in r.iter().zip(sic.effects()) {
        op += (e.scale(df + 1.0) - identity.scale(1.0 / df)).scale(*ri);
    }
    let eigs = linalg::hermitian_eigenvalues(&op);
    let lambda_min = eigs[0];
    let lambda_max = eigs[eigs.len() - 1];
    let findings = [
        (
            (-lambda_min).max(0.0),
            format!("minimum eigenvalue {lambda_min:.6e} below 0"),
        ),
        (
            (lambda_max - 1.0).max(0.0),
            format!("maximum eigenvalue {lambda_max:.6e} above 1"),
        ),
    ];
    Ok(ValidationReport::from_findings(tol, &findings))
}

/// Recovers the dual vector of a linear functional from sampled
/// (vector, value) pairs by least squares, then certifies consistency by
/// the worst residual.
///
/// Errors when the sample vectors do not span all N coordinates or when the
/// worst residual exceeds `tol` (the samples then cannot come from any
/// linear functional, and the worst offender is reported).
pub fn linear_extension(samples: &[(Vec<f64>, f64)], tol: f64) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::RankDeficient { rank: 0, dim: 0 });
    }
    let n = samples[0].0.len();
    for (v, _) in samples {
        if v.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "sample vectors have mixed lengths {} and {n}",
                v.len()
            )));
        }
    }
    let rows = samples.len();
    let a = DMatrix::from_fn(rows, n, |r, c| samples[r].0[c]);
    let y = DVector::from_fn(rows, |r, _| samples[r].1);

    let svd = a.clone().svd(true, true);
    let s_max = svd.singular_values.max();
    let rank_eps = s_max * (rows.max(n) as f64) * f64::EPSILON * 16.0;
    let rank = svd.singular_values.iter().filter(|s| **s > rank_eps).count();
    if rank < n {
        return Err(Error::RankDeficient { rank, dim: n });
    }
    let w = svd
        .solve(&y, rank_eps)
        .expect("SVD of a full-rank system solves");

    let mut worst = 0.0;
    let mut worst_index = 0;
    for (idx, (v, value)) in samples.iter().enumerate() {
        let residual = (dot(v, w.as_slice()) - value).abs();
        if residual > worst {
            worst = residual;
            worst_index = idx;
        }
    }
    if worst > tol {
        return Err(Error::Inconsistent {
            residual: worst,
            index: worst_index,
            tol,
        });
    }
    Ok(w.as_slice().to_vec())
}
