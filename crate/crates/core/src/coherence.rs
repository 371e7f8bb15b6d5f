//! Dutch-book engine: validates probability declarations, checks the
//! classical coherence relations (additivity, joint/conditional), checks
//! Born-rule coherence, and emits explicit ticket portfolios with a
//! guaranteed loss whenever a declaration is incoherent.
//!
//! Witness tables are never hardcoded: each book is laid out as tickets and
//! buy/sell transactions, and the per-outcome payoffs come from evaluating
//! that portfolio outcome by outcome. Event labels use `!` for negation, so
//! the complement of `E` is `!E`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::ValidationReport;
use crate::repr::{self, CondMatrix, OutcomeDist, ProbState};

/// Tolerance below which a declared relation counts as coherent.
pub const COHERENCE_TOL: f64 = 1e-12;

/// A lottery ticket: pays `payout` if `event` occurs; if the optional
/// refund trigger occurs instead, the transacted price is returned.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ticket {
    pub description: String,
    pub event: String,
    pub payout: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditional_refund: Option<String>,
    pub declared_price: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Buy,
    Sell,
}

/// One transaction of the gambler, from the gambler's perspective.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transaction {
    pub dir: Direction,
    pub ticket: Ticket,
}

/// Extra payload attached to Born-rule witnesses: the unique coherent
/// distribution, the declared-minus-coherent discrepancy, and the implied
/// price the declaration book was settled at.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BornRepair {
    pub coherent_q: Vec<f64>,
    pub discrepancy: Vec<f64>,
    pub implied_price: f64,
    /// The implied price is a convention of this tool, not part of the
    /// coherence argument itself.
    pub price_convention: String,
}

/// An explicit portfolio whose net payoff is negative on every outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DutchBookWitness {
    pub transactions: Vec<Transaction>,
    pub guaranteed_loss: f64,
    pub outcome_table: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repair: Option<BornRepair>,
}

/// Result of a coherence check.
#[derive(Debug, Clone, PartialEq)]
pub enum CoherenceVerdict {
    Coherent,
    Incoherent(Box<DutchBookWitness>),
}

impl CoherenceVerdict {
    pub fn is_coherent(&self) -> bool {
        matches!(self, CoherenceVerdict::Coherent)
    }

    pub fn witness(&self) -> Option<&DutchBookWitness> {
        match self {
            CoherenceVerdict::Coherent => None,
            CoherenceVerdict::Incoherent(w) => Some(w),
        }
    }
}

/// Net payoff of one ticket at an outcome where the events in
/// `true_events` occur.
fn ticket_value(ticket: &Ticket, true_events: &[&str]) -> f64 {
    let mut value = 0.0;
    if true_events.contains(&ticket.event.as_str()) {
        value += ticket.payout;
    }
    if let Some(refund) = &ticket.conditional_refund {
        if true_events.contains(&refund.as_str()) {
            value += ticket.declared_price;
        }
    }
    value
}

/// Evaluates a portfolio on an enumerated outcome space. Buying costs the
/// declared price and earns the ticket value; selling is the reverse.
fn settle(
    transactions: &[Transaction],
    outcomes: &[(&str, Vec<&str>)],
) -> BTreeMap<String, f64> {
    outcomes
        .iter()
        .map(|(label, true_events)| {
            let net: f64 = transactions
                .iter()
                .map(|t| {
                    let v = ticket_value(&t.ticket, true_events);
                    match t.dir {
                        Direction::Buy => v - t.ticket.declared_price,
                        Direction::Sell => t.ticket.declared_price - v,
                    }
                })
                .sum();
            (label.to_string(), net)
        })
        .collect()
}

fn flip(dir: Direction, reversed: bool) -> Direction {
    match (dir, reversed) {
        (d, false) => d,
        (Direction::Buy, true) => Direction::Sell,
        (Direction::Sell, true) => Direction::Buy,
    }
}

/// Checks a price map for the basic rules: every price in [0, 1], and
/// wherever an event and its complement (`E` / `!E`) are both priced, the
/// two prices sum to 1 within 1e-12.
pub fn validate_prices(prices: &BTreeMap<String, f64>) -> ValidationReport {
    let mut findings = Vec::new();
    for (event, price) in prices {
        if !price.is_finite() {
            findings.push((f64::INFINITY, format!("price for '{event}' is not finite")));
            continue;
        }
        let below = (-price).max(0.0);
        let above = (price - 1.0).max(0.0);
        if below > 0.0 {
            findings.push((
                below,
                format!("price for '{event}' is negative ({price}): paying to give a ticket away"),
            ));
        }
        if above > 0.0 {
            findings.push((
                above,
                format!("price for '{event}' exceeds 1 ({price}): paying more than the payout"),
            ));
        }
    }
    for (event, price) in prices {
        // Visit each complement pair once, keyed by the positive form.
        if let Some(stripped) = event.strip_prefix('!') {
            if let Some(base_price) = prices.get(stripped) {
                let gap = (price + base_price - 1.0).abs();
                findings.push((
                    gap,
                    format!(
                        "prices for '{stripped}' and '{event}' sum to {} instead of 1",
                        price + base_price
                    ),
                ));
            }
        }
    }
    ValidationReport::from_findings(COHERENCE_TOL, &findings)
}

/// Checks p(E or F) = p(E) + p(F) for mutually exclusive events E and F.
/// On violation, returns the three-ticket book over the outcomes
/// {E, F, neither}; the transaction directions follow the sign of the
/// discrepancy, and the loss is stake times its magnitude.
pub fn check_additivity(p_e: f64, p_f: f64, p_e_or_f: f64, stake: f64) -> CoherenceVerdict {
    let delta = p_e_or_f - (p_e + p_f);
    if delta.abs() <= COHERENCE_TOL {
        return CoherenceVerdict::Coherent;
    }
    // delta > 0: the union ticket is overpriced, so the gambler buys it and
    // sells the parts. Otherwise all directions reverse.
    let reversed = delta < 0.0;
    let transactions = vec![
        Transaction {
            dir: flip(Direction::Buy, reversed),
            ticket: Ticket {
                description: format!("worth {stake} if E or F"),
                event: "E|F".into(),
                payout: stake,
                conditional_refund: None,
                declared_price: p_e_or_f * stake,
            },
        },
        Transaction {
            dir: flip(Direction::Sell, reversed),
            ticket: Ticket {
                description: format!("worth {stake} if E"),
                event: "E".into(),
                payout: stake,
                conditional_refund: None,
                declared_price: p_e * stake,
            },
        },
        Transaction {
            dir: flip(Direction::Sell, reversed),
            ticket: Ticket {
                description: format!("worth {stake} if F"),
                event: "F".into(),
                payout: stake,
                conditional_refund: None,
                declared_price: p_f * stake,
            },
        },
    ];
    let outcomes: [(&str, Vec<&str>); 3] = [
        ("E", vec!["E", "E|F"]),
        ("F", vec!["F", "E|F"]),
        ("neither", vec![]),
    ];
    let outcome_table = settle(&transactions, &outcomes);
    CoherenceVerdict::Incoherent(Box::new(DutchBookWitness {
        transactions,
        guaranteed_loss: delta.abs() * stake,
        outcome_table,
        repair: None,
    }))
}

/// Checks p(E and F) = p(E) p(F|E). On violation, returns the book built
/// from the conditional ticket and its equivalent pair over the outcomes
/// {E&F, E&!F, !E}.
pub fn check_joint_conditional(
    p_e: f64,
    p_f_given_e: f64,
    p_e_and_f: f64,
    stake: f64,
) -> CoherenceVerdict {
    let delta = p_e * p_f_given_e - p_e_and_f;
    if delta.abs() <= COHERENCE_TOL {
        return CoherenceVerdict::Coherent;
    }
    // The conditional ticket is equivalent to holding the conjunction
    // ticket plus a side ticket worth p(F|E) when E fails. delta > 0 means
    // the conditional is overpriced relative to the pair.
    let reversed = delta < 0.0;
    let transactions = vec![
        Transaction {
            dir: flip(Direction::Buy, reversed),
            ticket: Ticket {
                description: format!("worth {stake} if E and F, refunded if not E"),
                event: "E&F".into(),
                payout: stake,
                conditional_refund: Some("!E".into()),
                declared_price: p_f_given_e * stake,
            },
        },
        Transaction {
            dir: flip(Direction::Sell, reversed),
            ticket: Ticket {
                description: format!("worth {stake} if E and F"),
                event: "E&F".into(),
                payout: stake,
                conditional_refund: None,
                declared_price: p_e_and_f * stake,
            },
        },
        Transaction {
            dir: flip(Direction::Sell, reversed),
            ticket: Ticket {
                description: format!("worth {} if not E", p_f_given_e * stake),
                event: "!E".into(),
                payout: p_f_given_e * stake,
                conditional_refund: None,
                declared_price: p_f_given_e * (1.0 - p_e) * stake,
            },
        },
    ];
    let outcomes: [(&str, Vec<&str>); 3] = [
        ("E&F", vec!["E", "F", "E&F"]),
        ("E&!F", vec!["E"]),
        ("!E", vec!["!E"]),
    ];
    let outcome_table = settle(&transactions, &outcomes);
    CoherenceVerdict::Incoherent(Box::new(DutchBookWitness {
        transactions,
        guaranteed_loss: delta.abs() * stake,
        outcome_table,
        repair: None,
    }))
}

const DECLARATION_OUTCOME: &str = "declares-coherent-q";

/// Checks a declared Experiment One distribution `q` against the unique
/// distribution the Born rule derives from `p` and `R`.
///
/// On violation the returned witness is the declaration book: the bookie
/// buys a ticket on the gambler declaring the coherent q*, priced by the
/// gambler's implied confidence x = max(0, 1 - totvar(q, q*)). Working
/// through the rule forces the declaration of q*, so the ticket pays out
/// and the gambler is left with a loss of (1 - x) stake. The witness also
/// carries q*, the discrepancy vector, and the implied price for repair.
pub fn check_born_coherence(
    p: &ProbState,
    r: &CondMatrix,
    q: &OutcomeDist,
    d: usize,
    tol: f64,
    stake: f64,
) -> Result<CoherenceVerdict> {
    if q.len() != r.j() {
        return Err(Error::ShapeMismatch(format!(
            "declared distribution has {} outcomes, matrix has J = {}",
            q.len(),
            r.j()
        )));
    }
    let coherent_q = repr::born(p, r, d)?;
    let max_dev = q
        .values()
        .iter()
        .zip(&coherent_q.q)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if max_dev <= tol {
        return Ok(CoherenceVerdict::Coherent);
    }

    let discrepancy: Vec<f64> = q
        .values()
        .iter()
        .zip(&coherent_q.q)
        .map(|(a, b)| a - b)
        .collect();
    let total_variation = 0.5 * discrepancy.iter().map(|x| x.abs()).sum::<f64>();
    let implied_price = (1.0 - total_variation).max(0.0);

    let transactions = vec![Transaction {
        dir: Direction::Sell,
        ticket: Ticket {
            description: format!(
                "worth {stake} if the gambler declares the coherent distribution"
            ),
            event: DECLARATION_OUTCOME.into(),
            payout: stake,
            conditional_refund: None,
            declared_price: implied_price * stake,
        },
    }];
    // The gambler accepted the rule, and the coherent q is unique, so the
    // only outcome consistent with their commitments is declaring it.
    let outcomes: [(&str, Vec<&str>); 1] =
        [(DECLARATION_OUTCOME, vec![DECLARATION_OUTCOME])];
    let outcome_table = settle(&transactions, &outcomes);
    Ok(CoherenceVerdict::Incoherent(Box::new(DutchBookWitness {
        transactions,
        guaranteed_loss: (1.0 - implied_price) * stake,
        outcome_table,
        repair: Some(BornRepair {
            coherent_q: coherent_q.q,
            discrepancy,
            implied_price,
            price_convention: "implied price = max(0, 1 - total variation between declared \
                               and coherent distributions); a convention of this tool"
                .into(),
        }),
    })))
}

/// Net payoff of a witness at one of its outcomes. Genuine witnesses are
/// negative on every outcome.
pub fn evaluate_payoff(witness: &DutchBookWitness, outcome: &str) -> Result<f64> {
    witness
        .outcome_table
        .get(outcome)
        .copied()
        .ok_or_else(|| Error::UnknownOutcome(outcome.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prices(entries: &[(&str, f64)]) -> BTreeMap<String, f64> {
        entries.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn price_validation() {
        assert!(validate_prices(&prices(&[("E", 0.3), ("!E", 0.7)])).ok);
        let neg = validate_prices(&prices(&[("E", -0.1)]));
        assert!(!neg.ok);
        assert!((neg.max_violation - 0.1).abs() < 1e-15);
        let bad_sum = validate_prices(&prices(&[("E", 0.6), ("!E", 0.6)]));
        assert!(!bad_sum.ok);
        assert!((bad_sum.max_violation - 0.2).abs() < 1e-12);
    }

    #[test]
    fn additivity_coherent_case() {
        assert!(check_additivity(0.2, 0.3, 0.5, 1.0).is_coherent());
    }

    #[test]
    fn additivity_overpriced_union() {
        let verdict = check_additivity(0.2, 0.3, 0.6, 1.0);
        let w = verdict.witness().expect("incoherent");
        assert!((w.guaranteed_loss - 0.1).abs() < 1e-12);
        assert_eq!(w.transactions[0].dir, Direction::Buy);
        assert_eq!(w.transactions[1].dir, Direction::Sell);
        for outcome in ["E", "F", "neither"] {
            let pay = evaluate_payoff(w, outcome).unwrap();
            assert!((pay + 0.1).abs() < 1e-12, "{outcome}: {pay}");
        }
    }

    #[test]
    fn additivity_underpriced_union_flips_directions() {
        let verdict = check_additivity(0.2, 0.3, 0.4, 1.0);
        let w = verdict.witness().expect("incoherent");
        assert!((w.guaranteed_loss - 0.1).abs() < 1e-12);
        assert_eq!(w.transactions[0].dir, Direction::Sell);
        assert_eq!(w.transactions[1].dir, Direction::Buy);
        for outcome in ["E", "F", "neither"] {
            assert!((evaluate_payoff(w, outcome).unwrap() + 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn conditional_coherent_cases() {
        assert!(check_joint_conditional(0.5, 0.4, 0.2, 1.0).is_coherent());
        // E impossible leaves the conditional unconstrained.
        assert!(check_joint_conditional(0.0, 0.73, 0.0, 1.0).is_coherent());
    }

    #[test]
    fn conditional_witness_loses_everywhere() {
        let verdict = check_joint_conditional(0.5, 0.4, 0.3, 1.0);
        let w = verdict.witness().expect("incoherent");
        assert!((w.guaranteed_loss - 0.1).abs() < 1e-12);
        for outcome in ["E&F", "E&!F", "!E"] {
            let pay = evaluate_payoff(w, outcome).unwrap();
            assert!((pay + 0.1).abs() < 1e-12, "{outcome}: {pay}");
        }
        assert!(evaluate_payoff(w, "nonsense").is_err());
    }

    #[test]
    fn loss_scales_with_stake() {
        // Degree-1 homogeneity across all three book constructions.
        for stake in [0.5, 1.0, 250.0] {
            let w = check_additivity(0.2, 0.3, 0.6, stake);
            let w = w.witness().unwrap();
            assert!((w.guaranteed_loss - 0.1 * stake).abs() < 1e-9 * stake);
            for pay in w.outcome_table.values() {
                assert!((pay + 0.1 * stake).abs() < 1e-9 * stake);
            }

            let w = check_joint_conditional(0.5, 0.4, 0.3, stake);
            let w = w.witness().unwrap();
            assert!((w.guaranteed_loss - 0.1 * stake).abs() < 1e-9 * stake);

            let e1 = repr::reference_states(2).remove(0);
            let dp = repr::double_pass_matrix(2);
            let s = repr::ltp(&e1, &dp).unwrap();
            let unit = check_born_coherence(&e1, &dp, &s, 2, 1e-10, 1.0).unwrap();
            let scaled = check_born_coherence(&e1, &dp, &s, 2, 1e-10, stake).unwrap();
            let unit_loss = unit.witness().unwrap().guaranteed_loss;
            let scaled_loss = scaled.witness().unwrap().guaranteed_loss;
            assert!((scaled_loss - unit_loss * stake).abs() < 1e-12 * stake);
        }
    }

    #[test]
    fn born_coherent_under_double_pass() {
        for d in [2usize, 3] {
            let dp = repr::double_pass_matrix(d);
            let p = ProbState::uniform(d * d);
            let q = OutcomeDist::new(p.values().to_vec()).unwrap();
            let verdict = check_born_coherence(&p, &dp, &q, d, 1e-10, 1.0).unwrap();
            assert!(verdict.is_coherent());
        }
    }

    #[test]
    fn born_coherent_under_garbage_disposal() {
        let p = ProbState::uniform(4);
        let r = CondMatrix::garbage_disposal(6, 4);
        let q = OutcomeDist::uniform(6);
        assert!(check_born_coherence(&p, &r, &q, 2, 1e-10, 1.0)
            .unwrap()
            .is_coherent());
    }

    #[test]
    fn classical_marginalization_is_born_incoherent() {
        // Declaring the Law-of-Total-Probability output against the
        // reference double pass is exactly the incoherence the checker
        // must flag, with discrepancy equal to the deviation between the
        // two rules.
        let d = 2;
        let e1 = repr::reference_states(d).remove(0);
        let dp = repr::double_pass_matrix(d);
        let s = repr::ltp(&e1, &dp).unwrap();
        let verdict = check_born_coherence(&e1, &dp, &s, d, 1e-10, 1.0).unwrap();
        let w = verdict.witness().expect("incoherent");
        let repair = w.repair.as_ref().expect("born witness carries repair");
        let dev = repr::ltp_deviation(&e1, &dp, d).unwrap();
        let max_disc = repair
            .discrepancy
            .iter()
            .map(|x| x.abs())
            .fold(0.0, f64::max);
        assert!((max_disc - dev).abs() < 1e-12);
        assert!(w.guaranteed_loss > 0.0);
        let pay = evaluate_payoff(w, DECLARATION_OUTCOME).unwrap();
        assert!((pay + w.guaranteed_loss).abs() < 1e-15);
    }

    #[test]
    fn born_repair_fixpoint() {
        let d = 2;
        let e1 = repr::reference_states(d).remove(0);
        let dp = repr::double_pass_matrix(d);
        let s = repr::ltp(&e1, &dp).unwrap();
        let verdict = check_born_coherence(&e1, &dp, &s, d, 1e-10, 1.0).unwrap();
        let repaired = OutcomeDist::new(
            verdict.witness().unwrap().repair.as_ref().unwrap().coherent_q.clone(),
        )
        .unwrap();
        let second = check_born_coherence(&e1, &dp, &repaired, d, 1e-10, 1.0).unwrap();
        assert!(second.is_coherent());
    }

    #[test]
    fn witness_tables_respect_loss_bound() {
        // Every emitted entry is at most -loss + 1e-12.
        let books = [
            check_additivity(0.1, 0.1, 0.9, 2.0),
            check_additivity(0.4, 0.5, 0.1, 2.0),
            check_joint_conditional(0.9, 0.8, 0.1, 2.0),
            check_joint_conditional(0.2, 0.1, 0.9, 2.0),
        ];
        for verdict in &books {
            let w = verdict.witness().unwrap();
            for pay in w.outcome_table.values() {
                assert!(*pay <= -w.guaranteed_loss + 1e-12);
            }
        }
    }
}
