//! The two concentration protocols.
//!
//! Step 1 interferes the first resource electron with a matched ancilla and
//! keeps the single-charge branch; step 2 repeats the trick on the third
//! electron. The first protocol runs each step once on beam splitters with
//! charge detection. The second replaces them with complete parity checks
//! and recycles every failure branch through a coefficient recursion, so
//! each step may be iterated.
//!
//! Closed-form branch probabilities, the failure recursions, and the
//! per-round success series live here, next to full executable runs of both
//! protocols.

use std::fmt;

use num_complex::Complex64;

use crate::elements::{
    charge_detect, hadamard, measure_spin, pbs, phase_correct, BranchOutcome, ChargeOutcome,
    PbsPorts,
};
use crate::error::{Error, Result};
use crate::state::{
    make_single_electron, make_w_state, mode, tensor, ModeLabel, QuantumState, Spin, WCoefficients,
};

/// Which protocol to run or enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Protocol {
    /// Beam splitters and charge detectors, one round per step.
    Ecp1,
    /// Parity-check gates with failure recycling, iterated rounds.
    Ecp2,
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::Ecp1 => "ecp1",
            Protocol::Ecp2 => "ecp2",
        })
    }
}

/// Success probabilities of the two steps and their product.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct StepProbabilities {
    pub p_step1: f64,
    pub p_step2: f64,
    pub p_total: f64,
}

/// Round limits for the iterated protocol: up to `n_max` step-1 rounds and
/// `m_max` step-2 rounds, stopping early once a round's success probability
/// drops below `term_cutoff`.
#[derive(Clone, Copy, Debug)]
pub struct IterationSchedule {
    n_max: usize,
    m_max: usize,
    term_cutoff: f64,
}

impl IterationSchedule {
    pub fn new(n_max: usize, m_max: usize, term_cutoff: f64) -> Result<Self> {
        if n_max == 0 || m_max == 0 {
            return Err(Error::InvalidArgument(
                "iteration limits must be at least one round".into(),
            ));
        }
        if !term_cutoff.is_finite() || term_cutoff < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "term cutoff must be a finite non-negative number, got {term_cutoff}"
            )));
        }
        Ok(IterationSchedule {
            n_max,
            m_max,
            term_cutoff,
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn term_cutoff(&self) -> f64 {
        self.term_cutoff
    }
}

impl Default for IterationSchedule {
    /// Three rounds per step, cutoff at 1e-12.
    fn default() -> Self {
        IterationSchedule {
            n_max: 3,
            m_max: 3,
            term_cutoff: 1e-12,
        }
    }
}

/// Outcome of a protocol run: the per-round success probabilities of both
/// steps, their sums, the overall success probability, the final state on
/// success, and the coefficient triples produced by failure recursions.
#[derive(Clone, Debug)]
pub struct ProtocolReport {
    pub per_round_step1: Vec<f64>,
    pub per_round_step2: Vec<f64>,
    pub sum_step1: f64,
    pub sum_step2: f64,
    pub p_total: f64,
    pub final_state: Option<QuantumState>,
    pub coeff_trace: Vec<WCoefficients>,
}

impl ProtocolReport {
    fn from_rounds(
        per_round_step1: Vec<f64>,
        per_round_step2: Vec<f64>,
        final_state: Option<QuantumState>,
        coeff_trace: Vec<WCoefficients>,
    ) -> Self {
        let sum_step1: f64 = per_round_step1.iter().sum();
        let sum_step2: f64 = per_round_step2.iter().sum();
        ProtocolReport {
            per_round_step1,
            per_round_step2,
            sum_step1,
            sum_step2,
            p_total: sum_step1 * sum_step2,
            final_state,
            coeff_trace,
        }
    }

    pub fn step_probabilities(&self) -> StepProbabilities {
        StepProbabilities {
            p_step1: self.sum_step1,
            p_step2: self.sum_step2,
            p_total: self.p_total,
        }
    }
}

/// Denominators at or below this are treated as identically zero; with
/// unit-norm coefficients this only happens when the involved coefficients
/// are zero to far beyond f64 resolution.
const DEGENERATE_FLOOR: f64 = 1e-280;

/// Largest round index evaluated from the explicit power formula; higher
/// rounds switch to the recursion chain because the raw powers
/// alpha^(2^n) leave the f64 range long before the chain's ratios do.
const RAW_ROUND_MAX: usize = 8;

fn guard(denominator: f64, context: &str) -> Result<f64> {
    if denominator <= DEGENERATE_FLOOR {
        return Err(Error::DegenerateInput(context.into()));
    }
    Ok(denominator)
}

/// Clamps tiny floating-point overshoots of 1 before the norm check.
fn coeffs_from_raw(a: f64, b: f64, g: f64) -> Result<WCoefficients> {
    WCoefficients::new(a.min(1.0), b.min(1.0), g.min(1.0))
}

/// The fixed rail names the protocols are wired with.
pub(crate) struct Rails {
    pub(crate) a1: ModeLabel,
    pub(crate) b1: ModeLabel,
    pub(crate) c1: ModeLabel,
    pub(crate) a2: ModeLabel,
    pub(crate) c2: ModeLabel,
    pub(crate) d1: ModeLabel,
    pub(crate) d2: ModeLabel,
    pub(crate) e1: ModeLabel,
    pub(crate) e2: ModeLabel,
}

impl Rails {
    pub(crate) fn new() -> Self {
        Rails {
            a1: mode("a1"),
            b1: mode("b1"),
            c1: mode("c1"),
            a2: mode("a2"),
            c2: mode("c2"),
            d1: mode("d1"),
            d2: mode("d2"),
            e1: mode("e1"),
            e2: mode("e2"),
        }
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Step-1 success probability,
/// alpha^2 (gamma^2 + 2 beta^2) / (alpha^2 + beta^2).
pub fn ecp1_step1_prob(c: &WCoefficients) -> Result<f64> {
    let d = guard(
        c.alpha_sq() + c.beta_sq(),
        "step 1 is undefined when alpha and beta are both zero",
    )?;
    Ok(c.alpha_sq() * (c.gamma_sq() + 2.0 * c.beta_sq()) / d)
}

/// Step-1 failure probability, the complement of [`ecp1_step1_prob`]:
/// (alpha^4 + beta^4 + beta^2 gamma^2) / (alpha^2 + beta^2).
fn step1_odd_prob(c: &WCoefficients) -> Result<f64> {
    let d = guard(
        c.alpha_sq() + c.beta_sq(),
        "step 1 is undefined when alpha and beta are both zero",
    )?;
    let (a2, b2, g2) = (c.alpha_sq(), c.beta_sq(), c.gamma_sq());
    Ok((a2 * a2 + b2 * b2 + b2 * g2) / d)
}

/// Step-2 success probability given step-1 success,
/// 3 beta^2 gamma^2 / ((gamma^2 + beta^2)(gamma^2 + 2 beta^2)).
pub fn ecp1_step2_prob(c: &WCoefficients) -> Result<f64> {
    let d = guard(
        c.gamma_sq() + c.beta_sq(),
        "step 2 is undefined when beta and gamma are both zero",
    )?;
    Ok(3.0 * c.beta_sq() * c.gamma_sq() / (d * (c.gamma_sq() + 2.0 * c.beta_sq())))
}

/// Overall single-pass success probability,
/// 3 alpha^2 beta^2 gamma^2 / ((alpha^2 + beta^2)(gamma^2 + beta^2)).
pub fn ecp1_total_prob(c: &WCoefficients) -> Result<f64> {
    let d1 = guard(
        c.alpha_sq() + c.beta_sq(),
        "step 1 is undefined when alpha and beta are both zero",
    )?;
    let d2 = guard(
        c.gamma_sq() + c.beta_sq(),
        "step 2 is undefined when beta and gamma are both zero",
    )?;
    Ok(3.0 * c.alpha_sq() * c.beta_sq() * c.gamma_sq() / (d1 * d2))
}

/// The three closed-form probabilities bundled together.
pub fn ecp1_probs(c: &WCoefficients) -> Result<StepProbabilities> {
    let p_step1 = ecp1_step1_prob(c)?;
    let p_step2 = ecp1_step2_prob(c)?;
    Ok(StepProbabilities {
        p_step1,
        p_step2,
        p_total: p_step1 * p_step2,
    })
}

/// Coefficients carried into the next step-1 round after a failure:
/// (alpha, beta, gamma) -> (alpha^2, beta^2, beta gamma) / sqrt(alpha^4 +
/// beta^4 + beta^2 gamma^2).
pub fn recoeff_step1_failure(c: &WCoefficients) -> Result<WCoefficients> {
    let (a2, b2) = (c.alpha_sq(), c.beta_sq());
    let bg = c.beta() * c.gamma();
    let d = guard(
        a2 * a2 + b2 * b2 + bg * bg,
        "the step-1 failure branch vanishes when alpha and beta are both zero",
    )?;
    let scale = d.sqrt().recip();
    coeffs_from_raw(a2 * scale, b2 * scale, bg * scale)
}

/// Coefficients carried into the next step-2 round after a failure. The
/// triple is in (gamma, beta, beta) layout -- the distinguished first slot
/// belongs to the third resource electron -- and maps as
/// (gamma, beta, beta) -> (gamma^2, beta^2, beta^2) / sqrt(gamma^4 + 2 beta^4).
pub fn recoeff_step2_failure(c: &WCoefficients) -> Result<WCoefficients> {
    if (c.beta() - c.gamma()).abs() > 1e-12 {
        return Err(Error::InvalidArgument(
            "step-2 coefficients must carry the repeated entry in both trailing slots".into(),
        ));
    }
    let (g2, b2) = (c.alpha_sq(), c.beta_sq());
    let d = guard(
        g2 * g2 + 2.0 * b2 * b2,
        "the step-2 failure branch vanishes when beta and gamma are both zero",
    )?;
    let scale = d.sqrt().recip();
    coeffs_from_raw(g2 * scale, b2 * scale, b2 * scale)
}

/// Step-2 success probability for a normalized (gamma, beta, beta) triple:
/// 3 beta^2 gamma^2 / (gamma^2 + beta^2).
fn step2_even_prob(t: &WCoefficients) -> Result<f64> {
    let (g2, b2) = (t.alpha_sq(), t.beta_sq());
    let d = guard(
        g2 + b2,
        "step 2 is undefined when beta and gamma are both zero",
    )?;
    Ok(3.0 * b2 * g2 / d)
}

/// Step-2 failure probability for a normalized (gamma, beta, beta) triple:
/// (gamma^4 + 2 beta^4) / (gamma^2 + beta^2).
fn step2_odd_prob(t: &WCoefficients) -> Result<f64> {
    let (g2, b2) = (t.alpha_sq(), t.beta_sq());
    let d = guard(
        g2 + b2,
        "step 2 is undefined when beta and gamma are both zero",
    )?;
    Ok((g2 * g2 + 2.0 * b2 * b2) / d)
}

/// The normalized (gamma, beta, beta) triple describing the state step 2
/// starts from.
fn step2_initial_triple(c: &WCoefficients) -> Result<WCoefficients> {
    let d = guard(
        c.gamma_sq() + 2.0 * c.beta_sq(),
        "step 2 is undefined when beta and gamma are both zero",
    )?;
    let scale = d.sqrt().recip();
    coeffs_from_raw(c.gamma() * scale, c.beta() * scale, c.beta() * scale)
}

/// Success probability of step-1 round `n` (unconditional on earlier
/// rounds failing). For small `n` this evaluates the explicit formula
/// alpha^(2^n) (beta^(2^n - 2) gamma^2 + 2 beta^(2^n)) /
/// prod_{k=1..n} (alpha^(2^k) + beta^(2^k));
/// larger `n` walk the failure recursion, whose ratios stay in range.
pub fn p_step1_round(c: &WCoefficients, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("round indices start at 1".into()));
    }
    if n <= RAW_ROUND_MAX {
        if let Some(p) = p_step1_round_raw(c, n) {
            return Ok(p);
        }
    }
    p_step1_round_chain(c, n)
}

fn p_step1_round_raw(c: &WCoefficients, n: usize) -> Option<f64> {
    let (a2, b2, g2) = (c.alpha_sq(), c.beta_sq(), c.gamma_sq());
    let mut a_pow = a2; // alpha^(2^k)
    let mut b_pow = b2; // beta^(2^k)
    let mut b_pow_m2 = 1.0; // beta^(2^k - 2)
    let mut denom = 1.0;
    for k in 1..=n {
        denom *= a_pow + b_pow;
        if k < n {
            b_pow_m2 = b_pow_m2 * b_pow_m2 * b2;
            a_pow *= a_pow;
            b_pow *= b_pow;
        }
    }
    if denom <= DEGENERATE_FLOOR {
        return None;
    }
    Some(a_pow * (b_pow_m2 * g2 + 2.0 * b_pow) / denom)
}

fn p_step1_round_chain(c: &WCoefficients, n: usize) -> Result<f64> {
    let mut t = *c;
    let mut carried = 1.0;
    for _ in 1..n {
        carried *= step1_odd_prob(&t)?;
        t = recoeff_step1_failure(&t)?;
    }
    Ok(carried * ecp1_step1_prob(&t)?)
}

/// Success probability of step-2 round `m`, conditioned on step 1 having
/// succeeded (in any round) but unconditional on earlier step-2 rounds:
/// 3 beta^(2^m) gamma^(2^m) /
/// ((gamma^2 + 2 beta^2) prod_{k=1..m} (gamma^(2^k) + beta^(2^k))).
pub fn p_step2_round(c: &WCoefficients, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("round indices start at 1".into()));
    }
    if m <= RAW_ROUND_MAX {
        if let Some(p) = p_step2_round_raw(c, m) {
            return Ok(p);
        }
    }
    p_step2_round_chain(c, m)
}

fn p_step2_round_raw(c: &WCoefficients, m: usize) -> Option<f64> {
    let (b2, g2) = (c.beta_sq(), c.gamma_sq());
    let mut g_pow = g2;
    let mut b_pow = b2;
    let mut denom = g2 + 2.0 * b2;
    for k in 1..=m {
        denom *= g_pow + b_pow;
        if k < m {
            g_pow *= g_pow;
            b_pow *= b_pow;
        }
    }
    if denom <= DEGENERATE_FLOOR {
        return None;
    }
    Some(3.0 * b_pow * g_pow / denom)
}

fn p_step2_round_chain(c: &WCoefficients, m: usize) -> Result<f64> {
    let mut t = step2_initial_triple(c)?;
    let mut carried = 1.0;
    for _ in 1..m {
        carried *= step2_odd_prob(&t)?;
        t = recoeff_step2_failure(&t)?;
    }
    Ok(carried * step2_even_prob(&t)?)
}

fn take_branch<L: PartialEq>(
    branches: Vec<BranchOutcome<L>>,
    label: L,
) -> Option<BranchOutcome<L>> {
    branches.into_iter().find(|b| b.label == label)
}

/// Rotates the ancilla rail, measures it destructively, flips the phase on
/// the down outcome, and returns the common continuation state. Both
/// outcomes lead to the same state, which debug builds verify.
fn settle_measurement(
    state: &QuantumState,
    measured: &ModeLabel,
    corrected: &ModeLabel,
) -> Result<QuantumState> {
    let rotated = hadamard(state, measured)?;
    let mut settled: Option<QuantumState> = None;
    for branch in measure_spin(&rotated, measured)? {
        let outcome = match branch.label {
            Spin::Up => branch.state,
            Spin::Down => phase_correct(&branch.state, corrected)?,
        };
        match &settled {
            None => settled = Some(outcome),
            Some(first) => debug_assert!(
                outcome.equiv_up_to_phase(first, 1e-9),
                "measurement outcomes must agree after the phase correction"
            ),
        }
    }
    settled.ok_or(Error::EmptyBranch)
}

/// Runs the single-pass protocol on actual states and reports the simulated
/// branch probabilities. `per_round_step1/2` each hold the one simulated
/// round; a step that cannot succeed reports probability zero and no final
/// state.
pub fn ecp1_run(c: &WCoefficients) -> Result<ProtocolReport> {
    let r = Rails::new();
    let w = make_w_state(c, [r.a1.clone(), r.b1.clone(), r.c1.clone()])?;

    // Step 1: interfere a1 with the matched ancilla, keep a single charge
    // in the detector arm d1, then measure the rotated d2 rail.
    let n1 = guard(
        c.alpha_sq() + c.beta_sq(),
        "the step-1 ancilla is undefined when alpha and beta are both zero",
    )?
    .sqrt();
    let anc1 = make_single_electron(real(c.alpha() / n1), real(c.beta() / n1), r.a2.clone())?;
    let joint = tensor(&w, &anc1)?;
    let mixed = pbs(
        &joint,
        &PbsPorts::new(r.a1.clone(), r.a2.clone(), r.d1.clone(), r.d2.clone())?,
    );
    let Some(kept) = take_branch(
        charge_detect(&mixed, std::slice::from_ref(&r.d1)),
        ChargeOutcome::ExactlyOne,
    ) else {
        return Ok(ProtocolReport::from_rounds(vec![0.0], vec![], None, vec![]));
    };
    let p1 = kept.probability;
    let phi1 = settle_measurement(&kept.state, &r.d2, &r.d1)?;

    // Step 2: the same interference between c1 and the second ancilla; the
    // detector watches e2 and the kept branch is measured on e2 as well.
    let n2 = guard(
        c.beta_sq() + c.gamma_sq(),
        "the step-2 ancilla is undefined when beta and gamma are both zero",
    )?
    .sqrt();
    let anc2 = make_single_electron(real(c.gamma() / n2), real(c.beta() / n2), r.c2.clone())?;
    let joint2 = tensor(&phi1, &anc2)?;
    let mixed2 = pbs(
        &joint2,
        &PbsPorts::new(r.c1.clone(), r.c2.clone(), r.e2.clone(), r.e1.clone())?,
    );
    let Some(kept2) = take_branch(
        charge_detect(&mixed2, std::slice::from_ref(&r.e2)),
        ChargeOutcome::ExactlyOne,
    ) else {
        return Ok(ProtocolReport::from_rounds(
            vec![p1],
            vec![0.0],
            None,
            vec![],
        ));
    };
    let p2 = kept2.probability;
    let final_state = settle_measurement(&kept2.state, &r.e2, &r.e1)?;
    Ok(ProtocolReport::from_rounds(
        vec![p1],
        vec![p2],
        Some(final_state),
        vec![],
    ))
}

/// Evaluates the iterated protocol's success series under `sched`. Round
/// probabilities come from the closed forms and the failure recursions;
/// `coeff_trace` records every recursion taken (step-1 triples first, then
/// step-2 triples in their (gamma, beta, beta) layout). Degenerate
/// coefficients yield a zero-probability report rather than an error.
pub fn ecp2_run(c: &WCoefficients, sched: &IterationSchedule) -> Result<ProtocolReport> {
    let mut trace = Vec::new();

    let mut per1 = Vec::new();
    let mut t = *c;
    let mut carried = 1.0;
    for n in 1..=sched.n_max() {
        let Ok(p_even) = ecp1_step1_prob(&t) else {
            break;
        };
        let p_n = carried * p_even;
        if p_n < sched.term_cutoff() {
            break;
        }
        per1.push(p_n);
        if n < sched.n_max() {
            let Ok(p_odd) = step1_odd_prob(&t) else {
                break;
            };
            let Ok(next) = recoeff_step1_failure(&t) else {
                break;
            };
            carried *= p_odd;
            t = next;
            trace.push(next);
        }
    }

    let mut per2 = Vec::new();
    if !per1.is_empty() {
        if let Ok(mut t2) = step2_initial_triple(c) {
            let mut carried = 1.0;
            for m in 1..=sched.m_max() {
                let Ok(p_even) = step2_even_prob(&t2) else {
                    break;
                };
                let p_m = carried * p_even;
                if p_m < sched.term_cutoff() {
                    break;
                }
                per2.push(p_m);
                if m < sched.m_max() {
                    let Ok(p_odd) = step2_odd_prob(&t2) else {
                        break;
                    };
                    let Ok(next) = recoeff_step2_failure(&t2) else {
                        break;
                    };
                    carried *= p_odd;
                    t2 = next;
                    trace.push(next);
                }
            }
        }
    }

    let sum1: f64 = per1.iter().sum();
    let sum2: f64 = per2.iter().sum();
    let final_state = if sum1 * sum2 > 0.0 {
        let r = Rails::new();
        Some(make_w_state(
            &WCoefficients::symmetric(),
            [r.d1, r.b1, r.e1],
        )?)
    } else {
        None
    };
    Ok(ProtocolReport::from_rounds(per1, per2, final_state, trace))
}
