//! Brute-force verification of the protocols.
//!
//! `enumerate_tree` expands every measurement branch of a protocol run into
//! an explicit outcome tree, driving the circuit elements on actual states
//! and reading ancilla amplitudes off the evolving state itself -- no
//! closed-form probabilities or coefficient recursions are consulted.
//! `crosscheck` then compares the tree's branch masses against everything
//! the analytic module claims.

use std::fmt::{self, Write as _};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::elements::{
    charge_detect, hadamard, measure_spin, parity_gate, pbs, phase_correct, ChargeOutcome,
    ParityOutcome, ParityPorts, PbsPorts,
};
use crate::error::Result;
use crate::protocols::{
    ecp1_run, ecp1_step1_prob, ecp1_step2_prob, ecp1_total_prob, ecp2_run, p_step1_round,
    p_step2_round, IterationSchedule, Protocol, Rails,
};
use crate::state::{
    make_single_electron, make_w_state, relabel_mode, significant, tensor, ModeLabel, QuantumState,
    Spin, WCoefficients, ZERO_PROB,
};

/// Branches whose conditional probability falls below this are dropped
/// from the tree; the dropped unconditional mass is recorded on the parent
/// node. Pruning on the conditional value keeps legitimately rare deep
/// paths, whose unconditional mass shrinks doubly exponentially, while
/// still discarding numerical dust.
pub const PRUNE_BRANCH: f64 = 1e-15;

/// Tolerance for the tree-versus-closed-form comparison.
pub const CROSSCHECK_TOL: f64 = 1e-10;

/// What a single measurement along a path reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepEvent {
    Charge(ChargeOutcome),
    Parity(ParityOutcome),
    Measured(Spin),
}

impl fmt::Display for StepEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepEvent::Charge(ChargeOutcome::ExactlyOne) => "one",
            StepEvent::Charge(ChargeOutcome::ZeroOrTwo) => "zerotwo",
            StepEvent::Parity(ParityOutcome::Even) => "even",
            StepEvent::Parity(ParityOutcome::Odd) => "odd",
            StepEvent::Measured(Spin::Up) => "up",
            StepEvent::Measured(Spin::Down) => "down",
        })
    }
}

/// One entry of an outcome path: protocol step (1 or 2), round within that
/// step, and the observed event.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathStep {
    pub step: u8,
    pub round: usize,
    pub event: StepEvent,
}

impl fmt::Display for PathStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}r{}:{}", self.step, self.round, self.event)
    }
}

/// Whether a node still continues, has concentrated successfully, or is an
/// abandoned failure branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeStatus {
    Continue,
    Success,
    Failure,
}

/// A node of the outcome tree. `probability` is unconditional (measured
/// from the root), `state` is the normalized post-outcome state with any
/// phase correction already applied.
#[derive(Clone, Debug)]
pub struct OutcomeNode {
    pub path: Vec<PathStep>,
    pub probability: f64,
    pub state: QuantumState,
    pub status: NodeStatus,
    pub children: Vec<OutcomeNode>,
    /// Unconditional mass of sub-branches dropped by [`PRUNE_BRANCH`]
    /// while expanding this node.
    pub pruned_mass: f64,
}

impl OutcomeNode {
    fn new(path: Vec<PathStep>, probability: f64, state: QuantumState) -> Self {
        OutcomeNode {
            path,
            probability,
            state,
            status: NodeStatus::Continue,
            children: Vec::new(),
            pruned_mass: 0.0,
        }
    }

    /// Pre-order walk over the whole tree.
    pub fn walk(&self, visit: &mut impl FnMut(&OutcomeNode)) {
        visit(self);
        for child in &self.children {
            child.walk(visit);
        }
    }

    pub fn node_count(&self) -> usize {
        let mut count = 0;
        self.walk(&mut |_| count += 1);
        count
    }

    /// Total unconditional probability of reaching a success leaf.
    pub fn success_mass(&self) -> f64 {
        let mut total = 0.0;
        self.walk(&mut |node| {
            if node.status == NodeStatus::Success {
                total += node.probability;
            }
        });
        total
    }

    /// Total mass dropped by pruning anywhere in the tree.
    pub fn pruned_total(&self) -> f64 {
        let mut total = 0.0;
        self.walk(&mut |node| total += node.pruned_mass);
        total
    }

    /// Unconditional mass of the kept (`even` / `one`) branches of the
    /// given step and round, summed over all paths that reach them.
    pub fn round_mass(&self, step: u8, round: usize) -> f64 {
        let mut total = 0.0;
        self.walk(&mut |node| {
            if let Some(last) = node.path.last() {
                let kept = matches!(
                    last.event,
                    StepEvent::Charge(ChargeOutcome::ExactlyOne)
                        | StepEvent::Parity(ParityOutcome::Even)
                );
                if kept && last.step == step && last.round == round {
                    total += node.probability;
                }
            }
        });
        total
    }
}

/// Expands the complete outcome tree of a protocol run. Both measurement
/// results of every rotated ancilla rail are followed; failure branches of
/// the iterated protocol are recycled until the schedule's round limits,
/// while the single-pass protocol ignores the schedule. Ancilla amplitudes
/// are read off the current state, never off a coefficient recursion.
pub fn enumerate_tree(
    c: &WCoefficients,
    protocol: Protocol,
    sched: &IterationSchedule,
) -> Result<OutcomeNode> {
    let builder = TreeBuilder {
        protocol,
        sched: *sched,
        rails: Rails::new(),
    };
    let w = make_w_state(
        c,
        [
            builder.rails.a1.clone(),
            builder.rails.b1.clone(),
            builder.rails.c1.clone(),
        ],
    )?;
    let mut root = OutcomeNode::new(Vec::new(), 1.0, w);
    builder.expand_step1(&mut root, 1)?;
    Ok(root)
}

struct TreeBuilder {
    protocol: Protocol,
    sched: IterationSchedule,
    rails: Rails,
}

impl TreeBuilder {
    /// Node state lives on (a1, b1, c1); runs one step-1 round below it.
    fn expand_step1(&self, node: &mut OutcomeNode, round: usize) -> Result<()> {
        let r = &self.rails;
        let Some(ancilla) = rail_matched_ancilla(&node.state, &r.a1, &r.b1, &r.a2)? else {
            node.status = NodeStatus::Failure;
            return Ok(());
        };
        let joint = tensor(&node.state, &ancilla)?;
        for (event, prob, state) in self.split_step1(&joint)? {
            let reach = node.probability * prob;
            if prob < PRUNE_BRANCH {
                node.pruned_mass += reach;
                continue;
            }
            let path = extended(
                &node.path,
                PathStep {
                    step: 1,
                    round,
                    event,
                },
            );
            let mut child = OutcomeNode::new(path, reach, state);
            if kept_branch(event) {
                self.expand_measurement(&mut child, 1, round, &|this, next| {
                    this.expand_step2(next, 1)
                })?;
            } else if self.protocol == Protocol::Ecp2 && round < self.sched.n_max() {
                self.expand_measurement(&mut child, 1, round, &|this, next| {
                    next.state = relabel_mode(&next.state, &this.rails.d1, &this.rails.a1)?;
                    this.expand_step1(next, round + 1)
                })?;
            } else {
                child.status = NodeStatus::Failure;
            }
            node.children.push(child);
        }
        Ok(())
    }

    /// Node state lives on (d1, b1, c1); runs one step-2 round below it.
    fn expand_step2(&self, node: &mut OutcomeNode, round: usize) -> Result<()> {
        let r = &self.rails;
        let Some(ancilla) = rail_matched_ancilla(&node.state, &r.c1, &r.d1, &r.c2)? else {
            node.status = NodeStatus::Failure;
            return Ok(());
        };
        let joint = tensor(&node.state, &ancilla)?;
        for (event, prob, state) in self.split_step2(&joint)? {
            let reach = node.probability * prob;
            if prob < PRUNE_BRANCH {
                node.pruned_mass += reach;
                continue;
            }
            let path = extended(
                &node.path,
                PathStep {
                    step: 2,
                    round,
                    event,
                },
            );
            let mut child = OutcomeNode::new(path, reach, state);
            if kept_branch(event) {
                self.expand_measurement(&mut child, 2, round, &|_, leaf| {
                    leaf.status = NodeStatus::Success;
                    Ok(())
                })?;
            } else if self.protocol == Protocol::Ecp2 && round < self.sched.m_max() {
                self.expand_measurement(&mut child, 2, round, &|this, next| {
                    next.state = relabel_mode(&next.state, &this.rails.e1, &this.rails.c1)?;
                    this.expand_step2(next, round + 1)
                })?;
            } else {
                child.status = NodeStatus::Failure;
            }
            node.children.push(child);
        }
        Ok(())
    }

    /// Rotates and destructively measures the step's ancilla rail below
    /// `node`, applying the phase correction on the down outcome, then
    /// hands each surviving branch to `continue_with`.
    fn expand_measurement(
        &self,
        node: &mut OutcomeNode,
        step: u8,
        round: usize,
        continue_with: &dyn Fn(&Self, &mut OutcomeNode) -> Result<()>,
    ) -> Result<()> {
        let (measured, corrected) = match step {
            1 => (&self.rails.d2, &self.rails.d1),
            _ => (&self.rails.e2, &self.rails.e1),
        };
        let rotated = hadamard(&node.state, measured)?;
        for branch in measure_spin(&rotated, measured)? {
            let reach = node.probability * branch.probability;
            if branch.probability < PRUNE_BRANCH {
                node.pruned_mass += reach;
                continue;
            }
            let state = match branch.label {
                Spin::Up => branch.state,
                Spin::Down => phase_correct(&branch.state, corrected)?,
            };
            let path = extended(
                &node.path,
                PathStep {
                    step,
                    round,
                    event: StepEvent::Measured(branch.label),
                },
            );
            let mut child = OutcomeNode::new(path, reach, state);
            continue_with(self, &mut child)?;
            node.children.push(child);
        }
        Ok(())
    }

    fn split_step1(&self, joint: &QuantumState) -> Result<Vec<(StepEvent, f64, QuantumState)>> {
        let r = &self.rails;
        match self.protocol {
            Protocol::Ecp1 => {
                let mixed = pbs(
                    joint,
                    &PbsPorts::new(r.a1.clone(), r.a2.clone(), r.d1.clone(), r.d2.clone())?,
                );
                Ok(charge_detect(&mixed, std::slice::from_ref(&r.d1))
                    .into_iter()
                    .map(|b| (StepEvent::Charge(b.label), b.probability, b.state))
                    .collect())
            }
            Protocol::Ecp2 => Ok(parity_gate(
                joint,
                &ParityPorts::new(r.a1.clone(), r.a2.clone(), r.d1.clone(), r.d2.clone())?,
            )?
            .into_iter()
            .map(|b| (StepEvent::Parity(b.label), b.probability, b.state))
            .collect()),
        }
    }

    fn split_step2(&self, joint: &QuantumState) -> Result<Vec<(StepEvent, f64, QuantumState)>> {
        let r = &self.rails;
        match self.protocol {
            Protocol::Ecp1 => {
                let mixed = pbs(
                    joint,
                    &PbsPorts::new(r.c1.clone(), r.c2.clone(), r.e2.clone(), r.e1.clone())?,
                );
                Ok(charge_detect(&mixed, std::slice::from_ref(&r.e2))
                    .into_iter()
                    .map(|b| (StepEvent::Charge(b.label), b.probability, b.state))
                    .collect())
            }
            Protocol::Ecp2 => Ok(parity_gate(
                joint,
                &ParityPorts::new(r.c1.clone(), r.c2.clone(), r.e1.clone(), r.e2.clone())?,
            )?
            .into_iter()
            .map(|b| (StepEvent::Parity(b.label), b.probability, b.state))
            .collect()),
        }
    }
}

fn kept_branch(event: StepEvent) -> bool {
    matches!(
        event,
        StepEvent::Charge(ChargeOutcome::ExactlyOne) | StepEvent::Parity(ParityOutcome::Even)
    )
}

fn extended(path: &[PathStep], step: PathStep) -> Vec<PathStep> {
    let mut out = path.to_vec();
    out.push(step);
    out
}

/// Builds the next ancilla directly from the state: its up amplitude is the
/// amplitude of the term whose `up_from` rail points down, its down
/// amplitude that of the `down_from`-down term, renormalized. Returns
/// `None` when both vanish and no ancilla can be matched.
fn rail_matched_ancilla(
    state: &QuantumState,
    up_from: &ModeLabel,
    down_from: &ModeLabel,
    at: &ModeLabel,
) -> Result<Option<QuantumState>> {
    let x = down_term_amplitude(state, up_from);
    let y = down_term_amplitude(state, down_from);
    let norm_sqr = x.norm_sqr() + y.norm_sqr();
    if norm_sqr <= ZERO_PROB {
        return Ok(None);
    }
    let scale = norm_sqr.sqrt().recip();
    Ok(Some(make_single_electron(
        x * scale,
        y * scale,
        at.clone(),
    )?))
}

/// Amplitude of the term whose electron in `m` points down; zero if absent.
fn down_term_amplitude(state: &QuantumState, m: &ModeLabel) -> Complex64 {
    let mut found = Complex64::default();
    let mut hits = 0;
    for (cfg, amp) in state.terms() {
        if cfg.spin_in(m) == Some(Spin::Down) {
            found = amp;
            hits += 1;
        }
    }
    debug_assert!(hits <= 1, "resource states carry one down term per rail");
    found
}

/// True when every success leaf equals the balanced three-party state on
/// rails (d1, b1, e1) up to a global phase. A tree without success mass
/// passes vacuously; check [`OutcomeNode::success_mass`] when that matters.
pub fn success_state_check(root: &OutcomeNode) -> bool {
    let r = Rails::new();
    let Ok(target) = make_w_state(&WCoefficients::symmetric(), [r.d1, r.b1, r.e1]) else {
        return false;
    };
    let mut all_match = true;
    root.walk(&mut |node| {
        if node.status == NodeStatus::Success && !node.state.equiv_up_to_phase(&target, 1e-12) {
            all_match = false;
        }
    });
    all_match
}

/// Largest probability imbalance between any node and its children plus
/// its pruned mass. Zero for an exactly conserved tree.
pub fn conservation_imbalance(root: &OutcomeNode) -> f64 {
    let mut worst = 0.0f64;
    root.walk(&mut |node| {
        if !node.children.is_empty() || node.pruned_mass > 0.0 {
            let spread: f64 =
                node.children.iter().map(|c| c.probability).sum::<f64>() + node.pruned_mass;
            worst = worst.max((spread - node.probability).abs());
        }
    });
    worst
}

/// One line per node: its last path entry, unconditional probability at 12
/// significant digits (coarse enough to absorb branch-arithmetic rounding),
/// and a success/failure marker on leaves.
pub fn render_tree(root: &OutcomeNode) -> String {
    let mut out = String::new();
    render_node(root, 0, &mut out);
    out
}

fn render_node(node: &OutcomeNode, depth: usize, out: &mut String) {
    if !out.is_empty() {
        out.push('\n');
    }
    for _ in 0..depth {
        out.push_str("  ");
    }
    match node.path.last() {
        None => out.push_str("root"),
        Some(step) => {
            let _ = write!(out, "{step}");
        }
    }
    let _ = write!(out, " p={}", significant(node.probability, 12));
    match node.status {
        NodeStatus::Success => out.push_str(" success"),
        NodeStatus::Failure => out.push_str(" failure"),
        NodeStatus::Continue => {}
    }
    for child in &node.children {
        render_node(child, depth + 1, out);
    }
}

/// Outcome of comparing the enumerated trees against the analytic module.
/// Each entry pairs a quantity label with its tree-minus-analytic delta.
#[derive(Clone, Debug)]
pub struct CrossCheckReport {
    pub deltas: Vec<(String, f64)>,
    pub max_abs_delta: f64,
    pub pass: bool,
}

impl CrossCheckReport {
    pub(crate) fn from_deltas(deltas: Vec<(String, f64)>) -> Self {
        let max_abs_delta = deltas.iter().map(|(_, d)| d.abs()).fold(0.0, f64::max);
        CrossCheckReport {
            max_abs_delta,
            pass: max_abs_delta <= CROSSCHECK_TOL,
            deltas,
        }
    }
}

/// Enumerates both protocols at `c` and compares every branch mass against
/// the closed forms, the round series, and the simulated single pass.
/// Probability conservation and the success-state identity are folded in
/// as additional entries.
pub fn crosscheck(c: &WCoefficients, sched: &IterationSchedule) -> Result<CrossCheckReport> {
    let mut deltas = Vec::new();

    let tree1 = enumerate_tree(c, Protocol::Ecp1, sched)?;
    let p1_tree = tree1.round_mass(1, 1);
    deltas.push(("ecp1.p_step1".to_string(), p1_tree - ecp1_step1_prob(c)?));
    let p2_tree = if p1_tree > 0.0 {
        tree1.round_mass(2, 1) / p1_tree
    } else {
        0.0
    };
    deltas.push(("ecp1.p_step2".to_string(), p2_tree - ecp1_step2_prob(c)?));
    deltas.push((
        "ecp1.p_total".to_string(),
        tree1.success_mass() - ecp1_total_prob(c)?,
    ));
    let sim = ecp1_run(c)?;
    deltas.push((
        "ecp1.sim.p_total".to_string(),
        tree1.success_mass() - sim.p_total,
    ));
    deltas.push((
        "ecp1.conservation".to_string(),
        conservation_imbalance(&tree1),
    ));
    deltas.push((
        "ecp1.success_states".to_string(),
        if success_state_check(&tree1) {
            0.0
        } else {
            1.0
        },
    ));

    let tree2 = enumerate_tree(c, Protocol::Ecp2, sched)?;
    let mut sum1_tree = 0.0;
    for n in 1..=sched.n_max() {
        let mass = tree2.round_mass(1, n);
        sum1_tree += mass;
        deltas.push((format!("ecp2.p_step1[{n}]"), mass - p_step1_round(c, n)?));
    }
    for m in 1..=sched.m_max() {
        let conditional = if sum1_tree > 0.0 {
            tree2.round_mass(2, m) / sum1_tree
        } else {
            0.0
        };
        deltas.push((
            format!("ecp2.p_step2[{m}]"),
            conditional - p_step2_round(c, m)?,
        ));
    }
    let series = ecp2_run(c, sched)?;
    deltas.push((
        "ecp2.p_total".to_string(),
        tree2.success_mass() - series.p_total,
    ));
    deltas.push((
        "ecp2.conservation".to_string(),
        conservation_imbalance(&tree2),
    ));
    deltas.push((
        "ecp2.success_states".to_string(),
        if success_state_check(&tree2) {
            0.0
        } else {
            1.0
        },
    ));

    Ok(CrossCheckReport::from_deltas(deltas))
}

/// Deterministic pseudo-random coefficient triples for cross-checking.
/// Squared coefficients are drawn uniformly on the probability simplex,
/// rejecting draws with any square below 0.02 so that every closed-form
/// denominator stays well conditioned.
pub fn sample_coefficients(seed: u64, count: usize) -> Vec<WCoefficients> {
    const MIN_SQUARE: f64 = 0.02;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut draws = [0.0f64; 3];
        for d in &mut draws {
            let u: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
            *d = -u.ln();
        }
        let total: f64 = draws.iter().sum();
        if draws.iter().any(|d| d / total < MIN_SQUARE) {
            continue;
        }
        out.push(
            WCoefficients::from_squares(draws[0] / total, draws[1] / total)
                .expect("normalized simplex point"),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() <= tol,
            "expected {expected}, got {actual}"
        );
    }

    fn schedule(n: usize, m: usize) -> IterationSchedule {
        IterationSchedule::new(n, m, 1e-12).unwrap()
    }

    #[test]
    fn single_pass_tree_at_the_symmetric_point() {
        let root = enumerate_tree(
            &WCoefficients::symmetric(),
            Protocol::Ecp1,
            &IterationSchedule::default(),
        )
        .unwrap();
        assert_eq!(root.node_count(), 13);
        assert_close(root.success_mass(), 0.25, 1e-12);
        assert_close(root.round_mass(1, 1), 0.5, 1e-12);
        assert_close(conservation_imbalance(&root), 0.0, 1e-13);
        assert_close(root.pruned_total(), 0.0, 0.0);
        assert!(success_state_check(&root));
    }

    #[test]
    fn iterated_tree_reproduces_the_halving_series() {
        let root =
            enumerate_tree(&WCoefficients::symmetric(), Protocol::Ecp2, &schedule(3, 3)).unwrap();
        let sum1: f64 = (1..=3).map(|n| root.round_mass(1, n)).sum();
        for n in 1..=3 {
            assert_close(root.round_mass(1, n), 0.5f64.powi(n as i32), 1e-12);
            // step-2 round masses are scaled by the step-1 success mass
            assert_close(root.round_mass(2, n), sum1 * 0.5f64.powi(n as i32), 1e-12);
        }
        assert_close(root.success_mass(), 49.0 / 64.0, 1e-12);
        assert_close(conservation_imbalance(&root), 0.0, 1e-13);
        assert!(success_state_check(&root));
    }

    #[test]
    fn trees_without_a_workable_step_two_carry_no_success_mass() {
        let flat = WCoefficients::from_squares(0.5, 0.5).unwrap();
        for protocol in [Protocol::Ecp1, Protocol::Ecp2] {
            let root = enumerate_tree(&flat, protocol, &schedule(2, 2)).unwrap();
            assert_close(root.success_mass(), 0.0, 0.0);
            // vacuously true: there is nothing to compare
            assert!(success_state_check(&root));
            assert_close(conservation_imbalance(&root), 0.0, 1e-13);
        }
    }

    #[test]
    fn ancilla_extraction_reads_the_state_not_the_inputs() {
        // After one failed round the resource coefficients have changed;
        // the tree must still satisfy conservation and match the series,
        // which only works if each round's ancilla follows the state.
        let c = WCoefficients::from_squares(0.5, 1.0 / 3.0).unwrap();
        let root = enumerate_tree(&c, Protocol::Ecp2, &schedule(3, 1)).unwrap();
        for n in 1..=3 {
            assert_close(root.round_mass(1, n), p_step1_round(&c, n).unwrap(), 1e-12);
        }
    }

    #[test]
    fn crosscheck_passes_on_fixtures_and_sampled_triples() {
        let sched = schedule(3, 3);
        let mut triples = vec![
            WCoefficients::symmetric(),
            WCoefficients::from_squares(0.5, 1.0 / 3.0).unwrap(),
        ];
        triples.extend(sample_coefficients(99, 5));
        for c in triples {
            let report = crosscheck(&c, &sched).unwrap();
            assert!(
                report.pass,
                "max delta {} for {:?}",
                report.max_abs_delta, c
            );
        }
    }

    #[test]
    fn crosscheck_flags_a_corrupted_comparison() {
        let honest = CrossCheckReport::from_deltas(vec![("q".into(), 5e-11)]);
        assert!(honest.pass);
        let corrupted = CrossCheckReport::from_deltas(vec![("q".into(), 1e-6)]);
        assert!(!corrupted.pass);
        assert_close(corrupted.max_abs_delta, 1e-6, 0.0);
    }

    #[test]
    fn sampled_coefficients_are_deterministic_and_interior() {
        let a = sample_coefficients(42, 20);
        let b = sample_coefficients(42, 20);
        assert_eq!(a, b);
        for c in &a {
            for sq in [c.alpha_sq(), c.beta_sq(), c.gamma_sq()] {
                assert!(sq >= 0.02 - 1e-12, "square {sq} not interior");
            }
        }
        let other = sample_coefficients(43, 20);
        assert_ne!(a, other);
    }

    #[test]
    fn rendering_matches_the_frozen_single_pass_tree() {
        let root = enumerate_tree(
            &WCoefficients::symmetric(),
            Protocol::Ecp1,
            &IterationSchedule::default(),
        )
        .unwrap();
        let expected = include_str!("../tests/golden/ecp1_symmetric_tree.txt");
        assert_eq!(render_tree(&root), expected.trim_end_matches('\n'));
    }

    #[test]
    fn rendering_matches_the_frozen_single_round_parity_tree() {
        let root =
            enumerate_tree(&WCoefficients::symmetric(), Protocol::Ecp2, &schedule(1, 1)).unwrap();
        let expected = include_str!("../tests/golden/ecp2_symmetric_single_round_tree.txt");
        assert_eq!(render_tree(&root), expected.trim_end_matches('\n'));
    }
}
