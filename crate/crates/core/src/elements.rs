//! Circuit elements acting on electron states: the spin-dependent beam
//! splitter, the charge detector, the parity-check gate, the single-mode
//! Hadamard rotation, destructive spin measurement, and the conditional
//! phase flip.
//!
//! Measurement-like elements return every outcome branch with its
//! probability and renormalized post-state; branches of zero weight are
//! omitted, so the returned probabilities always sum to one.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{
    project_and_normalize, relabel_mode, Configuration, ModeLabel, QuantumState, Spin, ZERO_PROB,
};

/// What the charge detector on the watched region reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChargeOutcome {
    /// Exactly one electron in the region; the kept branch.
    ExactlyOne,
    /// Zero or two electrons; indistinguishable to the detector.
    ZeroOrTwo,
}

/// Result of the complete parity check on two modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParityOutcome {
    /// Both spins equal.
    Even,
    /// Spins differ.
    Odd,
}

/// One measurement branch: outcome label, probability, renormalized state.
#[derive(Clone, Debug)]
pub struct BranchOutcome<L> {
    pub label: L,
    pub probability: f64,
    pub state: QuantumState,
}

/// Port assignment of the beam splitter: two inputs, two outputs.
///
/// Routing is spin-dependent: from `in_a`, up goes to `out_1` and down to
/// `out_2`; from `in_b`, up goes to `out_2` and down to `out_1`. The charge
/// detector of the protocols watches `out_1`.
#[derive(Clone, Debug)]
pub struct PbsPorts {
    pub in_a: ModeLabel,
    pub in_b: ModeLabel,
    pub out_1: ModeLabel,
    pub out_2: ModeLabel,
}

impl PbsPorts {
    pub fn new(
        in_a: ModeLabel,
        in_b: ModeLabel,
        out_1: ModeLabel,
        out_2: ModeLabel,
    ) -> Result<Self> {
        let labels = [&in_a, &in_b, &out_1, &out_2];
        for (i, a) in labels.iter().enumerate() {
            for b in &labels[i + 1..] {
                if a == b {
                    return Err(Error::InvalidArgument(format!(
                        "beam splitter ports must be distinct, {a} repeats"
                    )));
                }
            }
        }
        Ok(PbsPorts {
            in_a,
            in_b,
            out_1,
            out_2,
        })
    }
}

/// Port assignment of the parity-check gate. Electrons stay on their rail:
/// `in_a` is relabeled to `out_a` and `in_b` to `out_b`.
#[derive(Clone, Debug)]
pub struct ParityPorts {
    pub in_a: ModeLabel,
    pub in_b: ModeLabel,
    pub out_a: ModeLabel,
    pub out_b: ModeLabel,
}

impl ParityPorts {
    pub fn new(
        in_a: ModeLabel,
        in_b: ModeLabel,
        out_a: ModeLabel,
        out_b: ModeLabel,
    ) -> Result<Self> {
        let labels = [&in_a, &in_b, &out_a, &out_b];
        for (i, a) in labels.iter().enumerate() {
            for b in &labels[i + 1..] {
                if a == b {
                    return Err(Error::InvalidArgument(format!(
                        "parity gate ports must be distinct, {a} repeats"
                    )));
                }
            }
        }
        Ok(ParityPorts {
            in_a,
            in_b,
            out_a,
            out_b,
        })
    }
}

/// Sends each electron in the input ports to its spin-dependent output
/// port; electrons elsewhere are untouched. A pure relabeling, so the norm
/// is preserved exactly.
pub fn pbs(state: &QuantumState, ports: &PbsPorts) -> QuantumState {
    let mut map: BTreeMap<Configuration, Complex64> = BTreeMap::new();
    for (cfg, amp) in state.terms() {
        let slots = cfg
            .slots()
            .iter()
            .map(|(m, s)| {
                let out = if m == &ports.in_a {
                    match s {
                        Spin::Up => &ports.out_1,
                        Spin::Down => &ports.out_2,
                    }
                } else if m == &ports.in_b {
                    match s {
                        Spin::Up => &ports.out_2,
                        Spin::Down => &ports.out_1,
                    }
                } else {
                    m
                };
                (out.clone(), *s)
            })
            .collect();
        *map.entry(Configuration::new(slots).expect("same electron count"))
            .or_default() += amp;
    }
    QuantumState::from_normalized_map(map)
}

/// Measures how many electrons sit in `region`, resolving only "exactly
/// one" against "zero or two". Nondestructive: spins and modes survive.
/// Branch order is [`ChargeOutcome::ExactlyOne`], [`ChargeOutcome::ZeroOrTwo`].
pub fn charge_detect(
    state: &QuantumState,
    region: &[ModeLabel],
) -> Vec<BranchOutcome<ChargeOutcome>> {
    [ChargeOutcome::ExactlyOne, ChargeOutcome::ZeroOrTwo]
        .into_iter()
        .filter_map(|label| {
            let wanted = |cfg: &Configuration| match label {
                ChargeOutcome::ExactlyOne => cfg.count_in(region) == 1,
                ChargeOutcome::ZeroOrTwo => cfg.count_in(region) != 1,
            };
            project_and_normalize(state, wanted)
                .ok()
                .map(|(probability, state)| BranchOutcome {
                    label,
                    probability,
                    state,
                })
        })
        .collect()
}

/// Diagnostic variant of the detector that resolves the exact electron
/// count in `region`, in ascending count order. The physical detector
/// cannot tell zero from two; this one exists for tests and debugging.
pub fn charge_counts(state: &QuantumState, region: &[ModeLabel]) -> Vec<BranchOutcome<usize>> {
    let counts: std::collections::BTreeSet<usize> =
        state.terms().map(|(cfg, _)| cfg.count_in(region)).collect();
    counts
        .into_iter()
        .filter_map(|count| {
            project_and_normalize(state, |cfg| cfg.count_in(region) == count)
                .ok()
                .map(|(probability, state)| BranchOutcome {
                    label: count,
                    probability,
                    state,
                })
        })
        .collect()
}

/// Complete two-mode parity check: projects onto equal spins (even) or
/// opposite spins (odd) without destroying the electrons, relabeling the
/// rails `in_a -> out_a`, `in_b -> out_b`. Both input modes must hold
/// exactly one electron in every configuration.
/// Branch order is [`ParityOutcome::Even`], [`ParityOutcome::Odd`].
pub fn parity_gate(
    state: &QuantumState,
    ports: &ParityPorts,
) -> Result<Vec<BranchOutcome<ParityOutcome>>> {
    for (cfg, _) in state.terms() {
        cfg.single_position(&ports.in_a)?;
        cfg.single_position(&ports.in_b)?;
    }
    let mut branches = Vec::new();
    for label in [ParityOutcome::Even, ParityOutcome::Odd] {
        let wanted = |cfg: &Configuration| {
            let a = cfg.spin_in(&ports.in_a).expect("validated occupancy");
            let b = cfg.spin_in(&ports.in_b).expect("validated occupancy");
            match label {
                ParityOutcome::Even => a == b,
                ParityOutcome::Odd => a != b,
            }
        };
        let (probability, kept) = match project_and_normalize(state, wanted) {
            Ok(split) => split,
            Err(Error::EmptyBranch) => continue,
            Err(other) => return Err(other),
        };
        let moved = relabel_mode(&kept, &ports.in_a, &ports.out_a)?;
        let moved = relabel_mode(&moved, &ports.in_b, &ports.out_b)?;
        branches.push(BranchOutcome {
            label,
            probability,
            state: moved,
        });
    }
    Ok(branches)
}

/// Hadamard rotation of the spin in mode `m`:
/// |u> -> (|u> + |d>)/sqrt(2), |d> -> (|u> - |d>)/sqrt(2).
/// Every configuration must hold exactly one electron in `m`.
pub fn hadamard(state: &QuantumState, m: &ModeLabel) -> Result<QuantumState> {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut map: BTreeMap<Configuration, Complex64> = BTreeMap::new();
    for (cfg, amp) in state.terms() {
        let idx = cfg.single_position(m)?;
        let spin = cfg.slots()[idx].1;
        let up = cfg.with_slot(idx, (m.clone(), Spin::Up));
        let down = cfg.with_slot(idx, (m.clone(), Spin::Down));
        *map.entry(up).or_default() += amp * inv_sqrt2;
        let sign = match spin {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        };
        *map.entry(down).or_default() += amp * inv_sqrt2 * sign;
    }
    Ok(QuantumState::from_normalized_map(map))
}

/// Destructively measures the spin in mode `m`; the measured electron is
/// removed from the surviving configurations. Branch order is
/// [`Spin::Up`], [`Spin::Down`].
pub fn measure_spin(state: &QuantumState, m: &ModeLabel) -> Result<Vec<BranchOutcome<Spin>>> {
    if state.electron_count() < 2 {
        return Err(Error::InvalidArgument(
            "measuring the last electron would leave an empty state".into(),
        ));
    }
    let mut masses: BTreeMap<Spin, f64> = BTreeMap::new();
    let mut posts: BTreeMap<Spin, BTreeMap<Configuration, Complex64>> = BTreeMap::new();
    for (cfg, amp) in state.terms() {
        let idx = cfg.single_position(m)?;
        let spin = cfg.slots()[idx].1;
        *masses.entry(spin).or_default() += amp.norm_sqr();
        *posts
            .entry(spin)
            .or_default()
            .entry(cfg.without_slot(idx)?)
            .or_default() += amp;
    }
    Ok([Spin::Up, Spin::Down]
        .into_iter()
        .filter_map(|spin| {
            let probability = masses.get(&spin).copied().unwrap_or(0.0);
            if probability <= ZERO_PROB {
                return None;
            }
            let scale = probability.sqrt().recip();
            let map = posts
                .remove(&spin)?
                .into_iter()
                .map(|(cfg, amp)| (cfg, amp * scale))
                .collect();
            Some(BranchOutcome {
                label: spin,
                probability,
                state: QuantumState::from_normalized_map(map),
            })
        })
        .collect())
}

/// Conditional phase flip in mode `m`: |d> picks up a minus sign.
/// Every configuration must hold exactly one electron in `m`.
pub fn phase_correct(state: &QuantumState, m: &ModeLabel) -> Result<QuantumState> {
    let map = state
        .terms()
        .map(|(cfg, amp)| {
            let idx = cfg.single_position(m)?;
            let sign = match cfg.slots()[idx].1 {
                Spin::Up => 1.0,
                Spin::Down => -1.0,
            };
            Ok((cfg.clone(), amp * sign))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(QuantumState::from_normalized_map(map))
}

/// Checks that a full set of outcome branches covers all probability.
pub fn total_probability<L>(branches: &[BranchOutcome<L>]) -> f64 {
    branches.iter().map(|b| b.probability).sum()
}
