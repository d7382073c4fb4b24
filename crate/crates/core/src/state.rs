//! Sparse state vectors for a handful of spin-1/2 electrons in labeled
//! spatial modes.
//!
//! A basis configuration assigns one mode and one spin to every electron, in
//! a fixed electron order; electrons are distinguishable and no exchange
//! sign is applied. States are sparse complex superpositions over such
//! configurations and are kept at unit norm, so branch weights read off
//! directly as probabilities.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on the squared norm of anything claiming to be normalized.
pub const NORM_TOL: f64 = 1e-12;

/// Amplitudes below this magnitude are dropped as numerical dust.
pub const AMP_PRUNE: f64 = 1e-15;

/// Branch weights below this are treated as exactly zero. This is the
/// square of [`AMP_PRUNE`]: a branch made entirely of prunable amplitudes
/// can never exceed it.
pub const ZERO_PROB: f64 = 1e-30;

/// Spin projection of a single electron.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    /// One-letter tag used in the text rendering.
    pub fn letter(self) -> char {
        match self {
            Spin::Up => 'u',
            Spin::Down => 'd',
        }
    }
}

/// Name of a spatial mode (an input or output rail of the optics).
///
/// Labels are cheap to clone and compare by their text.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeLabel(Arc<str>);

impl ModeLabel {
    /// Creates a label. The name must be nonempty.
    pub fn new(name: &str) -> Result<Self> {
        if name.is_empty() {
            return Err(Error::InvalidArgument("mode label must be nonempty".into()));
        }
        Ok(ModeLabel(Arc::from(name)))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Shorthand for a label from a literal name. Panics on an empty name, so
/// reserve it for fixed rail names written in source.
pub fn mode(name: &str) -> ModeLabel {
    ModeLabel::new(name).expect("mode label literal must be nonempty")
}

/// One basis configuration: mode and spin per electron, in electron order.
///
/// The position in the list is the electron's identity and is never
/// permuted; a destructive measurement removes an entry and the survivors
/// keep their relative order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    slots: Vec<(ModeLabel, Spin)>,
}

impl Configuration {
    /// Builds a configuration; at least one electron is required.
    pub fn new(slots: Vec<(ModeLabel, Spin)>) -> Result<Self> {
        if slots.is_empty() {
            return Err(Error::InvalidArgument(
                "configuration needs at least one electron".into(),
            ));
        }
        Ok(Configuration { slots })
    }

    pub fn electron_count(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[(ModeLabel, Spin)] {
        &self.slots
    }

    /// Number of electrons sitting in `m`.
    pub fn occupancy(&self, m: &ModeLabel) -> usize {
        self.slots.iter().filter(|(label, _)| label == m).count()
    }

    /// Number of electrons inside a set of modes.
    pub fn count_in(&self, region: &[ModeLabel]) -> usize {
        self.slots
            .iter()
            .filter(|(label, _)| region.contains(label))
            .count()
    }

    /// Spin of the electron in `m`, if exactly one electron is there.
    pub fn spin_in(&self, m: &ModeLabel) -> Option<Spin> {
        let mut found = None;
        for (label, spin) in &self.slots {
            if label == m {
                if found.is_some() {
                    return None;
                }
                found = Some(*spin);
            }
        }
        found
    }

    /// Index of the unique electron in `m`, or an occupancy error.
    pub(crate) fn single_position(&self, m: &ModeLabel) -> Result<usize> {
        let mut positions = self
            .slots
            .iter()
            .enumerate()
            .filter(|(_, (label, _))| label == m)
            .map(|(i, _)| i);
        match (positions.next(), positions.next()) {
            (Some(i), None) => Ok(i),
            (None, _) => Err(Error::InvalidArgument(format!(
                "mode {m} is empty in some configuration"
            ))),
            (Some(_), Some(_)) => Err(Error::InvalidArgument(format!(
                "mode {m} holds more than one electron in some configuration"
            ))),
        }
    }

    pub(crate) fn with_slot(&self, idx: usize, slot: (ModeLabel, Spin)) -> Configuration {
        let mut slots = self.slots.clone();
        slots[idx] = slot;
        Configuration { slots }
    }

    pub(crate) fn without_slot(&self, idx: usize) -> Result<Configuration> {
        let mut slots = self.slots.clone();
        slots.remove(idx);
        Configuration::new(slots)
    }

    /// View with electrons sorted by (mode, spin); this is the electron-order
    /// agnostic identity of the configuration.
    pub(crate) fn mode_sorted(&self) -> Configuration {
        let mut slots = self.slots.clone();
        slots.sort();
        Configuration { slots }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (m, s)) in self.slots.iter().enumerate() {
            if i > 0 {
                f.write_char(' ')?;
            }
            write!(f, "|{}>_{}", s.letter(), m)?;
        }
        Ok(())
    }
}

/// Real, non-negative coefficient triple (alpha, beta, gamma) with
/// alpha^2 + beta^2 + gamma^2 = 1. This is the classical knowledge the
/// parties share about their state.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct WCoefficients {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl WCoefficients {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        for (name, value) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidArgument(format!(
                    "coefficient {name} must lie in [0, 1], got {value}"
                )));
            }
        }
        let norm_sqr = alpha * alpha + beta * beta + gamma * gamma;
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(WCoefficients { alpha, beta, gamma })
    }

    /// Builds the triple from the two free squared coefficients;
    /// gamma^2 is the complement.
    pub fn from_squares(alpha_sq: f64, beta_sq: f64) -> Result<Self> {
        for (name, value) in [("alpha_sq", alpha_sq), ("beta_sq", beta_sq)] {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must lie in [0, 1], got {value}"
                )));
            }
        }
        let gamma_sq = 1.0 - alpha_sq - beta_sq;
        if gamma_sq < -NORM_TOL {
            return Err(Error::InvalidArgument(format!(
                "alpha_sq + beta_sq = {} exceeds one",
                alpha_sq + beta_sq
            )));
        }
        WCoefficients::new(alpha_sq.sqrt(), beta_sq.sqrt(), gamma_sq.max(0.0).sqrt())
    }

    /// The maximally entangled point alpha = beta = gamma = 1/sqrt(3).
    pub fn symmetric() -> Self {
        let c = 3f64.sqrt().recip();
        WCoefficients {
            alpha: c,
            beta: c,
            gamma: c,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn alpha_sq(&self) -> f64 {
        self.alpha * self.alpha
    }

    pub fn beta_sq(&self) -> f64 {
        self.beta * self.beta
    }

    pub fn gamma_sq(&self) -> f64 {
        self.gamma * self.gamma
    }
}

/// Sparse unit-norm superposition over [`Configuration`]s, all with the same
/// electron count. Terms are held in a sorted map so iteration, rendering
/// and comparison are deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    terms: BTreeMap<Configuration, Complex64>,
}

impl QuantumState {
    /// Builds a state from explicit terms. Duplicate configurations are
    /// merged, dust amplitudes are pruned, and the result must be unit norm
    /// with a uniform electron count.
    pub fn from_terms(terms: impl IntoIterator<Item = (Configuration, Complex64)>) -> Result<Self> {
        let mut map: BTreeMap<Configuration, Complex64> = BTreeMap::new();
        for (cfg, amp) in terms {
            *map.entry(cfg).or_default() += amp;
        }
        map.retain(|_, amp| amp.norm() > AMP_PRUNE);
        let state = QuantumState { terms: map };
        state.check_uniform()?;
        let norm_sqr = state.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(state)
    }

    /// Internal constructor for operations that preserve the norm by
    /// construction. Prunes dust and checks the invariants in debug builds.
    pub(crate) fn from_normalized_map(mut map: BTreeMap<Configuration, Complex64>) -> Self {
        map.retain(|_, amp| amp.norm() > AMP_PRUNE);
        let state = QuantumState { terms: map };
        debug_assert!(state.check_uniform().is_ok());
        debug_assert!(
            (state.norm_sqr() - 1.0).abs() < 1e-9,
            "norm drifted: {}",
            state.norm_sqr()
        );
        state
    }

    fn check_uniform(&self) -> Result<()> {
        let mut counts = self.terms.keys().map(Configuration::electron_count);
        let Some(first) = counts.next() else {
            return Err(Error::InvalidArgument(
                "state needs at least one term".into(),
            ));
        };
        if counts.any(|n| n != first) {
            return Err(Error::InvalidArgument(
                "all configurations must hold the same number of electrons".into(),
            ));
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Configuration, Complex64)> {
        self.terms.iter().map(|(cfg, amp)| (cfg, *amp))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn electron_count(&self) -> usize {
        self.terms
            .keys()
            .next()
            .map(Configuration::electron_count)
            .unwrap_or(0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|amp| amp.norm_sqr()).sum()
    }

    /// Amplitude of an exact (electron-ordered) configuration.
    pub fn amplitude(&self, cfg: &Configuration) -> Complex64 {
        self.terms.get(cfg).copied().unwrap_or_default()
    }

    /// Amplitude of a configuration given as an unordered mode/spin
    /// assignment: electron order is ignored, coinciding terms are summed.
    pub fn amplitude_unordered(&self, slots: &[(ModeLabel, Spin)]) -> Complex64 {
        let mut key = slots.to_vec();
        key.sort();
        self.terms
            .iter()
            .filter(|(cfg, _)| cfg.mode_sorted().slots == key)
            .map(|(_, amp)| *amp)
            .sum()
    }

    /// Every mode label appearing in any term.
    pub fn modes_used(&self) -> BTreeSet<ModeLabel> {
        self.terms
            .keys()
            .flat_map(|cfg| cfg.slots.iter().map(|(m, _)| m.clone()))
            .collect()
    }

    /// Canonical text rendering: one term per line, sorted by
    /// configuration, amplitudes at 15 significant digits.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (cfg, amp) in &self.terms {
            if !out.is_empty() {
                out.push('\n');
            }
            let _ = write!(out, "({},{}) {}", sig15(amp.re), sig15(amp.im), cfg);
        }
        out
    }

    /// Term-by-term equality in the stored electron order.
    pub fn approx_eq(&self, other: &QuantumState, tol: f64) -> bool {
        maps_close(&self.terms, &other.terms, tol, Complex64::new(1.0, 0.0))
    }

    /// Physical equality: electron order is ignored (configurations are
    /// compared as mode/spin multisets), amplitudes must match exactly.
    pub fn equiv(&self, other: &QuantumState, tol: f64) -> bool {
        maps_close(
            &self.canonical_map(),
            &other.canonical_map(),
            tol,
            Complex64::new(1.0, 0.0),
        )
    }

    /// Physical equality up to one global phase.
    pub fn equiv_up_to_phase(&self, other: &QuantumState, tol: f64) -> bool {
        let a = self.canonical_map();
        let b = other.canonical_map();
        let Some((ref_cfg, ref_amp)) = a
            .iter()
            .max_by(|x, y| x.1.norm_sqr().total_cmp(&y.1.norm_sqr()))
        else {
            return b.is_empty();
        };
        let Some(other_amp) = b.get(ref_cfg) else {
            return false;
        };
        let ratio = other_amp / ref_amp;
        if (ratio.norm() - 1.0).abs() > tol {
            return false;
        }
        let phase = ratio / ratio.norm();
        maps_close(&a, &b, tol, phase)
    }

    fn canonical_map(&self) -> BTreeMap<Configuration, Complex64> {
        let mut map: BTreeMap<Configuration, Complex64> = BTreeMap::new();
        for (cfg, amp) in &self.terms {
            *map.entry(cfg.mode_sorted()).or_default() += amp;
        }
        map.retain(|_, amp| amp.norm() > AMP_PRUNE);
        map
    }
}

/// |b[k] - phase * a[k]| <= tol over the union of keys.
fn maps_close(
    a: &BTreeMap<Configuration, Complex64>,
    b: &BTreeMap<Configuration, Complex64>,
    tol: f64,
    phase: Complex64,
) -> bool {
    a.keys()
        .chain(b.keys().filter(|k| !a.contains_key(k)))
        .all(|key| {
            let left = a.get(key).copied().unwrap_or_default();
            let right = b.get(key).copied().unwrap_or_default();
            (right - phase * left).norm() <= tol
        })
}

/// The shared three-electron resource state
/// alpha |d u u> + beta |u d u> + gamma |u u d> on the given modes.
pub fn make_w_state(c: &WCoefficients, modes: [ModeLabel; 3]) -> Result<QuantumState> {
    let [m1, m2, m3] = modes;
    if m1 == m2 || m1 == m3 || m2 == m3 {
        return Err(Error::InvalidArgument(
            "the three modes of a W state must be distinct".into(),
        ));
    }
    let up = |m: &ModeLabel| (m.clone(), Spin::Up);
    let down = |m: &ModeLabel| (m.clone(), Spin::Down);
    let terms = [
        (vec![down(&m1), up(&m2), up(&m3)], c.alpha()),
        (vec![up(&m1), down(&m2), up(&m3)], c.beta()),
        (vec![up(&m1), up(&m2), down(&m3)], c.gamma()),
    ];
    QuantumState::from_terms(
        terms
            .into_iter()
            .filter(|(_, amp)| *amp != 0.0)
            .map(|(slots, amp)| (Configuration { slots }, Complex64::new(amp, 0.0))),
    )
}

/// A single electron in mode `m`: amp_up |u> + amp_down |d>.
pub fn make_single_electron(
    amp_up: Complex64,
    amp_down: Complex64,
    m: ModeLabel,
) -> Result<QuantumState> {
    QuantumState::from_terms([
        (Configuration::new(vec![(m.clone(), Spin::Up)])?, amp_up),
        (Configuration::new(vec![(m, Spin::Down)])?, amp_down),
    ])
}

/// Tensor product; `b`'s electrons are appended after `a`'s. The two states
/// must not share any mode label.
pub fn tensor(a: &QuantumState, b: &QuantumState) -> Result<QuantumState> {
    if let Some(shared) = a.modes_used().intersection(&b.modes_used()).next() {
        return Err(Error::InvalidArgument(format!(
            "tensor factors share mode {shared}"
        )));
    }
    let mut map: BTreeMap<Configuration, Complex64> = BTreeMap::new();
    for (cfg_a, amp_a) in &a.terms {
        for (cfg_b, amp_b) in &b.terms {
            let mut slots = cfg_a.slots.clone();
            slots.extend_from_slice(&cfg_b.slots);
            *map.entry(Configuration { slots }).or_default() += amp_a * amp_b;
        }
    }
    Ok(QuantumState::from_normalized_map(map))
}

/// Probability weight of the configurations selected by `pred`.
pub fn branch_probability(state: &QuantumState, pred: impl Fn(&Configuration) -> bool) -> f64 {
    state
        .terms
        .iter()
        .filter(|(cfg, _)| pred(cfg))
        .map(|(_, amp)| amp.norm_sqr())
        .sum()
}

/// Projects onto the configurations selected by `pred` and renormalizes.
/// Returns the branch probability together with the post-selection state.
pub fn project_and_normalize(
    state: &QuantumState,
    pred: impl Fn(&Configuration) -> bool,
) -> Result<(f64, QuantumState)> {
    let prob = branch_probability(state, &pred);
    if prob <= ZERO_PROB {
        return Err(Error::EmptyBranch);
    }
    let scale = prob.sqrt().recip();
    let map = state
        .terms
        .iter()
        .filter(|(cfg, _)| pred(cfg))
        .map(|(cfg, amp)| (cfg.clone(), amp * scale))
        .collect();
    Ok((prob, QuantumState::from_normalized_map(map)))
}

/// Renames mode `from` to `to` wherever it appears. `to` must be unused.
pub fn relabel_mode(
    state: &QuantumState,
    from: &ModeLabel,
    to: &ModeLabel,
) -> Result<QuantumState> {
    if state.modes_used().contains(to) {
        return Err(Error::InvalidArgument(format!(
            "relabel target {to} is already occupied"
        )));
    }
    let map = state
        .terms
        .iter()
        .map(|(cfg, amp)| {
            let slots = cfg
                .slots
                .iter()
                .map(|(m, s)| {
                    if m == from {
                        (to.clone(), *s)
                    } else {
                        (m.clone(), *s)
                    }
                })
                .collect();
            (Configuration { slots }, *amp)
        })
        .collect();
    Ok(QuantumState::from_normalized_map(map))
}

/// Formats `x` with 15 significant digits and no trailing zeros, switching
/// to exponent notation outside the range where a plain decimal stays short.
pub fn sig15(x: f64) -> String {
    significant(x, 15)
}

/// [`sig15`] with a caller-chosen number of significant digits (1 to 17).
pub fn significant(x: f64, sig_digits: u8) -> String {
    let sig_digits = sig_digits.clamp(1, 17);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp_form = format!("{:.*e}", usize::from(sig_digits) - 1, x);
    let (mantissa, exp_str) = exp_form.split_once('e').expect("exponent notation");
    let exponent: i32 = exp_str.parse().expect("integer exponent");
    let sign = if mantissa.starts_with('-') { "-" } else { "" };
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    if (0..15).contains(&exponent) {
        let point = exponent as usize + 1;
        if digits.len() > point {
            format!("{sign}{}.{}", &digits[..point], &digits[point..])
        } else {
            format!("{sign}{}{}", digits, "0".repeat(point - digits.len()))
        }
    } else if (-4..0).contains(&exponent) {
        format!("{sign}0.{}{}", "0".repeat(-(exponent + 1) as usize), digits)
    } else if digits.len() > 1 {
        format!("{sign}{}.{}e{}", &digits[..1], &digits[1..], exponent)
    } else {
        format!("{sign}{digits}e{exponent}")
    }
}
