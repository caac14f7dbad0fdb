//! Gate-level simulation of the walk on a qutrit / shift-qubit chain.
//!
//! Each qutrit `Q_i` encodes one walker position: `|g⟩` is an empty site,
//! `|e⟩` and `|f⟩` carry the walker with coin `|1⟩` and `|0⟩` respectively.
//! Shift qubits `SQ_j` sit between `Q_j` and `Q_{j+1}`. The coin is an SU(2)
//! rotation in `{|e⟩, |f⟩}`; the shift is two SWAP sublayers that pass the
//! `|e⟩` excitation through the shift qubit into the next qutrit while `|f⟩`
//! stays put, which is exactly the compact unidirectional walk.
//!
//! The walk never creates a second excitation and amplitude damping only
//! removes one, so the density operator is kept on the ≤1-excitation basis
//! `{vacuum, e_0, f_0, …, e_{n−1}, f_{n−1}, sq_0, …, sq_{n−2}}`
//! (dimension `3n`), which is exact for this circuit family.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::Distribution;
use crate::walk::{self, coin_matrix, CoinProfile, Mat2, ProfileKind, Spinor};
use crate::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Gate durations in nanoseconds. The defaults are placeholders, not
/// calibrated device values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateDurations {
    pub su2_ef_ns: f64,
    pub swap_ns: f64,
    pub pi_ge_ns: f64,
}

impl Default for GateDurations {
    fn default() -> Self {
        GateDurations { su2_ef_ns: 40.0, swap_ns: 50.0, pi_ge_ns: 40.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainLayout {
    pub n_qutrits: usize,
    #[serde(default)]
    pub durations: GateDurations,
}

impl Default for ChainLayout {
    fn default() -> Self {
        ChainLayout { n_qutrits: 10, durations: GateDurations::default() }
    }
}

impl ChainLayout {
    pub fn new(n_qutrits: usize) -> Result<Self> {
        let layout = ChainLayout { n_qutrits, ..Default::default() };
        layout.validate()?;
        Ok(layout)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qutrits == 0 {
            return Err(Error::InvalidArgument("layout needs at least one qutrit".into()));
        }
        let d = self.durations;
        if !(d.su2_ef_ns > 0.0 && d.swap_ns > 0.0 && d.pi_ge_ns > 0.0) {
            return Err(Error::InvalidArgument("gate durations must be positive".into()));
        }
        Ok(())
    }

    pub fn n_shift_qubits(&self) -> usize {
        self.n_qutrits - 1
    }

    pub fn dim(&self) -> usize {
        1 + 2 * self.n_qutrits + self.n_shift_qubits()
    }

    /// Longest walk that fits on the chain.
    pub fn max_steps(&self) -> usize {
        self.n_qutrits - 1
    }

    pub const VACUUM: usize = 0;

    pub fn e(&self, qutrit: usize) -> usize {
        1 + 2 * qutrit
    }

    pub fn f(&self, qutrit: usize) -> usize {
        2 + 2 * qutrit
    }

    pub fn sq(&self, shift_qubit: usize) -> usize {
        1 + 2 * self.n_qutrits + shift_qubit
    }

    pub fn qutrit_label(i: usize) -> String {
        format!("Q{i}")
    }

    pub fn shift_label(j: usize) -> String {
        format!("SQ{j}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "gate")]
pub enum Gate {
    /// π pulse on `|g⟩ ↔ |e⟩`.
    PiGe { qutrit: usize },
    /// `exp[iθ n̂·σ/2]` on `(|f⟩, |e⟩)` = coin `(|0⟩, |1⟩)`.
    Su2Ef { qutrit: usize, theta: f64, axis: f64 },
    /// SWAP `Q_i|e⟩ ↔ SQ_i`.
    SwapIn { qutrit: usize },
    /// SWAP `SQ_j ↔ Q_{j+1}|e⟩`.
    SwapOut { shift_qubit: usize },
}

/// A transmon the gate occupies, used for disjointness and idle accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Site {
    Qutrit(usize),
    Shift(usize),
}

impl Gate {
    pub fn sites(&self, layout: &ChainLayout) -> Result<Vec<Site>> {
        let q_ok = |q: usize| {
            if q < layout.n_qutrits {
                Ok(Site::Qutrit(q))
            } else {
                Err(Error::MalformedGate(format!("{} does not exist", ChainLayout::qutrit_label(q))))
            }
        };
        let s_ok = |j: usize| {
            if j < layout.n_shift_qubits() {
                Ok(Site::Shift(j))
            } else {
                Err(Error::MalformedGate(format!("{} does not exist", ChainLayout::shift_label(j))))
            }
        };
        match *self {
            Gate::PiGe { qutrit } | Gate::Su2Ef { qutrit, .. } => Ok(vec![q_ok(qutrit)?]),
            Gate::SwapIn { qutrit } => Ok(vec![q_ok(qutrit)?, s_ok(qutrit)?]),
            Gate::SwapOut { shift_qubit } => Ok(vec![s_ok(shift_qubit)?, q_ok(shift_qubit + 1)?]),
        }
    }

    pub fn duration_ns(&self, layout: &ChainLayout) -> f64 {
        match self {
            Gate::PiGe { .. } => layout.durations.pi_ge_ns,
            Gate::Su2Ef { .. } => layout.durations.su2_ef_ns,
            Gate::SwapIn { .. } | Gate::SwapOut { .. } => layout.durations.swap_ns,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayerRole {
    Init,
    Coin,
    SwapIn,
    SwapOut,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub index: usize,
    /// Walk step the layer belongs to; 0 for initialization.
    pub step: usize,
    pub role: LayerRole,
    pub gates: Vec<Gate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qutrits: usize,
    pub steps: usize,
    pub layers: Vec<Layer>,
}

impl Circuit {
    pub fn layers_with(&self, role: LayerRole) -> impl Iterator<Item = &Layer> {
        self.layers.iter().filter(move |l| l.role == role)
    }

    pub fn gate_count(&self, role: LayerRole) -> usize {
        self.layers_with(role).map(|l| l.gates.len()).sum()
    }

    /// Errors if any layer addresses a site twice.
    pub fn check_disjoint(&self, layout: &ChainLayout) -> Result<()> {
        for layer in &self.layers {
            let mut seen = std::collections::BTreeSet::new();
            for g in &layer.gates {
                for s in g.sites(layout)? {
                    if !seen.insert(s) {
                        return Err(Error::MalformedGate(format!("layer {} addresses {s:?} twice", layer.index)));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Single-qutrit gate angles `(θ, axis)` whose rotation takes coin `|1⟩` to
/// `coin` up to a global phase.
pub fn preparation_angles(coin: &Spinor) -> Result<(f64, f64)> {
    let n = (coin[0].norm_sqr() + coin[1].norm_sqr()).sqrt();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroNorm);
    }
    let (c0, c1) = (coin[0] / n, coin[1] / n);
    let theta = 2.0 * c0.norm().atan2(c1.norm());
    let axis = if c0.norm() == 0.0 {
        0.0
    } else {
        // column |1⟩ of the rotation is (i·sin(θ/2)·e^{−i·axis}, cos(θ/2))
        let rel = c0 * C64::from_polar(1.0, -c1.arg());
        FRAC_PI_2 - rel.arg()
    };
    Ok((theta, axis))
}

/// Compiles `t` walk steps onto the chain.
///
/// Homogeneous and two-domain profiles are read in bidirectional
/// coordinates and mapped with [`walk::map_profile_bi_to_uni`]; per-step
/// tables are taken as already unidirectional.
pub fn compile_walk(t: usize, profile: &CoinProfile, initial_coin: &Spinor, layout: &ChainLayout) -> Result<Circuit> {
    layout.validate()?;
    if t > layout.max_steps() {
        return Err(Error::ChainTooShort { steps: t, needed: t + 1, available: layout.n_qutrits });
    }
    let uni = match profile.kind {
        ProfileKind::PerStep { .. } => profile.clone(),
        _ => walk::map_profile_bi_to_uni(profile, t)?,
    };
    let (theta0, axis0) = preparation_angles(initial_coin)?;

    let mut layers = Vec::with_capacity(2 + 3 * t);
    let mut push = |step, role, gates| {
        let index = layers.len();
        layers.push(Layer { index, step, role, gates });
    };
    push(0, LayerRole::Init, vec![Gate::PiGe { qutrit: 0 }]);
    push(0, LayerRole::Init, vec![Gate::Su2Ef { qutrit: 0, theta: theta0, axis: axis0 }]);
    for n in 1..=t {
        let coins = (0..n)
            .map(|i| {
                let theta = uni.theta_at(i as i64, n).ok_or(Error::ProfileIncomplete { step: n, position: i as i64 })?;
                Ok(Gate::Su2Ef { qutrit: i, theta: uni.convention.rotation_angle(theta), axis: uni.axis })
            })
            .collect::<Result<Vec<_>>>()?;
        push(n, LayerRole::Coin, coins);
        push(n, LayerRole::SwapIn, (0..n).map(|qutrit| Gate::SwapIn { qutrit }).collect());
        push(n, LayerRole::SwapOut, (0..n).map(|shift_qubit| Gate::SwapOut { shift_qubit }).collect());
    }
    let circuit = Circuit { n_qutrits: layout.n_qutrits, steps: t, layers };
    circuit.check_disjoint(layout)?;
    Ok(circuit)
}

/// Relaxation lifetimes in microseconds (`None` = no decay) and gate error
/// rates. All zero/`None` by default. The values are user-supplied; nothing
/// here is calibrated to a device.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    pub t1_qutrit_e_us: Option<f64>,
    pub t1_qutrit_f_us: Option<f64>,
    pub t1_shift_qubit_us: Option<f64>,
    /// Fractional angle error on SU2 and SWAP rotations.
    pub over_rotation: f64,
    /// Probability that a SWAP does nothing.
    pub swap_error: f64,
    /// Probability that an excited qutrit reads out as ground.
    pub readout_error: f64,
}

impl NoiseModel {
    pub fn ideal() -> Self {
        Self::default()
    }

    pub fn with_t1(t1_us: f64) -> Self {
        NoiseModel {
            t1_qutrit_e_us: Some(t1_us),
            t1_qutrit_f_us: Some(t1_us),
            t1_shift_qubit_us: Some(t1_us),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lifetimes = [
            ("t1_qutrit_e_us", self.t1_qutrit_e_us),
            ("t1_qutrit_f_us", self.t1_qutrit_f_us),
            ("t1_shift_qubit_us", self.t1_shift_qubit_us),
        ];
        for (name, t1) in lifetimes {
            if let Some(t) = t1 {
                if t.is_nan() || t <= 0.0 {
                    return Err(Error::config(format!("noise.{name}"), "lifetime must be positive"));
                }
            }
        }
        for (name, p) in [("swap_error", self.swap_error), ("readout_error", self.readout_error)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(format!("noise.{name}"), "probability must lie in [0, 1]"));
            }
        }
        if !self.over_rotation.is_finite() {
            return Err(Error::config("noise.over_rotation", "must be finite"));
        }
        Ok(())
    }

    fn decay_probability(t1_us: Option<f64>, duration_ns: f64) -> f64 {
        match t1_us {
            Some(t1) => 1.0 - (-duration_ns / (t1 * 1000.0)).exp(),
            None => 0.0,
        }
    }
}

/// Density operator on the ≤1-excitation basis, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    dim: usize,
    rho: Vec<C64>,
}

impl ChainState {
    /// Every transmon in its ground state.
    pub fn ground(layout: &ChainLayout) -> Self {
        let dim = layout.dim();
        let mut rho = vec![ZERO; dim * dim];
        rho[0] = C64::new(1.0, 0.0);
        ChainState { dim, rho }
    }

    pub fn from_pure(amplitudes: &[C64]) -> Self {
        let dim = amplitudes.len();
        let rho = (0..dim * dim).map(|k| amplitudes[k / dim] * amplitudes[k % dim].conj()).collect();
        ChainState { dim, rho }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.rho[r * self.dim + c]
    }

    pub fn population(&self, idx: usize) -> f64 {
        self.get(idx, idx).re
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.population(i)).sum()
    }

    /// Population outside the vacuum.
    pub fn excited_population(&self) -> f64 {
        (1..self.dim).map(|i| self.population(i)).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Whether `ρ + tol·I` admits a Cholesky factorization.
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        let n = self.dim;
        let mut l = vec![ZERO; n * n];
        for j in 0..n {
            let mut d = self.get(j, j).re + tol;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if d <= 0.0 {
                return false;
            }
            let d = d.sqrt();
            l[j * n + j] = C64::new(d, 0.0);
            for i in j + 1..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / d;
            }
        }
        true
    }

    /// `ρ → UρU†` with `U` acting on the span of basis states `a`, `b`.
    fn apply_two_level(&mut self, a: usize, b: usize, u: &Mat2) {
        let n = self.dim;
        for c in 0..n {
            let (ra, rb) = (self.rho[a * n + c], self.rho[b * n + c]);
            self.rho[a * n + c] = u[0][0] * ra + u[0][1] * rb;
            self.rho[b * n + c] = u[1][0] * ra + u[1][1] * rb;
        }
        for r in 0..n {
            let (ca, cb) = (self.rho[r * n + a], self.rho[r * n + b]);
            self.rho[r * n + a] = ca * u[0][0].conj() + cb * u[0][1].conj();
            self.rho[r * n + b] = ca * u[1][0].conj() + cb * u[1][1].conj();
        }
    }

    /// Amplitude damping `from → to` with jump probability `gamma`.
    fn damp(&mut self, from: usize, to: usize, gamma: f64) {
        if gamma <= 0.0 {
            return;
        }
        let n = self.dim;
        let keep = (1.0 - gamma).sqrt();
        let p = self.rho[from * n + from];
        for k in 0..n {
            if k != from {
                self.rho[from * n + k] *= keep;
                self.rho[k * n + from] *= keep;
            }
        }
        self.rho[from * n + from] = p * (1.0 - gamma);
        self.rho[to * n + to] += p * gamma;
    }

    fn mix_with(&mut self, other: &ChainState, weight_other: f64) {
        for (x, y) in self.rho.iter_mut().zip(&other.rho) {
            *x = *x * (1.0 - weight_other) + *y * weight_other;
        }
    }

    fn relax(&mut self, site: Site, duration_ns: f64, noise: &NoiseModel, layout: &ChainLayout) {
        match site {
            Site::Qutrit(i) => {
                self.damp(layout.e(i), ChainLayout::VACUUM, NoiseModel::decay_probability(noise.t1_qutrit_e_us, duration_ns));
                self.damp(layout.f(i), layout.e(i), NoiseModel::decay_probability(noise.t1_qutrit_f_us, duration_ns));
            }
            Site::Shift(j) => {
                self.damp(layout.sq(j), ChainLayout::VACUUM, NoiseModel::decay_probability(noise.t1_shift_qubit_us, duration_ns));
            }
        }
    }
}

/// Real reflection exchanging the two levels; an exact SWAP at zero
/// over-rotation.
fn swap_matrix(over_rotation: f64) -> Mat2 {
    let phi = FRAC_PI_2 * (1.0 + over_rotation);
    let (s, c) = phi.sin_cos();
    [[C64::new(c, 0.0), C64::new(s, 0.0)], [C64::new(s, 0.0), C64::new(-c, 0.0)]]
}

/// Applies one gate and the relaxation of the sites it occupies during the
/// gate.
pub fn apply_gate(state: &ChainState, gate: &Gate, noise: &NoiseModel, layout: &ChainLayout) -> Result<ChainState> {
    if state.dim != layout.dim() {
        return Err(Error::MalformedGate(format!("state dimension {} does not match layout {}", state.dim, layout.dim())));
    }
    let sites = gate.sites(layout)?;
    let mut out = state.clone();
    let eps = noise.over_rotation;
    match *gate {
        Gate::PiGe { qutrit } => {
            let elsewhere: f64 = (1..state.dim)
                .filter(|&k| k != layout.e(qutrit) && k != layout.f(qutrit))
                .map(|k| state.population(k))
                .sum();
            if elsewhere > 1e-12 {
                return Err(Error::MalformedGate(format!(
                    "PiGE on {} needs the rest of the chain in its ground state",
                    ChainLayout::qutrit_label(qutrit)
                )));
            }
            out.apply_two_level(ChainLayout::VACUUM, layout.e(qutrit), &coin_matrix(std::f64::consts::PI * (1.0 + eps), 0.0));
        }
        Gate::Su2Ef { qutrit, theta, axis } => {
            out.apply_two_level(layout.f(qutrit), layout.e(qutrit), &coin_matrix(theta * (1.0 + eps), axis));
        }
        Gate::SwapIn { .. } | Gate::SwapOut { .. } => {
            let (a, b) = match *gate {
                Gate::SwapIn { qutrit } => (layout.e(qutrit), layout.sq(qutrit)),
                Gate::SwapOut { shift_qubit } => (layout.sq(shift_qubit), layout.e(shift_qubit + 1)),
                _ => unreachable!(),
            };
            out.apply_two_level(a, b, &swap_matrix(eps));
            if noise.swap_error > 0.0 {
                out.mix_with(state, noise.swap_error);
            }
        }
    }
    let duration = gate.duration_ns(layout);
    for site in sites {
        out.relax(site, duration, noise, layout);
    }
    Ok(out)
}

/// Runs every layer and returns the state after initialization (index 0)
/// and after each completed walk step.
///
/// Sites idle during a layer relax for the layer's duration.
pub fn simulate_trajectory(circuit: &Circuit, noise: &NoiseModel, layout: &ChainLayout) -> Result<Vec<ChainState>> {
    layout.validate()?;
    noise.validate()?;
    if circuit.n_qutrits != layout.n_qutrits {
        return Err(Error::MalformedGate(format!(
            "circuit compiled for {} qutrits, layout has {}",
            circuit.n_qutrits, layout.n_qutrits
        )));
    }
    let all_sites: Vec<Site> =
        (0..layout.n_qutrits).map(Site::Qutrit).chain((0..layout.n_shift_qubits()).map(Site::Shift)).collect();
    let mut state = ChainState::ground(layout);
    let mut snapshots = Vec::with_capacity(circuit.steps + 1);
    for (k, layer) in circuit.layers.iter().enumerate() {
        let mut busy = Vec::new();
        let mut duration: f64 = 0.0;
        for gate in &layer.gates {
            state = apply_gate(&state, gate, noise, layout)?;
            busy.extend(gate.sites(layout)?);
            duration = duration.max(gate.duration_ns(layout));
        }
        for site in all_sites.iter().filter(|s| !busy.contains(s)) {
            state.relax(*site, duration, noise, layout);
        }
        let next_is_init = circuit.layers.get(k + 1).is_some_and(|l| l.role == LayerRole::Init);
        let step_done = match layer.role {
            LayerRole::SwapOut => true,
            LayerRole::Init => !next_is_init,
            _ => false,
        };
        if step_done {
            snapshots.push(state.clone());
        }
    }
    Ok(snapshots)
}

pub fn simulate(circuit: &Circuit, noise: &NoiseModel, layout: &ChainLayout) -> Result<ChainState> {
    simulate_trajectory(circuit, noise, layout)?
        .pop()
        .ok_or_else(|| Error::MalformedGate("circuit has no layers".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinPopulations {
    pub e: f64,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    /// Excitation per qutrit, unidirectional coordinates (`x = i` for `Q_i`).
    pub distribution: Distribution,
    /// Vacuum population, plus anything misread by readout error.
    pub loss: f64,
    /// Population left on shift qubits.
    pub stranded: f64,
    pub coin_resolved: Vec<CoinPopulations>,
}

pub fn measure_positions(state: &ChainState, layout: &ChainLayout, step: usize) -> Measurement {
    let coin_resolved: Vec<CoinPopulations> = (0..layout.n_qutrits)
        .map(|i| CoinPopulations { e: state.population(layout.e(i)).max(0.0), f: state.population(layout.f(i)).max(0.0) })
        .collect();
    let probs = coin_resolved.iter().map(|c| c.e + c.f).collect();
    Measurement {
        distribution: Distribution { step, offset: 0, probs },
        loss: state.population(ChainLayout::VACUUM),
        stranded: (0..layout.n_shift_qubits()).map(|j| state.population(layout.sq(j))).sum(),
        coin_resolved,
    }
}

impl Measurement {
    /// Each excited qutrit is read as ground with probability `r`.
    pub fn with_readout_error(mut self, r: f64) -> Self {
        let mut moved = 0.0;
        for (p, c) in self.distribution.probs.iter_mut().zip(&mut self.coin_resolved) {
            moved += *p * r;
            *p *= 1.0 - r;
            c.e *= 1.0 - r;
            c.f *= 1.0 - r;
        }
        self.loss += moved;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotCounts {
    /// Counts per qutrit.
    pub counts: Vec<u64>,
    /// Shots with no qutrit excitation detected.
    pub empty: u64,
}

/// Draws `shots` single-excitation readouts from a measurement with a
/// seeded generator.
pub fn sample_shots(m: &Measurement, shots: u64, seed: u64) -> ShotCounts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cdf = Vec::with_capacity(m.distribution.probs.len());
    let mut acc = 0.0;
    for p in &m.distribution.probs {
        acc += p;
        cdf.push(acc);
    }
    let mut counts = vec![0; cdf.len()];
    let mut empty = 0;
    for _ in 0..shots {
        let u: f64 = rng.random();
        match cdf.iter().position(|&c| u < c) {
            Some(i) => counts[i] += 1,
            None => empty += 1,
        }
    }
    ShotCounts { counts, empty }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pure(layout: &ChainLayout, idx: usize) -> ChainState {
        let mut v = vec![ZERO; layout.dim()];
        v[idx] = C64::new(1.0, 0.0);
        ChainState::from_pure(&v)
    }

    #[test]
    fn default_layout_dimension() {
        let l = ChainLayout::default();
        assert_eq!(l.n_shift_qubits(), 9);
        assert_eq!(l.dim(), 30);
        assert_eq!(ChainLayout::shift_label(3), "SQ3");
    }

    #[test]
    fn three_step_circuit_shape() {
        let l = ChainLayout::default();
        let c = compile_walk(3, &CoinProfile::two_domain(-0.5, 0.5), &walk::phi_ce().amps[0], &l).unwrap();
        let coin_sizes: Vec<usize> = c.layers_with(LayerRole::Coin).map(|l| l.gates.len()).collect();
        assert_eq!(coin_sizes, vec![1, 2, 3]);
        assert_eq!(c.layers_with(LayerRole::SwapIn).count(), 3);
        assert_eq!(c.layers_with(LayerRole::SwapOut).count(), 3);
    }

    #[test]
    fn zero_step_circuit_is_initialization_only() {
        let l = ChainLayout::default();
        let c = compile_walk(0, &CoinProfile::homogeneous(0.3), &walk::phi_co().amps[0], &l).unwrap();
        assert!(c.layers.iter().all(|l| l.role == LayerRole::Init));
        assert_eq!(c.layers.len(), 2);
    }

    #[test]
    fn nine_step_gate_counts() {
        let l = ChainLayout::default();
        let c = compile_walk(9, &CoinProfile::two_domain(-PI / 4.0, PI / 4.0), &walk::phi_co().amps[0], &l).unwrap();
        assert_eq!(c.layers_with(LayerRole::Coin).count(), 9);
        assert_eq!(c.layers_with(LayerRole::SwapIn).count() + c.layers_with(LayerRole::SwapOut).count(), 18);
        assert_eq!(c.gate_count(LayerRole::Coin), 45);
        assert_eq!(c.gate_count(LayerRole::Init), 2);
    }

    #[test]
    fn too_long_walk_is_rejected() {
        let l = ChainLayout::default();
        let err = compile_walk(10, &CoinProfile::homogeneous(0.3), &walk::phi_co().amps[0], &l).unwrap_err();
        assert!(err.to_string().contains("chain too short"));
    }

    #[test]
    fn preparation_reaches_target_coin() {
        for coin in [walk::phi_co().amps[0], walk::phi_ce().amps[0], [C64::new(0.3, -0.4), C64::new(-0.5, 0.7)]] {
            let (theta, axis) = preparation_angles(&coin).unwrap();
            let out = walk::mat_vec(&coin_matrix(theta, axis), &[ZERO, C64::new(1.0, 0.0)]);
            let n = (coin[0].norm_sqr() + coin[1].norm_sqr()).sqrt();
            let fidelity = (out[0].conj() * coin[0] + out[1].conj() * coin[1]).norm() / n;
            assert!((fidelity - 1.0).abs() < 1e-12, "{coin:?}");
        }
    }

    #[test]
    fn pi_pulse_excites_ground_chain() {
        let l = ChainLayout::default();
        let s = apply_gate(&ChainState::ground(&l), &Gate::PiGe { qutrit: 0 }, &NoiseModel::ideal(), &l).unwrap();
        assert!((s.population(l.e(0)) - 1.0).abs() < 1e-15);
        assert!(s.population(0).abs() < 1e-15);
    }

    #[test]
    fn pi_pulse_refuses_second_excitation() {
        let l = ChainLayout::default();
        let s = pure(&l, l.e(3));
        assert!(apply_gate(&s, &Gate::PiGe { qutrit: 0 }, &NoiseModel::ideal(), &l).is_err());
    }

    #[test]
    fn swap_pair_moves_e_and_keeps_f() {
        let l = ChainLayout::default();
        let ideal = NoiseModel::ideal();
        let mut s = pure(&l, l.e(2));
        s = apply_gate(&s, &Gate::SwapIn { qutrit: 2 }, &ideal, &l).unwrap();
        s = apply_gate(&s, &Gate::SwapOut { shift_qubit: 2 }, &ideal, &l).unwrap();
        assert!((s.population(l.e(3)) - 1.0).abs() < 1e-15);

        let mut s = pure(&l, l.f(2));
        s = apply_gate(&s, &Gate::SwapIn { qutrit: 2 }, &ideal, &l).unwrap();
        s = apply_gate(&s, &Gate::SwapOut { shift_qubit: 2 }, &ideal, &l).unwrap();
        assert!((s.population(l.f(2)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn full_decay_returns_to_vacuum() {
        let l = ChainLayout::default();
        let noise = NoiseModel::with_t1(1e-9);
        let mut s = pure(&l, l.f(1));
        // f decays to e during the first gate, e to vacuum during the second
        s = apply_gate(&s, &Gate::Su2Ef { qutrit: 1, theta: 0.0, axis: 0.0 }, &noise, &l).unwrap();
        s = apply_gate(&s, &Gate::Su2Ef { qutrit: 1, theta: 0.0, axis: 0.0 }, &noise, &l).unwrap();
        assert!((s.population(0) - 1.0).abs() < 1e-12);
        assert!((s.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn malformed_targets_are_rejected() {
        let l = ChainLayout::new(3).unwrap();
        let s = ChainState::ground(&l);
        assert!(apply_gate(&s, &Gate::SwapOut { shift_qubit: 2 }, &NoiseModel::ideal(), &l).is_err());
        assert!(apply_gate(&s, &Gate::Su2Ef { qutrit: 5, theta: 1.0, axis: 0.0 }, &NoiseModel::ideal(), &l).is_err());
    }

    #[test]
    fn zero_step_simulation_holds_initial_coin() {
        let l = ChainLayout::default();
        let coin = walk::phi_ce().amps[0];
        let c = compile_walk(0, &CoinProfile::homogeneous(0.0), &coin, &l).unwrap();
        let s = simulate(&c, &NoiseModel::ideal(), &l).unwrap();
        let m = measure_positions(&s, &l, 0);
        assert!((m.coin_resolved[0].e - coin[1].norm_sqr()).abs() < 1e-12);
        assert!((m.coin_resolved[0].f - coin[0].norm_sqr()).abs() < 1e-12);
        assert!((m.distribution.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measurement_examples() {
        let l = ChainLayout::default();
        let m = measure_positions(&pure(&l, l.e(3)), &l, 0);
        assert_eq!(m.distribution.prob(3), 1.0);
        assert_eq!(m.loss, 0.0);

        let mut v = vec![ZERO; l.dim()];
        v[0] = C64::new(0.5f64.sqrt(), 0.0);
        v[l.e(0)] = C64::new(0.5f64.sqrt(), 0.0);
        let mut mixed = ChainState::from_pure(&v);
        // dephase into ½ e_0 + ½ vacuum
        mixed.rho[l.e(0)] = ZERO;
        mixed.rho[l.e(0) * l.dim()] = ZERO;
        let m = measure_positions(&mixed, &l, 0);
        assert!((m.distribution.prob(0) - 0.5).abs() < 1e-15);
        assert!((m.loss - 0.5).abs() < 1e-15);
    }

    #[test]
    fn readout_error_moves_weight_into_loss() {
        let l = ChainLayout::default();
        let m = measure_positions(&pure(&l, l.e(2)), &l, 0).with_readout_error(0.1);
        assert!((m.distribution.prob(2) - 0.9).abs() < 1e-15);
        assert!((m.loss - 0.1).abs() < 1e-15);
    }

    #[test]
    fn shots_are_reproducible() {
        let l = ChainLayout::default();
        let c = compile_walk(4, &CoinProfile::homogeneous(1.0), &walk::phi_co().amps[0], &l).unwrap();
        let m = measure_positions(&simulate(&c, &NoiseModel::with_t1(5.0), &l).unwrap(), &l, 4);
        let a = sample_shots(&m, 2000, 7);
        assert_eq!(a, sample_shots(&m, 2000, 7));
        assert_eq!(a.counts.iter().sum::<u64>() + a.empty, 2000);
    }

    #[test]
    fn noise_validation() {
        assert!(NoiseModel { swap_error: 1.5, ..Default::default() }.validate().is_err());
        assert!(NoiseModel { t1_qutrit_e_us: Some(-1.0), ..Default::default() }.validate().is_err());
        assert!(NoiseModel::with_t1(20.0).validate().is_ok());
    }
}
