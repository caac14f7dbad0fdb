//! Edge states at the interface of a two-domain walk.
//!
//! With `θ(x) = θ₋ < 0` for `x < 0` and `θ₊ ≥ 0` for `x ≥ 0`, the
//! bidirectional walk carries two states bound to the interface,
//!
//! ```text
//! |φ_e(ω)⟩ = (1/N) Σ_x e^{iωx} |x⟩ ⊗ (a_x |1⟩ + i b_x |0⟩),
//! a_x = λ(x)^x,  b_x = λ(x)^{x+1},  λ = (1 − sin θ)/cos θ,
//! N² = 1/sin θ₊ − 1/sin θ₋,
//! ```
//!
//! with `ω ∈ {0, π}`. They are exact eigenstates of one step `U = S·R` when
//! the coin is `exp[iθσx]`, i.e. [`CoinConvention::FullAngle`], with
//! eigenvalues `+1` (ω = 0) and `−1` (ω = π). Everything in this module
//! therefore builds its profiles in that frame.
//!
//! The interface overlap has the closed form
//! `P₀ = [2 tan θ₊ (1 − sin θ₊)/cos θ₊]²` for `θ₋ = −θ₊`. Numerically it
//! equals `(Σ_ω |⟨φ_e(ω)|φ_in⟩|²)² = ⟨φ_in|Π_edge|φ_in⟩²`, where `φ_in` is
//! the interface spinor of [`interface_state`] and `Π_edge` projects onto
//! the edge pair: the return probability to `φ_in` that the edge pair keeps
//! once the bulk part has dispersed.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::Distribution;
use crate::walk::{self, CoinConvention, CoinProfile, WalkKind, WalkState};
use crate::C64;

pub const DEFAULT_WINDOW: usize = 30;
/// Largest neglected tail mass accepted by [`edge_state`].
pub const TAIL_TOLERANCE: f64 = 1e-12;
/// Sites summed by [`p_edge`] unless told otherwise.
pub const DEFAULT_EDGE_WINDOW: [i64; 2] = [-1, 0];

/// Per-site decay ratio `(1 − sin θ)/cos θ`, written as `tan(π/4 − θ/2)` so
/// it stays finite at `θ = π/2`.
pub fn edge_decay_ratio(theta: f64) -> f64 {
    (FRAC_PI_4 - theta / 2.0).tan()
}

/// Quasi-energy label of an edge state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Omega {
    Zero,
    Pi,
}

impl Omega {
    pub fn value(self) -> f64 {
        match self {
            Omega::Zero => 0.0,
            Omega::Pi => std::f64::consts::PI,
        }
    }

    fn phase(self, x: i64) -> f64 {
        match self {
            Omega::Pi if x.rem_euclid(2) == 1 => -1.0,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeStateSpec {
    pub omega: Omega,
    pub theta_plus: f64,
    pub theta_minus: f64,
    /// Half-width `W`; sites `−W..=W` are kept.
    pub window: usize,
}

impl EdgeStateSpec {
    pub fn new(omega: Omega, theta_plus: f64, theta_minus: f64) -> Result<Self> {
        if theta_plus == 0.0 {
            return Err(Error::EdgeStateUndefined);
        }
        if !(theta_plus > 0.0 && theta_plus <= FRAC_PI_2) {
            return Err(Error::InvalidArgument(format!("θ₊ = {theta_plus} outside (0, π/2]")));
        }
        if !(theta_minus > -FRAC_PI_2 && theta_minus < 0.0) {
            return Err(Error::InvalidArgument(format!("θ₋ = {theta_minus} outside (−π/2, 0)")));
        }
        Ok(EdgeStateSpec { omega, theta_plus, theta_minus, window: DEFAULT_WINDOW })
    }

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = window;
        self
    }

    pub fn theta(&self, x: i64) -> f64 {
        if x < 0 {
            self.theta_minus
        } else {
            self.theta_plus
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        1.0 / self.theta_plus.sin() - 1.0 / self.theta_minus.sin()
    }

    /// Fraction of the untruncated state's weight lying outside `−W..=W`.
    pub fn tail_mass(&self) -> f64 {
        let w = self.window as i32;
        let sp = self.theta_plus.sin();
        let sm = -self.theta_minus.sin();
        let right = edge_decay_ratio(self.theta_plus).powi(2 * w + 2) / sp;
        // 1/λ₋ for the left domain
        let inv_left = edge_decay_ratio(-self.theta_minus);
        let left = inv_left.powi(2 * w) / sm;
        (right + left) / self.norm_sqr()
    }

    /// Smallest window whose tail mass is below [`TAIL_TOLERANCE`].
    pub fn required_window(&self) -> usize {
        let mut probe = *self;
        probe.window = 1;
        while probe.tail_mass() >= TAIL_TOLERANCE {
            probe.window *= 2;
        }
        let (mut lo, mut hi) = (probe.window / 2, probe.window);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            probe.window = mid;
            if probe.tail_mass() < TAIL_TOLERANCE {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    pub fn profile(&self) -> CoinProfile {
        edge_profile(self.theta_minus, self.theta_plus)
    }
}

#[derive(Debug, Clone)]
pub struct EdgeState {
    pub spec: EdgeStateSpec,
    /// Renormalized truncated state.
    pub state: WalkState,
    /// Weight dropped by truncation, before renormalization.
    pub truncation_deficit: f64,
}

/// Builds `|φ_e(ω)⟩` on `−W..=W`. Fails when the window would drop a tail
/// of `1e-12` or more.
pub fn edge_state(spec: &EdgeStateSpec) -> Result<EdgeState> {
    let tail = spec.tail_mass();
    if tail >= TAIL_TOLERANCE {
        return Err(Error::WindowTooSmall { window: spec.window, tail, suggested: spec.required_window() });
    }
    let w = spec.window as i64;
    let norm = spec.norm_sqr().sqrt();
    let amps = (-w..=w)
        .map(|x| {
            let lambda = edge_decay_ratio(spec.theta(x));
            let phase = spec.omega.phase(x) / norm;
            let a = lambda.powi(x as i32) * phase;
            let b = lambda.powi(x as i32 + 1) * phase;
            [C64::new(0.0, b), C64::new(a, 0.0)]
        })
        .collect();
    let state = WalkState::from_amplitudes(-w, amps)?;
    Ok(EdgeState { spec: *spec, state, truncation_deficit: tail })
}

/// [`edge_state`] with the window enlarged as far as needed.
pub fn edge_state_auto(omega: Omega, theta_plus: f64, theta_minus: f64) -> Result<EdgeState> {
    let spec = EdgeStateSpec::new(omega, theta_plus, theta_minus)?;
    let window = spec.required_window().max(DEFAULT_WINDOW);
    edge_state(&spec.with_window(window))
}

/// Two-domain profile in the edge-state frame.
pub fn edge_profile(theta_minus: f64, theta_plus: f64) -> CoinProfile {
    CoinProfile::two_domain(theta_minus, theta_plus).with_convention(CoinConvention::FullAngle)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stationarity {
    /// `1 − |⟨ψ|U|ψ⟩|`.
    pub defect: f64,
    /// `arg⟨ψ|U|ψ⟩`.
    pub eigenphase: f64,
}

pub fn stationarity(state: &WalkState, profile: &CoinProfile, kind: WalkKind) -> Result<Stationarity> {
    let evolved = walk::step(state, profile, kind, 1)?;
    let overlap = state.inner(&evolved);
    Ok(Stationarity { defect: 1.0 - overlap.norm(), eigenphase: overlap.arg() })
}

/// One bidirectional step applied to the edge state of `spec`.
pub fn stationarity_defect(spec: &EdgeStateSpec) -> Result<Stationarity> {
    let edge = edge_state(spec)?;
    stationarity(&edge.state, &spec.profile(), WalkKind::Bidirectional)
}

/// `[2 tan θ₊ (1 − sin θ₊)/cos θ₊]²` for the antisymmetric setting `θ₋ = −θ₊`.
pub fn overlap_p0(theta_plus: f64) -> Result<f64> {
    if !(0.0..FRAC_PI_2).contains(&theta_plus) {
        return Err(Error::InvalidArgument(format!("θ₊ = {theta_plus} outside [0, π/2)")));
    }
    let v = 2.0 * theta_plus.tan() * edge_decay_ratio(theta_plus);
    Ok(v * v)
}

/// `|x=0⟩ ⊗ (|1⟩ + i·sgn(θ₊)·λ(|θ₊|)|0⟩)/√(1+λ²)`: the edge pair's spinor at
/// the interface. Equals φ_ce at `θ₊ = π/4`; negative `θ₊` gives the complex
/// conjugate, which is the mirror image under `θ → −θ`.
pub fn interface_state(theta_plus: f64) -> Result<WalkState> {
    let lambda = edge_decay_ratio(theta_plus.abs());
    let sign = if theta_plus < 0.0 { -1.0 } else { 1.0 };
    WalkState::localized(0, [C64::new(0.0, sign * lambda), C64::new(1.0, 0.0)])
}

/// `⟨φ_e(ω)|state⟩` for ω = 0 and π at `θ₋ = −θ₊`.
pub fn edge_pair_overlaps(theta_plus: f64, state: &WalkState) -> Result<[C64; 2]> {
    let zero = edge_state_auto(Omega::Zero, theta_plus, -theta_plus)?;
    let pi = edge_state_auto(Omega::Pi, theta_plus, -theta_plus)?;
    Ok([zero.state.inner(state), pi.state.inner(state)])
}

/// `(Σ_ω |⟨φ_e(ω)|φ_in⟩|²)²` with `φ_in = interface_state(θ₊)`.
pub fn numeric_p0(theta_plus: f64) -> Result<f64> {
    let ov = edge_pair_overlaps(theta_plus, &interface_state(theta_plus)?)?;
    let captured: f64 = ov.iter().map(|o| o.norm_sqr()).sum();
    Ok(captured * captured)
}

/// Summed probability over `window`.
pub fn p_edge(dist: &Distribution, window: &[i64]) -> f64 {
    window.iter().map(|&x| dist.prob(x)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum SweepMode {
    /// θ₊ fixed, θ₋ swept.
    FixPlusVaryMinus { theta_plus: f64 },
    /// θ₋ = −θ₊, θ₊ swept.
    Antisymmetric,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepInitial {
    #[default]
    PhiCe,
    PhiCo,
    /// [`interface_state`] at each point's θ₊.
    Interface,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub mode: SweepMode,
    pub grid: Vec<f64>,
    pub steps: Vec<usize>,
    pub initial: SweepInitial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta_swept_rad: f64,
    pub steps: usize,
    pub p_edge: f64,
}

impl SweepPlan {
    pub fn validate(&self) -> Result<()> {
        if self.grid.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("sweep grid contains a non-finite angle".into()));
        }
        let increasing = self.grid.windows(2).all(|w| w[1] > w[0]);
        let decreasing = self.grid.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(Error::InvalidArgument("sweep grid must be strictly monotone".into()));
        }
        if self.steps.contains(&0) {
            return Err(Error::InvalidArgument("sweep step counts must be positive".into()));
        }
        Ok(())
    }

    /// `(θ₋, θ₊)` for a grid value.
    pub fn domains(&self, swept: f64) -> (f64, f64) {
        match self.mode {
            SweepMode::FixPlusVaryMinus { theta_plus } => (swept, theta_plus),
            SweepMode::Antisymmetric => (-swept, swept),
        }
    }

    pub fn initial_for(&self, swept: f64) -> Result<WalkState> {
        match self.initial {
            SweepInitial::PhiCe => Ok(walk::phi_ce()),
            SweepInitial::PhiCo => Ok(walk::phi_co()),
            SweepInitial::Interface => interface_state(self.domains(swept).1),
        }
    }
}

/// Sweep on the ideal bidirectional engine.
pub fn run_sweep(plan: &SweepPlan) -> Result<Vec<SweepRow>> {
    run_sweep_with(plan, |profile, initial, steps| {
        let t_max = steps.iter().copied().max().unwrap_or(0);
        let all = walk::evolve(initial, profile, WalkKind::Bidirectional, t_max)?;
        Ok(steps.iter().map(|&s| all[s].clone()).collect())
    })
}

/// Sweep with a caller-supplied engine. `engine(profile, initial, steps)`
/// returns bidirectional-coordinate distributions at each requested step
/// count, in the order given. Grid points run in parallel; rows come back
/// sorted by `(θ, steps)`.
pub fn run_sweep_with<F>(plan: &SweepPlan, engine: F) -> Result<Vec<SweepRow>>
where
    F: Fn(&CoinProfile, &WalkState, &[usize]) -> Result<Vec<Distribution>> + Sync,
{
    plan.validate()?;
    let mut steps = plan.steps.clone();
    steps.sort_unstable();
    steps.dedup();
    let per_point: Vec<Vec<SweepRow>> = plan
        .grid
        .par_iter()
        .map(|&swept| {
            let (tm, tp) = plan.domains(swept);
            let dists = engine(&edge_profile(tm, tp), &plan.initial_for(swept)?, &steps)?;
            Ok(steps
                .iter()
                .zip(dists)
                .map(|(&s, d)| SweepRow { theta_swept_rad: swept, steps: s, p_edge: p_edge(&d, &DEFAULT_EDGE_WINDOW) })
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<SweepRow> = per_point.into_iter().flatten().collect();
    rows.sort_by(|a, b| a.theta_swept_rad.total_cmp(&b.theta_swept_rad).then(a.steps.cmp(&b.steps)));
    Ok(rows)
}
