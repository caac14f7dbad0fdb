//! Ideal coined walk on the integer line.
//!
//! A step is `U = S·R`: the position-dependent coin `R` acts first, then the
//! coin-conditioned shift `S`. Two shift rules are supported. The compact
//! unidirectional walk leaves coin `|0⟩` in place and moves coin `|1⟩` one
//! site right; the bidirectional walk moves `|0⟩` left and `|1⟩` right. After
//! `t` steps from the origin the two are related by `x_b = 2·x_u − t`, which
//! is what [`convert_uni_to_bi`] and [`map_profile_bi_to_uni`] implement.
//!
//! States live in a window that grows with the light cone and is never
//! truncated, so every stored amplitude outside the window is exactly zero.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::Distribution;

/// Amplitudes for coin `|0⟩` and coin `|1⟩` at one site.
pub type Spinor = [C64; 2];
/// Row-major 2×2 complex matrix.
pub type Mat2 = [[C64; 2]; 2];

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Offset constant `c` of the unidirectional-to-bidirectional profile map,
/// `θ_u(x, n) = θ_b(2x − n + c)` with 1-based step index `n`.
pub const UNI_BI_OFFSET: i64 = 1;

/// `exp[iθ n̂·σ/2]` with `n̂ = (cos axis, sin axis, 0)`.
pub fn coin_matrix(theta: f64, axis: f64) -> Mat2 {
    let c = C64::new((theta / 2.0).cos(), 0.0);
    let s = (theta / 2.0).sin();
    // n̂·σ = [[0, e^{-i·axis}], [e^{i·axis}, 0]]
    let upper = C64::i() * s * C64::from_polar(1.0, -axis);
    let lower = C64::i() * s * C64::from_polar(1.0, axis);
    [[c, upper], [lower, c]]
}

pub fn mat_vec(m: &Mat2, v: &Spinor) -> Spinor {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn adjoint(m: &Mat2) -> Mat2 {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

/// How a profile angle `θ` becomes the rotation angle handed to
/// [`coin_matrix`].
///
/// `HalfAngle` applies `exp[iθσ/2]` literally. `FullAngle` applies
/// `exp[iθσ]`, the frame in which the two-domain edge states
/// `a_x = [(1 − sin θ)/cos θ]^x` are exact eigenstates of the bidirectional
/// walk; the topology module always works in this frame.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoinConvention {
    #[default]
    #[serde(alias = "half")]
    HalfAngle,
    #[serde(alias = "full")]
    FullAngle,
}

impl CoinConvention {
    pub fn rotation_angle(self, theta: f64) -> f64 {
        match self {
            CoinConvention::HalfAngle => theta,
            CoinConvention::FullAngle => 2.0 * theta,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    Homogeneous { theta: f64 },
    /// `theta_minus` for `x < boundary`, `theta_plus` for `x ≥ boundary`.
    TwoDomain { theta_minus: f64, theta_plus: f64, boundary: i64 },
    /// Explicit angles keyed by `(step, position)`, step 1-based.
    PerStep { table: BTreeMap<(usize, i64), f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoinProfile {
    pub kind: ProfileKind,
    /// Equatorial rotation axis; 0 is σx.
    pub axis: f64,
    pub convention: CoinConvention,
}

impl CoinProfile {
    pub fn homogeneous(theta: f64) -> Self {
        CoinProfile { kind: ProfileKind::Homogeneous { theta }, axis: 0.0, convention: CoinConvention::default() }
    }

    pub fn two_domain(theta_minus: f64, theta_plus: f64) -> Self {
        CoinProfile {
            kind: ProfileKind::TwoDomain { theta_minus, theta_plus, boundary: 0 },
            axis: 0.0,
            convention: CoinConvention::default(),
        }
    }

    pub fn per_step(table: BTreeMap<(usize, i64), f64>) -> Self {
        CoinProfile { kind: ProfileKind::PerStep { table }, axis: 0.0, convention: CoinConvention::default() }
    }

    pub fn with_boundary(mut self, b: i64) -> Self {
        if let ProfileKind::TwoDomain { boundary, .. } = &mut self.kind {
            *boundary = b;
        }
        self
    }

    pub fn with_axis(mut self, axis: f64) -> Self {
        self.axis = axis;
        self
    }

    pub fn with_convention(mut self, convention: CoinConvention) -> Self {
        self.convention = convention;
        self
    }

    /// Coin angle at `x` for the 1-based `step`, or `None` when a per-step
    /// table has no entry.
    pub fn theta_at(&self, x: i64, step: usize) -> Option<f64> {
        match &self.kind {
            ProfileKind::Homogeneous { theta } => Some(*theta),
            ProfileKind::TwoDomain { theta_minus, theta_plus, boundary } => {
                Some(if x < *boundary { *theta_minus } else { *theta_plus })
            }
            ProfileKind::PerStep { table } => table.get(&(step, x)).copied(),
        }
    }

    pub fn coin_at(&self, x: i64, step: usize) -> Option<Mat2> {
        self.theta_at(x, step).map(|t| coin_matrix(self.convention.rotation_angle(t), self.axis))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WalkKind {
    Unidirectional,
    Bidirectional,
}

/// Walker ⊗ coin wavefunction on the window `[offset, offset + amps.len())`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    pub offset: i64,
    pub amps: Vec<Spinor>,
}

impl WalkState {
    /// Wraps raw amplitudes without normalizing.
    pub fn from_raw(offset: i64, amps: Vec<Spinor>) -> Self {
        WalkState { offset, amps }
    }

    /// Wraps amplitudes and normalizes them.
    pub fn from_amplitudes(offset: i64, amps: Vec<Spinor>) -> Result<Self> {
        WalkState { offset, amps }.normalized()
    }

    pub fn localized(x: i64, coin: Spinor) -> Result<Self> {
        Self::from_amplitudes(x, vec![coin])
    }

    pub fn end(&self) -> i64 {
        self.offset + self.amps.len() as i64
    }

    pub fn amplitude(&self, x: i64) -> Spinor {
        if x < self.offset || x >= self.end() {
            [ZERO; 2]
        } else {
            self.amps[(x - self.offset) as usize]
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a[0].norm_sqr() + a[1].norm_sqr()).sum()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n <= 0.0 || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        for a in &mut self.amps {
            a[0] /= n;
            a[1] /= n;
        }
        Ok(self)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &WalkState) -> C64 {
        let lo = self.offset.max(other.offset);
        let hi = self.end().min(other.end());
        (lo..hi)
            .map(|x| {
                let a = self.amplitude(x);
                let b = other.amplitude(x);
                a[0].conj() * b[0] + a[1].conj() * b[1]
            })
            .sum()
    }

    /// `α·self + β·other` on the union window.
    pub fn combine(&self, alpha: C64, other: &WalkState, beta: C64) -> WalkState {
        let lo = self.offset.min(other.offset);
        let hi = self.end().max(other.end());
        let amps = (lo..hi)
            .map(|x| {
                let a = self.amplitude(x);
                let b = other.amplitude(x);
                [alpha * a[0] + beta * b[0], alpha * a[1] + beta * b[1]]
            })
            .collect();
        WalkState { offset: lo, amps }
    }

    /// Largest amplitude difference over the union window.
    pub fn max_abs_diff(&self, other: &WalkState) -> f64 {
        let lo = self.offset.min(other.offset);
        let hi = self.end().max(other.end());
        (lo..hi)
            .map(|x| {
                let a = self.amplitude(x);
                let b = other.amplitude(x);
                (a[0] - b[0]).norm().max((a[1] - b[1]).norm())
            })
            .fold(0.0, f64::max)
    }

    /// Position marginal `p(x) = |a(x,0)|² + |a(x,1)|²`.
    pub fn distribution(&self, step: usize) -> Distribution {
        Distribution {
            step,
            offset: self.offset,
            probs: self.amps.iter().map(|a| a[0].norm_sqr() + a[1].norm_sqr()).collect(),
        }
    }
}

/// Applies the position-wise coin for the 1-based `step`.
pub fn apply_coin(state: &WalkState, profile: &CoinProfile, step: usize) -> Result<WalkState> {
    let mut amps = state.amps.clone();
    for (i, a) in amps.iter_mut().enumerate() {
        let x = state.offset + i as i64;
        match profile.coin_at(x, step) {
            Some(m) => *a = mat_vec(&m, a),
            None if a[0] == ZERO && a[1] == ZERO => {}
            None => return Err(Error::ProfileIncomplete { step, position: x }),
        }
    }
    Ok(WalkState { offset: state.offset, amps })
}

pub fn apply_shift(state: &WalkState, kind: WalkKind) -> WalkState {
    let n = state.amps.len();
    match kind {
        WalkKind::Unidirectional => {
            let mut amps = vec![[ZERO; 2]; n + 1];
            for (i, a) in state.amps.iter().enumerate() {
                amps[i][0] += a[0];
                amps[i + 1][1] += a[1];
            }
            WalkState { offset: state.offset, amps }
        }
        WalkKind::Bidirectional => {
            let mut amps = vec![[ZERO; 2]; n + 2];
            // new index j corresponds to x = offset - 1 + j
            for (i, a) in state.amps.iter().enumerate() {
                amps[i][0] += a[0];
                amps[i + 2][1] += a[1];
            }
            WalkState { offset: state.offset - 1, amps }
        }
    }
}

fn apply_shift_adjoint(state: &WalkState, kind: WalkKind) -> WalkState {
    let n = state.amps.len();
    match kind {
        WalkKind::Unidirectional => {
            let mut amps = vec![[ZERO; 2]; n + 1];
            for (i, a) in state.amps.iter().enumerate() {
                amps[i + 1][0] += a[0];
                amps[i][1] += a[1];
            }
            WalkState { offset: state.offset - 1, amps }
        }
        WalkKind::Bidirectional => {
            let mut amps = vec![[ZERO; 2]; n + 2];
            for (i, a) in state.amps.iter().enumerate() {
                amps[i + 2][0] += a[0];
                amps[i][1] += a[1];
            }
            WalkState { offset: state.offset - 1, amps }
        }
    }
}

/// One step `U = S·R` with 1-based `step_index`.
pub fn step(state: &WalkState, profile: &CoinProfile, kind: WalkKind, step_index: usize) -> Result<WalkState> {
    Ok(apply_shift(&apply_coin(state, profile, step_index)?, kind))
}

/// `U† = R†·S†` for the same step; undoes [`step`].
pub fn step_adjoint(state: &WalkState, profile: &CoinProfile, kind: WalkKind, step_index: usize) -> Result<WalkState> {
    let shifted = apply_shift_adjoint(state, kind);
    let mut amps = shifted.amps;
    for (i, a) in amps.iter_mut().enumerate() {
        let x = shifted.offset + i as i64;
        match profile.coin_at(x, step_index) {
            Some(m) => *a = mat_vec(&adjoint(&m), a),
            None if a[0] == ZERO && a[1] == ZERO => {}
            None => return Err(Error::ProfileIncomplete { step: step_index, position: x }),
        }
    }
    Ok(WalkState { offset: shifted.offset, amps })
}

/// State after `t` steps.
pub fn evolve_state(initial: &WalkState, profile: &CoinProfile, kind: WalkKind, t: usize) -> Result<WalkState> {
    (1..=t).try_fold(initial.clone(), |s, n| step(&s, profile, kind, n))
}

/// Position distributions for τ = 0..=t.
pub fn evolve(initial: &WalkState, profile: &CoinProfile, kind: WalkKind, t: usize) -> Result<Vec<Distribution>> {
    let mut out = Vec::with_capacity(t + 1);
    let mut state = initial.clone();
    out.push(state.distribution(0));
    for n in 1..=t {
        state = step(&state, profile, kind, n)?;
        out.push(state.distribution(n));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// `|x=0⟩⊗[i(√2−1)|1⟩ + |0⟩]/√(4−2√2)`, orthogonal to the edge states.
    PhiCo,
    /// `|x=0⟩⊗[|1⟩ + i(√2−1)|0⟩]/√(4−2√2)`, close to the edge-state pair.
    PhiCe,
    /// Sparse `(x, coin |0⟩, coin |1⟩)` amplitudes, normalized on use.
    Custom(Vec<(i64, C64, C64)>),
}

fn paper_norm() -> f64 {
    (4.0 - 2.0 * SQRT_2).sqrt()
}

pub fn phi_co() -> WalkState {
    let n = paper_norm();
    WalkState { offset: 0, amps: vec![[C64::new(1.0 / n, 0.0), C64::new(0.0, (SQRT_2 - 1.0) / n)]] }
}

pub fn phi_ce() -> WalkState {
    let n = paper_norm();
    WalkState { offset: 0, amps: vec![[C64::new(0.0, (SQRT_2 - 1.0) / n), C64::new(1.0 / n, 0.0)]] }
}

pub fn initial_state(init: &InitialState) -> Result<WalkState> {
    match init {
        InitialState::PhiCo => Ok(phi_co()),
        InitialState::PhiCe => Ok(phi_ce()),
        InitialState::Custom(entries) => {
            if entries.is_empty() {
                return Err(Error::ZeroNorm);
            }
            let lo = entries.iter().map(|e| e.0).min().unwrap();
            let hi = entries.iter().map(|e| e.0).max().unwrap();
            let mut amps = vec![[ZERO; 2]; (hi - lo + 1) as usize];
            for &(x, c0, c1) in entries {
                let a = &mut amps[(x - lo) as usize];
                a[0] += c0;
                a[1] += c1;
            }
            WalkState::from_amplitudes(lo, amps)
        }
    }
}

/// Relabels a step-`t` unidirectional distribution into bidirectional
/// coordinates, `x_b = 2·x_u − t`.
pub fn convert_uni_to_bi(dist: &Distribution, t: usize) -> Result<Distribution> {
    let t = t as i64;
    if let Some((x, _)) = dist.iter().find(|&(x, p)| p > 0.0 && !(0..=t).contains(&x)) {
        return Err(Error::NotUnidirectional { steps: t as usize, position: x });
    }
    let mut probs = vec![0.0; (2 * t + 1) as usize];
    for (x, p) in dist.iter().filter(|&(x, _)| (0..=t).contains(&x)) {
        probs[(2 * x) as usize] = p;
    }
    Ok(Distribution { step: dist.step, offset: -t, probs })
}

/// Re-expresses a bidirectional-frame profile as the per-step table that
/// drives the unidirectional walk to the same dynamics for steps `1..=t_max`.
///
/// Entries cover the unidirectional light cone `x ∈ [0, n−1]` at step `n`.
pub fn map_profile_bi_to_uni(profile: &CoinProfile, t_max: usize) -> Result<CoinProfile> {
    if matches!(profile.kind, ProfileKind::PerStep { .. }) {
        return Err(Error::InvalidArgument("only homogeneous or two-domain profiles can be mapped".into()));
    }
    let mut table = BTreeMap::new();
    for n in 1..=t_max {
        for x in 0..n as i64 {
            let xb = 2 * x - n as i64 + UNI_BI_OFFSET;
            // theta_at never fails for the kinds accepted above
            table.insert((n, x), profile.theta_at(xb, n).unwrap());
        }
    }
    Ok(CoinProfile { kind: ProfileKind::PerStep { table }, axis: profile.axis, convention: profile.convention })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn assert_mat_close(a: &Mat2, b: &Mat2, tol: f64) {
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[i][j] - b[i][j]).norm() <= tol, "{a:?} vs {b:?}");
            }
        }
    }

    fn assert_state_close(a: &WalkState, b: &WalkState, tol: f64) {
        let d = a.max_abs_diff(b);
        assert!(d <= tol, "states differ by {d}");
    }

    #[test]
    fn coin_matrix_examples() {
        let one = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        let zero = c(0.0, 0.0);
        assert_mat_close(&coin_matrix(0.0, 0.0), &[[one, zero], [zero, one]], 1e-15);
        assert_mat_close(&coin_matrix(PI, 0.0), &[[zero, i], [i, zero]], 1e-15);
        let h = 1.0 / SQRT_2;
        assert_mat_close(&coin_matrix(PI / 2.0, 0.0), &[[c(h, 0.0), c(0.0, h)], [c(0.0, h), c(h, 0.0)]], 1e-15);
        let v = mat_vec(&coin_matrix(PI / 2.0, 0.0), &[zero, one]);
        assert!((v[0] - c(0.0, h)).norm() < 1e-15 && (v[1] - c(h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn coin_matrix_is_unitary() {
        for &(t, a) in &[(0.3, 0.0), (1.7, 0.4), (-2.2, 2.9), (11.0, -1.0)] {
            let m = coin_matrix(t, a);
            let id = mat_mul(&adjoint(&m), &m);
            assert_mat_close(&id, &[[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]], 1e-14);
        }
    }

    #[test]
    fn zero_angle_coin_is_identity_on_states() {
        let s = phi_co();
        let out = apply_coin(&s, &CoinProfile::homogeneous(0.0), 1).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn balanced_coin_on_single_site() {
        let s = WalkState::localized(0, [c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let out = apply_coin(&s, &CoinProfile::homogeneous(PI / 2.0), 1).unwrap();
        let h = 1.0 / SQRT_2;
        let expected = WalkState::from_raw(0, vec![[c(0.0, h), c(h, 0.0)]]);
        assert_state_close(&out, &expected, 1e-15);
    }

    #[test]
    fn per_step_profile_missing_entry_is_an_error() {
        let s = WalkState::from_amplitudes(0, vec![[c(1.0, 0.0), c(0.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]).unwrap();
        let table = BTreeMap::from([((1, 0), 0.5)]);
        let err = apply_coin(&s, &CoinProfile::per_step(table), 1).unwrap_err();
        assert!(matches!(err, Error::ProfileIncomplete { step: 1, position: 1 }));
        assert!(err.to_string().contains("profile incomplete"));
    }

    #[test]
    fn shift_examples() {
        let zero = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let s0 = WalkState::localized(0, [one, zero]).unwrap();
        assert_eq!(apply_shift(&s0, WalkKind::Unidirectional).distribution(0).prob(0), 1.0);

        let s1 = WalkState::localized(0, [zero, one]).unwrap();
        let moved = apply_shift(&s1, WalkKind::Unidirectional);
        assert_eq!(moved.amplitude(1), [zero, one]);
        assert_eq!(moved.amplitude(0), [zero, zero]);

        let h = c(1.0 / SQRT_2, 0.0);
        let both = WalkState::from_raw(0, vec![[h, h]]);
        let bi = apply_shift(&both, WalkKind::Bidirectional);
        let expected = WalkState::from_raw(-1, vec![[h, zero], [zero, zero], [zero, h]]);
        assert_state_close(&bi, &expected, 0.0);
    }

    #[test]
    fn identity_coin_walk_is_a_pure_shift() {
        let s = WalkState::localized(0, [c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let dists = evolve(&s, &CoinProfile::homogeneous(0.0), WalkKind::Unidirectional, 3).unwrap();
        assert_eq!(dists.len(), 4);
        for (tau, d) in dists.iter().enumerate() {
            assert_eq!(d.step, tau);
            assert!((d.prob(tau as i64) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn balanced_step_splits_evenly() {
        let s = WalkState::localized(0, [c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let out = step(&s, &CoinProfile::homogeneous(PI / 2.0), WalkKind::Unidirectional, 1).unwrap();
        let d = out.distribution(1);
        assert!((d.prob(0) - 0.5).abs() < 1e-15);
        assert!((d.prob(1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn evolve_zero_steps_returns_initial_marginal() {
        let d = evolve(&phi_ce(), &CoinProfile::homogeneous(1.0), WalkKind::Bidirectional, 0).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d[0].prob(0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn prepared_states_are_normalized_and_orthogonal() {
        assert!((phi_co().norm_sqr() - 1.0).abs() < 1e-12);
        assert!((phi_ce().norm_sqr() - 1.0).abs() < 1e-12);
        assert!(phi_co().inner(&phi_ce()).norm() < 1e-12);
    }

    #[test]
    fn custom_initial_state_is_normalized() {
        let s = initial_state(&InitialState::Custom(vec![(0, c(2.0, 0.0), c(0.0, 0.0))])).unwrap();
        assert_eq!(s, WalkState::from_raw(0, vec![[c(1.0, 0.0), c(0.0, 0.0)]]));
        let zero = InitialState::Custom(vec![(3, c(0.0, 0.0), c(0.0, 0.0))]);
        assert!(matches!(initial_state(&zero), Err(Error::ZeroNorm)));
    }

    #[test]
    fn uni_to_bi_examples() {
        let d = convert_uni_to_bi(&Distribution::point(0, 0), 0).unwrap();
        assert_eq!(d.prob(0), 1.0);

        let d = convert_uni_to_bi(&Distribution::point(2, 1), 2).unwrap();
        assert_eq!(d.prob(0), 1.0);
        assert_eq!(d.total(), 1.0);

        let src = Distribution::from_pairs(3, &[(0, 0.25), (3, 0.75)]).unwrap();
        let d = convert_uni_to_bi(&src, 3).unwrap();
        assert_eq!(d.prob(-3), 0.25);
        assert_eq!(d.prob(3), 0.75);
        assert_eq!(d.offset, -3);
    }

    #[test]
    fn uni_to_bi_rejects_out_of_cone_support() {
        let src = Distribution::from_pairs(2, &[(0, 0.5), (3, 0.5)]).unwrap();
        let err = convert_uni_to_bi(&src, 2).unwrap_err();
        assert!(err.to_string().contains("not a step-2 unidirectional distribution"));
    }

    #[test]
    fn mapping_homogeneous_is_constant() {
        let mapped = map_profile_bi_to_uni(&CoinProfile::homogeneous(0.7), 5).unwrap();
        let ProfileKind::PerStep { table } = &mapped.kind else { panic!() };
        assert_eq!(table.len(), 15);
        assert!(table.values().all(|&t| t == 0.7));
    }

    #[test]
    fn mapped_boundary_advances_every_two_steps() {
        let p = CoinProfile::two_domain(-PI / 4.0, PI / 4.0);
        let mapped = map_profile_bi_to_uni(&p, 4).unwrap();
        // first x with θ₊ at each step
        let first_plus: Vec<i64> = (1..=4)
            .map(|n| (0..n as i64).find(|&x| mapped.theta_at(x, n).unwrap() > 0.0).unwrap())
            .collect();
        assert_eq!(first_plus, vec![0, 1, 1, 2]);
    }

    #[test]
    fn mapping_rejects_tables() {
        assert!(map_profile_bi_to_uni(&CoinProfile::per_step(BTreeMap::new()), 2).is_err());
    }

    #[test]
    fn full_angle_convention_doubles_rotation() {
        let p = CoinProfile::homogeneous(PI / 4.0).with_convention(CoinConvention::FullAngle);
        assert_mat_close(&p.coin_at(3, 1).unwrap(), &coin_matrix(PI / 2.0, 0.0), 1e-15);
    }

    #[test]
    fn adjoint_step_undoes_step() {
        let p = CoinProfile::two_domain(-0.4, 1.1).with_axis(0.3);
        for kind in [WalkKind::Unidirectional, WalkKind::Bidirectional] {
            let s = phi_co();
            let fwd = step(&step(&s, &p, kind, 1).unwrap(), &p, kind, 2).unwrap();
            let back = step_adjoint(&step_adjoint(&fwd, &p, kind, 2).unwrap(), &p, kind, 1).unwrap();
            assert_state_close(&back, &s, 1e-12);
        }
    }
}
