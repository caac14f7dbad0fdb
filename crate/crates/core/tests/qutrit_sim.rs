use std::f64::consts::PI;

use dtqw::qutrit::{
    apply_gate, compile_walk, measure_positions, simulate, simulate_trajectory, ChainLayout, ChainState, NoiseModel,
};
use dtqw::walk::{self, CoinConvention, CoinProfile, WalkKind, WalkState};
use dtqw::C64;
use proptest::prelude::*;

fn ideal_bi(profile: &CoinProfile, init: &WalkState, t: usize) -> Vec<dtqw::Distribution> {
    walk::evolve(init, profile, WalkKind::Bidirectional, t).unwrap()
}

fn chain_bi(profile: &CoinProfile, init: &WalkState, t: usize, noise: &NoiseModel) -> Vec<dtqw::Distribution> {
    let layout = ChainLayout::default();
    let circuit = compile_walk(t, profile, &init.amps[0], &layout).unwrap();
    simulate_trajectory(&circuit, noise, &layout)
        .unwrap()
        .iter()
        .enumerate()
        .map(|(s, st)| walk::convert_uni_to_bi(&measure_positions(st, &layout, s).distribution, s).unwrap())
        .collect()
}

fn max_diff(a: &dtqw::Distribution, b: &dtqw::Distribution) -> f64 {
    let lo = a.offset.min(b.offset);
    let hi = a.end().max(b.end());
    (lo..hi).map(|x| (a.prob(x) - b.prob(x)).abs()).fold(0.0, f64::max)
}

#[test]
fn noiseless_chain_reproduces_edge_walk() {
    let profile = CoinProfile::two_domain(-PI / 4.0, PI / 4.0).with_convention(CoinConvention::FullAngle);
    for init in [walk::phi_co(), walk::phi_ce()] {
        let chain = chain_bi(&profile, &init, 9, &NoiseModel::ideal());
        let ideal = ideal_bi(&profile, &init, 9);
        assert_eq!(chain.len(), 10);
        for (c, i) in chain.iter().zip(&ideal) {
            assert!(max_diff(c, i) < 1e-12, "step {}", c.step);
        }
    }
}

#[test]
fn damping_keeps_state_physical_gate_by_gate() {
    let layout = ChainLayout::default();
    let profile = CoinProfile::two_domain(-0.6, 0.9).with_convention(CoinConvention::FullAngle);
    let circuit = compile_walk(9, &profile, &walk::phi_ce().amps[0], &layout).unwrap();
    let noise = NoiseModel { over_rotation: 0.02, swap_error: 0.01, ..NoiseModel::with_t1(2.0) };
    let mut state = ChainState::ground(&layout);
    let mut loss = 0.0;
    for gate in circuit.layers.iter().flat_map(|l| &l.gates) {
        state = apply_gate(&state, gate, &noise, &layout).unwrap();
        assert!((state.trace() - 1.0).abs() < 1e-12);
        assert!(state.hermiticity_error() < 1e-12);
        assert!(state.is_positive_semidefinite(1e-10));
        let vac = state.population(ChainLayout::VACUUM);
        // the vacuum only refills once the walker has been created
        if loss > 0.0 || vac < 1.0 - 1e-12 {
            assert!(vac >= loss - 1e-12, "vacuum population dropped from {loss} to {vac}");
            loss = vac;
        }
    }
}

#[test]
fn strong_damping_empties_the_chain() {
    let layout = ChainLayout::default();
    let circuit = compile_walk(9, &CoinProfile::homogeneous(PI / 4.0), &walk::phi_co().amps[0], &layout).unwrap();
    let s = simulate(&circuit, &NoiseModel::with_t1(0.001), &layout).unwrap();
    assert!((s.population(ChainLayout::VACUUM) - 1.0).abs() < 1e-9);
}

#[test]
fn circuit_dump_round_trips() {
    let layout = ChainLayout::default();
    let c = compile_walk(3, &CoinProfile::homogeneous(0.4), &walk::phi_co().amps[0], &layout).unwrap();
    let back: dtqw::qutrit::Circuit = serde_json::from_str(&c.to_json().unwrap()).unwrap();
    assert_eq!(back, c);
}

fn arb_coin() -> impl Strategy<Value = [C64; 2]> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("non-zero", |(a, b, c, d)| a * a + b * b + c * c + d * d > 1e-3)
        .prop_map(|(a, b, c, d)| [C64::new(a, b), C64::new(c, d)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn noiseless_chain_matches_ideal_engine(
        tm in -1.5..1.5f64,
        tp in -1.5..1.5f64,
        boundary in -3i64..4,
        axis in -PI..PI,
        full in any::<bool>(),
        coin in arb_coin(),
        t in 0usize..10,
    ) {
        let convention = if full { CoinConvention::FullAngle } else { CoinConvention::HalfAngle };
        let profile = CoinProfile::two_domain(tm, tp).with_boundary(boundary).with_axis(axis).with_convention(convention);
        let init = WalkState::localized(0, coin).unwrap();
        let chain = chain_bi(&profile, &init, t, &NoiseModel::ideal());
        let ideal = ideal_bi(&profile, &init, t);
        for (c, i) in chain.iter().zip(&ideal) {
            prop_assert!(max_diff(c, i) < 1e-9);
        }
    }

    #[test]
    fn noisy_runs_conserve_probability(t1 in 0.05..50.0f64, eps in -0.05..0.05f64, swap_err in 0.0..0.1f64, t in 1usize..10) {
        let layout = ChainLayout::default();
        let noise = NoiseModel { over_rotation: eps, swap_error: swap_err, ..NoiseModel::with_t1(t1) };
        let circuit = compile_walk(t, &CoinProfile::homogeneous(0.7), &walk::phi_ce().amps[0], &layout).unwrap();
        let s = simulate(&circuit, &noise, &layout).unwrap();
        let m = measure_positions(&s, &layout, t);
        prop_assert!((m.distribution.total() + m.loss + m.stranded - 1.0).abs() < 1e-12);
        prop_assert!(m.distribution.probs.iter().all(|p| *p >= -1e-15));
    }
}
