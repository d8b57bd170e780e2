use adiagrover::grover::{estimate_overlap, GroverBackends};
use adiagrover::hamiltonians::{ising_hf, IsingSpec};
use adiagrover::operators::{infidelity, StateVector};
use adiagrover::protocols::{default_anneal, ideal_oracle, CompiledOracle, OracleVariant, RngStream};
use adiagrover::schedule::ScheduleKind;
use adiagrover::C64;
use nalgebra::DVector;
use proptest::prelude::*;

fn spin1_call_error(spec: &IsingSpec, t: f64) -> (GroverBackends, f64) {
    let hf = ising_hf(spec);
    let anneal = default_anneal(ScheduleKind::Tanh, t, &hf, OracleVariant::Spin1).unwrap();
    let backends = GroverBackends::ising(spec, &anneal, OracleVariant::Spin1, OracleVariant::Spin1).unwrap();
    let phi = StateVector::uniform(spec.n);
    let out = backends.oracle.apply(&phi, &mut RngStream::new(0)).unwrap();
    let err = infidelity(&out.register_state, &ideal_oracle(&hf, &phi).unwrap()).unwrap();
    (backends, err)
}

#[test]
fn annealed_run_converges_to_ideal_trajectory() {
    let spec = IsingSpec::uniform(3, 1.0).unwrap();
    let hf = ising_hf(&spec);
    let ideal_anneal = default_anneal(ScheduleKind::Tanh, 1.0, &hf, OracleVariant::Spin1).unwrap();
    let ideal = GroverBackends::ising(&spec, &ideal_anneal, OracleVariant::Ideal, OracleVariant::Ideal)
        .unwrap()
        .run(2, &mut RngStream::new(0))
        .unwrap();
    let gap = |t: f64| {
        let (backends, err) = spin1_call_error(&spec, t);
        let run = backends.run(2, &mut RngStream::new(0)).unwrap();
        let g = run
            .steps
            .iter()
            .zip(&ideal.steps)
            .map(|(a, b)| (a.fidelity_to_target - b.fidelity_to_target).abs())
            .fold(0.0, f64::max);
        (err, g)
    };
    let (e1, g1) = gap(3.0);
    let (e2, g2) = gap(6.0);
    assert!(e2 <= 0.5 * e1, "per-call infidelity {e1} -> {e2}");
    assert!(g2 <= 0.5 * g1, "trajectory gap {g1} -> {g2}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn overlap_estimate_ignores_global_phase(theta in 0.0..std::f64::consts::TAU, seed in 0u64..100) {
        let hf = ising_hf(&IsingSpec::uniform(4, 1.0).unwrap());
        let oracle = CompiledOracle::ideal(&hf).unwrap();
        let mut rng = RngStream::new(seed);
        let start = StateVector::normalized(
            DVector::from_fn(16, |_, _| C64::new(rng.uniform() - 0.5, rng.uniform() - 0.5)),
            vec![2; 4],
        ).unwrap();
        let a = estimate_overlap(&oracle, &start, 20, &mut RngStream::new(0), None).unwrap();
        let b = estimate_overlap(&oracle, &start.with_global_phase(theta), 20, &mut RngStream::new(0), None).unwrap();
        prop_assert!((a.gamma_hat - b.gamma_hat).abs() < 1e-9);
        let direct = start.amplitudes()[15].norm();
        prop_assert!((a.gamma_hat - direct).abs() < 0.05 * direct, "{} vs {}", a.gamma_hat, direct);
    }
}
