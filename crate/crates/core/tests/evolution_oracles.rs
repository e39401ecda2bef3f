mod common;

use num_complex::Complex64;

use common::{apply_dense, dense_expm, fidelity, random_state, reference_params, ring, rng};
use xxz_floquet::evolution::{
    evolve_periodic, evolve_periodic_between, evolve_static, expm_apply, EvolutionConfig,
};
use xxz_floquet::observables::{energy, overlap, sz_profile};
use xxz_floquet::spin::total_magnetization;
use xxz_floquet::{build_dense, j0_zero, LibraryState, ModelParams, OperatorKind, ProductState, StateVector};

#[test]
fn krylov_matches_dense_exponential() {
    let m = ring(6, 1, reference_params(10.0, 1.3));
    let mut r = rng(11);
    for kind in [OperatorKind::H0, OperatorKind::HEff(1.3), OperatorKind::HOfT(0.21)] {
        let h = m.operator(kind).unwrap();
        let u = dense_expm(&build_dense(&h).unwrap(), 0.37);
        let psi = random_state(m.basis(), &mut r);
        let krylov = expm_apply(&h, 0.37, &psi, 20, 1e-10).unwrap();
        let exact = apply_dense(&u, &psi);
        assert!(fidelity(&krylov, &exact) >= 1.0 - 1e-10, "{kind:?}");
        assert!(krylov.distance(&exact).unwrap() <= 1e-10, "{kind:?}");
        assert!((krylov.norm() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn long_step_uses_substeps() {
    // small Krylov space forces the adaptive substepping
    let m = ring(6, 1, reference_params(10.0, 1.3));
    let h = m.operator(OperatorKind::H0).unwrap();
    let psi = random_state(m.basis(), &mut rng(3));
    let exact = apply_dense(&dense_expm(&build_dense(&h).unwrap(), 7.5), &psi);
    let krylov = expm_apply(&h, 7.5, &psi, 6, 1e-10).unwrap();
    assert!(krylov.distance(&exact).unwrap() <= 1e-9);
}

#[test]
fn negative_step_inverts() {
    let m = ring(6, 1, reference_params(10.0, 0.8));
    let h = m.operator(OperatorKind::HEff(0.8)).unwrap();
    let psi = random_state(m.basis(), &mut rng(5));
    let fwd = expm_apply(&h, 1.7, &psi, 20, 1e-12).unwrap();
    let back = expm_apply(&h, -1.7, &fwd, 20, 1e-12).unwrap();
    assert!(back.distance(&psi).unwrap() < 1e-10);
}

#[test]
fn free_magnon_on_four_site_ring() {
    // one up spin on a down background hops with amplitude -J⊥/2; plane
    // waves e^{ikn} have energy -J⊥ cos k
    let j_perp = -0.75;
    let m = ring(4, 1, ModelParams::new(j_perp, 0.0, 1.0, 0.0).unwrap());
    let h = m.operator(OperatorKind::H0).unwrap();
    let psi = StateVector::product(&ProductState::parse("uddd", m.basis()).unwrap());
    for t in [0.3, 1.0, 4.2, 11.0] {
        let out = expm_apply(&h, t, &psi, 20, 1e-12).unwrap();
        for n in 0..4 {
            let mut amp = Complex64::new(0.0, 0.0);
            for q in 0..4 {
                let k = 2.0 * std::f64::consts::PI * q as f64 / 4.0;
                amp += Complex64::from_polar(1.0, k * n as f64 + j_perp * k.cos() * t);
            }
            amp /= 4.0;
            let got = out.amplitudes()[1 << n];
            assert!((got - amp).norm() < 1e-10, "t={t} n={n}: {got} vs {amp}");
        }
    }
}

/// Product of `steps` dense midpoint exponentials over `[0, t]`.
fn dense_time_ordered(m: &xxz_floquet::XxzModel, t: f64, steps: usize, psi: &StateVector) -> StateVector {
    let h = t / steps as f64;
    let mut out = psi.clone();
    for k in 0..steps {
        let mid = (k as f64 + 0.5) * h;
        let hm = build_dense(&m.operator(OperatorKind::HOfT(mid)).unwrap()).unwrap();
        out = apply_dense(&dense_expm(&hm, h), &out);
    }
    out
}

#[test]
fn one_period_matches_dense_time_ordering() {
    let a = j0_zero(1).unwrap();
    let m = ring(6, 1, reference_params(10.0, a));
    let period = m.params().period();
    let psi = random_state(m.basis(), &mut rng(17));
    let exact = dense_time_ordered(&m, period, 1024, &psi);
    // the default 64 steps leave an infidelity near 3e-8 at this drive
    // strength (δJ ≈ 24); 128 steps bring it below 1e-8
    for (steps, limit) in [(64, 1e-7), (128, 1e-8)] {
        let cfg = EvolutionConfig {
            steps_per_period: steps,
            t_max: period,
            snapshot_times: vec![period],
            tolerance: 1e-12,
            ..Default::default()
        };
        let traj = evolve_periodic(&m, &psi, &cfg).unwrap();
        let f = fidelity(&traj.states[0], &exact);
        assert!(f >= 1.0 - limit, "{steps} steps: fidelity {f}");
    }
}

#[test]
fn halving_the_step_converges() {
    let m = ring(8, 1, reference_params(10.0, 2.4048));
    let psi = StateVector::product(&ProductState::parse("dddduudu", m.basis()).unwrap());
    let run = |steps: usize| {
        let cfg = EvolutionConfig {
            steps_per_period: steps,
            t_max: 10.0,
            snapshot_times: vec![10.0],
            tolerance: 1e-12,
            ..Default::default()
        };
        evolve_periodic(&m, &psi, &cfg).unwrap().states.pop().unwrap()
    };
    let coarse = run(64);
    let fine = run(128);
    let finer = run(256);
    let d1 = coarse.distance(&fine).unwrap();
    let d2 = fine.distance(&finer).unwrap();
    // second order: each halving shrinks the change about fourfold
    assert!(d2 < d1 / 3.0, "{d1:e} then {d2:e}");
    assert!(d1 < 1e-2, "{d1:e}");
}

#[test]
fn forward_then_backward_returns() {
    let m = ring(10, 1, reference_params(6.0, 2.4048));
    let psi = StateVector::product(&ProductState::parse("dddduduuuu", m.basis()).unwrap());
    let cfg = EvolutionConfig::default();
    let t_end = 3.3;
    let fwd = evolve_periodic_between(&m, &psi, 0.0, t_end, &[], &cfg, &mut |_, _| Ok(())).unwrap();
    let back = evolve_periodic_between(&m, &fwd.final_state, t_end, 0.0, &[], &cfg, &mut |_, _| Ok(()))
        .unwrap();
    assert!(fidelity(&back.final_state, &psi) >= 1.0 - 1e-7);
}

#[test]
fn off_grid_snapshot_is_exact_in_time() {
    let m = ring(8, 1, reference_params(10.0, 1.0));
    let psi = StateVector::product(&ProductState::parse("uuuudddd", m.basis()).unwrap());
    let with_stops = EvolutionConfig {
        t_max: 1.0,
        snapshot_times: vec![0.0101, 0.333, 0.5, 1.0],
        tolerance: 1e-12,
        ..Default::default()
    };
    let traj = evolve_periodic(&m, &psi, &with_stops).unwrap();
    assert_eq!(traj.times, with_stops.snapshot_times);
    // a run that ends at the stop takes the same steps
    let short =
        EvolutionConfig { t_max: 0.333, snapshot_times: vec![0.0101, 0.333], ..with_stops.clone() };
    let direct = evolve_periodic(&m, &psi, &short).unwrap();
    assert_eq!(traj.states[1], direct.states[1]);
    // shortened steps only perturb the final state at the scheme's order
    let plain = EvolutionConfig { snapshot_times: vec![1.0], ..with_stops };
    let end = evolve_periodic(&m, &psi, &plain).unwrap();
    assert!(traj.states[3].distance(&end.states[0]).unwrap() < 1e-4);
}

#[test]
fn diagonal_hamiltonian_only_adds_phase() {
    let m = ring(8, 1, ModelParams::new(0.0, -1.0, 10.0, 0.0).unwrap());
    let psi = StateVector::product(&ProductState::parse("uudduddu", m.basis()).unwrap());
    let initial = sz_profile(&psi).unwrap();
    let cfg = EvolutionConfig::default().with_uniform_snapshots(100.0, 10.0).unwrap();
    let traj = evolve_periodic(&m, &psi, &cfg).unwrap();
    assert_eq!(traj.times.len(), 11);
    for s in &traj.states {
        for (a, b) in sz_profile(s).unwrap().iter().zip(&initial) {
            assert!((a - b).abs() <= 1e-12);
        }
    }
}

#[test]
fn driven_run_conserves_norm_and_magnetization() {
    let m = ring(10, 1, reference_params(8.0, 2.4048));
    let psi = StateVector::product(&ProductState::parse("ddddduduuu", m.basis()).unwrap());
    let mz = total_magnetization(&psi);
    let cfg = EvolutionConfig::default().with_uniform_snapshots(20.0, 1.0).unwrap();
    let traj = evolve_periodic(&m, &psi, &cfg).unwrap();
    assert!(traj.norm_drift <= 1e-8);
    for s in &traj.states {
        assert!((s.norm() - 1.0).abs() <= 1e-8);
        assert!((total_magnetization(s) - mz).abs() <= 1e-9);
    }
}

#[test]
fn effective_fixed_point_at_sixteen_sites() {
    let a = j0_zero(1).unwrap();
    let m = ring(16, 1, reference_params(10.0, a));
    let h = m.operator(OperatorKind::HEff(a)).unwrap();
    let a0 = StateVector::product(&LibraryState::A0.build(16).unwrap());
    let times: Vec<f64> = (0..=20).map(|k| 5.0 * k as f64).collect();
    let traj = evolve_static(&h, &a0, &times).unwrap();
    for s in &traj.states {
        assert!((overlap(s, &a0).unwrap().norm() - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn effective_dynamics_leave_a1() {
    let a = j0_zero(1).unwrap();
    let m = ring(12, 1, reference_params(10.0, a));
    let h = m.operator(OperatorKind::HEff(a)).unwrap();
    let a1 = StateVector::product(&LibraryState::A1.build(12).unwrap());
    let times: Vec<f64> = (1..=20).map(|k| 0.5 * k as f64).collect();
    let traj = evolve_static(&h, &a1, &times).unwrap();
    let min = traj.states.iter().map(|s| overlap(s, &a1).unwrap().norm()).fold(1.0, f64::min);
    assert!(min < 1.0 - 1e-3, "{min}");

    // a larger Krylov space and tighter tolerance agree at the first time
    let fine = expm_apply(&h, 0.5, &a1, 30, 1e-13).unwrap();
    assert!(fine.distance(&traj.states[0]).unwrap() < 1e-9);
}

#[test]
fn static_energy_conserved() {
    let m = ring(10, 1, reference_params(10.0, 1.1));
    let psi = random_state(m.basis(), &mut rng(23));
    for kind in [OperatorKind::H0, OperatorKind::HEff(1.1), OperatorKind::HEffXy(1.1), OperatorKind::HIsing] {
        let h = m.operator(kind).unwrap();
        let e0 = energy(&h, &psi).unwrap().value;
        let traj = evolve_static(&h, &psi, &[0.0, 1.0, 5.0, 20.0]).unwrap();
        assert_eq!(traj.states[0], psi);
        for s in &traj.states {
            let e = energy(&h, s).unwrap().value;
            assert!((e - e0).abs() <= 1e-9 * e0.abs().max(1.0), "{kind:?}: {e} vs {e0}");
        }
    }
}
