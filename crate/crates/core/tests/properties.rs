use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use thirring_core::correlations::{n_point, two_point};
use thirring_core::dynamics::{evolve, init_gaussian, DynamicsParams, EvolutionSpec, Grid1D};
use thirring_core::lattice::{
    detection_identity_residual, Boundary, FockSystem, LatticeParams, QuantumState, Sector,
};
use thirring_core::params::{derive_params, interaction_ratio, momentum_cutoff, OpticalConfig};

fn coupling() -> impl Strategy<Value = f64> {
    0.0..=PI
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cutoff_is_bounded_and_decreasing(a in 1e-9..PI, b in 1e-9..PI, n_ph in 1.0..1e6) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let l_lo = momentum_cutoff(lo, n_ph).unwrap();
        let l_hi = momentum_cutoff(hi, n_ph).unwrap();
        prop_assert!(l_lo <= PI * n_ph && l_hi >= 0.0);
        prop_assert!(l_hi <= l_lo);
    }

    #[test]
    fn two_point_decreases_with_separation(x in coupling(), d in 1e-6..1.0, f in 1.01..100.0) {
        prop_assert!(two_point(d * f, x, 1e3).unwrap() < two_point(d, x, 1e3).unwrap());
    }

    #[test]
    fn n_point_is_symmetric_under_reflection(
        x in coupling(),
        pts in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 1..5),
    ) {
        let z: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let zp: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let a = n_point(&z, &zp, x, 100.0, 1.0);
        let mz: Vec<f64> = z.iter().map(|v| -v).collect();
        let mzp: Vec<f64> = zp.iter().map(|v| -v).collect();
        let b = n_point(&mz, &mzp, x, 100.0, 1.0);
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert!((a - b).abs() <= 1e-12 * a.abs()),
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "reflection changed the outcome"),
        }
    }

    #[test]
    fn interaction_ratio_matches_closed_form(
        same in 0.5..20.0f64,
        cross in 0.5..20.0f64,
        op in 0.5..3.0f64,
        om in 0.5..3.0f64,
    ) {
        prop_assume!((op - om).abs() > 1e-3);
        let mut cfg = OpticalConfig::slow_light_reference();
        cfg.omega_plus = [op, op];
        cfg.omega_minus = [om, om];
        cfg.delta_ss = [[same, cross], [cross, same]];
        let r = interaction_ratio(&derive_params(&cfg).unwrap()).unwrap();
        // equal mixing angles for both species: cos(φ_s̄ − φ_s) = 1
        let expected = 3.0 * same / (2.0 * cross);
        prop_assert!((r[0] - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn lossless_evolution_conserves_norm(
        g in 0.0..1.0f64,
        gx in 0.0..1.0f64,
        eta in -1.0..1.0f64,
        w in 0.0..3.0f64,
        k0 in -20.0..20.0f64,
    ) {
        let grid = Grid1D::new(1.0, 64).unwrap();
        let s0 = init_gaussian(&grid, 0.5, 0.08, k0, [1.0, 0.5]).unwrap();
        let p = DynamicsParams {
            hbar_over_2m: [1e-3, 1e-3],
            eta: [eta, -eta],
            omega0: w,
            g_same: [g, g],
            g_cross: [gx, gx],
            loss_same: [0.0; 2],
            loss_cross: [0.0; 2],
        };
        let tr = evolve(&s0, &p, &EvolutionSpec { stride: 200, ..EvolutionSpec::new(1e-3, 200) }).unwrap();
        let drift = (tr.final_state.total_norm() - s0.total_norm()).abs() / s0.total_norm();
        prop_assert!(drift < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_hamiltonians_are_hermitian_and_satisfy_detection_identity(
        j in 0.1..2.0f64,
        lambda in -1.0..1.0f64,
        u in 0.0..10.0f64,
        ux in -5.0..5.0f64,
        w in -2.0..2.0f64,
        open in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let boundary = if open { Boundary::Open } else { Boundary::Periodic };
        let params = LatticeParams {
            lambda: [lambda, -lambda],
            u_same: [u, u],
            u_cross: ux,
            w,
            ..LatticeParams::hopping_only(4, j, boundary)
        };
        let sys = FockSystem::new(params, Sector::Total(2)).unwrap();
        prop_assert_eq!(sys.hamiltonian.hermiticity_defect(), 0.0);
        let st = QuantumState::random(sys.dim(), seed).unwrap();
        prop_assert!(detection_identity_residual(&st, &sys) < 1e-12);
        let hx = sys.hamiltonian.matvec(&st.amplitudes);
        let e: Complex64 = st.amplitudes.iter().zip(&hx).map(|(a, b)| a.conj() * b).sum();
        prop_assert!(e.im.abs() < 1e-12);
    }
}
