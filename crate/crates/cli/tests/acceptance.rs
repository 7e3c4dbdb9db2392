//! Acceptance criteria, one check per criterion. Each check prints a single
//! `acceptance <n> ... PASS|FAIL` line with the measured figures and the
//! wall time against its budget. Runs without the libtest harness so the
//! lines are never captured; a positional argument filters by name.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thirring_core::atlas::{sweep_2d, sweep_cutoff, AxisSpec, Quantity, Spacing};
use thirring_core::correlations::{correlation_exponent, correlation_series, n_point, two_point};
use thirring_core::dynamics::pre_elim::{evolve_pre_elimination, PreElimSpec, PreElimState};
use thirring_core::dynamics::{
    evolve, init_gaussian, rotated_densities, DynamicsParams, EvolutionSpec, FieldState, Grid1D,
};
use thirring_core::lattice::{
    density_correlations, detection_identity_residual, fermionization_check, free_fermion_oracle,
    ground_state, spin_plus_identity_residual, Boundary, FockSystem, LatticeParams, QuantumState, Sector,
};
use thirring_core::params::{
    derive_params, kinetic_ratio, loss_rates, momentum_cutoff, rabi_pair, OpticalConfig, RegimeThresholds,
    Species, ZExtent,
};

fn report(n: u32, name: &str, ok: bool, detail: String, elapsed: Duration, budget: Duration) {
    let within = elapsed <= budget;
    let verdict = if ok && within { "PASS" } else { "FAIL" };
    println!(
        "acceptance {n:>2} {name}: {verdict} ({detail}; {:.3} s of {:.0} s)",
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    assert!(ok, "criterion {n} ({name}) failed: {detail}");
    assert!(within, "criterion {n} ({name}) exceeded its runtime budget");
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Two-point function written out from its closed form.
fn two_point_oracle(d: f64, x: f64, n_ph: f64) -> f64 {
    let lambda = PI * n_ph * sinc(x);
    let p = 1.0 / (1.0 + x / PI);
    lambda * lambda / 4.0 * (lambda * lambda * d * d).powf(-p)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn criterion_01_cutoff_curve() {
    let t0 = Instant::now();
    let series = sweep_cutoff(201, 1e3).unwrap();
    let worst = series
        .separations
        .iter()
        .zip(&series.values)
        .map(|(&x, &v)| (v - sinc(x)).abs())
        .fold(0.0, f64::max);
    let first = series.values[0];
    let last = *series.values.last().unwrap();
    let mid = momentum_cutoff(PI / 2.0, 1e3).unwrap() / (PI * 1e3);
    let ok = worst <= 1e-12 && (first - 1.0).abs() <= 1e-12 && last.abs() <= 1e-12 && (mid - 2.0 / PI).abs() <= 1e-12;
    let detail = format!("max |err| {worst:.1e}, f(0+) = {first}, f(pi) = {last:.1e}, f(pi/2) = {mid}");
    report(1, "cutoff curve", ok, detail, t0.elapsed(), Duration::from_secs(1));
}

fn criterion_02_correlation_scaling() {
    let t0 = Instant::now();
    let n_ph = 1e3;
    let mut worst_slope: f64 = 0.0;
    let mut worst_value: f64 = 0.0;
    let mut decreasing = true;
    let mut slopes = Vec::new();
    for x in [0.0, PI / 4.0, PI / 2.0, PI] {
        let s = correlation_series(x, n_ph, 0.1, 100.0, 64).unwrap();
        let (slope_ln_d, _, _) = s.log_log_fit();
        // ln(Λ²d²) = 2 ln d + const, so the slope against it is half.
        let slope = slope_ln_d / 2.0;
        let expected = -1.0 / (1.0 + x / PI);
        worst_slope = worst_slope.max((slope - expected).abs());
        assert_eq!(correlation_exponent(x).unwrap(), expected);
        decreasing &= s.values.windows(2).all(|w| w[1] < w[0]);
        for (u, g) in s.separations.iter().zip(&s.values) {
            worst_value = worst_value.max(rel(*g, two_point_oracle(u / n_ph, x, n_ph)));
        }
        slopes.push(format!("{slope_ln_d:.6}"));
    }
    let ok = worst_slope <= 1e-8 && decreasing && worst_value <= 1e-12;
    let detail = format!(
        "max slope error vs ln(L^2 d^2) {worst_slope:.1e}, slopes vs ln d [{}], max rel value error {worst_value:.1e}, decreasing {decreasing}",
        slopes.join(", ")
    );
    report(2, "correlation scaling", ok, detail, t0.elapsed(), Duration::from_secs(1));
}

fn kinetic_config(delta: f64, gamma_abs: f64) -> OpticalConfig {
    let (up_p, up_m) = rabi_pair(1.5, 0.004);
    let (dn_p, dn_m) = rabi_pair(1.5, -0.004);
    OpticalConfig {
        omega_plus: [up_p, dn_p],
        omega_minus: [up_m, dn_m],
        delta: [delta, delta],
        gamma_abs,
        v_s_direct: Some([100.0, 100.0]),
        ..OpticalConfig::slow_light_reference()
    }
}

fn criterion_03_kinetic_ratio() {
    let t0 = Instant::now();
    let gamma = 2.0 * PI * 6.07e6;
    let z_s = 1e-3;
    let deltas: Vec<f64> = (0..=30).map(|i| 0.05 + 0.03 * i as f64 / 30.0).collect();
    let max_beta = |g: f64| {
        deltas
            .iter()
            .map(|&d| {
                let p = derive_params(&kinetic_config(d, g)).unwrap();
                kinetic_ratio(&p, z_s).unwrap().into_iter().fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    };
    let beta = max_beta(gamma);
    // sin²2φ v Δ/(|cos 2φ| z Ω̄²) with Δ and Ω̄ in absolute units.
    let c: f64 = 0.004;
    let oracle = (1.0 - c * c) * 100.0 * 0.08 * gamma / (c * z_s * (1.5 * gamma).powi(2));
    let scaling: Vec<String> =
        [0.5, 2.0].iter().map(|f| format!("x{f}: {:.4}", max_beta(gamma * f))).collect();
    let ok = beta <= 0.05 && rel(beta, oracle) <= 1e-12;
    let detail = format!(
        "max beta_k over delta in [0.05, 0.08] = {beta:.4} (oracle {oracle:.4}); with Gamma {}",
        scaling.join(", ")
    );
    report(3, "kinetic ratio", ok, detail, t0.elapsed(), Duration::from_secs(1));
}

fn criterion_04_coherence_time() {
    let t0 = Instant::now();
    let with_detuning = |d: f64| {
        let mut cfg = OpticalConfig::slow_light_reference();
        cfg.delta_ss = [[d, d], [d, d]];
        loss_rates(&cfg).unwrap().coherence_time.unwrap()
    };
    let tau = with_detuning(4.0);
    let target = 400e-6;
    let factor = (tau / target).max(target / tau);
    let sweep: Vec<f64> = (0..10).map(|i| with_detuning(4.0 + 4.0 * i as f64)).collect();
    let monotone = sweep.windows(2).all(|w| w[1] > w[0]);
    let ok = factor <= 3.0 && monotone;
    let detail = format!("1/kappa = {:.1} us at 4 Gamma (factor {factor:.2} from 400 us), monotone {monotone}", tau * 1e6);
    report(4, "coherence time", ok, detail, t0.elapsed(), Duration::from_secs(1));
}

fn criterion_05_regime_atlas() {
    let t0 = Instant::now();
    let base = OpticalConfig::slow_light_reference();
    let n = 200;
    let x = AxisSpec::new("delta_ss.same", 0.5, 10.0, n, Spacing::Log);
    let y = AxisSpec::new("delta_ss.cross", 0.5, 10.0, n, Spacing::Log);
    let grid = sweep_2d(
        &x,
        &y,
        &base,
        Quantity::InteractionRatio,
        Species::Up,
        ZExtent::PerPhoton,
        &RegimeThresholds::default(),
    )
    .unwrap();
    let elapsed = t0.elapsed();

    let phi = |s: usize| base.omega_minus[s].atan2(base.omega_plus[s]);
    let cos = (phi(1) - phi(0)).cos();
    let (xs, ys) = (x.values(), y.values());
    let mut worst: f64 = 0.0;
    let mut hard = vec![false; n * n];
    let mut misplaced = 0;
    for i in 0..n {
        for j in 0..n {
            let v = grid.value(i, j).unwrap();
            worst = worst.max(rel(v, (2.0 + cos) * xs[i] / (2.0 * ys[j])));
            if v <= 0.1 {
                hard[i * n + j] = true;
                misplaced += usize::from(xs[i] >= ys[j]);
            }
        }
    }
    let cells = hard.iter().filter(|h| **h).count();
    let start = hard.iter().position(|h| *h).unwrap();
    let mut seen = vec![false; n * n];
    let mut stack = vec![start];
    seen[start] = true;
    let mut reached = 0;
    while let Some(k) = stack.pop() {
        reached += 1;
        let (i, j) = (k / n, k % n);
        let mut nb = Vec::new();
        if i > 0 {
            nb.push(k - n);
        }
        if i + 1 < n {
            nb.push(k + n);
        }
        if j > 0 {
            nb.push(k - 1);
        }
        if j + 1 < n {
            nb.push(k + 1);
        }
        for m in nb {
            if hard[m] && !seen[m] {
                seen[m] = true;
                stack.push(m);
            }
        }
    }
    let ok = worst <= 1e-12 && reached == cells && misplaced == 0;
    let detail = format!(
        "max rel error {worst:.1e}; {cells} hardcore cells, {reached} connected, {misplaced} with delta_ss >= delta_cross"
    );
    report(5, "regime atlas", ok, detail, elapsed, Duration::from_secs(5));
}

fn generic_params() -> DynamicsParams {
    DynamicsParams {
        hbar_over_2m: [1e-3, 1.5e-3],
        eta: [0.3, -0.3],
        omega0: 2.0,
        g_same: [0.5, 0.4],
        g_cross: [0.3, 0.2],
        loss_same: [0.0; 2],
        loss_cross: [0.0; 2],
    }
}

fn max_diff(a: &FieldState, b: &FieldState) -> f64 {
    let mut d: f64 = 0.0;
    for s in 0..2 {
        for (x, y) in a.psi[s].iter().zip(&b.psi[s]) {
            d = d.max((x - y).norm());
        }
    }
    d
}

fn criterion_06_mean_field_dynamics() {
    let t0 = Instant::now();
    let grid = Grid1D::new(1.0, 256).unwrap();

    // (a) norm drift
    let s0 = init_gaussian(&grid, 0.5, 0.05, 10.0, [1.0, 0.7]).unwrap();
    let spec = EvolutionSpec { stride: 10_000, ..EvolutionSpec::new(1e-4, 10_000) };
    let tr = evolve(&s0, &generic_params(), &spec).unwrap();
    let n0 = s0.total_norm();
    let drift = (tr.final_state.total_norm() - n0).abs() / n0;

    // (b) free spreading: σ(t) = σ0 √(1 + (ħt/(2m σ0²))²)
    let g512 = Grid1D::new(1.0, 512).unwrap();
    let q = 1e-3;
    let sigma0 = 0.02;
    let free = DynamicsParams {
        hbar_over_2m: [q, q],
        eta: [0.0; 2],
        omega0: 0.0,
        g_same: [0.0; 2],
        g_cross: [0.0; 2],
        loss_same: [0.0; 2],
        loss_cross: [0.0; 2],
    };
    let w0 = init_gaussian(&g512, 0.5, sigma0, 0.0, [1.0, 1.0]).unwrap();
    let tr = evolve(&w0, &free, &EvolutionSpec { stride: 200, ..EvolutionSpec::new(5e-4, 800) }).unwrap();
    let width_err = tr
        .samples
        .iter()
        .map(|s| rel(s.width[0], sigma0 * (1.0 + (q * s.t / (sigma0 * sigma0)).powi(2)).sqrt()))
        .fold(0.0, f64::max);

    // (c) advection at −η
    let eta = [0.5, -0.25];
    let adv = DynamicsParams { hbar_over_2m: [1e-5, 1e-5], eta, ..free.clone() };
    let a0 = init_gaussian(&g512, 0.5, 0.03, 0.0, [1.0, 1.0]).unwrap();
    let tr = evolve(&a0, &adv, &EvolutionSpec { stride: 50, ..EvolutionSpec::new(1e-3, 400) }).unwrap();
    let mut speed_err: f64 = 0.0;
    for s in 0..2 {
        let ts: Vec<f64> = tr.samples.iter().map(|x| x.t).collect();
        let cs: Vec<f64> = tr.samples.iter().map(|x| x.centroid[s]).collect();
        let mt = ts.iter().sum::<f64>() / ts.len() as f64;
        let mc = cs.iter().sum::<f64>() / cs.len() as f64;
        let slope = ts.iter().zip(&cs).map(|(t, c)| (t - mt) * (c - mc)).sum::<f64>()
            / ts.iter().map(|t| (t - mt).powi(2)).sum::<f64>();
        speed_err = speed_err.max(rel(slope, -eta[s]));
    }

    // (d) two branches ±√(η²k² + Ω_0²)
    let g64 = Grid1D::new(1.0, 64).unwrap();
    let (e, w) = (0.7, 3.0);
    let branch = DynamicsParams { eta: [e, -e], omega0: w, hbar_over_2m: [0.0; 2], ..free.clone() };
    let mut disp_err: f64 = 0.0;
    for m in [1_i32, 2, 3, 5, 8, -1, -4, -7] {
        let k = 2.0 * PI * m as f64;
        let a = e * k;
        let energy = (a * a + w * w).sqrt();
        for sign in [1.0, -1.0] {
            let big_e = sign * energy;
            // eigenvector of [[−a, Ω0], [Ω0, a]] for eigenvalue E
            let (u, v) = (w, big_e + a);
            let nrm = (u * u + v * v).sqrt();
            let up: Vec<Complex64> = (0..64).map(|j| Complex64::from_polar(u / nrm, k * g64.z(j))).collect();
            let dn: Vec<Complex64> = (0..64).map(|j| Complex64::from_polar(v / nrm, k * g64.z(j))).collect();
            let st = FieldState::new(g64.clone(), up, dn).unwrap();
            let t = 0.5 / energy;
            let spec = EvolutionSpec { include_quadratic: false, ..EvolutionSpec::new(t / 10.0, 10) };
            let fin = evolve(&st, &branch, &spec).unwrap().final_state;
            let overlap: Complex64 = (0..64)
                .map(|j| st.psi[0][j].conj() * fin.psi[0][j] + st.psi[1][j].conj() * fin.psi[1][j])
                .sum::<Complex64>()
                / 64.0;
            let omega = -overlap.arg() / t;
            disp_err = disp_err.max(rel(omega, big_e));
        }
    }

    // (e) Richardson triplet for the Strang step
    let r0 = init_gaussian(&grid, 0.5, 0.08, 5.0, [1.0, 0.8]).unwrap();
    let run = |dt: f64| {
        let steps = (0.48 / dt).round() as usize;
        evolve(&r0, &generic_params(), &EvolutionSpec { stride: steps, ..EvolutionSpec::new(dt, steps) })
            .unwrap()
            .final_state
    };
    let (c1, c2, c3) = (run(1.6e-3), run(8e-4), run(4e-4));
    let order = (max_diff(&c1, &c2) / max_diff(&c2, &c3)).log2();

    let ok = drift < 1e-8 && width_err <= 1e-3 && speed_err <= 1e-3 && disp_err <= 1e-6 && (order - 2.0).abs() <= 0.1;
    let detail = format!(
        "(a) drift {drift:.1e} (b) width {width_err:.1e} (c) speed {speed_err:.1e} (d) branches {disp_err:.1e} (e) order {order:.3}"
    );
    report(6, "mean-field dynamics", ok, detail, t0.elapsed(), Duration::from_secs(120));
}

fn criterion_07_pulse_matching() {
    let t0 = Instant::now();
    let grid = Grid1D::new(1.0, 256).unwrap();
    let mut finals = Vec::new();
    let mut all_below = true;
    let depths = [500.0, 1000.0, 2000.0, 4000.0, 8000.0];
    for g in depths {
        let cfg = OpticalConfig {
            omega_plus: [1.0, 1.1],
            omega_minus: [0.8, 0.9],
            delta: [1.0, 1.0],
            delta_ss: [[50.0, 80.0], [80.0, 50.0]],
            omega0: 0.0,
            gamma_abs: 1.0,
            gamma_1d_frac: 0.2,
            n_z: 1.0,
            g2nz: Some(g),
            v_s_direct: None,
            v_empty: 1.0,
            n_ph: [1.0, 1.0],
            length: 1.0,
            n_photons: [1.0, 1.0],
        };
        let p = derive_params(&cfg).unwrap();
        let f = init_gaussian(&grid, 0.5, 0.1, 0.0, [1e-3, 1e-3]).unwrap();
        let a = [0, 1].map(|s| f.psi[s].iter().map(|c| c * 0.5).collect::<Vec<_>>());
        let st = PreElimState::new(grid.clone(), f.psi.clone(), a).unwrap();
        let spec = PreElimSpec { dt: 1e-3, steps: 100, stride: 10, linewidth_damping: true };
        let tr = evolve_pre_elimination(&st, &cfg, &p, &spec).unwrap();
        let last = [tr.mismatch[0].last().copied().unwrap(), tr.mismatch[1].last().copied().unwrap()];
        all_below &= last.iter().all(|r| *r < 0.1);
        finals.push(last[0].max(last[1]));
    }
    let monotone = finals.windows(2).all(|w| w[1] < w[0]);
    let ok = all_below && monotone;
    let shown: Vec<String> = finals.iter().map(|r| format!("{r:.2e}")).collect();
    let detail = format!("final |A|/|Psi| over n_z g^2/|delta| {depths:?}: [{}]", shown.join(", "));
    report(7, "pulse matching", ok, detail, t0.elapsed(), Duration::from_secs(120));
}

fn criterion_08_fermionization() {
    let t0 = Instant::now();
    let (m, n) = (8, 2);
    let params = LatticeParams { hardcore: [true, false], ..LatticeParams::hopping_only(m, 1.0, Boundary::Periodic) };
    let sys = FockSystem::new(params, Sector::Species([n, 0])).unwrap();
    let gs = ground_state(&sys).unwrap();
    let table = density_correlations(&gs.state, &sys);
    // Even N on a periodic ring: Jordan–Wigner fermions see an antiperiodic ring.
    let oracle = free_fermion_oracle(m, n, 1.0, 0.0, Boundary::Antiperiodic).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            worst = worst.max((table.get(0, i, 0, j) - oracle.get(i, j)).abs());
        }
    }
    let energy_err = (gs.energy - oracle.energy).abs();
    let report_soft = fermionization_check(m, n, 1.0, &[1.0, 10.0, 100.0, 1000.0], Boundary::Periodic).unwrap();
    let devs: Vec<f64> = report_soft.rows.iter().map(|r| r.deviation).collect();
    let monotone = devs.windows(2).all(|w| w[1] < w[0]);
    let last = *devs.last().unwrap();
    let ok = worst <= 1e-10 && energy_err <= 1e-10 && monotone && last < 1e-3;
    let shown: Vec<String> = devs.iter().map(|d| format!("{d:.2e}")).collect();
    let detail = format!(
        "hardcore max |nn - wick| {worst:.1e}, energy {energy_err:.1e}; soft-core deviations [{}]",
        shown.join(", ")
    );
    report(8, "fermionization", ok, detail, t0.elapsed(), Duration::from_secs(60));
}

fn criterion_09_detection_identity() {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    let interacting = [
        LatticeParams {
            lambda: [0.3, -0.2],
            u_same: [2.0, 1.5],
            u_cross: 1.0,
            w: 0.4,
            ..LatticeParams::hopping_only(4, 1.0, Boundary::Periodic)
        },
        LatticeParams {
            u_same: [8.0, 8.0],
            u_cross: 3.0,
            w: 0.0,
            hardcore: [false, true],
            ..LatticeParams::hopping_only(4, 1.0, Boundary::Open)
        },
    ];
    for (k, params) in interacting.into_iter().enumerate() {
        let sys = FockSystem::new(params, Sector::Total(2)).unwrap();
        let gs = ground_state(&sys).unwrap();
        worst = worst.max(detection_identity_residual(&gs.state, &sys));
        worst = worst.max(spin_plus_identity_residual(&gs.state, &sys));
        if k == 0 {
            for seed in 0..20 {
                let st = QuantumState::random(sys.dim(), seed).unwrap();
                worst = worst.max(detection_identity_residual(&st, &sys));
                worst = worst.max(spin_plus_identity_residual(&st, &sys));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let g = Grid1D::new(1.0, 128).unwrap();
    let mut field = || (0..128).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let st = FieldState::new(g, field(), field()).unwrap();
    let spin: Vec<Complex64> = st.psi[0].iter().zip(&st.psi[1]).map(|(a, b)| a.conj() * b).collect();
    let pointwise = rotated_densities(&st).identity_residual(&spin);
    let ok = worst < 1e-12 && pointwise < 1e-14;
    let detail = format!("operator residual {worst:.1e} over 20 random + 2 ground states, mean-field {pointwise:.1e}");
    report(9, "detection identity", ok, detail, t0.elapsed(), Duration::from_secs(30));
}

fn criterion_10_n_point_reduction() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = rng.gen_range(0.0..=PI);
        let n_ph = 10f64.powf(rng.gen_range(1.0..5.0));
        let z = rng.gen_range(-1.0..1.0);
        let zp = rng.gen_range(-1.0..1.0);
        let m = 10f64.powf(rng.gen_range(-1.0..3.0));
        let a = n_point(&[z], &[zp], x, n_ph, m).unwrap();
        let b = two_point((z - zp).abs(), x, n_ph).unwrap();
        worst = worst.max(rel(a, b));
    }
    let mut exact = true;
    for _ in 0..100 {
        let n = rng.gen_range(2..6);
        let z: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let zp: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let (x, n_ph) = (rng.gen_range(0.0..=PI), 100.0);
        let base = n_point(&z, &zp, x, n_ph, 1.0).unwrap();
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let pz: Vec<f64> = order.iter().map(|&i| z[i]).collect();
        let pzp: Vec<f64> = order.iter().map(|&i| zp[i]).collect();
        exact &= n_point(&pz, &pzp, x, n_ph, 1.0).unwrap() == base;
    }
    let ok = worst <= 1e-14 && exact;
    let detail = format!("max rel |G_1 - G| {worst:.1e} on 100 draws, permutation exact {exact}");
    report(10, "n-point reduction", ok, detail, t0.elapsed(), Duration::from_secs(1));
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run_cli(args: &[&str], config: &str, out: &Path) -> BTreeMap<String, Vec<u8>> {
    let o = Command::new(env!("CARGO_BIN_EXE_thirring"))
        .args(args)
        .arg("--config")
        .arg(configs().join(config))
        .arg("--out")
        .arg(out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{args:?} {config}: {}", String::from_utf8_lossy(&o.stderr));
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(out).unwrap() {
        let path = entry.unwrap().path();
        files.insert(path.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&path).unwrap());
    }
    files.insert("<stdout>".into(), o.stdout);
    files
}

fn manifest_digests(bytes: &[u8]) -> Vec<(String, String)> {
    let v: serde_json::Value = serde_json::from_slice(bytes).unwrap();
    let outputs = v["outputs"].as_array().unwrap();
    outputs
        .iter()
        .map(|o| (o["file"].as_str().unwrap().to_string(), o["sha256"].as_str().unwrap().to_string()))
        .collect()
}

fn criterion_11_reproducibility() {
    let t0 = Instant::now();
    let runs: [(&[&str], &str); 11] = [
        (&["params"], "reference.json"),
        (&["correlate"], "reference.json"),
        (&["sweep"], "smoke_grid.json"),
        (&["sweep"], "regime_grid.json"),
        (&["sweep"], "cutoff_curve.json"),
        (&["sweep"], "coherence_line.json"),
        (&["evolve"], "evolve_smoke.json"),
        (&["ed", "ground"], "ed_identity.json"),
        (&["ed", "correlate"], "ed_identity.json"),
        (&["ed", "check-identity"], "ed_identity.json"),
        (&["ed", "check-fermionization"], "ed_fermionization.json"),
    ];
    let mut mismatches = Vec::new();
    let mut files = 0;
    for (args, config) in runs {
        let a_dir = tempfile::tempdir().unwrap();
        let b_dir = tempfile::tempdir().unwrap();
        let a = run_cli(args, config, a_dir.path());
        let b = run_cli(args, config, b_dir.path());
        let label = format!("{} {config}", args.join(" "));
        if a.keys().ne(b.keys()) {
            mismatches.push(format!("{label}: file sets differ"));
            continue;
        }
        for (name, bytes) in &a {
            if name == "manifest.json" {
                let (da, db) = (manifest_digests(bytes), manifest_digests(&b[name]));
                if da != db || da.len() + 2 != a.len() {
                    mismatches.push(format!("{label}: manifest digests"));
                }
            } else if bytes != &b[name] {
                mismatches.push(format!("{label}: {name}"));
            } else {
                files += 1;
            }
        }
    }
    let ok = mismatches.is_empty();
    let detail = if ok {
        format!("{} commands, {files} outputs byte-identical, manifest digests match", runs.len())
    } else {
        format!("differences: {}", mismatches.join("; "))
    };
    report(11, "reproducibility", ok, detail, t0.elapsed(), Duration::from_secs(120));
}

fn main() {
    let filter = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let checks: [(&str, fn()); 11] = [
        ("criterion_01_cutoff_curve", criterion_01_cutoff_curve as fn()),
        ("criterion_02_correlation_scaling", criterion_02_correlation_scaling as fn()),
        ("criterion_03_kinetic_ratio", criterion_03_kinetic_ratio as fn()),
        ("criterion_04_coherence_time", criterion_04_coherence_time as fn()),
        ("criterion_05_regime_atlas", criterion_05_regime_atlas as fn()),
        ("criterion_06_mean_field_dynamics", criterion_06_mean_field_dynamics as fn()),
        ("criterion_07_pulse_matching", criterion_07_pulse_matching as fn()),
        ("criterion_08_fermionization", criterion_08_fermionization as fn()),
        ("criterion_09_detection_identity", criterion_09_detection_identity as fn()),
        ("criterion_10_n_point_reduction", criterion_10_n_point_reduction as fn()),
        ("criterion_11_reproducibility", criterion_11_reproducibility as fn()),
    ];
    let mut failed = Vec::new();
    let mut ran = 0;
    for (name, check) in checks {
        if filter.as_deref().is_some_and(|f| !name.contains(f)) {
            continue;
        }
        ran += 1;
        if std::panic::catch_unwind(check).is_err() {
            failed.push(name);
        }
    }
    println!("acceptance: {} of {ran} passed", ran - failed.len());
    if !failed.is_empty() {
        println!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}
