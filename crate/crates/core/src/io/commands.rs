use std::path::Path;

use serde_json::{json, Value};

use super::config::{ScenarioConfig, SweepKind};
use super::manifest::RunManifest;
use super::output::{complex_cells, fmt_f64, fmt_opt, Table};
use crate::atlas::{sweep_1d, sweep_2d, sweep_cutoff, GridResult, SweepSpec};
use crate::correlations::{correlation_exponent, correlation_series, n_point, two_point};
use crate::dynamics::{evolve, init_gaussian, DynamicsParams, Grid1D};
use crate::error::{Error, Result};
use crate::lattice::{
    density_correlations, detection_identity_residual, fermionization_check, ground_state_with,
    spin_correlations, spin_plus_identity_residual, Boundary, DensityTable, FockSystem, LatticeParams,
    QuantumState, Sector,
};
use crate::params::{
    classify_regime, derive_params, interaction_ratio, interaction_to_kinetic, kinetic_ratio, loss_rates,
    momentum_cutoff, Channel, Species, ZExtent,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdTask {
    Ground,
    Correlate,
    CheckIdentity,
    CheckFermionization,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Params,
    Sweep,
    Correlate,
    Evolve,
    Ed(EdTask),
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Params => "params",
            Command::Sweep => "sweep",
            Command::Correlate => "correlate",
            Command::Evolve => "evolve",
            Command::Ed(EdTask::Ground) => "ed ground",
            Command::Ed(EdTask::Correlate) => "ed correlate",
            Command::Ed(EdTask::CheckIdentity) => "ed check-identity",
            Command::Ed(EdTask::CheckFermionization) => "ed check-fermionization",
        }
    }
}

/// Computed results of one command: a JSON summary plus named files.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub summary: Value,
    pub files: Vec<(String, Vec<u8>)>,
}

impl Report {
    fn new(summary: Value) -> Self {
        Report { summary, files: Vec::new() }
    }

    fn file(mut self, name: &str, bytes: Vec<u8>) -> Self {
        self.files.push((name.to_string(), bytes));
        self
    }

    fn summary_file(self, name: &str) -> Self {
        let mut bytes = serde_json::to_vec_pretty(&self.summary).expect("summary serializes");
        bytes.push(b'\n');
        self.file(name, bytes)
    }
}

/// Run `cmd` without touching the filesystem.
pub fn execute(cmd: Command, cfg: &ScenarioConfig) -> Result<Report> {
    match cmd {
        Command::Params => cmd_params(cfg),
        Command::Sweep => cmd_sweep(cfg),
        Command::Correlate => cmd_correlate(cfg),
        Command::Evolve => cmd_evolve(cfg),
        Command::Ed(task) => cmd_ed(cfg, task),
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: Value,
    pub manifest: RunManifest,
}

/// Execute `cmd` and write its files plus `manifest.json` into `out_dir`.
/// On failure a manifest carrying the error is still written.
pub fn run(cmd: Command, cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunOutput> {
    let mut manifest = RunManifest::start(cmd.name(), &cfg.digest());
    let result = execute(cmd, cfg).and_then(|report| {
        for (name, bytes) in &report.files {
            manifest.add_output(out_dir, name, bytes)?;
        }
        Ok(report.summary)
    });
    match result {
        Ok(summary) => {
            manifest.finish_ok();
            manifest.write(out_dir)?;
            Ok(RunOutput { summary, manifest })
        }
        Err(e) => {
            manifest.finish_err(&e);
            // The original error matters more than a failed manifest write.
            let _ = manifest.write(out_dir);
            Err(e)
        }
    }
}

/// Manifest for a run that failed before a config could be parsed.
pub fn write_failure_manifest(cmd: Command, out_dir: &Path, config_sha256: &str, err: &Error) -> Result<()> {
    let mut m = RunManifest::start(cmd.name(), config_sha256);
    m.finish_err(err);
    m.write(out_dir)
}

fn cmd_params(cfg: &ScenarioConfig) -> Result<Report> {
    let opt = cfg.optical()?;
    let p = derive_params(opt)?;
    let mut kinetic = [0.0; 2];
    for s in Species::BOTH {
        let z = ZExtent::PerPhoton.resolve(opt, s)?;
        kinetic[s.index()] = kinetic_ratio(&p, z)?[s.index()];
    }
    let x = p.chi_over_eta()?;
    let (cutoff, exponent, note) = match (momentum_cutoff(x, opt.n_ph[0]), correlation_exponent(x)) {
        (Ok(l), Ok(e)) => (Some(l), Some(e), None),
        (Err(e), _) | (_, Err(e)) => (None, None, Some(e.to_string())),
    };
    let summary = json!({
        "command": "params",
        "params": p,
        "interaction_ratio": interaction_ratio(&p)?,
        "kinetic_ratio_per_photon": kinetic,
        "beta_same": interaction_to_kinetic(&p, Channel::Same)?,
        "beta_cross": interaction_to_kinetic(&p, Channel::Cross)?,
        "chi_over_eta": x,
        "cutoff_per_m": cutoff,
        "correlation_exponent": exponent,
        "cutoff_note": note,
        "regime": classify_regime(&p, &cfg.thresholds)?.to_string(),
        "losses": loss_rates(opt)?,
    });
    Ok(Report::new(summary).summary_file("params.json"))
}

fn grid_table(g: &GridResult) -> Table {
    let mut header: Vec<String> = g.axes.iter().map(|a| a.path.clone()).collect();
    let name = g.quantity.name();
    header.extend([name.to_string(), format!("log10_{name}"), "singular".into(), "regime".into()]);
    let mut t = Table::new(header);
    let ny = g.axes.get(1).map_or(1, |a| a.values.len());
    for (k, cell) in g.cells.iter().enumerate() {
        let mut row = vec![fmt_f64(g.axes[0].values[k / ny])];
        if g.axes.len() > 1 {
            row.push(fmt_f64(g.axes[1].values[k % ny]));
        }
        row.push(fmt_opt(cell.value));
        row.push(fmt_opt(cell.value.filter(|v| *v > 0.0).map(f64::log10)));
        row.push(cell.singular.map(|s| s.code().to_string()).unwrap_or_default());
        row.push(cell.regime.map(|r| r.to_string()).unwrap_or_default());
        t.push(row);
    }
    t
}

fn cmd_sweep(cfg: &ScenarioConfig) -> Result<Report> {
    let block = cfg.sweep.as_ref().ok_or_else(|| Error::Config("missing block `sweep`".into()))?;
    if block.kind == SweepKind::Cutoff {
        let n_ph = cfg.optical.as_ref().map_or(1.0, |o| o.n_ph[block.species.index()]);
        let series = sweep_cutoff(block.cutoff_points, n_ph)?;
        let mut t = Table::new(["chi_over_eta", "cutoff_over_pi_n_ph"]);
        for (x, v) in series.separations.iter().zip(&series.values) {
            t.push_f64(&[*x, *v]);
        }
        let summary = json!({
            "command": "sweep",
            "kind": "cutoff",
            "points": series.values.len(),
            "first": series.values.first(),
            "last": series.values.last(),
        });
        return Ok(Report::new(summary).file("cutoff.csv", t.to_bytes()).summary_file("sweep.json"));
    }
    let opt = cfg.optical()?;
    let quantity = block.quantity.ok_or_else(|| Error::Config("sweep: missing field `quantity`".into()))?;
    let x = block.x.as_ref().ok_or_else(|| Error::Config("sweep: missing axis `x`".into()))?;
    let grid = match block.kind {
        SweepKind::Line => sweep_1d(&SweepSpec {
            axis: x.clone(),
            base: opt.clone(),
            quantity,
            species: block.species,
            z_extent: block.z_extent,
            thresholds: cfg.thresholds,
        })?,
        _ => {
            let y = block.y.as_ref().ok_or_else(|| Error::Config("sweep: grid needs axis `y`".into()))?;
            sweep_2d(x, y, opt, quantity, block.species, block.z_extent, &cfg.thresholds)?
        }
    };
    let values: Vec<f64> = grid.cells.iter().filter_map(|c| c.value).collect();
    let summary = json!({
        "command": "sweep",
        "kind": if block.kind == SweepKind::Line { "line" } else { "grid" },
        "quantity": quantity.name(),
        "units": grid.units,
        "species": block.species.name(),
        "shape": grid.shape(),
        "singular_cells": grid.cells.len() - values.len(),
        "min": values.iter().copied().fold(f64::INFINITY, f64::min),
        "max": values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        "base_digest": grid.base_digest,
    });
    let file = if block.kind == SweepKind::Line { "sweep.csv" } else { "grid.csv" };
    Ok(Report::new(summary).file(file, grid_table(&grid).to_bytes()).summary_file("sweep.json"))
}

fn cmd_correlate(cfg: &ScenarioConfig) -> Result<Report> {
    let block = cfg.correlation.as_ref().ok_or_else(|| Error::Config("missing block `correlation`".into()))?;
    let chi = match block.chi_over_eta {
        Some(x) => x,
        None => derive_params(cfg.optical()?)?.chi_over_eta()?,
    };
    let n_ph = match block.n_ph {
        Some(n) => n,
        None => cfg.optical()?.n_ph[0],
    };
    let series = correlation_series(chi, n_ph, block.u_min, block.u_max, block.points)?;
    let exponent = correlation_exponent(chi)?;
    let mut t = Table::new(["u", "separation_m", "value", "exponent"]);
    for (u, g) in series.separations.iter().zip(&series.values) {
        t.push_f64(&[*u, u / n_ph, *g, exponent]);
    }
    let (slope, _, resid) = series.log_log_fit();
    let npoint = match &block.n_point {
        None => Value::Null,
        Some(np) => {
            let scale = match np.scale_m {
                Some(m) => m,
                None => 1.0 / cfg.optical()?.length,
            };
            let value = n_point(&np.z, &np.z_prime, chi, n_ph, scale)?;
            let reduced = if np.z.len() == 1 {
                Some(two_point((np.z[0] - np.z_prime[0]).abs(), chi, n_ph)?)
            } else {
                None
            };
            json!({ "n": np.z.len(), "scale_m": scale, "value": value, "two_point": reduced })
        }
    };
    let summary = json!({
        "command": "correlate",
        "chi_over_eta": chi,
        "n_ph": n_ph,
        "cutoff_per_m": series.cutoff,
        "exponent": exponent,
        "fitted_exponent": slope / 2.0,
        "fit_max_residual": resid,
        "points": series.values.len(),
        "n_point": npoint,
    });
    Ok(Report::new(summary).file("correlation.csv", t.to_bytes()).summary_file("correlation.json"))
}

fn cmd_evolve(cfg: &ScenarioConfig) -> Result<Report> {
    let block = cfg.evolution.as_ref().ok_or_else(|| Error::Config("missing block `evolution`".into()))?;
    let length = match block.grid.length {
        Some(l) => l,
        None => cfg.optical()?.length,
    };
    let grid = Grid1D::new(length, block.grid.points)?;
    let coeffs = match &block.coefficients {
        Some(c) => c.clone(),
        None => {
            let opt = cfg.optical()?;
            DynamicsParams::from_polariton(&derive_params(opt)?, opt)
        }
    };
    let norms = match block.pulse.norms {
        Some(n) => n,
        None => cfg.optical()?.n_photons,
    };
    let state = init_gaussian(&grid, block.pulse.center, block.pulse.width, block.pulse.k0, norms)?;
    let spec = &block.integrator;
    let traj = evolve(&state, &coeffs, spec)?;

    let mut t = Table::new([
        "step", "t", "norm_up", "norm_down", "total_norm", "centroid_up", "centroid_down", "width_up", "width_down",
        "energy",
    ]);
    for s in &traj.samples {
        let mut row = vec![s.step.to_string()];
        row.extend(
            [s.t, s.norm[0], s.norm[1], s.total_norm, s.centroid[0], s.centroid[1], s.width[0], s.width[1], s.energy]
                .map(fmt_f64),
        );
        t.push(row);
    }
    let field_table = |fields: &[(usize, f64, &[Vec<num_complex::Complex64>; 2])]| {
        let mut ft = Table::new(["sample", "t", "z", "up_re", "up_im", "down_re", "down_im"]);
        for &(k, time, psi) in fields {
            for j in 0..grid.points {
                let mut row = vec![k.to_string(), fmt_f64(time), fmt_f64(grid.z(j))];
                row.extend(complex_cells(psi[0][j]));
                row.extend(complex_cells(psi[1][j]));
                ft.push(row);
            }
        }
        ft
    };
    let fin = &traj.final_state;
    let n0 = traj.samples[0].total_norm;
    let n1 = fin.total_norm();
    let drift = (n1 - n0).abs() / n0;
    let decay_rate = if spec.include_loss && fin.t > 0.0 { Some(-(n1 / n0).ln() / fin.t) } else { None };
    let summary = json!({
        "command": "evolve",
        "steps": spec.steps,
        "final_time": fin.t,
        "initial_norm": n0,
        "final_norm": n1,
        "relative_norm_drift": drift,
        "norm_conserved": if spec.include_loss { Value::Null } else { json!(drift < cfg.tolerances.norm_drift) },
        "measured_decay_rate": decay_rate,
        "coefficients": coeffs,
    });
    let mut report = Report::new(summary)
        .file("trajectory.csv", t.to_bytes())
        .file("final_state.csv", field_table(&[(traj.samples.len() - 1, fin.t, &fin.psi)]).to_bytes());
    if spec.keep_snapshots {
        let snaps: Vec<_> = traj.snapshots.iter().enumerate().map(|(k, s)| (k, s.t, &s.psi)).collect();
        report = report.file("snapshots.csv", field_table(&snaps).to_bytes());
    }
    Ok(report.summary_file("evolve.json"))
}

fn lattice_params(cfg: &ScenarioConfig) -> Result<LatticeParams> {
    let block = cfg.lattice.as_ref().ok_or_else(|| Error::Config("missing block `lattice`".into()))?;
    match &block.params {
        Some(p) => {
            p.validate()?;
            Ok(p.clone())
        }
        None => {
            let opt = cfg.optical()?;
            let sites = block
                .sites
                .ok_or_else(|| Error::Config("lattice: give `params` or `sites` with an optical block".into()))?;
            LatticeParams::from_polariton(&derive_params(opt)?, opt, sites, block.boundary.unwrap_or(Boundary::Periodic))
        }
    }
}

fn density_table(t: &DensityTable) -> Table {
    let mut out = Table::new(["s", "i", "t", "j", "value"]);
    let m = t.sites;
    for s in 0..2 {
        for i in 0..m {
            for u in 0..2 {
                for j in 0..m {
                    out.push(vec![
                        Species::BOTH[s].name().into(),
                        i.to_string(),
                        Species::BOTH[u].name().into(),
                        j.to_string(),
                        fmt_f64(t.get(s, i, u, j)),
                    ]);
                }
            }
        }
    }
    out
}

fn cmd_ed(cfg: &ScenarioConfig, task: EdTask) -> Result<Report> {
    let params = lattice_params(cfg)?;
    let block = cfg.lattice.as_ref().expect("checked by lattice_params");
    let tol = &cfg.tolerances;
    if task == EdTask::CheckFermionization {
        let n = match block.sector {
            Sector::Species([n, 0]) | Sector::Total(n) => n,
            other => {
                return Err(Error::Config(format!(
                    "check-fermionization needs a single-species sector, got {other:?}"
                )))
            }
        };
        let r = fermionization_check(params.sites, n, params.hopping[0], &block.u_over_j, params.boundary)?;
        let mut t = Table::new(["u_over_j", "energy", "deviation"]);
        for row in r.rows.iter().chain(std::iter::once(&r.hardcore)) {
            t.push_f64(&[row.u_over_j, row.energy, row.deviation]);
        }
        let last_soft = r.rows.last().map(|row| row.deviation);
        let summary = json!({
            "command": "ed check-fermionization",
            "sites": r.sites,
            "particles": r.particles,
            "boundary": r.boundary,
            "fermion_boundary": r.fermion_boundary,
            "oracle_energy": r.oracle_energy,
            "hardcore_deviation": r.hardcore.deviation,
            "hardcore_ok": r.hardcore.deviation <= tol.hardcore,
            "monotone": r.monotone(),
            "largest_u_deviation": last_soft,
            "largest_u_ok": last_soft.map(|d| d < tol.soft_core),
        });
        return Ok(Report::new(summary).file("fermionization.csv", t.to_bytes()).summary_file("ed.json"));
    }

    let sys = FockSystem::with_cap(params, block.sector, block.basis_cap)?;
    let gs = ground_state_with(&sys, block.method)?;
    let base = json!({
        "dimension": sys.dim(),
        "energy": gs.energy,
        "residual": gs.residual,
        "norm_bound": gs.norm_bound,
    });
    match task {
        EdTask::Ground => {
            let dens = density_correlations(&gs.state, &sys);
            let summary = json!({ "command": "ed ground", "ground": base, "mean_occupation": dens.mean });
            Ok(Report::new(summary).file("density.csv", density_table(&dens).to_bytes()).summary_file("ed.json"))
        }
        EdTask::Correlate => {
            let dens = density_correlations(&gs.state, &sys);
            let spin = spin_correlations(&gs.state, &sys);
            let mut t = Table::new(["i", "j", "value_re", "value_im"]);
            for i in 0..spin.sites {
                for j in 0..spin.sites {
                    let mut row = vec![i.to_string(), j.to_string()];
                    row.extend(complex_cells(spin.get(i, j)));
                    t.push(row);
                }
            }
            let summary = json!({ "command": "ed correlate", "ground": base });
            Ok(Report::new(summary)
                .file("density.csv", density_table(&dens).to_bytes())
                .file("spin.csv", t.to_bytes())
                .summary_file("ed.json"))
        }
        EdTask::CheckIdentity => {
            let mut t = Table::new(["state", "seed", "pair_residual", "single_residual"]);
            let mut worst: f64 = 0.0;
            for k in 0..block.random_states {
                let seed = cfg.seed.wrapping_add(k as u64);
                let st = QuantumState::random(sys.dim(), seed)?;
                let a = detection_identity_residual(&st, &sys);
                let b = spin_plus_identity_residual(&st, &sys);
                worst = worst.max(a).max(b);
                t.push(vec![format!("random{k}"), seed.to_string(), fmt_f64(a), fmt_f64(b)]);
            }
            let a = detection_identity_residual(&gs.state, &sys);
            let b = spin_plus_identity_residual(&gs.state, &sys);
            worst = worst.max(a).max(b);
            t.push(vec!["ground".into(), String::new(), fmt_f64(a), fmt_f64(b)]);
            let summary = json!({
                "command": "ed check-identity",
                "ground": base,
                "states_checked": block.random_states + 1,
                "max_residual": worst,
                "pass": worst < tol.identity,
            });
            Ok(Report::new(summary).file("identity.csv", t.to_bytes()).summary_file("ed.json"))
        }
        EdTask::CheckFermionization => unreachable!("handled above"),
    }
}
