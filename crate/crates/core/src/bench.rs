//! Shipped scenarios and the drivers that reduce a run to a few observables.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::diagnostics::StepReport;
use crate::domain::{OutputFormat, Phase, ScenarioConfig};
use crate::exec::Execution;
use crate::integrator::Simulation;
use crate::io::{append_json, parse_scenario, write_csv, write_manifest, write_vtk, Snapshot};
use crate::{Error, Result, Vec3};

/// Scenario files compiled into the library, by benchmark name.
pub const SCENARIOS: [(&str, &str); 6] = [
    ("static_droplet", include_str!("../scenarios/static_droplet.cfg")),
    ("migration", include_str!("../scenarios/migration.cfg")),
    ("oscillation", include_str!("../scenarios/oscillation.cfg")),
    ("melt2d", include_str!("../scenarios/melt2d.cfg")),
    ("keyhole2d", include_str!("../scenarios/keyhole2d.cfg")),
    ("point3d", include_str!("../scenarios/point3d.cfg")),
];

pub fn scenario_names() -> impl Iterator<Item = &'static str> {
    SCENARIOS.iter().map(|(n, _)| *n)
}

/// Parsed shipped scenario.
pub fn scenario(name: &str) -> Result<ScenarioConfig> {
    let text = SCENARIOS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            Error::Config(format!(
                "unknown benchmark '{name}'; available: {}",
                scenario_names().collect::<Vec<_>>().join(", ")
            ))
        })?;
    parse_scenario(text, &format!("{name}.cfg"))
}

/// Output and stopping options shared by `run` and `bench`.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub max_steps: Option<u64>,
    /// Print a diagnostics line to stderr at the diagnostics interval.
    pub verbose: bool,
    pub exec: Execution,
}

/// How a run ended.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub particles: usize,
    pub steps: u64,
    pub time: f64,
    pub end_time: f64,
    /// Set when the run stopped on a non-finite value.
    pub failure: Option<String>,
    pub last_report: StepReport,
    pub initial_dt_headroom: f64,
}

impl RunSummary {
    pub fn completed(&self) -> bool {
        self.failure.is_none() && self.time >= self.end_time - 1e-9 * self.end_time
    }
}

fn write_snapshot(sim: &Simulation, dir: &Path, k: usize) -> Result<()> {
    let snap = Snapshot::of(sim);
    let fmt = sim.config.output.format;
    if matches!(fmt, OutputFormat::Csv | OutputFormat::Both) {
        write_csv(&snap, dir.join(format!("snapshot_{k:05}.csv")))?;
    }
    if matches!(fmt, OutputFormat::Vtk | OutputFormat::Both) {
        write_vtk(&snap, dir.join(format!("snapshot_{k:05}.vtk")))?;
    }
    Ok(())
}

/// Steps `sim` to the scenario end time, writing snapshots by simulated time
/// and diagnostics lines by step count. `observe` runs after every step and
/// can stop the run by returning false. A non-finite state or a particle
/// escaping the domain ends the run with `failure` set rather than an error.
/// The final state is always written.
pub fn run_simulation(sim: &mut Simulation, opts: &RunOptions, mut observe: impl FnMut(&Simulation) -> bool) -> Result<RunSummary> {
    let end = sim.config.scenario.end_time;
    let initial = sim.report();
    if initial.dt_headroom < 1.0 && opts.verbose {
        eprintln!(
            "warning: dt = {:e} exceeds the stability estimate {:e}",
            sim.dt,
            sim.stable_dt().min()
        );
    }
    let mut diag = None;
    let mut next_snapshot = f64::INFINITY;
    let mut k = 0;
    let mut written = None;
    if let Some(dir) = &opts.out_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_manifest(&sim.config, dir.join("manifest.toml"))?;
        let path = dir.join("diagnostics.jsonl");
        diag = Some((BufWriter::new(fs::File::create(&path).map_err(|e| Error::io(&path, e))?), path));
        if sim.config.output.format != OutputFormat::None {
            write_snapshot(sim, dir, k)?;
            k += 1;
            written = Some(sim.step);
            next_snapshot = sim.config.output.interval.unwrap_or(f64::INFINITY);
        }
    }
    let every = sim.config.output.diagnostics_interval.max(1);
    let mut io_error = None;
    let result = sim.run(end, opts.max_steps, |s| {
        if s.step % every == 0 {
            let r = s.report();
            if opts.verbose {
                eprintln!(
                    "step {:>8} t {:.6e} |u|max {:.4e} rho/rho0 [{:.4}, {:.4}] T [{:.1}, {:.1}] dt headroom {:.3}",
                    r.step, r.time, r.max_speed, r.min_density_ratio, r.max_density_ratio, r.min_temperature, r.max_temperature, r.dt_headroom
                );
            }
            if let Some((w, path)) = diag.as_mut() {
                if let Err(e) = append_json(w, &r) {
                    io_error = Some(Error::io(path.clone(), e));
                    return false;
                }
            }
        }
        if let Some(dir) = &opts.out_dir {
            if s.time >= next_snapshot - 1e-9 * s.dt {
                if let Err(e) = write_snapshot(s, dir, k) {
                    io_error = Some(e);
                    return false;
                }
                k += 1;
                written = Some(s.step);
                next_snapshot += s.config.output.interval.unwrap_or(f64::INFINITY);
            }
        }
        observe(s)
    });
    if let Some(e) = io_error {
        return Err(e);
    }
    let failure = match result {
        Ok(()) => None,
        Err(e @ (Error::NonFinite { .. } | Error::OutsideDomain { .. })) => Some(e.to_string()),
        Err(e) => return Err(e),
    };
    if let Some(dir) = &opts.out_dir {
        if failure.is_none() && sim.config.output.format != OutputFormat::None && written != Some(sim.step) {
            write_snapshot(sim, dir, k)?;
        }
    }
    Ok(RunSummary {
        particles: sim.particles.len(),
        steps: sim.step,
        time: sim.time,
        end_time: end,
        failure,
        last_report: sim.report(),
        initial_dt_headroom: initial.dt_headroom,
    })
}

/// Mass-weighted centroid of the particles in `phase`.
pub fn centroid(sim: &Simulation, phase: Phase) -> Option<Vec3> {
    let p = &sim.particles;
    let mut m = 0.0;
    let mut c = Vec3::zeros();
    for i in 0..p.len() {
        if p.phase[i] == phase {
            m += p.mass[i];
            c += p.mass[i] * p.position[i];
        }
    }
    (m > 0.0).then(|| c / m)
}

/// Shepard-smoothed fluid pressure at `x`.
pub fn smoothed_pressure(sim: &Simulation, x: &Vec3) -> f64 {
    let p = &sim.particles;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..p.len() {
        if !p.phase[i].is_fluid() {
            continue;
        }
        let r = (p.position[i] - x).norm();
        if r < sim.kernel.support_radius() {
            let vw = p.mass[i] / p.density[i] * sim.kernel.w(r);
            num += vw * p.pressure[i];
            den += vw;
        }
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StaticDropletReport {
    pub radius: f64,
    pub expected_jump: f64,
    /// Mean centre-minus-far-field pressure over the last quarter of the run.
    pub pressure_jump: f64,
    pub final_jump: f64,
    /// Relative radial spread of the interface band about its mean radius.
    pub radial_scatter: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Pressure jump across the droplet interface.
pub fn static_droplet_observables(sim: &Simulation, radius: f64) -> (f64, f64) {
    let c = centroid(sim, Phase::Liquid).unwrap_or_else(Vec3::zeros);
    let p = &sim.particles;
    let far = radius + sim.kernel.support_radius();
    let (mut s, mut n) = (0.0, 0usize);
    for i in 0..p.len() {
        if p.phase[i] == Phase::Gas && (p.position[i] - c).norm() > far {
            s += p.pressure[i];
            n += 1;
        }
    }
    let p_far = if n > 0 { s / n as f64 } else { 0.0 };
    let jump = smoothed_pressure(sim, &c) - p_far;
    // Interface particles: liquid with a gas neighbour in their support.
    let mut radii = Vec::new();
    for i in 0..p.len() {
        if p.phase[i] == Phase::Liquid && sim.fields.lg.delta[i] > 0.0 {
            radii.push((p.position[i] - c).norm());
        }
    }
    let scatter = if radii.is_empty() {
        0.0
    } else {
        let mean = radii.iter().sum::<f64>() / radii.len() as f64;
        let var = radii.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / radii.len() as f64;
        var.sqrt() / radius
    };
    (jump, scatter)
}

fn region_radius(cfg: &ScenarioConfig, label: &str) -> Result<f64> {
    cfg.regions
        .iter()
        .find(|r| r.label.as_deref() == Some(label))
        .and_then(|r| r.radius)
        .ok_or_else(|| Error::Config(format!("scenario has no region '{label}' with a radius")))
}

pub fn run_static_droplet(cfg: ScenarioConfig, opts: &RunOptions) -> Result<(RunSummary, StaticDropletReport)> {
    let radius = region_radius(&cfg, "droplet")?;
    let alpha = cfg.materials[cfg.material_index(&cfg.regions[0].material)?].surface_tension;
    let end = cfg.scenario.end_time;
    let mut sim = Simulation::new(cfg, opts.exec)?;
    let every = (end / sim.dt / 200.0).ceil().max(1.0) as u64;
    let mut samples = Vec::new();
    let summary = run_simulation(&mut sim, opts, |s| {
        if s.step % every == 0 {
            samples.push((s.time, static_droplet_observables(s, radius).0));
        }
        true
    })?;
    let (final_jump, scatter) = static_droplet_observables(&sim, radius);
    let tail: Vec<f64> = samples.iter().filter(|(t, _)| *t >= 0.75 * summary.time).map(|s| s.1).collect();
    let pressure_jump = if tail.is_empty() {
        final_jump
    } else {
        tail.iter().sum::<f64>() / tail.len() as f64
    };
    Ok((
        summary,
        StaticDropletReport {
            radius,
            expected_jump: alpha / radius,
            pressure_jump,
            final_jump,
            radial_scatter: scatter,
            samples,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MigrationGroups {
    pub reference_velocity: f64,
    pub reference_time: f64,
    pub reynolds: f64,
    pub marangoni: f64,
    pub capillary: f64,
}

/// Dimensionless groups from the matrix fluid properties, droplet radius and
/// imposed temperature gradient.
pub fn migration_groups(cfg: &ScenarioConfig) -> Result<MigrationGroups> {
    let a = region_radius(cfg, "droplet")?;
    let fill = cfg.fill.as_ref().ok_or_else(|| Error::Config("migration needs a [fill]".into()))?;
    let m = &cfg.materials[cfg.material_index(&fill.material)?];
    let grad = cfg
        .initial
        .temperature_gradient
        .as_deref()
        .map(|g| crate::domain::vec3(g).norm())
        .unwrap_or(0.0);
    let u_r = m.surface_tension_gradient * grad * a / m.viscosity;
    Ok(MigrationGroups {
        reference_velocity: u_r,
        reference_time: a / u_r,
        reynolds: m.density * a * u_r / m.viscosity,
        marangoni: m.density * m.heat_capacity * a * u_r / m.conductivity,
        capillary: m.viscosity * u_r / m.surface_tension,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MigrationReport {
    pub groups: MigrationGroups,
    /// `(t / t_r, U / U_r)` from central differences of the centroid height.
    pub velocity: Vec<(f64, f64)>,
    /// Five-sample moving average of `velocity`, which damps the acoustic
    /// fluctuations of the weakly compressible model.
    pub smoothed: Vec<f64>,
    pub peak: f64,
    pub all_positive: bool,
    /// Mean U/U_r over 3 <= t/t_r < 4.
    pub plateau: Option<f64>,
    /// Smoothed velocity is non-decreasing until it first reaches 90% of
    /// the plateau.
    pub rises_monotonically: bool,
    /// Relative change of the window mean from [2, 3) to [3, 4).
    pub plateau_change: Option<f64>,
}

impl MigrationReport {
    pub fn from_centroids(groups: MigrationGroups, samples: &[(f64, f64)]) -> Self {
        let (t_r, u_r) = (groups.reference_time, groups.reference_velocity);
        let velocity: Vec<(f64, f64)> = samples
            .windows(3)
            .map(|w| (w[1].0 / t_r, (w[2].1 - w[0].1) / (w[2].0 - w[0].0) / u_r))
            .collect();
        let n = velocity.len();
        let smoothed: Vec<f64> = (0..n)
            .map(|i| {
                let (lo, hi) = (i.saturating_sub(2), (i + 3).min(n));
                velocity[lo..hi].iter().map(|v| v.1).sum::<f64>() / (hi - lo) as f64
            })
            .collect();
        let peak = velocity.iter().map(|v| v.1).fold(0.0, f64::max);
        let all_positive = n > 0 && velocity.iter().all(|v| v.1 > 0.0);
        let window = |lo: f64, hi: f64| {
            let v: Vec<f64> = velocity.iter().filter(|v| v.0 >= lo && v.0 < hi).map(|v| v.1).collect();
            (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
        };
        let plateau = window(3.0, 4.0);
        let rises_monotonically = match plateau {
            Some(level) => {
                let end = smoothed.iter().position(|&u| u >= 0.9 * level).unwrap_or(n);
                end < n && smoothed[..=end].windows(2).all(|w| w[1] >= w[0])
            }
            None => false,
        };
        let plateau_change = match (window(2.0, 3.0), plateau) {
            (Some(a), Some(b)) if b > 0.0 => Some((b - a).abs() / b),
            _ => None,
        };
        Self {
            groups,
            velocity,
            smoothed,
            peak,
            all_positive,
            plateau,
            rises_monotonically,
            plateau_change,
        }
    }
}

pub fn run_migration(cfg: ScenarioConfig, opts: &RunOptions) -> Result<(RunSummary, MigrationReport)> {
    let groups = migration_groups(&cfg)?;
    let mut sim = Simulation::new(cfg, opts.exec)?;
    let every = (0.05 * groups.reference_time / sim.dt).round().max(1.0) as u64;
    let mut samples = vec![(0.0, centroid(&sim, Phase::Liquid).map_or(0.0, |c| c[1]))];
    let summary = run_simulation(&mut sim, opts, |s| {
        if s.step % every == 0 {
            samples.push((s.time, centroid(s, Phase::Liquid).map_or(0.0, |c| c[1])));
        }
        true
    })?;
    Ok((summary, MigrationReport::from_centroids(groups, &samples)))
}

#[derive(Debug, Clone, Serialize)]
pub struct OscillationReport {
    pub analytic_period: f64,
    /// Times where `<x^2> - <y^2>` changes sign.
    pub crossings: Vec<f64>,
    /// Third minus first crossing.
    pub period: Option<f64>,
    pub initial_length: f64,
    /// Droplet extent along x at `t = period`, if reached.
    pub length_after_period: Option<f64>,
}

/// Second-moment anisotropy `<x^2> - <y^2>` of the liquid about its centroid.
pub fn anisotropy(sim: &Simulation) -> f64 {
    let c = centroid(sim, Phase::Liquid).unwrap_or_else(Vec3::zeros);
    let p = &sim.particles;
    let (mut s, mut m) = (0.0, 0.0);
    for i in 0..p.len() {
        if p.phase[i] == Phase::Liquid {
            let d = p.position[i] - c;
            s += p.mass[i] * (d[0] * d[0] - d[1] * d[1]);
            m += p.mass[i];
        }
    }
    s / m
}

/// Extent of the liquid along x.
pub fn liquid_length(sim: &Simulation) -> f64 {
    let p = &sim.particles;
    let xs = (0..p.len()).filter(|&i| p.phase[i] == Phase::Liquid).map(|i| p.position[i][0]);
    let (lo, hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    (hi - lo + sim.kernel.h()).max(0.0)
}

pub fn run_oscillation(cfg: ScenarioConfig, opts: &RunOptions) -> Result<(RunSummary, OscillationReport)> {
    let liquid = cfg
        .regions
        .iter()
        .find(|r| r.phase == Phase::Liquid)
        .ok_or_else(|| Error::Config("oscillation needs a liquid region".into()))?;
    let m = &cfg.materials[cfg.material_index(&liquid.material)?];
    let semi = liquid.semi_axes.clone().unwrap_or_default();
    let r = semi.iter().product::<f64>().sqrt();
    let analytic_period = 2.0 * std::f64::consts::PI * (r.powi(3) * m.density / (6.0 * m.surface_tension)).sqrt();
    let mut sim = Simulation::new(cfg, opts.exec)?;
    let initial_length = liquid_length(&sim);
    let every = (analytic_period / 400.0 / sim.dt).round().max(1.0) as u64;
    let mut prev = (0.0, anisotropy(&sim));
    let mut crossings = Vec::new();
    let mut length_after = None;
    let summary = run_simulation(&mut sim, opts, |s| {
        if s.step % every != 0 {
            return true;
        }
        let a = anisotropy(s);
        if a.signum() != prev.1.signum() && a != 0.0 {
            let t = prev.0 + (s.time - prev.0) * prev.1 / (prev.1 - a);
            crossings.push(t);
        }
        prev = (s.time, a);
        if crossings.len() >= 3 {
            let period = crossings[2] - crossings[0];
            if s.time >= period && length_after.is_none() {
                length_after = Some(liquid_length(s));
            }
            return length_after.is_none();
        }
        true
    })?;
    let period = (crossings.len() >= 3).then(|| crossings[2] - crossings[0]);
    Ok((
        summary,
        OscillationReport {
            analytic_period,
            crossings,
            period,
            initial_length,
            length_after_period: length_after,
        },
    ))
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct MeltPoolSample {
    pub time: f64,
    pub liquid: usize,
    pub max_temperature: f64,
    pub max_speed: f64,
    /// Initial surface height minus the lowest liquid particle.
    pub depth: f64,
    /// Horizontal extent of the liquid.
    pub width: f64,
    /// Lowest gas particle below the initial surface, measured from it.
    pub cavity_depth: f64,
    /// Variance of |u| over liquid and gas particles in the interface band.
    pub band_velocity_variance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeltPoolReport {
    pub surface: f64,
    pub samples: Vec<MeltPoolSample>,
    pub max_speed: f64,
    pub mean_band_velocity_variance: f64,
}

/// Height of the highest solid particle at start, plus half a spacing.
fn initial_surface(sim: &Simulation) -> f64 {
    let up = sim.particles.dim - 1;
    let p = &sim.particles;
    (0..p.len())
        .filter(|&i| p.phase[i] == Phase::Solid || p.phase[i] == Phase::Liquid)
        .map(|i| p.position[i][up])
        .fold(f64::NEG_INFINITY, f64::max)
        + 0.5 * sim.kernel.h()
}

pub fn melt_pool_sample(sim: &Simulation, surface: f64) -> MeltPoolSample {
    let p = &sim.particles;
    let up = p.dim - 1;
    let band = 1e-6 / sim.kernel.h();
    let mut s = MeltPoolSample {
        time: sim.time,
        max_speed: sim.max_speed(),
        ..Default::default()
    };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut low_liquid = f64::INFINITY;
    let mut low_gas = f64::INFINITY;
    let mut speeds = Vec::new();
    for i in 0..p.len() {
        let x = p.position[i];
        match p.phase[i] {
            Phase::Liquid => {
                s.liquid += 1;
                lo = lo.min(x[0]);
                hi = hi.max(x[0]);
                low_liquid = low_liquid.min(x[up]);
            }
            Phase::Gas => low_gas = low_gas.min(x[up]),
            _ => {}
        }
        if p.phase[i] != Phase::Wall {
            s.max_temperature = s.max_temperature.max(p.temperature[i]);
        }
        if p.phase[i].is_fluid() && sim.fields.lg.delta[i] > band {
            speeds.push(p.velocity[i].norm());
        }
    }
    if s.liquid > 0 {
        s.depth = (surface - low_liquid + 0.5 * sim.kernel.h()).max(0.0);
        s.width = hi - lo + sim.kernel.h();
    }
    s.cavity_depth = (surface - low_gas - 0.5 * sim.kernel.h()).max(0.0);
    if !speeds.is_empty() {
        let mean = speeds.iter().sum::<f64>() / speeds.len() as f64;
        s.band_velocity_variance = speeds.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / speeds.len() as f64;
    }
    s
}

pub fn run_melt_pool(cfg: ScenarioConfig, opts: &RunOptions) -> Result<(RunSummary, MeltPoolReport)> {
    let mut sim = Simulation::new(cfg, opts.exec)?;
    let surface = initial_surface(&sim);
    let end = sim.config.scenario.end_time;
    let every = (end / 100.0 / sim.dt).round().max(1.0) as u64;
    let mut samples = vec![melt_pool_sample(&sim, surface)];
    let summary = run_simulation(&mut sim, opts, |s| {
        if s.step % every == 0 {
            samples.push(melt_pool_sample(s, surface));
        }
        true
    })?;
    if samples.last().is_none_or(|s| s.time < sim.time) {
        samples.push(melt_pool_sample(&sim, surface));
    }
    let max_speed = samples.iter().map(|s| s.max_speed).fold(0.0, f64::max);
    let var: Vec<f64> = samples.iter().skip(1).map(|s| s.band_velocity_variance).collect();
    let mean = if var.is_empty() { 0.0 } else { var.iter().sum::<f64>() / var.len() as f64 };
    Ok((
        summary,
        MeltPoolReport {
            surface,
            samples,
            max_speed,
            mean_band_velocity_variance: mean,
        },
    ))
}

/// Report of any benchmark, as written to `report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub name: String,
    pub resolution_scale: f64,
    pub run: RunSummary,
    pub observables: serde_json::Value,
}

/// Runs a shipped benchmark at `scale` and writes `report.json` to the
/// output directory when one is given.
pub fn run_benchmark(name: &str, scale: f64, opts: &RunOptions) -> Result<BenchReport> {
    let cfg = scenario(name)?.scaled(scale)?;
    let json = |v: serde_json::Result<serde_json::Value>| v.unwrap_or(serde_json::Value::Null);
    let (run, observables) = match name {
        "static_droplet" => {
            let (r, o) = run_static_droplet(cfg, opts)?;
            (r, json(serde_json::to_value(&o)))
        }
        "migration" => {
            let (r, o) = run_migration(cfg, opts)?;
            (r, json(serde_json::to_value(&o)))
        }
        "oscillation" => {
            let (r, o) = run_oscillation(cfg, opts)?;
            (r, json(serde_json::to_value(&o)))
        }
        _ => {
            let (r, o) = run_melt_pool(cfg, opts)?;
            (r, json(serde_json::to_value(&o)))
        }
    };
    let report = BenchReport {
        name: name.to_string(),
        resolution_scale: scale,
        run,
        observables,
    };
    if let Some(dir) = &opts.out_dir {
        let path = dir.join("report.json");
        let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Config(e.to_string()))?;
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    Ok(report)
}
