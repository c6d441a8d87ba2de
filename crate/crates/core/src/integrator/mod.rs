//! Kick-drift-kick time stepping and boundary conditions.

mod timestep;
mod wall;

pub use timestep::{material_dt, stable_dt, StableDt};
pub use wall::{apply_periodic_bc, apply_wall_bc, RigidState};

use crate::diagnostics::{Counters, StepReport};
use crate::domain::{initialize_particles, phase_update, Material, ParticleSet, Phase, ScenarioConfig, TwoSided};
use crate::exec::Execution;
use crate::fluid::{density_summation, dissipation_factor, momentum_rates, MomentumParams};
use crate::interface::{interface_fields, interface_forces, FieldParams, InterfaceFields, InterfaceForceParams};
use crate::kernel::KernelSpec;
use crate::neighbors::{Bounds, NeighborIndex, NeighborList};
use crate::thermal::{conduction_divergence, energy_rate, evaporation_loss, laser_source};
use crate::{Error, Result, Vec3};

/// Complete solver state.
#[derive(Debug)]
pub struct Simulation {
    pub config: ScenarioConfig,
    pub particles: ParticleSet,
    pub kernel: KernelSpec,
    pub neighbors: NeighborList,
    pub rigid: RigidState,
    pub fields: InterfaceFields,
    pub counters: Counters,
    pub exec: Execution,
    pub time: f64,
    pub step: u64,
    pub dt: f64,
    bounds: Bounds,
    periodic: [bool; 3],
    two_sided: bool,
    w0: f64,
}

impl Simulation {
    /// Builds the particle lattice from `config` and evaluates the initial
    /// accelerations.
    pub fn new(config: ScenarioConfig, exec: Execution) -> Result<Self> {
        let particles = initialize_particles(&config)?;
        Self::with_particles(config, particles, exec)
    }

    /// Starts from a caller-supplied particle set. Particles must lie inside
    /// the domain along non-periodic axes, padded by the wall layers.
    pub fn with_particles(config: ScenarioConfig, particles: ParticleSet, exec: Execution) -> Result<Self> {
        config.validate()?;
        let dim = config.dim();
        if particles.dim != dim {
            return Err(Error::Config(format!(
                "particle set is {}D but the scenario is {dim}D",
                particles.dim
            )));
        }
        let kernel = KernelSpec::new(config.h(), dim)?;
        let periodic = config.periodic();
        let mut bounds = config.bounds();
        let pad = (config.domain.wall_layers as f64 + 1.0) * config.h();
        for a in 0..dim {
            if !periodic[a] {
                bounds.min[a] -= pad;
                bounds.max[a] += pad;
            }
        }
        let two_sided = match config.numerics.two_sided {
            TwoSided::On => true,
            TwoSided::Off => false,
            TwoSided::Auto => {
                let rho: Vec<f64> = (0..particles.len())
                    .filter(|&i| particles.phase[i].is_fluid() || particles.phase[i] == Phase::Solid)
                    .map(|i| config.materials[particles.material[i]].density)
                    .collect();
                let hi = rho.iter().copied().fold(0.0, f64::max);
                let lo = rho.iter().copied().fold(f64::INFINITY, f64::min);
                hi / lo < 10.0
            }
        };
        let n = particles.len();
        let dt = config.numerics.dt;
        let w0 = kernel.w(0.0);
        let mut sim = Self {
            config,
            particles,
            kernel,
            neighbors: NeighborList::default(),
            rigid: RigidState::zeros(n),
            fields: InterfaceFields::default(),
            counters: Counters::default(),
            exec,
            time: 0.0,
            step: 0,
            dt,
            bounds,
            periodic,
            two_sided,
            w0,
        };
        sim.check_invariants()?;
        apply_periodic_bc(&mut sim.particles.position, &sim.bounds, sim.periodic);
        sim.rebuild_neighbors()?;
        sim.update_density();
        sim.update_fields();
        sim.rigid = apply_wall_bc(&sim.particles, &sim.neighbors, &sim.gravity(), sim.config.walls.slip, exec);
        sim.compute_forces();
        Ok(sim)
    }

    fn check_invariants(&self) -> Result<()> {
        let p = &self.particles;
        for i in 0..p.len() {
            if !(p.density[i] > 0.0 && p.temperature[i] > 0.0 && p.mass[i] > 0.0) || p.material[i] >= self.config.materials.len() {
                return Err(Error::InvalidParticle(i));
            }
        }
        Ok(())
    }

    pub fn materials(&self) -> &[Material] {
        &self.config.materials
    }

    pub fn two_sided(&self) -> bool {
        self.two_sided
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn gravity(&self) -> Vec3 {
        if self.config.physics.gravity {
            self.config.gravity()
        } else {
            Vec3::zeros()
        }
    }

    fn rebuild_neighbors(&mut self) -> Result<()> {
        let index = NeighborIndex::build(&self.particles.position, self.kernel.support_radius(), self.bounds, self.periodic)?;
        self.neighbors = NeighborList::build(&index, &self.kernel, self.exec, &self.counters);
        Ok(())
    }

    /// Density summation and equation of state for fluid particles. Skipped
    /// when the pressure force is disabled so a switched-off step is a no-op.
    fn update_density(&mut self) {
        if !self.config.physics.pressure {
            return;
        }
        let rho = density_summation(&self.particles, &self.neighbors, self.w0, self.exec);
        let p = &mut self.particles;
        for (i, r) in rho.into_iter().enumerate() {
            if p.phase[i].is_fluid() {
                p.density[i] = r;
                p.pressure[i] = self.config.materials[p.material[i]].pressure(r);
            }
        }
    }

    fn field_params(&self) -> FieldParams {
        let ph = &self.config.physics;
        FieldParams {
            wetting: ph.wetting || ph.wetting_force,
            curvature: ph.surface_tension,
            curvature_tolerance: self.config.numerics.curvature_tolerance,
            wetting_blend_distance: self.config.wetting_blend_distance(),
            need_sg: ph.laser && self.config.laser.is_some(),
        }
    }

    fn update_fields(&mut self) {
        let prm = self.field_params();
        self.fields = interface_fields(
            &self.particles,
            &self.config.materials,
            &self.neighbors,
            &prm,
            self.w0,
            &self.counters,
            self.exec,
        );
        if !self.config.physics.wetting {
            self.fields.normal_lg = self.fields.lg.normal.clone();
        }
    }

    /// Temperature rate from conduction, laser and evaporation.
    pub fn temperature_rates(&self) -> Vec<f64> {
        let ph = &self.config.physics;
        let p = &self.particles;
        let mats = &self.config.materials;
        let n = p.len();
        let div_q = if ph.conduction {
            conduction_divergence(p, mats, &self.neighbors, self.exec)
        } else {
            vec![0.0; n]
        };
        let laser = match (&self.config.laser, ph.laser) {
            (Some(l), true) => laser_source(p, mats, &self.fields, l, self.time, self.exec),
            _ => Vec::new(),
        };
        let evap = if ph.evaporation {
            evaporation_loss(p, mats, &self.fields, self.exec)
        } else {
            Vec::new()
        };
        energy_rate(p, mats, &div_q, &laser, &evap)
    }

    fn momentum_params(&self) -> MomentumParams {
        let ph = &self.config.physics;
        let nm = &self.config.numerics;
        MomentumParams {
            pressure: ph.pressure,
            viscosity: ph.viscosity,
            transport_velocity: ph.transport_velocity,
            zeta_lg: if ph.interface_viscosity { self.config.zeta_lg() } else { 0.0 },
            zeta_sl: if ph.interface_viscosity { nm.zeta_sl } else { 0.0 },
            zeta_sl_end: nm.zeta_sl_end_temperature.unwrap_or(0.0),
            epsilon: nm.dissipation_epsilon,
            h: self.kernel.h(),
        }
    }

    /// Fills `acceleration` and `shift_acceleration` from the current state.
    pub fn compute_forces(&mut self) {
        let prm = self.momentum_params();
        let p = &self.particles;
        let mats = &self.config.materials;
        let zeta: Vec<f64> = if prm.zeta_lg > 0.0 || prm.zeta_sl > 0.0 {
            (0..p.len()).map(|i| dissipation_factor(p, mats, &self.fields.lg.delta, &prm, i)).collect()
        } else {
            vec![0.0; p.len()]
        };
        let rates = momentum_rates(p, mats, &self.neighbors, &self.rigid, &zeta, &prm, self.exec);
        let ph = &self.config.physics;
        let iprm = InterfaceForceParams {
            surface_tension: ph.surface_tension,
            marangoni: ph.marangoni,
            recoil: ph.recoil,
            wetting_force: ph.wetting_force,
            two_sided: self.two_sided,
            alpha_scale: self.config.ramps.surface_tension_factor(self.time),
        };
        let any_interface = iprm.surface_tension || iprm.marangoni || iprm.recoil || iprm.wetting_force;
        let fi = if any_interface {
            interface_forces(p, mats, &self.neighbors, &self.fields, &iprm, self.exec)
        } else {
            Vec::new()
        };
        let g = self.gravity();
        let p = &mut self.particles;
        for i in 0..p.len() {
            if p.phase[i].is_fluid() {
                let mut a = rates[i].acceleration + g;
                if let Some(f) = fi.get(i) {
                    a += f / p.mass[i];
                }
                p.acceleration[i] = a;
                p.shift_acceleration[i] = rates[i].shift;
            } else {
                p.acceleration[i] = Vec3::zeros();
                p.shift_acceleration[i] = Vec3::zeros();
            }
        }
    }

    fn half_kick(&mut self) {
        let h = 0.5 * self.dt;
        let p = &mut self.particles;
        for i in 0..p.len() {
            if p.phase[i].is_fluid() {
                p.velocity[i] += h * p.acceleration[i];
            }
        }
    }

    /// Advances by one step of `dt`.
    pub fn step(&mut self) -> Result<()> {
        let dt = self.dt;
        self.half_kick();
        {
            let p = &mut self.particles;
            for i in 0..p.len() {
                if p.phase[i].is_fluid() {
                    let ut = p.velocity[i] + 0.5 * dt * p.shift_acceleration[i];
                    p.transport_velocity[i] = ut;
                    p.position[i] += dt * ut;
                }
            }
            apply_periodic_bc(&mut p.position, &self.bounds, self.periodic);
        }
        self.rebuild_neighbors()?;
        self.update_density();
        self.update_fields();

        let ph = self.config.physics;
        if ph.conduction || ph.laser || ph.evaporation {
            let rate = self.temperature_rates();
            let p = &mut self.particles;
            for i in 0..p.len() {
                p.temperature_rate[i] = rate[i];
                if p.phase[i] != Phase::Wall {
                    p.temperature[i] += dt * rate[i];
                }
            }
        }
        if ph.phase_change {
            let before = self.particles.phase.clone();
            if phase_update(&mut self.particles, &self.config.materials) > 0 {
                let p = &mut self.particles;
                for i in 0..p.len() {
                    if before[i] == Phase::Liquid && p.phase[i] == Phase::Solid {
                        p.density[i] = self.config.materials[p.material[i]].density;
                        p.pressure[i] = 0.0;
                    }
                }
                self.update_density();
                self.update_fields();
            }
        }
        self.rigid = apply_wall_bc(&self.particles, &self.neighbors, &self.gravity(), self.config.walls.slip, self.exec);
        self.compute_forces();
        self.half_kick();
        self.time += dt;
        self.step += 1;
        self.check_finite()
    }

    fn check_finite(&self) -> Result<()> {
        let p = &self.particles;
        let bad = |field: &'static str, index: usize| Error::NonFinite {
            step: self.step,
            time: self.time,
            field,
            index,
        };
        for i in 0..p.len() {
            if !p.position[i].iter().all(|v| v.is_finite()) {
                return Err(bad("position", i));
            }
            if !p.velocity[i].iter().all(|v| v.is_finite()) {
                return Err(bad("velocity", i));
            }
            if !p.density[i].is_finite() || p.density[i] <= 0.0 {
                return Err(bad("density", i));
            }
            if !p.temperature[i].is_finite() || p.temperature[i] <= 0.0 {
                return Err(bad("temperature", i));
            }
        }
        Ok(())
    }

    /// Materials carried by non-wall particles.
    pub fn active_materials(&self) -> Vec<&Material> {
        let mut used = vec![false; self.config.materials.len()];
        for i in 0..self.particles.len() {
            if self.particles.phase[i] != Phase::Wall {
                used[self.particles.material[i]] = true;
            }
        }
        self.config.materials.iter().zip(used).filter(|(_, u)| *u).map(|(m, _)| m).collect()
    }

    pub fn max_speed(&self) -> f64 {
        let p = &self.particles;
        (0..p.len())
            .filter(|&i| p.phase[i].is_fluid())
            .map(|i| p.velocity[i].norm())
            .fold(0.0, f64::max)
    }

    /// Limits of the active materials; terms whose physics is switched off
    /// are infinite.
    pub fn stable_dt(&self) -> StableDt {
        let mut s = stable_dt(self.active_materials(), self.kernel.h(), self.max_speed(), self.gravity().norm());
        let ph = &self.config.physics;
        let inf = f64::INFINITY;
        if !ph.pressure {
            s.acoustic = inf;
        }
        if !ph.viscosity {
            s.viscous = inf;
        }
        if !(ph.surface_tension || ph.marangoni || ph.wetting_force) {
            s.capillary = inf;
        }
        if !ph.conduction {
            s.conduction = inf;
        }
        s
    }

    /// Diagnostics of the current state; bumps the warning counter when the
    /// step exceeds the stability limit.
    pub fn report(&self) -> StepReport {
        let p = &self.particles;
        let mut r = StepReport {
            step: self.step,
            time: self.time,
            max_speed: self.max_speed(),
            min_density_ratio: f64::INFINITY,
            max_density_ratio: 0.0,
            min_temperature: f64::INFINITY,
            max_temperature: 0.0,
            dt_headroom: self.stable_dt().min() / self.dt,
            counters: self.counters.snapshot(),
        };
        for i in 0..p.len() {
            if p.phase[i].is_fluid() {
                let ratio = p.density[i] / self.config.materials[p.material[i]].density;
                r.min_density_ratio = r.min_density_ratio.min(ratio);
                r.max_density_ratio = r.max_density_ratio.max(ratio);
            }
            if p.phase[i] != Phase::Wall {
                r.min_temperature = r.min_temperature.min(p.temperature[i]);
                r.max_temperature = r.max_temperature.max(p.temperature[i]);
            }
        }
        if r.dt_headroom < 1.0 {
            Counters::bump(&self.counters.stable_dt_warnings);
        }
        r
    }

    /// Steps until `t_end` or `max_steps`, calling `observe` after every
    /// step. Stops early when `observe` returns false.
    pub fn run(&mut self, t_end: f64, max_steps: Option<u64>, mut observe: impl FnMut(&Simulation) -> bool) -> Result<()> {
        let start = self.step;
        while self.time < t_end - 0.5 * self.dt {
            if max_steps.is_some_and(|m| self.step - start >= m) {
                break;
            }
            self.step()?;
            if !observe(self) {
                break;
            }
        }
        Ok(())
    }
}
