use super::{Material, Phase};
use crate::Vec3;

/// Structure-of-arrays particle state.
#[derive(Debug, Clone, Default)]
pub struct ParticleSet {
    pub dim: usize,
    /// Initial lattice spacing, equal to the smoothing length.
    pub dx: f64,
    pub position: Vec<Vec3>,
    pub velocity: Vec<Vec3>,
    /// Advection velocity of the transport-velocity formulation.
    pub transport_velocity: Vec<Vec3>,
    pub acceleration: Vec<Vec3>,
    /// Background-pressure acceleration applied to the transport velocity.
    pub shift_acceleration: Vec<Vec3>,
    pub density: Vec<f64>,
    pub pressure: Vec<f64>,
    pub temperature: Vec<f64>,
    pub temperature_rate: Vec<f64>,
    pub mass: Vec<f64>,
    pub phase: Vec<Phase>,
    pub material: Vec<usize>,
}

impl ParticleSet {
    pub fn new(dim: usize, dx: f64) -> Self {
        Self {
            dim,
            dx,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.position.len()
    }

    pub fn is_empty(&self) -> bool {
        self.position.is_empty()
    }

    /// Appends a particle at rest with reference density and
    /// `m = rho_0 dx^d`.
    pub fn push(&mut self, position: Vec3, phase: Phase, material: usize, mat: &Material, temperature: f64) {
        self.position.push(position);
        self.velocity.push(Vec3::zeros());
        self.transport_velocity.push(Vec3::zeros());
        self.acceleration.push(Vec3::zeros());
        self.shift_acceleration.push(Vec3::zeros());
        self.density.push(mat.density);
        self.pressure.push(0.0);
        self.temperature.push(temperature);
        self.temperature_rate.push(0.0);
        self.mass.push(mat.density * self.dx.powi(self.dim as i32));
        self.phase.push(phase);
        self.material.push(material);
    }

    #[inline]
    pub fn volume(&self, i: usize) -> f64 {
        self.mass[i] / self.density[i]
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn count(&self, phase: Phase) -> usize {
        self.phase.iter().filter(|&&p| p == phase).count()
    }
}

/// Melts solid particles above T_m and freezes liquid particles below it.
/// Frozen particles stop in place. Returns the number of changed particles.
pub fn phase_update(particles: &mut ParticleSet, materials: &[Material]) -> usize {
    let mut changed = 0;
    for i in 0..particles.len() {
        let Some(tm) = materials[particles.material[i]].melt_temperature else {
            continue;
        };
        let t = particles.temperature[i];
        match particles.phase[i] {
            Phase::Solid if t > tm => {
                particles.phase[i] = Phase::Liquid;
                changed += 1;
            }
            Phase::Liquid if t < tm => {
                particles.phase[i] = Phase::Solid;
                particles.velocity[i] = Vec3::zeros();
                particles.transport_velocity[i] = Vec3::zeros();
                particles.acceleration[i] = Vec3::zeros();
                particles.shift_acceleration[i] = Vec3::zeros();
                changed += 1;
            }
            _ => {}
        }
    }
    changed
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn melting_and_freezing() {
        let m = Material::steel();
        let mut p = ParticleSet::new(2, 1e-6);
        p.push(Vec3::zeros(), Phase::Solid, 0, &m, 1701.0);
        p.push(Vec3::zeros(), Phase::Liquid, 0, &m, 1699.0);
        p.push(Vec3::zeros(), Phase::Gas, 0, &m, 5000.0);
        p.push(Vec3::zeros(), Phase::Wall, 0, &m, 5000.0);
        p.velocity[1] = Vec3::new(1.0, 2.0, 0.0);
        let mass = p.mass.clone();
        assert_eq!(phase_update(&mut p, &[m.clone()]), 2);
        assert_eq!(p.phase, vec![Phase::Liquid, Phase::Solid, Phase::Gas, Phase::Wall]);
        assert_eq!(p.velocity[1], Vec3::zeros());
        p.temperature[0] = 1600.0;
        p.temperature[1] = 1800.0;
        phase_update(&mut p, &[m]);
        assert_eq!(p.phase[0], Phase::Solid);
        assert_eq!(p.phase[1], Phase::Liquid);
        assert_eq!(p.mass, mass);
        assert_eq!(p.material, vec![0, 0, 0, 0]);
    }
}
