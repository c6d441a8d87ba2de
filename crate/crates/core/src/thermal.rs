//! Energy balance: conduction, laser heating and evaporative cooling.

use crate::domain::{LaserSpec, Material, ParticleSet, Phase};
use crate::exec::Execution;
use crate::interface::InterfaceFields;
use crate::neighbors::NeighborList;
use crate::Vec3;

/// Conductivity factor `4 k_i k_j / (k_i + k_j)`; zero for an insulating side.
#[inline]
pub fn conductivity_factor(k_i: f64, k_j: f64) -> f64 {
    if k_i + k_j > 0.0 {
        4.0 * k_i * k_j / (k_i + k_j)
    } else {
        0.0
    }
}

/// Discrete heat-flux divergence. Rigid particles contribute at their
/// stored temperature; wall particles themselves get zero.
pub fn conduction_divergence(p: &ParticleSet, mats: &[Material], nl: &NeighborList, exec: Execution) -> Vec<f64> {
    exec.map(p.len(), |i| {
        if p.phase[i] == Phase::Wall {
            return 0.0;
        }
        let k_i = mats[p.material[i]].conductivity;
        let t_i = p.temperature[i];
        let mut s = 0.0;
        for q in nl.of(i) {
            if q.coincident() {
                continue;
            }
            let j = q.j as usize;
            let kf = conductivity_factor(k_i, mats[p.material[j]].conductivity);
            if kf == 0.0 {
                continue;
            }
            s += p.mass[j] * kf * (p.temperature[j] - t_i) / p.density[j] * q.dw_r;
        }
        s
    })
}

/// Gaussian beam profile `exp(-2 (d / r_w)^2)`.
#[inline]
pub fn gaussian_factor(distance: f64, radius: f64) -> f64 {
    (-2.0 * (distance / radius).powi(2)).exp()
}

/// Distance of `x` from the beam axis through `x0` along `e`.
#[inline]
pub fn beam_distance(x: &Vec3, x0: &Vec3, e: &Vec3) -> f64 {
    let d = x - x0;
    (d - e * d.dot(e)).norm()
}

/// Volumetric laser heating `chi <-n.e> s0 exp(-2 (d/r_w)^2) delta`.
#[inline]
pub fn laser_heating(chi: f64, n: &Vec3, e: &Vec3, s0: f64, distance: f64, radius: f64, delta: f64) -> f64 {
    let facing = (-n.dot(e)).max(0.0);
    chi * facing * s0 * gaussian_factor(distance, radius) * delta
}

/// Laser source per particle: liquid uses the liquid-gas fields, solid the
/// solid-gas fields.
pub fn laser_source(p: &ParticleSet, mats: &[Material], f: &InterfaceFields, laser: &LaserSpec, t: f64, exec: Execution) -> Vec<f64> {
    if !laser.is_on(t) || laser.irradiance == 0.0 {
        return vec![0.0; p.len()];
    }
    let x0 = laser.center(t);
    let e = laser.unit_direction();
    exec.map(p.len(), |i| {
        let chi = mats[p.material[i]].absorptivity;
        if chi == 0.0 {
            return 0.0;
        }
        let (n, delta) = match p.phase[i] {
            Phase::Liquid => (f.normal_lg[i], f.lg.delta[i]),
            Phase::Solid => (f.sg.normal[i], f.sg.delta[i]),
            _ => return 0.0,
        };
        if delta == 0.0 {
            return 0.0;
        }
        let d = beam_distance(&p.position[i], &x0, &e);
        laser_heating(chi, &n, &e, laser.irradiance, d, laser.radius, delta)
    })
}

/// Evaporative heat sink `-m_dot (h_v + h(T)) delta` on liquid particles.
pub fn evaporation_loss(p: &ParticleSet, mats: &[Material], f: &InterfaceFields, exec: Execution) -> Vec<f64> {
    exec.map(p.len(), |i| {
        if p.phase[i] != Phase::Liquid || f.lg.delta[i] == 0.0 {
            return 0.0;
        }
        mats[p.material[i]].evaporation_heat_flux(p.temperature[i]) * f.lg.delta[i]
    })
}

/// `dT/dt = (-div q + s_v + s_l) / (c_p rho)`; zero for wall particles.
pub fn energy_rate(p: &ParticleSet, mats: &[Material], div_q: &[f64], laser: &[f64], evaporation: &[f64]) -> Vec<f64> {
    (0..p.len())
        .map(|i| {
            if p.phase[i] == Phase::Wall {
                return 0.0;
            }
            let m = &mats[p.material[i]];
            let s = -div_q[i] + laser.get(i).copied().unwrap_or(0.0) + evaporation.get(i).copied().unwrap_or(0.0);
            s / (m.heat_capacity * p.density[i])
        })
        .collect()
}
