//! Weakly compressible momentum balance: density summation, equation of
//! state, pairwise pressure and viscous forces, transport-velocity terms and
//! interface dissipation.

use crate::domain::{Material, ParticleSet, Phase};
use crate::exec::Execution;
use crate::integrator::RigidState;
use crate::neighbors::NeighborList;
use crate::{Mat3, Vec3};

/// `rho_i = m_i sum_j W_ij`, self term and rigid particles included.
pub fn density_summation(p: &ParticleSet, nl: &NeighborList, w0: f64, exec: Execution) -> Vec<f64> {
    exec.map(p.len(), |i| {
        let s: f64 = nl.of(i).iter().map(|q| q.w).sum();
        p.mass[i] * (w0 + s)
    })
}

/// `p = p_0 (rho / rho_0 - 1)`
#[inline]
pub fn eos_pressure(rho: f64, mat: &Material) -> f64 {
    mat.pressure(rho)
}

/// Harmonic mean, zero when either side is zero.
#[inline]
pub fn harmonic_mean(a: f64, b: f64) -> f64 {
    if a + b > 0.0 {
        2.0 * a * b / (a + b)
    } else {
        0.0
    }
}

/// Solid-liquid damping ramp: 1 at T_m falling linearly to 0 at T_max.
pub fn solid_liquid_ramp(t: f64, t_melt: f64, t_max: f64) -> f64 {
    if t_max <= t_melt {
        return if t <= t_melt { 1.0 } else { 0.0 };
    }
    ((t_max - t) / (t_max - t_melt)).clamp(0.0, 1.0)
}

/// Kinematic viscosity equivalent to the interface dissipation term.
pub fn effective_viscosity(zeta: f64, h: f64, c: f64, dim: usize) -> f64 {
    0.5 * zeta * h * c / (dim as f64 + 2.0)
}

/// State a neighbour presents to fluid particle `i`. Rigid neighbours take
/// the extrapolated wall pressure and velocity and borrow the material of
/// `i`, so the wall looks like the adjacent fluid.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Partner {
    pub rho: f64,
    pub p: f64,
    pub m: f64,
    pub u: Vec3,
    pub ut: Vec3,
    pub eta: f64,
    pub c: f64,
}

#[inline]
pub(crate) fn partner(p: &ParticleSet, mats: &[Material], rigid: &RigidState, i: usize, j: usize) -> Partner {
    if p.phase[j].is_rigid() {
        let mi = &mats[p.material[i]];
        let pw = rigid.pressure[j];
        let rho = if mi.reference_pressure > 0.0 {
            (mi.density * (1.0 + pw / mi.reference_pressure)).max(1e-3 * mi.density)
        } else {
            mi.density
        };
        let u = rigid.velocity[j];
        Partner {
            rho,
            p: pw,
            m: p.mass[i],
            u,
            ut: u,
            eta: mi.viscosity,
            c: mi.sound_speed(),
        }
    } else {
        let mj = &mats[p.material[j]];
        Partner {
            rho: p.density[j],
            p: p.pressure[j],
            m: p.mass[j],
            u: p.velocity[j],
            ut: p.transport_velocity[j],
            eta: mj.viscosity,
            c: mj.sound_speed(),
        }
    }
}

/// Which momentum terms to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumParams {
    pub pressure: bool,
    pub viscosity: bool,
    pub transport_velocity: bool,
    /// zeta_0^lg at the current h; zero disables.
    pub zeta_lg: f64,
    pub zeta_sl: f64,
    /// T_max of the solid-liquid ramp.
    pub zeta_sl_end: f64,
    pub epsilon: f64,
    pub h: f64,
}

/// Per-particle output of the momentum pass.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MomentumRate {
    /// Acceleration from pressure, viscosity, transport correction and
    /// interface dissipation.
    pub acceleration: Vec3,
    /// Background-pressure acceleration of the transport velocity.
    pub shift: Vec3,
}

/// Interface dissipation factor zeta_i.
pub fn dissipation_factor(p: &ParticleSet, mats: &[Material], delta_lg: &[f64], prm: &MomentumParams, i: usize) -> f64 {
    let mut z = 0.0;
    if prm.zeta_lg > 0.0 && delta_lg[i] > 1e-6 / prm.h {
        z += prm.zeta_lg * delta_lg[i];
    }
    if prm.zeta_sl > 0.0 && p.phase[i] == Phase::Liquid {
        if let Some(tm) = mats[p.material[i]].melt_temperature {
            z += prm.zeta_sl * solid_liquid_ramp(p.temperature[i], tm, prm.zeta_sl_end);
        }
    }
    z
}

/// Pressure, viscous, transport-velocity and interface-dissipation
/// accelerations for every fluid particle. Rigid particles get zero.
///
/// The dissipation coefficient of a pair is the mean of the two particle
/// factors so that the pair force stays antisymmetric.
pub fn momentum_rates(
    p: &ParticleSet,
    mats: &[Material],
    nl: &NeighborList,
    rigid: &RigidState,
    zeta: &[f64],
    prm: &MomentumParams,
    exec: Execution,
) -> Vec<MomentumRate> {
    exec.map(p.len(), |i| {
        if !p.phase[i].is_fluid() {
            return MomentumRate::default();
        }
        let mi = &mats[p.material[i]];
        let (rho_i, p_i, m_i) = (p.density[i], p.pressure[i], p.mass[i]);
        let u_i = p.velocity[i];
        let v_i = m_i / rho_i;
        let a_i: Mat3 = rho_i * u_i * (p.transport_velocity[i] - u_i).transpose();
        let c_i = mi.sound_speed();
        let mut f = Vec3::zeros();
        let mut shift = Vec3::zeros();
        let mut diss = Vec3::zeros();
        for q in nl.of(i) {
            if q.coincident() {
                continue;
            }
            let j = q.j as usize;
            let s = partner(p, mats, rigid, i, j);
            let v_j = s.m / s.rho;
            let coef = v_i * v_i + v_j * v_j;
            let gw = q.grad_w();
            let u_ij = u_i - s.u;
            let mut t = Vec3::zeros();
            if prm.pressure {
                let pbar = (s.rho * p_i + rho_i * s.p) / (rho_i + s.rho);
                t -= pbar * gw;
            }
            if prm.viscosity {
                t += harmonic_mean(mi.viscosity, s.eta) * q.dw_r * u_ij;
            }
            if prm.transport_velocity {
                let a_j: Mat3 = if p.phase[j].is_rigid() {
                    Mat3::zeros()
                } else {
                    s.rho * s.u * (s.ut - s.u).transpose()
                };
                t += 0.5 * (a_i + a_j) * gw;
                shift += coef * gw;
            }
            f += coef * t;
            let zj = if p.phase[j].is_rigid() { zeta[i] } else { zeta[j] };
            let z = 0.5 * (zeta[i] + zj);
            if z > 0.0 {
                let cbar = 0.5 * (c_i + s.c);
                let rhobar = 0.5 * (rho_i + s.rho);
                let r_ij = q.offset();
                let x = prm.h * cbar * u_ij.dot(&r_ij) / (rhobar * (q.r * q.r + prm.epsilon * prm.h * prm.h));
                diss += z * s.m * x * gw;
            }
        }
        MomentumRate {
            acceleration: f / m_i + diss,
            shift: -(mi.background_pressure / m_i) * shift,
        }
    })
}
