use crate::domain::{ParticleSet, SlipMode};
use crate::exec::Execution;
use crate::neighbors::{Bounds, NeighborList};
use crate::Vec3;

/// Extrapolated pressure and velocity of rigid particles, as seen by the
/// momentum equation. Entries of fluid particles are unused.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RigidState {
    pub pressure: Vec<f64>,
    pub velocity: Vec<Vec3>,
}

impl RigidState {
    pub fn zeros(n: usize) -> Self {
        Self {
            pressure: vec![0.0; n],
            velocity: vec![Vec3::zeros(); n],
        }
    }
}

/// Local force balance extrapolation onto walls and solids:
/// `p_w = (sum p_f W + g . sum rho_f r_wf W) / sum W`. Static walls, so the
/// wall acceleration is zero. No-slip mirrors the Shepard-averaged fluid
/// velocity, free-slip copies it so the relative velocity vanishes.
pub fn apply_wall_bc(p: &ParticleSet, nl: &NeighborList, gravity: &Vec3, slip: SlipMode, exec: Execution) -> RigidState {
    let out: Vec<(f64, Vec3)> = exec.map(p.len(), |i| {
        if !p.phase[i].is_rigid() {
            return (0.0, Vec3::zeros());
        }
        let mut sw = 0.0;
        let mut sp = 0.0;
        let mut sr = Vec3::zeros();
        let mut su = Vec3::zeros();
        for q in nl.of(i) {
            let j = q.j as usize;
            if !p.phase[j].is_fluid() {
                continue;
            }
            sw += q.w;
            sp += p.pressure[j] * q.w;
            sr += p.density[j] * q.w * q.offset();
            su += p.velocity[j] * q.w;
        }
        if sw == 0.0 {
            return (0.0, Vec3::zeros());
        }
        let u_f = su / sw;
        let u = match slip {
            SlipMode::NoSlip => -u_f,
            SlipMode::FreeSlip => u_f,
        };
        ((sp + gravity.dot(&sr)) / sw, u)
    });
    let (pressure, velocity) = out.into_iter().unzip();
    RigidState { pressure, velocity }
}

/// Wraps positions into `[min, max)` along periodic axes.
pub fn apply_periodic_bc(positions: &mut [Vec3], bounds: &Bounds, periodic: [bool; 3]) {
    let ext = bounds.extent();
    for x in positions.iter_mut() {
        for a in 0..3 {
            if periodic[a] {
                *x = wrap_axis(*x, a, bounds.min[a], ext[a]);
            }
        }
    }
}

#[inline]
fn wrap_axis(mut x: Vec3, a: usize, lo: f64, len: f64) -> Vec3 {
    let mut v = lo + (x[a] - lo).rem_euclid(len);
    if v >= lo + len {
        v = lo;
    }
    x[a] = v;
    x
}
