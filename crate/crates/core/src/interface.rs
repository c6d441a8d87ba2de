//! Colour fields, normals, surface delta, curvature and the interface
//! forces of the momentum balance.

use crate::diagnostics::Counters;
use crate::domain::{surface_tension_coefficient, surface_tension_slope, Material, ParticleSet, Phase};
use crate::exec::Execution;
use crate::neighbors::NeighborList;
use crate::Vec3;

/// Which two phase groups a colour field separates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// Liquid against gas; rigid particles are ignored.
    LiquidGas,
    /// Solid and wall against gas; liquid is ignored.
    SolidGas,
    /// Solid and wall against liquid and gas.
    SolidFluid,
}

impl Pairing {
    #[inline]
    pub fn side(self, phase: Phase) -> Option<u8> {
        match (self, phase) {
            (Pairing::LiquidGas, Phase::Liquid) => Some(0),
            (Pairing::LiquidGas, Phase::Gas) => Some(1),
            (Pairing::LiquidGas, _) => None,
            (Pairing::SolidGas, Phase::Liquid) => None,
            (Pairing::SolidGas, Phase::Gas) => Some(1),
            (Pairing::SolidGas, _) => Some(0),
            (Pairing::SolidFluid, p) => Some(if p.is_rigid() { 0 } else { 1 }),
        }
    }
}

/// Colour gradient of one pairing with derived normal and delta.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ColorField {
    pub gradient: Vec<Vec3>,
    /// Unit normal, zero where the gradient vanishes.
    pub normal: Vec<Vec3>,
    /// `|grad c|`
    pub delta: Vec<f64>,
}

impl ColorField {
    pub fn zeros(n: usize) -> Self {
        Self {
            gradient: vec![Vec3::zeros(); n],
            normal: vec![Vec3::zeros(); n],
            delta: vec![0.0; n],
        }
    }

    #[inline]
    pub fn is_valid(&self, i: usize) -> bool {
        self.delta[i] > 0.0
    }
}

/// Density-weighted colour gradient. Points out of the particle's own
/// group. Wall particles get zero.
pub fn color_field(p: &ParticleSet, nl: &NeighborList, pairing: Pairing, exec: Execution) -> ColorField {
    let g = exec.map(p.len(), |i| {
        let Some(si) = pairing.side(p.phase[i]) else {
            return Vec3::zeros();
        };
        if p.phase[i] == Phase::Wall {
            return Vec3::zeros();
        }
        let rho_i = p.density[i];
        let v_i = p.mass[i] / rho_i;
        let mut s = Vec3::zeros();
        for q in nl.of(i) {
            let j = q.j as usize;
            match pairing.side(p.phase[j]) {
                Some(sj) if sj != si => {
                    let rho_j = p.density[j];
                    let v_j = p.mass[j] / rho_j;
                    let cbar = rho_i / (rho_i + rho_j);
                    s += (v_i * v_i + v_j * v_j) * cbar * q.grad_w();
                }
                _ => {}
            }
        }
        s / v_i
    });
    from_gradient(g)
}

fn from_gradient(gradient: Vec<Vec3>) -> ColorField {
    let delta: Vec<f64> = gradient.iter().map(|g| g.norm()).collect();
    let normal = gradient
        .iter()
        .zip(&delta)
        .map(|(g, d)| if *d > 0.0 { g / *d } else { Vec3::zeros() })
        .collect();
    ColorField { gradient, normal, delta }
}

/// Curvature `-div n` normalised by the kernel sum over flagged particles.
/// Neighbours on the other side of the interface contribute their normal
/// with flipped sign, since it points the other way.
pub fn curvature(
    p: &ParticleSet,
    nl: &NeighborList,
    normal: &[Vec3],
    delta: &[f64],
    threshold: f64,
    w0: f64,
    exec: Execution,
) -> Vec<f64> {
    let pairing = Pairing::LiquidGas;
    exec.map(p.len(), |i| {
        let Some(si) = pairing.side(p.phase[i]) else {
            return 0.0;
        };
        if delta[i] <= threshold {
            return 0.0;
        }
        let n_i = normal[i];
        let mut num = 0.0;
        let mut den = w0 * p.mass[i] / p.density[i];
        for q in nl.of(i) {
            let j = q.j as usize;
            let Some(sj) = pairing.side(p.phase[j]) else {
                continue;
            };
            if delta[j] <= threshold {
                continue;
            }
            let v_j = p.mass[j] / p.density[j];
            let n_j = if sj == si { normal[j] } else { -normal[j] };
            num += v_j * (n_i - n_j).dot(&q.grad_w());
            den += v_j * q.w;
        }
        if den > 0.0 {
            -num / den
        } else {
            0.0
        }
    })
}

/// `t = (n_lg - (n_lg . n_sf) n_sf) / |...|`, `None` when degenerate.
#[inline]
pub fn wetting_tangent(n_lg: &Vec3, n_sf: &Vec3) -> Option<Vec3> {
    let t = n_lg - n_lg.dot(n_sf) * n_sf;
    let norm = t.norm();
    (norm > 1e-6).then(|| t / norm)
}

/// Normal prescribed by the equilibrium angle. `n_sf` points from the
/// fluid into the solid.
pub fn prescribed_normal(t_sf: Option<Vec3>, n_sf: &Vec3, theta0: f64) -> Vec3 {
    let (s, c) = theta0.sin_cos();
    match t_sf {
        Some(t) => t * s - n_sf * c,
        None => {
            let v = -n_sf * c;
            let norm = v.norm();
            if norm > 0.0 {
                v / norm
            } else {
                Vec3::zeros()
            }
        }
    }
}

/// Blend factor between the colour-field normal (1) and the prescribed one (0).
#[inline]
pub fn wetting_blend(d_w: f64, d_max: f64) -> f64 {
    if d_w < 0.0 {
        0.0
    } else if d_w > d_max {
        1.0
    } else {
        d_w / d_max
    }
}

/// Result of the wetting correction for one particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WettingState {
    pub normal: Vec3,
    pub tangent: Vec3,
    /// Distance to the closest rigid particle along the wall normal minus h.
    pub wall_distance: f64,
}

/// Replaces the liquid-gas normal of liquid particles near solids by a blend
/// with the normal prescribed by the contact angle.
#[allow(clippy::too_many_arguments)]
pub fn wetting_correction(
    p: &ParticleSet,
    mats: &[Material],
    nl: &NeighborList,
    lg: &ColorField,
    sf: &ColorField,
    d_max: f64,
    counters: &Counters,
    exec: Execution,
) -> Vec<WettingState> {
    let h = p.dx;
    exec.map(p.len(), |i| {
        let none = WettingState {
            normal: lg.normal[i],
            tangent: Vec3::zeros(),
            wall_distance: f64::INFINITY,
        };
        if p.phase[i] != Phase::Liquid || !lg.is_valid(i) || !sf.is_valid(i) {
            return none;
        }
        let n_sf = sf.normal[i];
        let d_w = nl
            .of(i)
            .iter()
            .filter(|q| p.phase[q.j as usize].is_rigid())
            .map(|q| -q.offset().dot(&n_sf))
            .fold(f64::INFINITY, f64::min)
            - h;
        if !d_w.is_finite() {
            return none;
        }
        let n = lg.normal[i];
        let t = wetting_tangent(&n, &n_sf);
        if t.is_none() {
            Counters::bump(&counters.degenerate_tangents);
        }
        let theta0 = mats[p.material[i]].contact_angle.to_radians();
        let f = wetting_blend(d_w, d_max);
        let v = f * n + (1.0 - f) * prescribed_normal(t, &n_sf, theta0);
        let norm = v.norm();
        WettingState {
            normal: if norm > 0.0 { v / norm } else { n },
            tangent: t.unwrap_or_else(Vec3::zeros),
            wall_distance: d_w,
        }
    })
}

/// All interface fields of one step.
#[derive(Debug, Clone, Default)]
pub struct InterfaceFields {
    pub lg: ColorField,
    pub sg: ColorField,
    pub sf: ColorField,
    /// Liquid-gas normal after the wetting correction.
    pub normal_lg: Vec<Vec3>,
    pub tangent_sf: Vec<Vec3>,
    pub curvature: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams {
    pub wetting: bool,
    pub curvature: bool,
    /// epsilon_curv in 1/h.
    pub curvature_tolerance: f64,
    pub wetting_blend_distance: f64,
    pub need_sg: bool,
}

pub fn interface_fields(
    p: &ParticleSet,
    mats: &[Material],
    nl: &NeighborList,
    prm: &FieldParams,
    w0: f64,
    counters: &Counters,
    exec: Execution,
) -> InterfaceFields {
    let n = p.len();
    let has_rigid = p.phase.iter().any(|ph| ph.is_rigid());
    let lg = color_field(p, nl, Pairing::LiquidGas, exec);
    let sg = if prm.need_sg && has_rigid {
        color_field(p, nl, Pairing::SolidGas, exec)
    } else {
        ColorField::zeros(n)
    };
    let (sf, normal_lg, tangent_sf) = if prm.wetting && has_rigid {
        let sf = color_field(p, nl, Pairing::SolidFluid, exec);
        let w = wetting_correction(p, mats, nl, &lg, &sf, prm.wetting_blend_distance, counters, exec);
        let normal = w.iter().map(|s| s.normal).collect();
        let tangent = w.iter().map(|s| s.tangent).collect();
        (sf, normal, tangent)
    } else {
        (ColorField::zeros(n), lg.normal.clone(), vec![Vec3::zeros(); n])
    };
    let curvature = if prm.curvature {
        curvature(p, nl, &normal_lg, &lg.delta, prm.curvature_tolerance / p.dx, w0, exec)
    } else {
        vec![0.0; n]
    };
    InterfaceFields {
        lg,
        sg,
        sf,
        normal_lg,
        tangent_sf,
        curvature,
    }
}

/// Asymmetric (zero-order consistent) temperature gradient.
pub fn temperature_gradient(p: &ParticleSet, nl: &NeighborList, i: usize) -> Vec3 {
    let t_i = p.temperature[i];
    let mut g = Vec3::zeros();
    for q in nl.of(i) {
        let j = q.j as usize;
        g += (p.mass[j] / p.density[j]) * (p.temperature[j] - t_i) * q.grad_w();
    }
    g
}

/// `F = -V alpha kappa n delta`
#[inline]
pub fn surface_tension_normal_force(volume: f64, alpha: f64, kappa: f64, n: &Vec3, delta: f64) -> Vec3 {
    -volume * alpha * kappa * delta * n
}

/// `F = V (I - n n) grad T (d alpha / dT) delta`
#[inline]
pub fn marangoni_force(volume: f64, grad_t: &Vec3, dalpha_dt: f64, n: &Vec3, delta: f64) -> Vec3 {
    let tangential = grad_t - n * n.dot(grad_t);
    volume * dalpha_dt * delta * tangential
}

/// Young force at the contact line: `V alpha (cos theta_0 - cos theta) t
/// delta_lg delta_sf`, with theta measured through the liquid. Positive
/// along `t` (outward) when the current angle exceeds the equilibrium.
#[inline]
pub fn wetting_force(volume: f64, alpha: f64, cos_theta: f64, theta0: f64, t: &Vec3, delta_lg: f64, delta_sf: f64) -> Vec3 {
    volume * alpha * (theta0.cos() - cos_theta) * delta_lg * delta_sf * t
}

/// `F = -V p_v(T) n delta`
#[inline]
pub fn recoil_force(volume: f64, p_v: f64, n: &Vec3, delta: f64) -> Vec3 {
    -volume * p_v * delta * n
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceForceParams {
    pub surface_tension: bool,
    pub marangoni: bool,
    pub recoil: bool,
    pub wetting_force: bool,
    /// Surface tension and Marangoni forces also act on the gas side.
    pub two_sided: bool,
    /// Ramp factor applied to alpha.
    pub alpha_scale: f64,
}

/// Sum of interface forces (not accelerations) per particle.
pub fn interface_forces(
    p: &ParticleSet,
    mats: &[Material],
    nl: &NeighborList,
    f: &InterfaceFields,
    prm: &InterfaceForceParams,
    exec: Execution,
) -> Vec<Vec3> {
    exec.map(p.len(), |i| {
        let phase = p.phase[i];
        let liquid = phase == Phase::Liquid;
        if !(liquid || (prm.two_sided && phase == Phase::Gas)) {
            return Vec3::zeros();
        }
        let delta = f.lg.delta[i];
        if delta == 0.0 {
            return Vec3::zeros();
        }
        let m = &mats[p.material[i]];
        let v = p.mass[i] / p.density[i];
        let t = p.temperature[i];
        let n = f.normal_lg[i];
        let mut out = Vec3::zeros();
        if prm.surface_tension {
            let alpha = prm.alpha_scale * surface_tension_coefficient(t, m);
            out += surface_tension_normal_force(v, alpha, f.curvature[i], &n, delta);
        }
        if prm.marangoni {
            let slope = prm.alpha_scale * surface_tension_slope(t, m);
            if slope != 0.0 {
                out += marangoni_force(v, &temperature_gradient(p, nl, i), slope, &n, delta);
            }
        }
        if liquid && prm.recoil && m.boiling_temperature.is_some() {
            out += recoil_force(v, m.recoil_pressure(t), &n, delta);
        }
        if liquid && prm.wetting_force && f.sf.is_valid(i) {
            let tan = f.tangent_sf[i];
            if tan != Vec3::zeros() {
                let alpha = prm.alpha_scale * surface_tension_coefficient(t, m);
                let cos_theta = -f.lg.normal[i].dot(&f.sf.normal[i]);
                out += wetting_force(v, alpha, cos_theta, m.contact_angle.to_radians(), &tan, delta, f.sf.delta[i]);
            }
        }
        out
    })
}
