use serde::Serialize;

use crate::domain::Material;

/// Individual time-step limits; inactive terms are infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StableDt {
    pub acoustic: f64,
    pub viscous: f64,
    pub body_force: f64,
    pub capillary: f64,
    pub conduction: f64,
}

impl StableDt {
    pub fn min(&self) -> f64 {
        [self.acoustic, self.viscous, self.body_force, self.capillary, self.conduction]
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    fn merge(self, o: StableDt) -> StableDt {
        StableDt {
            acoustic: self.acoustic.min(o.acoustic),
            viscous: self.viscous.min(o.viscous),
            body_force: self.body_force.min(o.body_force),
            capillary: self.capillary.min(o.capillary),
            conduction: self.conduction.min(o.conduction),
        }
    }
}

/// Limits of one material at smoothing length `h`, given the largest
/// particle speed and body acceleration.
pub fn material_dt(m: &Material, h: f64, u_max: f64, b_max: f64) -> StableDt {
    let inf = f64::INFINITY;
    let rho = m.density;
    let nu = m.kinematic_viscosity();
    StableDt {
        acoustic: 0.25 * h / (m.sound_speed() + u_max),
        viscous: if nu > 0.0 { 0.125 * h * h / nu } else { inf },
        body_force: if b_max > 0.0 { 0.25 * (h / b_max).sqrt() } else { inf },
        capillary: if m.surface_tension > 0.0 {
            0.25 * (rho * h.powi(3) / (2.0 * std::f64::consts::PI * m.surface_tension)).sqrt()
        } else {
            inf
        },
        conduction: if m.conductivity > 0.0 {
            0.125 * rho * m.heat_capacity * h * h / m.conductivity
        } else {
            inf
        },
    }
}

/// Term-wise minimum over the given materials.
pub fn stable_dt<'a>(materials: impl IntoIterator<Item = &'a Material>, h: f64, u_max: f64, b_max: f64) -> StableDt {
    let inf = f64::INFINITY;
    materials.into_iter().fold(
        StableDt {
            acoustic: inf,
            viscous: inf,
            body_force: inf,
            capillary: inf,
            conduction: inf,
        },
        |acc, m| acc.merge(material_dt(m, h, u_max, b_max)),
    )
}
