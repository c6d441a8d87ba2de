use serde::{Deserialize, Serialize};

/// Constitutive record of one material, shared by all phases that use it.
///
/// Temperatures in K. Other units follow the scenario's unit system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    pub name: String,
    /// rho_0
    pub density: f64,
    /// eta, dynamic
    pub viscosity: f64,
    /// p_0 of the linear equation of state; c = sqrt(p_0 / rho_0).
    pub reference_pressure: f64,
    /// p_b of the transport-velocity correction.
    #[serde(default)]
    pub background_pressure: f64,
    /// alpha_0 at `surface_tension_reference_temperature`.
    #[serde(default)]
    pub surface_tension: f64,
    /// alpha'_0 in alpha(T) = alpha_0 - alpha'_0 (T - T_alpha0).
    #[serde(default)]
    pub surface_tension_gradient: f64,
    #[serde(default)]
    pub surface_tension_reference_temperature: f64,
    /// theta_0 in degrees.
    #[serde(default = "default_contact_angle")]
    pub contact_angle: f64,
    pub heat_capacity: f64,
    pub conductivity: f64,
    /// chi_l
    #[serde(default)]
    pub absorptivity: f64,
    /// T_m; without it the material never changes between solid and liquid.
    #[serde(default)]
    pub melt_temperature: Option<f64>,
    /// T_v; without it there is no recoil pressure or evaporation.
    #[serde(default)]
    pub boiling_temperature: Option<f64>,
    /// C_P
    #[serde(default)]
    pub recoil_pressure_constant: f64,
    /// C_T
    #[serde(default)]
    pub recoil_temperature_constant: f64,
    /// h_v
    #[serde(default)]
    pub evaporation_enthalpy: f64,
    /// T_h0
    #[serde(default)]
    pub enthalpy_reference_temperature: f64,
    /// C_M
    #[serde(default)]
    pub vapor_mass_constant: f64,
    /// c_s
    #[serde(default = "one")]
    pub sticking_constant: f64,
}

fn default_contact_angle() -> f64 {
    90.0
}

fn one() -> f64 {
    1.0
}

impl Material {
    /// A material with the given mechanical and thermal properties and no
    /// capillary, laser or evaporation behaviour.
    pub fn simple(name: &str, density: f64, viscosity: f64, reference_pressure: f64) -> Self {
        Self {
            name: name.to_string(),
            density,
            viscosity,
            reference_pressure,
            background_pressure: 0.0,
            surface_tension: 0.0,
            surface_tension_gradient: 0.0,
            surface_tension_reference_temperature: 0.0,
            contact_angle: 90.0,
            heat_capacity: 1.0,
            conductivity: 0.0,
            absorptivity: 0.0,
            melt_temperature: None,
            boiling_temperature: None,
            recoil_pressure_constant: 0.0,
            recoil_temperature_constant: 0.0,
            evaporation_enthalpy: 0.0,
            enthalpy_reference_temperature: 0.0,
            vapor_mass_constant: 0.0,
            sticking_constant: 1.0,
        }
    }

    /// Stainless-steel melt of the laser benchmarks, SI units.
    pub fn steel() -> Self {
        Self {
            name: "steel".to_string(),
            density: 7430.0,
            viscosity: 6.0e-3,
            reference_pressure: 1.0e7,
            background_pressure: 5.0e7,
            surface_tension: 1.8,
            surface_tension_gradient: 1.0e-3,
            surface_tension_reference_temperature: 1700.0,
            contact_angle: 60.0,
            heat_capacity: 965.0,
            conductivity: 35.95,
            absorptivity: 0.5,
            melt_temperature: Some(1700.0),
            boiling_temperature: Some(3000.0),
            recoil_pressure_constant: 20.0,
            recoil_temperature_constant: 1.0e5,
            evaporation_enthalpy: 6.0e6,
            enthalpy_reference_temperature: 663.731,
            vapor_mass_constant: 1.0e-3,
            sticking_constant: 1.0,
        }
    }

    pub fn sound_speed(&self) -> f64 {
        (self.reference_pressure / self.density).sqrt()
    }

    pub fn kinematic_viscosity(&self) -> f64 {
        self.viscosity / self.density
    }

    /// p = p_0 (rho / rho_0 - 1)
    #[inline]
    pub fn pressure(&self, rho: f64) -> f64 {
        self.reference_pressure * (rho / self.density - 1.0)
    }

    /// Inverse of [`Material::pressure`].
    #[inline]
    pub fn density_at(&self, p: f64) -> f64 {
        self.density * (1.0 + p / self.reference_pressure)
    }

    /// p_v(T) = C_P exp[-C_T (1/T - 1/T_v)]
    pub fn recoil_pressure(&self, t: f64) -> f64 {
        match self.boiling_temperature {
            Some(tv) if self.recoil_pressure_constant > 0.0 => {
                self.recoil_pressure_constant
                    * (-self.recoil_temperature_constant * (1.0 / t - 1.0 / tv)).exp()
            }
            _ => 0.0,
        }
    }

    /// Evaporated mass flux 0.82 c_s p_v sqrt(C_M / T).
    pub fn evaporation_mass_flux(&self, t: f64) -> f64 {
        0.82 * self.sticking_constant * self.recoil_pressure(t) * (self.vapor_mass_constant / t).sqrt()
    }

    /// Interface heat flux -m_dot [h_v + h(T)]; never positive.
    pub fn evaporation_heat_flux(&self, t: f64) -> f64 {
        let mdot = self.evaporation_mass_flux(t);
        if mdot == 0.0 {
            return 0.0;
        }
        -mdot * (self.evaporation_enthalpy + specific_enthalpy(t, self))
    }

    pub fn validate(&self) -> Result<(), String> {
        let n = &self.name;
        let positive = [
            ("density", self.density),
            ("reference_pressure", self.reference_pressure),
            ("heat_capacity", self.heat_capacity),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("material {n}: {k} must be positive, got {v}"));
            }
        }
        let non_negative = [
            ("viscosity", self.viscosity),
            ("background_pressure", self.background_pressure),
            ("surface_tension", self.surface_tension),
            ("surface_tension_gradient", self.surface_tension_gradient),
            ("conductivity", self.conductivity),
            ("absorptivity", self.absorptivity),
            ("recoil_pressure_constant", self.recoil_pressure_constant),
            ("recoil_temperature_constant", self.recoil_temperature_constant),
            ("evaporation_enthalpy", self.evaporation_enthalpy),
            ("vapor_mass_constant", self.vapor_mass_constant),
            ("sticking_constant", self.sticking_constant),
        ];
        for (k, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(format!("material {n}: {k} must be non-negative, got {v}"));
            }
        }
        if !(self.contact_angle > 0.0 && self.contact_angle < 180.0) {
            return Err(format!(
                "material {n}: contact_angle must lie in (0, 180) degrees, got {}",
                self.contact_angle
            ));
        }
        if let Some(tm) = self.melt_temperature {
            if !(tm > 0.0) {
                return Err(format!("material {n}: melt_temperature must be positive"));
            }
        }
        if let Some(tv) = self.boiling_temperature {
            if !(tv > 0.0) {
                return Err(format!("material {n}: boiling_temperature must be positive"));
            }
            if let Some(tm) = self.melt_temperature {
                if tm >= tv {
                    return Err(format!(
                        "material {n}: melt_temperature {tm} must be below boiling_temperature {tv}"
                    ));
                }
            }
        }
        Ok(())
    }
}

/// alpha(T) = alpha_0 - alpha'_0 (T - T_alpha0), held at 0.1 alpha_0 once it
/// has dropped that far.
pub fn surface_tension_coefficient(t: f64, m: &Material) -> f64 {
    let a = m.surface_tension
        - m.surface_tension_gradient * (t - m.surface_tension_reference_temperature);
    a.max(0.1 * m.surface_tension)
}

/// d alpha / dT, zero where the lower clamp is active.
pub fn surface_tension_slope(t: f64, m: &Material) -> f64 {
    let a = m.surface_tension
        - m.surface_tension_gradient * (t - m.surface_tension_reference_temperature);
    if a <= 0.1 * m.surface_tension {
        0.0
    } else {
        -m.surface_tension_gradient
    }
}

/// h(T) = c_p (T - T_h0)
pub fn specific_enthalpy(t: f64, m: &Material) -> f64 {
    m.heat_capacity * (t - m.enthalpy_reference_temperature)
}
