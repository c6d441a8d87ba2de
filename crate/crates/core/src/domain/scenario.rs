//! Scenario description as read from a `.cfg` file.
//!
//! Values are taken in whatever consistent unit system the file uses; the
//! solver performs no conversion. Temperatures are in K and angles in
//! degrees.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Material, Phase};
use crate::neighbors::Bounds;
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioInfo,
    pub domain: DomainSpec,
    #[serde(default)]
    pub walls: WallSpec,
    pub numerics: NumericsSpec,
    #[serde(rename = "material")]
    pub materials: Vec<Material>,
    #[serde(default, rename = "region")]
    pub regions: Vec<RegionSpec>,
    #[serde(default)]
    pub fill: Option<FillSpec>,
    pub initial: InitialSpec,
    #[serde(default)]
    pub body: BodySpec,
    #[serde(default)]
    pub laser: Option<LaserSpec>,
    #[serde(default)]
    pub physics: PhysicsSwitches,
    #[serde(default)]
    pub ramps: RampSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioInfo {
    pub name: String,
    /// Simulated end time.
    pub end_time: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub description: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    Wall,
    Periodic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    /// Lower corner of the fluid domain; its length sets the dimension.
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    /// One entry per axis.
    pub boundary: Vec<BoundaryKind>,
    /// Layers of wall particles on each wall face.
    #[serde(default = "default_wall_layers")]
    pub wall_layers: usize,
}

fn default_wall_layers() -> usize {
    3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlipMode {
    #[default]
    NoSlip,
    FreeSlip,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallSpec {
    #[serde(default)]
    pub slip: SlipMode,
    /// Material of the wall particles; required when any axis is a wall.
    #[serde(default)]
    pub material: Option<String>,
    /// Dirichlet temperature T_hat. Without it walls keep the initial field.
    #[serde(default)]
    pub temperature: Option<f64>,
    /// Per-face overrides keyed `x_min`, `x_max`, `y_min`, ...
    #[serde(default)]
    pub face_temperature: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TwoSided {
    /// Two-sided when the liquid/gas density ratio is below 10.
    #[default]
    Auto,
    On,
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSpec {
    /// Initial spacing Delta x; also the smoothing length h.
    pub dx: f64,
    pub dt: f64,
    /// zeta_0^lg (length) at `zeta_lg_reference_h`; scaled linearly with h.
    #[serde(default)]
    pub zeta_lg: f64,
    #[serde(default)]
    pub zeta_lg_reference_h: Option<f64>,
    /// zeta_0^sl (dimensionless).
    #[serde(default)]
    pub zeta_sl: f64,
    /// T_max, where the solid-liquid damping ramp reaches zero.
    #[serde(default)]
    pub zeta_sl_end_temperature: Option<f64>,
    /// epsilon_curv in units of 1/h.
    #[serde(default = "default_curvature_tolerance")]
    pub curvature_tolerance: f64,
    /// epsilon in the dissipation denominator r^2 + epsilon h^2.
    #[serde(default = "default_dissipation_epsilon")]
    pub dissipation_epsilon: f64,
    /// d_max of the wetting blend; defaults to h.
    #[serde(default)]
    pub wetting_blend_distance: Option<f64>,
    #[serde(default)]
    pub two_sided: TwoSided,
}

fn default_curvature_tolerance() -> f64 {
    1e-4
}

fn default_dissipation_epsilon() -> f64 {
    0.01
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Block,
    Disc,
    Sphere,
    Ellipse,
    Ellipsoid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    #[serde(default)]
    pub label: Option<String>,
    pub phase: Phase,
    pub material: String,
    pub shape: ShapeKind,
    #[serde(default)]
    pub min: Option<Vec<f64>>,
    #[serde(default)]
    pub max: Option<Vec<f64>>,
    #[serde(default)]
    pub center: Option<Vec<f64>>,
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub semi_axes: Option<Vec<f64>>,
}

/// Resolved region geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Block { min: Vec3, max: Vec3 },
    Ellipsoid { center: Vec3, semi_axes: Vec3 },
}

impl Shape {
    pub fn contains(&self, p: &Vec3, dim: usize) -> bool {
        match self {
            Shape::Block { min, max } => (0..dim).all(|a| p[a] >= min[a] && p[a] < max[a]),
            Shape::Ellipsoid { center, semi_axes } => {
                let s: f64 = (0..dim).map(|a| ((p[a] - center[a]) / semi_axes[a]).powi(2)).sum();
                s < 1.0
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FillSpec {
    pub phase: Phase,
    pub material: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    /// T_0 at `temperature_origin`.
    pub temperature: f64,
    #[serde(default)]
    pub temperature_gradient: Option<Vec<f64>>,
    /// Defaults to the domain's lower corner.
    #[serde(default)]
    pub temperature_origin: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    #[serde(default)]
    pub gravity: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserSpec {
    /// Peak irradiance s_l0 (power per area).
    pub irradiance: f64,
    /// r_w
    pub radius: f64,
    /// e_l, normalised on load.
    pub direction: Vec<f64>,
    /// Beam axis waypoints `[t, x, y(, z)]`, linearly interpolated and held
    /// constant outside the listed times.
    pub path: Vec<Vec<f64>>,
    /// `[t_on, t_off]` intervals; empty means always on.
    #[serde(default)]
    pub on: Vec<[f64; 2]>,
}

impl LaserSpec {
    pub fn is_on(&self, t: f64) -> bool {
        self.on.is_empty() || self.on.iter().any(|[a, b]| t >= *a && t < *b)
    }

    /// Beam axis point x_0(t).
    pub fn center(&self, t: f64) -> Vec3 {
        let at = |k: usize| {
            let w = &self.path[k];
            Vec3::new(w[1], w[2], w.get(3).copied().unwrap_or(0.0))
        };
        let n = self.path.len();
        if t <= self.path[0][0] {
            return at(0);
        }
        for k in 1..n {
            let (t0, t1) = (self.path[k - 1][0], self.path[k][0]);
            if t <= t1 {
                let s = if t1 > t0 { (t - t0) / (t1 - t0) } else { 1.0 };
                return at(k - 1) * (1.0 - s) + at(k) * s;
            }
        }
        at(n - 1)
    }

    pub fn unit_direction(&self) -> Vec3 {
        let d = vec3(&self.direction);
        d / d.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicsSwitches {
    pub pressure: bool,
    pub viscosity: bool,
    pub transport_velocity: bool,
    pub surface_tension: bool,
    pub marangoni: bool,
    /// Contact angle imposed through the normal correction near solids.
    pub wetting: bool,
    /// Direct Young force at the contact line; off unless requested.
    pub wetting_force: bool,
    pub recoil: bool,
    pub interface_viscosity: bool,
    pub conduction: bool,
    pub laser: bool,
    pub evaporation: bool,
    pub gravity: bool,
    pub phase_change: bool,
}

impl Default for PhysicsSwitches {
    fn default() -> Self {
        Self::all(true)
    }
}

impl PhysicsSwitches {
    pub fn all(on: bool) -> Self {
        Self {
            pressure: on,
            viscosity: on,
            transport_velocity: on,
            surface_tension: on,
            marangoni: on,
            wetting: on,
            wetting_force: false,
            recoil: on,
            interface_viscosity: on,
            conduction: on,
            laser: on,
            evaporation: on,
            gravity: on,
            phase_change: on,
        }
    }

    pub fn any_interface_force(&self) -> bool {
        self.surface_tension || self.marangoni || self.wetting || self.recoil
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RampSpec {
    /// Surface tension grows linearly from zero over `[t_start, t_end]`.
    #[serde(default)]
    pub surface_tension: Option<[f64; 2]>,
}

impl RampSpec {
    pub fn surface_tension_factor(&self, t: f64) -> f64 {
        ramp(self.surface_tension, t)
    }
}

fn ramp(window: Option<[f64; 2]>, t: f64) -> f64 {
    match window {
        None => 1.0,
        Some([a, b]) => {
            if t <= a {
                0.0
            } else if t >= b {
                1.0
            } else {
                (t - a) / (b - a)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Vtk,
    Both,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Snapshot spacing in simulated time; absent means final state only.
    #[serde(default)]
    pub interval: Option<f64>,
    #[serde(default)]
    pub format: OutputFormat,
    /// Steps between diagnostic reports.
    #[serde(default = "default_diagnostics_interval")]
    pub diagnostics_interval: u64,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            interval: None,
            format: OutputFormat::Csv,
            diagnostics_interval: default_diagnostics_interval(),
        }
    }
}

fn default_diagnostics_interval() -> u64 {
    1000
}

/// Pads a 2- or 3-component list to a vector.
pub fn vec3(v: &[f64]) -> Vec3 {
    Vec3::new(
        v.first().copied().unwrap_or(0.0),
        v.get(1).copied().unwrap_or(0.0),
        v.get(2).copied().unwrap_or(0.0),
    )
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

const FACES: [&str; 6] = ["x_min", "x_max", "y_min", "y_max", "z_min", "z_max"];

impl ScenarioConfig {
    pub fn dim(&self) -> usize {
        self.domain.min.len()
    }

    pub fn bounds(&self) -> Bounds {
        Bounds::new(vec3(&self.domain.min), vec3(&self.domain.max))
    }

    pub fn periodic(&self) -> [bool; 3] {
        let mut p = [false; 3];
        for (a, k) in self.domain.boundary.iter().enumerate() {
            p[a] = *k == BoundaryKind::Periodic;
        }
        p
    }

    pub fn has_walls(&self) -> bool {
        self.domain.boundary.contains(&BoundaryKind::Wall)
    }

    pub fn h(&self) -> f64 {
        self.numerics.dx
    }

    pub fn gravity(&self) -> Vec3 {
        self.body.gravity.as_deref().map(vec3).unwrap_or_else(Vec3::zeros)
    }

    pub fn material_index(&self, name: &str) -> Result<usize> {
        self.materials
            .iter()
            .position(|m| m.name == name)
            .ok_or_else(|| config_err(format!("unknown material '{name}'")))
    }

    /// zeta_0^lg at the current h.
    pub fn zeta_lg(&self) -> f64 {
        match self.numerics.zeta_lg_reference_h {
            Some(h0) => self.numerics.zeta_lg * self.h() / h0,
            None => self.numerics.zeta_lg,
        }
    }

    pub fn wetting_blend_distance(&self) -> f64 {
        self.numerics.wetting_blend_distance.unwrap_or(self.h())
    }

    /// Wall temperature for a face, if one is prescribed.
    pub fn face_temperature(&self, axis: usize, upper: bool) -> Option<f64> {
        let key = FACES[2 * axis + upper as usize];
        self.walls
            .face_temperature
            .get(key)
            .copied()
            .or(self.walls.temperature)
    }

    pub fn initial_temperature(&self, p: &Vec3) -> f64 {
        let t0 = self.initial.temperature;
        match &self.initial.temperature_gradient {
            None => t0,
            Some(g) => {
                let o = self
                    .initial
                    .temperature_origin
                    .as_deref()
                    .map(vec3)
                    .unwrap_or_else(|| vec3(&self.domain.min));
                t0 + vec3(g).dot(&(p - o))
            }
        }
    }

    pub fn region_shape(&self, r: &RegionSpec) -> Result<Shape> {
        let d = self.dim();
        let label = r.label.clone().unwrap_or_else(|| format!("{:?}", r.shape));
        let need = |v: &Option<Vec<f64>>, key: &str| -> Result<Vec3> {
            match v {
                Some(v) if v.len() == d => Ok(vec3(v)),
                Some(v) => Err(config_err(format!(
                    "region {label}: {key} has {} components, expected {d}",
                    v.len()
                ))),
                None => Err(config_err(format!("region {label}: missing {key}"))),
            }
        };
        match r.shape {
            ShapeKind::Block => Ok(Shape::Block {
                min: need(&r.min, "min")?,
                max: need(&r.max, "max")?,
            }),
            ShapeKind::Disc | ShapeKind::Sphere => {
                let radius = r
                    .radius
                    .filter(|r| *r > 0.0)
                    .ok_or_else(|| config_err(format!("region {label}: radius must be positive")))?;
                Ok(Shape::Ellipsoid {
                    center: need(&r.center, "center")?,
                    semi_axes: Vec3::repeat(radius),
                })
            }
            ShapeKind::Ellipse | ShapeKind::Ellipsoid => {
                let s = need(&r.semi_axes, "semi_axes")?;
                if (0..d).any(|a| !(s[a] > 0.0)) {
                    return Err(config_err(format!("region {label}: semi_axes must be positive")));
                }
                Ok(Shape::Ellipsoid {
                    center: need(&r.center, "center")?,
                    semi_axes: s,
                })
            }
        }
    }

    /// Checks every invariant that does not require building the lattice.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if !(d == 2 || d == 3) {
            return Err(config_err(format!("domain.min must have 2 or 3 components, got {d}")));
        }
        if self.domain.max.len() != d || self.domain.boundary.len() != d {
            return Err(config_err("domain.max and domain.boundary must match domain.min in length"));
        }
        let dx = self.numerics.dx;
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(config_err(format!("numerics.dx must be positive, got {dx}")));
        }
        if !(self.numerics.dt > 0.0 && self.numerics.dt.is_finite()) {
            return Err(config_err(format!("numerics.dt must be positive, got {}", self.numerics.dt)));
        }
        if !(self.scenario.end_time > 0.0) {
            return Err(config_err("scenario.end_time must be positive"));
        }
        for a in 0..d {
            let len = self.domain.max[a] - self.domain.min[a];
            if !(len > 0.0) {
                return Err(config_err(format!("domain extent along axis {a} must be positive")));
            }
            let n = (len / dx).round();
            if n < 1.0 || (n * dx - len).abs() > 1e-6 * len {
                return Err(config_err(format!(
                    "domain extent {len} along axis {a} is not a multiple of numerics.dx = {dx}"
                )));
            }
        }
        if self.materials.is_empty() {
            return Err(config_err("at least one [[material]] is required"));
        }
        for (k, m) in self.materials.iter().enumerate() {
            m.validate().map_err(config_err)?;
            if self.materials[..k].iter().any(|o| o.name == m.name) {
                return Err(config_err(format!("material '{}' defined twice", m.name)));
            }
        }
        for r in &self.regions {
            self.material_index(&r.material)?;
            if r.phase == Phase::Wall {
                return Err(config_err("regions cannot have phase 'wall'; use the domain boundary"));
            }
            self.region_shape(r)?;
        }
        if let Some(f) = &self.fill {
            self.material_index(&f.material)?;
            if f.phase == Phase::Wall {
                return Err(config_err("fill cannot have phase 'wall'"));
            }
        }
        if self.has_walls() {
            let name = self.walls.material.as_deref().ok_or_else(|| {
                config_err("walls.material is required when any axis has wall boundaries")
            })?;
            self.material_index(name)?;
        }
        for key in self.walls.face_temperature.keys() {
            if !FACES[..2 * d].contains(&key.as_str()) {
                return Err(config_err(format!("walls.face_temperature: unknown face '{key}'")));
            }
        }
        let temps = self
            .walls
            .face_temperature
            .values()
            .chain(self.walls.temperature.iter())
            .chain(std::iter::once(&self.initial.temperature));
        for t in temps {
            if !(*t > 0.0) {
                return Err(config_err(format!("temperatures must be positive, got {t}")));
            }
        }
        for (key, v) in [
            ("initial.temperature_gradient", &self.initial.temperature_gradient),
            ("initial.temperature_origin", &self.initial.temperature_origin),
            ("body.gravity", &self.body.gravity),
        ] {
            if let Some(v) = v {
                if v.len() != d {
                    return Err(config_err(format!("{key} must have {d} components")));
                }
            }
        }
        if let Some(l) = &self.laser {
            if !(l.radius > 0.0) || !(l.irradiance >= 0.0) {
                return Err(config_err("laser.radius must be positive and laser.irradiance non-negative"));
            }
            if l.direction.len() != d || vec3(&l.direction).norm() == 0.0 {
                return Err(config_err(format!("laser.direction must be a non-zero {d}-vector")));
            }
            if l.path.is_empty() || l.path.iter().any(|w| w.len() != d + 1) {
                return Err(config_err(format!(
                    "laser.path must list waypoints [t, x, y{}]",
                    if d == 3 { ", z" } else { "" }
                )));
            }
        }
        let n = &self.numerics;
        if n.zeta_lg < 0.0 || n.zeta_sl < 0.0 {
            return Err(config_err("zeta factors must be non-negative"));
        }
        if n.zeta_sl > 0.0 && n.zeta_sl_end_temperature.is_none() {
            return Err(config_err("numerics.zeta_sl_end_temperature is required when zeta_sl > 0"));
        }
        if let Some(h0) = n.zeta_lg_reference_h {
            if !(h0 > 0.0) {
                return Err(config_err("numerics.zeta_lg_reference_h must be positive"));
            }
        }
        if let Some([a, b]) = self.ramps.surface_tension {
            if !(b > a) {
                return Err(config_err("ramps.surface_tension must be [start, end] with end > start"));
            }
        }
        if let Some(i) = self.output.interval {
            if !(i > 0.0) {
                return Err(config_err("output.interval must be positive"));
            }
        }
        Ok(())
    }

    /// Refines or coarsens the lattice by `s`: dx scales by `s` and dt by
    /// `min(s, s^1.5)`, the stricter of the acoustic and capillary limits.
    /// zeta_0^lg keeps its reference spacing so it scales with h.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(config_err(format!("resolution scale must be positive, got {s}")));
        }
        let mut c = self.clone();
        if s == 1.0 {
            return Ok(c);
        }
        if c.numerics.zeta_lg_reference_h.is_none() {
            c.numerics.zeta_lg_reference_h = Some(c.numerics.dx);
        }
        c.numerics.dx *= s;
        c.numerics.dt *= s.min(s.powf(1.5));
        if let Some(d) = c.numerics.wetting_blend_distance.as_mut() {
            *d *= s;
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_factor() {
        let r = RampSpec {
            surface_tension: Some([0.0, 2.0]),
        };
        assert_eq!(r.surface_tension_factor(-1.0), 0.0);
        assert_eq!(r.surface_tension_factor(1.0), 0.5);
        assert_eq!(r.surface_tension_factor(3.0), 1.0);
        assert_eq!(RampSpec::default().surface_tension_factor(0.0), 1.0);
    }

    #[test]
    fn laser_path() {
        let l = LaserSpec {
            irradiance: 1.0,
            radius: 1.0,
            direction: vec![0.0, -2.0],
            path: vec![vec![0.0, 0.0, 0.0], vec![1.0, 2.0, 0.0]],
            on: vec![[0.0, 0.5]],
        };
        assert_eq!(l.center(0.5), Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(l.center(5.0), Vec3::new(2.0, 0.0, 0.0));
        assert_eq!(l.unit_direction(), Vec3::new(0.0, -1.0, 0.0));
        assert!(l.is_on(0.2) && !l.is_on(0.7));
    }
}
