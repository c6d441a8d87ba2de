//! Particle state, phases, materials and scenario description.

mod init;
mod material;
mod particles;
mod scenario;

pub use init::initialize_particles;
pub use material::{
    specific_enthalpy, surface_tension_coefficient, surface_tension_slope, Material,
};
pub use particles::{phase_update, ParticleSet};
pub use scenario::{
    BoundaryKind, FillSpec, InitialSpec, LaserSpec, NumericsSpec, OutputFormat, OutputSpec,
    PhysicsSwitches, RampSpec, RegionSpec, ScenarioConfig, ScenarioInfo, Shape, SlipMode,
    TwoSided, WallSpec, DomainSpec, BodySpec, ShapeKind, vec3,
};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Solid,
    Liquid,
    Gas,
    /// Fixed boundary particle; never moves or changes phase.
    Wall,
}

impl Phase {
    pub fn is_fluid(self) -> bool {
        matches!(self, Phase::Liquid | Phase::Gas)
    }

    /// Rigid particles that take extrapolated boundary states in the
    /// momentum equation.
    pub fn is_rigid(self) -> bool {
        matches!(self, Phase::Solid | Phase::Wall)
    }

    pub fn name(self) -> &'static str {
        match self {
            Phase::Solid => "solid",
            Phase::Liquid => "liquid",
            Phase::Gas => "gas",
            Phase::Wall => "wall",
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Phase::Solid => 0,
            Phase::Liquid => 1,
            Phase::Gas => 2,
            Phase::Wall => 3,
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "solid" => Some(Phase::Solid),
            "liquid" => Some(Phase::Liquid),
            "gas" => Some(Phase::Gas),
            "wall" => Some(Phase::Wall),
            _ => None,
        }
    }
}
