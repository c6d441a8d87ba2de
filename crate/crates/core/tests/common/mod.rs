#![allow(dead_code)]

use meltsph::domain::{Material, ParticleSet, Phase, ScenarioConfig};
use meltsph::exec::Execution;
use meltsph::integrator::Simulation;
use meltsph::io::parse_scenario;
use meltsph::Vec3;

pub fn config(text: &str) -> ScenarioConfig {
    parse_scenario(text, "test.cfg").unwrap_or_else(|e| panic!("{e}"))
}

/// Fully periodic box `[0, n dx)^dim` with one material and every physics
/// switch listed in `physics` (others off).
pub fn periodic_box(dim: usize, n: usize, dx: f64, material: &str, physics: &[&str]) -> String {
    let l = n as f64 * dx;
    let v = |x: f64| vec![x; dim].iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
    let b = vec!["\"periodic\""; dim].join(", ");
    let mut sw = String::new();
    for k in [
        "pressure",
        "viscosity",
        "transport_velocity",
        "surface_tension",
        "marangoni",
        "wetting",
        "wetting_force",
        "recoil",
        "interface_viscosity",
        "conduction",
        "laser",
        "evaporation",
        "gravity",
        "phase_change",
    ] {
        sw += &format!("{k} = {}\n", physics.contains(&k));
    }
    format!(
        "[scenario]\nname = \"box\"\nend_time = 1.0\n\
         [domain]\nmin = [{}]\nmax = [{}]\nboundary = [{b}]\n\
         [numerics]\ndx = {dx:?}\ndt = 1e-4\n\
         {material}\n\
         [fill]\nphase = \"liquid\"\nmaterial = \"m\"\n\
         [initial]\ntemperature = 300.0\n\
         [physics]\n{sw}\
         [output]\nformat = \"none\"\n",
        v(0.0),
        v(l)
    )
}

pub const WATERLIKE: &str = "[[material]]\nname = \"m\"\ndensity = 1000.0\nviscosity = 1.0\nreference_pressure = 1.0e4\nheat_capacity = 1.0\nconductivity = 1.0\n";

pub fn simulation(cfg: ScenarioConfig) -> Simulation {
    Simulation::new(cfg, Execution::Sequential).unwrap_or_else(|e| panic!("{e}"))
}

pub fn with_particles(cfg: ScenarioConfig, p: ParticleSet) -> Simulation {
    Simulation::with_particles(cfg, p, Execution::Sequential).unwrap_or_else(|e| panic!("{e}"))
}

/// Lattice points `lo + (k + 0.5) dx` filling `[lo, hi)`.
pub fn lattice(dim: usize, lo: Vec3, hi: Vec3, dx: f64) -> Vec<Vec3> {
    let n: Vec<usize> = (0..3)
        .map(|a| if a < dim { ((hi[a] - lo[a]) / dx).round() as usize } else { 1 })
        .collect();
    let mut out = Vec::new();
    for k in 0..n[2] {
        for j in 0..n[1] {
            for i in 0..n[0] {
                let mut p = Vec3::new(i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5) * dx + lo;
                if dim < 3 {
                    p[2] = 0.0;
                }
                out.push(p);
            }
        }
    }
    out
}

pub fn particle_set(dim: usize, dx: f64, points: &[(Vec3, Phase, usize)], mats: &[Material], t: f64) -> ParticleSet {
    let mut p = ParticleSet::new(dim, dx);
    for (x, ph, m) in points {
        p.push(*x, *ph, *m, &mats[*m], t);
    }
    p
}
