use super::scenario::{vec3, BoundaryKind, Shape};
use super::{ParticleSet, Phase, ScenarioConfig};
use crate::{Error, Result, Vec3};

/// Fills the domain with a regular lattice at cell centres and surrounds
/// every wall axis with `wall_layers` layers of boundary particles.
///
/// Each interior lattice point takes the phase of the single region that
/// contains it, or the fill when none does.
pub fn initialize_particles(config: &ScenarioConfig) -> Result<ParticleSet> {
    config.validate()?;
    let dim = config.dim();
    let dx = config.numerics.dx;
    let lo = vec3(&config.domain.min);
    let hi = vec3(&config.domain.max);
    let layers = config.domain.wall_layers as i64;

    let shapes = config
        .regions
        .iter()
        .map(|r| Ok((config.region_shape(r)?, r.phase, config.material_index(&r.material)?)))
        .collect::<Result<Vec<_>>>()?;
    let fill = match &config.fill {
        Some(f) => Some((f.phase, config.material_index(&f.material)?)),
        None => None,
    };
    let wall_material = match &config.walls.material {
        Some(name) if config.has_walls() => Some(config.material_index(name)?),
        _ => None,
    };

    let mut count = [1i64; 3];
    let mut range = [(0i64, 1i64); 3];
    for a in 0..dim {
        count[a] = ((hi[a] - lo[a]) / dx).round() as i64;
        let pad = if config.domain.boundary[a] == BoundaryKind::Wall { layers } else { 0 };
        range[a] = (-pad, count[a] + pad);
    }

    let mut set = ParticleSet::new(dim, dx);
    for k in range[2].0..range[2].1 {
        for j in range[1].0..range[1].1 {
            for i in range[0].0..range[0].1 {
                let idx = [i, j, k];
                let mut p = Vec3::zeros();
                for a in 0..dim {
                    p[a] = lo[a] + (idx[a] as f64 + 0.5) * dx;
                }
                let outside = (0..dim).find(|&a| idx[a] < 0 || idx[a] >= count[a]);
                if outside.is_some() {
                    // Only wall axes are padded, so this is a wall particle.
                    let m = wall_material.expect("wall axes require a wall material");
                    let t = wall_temperature(config, &idx, &count, dim).unwrap_or_else(|| config.initial_temperature(&p));
                    set.push(p, Phase::Wall, m, &config.materials[m], t);
                    continue;
                }
                let mut hit = None;
                for (r, (shape, _, _)) in shapes.iter().enumerate() {
                    if shape.contains(&p, dim) {
                        if let Some(prev) = hit {
                            return Err(Error::Config(format!(
                                "regions {} and {} overlap at {:?}",
                                label(config, prev),
                                label(config, r),
                                &p.as_slice()[..dim]
                            )));
                        }
                        hit = Some(r);
                    }
                }
                let (phase, m) = match (hit, fill) {
                    (Some(r), _) => (shapes[r].1, shapes[r].2),
                    (None, Some(f)) => f,
                    (None, None) => {
                        return Err(Error::Config(format!(
                            "lattice point {:?} is not covered by any region and no [fill] is given",
                            &p.as_slice()[..dim]
                        )))
                    }
                };
                set.push(p, phase, m, &config.materials[m], config.initial_temperature(&p));
            }
        }
    }
    Ok(set)
}

fn label(config: &ScenarioConfig, r: usize) -> String {
    config.regions[r].label.clone().unwrap_or_else(|| format!("#{r}"))
}

/// Prescribed temperature of the face a wall particle belongs to. Corner
/// particles take the first face found along x, y, z.
fn wall_temperature(config: &ScenarioConfig, idx: &[i64; 3], count: &[i64; 3], dim: usize) -> Option<f64> {
    (0..dim).find_map(|a| {
        if idx[a] < 0 {
            config.face_temperature(a, false)
        } else if idx[a] >= count[a] {
            config.face_temperature(a, true)
        } else {
            None
        }
    })
}

impl Shape {
    pub fn volume(&self, dim: usize) -> f64 {
        match self {
            Shape::Block { min, max } => (0..dim).map(|a| max[a] - min[a]).product(),
            Shape::Ellipsoid { semi_axes, .. } => {
                let prod: f64 = (0..dim).map(|a| semi_axes[a]).product();
                if dim == 2 {
                    std::f64::consts::PI * prod
                } else {
                    4.0 / 3.0 * std::f64::consts::PI * prod
                }
            }
        }
    }
}
