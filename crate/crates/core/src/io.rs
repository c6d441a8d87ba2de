//! Scenario loading, manifests and particle snapshots.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::domain::{ParticleSet, Phase, ScenarioConfig};
use crate::integrator::Simulation;
use crate::{Error, Result, Vec3};

const REQUIRED: [&str; 5] = ["scenario", "domain", "numerics", "material", "initial"];

/// Parses and validates scenario text. `origin` names the source in errors.
pub fn parse_scenario(text: &str, origin: &str) -> Result<ScenarioConfig> {
    let parse = |message: String| Error::Parse {
        path: origin.to_string(),
        message,
    };
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| parse(e.to_string()))?;
    let missing: Vec<&str> = REQUIRED.iter().copied().filter(|k| !table.contains_key(*k)).collect();
    if !missing.is_empty() {
        return Err(parse(format!(
            "missing required sections: {}",
            missing.iter().map(|k| format!("[{k}]")).collect::<Vec<_>>().join(", ")
        )));
    }
    let config: ScenarioConfig = toml::from_str(text).map_err(|e| parse(e.to_string()))?;
    config.validate().map_err(|e| parse(e.to_string()))?;
    Ok(config)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scenario(&text, &path.display().to_string())
}

/// Writes the fully resolved configuration, defaults included.
pub fn write_manifest(config: &ScenarioConfig, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = toml::to_string_pretty(config).map_err(|e| Error::Config(format!("cannot serialise manifest: {e}")))?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Per-particle data written to a snapshot.
#[derive(Debug, Clone, Copy)]
pub struct Snapshot<'a> {
    pub particles: &'a ParticleSet,
    pub delta_lg: &'a [f64],
    pub curvature: &'a [f64],
    pub time: f64,
}

impl<'a> Snapshot<'a> {
    pub fn of(sim: &'a Simulation) -> Self {
        Self {
            particles: &sim.particles,
            delta_lg: &sim.fields.lg.delta,
            curvature: &sim.fields.curvature,
            time: sim.time,
        }
    }

    fn delta(&self, i: usize) -> f64 {
        self.delta_lg.get(i).copied().unwrap_or(0.0)
    }

    fn kappa(&self, i: usize) -> f64 {
        self.curvature.get(i).copied().unwrap_or(0.0)
    }
}

const AXES: [&str; 3] = ["x", "y", "z"];
const VEL: [&str; 3] = ["u", "v", "w"];

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    fs::File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

/// Shortest form that parses back to the same double: 17 significant digits.
#[inline]
fn num(out: &mut String, v: f64) {
    let _ = write!(out, "{v:.16e}");
}

pub fn csv_header(dim: usize) -> String {
    let mut cols = vec!["id".to_string(), "phase".to_string()];
    cols.extend(AXES[..dim].iter().map(|s| s.to_string()));
    cols.extend(VEL[..dim].iter().map(|s| s.to_string()));
    cols.extend(["rho", "p", "T", "delta_lg", "kappa"].map(String::from));
    cols.join(",")
}

pub fn write_csv(snap: &Snapshot, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let p = snap.particles;
    let d = p.dim;
    let mut w = create(path)?;
    let mut line = String::with_capacity(256);
    let io = |e| Error::io(path, e);
    writeln!(w, "{}", csv_header(d)).map_err(io)?;
    for i in 0..p.len() {
        line.clear();
        let _ = write!(line, "{},{}", i, p.phase[i].name());
        for v in p.position[i].iter().take(d).chain(p.velocity[i].iter().take(d)) {
            line.push(',');
            num(&mut line, *v);
        }
        for v in [p.density[i], p.pressure[i], p.temperature[i], snap.delta(i), snap.kappa(i)] {
            line.push(',');
            num(&mut line, v);
        }
        writeln!(w, "{line}").map_err(io)?;
    }
    w.flush().map_err(io)
}

/// One CSV row read back.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub id: usize,
    pub phase: Phase,
    pub position: Vec3,
    pub velocity: Vec3,
    pub density: f64,
    pub pressure: f64,
    pub temperature: f64,
    pub delta_lg: f64,
    pub curvature: f64,
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<CsvRow>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let origin = path.display().to_string();
    let err = |line: usize, msg: String| Error::Parse {
        path: origin.clone(),
        message: format!("line {line}: {msg}"),
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let dim = match header.split(',').count() {
        11 => 2,
        13 => 3,
        n => return Err(err(1, format!("unexpected column count {n}"))),
    };
    let mut rows = Vec::new();
    for (k, l) in lines.enumerate() {
        let ln = k + 2;
        let f: Vec<&str> = l.split(',').collect();
        if f.len() != 7 + 2 * dim {
            return Err(err(ln, format!("expected {} fields, found {}", 7 + 2 * dim, f.len())));
        }
        let x = |s: &str| s.parse::<f64>().map_err(|e| err(ln, format!("{s}: {e}")));
        let mut pos = Vec3::zeros();
        let mut vel = Vec3::zeros();
        for a in 0..dim {
            pos[a] = x(f[2 + a])?;
            vel[a] = x(f[2 + dim + a])?;
        }
        let o = 2 + 2 * dim;
        rows.push(CsvRow {
            id: f[0].parse().map_err(|e| err(ln, format!("id: {e}")))?,
            phase: Phase::from_name(f[1]).ok_or_else(|| err(ln, format!("unknown phase {}", f[1])))?,
            position: pos,
            velocity: vel,
            density: x(f[o])?,
            pressure: x(f[o + 1])?,
            temperature: x(f[o + 2])?,
            delta_lg: x(f[o + 3])?,
            curvature: x(f[o + 4])?,
        });
    }
    Ok(rows)
}

/// Legacy ASCII VTK polydata with one vertex per particle.
pub fn write_vtk(snap: &Snapshot, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let p = snap.particles;
    let n = p.len();
    let mut s = String::with_capacity(n * 200);
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "meltsph particles t={:.16e}", snap.time);
    let _ = writeln!(s, "ASCII\nDATASET POLYDATA\nPOINTS {n} double");
    for x in &p.position {
        let _ = writeln!(s, "{:.16e} {:.16e} {:.16e}", x[0], x[1], x[2]);
    }
    let _ = writeln!(s, "VERTICES {n} {}", 2 * n);
    for i in 0..n {
        let _ = writeln!(s, "1 {i}");
    }
    let _ = writeln!(s, "POINT_DATA {n}");
    let _ = writeln!(s, "SCALARS id int 1\nLOOKUP_TABLE default");
    for i in 0..n {
        let _ = writeln!(s, "{i}");
    }
    let _ = writeln!(s, "SCALARS phase int 1\nLOOKUP_TABLE default");
    for ph in &p.phase {
        let _ = writeln!(s, "{}", ph.code());
    }
    let _ = writeln!(s, "VECTORS velocity double");
    for u in &p.velocity {
        let _ = writeln!(s, "{:.16e} {:.16e} {:.16e}", u[0], u[1], u[2]);
    }
    let scalars: [(&str, Box<dyn Fn(usize) -> f64 + '_>); 5] = [
        ("rho", Box::new(|i| p.density[i])),
        ("p", Box::new(|i| p.pressure[i])),
        ("T", Box::new(|i| p.temperature[i])),
        ("delta_lg", Box::new(|i| snap.delta(i))),
        ("kappa", Box::new(|i| snap.kappa(i))),
    ];
    for (name, f) in scalars {
        let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for i in 0..n {
            let _ = writeln!(s, "{:.16e}", f(i));
        }
    }
    fs::write(path, s).map_err(|e| Error::io(path, e))
}

/// Appends a JSON line.
pub fn append_json<T: serde::Serialize>(w: &mut impl Write, value: &T) -> std::io::Result<()> {
    serde_json::to_writer(&mut *w, value)?;
    w.write_all(b"\n")
}
