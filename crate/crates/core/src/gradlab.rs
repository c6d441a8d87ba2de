//! Comparison of gradient approximations on synthetic or snapshot clouds.
//!
//! The synthetic field is piecewise linear across a planar interface with a
//! jump in the normal gradient, as produced by a conductivity jump, and a
//! continuous tangential gradient. Errors are reported for the tangential
//! projection, split into interface band and interior, for full support and
//! for support truncated to the particle's own side.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::Phase;
use crate::kernel::{gradient_of, grad_corrected, tangential_projection, Correction, FieldSample, GradientVariant, KernelSpec};
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Constant,
    Linear,
    Kinked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradlabConfig {
    #[serde(default = "two")]
    pub dim: usize,
    #[serde(default = "one")]
    pub dx: f64,
    /// Lattice points per axis.
    #[serde(default = "default_cells")]
    pub cells: usize,
    #[serde(default = "default_field")]
    pub field: FieldKind,
    /// Constant added to the field.
    #[serde(default)]
    pub offset: f64,
    /// Normal gradient on the negative side of the interface.
    #[serde(default = "one")]
    pub normal_gradient: f64,
    #[serde(default = "one")]
    pub tangential_gradient: f64,
    /// k_- / k_+; the normal gradient on the positive side is scaled by it.
    #[serde(default = "two_f")]
    pub conductivity_ratio: f64,
    /// Angle of the interface normal from the y axis, degrees.
    #[serde(default)]
    pub tilt: f64,
    /// Random displacement of lattice points as a fraction of dx.
    #[serde(default)]
    pub jitter: f64,
    #[serde(default)]
    pub seed: u64,
    /// Half width of the interface band in units of h.
    #[serde(default = "three")]
    pub band: f64,
    /// Take positions, phases and temperatures from a CSV snapshot instead;
    /// the interface is the liquid-gas boundary.
    #[serde(default)]
    pub snapshot: Option<String>,
}

fn two() -> usize {
    2
}
fn two_f() -> f64 {
    2.0
}
fn three() -> f64 {
    3.0
}
fn one() -> f64 {
    1.0
}
fn default_cells() -> usize {
    40
}
fn default_field() -> FieldKind {
    FieldKind::Kinked
}

impl Default for GradlabConfig {
    fn default() -> Self {
        toml::from_str("").expect("all fields have defaults")
    }
}

impl GradlabConfig {
    pub fn normal(&self) -> Vec3 {
        let a = self.tilt.to_radians();
        Vec3::new(a.sin(), a.cos(), 0.0)
    }

    pub fn tangent(&self) -> Vec3 {
        let a = self.tilt.to_radians();
        Vec3::new(a.cos(), -a.sin(), 0.0)
    }

    /// Field value and exact gradient at `x`.
    pub fn field_at(&self, x: &Vec3) -> (f64, Vec3) {
        let n = self.normal();
        let t = self.tangent();
        let s = n.dot(x);
        let (gt, gn) = match self.field {
            FieldKind::Constant => (0.0, 0.0),
            FieldKind::Linear => (self.tangential_gradient, self.normal_gradient),
            FieldKind::Kinked => {
                let gn = if s < 0.0 {
                    self.normal_gradient
                } else {
                    self.normal_gradient * self.conductivity_ratio
                };
                (self.tangential_gradient, gn)
            }
        };
        (self.offset + gt * t.dot(x) + gn * s, gt * t + gn * n)
    }
}

/// A point cloud with field values, interface normal and side labels.
#[derive(Debug, Clone)]
pub struct Cloud {
    pub dim: usize,
    pub h: f64,
    pub samples: Vec<FieldSample>,
    /// Side of the interface (true = positive / liquid).
    pub side: Vec<bool>,
    pub normal: Vec<Vec3>,
    pub distance: Vec<f64>,
    /// Whether the kernel support lies inside the cloud.
    pub full_support: Vec<bool>,
    pub exact: Option<Vec<Vec3>>,
}

pub fn synthetic_cloud(cfg: &GradlabConfig) -> Result<Cloud> {
    if !(cfg.dim == 2 || cfg.dim == 3) || cfg.cells < 8 || !(cfg.dx > 0.0) {
        return Err(Error::Config("gradlab needs dim 2 or 3, cells >= 8 and dx > 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.cells;
    let half = 0.5 * (n as f64 - 1.0) * cfg.dx;
    let margin = half - 3.0 * cfg.dx;
    let nz = if cfg.dim == 3 { n } else { 1 };
    let vol = cfg.dx.powi(cfg.dim as i32);
    let normal = cfg.normal();
    let mut c = Cloud {
        dim: cfg.dim,
        h: cfg.dx,
        samples: Vec::new(),
        side: Vec::new(),
        normal: Vec::new(),
        distance: Vec::new(),
        full_support: Vec::new(),
        exact: Some(Vec::new()),
    };
    for k in 0..nz {
        for j in 0..n {
            for i in 0..n {
                let mut x = Vec3::new(i as f64 * cfg.dx - half, j as f64 * cfg.dx - half, 0.0);
                if cfg.dim == 3 {
                    x[2] = k as f64 * cfg.dx - half;
                }
                let inside = (0..cfg.dim).all(|a| x[a].abs() <= margin + 1e-9 * cfg.dx);
                if cfg.jitter > 0.0 {
                    for a in 0..cfg.dim {
                        x[a] += cfg.jitter * cfg.dx * rng.random_range(-0.5..0.5);
                    }
                }
                let (v, g) = cfg.field_at(&x);
                c.samples.push(FieldSample::new(v, x, vol, 1.0)?);
                c.side.push(normal.dot(&x) >= 0.0);
                c.normal.push(normal);
                c.distance.push(normal.dot(&x).abs());
                c.full_support.push(inside);
                if let Some(e) = c.exact.as_mut() {
                    e.push(g);
                }
            }
        }
    }
    Ok(c)
}

/// Cloud from a CSV snapshot: temperature is the field, the liquid-gas
/// interface splits the sides and normals come from the colour gradient.
pub fn snapshot_cloud(path: &Path, band: f64) -> Result<Cloud> {
    let rows = crate::io::read_csv(path)?;
    let dim = if rows.iter().any(|r| r.position[2] != 0.0) { 3 } else { 2 };
    let pts: Vec<Vec3> = rows.iter().map(|r| r.position).collect();
    let h = nearest_spacing(&pts);
    let kernel = KernelSpec::new(h, dim)?;
    let rc = kernel.support_radius();
    let samples = rows
        .iter()
        .map(|r| FieldSample::new(r.temperature, r.position, h.powi(dim as i32), r.density.max(f64::MIN_POSITIVE)))
        .collect::<Result<Vec<_>>>()?;
    let side: Vec<bool> = rows.iter().map(|r| r.phase == Phase::Liquid).collect();
    let lo = pts.iter().fold(Vec3::repeat(f64::INFINITY), |a, p| a.inf(p));
    let hi = pts.iter().fold(Vec3::repeat(f64::NEG_INFINITY), |a, p| a.sup(p));
    let mut normal = vec![Vec3::zeros(); rows.len()];
    let mut distance = vec![f64::INFINITY; rows.len()];
    let mut full = vec![false; rows.len()];
    for i in 0..rows.len() {
        let mut g = Vec3::zeros();
        for j in 0..rows.len() {
            let d = pts[i] - pts[j];
            let r = d.norm();
            if r > 0.0 && r < rc {
                if side[j] != side[i] {
                    distance[i] = distance[i].min(0.5 * r);
                }
                let c = if side[j] { 1.0 } else { 0.0 } - if side[i] { 1.0 } else { 0.0 };
                g += d * (kernel.dw(r) / r) * (c * h.powi(dim as i32));
            }
        }
        // Normal pointing from the liquid side towards the gas.
        let norm = g.norm();
        if norm > 0.0 {
            normal[i] = -g / norm;
        }
        full[i] = (0..dim).all(|a| pts[i][a] - lo[a] >= rc && hi[a] - pts[i][a] >= rc);
        if distance[i] > band * h {
            distance[i] = f64::INFINITY;
        }
    }
    Ok(Cloud {
        dim,
        h,
        samples,
        side,
        normal,
        distance,
        full_support: full,
        exact: None,
    })
}

fn nearest_spacing(pts: &[Vec3]) -> f64 {
    let n = pts.len().min(200);
    let mut best = f64::INFINITY;
    for i in 0..n {
        for (j, q) in pts.iter().enumerate() {
            if i != j {
                let r = (pts[i] - q).norm();
                if r > 0.0 {
                    best = best.min(r);
                }
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Support {
    /// All neighbours.
    Full,
    /// Neighbours on the particle's own side only.
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Band,
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Reference {
    Csph,
    Exact,
}

/// Tangential-gradient error of one variant.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorRow {
    pub variant: GradientVariant,
    pub support: Support,
    pub region: Region,
    pub reference: Reference,
    pub count: usize,
    pub l2_abs: f64,
    /// `sqrt(sum |e|^2 / sum |ref|^2)`; absolute when the reference vanishes.
    pub l2_rel: f64,
    pub linf_abs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GradlabReport {
    pub particles: usize,
    pub band_particles: usize,
    pub interior_particles: usize,
    pub rows: Vec<ErrorRow>,
    /// Largest `|CSPM - CSPH| / |CSPH|` over evaluated particles.
    pub cspm_csph_max_rel: f64,
    pub fallbacks: usize,
}

impl GradlabReport {
    pub fn find(&self, variant: GradientVariant, support: Support, region: Region, reference: Reference) -> Option<&ErrorRow> {
        self.rows
            .iter()
            .find(|r| r.variant == variant && r.support == support && r.region == region && r.reference == reference)
    }

    /// Plain-text table.
    pub fn table(&self) -> String {
        let mut s = format!(
            "particles {}  band {}  interior {}  cspm/csph max rel diff {:.3e}  fallbacks {}\n",
            self.particles, self.band_particles, self.interior_particles, self.cspm_csph_max_rel, self.fallbacks
        );
        s += &format!(
            "{:<11} {:<10} {:<9} {:<6} {:>6} {:>12} {:>12} {:>12}\n",
            "variant", "support", "region", "ref", "n", "L2 abs", "L2 rel", "Linf abs"
        );
        for r in &self.rows {
            s += &format!(
                "{:<11} {:<10} {:<9} {:<6} {:>6} {:>12.4e} {:>12.4e} {:>12.4e}\n",
                r.variant.name(),
                format!("{:?}", r.support).to_lowercase(),
                format!("{:?}", r.region).to_lowercase(),
                format!("{:?}", r.reference).to_lowercase(),
                r.count,
                r.l2_abs,
                r.l2_rel,
                r.linf_abs
            );
        }
        s
    }
}

/// Neighbour candidates of `i` for the given support mode.
fn neighbours(cloud: &Cloud, i: usize, rc: f64, support: Support) -> Vec<FieldSample> {
    let xi = cloud.samples[i].position;
    cloud
        .samples
        .iter()
        .enumerate()
        .filter(|(j, s)| {
            *j != i && (s.position - xi).norm() < rc && (support == Support::Full || cloud.side[*j] == cloud.side[i])
        })
        .map(|(_, s)| *s)
        .collect()
}

pub fn analyze(cloud: &Cloud, band: f64) -> Result<GradlabReport> {
    let kernel = KernelSpec::new(cloud.h, cloud.dim)?;
    let rc = kernel.support_radius();
    let eval: Vec<usize> = (0..cloud.samples.len())
        .filter(|&i| cloud.full_support[i] && cloud.normal[i] != Vec3::zeros())
        .collect();
    let region_of = |i: usize| {
        if cloud.distance[i] <= band * cloud.h {
            Region::Band
        } else {
            Region::Interior
        }
    };
    // grads[support][variant][k]
    let mut grads = vec![vec![Vec::with_capacity(eval.len()); GradientVariant::ALL.len()]; 2];
    let mut fallbacks = 0;
    let mut max_rel: f64 = 0.0;
    for &i in &eval {
        for (si, support) in [Support::Full, Support::Truncated].into_iter().enumerate() {
            let nb = neighbours(cloud, i, rc, support);
            for (vi, v) in GradientVariant::ALL.into_iter().enumerate() {
                let g = gradient_of(v, &cloud.samples[i], &nb, &kernel);
                if g.fell_back {
                    fallbacks += 1;
                }
                grads[si][vi].push(tangential_projection(&g.vector, &cloud.normal[i])?);
            }
            let a = grad_corrected(&cloud.samples[i], &nb, &kernel, Correction::Cspm).vector;
            let b = grad_corrected(&cloud.samples[i], &nb, &kernel, Correction::Csph).vector;
            let scale = b.norm().max(a.norm());
            if scale > 0.0 {
                max_rel = max_rel.max((a - b).norm() / scale);
            }
        }
    }
    let csph = GradientVariant::ALL.iter().position(|v| *v == GradientVariant::Csph).unwrap_or(4);
    let exact: Option<Vec<Vec3>> = cloud.exact.as_ref().map(|e| {
        eval.iter()
            .map(|&i| tangential_projection(&e[i], &cloud.normal[i]).unwrap_or_else(|_| Vec3::zeros()))
            .collect()
    });
    let mut rows = Vec::new();
    for (si, support) in [Support::Full, Support::Truncated].into_iter().enumerate() {
        for region in [Region::Band, Region::Interior] {
            let ks: Vec<usize> = (0..eval.len()).filter(|&k| region_of(eval[k]) == region).collect();
            if ks.is_empty() {
                continue;
            }
            for (vi, v) in GradientVariant::ALL.into_iter().enumerate() {
                let refs: [(Reference, Option<&Vec<Vec3>>); 2] =
                    [(Reference::Csph, Some(&grads[0][csph])), (Reference::Exact, exact.as_ref())];
                for (rk, reference) in refs {
                    let Some(reference) = reference else { continue };
                    let (mut e2, mut r2, mut einf) = (0.0, 0.0, 0.0f64);
                    for &k in &ks {
                        let e = (grads[si][vi][k] - reference[k]).norm();
                        e2 += e * e;
                        r2 += reference[k].norm_squared();
                        einf = einf.max(e);
                    }
                    let n = ks.len() as f64;
                    rows.push(ErrorRow {
                        variant: v,
                        support,
                        region,
                        reference: rk,
                        count: ks.len(),
                        l2_abs: (e2 / n).sqrt(),
                        l2_rel: if r2 > 0.0 { (e2 / r2).sqrt() } else { (e2 / n).sqrt() },
                        linf_abs: einf,
                    });
                }
            }
        }
    }
    Ok(GradlabReport {
        particles: cloud.samples.len(),
        band_particles: eval.iter().filter(|&&i| region_of(i) == Region::Band).count(),
        interior_particles: eval.iter().filter(|&&i| region_of(i) == Region::Interior).count(),
        rows,
        cspm_csph_max_rel: max_rel,
        fallbacks,
    })
}

pub fn run_gradlab(cfg: &GradlabConfig) -> Result<GradlabReport> {
    let cloud = match &cfg.snapshot {
        Some(p) => snapshot_cloud(Path::new(p), cfg.band)?,
        None => synthetic_cloud(cfg)?,
    };
    analyze(&cloud, cfg.band)
}

pub fn load_gradlab(path: impl AsRef<Path>) -> Result<GradlabConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Largest relative CSPM/CSPH difference on a jittered random cloud with a
/// random smooth field.
pub fn cspm_csph_random_cloud(seed: u64, dim: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1.0;
    let kernel = KernelSpec::new(h, dim)?;
    let n = 9i32;
    let a: [f64; 6] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
    let f = |x: &Vec3| a[0] + a[1] * x[0] + a[2] * x[1] + a[3] * (x[0] * x[1]).sin() + a[4] * x[2] + a[5] * x.norm_squared();
    let mut pts = Vec::new();
    let nz = if dim == 3 { n } else { 0 };
    for k in -nz..=nz {
        for j in -n..=n {
            for i in -n..=n {
                let mut x = Vec3::new(i as f64, j as f64, k as f64) * h;
                for d in 0..dim {
                    x[d] += rng.random_range(-0.3..0.3) * h;
                }
                let vol = h.powi(dim as i32) * rng.random_range(0.8..1.2);
                pts.push(FieldSample::new(f(&x), x, vol, 1.0)?);
            }
        }
    }
    let rc = kernel.support_radius();
    let mut worst: f64 = 0.0;
    for c in pts.iter().filter(|s| (0..dim).all(|d| s.position[d].abs() < (n as f64 - 3.5) * h)) {
        let nb: Vec<FieldSample> = pts
            .iter()
            .filter(|s| {
                let r = (s.position - c.position).norm();
                r > 0.0 && r < rc
            })
            .copied()
            .collect();
        let a = grad_corrected(c, &nb, &kernel, Correction::Cspm).vector;
        let b = grad_corrected(c, &nb, &kernel, Correction::Csph).vector;
        let s = a.norm().max(b.norm());
        if s > 0.0 {
            worst = worst.max((a - b).norm() / s);
        }
    }
    Ok(worst)
}
