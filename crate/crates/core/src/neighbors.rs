//! Uniform-grid cell lists with periodic minimum-image queries.

use crate::diagnostics::Counters;
use crate::exec::Execution;
use crate::kernel::KernelSpec;
use crate::{Error, Result, Vec3};

/// Axis-aligned box. Unused dimensions have `min == max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min: Vec3,
    pub max: Vec3,
}

impl Bounds {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Self { min, max }
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|a| p[a] >= self.min[a] && p[a] <= self.max[a])
    }
}

/// One neighbour entry: `j`, the minimum-image offset `r_i - r_j` and its
/// length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub j: usize,
    pub offset: Vec3,
    pub r: f64,
}

#[derive(Debug, Clone)]
pub struct NeighborIndex {
    bounds: Bounds,
    periodic: [bool; 3],
    cutoff: f64,
    dims: [usize; 3],
    cell_size: Vec3,
    /// CSR layout: particles of cell `c` are `items[start[c]..start[c + 1]]`.
    start: Vec<u32>,
    items: Vec<u32>,
    positions: Vec<Vec3>,
}

/// Shortest periodic image of `d` along periodic axes.
#[inline]
pub fn minimum_image(mut d: Vec3, extent: &Vec3, periodic: &[bool; 3]) -> Vec3 {
    for a in 0..3 {
        if periodic[a] && extent[a] > 0.0 {
            d[a] -= extent[a] * (d[a] / extent[a]).round();
        }
    }
    d
}

impl NeighborIndex {
    /// Buckets `positions` into cells no smaller than `cutoff`.
    pub fn build(positions: &[Vec3], cutoff: f64, bounds: Bounds, periodic: [bool; 3]) -> Result<Self> {
        if !(cutoff > 0.0) {
            return Err(Error::Domain(format!("cutoff must be positive, got {cutoff}")));
        }
        let extent = bounds.extent();
        let mut dims = [1usize; 3];
        let mut cell_size = Vec3::zeros();
        for a in 0..3 {
            if extent[a] > 0.0 {
                dims[a] = ((extent[a] / cutoff).floor() as usize).max(1);
                cell_size[a] = extent[a] / dims[a] as f64;
            } else {
                cell_size[a] = 1.0;
            }
        }
        let mut index = Self {
            bounds,
            periodic,
            cutoff,
            dims,
            cell_size,
            start: Vec::new(),
            items: Vec::new(),
            positions: positions.to_vec(),
        };
        let ncells = dims[0] * dims[1] * dims[2];
        let mut cell_of = Vec::with_capacity(positions.len());
        for (i, p) in positions.iter().enumerate() {
            let c = index.cell_coords(p).ok_or(Error::OutsideDomain {
                index: i,
                position: [p.x, p.y, p.z],
            })?;
            cell_of.push(index.flat(c));
        }
        let mut start = vec![0u32; ncells + 1];
        for &c in &cell_of {
            start[c + 1] += 1;
        }
        for c in 0..ncells {
            start[c + 1] += start[c];
        }
        let mut fill = start.clone();
        let mut items = vec![0u32; positions.len()];
        for (i, &c) in cell_of.iter().enumerate() {
            items[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        index.start = start;
        index.items = items;
        Ok(index)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn periodic(&self) -> [bool; 3] {
        self.periodic
    }

    fn cell_coords(&self, p: &Vec3) -> Option<[usize; 3]> {
        let mut c = [0usize; 3];
        for a in 0..3 {
            let len = self.bounds.max[a] - self.bounds.min[a];
            let mut x = p[a] - self.bounds.min[a];
            if self.periodic[a] && len > 0.0 {
                x = x.rem_euclid(len);
            } else if !(x >= 0.0 && x <= len) {
                return None;
            }
            let k = (x / self.cell_size[a]).floor() as usize;
            c[a] = k.min(self.dims[a] - 1);
        }
        Some(c)
    }

    #[inline]
    fn flat(&self, c: [usize; 3]) -> usize {
        (c[2] * self.dims[1] + c[1]) * self.dims[0] + c[0]
    }

    /// Cells overlapping the support of a particle in cell `c`, each listed
    /// once even when a periodic axis has fewer than three cells.
    fn stencil(&self, c: [usize; 3]) -> ([usize; 27], usize) {
        let mut out = [0usize; 27];
        let mut n = 0;
        let mut axis: [[usize; 3]; 3] = [[0; 3]; 3];
        let mut counts = [0usize; 3];
        for a in 0..3 {
            let d = self.dims[a] as i64;
            for off in -1i64..=1 {
                let k = c[a] as i64 + off;
                let k = if self.periodic[a] {
                    k.rem_euclid(d)
                } else if k < 0 || k >= d {
                    continue;
                } else {
                    k
                } as usize;
                if !axis[a][..counts[a]].contains(&k) {
                    axis[a][counts[a]] = k;
                    counts[a] += 1;
                }
            }
        }
        for &z in &axis[2][..counts[2]] {
            for &y in &axis[1][..counts[1]] {
                for &x in &axis[0][..counts[0]] {
                    out[n] = self.flat([x, y, z]);
                    n += 1;
                }
            }
        }
        (out, n)
    }

    /// Calls `f(j, offset, r)` for every neighbour of `i` within the cutoff,
    /// `i` excluded, in deterministic order.
    #[inline]
    pub fn for_each_neighbor(&self, i: usize, mut f: impl FnMut(usize, Vec3, f64)) {
        let pi = self.positions[i];
        let Some(c) = self.cell_coords(&pi) else { return };
        let (cells, n) = self.stencil(c);
        let extent = self.bounds.extent();
        let any_periodic = self.periodic.iter().any(|&p| p);
        let rc2 = self.cutoff * self.cutoff;
        for &cell in &cells[..n] {
            let (s, e) = (self.start[cell] as usize, self.start[cell + 1] as usize);
            for &j in &self.items[s..e] {
                let j = j as usize;
                if j == i {
                    continue;
                }
                let mut d = pi - self.positions[j];
                if any_periodic {
                    d = minimum_image(d, &extent, &self.periodic);
                }
                let r2 = d.norm_squared();
                if r2 < rc2 {
                    f(j, d, r2.sqrt());
                }
            }
        }
    }

    pub fn neighbors_of(&self, i: usize) -> Result<Vec<Neighbor>> {
        if i >= self.len() {
            return Err(Error::InvalidParticle(i));
        }
        let mut out = Vec::new();
        self.for_each_neighbor(i, |j, offset, r| out.push(Neighbor { j, offset, r }));
        Ok(out)
    }
}

/// O(N^2) reference search used by tests and small tools.
pub fn brute_force_neighbors(
    positions: &[Vec3],
    cutoff: f64,
    bounds: &Bounds,
    periodic: [bool; 3],
) -> Vec<Vec<Neighbor>> {
    let extent = bounds.extent();
    (0..positions.len())
        .map(|i| {
            (0..positions.len())
                .filter(|&j| j != i)
                .filter_map(|j| {
                    let d = minimum_image(positions[i] - positions[j], &extent, &periodic);
                    let r = d.norm();
                    (r < cutoff).then_some(Neighbor { j, offset: d, r })
                })
                .collect()
        })
        .collect()
}

/// Pair entry with kernel data evaluated once per step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair {
    pub j: u32,
    pub r: f64,
    /// Unit vector `(r_i - r_j)/r`; zero for coincident particles.
    pub e: Vec3,
    pub w: f64,
    pub dw: f64,
    /// `dW/dr / r`; zero for coincident particles.
    pub dw_r: f64,
}

impl Pair {
    /// Kernel gradient with respect to `r_i`.
    #[inline]
    pub fn grad_w(&self) -> Vec3 {
        self.e * self.dw
    }

    /// `r_i - r_j` including the periodic image shift.
    #[inline]
    pub fn offset(&self) -> Vec3 {
        self.e * self.r
    }

    #[inline]
    pub fn coincident(&self) -> bool {
        self.r == 0.0
    }
}

/// Flattened per-particle neighbour lists with kernel values.
#[derive(Debug, Clone, Default)]
pub struct NeighborList {
    start: Vec<usize>,
    pairs: Vec<Pair>,
    coincident: u64,
}

impl NeighborList {
    pub fn build(index: &NeighborIndex, kernel: &KernelSpec, exec: Execution, counters: &Counters) -> Self {
        let per: Vec<Vec<Pair>> = exec.map(index.len(), |i| {
            let mut v = Vec::with_capacity(64);
            index.for_each_neighbor(i, |j, d, r| {
                let (e, dw, dw_r) = if r > 0.0 {
                    let dw = kernel.dw(r);
                    (d / r, dw, dw / r)
                } else {
                    (Vec3::zeros(), 0.0, 0.0)
                };
                v.push(Pair {
                    j: j as u32,
                    r,
                    e,
                    w: kernel.w(r),
                    dw,
                    dw_r,
                });
            });
            v
        });
        let total: usize = per.iter().map(Vec::len).sum();
        let mut start = Vec::with_capacity(per.len() + 1);
        let mut pairs = Vec::with_capacity(total);
        start.push(0);
        for v in per {
            pairs.extend_from_slice(&v);
            start.push(pairs.len());
        }
        let coincident = pairs.iter().filter(|p| p.coincident()).count() as u64 / 2;
        if coincident > 0 {
            counters
                .coincident_pairs
                .fetch_add(coincident, std::sync::atomic::Ordering::Relaxed);
        }
        Self {
            start,
            pairs,
            coincident,
        }
    }

    #[inline]
    pub fn of(&self, i: usize) -> &[Pair] {
        &self.pairs[self.start[i]..self.start[i + 1]]
    }

    pub fn len(&self) -> usize {
        self.start.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total_pairs(&self) -> usize {
        self.pairs.len()
    }

    pub fn coincident_pairs(&self) -> u64 {
        self.coincident
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box() -> Bounds {
        Bounds::new(Vec3::zeros(), Vec3::new(1.0, 1.0, 0.0))
    }

    #[test]
    fn two_particles() {
        let rc = 0.2;
        let near = [Vec3::new(0.5, 0.5, 0.0), Vec3::new(0.6, 0.5, 0.0)];
        let idx = NeighborIndex::build(&near, rc, unit_box(), [false; 3]).unwrap();
        assert_eq!(idx.neighbors_of(0).unwrap().len(), 1);
        let far = [Vec3::new(0.2, 0.5, 0.0), Vec3::new(0.5, 0.5, 0.0)];
        let idx = NeighborIndex::build(&far, rc, unit_box(), [false; 3]).unwrap();
        assert!(idx.neighbors_of(0).unwrap().is_empty());
        assert!(idx.neighbors_of(2).is_err());
    }

    #[test]
    fn periodic_image() {
        let rc = 0.2;
        let p = [Vec3::new(0.02, 0.5, 0.0), Vec3::new(0.98, 0.5, 0.0)];
        let idx = NeighborIndex::build(&p, rc, unit_box(), [true, false, false]).unwrap();
        let n = idx.neighbors_of(0).unwrap();
        assert_eq!(n.len(), 1);
        assert!((n[0].offset.x - 0.04).abs() < 1e-12);
        assert!((n[0].r - 0.04).abs() < 1e-12);
    }

    #[test]
    fn outside_is_an_error() {
        let p = [Vec3::new(1.5, 0.5, 0.0)];
        match NeighborIndex::build(&p, 0.2, unit_box(), [false; 3]) {
            Err(Error::OutsideDomain { index, .. }) => assert_eq!(index, 0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lattice_stencil_count() {
        let h = 0.1;
        let n = 20;
        let p: Vec<_> = (0..n * n)
            .map(|k| Vec3::new(((k % n) as f64 + 0.5) * h, ((k / n) as f64 + 0.5) * h, 0.0))
            .collect();
        let b = Bounds::new(Vec3::zeros(), Vec3::new(n as f64 * h, n as f64 * h, 0.0));
        let idx = NeighborIndex::build(&p, 3.0 * h * (1.0 - 1e-12), b, [false; 3]).unwrap();
        let mut expect = 0;
        for i in -3i32..=3 {
            for j in -3i32..=3 {
                if (i, j) != (0, 0) && ((i * i + j * j) as f64) < 9.0 {
                    expect += 1;
                }
            }
        }
        assert_eq!(expect, 24);
        assert_eq!(idx.neighbors_of(10 * n + 10).unwrap().len(), expect);
    }
}
