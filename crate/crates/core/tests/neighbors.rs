use meltsph::neighbors::{brute_force_neighbors, Bounds, NeighborIndex};
use meltsph::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pair_set(lists: Vec<Vec<(usize, Vec3)>>) -> Vec<Vec<(usize, [i64; 3])>> {
    lists
        .into_iter()
        .map(|l| {
            let mut v: Vec<_> = l
                .into_iter()
                .map(|(j, d)| (j, [(d.x * 1e9).round() as i64, (d.y * 1e9).round() as i64, (d.z * 1e9).round() as i64]))
                .collect();
            v.sort();
            v
        })
        .collect()
}

#[test]
fn matches_brute_force_on_random_clouds() {
    for seed in 0..120u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = if seed % 3 == 0 { 3 } else { 2 };
        let ext = Vec3::new(5.0, 4.0, if dim == 3 { 3.0 } else { 0.0 });
        let bounds = Bounds::new(Vec3::zeros(), Vec3::new(5.0, 4.0, if dim == 3 { 3.0 } else { 1.0 }));
        let periodic = match seed % 4 {
            0 => [false; 3],
            1 => [true, false, false],
            2 => [true, true, dim == 3],
            _ => [false, true, false],
        };
        let n = 200;
        let pts: Vec<Vec3> = (0..n)
            .map(|_| Vec3::new(rng.random_range(0.0..ext.x), rng.random_range(0.0..ext.y), if dim == 3 { rng.random_range(0.0..ext.z) } else { 0.0 }))
            .collect();
        let rc = rng.random_range(0.3..1.4);
        let idx = NeighborIndex::build(&pts, rc, bounds, periodic).unwrap();
        let fast: Vec<Vec<(usize, Vec3)>> = (0..n)
            .map(|i| idx.neighbors_of(i).unwrap().into_iter().map(|q| (q.j, q.offset)).collect())
            .collect();
        let slow: Vec<Vec<(usize, Vec3)>> = brute_force_neighbors(&pts, rc, &bounds, periodic)
            .into_iter()
            .map(|l| l.into_iter().map(|q| (q.j, q.offset)).collect())
            .collect();
        assert_eq!(pair_set(fast), pair_set(slow), "seed {seed}");
    }
}

#[test]
fn isolated_particle_and_invalid_id() {
    let b = Bounds::new(Vec3::zeros(), Vec3::new(10.0, 10.0, 1.0));
    let idx = NeighborIndex::build(&[Vec3::new(1.0, 1.0, 0.0), Vec3::new(8.0, 8.0, 0.0)], 1.0, b, [false; 3]).unwrap();
    assert!(idx.neighbors_of(0).unwrap().is_empty());
    assert!(idx.neighbors_of(2).is_err());
}

#[test]
fn seam_pair_has_image_offset() {
    let b = Bounds::new(Vec3::zeros(), Vec3::new(10.0, 10.0, 1.0));
    let pts = [Vec3::new(0.1, 5.0, 0.0), Vec3::new(9.9, 5.0, 0.0)];
    let idx = NeighborIndex::build(&pts, 1.0, b, [true, false, false]).unwrap();
    let q = idx.neighbors_of(0).unwrap();
    assert_eq!(q.len(), 1);
    assert!((q[0].offset - Vec3::new(0.2, 0.0, 0.0)).norm() < 1e-12);
}

#[test]
fn outside_nonperiodic_domain_names_particle() {
    let b = Bounds::new(Vec3::zeros(), Vec3::new(1.0, 1.0, 1.0));
    let e = NeighborIndex::build(&[Vec3::new(0.5, 0.5, 0.0), Vec3::new(1.5, 0.5, 0.0)], 0.3, b, [false; 3]).unwrap_err();
    assert!(e.to_string().contains('1'), "{e}");
}
