mod common;

use approx::assert_relative_eq;
use meltsph::bench::scenario;
use meltsph::domain::{initialize_particles, phase_update, surface_tension_coefficient, Material, ParticleSet, Phase};
use meltsph::io::parse_scenario;
use meltsph::Vec3;

#[test]
fn static_droplet_lattice_counts() {
    let cfg = scenario("static_droplet").unwrap();
    let p = initialize_particles(&cfg).unwrap();
    let fluid = p.count(Phase::Liquid) + p.count(Phase::Gas);
    assert_eq!(fluid, 4096);
    assert_eq!(p.count(Phase::Liquid), 812);
    assert_eq!(p.count(Phase::Gas), 3284);
    // Three wall layers above and below, periodic in x.
    assert_eq!(p.count(Phase::Wall), 2 * 3 * 64);
    let mats = &cfg.materials;
    for i in 0..p.len() {
        let m = &mats[p.material[i]];
        assert_eq!(p.mass[i], m.density * 0.09 * 0.09);
        assert_eq!(p.velocity[i], Vec3::zeros());
        assert_eq!(p.temperature[i], 290.0);
    }
}

#[test]
fn gas_unit_square() {
    let text = "[scenario]\nname = \"sq\"\nend_time = 1.0\n\
        [domain]\nmin = [0.0, 0.0]\nmax = [1.0, 1.0]\nboundary = [\"periodic\", \"periodic\"]\n\
        [numerics]\ndx = 0.5\ndt = 1e-3\n\
        [[material]]\nname = \"air\"\ndensity = 1.2\nviscosity = 1e-5\nreference_pressure = 100.0\nheat_capacity = 1000.0\nconductivity = 0.02\n\
        [fill]\nphase = \"gas\"\nmaterial = \"air\"\n\
        [initial]\ntemperature = 300.0\n";
    let p = initialize_particles(&parse_scenario(text, "sq").unwrap()).unwrap();
    assert_eq!(p.len(), 4);
    for i in 0..4 {
        assert_eq!(p.phase[i], Phase::Gas);
        assert_eq!(p.mass[i], 1.2 * 0.25);
        assert_eq!(p.density[i], 1.2);
    }
}

#[test]
fn overlapping_regions_are_rejected() {
    let text = "[scenario]\nname = \"ov\"\nend_time = 1.0\n\
        [domain]\nmin = [0.0, 0.0]\nmax = [1.0, 1.0]\nboundary = [\"periodic\", \"periodic\"]\n\
        [numerics]\ndx = 0.1\ndt = 1e-3\n\
        [[material]]\nname = \"a\"\ndensity = 1.0\nviscosity = 1.0\nreference_pressure = 1.0\nheat_capacity = 1.0\nconductivity = 1.0\n\
        [[region]]\nlabel = \"left\"\nphase = \"liquid\"\nmaterial = \"a\"\nshape = \"block\"\nmin = [0.0, 0.0]\nmax = [0.6, 1.0]\n\
        [[region]]\nlabel = \"right\"\nphase = \"gas\"\nmaterial = \"a\"\nshape = \"block\"\nmin = [0.4, 0.0]\nmax = [1.0, 1.0]\n\
        [initial]\ntemperature = 300.0\n";
    let e = parse_scenario(text, "ov")
        .and_then(|c| initialize_particles(&c))
        .unwrap_err()
        .to_string();
    assert!(e.contains("left") && e.contains("right"), "{e}");
}

#[test]
fn surface_tension_table_values() {
    let m = Material::steel();
    assert_eq!(surface_tension_coefficient(1700.0, &m), 1.8);
    assert_relative_eq!(surface_tension_coefficient(2700.0, &m), 0.8, max_relative = 1e-12);
    assert_relative_eq!(surface_tension_coefficient(1e4, &m), 0.18, max_relative = 1e-12);
}

#[test]
fn phase_transitions() {
    let m = Material::steel();
    let mut p = ParticleSet::new(2, 1e-6);
    p.push(Vec3::zeros(), Phase::Solid, 0, &m, 1701.0);
    p.push(Vec3::x(), Phase::Liquid, 0, &m, 1699.0);
    p.push(Vec3::y(), Phase::Gas, 0, &m, 1.0);
    p.push(Vec3::y(), Phase::Gas, 0, &m, 1e5);
    p.velocity[1] = Vec3::new(3.0, 0.0, 0.0);
    p.transport_velocity[1] = Vec3::new(3.0, 0.0, 0.0);
    let mats = [m];
    phase_update(&mut p, &mats);
    assert_eq!(p.phase, vec![Phase::Liquid, Phase::Solid, Phase::Gas, Phase::Gas]);
    assert_eq!(p.velocity[1], Vec3::zeros());
    assert_eq!(p.transport_velocity[1], Vec3::zeros());
}

#[test]
fn melt_and_resolidify_keeps_mass_and_material() {
    let m = Material::steel();
    let mut p = ParticleSet::new(2, 1e-6);
    p.push(Vec3::zeros(), Phase::Solid, 1, &m, 1800.0);
    let mats = [Material::simple("other", 1.0, 1.0, 1.0), m];
    let (mass, mat) = (p.mass[0], p.material[0]);
    phase_update(&mut p, &mats);
    assert_eq!(p.phase[0], Phase::Liquid);
    p.temperature[0] = 1600.0;
    phase_update(&mut p, &mats);
    assert_eq!(p.phase[0], Phase::Solid);
    assert_eq!((p.mass[0], p.material[0]), (mass, mat));
}

#[test]
fn shipped_scenarios_load_and_validate() {
    for name in meltsph::bench::scenario_names() {
        let cfg = scenario(name).unwrap();
        cfg.validate().unwrap();
        for m in &cfg.materials {
            m.validate().unwrap();
        }
    }
    let s = scenario("static_droplet").unwrap();
    assert_eq!(s.numerics.dx, 0.09);
    assert_eq!(s.numerics.dt, 4e-5);
    assert_eq!(s.materials[0].surface_tension, 1e4);
}

#[test]
fn powder_bed_grains_are_solid_spheres() {
    let cfg = scenario("point3d").unwrap();
    let spheres = cfg.regions.iter().filter(|r| r.label.as_deref().is_some_and(|l| l.starts_with("grain"))).count();
    assert!(spheres >= 10);
    for r in cfg.regions.iter().filter(|r| r.label.as_deref().is_some_and(|l| l.starts_with("grain"))) {
        assert_eq!(r.phase, Phase::Solid);
        let rad = r.radius.unwrap();
        assert!((8e-6..=16e-6).contains(&rad));
    }
}
