mod common;

use meltsph::bench::scenario;
use meltsph::domain::{initialize_particles, Phase};
use meltsph::io::{csv_header, load_scenario, parse_scenario, read_csv, write_csv, write_manifest, write_vtk, Snapshot};
use meltsph::Error;

use common::{periodic_box, WATERLIKE};

#[test]
fn empty_file_lists_missing_sections() {
    let e = parse_scenario("", "empty.cfg").unwrap_err();
    let Error::Parse { path, message } = &e else { panic!("{e:?}") };
    assert_eq!(path, "empty.cfg");
    for s in ["[scenario]", "[domain]", "[numerics]", "[material]", "[initial]"] {
        assert!(message.contains(s), "{message}");
    }
}

#[test]
fn contact_angle_out_of_range() {
    let text = periodic_box(2, 4, 0.1, &format!("{WATERLIKE}contact_angle = 200.0\n"), &[]);
    let e = parse_scenario(&text, "bad.cfg").unwrap_err().to_string();
    assert!(e.contains("contact_angle") && e.contains("200"), "{e}");
}

#[test]
fn unknown_key_is_reported_with_line() {
    let text = periodic_box(2, 4, 0.1, &format!("{WATERLIKE}colour = 3\n"), &[]);
    let e = parse_scenario(&text, "bad.cfg").unwrap_err().to_string();
    assert!(e.contains("colour") && e.contains("line"), "{e}");
}

#[test]
fn shipped_static_droplet_values() {
    let cfg = scenario("static_droplet").unwrap();
    assert_eq!(cfg.domain.max, vec![5.76, 5.76]);
    assert_eq!(cfg.materials.len(), 2);
    let (a, b) = (&cfg.materials[0], &cfg.materials[1]);
    assert_eq!((a.density, a.viscosity, a.reference_pressure), (0.25, 12.0, 78125.0));
    assert_eq!((b.density, b.viscosity, b.reference_pressure), (0.5, 24.0, 156250.0));
    assert_eq!(a.surface_tension, 1e4);
    assert_eq!(cfg.scenario.end_time, 0.2);
}

#[test]
fn manifest_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario("melt2d").unwrap();
    let path = dir.path().join("manifest.cfg");
    write_manifest(&cfg, &path).unwrap();
    assert_eq!(load_scenario(&path).unwrap(), cfg);
}

#[test]
fn csv_round_trip_is_bit_exact() {
    let cfg = common::config(&periodic_box(2, 2, 0.5, WATERLIKE, &[]));
    let mut p = initialize_particles(&cfg).unwrap();
    assert_eq!(p.len(), 4);
    p.velocity[1].x = 0.1 + 0.2;
    p.pressure[2] = -1.0 / 3.0;
    p.temperature[3] = std::f64::consts::PI * 1e-300;
    p.phase[0] = Phase::Gas;
    let delta = vec![1.0 / 7.0, 0.0, 2.5e17, 0.0];
    let kappa = vec![0.0, -3.0, f64::MIN_POSITIVE, 1e-5];
    let snap = Snapshot { particles: &p, delta_lg: &delta, curvature: &kappa, time: 0.0 };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    write_csv(&snap, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0], csv_header(2));
    assert_eq!(lines[0], "id,phase,x,y,u,v,rho,p,T,delta_lg,kappa");
    let rows = read_csv(&path).unwrap();
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r.id, i);
        assert_eq!(r.phase, p.phase[i]);
        assert_eq!(r.position, p.position[i]);
        assert_eq!(r.velocity, p.velocity[i]);
        assert_eq!(r.density.to_bits(), p.density[i].to_bits());
        assert_eq!(r.pressure.to_bits(), p.pressure[i].to_bits());
        assert_eq!(r.temperature.to_bits(), p.temperature[i].to_bits());
        assert_eq!(r.delta_lg.to_bits(), delta[i].to_bits());
        assert_eq!(r.curvature.to_bits(), kappa[i].to_bits());
    }
    // 17 significant digits.
    let mantissa = lines[1].split(',').nth(2).unwrap().split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
}

#[test]
fn vtk_structure() {
    let cfg = common::config(&periodic_box(3, 2, 0.5, WATERLIKE, &[]));
    let p = initialize_particles(&cfg).unwrap();
    let n = p.len();
    assert_eq!(n, 8);
    let zeros = vec![0.0; n];
    let snap = Snapshot { particles: &p, delta_lg: &zeros, curvature: &zeros, time: 1.5 };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.vtk");
    write_vtk(&snap, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# vtk DataFile Version 3.0");
    assert_eq!(lines[2], "ASCII");
    assert_eq!(lines[3], "DATASET POLYDATA");
    assert_eq!(lines[4], format!("POINTS {n} double"));
    assert!(text.contains(&format!("VERTICES {n} {}", 2 * n)));
    assert!(text.contains(&format!("POINT_DATA {n}")));
    for name in ["id int", "phase int", "rho double", "p double", "T double", "delta_lg double", "kappa double"] {
        assert!(text.contains(&format!("SCALARS {name} 1")), "{name}");
    }
    assert!(text.contains("VECTORS velocity double"));
    // header 5, points n, vertices 1+n, point data 1, 7 scalars with 2+n, 1 vector block with 1+n
    assert_eq!(lines.len(), 5 + n + 1 + n + 1 + 7 * (2 + n) + 1 + n);
}

#[test]
fn missing_file_names_path() {
    let e = load_scenario("/nonexistent/x.cfg").unwrap_err().to_string();
    assert!(e.contains("/nonexistent/x.cfg"), "{e}");
}
