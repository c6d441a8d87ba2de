use approx::assert_relative_eq;
use meltsph::gradlab::{self, cspm_csph_random_cloud, GradlabConfig, Reference, Region, Support};
use meltsph::kernel::{
    grad_asymmetric, grad_corrected, grad_standard, grad_symmetric, kernel_derivative, kernel_value,
    tangential_projection, Correction, FieldSample, GradientVariant, KernelSpec,
};
use meltsph::Vec3;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cloud(seed: u64, dim: usize, f: impl Fn(&Vec3) -> f64) -> (FieldSample, Vec<FieldSample>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 4i32;
    let mut out = Vec::new();
    let nz = if dim == 3 { n } else { 0 };
    for k in -nz..=nz {
        for j in -n..=n {
            for i in -n..=n {
                if i == 0 && j == 0 && k == 0 {
                    continue;
                }
                let mut x = Vec3::new(i as f64, j as f64, k as f64);
                for a in 0..dim {
                    x[a] += rng.random_range(-0.35..0.35);
                }
                out.push(FieldSample::new(f(&x), x, rng.random_range(0.7..1.3), 1.0).unwrap());
            }
        }
    }
    let c = Vec3::zeros();
    (FieldSample::new(f(&c), c, 1.0, 1.0).unwrap(), out)
}

#[test]
fn closed_form_centre_values() {
    let k2 = KernelSpec::new(1.0, 2).unwrap();
    let k3 = KernelSpec::new(1.0, 3).unwrap();
    assert_relative_eq!(kernel_value(0.0, &k2).unwrap(), 66.0 * 7.0 / (478.0 * std::f64::consts::PI), max_relative = 1e-14);
    assert_relative_eq!(kernel_value(0.0, &k3).unwrap(), 66.0 / (120.0 * std::f64::consts::PI), max_relative = 1e-14);
    assert_eq!(kernel_value(3.0, &k2).unwrap(), 0.0);
    assert_eq!(kernel_derivative(0.0, &k2).unwrap(), 0.0);
    assert!(kernel_value(-0.1, &k2).is_err());
}

#[test]
fn finite_difference_of_value_matches_derivative() {
    for dim in 1..=3 {
        let k = KernelSpec::new(0.7, dim).unwrap();
        let r = 1.1 * 0.7;
        let e = 1e-6 * 0.7;
        let fd = (k.w(r + e) - k.w(r - e)) / (2.0 * e);
        assert_relative_eq!(k.dw(r), fd, max_relative = 1e-6);
    }
}

#[test]
fn asymmetric_constant_field_is_exactly_zero_on_truncated_support() {
    let (mut c, mut nb) = cloud(3, 2, |_| 1700.0);
    nb.retain(|s| s.position.y > 0.2);
    c.value = 1700.0;
    let k = KernelSpec::new(1.0, 2).unwrap();
    assert_eq!(grad_asymmetric(&c, &nb, &k).vector, Vec3::zeros());
    assert!(grad_standard(&c, &nb, &k).vector.norm() > 1.0);
    assert!(grad_symmetric(&c, &nb, &k).vector.norm() > 1.0);
}

#[test]
fn cspm_equals_csph_on_hundred_clouds() {
    for seed in 0..100 {
        let d = cspm_csph_random_cloud(seed, if seed % 4 == 0 { 3 } else { 2 }).unwrap();
        assert!(d <= 1e-12, "seed {seed}: {d}");
    }
}

#[test]
fn kinked_field_tangential_errors() {
    let cfg = GradlabConfig {
        offset: 1700.0,
        tilt: 20.0,
        ..GradlabConfig::default()
    };
    let r = gradlab::run_gradlab(&cfg).unwrap();
    let err = |v, s| r.find(v, s, Region::Band, Reference::Csph).unwrap().l2_rel;
    assert!(err(GradientVariant::Asymmetric, Support::Full) < 0.02);
    assert!(err(GradientVariant::Standard, Support::Truncated) > 0.10);
    assert!(err(GradientVariant::Symmetric, Support::Truncated) > 0.10);
    assert!(r.cspm_csph_max_rel <= 1e-12);
}

#[test]
fn constant_field_gradlab() {
    let cfg = GradlabConfig {
        field: gradlab::FieldKind::Constant,
        offset: 1700.0,
        tilt: 10.0,
        ..GradlabConfig::default()
    };
    let r = gradlab::run_gradlab(&cfg).unwrap();
    for reg in [Region::Band, Region::Interior] {
        assert_eq!(r.find(GradientVariant::Asymmetric, Support::Truncated, reg, Reference::Exact).unwrap().linf_abs, 0.0);
    }
    assert!(r.find(GradientVariant::Standard, Support::Truncated, Region::Band, Reference::Exact).unwrap().linf_abs > 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn corrected_reproduces_affine_fields(seed in 0u64..10_000, a in -5.0..5.0f64, bx in -3.0..3.0f64, by in -3.0..3.0f64, bz in -3.0..3.0f64, dim in 2usize..=3) {
        let b = Vec3::new(bx, by, if dim == 3 { bz } else { 0.0 });
        let (c, nb) = cloud(seed, dim, |x| a + b.dot(x));
        let k = KernelSpec::new(1.0, dim).unwrap();
        for m in [Correction::Cspm, Correction::Csph] {
            let g = grad_corrected(&c, &nb, &k, m);
            prop_assert!(!g.fell_back);
            prop_assert!((g.vector - b).norm() <= 1e-10 * b.norm().max(1.0));
        }
    }

    #[test]
    fn asymmetric_zero_for_any_constant(seed in 0u64..10_000, v in -1e6..1e6f64) {
        let (c, nb) = cloud(seed, 2, |_| v);
        let k = KernelSpec::new(1.0, 2).unwrap();
        prop_assert_eq!(grad_asymmetric(&c, &nb, &k).vector, Vec3::zeros());
    }

    #[test]
    fn projection_is_orthogonal(gx in -10.0..10.0f64, gy in -10.0..10.0f64, gz in -10.0..10.0f64, th in 0.0..std::f64::consts::PI, ph in 0.0..std::f64::consts::TAU, s in 0.95..1.05f64) {
        let n = Vec3::new(th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()) * s;
        let g = Vec3::new(gx, gy, gz);
        let t = tangential_projection(&g, &n).unwrap();
        prop_assert!(t.dot(&(n / s)).abs() <= 1e-12 * g.norm().max(1.0));
    }
}

#[test]
fn projection_rejects_far_from_unit() {
    assert!(tangential_projection(&Vec3::x(), &Vec3::new(0.0, 0.0, 2.0)).is_err());
    assert_eq!(tangential_projection(&Vec3::new(1.0, 1.0, 0.0), &Vec3::z()).unwrap(), Vec3::new(1.0, 1.0, 0.0));
}
