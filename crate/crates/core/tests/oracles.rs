mod common;

use common::*;
use cubiclab::classify::{classify, neutral_cycle_scan, principal_critical, Budgets, ComponentTag, PrincipalVerdict};
use cubiclab::orbit::{iterate_orbit, Fate};
use cubiclab::periodic::roots_of_iterate_minus_identity;
use cubiclab::petal::{parabolic_germ, repelling_vectors, rotation_number};
use cubiclab::poly::compose_q;
use cubiclab::rays::{exact_period_angles, green, trace_ray, RationalAngle, RayParams, RayStatus};
use cubiclab::{Complex64, CubicMap};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn composition_matches_dft_expansion() {
    let maps = [
        CubicMap::new(Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0), c(1.0, 0.0)),
        CubicMap::new(c(0.3, -0.4), c(-0.7, 0.2)),
        CubicMap::new(c(1.0, 0.0), c(0.0, 0.0)),
    ];
    for f in &maps {
        for q in 1..=3 {
            let ours = compose_q(f, q).unwrap();
            let oracle = iterate_coefficients_dft(f, q, 64);
            let scale = oracle.iter().map(|z| z.norm()).fold(1.0, f64::max);
            for (k, want) in oracle.iter().enumerate() {
                let got = ours.coefficient(k);
                assert!((got - want).norm() <= 1e-12 * scale, "q={q} k={k}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn third_root_germ_coefficient() {
    // a = 9 − 3√3 i, read from the DFT expansion of f^{∘3}
    let f = CubicMap::new(Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0), c(1.0, 0.0));
    let frozen = c(9.0, -5.196152422706632);
    let coeffs = iterate_coefficients_dft(&f, 3, 64);
    assert!((coeffs[1] - 1.0).norm() < 1e-12);
    assert!(coeffs[2].norm() < 1e-11 && coeffs[3].norm() < 1e-11);
    assert!((coeffs[4] - frozen).norm() < 1e-10);
    let rot = rotation_number(f.lambda, 64).unwrap().unwrap();
    assert_eq!((rot.p, rot.q), (1, 3));
    let spec = parabolic_germ(&f, rot).unwrap();
    assert_eq!(spec.m, 3);
    assert!((spec.a - frozen).norm() < 1e-10);
    for v in repelling_vectors(&spec) {
        let s = spec.a * v.powu(3);
        assert!(s.re > 0.0 && s.im.abs() < 1e-9 * s.re);
    }
}

#[test]
fn fixed_points_of_half_one() {
    let f = CubicMap::new(c(0.5, 0.0), c(1.0, 0.0));
    let got: Vec<Complex64> = f.fixed_points().iter().map(|p| p.point).collect();
    let frozen = [c(0.0, 0.0), c(0.3660254037844386, 0.0), c(-1.3660254037844386, 0.0)];
    assert!(set_distance(&got, &frozen) < 1e-14);
    assert!(set_distance(&got, &fixed_oracle(&f)) < 1e-14);
}

#[test]
fn hand_iterated_escape() {
    let f = CubicMap::new(c(0.0, 0.0), c(3.0, 0.0));
    assert_eq!(f.eval(c(-2.0, 0.0)), c(4.0, 0.0));
    assert_eq!(f.eval(c(4.0, 0.0)), c(112.0, 0.0));
    let rec = iterate_orbit(&f, c(-2.0, 0.0), 100).unwrap();
    assert_eq!(rec.fate, Fate::Escaped);
}

#[test]
fn green_matches_direct_limit() {
    let f = CubicMap::new(c(0.0, 0.0), c(3.0, 0.0));
    let z0 = c(4.0, 0.0);
    // 3^{-n} log|f^n(z)| at the last finite iterate; the tail is below 1e−90
    let (mut z, mut n, mut oracle) = (z0, 0, 0.0);
    while z.norm() < 1e100 {
        z = f.eval(z);
        n += 1;
        oracle = z.norm().ln() / 3f64.powi(n);
    }
    let got = green(&f, z0, 4096);
    assert!((got - oracle).abs() < 1e-9, "{got} vs {oracle}");
    let cube = CubicMap::new(c(0.0, 0.0), c(0.0, 0.0));
    assert!((green(&cube, c(std::f64::consts::E, 0.0), 64) - 1.0).abs() < 1e-12);
    assert_eq!(green(&cube, c(0.5, 0.0), 64), 0.0);
}

#[test]
fn exact_period_three_count() {
    let angles = exact_period_angles(3).unwrap();
    assert_eq!(angles.len(), 24);
    assert!(angles.iter().all(|a| 26 % a.reduced().1 == 0 && a.period() == Some(3)));
}

#[test]
fn half_map_ray_lands_at_repelling_fixed_point() {
    let f = CubicMap::new(c(0.5, 0.0), c(0.0, 0.0));
    let t = trace_ray(&f, RationalAngle::new(0, 1), RayParams::default());
    assert_eq!(t.status, RayStatus::Landed);
    let z = t.landing.unwrap();
    let oracle = c(0.5f64.sqrt(), 0.0);
    assert!((z - oracle).norm() < 1e-6);
    let mu = f.derivative(oracle);
    assert!((mu - 2.0).norm() < 1e-12);
}

#[test]
fn principal_labels_from_hand_iteration() {
    let b = Budgets::default();
    let half = principal_critical(&CubicMap::new(c(0.5, 0.0), c(0.0, 0.0)), &b).unwrap();
    assert_eq!(half.verdict, PrincipalVerdict::Both);
    let crit = CubicMap::new(c(0.5, 0.0), c(0.0, 0.0)).critical_points().as_array();
    let oracle = [c(0.0, 1.0 / 6f64.sqrt()), c(0.0, -1.0 / 6f64.sqrt())];
    assert!(set_distance(&crit, &oracle) < 1e-15);
    let esc = principal_critical(&CubicMap::new(c(0.0, 0.0), c(3.0, 0.0)), &b).unwrap();
    assert_eq!(esc.verdict, PrincipalVerdict::One);
    assert_eq!(esc.omega1, c(0.0, 0.0));
    assert_eq!(esc.omega2, c(-2.0, 0.0));
}

#[test]
fn golden_capture_parameter_is_siegel_capture() {
    // located by the golden-mean slice at 1024² over [−3, 3]²
    let f = CubicMap::new(golden_lambda(), c(0.18457, 0.84668));
    let t = classify(&f, &Budgets::default()).unwrap();
    assert_eq!(t.tag, ComponentTag::SiegelCapture, "{t:?}");
    let r = t.evidence.siegel_radius.unwrap();
    assert!(r > 0.0);
    assert!(t.evidence.capture_time.is_some());
}

#[test]
fn cube_has_no_neutral_cycles() {
    let cube = CubicMap::new(c(0.0, 0.0), c(0.0, 0.0));
    let scan = neutral_cycle_scan(&cube, 3).unwrap();
    assert!(scan.cycles.is_empty());
    // root enumeration: the non-zero fixed points ±1 have μ = 3
    for p in roots_of_iterate_minus_identity(&cube, 1) {
        if p.point.norm() > 0.5 {
            assert!((p.multiplier - 3.0).norm() < 1e-9);
        }
    }
}

#[test]
fn phd_interior_has_no_neutral_cycles() {
    let f = CubicMap::new(c(0.3, 0.1), c(0.2, -0.1));
    assert_eq!(classify(&f, &Budgets::default()).unwrap().tag, ComponentTag::InPHD);
    assert!(neutral_cycle_scan(&f, 4).unwrap().cycles.is_empty());
}

#[test]
fn golden_mean_has_no_small_denominator() {
    assert_eq!(rotation_number(golden_lambda(), 64).unwrap(), None);
    // continued-fraction convergents F_{k}/F_{k+1}; the first denominator
    // past 64 is 89
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for q in 1..=64u32 {
        let gap = (g * q as f64 - (g * q as f64).round()).abs();
        assert!(gap > 1e-9 * q as f64);
    }
}
