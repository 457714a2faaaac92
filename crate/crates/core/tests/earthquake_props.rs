use std::f64::consts::TAU;

use quakelab::earthquake::{build_earthquake, recover_measure, verify_left, Stratum};
use quakelab::experiments::generators::{random_lamination, random_moebius};
use quakelab::hyperbolic::{cross, is_ccw, BoundaryPoint, MapKind};
use quakelab::lamination::FiniteMeasuredLamination;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn matched_weight_error(a: &FiniteMeasuredLamination, b: &FiniteMeasuredLamination) -> f64 {
    assert_eq!(a.len(), b.len());
    a.leaves()
        .iter()
        .map(|l| {
            let m = b
                .leaves()
                .iter()
                .find(|k| k.geodesic.approx_eq(&l.geodesic, 1e-8))
                .unwrap_or_else(|| panic!("leaf {:?} not recovered", l.geodesic));
            (m.weight - l.weight).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn recovery_and_left_condition_on_random_laminations() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..150 {
        let mu = random_lamination(&mut rng, 12, 2.0);
        let e = build_earthquake(&mu);
        let report = verify_left(&e);
        assert!(report.ok, "{:?}", report.violations.first());
        assert!(matched_weight_error(&mu, &recover_measure(&e)) < 1e-9);
    }
}

#[test]
fn boundary_action_is_monotone_and_invertible() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..40 {
        let e = build_earthquake(&random_lamination(&mut rng, 20, 2.0));
        assert!(e.boundary_map().continuity_defect() < 1e-9);
        let pts: Vec<BoundaryPoint> = (0..60).map(|_| BoundaryPoint::from_param(rng.gen_range(0.0..TAU))).collect();
        for w in pts.windows(3) {
            let img: Vec<BoundaryPoint> = w.iter().map(|x| e.eval_boundary(x)).collect();
            assert_eq!(is_ccw(&w[0], &w[1], &w[2]), is_ccw(&img[0], &img[1], &img[2]));
        }
        for y in &pts {
            assert!(e.eval_boundary(&e.invert_boundary(y)).approx_eq(y, 1e-10));
        }
    }
}

#[test]
fn scaling_multiplies_translation_lengths() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let mu = random_lamination(&mut rng, 10, 1.5);
        let s = rng.gen_range(0.1..2.0);
        let (e, es) = (build_earthquake(&mu), build_earthquake(&mu.scale(s).unwrap()));
        for k in 0..mu.len() {
            let (a, ka) = e.leaf_translation(k).translation_length();
            let (b, _) = es.leaf_translation(k).translation_length();
            assert_eq!(ka, MapKind::Hyperbolic);
            assert!((b - s * a).abs() < 1e-12, "{b} vs {}", s * a);
        }
        let zero = build_earthquake(&mu.scale(0.0).unwrap());
        let x = BoundaryPoint::from_real(0.3);
        assert!(zero.eval_boundary(&x).approx_eq(&x, 1e-15));
    }
}

fn cross_ratio(x: &[BoundaryPoint]) -> f64 {
    cross(&x[2], &x[0]) * cross(&x[3], &x[1]) / (cross(&x[3], &x[0]) * cross(&x[2], &x[1]))
}

#[test]
fn equivariance_up_to_moebius() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..30 {
        let mu = random_lamination(&mut rng, 8, 1.5);
        let g = random_moebius(&mut rng, 2.0);
        let e = build_earthquake(&mu);
        let eg = build_earthquake(&mu.pushforward(&g));
        let gi = g.inverse();
        let xs: Vec<BoundaryPoint> = (0..4).map(|_| BoundaryPoint::from_param(rng.gen_range(0.0..TAU))).collect();
        let direct: Vec<BoundaryPoint> = xs.iter().map(|x| eg.eval_boundary(x)).collect();
        let conj: Vec<BoundaryPoint> =
            xs.iter().map(|x| g.apply_boundary(&e.eval_boundary(&gi.apply_boundary(x)))).collect();
        let (a, b) = (cross_ratio(&direct), cross_ratio(&conj));
        assert!((a - b).abs() < 1e-8 * (1.0 + a.abs()), "{a} vs {b}");
    }
}

#[test]
fn base_stratum_is_fixed() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..30 {
        let e = build_earthquake(&random_lamination(&mut rng, 10, 2.0));
        assert!(matches!(e.stratum_of_point(&e.base_point()), Stratum::Base));
        let z = e.base_point();
        assert_eq!(e.eval_interior(&z), z);
    }
}
