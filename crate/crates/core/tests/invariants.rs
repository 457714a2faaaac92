use std::f64::consts::TAU;

use proptest::prelude::*;
use quakelab::circle_map::CircleMap;
use quakelab::earthquake::build_earthquake;
use quakelab::experiments::generators::{random_lamination, random_moebius};
use quakelab::hyperbolic::{liouville_measure, BoundaryPoint, Geodesic, GeodesicArc, GeodesicBox, HPoint, MoebiusMap};
use quakelab::lamination::{format_lamination, geodesic_distance, parse_lamination, transverse_measure};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn moebius(seed: u64) -> MoebiusMap {
    random_moebius(&mut ChaCha8Rng::seed_from_u64(seed), 2.5)
}

fn sorted4() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-20.0..20.0f64).prop_filter_map("distinct corners", |mut v| {
        v.sort_by(|a, b| a.total_cmp(b));
        v.windows(2).all(|w| w[1] - w[0] > 1e-2).then_some(v)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn liouville_is_moebius_invariant(c in sorted4(), seed in any::<u64>()) {
        let q = GeodesicBox::from_reals(c[0], c[1], c[2], c[3]).unwrap();
        let (a, b) = (liouville_measure(&q), liouville_measure(&q.map(&moebius(seed))));
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "{} vs {}", a, b);
    }

    #[test]
    fn geodesic_distance_is_moebius_invariant(c in sorted4(), seed in any::<u64>()) {
        let g1 = Geodesic::from_reals(c[0], c[1]).unwrap();
        let g2 = Geodesic::from_reals(c[2], c[3]).unwrap();
        let g = moebius(seed);
        let d = geodesic_distance(&g1, &g2).unwrap();
        let e = geodesic_distance(&g.apply_geodesic(&g1), &g.apply_geodesic(&g2)).unwrap();
        prop_assert!((d - e).abs() <= 1e-8 * (1.0 + d), "{} vs {}", d, e);
    }

    #[test]
    fn transverse_measure_is_moebius_invariant(
        seed in any::<u64>(),
        x0 in -2.0..2.0f64, y0 in 0.2..3.0f64, x1 in -2.0..2.0f64, y1 in 0.2..3.0f64,
    ) {
        let mu = random_lamination(&mut ChaCha8Rng::seed_from_u64(seed), 8, 2.0);
        let arc = GeodesicArc::new(HPoint::new(x0, y0).unwrap(), HPoint::new(x1, y1).unwrap());
        let g = moebius(seed.wrapping_add(1));
        let moved = GeodesicArc::new(g.apply(&arc.start), g.apply(&arc.end));
        let (a, b) = (transverse_measure(&mu, &arc), transverse_measure(&mu.pushforward(&g), &moved));
        prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn translation_length_is_conjugation_invariant(w in 0.01..5.0f64, a in 0.0..TAU, b in 0.0..TAU, seed in any::<u64>()) {
        let (p, q) = (BoundaryPoint::from_param(a), BoundaryPoint::from_param(b));
        prop_assume!(!p.approx_eq(&q, 1e-3));
        let t = MoebiusMap::translation_along(&p, &q, w).unwrap();
        let g = moebius(seed);
        let (l, _) = g.compose(&t).compose(&g.inverse()).translation_length();
        prop_assert!((l - w).abs() < 1e-7, "{} vs {}", l, w);
    }

    #[test]
    fn boundary_param_round_trip(phi in 0.0..(TAU - 1e-6)) {
        let p = BoundaryPoint::from_param(phi);
        prop_assert!((p.param() - phi).abs() < 1e-12);
    }

    #[test]
    fn circle_map_inverse_round_trip(seed in any::<u64>(), phi in 0.0..(TAU - 1e-6)) {
        let mu = random_lamination(&mut ChaCha8Rng::seed_from_u64(seed), 10, 2.0);
        let h = build_earthquake(&mu).boundary_map().post_compose(&moebius(seed));
        let x = BoundaryPoint::from_param(phi);
        prop_assert!(h.inverse().eval(&h.eval(&x)).approx_eq(&x, 1e-10));
        let id: CircleMap = h.compose(&h.inverse());
        prop_assert!(id.eval(&x).approx_eq(&x, 1e-10));
    }

    #[test]
    fn lamination_text_round_trip(seed in any::<u64>()) {
        let mu = random_lamination(&mut ChaCha8Rng::seed_from_u64(seed), 12, 3.0);
        let back = parse_lamination(&format_lamination(&mu)).unwrap();
        prop_assert!(back.approx_eq(&mu, 1e-15));
    }
}
