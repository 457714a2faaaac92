use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{transverse_measure, FiniteMeasuredLamination};
use crate::hyperbolic::{from_disk, DPoint, GeodesicArc, HPoint};

/// Seeded generator of random closed unit arcs.
///
/// Most arcs pass through a random point of a random leaf, at signed
/// distance up to `leaf_spread` from the leaf's frame point, in a uniform
/// direction and with a uniform offset along the arc. The rest are centered
/// at uniform points of the disk of Euclidean radius 0.95.
#[derive(Debug, Clone, Copy)]
pub struct ArcSampler {
    pub count: usize,
    pub seed: u64,
    pub leaf_spread: f64,
}

impl Default for ArcSampler {
    fn default() -> Self {
        Self { count: 10_000, seed: 0, leaf_spread: 4.0 }
    }
}

impl ArcSampler {
    pub fn sample(&self, mu: &FiniteMeasuredLamination) -> Vec<GeodesicArc> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.count)
            .map(|_| {
                let anchor = if !mu.is_empty() && rng.gen::<f64>() < 0.8 {
                    let leaf = &mu.leaves()[rng.gen_range(0..mu.len())];
                    leaf.geodesic.point_at(rng.gen_range(-self.leaf_spread..=self.leaf_spread))
                } else {
                    let r = 0.95 * rng.gen::<f64>().sqrt();
                    let w = Complex64::from_polar(r, rng.gen_range(0.0..TAU));
                    from_disk(&DPoint::new(w.re, w.im).expect("inside the disk"))
                };
                let dir = rng.gen_range(0.0..TAU);
                let offset = rng.gen::<f64>();
                unit_arc_through(&anchor, dir, offset)
            })
            .collect()
    }
}

/// Unit arc through `anchor` in direction `dir`, with `anchor` at fraction
/// `offset` of the way from start to end.
pub(crate) fn unit_arc_through(anchor: &HPoint, dir: f64, offset: f64) -> GeodesicArc {
    let start = anchor.travel(dir + PI, offset);
    let end = anchor.travel(dir, 1.0 - offset);
    GeodesicArc::new(start, end)
}

pub fn random_unit_arcs(mu: &FiniteMeasuredLamination, count: usize, seed: u64) -> Vec<GeodesicArc> {
    ArcSampler { count, seed, ..ArcSampler::default() }.sample(mu)
}

/// Largest transverse measure over randomly sampled unit arcs: a lower
/// bound for the norm.
pub fn sampled_norm(mu: &FiniteMeasuredLamination, count: usize, seed: u64) -> f64 {
    random_unit_arcs(mu, count, seed)
        .iter()
        .map(|arc| transverse_measure(mu, arc))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::Geodesic;

    #[test]
    fn sampled_arcs_have_unit_length() {
        let mu = FiniteMeasuredLamination::new(vec![(Geodesic::from_reals(-1.0, 2.0).unwrap(), 1.0)]).unwrap();
        for arc in random_unit_arcs(&mu, 200, 3) {
            assert!((arc.length() - 1.0).abs() < 1e-9, "{}", arc.length());
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let mu = FiniteMeasuredLamination::new(vec![(Geodesic::from_reals(-1.0, 2.0).unwrap(), 1.0)]).unwrap();
        assert_eq!(sampled_norm(&mu, 500, 11), sampled_norm(&mu, 500, 11));
    }
}
