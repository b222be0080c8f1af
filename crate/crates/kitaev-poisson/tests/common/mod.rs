#![allow(dead_code)]

use kitaev_poisson::double_group::{AbelianDouble, DoubleGroup, PoissonDouble, Sl2c};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sl2c() -> PoissonDouble<Sl2c> {
    PoissonDouble::new(Sl2c::new()).unwrap()
}

pub fn abelian(n: usize) -> PoissonDouble<AbelianDouble> {
    PoissonDouble::new(AbelianDouble::new(n)).unwrap()
}

pub fn point_dist<G: DoubleGroup>(g: &G, a: &[G::Elem], b: &[G::Elem]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| g.dist(x, y)).fold(0.0, f64::max)
}
