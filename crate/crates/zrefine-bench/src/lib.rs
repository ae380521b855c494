//! Seeded sampling helpers shared by the criterion benches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zrefine::{QueryRegion, SpaceConfig, ZValue};

/// Samples axis-aligned regions with side length `side`, fully on the grid.
pub fn sample_regions(cfg: SpaceConfig, side: u128, count: usize, seed: u64) -> Vec<QueryRegion> {
    assert!(side >= 1 && side - 1 <= cfg.max_coord(), "side must fit the grid");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let bounds: Vec<(u128, u128)> = (0..cfg.dims())
                .map(|_| {
                    let start = rng.gen_range(0..=(cfg.max_coord() - (side - 1)));
                    (start, start + side - 1)
                })
                .collect();
            QueryRegion::new(cfg, bounds).expect("sampled bounds lie on the grid")
        })
        .collect()
}

/// Samples grid points, one coordinate vector per point.
pub fn sample_points(cfg: SpaceConfig, count: usize, seed: u64) -> Vec<Vec<ZValue>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..cfg.dims()).map(|_| rng.gen_range(0..=cfg.max_coord())).collect())
        .collect()
}
