//! Fixtures shared by the benches.

use zfree_core::{generate_instance, GenConfig, Instance};

/// About `n` one-hot indices spread over `r ~ n^(1/3)` variables of equal size.
pub fn scaled_instance(n: usize, seed: u64) -> Instance {
    let r = ((n as f64).cbrt().round() as usize).max(1);
    let d = n.div_ceil(r);
    let cfg = GenConfig { r, domains: Some(vec![d; r]), levels: 4, seed, ..GenConfig::default() };
    generate_instance(&cfg).expect("valid generator config")
}
