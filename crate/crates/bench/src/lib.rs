//! Fixtures shared by the criterion benches in `benches/`.

use driftbench::{Instance, SeededRng};
use rand::Rng;

/// `n` instances with `d` uniform features and a noisy linear target.
pub fn linear_stream(seed: u64, n: usize, d: usize) -> Vec<Instance> {
    let mut rng = SeededRng::new(seed);
    (0..n)
        .map(|_| {
            let x: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            let y = x
                .iter()
                .enumerate()
                .map(|(j, v)| (j as f64 + 1.0) * v)
                .sum::<f64>()
                + rng.random_range(-0.1..0.1);
            Instance::new(x, y)
        })
        .collect()
}
