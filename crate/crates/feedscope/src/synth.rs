//! Seeded generator of linear stock-and-flow models with a controllable
//! number of feedback loops.

use std::fmt::Write;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticSpec {
    /// At least 2.
    pub stocks: usize,
    /// Fraction of the other stocks each flow reads, in (0, 1].
    pub density: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn check(&self) -> Result<(), String> {
        if self.stocks < 2 {
            return Err(format!("--stocks must be at least 2, got {}", self.stocks));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(format!("--density must be in (0, 1], got {}", self.density));
        }
        Ok(())
    }

    /// How many other stocks each flow reads.
    pub fn fan_in(&self) -> usize {
        ((self.density * (self.stocks - 1) as f64).ceil() as usize).clamp(1, self.stocks - 1)
    }
}

fn coefficient(rng: &mut ChaCha8Rng) -> f64 {
    // bounded away from 0 so that every generated link can carry a score
    let magnitude: f64 = rng.random_range(0.05..=1.0);
    if rng.random_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

/// Model text for `spec`: stock `sI` has one inflow `fI`, a linear
/// combination of `sI` (with a negative coefficient) and `fan_in` other
/// stocks chosen at random. Runs 0..100 with DT 1.
pub fn generate(spec: &SyntheticSpec) -> String {
    let n = spec.stocks;
    let width = (n - 1).to_string().len();
    let name = |prefix: char, i: usize| format!("{prefix}{i:0width$}");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut out = String::new();
    writeln!(
        out,
        "# synthetic model: stocks = {n}, density = {}, seed = {}",
        spec.density, spec.seed
    )
    .unwrap();
    writeln!(out, "SPEC START = 0 STOP = 100 DT = 1").unwrap();
    for i in 0..n {
        let own: f64 = -rng.random_range(0.05..=1.0);
        let mut others: Vec<usize> = sample(&mut rng, n - 1, spec.fan_in())
            .into_iter()
            .map(|j| if j >= i { j + 1 } else { j })
            .collect();
        others.sort_unstable();

        let mut rhs = format!("{own:.4} * {}", name('s', i));
        for j in others {
            let c = coefficient(&mut rng);
            let sign = if c < 0.0 { '-' } else { '+' };
            write!(rhs, " {sign} {:.4} * {}", c.abs(), name('s', j)).unwrap();
        }
        let initial: f64 = rng.random_range(1.0..10.0);
        writeln!(out, "FLOW {} = {rhs}", name('f', i)).unwrap();
        writeln!(
            out,
            "STOCK {} = {initial:.2} {{ inflow: {} }}",
            name('s', i),
            name('f', i)
        )
        .unwrap();
    }
    out
}
