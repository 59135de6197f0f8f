#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use svgcore::problems::FnFunction;

pub type Boxed = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Sum of independent blocks on `[-5, 5]^n`: convex quadratics with every
/// pair coupled for blocks of two or more, shifted parabolas for singletons.
pub struct Blocks {
    pub blocks: Vec<Vec<usize>>,
    pub optimum: Vec<f64>,
    pub function: FnFunction<Boxed>,
}

pub fn blocks(seed: u64, n: usize) -> Blocks {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut groups = Vec::new();
    let mut at = 0;
    while at < n {
        let size = rng.random_range(1..=3).min(n - at);
        let mut g = order[at..at + size].to_vec();
        g.sort_unstable();
        groups.push(g);
        at += size;
    }
    groups.sort();
    let o: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
    let couplings: Vec<f64> = groups.iter().map(|_| rng.random_range(0.3..0.9)).collect();
    let (g2, o2) = (groups.clone(), o.clone());
    let f: Boxed = Box::new(move |x: &[f64]| {
        g2.iter()
            .zip(&couplings)
            .map(|(g, &c)| {
                let z: Vec<f64> = g.iter().map(|&v| x[v] - o2[v]).collect();
                let own: f64 = z.iter().map(|v| v * v).sum();
                let sum: f64 = z.iter().sum();
                // Every pair coupled: sum_{i<j} z_i z_j.
                let cross = 0.5 * (sum * sum - own);
                own + c * cross
            })
            .sum()
    });
    Blocks { blocks: groups, optimum: o, function: FnFunction::uniform(n, -5.0, 5.0, f) }
}

pub fn canonical(mut groups: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for g in &mut groups {
        g.sort_unstable();
    }
    groups.sort();
    groups
}
