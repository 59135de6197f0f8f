use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::base::{compensated_sum, BaseFunction};
use super::objective::Function;
use super::rotation::Rotation;
use crate::error::{Error, Result};

/// A contiguous block of variables evaluated by one base function.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub start: usize,
    pub len: usize,
    pub kind: BaseFunction,
    pub rotation: Option<Rotation>,
}

impl Component {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len
    }

    /// Whether the block's variables interact with each other.
    pub fn is_nonseparable(&self) -> bool {
        self.len >= 2 && (self.rotation.is_some() || !self.kind.separable())
    }
}

/// Ideal decomposition of a benchmark problem (0-based indices).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthDecomposition {
    pub n: usize,
    pub separable: Vec<usize>,
    pub groups: Vec<Vec<usize>>,
}

impl GroundTruthDecomposition {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ground truth is always serializable")
    }
}

/// One of the 21 composed benchmark functions.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkProblem {
    pub(crate) func_id: u8,
    pub(crate) n: usize,
    pub(crate) m: usize,
    pub(crate) seed: u64,
    pub(crate) shift: Vec<f64>,
    pub(crate) components: Vec<Component>,
    pub(crate) lower: Vec<f64>,
    pub(crate) upper: Vec<f64>,
}

/// Structural family of a function id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    /// One unrotated block of `kind` over all variables.
    Whole(BaseFunction),
    /// A single `m` block (rotated unless Schwefel) plus a separable tail.
    Single { head: BaseFunction, tail: BaseFunction },
    /// `n/(2m)` blocks over the first half plus a separable second half.
    Half { head: BaseFunction, tail: BaseFunction },
    /// `n/m` blocks over all variables.
    Full(BaseFunction),
}

fn layout(func_id: u8) -> Result<Layout> {
    use BaseFunction::*;
    const KINDS: [BaseFunction; 5] = [Elliptic, Rastrigin, Exponential, Ackley, Ridge];
    let id = func_id as usize;
    Ok(match id {
        1..=5 => Layout::Whole(KINDS[id - 1]),
        6..=9 => Layout::Single { head: KINDS[id - 6], tail: KINDS[id - 6] },
        10 => Layout::Single { head: Schwefel, tail: Ridge },
        11..=14 => Layout::Half { head: KINDS[id - 11], tail: KINDS[id - 11] },
        15 => Layout::Half { head: Schwefel, tail: Ridge },
        16..=19 => Layout::Full(KINDS[id - 16]),
        20 => Layout::Full(Schwefel),
        21 => Layout::Whole(Schwefel),
        _ => return Err(Error::Config(format!("function id {func_id} is not in 1..=21"))),
    })
}

/// Schwefel blocks stay unrotated; every other grouped block is rotated.
fn block(start: usize, len: usize, kind: BaseFunction, rng: &mut ChaCha8Rng) -> Result<Component> {
    let rotation = match kind {
        BaseFunction::Schwefel => None,
        _ => Some(Rotation::random(len, rng.random())?),
    };
    Ok(Component { start, len, kind, rotation })
}

fn plain(start: usize, len: usize, kind: BaseFunction) -> Component {
    Component { start, len, kind, rotation: None }
}

/// Build benchmark function `func_id` at dimension `n` with block size `m`.
///
/// Deterministic for fixed arguments. The optimum `o` is drawn uniformly from
/// the inner 80% of the box; rotation seeds are drawn from the same stream
/// afterwards.
pub fn build_problem(func_id: u8, n: usize, m: usize, seed: u64) -> Result<BenchmarkProblem> {
    let layout = layout(func_id)?;
    if n == 0 || m == 0 {
        return Err(Error::Config("n and m must be positive".into()));
    }
    match layout {
        Layout::Single { .. } if m >= n => {
            return Err(Error::Config(format!("f{func_id} needs m < n (n={n}, m={m})")));
        }
        Layout::Half { .. } if !n.is_multiple_of(2 * m) => {
            return Err(Error::Config(format!("f{func_id} needs n divisible by 2m (n={n}, m={m})")));
        }
        Layout::Full(_) if !n.is_multiple_of(m) => {
            return Err(Error::Config(format!("f{func_id} needs n divisible by m (n={n}, m={m})")));
        }
        _ => {}
    }

    let bound = match layout {
        Layout::Whole(k) | Layout::Full(k) => k.bound(),
        Layout::Single { head, .. } | Layout::Half { head, .. } => head.bound(),
    };
    let lower = vec![-bound; n];
    let upper = vec![bound; n];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let margin = 0.1 * 2.0 * bound;
    let shift: Vec<f64> = (0..n)
        .map(|_| rng.random_range(-bound + margin..=bound - margin))
        .collect();

    let mut components = Vec::new();
    match layout {
        Layout::Whole(kind) => components.push(plain(0, n, kind)),
        Layout::Single { head, tail } => {
            components.push(block(0, m, head, &mut rng)?);
            components.push(plain(m, n - m, tail));
        }
        Layout::Half { head, tail } => {
            for g in 0..n / (2 * m) {
                components.push(block(g * m, m, head, &mut rng)?);
            }
            components.push(plain(n / 2, n - n / 2, tail));
        }
        Layout::Full(kind) => {
            for g in 0..n / m {
                components.push(block(g * m, m, kind, &mut rng)?);
            }
        }
    }

    Ok(BenchmarkProblem { func_id, n, m, seed, shift, components, lower, upper })
}

impl BenchmarkProblem {
    pub fn func_id(&self) -> u8 {
        self.func_id
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The global optimum `o`.
    pub fn optimum(&self) -> &[f64] {
        &self.shift
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Value of the composition at an already-translated point `z = x - o`.
    pub fn eval_translated(&self, z: &[f64]) -> f64 {
        compensated_sum(self.components.iter().map(|c| {
            let block = &z[c.range()];
            match &c.rotation {
                Some(r) => c.kind.eval_unchecked(&r.apply(block)),
                None => c.kind.eval_unchecked(block),
            }
        }))
    }

    /// Ideal decomposition following the component structure.
    pub fn ground_truth(&self) -> GroundTruthDecomposition {
        let mut separable = Vec::new();
        let mut groups = Vec::new();
        for c in &self.components {
            if c.is_nonseparable() {
                groups.push(c.range().collect());
            } else {
                separable.extend(c.range());
            }
        }
        separable.sort_unstable();
        GroundTruthDecomposition { n: self.n, separable, groups }
    }
}

/// Free-function form of [`BenchmarkProblem::ground_truth`].
pub fn ground_truth(problem: &BenchmarkProblem) -> GroundTruthDecomposition {
    problem.ground_truth()
}

impl Function for BenchmarkProblem {
    fn dim(&self) -> usize {
        self.n
    }
    fn lower(&self) -> &[f64] {
        &self.lower
    }
    fn upper(&self) -> &[f64] {
        &self.upper
    }
    fn value(&self, x: &[f64]) -> f64 {
        let z: Vec<f64> = x.iter().zip(&self.shift).map(|(a, b)| a - b).collect();
        self.eval_translated(&z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::CountingObjective;
    use proptest::prelude::*;

    #[test]
    fn optimum_is_zero_for_every_function() {
        for id in 1..=21u8 {
            for seed in 0..3 {
                let p = build_problem(id, 40, 10, seed).unwrap();
                let v = p.value(p.optimum());
                assert!(v.abs() <= 1e-10, "f{id} seed {seed}: f(o) = {v}");
            }
        }
    }

    #[test]
    fn structure_examples() {
        let f1 = build_problem(1, 1000, 50, 3).unwrap();
        let gt = f1.ground_truth();
        assert_eq!(gt.separable, (0..1000).collect::<Vec<_>>());
        assert!(gt.groups.is_empty());

        let f16 = build_problem(16, 100, 10, 3).unwrap();
        let gt = f16.ground_truth();
        assert_eq!(gt.groups.len(), 10);
        assert!(gt.groups.iter().all(|g| g.len() == 10));
        assert!(gt.separable.is_empty());
        assert!(f16.components().iter().all(|c| c.rotation.is_some()));

        let f21 = build_problem(21, 50, 50, 3).unwrap();
        let gt = f21.ground_truth();
        assert_eq!(gt.groups, vec![(0..50).collect::<Vec<_>>()]);
        assert!(gt.separable.is_empty());

        let f6 = build_problem(6, 1000, 50, 1).unwrap();
        let gt = f6.ground_truth();
        assert_eq!(gt.groups, vec![(0..50).collect::<Vec<_>>()]);
        assert_eq!(gt.separable, (50..1000).collect::<Vec<_>>());

        let f20 = build_problem(20, 100, 10, 1).unwrap();
        let gt = f20.ground_truth();
        assert_eq!(gt.groups.len(), 10);
        assert!(gt.separable.is_empty());
        assert!(f20.components().iter().all(|c| c.rotation.is_none()));
    }

    #[test]
    fn schwefel_heads_are_unrotated_with_separable_ridge_tail() {
        for id in [10u8, 15] {
            let p = build_problem(id, 100, 10, 9).unwrap();
            let gt = p.ground_truth();
            let grouped: usize = gt.groups.iter().map(Vec::len).sum();
            let expect = if id == 10 { 10 } else { 50 };
            assert_eq!(grouped, expect);
            assert_eq!(gt.separable, (expect..100).collect::<Vec<_>>());
            let head = &p.components()[0];
            assert_eq!(head.kind, BaseFunction::Schwefel);
            assert!(head.rotation.is_none());
            assert_eq!(p.components().last().unwrap().kind, BaseFunction::Ridge);
        }
    }

    #[test]
    fn incompatible_shapes_rejected() {
        assert!(matches!(build_problem(11, 100, 30, 0), Err(Error::Config(_))));
        assert!(matches!(build_problem(16, 100, 30, 0), Err(Error::Config(_))));
        assert!(matches!(build_problem(6, 10, 10, 0), Err(Error::Config(_))));
        assert!(matches!(build_problem(22, 10, 5, 0), Err(Error::Config(_))));
        assert!(matches!(build_problem(0, 10, 5, 0), Err(Error::Config(_))));
        assert!(matches!(build_problem(1, 0, 5, 0), Err(Error::Config(_))));
    }

    #[test]
    fn deterministic_and_shift_inside_inner_box() {
        let a = build_problem(12, 100, 10, 77).unwrap();
        let b = build_problem(12, 100, 10, 77).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, build_problem(12, 100, 10, 78).unwrap());
        for (o, (lo, hi)) in a.optimum().iter().zip(a.lower.iter().zip(&a.upper)) {
            let r = hi - lo;
            assert!(*o >= lo + 0.1 * r && *o <= hi - 0.1 * r);
        }
        for c in a.components() {
            if let Some(r) = &c.rotation {
                assert!(r.orthogonality_error() <= 1e-10);
            }
        }
    }

    #[test]
    fn rotated_block_is_zero_at_optimum() {
        let p = build_problem(6, 60, 10, 5).unwrap();
        let obj = CountingObjective::new(&p);
        let v = obj.evaluate(p.optimum()).unwrap();
        assert!(v.abs() <= 1e-12);
        assert_eq!(obj.fes_used(), 1);
    }

    proptest! {
        #[test]
        fn ground_truth_partitions_all_variables(id in 1u8..=21, seed in 0u64..1000) {
            let p = build_problem(id, 80, 10, seed).unwrap();
            let gt = p.ground_truth();
            let mut seen = [false; 80];
            for &v in gt.separable.iter().chain(gt.groups.iter().flatten()) {
                prop_assert!(!seen[v]);
                seen[v] = true;
            }
            prop_assert!(seen.iter().all(|&s| s));
        }

        #[test]
        fn translation_invariance(id in 1u8..=21, seed in 0u64..100, x in prop::collection::vec(-1.0f64..1.0, 40)) {
            let p = build_problem(id, 40, 10, seed).unwrap();
            let point: Vec<f64> = x.iter().zip(&p.upper).map(|(u, b)| u * b).collect();
            let z: Vec<f64> = point.iter().zip(p.optimum()).map(|(a, b)| a - b).collect();
            let direct = p.value(&point);
            let translated = p.eval_translated(&z);
            prop_assert!((direct - translated).abs() <= 1e-12 * direct.abs().max(1.0));
        }
    }
}
