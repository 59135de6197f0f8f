//! Cooperative coevolution over a fixed decomposition.
//!
//! Each nonseparable group gets its own differential-evolution
//! subpopulation. Groups take turns in round-robin order; during a turn the
//! rest of the solution is held fixed in the context vector, and at the end
//! of the turn the group's best member is written back.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grouping::Decomposition;
use crate::problems::{CountingObjective, Function};

/// A full feasible solution into which sub-solutions are inserted.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextVector {
    values: Vec<f64>,
}

impl ContextVector {
    pub fn new<F: Function>(obj: &CountingObjective<F>, values: Vec<f64>) -> Result<Self> {
        if values.len() != obj.dim() {
            return Err(Error::Domain(format!("context vector has {} entries, expected {}", values.len(), obj.dim())));
        }
        for (i, v) in values.iter().enumerate() {
            if !(obj.lower()[i]..=obj.upper()[i]).contains(v) {
                return Err(Error::Domain(format!("context vector entry {i} = {v} is out of bounds")));
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// A copy with `sub` written into the positions of `group`.
    pub fn with(&self, group: &[usize], sub: &[f64]) -> Vec<f64> {
        let mut x = self.values.clone();
        for (&i, &v) in group.iter().zip(sub) {
            x[i] = v;
        }
        x
    }

    pub fn slice(&self, group: &[usize]) -> Vec<f64> {
        group.iter().map(|&i| self.values[i]).collect()
    }

    fn commit(&mut self, group: &[usize], sub: &[f64]) {
        for (&i, &v) in group.iter().zip(sub) {
            self.values[i] = v;
        }
    }
}

/// One group's DE population with per-individual control parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Subpopulation {
    pub group: Vec<usize>,
    pub individuals: Vec<Vec<f64>>,
    pub fitnesses: Vec<f64>,
    scale: Vec<f64>,
    crossover: Vec<f64>,
}

impl Subpopulation {
    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    /// Index and fitness of the best member.
    pub fn best(&self) -> (usize, f64) {
        self.fitnesses
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |b, (i, f)| if f < b.1 { (i, f) } else { b })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Fixed population size; `None` uses `min(50, 5·|group|)`, at least 4.
    pub population: Option<usize>,
    /// Mean of the scale-factor distribution.
    pub scale_factor: f64,
    /// Mean of the crossover-rate distribution.
    pub crossover_rate: f64,
    /// Draw `F` and `CR` per individual and keep the ones that succeed.
    pub self_adaptive: bool,
    /// Total budget, decomposition included.
    pub max_fes: u64,
    /// Generations per group per turn.
    pub generations: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            population: None,
            scale_factor: 0.5,
            crossover_rate: 0.9,
            self_adaptive: true,
            max_fes: 3_000_000,
            generations: 50,
            seed: 0,
        }
    }
}

/// Standard deviations of the parameter distributions.
const SCALE_SD: f64 = 0.3;
const CROSSOVER_SD: f64 = 0.1;
/// Chance that an individual redraws its parameters before a trial.
const REDRAW: f64 = 0.1;

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population.is_some_and(|p| p < 4) {
            return Err(Error::Config("DE needs a population of at least 4".into()));
        }
        if self.max_fes == 0 {
            return Err(Error::Config("max_fes must be positive".into()));
        }
        if self.generations == 0 {
            return Err(Error::Config("generations per turn must be positive".into()));
        }
        if !(self.scale_factor > 0.0 && (0.0..=1.0).contains(&self.crossover_rate)) {
            return Err(Error::Config("need F > 0 and CR in [0, 1]".into()));
        }
        Ok(())
    }

    pub fn population_for(&self, group_len: usize) -> usize {
        self.population.unwrap_or_else(|| (5 * group_len).clamp(4, 50))
    }

    fn draw_scale(&self, rng: &mut ChaCha8Rng) -> f64 {
        if !self.self_adaptive {
            return self.scale_factor;
        }
        let d = Normal::new(self.scale_factor, SCALE_SD).expect("finite parameters");
        d.sample(rng).clamp(0.1, 1.0)
    }

    fn draw_crossover(&self, rng: &mut ChaCha8Rng) -> f64 {
        if !self.self_adaptive {
            return self.crossover_rate;
        }
        let d = Normal::new(self.crossover_rate, CROSSOVER_SD).expect("finite parameters");
        d.sample(rng).clamp(0.0, 1.0)
    }
}

/// Fitness of `cv` with `sub` inserted at `group`; one evaluation.
pub fn evaluate_subsolution<F: Function>(
    obj: &CountingObjective<F>,
    cv: &ContextVector,
    group: &[usize],
    sub: &[f64],
) -> Result<f64> {
    if sub.len() != group.len() {
        return Err(Error::Domain(format!("sub-solution has {} entries for a group of {}", sub.len(), group.len())));
    }
    for (&i, &v) in group.iter().zip(sub) {
        if !(obj.lower()[i]..=obj.upper()[i]).contains(&v) {
            return Err(Error::Domain(format!("sub-solution value {v} for variable {i} is out of bounds")));
        }
    }
    obj.evaluate(&cv.with(group, sub))
}

/// Evaluate `subs` in order, stopping at `cap` evaluations.
fn evaluate_batch<F: Function>(
    obj: &CountingObjective<F>,
    cv: &ContextVector,
    group: &[usize],
    subs: &[Vec<f64>],
    cap: u64,
) -> Result<(Vec<f64>, bool)> {
    let take = subs.len().min(cap.min(usize::MAX as u64) as usize);
    let points: Vec<Vec<f64>> = subs[..take].iter().map(|s| cv.with(group, s)).collect();
    let (values, cut) = obj.evaluate_prefix(&points)?;
    Ok((values, cut || take < subs.len()))
}

/// Seeded uniform population with the context vector's own slice as the
/// first member; `pop_size` evaluations.
pub fn init_subpopulation<F: Function>(
    obj: &CountingObjective<F>,
    cv: &ContextVector,
    group: Vec<usize>,
    cfg: &OptimizerConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Subpopulation> {
    init_capped(obj, cv, group, cfg, rng, u64::MAX)
}

fn init_capped<F: Function>(
    obj: &CountingObjective<F>,
    cv: &ContextVector,
    group: Vec<usize>,
    cfg: &OptimizerConfig,
    rng: &mut ChaCha8Rng,
    cap: u64,
) -> Result<Subpopulation> {
    let size = cfg.population_for(group.len());
    let mut individuals = vec![cv.slice(&group)];
    for _ in 1..size {
        individuals.push(group.iter().map(|&i| rng.random_range(obj.lower()[i]..=obj.upper()[i])).collect());
    }
    let scale = (0..size).map(|_| cfg.draw_scale(rng)).collect();
    let crossover = (0..size).map(|_| cfg.draw_crossover(rng)).collect();
    let (fitnesses, cut) = evaluate_batch(obj, cv, &group, &individuals, cap)?;
    if cut {
        return Err(Error::BudgetExhausted { fes_used: obj.fes_used() });
    }
    Ok(Subpopulation { group, individuals, fitnesses, scale, crossover })
}

/// One generation of rand/1/bin DE with greedy replacement.
///
/// All trial vectors are built from the current generation before any is
/// evaluated, so evaluating them as a batch gives the same result as one by
/// one. If the budget runs out part way, the completed replacements are kept
/// and the budget error is returned.
pub fn de_generation<F: Function>(
    pop: &mut Subpopulation,
    cv: &ContextVector,
    obj: &CountingObjective<F>,
    cfg: &OptimizerConfig,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    de_generation_capped(pop, cv, obj, cfg, rng, u64::MAX)
}

fn de_generation_capped<F: Function>(
    pop: &mut Subpopulation,
    cv: &ContextVector,
    obj: &CountingObjective<F>,
    cfg: &OptimizerConfig,
    rng: &mut ChaCha8Rng,
    cap: u64,
) -> Result<()> {
    let np = pop.len();
    if np < 4 {
        return Err(Error::Config("DE needs a population of at least 4".into()));
    }
    let d = pop.group.len();
    let mut trials = Vec::with_capacity(np);
    let mut params = Vec::with_capacity(np);
    for i in 0..np {
        let (mut f, mut cr) = (pop.scale[i], pop.crossover[i]);
        if cfg.self_adaptive && rng.random::<f64>() < REDRAW {
            f = cfg.draw_scale(rng);
        }
        if cfg.self_adaptive && rng.random::<f64>() < REDRAW {
            cr = cfg.draw_crossover(rng);
        }
        let mut pick = |taken: &[usize]| loop {
            let k = rng.random_range(0..np);
            if !taken.contains(&k) {
                break k;
            }
        };
        let r1 = pick(&[i]);
        let r2 = pick(&[i, r1]);
        let r3 = pick(&[i, r1, r2]);
        let forced = rng.random_range(0..d);
        let (a, b, c) = (&pop.individuals[r1], &pop.individuals[r2], &pop.individuals[r3]);
        let trial: Vec<f64> = (0..d)
            .map(|k| {
                let var = pop.group[k];
                if k == forced || rng.random::<f64>() < cr {
                    (a[k] + f * (b[k] - c[k])).clamp(obj.lower()[var], obj.upper()[var])
                } else {
                    pop.individuals[i][k]
                }
            })
            .collect();
        trials.push(trial);
        params.push((f, cr));
    }
    let (values, cut) = evaluate_batch(obj, cv, &pop.group, &trials, cap)?;
    for (i, (trial, fit)) in trials.into_iter().zip(values).enumerate() {
        if fit <= pop.fitnesses[i] {
            pop.individuals[i] = trial;
            pop.fitnesses[i] = fit;
            (pop.scale[i], pop.crossover[i]) = params[i];
        }
    }
    if cut {
        return Err(Error::BudgetExhausted { fes_used: obj.fes_used() });
    }
    Ok(())
}

/// Result of a cooperative-coevolution run.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOutcome {
    pub best: Vec<f64>,
    pub best_f: f64,
    /// `(total evaluations so far, best fitness)` after every generation.
    pub history: Vec<(u64, f64)>,
    /// Evaluations spent here, excluding the decomposition.
    pub optimization_fes: u64,
    /// The run ended on the budget. Only a run with nothing to optimize
    /// finishes without exhausting it.
    pub exhausted: bool,
}

impl OptimizeOutcome {
    pub fn total_fes(&self, decomposition: &Decomposition) -> u64 {
        decomposition.fes_used + self.optimization_fes
    }

    pub fn history_csv(&self) -> String {
        let mut out = String::from("fes,best_f\n");
        for (fes, f) in &self.history {
            out.push_str(&format!("{fes},{f:e}\n"));
        }
        out
    }
}

/// Groups the optimizer works on: every nonseparable group, plus one pooled
/// group of the separable variables whose optimum was never located.
pub fn optimization_groups(decomposition: &Decomposition) -> Vec<Vec<usize>> {
    let mut groups = decomposition.nonseps.clone();
    let pooled: Vec<usize> = decomposition
        .seps
        .iter()
        .filter(|s| s.optimum.is_none())
        .map(|s| s.index)
        .collect();
    if !pooled.is_empty() {
        groups.push(pooled);
    }
    groups
}

/// Round-robin DE over the decomposition's groups until the budget, which
/// includes the evaluations the decomposition already used, runs out.
///
/// Separable variables with a located optimum stay frozen at it. With nothing
/// to optimize the context vector is returned as is, at no cost.
pub fn decc_optimize<F: Function>(
    obj: &CountingObjective<F>,
    decomposition: &Decomposition,
    cfg: &OptimizerConfig,
) -> Result<OptimizeOutcome> {
    cfg.validate()?;
    decomposition.validate()?;
    if decomposition.n != obj.dim() {
        return Err(Error::Domain("decomposition and objective differ in dimension".into()));
    }
    let mut cv = ContextVector::new(obj, decomposition.cv.clone())?;
    let groups = optimization_groups(decomposition);
    let start = obj.fes_used();
    let limit = cfg.max_fes.saturating_sub(decomposition.fes_used);
    let spent = || obj.fes_used() - start;
    let cap = || limit.saturating_sub(obj.fes_used() - start);
    let base = decomposition.fes_used;

    if groups.is_empty() {
        let best_f = obj.audit(cv.values());
        return Ok(OptimizeOutcome {
            best: cv.into_values(),
            best_f,
            history: vec![(base, best_f)],
            optimization_fes: 0,
            exhausted: false,
        });
    }
    let unoptimized = |cv: ContextVector, exhausted| {
        let best_f = obj.audit(cv.values());
        OptimizeOutcome { best: cv.into_values(), best_f, history: vec![(base, best_f)], optimization_fes: 0, exhausted }
    };
    if cap() == 0 {
        return Ok(unoptimized(cv, true));
    }
    let mut f_cv = obj.evaluate(cv.values())?;
    let mut history = vec![(base + spent(), f_cv)];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pops: Vec<Option<Subpopulation>> = vec![None; groups.len()];

    'rounds: loop {
        for (g, group) in groups.iter().enumerate() {
            let pop = match pops[g].take() {
                None => match init_capped(obj, &cv, group.clone(), cfg, &mut rng, cap()) {
                    Ok(p) => p,
                    Err(e) if e.is_budget() => break 'rounds,
                    Err(e) => return Err(e),
                },
                Some(mut p) => {
                    // Other groups moved the context; refresh the fitnesses.
                    let (values, cut) = evaluate_batch(obj, &cv, group, &p.individuals, cap())?;
                    if cut {
                        break 'rounds;
                    }
                    p.fitnesses = values;
                    p
                }
            };
            let mut pop = pop;
            let mut out_of_budget = false;
            for _ in 0..cfg.generations {
                match de_generation_capped(&mut pop, &cv, obj, cfg, &mut rng, cap()) {
                    Ok(()) => {}
                    Err(e) if e.is_budget() => out_of_budget = true,
                    Err(e) => return Err(e),
                }
                let gen_best = pop.best().1.min(f_cv);
                history.push((base + spent(), gen_best.min(history.last().map_or(f64::INFINITY, |h| h.1))));
                if out_of_budget {
                    break;
                }
            }
            let (b, fb) = pop.best();
            if fb < f_cv {
                cv.commit(group, &pop.individuals[b]);
                f_cv = fb;
            }
            pops[g] = Some(pop);
            if out_of_budget || cap() == 0 {
                break 'rounds;
            }
        }
    }

    Ok(OptimizeOutcome {
        best: cv.into_values(),
        best_f: f_cv,
        history,
        optimization_fes: spent(),
        exhausted: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grouping::SeparableVar;
    use crate::problems::FnFunction;

    fn sphere(n: usize) -> FnFunction<impl Fn(&[f64]) -> f64 + Sync> {
        FnFunction::uniform(n, -5.0, 5.0, |x: &[f64]| x.iter().map(|v| v * v).sum())
    }

    #[test]
    fn subsolution_insertion() {
        let obj = CountingObjective::new(sphere(3));
        let cv = ContextVector::new(&obj, vec![0.0; 3]).unwrap();
        assert_eq!(evaluate_subsolution(&obj, &cv, &[1], &[2.0]).unwrap(), 4.0);
        assert_eq!(evaluate_subsolution(&obj, &cv, &[0, 2], &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(obj.fes_used(), 2);
        assert_eq!(cv.values(), &[0.0; 3]);
        assert!(evaluate_subsolution(&obj, &cv, &[1], &[9.0]).is_err());
        assert!(evaluate_subsolution(&obj, &cv, &[1], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn one_dimensional_sphere_converges() {
        let obj = CountingObjective::new(sphere(1));
        let cfg = OptimizerConfig { population: Some(10), ..OptimizerConfig::default() };
        let cv = ContextVector::new(&obj, vec![3.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut pop = init_subpopulation(&obj, &cv, vec![0], &cfg, &mut rng).unwrap();
        let mut last = pop.best().1;
        for _ in 0..50 {
            let before = obj.fes_used();
            de_generation(&mut pop, &cv, &obj, &cfg, &mut rng).unwrap();
            assert_eq!(obj.fes_used() - before, 10);
            assert!(pop.best().1 <= last);
            last = pop.best().1;
        }
        assert!(last <= 1e-6, "{last}");
    }

    #[test]
    fn population_at_optimum_stays() {
        let obj = CountingObjective::new(sphere(2));
        let cv = ContextVector::new(&obj, vec![0.0; 2]).unwrap();
        let cfg = OptimizerConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut pop = init_subpopulation(&obj, &cv, vec![0, 1], &cfg, &mut rng).unwrap();
        assert_eq!(pop.best().1, 0.0);
        de_generation(&mut pop, &cv, &obj, &cfg, &mut rng).unwrap();
        assert_eq!(pop.best().1, 0.0);
    }

    #[test]
    fn frozen_separables_cost_nothing() {
        let obj = CountingObjective::new(sphere(3));
        let d = Decomposition {
            n: 3,
            seps: (0..3).map(|i| SeparableVar { index: i, optimum: Some(0.0) }).collect(),
            nonseps: vec![],
            cv: vec![0.0; 3],
            fes_used: 100,
            exhausted: false,
        };
        let out = decc_optimize(&obj, &d, &OptimizerConfig::default()).unwrap();
        assert_eq!(out.optimization_fes, 0);
        assert_eq!(obj.fes_used(), 0);
        assert_eq!(out.best_f, 0.0);
    }

    #[test]
    fn budget_and_monotone_history() {
        let f = FnFunction::uniform(6, -5.0, 5.0, |x: &[f64]| {
            (x[0] + x[1]).powi(2) + (x[2] - x[3]).powi(2) + x[4] * x[4] + x[5] * x[5]
        });
        let obj = CountingObjective::new(f);
        let d = Decomposition {
            n: 6,
            seps: vec![SeparableVar { index: 4, optimum: None }, SeparableVar { index: 5, optimum: None }],
            nonseps: vec![vec![0, 1], vec![2, 3]],
            cv: vec![-5.0; 6],
            fes_used: 500,
            exhausted: false,
        };
        let cfg = OptimizerConfig { max_fes: 5000, seed: 3, ..OptimizerConfig::default() };
        let out = decc_optimize(&obj, &d, &cfg).unwrap();
        assert!(out.total_fes(&d) <= 5000);
        assert_eq!(out.optimization_fes, obj.fes_used());
        assert!(out.history.windows(2).all(|w| w[0].0 <= w[1].0 && w[1].1 <= w[0].1));
        assert_eq!(out.best_f, obj.audit(&out.best));
        assert!(out.best_f < 100.0 * 6.0 / 4.0);
        assert_eq!(out.history.last().unwrap().1, out.best_f);

        let again = decc_optimize(&CountingObjective::new(obj.function()), &d, &cfg).unwrap();
        assert_eq!(again, out);
    }

    #[test]
    fn bad_configs_rejected() {
        let obj = CountingObjective::new(sphere(2));
        let d = Decomposition { n: 2, seps: vec![], nonseps: vec![vec![0, 1]], cv: vec![0.0; 2], fes_used: 0, exhausted: false };
        for cfg in [
            OptimizerConfig { population: Some(3), ..OptimizerConfig::default() },
            OptimizerConfig { max_fes: 0, ..OptimizerConfig::default() },
        ] {
            assert!(decc_optimize(&obj, &d, &cfg).is_err());
        }
    }
}
