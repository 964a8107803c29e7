//! Particle-swarm search over the generator parameter box (K, D, L, C).
//!
//! Fitness of a particle is the accuracy of a model trained on the whole
//! dataset and scored on that same dataset (resubstitution), the cheap
//! inner protocol the search runs on. The final reported numbers always
//! come from `kfold_evaluate` with the optimized parameters afterwards.
//!
//! Fitness evaluations within an iteration are independent and run in
//! parallel; the velocity/position update is the serial barrier between
//! iterations. Same seed, same trajectory, regardless of thread count.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chaos::GeneratorParams;
use crate::dataset::{normalization_divisors, Dataset, FeatureMask, Sample};
use crate::error::{Error, Result};
use crate::exec;
use crate::network::{init_model, NetworkShape};
use crate::training::{balance_training_set, train, TrainConfig};

/// Inclusive search box per parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamBounds {
    pub k: (f64, f64),
    pub d: (f64, f64),
    pub l: (f64, f64),
    pub c: (f64, f64),
}

impl Default for ParamBounds {
    /// The published search limits: K, D, C in [-100, 100], L in [2, 10000].
    fn default() -> Self {
        Self {
            k: (-100.0, 100.0),
            d: (-100.0, 100.0),
            l: (2.0, 10_000.0),
            c: (-100.0, 100.0),
        }
    }
}

impl ParamBounds {
    fn as_array(&self) -> [(f64, f64); 4] {
        [self.k, self.d, self.l, self.c]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [("K", self.k), ("D", self.d), ("L", self.l), ("C", self.c)] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Config(format!("bad bounds for {name}: ({lo}, {hi})")));
            }
        }
        if self.l.0 <= 0.0 {
            return Err(Error::Config("L bounds must be positive".into()));
        }
        Ok(())
    }

    pub fn contains(&self, p: &GeneratorParams) -> bool {
        let x = [p.k, p.d, p.l, p.c];
        self.as_array()
            .iter()
            .zip(x)
            .all(|(&(lo, hi), v)| (lo..=hi).contains(&v))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub iterations: usize,
    /// Inertia weight w.
    pub inertia: f64,
    /// Cognitive coefficient c1 (pull toward the particle's own best).
    pub cognitive: f64,
    /// Social coefficient c2 (pull toward the global best).
    pub social: f64,
    pub bounds: ParamBounds,
    /// Stop early once the best fitness reaches this percent.
    pub target_accuracy: Option<f64>,
    pub seed: u64,
    /// Training epochs used inside the fitness evaluation.
    pub fitness_epochs: usize,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            swarm_size: 20,
            iterations: 30,
            inertia: 0.729,
            cognitive: 1.49445,
            social: 1.49445,
            bounds: ParamBounds::default(),
            target_accuracy: None,
            seed: 42,
            fitness_epochs: 50,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.swarm_size < 1 {
            return Err(Error::Config("swarm size must be at least 1".into()));
        }
        if self.fitness_epochs < 1 {
            return Err(Error::Config("fitness epochs must be at least 1".into()));
        }
        self.bounds.validate()
    }
}

/// One row of the iteration log: the global best after that iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub best_fitness: f64,
    pub best_params: GeneratorParams,
}

#[derive(Debug, Clone)]
pub struct PsoOutcome {
    pub best_params: GeneratorParams,
    pub best_fitness: f64,
    pub log: Vec<IterationRecord>,
}

/// Accuracy (percent) of a model trained on all of `ds` (balanced, with
/// divisors from the masked set) and scored on all of `ds`. This is the
/// swarm's fitness function; it is also the right baseline evaluator for
/// comparing the swarm against random parameter draws.
pub fn resubstitution_accuracy(
    ds: &Dataset,
    shape: NetworkShape,
    gen: &GeneratorParams,
    mask: &FeatureMask,
    cfg: &TrainConfig,
) -> Result<f64> {
    if ds.is_empty() {
        return Err(Error::Config("empty dataset".into()));
    }
    let masked: Vec<Sample> = ds.samples.iter().map(|s| s.masked(mask)).collect();
    let divisors = normalization_divisors(&masked, mask);
    let balanced = balance_training_set(&masked)?;
    let mut model = init_model(shape, *gen, divisors, cfg.seed)?;
    train(&mut model, &balanced, cfg)?;
    let mut correct = 0usize;
    for s in &masked {
        if model.predict(&s.values)? == s.label {
            correct += 1;
        }
    }
    Ok(100.0 * correct as f64 / masked.len() as f64)
}

/// Runs the swarm and returns the best parameters found, their fitness,
/// and the per-iteration log (iteration 0 is the initial sample).
pub fn optimize_reservoir(
    ds: &Dataset,
    shape: NetworkShape,
    mask: &FeatureMask,
    pso: &PsoConfig,
    train_cfg: &TrainConfig,
) -> Result<PsoOutcome> {
    pso.validate()?;
    if ds.is_empty() {
        return Err(Error::Config("empty dataset".into()));
    }
    let bounds = pso.bounds.as_array();
    let vmax: Vec<f64> = bounds.iter().map(|(lo, hi)| 0.2 * (hi - lo)).collect();
    let fitness_cfg = TrainConfig {
        epochs: pso.fitness_epochs,
        ..train_cfg.clone()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(pso.seed);
    let mut positions: Vec<[f64; 4]> = (0..pso.swarm_size)
        .map(|_| {
            let mut x = [0.0; 4];
            for (xi, (lo, hi)) in x.iter_mut().zip(&bounds) {
                *xi = lo + (hi - lo) * rng.random::<f64>();
            }
            x
        })
        .collect();
    let mut velocities = vec![[0.0f64; 4]; pso.swarm_size];

    let eval_all = |positions: &[[f64; 4]]| -> Vec<Result<f64>> {
        exec::map_indices(positions.len(), |i| {
            let p = params_from(positions[i]);
            resubstitution_accuracy(ds, shape, &p, mask, &fitness_cfg)
        })
    };

    let mut fitness = collect(eval_all(&positions))?;
    let mut personal_best = positions.clone();
    let mut personal_fitness = fitness.clone();
    let mut best_index = argmax_stable(&fitness);
    let mut global_best = positions[best_index];
    let mut global_fitness = fitness[best_index];

    let mut log = vec![IterationRecord {
        iteration: 0,
        best_fitness: global_fitness,
        best_params: params_from(global_best),
    }];

    for iteration in 1..=pso.iterations {
        if pso
            .target_accuracy
            .is_some_and(|target| global_fitness >= target)
        {
            break;
        }
        for (pos, vel, pbest) in positions
            .iter_mut()
            .zip(&mut velocities)
            .zip(&personal_best)
            .map(|((p, v), b)| (p, v, b))
        {
            for dim in 0..4 {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let v = pso.inertia * vel[dim]
                    + pso.cognitive * r1 * (pbest[dim] - pos[dim])
                    + pso.social * r2 * (global_best[dim] - pos[dim]);
                vel[dim] = v.clamp(-vmax[dim], vmax[dim]);
                pos[dim] = (pos[dim] + vel[dim]).clamp(bounds[dim].0, bounds[dim].1);
            }
        }
        fitness = collect(eval_all(&positions))?;
        for i in 0..pso.swarm_size {
            if fitness[i] > personal_fitness[i] {
                personal_fitness[i] = fitness[i];
                personal_best[i] = positions[i];
            }
        }
        best_index = argmax_stable(&personal_fitness);
        if personal_fitness[best_index] > global_fitness {
            global_fitness = personal_fitness[best_index];
            global_best = personal_best[best_index];
        }
        log.push(IterationRecord {
            iteration,
            best_fitness: global_fitness,
            best_params: params_from(global_best),
        });
    }

    Ok(PsoOutcome {
        best_params: params_from(global_best),
        best_fitness: global_fitness,
        log,
    })
}

fn params_from(x: [f64; 4]) -> GeneratorParams {
    GeneratorParams {
        k: x[0],
        d: x[1],
        l: x[2],
        c: x[3],
    }
}

fn collect(results: Vec<Result<f64>>) -> Result<Vec<f64>> {
    results.into_iter().collect()
}

fn argmax_stable(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Writes the iteration log as CSV: iteration, best fitness, K, D, L, C.
pub fn write_iteration_log_csv(log: &[IterationRecord], writer: impl Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["iteration", "best_fitness", "k", "d", "l", "c"])?;
    for rec in log {
        wtr.write_record(&[
            rec.iteration.to_string(),
            rec.best_fitness.to_string(),
            rec.best_params.k.to_string(),
            rec.best_params.d.to_string(),
            rec.best_params.l.to_string(),
            rec.best_params.c.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a log written by [`write_iteration_log_csv`].
pub fn read_iteration_log_csv(reader: impl Read) -> Result<Vec<IterationRecord>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let record = record?;
        let row = idx + 2;
        let field = |col: usize| -> Result<f64> {
            let cell = record.get(col).unwrap_or("").trim();
            cell.parse().map_err(|_| Error::Parse {
                row,
                column: col + 1,
                value: cell.to_string(),
            })
        };
        out.push(IterationRecord {
            iteration: field(0)? as usize,
            best_fitness: field(1)?,
            best_params: GeneratorParams {
                k: field(2)?,
                d: field(3)?,
                l: field(4)?,
                c: field(5)?,
            },
        });
    }
    Ok(out)
}
