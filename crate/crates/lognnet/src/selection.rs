//! Wrapper backward feature elimination in two stages.
//!
//! Stage one repeatedly measures the feature-strength curve dA(z), the
//! cross-validated accuracy drop from zeroing feature z on top of the
//! already-removed set FR, and removes the argmin while any dA is
//! negative (a negative value means the feature hinders training). Stage
//! two ranks the surviving features by the final curve's dA, descending.
//!
//! Every subset's score uses a seed derived from the subset itself, so
//! A(FR) is a pure function of FR: the curve arithmetic stays consistent
//! across iterations and caching can never change a result.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::chaos::GeneratorParams;
use crate::dataset::{Dataset, FeatureMask};
use crate::error::{Error, Result};
use crate::exec;
use crate::network::NetworkShape;
use crate::seeding;
use crate::training::{kfold_evaluate, TrainConfig};

/// Knobs of the elimination loop itself.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionOptions {
    /// Evaluations averaged per subset (stochastic training makes dA
    /// noisy; 1 = single evaluation).
    pub repeats: usize,
    /// Reuse subset scores across iterations. Scores are pure functions
    /// of the subset, so this cannot change results.
    pub cache: bool,
}

impl Default for SelectionOptions {
    fn default() -> Self {
        Self {
            repeats: 1,
            cache: true,
        }
    }
}

/// The strength curve at one elimination state: base accuracy of the
/// current subset and dA(z) for every remaining feature z.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthCurve {
    /// A_NF(FR): accuracy with the current removed set.
    pub base_accuracy: f64,
    /// The removed set FR this curve was measured on, ascending.
    pub removed: Vec<usize>,
    /// dA(z) = base - accuracy(FR + {z}) for each remaining z.
    pub values: BTreeMap<usize, f64>,
}

impl StrengthCurve {
    /// Remaining feature with the smallest dA; ties break to the lower
    /// index. None if the curve is empty.
    pub fn argmin(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (&z, &da) in &self.values {
            if best.is_none_or(|(_, b)| da < b) {
                best = Some((z, da));
            }
        }
        best
    }
}

/// One elimination iteration: the measured curve, the feature removed
/// because of it (None on the final, all-nonnegative curve), and the
/// accuracy after the removal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliminationStep {
    pub curve: StrengthCurve,
    pub removed: Option<usize>,
    pub accuracy_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliminationTrace {
    pub feature_count: usize,
    pub steps: Vec<EliminationStep>,
    /// Final removed set FR, ascending.
    pub final_removed: Vec<usize>,
    /// Surviving features ranked by final-curve dA, descending.
    pub ranking: Vec<usize>,
}

impl EliminationTrace {
    pub fn final_mask(&self) -> FeatureMask {
        FeatureMask::from_removed(self.feature_count, self.final_removed.iter().copied())
            .expect("trace indices are valid")
    }
}

/// Cross-validated accuracy of the masked dataset. The evaluation seed is
/// derived from (cfg.seed, sorted FR), making the score reproducible and
/// cacheable for any subset.
pub fn evaluate_subset(
    ds: &Dataset,
    shape: NetworkShape,
    gen: &GeneratorParams,
    mask: &FeatureMask,
    cfg: &TrainConfig,
) -> Result<f64> {
    evaluate_subset_averaged(ds, shape, gen, mask, cfg, 1)
}

/// Like [`evaluate_subset`] but averages `repeats` evaluations, each with
/// a further-derived seed.
pub fn evaluate_subset_averaged(
    ds: &Dataset,
    shape: NetworkShape,
    gen: &GeneratorParams,
    mask: &FeatureMask,
    cfg: &TrainConfig,
    repeats: usize,
) -> Result<f64> {
    if repeats < 1 {
        return Err(Error::Config("repeats must be at least 1".into()));
    }
    let base = seeding::subset_seed(cfg.seed, mask.removed());
    let mut sum = 0.0;
    for rep in 0..repeats {
        let run_cfg = TrainConfig {
            seed: if rep == 0 { base } else { seeding::mix(base, rep as u64) },
            ..cfg.clone()
        };
        sum += kfold_evaluate(ds, shape, gen, mask, &run_cfg)?
            .pooled
            .accuracy;
    }
    Ok(sum / repeats as f64)
}

type ScoreCache = HashMap<Vec<usize>, f64>;

fn cached_score(
    ds: &Dataset,
    shape: NetworkShape,
    gen: &GeneratorParams,
    mask: &FeatureMask,
    cfg: &TrainConfig,
    opts: &SelectionOptions,
    cache: &mut ScoreCache,
) -> Result<f64> {
    let key: Vec<usize> = mask.removed().collect();
    if opts.cache {
        if let Some(&hit) = cache.get(&key) {
            return Ok(hit);
        }
    }
    let score = evaluate_subset_averaged(ds, shape, gen, mask, cfg, opts.repeats)?;
    if opts.cache {
        cache.insert(key, score);
    }
    Ok(score)
}

/// Measures dA(z) for every feature not yet removed: the base subset is
/// scored once, each candidate removal in parallel.
pub fn feature_strength_curve(
    ds: &Dataset,
    shape: NetworkShape,
    gen: &GeneratorParams,
    removed: &FeatureMask,
    cfg: &TrainConfig,
    opts: &SelectionOptions,
) -> Result<StrengthCurve> {
    let mut cache = ScoreCache::new();
    curve_with_cache(ds, shape, gen, removed, cfg, opts, &mut cache)
}

fn curve_with_cache(
    ds: &Dataset,
    shape: NetworkShape,
    gen: &GeneratorParams,
    removed: &FeatureMask,
    cfg: &TrainConfig,
    opts: &SelectionOptions,
    cache: &mut ScoreCache,
) -> Result<StrengthCurve> {
    let remaining = removed.selected();
    if remaining.len() < 2 {
        return Err(Error::Config(
            "strength curve needs at least 2 remaining features".into(),
        ));
    }
    let base_accuracy = cached_score(ds, shape, gen, removed, cfg, opts, cache)?;

    let key_of = |z: usize| -> Vec<usize> {
        let mut key: Vec<usize> = removed.removed().collect();
        key.push(z);
        key.sort_unstable();
        key
    };

    // candidates not already scored run in parallel; results are folded
    // back serially so the cache stays single-writer
    let fresh: Vec<usize> = remaining
        .iter()
        .copied()
        .filter(|&z| !(opts.cache && cache.contains_key(&key_of(z))))
        .collect();
    let scored: Vec<Result<(usize, f64)>> = exec::map_indices(fresh.len(), |i| {
        let z = fresh[i];
        let candidate = removed.with_removed(z)?;
        let acc = evaluate_subset_averaged(ds, shape, gen, &candidate, cfg, opts.repeats)?;
        Ok((z, acc))
    });
    let mut local: BTreeMap<usize, f64> = BTreeMap::new();
    for r in scored {
        let (z, acc) = r?;
        if opts.cache {
            cache.insert(key_of(z), acc);
        }
        local.insert(z, acc);
    }

    let mut values = BTreeMap::new();
    for &z in &remaining {
        let acc = match local.get(&z) {
            Some(&fresh_score) => fresh_score,
            None => *cache.get(&key_of(z)).expect("candidate scored or cached"),
        };
        values.insert(z, base_accuracy - acc);
    }
    Ok(StrengthCurve {
        base_accuracy,
        removed: removed.removed().collect(),
        values,
    })
}

/// Runs the elimination loop from the full feature set: while the curve
/// has a negative dA, remove the argmin (ties to the lower index); stop
/// when all dA are nonnegative or one feature remains.
pub fn backward_eliminate(
    ds: &Dataset,
    shape: NetworkShape,
    gen: &GeneratorParams,
    cfg: &TrainConfig,
    opts: &SelectionOptions,
) -> Result<EliminationTrace> {
    let nf = ds.feature_count();
    if nf < 2 {
        return Err(Error::Config("elimination needs at least 2 features".into()));
    }
    let mut cache = ScoreCache::new();
    let mut removed = FeatureMask::all_selected(nf);
    let mut steps = Vec::new();

    loop {
        let curve = curve_with_cache(ds, shape, gen, &removed, cfg, opts, &mut cache)?;
        let (worst, worst_da) = curve.argmin().expect("curve has at least 2 features");
        if worst_da >= 0.0 {
            let base = curve.base_accuracy;
            let ranking = rank_features(&curve);
            steps.push(EliminationStep {
                curve,
                removed: None,
                accuracy_after: base,
            });
            return Ok(EliminationTrace {
                feature_count: nf,
                steps,
                final_removed: removed.removed().collect(),
                ranking,
            });
        }
        removed = removed.with_removed(worst)?;
        let accuracy_after = cached_score(ds, shape, gen, &removed, cfg, opts, &mut cache)?;
        steps.push(EliminationStep {
            curve,
            removed: Some(worst),
            accuracy_after,
        });
        if removed.selected_count() < 2 {
            // one feature left: no further curve can be measured
            let last = steps.last().unwrap();
            let ranking = last.curve.values.keys().copied().filter(|z| !removed.is_removed(*z)).collect();
            return Ok(EliminationTrace {
                feature_count: nf,
                steps,
                final_removed: removed.removed().collect(),
                ranking,
            });
        }
    }
}

/// Surviving features sorted by dA descending; ties break by ascending
/// index.
pub fn rank_features(curve: &StrengthCurve) -> Vec<usize> {
    let mut entries: Vec<(usize, f64)> = curve.values.iter().map(|(&z, &da)| (z, da)).collect();
    entries.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    entries.into_iter().map(|(z, _)| z).collect()
}

/// Writes one curve as CSV: feature index, dA.
pub fn write_curve_csv(curve: &StrengthCurve, writer: impl Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["z", "dA"])?;
    for (z, da) in &curve.values {
        wtr.write_record(&[z.to_string(), da.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Serializes the whole trace as JSON.
pub fn write_trace_json(trace: &EliminationTrace, writer: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(writer, trace)?;
    Ok(())
}

pub fn read_trace_json(reader: impl Read) -> Result<EliminationTrace> {
    Ok(serde_json::from_reader(reader)?)
}
