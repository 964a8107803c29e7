//! Single-feature threshold classification and per-class histograms.
//!
//! A threshold rule compares one feature against a cut V_th. Type 1
//! predicts the positive class when the value is strictly above the cut,
//! Type 2 when it is at or below. The search balances the dataset first
//! (so a constant prediction scores exactly 50%), then scores every
//! distinct partition: midpoints between consecutive sorted values plus
//! one sentinel below the minimum and one above the maximum.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::registry::FeatureRegistry;
use crate::training::balance_training_set;

/// Which side of the cut is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum ThresholdType {
    /// value > V_th predicts class 1.
    Type1,
    /// value > V_th predicts class 0.
    Type2,
}

impl From<ThresholdType> for u8 {
    fn from(t: ThresholdType) -> u8 {
        match t {
            ThresholdType::Type1 => 1,
            ThresholdType::Type2 => 2,
        }
    }
}

impl TryFrom<u8> for ThresholdType {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(ThresholdType::Type1),
            2 => Ok(ThresholdType::Type2),
            other => Err(format!("threshold type must be 1 or 2, got {other}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    /// 1-based feature index z.
    pub feature: usize,
    /// V_th, in the feature's units.
    pub threshold: f64,
    pub threshold_type: ThresholdType,
    /// A_th in percent, measured on the balanced set.
    pub accuracy: f64,
    pub feature_min: f64,
    pub feature_max: f64,
    /// Set when the feature is constant and no separating cut exists.
    pub degenerate: bool,
}

/// Finds the cut and type maximizing balanced accuracy for one feature.
/// Ties prefer Type 1, then the smaller cut. No cross-validation is
/// involved.
pub fn threshold_search(ds: &Dataset, feature: usize) -> Result<ThresholdResult> {
    let nf = ds.feature_count();
    if feature < 1 || feature > nf {
        return Err(Error::Mask(format!("feature {feature} outside 1..={nf}")));
    }
    for class in 0..2 {
        if ds.class_count(class) == 0 {
            return Err(Error::MissingClass(
                ds.registry.class_names()[class].clone(),
            ));
        }
    }

    let balanced = balance_training_set(&ds.samples)?;
    let mut pairs: Vec<(f64, usize)> = balanced
        .iter()
        .map(|s| (s.values[feature - 1], s.label))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let n = pairs.len();
    let total_pos: usize = pairs.iter().filter(|(_, l)| *l == 1).count();
    let feature_min = pairs[0].0;
    let feature_max = pairs[n - 1].0;

    if feature_min == feature_max {
        return Ok(ThresholdResult {
            feature,
            threshold: feature_min,
            threshold_type: ThresholdType::Type1,
            accuracy: 50.0,
            feature_min,
            feature_max,
            degenerate: true,
        });
    }

    // Candidate cuts: one sentinel below the minimum, midpoints between
    // consecutive distinct values, one sentinel above the maximum. Each
    // candidate is scored by the counts on either side, walked with
    // prefix sums.
    let mut best: Option<(usize, ThresholdType, f64)> = None;
    let mut consider = |correct: usize, ttype: ThresholdType, cut: f64| {
        let better = match best {
            None => true,
            Some((bc, bt, bv)) => {
                correct > bc
                    || (correct == bc
                        && (u8::from(ttype) < u8::from(bt)
                            || (ttype == bt && cut < bv)))
            }
        };
        if better {
            best = Some((correct, ttype, cut));
        }
    };

    // pos_below/neg_below count labels with value <= cut
    let mut pos_below = 0usize;
    let mut neg_below = 0usize;
    let mut score_cut = |cut: f64, pos_below: usize, neg_below: usize| {
        let pos_above = total_pos - pos_below;
        let neg_above = (n - total_pos) - neg_below;
        // Type 1: above the cut predicted positive
        consider(pos_above + neg_below, ThresholdType::Type1, cut);
        // Type 2: above the cut predicted negative
        consider(neg_above + pos_below, ThresholdType::Type2, cut);
    };

    score_cut(feature_min - 1.0, 0, 0);
    let mut i = 0;
    while i < n {
        let v = pairs[i].0;
        while i < n && pairs[i].0 == v {
            match pairs[i].1 {
                1 => pos_below += 1,
                _ => neg_below += 1,
            }
            i += 1;
        }
        let cut = if i < n {
            (v + pairs[i].0) / 2.0
        } else {
            feature_max + 1.0
        };
        score_cut(cut, pos_below, neg_below);
    }

    let (correct, threshold_type, threshold) = best.expect("at least two candidates scored");
    Ok(ThresholdResult {
        feature,
        threshold,
        threshold_type,
        accuracy: 100.0 * correct as f64 / n as f64,
        feature_min,
        feature_max,
        degenerate: false,
    })
}

/// Threshold results for every feature, sorted by accuracy descending
/// (ties by feature index).
pub fn threshold_table(ds: &Dataset) -> Result<Vec<ThresholdResult>> {
    let nf = ds.feature_count();
    let rows: Vec<Result<ThresholdResult>> =
        crate::exec::map_indices(nf, |i| threshold_search(ds, i + 1));
    let mut out: Vec<ThresholdResult> = rows.into_iter().collect::<Result<_>>()?;
    out.sort_by(|a, b| {
        b.accuracy
            .partial_cmp(&a.accuracy)
            .unwrap()
            .then(a.feature.cmp(&b.feature))
    });
    Ok(out)
}

/// Writes the table in the appendix layout: index, feature, A_th, V_th,
/// units, type, min, max.
pub fn write_threshold_table_csv(
    registry: &FeatureRegistry,
    rows: &[ThresholdResult],
    writer: impl Write,
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["no", "feature", "a_th", "v_th", "units", "type", "min", "max"])?;
    for r in rows {
        wtr.write_record(&[
            r.feature.to_string(),
            registry.name(r.feature).to_string(),
            r.accuracy.to_string(),
            r.threshold.to_string(),
            registry.unit(r.feature).to_string(),
            u8::from(r.threshold_type).to_string(),
            r.feature_min.to_string(),
            r.feature_max.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads the numeric columns back from [`write_threshold_table_csv`]
/// output.
pub fn read_threshold_table_csv(reader: impl Read) -> Result<Vec<ThresholdResult>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let record = record?;
        let row = idx + 2;
        let num = |col: usize| -> Result<f64> {
            let cell = record.get(col).unwrap_or("").trim();
            cell.parse().map_err(|_| Error::Parse {
                row,
                column: col + 1,
                value: cell.to_string(),
            })
        };
        let ttype = ThresholdType::try_from(num(5)? as u8).map_err(Error::Config)?;
        out.push(ThresholdResult {
            feature: num(0)? as usize,
            accuracy: num(2)?,
            threshold: num(3)?,
            threshold_type: ttype,
            feature_min: num(6)?,
            feature_max: num(7)?,
            degenerate: false,
        });
    }
    Ok(out)
}

/// Binning request: `bin_size` in feature units over `range`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub feature: usize,
    pub bin_size: f64,
    pub range: (f64, f64),
}

/// Per-class bin counts over `[min, max]`; bin k covers
/// `[min + k*h, min + (k+1)*h)`. Values outside the range count into the
/// edge bins, so each class's counts always sum to its sample count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassHistogram {
    pub spec: HistogramSpec,
    /// Lower edge of each bin.
    pub edges: Vec<f64>,
    /// One count vector per class (index = label).
    pub counts: Vec<Vec<usize>>,
}

pub fn class_histogram(ds: &Dataset, spec: &HistogramSpec) -> Result<ClassHistogram> {
    let nf = ds.feature_count();
    if spec.feature < 1 || spec.feature > nf {
        return Err(Error::Mask(format!(
            "feature {} outside 1..={nf}",
            spec.feature
        )));
    }
    if !(spec.bin_size.is_finite() && spec.bin_size > 0.0) {
        return Err(Error::Config(format!(
            "bin size {} must be positive",
            spec.bin_size
        )));
    }
    let (min, max) = spec.range;
    if !(min.is_finite() && max.is_finite() && min <= max) {
        return Err(Error::Config(format!("bad histogram range ({min}, {max})")));
    }
    let bins = ((max - min) / spec.bin_size).floor() as usize + 1;
    let edges: Vec<f64> = (0..bins).map(|k| min + k as f64 * spec.bin_size).collect();
    let mut counts = vec![vec![0usize; bins]; 2];
    for s in &ds.samples {
        let v = s.values[spec.feature - 1];
        let k = (((v - min) / spec.bin_size).floor() as isize).clamp(0, bins as isize - 1);
        counts[s.label][k as usize] += 1;
    }
    Ok(ClassHistogram {
        spec: *spec,
        edges,
        counts,
    })
}

/// Writes bin lower edges and per-class counts as CSV.
pub fn write_histogram_csv(
    hist: &ClassHistogram,
    class_names: &[String; 2],
    writer: impl Write,
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["bin_lower_edge", &class_names[0], &class_names[1]])?;
    for (k, edge) in hist.edges.iter().enumerate() {
        wtr.write_record(&[
            edge.to_string(),
            hist.counts[0][k].to_string(),
            hist.counts[1][k].to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
