//! Dataset ingestion, mean imputation, normalization divisors and
//! feature masks.
//!
//! The on-disk format is one header row (feature names in registry order
//! plus a trailing label column), comma or semicolon separated, dot
//! decimals, UTF-8. Empty cells are treated as missing and later replaced
//! by the feature's mean over the observed values.

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::registry::FeatureRegistry;

/// One labeled observation. `values` has one entry per registry feature;
/// `missing` marks cells that were empty on ingestion (cleared by
/// imputation).
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub values: Vec<f64>,
    pub label: usize,
    pub missing: Vec<bool>,
}

impl Sample {
    pub fn new(values: Vec<f64>, label: usize) -> Self {
        let missing = vec![false; values.len()];
        Self {
            values,
            label,
            missing,
        }
    }

    /// Copy with the mask's removed components zeroed; label unchanged.
    /// Idempotent.
    pub fn masked(&self, mask: &FeatureMask) -> Sample {
        let mut out = self.clone();
        for z in mask.removed() {
            out.values[z - 1] = 0.0;
        }
        out
    }
}

/// Zeroes the removed components of a sample (see [`Sample::masked`]).
pub fn apply_mask(sample: &Sample, mask: &FeatureMask) -> Sample {
    sample.masked(mask)
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub registry: FeatureRegistry,
    pub samples: Vec<Sample>,
}

impl Dataset {
    pub fn new(registry: FeatureRegistry, samples: Vec<Sample>) -> Result<Self> {
        let nf = registry.feature_count();
        for (i, s) in samples.iter().enumerate() {
            if s.values.len() != nf || s.missing.len() != nf {
                return Err(Error::Shape(format!(
                    "sample {i} has {} values, registry has {nf} features",
                    s.values.len()
                )));
            }
            if s.label > 1 {
                return Err(Error::Label {
                    row: i + 2,
                    value: s.label.to_string(),
                });
            }
        }
        Ok(Self { registry, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn feature_count(&self) -> usize {
        self.registry.feature_count()
    }

    pub fn class_count(&self, label: usize) -> usize {
        self.samples.iter().filter(|s| s.label == label).count()
    }

    pub fn has_missing(&self) -> bool {
        self.samples.iter().any(|s| s.missing.iter().any(|&m| m))
    }

    /// Loads a CSV file against a known registry. Row order is preserved;
    /// empty cells become missing flags.
    pub fn load_csv(path: impl AsRef<Path>, registry: FeatureRegistry, delimiter: u8) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(file, registry, delimiter)
    }

    pub fn read_csv(reader: impl Read, registry: FeatureRegistry, delimiter: u8) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .delimiter(delimiter)
            .flexible(true)
            .from_reader(reader);

        let nf = registry.feature_count();
        let header = rdr.headers()?.clone();
        if header.len() != nf + 1 {
            return Err(Error::Schema {
                column: header.len().min(nf + 1),
                expected: format!("{} columns ({nf} features + label)", nf + 1),
                found: format!("{} columns", header.len()),
            });
        }
        for z in 1..=nf {
            let found = header.get(z - 1).unwrap_or("").trim();
            let expected = registry.name(z);
            if !found.eq_ignore_ascii_case(expected) {
                return Err(Error::Schema {
                    column: z,
                    expected: expected.to_string(),
                    found: found.to_string(),
                });
            }
        }

        let mut samples = Vec::new();
        for (idx, record) in rdr.records().enumerate() {
            let record = record?;
            let row = idx + 2; // 1-based, after the header
            if record.len() != nf + 1 {
                return Err(Error::Parse {
                    row,
                    column: record.len().min(nf + 1),
                    value: format!("{} fields, expected {}", record.len(), nf + 1),
                });
            }
            let mut values = vec![0.0; nf];
            let mut missing = vec![false; nf];
            for z in 1..=nf {
                let cell = record.get(z - 1).unwrap_or("").trim();
                if cell.is_empty() {
                    missing[z - 1] = true;
                    continue;
                }
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => values[z - 1] = v,
                    Ok(_) => missing[z - 1] = true, // literal NaN/inf cells
                    Err(_) => {
                        return Err(Error::Parse {
                            row,
                            column: z,
                            value: cell.to_string(),
                        })
                    }
                }
            }
            let label_cell = record.get(nf).unwrap_or("").trim();
            let parsed = label_cell.parse::<f64>().unwrap_or(f64::NAN);
            let label = if parsed == 0.0 {
                0
            } else if parsed == 1.0 {
                1
            } else {
                return Err(Error::Label {
                    row,
                    value: label_cell.to_string(),
                });
            };
            samples.push(Sample {
                values,
                label,
                missing,
            });
        }
        Dataset::new(registry, samples)
    }

    /// Builds a registry from the header itself (all columns but the last
    /// become features) and loads the rows against it.
    pub fn load_csv_custom(path: impl AsRef<Path>, delimiter: u8) -> Result<Self> {
        let file = std::fs::File::open(&path)?;
        let mut rdr = csv::ReaderBuilder::new()
            .delimiter(delimiter)
            .from_reader(file);
        let header = rdr.headers()?.clone();
        if header.len() < 2 {
            return Err(Error::Schema {
                column: 1,
                expected: "at least one feature column and a label column".into(),
                found: format!("{} columns", header.len()),
            });
        }
        let names: Vec<String> = header
            .iter()
            .take(header.len() - 1)
            .map(|s| s.trim().to_string())
            .collect();
        let registry = FeatureRegistry::new(names, ["class 0".into(), "class 1".into()], None)?;
        drop(rdr);
        Self::load_csv(path, registry, delimiter)
    }

    /// Writes the same dialect the loader reads; missing cells are empty.
    pub fn write_csv(&self, writer: impl Write, delimiter: u8) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new()
            .delimiter(delimiter)
            .from_writer(writer);
        let mut header: Vec<&str> = self.registry.names().iter().map(|s| s.as_str()).collect();
        header.push("label");
        wtr.write_record(&header)?;
        for s in &self.samples {
            let mut row: Vec<String> = Vec::with_capacity(s.values.len() + 1);
            for (v, &m) in s.values.iter().zip(&s.missing) {
                row.push(if m { String::new() } else { v.to_string() });
            }
            row.push(s.label.to_string());
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Replaces every missing cell with the arithmetic mean of the
    /// feature's observed values over the whole dataset and clears the
    /// flags. Observed cells are left bit-identical; idempotent.
    pub fn impute_means(&self) -> Result<Dataset> {
        let nf = self.feature_count();
        let mut means = vec![0.0; nf];
        for (z, mean) in means.iter_mut().enumerate() {
            let mut sum = 0.0;
            let mut count = 0usize;
            for s in &self.samples {
                if !s.missing[z] {
                    sum += s.values[z];
                    count += 1;
                }
            }
            if count == 0 && self.samples.iter().any(|s| s.missing[z]) {
                return Err(Error::Imputation {
                    feature: self.registry.name(z + 1).to_string(),
                });
            }
            *mean = if count == 0 { 0.0 } else { sum / count as f64 };
        }
        let samples = self
            .samples
            .iter()
            .map(|s| {
                let mut out = s.clone();
                for ((value, missing), mean) in
                    out.values.iter_mut().zip(&mut out.missing).zip(&means)
                {
                    if *missing {
                        *value = *mean;
                        *missing = false;
                    }
                }
                out
            })
            .collect();
        Dataset::new(self.registry.clone(), samples)
    }

    /// Divisors over all samples; see [`normalization_divisors`].
    pub fn normalization_divisors(&self, mask: &FeatureMask) -> Vec<f64> {
        normalization_divisors(&self.samples, mask)
    }
}

/// Per-feature normalization divisors from a training set: the maximum
/// absolute value of each feature after masking, with 1 substituted for
/// all-zero (or masked-out) columns. Frozen from the training fold and
/// reused for test samples.
pub fn normalization_divisors(training: &[Sample], mask: &FeatureMask) -> Vec<f64> {
    let nf = mask.feature_count();
    let mut div = vec![0.0f64; nf];
    for s in training {
        for z in mask.selected() {
            div[z - 1] = div[z - 1].max(s.values[z - 1].abs());
        }
    }
    for d in &mut div {
        if *d == 0.0 {
            *d = 1.0;
        }
    }
    div
}

/// A removed/selected split of the feature indices `1..=NF`. The two
/// views are complements; masking zeroes the removed components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureMask {
    feature_count: usize,
    removed: BTreeSet<usize>,
}

impl FeatureMask {
    /// Mask that keeps every feature.
    pub fn all_selected(feature_count: usize) -> Self {
        Self {
            feature_count,
            removed: BTreeSet::new(),
        }
    }

    /// Mask from the removed set `FR`.
    pub fn from_removed(
        feature_count: usize,
        removed: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let removed: BTreeSet<usize> = removed.into_iter().collect();
        if let Some(&z) = removed.iter().find(|&&z| z < 1 || z > feature_count) {
            return Err(Error::Mask(format!(
                "index {z} outside 1..={feature_count}"
            )));
        }
        Ok(Self {
            feature_count,
            removed,
        })
    }

    /// Mask from the selected set `FS` (everything else is removed).
    pub fn from_selected(
        feature_count: usize,
        selected: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let selected: BTreeSet<usize> = selected.into_iter().collect();
        if let Some(&z) = selected.iter().find(|&&z| z < 1 || z > feature_count) {
            return Err(Error::Mask(format!(
                "index {z} outside 1..={feature_count}"
            )));
        }
        let removed = (1..=feature_count).filter(|z| !selected.contains(z)).collect();
        Ok(Self {
            feature_count,
            removed,
        })
    }

    pub fn feature_count(&self) -> usize {
        self.feature_count
    }

    pub fn is_removed(&self, z: usize) -> bool {
        self.removed.contains(&z)
    }

    /// Removed indices `FR`, ascending.
    pub fn removed(&self) -> impl Iterator<Item = usize> + '_ {
        self.removed.iter().copied()
    }

    /// Selected indices `FS`, ascending.
    pub fn selected(&self) -> Vec<usize> {
        (1..=self.feature_count)
            .filter(|z| !self.removed.contains(z))
            .collect()
    }

    pub fn removed_count(&self) -> usize {
        self.removed.len()
    }

    pub fn selected_count(&self) -> usize {
        self.feature_count - self.removed.len()
    }

    /// New mask with `z` also removed.
    pub fn with_removed(&self, z: usize) -> Result<Self> {
        if z < 1 || z > self.feature_count {
            return Err(Error::Mask(format!(
                "index {z} outside 1..={}",
                self.feature_count
            )));
        }
        let mut removed = self.removed.clone();
        removed.insert(z);
        Ok(Self {
            feature_count: self.feature_count,
            removed,
        })
    }
}
