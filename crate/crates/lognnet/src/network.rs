//! The N:P:H:M reservoir network: input normalization, fixed reservoir
//! projection, per-sample projection scaling, and a two-layer classifier
//! head (logistic hidden layer, softmax output).
//!
//! Inference never mutates the model, so shared references are safe to
//! use from many threads. The reservoir can be materialized or
//! regenerated column by column from the generator parameters; both paths
//! produce bit-identical traces, which is what makes the RAM-saving
//! deployment estimate meaningful.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chaos::{fill_reservoir, ColumnStream, GeneratorParams, Modulo, ReservoirMatrix};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Layer sizes: `inputs` features in, `reservoir_outputs` projection
/// dimensions, `hidden` neurons, `classes` outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkShape {
    pub inputs: usize,
    pub reservoir_outputs: usize,
    pub hidden: usize,
    pub classes: usize,
}

impl NetworkShape {
    pub fn new(inputs: usize, reservoir_outputs: usize, hidden: usize, classes: usize) -> Result<Self> {
        let s = Self {
            inputs,
            reservoir_outputs,
            hidden,
            classes,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("N", self.inputs),
            ("P", self.reservoir_outputs),
            ("H", self.hidden),
            ("M", self.classes),
        ] {
            if v < 1 {
                return Err(Error::Shape(format!("{name} must be at least 1, got {v}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for NetworkShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}:{}",
            self.inputs, self.reservoir_outputs, self.hidden, self.classes
        )
    }
}

impl FromStr for NetworkShape {
    type Err = Error;

    /// Parses the `N:P:H:M` notation, e.g. `51:50:20:2`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(Error::Shape(format!("expected N:P:H:M, got \"{s}\"")));
        }
        let mut dims = [0usize; 4];
        for (d, part) in dims.iter_mut().zip(&parts) {
            *d = part
                .trim()
                .parse()
                .map_err(|_| Error::Shape(format!("bad dimension \"{part}\" in \"{s}\"")))?;
        }
        NetworkShape::new(dims[0], dims[1], dims[2], dims[3])
    }
}

/// Trainable head weights. Column 0 of each matrix multiplies the bias
/// element of the incoming layer.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierWeights {
    /// H x (P+1)
    pub hidden: DenseMatrix,
    /// M x (H+1)
    pub output: DenseMatrix,
}

/// How the reservoir projection is held.
#[derive(Debug, Clone)]
pub enum ReservoirStorage {
    Materialized(ReservoirMatrix),
    /// Regenerate each column from the generator during projection,
    /// keeping only one column buffer live.
    OnDemand,
}

#[derive(Debug, Clone)]
pub struct LogNNetModel {
    pub shape: NetworkShape,
    pub generator: GeneratorParams,
    pub modulo: Modulo,
    pub reservoir: ReservoirStorage,
    /// Per-feature normalization divisors, all positive.
    pub divisors: Vec<f64>,
    pub weights: ClassifierWeights,
}

/// Every intermediate layer of one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    /// Y: bias 1 followed by the normalized inputs, length N+1.
    pub input_layer: Vec<f64>,
    /// S': raw reservoir projection, length P.
    pub projection: Vec<f64>,
    /// S_h: bias 1 followed by the scaled projection, length P+1.
    pub reservoir_layer: Vec<f64>,
    /// S_h2: logistic hidden activations, length H.
    pub hidden_layer: Vec<f64>,
    /// S_out: softmax probabilities, length M, summing to 1.
    pub output: Vec<f64>,
}

/// Builds a model: reservoir filled from the generator, head weights
/// drawn uniformly from [-0.5, 0.5] by a seeded generator. The same seed
/// gives a bit-identical model.
pub fn init_model(
    shape: NetworkShape,
    generator: GeneratorParams,
    divisors: Vec<f64>,
    seed: u64,
) -> Result<LogNNetModel> {
    shape.validate()?;
    if divisors.len() != shape.inputs {
        return Err(Error::Shape(format!(
            "{} divisors for {} inputs",
            divisors.len(),
            shape.inputs
        )));
    }
    if let Some(d) = divisors.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
        return Err(Error::Config(format!("divisor {d} must be positive")));
    }
    let reservoir = fill_reservoir(&generator, shape.inputs, shape.reservoir_outputs)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |rows: usize, cols: usize| {
        let data = (0..rows * cols)
            .map(|_| rng.random::<f64>() - 0.5)
            .collect();
        DenseMatrix::from_vec(rows, cols, data)
    };
    let hidden = draw(shape.hidden, shape.reservoir_outputs + 1);
    let output = draw(shape.classes, shape.hidden + 1);

    Ok(LogNNetModel {
        shape,
        generator,
        modulo: Modulo::Euclidean,
        reservoir: ReservoirStorage::Materialized(reservoir),
        divisors,
        weights: ClassifierWeights { hidden, output },
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

impl LogNNetModel {
    /// Switches to regenerate-on-demand projection (drops the stored
    /// matrix) or back to a materialized one.
    pub fn set_storage(&mut self, storage: ReservoirStorage) -> Result<()> {
        if let ReservoirStorage::Materialized(w) = &storage {
            if w.rows() != self.shape.inputs + 1 || w.cols() != self.shape.reservoir_outputs {
                return Err(Error::Shape(format!(
                    "reservoir is {}x{}, shape wants {}x{}",
                    w.rows(),
                    w.cols(),
                    self.shape.inputs + 1,
                    self.shape.reservoir_outputs
                )));
            }
        }
        self.reservoir = storage;
        Ok(())
    }

    fn input_layer(&self, features: &[f64]) -> Result<Vec<f64>> {
        if features.len() != self.shape.inputs {
            return Err(Error::Shape(format!(
                "{} input values for {} features",
                features.len(),
                self.shape.inputs
            )));
        }
        let mut y = Vec::with_capacity(self.shape.inputs + 1);
        y.push(1.0);
        y.extend(features.iter().zip(&self.divisors).map(|(v, d)| v / d));
        Ok(y)
    }

    fn project(&self, y: &[f64]) -> Result<Vec<f64>> {
        let p = self.shape.reservoir_outputs;
        let mut s = Vec::with_capacity(p);
        match &self.reservoir {
            ReservoirStorage::Materialized(w) => {
                for j in 1..=p {
                    s.push(dot(w.column(j), y));
                }
            }
            ReservoirStorage::OnDemand => {
                let mut stream = ColumnStream::new(&self.generator, self.shape.inputs, self.modulo)?;
                let mut col = Vec::with_capacity(self.shape.inputs + 1);
                for _ in 1..=p {
                    stream.next_column(&mut col);
                    s.push(dot(&col, y));
                }
            }
        }
        Ok(s)
    }

    /// Reservoir output S_h for one input: bias 1 followed by the
    /// projection scaled by its own largest magnitude (1 if all zero).
    /// This is the layer the trainable head consumes; it is fixed during
    /// head training.
    pub fn reservoir_layer(&self, features: &[f64]) -> Result<Vec<f64>> {
        let y = self.input_layer(features)?;
        let s = self.project(&y)?;
        Ok(scale_projection(&s))
    }

    /// Head forward from a precomputed S_h: returns (S_h2, S_out).
    pub fn head_forward(&self, reservoir_layer: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let hidden: Vec<f64> = (0..self.shape.hidden)
            .map(|r| sigmoid(dot(self.weights.hidden.row(r), reservoir_layer)))
            .collect();
        let mut augmented = Vec::with_capacity(self.shape.hidden + 1);
        augmented.push(1.0);
        augmented.extend_from_slice(&hidden);
        let logits: Vec<f64> = (0..self.shape.classes)
            .map(|r| dot(self.weights.output.row(r), &augmented))
            .collect();
        (hidden, softmax(&logits))
    }

    /// Full forward pass with every intermediate layer.
    pub fn forward(&self, features: &[f64]) -> Result<ForwardTrace> {
        let input_layer = self.input_layer(features)?;
        let projection = self.project(&input_layer)?;
        let reservoir_layer = scale_projection(&projection);
        let (hidden_layer, output) = self.head_forward(&reservoir_layer);
        Ok(ForwardTrace {
            input_layer,
            projection,
            reservoir_layer,
            hidden_layer,
            output,
        })
    }

    /// Argmax class; ties break toward the lower index.
    pub fn predict(&self, features: &[f64]) -> Result<usize> {
        let trace = self.forward(features)?;
        Ok(argmax(&trace.output))
    }

    /// Serializes everything but the reservoir, which is regenerated from
    /// the generator parameters on load.
    pub fn save_json(&self, writer: impl Write) -> Result<()> {
        let doc = ModelDocument {
            format_version: FORMAT_VERSION,
            shape: self.shape,
            generator: self.generator,
            modulo: self.modulo,
            on_demand: matches!(self.reservoir, ReservoirStorage::OnDemand),
            divisors: self.divisors.clone(),
            hidden_weights: self.weights.hidden.data().to_vec(),
            output_weights: self.weights.output.data().to_vec(),
        };
        serde_json::to_writer_pretty(writer, &doc)?;
        Ok(())
    }

    pub fn load_json(reader: impl Read) -> Result<LogNNetModel> {
        let doc: ModelDocument = serde_json::from_reader(reader)?;
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::Config(format!(
                "unsupported model format version {}",
                doc.format_version
            )));
        }
        doc.shape.validate()?;
        let (h, p, m) = (
            doc.shape.hidden,
            doc.shape.reservoir_outputs,
            doc.shape.classes,
        );
        if doc.hidden_weights.len() != h * (p + 1) || doc.output_weights.len() != m * (doc.shape.hidden + 1) {
            return Err(Error::Shape("weight buffers do not match the shape".into()));
        }
        if doc.divisors.len() != doc.shape.inputs {
            return Err(Error::Shape("divisor count does not match the shape".into()));
        }
        let reservoir = if doc.on_demand {
            ReservoirStorage::OnDemand
        } else {
            ReservoirStorage::Materialized(fill_reservoir(
                &doc.generator,
                doc.shape.inputs,
                doc.shape.reservoir_outputs,
            )?)
        };
        Ok(LogNNetModel {
            shape: doc.shape,
            generator: doc.generator,
            modulo: doc.modulo,
            reservoir,
            divisors: doc.divisors,
            weights: ClassifierWeights {
                hidden: DenseMatrix::from_vec(h, p + 1, doc.hidden_weights),
                output: DenseMatrix::from_vec(m, h + 1, doc.output_weights),
            },
        })
    }
}

const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    format_version: u32,
    shape: NetworkShape,
    generator: GeneratorParams,
    modulo: Modulo,
    on_demand: bool,
    divisors: Vec<f64>,
    /// Row-major H x (P+1).
    hidden_weights: Vec<f64>,
    /// Row-major M x (H+1).
    output_weights: Vec<f64>,
}

fn scale_projection(projection: &[f64]) -> Vec<f64> {
    let scale = projection.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if scale == 0.0 { 1.0 } else { scale };
    let mut out = Vec::with_capacity(projection.len() + 1);
    out.push(1.0);
    out.extend(projection.iter().map(|v| v / scale));
    out
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Byte-level memory estimate for an embedded deployment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FootprintBreakdown {
    pub reservoir_bytes: usize,
    pub classifier_bytes: usize,
    pub buffer_bytes: usize,
    pub total_bytes: usize,
}

/// Estimates RAM use: the reservoir (full matrix, or a single column
/// buffer when `ram_saving` regenerates columns on the fly), the head
/// weights, and the layer buffers Y, S_h, S_h2 and S_out.
pub fn estimate_footprint(
    shape: NetworkShape,
    bytes_per_weight: usize,
    ram_saving: bool,
) -> Result<FootprintBreakdown> {
    shape.validate()?;
    if bytes_per_weight < 1 {
        return Err(Error::Config("bytes_per_weight must be at least 1".into()));
    }
    let (n, p, h, m) = (
        shape.inputs,
        shape.reservoir_outputs,
        shape.hidden,
        shape.classes,
    );
    let reservoir_bytes = if ram_saving {
        (n + 1) * bytes_per_weight
    } else {
        (n + 1) * p * bytes_per_weight
    };
    let classifier_bytes = (h * (p + 1) + m * (h + 1)) * bytes_per_weight;
    let buffer_bytes = ((n + 1) + (p + 1) + h + m) * bytes_per_weight;
    Ok(FootprintBreakdown {
        reservoir_bytes,
        classifier_bytes,
        buffer_bytes,
        total_bytes: reservoir_bytes + classifier_bytes + buffer_bytes,
    })
}
