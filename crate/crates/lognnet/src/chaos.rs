//! Chaotic congruential generator and reservoir matrix filling.
//!
//! The recurrence is `x_{n+1} = (D - K*x_n) mod L` with initial state
//! `x_1 = C`. Successive states, divided by `L`, fill the reservoir
//! matrix `W` one column at a time: outer loop over columns `j = 1..=P`,
//! inner loop over rows `i = 0..=N`, one state per cell. The same stream
//! can be replayed column by column, which is what the RAM-saving
//! deployment mode relies on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the congruential map. `K`, `D`, `C` are dimensionless
/// reals; `L` is the modulus and must be positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub k: f64,
    pub d: f64,
    pub l: f64,
    pub c: f64,
}

impl GeneratorParams {
    pub fn new(k: f64, d: f64, l: f64, c: f64) -> Result<Self> {
        let p = Self { k, d, l, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("K", self.k), ("D", self.d), ("L", self.l), ("C", self.c)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} = {v} is not finite")));
            }
        }
        if self.l <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "L = {} must be positive",
                self.l
            )));
        }
        Ok(())
    }

    /// Published optimum for the SARS-CoV-2-RBV1 (diagnosis) dataset.
    pub fn published_rbv1() -> Self {
        Self {
            k: 93.0,
            d: 68.0,
            l: 9276.0,
            c: 73.0,
        }
    }

    /// Published optimum for the SARS-CoV-2-RBV2 (prognosis) dataset.
    pub fn published_rbv2() -> Self {
        Self {
            k: 47.0,
            d: 99.0,
            l: 8941.0,
            c: 56.0,
        }
    }
}

/// Sign convention for reducing the (possibly negative) update modulo `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modulo {
    /// Remainder in `[0, L)` regardless of the dividend's sign. Keeps all
    /// reservoir entries in `[0, 1)` and is the default.
    #[default]
    Euclidean,
    /// Remainder carries the dividend's sign, as `%` does. Kept for
    /// comparison runs; entries land in `(-1, 1)`.
    Truncated,
}

fn reduce(v: f64, l: f64, modulo: Modulo) -> f64 {
    match modulo {
        Modulo::Euclidean => {
            let r = v.rem_euclid(l);
            // rem_euclid can return exactly `l` for tiny negative inputs.
            if r >= l {
                0.0
            } else {
                r
            }
        }
        Modulo::Truncated => v % l,
    }
}

/// One step of the recurrence under the default (Euclidean) convention.
pub fn next_state(x: f64, p: &GeneratorParams) -> Result<f64> {
    next_state_with(x, p, Modulo::Euclidean)
}

/// One step of the recurrence under an explicit modulo convention.
pub fn next_state_with(x: f64, p: &GeneratorParams, modulo: Modulo) -> Result<f64> {
    p.validate()?;
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("state {x} is not finite")));
    }
    Ok(reduce(p.d - p.k * x, p.l, modulo))
}

/// Iterator over successive generator states, starting with the state
/// produced from `x_1 = C`. Parameters are validated at construction, so
/// iteration itself cannot fail.
#[derive(Debug, Clone)]
pub struct StateIter {
    params: GeneratorParams,
    modulo: Modulo,
    state: f64,
}

impl StateIter {
    pub fn new(params: GeneratorParams, modulo: Modulo) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            state: params.c,
            params,
            modulo,
        })
    }
}

impl Iterator for StateIter {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        self.state = reduce(self.params.d - self.params.k * self.state, self.params.l, self.modulo);
        Some(self.state)
    }
}

/// Reservoir matrix `W` with rows `i = 0..=N` and columns `j = 1..=P`.
/// Stored column by column in generation order, so one column is a
/// contiguous slice.
#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirMatrix {
    rows: usize, // N + 1
    cols: usize, // P
    data: Vec<f64>,
}

impl ReservoirMatrix {
    /// Number of rows, `N + 1`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns, `P`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry `W[i][j]` with `i` in `0..=N` and `j` in `1..=P` (the
    /// 1-based column convention the fill algorithm is written in).
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.rows && (1..=self.cols).contains(&j));
        self.data[(j - 1) * self.rows + i]
    }

    /// Column `j` (1-based) as a contiguous slice over `i = 0..=N`.
    pub fn column(&self, j: usize) -> &[f64] {
        assert!((1..=self.cols).contains(&j));
        &self.data[(j - 1) * self.rows..j * self.rows]
    }

    /// All entries in generation order (column 1 first).
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Fills an `(N+1) x P` reservoir under the default modulo convention.
pub fn fill_reservoir(p: &GeneratorParams, n: usize, cols: usize) -> Result<ReservoirMatrix> {
    fill_reservoir_with(p, n, cols, Modulo::Euclidean)
}

/// Fills the reservoir, advancing the state once per cell in column-major
/// order and storing `x / L`. Deterministic: identical inputs give
/// bit-identical matrices.
pub fn fill_reservoir_with(
    p: &GeneratorParams,
    n: usize,
    cols: usize,
    modulo: Modulo,
) -> Result<ReservoirMatrix> {
    if n < 1 || cols < 1 {
        return Err(Error::Shape(format!(
            "reservoir needs N >= 1 and P >= 1, got N = {n}, P = {cols}"
        )));
    }
    let mut states = StateIter::new(*p, modulo)?;
    let rows = n + 1;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        data.push(states.next().expect("infinite iterator") / p.l);
    }
    Ok(ReservoirMatrix { rows, cols, data })
}

/// Streams reservoir columns without materializing the whole matrix.
/// Yields columns `j = 1, 2, ..` in order; each is bit-identical to the
/// corresponding column of [`fill_reservoir_with`].
#[derive(Debug, Clone)]
pub struct ColumnStream {
    states: StateIter,
    l: f64,
    rows: usize,
}

impl ColumnStream {
    pub fn new(p: &GeneratorParams, n: usize, modulo: Modulo) -> Result<Self> {
        if n < 1 {
            return Err(Error::Shape(format!("reservoir needs N >= 1, got N = {n}")));
        }
        Ok(Self {
            states: StateIter::new(*p, modulo)?,
            l: p.l,
            rows: n + 1,
        })
    }

    /// Writes the next column into `buf` (resized to `N + 1`).
    pub fn next_column(&mut self, buf: &mut Vec<f64>) {
        buf.clear();
        buf.extend(
            (&mut self.states)
                .take(self.rows)
                .map(|x| x / self.l),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Straight-line transcription of the fill loop, kept independent of
    // the implementation above.
    fn oracle_fill(p: &GeneratorParams, n: usize, cols: usize) -> Vec<Vec<f64>> {
        let mut w = vec![vec![0.0; cols + 1]; n + 1];
        let mut x = p.c;
        for j in 1..=cols {
            for row in w.iter_mut().take(n + 1) {
                let v = p.d - p.k * x;
                x = v - p.l * (v / p.l).floor();
                if x >= p.l {
                    x = 0.0;
                }
                row[j] = x / p.l;
            }
        }
        w
    }

    #[test]
    fn hand_evaluated_steps() {
        let rbv1 = GeneratorParams::published_rbv1();
        assert_eq!(next_state(73.0, &rbv1).unwrap(), 2555.0);
        let rbv2 = GeneratorParams::published_rbv2();
        assert_eq!(next_state(56.0, &rbv2).unwrap(), 6408.0);
    }

    #[test]
    fn zero_k_collapses_to_constant() {
        let p = GeneratorParams::new(0.0, 5.0, 7.0, 0.0).unwrap();
        for x in [-3.0, 0.0, 123.456] {
            assert_eq!(next_state(x, &p).unwrap(), 5.0);
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(GeneratorParams::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(GeneratorParams::new(1.0, 1.0, -2.0, 1.0).is_err());
        assert!(GeneratorParams::new(f64::NAN, 1.0, 2.0, 1.0).is_err());
        let p = GeneratorParams::published_rbv1();
        assert!(next_state(f64::INFINITY, &p).is_err());
    }

    #[test]
    fn truncated_convention_keeps_sign() {
        let p = GeneratorParams::published_rbv1();
        // 68 - 93*73 = -6721; truncated remainder stays negative.
        assert_eq!(next_state_with(73.0, &p, Modulo::Truncated).unwrap(), -6721.0);
        assert_eq!(next_state(73.0, &p).unwrap(), 2555.0);
    }

    #[test]
    fn single_cell_fill_matches_oracle() {
        let p = GeneratorParams::published_rbv1();
        let w = fill_reservoir(&p, 1, 1).unwrap();
        let oracle = oracle_fill(&p, 1, 1);
        assert_eq!(w.entry(0, 1), 2555.0 / 9276.0);
        assert_eq!(w.entry(1, 1), 3629.0 / 9276.0);
        assert_eq!(w.entry(0, 1), oracle[0][1]);
        assert_eq!(w.entry(1, 1), oracle[1][1]);
    }

    #[test]
    fn constant_zero_state_gives_zero_matrix() {
        let p = GeneratorParams::new(0.0, 0.0, 2.0, 0.0).unwrap();
        let w = fill_reservoir(&p, 2, 3).unwrap();
        assert!(w.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn full_shape_fill_matches_oracle() {
        let p = GeneratorParams::published_rbv2();
        let w = fill_reservoir(&p, 51, 50).unwrap();
        assert_eq!(w.entry(0, 1), 6408.0 / 8941.0);
        let oracle = oracle_fill(&p, 51, 50);
        for j in 1..=50 {
            for i in 0..=51 {
                assert_eq!(w.entry(i, j), oracle[i][j], "mismatch at ({i}, {j})");
            }
        }
    }

    #[test]
    fn fill_order_matches_raw_sequence() {
        let p = GeneratorParams::published_rbv1();
        let w = fill_reservoir(&p, 2, 3).unwrap();
        let states: Vec<f64> = StateIter::new(p, Modulo::Euclidean)
            .unwrap()
            .take(9)
            .map(|x| x / p.l)
            .collect();
        assert_eq!(w.as_slice(), &states[..]);
    }

    #[test]
    fn entries_bounded_in_unit_interval() {
        for p in [GeneratorParams::published_rbv1(), GeneratorParams::published_rbv2()] {
            let w = fill_reservoir(&p, 10, 20).unwrap();
            assert!(w.as_slice().iter().all(|&v| (0.0..1.0).contains(&v)));
        }
    }

    #[test]
    fn column_stream_replays_fill() {
        let p = GeneratorParams::published_rbv2();
        let w = fill_reservoir(&p, 5, 4).unwrap();
        let mut stream = ColumnStream::new(&p, 5, Modulo::Euclidean).unwrap();
        let mut buf = Vec::new();
        for j in 1..=4 {
            stream.next_column(&mut buf);
            assert_eq!(&buf[..], w.column(j));
        }
    }

    #[test]
    fn determinism() {
        let p = GeneratorParams::new(-57.25, 12.0, 991.5, 3.25).unwrap();
        let a = fill_reservoir(&p, 7, 9).unwrap();
        let b = fill_reservoir(&p, 7, 9).unwrap();
        assert_eq!(a, b);
    }
}
