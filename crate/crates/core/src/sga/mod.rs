//! Monte Carlo model of a Stern-Gerlach detection screen.
//!
//! A particle lands at `x = scale·m + noise`, where `m` is its spin value.
//! In the sharp model `m = ±1` exactly and all spread comes from the device.
//! In the unsharp model `m` itself is drawn around `±1`. With Gaussian
//! spreads both models give the same two-component Gaussian mixture when the
//! total variance per population matches.

mod rng;

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quantum::{bell_like_basis, BellLabel, QuantumError, State};

pub use rng::CounterStreams;

#[derive(Debug, Error)]
pub enum SgaError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("histograms have different binning")]
    BinningMismatch,
    #[error("Bell-basis sampling needs a two-qubit state, got dimension {0}")]
    NotTwoQubit(usize),
    #[error("Born probabilities sum to {0}")]
    BadProbabilities(f64),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error("writing {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, SgaError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Sharp,
    Unsharp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SgaConfig {
    pub p_up: f64,
    pub deflection_scale: f64,
    pub spin_sd: f64,
    pub device_sd: f64,
    pub model: Model,
    pub n_samples: usize,
    pub seed: u64,
    pub bins: usize,
    pub range: (f64, f64),
}

impl Default for SgaConfig {
    fn default() -> Self {
        Self {
            p_up: 0.5,
            deflection_scale: 1.0,
            spin_sd: 0.05,
            device_sd: 0.15,
            model: Model::Unsharp,
            n_samples: 100_000,
            seed: 0,
            bins: 100,
            range: (-2.0, 2.0),
        }
    }
}

impl SgaConfig {
    /// Checks ranges and zeroes `spin_sd` for the sharp model.
    pub fn normalized(mut self) -> Result<Self> {
        let bad = |m: &str| Err(SgaError::InvalidConfig(m.to_string()));
        if !(0.0..=1.0).contains(&self.p_up) {
            return bad("p_up must lie in [0, 1]");
        }
        if !(self.deflection_scale > 0.0 && self.deflection_scale.is_finite()) {
            return bad("deflection_scale must be > 0");
        }
        if !(self.spin_sd >= 0.0 && self.device_sd >= 0.0) {
            return bad("standard deviations must be >= 0");
        }
        if self.n_samples == 0 {
            return bad("n_samples must be positive");
        }
        if self.bins < 2 {
            return bad("bins must be >= 2");
        }
        if !(self.range.0 < self.range.1) {
            return bad("range must satisfy x_lo < x_hi");
        }
        if self.model == Model::Sharp {
            self.spin_sd = 0.0;
        }
        Ok(self)
    }

    /// Standard deviation of each population on the screen.
    pub fn population_sd(&self) -> f64 {
        let spin = match self.model {
            Model::Sharp => 0.0,
            Model::Unsharp => self.spin_sd * self.deflection_scale,
        };
        (spin * spin + self.device_sd * self.device_sd).sqrt()
    }

    /// Sharp configuration with the same per-population mean and variance:
    /// all spread moved into the device noise.
    pub fn matched_sharp(&self) -> Self {
        Self {
            model: Model::Sharp,
            device_sd: self.population_sd(),
            spin_sd: 0.0,
            ..*self
        }
    }
}

fn sample_one(cfg: &SgaConfig, streams: &CounterStreams, index: u64) -> f64 {
    let mut rng = streams.stream(index);
    let u: f64 = rng.random();
    let sign = if u < cfg.p_up { 1.0 } else { -1.0 };
    let spin = match cfg.model {
        Model::Sharp => sign,
        Model::Unsharp => {
            let z: f64 = rng.sample(StandardNormal);
            sign + cfg.spin_sd * z
        }
    };
    let z: f64 = rng.sample(StandardNormal);
    cfg.deflection_scale * spin + cfg.device_sd * z
}

/// Screen positions for `n_samples` particles. Sample `i` depends only on
/// `(seed, i)`; generation runs in parallel with identical output.
pub fn sample_positions(cfg: &SgaConfig) -> Result<Vec<f64>> {
    let cfg = cfg.normalized()?;
    let streams = CounterStreams::new(cfg.seed);
    Ok((0..cfg.n_samples as u64)
        .into_par_iter()
        .map(|i| sample_one(&cfg, &streams, i))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub n_total: u64,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    pub fn empty(bins: usize, range: (f64, f64)) -> Result<Self> {
        if bins < 2 || !(range.0 < range.1) {
            return Err(SgaError::InvalidConfig("need bins >= 2 and x_lo < x_hi".into()));
        }
        let width = (range.1 - range.0) / bins as f64;
        let mut edges: Vec<f64> = (0..=bins).map(|k| range.0 + k as f64 * width).collect();
        edges[bins] = range.1;
        Ok(Self {
            edges,
            counts: vec![0; bins],
            n_total: 0,
            underflow: 0,
            overflow: 0,
        })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// Bins are half-open `[left, right)`; `x ≥ x_hi` is overflow.
    pub fn add(&mut self, x: f64) {
        let lo = self.edges[0];
        let hi = self.edges[self.bins()];
        self.n_total += 1;
        if x < lo {
            self.underflow += 1;
        } else if x >= hi || x.is_nan() {
            self.overflow += 1;
        } else {
            let n = self.bins();
            let k = ((x - lo) / (hi - lo) * n as f64) as usize;
            self.counts[k.min(n - 1)] += 1;
        }
    }

    /// Adds counts from a histogram with identical edges.
    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if self.edges != other.edges {
            return Err(SgaError::BinningMismatch);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.n_total += other.n_total;
        self.underflow += other.underflow;
        self.overflow += other.overflow;
        Ok(())
    }

    /// `bin_left,bin_right,count` rows, then `underflow,<n>` and
    /// `overflow,<n>`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_left,bin_right,count\n");
        for (k, c) in self.counts.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", self.edges[k], self.edges[k + 1], c);
        }
        let _ = writeln!(out, "underflow,{}", self.underflow);
        let _ = writeln!(out, "overflow,{}", self.overflow);
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|source| SgaError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

pub fn histogram(samples: &[f64], bins: usize, range: (f64, f64)) -> Result<Histogram> {
    let empty = Histogram::empty(bins, range)?;
    samples
        .par_chunks(65_536)
        .map(|chunk| {
            let mut h = empty.clone();
            chunk.iter().for_each(|&x| h.add(x));
            h
        })
        .collect::<Vec<_>>()
        .into_iter()
        .try_fold(empty.clone(), |mut acc, h| {
            acc.merge(&h)?;
            Ok(acc)
        })
}

/// Half the L1 distance between two normalized histograms, counting
/// underflow and overflow as extra bins.
pub fn tv_distance(a: &Histogram, b: &Histogram) -> Result<f64> {
    if a.edges != b.edges {
        return Err(SgaError::BinningMismatch);
    }
    let na = a.n_total.max(1) as f64;
    let nb = b.n_total.max(1) as f64;
    let cells = |h: &Histogram| {
        let mut v = h.counts.clone();
        v.push(h.underflow);
        v.push(h.overflow);
        v
    };
    let sum: f64 = cells(a)
        .iter()
        .zip(cells(b))
        .map(|(&x, y)| (x as f64 / na - y as f64 / nb).abs())
        .sum();
    Ok(0.5 * sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub n_plus: u64,
    pub n_minus: u64,
    /// Fraction above threshold; 0 for an empty sample.
    pub p_plus_hat: f64,
}

/// Counts samples strictly above `threshold` as (+)-detector clicks.
pub fn classify(samples: &[f64], threshold: f64) -> Classification {
    let n_plus = samples.iter().filter(|&&x| x > threshold).count() as u64;
    let n = samples.len() as u64;
    Classification {
        n_plus,
        n_minus: n - n_plus,
        p_plus_hat: if n == 0 { 0.0 } else { n_plus as f64 / n as f64 },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
}

pub fn moments(samples: &[f64]) -> Moments {
    let n = samples.len() as f64;
    if samples.is_empty() {
        return Moments {
            mean: 0.0,
            variance: 0.0,
        };
    }
    let mean = samples.iter().sum::<f64>() / n;
    let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
    Moments {
        mean,
        variance: if samples.len() > 1 { ss / (n - 1.0) } else { 0.0 },
    }
}

pub fn samples_to_csv(samples: &[f64]) -> String {
    let mut out = String::from("x\n");
    for x in samples {
        let _ = writeln!(out, "{x}");
    }
    out
}

/// One unsharp joint measurement of `Z1Z2` and `X1Y2` in the Bell-like
/// basis; `v_yx` follows from the product rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellTriple {
    pub outcome: BellLabel,
    pub v_zz: f64,
    pub v_xy: f64,
    pub v_yx: f64,
}

/// Born probabilities of the four Bell-like outcomes, in basis order.
pub fn bell_probabilities(state: &State) -> Result<[f64; 4]> {
    if state.dim() != 4 {
        return Err(SgaError::NotTwoQubit(state.dim()));
    }
    let basis = bell_like_basis();
    let mut probs = [0.0; 4];
    for (p, (_, b)) in probs.iter_mut().zip(&basis) {
        let amps = b.amplitudes().expect("basis vectors are pure");
        *p = state.probability_of(amps)?.max(0.0);
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(SgaError::BadProbabilities(total));
    }
    Ok(probs)
}

pub fn unsharp_bell_sampling(state: &State, spread: f64, n: usize, seed: u64) -> Result<Vec<BellTriple>> {
    if !(spread >= 0.0 && spread.is_finite()) {
        return Err(SgaError::InvalidConfig("spread must be >= 0".into()));
    }
    let probs = bell_probabilities(state)?;
    let streams = CounterStreams::new(seed);
    Ok((0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = streams.stream(i);
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut outcome = BellLabel::ALL[3];
            for (label, p) in BellLabel::ALL.iter().zip(probs) {
                acc += p;
                if u < acc {
                    outcome = *label;
                    break;
                }
            }
            let (l_zz, l_xy) = outcome.eigenvalues();
            let z1: f64 = rng.sample(StandardNormal);
            let z2: f64 = rng.sample(StandardNormal);
            let v_zz = l_zz + spread * z1;
            let v_xy = l_xy + spread * z2;
            BellTriple {
                outcome,
                v_zz,
                v_xy,
                v_yx: v_zz * v_xy,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_spin_up() {
        let cfg = SgaConfig {
            p_up: 1.0,
            spin_sd: 0.0,
            device_sd: 0.0,
            deflection_scale: 1.7,
            n_samples: 1000,
            ..SgaConfig::default()
        };
        assert!(sample_positions(&cfg).unwrap().iter().all(|&x| x == 1.7));
    }

    #[test]
    fn same_seed_same_stream() {
        let cfg = SgaConfig {
            n_samples: 5000,
            seed: 99,
            ..SgaConfig::default()
        };
        let a = sample_positions(&cfg).unwrap();
        let b = sample_positions(&cfg).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn prefix_is_stable_under_n() {
        let cfg = SgaConfig {
            n_samples: 100,
            seed: 5,
            ..SgaConfig::default()
        };
        let short = sample_positions(&cfg).unwrap();
        let long = sample_positions(&SgaConfig { n_samples: 1000, ..cfg }).unwrap();
        assert_eq!(short[..], long[..100]);
    }

    #[test]
    fn config_validation() {
        let base = SgaConfig::default();
        assert!(SgaConfig { p_up: 1.5, ..base }.normalized().is_err());
        assert!(SgaConfig { bins: 1, ..base }.normalized().is_err());
        assert!(SgaConfig { range: (1.0, 1.0), ..base }.normalized().is_err());
        assert!(SgaConfig { device_sd: -0.1, ..base }.normalized().is_err());
        let sharp = SgaConfig { model: Model::Sharp, ..base }.normalized().unwrap();
        assert_eq!(sharp.spin_sd, 0.0);
    }

    #[test]
    fn empty_histogram() {
        let h = histogram(&[], 10, (-1.0, 1.0)).unwrap();
        assert!(h.counts.iter().all(|&c| c == 0));
        assert_eq!(h.n_total, 0);
    }

    #[test]
    fn midpoint_sample_lands_in_one_bin() {
        let h = histogram(&[0.0], 11, (-1.0, 1.0)).unwrap();
        assert_eq!(h.counts.iter().filter(|&&c| c == 1).count(), 1);
        assert_eq!(h.counts[5], 1);
    }

    #[test]
    fn under_and_overflow() {
        let h = histogram(&[-3.0, 3.0, 1.0, 0.5], 4, (-1.0, 1.0)).unwrap();
        assert_eq!((h.underflow, h.overflow), (1, 2));
        assert_eq!(h.counts.iter().sum::<u64>() + h.underflow + h.overflow, h.n_total);
    }

    #[test]
    fn histogram_csv_layout() {
        let h = histogram(&[0.1, -5.0], 2, (-1.0, 1.0)).unwrap();
        assert_eq!(
            h.to_csv(),
            "bin_left,bin_right,count\n-1,0,0\n0,1,1\nunderflow,1\noverflow,0\n"
        );
    }

    #[test]
    fn merge_rejects_different_edges() {
        let mut a = Histogram::empty(4, (0.0, 1.0)).unwrap();
        let b = Histogram::empty(5, (0.0, 1.0)).unwrap();
        assert!(a.merge(&b).is_err());
    }

    #[test]
    fn classify_examples() {
        let c = classify(&[1.0, 1.0, -1.0], 0.0);
        assert_eq!((c.n_plus, c.n_minus), (2, 1));
        let c = classify(&[1.0, 2.0], 10.0);
        assert_eq!(c.n_minus, 2);
        let c = classify(&[1.0, 2.0], -10.0);
        assert_eq!(c.n_plus, 2);
    }

    #[test]
    fn phi_plus_sharp_triples() {
        let (_, phi) = &bell_like_basis()[0];
        let t = unsharp_bell_sampling(phi, 0.0, 500, 1).unwrap();
        assert!(t.iter().all(|x| (x.v_zz, x.v_xy, x.v_yx) == (1.0, -1.0, -1.0)));
    }

    #[test]
    fn bell_sampling_rejects_bad_input() {
        assert!(unsharp_bell_sampling(&State::singlet(), -1.0, 10, 0).is_err());
        assert!(unsharp_bell_sampling(&State::maximally_mixed(2), 0.0, 10, 0).is_err());
    }
}
