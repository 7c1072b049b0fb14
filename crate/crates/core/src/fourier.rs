//! Floating point checks on the binary sequences: exponential sums, the
//! oversampled sup-norm estimate, the parallelogram identity and periodograms.
//!
//! # Grid gap of the sup-norm estimate
//!
//! `f(θ) = Σ_{n<N} ε_n e^{2πinθ}` is a trigonometric polynomial of degree
//! `N − 1`, so Bernstein's inequality gives `|f'(θ)| ≤ 2π(N−1)·‖f‖_∞`. On a
//! grid of `G = oversample·N` equispaced points every `θ` is within `1/(2G)`
//! of a grid point, hence
//!
//! ```text
//! grid_max ≤ ‖f‖_∞ ≤ grid_max / (1 − π(N−1)/G)
//! ```
//!
//! whenever `G > π(N−1)`, i.e. `oversample ≥ 4`. For `oversample = 8` the
//! upper factor is at most `1/(1 − π/8) ≈ 1.647`.

use std::f64::consts::{PI, TAU};

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::exec;
use crate::rudin::{PolyPair, SignSequence};

/// Default FFT length cap.
pub const DEFAULT_MAX_FFT: usize = 1 << 26;

/// Environment variable overriding [`DEFAULT_MAX_FFT`].
pub const MAX_FFT_ENV: &str = "DIFFLAB_MAX_FFT";

/// FFT length cap from `DIFFLAB_MAX_FFT`, or the default.
pub fn max_fft_from_env() -> Result<usize> {
    match std::env::var(MAX_FFT_ENV) {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidArgument(format!("{MAX_FFT_ENV}={s:?} is not a size"))),
        Err(_) => Ok(DEFAULT_MAX_FFT),
    }
}

/// A finite `±1` sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinarySeq {
    values: Vec<i8>,
}

impl BinarySeq {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| v.abs() != 1) {
            return Err(Error::InvalidArgument(format!("entry {bad} is not ±1")));
        }
        Ok(Self { values })
    }

    pub fn ones(n: usize) -> Self {
        Self { values: vec![1; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Default, Clone, Copy)]
struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    fn add(&mut self, x: Complex64) {
        self.sum.re = neumaier(self.sum.re, x.re, &mut self.comp.re);
        self.sum.im = neumaier(self.sum.im, x.im, &mut self.comp.im);
    }

    fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn neumaier(sum: f64, x: f64, comp: &mut f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *comp += (sum - t) + x;
    } else {
        *comp += (x - t) + sum;
    }
    t
}

/// `e^{2πi·n·θ}` with the phase reduced mod 1 before scaling, using an
/// error-free product so large `n` does not lose the fractional part.
fn unit_phase(n: usize, theta: f64) -> Complex64 {
    let nf = n as f64;
    let hi = nf * theta;
    let lo = nf.mul_add(theta, -hi);
    let frac = (hi - hi.floor()) + lo;
    let (s, c) = (TAU * frac).sin_cos();
    Complex64::new(c, s)
}

fn sum_at(values: &[i8], theta: f64, offset: usize) -> Complex64 {
    let mut acc = CompensatedSum::default();
    for (n, &e) in values.iter().enumerate() {
        acc.add(unit_phase(n + offset, theta) * f64::from(e));
    }
    acc.value()
}

/// `|Σ_{n<N} ε_n e^{2πinθ}|`, by direct compensated summation.
pub fn exponential_sum(seq: &BinarySeq, theta: f64) -> f64 {
    sum_at(&seq.values, theta, 0).norm()
}

/// Oversampled sup-norm estimate of the exponential sum.
#[derive(Clone, Debug, PartialEq)]
pub struct SupNormResult {
    pub n: usize,
    /// Largest modulus on the grid: a lower bound on the true sup.
    pub sup_estimate: f64,
    /// `sup_estimate / √N`.
    pub ratio: f64,
    pub oversample: usize,
    /// Grid point attaining the maximum.
    pub argmax_theta: f64,
    /// Bernstein upper bound on the true sup (see module docs).
    pub sup_upper_bound: f64,
}

/// Moduli of the exponential sum on the grid `θ_j = j / (oversample·N)`.
pub fn sup_scan(seq: &BinarySeq, oversample: usize, max_fft: usize) -> Result<Vec<f64>> {
    let n = seq.len();
    if n == 0 {
        return Err(Error::InvalidArgument("sequence must be nonempty".into()));
    }
    if oversample < 4 {
        return Err(Error::InvalidArgument(
            "oversample must be at least 4".into(),
        ));
    }
    let grid = n.checked_mul(oversample).ok_or(Error::FftBudget {
        requested: usize::MAX,
        budget: max_fft,
    })?;
    if grid > max_fft {
        return Err(Error::FftBudget {
            requested: grid,
            budget: max_fft,
        });
    }
    let mut buf: Vec<Complex64> = seq
        .values
        .iter()
        .map(|&e| Complex64::new(f64::from(e), 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(grid)
        .collect();
    // the inverse transform carries e^{+2πi·n·j/G}
    FftPlanner::new().plan_fft_inverse(grid).process(&mut buf);
    Ok(exec::map_slice(&buf, |z| z.norm()))
}

/// Maximum of [`sup_scan`] with its ratio to `√N`.
pub fn sup_norm_estimate(
    seq: &BinarySeq,
    oversample: usize,
    max_fft: usize,
) -> Result<SupNormResult> {
    let scan = sup_scan(seq, oversample, max_fft)?;
    let (j, sup) = exec::max_f64(&scan).expect("grid is nonempty");
    let n = seq.len();
    let grid = scan.len();
    let gap = PI * (n as f64 - 1.0) / grid as f64;
    Ok(SupNormResult {
        n,
        sup_estimate: sup,
        ratio: sup / (n as f64).sqrt(),
        oversample,
        argmax_theta: j as f64 / grid as f64,
        sup_upper_bound: sup / (1.0 - gap),
    })
}

/// Largest relative deviation of `|P_k|² + |Q_k|²` from `2^{k+1}` over
/// `samples` equispaced points of the unit circle. Both polynomials are
/// evaluated directly from their coefficient arrays.
pub fn parallelogram_check(signs: &SignSequence, k: u32, samples: usize) -> Result<f64> {
    if k > 20 {
        return Err(Error::InvalidArgument("level must be at most 20".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let pair = PolyPair::at_level(signs, k);
    let target = 2f64.powi(k as i32 + 1);
    let deviations = exec::map_indices(samples, |j| {
        let theta = j as f64 / samples as f64;
        // position n is the coefficient of x^{n+1}
        let p = sum_at(pair.p_coeffs(), theta, 1).norm_sqr();
        let q = sum_at(pair.q_coeffs(), theta, 1).norm_sqr();
        ((p + q) - target).abs() / target
    });
    Ok(deviations.into_iter().fold(0.0, f64::max))
}

/// `I_N(j) = |Σ_n ε_n e^{−2πinj/N}|² / N` for `j = 0..N`.
pub fn periodogram(seq: &BinarySeq, max_fft: usize) -> Result<Vec<f64>> {
    let n = seq.len();
    if n == 0 {
        return Err(Error::InvalidArgument("sequence must be nonempty".into()));
    }
    if n > max_fft {
        return Err(Error::FftBudget {
            requested: n,
            budget: max_fft,
        });
    }
    let mut buf: Vec<Complex64> = seq
        .values
        .iter()
        .map(|&e| Complex64::new(f64::from(e), 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let nf = n as f64;
    Ok(exec::map_slice(&buf, |z| z.norm_sqr() / nf))
}

/// Means of `values` over `bins` contiguous equal-width bins.
pub fn binned_means(values: &[f64], bins: usize) -> Result<Vec<f64>> {
    if bins == 0 || !values.len().is_multiple_of(bins) {
        return Err(Error::InvalidArgument(format!(
            "{} values do not split into {bins} equal bins",
            values.len()
        )));
    }
    let width = values.len() / bins;
    Ok(values
        .chunks(width)
        .map(|c| {
            let mut comp = 0.0;
            let s = c.iter().fold(0.0, |acc, &x| neumaier(acc, x, &mut comp));
            (s + comp) / width as f64
        })
        .collect())
}

/// `(1/(N−k))·Σ_{n<N−k} ε_n ε_{n+k}`.
pub fn empirical_autocorrelation(seq: &BinarySeq, k: usize) -> Result<f64> {
    let n = seq.len();
    if k >= n {
        return Err(Error::InvalidArgument(format!(
            "distance {k} needs more than {n} terms"
        )));
    }
    let v = &seq.values;
    let s: i64 = (0..n - k)
        .map(|i| i64::from(v[i]) * i64::from(v[i + k]))
        .sum();
    Ok(s as f64 / (n - k) as f64)
}
