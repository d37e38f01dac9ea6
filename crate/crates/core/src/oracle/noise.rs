//! Gaussian noise realizations with a prescribed spectrum.
//!
//! A realization is a random-phase Fourier sum on a periodic grid of `L`
//! samples, `L` the power of two at or above four times the requested
//! length. Bin `k` (frequency `k/(L·dt)`) carries independent Gaussian
//! cosine and sine amplitudes whose variance is the exact spectral mass in
//! `[(k-½)Δf, (k+½)Δf]`. The DC bin gets the mass in `[0, Δf/2]` on its
//! cosine only, and likewise the Nyquist bin. The requested window is cut
//! from the period at a random offset.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spectra::PowerSpectrum;

/// Oversampling of the synthesis period relative to the longest window.
pub const PERIOD_FACTOR: usize = 4;

/// The generator for trial or trace `stream` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A sampled realization of ε(t), rad/s, at `t_i = i·dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseTrace {
    pub dt: f64,
    pub samples: Vec<f64>,
    pub seed: u64,
    pub spectrum_id: String,
}

impl NoiseTrace {
    pub fn duration(&self) -> f64 {
        (self.samples.len() - 1) as f64 * self.dt
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (self.samples.len() - 1) as f64
    }

    /// Writes `t_s,epsilon_rad_s` rows under a `#` provenance header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# spectrum: {}", self.spectrum_id)?;
        writeln!(out, "# seed: {}", self.seed)?;
        writeln!(out, "# dt_s: {}", self.dt)?;
        writeln!(out, "t_s,epsilon_rad_s")?;
        for (i, x) in self.samples.iter().enumerate() {
            writeln!(out, "{},{}", i as f64 * self.dt, x)?;
        }
        Ok(())
    }
}

/// Rejects time steps that cannot represent the spectrum's top frequency.
pub fn check_nyquist(s: &PowerSpectrum, dt: f64) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(invalid(format!("time step must be positive, got {dt}")));
    }
    let limit = 0.5 / s.band().1;
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::TimeStep { dt, reason: format!("Nyquist limit for f_uv = {} Hz is {limit} s", s.band().1) });
    }
    Ok(())
}

/// Precomputed bin variances and FFT plan for windows of a fixed length.
pub struct Synthesizer {
    dt: f64,
    window: usize,
    period: usize,
    sigma: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    spectrum_id: String,
}

impl Synthesizer {
    /// Prepares windows of `window ≥ 2` samples spaced `dt`.
    pub fn new(s: &PowerSpectrum, window: usize, dt: f64) -> Result<Self> {
        check_nyquist(s, dt)?;
        if window < 2 {
            return Err(invalid("a noise window needs at least two samples"));
        }
        let period = (PERIOD_FACTOR * window).next_power_of_two();
        let df = 1.0 / (period as f64 * dt);
        let half = period / 2;
        let sigma = (0..=half)
            .map(|k| {
                let lo = if k == 0 { 0.0 } else { (k as f64 - 0.5) * df };
                let hi = if k == half { k as f64 * df } else { (k as f64 + 0.5) * df };
                s.band_power(lo, hi).sqrt()
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_inverse(period);
        Ok(Synthesizer { dt, window, period, sigma, fft, spectrum_id: s.id() })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Samples in one synthesis period.
    pub fn period(&self) -> usize {
        self.period
    }

    pub fn spectrum_id(&self) -> &str {
        &self.spectrum_id
    }

    /// Draws one realization into `out`, at most `window` samples long.
    pub fn fill<R: Rng>(&self, rng: &mut R, out: &mut [f64]) {
        assert!(out.len() <= self.window, "window overrun");
        if self.sigma.iter().all(|&s| s == 0.0) {
            out.fill(0.0);
            return;
        }
        let half = self.period / 2;
        let mut buf = vec![Complex64::new(0.0, 0.0); self.period];
        for (k, &sd) in self.sigma.iter().enumerate() {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            buf[k] = if k == 0 || k == half { Complex64::new(sd * a, 0.0) } else { Complex64::new(sd * a, -sd * b) };
        }
        self.fft.process(&mut buf);
        let offset = rng.gen_range(0..self.period);
        for (i, o) in out.iter_mut().enumerate() {
            *o = buf[(offset + i) % self.period].re;
        }
    }
}

/// One realization over `[0, duration]`. The sample count is
/// `floor(duration/dt) + 1`; a trailing fraction of a step is dropped.
pub fn synthesize_noise(s: &PowerSpectrum, duration: f64, dt: f64, seed: u64) -> Result<NoiseTrace> {
    check_nyquist(s, dt)?;
    if !(duration.is_finite() && duration >= dt) {
        return Err(invalid(format!("duration must be at least one time step, got {duration}")));
    }
    let n = (duration / dt + 1e-9).floor() as usize + 1;
    let synth = Synthesizer::new(s, n, dt)?;
    let mut samples = vec![0.0; n];
    synth.fill(&mut trial_rng(seed, 0), &mut samples);
    Ok(NoiseTrace { dt, samples, seed, spectrum_id: s.id() })
}

/// One-sided periodogram `(f_k, 2·dt·|X_k|²/N)` for `0 < k < N/2`.
pub fn periodogram(trace: &NoiseTrace) -> Vec<(f64, f64)> {
    one_sided_power(trace, None)
}

/// Hann-tapered periodogram `(f_k, 2·dt·|Σ w_i x_i e^{..}|²/Σw²)`.
///
/// The plain periodogram of a steep red spectrum is biased upward at every
/// frequency by sidelobe leakage from power below `1/duration`; the taper's
/// sidelobes fall off fast enough to remove that bias except in the lowest
/// few bins.
pub fn tapered_periodogram(trace: &NoiseTrace) -> Vec<(f64, f64)> {
    let n = trace.samples.len();
    let w: Vec<f64> = (0..n).map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos()).collect();
    one_sided_power(trace, Some(&w))
}

fn one_sided_power(trace: &NoiseTrace, taper: Option<&[f64]>) -> Vec<(f64, f64)> {
    let n = trace.samples.len();
    let (mut buf, norm): (Vec<Complex64>, f64) = match taper {
        None => (trace.samples.iter().map(|&x| Complex64::new(x, 0.0)).collect(), n as f64),
        Some(w) => (
            trace.samples.iter().zip(w).map(|(&x, &w)| Complex64::new(x * w, 0.0)).collect(),
            w.iter().map(|w| w * w).sum(),
        ),
    };
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let df = 1.0 / (n as f64 * trace.dt);
    (1..n.div_ceil(2)).map(|k| (k as f64 * df, 2.0 * trace.dt * buf[k].norm_sqr() / norm)).collect()
}

/// FID exponent of Ornstein–Uhlenbeck noise, the process whose one-sided
/// spectrum is `amplitude / (1 + (f/corner)²)` on `(0, ∞)`:
/// `χ = (σ²/γ²)(γt − 1 + e^{−γt})` with `σ² = π·amplitude·corner/2`, `γ = 2π·corner`.
pub fn ou_fid_exponent(amplitude: f64, corner: f64, t: f64) -> f64 {
    let var = 0.5 * PI * amplitude * corner;
    let gamma = 2.0 * PI * corner;
    let gt = gamma * t;
    let h =
        if gt < 1e-2 { gt * gt * (0.5 - gt / 6.0 + gt * gt / 24.0 - gt.powi(3) / 120.0) } else { gt + (-gt).exp_m1() };
    var / (gamma * gamma) * h
}
