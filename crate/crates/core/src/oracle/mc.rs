//! Monte Carlo estimate of W(t) from sampled noise.
//!
//! Each trial draws one noise window, snaps the pulse times to the sample
//! grid and accumulates the phase segment by segment with the trapezoidal
//! rule. With perfect pulses the phase is `Δφ = ∫ η(t′) ε(t′) dt′` with `η`
//! flipping sign at each pulse, and the trial contributes `e^{−iΔφ}`.
//! With imperfect pulses the two-level state is propagated through free
//! rotations `exp(−iφσ_z/2)` and pulse rotations `exp(−iθσ_x/2)` and the
//! trial contributes `2ρ↑↓`. The estimate is `|mean|` over trials.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::noise::{check_nyquist, trial_rng, Synthesizer};
use crate::error::{invalid, Error, Result};
use crate::sequences::PulseSequence;
use crate::spectra::PowerSpectrum;

/// Fewest trials accepted for an estimate.
pub const MIN_TRIALS: usize = 100;

/// Rotation-angle error of the π pulses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PulseError {
    /// Exact π rotations.
    #[default]
    None,
    /// Every pulse rotates by `π + delta`.
    Systematic { delta: f64 },
    /// Each pulse rotates by `π + δ_p`, `δ_p ~ N(0, sigma²)` drawn per pulse and trial.
    Random { sigma: f64 },
}

impl PulseError {
    fn validate(&self) -> Result<()> {
        match *self {
            PulseError::None => Ok(()),
            PulseError::Systematic { delta } if delta.is_finite() => Ok(()),
            PulseError::Random { sigma } if sigma.is_finite() && sigma >= 0.0 => Ok(()),
            _ => Err(invalid("pulse error must be finite (and sigma non-negative)")),
        }
    }
}

/// Where each trial's noise comes from.
pub trait TraceSource: Sync {
    /// Fills `out` with one realization, consuming randomness from `rng`.
    fn fill(&self, rng: &mut rand_chacha::ChaCha8Rng, out: &mut [f64]);

    /// Checks that the source can deliver `samples` values spaced `dt`.
    fn check(&self, dt: f64, samples: usize) -> Result<()>;

    fn id(&self) -> String;
}

/// Gaussian noise with a prescribed spectrum.
pub struct SpectralSource<'a> {
    spectrum: &'a PowerSpectrum,
    synth: Synthesizer,
}

impl<'a> SpectralSource<'a> {
    /// Prepares windows reaching `t_max` at step `dt`.
    pub fn new(spectrum: &'a PowerSpectrum, t_max: f64, dt: f64) -> Result<Self> {
        check_nyquist(spectrum, dt)?;
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(invalid(format!("window length must be positive, got {t_max}")));
        }
        let window = (t_max / dt + 1e-9).floor() as usize + 1;
        Ok(SpectralSource { spectrum, synth: Synthesizer::new(spectrum, window.max(2), dt)? })
    }
}

impl TraceSource for SpectralSource<'_> {
    fn fill(&self, rng: &mut rand_chacha::ChaCha8Rng, out: &mut [f64]) {
        self.synth.fill(rng, out);
    }

    fn check(&self, dt: f64, samples: usize) -> Result<()> {
        check_nyquist(self.spectrum, dt)?;
        if dt != self.synth.dt() || samples > self.synth.window() {
            return Err(invalid(format!(
                "source prepared for {} samples at dt = {}, asked for {samples} at dt = {dt}",
                self.synth.window(),
                self.synth.dt()
            )));
        }
        Ok(())
    }

    fn id(&self) -> String {
        self.spectrum.id()
    }
}

/// A static offset `ε ≡ value`, for exercising echo identities.
pub struct ConstantSource(pub f64);

impl TraceSource for ConstantSource {
    fn fill(&self, _rng: &mut rand_chacha::ChaCha8Rng, out: &mut [f64]) {
        out.fill(self.0);
    }

    fn check(&self, dt: f64, _samples: usize) -> Result<()> {
        if dt.is_finite() && dt > 0.0 {
            Ok(())
        } else {
            Err(invalid(format!("time step must be positive, got {dt}")))
        }
    }

    fn id(&self) -> String {
        format!("constant:{}", self.0)
    }
}

/// Quasi-static noise: one offset `ε ~ N(0, sigma²)` per trial, held for the
/// whole trial. FID then decays as `exp(−sigma²t²/2)`.
pub struct QuasiStaticSource {
    pub sigma: f64,
}

impl TraceSource for QuasiStaticSource {
    fn fill(&self, rng: &mut rand_chacha::ChaCha8Rng, out: &mut [f64]) {
        let eps = self.sigma * rng.sample::<f64, _>(StandardNormal);
        out.fill(eps);
    }

    fn check(&self, dt: f64, _samples: usize) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(invalid(format!("quasi-static sigma must be non-negative, got {}", self.sigma)));
        }
        ConstantSource(0.0).check(dt, 0)
    }

    fn id(&self) -> String {
        format!("quasi-static:sigma={}", self.sigma)
    }
}

/// Ensemble estimate of W at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub w: f64,
    pub stderr: f64,
    pub trials: usize,
    pub seed: u64,
    /// Evolution time actually simulated, `floor(t/dt)·dt`.
    pub t: f64,
}

/// Pulse positions of `seq` on a grid of `steps` intervals.
pub fn snap_pulses(seq: &PulseSequence, steps: usize, dt: f64) -> Result<Vec<usize>> {
    let idx: Vec<usize> = seq.fractions().iter().map(|&s| (s * steps as f64).round() as usize).collect();
    let mut prev = 0usize;
    for &k in &idx {
        if k <= prev || k >= steps {
            return Err(Error::TimeStep {
                dt,
                reason: format!("pulses of {} collide on a grid of {steps} steps", seq.id()),
            });
        }
        prev = k;
    }
    Ok(idx)
}

fn trapezoid(eps: &[f64], lo: usize, hi: usize, dt: f64) -> f64 {
    let inner: f64 = eps[lo + 1..hi].iter().sum();
    dt * (0.5 * (eps[lo] + eps[hi]) + inner)
}

/// Free-evolution phases `∫ε` over the segments delimited by `pulses` on `[0, steps]`.
pub fn segment_phases(eps: &[f64], pulses: &[usize], steps: usize, dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(pulses.len() + 1);
    let mut lo = 0;
    for &p in pulses.iter().chain(std::iter::once(&steps)) {
        out.push(trapezoid(eps, lo, p, dt));
        lo = p;
    }
    out
}

/// `Δφ = Σ_k (−1)^k φ_k` for perfect pulses.
pub fn toggled_phase(phases: &[f64]) -> f64 {
    phases.iter().enumerate().map(|(k, &p)| if k % 2 == 0 { p } else { -p }).sum()
}

/// Propagates `(|↑⟩ + |↓⟩)/√2` through the segments, with a rotation by
/// `angles[k]` about x after segment `k`. Returns the final state.
pub fn propagate(phases: &[f64], angles: &[f64]) -> [Complex64; 2] {
    debug_assert_eq!(angles.len() + 1, phases.len());
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut up = Complex64::new(r, 0.0);
    let mut down = Complex64::new(r, 0.0);
    for (k, &phi) in phases.iter().enumerate() {
        up *= Complex64::from_polar(1.0, -0.5 * phi);
        down *= Complex64::from_polar(1.0, 0.5 * phi);
        if let Some(&theta) = angles.get(k) {
            let c = (0.5 * theta).cos();
            let s = Complex64::new(0.0, -(0.5 * theta).sin());
            (up, down) = (c * up + s * down, s * up + c * down);
        }
    }
    [up, down]
}

/// `2ρ↑↓ = 2ψ↑ψ↓*`, equal to 1 for the initial state.
pub fn coherence_of(state: &[Complex64; 2]) -> Complex64 {
    2.0 * state[0] * state[1].conj()
}

fn summarize(z: &[Complex64], seed: u64, t: f64) -> McEstimate {
    let n = z.len() as f64;
    let mean = z.iter().sum::<Complex64>() / n;
    let w = mean.norm();
    let dir = if w > 0.0 { mean / w } else { Complex64::new(1.0, 0.0) };
    // spread of the projections onto the mean direction
    let var = z.iter().map(|zi| ((zi * dir.conj()).re - w).powi(2)).sum::<f64>() / (n - 1.0);
    McEstimate { w, stderr: (var / n).sqrt(), trials: z.len(), seed, t }
}

/// Run settings shared by every time point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSettings {
    pub dt: f64,
    pub trials: usize,
    pub seed: u64,
    pub pulse_error: PulseError,
}

impl McSettings {
    pub fn new(dt: f64, trials: usize, seed: u64) -> Self {
        McSettings { dt, trials, seed, pulse_error: PulseError::None }
    }

    pub fn with_pulse_error(mut self, pulse_error: PulseError) -> Self {
        self.pulse_error = pulse_error;
        self
    }
}

/// W at several times from one set of trials; each trial's noise window spans
/// the longest time, so estimates at different times are correlated.
pub fn mc_decoherence_grid(
    source: &dyn TraceSource,
    seq: &PulseSequence,
    times: &[f64],
    cfg: &McSettings,
) -> Result<Vec<McEstimate>> {
    cfg.pulse_error.validate()?;
    if !(cfg.dt.is_finite() && cfg.dt > 0.0) {
        return Err(invalid(format!("time step must be positive, got {}", cfg.dt)));
    }
    if cfg.trials < MIN_TRIALS {
        return Err(invalid(format!("at least {MIN_TRIALS} trials are required, got {}", cfg.trials)));
    }
    if times.is_empty() || times.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
        return Err(invalid("Monte Carlo times must be positive and finite"));
    }
    let dt = cfg.dt;
    let plan: Vec<(usize, Vec<usize>)> = times
        .iter()
        .map(|&t| {
            let steps = (t / dt + 1e-9).floor() as usize;
            if steps == 0 {
                return Err(Error::TimeStep { dt, reason: format!("t = {t} s is shorter than one step") });
            }
            Ok((steps, snap_pulses(seq, steps, dt)?))
        })
        .collect::<Result<_>>()?;
    let window = plan.iter().map(|p| p.0).max().unwrap_or(1) + 1;
    source.check(dt, window)?;

    let z: Vec<Vec<Complex64>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(cfg.seed, trial);
            let mut eps = vec![0.0; window];
            source.fill(&mut rng, &mut eps);
            plan.iter()
                .map(|(steps, pulses)| {
                    let phases = segment_phases(&eps, pulses, *steps, dt);
                    match cfg.pulse_error {
                        PulseError::None => Complex64::from_polar(1.0, -toggled_phase(&phases)),
                        PulseError::Systematic { delta } => {
                            coherence_of(&propagate(&phases, &vec![PI + delta; pulses.len()]))
                        }
                        PulseError::Random { sigma } => {
                            let angles: Vec<f64> =
                                (0..pulses.len()).map(|_| PI + sigma * rng.sample::<f64, _>(StandardNormal)).collect();
                            coherence_of(&propagate(&phases, &angles))
                        }
                    }
                })
                .collect()
        })
        .collect();

    Ok(plan
        .iter()
        .enumerate()
        .map(|(i, (steps, _))| {
            let zi: Vec<Complex64> = z.iter().map(|row| row[i]).collect();
            summarize(&zi, cfg.seed, *steps as f64 * dt)
        })
        .collect())
}

/// Monte Carlo W(t) for noise with spectrum `s`.
pub fn mc_decoherence(
    s: &PowerSpectrum,
    seq: &PulseSequence,
    t: f64,
    dt: f64,
    trials: usize,
    pulse_error: PulseError,
    seed: u64,
) -> Result<McEstimate> {
    let cfg = McSettings::new(dt, trials, seed).with_pulse_error(pulse_error);
    let src = SpectralSource::new(s, t, dt)?;
    Ok(mc_decoherence_grid(&src, seq, &[t], &cfg)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_spectrum_is_perfectly_coherent() {
        let s = PowerSpectrum::white(0.0, 1.0, 100.0).unwrap();
        for seq in [PulseSequence::fid(), PulseSequence::cpmg(4).unwrap()] {
            let e = mc_decoherence(&s, &seq, 0.5, 1e-3, 100, PulseError::None, 1).unwrap();
            assert_eq!(e.w, 1.0);
            assert_eq!(e.stderr, 0.0);
        }
    }

    #[test]
    fn rejects_bad_settings() {
        let s = PowerSpectrum::white(1.0, 1.0, 100.0).unwrap();
        let fid = PulseSequence::fid();
        assert!(mc_decoherence(&s, &fid, 1.0, 1e-3, 99, PulseError::None, 0).is_err());
        assert!(matches!(mc_decoherence(&s, &fid, 1.0, 6e-3, 100, PulseError::None, 0), Err(Error::TimeStep { .. })));
        let dense = PulseSequence::cpmg(20).unwrap();
        assert!(matches!(
            mc_decoherence(&s, &dense, 0.01, 1e-3, 100, PulseError::None, 0),
            Err(Error::TimeStep { .. })
        ));
    }

    #[test]
    fn constant_noise_is_refocused_by_echo() {
        let cfg = McSettings::new(1e-3, 100, 5);
        let est = mc_decoherence_grid(&ConstantSource(37.0), &PulseSequence::se(), &[0.2, 1.0], &cfg).unwrap();
        for e in est {
            assert!((e.w - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn quasi_static_fid_is_gaussian_and_echo_refocuses() {
        let cfg = McSettings::new(1e-3, 4000, 9);
        let src = QuasiStaticSource { sigma: 2.0 };
        let fid = mc_decoherence_grid(&src, &PulseSequence::fid(), &[0.5], &cfg).unwrap()[0];
        let want = (-0.5f64 * 4.0 * 0.25).exp();
        assert!((fid.w - want).abs() < 4.0 * fid.stderr, "{} vs {want} ± {}", fid.w, fid.stderr);
        let echo = mc_decoherence_grid(&src, &PulseSequence::se(), &[0.5], &cfg).unwrap()[0];
        assert!((echo.w - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn perfect_unitary_path_matches_toggling() {
        let phases = [0.3, -1.2, 0.7, 2.5, -0.4];
        let dphi = toggled_phase(&phases);
        let z = coherence_of(&propagate(&phases, &[PI; 4]));
        let expect = Complex64::from_polar(1.0, -dphi);
        assert!((z - expect).norm() < 1e-12);
        // odd pulse count conjugates
        let z = coherence_of(&propagate(&phases[..4], &[PI; 3]));
        let expect = Complex64::from_polar(1.0, -toggled_phase(&phases[..4])).conj();
        assert!((z - expect).norm() < 1e-12);
    }

    #[test]
    fn unitary_path_preserves_norm() {
        let phases: Vec<f64> = (0..501).map(|k| (k as f64 * 0.37).sin() * 3.0).collect();
        let angles: Vec<f64> = (0..500).map(|k| PI + 0.01 * (k as f64).cos()).collect();
        let st = propagate(&phases, &angles);
        assert!((st[0].norm_sqr() + st[1].norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_phase_of_linear_ramp_is_exact() {
        let dt = 0.01;
        let eps: Vec<f64> = (0..=100).map(|i| 2.0 * i as f64 * dt).collect();
        // ∫₀¹ 2t dt = 1, split at 0.5: 0.25 and 0.75
        let ph = segment_phases(&eps, &[50], 100, dt);
        assert_relative_eq!(ph[0], 0.25, max_relative = 1e-12);
        assert_relative_eq!(ph[1], 0.75, max_relative = 1e-12);
    }

    #[test]
    fn seed_determinism() {
        let s = PowerSpectrum::lorentzian(2.0, 3.0, 0.01, 50.0).unwrap();
        let seq = PulseSequence::cpmg(2).unwrap();
        let a = mc_decoherence(&s, &seq, 1.0, 0.005, 200, PulseError::Systematic { delta: 0.1 }, 9).unwrap();
        let b = mc_decoherence(&s, &seq, 1.0, 0.005, 200, PulseError::Systematic { delta: 0.1 }, 9).unwrap();
        assert_eq!(a, b);
    }
}
