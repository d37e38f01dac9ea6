//! Independent time-domain check of the spectral formula: synthesize noise
//! with the target spectrum, evolve the qubit phase trial by trial, and
//! average.

pub mod mc;
pub mod noise;

use serde::{Deserialize, Serialize};

use crate::coherence::{decoherence_with, QuadratureOptions};
use crate::error::{invalid, Result};
use crate::sequences::PulseSequence;
use crate::spectra::PowerSpectrum;

pub use mc::{
    mc_decoherence, mc_decoherence_grid, ConstantSource, McEstimate, McSettings, PulseError, QuasiStaticSource,
    SpectralSource, TraceSource,
};
pub use noise::{ou_fid_exponent, periodogram, synthesize_noise, tapered_periodogram, NoiseTrace};

/// |z| above which a comparison point is flagged.
pub const Z_THRESHOLD: f64 = 3.5;

/// Default step: eight samples per period of the band's top frequency.
pub fn default_dt(s: &PowerSpectrum) -> f64 {
    1.0 / (8.0 * s.band().1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonPoint {
    /// Requested time, s.
    pub t: f64,
    /// Simulated time on the sample grid, s; both estimates refer to it.
    pub t_eff: f64,
    pub w_mc: f64,
    pub stderr: f64,
    pub w_spectral: f64,
    pub z: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub spectrum_id: String,
    pub sequence_id: String,
    pub dt: f64,
    pub trials: usize,
    pub seed: u64,
    pub z_threshold: f64,
    pub spectral_tol: f64,
    pub points: Vec<ComparisonPoint>,
    pub all_pass: bool,
}

/// Monte Carlo against spectral W on a time grid, with perfect pulses.
/// `z = (W_mc − W_spectral)/stderr`; points with `|z| > 3.5` are flagged.
pub fn compare_mc_spectral(
    s: &PowerSpectrum,
    seq: &PulseSequence,
    t_grid: &[f64],
    dt: f64,
    trials: usize,
    seed: u64,
) -> Result<ComparisonReport> {
    let t_max = t_grid.iter().copied().fold(f64::NAN, f64::max);
    if !(t_max > 0.0) {
        return Err(invalid("comparison grid must contain positive times"));
    }
    let cfg = McSettings::new(dt, trials, seed);
    let src = SpectralSource::new(s, t_max, dt)?;
    let mc = mc_decoherence_grid(&src, seq, t_grid, &cfg)?;
    let opts = QuadratureOptions::default();
    let points = t_grid
        .iter()
        .zip(&mc)
        .map(|(&t, est)| {
            let w_spectral = decoherence_with(s, seq, est.t, &opts)?;
            let diff = est.w - w_spectral;
            let z = if est.stderr > 0.0 {
                diff / est.stderr
            } else if diff.abs() <= 1e-12 {
                0.0
            } else {
                diff.signum() * f64::INFINITY
            };
            Ok(ComparisonPoint {
                t,
                t_eff: est.t,
                w_mc: est.w,
                stderr: est.stderr,
                w_spectral,
                z,
                flagged: !(z.abs() <= Z_THRESHOLD),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonReport {
        spectrum_id: s.id(),
        sequence_id: seq.id(),
        dt,
        trials,
        seed,
        z_threshold: Z_THRESHOLD,
        spectral_tol: opts.tol,
        all_pass: points.iter().all(|p| !p.flagged),
        points,
    })
}
