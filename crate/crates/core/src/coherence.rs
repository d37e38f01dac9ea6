//! The spectral decoherence integral and coherence-time extraction.
//!
//! ```text
//! W(t) = exp(-χ(t)),   χ(t) = ∫₀^∞ (dω/π) S(ω) F(ωt) / ω²
//! ```
//!
//! The integral is taken in `x = ωt`, where it reads
//! `χ = (t/2π) ∫ S_f(x/2πt) F(x) / x² dx`. Because `F` is a trigonometric
//! polynomial in `x` whose highest frequency is 1, its oscillation period is
//! never shorter than 2π regardless of the pulse count. The band is split at
//! every spectral breakpoint. Below `x = 2π` each piece is integrated in
//! `ln x` with a 15-point Kronrod rule; above, it is tiled with 21-point
//! Kronrod panels at most 4π wide. Panel phasors `e^{i x s_j}` are advanced by
//! a fixed rotation from one panel to the next and re-seeded periodically, so
//! a panel costs one complex multiply-add per node and switching point.
//! All segments then enter one globally adaptive refinement.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::{refine, Integral, Segment, GK15, GK21};
use crate::sequences::{filter, Family, PulseSequence};
use crate::spectra::PowerSpectrum;

/// Default relative tolerance on χ for curves.
pub const CURVE_TOL: f64 = 1e-6;
/// Default relative tolerance on χ inside coherence-time searches.
pub const SCAN_TOL: f64 = 1e-5;
/// Default cap on integrand evaluations per χ.
pub const DEFAULT_BUDGET: usize = 4_000_000;

const LOG_SPLIT: f64 = TAU;
const LOG_STEP: f64 = 1.0;
const PANEL_WIDTH: f64 = 2.0 * TAU;
const RESEED_EVERY: usize = 64;
const TAG_LOG: u8 = 0;
const TAG_LINEAR: u8 = 1;

/// Accuracy controls for one χ evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    /// Relative tolerance on χ, in `(0, 1e-3]`.
    pub tol: f64,
    /// Maximum integrand evaluations before failing.
    pub budget: usize,
}

impl QuadratureOptions {
    pub fn new(tol: f64) -> Result<Self> {
        let opts = QuadratureOptions { tol, budget: DEFAULT_BUDGET };
        opts.validate()?;
        Ok(opts)
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol <= 1e-3) {
            return Err(invalid(format!("tolerance must lie in (0, 1e-3], got {}", self.tol)));
        }
        if self.budget == 0 {
            return Err(invalid("evaluation budget must be positive"));
        }
        Ok(())
    }
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions { tol: CURVE_TOL, budget: DEFAULT_BUDGET }
    }
}

/// Switching points with their weights folded into per-node phasor offsets
/// for one panel width.
struct PanelKernel {
    s: Vec<f64>,
    // [point][node], already multiplied by the point weight
    re: Vec<[f64; 21]>,
    im: Vec<[f64; 21]>,
}

impl PanelKernel {
    fn new(points: &[(f64, f64)], half_width: f64) -> Self {
        let mut re = Vec::with_capacity(points.len());
        let mut im = Vec::with_capacity(points.len());
        for &(s, d) in points {
            let mut r = [0.0; 21];
            let mut i = [0.0; 21];
            for (k, &node) in GK21.nodes.iter().enumerate() {
                let z = Complex64::from_polar(d, half_width * node * s);
                r[k] = z.re;
                i[k] = z.im;
            }
            re.push(r);
            im.push(i);
        }
        PanelKernel { s: points.iter().map(|p| p.0).collect(), re, im }
    }

    /// Tiles `[a, b]` with equal panels and appends one segment per panel.
    fn tile(&self, a: f64, b: f64, panels: usize, envelope: &impl Fn(f64) -> f64, out: &mut Vec<Segment>) {
        let width = (b - a) / panels as f64;
        let half = 0.5 * width;
        let step: Vec<Complex64> = self.s.iter().map(|&s| Complex64::from_polar(1.0, width * s)).collect();
        let mut z: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); self.s.len()];
        let mut vals = [0.0; 21];
        for p in 0..panels {
            let lo = a + p as f64 * width;
            let hi = if p + 1 == panels { b } else { lo + width };
            let c = 0.5 * (lo + hi);
            if p % RESEED_EVERY == 0 {
                for (zj, &s) in z.iter_mut().zip(&self.s) {
                    *zj = Complex64::from_polar(1.0, c * s);
                }
            } else {
                for (zj, st) in z.iter_mut().zip(&step) {
                    *zj *= st;
                }
            }
            let mut acc_re = [0.0; 21];
            let mut acc_im = [0.0; 21];
            for ((zj, wr), wi) in z.iter().zip(&self.re).zip(&self.im) {
                for k in 0..21 {
                    acc_re[k] += zj.re * wr[k] - zj.im * wi[k];
                    acc_im[k] += zj.re * wi[k] + zj.im * wr[k];
                }
            }
            for k in 0..21 {
                let x = c + half * GK21.nodes[k];
                let f = 0.5 * (acc_re[k] * acc_re[k] + acc_im[k] * acc_im[k]);
                vals[k] = envelope(x) * f;
            }
            out.push(Segment { a: lo, b: hi, tag: TAG_LINEAR, estimate: GK21.estimate(half, &vals) });
        }
    }
}

/// Splits the spectral support, in `x = ωt`, at every breakpoint.
fn pieces(s: &PowerSpectrum, t: f64) -> Vec<(f64, f64)> {
    let scale = TAU * t;
    let cuts = s.breakpoints();
    let mut out = Vec::new();
    for (lo, hi) in s.support() {
        let mut prev = lo;
        for &c in cuts.iter().filter(|&&c| c > lo && c < hi) {
            out.push((prev * scale, c * scale));
            prev = c;
        }
        out.push((prev * scale, hi * scale));
    }
    out.retain(|(a, b)| b > a);
    out
}

/// The dephasing exponent χ(t) with its error estimate.
pub fn dephasing_exponent(
    s: &PowerSpectrum,
    seq: &PulseSequence,
    t: f64,
    opts: &QuadratureOptions,
) -> Result<Integral> {
    opts.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid(format!("time must be finite and non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok(Integral { value: 0.0, abs_error: 0.0, evaluations: 0 });
    }
    let to_hz = 1.0 / (TAU * t);
    let envelope = |x: f64| s.one_sided(x * to_hz) / (x * x);
    let log_integrand = |u: f64| {
        let x = u.exp();
        x * envelope(x) * filter(seq, x)
    };
    let linear_integrand = |x: f64| envelope(x) * filter(seq, x);

    let points = seq.switching_points();
    let mut segments = Vec::new();
    let mut spent = 0usize;
    for (a, b) in pieces(s, t) {
        if a < LOG_SPLIT {
            let (ua, ub) = (a.ln(), b.min(LOG_SPLIT).ln());
            let n = ((ub - ua) / LOG_STEP).ceil().max(1.0) as usize;
            let du = (ub - ua) / n as f64;
            for k in 0..n {
                let lo = ua + k as f64 * du;
                let hi = if k + 1 == n { ub } else { lo + du };
                segments.push(Segment { a: lo, b: hi, tag: TAG_LOG, estimate: GK15.apply(log_integrand, lo, hi) });
            }
            spent += n * GK15.len();
        }
        if b > LOG_SPLIT {
            let lo = a.max(LOG_SPLIT);
            let panels = ((b - lo) / PANEL_WIDTH).ceil().max(1.0) as usize;
            spent += panels * GK21.len();
            if spent > opts.budget {
                return Err(Error::QuadratureBudget { relative_error: f64::INFINITY, evaluations: spent });
            }
            let kernel = PanelKernel::new(&points, 0.5 * (b - lo) / panels as f64);
            kernel.tile(lo, b, panels, &envelope, &mut segments);
        }
    }

    let integral = refine(segments, spent, opts.tol, opts.budget, |lo, hi, tag| match tag {
        TAG_LOG => (GK15.apply(log_integrand, lo, hi), GK15.len()),
        _ => (GK21.apply(linear_integrand, lo, hi), GK21.len()),
    })?;
    let pre = t / TAU;
    Ok(Integral { value: pre * integral.value, abs_error: pre * integral.abs_error, evaluations: integral.evaluations })
}

/// `W(t) = exp(-χ(t))` with relative tolerance `tol` on χ. `W(0) = 1` exactly.
pub fn decoherence_at(s: &PowerSpectrum, seq: &PulseSequence, t: f64, tol: f64) -> Result<f64> {
    decoherence_with(s, seq, t, &QuadratureOptions::new(tol)?)
}

pub fn decoherence_with(s: &PowerSpectrum, seq: &PulseSequence, t: f64, opts: &QuadratureOptions) -> Result<f64> {
    Ok((-dephasing_exponent(s, seq, t, opts)?.value).exp())
}

/// `Π_i W_i(t)` over mutually uncorrelated sources.
pub fn multi_source_w(spectra: &[PowerSpectrum], seq: &PulseSequence, t: f64, tol: f64) -> Result<f64> {
    if spectra.is_empty() {
        return Err(invalid("multi-source evaluation needs at least one spectrum"));
    }
    let opts = QuadratureOptions::new(tol)?;
    let mut w = 1.0;
    for s in spectra {
        w *= decoherence_with(s, seq, t, &opts)?;
    }
    Ok(w)
}

/// Sampled `W(t)` with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceCurve {
    pub times: Vec<f64>,
    pub w: Vec<f64>,
    pub spectrum_id: String,
    pub sequence_id: String,
    pub tol: f64,
}

/// `W` on a strictly increasing, non-negative time grid.
pub fn decoherence_curve(
    s: &PowerSpectrum,
    seq: &PulseSequence,
    times: &[f64],
    opts: &QuadratureOptions,
) -> Result<DecoherenceCurve> {
    if times.is_empty() {
        return Err(invalid("time grid is empty"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || !(times[0] >= 0.0) {
        return Err(invalid("time grid must be non-negative and strictly increasing"));
    }
    let w = times.par_iter().map(|&t| decoherence_with(s, seq, t, opts)).collect::<Result<Vec<_>>>()?;
    Ok(DecoherenceCurve { times: times.to_vec(), w, spectrum_id: s.id(), sequence_id: seq.id(), tol: opts.tol })
}

/// The first `W = 1/e` crossing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceResult {
    /// Coherence time in s; `t_max` when no crossing was found.
    pub t2: f64,
    /// `(lo, hi)` with `W(lo) > 1/e ≥ W(hi)`.
    pub crossing_bracket: (f64, f64),
    pub n_pulses: usize,
    pub family: Family,
    pub sequence_id: String,
    /// False when `W` stays above `1/e` up to `t_max`.
    pub converged: bool,
    /// False when `W` was not strictly decreasing on the samples taken inside the bracket.
    pub monotone: bool,
}

const SCAN_FACTOR: f64 = 1.5;
const BRACKET_REL_WIDTH: f64 = 1e-4;

/// First crossing of `W = 1/e` (χ = 1) below `t_max`: geometric scan by a
/// factor 1.5 from `1e-4·t_max`, then bisection to relative width `1e-4`,
/// then log-log interpolation of χ inside the final bracket.
pub fn coherence_time(s: &PowerSpectrum, seq: &PulseSequence, t_max: f64, tol: f64) -> Result<CoherenceResult> {
    coherence_time_with(s, seq, t_max, &QuadratureOptions::new(tol)?)
}

pub fn coherence_time_with(
    s: &PowerSpectrum,
    seq: &PulseSequence,
    t_max: f64,
    opts: &QuadratureOptions,
) -> Result<CoherenceResult> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(invalid(format!("t_max must be finite and positive, got {t_max}")));
    }
    let chi = |t: f64| dephasing_exponent(s, seq, t, opts).map(|i| i.value);
    let result = |t2, bracket, converged, monotone| CoherenceResult {
        t2,
        crossing_bracket: bracket,
        n_pulses: seq.n_pulses(),
        family: seq.family(),
        sequence_id: seq.id(),
        converged,
        monotone,
    };

    let (mut lo, mut chi_lo) = (0.0, 0.0);
    let mut t = 1e-4 * t_max;
    let (mut hi, mut chi_hi) = loop {
        let c = chi(t)?;
        if c >= 1.0 {
            break (t, c);
        }
        if t >= t_max {
            return Ok(result(t_max, (lo, t_max), false, true));
        }
        (lo, chi_lo) = (t, c);
        t = (t * SCAN_FACTOR).min(t_max);
    };

    let mut samples = vec![(lo, chi_lo), (hi, chi_hi)];
    while hi - lo > BRACKET_REL_WIDTH * hi {
        let mid = 0.5 * (lo + hi);
        let c = chi(mid)?;
        samples.push((mid, c));
        if c >= 1.0 {
            (hi, chi_hi) = (mid, c);
        } else {
            (lo, chi_lo) = (mid, c);
        }
    }
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let monotone = samples.windows(2).all(|w| w[1].1 > w[0].1);

    let t2 = if lo > 0.0 && chi_lo > 0.0 && chi_hi > chi_lo {
        let (l0, l1) = (lo.ln(), hi.ln());
        let (c0, c1) = (chi_lo.ln(), chi_hi.ln());
        (l0 + (0.0 - c0) * (l1 - l0) / (c1 - c0)).exp().clamp(lo, hi)
    } else {
        lo + (1.0 - chi_lo) * (hi - lo) / (chi_hi - chi_lo)
    };
    Ok(result(t2, (lo, hi), true, monotone))
}

/// Coherence times for one family over a list of orders (pulse counts, or
/// levels for CDD). Results come back in input order; a failure at one order
/// does not stop the others.
pub fn pulse_scan(
    s: &PowerSpectrum,
    family: Family,
    orders: &[usize],
    t_max: f64,
    tol: f64,
) -> Result<Vec<Result<CoherenceResult>>> {
    if orders.is_empty() {
        return Err(invalid("pulse scan needs at least one order"));
    }
    if orders.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("pulse scan orders must be strictly ascending"));
    }
    let opts = QuadratureOptions::new(tol)?;
    Ok(orders
        .par_iter()
        .map(|&n| {
            let seq = PulseSequence::catalog(family, n)?;
            coherence_time_with(s, &seq, t_max, &opts)
        })
        .collect())
}

/// A spectrum rescaled so that its FID coherence time equals a target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub spectrum: PowerSpectrum,
    /// Multiplier applied to the spectrum; `√factor` rescales `E_L`.
    pub factor: f64,
}

/// Since χ is linear in the spectrum, dividing by `χ_FID(target)` puts the
/// FID crossing exactly at `target`.
pub fn calibrate_fid(s: &PowerSpectrum, target_t2: f64, opts: &QuadratureOptions) -> Result<Calibration> {
    if !(target_t2.is_finite() && target_t2 > 0.0) {
        return Err(invalid(format!("calibration target must be positive, got {target_t2}")));
    }
    let chi = dephasing_exponent(s, &PulseSequence::fid(), target_t2, opts)?.value;
    if !(chi > 0.0) {
        return Err(invalid("cannot calibrate a spectrum that causes no dephasing"));
    }
    let factor = 1.0 / chi;
    let spectrum = s.scaled(factor)?;
    Ok(Calibration { spectrum, factor })
}

/// Analytic FID exponent of white noise `S_f = level` on `(0, ∞)`: `level·t/4`.
pub fn white_fid_exponent(level: f64, t: f64) -> f64 {
    0.25 * level * t
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn opts(tol: f64) -> QuadratureOptions {
        QuadratureOptions::new(tol).unwrap()
    }

    #[test]
    fn tolerance_contract() {
        assert!(QuadratureOptions::new(0.0).is_err());
        assert!(QuadratureOptions::new(2e-3).is_err());
        assert!(QuadratureOptions::new(1e-3).is_ok());
    }

    #[test]
    fn zero_time_is_exactly_coherent() {
        let s = PowerSpectrum::white(5.0, 0.1, 10.0).unwrap();
        assert_eq!(decoherence_at(&s, &PulseSequence::cpmg(4).unwrap(), 0.0, 1e-6).unwrap(), 1.0);
    }

    #[test]
    fn zero_spectrum_gives_unit_w() {
        let s = PowerSpectrum::white(0.0, 0.1, 10.0).unwrap();
        assert_eq!(decoherence_at(&s, &PulseSequence::fid(), 3.0, 1e-6).unwrap(), 1.0);
    }

    #[test]
    fn white_fid_matches_band_limited_reference() {
        // χ = ∫ df S_f F(2πft)/(4π²f²), summed by a fine trapezoid in f
        let s = PowerSpectrum::white(3.0, 0.5, 40.0).unwrap();
        let t = 0.7;
        let chi = dephasing_exponent(&s, &PulseSequence::fid(), t, &opts(1e-9)).unwrap().value;
        let n = 400_000;
        let (a, b) = (0.5, 40.0);
        let h = (b - a) / n as f64;
        let g = |f: f64| 3.0 * 2.0 * (PI * f * t).sin().powi(2) / (4.0 * PI * PI * f * f);
        let mut acc = 0.5 * (g(a) + g(b));
        for k in 1..n {
            acc += g(a + k as f64 * h);
        }
        assert_relative_eq!(chi, acc * h, max_relative = 1e-8);
    }

    #[test]
    fn wide_white_band_approaches_analytic_decay() {
        let s0 = 4.0;
        let s = PowerSpectrum::white(s0, 1e-5, 1e5).unwrap();
        for t in [0.25, 1.0, 2.0] {
            let w = decoherence_at(&s, &PulseSequence::fid(), t, 1e-7).unwrap();
            assert!((w - (-white_fid_exponent(s0, t)).exp()).abs() < 1e-4, "t = {t}");
        }
    }

    #[test]
    fn chi_scales_linearly_with_spectrum() {
        let s = PowerSpectrum::power_law(1e-2, 5.0 / 3.0, 1e-3, 200.0).unwrap();
        let seq = PulseSequence::udd(3).unwrap();
        let o = opts(1e-9);
        let a = dephasing_exponent(&s, &seq, 2.0, &o).unwrap().value;
        let b = dephasing_exponent(&s.scaled(3.5).unwrap(), &seq, 2.0, &o).unwrap().value;
        assert_relative_eq!(b, 3.5 * a, max_relative = 1e-8);
    }

    #[test]
    fn panel_phasors_agree_with_direct_filter() {
        // long window: thousands of panels, so phasor recurrence drift would show
        let s = PowerSpectrum::lorentzian(1.0, 30.0, 1e-2, 500.0).unwrap();
        let seq = PulseSequence::udd(7).unwrap();
        let t = 8.0;
        let fast = dephasing_exponent(&s, &seq, t, &opts(1e-10)).unwrap().value;
        let slow = {
            let to_hz = 1.0 / (TAU * t);
            let f = |x: f64| s.one_sided(x * to_hz) / (x * x) * filter(&seq, x);
            let (a, b) = (LOG_SPLIT, TAU * 500.0 * t);
            let n = ((b - a) / PANEL_WIDTH).ceil() as usize;
            let w = (b - a) / n as f64;
            let lin: f64 = (0..n).map(|k| GK21.apply(f, a + k as f64 * w, a + (k + 1) as f64 * w).value).sum();
            let lg = |u: f64| {
                let x = u.exp();
                x * f(x)
            };
            let (ua, ub) = ((TAU * 1e-2 * t).ln(), LOG_SPLIT.ln());
            let m = 2000;
            let du = (ub - ua) / m as f64;
            let log: f64 = (0..m).map(|k| GK15.apply(lg, ua + k as f64 * du, ua + (k + 1) as f64 * du).value).sum();
            t / TAU * (lin + log)
        };
        assert_relative_eq!(fast, slow, max_relative = 1e-9);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let s = PowerSpectrum::white(1.0, 1e-3, 1e3).unwrap();
        let o = opts(1e-6).with_budget(1000);
        let err = dephasing_exponent(&s, &PulseSequence::fid(), 50.0, &o).unwrap_err();
        assert!(matches!(err, Error::QuadratureBudget { .. }));
    }

    #[test]
    fn gaps_between_sources_are_skipped() {
        let a = PowerSpectrum::white(1.0, 0.1, 1.0).unwrap();
        let b = PowerSpectrum::white(2.0, 100.0, 200.0).unwrap();
        let ab = PowerSpectrum::combine(vec![a.clone(), b.clone()]).unwrap();
        let seq = PulseSequence::cpmg(3).unwrap();
        let o = opts(1e-9);
        let chi = |s: &PowerSpectrum| dephasing_exponent(s, &seq, 1.3, &o).unwrap().value;
        assert_relative_eq!(chi(&ab), chi(&a) + chi(&b), max_relative = 2e-9);
    }

    #[test]
    fn multi_source_is_product() {
        let s = PowerSpectrum::white(4.0, 1e-4, 1e4).unwrap();
        let zero = PowerSpectrum::white(0.0, 1e-4, 1e4).unwrap();
        let fid = PulseSequence::fid();
        let one = decoherence_at(&s, &fid, 0.5, 1e-7).unwrap();
        let two = multi_source_w(&[s.clone(), s.clone()], &fid, 0.5, 1e-7).unwrap();
        assert_relative_eq!(two, one * one, max_relative = 1e-12);
        assert_eq!(multi_source_w(&[s.clone(), zero], &fid, 0.5, 1e-7).unwrap(), one);
        assert!(multi_source_w(&[], &fid, 0.5, 1e-7).is_err());
    }

    #[test]
    fn white_fid_coherence_time_is_inverted_decay() {
        // exp(-S0 t/4) = 1/e at t = 1 for S0 = 4
        let s = PowerSpectrum::white(4.0, 1e-4, 1e4).unwrap();
        let r = coherence_time(&s, &PulseSequence::fid(), 10.0, 1e-6).unwrap();
        assert!(r.converged && r.monotone);
        assert!((r.t2 - 1.0).abs() < 1e-3, "t2 = {}", r.t2);
        assert!(r.crossing_bracket.0 <= r.t2 && r.t2 <= r.crossing_bracket.1);
    }

    #[test]
    fn no_crossing_reports_t_max() {
        let s = PowerSpectrum::white(1e-6, 1e-2, 10.0).unwrap();
        let r = coherence_time(&s, &PulseSequence::fid(), 5.0, 1e-5).unwrap();
        assert!(!r.converged);
        assert_eq!(r.t2, 5.0);
    }

    #[test]
    fn calibration_hits_target() {
        let s = PowerSpectrum::power_law(0.3, 5.0 / 3.0, 1e-3, 1e3).unwrap();
        let o = opts(1e-8);
        let cal = calibrate_fid(&s, 2.0, &o).unwrap();
        let chi = dephasing_exponent(&cal.spectrum, &PulseSequence::fid(), 2.0, &o).unwrap().value;
        assert_relative_eq!(chi, 1.0, max_relative = 1e-7);
    }

    #[test]
    fn scan_keeps_input_order() {
        let s = PowerSpectrum::white(4.0, 1e-2, 100.0).unwrap();
        let out = pulse_scan(&s, Family::Cpmg, &[1, 2, 4], 100.0, 1e-5).unwrap();
        let ns: Vec<usize> = out.iter().map(|r| r.as_ref().unwrap().n_pulses).collect();
        assert_eq!(ns, vec![1, 2, 4]);
        assert!(pulse_scan(&s, Family::Cpmg, &[], 1.0, 1e-5).is_err());
        assert!(pulse_scan(&s, Family::Cpmg, &[2, 1], 1.0, 1e-5).is_err());
        let single = pulse_scan(&s, Family::Cpmg, &[2], 100.0, 1e-5).unwrap();
        let direct = coherence_time(&s, &PulseSequence::cpmg(2).unwrap(), 100.0, 1e-5).unwrap();
        assert_eq!(single[0].as_ref().unwrap(), &direct);
    }
}
