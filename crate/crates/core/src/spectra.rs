//! Noise power spectra of the qubit splitting fluctuation ε(t).
//!
//! Spectra are stored as one-sided densities per hertz, `S_f(f)` in
//! (rad/s)²/Hz, with hard band limits `[f_ir, f_uv]` outside of which the
//! density is exactly zero. The dephasing integral uses the two-sided
//! angular density `S(ω)`, the Fourier transform of the autocorrelation
//! `⟨ε(t)ε(t+τ)⟩`. The two are related by
//!
//! ```text
//! S(ω) = S_f(ω / 2π) / 2,      Var[ε] = ∫₀^∞ (dω/π) S(ω) = ∫₀^∞ S_f(f) df
//! ```
//!
//! ε is always an angular frequency (ħ = 1).

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Relative intensity noise of the YAG trapping laser, `S(f)/E_L²` at 1 Hz (1/Hz).
pub const YAG_RIN_AMPLITUDE: f64 = 3.162_277_660_168_379_4e-9; // 10^-8.5
/// Power-law exponent of the YAG intensity noise.
pub const YAG_RIN_EXPONENT: f64 = 5.0 / 3.0;
/// Infrared cutoff set by the longest trap lifetime (~400 s), in rad/s.
pub const TRAP_LIFETIME_IR_CUTOFF: f64 = 0.016;
/// Upper end of the band over which the YAG power law holds, in Hz.
pub const YAG_RIN_BAND_TOP_HZ: f64 = 1000.0;

/// Converts a one-sided per-hertz density value into the two-sided angular
/// density used in the dephasing integral.
#[inline]
pub fn angular_from_one_sided(s_f: f64) -> f64 {
    0.5 * s_f
}

/// The spectral kind, for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    PowerLaw,
    White,
    Lorentzian,
    Tabulated,
    Sum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// `S_f = amplitude · f^(-exponent)`; `amplitude` is the value at 1 Hz.
    PowerLaw {
        amplitude: f64,
        exponent: f64,
    },
    White {
        level: f64,
    },
    /// `S_f = amplitude / (1 + (f/corner)²)`, the spectrum of an
    /// Ornstein–Uhlenbeck process.
    Lorentzian {
        amplitude: f64,
        corner: f64,
    },
    /// Log-log linear interpolation between `(f, S_f)` knots.
    Tabulated {
        knots: Vec<(f64, f64)>,
    },
    Sum {
        children: Vec<PowerSpectrum>,
    },
}

/// A band-limited one-sided noise spectrum. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpectrum")]
pub struct PowerSpectrum {
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    f_ir: f64,
    f_uv: f64,
    shape: Shape,
}

#[derive(Deserialize)]
struct RawSpectrum {
    #[serde(default)]
    label: Option<String>,
    f_ir: f64,
    f_uv: f64,
    shape: Shape,
}

impl TryFrom<RawSpectrum> for PowerSpectrum {
    type Error = Error;

    fn try_from(raw: RawSpectrum) -> Result<Self> {
        let s = PowerSpectrum { label: raw.label, f_ir: raw.f_ir, f_uv: raw.f_uv, shape: raw.shape };
        s.validate()?;
        Ok(s)
    }
}

fn check_band(f_ir: f64, f_uv: f64) -> Result<()> {
    if !(f_ir.is_finite() && f_uv.is_finite()) {
        return Err(invalid(format!("band limits must be finite, got [{f_ir}, {f_uv}]")));
    }
    if !(f_ir > 0.0 && f_ir < f_uv) {
        return Err(invalid(format!("band limits must satisfy 0 < f_ir < f_uv, got [{f_ir}, {f_uv}]")));
    }
    Ok(())
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite and non-negative, got {v}")))
    }
}

impl PowerSpectrum {
    /// Power law `S_f(f) = amplitude · f^(-exponent)` on `[f_ir, f_uv]`.
    pub fn power_law(amplitude: f64, exponent: f64, f_ir: f64, f_uv: f64) -> Result<Self> {
        check_nonneg("amplitude", amplitude)?;
        check_nonneg("exponent", exponent)?;
        check_band(f_ir, f_uv)?;
        Ok(PowerSpectrum { label: None, f_ir, f_uv, shape: Shape::PowerLaw { amplitude, exponent } })
    }

    pub fn white(level: f64, f_ir: f64, f_uv: f64) -> Result<Self> {
        check_nonneg("level", level)?;
        check_band(f_ir, f_uv)?;
        Ok(PowerSpectrum { label: None, f_ir, f_uv, shape: Shape::White { level } })
    }

    pub fn lorentzian(amplitude: f64, corner: f64, f_ir: f64, f_uv: f64) -> Result<Self> {
        check_nonneg("amplitude", amplitude)?;
        if !(corner.is_finite() && corner > 0.0) {
            return Err(invalid(format!("corner frequency must be positive, got {corner}")));
        }
        check_band(f_ir, f_uv)?;
        Ok(PowerSpectrum { label: None, f_ir, f_uv, shape: Shape::Lorentzian { amplitude, corner } })
    }

    /// Tabulated spectrum; the band is the knot range.
    pub fn tabulated(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(invalid("a tabulated spectrum needs at least two knots"));
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(invalid("tabulated knot frequencies must be strictly increasing"));
            }
        }
        for &(f, s) in &knots {
            check_nonneg("knot value", s)?;
            if !(f.is_finite() && f > 0.0) {
                return Err(invalid(format!("knot frequency must be positive, got {f}")));
            }
        }
        let f_ir = knots[0].0;
        let f_uv = knots[knots.len() - 1].0;
        Ok(PowerSpectrum { label: None, f_ir, f_uv, shape: Shape::Tabulated { knots } })
    }

    /// Reads a two-column CSV with header `f_hz,s_f`.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
        if headers.len() != 2 || &headers[0] != "f_hz" || &headers[1] != "s_f" {
            return Err(Error::Parse(format!(
                "spectrum CSV header must be `f_hz,s_f`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut knots = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let parse = |i: usize| -> Result<f64> {
                rec[i].parse::<f64>().map_err(|e| Error::Parse(format!("row {}: {e}", line + 2)))
            };
            knots.push((parse(0)?, parse(1)?));
        }
        Self::tabulated(knots)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut s = Self::from_csv_reader(file)?;
        s.label = Some(format!("csv:{}", path.display()));
        Ok(s)
    }

    /// Sum of mutually uncorrelated sources. Each child contributes only
    /// inside its own band.
    pub fn combine(spectra: Vec<PowerSpectrum>) -> Result<Self> {
        if spectra.is_empty() {
            return Err(invalid("cannot combine an empty list of spectra"));
        }
        let f_ir = spectra.iter().map(|s| s.f_ir).fold(f64::INFINITY, f64::min);
        let f_uv = spectra.iter().map(|s| s.f_uv).fold(f64::NEG_INFINITY, f64::max);
        Ok(PowerSpectrum { label: None, f_ir, f_uv, shape: Shape::Sum { children: spectra } })
    }

    fn validate(&self) -> Result<()> {
        match &self.shape {
            Shape::PowerLaw { amplitude, exponent } => {
                Self::power_law(*amplitude, *exponent, self.f_ir, self.f_uv).map(|_| ())
            }
            Shape::White { level } => Self::white(*level, self.f_ir, self.f_uv).map(|_| ()),
            Shape::Lorentzian { amplitude, corner } => {
                Self::lorentzian(*amplitude, *corner, self.f_ir, self.f_uv).map(|_| ())
            }
            Shape::Tabulated { knots } => {
                let t = Self::tabulated(knots.clone())?;
                if t.f_ir != self.f_ir || t.f_uv != self.f_uv {
                    return Err(invalid("tabulated band must equal the knot range"));
                }
                Ok(())
            }
            Shape::Sum { children } => {
                if children.is_empty() {
                    return Err(invalid("a sum spectrum needs at least one child"));
                }
                children.iter().try_for_each(|c| c.validate())
            }
        }
    }

    /// Attaches a human-readable name used as the provenance id.
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn kind(&self) -> SpectrumKind {
        match self.shape {
            Shape::PowerLaw { .. } => SpectrumKind::PowerLaw,
            Shape::White { .. } => SpectrumKind::White,
            Shape::Lorentzian { .. } => SpectrumKind::Lorentzian,
            Shape::Tabulated { .. } => SpectrumKind::Tabulated,
            Shape::Sum { .. } => SpectrumKind::Sum,
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// `(f_ir, f_uv)` in Hz. For sums this is the hull of the children's bands.
    pub fn band(&self) -> (f64, f64) {
        (self.f_ir, self.f_uv)
    }

    /// One-sided density `S_f(f)` in (rad/s)²/Hz; exactly zero outside the band.
    pub fn one_sided(&self, f: f64) -> f64 {
        if !(f >= self.f_ir && f <= self.f_uv) {
            return 0.0;
        }
        match &self.shape {
            Shape::PowerLaw { amplitude, exponent } => {
                if *exponent == 0.0 {
                    *amplitude
                } else {
                    amplitude * f.powf(-exponent)
                }
            }
            Shape::White { level } => *level,
            Shape::Lorentzian { amplitude, corner } => {
                let r = f / corner;
                amplitude / (1.0 + r * r)
            }
            Shape::Tabulated { knots } => interpolate_log_log(knots, f),
            Shape::Sum { children } => children.iter().map(|c| c.one_sided(f)).sum(),
        }
    }

    /// Two-sided angular density `S(ω) = S_f(ω/2π)/2`, in (rad/s)²·s.
    pub fn angular(&self, omega: f64) -> f64 {
        angular_from_one_sided(self.one_sided(omega / (2.0 * PI)))
    }

    /// Exact `∫ S_f df` over `[f_lo, f_hi]` intersected with the band.
    pub fn band_power(&self, f_lo: f64, f_hi: f64) -> f64 {
        if let Shape::Sum { children } = &self.shape {
            return children.iter().map(|c| c.band_power(f_lo, f_hi)).sum();
        }
        let a = f_lo.max(self.f_ir);
        let b = f_hi.min(self.f_uv);
        if !(b > a) {
            return 0.0;
        }
        match &self.shape {
            Shape::PowerLaw { amplitude, exponent } => {
                let p = 1.0 - exponent;
                if p.abs() < 1e-12 {
                    amplitude * (b / a).ln()
                } else {
                    amplitude * (b.powf(p) - a.powf(p)) / p
                }
            }
            Shape::White { level } => level * (b - a),
            Shape::Lorentzian { amplitude, corner } => amplitude * corner * ((b / corner).atan() - (a / corner).atan()),
            Shape::Tabulated { knots } => tabulated_power(knots, a, b),
            Shape::Sum { .. } => unreachable!(),
        }
    }

    /// Total variance `Var[ε] = ∫ S_f df`, in (rad/s)².
    pub fn variance(&self) -> f64 {
        self.band_power(self.f_ir, self.f_uv)
    }

    /// The same spectrum with every density multiplied by `factor ≥ 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        check_nonneg("scale factor", factor)?;
        let shape = match &self.shape {
            Shape::PowerLaw { amplitude, exponent } => {
                Shape::PowerLaw { amplitude: amplitude * factor, exponent: *exponent }
            }
            Shape::White { level } => Shape::White { level: level * factor },
            Shape::Lorentzian { amplitude, corner } => {
                Shape::Lorentzian { amplitude: amplitude * factor, corner: *corner }
            }
            Shape::Tabulated { knots } => {
                Shape::Tabulated { knots: knots.iter().map(|&(f, s)| (f, s * factor)).collect() }
            }
            Shape::Sum { children } => {
                Shape::Sum { children: children.iter().map(|c| c.scaled(factor)).collect::<Result<_>>()? }
            }
        };
        Ok(PowerSpectrum {
            label: self.label.as_ref().map(|l| format!("{l}*{factor}")),
            f_ir: self.f_ir,
            f_uv: self.f_uv,
            shape,
        })
    }

    /// Disjoint, sorted frequency intervals (Hz) outside of which the density is zero.
    pub fn support(&self) -> Vec<(f64, f64)> {
        let mut bands = Vec::new();
        self.collect_bands(&mut bands);
        bands.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(bands.len());
        for (lo, hi) in bands {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        merged
    }

    fn collect_bands(&self, out: &mut Vec<(f64, f64)>) {
        match &self.shape {
            Shape::Sum { children } => children.iter().for_each(|c| c.collect_bands(out)),
            _ => out.push((self.f_ir, self.f_uv)),
        }
    }

    /// Sorted frequencies (Hz) where the density or its slope is discontinuous.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = Vec::new();
        self.collect_breakpoints(&mut pts);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    fn collect_breakpoints(&self, out: &mut Vec<f64>) {
        out.push(self.f_ir);
        out.push(self.f_uv);
        match &self.shape {
            Shape::Tabulated { knots } => out.extend(knots.iter().map(|k| k.0)),
            Shape::Sum { children } => children.iter().for_each(|c| c.collect_breakpoints(out)),
            _ => {}
        }
    }

    /// Provenance id: the label if one was attached, otherwise a canonical description.
    pub fn id(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        let band = format!("f_ir={},f_uv={}", self.f_ir, self.f_uv);
        match &self.shape {
            Shape::PowerLaw { amplitude, exponent } => {
                format!("powerlaw:A={amplitude},alpha={exponent},{band}")
            }
            Shape::White { level } => format!("white:S0={level},{band}"),
            Shape::Lorentzian { amplitude, corner } => {
                format!("lorentzian:A={amplitude},fc={corner},{band}")
            }
            Shape::Tabulated { knots } => format!("tabulated:{}knots,{band}", knots.len()),
            Shape::Sum { children } => {
                let ids: Vec<_> = children.iter().map(|c| c.id()).collect();
                format!("sum[{}]", ids.join(" + "))
            }
        }
    }
}

/// Finds the segment `i` with `knots[i].0 <= f < knots[i+1].0`.
fn segment(knots: &[(f64, f64)], f: f64) -> usize {
    let i = knots.partition_point(|k| k.0 <= f);
    i.saturating_sub(1).min(knots.len() - 2)
}

fn interpolate_log_log(knots: &[(f64, f64)], f: f64) -> f64 {
    if let Ok(i) = knots.binary_search_by(|k| k.0.total_cmp(&f)) {
        return knots[i].1;
    }
    let i = segment(knots, f);
    let (f0, s0) = knots[i];
    let (f1, s1) = knots[i + 1];
    if s0 <= 0.0 || s1 <= 0.0 {
        // log-log is undefined through a zero; fall back to linear
        return s0 + (s1 - s0) * (f - f0) / (f1 - f0);
    }
    let slope = (s1 / s0).ln() / (f1 / f0).ln();
    s0 * (f / f0).powf(slope)
}

fn tabulated_power(knots: &[(f64, f64)], a: f64, b: f64) -> f64 {
    let mut total = 0.0;
    for w in knots.windows(2) {
        let (f0, s0) = w[0];
        let (f1, s1) = w[1];
        let lo = a.max(f0);
        let hi = b.min(f1);
        if !(hi > lo) {
            continue;
        }
        if s0 <= 0.0 || s1 <= 0.0 {
            let lin = |f: f64| s0 + (s1 - s0) * (f - f0) / (f1 - f0);
            total += 0.5 * (lin(lo) + lin(hi)) * (hi - lo);
            continue;
        }
        let slope = (s1 / s0).ln() / (f1 / f0).ln();
        let p = slope + 1.0;
        let c = s0 / f0.powf(slope);
        total += if p.abs() < 1e-12 { c * (hi / lo).ln() } else { c * (hi.powf(p) - lo.powf(p)) / p };
    }
    total
}

/// The YAG intensity-noise spectrum for a given light-shift coefficient `e_l` (rad/s):
/// `S_f = e_l² · 10^-8.5 · f^(-5/3)` between `ω_ir = 0.016 rad/s` and 1 kHz.
pub fn yag_intensity_noise(e_l: f64) -> Result<PowerSpectrum> {
    PowerSpectrum::power_law(
        e_l * e_l * YAG_RIN_AMPLITUDE,
        YAG_RIN_EXPONENT,
        TRAP_LIFETIME_IR_CUTOFF / (2.0 * PI),
        YAG_RIN_BAND_TOP_HZ,
    )
}
