//! Resolution of command-line flags, config files and inline specs.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::presets::{spectrum_preset, SPECTRUM_PRESETS};
use crate::spectra::{PowerSpectrum, TRAP_LIFETIME_IR_CUTOFF, YAG_RIN_BAND_TOP_HZ};

/// Band used by inline white and Lorentzian specs when none is given, Hz.
pub const WIDE_BAND: (f64, f64) = (1e-4, 1e4);

/// Every option name accepted by some subcommand.
pub const KNOWN_KEYS: &[&str] = &[
    "b-field",
    "calibrate-fid-t2",
    "closed-form",
    "dt",
    "family",
    "format",
    "gnuplot",
    "n",
    "out",
    "peak-intensity",
    "pointing-amplitude",
    "pointing-freq",
    "preset",
    "seed",
    "seq",
    "spectrum",
    "t",
    "t-max",
    "tol",
    "trace-out",
    "trap-config",
    "trials",
    "x",
];

/// Flat key/value settings from a config file; every key must be consumed.
#[derive(Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
    used: RefCell<BTreeSet<String>>,
}

impl Settings {
    /// Reads `key = value` lines (`#` comments) or a flat JSON object.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        if text.trim_start().starts_with('{') {
            let obj: BTreeMap<String, serde_json::Value> =
                serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
            for (k, v) in obj {
                let s = match v {
                    serde_json::Value::String(s) => s,
                    serde_json::Value::Number(n) => n.to_string(),
                    serde_json::Value::Bool(b) => b.to_string(),
                    other => return Err(Error::Parse(format!("config key `{k}` has unsupported value {other}"))),
                };
                values.insert(normalize(&k), s);
            }
        } else {
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", i + 1)))?;
                let v = v.trim().trim_matches('"');
                values.insert(normalize(k.trim()), v.to_string());
            }
        }
        Ok(Settings { values, used: RefCell::default() })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Io(format!("reading config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The flag value if given, otherwise the file value for `key`.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        self.used.borrow_mut().insert(key.to_string());
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|e| Error::Parse(format!("config key `{key}`: {e}"))),
        }
    }

    /// Rejects keys that no subcommand recognizes. Keys belonging to other
    /// subcommands are ignored so one file can serve several commands.
    pub fn finish(&self) -> Result<()> {
        let used = self.used.borrow();
        let unknown: Vec<&String> =
            self.values.keys().filter(|k| !used.contains(*k) && !KNOWN_KEYS.contains(&k.as_str())).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(invalid(format!("unknown config keys: {unknown:?}")))
        }
    }
}

fn normalize(key: &str) -> String {
    key.trim().trim_start_matches("--").replace('_', "-")
}

/// A time or abscissa grid: `start:stop:step` (inclusive of `stop` to within
/// rounding) or a comma list. Must be non-empty and strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    pub spec: String,
    pub values: Vec<f64>,
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let num = |p: &str| -> Result<f64> {
            p.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad number `{p}` in grid `{spec}`: {e}")))
        };
        let values = if spec.contains(':') {
            let parts: Vec<&str> = spec.split(':').collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!("grid `{spec}` must be start:stop:step")));
            }
            let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if !(start.is_finite() && stop.is_finite() && step.is_finite()) || !(stop > start) || !(step > 0.0) {
                return Err(invalid(format!("grid `{spec}` needs stop > start and step > 0")));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if n > 10_000_000 {
                return Err(invalid(format!("grid `{spec}` has too many points")));
            }
            match decimal_scale(&parts) {
                Some(scale) => {
                    let (a, h) = ((start * scale).round(), (step * scale).round());
                    (0..n).map(|i| (a + i as f64 * h) / scale).collect()
                }
                None => (0..n).map(|i| start + i as f64 * step).collect(),
            }
        } else {
            spec.split(',').filter(|p| !p.trim().is_empty()).map(num).collect::<Result<Vec<f64>>>()?
        };
        if values.is_empty() {
            return Err(invalid(format!("grid `{spec}` is empty")));
        }
        if values.windows(2).any(|w| !(w[1] > w[0])) || values.iter().any(|v| !v.is_finite()) {
            return Err(invalid(format!("grid `{spec}` must be finite and strictly increasing")));
        }
        Ok(Grid { spec: spec.to_string(), values })
    }
}

/// Pulse counts (or CDD levels): `a:b`, `a:b:step`, or a comma list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Orders(pub Vec<usize>);

impl FromStr for Orders {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let num = |p: &str| -> Result<usize> {
            p.trim().parse::<usize>().map_err(|e| Error::Parse(format!("bad count `{p}` in `{spec}`: {e}")))
        };
        let v: Vec<usize> = if spec.contains(':') {
            let parts: Vec<&str> = spec.split(':').collect();
            let (a, b, step) = match parts.as_slice() {
                [a, b] => (num(a)?, num(b)?, 1),
                [a, b, s] => (num(a)?, num(b)?, num(s)?),
                _ => return Err(Error::Parse(format!("range `{spec}` must be a:b or a:b:step"))),
            };
            if step == 0 || b < a {
                return Err(invalid(format!("range `{spec}` needs b ≥ a and step ≥ 1")));
            }
            (a..=b).step_by(step).collect()
        } else {
            spec.split(',').filter(|p| !p.trim().is_empty()).map(num).collect::<Result<_>>()?
        };
        if v.is_empty() || v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid(format!("orders `{spec}` must be non-empty and strictly ascending")));
        }
        Ok(Orders(v))
    }
}

/// `10^d` when every part is a plain decimal with at most `d ≤ 12` fractional
/// digits, so grid points can be formed as exact integers over the scale.
fn decimal_scale(parts: &[&str]) -> Option<f64> {
    let mut digits = 0;
    for p in parts {
        let p = p.trim();
        if p.contains(['e', 'E']) {
            return None;
        }
        digits = digits.max(p.split_once('.').map_or(0, |(_, f)| f.len()));
    }
    (digits <= 12).then(|| 10f64.powi(digits as i32))
}

fn kv_args(spec: &str, body: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) =
            part.split_once('=').ok_or_else(|| Error::Parse(format!("`{part}` in `{spec}` must be key=value")))?;
        let v: f64 = v.trim().parse().map_err(|e| Error::Parse(format!("bad value for `{k}` in `{spec}`: {e}")))?;
        out.insert(k.trim().to_ascii_lowercase(), v);
    }
    Ok(out)
}

fn take(args: &mut BTreeMap<String, f64>, keys: &[&str], spec: &str) -> Result<f64> {
    take_or(args, keys, None, spec)
}

fn take_or(args: &mut BTreeMap<String, f64>, keys: &[&str], default: Option<f64>, spec: &str) -> Result<f64> {
    for k in keys {
        if let Some(v) = args.remove(*k) {
            return Ok(v);
        }
    }
    default.ok_or_else(|| invalid(format!("`{spec}` is missing `{}`", keys[0])))
}

fn single_spectrum(spec: &str) -> Result<PowerSpectrum> {
    let spec = spec.trim();
    if SPECTRUM_PRESETS.contains(&spec) {
        return spectrum_preset(spec);
    }
    if let Some(path) = spec.strip_prefix("csv:") {
        return PowerSpectrum::from_csv_path(path);
    }
    if spec.to_ascii_lowercase().ends_with(".csv") {
        return PowerSpectrum::from_csv_path(spec);
    }
    let (kind, body) = spec.split_once(':').ok_or_else(|| {
        invalid(format!(
            "unknown spectrum `{spec}`; use a preset ({}), white:S0=.., powerlaw:A=..,alpha=.., lorentzian:A=..,fc=.., or a CSV path",
            SPECTRUM_PRESETS.join(", ")
        ))
    })?;
    let mut a = kv_args(spec, body)?;
    let (wide_ir, wide_uv) = WIDE_BAND;
    let s = match kind.to_ascii_lowercase().as_str() {
        "white" => {
            let level = take(&mut a, &["s0", "level"], spec)?;
            let f_ir = take_or(&mut a, &["f_ir"], Some(wide_ir), spec)?;
            let f_uv = take_or(&mut a, &["f_uv"], Some(wide_uv), spec)?;
            PowerSpectrum::white(level, f_ir, f_uv)?
        }
        "powerlaw" | "power_law" => {
            let amp = take(&mut a, &["a", "amplitude"], spec)?;
            let alpha = take(&mut a, &["alpha", "exponent"], spec)?;
            let f_ir = take_or(&mut a, &["f_ir"], Some(TRAP_LIFETIME_IR_CUTOFF / (2.0 * PI)), spec)?;
            let f_uv = take_or(&mut a, &["f_uv"], Some(YAG_RIN_BAND_TOP_HZ), spec)?;
            PowerSpectrum::power_law(amp, alpha, f_ir, f_uv)?
        }
        "lorentzian" => {
            let amp = take(&mut a, &["a", "amplitude"], spec)?;
            let fc = take(&mut a, &["fc", "corner"], spec)?;
            let f_ir = take_or(&mut a, &["f_ir"], Some(wide_ir), spec)?;
            let f_uv = take_or(&mut a, &["f_uv"], Some(wide_uv), spec)?;
            PowerSpectrum::lorentzian(amp, fc, f_ir, f_uv)?
        }
        other => return Err(invalid(format!("unknown spectrum kind `{other}` in `{spec}`"))),
    };
    if let Some(k) = a.keys().next() {
        return Err(invalid(format!("unknown parameter `{k}` in `{spec}`")));
    }
    Ok(s.with_label(spec))
}

/// Parses a spectrum spec; `a+b` combines independent sources.
pub fn parse_spectrum(spec: &str) -> Result<PowerSpectrum> {
    let parts: Vec<&str> = spec.split('+').collect();
    if parts.len() == 1 {
        return single_spectrum(spec);
    }
    let children = parts.into_iter().map(single_spectrum).collect::<Result<Vec<_>>>()?;
    Ok(PowerSpectrum::combine(children)?.with_label(spec))
}
