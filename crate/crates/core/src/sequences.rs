//! π-pulse schedules and their filter functions.
//!
//! A sequence of `n` instantaneous π pulses at fractions `s_k = t_k / t` of
//! the total evolution time toggles the sign with which the noise enters
//! the accumulated phase. The filter function is
//!
//! ```text
//! F(x) = ½ |Σ_{k=0}^{n} (-1)^k (e^{i x s_{k+1}} - e^{i x s_k})|²,   s_0 = 0, s_{n+1} = 1
//! ```
//!
//! with `x = ωt`. [`filter`] evaluates this sum and is what the coherence
//! integrator uses for every family. The printed closed forms in
//! [`filter_closed_form`] are kept only as cross-checks.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Fid,
    Se,
    Cpmg,
    Pdd,
    Cdd,
    Udd,
    Custom,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Fid => "fid",
            Family::Se => "se",
            Family::Cpmg => "cpmg",
            Family::Pdd => "pdd",
            Family::Cdd => "cdd",
            Family::Udd => "udd",
            Family::Custom => "custom",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "fid" => Family::Fid,
            "se" => Family::Se,
            "cpmg" => Family::Cpmg,
            "pdd" => Family::Pdd,
            "cdd" => Family::Cdd,
            "udd" => Family::Udd,
            "custom" => Family::Custom,
            other => return Err(Error::Parse(format!("unknown sequence family `{other}`"))),
        })
    }
}

/// An ordered set of π-pulse times, as fractions of the total evolution time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSequence")]
pub struct PulseSequence {
    family: Family,
    #[serde(rename = "n")]
    n_pulses: usize,
    fractions: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cdd_level: Option<u32>,
}

#[derive(Deserialize)]
struct RawSequence {
    family: Family,
    n: usize,
    fractions: Vec<f64>,
    #[serde(default)]
    cdd_level: Option<u32>,
}

impl TryFrom<RawSequence> for PulseSequence {
    type Error = Error;

    fn try_from(raw: RawSequence) -> Result<Self> {
        check_fractions(&raw.fractions)?;
        if raw.n != raw.fractions.len() {
            return Err(invalid("sequence `n` must equal the number of fractions"));
        }
        if (raw.family == Family::Fid) != raw.fractions.is_empty() {
            return Err(invalid("only fid has no pulses"));
        }
        Ok(PulseSequence { family: raw.family, n_pulses: raw.n, fractions: raw.fractions, cdd_level: raw.cdd_level })
    }
}

fn check_fractions(fr: &[f64]) -> Result<()> {
    if let Some(&bad) = fr.iter().find(|&&s| !(s > 0.0 && s < 1.0)) {
        return Err(invalid(format!("pulse fraction {bad} must lie strictly inside (0, 1)")));
    }
    if fr.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("pulse fractions must be strictly increasing without duplicates"));
    }
    Ok(())
}

fn cdd_fractions(level: u32, lo: f64, hi: f64, out: &mut Vec<f64>) {
    if level == 0 {
        return;
    }
    let mid = 0.5 * (lo + hi);
    cdd_fractions(level - 1, lo, mid, out);
    if level % 2 == 1 {
        out.push(mid);
    }
    cdd_fractions(level - 1, mid, hi, out);
}

impl PulseSequence {
    /// Free induction decay: no pulses.
    pub fn fid() -> Self {
        PulseSequence { family: Family::Fid, n_pulses: 0, fractions: Vec::new(), cdd_level: None }
    }

    /// Spin echo: one π pulse at half time.
    pub fn se() -> Self {
        PulseSequence { family: Family::Se, n_pulses: 1, fractions: vec![0.5], cdd_level: None }
    }

    /// Catalog sequence of the given family. `order` is the pulse count,
    /// except for CDD where it is the concatenation level.
    pub fn catalog(family: Family, order: usize) -> Result<Self> {
        if order == 0 {
            return match family {
                Family::Fid => Ok(Self::fid()),
                _ => Err(invalid(format!("{family} needs at least one pulse; use fid for free evolution"))),
            };
        }
        let k = (1..=order).map(|k| k as f64);
        let n = order as f64;
        let fractions: Vec<f64> = match family {
            Family::Fid => return Err(invalid("fid takes no pulses")),
            Family::Se if order == 1 => return Ok(Self::se()),
            Family::Se => return Err(invalid("se has exactly one pulse")),
            Family::Cpmg => k.map(|k| (k - 0.5) / n).collect(),
            Family::Pdd => k.map(|k| k / (n + 1.0)).collect(),
            Family::Udd => k
                .map(|k| {
                    let s = (PI * k / (2.0 * n + 2.0)).sin();
                    s * s
                })
                .collect(),
            Family::Cdd => {
                let level = u32::try_from(order)
                    .ok()
                    .filter(|&l| l <= 24)
                    .ok_or_else(|| invalid("cdd level above 24 is not supported"))?;
                let mut out = Vec::new();
                cdd_fractions(level, 0.0, 1.0, &mut out);
                return Ok(PulseSequence { family, n_pulses: out.len(), fractions: out, cdd_level: Some(level) });
            }
            Family::Custom => return Err(invalid("custom sequences are built from explicit fractions")),
        };
        Ok(PulseSequence { family, n_pulses: order, fractions, cdd_level: None })
    }

    pub fn cpmg(n: usize) -> Result<Self> {
        Self::catalog(Family::Cpmg, n)
    }

    pub fn pdd(n: usize) -> Result<Self> {
        Self::catalog(Family::Pdd, n)
    }

    pub fn udd(n: usize) -> Result<Self> {
        Self::catalog(Family::Udd, n)
    }

    pub fn cdd(level: usize) -> Result<Self> {
        Self::catalog(Family::Cdd, level)
    }

    /// An arbitrary schedule. An empty list is free evolution.
    pub fn custom(fractions: Vec<f64>) -> Result<Self> {
        check_fractions(&fractions)?;
        if fractions.is_empty() {
            return Ok(Self::fid());
        }
        Ok(PulseSequence { family: Family::Custom, n_pulses: fractions.len(), fractions, cdd_level: None })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n_pulses(&self) -> usize {
        self.n_pulses
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    pub fn cdd_level(&self) -> Option<u32> {
        self.cdd_level
    }

    /// Sign switching points `0, s_1, …, s_n, 1` with their weights in the
    /// point form of the filter sum, `F = ½|Σ_j d_j e^{i x s_j}|²`.
    pub fn switching_points(&self) -> Vec<(f64, f64)> {
        let n = self.n_pulses;
        let mut pts = Vec::with_capacity(n + 2);
        pts.push((0.0, -1.0));
        for (j, &s) in self.fractions.iter().enumerate() {
            pts.push((s, if j % 2 == 0 { 2.0 } else { -2.0 }));
        }
        pts.push((1.0, if n % 2 == 0 { 1.0 } else { -1.0 }));
        pts
    }

    /// `∫₀¹ η(s) ds` for the toggling function η; zero when the sequence
    /// refocuses static noise.
    pub fn dc_weight(&self) -> f64 {
        let mut bounds = Vec::with_capacity(self.n_pulses + 2);
        bounds.push(0.0);
        bounds.extend_from_slice(&self.fractions);
        bounds.push(1.0);
        bounds.windows(2).enumerate().map(|(k, w)| if k % 2 == 0 { w[1] - w[0] } else { w[0] - w[1] }).sum()
    }

    /// Provenance id, also the CLI syntax: `fid`, `se`, `cpmg:50`, `cdd:l=3`, `custom:0.1,0.5`.
    pub fn id(&self) -> String {
        match self.family {
            Family::Fid | Family::Se => self.family.to_string(),
            Family::Cdd => format!("cdd:l={}", self.cdd_level.unwrap_or(0)),
            Family::Custom => {
                let parts: Vec<String> = self.fractions.iter().map(|s| s.to_string()).collect();
                format!("custom:{}", parts.join(","))
            }
            _ => format!("{}:{}", self.family, self.n_pulses),
        }
    }
}

impl fmt::Display for PulseSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for PulseSequence {
    type Err = Error;

    /// Parses `fid`, `se`, `cpmg:50`, `pdd:5`, `udd:6`, `cdd:l=3` (or `cdd:3`),
    /// and `custom:0.1,0.5,0.9`.
    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (head, arg) = match spec.split_once(':') {
            Some((h, a)) => (h, Some(a.trim())),
            None => (spec, None),
        };
        let family: Family = head.parse()?;
        let count = |a: Option<&str>| -> Result<usize> {
            let a = a.ok_or_else(|| Error::Parse(format!("`{spec}` needs a pulse count, e.g. `{head}:6`")))?;
            let a = a.strip_prefix("l=").or_else(|| a.strip_prefix("n=")).unwrap_or(a);
            a.parse::<usize>().map_err(|e| Error::Parse(format!("bad count in `{spec}`: {e}")))
        };
        match family {
            Family::Fid if arg.is_none() || arg == Some("0") => Ok(Self::fid()),
            Family::Se if arg.is_none() || arg == Some("1") => Ok(Self::se()),
            Family::Custom => {
                let a = arg.unwrap_or("");
                let fr = a
                    .split(',')
                    .map(str::trim)
                    .filter(|p| !p.is_empty())
                    .map(|p| p.parse::<f64>().map_err(|e| Error::Parse(format!("bad fraction `{p}`: {e}"))))
                    .collect::<Result<Vec<_>>>()?;
                Self::custom(fr)
            }
            _ => Self::catalog(family, count(arg)?),
        }
    }
}

/// The generic filter function `F(x)` at `x = ωt ≥ 0`.
///
/// Each term `e^{i x b} - e^{i x a}` is evaluated as `2i sin(x(b-a)/2) e^{i x(a+b)/2}`
/// so that the small-`x` cancellations stay relative to `x`.
pub fn filter(seq: &PulseSequence, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mut amp = Complex64::new(0.0, 0.0);
    let mut lo = 0.0;
    for (k, &hi) in seq.fractions.iter().chain(std::iter::once(&1.0)).enumerate() {
        let half = 0.5 * x * (hi - lo);
        let mid = 0.5 * x * (hi + lo);
        let term = Complex64::from_polar(2.0 * half.sin(), mid) * Complex64::i();
        if k % 2 == 0 {
            amp += term;
        } else {
            amp -= term;
        }
        lo = hi;
    }
    0.5 * amp.norm_sqr()
}

/// Which version of a printed closed-form filter to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedForm {
    /// The formulas as printed, including their suspected typos:
    /// CPMG/PDD use `G` with argument `x/2n`, UDD has a real exponent,
    /// CDD uses `sin²(x/2^{2l+1})` and unsquared product factors.
    Printed,
    /// Typo repairs: `G` takes `x/2`, the UDD exponent is imaginary, and the
    /// CDD form is `2^{2l+1} sin²(x/2^{l+1}) Π_{k=1}^{l} sin²(x/2^{k+1})`.
    Repaired,
}

const SINGULAR_EPS: f64 = 1e-9;

/// Printed closed-form filter for a catalog family (`order` = n, or l for CDD).
/// Returns [`Error::SingularPoint`] where the formula's denominator vanishes.
pub fn filter_closed_form(family: Family, order: usize, x: f64, form: ClosedForm) -> Result<f64> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(invalid(format!("x must be finite and non-negative, got {x}")));
    }
    let g_arg = |n: f64| match form {
        ClosedForm::Printed => x / (2.0 * n),
        ClosedForm::Repaired => 0.5 * x,
    };
    match family {
        Family::Fid => Ok(2.0 * (0.5 * x).sin().powi(2)),
        Family::Se => Ok(8.0 * (0.25 * x).sin().powi(4)),
        Family::Cpmg => {
            if order == 0 {
                return Err(invalid("cpmg needs n ≥ 1"));
            }
            let n = order as f64;
            let c = (x / (2.0 * n)).cos();
            if c.abs() < SINGULAR_EPS {
                return Err(Error::SingularPoint { x });
            }
            let g = if order % 2 == 0 { g_arg(n).sin().powi(2) } else { g_arg(n).cos().powi(2) };
            Ok(8.0 * (x / (4.0 * n)).sin().powi(4) * g / (c * c))
        }
        Family::Pdd => {
            if order == 0 {
                return Err(invalid("pdd needs n ≥ 1"));
            }
            let n = order as f64;
            let arg = x / (2.0 * n + 2.0);
            if arg.cos().abs() < SINGULAR_EPS {
                return Err(Error::SingularPoint { x });
            }
            let g = if order % 2 == 0 { g_arg(n).sin().powi(2) } else { g_arg(n).cos().powi(2) };
            Ok(2.0 * arg.tan().powi(2) * (1.0 - g))
        }
        Family::Udd => {
            if order == 0 {
                return Err(invalid("udd needs n ≥ 1"));
            }
            let n = order as i64;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in (-n - 1)..=n {
                let c = (PI * k as f64 / (n + 1) as f64).cos() * 0.5 * x;
                let term = match form {
                    ClosedForm::Printed => Complex64::new(c.exp(), 0.0),
                    ClosedForm::Repaired => Complex64::from_polar(1.0, c),
                };
                if k.rem_euclid(2) == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            Ok(0.5 * acc.norm_sqr())
        }
        Family::Cdd => {
            if order == 0 {
                return Err(invalid("cdd needs l ≥ 1"));
            }
            let l = order as i32;
            let pre = 2f64.powi(2 * l + 1);
            let v = match form {
                ClosedForm::Printed => {
                    let prod: f64 = (1..=l).map(|k| (x / 2f64.powi(k + 1)).sin()).product();
                    pre * (x / 2f64.powi(2 * l + 1)).sin().powi(2) * prod
                }
                ClosedForm::Repaired => {
                    let prod: f64 = (1..=l).map(|k| (x / 2f64.powi(k + 1)).sin().powi(2)).product();
                    pre * (x / 2f64.powi(l + 1)).sin().powi(2) * prod
                }
            };
            Ok(v)
        }
        Family::Custom => Err(invalid("custom sequences have no closed form")),
    }
}
