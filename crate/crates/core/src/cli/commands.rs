//! The subcommands, each resolving its configuration and producing a [`Report`].

use std::f64::consts::TAU;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::json;

use super::config::{parse_spectrum, Grid, Orders, Settings};
use super::output::{num, write_atomic, Plot, Provenance, Report, Table};
use crate::coherence::{
    calibrate_fid, coherence_time_with, decoherence_curve, pulse_scan, QuadratureOptions, CURVE_TOL, SCAN_TOL,
};
use crate::error::{invalid, Error, Result};
use crate::oracle::{compare_mc_spectral, default_dt, synthesize_noise};
use crate::sequences::{filter, filter_closed_form, ClosedForm, Family, PulseSequence};
use crate::spectra::PowerSpectrum;
use crate::trap::{self, adiabaticity_ratio, differential_light_shift, differential_zeeman, TrapConfig};

/// A finished command: its report and the process status it implies.
pub struct Outcome {
    pub report: Report,
    /// 0, or 3 when part of the result failed numerically.
    pub status: i32,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Outcome { report, status: 0 }
    }
}

/// Spectrum options shared by every command that integrates against noise.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumConfig {
    pub spectrum: String,
    /// Rescale the spectrum so that its FID coherence time is this many seconds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibrate_fid_t2: Option<f64>,
}

impl SpectrumConfig {
    pub fn resolve(settings: &Settings, spectrum: Option<String>, calibrate: Option<f64>) -> Result<Self> {
        let spectrum =
            settings.pick(spectrum, "spectrum")?.ok_or_else(|| invalid("a spectrum is required (--spectrum)"))?;
        let calibrate_fid_t2 = settings.pick(calibrate, "calibrate-fid-t2")?;
        Ok(SpectrumConfig { spectrum, calibrate_fid_t2 })
    }

    /// The spectrum and the calibration factor applied to it (1 when none).
    pub fn build(&self, opts: &QuadratureOptions) -> Result<(PowerSpectrum, f64)> {
        let s = parse_spectrum(&self.spectrum)?;
        match self.calibrate_fid_t2 {
            None => Ok((s, 1.0)),
            Some(target) => {
                let cal = calibrate_fid(&s, target, opts)?;
                let id = format!("{}*{}", s.id(), cal.factor);
                Ok((cal.spectrum.with_label(id), cal.factor))
            }
        }
    }
}

fn tolerance(settings: &Settings, flag: Option<f64>, default: f64) -> Result<QuadratureOptions> {
    let tol = settings.pick(flag, "tol")?.unwrap_or(default);
    QuadratureOptions::new(tol)
}

fn sequence(settings: &Settings, flag: Option<String>, default: Option<&str>) -> Result<PulseSequence> {
    let spec = settings
        .pick(flag, "seq")?
        .or(default.map(str::to_string))
        .ok_or_else(|| invalid("a pulse sequence is required (--seq)"))?;
    spec.parse()
}

fn grid(settings: &Settings, flag: Option<String>, key: &str) -> Result<Grid> {
    settings.pick(flag, key)?.ok_or_else(|| invalid(format!("a grid is required (--{key} start:stop:step)")))?.parse()
}

#[derive(Debug, Clone, Serialize)]
struct WCurveConfig {
    #[serde(flatten)]
    spectrum: SpectrumConfig,
    seq: String,
    t: String,
    tol: f64,
}

pub fn w_curve(
    settings: &Settings,
    spectrum: Option<String>,
    calibrate: Option<f64>,
    seq: Option<String>,
    t: Option<String>,
    tol: Option<f64>,
) -> Result<Outcome> {
    let sc = SpectrumConfig::resolve(settings, spectrum, calibrate)?;
    let seq = sequence(settings, seq, Some("fid"))?;
    let times = grid(settings, t, "t")?;
    let opts = tolerance(settings, tol, CURVE_TOL)?;
    settings.finish()?;
    if times.values[0] < 0.0 {
        return Err(invalid("times must be non-negative"));
    }
    let (s, factor) = sc.build(&opts)?;
    let curve = decoherence_curve(&s, &seq, &times.values, &opts)?;

    let cfg = WCurveConfig { spectrum: sc, seq: seq.id(), t: times.spec.clone(), tol: opts.tol };
    let mut table = Table::new(&["t_s", "w"]);
    if factor != 1.0 {
        table.notes.push(format!("calibration factor: {factor}"));
    }
    for (t, w) in curve.times.iter().zip(&curve.w) {
        table.push(vec![num(*t), num(*w)]);
    }
    Ok(Outcome::ok(Report {
        provenance: Provenance::new("w-curve", &cfg).spectrum(&curve.spectrum_id).sequence(&curve.sequence_id),
        table,
        json: json!({ "calibration_factor": factor, "curve": curve }),
        plot: Some(Plot {
            x: 0,
            y: 1,
            xlabel: "t (s)".into(),
            ylabel: "W(t)".into(),
            logscale: false,
            reference: Some((std::f64::consts::E.recip(), "1/e".into())),
        }),
    }))
}

#[derive(Debug, Clone, Serialize)]
struct T2ScanConfig {
    #[serde(flatten)]
    spectrum: SpectrumConfig,
    family: Family,
    n: Orders,
    t_max: f64,
    tol: f64,
}

/// Default upper limit for the crossing search, s.
pub const DEFAULT_T_MAX: f64 = 1000.0;

pub fn t2_scan(
    settings: &Settings,
    spectrum: Option<String>,
    calibrate: Option<f64>,
    family: Option<String>,
    n: Option<String>,
    t_max: Option<f64>,
    tol: Option<f64>,
) -> Result<Outcome> {
    let sc = SpectrumConfig::resolve(settings, spectrum, calibrate)?;
    let family: Family = settings.pick(family, "family")?.unwrap_or_else(|| "cpmg".into()).parse()?;
    if matches!(family, Family::Fid | Family::Custom) {
        return Err(invalid(format!("t2-scan needs a catalog family with pulses, got {family}")));
    }
    let orders: Orders =
        settings.pick(n, "n")?.ok_or_else(|| invalid("pulse counts are required (--n a:b or a,b,c)"))?.parse()?;
    let t_max = settings.pick(t_max, "t-max")?.unwrap_or(DEFAULT_T_MAX);
    let opts = tolerance(settings, tol, SCAN_TOL)?;
    settings.finish()?;
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(invalid(format!("t-max must be positive, got {t_max}")));
    }
    let (s, factor) = sc.build(&opts)?;

    let fid = coherence_time_with(&s, &PulseSequence::fid(), t_max, &opts)?;
    let scan = pulse_scan(&s, family, &orders.0, t_max, opts.tol)?;

    let mut table = Table::new(&["n", "t2_s", "ratio_to_fid"]);
    if factor != 1.0 {
        table.notes.push(format!("calibration factor: {factor}"));
    }
    table.notes.push(format!("fid t2_s: {}", fid.t2));
    if !fid.converged {
        table.notes.push(format!("fid: no 1/e crossing below t_max = {t_max} s"));
    }
    let mut status = 0;
    let mut entries = Vec::new();
    for (&order, r) in orders.0.iter().zip(&scan) {
        match r {
            Ok(c) => {
                let ratio = c.t2 / fid.t2;
                if !c.converged {
                    table.notes.push(format!("order {order}: no 1/e crossing below t_max, t2 reported as t_max"));
                }
                if !c.monotone {
                    table.notes.push(format!("order {order}: W not monotone near the crossing"));
                }
                table.push(vec![c.n_pulses.to_string(), num(c.t2), num(ratio)]);
                entries.push(json!({ "order": order, "result": c, "ratio_to_fid": ratio }));
            }
            Err(e) => {
                status = 3;
                let n = PulseSequence::catalog(family, order).map(|q| q.n_pulses()).unwrap_or(order);
                table.notes.push(format!("order {order}: {e}"));
                table.push(vec![n.to_string(), "nan".into(), "nan".into()]);
                entries.push(json!({ "order": order, "error": e.to_string() }));
            }
        }
    }
    let cfg = T2ScanConfig { spectrum: sc, family, n: orders, t_max, tol: opts.tol };
    Ok(Outcome {
        report: Report {
            provenance: Provenance::new("t2-scan", &cfg).spectrum(s.id()).sequence(family.name()),
            table,
            json: json!({ "calibration_factor": factor, "fid": fid, "scan": entries }),
            plot: Some(Plot {
                x: 0,
                y: 1,
                xlabel: "n".into(),
                ylabel: "T2 (s)".into(),
                logscale: false,
                reference: None,
            }),
        },
        status,
    })
}

pub fn sequence_table(settings: &Settings, seq: Option<String>) -> Result<Outcome> {
    let seq = sequence(settings, seq, None)?;
    settings.finish()?;
    let mut table = Table::new(&["k", "fraction"]);
    for (k, f) in seq.fractions().iter().enumerate() {
        table.push(vec![(k + 1).to_string(), num(*f)]);
    }
    Ok(Outcome::ok(Report {
        provenance: Provenance::new("sequence-table", &json!({ "seq": seq.id() })).sequence(seq.id()),
        table,
        json: json!({ "sequence": seq, "switching_points": seq.switching_points() }),
        plot: None,
    }))
}

#[derive(Debug, Clone, Serialize)]
struct FilterConfig {
    seq: String,
    x: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<String>,
}

pub fn filter_dump(
    settings: &Settings,
    seq: Option<String>,
    x: Option<String>,
    closed_form: Option<String>,
) -> Result<Outcome> {
    let seq = sequence(settings, seq, None)?;
    let xs = grid(settings, x, "x")?;
    let closed_form = settings.pick(closed_form, "closed-form")?;
    settings.finish()?;
    if xs.values[0] < 0.0 {
        return Err(invalid("x = ωt must be non-negative"));
    }
    let form = match closed_form.as_deref() {
        None => None,
        Some("printed") => Some(ClosedForm::Printed),
        Some("repaired") => Some(ClosedForm::Repaired),
        Some(other) => return Err(invalid(format!("closed-form must be printed or repaired, got `{other}`"))),
    };
    if form.is_some() && seq.family() == Family::Custom {
        return Err(invalid("custom sequences have no closed-form filter"));
    }
    let order = seq.cdd_level().map(|l| l as usize).unwrap_or(seq.n_pulses());

    let mut table = Table::new(if form.is_some() { &["x", "f", "f_closed"] } else { &["x", "f"] });
    let mut f = Vec::with_capacity(xs.values.len());
    let mut closed = Vec::new();
    let mut singular = 0usize;
    for &x in &xs.values {
        let fx = filter(&seq, x);
        let mut row = vec![num(x), num(fx)];
        if let Some(form) = form {
            match filter_closed_form(seq.family(), order, x, form) {
                Ok(c) => {
                    row.push(num(c));
                    closed.push(Some(c));
                }
                Err(Error::SingularPoint { .. }) => {
                    singular += 1;
                    row.push("nan".into());
                    closed.push(None);
                }
                Err(e) => return Err(e),
            }
        }
        f.push(fx);
        table.push(row);
    }
    if singular > 0 {
        table.notes.push(format!("closed form singular at {singular} grid points (written as nan)"));
    }
    let cfg = FilterConfig { seq: seq.id(), x: xs.spec.clone(), closed_form };
    let mut result = json!({ "x": xs.values, "f": f });
    if form.is_some() {
        result["f_closed"] = json!(closed);
    }
    Ok(Outcome::ok(Report {
        provenance: Provenance::new("filter-dump", &cfg).sequence(seq.id()),
        table,
        json: result,
        plot: Some(Plot {
            x: 0,
            y: 1,
            xlabel: "x = ωt".into(),
            ylabel: "F(x)".into(),
            logscale: false,
            reference: None,
        }),
    }))
}

/// Default pointing-noise amplitude, m.
pub const DEFAULT_POINTING_AMPLITUDE: f64 = 10e-9;
/// Default pointing-noise frequency, Hz.
pub const DEFAULT_POINTING_FREQ: f64 = 50.0;
/// Default bias field for the Zeeman diagnostic, T.
pub const DEFAULT_B_FIELD: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
struct TrapShiftConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trap_config: Option<PathBuf>,
    trap: TrapConfig,
    b_field_t: f64,
    pointing_amplitude_m: f64,
    pointing_freq_hz: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn trap_shift(
    settings: &Settings,
    preset: Option<String>,
    trap_config: Option<PathBuf>,
    peak_intensity: Option<f64>,
    b_field: Option<f64>,
    pointing_amplitude: Option<f64>,
    pointing_freq: Option<f64>,
) -> Result<Outcome> {
    let preset = settings.pick(preset, "preset")?;
    let trap_config = settings.pick(trap_config.map(|p| p.display().to_string()), "trap-config")?.map(PathBuf::from);
    let peak_intensity = settings.pick(peak_intensity, "peak-intensity")?;
    let b = settings.pick(b_field, "b-field")?.unwrap_or(DEFAULT_B_FIELD);
    let gamma_amp = settings.pick(pointing_amplitude, "pointing-amplitude")?.unwrap_or(DEFAULT_POINTING_AMPLITUDE);
    let noise_freq = settings.pick(pointing_freq, "pointing-freq")?.unwrap_or(DEFAULT_POINTING_FREQ);
    settings.finish()?;
    if !b.is_finite() {
        return Err(invalid("b-field must be finite"));
    }

    let mut cfg = match (&preset, &trap_config) {
        (Some(_), Some(_)) => return Err(invalid("give either --preset or --trap-config, not both")),
        (Some(name), None) => trap::preset(name)?,
        (None, Some(path)) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| Error::Io(format!("reading {}: {e}", path.display())))?;
            TrapConfig::from_str_any(&text)?
        }
        (None, None) => trap::preset(trap::RB87_YAG_500UK)?,
    };
    if let Some(i0) = peak_intensity {
        cfg = cfg.with_peak_intensity(i0)?;
    }
    let shift = differential_light_shift(&cfg)?;
    let zeeman = differential_zeeman(cfg.gf1, cfg.mf1, cfg.gf2, cfg.mf2, b);
    let ratio = adiabaticity_ratio(&cfg, gamma_amp, noise_freq)?;

    let rows: [(&str, f64, &str); 9] = [
        ("e_l", shift.e_l, "rad/s"),
        ("e_l_hz", shift.e_l / TAU, "Hz"),
        ("e_hyperfine", cfg.e_hyperfine, "rad/s"),
        ("e_total", shift.e_total, "rad/s"),
        ("e_total_hz", shift.e_total / TAU, "Hz"),
        ("peak_intensity", cfg.peak_intensity, "W/m^2"),
        ("trap_depth", cfg.trap_depth, "rad/s"),
        ("zeeman_differential", zeeman, "rad/s"),
        ("adiabaticity_ratio", ratio, "1"),
    ];
    let mut table = Table::new(&["quantity", "value", "unit"]);
    for (q, v, u) in rows {
        table.push(vec![q.into(), num(v), u.into()]);
    }
    let resolved = TrapShiftConfig {
        preset: preset.or(trap_config.is_none().then(|| trap::RB87_YAG_500UK.to_string())),
        trap_config,
        trap: cfg,
        b_field_t: b,
        pointing_amplitude_m: gamma_amp,
        pointing_freq_hz: noise_freq,
    };
    Ok(Outcome::ok(Report {
        provenance: Provenance::new("trap-shift", &resolved),
        table,
        json: json!({
            "light_shift": shift,
            "zeeman_differential": zeeman,
            "adiabaticity_ratio": ratio,
        }),
        plot: None,
    }))
}

/// Default number of Monte Carlo trials.
pub const DEFAULT_TRIALS: usize = 2000;

#[derive(Debug, Clone, Serialize)]
struct McCompareConfig {
    #[serde(flatten)]
    spectrum: SpectrumConfig,
    seq: String,
    t: String,
    dt: f64,
    trials: usize,
    seed: u64,
}

#[allow(clippy::too_many_arguments)]
pub fn mc_compare(
    settings: &Settings,
    spectrum: Option<String>,
    calibrate: Option<f64>,
    seq: Option<String>,
    t: Option<String>,
    dt: Option<f64>,
    trials: Option<usize>,
    seed: Option<u64>,
    trace_out: Option<PathBuf>,
) -> Result<Outcome> {
    let sc = SpectrumConfig::resolve(settings, spectrum, calibrate)?;
    let seq = sequence(settings, seq, Some("fid"))?;
    let times = grid(settings, t, "t")?;
    let dt = settings.pick(dt, "dt")?;
    let trials = settings.pick(trials, "trials")?.unwrap_or(DEFAULT_TRIALS);
    let seed = settings.pick(seed, "seed")?.unwrap_or(0);
    let trace_out = settings.pick(trace_out.map(|p| p.display().to_string()), "trace-out")?.map(PathBuf::from);
    settings.finish()?;

    let (s, factor) = sc.build(&QuadratureOptions::default())?;
    let dt = dt.unwrap_or_else(|| default_dt(&s));
    let report = compare_mc_spectral(&s, &seq, &times.values, dt, trials, seed)?;
    if let Some(path) = &trace_out {
        let t_max = times.values[times.values.len() - 1];
        let trace = synthesize_noise(&s, t_max, dt, seed)?;
        let mut buf = Vec::new();
        trace.write_csv(&mut buf)?;
        write_atomic(path, &String::from_utf8_lossy(&buf))?;
    }

    let mut table = Table::new(&["t_s", "t_eff_s", "w_mc", "stderr", "w_spectral", "z", "flagged"]);
    for p in &report.points {
        table.push(vec![
            num(p.t),
            num(p.t_eff),
            num(p.w_mc),
            num(p.stderr),
            num(p.w_spectral),
            num(p.z),
            p.flagged.to_string(),
        ]);
    }
    table.notes.push(format!("all_pass: {}", report.all_pass));
    if factor != 1.0 {
        table.notes.push(format!("calibration factor: {factor}"));
    }
    let status = if report.all_pass { 0 } else { 3 };
    let cfg = McCompareConfig { spectrum: sc, seq: seq.id(), t: times.spec.clone(), dt, trials, seed };
    Ok(Outcome {
        report: Report {
            provenance: Provenance::new("mc-compare", &cfg).spectrum(&report.spectrum_id).sequence(&report.sequence_id),
            table,
            json: json!({ "calibration_factor": factor, "report": report }),
            plot: Some(Plot {
                x: 1,
                y: 2,
                xlabel: "t (s)".into(),
                ylabel: "W".into(),
                logscale: false,
                reference: None,
            }),
        },
        status,
    })
}
