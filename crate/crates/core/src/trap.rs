//! Trap-induced couplings: the differential light shift that converts laser
//! intensity noise into splitting noise, Zeeman shifts of the qubit levels,
//! and the adiabaticity check for beam-pointing noise.
//!
//! Energies are angular frequencies (rad/s, ħ = 1) at every interface.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// CODATA 2018 exact and recommended values, SI units.
pub mod constants {
    pub const C: f64 = 299_792_458.0;
    pub const HBAR: f64 = 1.054_571_817e-34;
    pub const H: f64 = 6.626_070_15e-34;
    pub const K_B: f64 = 1.380_649e-23;
    pub const MU_B: f64 = 9.274_010_078_3e-24;
    pub const AMU: f64 = 1.660_539_066_60e-27;
}

use constants::{AMU, C, HBAR, K_B, MU_B};

/// The bundled preset file.
pub const PRESETS_TOML: &str = include_str!("../data/presets.toml");

/// Name of the bundled ⁸⁷Rb / 1064 nm / 500 μK preset.
pub const RB87_YAG_500UK: &str = "rb87-yag-500uK";

/// Atomic and laser parameters of a dipole trap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTrapConfig")]
pub struct TrapConfig {
    /// Natural linewidth Γ, rad/s.
    pub gamma: f64,
    /// Transition angular frequency ω₀, rad/s.
    pub omega0: f64,
    /// Laser detunings from the D1/D2 lines for the two qubit levels, rad/s.
    pub delta1_f1: f64,
    pub delta2_f1: f64,
    pub delta1_f2: f64,
    pub delta2_f2: f64,
    /// Polarization index, one of -1, 0, 1.
    pub alpha_pol: i8,
    pub gf1: f64,
    pub mf1: f64,
    pub gf2: f64,
    pub mf2: f64,
    /// Hyperfine splitting E_H, rad/s.
    pub e_hyperfine: f64,
    /// Peak intensity I₀, W/m².
    pub peak_intensity: f64,
    /// Trap depth U₀/ħ, rad/s.
    pub trap_depth: f64,
    /// Beam waist, m.
    pub waist: f64,
    /// Trap frequency ω, rad/s.
    pub trap_omega: f64,
    /// Atomic mass, kg.
    pub mass: f64,
}

#[derive(Deserialize)]
struct RawTrapConfig {
    gamma: f64,
    omega0: f64,
    delta1_f1: f64,
    delta2_f1: f64,
    delta1_f2: f64,
    delta2_f2: f64,
    alpha_pol: i8,
    gf1: f64,
    mf1: f64,
    gf2: f64,
    mf2: f64,
    e_hyperfine: f64,
    peak_intensity: f64,
    trap_depth: f64,
    waist: f64,
    trap_omega: f64,
    mass: f64,
}

impl TryFrom<RawTrapConfig> for TrapConfig {
    type Error = Error;

    fn try_from(r: RawTrapConfig) -> Result<Self> {
        let cfg = TrapConfig {
            gamma: r.gamma,
            omega0: r.omega0,
            delta1_f1: r.delta1_f1,
            delta2_f1: r.delta2_f1,
            delta1_f2: r.delta1_f2,
            delta2_f2: r.delta2_f2,
            alpha_pol: r.alpha_pol,
            gf1: r.gf1,
            mf1: r.mf1,
            gf2: r.gf2,
            mf2: r.mf2,
            e_hyperfine: r.e_hyperfine,
            peak_intensity: r.peak_intensity,
            trap_depth: r.trap_depth,
            waist: r.waist,
            trap_omega: r.trap_omega,
            mass: r.mass,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl TrapConfig {
    pub fn validate(&self) -> Result<()> {
        if !(-1..=1).contains(&self.alpha_pol) {
            return Err(invalid(format!("alpha_pol must be -1, 0 or 1, got {}", self.alpha_pol)));
        }
        for (name, d) in [
            ("delta1_f1", self.delta1_f1),
            ("delta2_f1", self.delta2_f1),
            ("delta1_f2", self.delta1_f2),
            ("delta2_f2", self.delta2_f2),
        ] {
            if !(d.is_finite() && d != 0.0) {
                return Err(invalid(format!("{name} must be finite and nonzero, got {d}")));
            }
        }
        for (name, v) in [("waist", self.waist), ("mass", self.mass), ("omega0", self.omega0)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("gamma", self.gamma),
            ("peak_intensity", self.peak_intensity),
            ("trap_depth", self.trap_depth),
            ("trap_omega", self.trap_omega),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        Ok(())
    }

    /// Loads a config from JSON or TOML text, chosen by the first non-blank character.
    pub fn from_str_any(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("trap config: {e}")))
        } else {
            toml::from_str(text).map_err(|e| Error::Parse(format!("trap config: {e}")))
        }
    }

    /// The same trap at a different peak intensity.
    pub fn with_peak_intensity(&self, peak_intensity: f64) -> Result<Self> {
        let cfg = TrapConfig { peak_intensity, ..self.clone() };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `πc²Γ/(2ω₀³)`, the dipole-potential prefactor in J·m²·s/W·(rad/s).
    pub fn dipole_prefactor(&self) -> f64 {
        PI * C * C * self.gamma / (2.0 * self.omega0.powi(3))
    }

    pub fn inverse_detuning_f1(&self) -> Result<f64> {
        inverse_effective_detuning(self.delta1_f1, self.delta2_f1, self.alpha_pol, self.gf1, self.mf1)
    }

    pub fn inverse_detuning_f2(&self) -> Result<f64> {
        inverse_effective_detuning(self.delta1_f2, self.delta2_f2, self.alpha_pol, self.gf2, self.mf2)
    }
}

/// `1/Δ' = (2 + α g m)/Δ₂ + (1 − α g m)/Δ₁`, in s/rad.
pub fn inverse_effective_detuning(delta1: f64, delta2: f64, alpha_pol: i8, g_f: f64, m_f: f64) -> Result<f64> {
    if delta1 == 0.0 || delta2 == 0.0 || !delta1.is_finite() || !delta2.is_finite() {
        return Err(invalid("detunings must be finite and nonzero"));
    }
    let agm = f64::from(alpha_pol) * g_f * m_f;
    Ok((2.0 + agm) / delta2 + (1.0 - agm) / delta1)
}

/// Differential light shift of the qubit splitting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightShiftResult {
    /// Coupling of relative intensity noise to the splitting, `δE = e_l·β`, rad/s.
    pub e_l: f64,
    /// Splitting at the trap centre, `E_H + e_l`, rad/s.
    pub e_total: f64,
}

/// `e_l = (πc²Γ/2ω₀³)(1/Δ'_{F2} − 1/Δ'_{F1})·I₀/ħ`.
pub fn differential_light_shift(cfg: &TrapConfig) -> Result<LightShiftResult> {
    cfg.validate()?;
    let diff = cfg.inverse_detuning_f2()? - cfg.inverse_detuning_f1()?;
    let e_l = cfg.dipole_prefactor() * diff * cfg.peak_intensity / HBAR;
    Ok(LightShiftResult { e_l, e_total: cfg.e_hyperfine + e_l })
}

/// Linear Zeeman shift `m g μ_B B / ħ`, rad/s.
pub fn zeeman_splitting(g_f: f64, m_f: f64, b_z: f64) -> f64 {
    m_f * g_f * MU_B * b_z / HBAR
}

/// Differential linear Zeeman shift between `(g, m)` and `(g2, m2)`, rad/s.
pub fn differential_zeeman(g1: f64, m1: f64, g2: f64, m2: f64, b_z: f64) -> f64 {
    zeeman_splitting(g2, m2, b_z) - zeeman_splitting(g1, m1, b_z)
}

/// `R = ħ v_t |⟨0|∂H/∂γ|1⟩| / E_g²` for a harmonic trap whose centre moves with
/// amplitude `gamma_amp` (m) at `noise_freq` (Hz). With `v_t = γ·2π f`,
/// `|⟨0|∂H/∂γ|1⟩| = mω²√(ħ/2mω)` and `E_g = ħω` this is `γ·2πf·√(m/2ħω)`.
/// `R ≪ 1` means the atom follows the trap adiabatically.
pub fn adiabaticity_ratio(cfg: &TrapConfig, gamma_amp: f64, noise_freq: f64) -> Result<f64> {
    if !(cfg.trap_omega > 0.0 && cfg.mass > 0.0) {
        return Err(invalid("adiabaticity needs a positive trap frequency and mass"));
    }
    if !(gamma_amp >= 0.0 && noise_freq >= 0.0) {
        return Err(invalid("pointing amplitude and noise frequency must be non-negative"));
    }
    let v_t = gamma_amp * TAU * noise_freq;
    let e_g = HBAR * cfg.trap_omega;
    let matrix_element = cfg.mass * cfg.trap_omega.powi(2) * (HBAR / (2.0 * cfg.mass * cfg.trap_omega)).sqrt();
    Ok(HBAR * v_t * matrix_element / (e_g * e_g))
}

#[derive(Debug, Clone, Deserialize)]
struct AtomData {
    mass_amu: f64,
    d1_hz: f64,
    d2_hz: f64,
    linewidth_hz: f64,
    hyperfine_hz: f64,
    f1_offset_hz: f64,
    f2_offset_hz: f64,
    g_f1: f64,
    g_f2: f64,
}

#[derive(Debug, Clone, Deserialize)]
struct TrapPreset {
    atom: String,
    wavelength_m: f64,
    depth_k: f64,
    alpha_pol: i8,
    m_f1: f64,
    m_f2: f64,
    waist_m: f64,
    trap_frequency_hz: f64,
}

#[derive(Debug, Clone, Deserialize)]
struct PresetFile {
    atoms: BTreeMap<String, AtomData>,
    traps: BTreeMap<String, TrapPreset>,
}

fn parse_presets(text: &str) -> Result<PresetFile> {
    toml::from_str(text).map_err(|e| Error::Parse(format!("preset file: {e}")))
}

/// Names of the trap presets in a preset file.
pub fn preset_names_in(text: &str) -> Result<Vec<String>> {
    Ok(parse_presets(text)?.traps.into_keys().collect())
}

/// Builds a named trap preset from preset-file text.
pub fn preset_from(text: &str, name: &str) -> Result<TrapConfig> {
    let file = parse_presets(text)?;
    let trap = file.traps.get(name).ok_or_else(|| invalid(format!("unknown trap preset `{name}`")))?;
    let atom = file
        .atoms
        .get(&trap.atom)
        .ok_or_else(|| invalid(format!("preset `{name}` refers to unknown atom `{}`", trap.atom)))?;
    if !(trap.wavelength_m > 0.0 && trap.depth_k >= 0.0) {
        return Err(invalid(format!("preset `{name}` needs a positive wavelength and non-negative depth")));
    }

    let omega_laser = TAU * C / trap.wavelength_m;
    let detuning = |line_hz: f64, offset_hz: f64| omega_laser - TAU * (line_hz - offset_hz);
    let mut cfg = TrapConfig {
        gamma: TAU * atom.linewidth_hz,
        omega0: TAU * atom.d2_hz,
        delta1_f1: detuning(atom.d1_hz, atom.f1_offset_hz),
        delta2_f1: detuning(atom.d2_hz, atom.f1_offset_hz),
        delta1_f2: detuning(atom.d1_hz, atom.f2_offset_hz),
        delta2_f2: detuning(atom.d2_hz, atom.f2_offset_hz),
        alpha_pol: trap.alpha_pol,
        gf1: atom.g_f1,
        mf1: trap.m_f1,
        gf2: atom.g_f2,
        mf2: trap.m_f2,
        e_hyperfine: TAU * atom.hyperfine_hz,
        peak_intensity: 0.0,
        trap_depth: K_B * trap.depth_k / HBAR,
        waist: trap.waist_m,
        trap_omega: TAU * trap.trap_frequency_hz,
        mass: atom.mass_amu * AMU,
    };
    // depth = scalar shift of the lower level at the centre
    let shift_per_intensity = cfg.dipole_prefactor() * cfg.inverse_detuning_f1()?.abs();
    cfg.peak_intensity = K_B * trap.depth_k / shift_per_intensity;
    cfg.validate()?;
    Ok(cfg)
}

/// A bundled trap preset by name.
pub fn preset(name: &str) -> Result<TrapConfig> {
    preset_from(PRESETS_TOML, name)
}

pub fn preset_names() -> Vec<String> {
    preset_names_in(PRESETS_TOML).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn inverse_detuning_examples() {
        assert_eq!(inverse_effective_detuning(4.0, 8.0, 0, 0.5, 0.0).unwrap(), 2.0 / 8.0 + 1.0 / 4.0);
        assert_relative_eq!(
            inverse_effective_detuning(7.0, 7.0, 1, -0.5, 1.0).unwrap(),
            3.0 / 7.0,
            max_relative = 1e-15
        );
        assert_eq!(inverse_effective_detuning(1.0, 3.0, 1, 1.0, 1.0).unwrap(), 1.0);
        assert!(inverse_effective_detuning(0.0, 3.0, 0, 0.0, 0.0).is_err());
    }

    #[test]
    fn zero_intensity_leaves_bare_splitting() {
        let cfg = preset(RB87_YAG_500UK).unwrap().with_peak_intensity(0.0).unwrap();
        let r = differential_light_shift(&cfg).unwrap();
        assert_eq!(r.e_l, 0.0);
        assert_eq!(r.e_total, cfg.e_hyperfine);
    }

    #[test]
    fn magic_condition_cancels() {
        let mut cfg = preset(RB87_YAG_500UK).unwrap();
        cfg.delta1_f2 = cfg.delta1_f1;
        cfg.delta2_f2 = cfg.delta2_f1;
        cfg.gf2 = cfg.gf1;
        assert_eq!(differential_light_shift(&cfg).unwrap().e_l, 0.0);
    }

    #[test]
    fn rb87_preset_regression() {
        let cfg = preset(RB87_YAG_500UK).unwrap();
        let r = differential_light_shift(&cfg).unwrap();
        // red-detuned trap: the upper qubit level sits closer to resonance and shifts down more
        assert_relative_eq!(r.e_l, -4480.246, max_relative = 1e-3);
        assert_relative_eq!(cfg.trap_depth, K_B * 500e-6 / HBAR, max_relative = 1e-15);
        assert_relative_eq!(cfg.peak_intensity, 3.7799e9, max_relative = 1e-3);
    }

    #[test]
    fn zeeman_values() {
        assert_eq!(zeeman_splitting(0.5, 0.0, 1e-4), 0.0);
        assert_relative_eq!(zeeman_splitting(0.5, 1.0, 1e-4) / TAU, 699_812.247, max_relative = 1e-6);
        assert_eq!(differential_zeeman(-0.5, -1.0, 0.5, 1.0, 3.7e-5), 0.0);
    }

    #[test]
    fn adiabaticity_at_preset_parameters() {
        let cfg = preset(RB87_YAG_500UK).unwrap();
        assert_eq!(adiabaticity_ratio(&cfg, 0.0, 50.0).unwrap(), 0.0);
        let r = adiabaticity_ratio(&cfg, 10e-9, 50.0).unwrap();
        assert_relative_eq!(r, 3.2784e-4, max_relative = 1e-3);
    }

    #[test]
    fn config_round_trips_through_json_and_toml() {
        let cfg = preset(RB87_YAG_500UK).unwrap();
        let js = serde_json::to_string(&cfg).unwrap();
        assert_eq!(TrapConfig::from_str_any(&js).unwrap(), cfg);
        let tm = toml::to_string(&cfg).unwrap();
        assert_eq!(TrapConfig::from_str_any(&tm).unwrap(), cfg);
        let bad = js.replace("\"alpha_pol\":0", "\"alpha_pol\":2");
        assert!(TrapConfig::from_str_any(&bad).is_err());
    }

    #[test]
    fn preset_lookup() {
        assert_eq!(preset_names(), vec![RB87_YAG_500UK.to_string()]);
        assert!(preset("cs133-nope").is_err());
    }
}
