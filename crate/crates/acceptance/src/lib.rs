//! Pinned thresholds for the acceptance run. The harness itself lives in
//! `tests/acceptance.rs`; nothing here depends on the library under test.

/// Criterion 1: white noise against `exp(−S₀t/4)`.
pub mod white {
    pub const W_ABS_TOL: f64 = 1e-4;
    pub const BAND: (f64, f64) = (1e-4, 1e4);
    /// Times as multiples of `4/S₀`.
    pub const TIME_FACTORS: [f64; 4] = [0.1, 0.5, 1.0, 2.0];
    /// The band edges lower χ by `S₀t²ω_ir/4π + S₀/(4π²f_uv)`, which keeps
    /// the bound reachable only for `4.4 ≲ S₀ ≲ 43`.
    pub const LEVELS: [f64; 1] = [12.0];
    pub const RUNTIME_S: f64 = 1.0;
}

/// Criterion 2: uncalibrated FID coherence time and the calibrated mode.
pub mod fid {
    pub const T2_RANGE: (f64, f64) = (0.3, 3.0);
    pub const CALIBRATED_T2: f64 = 1.0;
    /// Relative error allowed on the calibrated FID crossing.
    pub const CALIBRATED_REL_TOL: f64 = 1e-3;
    pub const RUNTIME_S: f64 = 30.0;
}

/// Criteria 3 and 4: the multi-pulse comparison and PDD parity.
pub mod sequences {
    pub const MIN_RATIO_TO_FID: f64 = 20.0;
    pub const MIN_RATIO_TO_SE: f64 = 2.0;
    pub const RUNTIME_S: f64 = 300.0;
}

/// Criterion 5: CPMG scaling with pulse number.
pub mod cpmg {
    pub const RATIO_N50: (f64, f64) = (70.0, 130.0);
    pub const RATIO_N500: (f64, f64) = (250.0, 450.0);
    pub const MIN_PEARSON: f64 = 0.98;
    pub const RUNTIME_S: f64 = 900.0;
}

/// Criterion 6: filter functions.
pub mod filters {
    pub const SE_POINTS: usize = 10_000;
    pub const SE_X_MAX: f64 = 100.0;
    /// Applied as `|Δ| ≤ tol·(1 + |F|)`.
    pub const SE_TOL: f64 = 1e-10;
    pub const SMALL_X: [f64; 2] = [1e-2, 1e-3];
}

/// Criterion 7: Monte Carlo cross-validation.
pub mod monte_carlo {
    pub const TRIALS: usize = 2000;
    pub const SEED: u64 = 2024;
    pub const MAX_ABS_Z: f64 = 3.5;
    pub const RUNTIME_S: f64 = 600.0;
}

/// Criterion 8: static noise under a spin echo.
pub mod echo {
    pub const W_ABS_TOL: f64 = 1e-12;
    /// A single constant is identical in every trial and cannot dephase the
    /// ensemble; offsets drawn per trial with this spread make the check bite.
    pub const QUASI_STATIC_SIGMA: f64 = 3.0;
    pub const TRIALS: usize = 2000;
    /// FID under the same offsets must follow `exp(−σ²t²/2)` to this many standard errors.
    pub const CONTROL_MAX_Z: f64 = 4.0;
}

/// Criterion 9: trap diagnostics.
pub mod trap {
    /// Clock-pair Zeeman differential, relative to a single-level shift.
    pub const ZEEMAN_REL_TOL: f64 = 1e-15;
    /// Linearity of E_L in peak intensity, relative.
    pub const LINEARITY_REL_TOL: f64 = 4.0 * f64::EPSILON;
    pub const POINTING_AMPLITUDE_M: f64 = 10e-9;
    pub const POINTING_FREQS_HZ: [f64; 3] = [1.0, 10.0, 50.0];
    pub const MAX_ADIABATICITY: f64 = 1e-2;
}
