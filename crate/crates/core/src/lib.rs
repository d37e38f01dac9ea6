//! Dephasing of a trapped-atom hyperfine qubit under classical frequency noise.
//!
//! The coherence `W(t) = exp(−χ(t))` of a qubit whose splitting fluctuates with
//! two-sided angular spectrum `S(ω)` is
//!
//! ```text
//! χ(t) = (1/π) ∫₀^∞ S(ω) F(ωt) / ω² dω
//! ```
//!
//! where the filter function `F` encodes the π-pulse sequence. The crate is
//! organised along that formula:
//!
//! - [`spectra`]: noise spectra in the one-sided `S_f(f)` convention, `(rad/s)²/Hz`.
//! - [`sequences`]: pulse timings (FID, SE, CPMG, PDD, UDD, CDD, custom) and `F(x)`.
//! - [`coherence`]: adaptive quadrature of χ, coherence times and calibration.
//! - [`trap`]: the differential light shift that turns laser intensity noise
//!   into splitting noise, Zeeman shifts and the adiabaticity ratio.
//! - [`oracle`]: time-domain noise synthesis and Monte Carlo propagation, an
//!   independent check on the spectral formula.
//! - [`cli`]: the `dephasing` command.
//!
//! The `examples/` directory is the main tour:
//!
//! | example | shows |
//! |---|---|
//! | `fid_light_shift` | trap preset → E_L → intensity-noise spectrum → FID curve and T2 |
//! | `sequence_comparison` | T2 of SE, CPMG, PDD, UDD and CDD relative to FID |
//! | `cpmg_scan` | CPMG T2 against pulse number |
//! | `filter_functions` | `F(x)` at low frequency and the closed forms |
//! | `trap_diagnostics` | light shift, Zeeman differential, adiabaticity |
//! | `noise_synthesis` | a synthesized trace and its periodogram |
//! | `monte_carlo_validation` | Monte Carlo against quadrature and the OU closed form |
//! | `multi_source` | independent sources multiply |
//! | `imperfect_pulses` | rotation-angle errors on the unitary path |
//!
//! Units: seconds, Hz for `f`, rad/s for `ω` and for every energy (ħ = 1).

// negated comparisons are how NaN gets rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::manual_is_multiple_of)]

pub mod cli;
pub mod coherence;
pub mod error;
pub mod oracle;
pub mod presets;
pub mod quadrature;
pub mod sequences;
pub mod spectra;
pub mod trap;

pub use error::{Error, Result};
