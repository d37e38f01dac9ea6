//! Named noise spectra.

use crate::error::{invalid, Result};
use crate::spectra::{yag_intensity_noise, PowerSpectrum};
use crate::trap::{differential_light_shift, preset, RB87_YAG_500UK};

/// YAG intensity noise coupled through the light shift of the `rb87-yag-500uK` trap.
pub const PAPER_YAG_1F: &str = "paper-yag-1f";

pub const SPECTRUM_PRESETS: &[&str] = &[PAPER_YAG_1F];

/// A bundled spectrum by name, labelled with that name.
pub fn spectrum_preset(name: &str) -> Result<PowerSpectrum> {
    match name {
        PAPER_YAG_1F => {
            let e_l = differential_light_shift(&preset(RB87_YAG_500UK)?)?.e_l;
            Ok(yag_intensity_noise(e_l)?.with_label(PAPER_YAG_1F))
        }
        other => Err(invalid(format!("unknown spectrum preset `{other}`; known: {}", SPECTRUM_PRESETS.join(", ")))),
    }
}
