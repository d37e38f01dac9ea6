//! Coherence times of the decoupling catalog on the calibrated YAG spectrum.
//!
//! Calibration rescales the spectrum so the FID crossing sits at exactly 1 s;
//! every other T2 is then directly a prolongation factor.

use dephasing::coherence::{calibrate_fid, coherence_time_with, QuadratureOptions, SCAN_TOL};
use dephasing::presets::{spectrum_preset, PAPER_YAG_1F};
use dephasing::sequences::PulseSequence;

fn main() -> dephasing::Result<()> {
    let opts = QuadratureOptions::new(SCAN_TOL)?;
    let raw = spectrum_preset(PAPER_YAG_1F)?;
    let cal = calibrate_fid(&raw, 1.0, &opts)?;
    println!("calibration factor {:.4} (E_L scaled by {:.4})", cal.factor, cal.factor.sqrt());

    let specs = ["fid", "se", "cpmg:6", "pdd:5", "pdd:6", "udd:6", "cdd:l=3", "cdd:l=4"];
    let se_t2 = coherence_time_with(&cal.spectrum, &PulseSequence::se(), 1e3, &opts)?.t2;
    println!("\n{:<10} {:>6} {:>10} {:>8} {:>8}", "sequence", "pulses", "T2 (s)", "/FID", "/SE");
    for spec in specs {
        let seq: PulseSequence = spec.parse()?;
        let c = coherence_time_with(&cal.spectrum, &seq, 1e3, &opts)?;
        println!("{:<10} {:>6} {:>10.4} {:>8.2} {:>8.2}", spec, seq.n_pulses(), c.t2, c.t2, c.t2 / se_t2);
    }
    Ok(())
}
