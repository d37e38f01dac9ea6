//! Independent noise sources: χ adds, so W multiplies.

use dephasing::coherence::{decoherence_at, multi_source_w, CURVE_TOL};
use dephasing::presets::{spectrum_preset, PAPER_YAG_1F};
use dephasing::sequences::PulseSequence;
use dephasing::spectra::PowerSpectrum;

fn main() -> dephasing::Result<()> {
    let yag = spectrum_preset(PAPER_YAG_1F)?;
    let magnetic = PowerSpectrum::lorentzian(0.5, 2.0, 1e-3, 500.0)?.with_label("bias-field");
    let both = PowerSpectrum::combine(vec![yag.clone(), magnetic.clone()])?;
    println!("combined spectrum: {}", both.id());

    println!("\n{:<8} {:>6} {:>10} {:>10} {:>10} {:>10}", "seq", "t", "W_yag", "W_mag", "product", "combined");
    for spec in ["fid", "cpmg:8"] {
        let seq: PulseSequence = spec.parse()?;
        for t in [0.5, 2.0] {
            let a = decoherence_at(&yag, &seq, t, CURVE_TOL)?;
            let b = decoherence_at(&magnetic, &seq, t, CURVE_TOL)?;
            let product = multi_source_w(&[yag.clone(), magnetic.clone()], &seq, t, CURVE_TOL)?;
            let combined = decoherence_at(&both, &seq, t, CURVE_TOL)?;
            println!("{spec:<8} {t:>6} {a:>10.6} {b:>10.6} {product:>10.6} {combined:>10.6}");
        }
    }
    Ok(())
}
