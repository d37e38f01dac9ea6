//! π pulses that over-rotate by δ.
//!
//! Pulses rotate about x and the qubit starts along +x, so the pulse axis is
//! parallel to the coherence. A fixed δ then acts like a spin lock and is
//! refocused by CPMG; a δ drawn afresh for each pulse is not.

use dephasing::oracle::{mc_decoherence, mc_decoherence_grid, ConstantSource, McSettings, PulseError};
use dephasing::sequences::PulseSequence;
use dephasing::spectra::PowerSpectrum;

fn main() -> dephasing::Result<()> {
    let cpmg = PulseSequence::cpmg(50)?;
    let static_noise = ConstantSource(3.0);
    println!("static detuning 3 rad/s, CPMG n = 50, t = 1 s, 100 trials");
    for delta in [0.0, 0.05, 0.2] {
        let sys = McSettings::new(1e-3, 100, 1).with_pulse_error(PulseError::Systematic { delta });
        let rnd = McSettings::new(1e-3, 100, 1).with_pulse_error(PulseError::Random { sigma: delta });
        let w_sys = mc_decoherence_grid(&static_noise, &cpmg, &[1.0], &sys)?[0].w;
        let w_rnd = mc_decoherence_grid(&static_noise, &cpmg, &[1.0], &rnd)?[0].w;
        println!("  |delta| = {delta:<5} systematic W = {w_sys:.6}   random W = {w_rnd:.6}");
    }

    let s = PowerSpectrum::power_law(2.0, 5.0 / 3.0, 0.01, 100.0)?;
    println!("\npower-law noise, CPMG n = 50, t = 2 s, 400 trials, same realizations");
    for err in [PulseError::None, PulseError::Systematic { delta: 0.2 }, PulseError::Random { sigma: 0.2 }] {
        let e = mc_decoherence(&s, &cpmg, 2.0, 1.0 / 800.0, 400, err, 3)?;
        println!("  {:<30} W = {:.5} ± {:.5}", format!("{err:?}"), e.w, e.stderr);
    }
    Ok(())
}
