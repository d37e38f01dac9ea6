//! From trap parameters to a free-induction-decay curve.
//!
//! The rb87 YAG preset fixes the differential light shift E_L, which sets the
//! amplitude of the intensity-noise spectrum. W(t) and T2 follow by quadrature.

use dephasing::coherence::{coherence_time, decoherence_curve, QuadratureOptions, SCAN_TOL};
use dephasing::sequences::PulseSequence;
use dephasing::spectra::yag_intensity_noise;
use dephasing::trap::{differential_light_shift, preset, RB87_YAG_500UK};

fn main() -> dephasing::Result<()> {
    let trap = preset(RB87_YAG_500UK)?;
    let shift = differential_light_shift(&trap)?;
    println!("peak intensity   {:.4e} W/m^2", trap.peak_intensity);
    println!("E_L              {:.3} rad/s ({:.2} Hz)", shift.e_l, shift.e_l / std::f64::consts::TAU);

    let noise = yag_intensity_noise(shift.e_l)?;
    let fid = PulseSequence::fid();
    let times: Vec<f64> = (0..=15).map(|i| 0.1 * i as f64).collect();
    let curve = decoherence_curve(&noise, &fid, &times, &QuadratureOptions::default())?;
    println!("\n   t (s)      W(t)");
    for (t, w) in curve.times.iter().zip(&curve.w) {
        println!("{t:8.2} {w:10.6}");
    }

    let c = coherence_time(&noise, &fid, 100.0, SCAN_TOL)?;
    println!("\nFID T2 = {:.4} s (bracket {:.5}..{:.5})", c.t2, c.crossing_bracket.0, c.crossing_bracket.1);
    Ok(())
}
