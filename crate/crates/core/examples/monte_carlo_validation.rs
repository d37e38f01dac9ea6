//! Time-domain Monte Carlo against the spectral formula.
//!
//! For Ornstein-Uhlenbeck noise the FID exponent is also known in closed form,
//! so three independent numbers can be compared side by side.

use dephasing::oracle::{compare_mc_spectral, default_dt, ou_fid_exponent};
use dephasing::sequences::PulseSequence;
use dephasing::spectra::PowerSpectrum;

fn main() -> dephasing::Result<()> {
    let (amp, fc) = (4.0, 5.0);
    let s = PowerSpectrum::lorentzian(amp, fc, 1e-3, 200.0)?;
    let report = compare_mc_spectral(&s, &PulseSequence::fid(), &[0.1, 0.5, 1.0, 2.0], default_dt(&s), 2000, 7)?;
    println!("{:>6} {:>10} {:>10} {:>10} {:>10} {:>7}", "t", "W_mc", "stderr", "W_spec", "W_ou", "z");
    for p in &report.points {
        let ou = (-ou_fid_exponent(amp, fc, p.t_eff)).exp();
        println!("{:>6} {:>10.5} {:>10.5} {:>10.5} {:>10.5} {:>7.2}", p.t, p.w_mc, p.stderr, p.w_spectral, ou, p.z);
    }
    println!("all within |z| <= {}: {}", report.z_threshold, report.all_pass);

    let echo = compare_mc_spectral(&s, &PulseSequence::cpmg(4)?, &[0.5, 1.0, 2.0], default_dt(&s), 2000, 7)?;
    println!("\nCPMG n=4:");
    for p in &echo.points {
        println!("  t = {:>4}  W_mc {:.5} ± {:.5}  W_spec {:.5}", p.t, p.w_mc, p.stderr, p.w_spectral);
    }
    Ok(())
}
