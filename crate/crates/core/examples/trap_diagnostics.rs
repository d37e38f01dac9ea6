//! Trap-side diagnostics: light shift against intensity, Zeeman shifts of the
//! clock pair, and the adiabaticity of beam-pointing motion.

use dephasing::trap::{
    adiabaticity_ratio, differential_light_shift, differential_zeeman, preset, zeeman_splitting, RB87_YAG_500UK,
};

fn main() -> dephasing::Result<()> {
    let trap = preset(RB87_YAG_500UK)?;
    println!("trap depth {:.4e} rad/s, waist {:e} m", trap.trap_depth, trap.waist);

    println!("\n{:>14} {:>14} {:>18}", "I0 (W/m^2)", "E_L (rad/s)", "E_H + E_L (Hz)");
    for scale in [0.0, 0.5, 1.0, 2.0] {
        let cfg = trap.with_peak_intensity(scale * trap.peak_intensity)?;
        let s = differential_light_shift(&cfg)?;
        println!("{:>14.4e} {:>14.3} {:>18.3}", cfg.peak_intensity, s.e_l, s.e_total / std::f64::consts::TAU);
    }

    let b = 1e-4;
    println!("\nZeeman at B = {b} T");
    println!("  |F=2, m=1>         {:.6e} rad/s", zeeman_splitting(trap.gf2, 1.0, b));
    println!("  clock differential {:e} rad/s", differential_zeeman(trap.gf1, trap.mf1, trap.gf2, trap.mf2, b));

    println!("\nadiabaticity ratio for 10 nm pointing noise");
    for f in [1.0, 10.0, 50.0, 1000.0] {
        println!("  {f:>7} Hz  R = {:.3e}", adiabaticity_ratio(&trap, 10e-9, f)?);
    }
    Ok(())
}
