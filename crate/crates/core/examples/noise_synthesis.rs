//! Gaussian noise with a prescribed spectrum, checked against its periodogram.

use dephasing::oracle::{periodogram, synthesize_noise};
use dephasing::spectra::PowerSpectrum;

fn main() -> dephasing::Result<()> {
    let s = PowerSpectrum::power_law(4.0, 5.0 / 3.0, 0.1, 200.0)?;
    let dt = 1.0 / 800.0;
    let traces: Vec<_> = (0..16).map(|seed| synthesize_noise(&s, 40.0, dt, seed)).collect::<Result<_, _>>()?;
    let var = traces.iter().map(|t| t.variance()).sum::<f64>() / traces.len() as f64;
    println!("variance: sampled {var:.4}, spectral {:.4}", s.variance());

    let mut avg: Vec<(f64, f64)> = periodogram(&traces[0]).into_iter().map(|(f, _)| (f, 0.0)).collect();
    for t in &traces {
        for (a, (_, p)) in avg.iter_mut().zip(periodogram(t)) {
            a.1 += p / traces.len() as f64;
        }
    }
    println!("\n{:>8} {:>8} {:>12} {:>12}", "f_lo", "f_hi", "estimate", "S_f");
    let mut lo = 0.2;
    while lo * 2.0 <= 200.0 {
        let hi = lo * 2.0;
        let band: Vec<f64> = avg.iter().filter(|(f, _)| *f >= lo && *f < hi).map(|p| p.1).collect();
        let est = band.iter().sum::<f64>() / band.len() as f64;
        let truth = s.band_power(lo, hi) / (hi - lo);
        println!("{lo:>8.2} {hi:>8.2} {est:>12.5e} {truth:>12.5e}");
        lo = hi;
    }

    let path = std::env::temp_dir().join("dephasing_trace.csv");
    traces[0].write_csv(std::fs::File::create(&path)?)?;
    println!("\nfirst trace written to {}", path.display());
    Ok(())
}
