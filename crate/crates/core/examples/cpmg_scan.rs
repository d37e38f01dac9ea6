//! T2 against CPMG pulse count, and how close to linear the growth is.

use dephasing::coherence::{calibrate_fid, pulse_scan, QuadratureOptions, SCAN_TOL};
use dephasing::presets::{spectrum_preset, PAPER_YAG_1F};
use dephasing::sequences::Family;

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

fn main() -> dephasing::Result<()> {
    let opts = QuadratureOptions::new(SCAN_TOL)?;
    let cal = calibrate_fid(&spectrum_preset(PAPER_YAG_1F)?, 1.0, &opts)?;
    let orders: Vec<usize> = (1..=10).map(|k| 10 * k).collect();
    let scan = pulse_scan(&cal.spectrum, Family::Cpmg, &orders, 1e3, SCAN_TOL)?;

    let mut ns = Vec::new();
    let mut t2s = Vec::new();
    println!("{:>5} {:>10}", "n", "T2/T2_FID");
    for (n, r) in orders.iter().zip(scan) {
        let c = r?;
        println!("{n:>5} {:>10.3}", c.t2);
        ns.push(*n as f64);
        t2s.push(c.t2);
    }
    println!("\nPearson r(n, T2) = {:.5}", pearson(&ns, &t2s));
    let slope = (t2s[t2s.len() - 1] / t2s[0]).ln() / (ns[ns.len() - 1] / ns[0]).ln();
    println!("log-log slope     = {slope:.3}");
    Ok(())
}
