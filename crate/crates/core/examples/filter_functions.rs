//! Filter functions F(x), x = ωt, of the catalog sequences.
//!
//! A sequence suppresses noise at frequencies where F is small. At low x the
//! generic filter falls off as a power of x set by the sequence's symmetry.

use dephasing::sequences::{filter, filter_closed_form, ClosedForm, Family, PulseSequence};

fn main() -> dephasing::Result<()> {
    let specs = ["fid", "se", "cpmg:6", "pdd:5", "pdd:6", "udd:6", "cdd:l=3"];
    let xs = [0.01, 0.1, 1.0, 10.0, 40.0];
    print!("{:<9}", "x");
    for x in xs {
        print!("{x:>13}");
    }
    println!();
    for spec in specs {
        let seq: PulseSequence = spec.parse()?;
        print!("{spec:<9}");
        for x in xs {
            print!("{:>13.4e}", filter(&seq, x));
        }
        println!();
    }

    println!("\nlow-frequency order, d ln F / d ln x at x = 1e-3:");
    for spec in specs {
        let seq: PulseSequence = spec.parse()?;
        let (a, b) = (1e-3, 2e-3);
        let order = (filter(&seq, b) / filter(&seq, a)).ln() / (b / a).ln();
        println!("  {spec:<9} {order:6.2}");
    }

    println!("\nCPMG n = 6 closed forms at x = 5:");
    let generic = filter(&PulseSequence::cpmg(6)?, 5.0);
    for form in [ClosedForm::Printed, ClosedForm::Repaired] {
        match filter_closed_form(Family::Cpmg, 6, 5.0, form) {
            Ok(f) => println!("  {form:?}: {f:.6e} (generic {generic:.6e})"),
            Err(e) => println!("  {form:?}: {e}"),
        }
    }
    Ok(())
}
