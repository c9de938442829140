//! The dynamic conflict threshold over sample size, error probability and
//! domain size.

use sltrack::sl::{dc_threshold, ThresholdParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sizes = [10.0, 20.0, 50.0, 100.0, 500.0, 1000.0, 10_000.0];
    print!("{:>6} {:>3}", "alpha", "W");
    for n in sizes {
        print!(" {:>9}", format!("n={n}"));
    }
    println!();
    for (alpha, w) in [(0.5, 2), (0.5, 6), (0.9, 2), (0.99, 2), (0.99, 6)] {
        print!("{alpha:>6} {w:>3}");
        for n in sizes {
            print!(" {:>9.5}", dc_threshold(&ThresholdParams::new(alpha, w, n)?)?);
        }
        println!();
    }
    // larger alpha widens the interval; more samples narrow it
    Ok(())
}
