//! Sliding time-average NIS against its two-sided χ² interval, first on a
//! consistent filter and then with the innovations inflated fourfold.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution};
use sltrack::assessment::NisWindow;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chi2 = ChiSquared::new(2.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut window = NisWindow::new(50, 2, 0.99)?;
    for k in 0..300 {
        let scale = if (150..200).contains(&k) { 4.0 } else { 1.0 };
        // every tenth step is a missed detection
        let z = (k % 10 != 9).then(|| scale * chi2.sample(&mut rng));
        if let Some(stat) = window.push(z)? {
            if k % 25 == 24 {
                println!(
                    "k={k:>3}  avg={:.3}  ci=[{:.3}, {:.3}]  samples={}  {}",
                    stat.mean,
                    stat.lower,
                    stat.upper,
                    stat.samples,
                    if stat.inside() { "inside" } else { "OUTSIDE" }
                );
            }
        }
    }
    Ok(())
}
