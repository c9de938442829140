//! One assessment track fed with draws from its reference, then from a
//! shifted distribution. Prints when the long-term opinion resets and when
//! the conflict with the reference crosses the threshold.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sltrack::assessment::{Aspect, AssessmentTrack, SaParams};
use sltrack::sl::{EvidenceVector, Opinion};

fn draw(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reference_probs = [0.1, 0.18, 0.18, 0.18, 0.18, 0.18];
    let shifted_probs = [0.1, 0.05, 0.05, 0.1, 0.2, 0.5];
    let reference = Opinion::dogmatic(reference_probs.to_vec())?;
    let params = SaParams::default();
    let mut track = AssessmentTrack::new(Aspect::Overall, 1, reference, &params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    let (shift_start, shift_end) = (300, 450);
    let mut was_flagged = false;
    for k in 0..600 {
        let probs = if (shift_start..shift_end).contains(&k) { &shifted_probs } else { &reference_probs };
        let mut counts = vec![0.0; probs.len()];
        counts[draw(&mut rng, probs)] = 1.0;
        let step = Opinion::from_evidence(&EvidenceVector::with_default_prior(counts)?, track.base_rate().to_vec())?;
        let out = track.track_step(&step)?;
        if out.reset {
            println!("k={k:>3}  long-term reset to the short-term window");
        }
        if out.flag != was_flagged {
            println!(
                "k={k:>3}  flag {}  dc={:.4} threshold={:.4} evidence={:.1}",
                if out.flag { "raised " } else { "cleared" },
                out.dc_score,
                out.threshold,
                out.evidence
            );
            was_flagged = out.flag;
        }
        if k % 100 == 99 {
            println!(
                "k={k:>3}  dc={:.4} threshold={:.4} u_lt={:.4}",
                out.dc_score, out.threshold, out.long_term_uncertainty
            );
        }
    }
    println!("shift was active in [{shift_start}, {shift_end})");
    Ok(())
}
