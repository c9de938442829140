//! Reference coefficients of a clutter sensor and the dogmatic reference
//! opinion of each assessment aspect.

use sltrack::assessment::{build_references, Aspect, AspectBinning};
use sltrack::tracker::{reference_coeffs, ReferenceWeighting, SensorModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (pd, clutter) in [(0.9, 4.0), (0.6, 4.0), (0.9, 2.0), (1.0, 0.0)] {
        let sensor = SensorModel::position_2d(pd, clutter, 200.0 * 100.0, 0.75);
        let model = reference_coeffs(&sensor)?;
        println!("p_D = {pd}, clutter mean = {clutter}");
        println!("  c0~ = {:.4e}  c1~ = {:.4e}", model.c0_tilde, model.c1_tilde);
        for weighting in [ReferenceWeighting::PerHypothesis, ReferenceWeighting::Verbatim] {
            let (w0, w1) = model.event_weights(weighting)?;
            println!("  {weighting:?}: missed = {w0:.4}, detected = {w1:.4}");
        }
        let binning = AspectBinning::new(5, 2, 0.999, clutter.max(1e-3))?;
        match build_references(&sensor, &model, &binning, ReferenceWeighting::PerHypothesis) {
            Ok(refs) => {
                for aspect in Aspect::ALL {
                    let p: Vec<String> = refs.get(aspect).belief().iter().map(|x| format!("{x:.3}")).collect();
                    println!("  {:>8}: [{}]", aspect.short_name(), p.join(", "));
                }
            }
            // a domain with an impossible event has no usable reference
            Err(e) => println!("  no references: {e}"),
        }
    }
    Ok(())
}
