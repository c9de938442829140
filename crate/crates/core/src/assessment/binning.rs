use super::{Aspect, AssessmentError};
use crate::sl::{EvidenceVector, Opinion};
use crate::stats::{chi2_quantile, poisson_pmf};
use crate::tracker::{InnovationData, MeasurementScan, ReferenceModel, ReferenceWeighting, SensorModel};

/// Count interval `[mid_lo, mid_hi]` holding the central mass of the assumed
/// clutter distribution; everything below is "low", above is "high".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClutterBins {
    pub mid_lo: u64,
    pub mid_hi: u64,
}

impl ClutterBins {
    /// Grows an interval from the mode, always towards the heavier neighbour,
    /// until it holds at least half the Poisson mass.
    pub fn around_mode(mean: f64) -> Self {
        let mode = mean.floor() as u64;
        let (mut lo, mut hi) = (mode, mode);
        let mut mass = poisson_pmf(mode, mean);
        // the pmf at floor(mean) and at mean - 1 tie for integer means
        if mode > 0 && mean.fract() == 0.0 {
            lo = mode - 1;
            mass += poisson_pmf(lo, mean);
        }
        while mass < 0.5 {
            let left = if lo > 0 { poisson_pmf(lo - 1, mean) } else { -1.0 };
            let right = poisson_pmf(hi + 1, mean);
            if right >= left {
                hi += 1;
                mass += right;
            } else {
                lo -= 1;
                mass += left;
            }
        }
        Self { mid_lo: lo, mid_hi: hi }
    }

    pub fn bin_of(&self, count: u64) -> usize {
        if count < self.mid_lo {
            0
        } else if count <= self.mid_hi {
            1
        } else {
            2
        }
    }

    /// Poisson masses of (low, mid, high).
    pub fn masses(&self, mean: f64) -> [f64; 3] {
        let low: f64 = (0..self.mid_lo).map(|n| poisson_pmf(n, mean)).sum();
        let mid: f64 = (self.mid_lo..=self.mid_hi).map(|n| poisson_pmf(n, mean)).sum();
        [low, mid, (1.0 - low - mid).max(0.0)]
    }
}

/// Event domains of the four aspects.
#[derive(Debug, Clone, PartialEq)]
pub struct AspectBinning {
    /// Interior edges of the `B` equiprobable `χ²_{m_z}` bins.
    pub chi2_edges: Vec<f64>,
    pub meas_dim: usize,
    /// Gate probability of the nearest-neighbour association.
    pub gate_prob: f64,
    pub clutter: ClutterBins,
}

impl AspectBinning {
    pub fn new(bins: usize, meas_dim: usize, gate_prob: f64, clutter_mean: f64) -> Result<Self, AssessmentError> {
        if bins < 2 {
            return Err(AssessmentError::Param(format!("need at least 2 chi-square bins, got {bins}")));
        }
        if !(gate_prob > 0.0 && gate_prob < 1.0) {
            return Err(AssessmentError::Param(format!("gate probability {gate_prob}")));
        }
        let dof = meas_dim as u32;
        let chi2_edges = (1..bins)
            .map(|j| chi2_quantile(j as f64 / bins as f64, dof))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| AssessmentError::Param(e.to_string()))?;
        Ok(Self { chi2_edges, meas_dim, gate_prob, clutter: ClutterBins::around_mode(clutter_mean) })
    }

    pub fn bins(&self) -> usize {
        self.chi2_edges.len() + 1
    }

    /// Index of the χ² bin holding `z̃`; the last bin is open-ended.
    pub fn chi2_bin(&self, z: f64) -> usize {
        self.chi2_edges.partition_point(|e| *e <= z)
    }

    pub fn cardinality(&self, aspect: Aspect) -> usize {
        match aspect {
            Aspect::Overall => self.bins() + 1,
            Aspect::Association => 2,
            Aspect::Measurement => self.bins(),
            Aspect::Clutter => 3,
        }
    }
}

/// Dogmatic reference opinions, indexed by [`Aspect::index`].
#[derive(Debug, Clone, PartialEq)]
pub struct References([Opinion; 4]);

impl References {
    pub fn get(&self, aspect: Aspect) -> &Opinion {
        &self.0[aspect.index()]
    }
}

fn dogmatic(aspect: Aspect, probs: Vec<f64>) -> Result<Opinion, AssessmentError> {
    if let Some(i) = probs.iter().position(|p| !(*p > 0.0)) {
        return Err(AssessmentError::DegenerateBinning(format!(
            "{aspect:?} reference has zero probability in event {i}"
        )));
    }
    let total: f64 = probs.iter().sum();
    Ok(Opinion::dogmatic(probs.into_iter().map(|p| p / total).collect())?)
}

/// Reference opinion of one aspect.
///
/// * overall: `[missed, χ² bin 1, …, χ² bin B]` from the event weights
/// * association: `[associated, not associated]`, with the association mass
///   integrated over the gate
/// * measurement: the `B` equiprobable χ² bins
/// * clutter: Poisson masses of the (low, mid, high) count bins
pub fn build_reference(
    aspect: Aspect,
    sensor: &SensorModel,
    ref_model: &ReferenceModel,
    binning: &AspectBinning,
    weighting: ReferenceWeighting,
) -> Result<Opinion, AssessmentError> {
    let bins = binning.bins();
    match aspect {
        Aspect::Overall => {
            let (w0, w1) = ref_model.event_weights(weighting)?;
            let mut probs = Vec::with_capacity(bins + 1);
            probs.push(w0);
            probs.extend(std::iter::repeat_n(w1 / bins as f64, bins));
            dogmatic(aspect, probs)
        }
        Aspect::Association => {
            let (w0, w1) = ref_model.event_weights(weighting)?;
            let associated = w1 * binning.gate_prob;
            dogmatic(aspect, vec![associated, w0])
        }
        Aspect::Measurement => dogmatic(aspect, vec![1.0 / bins as f64; bins]),
        Aspect::Clutter => dogmatic(aspect, binning.clutter.masses(sensor.clutter_mean).to_vec()),
    }
}

/// References for all four aspects.
pub fn build_references(
    sensor: &SensorModel,
    ref_model: &ReferenceModel,
    binning: &AspectBinning,
    weighting: ReferenceWeighting,
) -> Result<References, AssessmentError> {
    let [a, b, c, d] = Aspect::ALL.map(|aspect| build_reference(aspect, sensor, ref_model, binning, weighting));
    Ok(References([a?, b?, c?, d?]))
}

/// Single-step opinion carrying one unit of evidence (or none for the
/// measurement aspect on a missed detection).
pub fn observe_step(
    aspect: Aspect,
    innov: &InnovationData,
    scan: &MeasurementScan,
    binning: &AspectBinning,
    base_rate: &[f64],
) -> Result<Opinion, AssessmentError> {
    let w = binning.cardinality(aspect);
    if base_rate.len() != w {
        return Err(AssessmentError::Param(format!(
            "base rate of length {} for a domain of {w} events",
            base_rate.len()
        )));
    }
    let associated_z = crate::tracker::transformed_likelihood_value(innov);
    let slot = match (aspect, associated_z) {
        (Aspect::Overall, None) => 0,
        (Aspect::Overall, Some(z)) => 1 + binning.chi2_bin(z),
        (Aspect::Association, Some(_)) => 0,
        (Aspect::Association, None) => 1,
        (Aspect::Measurement, None) => return Ok(Opinion::vacuous(base_rate.to_vec())?),
        (Aspect::Measurement, Some(z)) => binning.chi2_bin(z),
        (Aspect::Clutter, assoc) => {
            let count = scan.len() as u64 - u64::from(assoc.is_some());
            binning.clutter.bin_of(count)
        }
    };
    let mut counts = vec![0.0; w];
    counts[slot] = 1.0;
    let ev = EvidenceVector::with_default_prior(counts)?;
    Ok(Opinion::from_evidence(&ev, base_rate.to_vec())?)
}
