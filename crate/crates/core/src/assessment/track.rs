use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{Aspect, AssessmentError};
use crate::sl::threshold::{half_width_scale, threshold_from_scale};
use crate::sl::{degree_of_conflict, fuse_acbf, trust_discount, unfuse, Opinion};

/// Tunables of the self-assessment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SaParams {
    /// Short-term window `n_st` in units of evidence.
    pub window_len: usize,
    /// Trust-discount probability applied to the long-term opinion each step.
    pub discount: f64,
    /// Confidence level of the conflict threshold.
    pub alpha: f64,
    /// Number of equiprobable χ² bins `B`.
    pub bins: usize,
    /// Gate probability of the nearest-neighbour association.
    pub gate_prob: f64,
    /// Window of the time-average NIS, in time steps.
    pub nis_window: usize,
    /// Confidence level of the NIS interval.
    pub nis_conf: f64,
}

impl Default for SaParams {
    fn default() -> Self {
        Self { window_len: 50, discount: 0.9999, alpha: 0.5, bins: 5, gate_prob: 0.999, nis_window: 50, nis_conf: 0.99 }
    }
}

impl SaParams {
    pub fn validate(&self) -> Result<(), AssessmentError> {
        let bad = |msg: String| Err(AssessmentError::Param(msg));
        if self.window_len == 0 {
            return bad("window_len must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.discount) {
            return bad(format!("discount {} outside [0, 1]", self.discount));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha {} outside (0, 1)", self.alpha));
        }
        if self.bins < 2 {
            return bad(format!("bins {} < 2", self.bins));
        }
        if !(self.gate_prob > 0.0 && self.gate_prob < 1.0) {
            return bad(format!("gate_prob {} outside (0, 1)", self.gate_prob));
        }
        if self.nis_window == 0 {
            return bad("nis_window must be at least 1".into());
        }
        if !(self.nis_conf > 0.0 && self.nis_conf < 1.0) {
            return bad(format!("nis_conf {} outside (0, 1)", self.nis_conf));
        }
        Ok(())
    }
}

/// Result of one [`AssessmentTrack::track_step`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SAOutput {
    pub aspect: Aspect,
    pub sensor_id: usize,
    /// `DC(ω_lt, ω_ref)`.
    pub dc_score: f64,
    /// `η` for the long-term evidence; 1 until the long-term opinion has
    /// first carried `n_st` units of evidence, so that
    /// `flag ⇔ dc_score > threshold` holds during warm-up.
    pub threshold: f64,
    pub long_term_uncertainty: f64,
    /// Evidence carried by the long-term opinion.
    pub evidence: f64,
    pub flag: bool,
    /// The long-term opinion was overwritten by the short-term one.
    pub reset: bool,
}

/// Short-term/long-term opinion tracking for one (sensor, aspect) pair.
#[derive(Debug, Clone)]
pub struct AssessmentTrack {
    aspect: Aspect,
    sensor_id: usize,
    reference: Opinion,
    window_len: usize,
    discount: f64,
    alpha: f64,
    scale: f64,
    fifo: VecDeque<Opinion>,
    short_term: Opinion,
    long_term: Opinion,
    warmed_up: bool,
}

impl AssessmentTrack {
    /// New track with vacuous memories whose base rate is the reference belief.
    pub fn new(
        aspect: Aspect,
        sensor_id: usize,
        reference: Opinion,
        params: &SaParams,
    ) -> Result<Self, AssessmentError> {
        params.validate()?;
        if !reference.is_dogmatic() {
            return Err(AssessmentError::Param("reference opinion must be dogmatic".into()));
        }
        let w = reference.cardinality();
        let scale = half_width_scale(params.alpha, w)?;
        let vacuous = Opinion::vacuous(reference.belief().to_vec())?;
        Ok(Self {
            aspect,
            sensor_id,
            reference,
            window_len: params.window_len,
            discount: params.discount,
            alpha: params.alpha,
            scale,
            fifo: VecDeque::with_capacity(params.window_len + 1),
            short_term: vacuous.clone(),
            long_term: vacuous,
            warmed_up: false,
        })
    }

    pub fn aspect(&self) -> Aspect {
        self.aspect
    }

    pub fn sensor_id(&self) -> usize {
        self.sensor_id
    }

    pub fn reference(&self) -> &Opinion {
        &self.reference
    }

    pub fn short_term(&self) -> &Opinion {
        &self.short_term
    }

    pub fn long_term(&self) -> &Opinion {
        &self.long_term
    }

    pub fn fifo_len(&self) -> usize {
        self.fifo.len()
    }

    /// The long-term opinion has carried `n_st` units of evidence at least once.
    pub fn warmed_up(&self) -> bool {
        self.warmed_up
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Base rate shared by the single-step opinions of this track.
    pub fn base_rate(&self) -> &[f64] {
        self.reference.belief()
    }

    fn threshold(&self, evidence: f64) -> f64 {
        threshold_from_scale(self.scale, self.reference.cardinality(), evidence)
    }

    fn rebuild_short_term(&mut self) -> Result<(), AssessmentError> {
        let mut st = Opinion::vacuous(self.base_rate().to_vec())?;
        for op in &self.fifo {
            st = fuse_acbf(&st, op)?;
        }
        self.short_term = st;
        Ok(())
    }

    /// Advances the track by one single-step opinion.
    pub fn track_step(&mut self, step: &Opinion) -> Result<SAOutput, AssessmentError> {
        let w = self.reference.cardinality();
        if step.cardinality() != w {
            return Err(crate::sl::SlError::DomainMismatch { left: w, right: step.cardinality() }.into());
        }

        // vacuous opinions are neutral and must not occupy window slots
        if !step.is_vacuous() {
            self.short_term = fuse_acbf(&self.short_term, step)?;
            self.fifo.push_back(step.clone());
            if self.fifo.len() > self.window_len {
                let oldest = self.fifo.pop_front().expect("fifo is non-empty");
                match unfuse(&self.short_term, &oldest, self.reference.belief()) {
                    Ok(st) => self.short_term = st,
                    Err(_) => self.rebuild_short_term()?,
                }
            }
        }

        self.long_term = fuse_acbf(&trust_discount(&self.long_term, self.discount)?, step)?;

        let mut reset = false;
        if self.fifo.len() >= self.window_len {
            let conflict = degree_of_conflict(&self.short_term, &self.long_term)?;
            if conflict > self.threshold(self.window_len as f64) {
                self.long_term = self.short_term.clone();
                reset = true;
            }
        }

        let evidence = self.long_term.evidence_amount();
        let dc_score = degree_of_conflict(&self.long_term, &self.reference)?;
        // latched: later evidence starvation must not silence the flag
        self.warmed_up |= evidence + 1e-9 >= self.window_len as f64;
        let threshold = if self.warmed_up { self.threshold(evidence) } else { 1.0 };
        Ok(SAOutput {
            aspect: self.aspect,
            sensor_id: self.sensor_id,
            dc_score,
            threshold,
            long_term_uncertainty: self.long_term.uncertainty(),
            evidence,
            flag: dc_score > threshold,
            reset,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl::EvidenceVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn one_hot(slot: usize, base: &[f64]) -> Opinion {
        let mut c = vec![0.0; base.len()];
        c[slot] = 1.0;
        Opinion::from_evidence(&EvidenceVector::with_default_prior(c).unwrap(), base.to_vec()).unwrap()
    }

    fn sample(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
        let x: f64 = rng.random();
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if x < acc {
                return i;
            }
        }
        probs.len() - 1
    }

    fn params(n_st: usize) -> SaParams {
        SaParams { window_len: n_st, ..SaParams::default() }
    }

    #[test]
    fn reference_drawn_stream_stays_below_threshold() {
        let probs = [0.1, 0.18, 0.18, 0.18, 0.18, 0.18];
        let reference = Opinion::dogmatic(probs.to_vec()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut total = 0;
        let mut flagged = 0;
        for run in 0..20 {
            let mut t = AssessmentTrack::new(Aspect::Overall, 1, reference.clone(), &params(50)).unwrap();
            for k in 0..600 {
                let out = t.track_step(&one_hot(sample(&mut rng, &probs), &probs)).unwrap();
                assert_eq!(out.flag, out.dc_score > out.threshold);
                assert!(t.fifo_len() <= 50);
                if k >= 100 {
                    total += 1;
                    flagged += usize::from(out.flag);
                }
            }
            let _ = run;
        }
        assert!((flagged as f64) / (total as f64) < 0.05, "{flagged}/{total}");
    }

    #[test]
    fn concentrated_stream_resets_and_flags() {
        let probs = [0.5, 0.5];
        let reference = Opinion::dogmatic(probs.to_vec()).unwrap();
        let mut t = AssessmentTrack::new(Aspect::Association, 1, reference, &params(20)).unwrap();
        // settle on the reference, then switch to a single event
        for k in 0..200 {
            t.track_step(&one_hot(k % 2, &probs)).unwrap();
        }
        let mut reset_seen = false;
        let mut flag_at = None;
        for k in 0..40 {
            let out = t.track_step(&one_hot(1, &probs)).unwrap();
            reset_seen |= out.reset;
            if out.flag && flag_at.is_none() {
                flag_at = Some(k);
            }
        }
        assert!(reset_seen);
        assert!(flag_at.is_some_and(|k| k < 40));
    }

    #[test]
    fn vacuous_step_is_neutral() {
        let probs = [0.25; 4];
        let reference = Opinion::dogmatic(probs.to_vec()).unwrap();
        let mut t = AssessmentTrack::new(Aspect::Measurement, 2, reference, &params(10)).unwrap();
        for k in 0..5 {
            t.track_step(&one_hot(k % 4, &probs)).unwrap();
        }
        let before = t.short_term().clone();
        let ev = t.long_term().evidence_amount();
        t.track_step(&Opinion::vacuous(probs.to_vec()).unwrap()).unwrap();
        assert_eq!(t.short_term(), &before);
        assert_eq!(t.fifo_len(), 5);
        assert!(t.long_term().evidence_amount() <= ev + 1e-9);
    }

    #[test]
    fn short_term_spans_the_window() {
        let probs = [0.5, 0.5];
        let reference = Opinion::dogmatic(probs.to_vec()).unwrap();
        let mut t = AssessmentTrack::new(Aspect::Association, 1, reference, &params(10)).unwrap();
        for k in 0..37 {
            t.track_step(&one_hot(usize::from(k % 3 == 0), &probs)).unwrap();
        }
        assert_eq!(t.fifo_len(), 10);
        assert!((t.short_term().evidence_amount() - 10.0).abs() < 1e-6);
    }

    #[test]
    fn long_term_evidence_bounded() {
        let probs = [0.5, 0.5];
        let reference = Opinion::dogmatic(probs.to_vec()).unwrap();
        let p = SaParams { window_len: 10, discount: 0.99, ..SaParams::default() };
        let mut t = AssessmentTrack::new(Aspect::Association, 1, reference, &p).unwrap();
        let mut last = 0.0;
        for k in 0..2000 {
            last = t.track_step(&one_hot(k % 2, &probs)).unwrap().evidence;
        }
        // steady state of N = W·p·N/(W + (1 − p)·N) + 1
        let n = (-1.0 + (1.0_f64 + 4.0 * 2.0 / 0.01).sqrt()) / 2.0;
        assert!((last - n).abs() / n < 0.1, "{last} vs {n}");
        assert!(last <= 1.0 / 0.01 + 10.0);
    }

    #[test]
    fn warm_up_latches() {
        let probs = [0.5, 0.5];
        let reference = Opinion::dogmatic(probs.to_vec()).unwrap();
        let p = SaParams { window_len: 10, discount: 0.99, ..SaParams::default() };
        let mut t = AssessmentTrack::new(Aspect::Measurement, 1, reference, &p).unwrap();
        let mut k = 0;
        while !t.warmed_up() {
            let out = t.track_step(&one_hot(k % 2, &probs)).unwrap();
            assert_eq!(out.threshold == 1.0, !t.warmed_up());
            k += 1;
            assert!(k < 100);
        }
        // vacuous steps let the evidence decay below n_st; the threshold stays finite
        let vac = Opinion::vacuous(probs.to_vec()).unwrap();
        let mut last = None;
        for _ in 0..50 {
            last = Some(t.track_step(&vac).unwrap());
        }
        let last = last.unwrap();
        assert!(last.evidence < 10.0);
        assert!(last.threshold < 1.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let reference = Opinion::dogmatic(vec![0.5, 0.5]).unwrap();
        assert!(AssessmentTrack::new(
            Aspect::Overall,
            1,
            reference.clone(),
            &SaParams { alpha: 1.0, ..SaParams::default() }
        )
        .is_err());
        let soft = Opinion::vacuous(vec![0.5, 0.5]).unwrap();
        assert!(AssessmentTrack::new(Aspect::Overall, 1, soft, &SaParams::default()).is_err());
        let mut t = AssessmentTrack::new(Aspect::Overall, 1, reference, &SaParams::default()).unwrap();
        assert!(t.track_step(&Opinion::vacuous(vec![0.2; 5]).unwrap()).is_err());
    }
}
