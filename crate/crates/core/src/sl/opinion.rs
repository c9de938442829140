use super::{SlError, ADDITIVITY_TOL};

/// A multinomial opinion `(b, u, a)` over a domain of cardinality `W ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Opinion {
    belief: Vec<f64>,
    uncertainty: f64,
    base_rate: Vec<f64>,
}

fn check_unit(name: &str, x: f64) -> Result<(), SlError> {
    if !(-ADDITIVITY_TOL..=1.0 + ADDITIVITY_TOL).contains(&x) || x.is_nan() {
        return Err(SlError::Invalid(format!("{name} component {x} outside [0, 1]")));
    }
    Ok(())
}

impl Opinion {
    /// Validating constructor.
    pub fn try_new(belief: Vec<f64>, uncertainty: f64, base_rate: Vec<f64>) -> Result<Self, SlError> {
        let w = belief.len();
        if w < 2 {
            return Err(SlError::Cardinality(w));
        }
        if base_rate.len() != w {
            return Err(SlError::DomainMismatch { left: w, right: base_rate.len() });
        }
        for &b in &belief {
            check_unit("belief", b)?;
        }
        for &a in &base_rate {
            check_unit("base rate", a)?;
        }
        check_unit("uncertainty", uncertainty)?;
        let mass = belief.iter().sum::<f64>() + uncertainty;
        if (mass - 1.0).abs() > ADDITIVITY_TOL {
            return Err(SlError::Invalid(format!("belief + uncertainty sums to {mass}")));
        }
        let rate: f64 = base_rate.iter().sum();
        if (rate - 1.0).abs() > ADDITIVITY_TOL {
            return Err(SlError::Invalid(format!("base rate sums to {rate}")));
        }
        Ok(Self { belief, uncertainty, base_rate })
    }

    pub(crate) fn from_parts_unchecked(belief: Vec<f64>, uncertainty: f64, base_rate: Vec<f64>) -> Self {
        debug_assert_eq!(belief.len(), base_rate.len());
        Self { belief, uncertainty, base_rate }
    }

    /// No evidence at all: `b = 0`, `u = 1`.
    pub fn vacuous(base_rate: Vec<f64>) -> Result<Self, SlError> {
        let w = base_rate.len();
        Self::try_new(vec![0.0; w], 1.0, base_rate)
    }

    /// A pure probability assignment (`u = 0`); the base rate is set to the
    /// belief itself.
    pub fn dogmatic(belief: Vec<f64>) -> Result<Self, SlError> {
        let base = belief.clone();
        Self::try_new(belief, 0.0, base)
    }

    pub fn belief(&self) -> &[f64] {
        &self.belief
    }

    pub fn uncertainty(&self) -> f64 {
        self.uncertainty
    }

    pub fn base_rate(&self) -> &[f64] {
        &self.base_rate
    }

    /// Domain cardinality `W`.
    pub fn cardinality(&self) -> usize {
        self.belief.len()
    }

    pub fn is_vacuous(&self) -> bool {
        self.uncertainty >= 1.0
    }

    pub fn is_dogmatic(&self) -> bool {
        self.uncertainty <= 0.0
    }

    /// Projected probability `P(x) = b(x) + a(x)·u`.
    pub fn project(&self) -> Vec<f64> {
        self.belief.iter().zip(&self.base_rate).map(|(b, a)| b + a * self.uncertainty).collect()
    }

    /// Maps Dirichlet evidence to an opinion.
    pub fn from_evidence(ev: &EvidenceVector, base_rate: Vec<f64>) -> Result<Self, SlError> {
        if ev.counts.len() != base_rate.len() {
            return Err(SlError::DomainMismatch { left: ev.counts.len(), right: base_rate.len() });
        }
        let denom = ev.prior_weight + ev.total();
        let belief = ev.counts.iter().map(|r| r / denom).collect();
        Self::try_new(belief, ev.prior_weight / denom, base_rate)
    }

    /// Inverse of [`Opinion::from_evidence`] with prior weight `W`.
    pub fn evidence(&self) -> Result<EvidenceVector, SlError> {
        if self.uncertainty <= 0.0 {
            return Err(SlError::DogmaticEvidence);
        }
        let w = self.cardinality() as f64;
        let counts = self.belief.iter().map(|b| w * b / self.uncertainty).collect();
        EvidenceVector::new(counts, w)
    }

    /// Total evidence `W·(1 − u)/u`; infinite for dogmatic opinions.
    pub fn evidence_amount(&self) -> f64 {
        if self.uncertainty <= 0.0 {
            f64::INFINITY
        } else {
            self.cardinality() as f64 * (1.0 - self.uncertainty) / self.uncertainty
        }
    }
}

/// Pseudo-counts per domain event plus the Dirichlet prior weight.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceVector {
    counts: Vec<f64>,
    prior_weight: f64,
}

impl EvidenceVector {
    pub fn new(counts: Vec<f64>, prior_weight: f64) -> Result<Self, SlError> {
        if counts.len() < 2 {
            return Err(SlError::Cardinality(counts.len()));
        }
        if counts.iter().any(|c| !(*c >= 0.0) || !c.is_finite()) {
            return Err(SlError::Invalid("evidence counts must be finite and non-negative".into()));
        }
        if !(prior_weight > 0.0) || !prior_weight.is_finite() {
            return Err(SlError::Invalid(format!("prior weight {prior_weight} must be positive")));
        }
        Ok(Self { counts, prior_weight })
    }

    /// Evidence with the default prior weight `W = counts.len()`.
    pub fn with_default_prior(counts: Vec<f64>) -> Result<Self, SlError> {
        let w = counts.len() as f64;
        Self::new(counts, w)
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn prior_weight(&self) -> f64 {
        self.prior_weight
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn projection_examples() {
        let op = Opinion::try_new(vec![0.3, 0.1], 0.6, vec![0.5, 0.5]).unwrap();
        let p = op.project();
        assert_relative_eq!(p[0], 0.6, epsilon = 1e-12);
        assert_relative_eq!(p[1], 0.4, epsilon = 1e-12);

        let vac = Opinion::vacuous(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(vac.project(), vec![0.2, 0.3, 0.5]);

        let dog = Opinion::try_new(vec![0.7, 0.3], 0.0, vec![0.5, 0.5]).unwrap();
        assert_eq!(dog.project(), vec![0.7, 0.3]);
    }

    #[test]
    fn rejects_invalid() {
        assert!(matches!(Opinion::try_new(vec![1.0], 0.0, vec![1.0]), Err(SlError::Cardinality(1))));
        assert!(Opinion::try_new(vec![0.5, 0.6], 0.0, vec![0.5, 0.5]).is_err());
        assert!(Opinion::try_new(vec![0.5, 0.5], 0.0, vec![0.6, 0.5]).is_err());
        assert!(Opinion::try_new(vec![0.5, 0.5], 0.0, vec![0.5, 0.5, 0.0]).is_err());
        assert!(Opinion::try_new(vec![-0.1, 0.6], 0.5, vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn evidence_mapping_examples() {
        let ev = EvidenceVector::new(vec![0.0, 0.0], 2.0).unwrap();
        let op = Opinion::from_evidence(&ev, vec![0.5, 0.5]).unwrap();
        assert!(op.is_vacuous());

        let ev = EvidenceVector::new(vec![8.0, 0.0], 2.0).unwrap();
        let op = Opinion::from_evidence(&ev, vec![0.5, 0.5]).unwrap();
        assert_relative_eq!(op.belief()[0], 0.8, epsilon = 1e-12);
        assert_relative_eq!(op.belief()[1], 0.0, epsilon = 1e-12);
        assert_relative_eq!(op.uncertainty(), 0.2, epsilon = 1e-12);
    }

    #[test]
    fn dogmatic_has_no_finite_evidence() {
        let op = Opinion::dogmatic(vec![0.4, 0.6]).unwrap();
        assert_eq!(op.evidence(), Err(SlError::DogmaticEvidence));
        assert!(op.evidence_amount().is_infinite());
    }

    #[test]
    fn evidence_rejects_negative_counts() {
        assert!(EvidenceVector::new(vec![-1.0, 2.0], 2.0).is_err());
        assert!(EvidenceVector::new(vec![1.0, 2.0], 0.0).is_err());
    }
}
