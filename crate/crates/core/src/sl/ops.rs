use super::{Opinion, SlError, NEGATIVE_BELIEF_FLOOR};

fn same_domain(a: &Opinion, b: &Opinion) -> Result<(), SlError> {
    if a.cardinality() != b.cardinality() {
        return Err(SlError::DomainMismatch { left: a.cardinality(), right: b.cardinality() });
    }
    Ok(())
}

fn average(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(p, q)| 0.5 * (p + q)).collect()
}

/// Aleatory cumulative belief fusion `A ⊕ B`.
///
/// Two dogmatic inputs fuse to the average of their beliefs; two vacuous
/// inputs fuse to a vacuous opinion with the averaged base rate.
pub fn fuse_acbf(a: &Opinion, b: &Opinion) -> Result<Opinion, SlError> {
    same_domain(a, b)?;
    let (ua, ub) = (a.uncertainty(), b.uncertainty());

    if ua == 0.0 && ub == 0.0 {
        let belief = average(a.belief(), b.belief());
        let base = average(a.base_rate(), b.base_rate());
        return Ok(Opinion::from_parts_unchecked(belief, 0.0, base));
    }
    if ua == 1.0 && ub == 1.0 {
        let w = a.cardinality();
        let base = average(a.base_rate(), b.base_rate());
        return Ok(Opinion::from_parts_unchecked(vec![0.0; w], 1.0, base));
    }

    let denom = ua + ub - ua * ub;
    let belief = a.belief().iter().zip(b.belief()).map(|(ba, bb)| (ba * ub + bb * ua) / denom).collect();
    let uncertainty = ua * ub / denom;
    let rate_denom = ua + ub - 2.0 * ua * ub;
    let base_rate = a
        .base_rate()
        .iter()
        .zip(b.base_rate())
        .map(|(aa, ab)| (aa * ub + ab * ua - (aa + ab) * ua * ub) / rate_denom)
        .collect();
    Ok(Opinion::from_parts_unchecked(belief, uncertainty, base_rate))
}

/// Cumulative unfusion: removes the known constituent `b` from the fused
/// opinion `c`. The result carries `shared_base_rate`.
pub fn unfuse(c: &Opinion, b: &Opinion, shared_base_rate: &[f64]) -> Result<Opinion, SlError> {
    same_domain(c, b)?;
    if shared_base_rate.len() != c.cardinality() {
        return Err(SlError::DomainMismatch { left: c.cardinality(), right: shared_base_rate.len() });
    }
    let (uc, ub) = (c.uncertainty(), b.uncertainty());
    let denom = ub - uc + ub * uc;
    if (uc == 0.0 && ub == 0.0) || denom.abs() < 1e-15 {
        return Err(SlError::DegenerateUnfusion);
    }

    let mut belief: Vec<f64> = c.belief().iter().zip(b.belief()).map(|(bc, bb)| (bc * ub - bb * uc) / denom).collect();
    let mut uncertainty = ub * uc / denom;

    let mut clamped = false;
    for x in belief.iter_mut() {
        if *x < 0.0 {
            if *x < NEGATIVE_BELIEF_FLOOR {
                return Err(SlError::NegativeBelief(*x));
            }
            *x = 0.0;
            clamped = true;
        }
    }
    if !(0.0..=1.0 + 1e-12).contains(&uncertainty) {
        return Err(SlError::NegativeBelief(1.0 - uncertainty));
    }
    if clamped || uncertainty > 1.0 {
        uncertainty = uncertainty.min(1.0);
        let total = belief.iter().sum::<f64>() + uncertainty;
        belief.iter_mut().for_each(|x| *x /= total);
        uncertainty /= total;
    }
    Opinion::try_new(belief, uncertainty, shared_base_rate.to_vec())
}

/// Trust discounting with probability `p_td`: beliefs shrink towards
/// uncertainty, the base rate is untouched.
pub fn trust_discount(a: &Opinion, p_td: f64) -> Result<Opinion, SlError> {
    if !(0.0..=1.0).contains(&p_td) {
        return Err(SlError::DiscountOutOfRange(p_td));
    }
    if p_td == 1.0 {
        return Ok(a.clone());
    }
    let belief: Vec<f64> = a.belief().iter().map(|b| p_td * b).collect();
    let mass: f64 = a.belief().iter().sum();
    Ok(Opinion::from_parts_unchecked(belief, 1.0 - p_td * mass, a.base_rate().to_vec()))
}

/// Half the L1 distance between the projected probabilities.
pub fn projected_distance(a: &Opinion, b: &Opinion) -> Result<f64, SlError> {
    same_domain(a, b)?;
    let pd = a.project().iter().zip(b.project()).map(|(p, q)| (p - q).abs()).sum::<f64>() * 0.5;
    Ok(pd.clamp(0.0, 1.0))
}

/// Degree of conflict `DC = PD · CC` with conjunctive certainty
/// `CC = (1 − u_A)(1 − u_B)`.
pub fn degree_of_conflict(a: &Opinion, b: &Opinion) -> Result<f64, SlError> {
    let pd = projected_distance(a, b)?;
    let cc = (1.0 - a.uncertainty()) * (1.0 - b.uncertainty());
    Ok((pd * cc).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl::EvidenceVector;
    use approx::assert_relative_eq;

    fn op(b: &[f64], u: f64, a: &[f64]) -> Opinion {
        Opinion::try_new(b.to_vec(), u, a.to_vec()).unwrap()
    }

    fn from_counts(c: &[f64]) -> Opinion {
        let ev = EvidenceVector::with_default_prior(c.to_vec()).unwrap();
        let w = c.len();
        Opinion::from_evidence(&ev, vec![1.0 / w as f64; w]).unwrap()
    }

    fn assert_same(x: &Opinion, y: &Opinion) {
        for (p, q) in x.belief().iter().zip(y.belief()) {
            assert_relative_eq!(p, q, epsilon = 1e-9);
        }
        assert_relative_eq!(x.uncertainty(), y.uncertainty(), epsilon = 1e-9);
    }

    #[test]
    fn symmetric_fusion_example() {
        let a = op(&[0.5, 0.0], 0.5, &[0.5, 0.5]);
        let b = op(&[0.0, 0.5], 0.5, &[0.5, 0.5]);
        let f = fuse_acbf(&a, &b).unwrap();
        assert_relative_eq!(f.belief()[0], 1.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(f.belief()[1], 1.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(f.uncertainty(), 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn vacuous_is_neutral() {
        let b = op(&[0.2, 0.3], 0.5, &[0.4, 0.6]);
        let vac = Opinion::vacuous(vec![0.4, 0.6]).unwrap();
        assert_same(&fuse_acbf(&vac, &b).unwrap(), &b);
        assert_same(&fuse_acbf(&b, &vac).unwrap(), &b);
    }

    #[test]
    fn fusion_adds_evidence() {
        let f = fuse_acbf(&from_counts(&[3.0, 1.0]), &from_counts(&[1.0, 2.0])).unwrap();
        assert_same(&f, &from_counts(&[4.0, 3.0]));
    }

    #[test]
    fn fusion_corner_cases() {
        let a = Opinion::dogmatic(vec![1.0, 0.0]).unwrap();
        let b = Opinion::dogmatic(vec![0.0, 1.0]).unwrap();
        let f = fuse_acbf(&a, &b).unwrap();
        assert_eq!(f.belief(), &[0.5, 0.5]);
        assert_eq!(f.uncertainty(), 0.0);

        let va = Opinion::vacuous(vec![0.2, 0.8]).unwrap();
        let vb = Opinion::vacuous(vec![0.6, 0.4]).unwrap();
        let f = fuse_acbf(&va, &vb).unwrap();
        assert!(f.is_vacuous());
        assert_relative_eq!(f.base_rate()[0], 0.4, epsilon = 1e-12);
    }

    #[test]
    fn fusion_domain_mismatch() {
        let a = from_counts(&[1.0, 1.0]);
        let b = from_counts(&[1.0, 1.0, 1.0]);
        assert!(matches!(fuse_acbf(&a, &b), Err(SlError::DomainMismatch { .. })));
        assert!(degree_of_conflict(&a, &b).is_err());
    }

    #[test]
    fn unfusion_examples() {
        let a = op(&[0.3, 0.2], 0.5, &[0.5, 0.5]);
        let b = op(&[0.1, 0.4], 0.5, &[0.5, 0.5]);
        let c = fuse_acbf(&a, &b).unwrap();
        assert_same(&unfuse(&c, &b, &[0.5, 0.5]).unwrap(), &a);

        let vac = Opinion::vacuous(vec![0.5, 0.5]).unwrap();
        assert_same(&unfuse(&c, &vac, &[0.5, 0.5]).unwrap(), &c);

        let r = unfuse(&from_counts(&[4.0, 3.0]), &from_counts(&[1.0, 2.0]), &[0.5, 0.5]).unwrap();
        assert_same(&r, &from_counts(&[3.0, 1.0]));
    }

    #[test]
    fn unfusion_errors() {
        let d = Opinion::dogmatic(vec![0.5, 0.5]).unwrap();
        assert_eq!(unfuse(&d, &d, &[0.5, 0.5]), Err(SlError::DegenerateUnfusion));
        // removing more evidence than was ever fused
        let small = from_counts(&[1.0, 0.0]);
        let large = from_counts(&[5.0, 5.0]);
        assert!(matches!(unfuse(&small, &large, &[0.5, 0.5]), Err(SlError::NegativeBelief(_))));
    }

    #[test]
    fn unfusion_clamps_round_off() {
        // counts (2, 0) minus (2, 0) leaves exactly zero belief in slot 0
        let c = from_counts(&[2.0, 1.0]);
        let b = from_counts(&[2.0, 0.0]);
        let r = unfuse(&c, &b, &[0.5, 0.5]).unwrap();
        assert!(r.belief()[0] >= 0.0);
        assert_same(&r, &from_counts(&[0.0, 1.0]));
    }

    #[test]
    fn trust_discount_examples() {
        let a = op(&[0.6, 0.2], 0.2, &[0.5, 0.5]);
        let d = trust_discount(&a, 0.9).unwrap();
        assert_relative_eq!(d.belief()[0], 0.54, epsilon = 1e-12);
        assert_relative_eq!(d.belief()[1], 0.18, epsilon = 1e-12);
        assert_relative_eq!(d.uncertainty(), 0.28, epsilon = 1e-12);
        assert_eq!(trust_discount(&a, 1.0).unwrap(), a);
        assert!(trust_discount(&a, 0.0).unwrap().is_vacuous());
        assert!(trust_discount(&a, 1.1).is_err());
        assert!(trust_discount(&a, -0.1).is_err());
    }

    #[test]
    fn conflict_examples() {
        let a = op(&[0.2, 0.5], 0.3, &[0.3, 0.7]);
        assert_eq!(degree_of_conflict(&a, &a).unwrap(), 0.0);

        let x = Opinion::dogmatic(vec![1.0, 0.0]).unwrap();
        let y = Opinion::dogmatic(vec![0.0, 1.0]).unwrap();
        assert_relative_eq!(degree_of_conflict(&x, &y).unwrap(), 1.0, epsilon = 1e-15);

        let b = op(&[0.0, 0.5], 0.5, &[0.5, 0.5]);
        assert_relative_eq!(projected_distance(&x, &b).unwrap(), 0.75, epsilon = 1e-12);
        assert_relative_eq!(degree_of_conflict(&x, &b).unwrap(), 0.375, epsilon = 1e-12);
        // independent scalar route: P_B = (0.25, 0.75)
        let pd = 0.5 * ((1.0_f64 - 0.25).abs() + (0.0_f64 - 0.75).abs());
        assert_relative_eq!(degree_of_conflict(&x, &b).unwrap(), pd * 1.0 * 0.5, epsilon = 1e-12);
    }
}
