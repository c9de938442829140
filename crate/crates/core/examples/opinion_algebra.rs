//! Evidence, fusion, unfusion, trust discounting and conflict on a
//! three-event domain.

use sltrack::sl::{degree_of_conflict, fuse_acbf, projected_distance, trust_discount, unfuse, EvidenceVector, Opinion};

fn show(name: &str, o: &Opinion) {
    let b: Vec<String> = o.belief().iter().map(|x| format!("{x:.3}")).collect();
    let p: Vec<String> = o.project().iter().map(|x| format!("{x:.3}")).collect();
    println!(
        "{name:>12}: b=[{}] u={:.3} P=[{}] evidence={:.1}",
        b.join(", "),
        o.uncertainty(),
        p.join(", "),
        o.evidence_amount()
    );
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = vec![1.0 / 3.0; 3];
    let a = Opinion::from_evidence(&EvidenceVector::with_default_prior(vec![6.0, 2.0, 2.0])?, base.clone())?;
    let b = Opinion::from_evidence(&EvidenceVector::with_default_prior(vec![1.0, 1.0, 8.0])?, base.clone())?;
    show("a", &a);
    show("b", &b);

    let ab = fuse_acbf(&a, &b)?;
    show("a+b", &ab);
    // fusion adds evidence, unfusion takes it back out
    let back = unfuse(&ab, &b, &base)?;
    show("(a+b)-b", &back);

    for p in [1.0, 0.99, 0.9, 0.5] {
        show(&format!("TD(a, {p})"), &trust_discount(&a, p)?);
    }

    println!("PD(a, b) = {:.4}", projected_distance(&a, &b)?);
    println!("DC(a, b) = {:.4}", degree_of_conflict(&a, &b)?);
    println!("DC(a, a) = {:.4}", degree_of_conflict(&a, &a)?);
    let vac = Opinion::vacuous(base)?;
    println!("DC(a, vacuous) = {:.4}", degree_of_conflict(&a, &vac)?);
    Ok(())
}
