//! Valuation vectors and the convex bodies they accumulate into: weighted
//! orders, flag valuations, homogenization, the exact volume identity, and
//! interior certificates at lattice boundary cases.
//!
//! Run with `cargo run --example okounkov_bodies`.

use okrwn::okounkov::{
    accumulate_body, interior_certificate, volume_identity_check, BodySource, ValuationSample,
};
use okrwn::valuations::{
    beta_valuation, flag_valuation, homogenize, FlagSpec, SparsePolynomial, WeightMatrix,
};
use okrwn::valuations::Exponent;

fn main() -> Result<(), okrwn::Error> {
    // one polynomial, three valuations
    let f = SparsePolynomial::from_int_terms(2, &[(1, &[2, 1]), (1, &[1, 3])])?;
    let lex = WeightMatrix::identity(2);
    let straightened = WeightMatrix::straightened_up(2);
    println!("f = z1^2 z2 + z1 z2^3:");
    println!("  lex valuation:            {:?}", beta_valuation(&f, &lex)?.0);
    println!("  straightened-up valuation: {:?}", beta_valuation(&f, &straightened)?.0);
    println!("  flag valuation:           {:?}", flag_valuation(&f, &FlagSpec::identity(2))?);
    let h = homogenize(&f, &[1, 0])?;
    println!("  leading part along z1:    {:?}", h.terms().iter().map(|(_, e)| e.clone()).collect::<Vec<_>>());

    // bodies of plane models: lattice sections of the dilated simplex
    println!("\nbodies of plane models (degree d, power 1):");
    for d in [1u32, 2, 3, 5] {
        let mut samples = Vec::new();
        for i in 0..=d {
            for j in 0..=(d - i) {
                samples.push(ValuationSample::new(1, Exponent(vec![i, j]))?);
            }
        }
        let body = accumulate_body(&samples, 1, BodySource::Flag(vec![0, 1]))?;
        let report = volume_identity_check(&body, (d * d) as f64)?;
        let interior = interior_certificate(&body, &[1.0, 1.0], 0.0)?;
        println!(
            "  d = {d}: volume {} = d^2/2 exactly: {}, (1,1) interior: {interior}",
            report.volume, report.exact
        );
    }
    println!("\nthe d = 2 case is the boundary: (1,1) sits on the edge and is");
    println!("rejected exactly, matching the absence of twist sections there");
    Ok(())
}
