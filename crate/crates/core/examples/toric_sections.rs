//! Toric models: monomial section bases over lattice polytopes, unit-sup
//! normalization through the conjugate, and the growth-condition identity
//! with its certified section bounds.
//!
//! Run with `cargo run --example toric_sections`.

use okrwn::toric::{growth_condition, normalized_section_check, sections_basis, ToricModel};
use okrwn::valuations::Exponent;

fn main() -> Result<(), okrwn::Error> {
    let model = ToricModel::p1_fubini_study(2)?;
    println!("degree-2 line model, weight 2 log(1 + e^y):");
    for k in 1..=3u32 {
        let basis = sections_basis(&model, k)?;
        let exps: Vec<u32> = basis.iter().map(|e| e.0[0]).collect();
        println!("  power {k}: exponents {exps:?}");
    }

    println!("\nunit-sup normalization (defect of sup |f^u|^2 e^(-k phi) vs 1):");
    for (u, k) in [(0u32, 1u32), (1, 1), (2, 1), (3, 2), (7, 4)] {
        let check = normalized_section_check(&model, &Exponent(vec![u]), k)?;
        println!(
            "  u = {u}, k = {k}: defect {:.2e}{}",
            check.defect,
            if check.boundary_supremum { "  (boundary supremum)" } else { "" }
        );
    }

    let report = growth_condition(&model)?;
    println!(
        "\ngrowth condition: {} section bounds certified, worst violation {:.2e}",
        report.sections_checked, report.max_violation
    );

    let plane = ToricModel::fubini_study(2, 1)?;
    let basis = sections_basis(&plane, 2)?;
    println!(
        "\nplane model, degree 1, power 2: {} lattice sections of the doubled simplex",
        basis.len()
    );
    Ok(())
}
