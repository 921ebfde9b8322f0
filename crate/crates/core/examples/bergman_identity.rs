//! Toric integrals with certified tails and the kernel fixed-point
//! identity `K(0) * Int e^{-phi} = 1`, including the divergence report when
//! the shift leaves the gradient image.
//!
//! Run with `cargo run --example bergman_identity`.

use okrwn::toric::{bergman_fixed_point_check, toric_integral_grid, toric_integral_model, ToricModel};
use okrwn::Error;

fn main() -> Result<(), Error> {
    let model = ToricModel::p1_fubini_study(2)?;
    let adaptive = toric_integral_model(&model, &[1.0])?;
    let grid = toric_integral_grid(&model.phi_grid, &[1.0])?;
    println!("(2 pi) Int e^(-2 log(1+e^y) + y) dy:");
    println!("  adaptive route: {:.10} (tail bound {:.2e})", adaptive.value, adaptive.truncation_bound);
    println!("  grid route:     {:.10}", grid.value);
    println!("  2 pi:           {:.10}", 2.0 * std::f64::consts::PI);

    println!("\nkernel fixed-point identity K(0) * Int e^-phi = 1:");
    for (name, model) in [
        ("line, degree 2", ToricModel::p1_fubini_study(2)?),
        ("line, degree 4", ToricModel::p1_fubini_study(4)?),
        ("product, 2 x 2 ", ToricModel::product_fubini_study(&[2, 2])?),
    ] {
        let rep = bergman_fixed_point_check(&model)?;
        println!(
            "  {name}: K(0) = {:.8}, integral = {:.8}, product = {:.12}",
            rep.kernel_at_origin, rep.weight_integral, rep.product
        );
    }

    // a boundary shift is a certified divergence, not a number
    let plane = ToricModel::fubini_study(2, 2)?;
    match toric_integral_model(&plane, &[1.0, 1.0]) {
        Err(Error::Divergent(reason)) => println!("\nboundary shift on the degree-2 plane model: {reason}"),
        other => println!("\nunexpected outcome: {other:?}"),
    }
    Ok(())
}
