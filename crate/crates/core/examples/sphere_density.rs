//! Sharp constants on the round sphere: the rescaled density integral, its
//! limit against 4 pi, and the section-count equality at the anticanonical
//! degree.
//!
//! Run with `cargo run --example sphere_density`.

use okrwn::rwn::{sphere_density_bound, SphereModel};
use okrwn::toric::{p1_twist_dimension, sections_basis, ToricModel};

fn main() -> Result<(), okrwn::Error> {
    let model = SphereModel::new(60, 3.1)?;
    let report = sphere_density_bound(&model)?;
    println!("rescaled density integral e^t Int e^-phi (1+E)^2/(1+e^t E)^2:");
    for (t, v) in &report.samples {
        println!("  t = {t:>4}: {v:.10}");
    }
    println!("limit:        {:.10}", report.limit);
    println!("4 pi:         {:.10}", report.constant_4pi);
    println!("ratio:        {:.10}  (the weight-form density at the base point)", report.ratio);

    // the degree-2 line bundle: twist dimension equals half the degree
    let d = 2u32;
    println!("\ndegree-{d} line model:");
    println!("  sections of the bundle itself: {}", sections_basis(&ToricModel::p1_fubini_study(d)?, 1)?.len());
    println!("  twist dimension {} = deg/2 = {}", p1_twist_dimension(d), d / 2);
    Ok(())
}
