//! The correspondence between test curves and subgeodesic rays: the
//! explicit sphere family, both transforms, the round-trip defect at two
//! resolutions, and critical-value invariance.
//!
//! Run with `cargo run --example curve_ray_roundtrip`.

use okrwn::grid::Grid1D;
use okrwn::rwn::{
    sharp_curve_value, sharp_ray_value, check_transform, hat_transform, roundtrip_defect,
    sphere_sharp_family, SphereModel,
};

fn main() -> Result<(), okrwn::Error> {
    let model = SphereModel::new(24, 3.0)?;

    for nodes in [201usize, 401] {
        let alpha_grid = Grid1D::new(-1.0, 2.5, nodes)?;
        let t_grid = Grid1D::new(1e-3, 30.0, nodes)?;
        let curve = sphere_sharp_family(&model, alpha_grid)?;
        let defect = roundtrip_defect(&curve, t_grid)?;
        println!("round trip at {nodes}x{nodes}: defect {defect:.3e}");
    }

    let alpha_grid = Grid1D::new(-1.0, 2.5, 351)?;
    let curve = sphere_sharp_family(&model, alpha_grid)?;
    let lam_v = curve.critical_value();
    println!(
        "critical value of the curve: {:.4} +/- {:.4}",
        lam_v.value.to_f64(),
        lam_v.uncertainty
    );

    let ray = hat_transform(&curve, Grid1D::new(1e-3, 30.0, 401)?)?;
    let lam_u = ray.critical_value();
    println!(
        "terminal slope of its ray:   {:.4} (converged: {})",
        lam_u.value, lam_u.converged
    );

    // closed forms at one sample: E = 1
    println!("\nclosed forms at E = 1:");
    println!("  v(2)  = {:.6} (branch formula)", sharp_curve_value(1.0, 2.0).to_f64());
    println!("  u(3)  = {:.6} (2 log((1+e^3)/2))", sharp_ray_value(1.0, 3.0));

    // check-transform of the ray reproduces the curve family
    let back = check_transform(&ray, alpha_grid)?;
    let j = alpha_grid.nearest(1.0);
    println!(
        "  curve vs check(hat(curve)) at a=1, first radius: {:.6} vs {:.6}",
        curve.values[0][j].to_f64(),
        back.values[0][j].to_f64()
    );
    Ok(())
}
