//! Discrete Legendre-Fenchel machinery on grids: full conjugates with
//! validity windows, the two partial transforms, and gradient-image bodies.
//!
//! Run with `cargo run --example legendre_transforms`.

use okrwn::ext_real::Finite;
use okrwn::grid::{Grid1D, GridFunctionND};
use okrwn::transforms::{
    gradient_image_body, inf_rows, legendre_conjugate, sup_rows,
};

fn main() -> Result<(), okrwn::Error> {
    // conjugate of the soft-plus weight 2 log(1 + e^y)
    let primal = Grid1D::new(-8.0, 8.0, 321)?;
    let f = GridFunctionND::tabulate(vec![primal], |y| {
        Finite(2.0 * (1.0 + y[0].exp()).ln())
    })?;
    let conj = legendre_conjugate(&f, &[Grid1D::new(0.1, 1.9, 19)?])?;
    println!("conjugate of 2 log(1+e^y):");
    println!("  slope window {:?}", conj.slope_window[0]);
    let g1 = conj.values.value(&[9]).finite().unwrap(); // dual node a = 1
    println!("  g(1) = {g1:.10}  (closed form -2 log 2 = {:.10})", -2.0 * 2.0f64.ln());

    // a linear curve v_a = a G hat-transforms to the hinge ray
    let alpha = Grid1D::new(-1.0, 1.0, 201)?;
    let curve: Vec<_> = alpha
        .nodes()
        .map(|a| Finite(if a <= 0.0 { 0.0 } else { -a }))
        .collect();
    let t = Grid1D::new(1e-3, 4.0, 201)?;
    let ray = sup_rows(&[curve], &alpha, &t)?;
    let i = t.nearest(2.0);
    println!("\nhinge transform of the linear curve (G = -1, lambda = 1):");
    println!("  u(2) = {:.6}  (expect max(2-1, 0) = 1)", ray[0][i].to_f64());

    // and the inverse transform recovers the curve
    let back = inf_rows(&ray, &t, &alpha)?;
    let j = alpha.nearest(0.5);
    println!("  recovered v(0.5) = {:.6}  (expect -0.5)", back[0][j].to_f64());

    // the gradient image of the weight is the underlying polytope
    let body = gradient_image_body(&f)?;
    let vs = body.vertices_f64();
    println!("\ngradient image of the weight (slopes live in (0, 2)):");
    println!("  interval [{:.4}, {:.4}]", vs[0][0], vs[vs.len() - 1][0]);
    Ok(())
}
