//! The finite-dimensional calculus of decreasing norm families: dual
//! norms, jumping spectra, quotient traces, flat reduction, the twisted
//! eigenvalue invariance, and jet norms.
//!
//! Run with `cargo run --example norm_filtrations`.

use okrwn::filtration::{
    cvec, diagonal_spectrum, dual_norm_sq, eigenvalue_invariance_check, flat_reduction,
    jet_norm_sq, jumping_spectrum, quotient_trace, DiagonalFamily, GramFamily, JetInnerProduct,
    DEFAULT_HORIZON,
};

fn main() -> Result<(), okrwn::Error> {
    let fam = GramFamily::Diagonal(DiagonalFamily::rotated_2d(0.5, [1.0, 3.0]));

    println!("dual norm growth (rotated flat family, exponents 1 and 3):");
    for t in [0.0, 1.0, 2.0] {
        let v = dual_norm_sq(&fam, &cvec(&[1.0, 0.0]), t)?;
        println!("  |e1|_*^2 at t = {t}: {v:.6}");
    }

    let spectrum = jumping_spectrum(&fam, DEFAULT_HORIZON)?;
    println!("\njumping spectrum recovered from eigenvalue slopes:");
    for j in &spectrum.jumps {
        println!(
            "  alpha = {:.6} (multiplicity {}, window gap {:.1e})",
            j.alpha, j.multiplicity, j.window_gap
        );
    }

    // quotient traces never decrease between jumps
    let exact = diagonal_spectrum(fam.as_diagonal()?);
    let ts: Vec<f64> = (0..=10).map(|i| i as f64).collect();
    let b = fam.as_diagonal()?.basis().clone();
    let f = okrwn::filtration::CVec::from_fn(2, |i, _| b[(i, 0)] + b[(i, 1)]);
    let trace = quotient_trace(&fam, &exact, &f, 2.0, &ts)?;
    println!("\nquotient trace at alpha = 2 (between the jumps):");
    println!(
        "  first {:.6}, last {:.6}, worst relative drop {:.1e}",
        trace.samples[0].1,
        trace.samples.last().unwrap().1,
        trace.worst_relative_drop()
    );

    let red = flat_reduction(&fam)?;
    println!("\nflat reduction recovers the exponents: {:?}", red.lambda);

    let spread = eigenvalue_invariance_check(&fam, 2.0, &[0.0, 0.7, 1.4, 2.4, std::f64::consts::PI])?;
    println!("twisted eigenvalue spread across five phases: {spread:.2e}");

    let jet1 = jet_norm_sq(&fam, &f, 1, &JetInnerProduct::AtZero)?;
    let jet2 = jet_norm_sq(&fam, &f, 2, &JetInnerProduct::AtZero)?;
    println!("\njet norms of F = F1 + F2: level 1 = {jet1:.6}, through level 2 = {jet2:.6}");
    Ok(())
}
