//! End-to-end extension estimate on the degree-4 line model: the quadrature
//! Gram family of the linear curve, its jumping spectrum against the
//! multiplier prediction, and the minimal-class-norm bound with its
//! sharpness probe on a flat family.
//!
//! Run with `cargo run --example extension_estimate`.

use okrwn::filtration::{
    cvec, diagonal_spectrum, extension_verify, jumping_spectrum, DiagonalFamily, GramFamily,
};
use okrwn::toric::{radial_gram_family, RadialTestCurve, ToricModel};

fn main() -> Result<(), okrwn::Error> {
    let model = ToricModel::p1_fubini_study(4)?;

    // spectrum of the weighted norms under the linear curve, lambda = 2.5:
    // the decay of the monomial z^j dz is min(j + 1, lambda)
    let fam = radial_gram_family(&model, RadialTestCurve::LinearGreen { lambda: 2.5 }, &[1.0, 20.0])?;
    let spectrum = jumping_spectrum(&fam, 30.0)?;
    println!("jumping numbers of the lambda = 2.5 family (predicted 1, 2, 2.5):");
    for j in &spectrum.jumps {
        println!("  {:.4} (multiplicity {})", j.alpha, j.multiplicity);
    }

    // the extension estimate with the lambda = 1 curve
    let fam = radial_gram_family(&model, RadialTestCurve::LinearGreen { lambda: 1.0 }, &[1.0, 30.0])?;
    let spectrum = jumping_spectrum(&fam, 30.0)?;
    println!("\nextension estimate, minimal class norm <= asymptotic bound:");
    for alpha in [0.25, 0.5, 0.75] {
        for j in 0..3usize {
            let mut coeff = vec![0.0; 3];
            coeff[j] = 1.0;
            let rep = extension_verify(&fam, &spectrum, &cvec(&coeff), alpha, 60.0)?;
            println!(
                "  alpha = {alpha}, section z^{j}: lhs {:.3e}, rhs {:.3e}, slack {:+.3e}",
                rep.lhs, rep.rhs, rep.slack
            );
        }
    }

    // sharpness at the first jump of a flat family: the bound is attained
    let flat = GramFamily::Diagonal(DiagonalFamily::rotated_2d(0.3, [1.0, 2.5]));
    let fspec = diagonal_spectrum(flat.as_diagonal()?);
    let b = flat.as_diagonal()?.basis().clone();
    let probe = okrwn::filtration::CVec::from_fn(2, |i, _| b[(i, 0)] + b[(i, 1)]);
    let rep = extension_verify(&flat, &fspec, &probe, fspec.jumps[0].alpha, 60.0)?;
    println!(
        "\nflat family at its first jump {:.2}: lhs {:.6}, rhs {:.6}, slack {:+.1e}",
        fspec.jumps[0].alpha, rep.lhs, rep.rhs, rep.slack
    );
    Ok(())
}
