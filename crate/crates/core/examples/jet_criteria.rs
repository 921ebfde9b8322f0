//! Jet-generation criteria: the reciprocal-sum test on successive minima,
//! its simplex body, and the sharpness table against the twist facts on
//! projective spaces.
//!
//! Run with `cargo run --example jet_criteria`.

use okrwn::okounkov::{criterion_e, jet_certificate, BodySource, OkounkovBody, SuccessiveMinima};

fn main() -> Result<(), okrwn::Error> {
    // equal minima (d, ..., d) in dimension n: the criterion is d > k + n
    println!("criterion table for equal minima, entries 'holds/sharp':");
    for n in 1..=3usize {
        for k in 0..=2u32 {
            print!("  n={n} k={k}:");
            for d in 1..=8u32 {
                let minima = SuccessiveMinima::new(vec![d as f64; n])?;
                let out = criterion_e(&minima, k)?;
                let fact = d >= k + n as u32 + 1;
                print!(" {}{}", if out.holds { "T" } else { "." }, if out.holds == fact { "" } else { "!" });
            }
            println!();
        }
    }
    println!("  (T at degree >= k+n+1 exactly; no '!' means every entry is sharp)");

    // anisotropic minima and the simplex they span
    let minima = SuccessiveMinima::new(vec![2.0, 4.0])?;
    let out = criterion_e(&minima, 0)?;
    println!(
        "\nminima (2,4), zero jets: reciprocal sum {:.4}, criterion {}",
        out.reciprocal_sum, out.holds
    );
    println!("simplex vertices: {:?}", out.simplex.vertices_f64());

    // when the criterion holds, the jet points sit inside the simplex
    if out.holds {
        let wrapped = OkounkovBody {
            body: out.simplex.clone(),
            k_max: 1,
            source: BodySource::Unspecified,
            degenerate: false,
        };
        println!(
            "jet certificate on the simplex at vanishing margin: {}",
            jet_certificate(&wrapped, 0, 1e-9)?
        );
    }
    Ok(())
}
