//! Rotation-invariant domains: monomial sup norms, the Chebyshev transform,
//! Azukawa indicators (slice form and scale-and-limit form), sublevel-body
//! volumes, and the kernel bounds they certify.
//!
//! Run with `cargo run --example chebyshev_bodies`.

use okrwn::chebyshev::{
    azukawa_1_explicit, azukawa_n, chain_report, chebyshev_body, monomial_sup_norm,
    LogHalfspace, ReinhardtDomain,
};
use okrwn::valuations::{Exponent, WeightMatrix};

fn main() -> Result<(), okrwn::Error> {
    let unweighted = WeightMatrix::straightened_up(2);

    let ball = ReinhardtDomain::ball(2, 1.0)?;
    let pd = ReinhardtDomain::polydisc(&[2.0, 3.0])?;
    println!("monomial sup norms:");
    println!("  |z1 z2| on the unit ball:        {:.6}", monomial_sup_norm(&ball, &Exponent(vec![1, 1]))?);
    println!("  |z1 z2^2| on the (2,3) polydisc: {:.6}", monomial_sup_norm(&pd, &Exponent(vec![1, 2]))?);

    println!("\nAzukawa indicator at xi = (0.4, 0.4):");
    println!("  ball (slice form):      {:.8}", azukawa_n(&ball, &unweighted, &[0.4, 0.4])?);
    println!("  closed form log(2 c^2): {:.8}", (2.0 * 0.4f64 * 0.4).ln());
    let a1 = azukawa_1_explicit(&ball, &[1, 1])?;
    let (limit, gap) = a1.value(&[0.4, 0.4])?;
    println!("  scale-and-limit form:   {limit:.8} (two-scale gap {gap:.1e})");

    println!("\nsublevel bodies and kernel bounds:");
    for (name, domain) in [
        ("unit polydisc n=2", ReinhardtDomain::polydisc(&[1.0, 1.0])?),
        ("unit ball n=2    ", ReinhardtDomain::ball(2, 1.0)?),
        ("unit ball n=3    ", ReinhardtDomain::ball(3, 1.0)?),
    ] {
        let n = domain.dimension();
        let beta = WeightMatrix::straightened_up(n);
        let rep = chebyshev_body(&domain, &beta)?;
        println!(
            "  {name}: volume {:.8}, bound {:.8}, exact kernel {:.8}",
            rep.volume,
            rep.bergman_bound,
            rep.exact_kernel.unwrap()
        );
    }

    // both computable ends of the volume chain coincide on an anisotropic
    // halfspace domain: the rotation-invariant case is the sharp one
    let hs = ReinhardtDomain::log_halfspaces(
        2,
        vec![
            LogHalfspace { normal: vec![1.0, 0.0], offset: 0.0 },
            LogHalfspace { normal: vec![0.0, 1.0], offset: 0.0 },
            LogHalfspace { normal: vec![2.0, 1.0], offset: (0.25f64).ln() },
        ],
    )?;
    let chain = chain_report(&hs, &unweighted)?;
    println!("\nanisotropic halfspace domain chain:");
    println!("  minimal extension norm: {:.8}", chain.minimal_extension_norm);
    println!("  final body volume:      {:.8}", chain.final_body_volume);
    println!("  slack:                  {:.2e}", chain.slack);
    Ok(())
}
