//! The two ends of the exponent range.
//!
//! As p decreases to 1 the m-zone solution collapses onto the m-th radial
//! Dirichlet eigenfunction of the Laplacian: sup|u|^(p-1) approaches
//! lambda_m, the normalized profile approaches +/- psi_m, and the top
//! negative eigenvalue nu_m of the linearization fades to zero. For large
//! p the same nu_m is pushed below (1-p) a^2 lambda_1, so it cannot
//! vanish; degeneracy can only come from harmonic crossings.

use lane_emden_annulus::{
    laplace_radial_eigen, large_p_bound_check, p_to_1_diagnostics, AnnulusSpec,
    AsymptoticsOptions,
};

fn main() -> lane_emden_annulus::Result<()> {
    let spec = AnnulusSpec::new(1.0, 2.0, 2)?;
    let m = 2;
    let opts = AsymptoticsOptions::default();

    let pair = laplace_radial_eigen(spec, m, &opts)?;
    println!("lambda_{m} on A(1, 2) = {:.12e}\n", pair.lambda);

    println!("linear limit, p -> 1:");
    println!(
        "{:>7} {:>20} {:>12} {:>14}",
        "p", "sup|u|^(p-1)", "|shape err|", "nu_m"
    );
    for row in p_to_1_diagnostics(spec, m, &[1.1, 1.01, 1.001], &opts)? {
        println!(
            "{:>7} {:>20.12e} {:>12.3e} {:>14.6e}",
            row.p, row.supnorm_pow, row.err_profile, row.nu_m
        );
    }

    println!("\nlarge p, bound nu_m <= (1-p) a^2 lambda_1:");
    println!("{:>5} {:>18} {:>18} {:>14}", "p", "nu_m", "bound", "margin");
    for row in large_p_bound_check(spec, m, &[2.0, 5.0, 10.0, 20.0], &opts)? {
        println!(
            "{:>5} {:>18.9e} {:>18.9e} {:>14.6e}",
            row.p, row.nu_m, row.bound, row.margin
        );
        assert!(row.margin >= 0.0, "bound violated at p = {}", row.p);
    }
    Ok(())
}
