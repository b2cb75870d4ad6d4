//! Radial spectrum of the linearized operator at a nodal profile.
//!
//! The weighted pencil -(r^(N-1) w')' - p r^(N-1) |v|^(p-1) w = nu r^(N-3) w
//! with Dirichlet ends carries the stability structure of the solution: an
//! m-zone profile shows exactly m negative eigenvalues, the first m - 1 of
//! them below -(N-1), and everything from nu_(m+1) on positive. The l-th
//! eigenfunction changes sign l - 1 times.

use lane_emden_annulus::{mode_slice, shoot_nodal, AnnulusSpec, RadialOptions, SpectrumOptions};

fn main() -> lane_emden_annulus::Result<()> {
    let spec = AnnulusSpec::new(1.0, 2.0, 2)?;
    let m = 3;
    let opts = SpectrumOptions::default();

    for p in [1.5, 3.0, 7.0] {
        let prof = shoot_nodal(spec, p, m, &RadialOptions::default())?;
        let slice = mode_slice(&prof, &opts)?;
        println!("p = {p}, m = {m}:");
        for (l, mode) in slice.modes.iter().enumerate() {
            let marker = if mode.nu < -(spec.dim as f64 - 1.0) {
                "< -(N-1)"
            } else if mode.nu < 0.0 {
                "in (-(N-1), 0)"
            } else {
                "positive"
            };
            println!(
                "  nu_{} = {:>22.14e}  [{} sign changes, {marker}]",
                l + 1,
                mode.nu,
                mode.sign_changes
            );
        }
        println!(
            "  negatives: {} of {} computed\n",
            slice.count_below(0.0),
            slice.modes.len()
        );
    }
    Ok(())
}
