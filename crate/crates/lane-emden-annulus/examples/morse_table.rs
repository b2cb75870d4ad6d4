//! Morse indices of nodal radial solutions across the exponent range.
//!
//! Counting negative directions of the full linearization reduces to the
//! radial eigenvalues: each nu_l < 0 contributes the harmonic orders j
//! with -j(N-2+j) > nu_l, i.e. j < J_l, weighted by the dimension of the
//! degree-j harmonic space. The index therefore jumps by that dimension
//! at every degeneracy crossing and never falls below (m-1)(N+1) + 1.

use lane_emden_annulus::{morse_index_at, AnnulusSpec, DegeneracyOptions};

fn main() -> lane_emden_annulus::Result<()> {
    let opts = DegeneracyOptions::default();

    for dim in [2u32, 3] {
        let spec = AnnulusSpec::new(1.0, 2.0, dim)?;
        println!("A(1, 2) in R^{dim}:");
        println!(
            "{:>6} {:>3} {:>8} {:>8} {:<24}",
            "p", "m", "index", "bound", "J_l"
        );
        for m in [1usize, 2] {
            for p in [1.5, 2.0, 3.0, 5.0] {
                let rep = morse_index_at(spec, m, p, &opts)?;
                let js: Vec<String> = rep.j_values.iter().map(|j| format!("{j:.4}")).collect();
                println!(
                    "{p:>6} {m:>3} {:>8} {:>8} {:<24}{}",
                    rep.morse_index,
                    rep.lower_bound,
                    js.join(", "),
                    if rep.degenerate_boundary { "  [at a crossing]" } else { "" }
                );
                assert!(rep.morse_index >= rep.lower_bound);
            }
        }
        println!();
    }
    println!("every index sits on or above the (m-1)(N+1) + 1 bound");
    Ok(())
}
