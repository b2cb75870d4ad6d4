//! Command-line front end over the solver pipeline.
//!
//! Six subcommands mirror the library's capabilities: `solve-radial`,
//! `spectrum`, `scan-degeneracy`, `morse`, `asymptotics`, `perturb`. Each
//! writes CSV tables (17 significant digits, fixed ordering, so repeated
//! runs diff byte-identically), a JSON sidecar embedding the invocation
//! parameters, and a `plot/` directory of two-column traces.
//!
//! The output directory comes from `--out`, falling back to the
//! `LANE_EMDEN_OUT` environment variable and then `./out`. Exit codes:
//! 0 success, 2 invalid input (bad flags or config), 3 numerical failure.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::annulus::AnnulusSpec;
use crate::asymptotics::{
    laplace_radial_eigen, large_p_bound_check, p_to_1_diagnostics, AsymptoticsOptions,
};
use crate::config::PerturbConfig;
use crate::degeneracy::{find_degeneracies, morse_index_at, DegeneracyOptions};
use crate::error::Result;
use crate::export::{row, write_csv, write_json, write_plot};
use crate::perturbed::{
    morse_index_2d_refined, newton_solve, nodal_count_2d, safety_bound, PolarGrid,
};
use crate::radial::{shoot_nodal, RadialOptions};
use crate::spectrum::{mode_slice, SpectrumOptions};

/// Environment variable holding the default output directory.
pub const OUT_ENV: &str = "LANE_EMDEN_OUT";

#[derive(Parser)]
#[command(
    name = "lane-emden-annulus",
    version,
    about = "Nodal solutions of -Δu = |u|^(p-1) u on annuli: profiles, spectra, degeneracies, deformations"
)]
struct Cli {
    /// Output directory for artifacts (default: $LANE_EMDEN_OUT, then ./out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Shoot the m-zone radial profile and export it.
    SolveRadial(SolveRadialArgs),
    /// Eigenvalues and eigenfunctions of the linearization at the profile.
    Spectrum(SpectrumArgs),
    /// Locate degeneracy exponents where an eigenvalue crosses a harmonic level.
    ScanDegeneracy(ScanArgs),
    /// Morse indices of radial profiles via the multiplicity sum.
    Morse(MorseArgs),
    /// Linear-limit and large-exponent diagnostics.
    Asymptotics(AsymptoticsArgs),
    /// Newton continuation onto a perturbed annulus from a config file.
    Perturb(PerturbArgs),
}

#[derive(Args, Serialize)]
struct DomainArgs {
    /// Inner radius.
    #[arg(long)]
    a: f64,
    /// Outer radius.
    #[arg(long)]
    b: f64,
    /// Space dimension.
    #[arg(long = "N", default_value_t = 2)]
    dim: u32,
}

impl DomainArgs {
    fn spec(&self) -> Result<AnnulusSpec> {
        AnnulusSpec::new(self.a, self.b, self.dim)
    }
}

#[derive(Args, Serialize)]
struct SolveRadialArgs {
    #[command(flatten)]
    dom: DomainArgs,
    /// Nonlinearity exponent (> 1).
    #[arg(long)]
    p: f64,
    /// Nodal zone count (>= 1).
    #[arg(long)]
    m: usize,
    /// Cells of the stored profile grid.
    #[arg(long, default_value_t = 2048)]
    intervals: usize,
}

#[derive(Args, Serialize)]
struct SpectrumArgs {
    #[command(flatten)]
    dom: DomainArgs,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    m: usize,
    /// Eigenpairs to compute (default m + 1).
    #[arg(long)]
    modes: Option<usize>,
    /// Discretization cells of the eigenproblem.
    #[arg(long, default_value_t = 4096)]
    intervals: usize,
}

#[derive(Args, Serialize)]
struct ScanArgs {
    #[command(flatten)]
    dom: DomainArgs,
    #[arg(long)]
    m: usize,
    #[arg(long = "p-min")]
    p_min: f64,
    #[arg(long = "p-max")]
    p_max: f64,
    /// Largest harmonic order to track.
    #[arg(long = "j-max", default_value_t = 3)]
    j_max: u32,
    /// Coarse sweep samples.
    #[arg(long, default_value_t = 64)]
    samples: usize,
    /// Double the sweep grid until the crossing count settles.
    #[arg(long)]
    stabilize: bool,
}

#[derive(Args, Serialize)]
struct MorseArgs {
    #[command(flatten)]
    dom: DomainArgs,
    #[arg(long)]
    m: usize,
    /// Exponents to evaluate, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<f64>,
    #[arg(long, default_value_t = 4096)]
    intervals: usize,
}

#[derive(Args, Serialize)]
struct AsymptoticsArgs {
    #[command(flatten)]
    dom: DomainArgs,
    #[arg(long)]
    m: usize,
    /// Exponents for the linear-limit table, decreasing toward 1.
    #[arg(long = "p-to-1", value_delimiter = ',', default_values_t = vec![1.1, 1.01, 1.001])]
    p_to_1: Vec<f64>,
    /// Exponents for the eigenvalue bound table.
    #[arg(long = "large-p", value_delimiter = ',', default_values_t = vec![2.0, 5.0, 10.0, 20.0])]
    large_p: Vec<f64>,
    #[arg(long, default_value_t = 4096)]
    intervals: usize,
}

#[derive(Args, Serialize)]
struct PerturbArgs {
    /// TOML config describing the run (see module config for the schema).
    #[arg(long)]
    config: PathBuf,
    /// Override the deformation amplitude.
    #[arg(long)]
    t: Option<f64>,
    /// Override the continuation step count.
    #[arg(long)]
    steps: Option<usize>,
    /// Override the radial cell count.
    #[arg(long = "n-r")]
    n_r: Option<usize>,
    /// Override the angular node count.
    #[arg(long = "n-theta")]
    n_theta: Option<usize>,
    /// Override the exponent.
    #[arg(long)]
    p: Option<f64>,
    /// Override the zone count.
    #[arg(long)]
    m: Option<usize>,
    /// Degenerate exponents to refuse (within 1e-4), comma separated.
    #[arg(long, value_delimiter = ',')]
    avoid: Vec<f64>,
}

/// Parses the process arguments, runs the command, and returns the exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let out = cli
        .out
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let result = match cli.cmd {
        Cmd::SolveRadial(args) => cmd_solve_radial(&out, &args),
        Cmd::Spectrum(args) => cmd_spectrum(&out, &args),
        Cmd::ScanDegeneracy(args) => cmd_scan_degeneracy(&out, &args),
        Cmd::Morse(args) => cmd_morse(&out, &args),
        Cmd::Asymptotics(args) => cmd_asymptotics(&out, &args),
        Cmd::Perturb(args) => cmd_perturb(&out, &args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn cmd_solve_radial(out: &Path, args: &SolveRadialArgs) -> Result<()> {
    let spec = args.dom.spec()?;
    let opts = RadialOptions {
        grid_intervals: args.intervals,
        ..RadialOptions::default()
    };
    let prof = shoot_nodal(spec, args.p, args.m, &opts)?;

    let rows = (0..prof.grid.len())
        .map(|i| row(&[prof.grid[i], prof.values[i], prof.slopes[i]]));
    write_csv(&out.join("profile.csv"), "r,v,dv", rows)?;

    #[derive(Serialize)]
    struct Sidecar<'a> {
        a: f64,
        b: f64,
        #[serde(rename = "N")]
        dim: u32,
        p: f64,
        m: usize,
        zeros: &'a [f64],
        sup_norm: f64,
        alpha_star: f64,
        ln_sup_norm: f64,
        ode_residual: f64,
        config: &'a SolveRadialArgs,
    }
    write_json(
        &out.join("profile.json"),
        &Sidecar {
            a: spec.inner,
            b: spec.outer,
            dim: spec.dim,
            p: prof.p,
            m: prof.zones,
            zeros: &prof.zeros,
            sup_norm: prof.sup_norm(),
            alpha_star: prof.alpha_star(),
            ln_sup_norm: prof.ln_sup_norm(),
            ode_residual: prof.ode_residual(),
            config: args,
        },
    )?;

    write_plot(
        &out.join("plot/profile.dat"),
        prof.grid.iter().copied().zip(prof.values.iter().copied()),
    )?;
    println!(
        "wrote {}: {} zones, sup {:.6e}, residual {:.3e}",
        out.join("profile.csv").display(),
        prof.zones,
        prof.sup_norm(),
        prof.ode_residual()
    );
    Ok(())
}

fn cmd_spectrum(out: &Path, args: &SpectrumArgs) -> Result<()> {
    let spec = args.dom.spec()?;
    let prof = shoot_nodal(spec, args.p, args.m, &RadialOptions::default())?;
    let opts = SpectrumOptions {
        intervals: args.intervals,
        n_eigs: args.modes.unwrap_or(args.m + 1),
        ..SpectrumOptions::default()
    };
    let slice = mode_slice(&prof, &opts)?;

    write_csv(
        &out.join("spectrum.csv"),
        "p,l,nu",
        slice
            .modes
            .iter()
            .enumerate()
            .map(|(i, mode)| row(&[args.p, (i + 1) as f64, mode.nu])),
    )?;

    let header = std::iter::once("r".to_string())
        .chain((1..=slice.modes.len()).map(|l| format!("phi_{l}")))
        .collect::<Vec<_>>()
        .join(",");
    let rows = (0..slice.grid.len()).map(|i| {
        let mut cells = vec![slice.grid[i]];
        cells.extend(slice.modes.iter().map(|m| m.phi[i]));
        row(&cells)
    });
    write_csv(&out.join("eigenfunctions.csv"), &header, rows)?;

    #[derive(Serialize)]
    struct Sidecar<'a> {
        p: f64,
        m: usize,
        nus: Vec<f64>,
        sign_changes: Vec<usize>,
        negative_count: usize,
        config: &'a SpectrumArgs,
    }
    write_json(
        &out.join("spectrum.json"),
        &Sidecar {
            p: args.p,
            m: args.m,
            nus: slice.nus(),
            sign_changes: slice.modes.iter().map(|m| m.sign_changes).collect(),
            negative_count: slice.count_below(0.0),
            config: args,
        },
    )?;

    for (i, mode) in slice.modes.iter().enumerate() {
        write_plot(
            &out.join(format!("plot/phi_{}.dat", i + 1)),
            slice.grid.iter().copied().zip(mode.phi.iter().copied()),
        )?;
    }
    println!(
        "wrote {}: nu = {:?}",
        out.join("spectrum.csv").display(),
        slice.nus()
    );
    Ok(())
}

fn cmd_scan_degeneracy(out: &Path, args: &ScanArgs) -> Result<()> {
    let spec = args.dom.spec()?;
    let opts = DegeneracyOptions {
        samples: args.samples,
        stabilize: args.stabilize,
        ..DegeneracyOptions::default()
    };
    let scan = find_degeneracies(spec, args.m, (args.p_min, args.p_max), args.j_max, &opts)?;

    write_csv(
        &out.join("degeneracy.csv"),
        "k,p_k,l,j,target,residual",
        scan.points.iter().enumerate().map(|(k, pt)| {
            row(&[
                (k + 1) as f64,
                pt.p,
                pt.l as f64,
                pt.j as f64,
                pt.target,
                pt.residual,
            ])
        }),
    )?;

    #[derive(Serialize)]
    struct Sidecar<'a> {
        points: &'a [crate::degeneracy::DegeneracyPoint],
        warnings: &'a [String],
        crossing_counts: &'a [usize],
        grid_len: usize,
        config: &'a ScanArgs,
    }
    write_json(
        &out.join("degeneracy.json"),
        &Sidecar {
            points: &scan.points,
            warnings: &scan.warnings,
            crossing_counts: &scan.crossing_counts,
            grid_len: scan.grid.len(),
            config: args,
        },
    )?;

    for l in 1..=args.m {
        write_plot(
            &out.join(format!("plot/nu_{l}.dat")),
            scan.grid
                .iter()
                .copied()
                .zip(scan.nu_samples.iter().map(|nus| nus[l - 1])),
        )?;
    }
    write_plot(
        &out.join("plot/degeneracies.dat"),
        scan.points.iter().map(|pt| (pt.p, pt.target)),
    )?;
    println!(
        "wrote {}: {} crossings, {} warnings",
        out.join("degeneracy.csv").display(),
        scan.points.len(),
        scan.warnings.len()
    );
    Ok(())
}

fn cmd_morse(out: &Path, args: &MorseArgs) -> Result<()> {
    let spec = args.dom.spec()?;
    let opts = DegeneracyOptions {
        intervals: args.intervals,
        ..DegeneracyOptions::default()
    };
    let mut reports = Vec::with_capacity(args.p.len());
    for &p in &args.p {
        reports.push(morse_index_at(spec, args.m, p, &opts)?);
    }

    let header = std::iter::once("p,morse_index".to_string())
        .chain((1..=args.m).map(|l| format!("J_{l}")))
        .collect::<Vec<_>>()
        .join(",");
    write_csv(
        &out.join("morse.csv"),
        &header,
        reports.iter().map(|r| {
            let mut cells = vec![r.p, r.morse_index as f64];
            cells.extend_from_slice(&r.j_values);
            row(&cells)
        }),
    )?;

    #[derive(Serialize)]
    struct Sidecar<'a> {
        reports: &'a [crate::degeneracy::MorseReport],
        config: &'a MorseArgs,
    }
    write_json(&out.join("morse.json"), &Sidecar { reports: &reports, config: args })?;

    write_plot(
        &out.join("plot/morse.dat"),
        reports.iter().map(|r| (r.p, r.morse_index as f64)),
    )?;
    for r in &reports {
        println!(
            "p = {}: index {} (lower bound {}){}",
            r.p,
            r.morse_index,
            r.lower_bound,
            if r.degenerate_boundary { " [degenerate boundary]" } else { "" }
        );
    }
    Ok(())
}

fn cmd_asymptotics(out: &Path, args: &AsymptoticsArgs) -> Result<()> {
    let spec = args.dom.spec()?;
    let opts = AsymptoticsOptions {
        intervals: args.intervals,
        ..AsymptoticsOptions::default()
    };
    let linear = p_to_1_diagnostics(spec, args.m, &args.p_to_1, &opts)?;
    let bounds = large_p_bound_check(spec, args.m, &args.large_p, &opts)?;
    let lambda_m = laplace_radial_eigen(spec, args.m, &opts)?.lambda;
    let lambda_1 = laplace_radial_eigen(spec, 1, &opts)?.lambda;

    write_csv(
        &out.join("linear_limit.csv"),
        "p,supnorm_pow,lambda_m,err_profile,nu_m",
        linear
            .iter()
            .map(|r| row(&[r.p, r.supnorm_pow, r.lambda_m, r.err_profile, r.nu_m])),
    )?;
    write_csv(
        &out.join("large_p.csv"),
        "p,nu_m,bound,margin",
        bounds.iter().map(|r| row(&[r.p, r.nu_m, r.bound, r.margin])),
    )?;

    #[derive(Serialize)]
    struct Sidecar<'a> {
        lambda_m: f64,
        lambda_1: f64,
        linear_limit: &'a [crate::asymptotics::LinearLimitRow],
        large_p: &'a [crate::asymptotics::LargePRow],
        config: &'a AsymptoticsArgs,
    }
    write_json(
        &out.join("asymptotics.json"),
        &Sidecar {
            lambda_m,
            lambda_1,
            linear_limit: &linear,
            large_p: &bounds,
            config: args,
        },
    )?;

    write_plot(
        &out.join("plot/linear_limit.dat"),
        linear.iter().map(|r| (r.p, r.err_profile)),
    )?;
    write_plot(
        &out.join("plot/large_p.dat"),
        bounds.iter().map(|r| (r.p, r.margin)),
    )?;
    println!(
        "wrote {}: lambda_m = {lambda_m:.9e}",
        out.join("linear_limit.csv").display()
    );
    Ok(())
}

fn cmd_perturb(out: &Path, args: &PerturbArgs) -> Result<()> {
    let mut cfg = PerturbConfig::load(&args.config)?;
    if let Some(t) = args.t {
        cfg.t = t;
    }
    if let Some(steps) = args.steps {
        cfg.steps = steps;
    }
    if let Some(n_r) = args.n_r {
        cfg.n_r = n_r;
    }
    if let Some(n_theta) = args.n_theta {
        cfg.n_theta = n_theta;
    }
    if let Some(p) = args.p {
        cfg.p = p;
    }
    if let Some(m) = args.m {
        cfg.m = m;
    }

    let spec = AnnulusSpec::new(cfg.a, cfg.b, 2)?;
    let grid = PolarGrid::new(spec, cfg.n_r, cfg.n_theta)?;
    let dspec = cfg.deformation();
    let prof = shoot_nodal(spec, cfg.p, cfg.m, &RadialOptions::default())?;
    let sol = newton_solve(&prof, &dspec, &grid, cfg.t, cfg.steps, &args.avoid)?;

    // The native angle axis resolves the field but not necessarily the
    // deepest unstable harmonics; the index is counted on a doubled axis.
    let morse = morse_index_2d_refined(&sol, 1, 2)?;
    let nodal = nodal_count_2d(&sol);
    let bound = safety_bound(&dspec, spec, 128);

    let mut rows = Vec::with_capacity(grid.node_count());
    for i in 0..=grid.n_r {
        for j in 0..grid.n_theta {
            rows.push(row(&[grid.radii[i], grid.angles[j], sol.value(i, j)]));
        }
    }
    write_csv(&out.join("solution.csv"), "r,theta,v", rows)?;

    #[derive(Serialize)]
    struct RunRecord<'a> {
        t: f64,
        p: f64,
        m: usize,
        iterations: &'a [usize],
        residuals: &'a [f64],
        residual_norm: f64,
        morse_index: usize,
        morse_counting_grid: [usize; 2],
        nodal_count: usize,
        safety_bound: f64,
        sup: f64,
        config: &'a PerturbConfig,
    }
    write_json(
        &out.join("run.json"),
        &RunRecord {
            t: sol.t,
            p: sol.p,
            m: sol.m,
            iterations: &sol.newton_iterations,
            residuals: &sol.step_residuals,
            residual_norm: sol.residual_norm,
            morse_index: morse,
            morse_counting_grid: [grid.n_r, 2 * grid.n_theta],
            nodal_count: nodal,
            safety_bound: bound,
            sup: sol.sup(),
            config: &cfg,
        },
    )?;

    write_plot(
        &out.join("plot/section.dat"),
        (0..=grid.n_r).map(|i| (grid.radii[i], sol.value(i, 0))),
    )?;
    println!(
        "wrote {}: nodal count {nodal}, morse index {morse}, iterations {:?}",
        out.join("solution.csv").display(),
        sol.newton_iterations
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_line_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn subcommands_carry_the_documented_names() {
        let cmd = Cli::command();
        let names: Vec<_> = cmd.get_subcommands().map(|c| c.get_name()).collect();
        for expected in [
            "solve-radial",
            "spectrum",
            "scan-degeneracy",
            "morse",
            "asymptotics",
            "perturb",
        ] {
            assert!(names.contains(&expected), "missing subcommand {expected}");
        }
    }
}
