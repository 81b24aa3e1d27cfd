//! `gaussgeom`: command-line front end for `gaussian-geometry`.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaussian_geometry::sampling::DEFAULT_SEED;

use crate::output::Format;

/// Geometry and random ensembles of mixed Gaussian states.
///
/// Exit codes: 0 success, 1 unphysical state (`validate`), 2 usage error,
/// 3 file-format error, 4 numerical failure.
#[derive(Debug, Parser)]
#[command(name = "gaussgeom", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,
    /// Write to this file (atomically) instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Significant digits of printed numbers.
    #[arg(long, default_value_t = 7, value_parser = clap::value_parser!(u8).range(1..=17), global = true)]
    pub precision: u8,
    /// Seed for every random draw.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    pub seed: u64,
    /// Worker threads for sampling; the output does not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    /// Bisections allowed per one-dimensional integral.
    #[arg(long, global = true)]
    pub max_subdivisions: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Hs,
    Bures,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    HsSpectral,
    BuresSpectral,
    Purity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObservableArg {
    Purity,
    Entropy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Monte Carlo over exact samples.
    Mc,
    /// Nested quadrature (N ≤ 4).
    Quad,
    /// Hankel-determinant moment reduction (N ≤ 6).
    Moments,
    /// One-mode Bures mean truncated at `--cutoff`.
    BuresTruncated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureArg {
    Means,
    #[value(name = "purity_dist", alias = "purity-dist")]
    PurityDist,
    #[value(name = "spectral_density", alias = "spectral-density")]
    SpectralDensity,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check physicality; exits 0 if physical and 1 otherwise.
    Validate { file: PathBuf },
    /// Symplectic eigenvalues in ascending order.
    Spectrum { file: PathBuf },
    /// Distance between two states.
    Distance {
        #[arg(long, value_enum, default_value = "hs")]
        metric: Metric,
        file_a: PathBuf,
        file_b: PathBuf,
    },
    /// Evaluate a measure density.
    Density {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, default_value_t = 1)]
        modes: usize,
        /// For `hs-spectral` the N symplectic eigenvalues of one point; for
        /// the other families a list of points.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true, allow_negative_numbers = true)]
        at: Vec<f64>,
        /// Report `√det g` instead of the normalized `P_N` (`hs-spectral` only).
        #[arg(long)]
        unnormalized: bool,
    },
    /// Draw spectra (or covariance matrices) from the Hilbert-Schmidt distribution.
    Sample {
        #[arg(long)]
        modes: usize,
        #[arg(long)]
        count: usize,
        /// Emit covariance matrices `SᵀDS` with random generators of this scale.
        #[arg(long)]
        generator_scale: Option<f64>,
        #[arg(long)]
        max_retries: Option<u64>,
    },
    /// Ensemble mean of an observable.
    Stats {
        #[arg(long, value_enum)]
        observable: ObservableArg,
        #[arg(long, default_value_t = 1)]
        modes: usize,
        #[arg(long, value_enum, default_value = "quad")]
        method: MethodArg,
        /// Samples for `--method mc`.
        #[arg(long, default_value_t = 100_000)]
        count: usize,
        /// Cutoff `ν_m` for `--method bures-truncated`.
        #[arg(long)]
        cutoff: Option<f64>,
        #[arg(long)]
        max_retries: Option<u64>,
    },
    /// Purity density on a grid of K points in (0, 1], or a Monte Carlo histogram.
    PurityDist {
        #[arg(long)]
        modes: usize,
        #[arg(long, default_value_t = 50)]
        grid: usize,
        /// Histogram this many Monte Carlo samples into `grid` bins instead.
        #[arg(long)]
        mc: Option<usize>,
    },
    /// Plot series: spectral density, means against N, purity densities.
    Figure {
        #[arg(long, value_enum)]
        which: FigureArg,
        /// Mode counts (defaults: 1 for spectral_density, 6 for means, 1,2,3 for purity_dist).
        #[arg(long, value_delimiter = ',')]
        modes: Option<Vec<usize>>,
        #[arg(long)]
        grid: Option<usize>,
        /// Upper end of the ν axis for spectral_density.
        #[arg(long)]
        nu_max: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { commands::EXIT_USAGE } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("gaussgeom: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
