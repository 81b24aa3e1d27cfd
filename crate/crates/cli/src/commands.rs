//! Subcommand implementations and error-to-exit-code mapping.

use std::path::Path;

use gaussian_geometry::ensemble::{self, FigureParams};
use gaussian_geometry::sampling::{predicted_acceptance_rate, run_indexed, sample_covariance, SamplerConfig};
use gaussian_geometry::{
    bures_distance_one_mode, bures_spectral_density_one_mode, hs_distance, hs_spectral_density, io, measures,
    purity_density, symplectic_spectrum, validate_covariance, Covariance, Error, Figure, Observable,
    QuadratureConfig, Spectrum,
};
use rayon::prelude::*;

use crate::output::{render, write_output, Cell, Table};
use crate::{Cli, Command, Family, FigureArg, GlobalArgs, MethodArg, Metric, ObservableArg};

pub const EXIT_UNPHYSICAL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_FORMAT: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn format(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_FORMAT,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::Config(_) | Error::UnsupportedModes { .. } => EXIT_USAGE,
            Error::Parse(_) => EXIT_FORMAT,
            _ => EXIT_NUMERICAL,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Runs the parsed command and returns the exit code.
pub fn run(cli: &Cli) -> CliResult<u8> {
    let job = || execute(cli);
    let (table, code) = match cli.global.workers {
        Some(0) => return Err(CliError::usage("--workers must be positive")),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::usage(e.to_string()))?
            .install(job)?,
        None => job()?,
    };
    let text = render(&table, cli.global.format, cli.global.precision as usize);
    write_output(&text, cli.global.output.as_deref()).map_err(|e| CliError {
        code: EXIT_FORMAT,
        message: format!("cannot write output: {e}"),
    })?;
    Ok(code)
}

fn execute(cli: &Cli) -> CliResult<(Table, u8)> {
    let g = &cli.global;
    match &cli.command {
        Command::Validate { file } => validate(file),
        Command::Spectrum { file } => Ok((spectrum(file)?, 0)),
        Command::Distance { metric, file_a, file_b } => Ok((distance(*metric, file_a, file_b)?, 0)),
        Command::Density {
            family,
            modes,
            at,
            unnormalized,
        } => Ok((density(g, *family, *modes, at, *unnormalized)?, 0)),
        Command::Sample {
            modes,
            count,
            generator_scale,
            max_retries,
        } => Ok((sample(g, *modes, *count, *generator_scale, *max_retries)?, 0)),
        Command::Stats {
            observable,
            modes,
            method,
            count,
            cutoff,
            max_retries,
        } => Ok((stats(g, *observable, *modes, *method, *count, *cutoff, *max_retries)?, 0)),
        Command::PurityDist { modes, grid, mc } => Ok((purity_dist(g, *modes, *grid, *mc)?, 0)),
        Command::Figure {
            which,
            modes,
            grid,
            nu_max,
        } => Ok((figure(g, *which, modes.clone(), *grid, *nu_max)?, 0)),
    }
}

fn quadrature_config(g: &GlobalArgs) -> CliResult<QuadratureConfig<f64>> {
    let mut cfg = QuadratureConfig::default();
    if let Some(t) = g.rel_tol {
        cfg.rel_tol = t;
    }
    if let Some(t) = g.abs_tol {
        cfg.abs_tol = t;
    }
    if let Some(m) = g.max_subdivisions {
        cfg.max_subdivisions = m;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::format(format!("cannot read {}: {e}", path.display())))
}

fn read_covariance(path: &Path) -> CliResult<Covariance> {
    io::parse_covariance(&read_text(path)?).map_err(|e| CliError::format(format!("{}: {e}", path.display())))
}

fn validate(file: &Path) -> CliResult<(Table, u8)> {
    let matrix = io::parse_matrix(&read_text(file)?).map_err(|e| CliError::format(format!("{}: {e}", file.display())))?;
    let report = validate_covariance(&matrix).map_err(|e| match e {
        Error::NonFinite | Error::OddDimension(_) | Error::NotSquare { .. } => {
            CliError::format(format!("{}: {e}", file.display()))
        }
        other => other.into(),
    })?;
    let mut table = Table::new(["physical", "symmetric", "min_nu"]);
    table.push(vec![report.physical.into(), report.symmetric.into(), report.min_nu.into()]);
    Ok((table, if report.physical { 0 } else { EXIT_UNPHYSICAL }))
}

fn spectrum(file: &Path) -> CliResult<Table> {
    let nu = symplectic_spectrum(&read_covariance(file)?)?;
    let mut table = Table::new(["mode", "nu"]);
    for (k, &v) in nu.values().iter().enumerate() {
        table.push(vec![(k + 1).into(), v.into()]);
    }
    Ok(table)
}

fn distance(metric: Metric, file_a: &Path, file_b: &Path) -> CliResult<Table> {
    let a = read_covariance(file_a)?;
    let b = read_covariance(file_b)?;
    if a.modes() != b.modes() {
        return Err(CliError::usage(format!(
            "states have different mode counts ({} and {})",
            a.modes(),
            b.modes()
        )));
    }
    let (name, value) = match metric {
        Metric::Hs => ("hs", hs_distance(&a, &b)?),
        Metric::Bures => {
            if a.modes() != 1 {
                return Err(CliError::usage(format!(
                    "--metric bures is restricted to one-mode states (N = 1); the inputs have N = {}",
                    a.modes()
                )));
            }
            ("bures", bures_distance_one_mode(&a, &b)?)
        }
    };
    let mut table = Table::new(["metric", "distance"]);
    table.push(vec![name.into(), value.into()]);
    Ok(table)
}

fn density(g: &GlobalArgs, family: Family, modes: usize, at: &[f64], unnormalized: bool) -> CliResult<Table> {
    if modes == 0 {
        return Err(CliError::usage("--modes must be positive"));
    }
    if unnormalized && family != Family::HsSpectral {
        return Err(CliError::usage("--unnormalized applies to --family hs-spectral only"));
    }
    match family {
        Family::HsSpectral => {
            if at.len() != modes {
                return Err(CliError::usage(format!(
                    "--at needs {modes} symplectic eigenvalues for --modes {modes}, got {}",
                    at.len()
                )));
            }
            if at.iter().any(|&v| !(1.0..f64::INFINITY).contains(&v)) {
                return Err(CliError::usage("symplectic eigenvalues must be finite and at least 1"));
            }
            let eval = hs_spectral_density(&Spectrum::new(at.to_vec()), !unnormalized)?;
            let mut columns: Vec<String> = (1..=modes).map(|k| format!("nu{k}")).collect();
            columns.extend(["density", "normalized", "normalization_constant"].map(String::from));
            let mut table = Table::new(columns);
            let mut row: Vec<Cell> = Spectrum::new(at.to_vec()).values().iter().map(|&v| v.into()).collect();
            row.extend([eval.value.into(), eval.normalized.into(), eval.normalization_constant.into()]);
            table.push(row);
            Ok(table)
        }
        Family::BuresSpectral => {
            if modes != 1 {
                return Err(CliError::usage(format!(
                    "the Bures spectral density is only available for one mode (N = 1), got N = {modes}"
                )));
            }
            let mut table = Table::new(["nu", "density"]);
            for &nu in at {
                table.push(vec![nu.into(), bures_spectral_density_one_mode(nu)?.into()]);
            }
            Ok(table)
        }
        Family::Purity => {
            if modes > measures::MAX_PURITY_DENSITY_MODES {
                return Err(CliError::usage(format!(
                    "the purity density is available for N ≤ {}, got N = {modes}",
                    measures::MAX_PURITY_DENSITY_MODES
                )));
            }
            let cfg = quadrature_config(g)?;
            let values = at
                .par_iter()
                .map(|&mu| purity_density(modes, mu, &cfg))
                .collect::<Result<Vec<f64>, Error>>()?;
            let mut table = Table::new(["mu", "density"]);
            for (&mu, v) in at.iter().zip(values) {
                table.push(vec![mu.into(), v.into()]);
            }
            Ok(table)
        }
    }
}

fn sampler(g: &GlobalArgs, modes: usize, max_retries: Option<u64>) -> CliResult<SamplerConfig<f64>> {
    let mut cfg = SamplerConfig::new(modes, g.seed);
    if let Some(r) = max_retries {
        cfg = cfg.with_max_retries(r);
    }
    cfg.validate()?;
    if modes >= 4 {
        if let Ok(rate) = predicted_acceptance_rate(modes, cfg.beta) {
            eprintln!(
                "gaussgeom: warning: rejection sampling for N = {modes} accepts about {} of proposals; \
                 expect the retry budget of {} to be exhausted (a Markov-chain sampler is future work)",
                crate::output::format_sig(rate, 3),
                cfg.max_retries
            );
        }
    }
    Ok(cfg)
}

fn sampling_error(err: Error, modes: usize) -> CliError {
    let mut e = CliError::from(err.clone());
    if let Error::RetryBudgetExhausted(_) = err {
        if let Ok(rate) = predicted_acceptance_rate(modes, gaussian_geometry::sampling::default_beta(modes)) {
            e.message = format!(
                "{}; the predicted acceptance rate for N = {modes} is {}",
                e.message,
                crate::output::format_sig(rate, 3)
            );
        }
    }
    e
}

fn sample(g: &GlobalArgs, modes: usize, count: usize, scale: Option<f64>, max_retries: Option<u64>) -> CliResult<Table> {
    let cfg = sampler(g, modes, max_retries)?;
    match scale {
        None => {
            let batch = gaussian_geometry::sample_batch(&cfg, count, None).map_err(|e| sampling_error(e, modes))?;
            let mut table = Table::new((1..=modes).map(|k| format!("nu{k}")));
            for s in &batch.spectra {
                table.push(s.values().iter().map(|&v| v.into()).collect());
            }
            Ok(table)
        }
        Some(scale) => {
            let samples = run_indexed(count, cfg.seed, None, |_, rng| sample_covariance(&cfg, scale, rng))
                .map_err(|e| sampling_error(e, modes))?;
            let dim = 2 * modes;
            let mut columns: Vec<String> = (1..=modes).map(|k| format!("nu{k}")).collect();
            for r in 1..=dim {
                for c in 1..=dim {
                    columns.push(format!("sigma_{r}_{c}"));
                }
            }
            let mut table = Table::new(columns);
            for s in samples {
                let mut row: Vec<Cell> = s.spectrum.values().iter().map(|&v| v.into()).collect();
                row.extend(s.sigma.to_row_major().into_iter().map(Cell::from));
                table.push(row);
            }
            Ok(table)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn stats(
    g: &GlobalArgs,
    observable: ObservableArg,
    modes: usize,
    method: MethodArg,
    count: usize,
    cutoff: Option<f64>,
    max_retries: Option<u64>,
) -> CliResult<Table> {
    let obs = match observable {
        ObservableArg::Purity => Observable::Purity,
        ObservableArg::Entropy => Observable::Entropy,
    };
    let cfg = quadrature_config(g)?;
    if method == MethodArg::BuresTruncated {
        if modes != 1 {
            return Err(CliError::usage(format!(
                "Bures means are only available for one mode (N = 1), got N = {modes}"
            )));
        }
        let cutoff = cutoff.ok_or_else(|| CliError::usage("--method bures-truncated needs --cutoff"))?;
        let value = ensemble::bures_truncated_mean(obs, cutoff, &cfg)?;
        let mut table = Table::new(["observable", "modes", "method", "cutoff", "estimate"]);
        table.push(vec![obs.name().into(), modes.into(), "bures-truncated".into(), cutoff.into(), value.into()]);
        return Ok(table);
    }
    if cutoff.is_some() {
        return Err(CliError::usage("--cutoff applies to --method bures-truncated only"));
    }
    let summary = match method {
        MethodArg::Mc => {
            let scfg = sampler(g, modes, max_retries)?;
            ensemble::mc_mean(obs, &scfg, count, None).map_err(|e| sampling_error(e, modes))?
        }
        MethodArg::Quad => ensemble::quad_mean(obs, modes, &cfg)?,
        MethodArg::Moments => ensemble::moment_mean(obs, modes, &cfg)?,
        MethodArg::BuresTruncated => unreachable!("handled above"),
    };
    let mut table = Table::new([
        "observable",
        "modes",
        "method",
        "estimate",
        "standard_error",
        "sample_count",
        "tolerance",
        "seed",
    ]);
    table.push(vec![
        summary.observable.name().into(),
        summary.modes.into(),
        summary.method.name().into(),
        summary.estimate.into(),
        summary.standard_error.into(),
        summary.sample_count.into(),
        summary.tolerance.into(),
        summary.seed.into(),
    ]);
    Ok(table)
}

fn purity_dist(g: &GlobalArgs, modes: usize, grid: usize, mc: Option<usize>) -> CliResult<Table> {
    if grid == 0 {
        return Err(CliError::usage("--grid must be positive"));
    }
    if let Some(count) = mc {
        let scfg = sampler(g, modes, None)?;
        let hist = ensemble::purity_histogram(&scfg, count, grid, None).map_err(|e| sampling_error(e, modes))?;
        let mut table = Table::new(["bin_lower", "bin_upper", "count", "height"]);
        for k in 0..grid {
            table.push(vec![
                hist.edges[k].into(),
                hist.edges[k + 1].into(),
                hist.counts[k].into(),
                hist.heights[k].into(),
            ]);
        }
        return Ok(table);
    }
    if modes == 0 || modes > measures::MAX_PURITY_DENSITY_MODES {
        return Err(CliError::usage(format!(
            "the purity density is available for 1 ≤ N ≤ {}, got N = {modes}; use --mc for a histogram",
            measures::MAX_PURITY_DENSITY_MODES
        )));
    }
    let cfg = quadrature_config(g)?;
    let mus: Vec<f64> = (1..=grid).map(|k| k as f64 / grid as f64).collect();
    let values = mus
        .par_iter()
        .map(|&mu| purity_density(modes, mu, &cfg))
        .collect::<Result<Vec<f64>, Error>>()?;
    let mut table = Table::new(["mu", "density"]);
    for (mu, v) in mus.into_iter().zip(values) {
        table.push(vec![mu.into(), v.into()]);
    }
    Ok(table)
}

fn figure(
    g: &GlobalArgs,
    which: FigureArg,
    modes: Option<Vec<usize>>,
    grid: Option<usize>,
    nu_max: Option<f64>,
) -> CliResult<Table> {
    let fig = match which {
        FigureArg::Means => Figure::Means,
        FigureArg::PurityDist => Figure::PurityDist,
        FigureArg::SpectralDensity => Figure::SpectralDensity,
    };
    let mut params = FigureParams::for_figure(fig);
    if let Some(m) = modes {
        params.modes = m;
    }
    if let Some(k) = grid {
        params.grid = k;
    }
    if let Some(x) = nu_max {
        params.nu_max = x;
    }
    if g.rel_tol.is_some() || g.abs_tol.is_some() || g.max_subdivisions.is_some() {
        params.quadrature = quadrature_config(g)?;
    }
    let data = ensemble::figure_data(fig, &params)?;
    let mut table = Table::new(data.columns.clone());
    for row in data.rows {
        let cells = row
            .into_iter()
            .zip(&data.columns)
            .map(|(x, name)| if name == "modes" { Cell::Int(x as u64) } else { Cell::Num(x) })
            .collect();
        table.push(cells);
    }
    Ok(table)
}
