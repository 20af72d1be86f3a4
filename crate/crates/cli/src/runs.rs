//! Experiment drivers behind the subcommands: argument plumbing, seeded
//! ensembles over a worker pool, disk-count statistics, and artifact
//! assembly. Nothing time- or host-dependent enters an artifact, so a
//! rerun with the same configuration reproduces it byte for byte.

use std::path::PathBuf;

use gwhf_core::chaos::{self, HyperuniformityVerdict};
use gwhf_core::kernels::TwistedKernel;
use gwhf_core::polynomials::format_rational;
use gwhf_core::sampler::{
    evaluate_gwhf, required_truncation, sample_gef, sample_stft_field, Grid, MeanSpec, StftWindow,
};
use gwhf_core::statistics::{
    count_in_disks, fit_growth_exponent, summarize, summarize_with_mean, CountMode, ExponentFit,
    MomentSummary,
};
use gwhf_core::zeros::{classify_critical_points, find_zeros, Window, ZeroSet};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::chart::dispersion_chart;
use crate::config::{
    parse_mean, parse_radii, parse_signal, parse_window, workers_from_env, ExperimentConfig,
};
use crate::{CliError, Result};

/// Extra space between the largest count radius and the search window, so
/// disks padded by one grid step stay strictly enclosed.
const WINDOW_PAD: f64 = 0.5;

/// Extra space between the largest count radius and the evaluated region,
/// covering the search window plus the interpolation stencils and the
/// Newton leash of cells on its boundary.
const GRID_PAD: f64 = 1.2;

/// Rendered artifact set of one run. With an output prefix each present
/// part lands in `<prefix>.<ext>`; without one the JSON part (or the CSV
/// when there is no JSON) goes to stdout.
#[derive(Debug)]
pub struct Artifacts {
    pub json: Option<String>,
    pub csv: Option<String>,
    pub svg: Option<String>,
}

#[derive(Debug, clap::Args)]
pub struct SampleArgs {
    /// Kernel spec: gauss or laguerre:<n>.
    #[arg(long, default_value = "gauss")]
    pub kernel: String,
    /// Mean field: none, constant:<re>[,<im>], or coherent:<re>,<im>.
    #[arg(long, default_value = "none")]
    pub mean: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// RNG stream, the realization index under one seed.
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Half width of the square evaluation grid centered at the origin.
    #[arg(long, default_value_t = 4.0)]
    pub half_width: f64,
    /// Lattice spacing.
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    /// Evaluate only |z| <= mask, leaving the square's corners unset.
    #[arg(long)]
    pub mask: Option<f64>,
    /// Output prefix; writes <prefix>.json (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct ZerosArgs {
    /// Kernel spec: gauss or laguerre:<n>.
    #[arg(long, default_value = "gauss")]
    pub kernel: String,
    /// Mean field: none, constant:<re>[,<im>], or coherent:<re>,<im>.
    #[arg(long, default_value = "none")]
    pub mean: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Half width of the square evaluation grid centered at the origin.
    #[arg(long, default_value_t = 4.0)]
    pub half_width: f64,
    /// Lattice spacing.
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    /// Evaluate only |z| <= mask, leaving the square's corners unset.
    #[arg(long)]
    pub mask: Option<f64>,
    /// Search window: disk:<cx>,<cy>,<r> or rect:<cx>,<cy>,<h>. Defaults
    /// to a centered disk one unit inside the grid.
    #[arg(long)]
    pub window: Option<String>,
    /// Label each zero of the order-1 companion field as a saddle or a
    /// local maximum of the amplitude landscape (gauss kernel only).
    #[arg(long)]
    pub classify: bool,
    /// Output prefix; writes <prefix>.json and <prefix>.csv (CSV to
    /// stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct VarscanArgs {
    /// Kernel spec: gauss or laguerre:<n>.
    #[arg(long, default_value = "gauss")]
    pub kernel: String,
    /// Count statistic: charged, uncharged, saddle, or max.
    #[arg(long, default_value = "uncharged")]
    pub count_mode: String,
    /// Mean field: none, constant:<re>[,<im>], or coherent:<re>,<im>.
    #[arg(long, default_value = "none")]
    pub mean: String,
    /// Disk radii: min:max:step or a comma list.
    #[arg(long, default_value = "4:12:1")]
    pub radii: String,
    #[arg(long, default_value_t = 200)]
    pub realizations: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Lattice spacing.
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    /// Grid half width; defaults to the largest radius plus padding.
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Evaluation mask radius; defaults to the grid half width. Keep
    /// about one unit beyond the largest count radius.
    #[arg(long)]
    pub mask: Option<f64>,
    /// Lower end of the growth-exponent fit (defaults to the first radius).
    #[arg(long)]
    pub fit_min: Option<f64>,
    /// Upper end of the growth-exponent fit (defaults to the last radius).
    #[arg(long)]
    pub fit_max: Option<f64>,
    /// Take the variance around the analytic charged mean R^2 instead of
    /// the sample mean (charged mode, zero mean field only).
    #[arg(long)]
    pub centered: bool,
    /// Output prefix; writes <prefix>.json, <prefix>.csv, <prefix>.svg
    /// (JSON to stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct ChaosArgs {
    /// Kernel spec: laguerre:<n> with n in 1..=5.
    #[arg(long)]
    pub kernel: String,
    /// Highest order of the projection coefficient table.
    #[arg(long, default_value_t = 2)]
    pub order: u32,
    /// Include the two-point density polynomial in the report.
    #[arg(long)]
    pub emit_g: bool,
    /// Include the projection coefficient table in the report.
    #[arg(long)]
    pub emit_table: bool,
    /// Also report the order-2 count variance at this disk radius.
    #[arg(long)]
    pub q22_radius: Option<f64>,
    /// Cross-check the variance by sampling this many realizations.
    #[arg(long)]
    pub monte_carlo: Option<u32>,
    /// Lattice spacing of the Monte-Carlo estimator.
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Output prefix; writes <prefix>.json (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct SpectrogramArgs {
    /// Analysis window: gauss or hermite1.
    #[arg(long, default_value = "gauss")]
    pub window: String,
    /// Deterministic signal under the noise: none, atom:<time>,<frequency>,
    /// or chirp:<rate>,<duration>.
    #[arg(long, default_value = "none")]
    pub signal: String,
    /// Signal amplitude relative to unit noise.
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    /// Disk radii: min:max:step or a comma list.
    #[arg(long, default_value = "4:12:1")]
    pub radii: String,
    #[arg(long, default_value_t = 200)]
    pub realizations: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Lattice spacing.
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    /// Grid half width; defaults to the largest radius plus padding.
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Evaluation mask radius; defaults to the grid half width.
    #[arg(long)]
    pub mask: Option<f64>,
    /// Lower end of the growth-exponent fit (defaults to the first radius).
    #[arg(long)]
    pub fit_min: Option<f64>,
    /// Upper end of the growth-exponent fit (defaults to the last radius).
    #[arg(long)]
    pub fit_max: Option<f64>,
    /// Output prefix; writes <prefix>.json, <prefix>.csv, <prefix>.svg
    /// (JSON to stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct ValidateArgs {
    /// Kernel spec: gauss, laguerre:<n>, or poly:<c0,c1,...>.
    #[arg(long)]
    pub kernel: String,
    /// Radius of the sweep checking decay and the strict bound.
    #[arg(long, default_value_t = 8.0)]
    pub radius: f64,
    /// Sample spacing of the sweep.
    #[arg(long, default_value_t = 0.25)]
    pub step: f64,
    /// Output prefix; writes <prefix>.json (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn config_err(err: gwhf_core::Error) -> CliError {
    CliError::Config(err.to_string())
}

fn numerical(stream: u64, err: gwhf_core::Error) -> CliError {
    CliError::Numerical(format!("realization {stream}: {err}"))
}

fn ensure_resolved(stream: u64, set: &ZeroSet) -> Result<()> {
    if set.unresolved > 0 {
        return Err(CliError::Numerical(format!(
            "realization {stream}: {} candidate cells did not refine to a zero",
            set.unresolved
        )));
    }
    Ok(())
}

fn pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}

fn compact(value: &Value) -> String {
    let mut text = serde_json::to_string(value).expect("report serializes");
    text.push('\n');
    text
}

fn window_tag(window: &Window) -> String {
    match *window {
        Window::Disk { center, radius } => format!("disk:{},{},{}", center.re, center.im, radius),
        Window::Rect { center, half_width } => {
            format!("rect:{},{},{}", center.re, center.im, half_width)
        }
    }
}

fn build_grid(half_width: f64, step: f64, mask: Option<f64>) -> Result<Grid> {
    let grid = Grid::new(Complex64::ZERO, half_width, step).map_err(config_err)?;
    Ok(match mask {
        Some(radius) => grid.with_mask(radius),
        None => grid,
    })
}

#[derive(Debug)]
struct Geometry {
    grid: Grid,
    window: Window,
}

/// Grid and search window for counting in disks up to `r_max` around the
/// origin. The defaults keep enough padding that every interpolation
/// stencil near the window boundary stays on evaluated points.
fn ensemble_geometry(
    r_max: f64,
    step: f64,
    half_width: Option<f64>,
    mask: Option<f64>,
) -> Result<Geometry> {
    if !(step > 0.0) {
        return Err(CliError::Config(format!(
            "grid step must be positive, got {step}"
        )));
    }
    let half = half_width.unwrap_or_else(|| step * ((r_max + GRID_PAD) / step).ceil());
    let mask = mask.unwrap_or(half);
    let window_radius = r_max + WINDOW_PAD;
    if window_radius + 2.0 * step > half.min(mask) + 1e-9 {
        return Err(CliError::Config(format!(
            "counting up to radius {r_max} needs an evaluated region of radius at least {}, \
             got min(half width, mask) = {}",
            window_radius + 2.0 * step,
            half.min(mask)
        )));
    }
    let grid = Grid::new(Complex64::ZERO, half, step)
        .map_err(config_err)?
        .with_mask(mask);
    Ok(Geometry {
        grid,
        window: Window::Disk {
            center: Complex64::ZERO,
            radius: window_radius,
        },
    })
}

/// Runs `job` once per stream index on the worker pool, preserving stream
/// order in the result. Pool size comes from GWHF_WORKERS when set.
fn run_ensemble<T: Send>(
    realizations: usize,
    job: impl Fn(u64) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    if realizations < 2 {
        return Err(CliError::Config(format!(
            "ensembles need at least two realizations, got {realizations}"
        )));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers_from_env()?.unwrap_or(0))
        .build()
        .map_err(|err| CliError::Config(format!("worker pool: {err}")))?;
    pool.install(|| (0..realizations as u64).into_par_iter().map(job).collect())
}

fn moments_json(summary: &MomentSummary) -> Value {
    json!({
        "mode": summary.mode.tag(),
        "realizations": summary.realizations,
        "centered_against": summary.centered_against,
        "per_radius": summary.per_radius.iter().map(|m| json!({
            "radius": m.radius,
            "mean": m.mean,
            "variance": m.variance,
            "index_of_dispersion": m.index_of_dispersion,
            "ci_low": m.ci_low,
            "ci_high": m.ci_high,
        })).collect::<Vec<Value>>(),
    })
}

fn fit_json(fit: &ExponentFit) -> Value {
    json!({
        "slope": fit.slope,
        "intercept": fit.intercept,
        "std_error": fit.std_error,
        "r_min": fit.r_min,
        "r_max": fit.r_max,
        "radii_used": fit.radii_used,
        "residuals": fit.residuals,
    })
}

/// Fits the variance growth exponent, downgrading failure to a warning:
/// a flat or degenerate table still yields a valid moments artifact.
fn fit_or_warning(
    summary: &MomentSummary,
    r_min: f64,
    r_max: f64,
    warnings: &mut Vec<String>,
) -> Value {
    match fit_growth_exponent(summary, r_min, r_max) {
        Ok(fit) => fit_json(&fit),
        Err(err) => {
            warnings.push(format!("exponent fit skipped ({}): {err}", summary.mode.tag()));
            Value::Null
        }
    }
}

fn table_csv(config: &ExperimentConfig, summaries: &[&MomentSummary]) -> String {
    let mut out = format!("# config {}", config.to_json());
    out.push('\n');
    out.push_str("radius,mean,var,iod,ci_lo,ci_hi,n_realizations,mode\n");
    for summary in summaries {
        for m in &summary.per_radius {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                m.radius,
                m.mean,
                m.variance,
                m.index_of_dispersion,
                m.ci_low,
                m.ci_high,
                summary.realizations,
                summary.mode.tag()
            ));
        }
    }
    out
}

fn chart_or_warning(csv: &str, warnings: &mut Vec<String>) -> Option<String> {
    match dispersion_chart(csv) {
        Ok(svg) => Some(svg),
        Err(err) => {
            warnings.push(format!("chart skipped: {err}"));
            None
        }
    }
}

/// A kernel the sampler can realize: the pure type of its order.
fn sampling_order(kernel: &TwistedKernel) -> Result<u32> {
    kernel.pure_order().ok_or_else(|| {
        CliError::Config(format!(
            "sampling needs a pure-type kernel (gauss or laguerre:<n>), got `{}`; \
             general profiles support exact analysis only",
            kernel.spec_string()
        ))
    })
}

fn require_classifiable(kernel: &TwistedKernel, mean: &MeanSpec) -> Result<()> {
    if kernel.pure_order() != Some(0) {
        return Err(CliError::Config(format!(
            "critical-point counting classifies the amplitude landscape of the gauss \
             kernel, got `{}`",
            kernel.spec_string()
        )));
    }
    if !matches!(mean, MeanSpec::None) {
        return Err(CliError::Config(
            "critical-point counting covers the zero-mean field only".into(),
        ));
    }
    Ok(())
}

pub fn run_sample(args: &SampleArgs) -> Result<Artifacts> {
    let kernel = TwistedKernel::parse(&args.kernel).map_err(config_err)?;
    let order = sampling_order(&kernel)?;
    let mean = parse_mean(&args.mean)?;
    let grid = build_grid(args.half_width, args.step, args.mask)?;
    let k_max = required_truncation(grid.max_active_abs());
    let coeffs = sample_gef(k_max, args.seed, args.stream);
    let field =
        evaluate_gwhf(&coeffs, order, &mean, &grid).map_err(|e| numerical(args.stream, e))?;

    let mut config = ExperimentConfig::new("sample");
    config.kernel = Some(kernel.spec_string());
    config.mean = Some(mean.tag());
    config.seed = Some(args.seed);
    config.stream = Some(args.stream);
    config.grid_step = Some(grid.step);
    config.grid_half_width = Some(grid.half_width);
    config.mask_radius = grid.mask_radius;

    let root = json!({
        "config": config,
        "field": field.to_json_envelope(),
    });
    Ok(Artifacts {
        json: Some(compact(&root)),
        csv: None,
        svg: None,
    })
}

pub fn run_zeros(args: &ZerosArgs) -> Result<Artifacts> {
    let kernel = TwistedKernel::parse(&args.kernel).map_err(config_err)?;
    let mean = parse_mean(&args.mean)?;
    let grid = build_grid(args.half_width, args.step, args.mask)?;
    let window = match &args.window {
        Some(text) => parse_window(text)?,
        None => {
            let radius = args.half_width - 1.0;
            if radius <= 0.0 {
                return Err(CliError::Config(format!(
                    "the default window is a centered disk one unit inside the grid; \
                     half width {} leaves no room, pass --window",
                    args.half_width
                )));
            }
            Window::Disk {
                center: Complex64::ZERO,
                radius,
            }
        }
    };
    let k_max = required_truncation(grid.max_active_abs());

    let mut config = ExperimentConfig::new("zeros");
    config.kernel = Some(kernel.spec_string());
    config.mean = Some(mean.tag());
    config.seed = Some(args.seed);
    config.stream = Some(args.stream);
    config.grid_step = Some(grid.step);
    config.grid_half_width = Some(grid.half_width);
    config.mask_radius = grid.mask_radius;
    config.search_window = Some(window_tag(&window));
    config.classify = Some(args.classify);

    let coeffs = sample_gef(k_max, args.seed, args.stream);
    let (set, classified) = if args.classify {
        require_classifiable(&kernel, &mean)?;
        let points = classify_critical_points(&coeffs, &grid, &window)
            .map_err(|e| numerical(args.stream, e))?;
        let extras = (points.hessian_disagreements, points.checked);
        (points.zeros, Some(extras))
    } else {
        let order = sampling_order(&kernel)?;
        let field =
            evaluate_gwhf(&coeffs, order, &mean, &grid).map_err(|e| numerical(args.stream, e))?;
        let set = find_zeros(&field, &window).map_err(|e| numerical(args.stream, e))?;
        (set, None)
    };
    ensure_resolved(args.stream, &set)?;

    let mut out = format!("# config {}", config.to_json());
    out.push('\n');
    out.push_str("re,im,charge,jacobian,residual,label\n");
    for z in &set.zeros {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            z.re,
            z.im,
            z.charge,
            z.jacobian,
            z.residual,
            z.label.unwrap_or("")
        ));
    }

    let positive = set.zeros.iter().filter(|z| z.charge > 0).count();
    let mut root = json!({
        "config": config,
        "zeros": set.zeros.len(),
        "positive": positive,
        "negative": set.zeros.len() - positive,
        "unresolved": set.unresolved,
    });
    if let Some((disagreements, checked)) = classified {
        let saddles = set
            .zeros
            .iter()
            .filter(|z| z.label == Some("saddle"))
            .count();
        root["saddles"] = json!(saddles);
        root["maxima"] = json!(set.zeros.len() - saddles);
        root["hessian_disagreements"] = json!(disagreements);
        root["hessian_checked"] = json!(checked);
    }
    Ok(Artifacts {
        json: Some(pretty(&root)),
        csv: Some(out),
        svg: None,
    })
}

pub fn run_varscan(args: &VarscanArgs) -> Result<Artifacts> {
    let kernel = TwistedKernel::parse(&args.kernel).map_err(config_err)?;
    let mode = CountMode::parse(&args.count_mode).map_err(config_err)?;
    let mean = parse_mean(&args.mean)?;
    let radii = parse_radii(&args.radii)?;
    let r_max = *radii.last().expect("radii are nonempty");
    let fit_min = args.fit_min.unwrap_or(radii[0]);
    let fit_max = args.fit_max.unwrap_or(r_max);

    let critical = matches!(mode, CountMode::Saddle | CountMode::Max);
    if critical {
        require_classifiable(&kernel, &mean)?;
    } else {
        sampling_order(&kernel)?;
    }
    if args.centered {
        if mode != CountMode::Charged {
            return Err(CliError::Config(
                "centered variance uses the analytic charged mean; pass --count-mode charged"
                    .into(),
            ));
        }
        if !matches!(mean, MeanSpec::None) {
            return Err(CliError::Config(
                "centered variance needs the zero-mean field".into(),
            ));
        }
    }

    let geometry = ensemble_geometry(r_max, args.step, args.half_width, args.mask)?;
    let k_max = required_truncation(geometry.grid.max_active_abs());

    let mut config = ExperimentConfig::new("varscan");
    config.kernel = Some(kernel.spec_string());
    config.mean = Some(mean.tag());
    config.count_mode = Some(mode.tag().to_string());
    config.search_window = Some(window_tag(&geometry.window));
    config.radii = Some(radii.clone());
    config.realizations = Some(args.realizations);
    config.seed = Some(args.seed);
    config.grid_step = Some(geometry.grid.step);
    config.grid_half_width = Some(geometry.grid.half_width);
    config.mask_radius = geometry.grid.mask_radius;
    config.fit_min = Some(fit_min);
    config.fit_max = Some(fit_max);
    config.centered = Some(args.centered);

    let (sets, disagreements) = if critical {
        let pairs: Vec<(ZeroSet, u32)> = run_ensemble(args.realizations, |stream| {
            let points = classify_critical_points(
                &sample_gef(k_max, args.seed, stream),
                &geometry.grid,
                &geometry.window,
            )
            .map_err(|e| numerical(stream, e))?;
            ensure_resolved(stream, &points.zeros)?;
            Ok((points.zeros, points.hessian_disagreements))
        })?;
        let total: u32 = pairs.iter().map(|pair| pair.1).sum();
        (
            pairs.into_iter().map(|pair| pair.0).collect::<Vec<_>>(),
            Some(total),
        )
    } else {
        let order = kernel.pure_order().expect("checked above");
        let sets = run_ensemble(args.realizations, |stream| {
            let coeffs = sample_gef(k_max, args.seed, stream);
            let field = evaluate_gwhf(&coeffs, order, &mean, &geometry.grid)
                .map_err(|e| numerical(stream, e))?;
            let set = find_zeros(&field, &geometry.window).map_err(|e| numerical(stream, e))?;
            ensure_resolved(stream, &set)?;
            Ok(set)
        })?;
        (sets, None)
    };

    let table =
        count_in_disks(&sets, &[Complex64::ZERO], &radii, mode).map_err(config_err)?;
    let summary = if args.centered {
        summarize_with_mean(&table, |r| r * r, "index-formula mean R^2")
    } else {
        summarize(&table)
    }
    .map_err(config_err)?;

    let mut warnings = summary.warnings.clone();
    let fit = fit_or_warning(&summary, fit_min, fit_max, &mut warnings);
    let csv = table_csv(&config, &[&summary]);
    let svg = chart_or_warning(&csv, &mut warnings);

    let mut root = json!({
        "config": config,
        "mode": mode.tag(),
        "realizations": summary.realizations,
        "moments": moments_json(&summary),
        "fit": fit,
        "warnings": warnings,
    });
    if let Some(total) = disagreements {
        root["hessian_disagreements"] = json!(total);
    }
    Ok(Artifacts {
        json: Some(pretty(&root)),
        csv: Some(csv),
        svg,
    })
}

pub fn run_spectrogram(args: &SpectrogramArgs) -> Result<Artifacts> {
    let window_kind = StftWindow::parse(&args.window).map_err(config_err)?;
    let signal = parse_signal(&args.signal, args.amplitude)?;
    let radii = parse_radii(&args.radii)?;
    let r_max = *radii.last().expect("radii are nonempty");
    let fit_min = args.fit_min.unwrap_or(radii[0]);
    let fit_max = args.fit_max.unwrap_or(r_max);
    let geometry = ensemble_geometry(r_max, args.step, args.half_width, args.mask)?;
    let k_max = required_truncation(geometry.grid.max_active_abs());

    let noise_only = signal.is_none();
    let mean = match signal {
        Some(sig) => MeanSpec::StftSignal(sig),
        None => MeanSpec::None,
    };
    // With a signal present the zero count is no longer stationary; the
    // charged sum is the statistic with a clean growth law. Amplitude
    // maxima are classified through the zero-mean companion field, so
    // that family exists only for the noise-only gauss window.
    let zero_mode = if noise_only {
        CountMode::Uncharged
    } else {
        CountMode::Charged
    };
    let with_maxima = noise_only && window_kind == StftWindow::Gauss;

    let mut config = ExperimentConfig::new("spectrogram");
    config.stft_window = Some(window_kind.tag().to_string());
    config.signal = Some(mean.tag());
    if !noise_only {
        config.amplitude = Some(args.amplitude);
    }
    config.search_window = Some(window_tag(&geometry.window));
    config.radii = Some(radii.clone());
    config.realizations = Some(args.realizations);
    config.seed = Some(args.seed);
    config.grid_step = Some(geometry.grid.step);
    config.grid_half_width = Some(geometry.grid.half_width);
    config.mask_radius = geometry.grid.mask_radius;
    config.fit_min = Some(fit_min);
    config.fit_max = Some(fit_max);

    let results: Vec<(ZeroSet, Option<(ZeroSet, u32)>)> =
        run_ensemble(args.realizations, |stream| {
            let field = sample_stft_field(window_kind, &mean, &geometry.grid, args.seed, stream)
                .map_err(|e| numerical(stream, e))?;
            let zeros = find_zeros(&field, &geometry.window).map_err(|e| numerical(stream, e))?;
            ensure_resolved(stream, &zeros)?;
            let maxima = if with_maxima {
                // The same coefficient draw rebuilt at order 1 classifies
                // the amplitude landscape of this very realization.
                let points = classify_critical_points(
                    &sample_gef(k_max, args.seed, stream),
                    &geometry.grid,
                    &geometry.window,
                )
                .map_err(|e| numerical(stream, e))?;
                ensure_resolved(stream, &points.zeros)?;
                Some((points.zeros, points.hessian_disagreements))
            } else {
                None
            };
            Ok((zeros, maxima))
        })?;

    let mut zero_sets = Vec::with_capacity(results.len());
    let mut maxima_sets = Vec::new();
    let mut disagreements = 0u32;
    for (zeros, maxima) in results {
        zero_sets.push(zeros);
        if let Some((set, count)) = maxima {
            maxima_sets.push(set);
            disagreements += count;
        }
    }

    let mut warnings = Vec::new();
    if !noise_only && window_kind == StftWindow::Gauss {
        warnings.push(
            "maxima family skipped: critical-point classification covers the noise-only field"
                .to_string(),
        );
    }

    let mut families = vec![(zero_mode, &zero_sets)];
    if with_maxima {
        families.push((CountMode::Max, &maxima_sets));
    }
    let mut family_values = Vec::new();
    let mut summaries = Vec::new();
    for (mode, sets) in families {
        let table = count_in_disks(sets, &[Complex64::ZERO], &radii, mode).map_err(config_err)?;
        let summary = summarize(&table).map_err(config_err)?;
        warnings.extend(summary.warnings.iter().cloned());
        let fit = fit_or_warning(&summary, fit_min, fit_max, &mut warnings);
        family_values.push(json!({
            "mode": mode.tag(),
            "moments": moments_json(&summary),
            "fit": fit,
        }));
        summaries.push(summary);
    }
    let csv = table_csv(&config, &summaries.iter().collect::<Vec<_>>());
    let svg = chart_or_warning(&csv, &mut warnings);

    let mut root = json!({
        "config": config,
        "families": family_values,
        "warnings": warnings,
    });
    if with_maxima {
        root["hessian_disagreements"] = json!(disagreements);
    }
    Ok(Artifacts {
        json: Some(pretty(&root)),
        csv: Some(csv),
        svg,
    })
}

pub fn run_chaos(args: &ChaosArgs) -> Result<Artifacts> {
    let kernel = TwistedKernel::parse(&args.kernel).map_err(config_err)?;
    let density = chaos::two_point_chaos_density(&kernel).map_err(config_err)?;
    let verdict = HyperuniformityVerdict::from_density(kernel.spec_string(), &density);

    let mut config = ExperimentConfig::new("chaos");
    config.kernel = Some(kernel.spec_string());
    config.chaos_order = Some(args.order);
    config.q22_radius = args.q22_radius;
    config.monte_carlo = args.monte_carlo;
    if args.monte_carlo.is_some() {
        config.grid_step = Some(args.step);
        config.seed = Some(args.seed);
    }

    let mut root = json!({
        "config": config,
        "kernel": kernel.spec_string(),
        "weights": {
            "var_d1": format_rational(&kernel.var_d1()),
            "var_d2": format_rational(&kernel.var_d2()),
        },
        "radial_integral": format_rational(&density.integral()),
        "planar_integral_over_pi": format_rational(&density.planar_integral_over_pi()),
        "verdict": verdict,
    });
    if args.emit_table {
        let table = chaos::chaos_coefficients(&kernel.var_d1(), &kernel.var_d2(), args.order)
            .map_err(config_err)?;
        let entries: Vec<Value> = table
            .entries()
            .map(|(k, l, v)| json!({"k": k, "l": l, "value": format_rational(v)}))
            .collect();
        root["coefficients"] = Value::Array(entries);
    }
    if args.emit_g {
        root["density"] = json!({
            "variable": "s = |z - w|^2",
            "weight": "exp(-2 s)",
            "coefficients": density.poly().coeff_strings(),
        });
    }
    if let Some(radius) = args.q22_radius {
        if !(radius > 0.0) {
            return Err(CliError::Config(format!(
                "the q22 radius must be positive, got {radius}"
            )));
        }
        let analytic = chaos::q22_analytic(&kernel, radius)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        let asymptote = chaos::q22_asymptote(&kernel, radius).map_err(config_err)?;
        let mut q22 = json!({
            "radius": radius,
            "analytic": analytic,
            "area_asymptote": asymptote,
        });
        if let Some(realizations) = args.monte_carlo {
            let mc = chaos::q22_monte_carlo(&kernel, radius, args.step, realizations, args.seed)
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            q22["monte_carlo"] = json!({
                "variance": mc.variance,
                "std_error": mc.std_error,
                "realizations": mc.realizations,
            });
        }
        root["q22"] = q22;
    } else if args.monte_carlo.is_some() {
        return Err(CliError::Config(
            "--monte-carlo needs --q22-radius to name the disk".into(),
        ));
    }
    Ok(Artifacts {
        json: Some(pretty(&root)),
        csv: None,
        svg: None,
    })
}

pub fn run_validate(args: &ValidateArgs) -> Result<Artifacts> {
    let kernel = TwistedKernel::parse(&args.kernel).map_err(config_err)?;
    if !(args.radius > 0.0) || !(args.step > 0.0) || args.step > args.radius {
        return Err(CliError::Config(format!(
            "the validation sweep needs 0 < step <= radius, got step {} and radius {}",
            args.step, args.radius
        )));
    }
    let report = kernel.validate_assumptions(args.radius, args.step);

    let mut config = ExperimentConfig::new("validate-kernel");
    config.kernel = Some(kernel.spec_string());
    config.search_window = Some(format!("disk:0,0,{}", args.radius));
    config.grid_step = Some(args.step);

    let root = json!({
        "config": config,
        "report": {
            "kernel": report.kernel,
            "normalization_ok": report.normalization_ok,
            "strict_bound_margin": report.strict_bound_margin,
            "decay_constants": report.decay_constants,
            "min_gram_eigenvalue": report.min_gram_eigenvalue,
            "psd_ok": report.psd_ok,
        },
        "admissible": report.normalization_ok
            && report.strict_bound_margin > 0.0
            && report.psd_ok,
    });
    Ok(Artifacts {
        json: Some(pretty(&root)),
        csv: None,
        svg: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use gwhf_core::statistics::RadiusMoments;

    fn varscan_args() -> VarscanArgs {
        VarscanArgs {
            kernel: "gauss".into(),
            count_mode: "uncharged".into(),
            mean: "none".into(),
            radii: "1.5,2".into(),
            realizations: 2,
            seed: 9,
            step: 0.1,
            half_width: None,
            mask: None,
            fit_min: None,
            fit_max: None,
            centered: false,
            out: None,
        }
    }

    #[test]
    fn geometry_defaults_pad_the_largest_radius() {
        let g = ensemble_geometry(12.0, 0.1, None, None).unwrap();
        assert!((g.grid.half_width - 13.2).abs() < 1e-9);
        assert_eq!(g.grid.mask_radius, Some(g.grid.half_width));
        match g.window {
            Window::Disk { radius, .. } => assert!((radius - 12.5).abs() < 1e-12),
            Window::Rect { .. } => panic!("expected a disk window"),
        }
    }

    #[test]
    fn undersized_masks_are_rejected() {
        let err = ensemble_geometry(12.0, 0.1, None, Some(12.1)).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn saddle_counting_demands_the_gauss_kernel() {
        let mut args = varscan_args();
        args.kernel = "laguerre:1".into();
        args.count_mode = "saddle".into();
        let err = run_varscan(&args).unwrap_err();
        assert!(err.to_string().contains("gauss"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn centered_variance_demands_the_charged_mode() {
        let mut args = varscan_args();
        args.centered = true;
        let err = run_varscan(&args).unwrap_err();
        assert!(err.to_string().contains("charged"));
    }

    #[test]
    fn general_profiles_cannot_be_sampled() {
        let mut args = varscan_args();
        args.kernel = "poly:1,1/4".into();
        let err = run_varscan(&args).unwrap_err();
        assert!(err.to_string().contains("pure-type"));
    }

    #[test]
    fn csv_tables_embed_the_config_and_one_row_per_radius() {
        let config = ExperimentConfig::new("varscan");
        let summary = MomentSummary {
            mode: CountMode::Uncharged,
            per_radius: vec![
                RadiusMoments {
                    radius: 2.0,
                    mean: 4.0,
                    variance: 3.0,
                    index_of_dispersion: 0.75,
                    ci_low: 0.5,
                    ci_high: 1.0,
                },
                RadiusMoments {
                    radius: 3.0,
                    mean: 9.0,
                    variance: 5.0,
                    index_of_dispersion: 5.0 / 9.0,
                    ci_low: 0.4,
                    ci_high: 0.7,
                },
            ],
            realizations: 10,
            centered_against: None,
            warnings: Vec::new(),
        };
        let csv = table_csv(&config, &[&summary]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("# config {"));
        assert_eq!(lines[1], "radius,mean,var,iod,ci_lo,ci_hi,n_realizations,mode");
        assert!(lines[2].starts_with("2,4,3,0.75,"));
        assert!(lines[3].ends_with(",10,uncharged"));
    }

    #[test]
    fn small_varscan_runs_end_to_end() {
        let artifacts = run_varscan(&varscan_args()).unwrap();
        let json: Value = serde_json::from_str(artifacts.json.as_deref().unwrap()).unwrap();
        assert_eq!(json["config"]["command"], "varscan");
        assert_eq!(json["realizations"], 2);
        assert_eq!(json["moments"]["per_radius"].as_array().unwrap().len(), 2);

        let csv = artifacts.csv.as_deref().unwrap();
        let config_line = csv.lines().next().unwrap();
        let embedded: ExperimentConfig =
            serde_json::from_str(config_line.trim_start_matches("# config ")).unwrap();
        assert_eq!(embedded.command, "varscan");
        assert_eq!(embedded.realizations, Some(2));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn chaos_reports_carry_the_exact_integral() {
        let args = ChaosArgs {
            kernel: "laguerre:1".into(),
            order: 2,
            emit_g: true,
            emit_table: true,
            q22_radius: None,
            monte_carlo: None,
            step: 0.1,
            seed: 7,
            out: None,
        };
        let artifacts = run_chaos(&args).unwrap();
        let text = artifacts.json.unwrap();
        assert!(text.contains("\"radial_integral\": \"7/81\""));
        assert!(text.contains("\"non_hyperuniform\": true"));
        let json: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(json["coefficients"].as_array().unwrap().len(), 6);
        assert_eq!(json["density"]["coefficients"].as_array().unwrap().len(), 9);
    }

    #[test]
    fn the_gauss_kernel_chaos_request_is_rejected_cleanly() {
        let args = ChaosArgs {
            kernel: "gauss".into(),
            order: 2,
            emit_g: false,
            emit_table: false,
            q22_radius: None,
            monte_carlo: None,
            step: 0.1,
            seed: 7,
            out: None,
        };
        let err = run_chaos(&args).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("charged theory"));
    }
}
