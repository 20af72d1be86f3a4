//! Second-order statistics of zero ensembles: disk counts, variance and
//! index of dispersion with bootstrap confidence intervals, and log-log
//! growth-exponent fits that separate linear from quadratic number
//! variance.
//!
//! Counting is exact integer work over [`ZeroSet`]s; everything downstream
//! is conventional estimation. A homogeneous Poisson control process with
//! matching intensity calibrates the whole pipeline: its index of
//! dispersion is 1 at every radius, so any systematic deviation would
//! expose a counting or summarization bug rather than field physics.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::zeros::{ChargedZero, Window, ZeroSet};
use crate::{Error, Result};

/// Number of bootstrap resamples behind every confidence interval.
pub const BOOTSTRAP_RESAMPLES: usize = 1000;
// fixed internal stream so identical tables always yield identical CIs
const BOOTSTRAP_SEED: u64 = 0x0b00_7b00;

/// What a disk count tallies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMode {
    /// Sum of charges, the net topological count.
    Charged,
    /// Number of zeros regardless of charge.
    Uncharged,
    /// Number of critical points labeled as saddles.
    Saddle,
    /// Number of critical points labeled as local maxima.
    Max,
}

impl CountMode {
    pub fn tag(&self) -> &'static str {
        match self {
            CountMode::Charged => "charged",
            CountMode::Uncharged => "uncharged",
            CountMode::Saddle => "saddle",
            CountMode::Max => "max",
        }
    }

    pub fn parse(text: &str) -> Result<CountMode> {
        match text {
            "charged" => Ok(CountMode::Charged),
            "uncharged" => Ok(CountMode::Uncharged),
            "saddle" => Ok(CountMode::Saddle),
            "max" => Ok(CountMode::Max),
            other => Err(Error::Unsupported(format!(
                "unknown count mode `{other}` (expected charged, uncharged, saddle, or max)"
            ))),
        }
    }

    fn tally(&self, zero: &ChargedZero) -> Result<i64> {
        match self {
            CountMode::Charged => Ok(zero.charge as i64),
            CountMode::Uncharged => Ok(1),
            CountMode::Saddle | CountMode::Max => match zero.label {
                Some(label) => {
                    let wanted = if *self == CountMode::Saddle { "saddle" } else { "max" };
                    Ok((label == wanted) as i64)
                }
                None => Err(Error::Unsupported(
                    "critical-point counting needs a classified zero set".into(),
                )),
            },
        }
    }
}

/// Integer disk counts for an ensemble, one row per (realization, center)
/// pair in realization-major order and one column per radius.
#[derive(Debug, Clone)]
pub struct DiskCountTable {
    pub mode: CountMode,
    /// Strictly ascending disk radii.
    pub radii: Vec<f64>,
    /// Disk centers applied to every realization.
    pub centers: Vec<Complex64>,
    /// Number of independent realizations behind the rows.
    pub realizations: usize,
    pub counts: Vec<Vec<i64>>,
}

/// Moments of one disk radius across the ensemble.
#[derive(Debug, Clone)]
pub struct RadiusMoments {
    pub radius: f64,
    pub mean: f64,
    /// Unbiased sample variance, or the known-mean variance when centered.
    pub variance: f64,
    /// variance / mean, the headline dispersion statistic.
    pub index_of_dispersion: f64,
    /// 95% percentile bootstrap interval for the index of dispersion.
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Ensemble moments per radius with provenance and warnings.
#[derive(Debug, Clone)]
pub struct MomentSummary {
    pub mode: CountMode,
    pub per_radius: Vec<RadiusMoments>,
    pub realizations: usize,
    /// Set when the variance was computed against a known analytic mean.
    pub centered_against: Option<String>,
    pub warnings: Vec<String>,
}

/// Least-squares slope of log variance against log radius.
#[derive(Debug, Clone)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub std_error: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub radii_used: usize,
    /// Per-radius residuals of log variance around the fitted line.
    pub residuals: Vec<f64>,
}

/// Tallies every zero set over disks at each center and radius.
///
/// Counting is boundary inclusive: a zero at distance exactly R from the
/// center belongs to the disk (zeros of a nondegenerate field lie on a
/// fixed circle with probability zero, so the rule is immaterial and
/// merely recorded). Every disk, padded by one grid step of the zero
/// set that produced the row, must lie inside that set's search window.
pub fn count_in_disks(
    zero_sets: &[ZeroSet],
    centers: &[Complex64],
    radii: &[f64],
    mode: CountMode,
) -> Result<DiskCountTable> {
    if zero_sets.is_empty() || centers.is_empty() || radii.is_empty() {
        return Err(Error::Degenerate(
            "disk counting needs at least one zero set, center, and radius".into(),
        ));
    }
    if !radii.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Degenerate("radii must be strictly ascending".into()));
    }
    let mut counts = Vec::with_capacity(zero_sets.len() * centers.len());
    for set in zero_sets {
        for &center in centers {
            for &radius in radii {
                if !set.window.encloses_disk(center, radius + set.grid_step) {
                    return Err(Error::WindowTooSmall { radius });
                }
            }
            let mut row = vec![0i64; radii.len()];
            for zero in &set.zeros {
                let dist = (zero.location() - center).norm();
                let tally = mode.tally(zero)?;
                // radii are ascending, so one partition point suffices
                let first = radii.partition_point(|&r| r + 1e-12 < dist);
                for slot in &mut row[first..] {
                    *slot += tally;
                }
            }
            counts.push(row);
        }
    }
    Ok(DiskCountTable {
        mode,
        radii: radii.to_vec(),
        centers: centers.to_vec(),
        realizations: zero_sets.len(),
        counts,
    })
}

/// Ensemble moments with the variance taken around the sample mean.
pub fn summarize(table: &DiskCountTable) -> Result<MomentSummary> {
    summarize_impl(table, None)
}

/// Ensemble moments with the variance taken around a known analytic mean,
/// a variance-reduction device flagged in the output. The index of
/// dispersion uses the analytic mean as its denominator.
pub fn summarize_with_mean(
    table: &DiskCountTable,
    analytic_mean: impl Fn(f64) -> f64,
    description: &str,
) -> Result<MomentSummary> {
    summarize_impl(table, Some((&analytic_mean, description)))
}

fn summarize_impl(
    table: &DiskCountTable,
    centered: Option<(&dyn Fn(f64) -> f64, &str)>,
) -> Result<MomentSummary> {
    let rows = table.counts.len();
    if rows < 2 {
        return Err(Error::Degenerate(format!(
            "moment summary needs at least 2 realizations, got {rows}"
        )));
    }
    let mut warnings = Vec::new();
    let mut per_radius = Vec::with_capacity(table.radii.len());
    let mut rng = ChaCha12Rng::seed_from_u64(BOOTSTRAP_SEED);
    for (j, &radius) in table.radii.iter().enumerate() {
        let column: Vec<f64> = table.counts.iter().map(|row| row[j] as f64).collect();
        let mean = column.iter().sum::<f64>() / rows as f64;
        let (variance, denominator) = match centered {
            Some((analytic, _)) => {
                let mu = analytic(radius);
                let ss = column.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>();
                (ss / rows as f64, mu)
            }
            None => {
                let ss = column.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
                (ss / (rows - 1) as f64, mean)
            }
        };
        if variance == 0.0 {
            warnings.push(format!(
                "all counts identical at radius {radius}; sample variance is 0"
            ));
        }
        let index_of_dispersion = if denominator == 0.0 {
            warnings.push(format!(
                "mean count is 0 at radius {radius}; dispersion undefined"
            ));
            f64::NAN
        } else {
            variance / denominator
        };
        let (ci_low, ci_high) = bootstrap_dispersion_interval(table, j, centered, &mut rng);
        per_radius.push(RadiusMoments {
            radius,
            mean,
            variance,
            index_of_dispersion,
            ci_low,
            ci_high,
        });
    }
    Ok(MomentSummary {
        mode: table.mode,
        per_radius,
        realizations: table.realizations,
        centered_against: centered.map(|(_, d)| d.to_string()),
        warnings,
    })
}

// percentile bootstrap over realizations: rows from one realization stay
// together so correlated centers are resampled as a block
fn bootstrap_dispersion_interval(
    table: &DiskCountTable,
    column: usize,
    centered: Option<(&dyn Fn(f64) -> f64, &str)>,
    rng: &mut ChaCha12Rng,
) -> (f64, f64) {
    let block = table.centers.len();
    let blocks = table.realizations;
    let mut stats = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    let mut resample = Vec::with_capacity(blocks * block);
    for _ in 0..BOOTSTRAP_RESAMPLES {
        resample.clear();
        for _ in 0..blocks {
            let pick = rng.random_range(0..blocks);
            for r in 0..block {
                resample.push(table.counts[pick * block + r][column] as f64);
            }
        }
        let n = resample.len() as f64;
        let mean = resample.iter().sum::<f64>() / n;
        let (variance, denominator) = match centered {
            Some((analytic, _)) => {
                let mu = analytic(table.radii[column]);
                let ss = resample.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>();
                (ss / n, mu)
            }
            None => {
                let ss = resample.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
                (ss / (n - 1.0), mean)
            }
        };
        if denominator != 0.0 {
            stats.push(variance / denominator);
        }
    }
    if stats.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    stats.sort_by(f64::total_cmp);
    let quantile = |q: f64| stats[(q * (stats.len() - 1) as f64).round() as usize];
    (quantile(0.025), quantile(0.975))
}

/// Fits log Var = slope * log R + intercept over radii in [r_min, r_max].
pub fn fit_growth_exponent(
    summary: &MomentSummary,
    r_min: f64,
    r_max: f64,
) -> Result<ExponentFit> {
    if r_min >= r_max {
        return Err(Error::Degenerate(format!(
            "exponent fit needs r_min < r_max, got [{r_min}, {r_max}]"
        )));
    }
    let in_range: Vec<&RadiusMoments> = summary
        .per_radius
        .iter()
        .filter(|m| m.radius >= r_min - 1e-12 && m.radius <= r_max + 1e-12)
        .collect();
    if in_range.len() < 5 {
        return Err(Error::Degenerate(format!(
            "exponent fit needs at least 5 radii in range, found {}",
            in_range.len()
        )));
    }
    for m in &in_range {
        if m.variance <= 0.0 {
            return Err(Error::Degenerate(format!(
                "variance is not positive at radius {}; cannot take its logarithm",
                m.radius
            )));
        }
    }
    let points: Vec<(f64, f64)> = in_range
        .iter()
        .map(|m| (m.radius.ln(), m.variance.ln()))
        .collect();
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum::<f64>();
    let sxy = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum::<f64>();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residuals: Vec<f64> = points
        .iter()
        .map(|p| p.1 - (slope * p.0 + intercept))
        .collect();
    let rss = residuals.iter().map(|r| r * r).sum::<f64>();
    let std_error = (rss / (n - 2.0) / sxx).sqrt();
    Ok(ExponentFit {
        slope,
        intercept,
        std_error,
        r_min,
        r_max,
        radii_used: points.len(),
        residuals,
    })
}

/// Samples homogeneous Poisson point processes of the given intensity in a
/// disk window, packaged as unit-charge zero sets for pipeline
/// calibration: their index of dispersion is exactly 1 at every radius.
pub fn poisson_control_sets(
    intensity: f64,
    window_radius: f64,
    realizations: usize,
    seed: u64,
) -> Result<Vec<ZeroSet>> {
    if intensity <= 0.0 || window_radius <= 0.0 {
        return Err(Error::Degenerate(format!(
            "Poisson control needs positive intensity and radius, got {intensity} and {window_radius}"
        )));
    }
    let window = Window::Disk {
        center: Complex64::ZERO,
        radius: window_radius,
    };
    let max_area = std::f64::consts::PI * window_radius * window_radius;
    let mut sets = Vec::with_capacity(realizations);
    for stream in 0..realizations {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream as u64);
        // successive points in area coordinates are a unit-rate Poisson
        // process rescaled by the intensity, so radii come from cumulative
        // exponential gaps and angles are uniform
        let mut zeros = Vec::new();
        let mut area = 0.0;
        loop {
            let u: f64 = rng.random();
            area += -(1.0 - u).ln() / intensity;
            if area > max_area {
                break;
            }
            let radius = (area / std::f64::consts::PI).sqrt();
            let angle = std::f64::consts::TAU * rng.random::<f64>();
            zeros.push(ChargedZero {
                re: radius * angle.cos(),
                im: radius * angle.sin(),
                charge: 1,
                jacobian: 1.0,
                residual: 0.0,
                label: None,
            });
        }
        sets.push(ZeroSet {
            zeros,
            unresolved: 0,
            window,
            dedup_radius: 0.0,
            grid_step: 0.0,
            seed,
            stream: stream as u64,
            kernel: "poisson-control".into(),
        });
    }
    Ok(sets)
}
