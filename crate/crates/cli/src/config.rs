//! The experiment configuration embedded in every artifact, plus parsers
//! for the small textual specs (radii ranges, means, signals, windows)
//! that appear on the command line.

use gwhf_core::sampler::{MeanSpec, SignalKind, SignalSpec};
use gwhf_core::zeros::Window;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

/// Resolved parameters of one run. Unused fields stay `None` so the JSON
/// form carries exactly the knobs that shaped the run; the struct
/// round-trips through JSON losslessly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: String,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kernel: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mean: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stft_window: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub signal: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub count_mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub search_window: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub radii: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub realizations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stream: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid_half_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mask_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fit_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fit_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub centered: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub classify: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub chaos_order: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q22_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub monte_carlo: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub amplitude: Option<f64>,
}

impl ExperimentConfig {
    pub fn new(command: &str) -> Self {
        ExperimentConfig {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            kernel: None,
            mean: None,
            stft_window: None,
            signal: None,
            count_mode: None,
            search_window: None,
            radii: None,
            realizations: None,
            seed: None,
            stream: None,
            grid_step: None,
            grid_half_width: None,
            mask_radius: None,
            fit_min: None,
            fit_max: None,
            centered: None,
            classify: None,
            chaos_order: None,
            q22_radius: None,
            monte_carlo: None,
            amplitude: None,
        }
    }

    /// The compact JSON form embedded in artifacts.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

fn bad(what: &str, text: &str, hint: &str) -> CliError {
    CliError::Config(format!("invalid {what} `{text}`: {hint}"))
}

fn parse_f64(what: &str, text: &str) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| bad(what, text, "expected a finite number"))
}

/// Parses `min:max:step` (inclusive arithmetic range) or a comma list into
/// strictly ascending positive radii.
pub fn parse_radii(text: &str) -> Result<Vec<f64>> {
    let radii: Vec<f64> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("radii", text, "expected min:max:step or a comma list"));
        }
        let min = parse_f64("radii", parts[0])?;
        let max = parse_f64("radii", parts[1])?;
        let step = parse_f64("radii", parts[2])?;
        if step <= 0.0 || max < min {
            return Err(bad("radii", text, "need min <= max and step > 0"));
        }
        let count = ((max - min) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| min + step * k as f64).collect()
    } else {
        text.split(',')
            .map(|part| parse_f64("radii", part))
            .collect::<Result<Vec<f64>>>()?
    };
    if radii.is_empty() || radii[0] <= 0.0 {
        return Err(bad("radii", text, "radii must be positive"));
    }
    if !radii.windows(2).all(|w| w[0] < w[1]) {
        return Err(bad("radii", text, "radii must be strictly ascending"));
    }
    Ok(radii)
}

fn parse_complex(what: &str, text: &str) -> Result<Complex64> {
    let parts: Vec<&str> = text.split(',').collect();
    match parts.as_slice() {
        [re] => Ok(Complex64::new(parse_f64(what, re)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse_f64(what, re)?, parse_f64(what, im)?)),
        _ => Err(bad(what, text, "expected `re` or `re,im`")),
    }
}

/// Parses `none`, `constant:<re>[,<im>]`, or `coherent:<re>,<im>`.
pub fn parse_mean(text: &str) -> Result<MeanSpec> {
    if text == "none" {
        return Ok(MeanSpec::None);
    }
    if let Some(rest) = text.strip_prefix("constant:") {
        return Ok(MeanSpec::Constant(parse_complex("mean", rest)?));
    }
    if let Some(rest) = text.strip_prefix("coherent:") {
        return Ok(MeanSpec::CoherentState(parse_complex("mean", rest)?));
    }
    Err(bad(
        "mean",
        text,
        "expected none, constant:<re>[,<im>], or coherent:<re>,<im>",
    ))
}

/// Parses `none`, `atom:<time>,<frequency>`, or `chirp:<rate>,<duration>`
/// with the amplitude applied on top.
pub fn parse_signal(text: &str, amplitude: f64) -> Result<Option<SignalSpec>> {
    if text == "none" {
        return Ok(None);
    }
    if !amplitude.is_finite() {
        return Err(bad("amplitude", &amplitude.to_string(), "must be finite"));
    }
    let kind = if let Some(rest) = text.strip_prefix("atom:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 2 {
            return Err(bad("signal", text, "expected atom:<time>,<frequency>"));
        }
        SignalKind::Atom {
            time: parse_f64("signal", parts[0])?,
            frequency: parse_f64("signal", parts[1])?,
        }
    } else if let Some(rest) = text.strip_prefix("chirp:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 2 {
            return Err(bad("signal", text, "expected chirp:<rate>,<duration>"));
        }
        SignalKind::Chirp {
            rate: parse_f64("signal", parts[0])?,
            duration: parse_f64("signal", parts[1])?,
        }
    } else {
        return Err(bad(
            "signal",
            text,
            "expected none, atom:<time>,<frequency>, or chirp:<rate>,<duration>",
        ));
    };
    Ok(Some(SignalSpec { kind, amplitude }))
}

/// Parses `disk:<cx>,<cy>,<radius>` or `rect:<cx>,<cy>,<half_width>`.
pub fn parse_window(text: &str) -> Result<Window> {
    let split = |rest: &str| -> Result<(Complex64, f64)> {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 3 {
            return Err(bad("window", text, "expected three comma-separated numbers"));
        }
        Ok((
            Complex64::new(
                parse_f64("window", parts[0])?,
                parse_f64("window", parts[1])?,
            ),
            parse_f64("window", parts[2])?,
        ))
    };
    if let Some(rest) = text.strip_prefix("disk:") {
        let (center, radius) = split(rest)?;
        if radius <= 0.0 {
            return Err(bad("window", text, "radius must be positive"));
        }
        return Ok(Window::Disk { center, radius });
    }
    if let Some(rest) = text.strip_prefix("rect:") {
        let (center, half_width) = split(rest)?;
        if half_width <= 0.0 {
            return Err(bad("window", text, "half width must be positive"));
        }
        return Ok(Window::Rect { center, half_width });
    }
    Err(bad(
        "window",
        text,
        "expected disk:<cx>,<cy>,<r> or rect:<cx>,<cy>,<h>",
    ))
}

/// Worker-pool size from the GWHF_WORKERS environment variable; absent
/// means one thread per logical core.
pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var("GWHF_WORKERS") {
        Ok(text) => {
            let n: usize = text
                .trim()
                .parse()
                .map_err(|_| bad("GWHF_WORKERS", &text, "expected a positive integer"))?;
            if n == 0 {
                return Err(bad("GWHF_WORKERS", &text, "expected a positive integer"));
            }
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn configs_round_trip_through_json() {
        let mut config = ExperimentConfig::new("varscan");
        config.kernel = Some("laguerre:1".into());
        config.mean = Some("none".into());
        config.count_mode = Some("uncharged".into());
        config.radii = Some(vec![2.0, 3.0, 4.5]);
        config.realizations = Some(800);
        config.seed = Some(41);
        config.grid_step = Some(0.1);
        config.grid_half_width = Some(13.0);
        config.mask_radius = Some(13.0);
        config.fit_min = Some(4.0);
        config.fit_max = Some(12.0);
        config.centered = Some(false);
        let json = config.to_json();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, config);
    }

    #[test]
    fn radii_ranges_are_inclusive() {
        assert_eq!(
            parse_radii("4:12:2").unwrap(),
            vec![4.0, 6.0, 8.0, 10.0, 12.0]
        );
        assert_eq!(parse_radii("1.5,2.5").unwrap(), vec![1.5, 2.5]);
        assert!(parse_radii("3:1:1").is_err());
        assert!(parse_radii("0:4:1").is_err());
        assert!(parse_radii("2,2").is_err());
    }

    #[test]
    fn mean_specs_parse() {
        assert_eq!(parse_mean("none").unwrap().tag(), "none");
        assert_eq!(parse_mean("constant:1").unwrap().tag(), "constant:1");
        assert_eq!(
            parse_mean("coherent:0.5,-1").unwrap().tag(),
            "coherent:0.5,-1"
        );
        assert!(parse_mean("bump:3").is_err());
    }

    #[test]
    fn windows_parse() {
        assert!(matches!(
            parse_window("disk:0,0,3").unwrap(),
            Window::Disk { radius, .. } if radius == 3.0
        ));
        assert!(matches!(
            parse_window("rect:1,-1,2").unwrap(),
            Window::Rect { half_width, .. } if half_width == 2.0
        ));
        assert!(parse_window("disk:0,0,-3").is_err());
        assert!(parse_window("ball:0,0,3").is_err());
    }

    #[test]
    fn signals_parse() {
        assert!(parse_signal("none", 1.0).unwrap().is_none());
        let atom = parse_signal("atom:0,2", 3.0).unwrap().unwrap();
        assert_eq!(atom.tag(), "stft-atom:0,2,3");
        assert!(parse_signal("atom:1", 1.0).is_err());
        assert!(parse_signal("warble:1,2", 1.0).is_err());
    }
}
