//! Sampling of truncated random entire functions and the fields built
//! from their covariant derivatives.
//!
//! The base object is G(z) = sum_k xi_k z^k / sqrt(k!) with i.i.d. standard
//! complex Gaussian coefficients. The order-n field is
//! F(z) = e^{-|z|^2/2} (zbar - d/dz)^n G(z) / sqrt(n!), and its twisted
//! derivatives obey the ladder identities D1 F_n = -sqrt(n+1) F_{n+1} and
//! D2 F_n = sqrt(n) F_{n-1}, so one coefficient vector yields F, D1 F and
//! D2 F consistently. Deterministic means are folded in as an additive
//! entire function G1 before the ladder is applied; short-time Fourier
//! transform fields reuse the same machinery through the kernel
//! identifications for the Gaussian and first Hermite windows.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::{Error, Result};

/// One draw of a standard complex Gaussian: E xi = 0, E |xi|^2 = 1,
/// E |xi|^4 = 2. Box-Muller in polar form, the squared modulus being a
/// unit-rate exponential.
pub fn standard_complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    let radius = (-(1.0 - u1).ln()).sqrt();
    Complex64::from_polar(radius, std::f64::consts::TAU * u2)
}

/// Square lattice of evaluation points, optionally masked to a disk around
/// its center so that points irrelevant to a disk experiment are skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub center: Complex64,
    pub half_width: f64,
    pub step: f64,
    pub mask_radius: Option<f64>,
}

impl Grid {
    pub fn new(center: Complex64, half_width: f64, step: f64) -> Result<Grid> {
        if !(half_width > 0.0) || !(step > 0.0) || step > 2.0 * half_width {
            return Err(Error::Degenerate(format!(
                "grid needs 0 < step <= 2 * half_width, got step {step}, half width {half_width}"
            )));
        }
        Ok(Grid {
            center,
            half_width,
            step,
            mask_radius: None,
        })
    }

    pub fn with_mask(mut self, radius: f64) -> Grid {
        self.mask_radius = Some(radius);
        self
    }

    /// Number of lattice points along each side.
    pub fn side(&self) -> usize {
        (2.0 * self.half_width / self.step).round() as usize + 1
    }

    /// Point at (row, col); rows sweep the imaginary direction.
    pub fn point(&self, row: usize, col: usize) -> Complex64 {
        self.center
            + Complex64::new(
                col as f64 * self.step - self.half_width,
                row as f64 * self.step - self.half_width,
            )
    }

    pub fn is_masked(&self, z: Complex64) -> bool {
        match self.mask_radius {
            Some(r) => (z - self.center).norm() > r + 1e-9,
            None => false,
        }
    }

    /// Largest |z| over unmasked lattice points, which is what the
    /// truncation rule must cover.
    pub fn max_active_abs(&self) -> f64 {
        let side = self.side();
        let mut max = 0.0f64;
        for row in 0..side {
            for col in 0..side {
                let z = self.point(row, col);
                if !self.is_masked(z) {
                    max = max.max(z.norm());
                }
            }
        }
        max
    }
}

/// Coefficients of a truncated random entire function, reproducible from
/// (seed, stream).
#[derive(Debug, Clone, PartialEq)]
pub struct GefCoefficients {
    values: Vec<Complex64>,
    pub seed: u64,
    pub stream: u64,
}

impl GefCoefficients {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn truncation_order(&self) -> u32 {
        (self.values.len() - 1) as u32
    }

    /// All-zero coefficients, for isolating deterministic mean fields.
    pub fn zero(k_max: u32) -> GefCoefficients {
        GefCoefficients {
            values: vec![Complex64::ZERO; k_max as usize + 1],
            seed: 0,
            stream: 0,
        }
    }
}

/// Draws coefficients xi_0..xi_k_max. Realization i of an ensemble uses
/// stream i, so ensembles are reproducible regardless of scheduling, and a
/// longer draw from the same stream extends a shorter one.
pub fn sample_gef(k_max: u32, seed: u64, stream: u64) -> GefCoefficients {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let values = (0..=k_max)
        .map(|_| standard_complex_normal(&mut rng))
        .collect();
    GefCoefficients {
        values,
        seed,
        stream,
    }
}

/// Truncation order adequate for evaluation on |z| <= radius: the series
/// tail beyond k of |z|^k / sqrt(k!) is super-exponentially small once
/// k exceeds |z|^2, and this rule leaves margin for the derivative sweeps.
pub fn required_truncation(radius: f64) -> u32 {
    (radius + 6.0).powi(2).ceil() as u32 + 32
}

// ln k! by Stirling's series, accurate to ~1e-9 relative for k >= 8
fn ln_factorial(k: f64) -> f64 {
    if k < 8.0 {
        return (1..=(k as u64)).map(|j| (j as f64).ln()).sum();
    }
    k * k.ln() - k + 0.5 * (std::f64::consts::TAU * k).ln() + 1.0 / (12.0 * k)
}

/// Estimated sup-norm of the dropped series tail on |z| <= radius, for the
/// weighted series e^{-|z|^2/2} sum xi_k z^k / sqrt(k!) and its first
/// derivative sweeps (the polynomial factor covers orders up to n).
pub fn truncation_tail_estimate(k_terms: u32, radius: f64, n: u32) -> f64 {
    let k1 = (k_terms + 1) as f64;
    let q = radius / (k1 + 1.0).sqrt();
    if q >= 1.0 {
        return f64::INFINITY;
    }
    let log_first = if radius > 0.0 {
        k1 * radius.ln() - 0.5 * ln_factorial(k1) - 0.5 * radius * radius
    } else {
        return 0.0;
    };
    log_first.exp() / (1.0 - q) * k1.powf((n as f64 + 1.0) / 2.0)
}

/// Deterministic mean, expressed as the entire function G1 added to the
/// random series before the derivative ladder is applied.
#[derive(Debug, Clone, PartialEq)]
pub enum MeanSpec {
    None,
    /// G1 identically equal to the constant.
    Constant(Complex64),
    /// G1(z) = e^{z conj(w) - |w|^2/2}, a unit-mass bump at w.
    CoherentState(Complex64),
    /// A time-domain signal added to a short-time Fourier transform field;
    /// only sample_stft_field accepts this variant.
    StftSignal(SignalSpec),
}

impl MeanSpec {
    pub fn tag(&self) -> String {
        match self {
            MeanSpec::None => "none".into(),
            MeanSpec::Constant(c) if c.im == 0.0 => format!("constant:{}", c.re),
            MeanSpec::Constant(c) => format!("constant:{},{}", c.re, c.im),
            MeanSpec::CoherentState(w) => format!("coherent:{},{}", w.re, w.im),
            MeanSpec::StftSignal(sig) => sig.tag(),
        }
    }
}

/// Analysis window for short-time Fourier transform fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StftWindow {
    /// 2^{1/4} e^{-pi t^2}; the noise field is the order-0 field.
    Gauss,
    /// 2^{1/4} 2 sqrt(pi) t e^{-pi t^2}; the noise field is the order-1
    /// field.
    Hermite1,
}

impl StftWindow {
    pub fn parse(text: &str) -> Result<StftWindow> {
        match text {
            "gauss" => Ok(StftWindow::Gauss),
            "hermite1" => Ok(StftWindow::Hermite1),
            other => Err(Error::Unsupported(format!(
                "unknown window {other:?}; available: gauss, hermite1"
            ))),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            StftWindow::Gauss => "gauss",
            StftWindow::Hermite1 => "hermite1",
        }
    }

    fn field_order(&self) -> u32 {
        match self {
            StftWindow::Gauss => 0,
            StftWindow::Hermite1 => 1,
        }
    }

    fn eval(&self, t: f64) -> f64 {
        let gauss = (-std::f64::consts::PI * t * t).exp();
        match self {
            StftWindow::Gauss => GAUSS_WINDOW_NORM * gauss,
            StftWindow::Hermite1 => {
                GAUSS_WINDOW_NORM * 2.0 * std::f64::consts::PI.sqrt() * t * gauss
            }
        }
    }

    fn eval_derivative(&self, t: f64) -> f64 {
        let two_pi_t = 2.0 * std::f64::consts::PI * t;
        match self {
            StftWindow::Gauss => -two_pi_t * self.eval(t),
            StftWindow::Hermite1 => {
                let gauss = (-std::f64::consts::PI * t * t).exp();
                GAUSS_WINDOW_NORM
                    * 2.0
                    * std::f64::consts::PI.sqrt()
                    * (1.0 - two_pi_t * t)
                    * gauss
            }
        }
    }
}

const GAUSS_WINDOW_NORM: f64 = 1.189_207_115_002_721_1; // 2^{1/4}

/// Deterministic test signal for spectrogram experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec {
    pub kind: SignalKind,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SignalKind {
    /// Time-frequency shifted copy of the Gaussian window: a bump at
    /// (time, frequency) in the time-frequency plane.
    Atom { time: f64, frequency: f64 },
    /// Gaussian-enveloped linear chirp e^{i pi rate t^2} with envelope
    /// width `duration`.
    Chirp { rate: f64, duration: f64 },
}

impl SignalSpec {
    pub fn tag(&self) -> String {
        match &self.kind {
            SignalKind::Atom { time, frequency } => {
                format!("stft-atom:{time},{frequency},{}", self.amplitude)
            }
            SignalKind::Chirp { rate, duration } => {
                format!("stft-chirp:{rate},{duration},{}", self.amplitude)
            }
        }
    }

    fn eval(&self, t: f64) -> Complex64 {
        let value = match self.kind {
            SignalKind::Atom { time, frequency } => {
                let bump = StftWindow::Gauss.eval(t - time);
                Complex64::from_polar(bump, std::f64::consts::TAU * frequency * t)
            }
            SignalKind::Chirp { rate, duration } => {
                let envelope = (-std::f64::consts::PI * (t / duration).powi(2)).exp();
                Complex64::from_polar(envelope, std::f64::consts::PI * rate * t * t)
            }
        };
        self.amplitude * value
    }

    // highest frequency the quadrature must resolve, for step selection
    fn max_frequency(&self, half_support: f64) -> f64 {
        match self.kind {
            SignalKind::Atom { frequency, .. } => frequency.abs(),
            SignalKind::Chirp { rate, .. } => rate.abs() * half_support,
        }
    }
}

/// A sampled field, its twisted derivatives, and the provenance needed to
/// reproduce it. Masked lattice points hold NaN.
#[derive(Debug, Clone)]
pub struct FieldRealization {
    pub grid: Grid,
    pub f: Vec<Complex64>,
    pub d1: Vec<Complex64>,
    pub d2: Vec<Complex64>,
    pub kernel: String,
    pub mean: String,
    pub seed: u64,
    pub stream: u64,
    pub truncation_order: u32,
}

impl FieldRealization {
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.grid.side() + col
    }

    /// Builds a deterministic field from closed-form jets, for tests and
    /// synthetic validation cases. The closure returns (F, D1 F, D2 F).
    pub fn from_fn<J>(grid: Grid, kernel: &str, jet: J) -> FieldRealization
    where
        J: Fn(Complex64) -> (Complex64, Complex64, Complex64),
    {
        let side = grid.side();
        let nan = Complex64::new(f64::NAN, f64::NAN);
        let mut f = vec![nan; side * side];
        let mut d1 = f.clone();
        let mut d2 = f.clone();
        for row in 0..side {
            for col in 0..side {
                let z = grid.point(row, col);
                if grid.is_masked(z) {
                    continue;
                }
                let (fv, d1v, d2v) = jet(z);
                let at = row * side + col;
                f[at] = fv;
                d1[at] = d1v;
                d2[at] = d2v;
            }
        }
        FieldRealization {
            grid,
            f,
            d1,
            d2,
            kernel: kernel.to_string(),
            mean: "synthetic".into(),
            seed: 0,
            stream: 0,
            truncation_order: 0,
        }
    }

    /// Binary-free JSON envelope for debugging dumps; values are
    /// [re, im] pairs and masked points become nulls.
    pub fn to_json_envelope(&self) -> serde_json::Value {
        let pairs = |values: &[Complex64]| -> Vec<[f64; 2]> {
            values.iter().map(|v| [v.re, v.im]).collect()
        };
        serde_json::json!({
            "grid": {
                "center": [self.grid.center.re, self.grid.center.im],
                "half_width": self.grid.half_width,
                "step": self.grid.step,
                "mask_radius": self.grid.mask_radius,
                "side": self.grid.side(),
            },
            "kernel": self.kernel,
            "mean": self.mean,
            "seed": self.seed,
            "stream": self.stream,
            "truncation_order": self.truncation_order,
            "f": pairs(&self.f),
            "d1": pairs(&self.d1),
            "d2": pairs(&self.d2),
        })
    }
}

// Precomputed per-order data for the weighted series sweeps: term ratio
// tables for g_a(z) = e^{-|z|^2/2} G^(a)(z) and ladder combination weights.
struct SeriesTables {
    // ratios[a][j] = sqrt(j+1+a) / (j+1)
    ratios: Vec<Vec<f64>>,
    sqrt_start: Vec<f64>,
    n: u32,
}

impl SeriesTables {
    fn new(terms: usize, n: u32) -> SeriesTables {
        let a_max = n + 1;
        let ratios = (0..=a_max)
            .map(|a| {
                (0..terms)
                    .map(|j| ((j + 1 + a as usize) as f64).sqrt() / (j + 1) as f64)
                    .collect()
            })
            .collect();
        let sqrt_start = (0..=a_max)
            .map(|a| (1..=a).map(f64::from).product::<f64>().sqrt())
            .collect();
        SeriesTables { ratios, sqrt_start, n }
    }

    // g_a(z) = e^{-|z|^2/2} G^(a)(z), the weight folded into the running
    // term so no intermediate overflows or underflows
    fn weighted_series(&self, values: &[Complex64], a: u32, z: Complex64, e: f64) -> Complex64 {
        let ratios = &self.ratios[a as usize];
        let mut term = Complex64::new(self.sqrt_start[a as usize] * e, 0.0);
        let mut acc = Complex64::ZERO;
        for (j, xi) in values[a as usize..].iter().enumerate() {
            acc += xi * term;
            term *= z * ratios[j];
        }
        acc
    }

    // mean contribution to g_a for the closed-form mean variants
    fn mean_g(&self, mean: &MeanSpec, a: u32, z: Complex64, e: f64) -> Complex64 {
        match mean {
            MeanSpec::None | MeanSpec::StftSignal(_) => Complex64::ZERO,
            MeanSpec::Constant(c) => {
                if a == 0 {
                    c * e
                } else {
                    Complex64::ZERO
                }
            }
            MeanSpec::CoherentState(w) => {
                let wbar = w.conj();
                let g1 = (z * wbar - 0.5 * (w.norm_sqr() + z.norm_sqr())).exp();
                wbar.powu(a) * g1
            }
        }
    }

    // the jet (F, D1 F, D2 F) at z from the ladder identities
    fn jet(
        &self,
        values: &[Complex64],
        mean: &MeanSpec,
        z: Complex64,
    ) -> (Complex64, Complex64, Complex64) {
        let n = self.n;
        let e = (-0.5 * z.norm_sqr()).exp();
        let g: Vec<Complex64> = (0..=n + 1)
            .map(|a| self.weighted_series(values, a, z, e) + self.mean_g(mean, a, z, e))
            .collect();
        let zbar = z.conj();
        // ladder combination: (zbar - d/dz)^m G = sum_a (-1)^a C(m,a)
        // zbar^{m-a} G^(a)
        let ladder = |m: u32| -> Complex64 {
            let mut acc = Complex64::ZERO;
            let mut weight = 1.0f64;
            for a in 0..=m {
                let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * weight * zbar.powu(m - a) * g[a as usize];
                weight = weight * (m - a) as f64 / (a + 1) as f64;
            }
            acc
        };
        let inv_sqrt_nfact = 1.0 / (1..=n).map(f64::from).product::<f64>().sqrt();
        let f = inv_sqrt_nfact * ladder(n);
        let d1 = -inv_sqrt_nfact * ladder(n + 1);
        let d2 = if n == 0 {
            Complex64::ZERO
        } else {
            n as f64 * inv_sqrt_nfact * ladder(n - 1)
        };
        (f, d1, d2)
    }
}

fn check_truncation(coeffs: &GefCoefficients, radius: f64, n: u32) -> Result<()> {
    let tail = truncation_tail_estimate(coeffs.truncation_order(), radius, n);
    if tail > 1e-12 {
        return Err(Error::TruncationInadequate {
            got: coeffs.truncation_order() as usize,
            required: required_truncation(radius) as usize,
            radius,
        });
    }
    Ok(())
}

/// Evaluates the order-n field F = F0 + F1 and its twisted derivatives on
/// the grid. Refuses when the coefficient truncation cannot cover the
/// grid's largest |z|; masked lattice points are left as NaN.
pub fn evaluate_gwhf(
    coeffs: &GefCoefficients,
    n: u32,
    mean: &MeanSpec,
    grid: &Grid,
) -> Result<FieldRealization> {
    if matches!(mean, MeanSpec::StftSignal(_)) {
        return Err(Error::Unsupported(
            "signal means belong to short-time Fourier transform fields; \
             use sample_stft_field"
                .into(),
        ));
    }
    check_truncation(coeffs, grid.max_active_abs(), n)?;
    let tables = SeriesTables::new(coeffs.values.len(), n);
    let side = grid.side();
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let mut f = vec![nan; side * side];
    let mut d1 = f.clone();
    let mut d2 = f.clone();
    for row in 0..side {
        for col in 0..side {
            let z = grid.point(row, col);
            if grid.is_masked(z) {
                continue;
            }
            let (fv, d1v, d2v) = tables.jet(&coeffs.values, mean, z);
            if !(fv.is_finite() && d1v.is_finite() && d2v.is_finite()) {
                return Err(Error::Degenerate(format!(
                    "field evaluation produced a non-finite value at z = {z}; \
                     the mean is not bounded on this window"
                )));
            }
            let at = row * side + col;
            f[at] = fv;
            d1[at] = d1v;
            d2[at] = d2v;
        }
    }
    Ok(FieldRealization {
        grid: grid.clone(),
        f,
        d1,
        d2,
        kernel: crate::kernels::TwistedKernel::pure(n).spec_string(),
        mean: mean.tag(),
        seed: coeffs.seed,
        stream: coeffs.stream,
        truncation_order: coeffs.truncation_order(),
    })
}

/// Point-wise variant of [`evaluate_gwhf`] for tests and Monte-Carlo
/// estimators that only need a few locations. Returns (F, D1 F, D2 F)
/// aligned with the input points.
pub fn evaluate_at_points(
    coeffs: &GefCoefficients,
    n: u32,
    mean: &MeanSpec,
    points: &[Complex64],
) -> Result<(Vec<Complex64>, Vec<Complex64>, Vec<Complex64>)> {
    if matches!(mean, MeanSpec::StftSignal(_)) {
        return Err(Error::Unsupported(
            "signal means belong to short-time Fourier transform fields; \
             use sample_stft_field"
                .into(),
        ));
    }
    let radius = points.iter().map(|z| z.norm()).fold(0.0, f64::max);
    check_truncation(coeffs, radius, n)?;
    let tables = SeriesTables::new(coeffs.values.len(), n);
    let mut f = Vec::with_capacity(points.len());
    let mut d1 = Vec::with_capacity(points.len());
    let mut d2 = Vec::with_capacity(points.len());
    for &z in points {
        let (fv, d1v, d2v) = tables.jet(&coeffs.values, mean, z);
        f.push(fv);
        d1.push(d1v);
        d2.push(d2v);
    }
    Ok((f, d1, d2))
}

// V_w f(u, v) = integral of f(t) conj(w(t - u)) e^{-2 pi i t v} dt by the
// trapezoid rule with step h over [u - T, u + T]; the window factor decays
// like e^{-pi (t-u)^2} so T = 8 puts the truncation far below rounding.
fn stft_point<F, W>(signal: &F, window: &W, u: f64, v: f64, h: f64) -> Complex64
where
    F: Fn(f64) -> Complex64,
    W: Fn(f64) -> f64,
{
    let half_support = 8.0;
    let steps = (2.0 * half_support / h).round() as usize;
    let mut acc = Complex64::ZERO;
    for i in 0..=steps {
        let t = u - half_support + i as f64 * h;
        let phase = Complex64::from_polar(1.0, -std::f64::consts::TAU * t * v);
        let value = signal(t) * window(t - u) * phase;
        let weight = if i == 0 || i == steps { 0.5 } else { 1.0 };
        acc += weight * value;
    }
    acc * h
}

// the three mean fields (F1, D1 F1, D2 F1) of a signal under the window,
// via the window-derivative identities
// D1 F_w = sqrt(pi) F_{t w} - F_{w'} / (2 sqrt(pi)) and
// D2 F_w = -sqrt(pi) F_{t w} - F_{w'} / (2 sqrt(pi)),
// each transform mapped to the plane by F(z) = e^{-ixy} V f(x/sqrt(pi),
// -y/sqrt(pi))
fn stft_mean_fields(
    signal: &SignalSpec,
    window: StftWindow,
    grid: &Grid,
) -> Result<(Vec<Complex64>, Vec<Complex64>, Vec<Complex64>)> {
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let side = grid.side();
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let mut f = vec![nan; side * side];
    let mut d1 = f.clone();
    let mut d2 = f.clone();

    let v_max = (grid.center.im.abs() + grid.half_width) / sqrt_pi;
    let f_max = v_max + signal.max_frequency(8.0) + 2.0;
    let h = 1.0 / (10.0 * f_max);
    let sig = |t: f64| signal.eval(t);
    let w = |t: f64| window.eval(t);
    let pw = |t: f64| t * window.eval(t);
    let dw = |t: f64| window.eval_derivative(t);

    let mut worst = 0.0f64;
    for row in 0..side {
        for col in 0..side {
            let z = grid.point(row, col);
            if grid.is_masked(z) {
                continue;
            }
            let (x, y) = (z.re, z.im);
            let (u, v) = (x / sqrt_pi, -y / sqrt_pi);
            let plane = Complex64::from_polar(1.0, -x * y);

            let coarse = stft_point(&sig, &w, u, v, h);
            let fine = stft_point(&sig, &w, u, v, 0.5 * h);
            worst = worst.max((coarse - fine).norm() / (1.0 + fine.norm()));
            let vg = fine;
            let vpw = stft_point(&sig, &pw, u, v, 0.5 * h);
            let vdw = stft_point(&sig, &dw, u, v, 0.5 * h);

            let f1 = plane * vg;
            let f_pw = plane * vpw;
            let f_dw = plane * vdw;
            let at = row * side + col;
            f[at] = f1;
            d1[at] = sqrt_pi * f_pw - f_dw / (2.0 * sqrt_pi);
            d2[at] = -sqrt_pi * f_pw - f_dw / (2.0 * sqrt_pi);
        }
    }
    if worst > 1e-8 {
        return Err(Error::QuadratureUnconverged(format!(
            "transform quadrature disagreement {worst:e} between steps \
             {h} and {}; refine the step rule",
            0.5 * h
        )));
    }
    Ok((f, d1, d2))
}

/// Samples a short-time Fourier transform field of white noise under the
/// given window, plus an optional deterministic signal. The pure-noise
/// part delegates to [`evaluate_gwhf`] through the window's field-order
/// identification; the signal contributes an additive mean computed by
/// quadrature of the transform integral.
pub fn sample_stft_field(
    window: StftWindow,
    signal: &MeanSpec,
    grid: &Grid,
    seed: u64,
    stream: u64,
) -> Result<FieldRealization> {
    let k_max = required_truncation(grid.max_active_abs());
    let coeffs = sample_gef(k_max, seed, stream);
    stft_field_with_coeffs(window, signal, grid, &coeffs)
}

fn stft_field_with_coeffs(
    window: StftWindow,
    signal: &MeanSpec,
    grid: &Grid,
    coeffs: &GefCoefficients,
) -> Result<FieldRealization> {
    let spec = match signal {
        MeanSpec::None => None,
        MeanSpec::StftSignal(spec) => Some(spec),
        other => {
            return Err(Error::Unsupported(format!(
                "short-time Fourier transform fields take a signal or no \
                 mean, got {:?}",
                other.tag()
            )))
        }
    };
    let mut field = evaluate_gwhf(coeffs, window.field_order(), &MeanSpec::None, grid)?;
    if let Some(spec) = spec {
        let (f1, d1m, d2m) = stft_mean_fields(spec, window, grid)?;
        for i in 0..field.f.len() {
            if field.f[i].is_finite() {
                field.f[i] += f1[i];
                field.d1[i] += d1m[i];
                field.d2[i] += d2m[i];
            }
        }
        field.mean = spec.tag();
    }
    Ok(field)
}
