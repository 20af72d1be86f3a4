//! Exact second-chaos analysis of zero counts.
//!
//! Everything in this module except the Monte-Carlo cross-checks runs in
//! exact rational arithmetic. The pipeline is:
//!
//! * [`chaos_coefficients`] - the coefficients c_{k,l} of the expansion of
//!   |a s - b t| in products of Laguerre polynomials against the
//!   two-dimensional exponential weight, computed in closed form by
//!   splitting the absolute value along t = (a/b) s and reducing the outer
//!   tail to incomplete-gamma sums.
//! * [`diagram_value`] - closed-form Gaussian expectations of products of
//!   first and second Laguerre polynomials in the squared moduli of the
//!   normalized field vector at two points; each value is a polynomial in
//!   s = |z - w|^2 times e^{-2s}.
//! * [`two_point_chaos_density`] - the full two-point density g of the
//!   order-2 chaos component of the uncharged zero count, assembled from
//!   the six-term pointwise observable and the diagram values.
//! * [`integral_g`] / [`hyperuniformity_verdict`] - the exact integral of g
//!   and the resulting verdict: a nonzero integral forces the count
//!   variance to grow like the disk area, ruling out hyperuniformity.
//! * [`q22_analytic`] - the variance of the order-2 chaos component of the
//!   count in a disk of radius R, via the exact density and a lens-area
//!   reduction of the double disk integral.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::kernels::TwistedKernel;
use crate::numeric::adaptive_simpson;
use crate::sampler::standard_complex_normal;
use crate::polynomials::{
    exp_moment, factorial, format_rational, laguerre, rat_int, rational_to_f64, Rational,
    RationalPoly,
};
use crate::{Error, Result};

/// Component of the normalized field vector (F, D1 F / sqrt(a), D2 F / sqrt(b)).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Field,
    D1,
    D2,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::Field, Component::D1, Component::D2];

    fn index(self) -> usize {
        match self {
            Component::Field => 0,
            Component::D1 => 1,
            Component::D2 => 2,
        }
    }
}

/// One factor of the order-2 observable at a single point: either a product
/// of first Laguerre polynomials in two distinct components, or a second
/// Laguerre polynomial in one component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChaosFactor {
    PairL1(Component, Component),
    SingleL2(Component),
}

/// A two-point Gaussian expectation spec: one factor at z, one at w.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagramSpec {
    pub at_z: ChaosFactor,
    pub at_w: ChaosFactor,
}

// A normalized cross-covariance entry or a product of entries, phase and
// e^{-s/2} factors stripped:
//   a^{-a_half/2} b^{-b_half/2} u^{z_pow} conj(u)^{zbar_pow} radial(s)
#[derive(Debug, Clone)]
struct ProdTerm {
    a_half: u32,
    b_half: u32,
    z_pow: u32,
    zbar_pow: u32,
    radial: RationalPoly,
}

impl ProdTerm {
    fn mul(&self, rhs: &ProdTerm) -> ProdTerm {
        ProdTerm {
            a_half: self.a_half + rhs.a_half,
            b_half: self.b_half + rhs.b_half,
            z_pow: self.z_pow + rhs.z_pow,
            zbar_pow: self.zbar_pow + rhs.zbar_pow,
            radial: &self.radial * &rhs.radial,
        }
    }

    fn helicity(&self) -> i64 {
        i64::from(self.z_pow) - i64::from(self.zbar_pow)
    }
}

// |p1 + p2|^2 (or |p1|^2 when p2 is None) as a polynomial in s times
// integer powers of 1/a and 1/b. The result is rational only because the
// summed terms always agree in helicity and in half-power parity; both are
// asserted rather than assumed.
fn modulus_squared(
    p1: &ProdTerm,
    p2: Option<&ProdTerm>,
    a: &Rational,
    b: &Rational,
) -> Result<RationalPoly> {
    let scale = |poly: &RationalPoly, a_half: u32, b_half: u32| -> Result<RationalPoly> {
        if a_half % 2 != 0 || b_half % 2 != 0 {
            return Err(Error::Degenerate(format!(
                "odd normalizer half-powers ({a_half}, {b_half}) in a squared modulus"
            )));
        }
        let factor = a.pow(-((a_half / 2) as i32)) * b.pow(-((b_half / 2) as i32));
        Ok(poly.scale(&factor))
    };

    let sq = |p: &ProdTerm| -> Result<RationalPoly> {
        let s_pow = (p.z_pow + p.zbar_pow) as usize;
        let poly = &p.radial * &p.radial;
        scale(
            &(&poly * &RationalPoly::monomial(rat_int(1), s_pow)),
            2 * p.a_half,
            2 * p.b_half,
        )
    };

    let mut out = sq(p1)?;
    if let Some(p2) = p2 {
        out = &out + &sq(p2)?;
        if p1.helicity() != p2.helicity() {
            return Err(Error::Degenerate(format!(
                "helicity mismatch {} vs {} in a squared modulus",
                p1.helicity(),
                p2.helicity()
            )));
        }
        // 2 Re(p1 conj(p2)): the matched helicity turns the monomial part
        // into s^{z_pow(p1) + zbar_pow(p2)}
        let s_pow = (p1.z_pow + p2.zbar_pow) as usize;
        let cross = (&p1.radial * &p2.radial).scale(&rat_int(2));
        out = &out
            + &scale(
                &(&cross * &RationalPoly::monomial(rat_int(1), s_pow)),
                p1.a_half + p2.a_half,
                p1.b_half + p2.b_half,
            )?;
    }
    Ok(out)
}

// Normalized cross-covariance entries E[X_i(z) conj(X_j(w))] in closed form,
// indexed by (i, j), with the e^{-s/2} and twist-phase factors stripped.
fn normalized_entries(kernel: &TwistedKernel) -> Result<[[ProdTerm; 3]; 3]> {
    let a = kernel.var_d1();
    let b = kernel.var_d2();
    if !a.is_positive() || !b.is_positive() {
        return Err(Error::Degenerate(format!(
            "chaos analysis needs positive derivative variances, got ({}, {})",
            format_rational(&a),
            format_rational(&b)
        )));
    }
    let forms = kernel.derivative_forms();
    let term = |f: &crate::kernels::TwistedDerivative, a_half, b_half| ProdTerm {
        a_half,
        b_half,
        z_pow: f.z_pow,
        zbar_pow: f.zbar_pow,
        radial: f.radial.clone(),
    };
    // reflect-conjugate: entry (0, j) is conj(Dj H(-u)), which swaps the
    // monomial powers and flips sign by the parity of the total power
    let reflect = |t: &ProdTerm| {
        let sign = if (t.z_pow + t.zbar_pow) % 2 == 1 {
            -&t.radial
        } else {
            t.radial.clone()
        };
        ProdTerm {
            a_half: t.a_half,
            b_half: t.b_half,
            z_pow: t.zbar_pow,
            zbar_pow: t.z_pow,
            radial: sign,
        }
    };
    let neg = |t: ProdTerm| ProdTerm {
        radial: -&t.radial,
        ..t
    };

    let e00 = term(&forms.h, 0, 0);
    let e10 = term(&forms.d1, 1, 0);
    let e20 = term(&forms.d2, 0, 1);
    let e01 = reflect(&e10);
    let e02 = reflect(&e20);
    let e11 = neg(term(&forms.d1_d1bar, 2, 0));
    let e22 = neg(term(&forms.d2_d2bar, 0, 2));
    let e12 = neg(term(&forms.d1_d2bar, 1, 1));
    let e21 = neg(term(&forms.d2_d1bar, 1, 1));
    Ok([[e00, e01, e02], [e10, e11, e12], [e20, e21, e22]])
}

/// Closed-form Gaussian expectation E[T_z(z) T_w(w)] for Laguerre-type
/// factors of the normalized field vector, as a polynomial in s = |z - w|^2;
/// the suppressed weight is e^{-2s}.
///
/// The three shapes are: product of four first Laguerre polynomials
/// (pair x pair), two firsts against one second (pair x single), and two
/// seconds (single x single). Pairs must name distinct components, which is
/// what makes the same-point labels uncorrelated.
pub fn diagram_value(kernel: &TwistedKernel, spec: &DiagramSpec) -> Result<RationalPoly> {
    let a = kernel.var_d1();
    let b = kernel.var_d2();
    let entries = normalized_entries(kernel)?;
    let entry = |i: Component, j: Component| &entries[i.index()][j.index()];
    let check_pair = |x: Component, y: Component| -> Result<()> {
        if x == y {
            return Err(Error::Degenerate(
                "a same-point Laguerre pair must name two distinct components".into(),
            ));
        }
        Ok(())
    };

    match (spec.at_z, spec.at_w) {
        (ChaosFactor::PairL1(al, be), ChaosFactor::PairL1(ga, de)) => {
            check_pair(al, be)?;
            check_pair(ga, de)?;
            let p1 = entry(al, ga).mul(entry(be, de));
            let p2 = entry(al, de).mul(entry(be, ga));
            modulus_squared(&p1, Some(&p2), &a, &b)
        }
        (ChaosFactor::PairL1(al, be), ChaosFactor::SingleL2(ga)) => {
            check_pair(al, be)?;
            let p = entry(al, ga).mul(entry(be, ga));
            Ok(modulus_squared(&p, None, &a, &b)?.scale(&rat_int(2)))
        }
        (ChaosFactor::SingleL2(ga), ChaosFactor::PairL1(al, be)) => {
            check_pair(al, be)?;
            let p = entry(ga, al).mul(entry(ga, be));
            Ok(modulus_squared(&p, None, &a, &b)?.scale(&rat_int(2)))
        }
        (ChaosFactor::SingleL2(al), ChaosFactor::SingleL2(ga)) => {
            let e = entry(al, ga);
            modulus_squared(&e.mul(e), None, &a, &b)
        }
    }
}

/// Exact table of chaos coefficients c_{k,l} for weights a, b:
/// the integral of |a s - b t| L_k(s) L_l(t) e^{-s-t} over the positive
/// quadrant, for all k + l <= max_order.
#[derive(Debug, Clone)]
pub struct ChaosCoefficients {
    pub a: Rational,
    pub b: Rational,
    pub max_order: u32,
    values: BTreeMap<(u32, u32), Rational>,
}

impl ChaosCoefficients {
    pub fn value(&self, k: u32, l: u32) -> Option<&Rational> {
        self.values.get(&(k, l))
    }

    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, &Rational)> {
        self.values.iter().map(|(&(k, l), v)| (k, l, v))
    }
}

/// Computes one c_{k,l} exactly.
///
/// Splitting |a s - b t| along t = rho s with rho = a/b gives
///   c = I(full) - 2 I(t > rho s),
/// where the inner t-integrals reduce to factorials and incomplete-gamma
/// sums: with q(s, t) = (a s - b t) L_l(t) = sum_m q_m(s) t^m,
///   integral of q e^{-t} over [0, inf)      = sum_m q_m(s) m!
///   integral of q e^{-t} over [rho s, inf)  = e^{-rho s} sum_m q_m(s) m!
///                                             sum_{j<=m} (rho s)^j / j!
/// and the remaining s-integrals are exponential moments at rates 1 and
/// 1 + rho.
fn chaos_coefficient(a: &Rational, b: &Rational, k: u32, l: u32) -> Result<Rational> {
    let rho = a / b;
    let ll = laguerre(l);
    let lk = laguerre(k);

    // q_m(s) = a L_l[m] s - b L_l[m-1], a degree-one polynomial in s
    let q_of = |m: usize| -> RationalPoly {
        let lead = ll.coeff(m) * a;
        let drag = if m == 0 {
            Rational::zero()
        } else {
            -(ll.coeff(m - 1) * b)
        };
        RationalPoly::from_coeffs(vec![drag, lead])
    };
    let top = ll.degree().map_or(0, |d| d + 1);

    let mut full = RationalPoly::zero();
    let mut tail = RationalPoly::zero();
    for m in 0..=top {
        let qm = q_of(m);
        let mfact = Rational::from_integer(factorial(m as u32));
        full = &full + &qm.scale(&mfact);
        // truncated exponential sum_{j<=m} x^j / j! evaluated at x = rho s
        let trunc = RationalPoly::from_coeffs(
            (0..=m)
                .map(|j| Rational::new(One::one(), factorial(j as u32)))
                .collect(),
        )
        .compose_scaled(&rho);
        tail = &tail + &(&qm.scale(&mfact) * &trunc);
    }

    let first = exp_moment(&(&lk * &full), &rat_int(1))?;
    let second = exp_moment(&(&lk * &tail), &(rat_int(1) + &rho))?;
    Ok(first - second * rat_int(2))
}

/// Full coefficient table for k + l <= max_order. Requires a, b > 0.
pub fn chaos_coefficients(
    a: &Rational,
    b: &Rational,
    max_order: u32,
) -> Result<ChaosCoefficients> {
    if !a.is_positive() || !b.is_positive() {
        return Err(Error::Degenerate(format!(
            "chaos coefficients need positive weights, got ({}, {})",
            format_rational(a),
            format_rational(b)
        )));
    }
    let mut values = BTreeMap::new();
    for k in 0..=max_order {
        for l in 0..=(max_order - k) {
            values.insert((k, l), chaos_coefficient(a, b, k, l)?);
        }
    }
    Ok(ChaosCoefficients {
        a: a.clone(),
        b: b.clone(),
        max_order,
        values,
    })
}

/// A radial density p(s) e^{-2s}, exact in the polynomial part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadialDensity {
    poly: RationalPoly,
}

impl RadialDensity {
    pub fn new(poly: RationalPoly) -> Self {
        RadialDensity { poly }
    }

    pub fn poly(&self) -> &RationalPoly {
        &self.poly
    }

    /// Integral over [0, infinity), exact.
    pub fn integral(&self) -> Rational {
        exp_moment(&self.poly, &rat_int(2)).expect("rate 2 is positive")
    }

    /// Planar integral of s -> density(|z|^2) over the plane, as a rational
    /// multiple of pi.
    pub fn planar_integral_over_pi(&self) -> Rational {
        self.integral()
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.poly.eval_f64(s) * (-2.0 * s).exp()
    }
}

// The six weighted factors of the order-2 chaos observable:
//   phi = c00 L2(|xi|^2) + c20 L2(|xi'|^2) + c02 L2(|xi''|^2)
//       + c10 L1(|xi|^2) L1(|xi'|^2) + c01 L1(|xi|^2) L1(|xi''|^2)
//       + c11 L1(|xi'|^2) L1(|xi''|^2)
fn observable_terms(c: &ChaosCoefficients) -> Result<Vec<(ChaosFactor, Rational)>> {
    let get = |k: u32, l: u32| -> Result<Rational> {
        c.value(k, l).cloned().ok_or_else(|| {
            Error::Degenerate(format!("coefficient table missing c_({k},{l})"))
        })
    };
    Ok(vec![
        (ChaosFactor::SingleL2(Component::Field), get(0, 0)?),
        (ChaosFactor::SingleL2(Component::D1), get(2, 0)?),
        (ChaosFactor::SingleL2(Component::D2), get(0, 2)?),
        (
            ChaosFactor::PairL1(Component::Field, Component::D1),
            get(1, 0)?,
        ),
        (
            ChaosFactor::PairL1(Component::Field, Component::D2),
            get(0, 1)?,
        ),
        (ChaosFactor::PairL1(Component::D1, Component::D2), get(1, 1)?),
    ])
}

fn require_pure_order(kernel: &TwistedKernel) -> Result<u32> {
    match kernel.pure_order() {
        Some(n) if (1..=5).contains(&n) => Ok(n),
        Some(0) => Err(Error::Degenerate(
            "the Gaussian kernel has a degenerate second derivative variance; \
             its zero set is treated by the charged theory instead"
                .into(),
        )),
        _ => Err(Error::Unsupported(
            "two-point chaos density is implemented for pure-type kernels of order 1..=5"
                .into(),
        )),
    }
}

/// Exact two-point density g of the order-2 chaos component of the
/// uncharged zero count: E[phi(z) phi(w)] = g(|z - w|^2), where phi is the
/// six-term order-2 observable. Pure-type kernels of order 1..=5.
pub fn two_point_chaos_density(kernel: &TwistedKernel) -> Result<RadialDensity> {
    require_pure_order(kernel)?;
    let c = chaos_coefficients(&kernel.var_d1(), &kernel.var_d2(), 2)?;
    let terms = observable_terms(&c)?;
    let mut g = RationalPoly::zero();
    for (fi, wi) in &terms {
        for (fj, wj) in &terms {
            let d = diagram_value(
                kernel,
                &DiagramSpec {
                    at_z: *fi,
                    at_w: *fj,
                },
            )?;
            g = &g + &d.scale(&(wi * wj));
        }
    }
    Ok(RadialDensity::new(g))
}

/// Exact integral over [0, infinity) of the two-point chaos density.
pub fn integral_g(kernel: &TwistedKernel) -> Result<Rational> {
    Ok(two_point_chaos_density(kernel)?.integral())
}

/// Verdict on hyperuniformity of the uncharged zero count.
#[derive(Debug, Clone, serde::Serialize)]
pub struct HyperuniformityVerdict {
    pub kernel: String,
    /// Integral of the two-point chaos density over [0, infinity), as p/q.
    pub radial_integral: String,
    /// The planar integral is this rational times pi.
    pub planar_integral_over_pi: String,
    /// True when the integral is nonzero: the order-2 chaos variance then
    /// grows like the disk area, so the process is not hyperuniform.
    pub non_hyperuniform: bool,
    /// Set when the integral vanishes: a zero integral at this chaos order
    /// decides nothing by itself.
    pub caveat: Option<String>,
}

impl HyperuniformityVerdict {
    pub fn from_density(kernel: String, density: &RadialDensity) -> Self {
        let integral = density.integral();
        let non_hyperuniform = !integral.is_zero();
        HyperuniformityVerdict {
            kernel,
            radial_integral: format_rational(&integral),
            planar_integral_over_pi: format_rational(&integral),
            non_hyperuniform,
            caveat: (!non_hyperuniform).then(|| {
                "integral vanishes at chaos order 2; higher orders would be needed \
                 to decide hyperuniformity"
                    .to_string()
            }),
        }
    }
}

/// Computes the exact density for a pure-type kernel and reports the verdict.
pub fn hyperuniformity_verdict(kernel: &TwistedKernel) -> Result<HyperuniformityVerdict> {
    let density = two_point_chaos_density(kernel)?;
    Ok(HyperuniformityVerdict::from_density(
        kernel.spec_string(),
        &density,
    ))
}

/// Area of the intersection of two disks of radius r whose centers are
/// distance d apart.
pub fn lens_area(r: f64, d: f64) -> f64 {
    if d >= 2.0 * r {
        return 0.0;
    }
    if d <= 0.0 {
        return std::f64::consts::PI * r * r;
    }
    2.0 * r * r * (d / (2.0 * r)).acos() - 0.5 * d * (4.0 * r * r - d * d).sqrt()
}

/// Variance of the order-2 chaos component of the count in a disk of
/// radius R, from the exact density:
/// (1/pi^2) double integral of g(|z - w|^2) over the disk squared,
/// reduced to one dimension through the autocorrelation (lens area) of the
/// disk indicator.
pub fn q22_analytic(kernel: &TwistedKernel, radius: f64) -> Result<f64> {
    let g = two_point_chaos_density(kernel)?;
    let upper = (2.0 * radius).min(8.0);
    let integrand =
        |t: f64| g.eval(t * t) * lens_area(radius, t) * 2.0 * std::f64::consts::PI * t;
    let tol = 1e-11 * (1.0 + radius * radius);
    let integral = adaptive_simpson(&integrand, 0.0, upper, tol)?;
    Ok(integral / (std::f64::consts::PI * std::f64::consts::PI))
}

/// Leading-order growth of [`q22_analytic`]: (radial integral of g) * R^2.
pub fn q22_asymptote(kernel: &TwistedKernel, radius: f64) -> Result<f64> {
    Ok(rational_to_f64(&integral_g(kernel)?) * radius * radius)
}

/// Monte-Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

// value of one observable factor on a normalized jet (F, D1 F / sqrt(a),
// D2 F / sqrt(b)); the Laguerre polynomials are L1(x) = 1 - x and
// L2(x) = 1 - 2x + x^2/2
fn factor_value(factor: &ChaosFactor, jet: &[Complex64; 3]) -> f64 {
    match factor {
        ChaosFactor::PairL1(x, y) => {
            (1.0 - jet[x.index()].norm_sqr()) * (1.0 - jet[y.index()].norm_sqr())
        }
        ChaosFactor::SingleL2(x) => {
            let s = jet[x.index()].norm_sqr();
            1.0 - 2.0 * s + 0.5 * s * s
        }
    }
}

/// Estimates E[T_z(z) T_w(w)] by direct sampling of the joint Gaussian law
/// of the normalized field vectors at z and w, as an independent check of
/// [`diagram_value`]. The six-dimensional covariance comes from the
/// numeric kernel path, its Cholesky factor colors i.i.d. standard
/// complex Gaussians, and the factors are averaged over the draws.
pub fn diagram_monte_carlo(
    kernel: &TwistedKernel,
    spec: &DiagramSpec,
    z: Complex64,
    w: Complex64,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    let cross = kernel.cross_covariance_normalized(z, w)?;
    let cov = nalgebra::DMatrix::from_fn(6, 6, |r, c| {
        if r < 3 && c < 3 {
            if r == c { Complex64::ONE } else { Complex64::ZERO }
        } else if r >= 3 && c >= 3 {
            if r == c { Complex64::ONE } else { Complex64::ZERO }
        } else if r < 3 {
            cross[r][c - 3]
        } else {
            cross[c][r - 3].conj()
        }
    });
    let chol = cov.cholesky().ok_or_else(|| {
        Error::Degenerate(format!(
            "joint law at z = {z}, w = {w} is not positive definite; the \
             points are too close for a six-dimensional Gaussian draw"
        ))
    })?;
    let lower = chol.l();

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut draw = nalgebra::DVector::zeros(6);
    for _ in 0..samples {
        for i in 0..6 {
            draw[i] = standard_complex_normal(&mut rng);
        }
        let colored = &lower * &draw;
        let jet_z = [colored[0], colored[1], colored[2]];
        let jet_w = [colored[3], colored[4], colored[5]];
        let value = factor_value(&spec.at_z, &jet_z) * factor_value(&spec.at_w, &jet_w);
        sum += value;
        sum_sq += value * value;
    }
    let n = samples as f64;
    let mean = sum / n;
    let variance = (sum_sq / n - mean * mean).max(0.0);
    Ok(MonteCarloEstimate {
        mean,
        std_error: (variance / n).sqrt(),
        samples,
    })
}

/// Per-realization samples of the order-1 and order-2 chaos components of
/// the zero-count linear statistic over a disk: Q_N = (1/pi) * sum over
/// unmasked lattice points of phi_N * step^2, where phi_N is the N-th
/// observable built from the coefficient table.
#[derive(Debug, Clone)]
pub struct ChaosProjectionRun {
    pub q11: Vec<f64>,
    pub q22: Vec<f64>,
}

/// Samples the chaos projections over `realizations` independent fields on
/// a step-spaced lattice masking the disk of the given radius. Pure-type
/// kernels of order >= 1 only; realization i uses stream i of the seed.
pub fn chaos_projection_samples(
    kernel: &TwistedKernel,
    radius: f64,
    step: f64,
    realizations: u32,
    seed: u64,
) -> Result<ChaosProjectionRun> {
    let n = require_pure_order(kernel)?;
    let a = rational_to_f64(&kernel.var_d1());
    let b = rational_to_f64(&kernel.var_d2());
    let c = chaos_coefficients(&kernel.var_d1(), &kernel.var_d2(), 2)?;
    let coeff = |k: u32, l: u32| rational_to_f64(c.value(k, l).expect("table covers order 2"));
    let (c00, c10, c01) = (coeff(0, 0), coeff(1, 0), coeff(0, 1));
    let (c20, c02, c11) = (coeff(2, 0), coeff(0, 2), coeff(1, 1));

    let grid = crate::sampler::Grid::new(Complex64::ZERO, radius, step)?.with_mask(radius);
    let k_max = crate::sampler::required_truncation(grid.max_active_abs());
    let cell = step * step / std::f64::consts::PI;
    let inv_sqrt_a = a.sqrt().recip();
    let inv_sqrt_b = b.sqrt().recip();

    let mut run = ChaosProjectionRun {
        q11: Vec::with_capacity(realizations as usize),
        q22: Vec::with_capacity(realizations as usize),
    };
    for i in 0..realizations {
        let coeffs = crate::sampler::sample_gef(k_max, seed, i as u64);
        let field = crate::sampler::evaluate_gwhf(
            &coeffs,
            n,
            &crate::sampler::MeanSpec::None,
            &grid,
        )?;
        let mut q11 = 0.0;
        let mut q22 = 0.0;
        for ((fv, d1v), d2v) in field.f.iter().zip(&field.d1).zip(&field.d2) {
            if !fv.is_finite() {
                continue;
            }
            let s0 = fv.norm_sqr();
            let s1 = (d1v * inv_sqrt_a).norm_sqr();
            let s2 = (d2v * inv_sqrt_b).norm_sqr();
            let l1 = |x: f64| 1.0 - x;
            let l2 = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x;
            q11 += c00 * l1(s0) + c10 * l1(s1) + c01 * l1(s2);
            q22 += c00 * l2(s0) + c20 * l2(s1) + c02 * l2(s2)
                + c10 * l1(s0) * l1(s1)
                + c01 * l1(s0) * l1(s2)
                + c11 * l1(s1) * l1(s2);
        }
        run.q11.push(q11 * cell);
        run.q22.push(q22 * cell);
    }
    Ok(run)
}

/// Sample variance with its standard error.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct VarianceEstimate {
    pub variance: f64,
    pub std_error: f64,
    pub realizations: u32,
}

fn variance_of(samples: &[f64]) -> VarianceEstimate {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let variance = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let fourth = samples.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    let std_error = ((fourth - variance * variance).max(0.0) / n).sqrt();
    VarianceEstimate {
        variance,
        std_error,
        realizations: samples.len() as u32,
    }
}

/// Monte-Carlo estimate of Var Q_{2,2}(B_R), for comparison against
/// [`q22_analytic`].
pub fn q22_monte_carlo(
    kernel: &TwistedKernel,
    radius: f64,
    step: f64,
    realizations: u32,
    seed: u64,
) -> Result<VarianceEstimate> {
    let run = chaos_projection_samples(kernel, radius, step, realizations, seed)?;
    Ok(variance_of(&run.q22))
}

/// Per-realization samples of the order-1 chaos component, exposed without
/// any exactness claim about its variance.
pub fn q11_samples(
    kernel: &TwistedKernel,
    radius: f64,
    step: f64,
    realizations: u32,
    seed: u64,
) -> Result<Vec<f64>> {
    Ok(chaos_projection_samples(kernel, radius, step, realizations, seed)?.q11)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomials::rat;

    fn pure(n: u32) -> TwistedKernel {
        TwistedKernel::pure(n)
    }

    fn rp(coeffs: &[(i64, i64)]) -> RationalPoly {
        RationalPoly::from_coeffs(coeffs.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn coefficient_table_for_the_first_order_kernel() {
        let c = chaos_coefficients(&rat_int(2), &rat_int(1), 2).unwrap();
        assert_eq!(c.value(0, 0).unwrap(), &rat(5, 3));
        assert_eq!(c.value(0, 1).unwrap(), &rat(-1, 9));
        assert_eq!(c.value(1, 0).unwrap(), &rat(-14, 9));
        assert_eq!(c.value(0, 2).unwrap(), &rat(8, 27));
        assert_eq!(c.value(2, 0).unwrap(), &rat(8, 27));
        assert_eq!(c.value(1, 1).unwrap(), &rat(-16, 27));
    }

    #[test]
    fn coefficients_reject_degenerate_weights() {
        assert!(chaos_coefficients(&rat_int(1), &rat_int(0), 2).is_err());
        assert!(chaos_coefficients(&rat_int(-1), &rat_int(1), 2).is_err());
    }

    // numeric oracle: 2-D quadrature of |a s - b t| L_k(s) L_l(t) e^{-s-t}
    // on composite Gauss-Legendre panels, the inner integral split at the
    // kink t = (a/b) s so every panel sees a smooth integrand. For low l
    // the inner integral decays only polynomially faster than e^{-s}, so
    // the outer range runs to s = 48.
    fn coefficient_by_quadrature(a: f64, b: f64, k: u32, l: u32) -> f64 {
        let rule = crate::numeric::gauss_legendre(24);
        let lk = laguerre(k);
        let ll = laguerre(l);
        let outer = |s: f64| {
            let kink = a / b * s;
            let inner = |t: f64| (a * s - b * t).abs() * ll.eval_f64(t) * (-t).exp();
            let lo = crate::numeric::panel_gauss_legendre(&inner, 0.0, kink, 4.0, &rule);
            let hi = crate::numeric::panel_gauss_legendre(
                &inner,
                kink,
                kink + 45.0,
                4.0,
                &rule,
            );
            lk.eval_f64(s) * (-s).exp() * (lo + hi)
        };
        crate::numeric::panel_gauss_legendre(&outer, 0.0, 48.0, 4.0, &rule)
    }

    #[test]
    fn coefficients_match_numeric_quadrature() {
        for (a, b) in [(2i64, 1i64), (3, 2), (4, 3)] {
            let table = chaos_coefficients(&rat_int(a), &rat_int(b), 4).unwrap();
            for (k, l, exact) in table.entries() {
                let numeric = coefficient_by_quadrature(a as f64, b as f64, k, l);
                assert!(
                    (rational_to_f64(exact) - numeric).abs() < 1e-10,
                    "a={a} b={b} c_({k},{l}): exact {} vs quadrature {numeric}",
                    format_rational(exact)
                );
            }
        }
    }

    // the full list of closed-form Gaussian expectations for the order-1
    // kernel; s-polynomial parts of values carrying an implicit e^{-2s}
    fn expected_diagrams() -> Vec<(ChaosFactor, ChaosFactor, RationalPoly)> {
        use ChaosFactor::{PairL1, SingleL2};
        use Component::{Field as F, D1, D2};
        let s = RationalPoly::monomial(rat_int(1), 1);
        let l1 = laguerre(1);
        let l2 = laguerre(2);
        let two_minus_s = rp(&[(2, 1), (-1, 1)]);
        let half = rat(1, 2);

        let quad_ff = {
            let inner = &(&l1 * &l2)
                - &(&s * &(&two_minus_s * &two_minus_s)).scale(&half);
            &inner * &inner
        };
        let quad_fd2 = {
            let inner = rp(&[(3, 1), (-2, 1)]);
            (&(&s * &s) * &(&inner * &inner)).scale(&half)
        };
        let quad_fd1_pair = {
            let inner = &l2 - &(&s * &two_minus_s).scale(&half);
            &s * &(&inner * &inner)
        };
        let quad_d2d2 = {
            let inner = rp(&[(1, 1), (-2, 1)]);
            &inner * &inner
        };
        let quad_d2_pair = (&s * &(&l1 * &l1)).scale(&rat_int(2));
        let quad_pair_pair = {
            let inner = &l1 * &l1;
            &inner * &inner
        };

        vec![
            (PairL1(F, D1), PairL1(F, D1), quad_ff),
            (PairL1(F, D1), PairL1(F, D2), quad_fd2),
            (PairL1(F, D1), PairL1(D1, D2), quad_fd1_pair),
            (PairL1(F, D2), PairL1(F, D2), quad_d2d2),
            (PairL1(F, D2), PairL1(D1, D2), quad_d2_pair),
            (PairL1(D1, D2), PairL1(D1, D2), quad_pair_pair),
            (
                PairL1(F, D1),
                SingleL2(F),
                &(&s * &(&two_minus_s * &two_minus_s)) * &(&l1 * &l1),
            ),
            (
                PairL1(F, D1),
                SingleL2(D1),
                &(&s * &(&two_minus_s * &two_minus_s)) * &(&l2 * &l2),
            ),
            (PairL1(F, D1), SingleL2(D2), s.pow(3)),
            (PairL1(F, D2), SingleL2(F), (&s * &(&l1 * &l1)).scale(&rat_int(2))),
            (
                PairL1(F, D2),
                SingleL2(D1),
                (&s.pow(3) * &(&two_minus_s * &two_minus_s)).scale(&half),
            ),
            (PairL1(F, D2), SingleL2(D2), s.scale(&rat_int(2))),
            (
                PairL1(D1, D2),
                SingleL2(F),
                &(&s * &s) * &(&two_minus_s * &two_minus_s),
            ),
            (PairL1(D1, D2), SingleL2(D1), &(&s * &s) * &(&l2 * &l2)),
            (PairL1(D1, D2), SingleL2(D2), &s * &s),
            (SingleL2(F), SingleL2(F), l1.pow(4)),
            (
                SingleL2(F),
                SingleL2(D1),
                (&s.pow(2) * &two_minus_s.pow(4)).scale(&rat(1, 4)),
            ),
            (SingleL2(F), SingleL2(D2), &s * &s),
            (SingleL2(D1), SingleL2(D1), l2.pow(4)),
            (SingleL2(D1), SingleL2(D2), s.pow(4).scale(&rat(1, 4))),
            (SingleL2(D2), SingleL2(D2), RationalPoly::one()),
        ]
    }

    #[test]
    fn diagram_values_match_their_closed_forms() {
        let kernel = pure(1);
        for (at_z, at_w, want) in expected_diagrams() {
            let got = diagram_value(&kernel, &DiagramSpec { at_z, at_w }).unwrap();
            assert_eq!(got, want, "diagram ({at_z:?}, {at_w:?})");
        }
    }

    #[test]
    fn diagram_values_are_symmetric_in_the_two_points() {
        let kernel = pure(2);
        let factors = {
            use ChaosFactor::{PairL1, SingleL2};
            use Component::{Field as F, D1, D2};
            [
                PairL1(F, D1),
                PairL1(F, D2),
                PairL1(D1, D2),
                SingleL2(F),
                SingleL2(D1),
                SingleL2(D2),
            ]
        };
        for &fi in &factors {
            for &fj in &factors {
                let d_ij =
                    diagram_value(&kernel, &DiagramSpec { at_z: fi, at_w: fj }).unwrap();
                let d_ji =
                    diagram_value(&kernel, &DiagramSpec { at_z: fj, at_w: fi }).unwrap();
                assert_eq!(d_ij, d_ji, "({fi:?}, {fj:?})");
            }
        }
    }

    #[test]
    fn diagrams_reject_coincident_pair_labels() {
        let kernel = pure(1);
        let bad = DiagramSpec {
            at_z: ChaosFactor::PairL1(Component::Field, Component::Field),
            at_w: ChaosFactor::SingleL2(Component::Field),
        };
        assert!(diagram_value(&kernel, &bad).is_err());
    }

    #[test]
    fn two_point_density_for_the_first_order_kernel() {
        let g = two_point_chaos_density(&pure(1)).unwrap();
        let want = rp(&[
            (2091, 1),
            (-22110, 1),
            (62628, 1),
            (-77836, 1),
            (48325, 1),
            (-15040, 1),
            (2156, 1),
            (-116, 1),
            (2, 1),
        ])
        .scale(&rat(2, 729));
        assert_eq!(g.poly(), &want);
        assert_eq!(g.integral(), rat(7, 81));
        assert_eq!(g.planar_integral_over_pi(), rat(7, 81));
    }

    #[test]
    fn verdict_for_the_first_order_kernel() {
        let v = hyperuniformity_verdict(&pure(1)).unwrap();
        assert!(v.non_hyperuniform);
        assert_eq!(v.radial_integral, "7/81");
        assert!(v.caveat.is_none());
    }

    #[test]
    fn verdict_from_a_zero_integral_density_carries_a_caveat() {
        // integral of (1 - 2s) e^{-2s} over [0, inf) is 1/2 - 2/4 = 0
        let d = RadialDensity::new(rp(&[(1, 1), (-2, 1)]));
        assert!(d.integral().is_zero());
        let v = HyperuniformityVerdict::from_density("synthetic".into(), &d);
        assert!(!v.non_hyperuniform);
        assert!(v.caveat.is_some());
    }

    #[test]
    fn gaussian_kernel_is_rejected_with_a_pointer_to_the_charged_theory() {
        assert!(two_point_chaos_density(&pure(0)).is_err());
        let p = RationalPoly::from_coeffs(vec![rat_int(1), rat(-1, 2)]);
        let nonpure = TwistedKernel::from_profile(p).unwrap();
        assert!(two_point_chaos_density(&nonpure).is_err());
    }

    #[test]
    fn higher_order_kernels_have_nonzero_density_integrals() {
        for n in 2..=5 {
            let integral = integral_g(&pure(n)).unwrap();
            assert!(
                !integral.is_zero(),
                "order {n} integral {}",
                format_rational(&integral)
            );
        }
    }

    #[test]
    fn density_integral_matches_numeric_quadrature() {
        for n in 1..=3 {
            let g = two_point_chaos_density(&pure(n)).unwrap();
            let numeric = adaptive_simpson(&|s| g.eval(s), 0.0, 60.0, 1e-13).unwrap();
            let exact = rational_to_f64(&g.integral());
            assert!((numeric - exact).abs() < 1e-10, "order {n}");
        }
    }

    #[test]
    fn density_integrals_for_higher_order_kernels_are_pinned() {
        // regression values, cross-checked at assembly time against the
        // quadrature oracle for the coefficients and the closed-form
        // diagram table
        let want = [
            (2, rat(14661, 31250)),
            (3, rat(1693143, 1882384)),
            (4, rat(855625, 629856)),
            (5, rat(26710306875, 14512627712)),
        ];
        for (n, value) in want {
            assert_eq!(integral_g(&pure(n)).unwrap(), value, "order {n}");
        }
    }

    #[test]
    fn lens_area_limits() {
        let r = 3.0;
        assert!((lens_area(r, 0.0) - std::f64::consts::PI * r * r).abs() < 1e-12);
        assert_eq!(lens_area(r, 6.0), 0.0);
        assert_eq!(lens_area(r, 8.0), 0.0);
        let mut prev = lens_area(r, 0.0);
        for i in 1..=60 {
            let cur = lens_area(r, 0.1 * i as f64);
            assert!(cur <= prev + 1e-12);
            prev = cur;
        }
    }

    #[test]
    fn analytic_variance_is_positive_at_moderate_radius() {
        let analytic = q22_analytic(&pure(1), 3.0).unwrap();
        assert!(analytic > 0.0, "{analytic}");
    }

    #[test]
    fn analytic_variance_approaches_the_asymptote_at_large_radius() {
        let kernel = pure(1);
        let r = 40.0;
        let analytic = q22_analytic(&kernel, r).unwrap();
        let asymptote = q22_asymptote(&kernel, r).unwrap();
        assert!(
            (analytic / asymptote - 1.0).abs() < 0.05,
            "{analytic} vs {asymptote}"
        );
    }

    #[test]
    fn diagram_monte_carlo_agrees_with_the_exact_value() {
        let z = Complex64::new(0.3, -0.2);
        let w = Complex64::new(-0.4, 0.5);
        let s = (z - w).norm_sqr();
        let cases = [
            (
                pure(1),
                DiagramSpec {
                    at_z: ChaosFactor::PairL1(Component::Field, Component::D1),
                    at_w: ChaosFactor::PairL1(Component::Field, Component::D2),
                },
            ),
            (
                pure(2),
                DiagramSpec {
                    at_z: ChaosFactor::PairL1(Component::D1, Component::D2),
                    at_w: ChaosFactor::SingleL2(Component::Field),
                },
            ),
            (
                pure(3),
                DiagramSpec {
                    at_z: ChaosFactor::SingleL2(Component::D2),
                    at_w: ChaosFactor::SingleL2(Component::D2),
                },
            ),
        ];
        for (i, (kernel, spec)) in cases.iter().enumerate() {
            let exact =
                diagram_value(kernel, spec).unwrap().eval_f64(s) * (-2.0 * s).exp();
            let mc = diagram_monte_carlo(kernel, spec, z, w, 200_000, 91 + i as u64).unwrap();
            assert!(
                (mc.mean - exact).abs() <= 4.0 * mc.std_error,
                "case {i}: {} vs {exact} (se {})",
                mc.mean,
                mc.std_error
            );
        }
    }

    #[test]
    fn coincident_points_make_the_gaussian_vector_degenerate() {
        let z = Complex64::new(0.1, 0.1);
        let spec = DiagramSpec {
            at_z: ChaosFactor::SingleL2(Component::Field),
            at_w: ChaosFactor::SingleL2(Component::Field),
        };
        assert!(matches!(
            diagram_monte_carlo(&pure(1), &spec, z, z, 10, 0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn count_variance_monte_carlo_matches_the_analytic_value() {
        let kernel = pure(1);
        let radius = 2.5;
        let analytic = q22_analytic(&kernel, radius).unwrap();
        let mc = q22_monte_carlo(&kernel, radius, 0.125, 400, 77).unwrap();
        let tol = 3.0 * mc.std_error + 0.05 * analytic;
        assert!(
            (mc.variance - analytic).abs() < tol,
            "{} vs {analytic} (se {})",
            mc.variance,
            mc.std_error
        );
    }

    #[test]
    fn first_chaos_projection_has_near_zero_mean() {
        let samples = q11_samples(&pure(1), 2.0, 0.15, 300, 5).unwrap();
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        assert!(mean.abs() < 4.0 * se + 1e-9, "mean {mean}, se {se}");
        assert!(var > 0.0);
    }

    #[test]
    fn chaos_projections_reject_the_gaussian_kernel() {
        assert!(matches!(
            chaos_projection_samples(&TwistedKernel::gauss(), 2.0, 0.2, 4, 0),
            Err(Error::Degenerate(_))
        ));
    }
}
