//! Radial twisted covariance kernels H(z) = P(|z|^2) e^{-|z|^2/2}.
//!
//! A [`TwistedKernel`] carries the polynomial profile P exactly. The module
//! exposes closed forms for the twisted derivatives of H (as exact
//! [`TwistedDerivative`] data and as numeric jets), pointwise covariance and
//! two-point cross-covariance matrices for the vector (F, D1 F, D2 F), and
//! [`TwistedKernel::validate_assumptions`], a numeric audit of the standing
//! admissibility conditions (normalization, strict sub-unit bound,
//! positive-semidefiniteness of twisted Gram matrices, decay).
//!
//! The twisted derivatives are D1 = d/dz - conj(z)/2 and
//! D2 = d/dconj(z) + z/2; their conjugate-pair versions are
//! D1bar = d/dconj(z) - z/2 and D2bar = d/dz + conj(z)/2.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::polynomials::{
    format_rational, laguerre, parse_rational, rat, rational_to_f64, Rational,
    RationalPoly,
};
use crate::{Error, Result};

/// 3x3 complex matrix indexed by the field vector (F, D1 F, D2 F).
pub type Matrix3 = [[Complex64; 3]; 3];

/// The unit-modulus twist factor e^{i Im(z conj(w))}.
pub fn twist_phase(z: Complex64, w: Complex64) -> Complex64 {
    Complex64::from_polar(1.0, (z * w.conj()).im)
}

/// One twisted derivative of a radial kernel in closed form:
/// z^{z_pow} conj(z)^{zbar_pow} radial(|z|^2) e^{-|z|^2/2}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedDerivative {
    pub z_pow: u32,
    pub zbar_pow: u32,
    pub radial: RationalPoly,
}

impl TwistedDerivative {
    pub fn eval(&self, u: Complex64) -> Complex64 {
        let s = u.norm_sqr();
        u.powu(self.z_pow)
            * u.conj().powu(self.zbar_pow)
            * (self.radial.eval_f64(s) * (-0.5 * s).exp())
    }
}

/// Exact closed forms for H and its first and second twisted derivatives.
#[derive(Debug, Clone)]
pub struct DerivativeForms {
    pub h: TwistedDerivative,
    pub d1: TwistedDerivative,
    pub d2: TwistedDerivative,
    pub d1_d1bar: TwistedDerivative,
    pub d2_d2bar: TwistedDerivative,
    pub d1_d2bar: TwistedDerivative,
    pub d2_d1bar: TwistedDerivative,
}

/// Numeric jet of a kernel at one point.
#[derive(Debug, Clone, Copy)]
pub struct KernelJet {
    pub h: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub d1_d1bar: Complex64,
    pub d2_d2bar: Complex64,
    pub d1_d2bar: Complex64,
    pub d2_d1bar: Complex64,
}

/// Report from [`TwistedKernel::validate_assumptions`].
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub kernel: String,
    /// P(0) = 1, checked exactly on the profile.
    pub normalization_ok: bool,
    /// min over sampled z != 0 of (1 - H(z)^2) / min(1, |z|^2); positive
    /// means H stays strictly below 1 away from the origin.
    pub strict_bound_margin: f64,
    /// Suprema of (1+|z|^2)|H|, (1+|z|^2)|Di H|, (1+|z|^2)|Di Djbar H|.
    pub decay_constants: [f64; 3],
    /// Smallest eigenvalue of the sampled twisted Gram matrix.
    pub min_gram_eigenvalue: f64,
    /// min_gram_eigenvalue >= -1e-9.
    pub psd_ok: bool,
}

/// Number of random points in the twisted Gram positive-semidefiniteness probe.
const GRAM_POINTS: usize = 48;
/// Eigenvalue tolerance for declaring the Gram matrix positive semidefinite.
const GRAM_TOLERANCE: f64 = 1e-9;

/// A radial twisted kernel, held as its exact polynomial profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedKernel {
    profile: RationalPoly,
    pure_order: Option<u32>,
}

impl TwistedKernel {
    /// The Gaussian kernel e^{-|z|^2/2} (profile 1).
    pub fn gauss() -> Self {
        Self::pure(0)
    }

    /// Pure-type kernel of order n: profile = n-th Laguerre polynomial.
    pub fn pure(n: u32) -> Self {
        TwistedKernel {
            profile: laguerre(n),
            pure_order: Some(n),
        }
    }

    /// Kernel from an arbitrary profile; requires P(0) = 1.
    pub fn from_profile(profile: RationalPoly) -> Result<Self> {
        let p0 = profile.coeff(0);
        if p0 != rat(1, 1) {
            return Err(Error::NotNormalized(format_rational(&p0)));
        }
        let pure_order = match profile.degree() {
            Some(d) if profile == laguerre(d as u32) => Some(d as u32),
            _ => None,
        };
        Ok(TwistedKernel {
            profile,
            pure_order,
        })
    }

    /// Parses `gauss`, `laguerre:<n>`, or `poly:<c0>,<c1>,...`.
    pub fn parse(spec: &str) -> Result<Self> {
        let fail = |reason: &str| Error::KernelSpec {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        let t = spec.trim();
        if t == "gauss" {
            return Ok(Self::gauss());
        }
        if let Some(n) = t.strip_prefix("laguerre:") {
            let n: u32 = n
                .trim()
                .parse()
                .map_err(|_| fail("order must be a nonnegative integer"))?;
            return Ok(Self::pure(n));
        }
        if let Some(list) = t.strip_prefix("poly:") {
            if list.trim().is_empty() {
                return Err(fail("empty coefficient list"));
            }
            let coeffs = list
                .split(',')
                .map(parse_rational)
                .collect::<Result<Vec<_>>>()
                .map_err(|e| fail(&e.to_string()))?;
            return Self::from_profile(RationalPoly::from_coeffs(coeffs))
                .map_err(|e| fail(&e.to_string()));
        }
        Err(fail("expected gauss, laguerre:<n>, or poly:<c0>,<c1>,..."))
    }

    /// Canonical spec string (`gauss`, `laguerre:<n>`, or `poly:...`).
    pub fn spec_string(&self) -> String {
        match self.pure_order {
            Some(0) => "gauss".to_string(),
            Some(n) => format!("laguerre:{n}"),
            None => format!("poly:{}", self.profile.coeff_strings().join(",")),
        }
    }

    pub fn profile(&self) -> &RationalPoly {
        &self.profile
    }

    /// `Some(n)` when the profile is exactly the n-th Laguerre polynomial.
    pub fn pure_order(&self) -> Option<u32> {
        self.pure_order
    }

    /// Laplacian of H at the origin: P'(0) - 1/2, exactly.
    pub fn laplacian_at_zero(&self) -> Rational {
        self.profile.derivative().coeff(0) - rat(1, 2)
    }

    /// E|D1 F|^2 = -laplacian + 1/2 = 1 - P'(0), exactly.
    pub fn var_d1(&self) -> Rational {
        rat(1, 1) - self.profile.derivative().coeff(0)
    }

    /// E|D2 F|^2 = -laplacian - 1/2 = -P'(0), exactly.
    pub fn var_d2(&self) -> Rational {
        -self.profile.derivative().coeff(0)
    }

    /// H(z), real for radial kernels.
    pub fn eval(&self, z: Complex64) -> f64 {
        let s = z.norm_sqr();
        self.profile.eval_f64(s) * (-0.5 * s).exp()
    }

    /// Closed forms of the twisted derivative jet, exact in the profile.
    ///
    /// With P the profile, E = e^{-s/2}, s = |z|^2, and u standing for z:
    ///   D1 H        = conj(u) (P' - P) E
    ///   D2 H        = u P' E
    ///   D1 D1bar H  = [(P' - P) + s (P'' - 2P' + P)] E
    ///   D2 D2bar H  = [P' + s P''] E
    ///   D1 D2bar H  = conj(u)^2 (P'' - P') E
    ///   D2 D1bar H  = u^2 (P'' - P') E
    pub fn derivative_forms(&self) -> DerivativeForms {
        let p = &self.profile;
        let dp = p.derivative();
        let ddp = dp.derivative();
        let dp_minus_p = &dp - p;
        let second_radial = &ddp - &dp;
        let t = RationalPoly::monomial(rat(1, 1), 1);
        DerivativeForms {
            h: TwistedDerivative {
                z_pow: 0,
                zbar_pow: 0,
                radial: p.clone(),
            },
            d1: TwistedDerivative {
                z_pow: 0,
                zbar_pow: 1,
                radial: dp_minus_p.clone(),
            },
            d2: TwistedDerivative {
                z_pow: 1,
                zbar_pow: 0,
                radial: dp.clone(),
            },
            d1_d1bar: TwistedDerivative {
                z_pow: 0,
                zbar_pow: 0,
                radial: &dp_minus_p + &(&t * &(&second_radial - &dp_minus_p)),
            },
            d2_d2bar: TwistedDerivative {
                z_pow: 0,
                zbar_pow: 0,
                radial: &dp + &(&t * &ddp),
            },
            d1_d2bar: TwistedDerivative {
                z_pow: 0,
                zbar_pow: 2,
                radial: second_radial.clone(),
            },
            d2_d1bar: TwistedDerivative {
                z_pow: 2,
                zbar_pow: 0,
                radial: second_radial,
            },
        }
    }

    /// Numeric twisted derivative jet at z.
    pub fn jet(&self, z: Complex64) -> KernelJet {
        let f = self.derivative_forms();
        KernelJet {
            h: f.h.eval(z),
            d1: f.d1.eval(z),
            d2: f.d2.eval(z),
            d1_d1bar: f.d1_d1bar.eval(z),
            d2_d2bar: f.d2_d2bar.eval(z),
            d1_d2bar: f.d1_d2bar.eval(z),
            d2_d1bar: f.d2_d1bar.eval(z),
        }
    }

    /// Pointwise covariance of (F, D1 F, D2 F): diag(1, var_d1, var_d2).
    pub fn covariance_matrix(&self) -> Matrix3 {
        let zero = Complex64::new(0.0, 0.0);
        let mut m = [[zero; 3]; 3];
        m[0][0] = Complex64::new(1.0, 0.0);
        m[1][1] = Complex64::new(rational_to_f64(&self.var_d1()), 0.0);
        m[2][2] = Complex64::new(rational_to_f64(&self.var_d2()), 0.0);
        m
    }

    /// Two-point cross-covariance of X = (F, D1 F, D2 F):
    /// entry (i, j) is E[X_i(z) conj(X_j(w))].
    ///
    /// With u = z - w and phi = e^{i Im(z conj(w))}:
    ///   row 0:    H(u) phi,            and E[F(z) conj(Dj F(w))] = conj(Dj H(-u)) phi
    ///   (i, 0):   Di H(u) phi
    ///   (i, j):   -Di Djbar H(u) phi   for i, j >= 1
    pub fn cross_covariance(&self, z: Complex64, w: Complex64) -> Matrix3 {
        let u = z - w;
        let phi = twist_phase(z, w);
        let f = self.derivative_forms();
        let m00 = f.h.eval(u);
        let m10 = f.d1.eval(u);
        let m20 = f.d2.eval(u);
        let m01 = f.d1.eval(-u).conj();
        let m02 = f.d2.eval(-u).conj();
        let m11 = -f.d1_d1bar.eval(u);
        let m12 = -f.d1_d2bar.eval(u);
        let m21 = -f.d2_d1bar.eval(u);
        let m22 = -f.d2_d2bar.eval(u);
        [
            [m00 * phi, m01 * phi, m02 * phi],
            [m10 * phi, m11 * phi, m12 * phi],
            [m20 * phi, m21 * phi, m22 * phi],
        ]
    }

    /// Cross-covariance of the unit-variance vector
    /// (F, D1 F / sqrt(var_d1), D2 F / sqrt(var_d2)).
    ///
    /// Errors when either derivative variance vanishes (e.g. the Gaussian
    /// kernel, whose D2 F is identically zero).
    pub fn cross_covariance_normalized(
        &self,
        z: Complex64,
        w: Complex64,
    ) -> Result<Matrix3> {
        let a = rational_to_f64(&self.var_d1());
        let b = rational_to_f64(&self.var_d2());
        if a <= 0.0 || b <= 0.0 {
            return Err(Error::Degenerate(format!(
                "normalized covariance needs positive derivative variances, got ({a}, {b})"
            )));
        }
        let scale = [1.0, a.sqrt().recip(), b.sqrt().recip()];
        let mut m = self.cross_covariance(z, w);
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry *= scale[i] * scale[j];
            }
        }
        Ok(m)
    }

    /// Numeric audit of the admissibility assumptions on a disk of the given
    /// radius, sampling H on a square grid of the given step.
    pub fn validate_assumptions(&self, radius: f64, step: f64) -> AssumptionReport {
        let forms = self.derivative_forms();
        let mut margin = f64::INFINITY;
        let mut sup_h = 0.0f64;
        let mut sup_d = 0.0f64;
        let mut sup_dd = 0.0f64;
        let n = (radius / step).ceil() as i64;
        for i in -n..=n {
            for j in -n..=n {
                let z = Complex64::new(i as f64 * step, j as f64 * step);
                let s = z.norm_sqr();
                let h = self.eval(z);
                let w = 1.0 + s;
                sup_h = sup_h.max(w * h.abs());
                sup_d = sup_d.max(w * forms.d1.eval(z).norm());
                sup_d = sup_d.max(w * forms.d2.eval(z).norm());
                sup_dd = sup_dd.max(w * forms.d1_d1bar.eval(z).norm());
                sup_dd = sup_dd.max(w * forms.d2_d2bar.eval(z).norm());
                sup_dd = sup_dd.max(w * forms.d1_d2bar.eval(z).norm());
                sup_dd = sup_dd.max(w * forms.d2_d1bar.eval(z).norm());
                if s > 0.0 && s <= radius * radius {
                    margin = margin.min((1.0 - h * h) / s.min(1.0));
                }
            }
        }

        let min_eig = self.min_gram_eigenvalue(radius, GRAM_POINTS, 7);

        AssumptionReport {
            kernel: self.spec_string(),
            normalization_ok: self.profile.coeff(0) == rat(1, 1),
            strict_bound_margin: margin,
            decay_constants: [sup_h, sup_d, sup_dd],
            min_gram_eigenvalue: min_eig,
            psd_ok: min_eig >= -GRAM_TOLERANCE,
        }
    }

    /// Smallest eigenvalue of the twisted Gram matrix
    /// (H(z_k - z_j) e^{i Im(z_k conj(z_j))})_{j,k} over random points in a disk.
    pub fn min_gram_eigenvalue(&self, radius: f64, points: usize, seed: u64) -> f64 {
        let points = points.clamp(2, 64);
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let pts: Vec<Complex64> = (0..points)
            .map(|_| loop {
                let x: f64 = rng.random_range(-1.0..1.0);
                let y: f64 = rng.random_range(-1.0..1.0);
                if x * x + y * y <= 1.0 {
                    break Complex64::new(x * radius, y * radius);
                }
            })
            .collect();
        let gram = nalgebra::DMatrix::from_fn(points, points, |j, k| {
            Complex64::new(self.eval(pts[k] - pts[j]), 0.0) * twist_phase(pts[k], pts[j])
        });
        let eig = gram.symmetric_eigen();
        eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}
