//! Zero location, charge assignment, the covariant index formula, and
//! critical-point classification for sampled fields.
//!
//! Detection walks every lattice cell and computes the winding of the field
//! around the cell boundary; cells with nonzero winding seed a Newton
//! refinement of (Re F, Im F) whose real Jacobian comes from the twisted
//! derivatives through dF = D1 F + (zbar/2) F and dbar F = D2 F - (z/2) F.
//! Charges are the sign of |dF|^2 - |dbar F|^2 at the zero, which equals
//! |D1 F|^2 - |D2 F|^2 there. The covariant index formula
//! kappa = |disk|/pi + (1/2 pi i) contour(D1 F / F dz + D2 F / F dzbar)
//! provides an independent integer-valued cross-check of the charge sums.

use num_complex::Complex64;

use crate::sampler::{
    evaluate_at_points, evaluate_gwhf, FieldRealization, GefCoefficients, Grid, MeanSpec,
};
use crate::{Error, Result};

/// Newton refinement stops when |F| falls below this.
pub const NEWTON_TOLERANCE: f64 = 1e-10;
/// Zeros whose Jacobian magnitude falls below this are reported unresolved
/// rather than charged.
pub const DEGENERACY_FLOOR: f64 = 1e-8;
/// A contour total farther than this from the nearest integer marks the
/// quadrature as unresolved at the current resolution.
pub const MAX_CONTOUR_DEFECT: f64 = 0.2;
const NEWTON_MAX_ITERATIONS: usize = 40;
const CONTOUR_REFINEMENTS: usize = 8;

/// Region searched for zeros, always strictly inside the sampled grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    Disk { center: Complex64, radius: f64 },
    Rect { center: Complex64, half_width: f64 },
}

impl Window {
    /// Boundary-inclusive membership.
    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            Window::Disk { center, radius } => (z - center).norm() <= radius + 1e-12,
            Window::Rect { center, half_width } => {
                (z.re - center.re).abs() <= half_width + 1e-12
                    && (z.im - center.im).abs() <= half_width + 1e-12
            }
        }
    }

    /// Smallest disk covering the window, for margin checks.
    fn bounding(&self) -> (Complex64, f64) {
        match *self {
            Window::Disk { center, radius } => (center, radius),
            Window::Rect { center, half_width } => (center, half_width * 2.0f64.sqrt()),
        }
    }

    /// True when the whole disk lies inside the window.
    pub fn encloses_disk(&self, disk_center: Complex64, disk_radius: f64) -> bool {
        match *self {
            Window::Disk { center, radius } => {
                (disk_center - center).norm() + disk_radius <= radius + 1e-12
            }
            Window::Rect { center, half_width } => {
                (disk_center.re - center.re).abs() + disk_radius <= half_width + 1e-12
                    && (disk_center.im - center.im).abs() + disk_radius <= half_width + 1e-12
            }
        }
    }

    // distance from a point to the window region, zero inside
    fn distance_outside(&self, z: Complex64) -> f64 {
        match *self {
            Window::Disk { center, radius } => ((z - center).norm() - radius).max(0.0),
            Window::Rect { center, half_width } => {
                let dx = ((z.re - center.re).abs() - half_width).max(0.0);
                let dy = ((z.im - center.im).abs() - half_width).max(0.0);
                dx.hypot(dy)
            }
        }
    }

    // true when the window plus a margin sits inside the grid's sampled
    // (and unmasked) region
    fn fits_with_margin(&self, grid: &Grid, margin: f64) -> bool {
        let (reach_x, reach_y, reach_radial) = match *self {
            Window::Disk { center, radius } => {
                let d = center - grid.center;
                (d.re.abs() + radius, d.im.abs() + radius, d.norm() + radius)
            }
            Window::Rect { center, half_width } => {
                let d = center - grid.center;
                let rx = d.re.abs() + half_width;
                let ry = d.im.abs() + half_width;
                (rx, ry, rx.hypot(ry))
            }
        };
        if reach_x + margin > grid.half_width || reach_y + margin > grid.half_width {
            return false;
        }
        match grid.mask_radius {
            Some(mask) => reach_radial + margin <= mask,
            None => true,
        }
    }

    fn size(&self) -> f64 {
        self.bounding().1
    }
}

/// A refined zero with its charge data.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargedZero {
    pub re: f64,
    pub im: f64,
    /// Sign of the real Jacobian, +1 or -1.
    pub charge: i8,
    /// |dF|^2 - |dbar F|^2 at the zero.
    pub jacobian: f64,
    /// |F| at the accepted refinement point.
    pub residual: f64,
    /// Critical-point classification when one applies.
    pub label: Option<&'static str>,
}

impl ChargedZero {
    pub fn location(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// All zeros found in a window, with provenance.
#[derive(Debug, Clone)]
pub struct ZeroSet {
    pub zeros: Vec<ChargedZero>,
    /// Flagged cells whose refinement failed or hit the degeneracy floor.
    pub unresolved: u32,
    pub window: Window,
    pub dedup_radius: f64,
    pub grid_step: f64,
    pub seed: u64,
    pub stream: u64,
    pub kernel: String,
}

impl ZeroSet {
    pub fn charge_sum_in_disk(&self, center: Complex64, radius: f64) -> i64 {
        self.zeros
            .iter()
            .filter(|z| (z.location() - center).norm() <= radius + 1e-12)
            .map(|z| z.charge as i64)
            .sum()
    }

    pub fn count_in_disk(&self, center: Complex64, radius: f64) -> usize {
        self.zeros
            .iter()
            .filter(|z| (z.location() - center).norm() <= radius + 1e-12)
            .count()
    }
}

// Lagrange weights at t for equispaced nodes offset..offset+n-1, so that
// interpolation through n lattice values is exact on degree n-1
fn lagrange_weights<const N: usize>(t: f64, offset: f64) -> [f64; N] {
    let mut w = [0.0; N];
    for (i, wi) in w.iter_mut().enumerate() {
        let ni = offset + i as f64;
        let mut num = 1.0;
        let mut den = 1.0;
        for j in 0..N {
            if i != j {
                let nj = offset + j as f64;
                num *= t - nj;
                den *= ni - nj;
            }
        }
        *wi = num / den;
    }
    w
}

// off-lattice evaluation of one stored field component: quintic Lagrange
// on a 6x6 stencil where available, degrading to bicubic and then
// bilinear next to masked or boundary points, None when even the
// enclosing cell is unavailable
struct Interpolator<'a> {
    grid: &'a Grid,
    values: &'a [Complex64],
}

impl Interpolator<'_> {
    fn new<'a>(grid: &'a Grid, values: &'a [Complex64]) -> Interpolator<'a> {
        Interpolator { grid, values }
    }

    fn at(&self, row: isize, col: isize) -> Option<Complex64> {
        let side = self.grid.side() as isize;
        if row < 0 || col < 0 || row >= side || col >= side {
            return None;
        }
        let v = self.values[(row * side + col) as usize];
        v.is_finite().then_some(v)
    }

    fn fractional(&self, z: Complex64) -> Option<(f64, f64)> {
        let fx = (z.re - (self.grid.center.re - self.grid.half_width)) / self.grid.step;
        let fy = (z.im - (self.grid.center.im - self.grid.half_width)) / self.grid.step;
        (fx.is_finite() && fy.is_finite()).then_some((fx, fy))
    }

    fn eval(&self, z: Complex64) -> Option<Complex64> {
        let side = self.grid.side() as isize;
        let (fx, fy) = self.fractional(z)?;
        let col = (fx.floor() as isize).clamp(0, side - 2);
        let row = (fy.floor() as isize).clamp(0, side - 2);
        self.eval_from(row, col, z)
    }

    // evaluation anchored to one cell's patch: the surrounding stencil is
    // a single smooth polynomial, so Newton iterates that stay near the
    // cell never see the O(step^6) seams between sliding patches
    fn eval_from(&self, row: isize, col: isize, z: Complex64) -> Option<Complex64> {
        let (fx, fy) = self.fractional(z)?;
        let tx = fx - col as f64;
        let ty = fy - row as f64;
        self.stencil::<6>(row, col, tx, ty)
            .or_else(|| self.stencil::<4>(row, col, tx, ty))
            .or_else(|| self.linear(row, col, tx, ty))
    }

    // N x N Lagrange patch centered on the cell: nodes run from
    // -(N/2 - 1) to N/2 relative to the cell's lower-left corner
    fn stencil<const N: usize>(
        &self,
        row: isize,
        col: isize,
        tx: f64,
        ty: f64,
    ) -> Option<Complex64> {
        let first = -(N as isize / 2 - 1);
        let wx = lagrange_weights::<N>(tx, first as f64);
        let wy = lagrange_weights::<N>(ty, first as f64);
        let mut acc = Complex64::ZERO;
        for (i, wyi) in wy.iter().enumerate() {
            let mut line = Complex64::ZERO;
            for (j, wxj) in wx.iter().enumerate() {
                line += wxj * self.at(row + first + i as isize, col + first + j as isize)?;
            }
            acc += wyi * line;
        }
        Some(acc)
    }

    fn linear(&self, row: isize, col: isize, tx: f64, ty: f64) -> Option<Complex64> {
        let v00 = self.at(row, col)?;
        let v01 = self.at(row, col + 1)?;
        let v10 = self.at(row + 1, col)?;
        let v11 = self.at(row + 1, col + 1)?;
        Some(
            (1.0 - ty) * ((1.0 - tx) * v00 + tx * v01) + ty * ((1.0 - tx) * v10 + tx * v11),
        )
    }
}

// winding number of F along the closed 4-corner loop; the chord between
// two adjacent corner values cannot wrap more than half a turn, so the
// principal argument increments are exact for the piecewise-linear path.
// None signals a corner too close to zero for a reliable argument.
fn cell_winding(corners: &[Complex64; 4]) -> Option<i32> {
    let mut total = 0.0;
    for i in 0..4 {
        let a = corners[i];
        let b = corners[(i + 1) % 4];
        if a.norm_sqr() < 1e-280 || b.norm_sqr() < 1e-280 {
            return None;
        }
        total += (b / a).arg();
    }
    Some((total / std::f64::consts::TAU).round() as i32)
}

// winding number of the interpolant around the cell boundary, sampled
// densely enough to resolve phase rotations that fool the 4-corner test
// (a deep dip of |F| near an edge can mimic a canceling charge pair on
// adjacent cells). None signals an unreliable sample on the boundary.
fn patch_winding(
    patch: &Interpolator<'_>,
    row: isize,
    col: isize,
    corner: Complex64,
    step: f64,
) -> Option<i32> {
    const PER_EDGE: usize = 8;
    let m = 4 * PER_EDGE;
    let mut samples = Vec::with_capacity(m);
    for k in 0..m {
        let edge = k / PER_EDGE;
        let t = step * (k % PER_EDGE) as f64 / PER_EDGE as f64;
        let offset = match edge {
            0 => Complex64::new(t, 0.0),
            1 => Complex64::new(step, t),
            2 => Complex64::new(step - t, step),
            _ => Complex64::new(0.0, step - t),
        };
        let v = patch.eval_from(row, col, corner + offset)?;
        if v.norm_sqr() < 1e-280 {
            return None;
        }
        samples.push(v);
    }
    let mut total = 0.0;
    for i in 0..m {
        total += (samples[(i + 1) % m] / samples[i]).arg();
    }
    Some((total / std::f64::consts::TAU).round() as i32)
}

struct FieldJets<'a> {
    f: Interpolator<'a>,
    d1: Interpolator<'a>,
    d2: Interpolator<'a>,
}

impl FieldJets<'_> {
    fn new(field: &FieldRealization) -> FieldJets<'_> {
        FieldJets {
            f: Interpolator::new(&field.grid, &field.f),
            d1: Interpolator::new(&field.grid, &field.d1),
            d2: Interpolator::new(&field.grid, &field.d2),
        }
    }

    // (F, dF, dbar F) with the ordinary Wirtinger derivatives recovered
    // from the twisted ones, all read off the patch anchored at one cell
    fn wirtinger_from(
        &self,
        row: isize,
        col: isize,
        z: Complex64,
    ) -> Option<(Complex64, Complex64, Complex64)> {
        let f = self.f.eval_from(row, col, z)?;
        let d1 = self.d1.eval_from(row, col, z)?;
        let d2 = self.d2.eval_from(row, col, z)?;
        let dz = d1 + 0.5 * z.conj() * f;
        let dzbar = d2 - 0.5 * z * f;
        Some((f, dz, dzbar))
    }
}

// Damped Newton iteration on (Re F, Im F) from `start`, anchored to the
// patch of the cell (row, col); returns the refined location, |F| there,
// and the Jacobian value |dF|^2 - |dbar F|^2. The step is backtracked
// until |F| decreases, and no trial ever leaves the leash disk around the
// start, so near-degenerate Jacobians (which propose huge steps) slow the
// iteration down instead of ejecting it.
fn newton_refine(
    jets: &FieldJets<'_>,
    anchor: (isize, isize),
    start: Complex64,
    leash: f64,
) -> Option<(Complex64, f64, f64)> {
    let mut z = start;
    for _ in 0..NEWTON_MAX_ITERATIONS {
        let (f, dz, dzbar) = jets.wirtinger_from(anchor.0, anchor.1, z)?;
        if f.norm() < NEWTON_TOLERANCE {
            let jacobian = dz.norm_sqr() - dzbar.norm_sqr();
            return Some((z, f.norm(), jacobian));
        }
        // solve dz * delta + dzbar * conj(delta) = -f for delta
        let det = dz.norm_sqr() - dzbar.norm_sqr();
        if det.abs() < 1e-14 {
            return None;
        }
        let full = (dz.conj() * (-f) - dzbar * (-f).conj()) / det;
        let mut next = None;
        let mut scale = 1.0;
        for _ in 0..12 {
            let trial = z + scale * full;
            if (trial - start).norm() <= leash {
                let ft = jets.f.eval_from(anchor.0, anchor.1, trial)?;
                if ft.norm() < f.norm() {
                    next = Some(trial);
                    break;
                }
            }
            scale *= 0.5;
        }
        z = next?;
    }
    None
}

/// Finds all zeros of the field inside the window, which must sit inside
/// the sampled (and unmasked) region with a margin of two grid steps.
/// Cells with nonzero boundary winding are refined by Newton iteration;
/// refinements that fail, wander, or land on a Jacobian below the
/// degeneracy floor are counted as unresolved.
///
/// Two steps of margin only guarantee the bilinear fallback for cells
/// that straddle the window boundary; the quintic stencil reaches two
/// and a half steps diagonally past a cell, so callers who want full
/// refinement quality there should leave five or more steps of margin.
pub fn find_zeros(field: &FieldRealization, window: &Window) -> Result<ZeroSet> {
    let grid = &field.grid;
    if !window.fits_with_margin(grid, 2.0 * grid.step) {
        return Err(Error::WindowTooSmall {
            radius: window.size(),
        });
    }
    let jets = FieldJets::new(field);
    let side = grid.side();

    let mut found: Vec<ChargedZero> = Vec::new();
    let mut unresolved = 0u32;
    for row in 0..side - 1 {
        for col in 0..side - 1 {
            let center =
                grid.point(row, col) + Complex64::new(0.5 * grid.step, 0.5 * grid.step);
            // only cells that can contain a window point matter
            if window.distance_outside(center) > grid.step {
                continue;
            }
            let corner = |r: usize, c: usize| field.f[r * side + c];
            let corners = [
                corner(row, col),
                corner(row, col + 1),
                corner(row + 1, col + 1),
                corner(row + 1, col),
            ];
            if corners.iter().any(|v| !v.is_finite()) {
                continue;
            }
            let coarse = cell_winding(&corners);
            if coarse == Some(0) {
                continue;
            }
            // the dense boundary winding separates a genuinely enclosed
            // zero from a flag that leaked over from a neighboring cell
            let confirmed = match coarse {
                None => true,
                Some(_) => {
                    patch_winding(
                        &jets.f,
                        row as isize,
                        col as isize,
                        grid.point(row, col),
                        grid.step,
                    ) != Some(0)
                }
            };
            match refine_cell(&jets, (row as isize, col as isize), center, grid.step) {
                Some(zero) => {
                    if window.contains(zero.location()) {
                        found.push(zero);
                    }
                }
                None if confirmed => unresolved += 1,
                None => {}
            }
        }
    }

    let dedup_radius = grid.step / 4.0;
    let zeros = dedup_zeros(found, dedup_radius);
    Ok(ZeroSet {
        zeros,
        unresolved,
        window: *window,
        dedup_radius,
        grid_step: grid.step,
        seed: field.seed,
        stream: field.stream,
        kernel: field.kernel.clone(),
    })
}

// refine one flagged cell: Newton from the center, then once more from
// the centers of the four subcells if that fails; degenerate Jacobians
// are rejected. The leash reaches past the adjacent cell ring because the
// discrete winding of a zero close to an edge can leak into a neighbor,
// and the refinement must be allowed to walk back to the actual zero;
// duplicates found this way are merged by deduplication.
fn refine_cell(
    jets: &FieldJets<'_>,
    anchor: (isize, isize),
    center: Complex64,
    step: f64,
) -> Option<ChargedZero> {
    let attempt = |start: Complex64, leash: f64| -> Option<ChargedZero> {
        let (z, residual, jacobian) = newton_refine(jets, anchor, start, leash)?;
        if jacobian.abs() < DEGENERACY_FLOOR {
            return None;
        }
        Some(ChargedZero {
            re: z.re,
            im: z.im,
            charge: if jacobian > 0.0 { 1 } else { -1 },
            jacobian,
            residual,
            label: None,
        })
    };
    if let Some(zero) = attempt(center, 2.5 * step) {
        return Some(zero);
    }
    let quarter = 0.25 * step;
    for dx in [-quarter, quarter] {
        for dy in [-quarter, quarter] {
            if let Some(zero) = attempt(center + Complex64::new(dx, dy), 2.5 * step) {
                return Some(zero);
            }
        }
    }
    None
}

// symmetric deduplication: smaller residuals win, survivors sorted by
// location for deterministic output
fn dedup_zeros(mut candidates: Vec<ChargedZero>, radius: f64) -> Vec<ChargedZero> {
    candidates.sort_by(|a, b| a.residual.total_cmp(&b.residual));
    let mut kept: Vec<ChargedZero> = Vec::new();
    for zero in candidates {
        if kept
            .iter()
            .all(|k| (k.location() - zero.location()).norm() > radius)
        {
            kept.push(zero);
        }
    }
    kept.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    kept
}

/// Covariant index of the field over the disk: area/pi plus the contour
/// integral of D1 F / F dz + D2 F / F dzbar, evaluated by the trapezoid
/// rule with off-lattice interpolated values, rounded to the nearest
/// integer. The rule starts at m points and doubles until the total
/// settles near an integer, so deep dips of |F| on the contour (which
/// sharpen the integrand without contributing any winding) are resolved
/// rather than reported as failures.
///
/// The zero set guards the contour: any zero within a quadrature-derived
/// clearance of the circle aborts the computation, and the guard ring must
/// lie inside the window that was searched (otherwise the guard is
/// vacuous).
pub fn poincare_index(
    field: &FieldRealization,
    zeros: &ZeroSet,
    center: Complex64,
    radius: f64,
    m: usize,
) -> Result<i64> {
    if m < 16 {
        return Err(Error::Degenerate(format!(
            "contour rule needs at least 16 points, got {m}"
        )));
    }
    // the m-point trapezoid rule on a circle sees a pole at distance d
    // with error on the order of exp(-m d / radius), so one grid step of
    // clearance is ample for the usual m while small m get a wider band
    let guard = field.grid.step.max(8.0 * radius / m as f64);
    let guarded = Window::Disk {
        center,
        radius: radius + guard,
    };
    if !guarded.fits_with_margin(&field.grid, 2.0 * field.grid.step) {
        return Err(Error::WindowTooSmall {
            radius: radius + guard,
        });
    }
    let searched_ok = match zeros.window {
        Window::Disk {
            center: zc,
            radius: zr,
        } => (center - zc).norm() + radius + guard <= zr + 1e-12,
        Window::Rect {
            center: zc,
            half_width: zh,
        } => {
            (center.re - zc.re).abs() + radius + guard <= zh + 1e-12
                && (center.im - zc.im).abs() + radius + guard <= zh + 1e-12
        }
    };
    if !searched_ok {
        return Err(Error::Degenerate(
            "contour guard ring extends beyond the zero-searched window".into(),
        ));
    }
    for zero in &zeros.zeros {
        let dist = ((zero.location() - center).norm() - radius).abs();
        if dist < guard {
            return Err(Error::ContourNearZero { dist, guard });
        }
    }

    let jets = FieldJets::new(field);
    // a deep dip of |F| on the contour, the residue of a nearly cancelled
    // charge pair with no actual zero, makes the integrand sharply peaked;
    // doubling the rule resolves the peak geometrically, so only a dip
    // that refuses to settle on an integer is reported as a defect
    let mut points = m;
    let mut defect = f64::INFINITY;
    for _ in 0..CONTOUR_REFINEMENTS {
        let mut contour = Complex64::ZERO;
        for i in 0..points {
            let theta = std::f64::consts::TAU * i as f64 / points as f64;
            let dir = Complex64::from_polar(1.0, theta);
            let z = center + radius * dir;
            let f = jets.f.eval(z).ok_or_else(|| {
                Error::Degenerate(format!("contour point {z} is outside the sampled region"))
            })?;
            let d1 = jets.d1.eval(z).unwrap_or(Complex64::ZERO);
            let d2 = jets.d2.eval(z).unwrap_or(Complex64::ZERO);
            // dz = i R e^{i theta} d theta, dzbar its conjugate
            contour += (d1 / f) * dir - (d2 / f) * dir.conj();
        }
        // the i from dz cancels the 1/i; the trapezoid rule on a periodic
        // integrand is the plain average times the period
        let total = radius * radius + contour * radius / points as f64;
        let rounded = total.re.round();
        defect = ((total.re - rounded).powi(2) + total.im.powi(2)).sqrt();
        if defect <= MAX_CONTOUR_DEFECT {
            return Ok(rounded as i64);
        }
        points *= 2;
    }
    Err(Error::ContourDefect { defect })
}

/// Critical points of the weighted amplitude of the order-0 field,
/// classified through the order-1 companion built from the same
/// coefficients: companion zeros of charge +1 are saddle points of the
/// amplitude, charge -1 are local maxima, and minima are impossible.
#[derive(Debug, Clone)]
pub struct ClassifiedCriticalPoints {
    pub zeros: ZeroSet,
    /// Points whose discrete-Hessian class contradicts the charge label.
    pub hessian_disagreements: u32,
    pub checked: u32,
}

pub fn classify_critical_points(
    coeffs: &GefCoefficients,
    grid: &Grid,
    window: &Window,
) -> Result<ClassifiedCriticalPoints> {
    let companion = evaluate_gwhf(coeffs, 1, &MeanSpec::None, grid)?;
    let mut set = find_zeros(&companion, window)?;
    for zero in &mut set.zeros {
        zero.label = Some(if zero.charge > 0 { "saddle" } else { "max" });
    }

    // cross-check each label against the discrete Hessian of the
    // amplitude A = |F_0|, evaluated from the series directly
    let h = 1e-3;
    let offsets = [
        (0.0, 0.0),
        (h, 0.0),
        (-h, 0.0),
        (0.0, h),
        (0.0, -h),
        (h, h),
        (h, -h),
        (-h, h),
        (-h, -h),
    ];
    let stencil: Vec<Complex64> = set
        .zeros
        .iter()
        .flat_map(|zero| {
            offsets
                .iter()
                .map(move |&(dx, dy)| zero.location() + Complex64::new(dx, dy))
        })
        .collect();
    let (f0, _, _) = evaluate_at_points(coeffs, 0, &MeanSpec::None, &stencil)?;
    let mut disagreements = 0;
    for (i, zero) in set.zeros.iter().enumerate() {
        let a: Vec<f64> = f0[9 * i..9 * (i + 1)].iter().map(|v| v.norm()).collect();
        let axx = (a[1] - 2.0 * a[0] + a[2]) / (h * h);
        let ayy = (a[3] - 2.0 * a[0] + a[4]) / (h * h);
        let axy = (a[5] - a[6] - a[7] + a[8]) / (4.0 * h * h);
        let det = axx * ayy - axy * axy;
        let hessian_label = if det < 0.0 {
            "saddle"
        } else if axx < 0.0 {
            "max"
        } else {
            // a minimum of the amplitude, impossible in theory
            "min"
        };
        if Some(hessian_label) != zero.label {
            disagreements += 1;
        }
    }
    let checked = set.zeros.len() as u32;
    Ok(ClassifiedCriticalPoints {
        zeros: set,
        hessian_disagreements: disagreements,
        checked,
    })
}
