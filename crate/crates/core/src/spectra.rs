//! Numeric eigen-analysis of transfer operators at complex fugacity.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::linalg::balancing::balance_parlett_reinsch;
use nalgebra::Schur;
use num_complex::Complex64;
use rayon::prelude::*;
use rug::Complex;

use crate::error::{Error, Result};
use crate::partition::charpoly::{
    bivariate_charpoly, discriminant_in_x, BivariatePolynomial, MAX_BIVARIATE_DIM,
};
use crate::transfer::{Model, TransferOperator};
use crate::zeros::{find_roots, polish_roots, to_integer};

/// Largest operator dimension accepted by the dense eigensolver.
pub const NUMERIC_DIM_CAP: usize = 3000;
/// Bracket for the right end of the hard-square negative-axis segment.
pub const DEFAULT_Z_D: f64 = -0.119338886;
/// Precision used when two dominant moduli nearly tie.
pub const TIE_PRECISION: u32 = 128;

const TIE_ESCALATION: f64 = 1e-8;

/// Right end of the hard-hexagon segment, `-(5 sqrt 5 - 11) / 2`.
pub fn hexagon_z_d() -> f64 {
    -(5.0 * 5f64.sqrt() - 11.0) / 2.0
}

pub fn default_z_d(model: Model) -> f64 {
    match model {
        Model::HardSquare => DEFAULT_Z_D,
        Model::HardHexagon => hexagon_z_d(),
    }
}

/// Eigenvalues at one fugacity, by descending modulus then real part.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub z: Complex64,
    pub eigenvalues: Vec<Complex64>,
    pub precision: u32,
}

impl Spectrum {
    pub fn dominant(&self) -> Complex64 {
        self.eigenvalues[0]
    }

    /// `|lambda_1| - |lambda_2|`, infinite for a one-dimensional operator.
    pub fn tie_residual(&self) -> f64 {
        match self.eigenvalues.get(1) {
            Some(l2) => self.eigenvalues[0].norm() - l2.norm(),
            None => f64::INFINITY,
        }
    }

    /// `arg(lambda_2 / lambda_1)` in `(-pi, pi]`.
    pub fn relative_phase(&self) -> Option<f64> {
        self.eigenvalues
            .get(1)
            .map(|l2| (l2 / self.eigenvalues[0]).arg())
    }

    /// Sign of a real, simple dominant eigenvalue.
    pub fn real_dominant_sign(&self) -> Option<i8> {
        let l1 = self.eigenvalues[0];
        let scale = l1.norm();
        if l1.im.abs() > 1e-12 * scale || self.tie_residual() <= 1e-7 * scale {
            return None;
        }
        Some(if l1.re > 0.0 { 1 } else { -1 })
    }

    fn nearest(&self, target: Complex64) -> Complex64 {
        *self
            .eigenvalues
            .iter()
            .min_by(|a, b| (*a - target).norm().total_cmp(&(*b - target).norm()))
            .unwrap()
    }
}

fn sort_eigenvalues(ev: &mut [Complex64]) {
    let top = ev
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let key = |c: &Complex64| (c.norm() / top * 1e12).round() as i64;
    ev.sort_by(|a, b| {
        key(b)
            .cmp(&key(a))
            .then(b.re.total_cmp(&a.re))
            .then(b.im.total_cmp(&a.im))
    });
}

/// Deflation tolerances tried in turn; highly degenerate spectra (such as
/// at `z = -1`) may stall at machine epsilon.
const SCHUR_TOLERANCES: [f64; 3] = [f64::EPSILON, 8.0 * f64::EPSILON, 64.0 * f64::EPSILON];
const SCHUR_ITERATIONS: usize = 5000;

fn dense_eigenvalues(op: &TransferOperator, z: Complex64) -> Result<Vec<Complex64>> {
    let fail = || Error::NonConvergence {
        re: z.re,
        im: z.im,
        detail: "dense eigenvalue iteration".into(),
    };
    if z.im == 0.0 {
        let mut m = op.evaluate_real(z.re);
        balance_parlett_reinsch(&mut m);
        for eps in SCHUR_TOLERANCES {
            if let Some(schur) = Schur::try_new(m.clone(), eps, SCHUR_ITERATIONS) {
                return Ok(schur.complex_eigenvalues().iter().copied().collect());
            }
        }
        return Err(fail());
    }
    let mut m = op.evaluate(z);
    let mut moduli = m.map(|c| c.norm());
    let d = balance_parlett_reinsch(&mut moduli);
    let n = m.nrows();
    for j in 0..n {
        for i in 0..n {
            m[(i, j)] *= d[j] / d[i];
        }
    }
    for eps in SCHUR_TOLERANCES {
        if let Some(ev) =
            Schur::try_new(m.clone(), eps, SCHUR_ITERATIONS).and_then(|s| s.eigenvalues())
        {
            return Ok(ev.iter().copied().collect());
        }
    }
    Err(fail())
}

/// Evaluates a spectrum with cached exact data for precision escalation.
pub struct SpectralSolver<'a> {
    op: &'a TransferOperator,
    charpoly: OnceLock<Option<BivariatePolynomial>>,
}

impl<'a> SpectralSolver<'a> {
    pub fn new(op: &'a TransferOperator) -> Result<Self> {
        if op.dim() > NUMERIC_DIM_CAP {
            return Err(Error::ResourceCap {
                what: "operator dimension",
                value: op.dim(),
                cap: NUMERIC_DIM_CAP,
            });
        }
        Ok(SpectralSolver {
            op,
            charpoly: OnceLock::new(),
        })
    }

    pub fn operator(&self) -> &TransferOperator {
        self.op
    }

    fn charpoly(&self) -> Option<&BivariatePolynomial> {
        self.charpoly
            .get_or_init(|| {
                (self.op.dim() <= MAX_BIVARIATE_DIM)
                    .then(|| bivariate_charpoly(self.op).ok())
                    .flatten()
            })
            .as_ref()
    }

    /// The spectrum at `z`. Precision above 53 bits polishes the double
    /// precision eigenvalues as roots of the exact characteristic polynomial.
    pub fn spectrum(&self, z: Complex64, precision: u32) -> Result<Spectrum> {
        let mut ev = dense_eigenvalues(self.op, z)?;
        let mut used = 53;
        if precision > 53 {
            let bi = self.charpoly().ok_or(Error::ResourceCap {
                what: "operator dimension for extended precision",
                value: self.op.dim(),
                cap: MAX_BIVARIATE_DIM,
            })?;
            ev = refine(bi, z, &ev, precision);
            used = precision;
        }
        sort_eigenvalues(&mut ev);
        Ok(Spectrum {
            z,
            eigenvalues: ev,
            precision: used,
        })
    }

    /// Double precision spectrum, escalated when the two dominant moduli
    /// nearly tie without being a conjugate pair.
    pub fn spectrum_checked(&self, z: Complex64) -> Result<Spectrum> {
        let s = self.spectrum(z, 53)?;
        if s.eigenvalues.len() < 2 || self.charpoly().is_none() {
            return Ok(s);
        }
        let (l1, l2) = (s.eigenvalues[0], s.eigenvalues[1]);
        let scale = l1.norm();
        let conjugate_pair = z.im == 0.0 && (l1 - l2.conj()).norm() <= 1e-6 * scale && l1.im != 0.0;
        if s.tie_residual() < TIE_ESCALATION * scale && !conjugate_pair {
            return self.spectrum(z, TIE_PRECISION);
        }
        Ok(s)
    }
}

fn eval_zpoly(p: &crate::poly::ZPolynomial, z: &Complex, prec: u32) -> Complex {
    let mut acc = Complex::new(prec);
    for c in p.coeffs().iter().rev() {
        acc *= z;
        acc += to_integer(c);
    }
    acc
}

fn refine(
    bi: &BivariatePolynomial,
    z: Complex64,
    approx: &[Complex64],
    prec: u32,
) -> Vec<Complex64> {
    let zc = Complex::with_val(prec, (z.re, z.im));
    let coeffs: Vec<Complex> = bi.coeffs.iter().map(|c| eval_zpoly(c, &zc, prec)).collect();
    let mut start = approx.to_vec();
    // Separate exactly coincident starting points.
    for i in 0..start.len() {
        for j in 0..i {
            if start[i] == start[j] {
                let bump = Complex64::new(1e-9, 1e-9) * (1.0 + start[i].norm());
                start[i] += bump;
            }
        }
    }
    polish_roots(coeffs, &start, prec)
        .iter()
        .map(|r| Complex64::new(r.real().to_f64(), r.imag().to_f64()))
        .collect()
}

/// Full spectrum of `op` at `z`.
pub fn eigenvalues_at(op: &TransferOperator, z: Complex64, precision: u32) -> Result<Spectrum> {
    SpectralSolver::new(op)?.spectrum(z, precision)
}

/// A point where the two largest moduli coincide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquimodularPoint {
    pub z: Complex64,
    pub modulus: f64,
    pub tie_residual: f64,
    /// `arg(lambda_2 / lambda_1)`.
    pub theta: f64,
}

fn point_from(s: &Spectrum) -> EquimodularPoint {
    EquimodularPoint {
        z: s.z,
        modulus: s.dominant().norm(),
        tie_residual: s.tie_residual(),
        theta: s.relative_phase().unwrap_or(0.0),
    }
}

/// Whether the dominant eigenvalue at one end does not continue into the
/// dominant eigenvalue at the other.
fn dominant_switches(a: &Spectrum, b: &Spectrum) -> bool {
    if a.eigenvalues.len() < 2 {
        return false;
    }
    let db = b.dominant();
    let cont = b.nearest(a.dominant());
    (cont - db).norm() > 1e-6 * db.norm()
}

/// Bisects a path `t -> path(t)` on which the dominant eigenvalue switches.
fn bisect_switch<F>(
    solver: &SpectralSolver,
    path: F,
    mut lo: f64,
    mut hi: f64,
    mut dlo: Complex64,
    mut dhi: Complex64,
    tol: f64,
) -> Result<Spectrum>
where
    F: Fn(f64) -> Complex64,
{
    for _ in 0..200 {
        if (path(hi) - path(lo)).norm() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let s = solver.spectrum_checked(path(mid))?;
        let dm = s.dominant();
        if (dm - dlo).norm() <= (dm - dhi).norm() {
            lo = mid;
            dlo = dm;
        } else {
            hi = mid;
            dhi = dm;
        }
    }
    solver.spectrum_checked(path(0.5 * (lo + hi)))
}

fn sort_points(points: &mut Vec<EquimodularPoint>) {
    points.sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im)));
}

/// Equimodular points on the edges of a `grid x grid` lattice covering the
/// rectangle with corners `lo` and `hi`.
pub fn scan_equimodular(
    op: &TransferOperator,
    lo: Complex64,
    hi: Complex64,
    grid: usize,
    tol: f64,
) -> Result<Vec<EquimodularPoint>> {
    if grid < 2 {
        return Err(Error::InvalidArgument("grid must be at least 2x2".into()));
    }
    let solver = SpectralSolver::new(op)?;
    if op.dim() < 2 {
        return Ok(Vec::new());
    }
    let at = |i: usize, j: usize| {
        Complex64::new(
            lo.re + (hi.re - lo.re) * i as f64 / (grid - 1) as f64,
            lo.im + (hi.im - lo.im) * j as f64 / (grid - 1) as f64,
        )
    };
    let spectra: Vec<Spectrum> = (0..grid * grid)
        .into_par_iter()
        .map(|k| solver.spectrum(at(k % grid, k / grid), 53))
        .collect::<Result<_>>()?;
    let mut edges = Vec::new();
    for j in 0..grid {
        for i in 0..grid {
            let k = j * grid + i;
            if i + 1 < grid {
                edges.push((k, k + 1));
            }
            if j + 1 < grid {
                edges.push((k, k + grid));
            }
        }
    }
    let mut points: Vec<EquimodularPoint> = edges
        .into_par_iter()
        .filter(|&(a, b)| dominant_switches(&spectra[a], &spectra[b]))
        .map(|(a, b)| {
            let (za, zb) = (spectra[a].z, spectra[b].z);
            let s = bisect_switch(
                &solver,
                |t| za + (zb - za) * t,
                0.0,
                1.0,
                spectra[a].dominant(),
                spectra[b].dominant(),
                tol,
            )?;
            Ok(point_from(&s))
        })
        .collect::<Result<_>>()?;
    sort_points(&mut points);
    Ok(points)
}

/// Discriminant roots at which the colliding pair is dominant: the
/// endpoints of equimodular curves.
pub fn equimodular_endpoints(op: &TransferOperator) -> Result<Vec<Complex64>> {
    let solver = SpectralSolver::new(op)?;
    if op.dim() < 2 {
        return Ok(Vec::new());
    }
    let bi = bivariate_charpoly(op)?;
    let disc = discriminant_in_x(&bi)?;
    if disc.is_zero() {
        return Err(Error::InvalidArgument(
            "characteristic polynomial has a repeated factor".into(),
        ));
    }
    if disc.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let zs = find_roots(&disc, 30)?;
    let mut out = Vec::new();
    for &(r, _) in &zs.roots {
        if r.norm() < 1e-300 {
            continue;
        }
        let z = if r.im.abs() <= 1e-12 * (1.0 + r.re.abs()) {
            Complex64::new(r.re, 0.0)
        } else {
            r
        };
        let s = solver.spectrum(z, 53)?;
        let ev = &s.eigenvalues;
        let scale = ev[0].norm();
        let collide = (ev[0] - ev[1]).norm() <= 1e-5 * scale;
        let separated = ev.get(2).is_none_or(|l3| scale - l3.norm() > 1e-5 * scale);
        if collide && separated {
            out.push(z);
        }
    }
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(out)
}

/// Endpoint closest in argument to the positive real axis, upper half plane.
pub fn z_c_endpoint(endpoints: &[Complex64]) -> Option<Complex64> {
    endpoints
        .iter()
        .filter(|z| z.im > 0.0)
        .min_by(|a, b| a.arg().total_cmp(&b.arg()))
        .copied()
}

/// Largest negative real endpoint.
pub fn z_d_endpoint(endpoints: &[Complex64]) -> Option<f64> {
    endpoints
        .iter()
        .filter(|z| z.im == 0.0 && z.re < 0.0)
        .map(|z| z.re)
        .max_by(f64::total_cmp)
}

/// An interval of the negative axis on which the dominant eigenvalue is
/// real and simple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapInterval {
    pub z_left: f64,
    pub z_right: f64,
    pub dominant_sign: i8,
}

impl GapInterval {
    pub fn width(&self) -> f64 {
        self.z_right - self.z_left
    }
}

pub const DEFAULT_GAP_SAMPLES: usize = 8000;

/// Gaps on `[-1, z_d]`. Runs that touch either end of the scan are dropped.
pub fn detect_gaps(op: &TransferOperator, z_d: f64, tol: f64) -> Result<Vec<GapInterval>> {
    detect_gaps_sampled(op, z_d, tol, DEFAULT_GAP_SAMPLES)
}

pub fn detect_gaps_sampled(
    op: &TransferOperator,
    z_d: f64,
    tol: f64,
    samples: usize,
) -> Result<Vec<GapInterval>> {
    if !(z_d > -1.0) || samples < 3 {
        return Err(Error::InvalidArgument(
            "need z_d > -1 and at least 3 samples".into(),
        ));
    }
    let solver = SpectralSolver::new(op)?;
    let zs: Vec<f64> = (0..samples)
        .map(|i| -1.0 + (z_d + 1.0) * i as f64 / (samples - 1) as f64)
        .collect();
    let signs: Vec<Option<i8>> = zs
        .par_iter()
        .map(|&z| {
            Ok(solver
                .spectrum_checked(Complex64::new(z, 0.0))?
                .real_dominant_sign())
        })
        .collect::<Result<_>>()?;
    let is_gap = |z: f64| -> Result<bool> {
        Ok(solver
            .spectrum_checked(Complex64::new(z, 0.0))?
            .real_dominant_sign()
            .is_some())
    };
    // Bisects between a point outside (`out`) and inside (`inn`) a gap.
    let edge = |mut out: f64, mut inn: f64| -> Result<f64> {
        while (out - inn).abs() > tol {
            let mid = 0.5 * (out + inn);
            if is_gap(mid)? {
                inn = mid;
            } else {
                out = mid;
            }
        }
        Ok(0.5 * (out + inn))
    };
    let mut gaps = Vec::new();
    let mut i = 0;
    while i < samples {
        if signs[i].is_none() {
            i += 1;
            continue;
        }
        let start = i;
        while i < samples && signs[i].is_some() {
            i += 1;
        }
        let end = i - 1;
        if start == 0 || end == samples - 1 {
            continue;
        }
        let mid = (start + end) / 2;
        gaps.push(GapInterval {
            z_left: edge(zs[start - 1], zs[start])?,
            z_right: edge(zs[end + 1], zs[end])?,
            dominant_sign: signs[mid].unwrap(),
        });
    }
    Ok(gaps)
}

/// Unwrapped relative phase of the dominant pair along the negative axis.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    pub lh: usize,
    /// Sample points, descending from the right end.
    pub z: Vec<f64>,
    pub theta: Vec<f64>,
    /// `theta / (2 pi L_h)`.
    pub phi: Vec<f64>,
    pub neg_dphi_dz: Vec<f64>,
    /// Samples where the dominant eigenvalue is real and simple.
    pub in_gap: Vec<bool>,
}

impl PhaseProfile {
    pub fn z_range(&self) -> (f64, f64) {
        (*self.z.last().unwrap(), self.z[0])
    }

    /// Midpoints between samples where the gap flag changes.
    pub fn gap_edges(&self) -> Vec<f64> {
        self.in_gap
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] != w[1])
            .map(|(i, _)| 0.5 * (self.z[i] + self.z[i + 1]))
            .collect()
    }

    /// `-dphi/dz` interpolated linearly at `z`.
    pub fn neg_dphi_dz_at(&self, z: f64) -> Option<f64> {
        let (lo, hi) = self.z_range();
        if z < lo || z > hi {
            return None;
        }
        let i = self
            .z
            .partition_point(|&s| s > z)
            .clamp(1, self.z.len() - 1);
        let (z0, z1) = (self.z[i - 1], self.z[i]);
        let t = if z0 == z1 { 0.0 } else { (z - z0) / (z1 - z0) };
        Some(self.neg_dphi_dz[i - 1] + t * (self.neg_dphi_dz[i] - self.neg_dphi_dz[i - 1]))
    }

    /// `phi` interpolated linearly at `z`.
    pub fn phi_at(&self, z: f64) -> Option<f64> {
        let (lo, hi) = self.z_range();
        if z < lo || z > hi {
            return None;
        }
        let i = self
            .z
            .partition_point(|&s| s > z)
            .clamp(1, self.z.len() - 1);
        let (z0, z1) = (self.z[i - 1], self.z[i]);
        let t = if z0 == z1 { 0.0 } else { (z - z0) / (z1 - z0) };
        Some(self.phi[i - 1] + t * (self.phi[i] - self.phi[i - 1]))
    }
}

/// Sampling window for [`phase_profile_on`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseWindow {
    pub z_min: f64,
    pub z_max: f64,
    pub samples: usize,
}

impl PhaseWindow {
    pub fn for_model(model: Model, samples: usize) -> Self {
        PhaseWindow {
            z_min: -0.99,
            z_max: default_z_d(model) - 1e-4,
            samples,
        }
    }
}

pub fn phase_profile(op: &TransferOperator, n_samples: usize) -> Result<PhaseProfile> {
    phase_profile_on(op, &PhaseWindow::for_model(op.model(), n_samples))
}

/// `2 arg` of the upper dominant eigenvalue, in `[0, 2 pi]`.
fn raw_phase(s: &Spectrum) -> (f64, bool) {
    if let Some(sign) = s.real_dominant_sign() {
        return (if sign > 0 { 0.0 } else { 2.0 * PI }, true);
    }
    let up = s
        .eigenvalues
        .iter()
        .take(2)
        .copied()
        .find(|l| l.im >= 0.0)
        .unwrap_or(s.eigenvalues[0]);
    (2.0 * up.arg().abs(), false)
}

pub fn phase_profile_on(op: &TransferOperator, window: &PhaseWindow) -> Result<PhaseProfile> {
    let n = window.samples;
    if n < 3 || !(window.z_min < window.z_max) {
        return Err(Error::InvalidArgument(
            "need at least 3 samples on a nonempty window".into(),
        ));
    }
    let solver = SpectralSolver::new(op)?;
    let zs: Vec<f64> = (0..n)
        .map(|i| window.z_max - (window.z_max - window.z_min) * i as f64 / (n - 1) as f64)
        .collect();
    let raw: Vec<(f64, bool)> = zs
        .par_iter()
        .map(|&z| Ok(raw_phase(&solver.spectrum(Complex64::new(z, 0.0), 53)?)))
        .collect::<Result<_>>()?;
    let mut theta = Vec::with_capacity(n);
    let mut prev = 0.0f64;
    for (i, &(r, _)) in raw.iter().enumerate() {
        // theta is determined modulo 4 pi up to sign; take the smallest
        // branch not below the previous value.
        let floor = prev - 1e-6;
        let mut best = f64::INFINITY;
        let m0 = ((floor - 2.0 * PI) / (4.0 * PI)).floor().max(0.0) as i64;
        for m in m0..m0 + 3 {
            for c in [4.0 * PI * m as f64 - r, 4.0 * PI * m as f64 + r] {
                if c >= floor && c < best {
                    best = c;
                }
            }
        }
        if i > 0 && best - prev > PI {
            return Err(Error::UnwrapAmbiguity {
                z: zs[i],
                jump: best - prev,
            });
        }
        let value = best.max(prev);
        theta.push(value);
        prev = value;
    }
    let lh = op.width();
    let phi: Vec<f64> = theta.iter().map(|t| t / (2.0 * PI * lh as f64)).collect();
    let neg_dphi_dz = (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            -(phi[b] - phi[a]) / (zs[b] - zs[a])
        })
        .collect();
    Ok(PhaseProfile {
        lh,
        z: zs,
        theta,
        phi,
        neg_dphi_dz,
        in_gap: raw.iter().map(|r| r.1).collect(),
    })
}

/// Search window for [`rightmost_crossing_near_minus_one_on`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingWindow {
    pub z_min: f64,
    pub z_max: f64,
    pub samples: usize,
}

impl Default for CrossingWindow {
    fn default() -> Self {
        CrossingWindow {
            z_min: -1.0 + 1e-6,
            z_max: -0.85,
            samples: 30_000,
        }
    }
}

/// `|lambda_1|` minus the largest modulus among eigenvalues other than the
/// dominant one and its conjugate, with the eigenvalue attaining it.
fn crossing_gap(s: &Spectrum) -> (f64, Complex64) {
    let l1 = s.eigenvalues[0];
    let scale = l1.norm();
    let other = s
        .eigenvalues
        .iter()
        .skip(1)
        .find(|&&l| l1.im == 0.0 || (l - l1.conj()).norm() > 1e-9 * scale)
        .copied()
        .unwrap_or_default();
    (scale - other.norm(), other)
}

pub fn rightmost_crossing_near_minus_one(op: &TransferOperator) -> Result<Option<f64>> {
    rightmost_crossing_near_minus_one_on(op, &CrossingWindow::default())
}

/// Largest real `z` in the window where an equimodular curve crosses the
/// axis: a tie between the dominant eigenvalue and one that is neither
/// its conjugate nor its collision partner.
pub fn rightmost_crossing_near_minus_one_on(
    op: &TransferOperator,
    window: &CrossingWindow,
) -> Result<Option<f64>> {
    let solver = SpectralSolver::new(op)?;
    if op.dim() < 3 {
        return Ok(None);
    }
    let n = window.samples.max(3);
    let zs: Vec<f64> = (0..n)
        .map(|i| window.z_min + (window.z_max - window.z_min) * i as f64 / (n - 1) as f64)
        .collect();
    let eval = |z: f64| -> Result<(f64, Complex64, Complex64)> {
        let s = solver.spectrum(Complex64::new(z, 0.0), 53)?;
        let (f, other) = crossing_gap(&s);
        Ok((f, s.dominant(), other))
    };
    let f: Vec<f64> = zs
        .par_iter()
        .map(|&z| Ok(eval(z)?.0))
        .collect::<Result<_>>()?;
    let candidates: Vec<usize> = (1..n - 1)
        .filter(|&i| f[i] <= f[i - 1] && f[i] <= f[i + 1])
        .collect();
    let refined: Vec<Option<f64>> = candidates
        .par_iter()
        .map(|&i| {
            // Golden-section search on the bracketing samples.
            let g = 0.5 * (5f64.sqrt() - 1.0);
            let (mut a, mut b) = (zs[i - 1], zs[i + 1]);
            let mut c = b - g * (b - a);
            let mut d = a + g * (b - a);
            let (mut fc, mut fd) = (eval(c)?.0, eval(d)?.0);
            for _ in 0..80 {
                if fc < fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - g * (b - a);
                    fc = eval(c)?.0;
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + g * (b - a);
                    fd = eval(d)?.0;
                }
            }
            let z = 0.5 * (a + b);
            let (fz, l1, other) = eval(z)?;
            let scale = l1.norm();
            let distinct =
                (other - l1).norm() > 1e-3 * scale && (other - l1.conj()).norm() > 1e-3 * scale;
            Ok((fz.abs() < 1e-8 * scale && distinct).then_some(z))
        })
        .collect::<Result<_>>()?;
    Ok(refined.into_iter().flatten().max_by(f64::total_cmp))
}

pub const DEFAULT_RAY_SAMPLES: usize = 3600;

/// Arguments in `(-pi, pi]` of equimodular points on `|z| = radius`.
pub fn ray_angles(op: &TransferOperator, radius: f64) -> Result<Vec<f64>> {
    ray_angles_sampled(op, radius, DEFAULT_RAY_SAMPLES)
}

pub fn ray_angles_sampled(op: &TransferOperator, radius: f64, samples: usize) -> Result<Vec<f64>> {
    let solver = SpectralSolver::new(op)?;
    if op.dim() < 2 {
        return Ok(Vec::new());
    }
    // Offset keeps samples off the real axis.
    let angle = |k: f64| -PI + 2.0 * PI * (k + 0.5) / samples as f64;
    let path = |t: f64| Complex64::from_polar(radius, t);
    let spectra: Vec<Spectrum> = (0..samples)
        .into_par_iter()
        .map(|k| solver.spectrum(path(angle(k as f64)), 53))
        .collect::<Result<_>>()?;
    let mut out: Vec<f64> = (0..samples)
        .into_par_iter()
        .filter(|&k| dominant_switches(&spectra[k], &spectra[(k + 1) % samples]))
        .map(|k| {
            let (t0, t1) = (angle(k as f64), angle(k as f64 + 1.0));
            let s = bisect_switch(
                &solver,
                path,
                t0,
                t1,
                spectra[k].dominant(),
                spectra[(k + 1) % samples].dominant(),
                1e-10 * radius,
            )?;
            let a = s.z.arg();
            Ok(if a <= -PI { a + 2.0 * PI } else { a })
        })
        .collect::<Result<_>>()?;
    out.sort_by(f64::total_cmp);
    Ok(out)
}
