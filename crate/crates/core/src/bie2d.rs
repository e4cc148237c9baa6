//! Scattering of a point-source elastic wave by a locally rough density
//! interface in 2D.
//!
//! The total displacement is split into the reference wave of the flat-
//! interface problem and a remainder û supported near the perturbation.  û is
//! discretized with curved quadratic finite elements on a disk B_R containing
//! the roughness, coupled to a boundary density p on ∂B_R through the exact
//! radiation condition of the two-layer medium: a single-layer operator (with
//! the two-layer Green's tensor as kernel) and a pseudo-stress double-layer
//! operator close the system on the circle.
//!
//! The boundary operators use a Nyström method on equispaced angles.  Each
//! kernel is split into the free-space (Kupradze) model of the row node's
//! half-space — treated with a spectral log-quadrature rule whose logarithmic
//! coefficient is obtained in closed form by the Bessel-J substitution
//! (i/4)H_m ↦ −(1/2π)J_m — plus a C¹ remainder integrated by the plain
//! trapezoid rule.  The remainder is evaluated for all node pairs at once
//! from the separable structure of the spectral representation (vertical
//! decay profiles times e^{iξ(x₁−y₁)}), reduced to dense matrix products
//! over a fixed contour grid.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

use crate::elastic_fields::{
    czmat, czvec, kupradze_jet, kupradze_tensor, phi_derivs, stress_direct, CVec, FieldJet, RadialDerivs,
    SurfaceFrame, CZERO,
};
use crate::green2d::{Green2d, RegionTag};
use crate::lapack::{gemm_nn_acc, gemm_tn_acc, BandLu, BandMatrix, DenseLu};
use crate::medium::{beta, ElasticMedium, HalfSpace, StressWeights, WaveType, Wavenumbers};
use crate::quadrature::{QuadConfig, SpectralIntegrator};
use crate::specfun::bessel_j;
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Shape of the interface perturbation x₂ = f(x₁).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ProfileShape {
    /// Smooth compactly supported bump h·exp(1 − 1/(1 − (x₁/r)²)) on |x₁| < r.
    Bump { height: f64, radius: f64 },
    /// Piecewise-linear interpolation of samples; zero outside their range.
    Samples { xs: Vec<f64>, ys: Vec<f64> },
}

/// A Lipschitz, compactly supported interface perturbation: the interface is
/// Γ = {(x₁, f(x₁))} and coincides with the line x₂ = 0 outside the support.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceProfile {
    pub shape: ProfileShape,
    pub support_radius: f64,
    pub lipschitz_bound: f64,
    pub max_height: f64,
}

impl SurfaceProfile {
    /// The unperturbed flat interface.
    pub fn flat() -> Self {
        SurfaceProfile { shape: ProfileShape::Bump { height: 0.0, radius: 1.0 }, support_radius: 1.0, lipschitz_bound: 0.0, max_height: 0.0 }
    }

    /// A smooth bump of the given height (may be negative for a dip) and
    /// support half-width.
    pub fn bump(height: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() || !height.is_finite() {
            return Err(Error::InvalidInput(format!("bump profile needs finite height and radius > 0, got {height}, {radius}")));
        }
        let shape = ProfileShape::Bump { height, radius };
        let (lip, maxh) = sampled_bounds(&shape, radius);
        Ok(SurfaceProfile { shape, support_radius: radius, lipschitz_bound: lip, max_height: maxh })
    }

    /// A piecewise-linear profile through `(xs[i], ys[i])`; the endpoints
    /// must return to height zero.
    pub fn from_samples(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::InvalidInput("sampled profile needs ≥ 2 matching sample arrays".into()));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("sample abscissae must be strictly increasing".into()));
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("sample values must be finite".into()));
        }
        if ys[0] != 0.0 || *ys.last().unwrap() != 0.0 {
            return Err(Error::InvalidInput("sampled profile must start and end at height 0".into()));
        }
        let support = xs[0].abs().max(xs.last().unwrap().abs());
        let lip = xs
            .windows(2)
            .zip(ys.windows(2))
            .map(|(xw, yw)| ((yw[1] - yw[0]) / (xw[1] - xw[0])).abs())
            .fold(0.0, f64::max);
        let maxh = ys.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(SurfaceProfile { shape: ProfileShape::Samples { xs, ys }, support_radius: support, lipschitz_bound: lip, max_height: maxh })
    }

    /// Interface height f(x₁).
    pub fn eval(&self, x1: f64) -> f64 {
        match &self.shape {
            ProfileShape::Bump { height, radius } => {
                let t = x1 / radius;
                if t.abs() >= 1.0 {
                    0.0
                } else {
                    height * (1.0 - 1.0 / (1.0 - t * t)).exp()
                }
            }
            ProfileShape::Samples { xs, ys } => {
                if x1 <= xs[0] || x1 >= *xs.last().unwrap() {
                    return 0.0;
                }
                let i = xs.partition_point(|v| *v <= x1).min(xs.len() - 1);
                let (x0, x1b) = (xs[i - 1], xs[i]);
                let s = (x1 - x0) / (x1b - x0);
                ys[i - 1] + s * (ys[i] - ys[i - 1])
            }
        }
    }

    pub fn is_flat(&self) -> bool {
        self.max_height == 0.0
    }
}

/// Worst slope and height of a shape by dense sampling (construction-time).
fn sampled_bounds(shape: &ProfileShape, radius: f64) -> (f64, f64) {
    let probe = SurfaceProfile { shape: shape.clone(), support_radius: radius, lipschitz_bound: 0.0, max_height: 0.0 };
    let n = 20_000;
    let h = 2.0 * radius / n as f64;
    let mut lip = 0.0f64;
    let mut maxh = 0.0f64;
    let mut prev = probe.eval(-radius);
    for i in 1..=n {
        let v = probe.eval(-radius + i as f64 * h);
        lip = lip.max(((v - prev) / h).abs());
        maxh = maxh.max(v.abs());
        prev = v;
    }
    (lip, maxh)
}

/// A point source above the interface with a complex polarization vector:
/// the incident wave is the free-space (upper-density) column field Π₊(·,z)a.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IncidentSource {
    pub z: [f64; 2],
    pub a: [Complex64; 2],
}

impl IncidentSource {
    pub fn validate(&self, profile: &SurfaceProfile) -> Result<()> {
        if self.z.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("source position must be finite".into()));
        }
        if self.z[1] <= profile.eval(self.z[0]) {
            return Err(Error::InvalidInput(format!(
                "source must lie above the interface: z₂ = {} ≤ f(z₁) = {}",
                self.z[1],
                profile.eval(self.z[0])
            )));
        }
        if self.a[0].norm() + self.a[1].norm() == 0.0 {
            return Err(Error::InvalidInput("polarization vector must be nonzero".into()));
        }
        Ok(())
    }

    /// The incident field and its gradient at x (free-space upper medium).
    pub fn jet(&self, m: &ElasticMedium, x: [f64; 2]) -> Result<FieldJet> {
        let a = [self.a[0], self.a[1], CZERO];
        kupradze_jet(m, HalfSpace::Plus, &x, &self.z, &a)
    }
}

/// Discretization parameters of the solver.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Override the number of mesh divisions per direction (must be even).
    pub mesh_divisions: Option<usize>,
    /// Target mesh resolution when `mesh_divisions` is not given.
    pub points_per_wavelength: f64,
    /// Relative tail truncation of the fixed spectral grid.
    pub tail_tol: f64,
    /// Replace the pseudo-stress weights in the volume form only (regression
    /// experiments; the boundary operators always use the pseudo weights).
    pub volume_weights: Option<StressWeights>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { mesh_divisions: None, points_per_wavelength: 10.0, tail_tol: 1e-8, volume_weights: None }
    }
}

/// The computational ball: mesh statistics of one assembled discretization.
#[derive(Debug, Clone)]
pub struct DiscretizedBall {
    pub radius: f64,
    pub boundary_nodes: usize,
    pub mesh_divisions: usize,
    pub mesh_nodes: usize,
    pub elements: usize,
}

/// The discrete solution: finite-element coefficients of û on the disk, the
/// boundary density p, and the trace data needed for exterior evaluation.
#[derive(Debug, Clone)]
pub struct ScatterSolution {
    /// û at the mesh nodes, interleaved components (2·mesh_nodes values).
    pub u_hat: Vec<Complex64>,
    /// Boundary density at the Nyström nodes, interleaved components.
    pub p: Vec<Complex64>,
    /// ũ = û − (u⁰ − u^in) at the Nyström nodes.
    pub u_tilde_boundary: Vec<Complex64>,
    /// u⁰ − u^in at the Nyström nodes.
    pub reference_boundary: Vec<Complex64>,
    pub source: IncidentSource,
}

/// The reference wave u⁰ of the flat-interface problem: G(x,z)a when the
/// source sits in the upper half-plane, zero when it sits below the line
/// x₂ = 0 (in a dip of the rough interface).
pub fn reference_wave(g: &Green2d, x: [f64; 2], z: [f64; 2], a: [Complex64; 2]) -> Result<[Complex64; 2]> {
    if z[1] <= 0.0 {
        return Ok([CZERO; 2]);
    }
    let gm = g.assemble(x, z)?;
    Ok([
        gm.entries[0][0] * a[0] + gm.entries[0][1] * a[1],
        gm.entries[1][0] * a[0] + gm.entries[1][1] * a[1],
    ])
}

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

fn sidx(h: HalfSpace) -> usize {
    match h {
        HalfSpace::Plus => 0,
        HalfSpace::Minus => 1,
    }
}

fn hs(i: usize) -> HalfSpace {
    if i == 0 {
        HalfSpace::Plus
    } else {
        HalfSpace::Minus
    }
}

fn wave(i: usize) -> WaveType {
    if i == 0 {
        WaveType::P
    } else {
        WaveType::S
    }
}

const GL8_X: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_W: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// 4-point Gauss nodes/weights on [0,1] (weights sum to 1).
const GL4_01_X: [f64; 4] = [0.069_431_844_202_973_71, 0.330_009_478_207_571_9, 0.669_990_521_792_428_1, 0.930_568_155_797_026_3];
const GL4_01_W: [f64; 4] = [0.173_927_422_568_726_9, 0.326_072_577_431_273_1, 0.326_072_577_431_273_1, 0.173_927_422_568_726_9];

// ---------------------------------------------------------------------------
// Fixed spectral grid for the separable block assembly
// ---------------------------------------------------------------------------

/// One node of the fixed contour grid with all per-ξ kernel data: the
/// quadrature weight (including dξ and 1/2π), the vertical decay rates per
/// (wave, side), and the separable coefficients per (wave a, column j,
/// observation side, source side, source-wave slot).
struct XiNode {
    xi: Complex64,
    w: Complex64,
    rate: [[Complex64; 2]; 2],
    sep: [[[[[Complex64; 2]; 2]; 2]; 2]; 2],
}

/// A kernel selector: scalar potential family `a` (0 = p, 1 = s), tensor
/// column `j` ∈ {1,2}, and up to two spectral derivatives with respect to the
/// observation point (0 = none, 1 = ∂₁ ↦ iξ, 2 = ∂₂ ↦ decay rate).
#[derive(Clone, Copy)]
struct KSpec {
    a: usize,
    j: usize,
    d: [usize; 2],
}

fn build_xi_grid(g: &Green2d, integ: &SpectralIntegrator, decay: f64, osc: f64, tail_tol: f64) -> Result<Vec<XiNode>> {
    let wn = g.wavenumbers();
    let bps = wn.branch_points();
    let k_min = bps.iter().cloned().fold(f64::INFINITY, f64::min);
    let k_max = bps.iter().cloned().fold(0.0, f64::max);
    if decay < 5e-3 {
        return Err(Error::SlowDecay { rate: decay, min: 5e-3 });
    }
    // Tail cut-off: e^{−u}·u² ≈ tail_tol (the ξ²-growth of the worst
    // derivative kernels is absorbed into u).
    let l = (1.0 / tail_tol).ln();
    let mut u = l;
    for _ in 0..6 {
        u = l + 2.0 * u.max(2.0).ln();
    }
    let trunc = (u / decay).max(2.0 * k_max + 2.0);
    let path = integ.fourier_path(trunc);
    let phase_len = 4.0 / osc.max(0.05);
    let min_len = 0.01 * k_min;
    let mut pts: Vec<(Complex64, Complex64)> = Vec::new();
    for seg in &path.segments {
        match seg {
            crate::quadrature::Segment::Line { a, b } => {
                let len = (b - a).norm();
                if len < 1e-14 {
                    continue;
                }
                let mut s = 0.0;
                while s < len - 1e-12 {
                    let (z0, _) = seg.at(s / len);
                    let dbp = bps
                        .iter()
                        .flat_map(|k| [*k, -*k])
                        .map(|bp| (z0 - bp).norm())
                        .fold(f64::INFINITY, f64::min);
                    let pl = (0.3 * dbp).clamp(min_len, phase_len).min(len - s);
                    let (t0, t1) = (s / len, (s + pl) / len);
                    for (x, w) in GL8_X.iter().zip(GL8_W.iter()) {
                        let t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * x;
                        let (z, dz) = seg.at(t);
                        pts.push((z, w * 0.5 * (t1 - t0) * dz / (2.0 * PI)));
                    }
                    s += pl;
                }
            }
            crate::quadrature::Segment::Arc { .. } => {
                let panels = 4;
                for ip in 0..panels {
                    let (t0, t1) = (ip as f64 / panels as f64, (ip + 1) as f64 / panels as f64);
                    for (x, w) in GL8_X.iter().zip(GL8_W.iter()) {
                        let t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * x;
                        let (z, dz) = seg.at(t);
                        pts.push((z, w * 0.5 * (t1 - t0) * dz / (2.0 * PI)));
                    }
                }
            }
        }
    }
    let mut nodes = Vec::with_capacity(pts.len());
    for (xi, w) in pts {
        let mut rate = [[CZERO; 2]; 2];
        for (ai, rr) in rate.iter_mut().enumerate() {
            rr[0] = -beta(xi, wn.k(wave(ai), HalfSpace::Plus))?;
            rr[1] = beta(xi, wn.k(wave(ai), HalfSpace::Minus))?;
        }
        let mut sep = [[[[[CZERO; 2]; 2]; 2]; 2]; 2];
        for ai in 0..2 {
            for j in 1..=2 {
                for so in 0..2 {
                    for ss in 0..2 {
                        let region = RegionTag { x_region: hs(so), y_region: hs(ss) };
                        let slot = &mut sep[ai][j - 1][so][ss];
                        slot[ai] += g.tilde_kernel_coeff(wave(ai), j, xi, region)?;
                        let terms = g.coeff_terms(wave(ai), j, xi, hs(ss))?;
                        // terms[0] decays at the s-rate, terms[1] at the p-rate.
                        slot[1] += terms[0].coef;
                        slot[0] += terms[1].coef;
                    }
                }
            }
        }
        nodes.push(XiNode { xi, w, rate, sep });
    }
    Ok(nodes)
}

fn dmult(d: [usize; 2], a: usize, oside: usize, node: &XiNode) -> Complex64 {
    let mut m = Complex64::new(1.0, 0.0);
    for &k in d.iter() {
        match k {
            0 => {}
            1 => m *= Complex64::i() * node.xi,
            2 => m *= node.rate[a][oside],
            _ => unreachable!(),
        }
    }
    m
}

/// Evaluate the spectral (non-free) part of the selected kernels for all
/// (row, col) point pairs at once.  Rows and columns each lie on one side of
/// the interface; `obs_rows` says whether the observation point of the
/// kernels (the differentiated argument) runs over the rows or the columns.
/// Returns one dense nr×nc column-major block per selector.
fn spectral_blocks(
    grid: &[XiNode],
    rows: &[[f64; 2]],
    row_side: usize,
    cols: &[[f64; 2]],
    col_side: usize,
    obs_rows: bool,
    specs: &[KSpec],
) -> Vec<Vec<Complex64>> {
    let (nr, nc) = (rows.len(), cols.len());
    let mut out = vec![vec![CZERO; nr * nc]; specs.len()];
    if nr == 0 || nc == 0 {
        return out;
    }
    let chunk = 192;
    let i = Complex64::i();
    let mut arow = [vec![CZERO; chunk * nr], vec![CZERO; chunk * nr]];
    let mut bcol = [vec![CZERO; chunk * nc], vec![CZERO; chunk * nc]];
    let mut temp = vec![CZERO; chunk * nc];
    let mut scale = vec![CZERO; chunk];
    for nodes in grid.chunks(chunk) {
        let ck = nodes.len();
        for w in 0..2 {
            for (r, pt) in rows.iter().enumerate() {
                for (n, nd) in nodes.iter().enumerate() {
                    let ph = if obs_rows { i * nd.xi * pt[0] } else { -i * nd.xi * pt[0] };
                    arow[w][ck * r + n] = (ph + nd.rate[w][row_side] * pt[1]).exp();
                }
            }
            for (c, pt) in cols.iter().enumerate() {
                for (n, nd) in nodes.iter().enumerate() {
                    let ph = if obs_rows { -i * nd.xi * pt[0] } else { i * nd.xi * pt[0] };
                    bcol[w][ck * c + n] = (ph + nd.rate[w][col_side] * pt[1]).exp();
                }
            }
        }
        for (si, sp) in specs.iter().enumerate() {
            let (oside, sside) = if obs_rows { (row_side, col_side) } else { (col_side, row_side) };
            for slot in 0..2 {
                for (n, nd) in nodes.iter().enumerate() {
                    scale[n] = nd.w * nd.sep[sp.a][sp.j - 1][oside][sside][slot] * dmult(sp.d, sp.a, oside, nd);
                }
                let (amat, bmat) = if obs_rows { (&arow[sp.a], &bcol[slot]) } else { (&arow[slot], &bcol[sp.a]) };
                for c in 0..nc {
                    for n in 0..ck {
                        temp[ck * c + n] = bmat[ck * c + n] * scale[n];
                    }
                }
                gemm_tn_acc(nr, nc, ck, &amat[..ck * nr], &temp[..ck * nc], &mut out[si]);
            }
        }
    }
    out
}

/// Selector layouts shared by assembly and evaluation.
fn value_grad_specs() -> Vec<KSpec> {
    // Index: a*10 + (j-1)*5 + {∂₁, ∂₂, ∂₁₁, ∂₁₂, ∂₂₂}.
    let pats = [[1, 0], [2, 0], [1, 1], [1, 2], [2, 2]];
    let mut v = Vec::new();
    for a in 0..2 {
        for j in 1..=2 {
            for d in pats {
                v.push(KSpec { a, j, d });
            }
        }
    }
    v
}

fn grad_specs() -> Vec<KSpec> {
    // Index: (k-1)*4 + a*2 + (d-1): first spectral derivatives only.
    let mut v = Vec::new();
    for k in 1..=2 {
        for a in 0..2 {
            for d in 1..=2 {
                v.push(KSpec { a, j: k, d: [d, 0] });
            }
        }
    }
    v
}

fn hess_specs() -> Vec<KSpec> {
    // Index: (j-1)*6 + a*3 + {∂₁₁, ∂₁₂, ∂₂₂}.
    let pats = [[1, 1], [1, 2], [2, 2]];
    let mut v = Vec::new();
    for j in 1..=2 {
        for a in 0..2 {
            for d in pats {
                v.push(KSpec { a, j, d });
            }
        }
    }
    v
}

// ---------------------------------------------------------------------------
// Kupradze model kernels (H basis) and their log coefficients (J basis)
// ---------------------------------------------------------------------------

/// Radial profile Π = A(r)I + B(r)x̂x̂ᵀ with radial derivatives.
#[derive(Clone, Copy)]
struct Prof {
    a: Complex64,
    b: Complex64,
    da: Complex64,
    db: Complex64,
}

fn prof_from_derivs(ps: &RadialDerivs, pp: &RadialDerivs, mu: f64, rw2: f64, r: f64) -> Prof {
    let (c1, c2, c3) = (ps.d1 - pp.d1, ps.d2 - pp.d2, ps.d3 - pp.d3);
    Prof {
        a: ps.v / mu + c1 / (rw2 * r),
        b: (c2 - c1 / r) / rw2,
        da: ps.d1 / mu + (c2 * r - c1) / (rw2 * r * r),
        db: (c3 - c2 / r + c1 / (r * r)) / rw2,
    }
}

/// Radial derivatives of −(1/2π)J₀(kr): the coefficient of ln(r) in the
/// expansion of (i/4)H₀(kr), differentiated like the Hankel profile.
fn j_radial(k: f64, r: f64) -> Result<RadialDerivs> {
    let z = Complex64::new(k * r, 0.0);
    let j0 = bessel_j(0, z)?;
    let j1 = bessel_j(1, z)?;
    let c = Complex64::new(-1.0 / (2.0 * PI), 0.0);
    Ok(RadialDerivs {
        v: c * j0,
        d1: -c * k * j1,
        d2: -c * k * k * (j0 - j1 / z),
        d3: -c * k * k * k * (-j1 - j0 / z + 2.0 * j1 / (z * z)),
    })
}

fn model_profile(wn: &Wavenumbers, mu: f64, rho: f64, omega: f64, side: HalfSpace, r: f64, log_part: bool) -> Result<Prof> {
    let rw2 = rho * omega * omega;
    let (ps, pp) = if log_part {
        (j_radial(wn.ks(side), r)?, j_radial(wn.kp(side), r)?)
    } else {
        (phi_derivs(wn.ks(side), r, 2)?, phi_derivs(wn.kp(side), r, 2)?)
    };
    Ok(prof_from_derivs(&ps, &pp, mu, rw2, r))
}

/// The model tensor Π_{jk}(x,y) = Aδ_{jk} + B e_j e_k and the y-traction of
/// its rows, (P^{(y)}Π_{j·})_k, for the given radial profile.
fn model_pair(p: &Prof, mu: f64, w: &StressWeights, x: [f64; 2], y: [f64; 2], nu_y: [f64; 2]) -> ([[Complex64; 2]; 2], [[Complex64; 2]; 2]) {
    let r = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
    let e = [(x[0] - y[0]) / r, (x[1] - y[1]) / r];
    let tau = [nu_y[1], -nu_y[0]];
    let mut val = [[CZERO; 2]; 2];
    let mut trac = [[CZERO; 2]; 2];
    for j in 0..2 {
        for k in 0..2 {
            val[j][k] = p.b * e[j] * e[k];
            if j == k {
                val[j][k] += p.a;
            }
        }
        // u_k(y) = Π_{jk}(x,y); ∂_{y_l} r = −e_l, ∂_{y_l} e_i = −(δ_il − e_i e_l)/r.
        let mut g = [[CZERO; 2]; 2]; // g[k][l] = ∂_{y_l} u_k
        for k in 0..2 {
            for l in 0..2 {
                let djk = if j == k { 1.0 } else { 0.0 };
                let djl = if j == l { 1.0 } else { 0.0 };
                let dkl = if k == l { 1.0 } else { 0.0 };
                g[k][l] = -p.da * e[l] * djk - p.db * e[l] * e[j] * e[k]
                    - p.b * ((djl - e[j] * e[l]) * e[k] + e[j] * (dkl - e[k] * e[l])) / r;
            }
        }
        let div = g[0][0] + g[1][1];
        let dperp = g[0][1] - g[1][0];
        for k in 0..2 {
            let dn = g[k][0] * nu_y[0] + g[k][1] * nu_y[1];
            trac[j][k] = (mu + w.mu_tilde) * dn + w.lambda_tilde * nu_y[k] * div - w.mu_tilde * tau[k] * dperp;
        }
    }
    (val, trac)
}

/// Quadrature weights R_d for ∫₀^{2π} ln(4 sin²((t−s)/2)) g(s) ds on N
/// equispaced nodes: the weight of node p in the rule collocated at node q is
/// R_{(q−p) mod N}.
fn kress_log_weights(nb: usize) -> Vec<f64> {
    let n = nb / 2;
    (0..nb)
        .map(|d| {
            let delta = 2.0 * PI * d as f64 / nb as f64;
            let mut s = 0.0;
            for m in 1..n {
                s += (m as f64 * delta).cos() / m as f64;
            }
            -2.0 * PI / n as f64 * s - PI / (n as f64 * n as f64) * (n as f64 * delta).cos()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Mesh
// ---------------------------------------------------------------------------

struct Tri {
    n: [usize; 6],
    lower: bool,
}

struct BEdge {
    n: [usize; 3],
    /// Unwrapped node angles, strictly increasing along the edge.
    th: [f64; 3],
}

struct Mesh {
    nodes: Vec<[f64; 2]>,
    tris: Vec<Tri>,
    bedges: Vec<BEdge>,
    n_div: usize,
}

/// The square-to-disk map (u,v) ↦ R·(u√(1−v²/2), v√(1−u²/2)); the grid line
/// v = 0 lands on the horizontal diameter and the square boundary on ∂B_R.
fn disk_map(radius: f64, u: f64, v: f64) -> [f64; 2] {
    [radius * u * (1.0 - 0.5 * v * v).sqrt(), radius * v * (1.0 - 0.5 * u * u).sqrt()]
}

/// Vertical shear cutoff: 1 at the diameter, 0 for |Y| ≥ R/2, C¹ in between.
fn shear_cutoff(radius: f64, y: f64) -> f64 {
    let t = (2.0 * y.abs() / radius).min(1.0);
    1.0 - 3.0 * t * t + 2.0 * t * t * t
}

impl Mesh {
    fn build(radius: f64, profile: &SurfaceProfile, n_div: usize) -> Result<Mesh> {
        if n_div < 4 || n_div % 2 != 0 {
            return Err(Error::InvalidInput(format!("mesh divisions must be even and ≥ 4, got {n_div}")));
        }
        let nn = 2 * n_div + 1;
        let idx = |i: usize, j: usize| j * nn + i;
        let mut nodes = Vec::with_capacity(nn * nn);
        for j in 0..nn {
            for i in 0..nn {
                let u = i as f64 / n_div as f64 - 1.0;
                let v = j as f64 / n_div as f64 - 1.0;
                let xy = disk_map(radius, u, v);
                let x2 = xy[1] + profile.eval(xy[0]) * shear_cutoff(radius, xy[1]);
                nodes.push([xy[0], x2]);
            }
        }
        let mut tris = Vec::with_capacity(2 * n_div * n_div);
        for b in 0..n_div {
            let lower = b < n_div / 2;
            for a in 0..n_div {
                let (i0, j0) = (2 * a, 2 * b);
                let id = |di: usize, dj: usize| idx(i0 + di, j0 + dj);
                tris.push(Tri { n: [id(0, 0), id(2, 0), id(2, 2), id(1, 0), id(2, 1), id(1, 1)], lower });
                tris.push(Tri { n: [id(0, 0), id(2, 2), id(0, 2), id(1, 1), id(1, 2), id(0, 1)], lower });
            }
        }
        // Boundary edges walked counterclockwise (bottom, right, top, left).
        let mut chain: Vec<[usize; 3]> = Vec::with_capacity(4 * n_div);
        for a in 0..n_div {
            chain.push([idx(2 * a, 0), idx(2 * a + 1, 0), idx(2 * a + 2, 0)]);
        }
        for b in 0..n_div {
            chain.push([idx(2 * n_div, 2 * b), idx(2 * n_div, 2 * b + 1), idx(2 * n_div, 2 * b + 2)]);
        }
        for a in (0..n_div).rev() {
            chain.push([idx(2 * a + 2, 2 * n_div), idx(2 * a + 1, 2 * n_div), idx(2 * a, 2 * n_div)]);
        }
        for b in (0..n_div).rev() {
            chain.push([idx(0, 2 * b + 2), idx(0, 2 * b + 1), idx(0, 2 * b)]);
        }
        let mut bedges = Vec::with_capacity(chain.len());
        let mut prev = f64::NAN;
        for e in chain {
            let mut th = [0.0; 3];
            for (k, &nd) in e.iter().enumerate() {
                let raw = nodes[nd][1].atan2(nodes[nd][0]);
                th[k] = if prev.is_nan() {
                    raw
                } else {
                    prev + (raw - prev).rem_euclid(2.0 * PI)
                };
                prev = th[k];
            }
            bedges.push(BEdge { n: e, th });
        }
        Ok(Mesh { nodes, tris, bedges, n_div })
    }

    /// Locate the boundary edge containing angle t and the local coordinate
    /// ζ ∈ [0,1] with the quadratic angle map θ(ζ) = t.
    fn boundary_coord(&self, t: f64) -> (usize, f64) {
        let start = self.bedges[0].th[0];
        let tl = start + (t - start).rem_euclid(2.0 * PI);
        let mut lo = 0usize;
        let mut hi = self.bedges.len();
        while lo + 1 < hi {
            let mid = (lo + hi) / 2;
            if self.bedges[mid].th[0] <= tl {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let th = &self.bedges[lo].th;
        // θ(ζ) = aζ² + bζ + c through (0, θ₀), (½, θ₁), (1, θ₂).
        let a = 2.0 * th[0] - 4.0 * th[1] + 2.0 * th[2];
        let b = -3.0 * th[0] + 4.0 * th[1] - th[2];
        let c = th[0] - tl;
        let zeta = if a.abs() < 1e-14 * b.abs() {
            -c / b
        } else {
            let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
            // The map is increasing (b > 0, |a| small): take the branch that
            // is the perturbation of the linear root.
            let r1 = (-b + disc) / (2.0 * a);
            let r2 = (-b - disc) / (2.0 * a);
            if (0.0..=1.0).contains(&r1) || (r1 - 0.5).abs() <= (r2 - 0.5).abs() {
                r1
            } else {
                r2
            }
        };
        (lo, zeta.clamp(0.0, 1.0))
    }
}

/// 1D quadratic shape functions on [0,1] with nodes at 0, ½, 1.
fn p2_line(z: f64) -> ([f64; 3], [f64; 3]) {
    (
        [(1.0 - z) * (1.0 - 2.0 * z), 4.0 * z * (1.0 - z), z * (2.0 * z - 1.0)],
        [4.0 * z - 3.0, 4.0 - 8.0 * z, 4.0 * z - 1.0],
    )
}

/// P2 triangle shapes and reference gradients at barycentric λ.
fn p2_tri(l: [f64; 3]) -> ([f64; 6], [[f64; 2]; 6]) {
    let dl = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
    let mut n = [0.0; 6];
    let mut dn = [[0.0; 2]; 6];
    for i in 0..3 {
        n[i] = l[i] * (2.0 * l[i] - 1.0);
        for d in 0..2 {
            dn[i][d] = (4.0 * l[i] - 1.0) * dl[i][d];
        }
    }
    let pairs = [(0, 1), (1, 2), (2, 0)];
    for (k, (p, q)) in pairs.iter().enumerate() {
        n[3 + k] = 4.0 * l[*p] * l[*q];
        for d in 0..2 {
            dn[3 + k][d] = 4.0 * (l[*p] * dl[*q][d] + l[*q] * dl[*p][d]);
        }
    }
    (n, dn)
}

/// Degree-5 rule on the reference triangle; weights sum to 1 (multiply by
/// ½·|det J|).
const TRI7: [([f64; 3], f64); 7] = [
    ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
    ([0.470_142_064_105_115, 0.470_142_064_105_115, 0.059_715_871_789_770], 0.132_394_152_788_506),
    ([0.470_142_064_105_115, 0.059_715_871_789_770, 0.470_142_064_105_115], 0.132_394_152_788_506),
    ([0.059_715_871_789_770, 0.470_142_064_105_115, 0.470_142_064_105_115], 0.132_394_152_788_506),
    ([0.101_286_507_323_456, 0.101_286_507_323_456, 0.797_426_985_353_087], 0.125_939_180_544_827),
    ([0.101_286_507_323_456, 0.797_426_985_353_087, 0.101_286_507_323_456], 0.125_939_180_544_827),
    ([0.797_426_985_353_087, 0.101_286_507_323_456, 0.101_286_507_323_456], 0.125_939_180_544_827),
];

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

struct BNode {
    t: f64,
    x: [f64; 2],
    side: HalfSpace,
    nu: [f64; 2],
}

pub struct TransmissionSolver {
    m: ElasticMedium,
    wn: Wavenumbers,
    w: StressWeights,
    g: Green2d,
    integ: SpectralIntegrator,
    profile: SurfaceProfile,
    radius: f64,
    nb: usize,
    tail_tol: f64,
    bnodes: Vec<BNode>,
    mesh: Mesh,
    trace: Vec<[(usize, f64); 3]>,
    ball: DiscretizedBall,
    smat: Vec<Complex64>,
    kmat: Vec<Complex64>,
    band: BandLu,
    schur: DenseLu,
}

impl TransmissionSolver {
    /// Assemble the full discrete system for the given geometry: boundary
    /// operators, volume matrix, coupling blocks, and their factorizations.
    pub fn new(m: ElasticMedium, profile: SurfaceProfile, radius: f64, boundary_nodes: usize, cfg: &SolverConfig) -> Result<Self> {
        if m.dim != 2 {
            return Err(Error::InvalidInput(format!("the scattering solver needs dim 2, got {}", m.dim)));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidInput(format!("ball radius must be positive, got {radius}")));
        }
        if profile.support_radius >= 0.5 * radius {
            return Err(Error::InvalidInput(format!(
                "profile support radius {} must be < R/2 = {}",
                profile.support_radius,
                0.5 * radius
            )));
        }
        if profile.max_height >= radius / 3.0 {
            return Err(Error::InvalidInput(format!(
                "profile height {} must be < R/3 = {} for a bijective mesh shear",
                profile.max_height,
                radius / 3.0
            )));
        }
        let nb = boundary_nodes;
        if nb < 16 || nb % 2 != 0 {
            return Err(Error::InvalidInput(format!("boundary node count must be even and ≥ 16, got {nb}")));
        }
        let wn = m.wavenumbers()?;
        let w = StressWeights::pseudo(&m);
        let quad = QuadConfig { tol: 1e-8, ..QuadConfig::default() };
        let g = Green2d::new(m.clone(), quad.clone())?;
        let integ = SpectralIntegrator::new(&wn.branch_points(), quad)?;
        let n_div = match cfg.mesh_divisions {
            Some(n) => n,
            None => {
                let n = (cfg.points_per_wavelength * radius * wn.k_max() / (2.0 * PI)).ceil() as usize;
                (n + n % 2).max(8)
            }
        };
        let mesh = Mesh::build(radius, &profile, n_div)?;
        // Offset node grid: no node sits on the interface crossings at
        // angles 0 and π.
        let bnodes: Vec<BNode> = (0..nb)
            .map(|q| {
                let t = 2.0 * PI * (q as f64 + 0.5) / nb as f64;
                let x = [radius * t.cos(), radius * t.sin()];
                BNode { t, x, side: HalfSpace::of(x[1]), nu: [t.cos(), t.sin()] }
            })
            .collect();
        let trace: Vec<[(usize, f64); 3]> = bnodes
            .iter()
            .map(|bn| {
                let (ei, zeta) = mesh.boundary_coord(bn.t);
                let (nsh, _) = p2_line(zeta);
                let e = &mesh.bedges[ei];
                [(e.n[0], nsh[0]), (e.n[1], nsh[1]), (e.n[2], nsh[2])]
            })
            .collect();
        let ball = DiscretizedBall {
            radius,
            boundary_nodes: nb,
            mesh_divisions: n_div,
            mesh_nodes: mesh.nodes.len(),
            elements: mesh.tris.len(),
        };
        let mut solver = TransmissionSolver {
            m,
            wn,
            w,
            g,
            integ,
            profile,
            radius,
            nb,
            tail_tol: cfg.tail_tol,
            bnodes,
            mesh,
            trace,
            ball,
            smat: Vec::new(),
            kmat: Vec::new(),
            // Placeholders replaced below.
            band: {
                let mut b = BandMatrix::zeros(1, 0, 0);
                b.add(0, 0, Complex64::new(1.0, 0.0))?;
                b.factor()?
            },
            schur: DenseLu::factor(vec![Complex64::new(1.0, 0.0)], 1)?,
        };
        let (smat, kmat) = solver.assemble_boundary_operators()?;
        solver.smat = smat;
        solver.kmat = kmat;
        let vol_w = cfg.volume_weights.unwrap_or(solver.w);
        solver.band = solver.assemble_volume_matrix(&vol_w)?.factor()?;
        solver.schur = solver.assemble_schur()?;
        Ok(solver)
    }

    pub fn ball(&self) -> &DiscretizedBall {
        &self.ball
    }

    pub fn medium(&self) -> &ElasticMedium {
        &self.m
    }

    pub fn profile(&self) -> &SurfaceProfile {
        &self.profile
    }

    /// Apply the discrete single-layer operator to a boundary density
    /// (interleaved components at the Nyström nodes).
    pub fn apply_single_layer(&self, dens: &[Complex64]) -> Vec<Complex64> {
        self.matvec(&self.smat, dens)
    }

    /// Apply the discrete pseudo-stress double-layer operator to a boundary
    /// trace.
    pub fn apply_double_layer(&self, tr: &[Complex64]) -> Vec<Complex64> {
        self.matvec(&self.kmat, tr)
    }

    fn matvec(&self, mat: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
        let n = 2 * self.nb;
        let mut out = vec![CZERO; n];
        for c in 0..n {
            let vc = v[c];
            if vc == CZERO {
                continue;
            }
            for r in 0..n {
                out[r] += mat[c * n + r] * vc;
            }
        }
        out
    }

    // -- boundary operator assembly ------------------------------------------

    fn xi_grid_cached(
        &self,
        cache: &mut HashMap<(u64, u64), std::rc::Rc<Vec<XiNode>>>,
        decay: f64,
        osc: f64,
    ) -> Result<std::rc::Rc<Vec<XiNode>>> {
        // Quantize downward in decay / upward in oscillation so a cached grid
        // is always at least as accurate as requested.
        let qd = 1.25f64.powf((decay.ln() / 1.25f64.ln()).floor());
        let qo = 1.25f64.powf((osc.max(0.05).ln() / 1.25f64.ln()).ceil());
        let key = (qd.to_bits(), qo.to_bits());
        if let Some(g) = cache.get(&key) {
            return Ok(g.clone());
        }
        let grid = std::rc::Rc::new(build_xi_grid(&self.g, &self.integ, qd, qo, self.tail_tol)?);
        cache.insert(key, grid.clone());
        Ok(grid)
    }

    fn assemble_boundary_operators(&self) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let nb = self.nb;
        let n2 = 2 * nb;
        let mut smat = vec![CZERO; n2 * n2];
        let mut kmat = vec![CZERO; n2 * n2];
        let wtrap = 2.0 * PI * self.radius / nb as f64;
        // Model (singular) part: Kress log rule against the row-side
        // free-space tensor over the whole circle.
        let rw = kress_log_weights(nb);
        let rows: Vec<(Vec<[[Complex64; 2]; 2]>, Vec<[[Complex64; 2]; 2]>)> = (0..nb)
            .into_par_iter()
            .map(|q| self.model_row(q, &rw))
            .collect::<Result<Vec<_>>>()?;
        for (q, (srow, krow)) in rows.into_iter().enumerate() {
            for p in 0..nb {
                for i in 0..2 {
                    for k in 0..2 {
                        smat[(2 * p + k) * n2 + 2 * q + i] += srow[p][i][k];
                        kmat[(2 * p + k) * n2 + 2 * q + i] += krow[p][i][k];
                    }
                }
            }
        }
        // Smooth remainder: separable spectral evaluation over (side, bin)
        // block pairs; cross-side blocks carry the full kernel here and the
        // model loop already folded the matching free-tensor subtraction into
        // its cross-side weights.
        let bins = |x2: f64| -> usize {
            let a = x2.abs();
            if a < 0.35 {
                0
            } else if a < 1.2 {
                1
            } else {
                2
            }
        };
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); 6];
        for (q, bn) in self.bnodes.iter().enumerate() {
            groups[3 * sidx(bn.side) + bins(bn.x[1])].push(q);
        }
        let sspecs = grad_specs();
        let kspecs = hess_specs();
        let mut cache: HashMap<(u64, u64), std::rc::Rc<Vec<XiNode>>> = HashMap::new();
        for (gr, rowset) in groups.iter().enumerate() {
            for (gc, colset) in groups.iter().enumerate() {
                if rowset.is_empty() || colset.is_empty() {
                    continue;
                }
                let (rside, cside) = (gr / 3, gc / 3);
                let rpts: Vec<[f64; 2]> = rowset.iter().map(|&q| self.bnodes[q].x).collect();
                let cpts: Vec<[f64; 2]> = colset.iter().map(|&p| self.bnodes[p].x).collect();
                let dmin = rpts.iter().map(|p| p[1].abs()).fold(f64::INFINITY, f64::min)
                    + cpts.iter().map(|p| p[1].abs()).fold(f64::INFINITY, f64::min);
                let (rlo, rhi) = rpts.iter().map(|p| p[0]).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
                let (clo, chi) = cpts.iter().map(|p| p[0]).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
                let osc = (rhi - clo).max(chi - rlo).max(0.0);
                let grid = self.xi_grid_cached(&mut cache, dmin, osc)?;
                // Single layer: observation point on the rows.
                let sblk = spectral_blocks(&grid, &rpts, rside, &cpts, cside, true, &sspecs);
                let (cp, cs) = (self.wn.kp(hs(rside)).powi(-2), self.wn.ks(hs(rside)).powi(-2));
                let (nr, _nc) = (rpts.len(), cpts.len());
                for (ci, &p) in colset.iter().enumerate() {
                    for (ri, &q) in rowset.iter().enumerate() {
                        let e = ci * nr + ri;
                        for k in 1..=2 {
                            let b = |a: usize, d: usize| sblk[(k - 1) * 4 + a * 2 + (d - 1)][e];
                            let g0 = -cp * b(0, 1) - cs * b(1, 2);
                            let g1 = -cp * b(0, 2) + cs * b(1, 1);
                            smat[(2 * p + k - 1) * n2 + 2 * q] += wtrap * g0;
                            smat[(2 * p + k - 1) * n2 + 2 * q + 1] += wtrap * g1;
                        }
                    }
                }
                // Double layer: observation point (the traction variable) on
                // the columns.
                let kblk = spectral_blocks(&grid, &rpts, rside, &cpts, cside, false, &kspecs);
                let (cpy, csy) = (self.wn.kp(hs(cside)).powi(-2), self.wn.ks(hs(cside)).powi(-2));
                for (ci, &p) in colset.iter().enumerate() {
                    let nu = self.bnodes[p].nu;
                    let tau = [nu[1], -nu[0]];
                    for (ri, &q) in rowset.iter().enumerate() {
                        let e = ci * nr + ri;
                        for j in 1..=2 {
                            let b = |a: usize, d1: usize, d2: usize| {
                                let pat = match (d1, d2) {
                                    (1, 1) => 0,
                                    (1, 2) | (2, 1) => 1,
                                    (2, 2) => 2,
                                    _ => unreachable!(),
                                };
                                kblk[(j - 1) * 6 + a * 3 + pat][e]
                            };
                            let mut gu = [[CZERO; 2]; 2];
                            for l in 0..2 {
                                gu[0][l] = -cpy * b(0, 1, l + 1) - csy * b(1, 2, l + 1);
                                gu[1][l] = -cpy * b(0, 2, l + 1) + csy * b(1, 1, l + 1);
                            }
                            let div = gu[0][0] + gu[1][1];
                            let dperp = gu[0][1] - gu[1][0];
                            for k in 0..2 {
                                let dn = gu[k][0] * nu[0] + gu[k][1] * nu[1];
                                let tk = (self.m.mu + self.w.mu_tilde) * dn + self.w.lambda_tilde * nu[k] * div
                                    - self.w.mu_tilde * tau[k] * dperp;
                                kmat[(2 * p + k) * n2 + 2 * q + j - 1] += wtrap * tk;
                            }
                        }
                    }
                }
            }
        }
        Ok((smat, kmat))
    }

    /// One collocation row of the model (singular) part of both operators:
    /// the free-space tensor of the row node's side over the full circle,
    /// integrated with the Kress log rule; cross-side columns are folded with
    /// the trapezoid subtraction of the same model so that the spectral pass
    /// can add the full kernel there.
    #[allow(clippy::type_complexity)]
    fn model_row(&self, q: usize, rw: &[f64]) -> Result<(Vec<[[Complex64; 2]; 2]>, Vec<[[Complex64; 2]; 2]>)> {
        let nb = self.nb;
        let side = self.bnodes[q].side;
        let xq = self.bnodes[q].x;
        let rho = self.m.rho(side);
        let wq = 2.0 * PI / nb as f64;
        let rad = self.radius;
        let circle = |t: f64| -> ([f64; 2], [f64; 2]) {
            let x = [rad * t.cos(), rad * t.sin()];
            (x, [t.cos(), t.sin()])
        };
        let mut srow = vec![[[CZERO; 2]; 2]; nb];
        let mut krow = vec![[[CZERO; 2]; 2]; nb];
        // Extrapolation to the diagonal limit of the smooth part on the
        // basis {1, δ·lnδ, δ} at δ, 2δ, 4δ.
        let d0 = 1e-3;
        let extr = diag_extrapolation_weights(d0);
        for p in 0..nb {
            let d = (q + nb - p) % nb;
            if p == q {
                // Diagonal limit of the log coefficient: the J-basis profile
                // has b, a', b' → 0 and a → −1/(2πμ) + (ks²−kp²)/(4πρω²), so
                // its value part is a multiple of the identity and its
                // traction part vanishes.
                let rw2 = rho * self.m.omega * self.m.omega;
                let (ksq, kpq) = (self.wn.ks(side).powi(2), self.wn.kp(side).powi(2));
                let a0 = -1.0 / (2.0 * PI * self.m.mu) + (ksq - kpq) / (4.0 * PI * rw2);
                let mut m1v = [[CZERO; 2]; 2];
                let m1t = [[CZERO; 2]; 2];
                for r in 0..2 {
                    m1v[r][r] = Complex64::new(0.5 * rad * a0, 0.0);
                }
                let mut m2v = [[CZERO; 2]; 2];
                let mut m2t = [[CZERO; 2]; 2];
                for (i, wext) in extr.iter().enumerate() {
                    let dd = d0 * (1 << i) as f64;
                    let (yd, nud) = circle(self.bnodes[q].t + dd);
                    let rd = dist2(xq, yd);
                    let ph = model_profile(&self.wn, self.m.mu, rho, self.m.omega, side, rd, false)?;
                    let pjd = model_profile(&self.wn, self.m.mu, rho, self.m.omega, side, rd, true)?;
                    let (hv, ht) = scaled_pair(&ph, rad, self.m.mu, &self.w, xq, yd, nud);
                    let (jv, jt) = scaled_pair(&pjd, 0.5 * rad, self.m.mu, &self.w, xq, yd, nud);
                    let lg = (4.0 * (0.5 * dd).sin().powi(2)).ln();
                    for r in 0..2 {
                        for c in 0..2 {
                            m2v[r][c] += wext * (hv[r][c] - jv[r][c] * lg);
                            m2t[r][c] += wext * (ht[r][c] - jt[r][c] * lg);
                        }
                    }
                }
                for r in 0..2 {
                    for c in 0..2 {
                        srow[p][r][c] = rw[0] * m1v[r][c] + wq * m2v[r][c];
                        krow[p][r][c] = rw[0] * m1t[r][c] + wq * m2t[r][c];
                    }
                }
                continue;
            }
            let yp = self.bnodes[p].x;
            let nup = self.bnodes[p].nu;
            let r = dist2(xq, yp);
            let pj = model_profile(&self.wn, self.m.mu, rho, self.m.omega, side, r, true)?;
            let (m1v, m1t) = scaled_pair(&pj, 0.5 * rad, self.m.mu, &self.w, xq, yp, nup);
            let delta = 2.0 * PI * d as f64 / nb as f64;
            let lg = (4.0 * (0.5 * delta).sin().powi(2)).ln();
            if self.bnodes[p].side == side {
                let ph = model_profile(&self.wn, self.m.mu, rho, self.m.omega, side, r, false)?;
                let (hv, ht) = scaled_pair(&ph, rad, self.m.mu, &self.w, xq, yp, nup);
                for rr in 0..2 {
                    for c in 0..2 {
                        srow[p][rr][c] = rw[d] * m1v[rr][c] + wq * (hv[rr][c] - m1v[rr][c] * lg);
                        krow[p][rr][c] = rw[d] * m1t[rr][c] + wq * (ht[rr][c] - m1t[rr][c] * lg);
                    }
                }
            } else {
                // Cross side: the spectral pass adds the full kernel with the
                // trapezoid weight, so only the model's log correction
                // remains here.
                let wcr = rw[d] - wq * lg;
                for rr in 0..2 {
                    for c in 0..2 {
                        srow[p][rr][c] = wcr * m1v[rr][c];
                        krow[p][rr][c] = wcr * m1t[rr][c];
                    }
                }
            }
        }
        Ok((srow, krow))
    }

    // -- volume matrix and coupling ------------------------------------------

    fn assemble_volume_matrix(&self, vw: &StressWeights) -> Result<BandMatrix> {
        let mesh = &self.mesh;
        let mut maxd = 0usize;
        for tri in &mesh.tris {
            for a in 0..6 {
                for b in 0..6 {
                    maxd = maxd.max(tri.n[a].abs_diff(tri.n[b]));
                }
            }
        }
        let kl = 2 * maxd + 1;
        let mut band = BandMatrix::zeros(2 * mesh.nodes.len(), kl, kl);
        let om2 = self.m.omega * self.m.omega;
        let sgn = [1.0, -1.0];
        let oth = [1usize, 0usize];
        for tri in &mesh.tris {
            let rho = self.m.rho(if tri.lower { HalfSpace::Minus } else { HalfSpace::Plus });
            let xs: Vec<[f64; 2]> = tri.n.iter().map(|&n| mesh.nodes[n]).collect();
            for (l, wq) in TRI7.iter() {
                let (nsh, dn) = p2_tri(*l);
                let mut jac = [[0.0; 2]; 2];
                for a in 0..6 {
                    for i in 0..2 {
                        for d in 0..2 {
                            jac[i][d] += xs[a][i] * dn[a][d];
                        }
                    }
                }
                let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
                if det <= 0.0 {
                    return Err(Error::InvalidInput(format!("degenerate mesh element (det {det:.3e})")));
                }
                let inv = [[jac[1][1] / det, -jac[0][1] / det], [-jac[1][0] / det, jac[0][0] / det]];
                let mut gp = [[0.0; 2]; 6];
                for a in 0..6 {
                    for i in 0..2 {
                        gp[a][i] = dn[a][0] * inv[0][i] + dn[a][1] * inv[1][i];
                    }
                }
                let wgt = 0.5 * det * wq;
                for a in 0..6 {
                    for al in 0..2 {
                        for b in 0..6 {
                            for be in 0..2 {
                                let mut v = vw.lambda_tilde * gp[b][be] * gp[a][al]
                                    - vw.mu_tilde * sgn[be] * sgn[al] * gp[b][oth[be]] * gp[a][oth[al]];
                                if al == be {
                                    v += (self.m.mu + vw.mu_tilde) * (gp[a][0] * gp[b][0] + gp[a][1] * gp[b][1]);
                                    v -= rho * om2 * nsh[a] * nsh[b];
                                }
                                band.add(2 * tri.n[a] + al, 2 * tri.n[b] + be, Complex64::new(v * wgt, 0.0))?;
                            }
                        }
                    }
                }
            }
        }
        Ok(band)
    }

    fn trace_eval(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![CZERO; 2 * self.nb];
        for (q, tr) in self.trace.iter().enumerate() {
            for i in 0..2 {
                let mut s = CZERO;
                for (node, wt) in tr.iter() {
                    s += *wt * v[2 * node + i];
                }
                out[2 * q + i] = s;
            }
        }
        out
    }

    /// out += sign · A₁₂ · p, where A₁₂ couples the volume rows to the
    /// boundary density through −∫_{∂B_R} p·φ̄.
    fn a12_add(&self, p: &[Complex64], sign: f64, out: &mut [Complex64]) {
        let wtrap = 2.0 * PI * self.radius / self.nb as f64;
        for (q, tr) in self.trace.iter().enumerate() {
            for i in 0..2 {
                let v = p[2 * q + i];
                for (node, wt) in tr.iter() {
                    out[2 * node + i] += sign * (-wtrap) * wt * v;
                }
            }
        }
    }

    /// A₂₁·v = ½ T v − K (T v) for a volume coefficient vector v.
    fn a21_apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let tv = self.trace_eval(v);
        let ktv = self.matvec(&self.kmat, &tv);
        tv.iter().zip(ktv.iter()).map(|(t, k)| 0.5 * t - k).collect()
    }

    fn assemble_schur(&self) -> Result<DenseLu> {
        let n2 = 2 * self.nb;
        let ndof = 2 * self.mesh.nodes.len();
        let mut sc = self.smat.clone();
        let chunk = 64;
        let mut rhs = vec![CZERO; ndof * chunk];
        for c0 in (0..n2).step_by(chunk) {
            let ck = chunk.min(n2 - c0);
            rhs[..ndof * ck].fill(CZERO);
            for c in 0..ck {
                let mut unit = vec![CZERO; n2];
                unit[c0 + c] = Complex64::new(1.0, 0.0);
                self.a12_add(&unit, 1.0, &mut rhs[c * ndof..(c + 1) * ndof]);
            }
            self.band.solve(&mut rhs[..ndof * ck], ck)?;
            // Trace of each solution column, then the boundary rows.
            let mut tx = vec![CZERO; n2 * ck];
            for c in 0..ck {
                let tv = self.trace_eval(&rhs[c * ndof..(c + 1) * ndof]);
                tx[c * n2..(c + 1) * n2].copy_from_slice(&tv);
            }
            let mut ktx = vec![CZERO; n2 * ck];
            gemm_nn_acc(n2, ck, n2, &self.kmat, &tx, &mut ktx);
            for c in 0..ck {
                for r in 0..n2 {
                    sc[(c0 + c) * n2 + r] -= 0.5 * tx[c * n2 + r] - ktx[c * n2 + r];
                }
            }
        }
        DenseLu::factor(sc, n2)
    }

    // -- reference fields -----------------------------------------------------

    /// u⁰ = G(·,z)a jets (value and gradient) at many points via the fixed
    /// spectral grid plus the closed-form free part on the source's side.
    /// Zero when the source sits below the line x₂ = 0.
    fn reference_jets(&self, src: &IncidentSource, pts: &[[f64; 2]]) -> Result<Vec<FieldJet>> {
        let zero = FieldJet { u: czvec(), grad: czmat(), dim: 2 };
        let mut out = vec![zero; pts.len()];
        if src.z[1] <= 0.0 {
            return Ok(out);
        }
        let specs = value_grad_specs();
        let a3 = [src.a[0], src.a[1], CZERO];
        for side in 0..2 {
            let idxs: Vec<usize> = (0..pts.len()).filter(|&i| sidx(HalfSpace::of(pts[i][1])) == side).collect();
            if idxs.is_empty() {
                continue;
            }
            let rpts: Vec<[f64; 2]> = idxs.iter().map(|&i| pts[i]).collect();
            let dmin = rpts.iter().map(|p| p[1].abs()).fold(f64::INFINITY, f64::min) + src.z[1];
            let osc = rpts.iter().map(|p| (p[0] - src.z[0]).abs()).fold(0.0f64, f64::max);
            let grid = build_xi_grid(&self.g, &self.integ, dmin, osc, self.tail_tol)?;
            let blk = spectral_blocks(&grid, &rpts, side, &[src.z], 0, true, &specs);
            let (cp, cs) = (self.wn.kp(hs(side)).powi(-2), self.wn.ks(hs(side)).powi(-2));
            for (ri, &pi) in idxs.iter().enumerate() {
                let v = |a: usize, j: usize, pat: usize| blk[a * 10 + (j - 1) * 5 + pat][ri];
                let jet = &mut out[pi];
                for j in 1..=2 {
                    let aj = src.a[j - 1];
                    jet.u[0] += (-cp * v(0, j, 0) - cs * v(1, j, 1)) * aj;
                    jet.u[1] += (-cp * v(0, j, 1) + cs * v(1, j, 0)) * aj;
                    // Hessian patterns: ∂₁grad ↦ {∂₁₁=2, ∂₁₂=3}, ∂₂grad ↦ {∂₁₂=3, ∂₂₂=4}.
                    let h = |a: usize, d1: usize, d2: usize| match (d1, d2) {
                        (1, 1) => v(a, j, 2),
                        (1, 2) | (2, 1) => v(a, j, 3),
                        (2, 2) => v(a, j, 4),
                        _ => unreachable!(),
                    };
                    for l in 0..2 {
                        jet.grad[0][l] += (-cp * h(0, 1, l + 1) - cs * h(1, 2, l + 1)) * aj;
                        jet.grad[1][l] += (-cp * h(0, 2, l + 1) + cs * h(1, 1, l + 1)) * aj;
                    }
                }
                if side == 0 {
                    let free = kupradze_jet(&self.m, HalfSpace::Plus, &pts[pi], &src.z, &a3)?;
                    for i in 0..2 {
                        jet.u[i] += free.u[i];
                        for l in 0..2 {
                            jet.grad[i][l] += free.grad[i][l];
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    // -- right-hand side and solve -------------------------------------------

    fn assemble_rhs(&self, src: &IncidentSource) -> Result<(Vec<Complex64>, Vec<Complex64>, Vec<Complex64>)> {
        let mesh = &self.mesh;
        let ndof = 2 * mesh.nodes.len();
        let mut l1 = vec![CZERO; ndof];
        // Volume term (ρ₋ − ρ₊)ω² ∫_{B_R∩D⁻} u^in·φ̄.
        let drho = (self.m.rho(HalfSpace::Minus) - self.m.rho(HalfSpace::Plus)) * self.m.omega * self.m.omega;
        if drho != 0.0 {
            for tri in mesh.tris.iter().filter(|t| t.lower) {
                let xs: Vec<[f64; 2]> = tri.n.iter().map(|&n| mesh.nodes[n]).collect();
                for (l, wq) in TRI7.iter() {
                    let (nsh, dn) = p2_tri(*l);
                    let mut jac = [[0.0; 2]; 2];
                    let mut xq = [0.0; 2];
                    for a in 0..6 {
                        for i in 0..2 {
                            xq[i] += nsh[a] * xs[a][i];
                            for d in 0..2 {
                                jac[i][d] += xs[a][i] * dn[a][d];
                            }
                        }
                    }
                    let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
                    let uin = src.jet(&self.m, xq)?;
                    let wgt = 0.5 * det * wq * drho;
                    for a in 0..6 {
                        for al in 0..2 {
                            l1[2 * tri.n[a] + al] += wgt * nsh[a] * uin.u[al];
                        }
                    }
                }
            }
        }
        // Boundary term ∫_{∂B_R} P_{μ̃,λ̃}(u⁰ − u^in)·φ̄ over the curved
        // boundary edges.
        struct EdgeQp {
            x: [f64; 2],
            nu: [f64; 2],
            ds: f64,
            edge: usize,
            nsh: [f64; 3],
        }
        let mut qps: Vec<EdgeQp> = Vec::with_capacity(4 * mesh.bedges.len());
        for (ei, e) in mesh.bedges.iter().enumerate() {
            let xs: Vec<[f64; 2]> = e.n.iter().map(|&n| mesh.nodes[n]).collect();
            for (zq, wq) in GL4_01_X.iter().zip(GL4_01_W.iter()) {
                let (nsh, dns) = p2_line(*zq);
                let mut x = [0.0; 2];
                let mut dx = [0.0; 2];
                for a in 0..3 {
                    for i in 0..2 {
                        x[i] += nsh[a] * xs[a][i];
                        dx[i] += dns[a] * xs[a][i];
                    }
                }
                let speed = (dx[0] * dx[0] + dx[1] * dx[1]).sqrt();
                let rn = (x[0] * x[0] + x[1] * x[1]).sqrt();
                qps.push(EdgeQp { x, nu: [x[0] / rn, x[1] / rn], ds: wq * speed, edge: ei, nsh });
            }
        }
        let pts: Vec<[f64; 2]> = qps.iter().map(|q| q.x).collect();
        let u0 = self.reference_jets(src, &pts)?;
        for (qp, u0j) in qps.iter().zip(u0.iter()) {
            let uin = src.jet(&self.m, qp.x)?;
            let mut diff = FieldJet { u: czvec(), grad: czmat(), dim: 2 };
            for i in 0..2 {
                diff.u[i] = u0j.u[i] - uin.u[i];
                for l in 0..2 {
                    diff.grad[i][l] = u0j.grad[i][l] - uin.grad[i][l];
                }
            }
            let frame = SurfaceFrame::new_2d(qp.nu)?;
            let tr = stress_direct(&diff, &frame, &self.w, self.m.mu);
            let e = &mesh.bedges[qp.edge];
            for a in 0..3 {
                for al in 0..2 {
                    l1[2 * e.n[a] + al] += qp.ds * qp.nsh[a] * tr[al];
                }
            }
        }
        // Boundary data g = u⁰ − u^in at the Nyström nodes and
        // L₂ = (½I − K)g.
        let bpts: Vec<[f64; 2]> = self.bnodes.iter().map(|b| b.x).collect();
        let u0b = self.reference_jets(src, &bpts)?;
        let mut gb = vec![CZERO; 2 * self.nb];
        for (q, u0j) in u0b.iter().enumerate() {
            let uin = src.jet(&self.m, self.bnodes[q].x)?;
            for i in 0..2 {
                gb[2 * q + i] = u0j.u[i] - uin.u[i];
            }
        }
        let kg = self.matvec(&self.kmat, &gb);
        let l2: Vec<Complex64> = gb.iter().zip(kg.iter()).map(|(g, k)| 0.5 * g - k).collect();
        Ok((l1, l2, gb))
    }

    /// Solve the scattering problem for one point source.
    pub fn solve(&self, src: &IncidentSource) -> Result<ScatterSolution> {
        src.validate(&self.profile)?;
        let rz = (src.z[0] * src.z[0] + src.z[1] * src.z[1]).sqrt();
        if rz >= 0.9 * self.radius {
            return Err(Error::InvalidInput(format!("source |z| = {rz:.3} must be < 0.9·R = {:.3}", 0.9 * self.radius)));
        }
        let (l1, l2, gb) = self.assemble_rhs(src)?;
        let ndof = l1.len();
        let n2 = 2 * self.nb;
        let mut y1 = l1.clone();
        self.band.solve(&mut y1, 1)?;
        let a21y = self.a21_apply(&y1);
        let mut r2: Vec<Complex64> = l2.iter().zip(a21y.iter()).map(|(l, a)| l - a).collect();
        self.schur.solve(&mut r2, 1)?;
        let p = r2;
        debug_assert_eq!(p.len(), n2);
        let mut rhs = l1;
        self.a12_add(&p, -1.0, &mut rhs);
        self.band.solve(&mut rhs, 1)?;
        let u_hat = rhs;
        debug_assert_eq!(u_hat.len(), ndof);
        let ub = self.trace_eval(&u_hat);
        let u_tilde_boundary: Vec<Complex64> = ub.iter().zip(gb.iter()).map(|(u, g)| u - g).collect();
        Ok(ScatterSolution { u_hat, p, u_tilde_boundary, reference_boundary: gb, source: src.clone() })
    }

    // -- field evaluation -----------------------------------------------------

    /// û at a point inside the ball (quadratic interpolation on the mesh).
    pub fn u_hat_at(&self, sol: &ScatterSolution, x: [f64; 2]) -> Result<[Complex64; 2]> {
        let rad = self.radius;
        if (x[0] * x[0] + x[1] * x[1]).sqrt() > rad * (1.0 + 1e-9) {
            return Err(Error::InvalidInput(format!("point {x:?} lies outside the ball of radius {rad}")));
        }
        // Undo the interface shear: x₂ = Y + f(x₁)·χ(Y) is monotone in Y.
        let f = self.profile.eval(x[0]);
        let ymid = {
            let (mut lo, mut hi) = (x[1] - f.abs() - 1e-12, x[1] + f.abs() + 1e-12);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if mid + f * shear_cutoff(rad, mid) < x[1] {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        // Invert the square-to-disk map.
        let (xn, yn) = (x[0] / rad, ymid / rad);
        let qx = (2.0 + xn * xn - yn * yn).max(0.0);
        let u = 0.5 * ((qx + 2.0 * std::f64::consts::SQRT_2 * xn).max(0.0).sqrt() - (qx - 2.0 * std::f64::consts::SQRT_2 * xn).max(0.0).sqrt());
        let qy = (2.0 + yn * yn - xn * xn).max(0.0);
        let v = 0.5 * ((qy + 2.0 * std::f64::consts::SQRT_2 * yn).max(0.0).sqrt() - (qy - 2.0 * std::f64::consts::SQRT_2 * yn).max(0.0).sqrt());
        let n = self.mesh.n_div as f64;
        let su = ((u.clamp(-1.0, 1.0) + 1.0) * 0.5 * n).clamp(0.0, n - 1e-12);
        let sv = ((v.clamp(-1.0, 1.0) + 1.0) * 0.5 * n).clamp(0.0, n - 1e-12);
        let (a, b) = (su.floor() as usize, sv.floor() as usize);
        let (s, t) = (su - a as f64, sv - b as f64);
        let cell = 2 * (b * self.mesh.n_div + a);
        let (tri, l1, l2) = if t <= s {
            (&self.mesh.tris[cell], s - t, t)
        } else {
            (&self.mesh.tris[cell + 1], s, t - s)
        };
        let (nsh, _) = p2_tri([1.0 - l1 - l2, l1, l2]);
        let mut out = [CZERO; 2];
        for a in 0..6 {
            for i in 0..2 {
                out[i] += nsh[a] * sol.u_hat[2 * tri.n[a] + i];
            }
        }
        Ok(out)
    }

    /// The total displacement û + u^in at a point inside the ball.
    pub fn total_field(&self, sol: &ScatterSolution, x: [f64; 2]) -> Result<[Complex64; 2]> {
        let uh = self.u_hat_at(sol, x)?;
        let uin = sol.source.jet(&self.m, x)?;
        Ok([uh[0] + uin.u[0], uh[1] + uin.u[1]])
    }

    /// Evaluate ũ outside the ball from the boundary representation, and the
    /// total field ũ + u⁰ there.
    pub fn reconstruct_exterior(&self, sol: &ScatterSolution, x: [f64; 2]) -> Result<([Complex64; 2], [Complex64; 2])> {
        let rx = (x[0] * x[0] + x[1] * x[1]).sqrt();
        if rx <= self.radius {
            return Err(Error::InvalidInput(format!("exterior evaluation needs |x| > R, got |x| = {rx}")));
        }
        let sx = sidx(HalfSpace::of(x[1]));
        let wtrap = 2.0 * PI * self.radius / self.nb as f64;
        let sspecs = grad_specs();
        let kspecs = hess_specs();
        let mut ut = [CZERO; 2];
        for cside in 0..2 {
            let cols: Vec<usize> = (0..self.nb).filter(|&p| sidx(self.bnodes[p].side) == cside).collect();
            if cols.is_empty() {
                continue;
            }
            let cpts: Vec<[f64; 2]> = cols.iter().map(|&p| self.bnodes[p].x).collect();
            let dmin = x[1].abs() + cpts.iter().map(|p| p[1].abs()).fold(f64::INFINITY, f64::min);
            let osc = cpts.iter().map(|p| (p[0] - x[0]).abs()).fold(0.0f64, f64::max);
            let grid = build_xi_grid(&self.g, &self.integ, dmin, osc, self.tail_tol)?;
            let rpts = [x];
            let sblk = spectral_blocks(&grid, &rpts, sx, &cpts, cside, true, &sspecs);
            let kblk = spectral_blocks(&grid, &rpts, sx, &cpts, cside, false, &kspecs);
            let (cp, cs) = (self.wn.kp(hs(sx)).powi(-2), self.wn.ks(hs(sx)).powi(-2));
            let (cpy, csy) = (self.wn.kp(hs(cside)).powi(-2), self.wn.ks(hs(cside)).powi(-2));
            for (ci, &p) in cols.iter().enumerate() {
                let mut gmat = [[CZERO; 2]; 2];
                for k in 1..=2 {
                    let b = |a: usize, d: usize| sblk[(k - 1) * 4 + a * 2 + (d - 1)][ci];
                    gmat[0][k - 1] = -cp * b(0, 1) - cs * b(1, 2);
                    gmat[1][k - 1] = -cp * b(0, 2) + cs * b(1, 1);
                }
                let nu = self.bnodes[p].nu;
                let tau = [nu[1], -nu[0]];
                let mut pim = [[CZERO; 2]; 2];
                for j in 1..=2 {
                    let b = |a: usize, d1: usize, d2: usize| {
                        let pat = match (d1, d2) {
                            (1, 1) => 0,
                            (1, 2) | (2, 1) => 1,
                            (2, 2) => 2,
                            _ => unreachable!(),
                        };
                        kblk[(j - 1) * 6 + a * 3 + pat][ci]
                    };
                    let mut gu = [[CZERO; 2]; 2];
                    for l in 0..2 {
                        gu[0][l] = -cpy * b(0, 1, l + 1) - csy * b(1, 2, l + 1);
                        gu[1][l] = -cpy * b(0, 2, l + 1) + csy * b(1, 1, l + 1);
                    }
                    let div = gu[0][0] + gu[1][1];
                    let dperp = gu[0][1] - gu[1][0];
                    for k in 0..2 {
                        let dn = gu[k][0] * nu[0] + gu[k][1] * nu[1];
                        pim[j - 1][k] = (self.m.mu + self.w.mu_tilde) * dn + self.w.lambda_tilde * nu[k] * div
                            - self.w.mu_tilde * tau[k] * dperp;
                    }
                }
                if cside == sx {
                    let side = hs(sx);
                    let pt = kupradze_tensor(&self.m, side, &x, &self.bnodes[p].x)?;
                    for j in 0..2 {
                        for k in 0..2 {
                            gmat[j][k] += pt[j][k];
                        }
                    }
                    let frame = SurfaceFrame::new_2d(nu)?;
                    for j in 0..2 {
                        let mut ej: CVec = czvec();
                        ej[j] = Complex64::new(1.0, 0.0);
                        let jet = kupradze_jet(&self.m, side, &self.bnodes[p].x, &x, &ej)?;
                        let tr = stress_direct(&jet, &frame, &self.w, self.m.mu);
                        for k in 0..2 {
                            pim[j][k] += tr[k];
                        }
                    }
                }
                for j in 0..2 {
                    for k in 0..2 {
                        ut[j] += wtrap
                            * (pim[j][k] * sol.u_tilde_boundary[2 * p + k] - gmat[j][k] * sol.p[2 * p + k]);
                    }
                }
            }
        }
        let src = &sol.source;
        let u0 = self.reference_jets(src, &[x])?;
        Ok((ut, [ut[0] + u0[0].u[0], ut[1] + u0[0].u[1]]))
    }
}

/// Weights extrapolating a function with expansion a + b·δlnδ + c·δ from its
/// values at δ, 2δ, 4δ to δ = 0.
fn diag_extrapolation_weights(d0: f64) -> [f64; 3] {
    let phi = |d: f64| [1.0, d * d.ln(), d];
    let rows = [phi(d0), phi(2.0 * d0), phi(4.0 * d0)];
    // First row of the inverse of the 3×3 Vandermonde-type matrix with rows
    // [1, δᵢlnδᵢ, δᵢ]: solve Mᵀw = e₁.
    let m = rows;
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    [
        (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det,
        -(m[0][1] * m[2][2] - m[0][2] * m[2][1]) / det,
        (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det,
    ]
}

fn dist2(x: [f64; 2], y: [f64; 2]) -> f64 {
    ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt()
}

fn scaled_pair(
    p: &Prof,
    scale: f64,
    mu: f64,
    w: &StressWeights,
    x: [f64; 2],
    y: [f64; 2],
    nu_y: [f64; 2],
) -> ([[Complex64; 2]; 2], [[Complex64; 2]; 2]) {
    let (mut v, mut t) = model_pair(p, mu, w, x, y, nu_y);
    for r in 0..2 {
        for c in 0..2 {
            v[r][c] *= scale;
            t[r][c] *= scale;
        }
    }
    (v, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(super) fn test_medium() -> ElasticMedium {
        ElasticMedium::new(1.1, 1.3, 1.0, 1.7, 1.9, 2).unwrap()
    }

    pub(super) fn equal_density_medium() -> ElasticMedium {
        ElasticMedium::new(1.1, 1.3, 1.4, 1.4, 1.9, 2).unwrap()
    }

    pub(super) fn small_solver(m: ElasticMedium, profile: SurfaceProfile, radius: f64, nb: usize, nc: usize) -> TransmissionSolver {
        let cfg = SolverConfig { mesh_divisions: Some(nc), ..SolverConfig::default() };
        TransmissionSolver::new(m, profile, radius, nb, &cfg).unwrap()
    }

    #[test]
    fn kress_weights_integrate_log_fourier_modes() {
        // ∫₀^{2π} ln(4 sin²((t−s)/2)) cos(m s) ds = −(2π/m) cos(m t); the rule
        // is exact on these modes up to m = N/2 − 1 by construction.
        let nb = 32;
        let rw = kress_log_weights(nb);
        for q in [0usize, 5, 19] {
            let tq = 2.0 * PI * (q as f64 + 0.5) / nb as f64;
            for m in 1..=4usize {
                let mut s = 0.0;
                for p in 0..nb {
                    let tp = 2.0 * PI * (p as f64 + 0.5) / nb as f64;
                    s += rw[(q + nb - p) % nb] * (m as f64 * tp).cos();
                }
                let exact = -2.0 * PI / m as f64 * (m as f64 * tq).cos();
                assert!((s - exact).abs() < 1e-12, "mode {m} at node {q}: {s} vs {exact}");
            }
            // Constant mode: ∫ ln(4sin²(Δ/2)) ds = 0.
            let s0: f64 = (0..nb).map(|p| rw[(q + nb - p) % nb]).sum();
            assert!(s0.abs() < 1e-12, "constant mode: {s0}");
        }
    }

    #[test]
    fn diag_extrapolation_exact_on_basis() {
        let d0 = 1e-3;
        let w = diag_extrapolation_weights(d0);
        // Exact on f(δ) = a + b·δlnδ + c·δ.
        let f = |d: f64| 3.0 + 2.0 * d * d.ln() - 1.4 * d;
        let v = w[0] * f(d0) + w[1] * f(2.0 * d0) + w[2] * f(4.0 * d0);
        assert!((v - 3.0).abs() < 1e-10, "extrapolated {v}");
    }

    #[test]
    fn profile_eval_and_validation() {
        let b = SurfaceProfile::bump(0.4, 1.5).unwrap();
        assert_eq!(b.eval(2.0), 0.0);
        assert!((b.eval(0.0) - 0.4).abs() < 1e-15);
        assert!(b.eval(0.7) > 0.0 && b.eval(0.7) < 0.4);
        assert!(!b.is_flat());
        assert!(b.lipschitz_bound > 0.0);
        assert!(SurfaceProfile::flat().is_flat());

        let s = SurfaceProfile::from_samples(vec![-1.0, 0.0, 1.0], vec![0.0, 0.3, 0.0]).unwrap();
        assert!((s.eval(-0.5) - 0.15).abs() < 1e-15);
        assert_eq!(s.eval(1.5), 0.0);
        assert!((s.lipschitz_bound - 0.3).abs() < 1e-15);
        assert!(SurfaceProfile::from_samples(vec![0.0, 1.0], vec![0.1, 0.0]).is_err());
        assert!(SurfaceProfile::from_samples(vec![0.0, 0.0], vec![0.0, 0.0]).is_err());
        assert!(SurfaceProfile::bump(f64::NAN, 1.0).is_err());

        // Serde round trip.
        let js = serde_json::to_string(&b).unwrap();
        let b2: SurfaceProfile = serde_json::from_str(&js).unwrap();
        assert!((b2.eval(0.3) - b.eval(0.3)).abs() < 1e-15);

        let src = IncidentSource { z: [0.0, 0.1], a: [Complex64::new(1.0, 0.0), CZERO] };
        assert!(src.validate(&b).is_err()); // below the bump
        let src2 = IncidentSource { z: [0.0, 1.0], a: [CZERO, CZERO] };
        assert!(src2.validate(&b).is_err()); // zero polarization
        let src3 = IncidentSource { z: [3.0, 0.05], a: [Complex64::new(1.0, 0.0), CZERO] };
        assert!(src3.validate(&b).is_ok()); // above the flat part
    }

    #[test]
    fn mesh_geometry_invariants() {
        let radius = 4.0;
        let profile = SurfaceProfile::bump(0.5, 1.5).unwrap();
        let mesh = Mesh::build(radius, &profile, 12).unwrap();
        // Boundary nodes sit exactly on the circle.
        for e in &mesh.bedges {
            for &n in e.n.iter() {
                let r = (mesh.nodes[n][0].powi(2) + mesh.nodes[n][1].powi(2)).sqrt();
                assert!((r - radius).abs() < 1e-12, "boundary node off circle by {}", (r - radius).abs());
            }
            // Unwrapped angles strictly increase along the edge.
            assert!(e.th[0] < e.th[1] && e.th[1] < e.th[2]);
        }
        // The middle grid line sits exactly on the interface.
        let nn = 2 * mesh.n_div + 1;
        for i in 0..nn {
            let node = mesh.nodes[mesh.n_div * nn + i];
            assert!((node[1] - profile.eval(node[0])).abs() < 1e-12);
        }
        // Positive Jacobian at every quadrature point of every element.
        for tri in &mesh.tris {
            let xs: Vec<[f64; 2]> = tri.n.iter().map(|&n| mesh.nodes[n]).collect();
            for (l, _) in TRI7.iter() {
                let (_, dn) = p2_tri(*l);
                let mut jac = [[0.0; 2]; 2];
                for a in 0..6 {
                    for i in 0..2 {
                        for d in 0..2 {
                            jac[i][d] += xs[a][i] * dn[a][d];
                        }
                    }
                }
                let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
                assert!(det > 0.0, "non-positive Jacobian {det}");
            }
        }
        // Angle inversion round trip.
        for t in [0.013, 1.1, PI - 0.02, PI + 0.4, 2.0 * PI - 0.05] {
            let (ei, zeta) = mesh.boundary_coord(t);
            let th = &mesh.bedges[ei].th;
            let (nsh, _) = p2_line(zeta);
            let tl = nsh[0] * th[0] + nsh[1] * th[1] + nsh[2] * th[2];
            let diff = (tl - t).rem_euclid(2.0 * PI);
            assert!(diff.min(2.0 * PI - diff) < 1e-10, "angle {t}: got {tl}");
        }
    }

    #[test]
    fn interpolation_reproduces_mesh_geometry() {
        // Interpolating the nodal coordinate field through the point locator
        // must return (approximately) the query point itself.
        let solver = small_solver(test_medium(), SurfaceProfile::bump(0.3, 1.2).unwrap(), 4.0, 32, 10);
        let mut sol = ScatterSolution {
            u_hat: vec![CZERO; 2 * solver.mesh.nodes.len()],
            p: vec![CZERO; 2 * solver.nb],
            u_tilde_boundary: vec![CZERO; 2 * solver.nb],
            reference_boundary: vec![CZERO; 2 * solver.nb],
            source: IncidentSource { z: [0.0, 1.0], a: [Complex64::new(1.0, 0.0), CZERO] },
        };
        for (n, xy) in solver.mesh.nodes.iter().enumerate() {
            sol.u_hat[2 * n] = Complex64::new(xy[0], 0.0);
            sol.u_hat[2 * n + 1] = Complex64::new(xy[1], 0.0);
        }
        for x in [[0.31, 0.44], [-1.7, 0.2], [0.9, -2.3], [0.0, 0.29], [2.5, 2.1], [-0.4, 0.05]] {
            let v = solver.u_hat_at(&sol, x).unwrap();
            let err = (v[0].re - x[0]).abs().max(v[1].re - x[1]).abs();
            assert!(err < 5e-3, "geometry interpolation at {x:?}: error {err}");
        }
    }

    /// Oracle for one off-diagonal Nyström entry pair: the scheme must equal
    /// R_d·M1 + w_trap·(R·G − M1·ln(4sin²(Δ/2))) with G evaluated by the
    /// adaptive spectral integrator.
    #[test]
    fn operator_entries_match_adaptive_kernel() {
        let m = test_medium();
        let radius = 3.0;
        let nb = 32;
        let solver = small_solver(m.clone(), SurfaceProfile::flat(), radius, nb, 8);
        let rw = kress_log_weights(nb);
        let wq = 2.0 * PI / nb as f64;
        let n2 = 2 * nb;
        // (q, p): same-side near, same-side far, cross-side, near-interface.
        for (q, p) in [(3usize, 5usize), (2, 11), (4, 20), (15, 17), (0, 31)] {
            let xq = solver.bnodes[q].x;
            let yp = solver.bnodes[p].x;
            let nup = solver.bnodes[p].nu;
            let side = solver.bnodes[q].side;
            let rho = m.rho(side);
            let r = dist2(xq, yp);
            let d = (q + nb - p) % nb;
            let delta = 2.0 * PI * d as f64 / nb as f64;
            let lg = (4.0 * (0.5 * delta).sin().powi(2)).ln();
            let pj = model_profile(&solver.wn, m.mu, rho, m.omega, side, r, true).unwrap();
            let (m1v, m1t) = scaled_pair(&pj, 0.5 * radius, m.mu, &solver.w, xq, yp, nup);
            // Single layer: kernel G(x_q, y_p).
            let gm = solver.g.assemble(xq, yp).unwrap();
            for i in 0..2 {
                for k in 0..2 {
                    let oracle = rw[d] * m1v[i][k] + wq * (radius * gm.entries[i][k] - m1v[i][k] * lg);
                    let got = solver.smat[(2 * p + k) * n2 + 2 * q + i];
                    assert!(
                        (got - oracle).norm() < 2e-6,
                        "S entry q={q} p={p} ({i},{k}): {got} vs {oracle}"
                    );
                }
            }
            // Double layer: kernel [P^{(y)} G(y_p, x_q)]_{kj}.
            let frame = SurfaceFrame::new_2d(nup).unwrap();
            for j in 0..2 {
                let jet = solver.g.column_jet(j + 1, yp, xq).unwrap();
                let tr = stress_direct(&jet, &frame, &solver.w, m.mu);
                for k in 0..2 {
                    let oracle = rw[d] * m1t[j][k] + wq * (radius * tr[k] - m1t[j][k] * lg);
                    let got = solver.kmat[(2 * p + k) * n2 + 2 * q + j];
                    assert!(
                        (got - oracle).norm() < 2e-6,
                        "K entry q={q} p={p} ({j},{k}): {got} vs {oracle}"
                    );
                }
            }
        }
    }

    /// Interior jump relation on ∂B_R: for the radiating field w = G(·,y₀)c
    /// with y₀ inside the ball, (½I − K)w + S(Pw) = 0; the Nyström residual
    /// must be small and shrink under node refinement.
    #[test]
    fn jump_relation_for_radiating_field() {
        let m = test_medium();
        let radius = 3.0;
        let y0 = [0.3, 0.8];
        let c = [Complex64::new(0.8, 0.2), Complex64::new(-0.3, 0.55)];
        let mut resid = Vec::new();
        for nb in [48usize, 96] {
            let solver = small_solver(m.clone(), SurfaceProfile::flat(), radius, nb, 8);
            let mut w = vec![CZERO; 2 * nb];
            let mut pw = vec![CZERO; 2 * nb];
            for q in 0..nb {
                let x = solver.bnodes[q].x;
                let gm = solver.g.assemble(x, y0).unwrap();
                for i in 0..2 {
                    w[2 * q + i] = gm.entries[i][0] * c[0] + gm.entries[i][1] * c[1];
                }
                let frame = SurfaceFrame::new_2d(solver.bnodes[q].nu).unwrap();
                let mut jet = FieldJet { u: czvec(), grad: czmat(), dim: 2 };
                for j in 0..2 {
                    let cj = solver.g.column_jet(j + 1, x, y0).unwrap();
                    for i in 0..2 {
                        jet.u[i] += cj.u[i] * c[j];
                        for l in 0..2 {
                            jet.grad[i][l] += cj.grad[i][l] * c[j];
                        }
                    }
                }
                let tr = stress_direct(&jet, &frame, &solver.w, m.mu);
                pw[2 * q] = tr[0];
                pw[2 * q + 1] = tr[1];
            }
            let kw = solver.apply_double_layer(&w);
            let spw = solver.apply_single_layer(&pw);
            let wmax = w.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
            let r = (0..2 * nb)
                .map(|i| (0.5 * w[i] - kw[i] + spw[i]).norm())
                .fold(0.0f64, f64::max);
            resid.push(r / wmax);
        }
        assert!(resid[0] < 2e-3, "jump residual at 48 nodes: {}", resid[0]);
        assert!(resid[1] < resid[0] / 3.0, "no refinement gain: {:?}", resid);
    }
}


#[cfg(test)]
mod reconstruct_tests {
    use super::tests::{small_solver, test_medium};
    use super::*;

    /// Feeding the boundary representation the trace and traction of the
    /// known radiating field w = G(·,y₀)c must reproduce w outside the ball.
    #[test]
    fn representation_reproduces_radiating_field() {
        let m = test_medium();
        let radius = 3.0;
        let solver = small_solver(m.clone(), SurfaceProfile::flat(), radius, 96, 8);
        let y0 = [0.3, 0.8];
        let c = [Complex64::new(0.8, 0.2), Complex64::new(-0.3, 0.55)];
        let nb = solver.nb;
        let mut sol = ScatterSolution {
            u_hat: vec![CZERO; 2 * solver.mesh.nodes.len()],
            p: vec![CZERO; 2 * nb],
            u_tilde_boundary: vec![CZERO; 2 * nb],
            reference_boundary: vec![CZERO; 2 * nb],
            source: IncidentSource { z: [0.0, -1.0], a: [Complex64::new(1.0, 0.0), CZERO] },
        };
        for q in 0..nb {
            let x = solver.bnodes[q].x;
            let gm = solver.g.assemble(x, y0).unwrap();
            for i in 0..2 {
                sol.u_tilde_boundary[2 * q + i] = gm.entries[i][0] * c[0] + gm.entries[i][1] * c[1];
            }
            let frame = SurfaceFrame::new_2d(solver.bnodes[q].nu).unwrap();
            let mut jet = FieldJet { u: czvec(), grad: czmat(), dim: 2 };
            for j in 0..2 {
                let cj = solver.g.column_jet(j + 1, x, y0).unwrap();
                for i in 0..2 {
                    jet.u[i] += cj.u[i] * c[j];
                    for l in 0..2 {
                        jet.grad[i][l] += cj.grad[i][l] * c[j];
                    }
                }
            }
            let tr = stress_direct(&jet, &frame, &solver.w, m.mu);
            sol.p[2 * q] = tr[0];
            sol.p[2 * q + 1] = tr[1];
        }
        for x in [[4.1, 1.4], [-2.6, 3.0], [0.4, -4.2], [5.5, -0.6]] {
            let (ut, _) = solver.reconstruct_exterior(&sol, x).unwrap();
            let gm = solver.g.assemble(x, y0).unwrap();
            let mut emax = 0.0f64;
            let mut smax = 0.0f64;
            for i in 0..2 {
                let exact = gm.entries[i][0] * c[0] + gm.entries[i][1] * c[1];
                emax = emax.max((ut[i] - exact).norm());
                smax = smax.max(exact.norm());
            }
            assert!(emax < 1e-3 * smax, "representation at {x:?}: {emax:.3e} vs {smax:.3e}");
        }
    }
}

#[cfg(test)]
mod convergence_diag {
    use super::tests::{small_solver, test_medium};
    use super::*;

    #[test]
    #[ignore]
    fn flat_error_sweep() {
        let m = test_medium();
        let src = IncidentSource { z: [0.5, 1.2], a: [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.3)] };
        let probes = [[0.8, 1.7], [-1.2, 0.6], [0.4, -1.1], [-0.3, -2.2], [2.0, 0.3], [0.1, 3.1]];
        for (nb, nc) in [(64usize, 10usize), (64, 20), (64, 28), (128, 20), (128, 28), (128, 40), (64, 40), (192, 40)] {
            let t0 = std::time::Instant::now();
            let solver = small_solver(m.clone(), SurfaceProfile::flat(), 6.0, nb, nc);
            let sol = solver.solve(&src).unwrap();
            let mut emax = 0.0f64;
            let mut smax = 0.0f64;
            for x in probes {
                let got = solver.u_hat_at(&sol, x).unwrap();
                let gm = solver.g.assemble(x, src.z).unwrap();
                let pi = kupradze_tensor(&m, HalfSpace::Plus, &x, &src.z).unwrap();
                for i in 0..2 {
                    let exact = (gm.entries[i][0] - pi[i][0]) * src.a[0] + (gm.entries[i][1] - pi[i][1]) * src.a[1];
                    emax = emax.max((got[i] - exact).norm());
                    smax = smax.max(exact.norm());
                }
            }
            let pmax = sol.p.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
            let utmax = sol.u_tilde_boundary.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
            let gmax = sol.reference_boundary.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
            println!(
                "nb={nb:4} nc={nc:3}  rel_err={:.3e}  ut/g={:.3e}  p/g={:.3e}  [{:.1?}]",
                emax / smax,
                utmax / gmax,
                pmax / gmax,
                t0.elapsed()
            );
        }
    }
}

#[cfg(test)]
mod exterior_diag {
    use super::tests::{small_solver, test_medium};
    use super::*;

    #[test]
    #[ignore]
    fn boundary_field_breakdown() {
        let m = test_medium();
        let profile = SurfaceProfile::bump(0.3, 1.2).unwrap();
        let solver = small_solver(m.clone(), profile, 4.5, 96, 28);
        let src = IncidentSource { z: [0.4, 1.1], a: [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.5)] };
        let sol = solver.solve(&src).unwrap();
        let th = -1.8f64;
        let dir = [th.cos(), th.sin()];
        let rad = 4.5;
        for s in [0.97, 0.999, 1.001, 1.03] {
            let x = [s * rad * dir[0], s * rad * dir[1]];
            if s < 1.0 {
                let uh = solver.u_hat_at(&sol, x).unwrap();
                let uin = src.jet(&m, x).unwrap();
                let u0 = solver.reference_jets(&src, &[x]).unwrap();
                let g = [u0[0].u[0] - uin.u[0], u0[0].u[1] - uin.u[1]];
                println!("s={s}: û = [{:.5} {:.5}]", uh[0], uh[1]);
                println!("       ũ=û−g = [{:.5} {:.5}]", uh[0] - g[0], uh[1] - g[1]);
                println!("       total = [{:.5} {:.5}]", uh[0] + uin.u[0], uh[1] + uin.u[1]);
            } else {
                let (ut, tot) = solver.reconstruct_exterior(&sol, x).unwrap();
                let u0 = solver.reference_jets(&src, &[x]).unwrap();
                println!("s={s}: ũ_rep = [{:.5} {:.5}]", ut[0], ut[1]);
                println!("       u0 = [{:.5} {:.5}]", u0[0].u[0], u0[0].u[1]);
                println!("       total = [{:.5} {:.5}]", tot[0], tot[1]);
            }
        }
        // Nearest Nyström node to θ=0.6 and its stored boundary data.
        let q = (0..solver.nb).min_by(|&a, &b| {
            let da = (solver.bnodes[a].t - th).abs();
            let db = (solver.bnodes[b].t - th).abs();
            da.partial_cmp(&db).unwrap()
        }).unwrap();
        println!("node q={q} t={:.4}: ũ_b = [{:.5} {:.5}]  g = [{:.5} {:.5}]  p = [{:.5} {:.5}]",
            solver.bnodes[q].t,
            sol.u_tilde_boundary[2*q], sol.u_tilde_boundary[2*q+1],
            sol.reference_boundary[2*q], sol.reference_boundary[2*q+1],
            sol.p[2*q], sol.p[2*q+1]);
    }
}
