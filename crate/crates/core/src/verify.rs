//! Self-check suites: randomized and deterministic batches of property checks
//! that pit each part of the library against an independent reference — exact
//! identities, finite differences, brute-force quadrature, or closed forms.
//!
//! Each suite returns a list of [`CheckReport`]s; a suite passes when every
//! check passes.  All randomness is drawn from a caller-provided seed, so a
//! given seed reproduces the exact same checks (and output bytes).

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

use crate::bie2d::{IncidentSource, SolverConfig, SurfaceProfile, TransmissionSolver};
use crate::elastic_fields::{
    czmat, czvec, kupradze_jet, kupradze_tensor, radiation_probe_energy, radiation_probe_pair,
    stress_direct, stress_identity, FieldJet, SurfaceFrame, CZERO,
};
use crate::green2d::Green2d;
use crate::green3d::{Coeff3DKey, CompTag, Family, Green3d, Harmonic, Monomial, Potential3d, Transcription};
use crate::medium::{ElasticMedium, HalfSpace, StressWeights, WaveType};
use crate::quadrature::{QuadConfig, SpectralIntegrator};
use crate::specfun::{bessel_j, hankel1};
use crate::{Error, Result};

/// Outcome of one named check inside a suite.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub max_error: f64,
    pub pass: bool,
}

impl CheckReport {
    fn new(check: &str, max_error: f64, tol: f64) -> Self {
        CheckReport { check: check.to_string(), max_error, pass: max_error < tol }
    }
}

/// Suite names in the order `verify --all` runs them: algebraic identities
/// first, then spectral/quadrature checks, then the assembled tensors, and
/// finally the scattering solver.
pub const SUITE_ORDER: &[&str] = &[
    "stress-identity",
    "spectral-residual",
    "sommerfeld",
    "angular",
    "degenerate",
    "pde-2d",
    "pde-3d",
    "farfield",
    "radiation",
    "solver-flat",
    "solver-rough",
];

/// Shared options of every suite.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Seed of the ChaCha8 stream driving all random draws.
    pub seed: u64,
    /// Probe radii of the radiation suite (ascending).
    pub radii: Vec<f64>,
    /// Quadrature configuration for the spectral evaluations.
    pub quad: QuadConfig,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: 0, radii: vec![25.0, 50.0, 100.0, 200.0, 400.0], quad: QuadConfig::default() }
    }
}

/// Run one named suite.
pub fn run_suite(name: &str, opt: &VerifyOptions) -> Result<Vec<CheckReport>> {
    match name {
        "stress-identity" => stress_identity_suite(opt),
        "spectral-residual" => spectral_residual_suite(opt),
        "sommerfeld" => sommerfeld_suite(opt),
        "angular" => angular_suite(opt),
        "degenerate" => degenerate_suite(opt),
        "pde-2d" => pde_2d_suite(opt),
        "pde-3d" => pde_3d_suite(opt),
        "farfield" => farfield_suite(opt),
        "radiation" => radiation_suite(opt),
        "solver-flat" => solver_flat_suite(opt),
        "solver-rough" => solver_rough_suite(opt),
        other => Err(Error::InvalidInput(format!(
            "unknown verify suite '{other}'; available: {}",
            SUITE_ORDER.join(", ")
        ))),
    }
}

fn medium(dim: usize) -> ElasticMedium {
    ElasticMedium::new(1.1, 1.3, 1.0, 1.7, 1.9, dim).expect("reference medium")
}

fn quad(opt: &VerifyOptions, tol: f64) -> QuadConfig {
    QuadConfig { tol, ..opt.quad.clone() }
}

fn rand_c(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn rand_jet(rng: &mut ChaCha8Rng, dim: usize) -> FieldJet {
    let mut jet = FieldJet { u: czvec(), grad: czmat(), dim };
    for i in 0..dim {
        jet.u[i] = rand_c(rng);
        for j in 0..dim {
            jet.grad[i][j] = rand_c(rng);
        }
    }
    jet
}

fn rand_frame(rng: &mut ChaCha8Rng, dim: usize) -> SurfaceFrame {
    loop {
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let ok = if dim == 2 { SurfaceFrame::new_2d([v[0], v[1]]) } else { SurfaceFrame::new_3d(v) };
        if let Ok(f) = ok {
            if f.nu.iter().map(|t| t * t).sum::<f64>() > 0.01 {
                return f;
            }
        }
    }
}

// -- algebraic identities -----------------------------------------------------

/// Generalized stress vector: direct definition vs the divergence/curl
/// identity, on random jets, frames, and admissible weight pairs.
fn stress_identity_suite(opt: &VerifyOptions) -> Result<Vec<CheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opt.seed ^ 0x5153);
    let mut out = Vec::new();
    for dim in [2usize, 3] {
        let m = medium(dim);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let jet = rand_jet(&mut rng, dim);
            let frame = rand_frame(&mut rng, dim);
            let w = match rng.gen_range(0..3) {
                0 => StressWeights::physical(&m),
                1 => StressWeights::pseudo(&m),
                _ => StressWeights::with_mu_tilde(&m, rng.gen_range(-2.0..2.0)),
            };
            let a = stress_direct(&jet, &frame, &w, m.mu);
            let b = stress_identity(&jet, &frame, &w, &m);
            for i in 0..dim {
                worst = worst.max((a[i] - b[i]).norm());
            }
        }
        out.push(CheckReport::new(&format!("stress-identity-{dim}d"), worst, 1e-13));
    }
    Ok(out)
}

/// Closed-form interface coefficients substituted back into the transformed
/// jump systems, at random real spectral points and source heights.
fn spectral_residual_suite(opt: &VerifyOptions) -> Result<Vec<CheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opt.seed ^ 0x5250);
    let mut out = Vec::new();

    let g2 = Green2d::new(medium(2), quad(opt, 1e-10))?;
    let bps: Vec<f64> = g2.wavenumbers().branch_points();
    let mut worst: f64 = 0.0;
    let mut n = 0usize;
    while n < 1000 {
        let xi = Complex64::new(rng.gen_range(-8.0..8.0), 0.0);
        if bps.iter().any(|k| (xi.re.abs() - k).abs() < 1e-3) {
            continue;
        }
        let y2 = *[rng.gen_range(0.2..2.0), -rng.gen_range(0.2..2.0)].choose(&mut rng).unwrap();
        worst = worst.max(g2.jump_system_residual(xi, y2)?);
        n += 1;
    }
    out.push(CheckReport::new("jump-system-residual-2d", worst, 1e-12));

    let g3 = Green3d::new(medium(3), quad(opt, 1e-10))?;
    let mut worst: f64 = 0.0;
    let mut n = 0usize;
    while n < 1000 {
        let z: [f64; 2] = [rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0)];
        let r = (z[0] * z[0] + z[1] * z[1]).sqrt();
        if bps.iter().any(|k| (r - k).abs() < 1e-3) {
            continue;
        }
        let y = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            *[rng.gen_range(0.2..2.0), -rng.gen_range(0.2..2.0)].choose(&mut rng).unwrap(),
        ];
        worst = worst.max(g3.interface_residual(z, y, Transcription::Corrected)?);
        n += 1;
    }
    out.push(CheckReport::new("jump-system-residual-3d", worst, 1e-12));
    Ok(out)
}

/// Contour quadrature vs the closed-form image-point identities: the 2D
/// inverse Fourier transform of the layered free term against (i/4)H₀, and
/// the Hankel-contour form against the 3D point source e^{ikr}/(4πr).
fn sommerfeld_suite(opt: &VerifyOptions) -> Result<Vec<CheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opt.seed ^ 0x534d);
    let m = medium(2);
    let wn = m.wavenumbers()?;
    let integ = SpectralIntegrator::new(&wn.branch_points(), quad(opt, 1e-10))?;
    let ks: Vec<f64> = wn.branch_points();
    let mut out = Vec::new();

    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let k = *ks.choose(&mut rng).unwrap();
        let d1 = rng.gen_range(0.3..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let h = rng.gen_range(0.4..2.5);
        let f = |xi: Complex64| {
            let b = crate::medium::beta(xi, k)?;
            Ok((Complex64::i() * xi * d1).exp() * (-b * h).exp() / (2.0 * b))
        };
        let got = integ.fourier_inversion(f, h, 1e-10)?.value;
        let dist = (d1 * d1 + h * h).sqrt();
        let exact = Complex64::i() / 4.0 * hankel1(0, Complex64::new(k * dist, 0.0))?;
        worst = worst.max((got - exact).norm());
    }
    out.push(CheckReport::new("fourier-inversion-vs-hankel0", worst, 1e-8));

    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let k = *ks.choose(&mut rng).unwrap();
        let rho = rng.gen_range(0.3..3.0);
        let h = rng.gen_range(0.4..2.5);
        let f = |xi: Complex64| {
            let b = crate::medium::beta(xi, k)?;
            Ok((-b * h).exp() / (2.0 * b))
        };
        let got = integ.hankel_path_integral(f, 0, rho, h, 1e-10)?.value;
        let dist = (rho * rho + h * h).sqrt();
        let exact = (Complex64::i() * k * dist).exp() / (4.0 * PI * dist);
        worst = worst.max((got - exact).norm());
    }
    out.push(CheckReport::new("hankel-path-vs-point-source", worst, 1e-8));
    Ok(out)
}

/// The six degree-≤2 angular reductions: closed harmonic/Bessel row sums vs
/// converged periodic-trapezoid quadrature at random (t, α).
fn angular_suite(opt: &VerifyOptions) -> Result<Vec<CheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opt.seed ^ 0x414e);
    let monos = [Monomial::ONE, Monomial::Z1, Monomial::Z2, Monomial::Z1Z2, Monomial::Z1SQ, Monomial::Z2SQ];
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let t = rng.gen_range(0.0..12.0);
        let alpha = rng.gen_range(0.0..2.0 * PI);
        for mono in &monos {
            // Periodic trapezoid with doubling until stationary: spectrally
            // convergent for this entire integrand.
            let eval = |n: usize| -> Complex64 {
                let mut s = CZERO;
                for k in 0..n {
                    let gamma = 2.0 * PI * k as f64 / n as f64;
                    s += mono.eval([gamma.cos(), gamma.sin()])
                        * (Complex64::i() * t * (gamma - alpha).cos()).exp();
                }
                s / n as f64
            };
            let mut n = 64;
            let mut prev = eval(n);
            let oracle = loop {
                n *= 2;
                let cur = eval(n);
                if (cur - prev).norm() < 1e-13 || n >= 8192 {
                    break cur;
                }
                prev = cur;
            };
            let mut closed = CZERO;
            for af in mono.rows() {
                let trig = match af.harmonic {
                    Harmonic::Cos => (af.order as f64 * alpha).cos(),
                    Harmonic::Sin => (af.order as f64 * alpha).sin(),
                };
                closed += af.coef
                    * Complex64::i().powu(af.order as u32)
                    * trig
                    * bessel_j(af.order, Complex64::new(t, 0.0))?;
            }
            worst = worst.max((oracle - closed).norm());
        }
    }
    Ok(vec![CheckReport::new("angular-bessel-rows", worst, 1e-10)])
}

/// Equal densities collapse the layered tensor onto the free-space tensor.
fn degenerate_suite(opt: &VerifyOptions) -> Result<Vec<CheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opt.seed ^ 0x4447);
    let mut out = Vec::new();
    for dim in [2usize, 3] {
        let m = ElasticMedium::new(1.1, 1.3, 1.4, 1.4, 1.9, dim)?;
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let pt = |rng: &mut ChaCha8Rng| {
                let mut p = vec![0.0; dim];
                for (i, v) in p.iter_mut().enumerate() {
                    *v = if i + 1 == dim {
                        rng.gen_range(0.3..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }
                    } else {
                        rng.gen_range(-1.5..1.5)
                    };
                }
                p
            };
            let (x, y) = loop {
                let x = pt(&mut rng);
                let y = pt(&mut rng);
                let d2: f64 = x.iter().zip(y.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
                if d2.sqrt() > 0.3 {
                    break (x, y);
                }
            };
            let pi = kupradze_tensor(&m, HalfSpace::Plus, &x, &y)?;
            if dim == 2 {
                let g = Green2d::new(m.clone(), quad(opt, 1e-11))?;
                let gm = g.assemble([x[0], x[1]], [y[0], y[1]])?;
                for i in 0..2 {
                    for j in 0..2 {
                        worst = worst.max((gm.entries[i][j] - pi[i][j]).norm());
                    }
                }
            } else {
                let g = Green3d::new(m.clone(), quad(opt, 1e-11))?;
                let gm = g.assemble([x[0], x[1], x[2]], [y[0], y[1], y[2]])?;
                for i in 0..3 {
                    for j in 0..3 {
                        worst = worst.max((gm.entries[i][j] - pi[i][j]).norm());
                    }
                }
            }
        }
        out.push(CheckReport::new(&format!("degenerate-collapse-{dim}d"), worst, 1e-10));
    }
    Ok(out)
}

// -- assembled tensors --------------------------------------------------------

/// 2D tensor: finite-difference Navier residual, interface transmission
/// limits by ε-Richardson extrapolation, and reciprocity.
fn pde_2d_suite(opt: &VerifyOptions) -> Result<Vec<CheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opt.seed ^ 0x3244);
    let m = medium(2);
    let g = Green2d::new(m.clone(), quad(opt, 1e-9))?;
    let mut out = Vec::new();

    // Navier residual at 50 random points (both half-planes), 2nd-order FD.
    let h = 1e-3;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (x0, y) = loop {
            let x0: [f64; 2] = [
                rng.gen_range(-1.5..1.5),
                rng.gen_range(0.3..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
            ];
            let y: [f64; 2] = [
                rng.gen_range(-1.5..1.5),
                rng.gen_range(0.3..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
            ];
            let d = ((x0[0] - y[0]).powi(2) + (x0[1] - y[1]).powi(2)).sqrt();
            if d > 0.4 {
                break (x0, y);
            }
        };
        let j = rng.gen_range(1..=2usize);
        let side = HalfSpace::of(x0[1]);
        let rw2 = m.rho(side) * m.omega * m.omega;
        let col = |x: &[f64; 2]| -> Result<[Complex64; 2]> {
            let gm = g.assemble(*x, y)?;
            Ok([gm.entries[0][j - 1], gm.entries[1][j - 1]])
        };
        let u0 = col(&x0)?;
        let mut resid = [rw2 * u0[0], rw2 * u0[1]];
        let mut hess = [[[CZERO; 2]; 2]; 2];
        for i in 0..2 {
            let mut xp = x0;
            let mut xm = x0;
            xp[i] += h;
            xm[i] -= h;
            let (up, um) = (col(&xp)?, col(&xm)?);
            for t in 0..2 {
                hess[i][i][t] = (up[t] - 2.0 * u0[t] + um[t]) / (h * h);
            }
        }
        let (upp, upm, ump, umm) = (
            col(&[x0[0] + h, x0[1] + h])?,
            col(&[x0[0] + h, x0[1] - h])?,
            col(&[x0[0] - h, x0[1] + h])?,
            col(&[x0[0] - h, x0[1] - h])?,
        );
        for t in 0..2 {
            hess[0][1][t] = (upp[t] - upm[t] - ump[t] + umm[t]) / (4.0 * h * h);
            hess[1][0][t] = hess[0][1][t];
        }
        for t in 0..2 {
            for jj in 0..2 {
                resid[t] += m.mu * hess[jj][jj][t] + (m.lambda + m.mu) * hess[t][jj][jj];
            }
        }
        let scale = rw2 * u0.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let rmax = resid.iter().map(|c| c.norm()).fold(0.0, f64::max);
        worst = worst.max(rmax / scale);
    }
    out.push(CheckReport::new("navier-fd-2d", worst, 1e-4));

    // Transmission limits with ε-Richardson: the one-sided trace error is
    // O(ε), so 2f(ε/2) − f(ε) removes the leading term.
    let w = StressWeights::pseudo(&m);
    let frame = SurfaceFrame::new_2d([0.0, 1.0])?;
    let eps = 2e-3;
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let x1: f64 = rng.gen_range(-1.2..1.2);
        let y: [f64; 2] =
            [rng.gen_range(-1.2..1.2), rng.gen_range(0.4..1.2) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }];
        if (x1 - y[0]).abs() < 0.4 {
            continue;
        }
        for j in [1, 2] {
            let jump = |e: f64| -> Result<([Complex64; 2], [Complex64; 2], f64)> {
                let up = g.column_jet(j, [x1, e], y)?;
                let dn = g.column_jet(j, [x1, -e], y)?;
                let pu = stress_direct(&up, &frame, &w, m.mu);
                let pd = stress_direct(&dn, &frame, &w, m.mu);
                let scale = (0..2)
                    .map(|i| up.u[i].norm().max(pu[i].norm()))
                    .fold(1.0, f64::max);
                Ok((
                    [up.u[0] - dn.u[0], up.u[1] - dn.u[1]],
                    [pu[0] - pd[0], pu[1] - pd[1]],
                    scale,
                ))
            };
            let (ju1, jp1, s1) = jump(eps)?;
            let (ju2, jp2, _) = jump(eps / 2.0)?;
            for i in 0..2 {
                worst = worst.max((2.0 * ju2[i] - ju1[i]).norm() / s1);
                worst = worst.max((2.0 * jp2[i] - jp1[i]).norm() / s1);
            }
        }
    }
    out.push(CheckReport::new("transmission-limits-2d", worst, 1e-4));

    // Reciprocity G(x,y) = G(y,x)ᵀ at cross-region pairs.
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let x = [rng.gen_range(-1.2..1.2), rng.gen_range(0.3..1.3)];
        let y = [rng.gen_range(-1.2..1.2), -rng.gen_range(0.3..1.3)];
        let gxy = g.assemble(x, y)?;
        let gyx = g.assemble(y, x)?;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((gxy.entries[i][j] - gyx.entries[j][i]).norm());
            }
        }
    }
    out.push(CheckReport::new("reciprocity-2d", worst, 1e-7));
    Ok(out)
}

/// 3D tensor: the same PDE/jump/reciprocity checks (looser tolerances, FD
/// gradients) plus the contour-vs-real-axis Bessel transform cross-check on
/// representative coefficient kernels.
fn pde_3d_suite(opt: &VerifyOptions) -> Result<Vec<CheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opt.seed ^ 0x3344);
    let m = medium(3);
    let g = Green3d::new(m.clone(), quad(opt, 1e-9))?;
    let mut out = Vec::new();

    // Navier residual at 10 points.
    let h = 1e-3;
    let mut worst: f64 = 0.0;
    for n in 0..10 {
        let sgn = if n % 2 == 0 { 1.0 } else { -1.0 };
        let (x0, y) = loop {
            let x0 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), sgn * rng.gen_range(0.4..1.2)];
            let y = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.4..1.2) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
            ];
            let d: f64 = x0.iter().zip(y.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if d > 0.5 {
                break (x0, y);
            }
        };
        let j = rng.gen_range(1..=3usize);
        let side = HalfSpace::of(x0[2]);
        let rw2 = m.rho(side) * m.omega * m.omega;
        let col = |x: &[f64; 3]| g.column(j, *x, y);
        let u0 = col(&x0)?;
        let mut resid = [rw2 * u0[0], rw2 * u0[1], rw2 * u0[2]];
        let mut hess = [[[CZERO; 3]; 3]; 3];
        for i in 0..3 {
            let mut xp = x0;
            let mut xm = x0;
            xp[i] += h;
            xm[i] -= h;
            let (up, um) = (col(&xp)?, col(&xm)?);
            for t in 0..3 {
                hess[i][i][t] = (up[t] - 2.0 * u0[t] + um[t]) / (h * h);
            }
        }
        for i in 0..3 {
            for jj in (i + 1)..3 {
                let mut xpp = x0;
                let mut xpm = x0;
                let mut xmp = x0;
                let mut xmm = x0;
                xpp[i] += h;
                xpp[jj] += h;
                xpm[i] += h;
                xpm[jj] -= h;
                xmp[i] -= h;
                xmp[jj] += h;
                xmm[i] -= h;
                xmm[jj] -= h;
                let (upp, upm, ump, umm) = (col(&xpp)?, col(&xpm)?, col(&xmp)?, col(&xmm)?);
                for t in 0..3 {
                    hess[i][jj][t] = (upp[t] - upm[t] - ump[t] + umm[t]) / (4.0 * h * h);
                    hess[jj][i][t] = hess[i][jj][t];
                }
            }
        }
        for t in 0..3 {
            for jj in 0..3 {
                resid[t] += m.mu * hess[jj][jj][t] + (m.lambda + m.mu) * hess[t][jj][jj];
            }
        }
        let scale = rw2 * u0.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let rmax = resid.iter().map(|c| c.norm()).fold(0.0, f64::max);
        worst = worst.max(rmax / scale);
    }
    out.push(CheckReport::new("navier-fd-3d", worst, 1e-3));

    // Transmission limits with FD gradients and ε-Richardson.
    let frame = SurfaceFrame::new_3d([0.0, 0.0, 1.0])?;
    let w = StressWeights::pseudo(&m);
    let hfd = 5e-5;
    let eps = 2e-4;
    let y = [0.3, -0.2, 0.8];
    let mut worst: f64 = 0.0;
    for (j, xh) in [(1usize, [0.4, 0.25]), (3, [-0.5, 0.1])] {
        let jet = |x0: [f64; 3]| -> Result<FieldJet> {
            let u = g.column(j, x0, y)?;
            let mut grad = czmat();
            for axis in 0..3 {
                let mut xa = x0;
                let mut xb = x0;
                xa[axis] += hfd;
                xb[axis] -= hfd;
                let (ua, ub) = (g.column(j, xa, y)?, g.column(j, xb, y)?);
                for c in 0..3 {
                    grad[c][axis] = (ua[c] - ub[c]) / (2.0 * hfd);
                }
            }
            Ok(FieldJet { u, grad, dim: 3 })
        };
        let jump = |e: f64| -> Result<([Complex64; 3], [Complex64; 3], f64)> {
            let up = jet([xh[0], xh[1], e])?;
            let dn = jet([xh[0], xh[1], -e])?;
            let pu = stress_direct(&up, &frame, &w, m.mu);
            let pd = stress_direct(&dn, &frame, &w, m.mu);
            let scale = (0..3).map(|i| up.u[i].norm().max(pu[i].norm())).fold(1.0, f64::max);
            Ok((
                [up.u[0] - dn.u[0], up.u[1] - dn.u[1], up.u[2] - dn.u[2]],
                [pu[0] - pd[0], pu[1] - pd[1], pu[2] - pd[2]],
                scale,
            ))
        };
        let (ju1, jp1, s1) = jump(eps)?;
        let (ju2, jp2, _) = jump(eps / 2.0)?;
        for i in 0..3 {
            worst = worst.max((2.0 * ju2[i] - ju1[i]).norm() / s1);
            worst = worst.max((2.0 * jp2[i] - jp1[i]).norm() / s1);
        }
    }
    out.push(CheckReport::new("transmission-limits-3d", worst, 1e-3));

    // Reciprocity at 10 cross-region pairs.
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.3..1.1)];
        let y = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), -rng.gen_range(0.3..1.1)];
        let gxy = g.assemble(x, y)?;
        let gyx = g.assemble(y, x)?;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((gxy.entries[i][j] - gyx.entries[j][i]).norm());
            }
        }
    }
    out.push(CheckReport::new("reciprocity-3d", worst, 1e-6));

    // Contour reduction vs real-axis Bessel transform on five kernels.
    let cases = [
        (Coeff3DKey::new(Family::AP, 1, crate::green3d::SideTag::Plus, CompTag::None)?, Monomial::Z1, 2.2),
        (Coeff3DKey::new(Family::AS, 1, crate::green3d::SideTag::Minus, CompTag::C2)?, Monomial::ONE, 2.0),
        (Coeff3DKey::new(Family::RP, 3, crate::green3d::SideTag::None, CompTag::None)?, Monomial::ONE, 2.4),
        (Coeff3DKey::new(Family::RS, 1, crate::green3d::SideTag::None, CompTag::C1)?, Monomial::Z1Z2, 2.6),
        (Coeff3DKey::new(Family::TS, 3, crate::green3d::SideTag::None, CompTag::C1)?, Monomial::Z1, -2.3),
    ];
    let d = [1.3, 0.8];
    let mut worst: f64 = 0.0;
    for (key, mono, y3) in cases {
        let f = |xi: Complex64| g.coeff3d(key, xi, y3, Transcription::Corrected);
        let reduced = g.hankel_reduce(f, mono, d, y3.abs())?;
        let truncation = g.wavenumbers().k_max() + (1e9f64).ln() / y3.abs();
        let brute = radial_oracle(&g, &f, mono, d, truncation)?;
        worst = worst.max((reduced - brute).norm() / (1.0 + brute.norm()));
    }
    out.push(CheckReport::new("hankel-vs-real-axis", worst, 1e-6));
    Ok(out)
}

/// Real-axis Bessel-transform oracle for a spectral kernel: Σ angular rows of
/// (1/2π)∫₀^∞ f·ξ^{deg+1}·J_m(ξρ) dξ, with a cosine substitution absorbing
/// the inverse-square-root behaviour at the wavenumbers.
fn radial_oracle(
    g: &Green3d,
    f: &dyn Fn(Complex64) -> Result<Complex64>,
    mono: Monomial,
    d: [f64; 2],
    truncation: f64,
) -> Result<Complex64> {
    let rho = (d[0] * d[0] + d[1] * d[1]).sqrt();
    let alpha = d[1].atan2(d[0]);
    let deg = mono.degree() as i32;
    let mut cuts = vec![0.0];
    cuts.extend(g.wavenumbers().branch_points());
    cuts.push(truncation);
    let glx = [0.069_431_844_202_974, 0.330_009_478_207_572, 0.669_990_521_792_428, 0.930_568_155_797_026];
    let glw = [0.173_927_422_568_727, 0.326_072_577_431_273, 0.326_072_577_431_273, 0.173_927_422_568_727];
    let mut total = CZERO;
    for af in mono.rows() {
        let trig = match af.harmonic {
            Harmonic::Cos => (af.order as f64 * alpha).cos(),
            Harmonic::Sin => (af.order as f64 * alpha).sin(),
        };
        let cst = Complex64::i().powu(af.order as u32) * af.coef * trig;
        if cst.norm() == 0.0 {
            continue;
        }
        let mut integral = CZERO;
        for wdw in cuts.windows(2) {
            let (a, b) = (wdw[0], wdw[1]);
            let panels = 600;
            for p in 0..panels {
                let (u0, u1) = (p as f64 / panels as f64, (p + 1) as f64 / panels as f64);
                for (xx, ww) in glx.iter().zip(glw.iter()) {
                    let u = u0 + (u1 - u0) * xx;
                    let xi = a + (b - a) * 0.5 * (1.0 - (PI * u).cos());
                    let dxi = (b - a) * 0.5 * PI * (PI * u).sin() * (u1 - u0) * ww;
                    let fv = f(Complex64::new(xi, 0.0))?;
                    let jm = bessel_j(af.order, Complex64::new(xi * rho, 0.0))?;
                    integral += fv * xi.powi(deg + 1) * jm * dxi;
                }
            }
        }
        total += cst * integral / (2.0 * PI);
    }
    Ok(total)
}

/// Far-field decay rates: the residual of the leading asymptotic term, fitted
/// on a log-log grid of radii, must decay at least at the proven rate.
fn farfield_suite(opt: &VerifyOptions) -> Result<Vec<CheckReport>> {
    let radii: [f64; 5] = [50.0, 100.0, 200.0, 400.0, 800.0];
    let logr: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let fit_slope = |errs: &[f64]| -> f64 {
        // least-squares slope of ln err vs ln r, negated (decay exponent)
        let n = errs.len() as f64;
        let mx = logr.iter().sum::<f64>() / n;
        let my = errs.iter().map(|e| e.max(1e-300).ln()).sum::<f64>() / n;
        let mut num = 0.0;
        let mut den = 0.0;
        for (lr, e) in logr.iter().zip(errs.iter()) {
            num += (lr - mx) * (e.max(1e-300).ln() - my);
            den += (lr - mx) * (lr - mx);
        }
        -num / den
    };
    let mut out = Vec::new();

    // Far evaluation points make the spectral integrands highly oscillatory;
    // give the adaptive contours a larger node budget than the default, and
    // shrink the branch-point indentation with the radius: on an arc of radius
    // δ the factors e^{iξ·x₁} and e^{−β|x₂|} can grow like e^{c·δ·r}, and the
    // resulting cancellation noise stalls the adaptive bisection once it
    // exceeds the tolerance.
    let ff_quad = |r: f64| QuadConfig {
        tol: 1e-10,
        node_budget: 4_000_000,
        indent_scale: opt.quad.indent_scale.min(50.0 / r),
    };

    // 2D: correction potentials vs e^{ikr} r^{−1/2} F∞.
    let g2r: Vec<Green2d> =
        radii.iter().map(|&r| Green2d::new(medium(2), ff_quad(r))).collect::<Result<_>>()?;
    let g2 = &g2r[0];
    let y2 = [0.3, 0.6];
    let dirs2 = [0.5, 1.1, 1.9, 2.6, PI + 0.5, PI + 1.2, PI + 1.9, PI + 2.6];
    let kernels2 = [(WaveType::P, 1usize), (WaveType::S, 2), (WaveType::P, 2), (WaveType::S, 1)];
    let mut min_slope = f64::INFINITY;
    for (i, &theta) in dirs2.iter().enumerate() {
        let (a, j) = kernels2[i % 4];
        let ff = g2.far_field(a, j, theta, y2)?;
        if ff.value.norm() < 1e-8 {
            continue;
        }
        let side = if theta.sin() > 0.0 { HalfSpace::Plus } else { HalfSpace::Minus };
        let k = g2.wavenumbers().k(a, side);
        let dir = [theta.cos(), theta.sin()];
        let mut errs = Vec::new();
        for (&r, g2) in radii.iter().zip(&g2r) {
            let u = g2.correction_u(a, j, [r * dir[0], r * dir[1]], y2)?;
            let pred = (Complex64::i() * k * r).exp() / r.sqrt() * ff.value;
            errs.push((u.value - pred).norm() / ff.value.norm());
        }
        min_slope = min_slope.min(fit_slope(&errs));
    }
    out.push(CheckReport { check: "farfield-rate-2d".into(), max_error: 0.70 - min_slope, pass: min_slope >= 0.70 });

    // 3D: correction potentials vs e^{ikr} r^{−1} F∞.
    let g3r: Vec<Green3d> =
        radii.iter().map(|&r| Green3d::new(medium(3), ff_quad(r))).collect::<Result<_>>()?;
    let g3 = &g3r[0];
    let y3 = [0.3, -0.2, 0.6];
    let dirs3 = [
        (0.8, 2.1),
        (-0.9, 1.3),
        (1.2, 0.4),
        (-0.5, 5.0),
        (0.6, 3.4),
        (-1.1, 0.9),
        (1.0, 4.4),
        (-0.7, 2.7),
    ];
    let kernels3 = [Potential3d::P(3), Potential3d::S(3, 1), Potential3d::P(1), Potential3d::S(1, 2)];
    let mut min_slope = f64::INFINITY;
    for (i, &(theta, phi)) in dirs3.iter().enumerate() {
        let kind = kernels3[i % 4];
        let ff = g3.correction_far_field(kind, theta, phi, y3)?;
        if ff.value.norm() < 1e-8 {
            continue;
        }
        let side = if theta.sin() > 0.0 { HalfSpace::Plus } else { HalfSpace::Minus };
        let k = g3.wavenumbers().k(kind.wave(), side);
        let ct = theta.cos();
        let dir = [phi.cos() * ct, phi.sin() * ct, theta.sin()];
        let mut errs = Vec::new();
        for (&r, g3) in radii.iter().zip(&g3r) {
            let u = g3.correction(kind, [r * dir[0], r * dir[1], r * dir[2]], y3)?;
            let pred = (Complex64::i() * k * r).exp() / r * ff.value;
            errs.push((u.value - pred).norm() / ff.value.norm());
        }
        min_slope = min_slope.min(fit_slope(&errs));
    }
    out.push(CheckReport { check: "farfield-rate-3d".into(), max_error: 0.95 - min_slope, pass: min_slope >= 0.95 });
    Ok(out)
}

/// Surface-integral radiation probes on free-space Green columns: the
/// reciprocity pairing and the energy defect must fade with the probe radius.
fn radiation_suite(opt: &VerifyOptions) -> Result<Vec<CheckReport>> {
    if opt.radii.len() < 2 || opt.radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("radiation suite needs at least two ascending radii".into()));
    }
    let m = medium(2);
    let ya = [0.0, 0.4];
    let yb = [0.7, 1.1];
    let aa = [Complex64::new(1.0, 0.0), Complex64::new(0.2, -0.3), CZERO];
    let ab = [Complex64::new(-0.4, 0.8), Complex64::new(1.0, 0.0), CZERO];
    let u = |x: &[f64; 3]| kupradze_jet(&m, HalfSpace::Plus, &x[..2], &ya, &aa);
    let v = |x: &[f64; 3]| kupradze_jet(&m, HalfSpace::Plus, &x[..2], &yb, &ab);
    let mut out = Vec::new();
    let mut pairs = Vec::new();
    let mut energies = Vec::new();
    for &r in &opt.radii {
        let p = radiation_probe_pair(&m, HalfSpace::Plus, r, 32.0, u, v)?.norm();
        let e = radiation_probe_energy(&m, HalfSpace::Plus, r, 32.0, u)?.abs();
        out.push(CheckReport { check: format!("radiation-pair-R{r}"), max_error: p, pass: true });
        out.push(CheckReport { check: format!("radiation-energy-R{r}"), max_error: e, pass: true });
        pairs.push(p);
        energies.push(e);
    }
    let pr = pairs[pairs.len() - 1] / pairs[0];
    let er = energies[energies.len() - 1] / energies[0];
    out.push(CheckReport::new("radiation-pair-decay", pr, 0.2 + 1e-12));
    out.push(CheckReport::new("radiation-energy-decay", er, 0.2 + 1e-12));
    Ok(out)
}

// -- scattering solver --------------------------------------------------------

/// Points of a polar comparison grid inside the ball, avoiding the source.
fn comparison_grid(radius: f64, z: [f64; 2]) -> Vec<[f64; 2]> {
    let mut pts = Vec::new();
    for ir in 1..=8 {
        let r = radius * ir as f64 / 9.0;
        for it in 0..16 {
            let th = 2.0 * PI * (it as f64 + 0.3) / 16.0;
            let x = [r * th.cos(), r * th.sin()];
            if ((x[0] - z[0]).powi(2) + (x[1] - z[1]).powi(2)).sqrt() > 0.4 {
                pts.push(x);
            }
        }
    }
    pts
}

/// Flat interface: the scattered field has the closed form (G − Π₊)a, so the
/// solver error is directly measurable; it must clear 1e−3 in relative L₂ at
/// the production resolution and at least halve under one refinement.
fn solver_flat_suite(opt: &VerifyOptions) -> Result<Vec<CheckReport>> {
    let m = medium(2);
    let g = Green2d::new(m.clone(), quad(opt, 1e-10))?;
    let radius = 8.0;
    let src = IncidentSource { z: [0.5, 1.2], a: [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.3)] };
    let pts = comparison_grid(radius, src.z);
    let err_at = |nb: usize, nc: usize| -> Result<f64> {
        let cfg = SolverConfig { mesh_divisions: Some(nc), ..SolverConfig::default() };
        let solver = TransmissionSolver::new(m.clone(), SurfaceProfile::flat(), radius, nb, &cfg)?;
        let sol = solver.solve(&src)?;
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for &x in &pts {
            let got = solver.u_hat_at(&sol, x)?;
            let gm = g.assemble(x, src.z)?;
            let pi = kupradze_tensor(&m, HalfSpace::Plus, &x, &src.z)?;
            for i in 0..2 {
                let exact = (gm.entries[i][0] - pi[i][0]) * src.a[0] + (gm.entries[i][1] - pi[i][1]) * src.a[1];
                num += (got[i] - exact).norm_sqr();
                den += exact.norm_sqr();
            }
        }
        Ok((num / den).sqrt())
    };
    let coarse = err_at(256, 32)?;
    let fine = err_at(512, 64)?;
    Ok(vec![
        CheckReport::new("flat-solver-l2", fine, 1e-3),
        CheckReport::new("flat-solver-refinement", fine / coarse, 0.5 + 1e-12),
    ])
}

/// Locally perturbed interface (bump of height 0.2 wavelengths): the discrete
/// solution must satisfy the transmission conditions on the interface and the
/// exterior boundary-integral reconstruction must match the interior field
/// near ∂B_R, both within twice the discretization error (estimated by
/// comparing against a half-resolution solve).
fn solver_rough_suite(_opt: &VerifyOptions) -> Result<Vec<CheckReport>> {
    let m = medium(2);
    let wn = m.wavenumbers()?;
    let lambda_min = 2.0 * PI / wn.k_max();
    let profile = SurfaceProfile::bump(0.2 * lambda_min, 2.0)?;
    let radius = 6.0;
    let src = IncidentSource { z: [0.4, 1.3], a: [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.5)] };

    let solve = |r: f64, nb: usize, nc: usize| -> Result<(TransmissionSolver, crate::bie2d::ScatterSolution)> {
        let cfg = SolverConfig { mesh_divisions: Some(nc), ..SolverConfig::default() };
        let solver = TransmissionSolver::new(m.clone(), profile.clone(), r, nb, &cfg)?;
        let sol = solver.solve(&src)?;
        Ok((solver, sol))
    };
    let (fine, sol_f) = solve(radius, 384, 44)?;
    let (coarse, sol_c) = solve(radius, 192, 22)?;
    let (refs, sol_r) = solve(7.5, 480, 56)?;

    let mut out = Vec::new();
    let angles: Vec<f64> = (0..16).map(|i| 2.0 * PI * (i as f64 + 0.37) / 16.0).collect();

    // Discretization error estimate: fine-vs-coarse total field on a circle
    // just inside the boundary (Richardson-style; dominated by the coarse
    // error, so "2× this" is a generous but honest bound on 2× the fine
    // error's scale).
    let eps = 2.0 * PI * radius / 384.0;
    let rc = radius - eps;
    let mut disc = 0.0f64;
    let mut scale = 0.0f64;
    for &th in &angles {
        let x = [rc * th.cos(), rc * th.sin()];
        let uf = fine.total_field(&sol_f, x)?;
        let uc = coarse.total_field(&sol_c, x)?;
        for i in 0..2 {
            disc = disc.max((uf[i] - uc[i]).norm());
            scale = scale.max(uf[i].norm());
        }
    }

    // Transmission: continuity of the total field across the perturbed
    // interface (conforming-mesh traces from both sides).
    let delta = 1e-3;
    let mut jump = 0.0f64;
    let mut fscale = 0.0f64;
    for i in 0..9 {
        let x1 = -2.2 + 4.4 * i as f64 / 8.0;
        let f = profile.eval(x1);
        let up = fine.total_field(&sol_f, [x1, f + delta])?;
        let dn = fine.total_field(&sol_f, [x1, f - delta])?;
        for c in 0..2 {
            jump = jump.max((up[c] - dn[c]).norm());
            fscale = fscale.max(up[c].norm());
        }
    }
    out.push(CheckReport::new("rough-interface-continuity", jump / fscale, 2.0 * disc / scale));

    // Transmission: pseudo-traction continuity across the interface.  The
    // pseudo-traction is continuous only on the interface itself, so the
    // one-sided traces are Richardson-extrapolated from two offsets
    // (2·P(s) − P(2s), leaving an O(s²) residue); the tolerance is twice the
    // fine-vs-coarse difference of the same extrapolated trace.
    let w = StressWeights::pseudo(&m);
    let hfd = 0.03;
    let off = 0.06;
    let traction_at = |solver: &TransmissionSolver,
                       sol: &crate::bie2d::ScatterSolution,
                       x1: f64,
                       signed_off: f64|
     -> Result<[Complex64; 2]> {
        let f = profile.eval(x1);
        let df = (profile.eval(x1 + 1e-6) - profile.eval(x1 - 1e-6)) / 2e-6;
        let nrm = (1.0 + df * df).sqrt();
        let frame = SurfaceFrame::new_2d([-df / nrm, 1.0 / nrm])?;
        let x0 = [x1, f + signed_off];
        let mut jet = FieldJet { u: czvec(), grad: czmat(), dim: 2 };
        let u0 = solver.total_field(sol, x0)?;
        jet.u[0] = u0[0];
        jet.u[1] = u0[1];
        for axis in 0..2 {
            let mut xa = x0;
            let mut xb = x0;
            xa[axis] += hfd;
            xb[axis] -= hfd;
            let (ua, ub) = (solver.total_field(sol, xa)?, solver.total_field(sol, xb)?);
            for c in 0..2 {
                jet.grad[c][axis] = (ua[c] - ub[c]) / (2.0 * hfd);
            }
        }
        let p = stress_direct(&jet, &frame, &w, m.mu);
        Ok([p[0], p[1]])
    };
    let traction = |solver: &TransmissionSolver,
                    sol: &crate::bie2d::ScatterSolution,
                    x1: f64,
                    above: bool|
     -> Result<[Complex64; 2]> {
        let s = if above { off } else { -off };
        let near = traction_at(solver, sol, x1, s)?;
        let far = traction_at(solver, sol, x1, 2.0 * s)?;
        Ok([2.0 * near[0] - far[0], 2.0 * near[1] - far[1]])
    };
    let mut tjump = 0.0f64;
    let mut tdisc = 0.0f64;
    let mut tscale = 0.0f64;
    for i in 0..7 {
        let x1 = -1.8 + 3.6 * i as f64 / 6.0;
        let pf_up = traction(&fine, &sol_f, x1, true)?;
        let pf_dn = traction(&fine, &sol_f, x1, false)?;
        let pc_up = traction(&coarse, &sol_c, x1, true)?;
        for c in 0..2 {
            tjump = tjump.max((pf_up[c] - pf_dn[c]).norm());
            tdisc = tdisc.max((pf_up[c] - pc_up[c]).norm());
            tscale = tscale.max(pf_up[c].norm());
        }
    }
    out.push(CheckReport::new("rough-interface-traction", tjump / tscale, 2.0 * tdisc / tscale));

    // Exterior reconstruction vs interior values at |x| = R ± ε, both judged
    // against an independent larger-ball solve evaluated at the exact same
    // points.
    let re = radius + eps;
    let mut mis_int = 0.0f64;
    let mut mis_ext = 0.0f64;
    let mut rscale = 0.0f64;
    for &th in &angles {
        let xi = [rc * th.cos(), rc * th.sin()];
        let xe = [re * th.cos(), re * th.sin()];
        let ui = fine.total_field(&sol_f, xi)?;
        let (_, ue) = fine.reconstruct_exterior(&sol_f, xe)?;
        let ri = refs.total_field(&sol_r, xi)?;
        let rrf = refs.total_field(&sol_r, xe)?;
        for c in 0..2 {
            mis_int = mis_int.max((ui[c] - ri[c]).norm());
            mis_ext = mis_ext.max((ue[c] - rrf[c]).norm());
            rscale = rscale.max(ri[c].norm());
        }
    }
    out.push(CheckReport::new("exterior-match-interior-side", mis_int / rscale, 2.0 * disc / scale));
    out.push(CheckReport::new("exterior-match-exterior-side", mis_ext / rscale, 2.0 * disc / scale));
    Ok(out)
}
