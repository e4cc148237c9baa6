//! Free-space elastic machinery: fundamental solutions, the Kupradze tensor,
//! generalized stress operators, Helmholtz decomposition, and the surface
//! radiation probes.
//!
//! The generalized stress vector with weights μ̃ + λ̃ = μ + λ is
//!
//! ```text
//! P u = (μ+μ̃)∂_ν u + λ̃ ν div u − μ̃ τ div⊥u            (2D)
//! P u = (μ+μ̃)∂_ν u + λ̃ ν div u + μ̃ ν×curl u           (3D)
//! ```
//!
//! and the central algebraic identity rewrites it as
//!
//! ```text
//! P u = (μ+μ̃)(∂_τ u)⊥ + (2μ+λ) ν div u + μ τ div⊥u     (2D)
//! P u = (μ+μ̃)M_ν(u)   + (2μ+λ) ν div u − μ ν×curl u    (3D)
//! ```
//!
//! which holds pointwise for every gradient (not only Navier solutions) and
//! isolates the weight dependence in a tangential term.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::medium::{ElasticMedium, HalfSpace, StressWeights, WaveType, Wavenumbers};
use crate::specfun::hankel1;
use crate::{Error, Result};

pub type CVec = [Complex64; 3];
pub type CMat = [[Complex64; 3]; 3];

pub const CZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn czvec() -> CVec {
    [CZERO; 3]
}

pub fn czmat() -> CMat {
    [[CZERO; 3]; 3]
}

/// Normal/tangent frame on a surface; ν points out of the domain of interest.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceFrame {
    pub nu: [f64; 3],
    pub dim: usize,
}

impl SurfaceFrame {
    pub fn new_2d(nu: [f64; 2]) -> Result<Self> {
        let n = (nu[0] * nu[0] + nu[1] * nu[1]).sqrt();
        if !(n > 0.0) {
            return Err(Error::InvalidInput("zero normal vector".into()));
        }
        Ok(SurfaceFrame { nu: [nu[0] / n, nu[1] / n, 0.0], dim: 2 })
    }

    pub fn new_3d(nu: [f64; 3]) -> Result<Self> {
        let n = (nu[0] * nu[0] + nu[1] * nu[1] + nu[2] * nu[2]).sqrt();
        if !(n > 0.0) {
            return Err(Error::InvalidInput("zero normal vector".into()));
        }
        Ok(SurfaceFrame { nu: [nu[0] / n, nu[1] / n, nu[2] / n], dim: 3 })
    }

    /// 2D tangent τ = ν⊥ = (ν₂, −ν₁).
    pub fn tau(&self) -> [f64; 2] {
        [self.nu[1], -self.nu[0]]
    }
}

/// Displacement value and full gradient at one point; `grad[i][j] = ∂_j u_i`.
#[derive(Debug, Clone, Copy)]
pub struct FieldJet {
    pub u: CVec,
    pub grad: CMat,
    pub dim: usize,
}

impl FieldJet {
    pub fn div(&self) -> Complex64 {
        (0..self.dim).map(|i| self.grad[i][i]).sum()
    }

    /// 2D rotated divergence div⊥u = ∂₂u₁ − ∂₁u₂.
    pub fn div_perp(&self) -> Complex64 {
        self.grad[0][1] - self.grad[1][0]
    }

    /// 3D curl.
    pub fn curl(&self) -> CVec {
        [
            self.grad[2][1] - self.grad[1][2],
            self.grad[0][2] - self.grad[2][0],
            self.grad[1][0] - self.grad[0][1],
        ]
    }

    /// Directional derivative ∂_ν u (gradient contracted with a real vector).
    pub fn dir_deriv(&self, nu: &[f64; 3]) -> CVec {
        let mut out = czvec();
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[i] += self.grad[i][j] * nu[j];
            }
        }
        out
    }
}

/// Scalar fundamental solution Φ_k of the Helmholtz equation:
/// `(i/4)H₀^{(1)}(k|x−y|)` in 2D, `e^{ik|x−y|}/(4π|x−y|)` in 3D.
pub fn phi(k: f64, x: &[f64], y: &[f64], dim: usize) -> Result<Complex64> {
    let r = dist(x, y, dim)?;
    phi_radial(k, r, dim)
}

fn dist(x: &[f64], y: &[f64], dim: usize) -> Result<f64> {
    let r2: f64 = (0..dim).map(|i| (x[i] - y[i]).powi(2)).sum();
    let r = r2.sqrt();
    if r < 1e-14 {
        return Err(Error::CoincidentPoints(r));
    }
    Ok(r)
}

/// Φ_k as a function of the radius alone.
pub fn phi_radial(k: f64, r: f64, dim: usize) -> Result<Complex64> {
    if r <= 0.0 {
        return Err(Error::CoincidentPoints(r));
    }
    match dim {
        2 => Ok(Complex64::i() / 4.0 * hankel1(0, Complex64::new(k * r, 0.0))?),
        3 => Ok((Complex64::i() * k * r).exp() / (4.0 * PI * r)),
        _ => Err(Error::Domain(format!("dimension {dim} not supported"))),
    }
}

/// Radial derivatives of Φ_k up to third order (closed form, no differences).
#[derive(Debug, Clone, Copy)]
pub struct RadialDerivs {
    pub v: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub d3: Complex64,
}

pub fn phi_derivs(k: f64, r: f64, dim: usize) -> Result<RadialDerivs> {
    if r <= 0.0 {
        return Err(Error::CoincidentPoints(r));
    }
    match dim {
        2 => {
            let z = Complex64::new(k * r, 0.0);
            let h0 = hankel1(0, z)?;
            let h1 = hankel1(1, z)?;
            let c = Complex64::i() / 4.0;
            // H₀' = −H₁, H₁'(z) = H₀ − H₁/z.
            Ok(RadialDerivs {
                v: c * h0,
                d1: -c * k * h1,
                d2: -c * k * k * (h0 - h1 / z),
                d3: -c * k * k * k * (-h1 - h0 / z + 2.0 * h1 / (z * z)),
            })
        }
        3 => {
            let ikr = Complex64::i() * k * r;
            let e = ikr.exp() / (4.0 * PI);
            let k2 = k * k;
            Ok(RadialDerivs {
                v: e / r,
                d1: e * (ikr - 1.0) / (r * r),
                d2: e * (-k2 * r * r - 2.0 * ikr + 2.0) / (r * r * r),
                d3: e * (-Complex64::i() * k2 * k * r * r * r + 3.0 * k2 * r * r + 6.0 * ikr - 6.0)
                    / (r * r * r * r),
            })
        }
        _ => Err(Error::Domain(format!("dimension {dim} not supported"))),
    }
}

/// Radial profile of the Kupradze tensor Π = A(r)·I + B(r)·x̂x̂ᵀ and its
/// radial derivatives, where Π = (1/μ)Φ_{k_s}I + (1/ρω²)∇∇ᵀ(Φ_{k_s}−Φ_{k_p}).
struct KupradzeProfile {
    a: Complex64,
    b: Complex64,
    da: Complex64,
    db: Complex64,
}

fn kupradze_profile(m: &ElasticMedium, side: HalfSpace, r: f64) -> Result<KupradzeProfile> {
    let wn = m.wavenumbers()?;
    let ps = phi_derivs(wn.k(WaveType::S, side), r, m.dim)?;
    let pp = phi_derivs(wn.k(WaveType::P, side), r, m.dim)?;
    let rw2 = m.rho(side) * m.omega * m.omega;
    let (c1, c2, c3) = (ps.d1 - pp.d1, ps.d2 - pp.d2, ps.d3 - pp.d3);
    Ok(KupradzeProfile {
        a: ps.v / m.mu + c1 / (rw2 * r),
        b: (c2 - c1 / r) / rw2,
        da: ps.d1 / m.mu + (c2 * r - c1) / (rw2 * r * r),
        db: (c3 - c2 / r + c1 / (r * r)) / rw2,
    })
}

/// Free-space Green's tensor (Kupradze) Π±(x,y) for the half-space density
/// ρ±, as a d×d matrix in the top-left block.
pub fn kupradze_tensor(m: &ElasticMedium, side: HalfSpace, x: &[f64], y: &[f64]) -> Result<CMat> {
    let d = m.dim;
    let r = dist(x, y, d)?;
    let p = kupradze_profile(m, side, r)?;
    let mut out = czmat();
    for i in 0..d {
        let ei = (x[i] - y[i]) / r;
        for j in 0..d {
            let ej = (x[j] - y[j]) / r;
            out[i][j] = p.b * ei * ej;
            if i == j {
                out[i][j] += p.a;
            }
        }
    }
    Ok(out)
}

/// The field u(x) = Π±(x,y)·a together with its full gradient, in closed form.
pub fn kupradze_jet(m: &ElasticMedium, side: HalfSpace, x: &[f64], y: &[f64], a: &CVec) -> Result<FieldJet> {
    let d = m.dim;
    let r = dist(x, y, d)?;
    let p = kupradze_profile(m, side, r)?;
    let mut e = [0.0; 3];
    for i in 0..d {
        e[i] = (x[i] - y[i]) / r;
    }
    let ea: Complex64 = (0..d).map(|i| e[i] * a[i]).sum();
    let mut jet = FieldJet { u: czvec(), grad: czmat(), dim: d };
    for i in 0..d {
        jet.u[i] = p.a * a[i] + p.b * e[i] * ea;
        for k in 0..d {
            // ∂_k [A a_i + B e_i (e·a)] with ∂_k e_i = (δ_ik − e_i e_k)/r.
            let mut g = p.da * e[k] * a[i] + p.db * e[k] * e[i] * ea;
            let dik = if i == k { 1.0 } else { 0.0 };
            g += p.b * ((dik - e[i] * e[k]) * ea + e[i] * (a[k] - e[k] * ea)) / r;
            jet.grad[i][k] = g;
        }
    }
    Ok(jet)
}

/// Generalized stress vector from its definition.
pub fn stress_direct(jet: &FieldJet, frame: &SurfaceFrame, w: &StressWeights, mu: f64) -> CVec {
    let d = jet.dim;
    let dn = jet.dir_deriv(&frame.nu);
    let div = jet.div();
    let mut out = czvec();
    if d == 2 {
        let tau = frame.tau();
        let dperp = jet.div_perp();
        for i in 0..2 {
            out[i] = (mu + w.mu_tilde) * dn[i] + w.lambda_tilde * frame.nu[i] * div
                - w.mu_tilde * tau[i] * dperp;
        }
    } else {
        let c = jet.curl();
        let nxc = cross_rc(&frame.nu, &c);
        for i in 0..3 {
            out[i] = (mu + w.mu_tilde) * dn[i] + w.lambda_tilde * frame.nu[i] * div + w.mu_tilde * nxc[i];
        }
    }
    out
}

/// Generalized stress vector from the tangential-term identity; agrees with
/// [`stress_direct`] for every jet and every admissible weight pair.
pub fn stress_identity(jet: &FieldJet, frame: &SurfaceFrame, w: &StressWeights, m: &ElasticMedium) -> CVec {
    let two_mu_lambda = 2.0 * m.mu + m.lambda;
    let div = jet.div();
    let mut out = czvec();
    if jet.dim == 2 {
        let tau = frame.tau();
        let dt = jet.dir_deriv(&[tau[0], tau[1], 0.0]);
        let dperp = jet.div_perp();
        // (∂_τ u)⊥ = (v₂, −v₁).
        let vp = [dt[1], -dt[0]];
        for i in 0..2 {
            out[i] = (m.mu + w.mu_tilde) * vp[i] + two_mu_lambda * frame.nu[i] * div
                + m.mu * tau[i] * dperp;
        }
    } else {
        let mn = m_nu(jet, frame);
        let nxc = cross_rc(&frame.nu, &jet.curl());
        for i in 0..3 {
            out[i] = (m.mu + w.mu_tilde) * mn[i] + two_mu_lambda * frame.nu[i] * div - m.mu * nxc[i];
        }
    }
    out
}

/// The 3D tangential operator M_ν(u).
pub fn m_nu(jet: &FieldJet, frame: &SurfaceFrame) -> CVec {
    let n = &frame.nu;
    let g = &jet.grad; // g[i][j] = ∂_j u_i
    [
        n[1] * g[1][0] - n[0] * g[1][1] + n[2] * g[2][0] - n[0] * g[2][2],
        n[0] * g[0][1] - n[1] * g[0][0] + n[2] * g[2][1] - n[1] * g[2][2],
        n[0] * g[0][2] - n[2] * g[0][0] + n[1] * g[1][2] - n[2] * g[1][1],
    ]
}

fn cross_rc(a: &[f64; 3], b: &CVec) -> CVec {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn cross_cc(a: &CVec, b: &CVec) -> CVec {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Helmholtz potentials of a field, with the gradients needed to rebuild it.
#[derive(Debug, Clone)]
pub enum HelmholtzParts {
    TwoD {
        phi_p: Complex64,
        grad_phi_p: [Complex64; 2],
        phi_s: Complex64,
        grad_phi_s: [Complex64; 2],
    },
    ThreeD {
        phi_p: Complex64,
        grad_phi_p: CVec,
        phi_s: CVec,
        curl_phi_s: CVec,
    },
}

/// Potential values alone (no gradients), read off a jet:
/// φ_p = div u and φ_s = div⊥u (2D) / 𝛗_s = curl u (3D).
pub fn helmholtz_split(jet: &FieldJet) -> (Complex64, CVec) {
    let phi_p = jet.div();
    if jet.dim == 2 {
        (phi_p, [jet.div_perp(), CZERO, CZERO])
    } else {
        (phi_p, jet.curl())
    }
}

/// u = −k_p⁻²∇φ_p − k_s⁻²∇⊥φ_s (2D) or u = −k_p⁻²∇φ_p + k_s⁻²curl 𝛗_s (3D).
pub fn helmholtz_recompose(parts: &HelmholtzParts, wn: &Wavenumbers, side: HalfSpace) -> CVec {
    let kp2 = wn.k(WaveType::P, side).powi(2);
    let ks2 = wn.k(WaveType::S, side).powi(2);
    match parts {
        HelmholtzParts::TwoD { grad_phi_p, grad_phi_s, .. } => [
            -grad_phi_p[0] / kp2 - grad_phi_s[1] / ks2,
            -grad_phi_p[1] / kp2 + grad_phi_s[0] / ks2,
            CZERO,
        ],
        HelmholtzParts::ThreeD { grad_phi_p, curl_phi_s, .. } => [
            -grad_phi_p[0] / kp2 + curl_phi_s[0] / ks2,
            -grad_phi_p[1] / kp2 + curl_phi_s[1] / ks2,
            -grad_phi_p[2] / kp2 + curl_phi_s[2] / ks2,
        ],
    }
}

/// Closed-form Helmholtz parts of the Kupradze column u = Π±(·,y)a:
/// φ_p = (2μ+λ)⁻¹ ∇Φ_{k_p}·a, and φ_s = μ⁻¹∇⊥Φ_{k_s}·a (2D) /
/// 𝛗_s = μ⁻¹∇Φ_{k_s}×a (3D).
pub fn kupradze_helmholtz(
    m: &ElasticMedium,
    side: HalfSpace,
    x: &[f64],
    y: &[f64],
    a: &CVec,
) -> Result<HelmholtzParts> {
    let d = m.dim;
    let r = dist(x, y, d)?;
    let wn = m.wavenumbers()?;
    let pp = phi_derivs(wn.k(WaveType::P, side), r, d)?;
    let ps = phi_derivs(wn.k(WaveType::S, side), r, d)?;
    let mut e = [0.0; 3];
    for i in 0..d {
        e[i] = (x[i] - y[i]) / r;
    }
    let ea: Complex64 = (0..d).map(|i| e[i] * a[i]).sum();
    let cp = 1.0 / (2.0 * m.mu + m.lambda);
    let cs = 1.0 / m.mu;
    // φ_p = c_p Φ_p' (e·a); ∇φ_p = c_p[Φ_p'' e (e·a) + Φ_p'(a − e(e·a))/r].
    let phi_p = cp * pp.d1 * ea;
    let mut grad_phi_p = czvec();
    for k in 0..d {
        grad_phi_p[k] = cp * (pp.d2 * e[k] * ea + pp.d1 * (a[k] - e[k] * ea) / r);
    }
    if d == 2 {
        // e⊥·a = e₂a₁ − e₁a₂; ∇(e⊥·a) = (w − e(e⊥·a))/r, w = (−a₂, a₁).
        let epa = e[1] * a[0] - e[0] * a[1];
        let w = [-a[1], a[0]];
        let phi_s = cs * ps.d1 * epa;
        let mut grad_phi_s = [CZERO; 2];
        for k in 0..2 {
            grad_phi_s[k] = cs * (ps.d2 * e[k] * epa + ps.d1 * (w[k] - e[k] * epa) / r);
        }
        Ok(HelmholtzParts::TwoD {
            phi_p,
            grad_phi_p: [grad_phi_p[0], grad_phi_p[1]],
            phi_s,
            grad_phi_s,
        })
    } else {
        let ec = [Complex64::new(e[0], 0.0), Complex64::new(e[1], 0.0), Complex64::new(e[2], 0.0)];
        let exa = cross_cc(&ec, a);
        let mut phi_s = czvec();
        for i in 0..3 {
            phi_s[i] = cs * ps.d1 * exa[i];
        }
        // curl(Φ_s'(e×a)) = Φ_s''·e×(e×a) − Φ_s'(a + e(e·a))/r,
        // with e×(e×a) = e(e·a) − a.
        let mut curl_phi_s = czvec();
        for i in 0..3 {
            let exexa = ec[i] * ea - a[i];
            curl_phi_s[i] = cs * (ps.d2 * exexa - ps.d1 * (a[i] + ec[i] * ea) / r);
        }
        Ok(HelmholtzParts::ThreeD { phi_p, grad_phi_p, phi_s, curl_phi_s })
    }
}

// 4-point Gauss–Legendre rule on [−1, 1], used by the surface probes.
const GL4_X: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_W: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// Number of composite GL4 panels resolving `arc_len` at `nodes_per_wavelength`
/// nodes per wavelength 2π/k.
fn panel_count(arc_len: f64, k: f64, nodes_per_wavelength: f64) -> usize {
    ((arc_len * k / (2.0 * PI) * nodes_per_wavelength / 4.0).ceil() as usize).max(8)
}

/// Surface integral over the half-circle / hemisphere ∂B_R^± of a pointwise
/// integrand `f(x, ν)`; ν is the outward normal x̂ of B_R.
fn sphere_cap_integral<F>(m: &ElasticMedium, side: HalfSpace, radius: f64, nodes_per_wavelength: f64, f: F) -> Result<Complex64>
where
    F: Fn(&[f64; 3], &SurfaceFrame) -> Result<Complex64>,
{
    let wn = m.wavenumbers()?;
    let ks = wn.k(WaveType::S, side);
    let mut total = CZERO;
    if m.dim == 2 {
        let (t0, t1) = match side {
            HalfSpace::Plus => (0.0, PI),
            HalfSpace::Minus => (PI, 2.0 * PI),
        };
        let n_panels = panel_count(radius * (t1 - t0), ks, nodes_per_wavelength);
        let hp = (t1 - t0) / n_panels as f64;
        for p in 0..n_panels {
            let c = t0 + (p as f64 + 0.5) * hp;
            for (x, w) in GL4_X.iter().zip(GL4_W.iter()) {
                let th = c + 0.5 * hp * x;
                let nu = [th.cos(), th.sin(), 0.0];
                let pt = [radius * nu[0], radius * nu[1], 0.0];
                let frame = SurfaceFrame { nu, dim: 2 };
                total += f(&pt, &frame)? * (w * 0.5 * hp * radius);
            }
        }
    } else {
        // Polar angle θ from the +x₃ axis; upper hemisphere θ ∈ (0, π/2).
        let (t0, t1) = match side {
            HalfSpace::Plus => (0.0, 0.5 * PI),
            HalfSpace::Minus => (0.5 * PI, PI),
        };
        let n_th = panel_count(radius * (t1 - t0), ks, nodes_per_wavelength);
        let hp = (t1 - t0) / n_th as f64;
        // Uniform (trapezoidal) azimuthal grid: spectrally accurate on the
        // periodic direction.
        let n_az = ((2.0 * PI * radius * ks / (2.0 * PI) * nodes_per_wavelength).ceil() as usize).max(16);
        let daz = 2.0 * PI / n_az as f64;
        for p in 0..n_th {
            let c = t0 + (p as f64 + 0.5) * hp;
            for (x, w) in GL4_X.iter().zip(GL4_W.iter()) {
                let th = c + 0.5 * hp * x;
                let (st, ct) = th.sin_cos();
                let mut az_sum = CZERO;
                for q in 0..n_az {
                    let g = q as f64 * daz;
                    let nu = [st * g.cos(), st * g.sin(), ct];
                    let pt = [radius * nu[0], radius * nu[1], radius * nu[2]];
                    let frame = SurfaceFrame { nu, dim: 3 };
                    az_sum += f(&pt, &frame)?;
                }
                total += az_sum * (daz * w * 0.5 * hp * radius * radius * st);
            }
        }
    }
    Ok(total)
}

/// `∫_{∂B_R^±} (P u·v − P v·u) ds` for two radiating fields given by their
/// jets; tends to 0 as R → ∞ by the surface-integral limit theorems.
pub fn radiation_probe_pair<U, V>(
    m: &ElasticMedium,
    side: HalfSpace,
    radius: f64,
    nodes_per_wavelength: f64,
    u: U,
    v: V,
) -> Result<Complex64>
where
    U: Fn(&[f64; 3]) -> Result<FieldJet>,
    V: Fn(&[f64; 3]) -> Result<FieldJet>,
{
    let w = StressWeights::physical(m);
    sphere_cap_integral(m, side, radius, nodes_per_wavelength, |pt, frame| {
        let ju = u(pt)?;
        let jv = v(pt)?;
        let pu = stress_direct(&ju, frame, &w, m.mu);
        let pv = stress_direct(&jv, frame, &w, m.mu);
        let mut s = CZERO;
        for i in 0..m.dim {
            s += pu[i] * jv.u[i] - pv[i] * ju.u[i];
        }
        Ok(s)
    })
}

/// The energy defect
/// `ℑ∫ P u·ū ds − (2μ+λ)k_p⁻¹∫|φ_p|² ds − μ k_s⁻¹∫|φ_s|² ds` on ∂B_R^±;
/// tends to 0 as R → ∞ for radiating fields.
pub fn radiation_probe_energy<U>(
    m: &ElasticMedium,
    side: HalfSpace,
    radius: f64,
    nodes_per_wavelength: f64,
    u: U,
) -> Result<f64>
where
    U: Fn(&[f64; 3]) -> Result<FieldJet>,
{
    let w = StressWeights::physical(m);
    let wn = m.wavenumbers()?;
    let kp = wn.k(WaveType::P, side);
    let ks = wn.k(WaveType::S, side);
    let c_p = (2.0 * m.mu + m.lambda) / kp;
    let c_s = m.mu / ks;
    let total = sphere_cap_integral(m, side, radius, nodes_per_wavelength, |pt, frame| {
        let ju = u(pt)?;
        let pu = stress_direct(&ju, frame, &w, m.mu);
        let mut s = CZERO;
        for i in 0..m.dim {
            s += pu[i] * ju.u[i].conj();
        }
        let (phi_p, phi_s) = helmholtz_split(&ju);
        let s2: f64 = phi_s.iter().map(|c| c.norm_sqr()).sum();
        // Pack the real quantities: imaginary part carries ℑ(P u·ū), the real
        // part carries the energy densities.
        Ok(Complex64::new(c_p * phi_p.norm_sqr() + c_s * s2, s.im))
    })?;
    Ok(total.im - total.re)
}
