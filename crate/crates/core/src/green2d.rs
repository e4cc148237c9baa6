//! The 2D two-layered Green's tensor for the Navier equation with a flat
//! density interface at x₂ = 0.
//!
//! The tensor is assembled from two scalar Helmholtz potentials per column,
//!
//! ```text
//! G_j = −k_p⁻² ∇_x G_{p,j} − k_s⁻² ∇⊥_x G_{s,j},   G_{a,j} = G̃_{a,j} + U_{a,j},
//! ```
//!
//! where the auxiliary part G̃ matches only the normal-derivative jumps of the
//! potentials (an acoustic-type two-layer field with explicit reflection /
//! transmission kernels) and the correction U restores the coupled tangential
//! jump conditions.  Both parts are Fourier integrals over the indented real
//! line; x-derivatives are taken spectrally (multiply the integrand by iξ for
//! ∂₁ and by ∓β for ∂₂) plus closed-form derivatives of the free-space term.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::elastic_fields::{czmat, czvec, phi_derivs, FieldJet, CZERO};
use crate::medium::{beta, refl_trans, spectral_constants, ElasticMedium, HalfSpace, WaveType, Wavenumbers};
use crate::quadrature::{QuadConfig, SpectralIntegrator};
use crate::{Error, Result};

/// Side assignment of the evaluation and source points (x₂ = 0 counts as the
/// upper side: traces are one-sided limits from above by default).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionTag {
    pub x_region: HalfSpace,
    pub y_region: HalfSpace,
}

impl RegionTag {
    pub fn of(x2: f64, y2: f64) -> Self {
        RegionTag { x_region: HalfSpace::of(x2), y_region: HalfSpace::of(y2) }
    }
}

/// A scalar spectral quantity with its x-gradient.
#[derive(Debug, Clone, Copy)]
pub struct SpectralEval {
    pub value: Complex64,
    pub grad: [Complex64; 2],
}

/// A scalar spectral quantity with x-gradient and x-Hessian.
#[derive(Debug, Clone, Copy)]
pub struct SpectralJet {
    pub value: Complex64,
    pub grad: [Complex64; 2],
    pub hess: [[Complex64; 2]; 2],
}

/// The assembled 2×2 Green's matrix at one point pair.
#[derive(Debug, Clone)]
pub struct GreenMatrix {
    pub entries: [[Complex64; 2]; 2],
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub region: RegionTag,
}

/// One far-field pattern value U∞ of a correction potential.
#[derive(Debug, Clone)]
pub struct FarFieldPattern {
    pub wave_type: WaveType,
    pub column: usize,
    pub theta: f64,
    pub value: Complex64,
    pub gradient_y: [Complex64; 2],
}

/// Minimum separation |x−y| in wavelengths of the shortest wave.
const MIN_SEPARATION_WAVELENGTHS: f64 = 1e-6;
/// Grazing-angle guard for far fields.
const THETA_MIN: f64 = 1e-3;

#[derive(Clone, Copy)]
enum Part {
    Tilde,
    Correction,
    Both,
}

/// One y₂-exponential term of a spectral interface coefficient:
/// contribution = `coef · exp(rate · y₂)`.
#[derive(Debug, Clone, Copy)]
pub struct CoeffTerm {
    pub coef: Complex64,
    pub rate: Complex64,
}

pub struct Green2d {
    m: ElasticMedium,
    wn: Wavenumbers,
    integ: SpectralIntegrator,
    tol: f64,
}

impl Green2d {
    pub fn new(m: ElasticMedium, quad: QuadConfig) -> Result<Self> {
        if m.dim != 2 {
            return Err(Error::InvalidInput(format!("Green2d needs dim 2, got {}", m.dim)));
        }
        let wn = m.wavenumbers()?;
        let tol = quad.tol;
        let integ = SpectralIntegrator::new(&wn.branch_points(), quad)?;
        Ok(Green2d { m, wn, integ, tol })
    }

    pub fn medium(&self) -> &ElasticMedium {
        &self.m
    }

    pub fn wavenumbers(&self) -> &Wavenumbers {
        &self.wn
    }

    /// The interface coefficient A_{a,j} (source above) or B_{a,j} (source
    /// below) as the sum of its two exponential terms in y₂.
    pub fn coeff_terms(&self, a: WaveType, j: usize, xi: Complex64, y_region: HalfSpace) -> Result<[CoeffTerm; 2]> {
        check_column(j)?;
        let wn = &self.wn;
        let (cp_p, cp_m) = (wn.kp(HalfSpace::Plus).powi(-2), wn.kp(HalfSpace::Minus).powi(-2));
        let (cs_p, cs_m) = (wn.ks(HalfSpace::Plus).powi(-2), wn.ks(HalfSpace::Minus).powi(-2));
        let bpp = beta(xi, wn.kp(HalfSpace::Plus))?;
        let bpm = beta(xi, wn.kp(HalfSpace::Minus))?;
        let bsp = beta(xi, wn.ks(HalfSpace::Plus))?;
        let bsm = beta(xi, wn.ks(HalfSpace::Minus))?;
        let dp = cp_p * bpp + cp_m * bpm;
        let ds = cs_p * bsp + cs_m * bsm;
        let (c0, d) = spectral_constants(&self.m, xi)?;
        let pref = c0 * xi / d;
        let i = Complex64::i();
        let xi2 = xi * xi;
        // First term carries the s-exponential in y₂ for the p-coefficients
        // and vice versa: the forcing of each potential's jump system comes
        // from the other wave family's auxiliary trace.
        let terms = match (a, j, y_region) {
            (WaveType::P, 1, HalfSpace::Plus) => [
                CoeffTerm { coef: i * pref * cs_p * bsp, rate: -bsp },
                CoeffTerm { coef: -i * pref * (cs_p - cs_m) * cp_p * xi2 / dp, rate: -bpp },
            ],
            (WaveType::P, 1, HalfSpace::Minus) => [
                CoeffTerm { coef: -i * pref * cs_m * bsm, rate: bsm },
                CoeffTerm { coef: -i * pref * (cs_p - cs_m) * cp_m * xi2 / dp, rate: bpm },
            ],
            (WaveType::S, 1, HalfSpace::Plus) => [
                CoeffTerm { coef: -pref * (cp_p - cp_m) * cs_p * bsp * xi / ds, rate: -bsp },
                CoeffTerm { coef: pref * cp_p * xi, rate: -bpp },
            ],
            (WaveType::S, 1, HalfSpace::Minus) => [
                CoeffTerm { coef: pref * (cp_p - cp_m) * cs_m * bsm * xi / ds, rate: bsm },
                CoeffTerm { coef: pref * cp_m * xi, rate: bpm },
            ],
            (WaveType::P, 2, HalfSpace::Plus) => [
                CoeffTerm { coef: pref * cs_p * xi, rate: -bsp },
                CoeffTerm { coef: -pref * (cs_p - cs_m) * cp_p * bpp * xi / dp, rate: -bpp },
            ],
            (WaveType::P, 2, HalfSpace::Minus) => [
                CoeffTerm { coef: pref * cs_m * xi, rate: bsm },
                CoeffTerm { coef: pref * (cs_p - cs_m) * cp_m * bpm * xi / dp, rate: bpm },
            ],
            (WaveType::S, 2, HalfSpace::Plus) => [
                CoeffTerm { coef: i * pref * (cp_p - cp_m) * cs_p * xi2 / ds, rate: -bsp },
                CoeffTerm { coef: -i * pref * cp_p * bpp, rate: -bpp },
            ],
            (WaveType::S, 2, HalfSpace::Minus) => [
                CoeffTerm { coef: i * pref * (cp_p - cp_m) * cs_m * xi2 / ds, rate: bsm },
                CoeffTerm { coef: i * pref * cp_m * bpm, rate: bpm },
            ],
            _ => unreachable!(),
        };
        Ok(terms)
    }

    /// The interface coefficient evaluated at height y₂ (the sign of y₂
    /// selects the family).
    pub fn coeff_ab(&self, a: WaveType, j: usize, xi: Complex64, y2: f64) -> Result<Complex64> {
        let terms = self.coeff_terms(a, j, xi, HalfSpace::of(y2))?;
        Ok(terms.iter().map(|t| t.coef * (t.rate * y2).exp()).sum())
    }

    /// ∂/∂y₂ of the interface coefficient.
    pub fn coeff_ab_dy2(&self, a: WaveType, j: usize, xi: Complex64, y2: f64) -> Result<Complex64> {
        let terms = self.coeff_terms(a, j, xi, HalfSpace::of(y2))?;
        Ok(terms.iter().map(|t| t.coef * t.rate * (t.rate * y2).exp()).sum())
    }

    /// Overall scalar prefactor of the auxiliary potential G̃_{a,j}.
    fn tilde_prefactor(&self, a: WaveType, j: usize) -> f64 {
        match (a, j) {
            (WaveType::P, _) => 1.0 / (2.0 * self.m.mu + self.m.lambda),
            (WaveType::S, 1) => 1.0 / self.m.mu,
            (WaveType::S, _) => -1.0 / self.m.mu,
        }
    }

    /// Whether the free term of G̃_{a,j} is a ∂₁ (oscillatory ξ/β kernel) or
    /// a ∂₂ derivative of Φ.
    fn is_xi_kernel(a: WaveType, j: usize) -> bool {
        matches!((a, j), (WaveType::P, 1) | (WaveType::S, 2))
    }

    /// The spectral coefficient of the auxiliary kernel for the given region
    /// pair: the transform of G̃_{a,j} minus its free-space term is
    /// `tilde_kernel_coeff · e^{∓β_{a,±}x₂} · e^{∓β_{a,±}y₂}` with the decaying
    /// exponential of each point's side.
    pub fn tilde_kernel_coeff(&self, a: WaveType, j: usize, xi: Complex64, region: RegionTag) -> Result<Complex64> {
        check_column(j)?;
        let ka_p = self.wn.k(a, HalfSpace::Plus);
        let ka_m = self.wn.k(a, HalfSpace::Minus);
        let ba_p = beta(xi, ka_p)?;
        let ba_m = beta(xi, ka_m)?;
        let (r, t) = refl_trans(ba_p, ba_m, ka_p, ka_m)?;
        let xi_kernel = Self::is_xi_kernel(a, j);
        let c = self.tilde_prefactor(a, j);
        let i = Complex64::i();
        let coef = match (region.x_region, region.y_region) {
            (HalfSpace::Plus, HalfSpace::Plus) => {
                if xi_kernel {
                    0.5 * i * xi / ba_p * r
                } else {
                    Complex64::from(0.5) * r
                }
            }
            (HalfSpace::Minus, HalfSpace::Plus) => {
                if xi_kernel {
                    0.5 * i * xi / ba_p * t
                } else {
                    Complex64::from(0.5) * t
                }
            }
            (HalfSpace::Plus, HalfSpace::Minus) => {
                if xi_kernel {
                    -0.5 * i * xi / ba_m * (t - 2.0)
                } else {
                    Complex64::from(0.5) * (t - 2.0)
                }
            }
            (HalfSpace::Minus, HalfSpace::Minus) => {
                if xi_kernel {
                    -0.5 * i * xi / ba_m * r
                } else {
                    Complex64::from(0.5) * r
                }
            }
        };
        Ok(c * coef)
    }

    /// The spectral integrand of the requested part at one node ξ (without
    /// the 1/2π and without the e^{iξ(x₁−y₁)} oscillation, which the caller
    /// appends).  `deriv` = 0, 1, 2 selects value, ∂₁, ∂₂ via the spectral
    /// multipliers.
    fn kernel_at(
        &self,
        a: WaveType,
        j: usize,
        x: [f64; 2],
        y: [f64; 2],
        region: RegionTag,
        part: Part,
        deriv: [usize; 2],
        xi: Complex64,
    ) -> Result<Complex64> {
        let ka_p = self.wn.k(a, HalfSpace::Plus);
        let ka_m = self.wn.k(a, HalfSpace::Minus);
        let ba_p = beta(xi, ka_p)?;
        let ba_m = beta(xi, ka_m)?;
        let i = Complex64::i();
        let mut total = CZERO;
        if matches!(part, Part::Tilde | Part::Both) {
            let coef = self.tilde_kernel_coeff(a, j, xi, region)?;
            let xexp = match region.x_region {
                HalfSpace::Plus => -ba_p * x[1],
                HalfSpace::Minus => ba_m * x[1],
            };
            let yexp = match region.y_region {
                HalfSpace::Plus => -ba_p * y[1],
                HalfSpace::Minus => ba_m * y[1],
            };
            total += coef * (xexp + yexp).exp();
        }
        if matches!(part, Part::Correction | Part::Both) {
            let terms = self.coeff_terms(a, j, xi, region.y_region)?;
            let coeff: Complex64 = terms.iter().map(|t| t.coef * (t.rate * y[1]).exp()).sum();
            let xexp = match region.x_region {
                HalfSpace::Plus => (-ba_p * x[1]).exp(),
                HalfSpace::Minus => (ba_m * x[1]).exp(),
            };
            total += coeff * xexp;
        }
        // Spectral differentiation: iξ per ∂₁, ∓β_{a,(x side)} per ∂₂.
        for &d in deriv.iter() {
            match d {
                0 => {}
                1 => total *= i * xi,
                2 => {
                    total *= match region.x_region {
                        HalfSpace::Plus => -ba_p,
                        HalfSpace::Minus => ba_m,
                    }
                }
                _ => unreachable!(),
            }
        }
        Ok(total)
    }

    fn inversion(
        &self,
        a: WaveType,
        j: usize,
        x: [f64; 2],
        y: [f64; 2],
        region: RegionTag,
        part: Part,
        deriv: [usize; 2],
    ) -> Result<Complex64> {
        let dx1 = x[0] - y[0];
        let decay = x[1].abs() + y[1].abs();
        let kernel = |xi: Complex64| -> Result<Complex64> {
            Ok(self.kernel_at(a, j, x, y, region, part, deriv, xi)? * (Complex64::i() * xi * dx1).exp())
        };
        Ok(self.integ.fourier_inversion(kernel, decay, self.tol)?.value)
    }

    /// Value and gradient of the free-space term of G̃_{a,j} (present only
    /// when x and y share a side), as a SpectralJet.
    fn free_term_jet(&self, a: WaveType, j: usize, x: [f64; 2], y: [f64; 2], region: RegionTag) -> Result<SpectralJet> {
        let mut out = SpectralJet { value: CZERO, grad: [CZERO; 2], hess: [[CZERO; 2]; 2] };
        if region.x_region != region.y_region {
            return Ok(out);
        }
        let k = self.wn.k(a, region.x_region);
        let r = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
        let p = phi_derivs(k, r, 2)?;
        let e = [(x[0] - y[0]) / r, (x[1] - y[1]) / r];
        let c = self.tilde_prefactor(a, j);
        let idx = if Self::is_xi_kernel(a, j) { 0 } else { 1 };
        out.value = c * p.d1 * e[idx];
        for kk in 0..2 {
            let dk = if idx == kk { 1.0 } else { 0.0 };
            out.grad[kk] = c * (p.d2 * e[kk] * e[idx] + p.d1 * (dk - e[idx] * e[kk]) / r);
        }
        let q = p.d2 / r - p.d1 / (r * r);
        for kk in 0..2 {
            for ll in 0..2 {
                let d_ik = if idx == kk { 1.0 } else { 0.0 };
                let d_il = if idx == ll { 1.0 } else { 0.0 };
                let d_kl = if kk == ll { 1.0 } else { 0.0 };
                out.hess[kk][ll] = c
                    * (p.d3 * e[idx] * e[kk] * e[ll]
                        + q * (d_ik * e[ll] + d_il * e[kk] + d_kl * e[idx] - 3.0 * e[idx] * e[kk] * e[ll]));
            }
        }
        Ok(out)
    }

    fn check_points(&self, x: [f64; 2], y: [f64; 2]) -> Result<RegionTag> {
        let r = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
        let min_sep = MIN_SEPARATION_WAVELENGTHS * 2.0 * PI / self.wn.k_max();
        if r < min_sep {
            return Err(Error::CoincidentPoints(r));
        }
        Ok(RegionTag::of(x[1], y[1]))
    }

    /// The auxiliary potential G̃_{a,j}(x,y) with its x-gradient.
    pub fn tilde_g(&self, a: WaveType, j: usize, x: [f64; 2], y: [f64; 2]) -> Result<SpectralEval> {
        check_column(j)?;
        let region = self.check_points(x, y)?;
        let free = self.free_term_jet(a, j, x, y, region)?;
        Ok(SpectralEval {
            value: free.value + self.inversion(a, j, x, y, region, Part::Tilde, [0, 0])?,
            grad: [
                free.grad[0] + self.inversion(a, j, x, y, region, Part::Tilde, [1, 0])?,
                free.grad[1] + self.inversion(a, j, x, y, region, Part::Tilde, [2, 0])?,
            ],
        })
    }

    /// The correction potential U_{a,j}(x,y) with its x-gradient.
    pub fn correction_u(&self, a: WaveType, j: usize, x: [f64; 2], y: [f64; 2]) -> Result<SpectralEval> {
        check_column(j)?;
        let region = self.check_points(x, y)?;
        Ok(SpectralEval {
            value: self.inversion(a, j, x, y, region, Part::Correction, [0, 0])?,
            grad: [
                self.inversion(a, j, x, y, region, Part::Correction, [1, 0])?,
                self.inversion(a, j, x, y, region, Part::Correction, [2, 0])?,
            ],
        })
    }

    /// The full scalar potential G_{a,j} = G̃_{a,j} + U_{a,j} with gradient
    /// and Hessian in x (one combined spectral pass per derivative).
    pub fn potential_jet(&self, a: WaveType, j: usize, x: [f64; 2], y: [f64; 2]) -> Result<SpectralJet> {
        check_column(j)?;
        let region = self.check_points(x, y)?;
        let mut out = self.free_term_jet(a, j, x, y, region)?;
        out.value += self.inversion(a, j, x, y, region, Part::Both, [0, 0])?;
        out.grad[0] += self.inversion(a, j, x, y, region, Part::Both, [1, 0])?;
        out.grad[1] += self.inversion(a, j, x, y, region, Part::Both, [2, 0])?;
        let h11 = self.inversion(a, j, x, y, region, Part::Both, [1, 1])?;
        let h12 = self.inversion(a, j, x, y, region, Part::Both, [1, 2])?;
        let h22 = self.inversion(a, j, x, y, region, Part::Both, [2, 2])?;
        out.hess[0][0] += h11;
        out.hess[0][1] += h12;
        out.hess[1][0] += h12;
        out.hess[1][1] += h22;
        Ok(out)
    }

    /// Column j of the Green's tensor together with its full x-gradient:
    /// G_j = −k_p⁻²∇G_{p,j} − k_s⁻²∇⊥G_{s,j} with k_a of x's side.
    pub fn column_jet(&self, j: usize, x: [f64; 2], y: [f64; 2]) -> Result<FieldJet> {
        let region = self.check_points(x, y)?;
        let gp = self.potential_jet(WaveType::P, j, x, y)?;
        let gs = self.potential_jet(WaveType::S, j, x, y)?;
        let kp2 = self.wn.kp(region.x_region).powi(2);
        let ks2 = self.wn.ks(region.x_region).powi(2);
        let mut jet = FieldJet { u: czvec(), grad: czmat(), dim: 2 };
        // (∇⊥f)₁ = ∂₂f, (∇⊥f)₂ = −∂₁f.
        jet.u[0] = -gp.grad[0] / kp2 - gs.grad[1] / ks2;
        jet.u[1] = -gp.grad[1] / kp2 + gs.grad[0] / ks2;
        for k in 0..2 {
            jet.grad[0][k] = -gp.hess[0][k] / kp2 - gs.hess[1][k] / ks2;
            jet.grad[1][k] = -gp.hess[1][k] / kp2 + gs.hess[0][k] / ks2;
        }
        Ok(jet)
    }

    /// The assembled 2×2 Green's matrix.
    pub fn assemble(&self, x: [f64; 2], y: [f64; 2]) -> Result<GreenMatrix> {
        let region = self.check_points(x, y)?;
        let mut entries = [[CZERO; 2]; 2];
        for j in 1..=2 {
            let gp = self.potential_jet(WaveType::P, j, x, y)?;
            let gs = self.potential_jet(WaveType::S, j, x, y)?;
            let kp2 = self.wn.kp(region.x_region).powi(2);
            let ks2 = self.wn.ks(region.x_region).powi(2);
            entries[0][j - 1] = -gp.grad[0] / kp2 - gs.grad[1] / ks2;
            entries[1][j - 1] = -gp.grad[1] / kp2 + gs.grad[0] / ks2;
        }
        Ok(GreenMatrix { entries, x, y, region })
    }

    /// Closed-form far-field pattern of the correction potential U_{a,j} in
    /// the direction θ (measured from the positive x₁-axis): upper half-plane
    /// directions θ ∈ (0,π) use k_{a,+}, lower ones θ ∈ (π,2π) use k_{a,−}.
    pub fn far_field(&self, a: WaveType, j: usize, theta: f64, y: [f64; 2]) -> Result<FarFieldPattern> {
        check_column(j)?;
        let st = theta.sin();
        if st.abs() < THETA_MIN {
            return Err(Error::GrazingDirection(theta));
        }
        let upper = st > 0.0;
        let k = self.wn.k(a, if upper { HalfSpace::Plus } else { HalfSpace::Minus });
        let pre = if upper {
            Complex64::from_polar(1.0, -PI / 4.0)
        } else {
            Complex64::from_polar(1.0, 3.0 * PI / 4.0)
        } * (k / (2.0 * PI)).sqrt();
        let ct = theta.cos();
        let xi0 = Complex64::new(k * ct, 0.0);
        let phase = (-Complex64::i() * k * y[0] * ct).exp();
        let coeff = self.coeff_ab(a, j, xi0, y[1])?;
        let dcoeff = self.coeff_ab_dy2(a, j, xi0, y[1])?;
        let value = pre * st * coeff * phase;
        Ok(FarFieldPattern {
            wave_type: a,
            column: j,
            theta,
            value,
            gradient_y: [
                -Complex64::i() * k * ct * value,
                pre * st * dcoeff * phase,
            ],
        })
    }

    /// Interface-transform data of the layered kernel G̃_{a,j}: the spectral
    /// free-space term Φ̂ = (1/2β)e^{−β|x₂−y₂|} plus the four-region
    /// correction kernels, traced onto the interface.  Returns (value at 0+,
    /// value at 0−, ∂₂ at 0+, ∂₂ at 0−).
    fn tilde_hat(
        &self,
        a: WaveType,
        j: usize,
        xi: Complex64,
        y2: f64,
    ) -> Result<(Complex64, Complex64, Complex64, Complex64)> {
        let ka_p = self.wn.k(a, HalfSpace::Plus);
        let ka_m = self.wn.k(a, HalfSpace::Minus);
        let ba_p = beta(xi, ka_p)?;
        let ba_m = beta(xi, ka_m)?;
        let (r, t) = refl_trans(ba_p, ba_m, ka_p, ka_m)?;
        let c = self.tilde_prefactor(a, j);
        let i = Complex64::i();
        let k1 = Self::is_xi_kernel(a, j);
        Ok(if y2 > 0.0 {
            let ef = (-ba_p * y2).exp();
            if k1 {
                (
                    c * i * xi / (2.0 * ba_p) * (1.0 + r) * ef,
                    c * i * xi / (2.0 * ba_p) * t * ef,
                    c * i * xi / 2.0 * (1.0 - r) * ef,
                    c * i * xi / (2.0 * ba_p) * t * ba_m * ef,
                )
            } else {
                (
                    c * 0.5 * (1.0 + r) * ef,
                    c * 0.5 * t * ef,
                    c * 0.5 * ba_p * (1.0 - r) * ef,
                    c * 0.5 * ba_m * t * ef,
                )
            }
        } else {
            let ef = (ba_m * y2).exp();
            if k1 {
                (
                    -c * i * xi / (2.0 * ba_m) * (t - 2.0) * ef,
                    c * i * xi / (2.0 * ba_m) * (1.0 - r) * ef,
                    c * i * xi / (2.0 * ba_m) * ba_p * (t - 2.0) * ef,
                    -c * i * xi / 2.0 * (1.0 + r) * ef,
                )
            } else {
                (
                    c * 0.5 * (t - 2.0) * ef,
                    c * 0.5 * (r - 1.0) * ef,
                    -c * 0.5 * ba_p * (t - 2.0) * ef,
                    c * 0.5 * ba_m * (1.0 + r) * ef,
                )
            }
        })
    }

    /// Substitute the closed-form interface coefficients back into the two
    /// Fourier-transformed interface equations at a real spectral node `xi`
    /// and source height `y2` (either sign), and return the worst scaled
    /// residual over both equations and both columns.  Away from the branch
    /// points this should vanish to near machine precision.
    pub fn jump_system_residual(&self, xi: Complex64, y2: f64) -> Result<f64> {
        let wn = &self.wn;
        let (cp_p, cp_m) = (wn.kp(HalfSpace::Plus).powi(-2), wn.kp(HalfSpace::Minus).powi(-2));
        let (cs_p, cs_m) = (wn.ks(HalfSpace::Plus).powi(-2), wn.ks(HalfSpace::Minus).powi(-2));
        let bpp = beta(xi, wn.kp(HalfSpace::Plus))?;
        let bpm = beta(xi, wn.kp(HalfSpace::Minus))?;
        let bsp = beta(xi, wn.ks(HalfSpace::Plus))?;
        let bsm = beta(xi, wn.ks(HalfSpace::Minus))?;
        let i = Complex64::i();
        let mut worst: f64 = 0.0;
        for j in [1, 2] {
            let ap = self.coeff_ab(WaveType::P, j, xi, y2)?;
            let asv = self.coeff_ab(WaveType::S, j, xi, y2)?;
            let (gp_p, gp_m, _, _) = self.tilde_hat(WaveType::P, j, xi, y2)?;
            let (gs_p, gs_m, _, _) = self.tilde_hat(WaveType::S, j, xi, y2)?;
            // Equation 1: [k_p⁻²∂₂Û_p − iξ k_s⁻²Û_s] = [iξ k_s⁻² ĝ̃_s].
            let lhs1 = cp_p * (-bpp) * ap - cp_m * bpm * ap - i * xi * (cs_p - cs_m) * asv;
            let rhs1 = i * xi * (cs_p * gs_p - cs_m * gs_m);
            // Equation 2: [iξ k_p⁻²Û_p + k_s⁻²∂₂Û_s] = −[iξ k_p⁻² ĝ̃_p].
            let lhs2 = i * xi * (cp_p - cp_m) * ap + cs_p * (-bsp) * asv - cs_m * bsm * asv;
            let rhs2 = -i * xi * (cp_p * gp_p - cp_m * gp_m);
            let scale = 1.0 + ap.norm().max(asv.norm());
            worst = worst.max((lhs1 - rhs1).norm() / scale).max((lhs2 - rhs2).norm() / scale);
        }
        Ok(worst)
    }
}

fn check_column(j: usize) -> Result<()> {
    if j == 1 || j == 2 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("column must be 1 or 2, got {j}")))
    }
}
