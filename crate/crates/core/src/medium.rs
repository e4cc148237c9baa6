//! Physical parameters of the two-layered medium and the scalar spectral
//! building blocks shared by the 2D and 3D Green's tensors.
//!
//! The medium consists of two homogeneous isotropic half-spaces with common
//! Lamé constants (λ, μ) and densities ρ₊ (above the flat interface) and ρ₋
//! (below).  Each half-space carries a compressional and a shear wavenumber
//!
//! ```text
//! k_{p,±}² = ρ± ω² / (2μ+λ),      k_{s,±}² = ρ± ω² / μ .
//! ```
//!
//! The spectral representation of the tensor is written in terms of the
//! vertical wavenumbers β(ξ) = √(ξ²−k²) on a branch where outgoing waves decay,
//! and of the reflection/transmission pair (R, T) of the flat interface.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

fn default_a0() -> f64 {
    1.0
}

/// Upper (+) or lower (−) half-space selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfSpace {
    Plus,
    Minus,
}

impl HalfSpace {
    /// Half-space containing a point with vertical coordinate `v` (the
    /// interface itself is attributed to the upper side).
    pub fn of(v: f64) -> Self {
        if v >= 0.0 {
            HalfSpace::Plus
        } else {
            HalfSpace::Minus
        }
    }
}

/// Two homogeneous elastic half-spaces joined along a flat interface.
///
/// `a0` is the transmission coefficient of the interface condition; the whole
/// spectral machinery requires the natural value `a0 = 1` and validation
/// rejects anything else.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElasticMedium {
    pub lambda: f64,
    pub mu: f64,
    pub rho_plus: f64,
    pub rho_minus: f64,
    pub omega: f64,
    pub dim: usize,
    #[serde(default = "default_a0")]
    pub a0: f64,
}

impl ElasticMedium {
    pub fn new(lambda: f64, mu: f64, rho_plus: f64, rho_minus: f64, omega: f64, dim: usize) -> Result<Self> {
        let m = ElasticMedium { lambda, mu, rho_plus, rho_minus, omega, dim, a0: 1.0 };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dim == 2 || self.dim == 3) {
            return Err(Error::InvalidMedium(format!("dim must be 2 or 3, got {}", self.dim)));
        }
        if !(self.mu > 0.0) {
            return Err(Error::InvalidMedium(format!("mu must be positive, got {}", self.mu)));
        }
        if !(self.dim as f64 * self.lambda + 2.0 * self.mu > 0.0) {
            return Err(Error::InvalidMedium(format!(
                "need dim*lambda + 2*mu > 0, got {}",
                self.dim as f64 * self.lambda + 2.0 * self.mu
            )));
        }
        if !(self.rho_plus > 0.0 && self.rho_minus > 0.0) {
            return Err(Error::InvalidMedium("densities must be positive".into()));
        }
        if !(self.omega > 0.0) {
            return Err(Error::InvalidMedium("omega must be positive".into()));
        }
        if self.a0 != 1.0 {
            return Err(Error::InvalidMedium(format!(
                "transmission coefficient a0 must be 1 (got {}); the spectral formulas assume it",
                self.a0
            )));
        }
        Ok(())
    }

    pub fn rho(&self, side: HalfSpace) -> f64 {
        match side {
            HalfSpace::Plus => self.rho_plus,
            HalfSpace::Minus => self.rho_minus,
        }
    }

    /// The four wavenumbers of the medium.
    pub fn wavenumbers(&self) -> Result<Wavenumbers> {
        self.validate()?;
        let cp = 2.0 * self.mu + self.lambda;
        Ok(Wavenumbers {
            kp_plus: (self.rho_plus * self.omega * self.omega / cp).sqrt(),
            ks_plus: (self.rho_plus * self.omega * self.omega / self.mu).sqrt(),
            kp_minus: (self.rho_minus * self.omega * self.omega / cp).sqrt(),
            ks_minus: (self.rho_minus * self.omega * self.omega / self.mu).sqrt(),
        })
    }
}

/// Compressional (p) and shear (s) wavenumbers of both half-spaces.
#[derive(Debug, Clone, Copy)]
pub struct Wavenumbers {
    pub kp_plus: f64,
    pub ks_plus: f64,
    pub kp_minus: f64,
    pub ks_minus: f64,
}

/// Wave-type selector for the scalar potentials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveType {
    P,
    S,
}

impl Wavenumbers {
    pub fn kp(&self, side: HalfSpace) -> f64 {
        match side {
            HalfSpace::Plus => self.kp_plus,
            HalfSpace::Minus => self.kp_minus,
        }
    }

    pub fn ks(&self, side: HalfSpace) -> f64 {
        match side {
            HalfSpace::Plus => self.ks_plus,
            HalfSpace::Minus => self.ks_minus,
        }
    }

    pub fn k(&self, a: WaveType, side: HalfSpace) -> f64 {
        match a {
            WaveType::P => self.kp(side),
            WaveType::S => self.ks(side),
        }
    }

    /// Smallest of the four wavenumbers (sets indentation radii).
    pub fn k_min(&self) -> f64 {
        self.kp_plus.min(self.ks_plus).min(self.kp_minus).min(self.ks_minus)
    }

    /// Largest of the four wavenumbers (sets truncation / sampling scales).
    pub fn k_max(&self) -> f64 {
        self.kp_plus.max(self.ks_plus).max(self.kp_minus).max(self.ks_minus)
    }

    /// The four branch-point magnitudes, deduplicated within a relative tolerance
    /// and sorted ascending.
    pub fn branch_points(&self) -> Vec<f64> {
        let mut ks = vec![self.kp_plus, self.ks_plus, self.kp_minus, self.ks_minus];
        ks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut out: Vec<f64> = Vec::new();
        for k in ks {
            if out.last().map_or(true, |&l| k - l > 1e-12 * k) {
                out.push(k);
            }
        }
        out
    }
}

/// Weights (μ̃, λ̃) of the generalized stress operator, constrained by
/// μ̃ + λ̃ = μ + λ.
#[derive(Debug, Clone, Copy)]
pub struct StressWeights {
    pub mu_tilde: f64,
    pub lambda_tilde: f64,
}

impl StressWeights {
    /// Physical traction: μ̃ = μ, λ̃ = λ.
    pub fn physical(m: &ElasticMedium) -> Self {
        StressWeights { mu_tilde: m.mu, lambda_tilde: m.lambda }
    }

    /// The special choice μ̃ = μ(λ+μ)/(λ+3μ), λ̃ = (λ+μ)(λ+2μ)/(λ+3μ) that
    /// makes the double-layer kernel of the scattering solver weakly singular.
    pub fn pseudo(m: &ElasticMedium) -> Self {
        let d = m.lambda + 3.0 * m.mu;
        StressWeights {
            mu_tilde: m.mu * (m.lambda + m.mu) / d,
            lambda_tilde: (m.lambda + m.mu) * (m.lambda + 2.0 * m.mu) / d,
        }
    }

    /// Any other admissible pair, specified by μ̃ (λ̃ is then determined).
    pub fn with_mu_tilde(m: &ElasticMedium, mu_tilde: f64) -> Self {
        StressWeights { mu_tilde, lambda_tilde: m.mu + m.lambda - mu_tilde }
    }
}

/// Relative branch-cut clearance below which `beta` refuses to evaluate.
pub const EPS_CUT: f64 = 1e-12;

/// Vertical spectral wavenumber β(ξ) = √(ξ²−k²) on the physical sheet.
///
/// Computed as the product of roots √(ξ−k)·√(ξ+k) with the argument ranges
/// −3π/2 ≤ arg(ξ−k) < π/2 and −π/2 ≤ arg(ξ+k) < 3π/2, which puts the cuts on
/// the vertical rays upward from +k and downward from −k.  On the real axis
/// this gives β = √(ξ²−k²) ≥ 0 for |ξ| ≥ k and β = −i√(k²−ξ²) for |ξ| < k.
///
/// (A "principal √(ξ²−k²) with sign fix-up" shortcut is *not* equivalent: the
/// principal root has its own cut along {ξ²−k² < 0}, i.e. across the whole
/// imaginary axis and the segment (−k,k), and picks the wrong sign just above
/// the real segment (0,k) — exactly where the Hankel-transform path passes.)
pub fn beta(xi: Complex64, k: f64) -> Result<Complex64> {
    let eps = EPS_CUT * k;
    // Distance to the cut {k + it : t ≥ 0}.
    let d_up = if xi.im <= 0.0 { (xi - k).norm() } else { (xi.re - k).abs() };
    // Distance to the cut {−k − it : t ≥ 0}.
    let d_dn = if xi.im >= 0.0 { (xi + k).norm() } else { (xi.re + k).abs() };
    let dist = d_up.min(d_dn);
    // The branch points ±k themselves are regular for β (β = 0 continuously);
    // only the open cuts away from them are rejected.
    let at_branch_point = (xi - k).norm() <= 2.0 * eps || (xi + k).norm() <= 2.0 * eps;
    if dist < eps && !at_branch_point {
        return Err(Error::BranchCut { xi, dist, eps });
    }
    // Normalize −0.0 imaginary parts so real inputs sit on arg = 0 / π.
    let xi = Complex64::new(xi.re, xi.im + 0.0);
    let zm = xi - k;
    let mut am = zm.arg();
    if am >= std::f64::consts::FRAC_PI_2 {
        am -= 2.0 * std::f64::consts::PI;
    }
    let zp = xi + k;
    let mut ap = zp.arg();
    if ap < -std::f64::consts::FRAC_PI_2 {
        ap += 2.0 * std::f64::consts::PI;
    }
    Ok(Complex64::from_polar((zm.norm() * zp.norm()).sqrt(), 0.5 * (am + ap)))
}

/// Spectral reflection/transmission pair of the flat interface for one wave
/// type:
///
/// ```text
/// R = (k_p⁻²β_p − k_m⁻²β_m) / (k_p⁻²β_p + k_m⁻²β_m),
/// T = 2 k_p⁻²β_p          / (k_p⁻²β_p + k_m⁻²β_m),
/// ```
///
/// so that T − R = 1 identically.
pub fn refl_trans(beta_p: Complex64, beta_m: Complex64, k_p: f64, k_m: f64) -> Result<(Complex64, Complex64)> {
    let wp = beta_p / (k_p * k_p);
    let wm = beta_m / (k_m * k_m);
    let den = wp + wm;
    let scale = wp.norm().max(wm.norm()).max(1e-300);
    if den.norm() < 1e-14 * scale {
        return Err(Error::DegenerateDenominator(beta_p, beta_m));
    }
    Ok(((wp - wm) / den, 2.0 * wp / den))
}

/// The density contrast C₀ = 1/(ρ₊ω²) − 1/(ρ₋ω²) and the spectral determinant
///
/// ```text
/// D(ξ) = −(k_{p,+}⁻²β_{p,+} + k_{p,−}⁻²β_{p,−})(k_{s,+}⁻²β_{s,+} + k_{s,−}⁻²β_{s,−})
///        + (k_{p,+}⁻² − k_{p,−}⁻²)(k_{s,+}⁻² − k_{s,−}⁻²) ξ²
/// ```
///
/// of the interface system, which has no real zeros.
pub fn spectral_constants(m: &ElasticMedium, xi: Complex64) -> Result<(f64, Complex64)> {
    let w2 = m.omega * m.omega;
    let c0 = 1.0 / (m.rho_plus * w2) - 1.0 / (m.rho_minus * w2);
    let wn = m.wavenumbers()?;
    let (kpp, ksp, kpm, ksm) = (wn.kp_plus, wn.ks_plus, wn.kp_minus, wn.ks_minus);
    let bpp = beta(xi, kpp)?;
    let bsp = beta(xi, ksp)?;
    let bpm = beta(xi, kpm)?;
    let bsm = beta(xi, ksm)?;
    let p_sum = bpp / (kpp * kpp) + bpm / (kpm * kpm);
    let s_sum = bsp / (ksp * ksp) + bsm / (ksm * ksm);
    let p_dif = 1.0 / (kpp * kpp) - 1.0 / (kpm * kpm);
    let s_dif = 1.0 / (ksp * ksp) - 1.0 / (ksm * ksm);
    let d = -p_sum * s_sum + p_dif * s_dif * xi * xi;
    Ok((c0, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn medium(rho_p: f64, rho_m: f64) -> ElasticMedium {
        ElasticMedium::new(2.0, 1.0, rho_p, rho_m, 1.0, 2).unwrap()
    }

    #[test]
    fn wavenumbers_match_hand_values() {
        // λ=2, μ=1, ρ±=4, ω=1: kp² = 4/4 = 1, ks² = 4/1 = 4.
        let wn = medium(4.0, 4.0).wavenumbers().unwrap();
        assert_abs_diff_eq!(wn.kp_plus, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(wn.ks_plus, 2.0, epsilon = 1e-15);

        // λ=1, μ=1, ρ±=1, ω=1: kp = 1/√3, ks = 1.
        let wn = ElasticMedium::new(1.0, 1.0, 1.0, 1.0, 1.0, 2).unwrap().wavenumbers().unwrap();
        assert_abs_diff_eq!(wn.kp_minus, 1.0 / 3.0_f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(wn.ks_minus, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn wavenumbers_scale_linearly_in_omega() {
        let mut m = medium(4.0, 2.5);
        let wn1 = m.wavenumbers().unwrap();
        m.omega = 2.0;
        let wn2 = m.wavenumbers().unwrap();
        assert_abs_diff_eq!(wn2.kp_plus, 2.0 * wn1.kp_plus, epsilon = 1e-14);
        assert_abs_diff_eq!(wn2.ks_plus, 2.0 * wn1.ks_plus, epsilon = 1e-14);
        assert_abs_diff_eq!(wn2.kp_minus, 2.0 * wn1.kp_minus, epsilon = 1e-14);
        assert_abs_diff_eq!(wn2.ks_minus, 2.0 * wn1.ks_minus, epsilon = 1e-14);
    }

    #[test]
    fn shear_to_compressional_ratio_is_fixed_by_lame_constants() {
        for (l, mu) in [(2.0, 1.0), (1.0, 3.0), (0.5, 0.25)] {
            let m = ElasticMedium::new(l, mu, 1.7, 0.9, 1.3, 3).unwrap();
            let wn = m.wavenumbers().unwrap();
            let ratio = ((2.0 * mu + l) / mu).sqrt();
            assert_abs_diff_eq!(wn.ks_plus / wn.kp_plus, ratio, epsilon = 1e-13);
            assert_abs_diff_eq!(wn.ks_minus / wn.kp_minus, ratio, epsilon = 1e-13);
        }
    }

    #[test]
    fn invalid_media_are_rejected() {
        assert!(ElasticMedium::new(2.0, -1.0, 1.0, 1.0, 1.0, 2).is_err());
        assert!(ElasticMedium::new(-2.0, 1.0, 1.0, 1.0, 1.0, 2).is_err()); // 2λ+2μ = −2
        assert!(ElasticMedium::new(2.0, 1.0, -1.0, 1.0, 1.0, 2).is_err());
        assert!(ElasticMedium::new(2.0, 1.0, 1.0, 1.0, 0.0, 2).is_err());
        assert!(ElasticMedium::new(2.0, 1.0, 1.0, 1.0, 1.0, 4).is_err());
        let mut m = medium(1.0, 1.0);
        m.a0 = 0.5;
        assert!(m.validate().is_err());
    }

    #[test]
    fn beta_on_the_real_axis() {
        // |ξ| < k: β = −i√(k²−ξ²).
        let b = beta(Complex64::new(0.0, 0.0), 1.0).unwrap();
        assert_abs_diff_eq!(b.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.im, -1.0, epsilon = 1e-15);
        // |ξ| ≥ k: β = √(ξ²−k²) ≥ 0.
        let b = beta(Complex64::new(2.0, 0.0), 1.0).unwrap();
        assert_abs_diff_eq!(b.re, 3.0_f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(b.im, 0.0, epsilon = 1e-15);
        // Branch point.
        let b = beta(Complex64::new(1.0, 0.0), 1.0).unwrap();
        assert_abs_diff_eq!(b.norm(), 0.0, epsilon = 1e-15);
    }

    /// Oracle: β as the product of principal-range square roots
    /// √(ξ−k)·√(ξ+k) with −3π/2 ≤ arg(ξ−k) < π/2 and −π/2 ≤ arg(ξ+k) < 3π/2.
    fn beta_two_factor(xi: Complex64, k: f64) -> Complex64 {
        // sqrt with arg in [−3π/2, π/2): principal arg in (−π, π]; values with
        // arg in (π/2, π] must be mapped down by 2π before halving.
        let zm = xi - k;
        let am = {
            let a = zm.arg();
            if a > std::f64::consts::FRAC_PI_2 { a - 2.0 * std::f64::consts::PI } else { a }
        };
        let rm = zm.norm().sqrt() * Complex64::from_polar(1.0, 0.5 * am);
        // sqrt with arg in [−π/2, 3π/2): values with arg in (−π, −π/2) mapped up.
        let zp = xi + k;
        let ap = {
            let a = zp.arg();
            if a < -std::f64::consts::FRAC_PI_2 { a + 2.0 * std::f64::consts::PI } else { a }
        };
        let rp = zp.norm().sqrt() * Complex64::from_polar(1.0, 0.5 * ap);
        rm * rp
    }

    #[test]
    fn beta_matches_two_factor_oracle() {
        // Just right of the upward cut the one-sided limit has Re > 0 and both
        // constructions agree (the cut itself is rejected, see
        // beta_rejects_points_on_the_cuts).
        let xi = Complex64::new(1.0 + 1e-9, 0.5);
        let b = beta(xi, 1.0).unwrap();
        let o = beta_two_factor(xi, 1.0);
        assert!(b.re > 0.0);
        assert!((b - o).norm() < 1e-12, "{b} vs {o}");

        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..2000 {
            let k = rng.gen_range(0.2..4.0);
            let xi = Complex64::new(rng.gen_range(-6.0..6.0), rng.gen_range(-3.0..3.0));
            // Stay off the cuts (vertical rays from ±k).
            if (xi.re - k).abs() < 1e-3 && xi.im > -1e-3 {
                continue;
            }
            if (xi.re + k).abs() < 1e-3 && xi.im < 1e-3 {
                continue;
            }
            let b = beta(xi, k).unwrap();
            let o = beta_two_factor(xi, k);
            assert!((b - o).norm() < 1e-12 * (1.0 + o.norm()), "xi={xi} k={k}: {b} vs {o}");
        }
    }

    #[test]
    fn beta_is_even_with_signed_parts_on_the_real_axis() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let k = rng.gen_range(0.2..4.0);
            let xi: f64 = rng.gen_range(-8.0..8.0);
            if (xi.abs() - k).abs() < 1e-6 {
                continue;
            }
            let b = beta(Complex64::new(xi, 0.0), k).unwrap();
            let bneg = beta(Complex64::new(-xi, 0.0), k).unwrap();
            assert!((b - bneg).norm() < 1e-13 * (1.0 + b.norm()));
            assert!(b.re >= 0.0 && b.im <= 0.0);
        }
    }

    #[test]
    fn beta_rejects_points_on_the_cuts() {
        assert!(matches!(beta(Complex64::new(1.0, 0.5), 1.0), Err(Error::BranchCut { .. })));
        assert!(matches!(beta(Complex64::new(-1.0, -2.0), 1.0), Err(Error::BranchCut { .. })));
        // Just off the cut is fine, and so is the branch point itself.
        assert!(beta(Complex64::new(1.001, 1.0), 1.0).is_ok());
        assert!(beta(Complex64::new(1.0, 0.0), 1.0).is_ok());
    }

    #[test]
    fn refl_trans_hand_values() {
        // Identical media: R = 0, T = 1.
        let b = Complex64::new(0.0, -1.0);
        let (r, t) = refl_trans(b, b, 1.0, 1.0).unwrap();
        assert!((r).norm() < 1e-15 && (t - 1.0).norm() < 1e-15);

        // k_p=1, k_m=2 at ξ=0: β_p=−i, β_m=−2i; R = (−i+i/2)/(−i−i/2) = 1/3,
        // T = −2i/(−3i/2) = 4/3.
        let (r, t) = refl_trans(Complex64::new(0.0, -1.0), Complex64::new(0.0, -2.0), 1.0, 2.0).unwrap();
        assert!((r - 1.0 / 3.0).norm() < 1e-15, "{r}");
        assert!((t - 4.0 / 3.0).norm() < 1e-15, "{t}");
    }

    #[test]
    fn transmission_minus_reflection_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..10_000 {
            let kp = rng.gen_range(0.2..4.0);
            let km = rng.gen_range(0.2..4.0);
            let xi: f64 = rng.gen_range(-8.0..8.0);
            if (xi.abs() - kp).abs() < 1e-6 || (xi.abs() - km).abs() < 1e-6 {
                continue;
            }
            let bp = beta(Complex64::new(xi, 0.0), kp).unwrap();
            let bm = beta(Complex64::new(xi, 0.0), km).unwrap();
            let (r, t) = refl_trans(bp, bm, kp, km).unwrap();
            assert!((t - r - 1.0).norm() < 1e-14, "kp={kp} km={km} xi={xi}");
        }
    }

    #[test]
    fn spectral_constants_degenerate_and_scan() {
        // Equal densities: C₀ = 0 and D = −(2kp⁻²βp)(2ks⁻²βs).
        let m = medium(4.0, 4.0);
        let wn = m.wavenumbers().unwrap();
        let xi = Complex64::new(0.7, 0.0);
        let (c0, d) = spectral_constants(&m, xi).unwrap();
        assert_abs_diff_eq!(c0, 0.0, epsilon = 1e-16);
        let bp = beta(xi, wn.kp_plus).unwrap();
        let bs = beta(xi, wn.ks_plus).unwrap();
        let expect = -(2.0 * bp / (wn.kp_plus * wn.kp_plus)) * (2.0 * bs / (wn.ks_plus * wn.ks_plus));
        assert!((d - expect).norm() < 1e-14);

        // D is even and has no real zeros: scan a representative contrast.
        let m = medium(4.0, 1.0);
        let wn = m.wavenumbers().unwrap();
        let lim = 3.0 * wn.ks_plus.max(wn.ks_minus);
        let mut min_abs = f64::INFINITY;
        let n = 100_000;
        for i in 0..=n {
            let xi = -lim + 2.0 * lim * (i as f64) / (n as f64);
            let xic = Complex64::new(xi, 0.0);
            if wn.branch_points().iter().any(|&k| (xi.abs() - k).abs() < 1e-7) {
                continue;
            }
            let (_, d) = spectral_constants(&m, xic).unwrap();
            let (_, dneg) = spectral_constants(&m, -xic).unwrap();
            assert!((d - dneg).norm() < 1e-13 * (1.0 + d.norm()));
            min_abs = min_abs.min(d.norm());
        }
        assert!(min_abs > 1e-3, "determinant margin {min_abs:.3e} suspiciously small");
    }

    #[test]
    fn medium_json_round_trip_with_default_a0() {
        let text = r#"{"lambda":2.0,"mu":1.0,"rho_plus":4.0,"rho_minus":1.0,"omega":1.0,"dim":2}"#;
        let m: ElasticMedium = serde_json::from_str(text).unwrap();
        assert_eq!(m.a0, 1.0);
        m.validate().unwrap();
        let back = serde_json::to_string(&m).unwrap();
        let m2: ElasticMedium = serde_json::from_str(&back).unwrap();
        assert_eq!(m2.dim, 2);
        assert_eq!(m2.rho_plus, 4.0);
    }

    #[test]
    fn pseudo_weights_satisfy_the_constraint() {
        for (l, mu) in [(2.0, 1.0), (1.0, 3.0), (0.5, 0.25)] {
            let m = ElasticMedium::new(l, mu, 1.0, 2.0, 1.0, 2).unwrap();
            let w = StressWeights::pseudo(&m);
            assert_abs_diff_eq!(w.mu_tilde + w.lambda_tilde, mu + l, epsilon = 1e-13);
            let w = StressWeights::physical(&m);
            assert_abs_diff_eq!(w.mu_tilde + w.lambda_tilde, mu + l, epsilon = 1e-16);
        }
    }
}
