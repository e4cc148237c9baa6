//! The 3D two-layered Green's tensor for the Navier equation with a flat
//! density interface at x₃ = 0.
//!
//! Each tensor column is assembled from one scalar and one vector Helmholtz
//! potential,
//!
//! ```text
//! G_j = −k_p⁻² ∇_x G_{p,j} + k_s⁻² curl_x G_{s,j},   j = 1, 2, 3,
//! ```
//!
//! where `G_{p,j} = G̃_{p,j} + U_{p,j}` and `G_{s,j} = G̃_{s,j} + U_{s,j}`.
//! The auxiliary parts G̃ carry the free-space singularity plus two-layer
//! reflection/transmission kernels that match only the decoupled interface
//! jumps; the corrections U restore the coupled jump conditions.  All layered
//! parts are planar Fourier integrals over ζ = (ζ₁, ζ₂) whose integrands are
//! radial functions of |ζ| times a monomial ζ₁^a ζ₂^b; each such integral is
//! collapsed to a 1D Hankel-contour integral, with the monomial turning into a
//! Bessel order and a trigonometric factor of the observation azimuth.
//! In-plane x-derivatives multiply the integrand by iζ₁ or iζ₂ (shifting the
//! monomial); ∂₃ multiplies by ∓β of the evaluation side.
//!
//! Two of the interface coefficient constants admit two transcription
//! variants ([`Transcription`]); construction-time verification against the
//! Fourier-transformed interface conditions selects the corrected one, which
//! all field evaluations use.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::elastic_fields::{phi_derivs, CZERO};
use crate::green2d::{CoeffTerm, RegionTag};
use crate::medium::{beta, refl_trans, spectral_constants, ElasticMedium, HalfSpace, WaveType, Wavenumbers};
use crate::quadrature::{QuadConfig, SpectralIntegrator};
use crate::{Error, Result};

/// Minimum separation |x−y| in wavelengths of the shortest wave.
const MIN_SEPARATION_WAVELENGTHS: f64 = 1e-6;
/// Grazing-angle guard for far fields.
const THETA_MIN: f64 = 1e-3;

/// Coefficient family of the layered spectral kernels: `AP`/`BP` and
/// `AS`/`BS` (with the hatted companions) belong to the auxiliary potentials
/// with the source above/below the interface; `RP`/`TP` and `RS`/`TS` are the
/// correction kernels for source above/below.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    AP,
    BP,
    AS,
    BS,
    HatAS,
    HatBS,
    RP,
    TP,
    RS,
    TS,
}

impl Family {
    /// Which wave family's vertical exponentials carry the kernel in x₃.
    pub fn wave(&self) -> WaveType {
        match self {
            Family::AP | Family::BP | Family::RP | Family::TP => WaveType::P,
            _ => WaveType::S,
        }
    }
}

/// Superscript ± tag selecting the evaluation side of a sided coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideTag {
    None,
    Plus,
    Minus,
}

/// Vector-component tag `(l)` of the shear coefficient families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompTag {
    None,
    C1,
    C2,
    C3,
}

/// One spectral interface coefficient of the 3D tensor, identified the same
/// way the closed-form lists are indexed: family, column j, side tag, and
/// vector component tag.  Only the printed combinations are valid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coeff3DKey {
    pub family: Family,
    pub column: usize,
    pub side: SideTag,
    pub comp: CompTag,
}

impl Coeff3DKey {
    pub fn new(family: Family, column: usize, side: SideTag, comp: CompTag) -> Result<Self> {
        let key = Coeff3DKey { family, column, side, comp };
        key.validate()?;
        Ok(key)
    }

    pub fn validate(&self) -> Result<()> {
        use CompTag as C;
        use Family as F;
        use SideTag as S;
        let ok = match (self.family, self.column, self.comp, self.side) {
            (F::AP | F::BP, 1..=3, C::None, S::Plus | S::Minus) => true,
            (F::AS | F::BS, 1, C::C1, S::None) => true,
            (F::AS | F::BS, 1, C::C2 | C::C3, S::Plus | S::Minus) => true,
            (F::AS | F::BS, 2, C::C1 | C::C3, S::Plus | S::Minus) => true,
            (F::AS | F::BS, 2, C::C2, S::None) => true,
            (F::AS | F::BS, 3, C::C1 | C::C2, S::Plus | S::Minus) => true,
            (F::HatAS | F::HatBS, 1, C::C2, S::None) => true,
            (F::HatAS | F::HatBS, 2, C::C1, S::None) => true,
            (F::RP | F::TP, 1..=3, C::None, S::None) => true,
            (F::RS | F::TS, 1..=3, C::C1 | C::C2, S::None) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidKey(format!("{self:?}")))
        }
    }
}

/// Transcription variant of the two coefficient constants whose closed forms
/// admit two readings (a sign in one y₃-exponent and a misplaced parenthesis).
/// `Corrected` is the variant that satisfies the transformed interface
/// conditions to near machine precision and is used by all field evaluations;
/// `Printed` is retained so the selection stays checkable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transcription {
    Printed,
    Corrected,
}

/// Trigonometric flavour of one angular-reduction row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Harmonic {
    Cos,
    Sin,
}

/// One Bessel-order row of the angular reduction of a spectral monomial:
/// the planar integral of `f(|ζ|²)·ζ₁^a ζ₂^b · e^{iζ·d}` contributes
/// `coef · i^order · trig(order·α) · (1/4π)∫_𝒞 f·ξ^{a+b}·H_order(ξρ)·ξ dξ`
/// per row, with d = ρ(cos α, sin α).
#[derive(Debug, Clone, Copy)]
pub struct AngularFactor {
    pub order: usize,
    pub harmonic: Harmonic,
    pub coef: f64,
}

const fn af(order: usize, harmonic: Harmonic, coef: f64) -> AngularFactor {
    AngularFactor { order, harmonic, coef }
}

/// The in-plane spectral monomial ζ₁^a ζ₂^b, degree ≤ 3 (degree ≤ 2 occurs in
/// the kernels themselves, degree 3 after one in-plane derivative).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Monomial {
    a: u8,
    b: u8,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { a: 0, b: 0 };
    pub const Z1: Monomial = Monomial { a: 1, b: 0 };
    pub const Z2: Monomial = Monomial { a: 0, b: 1 };
    pub const Z1Z2: Monomial = Monomial { a: 1, b: 1 };
    pub const Z1SQ: Monomial = Monomial { a: 2, b: 0 };
    pub const Z2SQ: Monomial = Monomial { a: 0, b: 2 };

    pub fn new(a: u8, b: u8) -> Result<Self> {
        if a + b > 3 {
            return Err(Error::Domain(format!("monomial degree {} exceeds 3", a + b)));
        }
        Ok(Monomial { a, b })
    }

    pub fn degree(&self) -> usize {
        (self.a + self.b) as usize
    }

    /// Multiply by ζ_axis (axis 0 or 1), as produced by an in-plane derivative.
    pub fn bump(&self, axis: usize) -> Result<Monomial> {
        match axis {
            0 => Monomial::new(self.a + 1, self.b),
            1 => Monomial::new(self.a, self.b + 1),
            _ => Err(Error::Domain(format!("monomial axis {axis} out of range"))),
        }
    }

    pub fn eval(&self, z: [f64; 2]) -> f64 {
        z[0].powi(self.a as i32) * z[1].powi(self.b as i32)
    }

    /// The Fourier expansion of cos^a γ · sin^b γ in harmonics of γ, which is
    /// exactly the list of Bessel orders and azimuth factors of the reduced
    /// 1D integral.
    pub fn rows(&self) -> &'static [AngularFactor] {
        const R00: [AngularFactor; 1] = [af(0, Harmonic::Cos, 1.0)];
        const R10: [AngularFactor; 1] = [af(1, Harmonic::Cos, 1.0)];
        const R01: [AngularFactor; 1] = [af(1, Harmonic::Sin, 1.0)];
        const R11: [AngularFactor; 1] = [af(2, Harmonic::Sin, 0.5)];
        const R20: [AngularFactor; 2] = [af(0, Harmonic::Cos, 0.5), af(2, Harmonic::Cos, 0.5)];
        const R02: [AngularFactor; 2] = [af(0, Harmonic::Cos, 0.5), af(2, Harmonic::Cos, -0.5)];
        const R30: [AngularFactor; 2] = [af(1, Harmonic::Cos, 0.75), af(3, Harmonic::Cos, 0.25)];
        const R03: [AngularFactor; 2] = [af(1, Harmonic::Sin, 0.75), af(3, Harmonic::Sin, -0.25)];
        const R21: [AngularFactor; 2] = [af(1, Harmonic::Sin, 0.25), af(3, Harmonic::Sin, 0.25)];
        const R12: [AngularFactor; 2] = [af(1, Harmonic::Cos, 0.25), af(3, Harmonic::Cos, -0.25)];
        match (self.a, self.b) {
            (0, 0) => &R00,
            (1, 0) => &R10,
            (0, 1) => &R01,
            (1, 1) => &R11,
            (2, 0) => &R20,
            (0, 2) => &R02,
            (3, 0) => &R30,
            (0, 3) => &R03,
            (2, 1) => &R21,
            (1, 2) => &R12,
            _ => unreachable!("constructor bounds degree"),
        }
    }
}

/// One of the twelve scalar potentials of the 3D tensor: `P(j)` is the
/// compressional potential of column j, `S(j, l)` is component l of the shear
/// potential of column j.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Potential3d {
    P(usize),
    S(usize, usize),
}

impl Potential3d {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Potential3d::P(j) => (1..=3).contains(&j),
            Potential3d::S(j, l) => (1..=3).contains(&j) && (1..=3).contains(&l),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("potential index out of range: {self:?}")))
        }
    }

    pub fn wave(&self) -> WaveType {
        match self {
            Potential3d::P(_) => WaveType::P,
            Potential3d::S(..) => WaveType::S,
        }
    }
}

/// A scalar spectral quantity with its x-gradient.
#[derive(Debug, Clone, Copy)]
pub struct SpectralEval3 {
    pub value: Complex64,
    pub grad: [Complex64; 3],
}

/// The assembled 3×3 Green's matrix at one point pair.
#[derive(Debug, Clone)]
pub struct GreenMatrix3 {
    pub entries: [[Complex64; 3]; 3],
    pub x: [f64; 3],
    pub y: [f64; 3],
    pub region: RegionTag,
}

/// One far-field pattern value F∞ with its source gradient.
#[derive(Debug, Clone)]
pub struct FarField3 {
    pub theta: f64,
    pub phi: f64,
    pub value: Complex64,
    pub gradient_y: [Complex64; 3],
}

#[derive(Clone, Copy)]
enum Part {
    Tilde,
    Correction,
    Both,
}

/// Spectral building blocks at one node ξ.
struct Spec {
    bpp: Complex64,
    bpm: Complex64,
    bsp: Complex64,
    bsm: Complex64,
    cpp: f64,
    cpm: f64,
    csp: f64,
    csm: f64,
    /// Σ k_p⁻²β_p and Σ k_s⁻²β_s over the two sides.
    sum_p: Complex64,
    sum_s: Complex64,
    rp: Complex64,
    tp: Complex64,
    rs: Complex64,
    ts: Complex64,
    c0: f64,
    d: Complex64,
}

pub struct Green3d {
    m: ElasticMedium,
    wn: Wavenumbers,
    integ: SpectralIntegrator,
    tol: f64,
}

impl Green3d {
    pub fn new(m: ElasticMedium, quad: QuadConfig) -> Result<Self> {
        if m.dim != 3 {
            return Err(Error::InvalidInput(format!("Green3d needs dim 3, got {}", m.dim)));
        }
        let wn = m.wavenumbers()?;
        let tol = quad.tol;
        let integ = SpectralIntegrator::new(&wn.branch_points(), quad)?;
        Ok(Green3d { m, wn, integ, tol })
    }

    pub fn medium(&self) -> &ElasticMedium {
        &self.m
    }

    pub fn wavenumbers(&self) -> &Wavenumbers {
        &self.wn
    }

    fn spec(&self, xi: Complex64) -> Result<Spec> {
        let wn = &self.wn;
        let (kpp, kpm) = (wn.kp(HalfSpace::Plus), wn.kp(HalfSpace::Minus));
        let (ksp, ksm) = (wn.ks(HalfSpace::Plus), wn.ks(HalfSpace::Minus));
        let bpp = beta(xi, kpp)?;
        let bpm = beta(xi, kpm)?;
        let bsp = beta(xi, ksp)?;
        let bsm = beta(xi, ksm)?;
        let (cpp, cpm) = (kpp.powi(-2), kpm.powi(-2));
        let (csp, csm) = (ksp.powi(-2), ksm.powi(-2));
        let (rp, tp) = refl_trans(bpp, bpm, kpp, kpm)?;
        let (rs, ts) = refl_trans(bsp, bsm, ksp, ksm)?;
        let (c0, d) = spectral_constants(&self.m, xi)?;
        Ok(Spec {
            bpp,
            bpm,
            bsp,
            bsm,
            cpp,
            cpm,
            csp,
            csm,
            sum_p: cpp * bpp + cpm * bpm,
            sum_s: csp * bsp + csm * bsm,
            rp,
            tp,
            rs,
            ts,
            c0,
            d,
        })
    }

    /// The coefficient as the sum of its y₃-exponential terms (each term is
    /// `coef · exp(rate·y₃)`).
    pub fn coeff_terms3(&self, key: Coeff3DKey, xi: Complex64, variant: Transcription) -> Result<Vec<CoeffTerm>> {
        key.validate()?;
        let sp = self.spec(xi)?;
        let i = Complex64::i();
        let s = xi * xi;
        use CompTag as C;
        use Family as F;
        use SideTag as S;
        let scale = |terms: Vec<CoeffTerm>, f: Complex64| -> Vec<CoeffTerm> {
            terms.into_iter().map(|t| CoeffTerm { coef: f * t.coef, rate: t.rate }).collect()
        };
        let sub = |family: Family, column: usize, side: SideTag, comp: CompTag| -> Result<Vec<CoeffTerm>> {
            self.coeff_terms3(Coeff3DKey { family, column, side, comp }, xi, variant)
        };
        let terms = match (key.family, key.column, key.comp, key.side) {
            // Compressional auxiliary kernels.
            (F::AP, 1 | 2, C::None, S::Plus) => vec![CoeffTerm { coef: i / (2.0 * sp.bpp) * sp.rp, rate: -sp.bpp }],
            (F::AP, 1 | 2, C::None, S::Minus) => vec![CoeffTerm { coef: i / (2.0 * sp.bpp) * sp.tp, rate: -sp.bpp }],
            (F::BP, 1 | 2, C::None, S::Plus) => {
                vec![CoeffTerm { coef: -i / (2.0 * sp.bpm) * (sp.tp - 2.0), rate: sp.bpm }]
            }
            (F::BP, 1 | 2, C::None, S::Minus) => vec![CoeffTerm { coef: -i / (2.0 * sp.bpm) * sp.rp, rate: sp.bpm }],
            (F::AP, 3, C::None, S::Plus) => vec![CoeffTerm { coef: 0.5 * sp.rp, rate: -sp.bpp }],
            (F::AP, 3, C::None, S::Minus) => {
                // Printed with a growing exponential e^{+β_{p,+}y₃}; the
                // corrected decaying sign is selected by the interface check.
                let rate = match variant {
                    Transcription::Printed => sp.bpp,
                    Transcription::Corrected => -sp.bpp,
                };
                vec![CoeffTerm { coef: 0.5 * sp.tp, rate }]
            }
            (F::BP, 3, C::None, S::Plus) => {
                // Printed as ½·T_p(β_{p,+}, β_{p,−}−2): a parenthesis slipped
                // inside the argument list; corrected reading is ½·(T_p − 2).
                let coef = match variant {
                    Transcription::Printed => {
                        let denom = sp.cpp * sp.bpp + sp.cpm * (sp.bpm - 2.0);
                        0.5 * (2.0 * sp.cpp * sp.bpp / denom)
                    }
                    Transcription::Corrected => 0.5 * (sp.tp - 2.0),
                };
                vec![CoeffTerm { coef, rate: sp.bpm }]
            }
            (F::BP, 3, C::None, S::Minus) => vec![CoeffTerm { coef: 0.5 * sp.rp, rate: sp.bpm }],

            // Shear auxiliary kernels, column 1 base forms.
            (F::AS, 1, C::C1, S::None) => vec![CoeffTerm {
                coef: (sp.csm - sp.csp) / (sp.sum_s * (sp.bsp + sp.bsm)),
                rate: -sp.bsp,
            }],
            (F::BS, 1, C::C1, S::None) => vec![CoeffTerm {
                coef: (sp.csm - sp.csp) / (sp.sum_s * (sp.bsp + sp.bsm)),
                rate: sp.bsm,
            }],
            (F::HatAS, 1, C::C2, S::None) => scale(sub(F::AS, 1, S::None, C::C1)?, (-1.0).into()),
            (F::HatBS, 1, C::C2, S::None) => scale(sub(F::BS, 1, S::None, C::C1)?, (-1.0).into()),
            (F::AS, 1, C::C2, S::Plus) => {
                vec![CoeffTerm { coef: (0.5 - sp.bsp / (sp.bsp + sp.bsm)).into(), rate: -sp.bsp }]
            }
            (F::AS, 1, C::C2, S::Minus) => {
                vec![CoeffTerm { coef: (sp.bsm / (sp.bsp + sp.bsm)).into(), rate: -sp.bsp }]
            }
            (F::BS, 1, C::C2, S::Plus) => {
                vec![CoeffTerm { coef: (-sp.bsp / (sp.bsp + sp.bsm)).into(), rate: sp.bsm }]
            }
            (F::BS, 1, C::C2, S::Minus) => {
                vec![CoeffTerm { coef: (-(0.5 - sp.bsm / (sp.bsp + sp.bsm))).into(), rate: sp.bsm }]
            }
            (F::AS, 1, C::C3, S::Plus) => scale(sub(F::AS, 1, S::Plus, C::C2)?, 1.0 / (i * sp.bsp)),
            (F::AS, 1, C::C3, S::Minus) => scale(sub(F::AS, 1, S::Minus, C::C2)?, -1.0 / (i * sp.bsm)),
            (F::BS, 1, C::C3, S::Plus) => scale(sub(F::BS, 1, S::Plus, C::C2)?, 1.0 / (i * sp.bsp)),
            (F::BS, 1, C::C3, S::Minus) => scale(sub(F::BS, 1, S::Minus, C::C2)?, -1.0 / (i * sp.bsm)),

            // Column 2 coefficients are related to column 1.
            (F::AS, 2, C::C1, side @ (S::Plus | S::Minus)) => sub(F::AS, 1, side, C::C2)?,
            (F::BS, 2, C::C1, side @ (S::Plus | S::Minus)) => sub(F::BS, 1, side, C::C2)?,
            (F::HatAS, 2, C::C1, S::None) => sub(F::HatAS, 1, S::None, C::C2)?,
            (F::HatBS, 2, C::C1, S::None) => sub(F::HatBS, 1, S::None, C::C2)?,
            (F::AS, 2, C::C2, S::None) => sub(F::HatAS, 1, S::None, C::C2)?,
            (F::BS, 2, C::C2, S::None) => sub(F::HatBS, 1, S::None, C::C2)?,
            (F::AS, 2, C::C3, side @ (S::Plus | S::Minus)) => sub(F::AS, 1, side, C::C3)?,
            (F::BS, 2, C::C3, side @ (S::Plus | S::Minus)) => sub(F::BS, 1, side, C::C3)?,

            // Column 3: pure shear reflection/transmission.
            (F::AS, 3, C::C1 | C::C2, S::Plus) => {
                vec![CoeffTerm { coef: i / (2.0 * sp.bsp) * sp.rs, rate: -sp.bsp }]
            }
            (F::AS, 3, C::C1 | C::C2, S::Minus) => {
                vec![CoeffTerm { coef: i / (2.0 * sp.bsp) * sp.ts, rate: -sp.bsp }]
            }
            (F::BS, 3, C::C1 | C::C2, S::Plus) => {
                vec![CoeffTerm { coef: -i / (2.0 * sp.bsm) * (sp.ts - 2.0), rate: sp.bsm }]
            }
            (F::BS, 3, C::C1 | C::C2, S::Minus) => {
                vec![CoeffTerm { coef: -i / (2.0 * sp.bsm) * sp.rs, rate: sp.bsm }]
            }

            // Compressional correction kernels.
            (F::RP, 1 | 2, C::None, S::None) => {
                let pref = sp.c0 / sp.d * i;
                vec![
                    CoeffTerm {
                        coef: pref * (sp.sum_s * sp.bsm + (sp.csp - sp.csm) * s) / (sp.bsp + sp.bsm),
                        rate: -sp.bsp,
                    },
                    CoeffTerm { coef: -pref * (sp.csp - sp.csm) * sp.cpp * s / sp.sum_p, rate: -sp.bpp },
                ]
            }
            (F::TP, 1 | 2, C::None, S::None) => {
                let pref = sp.c0 / sp.d * i;
                vec![
                    CoeffTerm {
                        coef: pref * (-sp.sum_s * sp.bsp + (sp.csp - sp.csm) * s) / (sp.bsp + sp.bsm),
                        rate: sp.bsm,
                    },
                    CoeffTerm { coef: -pref * (sp.csp - sp.csm) * sp.cpm * s / sp.sum_p, rate: sp.bpm },
                ]
            }
            (F::RP, 3, C::None, S::None) => {
                let pref = sp.c0 * s / sp.d;
                vec![
                    CoeffTerm { coef: pref * sp.csp, rate: -sp.bsp },
                    CoeffTerm { coef: -pref * (sp.csp - sp.csm) * sp.cpp * sp.bpp / sp.sum_p, rate: -sp.bpp },
                ]
            }
            (F::TP, 3, C::None, S::None) => {
                let pref = sp.c0 * s / sp.d;
                vec![
                    CoeffTerm { coef: pref * sp.csm, rate: sp.bsm },
                    CoeffTerm { coef: pref * (sp.csp - sp.csm) * sp.cpm * sp.bpm / sp.sum_p, rate: sp.bpm },
                ]
            }

            // Shear correction kernels.
            (F::RS, 1 | 2, C::C1, S::None) => {
                let pref: Complex64 = (sp.c0 / sp.d).into();
                vec![
                    CoeffTerm {
                        coef: pref * (sp.cpp - sp.cpm) * (sp.sum_s * sp.bsm + (sp.csp - sp.csm) * s)
                            / (sp.sum_s * (sp.bsp + sp.bsm)),
                        rate: -sp.bsp,
                    },
                    CoeffTerm { coef: -pref * sp.cpp, rate: -sp.bpp },
                ]
            }
            (F::TS, 1 | 2, C::C1, S::None) => {
                let pref: Complex64 = (sp.c0 / sp.d).into();
                vec![
                    CoeffTerm {
                        coef: -pref * (sp.cpp - sp.cpm) * (sp.sum_s * sp.bsp - (sp.csp - sp.csm) * s)
                            / (sp.sum_s * (sp.bsp + sp.bsm)),
                        rate: sp.bsm,
                    },
                    CoeffTerm { coef: -pref * sp.cpm, rate: sp.bpm },
                ]
            }
            (F::RS, 3, C::C1, S::None) => {
                let pref = sp.c0 / sp.d * i;
                vec![
                    CoeffTerm { coef: -pref * (sp.cpp - sp.cpm) * sp.csp * s / sp.sum_s, rate: -sp.bsp },
                    CoeffTerm { coef: pref * sp.cpp * sp.bpp, rate: -sp.bpp },
                ]
            }
            (F::TS, 3, C::C1, S::None) => {
                let pref = sp.c0 / sp.d * i;
                vec![
                    CoeffTerm { coef: -pref * (sp.cpp - sp.cpm) * sp.csm * s / sp.sum_s, rate: sp.bsm },
                    CoeffTerm { coef: -pref * sp.cpm * sp.bpm, rate: sp.bpm },
                ]
            }
            (F::RS, col @ 1..=3, C::C2, S::None) => scale(sub(F::RS, col, S::None, C::C1)?, (-1.0).into()),
            (F::TS, col @ 1..=3, C::C2, S::None) => scale(sub(F::TS, col, S::None, C::C1)?, (-1.0).into()),
            _ => unreachable!("validated key"),
        };
        Ok(terms)
    }

    /// The coefficient value at source height y₃.
    pub fn coeff3d(&self, key: Coeff3DKey, xi: Complex64, y3: f64, variant: Transcription) -> Result<Complex64> {
        let terms = self.coeff_terms3(key, xi, variant)?;
        Ok(terms.iter().map(|t| t.coef * (t.rate * y3).exp()).sum())
    }

    /// ∂/∂y₃ of the coefficient.
    pub fn coeff3d_dy3(&self, key: Coeff3DKey, xi: Complex64, y3: f64, variant: Transcription) -> Result<Complex64> {
        let terms = self.coeff_terms3(key, xi, variant)?;
        Ok(terms.iter().map(|t| t.coef * t.rate * (t.rate * y3).exp()).sum())
    }

    /// Overall scalar prefactor of the auxiliary potential.
    fn tilde_prefactor(&self, kind: Potential3d) -> f64 {
        let inv_mu = 1.0 / self.m.mu;
        match kind {
            Potential3d::P(_) => 1.0 / (2.0 * self.m.mu + self.m.lambda),
            Potential3d::S(1, 2) | Potential3d::S(2, 3) | Potential3d::S(3, 1) | Potential3d::S(1, 1) | Potential3d::S(2, 2) => inv_mu,
            Potential3d::S(1, 3) | Potential3d::S(2, 1) | Potential3d::S(3, 2) => -inv_mu,
            Potential3d::S(3, 3) => 0.0,
            _ => 0.0,
        }
    }

    /// Axis (0-based) of the free-space derivative ∂Φ/∂x_i carried by the
    /// same-side regions, or None for the purely spectral components.  For the
    /// shear components this is exactly the curl structure μ⁻¹curl(Φ e_j).
    fn free_axis(kind: Potential3d) -> Option<usize> {
        match kind {
            Potential3d::P(j) => Some(j - 1),
            Potential3d::S(1, 2) | Potential3d::S(2, 1) => Some(2),
            Potential3d::S(1, 3) | Potential3d::S(3, 1) => Some(1),
            Potential3d::S(2, 3) | Potential3d::S(3, 2) => Some(0),
            _ => None,
        }
    }

    /// Kernel terms (key, monomial) of the auxiliary potential in one region.
    fn tilde_terms(kind: Potential3d, region: RegionTag) -> Vec<(Coeff3DKey, Monomial)> {
        use CompTag as C;
        use Family as F;
        let fam = |f_up: Family, f_dn: Family| if region.y_region == HalfSpace::Plus { f_up } else { f_dn };
        let side = match region.x_region {
            HalfSpace::Plus => SideTag::Plus,
            HalfSpace::Minus => SideTag::Minus,
        };
        let key = |family, column, side, comp| Coeff3DKey { family, column, side, comp };
        let ab = fam(F::AS, F::BS);
        let hab = fam(F::HatAS, F::HatBS);
        match kind {
            Potential3d::P(j @ (1 | 2)) => vec![(key(fam(F::AP, F::BP), j, side, C::None), if j == 1 { Monomial::Z1 } else { Monomial::Z2 })],
            Potential3d::P(_) => vec![(key(fam(F::AP, F::BP), 3, side, C::None), Monomial::ONE)],
            Potential3d::S(1, 1) => vec![(key(ab, 1, SideTag::None, C::C1), Monomial::Z1Z2)],
            Potential3d::S(1, 2) => vec![
                (key(ab, 1, side, C::C2), Monomial::ONE),
                (key(hab, 1, SideTag::None, C::C2), Monomial::Z1SQ),
            ],
            Potential3d::S(1, 3) => vec![(key(ab, 1, side, C::C3), Monomial::Z2)],
            Potential3d::S(2, 1) => vec![
                (key(ab, 2, side, C::C1), Monomial::ONE),
                (key(hab, 2, SideTag::None, C::C1), Monomial::Z2SQ),
            ],
            Potential3d::S(2, 2) => vec![(key(ab, 2, SideTag::None, C::C2), Monomial::Z1Z2)],
            Potential3d::S(2, 3) => vec![(key(ab, 2, side, C::C3), Monomial::Z1)],
            Potential3d::S(3, 1) => vec![(key(ab, 3, side, C::C1), Monomial::Z2)],
            Potential3d::S(3, 2) => vec![(key(ab, 3, side, C::C2), Monomial::Z1)],
            Potential3d::S(3, 3) => vec![],
            _ => vec![],
        }
    }

    /// Kernel terms of the correction potential (same kernel on both x-sides;
    /// the source side selects the R- or T-family).
    fn correction_terms(kind: Potential3d, y_region: HalfSpace) -> Vec<(Coeff3DKey, Monomial)> {
        use CompTag as C;
        use Family as F;
        let up = y_region == HalfSpace::Plus;
        let p = if up { F::RP } else { F::TP };
        let s = if up { F::RS } else { F::TS };
        let key = |family, column, comp| Coeff3DKey { family, column, side: SideTag::None, comp };
        match kind {
            Potential3d::P(j @ (1 | 2)) => vec![(key(p, j, C::None), if j == 1 { Monomial::Z1 } else { Monomial::Z2 })],
            Potential3d::P(_) => vec![(key(p, 3, C::None), Monomial::ONE)],
            Potential3d::S(1, 1) => vec![(key(s, 1, C::C1), Monomial::Z1Z2)],
            Potential3d::S(1, 2) => vec![(key(s, 1, C::C2), Monomial::Z1SQ)],
            Potential3d::S(2, 1) => vec![(key(s, 2, C::C1), Monomial::Z2SQ)],
            Potential3d::S(2, 2) => vec![(key(s, 2, C::C2), Monomial::Z1Z2)],
            Potential3d::S(3, 1) => vec![(key(s, 3, C::C1), Monomial::Z2)],
            Potential3d::S(3, 2) => vec![(key(s, 3, C::C2), Monomial::Z1)],
            _ => vec![],
        }
    }

    fn check_points(&self, x: [f64; 3], y: [f64; 3]) -> Result<RegionTag> {
        let r = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2)).sqrt();
        let min_sep = MIN_SEPARATION_WAVELENGTHS * 2.0 * PI / self.wn.k_max();
        if r < min_sep {
            return Err(Error::CoincidentPoints(r));
        }
        Ok(RegionTag::of(x[2], y[2]))
    }

    /// Collapse `Σ_terms cst·coeff·ξ^deg` monomial integrals to the 1D Hankel
    /// contour, grouped by Bessel order (one path integral per order).
    /// Each entry is (order, constant, degree, key); the common x-exponential
    /// and the ∂₃ multiplier power are applied per group.
    #[allow(clippy::too_many_arguments)]
    fn reduce_terms(
        &self,
        rows: &[(usize, Complex64, u8, Coeff3DKey)],
        wave: WaveType,
        x_region: HalfSpace,
        x3: f64,
        y3: f64,
        d3: u32,
        rho: f64,
        variant: Transcription,
    ) -> Result<Complex64> {
        let decay = x3.abs() + y3.abs();
        let ka_p = self.wn.k(wave, HalfSpace::Plus);
        let ka_m = self.wn.k(wave, HalfSpace::Minus);
        let mut total = CZERO;
        for order in 0..=3usize {
            if rho == 0.0 && order > 0 {
                // Odd-harmonic contributions vanish exactly on the vertical
                // axis (the kernels are radial in ζ).
                continue;
            }
            let group: Vec<_> = rows.iter().filter(|r| r.0 == order).collect();
            if group.is_empty() {
                continue;
            }
            let kernel = |xi: Complex64| -> Result<Complex64> {
                let (ba_p, ba_m) = (beta(xi, ka_p)?, beta(xi, ka_m)?);
                let (xexp, dmult) = match x_region {
                    HalfSpace::Plus => ((-ba_p * x3).exp(), -ba_p),
                    HalfSpace::Minus => ((ba_m * x3).exp(), ba_m),
                };
                let mut sum = CZERO;
                for &&(_, cst, deg, key) in &group {
                    sum += cst * self.coeff3d(key, xi, y3, variant)? * xi.powu(deg as u32);
                }
                Ok(sum * xexp * dmult.powu(d3))
            };
            total += self.integ.hankel_path_integral(kernel, order, rho, decay, self.tol)?.value;
        }
        Ok(total)
    }

    /// The layered (spectral) part of one potential, optionally with one
    /// x-derivative applied (deriv = 0 for the value, 1..3 for ∂_i).
    fn spectral_value(
        &self,
        kind: Potential3d,
        x: [f64; 3],
        y: [f64; 3],
        region: RegionTag,
        part: Part,
        deriv: usize,
        variant: Transcription,
    ) -> Result<Complex64> {
        let mut terms: Vec<(f64, Coeff3DKey, Monomial)> = Vec::new();
        if matches!(part, Part::Tilde | Part::Both) {
            let pref = self.tilde_prefactor(kind);
            for (key, mono) in Self::tilde_terms(kind, region) {
                terms.push((pref, key, mono));
            }
        }
        if matches!(part, Part::Correction | Part::Both) {
            for (key, mono) in Self::correction_terms(kind, region.y_region) {
                terms.push((1.0, key, mono));
            }
        }
        if terms.is_empty() {
            return Ok(CZERO);
        }
        let (mut ifac, mut d3) = (Complex64::new(1.0, 0.0), 0u32);
        match deriv {
            0 => {}
            1 | 2 => ifac = Complex64::i(),
            3 => d3 = 1,
            _ => return Err(Error::InvalidInput(format!("derivative axis {deriv} out of range"))),
        }
        let dx = [x[0] - y[0], x[1] - y[1]];
        let rho = (dx[0] * dx[0] + dx[1] * dx[1]).sqrt();
        let alpha = dx[1].atan2(dx[0]);
        let mut rows: Vec<(usize, Complex64, u8, Coeff3DKey)> = Vec::new();
        for (scale, key, mono) in terms {
            let mono = if deriv == 1 || deriv == 2 { mono.bump(deriv - 1)? } else { mono };
            for af in mono.rows() {
                let trig = match af.harmonic {
                    Harmonic::Cos => (af.order as f64 * alpha).cos(),
                    Harmonic::Sin => (af.order as f64 * alpha).sin(),
                };
                let cst = scale * ifac * Complex64::i().powu(af.order as u32) * af.coef * trig;
                rows.push((af.order, cst, mono.degree() as u8, key));
            }
        }
        self.reduce_terms(&rows, kind.wave(), region.x_region, x[2], y[2], d3, rho, variant)
    }

    /// Value and gradient of the free-space term (present only when x and y
    /// share a side): prefactor · ∂Φ_k/∂x_idx with k of the shared side.
    fn free_term_eval(&self, kind: Potential3d, x: [f64; 3], y: [f64; 3], region: RegionTag) -> Result<SpectralEval3> {
        let mut out = SpectralEval3 { value: CZERO, grad: [CZERO; 3] };
        let idx = match Self::free_axis(kind) {
            Some(i) => i,
            None => return Ok(out),
        };
        if region.x_region != region.y_region {
            return Ok(out);
        }
        let k = self.wn.k(kind.wave(), region.x_region);
        let r = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2)).sqrt();
        let p = phi_derivs(k, r, 3)?;
        let e = [(x[0] - y[0]) / r, (x[1] - y[1]) / r, (x[2] - y[2]) / r];
        let c = self.tilde_prefactor(kind);
        out.value = c * p.d1 * e[idx];
        for kk in 0..3 {
            let dk = if idx == kk { 1.0 } else { 0.0 };
            out.grad[kk] = c * (p.d2 * e[kk] * e[idx] + p.d1 * (dk - e[idx] * e[kk]) / r);
        }
        Ok(out)
    }

    /// The auxiliary potential with its x-gradient.
    pub fn tilde(&self, kind: Potential3d, x: [f64; 3], y: [f64; 3]) -> Result<SpectralEval3> {
        self.eval_part(kind, x, y, Part::Tilde, true)
    }

    /// The correction potential with its x-gradient.
    pub fn correction(&self, kind: Potential3d, x: [f64; 3], y: [f64; 3]) -> Result<SpectralEval3> {
        self.eval_part(kind, x, y, Part::Correction, false)
    }

    /// The full scalar potential (auxiliary + correction) with gradient.
    pub fn potential(&self, kind: Potential3d, x: [f64; 3], y: [f64; 3]) -> Result<SpectralEval3> {
        self.eval_part(kind, x, y, Part::Both, true)
    }

    fn eval_part(&self, kind: Potential3d, x: [f64; 3], y: [f64; 3], part: Part, with_free: bool) -> Result<SpectralEval3> {
        kind.validate()?;
        let region = self.check_points(x, y)?;
        let variant = Transcription::Corrected;
        let mut out = if with_free {
            self.free_term_eval(kind, x, y, region)?
        } else {
            SpectralEval3 { value: CZERO, grad: [CZERO; 3] }
        };
        out.value += self.spectral_value(kind, x, y, region, part, 0, variant)?;
        for i in 0..3 {
            out.grad[i] += self.spectral_value(kind, x, y, region, part, i + 1, variant)?;
        }
        Ok(out)
    }

    /// Column j of the Green's tensor:
    /// G_j = −k_p⁻²∇G_{p,j} + k_s⁻²curl G_{s,j} with k_a of x's side.
    pub fn column(&self, j: usize, x: [f64; 3], y: [f64; 3]) -> Result<[Complex64; 3]> {
        if !(1..=3).contains(&j) {
            return Err(Error::InvalidInput(format!("column must be 1..=3, got {j}")));
        }
        let region = self.check_points(x, y)?;
        let gp = self.potential(Potential3d::P(j), x, y)?;
        let s1 = self.potential(Potential3d::S(j, 1), x, y)?;
        let s2 = self.potential(Potential3d::S(j, 2), x, y)?;
        let s3 = self.potential(Potential3d::S(j, 3), x, y)?;
        let kp2 = self.wn.kp(region.x_region).powi(2);
        let ks2 = self.wn.ks(region.x_region).powi(2);
        let curl = [
            s3.grad[1] - s2.grad[2],
            s1.grad[2] - s3.grad[0],
            s2.grad[0] - s1.grad[1],
        ];
        let mut col = [CZERO; 3];
        for i in 0..3 {
            col[i] = -gp.grad[i] / kp2 + curl[i] / ks2;
        }
        Ok(col)
    }

    /// The assembled 3×3 Green's matrix.
    pub fn assemble(&self, x: [f64; 3], y: [f64; 3]) -> Result<GreenMatrix3> {
        let region = self.check_points(x, y)?;
        let mut entries = [[CZERO; 3]; 3];
        for j in 1..=3 {
            let col = self.column(j, x, y)?;
            for i in 0..3 {
                entries[i][j - 1] = col[i];
            }
        }
        Ok(GreenMatrix3 { entries, x, y, region })
    }

    /// Reduce a planar Fourier integral `(1/2π)⁻²∫∫ f(|ζ|²)·ζ₁^aζ₂^b·e^{iζ·d}`
    /// to its 1D Hankel-contour form; `d = x' − y'` and `decay` is the
    /// exponential decay rate of f on the real axis.
    pub fn hankel_reduce<F>(&self, f: F, mono: Monomial, d: [f64; 2], decay: f64) -> Result<Complex64>
    where
        F: Fn(Complex64) -> Result<Complex64>,
    {
        let rho = (d[0] * d[0] + d[1] * d[1]).sqrt();
        let alpha = d[1].atan2(d[0]);
        let deg = mono.degree() as u32;
        let mut total = CZERO;
        for af in mono.rows() {
            if rho == 0.0 && af.order > 0 {
                continue;
            }
            let trig = match af.harmonic {
                Harmonic::Cos => (af.order as f64 * alpha).cos(),
                Harmonic::Sin => (af.order as f64 * alpha).sin(),
            };
            let cst = Complex64::i().powu(af.order as u32) * af.coef * trig;
            let kernel = |xi: Complex64| Ok(f(xi)? * xi.powu(deg));
            total += cst * self.integ.hankel_path_integral(kernel, af.order, rho, decay, self.tol)?.value;
        }
        Ok(total)
    }

    /// Closed-form far-field pattern of one spectral kernel term
    /// `coeff(|ζ|², y₃)·ζ₁^aζ₂^b` in the direction
    /// x̂ = (cos φ cos θ, sin φ cos θ, sin θ), θ ∈ [−π/2, π/2] bounded away
    /// from grazing.  The field behaves like `e^{ikr}/r · F∞ + O(r^{−5/4})`.
    pub fn kernel_far_field(
        &self,
        key: Coeff3DKey,
        mono: Monomial,
        theta: f64,
        phi: f64,
        y: [f64; 3],
    ) -> Result<FarField3> {
        key.validate()?;
        let st = theta.sin();
        if theta.abs() > PI / 2.0 + 1e-12 {
            return Err(Error::InvalidInput(format!("polar angle {theta} outside [-pi/2, pi/2]")));
        }
        if st.abs() < THETA_MIN {
            return Err(Error::GrazingDirection(theta));
        }
        let upper = st > 0.0;
        let side = if upper { HalfSpace::Plus } else { HalfSpace::Minus };
        let k = self.wn.k(key.family.wave(), side);
        let ct = theta.cos();
        let xhat = [phi.cos() * ct, phi.sin() * ct, st];
        let deg = mono.degree();
        let pre = if upper {
            Complex64::from_polar(1.0, -PI / 2.0)
        } else {
            Complex64::from_polar(1.0, PI / 2.0)
        } * k.powi(1 + deg as i32)
            / (2.0 * PI);
        let monval = mono.eval([xhat[0], xhat[1]]) * xhat[2];
        let xi0 = Complex64::new(k * ct, 0.0);
        let phase = (-Complex64::i() * k * (xhat[0] * y[0] + xhat[1] * y[1])).exp();
        let variant = Transcription::Corrected;
        let f = self.coeff3d(key, xi0, y[2], variant)?;
        let df = self.coeff3d_dy3(key, xi0, y[2], variant)?;
        let value = pre * monval * f * phase;
        Ok(FarField3 {
            theta,
            phi,
            value,
            gradient_y: [
                -Complex64::i() * k * xhat[0] * value,
                -Complex64::i() * k * xhat[1] * value,
                pre * monval * df * phase,
            ],
        })
    }

    /// Far field of the correction potential (sum over its kernel terms).
    pub fn correction_far_field(&self, kind: Potential3d, theta: f64, phi: f64, y: [f64; 3]) -> Result<FarField3> {
        kind.validate()?;
        let terms = Self::correction_terms(kind, HalfSpace::of(y[2]));
        self.sum_far_field(&terms, 1.0, theta, phi, y)
    }

    /// Far field of the layered (kernel) part of the auxiliary potential.
    pub fn tilde_far_field(&self, kind: Potential3d, theta: f64, phi: f64, y: [f64; 3]) -> Result<FarField3> {
        kind.validate()?;
        let x_region = if theta > 0.0 { HalfSpace::Plus } else { HalfSpace::Minus };
        let region = RegionTag { x_region, y_region: HalfSpace::of(y[2]) };
        let terms = Self::tilde_terms(kind, region);
        self.sum_far_field(&terms, self.tilde_prefactor(kind), theta, phi, y)
    }

    fn sum_far_field(
        &self,
        terms: &[(Coeff3DKey, Monomial)],
        scale: f64,
        theta: f64,
        phi: f64,
        y: [f64; 3],
    ) -> Result<FarField3> {
        let mut out = FarField3 { theta, phi, value: CZERO, gradient_y: [CZERO; 3] };
        if terms.is_empty() {
            // Still enforce the direction guards for a uniform contract.
            if theta.sin().abs() < THETA_MIN {
                return Err(Error::GrazingDirection(theta));
            }
            return Ok(out);
        }
        for &(key, mono) in terms {
            let ff = self.kernel_far_field(key, mono, theta, phi, y)?;
            out.value += scale * ff.value;
            for i in 0..3 {
                out.gradient_y[i] += scale * ff.gradient_y[i];
            }
        }
        Ok(out)
    }

    /// Partial-Fourier trace data of one potential at the interface: value and
    /// ∂₃ at x₃ = 0 approached from `x_side`, at in-plane frequency ζ.
    fn hat_parts(
        &self,
        kind: Potential3d,
        zeta: [f64; 2],
        y: [f64; 3],
        x_side: HalfSpace,
        variant: Transcription,
    ) -> Result<(Complex64, Complex64)> {
        let region = RegionTag { x_region: x_side, y_region: HalfSpace::of(y[2]) };
        let xi = Complex64::new((zeta[0] * zeta[0] + zeta[1] * zeta[1]).sqrt(), 0.0);
        let wave = kind.wave();
        let (ka_p, ka_m) = (self.wn.k(wave, HalfSpace::Plus), self.wn.k(wave, HalfSpace::Minus));
        let dmult = match x_side {
            HalfSpace::Plus => -beta(xi, ka_p)?,
            HalfSpace::Minus => beta(xi, ka_m)?,
        };
        let mut v = CZERO;
        let mut d3 = CZERO;
        let pref = self.tilde_prefactor(kind);
        for (key, mono) in Self::tilde_terms(kind, region) {
            let val = pref * mono.eval(zeta) * self.coeff3d(key, xi, y[2], variant)?;
            v += val;
            d3 += dmult * val;
        }
        for (key, mono) in Self::correction_terms(kind, region.y_region) {
            let val = mono.eval(zeta) * self.coeff3d(key, xi, y[2], variant)?;
            v += val;
            d3 += dmult * val;
        }
        if let Some(idx) = Self::free_axis(kind) {
            if x_side == region.y_region {
                let k = self.wn.k(wave, x_side);
                let b = beta(xi, k)?;
                // Φ̂(ζ, x₃) = e^{−β|x₃−y₃|}/(2β); at the trace the vertical
                // derivative points toward the source.
                let (phihat, dsign) = match x_side {
                    HalfSpace::Plus => ((-b * y[2]).exp() / (2.0 * b), b),
                    HalfSpace::Minus => ((b * y[2]).exp() / (2.0 * b), -b),
                };
                let mfac = match idx {
                    0 => Complex64::i() * zeta[0],
                    1 => Complex64::i() * zeta[1],
                    _ => dsign,
                };
                let val = pref * mfac * phihat;
                v += val;
                d3 += dsign * val;
            }
        }
        Ok((v, d3))
    }

    /// Worst normalized residual of the Fourier-transformed interface
    /// conditions of the full tensor at in-plane frequency ζ and source y:
    /// continuity of the compressional trace and of the tangential shear
    /// traces, the two coupled stress-type conditions, and the divergence-free
    /// constraint of the shear potentials.  This is the arbiter that selects
    /// the transcription variant.
    pub fn interface_residual(&self, zeta: [f64; 2], y: [f64; 3], variant: Transcription) -> Result<f64> {
        let i = Complex64::i();
        let (z1, z2) = (zeta[0], zeta[1]);
        let (cpp, cpm) = (self.wn.kp(HalfSpace::Plus).powi(-2), self.wn.kp(HalfSpace::Minus).powi(-2));
        let (csp, csm) = (self.wn.ks(HalfSpace::Plus).powi(-2), self.wn.ks(HalfSpace::Minus).powi(-2));
        let mut worst: f64 = 0.0;
        for j in 1..=3 {
            let hat = |kind: Potential3d, side: HalfSpace| self.hat_parts(kind, zeta, y, side, variant);
            let (gp_p, dgp_p) = hat(Potential3d::P(j), HalfSpace::Plus)?;
            let (gp_m, dgp_m) = hat(Potential3d::P(j), HalfSpace::Minus)?;
            let mut s_p = [CZERO; 3];
            let mut s_m = [CZERO; 3];
            let mut ds_p = [CZERO; 3];
            let mut ds_m = [CZERO; 3];
            for l in 1..=3 {
                let (vp, dp) = hat(Potential3d::S(j, l), HalfSpace::Plus)?;
                let (vm, dm) = hat(Potential3d::S(j, l), HalfSpace::Minus)?;
                s_p[l - 1] = vp;
                s_m[l - 1] = vm;
                ds_p[l - 1] = dp;
                ds_m[l - 1] = dm;
            }
            let scale = [gp_p, gp_m, s_p[0], s_p[1], s_p[2], s_m[0], s_m[1], s_m[2]]
                .iter()
                .map(|c| c.norm())
                .fold(1e-30, f64::max)
                .max(1e-3);
            // Trace continuity of the compressional potential and of the
            // tangential components of the shear potential.
            let e1 = gp_p - gp_m;
            let e2 = s_p[0] - s_m[0];
            let e3 = s_p[1] - s_m[1];
            // [k_p⁻²∂₃G_p − k_s⁻²(∂₁G_s² − ∂₂G_s¹)] = 0.
            let nc_p = i * z1 * s_p[1] - i * z2 * s_p[0];
            let nc_m = i * z1 * s_m[1] - i * z2 * s_m[0];
            let e4 = cpp * dgp_p - cpm * dgp_m - (csp * nc_p - csm * nc_m);
            // [k_p⁻²ν×∇G_p − k_s⁻²ν×curl G_s] = 0, two tangential components.
            let tc1_p = i * z1 * s_p[2] - ds_p[0];
            let tc1_m = i * z1 * s_m[2] - ds_m[0];
            let tc2_p = i * z2 * s_p[2] - ds_p[1];
            let tc2_m = i * z2 * s_m[2] - ds_m[1];
            let e5a = cpp * (-i * z2 * gp_p) - cpm * (-i * z2 * gp_m) - (csp * tc1_p - csm * tc1_m);
            let e5b = cpp * (i * z1 * gp_p) - cpm * (i * z1 * gp_m) - (csp * tc2_p - csm * tc2_m);
            // div G_s = 0 on both sides.
            let e6p = i * z1 * s_p[0] + i * z2 * s_p[1] + ds_p[2];
            let e6m = i * z1 * s_m[0] + i * z2 * s_m[1] + ds_m[2];
            for e in [e1, e2, e3, e4, e5a, e5b, e6p, e6m] {
                worst = worst.max(e.norm() / scale);
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elastic_fields::kupradze_tensor;
    use crate::specfun::bessel_j;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn medium() -> ElasticMedium {
        ElasticMedium::new(1.1, 1.3, 1.0, 1.7, 1.9, 3).unwrap()
    }

    fn quad(tol: f64) -> QuadConfig {
        QuadConfig { tol, ..QuadConfig::default() }
    }

    fn green(tol: f64) -> Green3d {
        Green3d::new(medium(), quad(tol)).unwrap()
    }

    /// Bessel J up to order 3 (recurrence above the library's range).
    fn jn(order: usize, z: Complex64) -> Complex64 {
        if order <= 2 {
            bessel_j(order, z).unwrap()
        } else {
            4.0 / z * bessel_j(2, z).unwrap() - bessel_j(1, z).unwrap()
        }
    }

    fn all_kinds() -> Vec<Potential3d> {
        let mut v = Vec::new();
        for j in 1..=3 {
            v.push(Potential3d::P(j));
            for l in 1..=3 {
                v.push(Potential3d::S(j, l));
            }
        }
        v
    }

    #[test]
    fn key_validation_accepts_printed_combinations_only() {
        assert!(Coeff3DKey::new(Family::AP, 1, SideTag::Plus, CompTag::None).is_ok());
        assert!(Coeff3DKey::new(Family::AP, 1, SideTag::None, CompTag::None).is_err());
        assert!(Coeff3DKey::new(Family::AS, 1, SideTag::None, CompTag::C1).is_ok());
        assert!(Coeff3DKey::new(Family::AS, 1, SideTag::Plus, CompTag::C1).is_err());
        assert!(Coeff3DKey::new(Family::AS, 3, SideTag::Plus, CompTag::C3).is_err());
        assert!(Coeff3DKey::new(Family::HatAS, 1, SideTag::None, CompTag::C2).is_ok());
        assert!(Coeff3DKey::new(Family::HatAS, 1, SideTag::None, CompTag::C1).is_err());
        assert!(Coeff3DKey::new(Family::RP, 4, SideTag::None, CompTag::None).is_err());
        assert!(Coeff3DKey::new(Family::RS, 2, SideTag::None, CompTag::C2).is_ok());
        assert!(Monomial::new(2, 2).is_err());
    }

    #[test]
    fn coefficients_vanish_for_equal_densities() {
        let m = ElasticMedium::new(1.1, 1.3, 1.7, 1.7, 1.9, 3).unwrap();
        let g = Green3d::new(m, quad(1e-10)).unwrap();
        let xi = Complex64::new(0.41, 0.0);
        let keys = [
            Coeff3DKey::new(Family::RP, 1, SideTag::None, CompTag::None).unwrap(),
            Coeff3DKey::new(Family::RP, 3, SideTag::None, CompTag::None).unwrap(),
            Coeff3DKey::new(Family::TS, 2, SideTag::None, CompTag::C1).unwrap(),
            Coeff3DKey::new(Family::RS, 3, SideTag::None, CompTag::C2).unwrap(),
            Coeff3DKey::new(Family::AS, 1, SideTag::None, CompTag::C1).unwrap(),
            Coeff3DKey::new(Family::HatAS, 2, SideTag::None, CompTag::C1).unwrap(),
            Coeff3DKey::new(Family::AP, 1, SideTag::Plus, CompTag::None).unwrap(),
            Coeff3DKey::new(Family::AS, 1, SideTag::Plus, CompTag::C2).unwrap(),
        ];
        for key in keys {
            for y3 in [0.8, -1.1] {
                let v = g.coeff3d(key, xi, y3, Transcription::Corrected).unwrap();
                assert!(v.norm() < 1e-15, "{key:?} at y3={y3}: {v:?}");
            }
        }
    }

    #[test]
    fn zeta_zero_limits_match_closed_forms() {
        // |ζ|²-prefactored kernels vanish at ζ = 0; the remaining term of the
        // shear correction reduces to its compressional part.
        let g = green(1e-10);
        let xi = Complex64::new(0.0, 0.0);
        let y3 = 0.9;
        for key in [
            Coeff3DKey::new(Family::RP, 3, SideTag::None, CompTag::None).unwrap(),
            Coeff3DKey::new(Family::TP, 3, SideTag::None, CompTag::None).unwrap(),
        ] {
            assert!(g.coeff3d(key, xi, y3, Transcription::Corrected).unwrap().norm() < 1e-15);
        }
        let key = Coeff3DKey::new(Family::RS, 3, SideTag::None, CompTag::C1).unwrap();
        let v = g.coeff3d(key, xi, y3, Transcription::Corrected).unwrap();
        let sp = g.spec(xi).unwrap();
        let expect = sp.c0 / sp.d * Complex64::i() * sp.cpp * sp.bpp * (-sp.bpp * y3).exp();
        assert!((v - expect).norm() < 1e-14 * expect.norm());
    }

    #[test]
    fn interface_residual_selects_corrected_transcription() {
        // The transcription arbiter: the corrected coefficient constants
        // satisfy the transformed interface conditions to near machine
        // precision; the printed variants of the two suspect constants do not.
        let g = green(1e-10);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut worst: f64 = 0.0;
        for _ in 0..60 {
            let zeta: [f64; 2] = [rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0)];
            let r = (zeta[0] * zeta[0] + zeta[1] * zeta[1]).sqrt();
            if g.wn.branch_points().iter().any(|k| (r - k).abs() < 1e-3) {
                continue;
            }
            let y3 = *[rng.gen_range(0.3..2.0), -rng.gen_range(0.3..2.0)].choose(&mut rng).unwrap();
            let y = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), y3];
            worst = worst.max(g.interface_residual(zeta, y, Transcription::Corrected).unwrap());
        }
        assert!(worst < 1e-12, "corrected-variant interface residual {worst:.3e}");
        // Printed variants: the sign typo lives in a source-above kernel, the
        // parenthesis typo in a source-below kernel.
        let up = g.interface_residual([0.9, -0.4], [0.2, 0.1, 1.1], Transcription::Printed).unwrap();
        let dn = g.interface_residual([0.9, -0.4], [0.2, 0.1, -1.3], Transcription::Printed).unwrap();
        assert!(up > 1e-6, "printed variant unexpectedly passes above: {up:.3e}");
        assert!(dn > 1e-6, "printed variant unexpectedly passes below: {dn:.3e}");
    }

    #[test]
    fn angular_integrals_reduce_to_bessel_rows() {
        // For every monomial, the azimuthal integral
        // (1/2π)∫ cos^a γ sin^b γ e^{it cos(γ−α)} dγ equals the closed
        // harmonic/Bessel row sum; periodic trapezoid is the oracle.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let monos: Vec<Monomial> =
            [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2), (3, 0), (0, 3), (2, 1), (1, 2)]
                .iter()
                .map(|&(a, b)| Monomial::new(a, b).unwrap())
                .collect();
        let n = 512;
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let t = rng.gen_range(0.0..12.0);
            let alpha = rng.gen_range(0.0..2.0 * PI);
            for mono in &monos {
                let mut quad = CZERO;
                for k in 0..n {
                    let gamma = 2.0 * PI * k as f64 / n as f64;
                    let trig = gamma.cos().powi(mono.a as i32) * gamma.sin().powi(mono.b as i32);
                    quad += trig * (Complex64::i() * t * (gamma - alpha).cos()).exp();
                }
                quad /= n as f64;
                let mut closed = CZERO;
                for af in mono.rows() {
                    let trig = match af.harmonic {
                        Harmonic::Cos => (af.order as f64 * alpha).cos(),
                        Harmonic::Sin => (af.order as f64 * alpha).sin(),
                    };
                    let jm = jn(af.order, Complex64::new(t, 0.0));
                    closed += af.coef * Complex64::i().powu(af.order as u32) * trig * jm;
                }
                worst = worst.max((quad - closed).norm());
            }
        }
        assert!(worst < 1e-10, "angular reduction residual {worst:.3e}");
    }

    #[test]
    fn hankel_reduce_matches_planar_quadrature_for_gaussian() {
        // Entire test kernel: the contour reduction must equal brute-force
        // planar quadrature for every monomial (this also exercises the
        // order-3 Hankel path).
        let g = green(1e-10);
        let sigma = 0.5;
        let f = |xi: Complex64| Ok((-sigma * xi * xi).exp());
        let d = [1.7, -1.1];
        let monos: Vec<Monomial> =
            [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2), (3, 0), (0, 3), (2, 1), (1, 2)]
                .iter()
                .map(|&(a, b)| Monomial::new(a, b).unwrap())
                .collect();
        let l = 8.0;
        let n = 400usize;
        let h = 2.0 * l / n as f64;
        for mono in &monos {
            let reduced = g.hankel_reduce(f, *mono, d, 2.0).unwrap();
            let mut brute = CZERO;
            for p in 0..n {
                let z1 = -l + (p as f64 + 0.5) * h;
                for q in 0..n {
                    let z2 = -l + (q as f64 + 0.5) * h;
                    let s = z1 * z1 + z2 * z2;
                    brute += (-sigma * s).exp()
                        * mono.eval([z1, z2])
                        * (Complex64::i() * (z1 * d[0] + z2 * d[1])).exp();
                }
            }
            brute *= Complex64::new(h * h / (4.0 * PI * PI), 0.0);
            assert!(
                (reduced - brute).norm() < 1e-7,
                "monomial {mono:?}: reduced {reduced:?} vs brute {brute:?}"
            );
        }
    }

    /// Radial Bessel-transform oracle for a layered kernel: the planar
    /// integral written as Σ rows over (1/2π)∫₀^∞ f·ξ^{deg+1}·J_m(ξρ) dξ on
    /// the real axis, with a cosine substitution absorbing the inverse-
    /// square-root branch behaviour at the wavenumbers.
    fn radial_oracle(
        g: &Green3d,
        f: &dyn Fn(Complex64) -> Result<Complex64>,
        mono: Monomial,
        d: [f64; 2],
        truncation: f64,
    ) -> Complex64 {
        let rho = (d[0] * d[0] + d[1] * d[1]).sqrt();
        let alpha = d[1].atan2(d[0]);
        let deg = mono.degree() as i32;
        let mut cuts = vec![0.0];
        cuts.extend(g.wn.branch_points());
        cuts.push(truncation);
        // 4-point Gauss–Legendre on [0, 1].
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
            for w in cuts.windows(2) {
                let (a, b) = (w[0], w[1]);
                let panels = 600;
                for p in 0..panels {
                    let (u0, u1) = (p as f64 / panels as f64, (p + 1) as f64 / panels as f64);
                    for (xx, ww) in glx.iter().zip(glw.iter()) {
                        let u = u0 + (u1 - u0) * xx;
                        // ξ = a + (b−a)(1−cos πu)/2 regularizes both endpoints.
                        let xi = a + (b - a) * 0.5 * (1.0 - (PI * u).cos());
                        let dxi = (b - a) * 0.5 * PI * (PI * u).sin() * (u1 - u0) * ww;
                        let fv = f(Complex64::new(xi, 0.0)).unwrap();
                        let jm = jn(af.order, Complex64::new(xi * rho, 0.0));
                        integral += fv * xi.powi(deg + 1) * jm * dxi;
                    }
                }
            }
            total += cst * integral / (2.0 * PI);
        }
        total
    }

    #[test]
    fn hankel_reduce_matches_radial_oracle_on_coefficient_kernels() {
        // Five representative coefficient kernels, contour reduction vs the
        // real-axis Bessel transform.
        let g = green(1e-9);
        let cases = [
            (Coeff3DKey::new(Family::AP, 1, SideTag::Plus, CompTag::None).unwrap(), Monomial::Z1, 2.2),
            (Coeff3DKey::new(Family::AS, 1, SideTag::Minus, CompTag::C2).unwrap(), Monomial::ONE, 2.0),
            (Coeff3DKey::new(Family::RP, 3, SideTag::None, CompTag::None).unwrap(), Monomial::ONE, 2.4),
            (Coeff3DKey::new(Family::RS, 1, SideTag::None, CompTag::C1).unwrap(), Monomial::Z1Z2, 2.6),
            (Coeff3DKey::new(Family::TS, 3, SideTag::None, CompTag::C1).unwrap(), Monomial::Z1, -2.3),
        ];
        let d = [1.3, 0.8];
        for (key, mono, y3) in cases {
            let f = |xi: Complex64| g.coeff3d(key, xi, y3, Transcription::Corrected);
            let reduced = g.hankel_reduce(f, mono, d, y3.abs()).unwrap();
            let tail = (10.0f64.powi(9) as f64).ln() / y3.abs();
            let truncation = g.wn.k_max() + tail;
            let brute = radial_oracle(&g, &f, mono, d, truncation);
            assert!(
                (reduced - brute).norm() < 1e-6 * (1.0 + brute.norm()),
                "{key:?}: reduced {reduced:?} vs radial {brute:?}"
            );
        }
    }

    #[test]
    fn equal_densities_tilde_reduces_to_free_term_and_corrections_vanish() {
        let m = ElasticMedium::new(1.1, 1.3, 1.7, 1.7, 1.9, 3).unwrap();
        let g = Green3d::new(m, quad(1e-10)).unwrap();
        // Cross-region pairs force the layered kernels to reproduce the
        // free-space derivative exactly (this pins the corrected sign of the
        // source-above column-3 transmission constant analytically).
        let x_up = [0.5, -0.3, 0.8];
        let x_dn = [0.5, -0.3, -0.9];
        let y_up = [-0.2, 0.4, 0.6];
        let y_dn = [-0.2, 0.4, -0.7];
        for kind in all_kinds() {
            for (x, y) in [(x_dn, y_up), (x_up, y_dn), (x_up, y_up)] {
                let t = g.tilde(kind, x, y).unwrap();
                // Free-space reference on the full space: prefactor·∂Φ/∂x_idx.
                let mut expect = CZERO;
                if let Some(idx) = Green3d::free_axis(kind) {
                    let k = g.wn.k(kind.wave(), HalfSpace::Plus);
                    let r = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2)).sqrt();
                    let p = phi_derivs(k, r, 3).unwrap();
                    let e = (x[idx] - y[idx]) / r;
                    expect = g.tilde_prefactor(kind) * p.d1 * e;
                }
                assert!(
                    (t.value - expect).norm() < 1e-8 * (1.0 + expect.norm()),
                    "{kind:?} at {x:?},{y:?}: {:?} vs {expect:?}",
                    t.value
                );
                let u = g.correction(kind, x, y).unwrap();
                assert!(u.value.norm() < 1e-10, "{kind:?} correction {:?}", u.value);
            }
        }
    }

    #[test]
    fn equal_densities_collapse_to_kupradze() {
        let m = ElasticMedium::new(1.1, 1.3, 1.7, 1.7, 1.9, 3).unwrap();
        let g = Green3d::new(m.clone(), quad(1e-10)).unwrap();
        for (x, y) in [([0.5, -0.2, 0.8], [-0.3, 0.4, 0.5]), ([0.4, 0.3, -0.9], [-0.3, 0.4, 0.5])] {
            let gm = g.assemble(x, y).unwrap();
            let pi = kupradze_tensor(&m, HalfSpace::Plus, &x, &y).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert!(
                        (gm.entries[i][j] - pi[i][j]).norm() < 1e-9,
                        "collapse [{i}][{j}]: {:?} vs {:?}",
                        gm.entries[i][j],
                        pi[i][j]
                    );
                }
            }
        }
    }

    #[test]
    fn shear_potentials_are_divergence_free() {
        // Σ_l ∂_l G_{s,j}^{(l)} = 0 from the analytic spectral gradients.
        let g = green(1e-9);
        for (x, y) in [([0.6, 0.2, 0.9], [-0.4, 0.1, 0.7]), ([0.6, 0.2, -0.8], [-0.4, 0.1, 0.7])] {
            for j in 1..=3 {
                let mut div = CZERO;
                let mut scale: f64 = 0.0;
                for l in 1..=3 {
                    let s = g.potential(Potential3d::S(j, l), x, y).unwrap();
                    div += s.grad[l - 1];
                    scale = scale.max(s.grad[l - 1].norm());
                }
                assert!(div.norm() < 1e-8 * (1.0 + scale), "div of shear potential j={j}: {div:?}");
            }
        }
    }

    #[test]
    fn assembled_tensor_is_reciprocal() {
        let g = green(1e-9);
        let pairs = [
            ([0.7, 0.2, 0.9], [-0.4, 0.3, 0.5]),
            ([0.7, 0.2, 0.9], [-0.4, 0.3, -0.6]),
            ([0.5, -0.3, -0.8], [-0.3, 0.4, 0.7]),
        ];
        for (x, y) in pairs {
            let gxy = g.assemble(x, y).unwrap();
            let gyx = g.assemble(y, x).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert!(
                        (gxy.entries[i][j] - gyx.entries[j][i]).norm() < 1e-6,
                        "reciprocity [{i}][{j}] at {x:?},{y:?}: {:?} vs {:?}",
                        gxy.entries[i][j],
                        gyx.entries[j][i]
                    );
                }
            }
        }
    }

    #[test]
    fn assembled_tensor_satisfies_navier_fd() {
        let g = green(1e-9);
        let m = medium();
        let h = 1e-3;
        let y = [-0.2, 0.3, 0.6];
        for x0 in [[0.7, 0.1, 0.9], [0.5, -0.2, -0.8]] {
            let side = HalfSpace::of(x0[2]);
            let rw2 = m.rho(side) * m.omega * m.omega;
            let col = |x: &[f64; 3]| g.column(1, *x, y).unwrap();
            let u0 = col(&x0);
            let mut resid = [rw2 * u0[0], rw2 * u0[1], rw2 * u0[2]];
            let mut hess = [[[CZERO; 3]; 3]; 3]; // hess[i][j][component]
            for i in 0..3 {
                let mut xp = x0;
                let mut xm = x0;
                xp[i] += h;
                xm[i] -= h;
                let (up, um) = (col(&xp), col(&xm));
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
                    let (upp, upm, ump, umm) = (col(&xpp), col(&xpm), col(&xmp), col(&xmm));
                    for t in 0..3 {
                        hess[i][jj][t] = (upp[t] - upm[t] - ump[t] + umm[t]) / (4.0 * h * h);
                        hess[jj][i][t] = hess[i][jj][t];
                    }
                }
            }
            for t in 0..3 {
                for j in 0..3 {
                    resid[t] += m.mu * hess[j][j][t] + (m.lambda + m.mu) * hess[t][j][j];
                }
            }
            let scale = rw2 * u0.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let rmax = resid.iter().map(|c| c.norm()).fold(0.0, f64::max);
            assert!(rmax / scale < 1e-3, "Navier residual {:.3e} at {x0:?}", rmax / scale);
        }
    }

    #[test]
    fn assembled_tensor_transmits_across_interface() {
        // [G] → 0 and [P G] → 0 across x₃ = 0 (stress via FD gradients of the
        // columns, pseudo-stress weights).
        let g = green(1e-9);
        let m = medium();
        let eps = 1e-4;
        let hfd = 5e-5;
        let y = [0.3, -0.2, 0.8];
        let xp = [0.4, 0.25, eps];
        let xm = [0.4, 0.25, -eps];
        let frame = crate::elastic_fields::SurfaceFrame::new_3d([0.0, 0.0, 1.0]).unwrap();
        let w = crate::medium::StressWeights::pseudo(&m);
        for j in [1, 3] {
            let jet = |x0: [f64; 3]| {
                let u = g.column(j, x0, y).unwrap();
                let mut grad = crate::elastic_fields::czmat();
                for axis in 0..3 {
                    let mut xa = x0;
                    let mut xb = x0;
                    xa[axis] += hfd;
                    xb[axis] -= hfd;
                    let (ua, ub) = (g.column(j, xa, y).unwrap(), g.column(j, xb, y).unwrap());
                    for c in 0..3 {
                        grad[c][axis] = (ua[c] - ub[c]) / (2.0 * hfd);
                    }
                }
                crate::elastic_fields::FieldJet { u, grad, dim: 3 }
            };
            let up = jet(xp);
            let dn = jet(xm);
            for i in 0..3 {
                assert!(
                    (up.u[i] - dn.u[i]).norm() < 1e-3 * (1.0 + up.u[i].norm()),
                    "[G] column {j} comp {i}"
                );
            }
            let pu = crate::elastic_fields::stress_direct(&up, &frame, &w, m.mu);
            let pd = crate::elastic_fields::stress_direct(&dn, &frame, &w, m.mu);
            for i in 0..3 {
                assert!(
                    (pu[i] - pd[i]).norm() < 2e-3 * (1.0 + pu[i].norm()),
                    "[P G] column {j} comp {i}: {:?} vs {:?}",
                    pu[i],
                    pd[i]
                );
            }
        }
    }

    #[test]
    fn divergence_and_curl_of_columns_reproduce_potentials() {
        // div G_j = G_{p,j} and curl G_j = G_{s,j} (FD oracle on the column).
        let g = green(1e-9);
        let x = [0.7, 0.1, 0.9];
        let y = [-0.2, 0.3, -0.6];
        let h = 1e-3;
        let j = 2;
        let mut grad = crate::elastic_fields::czmat();
        for axis in 0..3 {
            let mut xa = x;
            let mut xb = x;
            xa[axis] += h;
            xb[axis] -= h;
            let (ua, ub) = (g.column(j, xa, y).unwrap(), g.column(j, xb, y).unwrap());
            for c in 0..3 {
                grad[c][axis] = (ua[c] - ub[c]) / (2.0 * h);
            }
        }
        let div = grad[0][0] + grad[1][1] + grad[2][2];
        let gp = g.potential(Potential3d::P(j), x, y).unwrap();
        assert!((div - gp.value).norm() < 1e-4 * (1.0 + gp.value.norm()), "div vs P potential");
        let curl = [
            grad[2][1] - grad[1][2],
            grad[0][2] - grad[2][0],
            grad[1][0] - grad[0][1],
        ];
        for l in 1..=3 {
            let gs = g.potential(Potential3d::S(j, l), x, y).unwrap();
            assert!(
                (curl[l - 1] - gs.value).norm() < 1e-4 * (1.0 + gs.value.norm()),
                "curl comp {l} vs shear potential"
            );
        }
    }

    #[test]
    fn vertical_axis_evaluation_is_continuous() {
        // x directly above y (ρ = 0) agrees with the limit of nearby off-axis
        // evaluations.
        let g = green(1e-10);
        let y = [0.4, -0.1, 0.7];
        let x0 = [0.4, -0.1, 1.9];
        let x1 = [0.4 + 1e-4, -0.1, 1.9];
        for kind in [Potential3d::P(3), Potential3d::S(1, 2), Potential3d::P(1)] {
            let v0 = g.potential(kind, x0, y).unwrap().value;
            let v1 = g.potential(kind, x1, y).unwrap().value;
            assert!((v0 - v1).norm() < 1e-3 * (1.0 + v0.norm()), "{kind:?}: {v0:?} vs {v1:?}");
        }
    }

    #[test]
    fn far_field_limits_of_correction() {
        let g = green(1e-10);
        let y = [0.3, -0.2, 0.6];
        // Zenith kills every x̂₁/x̂₂ monomial.
        let z = g.correction_far_field(Potential3d::P(1), PI / 2.0, 0.7, y).unwrap();
        assert!(z.value.norm() < 1e-14);
        // Grazing guard.
        assert!(matches!(
            g.correction_far_field(Potential3d::P(3), 1e-5, 0.0, y),
            Err(Error::GrazingDirection(_))
        ));
        // Convergence U(r x̂) ≈ e^{ikr}/r·F∞ with error fading faster than 1/r.
        let (theta, phi) = (0.8, 2.1_f64);
        let kind = Potential3d::P(3);
        let ff = g.correction_far_field(kind, theta, phi, y).unwrap();
        let kp = g.wn.kp(HalfSpace::Plus);
        let dir = [phi.cos() * theta.cos(), phi.sin() * theta.cos(), theta.sin()];
        let mut errs = Vec::new();
        for r in [50.0, 200.0, 800.0] {
            let x = [r * dir[0], r * dir[1], r * dir[2]];
            let u = g.correction(kind, x, y).unwrap();
            let pred = (Complex64::i() * kp * r).exp() / r * ff.value;
            errs.push((u.value - pred).norm() * r / ff.value.norm());
        }
        assert!(errs[2] < errs[0], "far-field relative errors not improving: {errs:?}");
        assert!(errs[2] < 0.05, "far-field mismatch {errs:?}");
        // Source gradient of the pattern vs FD in y.
        let hy = 1e-5;
        for c in 0..3 {
            let mut yp = y;
            let mut ym = y;
            yp[c] += hy;
            ym[c] -= hy;
            let fp = g.correction_far_field(kind, theta, phi, yp).unwrap().value;
            let fm = g.correction_far_field(kind, theta, phi, ym).unwrap().value;
            let fd = (fp - fm) / (2.0 * hy);
            assert!((ff.gradient_y[c] - fd).norm() < 1e-6 * (1.0 + fd.norm()), "gradient_y[{c}]");
        }
    }

    #[test]
    fn lower_far_field_matches_correction() {
        let g = green(1e-10);
        let y = [0.3, -0.2, 0.6];
        let (theta, phi) = (-0.9, 1.3_f64);
        let kind = Potential3d::S(3, 1);
        let ff = g.correction_far_field(kind, theta, phi, y).unwrap();
        let ks = g.wn.ks(HalfSpace::Minus);
        let dir = [phi.cos() * theta.cos(), phi.sin() * theta.cos(), theta.sin()];
        let r = 400.0;
        let x = [r * dir[0], r * dir[1], r * dir[2]];
        let u = g.correction(kind, x, y).unwrap();
        let pred = (Complex64::i() * ks * r).exp() / r * ff.value;
        assert!(
            (u.value - pred).norm() < 0.05 * ff.value.norm(),
            "lower far field: {:?} vs {pred:?}",
            u.value
        );
    }

    #[test]
    fn rejects_coincident_points_and_wrong_dimension() {
        let g = green(1e-10);
        assert!(matches!(
            g.assemble([0.3, 0.4, 0.5], [0.3, 0.4, 0.5]),
            Err(Error::CoincidentPoints(_))
        ));
        let m2 = ElasticMedium::new(1.1, 1.3, 1.0, 1.7, 1.9, 2).unwrap();
        assert!(Green3d::new(m2, quad(1e-10)).is_err());
        assert!(g.column(4, [0.0, 0.0, 1.0], [0.0, 0.0, 0.5]).is_err());
    }
}
