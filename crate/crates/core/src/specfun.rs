//! Bessel and Hankel functions J_m, Y_m, H_m^{(1)} of orders 0–2 for complex
//! arguments.
//!
//! Three evaluation regimes:
//!
//! * `|z| ≤ 6` — plain power series (no cancellation at this size),
//! * `6 < |z| ≤ SWITCH_RADIUS` — Miller backward recurrence for J_m
//!   (cancellation-free), logarithmic power series for Y_0/Y_1, recurrence for
//!   Y_2,
//! * `|z| > SWITCH_RADIUS` — optimally truncated Hankel asymptotic expansions
//!   H^{(1,2)}_m(z) ~ √(2/πz)·e^{±iχ}·Σ (±i)^k a_k(m)/z^k, χ = z − mπ/2 − π/4,
//!   with J = (H¹+H²)/2 and Y = (H¹−H²)/(2i).
//!
//! The principal branch −π < arg z ≤ π is used throughout (Y and H have their
//! cut on the negative real axis; the logarithmic series takes the principal
//! log there, which is the limit from above).

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::{Error, Result};

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Radius where evaluation switches from series/recurrence to asymptotics.
/// Calibrated in the overlap band |z| ∈ [8,16]: the asymptotic optimal
/// truncation error falls below 1e−12 near |z| ≈ 14, while the Y-series
/// cancellation stays below ~3e−12 absolute up to that size.
const SWITCH_RADIUS: f64 = 14.0;

/// Joint value record for one order and argument.
#[derive(Debug, Clone, Copy)]
pub struct CylFunValue {
    pub order: usize,
    pub argument: Complex64,
    pub j: Complex64,
    pub y: Complex64,
    pub h1: Complex64,
}

/// Map a negative-zero imaginary part to +0.0 so that points on the negative
/// real axis take arg = +π (the convention −π < arg z ≤ π); `-z` on a real
/// `z` would otherwise land on the wrong side of the logarithmic cut.
fn normalize_arg(z: Complex64) -> Complex64 {
    Complex64::new(z.re, z.im + 0.0)
}

fn check_order(m: usize) -> Result<()> {
    if m > 2 {
        return Err(Error::Domain(format!("cylinder-function order {m} out of supported range 0..=2")));
    }
    Ok(())
}

fn check_overflow(z: Complex64) -> Result<()> {
    if z.im.abs() > 690.0 {
        return Err(Error::Domain(format!("|Im z| = {} overflows e^|Im z|", z.im.abs())));
    }
    Ok(())
}

/// Bessel function of the first kind, J_m(z), m ∈ {0,1,2}.
pub fn bessel_j(m: usize, z: Complex64) -> Result<Complex64> {
    let z = normalize_arg(z);
    check_order(m)?;
    check_overflow(z)?;
    let r = z.norm();
    if r <= 6.0 {
        Ok(j_series(m, z))
    } else if r <= SWITCH_RADIUS {
        Ok(j_miller(z)[m])
    } else {
        Ok(j_asymptotic(m, z))
    }
}

/// J_m in the asymptotic regime.  For Re z < 0 the H^{(2)} expansion sits on
/// its Stokes boundary (arg z → π), so the exact parity J_m(z) = (−1)^m J_m(−z)
/// moves the evaluation into the right half-plane first.
fn j_asymptotic(m: usize, z: Complex64) -> Complex64 {
    if z.re < 0.0 {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let (h1, h2) = hankel_asymptotic_pair(m, normalize_arg(-z));
        sign * 0.5 * (h1 + h2)
    } else {
        let (h1, h2) = hankel_asymptotic_pair(m, z);
        0.5 * (h1 + h2)
    }
}

/// Bessel function of the second kind, Y_m(z); z ≠ 0, principal branch.
pub fn bessel_y(m: usize, z: Complex64) -> Result<Complex64> {
    let z = normalize_arg(z);
    check_order(m)?;
    check_overflow(z)?;
    if z.norm() == 0.0 {
        return Err(Error::Domain("Y_m is singular at z = 0".into()));
    }
    if z.norm() <= SWITCH_RADIUS {
        let y0 = y0_series(z);
        if m == 0 {
            return Ok(y0);
        }
        let y1 = y1_series(z);
        if m == 1 {
            return Ok(y1);
        }
        Ok(2.0 / z * y1 - y0)
    } else {
        // Y = (H¹ − J)/i avoids the H^{(2)} expansion entirely: both pieces
        // stay accurate across the whole cut plane via their own reflections.
        Ok((h1_asymptotic(m, z) - j_asymptotic(m, z)) / Complex64::i())
    }
}

/// Hankel function of the first kind, H_m^{(1)}(z) = J_m(z) + iY_m(z).
pub fn hankel1(m: usize, z: Complex64) -> Result<Complex64> {
    let z = normalize_arg(z);
    check_order(m)?;
    check_overflow(z)?;
    if z.norm() == 0.0 {
        return Err(Error::Domain("H_m^{(1)} is singular at z = 0".into()));
    }
    if z.norm() <= SWITCH_RADIUS {
        if z.im > 2.0 {
            // H¹ is exponentially subdominant for Im z > 0, so J + iY loses
            // ~2·Im z/ln 10 digits to cancellation; evaluate it directly
            // through K_m instead.
            Ok(hankel1_via_k(m, z))
        } else {
            Ok(bessel_j(m, z)? + Complex64::i() * bessel_y(m, z)?)
        }
    } else {
        Ok(h1_asymptotic(m, z))
    }
}

/// H^{(1)}_m in the asymptotic regime.  In the lower-left quadrant the H^{(1)}
/// expansion sits near its Stokes boundary (arg z → −π) and its accuracy
/// floor degrades to the subdominant exponential e^{2·Im z}; the exact
/// continuation H^{(1)}_m(z) = (−1)^m·[H^{(1)}_m(−z) + 2J_m(−z)] moves the
/// evaluation into the upper-right quadrant where both pieces are accurate.
fn h1_asymptotic(m: usize, z: Complex64) -> Complex64 {
    if z.re < 0.0 && z.im < 0.0 {
        let w = normalize_arg(-z);
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        sign * (hankel_asymptotic(m, w, true) + 2.0 * j_asymptotic(m, w))
    } else {
        hankel_asymptotic(m, z, true)
    }
}

/// H^{(1)}_m(z) = (2/π)·i^{−m−1}·K_m(−iz), valid for arg z ∈ (−π/2, π].
fn hankel1_via_k(m: usize, z: Complex64) -> Complex64 {
    let k = k_cf2(normalize_arg(-Complex64::i() * z));
    let i_pow = match m {
        0 => Complex64::new(0.0, -1.0), // i^{−1}
        1 => Complex64::new(-1.0, 0.0), // i^{−2}
        _ => Complex64::new(0.0, 1.0),  // i^{−3}
    };
    (2.0 / PI) * i_pow * k[m]
}

/// Modified Bessel functions [K_0, K_1, K_2](w) via the Thompson–Barnett
/// continued fraction, convergent for Re w > 0; K_2 by upward recurrence
/// (stable, K is the dominant solution in increasing order).
fn k_cf2(w: Complex64) -> [Complex64; 3] {
    let one = Complex64::new(1.0, 0.0);
    let mut b = 2.0 * (one + w);
    let mut d = one / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = Complex64::new(0.0, 0.0);
    let mut q2 = one;
    let a1 = Complex64::new(0.25, 0.0);
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = one + q * delh;
    for i in 2..1000u32 {
        a -= 2.0 * (i as f64 - 1.0);
        c = -a * c / (i as f64);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = one / (b + a * d);
        delh = (b * d - one) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if dels.norm() < 1e-16 * s.norm() {
            break;
        }
    }
    h = a1 * h;
    let k0 = (PI / (2.0 * w)).sqrt() * (-w).exp() / s;
    let k1 = k0 * (w + 0.5 - h) / w;
    let k2 = k0 + 2.0 / w * k1;
    [k0, k1, k2]
}

/// J, Y and H^{(1)} together.
pub fn cyl_fun(m: usize, z: Complex64) -> Result<CylFunValue> {
    let j = bessel_j(m, z)?;
    let y = bessel_y(m, z)?;
    // H¹ is evaluated independently: for Im z > 0 the combination J + iY
    // cancels catastrophically while hankel1 stays accurate.
    Ok(CylFunValue { order: m, argument: z, j, y, h1: hankel1(m, z)? })
}

/// Power series J_m(z) = (z/2)^m Σ_k (−1)^k (z²/4)^k / (k!(k+m)!).
fn j_series(m: usize, z: Complex64) -> Complex64 {
    let q = z * z * 0.25;
    let mut fact_m = 1.0;
    for i in 1..=m {
        fact_m *= i as f64;
    }
    let mut term = (0.5 * z).powu(m as u32) / fact_m;
    let mut sum = term;
    for k in 1..60 {
        term *= -q / ((k * (k + m)) as f64);
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-280) {
            break;
        }
    }
    sum
}

/// Miller backward recurrence; returns [J0, J1, J2].  Normalization uses
/// e^{∓iz} = J0(z) + 2·Σ_{k≥1} (∓i)^k J_k(z), with the sign chosen so the
/// target is the exponentially *large* combination: its terms then add
/// coherently.  (The classic J0 + 2ΣJ_{2k} = 1 normalization has terms of
/// size e^{|Im z|} summing to 1, losing ~2|Im z|/ln 10 digits off the axis.)
fn j_miller(z: Complex64) -> [Complex64; 3] {
    let r = z.norm();
    let start = (1.5 * r + 36.0) as usize;
    let n_start = if start % 2 == 0 { start } else { start + 1 };
    // Start from O(1) seeds: keeping the unnormalized values near unity avoids
    // underflow in the final complex divisions.
    let mut jp1 = Complex64::new(0.0, 0.0);
    let mut j = Complex64::new(1.0, 0.0);
    let mut norm = Complex64::new(0.0, 0.0); // accumulates J0 + 2Σ(∓i)^k J_k
    let mut out = [Complex64::new(0.0, 0.0); 3];
    let two_over_z = 2.0 / z;
    let iu = if z.im >= 0.0 { Complex64::new(0.0, -1.0) } else { Complex64::new(0.0, 1.0) };
    let iu_pow = [Complex64::new(1.0, 0.0), iu, -Complex64::new(1.0, 0.0), -iu];
    for n in (0..=n_start).rev() {
        // j currently holds J_n (unnormalized).
        norm += if n == 0 { j } else { 2.0 * iu_pow[n % 4] * j };
        if n <= 2 {
            out[n] = j;
        }
        if n > 0 {
            let jm1 = (n as f64) * two_over_z * j - jp1;
            jp1 = j;
            j = jm1;
            // Rescale to avoid overflow of the unnormalized recurrence.
            if j.norm() > 1e200 {
                let s = 1e-200;
                j *= s;
                jp1 *= s;
                norm *= s;
                for v in &mut out {
                    *v *= s;
                }
            }
        }
    }
    let scale = (iu * z).exp() / norm; // e^{∓iz} / (unnormalized sum)
    [out[0] * scale, out[1] * scale, out[2] * scale]
}

/// Y0 logarithmic series.
fn y0_series(z: Complex64) -> Complex64 {
    let lg = (0.5 * z).ln() + EULER_GAMMA;
    let j0 = j_series_or_miller(0, z);
    let q = z * z * 0.25;
    // Σ_{k≥1} (−1)^{k+1} H_k q^k / (k!)²
    let mut term = Complex64::new(1.0, 0.0);
    let mut hk = 0.0;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..80 {
        term *= q / ((k * k) as f64);
        hk += 1.0 / k as f64;
        let contrib = if k % 2 == 1 { term * hk } else { -term * hk };
        sum += contrib;
        if term.norm() * hk < 1e-18 * sum.norm().max(1e-280) {
            break;
        }
    }
    (2.0 / PI) * (lg * j0 + sum)
}

/// Y1 logarithmic series (A&S 9.1.11 with n = 1, ψ(k+1) = −γ + H_k).
fn y1_series(z: Complex64) -> Complex64 {
    let lg = (0.5 * z).ln() + EULER_GAMMA;
    let j1 = j_series_or_miller(1, z);
    let q = z * z * 0.25;
    // Σ_{k≥0} (−1)^k (H_k + H_{k+1}) (z/2)^{2k+1} / (k!(k+1)!)
    let mut term = 0.5 * z; // k = 0 base (z/2)/(0!·1!)
    let mut hk = 0.0;
    let mut hk1 = 1.0;
    let mut sum = term * (hk + hk1);
    for k in 1..80 {
        term *= -q / ((k * (k + 1)) as f64);
        hk += 1.0 / k as f64;
        hk1 += 1.0 / (k + 1) as f64;
        sum += term * (hk + hk1);
        if term.norm() * (hk + hk1) < 1e-18 * sum.norm().max(1e-280) {
            break;
        }
    }
    (2.0 / PI) * lg * j1 - 2.0 / (PI * z) - sum / PI
}

fn j_series_or_miller(m: usize, z: Complex64) -> Complex64 {
    if z.norm() <= 6.0 {
        j_series(m, z)
    } else {
        j_miller(z)[m]
    }
}

/// Optimally truncated Hankel asymptotic expansion; `first_kind` selects
/// H^{(1)} (e^{+iχ}, +i^k) versus H^{(2)} (e^{−iχ}, (−i)^k).
fn hankel_asymptotic(m: usize, z: Complex64, first_kind: bool) -> Complex64 {
    let chi = z - (0.5 * m as f64 + 0.25) * PI;
    let phase = if first_kind { (Complex64::i() * chi).exp() } else { (-Complex64::i() * chi).exp() };
    let pref = (2.0 / (PI * z)).sqrt() * phase;
    let iu = if first_kind { Complex64::i() } else { -Complex64::i() };
    let fm = 4.0 * (m * m) as f64;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last_mag = term.norm();
    for k in 1..40 {
        let kk = k as f64;
        term *= iu * (fm - (2.0 * kk - 1.0).powi(2)) / (8.0 * kk) / z;
        // Stop at the smallest term (asymptotic optimal truncation).
        if term.norm() >= last_mag {
            break;
        }
        sum += term;
        last_mag = term.norm();
        if last_mag < 1e-18 {
            break;
        }
    }
    pref * sum
}

fn hankel_asymptotic_pair(m: usize, z: Complex64) -> (Complex64, Complex64) {
    (hankel_asymptotic(m, z, true), hankel_asymptotic(m, z, false))
}
