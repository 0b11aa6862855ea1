//! Gamma and Beta functions of the complex field.
//!
//! Gamma of a pair a|a' is computed from its closed forms as ratios of the
//! scalar Gamma function; the two primary forms are regular exactly where the
//! other degenerates, so selection is keyed on integer tests of a and a'.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exponents::FieldExponent;

/// Tolerance for deciding that a computed exponent component is an integer.
/// Components assembled from parameter combinations are snapped before
/// classification so pole detection does not flicker under float noise.
pub const INT_SNAP: f64 = 1e-9;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

fn is_real_integer(z: Complex64) -> Option<i64> {
    if z.im.abs() <= INT_SNAP {
        let r = z.re.round();
        if (z.re - r).abs() <= INT_SNAP {
            return Some(r as i64);
        }
    }
    None
}

/// Principal continuous log-Gamma for complex arguments (Lanczos, with the
/// reflection formula for Re z < 1/2).
pub fn lgamma_c(z: Complex64) -> Result<Complex64> {
    if let Some(k) = is_real_integer(z) {
        if k <= 0 {
            return Err(Error::PoleAtNonpositiveInteger(k as f64));
        }
    }
    Ok(lgamma_unchecked(z))
}

fn lgamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // log Gamma(z) = log pi - log sin(pi z) - log Gamma(1 - z)
        let log_sin = log_sin_pi(z);
        Complex64::new(PI.ln(), 0.0) - log_sin - lgamma_unchecked(Complex64::new(1.0, 0.0) - z)
    } else {
        let x = z - 1.0;
        let mut acc = Complex64::new(LANCZOS[0], 0.0);
        for (i, &p) in LANCZOS.iter().enumerate().skip(1) {
            acc += p / (x + i as f64);
        }
        let w = x + LANCZOS_G + 0.5;
        0.5 * (2.0 * PI).ln() + (x + 0.5) * w.ln() - w + acc.ln()
    }
}

/// log(sin(pi z)) without overflow for moderately large |Im z|.
fn log_sin_pi(z: Complex64) -> Complex64 {
    let iz = Complex64::new(0.0, PI) * z;
    if z.im > 0.0 {
        // sin(pi z) = -e^{-i pi z} (1 - e^{2 i pi z}) / (2i)
        let log_lead = -iz;
        let small = (2.0 * iz).exp();
        log_lead + (Complex64::new(1.0, 0.0) - small).ln()
            - (Complex64::new(0.0, 2.0)).ln()
            + Complex64::new(0.0, PI)
    } else {
        let log_lead = iz;
        let small = (-2.0 * iz).exp();
        log_lead + (Complex64::new(1.0, 0.0) - small).ln() - (Complex64::new(0.0, 2.0)).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Regular,
    Pole,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldGammaValue {
    pub value: Complex64,
    pub classification: Classification,
}

impl FieldGammaValue {
    pub fn is_pole(&self) -> bool {
        self.classification == Classification::Pole
    }
    pub fn is_zero(&self) -> bool {
        self.classification == Classification::Zero
    }
}

/// Gamma of the complex field at a pair a|a'.
///
/// Total: genuine poles (both components nonpositive integers) and genuine
/// zeros (both components positive integers) are classified, not evaluated.
pub fn gamma_field(e: &FieldExponent) -> FieldGammaValue {
    let a = e.holo;
    let a_anti = e.anti();
    let a_int = is_real_integer(a);
    let anti_int = is_real_integer(a_anti);
    let a_nonpos = matches!(a_int, Some(k) if k <= 0);
    let anti_nonpos = matches!(anti_int, Some(k) if k <= 0);
    let a_pos = matches!(a_int, Some(k) if k >= 1);
    let anti_pos = matches!(anti_int, Some(k) if k >= 1);

    if a_nonpos && anti_nonpos {
        return FieldGammaValue {
            value: Complex64::new(f64::INFINITY, f64::INFINITY),
            classification: Classification::Pole,
        };
    }
    if a_pos && anti_pos {
        return FieldGammaValue {
            value: Complex64::new(0.0, 0.0),
            classification: Classification::Zero,
        };
    }

    let one = Complex64::new(1.0, 0.0);
    let value = if !a_nonpos && !anti_pos {
        // form 1: i^k Gamma(a) / Gamma(1 - a')
        let lg = lgamma_unchecked(snap(a)) - lgamma_unchecked(snap(one - a_anti));
        e.i_pow() * lg.exp()
    } else {
        // form 2: i^{-k} Gamma(a') / Gamma(1 - a)
        let lg = lgamma_unchecked(snap(a_anti)) - lgamma_unchecked(snap(one - a));
        e.i_pow().conj() * lg.exp()
    };
    FieldGammaValue {
        value,
        classification: Classification::Regular,
    }
}

fn snap(z: Complex64) -> Complex64 {
    match is_real_integer(z) {
        Some(k) => Complex64::new(k as f64, 0.0),
        None => z,
    }
}

/// The sine-product closed form i^k Gamma(a) Gamma(a') sin(pi a') / pi,
/// used as an independent route in the three-form consistency checks.
pub fn gamma_field_sin_form(e: &FieldExponent) -> Result<Complex64> {
    let a = e.holo;
    let a_anti = e.anti();
    let lg = lgamma_c(a)? + lgamma_c(a_anti)?;
    let s = (a_anti * PI).sin();
    Ok(e.i_pow() * lg.exp() * s / PI)
}

/// Beta of the complex field: Gamma(a) Gamma(b) / Gamma(a+b), with the
/// singular combinations reported rather than guessed.
pub fn beta_field(a: &FieldExponent, b: &FieldExponent) -> Result<Complex64> {
    let ga = gamma_field(a);
    let gb = gamma_field(b);
    let gab = gamma_field(&a.add(b));
    let num_pole = ga.is_pole() || gb.is_pole();
    let num_zero = ga.is_zero() || gb.is_zero();
    match gab.classification {
        Classification::Pole => {
            if num_pole {
                Err(Error::IndeterminateRatio("beta_field"))
            } else {
                Ok(Complex64::new(0.0, 0.0))
            }
        }
        Classification::Zero => Err(Error::IndeterminateRatio("beta_field")),
        Classification::Regular => {
            if num_pole {
                Err(Error::IndeterminateRatio("beta_field"))
            } else if num_zero {
                Ok(Complex64::new(0.0, 0.0))
            } else {
                Ok(ga.value * gb.value / gab.value)
            }
        }
    }
}

/// Convergence predicate of the complex beta integral:
/// floor(a) > 0, floor(b) > 0, floor(a+b) < 1.
pub fn beta_domain_ok(a: &FieldExponent, b: &FieldExponent) -> bool {
    a.floor() > 0.0 && b.floor() > 0.0 && a.add(b).floor() < 1.0
}
