//! Error function family.
//!
//! `erf`/`erfc` follow the FreeBSD `s_erf.c` rational approximations, which
//! carry the notice below. In the tail (`|x| >= 1.25`) `erfc` is evaluated in
//! the scaled form `exp(-x^2 - 0.5625 + R/S) / x`, so it never goes through
//! `1 - erf(x)` and stays relatively accurate down to the denormal range.
//!
//! ====================================================
//! Copyright (C) 1993 by Sun Microsystems, Inc. All rights reserved.
//!
//! Developed at SunPro, a Sun Microsystems, Inc. business.
//! Permission to use, copy, modify, and distribute this
//! software is freely granted, provided that this notice
//! is preserved.
//! ====================================================
#![allow(clippy::excessive_precision)]

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

const ERX: f64 = 8.45062911510467529297e-01;

// erf on [0, 0.84375]
const EFX: f64 = 1.28379167095512586316e-01;
const EFX8: f64 = 1.02703333676410069053e+00;
const PP: [f64; 5] = [
    1.28379167095512558561e-01,
    -3.25042107247001499370e-01,
    -2.84817495755985104766e-02,
    -5.77027029648944159157e-03,
    -2.37630166566501626084e-05,
];
const QQ: [f64; 5] = [
    3.97917223959155352819e-01,
    6.50222499887672944485e-02,
    5.08130628187576562776e-03,
    1.32494738004321644526e-04,
    -3.96022827877536812320e-06,
];

// erf on [0.84375, 1.25]
const PA: [f64; 7] = [
    -2.36211856075265944077e-03,
    4.14856118683748331666e-01,
    -3.72207876035701323847e-01,
    3.18346619901161753674e-01,
    -1.10894694282396677476e-01,
    3.54783043256182359371e-02,
    -2.16637559486879084300e-03,
];
const QA: [f64; 6] = [
    1.06420880400844228286e-01,
    5.40397917702171048937e-01,
    7.18286544141962662868e-02,
    1.26171219808761642112e-01,
    1.36370839120290507362e-02,
    1.19844998467991074170e-02,
];

// erfc on [1.25, 1/0.35]
const RA: [f64; 8] = [
    -9.86494403484714822705e-03,
    -6.93858572707181764372e-01,
    -1.05586262253232909814e+01,
    -6.23753324503260060396e+01,
    -1.62396669462573470355e+02,
    -1.84605092906711035994e+02,
    -8.12874355063065934246e+01,
    -9.81432934416914548592e+00,
];
const SA: [f64; 8] = [
    1.96512716674392571292e+01,
    1.37657754143519042600e+02,
    4.34565877475229228821e+02,
    6.45387271733267880336e+02,
    4.29008140027567833386e+02,
    1.08635005541779435134e+02,
    6.57024977031928170135e+00,
    -6.04244152148580987438e-02,
];

// erfc on [1/0.35, 28]
const RB: [f64; 7] = [
    -9.86494292470009928597e-03,
    -7.99283237680523006574e-01,
    -1.77579549177547519889e+01,
    -1.60636384855821916062e+02,
    -6.37566443368389627722e+02,
    -1.02509513161107724954e+03,
    -4.83519191608651397019e+02,
];
const SB: [f64; 7] = [
    3.03380607434824582924e+01,
    3.25792512996573918826e+02,
    1.53672958608443695994e+03,
    3.19985821950859553908e+03,
    2.55305040643316442583e+03,
    4.74528541206955367215e+02,
    -2.24409524465858183362e+01,
];

const VERY_TINY: f64 = 2.848094538889218e-306;
const SMALL: f64 = 3.725290298461914e-9; // 2^-28
const TINY: f64 = 1.3877787807814457e-17; // 2^-56

/// Horner evaluation, coefficients in ascending order.
#[inline]
fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// `1 + x * poly(coeffs, x)`: the denominators all have an implicit leading 1.
#[inline]
fn poly1(coeffs: &[f64], x: f64) -> f64 {
    1.0 + x * poly(coeffs, x)
}

/// `erf(|x|)` rational part on `[0, 0.84375)`, returned as `y` with `erf(x) = x + x*y`.
#[inline]
fn small_ratio(x: f64) -> f64 {
    let z = x * x;
    poly(&PP, z) / poly1(&QQ, z)
}

/// `P/Q` for `|x|` in `[0.84375, 1.25)`, with `erf(|x|) = ERX + P/Q`.
#[inline]
fn near_one_ratio(x: f64) -> f64 {
    let s = x - 1.0;
    poly(&PA, s) / poly1(&QA, s)
}

/// Scaled tail `erfc(x)` for `x` in `[1.25, 28)`.
fn tail(x: f64) -> f64 {
    let s = 1.0 / (x * x);
    let (r, q) = if x < 1.0 / 0.35 {
        (poly(&RA, s), poly1(&SA, s))
    } else {
        (poly(&RB, s), poly1(&SB, s))
    };
    // Truncate x to 32 significant bits so z*z is exact.
    let z = f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000);
    (-z * z - 0.5625).exp() * ((z - x) * (z + x) + r / q).exp() / x
}

/// The error function `2/sqrt(pi) * integral_0^x exp(-t^2) dt`.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let value = if ax < 0.84375 {
        if ax < SMALL {
            if ax < VERY_TINY {
                0.125 * (8.0 * ax + EFX8 * ax)
            } else {
                ax + EFX * ax
            }
        } else {
            ax + ax * small_ratio(ax)
        }
    } else if ax < 1.25 {
        ERX + near_one_ratio(ax)
    } else if ax >= 6.0 {
        1.0
    } else {
        1.0 - tail(ax)
    };
    value.copysign(x)
}

/// The complementary error function `1 - erf(x)`, without cancellation for large `x`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let negative = x < 0.0;
    if ax < 0.84375 {
        let t = if ax < TINY {
            ax
        } else {
            let y = small_ratio(ax);
            if ax < 0.25 {
                ax + ax * y
            } else {
                0.5 + (ax * y + (ax - 0.5))
            }
        };
        return if negative { 1.0 + t } else { 1.0 - t };
    }
    if ax < 1.25 {
        let pq = near_one_ratio(ax);
        return if negative {
            1.0 + ERX + pq
        } else {
            1.0 - ERX - pq
        };
    }
    if ax < 28.0 {
        if negative && ax > 6.0 {
            return 2.0;
        }
        let r = tail(ax);
        return if negative { 2.0 - r } else { r };
    }
    if negative {
        2.0
    } else {
        0.0
    }
}

/// `Pr(Z > z)` for a standard normal `Z`.
pub fn gaussian_upper_tail(z: f64) -> f64 {
    0.5 * erfc(z * FRAC_1_SQRT_2)
}

/// Lower-tail standard normal quantile (Acklam's rational approximation,
/// relative error about 1.15e-9). Only used to seed [`inv_erfc`].
fn normal_quantile_seed(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let rational_tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < P_LOW {
        rational_tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -rational_tail((-2.0 * (1.0 - p).ln()).sqrt())
    }
}

/// Inverse of [`erfc`] on `(0, 2)`.
///
/// Starts from a rational normal-quantile approximation and polishes with
/// Halley steps on `erfc(x) - p`. Arguments above 1 are reflected through
/// `inv_erfc(p) = -inv_erfc(2 - p)` so the iteration always runs in the
/// tail where `erfc` has full relative accuracy.
pub fn inv_erfc(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 2.0) {
        return Err(Error::domain("inv_erfc argument", p, "must lie in (0, 2)"));
    }
    if p == 1.0 {
        return Ok(0.0);
    }
    let (target, sign) = if p > 1.0 { (2.0 - p, -1.0) } else { (p, 1.0) };

    // erfc(x) = 2 * Q(x * sqrt(2)), so x = -Phi^-1(p/2) / sqrt(2).
    let mut x = -normal_quantile_seed(0.5 * target) * FRAC_1_SQRT_2;
    let two_over_sqrt_pi = 2.0 / PI.sqrt();
    for _ in 0..8 {
        let residual = erfc(x) - target;
        let deriv = -two_over_sqrt_pi * (-x * x).exp();
        if deriv == 0.0 {
            break;
        }
        let u = residual / deriv;
        // erfc'' = -2x erfc', so the Halley correction is u / (1 + x u).
        let step = u / (1.0 + x * u);
        x -= step;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
            break;
        }
    }
    Ok(sign * x)
}
