//! Reference computations shared by the integration tests. Nothing here calls
//! into the library's special functions.
#![allow(dead_code)]

use std::f64::consts::PI;

use riscr::model::RisConfigKind;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// erf from the all-positive series
/// `2/sqrt(pi) e^{-x^2} sum_n 2^n x^{2n+1} / (1*3*...*(2n+1))`.
/// No cancellation, so the error is a few ulps times the term count.
pub fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 1.0;
    while term.abs() > 1e-18 * sum.abs() {
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        n += 1.0;
    }
    2.0 / PI.sqrt() * (-x2).exp() * sum
}

/// erfc for `x >= 2` from the Laplace continued fraction
/// `e^{-x^2}/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`,
/// evaluated bottom-up with a fixed depth.
pub fn erfc_continued_fraction(x: f64) -> f64 {
    assert!(x >= 2.0);
    let mut tail = x;
    for k in (1..=400).rev() {
        tail = x + (k as f64 / 2.0) / tail;
    }
    (-x * x).exp() / PI.sqrt() / tail
}

pub fn erfc_oracle(x: f64) -> f64 {
    if x >= 2.0 {
        erfc_continued_fraction(x)
    } else {
        1.0 - erf_series(x)
    }
}

/// Upper Gaussian tail via the oracle erfc.
pub fn q_oracle(z: f64) -> f64 {
    if z >= 0.0 {
        0.5 * erfc_oracle(z / 2f64.sqrt())
    } else {
        1.0 - 0.5 * erfc_oracle(-z / 2f64.sqrt())
    }
}

fn rayleigh_ccdf(x: f64) -> f64 {
    (-0.5 * x * x).exp()
}

/// `P(A B > t)` for independent unit Rayleigh `A`, `B`, by Simpson's rule on
/// `int_0^inf a e^{-a^2/2} e^{-t^2/(2 a^2)} da`.
fn rayleigh_product_ccdf(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    const UPPER: f64 = 16.0;
    const INTERVALS: usize = 3200;
    let h = UPPER / INTERVALS as f64;
    let f = |a: f64| {
        if a == 0.0 {
            0.0
        } else {
            a * (-0.5 * a * a - t * t / (2.0 * a * a)).exp()
        }
    };
    let mut s = f(0.0) + f(UPPER);
    for i in 1..INTERVALS {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(i as f64 * h);
    }
    s * h / 3.0
}

/// Distribution of a sum of `n` i.i.d. terms, each discretised onto bins of
/// width `h`. Mass `m` sits at `(m + n/2) h` and is treated as spread
/// uniformly over one bin.
pub struct LatticeSum {
    pub h: f64,
    pub n: u32,
    pub mass: Vec<f64>,
}

impl LatticeSum {
    /// `P(S > x)`.
    pub fn sf(&self, x: f64) -> f64 {
        let u = x / self.h - self.n as f64 / 2.0;
        let mut acc = 0.0;
        for (m, &p) in self.mass.iter().enumerate() {
            let frac = (m as f64 + 0.5 - u).clamp(0.0, 1.0);
            acc += p * frac;
        }
        acc
    }

    pub fn mean(&self) -> f64 {
        let off = self.n as f64 / 2.0;
        self.mass
            .iter()
            .enumerate()
            .map(|(m, &p)| p * (m as f64 + off) * self.h)
            .sum()
    }
}

/// Exact (to discretisation) law of the summed gain for `kind`: sum of `n`
/// Rayleigh gains, or of `n` products of two independent Rayleigh gains.
pub fn gain_sum_distribution(kind: RisConfigKind, n: u32, h: f64) -> LatticeSum {
    let (ccdf, support): (fn(f64) -> f64, f64) = match kind {
        RisConfigKind::AccessPoint => (rayleigh_ccdf, 10.0),
        RisConfigKind::Relay => (rayleigh_product_ccdf, 45.0),
    };
    let bins = (support / h).ceil() as usize;
    let edges: Vec<f64> = (0..=bins).map(|k| ccdf(k as f64 * h)).collect();
    let single: Vec<f64> = edges.windows(2).map(|w| w[0] - w[1]).collect();

    let len = (n as usize * bins).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = (0..len)
        .map(|i| Complex::new(single.get(i).copied().unwrap_or(0.0), 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(len).process(&mut buf);
    for c in buf.iter_mut() {
        *c = c.powu(n);
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    let scale = 1.0 / len as f64;
    let mass = buf.iter().map(|c| (c.re * scale).max(0.0)).collect();
    LatticeSum { h, n, mass }
}
