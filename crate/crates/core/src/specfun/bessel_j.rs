use std::f64::consts::{FRAC_1_SQRT_2, PI};

const ASYMPTOTIC_CUT: f64 = 25.0;

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x < 1.0 {
        series(0, x)
    } else if x < ASYMPTOTIC_CUT {
        miller(x).0
    } else {
        hankel(0, x)
    }
}

/// Bessel function of the first kind, order one.
pub fn bessel_j1(x: f64) -> f64 {
    let s = x.signum();
    let x = x.abs();
    let v = if x < 1.0 {
        series(1, x)
    } else if x < ASYMPTOTIC_CUT {
        miller(x).1
    } else {
        hankel(1, x)
    };
    s * v
}

/// The `k`-th positive zero of `J_0` (`k >= 1`).
pub fn bessel_j0_zero(k: u32) -> f64 {
    let beta = (f64::from(k) - 0.25) * PI;
    let b8 = 1.0 / (8.0 * beta);
    let mut j = beta + b8 - 124.0 / 3.0 * b8.powi(3);
    for _ in 0..8 {
        let step = bessel_j0(j) / bessel_j1(j);
        j += step;
        if step.abs() < 1e-16 * j {
            break;
        }
    }
    j
}

fn series(order: u32, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = if order == 0 { 1.0 } else { 0.5 * x };
    let mut sum = term;
    for k in 1..40 {
        let k = f64::from(k);
        term *= q / (k * (k + f64::from(order)));
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

// Backward recurrence normalised by 1 = J0 + 2 sum J_2k.
fn miller(x: f64) -> (f64, f64) {
    let start = 2 * ((x + 15.0 * x.cbrt() + 30.0) as u32 / 2);
    let two_x = 2.0 / x;
    let mut jp = 0.0;
    let mut j = 1e-30;
    let mut norm = 0.0;
    let mut j1 = 0.0;
    for n in (1..=start).rev() {
        let jm = f64::from(n) * two_x * j - jp;
        jp = j;
        j = jm;
        if n == 2 {
            j1 = j;
        }
        // j now holds J_{n-1}
        if (n - 1) % 2 == 0 && n > 1 {
            norm += j;
        }
        if j.abs() > 1e200 {
            j *= 1e-200;
            jp *= 1e-200;
            norm *= 1e-200;
            j1 *= 1e-200;
        }
    }
    let j0 = j;
    let norm = j0 + 2.0 * norm;
    (j0 / norm, j1 / norm)
}

fn hankel(order: u32, x: f64) -> f64 {
    let mu = 4.0 * f64::from(order * order);
    let z = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = f64::from(k);
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (kf * z);
        if term.abs() > prev {
            break;
        }
        prev = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let (s, c) = x.sin_cos();
    let (cos_chi, sin_chi) = if order == 0 {
        ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2)
    } else {
        ((s - c) * FRAC_1_SQRT_2, -(s + c) * FRAC_1_SQRT_2)
    };
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}
