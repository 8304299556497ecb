use std::f64::consts::PI;

use super::EULER_GAMMA;
use crate::error::{domain, Error, Result};

const RESCALE: f64 = 1e250;

/// `(e^x K_0(x), e^x K_1(x))` for `x > 0`.
pub(crate) fn k01_scaled(x: f64) -> (f64, f64) {
    if x <= 2.0 {
        let (k0, k1) = k01_series(x);
        let e = x.exp();
        (k0 * e, k1 * e)
    } else {
        k01_steed(x)
    }
}

fn k01_series(x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    // t0 = q^k/(k!)^2, t1 = q^k/(k!(k+1)!)
    let mut t0 = 1.0;
    let mut t1 = 1.0;
    let mut h = 0.0;
    let mut i0 = 1.0;
    let mut s0 = 0.0;
    let mut i1 = 1.0;
    let mut s1 = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        h += 1.0 / k;
        t0 *= q / (k * k);
        t1 *= q / (k * (k + 1.0));
        i0 += t0;
        s0 += h * t0;
        i1 += t1;
        s1 += (h + h + 1.0 / (k + 1.0)) * t1;
        if t0 < 1e-18 * i0 && t1 < 1e-18 * i1 {
            break;
        }
    }
    let k0 = -lg * i0 + s0;
    let i1 = 0.5 * x * i1;
    let k1 = 1.0 / x + lg * i1 - 0.25 * x * s1;
    (k0, k1)
}

// Steed's continued fraction for order 0 and 1, already scaled by e^x.
fn k01_steed(x: f64) -> (f64, f64) {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..100_000 {
        let fi = f64::from(i);
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    let h = a1 * h;
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

fn check_arg(function: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(domain(
            function,
            format!("argument must be positive and finite, got {x}"),
        ))
    }
}

/// `e^x K_v(x)` for integer order `v`.
///
/// Returns [`Error::Overflow`] when the scaled value exceeds the `f64`
/// range; [`ln_bessel_k`] stays finite there.
pub fn bessel_k_scaled(v: u32, x: f64) -> Result<f64> {
    check_arg("bessel_k_scaled", x)?;
    let (mut prev, mut cur) = k01_scaled(x);
    if v == 0 {
        return Ok(prev);
    }
    for j in 1..v {
        let next = prev + 2.0 * f64::from(j) / x * cur;
        prev = cur;
        cur = next;
        if !(cur < 1e300) {
            return Err(Error::Overflow {
                function: "bessel_k_scaled",
            });
        }
    }
    Ok(cur)
}

/// `K_v(x)`; underflows to zero for large `x`.
pub fn bessel_k(v: u32, x: f64) -> Result<f64> {
    match bessel_k_scaled(v, x) {
        Ok(k) => Ok(k * (-x).exp()),
        Err(Error::Overflow { .. }) => {
            let ln = ln_bessel_k(v, x)?;
            if ln < 709.0 {
                Ok(ln.exp())
            } else {
                Err(Error::Overflow { function: "bessel_k" })
            }
        }
        Err(e) => Err(e),
    }
}

/// `ln K_v(x)`, finite for every positive `x` and integer `v`.
pub fn ln_bessel_k(v: u32, x: f64) -> Result<f64> {
    Ok(*ln_bessel_k_upto(v, x)?.last().expect("nonempty"))
}

/// `ln K_j(x)` for all `j = 0..=vmax`.
pub fn ln_bessel_k_upto(vmax: u32, x: f64) -> Result<Vec<f64>> {
    check_arg("ln_bessel_k", x)?;
    let (k0, k1) = k01_scaled(x);
    let mut out = Vec::with_capacity(vmax as usize + 1);
    out.push(k0.ln() - x);
    if vmax == 0 {
        return Ok(out);
    }
    out.push(k1.ln() - x);
    let mut ln_scale = -x;
    let (mut prev, mut cur) = (k0, k1);
    for j in 1..vmax {
        let mut next = prev + 2.0 * f64::from(j) / x * cur;
        if next > RESCALE {
            prev = cur / next;
            ln_scale += next.ln();
            next = 1.0;
        } else {
            prev = cur;
        }
        cur = next;
        out.push(cur.ln() + ln_scale);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadOptions};
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    // K_v(x) = ∫₀^∞ e^{-x cosh t} cosh(vt) dt, scaled by e^x
    fn integral_oracle(v: u32, x: f64) -> f64 {
        let v = f64::from(v);
        let f = |t: f64| (-x * (t.cosh() - 1.0) + v * t).exp() * 0.5 * (1.0 + (-2.0 * v * t).exp());
        let mut upper = 1.0f64;
        while x * (upper.cosh() - 1.0) - v * upper < 50.0 {
            upper += 0.5;
        }
        integrate(f, 0.0, upper, &QuadOptions::new(1e-13, 0.0)).unwrap().value
    }

    #[test]
    fn known_values() {
        assert!(rel(bessel_k_scaled(0, 1.0).unwrap(), 1.144_463_079_806_895) < 1e-14);
        assert!(rel(bessel_k(1, 2.0).unwrap(), 0.139_865_881_816_522_43) < 1e-14);
        assert!(bessel_k_scaled(0, 0.0).is_err());
        assert!(bessel_k_scaled(0, -1.0).is_err());
    }

    #[test]
    fn matches_integral_representation() {
        for &x in &[1e-2, 0.3, 1.0, 1.9, 2.1, 5.0, 30.0, 400.0] {
            for v in [0, 1, 2, 5, 12, 60] {
                let got = bessel_k_scaled(v, x).unwrap();
                let want = integral_oracle(v, x);
                assert!(rel(got, want) < 1e-10, "v={v} x={x}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn small_argument_limit() {
        // x^v K_v(x) -> 2^{v-1} (v-1)!
        for v in 1..=10u32 {
            let limit: f64 = 2f64.powi(v as i32 - 1) * (1..v).map(f64::from).product::<f64>();
            for k in 4..=8 {
                let x = 10f64.powi(-k);
                let val = (f64::from(v) * x.ln() + ln_bessel_k(v, x).unwrap()).exp();
                assert!(rel(val, limit) < 1e-6, "v={v} x={x}: {val}");
            }
        }
        let x = 1e-6;
        assert!((x * x * bessel_k(2, x).unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn overflow_reported() {
        assert!(matches!(bessel_k_scaled(2000, 1e-8), Err(Error::Overflow { .. })));
        assert!(ln_bessel_k(2000, 1e-8).unwrap().is_finite());
    }

    #[test]
    fn log_variant_agrees_with_scaled() {
        for &x in &[1e-3, 0.7, 3.0, 50.0, 1e4] {
            for v in [0, 3, 40, 300] {
                if let Ok(k) = bessel_k_scaled(v, x) {
                    let ln = ln_bessel_k(v, x).unwrap() + x;
                    assert!((ln - k.ln()).abs() < 1e-12 * ln.abs().max(1.0));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn upward_recurrence(v in 1u32..1999, lx in -8.0f64..4.0) {
            let x = 10f64.powf(lx);
            let all = ln_bessel_k_upto(v + 1, x).unwrap();
            let (a, b, c) = (all[v as usize - 1], all[v as usize], all[v as usize + 1]);
            // K_{v+1} = K_{v-1} + (2v/x) K_v, compared in log space
            let rhs = b + (2.0 * f64::from(v) / x).ln() + ((a - b - (2.0 * f64::from(v) / x).ln()).exp()).ln_1p();
            prop_assert!(((c - rhs) / c.abs().max(1.0)).abs() < 1e-9);
        }
    }
}
