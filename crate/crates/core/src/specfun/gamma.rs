use super::{erfc, LogSigned, EULER_GAMMA};
use crate::error::{domain, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

// zeta(k) - 1 for k = 2..=40
const ZETA_M1: [f64; 39] = [
    0.644_934_066_848_226_4,
    0.202_056_903_159_594_3,
    0.082_323_233_711_138_19,
    0.036_927_755_143_369_93,
    0.017_343_061_984_449_14,
    0.008_349_277_381_922_827,
    0.004_077_356_197_944_339,
    0.002_008_392_826_082_214,
    0.000_994_575_127_818_085_3,
    0.000_494_188_604_119_464_6,
    0.000_246_086_553_308_048_3,
    0.000_122_713_347_578_489_1,
    6.124_813_505_870_483e-5,
    3.058_823_630_702_049e-5,
    1.528_225_940_865_187e-5,
    7.637_197_637_899_762e-6,
    3.817_293_264_999_84e-6,
    1.908_212_716_553_939e-6,
    9.539_620_338_727_961e-7,
    4.769_329_867_878_065e-7,
    2.384_505_027_277_33e-7,
    1.192_199_259_653_111e-7,
    5.960_818_905_125_948e-8,
    2.980_350_351_465_228e-8,
    1.490_155_482_836_504e-8,
    7.450_711_789_835_429e-9,
    3.725_334_024_788_457e-9,
    1.862_659_723_513_049e-9,
    9.313_274_324_196_682e-10,
    4.656_629_065_033_784e-10,
    2.328_311_833_676_505e-10,
    1.164_155_017_270_052e-10,
    5.820_772_087_902_701e-11,
    2.910_385_044_497_1e-11,
    1.455_192_189_104_198e-11,
    7.275_959_835_057_481e-12,
    3.637_979_547_378_651e-12,
    1.818_989_650_307_066e-12,
    9.094_947_840_263_889e-13,
];

/// `ln Γ(2 + z)` for `|z| <= 1/2`, from the Taylor series about 2.
fn ln_gamma_near_two(z: f64) -> f64 {
    let mut acc = 0.0;
    let mut zk = z;
    for (i, c) in ZETA_M1.iter().enumerate() {
        let k = i + 2;
        zk *= z;
        let term = c * zk / k as f64;
        acc += if k % 2 == 0 { term } else { -term };
    }
    (1.0 - EULER_GAMMA) * z + acc
}

fn ln_gamma_stirling(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    let series = r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 / 1188.0))));
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + series
}

/// Exact `(n-1)!` for `n <= 23`.
fn small_factorial(n: u32) -> f64 {
    (1..n).map(f64::from).product()
}

/// Natural log of the Gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(domain(
            "ln_gamma",
            format!("argument must be positive and finite, got {x}"),
        ));
    }
    Ok(ln_gamma_pos(x))
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x == x.floor() && x <= 23.0 {
        return small_factorial(x as u32).ln();
    }
    if x < 0.5 {
        return ln_gamma_pos(x + 1.0) - x.ln();
    }
    if x < 1.5 {
        let z = x - 1.0;
        return ln_gamma_near_two(z) - z.ln_1p();
    }
    if x < 2.5 {
        return ln_gamma_near_two(x - 2.0);
    }
    if x < 15.0 {
        let mut y = x;
        let mut prod = 1.0;
        while y >= 2.5 {
            y -= 1.0;
            prod *= y;
        }
        return ln_gamma_near_two(y - 2.0) + prod.ln();
    }
    ln_gamma_stirling(x)
}

/// `ln n!` for nonnegative integers.
pub fn ln_factorial(n: u64) -> f64 {
    ln_gamma_pos(n as f64 + 1.0)
}

/// Rising factorial `(a)_n = a (a+1) ... (a+n-1)` with exact sign.
pub fn pochhammer(a: f64, n: u32) -> LogSigned {
    if n == 0 {
        return LogSigned::ONE;
    }
    if a <= 0.0 && a == a.floor() && f64::from(n) > -a {
        return LogSigned::ZERO;
    }
    let mut ln_mag = 0.0;
    let mut negative = false;
    let mut prod = 1.0f64;
    for i in 0..n {
        let f = a + f64::from(i);
        if f < 0.0 {
            negative = !negative;
        }
        prod *= f.abs();
        if !(1e-200..=1e200).contains(&prod) {
            ln_mag += prod.ln();
            prod = 1.0;
        }
    }
    ln_mag += prod.ln();
    LogSigned::new(ln_mag, if negative { -1 } else { 1 })
}

/// Upper incomplete Gamma function `Γ(b, x)`.
pub fn upper_incomplete_gamma(b: f64, x: f64) -> Result<f64> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(domain(
            "upper_incomplete_gamma",
            format!("shape must be positive, got {b}"),
        ));
    }
    if !(x >= 0.0) {
        return Err(domain(
            "upper_incomplete_gamma",
            format!("argument must be nonnegative, got {x}"),
        ));
    }
    if b == 1.0 {
        return Ok((-x).exp());
    }
    if b == 0.5 {
        return Ok(std::f64::consts::PI.sqrt() * erfc(x.sqrt()));
    }
    let ln_g = ln_gamma_pos(b);
    if x == 0.0 {
        return Ok(ln_g.exp());
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let ln_prefix = -x + b * x.ln();
    if x < b + 1.0 {
        // lower regularized series
        let mut ap = b;
        let mut del = 1.0 / b;
        let mut sum = del;
        for _ in 0..10_000 {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * 1e-17 {
                break;
            }
        }
        let p = (ln_prefix - ln_g).exp() * sum;
        Ok(ln_g.exp() * (1.0 - p))
    } else {
        // modified Lentz
        let tiny = 1e-300;
        let mut bb = x + 1.0 - b;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / bb;
        let mut h = d;
        for i in 1..10_000 {
            let an = -f64::from(i) * (f64::from(i) - b);
            bb += 2.0;
            d = an * d + bb;
            if d.abs() < tiny {
                d = tiny;
            }
            c = bb + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        Ok((ln_prefix + h.ln()).exp())
    }
}
