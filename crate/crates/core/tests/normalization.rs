use rayon::prelude::*;
use rrsum::quad::{integrate, integrate_panels, QuadOptions};
use rrsum::sumdist::{NakagamiParams, SumDistribution};

const OMEGAS: [f64; 3] = [0.5, 1.0, 2.0];

fn grid() -> Vec<(u32, u32, u32, f64, f64)> {
    let mut out = Vec::new();
    let mut j = 0;
    for m1 in 1..=3 {
        for m2 in 1..=3 {
            for n in [1, 2, 8, 64] {
                for k in 0..3 {
                    let o = (3 * j + k) % 9;
                    out.push((m1, m2, n, OMEGAS[o / 3], OMEGAS[o % 3]));
                }
                j += 1;
            }
        }
    }
    out
}

fn quantile(d: &SumDistribution, q: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, hi);
    while hi - lo > 1e-2 * hi {
        let mid = 0.5 * (lo + hi);
        if d.cdf(mid).unwrap() < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check(m1: u32, m2: u32, n: u32, o1: f64, o2: f64) -> (f64, f64) {
    let d = SumDistribution::build(
        NakagamiParams::new(m1, o1).unwrap(),
        NakagamiParams::new(m2, o2).unwrap(),
        n,
    )
    .unwrap();
    let pdf = |r: f64| d.pdf(r).unwrap();
    let opts = QuadOptions::new(1e-11, 1e-13);
    let rstar = d.support_bound().unwrap();
    let mut left = 0.0;
    let mut acc = 0.0;
    let mut worst = 0.0f64;
    for i in 1..=20 {
        let r = quantile(&d, (f64::from(i) - 0.5) / 20.0, rstar);
        acc += integrate(pdf, left, r, &opts).unwrap().value;
        left = r;
        worst = worst.max((d.cdf(r).unwrap() - acc).abs());
    }
    let tail: Vec<f64> = std::iter::once(left)
        .chain(d.panels().unwrap().into_iter().filter(|&p| p > left))
        .collect();
    let mass = acc + integrate_panels(pdf, &tail, &opts).unwrap().value;
    ((mass - 1.0).abs(), worst)
}

#[test]
fn unit_mass_and_consistent_cdf() {
    let cases = grid();
    assert_eq!(cases.len(), 108);
    let bad: Vec<_> = cases
        .par_iter()
        .map(|&(m1, m2, n, o1, o2)| ((m1, m2, n, o1, o2), check(m1, m2, n, o1, o2)))
        .filter(|(_, (mass, gap))| *mass > 1e-8 || *gap > 1e-8)
        .collect();
    assert!(bad.is_empty(), "{bad:?}");
}
