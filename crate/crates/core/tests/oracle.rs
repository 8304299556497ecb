use rrsum::sumdist::{NakagamiParams, SumDistribution};

fn dist(m1: u32, o1: f64, m2: u32, o2: f64, n: u32) -> SumDistribution {
    SumDistribution::build(
        NakagamiParams::new(m1, o1).unwrap(),
        NakagamiParams::new(m2, o2).unwrap(),
        n,
    )
    .unwrap()
}

#[test]
fn closed_form_matches_hankel_inversion() {
    let cases = [
        dist(3, 1.0, 1, 1.0, 4),
        dist(2, 1.0, 1, 1.0, 2),
        dist(1, 1.0, 1, 1.0, 1),
        dist(2, 0.5, 3, 2.0, 3),
        dist(2, 1.0, 2, 1.0, 8),
        dist(3, 2.0, 3, 0.5, 5),
    ];
    for d in &cases {
        for i in 0..10 {
            let r = d.rms() * (0.15 + 0.25 * f64::from(i));
            let want = d.oracle_pdf_hankel(r).unwrap();
            let got = d.pdf(r).unwrap();
            assert!(
                (got - want).abs() <= 1e-6 * want,
                "N={} r={r}: {got} vs {want}",
                d.n_vectors()
            );
        }
    }
}

#[test]
fn spot_values() {
    let d = dist(1, 1.0, 1, 1.0, 1);
    // 4 K0(2) and 1 - 2 K1(2)
    assert!((d.pdf(1.0).unwrap() - 0.455_575_490_998_133_7).abs() < 1e-14);
    assert!((d.cdf(1.0).unwrap() - 0.720_268_236_366_955_1).abs() < 1e-14);
    let d = dist(3, 1.0, 1, 1.0, 4);
    let want = d.oracle_pdf_hankel(2.0).unwrap();
    assert!((d.pdf(2.0).unwrap() - want).abs() <= 1e-6 * want);
}
