use proptest::prelude::*;
use sharpcert::wave::{c_sharp_scan, fourier_series_residual, gamma_identity_residual, mode_coercivity_table};
use sharpcert::WaveParams;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gamma_identity_holds(p in 2.0f64..=6.0) {
        prop_assume!(p > 2.0);
        let r = gamma_identity_residual(p).unwrap();
        prop_assert!(r <= 1e-12, "p={p}: residual {r:e}");
    }
}

#[test]
fn cosine_series_converges_at_the_coefficient_rate() {
    let grid: Vec<f64> = (0..=400).map(|i| i as f64 * std::f64::consts::PI / 400.0).collect();
    for alpha in [0.75, 1.25, 1.4, 2.5] {
        let res: Vec<f64> = [16u32, 32, 64, 128, 256]
            .iter()
            .map(|&h| fourier_series_residual(alpha, 1.0, h, &grid).unwrap())
            .collect();
        for w in res.windows(2) {
            assert!(w[1] < w[0], "alpha={alpha}: residuals {res:?}");
            // a_h ~ h^{-(2α+1)} so the tail sum is ~ H^{-2α}
            let rate = (w[0] / w[1]).log2();
            assert!((rate - 2.0 * alpha).abs() <= 0.35, "alpha={alpha}: rate {rate}, residuals {res:?}");
        }
    }
}

#[test]
fn argmax_is_first_harmonic_for_odd_dimensions() {
    for d in (5..=61).step_by(2) {
        let scan = c_sharp_scan(&WaveParams::new(d).unwrap(), 1000).unwrap();
        assert_eq!(scan.argmax_h, 1, "d={d}");
    }
}

#[test]
fn eigenvalue_bookkeeping_is_exact() {
    for d in 2u64..=61 {
        let two_nu = d - 1;
        for ell in 0u64..=100 {
            let two_ell = 2 * ell;
            assert_eq!((two_ell + two_nu).pow(2), two_nu.pow(2) + two_ell.pow(2) + 2 * two_ell * two_nu);
        }
    }
}

#[test]
fn three_dimensional_supremum() {
    let table = mode_coercivity_table(&WaveParams::new(3).unwrap(), 200).unwrap();
    let sup = table.rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    assert!((sup - 4.0 / 3.0).abs() <= 1e-12, "sup={sup}");
}
