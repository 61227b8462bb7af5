use proptest::prelude::*;

use evtcr::channel::{best_antenna, transmit_power, ChannelDraw};
use evtcr::evt::{
    asymptotic_mean_capacity, asymptotic_outage_capacity, gumbel_constants_sinr, iplr_constants, log_grid,
    regime_constants, RegimeFormulas, E0,
};
use evtcr::exact::{sinr_cdf, sinr_quantile, QuantileSolverConfig};
use evtcr::special::lambert_w0;
use evtcr::units::{db_to_linear, linear_to_db};
use evtcr::SystemParams;

fn params() -> impl Strategy<Value = SystemParams> {
    (
        -10.0..30.0f64,
        -20.0..20.0f64,
        -20.0..10.0f64,
        -15.0..0.0f64,
        -3.0..3.0f64,
        -3.0..3.0f64,
        -3.0..3.0f64,
    )
        .prop_map(|(pm, q, pp, n, g, h, qq)| {
            SystemParams::new(
                db_to_linear(pm),
                db_to_linear(q),
                db_to_linear(pp),
                db_to_linear(n),
                db_to_linear(g),
                db_to_linear(h),
                db_to_linear(qq),
            )
            .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quantile_roundtrip(p in params(), level in 0.01..0.99f64) {
        let x = sinr_quantile(level, &p, &QuantileSolverConfig::default()).unwrap();
        prop_assert!((sinr_cdf(x, &p).unwrap() - level).abs() <= 1e-9);
    }

    #[test]
    fn quantile_monotone(p in params(), a in 0.01..0.98f64, d in 0.005..0.01f64) {
        let cfg = QuantileSolverConfig::default();
        prop_assert!(sinr_quantile(a, &p, &cfg).unwrap() < sinr_quantile(a + d, &p, &cfg).unwrap());
    }

    #[test]
    fn cdf_monotone_on_grid(p in params()) {
        let mut prev = 0.0;
        for x in log_grid(1e-4, 1e4, 120) {
            let f = sinr_cdf(x, &p).unwrap();
            prop_assert!((0.0..=1.0).contains(&f) && f >= prev);
            prev = f;
        }
    }

    #[test]
    fn mean_outage_gap_identity(p in params(), n in 2usize..500, eps in 0.001..0.999f64) {
        for regime in RegimeFormulas::ALL {
            let Ok(c) = regime_constants(regime, &p, n) else { continue };
            let gap = asymptotic_mean_capacity(&c) - asymptotic_outage_capacity(&c, eps).unwrap();
            let expected = c.b_n * (E0 + (1.0 / eps).ln().ln());
            prop_assert!((gap - expected).abs() <= 1e-12 * (1.0 + c.a_n.abs()));
            let at_inv_e = asymptotic_outage_capacity(&c, (-1.0f64).exp()).unwrap();
            prop_assert!((at_inv_e - c.a_n).abs() <= 1e-14 * (1.0 + c.a_n.abs()));
        }
    }

    #[test]
    fn iplr_location_grows_by_ln2_per_doubling(p in params()) {
        let a1 = iplr_constants(&p, 1 << 20).unwrap().a_n;
        let a2 = iplr_constants(&p, 1 << 21).unwrap().a_n;
        prop_assert!((a2 - a1 - 2f64.ln()).abs() < 1e-4);
    }

    #[test]
    fn sinr_location_increasing_in_n(p in params(), n in 2usize..2000) {
        let a = gumbel_constants_sinr(&p, n).unwrap();
        let b = gumbel_constants_sinr(&p, n + 1).unwrap();
        prop_assert!(b.a_n > a.a_n && a.b_n > 0.0);
    }

    #[test]
    fn lambert_identity(x in -0.3678794411714423f64..1e6) {
        let w = lambert_w0(x).unwrap();
        prop_assert!(w >= -1.0);
        prop_assert!((w * w.exp() - x).abs() <= 1e-12 * x.abs().max(1.0));
    }

    #[test]
    fn interference_never_exceeds_limit(p in params(), h in 1e-6..1e3f64) {
        let ps = transmit_power(h, &p).unwrap();
        prop_assert!(ps * h <= p.q_limit * (1.0 + 1e-15) && ps <= p.p_max);
    }

    #[test]
    fn max_sinr_nondecreasing_in_gains(
        p in params(),
        g in prop::collection::vec(1e-3..10.0f64, 1..8),
        h_seed in 1e-3..10.0f64,
        q in 0.0..5.0f64,
        bump in 0.0..5.0f64,
        which in 0usize..8,
    ) {
        let h: Vec<f64> = (0..g.len()).map(|i| h_seed * (1.0 + i as f64)).collect();
        let draw = ChannelDraw { g: g.clone(), h: h.clone(), q };
        let (_, before) = best_antenna(&draw, &p).unwrap();
        let mut g2 = g;
        let k = which % g2.len();
        g2[k] += bump;
        let (_, after) = best_antenna(&ChannelDraw { g: g2, h, q }, &p).unwrap();
        prop_assert!(after >= before);
    }

    #[test]
    fn db_roundtrip(db in -100.0..100.0f64) {
        prop_assert!((linear_to_db(db_to_linear(db)) - db).abs() <= 1e-12);
    }
}
