use orbit_smooth::config::{GroupSpec, RunConfig, TubeOverrides};
use orbit_smooth::groups::{preset_group, Preset};
use orbit_smooth::smoothing::SmoothChain;
use orbit_smooth::{fold, Chamber, Point};
use proptest::prelude::*;

fn presets() -> impl Strategy<Value = Preset> {
    prop::sample::select(Preset::all_fixed())
}

fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fold_is_invariant_and_idempotent(preset in presets(), raw in point(3)) {
        let g = preset_group(preset).unwrap();
        let c = Chamber::new(&g).unwrap();
        let p = Point::from_column_slice(&raw[..g.dimension]);
        let image = fold(&g, &c, &p).unwrap().image;
        prop_assert!(c.min_inequality(&image) >= -1e-12);
        let again = fold(&g, &c, &image).unwrap();
        prop_assert_eq!(again.steps, 0);
        for e in &g.elements {
            let q = fold(&g, &c, &e.apply(&p)).unwrap().image;
            prop_assert!((q - &image).norm() <= 1e-10);
        }
    }

    #[test]
    fn h_is_invariant(preset in presets(), raw in point(3)) {
        let g = preset_group(preset).unwrap();
        let chain = SmoothChain::with_defaults(g).unwrap();
        let p = Point::from_column_slice(&raw[..chain.group.dimension]);
        let h = chain.apply_H(&p).unwrap();
        for e in &chain.group.elements {
            prop_assert!((chain.apply_H(&e.apply(&p)).unwrap() - &h).norm() <= 1e-10);
        }
    }

    #[test]
    fn config_round_trip(
        preset in presets(),
        seed in any::<u64>(),
        slope in 1e-3..0.2f64,
        c0 in 0.1..5.0f64,
        offsets in prop::collection::vec(1e-5..1e-1f64, 2..6),
        points in 1usize..5000,
        grid in prop::option::of((-5.0..0.0f64, 0.0..5.0f64, 1usize..40)),
        generators in prop::option::of(prop::collection::vec(prop::collection::vec(-2.0..2.0f64, 2), 1..4)),
    ) {
        let mut cfg = RunConfig::default();
        cfg.group = match generators {
            Some(g) => GroupSpec::Generators(g),
            None => GroupSpec::Preset(preset),
        };
        cfg.tubes = TubeOverrides { slopes: Some(vec![slope]), caps: None, c0: Some(c0), softmin_exponent: None };
        cfg.set_seed(seed);
        let mut offsets = offsets;
        offsets.sort_by(|a, b| b.total_cmp(a));
        offsets.dedup();
        prop_assume!(offsets.len() >= 2);
        cfg.suite.probe.offsets = offsets;
        cfg.suite.fold_points = points;
        cfg.grid = grid.map(|(lo, hi, n)| orbit_smooth::config::GridSpec {
            lower: vec![lo, lo],
            upper: vec![hi, hi],
            nodes: vec![n, n],
        });
        cfg.output = Some("out.csv".into());
        let parsed = RunConfig::parse(&cfg.to_text()).unwrap();
        prop_assert_eq!(&parsed, &cfg);
        prop_assert_eq!(parsed.to_text(), cfg.to_text());
    }
}
