use isoprofile::ball_placement::{lambda_bound, PlacementScenario};
use isoprofile::exhaustion::{build_sqrt_exhaustion, gradient_norm, exact_gradient_norm};
use isoprofile::monotone_limits::{pointwise_limit, remark_family, MonotoneFamily};
use isoprofile::output::round_sig;
use isoprofile::profile::disk_profile;
use isoprofile::{SpaceForm32, SpaceForm64, SymmetricRegion, WarpedSurface};
use proptest::prelude::*;

fn surface(k: usize) -> WarpedSurface {
    WarpedSurface::all_catalog().swap_remove(k)
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(64)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn space_form_volume_increases_and_inverts(delta in -2.0f64..2.0, a in 0.01f64..1.0, b in 0.01f64..1.0) {
        let s = SpaceForm64::surface(delta);
        let cap = if delta > 0.0 { 0.999 * s.max_radius() } else { 3.0 };
        let (lo, hi) = (a.min(b) * cap, a.max(b) * cap);
        let (v_lo, v_hi) = (s.ball_volume(lo).unwrap(), s.ball_volume(hi).unwrap());
        prop_assert!(v_lo <= v_hi);
        let r = s.inverse_volume(v_hi).unwrap();
        prop_assert!((r - hi).abs() <= 1e-8 * (1.0 + hi));
        prop_assert!(v_hi <= s.total_volume());
    }

    #[test]
    fn f32_space_form_tracks_f64(delta in -1.0f64..1.0, r in 0.05f64..1.5) {
        let v64 = SpaceForm64::surface(delta).ball_volume(r).unwrap();
        let v32 = SpaceForm32::surface(delta as f32).ball_volume(r as f32).unwrap();
        prop_assert!(((v32 as f64) - v64).abs() <= 1e-5 * v64);
    }

    #[test]
    fn pole_volume_round_trip(k in 0usize..4, frac in 0.01f64..0.9) {
        let w = surface(k);
        let r = frac * w.t_num().min(4.0);
        let v = w.pole_ball_volume(r).unwrap();
        let back = w.radius_for_volume(v).unwrap();
        prop_assert!((back - r).abs() <= 1e-8 * (1.0 + r));
    }

    #[test]
    fn disk_profile_is_monotone(k in 0usize..4, a in 0.01f64..10.0, b in 0.01f64..10.0) {
        let w = surface(k);
        let cap = 0.5 * w.max_volume().min(1e3);
        let (lo, hi) = (a.min(b).min(cap), a.max(b).min(cap));
        let (p_lo, p_hi) = (disk_profile(&w, lo).unwrap(), disk_profile(&w, hi).unwrap());
        prop_assert!(p_lo <= p_hi * (1.0 + 1e-12));
    }

    #[test]
    fn truncation_splits_volume_and_perimeter(
        k in 0usize..4,
        cuts in prop::collection::vec(0.0f64..1.0, 4),
        rho_frac in 0.05f64..1.0,
    ) {
        let w = surface(k);
        let top = w.t_num().min(3.0);
        let mut c = cuts.clone();
        c.sort_by(f64::total_cmp);
        prop_assume!(c.windows(2).all(|p| p[1] - p[0] > 1e-3));
        let g = SymmetricRegion::new(vec![(c[0] * top, c[1] * top), (c[2] * top, c[3] * top)]).unwrap();
        let rho = rho_frac * top;
        let (inside, slice) = w.region_truncate(&g, rho).unwrap();
        let outside: f64 = g
            .intervals()
            .iter()
            .filter(|&&(_, b)| b > rho)
            .map(|&(a, b)| w.pole_ball_volume(b).unwrap() - w.pole_ball_volume(a.max(rho)).unwrap())
            .sum();
        let total = w.region_volume(&g).unwrap();
        prop_assert!((w.region_volume(&inside).unwrap() + outside - total).abs() <= 1e-9 * (1.0 + total));
        let per = w.region_perimeter(&inside).unwrap();
        let per_in = w.region_perimeter_inside(&g, rho).unwrap();
        prop_assert!((per - (per_in + slice)).abs() <= 1e-9 * (1.0 + per));
    }

    #[test]
    fn lambda_increases_below_model_volume(r1 in 0.01f64..0.99, r2 in 0.01f64..0.99, k in 0usize..2) {
        let w = surface(k);
        let e = SymmetricRegion::new(vec![(0.0, 1.0)]).unwrap();
        let sc = PlacementScenario::new(w, e, 2.0, 4.0, 1.0, None).unwrap();
        let (lo, hi) = (r1.min(r2), r1.max(r2));
        let (l_lo, l_hi) = (lambda_bound(&sc, lo).unwrap(), lambda_bound(&sc, hi).unwrap());
        prop_assert!(l_lo <= l_hi);
        let v = SpaceForm64::surface(sc.delta()).ball_volume(hi).unwrap();
        prop_assert!(l_hi <= v);
    }

    #[test]
    fn sublevels_invert_levels(k in 0usize..4, d in 0.0f64..1.0) {
        let spec = build_sqrt_exhaustion(&surface(k)).unwrap();
        let t = d * surface(k).t_num();
        let back = spec.sublevel_radius(spec.level_for_radius(t)).unwrap();
        prop_assert!((back - t).abs() <= 1e-9 * (1.0 + t));
    }

    #[test]
    fn gradient_stays_below_sqrt2(d in 0.0f64..1e3) {
        let g = exact_gradient_norm(d);
        prop_assert!(g < std::f64::consts::SQRT_2);
        prop_assert!((gradient_norm(d) - 2.0 * g).abs() <= 1e-12 * (1.0 + g));
    }

    #[test]
    fn remark_family_is_monotone(i in 1usize..1000, x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let f = remark_family::<f64>;
        prop_assert!(f(i + 1, x) <= f(i, x));
        let (lo, hi) = (x.min(y), x.max(y));
        prop_assert!(f(i, lo) <= f(i, hi));
        prop_assert!((0.0..=1.0).contains(&f(i, x)));
    }

    #[test]
    fn pointwise_limit_of_monotone_rows_is_monotone(
        base in prop::collection::vec(0.0f64..1.0, 8),
        decay in 0.1f64..0.9,
    ) {
        let mut base = base;
        base.sort_by(f64::total_cmp);
        let x: Vec<f64> = (0..8).map(|k| k as f64).collect();
        let fam = MonotoneFamily::from_fn(x, 40, |i, x| base[x as usize] + decay.powi(i as i32)).unwrap();
        let lim = pointwise_limit(&fam, 1e-6);
        prop_assert!(lim.monotone);
        for (k, &y) in lim.limit.y.iter().enumerate() {
            prop_assert!(y >= base[k] && y <= base[k] + decay.powi(39) + 1e-15);
        }
    }

    #[test]
    fn round_sig_is_idempotent(x in prop::num::f64::NORMAL) {
        let once = round_sig(x);
        prop_assert_eq!(round_sig(once), once);
        prop_assert!((once - x).abs() <= 1e-11 * x.abs());
    }
}
