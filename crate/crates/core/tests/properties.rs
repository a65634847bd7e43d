use proptest::prelude::*;

use hamcap::capacity::capacity_formula;
use hamcap::hamiltonians::{Hamiltonian, ProductHamiltonian};
use hamcap::homology::{betti, claim6_dims, claim6_kunneth, rsh_dims, sh_dims, t_map_rank};
use hamcap::numeric::{time_one_map, IntegratorConfig};
use hamcap::orbit_analysis::{enumerate_families, OrbitKind};
use hamcap::phase_space::{signed_wrap, wrap};
use hamcap::profiles::{solve_slope, validate_profile, ROOT_RESIDUAL};
use hamcap::report::{fmt_float, round_sig};
use hamcap::{HomotopyClass, PhasePoint, PhaseSpaceConfig, ProfileFamilySpec};

fn geometry() -> impl Strategy<Value = PhaseSpaceConfig> {
    (0.25f64..3.0, -0.9f64..0.9, 1usize..=2)
        .prop_map(|(r, frac, n)| PhaseSpaceConfig::new(r, frac * r, n).unwrap())
}

fn s_value() -> impl Strategy<Value = f64> {
    prop_oneof![-10.0f64..=-1.0, 1.0f64..=10.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wrap_lands_in_period(x in -100.0f64..100.0, period in 0.1f64..5.0) {
        let w = wrap(x, period);
        prop_assert!((0.0..period).contains(&w));
        let k = ((x - w) / period).round();
        prop_assert!((x - w - k * period).abs() < 1e-9);
        prop_assert!(signed_wrap(x, period).abs() <= 0.5 * period + 1e-12);
    }

    #[test]
    fn float_formatting_is_idempotent(x in -1e6f64..1e6) {
        let once = round_sig(x, 12);
        prop_assert_eq!(round_sig(once, 12), once);
        prop_assert_eq!(fmt_float(once), fmt_float(x));
    }

    #[test]
    fn capacity_dominates_both_terms(g in geometry(), ell in -3i64..=3, a in -5.0f64..5.0) {
        let r = capacity_formula(&g, ell, a);
        let l = ell as f64;
        if ell == 0 && a <= 0.0 {
            prop_assert_eq!(r.value, 0.0);
        } else {
            prop_assert!(r.value >= g.radius() * l.abs() + g.marked_level() * l);
            prop_assert!(r.value >= a + g.marked_level() * l);
            prop_assert!(r.value <= capacity_formula(&g, ell, a + 1.0).value);
        }
    }

    #[test]
    fn capacity_is_mirror_symmetric(g in geometry(), ell in -3i64..=3, a in -5.0f64..5.0) {
        let mirror = PhaseSpaceConfig::new(g.radius(), -g.marked_level(), g.torus_dim()).unwrap();
        prop_assert_eq!(capacity_formula(&g, ell, a).value, capacity_formula(&mirror, -ell, a).value);
    }

    #[test]
    fn built_families_pass_validation(g in geometry(), s in s_value(), ell in -2i64..=2, extra in 0.1f64..2.0) {
        let l = ell as f64;
        let spec = if ell == 0 {
            ProfileFamilySpec::bump(s, extra, g)
        } else {
            ProfileFamilySpec::plateau(s, (g.radius() * l.abs() + g.marked_level() * l).max(0.0) + extra, g, ell)
        };
        let f = spec.build().unwrap();
        let report = validate_profile(&f, &spec);
        prop_assert!(report.passed(), "{}", report.summary());
    }

    #[test]
    fn slope_roots_solve_the_equation(s in 1.0f64..10.0, ell in 1i64..=3, c in 0.5f64..3.0) {
        let g = PhaseSpaceConfig::new(1.0, 0.0, 1).unwrap();
        let f = ProfileFamilySpec::plateau(s, c.max(ell as f64 + 0.1), g, ell).build().unwrap();
        let roots = solve_slope(&f, ell as f64);
        for r in &roots.roots {
            prop_assert!((f.d1(r.r) - ell as f64).abs() <= ROOT_RESIDUAL);
            prop_assert_eq!(r.second_derivative_sign, f.d2(r.r).signum() as i8);
        }
    }

    #[test]
    fn step_inequalities_hold(s in 1.5f64..10.0, ell in 1i64..=2) {
        let g = PhaseSpaceConfig::new(1.0, 0.0, 1).unwrap();
        let spec = ProfileFamilySpec::plateau(s, 1.0, g, ell);
        prop_assume!(spec.top() > ell as f64);
        let h = ProductHamiltonian::outer_radial(g, spec.build().unwrap());
        let fams = enumerate_families(&h, &HomotopyClass::new(ell, 1)).unwrap();
        prop_assert_eq!(fams.len(), 2);
        let hi = fams.iter().map(|f| f.action).fold(f64::NEG_INFINITY, f64::max);
        let lo = fams.iter().map(|f| f.action).fold(f64::INFINITY, f64::min);
        prop_assert!(hi > spec.top());
        prop_assert!(lo < ell as f64);
    }

    #[test]
    fn three_chart_rfam_actions_are_negative(s in -10.0f64..=-1.0, ell in -2i64..=2, u in -0.5f64..0.5, n in 1usize..=2) {
        prop_assume!(ell != 0);
        let g = PhaseSpaceConfig::new(1.0, u, n).unwrap();
        let l = ell as f64;
        let spec = ProfileFamilySpec::plateau(s, (l.abs() + u * l).max(0.0) + 0.5, g, ell);
        let h = ProductHamiltonian::three_chart(g, spec.build().unwrap(), s).unwrap();
        for f in enumerate_families(&h, &HomotopyClass::new(ell, n)).unwrap() {
            if f.kind == OrbitKind::Rfam {
                prop_assert!(f.action < 0.0);
            }
        }
    }

    #[test]
    fn kunneth_and_closed_form_agree(n in 1usize..=5) {
        for k in 0..=2 * n + 1 {
            prop_assert_eq!(claim6_dims(n, k), claim6_kunneth(n, k));
        }
        prop_assert_eq!(betti(n + 1).total(), 1u64 << (n + 1));
    }

    #[test]
    fn transfer_rank_bounded_by_both_sides(g in geometry(), ell in -2i64..=2, a in 0.05f64..6.0, extra in 0.05f64..4.0) {
        let l = ell as f64;
        let c = (g.marked_level() * l).max(0.0) + extra;
        for k in 0..=2 * g.torus_dim() + 2 {
            let t = t_map_rank(&g, ell, a, c, k).unwrap();
            prop_assert!(t <= sh_dims(&g, ell, a, k).unwrap());
            prop_assert!(t <= rsh_dims(&g, ell, a, c, k).unwrap());
        }
    }

    #[test]
    fn momentum_only_flow_keeps_momenta(g in geometry(), s in 1.0f64..6.0, p0 in -0.9f64..0.9, q0 in 0.0f64..1.0) {
        let spec = ProfileFamilySpec::bump(s, 1.0, g);
        let h = ProductHamiltonian::outer_radial(g, spec.build().unwrap());
        let n = g.torus_dim();
        let x = PhasePoint::new(p0 * g.radius(), q0, vec![0.3; n], vec![0.2; n]).to_lifted().to_vec();
        let y = time_one_map(&h, &x, &IntegratorConfig::default()).unwrap();
        for i in 0..=n {
            prop_assert_eq!(x[i], y[i]);
        }
        prop_assert!((h.value(1.0, &y) - h.value(0.0, &x)).abs() <= 1e-12);
    }
}
