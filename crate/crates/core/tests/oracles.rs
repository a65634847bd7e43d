//! Library results against independent computations.

use hamcap::capacity::capacity_formula;
use hamcap::hamiltonians::{Hamiltonian, ProductHamiltonian};
use hamcap::homology::{betti, claim6_dims, f_minus_t, f_t, morse_crit_table, reduced_betti, MorseFunction};
use hamcap::numeric::{integrate_states, IntegratorConfig};
use hamcap::orbit_analysis::{enumerate_families, OrbitKind};
use hamcap::profiles::{solve_slope, RadialProfile};
use hamcap::{HomotopyClass, PhaseSpaceConfig, ProfileFamilySpec};

fn geometry(r: f64, u: f64, n: usize) -> PhaseSpaceConfig {
    PhaseSpaceConfig::new(r, u, n).unwrap()
}

/// Sign changes of `f' - slope` on a fine grid, refined by bisection.
fn bisection_roots(f: &RadialProfile, slope: f64, lo: f64, hi: f64) -> Vec<f64> {
    let g = |r: f64| f.d1(r) - slope;
    let steps = 20_000;
    let mut out = Vec::new();
    let mut prev = lo;
    for i in 1..=steps {
        let x = lo + (hi - lo) * i as f64 / steps as f64;
        if g(prev) == 0.0 {
            out.push(prev);
        } else if g(prev) * g(x) < 0.0 {
            let (mut a, mut b) = (prev, x);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                if g(a) * g(m) <= 0.0 {
                    b = m;
                } else {
                    a = m;
                }
            }
            out.push(0.5 * (a + b));
        }
        prev = x;
    }
    out
}

#[test]
fn slope_roots_match_bisection() {
    let g = geometry(1.0, 0.0, 1);
    for s in [2.0, 4.0, 8.0] {
        for ell in [1, 2] {
            let f = ProfileFamilySpec::plateau(s, 1.0, g, ell).build().unwrap();
            let slope = ell as f64;
            let ours: Vec<f64> = solve_slope(&f, slope).roots.iter().map(|r| r.r).collect();
            let theirs = bisection_roots(&f, slope, -1.0, 1.0);
            assert_eq!(ours.len(), theirs.len(), "s={s} ell={ell}: {ours:?} vs {theirs:?}");
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-9, "s={s} ell={ell}: {a} vs {b}");
            }
        }
    }
}

/// `∫ H dt − ∫ p dq` by trapezoid over the integrated states.
fn quadrature_action(h: &dyn Hamiltonian, states: &[Vec<f64>]) -> f64 {
    let m = states.len() - 1;
    let dt = 1.0 / m as f64;
    let half = states[0].len() / 2;
    let mut total = 0.0;
    for k in 0..m {
        let (a, b) = (&states[k], &states[k + 1]);
        total += 0.5 * dt * (h.value(k as f64 * dt, a) + h.value((k + 1) as f64 * dt, b));
        for i in 0..half {
            total -= 0.5 * (a[i] + b[i]) * (b[half + i] - a[half + i]);
        }
    }
    total
}

#[test]
fn family_actions_match_flow_quadrature() {
    let cfg = IntegratorConfig::default();
    let cases = [(4.0, 2, 1, 0.0), (-4.0, 1, 1, 0.0), (-2.0, 2, 2, 0.3), (-4.0, -1, 2, 0.3)];
    for (s, ell, n, u) in cases {
        let g = geometry(1.0, u, n);
        let l = ell as f64;
        let c = (l.abs() + u * l).max(0.0) + 0.5;
        let f = ProfileFamilySpec::plateau(s, c, g, ell).build().unwrap();
        let h = if s > 0.0 {
            ProductHamiltonian::outer_radial(g, f)
        } else {
            ProductHamiltonian::three_chart(g, f, s).unwrap()
        };
        let fams = enumerate_families(&h, &HomotopyClass::new(ell, n)).unwrap();
        assert!(!fams.is_empty());
        for fam in fams.iter().filter(|f| f.level_span.is_none()) {
            let start = fam.seed_state(&g).to_vec();
            let states = integrate_states(&h, &start, &cfg).unwrap();
            let end = states.last().unwrap();
            assert!((end[n + 1] - start[n + 1] - l).abs() < 1e-9, "winding of {fam:?}");
            let a = quadrature_action(&h, &states);
            assert!((a - fam.action).abs() < 1e-9, "{:?} at {}: {a} vs {}", fam.kind, fam.level, fam.action);
        }
    }
}

#[test]
fn outer_plateau_families_lie_at_the_tangency_levels() {
    let g = geometry(1.0, 0.0, 1);
    let f = ProfileFamilySpec::plateau(4.0, 1.0, g, 2).build().unwrap();
    let roots = bisection_roots(&f, 2.0, -1.0, 1.0);
    let h = ProductHamiltonian::outer_radial(g, f.clone());
    let fams = enumerate_families(&h, &HomotopyClass::new(2, 1)).unwrap();
    assert_eq!(fams.len(), 2);
    for (fam, r) in fams.iter().zip(&roots) {
        assert_eq!(fam.kind, OrbitKind::P);
        assert!((fam.level - r).abs() < 1e-9);
        assert!((fam.action - (f.value(*r) - 2.0 * r)).abs() < 1e-9);
    }
}

fn poly_power(m: usize) -> Vec<u64> {
    let mut c = vec![1u64];
    for _ in 0..m {
        let mut next = vec![0u64; c.len() + 1];
        for (i, v) in c.iter().enumerate() {
            next[i] += v;
            next[i + 1] += v;
        }
        c = next;
    }
    c
}

#[test]
fn betti_numbers_are_binomial_coefficients() {
    for m in 0..=8 {
        assert_eq!(betti(m).dims, poly_power(m));
    }
}

#[test]
fn claim6_matches_convolution_of_poincare_polynomials() {
    for n in 1..=4 {
        let torus = poly_power(n);
        let reduced: Vec<u64> = torus.iter().enumerate().map(|(i, v)| if i == 0 { 0 } else { *v }).collect();
        let small = poly_power(n + 1);
        for k in 0..=2 * n + 1 {
            let conv: u64 = (0..=k)
                .map(|i| reduced.get(i).copied().unwrap_or(0) * small.get(k - i).copied().unwrap_or(0))
                .sum();
            assert_eq!(claim6_dims(n, k), conv, "n={n} k={k}");
        }
        for (k, v) in reduced.iter().enumerate() {
            assert_eq!(reduced_betti(n, k), *v);
        }
    }
}

/// Index from the sign of a finite-difference Hessian diagonal (the
/// functions are sums of one-variable terms).
fn numeric_index(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> usize {
    let h = 1e-4;
    let f0 = f(x);
    (0..x.len())
        .filter(|&i| {
            let mut a = x.to_vec();
            let mut b = x.to_vec();
            a[i] += h;
            b[i] -= h;
            (f(&a) - 2.0 * f0 + f(&b)) / (h * h) < 0.0
        })
        .count()
}

#[test]
fn morse_tables_match_direct_evaluation() {
    for n in 1..=3 {
        let ft = morse_crit_table(MorseFunction::FT, n);
        assert_eq!(ft.points.len(), 1 << (2 * n + 1));
        let eval = |x: &[f64]| f_t(n, &x[..n], &x[n..]);
        for pt in &ft.points {
            assert!((eval(&pt.coordinates) - pt.value).abs() < 1e-12);
            assert_eq!(numeric_index(&eval, &pt.coordinates), pt.index);
        }
        let brute_min = ft.points.iter().map(|p| eval(&p.coordinates)).fold(f64::INFINITY, f64::min);
        assert!((brute_min + (n * (n + 2)) as f64).abs() < 1e-12);

        let fm = morse_crit_table(MorseFunction::FMinusT, n);
        let eval = |x: &[f64]| f_minus_t(n, x);
        for pt in &fm.points {
            assert!((eval(&pt.coordinates) - pt.value).abs() < 1e-12);
            assert_eq!(numeric_index(&eval, &pt.coordinates), pt.index);
            assert!(pt.value < 0.0);
        }
    }
}

#[test]
fn capacity_formula_substitutions() {
    assert_eq!(capacity_formula(&geometry(1.0, 0.0, 1), 2, f64::NEG_INFINITY).value, 2.0);
    assert_eq!(capacity_formula(&geometry(2.0, 1.0, 1), -1, 5.0).value, 4.0);
    assert_eq!(capacity_formula(&geometry(1.0, 0.0, 1), 0, -1.0).value, 0.0);
    assert_eq!(capacity_formula(&geometry(1.0, 0.5, 2), 1, f64::INFINITY).value, f64::INFINITY);
}
