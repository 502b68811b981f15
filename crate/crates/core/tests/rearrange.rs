use rearr_core::rearrange::*;
use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Rearrangement oracle: sort values, stack measures, evaluate at s by scan.
fn oracle_rearranged_value(cells: &[(f64, f64)], s: f64) -> f64 {
    let mut v: Vec<(f64, f64)> = cells.iter().map(|&(m, x)| (x.abs(), m)).collect();
    v.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut acc = 0.0;
    for (x, m) in v {
        acc += m;
        if s < acc - 1e-12 {
            return x;
        }
    }
    0.0
}

/// Median oracle: scan candidate thresholds straight from the definition.
fn oracle_median(cells: &[(f64, f64)]) -> f64 {
    let total: f64 = cells.iter().map(|c| c.0).sum();
    let mut best = f64::NEG_INFINITY;
    for &(_, t) in cells {
        let m: f64 = cells.iter().filter(|c| c.1 >= t).map(|c| c.0).sum();
        if m >= total / 2.0 - 1e-12 && t > best {
            best = t;
        }
    }
    best
}

#[test]
fn distribution_examples() {
    let zero = GridFunction::constant(2.0, 0.0).unwrap();
    assert_eq!(distribution_function(&zero, 0.0).unwrap(), 0.0);
    let u = GridFunction::from_pairs(&[(0.5, 3.0), (0.5, -1.0), (0.5, 2.0)], "u").unwrap();
    assert_eq!(distribution_function(&u, 1.5).unwrap(), 1.0);
    assert!(matches!(distribution_function(&u, -0.1), Err(rearr_core::Error::Domain(_))));
}

#[test]
fn grid_function_rejects_bad_cells() {
    assert!(GridFunction::from_pairs(&[(0.0, 1.0)], "u").is_err());
    assert!(GridFunction::from_pairs(&[(1.0, f64::NAN)], "u").is_err());
    assert!(GridFunction::with_total(vec![Cell::new(1.0, 1.0)], 1.1, "u").is_err());
    assert!(GridFunction::with_total(vec![Cell::new(1.0, 1.0)], 1.0 + 1e-14, "u").is_ok());
}

#[test]
fn indicator_rearrangement() {
    let u = GridFunction::from_pairs(&[(0.4, 0.0), (0.3, 1.0), (0.3, 0.0)], "chi").unwrap();
    let p = decreasing_rearrangement(&u);
    assert_eq!(p.breakpoints().unwrap(), &[0.3, 1.0]);
    assert_eq!(p.values().unwrap(), &[1.0, 0.0]);
    assert_eq!(p.eval(0.0), 1.0);
    assert_eq!(p.eval(0.29), 1.0);
    assert_eq!(p.eval(0.3), 0.0);
    assert_eq!(p.eval(1.0), 0.0);
}

#[test]
fn rearrangement_matches_sort_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cells: Vec<(f64, f64)> = (0..5).map(|_| (rng.random_range(0.1..1.0), rng.random_range(-3.0..3.0))).collect();
    let u = GridFunction::from_pairs(&cells, "u").unwrap();
    let p = decreasing_rearrangement(&u);
    for k in 0..200 {
        let s = u.total_measure() * (k as f64 + 0.37) / 200.0;
        assert_eq!(p.eval(s), oracle_rearranged_value(&cells, s), "s = {s}");
    }
}

#[test]
fn ties_merge_into_one_step() {
    let u = GridFunction::from_pairs(&[(1.0, 2.0), (1.0, -2.0), (1.0, 1.0)], "u").unwrap();
    let p = decreasing_rearrangement(&u);
    assert_eq!(p.values().unwrap(), &[2.0, 1.0]);
    assert_eq!(p.breakpoints().unwrap(), &[2.0, 3.0]);
}

#[test]
fn increasing_rearrangement_examples() {
    let c = increasing_rearrangement(&RearrangementProfile::constant(2.5, 1.0).unwrap());
    for s in [0.0, 0.3, 0.99, 1.0] {
        assert_eq!(c.eval(s), 2.5);
    }
    let chi = increasing_rearrangement(&RearrangementProfile::indicator(0.3, 1.0).unwrap());
    assert_eq!(chi.eval(0.0), 0.0);
    assert_eq!(chi.eval(0.69), 0.0);
    assert_eq!(chi.eval(0.7), 1.0);
    assert_eq!(chi.eval(1.0), 1.0);
}

#[test]
fn maximal_average_examples() {
    let c = RearrangementProfile::constant(3.0, 2.0).unwrap();
    for s in [0.1, 1.0, 2.0] {
        assert_relative_eq!(maximal_average(&c, s).unwrap(), 3.0, max_relative = 1e-15);
    }
    // two steps: 4 on [0, 0.5), 1 on [0.5, 2)
    let p = RearrangementProfile::from_steps(vec![0.5, 2.0], vec![4.0, 1.0], 2.0).unwrap();
    assert_relative_eq!(maximal_average(&p, 0.25).unwrap(), 4.0, max_relative = 1e-15);
    assert_relative_eq!(maximal_average(&p, 1.5).unwrap(), (2.0 + 1.0) / 1.5, max_relative = 1e-15);
    assert!(maximal_average(&p, 0.0).is_err());
}

#[test]
fn median_examples() {
    let c = GridFunction::constant(3.0, -1.25).unwrap();
    assert_eq!(median(&c), -1.25);
    let cells = [(0.5, 1.0), (0.5, -1.0)];
    let u = GridFunction::from_pairs(&cells, "u").unwrap();
    assert_eq!(median(&u), oracle_median(&cells));
    assert_eq!(median(&u), 1.0);
    let cells = [(1.0, 0.0), (1.0, 2.0), (1.0, 4.0)];
    let u = GridFunction::from_pairs(&cells, "u").unwrap();
    assert_eq!(median(&u), 2.0);
    assert_eq!(oracle_median(&cells), 2.0);
}

#[test]
fn positive_and_negative_parts() {
    let pos = GridFunction::from_pairs(&[(1.0, 2.0), (1.0, 0.5)], "u").unwrap();
    let (p, m) = positive_negative_parts(&pos);
    assert_eq!(p.cells(), pos.cells());
    assert!(m.cells().iter().all(|c| c.value == 0.0));
    let neg = pos.map(|v| -v).unwrap();
    let (p, m) = positive_negative_parts(&neg);
    assert!(p.cells().iter().all(|c| c.value == 0.0));
    assert_eq!(m.cells(), pos.cells());
    let mixed = GridFunction::from_pairs(&[(1.0, 2.0), (1.0, -3.0)], "u").unwrap();
    let (p, m) = positive_negative_parts(&mixed);
    assert_eq!(p.cells().iter().map(|c| c.value).collect::<Vec<_>>(), [2.0, 0.0]);
    assert_eq!(m.cells().iter().map(|c| c.value).collect::<Vec<_>>(), [0.0, 3.0]);
}

#[test]
fn csv_round_trip() {
    let u = GridFunction::from_pairs(&[(0.25, 1.5), (0.75, -2.0)], "u").unwrap();
    let mut buf = Vec::new();
    u.write_csv(&mut buf).unwrap();
    assert!(String::from_utf8(buf.clone()).unwrap().starts_with("measure,value\n"));
    let back = GridFunction::read_csv(buf.as_slice(), "u").unwrap();
    assert_eq!(back.cells(), u.cells());

    let p = decreasing_rearrangement(&u);
    let mut buf = Vec::new();
    p.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert_eq!(text, "s,value\n0,2\n0.75,1.5\n1,0\n");
    let q = RearrangementProfile::read_csv(buf.as_slice()).unwrap();
    assert_eq!(q.breakpoints(), p.breakpoints());
    assert_eq!(q.values(), p.values());
}

#[test]
fn analytic_profile_distribution_inverts_eval() {
    let p = RearrangementProfile::power_sum(vec![PowerTerm::new(1.0, -0.5)], 4.0).unwrap();
    // s^{-1/2} > t  ⇔  s < t^{-2}
    assert_relative_eq!(p.distribution(1.0), 1.0, max_relative = 1e-12);
    assert_relative_eq!(p.distribution(0.6), 1.0 / 0.36, max_relative = 1e-12);
    assert_eq!(p.distribution(0.4), 4.0);
    assert_eq!(p.eval(0.0), f64::INFINITY);
}

fn arb_cells() -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec((0.01f64..2.0, prop_oneof![-5.0f64..5.0, (-3i32..=3).prop_map(f64::from)]), 1..200)
}

proptest! {
    #[test]
    fn equimeasurable(cells in arb_cells(), ts in proptest::collection::vec(0.0f64..6.0, 50)) {
        let u = GridFunction::from_pairs(&cells, "u").unwrap();
        let p = decreasing_rearrangement(&u);
        for t in ts {
            prop_assert_eq!(distribution_function(&u, t).unwrap(), p.distribution(t));
        }
    }

    #[test]
    fn cavalieri(cells in arb_cells(), p in 1u32..=3) {
        let u = GridFunction::from_pairs(&cells, "u").unwrap();
        let prof = decreasing_rearrangement(&u);
        let lhs = u.abs_power_integral(p as f64);
        let rhs = prof.integral_power(0.0, u.total_measure(), 0.0, 0.0, p as f64);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1e-300));
    }

    #[test]
    fn maximal_average_dominates(cells in arb_cells(), fr in proptest::collection::vec(0.001f64..1.0, 20)) {
        let u = GridFunction::from_pairs(&cells, "u").unwrap();
        let p = decreasing_rearrangement(&u);
        let mut ss: Vec<f64> = fr.iter().map(|f| f * u.total_measure()).collect();
        ss.sort_by(f64::total_cmp);
        let mut prev = 0.0;
        for s in ss {
            let avg = maximal_average(&p, s).unwrap();
            prop_assert!(avg >= p.eval(s) * (1.0 - 1e-12));
            prop_assert!(s * avg >= prev * (1.0 - 1e-12));
            prev = s * avg;
        }
    }

    #[test]
    fn median_commutes_with_shifts(cells in arb_cells(), c in -10.0f64..10.0) {
        let u = GridFunction::from_pairs(&cells, "u").unwrap();
        let shifted = u.map(|v| v + c).unwrap();
        prop_assert_eq!(median(&shifted), median(&u) + c);
    }

    #[test]
    fn hardy_littlewood_chain(cells in proptest::collection::vec((0.01f64..2.0, -5.0f64..5.0, -5.0f64..5.0), 1..200)) {
        let u = GridFunction::from_pairs(&cells.iter().map(|c| (c.0, c.1)).collect::<Vec<_>>(), "u").unwrap();
        let v = GridFunction::from_pairs(&cells.iter().map(|c| (c.0, c.2)).collect::<Vec<_>>(), "v").unwrap();
        let (low, mid, high) = hardy_littlewood_terms(&u, &v).unwrap();
        let tol = 1e-12 * high.max(1e-300);
        prop_assert!(low <= mid + tol && mid <= high + tol, "{} {} {}", low, mid, high);
    }
}
