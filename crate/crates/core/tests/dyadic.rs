use lpdos::dyadic::*;
use proptest::prelude::*;

#[test]
fn residue_patterns_are_bijective() {
    for m in 1..=16u32 {
        let mut seen = vec![false; 1 << m];
        for l in 0..1i64 << m {
            let idx = residue_pattern(l, m).unwrap().index() as usize;
            assert!(!seen[idx], "m={m}: pattern repeated at l={l}");
            seen[idx] = true;
        }
    }
}

#[test]
fn membership_is_a_residue_class() {
    for m in 1..=12u32 {
        let seq = DistalSequence::new(m).unwrap();
        let period = 1i64 << m;
        for j in 0..1u64 << m {
            let interval = DyadicInterval::new(m, j).unwrap();
            let l = landing_index(m, j).unwrap() as i64;
            for k in -period..2 * period {
                let inside = interval_membership(&seq, k, &interval).unwrap();
                assert_eq!(inside, (k - l).rem_euclid(period) == 0, "m={m} j={j} k={k}");
            }
        }
    }
}

#[test]
fn membership_from_truncation_matches_deep_values() {
    // Deciding from m digits must agree with the value at depth 40.
    let deep = DistalSequence::new(40).unwrap();
    for m in 1..=8u32 {
        let shallow = DistalSequence::new(m).unwrap();
        for j in 0..1u64 << m {
            let interval = DyadicInterval::new(m, j).unwrap();
            for k in -70..70i64 {
                assert_eq!(
                    interval_membership(&shallow, k, &interval).unwrap(),
                    interval.contains(deep.value(k)),
                    "m={m} j={j} k={k}"
                );
            }
        }
    }
}

#[test]
fn truncation_tail_bound() {
    for m in 1..=10u32 {
        let coarse = DistalSequence::new(m).unwrap();
        for fine_depth in [m + 1, m + 5, 40] {
            let fine = DistalSequence::new(fine_depth).unwrap();
            let bound = Dyadic::new(1, m);
            for n in 0..1i64 << m {
                let (a, b) = (fine.value(n), coarse.value(n));
                assert!(a >= b);
                let diff = a.to_f64() - b.to_f64();
                assert!(diff <= bound.to_f64(), "m={m} n={n}");
            }
        }
    }
}

#[test]
fn values_stay_below_one() {
    for m in 1..=12u32 {
        let seq = DistalSequence::new(m).unwrap();
        let top = (1u64 << m) - 1;
        assert!(seq.period_numerators().iter().all(|&x| x <= top));
    }
}

#[test]
fn no_terminal_run_of_ones() {
    // For even r with 2^r > |k| the digits above r alternate: the first odd
    // level is off for k >= 0, the first even level is off for k < 0.
    for k in -(1i64 << 12)..=(1 << 12) {
        for r in (0..=14u32).step_by(2) {
            if (1i64 << r) <= k.abs() {
                continue;
            }
            let off = if k >= 0 { r + 1 } else { r + 2 };
            assert!(!indicator(off, k).unwrap(), "k={k} r={r}");
            for s in r + 1..r + 12 {
                assert_ne!(indicator(s, k).unwrap(), indicator(s + 1, k).unwrap(), "k={k} s={s}");
            }
        }
    }
}

#[test]
fn distality_first_shifts() {
    let scanner = DistalityScanner::new(20).unwrap();
    for k in 1..=64i64 {
        let m = scanner.margin(k).unwrap();
        assert!(m.meets_poschel_bound(), "k={k} margin={}", m.margin);
        assert_eq!(m.margin, scanner.margin(-k).unwrap().margin);
    }
    assert!(scanner.margin(1).unwrap().margin.at_least(1, 16));
}

#[test]
fn distality_ignores_levels_below_two_adic_valuation() {
    // a_j has period 2^j, so levels j ≤ r cancel for k = 2^r q.
    let depth = 14;
    let seq = DistalSequence::new(depth).unwrap();
    for (r, q) in [(1u32, 3i64), (2, 5), (3, 1), (4, 7)] {
        let k = q << r;
        let mask = (1u64 << (depth - r)) - 1;
        let dropped = (0..1i64 << depth)
            .map(|n| (seq.numerator(n) & mask).abs_diff(seq.numerator(n - k) & mask))
            .min()
            .unwrap();
        let full = distality_margin(k, depth).unwrap().truncated_min;
        assert_eq!(full, Dyadic::new(dropped, depth), "k={k}");
    }
}

#[test]
fn phi_matches_grid_search() {
    for alpha in [0.0, 0.5, 1.0, 2.0] {
        let p = ApproximationProfile::power_law(alpha).unwrap();
        for e in -4..=4 {
            let t = 2f64.powi(e);
            let r_max = (alpha / t) * 4.0 + 50.0 / t;
            let steps = 200_000;
            let sup = (0..=steps)
                .map(|i| {
                    let r = r_max * i as f64 / steps as f64;
                    r.powf(alpha) * (-t * r).exp()
                })
                .fold(0.0, f64::max);
            let grid = t.powi(-4) * sup;
            let exact = p.phi(t).unwrap();
            assert!(
                (grid - exact).abs() <= 1e-6 * exact,
                "α={alpha} t={t}: {grid} vs {exact}"
            );
        }
    }
}

#[test]
fn psi_bound_examples() {
    let flat = ApproximationProfile::power_law(0.0).unwrap();
    let b = flat.psi_upper(1.0).unwrap();
    // 4 ln 2 Σ (j+1) 2^{-j-1} = 8 ln 2.
    let series: f64 = (0..200)
        .map(|j| 4.0 * std::f64::consts::LN_2 * (j + 1) as f64 * 2f64.powi(-j - 1))
        .sum();
    assert!((b.log_value - series).abs() < 1e-9);
    assert!((b.value - 256.0).abs() < 1e-7);
    let lin = ApproximationProfile::power_law(1.0).unwrap();
    let v = lin.psi_upper(4.0).unwrap();
    assert!(v.value.is_finite() && v.value > 0.0);
    assert!(flat.psi_upper(0.0).is_err());
}

#[test]
fn psi_bound_is_nonincreasing() {
    for alpha in [0.0, 1.0, 2.0] {
        let p = ApproximationProfile::power_law(alpha).unwrap();
        let mut prev = f64::INFINITY;
        for i in -20..=20 {
            let t = 2f64.powf(i as f64 / 4.0);
            let v = p.psi_upper(t).unwrap().value;
            assert!(v.is_finite() && v <= prev * (1.0 + 1e-12), "α={alpha} t={t}");
            prev = v;
        }
    }
}

proptest! {
    #[test]
    fn landing_routes_agree(m in 1u32..=12, j in any::<u64>()) {
        let j = j & ((1u64 << m) - 1);
        prop_assert_eq!(landing_index(m, j).unwrap(), landing_index_scan(m, j).unwrap());
    }

    #[test]
    fn indicator_is_periodic(j in 1u32..=20, n in -1_000_000i64..1_000_000, q in -50i64..50) {
        prop_assert_eq!(indicator(j, n).unwrap(), indicator(j, n + q * (1i64 << j)).unwrap());
    }

    #[test]
    fn sequence_is_periodic(m in 1u32..=30, n in -1_000_000i64..1_000_000, q in -8i64..8) {
        let seq = DistalSequence::new(m).unwrap();
        prop_assert_eq!(seq.value(n), seq.value(n + q * (1i64 << m)));
    }

    #[test]
    fn children_split_parent(level in 1u32..=20, j in any::<u64>(), k in -5000i64..5000) {
        let parent = DyadicInterval::new(level, j & ((1u64 << level) - 1)).unwrap();
        let seq = DistalSequence::new(24).unwrap();
        let [a, b] = parent.children().unwrap();
        let in_parent = interval_membership(&seq, k, &parent).unwrap();
        let in_children = interval_membership(&seq, k, &a).unwrap() || interval_membership(&seq, k, &b).unwrap();
        prop_assert_eq!(in_parent, in_children);
    }
}
