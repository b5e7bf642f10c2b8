mod common;

use std::f64::consts::PI;

use common::*;
use num_complex::Complex64;
use polyiter_core::orbit;
use polyiter_core::stats::{
    avg_sum_from_cross, cross_sums, default_etk_constant, discrepancy_exact, etk_bound, last_row_reconstruction,
    sum_s, sum_t, sum_u, sum_v, DEFAULT_SWEEP_BUDGET,
};
use polyiter_core::{space, SystemFamily};
use proptest::prelude::*;
use rand::Rng;

fn e(x: i128, modulus: u64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (x.rem_euclid(modulus as i128) as f64) / modulus as f64)
}

// Sum over all initial vectors of |sum_n e_p(b . w_n) e_M(c n)|^2, straight from the definition.
fn averaged_by_definition(fam: &SystemFamily, b: &[i64], c: i64, big_m: u64, n: usize) -> f64 {
    let p = fam.modulus().get();
    let mut total = 0.0;
    for v in space::points(p, fam.arity()) {
        let mut inner = Complex64::new(0.0, 0.0);
        for st in orbit::generate(fam, &v, n).unwrap() {
            let dot: i128 = b.iter().zip(&st.w).map(|(&x, &y)| x as i128 * y as i128).sum();
            inner += e(dot, p) * e(c as i128 * st.n as i128, big_m);
        }
        total += inner.norm_sqr();
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sums_respect_trivial_bound_and_projection(
        seed in any::<u64>(),
        p in prop::sample::select(vec![3u64, 5, 7, 101]),
        m in 1usize..=2,
        n in 1usize..300,
    ) {
        let mut r = rng(seed);
        let q = prime(p);
        let shape = random_shape(&mut r, m, &[0, 1, 2]);
        let fam = SystemFamily::constant(random_valid_system(&mut r, &shape, q)).unwrap();
        let v: Vec<u64> = (0..=m).map(|_| r.gen_range(0..p)).collect();
        let orbit = orbit::generate(&fam, &v, n).unwrap();
        let a: Vec<i64> = (0..m).map(|_| r.gen_range(-200..200)).collect();
        let mut b = a.clone();
        b.push(0);
        let s = sum_s(&orbit, &a, n, q).unwrap();
        let t = sum_t(&orbit, &b, n, q).unwrap();
        prop_assert!(s.modulus() <= n as f64 + 1e-6);
        prop_assert!(t.modulus() <= n as f64 + 1e-6);
        prop_assert!((s.value - t.value).norm() <= 1e-9);
        // against direct summation
        let direct: Complex64 = orbit
            .iter()
            .map(|st| e(a.iter().zip(&st.w).map(|(&x, &y)| x as i128 * y as i128).sum(), p))
            .sum();
        prop_assert!((s.value - direct).norm() <= 1e-9);
    }

    #[test]
    fn averaged_sums_match_definition(
        seed in any::<u64>(),
        p in prop::sample::select(vec![2u64, 3, 5]),
        m in 0usize..=2,
        n in 1usize..8,
        c in -5i64..5,
        big_m in 1u64..9,
    ) {
        let mut r = rng(seed);
        let q = prime(p);
        let shape = random_shape(&mut r, m, &[0, 1, 2]);
        let fam = SystemFamily::constant(random_valid_system(&mut r, &shape, q)).unwrap();
        let b: Vec<i64> = (0..=m).map(|_| r.gen_range(-9..9)).collect();
        let v = sum_v(&fam, &b, c, big_m, n, DEFAULT_SWEEP_BUDGET).unwrap();
        let want = averaged_by_definition(&fam, &b, c, big_m, n);
        prop_assert!((v - want).abs() <= 1e-6 * want.max(1.0), "{} vs {}", v, want);
        let mut a0 = b[..m].to_vec();
        let u = sum_u(&fam, &a0, c, big_m, n, DEFAULT_SWEEP_BUDGET).unwrap();
        a0.push(0);
        let want_u = averaged_by_definition(&fam, &a0, c, big_m, n);
        prop_assert!((u - want_u).abs() <= 1e-6 * want_u.max(1.0));
        // expanding the square gives the same value
        let cross = cross_sums(&fam, &b, n, DEFAULT_SWEEP_BUDGET).unwrap();
        prop_assert!((avg_sum_from_cross(&cross, c, big_m) - want).abs() <= 1e-6 * want.max(1.0));
    }
}

#[test]
fn cross_sums_vanish_off_the_order_classes() {
    let mut r = rng(31);
    for p in [3u64, 5, 7] {
        let q = prime(p);
        for m in 0..=2usize {
            if p.pow(m as u32 + 1) > 400 {
                continue;
            }
            for gm in 1..p {
                let sys = random_permutation_system(&mut r, q, m, Some(gm));
                let fam = SystemFamily::constant(sys).unwrap();
                let t = q.mult_order(gm).unwrap() as usize;
                let n = 2 * t + 3;
                let mut b = vec![0i64; m + 1];
                b[m] = r.gen_range(1..p as i64);
                let cross = cross_sums(&fam, &b, n, DEFAULT_SWEEP_BUDGET).unwrap();
                let vol = p.pow(m as u32 + 1) as f64;
                for (k, row) in cross.iter().enumerate() {
                    for (j, x) in row.iter().enumerate() {
                        if k % t == j % t {
                            assert!((x.norm() - vol).abs() <= 1e-6 * vol);
                        } else {
                            assert!(x.norm() <= 1e-6, "p={p} gm={gm} k={k} j={j} {x}");
                        }
                    }
                }
                for (c, big_m) in [(0i64, 1u64), (1, 7), (3, 12)] {
                    let v = sum_v(&fam, &b, c, big_m, n, DEFAULT_SWEEP_BUDGET).unwrap();
                    let rebuilt = last_row_reconstruction(&fam, b[m], c, big_m, n).unwrap();
                    assert!((v - rebuilt).abs() <= 1e-6 * v.abs().max(1.0), "{v} vs {rebuilt}");
                }
            }
        }
    }
}

#[test]
fn discrepancy_matches_both_oracles() {
    let mut r = rng(32);
    for case in 0..60 {
        let s = 1 + case % 2;
        let n = r.gen_range(1..=24);
        let ps = random_point_set(&mut r, s, n, case / 2);
        let got = discrepancy_exact(&ps).unwrap();
        let grid = discrepancy_by_grid(&ps);
        assert_eq!(got, grid, "case {case}: {:?}", ps.points());
        if n <= 10 {
            assert_eq!(got, discrepancy_by_loop(&ps));
        }
    }
    for case in 0..12 {
        let n = r.gen_range(1..=6);
        let ps = random_point_set(&mut r, 3, n, case);
        assert_eq!(discrepancy_exact(&ps).unwrap(), discrepancy_by_loop(&ps), "3d case {case}");
    }
}

#[test]
fn discrepancy_is_below_etk() {
    let mut r = rng(33);
    for case in 0..12 {
        let s = 1 + case % 2;
        let n = r.gen_range(1..=40);
        let ps = random_point_set(&mut r, s, n, case);
        let d = discrepancy_exact(&ps).unwrap();
        for h in [2u32, 8, 16] {
            let bound = etk_bound(&ps, h, default_etk_constant(s)).unwrap();
            assert!(d <= bound, "case {case} H={h}: {d} > {bound}");
        }
    }
}
