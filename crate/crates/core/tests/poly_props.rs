use polyiter_core::{space, MultiPoly, Prime};
use proptest::prelude::*;

const PRIMES: [u64; 4] = [2, 3, 5, 7];

fn poly(p: u64, arity: usize, max_deg: u32) -> impl Strategy<Value = MultiPoly> {
    let term = (prop::collection::vec(0..=max_deg, arity), -20i64..20);
    prop::collection::vec(term, 0..6).prop_map(move |terms| {
        let terms = terms.into_iter().map(|(mut e, c)| {
            // keep total degree at most max_deg
            while e.iter().sum::<u32>() > max_deg {
                let j = e.iter().position(|&x| x > 0).unwrap();
                e[j] -= 1;
            }
            (e, c)
        });
        MultiPoly::from_terms(Prime::new(p).unwrap(), arity, terms).unwrap()
    })
}

fn setting() -> impl Strategy<Value = (u64, usize)> {
    (prop::sample::select(PRIMES.to_vec()), 1usize..=3)
}

proptest! {
    #[test]
    fn compose_with_identity_is_identity(
        (f, p, arity) in setting().prop_flat_map(|(p, a)| (poly(p, a, 4), Just(p), Just(a)))
    ) {
        let id = MultiPoly::identity_tuple(Prime::new(p).unwrap(), arity);
        prop_assert_eq!(f.compose(&id).unwrap(), f);
    }

    #[test]
    fn ring_axioms(
        (f, g, h) in setting().prop_flat_map(|(p, a)| (poly(p, a, 3), poly(p, a, 3), poly(p, a, 3)))
    ) {
        prop_assert_eq!(f.add(&g).unwrap().add(&h).unwrap(), f.add(&g.add(&h).unwrap()).unwrap());
        prop_assert_eq!(f.mul(&g).unwrap().mul(&h).unwrap(), f.mul(&g.mul(&h).unwrap()).unwrap());
        prop_assert_eq!(
            f.mul(&g.add(&h).unwrap()).unwrap(),
            f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap()
        );
        prop_assert_eq!(f.add(&g).unwrap(), g.add(&f).unwrap());
        prop_assert_eq!(f.mul(&g).unwrap(), g.mul(&f).unwrap());
        prop_assert!(f.sub(&f).unwrap().is_zero());
    }

    #[test]
    fn render_parse_round_trip(
        (f, p, arity) in setting().prop_flat_map(|(p, a)| (poly(p, a, 4), Just(p), Just(a)))
    ) {
        let text = f.to_string();
        prop_assert_eq!(MultiPoly::parse(&text, Prime::new(p).unwrap(), arity).unwrap(), f);
    }

    #[test]
    fn evaluation_is_a_ring_map(
        (f, g, p, arity) in setting().prop_flat_map(|(p, a)| (poly(p, a, 3), poly(p, a, 3), Just(p), Just(a)))
    ) {
        let q = Prime::new(p).unwrap();
        for w in space::points(p, arity) {
            let (x, y) = (f.eval(&w).unwrap(), g.eval(&w).unwrap());
            prop_assert_eq!(f.mul(&g).unwrap().eval(&w).unwrap(), q.mul(x, y));
            prop_assert_eq!(f.add(&g).unwrap().eval(&w).unwrap(), q.add(x, y));
        }
    }
}

// evaluate(compose(f, subs), w) = evaluate(f, subs(w)) on every point, p <= 5, up to three variables
proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_commutes_with_evaluation(
        (f, subs, p, arity) in (prop::sample::select(vec![2u64, 3, 5]), 1usize..=3)
            .prop_flat_map(|(p, a)| (
                poly(p, a, 3),
                prop::collection::vec(poly(p, a, 2), a),
                Just(p),
                Just(a),
            ))
    ) {
        let composed = f.compose(&subs).unwrap();
        for w in space::points(p, arity) {
            let inner: Vec<u64> = subs.iter().map(|s| s.eval(&w).unwrap()).collect();
            prop_assert_eq!(composed.eval(&w).unwrap(), f.eval(&inner).unwrap());
        }
    }
}
