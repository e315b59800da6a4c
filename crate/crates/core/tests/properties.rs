//! Randomised invariants.

use proptest::prelude::*;

use cuspfill::filling::{dehn_reduce, symmetrize, FreeProductGroup, QuotientPresentation, QuotientSubgroupGraph};
use cuspfill::horoball::{BaseGraph, TruncatedHoroball};
use cuspfill::peripheral::{height, verify_height_certificate};
use cuspfill::{Index, Letter, SubgroupGraph, Word};

fn letters(rank: usize, max: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0..rank, any::<bool>()), 0..=max)
        .prop_map(|v| v.into_iter().map(|(g, inv)| Letter::new(g, inv)).collect())
}

fn word(max: usize) -> impl Strategy<Value = Word> {
    letters(2, max).prop_map(Word::from_letters)
}

fn nontrivial(max: usize) -> impl Strategy<Value = Word> {
    word(max).prop_filter("nontrivial", |w| !w.is_identity())
}

fn generators() -> impl Strategy<Value = Vec<Word>> {
    prop::collection::vec(nontrivial(4), 1..=2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn product_is_associative(u in word(8), v in word(8), x in word(8)) {
        prop_assert_eq!(u.mul(&v).mul(&x), u.mul(&v.mul(&x)));
    }

    #[test]
    fn inverse_reverses_products(u in word(8), v in word(8)) {
        prop_assert_eq!(u.mul(&v).inverse(), v.inverse().mul(&u.inverse()));
        prop_assert!(u.mul(&u.inverse()).is_identity());
    }

    #[test]
    fn reduction_is_idempotent(raw in letters(2, 12)) {
        let once = Word::from_letters(raw);
        prop_assert_eq!(Word::from_letters(once.letters().iter().copied()), once.clone());
        prop_assert!(once.letters().windows(2).all(|p| p[0] != p[1].inverse()));
    }

    #[test]
    fn cyclic_reduction_recovers_the_word(u in word(10)) {
        let (core, conj) = u.cyclic_reduce();
        prop_assert!(core.is_cyclically_reduced());
        prop_assert_eq!(core.conjugate_by(&conj), u);
    }

    #[test]
    fn roots_of_powers(u in nontrivial(4), k in 1i64..=5) {
        let (r, e) = u.pow(k).root().unwrap();
        prop_assert_eq!(e as i64 % k, 0);
        prop_assert_eq!(r.pow(e as i64), u.pow(k));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn intersection_membership(a in generators(), b in generators(), ws in prop::collection::vec(word(8), 8)) {
        let (ga, gb) = (SubgroupGraph::from_generators(2, &a), SubgroupGraph::from_generators(2, &b));
        let both = ga.intersect(&gb);
        for w in ws.iter().chain(&a).chain(&b) {
            prop_assert_eq!(both.contains(w), ga.contains(w) && gb.contains(w), "{}", w);
        }
    }

    #[test]
    fn conjugation_round_trip(a in generators(), g in word(5)) {
        let h = SubgroupGraph::from_generators(2, &a);
        prop_assert_eq!(h.conjugate(&g).conjugate(&g.inverse()), h.clone());
        for x in &a {
            prop_assert!(h.conjugate(&g).contains(&x.conjugate_by(&g)));
        }
    }

    #[test]
    fn generated_products_are_members(a in generators(), picks in prop::collection::vec((0usize..2, any::<bool>()), 0..5)) {
        let h = SubgroupGraph::from_generators(2, &a);
        let mut x = Word::identity();
        for (i, inv) in picks {
            let g = &a[i % a.len()];
            x = x.mul(&if inv { g.inverse() } else { g.clone() });
        }
        prop_assert!(h.contains(&x));
    }

    #[test]
    fn index_is_submultiplicative(a in generators(), b in generators()) {
        let (ga, gb) = (SubgroupGraph::from_generators(2, &a), SubgroupGraph::from_generators(2, &b));
        if let (Index::Finite(i), Index::Finite(j)) = (ga.index(), gb.index()) {
            match ga.intersect(&gb).index() {
                Index::Finite(k) => prop_assert!(k <= i * j),
                Index::Infinite => prop_assert!(false, "intersection of finite-index subgroups"),
            }
        }
    }

    #[test]
    fn coset_representatives_are_canonical(a in generators(), g in word(6), h in word(6)) {
        let sub = SubgroupGraph::from_generators(2, &a);
        let r = sub.coset_representative(&g);
        prop_assert!(sub.coset_equal(&r, &g));
        prop_assert!(r <= g);
        prop_assert_eq!(sub.coset_representative(&r), r.clone());
        prop_assert_eq!(sub.coset_equal(&g, &h), r == sub.coset_representative(&h));
    }

    #[test]
    fn basis_expresses_members(a in generators(), picks in prop::collection::vec((0usize..2, any::<bool>()), 0..4)) {
        let h = SubgroupGraph::from_generators(2, &a);
        let basis = h.basis();
        prop_assert_eq!(basis.len(), h.rank());
        let mut x = Word::identity();
        for (i, inv) in picks {
            let g = &a[i % a.len()];
            x = x.mul(&if inv { g.inverse() } else { g.clone() });
        }
        let e = h.express_in_basis(&x).unwrap();
        let back = Word::from_letters(e.letters().iter().flat_map(|l| {
            let b = &basis[l.generator()];
            if l.is_inverse() { b.inverse().letters().to_vec() } else { b.letters().to_vec() }
        }));
        prop_assert_eq!(back, x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn height_certificates_verify(a in prop::collection::vec(nontrivial(3), 1..=2)) {
        let h = SubgroupGraph::from_generators(2, &a);
        let r = height(&h, 2);
        prop_assert!(verify_height_certificate(&r.certificate).ok, "{:?}", r.certificate);
        prop_assert_eq!(r.k, r.certificate.k);
        prop_assert_eq!(r.k == 0, h.is_trivial());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn horoball_metric(n in 2usize..20, depth in 1usize..6, picks in prop::collection::vec((0usize..1000, 0usize..1000, 0usize..1000), 10)) {
        let x = TruncatedHoroball::build(BaseGraph::path(n).unwrap(), depth).unwrap();
        let count = x.vertex_count();
        for (i, j, k) in picks {
            let (p, q, r) = (x.vertex(i % count), x.vertex(j % count), x.vertex(k % count));
            let d = |a, b| x.distance(a, b).unwrap();
            prop_assert_eq!(d(p, q), d(q, p));
            prop_assert!(d(p, r) <= d(p, q) + d(q, r));
            prop_assert!(p.1.abs_diff(q.1) <= d(p, q));
        }
    }

    #[test]
    fn regular_geodesics_are_geodesic_on_paths(n in 2usize..64, u in 0usize..64, v in 0usize..64) {
        let base = BaseGraph::path(n).unwrap();
        let depth = base.default_depth();
        let x = TruncatedHoroball::build(base, depth).unwrap();
        let r = x.regular_geodesic((u % n, 0), (v % n, 0)).unwrap();
        prop_assert_eq!(r.path.len() - 1, r.bfs_distance);
        prop_assert_eq!(r.gap, None);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn free_product_normal_form_is_a_homomorphism(n in 1u64..9, u in word(10), v in word(10)) {
        let fp = FreeProductGroup::cyclic(2, 0, n);
        let nf = |w: &Word| fp.normal_form(w);
        prop_assert_eq!(nf(&nf(&u).mul(&nf(&v))), nf(&u.mul(&v)));
        prop_assert_eq!(nf(&nf(&u)), nf(&u));
        prop_assert!(nf(&u).len() <= u.len());
    }

    #[test]
    fn trivial_elements_form_a_normal_subgroup(u in word(6), v in word(6), g in word(6), i in 0usize..3, j in 0usize..3) {
        let q = QuotientPresentation::build(2, &[w_str("aaaaaa")]).unwrap();
        let kill = |x: &Word, k: usize| x.mul(&w_str("aaaaaa").pow(k as i64)).mul(&x.inverse());
        let (a, b) = (kill(&u, i), kill(&v, j));
        prop_assert!(q.is_trivial(&a) && q.is_trivial(&b));
        prop_assert!(q.is_trivial(&a.mul(&b)));
        prop_assert!(q.is_trivial(&a.conjugate_by(&g)));
    }

    #[test]
    fn small_cancellation_closure(u in word(5), v in word(5), g in word(5), i in 1i64..3) {
        let r = w_str("abAB").pow(2);
        let q = QuotientPresentation::build(2, std::slice::from_ref(&r)).unwrap();
        let a = r.pow(i).conjugate_by(&u);
        let b = r.conjugate_by(&v);
        prop_assert!(q.is_trivial(&a));
        prop_assert!(q.is_trivial(&a.mul(&b)));
        prop_assert!(q.is_trivial(&a.conjugate_by(&g)));
    }

    #[test]
    fn dehn_reduction_shortens(u in word(16)) {
        let sym = symmetrize(&[w_str("abAB").pow(2), w_str("aaaaaaa")]);
        let (r, steps) = dehn_reduce(&sym, &u);
        prop_assert!(r.len() <= u.len());
        prop_assert!(steps <= u.len());
    }

    #[test]
    fn quotient_membership_contains_generated_products(picks in prop::collection::vec((0usize..2, any::<bool>()), 0..6)) {
        let fp = FreeProductGroup::cyclic(2, 0, 6);
        let gens = [w_str("aa"), w_str("baaaB")];
        let h = QuotientSubgroupGraph::from_generators(&fp, &gens).unwrap();
        let mut x = Word::identity();
        for (i, inv) in picks {
            x = x.mul(&if inv { gens[i].inverse() } else { gens[i].clone() });
        }
        prop_assert!(h.contains(&x));
        prop_assert!(!h.contains(&x.mul(&w_str("b"))));
    }
}

fn w_str(s: &str) -> Word {
    s.parse().unwrap()
}
