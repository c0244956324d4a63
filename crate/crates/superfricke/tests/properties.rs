//! Property tests over seeded random inputs.

use proptest::prelude::*;

use superfricke::charvar::{evaluate_word, FreeWord, Letter, RepresentationPair};
use superfricke::grassmann::Parity;
use superfricke::invariants::trace_word;
use superfricke::osp::check_membership;
use superfricke::sample::Sampler;
use superfricke::superlinalg::{berezinian, st_pairing, supertrace, SuperMatrix};

const N: u8 = 6;

fn letter() -> impl Strategy<Value = Letter> {
    prop_oneof![Just(Letter::A), Just(Letter::AInv), Just(Letter::B), Just(Letter::BInv)]
}

fn word(max: usize) -> impl Strategy<Value = FreeWord> {
    prop::collection::vec(letter(), 0..=max).prop_map(FreeWord)
}

fn pair(seed: u64) -> RepresentationPair {
    let mut s = Sampler::new(seed, N);
    RepresentationPair::new(s.osp(), s.osp()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn words_multiply(seed in any::<u64>(), u in word(4), v in word(4)) {
        let rho = pair(seed);
        let lhs = evaluate_word(&u.concat(&v), &rho).unwrap();
        let rhs = evaluate_word(&u, &rho).unwrap().try_mul(&evaluate_word(&v, &rho).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn reduction_does_not_change_the_image(seed in any::<u64>(), w in word(6)) {
        let rho = pair(seed);
        prop_assert_eq!(evaluate_word(&w, &rho).unwrap(), evaluate_word(&w.reduce(), &rho).unwrap());
        let back = evaluate_word(&w.concat(&w.inverse()), &rho).unwrap();
        prop_assert!(back.is_identity());
    }

    #[test]
    fn trace_words_are_class_functions(seed in any::<u64>(), u in word(3), v in word(3)) {
        let rho = pair(seed);
        let uv = trace_word(&u.concat(&v), &rho).unwrap();
        let vu = trace_word(&v.concat(&u), &rho).unwrap();
        prop_assert_eq!(uv.clone(), vu);
        prop_assert!(uv.odd_part().is_zero());
    }

    #[test]
    fn supertrace_is_cyclic(seed in any::<u64>()) {
        let mut s = Sampler::new(seed, N);
        let (m, p, q) = (s.even_matrix(), s.even_matrix(), s.even_matrix());
        let mpq = supertrace(&m.try_mul(&p).unwrap().try_mul(&q).unwrap()).unwrap();
        let qmp = supertrace(&q.try_mul(&m).unwrap().try_mul(&p).unwrap()).unwrap();
        prop_assert_eq!(mpq, qmp);
    }

    #[test]
    fn osp_is_a_group(seed in any::<u64>()) {
        let mut s = Sampler::new(seed, N);
        let (g, h) = (s.osp(), s.osp());
        let gh = g.try_mul(&h).unwrap();
        prop_assert!(check_membership(gh.matrix()).ok);
        prop_assert!(berezinian(gh.matrix()).unwrap().is_one());
        let id = gh.matrix().try_mul(gh.inverse().matrix()).unwrap();
        prop_assert_eq!(id, SuperMatrix::identity(3, N, gh.mode()));
    }

    #[test]
    fn invariant_forms_by_vector_parity(seed in any::<u64>()) {
        let mut s = Sampler::new(seed, N);
        let g = s.osp();
        let (v, w) = (s.even_vector(), s.even_vector());
        let moved = st_pairing(&g.matrix().apply(&v).unwrap(), &g.matrix().apply(&w).unwrap()).unwrap();
        prop_assert_eq!(moved, st_pairing(&v, &w).unwrap());
        let (v, w) = (s.homogeneous_vector(Parity::Odd), s.homogeneous_vector(Parity::Odd));
        let moved = superfricke::superlinalg::pairing(&g.matrix().apply(&v).unwrap(), &g.matrix().apply(&w).unwrap()).unwrap();
        prop_assert_eq!(moved, superfricke::superlinalg::pairing(&v, &w).unwrap());
    }

    #[test]
    fn flip_is_an_involutive_automorphism(seed in any::<u64>()) {
        let mut s = Sampler::new(seed, N);
        let (g, h) = (s.osp(), s.osp());
        let twice = g.z2_flip().z2_flip();
        prop_assert_eq!(twice.matrix(), g.matrix());
        let lhs = g.try_mul(&h).unwrap().z2_flip();
        let rhs = g.z2_flip().try_mul(&h.z2_flip()).unwrap();
        prop_assert_eq!(lhs.matrix(), rhs.matrix());
    }
}
