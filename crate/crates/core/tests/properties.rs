use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng;
use srpb::corpus::{self, random_complex, random_gl, random_poly};
use srpb::groebner::member;
use srpb::polycore::{smith_normal_form, univariate_divides, Field, PolyContext, PolyMatrix, Polynomial};
use srpb::projmod::{milnor_patch, ProjModule};
use srpb::quotient::{build_vorst_square, fiber_check, QuotientRing};
use srpb::simplicial::SimplicialComplex;

fn faces(c: &SimplicialComplex) -> BTreeSet<u64> {
    c.faces().into_iter().collect()
}

/// Keeps the terms whose support is a face, by brute force over facets.
fn nf_oracle(c: &SimplicialComplex, f: &Polynomial) -> Polynomial {
    f.filter_terms(|m| c.facets().iter().any(|&s| m.support() & !s == 0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normal_form_keeps_face_supported_terms(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = corpus::rng(seed, 0);
        let c = random_complex(&mut r, n);
        let a = QuotientRing::from_complex(Field::Rational, &c);
        let f = random_poly(&mut r, a.ctx(), 4, 6, true);
        prop_assert_eq!(a.normal_form(&f), nf_oracle(&c, &f));
    }

    #[test]
    fn normal_form_is_multiplicative(seed in any::<u64>()) {
        let mut r = corpus::rng(seed, 0);
        let cs = corpus::corpus(corpus::DEFAULT_SEED, 4);
        let c = &cs[(seed % cs.len() as u64) as usize];
        let a = QuotientRing::from_complex(Field::prime(7).unwrap(), c);
        let f = random_poly(&mut r, a.ctx(), 3, 4, true);
        let g = random_poly(&mut r, a.ctx(), 3, 4, true);
        prop_assert_eq!(a.normal_form(&f.mul(&g)), a.normal_form(&a.normal_form(&f).mul(&a.normal_form(&g))));
    }

    #[test]
    fn decomposition_set_identities(seed in any::<u64>(), n in 2usize..=6) {
        let c = random_complex(&mut corpus::rng(seed, 0), n);
        prop_assume!(!c.is_simplex());
        let d = c.vorst_decompose().unwrap();
        let (s, s1, s2) = (faces(&c), faces(&d.sigma1), faces(&d.sigma2));
        let cone: BTreeSet<u64> = s2.iter().flat_map(|&f| [f, f | 1 << d.apex]).collect();
        prop_assert_eq!(&s, &s1.union(&cone).copied().collect());
        prop_assert_eq!(s1.intersection(&cone).copied().collect::<BTreeSet<_>>(), s2);
    }

    #[test]
    fn random_squares_are_fiber_products(seed in any::<u64>(), n in 2usize..=5) {
        let c = random_complex(&mut corpus::rng(seed, 0), n);
        prop_assume!(!c.is_simplex());
        let sq = build_vorst_square(Field::Rational, &c).unwrap();
        prop_assert!(fiber_check(&sq, 3).ok());
    }

    #[test]
    fn membership_certificates_sum_to_target(seed in any::<u64>()) {
        let mut r = corpus::rng(seed, 0);
        let ctx = PolyContext::new(r.gen_range(1..=3), Field::Rational);
        let gens: Vec<Polynomial> = (0..r.gen_range(1..=3)).map(|_| random_poly(&mut r, &ctx, 3, 3, true)).collect();
        // half the targets are members by construction
        let f = if r.gen_bool(0.5) {
            gens.iter().fold(Polynomial::zero(&ctx), |acc, g| acc.add(&g.mul(&random_poly(&mut r, &ctx, 2, 2, true))))
        } else {
            random_poly(&mut r, &ctx, 3, 3, true)
        };
        if let Some(cert) = member(&f, &gens).unwrap() {
            let sum = gens.iter().zip(&cert.coefficients).fold(Polynomial::zero(&ctx), |acc, (g, c)| acc.add(&g.mul(c)));
            prop_assert_eq!(sum, f);
        }
    }

    #[test]
    fn patches_restrict_to_their_data(seed in any::<u64>(), rank in 1usize..=3) {
        let mut r = corpus::rng(seed, 0);
        let cs = corpus::corpus(corpus::DEFAULT_SEED, 0);
        let c = &cs[(seed % 4) as usize];
        let sq = build_vorst_square(Field::Rational, c).unwrap();
        let (s, si) = random_gl(&mut r, sq.a0.ctx(), rank, 4, 2);
        let (s, si) = (sq.a0.mat_nf(&s), sq.a0.mat_nf(&si));
        let p = milnor_patch(&sq, rank, &s, &si).unwrap();
        let e = p.module.matrix();
        prop_assert!(sq.a.mat_nf(&e.mul(e).sub(e)).is_zero());
        prop_assert_eq!(sq.i1.apply_matrix(e).unwrap(), PolyMatrix::partial_identity(sq.a.ctx(), 2 * rank, rank));
        prop_assert_eq!(sq.i2.apply_matrix(e).unwrap(), p.e2.clone());
        prop_assert_eq!(p.module.rank().unwrap(), rank);
    }

    #[test]
    fn smith_form_is_a_diagonal_chain(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = corpus::rng(seed, 0);
        let ctx = PolyContext::new(1, Field::Rational);
        let m = PolyMatrix::from_fn(&ctx, n, n, |_, _| {
            if r.gen_bool(0.3) { Polynomial::zero(&ctx) } else { random_poly(&mut r, &ctx, 3, 3, true) }
        });
        let snf = smith_normal_form(&m).unwrap();
        prop_assert_eq!(snf.u.mul(&m).mul(&snf.v), snf.d.clone());
        prop_assert!(snf.u.mul(&snf.u_inv).is_identity() && snf.v.mul(&snf.v_inv).is_identity());
        for i in 0..n {
            for j in 0..n {
                prop_assert!(i == j || snf.d.get(i, j).is_zero());
            }
        }
        for i in 1..n {
            prop_assert!(univariate_divides(snf.d.get(i - 1, i - 1), snf.d.get(i, i)).unwrap());
        }
        prop_assert!(snf.u.det().unwrap().is_constant() && !snf.u.det().unwrap().is_zero());
    }
}

#[test]
fn every_small_complex_has_a_sound_ring() {
    for n in 1..=4 {
        for c in corpus::all_complexes(n) {
            let a = QuotientRing::from_complex(Field::Rational, &c);
            for m in (0u64..1 << n).map(|s| srpb::polycore::Monomial::from_support(n, s)) {
                assert_eq!(a.survives(&m), c.is_face_set(m.support()), "{c} {m:?}");
            }
        }
    }
}

#[test]
fn free_module_has_its_size_as_rank() {
    let c = &corpus::named_complexes()[1].1;
    let a = QuotientRing::from_complex(Field::Rational, c);
    assert_eq!(ProjModule::free(&a, 3).rank().unwrap(), 3);
}
