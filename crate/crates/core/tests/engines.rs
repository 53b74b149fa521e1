use srpb::corpus::{self, random_gl};
use srpb::engines::{cancel_witness, extend_witness, umrow_lift, ConjugatorOracle};
use srpb::polycore::{Field, Monomial, PolyContext, PolyMatrix};
use srpb::projmod::{ModIso, ProjModule, SectionLifter, UmRow};
use srpb::quotient::{lift_gl, GlStrategy, QuotientRing, RingHom};

fn conjugated(a: &QuotientRing, seed: u64, stream: u64) -> (ProjModule, PolyMatrix, PolyMatrix) {
    let mut r = corpus::rng(seed, stream);
    let (g, gi) = random_gl(&mut r, a.ctx(), 3, 4, 2);
    let s = 1 + (stream % 2) as usize;
    let d = PolyMatrix::partial_identity(a.ctx(), 3, s);
    let e = a.mat_chain(&[&g, &d, &gi]).unwrap();
    (ProjModule::new(a, e).unwrap(), g, gi)
}

#[test]
fn conjugated_idempotents_are_extended() {
    let lines = QuotientRing::new(&PolyContext::new(2, Field::Rational), vec![Monomial::from_exponents(vec![1, 1])]);
    let triangle = QuotientRing::from_complex(Field::Rational, &corpus::named_complexes()[1].1);
    for stream in 0..6 {
        let (p, _, _) = conjugated(&lines, corpus::DEFAULT_SEED, stream);
        let out = extend_witness(&p, None).unwrap();
        let iso = out.iso.expect("univariate base cases are built in");
        assert_eq!(*iso.target(), p.augmented());

        let (p, g, g_inv) = conjugated(&triangle, corpus::DEFAULT_SEED, stream);
        let oracle = ConjugatorOracle { g, g_inv };
        let out = extend_witness(&p, Some(&oracle)).unwrap();
        assert!(out.obligations.is_empty());
        assert_eq!(*out.iso.unwrap().target(), p.augmented());
    }
}

#[test]
fn free_modules_cancel_through_a_whitehead_stabilization() {
    let a = QuotientRing::from_complex(Field::Rational, &corpus::named_complexes()[0].1);
    let p = ProjModule::free(&a, 2);
    let (s, si) = random_gl(&mut corpus::rng(1, 1), a.ctx(), 3, 3, 1);
    let (s, si) = (a.mat_nf(&s), a.mat_nf(&si));
    let stab = ModIso::new(&ProjModule::free(&a, 3), &ProjModule::free(&a, 3), s, si).unwrap();
    let out = cancel_witness(&p, &p, &stab, &SectionLifter).unwrap();
    assert!(out.iso.unwrap().is_identity());
}

#[test]
fn unimodular_rows_roundtrip() {
    for (k, field) in [Field::Rational, Field::prime(5).unwrap()].into_iter().enumerate() {
        let ctx = PolyContext::new(2, field);
        let r = QuotientRing::polynomial_ring(&ctx);
        let j = QuotientRing::new(&ctx, vec![Monomial::from_exponents(vec![1, 1])]);
        for stream in 0..4 {
            let (m, _) = random_gl(&mut corpus::rng(corpus::DEFAULT_SEED, 100 * k as u64 + stream), &ctx, 3, 5, 1);
            let u0 = m.block(0, 1, 0, 3);
            let v = UmRow::certify(&j, j.mat_nf(&u0)).unwrap();
            let out = umrow_lift(&v, None, &GlStrategy::ALL, None).unwrap();
            let l = out.lift.unwrap_or_else(|| panic!("{:?}", out.diagnostics));
            assert_eq!(j.mat_nf(&l.u), *v.row());
            assert!(r.mat_mul(&l.u, &l.w.transpose()).unwrap().is_identity());
        }
    }
}

#[test]
fn gl_roundtrips_lift() {
    let ctx = PolyContext::new(2, Field::Rational);
    let r = QuotientRing::polynomial_ring(&ctx);
    let j = QuotientRing::new(&ctx, vec![Monomial::from_exponents(vec![1, 1])]);
    let pi = RingHom::quotient_map(&r, &j).unwrap();
    for stream in 0..6 {
        let (d, di) = random_gl(&mut corpus::rng(corpus::DEFAULT_SEED, stream), &ctx, 3, 4, 2);
        let (s, si) = (j.mat_nf(&d), j.mat_nf(&di));
        let l = lift_gl(&s, &si, &pi, &GlStrategy::ALL, None).unwrap();
        assert_eq!(pi.apply_matrix(&l.delta).unwrap(), s);
        assert!(r.mat_mul(&l.delta, &l.delta_inv).unwrap().is_identity());
    }
}
