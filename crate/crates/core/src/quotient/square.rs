//! The fiber square `A = A1 ×_{A0} A2` attached to a Vorst decomposition.

use super::{hom_check, QuotientRing, RingHom};
use crate::error::{Error, Result};
use crate::polycore::{Ctx, Field, Monomial, PolyContext, Polynomial};
use crate::simplicial::{SimplicialComplex, VorstDecomposition};

/// `A → A1`, `A → A2`, `A1 → A0`, `A2 → A0` plus the section `A0 → A2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberSquare {
    pub a: QuotientRing,
    pub a1: QuotientRing,
    pub a2: QuotientRing,
    pub a0: QuotientRing,
    pub i1: RingHom,
    pub i2: RingHom,
    pub j1: RingHom,
    pub j2: RingHom,
    pub section: RingHom,
    pub apex: usize,
    pub decomposition: VorstDecomposition,
    pub complex: SimplicialComplex,
}

pub fn build_vorst_square(field: Field, sigma: &SimplicialComplex) -> Result<FiberSquare> {
    build_square_on(&PolyContext::new(sigma.ambient(), field), sigma)
}

/// Builds the square of `sigma` with all four rings over `ctx`.
pub fn build_square_on(ctx: &Ctx, sigma: &SimplicialComplex) -> Result<FiberSquare> {
    let dec = sigma.vorst_decompose()?;
    let apex = dec.apex;
    let a = QuotientRing::from_complex_on(ctx, sigma)?;
    let a1 = QuotientRing::from_complex_on(ctx, &dec.sigma1)?;
    let a2 = QuotientRing::from_complex_on(ctx, &dec.sigma2.cone(apex)?)?;
    let a0 = QuotientRing::from_complex_on(ctx, &dec.sigma2)?;
    let i1 = RingHom::quotient_map(&a, &a1)?;
    let i2 = RingHom::quotient_map(&a, &a2)?;
    let j1 = RingHom::quotient_map(&a1, &a0)?;
    let images = (0..ctx.nvars())
        .map(|v| if v == apex { Polynomial::zero(ctx) } else { Polynomial::var(ctx, v) })
        .collect();
    let j2 = hom_check(RingHom::new(&a2, &a0, images)?)?;
    // the apex is a ghost vertex of A0, so the inclusion also sends it to 0
    let images = (0..ctx.nvars())
        .map(|v| if v == apex { Polynomial::zero(ctx) } else { Polynomial::var(ctx, v) })
        .collect();
    let section = hom_check(RingHom::new(&a0, &a2, images)?)?;
    let square = FiberSquare {
        a,
        a1,
        a2,
        a0,
        i1,
        i2,
        j1,
        j2,
        section,
        apex,
        decomposition: dec,
        complex: sigma.clone(),
    };
    square.check()?;
    Ok(square)
}

impl FiberSquare {
    /// Verifies the five homs, commutativity on variables and the section law.
    pub fn check(&self) -> Result<()> {
        for (name, h) in [
            ("i1", &self.i1),
            ("i2", &self.i2),
            ("j1", &self.j1),
            ("j2", &self.j2),
            ("section", &self.section),
        ] {
            if !h.is_verified() {
                return Err(Error::Internal(format!("square map {name} is not verified")));
            }
        }
        let ctx = self.a.ctx();
        for v in 0..ctx.nvars() {
            let x = Polynomial::var(ctx, v);
            let left = self.j1.apply(&self.i1.apply(&x)?)?;
            let right = self.j2.apply(&self.i2.apply(&x)?)?;
            if left != right {
                return Err(Error::Internal(format!("square does not commute on x{v}: {left} vs {right}")));
            }
            let x0 = self.a0.normal_form(&x);
            if self.j2.apply(&self.section.apply(&x0)?)? != x0 {
                return Err(Error::Internal(format!("section law fails on x{v}")));
            }
        }
        Ok(())
    }
}

/// Outcome of [`fiber_check`]: basis counts in degrees `≤ degree` for
/// `A, A1, A2, A0` and the first monomial breaking the pairing, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberReport {
    pub degree: u32,
    pub count_a: usize,
    pub count_a1: usize,
    pub count_a2: usize,
    pub count_a0: usize,
    pub first_failure: Option<Monomial>,
}

impl FiberReport {
    pub fn ok(&self) -> bool {
        self.first_failure.is_none() && self.count_a + self.count_a0 == self.count_a1 + self.count_a2
    }
}

pub(crate) fn monomials_up_to(nvars: usize, degree: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; nvars];
    fn rec(v: usize, left: u32, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if v == exps.len() {
            out.push(Monomial::from_exponents(exps.clone()));
            return;
        }
        for e in 0..=left {
            exps[v] = e;
            rec(v + 1, left - e, exps, out);
        }
        exps[v] = 0;
    }
    rec(0, degree, &mut exps, &mut out);
    out
}

/// Checks, monomial by monomial up to `degree`, that `A` is the fiber
/// product: a monomial survives in `A` iff it survives in `A1` or `A2`, and
/// survives in both iff it survives in `A0`.
pub fn fiber_check(square: &FiberSquare, degree: u32) -> FiberReport {
    let mut report = FiberReport {
        degree,
        count_a: 0,
        count_a1: 0,
        count_a2: 0,
        count_a0: 0,
        first_failure: None,
    };
    for m in monomials_up_to(square.a.nvars(), degree) {
        let (s, s1, s2, s0) = (
            square.a.survives(&m),
            square.a1.survives(&m),
            square.a2.survives(&m),
            square.a0.survives(&m),
        );
        report.count_a += s as usize;
        report.count_a1 += s1 as usize;
        report.count_a2 += s2 as usize;
        report.count_a0 += s0 as usize;
        if report.first_failure.is_none() && (s != (s1 || s2) || (s1 && s2) != s0) {
            report.first_failure = Some(m);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gens(r: &QuotientRing) -> Vec<String> {
        r.generator_polys().iter().map(|p| p.to_string()).collect()
    }

    #[test]
    fn two_point_square() {
        let sigma = SimplicialComplex::new(2, &[vec![0], vec![1]]).unwrap();
        let sq = build_vorst_square(Field::Rational, &sigma).unwrap();
        assert_eq!(sq.apex, 0);
        assert_eq!(gens(&sq.a), ["x0*x1"]);
        assert_eq!(gens(&sq.a1), ["x0"]);
        assert_eq!(gens(&sq.a2), ["x1"]);
        assert_eq!(gens(&sq.a0), ["x0", "x1"]);
        let r = fiber_check(&sq, 3);
        assert!(r.ok());
        assert_eq!((r.count_a, r.count_a1, r.count_a2, r.count_a0), (7, 4, 4, 1));
    }

    #[test]
    fn hollow_triangle_square() {
        let sigma = SimplicialComplex::new(3, &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let sq = build_vorst_square(Field::Rational, &sigma).unwrap();
        assert_eq!(gens(&sq.a0), ["x0", "x1*x2"]);
        assert_eq!(gens(&sq.a2), ["x1*x2"]);
        assert_eq!(gens(&sq.a1), ["x0"]);
        let r = fiber_check(&sq, 2);
        assert_eq!((r.count_a, r.count_a1, r.count_a2, r.count_a0), (10, 6, 9, 5));
        assert!(r.ok());
        let r0 = fiber_check(&sq, 0);
        assert_eq!((r0.count_a, r0.count_a1, r0.count_a2, r0.count_a0), (1, 1, 1, 1));
    }

    #[test]
    fn simplex_has_no_square() {
        assert!(matches!(
            build_vorst_square(Field::Rational, &SimplicialComplex::simplex(3)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn broken_square_is_reported() {
        let sigma = SimplicialComplex::new(2, &[vec![0], vec![1]]).unwrap();
        let mut sq = build_vorst_square(Field::Rational, &sigma).unwrap();
        sq.a = QuotientRing::polynomial_ring(sq.a.ctx());
        let r = fiber_check(&sq, 2);
        assert!(!r.ok());
        assert_eq!(r.first_failure, Some(Monomial::from_exponents(vec![1, 1])));
    }
}
