//! Rings `k[x₀..x_n]/I` for monomial ideals `I`, homomorphisms between them,
//! the fiber square of a Vorst decomposition and matrix lifting.

mod lift;
mod square;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::polycore::{Ctx, Field, Monomial, PolyContext, PolyMatrix, Polynomial};
use crate::simplicial::SimplicialComplex;

pub use lift::{det_unit_inverse, lift_gl, whitehead_lift, GlLift, GlStrategy};
pub use square::{build_square_on, build_vorst_square, fiber_check, FiberReport, FiberSquare};

#[derive(Debug)]
struct RingData {
    ctx: Ctx,
    gens: Vec<Monomial>,
    // support mask of each generator when it is square-free
    masks: Vec<Option<u64>>,
}

/// `k[x₀..x_n]/I` with `I` generated by monomials. Cheap to clone.
#[derive(Debug, Clone)]
pub struct QuotientRing(Arc<RingData>);

impl PartialEq for QuotientRing {
    fn eq(&self, other: &QuotientRing) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (*self.0.ctx == *other.0.ctx && self.0.gens == other.0.gens)
    }
}

impl Eq for QuotientRing {}

fn gen_key(m: &Monomial) -> (u64, Vec<std::cmp::Reverse<u32>>) {
    (m.degree(), m.exponents().iter().map(|&e| std::cmp::Reverse(e)).collect())
}

impl QuotientRing {
    /// Minimalizes the generators: duplicates and multiples of other
    /// generators are dropped.
    pub fn new(ctx: &Ctx, gens: Vec<Monomial>) -> QuotientRing {
        for g in &gens {
            assert_eq!(g.nvars(), ctx.nvars(), "ideal generator over the wrong number of variables");
        }
        let mut sorted = gens;
        sorted.sort_by_key(gen_key);
        sorted.dedup();
        let mut kept: Vec<Monomial> = Vec::new();
        for g in sorted {
            if !kept.iter().any(|k| k.divides(&g)) {
                kept.push(g);
            }
        }
        let masks = kept
            .iter()
            .map(|g| g.exponents().iter().all(|&e| e <= 1).then(|| g.support()))
            .collect();
        QuotientRing(Arc::new(RingData {
            ctx: ctx.clone(),
            gens: kept,
            masks,
        }))
    }

    pub fn polynomial_ring(ctx: &Ctx) -> QuotientRing {
        QuotientRing::new(ctx, Vec::new())
    }

    /// The Stanley–Reisner ring of `sigma`.
    pub fn from_complex(field: Field, sigma: &SimplicialComplex) -> QuotientRing {
        QuotientRing::new(&PolyContext::new(sigma.ambient(), field), sigma.sr_ideal())
    }

    /// The Stanley–Reisner ring of `sigma` over an existing context.
    pub fn from_complex_on(ctx: &Ctx, sigma: &SimplicialComplex) -> Result<QuotientRing> {
        if ctx.nvars() != sigma.ambient() {
            return Err(Error::Context(format!(
                "complex on {} vertices over a {}-variable context",
                sigma.ambient(),
                ctx.nvars()
            )));
        }
        Ok(QuotientRing::new(ctx, sigma.sr_ideal()))
    }

    pub fn ctx(&self) -> &Ctx {
        &self.0.ctx
    }

    pub fn field(&self) -> Field {
        self.0.ctx.field()
    }

    pub fn nvars(&self) -> usize {
        self.0.ctx.nvars()
    }

    pub fn gens(&self) -> &[Monomial] {
        &self.0.gens
    }

    pub fn generator_polys(&self) -> Vec<Polynomial> {
        let one = crate::polycore::Scalar::one(self.field());
        self.0
            .gens
            .iter()
            .map(|g| Polynomial::monomial(&self.0.ctx, g.clone(), one.clone()))
            .collect()
    }

    pub fn is_square_free(&self) -> bool {
        self.0.masks.iter().all(Option::is_some)
    }

    /// The complex whose Stanley–Reisner ideal is `I`, when `I` is square-free.
    pub fn complex(&self) -> Option<SimplicialComplex> {
        if !self.is_square_free() {
            return None;
        }
        let n = self.nvars();
        if n == 0 || n > 24 {
            return None;
        }
        let masks: Vec<u64> = self.0.masks.iter().map(|m| m.unwrap()).collect();
        let is_face = |s: u64| !masks.iter().any(|&g| g & s == g);
        let facets = (0..1u64 << n)
            .filter(|&s| is_face(s) && (0..n).all(|v| s >> v & 1 == 1 || !is_face(s | 1 << v)));
        SimplicialComplex::from_sets(n, facets).ok()
    }

    /// True iff no generator divides `m`.
    pub fn survives(&self, m: &Monomial) -> bool {
        let support = m.support();
        !self.0.gens.iter().zip(&self.0.masks).any(|(g, mask)| match mask {
            Some(s) => s & support == *s,
            None => g.divides(m),
        })
    }

    /// Canonical representative: the terms of `f` that survive.
    pub fn normal_form(&self, f: &Polynomial) -> Polynomial {
        if self.0.gens.is_empty() {
            return f.clone();
        }
        f.filter_terms(|m| self.survives(m))
    }

    /// Context-checked [`QuotientRing::normal_form`].
    pub fn nf(&self, f: &Polynomial) -> Result<Polynomial> {
        self.check_poly(f)?;
        Ok(self.normal_form(f))
    }

    pub fn check_poly(&self, f: &Polynomial) -> Result<()> {
        if **f.ctx() != *self.0.ctx {
            return Err(Error::Context(format!(
                "polynomial over {} variables in a ring over {}",
                f.ctx().nvars(),
                self.nvars()
            )));
        }
        Ok(())
    }

    pub fn check_matrix(&self, m: &PolyMatrix) -> Result<()> {
        if **m.ctx() != *self.0.ctx {
            return Err(Error::Context(format!(
                "matrix over {} variables in a ring over {}",
                m.ctx().nvars(),
                self.nvars()
            )));
        }
        Ok(())
    }

    pub fn mul(&self, f: &Polynomial, g: &Polynomial) -> Polynomial {
        self.normal_form(&f.mul(g))
    }

    pub fn is_zero(&self, f: &Polynomial) -> bool {
        f.terms().iter().all(|(m, _)| !self.survives(m))
    }

    pub fn mat_nf(&self, m: &PolyMatrix) -> PolyMatrix {
        m.map(|p| self.normal_form(p))
    }

    pub fn mat_mul(&self, a: &PolyMatrix, b: &PolyMatrix) -> Result<PolyMatrix> {
        self.check_matrix(a)?;
        self.check_matrix(b)?;
        a.mul_reduced(b, |p| self.normal_form(&p))
    }

    /// Product of a chain of matrices, reduced after every step.
    pub fn mat_chain(&self, factors: &[&PolyMatrix]) -> Result<PolyMatrix> {
        let (first, rest) = factors
            .split_first()
            .ok_or_else(|| Error::Input("empty matrix product".into()))?;
        let mut acc = self.mat_nf(first);
        for f in rest {
            acc = self.mat_mul(&acc, f)?;
        }
        Ok(acc)
    }

    pub fn mat_eq(&self, a: &PolyMatrix, b: &PolyMatrix) -> bool {
        a.shape() == b.shape() && self.mat_nf(a) == self.mat_nf(b)
    }

    pub fn mat_is_identity(&self, m: &PolyMatrix) -> bool {
        self.mat_nf(m).is_identity()
    }

    /// True iff `a·b = I` and `b·a = I`.
    pub fn are_inverse(&self, a: &PolyMatrix, b: &PolyMatrix) -> Result<bool> {
        if !a.is_square() || a.shape() != b.shape() {
            return Ok(false);
        }
        Ok(self.mat_mul(a, b)?.is_identity() && self.mat_mul(b, a)?.is_identity())
    }

    /// True iff every generator of `self` maps to zero in `other`, i.e. the
    /// ideal of `self` is contained in the ideal of `other`.
    pub fn ideal_contained_in(&self, other: &QuotientRing) -> bool {
        self.0.gens.iter().all(|g| !other.survives(g))
    }
}

impl fmt::Display for QuotientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[x0..x{}]", self.field(), self.nvars().saturating_sub(1))?;
        if self.0.gens.is_empty() {
            return Ok(());
        }
        write!(f, "/(")?;
        for (k, g) in self.generator_polys().iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ")")
    }
}

/// A ring map given by the image of each source variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingHom {
    source: QuotientRing,
    target: QuotientRing,
    images: Vec<Polynomial>,
    verified: bool,
    // Some(map) when every image is a variable or zero
    var_map: Option<Vec<Option<usize>>>,
}

impl RingHom {
    /// Unverified hom; images are brought to normal form in the target.
    pub fn new(source: &QuotientRing, target: &QuotientRing, images: Vec<Polynomial>) -> Result<RingHom> {
        if images.len() != source.nvars() {
            return Err(Error::Input(format!(
                "hom from a {}-variable ring needs {} images, got {}",
                source.nvars(),
                source.nvars(),
                images.len()
            )));
        }
        if source.field() != target.field() {
            return Err(Error::Context(format!(
                "hom between rings over {} and {}",
                source.field(),
                target.field()
            )));
        }
        let images = images.iter().map(|p| target.nf(p)).collect::<Result<Vec<_>>>()?;
        let var_map = images
            .iter()
            .map(|p| {
                if p.is_zero() {
                    return Some(None);
                }
                match p.terms() {
                    [(m, c)] if c.is_one() && m.degree() == 1 => Some(Some(m.support().trailing_zeros() as usize)),
                    _ => None,
                }
            })
            .collect();
        Ok(RingHom {
            source: source.clone(),
            target: target.clone(),
            images,
            verified: false,
            var_map,
        })
    }

    /// Variable-identity map between rings over the same variables, verified.
    pub fn quotient_map(source: &QuotientRing, target: &QuotientRing) -> Result<RingHom> {
        let images = (0..source.nvars()).map(|v| Polynomial::var(target.ctx(), v)).collect();
        hom_check(RingHom::new(source, target, images)?)
    }

    pub fn identity(ring: &QuotientRing) -> RingHom {
        RingHom::quotient_map(ring, ring).expect("identity hom is well defined")
    }

    pub fn source(&self) -> &QuotientRing {
        &self.source
    }

    pub fn target(&self) -> &QuotientRing {
        &self.target
    }

    pub fn images(&self) -> &[Polynomial] {
        &self.images
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// True iff every variable maps to its own normal form in the target.
    pub fn is_variable_identity(&self) -> bool {
        *self.source.ctx() == *self.target.ctx()
            && self
                .images
                .iter()
                .enumerate()
                .all(|(v, p)| *p == self.target.normal_form(&Polynomial::var(self.target.ctx(), v)))
    }

    /// Image of `f` in normal form.
    pub fn apply(&self, f: &Polynomial) -> Result<Polynomial> {
        self.source.check_poly(f)?;
        if let Some(map) = &self.var_map {
            let n = self.target.nvars();
            let ctx = self.target.ctx();
            let terms = f.terms().iter().filter_map(|(m, c)| {
                let mut exps = vec![0u32; n];
                for (v, &e) in m.exponents().iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    exps[map[v]?] += e;
                }
                let mono = Monomial::from_exponents(exps);
                self.target.survives(&mono).then(|| (mono, c.clone()))
            });
            return Ok(Polynomial::from_terms(ctx, terms.collect::<Vec<_>>()));
        }
        Ok(self.target.normal_form(&f.substitute(&self.images)?))
    }

    pub fn apply_matrix(&self, m: &PolyMatrix) -> Result<PolyMatrix> {
        self.source.check_matrix(m)?;
        let entries = m.entries().iter().map(|p| self.apply(p)).collect::<Result<Vec<_>>>()?;
        PolyMatrix::from_entries(self.target.ctx(), m.rows(), m.cols(), entries)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &RingHom) -> Result<RingHom> {
        if self.target != next.source {
            return Err(Error::Context("composed homs do not match up".into()));
        }
        let images = self.images.iter().map(|p| next.apply(p)).collect::<Result<Vec<_>>>()?;
        let h = RingHom::new(&self.source, &next.target, images)?;
        if self.verified && next.verified {
            return Ok(RingHom { verified: true, ..h });
        }
        Ok(h)
    }
}

/// Marks `h` verified after checking that every source generator maps to
/// zero in the target.
pub fn hom_check(h: RingHom) -> Result<RingHom> {
    let one = crate::polycore::Scalar::one(h.source.field());
    for g in h.source.gens() {
        let p = Polynomial::monomial(h.source.ctx(), g.clone(), one.clone());
        let image = h.apply(&p)?;
        if !image.is_zero() {
            return Err(Error::HomRejected {
                generator: p.to_string(),
                image: image.to_string(),
            });
        }
    }
    Ok(RingHom { verified: true, ..h })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(n: usize, gens: &[&[u32]]) -> QuotientRing {
        let ctx = PolyContext::new(n, Field::Rational);
        QuotientRing::new(&ctx, gens.iter().map(|g| Monomial::from_exponents(g.to_vec())).collect())
    }

    fn p(r: &QuotientRing, s: &str) -> Polynomial {
        Polynomial::parse(s, r.ctx()).unwrap()
    }

    #[test]
    fn normal_forms() {
        let r = ring(2, &[&[1, 1]]);
        assert_eq!(r.normal_form(&p(&r, "x0*x1 + x0")), p(&r, "x0"));
        assert_eq!(r.normal_form(&p(&r, "x0^2*x1")), p(&r, "0"));
        assert_eq!(r.normal_form(&p(&r, "7/3")), p(&r, "7/3"));
        let s = ring(1, &[&[2]]);
        assert_eq!(s.normal_form(&p(&s, "x0^3 + x0 + 1")), p(&s, "x0 + 1"));
    }

    #[test]
    fn generators_are_minimalized() {
        let r = ring(2, &[&[2, 1], &[1, 1], &[1, 1], &[0, 3]]);
        assert_eq!(r.gens(), &[Monomial::from_exponents(vec![1, 1]), Monomial::from_exponents(vec![0, 3])]);
        assert!(!r.is_square_free());
    }

    #[test]
    fn hom_checks() {
        let src = ring(2, &[&[1, 1]]);
        let tgt = ring(2, &[&[0, 1]]);
        let h = RingHom::new(&src, &tgt, vec![p(&tgt, "x0"), p(&tgt, "0")]).unwrap();
        assert!(hom_check(h).unwrap().is_verified());
        let plain = QuotientRing::polynomial_ring(tgt.ctx());
        let bad = RingHom::new(&src, &plain, vec![p(&plain, "x0"), p(&plain, "1")]).unwrap();
        match hom_check(bad) {
            Err(Error::HomRejected { generator, image }) => {
                assert_eq!(generator, "x0*x1");
                assert_eq!(image, "x0");
            }
            other => panic!("expected rejection, got {other:?}"),
        }
        assert!(RingHom::identity(&src).is_verified());
    }

    #[test]
    fn general_images_are_substituted() {
        let r = ring(2, &[&[2, 0]]);
        let h = hom_check(RingHom::new(&r, &r, vec![p(&r, "x0"), p(&r, "x1 + x0")]).unwrap()).unwrap();
        assert_eq!(h.apply(&p(&r, "x1^2")).unwrap(), p(&r, "x1^2 + 2*x0*x1"));
    }

    #[test]
    fn complex_roundtrip() {
        let sigma = SimplicialComplex::new(3, &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let r = QuotientRing::from_complex(Field::Rational, &sigma);
        assert_eq!(r.complex().unwrap(), sigma);
    }
}
