//! Sparse multivariate polynomials in canonical form.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::monomial::{Monomial, TermOrder};
use super::scalar::{Field, Scalar};
use crate::error::{Error, Result};

/// Variable count, coefficient field and monomial order shared by all
/// polynomials of a ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyContext {
    nvars: usize,
    field: Field,
    order: TermOrder,
}

pub type Ctx = Arc<PolyContext>;

impl PolyContext {
    /// Context with the default grevlex order.
    pub fn new(nvars: usize, field: Field) -> Ctx {
        Arc::new(PolyContext {
            nvars,
            field,
            order: TermOrder::grevlex(nvars),
        })
    }

    pub fn with_order(nvars: usize, field: Field, order: TermOrder) -> Result<Ctx> {
        if order.precedence().len() != nvars {
            return Err(Error::Context(format!(
                "order covers {} variables, context has {nvars}",
                order.precedence().len()
            )));
        }
        Ok(Arc::new(PolyContext { nvars, field, order }))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn order(&self) -> &TermOrder {
        &self.order
    }
}

/// Ring operation selector for [`ring_op`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
}

/// A polynomial: terms strictly descending in the context's order, no zero
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    ctx: Ctx,
    terms: Vec<(Monomial, Scalar)>,
}

impl Polynomial {
    pub fn zero(ctx: &Ctx) -> Polynomial {
        Polynomial {
            ctx: ctx.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(ctx: &Ctx) -> Polynomial {
        Polynomial::constant(ctx, Scalar::one(ctx.field))
    }

    pub fn from_i64(ctx: &Ctx, n: i64) -> Polynomial {
        Polynomial::constant(ctx, Scalar::from_i64(ctx.field, n))
    }

    pub fn constant(ctx: &Ctx, c: Scalar) -> Polynomial {
        Polynomial::monomial(ctx, Monomial::one(ctx.nvars), c)
    }

    pub fn var(ctx: &Ctx, index: usize) -> Polynomial {
        Polynomial::monomial(ctx, Monomial::var(ctx.nvars, index), Scalar::one(ctx.field))
    }

    pub fn monomial(ctx: &Ctx, mono: Monomial, c: Scalar) -> Polynomial {
        debug_assert_eq!(mono.nvars(), ctx.nvars);
        let terms = if c.is_zero() { Vec::new() } else { vec![(mono, c)] };
        Polynomial {
            ctx: ctx.clone(),
            terms,
        }
    }

    /// Builds a canonical polynomial from arbitrary terms: duplicates are
    /// summed, zeros dropped, order restored.
    pub fn from_terms(ctx: &Ctx, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Polynomial {
        let mut acc: HashMap<Monomial, Scalar> = HashMap::new();
        for (m, c) in terms {
            debug_assert_eq!(m.nvars(), ctx.nvars);
            match acc.get_mut(&m) {
                Some(existing) => *existing = existing.add(&c),
                None => {
                    acc.insert(m, c);
                }
            }
        }
        let mut terms: Vec<(Monomial, Scalar)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| ctx.order.compare(&b.0, &a.0));
        Polynomial {
            ctx: ctx.clone(),
            terms,
        }
    }

    /// Keeps the terms whose monomial satisfies `keep`; canonical form is preserved.
    pub fn filter_terms(&self, mut keep: impl FnMut(&Monomial) -> bool) -> Polynomial {
        Polynomial {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().filter(|(m, _)| keep(m)).cloned().collect(),
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn field(&self) -> Field {
        self.ctx.field
    }

    pub fn terms(&self) -> &[(Monomial, Scalar)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    /// The value of a constant polynomial (zero included).
    pub fn constant_value(&self) -> Option<Scalar> {
        match self.terms.as_slice() {
            [] => Some(Scalar::zero(self.ctx.field)),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    /// The constant coefficient, i.e. the value at the origin.
    pub fn constant_term(&self) -> Scalar {
        match self.terms.last() {
            Some((m, c)) if m.is_one() => c.clone(),
            _ => Scalar::zero(self.ctx.field),
        }
    }

    pub fn leading_term(&self) -> Option<&(Monomial, Scalar)> {
        self.terms.first()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|(m, _)| m)
    }

    pub fn leading_coefficient(&self) -> Option<&Scalar> {
        self.terms.first().map(|(_, c)| c)
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    /// Bitmask of the variables that occur.
    pub fn support(&self) -> u64 {
        self.terms.iter().fold(0, |acc, (m, _)| acc | m.support())
    }

    pub fn same_context(&self, other: &Polynomial) -> bool {
        Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx
    }

    fn ensure_context(&self, other: &Polynomial) -> Result<()> {
        if self.same_context(other) {
            Ok(())
        } else {
            Err(Error::Context(format!(
                "{} variables over {} vs {} variables over {}",
                self.ctx.nvars, self.ctx.field, other.ctx.nvars, other.ctx.field
            )))
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.ensure_context(other)?;
        Ok(self.merge(other, false))
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.ensure_context(other)?;
        Ok(self.merge(other, true))
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.ensure_context(other)?;
        Ok(self.product(other))
    }

    /// Panics on mismatched contexts; see [`Polynomial::checked_add`].
    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.checked_add(other).expect("polynomial context mismatch")
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.checked_sub(other).expect("polynomial context mismatch")
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        self.checked_mul(other).expect("polynomial context mismatch")
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn scalar_mul(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ctx);
        }
        Polynomial {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a.mul(c))).collect(),
        }
    }

    /// Multiplication by a single term `c * mono`.
    pub fn mul_term(&self, mono: &Monomial, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ctx);
        }
        // Monomial orders are multiplicative, so the term order is preserved.
        Polynomial {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.mul(mono), a.mul(c))).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one(&self.ctx);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    fn merge(&self, other: &Polynomial, negate: bool) -> Polynomial {
        let order = &self.ctx.order;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        let sign = |c: &Scalar| if negate { c.neg() } else { c.clone() };
        while i < a.len() && j < b.len() {
            match order.compare(&a[i].0, &b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((b[j].0.clone(), sign(&b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { a[i].1.sub(&b[j].1) } else { a[i].1.add(&b[j].1) };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (m.clone(), sign(c))));
        Polynomial {
            ctx: self.ctx.clone(),
            terms: out,
        }
    }

    fn product(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(&self.ctx);
        }
        if other.terms.len() == 1 {
            return self.mul_term(&other.terms[0].0, &other.terms[0].1);
        }
        if self.terms.len() == 1 {
            return other.mul_term(&self.terms[0].0, &self.terms[0].1);
        }
        let products = self
            .terms
            .iter()
            .flat_map(|(ma, ca)| other.terms.iter().map(move |(mb, cb)| (ma.mul(mb), ca.mul(cb))));
        Polynomial::from_terms(&self.ctx, products)
    }

    /// Ring homomorphism defined by one image per variable. Images must all
    /// live in one target context, which becomes the context of the result.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial> {
        if images.len() != self.ctx.nvars {
            return Err(Error::Context(format!(
                "substitution needs {} images, got {}",
                self.ctx.nvars,
                images.len()
            )));
        }
        let target = match images.first() {
            Some(p) => p.ctx.clone(),
            None => self.ctx.clone(),
        };
        if let Some(bad) = images.iter().find(|p| !(Arc::ptr_eq(&p.ctx, &target) || *p.ctx == *target)) {
            return Err(Error::Context(format!(
                "substitution images disagree on context ({} vs {} variables)",
                bad.ctx.nvars, target.nvars
            )));
        }
        if target.field != self.ctx.field {
            return Err(Error::Context(format!(
                "substitution changes field from {} to {}",
                self.ctx.field, target.field
            )));
        }
        let mut powers: Vec<Vec<Polynomial>> = vec![Vec::new(); self.ctx.nvars];
        let mut acc: Vec<(Monomial, Scalar)> = Vec::new();
        for (mono, c) in &self.terms {
            let mut term = Polynomial::constant(&target, c.clone());
            for (v, &e) in mono.exponents().iter().enumerate() {
                if e == 0 || term.is_zero() {
                    continue;
                }
                let image = &images[v];
                let factor = if e == 1 {
                    image.clone()
                } else {
                    let cache = &mut powers[v];
                    if cache.is_empty() {
                        cache.push(Polynomial::one(&target));
                    }
                    while cache.len() <= e as usize {
                        let next = cache.last().unwrap().mul(image);
                        cache.push(next);
                    }
                    cache[e as usize].clone()
                };
                term = term.product(&factor);
            }
            acc.extend(term.terms);
        }
        Ok(Polynomial::from_terms(&target, acc))
    }

    /// Substitution inside the same context; unassigned variables map to themselves.
    pub fn substitute_partial(&self, assignment: &BTreeMap<usize, Polynomial>) -> Result<Polynomial> {
        let mut images = Vec::with_capacity(self.ctx.nvars);
        for v in 0..self.ctx.nvars {
            match assignment.get(&v) {
                Some(p) => {
                    self.ensure_context(p)?;
                    images.push(p.clone());
                }
                None => images.push(Polynomial::var(&self.ctx, v)),
            }
        }
        if let Some(&v) = assignment.keys().find(|&&v| v >= self.ctx.nvars) {
            return Err(Error::Context(format!("variable x{v} out of range")));
        }
        self.substitute(&images)
    }

    /// Sets the variables in `mask` to zero.
    pub fn kill_vars(&self, mask: u64) -> Polynomial {
        self.filter_terms(|m| m.support() & mask == 0)
    }

    /// Evaluation at the origin.
    pub fn augment(&self) -> Polynomial {
        Polynomial::constant(&self.ctx, self.constant_term())
    }

    /// Checks the canonical-form invariant.
    pub fn is_canonical(&self) -> bool {
        self.terms.iter().all(|(m, c)| !c.is_zero() && m.nvars() == self.ctx.nvars)
            && self
                .terms
                .windows(2)
                .all(|w| self.ctx.order.compare(&w[0].0, &w[1].0) == Ordering::Greater)
    }
}

/// `f op g` with context checking.
pub fn ring_op(f: &Polynomial, g: &Polynomial, op: RingOp) -> Result<Polynomial> {
    match op {
        RingOp::Add => f.checked_add(g),
        RingOp::Sub => f.checked_sub(g),
        RingOp::Mul => f.checked_mul(g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx2() -> Ctx {
        PolyContext::new(2, Field::Rational)
    }

    #[test]
    fn cancellation_and_difference_of_squares() {
        let c = ctx2();
        let x = Polynomial::var(&c, 0);
        let y = Polynomial::var(&c, 1);
        let one = Polynomial::one(&c);
        let s = x.add(&one).add(&x.sub(&one));
        assert_eq!(s, x.scalar_mul(&Scalar::from_i64(Field::Rational, 2)));
        let d = x.add(&y).mul(&x.sub(&y));
        // schoolbook: x^2 - xy + xy - y^2
        let expect = Polynomial::from_terms(
            &c,
            [
                (Monomial::from_exponents(vec![2, 0]), Scalar::from_i64(Field::Rational, 1)),
                (Monomial::from_exponents(vec![0, 2]), Scalar::from_i64(Field::Rational, -1)),
            ],
        );
        assert_eq!(d, expect);
        assert!(d.is_canonical());
    }

    #[test]
    fn context_mismatch_is_reported() {
        let a = Polynomial::one(&ctx2());
        let b = Polynomial::one(&PolyContext::new(3, Field::Rational));
        assert!(matches!(ring_op(&a, &b, RingOp::Add), Err(Error::Context(_))));
        let p = Polynomial::one(&PolyContext::new(2, Field::prime(5).unwrap()));
        assert!(a.checked_mul(&p).is_err());
    }

    #[test]
    fn substitution_examples() {
        let c = ctx2();
        let x = Polynomial::var(&c, 0);
        let y = Polynomial::var(&c, 1);
        let f = x.pow(2).add(&y);
        let mut a = BTreeMap::new();
        a.insert(0, Polynomial::zero(&c));
        assert_eq!(f.substitute_partial(&a).unwrap(), y);
        let mut b = BTreeMap::new();
        b.insert(0, y.clone());
        assert_eq!(x.mul(&y).substitute_partial(&b).unwrap(), y.pow(2));
        assert_eq!(f.substitute_partial(&BTreeMap::new()).unwrap(), f);
    }
}
