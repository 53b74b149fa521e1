//! Buchberger's algorithm with cofactor tracking.
//!
//! Every basis element carries the row of polynomials expressing it as a
//! combination of the inputs, so ideal membership comes with an explicit,
//! independently checkable certificate.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::polycore::{Ctx, Monomial, PolyMatrix, Polynomial, Scalar};
use crate::quotient::QuotientRing;

/// A basis polynomial and its expression in terms of the inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisElement {
    pub poly: Polynomial,
    pub cofactors: Vec<Polynomial>,
}

#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    ctx: Ctx,
    inputs: Vec<Polynomial>,
    basis: Vec<BasisElement>,
}

/// `Σ coefficients[i] * gens[i] = target`.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipCertificate {
    pub target: Polynomial,
    pub coefficients: Vec<Polynomial>,
}

impl MembershipCertificate {
    /// Re-evaluates the defining identity.
    pub fn holds(&self, gens: &[Polynomial]) -> bool {
        if gens.len() != self.coefficients.len() {
            return false;
        }
        let sum = combine(&self.target, &self.coefficients, gens);
        sum == self.target
    }
}

fn combine(like: &Polynomial, coeffs: &[Polynomial], gens: &[Polynomial]) -> Polynomial {
    coeffs
        .iter()
        .zip(gens)
        .fold(Polynomial::zero(like.ctx()), |acc, (c, g)| acc.add(&c.mul(g)))
}

fn sub_scaled(a: &[Polynomial], q: &Polynomial, b: &[Polynomial]) -> Vec<Polynomial> {
    a.iter().zip(b).map(|(x, y)| x.sub(&q.mul(y))).collect()
}

impl GroebnerBasis {
    /// Runs Buchberger with the normal selection strategy (smallest lcm
    /// degree first, ties by pair index), then minimalizes and inter-reduces.
    pub fn new(gens: &[Polynomial]) -> Result<GroebnerBasis> {
        let first = gens
            .first()
            .ok_or_else(|| Error::Input("Gröbner basis of an empty generator list".into()))?;
        let ctx = first.ctx().clone();
        if let Some(g) = gens.iter().find(|g| !g.same_context(first)) {
            return Err(Error::Context(format!(
                "generator over {} variables among {}-variable generators",
                g.ctx().nvars(),
                ctx.nvars()
            )));
        }
        let m = gens.len();
        let zero = Polynomial::zero(&ctx);
        let unit_row = |i: usize| -> Vec<Polynomial> {
            (0..m).map(|j| if i == j { Polynomial::one(&ctx) } else { zero.clone() }).collect()
        };

        let mut gb = GroebnerBasis {
            ctx: ctx.clone(),
            inputs: gens.to_vec(),
            basis: Vec::new(),
        };
        for (i, g) in gens.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            let (r, cof) = gb.reduce_with_cofactors(g, unit_row(i));
            if !r.is_zero() {
                gb.push_monic(r, cof);
                if gb.has_unit() {
                    break;
                }
            }
        }

        let mut pairs: BTreeSet<(u64, usize, usize)> = BTreeSet::new();
        let add_pairs = |pairs: &mut BTreeSet<(u64, usize, usize)>, basis: &[BasisElement], k: usize| {
            for i in 0..k {
                let l = basis[i].lm().lcm(basis[k].lm());
                pairs.insert((l.degree(), i, k));
            }
        };
        for k in 0..gb.basis.len() {
            add_pairs(&mut pairs, &gb.basis, k);
        }
        while !gb.has_unit() {
            let Some(&(deg, i, j)) = pairs.iter().next() else {
                break;
            };
            pairs.remove(&(deg, i, j));
            if gb.basis[i].lm().is_coprime(gb.basis[j].lm()) {
                continue;
            }
            let (s, cof) = gb.s_poly(i, j);
            let (r, cof) = gb.reduce_with_cofactors(&s, cof);
            if !r.is_zero() {
                gb.push_monic(r, cof);
                add_pairs(&mut pairs, &gb.basis, gb.basis.len() - 1);
            }
        }
        gb.finalize();
        gb.assert_invariants()?;
        Ok(gb)
    }

    fn has_unit(&self) -> bool {
        self.basis.iter().any(|b| b.poly.is_constant())
    }

    fn push_monic(&mut self, p: Polynomial, cof: Vec<Polynomial>) {
        let inv = p.leading_coefficient().unwrap().inv().unwrap();
        self.basis.push(BasisElement {
            poly: p.scalar_mul(&inv),
            cofactors: cof.iter().map(|c| c.scalar_mul(&inv)).collect(),
        });
    }

    fn s_poly(&self, i: usize, j: usize) -> (Polynomial, Vec<Polynomial>) {
        let (a, b) = (&self.basis[i], &self.basis[j]);
        let l = a.lm().lcm(b.lm());
        let one = Scalar::one(self.ctx.field());
        let ta = Polynomial::monomial(&self.ctx, l.div(a.lm()).unwrap(), one.clone());
        let tb = Polynomial::monomial(&self.ctx, l.div(b.lm()).unwrap(), one);
        let s = ta.mul(&a.poly).sub(&tb.mul(&b.poly));
        let cof = a
            .cofactors
            .iter()
            .zip(&b.cofactors)
            .map(|(ca, cb)| ta.mul(ca).sub(&tb.mul(cb)))
            .collect();
        (s, cof)
    }

    /// Full reduction of `f` by the current basis: `f = Σ q_k b_k + r`.
    fn divide(&self, f: &Polynomial) -> (Vec<Polynomial>, Polynomial) {
        let mut q = vec![Polynomial::zero(&self.ctx); self.basis.len()];
        let mut p = f.clone();
        let mut rem: Vec<(Monomial, Scalar)> = Vec::new();
        while let Some((m, c)) = p.leading_term().cloned() {
            let hit = self.basis.iter().position(|b| b.lm().divides(&m));
            match hit {
                Some(k) => {
                    let b = &self.basis[k];
                    let t_mono = m.div(b.lm()).unwrap();
                    let t_coef = c.mul(&b.poly.leading_coefficient().unwrap().inv().unwrap());
                    q[k] = q[k].add(&Polynomial::monomial(&self.ctx, t_mono.clone(), t_coef.clone()));
                    p = p.sub(&b.poly.mul_term(&t_mono, &t_coef));
                }
                None => {
                    rem.push((m.clone(), c.clone()));
                    p = p.sub(&Polynomial::monomial(&self.ctx, m, c));
                }
            }
        }
        (q, Polynomial::from_terms(&self.ctx, rem))
    }

    fn reduce_with_cofactors(&self, f: &Polynomial, cof: Vec<Polynomial>) -> (Polynomial, Vec<Polynomial>) {
        let (q, r) = self.divide(f);
        let mut cof = cof;
        for (k, qk) in q.iter().enumerate() {
            if !qk.is_zero() {
                cof = sub_scaled(&cof, qk, &self.basis[k].cofactors);
            }
        }
        (r, cof)
    }

    fn finalize(&mut self) {
        if let Some(unit) = self.basis.iter().find(|b| b.poly.is_constant()).cloned() {
            self.basis = vec![unit];
            return;
        }
        // minimalize: drop elements whose leading monomial is divisible by another's
        let mut keep: Vec<BasisElement> = Vec::new();
        for (k, b) in self.basis.iter().enumerate() {
            let redundant = self.basis.iter().enumerate().any(|(j, o)| {
                j != k && o.lm().divides(b.lm()) && (o.lm() != b.lm() || j < k)
            });
            if !redundant {
                keep.push(b.clone());
            }
        }
        keep.sort_by(|a, b| self.ctx.order().compare(a.lm(), b.lm()));
        // inter-reduce each element by the others
        for k in 0..keep.len() {
            let others = GroebnerBasis {
                ctx: self.ctx.clone(),
                inputs: Vec::new(),
                basis: keep.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, b)| b.clone()).collect(),
            };
            let (r, cof) = others.reduce_tail(&keep[k]);
            keep[k] = BasisElement { poly: r, cofactors: cof };
        }
        self.basis = keep;
    }

    /// Reduces the non-leading terms of `b` by the basis of `self`.
    fn reduce_tail(&self, b: &BasisElement) -> (Polynomial, Vec<Polynomial>) {
        let lead = Polynomial::monomial(&self.ctx, b.lm().clone(), b.poly.leading_coefficient().unwrap().clone());
        let tail = b.poly.sub(&lead);
        let (q, r) = self.divide(&tail);
        let mut cof = b.cofactors.clone();
        for (k, qk) in q.iter().enumerate() {
            if !qk.is_zero() {
                cof = sub_scaled(&cof, qk, &self.basis[k].cofactors);
            }
        }
        (lead.add(&r), cof)
    }

    /// Checks that every element equals its cofactor combination and that
    /// all S-polynomials reduce to zero.
    pub fn assert_invariants(&self) -> Result<()> {
        for b in &self.basis {
            if combine(&b.poly, &b.cofactors, &self.inputs) != b.poly {
                return Err(Error::Internal(format!("basis element {} disagrees with its cofactors", b.poly)));
            }
        }
        for i in 0..self.basis.len() {
            for j in i + 1..self.basis.len() {
                let (s, _) = self.s_poly(i, j);
                if !self.divide(&s).1.is_zero() {
                    return Err(Error::Internal(format!("S-polynomial of basis pair ({i}, {j}) does not reduce to 0")));
                }
            }
        }
        Ok(())
    }

    pub fn inputs(&self) -> &[Polynomial] {
        &self.inputs
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn polys(&self) -> Vec<Polynomial> {
        self.basis.iter().map(|b| b.poly.clone()).collect()
    }

    /// Remainder of `f` modulo the basis.
    pub fn normal_form(&self, f: &Polynomial) -> Polynomial {
        self.divide(f).1
    }

    /// Membership certificate for `f`, or `None` when `f` is not in the ideal.
    pub fn member(&self, f: &Polynomial) -> Result<Option<MembershipCertificate>> {
        if !f.same_context(&Polynomial::zero(&self.ctx)) {
            return Err(Error::Context("membership target over a different context".into()));
        }
        let (q, r) = self.divide(f);
        if !r.is_zero() {
            return Ok(None);
        }
        let mut coeffs = vec![Polynomial::zero(&self.ctx); self.inputs.len()];
        for (k, qk) in q.iter().enumerate() {
            if qk.is_zero() {
                continue;
            }
            for (c, bc) in coeffs.iter_mut().zip(&self.basis[k].cofactors) {
                *c = c.add(&qk.mul(bc));
            }
        }
        let cert = MembershipCertificate {
            target: f.clone(),
            coefficients: coeffs,
        };
        if !cert.holds(&self.inputs) {
            return Err(Error::Internal(format!("membership certificate for {f} fails re-verification")));
        }
        Ok(Some(cert))
    }
}

impl BasisElement {
    fn lm(&self) -> &Monomial {
        self.poly.leading_monomial().expect("basis elements are nonzero")
    }
}

/// Membership of `f` in the ideal generated by `gens`.
pub fn member(f: &Polynomial, gens: &[Polynomial]) -> Result<Option<MembershipCertificate>> {
    if gens.is_empty() {
        return Ok(if f.is_zero() {
            Some(MembershipCertificate {
                target: f.clone(),
                coefficients: Vec::new(),
            })
        } else {
            None
        });
    }
    GroebnerBasis::new(gens)?.member(f)
}

/// For a row `v` over `R = k[x]/I`, finds `w` with `nf(v · wᵀ) = 1`, or
/// `None` when `v` is not unimodular.
pub fn unimodular_cert(v: &PolyMatrix, ring: &QuotientRing) -> Result<Option<PolyMatrix>> {
    if v.rows() != 1 {
        return Err(Error::shape("unimodular_cert", v.shape(), (1, v.cols())));
    }
    let ctx = ring.ctx();
    let mut gens: Vec<Polynomial> = v.entries().to_vec();
    gens.extend(ring.generator_polys());
    let Some(cert) = member(&Polynomial::one(ctx), &gens)? else {
        return Ok(None);
    };
    let w = PolyMatrix::from_entries(
        ctx,
        1,
        v.cols(),
        cert.coefficients[..v.cols()].iter().map(|c| ring.normal_form(c)).collect(),
    )?;
    let check = ring.mat_mul(v, &w.transpose())?;
    if !check.get(0, 0).is_one() {
        return Err(Error::Internal("unimodularity certificate fails re-verification".into()));
    }
    Ok(Some(w))
}
