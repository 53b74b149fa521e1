//! Independent certificate checker. Every claim is re-evaluated with plain
//! polynomial arithmetic and monomial normal forms; no engine code runs.

use std::collections::BTreeSet;
use std::fmt;

use srpb::cert::{Certificate, Claim};
use srpb::polycore::{Monomial, PolyMatrix, Polynomial};
use srpb::quotient::QuotientRing;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub node: Option<usize>,
    pub identity: String,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node {
            Some(n) => write!(f, "N{n} {}: {}", self.identity, self.message),
            None => write!(f, "{}: {}", self.identity, self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifierReport {
    pub checked: usize,
    pub failures: Vec<Finding>,
    pub warnings: Vec<String>,
    pub open_obligations: usize,
}

impl VerifierReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for VerifierReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        for x in &self.failures {
            writeln!(f, "FAIL {x}")?;
        }
        write!(
            f,
            "{} claims checked, {} failed, {} open obligations",
            self.checked,
            self.failures.len(),
            self.open_obligations
        )
    }
}

type Check = std::result::Result<(), String>;

struct Verifier<'a> {
    cert: &'a Certificate,
}

fn nf(ring: &QuotientRing, p: &Polynomial) -> Polynomial {
    p.filter_terms(|m| ring.survives(m))
}

fn mat_nf(ring: &QuotientRing, m: &PolyMatrix) -> PolyMatrix {
    m.map(|p| nf(ring, p))
}

fn mul(ring: &QuotientRing, a: &PolyMatrix, b: &PolyMatrix) -> std::result::Result<PolyMatrix, String> {
    if a.cols() != b.rows() {
        return Err(format!("cannot multiply {:?} by {:?}", a.shape(), b.shape()));
    }
    Ok(mat_nf(ring, &a.mul(b)))
}

fn same(what: &str, got: &PolyMatrix, want: &PolyMatrix) -> Check {
    if got.shape() != want.shape() {
        return Err(format!("{what}: shape {:?} vs {:?}", got.shape(), want.shape()));
    }
    if got != want {
        let k = (0..got.entries().len()).find(|&k| got.entries()[k] != want.entries()[k]).unwrap_or(0);
        let (i, j) = (k / got.cols().max(1), k % got.cols().max(1));
        return Err(format!("{what}: entry ({i},{j}) is {} but should be {}", got.get(i, j), want.get(i, j)));
    }
    Ok(())
}

fn identity_like(m: &PolyMatrix) -> PolyMatrix {
    PolyMatrix::identity(m.ctx(), m.rows())
}

/// Generators of `I + J` and `I ∩ J` for monomial ideals, minimalized.
fn minimal(mut gens: Vec<Monomial>) -> BTreeSet<Vec<u32>> {
    gens.sort_by_key(|m| m.degree());
    let mut keep: Vec<Monomial> = Vec::new();
    for g in gens {
        if !keep.iter().any(|k| k.divides(&g)) {
            keep.push(g);
        }
    }
    keep.into_iter().map(|m| m.exponents().to_vec()).collect()
}

impl Verifier<'_> {
    fn ring(&self, id: usize) -> std::result::Result<&QuotientRing, String> {
        self.cert.rings.get(id).ok_or_else(|| format!("ring R{id} is missing"))
    }

    fn matrix(&self, id: usize, ring: Option<usize>) -> std::result::Result<&PolyMatrix, String> {
        let rec = self.cert.matrices.get(id).ok_or_else(|| format!("matrix M{id} is missing"))?;
        if let Some(r) = ring {
            if rec.ring != r {
                return Err(format!("matrix M{id} lives over R{} instead of R{r}", rec.ring));
            }
        }
        Ok(&rec.matrix)
    }

    fn hom_apply(&self, id: usize, m: &PolyMatrix) -> std::result::Result<PolyMatrix, String> {
        let (_, t, h) = self.cert.homs.get(id).ok_or_else(|| format!("hom H{id} is missing"))?;
        let target = self.ring(*t)?;
        m.try_map(|p| p.substitute(h.images()))
            .map(|m| mat_nf(target, &m))
            .map_err(|e| e.to_string())
    }

    fn hom_sound(&self, id: usize) -> Check {
        let (s, t, h) = self.cert.homs.get(id).ok_or_else(|| format!("hom H{id} is missing"))?;
        let (source, target) = (self.ring(*s)?, self.ring(*t)?);
        if h.images().len() != source.nvars() {
            return Err(format!("H{id} has {} images for {} variables", h.images().len(), source.nvars()));
        }
        for g in source.generator_polys() {
            let image = g.substitute(h.images()).map_err(|e| e.to_string())?;
            if !nf(target, &image).is_zero() {
                return Err(format!("H{id} sends the relation {g} to {image}, which is nonzero in R{t}"));
            }
        }
        Ok(())
    }

    fn idempotent(&self, ring: usize, e: usize) -> Check {
        let r = self.ring(ring)?;
        let m = self.matrix(e, Some(ring))?;
        if !m.is_square() {
            return Err(format!("M{e} is not square"));
        }
        same(&format!("M{e}²"), &mul(r, m, m)?, &mat_nf(r, m))
    }

    fn square(&self, id: usize) -> Check {
        let sq = self.cert.squares.get(id).ok_or_else(|| format!("square S{id} is missing"))?;
        let [a, a1, a2, a0] = sq.rings;
        let [i1, i2, j1, j2, s] = sq.homs;
        for (h, from, to) in [(i1, a, a1), (i2, a, a2), (j1, a1, a0), (j2, a2, a0), (s, a0, a2)] {
            let (hs, ht, _) = self.cert.homs.get(h).ok_or_else(|| format!("hom H{h} is missing"))?;
            if (*hs, *ht) != (from, to) {
                return Err(format!("H{h} goes R{hs}→R{ht}, expected R{from}→R{to}"));
            }
            self.hom_sound(h)?;
        }
        let (ra, r1, r2, r0) = (self.ring(a)?, self.ring(a1)?, self.ring(a2)?, self.ring(a0)?);
        let ctx = ra.ctx();
        let vars = PolyMatrix::from_fn(ctx, 1, ctx.nvars(), |_, j| Polynomial::var(ctx, j));
        let left = self.hom_apply(j1, &self.hom_apply(i1, &vars)?)?;
        let right = self.hom_apply(j2, &self.hom_apply(i2, &vars)?)?;
        same("j1∘i1 vs j2∘i2", &left, &right)?;
        let x0 = mat_nf(r0, &vars);
        same("j2∘section", &self.hom_apply(j2, &self.hom_apply(s, &x0)?)?, &x0)?;
        // a cartesian square of monomial quotients: I = I1 ∩ I2, I0 = I1 + I2
        let g1 = r1.gens().to_vec();
        let g2 = r2.gens().to_vec();
        let meet: Vec<Monomial> = g1.iter().flat_map(|p| g2.iter().map(move |q| p.lcm(q))).collect();
        if minimal(meet) != minimal(ra.gens().to_vec()) {
            return Err(format!("ideal of R{a} is not the intersection of those of R{a1} and R{a2}"));
        }
        if minimal([g1, g2].concat()) != minimal(r0.gens().to_vec()) {
            return Err(format!("ideal of R{a0} is not the sum of those of R{a1} and R{a2}"));
        }
        Ok(())
    }

    fn claim(&self, c: &Claim) -> Check {
        match *c {
            Claim::Hom { hom } => self.hom_sound(hom),
            Claim::Square { square } => self.square(square),
            Claim::Idempotent { ring, e } => self.idempotent(ring, e),
            Claim::Rank { ring, e, rank } => {
                self.idempotent(ring, e)?;
                let m = self.matrix(e, Some(ring))?;
                let e0 = m.map(|p| Polynomial::constant(p.ctx(), p.constant_term()));
                match e0.constant_rank() {
                    Some(r) if r == rank => Ok(()),
                    got => Err(format!("rank of M{e} at the origin is {got:?}, claimed {rank}")),
                }
            }
            Claim::ModIso { ring, source, target, forward, backward } => {
                self.idempotent(ring, source)?;
                self.idempotent(ring, target)?;
                let r = self.ring(ring)?;
                let (es, et) = (self.matrix(source, Some(ring))?, self.matrix(target, Some(ring))?);
                let (f, b) = (self.matrix(forward, Some(ring))?, self.matrix(backward, Some(ring))?);
                same("forward·source", &mul(r, f, es)?, f)?;
                same("target·forward", &mul(r, et, f)?, f)?;
                same("backward·target", &mul(r, b, et)?, b)?;
                same("source·backward", &mul(r, es, b)?, b)?;
                same("backward·forward", &mul(r, b, f)?, es)?;
                same("forward·backward", &mul(r, f, b)?, et)
            }
            Claim::Inverse { ring, a, b } => {
                let r = self.ring(ring)?;
                let (x, y) = (self.matrix(a, Some(ring))?, self.matrix(b, Some(ring))?);
                same(&format!("M{a}·M{b}"), &mul(r, x, y)?, &identity_like(x))?;
                same(&format!("M{b}·M{a}"), &mul(r, y, x)?, &identity_like(x))
            }
            Claim::Restrict { hom, from, to } => {
                let (s, t, _) = self.cert.homs.get(hom).ok_or_else(|| format!("hom H{hom} is missing"))?;
                let image = self.hom_apply(hom, self.matrix(from, Some(*s))?)?;
                same(&format!("H{hom}(M{from})"), &image, self.matrix(to, Some(*t))?)
            }
            Claim::Product { ring, out, left, right } => {
                let r = self.ring(ring)?;
                let got = mul(r, self.matrix(left, Some(ring))?, self.matrix(right, Some(ring))?)?;
                same(&format!("M{left}·M{right}"), &got, self.matrix(out, Some(ring))?)
            }
            Claim::Sum { ring, out, left, right } => {
                let r = self.ring(ring)?;
                let got = self.matrix(left, Some(ring))?.checked_add(self.matrix(right, Some(ring))?);
                let got = got.map_err(|e| e.to_string())?;
                same(&format!("M{left}+M{right}"), &mat_nf(r, &got), self.matrix(out, Some(ring))?)
            }
            Claim::Transpose { out, of } => same(&format!("M{of}ᵀ"), &self.matrix(of, None)?.transpose(), self.matrix(out, None)?),
            Claim::Augment { out, of } => {
                let m = self.matrix(of, None)?;
                let out_m = self.matrix(out, None)?;
                let got = PolyMatrix::from_fn(out_m.ctx(), m.rows(), m.cols(), |i, j| {
                    Polynomial::constant(out_m.ctx(), m.get(i, j).constant_term())
                });
                same(&format!("M{of}(0)"), &got, out_m)
            }
            Claim::Kernel { ring, e, v, w } => {
                let r = self.ring(ring)?;
                let (vm, wm) = (self.matrix(v, Some(ring))?, self.matrix(w, Some(ring))?);
                let outer = mul(r, &wm.transpose(), vm)?;
                same(&format!("I − M{w}ᵀM{v}"), &identity_like(&outer).sub(&outer), self.matrix(e, Some(ring))?)
            }
            Claim::Unimodular { ring, v, w } => {
                let r = self.ring(ring)?;
                let (vm, wm) = (self.matrix(v, Some(ring))?, self.matrix(w, Some(ring))?);
                if vm.rows() != 1 || vm.shape() != wm.shape() {
                    return Err(format!("M{v} and M{w} are not rows of equal length"));
                }
                let one = mul(r, vm, &wm.transpose())?;
                same(&format!("M{v}·M{w}ᵀ"), &one, &identity_like(&one))
            }
            Claim::Whitehead { hom, u, u_inv, sigma, sigma_inv } => {
                let (s, t, _) = self.cert.homs.get(hom).ok_or_else(|| format!("hom H{hom} is missing"))?;
                let r = self.ring(*s)?;
                let (um, ui) = (self.matrix(u, Some(*s))?, self.matrix(u_inv, Some(*s))?);
                same("U·U⁻¹", &mul(r, um, ui)?, &identity_like(um))?;
                let block = self.matrix(sigma, Some(*t))?.direct_sum(self.matrix(sigma_inv, Some(*t))?);
                same(&format!("H{hom}(U)"), &self.hom_apply(hom, um)?, &block)
            }
            Claim::Lift { hom, delta, delta_inv, sigma } => {
                let (s, t, _) = self.cert.homs.get(hom).ok_or_else(|| format!("hom H{hom} is missing"))?;
                let r = self.ring(*s)?;
                let (d, di) = (self.matrix(delta, Some(*s))?, self.matrix(delta_inv, Some(*s))?);
                same("Δ·Δ⁻¹", &mul(r, d, di)?, &identity_like(d))?;
                same("Δ⁻¹·Δ", &mul(r, di, d)?, &identity_like(d))?;
                same(&format!("H{hom}(Δ)"), &self.hom_apply(hom, d)?, self.matrix(sigma, Some(*t))?)
            }
            Claim::Glue { square, m, m1, m2 } => {
                let sq = self.cert.squares.get(square).ok_or_else(|| format!("square S{square} is missing"))?;
                let whole = self.matrix(m, Some(sq.rings[0]))?;
                same(&format!("i1(M{m})"), &self.hom_apply(sq.homs[0], whole)?, self.matrix(m1, Some(sq.rings[1]))?)?;
                same(&format!("i2(M{m})"), &self.hom_apply(sq.homs[1], whole)?, self.matrix(m2, Some(sq.rings[2]))?)
            }
            Claim::Statement { stated, m } => {
                let ring = self.cert.matrices.get(stated).map(|r| r.ring);
                same(&format!("stated M{stated}"), self.matrix(stated, ring)?, self.matrix(m, ring)?)
            }
        }
    }
}

/// Re-checks every claim, the normal form of every matrix and that every
/// matrix is bound by at least one claim.
pub fn verify(cert: &Certificate) -> VerifierReport {
    let v = Verifier { cert };
    let mut report = VerifierReport::default();
    if cert.claims.is_empty() {
        report.warnings.push("certificate makes no claims".into());
    }
    for (i, m) in cert.matrices.iter().enumerate() {
        let fail = |message: String| Finding {
            node: Some(m.node),
            identity: "normal-form".into(),
            message,
        };
        match cert.rings.get(m.ring) {
            Some(r) if mat_nf(r, &m.matrix) != m.matrix => report.failures.push(fail(format!("M{i} is not reduced mod R{}", m.ring))),
            Some(_) => {}
            None => report.failures.push(fail(format!("M{i} refers to a missing ring"))),
        }
    }
    let mut bound = vec![false; cert.matrices.len()];
    for c in &cert.claims {
        report.checked += 1;
        for id in c.claim.matrices() {
            if let Some(b) = bound.get_mut(id) {
                *b = true;
            }
        }
        if let Err(message) = v.claim(&c.claim) {
            report.failures.push(Finding {
                node: Some(c.node),
                identity: c.claim.name().to_string(),
                message,
            });
        }
    }
    for (i, b) in bound.iter().enumerate() {
        if !b {
            report.failures.push(Finding {
                node: Some(cert.matrices[i].node),
                identity: "binding".into(),
                message: format!("M{i} is attached but no claim constrains it"),
            });
        }
    }
    for o in &cert.obligations {
        report.open_obligations += 1;
        let Ok(ring) = v.ring(o.ring) else {
            report.failures.push(Finding {
                node: Some(o.node),
                identity: "obligation".into(),
                message: format!("obligation refers to missing ring R{}", o.ring),
            });
            continue;
        };
        let n = ring.nvars();
        let survivors: Vec<usize> = (0..n).filter(|&x| ring.survives(&Monomial::var(n, x))).collect();
        if survivors != o.vars {
            report.failures.push(Finding {
                node: Some(o.node),
                identity: "obligation".into(),
                message: format!("variables {:?} do not match the ring's surviving {:?}", o.vars, survivors),
            });
        } else if ring.gens().iter().any(|g| g.degree() != 1) {
            report.warnings.push(format!("obligation at N{} is over a ring that is not a polynomial ring", o.node));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use srpb::polycore::{Field, PolyContext};
    use srpb::projmod::ProjModule;
    use srpb::engines::extend_witness;

    #[test]
    fn empty_certificate_passes_with_a_warning() {
        let r = verify(&Certificate::default());
        assert!(r.passed());
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn corrupted_idempotent_is_named() {
        let ctx = PolyContext::new(2, Field::Rational);
        let a = QuotientRing::new(&ctx, vec![Monomial::from_exponents(vec![1, 1])]);
        let e = PolyMatrix::from_entries(
            &ctx,
            2,
            2,
            ["1", "x0", "0", "0"].iter().map(|s| Polynomial::parse(s, &ctx).unwrap()).collect(),
        )
        .unwrap();
        let out = extend_witness(&ProjModule::new(&a, e).unwrap(), None).unwrap();
        let mut cert = out.certificate;
        assert!(verify(&cert).passed(), "{}", verify(&cert));
        let m = cert.matrices[0].matrix.clone();
        let mut bad = m.clone();
        bad.set(1, 1, Polynomial::one(&ctx));
        cert.matrices[0].matrix = bad;
        let r = verify(&cert);
        assert!(!r.passed());
        assert!(r.failures.iter().any(|f| f.identity == "idempotent"));
    }

    #[test]
    fn consistent_rewrite_of_a_constant_module_breaks_the_statement() {
        let ctx = PolyContext::new(2, Field::Rational);
        let a = QuotientRing::new(&ctx, vec![Monomial::from_exponents(vec![1, 1])]);
        let e = PolyMatrix::partial_identity(&ctx, 2, 1);
        let mut cert = extend_witness(&ProjModule::new(&a, e).unwrap(), None).unwrap().certificate;
        // the identity is idempotent and its own augmentation, so only the
        // stated input can tell it apart from E
        cert.matrices[0].matrix = PolyMatrix::identity(&ctx, 2);
        let r = verify(&cert);
        assert_eq!(r.failures.len(), 1, "{r}");
        assert_eq!(r.failures[0].identity, "statement");
    }
}
