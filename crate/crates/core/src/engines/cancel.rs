use super::emit;
use super::{split_idempotent, surviving_vars, BuiltinOracle, Obligation};
use crate::cert::{CertBuilder, Certificate, HypothesisProfile, NodeKind, ObligationKind, ObligationRecord};
use crate::error::{Error, Result};
use crate::projmod::{glue_iso, AutLifter, ModIso, ProjModule};
use crate::quotient::build_square_on;

/// Result of [`cancel_witness`].
#[derive(Debug, Clone)]
pub struct CancelOutcome {
    pub iso: Option<ModIso>,
    pub certificate: Certificate,
    pub obligations: Vec<Obligation>,
}

/// Given `stab: P ⊕ Aᵏ ≅ P′ ⊕ Aᵏ`, looks for `P ≅ P′` by the same
/// recursion as the extension engine, gluing with `lifter`.
pub fn cancel_witness(p: &ProjModule, q: &ProjModule, stab: &ModIso, lifter: &dyn AutLifter) -> Result<CancelOutcome> {
    let ring = p.ring();
    if q.ring() != ring {
        return Err(Error::Context("modules live over different rings".into()));
    }
    let k = stab.source().size().checked_sub(p.size()).unwrap_or(usize::MAX);
    let free = ProjModule::free(ring, k.min(stab.source().size()));
    if k == usize::MAX
        || *stab.source() != p.direct_sum(&free)?
        || stab.target().size() != q.size() + k
        || *stab.target() != q.direct_sum(&free)?
    {
        return Err(Error::Precondition("stabilization is not between P ⊕ free and P′ ⊕ free".into()));
    }
    let rank = p.rank()?;
    if q.rank()? != rank {
        return Err(Error::Precondition(format!("ranks differ: {rank} vs {}", q.rank()?)));
    }
    let complex = ring
        .complex()
        .ok_or_else(|| Error::UnsupportedRing(format!("{ring} is not a Stanley-Reisner ring")))?;
    let mut run = Run {
        b: CertBuilder::new("cancel"),
        lifter,
        obligations: Vec::new(),
        budget: complex.faces().len(),
    };
    run.b.profile(HypothesisProfile::new(ring.field(), rank));
    let root = run.b.node(NodeKind::Base, None, "stabilization");
    for m in [p.matrix(), q.matrix()] {
        run.b.statement(root, ring, m);
    }
    for m in [stab.forward(), stab.backward()] {
        run.b.statement(root, stab.source().ring(), m);
    }
    emit::iso(&mut run.b, root, stab);
    let iso = run.rec(Some(root), p, q, 0)?;
    if let Some(iso) = &iso {
        let f = run.b.matrix(root, ring, iso.forward());
        let g = run.b.matrix(root, ring, iso.backward());
        run.b.output("forward", f);
        run.b.output("backward", g);
    }
    Ok(CancelOutcome {
        iso,
        certificate: run.b.finish(),
        obligations: run.obligations,
    })
}

/// `P(0) ≅ Q(0)` for constant idempotents of equal rank.
fn constant_iso(p0: &ProjModule, q0: &ProjModule) -> Result<ModIso> {
    let (b, c) = split_idempotent(p0)?;
    let (bq, cq) = split_idempotent(q0)?;
    if b.cols() != bq.cols() {
        return Err(Error::Precondition("ranks differ at the origin".into()));
    }
    let ring = p0.ring();
    ModIso::new(p0, q0, ring.mat_mul(&bq, &c)?, ring.mat_mul(&b, &cq)?)
}

struct Run<'a> {
    b: CertBuilder,
    lifter: &'a dyn AutLifter,
    obligations: Vec<Obligation>,
    budget: usize,
}

impl Run<'_> {
    fn rec(&mut self, parent: Option<usize>, p: &ProjModule, q: &ProjModule, depth: usize) -> Result<Option<ModIso>> {
        if depth > self.budget {
            return Err(Error::Internal(format!("recursion deeper than {} faces", self.budget)));
        }
        let ring = p.ring();
        let complex = ring
            .complex()
            .ok_or_else(|| Error::Internal(format!("{ring} lost its square-free ideal")))?;
        if complex.is_simplex() || (p.is_constant() && q.is_constant()) {
            return self.base(parent, p, q);
        }
        let sq = build_square_on(ring.ctx(), &complex)?;
        let node = self.b.node(NodeKind::Decompose, parent, format!("apex x{}", sq.apex));
        emit::square(&mut self.b, node, &sq);
        emit::restrict_module(&mut self.b, node, &sq, p)?;
        emit::restrict_module(&mut self.b, node, &sq, q)?;
        let phi1 = self.rec(Some(node), &p.base_change(&sq.i1)?, &q.base_change(&sq.i1)?, depth + 1)?;
        let phi2 = self.rec(Some(node), &p.base_change(&sq.i2)?, &q.base_change(&sq.i2)?, depth + 1)?;
        let (Some(phi1), Some(phi2)) = (phi1, phi2) else {
            return Ok(None);
        };
        let glue = self.b.node(NodeKind::Glue, Some(node), format!("apex x{}", sq.apex));
        match glue_iso(&sq, p, q, &phi1, &phi2, self.lifter) {
            Ok(g) => {
                emit::glue(&mut self.b, glue, &sq, &phi1, &phi2, &g)?;
                Ok(Some(g.iso))
            }
            Err(Error::LifterContract(why)) => {
                self.open(glue, p, format!("automorphism lifter: {why}"));
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }

    fn base(&mut self, parent: Option<usize>, p: &ProjModule, q: &ProjModule) -> Result<Option<ModIso>> {
        let node = self.b.node(NodeKind::Base, parent, format!("vars {:?}", surviving_vars(p.ring())));
        emit::module(&mut self.b, node, p);
        emit::module(&mut self.b, node, q);
        if p == q {
            let iso = ModIso::identity(p);
            emit::iso(&mut self.b, node, &iso);
            return Ok(Some(iso));
        }
        let attempt = || -> std::result::Result<ModIso, String> {
            let to_p0 = BuiltinOracle::solve(p)?;
            let to_q0 = BuiltinOracle::solve(q)?;
            let mid = constant_iso(to_p0.target(), to_q0.target()).map_err(|e| e.to_string())?;
            to_p0
                .then(&mid)
                .and_then(|m| m.then(&to_q0.inverse()))
                .map_err(|e| e.to_string())
        };
        match attempt() {
            Ok(iso) => {
                emit::iso(&mut self.b, node, &iso);
                Ok(Some(iso))
            }
            Err(why) => {
                self.open(node, p, format!("builtin: {why}"));
                Ok(None)
            }
        }
    }

    fn open(&mut self, node: usize, p: &ProjModule, detail: String) {
        let ring = p.ring();
        let vars = surviving_vars(ring);
        let r = self.b.ring(ring);
        let m = self.b.matrix(node, ring, p.matrix());
        self.b.obligation(ObligationRecord {
            node,
            kind: ObligationKind::Cancel,
            ring: r,
            module: m,
            vars: vars.clone(),
            detail: detail.clone(),
        });
        self.obligations.push(Obligation {
            ring: ring.clone(),
            module: p.clone(),
            kind: ObligationKind::Cancel,
            vars,
            detail,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{Ctx, Field, PolyMatrix, Polynomial};
    use crate::projmod::{SectionLifter, StubLifter};
    use crate::quotient::QuotientRing;
    use crate::simplicial::SimplicialComplex;

    fn mat(ctx: &Ctx, n: usize, e: &[&str]) -> PolyMatrix {
        PolyMatrix::from_entries(ctx, n, n, e.iter().map(|s| Polynomial::parse(s, ctx).unwrap()).collect()).unwrap()
    }

    fn ring(facets: &[Vec<usize>], n: usize) -> QuotientRing {
        QuotientRing::from_complex(Field::Rational, &SimplicialComplex::new(n, facets).unwrap())
    }

    #[test]
    fn equal_modules_cancel_to_identity() {
        let r = ring(&[vec![0], vec![1]], 2);
        let p = ProjModule::standard(&r, 2, 1);
        let stab = ModIso::identity(&p.direct_sum(&ProjModule::free(&r, 1)).unwrap());
        let out = cancel_witness(&p, &p, &stab, &SectionLifter).unwrap();
        assert!(out.iso.unwrap().is_identity());
    }

    #[test]
    fn different_idempotents_of_equal_rank() {
        let r = ring(&[vec![0], vec![1]], 2);
        let ctx = r.ctx();
        let p = ProjModule::standard(&r, 2, 1);
        let q = ProjModule::new(&r, mat(ctx, 2, &["1", "-x0", "0", "0"])).unwrap();
        // stab = g ⊕ 1 restricted, with g = [[1, x0], [0, 1]] conjugating p into q
        let g = mat(ctx, 2, &["1", "x0", "0", "1"]);
        let gi = mat(ctx, 2, &["1", "-x0", "0", "1"]);
        let fwd = r.mat_mul(&r.mat_mul(q.matrix(), &gi).unwrap(), p.matrix()).unwrap();
        let bwd = r.mat_mul(&r.mat_mul(p.matrix(), &g).unwrap(), q.matrix()).unwrap();
        let f1 = ProjModule::free(&r, 1);
        let stab = ModIso::new(
            &p.direct_sum(&f1).unwrap(),
            &q.direct_sum(&f1).unwrap(),
            fwd.direct_sum(f1.matrix()),
            bwd.direct_sum(f1.matrix()),
        );
        let stab = stab.unwrap();
        let out = cancel_witness(&p, &q, &stab, &SectionLifter).unwrap();
        let iso = out.iso.unwrap();
        assert_eq!(iso.target(), &q);
        let out = cancel_witness(&p, &q, &stab, &StubLifter).unwrap();
        assert!(out.iso.is_none() || out.obligations.is_empty());
        assert!(out.obligations.iter().all(|o| o.kind == ObligationKind::Cancel));
    }

    #[test]
    fn stabilization_must_match() {
        let r = ring(&[vec![0], vec![1]], 2);
        let p = ProjModule::standard(&r, 2, 1);
        let stab = ModIso::identity(&ProjModule::free(&r, 3));
        assert!(matches!(cancel_witness(&p, &p, &stab, &SectionLifter), Err(Error::Precondition(_))));
    }
}
