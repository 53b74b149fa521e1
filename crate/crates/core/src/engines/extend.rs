use super::emit;
use super::{surviving_vars, BuiltinOracle, ExtendOracle, Obligation, OracleOutcome};
use crate::cert::{CertBuilder, Certificate, HypothesisProfile, NodeKind, ObligationKind, ObligationRecord};
use crate::error::{Error, Result};
use crate::projmod::{glue_iso, ModIso, ProjModule, SectionLifter};
use crate::quotient::build_square_on;

/// Result of [`extend_witness`]. `iso` is `P ≅ P(0)` over the ring of `P`
/// when every base case was settled; otherwise the open base cases are in
/// `obligations` and the certificate holds everything that was proved.
#[derive(Debug, Clone)]
pub struct ExtendOutcome {
    pub iso: Option<ModIso>,
    pub certificate: Certificate,
    pub obligations: Vec<Obligation>,
}

/// Proves that `P` is extended from the field by recursing over Vorst
/// decompositions of the ring's complex.
pub fn extend_witness(p: &ProjModule, oracle: Option<&dyn ExtendOracle>) -> Result<ExtendOutcome> {
    let mut b = CertBuilder::new("extend");
    if let Ok(rank) = p.rank() {
        b.profile(HypothesisProfile::new(p.ring().field(), rank));
    }
    let (iso, obligations) = extend_into(&mut b, None, p, oracle)?;
    b.statement(0, p.ring(), p.matrix());
    if let Some(iso) = &iso {
        let f = b.matrix(0, p.ring(), iso.forward());
        let g = b.matrix(0, p.ring(), iso.backward());
        b.output("forward", f);
        b.output("backward", g);
    }
    Ok(ExtendOutcome {
        iso,
        certificate: b.finish(),
        obligations,
    })
}

/// Runs the recursion inside an existing certificate under `parent`.
pub(crate) fn extend_into(
    b: &mut CertBuilder,
    parent: Option<usize>,
    p: &ProjModule,
    oracle: Option<&dyn ExtendOracle>,
) -> Result<(Option<ModIso>, Vec<Obligation>)> {
    let complex = p
        .ring()
        .complex()
        .ok_or_else(|| Error::UnsupportedRing(format!("{} is not a Stanley-Reisner ring", p.ring())))?;
    let mut run = Run {
        b,
        oracle,
        obligations: Vec::new(),
        budget: complex.faces().len(),
    };
    let iso = run.rec(parent, p, 0)?;
    if let Some(iso) = &iso {
        debug_assert_eq!(*iso.target(), p.augmented());
    }
    Ok((iso, run.obligations))
}

struct Run<'a, 'o> {
    b: &'a mut CertBuilder,
    oracle: Option<&'o dyn ExtendOracle>,
    obligations: Vec<Obligation>,
    budget: usize,
}

impl Run<'_, '_> {
    fn rec(&mut self, parent: Option<usize>, p: &ProjModule, depth: usize) -> Result<Option<ModIso>> {
        if depth > self.budget {
            return Err(Error::Internal(format!("recursion deeper than {} faces", self.budget)));
        }
        let ring = p.ring();
        let complex = ring
            .complex()
            .ok_or_else(|| Error::Internal(format!("{ring} lost its square-free ideal")))?;
        if complex.is_simplex() || p.is_constant() {
            return self.base(parent, p);
        }
        let sq = build_square_on(ring.ctx(), &complex)?;
        let node = self.b.node(NodeKind::Decompose, parent, format!("apex x{}", sq.apex));
        emit::square(self.b, node, &sq);
        emit::restrict_module(self.b, node, &sq, p)?;
        let p1 = p.base_change(&sq.i1)?;
        let p2 = p.base_change(&sq.i2)?;
        // both branches run so that every open base case is reported
        let phi1 = self.rec(Some(node), &p1, depth + 1)?;
        let phi2 = self.rec(Some(node), &p2, depth + 1)?;
        let (Some(phi1), Some(phi2)) = (phi1, phi2) else {
            return Ok(None);
        };
        let glue = self.b.node(NodeKind::Glue, Some(node), format!("apex x{}", sq.apex));
        let q = p.augmented();
        emit::restrict_module(self.b, glue, &sq, &q)?;
        let g = glue_iso(&sq, p, &q, &phi1, &phi2, &SectionLifter)?;
        emit::glue(self.b, glue, &sq, &phi1, &phi2, &g)?;
        Ok(Some(g.iso))
    }

    fn base(&mut self, parent: Option<usize>, p: &ProjModule) -> Result<Option<ModIso>> {
        let ring = p.ring();
        let vars = surviving_vars(ring);
        let label = format!("vars {:?}", vars);
        let node = self.b.node(NodeKind::Base, parent, label);
        emit::module(self.b, node, p);
        emit::augment(self.b, node, ring, p.matrix(), ring);
        let q = p.augmented();
        let mut reasons = Vec::new();
        let mut kind = ObligationKind::Extend;
        let builtin = BuiltinOracle;
        let chain: Vec<&dyn ExtendOracle> = std::iter::once(&builtin as &dyn ExtendOracle).chain(self.oracle).collect();
        for oracle in chain {
            if oracle.name() != "builtin" {
                kind = oracle.kind();
            }
            match oracle.extend(p) {
                OracleOutcome::Solved(iso) if *iso.source() == *p && *iso.target() == q => {
                    emit::iso(self.b, node, &iso);
                    return Ok(Some(iso));
                }
                OracleOutcome::Solved(_) => reasons.push(format!("{}: isomorphism between the wrong modules", oracle.name())),
                OracleOutcome::Declined(why) => reasons.push(format!("{}: {why}", oracle.name())),
            }
        }
        let detail = reasons.join("; ");
        let r = self.b.ring(ring);
        let m = self.b.matrix(node, ring, p.matrix());
        self.b.obligation(ObligationRecord {
            node,
            kind,
            ring: r,
            module: m,
            vars: vars.clone(),
            detail: detail.clone(),
        });
        self.obligations.push(Obligation {
            ring: ring.clone(),
            module: p.clone(),
            kind,
            vars,
            detail,
        });
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::{FailingOracle, FailingStableOracle, StableAdapter};
    use crate::polycore::{Ctx, Field, PolyMatrix, Polynomial};
    use crate::quotient::QuotientRing;
    use crate::simplicial::SimplicialComplex;

    fn mat(ctx: &Ctx, n: usize, e: &[&str]) -> PolyMatrix {
        PolyMatrix::from_entries(ctx, n, n, e.iter().map(|s| Polynomial::parse(s, ctx).unwrap()).collect()).unwrap()
    }

    fn two_points() -> QuotientRing {
        QuotientRing::from_complex(Field::Rational, &SimplicialComplex::new(2, &[vec![0], vec![1]]).unwrap())
    }

    fn hollow_triangle() -> QuotientRing {
        let s = SimplicialComplex::new(3, &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        QuotientRing::from_complex(Field::Rational, &s)
    }

    #[test]
    fn constant_module_needs_no_decomposition() {
        let r = two_points();
        let out = extend_witness(&ProjModule::standard(&r, 3, 2), None).unwrap();
        assert!(out.iso.unwrap().is_identity());
        assert!(out.certificate.nodes.iter().all(|n| n.kind != NodeKind::Glue));
    }

    #[test]
    fn conjugated_idempotent_over_two_lines() {
        let r = two_points();
        let ctx = r.ctx();
        // g diag(1,0) g⁻¹ with g = [[1, x0], [0, 1]]
        let e = r.mat_chain(&[&mat(ctx, 2, &["1", "x0", "0", "1"]), &mat(ctx, 2, &["1", "0", "0", "0"]), &mat(ctx, 2, &["1", "-x0", "0", "1"])])
            .unwrap();
        let p = ProjModule::new(&r, e).unwrap();
        let out = extend_witness(&p, None).unwrap();
        let iso = out.iso.expect("univariate base cases are built in");
        assert_eq!(iso.target().rank().unwrap(), 1);
        assert!(out.obligations.is_empty());
        assert!(out.certificate.output("forward").is_some());
    }

    #[test]
    fn stub_on_hollow_triangle_leaves_edge_obligations() {
        let r = hollow_triangle();
        let ctx = r.ctx();
        let e = r
            .mat_chain(&[
                &mat(ctx, 2, &["1", "x1*x2", "0", "1"]),
                &mat(ctx, 2, &["1", "0", "0", "0"]),
                &mat(ctx, 2, &["1", "-x1*x2", "0", "1"]),
            ])
            .unwrap();
        let p = ProjModule::new(&r, e).unwrap();
        let out = extend_witness(&p, Some(&FailingOracle)).unwrap();
        assert!(out.iso.is_none());
        assert!(!out.obligations.is_empty());
        for ob in &out.obligations {
            assert_eq!(ob.kind, ObligationKind::Extend);
            assert!(ob.vars.len() == 2, "{:?}", ob.vars);
        }
        assert_eq!(out.certificate.obligations.len(), out.obligations.len());
        let stable = StableAdapter(FailingStableOracle);
        let out = extend_witness(&p, Some(&stable)).unwrap();
        assert!(out.obligations.iter().all(|o| o.kind == ObligationKind::StableExtend));
    }
}
