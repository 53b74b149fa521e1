use super::emit;
use super::extend::extend_into;
use super::{ExtendOracle, Obligation};
use crate::cert::{CertBuilder, Certificate, Claim, HypothesisProfile, NodeKind};
use crate::error::{Error, Result};
use crate::polycore::PolyMatrix;
use crate::projmod::{augment_matrix, kernel_module, UmRow};
use crate::quotient::{lift_gl, GlStrategy, QuotientRing, RingHom};

/// A lifted row `u` with `u·wᵀ = 1` over `ring`, plus the intermediate
/// matrices of the construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UmLift {
    pub ring: QuotientRing,
    pub u: PolyMatrix,
    pub w: PolyMatrix,
    pub sigma: PolyMatrix,
    pub sigma_inv: PolyMatrix,
    pub delta: PolyMatrix,
    pub delta_inv: PolyMatrix,
    pub strategy: GlStrategy,
}

/// `lift` is set on success. Otherwise either extension obligations are
/// open or every GL strategy failed, with its reasons in `diagnostics`.
#[derive(Debug, Clone)]
pub struct UmLiftOutcome {
    pub lift: Option<UmLift>,
    pub certificate: Certificate,
    pub obligations: Vec<Obligation>,
    pub diagnostics: Vec<String>,
}

/// Lifts a unimodular row over `R/J` to one over `R = k[x]`, and reduces it
/// mod `reduce_mod` when given (which must contain no more than `J`).
pub fn umrow_lift(
    v: &UmRow,
    oracle: Option<&dyn ExtendOracle>,
    strategies: &[GlStrategy],
    reduce_mod: Option<&QuotientRing>,
) -> Result<UmLiftOutcome> {
    let qj = v.ring();
    let ctx = qj.ctx();
    let r = QuotientRing::polynomial_ring(ctx);
    if let Some(qi) = reduce_mod {
        if qi.ctx() != ctx || !qi.ideal_contained_in(qj) {
            return Err(Error::Precondition("the ideal to reduce by is not contained in J".into()));
        }
    }
    let pi = RingHom::quotient_map(&r, qj)?;
    let mut b = CertBuilder::new("umrow lift");
    b.profile(HypothesisProfile::new(qj.field(), v.len()));
    let root = b.node(NodeKind::Lift, None, format!("row of length {}", v.len()));
    let hom = b.hom(&pi);
    b.claim(root, Claim::Hom { hom });
    let (vm, wm) = (v.row(), v.cert());
    let rj = b.ring(qj);
    let vi = b.statement(root, qj, vm);
    let wi = b.matrix(root, qj, wm);
    b.claim(root, Claim::Unimodular { ring: rj, v: vi, w: wi });

    let p = kernel_module(v);
    let ei = b.matrix(root, qj, p.matrix());
    b.claim(root, Claim::Kernel { ring: rj, e: ei, v: vi, w: wi });
    let (iso, obligations) = extend_into(&mut b, Some(root), &p, oracle)?;
    let Some(iso) = iso else {
        return Ok(UmLiftOutcome {
            lift: None,
            certificate: b.finish(),
            obligations,
            diagnostics: vec!["kernel module is not known to be extended".into()],
        });
    };
    let e0 = emit::augment(&mut b, root, qj, p.matrix(), qj);
    let v0 = emit::augment(&mut b, root, qj, vm, qj);
    let w0 = emit::augment(&mut b, root, qj, wm, qj);

    // σ = Ψ·E₀ + wᵀ·v(0),  σ⁻¹ = Φ·E + w(0)ᵀ·v
    let wt = emit::transpose(&mut b, root, qj, wm);
    let left = emit::product(&mut b, root, qj, iso.backward(), &e0)?;
    let right = emit::product(&mut b, root, qj, &wt, &v0)?;
    let sigma = emit::sum(&mut b, root, qj, &left, &right);
    let w0t = emit::transpose(&mut b, root, qj, &w0);
    let left = emit::product(&mut b, root, qj, iso.forward(), p.matrix())?;
    let right = emit::product(&mut b, root, qj, &w0t, vm)?;
    let sigma_inv = emit::sum(&mut b, root, qj, &left, &right);
    if !qj.are_inverse(&sigma, &sigma_inv)? {
        return Err(Error::Internal("σ and its claimed inverse do not multiply to I".into()));
    }
    if emit::product(&mut b, root, qj, vm, &sigma)? != v0 {
        return Err(Error::Internal("v·σ differs from v(0)".into()));
    }

    let lift = match lift_gl(&sigma, &sigma_inv, &pi, strategies, None) {
        Ok(l) => l,
        Err(Error::AllStrategiesFailed { diagnostics }) => {
            return Ok(UmLiftOutcome {
                lift: None,
                certificate: b.finish(),
                obligations,
                diagnostics,
            })
        }
        Err(e) => return Err(e),
    };
    let node = b.node(NodeKind::Lift, Some(root), format!("strategy {}", lift.strategy));
    emit::lift_claims(&mut b, node, &sigma, &sigma_inv, &pi, &lift);

    let v0r = emit::augment(&mut b, node, qj, vm, &r);
    let w0r = emit::augment(&mut b, node, qj, wm, &r);
    let u = emit::product(&mut b, node, &r, &v0r, &lift.delta_inv)?;
    let dt = emit::transpose(&mut b, node, &r, &lift.delta);
    let w = emit::product(&mut b, node, &r, &w0r, &dt)?;
    if emit::restrict(&mut b, node, &pi, &u)? != *vm {
        return Err(Error::Internal("lifted row does not reduce to v".into()));
    }
    let rr = b.ring(&r);
    let ui = b.matrix(node, &r, &u);
    let wi = b.matrix(node, &r, &w);
    b.claim(node, Claim::Unimodular { ring: rr, v: ui, w: wi });
    debug_assert!(augment_matrix(&u) == v0);

    let (ring, u, w) = match reduce_mod {
        Some(qi) => {
            let h = RingHom::quotient_map(&r, qi)?;
            let hi = b.hom(&h);
            b.claim(node, Claim::Hom { hom: hi });
            let u = emit::restrict(&mut b, node, &h, &u)?;
            let w = emit::restrict(&mut b, node, &h, &w)?;
            let ri = b.ring(qi);
            let (ui, wi) = (b.matrix(node, qi, &u), b.matrix(node, qi, &w));
            b.claim(node, Claim::Unimodular { ring: ri, v: ui, w: wi });
            (qi.clone(), u, w)
        }
        None => (r, u, w),
    };
    let ui = b.matrix(node, &ring, &u);
    let wi = b.matrix(node, &ring, &w);
    b.output("u", ui);
    b.output("w", wi);
    Ok(UmLiftOutcome {
        lift: Some(UmLift {
            ring,
            u,
            w,
            sigma,
            sigma_inv,
            delta: lift.delta,
            delta_inv: lift.delta_inv,
            strategy: lift.strategy,
        }),
        certificate: b.finish(),
        obligations,
        diagnostics: lift.diagnostics,
    })
}
