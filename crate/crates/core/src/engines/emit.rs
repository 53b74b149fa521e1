//! Helpers that record engine results as certificate claims.

use crate::cert::{CertBuilder, Certificate, Claim, HypothesisProfile, NodeKind};
use crate::error::Result;
use crate::polycore::PolyMatrix;
use crate::projmod::{GluedIso, ModIso, Patch, ProjModule};
use crate::quotient::{FiberSquare, GlLift, QuotientRing, RingHom};

pub(crate) fn module(b: &mut CertBuilder, node: usize, p: &ProjModule) -> usize {
    let ring = b.ring(p.ring());
    let e = b.matrix(node, p.ring(), p.matrix());
    b.claim(node, Claim::Idempotent { ring, e });
    e
}

pub(crate) fn iso(b: &mut CertBuilder, node: usize, iso: &ModIso) -> (usize, usize) {
    let source = module(b, node, iso.source());
    let target = module(b, node, iso.target());
    let r = iso.source().ring();
    let ring = b.ring(r);
    let forward = b.matrix(node, r, iso.forward());
    let backward = b.matrix(node, r, iso.backward());
    b.claim(node, Claim::ModIso { ring, source, target, forward, backward });
    (forward, backward)
}

pub(crate) fn restrict(b: &mut CertBuilder, node: usize, h: &RingHom, from: &PolyMatrix) -> Result<PolyMatrix> {
    let to = h.apply_matrix(from)?;
    let hom = b.hom(h);
    let f = b.matrix(node, h.source(), from);
    let t = b.matrix(node, h.target(), &to);
    b.claim(node, Claim::Restrict { hom, from: f, to: t });
    Ok(to)
}

pub(crate) fn product(
    b: &mut CertBuilder,
    node: usize,
    ring: &QuotientRing,
    left: &PolyMatrix,
    right: &PolyMatrix,
) -> Result<PolyMatrix> {
    let out = ring.mat_mul(left, right)?;
    let r = b.ring(ring);
    let l = b.matrix(node, ring, left);
    let rr = b.matrix(node, ring, right);
    let o = b.matrix(node, ring, &out);
    b.claim(node, Claim::Product { ring: r, out: o, left: l, right: rr });
    Ok(out)
}

pub(crate) fn sum(b: &mut CertBuilder, node: usize, ring: &QuotientRing, left: &PolyMatrix, right: &PolyMatrix) -> PolyMatrix {
    let out = ring.mat_nf(&left.add(right));
    let r = b.ring(ring);
    let l = b.matrix(node, ring, left);
    let rr = b.matrix(node, ring, right);
    let o = b.matrix(node, ring, &out);
    b.claim(node, Claim::Sum { ring: r, out: o, left: l, right: rr });
    out
}

pub(crate) fn transpose(b: &mut CertBuilder, node: usize, ring: &QuotientRing, of: &PolyMatrix) -> PolyMatrix {
    let out = of.transpose();
    let f = b.matrix(node, ring, of);
    let o = b.matrix(node, ring, &out);
    b.claim(node, Claim::Transpose { out: o, of: f });
    out
}

/// Records `out = of(0)` where `out` lives over `out_ring`.
pub(crate) fn augment(
    b: &mut CertBuilder,
    node: usize,
    of_ring: &QuotientRing,
    of: &PolyMatrix,
    out_ring: &QuotientRing,
) -> PolyMatrix {
    let out = crate::projmod::augment_matrix(of);
    let f = b.matrix(node, of_ring, of);
    let o = b.matrix(node, out_ring, &out);
    b.claim(node, Claim::Augment { out: o, of: f });
    out
}

pub(crate) fn square(b: &mut CertBuilder, node: usize, sq: &FiberSquare) -> usize {
    let s = b.square(sq);
    b.claim(node, Claim::Square { square: s });
    s
}

/// The restrictions of `P` to both corners of the square.
pub(crate) fn restrict_module(b: &mut CertBuilder, node: usize, sq: &FiberSquare, p: &ProjModule) -> Result<()> {
    module(b, node, p);
    restrict(b, node, &sq.i1, p.matrix())?;
    restrict(b, node, &sq.i2, p.matrix())?;
    Ok(())
}

/// Claims for [`crate::projmod::glue_iso`]: the mismatch over `A0`, its
/// lift, the corrected `A2` isomorphism and the glued result.
pub(crate) fn glue(
    b: &mut CertBuilder,
    node: usize,
    sq: &FiberSquare,
    phi1: &ModIso,
    phi2: &ModIso,
    g: &GluedIso,
) -> Result<()> {
    let s = square(b, node, sq);
    let x = restrict(b, node, &sq.j2, phi2.forward())?;
    let y = restrict(b, node, &sq.j1, phi1.backward())?;
    product(b, node, &sq.a0, &x, &y)?;
    let x = restrict(b, node, &sq.j1, phi1.forward())?;
    let y = restrict(b, node, &sq.j2, phi2.backward())?;
    product(b, node, &sq.a0, &x, &y)?;
    iso(b, node, &g.mismatch);
    iso(b, node, &g.lifted);
    restrict(b, node, &sq.j2, g.lifted.forward())?;
    restrict(b, node, &sq.j2, g.lifted.backward())?;
    product(b, node, &sq.a2, g.lifted.backward(), phi2.forward())?;
    product(b, node, &sq.a2, phi2.backward(), g.lifted.forward())?;
    for (whole, one, two) in [
        (g.iso.forward(), phi1.forward(), g.corrected.forward()),
        (g.iso.backward(), phi1.backward(), g.corrected.backward()),
    ] {
        let m = b.matrix(node, &sq.a, whole);
        let m1 = b.matrix(node, &sq.a1, one);
        let m2 = b.matrix(node, &sq.a2, two);
        b.claim(node, Claim::Glue { square: s, m, m1, m2 });
    }
    iso(b, node, &g.iso);
    Ok(())
}

/// Certificate for a single GL lift along `pi`.
pub fn gl_lift_certificate(sigma: &PolyMatrix, sigma_inv: &PolyMatrix, pi: &RingHom, lift: &GlLift) -> Certificate {
    let mut b = CertBuilder::new(&format!("gl lift via {}", lift.strategy));
    let node = b.node(NodeKind::Lift, None, format!("strategy {}", lift.strategy));
    let q = pi.target();
    b.statement(node, q, &q.mat_nf(sigma));
    b.statement(node, q, &q.mat_nf(sigma_inv));
    lift_claims(&mut b, node, sigma, sigma_inv, pi, lift);
    let d = b.matrix(node, pi.source(), &lift.delta);
    let di = b.matrix(node, pi.source(), &lift.delta_inv);
    b.output("delta", d);
    b.output("delta_inv", di);
    b.finish()
}

pub(crate) fn lift_claims(
    b: &mut CertBuilder,
    node: usize,
    sigma: &PolyMatrix,
    sigma_inv: &PolyMatrix,
    pi: &RingHom,
    lift: &GlLift,
) {
    let hom = b.hom(pi);
    b.claim(node, Claim::Hom { hom });
    let q = pi.target();
    let rq = b.ring(q);
    let s = b.matrix(node, q, &q.mat_nf(sigma));
    let si = b.matrix(node, q, &q.mat_nf(sigma_inv));
    b.claim(node, Claim::Inverse { ring: rq, a: s, b: si });
    let d = b.matrix(node, pi.source(), &lift.delta);
    let di = b.matrix(node, pi.source(), &lift.delta_inv);
    b.claim(node, Claim::Lift { hom, delta: d, delta_inv: di, sigma: s });
}

/// Certificate for [`crate::projmod::milnor_patch`]: the square, the
/// Whitehead lift of `σ ⊕ σ⁻¹`, both patch halves and the glued idempotent.
pub fn patch_certificate(sq: &FiberSquare, patch: &Patch, sigma: &PolyMatrix, sigma_inv: &PolyMatrix) -> Result<Certificate> {
    let r = patch.module.rank()?;
    let mut b = CertBuilder::new(&format!("patch rank {r}"));
    let node = b.node(NodeKind::Glue, None, format!("apex x{}", sq.apex));
    let s = square(&mut b, node, sq);
    let hom = b.hom(&sq.j2);
    let (u, ui) = (b.matrix(node, &sq.a2, &patch.u), b.matrix(node, &sq.a2, &patch.u_inv));
    let (si, sii) = (b.statement(node, &sq.a0, sigma), b.statement(node, &sq.a0, sigma_inv));
    b.claim(node, Claim::Whitehead { hom, u, u_inv: ui, sigma: si, sigma_inv: sii });
    let std2 = PolyMatrix::partial_identity(sq.a2.ctx(), 2 * r, r);
    let half = product(&mut b, node, &sq.a2, &patch.u, &std2)?;
    product(&mut b, node, &sq.a2, &half, &patch.u_inv)?;
    let e = patch.module.matrix();
    let (m, m1, m2) = (b.matrix(node, &sq.a, e), b.matrix(node, &sq.a1, &patch.e1), b.matrix(node, &sq.a2, &patch.e2));
    b.claim(node, Claim::Glue { square: s, m, m1, m2 });
    let ring = b.ring(&sq.a);
    b.claim(node, Claim::Idempotent { ring, e: m });
    b.claim(node, Claim::Rank { ring, e: m, rank: r });
    b.output("E", m);
    b.profile(HypothesisProfile::new(sq.a.field(), r));
    Ok(b.finish())
}

/// A certificate whose single claim is the square itself.
pub fn square_certificate(sq: &FiberSquare) -> Certificate {
    let mut b = CertBuilder::new("square build");
    let node = b.node(NodeKind::Decompose, None, format!("apex x{}", sq.apex));
    square(&mut b, node, sq);
    b.finish()
}
