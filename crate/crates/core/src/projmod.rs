//! Finitely generated projective modules as idempotent matrices, their
//! isomorphisms, and gluing across a fiber square.

use crate::error::{Error, Result};
use crate::groebner;
use crate::polycore::{PolyMatrix, Polynomial, Scalar};
use crate::quotient::{det_unit_inverse, whitehead_lift, FiberSquare, QuotientRing, RingHom};

/// Entrywise constant term.
pub fn augment_matrix(m: &PolyMatrix) -> PolyMatrix {
    m.map(Polynomial::augment)
}

/// The image of an idempotent `E` over `ring`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjModule {
    ring: QuotientRing,
    e: PolyMatrix,
}

impl ProjModule {
    pub fn new(ring: &QuotientRing, e: PolyMatrix) -> Result<ProjModule> {
        ring.check_matrix(&e)?;
        if !e.is_square() {
            return Err(Error::shape("idempotent", e.shape(), e.shape()));
        }
        let e = ring.mat_nf(&e);
        if ring.mat_mul(&e, &e)? != e {
            return Err(Error::Precondition(format!("matrix {e} is not idempotent")));
        }
        Ok(ProjModule { ring: ring.clone(), e })
    }

    /// The free module of rank `n`.
    pub fn free(ring: &QuotientRing, n: usize) -> ProjModule {
        ProjModule {
            ring: ring.clone(),
            e: PolyMatrix::identity(ring.ctx(), n),
        }
    }

    /// `I_s ⊕ 0` inside `n` coordinates.
    pub fn standard(ring: &QuotientRing, n: usize, s: usize) -> ProjModule {
        ProjModule {
            ring: ring.clone(),
            e: PolyMatrix::partial_identity(ring.ctx(), n, s),
        }
    }

    pub fn ring(&self) -> &QuotientRing {
        &self.ring
    }

    pub fn matrix(&self) -> &PolyMatrix {
        &self.e
    }

    /// Number of ambient coordinates.
    pub fn size(&self) -> usize {
        self.e.rows()
    }

    pub fn is_constant(&self) -> bool {
        self.e.is_constant()
    }

    /// `P/(x₀..x_n)P` viewed again over the same ring.
    pub fn augmented(&self) -> ProjModule {
        ProjModule {
            ring: self.ring.clone(),
            e: augment_matrix(&self.e),
        }
    }

    pub fn base_change(&self, h: &RingHom) -> Result<ProjModule> {
        if *h.source() != self.ring {
            return Err(Error::Context("base change along a hom from another ring".into()));
        }
        if !h.is_verified() {
            return Err(Error::Precondition("base change along an unverified hom".into()));
        }
        let e = h.apply_matrix(&self.e)?;
        ProjModule::new(h.target(), e).map_err(|e| Error::Internal(format!("base change lost idempotency: {e}")))
    }

    pub fn direct_sum(&self, other: &ProjModule) -> Result<ProjModule> {
        if self.ring != other.ring {
            return Err(Error::Context("direct sum of modules over different rings".into()));
        }
        Ok(ProjModule {
            ring: self.ring.clone(),
            e: self.e.direct_sum(&other.e),
        })
    }

    /// Rank of `E(0)` over the base field, cross-checked against its trace.
    pub fn rank(&self) -> Result<usize> {
        if self.ring.gens().iter().any(|g| g.is_one()) {
            return Err(Error::RankUndefined("the zero ring".into()));
        }
        let e0 = augment_matrix(&self.e);
        let rank = e0
            .constant_rank()
            .ok_or_else(|| Error::Internal("augmented matrix is not constant".into()))?;
        let trace = e0.trace().constant_term();
        if trace != Scalar::from_i64(self.ring.field(), rank as i64) {
            return Err(Error::RankUndefined(format!("trace {trace} disagrees with rank {rank}")));
        }
        Ok(rank)
    }
}

/// `Φ: im E_source → im E_target` with backward witness `Ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModIso {
    source: ProjModule,
    target: ProjModule,
    forward: PolyMatrix,
    backward: PolyMatrix,
}

/// Checks `Φ = E_t Φ E_s`, `Ψ = E_s Ψ E_t`, `ΨΦ = E_s`, `ΦΨ = E_t`.
pub fn iso_laws(
    ring: &QuotientRing,
    es: &PolyMatrix,
    et: &PolyMatrix,
    phi: &PolyMatrix,
    psi: &PolyMatrix,
) -> std::result::Result<(), String> {
    if phi.shape() != (et.rows(), es.rows()) || psi.shape() != (es.rows(), et.rows()) {
        return Err(format!(
            "witness shapes {:?}/{:?} do not fit {}x{} and {}x{} idempotents",
            phi.shape(),
            psi.shape(),
            es.rows(),
            es.rows(),
            et.rows(),
            et.rows()
        ));
    }
    let mul = |a: &PolyMatrix, b: &PolyMatrix| ring.mat_mul(a, b).map_err(|e| e.to_string());
    let phi = ring.mat_nf(phi);
    let psi = ring.mat_nf(psi);
    if mul(&mul(et, &phi)?, es)? != phi {
        return Err("forward map does not respect the idempotents".into());
    }
    if mul(&mul(es, &psi)?, et)? != psi {
        return Err("backward map does not respect the idempotents".into());
    }
    if mul(&psi, &phi)? != ring.mat_nf(es) {
        return Err("backward ∘ forward is not the source idempotent".into());
    }
    if mul(&phi, &psi)? != ring.mat_nf(et) {
        return Err("forward ∘ backward is not the target idempotent".into());
    }
    Ok(())
}

impl ModIso {
    pub fn new(source: &ProjModule, target: &ProjModule, forward: PolyMatrix, backward: PolyMatrix) -> Result<ModIso> {
        if source.ring != target.ring {
            return Err(Error::Context("isomorphism between modules over different rings".into()));
        }
        let ring = &source.ring;
        ring.check_matrix(&forward)?;
        ring.check_matrix(&backward)?;
        iso_laws(ring, &source.e, &target.e, &forward, &backward).map_err(Error::Precondition)?;
        Ok(ModIso {
            source: source.clone(),
            target: target.clone(),
            forward: ring.mat_nf(&forward),
            backward: ring.mat_nf(&backward),
        })
    }

    pub fn identity(p: &ProjModule) -> ModIso {
        ModIso {
            source: p.clone(),
            target: p.clone(),
            forward: p.e.clone(),
            backward: p.e.clone(),
        }
    }

    pub fn source(&self) -> &ProjModule {
        &self.source
    }

    pub fn target(&self) -> &ProjModule {
        &self.target
    }

    pub fn forward(&self) -> &PolyMatrix {
        &self.forward
    }

    pub fn backward(&self) -> &PolyMatrix {
        &self.backward
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.forward == self.source.e && self.backward == self.source.e
    }

    pub fn inverse(&self) -> ModIso {
        ModIso {
            source: self.target.clone(),
            target: self.source.clone(),
            forward: self.backward.clone(),
            backward: self.forward.clone(),
        }
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &ModIso) -> Result<ModIso> {
        if self.target != next.source {
            return Err(Error::Context("composed isomorphisms do not match up".into()));
        }
        let ring = &self.source.ring;
        let forward = ring.mat_mul(&next.forward, &self.forward)?;
        let backward = ring.mat_mul(&self.backward, &next.backward)?;
        ModIso::new(&self.source, &next.target, forward, backward)
    }

    pub fn base_change(&self, h: &RingHom) -> Result<ModIso> {
        let source = self.source.base_change(h)?;
        let target = self.target.base_change(h)?;
        ModIso::new(&source, &target, h.apply_matrix(&self.forward)?, h.apply_matrix(&self.backward)?)
            .map_err(|e| Error::Internal(format!("base change broke an isomorphism: {e}")))
    }
}

/// A row `v` with `v · wᵀ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct UmRow {
    ring: QuotientRing,
    v: PolyMatrix,
    w: PolyMatrix,
}

impl UmRow {
    pub fn new(ring: &QuotientRing, v: PolyMatrix, w: PolyMatrix) -> Result<UmRow> {
        ring.check_matrix(&v)?;
        ring.check_matrix(&w)?;
        if v.rows() != 1 || v.shape() != w.shape() {
            return Err(Error::shape("unimodular row", v.shape(), w.shape()));
        }
        let v = ring.mat_nf(&v);
        let w = ring.mat_nf(&w);
        if !ring.mat_mul(&v, &w.transpose())?.get(0, 0).is_one() {
            return Err(Error::Precondition(format!("{w} does not certify {v} as unimodular")));
        }
        Ok(UmRow { ring: ring.clone(), v, w })
    }

    /// Finds a certificate for `v`, or reports that `v` is not unimodular.
    pub fn certify(ring: &QuotientRing, v: PolyMatrix) -> Result<UmRow> {
        ring.check_matrix(&v)?;
        let v = ring.mat_nf(&v);
        let w = groebner::unimodular_cert(&v, ring)?
            .ok_or_else(|| Error::Precondition(format!("row {v} is not unimodular")))?;
        UmRow::new(ring, v, w)
    }

    pub fn ring(&self) -> &QuotientRing {
        &self.ring
    }

    pub fn row(&self) -> &PolyMatrix {
        &self.v
    }

    pub fn cert(&self) -> &PolyMatrix {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.v.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.v.cols() == 0
    }

    /// `(v(0), w(0))`; still unimodular since augmentation is a ring map.
    pub fn augmented(&self) -> UmRow {
        UmRow {
            ring: self.ring.clone(),
            v: augment_matrix(&self.v),
            w: augment_matrix(&self.w),
        }
    }
}

/// `E = I − wᵀ·v`, the kernel of `v` as a direct summand.
pub fn kernel_module(u: &UmRow) -> ProjModule {
    let ring = &u.ring;
    let n = u.len();
    let e = ring
        .mat_mul(&u.w.transpose(), &u.v)
        .expect("row and certificate share the ring");
    ProjModule {
        ring: ring.clone(),
        e: PolyMatrix::identity(ring.ctx(), n).sub(&e),
    }
}

/// The element of `A` restricting to `m1` over `A1` and `m2` over `A2`.
pub fn glue_entry(sq: &FiberSquare, m1: &Polynomial, m2: &Polynomial) -> Result<Polynomial> {
    let m1 = sq.a1.nf(m1)?;
    let m2 = sq.a2.nf(m2)?;
    let common = sq.j1.apply(&m1)?;
    if common != sq.j2.apply(&m2)? {
        return Err(Error::Precondition(format!("{m1} and {m2} disagree over A0")));
    }
    let m = sq.a.normal_form(&m1.add(&m2).sub(&common));
    if sq.i1.apply(&m)? != m1 || sq.i2.apply(&m)? != m2 {
        return Err(Error::Internal(format!("glued element {m} does not restrict correctly")));
    }
    Ok(m)
}

pub fn glue_matrix(sq: &FiberSquare, m1: &PolyMatrix, m2: &PolyMatrix) -> Result<PolyMatrix> {
    if m1.shape() != m2.shape() {
        return Err(Error::shape("glue", m1.shape(), m2.shape()));
    }
    let entries = m1
        .entries()
        .iter()
        .zip(m2.entries())
        .map(|(a, b)| glue_entry(sq, a, b))
        .collect::<Result<Vec<_>>>()?;
    PolyMatrix::from_entries(sq.a.ctx(), m1.rows(), m1.cols(), entries)
}

/// Output of [`milnor_patch`] with the data needed to re-check it.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub module: ProjModule,
    pub e1: PolyMatrix,
    pub e2: PolyMatrix,
    pub u: PolyMatrix,
    pub u_inv: PolyMatrix,
}

/// Glues `I_r ⊕ 0` over `A1` with `U (I_r ⊕ 0) U⁻¹` over `A2`, where `U`
/// lifts `σ ⊕ σ⁻¹` along `j2`.
pub fn milnor_patch(sq: &FiberSquare, r: usize, sigma: &PolyMatrix, sigma_inv: &PolyMatrix) -> Result<Patch> {
    if sigma.shape() != (r, r) {
        return Err(Error::shape("milnor_patch", sigma.shape(), (r, r)));
    }
    let (u, u_inv) = whitehead_lift(sigma, sigma_inv, &sq.j2, &sq.section)?;
    let std1 = PolyMatrix::partial_identity(sq.a1.ctx(), 2 * r, r);
    let std2 = PolyMatrix::partial_identity(sq.a2.ctx(), 2 * r, r);
    let e2 = sq.a2.mat_chain(&[&u, &std2, &u_inv])?;
    let e1 = sq.a1.mat_nf(&std1);
    if sq.j1.apply_matrix(&e1)? != sq.j2.apply_matrix(&e2)? {
        return Err(Error::Internal("patch data disagree over A0".into()));
    }
    let module = ProjModule::new(&sq.a, glue_matrix(sq, &e1, &e2)?)
        .map_err(|e| Error::Internal(format!("glued patch is not idempotent: {e}")))?;
    if module.rank()? != r {
        return Err(Error::Internal("glued patch has the wrong rank".into()));
    }
    Ok(Patch { module, e1, e2, u, u_inv })
}

/// Lifts automorphisms of `P0` to automorphisms of a module `P2` over `A2`
/// with `j2(P2) = P0`.
pub trait AutLifter {
    fn lift(&self, sq: &FiberSquare, alpha0: &ModIso, over: &ProjModule) -> Result<ModIso>;
}

/// Pushes the automorphism back through the section; the identity lifts to
/// the identity.
#[derive(Debug, Clone, Copy, Default)]
pub struct SectionLifter;

impl AutLifter for SectionLifter {
    fn lift(&self, sq: &FiberSquare, alpha0: &ModIso, over: &ProjModule) -> Result<ModIso> {
        if alpha0.is_identity() {
            return Ok(ModIso::identity(over));
        }
        let forward = sq.section.apply_matrix(alpha0.forward())?;
        let backward = sq.section.apply_matrix(alpha0.backward())?;
        ModIso::new(over, over, forward, backward).map_err(|e| {
            Error::LifterContract(format!("section image of the automorphism is not an automorphism of P2: {e}"))
        })
    }
}

/// Refuses every non-identity automorphism.
#[derive(Debug, Clone, Copy, Default)]
pub struct StubLifter;

impl AutLifter for StubLifter {
    fn lift(&self, _sq: &FiberSquare, alpha0: &ModIso, over: &ProjModule) -> Result<ModIso> {
        if alpha0.is_identity() {
            return Ok(ModIso::identity(over));
        }
        Err(Error::LifterContract("no automorphism lifter available".into()))
    }
}

fn lift_checked(lifter: &dyn AutLifter, sq: &FiberSquare, alpha0: &ModIso, over: &ProjModule) -> Result<ModIso> {
    let a2 = lifter.lift(sq, alpha0, over)?;
    if a2.source() != over || a2.target() != over {
        return Err(Error::LifterContract("lifted automorphism acts on the wrong module".into()));
    }
    if sq.j2.apply_matrix(a2.forward())? != *alpha0.forward() || sq.j2.apply_matrix(a2.backward())? != *alpha0.backward()
    {
        return Err(Error::LifterContract("lifted automorphism does not reduce to the given one".into()));
    }
    Ok(a2)
}

/// Glues `α1 ∈ Aut(P1)` with a lift of `j1(α1)` to an automorphism of `P`.
pub fn pair_aut(sq: &FiberSquare, p: &ProjModule, alpha1: &ModIso, lifter: &dyn AutLifter) -> Result<ModIso> {
    let p1 = p.base_change(&sq.i1)?;
    let p2 = p.base_change(&sq.i2)?;
    if *alpha1.source() != p1 || *alpha1.target() != p1 {
        return Err(Error::Precondition("automorphism is not over the restriction of P to A1".into()));
    }
    let alpha0 = alpha1.base_change(&sq.j1)?;
    let alpha2 = lift_checked(lifter, sq, &alpha0, &p2)?;
    let forward = glue_matrix(sq, alpha1.forward(), alpha2.forward())?;
    let backward = glue_matrix(sq, alpha1.backward(), alpha2.backward())?;
    ModIso::new(p, p, forward, backward)
}

/// Output of [`glue_iso`] with the mismatch correction used.
#[derive(Debug, Clone, PartialEq)]
pub struct GluedIso {
    pub iso: ModIso,
    /// `j2(φ2) ∘ j1(φ1)⁻¹` as an automorphism of `Q0`.
    pub mismatch: ModIso,
    /// Its lift to `Q2`.
    pub lifted: ModIso,
    /// `lifted⁻¹ ∘ φ2`.
    pub corrected: ModIso,
}

/// Glues `φ1: P1 ≅ Q1` and `φ2: P2 ≅ Q2` to `P ≅ Q`, correcting `φ2` by a
/// lifted automorphism of `Q2` so that both agree over `A0`.
pub fn glue_iso(
    sq: &FiberSquare,
    p: &ProjModule,
    q: &ProjModule,
    phi1: &ModIso,
    phi2: &ModIso,
    lifter: &dyn AutLifter,
) -> Result<GluedIso> {
    let (p1, p2) = (p.base_change(&sq.i1)?, p.base_change(&sq.i2)?);
    let (q1, q2) = (q.base_change(&sq.i1)?, q.base_change(&sq.i2)?);
    if *phi1.source() != p1 || *phi1.target() != q1 || *phi2.source() != p2 || *phi2.target() != q2 {
        return Err(Error::Precondition("isomorphisms are not between the restrictions of P and Q".into()));
    }
    let q0 = q1.base_change(&sq.j1)?;
    let a0 = &sq.a0;
    let fwd = a0.mat_mul(&sq.j2.apply_matrix(phi2.forward())?, &sq.j1.apply_matrix(phi1.backward())?)?;
    let bwd = a0.mat_mul(&sq.j1.apply_matrix(phi1.forward())?, &sq.j2.apply_matrix(phi2.backward())?)?;
    let mismatch = ModIso::new(&q0, &q0, fwd, bwd).map_err(|e| Error::Internal(format!("mismatch: {e}")))?;
    let lifted = lift_checked(lifter, sq, &mismatch, &q2)?;
    let corrected = phi2.then(&lifted.inverse())?;
    let forward = glue_matrix(sq, phi1.forward(), corrected.forward())?;
    let backward = glue_matrix(sq, phi1.backward(), corrected.backward())?;
    let iso = ModIso::new(p, q, forward, backward)?;
    Ok(GluedIso {
        iso,
        mismatch,
        lifted,
        corrected,
    })
}

/// A unimodular element of `P`: `p ∈ im E` with a form `q` (`qE = q`,
/// `q·p = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct UmElement {
    module: ProjModule,
    p: PolyMatrix,
    q: PolyMatrix,
}

impl UmElement {
    pub fn new(module: &ProjModule, p: PolyMatrix, q: PolyMatrix) -> Result<UmElement> {
        let ring = module.ring();
        let n = module.size();
        if p.shape() != (n, 1) || q.shape() != (1, n) {
            return Err(Error::shape("unimodular element", p.shape(), q.shape()));
        }
        let p = ring.mat_nf(&p);
        let q = ring.mat_nf(&q);
        if ring.mat_mul(module.matrix(), &p)? != p {
            return Err(Error::Precondition("element does not lie in the module".into()));
        }
        if ring.mat_mul(&q, module.matrix())? != q {
            return Err(Error::Precondition("form does not factor through the module".into()));
        }
        if !ring.mat_mul(&q, &p)?.get(0, 0).is_one() {
            return Err(Error::Precondition("form does not take the value 1 on the element".into()));
        }
        Ok(UmElement {
            module: module.clone(),
            p,
            q,
        })
    }

    pub fn module(&self) -> &ProjModule {
        &self.module
    }

    pub fn element(&self) -> &PolyMatrix {
        &self.p
    }

    pub fn form(&self) -> &PolyMatrix {
        &self.q
    }

    pub fn base_change(&self, h: &RingHom) -> Result<UmElement> {
        UmElement::new(&self.module.base_change(h)?, h.apply_matrix(&self.p)?, h.apply_matrix(&self.q)?)
    }
}

/// Lifts unimodular elements of `P0` to unimodular elements of `P2`.
pub trait UmLifter {
    fn lift(&self, sq: &FiberSquare, u0: &UmElement, over: &ProjModule) -> Result<UmElement>;
}

/// `p2 = E2·s(p0)`, `q2 = c⁻¹·s(q0)·E2` with `c = s(q0)·E2·s(p0)` when `c`
/// is a unit of `A2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SectionUmLifter;

impl UmLifter for SectionUmLifter {
    fn lift(&self, sq: &FiberSquare, u0: &UmElement, over: &ProjModule) -> Result<UmElement> {
        let a2 = &sq.a2;
        let e2 = over.matrix();
        let p2 = a2.mat_mul(e2, &sq.section.apply_matrix(u0.element())?)?;
        let q2 = a2.mat_mul(&sq.section.apply_matrix(u0.form())?, e2)?;
        let c = a2.mat_mul(&q2, &p2)?;
        let c_inv = det_unit_inverse(&c, a2)
            .map_err(|_| Error::LifterContract(format!("pairing {} of the section lift is not a unit", c.get(0, 0))))?;
        UmElement::new(over, p2, q2.scale_by(c_inv.get(0, 0), a2))
    }
}

trait ScaleBy {
    fn scale_by(&self, f: &Polynomial, ring: &QuotientRing) -> PolyMatrix;
}

impl ScaleBy for PolyMatrix {
    fn scale_by(&self, f: &Polynomial, ring: &QuotientRing) -> PolyMatrix {
        self.map(|p| ring.mul(f, p))
    }
}

/// Glues `u1 ∈ Um(P1)` with a lift of `j1(u1)` to a unimodular element of `P`.
pub fn pair_um(sq: &FiberSquare, p: &ProjModule, u1: &UmElement, lifter: &dyn UmLifter) -> Result<UmElement> {
    let p1 = p.base_change(&sq.i1)?;
    let p2 = p.base_change(&sq.i2)?;
    if *u1.module() != p1 {
        return Err(Error::Precondition("element is not in the restriction of P to A1".into()));
    }
    let u0 = u1.base_change(&sq.j1)?;
    let u2 = lifter.lift(sq, &u0, &p2)?;
    if *u2.module() != p2 || sq.j2.apply_matrix(u2.element())? != *u0.element() {
        return Err(Error::LifterContract("lifted element does not reduce to the given one".into()));
    }
    // make the form agree over A0: q2' = s(q0)E2 + (1 - s(q0)E2 p2) q2
    let a2 = &sq.a2;
    let base = a2.mat_mul(&sq.section.apply_matrix(u0.form())?, p2.matrix())?;
    let defect = Polynomial::one(a2.ctx()).sub(a2.mat_mul(&base, u2.element())?.get(0, 0));
    let q2 = base.add(&u2.form().scale_by(&defect, a2));
    let element = glue_matrix(sq, u1.element(), u2.element())?;
    let form = glue_matrix(sq, u1.form(), &a2.mat_nf(&q2))?;
    UmElement::new(p, element, form)
}
