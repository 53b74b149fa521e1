//! Units and invertible matrices over monomial quotients, and lifting them
//! along quotient maps.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::{QuotientRing, RingHom};
use crate::error::{Error, Result};
use crate::groebner;
use crate::polycore::{Ctx, PolyMatrix, Polynomial};

/// Inverse of `m` over `ring`, certified through the determinant.
pub fn det_unit_inverse(m: &PolyMatrix, ring: &QuotientRing) -> Result<PolyMatrix> {
    ring.check_matrix(m)?;
    if !m.is_square() {
        return Err(Error::shape("det_unit_inverse", m.shape(), m.shape()));
    }
    let m = ring.mat_nf(m);
    let reduce = |p: Polynomial| ring.normal_form(&p);
    let d = m.det_reduced(&reduce)?;
    let non_unit = || Error::NonUnit { det: d.to_string() };
    // evaluation at the origin is a ring map, so a unit has a nonzero constant term
    if d.constant_term().is_zero() {
        return Err(non_unit());
    }
    let q = match d.constant_value() {
        Some(c) => Polynomial::constant(ring.ctx(), c.inv().unwrap()),
        None => {
            let mut gens = vec![d.clone()];
            gens.extend(ring.generator_polys());
            let cert = groebner::member(&Polynomial::one(ring.ctx()), &gens)?.ok_or_else(non_unit)?;
            ring.normal_form(&cert.coefficients[0])
        }
    };
    let inv = m.adjugate_reduced(&reduce)?.map(|p| ring.mul(&q, p));
    if !ring.are_inverse(&m, &inv)? {
        return Err(Error::Internal(format!("inverse of {m} failed re-verification")));
    }
    Ok(inv)
}

fn block2(a: &PolyMatrix, b: &PolyMatrix, c: &PolyMatrix, d: &PolyMatrix) -> PolyMatrix {
    PolyMatrix::from_blocks(a, b, c, d)
}

/// Lifts `σ ⊕ σ⁻¹` along `j2` using the factorization
/// `[[1,σ],[0,1]]·[[1,0],[−σ⁻¹,1]]·[[1,σ],[0,1]]·[[0,−1],[1,0]]`, each
/// factor lifted through `section`. Returns `(U, U⁻¹)` over the source of `j2`.
pub fn whitehead_lift(
    sigma: &PolyMatrix,
    sigma_inv: &PolyMatrix,
    j2: &RingHom,
    section: &RingHom,
) -> Result<(PolyMatrix, PolyMatrix)> {
    let (a2, a0) = (j2.source(), j2.target());
    if section.source() != a0 || section.target() != a2 {
        return Err(Error::Context("section does not run opposite to the quotient map".into()));
    }
    if !a0.are_inverse(sigma, sigma_inv)? {
        return Err(Error::Precondition("supplied inverse does not invert the matrix".into()));
    }
    let r = sigma.rows();
    let ctx = a2.ctx();
    let s = section.apply_matrix(sigma)?;
    let s_inv = section.apply_matrix(sigma_inv)?;
    let id = PolyMatrix::identity(ctx, r);
    let zero = PolyMatrix::zero(ctx, r, r);
    let a = block2(&id, &s, &zero, &id);
    let a_inv = block2(&id, &s.neg(), &zero, &id);
    let b = block2(&id, &zero, &s_inv.neg(), &id);
    let b_inv = block2(&id, &zero, &s_inv, &id);
    let rot = block2(&zero, &id.neg(), &id, &zero);
    let rot_inv = block2(&zero, &id, &id.neg(), &zero);
    let u = a2.mat_chain(&[&a, &b, &a, &rot])?;
    let u_inv = a2.mat_chain(&[&rot_inv, &a_inv, &b_inv, &a_inv])?;
    if !a2.are_inverse(&u, &u_inv)? {
        return Err(Error::Internal("Whitehead lift is not invertible".into()));
    }
    if j2.apply_matrix(&u)? != a0.mat_nf(&sigma.direct_sum(sigma_inv)) {
        return Err(Error::Internal("Whitehead lift does not reduce to σ ⊕ σ⁻¹".into()));
    }
    Ok((u, u_inv))
}

/// Ways of lifting an invertible matrix along a quotient map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GlStrategy {
    /// Same entries, accepted when the determinant stays a unit.
    Entrywise,
    /// Gauss–Jordan over the quotient with unit pivots; every factor lifts.
    Elementary,
    /// Apply a section of the quotient map.
    Section,
    /// Add the missing faces one at a time, lifting from the boundary of
    /// each face to the full face.
    FaceDescent,
}

impl GlStrategy {
    pub const ALL: [GlStrategy; 4] = [
        GlStrategy::Entrywise,
        GlStrategy::Elementary,
        GlStrategy::Section,
        GlStrategy::FaceDescent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GlStrategy::Entrywise => "entrywise",
            GlStrategy::Elementary => "elementary",
            GlStrategy::Section => "section",
            GlStrategy::FaceDescent => "face-descent",
        }
    }

    /// Parses a comma-separated strategy list.
    pub fn parse_list(text: &str) -> Result<Vec<GlStrategy>> {
        text.split(',').map(|s| s.trim().parse()).collect()
    }
}

impl fmt::Display for GlStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GlStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<GlStrategy> {
        GlStrategy::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown lifting strategy {s:?}")))
    }
}

/// A verified lift: `π(delta) = σ` and `delta · delta_inv = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct GlLift {
    pub delta: PolyMatrix,
    pub delta_inv: PolyMatrix,
    pub strategy: GlStrategy,
    /// Failures of the strategies tried before the successful one.
    pub diagnostics: Vec<String>,
}

type Attempt = std::result::Result<(PolyMatrix, PolyMatrix), String>;

/// Lifts `σ ∈ GL_r(R/J)` to `GL_r(R)` along the natural surjection `pi`,
/// trying `strategies` in order.
pub fn lift_gl(
    sigma: &PolyMatrix,
    sigma_inv: &PolyMatrix,
    pi: &RingHom,
    strategies: &[GlStrategy],
    section: Option<&RingHom>,
) -> Result<GlLift> {
    let (r, q) = (pi.source(), pi.target());
    if !pi.is_verified() || !pi.is_variable_identity() {
        return Err(Error::Precondition("lifting needs a verified natural surjection".into()));
    }
    if !q.are_inverse(sigma, sigma_inv)? {
        return Err(Error::Precondition("supplied inverse does not invert the matrix".into()));
    }
    let sigma = q.mat_nf(sigma);
    let sigma_inv = q.mat_nf(sigma_inv);
    let mut diagnostics = Vec::new();
    for &strategy in strategies {
        let attempt = match strategy {
            GlStrategy::Entrywise => entrywise(&sigma, r),
            GlStrategy::Elementary => elementary(&sigma, q, r),
            GlStrategy::Section => match section {
                Some(s) => via_section(&sigma, &sigma_inv, s),
                None => Err("no section registered".into()),
            },
            GlStrategy::FaceDescent => face_descent(&sigma, &sigma_inv, r, q),
        };
        match attempt {
            Ok((delta, delta_inv)) => {
                let delta = r.mat_nf(&delta);
                let delta_inv = r.mat_nf(&delta_inv);
                if pi.apply_matrix(&delta)? == sigma && r.are_inverse(&delta, &delta_inv)? {
                    return Ok(GlLift {
                        delta,
                        delta_inv,
                        strategy,
                        diagnostics,
                    });
                }
                diagnostics.push(format!("{strategy}: produced a matrix that failed verification"));
            }
            Err(why) => diagnostics.push(format!("{strategy}: {why}")),
        }
    }
    Err(Error::AllStrategiesFailed { diagnostics })
}

fn entrywise(sigma: &PolyMatrix, r: &QuotientRing) -> Attempt {
    let delta = r.mat_nf(sigma);
    match det_unit_inverse(&delta, r) {
        Ok(inv) => Ok((delta, inv)),
        Err(Error::NonUnit { det }) => Err(format!("determinant {det} is not a unit in the source ring")),
        Err(e) => Err(e.to_string()),
    }
}

fn via_section(sigma: &PolyMatrix, sigma_inv: &PolyMatrix, section: &RingHom) -> Attempt {
    let d = section.apply_matrix(sigma).map_err(|e| e.to_string())?;
    let d_inv = section.apply_matrix(sigma_inv).map_err(|e| e.to_string())?;
    Ok((d, d_inv))
}

fn swap_matrix(ctx: &Ctx, n: usize, a: usize, b: usize) -> PolyMatrix {
    let mut m = PolyMatrix::identity(ctx, n);
    if a != b {
        m.set(a, a, Polynomial::zero(ctx));
        m.set(b, b, Polynomial::zero(ctx));
        m.set(a, b, Polynomial::one(ctx));
        m.set(b, a, Polynomial::one(ctx));
    }
    m
}

fn elementary_matrix(ctx: &Ctx, n: usize, row: usize, col: usize, f: &Polynomial) -> PolyMatrix {
    let mut m = PolyMatrix::identity(ctx, n);
    m.set(row, col, f.clone());
    m
}

fn elementary(sigma: &PolyMatrix, q: &QuotientRing, r: &QuotientRing) -> Attempt {
    let err = |e: Error| e.to_string();
    let n = sigma.rows();
    let ctx = q.ctx();
    let mut work = sigma.clone();
    // row operations applied on the left and column swaps on the right,
    // each with its lift and the inverse of the lift over R
    let mut left: Vec<(PolyMatrix, PolyMatrix)> = Vec::new();
    let mut right: Vec<(PolyMatrix, PolyMatrix)> = Vec::new();
    for c in 0..n {
        let mut pivot = None;
        'search: for constant_only in [true, false] {
            for i in c..n {
                for j in c..n {
                    let e = work.get(i, j);
                    if e.constant_term().is_zero() || (constant_only && !e.is_constant()) {
                        continue;
                    }
                    if let Ok(inv) = det_unit_inverse(&PolyMatrix::from_entries(ctx, 1, 1, vec![e.clone()]).unwrap(), q) {
                        let lifted = PolyMatrix::from_entries(ctx, 1, 1, vec![r.normal_form(e)]).unwrap();
                        if let Ok(lifted_inv) = det_unit_inverse(&lifted, r) {
                            pivot = Some((i, j, inv.get(0, 0).clone(), lifted.get(0, 0).clone(), lifted_inv.get(0, 0).clone()));
                            break 'search;
                        }
                    }
                }
            }
        }
        let Some((i, j, u_inv, lu, lu_inv)) = pivot else {
            return Err(format!("no pivot in step {c} is a unit with a unit lift"));
        };
        if i != c {
            let p = swap_matrix(ctx, n, i, c);
            work = q.mat_mul(&p, &work).map_err(err)?;
            left.push((p.clone(), p));
        }
        if j != c {
            let p = swap_matrix(ctx, n, j, c);
            work = q.mat_mul(&work, &p).map_err(err)?;
            right.push((p.clone(), p));
        }
        let scale = |v: &Polynomial| {
            let mut m = PolyMatrix::identity(ctx, n);
            m.set(c, c, v.clone());
            m
        };
        work = q.mat_mul(&scale(&u_inv), &work).map_err(err)?;
        left.push((scale(&lu_inv), scale(&lu)));
        for k in 0..n {
            let f = work.get(k, c).clone();
            if k == c || f.is_zero() {
                continue;
            }
            let op = elementary_matrix(ctx, n, k, c, &f.neg());
            work = q.mat_mul(&op, &work).map_err(err)?;
            left.push((op, elementary_matrix(ctx, n, k, c, &f)));
        }
    }
    if !work.is_identity() {
        return Err("elimination did not reach the identity".into());
    }
    // L·σ·Rm = I, so σ = L⁻¹·Rm⁻¹
    let mut delta = PolyMatrix::identity(ctx, n);
    for (_, inv) in &left {
        delta = r.mat_mul(&delta, inv).map_err(err)?;
    }
    for (_, inv) in right.iter().rev() {
        delta = r.mat_mul(&delta, inv).map_err(err)?;
    }
    let mut delta_inv = PolyMatrix::identity(ctx, n);
    for (op, _) in &right {
        delta_inv = r.mat_mul(&delta_inv, op).map_err(err)?;
    }
    for (op, _) in left.iter().rev() {
        delta_inv = r.mat_mul(&delta_inv, op).map_err(err)?;
    }
    Ok((delta, delta_inv))
}

fn mod_monomial(p: &Polynomial, mask: u64) -> Polynomial {
    p.filter_terms(|m| m.support() & mask != mask)
}

fn kill(m: &PolyMatrix, mask: u64) -> PolyMatrix {
    m.map(|p| p.kill_vars(mask))
}

/// Lifts `σ ∈ GL(k[x_V, x_G]/(x_G))` to `GL(k[x_V, x_G])`, where `x_G` is the
/// product of the variables in `g`. Entries involve only variables of
/// `V ∪ G`. The ring `k[x_V, x_G]/(x_G)` is the fiber product of its
/// quotients by `x_i` and by `x_H` (`G = {i} ∪ H`) over their common
/// quotient, which reduces the problem to `|G| - 1`.
fn boundary_lift(sigma: &PolyMatrix, sigma_inv: &PolyMatrix, g: u64) -> Result<(PolyMatrix, PolyMatrix)> {
    if g.count_ones() <= 1 {
        return Ok((sigma.clone(), sigma_inv.clone()));
    }
    let i = 1u64 << g.trailing_zeros();
    let h = g & !i;
    let red_h = |p: Polynomial| mod_monomial(&p, h);
    let s1 = kill(sigma, i);
    let s1_inv = kill(sigma_inv, i);
    let s0 = s1.map(|p| mod_monomial(p, h));
    let s0_inv = s1_inv.map(|p| mod_monomial(p, h));
    let s2 = sigma.map(|p| mod_monomial(p, h));
    let s2_inv = sigma_inv.map(|p| mod_monomial(p, h));
    let rho = s0_inv.mul_reduced(&s2, red_h)?;
    let rho_inv = s2_inv.mul_reduced(&s0, red_h)?;
    let (rho_hat, rho_hat_inv) = boundary_lift(&rho, &rho_inv, h)?;
    let rho_hat0 = kill(&rho_hat, i);
    let rho_hat0_inv = kill(&rho_hat_inv, i);
    let tau = s1.checked_mul(&rho_hat)?.checked_mul(&rho_hat0_inv)?;
    let tau_inv = rho_hat0.checked_mul(&rho_hat_inv)?.checked_mul(&s1_inv)?;
    Ok((tau, tau_inv))
}

fn face_descent(sigma: &PolyMatrix, sigma_inv: &PolyMatrix, r: &QuotientRing, q: &QuotientRing) -> Attempt {
    let (Some(big), Some(small)) = (r.complex(), q.complex()) else {
        return Err("needs square-free monomial ideals on at most 24 variables".into());
    };
    let have: BTreeSet<u64> = small.faces().into_iter().collect();
    let n = r.nvars();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut cur = sigma.clone();
    let mut cur_inv = sigma_inv.clone();
    for f in big.faces().into_iter().filter(|f| !have.contains(f)) {
        let outside = all & !f;
        let on_boundary = |m: &PolyMatrix| kill(m, outside).map(|p| mod_monomial(p, f));
        let (tau, tau_inv) =
            boundary_lift(&on_boundary(&cur), &on_boundary(&cur_inv), f).map_err(|e| e.to_string())?;
        let interior = |m: &PolyMatrix| m.map(|p| p.filter_terms(|mono| mono.support() == f));
        cur = cur.add(&interior(&tau));
        cur_inv = cur_inv.add(&interior(&tau_inv));
    }
    Ok((cur, cur_inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{Field, Monomial, PolyContext};
    use crate::quotient::build_vorst_square;
    use crate::simplicial::SimplicialComplex;

    fn mat(ctx: &Ctx, rows: usize, cols: usize, e: &[&str]) -> PolyMatrix {
        PolyMatrix::from_entries(ctx, rows, cols, e.iter().map(|s| Polynomial::parse(s, ctx).unwrap()).collect())
            .unwrap()
    }

    #[test]
    fn unit_determinants() {
        let ctx = PolyContext::new(2, Field::Rational);
        let r = QuotientRing::new(&ctx, vec![Monomial::from_exponents(vec![1, 1])]);
        let m = mat(&ctx, 2, 2, &["1", "x0", "0", "1"]);
        assert_eq!(det_unit_inverse(&m, &r).unwrap(), mat(&ctx, 2, 2, &["1", "-x0", "0", "1"]));
        let bad = mat(&ctx, 1, 1, &["x0"]);
        assert!(matches!(det_unit_inverse(&bad, &r), Err(Error::NonUnit { .. })));
        let c1 = PolyContext::new(1, Field::Rational);
        let s = QuotientRing::new(&c1, vec![Monomial::from_exponents(vec![2])]);
        assert_eq!(det_unit_inverse(&mat(&c1, 1, 1, &["1 + x0"]), &s).unwrap(), mat(&c1, 1, 1, &["1 - x0"]));
    }

    #[test]
    fn whitehead_of_scalar() {
        let sigma = SimplicialComplex::new(2, &[vec![0], vec![1]]).unwrap();
        let sq = build_vorst_square(Field::Rational, &sigma).unwrap();
        let ctx = sq.a0.ctx();
        let (u, _) = whitehead_lift(&mat(ctx, 1, 1, &["2"]), &mat(ctx, 1, 1, &["1/2"]), &sq.j2, &sq.section).unwrap();
        assert_eq!(u, mat(ctx, 2, 2, &["2", "0", "0", "1/2"]));
        let id = PolyMatrix::identity(ctx, 2);
        let (u, _) = whitehead_lift(&id, &id, &sq.j2, &sq.section).unwrap();
        assert!(u.is_identity());
        assert!(whitehead_lift(&id, &id.scale(&crate::polycore::Scalar::from_i64(Field::Rational, 2)), &sq.j2, &sq.section).is_err());
    }

    fn natural(ctx: &Ctx, big: &[&[u32]], small: &[&[u32]]) -> RingHom {
        let mk = |g: &[&[u32]]| QuotientRing::new(ctx, g.iter().map(|e| Monomial::from_exponents(e.to_vec())).collect());
        RingHom::quotient_map(&mk(big), &mk(small)).unwrap()
    }

    #[test]
    fn constant_and_elementary_lifts() {
        let ctx = PolyContext::new(3, Field::Rational);
        let pi = natural(&ctx, &[], &[&[1, 1, 0]]);
        let c = mat(&ctx, 2, 2, &["2", "1", "1", "1"]);
        let ci = mat(&ctx, 2, 2, &["1", "-1", "-1", "2"]);
        let l = lift_gl(&c, &ci, &pi, &GlStrategy::ALL, None).unwrap();
        assert_eq!(l.delta, c);
        let e = mat(&ctx, 3, 3, &["1", "0", "x0 + x2", "0", "1", "0", "0", "0", "1"]);
        let ei = mat(&ctx, 3, 3, &["1", "0", "-x0 - x2", "0", "1", "0", "0", "0", "1"]);
        let l = lift_gl(&e, &ei, &pi, &GlStrategy::ALL, None).unwrap();
        assert_eq!(l.delta, e);
    }

    #[test]
    fn face_descent_lifts_what_entrywise_cannot() {
        // glued from E12(x0)E21(x0) on the x0 axis and E21(x1)E12(x1) on the x1 axis;
        // the entrywise lift has determinant 1 - 2 x0 x1 + x0^2 x1^2
        let ctx = PolyContext::new(2, Field::Rational);
        let pi = natural(&ctx, &[], &[&[1, 1]]);
        let s = mat(&ctx, 2, 2, &["1 + x0^2", "x0 + x1", "x0 + x1", "1 + x1^2"]);
        let si = mat(&ctx, 2, 2, &["1 + x1^2", "-x0 - x1", "-x0 - x1", "1 + x0^2"]);
        let fail = lift_gl(&s, &si, &pi, &[GlStrategy::Entrywise, GlStrategy::Elementary, GlStrategy::Section], None);
        match fail {
            Err(Error::AllStrategiesFailed { diagnostics }) => assert_eq!(diagnostics.len(), 3),
            other => panic!("expected exhaustion, got {other:?}"),
        }
        let full = lift_gl(&s, &si, &pi, &GlStrategy::ALL, None).unwrap();
        assert_eq!(full.strategy, GlStrategy::FaceDescent);
        assert_eq!(full.diagnostics.len(), 3);
        assert_eq!(pi.apply_matrix(&full.delta).unwrap(), s);
    }

    #[test]
    fn strategy_names_roundtrip() {
        for s in GlStrategy::ALL {
            assert_eq!(s.name().parse::<GlStrategy>().unwrap(), s);
        }
        assert!("nope".parse::<GlStrategy>().is_err());
    }
}
