//! Certificate-emitting recursions over Vorst decompositions: extension of
//! projective modules, cancellation, and lifting of unimodular rows.
//!
//! Base cases that the built-in routines cannot settle are handed to a
//! caller-supplied oracle; if that fails too they are returned as
//! obligations, never silently assumed.

mod cancel;
mod emit;
mod extend;
mod umrow;

use crate::cert::ObligationKind;
use crate::error::{Error, Result};
use crate::polycore::{smith_normal_form, PolyMatrix};
use crate::projmod::{augment_matrix, ModIso, ProjModule};
use crate::quotient::QuotientRing;

pub use cancel::{cancel_witness, CancelOutcome};
pub use emit::{gl_lift_certificate, patch_certificate, square_certificate};
pub use extend::{extend_witness, ExtendOutcome};
pub use umrow::{umrow_lift, UmLift, UmLiftOutcome};

/// What an oracle returns for a base-case module.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleOutcome {
    /// An isomorphism from the module to its augmentation.
    Solved(ModIso),
    Declined(String),
}

/// Settles base cases: modules over a ring that is a polynomial ring in the
/// variables that survive in it.
pub trait ExtendOracle {
    fn name(&self) -> &str;

    /// Kind of obligation recorded when this oracle declines.
    fn kind(&self) -> ObligationKind {
        ObligationKind::Extend
    }

    fn extend(&self, p: &ProjModule) -> OracleOutcome;
}

/// An unresolved base case.
#[derive(Debug, Clone, PartialEq)]
pub struct Obligation {
    pub ring: QuotientRing,
    pub module: ProjModule,
    pub kind: ObligationKind,
    /// Variables that survive in `ring`; it is the polynomial ring in these.
    pub vars: Vec<usize>,
    pub detail: String,
}

/// Variables that are nonzero in `ring`.
pub fn surviving_vars(ring: &QuotientRing) -> Vec<usize> {
    let n = ring.nvars();
    (0..n)
        .filter(|&v| ring.survives(&crate::polycore::Monomial::var(n, v)))
        .collect()
}

/// `E = B·C` with `C·B = I_s`, for `E` with entries in at most one variable.
pub fn split_idempotent(p: &ProjModule) -> Result<(PolyMatrix, PolyMatrix)> {
    let ring = p.ring();
    let e = p.matrix();
    let snf = smith_normal_form(e)?;
    let s = snf.rank();
    let n = e.rows();
    for i in 0..s {
        if !snf.d.get(i, i).is_one() {
            return Err(Error::Internal(format!("idempotent has invariant factor {}", snf.d.get(i, i))));
        }
    }
    let b = snf.u_inv.block(0, n, 0, s);
    let c = ring.mat_mul(&snf.u.block(0, s, 0, n), e)?;
    let b = ring.mat_nf(&b);
    if !ring.mat_mul(&c, &b)?.is_identity() || ring.mat_mul(&b, &c)? != *e {
        return Err(Error::Internal("idempotent splitting failed re-verification".into()));
    }
    Ok((b, c))
}

/// Handles zero-variable rings, constant idempotents and rings with a
/// single surviving variable.
#[derive(Debug, Clone, Copy, Default)]
pub struct BuiltinOracle;

impl BuiltinOracle {
    pub fn solve(p: &ProjModule) -> std::result::Result<ModIso, String> {
        let q = p.augmented();
        if p.is_constant() {
            return ModIso::new(p, &q, p.matrix().clone(), p.matrix().clone()).map_err(|e| e.to_string());
        }
        let vars = surviving_vars(p.ring());
        if vars.len() > 1 {
            return Err(format!("polynomial ring in {} variables with a nonconstant idempotent", vars.len()));
        }
        let (b, c) = split_idempotent(p).map_err(|e| e.to_string())?;
        let (b0, c0) = split_idempotent(&q).map_err(|e| e.to_string())?;
        if b.cols() != b0.cols() {
            return Err(format!("rank {} differs from rank {} at the origin", b.cols(), b0.cols()));
        }
        let ring = p.ring();
        let forward = ring.mat_mul(&b0, &c).map_err(|e| e.to_string())?;
        let backward = ring.mat_mul(&b, &c0).map_err(|e| e.to_string())?;
        ModIso::new(p, &q, forward, backward).map_err(|e| e.to_string())
    }
}

impl ExtendOracle for BuiltinOracle {
    fn name(&self) -> &str {
        "builtin"
    }

    fn extend(&self, p: &ProjModule) -> OracleOutcome {
        match BuiltinOracle::solve(p) {
            Ok(iso) => OracleOutcome::Solved(iso),
            Err(why) => OracleOutcome::Declined(why),
        }
    }
}

/// Declines everything.
#[derive(Debug, Clone, Copy, Default)]
pub struct FailingOracle;

impl ExtendOracle for FailingOracle {
    fn name(&self) -> &str {
        "stub"
    }

    fn extend(&self, _p: &ProjModule) -> OracleOutcome {
        OracleOutcome::Declined("stub oracle declines every module".into())
    }
}

/// Knows a conjugator: the top-level idempotent is `g·D·g⁻¹` with `D`
/// constant. Over any quotient, `Φ = g(0)·g⁻¹·E` and `Ψ = g·g(0)⁻¹·E(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugatorOracle {
    pub g: PolyMatrix,
    pub g_inv: PolyMatrix,
}

impl ExtendOracle for ConjugatorOracle {
    fn name(&self) -> &str {
        "conjugator"
    }

    fn extend(&self, p: &ProjModule) -> OracleOutcome {
        let ring = p.ring();
        let attempt = || -> Result<ModIso> {
            let g = ring.mat_nf(&self.g);
            let g_inv = ring.mat_nf(&self.g_inv);
            let q = p.augmented();
            let forward = ring.mat_chain(&[&augment_matrix(&g), &g_inv, p.matrix()])?;
            let backward = ring.mat_chain(&[&g, &augment_matrix(&g_inv), q.matrix()])?;
            ModIso::new(p, &q, forward, backward)
        };
        match attempt() {
            Ok(iso) => OracleOutcome::Solved(iso),
            Err(e) => OracleOutcome::Declined(format!("conjugator does not fit: {e}")),
        }
    }
}

/// A base oracle for modules `P` that are known to become extended after
/// adding a free summand of rank one.
pub trait StableExtendOracle {
    fn name(&self) -> &str;
    fn extend_stable(&self, p: &ProjModule) -> OracleOutcome;
}

/// Runs the extension engine with a stable base oracle; declined base
/// cases become obligations of kind `stable-extend`.
#[derive(Debug, Clone, Copy, Default)]
pub struct StableAdapter<O>(pub O);

impl<O: StableExtendOracle> ExtendOracle for StableAdapter<O> {
    fn name(&self) -> &str {
        self.0.name()
    }

    fn kind(&self) -> ObligationKind {
        ObligationKind::StableExtend
    }

    fn extend(&self, p: &ProjModule) -> OracleOutcome {
        if p.is_constant() {
            return BuiltinOracle.extend(p);
        }
        self.0.extend_stable(p)
    }
}

/// A stable oracle that declines everything.
#[derive(Debug, Clone, Copy, Default)]
pub struct FailingStableOracle;

impl StableExtendOracle for FailingStableOracle {
    fn name(&self) -> &str {
        "stable-stub"
    }

    fn extend_stable(&self, _p: &ProjModule) -> OracleOutcome {
        OracleOutcome::Declined("stub stable oracle declines every module".into())
    }
}
