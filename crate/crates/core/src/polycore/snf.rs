//! Smith normal form over `k[t]`, with both transforms and their inverses.

use super::matrix::PolyMatrix;
use super::monomial::Monomial;
use super::poly::{Ctx, Polynomial};
use super::scalar::{Field, Scalar};
use crate::error::{Error, Result};

/// Dense univariate polynomial, coefficients in increasing degree, no
/// trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
struct UPoly {
    coeffs: Vec<Scalar>,
}

impl UPoly {
    fn zero() -> UPoly {
        UPoly { coeffs: Vec::new() }
    }

    fn constant(c: Scalar) -> UPoly {
        UPoly { coeffs: vec![c] }.trimmed()
    }

    fn trimmed(mut self) -> UPoly {
        while self.coeffs.last().is_some_and(Scalar::is_zero) {
            self.coeffs.pop();
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn lead(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    fn add(&self, other: &UPoly, field: Field) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = Scalar::zero(field);
        let coeffs = (0..n)
            .map(|i| self.coeffs.get(i).unwrap_or(&z).add(other.coeffs.get(i).unwrap_or(&z)))
            .collect();
        UPoly { coeffs }.trimmed()
    }

    fn neg(&self) -> UPoly {
        UPoly {
            coeffs: self.coeffs.iter().map(Scalar::neg).collect(),
        }
    }

    fn sub(&self, other: &UPoly, field: Field) -> UPoly {
        self.add(&other.neg(), field)
    }

    fn mul(&self, other: &UPoly, field: Field) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut coeffs = vec![Scalar::zero(field); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        UPoly { coeffs }.trimmed()
    }

    fn scale(&self, c: &Scalar) -> UPoly {
        UPoly {
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
        }
        .trimmed()
    }

    fn div_rem(&self, d: &UPoly, field: Field) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = d.lead().unwrap().inv().unwrap();
        let mut r = self.clone();
        let mut q = vec![Scalar::zero(field); self.coeffs.len().saturating_sub(dd).max(1)];
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let c = r.lead().unwrap().mul(&inv);
            let shift = rd - dd;
            q[shift] = q[shift].add(&c);
            for (i, b) in d.coeffs.iter().enumerate() {
                r.coeffs[i + shift] = r.coeffs[i + shift].sub(&c.mul(b));
            }
            r = r.trimmed();
        }
        (UPoly { coeffs: q }.trimmed(), r)
    }
}

/// Polynomials in at most one variable; the variable index is shared by every entry.
struct Univariate {
    var: Option<usize>,
}

impl Univariate {
    fn detect<'a>(entries: impl IntoIterator<Item = &'a Polynomial>) -> Result<Univariate> {
        let mask = entries.into_iter().fold(0u64, |m, p| m | p.support());
        match mask.count_ones() {
            0 => Ok(Univariate { var: None }),
            1 => Ok(Univariate {
                var: Some(mask.trailing_zeros() as usize),
            }),
            n => Err(Error::UnsupportedRing(format!(
                "Smith normal form needs univariate entries, found {n} variables"
            ))),
        }
    }

    fn to_dense(&self, p: &Polynomial) -> UPoly {
        let field = p.field();
        let mut coeffs = Vec::new();
        for (m, c) in p.terms() {
            let e = self.var.map_or(0, |v| m.exponent(v)) as usize;
            if coeffs.len() <= e {
                coeffs.resize(e + 1, Scalar::zero(field));
            }
            coeffs[e] = c.clone();
        }
        UPoly { coeffs }.trimmed()
    }

    fn to_sparse(&self, u: &UPoly, ctx: &Ctx) -> Polynomial {
        let terms = u.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(e, c)| {
            let mono = match self.var {
                Some(v) => {
                    let mut exps = vec![0; ctx.nvars()];
                    exps[v] = e as u32;
                    Monomial::from_exponents(exps)
                }
                None => Monomial::one(ctx.nvars()),
            };
            (mono, c.clone())
        });
        Polynomial::from_terms(ctx, terms)
    }
}

/// `u * m * v = d` with `d` diagonal, `d_i | d_{i+1}`, nonzero diagonal
/// entries monic; `u_inv` and `v_inv` are exact inverses.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub u: PolyMatrix,
    pub u_inv: PolyMatrix,
    pub d: PolyMatrix,
    pub v: PolyMatrix,
    pub v_inv: PolyMatrix,
}

impl SmithForm {
    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        (0..self.d.rows().min(self.d.cols()))
            .take_while(|&i| !self.d.get(i, i).is_zero())
            .count()
    }
}

type Dense = Vec<Vec<UPoly>>;

struct SnfState {
    field: Field,
    a: Dense,
    u: Dense,
    u_inv: Dense,
    v: Dense,
    v_inv: Dense,
}

fn dense_identity(n: usize, field: Field) -> Dense {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { UPoly::constant(Scalar::one(field)) } else { UPoly::zero() })
                .collect()
        })
        .collect()
}

impl SnfState {
    /// row_i += c * row_k on `a`, tracked in `u` / `u_inv`.
    fn row_add(&mut self, i: usize, k: usize, c: &UPoly) {
        let f = self.field;
        for m in [&mut self.a, &mut self.u] {
            for j in 0..m[0].len() {
                let t = m[k][j].mul(c, f);
                m[i][j] = m[i][j].add(&t, f);
            }
        }
        // u_inv <- u_inv * (I - c e_ik): column k -= c * column i
        for r in 0..self.u_inv.len() {
            let t = self.u_inv[r][i].mul(c, f);
            self.u_inv[r][k] = self.u_inv[r][k].sub(&t, f);
        }
    }

    /// col_j += c * col_k on `a`, tracked in `v` / `v_inv`.
    fn col_add(&mut self, j: usize, k: usize, c: &UPoly) {
        let f = self.field;
        for m in [&mut self.a, &mut self.v] {
            for row in m.iter_mut() {
                let t = row[k].mul(c, f);
                row[j] = row[j].add(&t, f);
            }
        }
        // v_inv <- (I - c e_kj) * v_inv: row k -= c * row j
        let n = self.v_inv.len();
        for col in 0..n {
            let t = self.v_inv[j][col].mul(c, f);
            self.v_inv[k][col] = self.v_inv[k][col].sub(&t, f);
        }
    }

    fn row_swap(&mut self, i: usize, k: usize) {
        if i == k {
            return;
        }
        self.a.swap(i, k);
        self.u.swap(i, k);
        for row in self.u_inv.iter_mut() {
            row.swap(i, k);
        }
    }

    fn col_swap(&mut self, j: usize, k: usize) {
        if j == k {
            return;
        }
        for row in self.a.iter_mut() {
            row.swap(j, k);
        }
        for row in self.v.iter_mut() {
            row.swap(j, k);
        }
        self.v_inv.swap(j, k);
    }

    fn row_scale(&mut self, i: usize, c: &Scalar) {
        let inv = c.inv().expect("unit scale");
        for x in self.a[i].iter_mut() {
            *x = x.scale(c);
        }
        for x in self.u[i].iter_mut() {
            *x = x.scale(c);
        }
        for row in self.u_inv.iter_mut() {
            row[i] = row[i].scale(&inv);
        }
    }

    fn run(&mut self) {
        let (m, n) = (self.a.len(), self.a.first().map_or(0, Vec::len));
        let f = self.field;
        for t in 0..m.min(n) {
            loop {
                let pivot = (t..m)
                    .flat_map(|i| (t..n).map(move |j| (i, j)))
                    .filter(|&(i, j)| !self.a[i][j].is_zero())
                    .min_by_key(|&(i, j)| (self.a[i][j].degree(), i, j));
                let Some((pi, pj)) = pivot else {
                    return;
                };
                self.row_swap(t, pi);
                self.col_swap(t, pj);
                let p = self.a[t][t].clone();
                let mut dirty = false;
                for i in t + 1..m {
                    if self.a[i][t].is_zero() {
                        continue;
                    }
                    let (q, r) = self.a[i][t].div_rem(&p, f);
                    self.row_add(i, t, &q.neg());
                    dirty |= !r.is_zero();
                }
                for j in t + 1..n {
                    if self.a[t][j].is_zero() {
                        continue;
                    }
                    let (q, r) = self.a[t][j].div_rem(&p, f);
                    self.col_add(j, t, &q.neg());
                    dirty |= !r.is_zero();
                }
                if dirty {
                    continue;
                }
                let offender = (t + 1..m).find(|&i| {
                    (t + 1..n).any(|j| !self.a[i][j].is_zero() && !self.a[i][j].div_rem(&p, f).1.is_zero())
                });
                if let Some(i) = offender {
                    self.row_add(t, i, &UPoly::constant(Scalar::one(f)));
                    continue;
                }
                break;
            }
            let lead = self.a[t][t].lead().expect("pivot is nonzero").clone();
            if !lead.is_one() {
                self.row_scale(t, &lead.inv().unwrap());
            }
        }
    }
}

/// Smith normal form of a matrix whose entries are univariate over a field
/// (constants allowed).
pub fn smith_normal_form(m: &PolyMatrix) -> Result<SmithForm> {
    let uni = Univariate::detect(m.entries())?;
    let ctx = m.ctx().clone();
    let field = ctx.field();
    let (rows, cols) = m.shape();
    let a: Dense = (0..rows).map(|i| (0..cols).map(|j| uni.to_dense(m.get(i, j))).collect()).collect();
    let mut st = SnfState {
        field,
        a,
        u: dense_identity(rows, field),
        u_inv: dense_identity(rows, field),
        v: dense_identity(cols, field),
        v_inv: dense_identity(cols, field),
    };
    st.run();
    let back = |d: &Dense, r: usize, c: usize| PolyMatrix::from_fn(&ctx, r, c, |i, j| uni.to_sparse(&d[i][j], &ctx));
    Ok(SmithForm {
        u: back(&st.u, rows, rows),
        u_inv: back(&st.u_inv, rows, rows),
        d: back(&st.a, rows, cols),
        v: back(&st.v, cols, cols),
        v_inv: back(&st.v_inv, cols, cols),
    })
}

/// True when `a` divides `b` in `k[t]` (both univariate in the same variable).
pub fn univariate_divides(a: &Polynomial, b: &Polynomial) -> Result<bool> {
    let uni = Univariate::detect([a, b])?;
    let (da, db) = (uni.to_dense(a), uni.to_dense(b));
    if da.is_zero() {
        return Ok(db.is_zero());
    }
    Ok(db.div_rem(&da, a.field()).1.is_zero())
}
