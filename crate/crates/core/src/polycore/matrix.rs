//! Dense matrices of polynomials.

use std::collections::HashMap;
use std::fmt;

use super::poly::{Ctx, Polynomial};
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Operation selector for [`mat_op`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatOp {
    Mul,
    Add,
    Det,
    Adjugate,
    Transpose,
}

/// Result of [`mat_op`]: determinants are scalars of the ring.
#[derive(Debug, Clone, PartialEq)]
pub enum MatOpResult {
    Matrix(PolyMatrix),
    Scalar(Polynomial),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    ctx: Ctx,
    rows: usize,
    cols: usize,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn zero(ctx: &Ctx, rows: usize, cols: usize) -> PolyMatrix {
        PolyMatrix {
            ctx: ctx.clone(),
            rows,
            cols,
            entries: vec![Polynomial::zero(ctx); rows * cols],
        }
    }

    pub fn identity(ctx: &Ctx, n: usize) -> PolyMatrix {
        let mut m = PolyMatrix::zero(ctx, n, n);
        for i in 0..n {
            m.set(i, i, Polynomial::one(ctx));
        }
        m
    }

    /// `I_k ⊕ 0` of size `n`.
    pub fn partial_identity(ctx: &Ctx, n: usize, k: usize) -> PolyMatrix {
        let mut m = PolyMatrix::zero(ctx, n, n);
        for i in 0..k.min(n) {
            m.set(i, i, Polynomial::one(ctx));
        }
        m
    }

    pub fn from_entries(ctx: &Ctx, rows: usize, cols: usize, entries: Vec<Polynomial>) -> Result<PolyMatrix> {
        if entries.len() != rows * cols {
            return Err(Error::Input(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(p) = entries.iter().find(|p| **p.ctx() != **ctx) {
            return Err(Error::Context(format!(
                "matrix entry over {} variables in a {}-variable matrix",
                p.ctx().nvars(),
                ctx.nvars()
            )));
        }
        Ok(PolyMatrix {
            ctx: ctx.clone(),
            rows,
            cols,
            entries,
        })
    }

    pub fn from_fn(ctx: &Ctx, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Polynomial) -> PolyMatrix {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        PolyMatrix {
            ctx: ctx.clone(),
            rows,
            cols,
            entries,
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn entries(&self) -> &[Polynomial] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [Polynomial] {
        &mut self.entries
    }

    pub fn map(&self, f: impl FnMut(&Polynomial) -> Polynomial) -> PolyMatrix {
        PolyMatrix {
            ctx: self.ctx.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn try_map(&self, f: impl FnMut(&Polynomial) -> Result<Polynomial>) -> Result<PolyMatrix> {
        let entries: Result<Vec<Polynomial>> = self.entries.iter().map(f).collect();
        let entries = entries?;
        let ctx = entries.first().map(|p| p.ctx().clone()).unwrap_or_else(|| self.ctx.clone());
        Ok(PolyMatrix {
            ctx,
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Polynomial::is_zero)
    }

    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(Polynomial::is_constant)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> PolyMatrix {
        PolyMatrix::from_fn(&self.ctx, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn neg(&self) -> PolyMatrix {
        self.map(Polynomial::neg)
    }

    pub fn scale(&self, c: &Scalar) -> PolyMatrix {
        self.map(|p| p.scalar_mul(c))
    }

    pub fn checked_add(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::shape("add", self.shape(), other.shape()));
        }
        let entries: Result<Vec<Polynomial>> = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_add(b))
            .collect();
        Ok(PolyMatrix {
            ctx: self.ctx.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: entries?,
        })
    }

    pub fn checked_sub(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.checked_add(&other.neg())
    }

    /// Product with every accumulated entry passed through `reduce`.
    pub fn mul_reduced(&self, other: &PolyMatrix, reduce: impl Fn(Polynomial) -> Polynomial) -> Result<PolyMatrix> {
        if self.cols != other.rows {
            return Err(Error::shape("mul", self.shape(), other.shape()));
        }
        if !self.entries.is_empty() && !other.entries.is_empty() && *self.ctx != *other.ctx {
            return Err(Error::Context("matrix product across contexts".into()));
        }
        let mut out = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Polynomial::zero(&self.ctx);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b));
                }
                out.push(reduce(acc));
            }
        }
        Ok(PolyMatrix {
            ctx: self.ctx.clone(),
            rows: self.rows,
            cols: other.cols,
            entries: out,
        })
    }

    pub fn checked_mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.mul_reduced(other, |p| p)
    }

    /// Panicking product for internal use where shapes are known to agree.
    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        self.checked_mul(other).expect("matrix shapes agree")
    }

    pub fn add(&self, other: &PolyMatrix) -> PolyMatrix {
        self.checked_add(other).expect("matrix shapes agree")
    }

    pub fn sub(&self, other: &PolyMatrix) -> PolyMatrix {
        self.checked_sub(other).expect("matrix shapes agree")
    }

    /// Block diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &PolyMatrix) -> PolyMatrix {
        let (r, c) = (self.rows + other.rows, self.cols + other.cols);
        PolyMatrix::from_fn(&self.ctx, r, c, |i, j| {
            if i < self.rows && j < self.cols {
                self.get(i, j).clone()
            } else if i >= self.rows && j >= self.cols {
                other.get(i - self.rows, j - self.cols).clone()
            } else {
                Polynomial::zero(&self.ctx)
            }
        })
    }

    /// Sub-block `rows[r0..r1] x cols[c0..c1]`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> PolyMatrix {
        PolyMatrix::from_fn(&self.ctx, r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// Matrix assembled from a 2x2 grid of blocks.
    pub fn from_blocks(a: &PolyMatrix, b: &PolyMatrix, c: &PolyMatrix, d: &PolyMatrix) -> PolyMatrix {
        let (r, s) = (a.rows, a.cols);
        PolyMatrix::from_fn(&a.ctx, r + c.rows, s + b.cols, |i, j| match (i < r, j < s) {
            (true, true) => a.get(i, j).clone(),
            (true, false) => b.get(i, j - s).clone(),
            (false, true) => c.get(i - r, j).clone(),
            (false, false) => d.get(i - r, j - s).clone(),
        })
    }

    pub fn trace(&self) -> Polynomial {
        (0..self.rows.min(self.cols)).fold(Polynomial::zero(&self.ctx), |acc, i| acc.add(self.get(i, i)))
    }

    /// Determinant by cofactor expansion along rows with minors memoized on
    /// their column set; `reduce` is applied to every intermediate minor.
    pub fn det_reduced(&self, reduce: &dyn Fn(Polynomial) -> Polynomial) -> Result<Polynomial> {
        if !self.is_square() {
            return Err(Error::shape("det", self.shape(), self.shape()));
        }
        let rows: Vec<usize> = (0..self.rows).collect();
        let cols: Vec<usize> = (0..self.cols).collect();
        Ok(self.minor_det(&rows, &cols, reduce))
    }

    pub fn det(&self) -> Result<Polynomial> {
        self.det_reduced(&|p| p)
    }

    fn minor_det(&self, rows: &[usize], cols: &[usize], reduce: &dyn Fn(Polynomial) -> Polynomial) -> Polynomial {
        assert!(cols.len() <= 64, "matrix too large for cofactor expansion");
        let n = rows.len();
        let mut memo: HashMap<u64, Polynomial> = HashMap::new();
        let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        self.det_rec(rows, cols, 0, full, &mut memo, reduce)
    }

    fn det_rec(
        &self,
        rows: &[usize],
        cols: &[usize],
        depth: usize,
        mask: u64,
        memo: &mut HashMap<u64, Polynomial>,
        reduce: &dyn Fn(Polynomial) -> Polynomial,
    ) -> Polynomial {
        if depth == rows.len() {
            return Polynomial::one(&self.ctx);
        }
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let row = rows[depth];
        let mut acc = Polynomial::zero(&self.ctx);
        let mut sign_positive = true;
        for (k, &col) in cols.iter().enumerate() {
            if mask & (1 << k) == 0 {
                continue;
            }
            let a = self.get(row, col);
            if !a.is_zero() {
                let sub = self.det_rec(rows, cols, depth + 1, mask & !(1 << k), memo, reduce);
                if !sub.is_zero() {
                    let t = a.mul(&sub);
                    acc = if sign_positive { acc.add(&t) } else { acc.sub(&t) };
                }
            }
            sign_positive = !sign_positive;
        }
        let acc = reduce(acc);
        memo.insert(mask, acc.clone());
        acc
    }

    /// Classical adjugate: `adj[i][j] = (-1)^(i+j) det(minor without row j, column i)`.
    pub fn adjugate_reduced(&self, reduce: &dyn Fn(Polynomial) -> Polynomial) -> Result<PolyMatrix> {
        if !self.is_square() {
            return Err(Error::shape("adjugate", self.shape(), self.shape()));
        }
        let n = self.rows;
        if n == 1 {
            return Ok(PolyMatrix::identity(&self.ctx, 1));
        }
        let mut out = PolyMatrix::zero(&self.ctx, n, n);
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
                let d = self.minor_det(&rows, &cols, reduce);
                out.set(i, j, if (i + j) % 2 == 0 { d } else { d.neg() });
            }
        }
        Ok(out)
    }

    pub fn adjugate(&self) -> Result<PolyMatrix> {
        self.adjugate_reduced(&|p| p)
    }

    /// Rank of a constant matrix over the base field.
    pub fn constant_rank(&self) -> Option<usize> {
        let mut rows: Vec<Vec<Scalar>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).constant_value()).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        Some(super::linalg::row_reduce(&mut rows).len())
    }
}

/// `M op N` for the matrix operations of the core layer.
pub fn mat_op(m: &PolyMatrix, n: Option<&PolyMatrix>, op: MatOp) -> Result<MatOpResult> {
    let need = |n: Option<&PolyMatrix>| n.ok_or_else(|| Error::Input("operation needs a second matrix".into())).cloned();
    match op {
        MatOp::Mul => Ok(MatOpResult::Matrix(m.checked_mul(&need(n)?)?)),
        MatOp::Add => Ok(MatOpResult::Matrix(m.checked_add(&need(n)?)?)),
        MatOp::Det => Ok(MatOpResult::Scalar(m.det()?)),
        MatOp::Adjugate => Ok(MatOpResult::Matrix(m.adjugate()?)),
        MatOp::Transpose => Ok(MatOpResult::Matrix(m.transpose())),
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{Field, PolyContext};

    fn mat(ctx: &Ctx, rows: &[&[&str]]) -> PolyMatrix {
        let r = rows.len();
        let c = rows[0].len();
        let entries = rows
            .iter()
            .flat_map(|row| row.iter().map(|s| Polynomial::parse(s, ctx).unwrap()))
            .collect();
        PolyMatrix::from_entries(ctx, r, c, entries).unwrap()
    }

    #[test]
    fn determinant_examples() {
        let c = PolyContext::new(2, Field::Rational);
        assert!(PolyMatrix::identity(&c, 3).det().unwrap().is_one());
        assert!(mat(&c, &[&["1", "x0"], &["0", "1"]]).det().unwrap().is_one());
        let m = mat(&c, &[&["x0", "x1", "1"], &["1", "x0", "0"], &["x1", "2", "x0*x1"]]);
        let adj = m.adjugate().unwrap();
        let d = m.det().unwrap();
        let scaled = PolyMatrix::identity(&c, 3).map(|p| p.mul(&d));
        assert_eq!(m.mul(&adj), scaled);
        assert_eq!(adj.mul(&m), scaled);
    }

    #[test]
    fn shape_errors() {
        let c = PolyContext::new(1, Field::Rational);
        let a = PolyMatrix::zero(&c, 2, 3);
        assert!(matches!(a.det(), Err(Error::Shape { .. })));
        assert!(matches!(a.checked_mul(&a), Err(Error::Shape { .. })));
        assert!(mat_op(&a, Some(&a), MatOp::Add).is_ok());
    }

    #[test]
    fn blocks_round_trip() {
        let c = PolyContext::new(1, Field::Rational);
        let a = mat(&c, &[&["1", "x0"], &["2", "3"]]);
        let s = a.direct_sum(&PolyMatrix::identity(&c, 1));
        assert_eq!(s.block(0, 2, 0, 2), a);
        assert!(s.block(2, 3, 2, 3).is_identity());
        assert_eq!(s.trace(), Polynomial::parse("5", &c).unwrap());
    }
}
