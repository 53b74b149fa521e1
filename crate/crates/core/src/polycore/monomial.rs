//! Exponent vectors and monomial orders.

use std::cmp::Ordering;

/// Exponent vector `X_0^{a_0} ... X_n^{a_n}`; length is fixed per ring context.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, index: usize) -> Monomial {
        let mut exps = vec![0; nvars];
        exps[index] = 1;
        Monomial(exps)
    }

    pub fn from_exponents(exps: Vec<u32>) -> Monomial {
        Monomial(exps)
    }

    /// Square-free monomial on a vertex bitmask.
    pub fn from_support(nvars: usize, mask: u64) -> Monomial {
        Monomial((0..nvars).map(|i| ((mask >> i) & 1) as u32).collect())
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Bitmask of variables with positive exponent.
    pub fn support(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(0u64, |m, (i, _)| m | (1 << i))
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        Some(Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.support() & other.support() == 0
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.0[var]
    }

    /// The monomial with variable `var` removed (exponent set to 0).
    pub fn without(&self, var: usize) -> Monomial {
        let mut exps = self.0.clone();
        exps[var] = 0;
        Monomial(exps)
    }
}

/// Which monomial order a ring uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderKind {
    Lex,
    Grevlex,
}

/// A monomial order together with a variable precedence: `precedence[0]` is
/// the most significant variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TermOrder {
    kind: OrderKind,
    precedence: Vec<usize>,
}

impl TermOrder {
    pub fn grevlex(nvars: usize) -> TermOrder {
        TermOrder {
            kind: OrderKind::Grevlex,
            precedence: (0..nvars).collect(),
        }
    }

    pub fn lex(nvars: usize) -> TermOrder {
        TermOrder {
            kind: OrderKind::Lex,
            precedence: (0..nvars).collect(),
        }
    }

    /// Order with an explicit precedence; `None` if it is not a permutation.
    pub fn with_precedence(kind: OrderKind, precedence: Vec<usize>) -> Option<TermOrder> {
        let mut seen = vec![false; precedence.len()];
        for &v in &precedence {
            if v >= seen.len() || seen[v] {
                return None;
            }
            seen[v] = true;
        }
        Some(TermOrder { kind, precedence })
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn precedence(&self) -> &[usize] {
        &self.precedence
    }

    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self.kind {
            OrderKind::Lex => {
                for &v in &self.precedence {
                    match a.0[v].cmp(&b.0[v]) {
                        Ordering::Equal => continue,
                        other => return other,
                    }
                }
                Ordering::Equal
            }
            OrderKind::Grevlex => {
                match a.degree().cmp(&b.degree()) {
                    Ordering::Equal => {}
                    other => return other,
                }
                for &v in self.precedence.iter().rev() {
                    match a.0[v].cmp(&b.0[v]) {
                        Ordering::Equal => continue,
                        other => return other.reverse(),
                    }
                }
                Ordering::Equal
            }
        }
    }
}
