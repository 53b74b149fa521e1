//! Exact field elements: rationals and residues modulo a prime.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Primes are kept below 2^31 so residue products fit in a `u64`.
const MAX_PRIME: u64 = 1 << 31;

/// The coefficient field of a ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    pub fn prime(p: u64) -> Result<Field> {
        if p < 2 || p >= MAX_PRIME || !is_prime(p) {
            return Err(Error::Input(format!("{p} is not a prime below 2^31")));
        }
        Ok(Field::Prime(p))
    }

    /// Field characteristic, 0 for the rationals.
    pub fn characteristic(self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => p,
        }
    }

    /// Parses the `"Q"` / `"Fp:<p>"` descriptor used by the file formats.
    pub fn parse(text: &str) -> Result<Field> {
        let text = text.trim();
        if text == "Q" {
            return Ok(Field::Rational);
        }
        if let Some(p) = text.strip_prefix("Fp:") {
            let p: u64 = p
                .trim()
                .parse()
                .map_err(|_| Error::Input(format!("bad field descriptor {text:?}")))?;
            return Field::prime(p);
        }
        Err(Error::Input(format!("bad field descriptor {text:?}")))
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "Fp:{p}"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A field element. Rationals are always in lowest terms; residues lie in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Residue { value: u64, modulus: u64 },
}

impl Scalar {
    pub fn zero(field: Field) -> Scalar {
        Scalar::from_i64(field, 0)
    }

    pub fn one(field: Field) -> Scalar {
        Scalar::from_i64(field, 1)
    }

    pub fn from_i64(field: Field, n: i64) -> Scalar {
        match field {
            Field::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Scalar::Residue {
                value: n.rem_euclid(p as i64) as u64,
                modulus: p,
            },
        }
    }

    pub fn from_bigint(field: Field, n: &BigInt) -> Scalar {
        match field {
            Field::Rational => Scalar::Rational(BigRational::from_integer(n.clone())),
            Field::Prime(p) => {
                let r = n.mod_floor(&BigInt::from(p));
                Scalar::Residue {
                    value: r.to_u64().expect("residue fits"),
                    modulus: p,
                }
            }
        }
    }

    /// `num / den`; fails when `den` vanishes in the field.
    pub fn from_ratio(field: Field, num: &BigInt, den: &BigInt) -> Result<Scalar> {
        let d = Scalar::from_bigint(field, den);
        let inv = d
            .inv()
            .ok_or_else(|| Error::Input(format!("denominator {den} vanishes in {field}")))?;
        Ok(Scalar::from_bigint(field, num).mul(&inv))
    }

    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rational,
            Scalar::Residue { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Residue { value, .. } => *value == 1,
        }
    }

    fn check(&self, other: &Scalar) {
        assert_eq!(
            self.field(),
            other.field(),
            "scalar field mismatch: {} vs {}",
            self.field(),
            other.field()
        );
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        self.check(other);
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Residue { value: a, modulus }, Scalar::Residue { value: b, .. }) => {
                Scalar::Residue {
                    value: (a + b) % modulus,
                    modulus: *modulus,
                }
            }
            _ => unreachable!(),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Residue { value, modulus } => Scalar::Residue {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        self.check(other);
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Residue { value: a, modulus }, Scalar::Residue { value: b, .. }) => {
                Scalar::Residue {
                    value: (a * b) % modulus,
                    modulus: *modulus,
                }
            }
            _ => unreachable!(),
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        match self {
            Scalar::Rational(a) => Some(Scalar::Rational(a.recip())),
            Scalar::Residue { value, modulus } => {
                let (m, v) = (*modulus as i64, *value as i64);
                let egcd = v.extended_gcd(&m);
                Some(Scalar::Residue {
                    value: egcd.x.rem_euclid(m) as u64,
                    modulus: *modulus,
                })
            }
        }
    }

    /// The element as an integer when it is one (rationals with denominator 1,
    /// residues as their canonical representative).
    pub fn to_integer(&self) -> Option<i64> {
        match self {
            Scalar::Rational(q) if q.is_integer() => q.to_integer().to_i64(),
            Scalar::Rational(_) => None,
            Scalar::Residue { value, .. } => Some(*value as i64),
        }
    }

    /// True when printing needs a leading minus sign.
    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_negative(),
            Scalar::Residue { .. } => false,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(q.abs()),
            other => other.clone(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}
