//! Exact field arithmetic: arbitrary-precision rationals and prime fields F_p.
//!
//! Every [`Scalar`] carries its field descriptor; binary operations check that
//! both operands live in the same field and refuse to coerce.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Ground-field descriptor.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Field {
    /// Arbitrary-precision rationals.
    Rational,
    /// Prime field F_p.
    Prime(u64),
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("field mismatch: {0} vs {1}")]
    Mismatch(Field, Field),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    /// Builds a prime-field descriptor, checking primality.
    pub fn prime(p: u64) -> Result<Field, FieldError> {
        if is_prime(p) {
            Ok(Field::Prime(p))
        } else {
            Err(FieldError::NotPrime(p))
        }
    }

    /// Parses `"q"` (rationals) or `"gf:p"`.
    pub fn parse(s: &str) -> Result<Field, FieldError> {
        if s == "q" || s == "Q" {
            return Ok(Field::Rational);
        }
        if let Some(rest) = s.strip_prefix("gf:") {
            let p: u64 = rest.parse().map_err(|_| FieldError::Parse {
                what: "field",
                input: s.to_string(),
            })?;
            return Field::prime(p);
        }
        Err(FieldError::Parse {
            what: "field",
            input: s.to_string(),
        })
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match *self {
            Field::Rational => Scalar {
                field: *self,
                repr: Repr::Rational(BigRational::from(BigInt::from(n))),
            },
            Field::Prime(p) => {
                let r = n.rem_euclid(p as i64);
                Scalar {
                    field: *self,
                    repr: Repr::Mod(r as u64),
                }
            }
        }
    }

    /// Parses the text form used by the JSON datum format: `num/den` for
    /// rationals (`den` omitted when 1), a decimal residue for F_p.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar, FieldError> {
        let bad = || FieldError::Parse {
            what: "scalar",
            input: s.to_string(),
        };
        let s = s.trim();
        match *self {
            Field::Rational => {
                let (num, den) = match s.split_once('/') {
                    Some((n, d)) => (n, d),
                    None => (s, "1"),
                };
                let num: BigInt = num.trim().parse().map_err(|_| bad())?;
                let den: BigInt = den.trim().parse().map_err(|_| bad())?;
                if den.is_zero() {
                    return Err(FieldError::DivisionByZero);
                }
                Ok(Scalar {
                    field: *self,
                    repr: Repr::Rational(BigRational::new(num, den)),
                })
            }
            Field::Prime(p) => {
                let n: i128 = s.parse().map_err(|_| bad())?;
                let r = n.rem_euclid(p as i128) as u64;
                Ok(Scalar {
                    field: *self,
                    repr: Repr::Mod(r),
                })
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "q"),
            Field::Prime(p) => write!(f, "gf:{p}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Repr {
    Rational(BigRational),
    Mod(u64),
}

/// An exact element of the ground field, tagged with its field descriptor.
///
/// Rationals are stored normalized (reduced fraction, positive denominator),
/// so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Scalar {
    field: Field,
    repr: Repr,
}

impl Scalar {
    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Rational(r) => r.is_zero(),
            Repr::Mod(n) => *n == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            Repr::Rational(r) => r.is_one(),
            Repr::Mod(n) => *n == 1,
        }
    }

    fn check(&self, other: &Scalar) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::Mismatch(self.field, other.field))
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.check(other)?;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Rational(a), Repr::Rational(b)) => Repr::Rational(a + b),
            (Repr::Mod(a), Repr::Mod(b)) => {
                let p = self.prime_modulus();
                Repr::Mod(((*a as u128 + *b as u128) % p as u128) as u64)
            }
            _ => unreachable!("repr always matches field"),
        };
        Ok(Scalar {
            field: self.field,
            repr,
        })
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.check(other)?;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Rational(a), Repr::Rational(b)) => Repr::Rational(a * b),
            (Repr::Mod(a), Repr::Mod(b)) => {
                let p = self.prime_modulus();
                Repr::Mod(((*a as u128 * *b as u128) % p as u128) as u64)
            }
            _ => unreachable!("repr always matches field"),
        };
        Ok(Scalar {
            field: self.field,
            repr,
        })
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.mul(&other.inv()?)
    }

    pub fn neg(&self) -> Scalar {
        let repr = match &self.repr {
            Repr::Rational(a) => Repr::Rational(-a),
            Repr::Mod(a) => {
                let p = self.prime_modulus();
                Repr::Mod(if *a == 0 { 0 } else { p - *a })
            }
        };
        Scalar {
            field: self.field,
            repr,
        }
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self) -> Result<Scalar, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let repr = match &self.repr {
            Repr::Rational(a) => Repr::Rational(a.recip()),
            Repr::Mod(a) => {
                // Fermat: a^(p-2) mod p.
                let p = self.prime_modulus();
                let mut base = *a as u128;
                let mut exp = p - 2;
                let mut acc: u128 = 1;
                let m = p as u128;
                while exp > 0 {
                    if exp & 1 == 1 {
                        acc = acc * base % m;
                    }
                    base = base * base % m;
                    exp >>= 1;
                }
                Repr::Mod(acc as u64)
            }
        };
        Ok(Scalar {
            field: self.field,
            repr,
        })
    }

    pub fn pow(&self, k: u64) -> Scalar {
        let mut acc = self.field.one();
        let mut base = self.clone();
        let mut exp = k;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base).expect("same field");
            }
            base = base.mul(&base).expect("same field");
            exp >>= 1;
        }
        acc
    }

    fn prime_modulus(&self) -> u64 {
        match self.field {
            Field::Prime(p) => p,
            Field::Rational => unreachable!("rational scalar has no modulus"),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Repr::Mod(n) => write!(f, "{n}"),
        }
    }
}

/// Signum-style comparison helpers used by display code only; the library
/// never orders scalars.
impl Scalar {
    pub fn is_negative(&self) -> bool {
        match &self.repr {
            Repr::Rational(r) => r.is_negative(),
            Repr::Mod(_) => false,
        }
    }
}
