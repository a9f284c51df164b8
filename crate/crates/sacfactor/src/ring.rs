//! Coefficient-ring abstraction shared by the polynomial types.
//!
//! Polynomial code never inspects coefficients beyond this contract:
//! exact ring arithmetic, a canonical-form zero test, and inversion that
//! may fail because the element is zero, is not a unit, or because the
//! ambient context has to be refined first (see the tower module).

use std::fmt;
use std::ops::Add;

use num_rational::BigRational;

/// Exact arbitrary-precision rational, the base coefficient domain.
pub type Rat = BigRational;

/// Total degree with an absorbing value for the zero polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInf,
    Fin(u32),
}

impl Degree {
    pub fn finite(self) -> Option<u32> {
        match self {
            Degree::NegInf => None,
            Degree::Fin(d) => Some(d),
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Degree::Fin(_))
    }
}

impl Add for Degree {
    type Output = Degree;

    fn add(self, rhs: Degree) -> Degree {
        match (self, rhs) {
            (Degree::Fin(a), Degree::Fin(b)) => Degree::Fin(a + b),
            _ => Degree::NegInf,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInf => write!(f, "-inf"),
            Degree::Fin(d) => write!(f, "{}", d),
        }
    }
}

/// Why an inversion request could not be answered with an inverse.
#[derive(Clone, Debug, PartialEq)]
pub enum InvError<S> {
    /// The element is zero throughout the context.
    Zero,
    /// The element is not a unit and no refinement would change that
    /// (e.g. a nonconstant polynomial coefficient).
    NotUnit,
    /// The element is a zero divisor; the context splits into the
    /// carried branches and the request must be retried per branch.
    Refine(S),
}

/// Errors from single-divisor polynomial division.
#[derive(Clone, Debug, PartialEq)]
pub enum DivError<S> {
    ZeroDivisor,
    /// The divisor's leading coefficient is not invertible outright.
    LeadNotUnit,
    /// Inverting the leading coefficient requires splitting the context.
    Refine(S),
}

impl<S> From<InvError<S>> for DivError<S> {
    fn from(e: InvError<S>) -> Self {
        match e {
            InvError::Zero | InvError::NotUnit => DivError::LeadNotUnit,
            InvError::Refine(s) => DivError::Refine(s),
        }
    }
}

/// The field contract polynomial arithmetic is written against.
///
/// `is_zero` is the canonical-form test: representations are unique, so
/// it is exact and never needs a context split. `inv` is the only
/// operation that can demand one.
pub trait CoeffRing {
    type Elem: Clone + PartialEq + fmt::Debug;
    /// Branch information produced when the context must be refined.
    type Split;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn int(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, InvError<Self::Split>>;
}

/// Uninhabited split type for fields where zero divisors cannot occur.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoSplit {}

/// The rationals as a coefficient field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QQ;

impl CoeffRing for QQ {
    type Elem = Rat;
    type Split = NoSplit;

    fn zero(&self) -> Rat {
        use num_traits::Zero;
        Rat::zero()
    }

    fn one(&self) -> Rat {
        use num_traits::One;
        Rat::one()
    }

    fn int(&self, n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    fn add(&self, a: &Rat, b: &Rat) -> Rat {
        a + b
    }

    fn sub(&self, a: &Rat, b: &Rat) -> Rat {
        a - b
    }

    fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        a * b
    }

    fn neg(&self, a: &Rat) -> Rat {
        -a
    }

    fn is_zero(&self, a: &Rat) -> bool {
        use num_traits::Zero;
        a.is_zero()
    }

    fn inv(&self, a: &Rat) -> Result<Rat, InvError<NoSplit>> {
        use num_traits::Zero;
        if a.is_zero() {
            Err(InvError::Zero)
        } else {
            Ok(a.recip())
        }
    }
}
