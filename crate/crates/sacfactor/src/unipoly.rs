//! Dense univariate polynomials over an abstract coefficient ring.
//!
//! These carry the single-parameter constraint systems produced by the
//! divisibility solver and the defining polynomials of tower generators.

use crate::ring::{CoeffRing, Degree, DivError, InvError};

/// Coefficients by ascending exponent; the last stored coefficient is
/// nonzero in canonical form. The zero polynomial is the empty sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly<C> {
    coeffs: Vec<C>,
}

impl<C: Clone + PartialEq + std::fmt::Debug> UniPoly<C> {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant<R: CoeffRing<Elem = C>>(ring: &R, c: C) -> Self {
        Self::from_coeffs(ring, vec![c])
    }

    /// The variable itself.
    pub fn var<R: CoeffRing<Elem = C>>(ring: &R) -> Self {
        UniPoly {
            coeffs: vec![ring.zero(), ring.one()],
        }
    }

    /// Builds a polynomial from ascending coefficients, trimming zeros.
    pub fn from_coeffs<R: CoeffRing<Elem = C>>(ring: &R, mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| ring.is_zero(c)) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInf,
            n => Degree::Fin((n - 1) as u32),
        }
    }

    /// Degree as an index, `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&C> {
        self.coeffs.last()
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Coefficient at `i`, zero when absent.
    pub fn coeff<R: CoeffRing<Elem = C>>(&self, ring: &R, i: usize) -> C {
        self.coeffs.get(i).cloned().unwrap_or_else(|| ring.zero())
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn add<R: CoeffRing<Elem = C>>(&self, ring: &R, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(ring.add(&self.coeff(ring, i), &other.coeff(ring, i)));
        }
        Self::from_coeffs(ring, out)
    }

    pub fn sub<R: CoeffRing<Elem = C>>(&self, ring: &R, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(ring.sub(&self.coeff(ring, i), &other.coeff(ring, i)));
        }
        Self::from_coeffs(ring, out)
    }

    pub fn neg<R: CoeffRing<Elem = C>>(&self, ring: &R) -> Self {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| ring.neg(c)).collect(),
        }
    }

    pub fn mul<R: CoeffRing<Elem = C>>(&self, ring: &R, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![ring.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if ring.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = ring.add(&out[i + j], &ring.mul(a, b));
            }
        }
        Self::from_coeffs(ring, out)
    }

    pub fn scale<R: CoeffRing<Elem = C>>(&self, ring: &R, c: &C) -> Self {
        Self::from_coeffs(ring, self.coeffs.iter().map(|a| ring.mul(a, c)).collect())
    }

    /// Multiplies by the variable to the `k`-th power.
    pub fn shift_up<R: CoeffRing<Elem = C>>(&self, ring: &R, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut out = vec![ring.zero(); k];
        out.extend(self.coeffs.iter().cloned());
        UniPoly { coeffs: out }
    }

    pub fn derivative<R: CoeffRing<Elem = C>>(&self, ring: &R) -> Self {
        let mut out = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            out.push(ring.mul(c, &ring.int(i as i64)));
        }
        Self::from_coeffs(ring, out)
    }

    /// Horner evaluation at a ring element.
    pub fn eval<R: CoeffRing<Elem = C>>(&self, ring: &R, x: &C) -> C {
        let mut acc = ring.zero();
        for c in self.coeffs.iter().rev() {
            acc = ring.add(&ring.mul(&acc, x), c);
        }
        acc
    }

    pub fn map_coeffs<D, F>(&self, f: F) -> UniPoly<D>
    where
        F: FnMut(&C) -> D,
    {
        UniPoly {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Re-trims after coefficients were rewritten externally.
    pub fn renormalize<R: CoeffRing<Elem = C>>(self, ring: &R) -> Self {
        Self::from_coeffs(ring, self.coeffs)
    }

    /// Scales to leading coefficient one.
    pub fn monic<R: CoeffRing<Elem = C>>(&self, ring: &R) -> Result<Self, InvError<R::Split>> {
        match self.lead() {
            None => Err(InvError::Zero),
            Some(lc) => {
                let inv = ring.inv(lc)?;
                Ok(self.scale(ring, &inv))
            }
        }
    }

    /// Quotient and remainder by a single divisor. Exact arithmetic: the
    /// identity `self = q*d + r` with `deg r < deg d` holds in the ring.
    pub fn div_rem<R: CoeffRing<Elem = C>>(
        &self,
        ring: &R,
        d: &Self,
    ) -> Result<(Self, Self), DivError<R::Split>> {
        let dd = match d.deg() {
            None => return Err(DivError::ZeroDivisor),
            Some(dd) => dd,
        };
        let lc_inv = ring.inv(d.lead().unwrap())?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![ring.zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let top = rem.last().unwrap();
            if ring.is_zero(top) {
                rem.pop();
                continue;
            }
            let k = rem.len() - 1 - dd;
            let factor = ring.mul(top, &lc_inv);
            for (i, dc) in d.coeffs.iter().enumerate() {
                let prod = ring.mul(&factor, dc);
                rem[k + i] = ring.sub(&rem[k + i], &prod);
            }
            quot[k] = factor;
            debug_assert!(ring.is_zero(rem.last().unwrap()));
            rem.pop();
        }
        Ok((
            Self::from_coeffs(ring, quot),
            Self::from_coeffs(ring, rem),
        ))
    }
}

/// The ring of univariate polynomials over `R`; only constants invert.
pub struct UniRing<'a, R>(pub &'a R);

impl<R: CoeffRing> CoeffRing for UniRing<'_, R> {
    type Elem = UniPoly<R::Elem>;
    type Split = R::Split;

    fn zero(&self) -> Self::Elem {
        UniPoly::zero()
    }

    fn one(&self) -> Self::Elem {
        UniPoly::constant(self.0, self.0.one())
    }

    fn int(&self, n: i64) -> Self::Elem {
        UniPoly::constant(self.0, self.0.int(n))
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.add(self.0, b)
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.sub(self.0, b)
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.mul(self.0, b)
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.neg(self.0)
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_zero()
    }

    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, InvError<R::Split>> {
        match a.deg() {
            None => Err(InvError::Zero),
            Some(0) => {
                let inv = self.0.inv(&a.coeffs[0])?;
                Ok(UniPoly::constant(self.0, inv))
            }
            Some(_) => Err(InvError::NotUnit),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Rat, QQ};

    fn upoly(coeffs: &[i64]) -> UniPoly<Rat> {
        UniPoly::from_coeffs(&QQ, coeffs.iter().map(|&c| QQ.int(c)).collect())
    }

    #[test]
    fn canonical_trim() {
        let p = upoly(&[1, 2, 0, 0]);
        assert_eq!(p.deg(), Some(1));
        assert!(upoly(&[0, 0]).is_zero());
        assert_eq!(UniPoly::<Rat>::zero().degree(), Degree::NegInf);
    }

    #[test]
    fn arithmetic() {
        // (t + 1)(t - 1) = t^2 - 1
        let a = upoly(&[1, 1]);
        let b = upoly(&[-1, 1]);
        assert_eq!(a.mul(&QQ, &b), upoly(&[-1, 0, 1]));
        assert_eq!(a.add(&QQ, &b), upoly(&[0, 2]));
        assert_eq!(a.sub(&QQ, &a), UniPoly::zero());
    }

    #[test]
    fn division_identity() {
        // t^3 + t divided by t^2 + 1 is exactly t
        let f = upoly(&[0, 1, 0, 1]);
        let d = upoly(&[1, 0, 1]);
        let (q, r) = f.div_rem(&QQ, &d).unwrap();
        assert_eq!(q, upoly(&[0, 1]));
        assert!(r.is_zero());

        // 2t^2 - t - 1 by t - 1: quotient 2t + 1, remainder 0
        let f = upoly(&[-1, -1, 2]);
        let d = upoly(&[-1, 1]);
        let (q, r) = f.div_rem(&QQ, &d).unwrap();
        assert_eq!(q, upoly(&[1, 2]));
        assert!(r.is_zero());

        assert_eq!(
            upoly(&[1]).div_rem(&QQ, &UniPoly::zero()),
            Err(DivError::ZeroDivisor)
        );
    }

    #[test]
    fn derivative_and_eval() {
        // f = t^3 - 2t: f' = 3t^2 - 2, f(2) = 4
        let f = upoly(&[0, -2, 0, 1]);
        assert_eq!(f.derivative(&QQ), upoly(&[-2, 0, 3]));
        assert_eq!(f.eval(&QQ, &QQ.int(2)), QQ.int(4));
    }

    #[test]
    fn unit_ring_inverts_constants_only() {
        let ring = UniRing(&QQ);
        let two = UniPoly::constant(&QQ, QQ.int(2));
        assert_eq!(
            ring.inv(&two).unwrap(),
            UniPoly::constant(&QQ, Rat::new(1.into(), 2.into()))
        );
        assert_eq!(ring.inv(&upoly(&[0, 1])), Err(InvError::NotUnit));
        assert_eq!(ring.inv(&UniPoly::zero()), Err(InvError::Zero));
    }
}
