//! Sparse bivariate polynomials over an abstract coefficient field.
//!
//! Terms live in a map keyed by monomial under the graded lexicographic
//! order with x > y; no zero coefficient is ever stored, so structural
//! equality is semantic equality. The single-divisor long division here
//! is the workhorse of the reduction engine.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::ring::{CoeffRing, Degree, DivError};
use crate::unipoly::UniPoly;

/// A power product `x^ex * y^ey`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub ex: u32,
    pub ey: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { ex: 0, ey: 0 };

    pub fn new(ex: u32, ey: u32) -> Self {
        Monomial { ex, ey }
    }

    pub fn total_degree(&self) -> u32 {
        self.ex + self.ey
    }

    pub fn is_unit(&self) -> bool {
        self.ex == 0 && self.ey == 0
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.ex <= other.ex && self.ey <= other.ey
    }

    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if other.divides(self) {
            Some(Monomial::new(self.ex - other.ex, self.ey - other.ey))
        } else {
            None
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::new(self.ex + other.ex, self.ey + other.ey)
    }
}

/// Graded lexicographic with x > y: compare total degree, then x-exponent.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.total_degree(), self.ex).cmp(&(other.total_degree(), other.ex))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse bivariate polynomial in canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly2<C> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Clone + PartialEq + std::fmt::Debug> Poly2<C> {
    pub fn zero() -> Self {
        Poly2 {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant<R: CoeffRing<Elem = C>>(ring: &R, c: C) -> Self {
        Self::from_terms(ring, [(Monomial::ONE, c)])
    }

    pub fn one<R: CoeffRing<Elem = C>>(ring: &R) -> Self {
        Self::constant(ring, ring.one())
    }

    pub fn var_x<R: CoeffRing<Elem = C>>(ring: &R) -> Self {
        Self::from_terms(ring, [(Monomial::new(1, 0), ring.one())])
    }

    pub fn var_y<R: CoeffRing<Elem = C>>(ring: &R) -> Self {
        Self::from_terms(ring, [(Monomial::new(0, 1), ring.one())])
    }

    pub fn monomial<R: CoeffRing<Elem = C>>(ring: &R, m: Monomial, c: C) -> Self {
        Self::from_terms(ring, [(m, c)])
    }

    /// Accumulates terms, merging duplicates and dropping zeros.
    pub fn from_terms<R, I>(ring: &R, terms: I) -> Self
    where
        R: CoeffRing<Elem = C>,
        I: IntoIterator<Item = (Monomial, C)>,
    {
        let mut map: BTreeMap<Monomial, C> = BTreeMap::new();
        for (m, c) in terms {
            match map.remove(&m) {
                None => {
                    map.insert(m, c);
                }
                Some(prev) => {
                    map.insert(m, ring.add(&prev, &c));
                }
            }
        }
        map.retain(|_, c| !ring.is_zero(c));
        Poly2 { terms: map }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order; reverse for the canonical
    /// highest-first presentation.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&C> {
        self.terms.get(m)
    }

    /// Value of the constant term, zero when absent.
    pub fn constant_coeff<R: CoeffRing<Elem = C>>(&self, ring: &R) -> C {
        self.terms
            .get(&Monomial::ONE)
            .cloned()
            .unwrap_or_else(|| ring.zero())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_unit)
    }

    pub fn total_degree(&self) -> Degree {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .map_or(Degree::NegInf, Degree::Fin)
    }

    pub fn leading_monomial(&self) -> Option<Monomial> {
        self.terms.keys().next_back().copied()
    }

    pub fn leading_coeff(&self) -> Option<&C> {
        self.terms.values().next_back()
    }

    /// Sum of all terms of maximal total degree; `None` for zero.
    pub fn leading_form(&self) -> Option<Poly2<C>> {
        let top = self.total_degree().finite()?;
        Some(Poly2 {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.total_degree() == top)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        })
    }

    pub fn add<R: CoeffRing<Elem = C>>(&self, ring: &R, other: &Self) -> Self {
        let mut out = self.terms.clone();
        for (m, c) in &other.terms {
            match out.remove(m) {
                None => {
                    out.insert(*m, c.clone());
                }
                Some(prev) => {
                    let s = ring.add(&prev, c);
                    if !ring.is_zero(&s) {
                        out.insert(*m, s);
                    }
                }
            }
        }
        Poly2 { terms: out }
    }

    pub fn sub<R: CoeffRing<Elem = C>>(&self, ring: &R, other: &Self) -> Self {
        self.add(ring, &other.neg(ring))
    }

    pub fn neg<R: CoeffRing<Elem = C>>(&self, ring: &R) -> Self {
        Poly2 {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, ring.neg(c)))
                .collect(),
        }
    }

    pub fn mul<R: CoeffRing<Elem = C>>(&self, ring: &R, other: &Self) -> Self {
        let mut out: BTreeMap<Monomial, C> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let prod = ring.mul(ca, cb);
                match out.remove(&m) {
                    None => {
                        out.insert(m, prod);
                    }
                    Some(prev) => {
                        out.insert(m, ring.add(&prev, &prod));
                    }
                }
            }
        }
        out.retain(|_, c| !ring.is_zero(c));
        Poly2 { terms: out }
    }

    pub fn scale<R: CoeffRing<Elem = C>>(&self, ring: &R, c: &C) -> Self {
        Self::from_terms(
            ring,
            self.terms.iter().map(|(m, a)| (*m, ring.mul(a, c))),
        )
    }

    pub fn pow<R: CoeffRing<Elem = C>>(&self, ring: &R, k: u32) -> Self {
        let mut acc = Self::one(ring);
        for _ in 0..k {
            acc = acc.mul(ring, self);
        }
        acc
    }

    pub fn add_constant<R: CoeffRing<Elem = C>>(&self, ring: &R, c: &C) -> Self {
        self.add(ring, &Self::constant(ring, c.clone()))
    }

    /// Exact evaluation of `self(sx, sy)`.
    pub fn substitute<R: CoeffRing<Elem = C>>(&self, ring: &R, sx: &Self, sy: &Self) -> Self {
        // Power tables avoid recomputing sx^i, sy^j per term.
        let max_x = self.terms.keys().map(|m| m.ex).max().unwrap_or(0) as usize;
        let max_y = self.terms.keys().map(|m| m.ey).max().unwrap_or(0) as usize;
        let mut xp = Vec::with_capacity(max_x + 1);
        xp.push(Self::one(ring));
        for i in 1..=max_x {
            let next = xp[i - 1].mul(ring, sx);
            xp.push(next);
        }
        let mut yp = Vec::with_capacity(max_y + 1);
        yp.push(Self::one(ring));
        for j in 1..=max_y {
            let next = yp[j - 1].mul(ring, sy);
            yp.push(next);
        }
        let mut acc = Self::zero();
        for (m, c) in &self.terms {
            let term = xp[m.ex as usize]
                .mul(ring, &yp[m.ey as usize])
                .scale(ring, c);
            acc = acc.add(ring, &term);
        }
        acc
    }

    /// Long division by a single divisor under the fixed term order:
    /// always reduces the current leading reducible term, so the result
    /// is deterministic and no term of the remainder is divisible by the
    /// divisor's leading monomial.
    pub fn divide_by<R: CoeffRing<Elem = C>>(
        &self,
        ring: &R,
        d: &Self,
    ) -> Result<(Self, Self), DivError<R::Split>> {
        let dlm = d.leading_monomial().ok_or(DivError::ZeroDivisor)?;
        let lc_inv = ring.inv(d.leading_coeff().unwrap())?;
        let mut current = self.clone();
        let mut quot: BTreeMap<Monomial, C> = BTreeMap::new();
        let mut rem: BTreeMap<Monomial, C> = BTreeMap::new();
        while let Some((&m, c)) = current.terms.iter().next_back() {
            match m.div(&dlm) {
                Some(qm) => {
                    let qc = ring.mul(c, &lc_inv);
                    let step = Poly2::monomial(ring, qm, qc.clone()).mul(ring, d);
                    current = current.sub(ring, &step);
                    debug_assert!(!current.terms.contains_key(&m));
                    quot.insert(qm, qc);
                }
                None => {
                    rem.insert(m, c.clone());
                    current.terms.remove(&m);
                }
            }
        }
        Ok((Poly2 { terms: quot }, Poly2 { terms: rem }))
    }

    pub fn map_coeffs<D, F>(&self, f: F) -> Poly2<D>
    where
        D: Clone + PartialEq + std::fmt::Debug,
        F: Fn(&C) -> D,
    {
        Poly2 {
            terms: self.terms.iter().map(|(m, c)| (*m, f(c))).collect(),
        }
    }

    /// Drops coefficients that became zero after an external rewrite.
    pub fn renormalize<R: CoeffRing<Elem = C>>(mut self, ring: &R) -> Self {
        self.terms.retain(|_, c| !ring.is_zero(c));
        self
    }
}

/// Evaluates a univariate polynomial at a bivariate argument (Horner).
pub fn eval_unipoly_at_poly2<R: CoeffRing>(
    ring: &R,
    q: &UniPoly<R::Elem>,
    arg: &Poly2<R::Elem>,
) -> Poly2<R::Elem> {
    let mut acc = Poly2::zero();
    for c in q.coeffs().iter().rev() {
        acc = acc
            .mul(ring, arg)
            .add(ring, &Poly2::constant(ring, c.clone()));
    }
    acc
}
