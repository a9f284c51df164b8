//! The computable fragment of the algebraic closure of the rationals.
//!
//! A context is a triangular tower of parameter extensions: each
//! generator `b1, b2, ...` is a root of a monic squarefree polynomial
//! over the previous level. Elements are nested polynomials reduced
//! modulo the defining relations, so representations are canonical.
//!
//! Because defining polynomials may be reducible, the tower is a product
//! of fields rather than a field. Zero tests and inversion therefore
//! follow dynamic evaluation: when a computation meets a zero divisor,
//! the context splits into finitely many refined branch contexts and the
//! computation is rerun per branch. Contexts are immutable; a split
//! always produces fresh ones.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::ring::{CoeffRing, InvError, NoSplit, Rat, QQ};
use crate::unipoly::UniPoly;

/// Which ground field parameter values are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Values stay in Q; no generators are ever adjoined.
    Rational,
    /// Values live in the algebraic closure, represented symbolically.
    Closure,
}

/// One adjoined parameter: a root of `defining`, a monic squarefree
/// polynomial over the levels below it.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub defining: UniPoly<Elem>,
}

/// A tower of parameter extensions of Q.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldCtx {
    mode: Mode,
    gens: Vec<Generator>,
}

/// An element of the tower: a rational, or a polynomial of positive
/// degree in the highest generator it mentions, with coefficients from
/// strictly lower levels. Reduction modulo the (monic) defining
/// polynomials makes this representation unique.
#[derive(Clone, Debug, PartialEq)]
pub enum Elem {
    Rat(Rat),
    Ext { level: usize, poly: UniPoly<Elem> },
}

impl Elem {
    pub fn from_int(n: i64) -> Elem {
        Elem::Rat(Rat::from_integer(n.into()))
    }

    pub fn from_rat(r: Rat) -> Elem {
        Elem::Rat(r)
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Elem::Rat(r) => Some(r),
            Elem::Ext { .. } => None,
        }
    }

    pub fn is_zero_repr(&self) -> bool {
        matches!(self, Elem::Rat(r) if r.is_zero())
    }

    /// Highest generator index mentioned, `None` for rationals.
    fn level(&self) -> Option<usize> {
        match self {
            Elem::Rat(_) => None,
            Elem::Ext { level, .. } => Some(*level),
        }
    }
}

/// Outcome of a semantic zero test.
#[derive(Clone, Debug)]
pub enum ZeroTest {
    /// Zero at every point of the context.
    Zero,
    /// Nonzero at every point of the context.
    NonZero,
    /// Zero on part of the context only; retry per branch.
    Split(Split),
}

/// Branch contexts produced when a zero divisor is met. The defining
/// polynomials of the branches at the split level multiply to the
/// pre-split defining polynomial, and every element valid in the parent
/// context re-normalizes into each branch.
#[derive(Clone, Debug)]
pub struct Split {
    pub branches: Vec<FieldCtx>,
}

#[derive(Clone, Debug)]
pub enum InvertFail {
    /// The element is zero throughout the context.
    Zero,
    Split(Split),
}

#[derive(Clone, Debug)]
pub enum AdjoinFail {
    /// Constant nonzero polynomial: no root exists.
    Constant,
    /// The zero polynomial constrains nothing.
    ZeroPolynomial,
    /// Squarefree-part computation hit a zero divisor at a lower level.
    Split(Split),
}

impl fmt::Display for InvertFail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvertFail::Zero => write!(f, "division by zero"),
            InvertFail::Split(s) => write!(f, "zero divisor: {} branches", s.branches.len()),
        }
    }
}

impl FieldCtx {
    pub fn rational() -> Self {
        FieldCtx {
            mode: Mode::Rational,
            gens: Vec::new(),
        }
    }

    pub fn closure() -> Self {
        FieldCtx {
            mode: Mode::Closure,
            gens: Vec::new(),
        }
    }

    pub fn new(mode: Mode) -> Self {
        FieldCtx {
            mode,
            gens: Vec::new(),
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn height(&self) -> usize {
        self.gens.len()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    /// Generator names are `b1, b2, ...` in adjunction order.
    pub fn gen_name(level: usize) -> String {
        format!("b{}", level + 1)
    }

    /// The `level`-th generator as a normalized element. Collapses to an
    /// explicit lower-level value when the defining polynomial is linear.
    pub fn gen_elem(&self, level: usize) -> Elem {
        assert!(level < self.gens.len());
        let poly = UniPoly::var(self);
        self.normalize_at(level, poly)
    }

    fn with_gen(&self, g: Generator) -> FieldCtx {
        let mut gens = self.gens.clone();
        gens.push(g);
        FieldCtx {
            mode: self.mode,
            gens,
        }
    }

    fn prefix(&self, height: usize) -> FieldCtx {
        FieldCtx {
            mode: self.mode,
            gens: self.gens[..height].to_vec(),
        }
    }

    // ----- element arithmetic ------------------------------------------------

    /// Views `e` as coefficients in generator `level` (degree 0 when `e`
    /// lives below that level).
    fn coeffs_at(e: &Elem, level: usize) -> Vec<Elem> {
        match e {
            Elem::Ext { level: k, poly } if *k == level => poly.coeffs().to_vec(),
            _ => vec![e.clone()],
        }
    }

    /// Rebuilds a canonical element from coefficients in generator
    /// `level`: trims, reduces modulo the defining polynomial, and
    /// unwraps degree-zero results to the lower level.
    fn normalize_at(&self, level: usize, poly: UniPoly<Elem>) -> Elem {
        let defining = &self.gens[level].defining;
        let reduced = if poly.deg() >= defining.deg() {
            // Defining polynomials are monic, so this never splits.
            let (_, r) = poly
                .div_rem(self, defining)
                .expect("reduction by a monic polynomial cannot fail");
            r
        } else {
            poly.renormalize(self)
        };
        match reduced.deg() {
            None => Elem::Rat(Rat::zero()),
            Some(0) => reduced.coeffs()[0].clone(),
            Some(_) => Elem::Ext {
                level,
                poly: reduced,
            },
        }
    }

    /// Re-normalizes an element after the context was refined. Safe on
    /// any element that was valid in a coarser version of this context.
    pub fn normalize_elem(&self, e: &Elem) -> Elem {
        match e {
            Elem::Rat(_) => e.clone(),
            Elem::Ext { level, poly } => {
                let mapped = poly.map_coeffs(|c| self.normalize_elem(c));
                self.normalize_at(*level, mapped)
            }
        }
    }

    fn elem_add(&self, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x + y),
            _ => {
                let level = a.level().into_iter().chain(b.level()).max().unwrap();
                let ca = Self::coeffs_at(a, level);
                let cb = Self::coeffs_at(b, level);
                let n = ca.len().max(cb.len());
                let zero = Elem::Rat(Rat::zero());
                let mut out = Vec::with_capacity(n);
                for i in 0..n {
                    out.push(self.elem_add(
                        ca.get(i).unwrap_or(&zero),
                        cb.get(i).unwrap_or(&zero),
                    ));
                }
                self.normalize_at(level, UniPoly::from_coeffs(self, out))
            }
        }
    }

    fn elem_mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x * y),
            _ => {
                let level = a.level().into_iter().chain(b.level()).max().unwrap();
                let pa = UniPoly::from_coeffs(self, Self::coeffs_at(a, level));
                let pb = UniPoly::from_coeffs(self, Self::coeffs_at(b, level));
                self.normalize_at(level, pa.mul(self, &pb))
            }
        }
    }

    fn elem_neg(&self, a: &Elem) -> Elem {
        match a {
            Elem::Rat(x) => Elem::Rat(-x),
            Elem::Ext { level, poly } => Elem::Ext {
                level: *level,
                poly: poly.map_coeffs(|c| self.elem_neg(c)),
            },
        }
    }

    // ----- zero test, inversion, gcd -----------------------------------------

    /// Decides whether `e` vanishes: everywhere, nowhere, or only on part
    /// of the context (in which case the returned split separates the
    /// cases, computed from the gcd with the defining polynomial).
    pub fn zero_test(&self, e: &Elem) -> ZeroTest {
        match e {
            Elem::Rat(r) => {
                if r.is_zero() {
                    ZeroTest::Zero
                } else {
                    ZeroTest::NonZero
                }
            }
            Elem::Ext { level, poly } => {
                let defining = self.gens[*level].defining.clone();
                let g = match self.euclid_gcd(poly.clone(), defining.clone()) {
                    Ok(g) => g,
                    Err(split) => return ZeroTest::Split(split),
                };
                match g.deg() {
                    // Canonical representations rule out g = defining.
                    None => unreachable!("gcd of a nonzero element is nonzero"),
                    Some(0) => ZeroTest::NonZero,
                    Some(_) => match self.split_defining(*level, &g) {
                        Ok(split) => ZeroTest::Split(split),
                        Err(split) => ZeroTest::Split(split),
                    },
                }
            }
        }
    }

    /// Multiplicative inverse via extended Euclid against the defining
    /// polynomial. Splits when `e` is a zero divisor (or when some
    /// intermediate leading coefficient is one).
    pub fn invert(&self, e: &Elem) -> Result<Elem, InvertFail> {
        match e {
            Elem::Rat(r) => {
                if r.is_zero() {
                    Err(InvertFail::Zero)
                } else {
                    Ok(Elem::Rat(r.recip()))
                }
            }
            Elem::Ext { level, poly } => {
                let defining = self.gens[*level].defining.clone();
                let (g, s) = self
                    .euclid_egcd(poly.clone(), defining)
                    .map_err(InvertFail::Split)?;
                match g.deg() {
                    None => unreachable!("gcd of a nonzero element is nonzero"),
                    Some(0) => {
                        // s * poly = g (mod defining); scale s by g^{-1}.
                        let c = g.coeffs()[0].clone();
                        let c_inv = match self.invert(&c) {
                            Ok(v) => v,
                            Err(InvertFail::Zero) => {
                                unreachable!("canonical gcd constant is nonzero")
                            }
                            Err(f) => return Err(f),
                        };
                        let scaled = s.scale(self, &c_inv);
                        Ok(self.normalize_at(*level, scaled))
                    }
                    Some(_) => match self.split_defining(*level, &g) {
                        Ok(split) => Err(InvertFail::Split(split)),
                        Err(split) => Err(InvertFail::Split(split)),
                    },
                }
            }
        }
    }

    /// Refines the context at `level` by the proper monic divisor `g` of
    /// the defining polynomial there, returning the split into the `g`
    /// branch(es) followed by the cofactor branch(es).
    fn split_defining(&self, level: usize, g: &UniPoly<Elem>) -> Result<Split, Split> {
        let defining = &self.gens[level].defining;
        let g = g.monic(self).map_err(|e| match e {
            InvError::Refine(s) => s,
            _ => unreachable!("splitting divisor has nonzero lead"),
        })?;
        let (cofactor, r) = defining.div_rem(self, &g).map_err(|e| match e {
            crate::ring::DivError::Refine(s) => s,
            _ => unreachable!("monic division"),
        })?;
        debug_assert!(r.is_zero(), "split divisor must divide the defining poly");
        let mut branches = self.refine_at(level, g);
        branches.extend(self.refine_at(level, cofactor));
        Ok(Split { branches })
    }

    /// Rebuilds the tower after replacing the defining polynomial at
    /// `level`. Higher defining polynomials are re-reduced and their
    /// squarefree parts recomputed, which may cascade into further
    /// splits; all resulting full-height contexts are returned in
    /// deterministic order.
    fn refine_at(&self, level: usize, new_defining: UniPoly<Elem>) -> Vec<FieldCtx> {
        let mut base = self.prefix(level);
        base = base.with_gen(Generator {
            defining: new_defining,
        });
        let mut work = vec![base];
        for old in &self.gens[level + 1..] {
            let mut done = Vec::new();
            // Depth-first so branch order follows discovery order.
            let mut pending: Vec<FieldCtx> = work.into_iter().rev().collect();
            while let Some(pctx) = pending.pop() {
                let m = old
                    .defining
                    .map_coeffs(|c| pctx.normalize_elem(c))
                    .renormalize(&pctx);
                debug_assert_eq!(m.deg(), old.defining.deg(), "monic lead is preserved");
                match pctx.squarefree_part(&m) {
                    Ok(s) => done.push(pctx.with_gen(Generator { defining: s })),
                    Err(split) => {
                        for b in split.branches.into_iter().rev() {
                            pending.push(b);
                        }
                    }
                }
            }
            work = done;
        }
        work
    }

    /// Plain Euclid over the tower; any zero divisor met while inverting
    /// a leading coefficient propagates as a split.
    fn euclid_gcd(
        &self,
        mut a: UniPoly<Elem>,
        mut b: UniPoly<Elem>,
    ) -> Result<UniPoly<Elem>, Split> {
        while !b.is_zero() {
            let (_, r) = a.div_rem(self, &b).map_err(|e| match e {
                crate::ring::DivError::Refine(s) => s,
                _ => unreachable!("canonical leads are nonzero"),
            })?;
            a = b;
            b = r;
        }
        Ok(a)
    }

    /// Extended Euclid tracking the first Bezout coefficient:
    /// returns `(g, s)` with `s*a = g` modulo `b`.
    fn euclid_egcd(
        &self,
        a: UniPoly<Elem>,
        b: UniPoly<Elem>,
    ) -> Result<(UniPoly<Elem>, UniPoly<Elem>), Split> {
        let map_err = |e| match e {
            crate::ring::DivError::Refine(s) => s,
            _ => unreachable!("canonical leads are nonzero"),
        };
        let one = UniPoly::constant(self, Elem::Rat(Rat::one()));
        let (mut r0, mut r1) = (a, b);
        let (mut s0, mut s1) = (one, UniPoly::zero());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(self, &r1).map_err(map_err)?;
            let s = s0.sub(self, &q.mul(self, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        Ok((r0, s0))
    }

    /// Monic gcd of a family; the zero polynomial imposes nothing, and
    /// the all-zero family returns zero ("no constraint").
    pub fn uni_gcd(&self, fs: &[UniPoly<Elem>]) -> Result<UniPoly<Elem>, Split> {
        let mut acc = UniPoly::zero();
        for f in fs {
            if f.is_zero() {
                continue;
            }
            acc = self.euclid_gcd(acc, f.clone())?;
        }
        if acc.is_zero() {
            return Ok(acc);
        }
        acc.monic(self).map_err(|e| match e {
            InvError::Refine(s) => s,
            _ => unreachable!("canonical lead is nonzero"),
        })
    }

    /// Monic squarefree part `f / gcd(f, f')`; valid in characteristic 0.
    pub fn squarefree_part(&self, f: &UniPoly<Elem>) -> Result<UniPoly<Elem>, Split> {
        let g = self.uni_gcd(&[f.clone(), f.derivative(self)])?;
        let reduced = if g.is_constant() {
            f.clone()
        } else {
            let (q, r) = f.div_rem(self, &g).map_err(|e| match e {
                crate::ring::DivError::Refine(s) => s,
                _ => unreachable!("monic gcd"),
            })?;
            debug_assert!(r.is_zero(), "gcd divides f exactly");
            q
        };
        reduced.monic(self).map_err(|e| match e {
            InvError::Refine(s) => s,
            _ => unreachable!("canonical lead is nonzero"),
        })
    }

    /// Extends the tower by a root of `f`: the new generator's defining
    /// polynomial is the monic squarefree part of `f`.
    pub fn adjoin(&self, f: &UniPoly<Elem>) -> Result<FieldCtx, AdjoinFail> {
        assert!(
            self.mode == Mode::Closure,
            "parameters are only adjoined in closure mode"
        );
        if f.is_zero() {
            return Err(AdjoinFail::ZeroPolynomial);
        }
        if f.is_constant() {
            return Err(AdjoinFail::Constant);
        }
        let s = self.squarefree_part(f).map_err(AdjoinFail::Split)?;
        Ok(self.with_gen(Generator { defining: s }))
    }

    /// Lifts a polynomial over Q into this context.
    pub fn lift_qpoly(&self, p: &crate::poly2::Poly2<Rat>) -> crate::poly2::Poly2<Elem> {
        p.map_coeffs(|c| Elem::Rat(c.clone()))
    }

    /// Appends a recorded defining polynomial without re-deriving it,
    /// for verifiers replaying a serialized tower. Checks that the
    /// polynomial is monic, nonconstant, and only mentions lower levels;
    /// squarefreeness is not needed for replay arithmetic and is taken
    /// on trust.
    pub fn with_defining(&self, defining: UniPoly<Elem>) -> Result<FieldCtx, String> {
        let level = self.height();
        match defining.deg() {
            None | Some(0) => return Err("defining polynomial must be nonconstant".to_string()),
            Some(_) => {}
        }
        if defining.lead() != Some(&Elem::Rat(Rat::one())) {
            return Err("defining polynomial must be monic".to_string());
        }
        fn max_level(e: &Elem) -> Option<usize> {
            match e {
                Elem::Rat(_) => None,
                Elem::Ext { level, poly } => {
                    let inner = poly.coeffs().iter().filter_map(max_level).max();
                    Some(inner.map_or(*level, |i| i.max(*level)))
                }
            }
        }
        for c in defining.coeffs() {
            if let Some(l) = max_level(c) {
                if l >= level {
                    return Err(format!(
                        "coefficient of generator {} mentions generator {}",
                        Self::gen_name(level),
                        Self::gen_name(l)
                    ));
                }
            }
        }
        Ok(self.with_gen(Generator { defining }))
    }
}

impl CoeffRing for FieldCtx {
    type Elem = Elem;
    type Split = Split;

    fn zero(&self) -> Elem {
        Elem::Rat(Rat::zero())
    }

    fn one(&self) -> Elem {
        Elem::Rat(Rat::one())
    }

    fn int(&self, n: i64) -> Elem {
        Elem::from_int(n)
    }

    fn add(&self, a: &Elem, b: &Elem) -> Elem {
        self.elem_add(a, b)
    }

    fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.elem_add(a, &self.elem_neg(b))
    }

    fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        self.elem_mul(a, b)
    }

    fn neg(&self, a: &Elem) -> Elem {
        self.elem_neg(a)
    }

    fn is_zero(&self, a: &Elem) -> bool {
        a.is_zero_repr()
    }

    fn inv(&self, a: &Elem) -> Result<Elem, InvError<Split>> {
        self.invert(a).map_err(|e| match e {
            InvertFail::Zero => InvError::Zero,
            InvertFail::Split(s) => InvError::Refine(s),
        })
    }
}

// ----- rational roots ---------------------------------------------------------

/// Positive divisors of `n` (which must be positive) in ascending order.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    loop {
        let dd = &d * &d;
        if dd > *n {
            break;
        }
        if n.is_multiple_of(&d) {
            small.push(d.clone());
            let q = n / &d;
            if q != d {
                large.push(q);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// The complete, duplicate-free, ascending list of rational roots.
///
/// Clears denominators to integer coefficients, enumerates candidates
/// p/q with p dividing the constant term and q dividing the leading
/// coefficient, and verifies each by evaluation.
pub fn rational_roots(f: &UniPoly<Rat>) -> Vec<Rat> {
    assert!(!f.is_zero(), "the zero polynomial has every value as root");
    let mut roots = Vec::new();
    // Factor out t^v first; 0 is a root iff v > 0.
    let coeffs = f.coeffs();
    let v = coeffs
        .iter()
        .position(|c| !c.is_zero())
        .expect("nonzero polynomial");
    if v > 0 {
        roots.push(Rat::zero());
    }
    let reduced: Vec<Rat> = coeffs[v..].to_vec();
    if reduced.len() <= 1 {
        return roots;
    }
    // Clear denominators.
    let mut scale = BigInt::one();
    for c in &reduced {
        scale = scale.lcm(c.denom());
    }
    let ints: Vec<BigInt> = reduced
        .iter()
        .map(|c| (c * Rat::from_integer(scale.clone())).to_integer())
        .collect();
    let constant = ints[0].abs();
    let leading = ints.last().unwrap().abs();
    let eval = |x: &Rat| -> bool {
        let mut acc = Rat::zero();
        for c in reduced.iter().rev() {
            acc = acc * x + c;
        }
        acc.is_zero()
    };
    let mut found = std::collections::BTreeSet::new();
    for p in divisors(&constant) {
        for q in divisors(&leading) {
            for sign in [1i64, -1] {
                let cand = Rat::new(&p * BigInt::from(sign), q.clone());
                if found.contains(&cand) {
                    continue;
                }
                if eval(&cand) {
                    found.insert(cand);
                }
            }
        }
    }
    roots.extend(found);
    roots.sort();
    roots
}

/// Reads a tower polynomial as a polynomial over Q; `None` when any
/// coefficient involves a generator.
pub fn unipoly_to_rat(f: &UniPoly<Elem>) -> Option<UniPoly<Rat>> {
    let mut out = Vec::with_capacity(f.coeffs().len());
    for c in f.coeffs() {
        out.push(c.as_rat()?.clone());
    }
    Some(UniPoly::from_coeffs(&QQ, out))
}

impl From<NoSplit> for Split {
    fn from(s: NoSplit) -> Split {
        match s {}
    }
}
