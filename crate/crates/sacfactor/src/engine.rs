//! The peak-reduction decision procedure.
//!
//! A morphism pair is reduced by elementary transformations: dividing a
//! component (shifted by a constant) by the other component (shifted by
//! a constant), adding a polynomial in the other component, or swapping.
//! Each candidate move must strictly decrease the sum of the component
//! degrees, which bounds the exhaustive search by the initial degree sum.
//!
//! Division moves are found symbolically: the shift of the divisor is a
//! fresh parameter b, long division collects a univariate constraint
//! system in b, and its gcd describes exactly the admissible shifts. In
//! closure mode a root of the gcd is adjoined to the parameter tower; in
//! rational mode only its rational roots are used.

use std::fmt;

use crate::poly2::{eval_unipoly_at_poly2, Monomial, Poly2};
use crate::ring::{CoeffRing, DivError, Rat};
use crate::text;
use crate::tower::{AdjoinFail, Elem, FieldCtx, Mode, Split, ZeroTest};
use crate::unipoly::{UniPoly, UniRing};

/// A pair of nonconstant polynomials with coefficients in a tower
/// context; the object the elementary transformations act on.
#[derive(Clone, Debug, PartialEq)]
pub struct MorphismPair {
    pub u: Poly2<Elem>,
    pub v: Poly2<Elem>,
    pub ctx: FieldCtx,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    U,
    V,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::U => Side::V,
            Side::V => Side::U,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::U => "u",
            Side::V => "v",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One elementary transformation with its parameters.
///
/// `Div1` replaces the chosen component by `(component + a) / (other + b)`
/// and is only recorded when that quotient is an exact polynomial.
/// `Sub2` replaces it by `component + q(other)`. `Swap` exchanges the
/// components.
#[derive(Clone, Debug, PartialEq)]
pub enum EtStep {
    Div1 { side: Side, a: Elem, b: Elem },
    Sub2 { side: Side, q: UniPoly<Elem> },
    Swap,
}

impl EtStep {
    pub fn describe(&self) -> String {
        match self {
            EtStep::Div1 { side, a, b } => format!(
                "div1 on {}: ({0} + {1}) / ({2} + {3})",
                side,
                text::render_elem(a),
                side.other(),
                text::render_elem(b)
            ),
            EtStep::Sub2 { side, q } => format!(
                "sub2 on {}: {0} + q({1}) with q(t) = {2}",
                side,
                side.other(),
                text::render_unipoly(q, "t")
            ),
            EtStep::Swap => "swap".to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Yes,
    No,
    Undecided,
}

/// Search counters reported in certificates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub max_depth: u32,
    pub splits: u64,
}

/// A trace entry: the applied step and the context in force afterwards
/// (refinements and adjunctions included).
#[derive(Clone, Debug)]
pub struct TraceEntry {
    pub step: EtStep,
    pub ctx: FieldCtx,
}

/// Why a move family produced nothing at the root, for refusal reports.
#[derive(Clone, Debug)]
pub struct MoveReport {
    pub family: String,
    pub reason: String,
    pub gcd: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Decision {
    pub outcome: Outcome,
    pub trace: Vec<TraceEntry>,
    /// The terminal affine pair for YES decisions.
    pub final_pair: Option<MorphismPair>,
    pub refusal: Vec<MoveReport>,
    pub stats: SearchStats,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EngineError {
    /// A component of the input pair is constant.
    ConstantComponent,
    /// The divisibility constraint system vanished identically, which
    /// cannot happen for a nonconstant divisor of positive degree.
    SymbolicUnderdetermined,
    Internal(String),
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::ConstantComponent => {
                write!(f, "both components of the pair must be nonconstant")
            }
            EngineError::SymbolicUnderdetermined => {
                write!(f, "divisibility system is identically zero")
            }
            EngineError::Internal(msg) => write!(f, "internal error: {}", msg),
        }
    }
}

impl std::error::Error for EngineError {}

/// Errors from applying a single explicit step.
#[derive(Clone, Debug, PartialEq)]
pub enum StepError {
    /// The division left a nonzero remainder.
    NotDivisible,
    /// The transformed component would be constant.
    ConstantComponent,
    /// The divisor's leading coefficient is ambiguous over the current
    /// tower (a finer context would be needed).
    AmbiguousLead,
}

impl fmt::Display for StepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepError::NotDivisible => write!(f, "remainder nonzero: ratio is not a polynomial"),
            StepError::ConstantComponent => {
                write!(f, "step rejected: component would become constant")
            }
            StepError::AmbiguousLead => {
                write!(f, "leading coefficient is ambiguous over the tower")
            }
        }
    }
}

impl std::error::Error for StepError {}

impl MorphismPair {
    pub fn new(ctx: FieldCtx, u: Poly2<Elem>, v: Poly2<Elem>) -> Result<Self, EngineError> {
        if u.is_constant() || v.is_constant() {
            return Err(EngineError::ConstantComponent);
        }
        Ok(MorphismPair { u, v, ctx })
    }

    pub fn from_q(ctx: FieldCtx, u: &Poly2<Rat>, v: &Poly2<Rat>) -> Result<Self, EngineError> {
        let lu = ctx.lift_qpoly(u);
        let lv = ctx.lift_qpoly(v);
        MorphismPair::new(ctx, lu, lv)
    }

    pub fn component(&self, side: Side) -> &Poly2<Elem> {
        match side {
            Side::U => &self.u,
            Side::V => &self.v,
        }
    }

    fn with_component(&self, side: Side, p: Poly2<Elem>) -> MorphismPair {
        let mut out = self.clone();
        match side {
            Side::U => out.u = p,
            Side::V => out.v = p,
        }
        out
    }

    /// Re-normalizes both components into a refined branch context.
    /// Returns `None` when a component collapses to a constant there.
    pub fn into_ctx(&self, ctx: &FieldCtx) -> Option<MorphismPair> {
        let u = self
            .u
            .map_coeffs(|c| ctx.normalize_elem(c))
            .renormalize(ctx);
        let v = self
            .v
            .map_coeffs(|c| ctx.normalize_elem(c))
            .renormalize(ctx);
        if u.is_constant() || v.is_constant() {
            return None;
        }
        Some(MorphismPair {
            u,
            v,
            ctx: ctx.clone(),
        })
    }
}

/// Total degree of a nonconstant polynomial.
fn deg_of(p: &Poly2<Elem>) -> u32 {
    p.total_degree().finite().expect("nonconstant component")
}

/// The complexity measure the search strictly decreases.
pub fn degree_sum(pair: &MorphismPair) -> u32 {
    deg_of(&pair.u) + deg_of(&pair.v)
}

// ----- semantic zero tests over the tower ------------------------------------

enum PolyZero {
    Yes,
    No,
    Fork(Split),
}

/// Whether `p` vanishes at every point of the context. Coefficients are
/// tested in descending term order; a mixed coefficient forks.
fn poly_zero_test(ctx: &FieldCtx, p: &Poly2<Elem>) -> PolyZero {
    for (_, c) in p.terms().rev() {
        match ctx.zero_test(c) {
            ZeroTest::Zero => continue,
            ZeroTest::NonZero => return PolyZero::No,
            ZeroTest::Split(s) => return PolyZero::Fork(s),
        }
    }
    PolyZero::Yes
}

enum Stabilized {
    Ready(MorphismPair),
    Fork(Split),
}

/// Ensures the degrees of both components are honest at every point of
/// the context: every leading-form coefficient must be nonzero
/// everywhere, otherwise the node forks into refined branches where the
/// components re-normalize.
fn stabilize(pair: &MorphismPair) -> Stabilized {
    for side in [Side::U, Side::V] {
        let lf = pair
            .component(side)
            .leading_form()
            .expect("nonconstant component");
        for (_, c) in lf.terms().rev() {
            match pair.ctx.zero_test(c) {
                ZeroTest::NonZero => {}
                ZeroTest::Zero => unreachable!("stored coefficients are canonical nonzero"),
                ZeroTest::Split(s) => return Stabilized::Fork(s),
            }
        }
    }
    Stabilized::Ready(pair.clone())
}

// ----- affine terminal check ---------------------------------------------------

pub enum AffineCheck {
    Yes,
    No,
    Fork(Split),
}

/// True when both components have degree at most one and the linear
/// part has invertible determinant. The determinant test is a tower
/// zero test and may fork.
pub fn affine_check(pair: &MorphismPair) -> AffineCheck {
    if deg_of(&pair.u) > 1 || deg_of(&pair.v) > 1 {
        return AffineCheck::No;
    }
    let ctx = &pair.ctx;
    let lin = |p: &Poly2<Elem>, m: Monomial| p.coeff(&m).cloned().unwrap_or_else(|| ctx.zero());
    let ux = lin(&pair.u, Monomial::new(1, 0));
    let uy = lin(&pair.u, Monomial::new(0, 1));
    let vx = lin(&pair.v, Monomial::new(1, 0));
    let vy = lin(&pair.v, Monomial::new(0, 1));
    let det = ctx.sub(&ctx.mul(&ux, &vy), &ctx.mul(&uy, &vx));
    match ctx.zero_test(&det) {
        ZeroTest::Zero => AffineCheck::No,
        ZeroTest::NonZero => AffineCheck::Yes,
        ZeroTest::Split(s) => AffineCheck::Fork(s),
    }
}

/// Split-free affine test for verification: the determinant must be
/// invertible outright over the recorded tower.
pub fn is_affine_auto_strict(pair: &MorphismPair) -> bool {
    match affine_check(pair) {
        AffineCheck::Yes => true,
        AffineCheck::No | AffineCheck::Fork(_) => false,
    }
}

// ----- the additive move (degree cancellation by a power) ---------------------

enum Et2Check {
    Reducible {
        q: UniPoly<Elem>,
        reduced: Poly2<Elem>,
    },
    DegreeNotDivisible {
        target_deg: u32,
        other_deg: u32,
    },
    LeadingFormMismatch,
    Fork(Split),
}

/// Decides whether some polynomial q makes `target + q(other)` drop in
/// degree. Only `q(t) = -c*t^k` with `k = deg target / deg other` can
/// cancel the top degree, and then only when the leading form of the
/// target is the matching scalar multiple of the k-th power of the
/// other's leading form.
fn et2_check(ctx: &FieldCtx, target: &Poly2<Elem>, other: &Poly2<Elem>) -> Et2Check {
    let dt = deg_of(target);
    let do_ = deg_of(other);
    if do_ > dt || !dt.is_multiple_of(do_) {
        return Et2Check::DegreeNotDivisible {
            target_deg: dt,
            other_deg: do_,
        };
    }
    let k = dt / do_;
    let power = other.pow(ctx, k);
    let lf_t = target.leading_form().expect("nonconstant");
    let lf_p = power.leading_form().expect("nonconstant");
    let lc_t = target.leading_coeff().unwrap().clone();
    let lc_p = power.leading_coeff().unwrap().clone();
    // Cross-multiplied cancellation test avoids inverting before the
    // match is known: lf_t * lc_p == lf_p * lc_t at every point.
    let diff = lf_t.scale(ctx, &lc_p).sub(ctx, &lf_p.scale(ctx, &lc_t));
    match poly_zero_test(ctx, &diff) {
        PolyZero::Fork(s) => Et2Check::Fork(s),
        PolyZero::No => Et2Check::LeadingFormMismatch,
        PolyZero::Yes => {
            let lc_p_inv = match ctx.inv(&lc_p) {
                Ok(v) => v,
                Err(crate::ring::InvError::Refine(s)) => return Et2Check::Fork(s),
                Err(_) => unreachable!("stabilized leading coefficient"),
            };
            let lambda = ctx.mul(&lc_t, &lc_p_inv);
            let q = UniPoly::constant(ctx, ctx.neg(&lambda)).shift_up(ctx, k as usize);
            let reduced = target.sub(ctx, &power.scale(ctx, &lambda));
            debug_assert!(
                reduced.total_degree() < target.total_degree(),
                "cancellation must drop the degree"
            );
            Et2Check::Reducible { q, reduced }
        }
    }
}

/// Public form of the additive-move test: the list of per-branch
/// answers, a single entry unless the context had to split.
pub fn et2_reducible(
    ctx: &FieldCtx,
    target: &Poly2<Elem>,
    other: &Poly2<Elem>,
) -> Vec<(FieldCtx, Option<UniPoly<Elem>>)> {
    match et2_check(ctx, target, other) {
        Et2Check::Reducible { q, .. } => vec![(ctx.clone(), Some(q))],
        Et2Check::DegreeNotDivisible { .. } | Et2Check::LeadingFormMismatch => {
            vec![(ctx.clone(), None)]
        }
        Et2Check::Fork(split) => {
            let mut out = Vec::new();
            for bctx in split.branches {
                let bt = target
                    .map_coeffs(|c| bctx.normalize_elem(c))
                    .renormalize(&bctx);
                let bo = other
                    .map_coeffs(|c| bctx.normalize_elem(c))
                    .renormalize(&bctx);
                if bt.is_constant() || bo.is_constant() {
                    out.push((bctx, None));
                    continue;
                }
                out.extend(et2_reducible(&bctx, &bt, &bo));
            }
            out
        }
    }
}

// ----- the division move (parametric divisibility) -----------------------------

/// One admissible division: in `ctx`, `(num + a)` is exactly divisible
/// by `(den + b)` with the recorded quotient.
#[derive(Clone, Debug)]
pub struct DivSolution {
    pub ctx: FieldCtx,
    pub a: Elem,
    pub b: Elem,
    pub quotient: Poly2<Elem>,
    /// The constraint gcd whose root b is, rendered for reports.
    pub gcd: String,
}

/// Outcome of the divisibility analysis for one direction.
#[derive(Clone, Debug)]
pub struct DivScan {
    pub solutions: Vec<DivSolution>,
    /// Rendered constraint gcds with no admissible root (per branch).
    pub empty_systems: Vec<String>,
}

/// Solves for all shifts (a, b) in the mode's field such that
/// `num + a` is divisible by `den + b`.
///
/// The shift b is treated as a fresh symbol: long division of `num` by
/// `den + b` over polynomials in b yields a remainder whose nonconstant
/// monomial coefficients are univariate constraints on b, while the
/// constant coefficient determines `a = -r00(b)`. The gcd of the
/// constraints has exactly the admissible b as roots: rational roots in
/// rational mode, an adjoined generator (or an explicit tower element,
/// when the gcd's squarefree part is linear) in closure mode.
pub fn solve_div(
    num: &Poly2<Elem>,
    den: &Poly2<Elem>,
    ctx: &FieldCtx,
    mode: Mode,
    stats: &mut SearchStats,
) -> Result<DivScan, EngineError> {
    debug_assert!(deg_of(num) > deg_of(den) && deg_of(den) >= 1);
    let uni = UniRing(ctx);
    let lift = |p: &Poly2<Elem>| p.map_coeffs(|c| UniPoly::constant(ctx, c.clone()));
    let num_l = lift(num);
    let den_b = lift(den).add(&uni, &Poly2::constant(&uni, UniPoly::var(ctx)));
    let (quot_sym, rem) = match num_l.divide_by(&uni, &den_b) {
        Ok(qr) => qr,
        Err(DivError::Refine(split)) => {
            // The divisor's leading coefficient needs a finer context.
            stats.splits += 1;
            let mut merged = DivScan {
                solutions: Vec::new(),
                empty_systems: Vec::new(),
            };
            for bctx in split.branches {
                let bn = num.map_coeffs(|c| bctx.normalize_elem(c)).renormalize(&bctx);
                let bd = den.map_coeffs(|c| bctx.normalize_elem(c)).renormalize(&bctx);
                match (bn.total_degree().finite(), bd.total_degree().finite()) {
                    (Some(dn), Some(dd)) if dn > dd && dd >= 1 => {
                        let sub = solve_div(&bn, &bd, &bctx, mode, stats)?;
                        merged.solutions.extend(sub.solutions);
                        merged.empty_systems.extend(sub.empty_systems);
                    }
                    _ => {}
                }
            }
            return Ok(merged);
        }
        Err(e) => {
            return Err(EngineError::Internal(format!(
                "division by a shifted component failed: {:?}",
                e
            )))
        }
    };
    let mut constraints = Vec::new();
    let mut r00 = UniPoly::zero();
    for (m, c) in rem.terms() {
        if m.is_unit() {
            r00 = c.clone();
        } else {
            constraints.push(c.clone());
        }
    }
    let g = match ctx.uni_gcd(&constraints) {
        Ok(g) => g,
        Err(split) => {
            stats.splits += 1;
            return solve_div_branches(num, den, split, mode, stats);
        }
    };
    if g.is_zero() {
        // Unconstrained: the remainder is constant for every shift,
        // which happens exactly when num is a univariate polynomial in
        // den. Every shift then gives an exact quotient of the same
        // degree, and no successor in the family can ever reach an
        // automorphism (both components stay inside one univariate
        // image), so the shift b = 0 is a faithful representative.
        return Ok(DivScan {
            solutions: vec![make_solution(ctx, &quot_sym, &r00, ctx.zero(), "0")],
            empty_systems: Vec::new(),
        });
    }
    let gcd_text = text::render_unipoly(&g, "b");
    if g.is_constant() {
        return Ok(DivScan {
            solutions: Vec::new(),
            empty_systems: vec![gcd_text],
        });
    }
    let s = match ctx.squarefree_part(&g) {
        Ok(s) => s,
        Err(split) => {
            stats.splits += 1;
            return solve_div_branches(num, den, split, mode, stats);
        }
    };
    let mut solutions = Vec::new();
    let mut empty_systems = Vec::new();
    match mode {
        Mode::Rational => {
            let s_q = crate::tower::unipoly_to_rat(&s)
                .expect("rational mode carries no generators");
            let roots = crate::tower::rational_roots(&s_q);
            if roots.is_empty() {
                empty_systems.push(gcd_text.clone());
            }
            for root in roots {
                let b = Elem::from_rat(root);
                solutions.push(make_solution(ctx, &quot_sym, &r00, b, &gcd_text));
            }
        }
        Mode::Closure => {
            if s.deg() == Some(1) {
                // Monic linear part pins b to an explicit element.
                let b = ctx.neg(&s.coeff(ctx, 0));
                solutions.push(make_solution(ctx, &quot_sym, &r00, b, &gcd_text));
            } else {
                match ctx.adjoin(&s) {
                    Ok(ext) => {
                        let b = ext.gen_elem(ext.height() - 1);
                        let quot_ext = quot_sym
                            .map_coeffs(|c| c.map_coeffs(|e| ext.normalize_elem(e)).renormalize(&ext));
                        let r00_ext =
                            r00.map_coeffs(|e| ext.normalize_elem(e)).renormalize(&ext);
                        solutions.push(make_solution(&ext, &quot_ext, &r00_ext, b, &gcd_text));
                    }
                    Err(AdjoinFail::Split(split)) => {
                        stats.splits += 1;
                        return solve_div_branches(num, den, split, mode, stats);
                    }
                    Err(e) => {
                        return Err(EngineError::Internal(format!(
                            "adjoining a nonconstant squarefree part failed: {:?}",
                            e
                        )))
                    }
                }
            }
        }
    }
    Ok(DivScan {
        solutions,
        empty_systems,
    })
}

/// Re-runs the divisibility analysis in each branch of a split and
/// merges the outcomes in branch order.
fn solve_div_branches(
    num: &Poly2<Elem>,
    den: &Poly2<Elem>,
    split: Split,
    mode: Mode,
    stats: &mut SearchStats,
) -> Result<DivScan, EngineError> {
    let mut merged = DivScan {
        solutions: Vec::new(),
        empty_systems: Vec::new(),
    };
    for bctx in split.branches {
        let bn = num.map_coeffs(|c| bctx.normalize_elem(c)).renormalize(&bctx);
        let bd = den.map_coeffs(|c| bctx.normalize_elem(c)).renormalize(&bctx);
        match (bn.total_degree().finite(), bd.total_degree().finite()) {
            (Some(dn), Some(dd)) if dn > dd && dd >= 1 => {
                let sub = solve_div(&bn, &bd, &bctx, mode, stats)?;
                merged.solutions.extend(sub.solutions);
                merged.empty_systems.extend(sub.empty_systems);
            }
            _ => {}
        }
    }
    Ok(merged)
}

/// Instantiates the symbolic quotient and the equation a = -r00(b) at a
/// concrete shift.
fn make_solution(
    ctx: &FieldCtx,
    quot_sym: &Poly2<UniPoly<Elem>>,
    r00: &UniPoly<Elem>,
    b: Elem,
    gcd_text: &str,
) -> DivSolution {
    let a = ctx.neg(&r00.eval(ctx, &b));
    let quotient = quot_sym.map_coeffs(|c| c.eval(ctx, &b)).renormalize(ctx);
    DivSolution {
        ctx: ctx.clone(),
        a,
        b,
        quotient,
        gcd: gcd_text.to_string(),
    }
}

// ----- applying steps -----------------------------------------------------------

/// Applies one elementary transformation, validating divisibility and
/// the nonconstant-component invariant.
pub fn apply_step(pair: &MorphismPair, step: &EtStep) -> Result<MorphismPair, StepError> {
    let ctx = &pair.ctx;
    match step {
        EtStep::Swap => Ok(MorphismPair {
            u: pair.v.clone(),
            v: pair.u.clone(),
            ctx: ctx.clone(),
        }),
        EtStep::Sub2 { side, q } => {
            let target = pair.component(*side);
            let other = pair.component(side.other());
            let image = target.add(ctx, &eval_unipoly_at_poly2(ctx, q, other));
            if image.is_constant() {
                return Err(StepError::ConstantComponent);
            }
            Ok(pair.with_component(*side, image))
        }
        EtStep::Div1 { side, a, b } => {
            let target = pair.component(*side);
            let other = pair.component(side.other());
            let num = target.add_constant(ctx, a);
            let den = other.add_constant(ctx, b);
            if den.is_zero() {
                return Err(StepError::NotDivisible);
            }
            let (q, r) = match num.divide_by(ctx, &den) {
                Ok(qr) => qr,
                Err(DivError::Refine(_)) => return Err(StepError::AmbiguousLead),
                Err(_) => return Err(StepError::NotDivisible),
            };
            if !r.is_zero() {
                return Err(StepError::NotDivisible);
            }
            if q.is_constant() {
                return Err(StepError::ConstantComponent);
            }
            Ok(pair.with_component(*side, q))
        }
    }
}

// ----- move enumeration ----------------------------------------------------------

/// One strictly degree-reducing move together with its successor pair
/// (in a possibly refined context).
#[derive(Clone, Debug)]
pub struct ReducingMove {
    pub step: EtStep,
    pub successor: MorphismPair,
    /// Constraint gcd for division moves, rendered.
    pub gcd: Option<String>,
}

/// The complete scan of the four move families at one pair.
#[derive(Clone, Debug)]
pub struct MoveScan {
    pub moves: Vec<ReducingMove>,
    pub reports: Vec<MoveReport>,
}

fn sub2_family(
    pair: &MorphismPair,
    side: Side,
    stats: &mut SearchStats,
    moves: &mut Vec<ReducingMove>,
    reasons: &mut Vec<String>,
) {
    let ctx = &pair.ctx;
    let target = pair.component(side);
    let other = pair.component(side.other());
    match et2_check(ctx, target, other) {
        Et2Check::Reducible { q, reduced } => {
            if reduced.is_constant() {
                reasons.push(format!(
                    "cancellation would leave a constant {} component",
                    side
                ));
                return;
            }
            moves.push(ReducingMove {
                step: EtStep::Sub2 { side, q },
                successor: pair.with_component(side, reduced),
                gcd: None,
            });
        }
        Et2Check::DegreeNotDivisible {
            target_deg,
            other_deg,
        } => reasons.push(format!(
            "degree {} of {} does not divide degree {} of {}",
            other_deg,
            side.other(),
            target_deg,
            side
        )),
        Et2Check::LeadingFormMismatch => reasons.push(format!(
            "leading form of {} is not a scalar multiple of the matching power of the leading form of {}",
            side,
            side.other()
        )),
        Et2Check::Fork(split) => {
            stats.splits += 1;
            for bctx in split.branches {
                match pair.into_ctx(&bctx) {
                    Some(bpair) => sub2_family(&bpair, side, stats, moves, reasons),
                    None => {
                        reasons.push("branch degenerates to a constant component".to_string())
                    }
                }
            }
        }
    }
}

fn div1_family(
    pair: &MorphismPair,
    side: Side,
    mode: Mode,
    stats: &mut SearchStats,
    moves: &mut Vec<ReducingMove>,
    reasons: &mut Vec<String>,
    gcds: &mut Vec<String>,
) -> Result<(), EngineError> {
    let num = pair.component(side);
    let den = pair.component(side.other());
    let dn = deg_of(num);
    let dd = deg_of(den);
    if dn <= dd {
        reasons.push(format!(
            "empty divisibility system: deg {} = {} is not above deg {} = {}, any exact quotient would be constant",
            side, dn, side.other(), dd
        ));
        return Ok(());
    }
    let scan = solve_div(num, den, &pair.ctx, mode, stats)?;
    if scan.solutions.is_empty() {
        let detail = if scan.empty_systems.is_empty() {
            "no admissible shift".to_string()
        } else {
            format!(
                "constraint gcd {} has no {} root",
                scan.empty_systems.join("; "),
                match mode {
                    Mode::Rational => "rational",
                    Mode::Closure => "admissible",
                }
            )
        };
        reasons.push(format!("empty divisibility system: {}", detail));
        gcds.extend(scan.empty_systems);
        return Ok(());
    }
    for sol in scan.solutions {
        if sol.quotient.is_constant() {
            reasons.push(format!(
                "exact quotient on {} is constant; successor pair invalid",
                side
            ));
            continue;
        }
        let successor = match pair.into_ctx(&sol.ctx) {
            Some(p) => p.with_component(side, sol.quotient.clone()),
            None => continue,
        };
        moves.push(ReducingMove {
            step: EtStep::Div1 {
                side,
                a: sol.a.clone(),
                b: sol.b.clone(),
            },
            successor,
            gcd: Some(sol.gcd.clone()),
        });
    }
    Ok(())
}

/// Enumerates every single elementary transformation that strictly
/// decreases the degree sum, in the fixed order: additive move on u,
/// additive move on v, division move on u, division move on v; division
/// branches in root-ascending/adjunction order. Swapping never changes
/// the degree sum and is never included.
pub fn reducing_moves_scan(
    pair: &MorphismPair,
    mode: Mode,
    stats: &mut SearchStats,
) -> Result<MoveScan, EngineError> {
    let mut moves = Vec::new();
    let mut reports = Vec::new();

    for side in [Side::U, Side::V] {
        let before = moves.len();
        let mut reasons = Vec::new();
        sub2_family(pair, side, stats, &mut moves, &mut reasons);
        reports.push(MoveReport {
            family: format!("sub2 on {}", side),
            reason: if moves.len() > before {
                format!("{} reducing move(s)", moves.len() - before)
            } else {
                reasons.join("; ")
            },
            gcd: None,
        });
    }
    for side in [Side::U, Side::V] {
        let before = moves.len();
        let mut reasons = Vec::new();
        let mut gcds = Vec::new();
        div1_family(pair, side, mode, stats, &mut moves, &mut reasons, &mut gcds)?;
        reports.push(MoveReport {
            family: format!("div1 on {}", side),
            reason: if moves.len() > before {
                format!("{} reducing move(s)", moves.len() - before)
            } else {
                reasons.join("; ")
            },
            gcd: if gcds.is_empty() {
                None
            } else {
                Some(gcds.join("; "))
            },
        });
    }
    debug_assert!(moves
        .iter()
        .all(|m| degree_sum(&m.successor) < degree_sum(pair)));
    Ok(MoveScan { moves, reports })
}

/// The spec surface: just the (step, successor) list.
pub fn reducing_moves(
    pair: &MorphismPair,
    mode: Mode,
) -> Result<Vec<(EtStep, MorphismPair)>, EngineError> {
    let mut stats = SearchStats::default();
    let scan = reducing_moves_scan(pair, mode, &mut stats)?;
    Ok(scan
        .moves
        .into_iter()
        .map(|m| (m.step, m.successor))
        .collect())
}

// ----- the decision search -------------------------------------------------------

enum SearchResult {
    Found {
        trace: Vec<TraceEntry>,
        final_pair: MorphismPair,
    },
    Exhausted,
    Truncated,
}

fn search(
    pair: &MorphismPair,
    depth: u32,
    bound: u32,
    trace: &mut Vec<TraceEntry>,
    mode: Mode,
    stats: &mut SearchStats,
) -> Result<SearchResult, EngineError> {
    stats.nodes += 1;
    stats.max_depth = stats.max_depth.max(depth);

    let stable = match stabilize(pair) {
        Stabilized::Ready(p) => p,
        Stabilized::Fork(split) => {
            stats.splits += 1;
            let mut truncated = false;
            for bctx in split.branches {
                let Some(bpair) = pair.into_ctx(&bctx) else {
                    continue;
                };
                match search(&bpair, depth, bound, trace, mode, stats)? {
                    SearchResult::Found { trace, final_pair } => {
                        return Ok(SearchResult::Found { trace, final_pair })
                    }
                    SearchResult::Truncated => truncated = true,
                    SearchResult::Exhausted => {}
                }
            }
            return Ok(if truncated {
                SearchResult::Truncated
            } else {
                SearchResult::Exhausted
            });
        }
    };

    match affine_check(&stable) {
        AffineCheck::Yes => {
            return Ok(SearchResult::Found {
                trace: trace.clone(),
                final_pair: stable,
            })
        }
        AffineCheck::Fork(split) => {
            stats.splits += 1;
            let mut truncated = false;
            for bctx in split.branches {
                let Some(bpair) = stable.into_ctx(&bctx) else {
                    continue;
                };
                match search(&bpair, depth, bound, trace, mode, stats)? {
                    SearchResult::Found { trace, final_pair } => {
                        return Ok(SearchResult::Found { trace, final_pair })
                    }
                    SearchResult::Truncated => truncated = true,
                    SearchResult::Exhausted => {}
                }
            }
            return Ok(if truncated {
                SearchResult::Truncated
            } else {
                SearchResult::Exhausted
            });
        }
        AffineCheck::No => {}
    }

    let scan = reducing_moves_scan(&stable, mode, stats)?;
    if scan.moves.is_empty() {
        return Ok(SearchResult::Exhausted);
    }
    if depth >= bound {
        return Ok(SearchResult::Truncated);
    }
    let mut truncated = false;
    for mv in scan.moves {
        trace.push(TraceEntry {
            step: mv.step.clone(),
            ctx: mv.successor.ctx.clone(),
        });
        match search(&mv.successor, depth + 1, bound, trace, mode, stats)? {
            SearchResult::Found { trace, final_pair } => {
                return Ok(SearchResult::Found { trace, final_pair })
            }
            SearchResult::Truncated => truncated = true,
            SearchResult::Exhausted => {}
        }
        trace.pop();
    }
    Ok(if truncated {
        SearchResult::Truncated
    } else {
        SearchResult::Exhausted
    })
}

/// Decides whether the pair is a product of simple affine contractions.
///
/// Depth-first exhaustive search over strictly degree-reducing moves;
/// the depth is bounded by `degree_sum - 2`, so the search is finite. A
/// YES carries the step trace. A NO at the root carries the per-family
/// refusal report. When candidate moves existed but every branch died,
/// closure mode concludes NO while rational mode reports UNDECIDED: over
/// a non-closed field only the one-step test at the root is conclusive.
pub fn decide(
    u: &Poly2<Rat>,
    v: &Poly2<Rat>,
    mode: Mode,
    max_depth: Option<u32>,
) -> Result<Decision, EngineError> {
    let ctx = FieldCtx::new(mode);
    let root = MorphismPair::from_q(ctx, u, v)?;
    let ds = degree_sum(&root);
    let proven_bound = ds.saturating_sub(2);
    let bound = max_depth.unwrap_or(proven_bound);
    let mut stats = SearchStats {
        nodes: 1,
        ..SearchStats::default()
    };

    // The root is over Q: no stabilization or determinant forks here.
    if let AffineCheck::Yes = affine_check(&root) {
        return Ok(Decision {
            outcome: Outcome::Yes,
            trace: Vec::new(),
            final_pair: Some(root),
            refusal: Vec::new(),
            stats,
        });
    }

    let scan = reducing_moves_scan(&root, mode, &mut stats)?;
    let root_had_moves = !scan.moves.is_empty();
    let mut truncated = false;
    if bound > 0 {
        for mv in &scan.moves {
            let mut trace = vec![TraceEntry {
                step: mv.step.clone(),
                ctx: mv.successor.ctx.clone(),
            }];
            match search(&mv.successor, 1, bound, &mut trace, mode, &mut stats)? {
                SearchResult::Found { trace, final_pair } => {
                    return Ok(Decision {
                        outcome: Outcome::Yes,
                        trace,
                        final_pair: Some(final_pair),
                        refusal: Vec::new(),
                        stats,
                    })
                }
                SearchResult::Truncated => truncated = true,
                SearchResult::Exhausted => {}
            }
        }
    } else {
        truncated = root_had_moves;
    }

    let mut refusal = scan.reports;
    let outcome = if truncated {
        refusal.push(MoveReport {
            family: "search".to_string(),
            reason: format!("truncated at depth bound {}", bound),
            gcd: None,
        });
        Outcome::Undecided
    } else if !root_had_moves {
        Outcome::No
    } else {
        match mode {
            Mode::Closure => Outcome::No,
            Mode::Rational => Outcome::Undecided,
        }
    };
    Ok(Decision {
        outcome,
        trace: Vec::new(),
        final_pair: None,
        refusal,
        stats,
    })
}
