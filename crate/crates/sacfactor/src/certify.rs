//! Certificates: the decision outcome as replayable evidence.
//!
//! A YES certificate carries the input pair, the tower relations, and
//! the trace of elementary transformations. The verifier here shares
//! only the step-application and polynomial arithmetic with the search:
//! `replay` re-applies every step under the recorded tower and checks
//! that the terminal pair is an affine automorphism, and `recompose`
//! rebuilds the input literally as a composition of simple affine
//! contractions. A NO or UNDECIDED certificate instead carries the
//! per-family refusal report from the root.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::engine::{
    apply_step, is_affine_auto_strict, Decision, EtStep, MorphismPair, Outcome, Side,
};
use crate::poly2::Poly2;
use crate::ring::{CoeffRing, Rat};
use crate::text;
use crate::tower::{Elem, FieldCtx, Mode};

pub const CERT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct CertError(pub String);

impl fmt::Display for CertError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "malformed certificate: {}", self.0)
    }
}

impl std::error::Error for CertError {}

fn malformed<T>(msg: impl Into<String>) -> Result<T, CertError> {
    Err(CertError(msg.into()))
}

// ----- data model ---------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputPair {
    pub u: String,
    pub v: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertMode {
    Rational,
    Closure,
}

impl From<Mode> for CertMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Rational => CertMode::Rational,
            Mode::Closure => CertMode::Closure,
        }
    }
}

impl From<CertMode> for Mode {
    fn from(m: CertMode) -> Self {
        match m {
            CertMode::Rational => Mode::Rational,
            CertMode::Closure => Mode::Closure,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertOutcome {
    Yes,
    No,
    Undecided,
}

impl From<Outcome> for CertOutcome {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::Yes => CertOutcome::Yes,
            Outcome::No => CertOutcome::No,
            Outcome::Undecided => CertOutcome::Undecided,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerGen {
    pub name: String,
    pub defining: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Div1,
    Sub2,
    Swap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepSide {
    U,
    V,
}

impl From<Side> for StepSide {
    fn from(s: Side) -> Self {
        match s {
            Side::U => StepSide::U,
            Side::V => StepSide::V,
        }
    }
}

impl From<StepSide> for Side {
    fn from(s: StepSide) -> Self {
        match s {
            StepSide::U => Side::U,
            StepSide::V => Side::V,
        }
    }
}

/// One encoded step; fields that do not apply to the kind are omitted.
/// `c` is accepted on division steps for forward compatibility (the
/// denominator becomes `c*other + b`); the engine only emits c = 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub kind: StepKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<StepSide>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefusalEntry {
    #[serde(rename = "move")]
    pub move_family: String,
    pub reason: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gcd: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertStats {
    pub nodes: u64,
    #[serde(rename = "maxDepth")]
    pub max_depth: u32,
    pub splits: u64,
}

/// The serialized decision. Canonical encoding is the compact JSON of
/// the fields in declaration order, so decode followed by encode is
/// byte-identical on certificates this crate produces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: u32,
    pub input: InputPair,
    pub mode: CertMode,
    pub outcome: CertOutcome,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tower: Vec<TowerGen>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceStep>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub refusal: Vec<RefusalEntry>,
    pub stats: CertStats,
}

impl Certificate {
    /// Serializes a finished decision. Step parameters are re-normalized
    /// in the terminal context so the recorded tower interprets them.
    pub fn from_decision(
        input_u: &Poly2<Rat>,
        input_v: &Poly2<Rat>,
        mode: Mode,
        decision: &Decision,
    ) -> Certificate {
        let final_ctx = decision
            .final_pair
            .as_ref()
            .map(|p| p.ctx.clone())
            .unwrap_or_else(|| FieldCtx::new(mode));
        let tower = final_ctx
            .generators()
            .iter()
            .enumerate()
            .map(|(i, g)| TowerGen {
                name: FieldCtx::gen_name(i),
                defining: text::render_unipoly(&g.defining, &FieldCtx::gen_name(i)),
            })
            .collect();
        let trace = decision
            .trace
            .iter()
            .map(|entry| encode_step(&final_ctx, &entry.step))
            .collect();
        let refusal = decision
            .refusal
            .iter()
            .map(|r| RefusalEntry {
                move_family: r.family.clone(),
                reason: r.reason.clone(),
                gcd: r.gcd.clone(),
            })
            .collect();
        Certificate {
            version: CERT_VERSION,
            input: InputPair {
                u: text::render_poly(input_u),
                v: text::render_poly(input_v),
            },
            mode: mode.into(),
            outcome: decision.outcome.into(),
            tower,
            trace,
            refusal,
            stats: CertStats {
                nodes: decision.stats.nodes,
                max_depth: decision.stats.max_depth,
                splits: decision.stats.splits,
            },
        }
    }

    pub fn encode(&self) -> String {
        serde_json::to_string(self).expect("certificate serialization cannot fail")
    }

    pub fn decode(data: &str) -> Result<Certificate, CertError> {
        let cert: Certificate =
            serde_json::from_str(data).map_err(|e| CertError(e.to_string()))?;
        if cert.version != CERT_VERSION {
            return malformed(format!("unsupported version {}", cert.version));
        }
        Ok(cert)
    }
}

fn encode_step(ctx: &FieldCtx, step: &EtStep) -> TraceStep {
    match step {
        EtStep::Div1 { side, a, b } => TraceStep {
            kind: StepKind::Div1,
            side: Some((*side).into()),
            a: Some(text::render_elem(&ctx.normalize_elem(a))),
            b: Some(text::render_elem(&ctx.normalize_elem(b))),
            c: None,
            q: None,
        },
        EtStep::Sub2 { side, q } => TraceStep {
            kind: StepKind::Sub2,
            side: Some((*side).into()),
            a: None,
            b: None,
            c: None,
            q: Some(text::render_unipoly(
                &q.map_coeffs(|c| ctx.normalize_elem(c)).renormalize(ctx),
                "t",
            )),
        },
        EtStep::Swap => TraceStep {
            kind: StepKind::Swap,
            side: None,
            a: None,
            b: None,
            c: None,
            q: None,
        },
    }
}

// ----- rebuilding recorded data ---------------------------------------------------

fn rebuild_ctx(cert: &Certificate) -> Result<FieldCtx, CertError> {
    let mode: Mode = cert.mode.into();
    if mode == Mode::Rational && !cert.tower.is_empty() {
        return malformed("rational-mode certificates carry no tower");
    }
    let mut ctx = FieldCtx::new(mode);
    for (i, g) in cert.tower.iter().enumerate() {
        let expected = FieldCtx::gen_name(i);
        if g.name != expected {
            return malformed(format!(
                "generator {} out of order: expected {}",
                g.name, expected
            ));
        }
        let defining = text::parse_unipoly(&ctx, &g.defining, &expected, i)
            .map_err(|e| CertError(format!("defining polynomial of {}: {}", expected, e)))?;
        ctx = ctx
            .with_defining(defining)
            .map_err(|e| CertError(format!("defining polynomial of {}: {}", expected, e)))?;
    }
    Ok(ctx)
}

/// A decoded step plus the optional denominator scale of a division.
struct ReplayStep {
    step: EtStep,
    scale: Option<Elem>,
}

fn decode_step(ctx: &FieldCtx, step: &TraceStep) -> Result<ReplayStep, CertError> {
    let side = || -> Result<Side, CertError> {
        step.side
            .map(Side::from)
            .ok_or_else(|| CertError("step is missing its side".to_string()))
    };
    let elem = |field: &Option<String>, name: &str| -> Result<Elem, CertError> {
        let textual = field
            .as_ref()
            .ok_or_else(|| CertError(format!("step is missing parameter {}", name)))?;
        text::parse_elem(ctx, textual)
            .map_err(|e| CertError(format!("parameter {}: {}", name, e)))
    };
    match step.kind {
        StepKind::Swap => Ok(ReplayStep {
            step: EtStep::Swap,
            scale: None,
        }),
        StepKind::Div1 => {
            let scale = match &step.c {
                None => None,
                Some(_) => Some(elem(&step.c, "c")?),
            };
            let scale = scale.filter(|c| *c != Elem::from_int(1));
            Ok(ReplayStep {
                step: EtStep::Div1 {
                    side: side()?,
                    a: elem(&step.a, "a")?,
                    b: elem(&step.b, "b")?,
                },
                scale,
            })
        }
        StepKind::Sub2 => {
            let qt = step
                .q
                .as_ref()
                .ok_or_else(|| CertError("sub2 step is missing q".to_string()))?;
            let q = text::parse_unipoly(ctx, qt, "t", ctx.height())
                .map_err(|e| CertError(format!("parameter q: {}", e)))?;
            Ok(ReplayStep {
                step: EtStep::Sub2 { side: side()?, q },
                scale: None,
            })
        }
    }
}

/// Applies a decoded step; a scaled division divides by `c*other + b`.
fn apply_replay_step(pair: &MorphismPair, rs: &ReplayStep) -> Option<MorphismPair> {
    let Some(c) = &rs.scale else {
        return apply_step(pair, &rs.step).ok();
    };
    let EtStep::Div1 { side, a, b } = &rs.step else {
        return None;
    };
    let ctx = &pair.ctx;
    let num = pair.component(*side).add_constant(ctx, a);
    let den = pair
        .component(side.other())
        .scale(ctx, c)
        .add_constant(ctx, b);
    if den.is_zero() {
        return None;
    }
    let (q, r) = num.divide_by(ctx, &den).ok()?;
    if !r.is_zero() || q.is_constant() {
        return None;
    }
    let mut next = pair.clone();
    match side {
        Side::U => next.u = q,
        Side::V => next.v = q,
    }
    Some(next)
}

fn parse_input_pair(cert: &Certificate, ctx: &FieldCtx) -> Result<MorphismPair, CertError> {
    let u = text::parse_poly(&cert.input.u).map_err(|e| CertError(format!("input u: {}", e)))?;
    let v = text::parse_poly(&cert.input.v).map_err(|e| CertError(format!("input v: {}", e)))?;
    MorphismPair::from_q(ctx.clone(), &u, &v)
        .map_err(|_| CertError("input components must be nonconstant".to_string()))
}

/// Replays the trace from the recorded input. Returns the terminal pair
/// when every division was exact; `None` when some step failed.
fn replay_to_final(cert: &Certificate) -> Result<Option<MorphismPair>, CertError> {
    let ctx = rebuild_ctx(cert)?;
    let mut pair = parse_input_pair(cert, &ctx)?;
    for raw in &cert.trace {
        let rs = decode_step(&ctx, raw)?;
        match apply_replay_step(&pair, &rs) {
            Some(next) => pair = next,
            None => return Ok(None),
        }
    }
    Ok(Some(pair))
}

/// True iff every recorded division is exact under the recorded tower
/// and the terminal pair is an affine automorphism.
pub fn replay(cert: &Certificate) -> Result<bool, CertError> {
    if cert.outcome != CertOutcome::Yes {
        return malformed("only yes certificates carry a replayable trace");
    }
    match replay_to_final(cert)? {
        Some(final_pair) => Ok(is_affine_auto_strict(&final_pair)),
        None => Ok(false),
    }
}

// ----- recomposition ---------------------------------------------------------------

/// One generalized simple affine contraction, given by the images of x
/// and y. Every factor is an affine automorphism, a one-variable
/// multiply-shift, or a swap, each itself a product of simple affine
/// contractions.
#[derive(Clone, Debug, PartialEq)]
pub struct SacFactor {
    pub x_image: Poly2<Elem>,
    pub y_image: Poly2<Elem>,
}

/// The contraction undone by a step: composing the successor pair with
/// this factor restores the predecessor.
pub fn step_to_contraction(ctx: &FieldCtx, step: &EtStep) -> SacFactor {
    contraction_with_scale(ctx, step, None)
}

fn contraction_with_scale(ctx: &FieldCtx, step: &EtStep, scale: Option<&Elem>) -> SacFactor {
    let x = Poly2::var_x(ctx);
    let y = Poly2::var_y(ctx);
    let scaled = |p: &Poly2<Elem>| match scale {
        None => p.clone(),
        Some(c) => p.scale(ctx, c),
    };
    match step {
        EtStep::Div1 { side: Side::U, a, b } => SacFactor {
            // x -> x*(c*y + b) - a
            x_image: x
                .mul(ctx, &scaled(&y).add_constant(ctx, b))
                .add_constant(ctx, &ctx.neg(a)),
            y_image: y,
        },
        EtStep::Div1 { side: Side::V, a, b } => SacFactor {
            x_image: x.clone(),
            // y -> y*(c*x + b) - a
            y_image: y
                .mul(ctx, &scaled(&x).add_constant(ctx, b))
                .add_constant(ctx, &ctx.neg(a)),
        },
        EtStep::Sub2 { side: Side::U, q } => SacFactor {
            // x -> x - q(y)
            x_image: x.sub(ctx, &crate::poly2::eval_unipoly_at_poly2(ctx, q, &y)),
            y_image: y,
        },
        EtStep::Sub2 { side: Side::V, q } => SacFactor {
            x_image: x.clone(),
            // y -> y - q(x)
            y_image: y.sub(ctx, &crate::poly2::eval_unipoly_at_poly2(ctx, q, &x)),
        },
        EtStep::Swap => SacFactor {
            x_image: y,
            y_image: x,
        },
    }
}

/// The literal factorization check: composes the terminal affine pair
/// with the contraction of every trace step, last step first, and
/// compares the result with the recorded input exactly.
pub fn recompose(cert: &Certificate) -> Result<bool, CertError> {
    if cert.outcome != CertOutcome::Yes {
        return malformed("only yes certificates recompose");
    }
    let ctx = rebuild_ctx(cert)?;
    let input = parse_input_pair(cert, &ctx)?;
    let Some(final_pair) = replay_to_final(cert)? else {
        return Ok(false);
    };
    let mut acc_u = final_pair.u;
    let mut acc_v = final_pair.v;
    for raw in cert.trace.iter().rev() {
        let rs = decode_step(&ctx, raw)?;
        let sigma = contraction_with_scale(&ctx, &rs.step, rs.scale.as_ref());
        let next_u = sigma.x_image.substitute(&ctx, &acc_u, &acc_v);
        let next_v = sigma.y_image.substitute(&ctx, &acc_u, &acc_v);
        acc_u = next_u;
        acc_v = next_v;
    }
    Ok(acc_u == input.u && acc_v == input.v)
}
