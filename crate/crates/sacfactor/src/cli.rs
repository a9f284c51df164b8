//! Command implementations behind the binary: decide, verify, reduce,
//! and a line-oriented interactive session.
//!
//! Exit codes are part of the interface so shell pipelines can branch
//! on the decision: 0 = yes, 1 = no, 2 = undecided, 64 = input error.

use std::io::{BufRead, Write};

use crate::certify::{recompose, replay, Certificate, CertOutcome};
use crate::engine::{
    apply_step, decide, degree_sum, is_affine_auto_strict, reducing_moves_scan, Decision, EtStep,
    MorphismPair, Outcome, ReducingMove, SearchStats, Side, TraceEntry,
};
use crate::poly2::Poly2;
use crate::ring::Rat;
use crate::text;
use crate::tower::{FieldCtx, Mode};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_UNDECIDED: i32 = 2;
pub const EXIT_INPUT_ERROR: i32 = 64;

fn outcome_exit(outcome: Outcome) -> i32 {
    match outcome {
        Outcome::Yes => EXIT_YES,
        Outcome::No => EXIT_NO,
        Outcome::Undecided => EXIT_UNDECIDED,
    }
}

fn parse_input(
    label: &str,
    input: &str,
    err: &mut impl Write,
) -> Result<Poly2<Rat>, i32> {
    match text::parse_poly(input) {
        Ok(p) => Ok(p),
        Err(e) => {
            let _ = writeln!(err, "{}: {}", label, e);
            Err(EXIT_INPUT_ERROR)
        }
    }
}

pub struct DecideOpts {
    pub mode: Mode,
    pub json: bool,
    pub trace: bool,
    pub max_depth: Option<u32>,
}

pub fn cmd_decide(
    u_text: &str,
    v_text: &str,
    opts: &DecideOpts,
    out: &mut impl Write,
    err: &mut impl Write,
) -> i32 {
    let u = match parse_input("u", u_text, err) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let v = match parse_input("v", v_text, err) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let decision = match decide(&u, &v, opts.mode, opts.max_depth) {
        Ok(d) => d,
        Err(e) => {
            let _ = writeln!(err, "{}", e);
            return EXIT_INPUT_ERROR;
        }
    };
    if opts.trace {
        for (i, entry) in decision.trace.iter().enumerate() {
            let _ = writeln!(err, "step {}: {}", i + 1, entry.step.describe());
        }
    }
    let cert = Certificate::from_decision(&u, &v, opts.mode, &decision);
    if opts.json {
        let _ = writeln!(out, "{}", cert.encode());
    } else {
        match decision.outcome {
            Outcome::Yes => {
                let _ = writeln!(
                    out,
                    "YES: a product of simple affine contractions ({} step(s), {} node(s) searched)",
                    decision.trace.len(),
                    decision.stats.nodes
                );
            }
            Outcome::No => {
                let _ = writeln!(out, "NO: not a product of simple affine contractions");
                for r in &decision.refusal {
                    let _ = writeln!(out, "  - {}: {}", r.family, r.reason);
                }
            }
            Outcome::Undecided => {
                let _ = writeln!(
                    out,
                    "UNDECIDED: no reduction found over Q; only the root test is conclusive here"
                );
                for r in &decision.refusal {
                    let _ = writeln!(out, "  - {}: {}", r.family, r.reason);
                }
            }
        }
    }
    outcome_exit(decision.outcome)
}

pub fn cmd_verify(path: &str, out: &mut impl Write, err: &mut impl Write) -> i32 {
    let data = match std::fs::read_to_string(path) {
        Ok(d) => d,
        Err(e) => {
            let _ = writeln!(err, "cannot read {}: {}", path, e);
            return EXIT_INPUT_ERROR;
        }
    };
    let cert = match Certificate::decode(&data) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "{}", e);
            return EXIT_INPUT_ERROR;
        }
    };
    if cert.outcome != CertOutcome::Yes {
        let _ = writeln!(
            out,
            "certificate outcome is not yes: nothing to replay, refusal report stands on its own"
        );
        return EXIT_NO;
    }
    let replayed = match replay(&cert) {
        Ok(ok) => ok,
        Err(e) => {
            let _ = writeln!(err, "{}", e);
            return EXIT_INPUT_ERROR;
        }
    };
    let recomposed = match recompose(&cert) {
        Ok(ok) => ok,
        Err(e) => {
            let _ = writeln!(err, "{}", e);
            return EXIT_INPUT_ERROR;
        }
    };
    if replayed && recomposed {
        let _ = writeln!(out, "verified: replay and recomposition both succeed");
        EXIT_YES
    } else {
        let _ = writeln!(
            out,
            "verification failed: replay {}, recomposition {}",
            if replayed { "ok" } else { "failed" },
            if recomposed { "ok" } else { "failed" }
        );
        EXIT_NO
    }
}

fn describe_move(idx: usize, mv: &ReducingMove) -> String {
    let du = mv
        .successor
        .u
        .total_degree()
        .finite()
        .expect("nonconstant");
    let dv = mv
        .successor
        .v
        .total_degree()
        .finite()
        .expect("nonconstant");
    let mut line = format!(
        "{}. {} -> successor degrees ({}, {})",
        idx + 1,
        mv.step.describe(),
        du,
        dv
    );
    if let Some(g) = &mv.gcd {
        line.push_str(&format!(", constraint gcd {}", g));
    }
    line
}

pub fn cmd_reduce(
    u_text: &str,
    v_text: &str,
    mode: Mode,
    out: &mut impl Write,
    err: &mut impl Write,
) -> i32 {
    let u = match parse_input("u", u_text, err) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let v = match parse_input("v", v_text, err) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let pair = match MorphismPair::from_q(FieldCtx::new(mode), &u, &v) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "{}", e);
            return EXIT_INPUT_ERROR;
        }
    };
    let mut stats = SearchStats::default();
    let scan = match reducing_moves_scan(&pair, mode, &mut stats) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "{}", e);
            return EXIT_INPUT_ERROR;
        }
    };
    if scan.moves.is_empty() {
        let _ = writeln!(out, "no single move reduces the degree sum {}", degree_sum(&pair));
        for r in &scan.reports {
            let _ = writeln!(out, "  - {}: unavailable - {}", r.family, r.reason);
        }
        EXIT_NO
    } else {
        let _ = writeln!(
            out,
            "{} reducing move(s) from degree sum {}",
            scan.moves.len(),
            degree_sum(&pair)
        );
        for (i, mv) in scan.moves.iter().enumerate() {
            let _ = writeln!(out, "{}", describe_move(i, mv));
        }
        EXIT_YES
    }
}

// ----- interactive session ---------------------------------------------------------

struct Session {
    mode: Mode,
    input: Option<(Poly2<Rat>, Poly2<Rat>)>,
    state: Option<MorphismPair>,
    /// Applied steps with the state before each, newest last.
    history: Vec<(EtStep, MorphismPair)>,
    listed: Vec<ReducingMove>,
}

impl Session {
    fn new(mode: Mode) -> Self {
        Session {
            mode,
            input: None,
            state: None,
            history: Vec::new(),
            listed: Vec::new(),
        }
    }

    fn show(&self, out: &mut impl Write) {
        match &self.state {
            None => {
                let _ = writeln!(out, "no pair loaded; use: load (u, v)");
            }
            Some(p) => {
                let _ = writeln!(
                    out,
                    "u = {}",
                    text::render_ctx_poly(&p.u)
                );
                let _ = writeln!(
                    out,
                    "v = {}",
                    text::render_ctx_poly(&p.v)
                );
                let _ = writeln!(out, "degree sum = {}", degree_sum(p));
                if p.ctx.height() > 0 {
                    for (i, g) in p.ctx.generators().iter().enumerate() {
                        let name = FieldCtx::gen_name(i);
                        let _ = writeln!(
                            out,
                            "tower: {} with {} = 0",
                            name,
                            text::render_unipoly(&g.defining, &name)
                        );
                    }
                }
                if is_affine_auto_strict(p) {
                    let _ = writeln!(out, "the pair is an affine automorphism");
                }
            }
        }
    }
}

const REPL_HELP: &str = "commands:
  load (u, v)          load a pair of polynomials in x and y over Q
  moves                list the degree-reducing moves, numbered
  apply N              apply move N from the last listing
  apply div1 u|v A B   divide: (side + A) / (other + B); no spaces inside A or B
  apply sub2 u|v Q     add q(other) to the side, Q a polynomial in t
  apply swap           exchange the components
  undo                 revert the last applied step
  show                 print the pair, degree sum, and tower
  export FILE          write the session as a certificate
  help                 this text
  quit                 leave";

fn split_pair_text(body: &str) -> Option<(String, String)> {
    let trimmed = body.trim();
    let inner = trimmed
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .unwrap_or(trimmed);
    let mut depth = 0usize;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.checked_sub(1)?,
            ',' if depth == 0 => {
                return Some((inner[..i].to_string(), inner[i + 1..].to_string()));
            }
            _ => {}
        }
    }
    None
}

fn repl_apply(
    session: &mut Session,
    args: &[&str],
    out: &mut impl Write,
) -> Result<(), String> {
    let Some(state) = session.state.clone() else {
        return Err("no pair loaded".to_string());
    };
    let step = if args.len() == 1 {
        if let Ok(idx) = args[0].parse::<usize>() {
            let mv = session
                .listed
                .get(idx.checked_sub(1).ok_or("move numbers start at 1")?)
                .ok_or("no such move in the last listing")?;
            // The successor may live in a refined context; adopt it.
            session.history.push((mv.step.clone(), state));
            session.state = Some(mv.successor.clone());
            session.listed.clear();
            let _ = writeln!(out, "applied");
            return Ok(());
        }
        match args[0] {
            "swap" => EtStep::Swap,
            other => return Err(format!("unknown step '{}'", other)),
        }
    } else {
        let side = match args.get(1) {
            Some(&"u") => Side::U,
            Some(&"v") => Side::V,
            _ => return Err("expected a side: u or v".to_string()),
        };
        match args[0] {
            "div1" => {
                if args.len() != 4 {
                    return Err("usage: apply div1 u|v A B".to_string());
                }
                let ctx = &state.ctx;
                let a = text::parse_elem(ctx, args[2]).map_err(|e| e.to_string())?;
                let b = text::parse_elem(ctx, args[3]).map_err(|e| e.to_string())?;
                EtStep::Div1 { side, a, b }
            }
            "sub2" => {
                if args.len() < 3 {
                    return Err("usage: apply sub2 u|v Q".to_string());
                }
                let qt = args[2..].join(" ");
                let ctx = &state.ctx;
                let q = text::parse_unipoly(ctx, &qt, "t", ctx.height())
                    .map_err(|e| e.to_string())?;
                EtStep::Sub2 { side, q }
            }
            other => return Err(format!("unknown step '{}'", other)),
        }
    };
    let next = apply_step(&state, &step).map_err(|e| e.to_string())?;
    session.history.push((step, state));
    session.state = Some(next);
    session.listed.clear();
    let _ = writeln!(out, "applied");
    Ok(())
}

fn repl_export(session: &Session, path: &str) -> Result<String, String> {
    let (u, v) = session.input.as_ref().ok_or("no pair loaded")?;
    let state = session.state.as_ref().ok_or("no pair loaded")?;
    let outcome = if is_affine_auto_strict(state) {
        Outcome::Yes
    } else {
        Outcome::Undecided
    };
    let trace: Vec<TraceEntry> = session
        .history
        .iter()
        .map(|(step, _)| TraceEntry {
            step: step.clone(),
            ctx: state.ctx.clone(),
        })
        .collect();
    let steps = trace.len();
    let decision = Decision {
        outcome,
        trace,
        final_pair: Some(state.clone()),
        refusal: Vec::new(),
        stats: SearchStats {
            nodes: steps as u64,
            max_depth: steps as u32,
            splits: 0,
        },
    };
    let cert = Certificate::from_decision(u, v, session.mode, &decision);
    std::fs::write(path, cert.encode()).map_err(|e| e.to_string())?;
    Ok(format!(
        "wrote {} certificate to {}",
        match outcome {
            Outcome::Yes => "a yes",
            _ => "an undecided",
        },
        path
    ))
}

/// Runs the line-oriented session until quit or end of input.
pub fn cmd_repl(
    mode: Mode,
    input: impl BufRead,
    out: &mut impl Write,
    err: &mut impl Write,
) -> i32 {
    let mut session = Session::new(mode);
    let _ = writeln!(
        out,
        "interactive reduction over {}; 'help' lists commands",
        match mode {
            Mode::Rational => "Q",
            Mode::Closure => "the algebraic closure of Q",
        }
    );
    for line in input.lines() {
        let Ok(line) = line else { break };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (cmd, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match cmd {
            "quit" | "exit" => break,
            "help" => {
                let _ = writeln!(out, "{}", REPL_HELP);
            }
            "load" => match split_pair_text(rest) {
                None => {
                    let _ = writeln!(err, "usage: load (u, v)");
                }
                Some((ut, vt)) => {
                    let parsed = text::parse_poly(&ut).and_then(|u| {
                        text::parse_poly(&vt).map(|v| (u, v))
                    });
                    match parsed {
                        Err(e) => {
                            let _ = writeln!(err, "{}", e);
                        }
                        Ok((u, v)) => {
                            match MorphismPair::from_q(FieldCtx::new(mode), &u, &v) {
                                Err(e) => {
                                    let _ = writeln!(err, "{}", e);
                                }
                                Ok(pair) => {
                                    session.input = Some((u, v));
                                    session.state = Some(pair);
                                    session.history.clear();
                                    session.listed.clear();
                                    session.show(out);
                                }
                            }
                        }
                    }
                }
            },
            "moves" => match &session.state {
                None => {
                    let _ = writeln!(err, "no pair loaded");
                }
                Some(pair) => {
                    let mut stats = SearchStats::default();
                    match reducing_moves_scan(pair, mode, &mut stats) {
                        Err(e) => {
                            let _ = writeln!(err, "{}", e);
                        }
                        Ok(scan) => {
                            if scan.moves.is_empty() {
                                let _ = writeln!(out, "no reducing moves");
                                for r in &scan.reports {
                                    let _ = writeln!(
                                        out,
                                        "  - {}: unavailable - {}",
                                        r.family, r.reason
                                    );
                                }
                            } else {
                                for (i, mv) in scan.moves.iter().enumerate() {
                                    let _ = writeln!(out, "{}", describe_move(i, mv));
                                }
                            }
                            session.listed = scan.moves;
                        }
                    }
                }
            },
            "apply" => {
                let args: Vec<&str> = rest.split_whitespace().collect();
                if args.is_empty() {
                    let _ = writeln!(err, "usage: apply N | apply div1 u|v A B | apply sub2 u|v Q | apply swap");
                } else if let Err(msg) = repl_apply(&mut session, &args, out) {
                    let _ = writeln!(err, "{}; state unchanged", msg);
                }
            }
            "undo" => match session.history.pop() {
                None => {
                    let _ = writeln!(err, "nothing to undo");
                }
                Some((_, prev)) => {
                    session.state = Some(prev);
                    session.listed.clear();
                    let _ = writeln!(out, "undone");
                }
            },
            "show" | "degsum" => session.show(out),
            "export" => {
                let path = rest.trim();
                if path.is_empty() {
                    let _ = writeln!(err, "usage: export FILE");
                } else {
                    match repl_export(&session, path) {
                        Ok(msg) => {
                            let _ = writeln!(out, "{}", msg);
                        }
                        Err(msg) => {
                            let _ = writeln!(err, "{}", msg);
                        }
                    }
                }
            }
            other => {
                let _ = writeln!(err, "unknown command '{}'; try help", other);
            }
        }
    }
    EXIT_YES
}
