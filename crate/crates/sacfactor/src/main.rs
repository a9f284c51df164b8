use std::io::{stderr, stdout, BufReader};

use clap::{Parser, Subcommand, ValueEnum};

use sacfactor::cli;
use sacfactor::tower::Mode;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Field {
    Rational,
    Closure,
}

impl From<Field> for Mode {
    fn from(f: Field) -> Mode {
        match f {
            Field::Rational => Mode::Rational,
            Field::Closure => Mode::Closure,
        }
    }
}

/// Decides whether a birational morphism of the affine plane, given as
/// a pair of polynomials in x and y over Q, is a product of simple
/// affine contractions.
///
/// Exit codes: 0 = yes, 1 = no, 2 = undecided, 64 = input error.
#[derive(Parser)]
#[command(name = "sacfactor", version, about, verbatim_doc_comment)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a pair and optionally emit a replayable certificate.
    Decide {
        /// The image of x, e.g. "x y + 1".
        #[arg(allow_hyphen_values = true)]
        u: String,
        /// The image of y, e.g. "x^2 y + x".
        #[arg(allow_hyphen_values = true)]
        v: String,
        /// Ground field for the contraction parameters.
        #[arg(long, value_enum, default_value_t = Field::Closure)]
        field: Field,
        /// Emit the certificate as JSON on stdout.
        #[arg(long)]
        json: bool,
        /// Log the reduction steps to stderr.
        #[arg(long)]
        trace: bool,
        /// Override the search depth bound (defaults to the proven
        /// bound, the input degree sum minus two).
        #[arg(long)]
        max_depth: Option<u32>,
    },
    /// Replay and recompose a certificate file.
    Verify {
        /// Path to a certificate produced by decide --json.
        file: String,
    },
    /// List every single degree-reducing move for a pair.
    Reduce {
        #[arg(allow_hyphen_values = true)]
        u: String,
        #[arg(allow_hyphen_values = true)]
        v: String,
        #[arg(long, value_enum, default_value_t = Field::Closure)]
        field: Field,
    },
    /// Reduce a pair interactively, step by step.
    Repl {
        #[arg(long, value_enum, default_value_t = Field::Closure)]
        field: Field,
    },
}

fn main() {
    let args = Cli::parse();
    let mut out = stdout();
    let mut err = stderr();
    let code = match args.command {
        Command::Decide {
            u,
            v,
            field,
            json,
            trace,
            max_depth,
        } => {
            let opts = cli::DecideOpts {
                mode: field.into(),
                json,
                trace,
                max_depth,
            };
            cli::cmd_decide(&u, &v, &opts, &mut out, &mut err)
        }
        Command::Verify { file } => cli::cmd_verify(&file, &mut out, &mut err),
        Command::Reduce { u, v, field } => {
            cli::cmd_reduce(&u, &v, field.into(), &mut out, &mut err)
        }
        Command::Repl { field } => cli::cmd_repl(
            field.into(),
            BufReader::new(std::io::stdin()),
            &mut out,
            &mut err,
        ),
    };
    std::process::exit(code);
}
