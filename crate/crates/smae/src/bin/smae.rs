//! Command-line front-end: `smae invariants` analyzes one distribution,
//! Monge-Ampère coefficient list or operator; `smae verify` runs the batch
//! identity suites. Progress goes to stderr, results to stdout.
//!
//! Exit codes: 0 success, 1 failed verification, 2 parse error,
//! 3 Lagrangian/degenerate input, 4 unsupported equation type.

use clap::{Args, Parser, Subcommand};
use smae::dist::DistError;
use smae::parse::parse;
use smae::report::{
    build_operator_report, build_report, parse_distribution_input, parse_mae_input,
    parse_operator_input, InputEcho, ReportError, ReportOptions,
};
use smae::scalar::VariableContext;
use smae::symplectic::SymplecticStructure;
use smae::verify;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "smae", version, about = "Exact differential invariants of symplectic Monge-Ampère equations", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the invariant report for one input.
    Invariants(InvariantsArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct InvariantsArgs {
    /// Distribution "Xx,Xp,Xy,Xq ; Yx,Yp,Yy,Yq" (components in the
    /// expression grammar over x, p, y, q).
    #[arg(long, conflicts_with_all = ["mae", "operator_a"])]
    dist: Option<String>,

    /// Monge-Ampère coefficients "S;A;B;C;D" for
    /// S(u_xx u_yy - u_xy^2) + A u_xx + B u_xy + C u_yy + D = 0.
    #[arg(long, conflicts_with_all = ["dist", "operator_a"])]
    mae: Option<String>,

    /// Operator A as 16 entries "r1c1,r1c2,r1c3,r1c4 ; r2c1,... ; ...",
    /// row-major over the frame (d_x, d_p, d_y, d_q).
    #[arg(long = "operator-a", conflicts_with_all = ["dist", "mae"])]
    operator_a: Option<String>,

    /// Output format.
    #[arg(long, default_value = "text", value_parser = ["text", "json"])]
    format: String,

    /// Rational scale c of the symplectic form c(dp^dx + dq^dy).
    #[arg(long, default_value = "1")]
    scale: String,

    /// Candidate Hamiltonian characteristic for the linearization check.
    #[arg(long = "candidate-phi")]
    candidate_phi: Option<String>,

    /// Degree bound of the characteristic search.
    #[arg(long = "degree-bound", default_value_t = 2)]
    degree_bound: u32,

    /// Seed recorded in the report metadata.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite: identities | involution | invariance | table1 | jet-rank | orbit-codim | oracles | all
    scope: String,

    /// Random seed.
    #[arg(long, default_value_t = 7)]
    seed: u64,

    /// Number of random distributions (identity-style suites).
    #[arg(long, default_value_t = 20)]
    count: usize,

    /// Degree bound for the orbit-codimension suite.
    #[arg(long = "degree-bound", default_value_t = 4)]
    degree_bound: u32,

    /// Also rerun orbit codimension at the next degree bound.
    #[arg(long, default_value_t = false)]
    saturate: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Invariants(args) => run_invariants(args),
        Command::Verify(args) => run_verify(args),
    }
}

fn parse_scale(text: &str) -> Result<num::BigRational, String> {
    let ctx = VariableContext::base();
    let s = parse(text, &ctx).map_err(|e| e.to_string())?;
    s.constant_value()
        .filter(|v| !num::Zero::is_zero(v))
        .ok_or_else(|| "scale must be a nonzero rational constant".to_string())
}

fn run_invariants(args: InvariantsArgs) -> ExitCode {
    let ctx = VariableContext::base();
    let scale = match parse_scale(&args.scale) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let candidate = match &args.candidate_phi {
        None => None,
        Some(text) => match parse(text, &ctx) {
            Ok(s) => Some(s),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
    };
    let opts = ReportOptions {
        candidate_phi: candidate,
        degree_bound: args.degree_bound,
        seed: args.seed,
    };

    let result = if let Some(text) = &args.dist {
        parse_distribution_input(text, &ctx, scale).and_then(|d| {
            let echo = InputEcho {
                kind: "distribution".to_string(),
                distribution: Some(split_echo(text)),
                mae: None,
                operator: None,
            };
            build_report(&d, echo, &opts)
        })
    } else if let Some(text) = &args.mae {
        parse_mae_input(text, &ctx).and_then(|m| {
            let (d, _) = m.to_distributions(None)?;
            let echo = InputEcho {
                kind: "mae".to_string(),
                distribution: None,
                mae: Some(text.split(';').map(|s| s.trim().to_string()).collect()),
                operator: None,
            };
            build_report(&d, echo, &opts)
        })
    } else if let Some(text) = &args.operator_a {
        let sympl = SymplecticStructure::with_scale(&ctx, scale);
        parse_operator_input(text, &ctx).and_then(|a| {
            let echo = InputEcho {
                kind: "operator".to_string(),
                distribution: None,
                mae: None,
                operator: Some(
                    text.split(';')
                        .map(|s| s.trim().to_string())
                        .collect::<Vec<_>>(),
                ),
            };
            build_operator_report(&a, &sympl, echo)
        })
    } else {
        eprintln!("error: one of --dist, --mae, --operator-a is required");
        return ExitCode::from(2);
    };

    match result {
        Ok(doc) => {
            if args.format == "json" {
                println!("{}", serde_json::to_string_pretty(&doc).expect("serialize"));
            } else {
                print!("{}", doc.render_text());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                ReportError::Parse(_) => ExitCode::from(2),
                ReportError::Dist(DistError::Parabolic) | ReportError::Dist(DistError::Elliptic) => {
                    ExitCode::from(4)
                }
                ReportError::Dist(_) => ExitCode::from(3),
                ReportError::Invariant(_) => ExitCode::from(3),
            }
        }
    }
}

fn split_echo(text: &str) -> Vec<Vec<String>> {
    text.split(';')
        .map(|half| half.split(',').map(|c| c.trim().to_string()).collect())
        .collect()
}

fn run_verify(args: VerifyArgs) -> ExitCode {
    let mut reports = Vec::new();
    let scope = args.scope.as_str();
    let all = scope == "all";
    if scope == "identities" || all {
        eprintln!("running identity suite on {} distributions...", args.count);
        reports.push(verify::run_identities(args.seed, args.count));
    }
    if scope == "involution" || all {
        eprintln!("running involution suite...");
        reports.push(verify::run_involution(args.seed, args.count));
    }
    if scope == "invariance" || all {
        eprintln!("running infinitesimal invariance suite...");
        reports.push(verify::run_infinitesimal_invariance(args.seed, args.count.min(5)));
    }
    if scope == "table1" || all {
        eprintln!("running class table...");
        reports.push(verify::run_table(args.seed, 10));
    }
    if scope == "jet-rank" || all {
        eprintln!("computing jet functions and ranks (this takes a moment)...");
        reports.push(verify::run_jet_rank(args.seed, 3));
    }
    if scope == "orbit-codim" || all {
        eprintln!(
            "assembling prolonged lifts at degree bound {}...",
            args.degree_bound
        );
        reports.push(verify::run_orbit_codim(args.seed, args.degree_bound, args.saturate));
    }
    if scope == "oracles" || all {
        eprintln!("running floating finite-difference oracles...");
        reports.push(verify::oracle_partial_fd(args.seed, 10, 1e-6));
        reports.push(verify::oracle_lift_fd(args.seed, 10, 1e-4));
    }
    if reports.is_empty() {
        eprintln!(
            "error: unknown scope `{scope}` (identities | involution | invariance | table1 | jet-rank | orbit-codim | oracles | all)"
        );
        return ExitCode::from(2);
    }
    let mut ok = true;
    for r in &reports {
        print!("{}", r.render());
        ok &= r.passed();
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
