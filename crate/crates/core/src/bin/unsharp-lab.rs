use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use unsharp_lab::chsh::RangeVariant;
use unsharp_lab::report::{
    cmd_chsh, cmd_mermin, cmd_sga, cmd_unsharp, cmd_verify_paper, reference, ChshArgs,
    CommandError, RunReport, SgaArgs, StateChoice, TraceArgs, UnsharpArgs,
};
use unsharp_lab::sga::{Model, SgaConfig};
use unsharp_lab::unsharp::{Branch, Convention, VBranches};

#[derive(Parser)]
#[command(name = "unsharp-lab", version, about = "Hidden-variable models with unsharp eigenvalues")]
struct Cli {
    /// Write the JSON report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Base seed for random sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Do not print the report to stdout.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exhaustive ±1 search over the Mermin–Peres square.
    Mermin {
        /// Six comma-separated row targets, each 1 or -1.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_signs::<6>)]
        targets: Option<[i8; 6]>,
    },
    /// Solve the deviation equations for one sign pattern.
    Unsharp(UnsharpFlags),
    /// Sharp, unsharp and quantum CHSH bounds.
    Chsh(ChshFlags),
    /// Stern-Gerlach screen Monte Carlo.
    Sga(SgaFlags),
    /// Recompute every published number that can be checked.
    VerifyPaper,
}

#[derive(Args)]
struct UnsharpFlags {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_signs::<4>, default_value = "-1,1,1,-1")]
    v: [i8; 4],
    #[arg(long, allow_hyphen_values = true, value_parser = parse_signs::<3>, default_value = "1,-1,-1")]
    w: [i8; 3],
    /// Free parameter δ1 (and Δ1 unless --t-w is given).
    #[arg(long, allow_hyphen_values = true, default_value_t = reference::DELTA[0])]
    t: f64,
    /// Free parameter Δ1.
    #[arg(long, allow_hyphen_values = true)]
    t_w: Option<f64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = reference::EPSILON)]
    epsilon: f64,
    /// literal or identity-signed; both when omitted.
    #[arg(long, value_parser = parse_name::<Convention>)]
    convention: Option<Convention>,
    /// Roots for x2, x4 and the x3 seed, e.g. plus,plus,plus.
    #[arg(long, value_parser = parse_branches, default_value = "plus,plus,plus")]
    branches: VBranches,
    #[arg(long, value_parser = parse_name::<Branch>, default_value = "minus")]
    w_branch: Branch,
    /// Solve all 16 × 8 sign patterns at --t.
    #[arg(long)]
    enumerate: bool,
    /// Write the δ family over a linear grid from --trace-from to ε.
    #[arg(long, value_name = "CSV")]
    trace_v: Option<PathBuf>,
    /// Write the Δ family (first selected convention).
    #[arg(long, value_name = "CSV")]
    trace_w: Option<PathBuf>,
    #[arg(long, default_value_t = 21)]
    trace_points: usize,
    #[arg(long, default_value_t = 1e-6)]
    trace_from: f64,
}

#[derive(Args)]
struct ChshFlags {
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    epsilon: f64,
    /// Maximise |S| over measurement directions.
    #[arg(long)]
    optimize: bool,
    /// singlet, phi-plus, product-up or maximally-mixed.
    #[arg(long, value_parser = parse_name::<StateChoice>, default_value = "singlet")]
    state: StateChoice,
    /// two-interval or continuous.
    #[arg(long, value_parser = parse_name::<RangeVariant>, default_value = "two-interval")]
    range: RangeVariant,
}

#[derive(Args)]
struct SgaFlags {
    /// sharp or unsharp.
    #[arg(long, value_parser = parse_name::<Model>, default_value = "unsharp")]
    model: Model,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.5)]
    p_up: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    deflection_scale: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.05)]
    spin_sd: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.15)]
    device_sd: f64,
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    bins: usize,
    #[arg(long, allow_hyphen_values = true, default_value_t = -2.0)]
    range_lo: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 2.0)]
    range_hi: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    threshold: f64,
    /// Histogram CSV output.
    #[arg(long, value_name = "CSV")]
    out: Option<PathBuf>,
    /// Raw sample CSV output.
    #[arg(long, value_name = "CSV")]
    samples_out: Option<PathBuf>,
    /// Also run the matched-variance sharp model and report the TV distance.
    #[arg(long)]
    compare: bool,
}

fn parse_signs<const N: usize>(s: &str) -> Result<[i8; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated signs, got {}", parts.len()));
    }
    let mut out = [0i8; N];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = match p {
            "1" | "+1" | "+" => 1,
            "-1" | "-" => -1,
            other => return Err(format!("'{other}' is not 1 or -1")),
        };
    }
    Ok(out)
}

fn parse_name<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn parse_branches(s: &str) -> Result<VBranches, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [b] => Ok(VBranches::uniform(parse_name(b)?)),
        [a, b, c] => Ok(VBranches {
            pair12: parse_name(a)?,
            pair14: parse_name(b)?,
            close32: parse_name(c)?,
        }),
        _ => Err("expected one branch or three comma-separated branches".into()),
    }
}

fn run(cli: &Cli) -> Result<RunReport, CommandError> {
    match &cli.command {
        Command::Mermin { targets } => cmd_mermin(*targets),
        Command::Unsharp(f) => {
            let trace = (f.trace_v.is_some() || f.trace_w.is_some()).then(|| TraceArgs {
                points: f.trace_points,
                t_from: f.trace_from,
                v_csv: f.trace_v.clone(),
                w_csv: f.trace_w.clone(),
            });
            cmd_unsharp(&UnsharpArgs {
                v: f.v,
                w: f.w,
                t: f.t,
                t_w: f.t_w,
                epsilon: f.epsilon,
                convention: f.convention,
                branches: f.branches,
                w_branch: f.w_branch,
                enumerate: f.enumerate,
                trace,
            })
        }
        Command::Chsh(f) => cmd_chsh(&ChshArgs {
            epsilon: f.epsilon,
            optimize: f.optimize,
            state: f.state,
            variant: f.range,
        }),
        Command::Sga(f) => cmd_sga(&SgaArgs {
            config: SgaConfig {
                p_up: f.p_up,
                deflection_scale: f.deflection_scale,
                spin_sd: f.spin_sd,
                device_sd: f.device_sd,
                model: f.model,
                n_samples: f.n,
                seed: cli.seed,
                bins: f.bins,
                range: (f.range_lo, f.range_hi),
            },
            threshold: f.threshold,
            compare: f.compare,
            out: f.out.clone(),
            samples_out: f.samples_out.clone(),
        }),
        Command::VerifyPaper => cmd_verify_paper(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = report.to_json();
    if !cli.quiet {
        // A closed pipe (e.g. `| head`) is not an error worth reporting.
        let _ = writeln!(std::io::stdout().lock(), "{text}");
    }
    if let Some(path) = &cli.json {
        if let Err(e) = std::fs::write(path, format!("{text}\n")) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    for w in &report.warnings {
        eprintln!("warning [{}]: {}", w.code, w.message);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failed checks: {}", report.failures.join(", "));
        ExitCode::from(1)
    }
}
