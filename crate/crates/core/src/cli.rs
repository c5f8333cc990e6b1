//! The `lmm` command-line front end.
//!
//! ```text
//! lmm tableau ab 2
//! lmm analyze bdf 7
//! lmm region ab 3 --window -3,1,-2,2 --resolution 201,201 --out ab3.csv
//! lmm locus am 4 --samples 720
//! lmm solve bdf 2 --problem stiff_relaxation --param lambda=-1e4 --h 0.01
//! lmm order ab 3 --problem dahlquist --param lambda=-1 --h 0.1,0.05,0.025,0.0125
//! ```
//!
//! Methods are given as `<family> [k]` (`ab`, `am`, `bdf`, `fe`, `be`, `trap`,
//! `leapfrog`) or `--file <path>` in the tableau text format. Exit status is 0
//! on success, 2 on usage errors and 1 when a computation fails.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::analysis::order_report;
use crate::error::Error;
use crate::integrate::{format_float, observed_order, solve_fixed_step, SolveConfig, Starter};
use crate::problems::{lookup, Params};
use crate::stability::{
    boundary_locus, has_stiff_decay, is_a_stable_sampled, region_grid_scan, zero_stability, Window,
};
use crate::tableau::{adams_bashforth, adams_moulton, bdf, leapfrog, Tableau};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "lmm", version, about = "Linear multistep method laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct MethodArgs {
    /// Method family: ab, am, bdf, fe, be, trap, leapfrog
    family: Option<String>,
    /// Step count (required for ab, am, bdf)
    k: Option<usize>,
    /// With `am 1`: the trapezoid rule instead of Backward Euler
    #[arg(long)]
    trapezoid: bool,
    /// Read the tableau from a file instead of a built-in family
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Write CSV output here instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ProblemArgs {
    /// Problem name from the built-in catalog
    #[arg(long)]
    problem: String,
    /// Problem parameter as key=value (repeatable)
    #[arg(long = "param", value_name = "KEY=VALUE", allow_hyphen_values = true)]
    params: Vec<String>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    t_end: f64,
    /// exact or rk4; defaults to exact when the problem has a closed form
    #[arg(long)]
    starter: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print exact coefficients
    Tableau {
        #[command(flatten)]
        method: MethodArgs,
        /// `text` (human readable) or `file` (tableau file format)
        #[arg(long, default_value = "text")]
        format: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Order, error constant, zero-stability, stiff decay, A-stability sample
    Analyze {
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Absolute stability region on a grid, as CSV `re,im,inside`
    Region {
        #[command(flatten)]
        method: MethodArgs,
        /// re_min,re_max,im_min,im_max
        #[arg(long, default_value = "-6,2,-4,4", allow_hyphen_values = true)]
        window: String,
        /// nx,ny
        #[arg(long, default_value = "201,201")]
        resolution: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Boundary locus as CSV `theta,re,im,is_pole`
    Locus {
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long, default_value_t = 720)]
        samples: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Fixed-step solve, trajectory CSV `t,y0,...`
    Solve {
        #[command(flatten)]
        method: MethodArgs,
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        h: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Observed convergence order, CSV `h,error,log2_ratio`
    Order {
        #[command(flatten)]
        method: MethodArgs,
        #[command(flatten)]
        problem: ProblemArgs,
        /// Comma-separated step sizes, each half the previous
        #[arg(long)]
        h: String,
        #[command(flatten)]
        out: OutArgs,
    },
}

/// Failure classes that map onto exit codes.
enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Usage(msg) => Failure::Usage(msg),
            other => Failure::Compute(other),
        }
    }
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

fn resolve_method(m: &MethodArgs) -> std::result::Result<Tableau, Failure> {
    match (&m.file, &m.family) {
        (Some(_), Some(_)) => Err(Failure::Usage(
            "give either a method family or --file, not both".into(),
        )),
        (None, None) => Err(Failure::Usage(
            "missing method: give `<family> [k]` or --file <path>".into(),
        )),
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            Tableau::parse(&text).map_err(usage)
        }
        (None, Some(family)) => {
            let need_k = || {
                m.k.ok_or_else(|| Failure::Usage(format!("family {family:?} needs a step count k")))
            };
            let no_k = |t: Tableau| match m.k {
                Some(k) if k != t.k() => Err(Failure::Usage(format!(
                    "{family} is a {}-step method, got k = {k}",
                    t.k()
                ))),
                _ => Ok(t),
            };
            if m.trapezoid && family != "am" {
                return Err(Failure::Usage("--trapezoid only applies to `am 1`".into()));
            }
            match family.to_ascii_lowercase().as_str() {
                "ab" => adams_bashforth(need_k()?).map_err(usage),
                "am" => adams_moulton(need_k()?, m.trapezoid).map_err(usage),
                "bdf" => bdf(need_k()?).map_err(usage),
                "fe" => no_k(adams_bashforth(1).map_err(usage)?),
                "be" => no_k(adams_moulton(1, false).map_err(usage)?),
                "trap" | "trapezoid" => no_k(adams_moulton(1, true).map_err(usage)?),
                "leapfrog" => no_k(leapfrog()),
                other => Err(Failure::Usage(format!(
                    "unknown method family {other:?} (expected ab, am, bdf, fe, be, trap, leapfrog)"
                ))),
            }
        }
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> std::result::Result<Vec<T>, Failure> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<T>()
                .map_err(|_| Failure::Usage(format!("bad {what} entry {v:?}")))
        })
        .collect()
}

fn build_problem(args: &ProblemArgs) -> std::result::Result<crate::integrate::IVProblem, Failure> {
    let entry = lookup(&args.problem).map_err(usage)?;
    let mut params = Params::new();
    for kv in &args.params {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--param expects key=value, got {kv:?}")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("parameter {k} is not a number: {v:?}")))?;
        params.insert(k.trim().to_string(), v);
    }
    entry.build(&params).map_err(usage)
}

fn resolve_starter(
    args: &ProblemArgs,
    p: &crate::integrate::IVProblem,
) -> std::result::Result<Starter, Failure> {
    match args.starter.as_deref() {
        None if p.exact.is_some() => Ok(Starter::Exact),
        None => Ok(Starter::Rk4),
        Some("exact") => Ok(Starter::Exact),
        Some("rk4") => Ok(Starter::Rk4),
        Some(other) => Err(Failure::Usage(format!(
            "unknown starter {other:?} (expected exact or rk4)"
        ))),
    }
}

/// Writes `body` to `--out` if given, else to stdout. Returns whether stdout
/// is free for summary lines.
fn emit(out: &OutArgs, body: &str, stdout: &mut dyn Write) -> std::result::Result<bool, Failure> {
    match &out.out {
        Some(path) => {
            fs::write(path, body).map_err(|e| {
                Failure::Compute(Error::Config(format!(
                    "cannot write {}: {e}",
                    path.display()
                )))
            })?;
            Ok(true)
        }
        None => {
            write_all(stdout, body)?;
            Ok(false)
        }
    }
}

fn write_all(w: &mut dyn Write, s: &str) -> std::result::Result<(), Failure> {
    w.write_all(s.as_bytes())
        .map_err(|e| Failure::Compute(Error::Config(format!("write failed: {e}"))))
}

fn fmt_complex(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

fn execute(
    cmd: Command,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    match cmd {
        Command::Tableau {
            method,
            format,
            out,
        } => {
            let t = resolve_method(&method)?;
            let body = match format.as_str() {
                "text" => format!("{t}\n"),
                "file" => t.to_text(),
                other => {
                    return Err(Failure::Usage(format!(
                        "unknown format {other:?} (expected text or file)"
                    )))
                }
            };
            emit(&out, &body, stdout)?;
        }
        Command::Analyze {
            method,
            seed,
            samples,
        } => {
            let t = resolve_method(&method)?;
            let mut s = format!("method={}\n", t.name());
            s.push_str(&order_report(&t)?.to_key_values());
            let zs = zero_stability(&t)?;
            s.push_str(&format!("zero_stability={}\n", zs.class));
            s.push_str(&format!("zero_stability_verdict: {zs}\n"));
            let roots: Vec<String> = zs
                .roots
                .iter()
                .map(|(r, m)| {
                    if m > 1 {
                        format!("{}^{m}", fmt_complex(r))
                    } else {
                        fmt_complex(r)
                    }
                })
                .collect();
            s.push_str(&format!("rho_roots={}\n", roots.join(" ")));
            s.push_str(&format!("stiff_decay={}\n", has_stiff_decay(&t)?));
            s.push_str(&format!(
                "a_stability={}\n",
                is_a_stable_sampled(&t, samples, seed)?
            ));
            write_all(stdout, &s)?;
            if !zs.consistent {
                write_all(stderr, "warning: tableau is not consistent\n")?;
            }
        }
        Command::Region {
            method,
            window,
            resolution,
            out,
        } => {
            let t = resolve_method(&method)?;
            let w: Vec<f64> = parse_list(&window, "window")?;
            let r: Vec<usize> = parse_list(&resolution, "resolution")?;
            if w.len() != 4 || r.len() != 2 {
                return Err(Failure::Usage(
                    "--window takes 4 numbers and --resolution takes 2".into(),
                ));
            }
            let window = Window::new(w[0], w[1], w[2], w[3]).map_err(usage)?;
            let sample = region_grid_scan(&t, window, (r[0], r[1]))?;
            let mut body = String::from("re,im,inside\n");
            for c in &sample.cells {
                body.push_str(&format!(
                    "{},{},{}\n",
                    format_float(c.z.re),
                    format_float(c.z.im),
                    c.inside
                ));
            }
            emit(&out, &body, stdout)?;
        }
        Command::Locus {
            method,
            samples,
            out,
        } => {
            let t = resolve_method(&method)?;
            let locus = boundary_locus(&t, samples).map_err(|e| match e {
                Error::Domain(m) if samples < 8 => Failure::Usage(m),
                other => Failure::Compute(other),
            })?;
            let mut body = String::from("theta,re,im,is_pole\n");
            for p in &locus {
                let (re, im) = p.z.map_or(("NaN".to_string(), "NaN".to_string()), |z| {
                    (format_float(z.re), format_float(z.im))
                });
                body.push_str(&format!(
                    "{},{re},{im},{}\n",
                    format_float(p.theta),
                    p.is_pole()
                ));
            }
            emit(&out, &body, stdout)?;
        }
        Command::Solve {
            method,
            problem,
            h,
            out,
        } => {
            let t = resolve_method(&method)?;
            let p = build_problem(&problem)?;
            let cfg =
                SolveConfig::new(h, problem.t_end).with_starter(resolve_starter(&problem, &p)?);
            let traj = solve_fixed_step(&t, &p, &cfg)?;
            let stdout_free = emit(&out, &traj.to_csv(), stdout)?;
            let mut summary = String::new();
            if traj.meta.diverged {
                summary.push_str(&format!(
                    "diverged_at_t={}\n",
                    format_float(traj.final_time())
                ));
            }
            if let Some(err) = traj.final_error(&p) {
                summary.push_str(&format!("final_error={}\n", format_float(err)));
            }
            if stdout_free {
                write_all(stdout, &summary)?;
            } else {
                write_all(stderr, &summary)?;
            }
        }
        Command::Order {
            method,
            problem,
            h,
            out,
        } => {
            let t = resolve_method(&method)?;
            let p = build_problem(&problem)?;
            let hs: Vec<f64> = parse_list(&h, "step size")?;
            let base =
                SolveConfig::new(hs[0], problem.t_end).with_starter(resolve_starter(&problem, &p)?);
            let report = observed_order(&t, &p, &base, &hs)?;
            let stdout_free = emit(&out, &report.to_csv(), stdout)?;
            let summary = format!("slope={}\n", format_float(report.slope));
            if stdout_free {
                write_all(stdout, &summary)?;
            } else {
                write_all(stderr, &summary)?;
            }
        }
    }
    Ok(())
}

/// Runs the CLI on `argv` (program name first) and returns the exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = stdout.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let help = <Cli as clap::CommandFactory>::command().render_help();
            let _ = writeln!(stderr, "error: {msg}\n\n{help}");
            EXIT_USAGE
        }
        Err(Failure::Compute(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_FAILURE
        }
    }
}
