//! Command-line front end: Gamma evaluations, closed forms, domain checks,
//! Monte Carlo verification runs, Jacobian checks, and the suite battery.
//!
//! Every result is one JSON object per line on stdout. `--out` appends the
//! same records to a log file, minus wall-clock timings so that reruns with
//! the same seed are byte-identical.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use cselberg::closed_form::{DfaParams, DualParams, LemmaParams, TrapezoidParams, TriangularParams};
use cselberg::exponents::FieldExponent;
use cselberg::gamma::gamma_field;
use cselberg::maps::{
    anderson_forward, anderson_jacobian_closed, dual_jacobian_closed, dual_w_map,
    numeric_complex_jacobian,
};
use cselberg::verify::{verify, IdentitySpec, VerificationReport};

#[derive(Parser)]
#[command(name = "cselberg", about = "Complex Selberg-type integral identities: closed forms and Monte Carlo verification")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the Gamma function of the complex field at one exponent pair.
    Gamma {
        /// Exponent in the form "a_re+a_im i|k", e.g. "0.5|0" or "0.3+0.1i|-1"
        #[arg(long)]
        exponent: String,
    },
    /// Evaluate the closed-form right-hand side of an identity.
    Rhs {
        #[arg(long)]
        identity: String,
        /// JSON file with the params record
        #[arg(long)]
        params: PathBuf,
        /// Also print the canonical params JSON (round-trip check)
        #[arg(long)]
        emit_params: bool,
    },
    /// Check the convergence-domain inequalities for a parameter set.
    Domain {
        #[arg(long)]
        identity: String,
        #[arg(long)]
        params: PathBuf,
    },
    /// Monte Carlo verification of one identity.
    Verify {
        #[arg(long)]
        identity: String,
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 100)]
        chunks: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// z-score gate for the exit code
        #[arg(long, default_value_t = 4.0)]
        gate: f64,
        /// Append the report (without timings) to this JSON-lines file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form vs finite-difference Jacobian comparison.
    JacobianCheck {
        /// "anderson" or "dual"
        #[arg(long)]
        which: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the verification battery.
    Suite {
        /// "smoke" or "full"
        #[arg(long, default_value = "smoke")]
        level: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli.cmd));
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    match seed {
        Some(s) => s,
        None => {
            let s: u64 = rand::thread_rng().gen();
            println!("{}", json!({"seed_drawn": s}));
            s
        }
    }
}

fn load_spec(identity: &str, params: &PathBuf) -> Result<IdentitySpec, String> {
    let text = std::fs::read_to_string(params)
        .map_err(|e| format!("cannot read {}: {e}", params.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format!("bad JSON in params file: {e}"))?;
    serde_json::from_value(json!({"identity": identity, "params": value}))
        .map_err(|e| format!("bad params for identity {identity}: {e}"))
}

fn append_line(path: &PathBuf, line: &str) -> Result<(), String> {
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| format!("cannot open {}: {e}", path.display()))?;
    writeln!(f, "{line}").map_err(|e| e.to_string())
}

fn emit_report(report: &VerificationReport, out: Option<&PathBuf>) -> i32 {
    println!("{}", serde_json::to_string(report).unwrap());
    if let Some(path) = out {
        let mut logged = report.clone();
        logged.wall_seconds = None;
        if let Err(e) = append_line(path, &serde_json::to_string(&logged).unwrap()) {
            eprintln!("{e}");
            return 1;
        }
    }
    0
}

fn run(cmd: Cmd) -> i32 {
    match cmd {
        Cmd::Gamma { exponent } => {
            let e: FieldExponent = match exponent.parse() {
                Ok(e) => e,
                Err(err) => {
                    eprintln!("{err}");
                    return 2;
                }
            };
            let g = gamma_field(&e);
            println!(
                "{}",
                json!({
                    "exponent": e.to_string(),
                    "value_re": g.value.re,
                    "value_im": g.value.im,
                    "class": serde_json::to_value(g.classification).unwrap(),
                })
            );
            0
        }
        Cmd::Rhs {
            identity,
            params,
            emit_params,
        } => {
            let spec = match load_spec(&identity, &params) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{e}");
                    return 2;
                }
            };
            if emit_params {
                let v = serde_json::to_value(&spec).unwrap();
                println!("{}", v["params"]);
            }
            match spec.rhs() {
                Ok(v) => {
                    println!(
                        "{}",
                        json!({"identity": spec.name(), "rhs": {"re": v.re, "im": v.im}})
                    );
                    0
                }
                Err(e) => {
                    println!("{}", json!({"identity": spec.name(), "error": e.to_string()}));
                    1
                }
            }
        }
        Cmd::Domain { identity, params } => {
            let spec = match load_spec(&identity, &params) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{e}");
                    return 2;
                }
            };
            let verdict = spec.domain();
            println!(
                "{}",
                json!({
                    "identity": spec.name(),
                    "checks": serde_json::to_value(&verdict.checks).unwrap(),
                    "all_pass": verdict.all_pass,
                })
            );
            i32::from(!verdict.all_pass)
        }
        Cmd::Verify {
            identity,
            params,
            samples,
            chunks,
            seed,
            gate,
            out,
        } => {
            let spec = match load_spec(&identity, &params) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{e}");
                    return 2;
                }
            };
            let seed = resolve_seed(seed);
            let start = Instant::now();
            match verify(&spec, samples, seed, chunks, None) {
                Ok(mut report) => {
                    report.wall_seconds = Some(start.elapsed().as_secs_f64());
                    let code = emit_report(&report, out.as_ref());
                    if code != 0 {
                        return code;
                    }
                    i32::from(!report.passes(gate))
                }
                Err(e) => {
                    eprintln!("{e}");
                    1
                }
            }
        }
        Cmd::JacobianCheck {
            which,
            n,
            trials,
            seed,
        } => {
            let seed = resolve_seed(seed);
            match jacobian_check(&which, n, trials, seed) {
                Ok(line) => {
                    let pass = line["pass"].as_bool().unwrap_or(false);
                    println!("{line}");
                    i32::from(!pass)
                }
                Err(e) => {
                    eprintln!("{e}");
                    2
                }
            }
        }
        Cmd::Suite { level, seed, out } => {
            let seed = resolve_seed(seed);
            suite(&level, seed, out.as_ref())
        }
    }
}

fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn jacobian_check(which: &str, n: usize, trials: u64, seed: u64) -> Result<serde_json::Value, String> {
    if n < 1 {
        return Err("n must be >= 1".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_rel = 0.0f64;
    for _ in 0..trials {
        let rel = match which {
            "anderson" => {
                let u = random_points(&mut rng, n);
                let z = random_points(&mut rng, n - 1);
                let closed = anderson_jacobian_closed(&u, &z).map_err(|e| e.to_string())?;
                let map = |p: &[Complex64]| {
                    let img = anderson_forward(p, &z)?;
                    let mut outv = img.x;
                    outv.push(img.y);
                    Ok(outv)
                };
                let numeric = numeric_complex_jacobian(map, &u, 1e-5).map_err(|e| e.to_string())?;
                (closed - numeric).norm() / closed.norm()
            }
            "dual" => {
                let z = random_points(&mut rng, n);
                let u = random_points(&mut rng, n + 1);
                let closed = dual_jacobian_closed(&z, &u).map_err(|e| e.to_string())?;
                let map = |p: &[Complex64]| {
                    let w = dual_w_map(p, &u)?;
                    Ok(w[..n].to_vec())
                };
                let numeric = numeric_complex_jacobian(map, &z, 1e-5).map_err(|e| e.to_string())?;
                (closed - numeric).norm() / closed.norm()
            }
            other => return Err(format!("unknown map {other:?}; use anderson or dual")),
        };
        max_rel = max_rel.max(rel);
    }
    Ok(json!({
        "which": which,
        "n": n,
        "trials": trials,
        "seed": seed,
        "max_rel_err": max_rel,
        "pass": max_rel < 1e-6,
    }))
}

fn fe(x: f64) -> FieldExponent {
    FieldExponent::diagonal(x)
}

/// The verification battery. Sample counts scale with the level; parameter
/// points sit inside the convergence domains with finite-variance weights.
fn battery(level: &str) -> Vec<(IdentitySpec, u64, u64)> {
    let big = level == "full";
    let s = |smoke: u64, full: u64| if big { full } else { smoke };
    let c = |smoke: u64, full: u64| if big { full } else { smoke };
    vec![
        (
            IdentitySpec::Beta {
                a: fe(0.3),
                b: fe(0.4),
            },
            s(200_000, 10_000_000),
            c(100, 1000),
        ),
        (
            IdentitySpec::Beta {
                a: FieldExponent::new(Complex64::new(0.7, 0.0), 1),
                b: FieldExponent::new(Complex64::new(0.2, 0.0), -1),
            },
            s(200_000, 10_000_000),
            c(100, 1000),
        ),
        (
            IdentitySpec::Dirichlet {
                a: vec![fe(0.2), fe(0.3), fe(0.2)],
            },
            s(200_000, 10_000_000),
            c(100, 1000),
        ),
        (
            IdentitySpec::Dfa(DfaParams {
                n: 1,
                sigma: fe(0.3),
                tau: fe(0.4),
                theta: fe(0.2),
            }),
            s(200_000, 1_000_000),
            c(100, 1000),
        ),
        (
            IdentitySpec::Dfa(DfaParams {
                n: 2,
                sigma: fe(0.3),
                tau: fe(0.3),
                theta: fe(0.15),
            }),
            s(400_000, 20_000_000),
            c(100, 1000),
        ),
        (
            IdentitySpec::Lemma(LemmaParams {
                n: 2,
                sigma: fe(0.3),
                tau: fe(0.3),
                theta: vec![fe(0.3)],
                z: vec![Complex64::new(0.4, 0.3)],
            }),
            s(400_000, 20_000_000),
            c(100, 1000),
        ),
        (
            IdentitySpec::Dual(DualParams {
                n: 1,
                theta: fe(0.3),
                u: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            }),
            s(200_000, 20_000_000),
            c(100, 1000),
        ),
        (
            IdentitySpec::Theorem1(TriangularParams {
                n: 2,
                sigma: vec![fe(0.3), fe(0.2)],
                tau: vec![fe(0.3), fe(0.2)],
                theta: vec![vec![fe(0.55)]],
            }),
            s(400_000, 20_000_000),
            c(100, 1000),
        ),
        (
            IdentitySpec::Theorem2(TrapezoidParams {
                m: 1,
                n: 2,
                sigma: vec![fe(0.3), fe(0.2)],
                tau: vec![fe(0.3), fe(0.2)],
                nu: fe(0.3),
                theta: vec![vec![fe(0.55)]],
            }),
            s(400_000, 20_000_000),
            c(100, 1000),
        ),
        (
            IdentitySpec::Theorem2(TrapezoidParams {
                m: 2,
                n: 2,
                sigma: vec![fe(0.04)],
                tau: vec![fe(0.04)],
                nu: fe(0.45),
                theta: vec![],
            }),
            s(400_000, 20_000_000),
            c(100, 1000),
        ),
    ]
}

fn suite(level: &str, seed: u64, out: Option<&PathBuf>) -> i32 {
    if level != "smoke" && level != "full" {
        eprintln!("unknown level {level:?}; use smoke or full");
        return 2;
    }
    let gate = if level == "full" { 4.0 } else { 5.0 };
    let mut all_pass = true;
    for (idx, (spec, samples, chunks)) in battery(level).into_iter().enumerate() {
        let case_seed = seed.wrapping_add(idx as u64);
        let start = Instant::now();
        match verify(&spec, samples, case_seed, chunks, None) {
            Ok(mut report) => {
                report.wall_seconds = Some(start.elapsed().as_secs_f64());
                let pass = report.passes(gate);
                all_pass &= pass;
                if emit_report(&report, out) != 0 {
                    return 1;
                }
            }
            Err(e) => {
                eprintln!("{}: {e}", spec.name());
                all_pass = false;
            }
        }
    }
    for (which, n) in [("anderson", 2), ("anderson", 3), ("anderson", 4), ("dual", 2), ("dual", 3)] {
        match jacobian_check(which, n, 50, seed) {
            Ok(line) => {
                all_pass &= line["pass"].as_bool().unwrap_or(false);
                println!("{line}");
                if let Some(path) = out {
                    if let Err(e) = append_line(path, &line.to_string()) {
                        eprintln!("{e}");
                        return 1;
                    }
                }
            }
            Err(e) => {
                eprintln!("{e}");
                all_pass = false;
            }
        }
    }
    let summary = json!({"suite": level, "gate": gate, "all_pass": all_pass});
    println!("{summary}");
    if let Some(path) = out {
        if let Err(e) = append_line(path, &summary.to_string()) {
            eprintln!("{e}");
            return 1;
        }
    }
    i32::from(!all_pass)
}
