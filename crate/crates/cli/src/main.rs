//! Batch front end: parse state/channel JSON, dispatch to the library,
//! emit CSV/JSON artifacts.
//!
//! Exit codes: 0 success, 1 malformed JSON input (with line/column),
//! 2 precondition violation, 3 numerical-certification failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use asym_core::amajor::{a_majorizes_seq, AMajorVerdict};
use asym_core::channels::{build_conversion, trace_distance_to_pure, verify_covariant, CovariantChannel};
use asym_core::dists::{coin, poisson_default_trunc, poisson_dist, EnergyDistribution, PureState};
use asym_core::entbridge::{majorizes, nielsen_convertible, SchmidtVector};
use asym_core::qfi::{f_max_pure, f_min_pure, one_shot_convertible, qfi_pure, BracketKind, DensityMatrix, QfiBracket};
use asym_core::scalar::{Rat, Scalar};
use asym_core::seq::IntSeq;
use asym_core::spectra::{iid_tp_certificate, smooth_f_max, smooth_f_min, spectral_rate, Direction, StateFamily};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

#[derive(Parser)]
#[command(name = "asym", about = "Conversion calculus for energy distributions of pure states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Backend {
    Rational,
    F64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dir {
    Sup,
    Inf,
}

#[derive(Args)]
struct OutOpt {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Quantum Fisher information of a pure state (4·variance).
    Qfi {
        state: PathBuf,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Certified bracket for the max-QFI over compatible Poisson profiles.
    Fmax {
        state: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Certified bracket for the min-QFI over compatible Poisson profiles.
    Fmin {
        state: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Shift-mixture preorder p ≻ₐ q with witness.
    Amaj {
        p: PathBuf,
        q: PathBuf,
        /// Extra indices checked past the provable witness support.
        #[arg(long, default_value_t = 64)]
        window: usize,
        #[arg(long, value_enum, default_value_t = Backend::F64)]
        backend: Backend,
        #[command(flatten)]
        out: OutOpt,
    },
    /// One-shot covariant convertibility ψ → φ, with an explicit channel.
    Convert {
        psi: PathBuf,
        phi: PathBuf,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Completeness + covariance certification of a ladder-Kraus channel.
    ChannelVerify {
        channel: PathBuf,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Smoothed max/min QFI brackets over an eps-fidelity ball.
    Smooth {
        state: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        /// Candidate budget for the smoothing search.
        #[arg(long, default_value_t = 256)]
        budget: usize,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Per-m spectral QFI rates of a state family, as CSV.
    Rates {
        #[arg(long)]
        family: String,
        /// Comma-separated strictly increasing sizes, e.g. 8,16,32,64.
        #[arg(long)]
        ms: String,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = Dir::Sup)]
        dir: Dir,
        #[arg(long, default_value_t = 256)]
        budget: usize,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Entanglement-side demos (majorization vs the shift-mixture preorder).
    Bridge {
        #[arg(long)]
        demo: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 60)]
        pairs: usize,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Translated-Poisson proximity certificate for i.i.d. powers, as CSV.
    CertifyTp {
        #[arg(long)]
        family: String,
        #[arg(long)]
        ms: String,
        #[command(flatten)]
        out: OutOpt,
    },
}

enum CliError {
    /// Malformed JSON: file, line, column, detail.
    Json(PathBuf, usize, usize, String),
    /// Violated precondition or unusable arguments.
    Pre(String),
    /// A numerical certificate could not be established.
    Certify(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Json(..) => 1,
            CliError::Pre(_) => 2,
            CliError::Certify(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Json(path, line, col, msg) => {
                write!(f, "{}:{line}:{col}: malformed JSON: {msg}", path.display())
            }
            CliError::Pre(msg) => write!(f, "precondition violated: {msg}"),
            CliError::Certify(msg) => write!(f, "certification failed: {msg}"),
        }
    }
}

fn pre(e: impl std::fmt::Display) -> CliError {
    CliError::Pre(e.to_string())
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Pre(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Json(path.to_path_buf(), e.line(), e.column(), e.to_string()))
}

fn read_state(path: &Path) -> Result<PureState, CliError> {
    PureState::from_json(&read_json(path)?).map_err(pre)
}

fn emit(out: &OutOpt, text: &str) -> Result<(), CliError> {
    match &out.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Pre(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn kind_str(k: BracketKind) -> &'static str {
    match k {
        BracketKind::Exact => "exact",
        BracketKind::UpperBound => "upper_bound",
        BracketKind::LowerBound => "lower_bound",
    }
}

fn bracket_json(b: &QfiBracket) -> Value {
    serde_json::json!({
        "value": b.value,
        "kind": kind_str(b.kind),
        "lambda_star": b.lambda_star,
        "lo": b.lo,
        "hi": b.hi,
        "iterations": b.iterations,
    })
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn parse_ms(ms: &str) -> Result<Vec<usize>, CliError> {
    let out: Result<Vec<usize>, _> = ms.split(',').map(|t| t.trim().parse::<usize>()).collect();
    let out = out.map_err(|e| CliError::Pre(format!("bad --ms list: {e}")))?;
    if out.is_empty() || out.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Pre("--ms must be nonempty and strictly increasing".into()));
    }
    Ok(out)
}

fn parse_family(spec: &str) -> Result<StateFamily, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["iid", "coin"] => Ok(StateFamily::iid("iid:coin", coin())),
        ["iid", "poisson", lam] => {
            let lam: f64 = lam.parse().map_err(|e| CliError::Pre(format!("bad λ: {e}")))?;
            let base = poisson_dist(lam, poisson_default_trunc(lam)).map_err(pre)?;
            Ok(StateFamily::iid(spec, base))
        }
        ["eigen"] => Ok(StateFamily::eigenstates()),
        ["chi"] => Ok(StateFamily::poisson_linear(1.0)),
        ["chi", lam] => {
            let lam: f64 = lam.parse().map_err(|e| CliError::Pre(format!("bad λ: {e}")))?;
            Ok(StateFamily::poisson_linear(lam))
        }
        _ => Err(CliError::Pre(format!("unknown family {spec:?}"))),
    }
}

fn iid_base(spec: &str) -> Result<EnergyDistribution, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["iid", "coin"] => Ok(coin()),
        ["iid", "poisson", lam] => {
            let lam: f64 = lam.parse().map_err(|e| CliError::Pre(format!("bad λ: {e}")))?;
            poisson_dist(lam, poisson_default_trunc(lam)).map_err(pre)
        }
        _ => Err(CliError::Pre(format!("certify-tp needs an iid family, got {spec:?}"))),
    }
}

fn amaj_verdict_json<T>(v: &AMajorVerdict<T>, witness: Option<Value>) -> Value
where
    T: asym_core::scalar::Scalar,
{
    serde_json::json!({
        "holds": v.holds,
        "marginal": v.marginal,
        "min_violation": v.min_violation,
        "window": [v.window.0, v.window.1],
        "witness": witness.unwrap_or(Value::Null),
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Qfi { state, out } => {
            let psi = read_state(&state)?;
            let v = serde_json::json!({ "qfi": qfi_pure(&psi) });
            emit(&out, &json_text(&v))
        }
        Command::Fmax { state, tol, out } => {
            if tol <= 0.0 {
                return Err(CliError::Pre(format!("tol = {tol} must be positive")));
            }
            let psi = read_state(&state)?;
            let b = f_max_pure(&psi, tol);
            emit(&out, &json_text(&bracket_json(&b)))
        }
        Command::Fmin { state, tol, out } => {
            if tol <= 0.0 {
                return Err(CliError::Pre(format!("tol = {tol} must be positive")));
            }
            let psi = read_state(&state)?;
            let b = f_min_pure(&psi, tol);
            emit(&out, &json_text(&bracket_json(&b)))
        }
        Command::Amaj { p, q, window, backend, out } => {
            let pj = read_json(&p)?;
            let qj = read_json(&q)?;
            let v = match backend {
                Backend::Rational => {
                    let ps = IntSeq::<Rat>::from_json(&pj).map_err(pre)?;
                    let qs = IntSeq::<Rat>::from_json(&qj).map_err(pre)?;
                    for s in [&ps, &qs] {
                        let mass = s.sum().to_f64();
                        if (mass - 1.0).abs() > 1e-9 {
                            return Err(CliError::Pre(format!("mass {mass} is not 1")));
                        }
                    }
                    let verdict = a_majorizes_seq(&ps, &qs, window, 0.0).map_err(pre)?;
                    let wit = verdict.witness.as_ref().map(|w| w.to_json());
                    amaj_verdict_json(&verdict, wit)
                }
                Backend::F64 => {
                    let pd = EnergyDistribution::from_json(&pj).map_err(pre)?;
                    let qd = EnergyDistribution::from_json(&qj).map_err(pre)?;
                    let verdict =
                        a_majorizes_seq(pd.seq(), qd.seq(), window, 1e-10).map_err(pre)?;
                    if verdict.marginal {
                        return Err(CliError::Certify(format!(
                            "verdict is within the float noise band (min entry {:.3e}); \
                             rerun with --backend rational",
                            verdict.min_violation
                        )));
                    }
                    let wit = verdict.witness.as_ref().map(|w| w.to_json());
                    amaj_verdict_json(&verdict, wit)
                }
            };
            emit(&out, &json_text(&v))
        }
        Command::Convert { psi, phi, out } => {
            let psi = read_state(&psi)?;
            let phi = read_state(&phi)?;
            let verdict = one_shot_convertible(&psi, &phi).map_err(pre)?;
            let mut v = serde_json::json!({
                "convertible": verdict.holds,
                "min_violation": verdict.min_violation,
            });
            if verdict.holds {
                let e = build_conversion(&psi, &phi).map_err(pre)?;
                let rho = DensityMatrix::from_pure(&psi);
                let mapped = asym_core::channels::apply(&e, &rho).map_err(pre)?;
                let dist = trace_distance_to_pure(&mapped, &phi);
                let obj = v.as_object_mut().expect("object");
                obj.insert("channel".into(), e.to_json());
                obj.insert("achieved_distance".into(), serde_json::json!(dist));
            }
            emit(&out, &json_text(&v))
        }
        Command::ChannelVerify { channel, out } => {
            let e = CovariantChannel::from_json(&read_json(&channel)?).map_err(pre)?;
            let ok = verify_covariant(&e, 4).map_err(pre)?;
            let v = serde_json::json!({
                "covariant": ok,
                "in_trunc": e.in_trunc(),
                "kraus_count": e.kraus().len(),
                "out_trunc": e.out_trunc(),
            });
            emit(&out, &json_text(&v))?;
            if !ok {
                return Err(CliError::Certify("channel failed the covariance check".into()));
            }
            Ok(())
        }
        Command::Smooth { state, eps, budget, out } => {
            let psi = read_state(&state)?;
            let fmax = smooth_f_max(&psi, eps, budget).map_err(pre)?;
            let fmin = smooth_f_min(&psi, eps, budget).map_err(pre)?;
            let v = serde_json::json!({
                "eps": eps,
                "f_max_eps": bracket_json(&fmax),
                "f_min_eps": bracket_json(&fmin),
            });
            emit(&out, &json_text(&v))
        }
        Command::Rates { family, ms, eps, dir, budget, out } => {
            let fam = parse_family(&family)?;
            let ms = parse_ms(&ms)?;
            let direction = match dir {
                Dir::Sup => Direction::Sup,
                Dir::Inf => Direction::Inf,
            };
            // Re-run the per-m smoothing to retain bound kinds for the CSV.
            let mut csv = String::from("m,raw_value,per_m,bound_kind\n");
            for &m in &ms {
                let psi = fam
                    .state(m)
                    .ok_or_else(|| CliError::Pre(format!("family has no state at m = {m}")))?;
                let b = match direction {
                    Direction::Sup => smooth_f_max(&psi, eps, budget).map_err(pre)?,
                    Direction::Inf => smooth_f_min(&psi, eps, budget).map_err(pre)?,
                };
                writeln!(csv, "{m},{},{},{}", b.value, b.value / m as f64, kind_str(b.kind))
                    .expect("string write");
            }
            let est = spectral_rate(&fam, eps, &ms, direction, budget).map_err(pre)?;
            emit(&out, &csv)?;
            let summary = serde_json::json!({
                "extrapolated": est.extrapolated,
                "spread": est.spread,
            });
            if out.out.is_some() {
                print!("{}", json_text(&summary));
            }
            Ok(())
        }
        Command::Bridge { demo, seed, pairs, out } => {
            if demo != "correspondence" {
                return Err(CliError::Pre(format!("unknown demo {demo:?}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut csv = String::from(
                "case,amaj_holds,rta_convertible,schmidt_majorizes,nielsen_convertible\n",
            );
            for case in 0..pairs {
                let d = rng.gen_range(2..=4usize);
                let p = random_state(&mut rng, d);
                let q = random_state(&mut rng, d);
                let amaj = asym_core::amajor::a_majorizes_bruteforce(
                    p.energy_distribution().seq(),
                    q.energy_distribution().seq(),
                    1e-10,
                )
                .map_err(pre)?;
                let rta = one_shot_convertible(&p, &q).map_err(pre)?.holds;
                let sp = schmidt_of(&p)?;
                let sq = schmidt_of(&q)?;
                let maj = majorizes(&sq, &sp);
                let nielsen = nielsen_convertible(&sp, &sq);
                writeln!(csv, "{case},{amaj},{rta},{maj},{nielsen}").expect("string write");
                if nielsen != maj || rta != amaj {
                    return Err(CliError::Certify(format!(
                        "preorder verdicts diverged at case {case}"
                    )));
                }
            }
            emit(&out, &csv)
        }
        Command::CertifyTp { family, ms, out } => {
            let base = iid_base(&family)?;
            let ms = parse_ms(&ms)?;
            let rows = iid_tp_certificate(&base, &ms).map_err(pre)?;
            let mut csv = String::from("m,dtv,bound\n");
            for (m, dtv, bound) in rows {
                writeln!(csv, "{m},{dtv},{bound}").expect("string write");
            }
            emit(&out, &csv)
        }
    }
}

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> PureState {
    let mut mods: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.05..1.0)).collect();
    let norm: f64 = mods.iter().map(|m| m * m).sum::<f64>().sqrt();
    mods.iter_mut().for_each(|m| *m /= norm);
    let amps = mods.into_iter().map(|m| (m, 0.0)).collect();
    PureState::new(amps).expect("normalized by construction")
}

fn schmidt_of(psi: &PureState) -> Result<SchmidtVector, CliError> {
    let probs = psi.amps().iter().map(|(m, _)| m * m).collect();
    SchmidtVector::new(probs).map_err(pre)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
