mod config;
mod observable;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gl2_boundary::arith::{ExtendedPoint, Mat2Z, Rat};
use gl2_boundary::cf::cf_expand;
use gl2_boundary::coset::{heilbronn_matrices, p1_normalize, P1Elt};
use gl2_boundary::cusp::{self, l_value, lambda_completed, manin_relation_check, CuspContext};
use gl2_boundary::error::Error;
use gl2_boundary::lms::{digits_of, lms_forms, lms_quadratic, lms_sampled, random_digits};
use gl2_boundary::modsym::{eigen_decompose, hecke_matrix, path_to_symbol, symbol_space};
use gl2_boundary::qsm::checks::{hecke_eigen_check, l1_period_check};
use gl2_boundary::qsm::counting::{partition_function, sweep};
use gl2_boundary::qsm::states::{gibbs_state, ground_state, ground_state_exact, Truncation};
use gl2_boundary::qsm::QMat2;
use gl2_boundary::{par, red};
use num_complex::Complex64;
use serde_json::{json, Value};

use config::RunConfig;
use observable::{parse_matrix, parse_observable};

#[derive(Parser, Debug)]
#[command(name = "gl2b", version, about = "Boundary GL2 statistical mechanics, continued fractions and limiting modular symbols")]
struct Cli {
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    level: Option<u64>,
    #[arg(long, global = true)]
    precision: Option<f64>,
    #[arg(long, global = true)]
    max_det: Option<u64>,
    #[arg(long, global = true)]
    max_weight: Option<u64>,
    /// Prime bound for Hecke eigensystems.
    #[arg(long, global = true)]
    bound: Option<u64>,
    /// Steps for sampled modes.
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// 0 = all cores, 1 = sequential.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// json | csv | plain
    #[arg(long, global = true)]
    format: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Continued-fraction expansion of a point of [0,1].
    Cf {
        #[arg(value_parser = parse_point)]
        x: ExtendedPoint,
    },
    /// Factor a reduced matrix `a,b,c,d`, or multiply out `--word k1,k2,…`.
    Red {
        matrix: Option<String>,
        #[arg(long)]
        word: Option<String>,
    },
    /// Hecke operator T_m on cuspidal modular symbols.
    Hecke {
        #[arg(long)]
        m: u64,
    },
    /// Dimensions and rational Hecke eigensystems.
    Symbols,
    /// L(f,1) for the first rational newform, computed two ways.
    Lvalue,
    /// Modular symbol {from, to} and its pairing with the newform.
    Pair {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        from: ExtendedPoint,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        to: ExtendedPoint,
    },
    /// Limiting modular symbol at a quadratic irrationality, or sampled averages.
    Lms {
        #[arg(long, value_parser = parse_point)]
        x: Option<ExtendedPoint>,
        #[arg(long, value_parser = parse_slot)]
        s: Option<(i64, i64)>,
        /// Birkhoff averages over `n` digits (of `--x`, or of a random point from `--seed`).
        #[arg(long)]
        sampled: bool,
    },
    /// Truncated partition function against its closed form.
    Partition {
        #[arg(long)]
        beta: f64,
    },
    /// Gibbs state of an observable at inverse temperature β > 2.
    Gibbs {
        #[arg(long)]
        beta: f64,
        #[command(flatten)]
        state: StateArgs,
    },
    /// Ground state (β = ∞) of an observable.
    Ground {
        #[command(flatten)]
        state: StateArgs,
    },
    /// End-to-end identities.
    Check {
        #[command(subcommand)]
        kind: CheckKind,
    },
    /// Partition function over a β grid, as CSV.
    Sweep {
        #[arg(long)]
        beta_from: f64,
        #[arg(long)]
        beta_to: f64,
        #[arg(long)]
        steps: usize,
    },
}

#[derive(clap::Args, Debug)]
struct StateArgs {
    #[arg(long, value_parser = parse_point)]
    x: ExtendedPoint,
    #[arg(long, value_parser = parse_slot)]
    s: Option<(i64, i64)>,
    /// Integral matrix a,b,c,d.
    #[arg(long, default_value = "1,0,0,1")]
    rho: String,
    /// Sum of terms `[coef*]unit | delta:a,b,c,d | cylinder:k1,… | slot:c:d`.
    #[arg(long, default_value = "unit")]
    observable: String,
}

#[derive(Subcommand, Debug)]
enum CheckKind {
    /// a_m·ξ(s) against the Heilbronn lift, for every slot.
    Hecke {
        #[arg(long)]
        m: u64,
        #[arg(long, value_parser = parse_point)]
        x: ExtendedPoint,
    },
    /// Boundary pairing against special values along the orbit.
    L1period {
        #[arg(long, value_parser = parse_point)]
        x: ExtendedPoint,
        #[arg(long, value_parser = parse_slot)]
        s: Option<(i64, i64)>,
    },
    /// Special-value relation (σ₁(m) − a_m)·L(1) against {0, b/d} pairings.
    Manin {
        #[arg(long)]
        m: u64,
    },
    /// Period-sum against closed-geodesic form of the limiting symbol.
    Lms {
        #[arg(long, value_parser = parse_point)]
        x: ExtendedPoint,
        #[arg(long, value_parser = parse_slot)]
        s: Option<(i64, i64)>,
    },
}

fn parse_point(s: &str) -> Result<ExtendedPoint, String> {
    s.parse::<ExtendedPoint>().map_err(|e| e.to_string())
}

fn parse_slot(s: &str) -> Result<(i64, i64), String> {
    let (c, d) = s.split_once(':').ok_or_else(|| format!("{s:?}: expected c:d"))?;
    Ok((c.trim().parse().map_err(|_| format!("{c:?} is not an integer"))?, d.trim().parse().map_err(|_| format!("{d:?} is not an integer"))?))
}

enum Failure {
    /// Exit 2.
    Usage(String),
    /// Exit 1, with the module as error code.
    Compute(&'static str, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e.code(), e.to_string())
    }
}

type Out = Result<Output, Failure>;

enum Output {
    Json(Value),
    /// Serialized as is, in declaration order (no seed field).
    Exact(String),
    Csv(String),
}

fn slot(level: u64, s: Option<(i64, i64)>) -> Result<P1Elt, Failure> {
    let (c, d) = s.unwrap_or((0, 1));
    Ok(p1_normalize(level, c, d)?)
}

fn cx(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn rats(v: &[Rat]) -> Vec<String> {
    v.iter().map(|r| r.to_string()).collect()
}

fn context(cfg: &RunConfig) -> Result<CuspContext, Failure> {
    Ok(CuspContext::new(cfg.level)?)
}

fn run(cmd: Cmd, cfg: &RunConfig) -> Out {
    match cmd {
        Cmd::Cf { x } => Ok(Output::Exact(serde_json::to_string(&cf_expand(&x)?).expect("serializable"))),
        Cmd::Red { matrix, word } => match (matrix, word) {
            (Some(m), None) => {
                let q = parse_matrix(&m).map_err(Failure::Usage)?;
                if !q.is_integral() {
                    return Err(Failure::Usage(format!("{m}: entries must be integers")));
                }
                let [a, b, c, d] = q.0.map(|r| r.to_integer());
                let mat = Mat2Z::new(a, b, c, d);
                let f = red::factor(&mat)?;
                Ok(Output::Json(json!({ "matrix": mat.to_string(), "digits": f.digits, "weight": red::weight(&mat)?.to_string(), "exact": true })))
            }
            (None, Some(w)) => {
                let digits: Vec<u64> = w
                    .split(',')
                    .map(|d| d.trim().parse::<u64>().ok().filter(|&d| d > 0))
                    .collect::<Option<_>>()
                    .ok_or_else(|| Failure::Usage(format!("--word {w:?}: digits must be positive integers")))?;
                let mat = red::product(&digits);
                Ok(Output::Json(json!({ "matrix": mat.to_string(), "digits": digits, "weight": red::weight(&mat)?.to_string(), "exact": true })))
            }
            _ => Err(Failure::Usage("red takes either a matrix a,b,c,d or --word".into())),
        },
        Cmd::Hecke { m } => {
            let space = symbol_space(cfg.level)?;
            let t = hecke_matrix(&space, m)?;
            let rows: Vec<Vec<String>> = t.iter().map(|r| rats(r)).collect();
            Ok(Output::Json(json!({ "level": cfg.level, "m": m, "heilbronn_count": heilbronn_matrices(m).len(), "matrix": rows, "exact": true })))
        }
        Cmd::Symbols => {
            let space = symbol_space(cfg.level)?;
            let systems = match eigen_decompose(&space, cfg.bound) {
                Ok(s) => json!(s),
                Err(e) => json!({ "error": { "code": e.code(), "message": e.to_string() } }),
            };
            Ok(Output::Json(json!({
                "level": cfg.level,
                "cosets": space.cosets().len(),
                "dim_full": space.dim_full(),
                "dim_cuspidal": space.dim_cuspidal(),
                "eigensystems": systems,
                "exact": true,
            })))
        }
        Cmd::Lvalue => {
            let ctx = context(cfg)?;
            let l = l_value(&ctx.space, &ctx.newform, &ctx.periods)?;
            Ok(Output::Json(json!({
                "level": cfg.level,
                "sign": ctx.newform.sign,
                "fricke": ctx.newform.fricke,
                "l1": l.value,
                "series": l.method_a,
                "periods": l.method_b,
                "discrepancy": l.discrepancy,
                "lambda1": lambda_completed(l.value),
                "error_bound": l.precision,
            })))
        }
        Cmd::Pair { from, to } => {
            let ctx = context(cfg)?;
            let v = path_to_symbol(&ctx.space, &from, &to)?;
            Ok(Output::Json(json!({
                "level": cfg.level,
                "from": from.to_string(),
                "to": to.to_string(),
                "vector": rats(&v.coords),
                "pairing": cx(ctx.pair(&v)?),
                "error_bound": ctx.periods.precision,
            })))
        }
        Cmd::Lms { x, s, sampled } => {
            let space = symbol_space(cfg.level)?;
            let s = slot(cfg.level, s)?;
            let ctx = CuspContext::new(cfg.level).ok();
            if sampled {
                let n = cfg.n;
                let digits = match &x {
                    Some(x) => digits_of(x, n + 64)?,
                    None => random_digits(cfg.seed, 2 * n + 256),
                };
                let mut marks: Vec<usize> = std::iter::successors(Some(10usize), |k| k.checked_mul(10)).take_while(|&k| k < n).collect();
                marks.push(n);
                let avg = lms_sampled(&space, &digits, &s, n, &marks)?;
                let rows: Vec<Value> = avg
                    .checkpoints
                    .iter()
                    .zip(&avg.lyapunov)
                    .map(|((k, v), lyap)| {
                        let pairing = ctx.as_ref().map(|c| cx(cusp::pair_f64(&c.periods, v)));
                        json!({ "n": k, "average": v, "lyapunov": lyap, "pairing": pairing })
                    })
                    .collect();
                let point = x.map(|x| x.to_string()).unwrap_or_else(|| "random".into());
                Ok(Output::Json(json!({ "level": cfg.level, "x": point, "s": s.to_string(), "checkpoints": rows, "error_bound": "statistical" })))
            } else {
                let x = x.ok_or_else(|| Failure::Usage("lms needs --x (or --sampled)".into()))?;
                let l = lms_quadratic(&space, &x, &s)?;
                let pairing = match &ctx {
                    Some(c) => Some(cx(c.pair(&l.vector)? / l.normalizer.numeric)),
                    None => None,
                };
                Ok(Output::Json(json!({
                    "level": cfg.level,
                    "x": x.to_string(),
                    "s": s.to_string(),
                    "preperiod": l.preperiod,
                    "period": l.period,
                    "repeats": l.repeats,
                    "vector": rats(&l.vector.coords),
                    "normalizer": l.normalizer,
                    "one_period_vector": rats(&l.one_period_vector.coords),
                    "one_period_normalizer": l.one_period_normalizer,
                    "value": l.value(),
                    "pairing": pairing,
                    "exact": true,
                })))
            }
        }
        Cmd::Partition { beta } => {
            let r = partition_function(beta, cfg.max_det.unwrap_or(10_000), cfg.max_weight.unwrap_or(10_000))?;
            Ok(Output::Json(serde_json::to_value(r).expect("serializable")))
        }
        Cmd::Gibbs { beta, state } => {
            let (f, rho, s) = state_inputs(&state, cfg)?;
            let t = Truncation { max_det: cfg.max_det.unwrap_or(12), max_weight: cfg.max_weight.unwrap_or(12) };
            let v = gibbs_state(&f, beta, &rho, &state.x, &s, t)?;
            Ok(Output::Json(json!({ "beta": beta, "x": state.x.to_string(), "s": s.to_string(), "truncation": t, "value": cx(v.value), "error_bound": v.truncation_error })))
        }
        Cmd::Ground { state } => {
            let (f, rho, s) = state_inputs(&state, cfg)?;
            let v = ground_state(&f, &rho, &state.x, &s)?;
            let exact = ground_state_exact(&f, &rho, &state.x, &s).ok().map(|c| json!({ "re": c.re.to_string(), "im": c.im.to_string() }));
            Ok(Output::Json(json!({ "x": state.x.to_string(), "s": s.to_string(), "value": cx(v.value), "exact": exact })))
        }
        Cmd::Check { kind } => check(kind, cfg),
        Cmd::Sweep { beta_from, beta_to, steps } => {
            let rows = sweep(beta_from, beta_to, steps, cfg.max_det.unwrap_or(2000), cfg.max_weight.unwrap_or(2000))?;
            if cfg.format.as_deref() == Some("json") {
                return Ok(Output::Json(json!({ "rows": rows })));
            }
            let mut out = String::from("beta,Z_truncated,Z_closed,relative_gap\n");
            for r in rows {
                out.push_str(&format!("{},{:.12e},{:.12e},{:.6e}\n", r.beta, r.truncated, r.closed_form, r.relative_gap));
            }
            Ok(Output::Csv(out))
        }
    }
}

fn state_inputs(a: &StateArgs, cfg: &RunConfig) -> Result<(gl2_boundary::qsm::Observable, QMat2, P1Elt), Failure> {
    let f = parse_observable(cfg.level, &a.observable).map_err(Failure::Usage)?;
    let rho = parse_matrix(&a.rho).map_err(Failure::Usage)?;
    Ok((f, rho, slot(cfg.level, a.s)?))
}

fn check(kind: CheckKind, cfg: &RunConfig) -> Out {
    let tol = cfg.precision;
    let v = match kind {
        CheckKind::Hecke { m, x } => {
            let h = hecke_eigen_check(&context(cfg)?, m, &x)?;
            json!({
                "check": "hecke",
                "level": h.level,
                "m": m,
                "a_m": h.a_m,
                "residual": h.pointwise_residual,
                "chain_residual": h.chain_residual,
                "chain_exact": h.chain_exact,
                "pass": h.pointwise_residual < tol,
                "chain_pass": h.chain_residual < tol,
                "slots": h.slots,
            })
        }
        CheckKind::L1period { x, s } => {
            let ctx = context(cfg)?;
            let r = l1_period_check(&ctx, &x, &slot(cfg.level, s)?)?;
            json!({
                "check": "l1period",
                "level": r.level,
                "x": r.x,
                "s": r.s.to_string(),
                "lhs": cx(r.lhs),
                "rhs": cx(r.rhs),
                "residual": r.residual,
                "orbit_length": r.n,
                "pass": r.residual < tol,
            })
        }
        CheckKind::Manin { m } => {
            let ctx = context(cfg)?;
            let r = manin_relation_check(&ctx.space, &ctx.newform, &ctx.periods, m)?;
            json!({ "check": "manin", "level": cfg.level, "m": m, "residual": r, "pass": r < tol })
        }
        CheckKind::Lms { x, s } => {
            let space = symbol_space(cfg.level)?;
            let f = lms_forms(&space, &x, &slot(cfg.level, s)?)?;
            let agree = f.period_sum == f.closed_geodesic && f.one_period_sum == f.one_period_geodesic;
            let gap = (f.lyapunov_length - f.normalizer.numeric).abs();
            json!({
                "check": "lms",
                "level": cfg.level,
                "x": x.to_string(),
                "period_sum": rats(&f.period_sum.coords),
                "closed_geodesic": rats(&f.closed_geodesic.coords),
                "forms_agree": agree,
                "eigenvalue_power_exact": f.eigenvalue_power_exact,
                "normalizer": f.normalizer,
                "lyapunov_gap": gap,
                "pass": agree && f.eigenvalue_power_exact && gap < tol,
            })
        }
    };
    Ok(Output::Json(v))
}

fn configure(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    if let Some(p) = &cli.config {
        cfg.load_file(p)?;
    }
    cfg.load_env()?;
    let flags: [(&str, Option<String>); 9] = [
        ("level", cli.level.map(|v| v.to_string())),
        ("precision", cli.precision.map(|v| v.to_string())),
        ("max_det", cli.max_det.map(|v| v.to_string())),
        ("max_weight", cli.max_weight.map(|v| v.to_string())),
        ("bound", cli.bound.map(|v| v.to_string())),
        ("n", cli.n.map(|v| v.to_string())),
        ("seed", cli.seed.map(|v| v.to_string())),
        ("threads", cli.threads.map(|v| v.to_string())),
        ("format", cli.format.clone()),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, &v)?;
        }
    }
    Ok(cfg)
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}\n\nFor more information, try 'gl2b --help'.");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match configure(&cli) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let is_sweep = matches!(cli.cmd, Cmd::Sweep { .. });
    if cfg.format.as_deref() == Some("csv") && !is_sweep {
        return usage_error("csv output is only available for sweep");
    }
    par::configure_threads(cfg.threads);
    let pretty = cfg.format.as_deref() == Some("plain");
    let render = |v: &Value| if pretty { serde_json::to_string_pretty(v) } else { serde_json::to_string(v) }.expect("json");
    // a closed pipe downstream is not an error
    let emit = |s: &str| {
        let _ = std::io::stdout().lock().write_all(s.as_bytes());
    };
    match run(cli.cmd, &cfg) {
        Ok(Output::Exact(s)) => emit(&format!("{s}\n")),
        Ok(Output::Json(mut v)) => {
            if let Value::Object(m) = &mut v {
                m.insert("seed".into(), json!(cfg.seed));
            }
            emit(&format!("{}\n", render(&v)));
        }
        Ok(Output::Csv(s)) => emit(&s),
        Err(Failure::Usage(msg)) => return usage_error(&msg),
        Err(Failure::Compute(code, message)) => {
            emit(&format!("{}\n", json!({ "error": { "code": code, "message": message } })));
            return ExitCode::from(1);
        }
    }
    ExitCode::SUCCESS
}
