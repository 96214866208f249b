//! Thin command-line surface over the library: parse a model document,
//! dispatch one command, print a single JSON report on standard output.
//! Diagnostics go to standard error; exit codes distinguish validation
//! failures (2), inadmissible lambda (3), cost ceilings (4) and parse
//! errors (5).

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use multispin::builders;
use multispin::error::Error;
use multispin::exact;
use multispin::formats::{
    self, GaussianModelDoc, PlanDoc, RunReport, SpinModelDoc,
};
use multispin::gaussian;
use multispin::interpolate;
use multispin::moments::{moment_sequence, MomentRequest};
use multispin::spinmodel::{magnitude_bounds, validate_system, zero_free_radius};

#[derive(Parser)]
#[command(name = "multispin", about = "Partition functions of multi-spin systems", version)]
struct Cli {
    /// Worker threads (accepted for interface stability; evaluation is
    /// deterministic and result-invariant in this setting)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural and Lipschitz admissibility report for a model file
    Validate { model: String },
    /// Zero-free radius and log-scale magnitude bounds
    Bound {
        model: String,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long, default_value_t = 0.0)]
        lambda_modulus: f64,
    },
    /// Interpolation approximation of log E e^{lambda f}
    Approx {
        model: String,
        #[arg(long, default_value_t = 0.0)]
        lambda_re: f64,
        #[arg(long, default_value_t = 0.0)]
        lambda_im: f64,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
    },
    /// Exact partition value by full enumeration
    Exact {
        model: String,
        #[arg(long, default_value_t = 0.0)]
        lambda_re: f64,
        #[arg(long, default_value_t = 0.0)]
        lambda_im: f64,
    },
    /// Power moments E f^s for s = 0..order
    Moments {
        model: String,
        #[arg(long)]
        order: usize,
    },
    /// Scan a disc of the lambda plane for zeros of E e^{lambda f}
    Zeros {
        model: String,
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = 24)]
        grid: usize,
    },
    /// Gaussian-measure commands
    #[command(subcommand)]
    Gauss(GaussCommand),
    /// Model constructors; the built model document is the report payload
    #[command(subcommand)]
    Build(BuildCommand),
    /// Nearest-zero decay experiment on the lifted Boolean-cube family
    Optimality {
        /// comma-separated coordinate counts, e.g. 64,256,1024
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, default_value_t = 24)]
        grid: usize,
    },
}

#[derive(Subcommand)]
enum GaussCommand {
    /// Interpolation approximation under the standard Gaussian measure
    Approx {
        model: String,
        #[arg(long, default_value_t = 0.0)]
        lambda_re: f64,
        #[arg(long, default_value_t = 0.0)]
        lambda_im: f64,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long)]
        truncation: Option<f64>,
        #[arg(long, default_value_t = 64)]
        nodes: usize,
    },
    /// Dense-quadrature oracle (n <= 3)
    Exact {
        model: String,
        #[arg(long, default_value_t = 0.0)]
        lambda_re: f64,
        #[arg(long, default_value_t = 0.0)]
        lambda_im: f64,
        #[arg(long, default_value_t = 64)]
        nodes: usize,
    },
    /// Zero-free radius and magnitude bounds for a Gaussian model
    Bound {
        model: String,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long, default_value_t = 0.0)]
        lambda_modulus: f64,
        /// factor bound L entering the magnitude envelope
        #[arg(long, default_value_t = 1.0)]
        level: f64,
    },
}

#[derive(Subcommand)]
enum BuildCommand {
    /// Pairwise spin system from a weighted graph file
    Ising { graph: String },
    /// Tilted perfect-matching system from a hypergraph file
    Matching {
        hypergraph: String,
        #[arg(long)]
        mu: f64,
        /// uniform edge selection probability
        #[arg(long, default_value_t = 0.5)]
        prob: f64,
    },
    /// Pairwise-distance Gaussian model for N particles in d dimensions
    Particles {
        #[arg(long)]
        particles: usize,
        #[arg(long, default_value_t = 1)]
        dim: usize,
    },
    /// Product integrand with factors ||x_i| - 1|
    Absint {
        #[arg(long)]
        n: usize,
    },
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Structural(_) | Error::Inadmissible(_) => 2,
        Error::LambdaOutOfRange { .. } => 3,
        Error::CostCeiling { .. } | Error::DegreeCeiling { .. } => 4,
        Error::Parse(_) => 5,
        _ => 2,
    }
}

fn read_file(path: &str) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))
}

fn plan_doc(plan: &interpolate::ApproxPlan) -> PlanDoc {
    PlanDoc {
        truncation_degree: plan.truncation_degree,
        interpolation_degree: plan.interpolation_degree,
        rho: plan.rho,
        beta: plan.beta,
        radius: plan.radius,
        log_lower_beta: plan.log_lower_beta,
    }
}

fn run(cli: Cli) -> Result<RunReport, Error> {
    match cli.command {
        Command::Validate { model } => {
            let system = formats::parse_spin_model(&read_file(&model)?)?;
            let report = validate_system(&system);
            let admissible = report.is_admissible();
            let payload = serde_json::json!({
                "n": report.n,
                "m": report.m,
                "q": report.q,
                "r": report.r,
                "c": report.c,
                "admissible": admissible,
                "lipschitz_ok": report.lipschitz_ok,
                "worst_violation": report.worst_violation,
                "structural": report.structural,
            });
            if !admissible {
                eprintln!("model is not admissible");
            }
            Ok(RunReport {
                command: "validate".into(),
                exit_code: if admissible { 0 } else { 2 },
                validation: Some(payload),
                ..Default::default()
            })
        }
        Command::Bound {
            model,
            delta,
            lambda_modulus,
        } => {
            let system = formats::parse_spin_model(&read_file(&model)?)?;
            let report = validate_system(&system);
            if !report.is_admissible() {
                return Err(Error::Inadmissible("validation failed".into()));
            }
            let radius = zero_free_radius(report.r, report.c, delta)?;
            let (upper, lower) = magnitude_bounds(&system, lambda_modulus)?;
            Ok(RunReport {
                command: "bound".into(),
                exit_code: 0,
                radius: Some(radius),
                log_upper: Some(upper),
                log_lower: Some(lower),
                ..Default::default()
            })
        }
        Command::Approx {
            model,
            lambda_re,
            lambda_im,
            epsilon,
            delta,
        } => {
            let system = formats::parse_spin_model(&read_file(&model)?)?;
            let lambda = Complex64::new(lambda_re, lambda_im);
            let report = interpolate::approximate_partition(&system, lambda, epsilon, delta)?;
            Ok(RunReport {
                command: "approx".into(),
                exit_code: 0,
                value: Some([report.value.re, report.value.im]),
                log_value: Some([report.log_value.re, report.log_value.im]),
                epsilon: Some(report.epsilon_guarantee),
                plan: Some(plan_doc(&report.plan)),
                runtime_ms: Some(report.runtime_ms),
                ..Default::default()
            })
        }
        Command::Exact {
            model,
            lambda_re,
            lambda_im,
        } => {
            let system = formats::parse_spin_model(&read_file(&model)?)?;
            let value =
                exact::exact_partition(&system, Complex64::new(lambda_re, lambda_im))?;
            Ok(RunReport {
                command: "exact".into(),
                exit_code: 0,
                value: Some([value.re, value.im]),
                ..Default::default()
            })
        }
        Command::Moments { model, order } => {
            let system = formats::parse_spin_model(&read_file(&model)?)?;
            let sequence = moment_sequence(&MomentRequest::new(&system, order))?;
            Ok(RunReport {
                command: "moments".into(),
                exit_code: 0,
                moments: Some(sequence.values.iter().map(|v| [v.re, v.im]).collect()),
                ..Default::default()
            })
        }
        Command::Zeros { model, radius, grid } => {
            let system = formats::parse_spin_model(&read_file(&model)?)?;
            let report = exact::scan_zeros(&system, radius, grid)?;
            Ok(RunReport {
                command: "zeros".into(),
                exit_code: 0,
                zeros: Some(
                    report
                        .zeros
                        .iter()
                        .map(|z| [z.z.re, z.z.im])
                        .collect(),
                ),
                min_zero_modulus: report.min_modulus_zero.map(|z| z.norm()),
                radius: Some(report.disc_radius),
                ..Default::default()
            })
        }
        Command::Gauss(sub) => run_gauss(sub),
        Command::Build(sub) => run_build(sub),
        Command::Optimality { n, grid } => {
            if n.is_empty() {
                return Err(Error::Domain("need at least one n".into()));
            }
            eprintln!("solving the half-line tilt equation");
            let config = builders::solve_psi_equation(4.0, 1e-10)?;
            let config = builders::calibrate_truncation(&config)?;
            let rows = builders::optimality_experiment(&config, &n, grid)?;
            let payload: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    serde_json::json!({
                        "n": row.n,
                        "min_zero_modulus": row.min_zero_modulus,
                        "envelope": row.envelope,
                    })
                })
                .collect();
            Ok(RunReport {
                command: "optimality".into(),
                exit_code: 0,
                rows: Some(serde_json::Value::Array(payload)),
                ..Default::default()
            })
        }
    }
}

fn run_gauss(sub: GaussCommand) -> Result<RunReport, Error> {
    match sub {
        GaussCommand::Approx {
            model,
            lambda_re,
            lambda_im,
            epsilon,
            delta,
            truncation,
            nodes,
        } => {
            let gmodel = formats::parse_gaussian_model(&read_file(&model)?)?;
            let rule = gaussian::QuadratureRule::kink_resilient(nodes);
            let report = gaussian::approximate_gaussian_partition(
                &gmodel,
                Complex64::new(lambda_re, lambda_im),
                epsilon,
                delta,
                truncation,
                &rule,
            )?;
            Ok(RunReport {
                command: "gauss approx".into(),
                exit_code: 0,
                value: Some([report.value.re, report.value.im]),
                log_value: Some([report.log_value.re, report.log_value.im]),
                epsilon: Some(report.epsilon_guarantee),
                plan: Some(plan_doc(&report.plan)),
                quadrature_residual: report.quadrature_residual,
                runtime_ms: Some(report.runtime_ms),
                ..Default::default()
            })
        }
        GaussCommand::Exact {
            model,
            lambda_re,
            lambda_im,
            nodes,
        } => {
            let gmodel = formats::parse_gaussian_model(&read_file(&model)?)?;
            let value = gaussian::exact_gaussian_partition(
                &gmodel,
                Complex64::new(lambda_re, lambda_im),
                nodes,
            )?;
            Ok(RunReport {
                command: "gauss exact".into(),
                exit_code: 0,
                value: Some([value.re, value.im]),
                ..Default::default()
            })
        }
        GaussCommand::Bound {
            model,
            delta,
            lambda_modulus,
            level,
        } => {
            let gmodel = formats::parse_gaussian_model(&read_file(&model)?)?;
            gaussian::validate_gaussian(&gmodel)?;
            let radius =
                gaussian::gaussian_zero_free_radius(gmodel.arity(), gmodel.multiplicity(), delta)?;
            let (upper, lower) =
                gaussian::gaussian_magnitude_bounds(&gmodel, level, lambda_modulus)?;
            Ok(RunReport {
                command: "gauss bound".into(),
                exit_code: 0,
                radius: Some(radius),
                log_upper: Some(upper),
                log_lower: Some(lower),
                ..Default::default()
            })
        }
    }
}

fn run_build(sub: BuildCommand) -> Result<RunReport, Error> {
    match sub {
        BuildCommand::Ising { graph } => {
            let doc = formats::parse_ising_graph(&read_file(&graph)?)?;
            let system = builders::build_ising(doc.num_vertices, &doc.edges, &doc.field)?;
            Ok(RunReport {
                command: "build ising".into(),
                exit_code: 0,
                model: Some(serde_json::to_value(SpinModelDoc::from_system(&system)).unwrap()),
                ..Default::default()
            })
        }
        BuildCommand::Matching {
            hypergraph,
            mu,
            prob,
        } => {
            let h = formats::parse_hypergraph(&read_file(&hypergraph)?)?;
            let probs = vec![prob; h.edges.len()];
            let tilt = builders::build_matching_tilt(&h, mu, &probs)?;
            if !tilt.lambda_admissible {
                eprintln!(
                    "warning: mu = {} exceeds the zero-free radius {}; \
                     approximation guarantees do not apply",
                    tilt.lambda, tilt.radius
                );
            }
            let payload = serde_json::json!({
                "model": SpinModelDoc::from_system(&tilt.system),
                "lambda": tilt.lambda,
                "lambda_admissible": tilt.lambda_admissible,
                "radius": tilt.radius,
            });
            Ok(RunReport {
                command: "build matching".into(),
                exit_code: 0,
                model: Some(payload),
                ..Default::default()
            })
        }
        BuildCommand::Particles { particles, dim } => {
            let model = builders::build_particles(particles, dim)?;
            Ok(RunReport {
                command: "build particles".into(),
                exit_code: 0,
                model: Some(serde_json::to_value(GaussianModelDoc::from_model(&model)).unwrap()),
                ..Default::default()
            })
        }
        BuildCommand::Absint { n } => {
            let model = builders::build_abs_integrand(n)?;
            Ok(RunReport {
                command: "build absint".into(),
                exit_code: 0,
                model: Some(serde_json::to_value(GaussianModelDoc::from_model(&model)).unwrap()),
                ..Default::default()
            })
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            std::process::exit(report.exit_code);
        }
        Err(err) => {
            let code = exit_code_for(&err);
            eprintln!("error: {err}");
            let report = RunReport {
                command: "error".into(),
                exit_code: code,
                ..Default::default()
            };
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            std::process::exit(code);
        }
    }
}
