//! Command-line front end for the two-identical-cars barrier library.
//!
//! Every subcommand is a reproducible file-emitting computation: given
//! identical flags (and seed), the output is byte-identical. Reals are
//! printed with 17 significant digits; CSV always carries a header row
//! and JSON output is a single object tagged with `"schema_version": 1`.
//!
//! Exit codes: 0 success, 2 domain errors, 3 audit failures, 64 usage
//! errors. The environment variable `BARRIER_TOL` overrides the root
//! solver tolerance globally.

// `!(x < gate)` fails closed on NaN; audit verdicts depend on that.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use gtic::classify::{classify, optimal_controls};
use gtic::kinematics::{radial_distance, State};
use gtic::sim::{
    self, oracle_probe_sweep, round_trip_sweep, semipermeability_sweep, simulate_barrier_policy,
    OracleConfig, OracleOutcome, Termination,
};
use gtic::{BarrierModel, LayerConfig, PieceId, PieceParams, SlicePoint};
use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gtic",
    about = "Analytical barrier of the game of two identical cars",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputOpts {
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Junction constants, regime and critical angles for a capture radius.
    Constants {
        #[arg(long, allow_hyphen_values = true)]
        ell: f64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Sample a heading slice of the barrier into labeled points.
    Slice {
        #[arg(long, allow_hyphen_values = true)]
        ell: f64,
        /// Slice heading in radians.
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        /// Samples per active surface piece.
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Classify a state against the barrier layer.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        ell: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        /// Heading in radians.
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        /// Relative layer width.
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Optimal feedback controls on the barrier at a state.
    Controls {
        #[arg(long, allow_hyphen_values = true)]
        ell: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Integrate the game forward under a control policy.
    Simulate {
        #[arg(long, allow_hyphen_values = true)]
        ell: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        /// Integration step.
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Time horizon.
        #[arg(long, default_value_t = 10.0)]
        tmax: f64,
        /// `barrier` for the feedback law, or `fixed:<u>,<v>`.
        #[arg(long, default_value = "barrier")]
        policy: String,
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Numerical audits: residual sweeps, chart round trips, and optional
    /// discretized-game probes.
    Audit {
        #[arg(long, allow_hyphen_values = true)]
        ell: f64,
        /// Samples per piece for the sweeps.
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Barrier points probed by the discretized game (0 skips it).
        #[arg(long, default_value_t = 0)]
        oracle_probes: usize,
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        #[command(flatten)]
        output: OutputOpts,
    },
}

/// 17-significant-digit rendering used for every real in the output.
fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn side_label(piece: PieceId) -> &'static str {
    match piece.side() {
        Some(gtic::Side::Plus) => "1",
        Some(gtic::Side::Minus) => "-1",
        None => "0",
    }
}

struct JsonObject {
    buf: String,
    first: bool,
}

impl JsonObject {
    fn new() -> Self {
        Self {
            buf: String::from("{\"schema_version\": 1"),
            first: false,
        }
    }

    fn nested() -> Self {
        Self {
            buf: String::from("{"),
            first: true,
        }
    }

    fn field(&mut self, key: &str, raw: &str) -> &mut Self {
        if !self.first {
            self.buf.push_str(", ");
        } else {
            self.first = false;
        }
        let _ = write!(self.buf, "\"{key}\": {raw}");
        self
    }

    fn string(&mut self, key: &str, value: &str) -> &mut Self {
        self.field(key, &format!("\"{value}\""))
    }

    fn number(&mut self, key: &str, value: f64) -> &mut Self {
        self.field(key, &real(value))
    }

    fn finish(mut self) -> String {
        self.buf.push('}');
        self.buf
    }
}

fn json_array(items: impl IntoIterator<Item = String>) -> String {
    let mut out = String::from("[");
    for (i, item) in items.into_iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&item);
    }
    out.push(']');
    out
}

enum Failure {
    Lib(gtic::Error),
    Usage(String),
    Io(std::io::Error),
}

impl From<gtic::Error> for Failure {
    fn from(e: gtic::Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn emit(output: &OutputOpts, body: &str) -> Result<(), Failure> {
    match &output.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(body.as_bytes())?;
            if !body.ends_with('\n') {
                f.write_all(b"\n")?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            if !body.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn constants(ell: f64, output: &OutputOpts) -> Result<u8, Failure> {
    let model = BarrierModel::build(ell)?;
    let (w, m, n) = model.regime_roots();
    let body = match output.format {
        Format::Json => {
            let mut o = JsonObject::new();
            o.number("ell", model.ell())
                .string("regime", &model.regime().to_string())
                .number("theta_j", model.theta_j())
                .number("ell_j", model.ell_j())
                .number("theta1", model.theta1())
                .number("theta2", model.theta2())
                .number("theta12", model.theta12())
                .number("theta21", model.theta21())
                .field("w", &w.map(real).unwrap_or_else(|| "null".into()))
                .field("m", &m.map(real).unwrap_or_else(|| "null".into()))
                .field("n", &n.map(real).unwrap_or_else(|| "null".into()));
            o.finish()
        }
        Format::Csv => {
            let mut s =
                String::from("ell,regime,theta_j,ell_j,theta1,theta2,theta12,theta21,w,m,n\n");
            let opt = |v: Option<f64>| v.map(real).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{}",
                real(model.ell()),
                model.regime(),
                real(model.theta_j()),
                real(model.ell_j()),
                real(model.theta1()),
                real(model.theta2()),
                real(model.theta12()),
                real(model.theta21()),
                opt(w),
                opt(m),
                opt(n),
            );
            s
        }
    };
    emit(output, &body)?;
    Ok(0)
}

fn slice_rows(points: &[SlicePoint]) -> Vec<[String; 10]> {
    points
        .iter()
        .map(|p| {
            let (tau, vartheta) = match p.params {
                PieceParams::Surface(sp) => (real(sp.tau), real(sp.vartheta)),
                PieceParams::Scalar(v) => match p.piece {
                    // Boundary curves sit at retrograde time zero.
                    PieceId::Bup(_) | PieceId::BupAligned => (real(0.0), real(v)),
                    _ => (String::new(), real(v)),
                },
            };
            let (nu_x, nu_y, nu_theta) = match p.normal {
                Some(nu) => (real(nu.nu_x), real(nu.nu_y), real(nu.nu_theta)),
                None => (String::new(), String::new(), String::new()),
            };
            [
                real(p.z.theta()),
                p.piece.label().to_string(),
                side_label(p.piece).to_string(),
                tau,
                vartheta,
                real(p.z.x),
                real(p.z.y),
                nu_x,
                nu_y,
                nu_theta,
            ]
        })
        .collect()
}

fn slice(ell: f64, theta: f64, n: usize, output: &OutputOpts) -> Result<u8, Failure> {
    if n < 2 {
        return Err(Failure::Usage("--n must be at least 2".into()));
    }
    let model = BarrierModel::build(ell)?;
    let points = model.slice(theta, n);
    let rows = slice_rows(&points);
    const HEADER: [&str; 10] = [
        "theta_slice",
        "piece",
        "side",
        "tau",
        "vartheta",
        "x",
        "y",
        "nu_x",
        "nu_y",
        "nu_theta",
    ];
    let body = match output.format {
        Format::Csv => {
            let mut s = HEADER.join(",");
            s.push('\n');
            for row in &rows {
                s.push_str(&row.join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let items = rows.iter().map(|row| {
                let mut o = JsonObject::nested();
                for (key, value) in HEADER.iter().zip(row.iter()) {
                    if value.is_empty() {
                        o.field(key, "null");
                    } else if *key == "piece" {
                        o.string(key, value);
                    } else {
                        o.field(key, value);
                    }
                }
                o.finish()
            });
            let mut o = JsonObject::new();
            o.number("ell", ell)
                .number("theta", gtic::kinematics::wrap_angle(theta))
                .field("points", &json_array(items));
            o.finish()
        }
    };
    emit(output, &body)?;
    Ok(0)
}

fn classify_cmd(
    ell: f64,
    x: f64,
    y: f64,
    theta: f64,
    delta: f64,
    output: &OutputOpts,
) -> Result<u8, Failure> {
    let model = BarrierModel::build(ell)?;
    let cfg = LayerConfig::with_delta(delta);
    let z = State::new(x, y, theta);
    let matched = classify(&model, &z, &cfg)?;
    let body = match output.format {
        Format::Json => {
            let mut o = JsonObject::new();
            o.field("matched", if matched.is_some() { "true" } else { "false" });
            match &matched {
                Some(m) => {
                    o.string("family", m.piece.label())
                        .field("side", side_label(m.piece))
                        .number("ell_recovered", m.ell_recovered)
                        .number("layer_excess", m.layer_excess)
                        .string("u_set", &m.u_set.to_string())
                        .string("v_set", &m.v_set.to_string());
                }
                None => {
                    o.field("family", "null")
                        .field("side", "null")
                        .field("ell_recovered", "null")
                        .field("layer_excess", "null")
                        .field("u_set", "null")
                        .field("v_set", "null");
                }
            }
            o.finish()
        }
        Format::Csv => {
            let mut s =
                String::from("matched,family,side,ell_recovered,layer_excess,u_set,v_set\n");
            match &matched {
                Some(m) => {
                    let _ = writeln!(
                        s,
                        "true,{},{},{},{},\"{}\",\"{}\"",
                        m.piece.label(),
                        side_label(m.piece),
                        real(m.ell_recovered),
                        real(m.layer_excess),
                        m.u_set,
                        m.v_set
                    );
                }
                None => s.push_str("false,,,,,,\n"),
            }
            s
        }
    };
    emit(output, &body)?;
    Ok(0)
}

fn controls_cmd(
    ell: f64,
    x: f64,
    y: f64,
    theta: f64,
    delta: f64,
    output: &OutputOpts,
) -> Result<u8, Failure> {
    let model = BarrierModel::build(ell)?;
    let cfg = LayerConfig::with_delta(delta);
    let z = State::new(x, y, theta);
    let m = classify(&model, &z, &cfg)?.ok_or(gtic::Error::NotOnBarrier)?;
    let (u_set, v_set) = optimal_controls(&model, &z, &cfg)?;
    let body = match output.format {
        Format::Json => {
            let mut o = JsonObject::new();
            o.string("family", m.piece.label())
                .field("side", side_label(m.piece))
                .string("u_set", &u_set.to_string())
                .string("v_set", &v_set.to_string());
            o.finish()
        }
        Format::Csv => {
            format!(
                "family,side,u_set,v_set\n{},{},\"{}\",\"{}\"\n",
                m.piece.label(),
                side_label(m.piece),
                u_set,
                v_set
            )
        }
    };
    emit(output, &body)?;
    Ok(0)
}

enum Policy {
    Barrier,
    Fixed(f64, f64),
}

fn parse_policy(s: &str) -> Result<Policy, Failure> {
    if s == "barrier" {
        return Ok(Policy::Barrier);
    }
    if let Some(rest) = s.strip_prefix("fixed:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() == 2 {
            if let (Ok(u), Ok(v)) = (parts[0].parse::<f64>(), parts[1].parse::<f64>()) {
                return Ok(Policy::Fixed(u, v));
            }
        }
    }
    Err(Failure::Usage(format!(
        "invalid --policy '{s}': expected 'barrier' or 'fixed:<u>,<v>'"
    )))
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    ell: f64,
    x: f64,
    y: f64,
    theta: f64,
    dt: f64,
    tmax: f64,
    policy: &str,
    delta: f64,
    output: &OutputOpts,
) -> Result<u8, Failure> {
    if dt <= 0.0 || tmax <= 0.0 {
        return Err(Failure::Usage("--dt and --tmax must be positive".into()));
    }
    let policy = parse_policy(policy)?;
    let model = BarrierModel::build(ell)?;
    let z0 = State::new(x, y, theta);
    let traj = match policy {
        Policy::Barrier => {
            let cfg = LayerConfig::with_delta(delta);
            simulate_barrier_policy(&model, &z0, &cfg, dt, tmax)?
        }
        Policy::Fixed(u, v) => sim::integrate(&z0, |_| u, |_| v, dt, tmax, ell)?,
    };
    let termination = match traj.termination {
        Termination::Captured(t) => format!("captured:{}", real(t)),
        Termination::HorizonReached => "horizon".to_string(),
        Termination::LeftLayer(t) => format!("left_layer:{}", real(t)),
    };
    let body = match output.format {
        Format::Csv => {
            let mut s = String::from("t,x,y,theta,r,termination\n");
            let last = traj.samples.len() - 1;
            for (i, (t, z)) in traj.samples.iter().enumerate() {
                let term = if i == last { termination.as_str() } else { "" };
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    real(*t),
                    real(z.x),
                    real(z.y),
                    real(z.theta()),
                    real(radial_distance(z)),
                    term
                );
            }
            s
        }
        Format::Json => {
            let items = traj.samples.iter().map(|(t, z)| {
                let mut o = JsonObject::nested();
                o.number("t", *t)
                    .number("x", z.x)
                    .number("y", z.y)
                    .number("theta", z.theta())
                    .number("r", radial_distance(z));
                o.finish()
            });
            let mut o = JsonObject::new();
            o.number("ell", ell)
                .string("termination", &termination)
                .field("samples", &json_array(items));
            o.finish()
        }
    };
    emit(output, &body)?;
    Ok(0)
}

const RESIDUAL_GATE: f64 = 1e-9;
const ROUND_TRIP_GATE: f64 = 1e-9;

fn audit(
    ell: f64,
    n: usize,
    seed: u64,
    oracle_probes: usize,
    delta: f64,
    output: &OutputOpts,
) -> Result<u8, Failure> {
    let model = BarrierModel::build(ell)?;
    let cfg = LayerConfig::with_delta(delta);
    let residuals = semipermeability_sweep(&model, n, seed);
    let round_trips = round_trip_sweep(&model, &cfg, n, seed);
    let oracle_cfg = OracleConfig::default();
    let probes = if oracle_probes > 0 {
        oracle_probe_sweep(&model, oracle_probes, 0.05, &oracle_cfg, seed)
    } else {
        Vec::new()
    };

    let mut failed = false;
    for a in &residuals {
        failed |= !(a.max_residual < RESIDUAL_GATE);
    }
    for a in &round_trips {
        failed |= !(a.max_error < ROUND_TRIP_GATE) || a.frame_misses > 0;
    }
    // A decided oracle verdict must match the displacement side: positive
    // displacements point to the escape side.
    for p in &probes {
        match p.outcome {
            OracleOutcome::Capture => failed |= p.displacement > 0.0,
            OracleOutcome::Escape => failed |= p.displacement < 0.0,
            OracleOutcome::Undecided => {}
        }
    }

    let body = match output.format {
        Format::Json => {
            let res_items = residuals.iter().map(|a| {
                let mut o = JsonObject::nested();
                o.string("piece", a.piece.label())
                    .field("side", side_label(a.piece))
                    .field("samples", &a.samples.to_string())
                    .number("max_residual", a.max_residual);
                o.finish()
            });
            let rt_items = round_trips.iter().map(|a| {
                let mut o = JsonObject::nested();
                o.string("piece", a.piece.label())
                    .field("side", side_label(a.piece))
                    .field("samples", &a.samples.to_string())
                    .number("max_error", a.max_error)
                    .field("frame_misses", &a.frame_misses.to_string());
                o.finish()
            });
            let probe_items = probes.iter().map(|p| {
                let mut o = JsonObject::nested();
                o.string("piece", p.piece.label())
                    .field("side", side_label(p.piece))
                    .number("displacement", p.displacement)
                    .number("x", p.z.x)
                    .number("y", p.z.y)
                    .number("theta", p.z.theta())
                    .string("outcome", &p.outcome.to_string());
                o.finish()
            });
            let mut o = JsonObject::new();
            o.number("ell", ell)
                .field("seed", &seed.to_string())
                .field("passed", if failed { "false" } else { "true" })
                .field("residuals", &json_array(res_items))
                .field("round_trips", &json_array(rt_items))
                .field("oracle", &json_array(probe_items));
            o.finish()
        }
        Format::Csv => {
            let mut s = String::from("section,piece,side,samples,metric,value\n");
            for a in &residuals {
                let _ = writeln!(
                    s,
                    "residual,{},{},{},max_residual,{}",
                    a.piece.label(),
                    side_label(a.piece),
                    a.samples,
                    real(a.max_residual)
                );
            }
            for a in &round_trips {
                let _ = writeln!(
                    s,
                    "round_trip,{},{},{},max_error,{}",
                    a.piece.label(),
                    side_label(a.piece),
                    a.samples,
                    real(a.max_error)
                );
                let _ = writeln!(
                    s,
                    "round_trip,{},{},{},frame_misses,{}",
                    a.piece.label(),
                    side_label(a.piece),
                    a.samples,
                    a.frame_misses
                );
            }
            for p in &probes {
                let _ = writeln!(
                    s,
                    "oracle,{},{},1,displacement_{},{}",
                    p.piece.label(),
                    side_label(p.piece),
                    real(p.displacement),
                    p.outcome
                );
            }
            s
        }
    };
    emit(output, &body)?;
    Ok(if failed { 3 } else { 0 })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Constants { ell, output } => constants(*ell, output),
        Command::Slice {
            ell,
            theta,
            n,
            output,
        } => slice(*ell, *theta, *n, output),
        Command::Classify {
            ell,
            x,
            y,
            theta,
            delta,
            output,
        } => classify_cmd(*ell, *x, *y, *theta, *delta, output),
        Command::Controls {
            ell,
            x,
            y,
            theta,
            delta,
            output,
        } => controls_cmd(*ell, *x, *y, *theta, *delta, output),
        Command::Simulate {
            ell,
            x,
            y,
            theta,
            dt,
            tmax,
            policy,
            delta,
            output,
        } => simulate(*ell, *x, *y, *theta, *dt, *tmax, policy, *delta, output),
        Command::Audit {
            ell,
            n,
            seed,
            oracle_probes,
            delta,
            output,
        } => audit(*ell, *n, *seed, *oracle_probes, *delta, output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(64);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(64)
        }
        Err(Failure::Lib(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
        Err(Failure::Io(err)) => {
            eprintln!("io error: {err}");
            ExitCode::from(1)
        }
    }
}
