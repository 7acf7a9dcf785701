//! Forward trajectory integration, semipermeability audits, invariance
//! probes, and a brute-force discretized game used as independent ground
//! truth for the analytic classification.

use crate::barrier::{BarrierModel, PieceId, Side, SurfaceFamily};
use crate::classify::{self, LayerConfig};
use crate::error::{Error, Result};
use crate::kinematics::{
    dynamics_rhs, flow_state, radial_distance, switch_values, ControlPair, Costate, State,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a trajectory ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    /// The state reached the target circle at the given time.
    Captured(f64),
    /// The time horizon elapsed with the state still in the game set.
    HorizonReached,
    /// The state left the barrier layer (feedback policies undefined
    /// beyond it) at the given time.
    LeftLayer(f64),
}

/// A sampled trajectory with its termination cause.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// `(t, state)` samples at strictly increasing times, starting at 0.
    pub samples: Vec<(f64, State)>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn last_state(&self) -> &State {
        &self
            .samples
            .last()
            .expect("trajectories hold at least the initial state")
            .1
    }
}

/// One classic fourth-order step under zero-order-hold controls.
///
/// Feedback policies are sampled once per step: holding the values across
/// the stage evaluations keeps bang-bang feedback from mixing branch
/// decisions inside a single step near switching manifolds.
/// Early-exit predicate handed to the integrator, queried at accepted
/// sample points.
type StopFn<'a> = &'a dyn Fn(f64, &State) -> bool;

fn rk4_step(z: &State, h: f64, c: ControlPair) -> State {
    let k1 = dynamics_rhs(z, c);
    let at =
        |k: &[f64; 3], s: f64| State::new(z.x + s * k[0], z.y + s * k[1], z.theta() + s * k[2]);
    let k2 = dynamics_rhs(&at(&k1, 0.5 * h), c);
    let k3 = dynamics_rhs(&at(&k2, 0.5 * h), c);
    let k4 = dynamics_rhs(&at(&k3, h), c);
    State::new(
        z.x + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        z.y + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        z.theta() + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    )
}

fn sample_controls(
    z: &State,
    u_policy: &dyn Fn(&State) -> f64,
    v_policy: &dyn Fn(&State) -> f64,
) -> Result<ControlPair> {
    let (u, v) = (u_policy(z), v_policy(z));
    if !(-1.0..=1.0).contains(&u) {
        return Err(Error::PolicyRange { value: u });
    }
    if !(-1.0..=1.0).contains(&v) {
        return Err(Error::PolicyRange { value: v });
    }
    Ok(ControlPair::new(u, v))
}

/// Tolerance band above the capture radius treated as contact, so that
/// trajectories grazing the target circle tangentially still terminate.
const CAPTURE_EPS: f64 = 1e-9;

/// Fixed-step fourth-order integration of the equations of motion with
/// capture detection.
///
/// Capture is located by bisecting the step on the sign of the radial
/// distance against `ell`, to a time resolution of `1e-10`. A band of
/// `1e-9` above `ell` also counts as contact: paths that reach the
/// target circle tangentially approach it from above and would otherwise
/// never cross.
pub fn integrate(
    z0: &State,
    u_policy: impl Fn(&State) -> f64,
    v_policy: impl Fn(&State) -> f64,
    dt: f64,
    t_max: f64,
    ell: f64,
) -> Result<Trajectory> {
    integrate_with_stop(z0, &u_policy, &v_policy, dt, t_max, ell, None)
}

pub(crate) fn integrate_with_stop(
    z0: &State,
    u_policy: &dyn Fn(&State) -> f64,
    v_policy: &dyn Fn(&State) -> f64,
    dt: f64,
    t_max: f64,
    ell: f64,
    stop: Option<StopFn<'_>>,
) -> Result<Trajectory> {
    assert!(dt > 0.0, "step size must be positive");
    let mut samples = vec![(0.0, *z0)];
    let mut t = 0.0;
    let mut z = *z0;
    let contact = ell + CAPTURE_EPS;
    if radial_distance(&z) <= contact {
        return Ok(Trajectory {
            samples,
            termination: Termination::Captured(0.0),
        });
    }
    while t < t_max - 1e-15 {
        if let Some(stop) = stop {
            if stop(t, &z) {
                return Ok(Trajectory {
                    samples,
                    termination: Termination::LeftLayer(t),
                });
            }
        }
        let h = dt.min(t_max - t);
        let c = sample_controls(&z, u_policy, v_policy)?;
        let z_next = rk4_step(&z, h, c);
        if radial_distance(&z_next) <= contact {
            // Bisect the step length down to 1e-10 time resolution.
            let (mut lo, mut hi) = (0.0, h);
            while hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                let zm = rk4_step(&z, mid, c);
                if radial_distance(&zm) <= contact {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let t_f = t + hi;
            let z_f = rk4_step(&z, hi, c);
            samples.push((t_f, z_f));
            return Ok(Trajectory {
                samples,
                termination: Termination::Captured(t_f),
            });
        }
        t += h;
        z = z_next;
        samples.push((t, z));
    }
    Ok(Trajectory {
        samples,
        termination: Termination::HorizonReached,
    })
}

/// Residual of the semipermeability condition at `(z, nu)`:
/// the min over pursuer controls of the max over evader controls of the
/// normal velocity component.
///
/// Vanishes identically on the barrier with its analytic normal.
pub fn semipermeability_residual(z: &State, nu: &Costate) -> f64 {
    let (s_p, s_e) = switch_values(z, nu);
    let (sin_th, cos_th) = z.theta().sin_cos();
    -s_p.abs() + s_e.abs() + nu.nu_x * sin_th + nu.nu_y * cos_th - nu.nu_y
}

/// Integrates both players' barrier feedback controls from `z0`,
/// resolving multi-valued prescriptions by each piece's emanation pair.
///
/// Stops with [`Termination::LeftLayer`] as soon as the state leaves
/// every piece layer.
pub fn simulate_barrier_policy(
    model: &BarrierModel,
    z0: &State,
    cfg: &LayerConfig,
    dt: f64,
    t_max: f64,
) -> Result<Trajectory> {
    let control_at = |z: &State| -> Option<ControlPair> {
        let m = classify::classify(model, z, cfg).ok().flatten()?;
        Some(classify::emanation_controls(model, m.piece, z))
    };
    let u = |z: &State| control_at(z).map(|c| c.u).unwrap_or(0.0);
    let v = |z: &State| control_at(z).map(|c| c.v).unwrap_or(0.0);
    let stop = |_t: f64, z: &State| control_at(z).is_none();
    integrate_with_stop(z0, &u, &v, dt, t_max, model.ell(), Some(&stop))
}

/// Drift chart used by the invariance probe for each matched piece.
fn drift_chart(model: &BarrierModel, piece: PieceId, z: &State) -> (SurfaceFamily, Side) {
    match piece {
        PieceId::Primary(s) | PieceId::PrimaryLine(s) => (SurfaceFamily::Primary, s),
        PieceId::TributarySame(s) | PieceId::UniversalLine(s) => (SurfaceFamily::TributarySame, s),
        PieceId::TributaryDiff(s) => (SurfaceFamily::TributaryDiff, s),
        // The boundary curves sit at retrograde time zero of the primary
        // family on their side.
        PieceId::Bup(s) => (SurfaceFamily::Primary, s),
        PieceId::BupAligned => (SurfaceFamily::Primary, Side::Plus),
        PieceId::Dispersal => {
            let theta = z.theta();
            let side = if theta > 0.0 && theta <= std::f64::consts::PI {
                Side::Minus
            } else {
                Side::Plus
            };
            let vs = std::f64::consts::PI - (std::f64::consts::PI - theta).abs();
            if vs >= model.theta12() {
                (SurfaceFamily::TributaryDiff, side)
            } else {
                (SurfaceFamily::TributarySame, side)
            }
        }
    }
}

/// Integrates optimal play from a barrier point and reports the largest
/// deviation of the recovered capture radius from `ell` while the
/// matched piece's chart applies.
///
/// Multi-valued control prescriptions are resolved by the piece's
/// emanation pair, the controls under which the piece is invariant.
pub fn barrier_invariance_probe(
    model: &BarrierModel,
    z0: &State,
    cfg: &LayerConfig,
    t_probe: f64,
    dt: f64,
) -> Result<f64> {
    let m = classify::classify(model, z0, cfg)?.ok_or(Error::NotOnBarrier)?;
    let c = classify::emanation_controls(model, m.piece, z0);
    let (family, side) = drift_chart(model, m.piece, z0);
    let chart_piece = match family {
        SurfaceFamily::Primary => PieceId::Primary(side),
        SurfaceFamily::TributarySame => PieceId::TributarySame(side),
        SurfaceFamily::TributaryDiff => PieceId::TributaryDiff(side),
    };
    // Widen the frame slack so equality-boundary charts (a line probe runs
    // exactly on its surface's edge) keep applying along the path.
    let probe_cfg = LayerConfig {
        frame_slack: 1e-6,
        ..*cfg
    };
    let stop = |_t: f64, z: &State| !classify::in_frame(model, chart_piece, z, &probe_cfg);
    let traj = integrate_with_stop(
        z0,
        &|_z: &State| c.u,
        &|_z: &State| c.v,
        dt,
        t_probe,
        model.ell(),
        Some(&stop),
    )?;
    let mut drift: f64 = 0.0;
    for (_t, z) in &traj.samples {
        if let Ok(rec) = classify::piece_ell(family, side, z) {
            drift = drift.max((rec - model.ell()).abs());
        }
    }
    Ok(drift)
}

/// Maximum absolute semipermeability residual over sampled in-domain
/// points of one piece.
#[derive(Debug, Clone)]
pub struct FamilyAudit {
    pub piece: PieceId,
    pub samples: usize,
    pub max_residual: f64,
}

/// Round-trip quality of a surface chart over sampled in-domain points.
#[derive(Debug, Clone)]
pub struct RoundTripAudit {
    pub piece: PieceId,
    pub samples: usize,
    pub max_error: f64,
    pub frame_misses: usize,
}

const SAMPLE_INSET: f64 = 1e-7;

/// The `idx`-th in-domain `(tau, vartheta)` sample of a family.
///
/// Each index derives its own generator, so the sweep can draw and
/// evaluate points fully in parallel while staying deterministic for a
/// given seed regardless of thread count. The cap solve dominates the
/// cost of a draw, which is why sampling is kept inside the parallel
/// region.
fn nth_surface_point(
    model: &BarrierModel,
    family: SurfaceFamily,
    seed: u64,
    idx: u64,
) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ idx.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let sup = model.vartheta_sup(family);
    loop {
        let vs = rng.gen_range(SAMPLE_INSET..sup - SAMPLE_INSET);
        let Ok(cap) = model.cap_unchecked(family, vs) else {
            continue;
        };
        let lo = model.tau_min(family, vs) + SAMPLE_INSET;
        let hi = cap - SAMPLE_INSET;
        if hi <= lo {
            continue;
        }
        return (lo + (hi - lo) * rng.gen::<f64>(), vs);
    }
}

fn line_points(model: &BarrierModel, piece: PieceId, samples: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = match piece {
        PieceId::UniversalLine(_) => (SAMPLE_INSET, model.theta12()),
        PieceId::PrimaryLine(_) => (
            model.theta21() + SAMPLE_INSET,
            std::f64::consts::TAU - SAMPLE_INSET,
        ),
        PieceId::Bup(_) => (SAMPLE_INSET, std::f64::consts::TAU - SAMPLE_INSET),
        _ => unreachable!("line sampling covers line pieces only"),
    };
    (0..samples).map(|_| rng.gen_range(lo..hi)).collect()
}

fn map_max<T: Sync>(items: &[T], f: impl Fn(&T) -> f64 + Sync + Send) -> f64 {
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(&f).reduce(|| 0.0, f64::max)
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(&f).fold(0.0, f64::max)
    }
}

fn index_max(n: usize, f: impl Fn(u64) -> f64 + Sync + Send) -> f64 {
    #[cfg(feature = "parallel")]
    {
        (0..n as u64)
            .into_par_iter()
            .map(&f)
            .reduce(|| 0.0, f64::max)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n as u64).map(&f).fold(0.0, f64::max)
    }
}

/// Sweeps the semipermeability residual with analytic normals over every
/// surface family, emanated line, and boundary curve, on both sides.
pub fn semipermeability_sweep(
    model: &BarrierModel,
    samples_per_piece: usize,
    seed: u64,
) -> Vec<FamilyAudit> {
    let ell = model.ell();
    let mut audits = Vec::new();
    let mut salt = 0u64;
    for side in Side::BOTH {
        for family in [
            SurfaceFamily::Primary,
            SurfaceFamily::TributarySame,
            SurfaceFamily::TributaryDiff,
        ] {
            salt += 1;
            let max_residual = index_max(samples_per_piece, |i| {
                use crate::barrier as b;
                let (tau, vs) = nth_surface_point(model, family, seed ^ salt, i);
                let (z, nu) = match family {
                    SurfaceFamily::Primary => (
                        b::primary(ell, side, tau, vs),
                        b::primary_normal(ell, side, tau, vs),
                    ),
                    SurfaceFamily::TributarySame => (
                        b::tributary_same(ell, side, tau, vs),
                        b::tributary_same_normal(ell, side, tau, vs),
                    ),
                    SurfaceFamily::TributaryDiff => (
                        b::tributary_diff(ell, side, tau, vs),
                        b::tributary_diff_normal(ell, side, tau, vs),
                    ),
                };
                semipermeability_residual(&z, &nu).abs()
            });
            let piece = match family {
                SurfaceFamily::Primary => PieceId::Primary(side),
                SurfaceFamily::TributarySame => PieceId::TributarySame(side),
                SurfaceFamily::TributaryDiff => PieceId::TributaryDiff(side),
            };
            audits.push(FamilyAudit {
                piece,
                samples: samples_per_piece,
                max_residual,
            });
        }
        for piece in [PieceId::UniversalLine(side), PieceId::PrimaryLine(side)] {
            salt += 1;
            let pts = line_points(model, piece, samples_per_piece, seed ^ salt);
            let max_residual = map_max(&pts, |&vs| {
                use crate::barrier as b;
                let (z, nu) = match piece {
                    PieceId::UniversalLine(_) => (
                        b::universal_line(ell, side, vs),
                        b::universal_line_normal(side, vs),
                    ),
                    _ => (
                        b::primary_line(ell, side, vs),
                        b::primary_line_normal(ell, side, vs),
                    ),
                };
                semipermeability_residual(&z, &nu).abs()
            });
            audits.push(FamilyAudit {
                piece,
                samples: samples_per_piece,
                max_residual,
            });
        }
    }
    audits
}

/// Sweeps `ell`-recovery round trips and frame membership over generated
/// in-domain points of every surface family and side.
pub fn round_trip_sweep(
    model: &BarrierModel,
    cfg: &LayerConfig,
    samples_per_piece: usize,
    seed: u64,
) -> Vec<RoundTripAudit> {
    let ell = model.ell();
    let mut audits = Vec::new();
    let mut salt = 100u64;
    for side in Side::BOTH {
        for family in [
            SurfaceFamily::Primary,
            SurfaceFamily::TributarySame,
            SurfaceFamily::TributaryDiff,
        ] {
            salt += 1;
            let piece = match family {
                SurfaceFamily::Primary => PieceId::Primary(side),
                SurfaceFamily::TributarySame => PieceId::TributarySame(side),
                SurfaceFamily::TributaryDiff => PieceId::TributaryDiff(side),
            };
            let eval = |i: u64| -> (f64, bool) {
                use crate::barrier as b;
                let (tau, vs) = nth_surface_point(model, family, seed ^ salt, i);
                let z = match family {
                    SurfaceFamily::Primary => b::primary(ell, side, tau, vs),
                    SurfaceFamily::TributarySame => b::tributary_same(ell, side, tau, vs),
                    SurfaceFamily::TributaryDiff => b::tributary_diff(ell, side, tau, vs),
                };
                let err = match classify::piece_ell(family, side, &z) {
                    Ok(rec) => (rec - ell).abs(),
                    Err(_) => f64::INFINITY,
                };
                (err, classify::in_frame(model, piece, &z, cfg))
            };
            #[cfg(feature = "parallel")]
            let results: Vec<(f64, bool)> = (0..samples_per_piece as u64)
                .into_par_iter()
                .map(eval)
                .collect();
            #[cfg(not(feature = "parallel"))]
            let results: Vec<(f64, bool)> = (0..samples_per_piece as u64).map(eval).collect();
            let max_error = results.iter().map(|r| r.0).fold(0.0, f64::max);
            let frame_misses = results.iter().filter(|r| !r.1).count();
            audits.push(RoundTripAudit {
                piece,
                samples: samples_per_piece,
                max_error,
                frame_misses,
            });
        }
    }
    audits
}

/// Verdict classes of the discretized game.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleOutcome {
    Capture,
    Escape,
    Undecided,
}

impl std::fmt::Display for OracleOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OracleOutcome::Capture => "capture",
            OracleOutcome::Escape => "escape",
            OracleOutcome::Undecided => "undecided",
        })
    }
}

/// Strategy grid of the discretized game.
#[derive(Debug, Clone)]
pub struct OracleConfig {
    /// Number of piecewise-constant stages (grid size grows as
    /// `values^(2*stages)`).
    pub stages: usize,
    /// Control values available to both players at each stage.
    pub values: Vec<f64>,
    /// Duration of one stage.
    pub stage_dt: f64,
    /// Spacing of capture checks inside a stage.
    pub substeps: usize,
    /// Upper bound on the number of strategy pairs explored.
    pub cap: u128,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            stages: 6,
            values: vec![-1.0, 0.0, 1.0],
            stage_dt: 2.0 / 3.0,
            substeps: 24,
            cap: 1 << 20,
        }
    }
}

impl OracleConfig {
    pub fn horizon(&self) -> f64 {
        self.stages as f64 * self.stage_dt
    }

    fn grid_size(&self) -> u128 {
        (self.values.len() as u128).saturating_pow(2 * self.stages as u32)
    }
}

/// Verdict of the discretized game from one initial state.
#[derive(Debug, Clone)]
pub struct OracleVerdict {
    pub outcome: OracleOutcome,
    pub horizon: f64,
    pub stages: usize,
    pub values: Vec<f64>,
}

/// Advances one stage of constant controls along the exact flow,
/// reporting capture anywhere inside the stage.
fn stage_step(z: &State, u: f64, v: f64, cfg: &OracleConfig, ell: f64) -> (bool, State) {
    let c = ControlPair::new(u, v);
    let n = cfg.substeps.max(1);
    let mut prev = *z;
    for i in 1..=n {
        let t = cfg.stage_dt * i as f64 / n as f64;
        // Forward motion is the retrograde closed form at negative time.
        let zt = flow_state(-t, z, c);
        if radial_distance(&zt) <= ell {
            return (true, zt);
        }
        // Guard against grazing contact between check points.
        let mid = flow_state(-(t - 0.5 * cfg.stage_dt / n as f64), z, c);
        if radial_distance(&mid) <= ell {
            return (true, mid);
        }
        prev = zt;
    }
    (false, prev)
}

/// Can the pursuer force capture within the horizon when the evader
/// picks each stage value knowing the pursuer's?
fn pursuer_forces_capture(z: &State, stage: usize, cfg: &OracleConfig, ell: f64) -> bool {
    cfg.values.iter().any(|&u| {
        cfg.values.iter().all(|&v| {
            let (captured, z_next) = stage_step(z, u, v, cfg, ell);
            captured
                || (stage + 1 < cfg.stages && pursuer_forces_capture(&z_next, stage + 1, cfg, ell))
        })
    })
}

/// Can the evader stay outside the capture circle for the whole horizon
/// when the pursuer picks each stage value knowing the evader's?
fn evader_survives(z: &State, stage: usize, cfg: &OracleConfig, ell: f64) -> bool {
    cfg.values.iter().any(|&v| {
        cfg.values.iter().all(|&u| {
            let (captured, z_next) = stage_step(z, u, v, cfg, ell);
            !captured && (stage + 1 >= cfg.stages || evader_survives(&z_next, stage + 1, cfg, ell))
        })
    })
}

/// Exhaustive minimax over piecewise-constant strategies.
///
/// Two passes with opposite information patterns make both decided
/// verdicts conservative: `Capture` means the pursuer wins even against
/// an evader that sees each stage control before replying, `Escape`
/// means the evader survives the horizon even against a pursuer with
/// that advantage. States where only the informed side wins come back
/// `Undecided`.
pub fn game_oracle(z0: &State, ell: f64, cfg: &OracleConfig) -> Result<OracleVerdict> {
    if cfg.grid_size() > cfg.cap {
        return Err(Error::BudgetExceeded {
            size: cfg.grid_size(),
            cap: cfg.cap,
        });
    }
    let verdict = |outcome| OracleVerdict {
        outcome,
        horizon: cfg.horizon(),
        stages: cfg.stages,
        values: cfg.values.clone(),
    };
    if radial_distance(z0) <= ell {
        return Ok(verdict(OracleOutcome::Capture));
    }

    // The root branches explore disjoint subtrees.
    #[cfg(feature = "parallel")]
    let captured = cfg.values.par_iter().any(|&u| {
        cfg.values.iter().all(|&v| {
            let (captured, z_next) = stage_step(z0, u, v, cfg, ell);
            captured || (cfg.stages > 1 && pursuer_forces_capture(&z_next, 1, cfg, ell))
        })
    });
    #[cfg(not(feature = "parallel"))]
    let captured = pursuer_forces_capture(z0, 0, cfg, ell);
    if captured {
        return Ok(verdict(OracleOutcome::Capture));
    }

    #[cfg(feature = "parallel")]
    let survives = cfg.values.par_iter().any(|&v| {
        cfg.values.iter().all(|&u| {
            let (captured, z_next) = stage_step(z0, u, v, cfg, ell);
            !captured && (cfg.stages <= 1 || evader_survives(&z_next, 1, cfg, ell))
        })
    });
    #[cfg(not(feature = "parallel"))]
    let survives = evader_survives(z0, 0, cfg, ell);
    if survives {
        return Ok(verdict(OracleOutcome::Escape));
    }
    Ok(verdict(OracleOutcome::Undecided))
}

/// One row of the oracle agreement table: a barrier point displaced along
/// the slice normal, with the analytic side and the oracle's verdict.
#[derive(Debug, Clone)]
pub struct OracleProbe {
    pub z: State,
    pub piece: PieceId,
    /// Positive displacements point to the escape side of the barrier.
    pub displacement: f64,
    pub outcome: OracleOutcome,
}

/// Probes barrier points displaced along the in-slice normal direction
/// and records the oracle verdicts.
///
/// Points are drawn from slices with a bounded time-to-go so the oracle
/// horizon covers the capture side, and clear of the dispersal line,
/// near which the capture wedge between the two crossing surfaces is
/// thinner than the displacement and a normal offset no longer lands on
/// the intended side.
pub fn oracle_probe_sweep(
    model: &BarrierModel,
    count: usize,
    displacement: f64,
    oracle_cfg: &OracleConfig,
    seed: u64,
) -> Vec<OracleProbe> {
    let pts = probe_points(model, count, 3.0 * displacement, seed);
    let run = |(z, piece, nu): &(State, PieceId, Costate)| -> Vec<OracleProbe> {
        let norm = nu.nu_x.hypot(nu.nu_y);
        let (nx, ny) = (nu.nu_x / norm, nu.nu_y / norm);
        [displacement, -displacement]
            .iter()
            .map(|&d| {
                let displaced = State::new(z.x + d * nx, z.y + d * ny, z.theta());
                let outcome = game_oracle(&displaced, model.ell(), oracle_cfg)
                    .map(|v| v.outcome)
                    .unwrap_or(OracleOutcome::Undecided);
                OracleProbe {
                    z: displaced,
                    piece: *piece,
                    displacement: d,
                    outcome,
                }
            })
            .collect()
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<OracleProbe>> = pts.par_iter().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<OracleProbe>> = pts.iter().map(run).collect();
    rows.into_iter().flatten().collect()
}

/// Barrier points with analytic normals, a time-to-go small enough for
/// desk-scale oracle horizons, and at least `dl_margin` of planar
/// clearance from the slice's dispersal point.
fn probe_points(
    model: &BarrierModel,
    count: usize,
    dl_margin: f64,
    seed: u64,
) -> Vec<(State, PieceId, Costate)> {
    use crate::barrier as b;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ell = model.ell();
    let mut out = Vec::with_capacity(count);
    let max_tau = 2.0;
    while out.len() < count {
        let side = if rng.gen::<bool>() {
            Side::Plus
        } else {
            Side::Minus
        };
        let family = match rng.gen_range(0..3) {
            0 => SurfaceFamily::Primary,
            1 => SurfaceFamily::TributarySame,
            _ => SurfaceFamily::TributaryDiff,
        };
        let sup = model.vartheta_sup(family);
        let vs = rng.gen_range(0.2..sup - 0.05);
        let Ok(cap) = model.cap_unchecked(family, vs) else {
            continue;
        };
        let lo = model.tau_min(family, vs) + 0.05;
        let hi = (cap - 0.05).min(max_tau);
        if hi <= lo {
            continue;
        }
        let tau = rng.gen_range(lo..hi);
        let (z, piece, nu) = match family {
            SurfaceFamily::Primary => (
                b::primary(ell, side, tau, vs),
                PieceId::Primary(side),
                b::primary_normal(ell, side, tau, vs),
            ),
            SurfaceFamily::TributarySame => (
                b::tributary_same(ell, side, tau, vs),
                PieceId::TributarySame(side),
                b::tributary_same_normal(ell, side, tau, vs),
            ),
            SurfaceFamily::TributaryDiff => (
                b::tributary_diff(ell, side, tau, vs),
                PieceId::TributaryDiff(side),
                b::tributary_diff_normal(ell, side, tau, vs),
            ),
        };
        // Skip points where the surface is nearly tangent to the slice
        // plane; the in-slice displacement would not cross the barrier.
        if nu.nu_x.hypot(nu.nu_y) < 0.2 * (nu.nu_theta.abs() + 1e-9).max(0.2) {
            continue;
        }
        let dl = model.dispersal_point(z.theta());
        if (z.x - dl.x).hypot(z.y - dl.y) < dl_margin {
            continue;
        }
        out.push((z, piece, nu));
    }
    out
}
