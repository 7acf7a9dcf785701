//! State-vector parametrization of the barrier pieces, frame-set
//! membership, layer classification, and the optimal feedback controls.
//!
//! Each surface piece admits a closed form `ell_piece(z)` recovering the
//! capture radius it belongs to, valid inside a frame set that encodes
//! its parameter ranges. Because the barrier is a two-dimensional
//! manifold, floating-point states almost never lie on it exactly;
//! membership is therefore tested against the thickened layer
//! `ell <= ell_piece(z) <= ell (1 + delta)`. With exact arithmetic the
//! evader can guarantee a miss distance of `ell (1 + delta)` from inside
//! the layer.

use crate::barrier::{
    bup, primary_line, universal_line, BarrierModel, PieceId, Side, SurfaceFamily,
};
use crate::error::{Error, Result};
use crate::kinematics::{radial_distance, ControlPair, ControlSet, State};
use std::f64::consts::{PI, TAU};

/// Thickness and slack parameters of layer classification.
#[derive(Debug, Clone, Copy)]
pub struct LayerConfig {
    /// Relative layer width: a state matches a surface when the recovered
    /// radius lies in `[ell, ell (1 + delta)]`.
    pub delta: f64,
    /// Absolute tolerance applied to the strict frame inequalities, and
    /// to zero tests like the aligned-arc `sgn x`.
    pub frame_slack: f64,
}

impl Default for LayerConfig {
    fn default() -> Self {
        Self {
            delta: 1e-3,
            frame_slack: 1e-9,
        }
    }
}

impl LayerConfig {
    pub fn with_delta(delta: f64) -> Self {
        Self {
            delta,
            ..Self::default()
        }
    }

    /// Absolute planar tolerance for membership on line pieces.
    fn line_tol(&self, ell: f64) -> f64 {
        ell * self.delta
    }
}

/// A successful layer classification.
#[derive(Debug, Clone, Copy)]
pub struct PieceMatch {
    pub piece: PieceId,
    /// The capture radius recovered from the state by the piece's chart
    /// (for line pieces: `ell` plus the planar distance to the line).
    pub ell_recovered: f64,
    /// How far above `ell` the recovered radius sits; in `[0, ell*delta]`.
    pub layer_excess: f64,
    pub u_set: ControlSet,
    pub v_set: ControlSet,
}

/// Recovers the capture radius whose `family`/`side` surface passes
/// through `z`.
///
/// Total for the primary and same-turn families; the opposite-turn chart
/// requires a nonnegative radicand and errors with `OutOfChart` outside
/// it.
pub fn piece_ell(family: SurfaceFamily, side: Side, z: &State) -> Result<f64> {
    let v = side.sign();
    let theta = z.theta();
    match family {
        SurfaceFamily::Primary => {
            let (s, c) = (0.5 * theta).sin_cos();
            Ok(-v * (z.x * s + z.y * c))
        }
        SurfaceFamily::TributarySame => {
            let a = v * z.x - 1.0 + theta.cos();
            let b = z.y - v * theta.sin();
            Ok(-(1.0 + v) * PI + v * theta + a.hypot(b))
        }
        SurfaceFamily::TributaryDiff => {
            let a = v * z.x + 1.0 + theta.cos();
            let b = z.y - v * theta.sin();
            let norm2 = a * a + b * b;
            let radicand = norm2 - 4.0;
            if radicand < -1e-12 {
                return Err(Error::OutOfChart {
                    family: "TD",
                    reason: "players closer than the double turn diameter allows",
                });
            }
            if norm2 == 0.0 {
                return Err(Error::OutOfChart {
                    family: "TD",
                    reason: "degenerate offset",
                });
            }
            let rho = radicand.max(0.0).sqrt();
            let arg = ((2.0 * a + b * rho) / norm2).clamp(-1.0, 1.0);
            Ok(rho - (1.0 + v) * PI + v * theta + 2.0 * arg.acos())
        }
    }
}

/// Slice parameter of an off-universal-line piece at heading `theta`.
fn vartheta_up(side: Side, theta: f64) -> f64 {
    let v = side.sign();
    (1.0 + v) * PI - v * theta
}

/// Slice parameter of a primary-family piece at heading `theta`.
fn vartheta_primary(side: Side, theta: f64) -> f64 {
    let v = side.sign();
    (1.0 - v) * PI + v * theta
}

/// Whether `z` satisfies the frame (parameter-range) conditions of a
/// piece, with `frame_slack` loosening on strict inequalities.
///
/// For the line pieces the frame is the planar distance to the line's
/// unique point at this heading, within the layer tolerance.
pub fn in_frame(model: &BarrierModel, piece: PieceId, z: &State, cfg: &LayerConfig) -> bool {
    let ell = model.ell();
    let eps = cfg.frame_slack;
    let theta = z.theta();
    let v = piece.side().map(Side::sign).unwrap_or(0.0);
    match piece {
        PieceId::Primary(side) => {
            let vs = vartheta_primary(side, theta);
            if !(vs > 0.0 && vs < TAU) {
                return false;
            }
            let cap = match model.cap_unchecked(SurfaceFamily::Primary, vs) {
                Ok(c) => c,
                Err(_) => return false,
            };
            let (s, c) = (0.5 * theta).sin_cos();
            let lhs = -z.x * c + z.y * s;
            let ub = 2.0 * v * (c - (cap + 0.5 * v * theta).cos());
            lhs > -eps && lhs < ub + eps
        }
        PieceId::TributarySame(side) => {
            let vs = vartheta_up(side, theta);
            if !(vs > 0.0 && vs < model.theta12() + eps) {
                return false;
            }
            if v * z.x - (1.0 - theta.cos()) <= -eps {
                return false;
            }
            let cap = match model.cap_unchecked(SurfaceFamily::TributarySame, vs) {
                Ok(c) => c,
                Err(_) => return false,
            };
            (z.y - v * theta.sin()) - (ell + vs) * (cap - vs).cos() > -eps
        }
        PieceId::TributaryDiff(side) => {
            let vs = vartheta_up(side, theta);
            if !(vs > 0.0 && vs < TAU - model.theta21() + eps) {
                return false;
            }
            let a = v * z.x + 1.0 + theta.cos();
            let b = z.y - v * theta.sin();
            let radicand = a * a + b * b - 4.0;
            if radicand < -1e-12 {
                return false;
            }
            let rho = radicand.max(0.0).sqrt();
            let cap = match model.cap_unchecked(SurfaceFamily::TributaryDiff, vs) {
                Ok(c) => c,
                Err(_) => return false,
            };
            let reach = rho - ell;
            reach > -eps && reach < 2.0 * cap - vs + eps && a * rho - 2.0 * b < eps
        }
        PieceId::UniversalLine(side) => {
            let vs = vartheta_up(side, theta);
            if !(vs > 0.0 && vs <= model.theta12() + eps) {
                return false;
            }
            let p = universal_line(ell, side, vs);
            (z.x - p.x).hypot(z.y - p.y) <= cfg.line_tol(ell)
        }
        PieceId::PrimaryLine(side) => {
            let vs = vartheta_primary(side, theta);
            if !(vs > model.theta21() - eps && vs < TAU) {
                return false;
            }
            let p = primary_line(ell, side, vs);
            (z.x - p.x).hypot(z.y - p.y) <= cfg.line_tol(ell)
        }
        PieceId::Bup(side) => {
            if !(theta > 0.0 && theta < TAU) {
                return false;
            }
            let p = bup(ell, side, theta);
            (z.x - p.x).hypot(z.y - p.y) <= cfg.line_tol(ell)
        }
        PieceId::BupAligned => {
            if theta.min(TAU - theta) > eps {
                return false;
            }
            let r = radial_distance(z);
            r >= ell - eps && r <= ell * (1.0 + cfg.delta) + eps
        }
        PieceId::Dispersal => {
            let p = model.dispersal_point(theta);
            (z.x - p.x).hypot(z.y - p.y) <= cfg.line_tol(ell)
        }
    }
}

/// The optimal feedback controls prescribed on a barrier piece.
///
/// On the dispersal line both players' optima are genuinely non-unique;
/// on the aligned arc they follow `sgn x`, with the full set at `x = 0`.
pub fn prescribed_controls(piece: PieceId, z: &State, slack: f64) -> (ControlSet, ControlSet) {
    match piece {
        PieceId::UniversalLine(side) => (ControlSet::Zero, side_set(side)),
        PieceId::Primary(side)
        | PieceId::PrimaryLine(side)
        | PieceId::TributaryDiff(side)
        | PieceId::Bup(side) => (side_set(side.opposite()), side_set(side)),
        PieceId::TributarySame(side) => (side_set(side), side_set(side)),
        PieceId::BupAligned => {
            if z.x > slack {
                (ControlSet::PlusOne, ControlSet::PlusOne)
            } else if z.x < -slack {
                (ControlSet::MinusOne, ControlSet::MinusOne)
            } else {
                (ControlSet::Any, ControlSet::Any)
            }
        }
        PieceId::Dispersal => (ControlSet::Either, ControlSet::Either),
    }
}

fn side_set(side: Side) -> ControlSet {
    match side {
        Side::Plus => ControlSet::PlusOne,
        Side::Minus => ControlSet::MinusOne,
    }
}

/// The constant control pair under which a piece was emanated, used to
/// resolve multi-valued prescriptions when a single representative is
/// needed (invariance probes, simulation).
///
/// On the dispersal line the pair of the slice-selected carrying
/// tributary is used.
pub fn emanation_controls(model: &BarrierModel, piece: PieceId, z: &State) -> ControlPair {
    match piece {
        PieceId::Primary(side) | PieceId::PrimaryLine(side) | PieceId::Bup(side) => {
            ControlPair::new(-side.sign(), side.sign())
        }
        PieceId::TributaryDiff(side) => ControlPair::new(-side.sign(), side.sign()),
        PieceId::TributarySame(side) => ControlPair::new(side.sign(), side.sign()),
        PieceId::UniversalLine(side) => ControlPair::new(0.0, side.sign()),
        PieceId::BupAligned => {
            let s = if z.x > 0.0 {
                1.0
            } else if z.x < 0.0 {
                -1.0
            } else {
                0.0
            };
            ControlPair::new(s, s)
        }
        PieceId::Dispersal => {
            let theta = z.theta();
            let side = if theta > 0.0 && theta <= PI {
                Side::Minus
            } else {
                Side::Plus
            };
            let vs = PI - (PI - theta).abs();
            if vs >= model.theta12() {
                ControlPair::new(-side.sign(), side.sign())
            } else {
                ControlPair::new(side.sign(), side.sign())
            }
        }
    }
}

/// Fixed piece priority: lines and the dispersal point come before the
/// surfaces whose layers engulf them, so measure-zero pieces remain
/// reportable under floating point.
const PRIORITY: [PieceKind; 8] = [
    PieceKind::Dispersal,
    PieceKind::BupAligned,
    PieceKind::Bup,
    PieceKind::UniversalLine,
    PieceKind::PrimaryLine,
    PieceKind::TributarySame,
    PieceKind::TributaryDiff,
    PieceKind::Primary,
];

#[derive(Clone, Copy)]
enum PieceKind {
    Dispersal,
    BupAligned,
    Bup,
    UniversalLine,
    PrimaryLine,
    TributarySame,
    TributaryDiff,
    Primary,
}

impl PieceKind {
    fn instances(self) -> Vec<PieceId> {
        match self {
            PieceKind::Dispersal => vec![PieceId::Dispersal],
            PieceKind::BupAligned => vec![PieceId::BupAligned],
            PieceKind::Bup => Side::BOTH.iter().map(|s| PieceId::Bup(*s)).collect(),
            PieceKind::UniversalLine => Side::BOTH
                .iter()
                .map(|s| PieceId::UniversalLine(*s))
                .collect(),
            PieceKind::PrimaryLine => Side::BOTH
                .iter()
                .map(|s| PieceId::PrimaryLine(*s))
                .collect(),
            PieceKind::TributarySame => Side::BOTH
                .iter()
                .map(|s| PieceId::TributarySame(*s))
                .collect(),
            PieceKind::TributaryDiff => Side::BOTH
                .iter()
                .map(|s| PieceId::TributaryDiff(*s))
                .collect(),
            PieceKind::Primary => Side::BOTH.iter().map(|s| PieceId::Primary(*s)).collect(),
        }
    }
}

/// Finds the first barrier piece whose layer and frame contain `z`.
///
/// Returns `None` when no piece matches (the state is strictly inside
/// the capture or escape region); errors when `z` lies inside the
/// capture circle and hence outside the game set.
pub fn classify(model: &BarrierModel, z: &State, cfg: &LayerConfig) -> Result<Option<PieceMatch>> {
    let ell = model.ell();
    let r = radial_distance(z);
    if r < ell * (1.0 - cfg.frame_slack) {
        return Err(Error::InsideCapture { r, ell });
    }

    for kind in PRIORITY {
        for piece in kind.instances() {
            let recovered = match piece {
                PieceId::Primary(s) => piece_ell(SurfaceFamily::Primary, s, z),
                PieceId::TributarySame(s) => piece_ell(SurfaceFamily::TributarySame, s, z),
                PieceId::TributaryDiff(s) => piece_ell(SurfaceFamily::TributaryDiff, s, z),
                // Line pieces: radius grows with the planar distance to
                // the line's point at this heading.
                PieceId::UniversalLine(s) => {
                    Ok(ell + line_distance(z, &universal_line(ell, s, vartheta_up(s, z.theta()))))
                }
                PieceId::PrimaryLine(s) => {
                    Ok(ell
                        + line_distance(z, &primary_line(ell, s, vartheta_primary(s, z.theta()))))
                }
                PieceId::Bup(s) => Ok(ell + line_distance(z, &bup(ell, s, z.theta()))),
                PieceId::BupAligned => Ok(r),
                PieceId::Dispersal => Ok(ell + line_distance(z, &model.dispersal_point(z.theta()))),
            };
            let Ok(ell_recovered) = recovered else {
                continue;
            };
            let in_layer = ell_recovered >= ell - cfg.frame_slack
                && ell_recovered <= ell * (1.0 + cfg.delta) + cfg.frame_slack;
            if in_layer && in_frame(model, piece, z, cfg) {
                let (u_set, v_set) = prescribed_controls(piece, z, cfg.frame_slack);
                return Ok(Some(PieceMatch {
                    piece,
                    ell_recovered,
                    layer_excess: (ell_recovered - ell).max(0.0),
                    u_set,
                    v_set,
                }));
            }
        }
    }
    Ok(None)
}

fn line_distance(z: &State, p: &State) -> f64 {
    (z.x - p.x).hypot(z.y - p.y)
}

/// The optimal feedback controls on the barrier at `z`.
///
/// Errors with `NotOnBarrier` when no piece layer contains the state:
/// the feedback law is defined only on the barrier.
pub fn optimal_controls(
    model: &BarrierModel,
    z: &State,
    cfg: &LayerConfig,
) -> Result<(ControlSet, ControlSet)> {
    match classify(model, z, cfg)? {
        Some(m) => Ok((m.u_set, m.v_set)),
        None => Err(Error::NotOnBarrier),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barrier::{primary, tributary_same, PieceParams};
    use crate::kinematics::reflect;

    #[test]
    fn primary_ell_recovery_examples() {
        let z = State::new(-0.353_553_390_593_273_8, -0.353_553_390_593_273_8, PI / 2.0);
        let got = piece_ell(SurfaceFamily::Primary, Side::Plus, &z).unwrap();
        assert!((got - 0.5).abs() < 1e-9);

        let ell = 0.8;
        let z = State::new(0.0, -ell, 1e-12);
        let got = piece_ell(SurfaceFamily::Primary, Side::Plus, &z).unwrap();
        assert!((got - ell).abs() < 1e-9);
    }

    #[test]
    fn tributary_same_round_trip() {
        let mut worst: f64 = 0.0;
        for &ell in &[0.5, 1.0] {
            let model = BarrierModel::build(ell).unwrap();
            for side in Side::BOTH {
                for i in 1..32 {
                    let vs = model.theta12() * i as f64 / 32.0;
                    let cap = model.tau_max(SurfaceFamily::TributarySame, vs).unwrap();
                    for j in 1..32 {
                        let tau = vs + (cap - vs) * j as f64 / 32.0 - 1e-9;
                        if tau <= vs {
                            continue;
                        }
                        let z = tributary_same(ell, side, tau, vs);
                        let got = piece_ell(SurfaceFamily::TributarySame, side, &z).unwrap();
                        worst = worst.max((got - ell).abs());
                    }
                }
            }
        }
        assert!(worst < 1e-9, "worst recovery error {worst}");
    }

    #[test]
    fn frame_accepts_own_side_only() {
        let model = BarrierModel::build(0.5).unwrap();
        let cfg = LayerConfig::default();
        let vs = 1.0;
        let cap = model.tau_max(SurfaceFamily::Primary, vs).unwrap();
        let z = primary(0.5, Side::Plus, 0.5 * cap, vs);
        assert!(in_frame(&model, PieceId::Primary(Side::Plus), &z, &cfg));
        assert!(!in_frame(&model, PieceId::Primary(Side::Minus), &z, &cfg));
        // A state far above the barrier fails every layer (the frame set
        // alone restricts only the parameter ranges, not the radius), so
        // it classifies to nothing.
        let far = State::new(0.0, 5.5, 0.1);
        assert!(classify(&model, &far, &cfg).unwrap().is_none());
        assert!(!in_frame(&model, PieceId::Primary(Side::Minus), &far, &cfg));
        assert!(!in_frame(
            &model,
            PieceId::TributarySame(Side::Minus),
            &far,
            &cfg
        ));
        assert!(!in_frame(
            &model,
            PieceId::UniversalLine(Side::Plus),
            &far,
            &cfg
        ));
    }

    #[test]
    fn classify_universal_line_point() {
        let model = BarrierModel::build(0.5).unwrap();
        let cfg = LayerConfig::default();
        let z = State::new(1.0 - 1.0_f64.cos(), 1.5 - 1.0_f64.sin(), TAU - 1.0);
        let m = classify(&model, &z, &cfg).unwrap().unwrap();
        assert_eq!(m.piece, PieceId::UniversalLine(Side::Plus));
        assert_eq!(m.u_set, ControlSet::Zero);
        assert_eq!(m.v_set, ControlSet::PlusOne);
        assert!(m.layer_excess < 1e-9);
    }

    #[test]
    fn classify_misses_far_state_and_errors_inside_capture() {
        let model = BarrierModel::build(0.5).unwrap();
        let cfg = LayerConfig::default();
        assert!(classify(&model, &State::new(100.0, 100.0, 1.0), &cfg)
            .unwrap()
            .is_none());
        let err = classify(&model, &State::new(0.0, 0.1, 1.0), &cfg).unwrap_err();
        assert!(matches!(err, Error::InsideCapture { .. }));
    }

    #[test]
    fn classify_reports_layer_excess_for_inflated_point() {
        let model = BarrierModel::build(0.5).unwrap();
        let cfg = LayerConfig::default();
        let z_on = primary(0.5, Side::Plus, 0.4, 1.2);
        // The primary chart is linear in the planar offset, so scaling the
        // offset scales the recovered radius.
        let scale = 1.0 + 0.5 * cfg.delta;
        let z = State::new(z_on.x * scale, z_on.y * scale, z_on.theta());
        let m = classify(&model, &z, &cfg).unwrap().unwrap();
        assert_eq!(m.piece, PieceId::Primary(Side::Plus));
        assert!((m.layer_excess - 0.5 * cfg.delta * 0.5).abs() < 1e-9);
        // Doubling the inflation leaves the layer.
        let scale = 1.0 + 2.0 * cfg.delta;
        let z = State::new(z_on.x * scale, z_on.y * scale, z_on.theta());
        assert!(classify(&model, &z, &cfg).unwrap().is_none());
    }

    #[test]
    fn classify_is_reflection_equivariant() {
        let model = BarrierModel::build(0.5).unwrap();
        let cfg = LayerConfig::default();
        let z = primary(0.5, Side::Plus, 0.4, 1.2);
        let m = classify(&model, &z, &cfg).unwrap().unwrap();
        let rm = classify(&model, &reflect(&z), &cfg).unwrap().unwrap();
        assert_eq!(m.piece, PieceId::Primary(Side::Plus));
        assert_eq!(rm.piece, PieceId::Primary(Side::Minus));
        assert_eq!(rm.u_set, ControlSet::PlusOne);
        assert_eq!(rm.v_set, ControlSet::MinusOne);
        assert_eq!(m.u_set, ControlSet::MinusOne);
        assert_eq!(m.v_set, ControlSet::PlusOne);
    }

    #[test]
    fn optimal_controls_on_key_pieces() {
        let model = BarrierModel::build(0.5).unwrap();
        let cfg = LayerConfig::default();

        let z = model
            .eval_piece(PieceId::UniversalLine(Side::Plus), PieceParams::Scalar(1.0))
            .unwrap();
        let (u, v) = optimal_controls(&model, &z, &cfg).unwrap();
        assert_eq!((u, v), (ControlSet::Zero, ControlSet::PlusOne));

        let z = State::new(0.3, (0.25_f64 - 0.09).sqrt(), 0.0);
        let (u, v) = optimal_controls(&model, &z, &cfg).unwrap();
        assert_eq!((u, v), (ControlSet::PlusOne, ControlSet::PlusOne));

        let z = model.dispersal_point(2.0);
        let (u, v) = optimal_controls(&model, &z, &cfg).unwrap();
        assert_eq!((u, v), (ControlSet::Either, ControlSet::Either));

        let err = optimal_controls(&model, &State::new(4.0, 4.0, 2.0), &cfg).unwrap_err();
        assert!(matches!(err, Error::NotOnBarrier));
    }

    #[test]
    fn aligned_arc_controls_follow_sign_of_x() {
        let model = BarrierModel::build(0.5).unwrap();
        let cfg = LayerConfig::default();
        let z = State::new(-0.3, (0.25_f64 - 0.09).sqrt(), 0.0);
        let (u, v) = optimal_controls(&model, &z, &cfg).unwrap();
        assert_eq!((u, v), (ControlSet::MinusOne, ControlSet::MinusOne));
        let z = State::new(0.0, 0.5, 0.0);
        let (u, v) = optimal_controls(&model, &z, &cfg).unwrap();
        assert_eq!((u, v), (ControlSet::Any, ControlSet::Any));
    }
}
