//! Cross-sections of the barrier at a fixed heading, ordered into a
//! plot-ready curve.

use super::surfaces::{self, Side};
use super::{BarrierModel, PieceId, PieceParams, SurfaceFamily};
use crate::kinematics::{wrap_angle, Costate, State};
use std::f64::consts::{PI, TAU};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Inset applied to open parameter intervals when sampling.
const INSET: f64 = 1e-9;

/// One sampled point of a slice, labeled with its piece and parameters.
#[derive(Debug, Clone, Copy)]
pub struct SlicePoint {
    pub z: State,
    pub piece: PieceId,
    pub params: PieceParams,
    /// Analytic normal; absent on the dispersal line, where it is not
    /// unique.
    pub normal: Option<Costate>,
}

/// Polar angle around the capture-circle center, measured like the
/// terminal parametrization (clockwise from the y-axis).
fn polar(z: &State) -> f64 {
    z.x.atan2(z.y)
}

struct ActiveSurface {
    family: SurfaceFamily,
    side: Side,
    vartheta: f64,
}

/// Samples every piece whose slice-parameter window contains `theta`.
///
/// Each active surface contributes `n` points across its retrograde-time
/// interval (open ends inset by `1e-9`); the line pieces, the two
/// usable-part boundary points and the dispersal point contribute one
/// point each. Points are ordered by polar angle within each side and
/// stitched at the dispersal point, so that together with the
/// capture-circle arc between the two boundary points the output traces
/// the closed boundary of the slice's capture region.
pub fn sample_slice(model: &BarrierModel, theta: f64, n: usize) -> Vec<SlicePoint> {
    assert!(n >= 2, "need at least two samples per active piece");
    let theta = wrap_angle(theta);
    let ell = model.ell();

    let mut surfaces_active = Vec::new();
    let mut singles: Vec<SlicePoint> = Vec::new();
    for side in Side::BOTH {
        let v = side.sign();
        let vs_primary = (1.0 - v) * PI + v * theta;
        let vs_up = (1.0 + v) * PI - v * theta;

        if vs_primary > 0.0 && vs_primary < TAU {
            surfaces_active.push(ActiveSurface {
                family: SurfaceFamily::Primary,
                side,
                vartheta: vs_primary,
            });
            singles.push(SlicePoint {
                z: surfaces::bup(ell, side, theta),
                piece: PieceId::Bup(side),
                params: PieceParams::Scalar(theta),
                normal: Some(surfaces::bup_normal(side, theta)),
            });
        }
        if vs_up > 0.0 && vs_up < model.theta12() {
            surfaces_active.push(ActiveSurface {
                family: SurfaceFamily::TributarySame,
                side,
                vartheta: vs_up,
            });
        }
        if vs_up > 0.0 && vs_up < TAU - model.theta21() {
            surfaces_active.push(ActiveSurface {
                family: SurfaceFamily::TributaryDiff,
                side,
                vartheta: vs_up,
            });
        }
        if vs_up > 0.0 && vs_up <= model.theta12() {
            singles.push(SlicePoint {
                z: surfaces::universal_line(ell, side, vs_up),
                piece: PieceId::UniversalLine(side),
                params: PieceParams::Scalar(vs_up),
                normal: Some(surfaces::universal_line_normal(side, vs_up)),
            });
        }
        if vs_primary > model.theta21() && vs_primary < TAU {
            singles.push(SlicePoint {
                z: surfaces::primary_line(ell, side, vs_primary),
                piece: PieceId::PrimaryLine(side),
                params: PieceParams::Scalar(vs_primary),
                normal: Some(surfaces::primary_line_normal(ell, side, vs_primary)),
            });
        }
    }

    let sample_surface = |a: &ActiveSurface| -> Vec<SlicePoint> {
        let cap = model
            .cap_unchecked(a.family, a.vartheta)
            .expect("active surface windows keep cap branches solvable");
        let lo = model.tau_min(a.family, a.vartheta) + INSET;
        let hi = cap - INSET;
        if hi <= lo {
            return Vec::new();
        }
        (0..n)
            .map(|i| {
                let tau = lo + (hi - lo) * i as f64 / (n - 1) as f64;
                let piece = match a.family {
                    SurfaceFamily::Primary => PieceId::Primary(a.side),
                    SurfaceFamily::TributarySame => PieceId::TributarySame(a.side),
                    SurfaceFamily::TributaryDiff => PieceId::TributaryDiff(a.side),
                };
                let z = match a.family {
                    SurfaceFamily::Primary => surfaces::primary(ell, a.side, tau, a.vartheta),
                    SurfaceFamily::TributarySame => {
                        surfaces::tributary_same(ell, a.side, tau, a.vartheta)
                    }
                    SurfaceFamily::TributaryDiff => {
                        surfaces::tributary_diff(ell, a.side, tau, a.vartheta)
                    }
                };
                let normal = match a.family {
                    SurfaceFamily::Primary => {
                        surfaces::primary_normal(ell, a.side, tau, a.vartheta)
                    }
                    SurfaceFamily::TributarySame => {
                        surfaces::tributary_same_normal(ell, a.side, tau, a.vartheta)
                    }
                    SurfaceFamily::TributaryDiff => {
                        surfaces::tributary_diff_normal(ell, a.side, tau, a.vartheta)
                    }
                };
                SlicePoint {
                    z,
                    piece,
                    params: PieceParams::surface(tau, a.vartheta),
                    normal: Some(normal),
                }
            })
            .collect()
    };

    #[cfg(feature = "parallel")]
    let sampled: Vec<Vec<SlicePoint>> = surfaces_active.par_iter().map(sample_surface).collect();
    #[cfg(not(feature = "parallel"))]
    let sampled: Vec<Vec<SlicePoint>> = surfaces_active.iter().map(sample_surface).collect();

    let mut plus: Vec<SlicePoint> = Vec::new();
    let mut minus: Vec<SlicePoint> = Vec::new();
    for pt in sampled.into_iter().flatten().chain(singles) {
        match pt.piece.side() {
            Some(Side::Plus) => plus.push(pt),
            Some(Side::Minus) => minus.push(pt),
            None => unreachable!("side-indexed pieces only at this stage"),
        }
    }

    let vs_slice = PI - (PI - theta).abs();
    let dl_family = if vs_slice >= model.theta12() {
        SurfaceFamily::TributaryDiff
    } else {
        SurfaceFamily::TributarySame
    };
    let dl_tau = model
        .cap_unchecked(dl_family, vs_slice)
        .expect("dispersal cap is defined on (0, pi]");
    let dl = SlicePoint {
        z: model.dispersal_point(theta),
        piece: PieceId::Dispersal,
        params: PieceParams::surface(dl_tau, vs_slice),
        normal: None,
    };

    // Order each side by polar angle walked from its boundary point toward
    // the dispersal point, then stitch: plus side out, dispersal, minus
    // side back.
    let dl_angle = polar(&dl.z);
    let order = |pts: &mut Vec<SlicePoint>, side: Side| {
        let anchor = polar(&surfaces::bup(ell, side, theta));
        let toward_dl = (dl_angle - anchor).rem_euclid(TAU) <= PI;
        let key = |p: &SlicePoint| {
            if toward_dl {
                (polar(&p.z) - anchor).rem_euclid(TAU)
            } else {
                (anchor - polar(&p.z)).rem_euclid(TAU)
            }
        };
        pts.sort_by(|a, b| key(a).partial_cmp(&key(b)).expect("polar keys are finite"));
    };
    order(&mut plus, Side::Plus);
    order(&mut minus, Side::Minus);
    minus.reverse();

    let mut out = plus;
    out.push(dl);
    out.extend(minus);
    // All points of the slice share the slice heading exactly.
    for pt in &mut out {
        pt.z.theta = theta;
    }
    out
}
