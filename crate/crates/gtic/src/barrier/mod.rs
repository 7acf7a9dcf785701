//! Assembly of the valid barrier for a given capture radius: regime
//! selection, critical slice angles, cap functions bounding each surface's
//! retrograde-time range, surface/line evaluation, the four
//! surface-crossing systems, the dispersal line, and sampled slices.

mod slice;
mod surfaces;

pub use slice::{sample_slice, SlicePoint};
pub use surfaces::{
    bup, bup_aligned, bup_aligned_normal, bup_normal, heading_from_vartheta_primary,
    heading_from_vartheta_up, primary, primary_line, primary_line_normal, primary_normal,
    tributary_diff, tributary_diff_normal, tributary_same, tributary_same_normal, universal_line,
    universal_line_normal, Side,
};

use crate::error::{Error, Result};
use crate::kinematics::{wrap_angle, Costate, State};
use crate::roots::{self, xi_eta};
use std::f64::consts::{PI, TAU};

/// Qualitative shape of the barrier as a function of the capture radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `ell < ell_J`: the primary surface crosses the opposite-turn
    /// tributary of the other side.
    Small,
    /// `ell = ell_J` (within guard): the crossing degenerates to a point.
    Medium,
    /// `ell > ell_J`: the opposite-turn tributary crosses the same-turn
    /// tributary of the other side.
    Large,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Small => "small",
            Regime::Medium => "medium",
            Regime::Large => "large",
        })
    }
}

/// Identity of a barrier piece, side-indexed exactly when the piece has
/// two mirror-image copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PieceId {
    /// Aligned arc of the usable-part boundary (`theta = 0`).
    BupAligned,
    /// Side-indexed curve of the usable-part boundary.
    Bup(Side),
    /// Primary surface.
    Primary(Side),
    /// Boundary line of the primary surface through the rear point.
    PrimaryLine(Side),
    /// Universal line.
    UniversalLine(Side),
    /// Same-turn tributary surface.
    TributarySame(Side),
    /// Opposite-turn tributary surface.
    TributaryDiff(Side),
    /// Dispersal line.
    Dispersal,
}

impl PieceId {
    /// Short label used in serialized output.
    pub fn label(&self) -> &'static str {
        match self {
            PieceId::BupAligned => "BUP0",
            PieceId::Bup(_) => "BUP",
            PieceId::Primary(_) => "P",
            PieceId::PrimaryLine(_) => "PL",
            PieceId::UniversalLine(_) => "UL",
            PieceId::TributarySame(_) => "TS",
            PieceId::TributaryDiff(_) => "TD",
            PieceId::Dispersal => "DL",
        }
    }

    /// The side, when the piece is side-indexed.
    pub fn side(&self) -> Option<Side> {
        match self {
            PieceId::Bup(s)
            | PieceId::Primary(s)
            | PieceId::PrimaryLine(s)
            | PieceId::UniversalLine(s)
            | PieceId::TributarySame(s)
            | PieceId::TributaryDiff(s) => Some(*s),
            PieceId::BupAligned | PieceId::Dispersal => None,
        }
    }
}

/// One of the three surface families with a nontrivial cap function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceFamily {
    Primary,
    TributarySame,
    TributaryDiff,
}

/// Retrograde-time / slice-angle coordinates on a surface piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceParams {
    pub tau: f64,
    pub vartheta: f64,
}

/// Parameters accepted by the piece evaluators: a `(tau, vartheta)` pair
/// for surfaces, a single scalar for lines and boundary curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PieceParams {
    Surface(SurfaceParams),
    Scalar(f64),
}

impl PieceParams {
    pub fn surface(tau: f64, vartheta: f64) -> Self {
        PieceParams::Surface(SurfaceParams { tau, vartheta })
    }
}

/// The crossing systems between surface families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntersectionPair {
    /// Primary against the other side's same-turn tributary.
    PrimaryTributarySame,
    /// The two opposite-turn tributaries against each other.
    TributaryDiffBoth,
    /// Primary against the other side's opposite-turn tributary
    /// (small radius only).
    PrimaryTributaryDiff,
    /// Same-turn against the other side's opposite-turn tributary
    /// (large radius only).
    TributarySameDiff,
}

/// All radius-dependent constants of the barrier, computed once.
///
/// Immutable after [`BarrierModel::build`] and freely shareable across
/// threads; every evaluator on it is a pure function.
#[derive(Debug, Clone)]
pub struct BarrierModel {
    ell: f64,
    regime: Regime,
    theta_j: f64,
    ell_j: f64,
    theta1: f64,
    theta2: f64,
    /// Root of the small-regime junction equation; reused as `theta_J` in
    /// the medium regime so the small-side branch formulas stay valid.
    w: Option<f64>,
    m: Option<f64>,
    n: Option<f64>,
}

impl BarrierModel {
    /// Decides the regime against `ell_J`, solves the regime roots and
    /// audits the cap-branch junctions.
    ///
    /// A junction mismatch above `1e-8` means a wrong root and is a build
    /// error rather than a warning.
    pub fn build(ell: f64) -> Result<Self> {
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(Error::OutOfDomain {
                name: "ell",
                value: ell,
                bound: "(0, +inf)",
            });
        }
        let (theta_j, ell_j) = roots::junction_constants();
        let model = if (ell - ell_j).abs() < roots::ELL_J_GUARD {
            BarrierModel {
                ell,
                regime: Regime::Medium,
                theta_j,
                ell_j,
                theta1: theta_j,
                theta2: theta_j,
                w: Some(theta_j),
                m: None,
                n: None,
            }
        } else if ell < ell_j {
            let w = roots::solve_w(ell)?.value;
            BarrierModel {
                ell,
                regime: Regime::Small,
                theta_j,
                ell_j,
                theta1: w,
                theta2: roots::theta2_small(ell, w),
                w: Some(w),
                m: None,
                n: None,
            }
        } else {
            let m = roots::solve_m(ell)?.value;
            let n = roots::solve_n(ell)?.value;
            BarrierModel {
                ell,
                regime: Regime::Large,
                theta_j,
                ell_j,
                theta1: m,
                theta2: n,
                w: None,
                m: Some(m),
                n: Some(n),
            }
        };
        model.audit_junctions()?;
        Ok(model)
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn theta_j(&self) -> f64 {
        self.theta_j
    }

    pub fn ell_j(&self) -> f64 {
        self.ell_j
    }

    /// Critical slice angle below which the primary surface meets the
    /// other side's same-turn tributary.
    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    /// Critical slice angle above which the two opposite-turn tributaries
    /// meet each other.
    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    /// Upper slice angle of the same-turn tributary and universal line:
    /// `theta1` below the junction radius, `theta2` above.
    pub fn theta12(&self) -> f64 {
        match self.regime {
            Regime::Small | Regime::Medium => self.theta1,
            Regime::Large => self.theta2,
        }
    }

    /// Companion case split: `theta2` below the junction radius, `theta1`
    /// above.
    pub fn theta21(&self) -> f64 {
        match self.regime {
            Regime::Small | Regime::Medium => self.theta2,
            Regime::Large => self.theta1,
        }
    }

    /// The cached regime root: `w` below the junction radius (or
    /// `theta_J` at it), `(m, n)` above.
    pub fn regime_roots(&self) -> (Option<f64>, Option<f64>, Option<f64>) {
        (self.w, self.m, self.n)
    }

    fn primary_cap_near(&self, vartheta: f64) -> f64 {
        let ell = self.ell;
        let radicand = (ell + vartheta).powi(2) - (ell - 2.0 * (0.5 * vartheta).sin()).powi(2);
        let arg = (0.5 * vartheta).cos() - 0.5 * radicand.max(0.0).sqrt();
        arg.clamp(-1.0, 1.0).acos() - 0.5 * vartheta
    }

    fn primary_cap_mid(&self, vartheta: f64) -> f64 {
        let ell = self.ell;
        let w = self
            .w
            .expect("mid branch only applies below the junction radius");
        let arg = 2.0 * (0.5 * vartheta).cos() - 0.5 * ((ell + w).powi(2) - ell * ell + 4.0).sqrt();
        arg.clamp(-1.0, 1.0).acos() - 0.5 * vartheta
    }

    fn tributary_same_cap_near(&self, vartheta: f64) -> f64 {
        let ell = self.ell;
        let arg = (2.0 * (0.5 * vartheta).sin() - ell) / (ell + vartheta);
        0.5 * vartheta + arg.clamp(-1.0, 1.0).acos()
    }

    fn tributary_same_cap_far(&self, vartheta: f64) -> Result<f64> {
        let ell = self.ell;
        let q = roots::solve_q_in(ell, vartheta)?.value;
        let arg = ((ell + vartheta).powi(2) - (ell + q).powi(2)) / (4.0 * (ell + vartheta));
        Ok(PI - arg.clamp(-1.0, 1.0).asin())
    }

    fn tributary_diff_cap(&self, vartheta: f64) -> Result<f64> {
        if vartheta <= self.theta12() {
            Ok(vartheta)
        } else if self.regime != Regime::Large && vartheta <= self.theta2 {
            Ok(0.5 * (self.w.expect("small or medium regime") + vartheta))
        } else if vartheta <= TAU - self.theta2 {
            let p = roots::solve_p_in(self.ell, vartheta)?.value;
            Ok(0.5 * (p + vartheta))
        } else {
            let q = roots::solve_q_in(self.ell, TAU - vartheta)?.value;
            Ok(0.5 * (q + vartheta))
        }
    }

    pub(crate) fn cap_unchecked(&self, family: SurfaceFamily, vartheta: f64) -> Result<f64> {
        match family {
            SurfaceFamily::Primary => {
                if vartheta <= self.theta1 {
                    Ok(self.primary_cap_near(vartheta))
                } else if self.regime != Regime::Large && vartheta <= self.theta21() {
                    Ok(self.primary_cap_mid(vartheta))
                } else {
                    Ok(PI - 0.5 * vartheta)
                }
            }
            SurfaceFamily::TributarySame => {
                if vartheta <= self.theta1 {
                    Ok(self.tributary_same_cap_near(vartheta))
                } else {
                    self.tributary_same_cap_far(vartheta)
                }
            }
            SurfaceFamily::TributaryDiff => self.tributary_diff_cap(vartheta),
        }
    }

    /// The family's `vartheta` range on the valid barrier. The upper end
    /// is open for surfaces; the same-turn tributary's closure at
    /// `theta12` carries the universal line.
    pub fn vartheta_sup(&self, family: SurfaceFamily) -> f64 {
        match family {
            SurfaceFamily::Primary => TAU,
            SurfaceFamily::TributarySame => self.theta12(),
            SurfaceFamily::TributaryDiff => TAU - self.theta21(),
        }
    }

    /// Largest valid retrograde time of `family` at slice parameter
    /// `vartheta`: the regime- and interval-correct branch value.
    pub fn tau_max(&self, family: SurfaceFamily, vartheta: f64) -> Result<f64> {
        let sup = self.vartheta_sup(family);
        let in_range = match family {
            // Closed at theta12: the cap is still defined where the
            // universal line ends.
            SurfaceFamily::TributarySame => vartheta > 0.0 && vartheta <= sup + 1e-12,
            _ => vartheta > 0.0 && vartheta < sup,
        };
        if !in_range {
            return Err(Error::OutOfDomain {
                name: "vartheta",
                value: vartheta,
                bound: match family {
                    SurfaceFamily::Primary => "(0, 2*pi)",
                    SurfaceFamily::TributarySame => "(0, theta12]",
                    SurfaceFamily::TributaryDiff => "(0, 2*pi - theta21)",
                },
            });
        }
        self.cap_unchecked(family, vartheta)
    }

    /// Lower end of the valid retrograde-time interval of `family` at
    /// `vartheta` (open).
    pub fn tau_min(&self, family: SurfaceFamily, vartheta: f64) -> f64 {
        match family {
            SurfaceFamily::Primary => 0.0,
            SurfaceFamily::TributarySame => vartheta,
            SurfaceFamily::TributaryDiff => 0.5 * vartheta,
        }
    }

    fn audit_junctions(&self) -> Result<()> {
        const TOL: f64 = 1e-8;
        const INSET: f64 = 1e-9;
        let check = |family: &'static str, vartheta: f64, a: f64, b: f64| -> Result<()> {
            if (a - b).abs() > TOL {
                Err(Error::JunctionMismatch {
                    family,
                    vartheta,
                    a,
                    b,
                })
            } else {
                Ok(())
            }
        };
        match self.regime {
            Regime::Small => {
                let (t1, t2) = (self.theta1, self.theta2);
                check("P", t1, self.primary_cap_near(t1), self.primary_cap_mid(t1))?;
                // At theta2 the mid-branch arccos argument reaches -1, where
                // the angle comparison is ill-conditioned; compare arguments.
                let w = self.w.unwrap();
                let arg = 2.0 * (0.5 * t2).cos()
                    - 0.5 * ((self.ell + w).powi(2) - self.ell * self.ell + 4.0).sqrt();
                check("P", t2, arg, -1.0)?;
                let t = t2 + INSET;
                check("TD", t, 0.5 * (w + t), self.tributary_diff_cap(t)?)?;
            }
            Regime::Medium => {
                let tj = self.theta_j;
                let radicand =
                    (self.ell + tj).powi(2) - (self.ell - 2.0 * (0.5 * tj).sin()).powi(2);
                let arg = (0.5 * tj).cos() - 0.5 * radicand.max(0.0).sqrt();
                check("P", tj, arg, -1.0)?;
                let t = tj + INSET;
                check(
                    "TD",
                    t,
                    0.5 * (self.w.unwrap() + t),
                    self.tributary_diff_cap(t)?,
                )?;
            }
            Regime::Large => {
                let (t1, t2) = (self.theta1, self.theta2);
                let radicand =
                    (self.ell + t1).powi(2) - (self.ell - 2.0 * (0.5 * t1).sin()).powi(2);
                let arg = (0.5 * t1).cos() - 0.5 * radicand.max(0.0).sqrt();
                check("P", t1, arg, -1.0)?;
                let t = t1 + INSET;
                check(
                    "TS",
                    t,
                    self.tributary_same_cap_near(t),
                    self.tributary_same_cap_far(t)?,
                )?;
                let t = t2 + INSET;
                check("TD", t, t, self.tributary_diff_cap(t)?)?;
                let t = TAU - t2 - INSET;
                let p_branch = {
                    let p = roots::solve_p_in(self.ell, t)?.value;
                    0.5 * (p + t)
                };
                let q_branch = {
                    let q = roots::solve_q_in(self.ell, TAU - t)?.value;
                    0.5 * (q + t)
                };
                check("TD", t, p_branch, q_branch)?;
            }
        }
        Ok(())
    }

    /// Evaluates a piece of the valid barrier at in-domain parameters.
    pub fn eval_piece(&self, piece: PieceId, params: PieceParams) -> Result<State> {
        let ell = self.ell;
        match (piece, params) {
            (PieceId::Primary(s), PieceParams::Surface(p)) => {
                self.check_surface(SurfaceFamily::Primary, p)?;
                Ok(primary(ell, s, p.tau, p.vartheta))
            }
            (PieceId::TributarySame(s), PieceParams::Surface(p)) => {
                self.check_surface(SurfaceFamily::TributarySame, p)?;
                Ok(tributary_same(ell, s, p.tau, p.vartheta))
            }
            (PieceId::TributaryDiff(s), PieceParams::Surface(p)) => {
                self.check_surface(SurfaceFamily::TributaryDiff, p)?;
                Ok(tributary_diff(ell, s, p.tau, p.vartheta))
            }
            (PieceId::PrimaryLine(s), PieceParams::Scalar(t)) => {
                if !(t > self.theta21() && t < TAU) {
                    return Err(Error::OutOfDomain {
                        name: "vartheta",
                        value: t,
                        bound: "(theta21, 2*pi)",
                    });
                }
                Ok(primary_line(ell, s, t))
            }
            (PieceId::UniversalLine(s), PieceParams::Scalar(t)) => {
                if !(t > 0.0 && t <= self.theta12() + 1e-12) {
                    return Err(Error::OutOfDomain {
                        name: "vartheta",
                        value: t,
                        bound: "(0, theta12]",
                    });
                }
                Ok(universal_line(ell, s, t))
            }
            (PieceId::Bup(s), PieceParams::Scalar(t)) => {
                if !(t > 0.0 && t < TAU) {
                    return Err(Error::OutOfDomain {
                        name: "theta_f",
                        value: t,
                        bound: "(0, 2*pi)",
                    });
                }
                Ok(bup(ell, s, t))
            }
            (PieceId::BupAligned, PieceParams::Scalar(t)) => Ok(bup_aligned(ell, t)),
            (PieceId::Dispersal, PieceParams::Scalar(t)) => {
                if !(t > 0.0 && t < TAU) {
                    return Err(Error::OutOfDomain {
                        name: "theta",
                        value: t,
                        bound: "(0, 2*pi)",
                    });
                }
                Ok(self.dispersal_point(t))
            }
            _ => Err(Error::Unsupported("parameter arity")),
        }
    }

    /// The analytic normal at in-domain parameters of a surface, emanated
    /// line, or boundary curve. Not defined on the dispersal line.
    pub fn eval_piece_normal(&self, piece: PieceId, params: PieceParams) -> Result<Costate> {
        let ell = self.ell;
        match (piece, params) {
            (PieceId::Primary(s), PieceParams::Surface(p)) => {
                self.check_surface(SurfaceFamily::Primary, p)?;
                Ok(primary_normal(ell, s, p.tau, p.vartheta))
            }
            (PieceId::TributarySame(s), PieceParams::Surface(p)) => {
                self.check_surface(SurfaceFamily::TributarySame, p)?;
                Ok(tributary_same_normal(ell, s, p.tau, p.vartheta))
            }
            (PieceId::TributaryDiff(s), PieceParams::Surface(p)) => {
                self.check_surface(SurfaceFamily::TributaryDiff, p)?;
                Ok(tributary_diff_normal(ell, s, p.tau, p.vartheta))
            }
            (PieceId::PrimaryLine(s), PieceParams::Scalar(t)) => {
                if !(t > self.theta21() && t < TAU) {
                    return Err(Error::OutOfDomain {
                        name: "vartheta",
                        value: t,
                        bound: "(theta21, 2*pi)",
                    });
                }
                Ok(primary_line_normal(ell, s, t))
            }
            (PieceId::UniversalLine(s), PieceParams::Scalar(t)) => {
                if !(t > 0.0 && t <= self.theta12() + 1e-12) {
                    return Err(Error::OutOfDomain {
                        name: "vartheta",
                        value: t,
                        bound: "(0, theta12]",
                    });
                }
                Ok(universal_line_normal(s, t))
            }
            (PieceId::Bup(s), PieceParams::Scalar(t)) => Ok(bup_normal(s, t)),
            (PieceId::BupAligned, PieceParams::Scalar(t)) => Ok(bup_aligned_normal(t)),
            (PieceId::Dispersal, _) => Err(Error::Unsupported("normal")),
            _ => Err(Error::Unsupported("parameter arity")),
        }
    }

    fn check_surface(&self, family: SurfaceFamily, p: SurfaceParams) -> Result<()> {
        let cap = self.tau_max(family, p.vartheta)?;
        let lo = self.tau_min(family, p.vartheta);
        if !(p.tau > lo && p.tau < cap) {
            return Err(Error::OutOfDomain {
                name: "tau",
                value: p.tau,
                bound: match family {
                    SurfaceFamily::Primary => "(0, tau_max)",
                    SurfaceFamily::TributarySame => "(vartheta, tau_max)",
                    SurfaceFamily::TributaryDiff => "(vartheta/2, tau_max)",
                },
            });
        }
        Ok(())
    }

    /// Parameters `(tau, tau')` of the crossing between two surface
    /// families at slice parameter `vartheta`.
    ///
    /// `tau` belongs to the first family of the pair evaluated on the
    /// `+1` side convention, `tau'` to the second; see
    /// [`intersection_points`](Self::intersection_points) for the exact
    /// side/parameter pairing.
    pub fn intersection_params(&self, pair: IntersectionPair, vartheta: f64) -> Result<(f64, f64)> {
        let ell = self.ell;
        match pair {
            IntersectionPair::PrimaryTributarySame => {
                if !(vartheta > 0.0 && vartheta <= self.theta1 + 1e-12) {
                    return Err(Error::OutOfDomain {
                        name: "vartheta",
                        value: vartheta,
                        bound: "(0, theta1]",
                    });
                }
                Ok((
                    self.primary_cap_near(vartheta),
                    self.tributary_same_cap_near(vartheta),
                ))
            }
            IntersectionPair::TributaryDiffBoth => {
                if !(vartheta > self.theta2 && vartheta < TAU - self.theta2) {
                    return Err(Error::OutOfDomain {
                        name: "vartheta",
                        value: vartheta,
                        bound: "(theta2, 2*pi - theta2)",
                    });
                }
                let p = roots::solve_p_in(ell, vartheta)?.value;
                let v = xi_eta(ell, p);
                let radicand = (v.xi - 4.0 * (0.5 * vartheta).cos()).powi(2) + v.eta * v.eta - 4.0;
                let tau_prime = PI - 0.5 * (ell + vartheta) + 0.5 * radicand.max(0.0).sqrt();
                Ok((0.5 * (vartheta + p), tau_prime))
            }
            IntersectionPair::PrimaryTributaryDiff => {
                if self.regime == Regime::Large {
                    return Err(Error::RegimeMismatch {
                        pair: "P x TD",
                        need: "small",
                        ell,
                    });
                }
                if !(vartheta > self.theta1 && vartheta < self.theta2) {
                    return Err(Error::OutOfDomain {
                        name: "vartheta",
                        value: vartheta,
                        bound: "(theta1, theta2)",
                    });
                }
                let w = self.w.expect("small or medium regime");
                Ok((self.primary_cap_mid(vartheta), 0.5 * (w + vartheta)))
            }
            IntersectionPair::TributarySameDiff => {
                if self.regime != Regime::Large {
                    return Err(Error::RegimeMismatch {
                        pair: "TS x TD",
                        need: "large",
                        ell,
                    });
                }
                if !(vartheta > self.theta1 && vartheta < self.theta2) {
                    return Err(Error::OutOfDomain {
                        name: "vartheta",
                        value: vartheta,
                        bound: "(theta1, theta2)",
                    });
                }
                let q = roots::solve_q_in(ell, vartheta)?.value;
                Ok((
                    self.tributary_same_cap_far(vartheta)?,
                    PI + 0.5 * (q - vartheta),
                ))
            }
        }
    }

    /// The two coincident states of a crossing, for verification.
    ///
    /// Uses the `side = +1` convention of the crossing systems: the first
    /// state is evaluated on the first family's side and slice parameter,
    /// the second on the partner's.
    pub fn intersection_points(
        &self,
        pair: IntersectionPair,
        vartheta: f64,
    ) -> Result<(State, State)> {
        let (tau, tau_prime) = self.intersection_params(pair, vartheta)?;
        let ell = self.ell;
        Ok(match pair {
            IntersectionPair::PrimaryTributarySame => (
                primary(ell, Side::Plus, tau, vartheta),
                tributary_same(ell, Side::Minus, tau_prime, vartheta),
            ),
            IntersectionPair::TributaryDiffBoth => (
                tributary_diff(ell, Side::Minus, tau, vartheta),
                tributary_diff(ell, Side::Plus, tau_prime, TAU - vartheta),
            ),
            IntersectionPair::PrimaryTributaryDiff => (
                primary(ell, Side::Plus, tau, vartheta),
                tributary_diff(ell, Side::Minus, tau_prime, vartheta),
            ),
            IntersectionPair::TributarySameDiff => (
                tributary_same(ell, Side::Minus, tau, vartheta),
                tributary_diff(ell, Side::Plus, tau_prime, TAU - vartheta),
            ),
        })
    }

    /// Point of the dispersal line at slice angle `theta`.
    ///
    /// Carried by the opposite-turn tributary cap on the slice-selected
    /// side for `theta` in `[theta12, 2*pi - theta12]` and by the
    /// same-turn tributary cap otherwise. At `theta = pi` the two side
    /// selections coincide.
    pub fn dispersal_point(&self, theta: f64) -> State {
        let theta = wrap_angle(theta);
        let side = if theta > 0.0 && theta <= PI {
            Side::Minus
        } else {
            Side::Plus
        };
        let vs = PI - (PI - theta).abs();
        if vs >= self.theta12() {
            let cap = self
                .tributary_diff_cap(vs)
                .expect("cap branches cover [theta12, pi]");
            tributary_diff(self.ell, side, cap, vs)
        } else {
            let cap = self
                .cap_unchecked(SurfaceFamily::TributarySame, vs)
                .expect("cap branches cover (0, theta12)");
            tributary_same(self.ell, side, cap, vs)
        }
    }

    /// Samples the full slice at angle `theta`; see [`sample_slice`].
    pub fn slice(&self, theta: f64, n: usize) -> Vec<SlicePoint> {
        sample_slice(self, theta, n)
    }
}
