//! Closed-form parametrizations of the emanated semipermeable surfaces
//! and lines, together with their analytic normals.
//!
//! Everything here evaluates the raw formulas without clipping to the
//! valid barrier: callers that need the valid parts go through
//! [`BarrierModel`](super::BarrierModel). All surfaces carry the slice
//! parameter `vartheta`, chosen so the heading component is
//! `(1 -+ side)*pi +- side*vartheta` and depends on `vartheta` alone.
//!
//! Normals are obtained by transporting the target-circle unit normal
//! along each piece's defining control sequence with the closed-form
//! adjoint flow.

use crate::kinematics::{flow_costate, ControlPair, Costate, State};
use std::f64::consts::PI;

/// Which of the two mirror-image copies of a side-indexed piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Plus, Side::Minus];

    /// The side as the signed value `-1.0` or `+1.0`.
    pub fn sign(self) -> f64 {
        match self {
            Side::Minus => -1.0,
            Side::Plus => 1.0,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Minus => Side::Plus,
            Side::Plus => Side::Minus,
        }
    }

    pub fn from_sign(s: f64) -> Option<Side> {
        if s > 0.0 {
            Some(Side::Plus)
        } else if s < 0.0 {
            Some(Side::Minus)
        } else {
            None
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(if *self == Side::Plus { "+1" } else { "-1" })
    }
}

/// Heading of a side-indexed piece at slice parameter `vartheta`:
/// `(1 + side) pi - side vartheta` for pieces grown off the universal
/// line and the aligned arc.
pub fn heading_from_vartheta_up(side: Side, vartheta: f64) -> f64 {
    let v = side.sign();
    (1.0 + v) * PI - v * vartheta
}

/// Heading of the primary family at slice parameter `vartheta`:
/// `(1 - side) pi + side vartheta`.
pub fn heading_from_vartheta_primary(side: Side, vartheta: f64) -> f64 {
    let v = side.sign();
    (1.0 - v) * PI + v * vartheta
}

/// Point of the aligned boundary arc (`theta = 0`) at polar angle `phi_f`.
pub fn bup_aligned(ell: f64, phi_f: f64) -> State {
    State::new(ell * phi_f.sin(), ell * phi_f.cos(), 0.0)
}

/// Outward unit normal of the target circle on the aligned arc.
pub fn bup_aligned_normal(phi_f: f64) -> Costate {
    Costate::new(phi_f.sin(), phi_f.cos(), 0.0)
}

/// Point of the side-indexed boundary-of-usable-part curve at final
/// heading `theta_f`.
pub fn bup(ell: f64, side: Side, theta_f: f64) -> State {
    let v = side.sign();
    let (s, c) = (0.5 * theta_f).sin_cos();
    State::new(-v * ell * s, -v * ell * c, theta_f)
}

/// Outward unit normal of the target circle along the side-indexed
/// boundary curve.
pub fn bup_normal(side: Side, theta_f: f64) -> Costate {
    let v = side.sign();
    let (s, c) = (0.5 * theta_f).sin_cos();
    Costate::new(-v * s, -v * c, 0.0)
}

/// The primary surface, grown retrograde off the side-indexed boundary
/// curve with controls `(-side, side)`.
pub fn primary(ell: f64, side: Side, tau: f64, vartheta: f64) -> State {
    let v = side.sign();
    let (s_half, c_half) = (0.5 * vartheta).sin_cos();
    State::new(
        -v * (ell * s_half + vartheta.cos() - (tau + vartheta).cos() + 1.0 - tau.cos()),
        -ell * c_half + vartheta.sin() - (tau + vartheta).sin() + tau.sin(),
        heading_from_vartheta_primary(side, vartheta),
    )
}

pub fn primary_normal(ell: f64, side: Side, tau: f64, vartheta: f64) -> Costate {
    let v = side.sign();
    let theta_f = heading_from_vartheta_primary(side, vartheta) + 2.0 * v * tau;
    let z_f = bup(ell, side, theta_f);
    flow_costate(
        tau,
        &z_f,
        &bup_normal(side, theta_f),
        ControlPair::new(-v, v),
    )
}

/// The line emanating from the rear aligned point with controls
/// `(-side, side)`; it forms the outer boundary of the primary surface.
pub fn primary_line(ell: f64, side: Side, vartheta: f64) -> State {
    let v = side.sign();
    let (s_half, c_half) = (0.5 * vartheta).sin_cos();
    State::new(
        -v * (ell * s_half + 2.0 * c_half + 1.0 + vartheta.cos()),
        -ell * c_half + 2.0 * s_half + vartheta.sin(),
        heading_from_vartheta_primary(side, vartheta),
    )
}

pub fn primary_line_normal(ell: f64, side: Side, vartheta: f64) -> Costate {
    let v = side.sign();
    let z_f = bup_aligned(ell, 0.0);
    flow_costate(
        PI - 0.5 * vartheta,
        &z_f,
        &bup_aligned_normal(0.0),
        ControlPair::new(-v, v),
    )
}

/// The universal line, grown off the rear aligned point with the pursuer
/// running straight: controls `(0, side)`.
pub fn universal_line(ell: f64, side: Side, vartheta: f64) -> State {
    let v = side.sign();
    State::new(
        v * (1.0 - vartheta.cos()),
        ell + vartheta - vartheta.sin(),
        heading_from_vartheta_up(side, vartheta),
    )
}

/// Analytic normal on the universal line: `[0, 1, side (1 - cos tau)]`.
pub fn universal_line_normal(side: Side, vartheta: f64) -> Costate {
    Costate::new(0.0, 1.0, side.sign() * (1.0 - vartheta.cos()))
}

/// Same-turn tributary of the universal line: both players hold `side`.
///
/// `tau` is the total time-to-go; the tributary leg lasts
/// `tau - vartheta` after `vartheta` spent on the universal line.
pub fn tributary_same(ell: f64, side: Side, tau: f64, vartheta: f64) -> State {
    let v = side.sign();
    let (s, c) = (tau - vartheta).sin_cos();
    State::new(
        v * ((ell + vartheta) * s + 1.0 - vartheta.cos()),
        (ell + vartheta) * c - vartheta.sin(),
        heading_from_vartheta_up(side, vartheta),
    )
}

pub fn tributary_same_normal(ell: f64, side: Side, tau: f64, vartheta: f64) -> Costate {
    let v = side.sign();
    let z_ul = universal_line(ell, side, vartheta);
    let nu_ul = universal_line_normal(side, vartheta);
    flow_costate(tau - vartheta, &z_ul, &nu_ul, ControlPair::new(v, v))
}

/// Opposite-turn tributary of the universal line: controls `(-side, side)`.
///
/// `tau` is the total time-to-go; the line leg lasts `2 tau - vartheta`
/// and the tributary leg `vartheta - tau`.
pub fn tributary_diff(ell: f64, side: Side, tau: f64, vartheta: f64) -> State {
    let v = side.sign();
    let (s, c) = (tau - vartheta).sin_cos();
    let reach = ell + 2.0 * tau - vartheta;
    State::new(
        v * (reach * s + 2.0 * c - 1.0 - vartheta.cos()),
        reach * c - 2.0 * s - vartheta.sin(),
        heading_from_vartheta_up(side, vartheta),
    )
}

pub fn tributary_diff_normal(ell: f64, side: Side, tau: f64, vartheta: f64) -> Costate {
    let v = side.sign();
    let t1 = 2.0 * tau - vartheta;
    let z_ul = universal_line(ell, side, t1);
    let nu_ul = universal_line_normal(side, t1);
    flow_costate(vartheta - tau, &z_ul, &nu_ul, ControlPair::new(-v, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{flow_state, wrap_angle};
    use std::f64::consts::TAU;

    fn close(a: &State, b: &State, tol: f64) -> bool {
        let dth = (a.theta() - b.theta()).rem_euclid(TAU);
        (a.x - b.x).abs() < tol && (a.y - b.y).abs() < tol && (dth.min(TAU - dth)) < tol
    }

    #[test]
    fn primary_line_hand_values() {
        // vartheta = pi, ell = 1, plus side.
        let z = primary_line(1.0, Side::Plus, PI);
        assert!(close(&z, &State::new(-1.0, 2.0, PI), 1e-12));
    }

    #[test]
    fn universal_line_hand_values() {
        let z = universal_line(0.5, Side::Plus, PI);
        assert!(close(&z, &State::new(2.0, 0.5 + PI, PI), 1e-12));
    }

    #[test]
    fn primary_at_zero_tau_lands_on_bup() {
        let th = 0.5 * PI;
        let z = primary(0.5, Side::Plus, 0.0, th);
        let expect = State::new(-0.5 * (th / 2.0).sin(), -0.5 * (th / 2.0).cos(), th);
        assert!(close(&z, &expect, 1e-12));
        assert!((z.x + 0.353_553_390_593_273_8).abs() < 1e-9);
        assert!((z.y + 0.353_553_390_593_273_8).abs() < 1e-9);
    }

    #[test]
    fn surfaces_match_flow_composition() {
        // The closed forms must agree with transporting the terminal state
        // by the generic flow along each piece's control sequence.
        let ell = 0.8;
        for side in Side::BOTH {
            let v = side.sign();
            for &(tau, th) in &[(0.4, 1.0), (1.2, 2.0), (0.7, 4.5)] {
                let theta_f = heading_from_vartheta_primary(side, th) + 2.0 * v * tau;
                let by_flow = flow_state(tau, &bup(ell, side, theta_f), ControlPair::new(-v, v));
                assert!(close(&primary(ell, side, tau, th), &by_flow, 1e-12));
            }
            for &(tau, th) in &[(1.5, 1.0), (2.5, 2.0)] {
                let by_flow = flow_state(
                    tau - th,
                    &universal_line(ell, side, th),
                    ControlPair::new(v, v),
                );
                assert!(close(&tributary_same(ell, side, tau, th), &by_flow, 1e-12));
            }
            for &(tau, th) in &[(0.8, 1.2), (1.4, 2.2)] {
                let by_flow = flow_state(
                    th - tau,
                    &universal_line(ell, side, 2.0 * tau - th),
                    ControlPair::new(-v, v),
                );
                assert!(close(&tributary_diff(ell, side, tau, th), &by_flow, 1e-12));
            }
        }
    }

    #[test]
    fn boundary_identities_hold_on_samples() {
        let ell = 0.5;
        for i in 1..100 {
            let th = TAU * i as f64 / 100.0;
            for side in Side::BOTH {
                // Primary at its cap equals the primary line.
                let a = primary(ell, side, PI - 0.5 * th, th);
                let b = primary_line(ell, side, th);
                assert!(close(&a, &b, 1e-12));
                // Opposite-turn tributary at tau = vartheta/2 equals the
                // mirrored-parameter primary line.
                let a = tributary_diff(ell, side, 0.5 * th, th);
                let b = primary_line(ell, side, TAU - th);
                assert!(close(&a, &b, 1e-12));
                // Same-turn tributary at tau = vartheta sits on the
                // universal line.
                let a = tributary_same(ell, side, th, th);
                let b = universal_line(ell, side, th);
                assert!(close(&a, &b, 1e-12));
            }
        }
    }

    #[test]
    fn sides_are_mirror_images() {
        let ell = 1.3;
        for &(tau, th) in &[(0.5, 1.1), (0.9, 2.7), (0.2, 5.0)] {
            let plus = primary(ell, Side::Plus, tau, th);
            let minus = primary(ell, Side::Minus, tau, th);
            let mirrored = crate::kinematics::reflect(&plus);
            assert!(close(&minus, &mirrored, 1e-12));
        }
        for &(tau, th) in &[(1.4, 1.1), (3.0, 2.7)] {
            let plus = tributary_same(ell, Side::Plus, tau, th);
            let mirrored = crate::kinematics::reflect(&plus);
            assert!(close(
                &tributary_same(ell, Side::Minus, tau, th),
                &mirrored,
                1e-12
            ));
        }
    }

    #[test]
    fn universal_line_normal_matches_adjoint_transport() {
        let ell = 0.5;
        for &t in &[0.3, 1.0, 2.9] {
            for side in Side::BOTH {
                let transported = flow_costate(
                    t,
                    &bup_aligned(ell, 0.0),
                    &bup_aligned_normal(0.0),
                    ControlPair::new(0.0, side.sign()),
                );
                let analytic = universal_line_normal(side, t);
                assert!((transported.nu_x - analytic.nu_x).abs() < 1e-12);
                assert!((transported.nu_y - analytic.nu_y).abs() < 1e-12);
                assert!((transported.nu_theta - analytic.nu_theta).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn normals_start_as_the_target_circle_normal() {
        // At zero retrograde time every emanated normal is the unit
        // normal of the target set at the emanation point.
        let ell = 0.7;
        for side in Side::BOTH {
            for &th in &[0.6, 2.0, 4.4] {
                let theta_f = heading_from_vartheta_primary(side, th);
                let expect = bup_normal(side, theta_f);
                let got = primary_normal(ell, side, 0.0, th);
                assert_eq!(got, expect);
            }
            let aligned = bup_aligned_normal(0.0);
            let got = primary_line_normal(ell, side, 2.0 * PI);
            assert!((got.nu_x - aligned.nu_x).abs() < 1e-15);
            assert!((got.nu_y - aligned.nu_y).abs() < 1e-15);
        }
    }

    #[test]
    fn heading_depends_only_on_vartheta() {
        for side in Side::BOTH {
            for &(tau, th) in &[(0.2, 1.0), (1.0, 1.0), (2.0, 1.0)] {
                let expect = wrap_angle(heading_from_vartheta_primary(side, th));
                assert_eq!(primary(1.0, side, tau, th).theta(), expect);
            }
        }
    }
}
