//! Scalar root finding and the transcendental equations behind the
//! barrier's critical constants.
//!
//! The junction heading `theta_J` and radius `ell_J`, the regime roots
//! `w`, `m`, `n`, and the slice-dependent roots `p(theta)`, `q(theta)` are
//! all simple roots of smooth scalar equations on known intervals. They
//! are solved by Newton iteration inside a bisection safeguard so that
//! unattended parameter sweeps cannot diverge.

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Default residual tolerance for every transcendental solve.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Radius of the band around `ell_J` treated as the degenerate regime.
pub const ELL_J_GUARD: f64 = 1e-9;

const MAX_ITER: usize = 200;
const FD_STEP: f64 = 1e-7;
const TAU: f64 = std::f64::consts::TAU;

/// Residual tolerance in effect, `BARRIER_TOL` overriding the default.
///
/// Read once per process; an unparsable or non-positive value falls back
/// to [`DEFAULT_TOL`].
pub fn solver_tol() -> f64 {
    static TOL: OnceLock<f64> = OnceLock::new();
    *TOL.get_or_init(|| {
        std::env::var("BARRIER_TOL")
            .ok()
            .and_then(|s| s.parse::<f64>().ok())
            .filter(|t| *t > 0.0 && t.is_finite())
            .unwrap_or(DEFAULT_TOL)
    })
}

/// The helper pair `xi_ell(alpha)`, `eta_ell(alpha)` used throughout the
/// intersection systems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiEta {
    pub xi: f64,
    pub eta: f64,
}

/// `xi = (ell+alpha) sin(alpha/2) + 2 cos(alpha/2)`,
/// `eta = (ell+alpha) cos(alpha/2) - 2 sin(alpha/2)`.
///
/// They satisfy `xi^2 + eta^2 = (ell+alpha)^2 + 4` identically.
pub fn xi_eta(ell: f64, alpha: f64) -> XiEta {
    let (s, c) = (0.5 * alpha).sin_cos();
    XiEta {
        xi: (ell + alpha) * s + 2.0 * c,
        eta: (ell + alpha) * c - 2.0 * s,
    }
}

pub fn xi(ell: f64, alpha: f64) -> f64 {
    xi_eta(ell, alpha).xi
}

pub fn eta(ell: f64, alpha: f64) -> f64 {
    xi_eta(ell, alpha).eta
}

/// An interval known to straddle a root, with the endpoint signs.
#[derive(Debug, Clone, Copy)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo_sign: i8,
    pub f_hi_sign: i8,
}

impl Bracket {
    /// Evaluates `f` at the endpoints and checks for a sign change.
    pub fn new(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<Self> {
        let (f_lo, f_hi) = (f(lo), f(hi));
        if !(lo < hi) || f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
            return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
        }
        Ok(Self {
            lo,
            hi,
            f_lo_sign: f_lo.signum() as i8,
            f_hi_sign: f_hi.signum() as i8,
        })
    }
}

/// A converged root together with its residual and iteration count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootResult {
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Newton iteration from `guess`, safeguarded by bisection on `interval`.
///
/// The step falls back to the bracket midpoint whenever the Newton iterate
/// leaves the current bracket or fails to shrink `|f|`. Without an
/// analytic derivative a forward difference with step `1e-7` is used.
/// Terminates when `|f(x)| <= tol`.
pub fn solve_bracketed<F>(
    f: F,
    df: Option<&dyn Fn(f64) -> f64>,
    interval: (f64, f64),
    guess: f64,
    tol: f64,
) -> Result<RootResult>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = interval;
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(RootResult {
            value: a,
            residual: 0.0,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(RootResult {
            value: b,
            residual: 0.0,
            iterations: 0,
        });
    }
    if !(a < b) || fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoSignChange {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let mut x = if guess.is_finite() && guess > a && guess < b {
        guess
    } else {
        0.5 * (a + b)
    };
    let mut prev_abs = f64::INFINITY;
    let mut fx = 0.0;
    for it in 1..=MAX_ITER {
        fx = f(x);
        if fx.abs() <= tol {
            return Ok(RootResult {
                value: x,
                residual: fx,
                iterations: it,
            });
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        let slope = match df {
            Some(d) => d(x),
            None => (f(x + FD_STEP) - fx) / FD_STEP,
        };
        let newton = x - fx / slope;
        // Demand at least geometric progress from Newton; a creeping
        // iterate (e.g. under an inaccurate derivative) falls back to
        // bisection, which always halves the bracket.
        let newton_ok = slope != 0.0
            && newton.is_finite()
            && newton > a
            && newton < b
            && fx.abs() < 0.5 * prev_abs;
        x = if newton_ok { newton } else { 0.5 * (a + b) };
        prev_abs = fx.abs();
    }
    Err(Error::MaxIterations {
        last: x,
        residual: fx.abs(),
        iterations: MAX_ITER,
    })
}

/// Scans `n` grid points for the first sign change of `f` on `(lo, hi)`.
///
/// Grid points where `f` is NaN (outside the equation's real domain) are
/// skipped; the returned subinterval has real values of opposite sign at
/// both ends.
fn first_sign_change(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Result<(f64, f64)> {
    let mut prev: Option<(f64, f64)> = None;
    let mut first_seen = (f64::NAN, f64::NAN);
    let mut last_seen = (f64::NAN, f64::NAN);
    for i in 0..n {
        let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let fx = f(x);
        if fx.is_nan() {
            prev = None;
            continue;
        }
        if first_seen.0.is_nan() {
            first_seen = (x, fx);
        }
        last_seen = (x, fx);
        if let Some((px, pfx)) = prev {
            if pfx == 0.0 || pfx.signum() != fx.signum() {
                return Ok((px, x));
            }
        }
        prev = Some((x, fx));
    }
    Err(Error::NoSignChange {
        lo: first_seen.0,
        hi: last_seen.0,
        f_lo: first_seen.1,
        f_hi: last_seen.1,
    })
}

/// Left side of the junction-heading equation,
/// `theta - 4 (1 + cos(theta/2)) cot(theta/2)`.
pub fn junction_equation(theta: f64) -> f64 {
    let (s, c) = (0.5 * theta).sin_cos();
    theta - 4.0 * (1.0 + c) * c / s
}

/// The junction constants `(theta_J, ell_J)`.
///
/// `theta_J` is the unique root of [`junction_equation`] on `(0, 2*pi)`;
/// `ell_J` follows from the closed form. The equation's left side is
/// strictly increasing on the interval, so the solve cannot fail.
pub fn junction_constants() -> (f64, f64) {
    let df = |t: f64| {
        let (s, c) = (0.5 * t).sin_cos();
        1.0 + 2.0 * (c + (1.0 + c) / (s * s))
    };
    let root = solve_bracketed(
        junction_equation,
        Some(&df),
        (1e-9, TAU - 1e-9),
        2.0,
        solver_tol(),
    )
    .expect("junction equation is monotone with opposite endpoint signs");
    let theta_j = root.value;
    let (s, c) = (0.5 * theta_j).sin_cos();
    let ell_j = -2.0 * (c + theta_j.cos()) / s;
    (theta_j, ell_j)
}

/// Root of `eta_ell(w) + ell = 0` on `(0, 2*pi)`, for `ell` in `(0, ell_J)`.
///
/// Locates where the straight-pursuer universal line of one side crosses
/// the primary surface of the other in the small-radius regime.
pub fn solve_w(ell: f64) -> Result<RootResult> {
    let (theta_j, ell_j) = junction_constants();
    if !(ell > 0.0 && ell < ell_j) {
        return Err(Error::OutOfDomain {
            name: "ell",
            value: ell,
            bound: "(0, ell_J)",
        });
    }
    let f = |w: f64| eta(ell, w) + ell;
    let df = |w: f64| -0.5 * (ell + w) * (0.5 * w).sin();
    solve_bracketed(f, Some(&df), (1e-12, TAU - 1e-12), theta_j, solver_tol())
}

fn m_equation(ell: f64, m: f64) -> f64 {
    let (s, c) = (0.5 * m).sin_cos();
    (ell + m).powi(2) - (2.0 * s - ell).powi(2) - (2.0 + 2.0 * c).powi(2)
}

/// Root of the first large-radius junction equation on `(0, 2*pi)`, for
/// `ell > ell_J`.
pub fn solve_m(ell: f64) -> Result<RootResult> {
    let (_, ell_j) = junction_constants();
    if !(ell > ell_j) {
        return Err(Error::OutOfDomain {
            name: "ell",
            value: ell,
            bound: "(ell_J, +inf)",
        });
    }
    let f = |m: f64| m_equation(ell, m);
    let df = |m: f64| {
        let (s, c) = (0.5 * m).sin_cos();
        2.0 * (ell + m) - (2.0 * s - ell) * c + (2.0 + 2.0 * c) * s
    };
    solve_bracketed(
        f,
        Some(&df),
        (1e-12, TAU - 1e-12),
        std::f64::consts::PI,
        solver_tol(),
    )
}

/// Root of the second large-radius junction equation on `(0, 2*pi)`, for
/// `ell > ell_J`.
///
/// The defining equation involves a square root whose radicand factors as
/// `(ell + n - 4 sin n)(ell + n)`; the scan skips the midrange band where
/// it is negative.
pub fn solve_n(ell: f64) -> Result<RootResult> {
    let (_, ell_j) = junction_constants();
    if !(ell > ell_j) {
        return Err(Error::OutOfDomain {
            name: "ell",
            value: ell,
            bound: "(ell_J, +inf)",
        });
    }
    let f = |n: f64| {
        let radicand = (ell + n - 4.0 * n.sin()) * (ell + n);
        if radicand < -1e-12 {
            return f64::NAN;
        }
        eta(ell, radicand.max(0.0).sqrt() - ell) + eta(ell, n)
    };
    let (a, b) = first_sign_change(&f, 1e-9, TAU - 1e-9, 1024)?;
    solve_bracketed(f, None, (a, b), 0.5 * (a + b), solver_tol())
}

fn p_equation(ell: f64, vartheta: f64, p: f64) -> f64 {
    let XiEta { xi, eta: e } = xi_eta(ell, p);
    let radicand = (xi - 4.0 * (0.5 * vartheta).cos()).powi(2) + e * e - 4.0;
    if radicand < -1e-12 {
        return f64::NAN;
    }
    e + eta(ell, radicand.max(0.0).sqrt() - ell)
}

pub(crate) fn solve_p_in(ell: f64, vartheta: f64) -> Result<RootResult> {
    let f = |p: f64| p_equation(ell, vartheta, p);
    let hi = vartheta - 1e-12;
    // Coarse scan first; the sign slice next to the radicand-validity
    // edge can be narrow at large radii, so rescan finely before giving
    // up.
    let bracket =
        first_sign_change(&f, 1e-9, hi, 256).or_else(|_| first_sign_change(&f, 1e-9, hi, 16_384));
    match bracket {
        Ok((a, b)) => solve_bracketed(f, None, (a, b), 0.5 * (a + b), solver_tol()),
        Err(e) => {
            // At junction angles the root sits against the upper end of
            // the interval; accept the endpoint when it already meets the
            // tolerance.
            let f_hi = f(hi);
            if f_hi.abs() <= solver_tol() {
                Ok(RootResult {
                    value: hi,
                    residual: f_hi,
                    iterations: 0,
                })
            } else {
                Err(e)
            }
        }
    }
}

/// Root of the opposite-turn tributary self-intersection equation on
/// `(0, vartheta)`, for `vartheta` in `(theta2, 2*pi - theta2)`.
pub fn solve_p(ell: f64, vartheta: f64) -> Result<RootResult> {
    let theta2 = critical_angles(ell)?.1;
    if !(vartheta > theta2 && vartheta < TAU - theta2) {
        return Err(Error::OutOfDomain {
            name: "vartheta",
            value: vartheta,
            bound: "(theta2, 2*pi - theta2)",
        });
    }
    solve_p_in(ell, vartheta)
}

fn q_equation(ell: f64, vartheta: f64, q: f64) -> f64 {
    let (s, c) = (0.5 * (q - vartheta)).sin_cos();
    (ell + vartheta).powi(2) - (2.0 + 2.0 * c).powi(2) - (ell + q + 2.0 * s).powi(2)
}

pub(crate) fn solve_q_in(ell: f64, vartheta: f64) -> Result<RootResult> {
    let f = |q: f64| q_equation(ell, vartheta, q);
    let df = |q: f64| {
        let (s, c) = (0.5 * (q - vartheta)).sin_cos();
        2.0 * s * (2.0 + 2.0 * c) - 2.0 * (ell + q + 2.0 * s) * (1.0 + c)
    };
    // q < vartheta always holds for the root, and f(vartheta) = -16.
    solve_bracketed(
        f,
        Some(&df),
        (1e-12, vartheta),
        0.5 * vartheta,
        solver_tol(),
    )
}

/// Root of the same-turn/opposite-turn tributary crossing equation on
/// `(0, 2*pi - vartheta)`, for `ell > ell_J` and `vartheta` in
/// `(theta1, theta2]`.
///
/// The root additionally satisfies `q < vartheta`.
pub fn solve_q(ell: f64, vartheta: f64) -> Result<RootResult> {
    let (_, ell_j) = junction_constants();
    if !(ell > ell_j + ELL_J_GUARD) {
        return Err(Error::OutOfDomain {
            name: "ell",
            value: ell,
            bound: "(ell_J, +inf)",
        });
    }
    let (theta1, theta2) = critical_angles(ell)?;
    if !(vartheta > theta1 && vartheta <= theta2 + 1e-12) {
        return Err(Error::OutOfDomain {
            name: "vartheta",
            value: vartheta,
            bound: "(theta1, theta2]",
        });
    }
    solve_q_in(ell, vartheta)
}

/// Closed form for the small-radius second critical angle, from `w_ell`.
pub(crate) fn theta2_small(ell: f64, w: f64) -> f64 {
    2.0 * ((((ell + w).powi(2) - ell * ell + 4.0).sqrt() - 2.0) / 4.0).acos()
}

/// Regime-correct critical slice angles `(theta1, theta2)`.
///
/// Within [`ELL_J_GUARD`] of `ell_J` both collapse to `theta_J`.
pub(crate) fn critical_angles(ell: f64) -> Result<(f64, f64)> {
    if !(ell > 0.0) {
        return Err(Error::OutOfDomain {
            name: "ell",
            value: ell,
            bound: "(0, +inf)",
        });
    }
    let (theta_j, ell_j) = junction_constants();
    if (ell - ell_j).abs() < ELL_J_GUARD {
        Ok((theta_j, theta_j))
    } else if ell < ell_j {
        let w = solve_w(ell)?.value;
        Ok((w, theta2_small(ell, w)))
    } else {
        Ok((solve_m(ell)?.value, solve_n(ell)?.value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Plain midpoint bisection, independent of the production solver.
    pub(crate) fn bisect_oracle(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let mut f_lo = f(lo);
        assert!(f_lo * f(hi) < 0.0, "oracle bracket must straddle the root");
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let fm = f(mid);
            if fm == 0.0 {
                return mid;
            }
            if fm.signum() == f_lo.signum() {
                lo = mid;
                f_lo = fm;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn xi_eta_closed_forms() {
        let v = xi_eta(1.0, 0.0);
        assert_eq!((v.xi, v.eta), (2.0, 1.0));
        let v = xi_eta(1.0, PI);
        assert!((v.xi - (1.0 + PI)).abs() < 1e-15);
        assert!((v.eta + 2.0).abs() < 1e-15);
    }

    #[test]
    fn xi_eta_norm_identity() {
        for &(ell, a) in &[(0.3, 0.7), (1.0, 4.1), (2.5, -1.2), (0.671, 2.343)] {
            let v = xi_eta(ell, a);
            let lhs = v.xi * v.xi + v.eta * v.eta;
            let rhs = (ell + a).powi(2) + 4.0;
            assert!((lhs - rhs).abs() < 1e-12 * rhs.max(1.0));
        }
    }

    #[test]
    fn solve_bracketed_finds_sqrt2() {
        let r =
            solve_bracketed(|x| x * x - 2.0, Some(&|x| 2.0 * x), (1.0, 2.0), 1.5, 1e-12).unwrap();
        assert!((r.value - 2.0_f64.sqrt()).abs() < 1e-12);
        assert!(r.residual.abs() <= 1e-12);
        // Same root with the finite-difference fallback.
        let r = solve_bracketed(|x| x * x - 2.0, None, (1.0, 2.0), 1.5, 1e-12).unwrap();
        assert!((r.value - 2.0_f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn solve_bracketed_rejects_bad_bracket() {
        let err = solve_bracketed(|x| x * x - 0.5, None, (1.0, 2.0), 1.5, 1e-12).unwrap_err();
        assert!(matches!(err, Error::NoSignChange { .. }));
        assert!(Bracket::new(|x| x * x - 0.5, 1.0, 2.0).is_err());
        let b = Bracket::new(|x| x * x - 2.0, 1.0, 2.0).unwrap();
        assert_eq!((b.f_lo_sign, b.f_hi_sign), (-1, 1));
    }

    #[test]
    fn junction_equation_root_near_reported_value() {
        let r = solve_bracketed(junction_equation, None, (1e-6, TAU - 1e-6), 2.0, 1e-12).unwrap();
        assert!((r.value - 2.343).abs() < 1e-3);
    }

    #[test]
    fn junction_constants_match_reported_values() {
        let (theta_j, ell_j) = junction_constants();
        assert!((theta_j - 2.343).abs() < 1e-3);
        assert!((ell_j - 0.671).abs() < 1e-3);
        assert!(junction_equation(theta_j).abs() < 1e-12);
        // Frozen from an independent bisection of the junction equation.
        assert!((theta_j - 2.3432067664519796).abs() < 1e-11);
        assert!((ell_j - 0.671_146_569_942_724_8).abs() < 1e-11);
    }

    #[test]
    fn junction_equation_is_monotone() {
        let mut prev = f64::NEG_INFINITY;
        for i in 1..2000 {
            let t = TAU * i as f64 / 2000.0;
            let v = junction_equation(t);
            assert!(v > prev, "not increasing at theta = {t}");
            prev = v;
        }
    }

    #[test]
    fn w_root_matches_oracle() {
        // Oracle first: eta_l(w) + l changes sign once on (0, pi).
        let oracle = bisect_oracle(|w| eta(0.5, w) + 0.5, 1e-9, PI);
        assert!((oracle - 2.1512952091358937).abs() < 1e-12);
        let r = solve_w(0.5).unwrap();
        assert!((r.value - oracle).abs() < 1e-10);
        assert!((eta(0.5, r.value) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn w_approaches_theta_j_from_below() {
        let (theta_j, ell_j) = junction_constants();
        let r = solve_w(ell_j - 1e-6).unwrap();
        assert!((r.value - theta_j).abs() < 1e-3);
        let r = solve_w(ell_j - 1e-8).unwrap();
        assert!((r.value - theta_j).abs() < 1e-5);
    }

    #[test]
    fn w_domain_is_small_radius_only() {
        assert!(matches!(solve_w(0.9), Err(Error::OutOfDomain { .. })));
        assert!(matches!(solve_w(-0.1), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn m_root_matches_oracle() {
        let oracle = bisect_oracle(|m| m_equation(1.0, m), 2.0, 2.5);
        assert!((oracle - 2.090_696_832_634_641).abs() < 1e-12);
        let r = solve_m(1.0).unwrap();
        assert!((r.value - oracle).abs() < 1e-10);
        assert!(m_equation(1.0, r.value).abs() < 1e-12);
        assert!(matches!(solve_m(0.5), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn m_approaches_theta_j_from_above() {
        let (theta_j, ell_j) = junction_constants();
        let r = solve_m(ell_j + 1e-8).unwrap();
        assert!((r.value - theta_j).abs() < 1e-5);
    }

    #[test]
    fn n_root_matches_oracle() {
        let f = |n: f64| {
            let rad = (1.0 + n - 2.0 * n.sin()).powi(2) - 4.0 * n.sin().powi(2);
            eta(1.0, rad.sqrt() - 1.0) + eta(1.0, n)
        };
        let oracle = bisect_oracle(f, 2.3, 2.6);
        assert!((oracle - 2.504_868_780_328_395).abs() < 1e-12);
        let r = solve_n(1.0).unwrap();
        assert!((r.value - oracle).abs() < 1e-10);
        assert!(f(r.value).abs() < 1e-10);
        assert!(matches!(solve_n(0.3), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn n_approaches_theta_j_from_above() {
        let (theta_j, ell_j) = junction_constants();
        let r = solve_n(ell_j + 1e-8).unwrap();
        assert!((r.value - theta_j).abs() < 1e-5);
    }

    #[test]
    fn p_root_matches_oracle() {
        let oracle = bisect_oracle(|p| p_equation(0.5, PI, p), 1e-9, PI - 1e-9);
        assert!((oracle - 1.637006941577934).abs() < 1e-12);
        let r = solve_p(0.5, PI).unwrap();
        assert!((r.value - oracle).abs() < 1e-10);
        assert!(p_equation(0.5, PI, r.value).abs() < 1e-10);
    }

    #[test]
    fn p_is_continuous_with_w_at_theta2() {
        let w = solve_w(0.5).unwrap().value;
        let theta2 = theta2_small(0.5, w);
        let p = solve_p(0.5, theta2 + 1e-6).unwrap().value;
        assert!((p - w).abs() < 1e-4, "p = {p}, w = {w}");
        let p = solve_p(0.5, theta2 + 1e-8).unwrap().value;
        assert!((p - w).abs() < 1e-6);
    }

    #[test]
    fn p_rejects_vartheta_outside_window() {
        let w = solve_w(0.5).unwrap().value;
        let theta2 = theta2_small(0.5, w);
        assert!(matches!(
            solve_p(0.5, theta2 - 1e-3),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(matches!(
            solve_p(0.5, TAU - theta2 + 1e-3),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn q_root_matches_oracle_and_stays_below_vartheta() {
        let oracle = bisect_oracle(|q| q_equation(1.0, 2.3, q), 1e-12, 2.3);
        assert!((oracle - 0.573_020_600_282_538_7).abs() < 1e-12);
        let r = solve_q(1.0, 2.3).unwrap();
        assert!((r.value - oracle).abs() < 1e-10);
        assert!(r.value < 2.3);
        assert!(q_equation(1.0, 2.3, r.value).abs() < 1e-10);
    }

    #[test]
    fn q_rejects_wrong_regime_and_window() {
        assert!(matches!(solve_q(0.5, 2.3), Err(Error::OutOfDomain { .. })));
        assert!(matches!(solve_q(1.0, 1.0), Err(Error::OutOfDomain { .. })));
        assert!(matches!(solve_q(1.0, 3.0), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn ts_cap_branches_agree_across_theta1() {
        // Both branch formulas of the same-turn tributary cap, evaluated just
        // on either side of theta1 in the large regime.
        let ell = 1.0;
        let m = solve_m(ell).unwrap().value;
        let branch1 = |t: f64| 0.5 * t + ((2.0 * (0.5 * t).sin() - ell) / (ell + t)).acos();
        let branch2 = |t: f64| {
            let q = solve_q_in(ell, t).unwrap().value;
            PI - (((ell + t).powi(2) - (ell + q).powi(2)) / (4.0 * (ell + t))).asin()
        };
        let a = branch1(m - 1e-8);
        let b = branch2(m + 1e-8);
        assert!((a - b).abs() < 1e-6, "branches differ: {a} vs {b}");
    }

    #[test]
    fn uniqueness_spot_check_on_grids() {
        // Each defining function changes sign exactly once over its interval.
        let (_, ell_j) = junction_constants();
        let count_changes = |f: &dyn Fn(f64) -> f64, lo: f64, hi: f64| {
            let n = 10_000;
            let mut changes = 0;
            let mut prev: Option<f64> = None;
            for i in 0..=n {
                let x = lo + (hi - lo) * i as f64 / n as f64;
                let fx = f(x);
                if fx.is_nan() {
                    prev = None;
                    continue;
                }
                if let Some(p) = prev {
                    if p.signum() != fx.signum() {
                        changes += 1;
                    }
                }
                prev = Some(fx);
            }
            changes
        };
        for &ell in &[0.1, 0.3, 0.5, ell_j - 1e-6] {
            assert_eq!(
                count_changes(&|w| eta(ell, w) + ell, 1e-9, TAU - 1e-9),
                1,
                "w at {ell}"
            );
        }
        for &ell in &[ell_j + 1e-6, 1.0, 2.0, 5.0] {
            assert_eq!(
                count_changes(&|m| m_equation(ell, m), 1e-9, TAU - 1e-9),
                1,
                "m at {ell}"
            );
            let f = |n: f64| {
                let rad = (ell + n - 4.0 * n.sin()) * (ell + n);
                if rad < 0.0 {
                    f64::NAN
                } else {
                    eta(ell, rad.sqrt() - ell) + eta(ell, n)
                }
            };
            assert_eq!(count_changes(&f, 1e-9, TAU - 1e-9), 1, "n at {ell}");
        }
        assert_eq!(
            count_changes(&|p| p_equation(0.5, PI, p), 1e-9, PI - 1e-9),
            1,
            "p at 0.5, pi"
        );
        assert_eq!(
            count_changes(&|q| q_equation(1.0, 2.3, q), 1e-12, 2.3),
            1,
            "q at 1.0, 2.3"
        );
    }

    #[test]
    fn residuals_meet_tolerance_across_radii() {
        let (_, ell_j) = junction_constants();
        for &ell in &[0.1, 0.3, 0.5, ell_j - 1e-6] {
            assert!(solve_w(ell).unwrap().residual.abs() <= 1e-12);
        }
        for &ell in &[ell_j + 1e-6, 1.0, 2.0, 5.0] {
            assert!(solve_m(ell).unwrap().residual.abs() <= 1e-12);
            assert!(solve_n(ell).unwrap().residual.abs() <= 1e-12);
        }
    }
}
