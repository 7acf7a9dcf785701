//! Reduced-space kinematics of the game of two identical cars.
//!
//! The state lives in the pursuer-fixed frame: `(x, y)` is the evader's
//! planar offset in minimum-turn-radius units and `theta` the heading
//! difference, counted clockwise from the y-axis. Both players steer with
//! bounded turn rates `u, v in [-1, +1]` and unit speed, giving
//!
//! ```text
//! x' = -u*y + sin(theta)
//! y' = -1 + u*x + cos(theta)
//! theta' = v - u
//! ```
//!
//! Besides the right-hand side, this module provides the closed-form
//! retrograde flows of the state and of the adjoint (barrier normal) under
//! constant controls, the switch functions, and the candidate optimal
//! control laws they induce.

use std::f64::consts::TAU;

/// Absolute tolerance under which a switch function counts as vanished.
///
/// The degenerate branches of the candidate control laws are exact-zero
/// conditions that floating point never hits; every sign test in
/// [`candidate_controls`] treats `|s| <= SWITCH_EPS` as zero.
pub const SWITCH_EPS: f64 = 1e-9;

/// Maps an angle to the canonical representative in `[0, 2*pi)`.
///
/// Values within `1e-15` below `2*pi` fold to `0` so that headings which
/// are equal on the circle compare equal after roundoff.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU - 1e-15 {
        0.0
    } else {
        w
    }
}

/// `sin(x)/x` extended continuously through zero.
///
/// A four-term Taylor series takes over for `|x| < 1e-4` to avoid the
/// cancellation in the quotient.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0
    } else {
        x.sin() / x
    }
}

/// Reduced configuration `(x, y, theta)` of the game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    /// Cross-track offset of the evader, in turn-radius units.
    pub x: f64,
    /// Along-track offset of the evader, in turn-radius units.
    pub y: f64,
    /// Heading difference, stored canonically in `[0, 2*pi)`.
    pub(crate) theta: f64,
}

impl State {
    /// Builds a state, canonicalizing the heading into `[0, 2*pi)`.
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: wrap_angle(theta),
        }
    }

    /// Heading difference in `[0, 2*pi)`.
    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Barrier normal `(nu_x, nu_y, nu_theta)` carried along retrograde paths.
///
/// The normal is not required to have unit length, only to be nonzero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Costate {
    pub nu_x: f64,
    pub nu_y: f64,
    pub nu_theta: f64,
}

impl Costate {
    pub fn new(nu_x: f64, nu_y: f64, nu_theta: f64) -> Self {
        Self {
            nu_x,
            nu_y,
            nu_theta,
        }
    }

    /// True when all three components vanish.
    pub fn is_zero(&self) -> bool {
        self.nu_x == 0.0 && self.nu_y == 0.0 && self.nu_theta == 0.0
    }
}

/// A pair of turn rates `(u, v)`, pursuer first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlPair {
    pub u: f64,
    pub v: f64,
}

impl ControlPair {
    pub const fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    /// True when both components lie in `[-1, +1]`.
    pub fn in_bounds(&self) -> bool {
        self.u.abs() <= 1.0 && self.v.abs() <= 1.0
    }
}

/// The admissible-value sets a candidate control law can produce.
///
/// The bang branches give singletons; the degenerate branches give the
/// multi-valued sets without selecting a representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlSet {
    /// `{-1}`
    MinusOne,
    /// `{0}`
    Zero,
    /// `{+1}`
    PlusOne,
    /// `{-1, +1}`
    Either,
    /// `{-1, 0, +1}`
    Any,
}

impl ControlSet {
    /// The set for a nonvanishing sign driver.
    pub fn from_sign(s: f64) -> Self {
        if s > 0.0 {
            ControlSet::PlusOne
        } else if s < 0.0 {
            ControlSet::MinusOne
        } else {
            ControlSet::Zero
        }
    }

    /// The admissible values, ascending.
    pub fn values(&self) -> &'static [f64] {
        match self {
            ControlSet::MinusOne => &[-1.0],
            ControlSet::Zero => &[0.0],
            ControlSet::PlusOne => &[1.0],
            ControlSet::Either => &[-1.0, 1.0],
            ControlSet::Any => &[-1.0, 0.0, 1.0],
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.values().contains(&v)
    }

    /// The single admissible value, if the set is a singleton.
    pub fn determinate(&self) -> Option<f64> {
        match self.values() {
            [v] => Some(*v),
            _ => None,
        }
    }
}

impl std::fmt::Display for ControlSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ControlSet::MinusOne => "{-1}",
            ControlSet::Zero => "{0}",
            ControlSet::PlusOne => "{+1}",
            ControlSet::Either => "{-1,+1}",
            ControlSet::Any => "{-1,0,+1}",
        };
        f.write_str(s)
    }
}

/// Right-hand side of the equations of motion.
pub fn dynamics_rhs(z: &State, c: ControlPair) -> [f64; 3] {
    [
        -c.u * z.y + z.theta.sin(),
        -1.0 + c.u * z.x + z.theta.cos(),
        c.v - c.u,
    ]
}

/// Closed-form state `tau` units of retrograde time before the terminal
/// state `z_tilde`, under constant controls.
///
/// Smooth in `u` and `v` across zero; the returned heading is canonical.
pub fn flow_state(tau: f64, z_tilde: &State, c: ControlPair) -> State {
    let (u, v) = (c.u, c.v);
    let th = z_tilde.theta;
    let cu = (u * tau).cos();
    let su = (u * tau).sin();
    // (1 - cos(u*tau))/u and sin(u*tau)/u in forms that survive u -> 0.
    let sweep = 0.5 * u * tau * tau * sinc(0.5 * u * tau).powi(2);
    let advance = tau * sinc(u * tau);
    let evader = tau * sinc(0.5 * v * tau);
    let phi = th + (u - 0.5 * v) * tau;
    State::new(
        z_tilde.x * cu + z_tilde.y * su + sweep - evader * phi.sin(),
        z_tilde.y * cu - z_tilde.x * su + advance - evader * phi.cos(),
        th + (u - v) * tau,
    )
}

/// Closed-form normal `tau` units of retrograde time before the terminal
/// pair `(z_tilde, nu_tilde)`, under constant controls.
pub fn flow_costate(tau: f64, z_tilde: &State, nu_tilde: &Costate, c: ControlPair) -> Costate {
    let (u, v) = (c.u, c.v);
    let cu = (u * tau).cos();
    let su = (u * tau).sin();
    let s = tau * sinc(0.5 * v * tau);
    let psi = z_tilde.theta - 0.5 * v * tau;
    Costate::new(
        nu_tilde.nu_x * cu + nu_tilde.nu_y * su,
        nu_tilde.nu_y * cu - nu_tilde.nu_x * su,
        nu_tilde.nu_theta + s * (nu_tilde.nu_x * psi.cos() - nu_tilde.nu_y * psi.sin()),
    )
}

/// Pursuer's and evader's switch functions `(s_P, s_E)`.
///
/// `s_P` multiplies `-u` and `s_E` multiplies `v` in the inner product of
/// the normal with the dynamics.
pub fn switch_values(z: &State, nu: &Costate) -> (f64, f64) {
    (z.y * nu.nu_x - z.x * nu.nu_y + nu.nu_theta, nu.nu_theta)
}

/// Candidate optimal control laws as functions of state and normal.
///
/// Implements all four branches per player. Where a branch condition is an
/// exact zero, the comparison is taken with absolute tolerance
/// [`SWITCH_EPS`]; the final fallthrough returns the full multi-valued set
/// rather than selecting a representative.
pub fn candidate_controls(z: &State, nu: &Costate) -> (ControlSet, ControlSet) {
    let (s_p, s_e) = switch_values(z, nu);

    let u_set = if s_p.abs() > SWITCH_EPS {
        ControlSet::from_sign(s_p)
    } else if nu.nu_x.abs() > SWITCH_EPS {
        ControlSet::from_sign(nu.nu_x)
    } else if nu.nu_y < -SWITCH_EPS {
        ControlSet::Zero
    } else {
        ControlSet::Any
    };

    let (sin_th, cos_th) = z.theta.sin_cos();
    // Derivative driver of s_E, with the sign realizing left-continuity.
    let drive = nu.nu_x * cos_th - nu.nu_y * sin_th;
    let v_set = if s_e.abs() > SWITCH_EPS {
        ControlSet::from_sign(s_e)
    } else if drive.abs() > SWITCH_EPS {
        ControlSet::from_sign(drive)
    } else if nu.nu_x * sin_th + nu.nu_y * cos_th < -SWITCH_EPS {
        ControlSet::Zero
    } else {
        ControlSet::Any
    };

    (u_set, v_set)
}

/// Planar distance between the players.
pub fn radial_distance(z: &State) -> f64 {
    z.x.hypot(z.y)
}

/// The mirror symmetry `(x, y, theta) -> (-x, y, 2*pi - theta)`.
///
/// Together with negating both controls it leaves the dynamics and the
/// capture circle invariant; it is an involution.
pub fn reflect(z: &State) -> State {
    State::new(-z.x, z.y, TAU - z.theta)
}
