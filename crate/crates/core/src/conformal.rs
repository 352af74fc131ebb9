//! Conformal invariants of a space curve: the density `ν`, conformal arc
//! length `ω`, conformal curvature `Q` and torsion `T`, and the auxiliary
//! invariant `P`, together with sampling at equal conformal spacing.

use serde::{Deserialize, Serialize};

use crate::curve::{ArcLengthMap, CurveSpec};
use crate::error::{Error, Result};
use crate::frenet::{arc_jet, frenet_state, FrenetState};
use crate::numeric;

/// Default degeneracy floor on `ν`.
pub const NU_FLOOR: f64 = 1e-10;

/// Number of inverse-series coefficients `g_1 ..= g_7`.
pub const INVERSION_TERMS: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConformalState {
    pub s: f64,
    /// `√(κ'² + κ²τ²)`.
    pub nu: f64,
    /// `√ν`, the density of conformal arc length.
    pub f: f64,
    pub dnu: f64,
    pub ddnu: f64,
    /// Conformal curvature.
    pub q: f64,
    /// Conformal torsion.
    pub t: f64,
    /// `P` from curvature, torsion and their derivatives directly.
    pub p: f64,
    /// `(Q + ¾T²) / 24`.
    pub p_identity: f64,
    /// `|p - p_identity|`.
    pub p_residual: f64,
}

pub fn conformal_state(fr: &FrenetState) -> Result<ConformalState> {
    conformal_state_with_floor(fr, NU_FLOOR)
}

pub fn conformal_state_with_floor(fr: &FrenetState, floor: f64) -> Result<ConformalState> {
    let (k, t) = (fr.kappa, fr.tau);
    let (k1, k2, k3) = (fr.dkappa, fr.ddkappa, fr.dddkappa);
    let (t1, t2) = (fr.dtau, fr.ddtau);

    let w = k1 * k1 + k * k * t * t;
    let nu = w.sqrt();
    if !(nu > floor) {
        return Err(Error::ConformalDegeneracy { s: fr.s, nu });
    }
    // w = ν², differentiated along s.
    let dw = 2.0 * k1 * k2 + 2.0 * k * k1 * t * t + 2.0 * k * k * t * t1;
    let ddw = 2.0 * k2 * k2 + 2.0 * k1 * k3 + 2.0 * k1 * k1 * t * t + 2.0 * k * k2 * t * t
        + 8.0 * k * k1 * t * t1
        + 2.0 * k * k * t1 * t1
        + 2.0 * k * k * t * t2;
    let dnu = dw / (2.0 * nu);
    let ddnu = (0.5 * ddw - dnu * dnu) / nu;

    let q = (4.0 * (ddnu - k * k * nu) * nu - 5.0 * dnu * dnu) / (8.0 * nu.powi(3));
    let torsion = (2.0 * k1 * k1 * t + k * k * t.powi(3) + k * k1 * t1 - k * k2 * t) / nu.powf(2.5);

    let p_num = 2.0 * k * t * k1 * k1 * (20.0 * k1 * t1 - 19.0 * t * k2)
        + 2.0 * k.powi(3) * t.powi(3) * (5.0 * k1 * t1 - 4.0 * t * k2)
        + k1 * k1 * (28.0 * t * t * k1 * k1 - 5.0 * k2 * k2 + 4.0 * k1 * k3)
        + k * k
            * (19.0 * t.powi(4) * k1 * k1 - 4.0 * k1.powi(4) + 10.0 * k1 * k1 * t1 * t1
                + 2.0 * t * k1 * (2.0 * k1 * t2 - 15.0 * t1 * k2)
                + 2.0 * t * t * (5.0 * k2 * k2 + 2.0 * k1 * k3))
        + k.powi(4) * t * t * (6.0 * t.powi(4) - 8.0 * k1 * k1 - 5.0 * t1 * t1 + 4.0 * t * t2)
        - 4.0 * k.powi(6) * t.powi(4);
    let p = p_num / (192.0 * w.powf(2.5));
    let p_identity = (q + 0.75 * torsion * torsion) / 24.0;

    Ok(ConformalState {
        s: fr.s,
        nu,
        f: nu.sqrt(),
        dnu,
        ddnu,
        q,
        t: torsion,
        p,
        p_identity,
        p_residual: (p - p_identity).abs(),
    })
}

/// Conformal state at arc length `s`.
pub fn conformal_state_at(curve: &CurveSpec, map: &ArcLengthMap, s: f64) -> Result<ConformalState> {
    conformal_state(&frenet_state(curve, map, s)?)
}

/// `ν` at curve parameter `t`; only `κ`, `κ'` and `τ` are needed.
fn nu_at_param(curve: &CurveSpec, t: f64) -> Result<f64> {
    let jet = arc_jet(curve, t, f64::NAN, 3)?;
    let k = jet.kappa.coeff(0);
    let k1 = jet.kappa.coeff(1);
    let tau = jet.tau.coeff(0);
    Ok((k1 * k1 + k * k * tau * tau).sqrt())
}

/// `dω/dt = √ν |x'(t)|`, failing where `ν` drops to the floor.
fn omega_rate(curve: &CurveSpec, map: &ArcLengthMap, t: f64) -> Result<f64> {
    let locate = |err: Error| match err {
        Error::Inflection { kappa, .. } => Error::Inflection { s: map.s_of_t(t).unwrap_or(f64::NAN), kappa },
        other => other,
    };
    let nu = nu_at_param(curve, t).map_err(locate)?;
    if !(nu > NU_FLOOR) {
        return Err(Error::ConformalDegeneracy { s: map.s_of_t(t).unwrap_or(f64::NAN), nu });
    }
    Ok(nu.sqrt() * map.checked_speed(t)?)
}

fn omega_between_params(curve: &CurveSpec, map: &ArcLengthMap, t0: f64, t1: f64, tol: f64) -> Result<f64> {
    Ok(numeric::integrate(|t| omega_rate(curve, map, t), t0, t1, tol)?.value)
}

/// Conformal length `∫ √ν ds` from `s0` to `s1` (negative if `s1 < s0`).
pub fn conformal_length(curve: &CurveSpec, map: &ArcLengthMap, s0: f64, s1: f64, tol: f64) -> Result<f64> {
    if s0 == s1 {
        return Ok(0.0);
    }
    let t0 = map.t_of_s(s0)?;
    let t1 = map.t_of_s(s1)?;
    omega_between_params(curve, map, t0, t1, tol)
}

/// Arc length `s` at which the conformal length from `s0` equals `k ω`.
pub fn omega_equidistant(curve: &CurveSpec, map: &ArcLengthMap, s0: f64, omega: f64, k: i64) -> Result<f64> {
    let target = omega * k as f64;
    if target == 0.0 {
        return Ok(s0);
    }
    if !target.is_finite() {
        return Err(Error::Domain { what: "k·omega", value: target, lo: f64::NEG_INFINITY, hi: f64::INFINITY });
    }
    let tol = 1e-14 * target.abs().max(1e-3);
    let t0 = map.t_of_s(s0)?;
    let (lo, hi) = curve.domain();
    let end = if target > 0.0 { hi } else { lo };

    // Grow a bracket from t0 so that degeneracies beyond the target are
    // never visited.
    let rate = omega_rate(curve, map, t0)?;
    let mut step = 1.5 * target / rate;
    let (mut a, mut covered) = (t0, 0.0);
    let b = loop {
        let b = if target > 0.0 { (a + step).min(end) } else { (a + step).max(end) };
        let piece = omega_between_params(curve, map, a, b, tol)?;
        if (covered + piece).abs() >= target.abs() {
            break b;
        }
        if b == end {
            let reach = covered + piece;
            let (l, h) = if target > 0.0 { (0.0, reach) } else { (reach, 0.0) };
            return Err(Error::Domain { what: "conformal offset k·omega", value: target, lo: l, hi: h });
        }
        covered += piece;
        a = b;
        step *= 2.0;
    };
    let guess = a + (target - covered) / omega_rate(curve, map, a)?;
    let t = numeric::solve_increasing(
        |t| Ok((covered + omega_between_params(curve, map, a, t, tol)? - target, omega_rate(curve, map, t)?)),
        a.min(b),
        a.max(b),
        guess,
        1e-15,
    )?;
    map.s_of_t(t)
}

/// Taylor coefficients of arc length against conformal length at a point,
/// `ε(ω) = Σ g_j ω^j / j!` with `g_1 = 1/f` and `g_j = g'_{j-1} / f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesInversion {
    pub s0: f64,
    /// `√ν` at `s0`.
    pub f: f64,
    /// `g_1 ..= g_7`.
    pub g: [f64; INVERSION_TERMS],
    /// Derivatives `d^j ω / ds^j` at `s0`, `j = 1 ..= 7`; the first is `f`.
    pub omega_derivatives: [f64; INVERSION_TERMS],
}

impl SeriesInversion {
    /// Arc length offset covering conformal length `omega`.
    pub fn epsilon(&self, omega: f64) -> f64 {
        taylor(&self.g, omega)
    }

    /// Conformal length covered by the arc length offset `epsilon`.
    pub fn omega(&self, epsilon: f64) -> f64 {
        taylor(&self.omega_derivatives, epsilon)
    }
}

fn taylor(derivs: &[f64], x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for (j, d) in derivs.iter().enumerate() {
        term *= x / (j + 1) as f64;
        sum += d * term;
    }
    sum
}

pub fn series_inversion(curve: &CurveSpec, map: &ArcLengthMap, s0: f64) -> Result<SeriesInversion> {
    // κ' to order 6 needs the position to order 9.
    let t = map.t_of_s(s0)?;
    let jet = arc_jet(curve, t, s0, INVERSION_TERMS + 2)?;
    let dkappa = jet.kappa.derivative();
    let kt = &jet.kappa * &jet.tau;
    let nu_sq = &(&dkappa * &dkappa) + &(&kt * &kt);
    let nu = nu_sq.coeff(0).max(0.0).sqrt();
    if !(nu > NU_FLOOR) {
        return Err(Error::ConformalDegeneracy { s: s0, nu });
    }
    let f = nu_sq.powf(0.25).ok_or(Error::ConformalDegeneracy { s: s0, nu })?;
    let omega_of_s = f.integral();
    let s_of_omega = omega_of_s
        .revert()
        .ok_or_else(|| Error::Numerical("conformal length series is not invertible".into()))?;
    let mut g = [0.0; INVERSION_TERMS];
    let mut omega_derivatives = [0.0; INVERSION_TERMS];
    for j in 0..INVERSION_TERMS {
        g[j] = s_of_omega.derivative_at_zero(j + 1);
        omega_derivatives[j] = omega_of_s.derivative_at_zero(j + 1);
    }
    Ok(SeriesInversion { s0, f: f.coeff(0), g, omega_derivatives })
}
