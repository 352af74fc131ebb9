//! Cross ratios of four points in space and the crossing angles of their
//! four circumcircles.
//!
//! Circle `cc^(i)` passes through the three points other than `x_i`, taken
//! in increasing index order. Circles `cc^(i)` and `cc^(j)` share the two
//! remaining points and cross there at equal angles. The six crossings come
//! in three complementary pairs whose cosines `p`, `q`, `r` are fixed by the
//! two cross ratios `u`, `v`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::Point3;
use crate::error::{Error, Result};
use crate::inversive::{CircleTriple, COINCIDENT_FLOOR};
use crate::numeric::format_real;

/// Slack on the region bounds and on `[-1, 1]` before values are clamped.
pub const REGION_TOLERANCE: f64 = 1e-12;

fn check_quadruple(x: &[Point3; 4]) -> Result<()> {
    for (i, p) in x.iter().enumerate() {
        if !p.coords.iter().all(|c| c.is_finite()) {
            return Err(Error::DegenerateInput(format!("point {} is not finite", i + 1)));
        }
    }
    for i in 0..4 {
        for j in i + 1..4 {
            let d = (x[i] - x[j]).norm();
            let scale = x[i].coords.norm().max(x[j].coords.norm());
            if d == 0.0 || d <= COINCIDENT_FLOOR * scale {
                return Err(Error::DegenerateInput(format!("points {} and {} coincide", i + 1, j + 1)));
            }
        }
    }
    Ok(())
}

/// `C(i,j,k,l) = (x_ik / x_il)(x_jl / x_jk)` with 1-based indices.
pub fn cross_ratio(x: &[Point3; 4], i: usize, j: usize, k: usize, l: usize) -> Result<f64> {
    let idx = [i, j, k, l];
    if idx.iter().any(|&n| !(1..=4).contains(&n)) || (0..4).any(|a| (a + 1..4).any(|b| idx[a] == idx[b])) {
        return Err(Error::DegenerateInput(format!("cross ratio indices must be a permutation of 1..=4, got {idx:?}")));
    }
    check_quadruple(x)?;
    let d = |a: usize, b: usize| (x[a - 1] - x[b - 1]).norm();
    Ok(d(i, k) / d(i, l) * (d(j, l) / d(j, k)))
}

/// `(u, v) = (C(1,4,2,3), C(1,2,4,3))`.
pub fn cross_ratios_uv(x: &[Point3; 4]) -> Result<(f64, f64)> {
    Ok((cross_ratio(x, 1, 4, 2, 3)?, cross_ratio(x, 1, 2, 4, 3)?))
}

/// `(u, v)` as side ratios `(y12/y13, y23/y13)` of the triangle obtained by
/// inverting `x1, x2, x3` in the unit sphere around `x4`. The region bounds
/// are the triangle inequalities of this triangle.
pub fn uv_by_inversion(x: &[Point3; 4]) -> Result<(f64, f64)> {
    check_quadruple(x)?;
    let y: Vec<Point3> = x[..3]
        .iter()
        .map(|p| {
            let d = p - x[3];
            x[3] + d / d.norm_squared()
        })
        .collect();
    let y13 = (y[0] - y[2]).norm();
    Ok(((y[0] - y[1]).norm() / y13, (y[1] - y[2]).norm() / y13))
}

/// Which region bound a pair `(u, v)` violates, if any.
pub fn region_violation(u: f64, v: f64, tol: f64) -> Option<&'static str> {
    if u + v < 1.0 - tol {
        Some("u + v >= 1")
    } else if (u - v).abs() > 1.0 + tol {
        Some("|u - v| <= 1")
    } else {
        None
    }
}

pub fn pqr_from_uv(u: f64, v: f64) -> Result<(f64, f64, f64)> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::Domain { what: "u", value: u, lo: 0.0, hi: f64::INFINITY });
    }
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Domain { what: "v", value: v, lo: 0.0, hi: f64::INFINITY });
    }
    if let Some(bound) = region_violation(u, v, REGION_TOLERANCE) {
        return Err(Error::OutOfRegion { u, v, bound });
    }
    let clamp = |x: f64| x.clamp(-1.0, 1.0);
    let p = clamp((1.0 + v * v - u * u) / (2.0 * v));
    let q = clamp((1.0 + u * u - v * v) / (2.0 * u));
    let r = clamp((1.0 - u * u - v * v) / (2.0 * u * v));
    Ok((p, q, r))
}

/// `p² + q² + r² - 2pqr - 1`.
pub fn cubic_residual(p: f64, q: f64, r: f64) -> f64 {
    p * p + q * q + r * r - 2.0 * p * q * r - 1.0
}

/// `r - (pq - √((1-p²)(1-q²)))`.
pub fn branch_residual(p: f64, q: f64, r: f64) -> f64 {
    r - (p * q - ((1.0 - p * p).max(0.0) * (1.0 - q * q).max(0.0)).sqrt())
}

/// The crossing of `cc^(i)` and `cc^(j)` at their two common points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub i: usize,
    pub j: usize,
    /// Common points, lower index first.
    pub at: [usize; 2],
    /// Tangent dot products at the two common points.
    pub cos_at: [f64; 2],
    /// The value these crossings should equal: `p`, `q` or `r`.
    pub formula: char,
}

impl Crossing {
    pub fn cos(&self) -> f64 {
        self.cos_at[0]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossRatioReport {
    pub u: f64,
    pub v: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub phi: f64,
    pub psi: f64,
    pub chi: f64,
    pub residual_cubic: f64,
    pub residual_branch: f64,
    pub crossings: Vec<Crossing>,
    /// Largest difference between complementary crossings.
    pub pairing_check: f64,
    /// Largest difference between the two common points of one crossing.
    pub intersection_check: f64,
    /// Largest `||geometric cos| - |formula||`.
    pub magnitude_agreement: f64,
    /// Largest `|geometric cos - formula|`.
    pub signed_agreement: f64,
    /// Whether every geometric cosine has the sign of its formula value
    /// (values within 1e-9 of zero count as agreeing).
    pub signs_agree: bool,
}

/// Indices of the three points on `cc^(i)`, increasing.
fn circle_indices(i: usize) -> [usize; 3] {
    let mut out = [0; 3];
    let mut n = 0;
    for k in 1..=4 {
        if k != i {
            out[n] = k;
            n += 1;
        }
    }
    out
}

/// The complementary pairings and the formula value each one carries.
const PAIRS: [(usize, usize, char); 6] = [
    (1, 2, 'p'),
    (3, 4, 'p'),
    (1, 4, 'q'),
    (2, 3, 'q'),
    (1, 3, 'r'),
    (2, 4, 'r'),
];

pub fn pqr_from_circles(x: &[Point3; 4]) -> Result<CrossRatioReport> {
    check_quadruple(x)?;
    let (u, v) = cross_ratios_uv(x)?;
    let (p, q, r) = pqr_from_uv(u, v)?;
    let circles: Vec<CircleTriple> = (1..=4)
        .map(|i| {
            let [a, b, c] = circle_indices(i);
            CircleTriple::new(x[a - 1], x[b - 1], x[c - 1])
        })
        .collect::<Result<_>>()?;
    let tangent = |circle: usize, point: usize| {
        let pos = circle_indices(circle).iter().position(|&k| k == point).expect("point on circle");
        circles[circle - 1].tangent(pos + 1)
    };

    let crossings: Vec<Crossing> = PAIRS
        .iter()
        .map(|&(i, j, formula)| {
            let at: Vec<usize> = (1..=4).filter(|&k| k != i && k != j).collect();
            let cos_at = [0, 1].map(|n| tangent(i, at[n]).dot(&tangent(j, at[n])).clamp(-1.0, 1.0));
            Crossing { i, j, at: [at[0], at[1]], cos_at, formula }
        })
        .collect();

    let value = |c: char| match c {
        'p' => p,
        'q' => q,
        _ => r,
    };
    let pairing_check = crossings.chunks(2).map(|w| (w[0].cos() - w[1].cos()).abs()).fold(0.0, f64::max);
    let intersection_check = crossings.iter().map(|c| (c.cos_at[0] - c.cos_at[1]).abs()).fold(0.0, f64::max);
    let magnitude_agreement =
        crossings.iter().map(|c| (c.cos().abs() - value(c.formula).abs()).abs()).fold(0.0, f64::max);
    let signed_agreement = crossings.iter().map(|c| (c.cos() - value(c.formula)).abs()).fold(0.0, f64::max);
    let signs_agree = crossings.iter().all(|c| {
        let f = value(c.formula);
        c.cos().abs() < 1e-9 || f.abs() < 1e-9 || c.cos().signum() == f.signum()
    });

    Ok(CrossRatioReport {
        u,
        v,
        p,
        q,
        r,
        phi: p.acos(),
        psi: q.acos(),
        chi: r.acos(),
        residual_cubic: cubic_residual(p, q, r),
        residual_branch: branch_residual(p, q, r),
        crossings,
        pairing_check,
        intersection_check,
        magnitude_agreement,
        signed_agreement,
        signs_agree,
    })
}

/// Which solution of the cubic for `r` a surface point lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `r = pq - √((1-p²)(1-q²))`, i.e. `r = cos(φ+ψ)`.
    Minus,
    /// `r = pq + √((1-p²)(1-q²))`, i.e. `r = cos(φ-ψ)`.
    Plus,
}

impl Branch {
    fn label(&self) -> &'static str {
        match self {
            Branch::Minus => "minus",
            Branch::Plus => "plus",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub branch: Branch,
    pub on_allowed_face: bool,
}

/// Samples of the cubic surface `p² + q² + r² - 2pqr = 1` over the square
/// `φ, ψ ∈ [0, π]` with `grid_n` intervals per side. The allowed face
/// (`φ + ψ ≤ π` on the minus branch) is reached through the cross ratios
/// `u = sin φ / sin(φ+ψ)`, `v = sin ψ / sin(φ+ψ)` wherever these are finite;
/// the rest of both branches is emitted for context.
pub fn tetrahedron_surface(grid_n: usize) -> Result<Vec<SurfacePoint>> {
    if grid_n < 2 {
        return Err(Error::Domain { what: "grid_n", value: grid_n as f64, lo: 2.0, hi: f64::INFINITY });
    }
    let step = std::f64::consts::PI / grid_n as f64;
    let rows: Vec<Vec<SurfacePoint>> = (0..=grid_n)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::with_capacity(2 * (grid_n + 1));
            let phi = i as f64 * step;
            for j in 0..=grid_n {
                let psi = j as f64 * step;
                let (p, q) = (phi.cos(), psi.cos());
                if i + j <= grid_n {
                    let interior = i > 0 && j > 0 && i + j < grid_n;
                    let (p, q, r) = if interior {
                        let s = (phi + psi).sin();
                        pqr_from_uv(phi.sin() / s, psi.sin() / s).expect("interior of the allowed region")
                    } else {
                        (p, q, (phi + psi).cos())
                    };
                    row.push(SurfacePoint { p, q, r, branch: Branch::Minus, on_allowed_face: true });
                } else {
                    row.push(SurfacePoint { p, q, r: (phi + psi).cos(), branch: Branch::Minus, on_allowed_face: false });
                }
                row.push(SurfacePoint { p, q, r: (phi - psi).cos(), branch: Branch::Plus, on_allowed_face: false });
            }
            row
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// CSV with columns `p,q,r,branch,on_allowed_face`.
pub fn write_surface_csv<W: Write>(points: &[SurfacePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["p", "q", "r", "branch", "on_allowed_face"])?;
    for s in points {
        w.write_record([
            format_real(Some(s.p)),
            format_real(Some(s.q)),
            format_real(Some(s.r)),
            s.branch.label().to_string(),
            s.on_allowed_face.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
