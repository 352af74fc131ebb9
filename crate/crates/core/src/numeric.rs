//! Small numerical kernels: adaptive Gauss–Kronrod quadrature, a bracketed
//! Newton/bisection solver for monotone functions, central finite-difference
//! weights and a least-squares slope fit.

use crate::error::{Error, Result};

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 40;
const NOISE_BAND: f64 = 1e4;

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kronrod = K15_WEIGHTS[7] * fc;
    let mut gauss = G7_WEIGHTS[3] * fc;
    for i in 0..7 {
        let dx = h * GK_NODES[i];
        let sum = f(c - dx)? + f(c + dx)?;
        kronrod += K15_WEIGHTS[i] * sum;
        if i % 2 == 1 {
            gauss += G7_WEIGHTS[i / 2] * sum;
        }
    }
    Ok((kronrod * h, ((kronrod - gauss) * h).abs()))
}

/// Adaptive Gauss–Kronrod 7/15 integration of `f` over `[a, b]` to the given
/// absolute tolerance. The integrand may fail; the first error aborts the
/// integration. Non-finite integrand values are reported, never masked.
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Integral>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let mut checked = |x: f64| -> Result<f64> {
        let y = f(x)?;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Numerical(format!("non-finite integrand at {x}")))
        }
    };
    let mut evaluations = 0;
    let mut stack = vec![(a, b, tol.max(f64::MIN_POSITIVE), 0u32, f64::INFINITY)];
    let mut value = 0.0;
    let mut error = 0.0;
    while let Some((lo, hi, local_tol, depth, parent_error)) = stack.pop() {
        let (v, e) = gk15(&mut checked, lo, hi)?;
        evaluations += 15;
        let roundoff_floor = 50.0 * f64::EPSILON * v.abs();
        // A noisy integrand (e.g. interpolated samples) keeps an error
        // estimate near its noise level however fine the split; once halving
        // stops paying off there, further work only burns evaluations.
        let stalled = e <= NOISE_BAND * roundoff_floor && e >= 0.5 * parent_error;
        if e <= local_tol.max(roundoff_floor) || stalled || depth >= MAX_DEPTH {
            value += v;
            error += e;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, 0.5 * local_tol, depth + 1, e));
            stack.push((lo, mid, 0.5 * local_tol, depth + 1, e));
        }
    }
    Ok(Integral { value, error, evaluations })
}

/// Solves `g(x) = 0` for a strictly increasing `g` on `[lo, hi]` with known
/// derivative, keeping the root bracketed. Newton steps that leave the
/// bracket or fail to halve it fall back to bisection.
pub fn solve_increasing<G>(mut g: G, mut lo: f64, mut hi: f64, guess: f64, x_tol: f64) -> Result<f64>
where
    G: FnMut(f64) -> Result<(f64, f64)>,
{
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let (g_lo, _) = g(lo)?;
    let (g_hi, _) = g(hi)?;
    if g_lo > 0.0 || g_hi < 0.0 {
        return Err(Error::Numerical(format!(
            "root not bracketed in [{lo}, {hi}]: g = ({g_lo:e}, {g_hi:e})"
        )));
    }
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    let mut x = if guess > lo && guess < hi { guess } else { 0.5 * (lo + hi) };
    let mut width = hi - lo;
    for _ in 0..200 {
        let (gx, dg) = g(x)?;
        if gx == 0.0 {
            return Ok(x);
        }
        if gx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - gx / dg;
        let step_ok = dg > 0.0 && newton > lo && newton < hi;
        let next = if step_ok && (hi - lo) < 0.5 * width || step_ok && (newton - x).abs() < 0.25 * (hi - lo) {
            newton
        } else {
            0.5 * (lo + hi)
        };
        width = hi - lo;
        let converged = (next - x).abs() <= x_tol * (1.0 + x.abs()) || hi - lo <= x_tol * (1.0 + x.abs());
        x = next;
        if converged {
            return Ok(x);
        }
    }
    Err(Error::Numerical("bracketed solver did not converge".into()))
}

/// Weights of the central difference for the `k`-th derivative on the
/// stencil `x + j h`, `j = -half ..= half`, in units of `h^-k`
/// (Fornberg's recursion).
pub fn central_weights(k: usize, half: usize) -> Vec<f64> {
    let nodes: Vec<f64> = (-(half as i64)..=half as i64).map(|j| j as f64).collect();
    fornberg(0.0, &nodes, k)
}

/// Weights `w_j` such that `Σ w_j f(x_j)` approximates `f^(m)(z)`; these are
/// the derivatives at `z` of the interpolating polynomial through the nodes.
pub fn fornberg(z: f64, x: &[f64], m: usize) -> Vec<f64> {
    let n = x.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// Round-trippable scientific notation (17 significant digits); empty for
/// `None`.
pub fn format_real(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.16e}"),
        None => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_smooth_functions_to_roundoff() {
        let r = integrate(|x| Ok(x.cos()), 0.0, 1.0, 1e-15).unwrap();
        assert_relative_eq!(r.value, 1f64.sin(), epsilon = 1e-15);
        let r = integrate(|x| Ok((x * x).exp()), -1.0, 2.0, 1e-12).unwrap();
        // erfi-based reference from mpmath: ∫_{-1}^{2} e^{x²} dx
        assert_relative_eq!(r.value, 17.915_279_511_414_41, max_relative = 1e-13);
    }

    #[test]
    fn reversed_interval_is_negative() {
        let r = integrate(|x| Ok(x), 1.0, 0.0, 1e-14).unwrap();
        assert_relative_eq!(r.value, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn noisy_integrand_terminates() {
        // Deterministic relative jitter of about 4e-14, above the roundoff floor.
        let f = |x: f64| Ok(1.0 + 4e-14 * (1e6 * x).sin());
        let r = integrate(f, 0.0, 1.0, 1e-17).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(r.evaluations < 100_000, "{}", r.evaluations);
    }

    #[test]
    fn integrand_errors_propagate() {
        let r = integrate(|x| if x > 0.5 { Err(Error::Numerical("boom".into())) } else { Ok(1.0) }, 0.0, 1.0, 1e-10);
        assert!(r.is_err());
        let r = integrate(|_| Ok(f64::NAN), 0.0, 1.0, 1e-10);
        assert!(r.is_err());
    }

    #[test]
    fn solver_finds_cube_root() {
        let x = solve_increasing(|x| Ok((x * x * x - 2.0, 3.0 * x * x)), 0.0, 2.0, 1.0, 1e-15).unwrap();
        assert_relative_eq!(x, 2f64.cbrt(), epsilon = 1e-14);
    }

    #[test]
    fn solver_rejects_unbracketed_root() {
        assert!(solve_increasing(|x| Ok((x - 5.0, 1.0)), 0.0, 1.0, 0.5, 1e-12).is_err());
    }

    #[test]
    fn fornberg_reproduces_classic_stencils() {
        let w = central_weights(1, 1);
        assert_eq!(w.len(), 3);
        assert_relative_eq!(w[0], -0.5);
        assert_relative_eq!(w[2], 0.5);
        let w = central_weights(2, 2);
        let expect = [-1.0 / 12.0, 4.0 / 3.0, -2.5, 4.0 / 3.0, -1.0 / 12.0];
        for (a, b) in w.iter().zip(expect) {
            assert_relative_eq!(*a, b, epsilon = 1e-13);
        }
    }

    #[test]
    fn slope_of_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        assert_relative_eq!(fit_slope(&xs, &ys).unwrap(), 2.0);
        assert!(fit_slope(&[1.0], &[1.0]).is_none());
    }
}
