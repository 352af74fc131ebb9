//! Truncated power series in one variable.
//!
//! A [`Series`] of order `n` stores the Taylor coefficients `c_0 ..= c_n` of a
//! function around an expansion point. All arithmetic truncates at the
//! smaller order of its operands, so results are exact Taylor coefficients up
//! to that order. This is what turns analytic parameter derivatives of a
//! curve into exact arc-length derivatives of curvature and torsion.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    coeffs: Vec<f64>,
}

impl Series {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least a constant term");
        Series { coeffs }
    }

    pub fn constant(value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Series { coeffs }
    }

    /// The expansion variable itself, `0 + 1·δ`.
    pub fn variable(order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        if order >= 1 {
            coeffs[1] = 1.0;
        }
        Series { coeffs }
    }

    /// Series from derivatives `f(0), f'(0), ..., f^(n)(0)`.
    pub fn from_derivatives(derivs: &[f64]) -> Self {
        let mut fact = 1.0;
        let coeffs = derivs
            .iter()
            .enumerate()
            .map(|(k, d)| {
                if k > 0 {
                    fact *= k as f64;
                }
                d / fact
            })
            .collect();
        Series::new(coeffs)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// `k`-th derivative at the expansion point, `k! c_k`.
    pub fn derivative_at_zero(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.coeff(k) * fact
    }

    pub fn truncate(&self, order: usize) -> Series {
        let n = order.min(self.order());
        Series::new(self.coeffs[..=n].to_vec())
    }

    pub fn scale(&self, factor: f64) -> Series {
        Series::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Term-wise derivative; the order drops by one (an order-0 series
    /// differentiates to the zero constant).
    pub fn derivative(&self) -> Series {
        if self.order() == 0 {
            return Series::constant(0.0, 0);
        }
        Series::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    /// Antiderivative vanishing at zero; the order grows by one.
    pub fn integral(&self) -> Series {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(0.0);
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / (k + 1) as f64),
        );
        Series::new(coeffs)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn recip(&self) -> Option<Series> {
        let c0 = self.coeffs[0];
        if c0 == 0.0 || !c0.is_finite() {
            return None;
        }
        let n = self.order();
        let mut out = vec![0.0; n + 1];
        out[0] = 1.0 / c0;
        for k in 1..=n {
            let acc: f64 = (1..=k).map(|j| self.coeffs[j] * out[k - j]).sum();
            out[k] = -acc / c0;
        }
        Some(Series::new(out))
    }

    pub fn div(&self, other: &Series) -> Option<Series> {
        other.recip().map(|r| self * &r)
    }

    /// Real power `f^alpha` for a series with positive constant term.
    pub fn powf(&self, alpha: f64) -> Option<Series> {
        let f0 = self.coeffs[0];
        if !(f0 > 0.0) {
            return None;
        }
        let n = self.order();
        let mut g = vec![0.0; n + 1];
        g[0] = f0.powf(alpha);
        for k in 1..=n {
            let acc: f64 = (1..=k)
                .map(|j| ((alpha + 1.0) * j as f64 - k as f64) * self.coeffs[j] * g[k - j])
                .sum();
            g[k] = acc / (k as f64 * f0);
        }
        Some(Series::new(g))
    }

    pub fn sqrt(&self) -> Option<Series> {
        self.powf(0.5)
    }

    /// `self(inner(δ))` for an inner series with zero constant term.
    pub fn compose(&self, inner: &Series) -> Series {
        debug_assert!(inner.coeffs[0] == 0.0, "inner series must vanish at zero");
        let order = self.order().min(inner.order());
        let inner = inner.truncate(order);
        let mut acc = Series::constant(self.coeffs[order], order);
        for c in self.coeffs[..order].iter().rev() {
            acc = &acc * &inner;
            acc.coeffs[0] += c;
        }
        acc
    }

    /// Compositional inverse of a series `a_1 δ + a_2 δ² + ...` with `a_1 ≠ 0`.
    pub fn revert(&self) -> Option<Series> {
        let n = self.order();
        let a1 = self.coeff(1);
        if n == 0 || self.coeffs[0] != 0.0 || a1 == 0.0 {
            return None;
        }
        // δ = (σ - Σ_{k≥2} a_k δ^k) / a_1, one more correct order per pass.
        let sigma = Series::variable(n);
        let mut higher = self.clone();
        higher.coeffs[1] = 0.0;
        let mut inv = sigma.scale(1.0 / a1);
        for _ in 1..n {
            inv = (&sigma - &higher.compose(&inv)).scale(1.0 / a1);
        }
        Some(inv)
    }

    fn zip_with(&self, other: &Series, f: impl Fn(f64, f64) -> f64) -> Series {
        let n = self.order().min(other.order());
        Series::new((0..=n).map(|k| f(self.coeffs[k], other.coeffs[k])).collect())
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        let n = self.order().min(rhs.order());
        let coeffs = (0..=n)
            .map(|k| (0..=k).map(|j| self.coeffs[j] * rhs.coeffs[k - j]).sum())
            .collect();
        Series::new(coeffs)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(-1.0)
    }
}

/// A vector-valued truncated series, one [`Series`] per coordinate.
#[derive(Clone, Debug)]
pub struct VecSeries(pub [Series; 3]);

impl VecSeries {
    pub fn order(&self) -> usize {
        self.0.iter().map(Series::order).min().unwrap_or(0)
    }

    pub fn dot(&self, other: &VecSeries) -> Series {
        let [a0, a1, a2] = &self.0;
        let [b0, b1, b2] = &other.0;
        &(&(a0 * b0) + &(a1 * b1)) + &(a2 * b2)
    }

    pub fn cross(&self, other: &VecSeries) -> VecSeries {
        let [a0, a1, a2] = &self.0;
        let [b0, b1, b2] = &other.0;
        VecSeries([
            &(a1 * b2) - &(a2 * b1),
            &(a2 * b0) - &(a0 * b2),
            &(a0 * b1) - &(a1 * b0),
        ])
    }

    pub fn derivative(&self) -> VecSeries {
        VecSeries(self.0.clone().map(|s| s.derivative()))
    }

    pub fn compose(&self, inner: &Series) -> VecSeries {
        VecSeries(self.0.clone().map(|s| s.compose(inner)))
    }

    pub fn coeff(&self, k: usize) -> [f64; 3] {
        [self.0[0].coeff(k), self.0[1].coeff(k), self.0[2].coeff(k)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn exp_series(order: usize) -> Series {
        let mut fact = 1.0;
        Series::new(
            (0..=order)
                .map(|k| {
                    if k > 0 {
                        fact *= k as f64;
                    }
                    1.0 / fact
                })
                .collect(),
        )
    }

    #[test]
    fn recip_of_one_minus_x_is_geometric() {
        let s = Series::new(vec![1.0, -1.0, 0.0, 0.0, 0.0]);
        let r = s.recip().unwrap();
        for c in r.coeffs() {
            assert_relative_eq!(*c, 1.0);
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let s = Series::new(vec![2.0, 0.3, -0.7, 1.1, 0.05, -0.2]);
        let r = s.sqrt().unwrap();
        let back = &r * &r;
        for (a, b) in back.coeffs().iter().zip(s.coeffs()) {
            assert_relative_eq!(*a, *b, epsilon = 1e-14);
        }
    }

    #[test]
    fn powf_matches_exp_scaling() {
        // exp(x)^a = exp(a x)
        let e = exp_series(8);
        let p = e.powf(-0.25).unwrap();
        let mut fact = 1.0;
        for (k, c) in p.coeffs().iter().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            assert_relative_eq!(*c, (-0.25f64).powi(k as i32) / fact, epsilon = 1e-15);
        }
    }

    #[test]
    fn revert_of_log1p_is_expm1() {
        // log(1+x) = x - x²/2 + x³/3 - ...
        let order = 9;
        let mut c = vec![0.0];
        for k in 1..=order {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            c.push(sign / k as f64);
        }
        let inv = Series::new(c).revert().unwrap();
        let e = exp_series(order);
        for k in 1..=order {
            assert_relative_eq!(inv.coeff(k), e.coeff(k), epsilon = 1e-14);
        }
    }

    #[test]
    fn compose_then_revert_is_identity() {
        let s = Series::new(vec![0.0, 1.7, -0.4, 0.25, 0.9, -0.3, 0.11]);
        let inv = s.revert().unwrap();
        let id = s.compose(&inv);
        assert_relative_eq!(id.coeff(1), 1.0, epsilon = 1e-14);
        for k in 2..=6 {
            assert!(id.coeff(k).abs() < 1e-13, "k={k}: {}", id.coeff(k));
        }
    }

    #[test]
    fn derivative_and_integral_are_inverse() {
        let s = Series::new(vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(s.derivative().integral(), s);
        assert_eq!(s.derivative_at_zero(3), 18.0);
    }

    #[test]
    fn non_positive_constant_has_no_root() {
        assert!(Series::new(vec![0.0, 1.0]).sqrt().is_none());
        assert!(Series::new(vec![-1.0, 1.0]).powf(0.25).is_none());
        assert!(Series::new(vec![0.0, 1.0]).recip().is_none());
    }
}
