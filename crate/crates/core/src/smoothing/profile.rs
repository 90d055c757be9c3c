//! The flat profile `h(t) = t g(t)` with `g` a smooth step, and a small
//! truncated Taylor jet used to evaluate its derivatives in closed form.

use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::{Error, Result};

/// Highest derivative order carried by [`Jet`].
pub const JET_ORDER: usize = 4;

/// Exponents below this underflow `exp` to zero.
const EXP_UNDERFLOW: f64 = -745.0;

/// Truncated Taylor expansion: `c[k] = f^(k)(t0) / k!`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub c: [f64; JET_ORDER + 1],
}

const FACTORIAL: [f64; JET_ORDER + 1] = [1.0, 1.0, 2.0, 6.0, 24.0];

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; JET_ORDER + 1];
        c[0] = v;
        Jet { c }
    }

    /// The identity function expanded at `t`.
    pub fn variable(t: f64) -> Self {
        let mut c = [0.0; JET_ORDER + 1];
        c[0] = t;
        c[1] = 1.0;
        Jet { c }
    }

    pub fn zero() -> Self {
        Jet::constant(0.0)
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn derivative(&self, order: usize) -> f64 {
        self.c[order] * FACTORIAL[order]
    }

    pub fn scale(self, s: f64) -> Self {
        Jet { c: self.c.map(|x| x * s) }
    }

    /// `f(self)` given the derivatives `f^(k)` at `self.value()`.
    fn compose(self, outer: [f64; JET_ORDER + 1]) -> Self {
        let mut delta = self;
        delta.c[0] = 0.0;
        let mut out = Jet::constant(outer[0]);
        let mut power = Jet::constant(1.0);
        for (k, d) in outer.iter().enumerate().skip(1) {
            power = power * delta;
            out = out + power.scale(d / FACTORIAL[k]);
        }
        out
    }

    pub fn exp(self) -> Self {
        if self.c[0] < EXP_UNDERFLOW {
            return Jet::zero();
        }
        let e = self.c[0].exp();
        self.compose([e; JET_ORDER + 1])
    }

    /// `self^alpha` for a positive base.
    pub fn powf(self, alpha: f64) -> Self {
        let x = self.c[0];
        let mut outer = [0.0; JET_ORDER + 1];
        let mut coeff = 1.0;
        for (k, o) in outer.iter_mut().enumerate() {
            *o = coeff * x.powf(alpha - k as f64);
            coeff *= alpha - k as f64;
        }
        self.compose(outer)
    }

    pub fn recip(self) -> Self {
        self.powf(-1.0)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c) {
            *a += b;
        }
        Jet { c }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut c = [0.0; JET_ORDER + 1];
        for i in 0..=JET_ORDER {
            if self.c[i] == 0.0 {
                continue;
            }
            for j in 0..=(JET_ORDER - i) {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Jet { c }
    }
}

/// `h(t) = t g(t)` with `g(t) = e(t) / (e(t) + e(1 - t))` and
/// `e(t) = exp(-a / t^p)`.
#[derive(Clone, Debug, Serialize)]
pub struct SmoothProfile {
    pub sharpness: f64,
    pub power: f64,
    pub derivative_order_max: usize,
}

impl Default for SmoothProfile {
    fn default() -> Self {
        Self { sharpness: 5.0, power: 0.5, derivative_order_max: JET_ORDER }
    }
}

impl SmoothProfile {
    /// Jet of the smooth step `g` at `t`.
    pub fn step_jet(&self, t: f64) -> Jet {
        if t <= 0.0 {
            return Jet::zero();
        }
        if t >= 1.0 {
            return Jet::constant(1.0);
        }
        // g = 1 / (1 + exp(phi)), phi = a (t^-p - (1-t)^-p)
        let u = Jet::variable(t);
        let v = Jet::constant(1.0) - u;
        let phi = (u.powf(-self.power) - v.powf(-self.power)).scale(self.sharpness);
        if phi.value() > 0.0 {
            let q = (-phi).exp();
            q * (Jet::constant(1.0) + q).recip()
        } else {
            (Jet::constant(1.0) + phi.exp()).recip()
        }
    }

    pub fn step(&self, t: f64) -> f64 {
        self.step_jet(t).value()
    }

    pub fn jet(&self, t: f64) -> Jet {
        if t <= 0.0 {
            return Jet::zero();
        }
        if t >= 1.0 {
            return Jet::variable(t);
        }
        Jet::variable(t) * self.step_jet(t)
    }

    /// `h^(order)(t)`.
    pub fn eval(&self, t: f64, order: usize) -> Result<f64> {
        if order > self.derivative_order_max.min(JET_ORDER) {
            return Err(Error::input(format!(
                "derivative order {order} exceeds supported maximum {}",
                self.derivative_order_max.min(JET_ORDER)
            )));
        }
        if !t.is_finite() {
            return Err(Error::input("profile argument is not finite"));
        }
        if t >= 1.0 {
            return Ok(match order {
                0 => t,
                1 => 1.0,
                _ => 0.0,
            });
        }
        Ok(self.jet(t).derivative(order))
    }

    pub fn h(&self, t: f64) -> f64 {
        if t >= 1.0 {
            t
        } else {
            self.jet(t).value()
        }
    }
}

pub fn eval_h(profile: &SmoothProfile, t: f64, order: usize) -> Result<f64> {
    profile.eval(t, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_arithmetic_matches_closed_forms() {
        let t = 0.7;
        let e = Jet::variable(t).scale(2.0).exp();
        for k in 0..=JET_ORDER {
            let want = 2f64.powi(k as i32) * (2.0 * t).exp();
            assert!((e.derivative(k) - want).abs() < 1e-12 * want);
        }
        let r = Jet::variable(t).recip();
        assert!((r.derivative(3) + 6.0 / t.powi(4)).abs() < 1e-10);
        let s = Jet::variable(t).powf(-0.5);
        assert!((s.derivative(2) - 0.75 * t.powf(-2.5)).abs() < 1e-12);
    }

    #[test]
    fn tail_and_midpoint() {
        let p = SmoothProfile::default();
        assert_eq!(p.eval(1.5, 0).unwrap(), 1.5);
        assert_eq!(p.eval(1.0, 1).unwrap(), 1.0);
        assert_eq!(p.eval(0.5, 0).unwrap(), 0.25);
        assert_eq!(p.eval(0.0, 0).unwrap(), 0.0);
    }

    #[test]
    fn step_is_symmetric() {
        let p = SmoothProfile::default();
        for t in [0.1, 0.3, 0.45] {
            assert!((p.step(t) + p.step(1.0 - t) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let p = SmoothProfile::default();
        let s = 1e-5;
        for t in [0.2, 0.5, 0.8] {
            for k in 1..=2 {
                let fd = if k == 1 {
                    (p.h(t + s) - p.h(t - s)) / (2.0 * s)
                } else {
                    (p.h(t + s) - 2.0 * p.h(t) + p.h(t - s)) / (s * s)
                };
                let an = p.eval(t, k).unwrap();
                assert!((fd - an).abs() < 1e-4 * (1.0 + an.abs()), "t={t} k={k}: {fd} vs {an}");
            }
            let fd3 = (p.eval(t + s, 2).unwrap() - p.eval(t - s, 2).unwrap()) / (2.0 * s);
            assert!((fd3 - p.eval(t, 3).unwrap()).abs() < 1e-5 * (1.0 + fd3.abs()));
            let fd4 = (p.eval(t + s, 3).unwrap() - p.eval(t - s, 3).unwrap()) / (2.0 * s);
            assert!((fd4 - p.eval(t, 4).unwrap()).abs() < 1e-5 * (1.0 + fd4.abs()));
        }
    }

    #[test]
    fn order_beyond_max_is_rejected() {
        let p = SmoothProfile::default();
        assert!(p.eval(0.3, 5).is_err());
        let low = SmoothProfile { derivative_order_max: 2, ..Default::default() };
        assert!(low.eval(0.3, 3).is_err());
    }

    #[test]
    fn flat_at_zero() {
        let p = SmoothProfile::default();
        for k in 0..=4 {
            assert!(p.eval(1e-3, k).unwrap().abs() < 1e-30);
        }
        assert_eq!(p.eval(1e-6, 1).unwrap(), 0.0);
    }
}
