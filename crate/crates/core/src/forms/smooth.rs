//! Smooth bump and step profiles with derivatives of any order.
//!
//! Derivatives are computed by truncated Taylor arithmetic on the closed
//! forms `exp(-1/((t-a)(b-t)))` and `g(b-t) / (g(b-t) + g(t-a))` with
//! `g(y) = exp(-1/y)`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Below this exponent `exp` underflows to zero in double precision.
const UNDERFLOW: f64 = -740.0;

/// Truncated Taylor series `c[0] + c[1] h + ... + c[n] h^n`.
#[derive(Clone, Debug)]
struct Jet(Vec<f64>);

impl Jet {
    fn variable(t: f64, order: usize) -> Jet {
        let mut c = vec![0.0; order + 1];
        c[0] = t;
        if order > 0 {
            c[1] = 1.0;
        }
        Jet(c)
    }

    fn zero(order: usize) -> Jet {
        Jet(vec![0.0; order + 1])
    }

    fn shift(&self, k: f64) -> Jet {
        let mut c = self.0.clone();
        c[0] += k;
        Jet(c)
    }

    fn scale(&self, k: f64) -> Jet {
        Jet(self.0.iter().map(|c| c * k).collect())
    }

    fn add(&self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    fn mul(&self, o: &Jet) -> Jet {
        let n = self.0.len();
        Jet((0..n).map(|k| (0..=k).map(|i| self.0[i] * o.0[k - i]).sum()).collect())
    }

    fn div(&self, o: &Jet) -> Jet {
        let n = self.0.len();
        let mut c = vec![0.0; n];
        for k in 0..n {
            let s: f64 = (1..=k).map(|i| o.0[i] * c[k - i]).sum();
            c[k] = (self.0[k] - s) / o.0[0];
        }
        Jet(c)
    }

    fn exp(&self) -> Jet {
        let n = self.0.len();
        let mut e = vec![0.0; n];
        e[0] = self.0[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k).map(|i| i as f64 * self.0[i] * e[k - i]).sum();
            e[k] = s / k as f64;
        }
        Jet(e)
    }

    fn derivative(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.0[k] * fact
    }
}

/// `exp(-1/y)` as a jet in `y`, flushed to zero where it underflows.
fn flat_exp(y: &Jet) -> Jet {
    let order = y.0.len() - 1;
    if y.0[0] <= 0.0 || -1.0 / y.0[0] < UNDERFLOW {
        return Jet::zero(order);
    }
    Jet::zero(order).shift(-1.0).div(y).exp()
}

fn bump_raw(a: f64, b: f64, order: usize, t: f64) -> f64 {
    if t <= a || t >= b {
        return 0.0;
    }
    let x = Jet::variable(t, order);
    let q = x.shift(-a).mul(&x.scale(-1.0).shift(b));
    flat_exp(&q).derivative(order)
}

fn normalizer(a: f64, b: f64) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64), f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (a.to_bits(), b.to_bits());
    if let Some(z) = cache.lock().map(|c| c.get(&key).copied()).ok().flatten() {
        return z;
    }
    let z = super::quad::adaptive(&mut |t| bump_raw(a, b, 0, t), a, b, 1e-15, 40)
        .map(|e| e.value)
        .unwrap_or(f64::NAN);
    if let Ok(mut c) = cache.lock() {
        c.insert(key, z);
    }
    z
}

/// `order`-th derivative of the unit-mass bump supported on `[a, b]`.
pub fn bump_derivative(a: f64, b: f64, order: u32, t: f64) -> f64 {
    if !(a < b) {
        return f64::NAN;
    }
    let raw = bump_raw(a, b, order as usize, t);
    if raw == 0.0 {
        return 0.0;
    }
    raw / normalizer(a, b)
}

/// `order`-th derivative of the step falling from 1 at `a` to 0 at `b`.
pub fn step_derivative(a: f64, b: f64, order: u32, t: f64) -> f64 {
    if !(a < b) {
        return f64::NAN;
    }
    if t <= a || t >= b {
        return if order == 0 && t <= a { 1.0 } else { 0.0 };
    }
    let order = order as usize;
    let x = Jet::variable(t, order);
    let upper = flat_exp(&x.scale(-1.0).shift(b));
    let lower = flat_exp(&x.shift(-a));
    upper.div(&upper.add(&lower)).derivative(order)
}
