//! Adaptive Gauss–Kronrod (7/15) quadrature on finite and infinite ranges.

use super::expr::{Domain, FiberIntegral, Point};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Upper bound on the number of subintervals examined by one call.
const INTERVAL_BUDGET: usize = 20_000;

/// Default inner tolerance used when a fiber integral is evaluated pointwise.
const FIBER_TOLERANCE: f64 = 1e-14;
const FIBER_DEPTH: u32 = 30;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Integration range of one coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Range {
    /// The whole real line.
    Line,
    /// `(-inf, 0]`.
    NegativeHalfLine,
    /// The whole line, parametrised by `u = e^{±r}` so exponential decay
    /// becomes polynomial behaviour near `u = 0`.
    Radial,
    /// `[0, 2π]`.
    Circle,
}

impl From<Domain> for Range {
    fn from(d: Domain) -> Self {
        match d {
            Domain::Line => Range::Line,
            Domain::Radial => Range::Radial,
            Domain::Circle => Range::Circle,
        }
    }
}

fn kronrod(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    for j in 0..7 {
        let x = h * XGK[j];
        let (f1, f2) = (f(c - x), f(c + x));
        k += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    (k * h, (k - g).abs() * h, abs * h.abs())
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`. Returns `None`
/// if some subinterval still misses its share of the tolerance at depth
/// `max_depth`, the work budget runs out or a value is not finite.
pub fn adaptive(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: u32) -> Option<Estimate> {
    let mut stack = vec![(a, b, tol, 0u32)];
    let mut total = Estimate { value: 0.0, error: 0.0 };
    let mut examined = 0;
    while let Some((lo, hi, local, depth)) = stack.pop() {
        examined += 1;
        if examined > INTERVAL_BUDGET {
            return None;
        }
        let (value, error, abs) = kronrod(f, lo, hi);
        if !value.is_finite() || !error.is_finite() {
            return None;
        }
        let floor = 1e-14 * abs;
        if error <= local.max(floor) {
            total.value += value;
            total.error += error;
            continue;
        }
        if depth >= max_depth {
            return None;
        }
        let mid = 0.5 * (lo + hi);
        stack.push((lo, mid, local / 2.0, depth + 1));
        stack.push((mid, hi, local / 2.0, depth + 1));
    }
    Some(total)
}

/// Integrates over one coordinate range.
pub fn integrate_range(f: &mut dyn FnMut(f64) -> f64, range: Range, tol: f64, max_depth: u32) -> Option<Estimate> {
    match range {
        Range::Circle => adaptive(f, 0.0, std::f64::consts::TAU, tol, max_depth),
        Range::Line => adaptive(
            &mut |s| {
                if s >= 1.0 {
                    return 0.0;
                }
                let x = s / (1.0 - s);
                let w = 1.0 / ((1.0 - s) * (1.0 - s));
                (f(x) + f(-x)) * w
            },
            0.0,
            1.0,
            tol,
            max_depth,
        ),
        Range::NegativeHalfLine => adaptive(
            &mut |s| {
                if s >= 1.0 {
                    return 0.0;
                }
                f(-s / (1.0 - s)) / ((1.0 - s) * (1.0 - s))
            },
            0.0,
            1.0,
            tol,
            max_depth,
        ),
        Range::Radial => adaptive(
            &mut |u| {
                if u <= 0.0 {
                    return 0.0;
                }
                let r = u.ln();
                (f(r) + f(-r)) / u
            },
            0.0,
            1.0,
            tol,
            max_depth,
        ),
    }
}

/// Nested integration over a box of ranges; `f` receives one value per range.
pub fn integrate_box(
    f: &mut dyn FnMut(&[f64]) -> f64,
    ranges: &[Range],
    tol: f64,
    max_depth: u32,
) -> Option<Estimate> {
    let mut args = vec![0.0; ranges.len()];
    nested(f, ranges, &mut args, 0, tol, max_depth)
}

fn nested(
    f: &mut dyn FnMut(&[f64]) -> f64,
    ranges: &[Range],
    args: &mut Vec<f64>,
    level: usize,
    tol: f64,
    max_depth: u32,
) -> Option<Estimate> {
    if level == ranges.len() {
        let v = f(args);
        return v.is_finite().then_some(Estimate { value: v, error: 0.0 });
    }
    let mut failed = false;
    let inner_tol = tol * 1e-3;
    let est = integrate_range(
        &mut |t| {
            if failed {
                return f64::NAN;
            }
            args[level] = t;
            match nested(f, ranges, args, level + 1, inner_tol, max_depth) {
                Some(e) => e.value,
                None => {
                    failed = true;
                    f64::NAN
                }
            }
        },
        ranges[level],
        tol,
        max_depth,
    )?;
    (!failed).then_some(est)
}

/// Pointwise value of a fiber integral; NaN if the inner quadrature fails.
pub fn fiber_value(fi: &FiberIntegral, p: &Point) -> f64 {
    let ranges: Vec<Range> = fi.domains.iter().map(|&d| d.into()).collect();
    let mut q = p.clone();
    q.bound = vec![0.0; ranges.len()];
    integrate_box(
        &mut |s| {
            q.bound.copy_from_slice(s);
            fi.integrand.eval(&q)
        },
        &ranges,
        FIBER_TOLERANCE,
        FIBER_DEPTH,
    )
    .map_or(f64::NAN, |e| e.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_on_the_line() {
        let e = integrate_range(&mut |x| (-x * x).exp(), Range::Line, 1e-10, 30).unwrap();
        assert!((e.value - std::f64::consts::PI.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn radial_exponential_decay() {
        let e = integrate_range(&mut |r| (r - r.exp()).exp(), Range::Radial, 1e-10, 30).unwrap();
        assert!((e.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn divergence_is_reported() {
        assert!(integrate_range(&mut |_| 1.0, Range::Radial, 1e-8, 20).is_none());
        assert!(integrate_range(&mut |_| 1.0, Range::Line, 1e-8, 20).is_none());
    }

    #[test]
    fn nested_box() {
        let e = integrate_box(&mut |v| (-v[0] * v[0] - v[1] * v[1]).exp() * v[2].cos().powi(2), &[Range::Line, Range::Line, Range::Circle], 1e-7, 30)
            .unwrap();
        assert!((e.value - std::f64::consts::PI * std::f64::consts::PI).abs() < 1e-6);
    }
}
