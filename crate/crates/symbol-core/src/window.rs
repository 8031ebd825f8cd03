//! Flattening of unbounded coefficients outside `|x| <= half`.
//!
//! `f_L(x) = (1 - b(x)) f(x) + b(x) f(+-half)` where `b` is a C-infinity step
//! rising from 0 at `|x| = half` to 1 at `|x| = 1.5 half`. A convex blend keeps
//! positive semidefinite matrix coefficients positive semidefinite.

/// C-infinity step: 0 for `u <= 0`, 1 for `u >= 1`.
pub fn smooth_step(u: f64) -> f64 {
    fn g(v: f64) -> f64 {
        if v <= 0.0 {
            0.0
        } else {
            (-1.0 / v).exp()
        }
    }
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = g(u);
        a / (a + g(1.0 - u))
    }
}

/// Blend weight `b(x)` and the anchor point `+-half`.
pub fn blend(x: f64, half: f64) -> (f64, f64) {
    let anchor = if x < 0.0 { -half } else { half };
    (smooth_step((x.abs() - half) / (0.5 * half)), anchor)
}

/// Windowed scalar function.
pub fn flatten<F: Fn(f64) -> f64>(f: F, x: f64, half: f64) -> f64 {
    let (b, a) = blend(x, half);
    if b == 0.0 {
        f(x)
    } else if b == 1.0 {
        f(a)
    } else {
        (1.0 - b) * f(x) + b * f(a)
    }
}
