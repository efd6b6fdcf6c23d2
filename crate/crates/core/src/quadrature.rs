//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const MAX_DEPTH: u32 = 40;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn finite(x: f64, at: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite(format!("integrand at {at}")))
    }
}

/// `∫_a^b f` to absolute tolerance `tol`, bisecting at most `max_depth` levels.
/// `b < a` is allowed and flips the sign.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return adaptive_simpson(f, b, a, tol, max_depth).map(|v| -v);
    }
    let eval = |x: f64| f(x).and_then(|v| finite(v, x));
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (eval(a)?, eval(m)?, eval(b)?);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    refine(&eval, Panel { a, b, fa, fm, fb, whole }, tol, max_depth)
}

fn refine<F>(f: &F, p: Panel, tol: f64, depth: u32) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let m = 0.5 * (p.a + p.b);
    let (lm, rm) = (0.5 * (p.a + m), 0.5 * (m + p.b));
    let (flm, frm) = (f(lm)?, f(rm)?);
    let left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
    let right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
    let delta = left + right - p.whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    let l = refine(f, Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left }, 0.5 * tol, depth - 1)?;
    let r = refine(f, Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right }, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn smooth_integrals() {
        let v = adaptive_simpson(|x| Ok(x.sin()), 0.0, PI, 1e-12, MAX_DEPTH).unwrap();
        assert!((v - 2.0).abs() < 1e-11);
        let v = adaptive_simpson(|x| Ok((-x * x).exp()), -6.0, 6.0, 1e-12, MAX_DEPTH).unwrap();
        assert!((v - PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn reversed_limits() {
        let v = adaptive_simpson(|x| Ok(x * x), 1.0, 0.0, 1e-12, MAX_DEPTH).unwrap();
        assert!((v + 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let r = adaptive_simpson(|x| Ok(1.0 / x), 0.0, 1.0, 1e-10, MAX_DEPTH);
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }
}
