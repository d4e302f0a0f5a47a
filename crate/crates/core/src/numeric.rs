//! Bracketing root finder shared by the equilibrium and social-optimum solvers.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    /// Stop once the bracket is at most this wide.
    pub width_tol: f64,
    pub max_iter: usize,
}

impl Default for Bisection {
    fn default() -> Self {
        Self {
            width_tol: 1e-12,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    /// Final bracket `[lo, hi]`; `x` always lies inside it.
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

impl Bisection {
    /// Finds a sign change of `f` on `[lo, hi]`.
    ///
    /// `f(lo)` and `f(hi)` must have opposite signs (or one of them be zero).
    /// Once the bracket is narrow enough, the returned point is the secant
    /// intercept of the final bracket, which is exact for locally linear `f`
    /// and never leaves the bracket.
    pub fn solve<F>(&self, mut f: F, mut lo: f64, mut hi: f64) -> Result<Root>
    where
        F: FnMut(f64) -> f64,
    {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidArgument(format!(
                "empty bracket [{lo}, {hi}]"
            )));
        }
        let mut f_lo = f(lo);
        let mut f_hi = f(hi);
        if f_lo == 0.0 {
            return Ok(Root { x: lo, lo, hi: lo, iterations: 0 });
        }
        if f_hi == 0.0 {
            return Ok(Root { x: hi, lo: hi, hi, iterations: 0 });
        }
        if f_lo.signum() == f_hi.signum() {
            return Err(Error::InvalidArgument(format!(
                "no sign change on [{lo}, {hi}]: f = {f_lo}, {f_hi}"
            )));
        }

        let mut iterations = 0;
        while hi - lo > self.width_tol && iterations < self.max_iter {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let f_mid = f(mid);
            iterations += 1;
            if f_mid == 0.0 {
                return Ok(Root { x: mid, lo: mid, hi: mid, iterations });
            }
            if f_mid.signum() == f_lo.signum() {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
                f_hi = f_mid;
            }
        }

        let x = (lo - f_lo * (hi - lo) / (f_hi - f_lo)).clamp(lo, hi);
        Ok(Root { x, lo, hi, iterations })
    }
}
