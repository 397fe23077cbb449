//! Branching-recurrence mathematics.
//!
//! The recurrence `T(n) = (d-1)(T(n-1) + ... + T(n-k))` grows like
//! `lambda^n`, where `lambda` is the largest root of
//! `f(x) = x^k - (d-1)(x^(k-1) + ... + 1)`. Multiplying by `x - 1` gives
//! `g(x) = x^(k+1) - d x^k + (d-1)`, which is increasing past
//! `d k / (k+1)` and changes sign before `d`.
//!
//! The root sits within `(d-1)/d^k` of `d`, so for large `d` and `k` the
//! gap `d - lambda` is far below the spacing of doubles near `d`. Roots are
//! therefore located in terms of the deficit `delta = d - lambda`, where
//! `g = (d-1) - delta (d - delta)^k` keeps full relative precision.

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative margin for the strict bracketing checks.
const SANDWICH_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootResult {
    pub lambda: f64,
    /// `d - lambda`, carried separately because it underflows `lambda`'s
    /// precision for large `d` and `k`.
    pub deficit: f64,
    pub residual_f: f64,
    pub residual_g: f64,
    /// `d - 1/d^(k-1)`
    pub lower_sandwich: f64,
    /// `d - (d-1)/d^k`
    pub upper_sandwich: f64,
}

/// `g` at `lambda = d - delta`.
fn g_from_deficit(d: f64, k: u32, delta: f64) -> f64 {
    (d - 1.0) - delta * (d - delta).powi(k as i32)
}

/// Largest root of the characteristic equation, by bisection on the
/// deficit `d - lambda` down to adjacent doubles.
pub fn char_root(d: u32, k: u32) -> Result<RootResult> {
    if d < 2 || k < 2 {
        return Err(Error::InvalidParameters(format!(
            "char_root requires d >= 2 and k >= 2 (d={d}, k={k})"
        )));
    }
    let df = d as f64;
    // g(d) = d - 1 > 0 and g(d k/(k+1)) < 0
    let (mut pos, mut neg) = (0.0f64, df / (k as f64 + 1.0));
    if g_from_deficit(df, k, neg) >= 0.0 {
        return Err(Error::SandwichViolation {
            d,
            k,
            reason: "g is not negative at the left end of the bracket".into(),
        });
    }
    loop {
        let mid = 0.5 * (pos + neg);
        if mid <= pos || mid >= neg {
            break;
        }
        if g_from_deficit(df, k, mid) > 0.0 {
            pos = mid;
        } else {
            neg = mid;
        }
    }
    let delta = if g_from_deficit(df, k, pos).abs() <= g_from_deficit(df, k, neg).abs() {
        pos
    } else {
        neg
    };
    let lambda = df - delta;
    let residual_g = g_from_deficit(df, k, delta);
    let residual_f = residual_g / (lambda - 1.0);

    // deficit bounds: (d-1)/d^k < delta < 1/d^(k-1)
    let deficit_low = (df - 1.0) / df.powi(k as i32);
    let deficit_high = 1.0 / df.powi(k as i32 - 1);
    if !(delta > deficit_low * (1.0 + SANDWICH_MARGIN) && delta < deficit_high * (1.0 - SANDWICH_MARGIN)) {
        return Err(Error::SandwichViolation {
            d,
            k,
            reason: format!("deficit {delta:e} outside ({deficit_low:e}, {deficit_high:e})"),
        });
    }
    Ok(RootResult {
        lambda,
        deficit: delta,
        residual_f,
        residual_g,
        lower_sandwich: df - deficit_high,
        upper_sandwich: df - deficit_low,
    })
}

/// `d - (d-1)/d^k`, the closed-form base bounding the branching solver.
pub fn dpll_bound_base(d: u32, k: u32) -> f64 {
    let d = d as f64;
    d - (d - 1.0) / d.powi(k as i32)
}

/// `d ((d-1)/d)^(1/k)`, the per-variable base of the randomized solver.
pub fn ppsz_bound_base(d: u32, k: u32) -> f64 {
    let d = d as f64;
    d * ((d - 1.0) / d).powf(1.0 / k as f64)
}

/// Natural log of `(n/e)^(alpha n) (1+eps)^n` for `alpha <= 1` and of
/// `(n/e)^(alpha n)` for `alpha > 1`, the branching bound when `d = n^alpha`.
pub fn bound_variable_domain_dpll(n: f64, alpha: f64, epsilon: f64) -> f64 {
    let base = alpha * n * (n.ln() - 1.0);
    if alpha <= 1.0 {
        base + n * epsilon.ln_1p()
    } else {
        base
    }
}

/// Natural log of `n^(alpha n (1 - 1/(k n^alpha ln n)))`, the randomized
/// bound when `d = n^alpha`.
pub fn bound_variable_domain_ppsz(n: f64, alpha: f64, k: u32) -> f64 {
    let trivial = alpha * n * n.ln();
    trivial - alpha * n / (k as f64 * n.powf(alpha))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub d: u32,
    pub k: u32,
    pub lambda: f64,
    pub dpll_base: f64,
    pub ppsz_base: f64,
    pub smaller: &'static str,
}

/// One row per `(d, k)` pair comparing the two solver bases.
pub fn bound_table(
    d_range: std::ops::RangeInclusive<u32>,
    k_range: std::ops::RangeInclusive<u32>,
) -> Result<Vec<BoundRow>> {
    if d_range.is_empty() || k_range.is_empty() {
        return Err(Error::InvalidParameters("empty d or k range".into()));
    }
    let mut rows = Vec::new();
    for d in d_range {
        for k in k_range.clone() {
            let root = char_root(d, k)?;
            let dpll_base = dpll_bound_base(d, k);
            let ppsz_base = ppsz_bound_base(d, k);
            let smaller = if ppsz_base < dpll_base {
                "ppsz"
            } else if dpll_base < ppsz_base {
                "dpll"
            } else {
                "equal"
            };
            rows.push(BoundRow {
                d,
                k,
                lambda: root.lambda,
                dpll_base,
                ppsz_base,
                smaller,
            });
        }
    }
    Ok(rows)
}
