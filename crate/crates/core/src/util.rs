//! Small numeric helpers used throughout the crate.

/// `exp(-1/t)` for `t > 0`, zero otherwise. Building block of the smooth step.
fn half_bump(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth transition `rho` on `[0, 1]`: `rho(t) = h(t) / (h(t) + h(1-t))`
/// with `h(t) = exp(-1/t)`.
///
/// `rho(t) + rho(1-t) = 1` holds to a couple of ulps because both branches
/// share the commuted denominator sum.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = half_bump(t);
    let b = half_bump(1.0 - t);
    a / (a + b)
}

/// Japanese bracket `<x> = (1 + |x|^2)^(1/2)` of a scalar.
pub fn japanese_bracket(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// Japanese bracket of a point in R^d.
pub fn japanese_bracket_vec(x: &[f64]) -> f64 {
    let norm2: f64 = x.iter().map(|v| v * v).sum();
    (1.0 + norm2).sqrt()
}

/// Exact power of two as f64 (`2^e`), valid for |e| within f64 exponent range.
pub fn pow2(e: i64) -> f64 {
    f64::powi(2.0, e as i32)
}

/// Conjugate exponent `p' = p / (p - 1)`; `p = 1` maps to infinity.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p <= 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// Relative deviation |a - b| / max(|a|, |b|), zero when both vanish.
pub fn rel_dev(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

/// Least-squares slope of `y` against `x`.
pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    assert!(n >= 2.0, "slope fit needs at least two points");
    let mx: f64 = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my: f64 = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for &(x, y) in points {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// l^p aggregation `(sum v_i^p)^(1/p)` of non-negative entries.
pub fn lp_aggregate(values: impl IntoIterator<Item = f64>, p: f64) -> f64 {
    let sum: f64 = values.into_iter().map(|v| v.powf(p)).sum();
    sum.powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_step_endpoints() {
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert_eq!(smooth_step(-0.3), 0.0);
        assert_eq!(smooth_step(1.7), 1.0);
        assert_eq!(smooth_step(0.5), 0.5);
    }

    #[test]
    fn smooth_step_complement() {
        for i in 0..=200 {
            let t = i as f64 / 200.0;
            let s = smooth_step(t) + smooth_step(1.0 - t);
            assert!((s - 1.0).abs() <= 1e-15, "t={t}: {s}");
        }
    }

    #[test]
    fn bracket_basics() {
        assert_eq!(japanese_bracket(0.0), 1.0);
        for &x in &[0.1, 1.0, -3.0, 250.0] {
            let b = japanese_bracket(x);
            assert!(b >= 1.0 && b >= x.abs());
        }
        assert_eq!(japanese_bracket_vec(&[0.0, 0.0]), 1.0);
    }

    #[test]
    fn slope_of_line() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 3.5 * i as f64 - 1.0)).collect();
        assert!((least_squares_slope(&pts) - 3.5).abs() < 1e-12);
    }
}
