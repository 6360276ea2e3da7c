//! Overflow-safe logistic primitives shared by the model and sampler.

/// 1 / (1 + e^{-x}).
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// ln sigmoid(x) = −softplus(−x), finite for all finite x.
pub fn ln_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// Inverse of `sigmoid` on (0, 1).
pub fn logit(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    (p / (1.0 - p)).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_and_tails() {
        for p in [1e-12, 0.3, 0.5, 0.999_999] {
            assert!((sigmoid(logit(p)) - p).abs() < 1e-12 * p.max(1e-3));
        }
        assert!((logit(0.8) - 1.3862943611198906).abs() < 1e-12);
        assert_eq!(sigmoid(800.0), 1.0);
        assert!(sigmoid(-800.0) > 0.0 || sigmoid(-800.0) == 0.0);
        assert!(ln_sigmoid(-800.0).is_finite());
        assert!((ln_sigmoid(-800.0) + 800.0).abs() < 1e-9);
        assert!(ln_sigmoid(800.0).abs() < 1e-300);
    }
}
