//! Richardson extrapolation over a step-size ladder.

/// Differences below this are treated as converged to rounding.
const NOISE_FLOOR: f64 = 1e-13;

/// Extrapolates to zero step from values at step `h` (`coarse`) and
/// `h / ratio` (`fine`) for an error of order `order`.
pub fn extrapolate(coarse: f64, fine: f64, ratio: f64, order: f64) -> f64 {
    let r = ratio.powf(order);
    (r * fine - coarse) / (r - 1.0)
}

/// Observed convergence order from three values on a ladder with constant
/// refinement ratio. `None` when the differences sit at rounding level or
/// change sign.
pub fn observed_order(coarse: f64, medium: f64, fine: f64, ratio: f64) -> Option<f64> {
    let e_coarse = coarse - medium;
    let e_fine = medium - fine;
    if e_fine.abs() < NOISE_FLOOR * fine.abs().max(1.0) || e_coarse * e_fine <= 0.0 {
        return None;
    }
    Some((e_coarse / e_fine).ln() / ratio.ln())
}

/// Observed order from errors measured against a reference, for a ladder
/// where each error comes from a step `ratio` times smaller than the last.
pub fn order_from_errors(errors: &[f64], ratio: f64) -> Vec<f64> {
    errors
        .windows(2)
        .map(|w| (w[0] / w[1]).ln() / ratio.ln())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_pure_power_law() {
        let f = |h: f64| 3.0 + 0.7 * h * h;
        let x = extrapolate(f(0.1), f(0.05), 2.0, 2.0);
        assert!((x - 3.0).abs() < 1e-14);
        let p = observed_order(f(0.2), f(0.1), f(0.05), 2.0).unwrap();
        assert!((p - 2.0).abs() < 1e-9);
    }

    #[test]
    fn converged_values_have_no_order() {
        assert_eq!(observed_order(1.0, 1.0, 1.0, 2.0), None);
        assert_eq!(observed_order(1.0, 1.1, 1.0, 2.0), None);
    }

    #[test]
    fn orders_from_errors() {
        let o = order_from_errors(&[4e-4, 1e-4, 2.5e-5], 2.0);
        assert!(o.iter().all(|p| (p - 2.0).abs() < 1e-12));
    }
}
