//! Composite Simpson quadrature on sampled data.

/// Composite Simpson's rule for samples on a (possibly irregular) grid.
///
/// Pairs of adjacent intervals are integrated with the quadratic through
/// their three nodes. When the number of intervals is odd, the final interval
/// is integrated with the quadratic through the last three nodes. Exact for
/// quadratics on any grid.
pub fn simpson(x: &[f64], f: &[f64]) -> f64 {
    assert_eq!(x.len(), f.len(), "abscissae and values must align");
    let n = x.len().saturating_sub(1);
    match n {
        0 => return 0.0,
        1 => return 0.5 * (x[1] - x[0]) * (f[0] + f[1]),
        _ => {}
    }

    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let mut total = 0.0;
    let mut i = 0;
    while i + 1 < n {
        let (h0, h1) = (h[i], h[i + 1]);
        let s = h0 + h1;
        total += s / 6.0
            * ((2.0 - h1 / h0) * f[i] + s * s / (h0 * h1) * f[i + 1] + (2.0 - h0 / h1) * f[i + 2]);
        i += 2;
    }
    if n % 2 == 1 {
        let (h0, h1) = (h[n - 2], h[n - 1]);
        let alpha = (2.0 * h1 * h1 + 3.0 * h1 * h0) / (6.0 * (h0 + h1));
        let beta = (h1 * h1 + 3.0 * h1 * h0) / (6.0 * h0);
        let eta = h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        total += alpha * f[n] + beta * f[n - 1] - eta * f[n - 2];
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_quadratics_on_irregular_grids() {
        let x = [0.0, 0.1, 0.25, 0.3, 0.55, 0.7, 1.0];
        let f: Vec<f64> = x.iter().map(|&t| 3.0 * t * t - t + 2.0).collect();
        // antiderivative t^3 - t^2/2 + 2t on [0, 1]
        assert!((simpson(&x, &f) - 2.5).abs() < 1e-14);
        let f2: Vec<f64> = x[..6].iter().map(|&t| t * t).collect();
        assert!((simpson(&x[..6], &f2) - 0.7f64.powi(3) / 3.0).abs() < 1e-14);
    }

    #[test]
    fn fourth_order_on_uniform_grid() {
        let err = |n: usize| {
            let x: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
            let f: Vec<f64> = x.iter().map(|t| t.exp()).collect();
            (simpson(&x, &f) - (1f64.exp() - 1.0)).abs()
        };
        let ratio = err(16) / err(32);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn degenerate_grids() {
        assert_eq!(simpson(&[0.5], &[3.0]), 0.0);
        assert_eq!(simpson(&[0.0, 2.0], &[1.0, 3.0]), 4.0);
    }
}
