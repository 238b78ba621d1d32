//! Small fitting helpers.

/// Least-squares line `y ≈ slope·x + intercept`; `None` for fewer than two
/// distinct abscissae.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs[..n].iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs[..n].iter().zip(&ys[..n]).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Slope of `log err` against `log h`; `None` if any value is not positive.
pub fn loglog_order(hs: &[f64], errs: &[f64]) -> Option<f64> {
    if hs.iter().chain(errs).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ly: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    least_squares(&lx, &ly).map(|(s, _)| s)
}

/// Median of all pairwise slopes.
pub fn theil_sen(ts: &[f64], ys: &[f64]) -> Option<f64> {
    let n = ts.len().min(ys.len());
    let mut slopes = Vec::with_capacity(n * n / 2);
    for i in 0..n {
        for j in i + 1..n {
            if ts[j] != ts[i] {
                slopes.push((ys[j] - ys[i]) / (ts[j] - ts[i]));
            }
        }
    }
    if slopes.is_empty() {
        return None;
    }
    slopes.sort_by(|a, b| a.total_cmp(b));
    let m = slopes.len();
    Some(if m % 2 == 1 { slopes[m / 2] } else { 0.5 * (slopes[m / 2 - 1] + slopes[m / 2]) })
}

pub fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}
