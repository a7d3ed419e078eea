//! Small numerical kernels shared by the pricing modules.

/// `log(sum(exp(x_i)))`, shifted by the maximum so that large or tiny
/// exponents neither overflow nor underflow.
///
/// Returns `-inf` for an empty slice or when every entry is `-inf`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.iter().map(|&v| (v - max).exp()).sum::<f64>().ln()
}

/// Normalized weights `exp(x_i) / sum_k exp(x_k)` computed in shifted form.
pub fn softmax(log_weights: &[f64]) -> Vec<f64> {
    let max = log_weights
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = log_weights.iter().map(|&v| (v - max).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Weighted average of `values` with weights proportional to `exp(log_weights)`.
pub fn log_weighted_mean(log_weights: &[f64], values: &[f64]) -> f64 {
    debug_assert_eq!(log_weights.len(), values.len());
    softmax(log_weights)
        .iter()
        .zip(values)
        .map(|(w, v)| w * v)
        .sum()
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Bisection on a bracket `[lo, hi]` with `f(lo)` and `f(hi)` of opposite
/// signs. Stops when the bracket is narrower than `tol` (or no longer
/// shrinks in floating point), then takes one false-position step inside
/// the final bracket, which is exact for locally linear `f`.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if f_lo == 0.0 {
        return lo;
    }
    if f_hi == 0.0 {
        return hi;
    }
    debug_assert!(
        f_lo.signum() != f_hi.signum(),
        "bisect: bracket does not straddle a root"
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    let secant = lo - f_lo * (hi - lo) / (f_hi - f_lo);
    if secant.is_finite() && secant >= lo && secant <= hi {
        secant
    } else {
        0.5 * (lo + hi)
    }
}
