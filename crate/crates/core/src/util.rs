//! Small numeric helpers shared across modules.

/// Compensated (Kahan) accumulator. Sums are accumulated in a fixed order so
/// reports stay bit-stable regardless of thread count.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Sum with compensation in slice order.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = KahanSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Least-squares fit of `values ~ a + b * basis` (two-parameter linear model).
/// Returns (a, b).
pub fn fit_affine(basis: &[f64], values: &[f64]) -> (f64, f64) {
    assert_eq!(basis.len(), values.len());
    let n = basis.len() as f64;
    let sx = kahan_sum(basis.iter().copied());
    let sy = kahan_sum(values.iter().copied());
    let sxx = kahan_sum(basis.iter().map(|x| x * x));
    let sxy = kahan_sum(basis.iter().zip(values).map(|(x, y)| x * y));
    let det = n * sxx - sx * sx;
    if det == 0.0 {
        return (sy / n, 0.0);
    }
    let b = (n * sxy - sx * sy) / det;
    let a = (sy - b * sx) / n;
    (a, b)
}

/// Relative difference |a - b| / max(|a|, |b|, floor).
pub fn rel_diff(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

/// Centered second differences of a sampled curve (length n-2).
pub fn second_differences(values: &[f64]) -> Vec<f64> {
    if values.len() < 3 {
        return Vec::new();
    }
    values
        .windows(3)
        .map(|w| w[2] - 2.0 * w[1] + w[0])
        .collect()
}

/// Global rayon pool honoring the REARRANGE_THREADS cap. Falls back to the
/// default pool when the variable is unset or unparsable.
pub fn install_thread_cap() {
    if let Ok(v) = std::env::var("REARRANGE_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n >= 1 {
                // Ignore the error if a global pool is already installed.
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_handles_cancellation() {
        let mut s = KahanSum::new();
        for _ in 0..1_000_000 {
            s.add(0.1);
        }
        assert!((s.value() - 100_000.0).abs() < 1e-9);
    }

    #[test]
    fn affine_fit_recovers_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let (a, b) = fit_affine(&xs, &ys);
        assert!((a - 1.0).abs() < 1e-12);
        assert!((b - 2.0).abs() < 1e-12);
    }
}
