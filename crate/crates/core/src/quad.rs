//! Adaptive quadrature and cached antiderivative tables.

/// Adaptive Simpson on [a, b] with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    simpson_rec(f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 50)
}

#[inline]
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// First and second antiderivatives of an even, nonnegative kernel k(r),
/// tabulated on [0, rmax] and interpolated with cubic Hermite segments.
///
/// `first(r)` is extended oddly and `second(r)` evenly, matching the parity
/// of ∫₀^r k and ∫₀^r∫₀^ρ k for even k.
pub struct AntiderivativeTable {
    rmax: f64,
    step: f64,
    // values of k, K̄ = ∫k, K̄̄ = ∫K̄ at uniform nodes
    k: Vec<f64>,
    first: Vec<f64>,
    second: Vec<f64>,
}

impl AntiderivativeTable {
    /// Build by adaptive integration of `k` over each node interval.
    /// Relative accuracy of the nodes is driven by `tol` (absolute per cell).
    pub fn build(k: &dyn Fn(f64) -> f64, rmax: f64, nodes: usize, tol: f64) -> Self {
        assert!(rmax > 0.0 && nodes >= 8);
        let step = rmax / (nodes - 1) as f64;
        let mut kv = Vec::with_capacity(nodes);
        let mut first = Vec::with_capacity(nodes);
        let mut second = Vec::with_capacity(nodes);
        let mut acc1 = 0.0;
        let mut acc2 = 0.0;
        kv.push(k(0.0));
        first.push(0.0);
        second.push(0.0);
        for i in 1..nodes {
            let a = step * (i - 1) as f64;
            let b = step * i as f64;
            let cell1 = adaptive_simpson(k, a, b, tol);
            // ∫_a^b K̄(ρ) dρ with K̄(ρ) = acc1 + ∫_a^ρ k
            let cell2 = acc1 * step + adaptive_simpson(&|x| adaptive_simpson(k, a, x, tol), a, b, tol);
            acc1 += cell1;
            acc2 += cell2;
            kv.push(k(b));
            first.push(acc1);
            second.push(acc2);
        }
        Self {
            rmax,
            step,
            k: kv,
            first,
            second,
        }
    }

    pub fn rmax(&self) -> f64 {
        self.rmax
    }

    /// K̄(r) = ∫₀^r k, extended as an odd function.
    #[inline]
    pub fn first(&self, r: f64) -> f64 {
        let a = r.abs();
        let v = self.eval(a, &self.first, &self.k);
        if r < 0.0 {
            -v
        } else {
            v
        }
    }

    /// K̄̄(r) = ∫₀^r K̄, extended as an even function.
    #[inline]
    pub fn second(&self, r: f64) -> f64 {
        let a = r.abs();
        self.eval(a, &self.second, &self.first)
    }

    /// Hermite interpolation using the exact derivative table (`deriv` is the
    /// derivative of `vals` at the nodes).
    #[inline]
    fn eval(&self, r: f64, vals: &[f64], deriv: &[f64]) -> f64 {
        debug_assert!(r >= 0.0);
        if r >= self.rmax {
            // Linear continuation; callers keep arguments inside the table.
            let n = vals.len() - 1;
            return vals[n] + deriv[n] * (r - self.rmax);
        }
        let x = r / self.step;
        let i = (x as usize).min(vals.len() - 2);
        let t = x - i as f64;
        let h = self.step;
        let (v0, v1) = (vals[i], vals[i + 1]);
        let (d0, d1) = (deriv[i] * h, deriv[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        v0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + d0 * (t3 - 2.0 * t2 + t)
            + v1 * (-2.0 * t3 + 3.0 * t2)
            + d1 * (t3 - t2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_polynomial_exactly() {
        let v = adaptive_simpson(&|x| x * x * x - x, 0.0, 2.0, 1e-12);
        assert!((v - (4.0 - 2.0)).abs() < 1e-10);
    }

    #[test]
    fn antiderivative_table_matches_closed_form() {
        // k(r) = 1/(1+r^2): K̄ = atan r, K̄̄ = r atan r - ln(1+r^2)/2
        let t = AntiderivativeTable::build(&|r| 1.0 / (1.0 + r * r), 10.0, 2001, 1e-12);
        for &r in &[0.0, 0.3, 1.0, 2.5, 7.9] {
            assert!((t.first(r) - r.atan()).abs() < 1e-9, "first at {r}");
            let exact = r * r.atan() - 0.5 * (1.0 + r * r).ln();
            assert!((t.second(r) - exact).abs() < 1e-8, "second at {r}");
        }
        assert!((t.first(-1.0) + 1.0f64.atan()).abs() < 1e-9);
        assert!((t.second(-1.0) - t.second(1.0)).abs() < 1e-12);
    }
}
