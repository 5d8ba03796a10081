//! Height functions of radial decreasing profiles and the linear
//! interpolation between them, with convexity analyzers for the nonlocal,
//! L^p, W^{1,p}, and potential energies along the interpolation.
//!
//! For a unit-mass radial decreasing f, H(m) is the truncation height under
//! which exactly mass m lies. H is strictly increasing and convex, the
//! interpolation H_t = (1−t)H₀ + tH₁ stays in the class, and several
//! energies become explicit integrals of H' and H''.

use thiserror::Error;

use crate::energy::{gagliardo, KernelSpec};
use crate::radial::{unit_ball_volume, RadialProfile};
use crate::util::{kahan_sum, second_differences, KahanSum};

#[derive(Debug, Error)]
pub enum HeightError {
    #[error("profile mass {0} is not 1 within 1e-3")]
    NotUnitMass(f64),
    #[error("profile is not nonincreasing in the radius")]
    NotDecreasing,
    #[error("height functions must share the dimension and sample count")]
    Mismatch,
    #[error("degenerate second derivative on {0:.1}% of cells")]
    DegenerateHessian(f64),
    #[error("t = {0} outside [0,1]")]
    BadT(f64),
}

/// Height function sampled at the midpoints m_j = (j+1/2)/N of (0,1).
#[derive(Clone, Debug, PartialEq)]
pub struct HeightFunction {
    pub dim: usize,
    pub samples: Vec<f64>,
}

impl HeightFunction {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    #[inline]
    pub fn dm(&self) -> f64 {
        1.0 / self.samples.len() as f64
    }

    pub fn m_grid(&self) -> Vec<f64> {
        let n = self.samples.len() as f64;
        (0..self.samples.len())
            .map(|j| (j as f64 + 0.5) / n)
            .collect()
    }

    /// Central-difference H' (one-sided at the ends).
    pub fn derivative(&self) -> Vec<f64> {
        let h = &self.samples;
        let n = h.len();
        let dm = self.dm();
        (0..n)
            .map(|j| {
                if j == 0 {
                    (h[1] - h[0]) / dm
                } else if j + 1 == n {
                    (h[n - 1] - h[n - 2]) / dm
                } else {
                    (h[j + 1] - h[j - 1]) / (2.0 * dm)
                }
            })
            .collect()
    }

    /// Second differences H'' on interior nodes (ends copied).
    pub fn second_derivative(&self) -> Vec<f64> {
        let h = &self.samples;
        let n = h.len();
        let dm2 = self.dm() * self.dm();
        let mut out = vec![0.0; n];
        for j in 1..n - 1 {
            out[j] = (h[j + 1] - 2.0 * h[j] + h[j - 1]) / dm2;
        }
        out[0] = out[1];
        out[n - 1] = out[n - 2];
        out
    }

    pub fn unit_ball_volume(&self) -> f64 {
        unit_ball_volume(self.dim)
    }
}

/// Validates the profile for height-function construction.
fn validate_profile(f: &RadialProfile) -> Result<(), HeightError> {
    let mass = f.mass();
    if (mass - 1.0).abs() > 1e-3 {
        return Err(HeightError::NotUnitMass(mass));
    }
    if !f.is_nonincreasing(1e-12 * f.max_value().max(1.0)) {
        return Err(HeightError::NotDecreasing);
    }
    Ok(())
}

/// Mass lying under the truncation height h: ∫ min{f, h} dx, exact per cell
/// for the linear interpolant.
fn truncated_mass(f: &RadialProfile, h: f64) -> f64 {
    let step = f.step();
    let n = f.dim as f64;
    let c = unit_ball_volume(f.dim) * n;
    let mut acc = KahanSum::new();
    for j in 0..f.values.len() - 1 {
        let (r0, r1) = (step * j as f64, step * (j + 1) as f64);
        let (v0, v1) = (f.values[j], f.values[j + 1]);
        // Split the cell at the crossing of the level h (profile decreasing).
        let (lo, hi) = (v0.min(v1), v0.max(v1));
        let cell = |a: f64, b: f64, va: f64, vb: f64| -> f64 {
            // ∫_a^b v(r) r^{n-1} dr for linear v
            if b <= a {
                return 0.0;
            }
            match f.dim {
                1 => 0.5 * (va + vb) * (b - a),
                2 => {
                    let slope = (vb - va) / (b - a);
                    va * 0.5 * (b * b - a * a)
                        + slope * ((b * b * b - a * a * a) / 3.0 - a * 0.5 * (b * b - a * a))
                }
                _ => unreachable!(),
            }
        };
        let geom = |a: f64, b: f64| -> f64 {
            // ∫_a^b h r^{n-1} dr
            match f.dim {
                1 => h * (b - a),
                2 => h * 0.5 * (b * b - a * a),
                _ => unreachable!(),
            }
        };
        let contribution = if hi <= h {
            cell(r0, r1, v0, v1)
        } else if lo >= h {
            geom(r0, r1)
        } else {
            // One interior crossing (v strictly monotone across the cell).
            let t = (h - v0) / (v1 - v0);
            let rc = r0 + t * (r1 - r0);
            if v0 > h {
                geom(r0, rc) + cell(rc, r1, h, v1)
            } else {
                cell(r0, rc, v0, h) + geom(rc, r1)
            }
        };
        acc.add(contribution);
    }
    c * acc.value() / n
}

/// H(m): the unique height whose truncated mass equals m, by bisection.
pub fn height_at(f: &RadialProfile, m: f64) -> Result<f64, HeightError> {
    validate_profile(f)?;
    bisect_height(f, m)
}

fn bisect_height(f: &RadialProfile, m: f64) -> Result<f64, HeightError> {
    let mass = f.mass();
    if !(m > 0.0 && m < mass) {
        return Err(HeightError::BadT(m));
    }
    let mut lo = 0.0;
    let mut hi = f.max_value();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if truncated_mass(f, mid) < m {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-10 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Height function of a unit-mass radial decreasing profile on `count`
/// midpoint samples.
pub fn height_function(f: &RadialProfile, count: usize) -> Result<HeightFunction, HeightError> {
    validate_profile(f)?;
    let n = count as f64;
    let mass = f.mass();
    let samples = (0..count)
        .map(|j| bisect_height(f, (j as f64 + 0.5) / n * mass))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(HeightFunction {
        dim: f.dim,
        samples,
    })
}

/// Reconstructs the radial profile from a height function: the radius at
/// mass m is (c_n H'(m))^{−1/n}, and the value there is H(m).
pub fn reconstruct(h: &HeightFunction, r_count: usize) -> RadialProfile {
    let c_n = h.unit_ball_volume();
    let n = h.dim as f64;
    let d = h.derivative();
    // (radius, height) table; radius decreases as m grows.
    let mut pts: Vec<(f64, f64)> = d
        .iter()
        .zip(&h.samples)
        .map(|(&hp, &hv)| ((c_n * hp.max(1e-300)).powf(-1.0 / n), hv))
        .collect();
    pts.reverse(); // now increasing in radius
    // Enforce strict monotonicity in radius for interpolation.
    let mut cleaned: Vec<(f64, f64)> = Vec::with_capacity(pts.len() + 1);
    for (r, v) in pts {
        match cleaned.last() {
            Some(&(rl, _)) if r <= rl => {}
            _ => cleaned.push((r, v)),
        }
    }
    // Extend to the support radius: extrapolate the outermost segment to
    // value zero.
    if cleaned.len() >= 2 {
        let (r1, v1) = cleaned[cleaned.len() - 1];
        let (r0, v0) = cleaned[cleaned.len() - 2];
        let r_supp = if v0 > v1 {
            r1 + v1 * (r1 - r0) / (v0 - v1)
        } else {
            r1 + 1e-12
        };
        cleaned.push((r_supp.max(r1 + 1e-12), 0.0));
    }
    let rmax = cleaned.last().unwrap().0;
    let values = (0..r_count)
        .map(|j| {
            let r = rmax * j as f64 / (r_count - 1) as f64;
            interp_points(&cleaned, r)
        })
        .collect();
    RadialProfile {
        dim: h.dim,
        rmax,
        values,
    }
}

/// Piecewise-linear interpolation over (radius, value) points with linear
/// extrapolation toward r = 0.
fn interp_points(pts: &[(f64, f64)], r: f64) -> f64 {
    let first = pts[0];
    if r <= first.0 {
        // Extrapolate from the two innermost points; clamp below by the
        // innermost value (the profile is nonincreasing).
        if pts.len() >= 2 {
            let (r0, v0) = pts[0];
            let (r1, v1) = pts[1];
            let slope = (v1 - v0) / (r1 - r0);
            return (v0 + slope * (r - r0)).max(v0);
        }
        return first.1;
    }
    let last = pts[pts.len() - 1];
    if r >= last.0 {
        return 0.0;
    }
    match pts.binary_search_by(|p| p.0.partial_cmp(&r).unwrap()) {
        Ok(i) => pts[i].1,
        Err(i) => {
            let (r0, v0) = pts[i - 1];
            let (r1, v1) = pts[i];
            v0 + (v1 - v0) * (r - r0) / (r1 - r0)
        }
    }
}

/// Pointwise linear interpolation of two height functions.
pub fn interpolate_height(
    h0: &HeightFunction,
    h1: &HeightFunction,
    t: f64,
) -> Result<HeightFunction, HeightError> {
    if h0.dim != h1.dim || h0.len() != h1.len() {
        return Err(HeightError::Mismatch);
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(HeightError::BadT(t));
    }
    Ok(HeightFunction {
        dim: h0.dim,
        samples: h0
            .samples
            .iter()
            .zip(&h1.samples)
            .map(|(&a, &b)| (1.0 - t) * a + t * b)
            .collect(),
    })
}

/// Radial profile at parameter t of the height interpolation.
pub fn interpolate(
    h0: &HeightFunction,
    h1: &HeightFunction,
    t: f64,
    r_count: usize,
) -> Result<RadialProfile, HeightError> {
    Ok(reconstruct(&interpolate_height(h0, h1, t)?, r_count))
}

/// ‖f‖_p^p in the height representation: p ∫₀¹ H(m)^{p−1} dm. Exact in H,
/// so the curve t ↦ ‖f_t‖_p^p is affine at p = 2 to machine precision.
pub fn lp_norm_from_height(h: &HeightFunction, p: f64) -> f64 {
    p * h.dm() * kahan_sum(h.samples.iter().map(|&v| v.powf(p - 1.0)))
}

/// W^{1,p} seminorm in the height representation:
/// C_{n,p} ∫₀¹ (H')^{p(2+1/n)−2} (H'')^{1−p} dm with C_{n,p} = n^p c_n^{p/n}.
#[derive(Clone, Debug)]
pub struct W1pValue {
    pub value: f64,
    pub excluded_cells: usize,
}

pub fn w1p_from_height(h: &HeightFunction, p: f64) -> Result<W1pValue, HeightError> {
    assert!(p > 1.0);
    let n = h.dim as f64;
    let c_np = n.powf(p) * h.unit_ball_volume().powf(p / n);
    let d1 = h.derivative();
    let d2 = h.second_derivative();
    let k = p * (2.0 + 1.0 / n) - 2.0;
    let mut acc = KahanSum::new();
    let mut excluded = 0usize;
    for j in 0..h.len() {
        if d2[j] <= 0.0 {
            excluded += 1;
            continue;
        }
        acc.add(d1[j].powf(k) * d2[j].powf(1.0 - p));
    }
    if excluded as f64 > 0.05 * h.len() as f64 {
        return Err(HeightError::DegenerateHessian(
            100.0 * excluded as f64 / h.len() as f64,
        ));
    }
    Ok(W1pValue {
        value: c_np * h.dm() * acc.value(),
        excluded_cells: excluded,
    })
}

/// Potential energy ∫ V(|x|) f dx in the height representation.
pub fn potential_from_height(h: &HeightFunction, v: &dyn Fn(f64) -> f64) -> f64 {
    let c_n = h.unit_ball_volume();
    let n = h.dim as f64;
    let d1 = h.derivative();
    let mut acc = KahanSum::new();
    for &hp in &d1 {
        let xi = (c_n * hp.max(1e-300)).powf(-1.0 / n);
        // F_V(ξ) = n c_n ∫₀^ξ v(r) r^{n−1} dr by 64-panel Simpson.
        let fv = radial_antiderivative(v, xi, h.dim);
        acc.add(fv * hp);
    }
    h.dm() * acc.value()
}

fn radial_antiderivative(v: &dyn Fn(f64) -> f64, xi: f64, dim: usize) -> f64 {
    let n = dim as f64;
    let c_n = unit_ball_volume(dim);
    let panels = 64usize;
    let w = xi / panels as f64;
    let mut acc = 0.0;
    for k in 0..panels {
        let a = w * k as f64;
        let b = a + w;
        let m = 0.5 * (a + b);
        let g = |r: f64| v(r) * r.powf(n - 1.0);
        acc += w / 6.0 * (g(a) + 4.0 * g(m) + g(b));
    }
    n * c_n * acc
}

/// First and second t-derivatives of the potential energy along the
/// interpolation, in closed form.
pub fn potential_convexity(
    h0: &HeightFunction,
    h1: &HeightFunction,
    v: &dyn Fn(f64) -> f64,
    v_prime: &dyn Fn(f64) -> f64,
    t: f64,
) -> Result<(f64, f64), HeightError> {
    let ht = interpolate_height(h0, h1, t)?;
    let c_n = ht.unit_ball_volume();
    let n = ht.dim as f64;
    let d = ht.derivative();
    let d0 = h0.derivative();
    let d1 = h1.derivative();
    let mut first = KahanSum::new();
    let mut second = KahanSum::new();
    for j in 0..ht.len() {
        let hp = d[j].max(1e-300);
        let xi = (c_n * hp).powf(-1.0 / n);
        let diff = d1[j] - d0[j];
        let fv = radial_antiderivative(v, xi, ht.dim);
        first.add((-v(xi) / hp + fv) * diff);
        second.add(v_prime(xi) / (c_n.powf(1.0 / n) * n) * hp.powf(-2.0 - 1.0 / n) * diff * diff);
    }
    Ok((ht.dm() * first.value(), ht.dm() * second.value()))
}

/// Functional evaluated along the interpolation curve.
#[derive(Clone, Copy, Debug)]
pub enum CurveFunctional {
    /// ‖f_t‖²_{H^s} via grid quadrature of the reconstruction.
    Hs { s: f64 },
    /// ‖f_t‖_p^p in the height representation.
    Lp { p: f64 },
    /// W^{1,p} seminorm in the height representation.
    W1p { p: f64 },
    /// ∫ |x|² f_t in the height representation.
    PotentialQuadratic,
}

/// Discretization of the Hs curve evaluation.
#[derive(Clone, Copy, Debug)]
pub struct CurveParams {
    pub grid_count: usize,
    pub reconstruct_count: usize,
}

impl Default for CurveParams {
    fn default() -> Self {
        Self {
            grid_count: 1025,
            reconstruct_count: 1024,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CurveReport {
    pub ts: Vec<f64>,
    pub values: Vec<f64>,
    pub second_diffs: Vec<f64>,
    pub min_second_diff: f64,
}

/// Values of a functional along the height interpolation with centered
/// second differences.
pub fn convexity_curve(
    h0: &HeightFunction,
    h1: &HeightFunction,
    functional: CurveFunctional,
    ts: &[f64],
    params: &CurveParams,
) -> Result<CurveReport, HeightError> {
    let mut values = Vec::with_capacity(ts.len());
    for &t in ts {
        let v = match functional {
            CurveFunctional::Hs { s } => {
                let f = interpolate(h0, h1, t, params.reconstruct_count)?;
                let spec = KernelSpec::new(s, 2.0, 0.0, f.dim);
                let g = match f.dim {
                    1 => f.to_grid_1d(params.grid_count, 0.5),
                    2 => f.to_grid_2d(params.grid_count.min(129), 0.5),
                    _ => unreachable!(),
                };
                gagliardo(&g, &spec)
                    .map_err(|_| HeightError::Mismatch)?
                    .value
            }
            CurveFunctional::Lp { p } => lp_norm_from_height(&interpolate_height(h0, h1, t)?, p),
            CurveFunctional::W1p { p } => w1p_from_height(&interpolate_height(h0, h1, t)?, p)?.value,
            CurveFunctional::PotentialQuadratic => {
                potential_from_height(&interpolate_height(h0, h1, t)?, &|r| r * r)
            }
        };
        values.push(v);
    }
    let second_diffs = second_differences(&values);
    let min_second_diff = second_diffs.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(CurveReport {
        ts: ts.to_vec(),
        values,
        second_diffs,
        min_second_diff,
    })
}

/// Uniform t-grid on [0, 1].
pub fn t_grid(steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|k| k as f64 / (steps - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn triangle_height_closed_form() {
        let f = fixtures::triangle_radial(4097);
        // H(m) = 1 − √(1−m)
        for m in [0.1, 0.35, 0.75, 0.9] {
            let h = height_at(&f, m).unwrap();
            let exact = 1.0 - (1.0 - m).sqrt();
            assert!((h - exact).abs() < 1e-6, "m={m}: {h} vs {exact}");
        }
        // Slope near m = 0 approaches 1/|{f>0}| = 1/2.
        let h1 = height_at(&f, 1e-4).unwrap();
        let h2 = height_at(&f, 2e-4).unwrap();
        let slope = (h2 - h1) / 1e-4;
        assert!((slope - 0.5).abs() < 1e-3, "{slope}");
    }

    #[test]
    fn rejects_bad_profiles() {
        let too_heavy = crate::radial::RadialProfile::from_fn(1, 1.0, 257, |r| 2.0 * (1.0 - r));
        assert!(matches!(
            height_function(&too_heavy, 64),
            Err(HeightError::NotUnitMass(_))
        ));
        let bumpy = crate::radial::RadialProfile::new(
            1,
            1.0,
            vec![0.5, 0.2, 0.9, 0.0],
        )
        .unwrap();
        assert!(matches!(
            height_function(&bumpy, 64),
            Err(HeightError::NotDecreasing)
        ));
    }

    #[test]
    fn height_function_is_increasing_and_convex() {
        for f in [fixtures::triangle_radial(4097), fixtures::parabola_radial(4097)] {
            let h = height_function(&f, 512).unwrap();
            assert!(h.samples.windows(2).all(|w| w[1] > w[0]));
            let d2 = second_differences(&h.samples);
            let scale = h.samples.last().unwrap();
            assert!(d2.iter().all(|&v| v >= -1e-9 * scale));
        }
    }

    #[test]
    fn round_trip_reconstruction() {
        let f = fixtures::triangle_radial(4097);
        let h = height_function(&f, 1024).unwrap();
        let g = reconstruct(&h, 2048);
        // Compare on a common radius set.
        let mut worst = 0.0f64;
        for k in 0..1000 {
            let r = 1.05 * k as f64 / 999.0;
            worst = worst.max((f.eval(r) - g.eval(r)).abs());
        }
        assert!(worst <= 1e-3, "max round-trip error {worst}");
        assert!((g.mass() - 1.0).abs() <= 1e-3);
        assert!(g.is_nonincreasing(1e-12));
    }

    #[test]
    fn interpolation_endpoints_and_mass() {
        let f0 = fixtures::triangle_radial(4097);
        let f1 = fixtures::parabola_radial(4097);
        let h0 = height_function(&f0, 1024).unwrap();
        let h1 = height_function(&f1, 1024).unwrap();
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let ft = interpolate(&h0, &h1, t, 2048).unwrap();
            assert!((ft.mass() - 1.0).abs() <= 1e-3, "t={t}: {}", ft.mass());
        }
        let end0 = interpolate(&h0, &h1, 0.0, 2048).unwrap();
        let mut worst = 0.0f64;
        for k in 0..500 {
            let r = k as f64 / 499.0;
            worst = worst.max((end0.eval(r) - f0.eval(r)).abs());
        }
        assert!(worst <= 1.5e-3, "{worst}");
        // Equal endpoints give a t-independent curve.
        let same = interpolate(&h0, &h0, 0.37, 1024).unwrap();
        let base = interpolate(&h0, &h0, 0.0, 1024).unwrap();
        assert_eq!(same, base);
    }

    #[test]
    fn lp_trichotomy_along_interpolation() {
        let f0 = fixtures::triangle_radial(4097);
        let f1 = fixtures::parabola_radial(4097);
        let h0 = height_function(&f0, 1024).unwrap();
        let h1 = height_function(&f1, 1024).unwrap();
        let ts = t_grid(21);
        let params = CurveParams::default();
        let lo = convexity_curve(&h0, &h1, CurveFunctional::Lp { p: 1.5 }, &ts, &params).unwrap();
        assert!(lo.second_diffs.iter().all(|&d| d < 0.0));
        let flat = convexity_curve(&h0, &h1, CurveFunctional::Lp { p: 2.0 }, &ts, &params).unwrap();
        let scale = flat.values.iter().cloned().fold(0.0, f64::max);
        assert!(flat.second_diffs.iter().all(|&d| d.abs() <= 1e-6 * scale));
        let hi = convexity_curve(&h0, &h1, CurveFunctional::Lp { p: 3.0 }, &ts, &params).unwrap();
        assert!(hi.second_diffs.iter().all(|&d| d > 0.0));
    }

    #[test]
    fn triangle_w1p_closed_form() {
        let f = fixtures::triangle_radial(4097);
        let h = height_function(&f, 1024).unwrap();
        let w = w1p_from_height(&h, 2.0).unwrap();
        assert!((w.value - 2.0).abs() <= 0.02, "{}", w.value);
    }

    #[test]
    fn w1p_convexity_above_threshold() {
        let pairs: [(usize, f64); 3] = [(1, 2.0), (2, 1.5), (2, 2.0)];
        for (dim, p) in pairs {
            let (f0, f1) = if dim == 1 {
                (fixtures::triangle_radial(4097), fixtures::parabola_radial(4097))
            } else {
                (fixtures::cone_radial_2d(4097), fixtures::paraboloid_radial_2d(4097))
            };
            let h0 = height_function(&f0, 512).unwrap();
            let h1 = height_function(&f1, 512).unwrap();
            let ts = t_grid(21);
            let curve = convexity_curve(
                &h0,
                &h1,
                CurveFunctional::W1p { p },
                &ts,
                &CurveParams::default(),
            )
            .unwrap();
            let scale = curve.values.iter().cloned().fold(0.0, f64::max);
            assert!(
                curve.min_second_diff >= -1e-8 * scale,
                "dim={dim} p={p}: {}",
                curve.min_second_diff
            );
            // A priori bound: the interior never exceeds the endpoints.
            let maxv = curve.values.iter().cloned().fold(f64::MIN, f64::max);
            let ends = curve.values[0].max(*curve.values.last().unwrap());
            assert!(maxv <= ends + 1e-6 * scale);
        }
    }

    #[test]
    fn potential_convexity_closed_form_vs_differences() {
        let f0 = fixtures::triangle_radial(4097);
        let f1 = fixtures::parabola_radial(4097);
        let h0 = height_function(&f0, 1024).unwrap();
        let h1 = height_function(&f1, 1024).unwrap();
        // Degenerate cases first.
        let (_, zero) = potential_convexity(&h0, &h0, &|r| r * r, &|r| 2.0 * r, 0.4).unwrap();
        assert_eq!(zero, 0.0);
        let (_, flat) = potential_convexity(&h0, &h1, &|_| 1.0, &|_| 0.0, 0.4).unwrap();
        assert_eq!(flat, 0.0);

        let (_, d2) = potential_convexity(&h0, &h1, &|r| r * r, &|r| 2.0 * r, 0.5).unwrap();
        assert!(d2 > 0.0);
        let dt = 0.05;
        let e = |t: f64| {
            potential_from_height(&interpolate_height(&h0, &h1, t).unwrap(), &|r| r * r)
        };
        let fd = (e(0.5 + dt) - 2.0 * e(0.5) + e(0.5 - dt)) / (dt * dt);
        assert!((d2 - fd).abs() <= 0.05 * fd.abs(), "{d2} vs {fd}");
    }
}
