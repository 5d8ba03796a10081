//! Stationary-state toolkit for the fractional thin-film rescaled flow:
//! the explicit compactly supported profile, its normalization constant,
//! the self-similar rescaling exponents, the stationarity residual check,
//! and the descent experiment along truncated symmetrization.

use statrs::function::gamma::gamma;
use thiserror::Error;

use crate::energy::{frac_laplacian_radial, thin_film_energy, EnergyError, KernelSpec};
use crate::grid::GridFunction;
use crate::radial::RadialProfile;
use crate::symmetrize::{
    steiner_truncated, support_cells, SteinerParams, SymAxis, SymmetrizeError, TruncationSpec,
};
use crate::util::fit_affine;

#[derive(Debug, Error)]
pub enum ThinFilmError {
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Symmetrize(#[from] SymmetrizeError),
}

/// κ(s, n) = 4^s Γ(s+2) Γ(s+n/2) / Γ(n/2).
pub fn kappa(s: f64, dim: usize) -> f64 {
    let n = dim as f64;
    4f64.powf(s) * gamma(s + 2.0) * gamma(s + 0.5 * n) / gamma(0.5 * n)
}

/// The compactly supported stationary profile
/// v(x) = λ^{−s} κ^{−1} (1 − λ|x|²)_+^{1+s}.
#[derive(Clone, Debug)]
pub struct StationaryProfile {
    pub lambda: f64,
    pub s: f64,
    pub dim: usize,
    pub profile: RadialProfile,
}

pub fn explicit_solution(lambda: f64, s: f64, dim: usize, count: usize) -> StationaryProfile {
    assert!(lambda > 0.0 && s > 0.0 && s < 1.0);
    let k = kappa(s, dim);
    let radius = lambda.powf(-0.5);
    let amp = lambda.powf(-s) / k;
    let profile = RadialProfile::from_fn(dim, radius, count, |r| {
        let t = 1.0 - lambda * r * r;
        if t <= 0.0 {
            0.0
        } else {
            amp * t.powf(1.0 + s)
        }
    });
    StationaryProfile {
        lambda,
        s,
        dim,
        profile,
    }
}

/// Self-similar rescaling exponents α = n/(n+2(1+s)), β = 1/(n+2(1+s)).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RescalingExponents {
    pub alpha: f64,
    pub beta: f64,
}

pub fn barenblatt_exponents(dim: usize, s: f64) -> RescalingExponents {
    let n = dim as f64;
    let d = n + 2.0 * (1.0 + s);
    RescalingExponents {
        alpha: n / d,
        beta: 1.0 / d,
    }
}

/// Quadratic fit of (−Δ)^s v inside the support.
#[derive(Clone, Debug)]
pub struct StationaryFit {
    /// Constant term of the fit (the Lagrange-multiplier estimate).
    pub multiplier: f64,
    /// Coefficient of |x|²; −β/2 after consistent mass normalization.
    pub curvature: f64,
    /// Relative L² residual of the quadratic fit on the sample points.
    pub relative_residual: f64,
}

/// Evaluates (−Δ)^s v on |x| ≤ 0.8·(support radius) and fits a + b|x|².
/// The assertion-worthy quantity is the fit residual: the profile is
/// stationary exactly when the fractional Laplacian is quadratic inside
/// the support.
pub fn stationary_residual(v: &StationaryProfile) -> Result<StationaryFit, ThinFilmError> {
    stationary_residual_of(&v.profile, v.s)
}

/// Same fit for an arbitrary radial profile (perturbation contrast checks).
pub fn stationary_residual_of(
    profile: &RadialProfile,
    s: f64,
) -> Result<StationaryFit, ThinFilmError> {
    let radius = profile.support_radius();
    let pts: Vec<f64> = (0..17).map(|k| 0.8 * radius * k as f64 / 16.0).collect();
    let vals = frac_laplacian_radial(profile, s, &pts)?;
    let basis: Vec<f64> = pts.iter().map(|&x| x * x).collect();
    let (a, b) = fit_affine(&basis, &vals);
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (x2, v) in basis.iter().zip(&vals) {
        let fit = a + b * x2;
        ss_res += (v - fit) * (v - fit);
        ss_tot += v * v;
    }
    Ok(StationaryFit {
        multiplier: a,
        curvature: b,
        relative_residual: (ss_res / ss_tot.max(f64::MIN_POSITIVE)).sqrt(),
    })
}

/// One τ sample of the descent experiment.
#[derive(Clone, Debug)]
pub struct DescentPoint {
    pub tau: f64,
    pub energy: f64,
    pub support_preserved: bool,
    /// Max relative mass drift over connected support components.
    pub component_mass_error: f64,
    pub clipped_spans: usize,
}

#[derive(Clone, Debug)]
pub struct DescentReport {
    pub points: Vec<DescentPoint>,
    /// Energy at τ = 0 evaluated through the same reconstruction.
    pub base_energy: f64,
    /// Estimated quadrature error of the energy values.
    pub energy_error: f64,
}

/// Energy of the truncated symmetrization along a τ grid, with per-τ
/// support and per-component mass checks. Support is compared against the
/// τ = 0 reconstruction so the check isolates the motion.
pub fn descent_experiment(
    v: &GridFunction,
    spec: &KernelSpec,
    beta: f64,
    trunc: &TruncationSpec,
    taus: &[f64],
    params: &SteinerParams,
) -> Result<DescentReport, ThinFilmError> {
    let base = steiner_truncated(v, 0.0, trunc, SymAxis::Last, params)?;
    let base_energy = thin_film_energy(&base.grid, spec, beta)?;
    let base_support = support_cells(&base.grid);
    let base_masses = component_masses(&base.grid);
    // Energy quadrature error estimated by halving the height resolution.
    let coarse = steiner_truncated(v, 0.0, trunc, SymAxis::Last, &SteinerParams::new(params.heights / 2))?;
    let energy_error = (thin_film_energy(&coarse.grid, spec, beta)? - base_energy).abs();
    let mut points = Vec::with_capacity(taus.len());
    for &tau in taus {
        let r = steiner_truncated(v, tau, trunc, SymAxis::Last, params)?;
        let energy = thin_film_energy(&r.grid, spec, beta)?;
        let support_preserved = support_cells(&r.grid) == base_support;
        let masses = component_masses(&r.grid);
        let component_mass_error = if masses.len() == base_masses.len() {
            masses
                .iter()
                .zip(&base_masses)
                .map(|(a, b)| (a - b).abs() / b.max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        points.push(DescentPoint {
            tau,
            energy,
            support_preserved,
            component_mass_error,
            clipped_spans: r.clipped_spans,
        });
    }
    Ok(DescentReport {
        points,
        base_energy,
        energy_error,
    })
}

/// Masses of the connected components of the support (1D grids).
pub fn component_masses(f: &GridFunction) -> Vec<f64> {
    assert_eq!(f.dim(), 1, "component masses are tracked on 1D grids");
    let step = f.axis(0).step();
    let mut out = Vec::new();
    let mut current = 0.0;
    let mut inside = false;
    for &v in f.samples() {
        if v > 0.0 {
            current += v * step;
            inside = true;
        } else if inside {
            out.push(current);
            current = 0.0;
            inside = false;
        }
    }
    if inside {
        out.push(current);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn kappa_values() {
        assert!((kappa(0.5, 1) - 1.5).abs() < 1e-12);
        assert!((kappa(1e-9, 1) - 1.0).abs() < 1e-6);
        // Continuity in s on a grid.
        let mut prev = kappa(0.05, 2);
        for k in 1..19 {
            let s = 0.05 + 0.05 * k as f64;
            let v = kappa(s, 2);
            assert!((v - prev).abs() < 0.6, "jump at s={s}");
            prev = v;
        }
    }

    #[test]
    fn explicit_solution_shape() {
        let sp = explicit_solution(1.0, 0.25, 1, 2049);
        let k = kappa(0.25, 1);
        assert!((sp.profile.eval(0.0) - 1.0 / k).abs() < 1e-9);
        assert!((sp.profile.support_radius() - 1.0).abs() < 2.0 * sp.profile.step());
        // Doubling λ shrinks the support by √2 and the amplitude by 2^{−s}.
        let sp2 = explicit_solution(2.0, 0.25, 1, 2049);
        assert!(
            (sp2.profile.support_radius() - 1.0 / 2f64.sqrt()).abs()
                < 2.0 * sp2.profile.step()
        );
        assert!(
            (sp2.profile.eval(0.0) - 2f64.powf(-0.25) / k).abs() < 1e-9
        );
    }

    #[test]
    fn barenblatt_exponent_values() {
        let e = barenblatt_exponents(1, 0.5);
        assert!((e.alpha - 0.25).abs() < 1e-15 && (e.beta - 0.25).abs() < 1e-15);
        let e = barenblatt_exponents(2, 0.25);
        assert!((e.alpha - 4.0 / 9.0).abs() < 1e-15);
        assert!((e.beta - 2.0 / 9.0).abs() < 1e-15);
        for (dim, s) in [(1, 0.1), (1, 0.7), (2, 0.33)] {
            let e = barenblatt_exponents(dim, s);
            assert!((e.alpha - dim as f64 * e.beta).abs() < 1e-15);
        }
    }

    #[test]
    fn stationary_fit_is_quadratic_and_sensitive() {
        let sp = explicit_solution(1.0, 0.25, 1, 8193);
        let fit = stationary_residual(&sp).unwrap();
        assert!(fit.relative_residual <= 1e-2, "{}", fit.relative_residual);
        assert!(fit.curvature < 0.0);

        // A bump perturbation must degrade the fit by a wide margin.
        let perturbed = RadialProfile::from_fn(1, 1.0, 8193, |r| {
            let base = sp.profile.eval(r);
            let bump = 0.05 * (1.0 - ((r - 0.4) / 0.15).powi(2)).max(0.0);
            base + bump * sp.profile.eval(0.0)
        });
        let pfit = stationary_residual_of(&perturbed, 0.25).unwrap();
        assert!(
            pfit.relative_residual > 10.0 * fit.relative_residual,
            "{} vs {}",
            pfit.relative_residual,
            fit.relative_residual
        );
    }

    #[test]
    fn component_mass_bookkeeping() {
        let f = fixtures::two_bump_1d(1025);
        let m = component_masses(&f);
        assert_eq!(m.len(), 2);
        assert!((m.iter().sum::<f64>() - f.integral()).abs() < 1e-12);
    }
}
