//! Continuous Steiner symmetrization of grid functions: the full
//! symmetrization, the time-τ motion, the truncated variant that freezes low
//! level sets to preserve the support, and Lipschitz diagnostics.

use thiserror::Error;

use crate::grid::{layer_cake, GridError, GridFunction, HeightGrid};
use crate::interval::IntervalUnion;

#[derive(Debug, Error)]
pub enum SymmetrizeError {
    #[error("tau {tau} is not admissible: requires tau < h0/c0 = {limit}")]
    TauTooLarge { tau: f64, limit: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Axis selector for symmetrization. `Last` is the native direction; `First`
/// transposes a 2D grid, symmetrizes, and transposes back.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SymAxis {
    #[default]
    Last,
    First,
}

/// Truncation profile: level sets at height h move with speed
/// min(1, h/h0), so the support (h → 0) is frozen.
#[derive(Clone, Copy, Debug)]
pub struct TruncationSpec {
    pub h0: f64,
}

impl TruncationSpec {
    pub fn new(h0: f64) -> Self {
        assert!(h0 > 0.0, "truncation height must be positive");
        Self { h0 }
    }

    #[inline]
    pub fn speed(&self, h: f64) -> f64 {
        (h / self.h0).min(1.0)
    }
}

/// Discrete Lipschitz constant: max |Δ sample| / Δx over axis-adjacent pairs.
#[derive(Clone, Debug)]
pub struct LipschitzReport {
    pub c0: f64,
    pub per_axis: Vec<f64>,
}

pub fn lipschitz_report(f: &GridFunction) -> LipschitzReport {
    let mut per_axis = Vec::with_capacity(f.dim());
    match f.dim() {
        1 => {
            let step = f.axis(0).step();
            let c = f
                .samples()
                .windows(2)
                .map(|w| (w[1] - w[0]).abs() / step)
                .fold(0.0, f64::max);
            per_axis.push(c);
        }
        2 => {
            let (n0, n1) = (f.axis(0).count, f.axis(1).count);
            let (d0, d1) = (f.axis(0).step(), f.axis(1).step());
            let s = f.samples();
            let mut c0 = 0.0f64;
            for i in 0..n0 - 1 {
                for j in 0..n1 {
                    c0 = c0.max((s[(i + 1) * n1 + j] - s[i * n1 + j]).abs() / d0);
                }
            }
            let mut c1 = 0.0f64;
            for i in 0..n0 {
                for j in 0..n1 - 1 {
                    c1 = c1.max((s[i * n1 + j + 1] - s[i * n1 + j]).abs() / d1);
                }
            }
            per_axis.push(c0);
            per_axis.push(c1);
        }
        _ => unreachable!(),
    }
    LipschitzReport {
        c0: per_axis.iter().copied().fold(0.0, f64::max),
        per_axis,
    }
}

/// Discretization parameters for level-set symmetrization.
#[derive(Clone, Copy, Debug)]
pub struct SteinerParams {
    /// Number of midpoint heights over (0, max f).
    pub heights: usize,
}

impl Default for SteinerParams {
    fn default() -> Self {
        Self { heights: 512 }
    }
}

impl SteinerParams {
    pub fn new(heights: usize) -> Self {
        Self { heights }
    }
}

/// Outcome of a truncated symmetrization, with the nesting-clip diagnostic.
#[derive(Clone, Debug)]
pub struct TruncatedResult {
    pub grid: GridFunction,
    /// Number of section spans trimmed to restore nesting (zero in the
    /// admissible regime up to one grid cell).
    pub clipped_spans: usize,
}

enum Motion<'a> {
    Full,
    Constant(f64),
    Truncated { tau: f64, spec: &'a TruncationSpec },
}

fn symmetrize_with(
    f: &GridFunction,
    axis: SymAxis,
    params: &SteinerParams,
    motion: Motion<'_>,
) -> Result<(GridFunction, usize), SymmetrizeError> {
    if let SymAxis::First = axis {
        let t = f.transpose();
        let (g, clips) = symmetrize_with(&t, SymAxis::Last, params, motion)?;
        return Ok((g.transpose(), clips));
    }
    let maxf = f.max_value();
    if maxf == 0.0 {
        return Ok((f.clone(), 0));
    }
    let hg = HeightGrid::new(maxf, params.heights)?;
    let ax = *f.last_axis();
    let mut samples = Vec::with_capacity(f.samples().len());
    let mut clipped = 0usize;
    for s in 0..f.slice_count() {
        let mut sections: Vec<(f64, IntervalUnion)> = Vec::with_capacity(hg.heights().len());
        let mut below: Option<IntervalUnion> = None;
        for &h in hg.heights() {
            let u = f.superlevel_section(s, h);
            if u.is_empty() && sections.last().map_or(false, |(_, p)| p.is_empty()) {
                sections.push((hg.weight(), u));
                continue;
            }
            let mut moved = match motion {
                Motion::Full => u.symmetric_rearrangement(),
                Motion::Constant(tau) => u.steiner_motion(tau),
                Motion::Truncated { tau, spec } => u.steiner_motion(spec.speed(h) * tau),
            };
            if let Motion::Truncated { .. } = motion {
                // Clip to the next-lower section so the layer cake stays
                // well-posed even for inadmissible inputs; a no-op (up to one
                // cell) in the admissible regime.
                if let Some(prev) = &below {
                    if !prev.contains(&moved, ax.step()) {
                        let before = moved.measure();
                        moved = moved.intersect(prev);
                        if moved.measure() < before {
                            clipped += 1;
                        }
                    }
                }
                below = Some(moved.clone());
            }
            sections.push((hg.weight(), moved));
        }
        samples.extend_from_slice(&layer_cake(&sections, &ax)?);
    }
    let g = GridFunction::new(f.axes().to_vec(), samples)?;
    Ok((g, clipped))
}

/// Full Steiner symmetrization: every slice section replaced by its symmetric
/// rearrangement.
pub fn steiner_full(
    f: &GridFunction,
    axis: SymAxis,
    params: &SteinerParams,
) -> Result<GridFunction, SymmetrizeError> {
    Ok(symmetrize_with(f, axis, params, Motion::Full)?.0)
}

/// Continuous Steiner symmetrization at time τ. τ = 0 returns the input
/// unchanged; τ at or beyond the grid diameter equals the full
/// symmetrization.
pub fn steiner_continuous(
    f: &GridFunction,
    tau: f64,
    axis: SymAxis,
    params: &SteinerParams,
) -> Result<GridFunction, SymmetrizeError> {
    assert!(tau >= 0.0, "tau must be nonnegative");
    if tau == 0.0 {
        return Ok(f.clone());
    }
    Ok(symmetrize_with(f, axis, params, Motion::Constant(tau))?.0)
}

/// Time at which the motion is guaranteed complete for this grid.
pub fn tau_infinity(f: &GridFunction) -> f64 {
    let ax = f.last_axis();
    ax.max - ax.min
}

/// Truncated symmetrization: heights move with speed min(1, h/h0).
/// Requires τ < h0/c0 with c0 the discrete Lipschitz constant.
pub fn steiner_truncated(
    f: &GridFunction,
    tau: f64,
    trunc: &TruncationSpec,
    axis: SymAxis,
    params: &SteinerParams,
) -> Result<TruncatedResult, SymmetrizeError> {
    assert!(tau >= 0.0, "tau must be nonnegative");
    let c0 = lipschitz_report(f).c0;
    if c0 > 0.0 {
        let limit = trunc.h0 / c0;
        if tau >= limit {
            return Err(SymmetrizeError::TauTooLarge { tau, limit });
        }
    }
    let (grid, clipped_spans) =
        symmetrize_with(f, axis, params, Motion::Truncated { tau, spec: trunc })?;
    Ok(TruncatedResult {
        grid,
        clipped_spans,
    })
}

/// Cells (node indices) where the function is strictly positive.
pub fn support_cells(f: &GridFunction) -> Vec<bool> {
    f.samples().iter().map(|&v| v > 0.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::grid::Axis;

    fn sup_diff(a: &GridFunction, b: &GridFunction) -> f64 {
        a.samples()
            .iter()
            .zip(b.samples())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn full_symmetrization_centers_a_shifted_triangle() {
        let n = 1024;
        let f = fixtures::triangle_1d(0.7, n);
        let g = steiner_full(&f, SymAxis::Last, &SteinerParams::new(512)).unwrap();
        let target = fixtures::triangle_1d(0.0, n);
        assert!(sup_diff(&g, &target) < 6e-3);
    }

    #[test]
    fn symmetric_decreasing_function_is_a_fixed_point() {
        let f = fixtures::triangle_1d(0.0, 1024);
        let params = SteinerParams::new(512);
        let g = steiner_full(&f, SymAxis::Last, &params).unwrap();
        assert!(sup_diff(&g, &f) < 2e-3);
        let h = steiner_continuous(&f, 0.8, SymAxis::Last, &params).unwrap();
        assert!(sup_diff(&h, &f) < 2e-3);
    }

    #[test]
    fn two_bump_sections_merge_measure() {
        // Sections of measures 0.5 and 1.0 at a height combine into a single
        // centered interval of measure 1.5 under full symmetrization.
        let u = IntervalUnion::new([(-2.0, -1.5), (1.0, 2.0)]);
        let r = u.symmetric_rearrangement();
        assert_eq!(r.spans(), &[(-0.75, 0.75)]);
    }

    #[test]
    fn tau_zero_returns_input_exactly() {
        let f = fixtures::two_bump_1d(512);
        let g = steiner_continuous(&f, 0.0, SymAxis::Last, &SteinerParams::new(256)).unwrap();
        assert_eq!(&f, &g);
    }

    #[test]
    fn shifted_triangle_translates_at_unit_speed() {
        let n = 1024;
        let f = fixtures::triangle_1d(0.7, n);
        let g = steiner_continuous(&f, 0.3, SymAxis::Last, &SteinerParams::new(512)).unwrap();
        let target = fixtures::triangle_1d(0.4, n);
        assert!(sup_diff(&g, &target) < 7e-3, "{}", sup_diff(&g, &target));
    }

    #[test]
    fn lp_norms_preserved() {
        let f = fixtures::two_bump_1d(1024);
        let params = SteinerParams::new(512);
        for tau in [0.05, 0.4, 1.3] {
            let g = steiner_continuous(&f, tau, SymAxis::Last, &params).unwrap();
            for p in [1.0, 2.0, 5.0] {
                let (a, b) = (f.lp_norm(p), g.lp_norm(p));
                assert!(
                    (a - b).abs() <= 1e-3 * a,
                    "p={p} tau={tau}: {a} vs {b}"
                );
            }
            assert!((f.max_value() - g.max_value()).abs() <= 1e-3 * f.max_value());
        }
    }

    #[test]
    fn large_tau_equals_full_symmetrization() {
        let f = fixtures::two_bump_1d(512);
        let params = SteinerParams::new(256);
        let g = steiner_continuous(&f, tau_infinity(&f), SymAxis::Last, &params).unwrap();
        let s = steiner_full(&f, SymAxis::Last, &params).unwrap();
        assert!(sup_diff(&g, &s) < 1e-12);
    }

    #[test]
    fn semigroup_on_functions_within_two_cells() {
        let f = fixtures::two_bump_1d(1024);
        let params = SteinerParams::new(512);
        let g1 = steiner_continuous(&f, 0.15, SymAxis::Last, &params).unwrap();
        let g12 = steiner_continuous(&g1, 0.25, SymAxis::Last, &params).unwrap();
        let g2 = steiner_continuous(&f, 0.40, SymAxis::Last, &params).unwrap();
        // Compare level-set boundaries at a few heights.
        let cell = f.last_axis().step();
        for h in [0.2, 0.5, 0.8] {
            let a = g12.superlevel_section(0, h);
            let b = g2.superlevel_section(0, h);
            assert!(
                a.boundary_distance(&b) <= 2.0 * cell + 2.0 * 1.0 / 512.0,
                "h={h}: {}",
                a.boundary_distance(&b)
            );
        }
    }

    #[test]
    fn lipschitz_reports() {
        let f = fixtures::triangle_1d(0.0, 801);
        let r = lipschitz_report(&f);
        assert!((r.c0 - 1.0).abs() < 0.01);

        // Indicator step: c0 = 1/Δx flags non-Lipschitz data.
        let ax = Axis::new(-1.0, 2.0, 301);
        let g = GridFunction::from_fn(vec![ax], |x| {
            if x[0] > 0.0 && x[0] < 1.0 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let r = lipschitz_report(&g);
        assert!((r.c0 - 1.0 / ax.step()).abs() < 1e-9);

        let e = fixtures::example_4_6_grid(161, 321);
        let r = lipschitz_report(&e);
        assert!((r.c0 - 2.0).abs() < 0.05, "c0 = {}", r.c0);
    }

    #[test]
    fn lipschitz_constant_does_not_increase_under_plain_motion() {
        let f = fixtures::two_bump_1d(1024);
        let c0 = lipschitz_report(&f).c0;
        let params = SteinerParams::new(512);
        for tau in [0.1, 0.5, 1.5] {
            let g = steiner_continuous(&f, tau, SymAxis::Last, &params).unwrap();
            let c = lipschitz_report(&g).c0;
            let slack = 2.0 * c0 * f.last_axis().step() / (f.max_value() / 512.0);
            assert!(c <= c0 + slack, "tau={tau}: {c} vs {c0} + {slack}");
        }
    }

    #[test]
    fn truncated_rejects_inadmissible_tau() {
        let f = fixtures::two_bump_1d(512);
        let trunc = TruncationSpec::new(0.25);
        let c0 = lipschitz_report(&f).c0;
        let bad = 1.05 * trunc.h0 / c0;
        let r = steiner_truncated(&f, bad, &trunc, SymAxis::Last, &SteinerParams::new(256));
        assert!(matches!(r, Err(SymmetrizeError::TauTooLarge { .. })));
    }

    #[test]
    fn truncated_preserves_support_and_stays_close() {
        let f = fixtures::two_bump_1d(1024);
        let c0 = lipschitz_report(&f).c0;
        let trunc = TruncationSpec::new(0.25);
        let tau = 0.1;
        assert!(tau < trunc.h0 / c0);
        let r = steiner_truncated(&f, tau, &trunc, SymAxis::Last, &SteinerParams::new(512)).unwrap();
        // Support is compared against the τ=0 reconstruction so the check
        // isolates the motion, not the height discretization.
        let base = steiner_truncated(&f, 0.0, &trunc, SymAxis::Last, &SteinerParams::new(512))
            .unwrap();
        assert_eq!(support_cells(&r.grid), support_cells(&base.grid));
        assert_eq!(r.clipped_spans, 0);

        let dx = f.last_axis().step();
        let sup: f64 = f
            .samples()
            .iter()
            .zip(r.grid.samples())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(sup <= tau * c0 + 2.0 * c0 * dx, "{sup}");

        let c_out = lipschitz_report(&r.grid).c0;
        let bound = c0 * trunc.h0 / (trunc.h0 - c0 * tau) + 2.0 * c0 * dx / trunc.h0;
        assert!(c_out <= bound, "{c_out} vs {bound}");
    }

    #[test]
    fn truncated_fixed_point_on_symmetric_input() {
        let f = fixtures::triangle_1d(0.0, 512);
        let trunc = TruncationSpec::new(0.2);
        let r = steiner_truncated(&f, 0.05, &trunc, SymAxis::Last, &SteinerParams::new(256))
            .unwrap();
        let base = steiner_truncated(&f, 0.0, &trunc, SymAxis::Last, &SteinerParams::new(256))
            .unwrap();
        assert_eq!(r.grid, base.grid);
    }

    #[test]
    fn first_axis_symmetrization_transposes() {
        let f = fixtures::example_4_6_grid(81, 161);
        let params = SteinerParams::new(128);
        let a = steiner_full(&f, SymAxis::First, &params).unwrap();
        let b = steiner_full(&f.transpose(), SymAxis::Last, &params).unwrap();
        assert_eq!(a, b.transpose());
    }
}
