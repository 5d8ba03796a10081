//! Named test fixtures shared by the CLI, the acceptance suite, and tests.
//!
//! Kink coordinates are chosen away from grid nodes of the dyadic grids used
//! in the suite, so sub-cell behavior is exercised rather than hidden.

use crate::good::{GoodProfile, SliceProfile};
use crate::grid::{Axis, GridFunction};
use crate::radial::RadialProfile;
use crate::thinfilm;

/// (1 − |x − center|)_+ on [−3, 3].
pub fn triangle_1d(center: f64, count: usize) -> GridFunction {
    let ax = Axis::new(-3.0, 3.0, count);
    GridFunction::from_fn(vec![ax], |x| 1.0 - (x[0] - center).abs()).unwrap()
}

/// Asymmetric tent with slopes 1 and 2, peak 1 at x = 0.7, support (−0.3, 1.2).
pub fn tent_1d(count: usize) -> GridFunction {
    let ax = Axis::new(-3.0, 3.0, count);
    GridFunction::from_fn(vec![ax], |x| tent(x[0], -0.3, 0.7, 1.2, 1.0)).unwrap()
}

/// Two separated asymmetric tents on [−4, 4]; not radially decreasing about
/// any center.
pub fn two_bump_1d(count: usize) -> GridFunction {
    let ax = Axis::new(-4.0, 4.0, count);
    GridFunction::from_fn(vec![ax], |x| two_bump_value(x[0])).unwrap()
}

pub fn two_bump_value(x: f64) -> f64 {
    tent(x, 0.503, 1.3, 2.51, 1.0).max(tent(x, -2.9, -1.9, -0.9, 0.65))
}

/// Trapezoid: up-slope 1, plateau, down-slope 2.
pub fn trapezoid_1d(count: usize) -> GridFunction {
    let ax = Axis::new(-3.0, 3.0, count);
    GridFunction::from_fn(vec![ax], |x| {
        let t = x[0];
        if t <= -1.7 || t >= 1.41 {
            0.0
        } else if t < -0.7 {
            t + 1.7
        } else if t <= 0.91 {
            1.0
        } else {
            2.0 * (1.41 - t)
        }
    })
    .unwrap()
}

/// Smooth shifted cosine bump.
pub fn cosine_bump_1d(count: usize) -> GridFunction {
    let ax = Axis::new(-3.0, 3.0, count);
    GridFunction::from_fn(vec![ax], |x| {
        let u = (x[0] - 0.3) / 1.5;
        if u.abs() >= 1.0 {
            0.0
        } else {
            0.4 * (1.0 + (std::f64::consts::PI * u).cos())
        }
    })
    .unwrap()
}

/// Sampled indicator of (0, 1) on [−0.5, 1.5].
pub fn indicator_1d(count: usize) -> GridFunction {
    let ax = Axis::new(-0.5, 1.5, count);
    GridFunction::from_fn(vec![ax], |x| {
        if x[0] > 0.0 && x[0] < 1.0 {
            1.0
        } else {
            0.0
        }
    })
    .unwrap()
}

fn tent(x: f64, a: f64, peak: f64, b: f64, height: f64) -> f64 {
    if x <= a || x >= b {
        0.0
    } else if x <= peak {
        height * (x - a) / (peak - a)
    } else {
        height * (b - x) / (b - peak)
    }
}

/// Two-cone 2D function: cone of height 1, slope 1 centered at (0, 2) and
/// cone of height 2, slope 2 centered at (0, −2). Axes: x ∈ [−2, 2],
/// y ∈ [−4, 4]; y is the symmetrization direction.
pub fn example_4_6_grid(nx: usize, ny: usize) -> GridFunction {
    let ax = Axis::new(-2.0, 2.0, nx);
    let ay = Axis::new(-4.0, 4.0, ny);
    GridFunction::from_fn(vec![ax, ay], |q| example_4_6_value(q[0], q[1])).unwrap()
}

pub fn example_4_6_value(x: f64, y: f64) -> f64 {
    let up = 1.0 - (x * x + (y - 2.0) * (y - 2.0)).sqrt();
    let down = 2.0 - 2.0 * (x * x + (y + 2.0) * (y + 2.0)).sqrt();
    up.max(down).max(0.0)
}

/// Piecewise-linear good profile of the two-cone function: `slices` slice
/// positions across (−1, 1), `arcs` breakpoints per cone half.
pub fn example_4_6_good(slices: usize, arcs: usize) -> GoodProfile {
    let dx = 2.0 / slices as f64;
    let mut out = Vec::with_capacity(slices);
    for i in 0..slices {
        let x = -1.0 + (i as f64 + 0.5) * dx;
        let mut bps = Vec::new();
        // Lower cone (center −2, height 2, slope 2), then upper (center 2).
        push_cone(&mut bps, x, -2.0, 2.0, 2.0, arcs);
        push_cone(&mut bps, x, 2.0, 1.0, 1.0, arcs);
        out.push(SliceProfile::new(x, bps));
    }
    GoodProfile::new_2d(out, dx).unwrap()
}

/// Breakpoints of the slice at `x` of a cone `height − slope·|(x, y−center)|`,
/// symmetric about `center`.
fn push_cone(bps: &mut Vec<(f64, f64)>, x: f64, center: f64, height: f64, slope: f64, arcs: usize) {
    let radius = height / slope;
    if x.abs() >= radius {
        return;
    }
    let half = (radius * radius - x * x).sqrt();
    let k = 2 * arcs; // segments across the slice support
    for j in 0..=k {
        let t = -1.0 + 2.0 * j as f64 / k as f64;
        let y = center + half * t;
        let v = (height - slope * (x * x + (y - center) * (y - center)).sqrt()).max(0.0);
        bps.push((y, v));
    }
}

/// Single off-center asymmetric tent as a 1D good profile: support
/// (0.5, 2.5), peak 1 at 1.3.
pub fn single_tent_good() -> GoodProfile {
    GoodProfile::new_1d(vec![(0.5, 0.0), (1.3, 1.0), (2.5, 0.0)]).unwrap()
}

/// Two tents strictly on either side of the origin; every level interval of
/// the right tent has positive center, every one of the left tent negative.
pub fn two_tents_good() -> GoodProfile {
    GoodProfile::new_1d(vec![
        (-3.1, 0.0),
        (-2.2, 0.8),
        (-1.2, 0.0),
        (0.5, 0.0),
        (1.3, 1.0),
        (2.5, 0.0),
    ])
    .unwrap()
}

/// A tent straddling the origin with unequal slopes: the level-interval
/// centers change sign partway up, so both moving classes appear within a
/// single bump.
pub fn straddle_tent_good() -> GoodProfile {
    GoodProfile::new_1d(vec![(-2.0, 0.0), (0.5, 1.0), (0.9, 0.0)]).unwrap()
}

/// A centered tent (zero-speed intervals) next to an off-center one:
/// exercises the centered class of the asymmetry decomposition.
pub fn centered_plus_offset_good() -> GoodProfile {
    GoodProfile::new_1d(vec![
        (-0.9, 0.0),
        (0.0, 0.6),
        (0.9, 0.0),
        (2.0, 0.0),
        (2.6, 0.9),
        (3.4, 0.0),
    ])
    .unwrap()
}

/// Unit-mass triangle profile (1 − r)_+ on the line.
pub fn triangle_radial(count: usize) -> RadialProfile {
    RadialProfile::from_fn(1, 1.0, count, |r| 1.0 - r)
}

/// Unit-mass parabolic cap (3/4)(1 − r²)_+ on the line.
pub fn parabola_radial(count: usize) -> RadialProfile {
    RadialProfile::from_fn(1, 1.0, count, |r| 0.75 * (1.0 - r * r))
}

/// Wider unit-mass triangle (half width 2) on the line.
pub fn wide_triangle_radial(count: usize) -> RadialProfile {
    RadialProfile::from_fn(1, 2.0, count, |r| 0.5 * (1.0 - 0.5 * r))
}

/// Unit-mass cone (3/π)(1 − r)_+ in the plane.
pub fn cone_radial_2d(count: usize) -> RadialProfile {
    RadialProfile::from_fn(2, 1.0, count, |r| 3.0 / std::f64::consts::PI * (1.0 - r))
}

/// Unit-mass paraboloid cap (2/π)(1 − r²)_+ in the plane.
pub fn paraboloid_radial_2d(count: usize) -> RadialProfile {
    RadialProfile::from_fn(2, 1.0, count, |r| {
        2.0 / std::f64::consts::PI * (1.0 - r * r)
    })
}

/// Named fixture registry used by the CLI.
pub enum Fixture {
    Grid(GridFunction),
    Radial(RadialProfile),
    Good(GoodProfile),
}

pub fn make_fixture(
    name: &str,
    grid_n: usize,
    s: f64,
    lambda: f64,
) -> Option<Fixture> {
    let count = grid_n + 1;
    Some(match name {
        "triangle" => Fixture::Grid(triangle_1d(0.0, count)),
        "shifted-triangle" => Fixture::Grid(triangle_1d(0.7, count)),
        "tent" => Fixture::Grid(tent_1d(count)),
        "two-bump" => Fixture::Grid(two_bump_1d(count)),
        "trapezoid" => Fixture::Grid(trapezoid_1d(count)),
        "cosine-bump" => Fixture::Grid(cosine_bump_1d(count)),
        "indicator" => Fixture::Grid(indicator_1d(count)),
        "example-4-6" => Fixture::Grid(example_4_6_grid(count / 2 + 1, count + 1)),
        "triangle-rad" => Fixture::Radial(triangle_radial(count)),
        "parabola-rad" => Fixture::Radial(parabola_radial(count)),
        "wide-triangle-rad" => Fixture::Radial(wide_triangle_radial(count)),
        "stationary" => Fixture::Radial(thinfilm::explicit_solution(lambda, s, 1, count).profile),
        "stationary-2d" => {
            Fixture::Radial(thinfilm::explicit_solution(lambda, s, 2, count).profile)
        }
        "single-tent-good" => Fixture::Good(single_tent_good()),
        "two-tents-good" => Fixture::Good(two_tents_good()),
        "example-4-6-good" => Fixture::Good(example_4_6_good(48, 48)),
        _ => return None,
    })
}
