//! Nonnegative sampled functions on uniform 1D/2D grids, level-set
//! extraction per slice, and layer-cake reconstruction.
//!
//! The last axis is the symmetrization direction; a 2D grid is stored
//! row-major with the last axis contiguous, so each slice is a contiguous
//! run of samples.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::interval::IntervalUnion;
use crate::util::KahanSum;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid must be one- or two-dimensional, got {0} axes")]
    BadDimension(usize),
    #[error("axis {0} needs at least two nodes and min < max")]
    BadAxis(usize),
    #[error("sample count {got} does not match axes ({want})")]
    BadSampleCount { got: usize, want: usize },
    #[error("negative or non-finite sample at index {0}")]
    NegativeSample(usize),
    #[error("nonzero boundary sample at index {0}")]
    BoundaryNotZero(usize),
    #[error("sections are not nested at height index {0} (off by more than one grid cell)")]
    NonNestedSections(usize),
    #[error("height grid needs max > 0 and at least one height")]
    BadHeightGrid,
    #[error("parse error in grid file: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Uniformly spaced axis with `count` nodes on [min, max].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    #[inline]
    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.min + self.step() * i as f64
    }

    fn validate(&self, idx: usize) -> Result<(), GridError> {
        if self.count < 2 || !(self.min < self.max) {
            return Err(GridError::BadAxis(idx));
        }
        Ok(())
    }
}

/// Nonnegative function sampled on a uniform grid with compact support
/// (boundary samples are zero).
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    axes: Vec<Axis>,
    samples: Vec<f64>,
}

impl GridFunction {
    pub fn new(axes: Vec<Axis>, samples: Vec<f64>) -> Result<Self, GridError> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(GridError::BadDimension(axes.len()));
        }
        for (i, ax) in axes.iter().enumerate() {
            ax.validate(i)?;
        }
        let want: usize = axes.iter().map(|a| a.count).product();
        if samples.len() != want {
            return Err(GridError::BadSampleCount {
                got: samples.len(),
                want,
            });
        }
        let g = Self { axes, samples };
        for (i, &v) in g.samples.iter().enumerate() {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(GridError::NegativeSample(i));
            }
            if g.is_boundary(i) && v != 0.0 {
                return Err(GridError::BoundaryNotZero(i));
            }
        }
        Ok(g)
    }

    /// Sample a function of grid coordinates; values are clamped at zero so
    /// fixture closures may dip negative.
    pub fn from_fn(axes: Vec<Axis>, f: impl Fn(&[f64]) -> f64) -> Result<Self, GridError> {
        let dim = axes.len();
        let counts: Vec<usize> = axes.iter().map(|a| a.count).collect();
        let total: usize = counts.iter().product();
        let mut samples = Vec::with_capacity(total);
        match dim {
            1 => {
                for i in 0..counts[0] {
                    samples.push(f(&[axes[0].node(i)]).max(0.0));
                }
            }
            2 => {
                for i in 0..counts[0] {
                    let x = axes[0].node(i);
                    for j in 0..counts[1] {
                        samples.push(f(&[x, axes[1].node(j)]).max(0.0));
                    }
                }
            }
            _ => return Err(GridError::BadDimension(dim)),
        }
        // Zero out the boundary so compact support holds exactly.
        let mut g = Self { axes, samples };
        let n = g.samples.len();
        for i in 0..n {
            if g.is_boundary(i) {
                g.samples[i] = 0.0;
            }
        }
        Self::new(g.axes, g.samples)
    }

    fn is_boundary(&self, flat: usize) -> bool {
        match self.axes.len() {
            1 => flat == 0 || flat + 1 == self.axes[0].count,
            2 => {
                let n1 = self.axes[1].count;
                let (i, j) = (flat / n1, flat % n1);
                i == 0 || i + 1 == self.axes[0].count || j == 0 || j + 1 == n1
            }
            _ => unreachable!(),
        }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &Axis {
        &self.axes[i]
    }

    /// Axis along which symmetrization acts (the last one).
    pub fn last_axis(&self) -> &Axis {
        self.axes.last().unwrap()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Number of 1D slices along the last axis.
    pub fn slice_count(&self) -> usize {
        match self.axes.len() {
            1 => 1,
            2 => self.axes[0].count,
            _ => unreachable!(),
        }
    }

    /// Contiguous samples of slice `s`.
    pub fn slice(&self, s: usize) -> &[f64] {
        let n = self.last_axis().count;
        &self.samples[s * n..(s + 1) * n]
    }

    /// Coordinate of slice `s` along the first axis (0.0 in 1D).
    pub fn slice_pos(&self, s: usize) -> f64 {
        match self.axes.len() {
            1 => 0.0,
            2 => self.axes[0].node(s),
            _ => unreachable!(),
        }
    }

    /// Cell volume Π Δx_i.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.step()).product()
    }

    pub fn max_value(&self) -> f64 {
        self.samples.iter().copied().fold(0.0, f64::max)
    }

    /// Σ f Δx (node sum; exact trapezoid for boundary-zero data).
    pub fn integral(&self) -> f64 {
        let mut acc = KahanSum::new();
        for &v in &self.samples {
            acc.add(v);
        }
        acc.value() * self.cell_volume()
    }

    /// (Σ |f|^p Δx)^{1/p}.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.max_value();
        }
        let mut acc = KahanSum::new();
        for &v in &self.samples {
            acc.add(v.powf(p));
        }
        (acc.value() * self.cell_volume()).powf(1.0 / p)
    }

    /// Transpose a 2D grid (swaps axes; used to symmetrize along the first
    /// axis).
    pub fn transpose(&self) -> Self {
        assert_eq!(self.dim(), 2, "transpose is for 2D grids");
        let (n0, n1) = (self.axes[0].count, self.axes[1].count);
        let mut samples = vec![0.0; self.samples.len()];
        for i in 0..n0 {
            for j in 0..n1 {
                samples[j * n0 + i] = self.samples[i * n1 + j];
            }
        }
        Self {
            axes: vec![self.axes[1], self.axes[0]],
            samples,
        }
    }

    /// Open superlevel section {x_n : f(x', x_n) > h} of one slice, with
    /// sub-cell endpoints by linear interpolation between adjacent samples.
    pub fn superlevel_section(&self, slice: usize, h: f64) -> IntervalUnion {
        let axis = *self.last_axis();
        let vals = self.slice(slice);
        superlevel_of_slice(vals, &axis, h)
    }

    pub fn write_to(&self, path: &Path) -> Result<(), GridError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("gfn v1\n");
        let _ = writeln!(out, "dim {}", self.dim());
        for ax in &self.axes {
            let _ = writeln!(out, "axis {} {} {}", ax.min, ax.max, ax.count);
        }
        out.push_str("samples\n");
        let row = self.last_axis().count;
        for (i, v) in self.samples.iter().enumerate() {
            if i % row != 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v}");
            if (i + 1) % row == 0 {
                out.push('\n');
            }
        }
        out
    }

    pub fn read_from(path: &Path) -> Result<Self, GridError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
    }

    pub fn from_text(text: &str) -> Result<Self, GridError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| GridError::Parse("empty file".into()))?;
        if header.trim() != "gfn v1" {
            return Err(GridError::Parse(format!("bad header {header:?}")));
        }
        let dim_line = lines
            .next()
            .ok_or_else(|| GridError::Parse("missing dim".into()))?;
        let dim: usize = dim_line
            .trim()
            .strip_prefix("dim ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| GridError::Parse(format!("bad dim line {dim_line:?}")))?;
        let mut axes = Vec::with_capacity(dim);
        for _ in 0..dim {
            let line = lines
                .next()
                .ok_or_else(|| GridError::Parse("missing axis".into()))?;
            let rest = line
                .trim()
                .strip_prefix("axis ")
                .ok_or_else(|| GridError::Parse(format!("bad axis line {line:?}")))?;
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(GridError::Parse(format!("bad axis line {line:?}")));
            }
            let min: f64 = parts[0]
                .parse()
                .map_err(|_| GridError::Parse(format!("bad axis min {line:?}")))?;
            let max: f64 = parts[1]
                .parse()
                .map_err(|_| GridError::Parse(format!("bad axis max {line:?}")))?;
            let count: usize = parts[2]
                .parse()
                .map_err(|_| GridError::Parse(format!("bad axis count {line:?}")))?;
            axes.push(Axis::new(min, max, count));
        }
        let marker = lines
            .next()
            .ok_or_else(|| GridError::Parse("missing samples marker".into()))?;
        if marker.trim() != "samples" {
            return Err(GridError::Parse(format!("expected 'samples', got {marker:?}")));
        }
        let mut samples = Vec::new();
        for line in lines {
            for tok in line.split_whitespace() {
                samples.push(
                    tok.parse::<f64>()
                        .map_err(|_| GridError::Parse(format!("bad sample {tok:?}")))?,
                );
            }
        }
        Self::new(axes, samples)
    }
}

/// Superlevel section of raw slice values against a given axis.
pub fn superlevel_of_slice(vals: &[f64], axis: &Axis, h: f64) -> IntervalUnion {
    if h < 0.0 {
        // Support section: everything strictly positive.
        return superlevel_of_slice(vals, axis, 0.0);
    }
    let step = axis.step();
    let mut spans = Vec::new();
    let mut start: Option<f64> = None;
    for j in 0..vals.len() {
        let inside = vals[j] > h;
        if inside && start.is_none() {
            let x = if j == 0 {
                axis.node(0)
            } else {
                let (v0, v1) = (vals[j - 1], vals[j]);
                axis.node(j - 1) + (h - v0) / (v1 - v0) * step
            };
            start = Some(x);
        } else if !inside {
            if let Some(s) = start.take() {
                let (v0, v1) = (vals[j - 1], vals[j]);
                let x = if v1 == v0 {
                    axis.node(j)
                } else {
                    axis.node(j - 1) + (h - v0) / (v1 - v0) * step
                };
                spans.push((s, x));
            }
        }
    }
    if let Some(s) = start {
        spans.push((s, axis.node(vals.len() - 1)));
    }
    IntervalUnion::new(spans)
}

/// Uniform midpoint height grid over (0, max): heights (k+1/2)·max/n with
/// common weight max/n, so Σ weights = max.
#[derive(Clone, Debug)]
pub struct HeightGrid {
    heights: Vec<f64>,
    weight: f64,
}

impl HeightGrid {
    pub fn new(max: f64, n: usize) -> Result<Self, GridError> {
        if !(max > 0.0) || n == 0 {
            return Err(GridError::BadHeightGrid);
        }
        let w = max / n as f64;
        Ok(Self {
            heights: (0..n).map(|k| (k as f64 + 0.5) * w).collect(),
            weight: w,
        })
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

/// Layer-cake reconstruction of one slice: g(x_n) = Σ_k w_k · χ_{U_k}(x_n).
///
/// Sections must be sorted by height and nested within one grid cell;
/// a larger violation signals a dropped level set.
pub fn layer_cake(
    sections: &[(f64, IntervalUnion)],
    axis: &Axis,
) -> Result<Vec<f64>, GridError> {
    let slack = axis.step();
    for k in 0..sections.len().saturating_sub(1) {
        if !sections[k].1.contains(&sections[k + 1].1, slack) {
            return Err(GridError::NonNestedSections(k + 1));
        }
    }
    let mut out = vec![0.0; axis.count];
    let step = axis.step();
    for (w, u) in sections {
        for &(a, b) in u.spans() {
            // Nodes strictly inside (a, b).
            let lo = ((a - axis.min) / step).floor() as isize + 1;
            let hi = ((b - axis.min) / step).ceil() as isize - 1;
            let lo = lo.clamp(0, axis.count as isize - 1) as usize;
            let hi = hi.clamp(-1, axis.count as isize - 1);
            if hi < 0 {
                continue;
            }
            for j in lo..=hi as usize {
                let x = axis.node(j);
                if x > a && x < b {
                    out[j] += w;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_slice() -> GridFunction {
        let ax = Axis::new(-2.0, 2.0, 401);
        GridFunction::from_fn(vec![ax], |x| 1.0 - (x[0] - 0.5).abs()).unwrap()
    }

    #[test]
    fn superlevel_triangle_is_exact_for_piecewise_linear_data() {
        let g = triangle_slice();
        let u = g.superlevel_section(0, 0.5);
        assert_eq!(u.len(), 1);
        let (a, b) = u.spans()[0];
        assert!((a - 0.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn superlevel_above_max_is_empty() {
        let g = triangle_slice();
        assert!(g.superlevel_section(0, 1.5).is_empty());
        assert!(g.superlevel_section(0, g.max_value()).is_empty());
    }

    #[test]
    fn superlevel_two_cone_slice_at_center() {
        // Slice x = 0 of the two-cone example: cones of heights 1 and 2 with
        // slopes 1 and 2 centered at x_n = ±2. At h = 0.5 the sections are
        // (1.5, 2.5) and (-2.75, -1.25).
        let ax = Axis::new(-4.0, 4.0, 2001);
        let g = GridFunction::from_fn(vec![ax], |x| {
            let y = x[0];
            let up = 1.0 - (y - 2.0).abs();
            let down = 2.0 - 2.0 * (y + 2.0).abs();
            up.max(down).max(0.0)
        })
        .unwrap();
        let u = g.superlevel_section(0, 0.5);
        assert_eq!(u.len(), 2);
        let (a, b) = u.spans()[0];
        assert!((a + 2.75).abs() < 1e-9 && (b + 1.25).abs() < 1e-9, "{a} {b}");
        let (c, d) = u.spans()[1];
        assert!((c - 1.5).abs() < 1e-9 && (d - 2.5).abs() < 1e-9);

        // Dense-sampling cross-check of the same section.
        let mut inside = 0usize;
        for k in 0..200_000 {
            let y = -4.0 + 8.0 * (k as f64 + 0.5) / 200_000.0;
            let f = (1.0 - (y - 2.0f64).abs()).max(2.0 - 2.0 * (y + 2.0f64).abs()).max(0.0);
            if f > 0.5 {
                inside += 1;
            }
        }
        let dense_measure = 8.0 * inside as f64 / 200_000.0;
        assert!((dense_measure - u.measure()).abs() < 1e-3);
    }

    #[test]
    fn layer_cake_single_and_nested() {
        let ax = Axis::new(-2.0, 2.0, 401);
        let one = layer_cake(&[(1.0, IntervalUnion::new([(-1.0, 1.0)]))], &ax).unwrap();
        let j = 100; // x = -1
        assert_eq!(one[j], 0.0); // open interval: endpoint excluded
        assert_eq!(one[j + 1], 1.0);
        let nested = layer_cake(
            &[
                (0.5, IntervalUnion::new([(-1.0, 1.0)])),
                (0.5, IntervalUnion::new([(-0.5, 0.5)])),
            ],
            &ax,
        )
        .unwrap();
        let at = |x: f64| nested[((x + 2.0) / ax.step()).round() as usize];
        assert_eq!(at(0.0), 1.0);
        assert_eq!(at(0.75), 0.5);
        assert_eq!(at(1.5), 0.0);
    }

    #[test]
    fn layer_cake_rejects_non_nested_sections() {
        let ax = Axis::new(-2.0, 2.0, 101);
        let r = layer_cake(
            &[
                (0.5, IntervalUnion::new([(-0.5, 0.5)])),
                (0.5, IntervalUnion::new([(0.9, 1.5)])),
            ],
            &ax,
        );
        assert!(matches!(r, Err(GridError::NonNestedSections(1))));
    }

    #[test]
    fn monotone_nesting_of_sections() {
        let g = triangle_slice();
        let lo = g.superlevel_section(0, 0.25);
        let hi = g.superlevel_section(0, 0.75);
        assert!(lo.contains(&hi, 0.0));
    }

    #[test]
    fn mass_identity_on_triangle() {
        // Midpoint heights are exact for the triangle: section length is
        // linear in h.
        let g = triangle_slice();
        let hg = HeightGrid::new(g.max_value(), 64).unwrap();
        let mut total = 0.0;
        for &h in hg.heights() {
            total += hg.weight() * g.superlevel_section(0, h).measure();
        }
        let grid_integral = g.integral();
        assert!(
            (total - grid_integral).abs() <= 1e-10 * grid_integral,
            "layer-cake {total} vs grid {grid_integral}"
        );
    }

    #[test]
    fn gfn_round_trip_is_bit_exact() {
        let g = triangle_slice();
        let text = g.to_text();
        let h = GridFunction::from_text(&text).unwrap();
        assert_eq!(g, h);
        assert_eq!(text, h.to_text());
    }

    #[test]
    fn gfn_rejects_bad_data() {
        assert!(GridFunction::new(
            vec![Axis::new(0.0, 1.0, 3)],
            vec![0.0, -1.0, 0.0]
        )
        .is_err());
        assert!(GridFunction::new(
            vec![Axis::new(0.0, 1.0, 3)],
            vec![0.5, 1.0, 0.0]
        )
        .is_err());
    }

    #[test]
    fn transpose_round_trip() {
        let g = GridFunction::from_fn(
            vec![Axis::new(-1.0, 1.0, 21), Axis::new(-2.0, 2.0, 31)],
            |x| (1.0 - x[0].abs()) * (1.0 - 0.5 * x[1].abs()),
        )
        .unwrap();
        assert_eq!(g.transpose().transpose(), g);
    }
}
