//! Level-set calculus for good profiles.
//!
//! A [`GoodProfile`] stores, per slice, a piecewise-linear profile whose
//! interior slopes stay away from zero, so every height (outside a finite
//! exceptional set) crosses the graph in finitely many points with explicit
//! endpoint derivatives. On this representation the regularized nonlocal
//! energy and its rearrangement derivative are double height quadratures of
//! four-point brackets of the kernel antiderivatives, evaluated here with
//! cached log-uniform tables.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::energy::{EnergyReport, KernelSpec};
use crate::quad::adaptive_simpson;
use crate::util::{kahan_sum, KahanSum};

#[derive(Debug, Error)]
pub enum GoodError {
    #[error("profile invalid: {0}")]
    Invalid(String),
    #[error("interval centers violate the ordering precondition")]
    InvalidOrdering,
    #[error("kernel spec invalid for level-set quadrature: {0}")]
    BadSpec(String),
    #[error("parse error in profile file: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One solution of f(x', ·) = h with its height derivative dy/dh = 1/slope.
#[derive(Clone, Copy, Debug)]
pub struct Crossing {
    pub y: f64,
    pub dydh: f64,
}

/// Piecewise-linear slice profile: breakpoints (y, value) with zero ends.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceProfile {
    pub pos: f64,
    pub breakpoints: Vec<(f64, f64)>,
}

impl SliceProfile {
    pub fn new(pos: f64, breakpoints: Vec<(f64, f64)>) -> Self {
        Self { pos, breakpoints }
    }

    pub fn max_value(&self) -> f64 {
        self.breakpoints.iter().map(|b| b.1).fold(0.0, f64::max)
    }

    /// Smallest |slope| over segments touching the support; errors collect
    /// structural problems.
    fn validate(&self) -> Result<f64, GoodError> {
        let bps = &self.breakpoints;
        if bps.len() < 3 {
            return Err(GoodError::Invalid("slice needs at least 3 breakpoints".into()));
        }
        if bps.first().unwrap().1 != 0.0 || bps.last().unwrap().1 != 0.0 {
            return Err(GoodError::Invalid("slice must start and end at value 0".into()));
        }
        let mut floor = f64::INFINITY;
        for w in bps.windows(2) {
            let ((y0, v0), (y1, v1)) = (w[0], w[1]);
            if !(y1 > y0) {
                return Err(GoodError::Invalid("breakpoints must be strictly increasing".into()));
            }
            if v0 < 0.0 || v1 < 0.0 || !v0.is_finite() || !v1.is_finite() {
                return Err(GoodError::Invalid("values must be finite and nonnegative".into()));
            }
            if v0 > 0.0 || v1 > 0.0 {
                let slope = (v1 - v0).abs() / (y1 - y0);
                if slope == 0.0 {
                    return Err(GoodError::Invalid(
                        "zero slope on the support violates the slope floor".into(),
                    ));
                }
                floor = floor.min(slope);
            }
        }
        Ok(floor)
    }

    /// Crossings of height h (0 < h < max), sorted in y. Heights that hit a
    /// breakpoint value exactly are the caller's responsibility to avoid
    /// (quadratures sample midpoints).
    pub fn crossings(&self, h: f64) -> Vec<Crossing> {
        let mut out = Vec::new();
        for w in self.breakpoints.windows(2) {
            let ((y0, v0), (y1, v1)) = (w[0], w[1]);
            if (v0 < h && v1 > h) || (v0 > h && v1 < h) {
                let t = (h - v0) / (v1 - v0);
                out.push(Crossing {
                    y: y0 + t * (y1 - y0),
                    dydh: (y1 - y0) / (v1 - v0),
                });
            }
        }
        out
    }

    /// Interior local extremum values: the heights at which the crossing
    /// count changes.
    pub fn exceptional_heights(&self) -> Vec<f64> {
        let b = &self.breakpoints;
        let mut out = Vec::new();
        for i in 1..b.len() - 1 {
            let v = b[i].1;
            if v > 0.0 {
                let (lo, hi) = (b[i - 1].1, b[i + 1].1);
                if (v > lo && v > hi) || (v < lo && v < hi) {
                    out.push(v);
                }
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        out
    }

    /// ∫ f^p dy, exact for the piecewise-linear profile.
    fn lp_integral(&self, p: f64) -> f64 {
        let mut acc = KahanSum::new();
        for w in self.breakpoints.windows(2) {
            let ((y0, v0), (y1, v1)) = (w[0], w[1]);
            let len = y1 - y0;
            if v0 == v1 {
                acc.add(len * v0.powf(p));
            } else {
                acc.add(len * (v1.powf(p + 1.0) - v0.powf(p + 1.0)) / ((p + 1.0) * (v1 - v0)));
            }
        }
        acc.value()
    }
}

/// Finite collection of slice profiles with a common slice quadrature
/// weight (Δx' in 2D, 1 for a single 1D slice).
#[derive(Clone, Debug, PartialEq)]
pub struct GoodProfile {
    pub slices: Vec<SliceProfile>,
    pub slice_weight: f64,
    pub dim: usize,
}

impl GoodProfile {
    pub fn new_1d(breakpoints: Vec<(f64, f64)>) -> Result<Self, GoodError> {
        let g = Self {
            slices: vec![SliceProfile::new(0.0, breakpoints)],
            slice_weight: 1.0,
            dim: 1,
        };
        g.slope_floor()?;
        Ok(g)
    }

    pub fn new_2d(slices: Vec<SliceProfile>, slice_weight: f64) -> Result<Self, GoodError> {
        if slices.is_empty() || !(slice_weight > 0.0) {
            return Err(GoodError::Invalid("need slices and positive slice weight".into()));
        }
        let g = Self {
            slices,
            slice_weight,
            dim: 2,
        };
        g.slope_floor()?;
        Ok(g)
    }

    /// Validates every slice; returns the global slope floor.
    pub fn slope_floor(&self) -> Result<f64, GoodError> {
        let mut floor = f64::INFINITY;
        for s in &self.slices {
            floor = floor.min(s.validate()?);
        }
        Ok(floor)
    }

    pub fn max_value(&self) -> f64 {
        self.slices.iter().map(|s| s.max_value()).fold(0.0, f64::max)
    }

    /// Extent of the y-coordinates (kernel table range driver).
    pub fn diameter(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in &self.slices {
            lo = lo.min(s.breakpoints.first().unwrap().0);
            hi = hi.max(s.breakpoints.last().unwrap().0);
        }
        hi - lo
    }

    /// ‖f‖_p^p, exact for the piecewise-linear slices.
    pub fn lp_norm_p(&self, p: f64) -> f64 {
        self.slice_weight
            * kahan_sum(self.slices.iter().map(|s| s.lp_integral(p)))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("gpf v1\n");
        let _ = writeln!(out, "dim {}", self.dim);
        let _ = writeln!(out, "slice_weight {}", self.slice_weight);
        let _ = writeln!(out, "slices {}", self.slices.len());
        for s in &self.slices {
            let _ = writeln!(out, "slice {} {}", s.pos, s.breakpoints.len());
            for (y, v) in &s.breakpoints {
                let _ = writeln!(out, "{y} {v}");
            }
        }
        out
    }

    pub fn write_to(&self, path: &Path) -> Result<(), GoodError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, GoodError> {
        let mut tokens = text.split_whitespace();
        let mut next = |what: &str| -> Result<String, GoodError> {
            tokens
                .next()
                .map(str::to_string)
                .ok_or_else(|| GoodError::Parse(format!("missing {what}")))
        };
        if next("header")? != "gpf" || next("version")? != "v1" {
            return Err(GoodError::Parse("bad header".into()));
        }
        let expect = |tok: String, want: &str| -> Result<(), GoodError> {
            if tok != want {
                return Err(GoodError::Parse(format!("expected {want}, got {tok}")));
            }
            Ok(())
        };
        expect(next("dim")?, "dim")?;
        let dim: usize = next("dim value")?
            .parse()
            .map_err(|_| GoodError::Parse("bad dim".into()))?;
        expect(next("slice_weight")?, "slice_weight")?;
        let slice_weight: f64 = next("slice_weight value")?
            .parse()
            .map_err(|_| GoodError::Parse("bad slice_weight".into()))?;
        expect(next("slices")?, "slices")?;
        let n: usize = next("slice count")?
            .parse()
            .map_err(|_| GoodError::Parse("bad slice count".into()))?;
        let mut slices = Vec::with_capacity(n);
        for _ in 0..n {
            expect(next("slice")?, "slice")?;
            let pos: f64 = next("slice pos")?
                .parse()
                .map_err(|_| GoodError::Parse("bad slice pos".into()))?;
            let k: usize = next("breakpoint count")?
                .parse()
                .map_err(|_| GoodError::Parse("bad breakpoint count".into()))?;
            let mut bps = Vec::with_capacity(k);
            for _ in 0..k {
                let y: f64 = next("y")?
                    .parse()
                    .map_err(|_| GoodError::Parse("bad breakpoint y".into()))?;
                let v: f64 = next("v")?
                    .parse()
                    .map_err(|_| GoodError::Parse("bad breakpoint value".into()))?;
                bps.push((y, v));
            }
            slices.push(SliceProfile::new(pos, bps));
        }
        let g = Self {
            slices,
            slice_weight,
            dim,
        };
        g.slope_floor()?;
        Ok(g)
    }

    pub fn read_from(path: &Path) -> Result<Self, GoodError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
    }
}

// ---------------------------------------------------------------------------
// Kernel antiderivatives on log-uniform tables
// ---------------------------------------------------------------------------

/// Cached first and second antiderivatives K̄, K̄̄ of the slice kernel,
/// tabulated on a log-uniform grid (1e−6 ≤ r ≤ rmax) with cubic Hermite
/// interpolation. K̄ is odd and increasing; K̄̄ is even and convex.
pub struct KernelAntiderivatives {
    spec: KernelSpec,
    rmin: f64,
    rmax: f64,
    u0: f64,
    du: f64,
    kbar_vals: Vec<f64>,
    kbar_du: Vec<f64>,
    kbbar_vals: Vec<f64>,
    kbbar_du: Vec<f64>,
    k0: f64,
    kbar_rmin: f64,
    kbbar_rmin: f64,
}

const TABLE_NODES: usize = 1025;

impl KernelAntiderivatives {
    pub fn new(spec: &KernelSpec, rmax: f64) -> Result<Self, GoodError> {
        if spec.eps <= 0.0 && spec.ell <= 0.0 {
            return Err(GoodError::BadSpec(
                "antiderivative tables need eps > 0 or a positive slice offset".into(),
            ));
        }
        let rmin = 1e-6f64;
        let rmax = rmax.max(1.0);
        let u0 = rmin.ln();
        let du = (rmax.ln() - u0) / (TABLE_NODES - 1) as f64;
        let k = |r: f64| spec.k_slice(r);
        let k0 = k(0.0);
        let nodes: Vec<f64> = (0..TABLE_NODES).map(|i| (u0 + du * i as f64).exp()).collect();

        let kbar_rmin = adaptive_simpson(&k, 0.0, rmin, 1e-18);
        let mut kbar_vals = Vec::with_capacity(TABLE_NODES);
        let mut acc = kbar_rmin;
        kbar_vals.push(acc);
        for i in 1..TABLE_NODES {
            acc += adaptive_simpson(&k, nodes[i - 1], nodes[i], 1e-14 * (nodes[i] - nodes[i - 1]).max(1e-8));
            kbar_vals.push(acc);
        }
        let kbar_du: Vec<f64> = nodes.iter().map(|&r| k(r) * r).collect();

        // K̄ evaluator over the freshly built table for the second pass.
        let eval_kbar = |r: f64| -> f64 {
            if r <= rmin {
                return k0 * r + (kbar_rmin - k0 * rmin) * (r / rmin).powi(2);
            }
            hermite_log(r, u0, du, &kbar_vals, &kbar_du)
        };
        let kbbar_rmin = adaptive_simpson(&|x| eval_kbar(x), 0.0, rmin, 1e-18);
        let mut kbbar_vals = Vec::with_capacity(TABLE_NODES);
        let mut acc2 = kbbar_rmin;
        kbbar_vals.push(acc2);
        for i in 1..TABLE_NODES {
            // Composite Simpson per log cell; K̄ is smooth on this scale.
            let (a, b) = (nodes[i - 1], nodes[i]);
            let m = 0.5 * (a + b);
            acc2 += (b - a) / 6.0 * (eval_kbar(a) + 4.0 * eval_kbar(m) + eval_kbar(b));
            kbbar_vals.push(acc2);
        }
        let kbbar_du: Vec<f64> = nodes
            .iter()
            .zip(&kbar_vals)
            .map(|(&r, &kb)| kb * r)
            .collect();

        Ok(Self {
            spec: *spec,
            rmin,
            rmax,
            u0,
            du,
            kbar_vals,
            kbar_du,
            kbbar_vals,
            kbbar_du,
            k0,
            kbar_rmin,
            kbbar_rmin,
        })
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    /// K̄(r) = ∫₀^r K, odd in r.
    #[inline]
    pub fn kbar(&self, r: f64) -> f64 {
        let a = r.abs();
        let v = if a <= self.rmin {
            self.k0 * a + (self.kbar_rmin - self.k0 * self.rmin) * (a / self.rmin) * (a / self.rmin)
        } else if a >= self.rmax {
            *self.kbar_vals.last().unwrap() + self.spec.k_slice(self.rmax) * (a - self.rmax)
        } else {
            hermite_log(a, self.u0, self.du, &self.kbar_vals, &self.kbar_du)
        };
        if r < 0.0 {
            -v
        } else {
            v
        }
    }

    /// K̄̄(r) = ∫₀^r K̄, even in r.
    #[inline]
    pub fn kbbar(&self, r: f64) -> f64 {
        let a = r.abs();
        if a <= self.rmin {
            return 0.5 * self.k0 * a * a
                + (self.kbbar_rmin - 0.5 * self.k0 * self.rmin * self.rmin)
                    * (a / self.rmin).powi(3);
        }
        if a >= self.rmax {
            let last = *self.kbbar_vals.last().unwrap();
            return last + self.kbar(self.rmax) * (a - self.rmax);
        }
        hermite_log(a, self.u0, self.du, &self.kbbar_vals, &self.kbbar_du)
    }
}

/// Cubic Hermite interpolation in u = ln r with derivative data in u.
#[inline]
fn hermite_log(r: f64, u0: f64, du: f64, vals: &[f64], dv: &[f64]) -> f64 {
    let u = r.ln();
    let x = (u - u0) / du;
    let i = (x as usize).min(vals.len() - 2);
    let t = x - i as f64;
    let (v0, v1) = (vals[i], vals[i + 1]);
    let (d0, d1) = (dv[i] * du, dv[i + 1] * du);
    let t2 = t * t;
    let t3 = t2 * t;
    v0 * (2.0 * t3 - 3.0 * t2 + 1.0)
        + d0 * (t3 - 2.0 * t2 + t)
        + v1 * (-2.0 * t3 + 3.0 * t2)
        + d1 * (t3 - t2)
}

/// Direct (uncached) evaluation of the first and second antiderivatives by
/// adaptive quadrature; the reference implementation for the tables.
pub fn antiderivatives(spec: &KernelSpec, r: f64) -> Result<(f64, f64), GoodError> {
    if spec.eps <= 0.0 && spec.ell <= 0.0 {
        return Err(GoodError::BadSpec("antiderivatives need an integrable kernel".into()));
    }
    let a = r.abs();
    let k = |x: f64| spec.k_slice(x);
    let first = adaptive_simpson(&k, 0.0, a, 1e-12 * a.max(1e-6));
    let second = adaptive_simpson(&|x| (a - x) * k(x), 0.0, a, 1e-12 * a.max(1e-6));
    Ok((first.copysign(r), second))
}

// ---------------------------------------------------------------------------
// Level quadrature scaffolding
// ---------------------------------------------------------------------------

/// Quadrature resolution for the (h, u) double integrals.
#[derive(Clone, Copy, Debug)]
pub struct LevelQuadrature {
    pub heights: usize,
}

impl Default for LevelQuadrature {
    fn default() -> Self {
        Self { heights: 256 }
    }
}

impl LevelQuadrature {
    pub fn new(heights: usize) -> Self {
        Self { heights }
    }
}

/// Per-height-cell crossing data of one slice.
struct CellData {
    /// Shrunk cell weight (exceptional heights trimmed away).
    weight: f64,
    crossings: Vec<Crossing>,
    /// Sign of y_{2k−1} + y_{2k} per interval.
    pair_sign: Vec<i8>,
}

struct SliceLevelData {
    cells: Vec<CellData>,
    shrunk_cells: usize,
}

fn slice_level_data(slice: &SliceProfile, max: f64, n: usize) -> SliceLevelData {
    let w = max / n as f64;
    let exceptional = slice.exceptional_heights();
    let scale = slice
        .breakpoints
        .iter()
        .map(|b| b.0.abs())
        .fold(0.0, f64::max);
    let tol = 1e-12 * (1.0 + scale);
    let mut cells = Vec::with_capacity(n);
    let mut shrunk = 0usize;
    for c in 0..n {
        let (lo, hi) = (c as f64 * w, (c + 1) as f64 * w);
        let h = 0.5 * (lo + hi);
        let mut sub_lo = lo;
        let mut sub_hi = hi;
        for &e in &exceptional {
            if e > lo && e < hi {
                if e < h {
                    sub_lo = sub_lo.max(e);
                } else {
                    sub_hi = sub_hi.min(e);
                }
            }
        }
        if sub_lo > lo || sub_hi < hi {
            shrunk += 1;
        }
        let crossings = slice.crossings(h);
        let pair_sign = crossings
            .chunks(2)
            .map(|pair| {
                if pair.len() < 2 {
                    0
                } else {
                    let s = pair[0].y + pair[1].y;
                    if s > tol {
                        1
                    } else if s < -tol {
                        -1
                    } else {
                        0
                    }
                }
            })
            .collect();
        cells.push(CellData {
            weight: sub_hi - sub_lo,
            crossings,
            pair_sign,
        });
    }
    SliceLevelData {
        cells,
        shrunk_cells: shrunk,
    }
}

/// Exact cell averages of |h−u|^{p−2} over same-size height cells at offset
/// d, via the second antiderivative |t|^p / (p(p−1)).
fn height_factor_table(p: f64, w: f64, n: usize) -> Vec<f64> {
    let f = |t: f64| t.abs().powf(p) / (p * (p - 1.0));
    (0..n)
        .map(|d| {
            let d = d as f64;
            (f((d + 1.0) * w) - 2.0 * f(d * w) + f((d - 1.0) * w)) / (w * w)
        })
        .collect()
}

/// Distinct slice-offset kernel tables, indexed by |i − j|.
fn build_tables(
    g: &GoodProfile,
    spec: &KernelSpec,
) -> Result<Vec<Arc<KernelAntiderivatives>>, GoodError> {
    let rmax = 2.0 * g.diameter().max(1.0);
    match g.dim {
        1 => Ok(vec![Arc::new(KernelAntiderivatives::new(spec, rmax)?)]),
        2 => {
            let n = g.slices.len();
            let mut out = Vec::with_capacity(n);
            for d in 0..n {
                let ell = (g.slices[d].pos - g.slices[0].pos).abs();
                out.push(Arc::new(KernelAntiderivatives::new(
                    &spec.with_ell(ell),
                    rmax,
                )?));
            }
            Ok(out)
        }
        _ => unreachable!(),
    }
}

fn check_spec(g: &GoodProfile, spec: &KernelSpec) -> Result<(), GoodError> {
    spec.validate().map_err(|e| GoodError::BadSpec(e.to_string()))?;
    if spec.dim != g.dim {
        return Err(GoodError::BadSpec("kernel dim does not match profile".into()));
    }
    Ok(())
}

/// Shared driver: Σ over slice pairs and height cells of the pairwise term,
/// with the |h−u|^{p−2} factor cell-averaged exactly.
fn level_double_sum(
    g: &GoodProfile,
    data: &[SliceLevelData],
    tables: &[Arc<KernelAntiderivatives>],
    factors: &[f64],
    term: impl Fn(&KernelAntiderivatives, &CellData, &CellData) -> f64 + Sync,
) -> f64 {
    let n_slices = g.slices.len();
    let pairs: Vec<(usize, usize)> = (0..n_slices)
        .flat_map(|i| (i..n_slices).map(move |j| (i, j)))
        .collect();
    let partials: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let kad = &tables[j - i];
            let mult = if i == j { 1.0 } else { 2.0 };
            let mut acc = KahanSum::new();
            for (a, ca) in data[i].cells.iter().enumerate() {
                if ca.crossings.is_empty() || ca.weight == 0.0 {
                    continue;
                }
                for (b, cb) in data[j].cells.iter().enumerate() {
                    if cb.crossings.is_empty() || cb.weight == 0.0 {
                        continue;
                    }
                    let t = term(kad, ca, cb);
                    if t != 0.0 {
                        acc.add(mult * factors[a.abs_diff(b)] * ca.weight * cb.weight * t);
                    }
                }
            }
            acc.value()
        })
        .collect();
    let slice_factor = g.slice_weight * g.slice_weight;
    slice_factor * kahan_sum(partials)
}

fn kbbar_bracket(kad: &KernelAntiderivatives, ca: &CellData, cb: &CellData) -> f64 {
    let mut sum = 0.0;
    for xs in ca.crossings.chunks(2) {
        if xs.len() < 2 {
            continue;
        }
        for ys in cb.crossings.chunks(2) {
            if ys.len() < 2 {
                continue;
            }
            sum += kad.kbbar(xs[1].y - ys[1].y) - kad.kbbar(xs[1].y - ys[0].y)
                - kad.kbbar(xs[0].y - ys[1].y)
                + kad.kbbar(xs[0].y - ys[0].y);
        }
    }
    sum
}

fn kbar_signed_bracket(kad: &KernelAntiderivatives, ca: &CellData, cb: &CellData) -> f64 {
    let mut sum = 0.0;
    for (k, xs) in ca.crossings.chunks(2).enumerate() {
        if xs.len() < 2 {
            continue;
        }
        let sx = ca.pair_sign[k];
        for (l, ys) in cb.crossings.chunks(2).enumerate() {
            if ys.len() < 2 {
                continue;
            }
            let diff = (sx - cb.pair_sign[l]) as f64;
            if diff == 0.0 {
                continue;
            }
            let bracket = kad.kbar(xs[1].y - ys[1].y) - kad.kbar(xs[1].y - ys[0].y)
                - kad.kbar(xs[0].y - ys[1].y)
                + kad.kbar(xs[0].y - ys[0].y);
            sum += bracket * diff;
        }
    }
    sum
}

fn prepare(
    g: &GoodProfile,
    spec: &KernelSpec,
    quad: &LevelQuadrature,
) -> Result<(Vec<SliceLevelData>, Vec<Arc<KernelAntiderivatives>>, Vec<f64>, f64), GoodError> {
    check_spec(g, spec)?;
    let max = g.max_value();
    if !(max > 0.0) {
        return Err(GoodError::Invalid("profile is identically zero".into()));
    }
    let n = quad.heights;
    let data: Vec<SliceLevelData> = g
        .slices
        .iter()
        .map(|s| slice_level_data(s, max, n))
        .collect();
    let tables = build_tables(g, spec)?;
    let factors = height_factor_table(spec.p, max / n as f64, n);
    Ok((data, tables, factors, max))
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

/// Regularized energy F_ε^p of a good profile through the level-set
/// representation: the interaction part is the double height quadrature of
/// the four-point second-antiderivative bracket, and C_ε‖f‖_p^p is added
/// back analytically.
pub fn level_set_energy(
    g: &GoodProfile,
    spec: &KernelSpec,
    quad: &LevelQuadrature,
) -> Result<EnergyReport, GoodError> {
    if spec.eps <= 0.0 {
        return Err(GoodError::BadSpec("level-set energy needs eps > 0".into()));
    }
    let (data, tables, factors, max) = prepare(g, spec, quad)?;
    let i_eps = spec.p * (spec.p - 1.0) * level_double_sum(g, &data, &tables, &factors, kbbar_bracket);
    let shrunk: usize = data.iter().map(|d| d.shrunk_cells).sum();
    // Error estimate from halving the height resolution (tables reused).
    let n2 = (quad.heights / 2).max(8);
    let data2: Vec<SliceLevelData> = g.slices.iter().map(|s| slice_level_data(s, max, n2)).collect();
    let factors2 = height_factor_table(spec.p, max / n2 as f64, n2);
    let i_coarse =
        spec.p * (spec.p - 1.0) * level_double_sum(g, &data2, &tables, &factors2, kbbar_bracket);
    let c_eps = spec
        .c_eps()
        .map_err(|e| GoodError::BadSpec(e.to_string()))?;
    let f_eps = i_eps + c_eps * g.lp_norm_p(spec.p);
    Ok(EnergyReport {
        value: f_eps,
        method: format!("level-set heights={} shrunk_cells={shrunk}", quad.heights),
        error_estimate: (i_eps - i_coarse).abs(),
        c_eps: Some(c_eps),
        i_eps: Some(i_eps),
    })
}

/// Energy of the profile with every level interval rigidly displaced by
/// −delta·sgn(center); the finite-difference oracle for the rearrangement
/// derivative. `delta` may be negative.
pub fn level_set_energy_displaced(
    g: &GoodProfile,
    spec: &KernelSpec,
    quad: &LevelQuadrature,
    delta: f64,
) -> Result<f64, GoodError> {
    if spec.eps <= 0.0 {
        return Err(GoodError::BadSpec("level-set energy needs eps > 0".into()));
    }
    let (mut data, tables, factors, _) = prepare(g, spec, quad)?;
    for sd in &mut data {
        for cell in &mut sd.cells {
            for (k, pair) in cell.crossings.chunks_mut(2).enumerate() {
                if pair.len() < 2 {
                    continue;
                }
                let shift = -delta * cell.pair_sign[k] as f64;
                pair[0].y += shift;
                pair[1].y += shift;
            }
        }
    }
    let i_eps = spec.p * (spec.p - 1.0) * level_double_sum(g, &data, &tables, &factors, kbbar_bracket);
    let c_eps = spec
        .c_eps()
        .map_err(|e| GoodError::BadSpec(e.to_string()))?;
    Ok(i_eps + c_eps * g.lp_norm_p(spec.p))
}

/// τ-derivative of the regularized energy at τ = 0: the sign-weighted
/// four-point first-antiderivative bracket, nonpositive by construction,
/// zero exactly when every level interval is centered.
///
/// ε = 0 is evaluated as the monotone limit over ε ∈ {1e−2, 1e−3, 1e−4}.
pub fn nonlocal_derivative(
    g: &GoodProfile,
    spec: &KernelSpec,
    quad: &LevelQuadrature,
) -> Result<EnergyReport, GoodError> {
    if spec.eps <= 0.0 {
        let ladder = [1e-2, 1e-3, 1e-4];
        let mut vals = Vec::new();
        for eps in ladder {
            let mut s = *spec;
            s.eps = eps;
            vals.push(nonlocal_derivative(g, &s, quad)?.value);
        }
        let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for w in vals.windows(2) {
            if w[1] > w[0] + 1e-6 * scale.max(1e-12) {
                return Err(GoodError::Invalid(
                    "epsilon limit is not monotone; refine the quadrature".into(),
                ));
            }
        }
        return Ok(EnergyReport {
            value: vals[2],
            method: "level-set-derivative-eps-limit".into(),
            error_estimate: (vals[2] - vals[1]).abs(),
            c_eps: None,
            i_eps: None,
        });
    }
    let value = |n: usize| -> Result<f64, GoodError> {
        let (data, tables, factors, _) = prepare(g, spec, &LevelQuadrature::new(n))?;
        Ok(-spec.p
            * (spec.p - 1.0)
            * level_double_sum(g, &data, &tables, &factors, kbar_signed_bracket))
    };
    let v = value(quad.heights)?;
    let v_coarse = value(quad.heights / 2)?;
    Ok(EnergyReport {
        value: v,
        method: "level-set-derivative".into(),
        error_estimate: (v - v_coarse).abs(),
        c_eps: None,
        i_eps: None,
    })
}

/// Geometry classes of an ordered interval pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BracketCase {
    Embedded,
    Separated,
    Overlapping,
}

/// The four-point bracket K̄(x₊−y₊) − K̄(x₊−y₋) − K̄(x₋−y₊) + K̄(x₋−y₋),
/// positive whenever the x-interval's center exceeds the y-interval's.
/// Also returns the geometric case of the pair.
pub fn kernel_bracket(
    x: (f64, f64),
    y: (f64, f64),
    kad: &KernelAntiderivatives,
) -> Result<(f64, BracketCase), GoodError> {
    let (xm, xp) = x;
    let (ym, yp) = y;
    if !(xm < xp && ym < yp) || (xp + xm) - (yp + ym) <= 0.0 {
        return Err(GoodError::InvalidOrdering);
    }
    let case = if (ym >= xm && yp <= xp) || (xm >= ym && xp <= yp) {
        BracketCase::Embedded
    } else if yp <= xm || xp <= ym {
        BracketCase::Separated
    } else {
        BracketCase::Overlapping
    };
    let v = kad.kbar(xp - yp) - kad.kbar(xp - ym) - kad.kbar(xm - yp) + kad.kbar(xm - ym);
    Ok((v, case))
}

/// Result of the local-derivative quadrature.
#[derive(Clone, Debug)]
pub struct LocalDerivative {
    pub value: f64,
    /// The p = 2 factored evaluation (algebraically identical), when p = 2.
    pub factored: Option<f64>,
    /// Height cells skipped because neighboring slices disagree on the
    /// crossing count.
    pub skipped_cells: usize,
}

/// τ-derivative bound of the local W^{1,p} seminorm for a 2D profile under
/// the box-regularized speed: a (slice, height) quadrature of the endpoint
/// bracket, active only where |y₊ + y₋| < ε.
pub fn local_derivative(
    g: &GoodProfile,
    p: f64,
    eps_speed: f64,
    quad: &LevelQuadrature,
) -> Result<LocalDerivative, GoodError> {
    if g.dim != 2 {
        return Err(GoodError::Invalid("local derivative needs a 2D profile".into()));
    }
    if !(p > 1.0) || !(eps_speed > 0.0) {
        return Err(GoodError::Invalid("need p > 1 and eps_speed > 0".into()));
    }
    let max = g.max_value();
    let n = quad.heights;
    let w = max / n as f64;
    let dx = g.slice_weight;
    let n_slices = g.slices.len();
    let mut total = KahanSum::new();
    let mut total_fact = KahanSum::new();
    let mut skipped = 0usize;

    // Recursive refinement of a height interval on one slice triple.
    // Contributions use midpoint crossings; cells straddling the box edge
    // |y₊+y₋| = ε are subdivided.
    struct Ctx<'a> {
        prev: &'a SliceProfile,
        cur: &'a SliceProfile,
        next: &'a SliceProfile,
        dx: f64,
        p: f64,
        eps: f64,
    }
    fn cell_value(ctx: &Ctx<'_>, lo: f64, hi: f64, depth: u32, skipped: &mut usize) -> (f64, f64) {
        let h = 0.5 * (lo + hi);
        let cs = ctx.cur.crossings(h);
        let cp = ctx.prev.crossings(h);
        let cn = ctx.next.crossings(h);
        if cs.is_empty() {
            return (0.0, 0.0);
        }
        if cp.len() != cs.len() || cn.len() != cs.len() {
            *skipped += 1;
            return (0.0, 0.0);
        }
        // Subdivide while any pair straddles the box edge.
        if depth > 0 {
            let straddles = |height: f64| -> Vec<bool> {
                let c = ctx.cur.crossings(height);
                c.chunks(2)
                    .map(|pr| pr.len() == 2 && (pr[0].y + pr[1].y).abs() < ctx.eps)
                    .collect()
            };
            let lo_act = straddles(lo + 1e-12 * (hi - lo));
            let hi_act = straddles(hi - 1e-12 * (hi - lo));
            let mid_act = straddles(h);
            if lo_act != mid_act || hi_act != mid_act {
                let m = 0.5 * (lo + hi);
                let (a, af) = cell_value(ctx, lo, m, depth - 1, skipped);
                let (b, bf) = cell_value(ctx, m, hi, depth - 1, skipped);
                return (a + b, af + bf);
            }
        }
        let mut acc = 0.0;
        let mut acc_f = 0.0;
        for (k, pair) in cs.chunks(2).enumerate() {
            if pair.len() < 2 {
                continue;
            }
            let (ym, yp) = (pair[0], pair[1]);
            let sum = ym.y + yp.y;
            if sum.abs() >= ctx.eps {
                continue;
            }
            let delta = 0.5 / ctx.eps;
            let dm = ym.dydh.abs();
            let dp = yp.dydh.abs();
            let am = (cn[2 * k].y - cp[2 * k].y) / (2.0 * ctx.dx);
            let ap = (cn[2 * k + 1].y - cp[2 * k + 1].y) / (2.0 * ctx.dx);
            let p = ctx.p;
            let pre = dp.powf(-p) * dm.powf(-p);
            let t1 = p * (ap * ap + 1.0).powf(0.5 * p - 1.0) * ap * (ap + am) * dp * dm.powf(p);
            let t2 = p * (am * am + 1.0).powf(0.5 * p - 1.0) * am * (ap + am) * dm * dp.powf(p);
            let t3 = -(p - 1.0) * (ap * ap + 1.0).powf(0.5 * p) * dm.powf(p) * (dp - dm);
            let t4 = (p - 1.0) * (am * am + 1.0).powf(0.5 * p) * dp.powf(p) * (dp - dm);
            acc += delta * pre * (t1 + t2 + t3 + t4);
            if p == 2.0 {
                let b = (dp + dm) * ((dp - dm) * (dp - dm) + (dm * ap + dp * am) * (dm * ap + dp * am));
                acc_f += delta * b / (dp * dp * dm * dm);
            }
        }
        ((hi - lo) * acc, (hi - lo) * acc_f)
    }

    for t in 1..n_slices.saturating_sub(1) {
        let ctx = Ctx {
            prev: &g.slices[t - 1],
            cur: &g.slices[t],
            next: &g.slices[t + 1],
            dx,
            p,
            eps: eps_speed,
        };
        for c in 0..n {
            let (v, vf) = cell_value(&ctx, c as f64 * w, (c + 1) as f64 * w, 8, &mut skipped);
            total.add(dx * v);
            total_fact.add(dx * vf);
        }
    }
    Ok(LocalDerivative {
        value: -total.value(),
        factored: if p == 2.0 { Some(-total_fact.value()) } else { None },
        skipped_cells: skipped,
    })
}

/// Measures of the moving-class partition and the boundary-pair evaluation
/// of the rearrangement derivative.
#[derive(Clone, Debug)]
pub struct AsymmetryReport {
    /// Measure of the region whose level intervals move left (center > 0).
    pub plus_measure: f64,
    /// Measure of the centered region.
    pub zero_measure: f64,
    /// Measure of the region whose level intervals move right.
    pub minus_measure: f64,
    /// Derivative assembled from the class-split pair sums.
    pub derivative: f64,
}

/// Classifies the support by the motion of each point's level interval and
/// evaluates the derivative through the class-split crossing pairs.
pub fn asymmetry_decomposition(
    g: &GoodProfile,
    spec: &KernelSpec,
    quad: &LevelQuadrature,
) -> Result<AsymmetryReport, GoodError> {
    if spec.eps <= 0.0 {
        return Err(GoodError::BadSpec("asymmetry decomposition needs eps > 0".into()));
    }
    let (data, tables, factors, _) = prepare(g, spec, quad)?;
    // Exact class measures by sweeping the piecewise-linear level structure.
    let (mut plus, mut zero, mut minus) = (0.0, 0.0, 0.0);
    for s in &g.slices {
        let (p_m, z_m, m_m) = class_measures(s);
        plus += g.slice_weight * p_m;
        zero += g.slice_weight * z_m;
        minus += g.slice_weight * m_m;
    }
    // Class-split pair sums: T(A,B) = Σ sgn_a sgn_b K̄(y_a − y_b) over
    // crossings a ∈ A (x side), b ∈ B (y side), with the |h−u|^{p−2}
    // factor restored. The derivative is
    //   −2 p (p−1) [ 2 T(+,−) + T(+,0) + T(0,−) ].
    let term = |kad: &KernelAntiderivatives, ca: &CellData, cb: &CellData| -> f64 {
        let mut t_pm = 0.0;
        let mut t_p0 = 0.0;
        let mut t_0m = 0.0;
        for (k, xs) in ca.crossings.chunks(2).enumerate() {
            if xs.len() < 2 {
                continue;
            }
            let sx = ca.pair_sign[k];
            for (l, ys) in cb.crossings.chunks(2).enumerate() {
                if ys.len() < 2 {
                    continue;
                }
                let sy = cb.pair_sign[l];
                if sx == sy {
                    continue;
                }
                // sgn(slope) is + at left endpoints, − at right endpoints.
                let pair_sum = kad.kbar(xs[0].y - ys[0].y) - kad.kbar(xs[0].y - ys[1].y)
                    - kad.kbar(xs[1].y - ys[0].y)
                    + kad.kbar(xs[1].y - ys[1].y);
                match (sx, sy) {
                    (1, -1) => t_pm += pair_sum,
                    (1, 0) => t_p0 += pair_sum,
                    (0, -1) => t_0m += pair_sum,
                    // Antisymmetric counterparts fold into the same sums.
                    (-1, 1) => t_pm += -pair_sum,
                    (0, 1) => t_p0 += -pair_sum,
                    (-1, 0) => t_0m += -pair_sum,
                    _ => {}
                }
            }
        }
        // Each unordered class pair was visited from both sides.
        0.5 * (2.0 * t_pm + t_p0 + t_0m)
    };
    let sum = level_double_sum(g, &data, &tables, &factors, term);
    let derivative = -2.0 * spec.p * (spec.p - 1.0) * sum;
    Ok(AsymmetryReport {
        plus_measure: plus,
        zero_measure: zero,
        minus_measure: minus,
        derivative,
    })
}

/// Exact per-slice measures of the three moving classes for a
/// piecewise-linear slice.
fn class_measures(slice: &SliceProfile) -> (f64, f64, f64) {
    let max = slice.max_value();
    if max == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let scale = slice
        .breakpoints
        .iter()
        .map(|b| b.0.abs())
        .fold(0.0, f64::max);
    let tol = 1e-12 * (1.0 + scale);
    let mut marks: Vec<f64> = slice
        .breakpoints
        .iter()
        .map(|b| b.1)
        .filter(|&v| v > 0.0 && v < max)
        .collect();
    marks.push(0.0);
    marks.push(max);
    marks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    marks.dedup();
    let (mut plus, mut zero, mut minus) = (0.0, 0.0, 0.0);
    for w in marks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo <= 0.0 {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let cr = slice.crossings(mid);
        for (k, pair) in cr.chunks(2).enumerate() {
            if pair.len() < 2 {
                continue;
            }
            // Pair sum is linear in h on this structure interval.
            let s_mid = pair[0].y + pair[1].y;
            let ds = pair[0].dydh + pair[1].dydh;
            let sweep = pair[0].dydh.abs() + pair[1].dydh.abs();
            let _ = k;
            if ds.abs() * (hi - lo) <= tol {
                // Constant-sum interval: one class throughout.
                let m = sweep * (hi - lo);
                if s_mid > tol {
                    plus += m;
                } else if s_mid < -tol {
                    minus += m;
                } else {
                    zero += m;
                }
            } else {
                // Split at the root of the linear pair sum, if interior.
                let h_root = mid - s_mid / ds;
                let split = h_root.clamp(lo, hi);
                for (a, b) in [(lo, split), (split, hi)] {
                    if b - a <= 0.0 {
                        continue;
                    }
                    let s_here = s_mid + ds * (0.5 * (a + b) - mid);
                    let m = sweep * (b - a);
                    if s_here > tol {
                        plus += m;
                    } else if s_here < -tol {
                        minus += m;
                    } else {
                        zero += m;
                    }
                }
            }
        }
    }
    (plus, zero, minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn spec_1d(eps: f64) -> KernelSpec {
        KernelSpec::new(0.3, 2.0, eps, 1)
    }

    #[test]
    fn antiderivative_parity_and_zero() {
        let spec = KernelSpec::new(0.25, 2.0, 1.0, 1);
        let (a, b) = antiderivatives(&spec, 0.0).unwrap();
        assert_eq!((a, b), (0.0, 0.0));
        for r in [0.3, 1.0, 2.7] {
            let (p1, p2) = antiderivatives(&spec, r).unwrap();
            let (m1, m2) = antiderivatives(&spec, -r).unwrap();
            assert!((p1 + m1).abs() < 1e-14);
            assert!((p2 - m2).abs() < 1e-14);
        }
    }

    #[test]
    fn antiderivative_matches_dense_trapezoid() {
        // K̄(1) = ∫₀¹ dr/(r^{1.5} + 1) against a 10⁶-point trapezoid rule.
        let spec = KernelSpec::new(0.25, 2.0, 1.0, 1);
        let m = 1_000_000usize;
        let h = 1.0 / m as f64;
        let k = |r: f64| 1.0 / (r.powf(1.5) + 1.0);
        let mut acc = 0.5 * (k(0.0) + k(1.0));
        for i in 1..m {
            acc += k(h * i as f64);
        }
        let dense = acc * h;
        let (kbar, _) = antiderivatives(&spec, 1.0).unwrap();
        assert!((kbar - dense).abs() <= 1e-8 * dense, "{kbar} vs {dense}");
        // The cached table agrees with the direct quadrature.
        let kad = KernelAntiderivatives::new(&spec, 8.0).unwrap();
        for r in [1e-5, 1e-3, 0.1, 1.0, 3.5, 7.9] {
            let (d1, d2) = antiderivatives(&spec, r).unwrap();
            assert!((kad.kbar(r) - d1).abs() <= 1e-8 * d1.abs().max(1e-10), "kbar {r}");
            assert!((kad.kbbar(r) - d2).abs() <= 1e-8 * d2.abs().max(1e-10), "kbbar {r}");
        }
    }

    #[test]
    fn gpf_round_trip_and_validation() {
        let g = fixtures::two_tents_good();
        let h = GoodProfile::from_text(&g.to_text()).unwrap();
        assert_eq!(g, h);
        assert!(GoodProfile::new_1d(vec![(0.0, 0.0), (1.0, 0.5), (1.5, 0.5), (2.0, 0.0)]).is_err());
        assert!(GoodProfile::new_1d(vec![(0.0, 0.1), (1.0, 0.0)]).is_err());
    }

    #[test]
    fn level_energy_matches_grid_quadrature_on_triangle() {
        let g = GoodProfile::new_1d(vec![(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)]).unwrap();
        let spec = KernelSpec::new(0.3, 2.0, 1e-2, 1);
        let level = level_set_energy(&g, &spec, &LevelQuadrature::new(512)).unwrap();
        let grid = crate::fixtures::triangle_1d(0.0, 2049);
        let direct = crate::energy::regularized_energy(&grid, &spec).unwrap();
        assert!(
            (level.value - direct.value).abs() <= 0.01 * direct.value,
            "{} vs {}",
            level.value,
            direct.value
        );
    }

    #[test]
    fn p2_energy_identity_against_convolution() {
        // F_ε² = C_ε‖g‖² − 2⟨g, W_ε∗g⟩.
        let g = fixtures::two_tents_good();
        let spec = spec_1d(1e-2);
        let level = level_set_energy(&g, &spec, &LevelQuadrature::new(512)).unwrap();
        let grid_fn = crate::grid::GridFunction::from_fn(
            vec![crate::grid::Axis::new(-4.0, 4.0, 4097)],
            |x| {
                let g = fixtures::two_tents_good();
                slice_eval(&g.slices[0], x[0])
            },
        )
        .unwrap();
        let conv = crate::energy::interaction_energy(&grid_fn, |r| spec.w(r));
        let expected = level.c_eps.unwrap() * g.lp_norm_p(2.0) - 2.0 * conv;
        assert!(
            (level.value - expected).abs() <= 0.01 * level.value.abs(),
            "{} vs {expected}",
            level.value
        );
    }

    fn slice_eval(s: &SliceProfile, y: f64) -> f64 {
        let b = &s.breakpoints;
        for w in b.windows(2) {
            let ((y0, v0), (y1, v1)) = (w[0], w[1]);
            if y >= y0 && y <= y1 {
                return v0 + (v1 - v0) * (y - y0) / (y1 - y0);
            }
        }
        0.0
    }

    #[test]
    fn zero_profile_energy_is_zero() {
        let r = GoodProfile::new_1d(vec![(0.0, 0.0), (1.0, 0.0)]);
        // An identically-zero profile fails the slope floor; the nearest
        // valid statement is a vanishing tent.
        assert!(r.is_err());
    }

    #[test]
    fn derivative_zero_for_symmetric_decreasing_profile() {
        let g = GoodProfile::new_1d(vec![(-1.2, 0.0), (0.0, 0.9), (1.2, 0.0)]).unwrap();
        let spec = spec_1d(1e-2);
        let d = nonlocal_derivative(&g, &spec, &LevelQuadrature::new(256)).unwrap();
        assert_eq!(d.value, 0.0);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let quad = LevelQuadrature::new(512);
        let spec = spec_1d(1e-2);
        for g in [
            fixtures::two_tents_good(),
            fixtures::straddle_tent_good(),
        ] {
            let d = nonlocal_derivative(&g, &spec, &quad).unwrap();
            let dtau = 1e-3;
            let ep = level_set_energy_displaced(&g, &spec, &quad, dtau).unwrap();
            let em = level_set_energy_displaced(&g, &spec, &quad, -dtau).unwrap();
            let fd = (ep - em) / (2.0 * dtau);
            assert!(
                (d.value - fd).abs() <= 0.05 * fd.abs().max(1e-10),
                "derivative {} vs fd {fd}",
                d.value
            );
            assert!(d.value < 0.0);
        }
    }

    #[test]
    fn derivative_monotone_in_eps() {
        let g = fixtures::two_tents_good();
        let quad = LevelQuadrature::new(256);
        let mut prev = 0.0;
        for (i, eps) in [1e-1, 1e-2, 1e-3].into_iter().enumerate() {
            let d = nonlocal_derivative(&g, &spec_1d(eps), &quad).unwrap().value;
            if i > 0 {
                assert!(d <= prev + 1e-9 * prev.abs());
            }
            prev = d;
        }
        // The ε = 0 entry point reports the ladder limit.
        let lim = nonlocal_derivative(&g, &spec_1d(0.0), &quad).unwrap();
        assert!(lim.value <= prev + 1e-9 * prev.abs());
    }

    #[test]
    fn bracket_cases_and_ordering() {
        let spec = spec_1d(1e-2);
        let kad = KernelAntiderivatives::new(&spec, 16.0).unwrap();
        let (v, c) = kernel_bracket((-1.0, 3.0), (-0.5, 0.5), &kad).unwrap();
        assert!(v > 0.0);
        assert_eq!(c, BracketCase::Embedded);
        let (v, c) = kernel_bracket((1.0, 2.0), (-2.0, -1.0), &kad).unwrap();
        assert!(v > 0.0);
        assert_eq!(c, BracketCase::Separated);
        let (v, c) = kernel_bracket((-0.5, 2.0), (-1.5, 0.5), &kad).unwrap();
        assert!(v > 0.0);
        assert_eq!(c, BracketCase::Overlapping);
        assert!(kernel_bracket((-1.0, 1.0), (-2.0, 2.0), &kad).is_err());
    }

    #[test]
    fn asymmetry_classes_and_derivative_cross_check() {
        let spec = spec_1d(1e-2);
        let quad = LevelQuadrature::new(512);
        // Symmetric decreasing: everything centered.
        let sym = GoodProfile::new_1d(vec![(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)]).unwrap();
        let r = asymmetry_decomposition(&sym, &spec, &quad).unwrap();
        assert!(r.plus_measure < 1e-9 && r.minus_measure < 1e-9);
        assert!((r.zero_measure - 2.0).abs() < 1e-9);
        assert_eq!(r.derivative, 0.0);

        // Two tents: classes split by tent, derivative matches the direct
        // level-set derivative.
        let g = fixtures::two_tents_good();
        let r = asymmetry_decomposition(&g, &spec, &quad).unwrap();
        assert!((r.plus_measure - 2.0).abs() < 1e-9, "{}", r.plus_measure);
        assert!((r.minus_measure - 1.9).abs() < 1e-9, "{}", r.minus_measure);
        assert!(r.zero_measure < 1e-9);
        let d = nonlocal_derivative(&g, &spec, &quad).unwrap();
        assert!(
            (r.derivative - d.value).abs() <= 0.05 * d.value.abs(),
            "{} vs {}",
            r.derivative,
            d.value
        );

        // A centered bump adds zero-class measure without breaking the
        // cross-check.
        let mix = fixtures::centered_plus_offset_good();
        let r = asymmetry_decomposition(&mix, &spec, &quad).unwrap();
        assert!((r.zero_measure - 1.8).abs() < 1e-9, "{}", r.zero_measure);
        let d = nonlocal_derivative(&mix, &spec, &quad).unwrap();
        assert!(
            (r.derivative - d.value).abs() <= 0.05 * d.value.abs().max(1e-10),
            "{} vs {}",
            r.derivative,
            d.value
        );
    }
}
