//! Radial profiles: nonnegative functions of |x| sampled on a uniform
//! radius grid, with the `.rad` text format.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::grid::{Axis, GridFunction};

#[derive(Debug, Error)]
pub enum RadialError {
    #[error("profile needs dim 1 or 2, rmax > 0 and at least two samples")]
    BadProfile,
    #[error("parse error in radial file: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Radial profile Φ(r) on the uniform grid r_j = j·rmax/(count−1).
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    pub dim: usize,
    pub rmax: f64,
    pub values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(dim: usize, rmax: f64, values: Vec<f64>) -> Result<Self, RadialError> {
        if !(dim == 1 || dim == 2) || !(rmax > 0.0) || values.len() < 2 {
            return Err(RadialError::BadProfile);
        }
        Ok(Self { dim, rmax, values })
    }

    /// Sample a radial function on `count` nodes.
    pub fn from_fn(dim: usize, rmax: f64, count: usize, f: impl Fn(f64) -> f64) -> Self {
        let step = rmax / (count - 1) as f64;
        let values = (0..count).map(|j| f(step * j as f64).max(0.0)).collect();
        Self { dim, rmax, values }
    }

    #[inline]
    pub fn step(&self) -> f64 {
        self.rmax / (self.values.len() - 1) as f64
    }

    /// Linear interpolation; zero outside [0, rmax].
    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        if r >= self.rmax {
            return 0.0;
        }
        let x = r / self.step();
        let i = (x as usize).min(self.values.len() - 2);
        let t = x - i as f64;
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }

    /// Volume of the unit ball in this dimension (2 on the line, π in the
    /// plane).
    pub fn unit_ball_volume(&self) -> f64 {
        unit_ball_volume(self.dim)
    }

    /// ∫ Φ(|x|) dx computed cell-exactly for the linear interpolant.
    pub fn mass(&self) -> f64 {
        let h = self.step();
        let mut acc = crate::util::KahanSum::new();
        for j in 0..self.values.len() - 1 {
            let (r0, r1) = (h * j as f64, h * (j + 1) as f64);
            let (v0, v1) = (self.values[j], self.values[j + 1]);
            match self.dim {
                // 2 ∫ Φ dr
                1 => acc.add((v0 + v1) * (r1 - r0)),
                // 2π ∫ Φ r dr with Φ linear on the cell
                2 => {
                    let a = (v1 - v0) / (r1 - r0);
                    let int = v0 * 0.5 * (r1 * r1 - r0 * r0)
                        + a * ((r1 * r1 * r1 - r0 * r0 * r0) / 3.0
                            - r0 * 0.5 * (r1 * r1 - r0 * r0));
                    acc.add(2.0 * std::f64::consts::PI * int);
                }
                _ => unreachable!(),
            }
        }
        acc.value()
    }

    /// Largest radius with a strictly positive sample.
    pub fn support_radius(&self) -> f64 {
        let mut last = 0.0;
        for (j, &v) in self.values.iter().enumerate() {
            if v > 0.0 {
                last = self.step() * (j + 1).min(self.values.len() - 1) as f64;
            }
        }
        last
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// True when the samples are nonincreasing in r (up to `tol`).
    pub fn is_nonincreasing(&self, tol: f64) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0] + tol)
    }

    /// Embed into a 1D grid function on [−rmax−pad, rmax+pad].
    pub fn to_grid_1d(&self, count: usize, pad: f64) -> GridFunction {
        let half = self.rmax + pad;
        let ax = Axis::new(-half, half, count);
        GridFunction::from_fn(vec![ax], |x| self.eval(x[0])).unwrap()
    }

    /// Embed into a 2D grid function on the padded square.
    pub fn to_grid_2d(&self, count: usize, pad: f64) -> GridFunction {
        let half = self.rmax + pad;
        let ax = Axis::new(-half, half, count);
        GridFunction::from_fn(vec![ax, ax], |x| self.eval((x[0] * x[0] + x[1] * x[1]).sqrt()))
            .unwrap()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("rad v1\n");
        let _ = writeln!(out, "dim {}", self.dim);
        let _ = writeln!(out, "rmax {}", self.rmax);
        let _ = writeln!(out, "count {}", self.values.len());
        out.push_str("values\n");
        for v in &self.values {
            let _ = writeln!(out, "{v}");
        }
        out
    }

    pub fn write_to(&self, path: &Path) -> Result<(), RadialError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, RadialError> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| RadialError::Parse("empty file".into()))?;
        if header.trim() != "rad v1" {
            return Err(RadialError::Parse(format!("bad header {header:?}")));
        }
        let mut field = |name: &str| -> Result<String, RadialError> {
            let line = lines
                .next()
                .ok_or_else(|| RadialError::Parse(format!("missing {name}")))?;
            line.trim()
                .strip_prefix(name)
                .map(|s| s.trim().to_string())
                .ok_or_else(|| RadialError::Parse(format!("bad {name} line {line:?}")))
        };
        let dim: usize = field("dim")?
            .parse()
            .map_err(|_| RadialError::Parse("bad dim".into()))?;
        let rmax: f64 = field("rmax")?
            .parse()
            .map_err(|_| RadialError::Parse("bad rmax".into()))?;
        let count: usize = field("count")?
            .parse()
            .map_err(|_| RadialError::Parse("bad count".into()))?;
        let marker = field("values")?;
        if !marker.is_empty() {
            return Err(RadialError::Parse("bad values marker".into()));
        }
        let mut values = Vec::with_capacity(count);
        for line in lines {
            for tok in line.split_whitespace() {
                values.push(
                    tok.parse::<f64>()
                        .map_err(|_| RadialError::Parse(format!("bad value {tok:?}")))?,
                );
            }
        }
        if values.len() != count {
            return Err(RadialError::Parse(format!(
                "expected {count} values, got {}",
                values.len()
            )));
        }
        Self::new(dim, rmax, values)
    }

    pub fn read_from(path: &Path) -> Result<Self, RadialError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
    }
}

pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => std::f64::consts::PI,
        _ => panic!("unsupported dimension {dim}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_mass_is_one() {
        let p = RadialProfile::from_fn(1, 1.0, 4097, |r| 1.0 - r);
        assert!((p.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cone_mass_in_the_plane() {
        // 3/π (1−r)_+ has unit mass in 2D.
        let c = 3.0 / std::f64::consts::PI;
        let p = RadialProfile::from_fn(2, 1.0, 4097, |r| c * (1.0 - r));
        assert!((p.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rad_round_trip() {
        let p = RadialProfile::from_fn(2, 1.5, 33, |r| (1.0 - r * r).max(0.0));
        let q = RadialProfile::from_text(&p.to_text()).unwrap();
        assert_eq!(p, q);
    }
}
