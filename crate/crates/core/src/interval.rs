//! Exact one-dimensional rearrangement engine.
//!
//! An [`IntervalUnion`] is a finite disjoint union of open intervals. Each
//! interval translates toward the origin at unit speed and stops once it is
//! centered; when two intervals touch they are replaced by their union and the
//! motion restarts. The simulation is event-driven: it advances analytically
//! from event to event (a merge or an interval reaching center), so measure
//! preservation and the semigroup property hold to machine precision.

/// Finite disjoint union of open intervals, sorted by left endpoint.
///
/// Touching or overlapping inputs are merged and degenerate (zero-length)
/// intervals are dropped on construction, so the stored spans always satisfy
/// `a_i < b_i < a_{i+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalUnion {
    spans: Vec<(f64, f64)>,
}

/// First contact between two intervals of the motion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MergeEvent {
    /// Time of first contact.
    pub time: f64,
    /// Index (in the input union) of the left interval of the touching pair.
    pub left_index: usize,
    /// Index of the right interval of the touching pair.
    pub right_index: usize,
}

/// Touching endpoints closer than this (relative to the local scale) are
/// merged; event times are computed analytically so only rounding residue
/// ever lands here.
const TOUCH_TOL: f64 = 1e-12;

#[inline]
fn speed(a: f64, b: f64) -> f64 {
    // Unit speed toward the origin; a centered interval is stationary.
    let c = a + b;
    if c > 0.0 {
        -1.0
    } else if c < 0.0 {
        1.0
    } else {
        0.0
    }
}

impl IntervalUnion {
    /// Normalizing constructor: drops degenerate spans, sorts, merges
    /// anything touching or overlapping.
    pub fn new(spans: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut v: Vec<(f64, f64)> = spans
            .into_iter()
            .filter(|&(a, b)| b > a && a.is_finite() && b.is_finite())
            .collect();
        v.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(v.len());
        for (a, b) in v {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Self { spans: merged }
    }

    pub fn empty() -> Self {
        Self { spans: Vec::new() }
    }

    pub fn spans(&self) -> &[(f64, f64)] {
        &self.spans
    }

    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    /// Total measure Σ (b_i − a_i).
    pub fn measure(&self) -> f64 {
        let mut acc = crate::util::KahanSum::new();
        for &(a, b) in &self.spans {
            acc.add(b - a);
        }
        acc.value()
    }

    /// Symmetric rearrangement: the single centered interval of equal measure.
    pub fn symmetric_rearrangement(&self) -> Self {
        let m = self.measure();
        if m <= 0.0 {
            Self::empty()
        } else {
            Self {
                spans: vec![(-0.5 * m, 0.5 * m)],
            }
        }
    }

    /// Earliest time at which two intervals of the motion touch, together
    /// with the indices of the touching pair. `None` when fewer than two
    /// intervals exist.
    pub fn next_merge_time(&self) -> Option<MergeEvent> {
        if self.len() < 2 {
            return None;
        }
        let mut spans = self.spans.clone();
        let ids: Vec<usize> = (0..spans.len()).collect();
        let mut elapsed = 0.0;
        loop {
            let (dt, touch) = next_event(&spans);
            let dt = dt?;
            advance(&mut spans, dt);
            elapsed += dt;
            if touch {
                // Leftmost touching pair of this event.
                for i in 0..spans.len() - 1 {
                    if spans[i + 1].0 - spans[i].1 <= touch_slack(&spans, i) {
                        return Some(MergeEvent {
                            time: elapsed,
                            left_index: ids[i],
                            right_index: ids[i + 1],
                        });
                    }
                }
                // Rounding pushed the gap just past zero; keep stepping.
            }
        }
    }

    /// State of the motion at time `tau`.
    pub fn steiner_motion(&self, tau: f64) -> Self {
        assert!(tau >= 0.0, "motion time must be nonnegative");
        let mut spans = self.spans.clone();
        let mut remaining = tau;
        while remaining > 0.0 && !spans.is_empty() {
            let (dt, _) = next_event(&spans);
            match dt {
                Some(dt) if dt < remaining => {
                    advance(&mut spans, dt);
                    merge_touching(&mut spans);
                    remaining -= dt;
                }
                _ => {
                    advance(&mut spans, remaining);
                    merge_touching(&mut spans);
                    break;
                }
            }
        }
        Self { spans }
    }

    /// Finite time after which the motion has reached the symmetric
    /// rearrangement (all merges done and the last interval centered).
    pub fn time_to_symmetric(&self) -> f64 {
        let mut spans = self.spans.clone();
        let mut elapsed = 0.0;
        while spans.len() > 1 {
            let (dt, _) = next_event(&spans);
            let dt = dt.expect("two or more intervals always produce an event");
            advance(&mut spans, dt);
            merge_touching(&mut spans);
            elapsed += dt;
        }
        if let Some(&(a, b)) = spans.first() {
            elapsed += 0.5 * (a + b).abs();
        }
        elapsed
    }

    /// Set containment with slack on endpoints.
    pub fn contains(&self, other: &Self, slack: f64) -> bool {
        other.spans.iter().all(|&(a, b)| {
            self.spans
                .iter()
                .any(|&(c, d)| c - slack <= a && b <= d + slack)
        })
    }

    /// Hausdorff distance between the boundary point sets.
    pub fn boundary_distance(&self, other: &Self) -> f64 {
        let pts = |u: &Self| -> Vec<f64> {
            u.spans.iter().flat_map(|&(a, b)| [a, b]).collect()
        };
        let (xs, ys) = (pts(self), pts(other));
        if xs.is_empty() || ys.is_empty() {
            return if xs.len() == ys.len() { 0.0 } else { f64::INFINITY };
        }
        let one_sided = |from: &[f64], to: &[f64]| -> f64 {
            from.iter()
                .map(|&p| {
                    to.iter()
                        .map(|&q| (p - q).abs())
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        };
        one_sided(&xs, &ys).max(one_sided(&ys, &xs))
    }

    /// Intersection with another union.
    pub fn intersect(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.spans.len() && j < other.spans.len() {
            let (a1, b1) = self.spans[i];
            let (a2, b2) = other.spans[j];
            let lo = a1.max(a2);
            let hi = b1.min(b2);
            if hi > lo {
                out.push((lo, hi));
            }
            if b1 <= b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self { spans: out }
    }

    /// Rigid translation (helper for fixtures and oracles).
    pub fn translated(&self, dx: f64) -> Self {
        Self {
            spans: self.spans.iter().map(|&(a, b)| (a + dx, b + dx)).collect(),
        }
    }
}

#[inline]
fn touch_slack(spans: &[(f64, f64)], i: usize) -> f64 {
    TOUCH_TOL * (1.0 + spans[i].1.abs().max(spans[i + 1].0.abs()))
}

/// Time to the next event (an interval reaching center or a pair touching),
/// and whether the nearest event is a touch. `None` when nothing moves.
fn next_event(spans: &[(f64, f64)]) -> (Option<f64>, bool) {
    let mut best: Option<f64> = None;
    let mut is_touch = false;
    for (i, &(a, b)) in spans.iter().enumerate() {
        let v = speed(a, b);
        if v != 0.0 {
            let t = 0.5 * (a + b).abs();
            if best.map_or(true, |cur| t < cur) {
                best = Some(t);
                is_touch = false;
            }
        }
        if i + 1 < spans.len() {
            let (a2, b2) = spans[i + 1];
            let closing = v - speed(a2, b2);
            if closing > 0.0 {
                let t = (a2 - b) / closing;
                if best.map_or(true, |cur| t < cur) {
                    best = Some(t);
                    is_touch = true;
                }
            }
        }
    }
    (best, is_touch)
}

/// Advance every interval by `dt` at its current speed, snapping intervals
/// that reach the center exactly.
fn advance(spans: &mut [(f64, f64)], dt: f64) {
    for s in spans.iter_mut() {
        let (a, b) = *s;
        let v = speed(a, b);
        if v == 0.0 {
            continue;
        }
        let t_center = 0.5 * (a + b).abs();
        if dt >= t_center {
            let half = 0.5 * (b - a);
            *s = (-half, half);
        } else {
            *s = (a + v * dt, b + v * dt);
        }
    }
}

/// Left-to-right merge sweep for touching neighbors.
fn merge_touching(spans: &mut Vec<(f64, f64)>) {
    if spans.len() < 2 {
        return;
    }
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(spans.len());
    for &(a, b) in spans.iter() {
        match out.last_mut() {
            Some(last) if a - last.1 <= TOUCH_TOL * (1.0 + last.1.abs().max(a.abs())) => {
                last.1 = last.1.max(b)
            }
            _ => out.push((a, b)),
        }
    }
    *spans = out;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(spans: &[(f64, f64)]) -> IntervalUnion {
        IntervalUnion::new(spans.iter().copied())
    }

    #[test]
    fn measure_basics() {
        assert_eq!(IntervalUnion::empty().measure(), 0.0);
        assert_eq!(u(&[(1.0, 3.0)]).measure(), 2.0);
        assert_eq!(u(&[(-3.0, -1.0), (0.5, 1.5)]).measure(), 3.0);
    }

    #[test]
    fn construction_normalizes() {
        let v = u(&[(2.0, 1.0), (0.0, 1.0), (1.0, 2.0), (5.0, 5.0)]);
        assert_eq!(v.spans(), &[(0.0, 2.0)]);
    }

    #[test]
    fn symmetric_rearrangement_examples() {
        assert_eq!(u(&[(1.0, 3.0)]).symmetric_rearrangement().spans(), &[(-1.0, 1.0)]);
        assert_eq!(
            u(&[(-2.0, 0.0), (1.0, 3.0)]).symmetric_rearrangement().spans(),
            &[(-2.0, 2.0)]
        );
        assert!(IntervalUnion::empty().symmetric_rearrangement().is_empty());
    }

    #[test]
    fn merge_time_two_sided_approach() {
        let ev = u(&[(-3.0, -1.0), (0.5, 1.5)]).next_merge_time().unwrap();
        assert!((ev.time - 0.75).abs() < 1e-12);
        assert_eq!((ev.left_index, ev.right_index), (0, 1));
    }

    #[test]
    fn merge_time_against_stationary_interval() {
        let ev = u(&[(-1.0, 1.0), (2.0, 3.0)]).next_merge_time().unwrap();
        assert!((ev.time - 1.0).abs() < 1e-12);
    }

    #[test]
    fn merge_time_after_left_interval_stops() {
        // Both move left with constant gap 3; the left stops centered at
        // τ=1.5 and the right reaches it at τ=4.5.
        let ev = u(&[(1.0, 2.0), (5.0, 6.0)]).next_merge_time().unwrap();
        assert!((ev.time - 4.5).abs() < 1e-12, "got {}", ev.time);
    }

    #[test]
    fn motion_translates_and_stops() {
        let v = u(&[(1.0, 3.0)]);
        assert_eq!(v.steiner_motion(0.5).spans(), &[(0.5, 2.5)]);
        assert_eq!(v.steiner_motion(2.0).spans(), &[(-1.0, 1.0)]);
        assert_eq!(v.steiner_motion(7.0).spans(), &[(-1.0, 1.0)]);
    }

    #[test]
    fn motion_merges_at_contact() {
        let v = u(&[(-3.0, -1.0), (0.5, 1.5)]);
        let w = v.steiner_motion(0.75);
        assert_eq!(w.len(), 1);
        let (a, b) = w.spans()[0];
        assert!((a + 2.25).abs() < 1e-12 && (b - 0.75).abs() < 1e-12);
    }

    #[test]
    fn centered_interval_is_fixed() {
        let v = u(&[(-1.0, 1.0)]);
        assert_eq!(v.steiner_motion(3.7).spans(), v.spans());
    }

    #[test]
    fn time_to_symmetric_reaches_rearrangement() {
        let v = u(&[(1.0, 2.0), (5.0, 6.0), (-4.0, -3.5)]);
        let t = v.time_to_symmetric();
        let w = v.steiner_motion(t);
        let r = v.symmetric_rearrangement();
        assert!(w.boundary_distance(&r) < 1e-12);
    }
}
