//! Planar angular arithmetic: directions, α-gap detection and cone coverage.
//!
//! Every direction is measured counterclockwise from the positive x-axis of one
//! global frame. Gap verdicts are invariant under a common rotation, so the
//! choice of reference axis never changes an outcome.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute angular tolerance (radians) for gap and coverage comparisons.
pub const ANGLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Point at `radius` from `self` in direction `theta`.
    pub fn offset_polar(&self, radius: f64, theta: f64) -> Point {
        Point::new(self.x + radius * theta.cos(), self.y + radius * theta.sin())
    }
}

/// A direction on the circle, normalized to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    pub fn from_radians(radians: f64) -> Self {
        let mut r = radians.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU for tiny negative inputs.
        if r >= TAU {
            r = 0.0;
        }
        Angle(r)
    }

    pub fn from_degrees(degrees: f64) -> Self {
        Self::from_radians(degrees.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }

    pub fn rotated(self, offset: f64) -> Self {
        Self::from_radians(self.0 + offset)
    }

    /// Counterclockwise sweep from `self` to `other`, in `[0, 2π)`.
    pub fn ccw_to(self, other: Angle) -> f64 {
        (other.0 - self.0).rem_euclid(TAU)
    }

    /// Unsigned angular distance, in `[0, π]`.
    pub fn distance(self, other: Angle) -> f64 {
        let d = (self.0 - other.0).abs();
        if d > PI {
            TAU - d
        } else {
            d
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}rad", self.0)
    }
}

/// Direction of `target` as seen from `origin`.
pub fn angle_between(origin: Point, target: Point) -> Result<Angle> {
    let dx = target.x - origin.x;
    let dy = target.y - origin.y;
    if dx == 0.0 && dy == 0.0 {
        return Err(Error::DegenerateGeometry(format!(
            "coincident points at ({}, {})",
            origin.x, origin.y
        )));
    }
    Ok(Angle::from_radians(dy.atan2(dx)))
}

/// The angle ∠(a, vertex, b), in `[0, π]`.
pub fn vertex_angle(vertex: Point, a: Point, b: Point) -> Result<f64> {
    Ok(angle_between(vertex, a)?.distance(angle_between(vertex, b)?))
}

/// Checks that a cone angle lies in `(0, 2π]`.
pub fn validate_alpha(alpha: f64) -> Result<f64> {
    if alpha.is_finite() && alpha > 0.0 && alpha <= TAU + ANGLE_TOLERANCE {
        Ok(alpha.min(TAU))
    } else {
        Err(Error::Domain(format!("cone angle {alpha} outside (0, 2π]")))
    }
}

/// Sorted multiset of directions.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DirectionSet {
    directions: Vec<Angle>,
}

impl DirectionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, angle: Angle) {
        let idx = self.directions.partition_point(|a| a.0 <= angle.0);
        self.directions.insert(idx, angle);
    }

    /// Removes one occurrence of `angle`. Returns whether anything was removed.
    pub fn remove(&mut self, angle: Angle) -> bool {
        match self.directions.iter().position(|a| a.0 == angle.0) {
            Some(idx) => {
                self.directions.remove(idx);
                true
            }
            None => false,
        }
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Angle> + '_ {
        self.directions.iter().copied()
    }

    pub fn as_slice(&self) -> &[Angle] {
        &self.directions
    }

    pub fn rotated(&self, offset: f64) -> Self {
        self.iter().map(|a| a.rotated(offset)).collect()
    }

    /// Counterclockwise gaps: entry `i` runs from direction `i` to direction `i + 1`
    /// (the last one wraps around). A singleton has one gap of `2π`.
    pub fn gaps(&self) -> Vec<f64> {
        let n = self.directions.len();
        match n {
            0 => Vec::new(),
            1 => vec![TAU],
            _ => (0..n)
                .map(|i| {
                    let a = self.directions[i].0;
                    let b = self.directions[(i + 1) % n].0;
                    if i + 1 == n {
                        b + TAU - a
                    } else {
                        b - a
                    }
                })
                .collect(),
        }
    }

    /// Largest circular gap; `2π` for the empty set.
    pub fn max_gap(&self) -> f64 {
        self.gaps()
            .into_iter()
            .fold(if self.is_empty() { TAU } else { 0.0 }, f64::max)
    }
}

impl FromIterator<Angle> for DirectionSet {
    fn from_iter<I: IntoIterator<Item = Angle>>(iter: I) -> Self {
        let mut directions: Vec<Angle> = iter.into_iter().collect();
        directions.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self { directions }
    }
}

/// True iff some circular gap between consecutive directions exceeds `alpha`.
///
/// The empty set always has a gap. Gaps within [`ANGLE_TOLERANCE`] of `alpha` do
/// not count.
pub fn has_alpha_gap(dirs: &DirectionSet, alpha: f64) -> bool {
    if dirs.is_empty() {
        return true;
    }
    dirs.max_gap() > alpha + ANGLE_TOLERANCE
}

/// Closed arc starting at `start` and sweeping counterclockwise for `len` radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub start: Angle,
    pub len: f64,
}

impl Arc {
    pub fn end(&self) -> Angle {
        self.start.rotated(self.len)
    }

    pub fn contains(&self, theta: Angle) -> bool {
        self.len >= TAU - ANGLE_TOLERANCE || self.start.ccw_to(theta) <= self.len + ANGLE_TOLERANCE
    }
}

/// Union of the closed arcs of half-width α/2 around a set of directions,
/// stored as disjoint arcs sorted by start.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CoverageSet {
    arcs: Vec<Arc>,
}

impl CoverageSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full() -> Self {
        Self {
            arcs: vec![Arc {
                start: Angle::ZERO,
                len: TAU,
            }],
        }
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.arcs.len() == 1 && self.arcs[0].len >= TAU - ANGLE_TOLERANCE
    }

    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(|a| a.len).sum::<f64>().min(TAU)
    }

    pub fn contains(&self, theta: Angle) -> bool {
        self.arcs.iter().any(|a| a.contains(theta))
    }
}

/// `cover_α(dirs)`: every angle within α/2 of some direction.
pub fn coverage_set(dirs: &DirectionSet, alpha: f64) -> CoverageSet {
    if dirs.is_empty() {
        return CoverageSet::empty();
    }
    let gaps = dirs.gaps();
    let Some(first_break) = gaps.iter().position(|&g| g > alpha + ANGLE_TOLERANCE) else {
        return CoverageSet::full();
    };
    let n = dirs.len();
    let half = alpha / 2.0;
    let mut arcs = Vec::new();
    // Walk the circle starting just after a gap, so every run starts cleanly.
    let mut i = (first_break + 1) % n;
    let mut visited = 0;
    while visited < n {
        let run_start = dirs.directions[i];
        let mut span = 0.0;
        loop {
            let gap = gaps[i];
            visited += 1;
            i = (i + 1) % n;
            if gap > alpha + ANGLE_TOLERANCE || visited == n {
                break;
            }
            span += gap;
        }
        arcs.push(Arc {
            start: run_start.rotated(-half),
            len: (span + alpha).min(TAU),
        });
    }
    arcs.sort_by(|a, b| a.start.0.total_cmp(&b.start.0));
    CoverageSet { arcs }
}

/// Point-set equality of two coverage sets, up to [`ANGLE_TOLERANCE`] on arc endpoints.
pub fn coverage_equal(a: &CoverageSet, b: &CoverageSet) -> bool {
    if a.is_full() || b.is_full() {
        return a.is_full() && b.is_full();
    }
    if a.arcs.len() != b.arcs.len() {
        return false;
    }
    a.arcs.iter().all(|x| {
        b.arcs.iter().any(|y| {
            x.start.distance(y.start) <= ANGLE_TOLERANCE && (x.len - y.len).abs() <= ANGLE_TOLERANCE
        })
    })
}
