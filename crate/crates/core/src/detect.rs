//! Window-level classifiers: sorted-gap edge test, directional distance edge
//! test, disorder analysis, extreme-value check and neighbor similarity.
//!
//! Every classifier is a pure function of its window and thresholds.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::img::{SortedNine, Window3, Window5};
use crate::restore::Direction;

/// Detection thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Thresholds {
    /// Sorted-gap edge strength.
    pub t1: u8,
    /// Directional distance bound, in whole weighted-distance units.
    pub t2: u32,
    /// Disorder distance.
    pub t3: u8,
    /// Extreme-value and neighbor-similarity distance.
    pub t4: u8,
    /// Minimum number of similar neighbors, at most 8.
    pub t5: u8,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            t1: 20,
            t2: 150,
            t3: 30,
            t4: 10,
            t5: 6,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        if self.t5 > 8 {
            return Err(Error::InvalidParameter(format!(
                "t5 = {} exceeds the 8 available neighbors",
                self.t5
            )));
        }
        Ok(())
    }
}

/// How the directional distance applies its weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceWeighting {
    /// `W * |Ic - Ij|`: zero on any uniform neighborhood.
    #[default]
    Outside,
    /// `|Ic - W * Ij|`: the formula taken literally.
    Literal,
}

impl FromStr for DistanceWeighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "outside" => Ok(Self::Outside),
            "literal" => Ok(Self::Literal),
            _ => Err(Error::InvalidParameter(format!(
                "unknown distance weighting '{s}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeTest {
    Edge,
    NonEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeNoise {
    CleanEdge,
    NoisyEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Disorder {
    Disordered,
    Smooth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremeCheck {
    Candidate,
    Clean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Similarity {
    Similar,
    NonSimilar,
}

/// Edge when the gap between F4 and F5, or between F5 and F6, exceeds `t1`.
#[inline]
pub fn type1_edge(f: &SortedNine, t1: u8) -> EdgeTest {
    if f.f(5) - f.f(4) > t1 || f.f(6) - f.f(5) > t1 {
        EdgeTest::Edge
    } else {
        EdgeTest::NonEdge
    }
}

/// Weighted distances from the center to the four lines through it.
///
/// Values are held doubled (`halves`) so the 1/2 weight on the far pixels
/// stays exact in integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirectionalDistances {
    pub halves: [u32; 4],
}

impl DirectionalDistances {
    pub fn get(&self, dir: Direction) -> f64 {
        self.halves[dir.index()] as f64 / 2.0
    }

    pub fn min_halves(&self) -> u32 {
        *self.halves.iter().min().unwrap()
    }

    pub fn dmin(&self) -> f64 {
        self.min_halves() as f64 / 2.0
    }

    /// First direction attaining the minimum, in H, V, D, AD order.
    pub fn argmin(&self) -> Direction {
        let min = self.min_halves();
        Direction::ALL
            .into_iter()
            .find(|d| self.halves[d.index()] == min)
            .unwrap()
    }
}

#[inline]
pub fn directional_distances(w: &Window5) -> DirectionalDistances {
    directional_distances_with(w, DistanceWeighting::Outside)
}

pub fn directional_distances_with(
    w: &Window5,
    weighting: DistanceWeighting,
) -> DirectionalDistances {
    let c = w.center() as i32;
    let mut halves = [0u32; 4];
    for dir in Direction::ALL {
        let [far_a, near_a, near_b, far_b] = dir.pixels5().map(|i| w.at(i) as i32);
        let near = 2 * ((c - near_a).unsigned_abs() + (c - near_b).unsigned_abs());
        let far = match weighting {
            DistanceWeighting::Outside => (c - far_a).unsigned_abs() + (c - far_b).unsigned_abs(),
            DistanceWeighting::Literal => {
                (2 * c - far_a).unsigned_abs() + (2 * c - far_b).unsigned_abs()
            }
        };
        halves[dir.index()] = near + far;
    }
    DirectionalDistances { halves }
}

/// Noisy edge when the smallest directional distance exceeds `t2`.
#[inline]
pub fn type2_edge_from(d: &DirectionalDistances, t2: u32) -> EdgeNoise {
    if d.min_halves() as u64 > 2 * t2 as u64 {
        EdgeNoise::NoisyEdge
    } else {
        EdgeNoise::CleanEdge
    }
}

pub fn type2_edge(w: &Window5, t2: u32) -> EdgeNoise {
    type2_edge_from(&directional_distances(w), t2)
}

/// Disordered when the center is farther than `t3` from each of F4, F5 and F6.
#[inline]
pub fn disorder(p5: u8, f: &SortedNine, t3: u8) -> Disorder {
    if f.f(6).abs_diff(p5) > t3 && p5.abs_diff(f.f(4)) > t3 && p5.abs_diff(f.f(5)) > t3 {
        Disorder::Disordered
    } else {
        Disorder::Smooth
    }
}

/// Candidate when the center lies within `t4` of the window maximum or minimum.
#[inline]
pub fn noisy_pixel(p5: u8, f: &SortedNine, t4: u8) -> ExtremeCheck {
    if f.f(9).saturating_sub(p5) < t4 || p5.saturating_sub(f.f(1)) < t4 {
        ExtremeCheck::Candidate
    } else {
        ExtremeCheck::Clean
    }
}

/// Number of the eight neighbors within `t4` (inclusive) of the center.
#[inline]
pub fn similar_count(w: &Window3, t4: u8) -> u8 {
    let c = w.center();
    w.neighbors().filter(|&n| n.abs_diff(c) <= t4).count() as u8
}

#[inline]
pub fn similarity(w: &Window3, t4: u8, t5: u8) -> Similarity {
    if similar_count(w, t4) < t5 {
        Similarity::NonSimilar
    } else {
        Similarity::Similar
    }
}

impl fmt::Display for Thresholds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "t1={} t2={} t3={} t4={} t5={}",
            self.t1, self.t2, self.t3, self.t4, self.t5
        )
    }
}
