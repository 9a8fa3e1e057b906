//! Restoration filters: sorted-median average, pairwise edge-preserving
//! average on the 3x3 window and the minimum-spread directional median on
//! the 5x5 window.

use crate::img::{SortedNine, Window3, Window5};

/// One of the four lines through the window center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Horizontal,
    Vertical,
    Diagonal,
    AntiDiagonal,
}

impl Direction {
    /// Fixed enumeration order; ties always resolve to the earliest entry.
    pub const ALL: [Direction; 4] = [
        Direction::Horizontal,
        Direction::Vertical,
        Direction::Diagonal,
        Direction::AntiDiagonal,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// 1-based P-indices of the four non-center pixels on this line in a
    /// 5x5 window, ordered far, near, near, far.
    pub fn pixels5(self) -> [usize; 4] {
        match self {
            Direction::Horizontal => [11, 12, 14, 15],
            Direction::Vertical => [3, 8, 18, 23],
            Direction::Diagonal => [1, 7, 19, 25],
            Direction::AntiDiagonal => [5, 9, 17, 21],
        }
    }

    /// 1-based P-indices of the center-symmetric pair on this line in a 3x3 window.
    pub fn pair3(self) -> (usize, usize) {
        match self {
            Direction::Horizontal => (4, 6),
            Direction::Vertical => (2, 8),
            Direction::Diagonal => (1, 9),
            Direction::AntiDiagonal => (3, 7),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Horizontal => "horizontal",
            Direction::Vertical => "vertical",
            Direction::Diagonal => "diagonal",
            Direction::AntiDiagonal => "anti-diagonal",
        }
    }
}

/// `round(a / b)` with halves rounded up, for nonnegative operands.
#[inline]
pub(crate) fn div_round_half_up(a: u32, b: u32) -> u32 {
    (2 * a + b) / (2 * b)
}

/// Mean of F4, F5 and F6, rounded half up.
#[inline]
pub fn average_restore(f: &SortedNine) -> u8 {
    let sum = f.f(4) as u32 + f.f(5) as u32 + f.f(6) as u32;
    div_round_half_up(sum, 3) as u8
}

/// Picks the center-symmetric pair (H, V, D, AD order) with the smallest
/// absolute difference and returns its rounded mean.
#[inline]
pub fn type1_edge_preserve(w: &Window3) -> u8 {
    let mut best: Option<(u8, u8, u8)> = None;
    for dir in Direction::ALL {
        let (i, j) = dir.pair3();
        let (a, b) = (w.p[i - 1], w.p[j - 1]);
        let diff = a.abs_diff(b);
        if best.is_none_or(|(d, _, _)| diff < d) {
            best = Some((diff, a, b));
        }
    }
    let (_, a, b) = best.unwrap();
    div_round_half_up(a as u32 + b as u32, 2) as u8
}

/// Spread of four values around their mean, in quarter units:
/// `sum |4 * v - sum(v)| = 4 * sum |v - mean|`.
#[inline]
pub fn spread_quarters(values: &[u8; 4]) -> u32 {
    let sum: i32 = values.iter().map(|&v| v as i32).sum();
    values
        .iter()
        .map(|&v| (4 * v as i32 - sum).unsigned_abs())
        .sum()
}

/// Median of four values: rounded-half-up mean of the two middle ones.
#[inline]
pub fn median4(values: &[u8; 4]) -> u8 {
    let mut s = *values;
    s.sort_unstable();
    div_round_half_up(s[1] as u32 + s[2] as u32, 2) as u8
}

pub fn direction_values(w: &Window5, dir: Direction) -> [u8; 4] {
    dir.pixels5().map(|i| w.at(i))
}

/// Direction with the smallest spread of its four non-center pixels.
pub fn min_spread_direction(w: &Window5) -> Direction {
    let mut best = (u32::MAX, Direction::Horizontal);
    for dir in Direction::ALL {
        let s = spread_quarters(&direction_values(w, dir));
        if s < best.0 {
            best = (s, dir);
        }
    }
    best.1
}

/// Median of the minimum-spread direction; the center pixel is never a candidate.
#[inline]
pub fn type2_edge_preserve(w: &Window5) -> u8 {
    median4(&direction_values(w, min_spread_direction(w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::img::sort9;

    fn sorted_with_middle(f4: u8, f5: u8, f6: u8) -> SortedNine {
        SortedNine {
            f: [0, 0, 0, f4, f5, f6, 255, 255, 255],
        }
    }

    #[test]
    fn average_examples() {
        assert_eq!(average_restore(&sorted_with_middle(7, 7, 7)), 7);
        assert_eq!(average_restore(&sorted_with_middle(10, 12, 14)), 12);
        assert_eq!(average_restore(&sorted_with_middle(10, 11, 11)), 11);
        assert_eq!(average_restore(&sorted_with_middle(10, 11, 12)), 11);
        assert_eq!(average_restore(&sorted_with_middle(10, 10, 11)), 10);
        assert_eq!(average_restore(&sorted_with_middle(255, 255, 255)), 255);
    }

    #[test]
    fn rounding_helper() {
        assert_eq!(div_round_half_up(5, 2), 3);
        assert_eq!(div_round_half_up(4, 2), 2);
        assert_eq!(div_round_half_up(32, 3), 11);
        assert_eq!(div_round_half_up(34, 3), 11);
        assert_eq!(div_round_half_up(35, 3), 12);
    }

    #[test]
    fn type1_examples() {
        assert_eq!(type1_edge_preserve(&Window3::new([40; 9])), 40);

        let w = Window3::new([0, 100, 0, 0, 231, 0, 0, 100, 0]);
        // Every other pair is (0, 0) with difference 0 too; horizontal wins the tie.
        assert_eq!(type1_edge_preserve(&w), 0);
        let w = Window3::new([0, 100, 50, 0, 231, 255, 9, 100, 200]);
        assert_eq!(type1_edge_preserve(&w), 100);

        // Pairs H=(10,10), V=(20,20), D=(30,30), AD=(40,40).
        let w = Window3::new([30, 20, 40, 10, 99, 10, 40, 20, 30]);
        assert_eq!(type1_edge_preserve(&w), 10);
    }

    #[test]
    fn type1_rounds_pair_mean_up() {
        let w = Window3::new([0, 0, 255, 3, 0, 4, 0, 255, 200]);
        assert_eq!(type1_edge_preserve(&w), 4);
    }

    #[test]
    fn spread_and_median4() {
        assert_eq!(spread_quarters(&[5, 5, 5, 5]), 0);
        // mean 2.5, deviations 2.5 + 1.5 + 0.5 + 3.5 = 8 -> 32 quarters
        assert_eq!(spread_quarters(&[0, 1, 3, 6]), 32);
        assert_eq!(median4(&[9, 1, 4, 3]), 4);
        assert_eq!(median4(&[0, 0, 255, 255]), 128);
    }

    #[test]
    fn type2_uniform_with_corrupted_center() {
        let mut p = [80u8; 25];
        p[12] = 255;
        let w = Window5::new(p);
        assert_eq!(min_spread_direction(&w), Direction::Horizontal);
        assert_eq!(type2_edge_preserve(&w), 80);
    }

    #[test]
    fn type2_vertical_step_with_corrupted_center() {
        let mut p = [0u8; 25];
        for r in 0..5 {
            for c in 2..5 {
                p[r * 5 + c] = 200;
            }
        }
        p[12] = 255;
        let w = Window5::new(p);
        assert_eq!(direction_values(&w, Direction::Vertical), [200; 4]);
        assert_eq!(min_spread_direction(&w), Direction::Vertical);
        assert_eq!(type2_edge_preserve(&w), 200);
    }

    #[test]
    fn direction_layout_is_symmetric_about_center() {
        for dir in Direction::ALL {
            let [far_a, near_a, near_b, far_b] = dir.pixels5();
            assert_eq!(near_a + near_b, 26);
            assert_eq!(far_a + far_b, 26);
            let (a, b) = dir.pair3();
            assert_eq!(a + b, 10);
        }
    }

    #[test]
    fn average_depends_only_on_sorted_values() {
        let a = Window3::new([9, 200, 3, 44, 7, 81, 0, 12, 130]);
        let mut rev = a.p;
        rev.reverse();
        assert_eq!(
            average_restore(&sort9(&a)),
            average_restore(&sort9(&Window3::new(rev)))
        );
    }
}
