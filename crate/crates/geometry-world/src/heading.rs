use std::fmt;

use serde::{Deserialize, Serialize};

use crate::Position;

/// One of the four grid headings. Serialized as the lowercase compass
/// letter so the same spelling works as a symbolic reasoning constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Heading {
    #[serde(rename = "n")]
    North,
    #[serde(rename = "e")]
    East,
    #[serde(rename = "s")]
    South,
    #[serde(rename = "w")]
    West,
}

/// A turn relative to the current heading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TurnDir {
    Left,
    Right,
    Straight,
}

impl Heading {
    pub const ALL: [Heading; 4] = [Heading::North, Heading::East, Heading::South, Heading::West];

    /// Heading after turning 90° left / 90° right / not at all.
    pub fn turn(self, dir: TurnDir) -> Heading {
        use Heading::*;
        match (self, dir) {
            (h, TurnDir::Straight) => h,
            (North, TurnDir::Left) => West,
            (West, TurnDir::Left) => South,
            (South, TurnDir::Left) => East,
            (East, TurnDir::Left) => North,
            (North, TurnDir::Right) => East,
            (East, TurnDir::Right) => South,
            (South, TurnDir::Right) => West,
            (West, TurnDir::Right) => North,
        }
    }

    /// Compass course in degrees: north 0, east 90, south 180, west 270.
    pub fn course(self) -> f64 {
        match self {
            Heading::North => 0.0,
            Heading::East => 90.0,
            Heading::South => 180.0,
            Heading::West => 270.0,
        }
    }

    /// Unit step in grid columns/rows: north increases `row`, east increases `col`.
    pub fn delta(self) -> (i64, i64) {
        match self {
            Heading::North => (0, 1),
            Heading::East => (1, 0),
            Heading::South => (0, -1),
            Heading::West => (-1, 0),
        }
    }

    /// Nearest cardinal heading to a continuous course. A course exactly
    /// halfway between two cardinals resolves clockwise (45° -> east).
    pub fn nearest(course: f64) -> Heading {
        let c = normalize_course(course);
        match ((c + 45.0) / 90.0).floor() as i64 % 4 {
            0 => Heading::North,
            1 => Heading::East,
            2 => Heading::South,
            _ => Heading::West,
        }
    }

    /// The lowercase symbol used in serialized facts and planning objects.
    pub fn symbol(self) -> &'static str {
        match self {
            Heading::North => "n",
            Heading::East => "e",
            Heading::South => "s",
            Heading::West => "w",
        }
    }

    /// Parses the lowercase symbol form.
    pub fn from_symbol(s: &str) -> Option<Heading> {
        match s {
            "n" => Some(Heading::North),
            "e" => Some(Heading::East),
            "s" => Some(Heading::South),
            "w" => Some(Heading::West),
            _ => None,
        }
    }
}

impl fmt::Display for Heading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Normalizes a course in degrees to [0, 360).
pub fn normalize_course(deg: f64) -> f64 {
    let r = deg.rem_euclid(360.0);
    if r == 360.0 {
        0.0
    } else {
        r
    }
}

/// Signed shortest angular difference `to - from` in degrees, in (-180, 180].
pub fn angle_diff(from: f64, to: f64) -> f64 {
    let d = normalize_course(to - from);
    if d > 180.0 {
        d - 360.0
    } else {
        d
    }
}

/// Compass bearing from one position toward another, degrees in [0, 360).
pub fn bearing(from: &Position, to: &Position) -> f64 {
    normalize_course((to.x - from.x).atan2(to.y - from.y).to_degrees())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn left_turn_from_north_faces_west() {
        assert_eq!(Heading::North.turn(TurnDir::Left), Heading::West);
    }

    #[test]
    fn four_right_turns_return_home() {
        let mut h = Heading::East;
        for _ in 0..4 {
            h = h.turn(TurnDir::Right);
        }
        assert_eq!(h, Heading::East);
    }

    #[test]
    fn nearest_cardinal_halfway_resolves_clockwise() {
        assert_eq!(Heading::nearest(45.0), Heading::East);
        assert_eq!(Heading::nearest(44.9), Heading::North);
        assert_eq!(Heading::nearest(315.0), Heading::North);
        assert_eq!(Heading::nearest(314.9), Heading::West);
    }

    #[test]
    fn angle_diff_is_signed_shortest() {
        assert_eq!(angle_diff(350.0, 10.0), 20.0);
        assert_eq!(angle_diff(10.0, 350.0), -20.0);
        assert_eq!(angle_diff(0.0, 180.0), 180.0);
    }

    #[test]
    fn bearing_east_is_90() {
        let a = Position::new(0.0, 0.0, 0.0).unwrap();
        let b = Position::new(100.0, 0.0, 0.0).unwrap();
        assert_eq!(bearing(&a, &b), 90.0);
    }
}
