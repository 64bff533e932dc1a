//! Integer pixel geometry: rectangles, points and exact intersection-over-union.

use core::cmp::Ordering;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// A point in device pixels, origin top-left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Point {
    pub x: i32,
    pub y: i32,
}

impl Point {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }
}

/// Axis-aligned rectangle in device pixels.
///
/// Containment is half-open: a point is inside when
/// `left <= x < right` and `top <= y < bottom`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(deny_unknown_fields))]
pub struct Rect {
    pub left: i32,
    pub top: i32,
    pub right: i32,
    pub bottom: i32,
}

impl Rect {
    pub const fn new(left: i32, top: i32, right: i32, bottom: i32) -> Self {
        Self {
            left,
            top,
            right,
            bottom,
        }
    }

    /// Non-empty and not negative.
    pub fn is_well_formed(&self) -> bool {
        self.left >= 0 && self.top >= 0 && self.left < self.right && self.top < self.bottom
    }

    pub fn fits_within(&self, width: i32, height: i32) -> bool {
        self.is_well_formed() && self.right <= width && self.bottom <= height
    }

    pub fn width(&self) -> i64 {
        i64::from(self.right) - i64::from(self.left)
    }

    pub fn height(&self) -> i64 {
        i64::from(self.bottom) - i64::from(self.top)
    }

    pub fn area(&self) -> i64 {
        self.width().max(0) * self.height().max(0)
    }

    pub fn contains(&self, p: Point) -> bool {
        self.left <= p.x && p.x < self.right && self.top <= p.y && p.y < self.bottom
    }

    /// Integer center (floor of the midpoint); the point a calibrated click is dispatched at.
    pub fn center(&self) -> Point {
        Point::new(
            ((i64::from(self.left) + i64::from(self.right)) / 2) as i32,
            ((i64::from(self.top) + i64::from(self.bottom)) / 2) as i32,
        )
    }

    /// Squared distance from `p` to the exact center, scaled by 4 so it stays integral.
    pub fn center_distance_sq_x4(&self, p: Point) -> i64 {
        let dx = 2 * i64::from(p.x) - (i64::from(self.left) + i64::from(self.right));
        let dy = 2 * i64::from(p.y) - (i64::from(self.top) + i64::from(self.bottom));
        dx * dx + dy * dy
    }

    pub fn intersection_area(&self, other: &Rect) -> i64 {
        let w = i64::from(self.right.min(other.right)) - i64::from(self.left.max(other.left));
        let h = i64::from(self.bottom.min(other.bottom)) - i64::from(self.top.max(other.top));
        if w <= 0 || h <= 0 {
            0
        } else {
            w * h
        }
    }

    pub fn iou(&self, other: &Rect) -> Iou {
        let inter = self.intersection_area(other);
        Iou {
            intersection: inter,
            union: self.area() + other.area() - inter,
        }
    }
}

/// Intersection-over-union kept as an exact ratio.
#[derive(Debug, Clone, Copy)]
pub struct Iou {
    pub intersection: i64,
    pub union: i64,
}

impl Iou {
    /// IoU >= 1/2, evaluated without rounding.
    pub fn at_least_half(&self) -> bool {
        self.union > 0 && 2 * self.intersection >= self.union
    }

    pub fn as_f64(&self) -> f64 {
        if self.union == 0 {
            0.0
        } else {
            self.intersection as f64 / self.union as f64
        }
    }
}

impl PartialEq for Iou {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Iou {}

impl PartialOrd for Iou {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Iou {
    fn cmp(&self, other: &Self) -> Ordering {
        // a/b vs c/d with b, d > 0; degenerate unions compare as zero.
        let lhs = i128::from(self.intersection) * i128::from(other.union.max(1));
        let rhs = i128::from(other.intersection) * i128::from(self.union.max(1));
        lhs.cmp(&rhs)
    }
}
