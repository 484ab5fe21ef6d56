use serde::{Deserialize, Serialize};

/// A point of the plane.
pub type Point = [f64; 2];

/// `|x|_∞ = max(|x₁|, |x₂|)`.
#[inline]
pub fn sup_norm(x: Point) -> f64 {
    x[0].abs().max(x[1].abs())
}

#[inline]
pub fn dist(x: Point, y: Point) -> f64 {
    (x[0] - y[0]).hypot(x[1] - y[1])
}

/// Symplectic product `[x, y] = x₁y₂ − x₂y₁`.
#[inline]
pub fn symplectic(x: Point, y: Point) -> f64 {
    x[0] * y[1] - x[1] * y[0]
}

/// Closed axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(min: Point, max: Point) -> Self {
        Self { min, max }
    }

    /// Square of side `side` centered at `center`.
    pub fn centered(center: Point, side: f64) -> Self {
        let h = 0.5 * side;
        Self {
            min: [center[0] - h, center[1] - h],
            max: [center[0] + h, center[1] + h],
        }
    }

    pub fn unit_cell() -> Self {
        Self::new([0.0, 0.0], [1.0, 1.0])
    }

    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point {
        [0.5 * (self.min[0] + self.max[0]), 0.5 * (self.min[1] + self.max[1])]
    }

    pub fn contains(&self, x: Point) -> bool {
        x[0] >= self.min[0] && x[0] <= self.max[0] && x[1] >= self.min[1] && x[1] <= self.max[1]
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.contains(other.min) && self.contains(other.max)
    }

    pub fn expanded(&self, by: f64) -> Self {
        Self {
            min: [self.min[0] - by, self.min[1] - by],
            max: [self.max[0] + by, self.max[1] + by],
        }
    }

    /// Sup-norm distance from `x` to the rectangle (zero inside).
    pub fn sup_dist(&self, x: Point) -> f64 {
        let dx = (self.min[0] - x[0]).max(x[0] - self.max[0]).max(0.0);
        let dy = (self.min[1] - x[1]).max(x[1] - self.max[1]).max(0.0);
        dx.max(dy)
    }

    /// Sup-norm distance between two rectangles (zero if they overlap).
    pub fn sup_gap(&self, other: &Rect) -> f64 {
        let dx = (other.min[0] - self.max[0]).max(self.min[0] - other.max[0]).max(0.0);
        let dy = (other.min[1] - self.max[1]).max(self.min[1] - other.max[1]).max(0.0);
        dx.max(dy)
    }

    /// Regular grid of `(n+1)²` nodes covering the rectangle, row by row.
    pub fn grid(&self, n: usize) -> Vec<Point> {
        let n = n.max(1);
        let mut pts = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            let y = self.min[1] + self.height() * j as f64 / n as f64;
            for i in 0..=n {
                let x = self.min[0] + self.width() * i as f64 / n as f64;
                pts.push([x, y]);
            }
        }
        pts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distances() {
        let r = Rect::new([0.0, 0.0], [1.0, 1.0]);
        assert_eq!(r.sup_dist([0.5, 0.5]), 0.0);
        assert!((r.sup_dist([1.6, 0.5]) - 0.6).abs() < 1e-12);
        assert_eq!(r.sup_dist([-1.0, 2.0]), 1.0);
        let s = Rect::new([3.0, 0.0], [4.0, 1.0]);
        assert_eq!(r.sup_gap(&s), 2.0);
        assert_eq!(symplectic([1.0, 0.0], [0.0, 1.0]), 1.0);
    }
}
