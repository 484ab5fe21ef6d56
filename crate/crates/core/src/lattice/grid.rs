use serde::{Deserialize, Serialize};

use crate::{Error, Point, Rect, Result};

/// Interior nodes of a rectangle with spacing `h`; node `(i, j)` sits at
/// `min + ((i+1)h, (j+1)h)` and has index `j·nx + i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub rect: Rect,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

fn cells(len: f64, h: f64) -> Result<usize> {
    let c = len / h;
    let r = c.round();
    if (c - r).abs() > 1e-9 * c.max(1.0) {
        return Err(Error::InvalidInput(format!("spacing {h} does not divide side {len}")));
    }
    Ok(r as usize)
}

impl Grid {
    pub fn new(rect: Rect, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidInput(format!("grid spacing {h} must be positive")));
        }
        let cx = cells(rect.width(), h)?;
        let cy = cells(rect.height(), h)?;
        if cx < 8 || cy < 8 {
            return Err(Error::InvalidInput(format!(
                "spacing {h} gives {cx}×{cy} cells; at least 8 per side are required"
            )));
        }
        Ok(Self {
            rect,
            h,
            nx: cx - 1,
            ny: cy - 1,
        })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn point(&self, i: usize, j: usize) -> Point {
        [
            self.rect.min[0] + (i + 1) as f64 * self.h,
            self.rect.min[1] + (j + 1) as f64 * self.h,
        ]
    }

    pub fn points(&self) -> Vec<Point> {
        let mut v = Vec::with_capacity(self.len());
        for j in 0..self.ny {
            for i in 0..self.nx {
                v.push(self.point(i, j));
            }
        }
        v
    }
}
