use alloc::vec;
use alloc::vec::Vec;

use crate::image::Pixel;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        BinaryMask {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), width * height, "mask size mismatch");
        BinaryMask {
            width,
            height,
            bits,
        }
    }

    pub fn from_pixels(width: usize, height: usize, pixels: impl IntoIterator<Item = Pixel>) -> Self {
        let mut m = BinaryMask::new(width, height);
        for p in pixels {
            m.set(p, true);
        }
        m
    }

    /// Parses rows of `#` (set) and anything else (unset).
    pub fn from_ascii(rows: &[&str]) -> Self {
        let height = rows.len();
        let width = rows.iter().map(|r| r.len()).max().unwrap_or(0);
        let mut m = BinaryMask::new(width, height);
        for (y, row) in rows.iter().enumerate() {
            for (x, c) in row.bytes().enumerate() {
                if c == b'#' {
                    m.bits[y * width + x] = true;
                }
            }
        }
        m
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Out-of-bounds reads are `false`.
    #[inline]
    pub fn get(&self, p: Pixel) -> bool {
        self.in_bounds(p) && self.bits[p.y as usize * self.width + p.x as usize]
    }

    #[inline]
    pub fn in_bounds(&self, p: Pixel) -> bool {
        p.x >= 0 && p.y >= 0 && (p.x as usize) < self.width && (p.y as usize) < self.height
    }

    pub fn set(&mut self, p: Pixel, value: bool) {
        if self.in_bounds(p) {
            self.bits[p.y as usize * self.width + p.x as usize] = value;
        }
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Set pixels in row-major order.
    pub fn pixels(&self) -> impl Iterator<Item = Pixel> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(move |(i, _)| {
            Pixel::new((i % self.width) as i32, (i / self.width) as i32)
        })
    }

    /// Number of 8-connected components.
    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.bits.len()];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in self.pixels() {
            let si = start.y as usize * self.width + start.x as usize;
            if seen[si] {
                continue;
            }
            count += 1;
            seen[si] = true;
            stack.push(start);
            while let Some(p) = stack.pop() {
                for q in neighbors8(p) {
                    if self.get(q) {
                        let qi = q.y as usize * self.width + q.x as usize;
                        if !seen[qi] {
                            seen[qi] = true;
                            stack.push(q);
                        }
                    }
                }
            }
        }
        count
    }
}

/// Offsets in clockwise order starting north: N, NE, E, SE, S, SW, W, NW.
pub(crate) const RING: [(i32, i32); 8] = [
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

pub(crate) fn neighbors8(p: Pixel) -> impl Iterator<Item = Pixel> {
    RING.iter().map(move |(dx, dy)| Pixel::new(p.x + dx, p.y + dy))
}
