//! Majority-vote downsampling of a grayscale floor-plan mask into an
//! [`OccupancyGrid`].

use super::{GridError, OccupancyGrid};

/// Borrowed 8-bit grayscale raster, row-major.
#[derive(Clone, Copy, Debug)]
pub struct GrayMask<'a> {
    width: usize,
    height: usize,
    pixels: &'a [u8],
}

impl<'a> GrayMask<'a> {
    pub fn new(width: usize, height: usize, pixels: &'a [u8]) -> Result<Self, GridError> {
        if width == 0 || height == 0 || pixels.is_empty() {
            return Err(GridError::EmptyMask);
        }
        if pixels.len() != width * height {
            return Err(GridError::MaskShape {
                width,
                height,
                len: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &'a [u8] {
        self.pixels
    }
}

/// Which pixels count as obstacle ink.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum LuminanceCutoff {
    /// Halfway through the 8-bit range (127.5): values 0..=127 are blocked.
    #[default]
    Midpoint,
    /// Pixels strictly below this value are blocked.
    Below(u8),
}

impl LuminanceCutoff {
    #[inline]
    fn is_blocked(self, px: u8) -> bool {
        match self {
            LuminanceCutoff::Midpoint => px < 128,
            LuminanceCutoff::Below(v) => px < v,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinarizeParams {
    pub rows: usize,
    pub cols: usize,
    /// A cell is blocked when its blocked-pixel fraction is strictly greater
    /// than this. Must lie in (0, 1].
    pub blocked_threshold: f64,
    pub cutoff: LuminanceCutoff,
}

impl BinarizeParams {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            blocked_threshold: 0.5,
            cutoff: LuminanceCutoff::Midpoint,
        }
    }

    pub fn with_threshold(mut self, t: f64) -> Self {
        self.blocked_threshold = t;
        self
    }

    pub fn with_cutoff(mut self, c: LuminanceCutoff) -> Self {
        self.cutoff = c;
        self
    }
}

/// Half-open pixel span of block `k` out of `n` over `len` pixels. The last
/// block absorbs the remainder.
#[inline]
fn block_span(k: usize, n: usize, len: usize) -> (usize, usize) {
    let size = len / n;
    let start = k * size;
    let end = if k + 1 == n { len } else { start + size };
    (start, end)
}

/// Partitions the mask into `rows x cols` pixel blocks and marks a cell
/// blocked iff the fraction of blocked pixels in its block exceeds the
/// threshold. Exactly-at-threshold stays free.
pub fn binarize_mask(
    mask: GrayMask<'_>,
    params: &BinarizeParams,
) -> Result<OccupancyGrid, GridError> {
    let BinarizeParams {
        rows,
        cols,
        blocked_threshold,
        cutoff,
    } = *params;
    if !(blocked_threshold > 0.0 && blocked_threshold <= 1.0) {
        return Err(GridError::InvalidThreshold(blocked_threshold));
    }
    if rows == 0 || cols == 0 {
        return Err(GridError::EmptyGrid { rows, cols });
    }
    if rows > mask.height || cols > mask.width {
        return Err(GridError::GridLargerThanMask {
            rows,
            cols,
            height: mask.height,
            width: mask.width,
        });
    }

    // Per-pixel column -> cell column lookup, then one pass over the raster.
    let col_of: Vec<usize> = (0..cols)
        .flat_map(|c| {
            let (s, e) = block_span(c, cols, mask.width);
            std::iter::repeat_n(c, e - s)
        })
        .collect();

    let mut blocked = vec![0usize; rows * cols];
    for r in 0..rows {
        let (y0, y1) = block_span(r, rows, mask.height);
        let counts = &mut blocked[r * cols..(r + 1) * cols];
        for y in y0..y1 {
            let line = &mask.pixels[y * mask.width..(y + 1) * mask.width];
            for (x, &px) in line.iter().enumerate() {
                if cutoff.is_blocked(px) {
                    counts[col_of[x]] += 1;
                }
            }
        }
    }

    let mut cells = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let (y0, y1) = block_span(r, rows, mask.height);
        for c in 0..cols {
            let (x0, x1) = block_span(c, cols, mask.width);
            let total = ((y1 - y0) * (x1 - x0)) as f64;
            let frac = blocked[r * cols + c] as f64 / total;
            cells.push(frac <= blocked_threshold);
        }
    }
    OccupancyGrid::from_cells(rows, cols, cells)
}

/// Suggests `(rows, cols)` preserving the image aspect ratio with the longer
/// side scaled to `max_dim` cells. Never exceeds the image size.
pub fn suggest_dimensions(
    width: usize,
    height: usize,
    max_dim: usize,
) -> Result<(usize, usize), GridError> {
    if width == 0 || height == 0 {
        return Err(GridError::EmptyMask);
    }
    if max_dim == 0 {
        return Err(GridError::EmptyGrid { rows: 0, cols: 0 });
    }
    let long = width.max(height) as f64;
    let scale = (max_dim as f64 / long).min(1.0);
    let rows = ((height as f64 * scale).round() as usize).clamp(1, height);
    let cols = ((width as f64 * scale).round() as usize).clamp(1, width);
    Ok((rows, cols))
}
