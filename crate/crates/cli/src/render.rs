//! Point-cloud rasterization to binary PGM (P5).

use ifskit::{Error, PointCloud, Result};
use std::io::Write;

fn invalid(msg: &str) -> Error {
    Error::InvalidArgument(msg.to_string())
}

/// A hit-count canvas with a world-to-pixel transform that fits the world
/// bounding box into the image, preserving aspect ratio and centering the
/// letterboxed remainder.
pub struct RenderCanvas {
    width: u32,
    height: u32,
    counts: Vec<u64>,
    scale: f64,
    lo: [f64; 2],
    off: [f64; 2],
}

impl RenderCanvas {
    /// A canvas fitted to the world box `[lo, hi]`. Degenerate spans (a
    /// single column or row of points) collapse onto the image center.
    pub fn new(width: u32, height: u32, lo: [f64; 2], hi: [f64; 2]) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(invalid("image dimensions must be at least 1x1"));
        }
        let span = [hi[0] - lo[0], hi[1] - lo[1]];
        if span.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(invalid("world box is not a box"));
        }
        let mut scale = f64::INFINITY;
        if span[0] > 0.0 {
            scale = scale.min((width - 1) as f64 / span[0]);
        }
        if span[1] > 0.0 {
            scale = scale.min((height - 1) as f64 / span[1]);
        }
        if !scale.is_finite() {
            scale = 0.0;
        }
        let off = [
            ((width - 1) as f64 - scale * span[0]) / 2.0,
            ((height - 1) as f64 - scale * span[1]) / 2.0,
        ];
        Ok(Self {
            width,
            height,
            counts: vec![0; width as usize * height as usize],
            scale,
            lo,
            off,
        })
    }

    /// Accumulate one world point on the nearest pixel center. The y axis
    /// points up in world space, down in the image.
    pub fn splat(&mut self, x: f64, y: f64) {
        let px = (x - self.lo[0]) * self.scale + self.off[0];
        let py = (y - self.lo[1]) * self.scale + self.off[1];
        let ix = ((px + 0.5).floor() as i64).clamp(0, self.width as i64 - 1) as usize;
        let iy = ((py + 0.5).floor() as i64).clamp(0, self.height as i64 - 1) as usize;
        let row = self.height as usize - 1 - iy;
        self.counts[row * self.width as usize + ix] += 1;
    }

    /// Rasterize a whole cloud; 1-dim clouds draw on the line y = 0.
    pub fn splat_cloud(&mut self, cloud: &PointCloud) {
        for p in cloud.points() {
            let y = if p.len() > 1 { p[1] } else { 0.0 };
            self.splat(p[0], y);
        }
    }

    /// Write the canvas as a binary PGM with maxval 255. Intensity is
    /// `255 * (count / max_count)^gamma` rounded half-up, floored at 1 for
    /// any hit pixel so changing gamma never changes which pixels are lit.
    pub fn write_pgm<W: Write>(&self, w: &mut W, gamma: f64) -> Result<()> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(invalid("gamma must be positive"));
        }
        let max = self.counts.iter().copied().max().unwrap_or(0);
        if max == 0 {
            return Err(invalid("no points were rasterized"));
        }
        write!(w, "P5\n{} {}\n255\n", self.width, self.height)?;
        let mut bytes = Vec::with_capacity(self.counts.len());
        for &c in &self.counts {
            if c == 0 {
                bytes.push(0u8);
                continue;
            }
            let v = 255.0 * (c as f64 / max as f64).powf(gamma);
            bytes.push(((v + 0.5).floor() as u32).clamp(1, 255) as u8);
        }
        w.write_all(&bytes)?;
        Ok(())
    }
}

/// Fit a canvas to a cloud and draw it.
pub fn rasterize(cloud: &PointCloud, width: u32, height: u32) -> Result<RenderCanvas> {
    let (lo, hi) = cloud.bbox()?;
    let world_lo = [lo[0], if lo.len() > 1 { lo[1] } else { 0.0 }];
    let world_hi = [hi[0], if hi.len() > 1 { hi[1] } else { 0.0 }];
    let mut canvas = RenderCanvas::new(width, height, world_lo, world_hi)?;
    canvas.splat_cloud(cloud);
    Ok(canvas)
}
