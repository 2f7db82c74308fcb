use std::path::Path;

use crate::error::{DcfError, Result};

/// Row-major grayscale image with intensities in `[0, 255]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(DcfError::Shape("image must be nonempty".into()));
        }
        if data.len() != width * height {
            return Err(DcfError::Shape(format!(
                "image {width}x{height} needs {} values, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    /// Decodes any format supported by `image`; colour is reduced with
    /// weights (0.299, 0.587, 0.114).
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let img = image::open(path).map_err(|source| DcfError::Image {
            path: path.to_path_buf(),
            source,
        })?;
        let (w, h) = (img.width() as usize, img.height() as usize);
        let data = if img.color().has_color() {
            img.to_rgb8()
                .pixels()
                .map(|p| 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64)
                .collect()
        } else {
            img.to_luma8().pixels().map(|p| p[0] as f64).collect()
        };
        Self::new(w, h, data)
    }

    /// Writes an 8-bit grayscale PNG, rounding and clamping intensities.
    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let bytes: Vec<u8> = self.data.iter().map(|v| v.round().clamp(0.0, 255.0) as u8).collect();
        image::save_buffer(
            path,
            &bytes,
            self.width as u32,
            self.height as u32,
            image::ColorType::L8,
        )
        .map_err(|source| DcfError::Image {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// Pixel read with coordinates clamped to the nearest edge.
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.get(x, y)
    }

    /// Bilinear sample at fractional pixel coordinates, edge-replicated.
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let x0 = x.floor();
        let y0 = y.floor();
        let fx = x - x0;
        let fy = y - y0;
        let (x0, y0) = (x0 as isize, y0 as isize);
        let top = self.get_clamped(x0, y0) * (1.0 - fx) + self.get_clamped(x0 + 1, y0) * fx;
        let bottom = self.get_clamped(x0, y0 + 1) * (1.0 - fx) + self.get_clamped(x0 + 1, y0 + 1) * fx;
        top * (1.0 - fy) + bottom * fy
    }
}

/// Side in pixels of the square search window: `round(sqrt(ratio·w·h))`.
pub fn search_side(target_size: (f64, f64), area_ratio: f64) -> Result<f64> {
    let (w, h) = target_size;
    if !(w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite()) {
        return Err(DcfError::InvalidParameter(format!("degenerate target size {w}x{h}")));
    }
    if !(area_ratio >= 1.0) {
        return Err(DcfError::InvalidParameter(format!(
            "area_ratio must be >= 1, got {area_ratio}"
        )));
    }
    let side = (area_ratio * w * h).sqrt().round();
    Ok(side.max(1.0))
}

/// Square patch of side `round(sqrt(area_ratio·w·h))` centred at `center`
/// (0-indexed pixel coordinates), resampled bilinearly to `out_side` pixels.
/// Pixels outside the frame replicate the nearest edge.
pub fn crop_window(
    frame: &GrayImage,
    center: (f64, f64),
    target_size: (f64, f64),
    area_ratio: f64,
    out_side: usize,
) -> Result<GrayImage> {
    let side = search_side(target_size, area_ratio)?;
    crop_square(frame, center, side, out_side)
}

/// Square patch of `side` source pixels centred at `center`, resampled to
/// `out_side` pixels.
pub fn crop_square(frame: &GrayImage, center: (f64, f64), side: f64, out_side: usize) -> Result<GrayImage> {
    if out_side == 0 || !(side > 0.0) {
        return Err(DcfError::InvalidParameter("crop side must be positive".into()));
    }
    let scale = side / out_side as f64;
    let left = center.0 - side / 2.0;
    let top = center.1 - side / 2.0;
    GrayImage::from_fn(out_side, out_side, |px, py| {
        let sx = left + (px as f64 + 0.5) * scale - 0.5;
        let sy = top + (py as f64 + 0.5) * scale - 0.5;
        frame.sample(sx, sy)
    })
}
