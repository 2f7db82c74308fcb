use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::image::GrayImage;
use crate::error::{DcfError, Result};

/// Axis-aligned box; `x`, `y` are the 1-indexed top-left pixel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BoundingBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Result<Self> {
        if !(w > 0.0 && h > 0.0) || ![x, y, w, h].iter().all(|v| v.is_finite()) {
            return Err(DcfError::InvalidParameter(format!("invalid box {x},{y},{w},{h}")));
        }
        Ok(Self { x, y, w, h })
    }

    /// Centre in 0-indexed pixel coordinates.
    pub fn center(&self) -> (f64, f64) {
        (self.x - 1.0 + (self.w - 1.0) / 2.0, self.y - 1.0 + (self.h - 1.0) / 2.0)
    }

    pub fn from_center(center: (f64, f64), size: (f64, f64)) -> Self {
        Self {
            x: center.0 + 1.0 - (size.0 - 1.0) / 2.0,
            y: center.1 + 1.0 - (size.1 - 1.0) / 2.0,
            w: size.0,
            h: size.1,
        }
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }
}

impl fmt::Display for BoundingBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = |v: f64| (v * 1e4).round() / 1e4;
        write!(f, "{},{},{},{}", r(self.x), r(self.y), r(self.w), r(self.h))
    }
}

impl FromStr for BoundingBox {
    type Err = DcfError;

    /// Parses `x,y,w,h`; commas, tabs, and spaces all separate fields.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .collect();
        if parts.len() != 4 {
            return Err(DcfError::Format(format!("expected 4 box fields in {s:?}")));
        }
        let mut v = [0.0; 4];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p
                .parse()
                .map_err(|_| DcfError::Format(format!("bad box field {p:?} in {s:?}")))?;
        }
        Self::new(v[0], v[1], v[2], v[3]).map_err(|e| DcfError::Format(e.to_string()))
    }
}

pub fn parse_boxes(text: &str) -> Result<Vec<BoundingBox>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.parse()
                .map_err(|e: DcfError| DcfError::Format(format!("line {}: {e}", i + 1)))
        })
        .collect()
}

pub fn read_boxes(path: impl AsRef<Path>) -> Result<Vec<BoundingBox>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| DcfError::io(path, e))?;
    parse_boxes(&text)
}

pub fn format_boxes(boxes: &[BoundingBox]) -> String {
    boxes.iter().map(|b| format!("{b}\n")).collect()
}

pub fn write_boxes(path: impl AsRef<Path>, boxes: &[BoundingBox]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_boxes(boxes)).map_err(|e| DcfError::io(path, e))
}

/// A directory in the OTB layout: `img/NNNN.{jpg,png}` and an optional
/// `groundtruth_rect.txt`.
#[derive(Debug, Clone)]
pub struct Sequence {
    pub name: String,
    pub frames: Vec<PathBuf>,
    pub groundtruth: Option<Vec<BoundingBox>>,
}

pub const GROUNDTRUTH_FILE: &str = "groundtruth_rect.txt";

impl Sequence {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let img = dir.join("img");
        let mut frames: Vec<(u64, PathBuf)> = Vec::new();
        for entry in fs::read_dir(&img).map_err(|e| DcfError::io(&img, e))? {
            let path = entry.map_err(|e| DcfError::io(&img, e))?.path();
            let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
            if !matches!(ext.as_deref(), Some("jpg" | "jpeg" | "png")) {
                continue;
            }
            if let Some(num) = path.file_stem().and_then(|s| s.to_str()).and_then(|s| s.parse().ok()) {
                frames.push((num, path));
            }
        }
        if frames.is_empty() {
            return Err(DcfError::Format(format!("no frames in {}", img.display())));
        }
        frames.sort();
        let gt_path = dir.join(GROUNDTRUTH_FILE);
        let groundtruth = if gt_path.exists() {
            Some(read_boxes(&gt_path)?)
        } else {
            None
        };
        Ok(Self {
            name: dir
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            frames: frames.into_iter().map(|(_, p)| p).collect(),
            groundtruth,
        })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn load_frames(&self) -> Result<Vec<GrayImage>> {
        self.frames.iter().map(GrayImage::load).collect()
    }

    /// Ground truth, or a format error when the file is missing.
    pub fn groundtruth(&self) -> Result<&[BoundingBox]> {
        self.groundtruth
            .as_deref()
            .ok_or_else(|| DcfError::Format(format!("sequence {} has no {GROUNDTRUTH_FILE}", self.name)))
    }
}

/// Parameters of the synthetic moving-square sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FixtureSpec {
    pub frames: usize,
    pub width: usize,
    pub height: usize,
    pub square: usize,
    /// Peak horizontal and vertical excursion of the path, pixels.
    pub amplitude: (f64, f64),
    pub seed: u64,
}

impl Default for FixtureSpec {
    fn default() -> Self {
        Self {
            frames: 100,
            width: 320,
            height: 240,
            square: 32,
            amplitude: (70.0, 50.0),
            seed: 7,
        }
    }
}

impl FixtureSpec {
    /// Integer top-left corner (0-indexed) of the square in frame `f`.
    pub fn corner(&self, f: usize) -> (usize, usize) {
        let s = f as f64 / self.frames.max(1) as f64 * std::f64::consts::TAU;
        let cx = (self.width - self.square) as f64 / 2.0 + self.amplitude.0 * s.sin();
        let cy = (self.height - self.square) as f64 / 2.0 + self.amplitude.1 * (2.0 * s).sin();
        let clamp = |v: f64, hi: usize| v.round().clamp(0.0, hi as f64) as usize;
        (
            clamp(cx, self.width - self.square),
            clamp(cy, self.height - self.square),
        )
    }

    pub fn groundtruth(&self) -> Vec<BoundingBox> {
        let s = self.square as f64;
        (0..self.frames)
            .map(|f| {
                let (x, y) = self.corner(f);
                BoundingBox {
                    x: x as f64 + 1.0,
                    y: y as f64 + 1.0,
                    w: s,
                    h: s,
                }
            })
            .collect()
    }

    /// Renders the sequence in memory.
    ///
    /// The background is a fixed smooth pattern plus faint noise; the
    /// square carries a high-contrast block texture that moves with it.
    pub fn render(&self) -> Result<Vec<GrayImage>> {
        if self.square == 0 || self.square > self.width.min(self.height) || self.frames == 0 {
            return Err(DcfError::InvalidParameter("fixture square must fit the frame".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let background: Vec<f64> = (0..self.width * self.height)
            .map(|idx| {
                let (x, y) = ((idx % self.width) as f64, (idx / self.width) as f64);
                110.0 + 25.0 * (x / 9.0).sin() * (y / 13.0).cos() + rng.random_range(-4.0..4.0)
            })
            .collect();
        let block = 4;
        let blocks = self.square.div_ceil(block);
        let texture: Vec<f64> = (0..blocks * blocks).map(|_| rng.random_range(20.0..235.0)).collect();
        (0..self.frames)
            .map(|f| {
                let (x0, y0) = self.corner(f);
                GrayImage::from_fn(self.width, self.height, |x, y| {
                    if (x0..x0 + self.square).contains(&x) && (y0..y0 + self.square).contains(&y) {
                        texture[((y - y0) / block) * blocks + (x - x0) / block]
                    } else {
                        background[y * self.width + x]
                    }
                })
            })
            .collect()
    }

    /// Writes `img/%04d.png` and the ground truth into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        let img = dir.join("img");
        fs::create_dir_all(&img).map_err(|e| DcfError::io(&img, e))?;
        for (f, frame) in self.render()?.iter().enumerate() {
            frame.save_png(img.join(format!("{:04}.png", f + 1)))?;
        }
        write_boxes(dir.join(GROUNDTRUTH_FILE), &self.groundtruth())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_parsing() {
        let b: BoundingBox = "10,20,30,40".parse().unwrap();
        assert_eq!(b, BoundingBox::new(10.0, 20.0, 30.0, 40.0).unwrap());
        let t: BoundingBox = "10\t20\t30\t40".parse().unwrap();
        assert_eq!(b, t);
        assert!("1,2,3".parse::<BoundingBox>().is_err());
        assert!("1,2,0,4".parse::<BoundingBox>().is_err());
        assert!("1,2,x,4".parse::<BoundingBox>().is_err());
    }

    #[test]
    fn center_round_trip() {
        let b = BoundingBox::new(11.0, 21.0, 32.0, 20.0).unwrap();
        assert_eq!(b.center(), (25.5, 29.5));
        assert_eq!(BoundingBox::from_center(b.center(), (32.0, 20.0)), b);
        assert_eq!(b.to_string(), "11,21,32,20");
    }

    #[test]
    fn fixture_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let spec = FixtureSpec {
            frames: 5,
            width: 64,
            height: 48,
            square: 12,
            amplitude: (10.0, 5.0),
            seed: 1,
        };
        spec.write(dir.path()).unwrap();
        let seq = Sequence::open(dir.path()).unwrap();
        assert_eq!(seq.len(), 5);
        assert_eq!(seq.groundtruth().unwrap(), spec.groundtruth().as_slice());
        let frames = seq.load_frames().unwrap();
        let rendered = spec.render().unwrap();
        for (a, b) in frames.iter().zip(&rendered) {
            assert!(a
                .as_slice()
                .iter()
                .zip(b.as_slice())
                .all(|(p, q)| (p - q.round()).abs() < 1e-9));
        }
    }

    #[test]
    fn missing_directory_is_an_io_error() {
        assert!(matches!(Sequence::open("/nonexistent/seq"), Err(DcfError::Io { .. })));
    }
}
