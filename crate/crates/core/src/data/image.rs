use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageReader};
use rand_distr::{Distribution, StandardNormal};

use super::{Sample, FEATURE_DIM};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// Images are rescaled to `IMAGE_SIDE x IMAGE_SIDE` before feature extraction.
pub const IMAGE_SIDE: usize = 250;

/// Sub-directory names under an image root, with their labels.
pub const NORMAL_DIR: &str = "normal";
pub const DEMENTED_DIR: &str = "demented";

/// 8-bit grayscale image, row-major, with its class label.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageRecord {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
    pub label: u8,
}

impl ImageRecord {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>, label: u8) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(Error::invalid(format!(
                "{width}x{height} image cannot hold {} pixels",
                pixels.len()
            )));
        }
        if label > 1 {
            return Err(Error::invalid(format!("label must be 0 or 1, got {label}")));
        }
        Ok(Self {
            width,
            height,
            pixels,
            label,
        })
    }

    fn at(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x] as f64
    }
}

fn is_supported(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| e.eq_ignore_ascii_case("png") || e.eq_ignore_ascii_case("pgm"))
        .unwrap_or(false)
}

/// Integer luma `(77 R + 150 G + 29 B) >> 8`.
fn to_gray(img: DynamicImage) -> (usize, usize, Vec<u8>) {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let pixels = match img {
        DynamicImage::ImageLuma8(g) => g.into_raw(),
        img if !img.color().has_color() => img.to_luma8().into_raw(),
        img => img
            .to_rgb8()
            .pixels()
            .map(|p| {
                let [r, g, b] = p.0;
                ((77 * r as u32 + 150 * g as u32 + 29 * b as u32) >> 8) as u8
            })
            .collect(),
    };
    (w, h, pixels)
}

fn decode(path: &Path, label: u8) -> Result<ImageRecord> {
    let image_err = |message: String| Error::Image {
        path: path.to_path_buf(),
        message,
    };
    let img = ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?
        .decode()
        .map_err(|e| image_err(e.to_string()))?;
    let (w, h, pixels) = to_gray(img);
    ImageRecord::new(w, h, pixels, label).map_err(|e| image_err(e.to_string()))
}

/// Loads every `.png`/`.pgm` file in `dir`, sorted by file name bytes.
pub fn load_image_dir(dir: &Path, label: u8) -> Result<Vec<ImageRecord>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths: Vec<PathBuf> = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && is_supported(&path) {
            paths.push(path);
        }
    }
    paths.sort_by(|a, b| {
        a.file_name()
            .unwrap_or_default()
            .as_encoded_bytes()
            .cmp(b.file_name().unwrap_or_default().as_encoded_bytes())
    });
    paths.iter().map(|p| decode(p, label)).collect()
}

/// Loads `<root>/normal` (label 0) followed by `<root>/demented` (label 1).
pub fn load_labeled_root(root: &Path) -> Result<Vec<ImageRecord>> {
    let mut records = load_image_dir(&root.join(NORMAL_DIR), 0)?;
    records.extend(load_image_dir(&root.join(DEMENTED_DIR), 1)?);
    Ok(records)
}

/// Bilinear resize with pixel-center alignment and edge clamping; the result
/// is rounded half-up back to 8 bits.
pub fn resize_bilinear(image: &ImageRecord, out_w: usize, out_h: usize) -> Result<ImageRecord> {
    if out_w == 0 || out_h == 0 {
        return Err(Error::invalid(format!("cannot resize to {out_w}x{out_h}")));
    }
    let sx = image.width as f64 / out_w as f64;
    let sy = image.height as f64 / out_h as f64;
    let coord = |dst: usize, scale: f64, src_len: usize| {
        let s = ((dst as f64 + 0.5) * scale - 0.5).clamp(0.0, (src_len - 1) as f64);
        let i0 = s.floor() as usize;
        let i1 = (i0 + 1).min(src_len - 1);
        (i0, i1, s - i0 as f64)
    };
    let cols: Vec<_> = (0..out_w).map(|x| coord(x, sx, image.width)).collect();
    let mut pixels = Vec::with_capacity(out_w * out_h);
    for y in 0..out_h {
        let (y0, y1, fy) = coord(y, sy, image.height);
        for &(x0, x1, fx) in &cols {
            let top = image.at(x0, y0) * (1.0 - fx) + image.at(x1, y0) * fx;
            let bottom = image.at(x0, y1) * (1.0 - fx) + image.at(x1, y1) * fx;
            let v = top * (1.0 - fy) + bottom * fy;
            pixels.push((v + 0.5).floor().clamp(0.0, 255.0) as u8);
        }
    }
    ImageRecord::new(out_w, out_h, pixels, image.label)
}

/// Fixed Gaussian projection from a flattened 250x250 image (scaled to
/// `[0, 1]`) to 512 features. Matrix entries are `N(0, 1/250)` drawn
/// row-major from the seed; rows are regenerated on the fly, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomProjection {
    pub seed: u64,
}

impl RandomProjection {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn project(&self, images: &[ImageRecord]) -> Result<Vec<Sample>> {
        let input_len = IMAGE_SIDE * IMAGE_SIDE;
        for img in images {
            if img.width != IMAGE_SIDE || img.height != IMAGE_SIDE {
                return Err(Error::invalid(format!(
                    "projection needs {IMAGE_SIDE}x{IMAGE_SIDE} images, got {}x{}",
                    img.width, img.height
                )));
            }
        }
        let scaled: Vec<Vec<f64>> = images
            .iter()
            .map(|img| img.pixels.iter().map(|&p| p as f64 / 255.0).collect())
            .collect();
        let std = 1.0 / (input_len as f64).sqrt();
        let mut rng = stream_rng(self.seed, Stream::Projection);
        let mut out = vec![vec![0.0f64; FEATURE_DIM]; images.len()];
        let mut row = vec![0.0f64; input_len];
        for r in 0..FEATURE_DIM {
            for v in row.iter_mut() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *v = z * std;
            }
            for (acc, px) in out.iter_mut().zip(&scaled) {
                acc[r] = row.iter().zip(px).map(|(a, b)| a * b).sum();
            }
        }
        out.into_iter()
            .zip(images)
            .map(|(f, img)| Sample::new(f.into_iter().map(|v| v as f32).collect(), img.label))
            .collect()
    }
}

/// Projects one 250x250 image to a 512-feature sample.
pub fn project_features(image: &ImageRecord, projection_seed: u64) -> Result<Sample> {
    let mut v = RandomProjection::new(projection_seed).project(std::slice::from_ref(image))?;
    Ok(v.remove(0))
}
