//! Rasters, masks and the pixel indexing convention shared by every module.
//!
//! Pixels are stored row-major: the linear index of row `i`, column `j` on a
//! grid of width `N` is `k = i * N + j`. Geometric code works in an
//! x-right/y-up frame and converts at its own boundary.

use std::path::Path;

use image::{DynamicImage, ExtendedColorType, ImageFormat, ImageReader};

use crate::error::{OsmoseError, Result};

/// Smallest 8-bit quantisation step, the default positivity lift.
pub const DEFAULT_LIFT: f64 = 1.0 / 255.0;

/// Linear pixel index on a row-major grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridIndex(pub usize);

impl GridIndex {
    #[inline]
    pub fn from_ij(i: usize, j: usize, width: usize) -> Self {
        GridIndex(i * width + j)
    }

    #[inline]
    pub fn to_ij(self, width: usize) -> (usize, usize) {
        (self.0 / width, self.0 % width)
    }
}

/// A single real value per pixel: one image channel, a saliency map, an angle map.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != height * width {
            return Err(OsmoseError::DimensionMismatch {
                expected: format!("{} values for {height}x{width}", height * width),
                actual: format!("{} values", data.len()),
            });
        }
        Ok(ScalarField {
            height,
            width,
            data,
        })
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Self {
        ScalarField {
            height,
            width,
            data: vec![value; height * width],
        }
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(height * width);
        for i in 0..height {
            for j in 0..width {
                data.push(f(i, j));
            }
        }
        ScalarField {
            height,
            width,
            data,
        }
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.width + j] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn same_shape(&self, height: usize, width: usize) -> bool {
        self.height == height && self.width == width
    }
}

/// Positive multi-channel raster. Channels are stored as separate planes.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
    lift: f64,
}

impl ImageBuffer {
    /// Builds an image from planar data (`channels` consecutive row-major planes).
    pub fn from_planes(
        height: usize,
        width: usize,
        channels: usize,
        data: Vec<f64>,
    ) -> Result<Self> {
        if height < 2 || width < 2 {
            return Err(OsmoseError::invalid(format!(
                "image must be at least 2x2, got {height}x{width}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(OsmoseError::UnsupportedFormat(format!(
                "{channels} channels (expected 1 or 3)"
            )));
        }
        if data.len() != height * width * channels {
            return Err(OsmoseError::DimensionMismatch {
                expected: format!("{} samples", height * width * channels),
                actual: format!("{} samples", data.len()),
            });
        }
        Ok(ImageBuffer {
            height,
            width,
            channels,
            data,
            lift: 0.0,
        })
    }

    pub fn from_channels(channels: &[ScalarField]) -> Result<Self> {
        let first = channels
            .first()
            .ok_or_else(|| OsmoseError::invalid("image needs at least one channel"))?;
        let (h, w) = (first.height(), first.width());
        let mut data = Vec::with_capacity(h * w * channels.len());
        for ch in channels {
            if !ch.same_shape(h, w) {
                return Err(OsmoseError::DimensionMismatch {
                    expected: format!("{h}x{w}"),
                    actual: format!("{}x{}", ch.height(), ch.width()),
                });
            }
            data.extend_from_slice(ch.as_slice());
        }
        Self::from_planes(h, w, channels.len(), data)
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Offset added by [`lift_positive`], undone by [`save_image`].
    pub fn lift(&self) -> f64 {
        self.lift
    }

    #[inline]
    pub fn pixels(&self) -> usize {
        self.height * self.width
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, c: usize) -> f64 {
        self.data[c * self.pixels() + i * self.width + j]
    }

    pub fn plane(&self, c: usize) -> &[f64] {
        let s = self.pixels();
        &self.data[c * s..(c + 1) * s]
    }

    pub fn channel(&self, c: usize) -> ScalarField {
        ScalarField {
            height: self.height,
            width: self.width,
            data: self.plane(c).to_vec(),
        }
    }

    pub fn set_plane(&mut self, c: usize, values: &[f64]) -> Result<()> {
        let s = self.pixels();
        if values.len() != s {
            return Err(OsmoseError::DimensionMismatch {
                expected: format!("{s} values"),
                actual: format!("{} values", values.len()),
            });
        }
        self.data[c * s..(c + 1) * s].copy_from_slice(values);
        Ok(())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn channel_mean(&self, c: usize) -> f64 {
        self.plane(c).iter().sum::<f64>() / self.pixels() as f64
    }

    /// Per-pixel average over channels.
    pub fn greyscale(&self) -> ScalarField {
        let s = self.pixels();
        let mut out = vec![0.0; s];
        for c in 0..self.channels {
            for (o, v) in out.iter_mut().zip(self.plane(c)) {
                *o += v;
            }
        }
        let inv = 1.0 / self.channels as f64;
        out.iter_mut().for_each(|v| *v *= inv);
        ScalarField {
            height: self.height,
            width: self.width,
            data: out,
        }
    }
}

/// Binary indicator of the shadow-boundary band.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskField {
    height: usize,
    width: usize,
    data: Vec<bool>,
}

impl MaskField {
    pub fn empty(height: usize, width: usize) -> Self {
        MaskField {
            height,
            width,
            data: vec![false; height * width],
        }
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(height * width);
        for i in 0..height {
            for j in 0..width {
                data.push(f(i, j));
            }
        }
        MaskField {
            height,
            width,
            data,
        }
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.width + j]
    }

    #[inline]
    pub fn at(&self, k: usize) -> bool {
        self.data[k]
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.data[i * self.width + j] = value;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn is_clear(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.data
    }

    pub fn check_shape(&self, height: usize, width: usize) -> Result<()> {
        if self.height != height || self.width != width {
            return Err(OsmoseError::DimensionMismatch {
                expected: format!("{height}x{width} mask"),
                actual: format!("{}x{}", self.height, self.width),
            });
        }
        Ok(())
    }
}

fn decode(path: &Path) -> Result<DynamicImage> {
    let reader = ImageReader::open(path).map_err(|source| OsmoseError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let reader = reader
        .with_guessed_format()
        .map_err(|source| OsmoseError::Io {
            path: path.to_path_buf(),
            source,
        })?;
    reader.decode().map_err(|e| OsmoseError::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Reads an 8- or 16-bit greyscale or RGB raster and scales it to [0, 1].
pub fn load_image(path: impl AsRef<Path>) -> Result<ImageBuffer> {
    let path = path.as_ref();
    let img = decode(path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let s = w * h;
    let (channels, data) = match img {
        DynamicImage::ImageLuma8(buf) => (
            1,
            buf.into_raw()
                .into_iter()
                .map(|v| v as f64 / 255.0)
                .collect(),
        ),
        DynamicImage::ImageLuma16(buf) => (
            1,
            buf.into_raw()
                .into_iter()
                .map(|v| v as f64 / 65535.0)
                .collect(),
        ),
        DynamicImage::ImageRgb8(buf) => (3, deinterleave(buf.as_raw(), s, 255.0)),
        DynamicImage::ImageRgb16(buf) => (3, deinterleave(buf.as_raw(), s, 65535.0)),
        other => {
            return Err(OsmoseError::UnsupportedFormat(format!(
                "{:?} in {}",
                other.color(),
                path.display()
            )))
        }
    };
    ImageBuffer::from_planes(h, w, channels, data)
}

fn deinterleave<T: Copy + Into<f64>>(raw: &[T], pixels: usize, scale: f64) -> Vec<f64> {
    let mut out = vec![0.0; 3 * pixels];
    for (k, px) in raw.chunks_exact(3).enumerate() {
        for c in 0..3 {
            out[c * pixels + k] = px[c].into() / scale;
        }
    }
    out
}

/// Adds `offset` to every sample so that logarithms stay finite.
pub fn lift_positive(img: &ImageBuffer, offset: f64) -> Result<ImageBuffer> {
    if !(offset > 0.0) || !offset.is_finite() {
        return Err(OsmoseError::invalid(format!(
            "lift offset must be positive, got {offset}"
        )));
    }
    let mut out = img.clone();
    out.data.iter_mut().for_each(|v| *v += offset);
    out.lift = img.lift + offset;
    Ok(out)
}

#[inline]
fn quantise(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Removes the recorded lift, clamps to [0, 1] and writes an 8-bit PNG.
pub fn save_image(img: &ImageBuffer, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let s = img.pixels();
    let mut raw = vec![0u8; s * img.channels];
    for c in 0..img.channels {
        for (k, v) in img.plane(c).iter().enumerate() {
            raw[k * img.channels + c] = quantise(v - img.lift);
        }
    }
    let color = if img.channels == 1 {
        ExtendedColorType::L8
    } else {
        ExtendedColorType::Rgb8
    };
    write_png(path, &raw, img.width, img.height, color)
}

pub(crate) fn write_png(
    path: &Path,
    raw: &[u8],
    width: usize,
    height: usize,
    color: ExtendedColorType,
) -> Result<()> {
    image::save_buffer_with_format(
        path,
        raw,
        width as u32,
        height as u32,
        color,
        ImageFormat::Png,
    )
    .map_err(|e| match e {
        image::ImageError::IoError(source) => OsmoseError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => OsmoseError::Encode {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    })
}

/// Reads a raster and marks every pixel whose greyscale value reaches `threshold`.
pub fn load_mask(path: impl AsRef<Path>, threshold: f64) -> Result<MaskField> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(OsmoseError::invalid(format!(
            "mask threshold must lie in (0, 1), got {threshold}"
        )));
    }
    let path = path.as_ref();
    let img = decode(path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    // drop alpha; average the colour channels
    let rgb = img.to_rgb32f();
    let data = rgb
        .as_raw()
        .chunks_exact(3)
        .map(|px| (px[0] as f64 + px[1] as f64 + px[2] as f64) / 3.0 >= threshold)
        .collect();
    Ok(MaskField {
        height: h,
        width: w,
        data,
    })
}

/// Morphological dilation with a `(2r+1) x (2r+1)` square, clipped at the borders.
pub fn dilate_mask(mask: &MaskField, radius: usize) -> MaskField {
    if radius == 0 {
        return mask.clone();
    }
    let (h, w) = (mask.height, mask.width);
    let mut rows = vec![false; h * w];
    for i in 0..h {
        for j in 0..w {
            let lo = j.saturating_sub(radius);
            let hi = (j + radius).min(w - 1);
            rows[i * w + j] = (lo..=hi).any(|jj| mask.data[i * w + jj]);
        }
    }
    let mut data = vec![false; h * w];
    for i in 0..h {
        let lo = i.saturating_sub(radius);
        let hi = (i + radius).min(h - 1);
        for j in 0..w {
            data[i * w + j] = (lo..=hi).any(|ii| rows[ii * w + j]);
        }
    }
    MaskField {
        height: h,
        width: w,
        data,
    }
}
