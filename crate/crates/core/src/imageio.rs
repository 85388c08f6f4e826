//! Image, trimap and alpha-matte containers plus their PNG codecs.
//!
//! Every grid in this crate is stored row-major: the pixel at column `x`,
//! row `y` lives at linear index `y * width + x`.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use crate::error::{MattingError, Result};

/// One RGB color with channels in `[0, 1]`.
pub type Rgb = [f64; 3];

/// Gray values at or above this are read as foreground.
pub const TRIMAP_FG_MIN: u8 = 230;
/// Gray values at or below this are read as background.
pub const TRIMAP_BG_MAX: u8 = 25;

#[inline]
pub fn pixel_index(x: usize, y: usize, width: usize) -> usize {
    y * width + x
}

/// Indices of the 4-connected neighbours of `idx` that lie inside the grid.
pub fn neighbors4(idx: usize, width: usize, height: usize) -> impl Iterator<Item = usize> {
    let x = idx % width;
    let y = idx / width;
    let left = (x > 0).then(|| idx - 1);
    let right = (x + 1 < width).then(|| idx + 1);
    let up = (y > 0).then(|| idx - width);
    let down = (y + 1 < height).then(|| idx + width);
    [up, left, right, down].into_iter().flatten()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Image {
    /// Builds an image from row-major RGB triples.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height * 3 {
            return Err(MattingError::LengthMismatch {
                expected: width * height * 3,
                found: data.len(),
            });
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(MattingError::InvalidData(format!(
                "channel value {v} outside [0, 1]"
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel, clamping channels to `[0, 1]`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> Rgb) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend(f(x, y).iter().map(|c| c.clamp(0.0, 1.0)));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn pixel(&self, idx: usize) -> Rgb {
        let s = &self.data[idx * 3..idx * 3 + 3];
        [s[0], s[1], s[2]]
    }
}

/// A trimap label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Foreground,
    Background,
    Unknown,
}

impl Label {
    pub fn is_known(self) -> bool {
        self != Label::Unknown
    }

    /// Gray level used when writing a trimap to disk.
    pub fn gray(self) -> u8 {
        match self {
            Label::Foreground => 255,
            Label::Background => 0,
            Label::Unknown => 128,
        }
    }

    pub fn from_gray(g: u8) -> Self {
        if g >= TRIMAP_FG_MIN {
            Label::Foreground
        } else if g <= TRIMAP_BG_MAX {
            Label::Background
        } else {
            Label::Unknown
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trimap {
    width: usize,
    height: usize,
    labels: Vec<Label>,
}

impl Trimap {
    pub fn new(width: usize, height: usize, labels: Vec<Label>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(MattingError::LengthMismatch {
                expected: width * height,
                found: labels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            labels,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> Label) -> Self {
        let labels = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self {
            width,
            height,
            labels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, idx: usize) -> Label {
        self.labels[idx]
    }

    pub fn set_label(&mut self, idx: usize, label: Label) {
        self.labels[idx] = label;
    }

    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Unknown pixel indices in ascending order.
    pub fn unknown_indices(&self) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == Label::Unknown)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn neighbors4(&self, idx: usize) -> impl Iterator<Item = usize> {
        neighbors4(idx, self.width, self.height)
    }

    /// A known pixel with at least one unknown 4-neighbour.
    pub fn is_boundary(&self, idx: usize) -> bool {
        self.labels[idx].is_known()
            && self
                .neighbors4(idx)
                .any(|n| self.labels[n] == Label::Unknown)
    }

    /// Fails unless both a foreground and a background pixel exist.
    pub fn require_known(&self) -> Result<()> {
        if !self.labels.contains(&Label::Foreground) {
            return Err(MattingError::NoKnownPixels("foreground"));
        }
        if !self.labels.contains(&Label::Background) {
            return Err(MattingError::NoKnownPixels("background"));
        }
        Ok(())
    }

    pub fn check_dims(&self, width: usize, height: usize) -> Result<()> {
        if (self.width, self.height) != (width, height) {
            return Err(MattingError::DimensionMismatch {
                expected: (width, height),
                found: (self.width, self.height),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaMatte {
    width: usize,
    height: usize,
    alpha: Vec<f64>,
}

impl AlphaMatte {
    pub fn new(width: usize, height: usize, alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() != width * height {
            return Err(MattingError::LengthMismatch {
                expected: width * height,
                found: alpha.len(),
            });
        }
        if let Some(a) = alpha.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(MattingError::InvalidData(format!("alpha {a} outside [0, 1]")));
        }
        Ok(Self {
            width,
            height,
            alpha,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let alpha = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y).clamp(0.0, 1.0))
            .collect();
        Self {
            width,
            height,
            alpha,
        }
    }

    /// Foreground as 1, everything else as 0.
    pub fn from_trimap(trimap: &Trimap) -> Self {
        let alpha = trimap
            .labels()
            .iter()
            .map(|&l| if l == Label::Foreground { 1.0 } else { 0.0 })
            .collect();
        Self {
            width: trimap.width(),
            height: trimap.height(),
            alpha,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.alpha
    }

    #[inline]
    pub fn get(&self, idx: usize) -> f64 {
        self.alpha[idx]
    }

    pub fn to_gray8(&self) -> Vec<u8> {
        self.alpha
            .iter()
            .map(|a| (a.clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect()
    }
}

struct RawPng {
    width: usize,
    height: usize,
    channels: usize,
    bytes: Vec<u8>,
}

fn read_png(path: &Path) -> Result<RawPng> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(MattingError::FileNotFound(path.to_path_buf()))
        }
        Err(e) => return Err(e.into()),
    };
    let unsupported = |reason: String| MattingError::UnsupportedFormat {
        path: path.to_path_buf(),
        reason,
    };
    let mut decoder = png::Decoder::new(BufReader::new(file));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder
        .read_info()
        .map_err(|e| unsupported(e.to_string()))?;
    let info = reader.info();
    if info.bit_depth != png::BitDepth::Eight {
        return Err(unsupported(format!(
            "bit depth {:?}, expected 8",
            info.bit_depth
        )));
    }
    // Alpha channels are tolerated and discarded.
    let channels = match info.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::GrayscaleAlpha => 2,
        png::ColorType::Rgb => 3,
        png::ColorType::Rgba => 4,
        png::ColorType::Indexed => return Err(unsupported("palette image".into())),
    };
    let (width, height) = (info.width as usize, info.height as usize);
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| unsupported("image too large".into()))?;
    let mut bytes = vec![0u8; size];
    let frame = reader.next_frame(&mut bytes)?;
    bytes.truncate(frame.buffer_size());
    if frame.line_size != width * channels {
        // Rows are tightly packed for 8-bit data; anything else is a decoder surprise.
        return Err(unsupported("unexpected row stride".into()));
    }
    Ok(RawPng {
        width,
        height,
        channels,
        bytes,
    })
}

impl RawPng {
    fn rgb(&self, idx: usize) -> [u8; 3] {
        let p = &self.bytes[idx * self.channels..];
        if self.channels < 3 {
            [p[0]; 3]
        } else {
            [p[0], p[1], p[2]]
        }
    }

    fn gray(&self, idx: usize, path: &Path) -> Result<u8> {
        let [r, g, b] = self.rgb(idx);
        if r != g || g != b {
            return Err(MattingError::UnsupportedFormat {
                path: path.to_path_buf(),
                reason: format!("expected gray pixels, found ({r}, {g}, {b}) at index {idx}"),
            });
        }
        Ok(r)
    }
}

/// Loads an 8-bit RGB or grayscale PNG, scaling channels to `[0, 1]`.
pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let raw = read_png(path.as_ref())?;
    let n = raw.width * raw.height;
    let mut data = Vec::with_capacity(n * 3);
    for i in 0..n {
        data.extend(raw.rgb(i).iter().map(|&c| f64::from(c) / 255.0));
    }
    Ok(Image {
        width: raw.width,
        height: raw.height,
        data,
    })
}

/// Loads a white/gray/black trimap; requires both foreground and background pixels.
pub fn load_trimap(path: impl AsRef<Path>) -> Result<Trimap> {
    let path = path.as_ref();
    let raw = read_png(path)?;
    let labels = (0..raw.width * raw.height)
        .map(|i| raw.gray(i, path).map(Label::from_gray))
        .collect::<Result<Vec<_>>>()?;
    let trimap = Trimap::new(raw.width, raw.height, labels)?;
    trimap.require_known()?;
    Ok(trimap)
}

/// Loads a grayscale PNG as an alpha matte (ground truth files).
pub fn load_alpha(path: impl AsRef<Path>) -> Result<AlphaMatte> {
    let path = path.as_ref();
    let raw = read_png(path)?;
    let alpha = (0..raw.width * raw.height)
        .map(|i| raw.gray(i, path).map(|g| f64::from(g) / 255.0))
        .collect::<Result<Vec<_>>>()?;
    AlphaMatte::new(raw.width, raw.height, alpha)
}

fn write_png(
    path: &Path,
    width: usize,
    height: usize,
    color: png::ColorType,
    bytes: &[u8],
) -> Result<()> {
    let file = File::create(path)?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), width as u32, height as u32);
    encoder.set_color(color);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header()?;
    writer.write_image_data(bytes)?;
    writer.finish()?;
    Ok(())
}

/// Writes the matte as an 8-bit grayscale PNG with value `round(alpha * 255)`.
pub fn save_alpha(path: impl AsRef<Path>, matte: &AlphaMatte) -> Result<()> {
    write_png(
        path.as_ref(),
        matte.width,
        matte.height,
        png::ColorType::Grayscale,
        &matte.to_gray8(),
    )
}

pub fn save_image(path: impl AsRef<Path>, image: &Image) -> Result<()> {
    let bytes: Vec<u8> = image
        .data
        .iter()
        .map(|c| (c * 255.0).round() as u8)
        .collect();
    write_png(
        path.as_ref(),
        image.width,
        image.height,
        png::ColorType::Rgb,
        &bytes,
    )
}

/// Writes the trimap as 255 / 128 / 0 gray levels.
pub fn save_trimap(path: impl AsRef<Path>, trimap: &Trimap) -> Result<()> {
    let bytes: Vec<u8> = trimap.labels.iter().map(|l| l.gray()).collect();
    write_png(
        path.as_ref(),
        trimap.width,
        trimap.height,
        png::ColorType::Grayscale,
        &bytes,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_raw(path: &Path, w: u32, h: u32, color: png::ColorType, depth: png::BitDepth, data: &[u8]) {
        let file = File::create(path).unwrap();
        let mut enc = png::Encoder::new(BufWriter::new(file), w, h);
        enc.set_color(color);
        enc.set_depth(depth);
        if color == png::ColorType::Indexed {
            enc.set_palette(vec![0u8, 0, 0, 255, 255, 255]);
        }
        let mut wr = enc.write_header().unwrap();
        wr.write_image_data(data).unwrap();
    }

    #[test]
    fn scales_rgb_channels() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.png");
        write_raw(&p, 2, 1, png::ColorType::Rgb, png::BitDepth::Eight, &[51, 102, 204, 0, 255, 0]);
        let img = load_image(&p).unwrap();
        let expected = [0.2, 0.4, 0.8, 0.0, 1.0, 0.0];
        for (a, b) in img.data().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
    }

    #[test]
    fn white_and_black_pixels() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.png");
        write_raw(&p, 1, 1, png::ColorType::Rgb, png::BitDepth::Eight, &[255, 255, 255]);
        assert_eq!(load_image(&p).unwrap().data(), &[1.0, 1.0, 1.0]);
        write_raw(&p, 1, 1, png::ColorType::Rgb, png::BitDepth::Eight, &[0, 0, 0]);
        assert_eq!(load_image(&p).unwrap().data(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn grayscale_is_replicated() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.png");
        write_raw(&p, 1, 1, png::ColorType::Grayscale, png::BitDepth::Eight, &[51]);
        assert_eq!(load_image(&p).unwrap().pixel(0), [0.2, 0.2, 0.2]);
    }

    #[test]
    fn rejects_palette_and_deep_images() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("pal.png");
        write_raw(&p, 1, 1, png::ColorType::Indexed, png::BitDepth::Eight, &[1]);
        assert!(matches!(load_image(&p), Err(MattingError::UnsupportedFormat { .. })));
        let p16 = dir.path().join("deep.png");
        write_raw(&p16, 1, 1, png::ColorType::Grayscale, png::BitDepth::Sixteen, &[0, 1]);
        assert!(matches!(load_image(&p16), Err(MattingError::UnsupportedFormat { .. })));
    }

    #[test]
    fn missing_file() {
        let err = load_image("/nonexistent/nowhere.png").unwrap_err();
        assert!(matches!(err, MattingError::FileNotFound(_)));
        let err = load_trimap("/nonexistent/trimap.png").unwrap_err();
        assert!(matches!(err, MattingError::FileNotFound(_)));
    }

    #[test]
    fn trimap_gray_levels() {
        assert_eq!(Label::from_gray(255), Label::Foreground);
        assert_eq!(Label::from_gray(0), Label::Background);
        assert_eq!(Label::from_gray(128), Label::Unknown);
        assert_eq!(Label::from_gray(230), Label::Foreground);
        assert_eq!(Label::from_gray(229), Label::Unknown);
        assert_eq!(Label::from_gray(25), Label::Background);
        assert_eq!(Label::from_gray(26), Label::Unknown);
    }

    #[test]
    fn trimap_round_trip_and_known_check() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.png");
        let t = Trimap::new(
            3,
            1,
            vec![Label::Foreground, Label::Unknown, Label::Background],
        )
        .unwrap();
        save_trimap(&p, &t).unwrap();
        assert_eq!(load_trimap(&p).unwrap(), t);

        let no_bg = Trimap::new(2, 1, vec![Label::Foreground, Label::Unknown]).unwrap();
        save_trimap(&p, &no_bg).unwrap();
        assert!(matches!(load_trimap(&p), Err(MattingError::NoKnownPixels("background"))));
    }

    #[test]
    fn colored_trimap_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.png");
        write_raw(&p, 1, 1, png::ColorType::Rgb, png::BitDepth::Eight, &[255, 0, 0]);
        assert!(matches!(load_trimap(&p), Err(MattingError::UnsupportedFormat { .. })));
    }

    #[test]
    fn alpha_quantization() {
        let m = AlphaMatte::new(3, 1, vec![1.0, 0.0, 0.5]).unwrap();
        assert_eq!(m.to_gray8(), vec![255, 0, 128]);
    }

    #[test]
    fn matte_rejects_out_of_range() {
        assert!(AlphaMatte::new(1, 1, vec![1.5]).is_err());
        assert!(Image::new(1, 1, vec![0.0, -0.1, 0.0]).is_err());
        assert!(Image::new(2, 1, vec![0.0; 3]).is_err());
    }

    #[test]
    fn linear_index_convention() {
        assert_eq!(pixel_index(2, 1, 5), 7);
        let n: Vec<_> = neighbors4(pixel_index(0, 0, 3), 3, 3).collect();
        assert_eq!(n, vec![1, 3]);
        let n: Vec<_> = neighbors4(4, 3, 3).collect();
        assert_eq!(n, vec![1, 3, 5, 7]);
    }

    #[test]
    fn boundary_pixels() {
        let t = Trimap::new(
            4,
            1,
            vec![Label::Foreground, Label::Foreground, Label::Unknown, Label::Background],
        )
        .unwrap();
        assert!(!t.is_boundary(0));
        assert!(t.is_boundary(1));
        assert!(!t.is_boundary(2));
        assert!(t.is_boundary(3));
    }
}
