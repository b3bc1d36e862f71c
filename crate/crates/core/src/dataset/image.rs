//! Image grids, dihedral augmentation, and PGM / CSV-grid ingestion.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major image with `height·width·channels` values in [0,1].
/// Index layout: `((row·width) + col)·channels + channel`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid<T: Scalar = f64> {
    height: usize,
    width: usize,
    channels: usize,
    values: Vec<T>,
}

impl<T: Scalar> ImageGrid<T> {
    pub fn new(height: usize, width: usize, channels: usize, values: Vec<T>) -> Result<Self> {
        if height == 0 || width == 0 || channels == 0 {
            return Err(Error::ShapeError(format!(
                "image dimensions must be positive, got {height}x{width}x{channels}"
            )));
        }
        if values.len() != height * width * channels {
            return Err(Error::ShapeError(format!(
                "expected {} values for {height}x{width}x{channels}, got {}",
                height * width * channels,
                values.len()
            )));
        }
        if values.iter().any(|v| !(*v >= T::zero() && *v <= T::one())) {
            return Err(Error::InvalidSpec("pixel values must lie in [0,1]".into()));
        }
        Ok(ImageGrid {
            height,
            width,
            channels,
            values,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize, channel: usize) -> T {
        self.values[(row * self.width + col) * self.channels + channel]
    }

    /// Flattens into a feature row (the layout documented on the type).
    pub fn into_features(self) -> Vec<T> {
        self.values
    }
}

/// The geometric augmentation operations: horizontal/vertical mirror and
/// counterclockwise quarter-turn rotations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AugmentOp {
    FlipH,
    FlipV,
    Rot90,
    Rot180,
    Rot270,
}

/// Applies a pixel permutation; the multiset of values is preserved and
/// channels travel with their pixel. `Rot90`/`Rot270` swap the dimensions.
pub fn augment<T: Scalar>(img: &ImageGrid<T>, op: AugmentOp) -> ImageGrid<T> {
    let (h, w, c) = (img.height, img.width, img.channels);
    let (out_h, out_w) = match op {
        AugmentOp::Rot90 | AugmentOp::Rot270 => (w, h),
        _ => (h, w),
    };
    let mut values = Vec::with_capacity(img.values.len());
    for r in 0..out_h {
        for col in 0..out_w {
            let (src_r, src_c) = match op {
                AugmentOp::FlipH => (r, w - 1 - col),
                AugmentOp::FlipV => (h - 1 - r, col),
                AugmentOp::Rot90 => (col, w - 1 - r),
                AugmentOp::Rot180 => (h - 1 - r, w - 1 - col),
                AugmentOp::Rot270 => (h - 1 - col, r),
            };
            for ch in 0..c {
                values.push(img.get(src_r, src_c, ch));
            }
        }
    }
    ImageGrid {
        height: out_h,
        width: out_w,
        channels: c,
        values,
    }
}

/// Reads a binary (P5) PGM file into a single-channel grid, scaling pixel
/// values by the declared maxval into [0,1].
pub fn load_pgm<T: Scalar>(path: impl AsRef<Path>) -> Result<ImageGrid<T>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::file_io(path, e))?;
    let mut reader = BufReader::new(file);

    let mut header = Vec::new();
    // Header tokens: magic, width, height, maxval — separated by whitespace,
    // with '#' comments running to end of line.
    while header.len() < 4 {
        let mut byte = [0u8; 1];
        if reader.read(&mut byte).map_err(|e| Error::file_io(path, e))? == 0 {
            return Err(Error::ParseError(format!(
                "{}: truncated PGM header",
                path.display()
            )));
        }
        match byte[0] {
            b'#' => {
                let mut comment = String::new();
                reader
                    .read_line(&mut comment)
                    .map_err(|e| Error::file_io(path, e))?;
            }
            b if b.is_ascii_whitespace() => {}
            b => {
                let mut token = vec![b];
                loop {
                    let mut next = [0u8; 1];
                    let n = reader.read(&mut next).map_err(|e| Error::file_io(path, e))?;
                    if n == 0 || next[0].is_ascii_whitespace() {
                        break;
                    }
                    token.push(next[0]);
                }
                header.push(String::from_utf8_lossy(&token).into_owned());
            }
        }
    }
    if header[0] != "P5" {
        return Err(Error::ParseError(format!(
            "{}: expected P5 magic, got {:?}",
            path.display(),
            header[0]
        )));
    }
    let parse_dim = |s: &str, what: &str| -> Result<usize> {
        s.parse::<usize>().map_err(|_| {
            Error::ParseError(format!("{}: bad PGM {what} {s:?}", path.display()))
        })
    };
    let width = parse_dim(&header[1], "width")?;
    let height = parse_dim(&header[2], "height")?;
    let maxval = parse_dim(&header[3], "maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::ParseError(format!(
            "{}: unsupported PGM maxval {maxval} (expected 1..=255)",
            path.display()
        )));
    }
    let mut raster = vec![0u8; width * height];
    reader
        .read_exact(&mut raster)
        .map_err(|e| Error::file_io(path, e))?;
    let scale = T::from_usize(maxval).expect("maxval fits scalar");
    let values = raster
        .into_iter()
        .map(|b| T::from_u8(b).expect("byte fits scalar") / scale)
        .collect();
    ImageGrid::new(height, width, 1, values)
}

/// Writes a single-channel grid as binary (P5) PGM with maxval 255; values
/// are rounded from [0,1] to bytes.
pub fn write_pgm<T: Scalar>(img: &ImageGrid<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if img.channels != 1 {
        return Err(Error::ShapeError(format!(
            "PGM output is single-channel, image has {}",
            img.channels
        )));
    }
    let mut out = Vec::with_capacity(img.values.len() + 32);
    write!(out, "P5\n{} {}\n255\n", img.width, img.height).expect("vec write");
    for v in &img.values {
        let byte = (v.as_f64() * 255.0).round().clamp(0.0, 255.0) as u8;
        out.push(byte);
    }
    std::fs::write(path, out).map_err(|e| Error::file_io(path, e))
}

/// Reads a flat CSV grid (rows of comma-separated values, one image row per
/// line) into a single-channel grid.
pub fn load_csv_grid<T: Scalar>(path: impl AsRef<Path>) -> Result<ImageGrid<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::file_io(path, e))?;
    let mut rows: Vec<Vec<T>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                cell.trim().parse::<f64>().map(T::from_f64_lossy).map_err(|_| {
                    Error::ParseError(format!(
                        "{}:{}: bad number {cell:?}",
                        path.display(),
                        lineno + 1
                    ))
                })
            })
            .collect::<Result<Vec<T>>>()?;
        rows.push(row);
    }
    let height = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::ParseError(format!(
            "{}: ragged CSV grid",
            path.display()
        )));
    }
    ImageGrid::new(height, width, 1, rows.into_iter().flatten().collect())
}
