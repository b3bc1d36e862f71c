//! Projection of attributions back onto an image grid, rendered as a signed
//! CSV grid, a magnitude PGM, and a sign mask.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use crate::dataset::{write_pgm, ImageGrid};
use crate::error::{Error, Result};
use crate::fmt::g8;
use crate::scalar::Scalar;
use crate::shap::validate_partition;

/// Broadcasts per-feature attributions onto a `height`×`width` pixel grid,
/// returned row-major. With no grouping each attribution is one pixel; with
/// a grouping every pixel inherits the attribution of the group containing
/// it, so the grouping must partition the pixels.
pub fn heatmap_grid<T: Scalar>(
    phi: &[T],
    grouping: Option<&[Vec<usize>]>,
    height: usize,
    width: usize,
) -> Result<Vec<T>> {
    if height == 0 || width == 0 {
        return Err(Error::ShapeError(format!(
            "heatmap dimensions must be positive, got {height}x{width}"
        )));
    }
    let pixels = height * width;
    match grouping {
        None => {
            if phi.len() != pixels {
                return Err(Error::ShapeError(format!(
                    "{} attributions cannot fill a {height}x{width} grid",
                    phi.len()
                )));
            }
            Ok(phi.to_vec())
        }
        Some(groups) => {
            if phi.len() != groups.len() {
                return Err(Error::ShapeError(format!(
                    "{} attributions for {} feature groups",
                    phi.len(),
                    groups.len()
                )));
            }
            validate_partition(groups, pixels)?;
            let mut grid = vec![T::zero(); pixels];
            for (g, members) in groups.iter().enumerate() {
                for &p in members {
                    grid[p] = phi[g];
                }
            }
            Ok(grid)
        }
    }
}

/// Renders attributions as three sibling files named after `stem`:
///
/// * `{stem}.csv` — the signed grid, comma-separated with 8 significant
///   digits, one image row per line;
/// * `{stem}.pgm` — binary P5 of attribution magnitudes, scaled so the
///   largest magnitude is white (all black when every attribution is zero);
/// * `{stem}_sign.csv` — the sign of each pixel as −1, 0, or 1.
pub fn render_heatmap<T: Scalar>(
    phi: &[T],
    grouping: Option<&[Vec<usize>]>,
    height: usize,
    width: usize,
    stem: impl AsRef<Path>,
) -> Result<()> {
    let stem = stem.as_ref();
    let grid = heatmap_grid(phi, grouping, height, width)?;

    let mut csv = String::new();
    for r in 0..height {
        let cells: Vec<String> = (0..width)
            .map(|c| g8(grid[r * width + c].as_f64()))
            .collect();
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    let csv_path = sibling(stem, ".csv")?;
    std::fs::write(&csv_path, csv).map_err(|e| Error::file_io(&csv_path, e))?;

    let max_abs = grid.iter().fold(0.0f64, |m, v| m.max(v.as_f64().abs()));
    let magnitudes: Vec<T> = if max_abs == 0.0 {
        vec![T::zero(); grid.len()]
    } else {
        grid.iter()
            .map(|v| T::from_f64_lossy(v.as_f64().abs() / max_abs))
            .collect()
    };
    write_pgm(
        &ImageGrid::new(height, width, 1, magnitudes)?,
        sibling(stem, ".pgm")?,
    )?;

    let mut sign = String::new();
    for r in 0..height {
        let cells: Vec<&str> = (0..width)
            .map(|c| {
                let v = grid[r * width + c];
                if v > T::zero() {
                    "1"
                } else if v < T::zero() {
                    "-1"
                } else {
                    "0"
                }
            })
            .collect();
        sign.push_str(&cells.join(","));
        sign.push('\n');
    }
    let sign_path = sibling(stem, "_sign.csv")?;
    std::fs::write(&sign_path, sign).map_err(|e| Error::file_io(&sign_path, e))
}

/// Partitions a `height`×`width` pixel grid into `tile_h`×`tile_w` tiles,
/// row-major over tiles and row-major within each tile, for explaining
/// images patch-by-patch. Tile dimensions must divide the grid evenly.
pub fn tile_grouping(
    height: usize,
    width: usize,
    tile_h: usize,
    tile_w: usize,
) -> Result<Vec<Vec<usize>>> {
    if height == 0 || width == 0 || tile_h == 0 || tile_w == 0 {
        return Err(Error::InvalidSpec(format!(
            "tiling dimensions must be positive, got {height}x{width} in {tile_h}x{tile_w} tiles"
        )));
    }
    if height % tile_h != 0 || width % tile_w != 0 {
        return Err(Error::InvalidSpec(format!(
            "{tile_h}x{tile_w} tiles do not evenly divide a {height}x{width} grid"
        )));
    }
    let mut groups = Vec::with_capacity((height / tile_h) * (width / tile_w));
    for tr in 0..height / tile_h {
        for tc in 0..width / tile_w {
            let mut members = Vec::with_capacity(tile_h * tile_w);
            for r in 0..tile_h {
                for c in 0..tile_w {
                    members.push((tr * tile_h + r) * width + tc * tile_w + c);
                }
            }
            groups.push(members);
        }
    }
    Ok(groups)
}

/// `stem` with `suffix` appended to its file name.
fn sibling(stem: &Path, suffix: &str) -> Result<PathBuf> {
    let name = stem.file_name().ok_or_else(|| {
        Error::InvalidSpec(format!("output stem {} has no file name", stem.display()))
    })?;
    let mut name = OsString::from(name);
    name.push(suffix);
    Ok(stem.with_file_name(name))
}
