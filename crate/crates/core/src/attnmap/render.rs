//! Heatmap artifacts: a binary PPM image and a CSV of the matrix.
//!
//! Layers run down the image (layer 1 on top), heads run across. Colors
//! scale linearly from the matrix minimum (lightest) to its maximum
//! (darkest blue); both bounds are written into the PPM header comment.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use ndarray::Array2;

use super::{AttnError, ConceptHeatmap};

pub const LIGHTEST: [u8; 3] = [247, 251, 255];
pub const DARKEST: [u8; 3] = [8, 48, 107];
pub const DEFAULT_CELL_PX: usize = 8;

fn value_range(values: &Array2<f64>) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Cell color for `v` on a linear scale from `lo` to `hi`.
pub fn cell_color(v: f64, lo: f64, hi: f64) -> [u8; 3] {
    let t = if hi > lo { ((v - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.0 };
    let mut rgb = [0u8; 3];
    for (c, (a, b)) in rgb.iter_mut().zip(LIGHTEST.iter().zip(DARKEST)) {
        *c = (f64::from(*a) + t * (f64::from(b) - f64::from(*a))).round() as u8;
    }
    rgb
}

/// Binary PPM (P6) of the matrix, `cell_px` pixels per cell.
pub fn heatmap_ppm(values: &Array2<f64>, cell_px: usize) -> Vec<u8> {
    let (rows, cols) = values.dim();
    let (lo, hi) = if values.is_empty() { (0.0, 0.0) } else { value_range(values) };
    let (width, height) = (cols * cell_px, rows * cell_px);
    let mut out = format!("P6\n# layers={rows} heads={cols} min={lo} max={hi}\n{width} {height}\n255\n").into_bytes();
    out.reserve(width * height * 3);
    for r in 0..rows {
        let row_colors: Vec<[u8; 3]> = (0..cols).map(|c| cell_color(values[[r, c]], lo, hi)).collect();
        for _ in 0..cell_px {
            for rgb in &row_colors {
                for _ in 0..cell_px {
                    out.extend_from_slice(rgb);
                }
            }
        }
    }
    out
}

/// CSV with a `layer,head_1..head_H` header and 1-based layer labels.
pub fn heatmap_csv(values: &Array2<f64>) -> Result<Vec<u8>, AttnError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["layer".to_owned()];
    header.extend((1..=values.ncols()).map(|h| format!("head_{h}")));
    w.write_record(&header)?;
    for (l, row) in values.rows().into_iter().enumerate() {
        let mut rec = vec![(l + 1).to_string()];
        rec.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.into_inner().map_err(|e| AttnError::Io(e.into_error()))
}

pub fn parse_heatmap_csv(reader: impl Read) -> Result<Array2<f64>, AttnError> {
    let mut r = csv::Reader::from_reader(reader);
    let heads = r.headers()?.len().saturating_sub(1);
    let mut flat = Vec::new();
    let mut rows = 0;
    for rec in r.records() {
        let rec = rec?;
        for field in rec.iter().skip(1) {
            flat.push(field.parse::<f64>().map_err(|e| AttnError::Shape(format!("bad CSV value `{field}`: {e}")))?);
        }
        rows += 1;
    }
    Array2::from_shape_vec((rows, heads), flat).map_err(|e| AttnError::Shape(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedPaths {
    pub image: PathBuf,
    pub csv: PathBuf,
}

/// Writes `<prefix>.ppm` and `<prefix>.csv`.
pub fn render_heatmap(c: &ConceptHeatmap, prefix: impl AsRef<Path>) -> Result<RenderedPaths, AttnError> {
    let prefix = prefix.as_ref();
    let prefix = match prefix.extension().and_then(|e| e.to_str()) {
        Some("ppm" | "csv") => prefix.with_extension(""),
        _ => prefix.to_path_buf(),
    };
    let with_ext = |ext: &str| {
        let mut s = prefix.clone().into_os_string();
        s.push(".");
        s.push(ext);
        PathBuf::from(s)
    };
    let paths = RenderedPaths { image: with_ext("ppm"), csv: with_ext("csv") };
    fs::write(&paths.image, heatmap_ppm(&c.values, DEFAULT_CELL_PX))?;
    fs::write(&paths.csv, heatmap_csv(&c.values)?)?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn pixels(ppm: &[u8]) -> &[u8] {
        // skip the four header lines
        let mut newlines = 0;
        let start = ppm
            .iter()
            .position(|&b| {
                if b == b'\n' {
                    newlines += 1;
                }
                newlines == 4
            })
            .unwrap();
        &ppm[start + 1..]
    }

    #[test]
    fn all_zero_is_uniformly_lightest() {
        let m = Array2::<f64>::zeros((3, 4));
        let ppm = heatmap_ppm(&m, 2);
        let px = pixels(&ppm);
        assert_eq!(px.len(), 3 * 2 * 4 * 2 * 3);
        assert!(px.chunks(3).all(|c| c == LIGHTEST));
    }

    #[test]
    fn single_max_cell_is_the_only_darkest() {
        let mut m = Array2::<f64>::zeros((3, 4));
        m[[1, 2]] = 0.8;
        let ppm = heatmap_ppm(&m, 1);
        let px: Vec<&[u8]> = pixels(&ppm).chunks(3).collect();
        let dark: Vec<usize> = (0..px.len()).filter(|&i| px[i] == DARKEST).collect();
        // row-major pixels, one per cell: layer 2 (row 1), head 3 (col 2)
        assert_eq!(dark, vec![4 + 2]);
        assert!(String::from_utf8_lossy(&ppm).contains("min=0 max=0.8"));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let m = array![[0.1, 1.0 / 3.0], [2.0e-9, 0.987_654_321_012_345_6]];
        let csv = heatmap_csv(&m).unwrap();
        assert!(String::from_utf8_lossy(&csv).starts_with("layer,head_1,head_2\n1,"));
        assert_eq!(parse_heatmap_csv(&csv[..]).unwrap(), m);
    }

    #[test]
    fn unwritable_path_is_an_error() {
        let c = ConceptHeatmap { values: array![[0.5]], n_pairs: 1, relation: "r".into(), lang: "ne".into() };
        assert!(render_heatmap(&c, "/nonexistent-dir/x").is_err());
    }
}
