//! Grayscale images as 2D discrete targets, plus a small PGM (P2/P5) codec.

use std::path::Path;

use super::TableTarget;
use crate::discrete::DiscreteTarget;
use crate::error::{Error, Result};

/// Substitute mass for zero-valued pixels.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Floor {
    /// `1e-6` times the brightest pixel.
    #[default]
    Relative,
    Absolute(f64),
}

/// Raw PGM raster.
#[derive(Clone, Debug, PartialEq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    /// Row-major pixel values.
    pub pixels: Vec<u16>,
}

/// Pixel value as unnormalized probability of its `(row, column)`.
#[derive(Clone, Debug)]
pub struct ImageTarget {
    height: usize,
    width: usize,
    floor: f64,
    table: TableTarget,
}

impl ImageTarget {
    pub fn from_pixels(height: usize, width: usize, raw: &[f64], floor: Floor) -> Result<Self> {
        if raw.len() != height * width {
            return Err(Error::Argument(format!(
                "{} pixels for a {height}x{width} image",
                raw.len()
            )));
        }
        let max = raw.iter().copied().fold(0.0, f64::max);
        let floor = match floor {
            Floor::Relative => 1e-6 * max,
            Floor::Absolute(v) if v >= 0.0 && v.is_finite() => v,
            Floor::Absolute(v) => return Err(Error::Argument(format!("floor must be non-negative, got {v}"))),
        };
        let masses = raw.iter().map(|&v| if v == 0.0 { floor } else { v }).collect();
        Ok(Self {
            height,
            width,
            floor,
            table: TableTarget::new(vec![height, width], masses)?,
        })
    }

    pub fn from_pgm(pgm: &Pgm, floor: Floor) -> Result<Self> {
        let raw: Vec<f64> = pgm.pixels.iter().map(|&p| p as f64).collect();
        Self::from_pixels(pgm.height, pgm.width, &raw, floor)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// Row-major pixel masses after the floor is applied.
    pub fn pixel_mass(&self) -> &[f64] {
        self.table.masses()
    }

    /// Mass of each row (sum over columns).
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.height).map(|r| self.table.axis_sum(1, &[r, 0])).collect()
    }

    /// Mass of each column (sum over rows).
    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.width).map(|c| self.table.axis_sum(0, &[0, c])).collect()
    }

    pub fn table(&self) -> &TableTarget {
        &self.table
    }
}

impl DiscreteTarget for ImageTarget {
    fn dims(&self) -> &[usize] {
        self.table.dims()
    }

    fn log_mass(&self, state: &[usize]) -> f64 {
        self.table.log_mass(state)
    }

    fn log_axis_sum(&self, axis: usize, state: &[usize]) -> f64 {
        self.table.log_axis_sum(axis, state)
    }

    fn conditional(&self, axis: usize, state: &[usize]) -> f64 {
        self.table.conditional(axis, state)
    }

    fn axis_conditionals(&self, axis: usize, state: &[usize], out: &mut [f64]) {
        self.table.axis_conditionals(axis, state, out)
    }
}

pub fn load_pgm(path: impl AsRef<Path>, floor: Floor) -> Result<ImageTarget> {
    let bytes = std::fs::read(path)?;
    ImageTarget::from_pgm(&parse_pgm(&bytes)?, floor)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.into(),
        }
    }

    /// Skips whitespace and `#` comments.
    fn skip_blank(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_blank();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                offset: start,
                message: format!("{what} out of range"),
            })
    }
}

pub fn parse_pgm(bytes: &[u8]) -> Result<Pgm> {
    let mut cur = Cursor { bytes, pos: 0 };
    let binary = match bytes.get(..2) {
        Some(b"P2") => false,
        Some(b"P5") => true,
        _ => return Err(cur.err("missing P2/P5 magic number")),
    };
    cur.pos = 2;
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(cur.err("image dimensions must be positive"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(cur.err(format!("maxval {maxval} outside 1..=65535")));
    }
    let n = width * height;
    let mut pixels = Vec::with_capacity(n);
    if binary {
        // exactly one whitespace byte separates the header from the raster
        if !cur.bytes.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
            return Err(cur.err("expected whitespace before raster"));
        }
        cur.pos += 1;
        let wide = maxval > 255;
        let need = n * if wide { 2 } else { 1 };
        let raster = &bytes[cur.pos..];
        if raster.len() < need {
            return Err(Error::Parse {
                offset: bytes.len(),
                message: format!("raster truncated: {} of {need} bytes", raster.len()),
            });
        }
        for k in 0..n {
            let v = if wide {
                u16::from_be_bytes([raster[2 * k], raster[2 * k + 1]])
            } else {
                raster[k] as u16
            };
            pixels.push(v);
        }
    } else {
        for k in 0..n {
            cur.skip_blank();
            if cur.pos >= bytes.len() {
                return Err(cur.err(format!("raster truncated after {k} of {n} pixels")));
            }
            let v = cur.number("pixel value")?;
            pixels.push(v as u16);
        }
    }
    if let Some(k) = pixels.iter().position(|&p| p as u32 > maxval) {
        return Err(Error::Parse {
            offset: cur.pos,
            message: format!("pixel {k} exceeds maxval {maxval}"),
        });
    }
    Ok(Pgm {
        width,
        height,
        maxval: maxval as u16,
        pixels,
    })
}

/// Encodes as P2 (ASCII) or P5 (binary).
pub fn encode_pgm(pgm: &Pgm, binary: bool) -> Vec<u8> {
    let mut out = format!(
        "{}\n{} {}\n{}\n",
        if binary { "P5" } else { "P2" },
        pgm.width,
        pgm.height,
        pgm.maxval
    )
    .into_bytes();
    if binary {
        for &p in &pgm.pixels {
            if pgm.maxval > 255 {
                out.extend_from_slice(&p.to_be_bytes());
            } else {
                out.push(p as u8);
            }
        }
    } else {
        for row in pgm.pixels.chunks(pgm.width) {
            let line: Vec<String> = row.iter().map(u16::to_string).collect();
            out.extend_from_slice(line.join(" ").as_bytes());
            out.push(b'\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIAG: &[u8] = b"P2\n# two by two\n2 2\n255\n0 255\n255 0\n";

    #[test]
    fn ascii_example() {
        let img = ImageTarget::from_pgm(&parse_pgm(DIAG).unwrap(), Floor::Absolute(0.0)).unwrap();
        assert_eq!(img.pixel_mass(), &[0.0, 255.0, 255.0, 0.0]);
        assert_eq!(img.row_sums(), vec![255.0, 255.0]);
        assert_eq!(img.col_sums(), vec![255.0, 255.0]);
    }

    #[test]
    fn default_floor() {
        let img = ImageTarget::from_pgm(&parse_pgm(DIAG).unwrap(), Floor::Relative).unwrap();
        assert!((img.pixel_mass()[0] - 2.55e-4).abs() < 1e-15);
        assert_eq!(img.pixel_mass()[1], 255.0);
    }

    #[test]
    fn binary_matches_ascii() {
        let ascii = parse_pgm(DIAG).unwrap();
        let binary = parse_pgm(&encode_pgm(&ascii, true)).unwrap();
        assert_eq!(ascii, binary);
        let a = ImageTarget::from_pgm(&ascii, Floor::Relative).unwrap();
        let b = ImageTarget::from_pgm(&binary, Floor::Relative).unwrap();
        assert_eq!(a.pixel_mass(), b.pixel_mass());
    }

    #[test]
    fn sixteen_bit_round_trip() {
        let pgm = Pgm {
            width: 3,
            height: 1,
            maxval: 65535,
            pixels: vec![0, 300, 65535],
        };
        assert_eq!(parse_pgm(&encode_pgm(&pgm, true)).unwrap(), pgm);
        assert_eq!(parse_pgm(&encode_pgm(&pgm, false)).unwrap(), pgm);
    }

    #[test]
    fn malformed_inputs_report_offsets() {
        let cases: &[&[u8]] = &[
            b"P3\n2 2\n255\n",
            b"P2\n2 x\n255\n",
            b"P2\n2 2\n255\n1 2 3",
            b"P5\n2 2\n255\n\x01\x02",
            b"P2\n2 2\n70000\n1 2 3 4",
            b"P2\n1 1\n10\n11",
        ];
        for case in cases {
            match parse_pgm(case) {
                Err(Error::Parse { offset, .. }) => assert!(offset <= case.len()),
                other => panic!("{:?} parsed as {other:?}", String::from_utf8_lossy(case)),
            }
        }
    }

    #[test]
    fn load_from_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.pgm");
        std::fs::write(&path, DIAG).unwrap();
        let img = load_pgm(&path, Floor::Relative).unwrap();
        assert_eq!((img.height(), img.width()), (2, 2));
        assert!(load_pgm(dir.path().join("missing.pgm"), Floor::Relative).is_err());
    }
}
