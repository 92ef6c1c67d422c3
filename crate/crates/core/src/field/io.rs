//! Binary (`FGRD`) and CSV encodings of [`FieldGrid`].
//!
//! Binary layout, all little-endian:
//!
//! | bytes      | content                                       |
//! |------------|-----------------------------------------------|
//! | 4          | magic `FGRD`                                  |
//! | 2          | version (`u16`)                               |
//! | 3 × 8      | `nx, ny, nz` (`u64`)                          |
//! | 3 × 8      | `dx, dy, dz` (`f64`, m)                       |
//! | 3 × 8      | origin (`f64`, m)                             |
//! | 8 + 8      | wavelength (m), reference index (`f64`)       |
//! | N × 8      | permittivity, x-fastest                       |
//! | N × 6 × 8  | `Ex_re, Ex_im, Ey_re, Ey_im, Ez_re, Ez_im`    |
//!
//! CSV files carry the wavelength, reference index and spacing in leading
//! `# key=value` comment lines, followed by the header row and one row per
//! voxel in x-fastest order.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use super::grid::{FieldGrid, GridGeometry};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"FGRD";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 3 * 8 + 3 * 8 + 3 * 8 + 16;
const CSV_HEADER: &str = "x,y,z,eps,Ex_re,Ex_im,Ey_re,Ey_im,Ez_re,Ez_im";

/// Dispatches on extension: `.csv` is CSV, anything else binary.
pub fn load_grid(path: impl AsRef<Path>) -> Result<FieldGrid> {
    let path = path.as_ref();
    if is_csv(path) {
        load_grid_csv(path)
    } else {
        load_grid_binary(path)
    }
}

pub fn save_grid(grid: &FieldGrid, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if is_csv(path) {
        save_grid_csv(grid, path)
    } else {
        save_grid_binary(grid, path)
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

pub fn save_grid_binary(grid: &FieldGrid, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_binary(grid)).map_err(|e| Error::io(path, e))
}

pub fn load_grid_binary(path: impl AsRef<Path>) -> Result<FieldGrid> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_binary(&bytes, path)
}

pub(crate) fn encode_binary(grid: &FieldGrid) -> Vec<u8> {
    let g = grid.geometry();
    let n = g.len();
    let mut out = Vec::with_capacity(HEADER_LEN + 7 * 8 * n);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for d in g.dims {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    let tail = [grid.wavelength(), grid.n_ref()];
    for x in g.spacing.iter().chain(&g.origin).chain(&tail) {
        out.extend_from_slice(&x.to_le_bytes());
    }
    for e in grid.eps() {
        out.extend_from_slice(&e.to_le_bytes());
    }
    for f in grid.efield() {
        for c in f {
            out.extend_from_slice(&c.re.to_le_bytes());
            out.extend_from_slice(&c.im.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> [u8; N] {
        let chunk: [u8; N] = self.bytes[self.pos..self.pos + N].try_into().unwrap();
        self.pos += N;
        chunk
    }

    fn f64(&mut self) -> f64 {
        f64::from_le_bytes(self.take())
    }

    fn u64(&mut self) -> u64 {
        u64::from_le_bytes(self.take())
    }
}

pub(crate) fn decode_binary(bytes: &[u8], path: &Path) -> Result<FieldGrid> {
    let format = |reason: String| Error::Format {
        path: path.to_path_buf(),
        reason,
    };
    if bytes.len() < HEADER_LEN {
        return Err(Error::Truncated {
            path: path.to_path_buf(),
            expected: HEADER_LEN as u64,
            found: bytes.len() as u64,
        });
    }
    if &bytes[..4] != MAGIC {
        return Err(format(format!("bad magic {:?}", &bytes[..4])));
    }
    let mut r = Reader { bytes, pos: 4 };
    let version = u16::from_le_bytes(r.take());
    if version != VERSION {
        return Err(format(format!("unsupported version {version}")));
    }
    let raw_dims = [r.u64(), r.u64(), r.u64()];
    let n = raw_dims
        .iter()
        .try_fold(1u64, |acc, &d| acc.checked_mul(d))
        .filter(|&n| n > 0)
        .ok_or_else(|| format(format!("invalid dimensions {raw_dims:?}")))?;
    let expected = n
        .checked_mul(7 * 8)
        .and_then(|p| p.checked_add(HEADER_LEN as u64))
        .ok_or_else(|| format(format!("dimensions {raw_dims:?} overflow")))?;
    let found = bytes.len() as u64;
    if found < expected {
        return Err(Error::Truncated {
            path: path.to_path_buf(),
            expected,
            found,
        });
    }
    if found > expected {
        return Err(format(format!(
            "{} trailing bytes after payload (expected {expected} bytes)",
            found - expected
        )));
    }
    let n = n as usize;
    let dims = raw_dims.map(|d| d as usize);
    let spacing = [r.f64(), r.f64(), r.f64()];
    let origin = [r.f64(), r.f64(), r.f64()];
    let wavelength = r.f64();
    let n_ref = r.f64();
    let eps: Vec<f64> = (0..n).map(|_| r.f64()).collect();
    let efield: Vec<[Complex64; 3]> = (0..n)
        .map(|_| [(); 3].map(|_| Complex64::new(r.f64(), r.f64())))
        .collect();
    let header_ok = spacing
        .iter()
        .chain(&origin)
        .chain([wavelength, n_ref].iter())
        .all(|x| x.is_finite());
    if !header_ok {
        return Err(format("non-finite header value".into()));
    }
    let geometry = GridGeometry {
        dims,
        spacing,
        origin,
    };
    FieldGrid::new(geometry, wavelength, n_ref, eps, efield).map_err(|e| format(e.to_string()))
}

pub fn save_grid_csv(grid: &FieldGrid, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_csv(grid)).map_err(|e| Error::io(path, e))
}

pub fn load_grid_csv(path: impl AsRef<Path>) -> Result<FieldGrid> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    decode_csv(&text, path)
}

pub(crate) fn encode_csv(grid: &FieldGrid) -> String {
    let g = grid.geometry();
    let mut s = String::new();
    // `{:?}` on f64 prints the shortest representation that round-trips.
    writeln!(s, "# wavelength_m={:?}", grid.wavelength()).unwrap();
    writeln!(s, "# n_ref={:?}", grid.n_ref()).unwrap();
    writeln!(
        s,
        "# spacing_m={:?},{:?},{:?}",
        g.spacing[0], g.spacing[1], g.spacing[2]
    )
    .unwrap();
    s.push_str(CSV_HEADER);
    s.push('\n');
    for (idx, (eps, f)) in grid.eps().iter().zip(grid.efield()).enumerate() {
        let [x, y, z] = g.position(g.coords(idx));
        write!(s, "{x:?},{y:?},{z:?},{eps:?}").unwrap();
        for c in f {
            write!(s, ",{:?},{:?}", c.re, c.im).unwrap();
        }
        s.push('\n');
    }
    s
}

pub(crate) fn decode_csv(text: &str, path: &Path) -> Result<FieldGrid> {
    let format = |reason: String| Error::Format {
        path: path.to_path_buf(),
        reason,
    };
    let mut wavelength = None;
    let mut n_ref = None;
    let mut spacing = None;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let header = loop {
        let Some((_, line)) = lines.next() else {
            return Err(format("missing header row".into()));
        };
        let Some(meta) = line.trim().strip_prefix('#') else {
            break line.trim();
        };
        let Some((key, value)) = meta.split_once('=') else {
            continue;
        };
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| format(format!("metadata {}: {e}", key.trim())))
        };
        match key.trim() {
            "wavelength_m" => wavelength = Some(parse(value)?),
            "n_ref" => n_ref = Some(parse(value)?),
            "spacing_m" => {
                let parts: Vec<&str> = value.split(',').collect();
                if parts.len() != 3 {
                    return Err(format("spacing_m needs three values".into()));
                }
                spacing = Some([parse(parts[0])?, parse(parts[1])?, parse(parts[2])?]);
            }
            _ => {}
        }
    };
    let normalized: String = header.chars().filter(|c| !c.is_whitespace()).collect();
    if normalized != CSV_HEADER {
        return Err(format(format!(
            "header must be `{CSV_HEADER}`, got `{header}`"
        )));
    }
    let wavelength = wavelength.ok_or_else(|| format("missing `# wavelength_m=` line".into()))?;
    let n_ref = n_ref.ok_or_else(|| format("missing `# n_ref=` line".into()))?;

    let mut rows: Vec<[f64; 10]> = Vec::new();
    for (lineno, line) in lines {
        let mut row = [0.0f64; 10];
        let mut count = 0;
        for (slot, field) in line.split(',').enumerate() {
            if slot >= 10 {
                count = 11;
                break;
            }
            row[slot] = field
                .trim()
                .parse()
                .map_err(|e| format(format!("line {}: {e}", lineno + 1)))?;
            count += 1;
        }
        if count != 10 {
            return Err(format(format!("line {}: expected 10 columns", lineno + 1)));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(format(format!("line {}: non-finite value", lineno + 1)));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(format("no voxel rows".into()));
    }

    let axis_values = |a: usize| {
        let mut v: Vec<f64> = rows.iter().map(|r| r[a]).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let axes = [axis_values(0), axis_values(1), axis_values(2)];
    let dims = [axes[0].len(), axes[1].len(), axes[2].len()];
    let n: usize = dims.iter().product();
    if n != rows.len() {
        return Err(format(format!(
            "{} rows do not form a full {}x{}x{} grid",
            rows.len(),
            dims[0],
            dims[1],
            dims[2]
        )));
    }
    let spacing = match spacing {
        Some(s) => s,
        None => {
            let mut s = [0.0; 3];
            for a in 0..3 {
                if dims[a] < 2 {
                    return Err(format(format!(
                        "axis {a} has one voxel; add a `# spacing_m=dx,dy,dz` line"
                    )));
                }
                s[a] = (axes[a][dims[a] - 1] - axes[a][0]) / (dims[a] - 1) as f64;
            }
            s
        }
    };
    let origin = [axes[0][0], axes[1][0], axes[2][0]];
    let geometry = GridGeometry {
        dims,
        spacing,
        origin,
    };
    geometry.validate().map_err(|e| format(e.to_string()))?;
    for (idx, row) in rows.iter().enumerate() {
        let expect = geometry.position(geometry.coords(idx));
        for a in 0..3 {
            if (row[a] - expect[a]).abs() > 1e-6 * spacing[a] {
                return Err(format(format!(
                    "row {}: coordinates {:?} break x-fastest ordering on a uniform grid",
                    idx + 1,
                    &row[..3]
                )));
            }
        }
    }
    let eps = rows.iter().map(|r| r[3]).collect();
    let efield = rows
        .iter()
        .map(|r| {
            [
                Complex64::new(r[4], r[5]),
                Complex64::new(r[6], r[7]),
                Complex64::new(r[8], r[9]),
            ]
        })
        .collect();
    FieldGrid::new(geometry, wavelength, n_ref, eps, efield).map_err(|e| format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_grid(seed: u64) -> FieldGrid {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let geometry = GridGeometry {
            dims: [4, 4, 4],
            spacing: [1.3e-8, 2.1e-8, 0.7e-8],
            origin: [-3.0e-8, 1.0e-9, -2.2e-8],
        };
        let n = geometry.len();
        let eps = (0..n)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    1.0
                } else {
                    rng.gen_range(1.0..12.0)
                }
            })
            .collect();
        let efield = (0..n)
            .map(|_| {
                [(); 3].map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            })
            .collect();
        FieldGrid::new(geometry, 737e-9, 2.4, eps, efield).unwrap()
    }

    #[test]
    fn binary_round_trip_is_bit_exact() {
        let grid = random_grid(1);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.fgrd");
        save_grid(&grid, &path).unwrap();
        let back = load_grid(&path).unwrap();
        assert_eq!(back, grid);
        assert_eq!(encode_binary(&back), fs::read(&path).unwrap());
    }

    #[test]
    fn truncated_payload_reports_byte_counts() {
        let grid = random_grid(2);
        let bytes = encode_binary(&grid);
        let cut = &bytes[..bytes.len() - 5];
        match decode_binary(cut, Path::new("x.fgrd")) {
            Err(Error::Truncated {
                expected, found, ..
            }) => {
                assert_eq!(expected, bytes.len() as u64);
                assert_eq!(found, bytes.len() as u64 - 5);
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn bad_magic_and_version() {
        let mut bytes = encode_binary(&random_grid(3));
        bytes[0] = b'X';
        assert!(matches!(
            decode_binary(&bytes, Path::new("a")),
            Err(Error::Format { .. })
        ));
        let mut bytes = encode_binary(&random_grid(3));
        bytes[4] = 9;
        assert!(matches!(
            decode_binary(&bytes, Path::new("a")),
            Err(Error::Format { .. })
        ));
    }

    #[test]
    fn non_finite_payload_rejected() {
        let mut bytes = encode_binary(&random_grid(4));
        let at = HEADER_LEN + 8 * 3;
        bytes[at..at + 8].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(
            decode_binary(&bytes, Path::new("a")),
            Err(Error::Format { .. })
        ));
    }

    #[test]
    fn csv_matches_binary() {
        let grid = random_grid(5);
        let text = encode_csv(&grid);
        let back = decode_csv(&text, Path::new("g.csv")).unwrap();
        assert_eq!(back.geometry().dims, grid.geometry().dims);
        for a in 0..3 {
            assert!((back.geometry().origin[a] - grid.geometry().origin[a]).abs() <= 1e-12);
            assert!((back.geometry().spacing[a] - grid.geometry().spacing[a]).abs() <= 1e-12);
        }
        for (x, y) in back.eps().iter().zip(grid.eps()) {
            assert!((x - y).abs() <= 1e-12);
        }
        for (x, y) in back.efield().iter().zip(grid.efield()) {
            for c in 0..3 {
                assert!((x[c] - y[c]).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn csv_rejects_shuffled_rows() {
        let text = encode_csv(&random_grid(6));
        let mut lines: Vec<&str> = text.lines().collect();
        lines.swap(5, 6);
        let err = decode_csv(&lines.join("\n"), Path::new("g.csv"));
        assert!(matches!(err, Err(Error::Format { .. })));
    }

    #[test]
    fn csv_rejects_wrong_header() {
        let text = encode_csv(&random_grid(7)).replace("Ex_re", "Ex");
        assert!(decode_csv(&text, Path::new("g.csv")).is_err());
    }
}
