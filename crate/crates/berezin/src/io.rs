//! Import/export of field phase-space states as CSV or flat binary, with a
//! small self-describing header (geometry, point count, extent, mass).
//! These are the only untrusted-input decoders in the crate; both readers
//! accept arbitrary bytes and fail with [`Error::Parse`] on anything
//! malformed.

use crate::error::{Error, Result};
use crate::field::{FieldGrid, FieldState};
use std::io::{BufRead, Write};

const CSV_MAGIC: &str = "# berezin-field-v1";
const BIN_MAGIC: &[u8; 4] = b"BZF1";

/// A field state together with the grid it lives on and the mass parameter
/// of the model that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldArtifact {
    pub grid: FieldGrid,
    pub mass: f64,
    pub state: FieldState,
}

impl FieldArtifact {
    pub fn new(grid: FieldGrid, mass: f64, state: FieldState) -> Result<Self> {
        if state.points() != grid.points() {
            return Err(Error::GridMismatch(format!(
                "state has {} points per component, grid has {}",
                state.points(),
                grid.points()
            )));
        }
        Ok(Self { grid, mass, state })
    }

    fn columns(&self) -> Vec<(&'static str, &[f64])> {
        match &self.state {
            FieldState::Scalar { pi, phi } => vec![("pi", &pi[..]), ("phi", &phi[..])],
            FieldState::Vector { e, a } => vec![
                ("e1", &e[0][..]),
                ("e2", &e[1][..]),
                ("e3", &e[2][..]),
                ("a1", &a[0][..]),
                ("a2", &a[1][..]),
                ("a3", &a[2][..]),
            ],
        }
    }

    fn header_fields(&self) -> (u8, usize, usize, f64) {
        match &self.grid {
            FieldGrid::PeriodicTorus { dim, extent, n } => (0, *dim, *n, *extent),
            FieldGrid::HalfLine { extent, n } => (1, 1, *n, *extent),
        }
    }

    /// Serialize as CSV: a versioned header comment, a column-name row, then
    /// one row per grid point with full-precision floats.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        let (geom, dim, n, extent) = self.header_fields();
        let geometry = if geom == 0 { "torus" } else { "half-line" };
        writeln!(
            w,
            "{CSV_MAGIC} geometry={geometry} dim={dim} n={n} extent={extent:.17e} mass={:.17e}",
            self.mass
        )?;
        let cols = self.columns();
        let names: Vec<&str> = cols.iter().map(|(name, _)| *name).collect();
        writeln!(w, "{}", names.join(","))?;
        for row in 0..self.grid.points() {
            let cells: Vec<String> =
                cols.iter().map(|(_, data)| format!("{:.17e}", data[row])).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Parse the CSV layout produced by [`FieldArtifact::write_csv`].
    pub fn read_csv(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty input".into()))?
            .map_err(|e| Error::Parse(e.to_string()))?;
        let rest = header
            .strip_prefix(CSV_MAGIC)
            .ok_or_else(|| Error::Parse("missing field-state header".into()))?;
        let mut geometry = None;
        let mut dim = None;
        let mut n = None;
        let mut extent = None;
        let mut mass = None;
        for token in rest.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("malformed header token `{token}`")))?;
            match key {
                "geometry" => geometry = Some(value.to_string()),
                "dim" => dim = Some(parse_usize(value)?),
                "n" => n = Some(parse_usize(value)?),
                "extent" => extent = Some(parse_f64(value)?),
                "mass" => mass = Some(parse_f64(value)?),
                other => return Err(Error::Parse(format!("unknown header key `{other}`"))),
            }
        }
        let geometry = geometry.ok_or_else(|| Error::Parse("header missing geometry".into()))?;
        let dim = dim.ok_or_else(|| Error::Parse("header missing dim".into()))?;
        let n = n.ok_or_else(|| Error::Parse("header missing n".into()))?;
        let extent = extent.ok_or_else(|| Error::Parse("header missing extent".into()))?;
        let mass = mass.ok_or_else(|| Error::Parse("header missing mass".into()))?;
        let grid = build_grid(&geometry, dim, n, extent)?;

        let names = lines
            .next()
            .ok_or_else(|| Error::Parse("missing column row".into()))?
            .map_err(|e| Error::Parse(e.to_string()))?;
        let expected: &[&str] = match names.as_str() {
            "pi,phi" => &["pi", "phi"],
            "e1,e2,e3,a1,a2,a3" => &["e1", "e2", "e3", "a1", "a2", "a3"],
            other => return Err(Error::Parse(format!("unknown column layout `{other}`"))),
        };
        let mut data: Vec<Vec<f64>> = vec![Vec::with_capacity(grid.points()); expected.len()];
        for (row_index, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            if line.is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != expected.len() {
                return Err(Error::Parse(format!(
                    "row {row_index} has {} cells, expected {}",
                    cells.len(),
                    expected.len()
                )));
            }
            for (col, cell) in cells.iter().enumerate() {
                data[col].push(parse_f64(cell)?);
            }
        }
        assemble(grid, mass, data)
    }

    pub fn from_csv(s: &str) -> Result<Self> {
        Self::read_csv(s.as_bytes())
    }

    /// Serialize as flat binary: a 4-byte magic, geometry/kind tags, the
    /// header scalars, then little-endian f64 samples column by column.
    pub fn to_binary(&self) -> Vec<u8> {
        let (geom, dim, n, extent) = self.header_fields();
        let cols = self.columns();
        let mut out = Vec::with_capacity(38 + 8 * cols.len() * self.grid.points());
        out.extend_from_slice(BIN_MAGIC);
        out.push(geom);
        out.push(if cols.len() == 2 { 0 } else { 1 });
        out.extend_from_slice(&(dim as u16).to_le_bytes());
        out.extend_from_slice(&(n as u64).to_le_bytes());
        out.extend_from_slice(&extent.to_le_bytes());
        out.extend_from_slice(&self.mass.to_le_bytes());
        for (_, data) in cols {
            for v in data {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    /// Parse the binary layout produced by [`FieldArtifact::to_binary`].
    pub fn from_binary(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 38 {
            return Err(Error::Parse(format!("binary input of {} bytes is too short", bytes.len())));
        }
        if &bytes[..4] != BIN_MAGIC {
            return Err(Error::Parse("bad magic bytes".into()));
        }
        let geom = bytes[4];
        let kind = bytes[5];
        let dim = u16::from_le_bytes([bytes[6], bytes[7]]) as usize;
        let n = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
        let n = usize::try_from(n).map_err(|_| Error::Parse("point count overflows usize".into()))?;
        let extent = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
        let mass = f64::from_le_bytes(bytes[24..32].try_into().unwrap());
        if !extent.is_finite() || !mass.is_finite() {
            return Err(Error::Parse("non-finite header scalar".into()));
        }
        let geometry = match geom {
            0 => "torus",
            1 => "half-line",
            other => return Err(Error::Parse(format!("unknown geometry tag {other}"))),
        };
        // bound the declared size before allocating
        if n > 1 << 24 || dim > 3 {
            return Err(Error::Parse(format!("implausible grid declaration n={n} dim={dim}")));
        }
        let grid = build_grid(geometry, dim, n, extent)?;
        let ncols = match kind {
            0 => 2,
            1 => 6,
            other => return Err(Error::Parse(format!("unknown state kind {other}"))),
        };
        let body = &bytes[32..];
        let expected = 8usize
            .checked_mul(ncols)
            .and_then(|b| b.checked_mul(grid.points()))
            .ok_or_else(|| Error::Parse("sample count overflows".into()))?;
        if body.len() != expected {
            return Err(Error::Parse(format!(
                "body has {} bytes, header declares {expected}",
                body.len()
            )));
        }
        let mut data: Vec<Vec<f64>> = Vec::with_capacity(ncols);
        for col in 0..ncols {
            let start = col * 8 * grid.points();
            let column: Vec<f64> = body[start..start + 8 * grid.points()]
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect();
            data.push(column);
        }
        assemble(grid, mass, data)
    }
}

/// Parse a comma-separated `--hbars` list.  Values must be finite, lie in
/// `(0, 1]`, and be strictly decreasing.
pub fn parse_hbars(s: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for token in s.split(',') {
        let token = token.trim();
        if token.is_empty() {
            return Err(Error::Parse("empty hbar entry".into()));
        }
        let v = parse_f64(token)?;
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::InvalidConfig(format!("hbar {v} outside (0, 1]")));
        }
        if let Some(&last) = out.last() {
            if v >= last {
                return Err(Error::InvalidConfig(format!(
                    "hbar list must be strictly decreasing ({last} then {v})"
                )));
            }
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::Parse("empty hbar list".into()));
    }
    Ok(out)
}

fn parse_usize(s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse(format!("bad integer `{s}`")))
}

fn parse_f64(s: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| Error::Parse(format!("bad float `{s}`")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("non-finite value `{s}`")));
    }
    Ok(v)
}

fn build_grid(geometry: &str, dim: usize, n: usize, extent: f64) -> Result<FieldGrid> {
    let grid = match geometry {
        "torus" => FieldGrid::torus(dim, extent, n),
        "half-line" => {
            if dim != 1 {
                return Err(Error::Parse(format!("half-line geometry with dim={dim}")));
            }
            FieldGrid::half_line(extent, n)
        }
        other => return Err(Error::Parse(format!("unknown geometry `{other}`"))),
    };
    grid.map_err(|e| Error::Parse(e.to_string()))
}

fn assemble(grid: FieldGrid, mass: f64, mut data: Vec<Vec<f64>>) -> Result<FieldArtifact> {
    for col in &data {
        if col.len() != grid.points() {
            return Err(Error::Parse(format!(
                "column has {} samples, grid declares {}",
                col.len(),
                grid.points()
            )));
        }
        if col.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse("non-finite sample value".into()));
        }
    }
    let state = if data.len() == 2 {
        let phi = data.pop().unwrap();
        let pi = data.pop().unwrap();
        FieldState::scalar(pi, phi)
    } else {
        let a3 = data.pop().unwrap();
        let a2 = data.pop().unwrap();
        let a1 = data.pop().unwrap();
        let e3 = data.pop().unwrap();
        let e2 = data.pop().unwrap();
        let e1 = data.pop().unwrap();
        FieldState::vector([e1, e2, e3], [a1, a2, a3])
    }
    .map_err(|e| Error::Parse(e.to_string()))?;
    FieldArtifact::new(grid, mass, state).map_err(|e| Error::Parse(e.to_string()))
}
