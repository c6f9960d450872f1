//! Field dump format.
//!
//! A dump is a UTF-8 header of `key: value` lines terminated by a blank
//! line, followed by raw little-endian 64-bit floats in x-fastest order.
//! The payload is written bit-exactly; header floats use shortest
//! round-trip formatting.

use std::io::{Read, Write};



use crate::error::DumpError;
use crate::field::{GridField, GridSpec};
use crate::num::Real;

const FORMAT_TAG: &str = "navier-series-field-v1";

/// Parsed dump file.
#[derive(Clone, Debug)]
pub struct FieldDump {
    pub name: String,
    pub order: Option<usize>,
    pub domain: DumpDomain,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DumpDomain {
    Torus {
        nx: usize,
        ny: usize,
        nz: usize,
        lx: f64,
        ly: f64,
        lz: f64,
    },
    FreeSpace {
        n: usize,
        half_width: f64,
    },
}

impl DumpDomain {
    pub fn len(&self) -> usize {
        match self {
            DumpDomain::Torus { nx, ny, nz, .. } => nx * ny * nz,
            DumpDomain::FreeSpace { n, .. } => n * n * n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn write_payload<W: Write>(w: &mut W, values: &[f64]) -> std::io::Result<()> {
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Write a torus field dump.
pub fn write_grid_field<S: Real, W: Write>(
    w: &mut W,
    field: &GridField<S>,
    name: &str,
    order: Option<usize>,
) -> std::io::Result<()> {
    let [nx, ny, nz] = field.spec().dims();
    let [lx, ly, lz] = field.spec().lengths();
    writeln!(w, "format: {FORMAT_TAG}")?;
    writeln!(w, "name: {name}")?;
    if let Some(n) = order {
        writeln!(w, "order: {n}")?;
    }
    writeln!(w, "domain: torus")?;
    writeln!(w, "nx: {nx}")?;
    writeln!(w, "ny: {ny}")?;
    writeln!(w, "nz: {nz}")?;
    writeln!(w, "lx: {}", lx.to_f64().unwrap())?;
    writeln!(w, "ly: {}", ly.to_f64().unwrap())?;
    writeln!(w, "lz: {}", lz.to_f64().unwrap())?;
    writeln!(w)?;
    let values: Vec<f64> = field.values().iter().map(|v| v.to_f64().unwrap()).collect();
    write_payload(w, &values)
}

/// Write a free-space field dump (cube `[-R, R]^3`, `n` cells per axis).
pub fn write_free_space<W: Write>(
    w: &mut W,
    values: &[f64],
    n: usize,
    half_width: f64,
    name: &str,
    order: Option<usize>,
) -> std::io::Result<()> {
    assert_eq!(values.len(), n * n * n);
    writeln!(w, "format: {FORMAT_TAG}")?;
    writeln!(w, "name: {name}")?;
    if let Some(ord) = order {
        writeln!(w, "order: {ord}")?;
    }
    writeln!(w, "domain: free-space")?;
    writeln!(w, "n: {n}")?;
    writeln!(w, "half_width: {half_width}")?;
    writeln!(w)?;
    write_payload(w, values)
}

/// Read any dump written by this module.
pub fn read_dump<R: Read>(r: &mut R) -> Result<FieldDump, DumpError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let sep = bytes
        .windows(2)
        .position(|w| w == b"\n\n")
        .ok_or_else(|| DumpError::Malformed("missing blank line after header".into()))?;
    let header = std::str::from_utf8(&bytes[..sep])
        .map_err(|e| DumpError::Malformed(format!("header is not UTF-8: {e}")))?;
    let payload = &bytes[sep + 2..];

    let mut kv = std::collections::BTreeMap::new();
    for line in header.lines() {
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| DumpError::Malformed(format!("bad header line: {line:?}")))?;
        kv.insert(key.trim().to_string(), value.trim().to_string());
    }

    let get = |key: &str| -> Result<&String, DumpError> {
        kv.get(key)
            .ok_or_else(|| DumpError::Malformed(format!("missing header key {key:?}")))
    };
    if get("format")? != FORMAT_TAG {
        return Err(DumpError::Malformed(format!(
            "unknown format tag {:?}",
            get("format")?
        )));
    }
    let name = get("name")?.clone();
    let order = match kv.get("order") {
        Some(v) => Some(
            v.parse::<usize>()
                .map_err(|e| DumpError::Malformed(format!("bad order: {e}")))?,
        ),
        None => None,
    };
    let parse_usize = |key: &str| -> Result<usize, DumpError> {
        get(key)?
            .parse()
            .map_err(|e| DumpError::Malformed(format!("bad {key}: {e}")))
    };
    let parse_f64 = |key: &str| -> Result<f64, DumpError> {
        get(key)?
            .parse()
            .map_err(|e| DumpError::Malformed(format!("bad {key}: {e}")))
    };
    let domain = match get("domain")?.as_str() {
        "torus" => DumpDomain::Torus {
            nx: parse_usize("nx")?,
            ny: parse_usize("ny")?,
            nz: parse_usize("nz")?,
            lx: parse_f64("lx")?,
            ly: parse_f64("ly")?,
            lz: parse_f64("lz")?,
        },
        "free-space" => DumpDomain::FreeSpace {
            n: parse_usize("n")?,
            half_width: parse_f64("half_width")?,
        },
        other => {
            return Err(DumpError::Malformed(format!("unknown domain {other:?}")));
        }
    };
    let expected = domain.len();
    if payload.len() != expected * 8 {
        return Err(DumpError::Malformed(format!(
            "payload holds {} bytes, expected {}",
            payload.len(),
            expected * 8
        )));
    }
    let values = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(FieldDump {
        name,
        order,
        domain,
        values,
    })
}

impl FieldDump {
    /// Reconstruct a torus field; fails for free-space dumps.
    pub fn to_grid_field(&self) -> Result<GridField<f64>, DumpError> {
        match self.domain {
            DumpDomain::Torus {
                nx,
                ny,
                nz,
                lx,
                ly,
                lz,
            } => {
                let spec = GridSpec::new(
                    nx,
                    ny,
                    nz,
                    lx,
                    ly,
                    lz,
                    crate::field::DealiasRule::TwoThirds,
                )
                .map_err(|e| DumpError::Malformed(e.to_string()))?;
                GridField::from_values(spec, self.values.clone())
                    .map_err(|e| DumpError::Malformed(e.to_string()))
            }
            DumpDomain::FreeSpace { .. } => Err(DumpError::Malformed(
                "free-space dump cannot become a torus field".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::DealiasRule;

    #[test]
    fn grid_dump_roundtrip_bit_exact() {
        let spec = GridSpec::<f64>::cubic(8, DealiasRule::TwoThirds).unwrap();
        let field = GridField::from_fn(spec, |x, y, z| (x + 0.5 * y).sin() * z.cos() + 1.0 / 3.0);
        let mut buf = Vec::new();
        write_grid_field(&mut buf, &field, "u", Some(3)).unwrap();
        let dump = read_dump(&mut buf.as_slice()).unwrap();
        assert_eq!(dump.name, "u");
        assert_eq!(dump.order, Some(3));
        let back = dump.to_grid_field().unwrap();
        assert_eq!(back.values(), field.values());
    }

    #[test]
    fn free_space_dump_roundtrip() {
        let n = 4;
        let values: Vec<f64> = (0..n * n * n).map(|i| (i as f64).sqrt() - 2.0).collect();
        let mut buf = Vec::new();
        write_free_space(&mut buf, &values, n, 8.0, "phi", None).unwrap();
        let dump = read_dump(&mut buf.as_slice()).unwrap();
        assert_eq!(
            dump.domain,
            DumpDomain::FreeSpace {
                n,
                half_width: 8.0
            }
        );
        assert_eq!(dump.values, values);
    }

    #[test]
    fn truncated_payload_rejected() {
        let spec = GridSpec::<f64>::cubic(4, DealiasRule::TwoThirds).unwrap();
        let field = GridField::zeros(spec);
        let mut buf = Vec::new();
        write_grid_field(&mut buf, &field, "p", None).unwrap();
        buf.truncate(buf.len() - 4);
        assert!(read_dump(&mut buf.as_slice()).is_err());
    }
}
