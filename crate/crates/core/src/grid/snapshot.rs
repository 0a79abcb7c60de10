//! Binary snapshot files: magic `HOBS`, u32 version, u8 n, u64 m, f64 X,
//! f64 time, then mⁿ f64 values. All little-endian. A field without a time
//! tag stores NaN in the time slot.

use std::io::{Read, Write};

use super::{Field, GridSpec};
use crate::error::{Error, Result};

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"HOBS";
pub const SNAPSHOT_VERSION: u32 = 1;

pub fn write_snapshot<W: Write>(field: &Field, mut w: W) -> Result<()> {
    let spec = field.spec();
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
    w.write_all(&[spec.dim() as u8])?;
    w.write_all(&(spec.points_per_axis() as u64).to_le_bytes())?;
    w.write_all(&spec.half_width().to_le_bytes())?;
    w.write_all(&field.time().unwrap_or(f64::NAN).to_le_bytes())?;
    let mut buf = Vec::with_capacity(8 * field.values().len());
    for v in field.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<Field> {
    let magic: [u8; 4] = read_array(&mut r)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(Error::SnapshotFormat(format!("bad magic {magic:?}")));
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != SNAPSHOT_VERSION {
        return Err(Error::SnapshotFormat(format!("unsupported version {version}")));
    }
    let [n] = read_array::<1, _>(&mut r)?;
    let m = u64::from_le_bytes(read_array(&mut r)?);
    let x = f64::from_le_bytes(read_array(&mut r)?);
    let time = f64::from_le_bytes(read_array(&mut r)?);
    let spec = GridSpec::new(n as usize, m as usize, x)
        .map_err(|e| Error::SnapshotFormat(e.to_string()))?;
    let mut raw = vec![0u8; 8 * spec.len()];
    r.read_exact(&mut raw)?;
    let values = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    let field = Field::new(spec, values)?;
    Ok(if time.is_nan() { field } else { field.with_time(time) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_is_fixed() {
        let spec = GridSpec::new(1, 16, 2.0).unwrap();
        let f = Field::constant(spec, 1.5).with_time(0.25);
        let mut buf = Vec::new();
        write_snapshot(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 1 + 8 + 8 + 8 + 16 * 8);
        assert_eq!(&buf[..4], b"HOBS");
        assert_eq!(&buf[4..8], &1u32.to_le_bytes());
        assert_eq!(buf[8], 1);
        assert_eq!(&buf[9..17], &16u64.to_le_bytes());
        assert_eq!(&buf[17..25], &2.0f64.to_le_bytes());
        assert_eq!(&buf[25..33], &0.25f64.to_le_bytes());
        assert_eq!(&buf[33..41], &1.5f64.to_le_bytes());
    }

    #[test]
    fn rejects_bad_magic() {
        let bytes = b"NOPE\x01\x00\x00\x00".to_vec();
        assert!(matches!(read_snapshot(&bytes[..]), Err(Error::SnapshotFormat(_))));
    }

    #[test]
    fn missing_time_roundtrips_as_none() {
        let spec = GridSpec::new(2, 16, 1.0).unwrap();
        let f = Field::from_fn(spec, |x| x[0] - 2.0 * x[1]).unwrap();
        let mut buf = Vec::new();
        write_snapshot(&f, &mut buf).unwrap();
        let g = read_snapshot(&buf[..]).unwrap();
        assert_eq!(g, f);
        assert_eq!(g.time(), None);
    }
}
