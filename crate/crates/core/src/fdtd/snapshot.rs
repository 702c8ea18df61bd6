//! Self-describing binary field snapshots.
//!
//! Layout: magic `NWFD`, version (u32), dims (3 x u32), resolution (f64),
//! component id (u32), frequency (f64), then the samples as contiguous
//! little-endian 8-byte floats in x-fastest order.
//!
//! Component ids 0..=5 are instantaneous Ex..Hz; adding [`DFT_REAL`] or
//! [`DFT_IMAG`] marks the real/imaginary part of a discrete-frequency
//! transform at the header frequency.

use super::Component;
use std::io::{self, Read, Write};

pub const MAGIC: [u8; 4] = *b"NWFD";
pub const VERSION: u32 = 1;
pub const DFT_REAL: u32 = 16;
pub const DFT_IMAG: u32 = 32;

pub fn component_id(c: Component) -> u32 {
    match c {
        Component::Ex => 0,
        Component::Ey => 1,
        Component::Ez => 2,
        Component::Hx => 3,
        Component::Hy => 4,
        Component::Hz => 5,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotHeader {
    pub dims: [u32; 3],
    pub resolution: f64,
    pub component: u32,
    pub frequency: f64,
}

pub fn write_snapshot<W: Write>(
    mut w: W,
    header: &SnapshotHeader,
    samples: &[f64],
) -> io::Result<()> {
    let expect = header.dims.iter().map(|&d| d as usize).product::<usize>();
    assert_eq!(samples.len(), expect, "sample count does not match dims");
    w.write_all(&MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    for d in header.dims {
        w.write_all(&d.to_le_bytes())?;
    }
    w.write_all(&header.resolution.to_le_bytes())?;
    w.write_all(&header.component.to_le_bytes())?;
    w.write_all(&header.frequency.to_le_bytes())?;
    for &s in samples {
        w.write_all(&s.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_snapshot<R: Read>(mut r: R) -> io::Result<(SnapshotHeader, Vec<f64>)> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != MAGIC {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "bad magic"));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4)?;
    let version = u32::from_le_bytes(b4);
    if version != VERSION {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("unsupported version {version}"),
        ));
    }
    let mut dims = [0u32; 3];
    for d in dims.iter_mut() {
        r.read_exact(&mut b4)?;
        *d = u32::from_le_bytes(b4);
    }
    r.read_exact(&mut b8)?;
    let resolution = f64::from_le_bytes(b8);
    r.read_exact(&mut b4)?;
    let component = u32::from_le_bytes(b4);
    r.read_exact(&mut b8)?;
    let frequency = f64::from_le_bytes(b8);
    let n = dims.iter().map(|&d| d as usize).product::<usize>();
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        r.read_exact(&mut b8)?;
        samples.push(f64::from_le_bytes(b8));
    }
    Ok((SnapshotHeader { dims, resolution, component, frequency }, samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let header = SnapshotHeader {
            dims: [3, 2, 1],
            resolution: 10.0,
            component: component_id(Component::Ey) + DFT_REAL,
            frequency: 0.25,
        };
        let samples: Vec<f64> = (0..6).map(|i| i as f64 * 0.5 - 1.0).collect();
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &header, &samples).unwrap();
        // 4 magic + 4 version + 12 dims + 8 + 4 + 8 header + 48 data
        assert_eq!(buf.len(), 4 + 4 + 12 + 8 + 4 + 8 + 48);
        assert_eq!(&buf[..4], b"NWFD");
        let (h2, s2) = read_snapshot(buf.as_slice()).unwrap();
        assert_eq!(h2, header);
        assert_eq!(s2, samples);
    }
}
