//! On-disk container for one encoded graph.
//!
//! Layout: `GCDC`, version byte, coder id byte, `n` as u64 little-endian,
//! mode byte (0 learned, 1 universal), then the bitstream. Learned parameters
//! are not stored; the decoder needs the model file.

use std::io::{Read, Write};

use crate::entropy::Bitstream;
use crate::error::{Error, Result};
use crate::partition::CoderId;

const MAGIC: &[u8; 4] = b"GCDC";
const VERSION: u8 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Learned,
    Universal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Container {
    pub coder: CoderId,
    pub n: u64,
    pub mode: Mode,
    pub stream: Bitstream,
}

impl Container {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&[VERSION, self.coder.to_byte()])?;
        w.write_all(&self.n.to_le_bytes())?;
        w.write_all(&[match self.mode {
            Mode::Learned => 0,
            Mode::Universal => 1,
        }])?;
        self.stream.write_to(w)
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut head = [0u8; 15];
        r.read_exact(&mut head)
            .map_err(|_| Error::format("container header is truncated"))?;
        if &head[..4] != MAGIC {
            return Err(Error::format("not a graph container (bad magic)"));
        }
        if head[4] != VERSION {
            return Err(Error::format(format!("unsupported container version {}", head[4])));
        }
        let coder = CoderId::from_byte(head[5])?;
        let n = u64::from_le_bytes(head[6..14].try_into().unwrap());
        let mode = match head[14] {
            0 => Mode::Learned,
            1 => Mode::Universal,
            b => return Err(Error::format(format!("unknown mode byte {b}"))),
        };
        let stream = Bitstream::read_from(r)?;
        Ok(Self { coder, n, mode, stream })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to memory");
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::read_from(bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Container {
        Container {
            coder: CoderId::StructTriangle,
            n: 300,
            mode: Mode::Universal,
            stream: [true, false, true, true].into_iter().collect(),
        }
    }

    #[test]
    fn round_trip() {
        let c = sample();
        let bytes = c.to_bytes();
        assert_eq!(&bytes[..6], b"GCDC\x01\x03");
        assert_eq!(&bytes[6..14], &300u64.to_le_bytes());
        assert_eq!(Container::from_bytes(&bytes).unwrap(), c);
    }

    #[test]
    fn rejects_corruption() {
        let bytes = sample().to_bytes();
        for (at, value) in [(0, b'X'), (4, 9), (5, 7), (14, 2)] {
            let mut bad = bytes.clone();
            bad[at] = value;
            assert!(matches!(Container::from_bytes(&bad), Err(Error::Format(_))), "byte {at}");
        }
        assert!(Container::from_bytes(&bytes[..10]).is_err());
        assert!(Container::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }
}
