use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Append-only bit sequence, packed most significant bit first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bitstream {
    bytes: Vec<u8>,
    len: u64,
}

impl Bitstream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        let offset = (self.len % 8) as u32;
        if offset == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> offset;
        }
        self.len += 1;
    }

    pub fn get(&self, index: u64) -> Option<bool> {
        (index < self.len).then(|| self.bytes[(index / 8) as usize] & (0x80 >> (index % 8)) != 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i).unwrap())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Serialized size: 8-byte length header plus the packed bits.
    pub fn encoded_len(&self) -> usize {
        8 + self.bytes.len()
    }

    /// Writes the 8-byte little-endian bit count followed by the packed bits,
    /// zero-padded to a byte boundary.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(&self.len.to_le_bytes())?;
        out.write_all(&self.bytes)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let mut header = [0u8; 8];
        input
            .read_exact(&mut header)
            .map_err(|_| Error::format("bitstream: missing length header"))?;
        let len = u64::from_le_bytes(header);
        let byte_len = usize::try_from(len.div_ceil(8))
            .map_err(|_| Error::format("bitstream: length overflow"))?;
        let mut bytes = Vec::new();
        input.take(byte_len as u64).read_to_end(&mut bytes)?;
        if bytes.len() != byte_len {
            return Err(Error::format(format!(
                "bitstream: header announces {len} bits but only {} bytes follow",
                bytes.len()
            )));
        }
        if len % 8 != 0 && bytes[byte_len - 1] & (0xff >> (len % 8)) != 0 {
            return Err(Error::format("bitstream: nonzero padding bits"));
        }
        Ok(Self { bytes, len })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::read_from(bytes)
    }
}

impl FromIterator<bool> for Bitstream {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut s = Bitstream::new();
        for bit in iter {
            s.push(bit);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn layout_is_msb_first_with_le_header() {
        let s: Bitstream = [true, false, true, true, false, false, false, false, true]
            .into_iter()
            .collect();
        assert_eq!(s.len(), 9);
        let bytes = s.to_bytes();
        assert_eq!(&bytes[..8], &9u64.to_le_bytes());
        assert_eq!(&bytes[8..], &[0b1011_0000, 0b1000_0000]);
    }

    #[test]
    fn rejects_truncation_and_dirty_padding() {
        let s: Bitstream = std::iter::repeat(true).take(20).collect();
        let bytes = s.to_bytes();
        assert!(Bitstream::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        assert!(Bitstream::from_bytes(&bytes[..4]).is_err());
        let mut dirty = bytes.clone();
        *dirty.last_mut().unwrap() |= 1;
        assert!(Bitstream::from_bytes(&dirty).is_err());
    }

    proptest! {
        #[test]
        fn serialization_round_trips(bits in proptest::collection::vec(any::<bool>(), 0..300)) {
            let s: Bitstream = bits.iter().copied().collect();
            let back = Bitstream::from_bytes(&s.to_bytes()).unwrap();
            prop_assert_eq!(back.iter().collect::<Vec<_>>(), bits);
            prop_assert_eq!(back, s);
        }
    }
}
