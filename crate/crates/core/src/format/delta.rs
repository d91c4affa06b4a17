//! Fixed-width packing of column deltas.
//!
//! A delta `d` in `[1, 2^bits]` is stored as the codeword `d - 1` in `bits`
//! bits. `8 / bits` codewords share one byte, filled from the least
//! significant bit upwards: element `i` lives in byte `i / (8 / bits)` at bit
//! offset `(i % (8 / bits)) * bits`.

use crate::{Error, Result};

/// Bits per stored delta. Always divides 8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DeltaWidth(u8);

impl DeltaWidth {
    pub const ONE: Self = Self(1);
    pub const TWO: Self = Self(2);
    pub const FOUR: Self = Self(4);
    pub const EIGHT: Self = Self(8);

    pub const ALL: [Self; 4] = [Self::ONE, Self::TWO, Self::FOUR, Self::EIGHT];

    pub fn new(bits: u8) -> Result<Self> {
        match bits {
            1 | 2 | 4 | 8 => Ok(Self(bits)),
            other => Err(Error::InvalidDeltaWidth(other)),
        }
    }

    #[inline]
    pub fn bits(self) -> u8 {
        self.0
    }

    /// Largest gap a single delta can bridge, `2^bits`.
    #[inline]
    pub fn max_delta(self) -> u32 {
        1 << self.0
    }

    #[inline]
    pub fn per_byte(self) -> usize {
        8 / self.0 as usize
    }

    #[inline]
    fn mask(self) -> u8 {
        (((1u16) << self.0) - 1) as u8
    }

    /// Bytes needed for `count` packed deltas, without alignment padding.
    #[inline]
    pub fn packed_len(self, count: usize) -> usize {
        count.div_ceil(self.per_byte())
    }
}

impl Default for DeltaWidth {
    fn default() -> Self {
        Self::FOUR
    }
}

impl std::fmt::Display for DeltaWidth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Appends codewords to a growing byte buffer.
#[derive(Debug, Clone)]
pub(crate) struct DeltaPacker {
    width: DeltaWidth,
    bytes: Vec<u8>,
    len: usize,
}

impl DeltaPacker {
    pub(crate) fn new(width: DeltaWidth) -> Self {
        Self { width, bytes: Vec::new(), len: 0 }
    }

    pub(crate) fn with_capacity(width: DeltaWidth, count: usize) -> Self {
        Self { width, bytes: Vec::with_capacity(width.packed_len(count)), len: 0 }
    }

    /// Push a delta that the caller has already range checked.
    #[inline]
    pub(crate) fn push_unchecked(&mut self, delta: u32) {
        debug_assert!(delta >= 1 && delta <= self.width.max_delta());
        let per_byte = self.width.per_byte();
        let slot = self.len % per_byte;
        if slot == 0 {
            self.bytes.push(0);
        }
        let code = (delta - 1) as u8 & self.width.mask();
        *self.bytes.last_mut().expect("byte pushed above") |= code << (slot * self.width.bits() as usize);
        self.len += 1;
    }

    pub(crate) fn push(&mut self, delta: u32) -> Result<()> {
        let max = self.width.max_delta();
        if delta == 0 || delta > max {
            return Err(Error::DeltaOutOfRange { delta, max });
        }
        self.push_unchecked(delta);
        Ok(())
    }

    pub(crate) fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

/// Decode the delta stored at element `index`.
#[inline]
pub(crate) fn delta_at(bytes: &[u8], index: usize, width: DeltaWidth) -> u32 {
    code_at(bytes, index, width) as u32 + 1
}

/// Raw codeword at `index`; reads past the end of `bytes` yield zero.
#[inline]
pub(crate) fn code_at(bytes: &[u8], index: usize, width: DeltaWidth) -> u8 {
    let per_byte = width.per_byte();
    match bytes.get(index / per_byte) {
        Some(byte) => (byte >> ((index % per_byte) * width.bits() as usize)) & width.mask(),
        None => 0,
    }
}

/// Pack deltas in `[1, 2^bits]` into bytes, least significant bits first.
pub fn pack_deltas(deltas: &[u32], width: DeltaWidth) -> Result<Vec<u8>> {
    let mut packer = DeltaPacker::with_capacity(width, deltas.len());
    for &d in deltas {
        packer.push(d)?;
    }
    Ok(packer.into_bytes())
}

/// Inverse of [`pack_deltas`] for the first `count` elements of `bytes`.
pub fn unpack_deltas(bytes: &[u8], count: usize, width: DeltaWidth) -> Result<Vec<u32>> {
    if bytes.len() < width.packed_len(count) {
        return Err(Error::Truncated("packed deltas"));
    }
    Ok((0..count).map(|i| delta_at(bytes, i, width)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn four_bit_low_nibble_first() {
        assert_eq!(pack_deltas(&[2, 3], DeltaWidth::FOUR).unwrap(), vec![0x21]);
    }

    #[test]
    fn eight_bit_single_element() {
        assert_eq!(pack_deltas(&[16], DeltaWidth::EIGHT).unwrap(), vec![0x0F]);
    }

    #[test]
    fn two_bit_layout() {
        // codes 1,2,3,0 -> 0b00_11_10_01
        assert_eq!(pack_deltas(&[2, 3, 4, 1], DeltaWidth::TWO).unwrap(), vec![0b0011_1001]);
        // a fifth element starts a new byte
        assert_eq!(pack_deltas(&[1, 1, 1, 1, 4], DeltaWidth::TWO).unwrap(), vec![0, 3]);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(
            pack_deltas(&[17], DeltaWidth::FOUR),
            Err(Error::DeltaOutOfRange { delta: 17, max: 16 })
        ));
        assert!(matches!(pack_deltas(&[0], DeltaWidth::ONE), Err(Error::DeltaOutOfRange { .. })));
        assert!(matches!(pack_deltas(&[3], DeltaWidth::ONE), Err(Error::DeltaOutOfRange { .. })));
    }

    #[test]
    fn unpack_needs_enough_bytes() {
        assert!(matches!(unpack_deltas(&[0], 3, DeltaWidth::FOUR), Err(Error::Truncated(_))));
    }

    #[test]
    fn width_validation() {
        assert!(DeltaWidth::new(3).is_err());
        assert!(DeltaWidth::new(16).is_err());
        for bits in [1, 2, 4, 8] {
            assert_eq!(DeltaWidth::new(bits).unwrap().max_delta(), 1 << bits);
        }
    }

    fn width_and_deltas() -> impl Strategy<Value = (DeltaWidth, Vec<u32>)> {
        prop::sample::select(DeltaWidth::ALL.to_vec()).prop_flat_map(|width| {
            (Just(width), prop::collection::vec(1..=width.max_delta(), 0..200))
        })
    }

    proptest! {
        #[test]
        fn pack_unpack_identity((width, deltas) in width_and_deltas()) {
            let packed = pack_deltas(&deltas, width).unwrap();
            prop_assert_eq!(packed.len(), width.packed_len(deltas.len()));
            prop_assert_eq!(unpack_deltas(&packed, deltas.len(), width).unwrap(), deltas);
        }
    }
}
