//! Bit-interleaved (Morton / z-order) codec over a fixed grid.
//!
//! A configuration is `dims` coordinates of `bits` bits each, with
//! `dims * bits <= 128` so every z-value fits in a `u128`. Counting bit
//! positions from 1 at the least-significant end, position `p` of a z-value
//! carries bit `ceil(p / dims)` of dimension `((p - 1) % dims) + 1`: the
//! lowest slot belongs to the first dimension's lowest bit, so for two
//! dimensions the odd positions spell dimension 1 and the even positions
//! dimension 2.

use crate::error::Error;

/// A z-ordered value. Only values below `2^(dims*bits)` of the governing
/// [`SpaceConfig`] are meaningful.
pub type ZValue = u128;

/// Grid shape: `dims` dimensions of `bits` bits each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceConfig {
    dims: u32,
    bits: u32,
}

impl SpaceConfig {
    /// Requires `dims >= 1`, `bits >= 1` and `dims * bits <= 128`.
    pub fn new(dims: u32, bits: u32) -> Result<Self, Error> {
        if dims == 0 || bits == 0 || dims.checked_mul(bits).map_or(true, |w| w > 128) {
            return Err(Error::InvalidConfig { dims, bits });
        }
        Ok(SpaceConfig { dims, bits })
    }

    pub fn dims(&self) -> u32 {
        self.dims
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Total z-value width in bits, `dims * bits`. Equals the number of
    /// layers a z-value can be carried through.
    pub fn z_bits(&self) -> u32 {
        self.dims * self.bits
    }

    /// Largest valid z-value, `2^(dims*bits) - 1`.
    pub fn max_z(&self) -> ZValue {
        shifted_max(self.z_bits())
    }

    /// Largest valid coordinate, `2^bits - 1`.
    pub fn max_coord(&self) -> u128 {
        shifted_max(self.bits)
    }

    /// Interleaves one coordinate per dimension into a z-value.
    pub fn encode(&self, coords: &[u128]) -> Result<ZValue, Error> {
        if coords.len() != self.dims as usize {
            return Err(Error::DimensionMismatch { expected: self.dims as usize, actual: coords.len() });
        }
        let max = self.max_coord();
        for (dim, &c) in coords.iter().enumerate() {
            if c > max {
                return Err(Error::CoordinateOutOfRange { dim, value: c, bits: self.bits, max });
            }
        }
        let mut z = 0u128;
        for p in 0..self.z_bits() {
            let bit = (coords[(p % self.dims) as usize] >> (p / self.dims)) & 1;
            z |= bit << p;
        }
        Ok(z)
    }

    /// Splits a z-value back into one coordinate per dimension.
    pub fn decode(&self, z: ZValue) -> Result<Vec<u128>, Error> {
        if z > self.max_z() {
            return Err(Error::ZValueOutOfRange { value: z, max: self.max_z() });
        }
        let mut coords = vec![0u128; self.dims as usize];
        for p in 0..self.z_bits() {
            coords[(p % self.dims) as usize] |= ((z >> p) & 1) << (p / self.dims);
        }
        Ok(coords)
    }

    /// Extracts the coordinate of one dimension without decoding the rest.
    /// Agrees with `decode(z)[dim]`.
    pub fn coord_of(&self, z: ZValue, dim: usize) -> u128 {
        debug_assert!(dim < self.dims as usize);
        debug_assert!(z <= self.max_z());
        let mut c = 0u128;
        let mut p = dim as u32;
        let mut k = 0;
        while p < self.z_bits() {
            c |= ((z >> p) & 1) << k;
            p += self.dims;
            k += 1;
        }
        c
    }

    /// Smallest multiple of `2^(layer-1)` strictly greater than `z`: the
    /// start of the next cell of the given layer. Layer 1 cells are single
    /// values, layer `z_bits()` cells are the two halves of the space.
    /// `None` when that start would fall beyond the space.
    ///
    /// # Panics
    ///
    /// If `layer` is outside `1..=z_bits()`.
    pub fn next_layered_cell(&self, z: ZValue, layer: u32) -> Option<ZValue> {
        assert!(
            (1..=self.z_bits()).contains(&layer),
            "layer {layer} outside 1..={}",
            self.z_bits()
        );
        debug_assert!(z <= self.max_z());
        let s = layer - 1;
        let cell = (z >> s).checked_add(1)?;
        if cell > (self.max_z() >> s) {
            return None;
        }
        Some(cell << s)
    }
}

fn shifted_max(width: u32) -> u128 {
    if width >= 128 {
        u128::MAX
    } else {
        (1u128 << width) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(dims: u32, bits: u32) -> SpaceConfig {
        SpaceConfig::new(dims, bits).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SpaceConfig::new(2, 3).is_ok());
        assert!(SpaceConfig::new(1, 128).is_ok());
        assert!(matches!(SpaceConfig::new(0, 3), Err(Error::InvalidConfig { .. })));
        assert!(matches!(SpaceConfig::new(2, 0), Err(Error::InvalidConfig { .. })));
        assert!(matches!(SpaceConfig::new(3, 43), Err(Error::InvalidConfig { .. })));
        assert!(matches!(SpaceConfig::new(u32::MAX, u32::MAX), Err(Error::InvalidConfig { .. })));
    }

    #[test]
    fn encode_reference_values() {
        let c = cfg(2, 3);
        assert_eq!(c.encode(&[2, 2]).unwrap(), 12);
        assert_eq!(c.encode(&[5, 5]).unwrap(), 51);
        assert_eq!(c.encode(&[0, 0]).unwrap(), 0);
        assert_eq!(c.encode(&[7, 7]).unwrap(), 63);
        assert_eq!(cfg(3, 2).encode(&[1, 1, 1]).unwrap(), 7);
    }

    #[test]
    fn one_dimension_is_identity() {
        let c = cfg(1, 8);
        for x in [0u128, 1, 17, 200, 255] {
            assert_eq!(c.encode(&[x]).unwrap(), x);
            assert_eq!(c.decode(x).unwrap(), vec![x]);
        }
    }

    #[test]
    fn encode_rejects_bad_input() {
        let c = cfg(2, 3);
        assert!(matches!(c.encode(&[1]), Err(Error::DimensionMismatch { expected: 2, actual: 1 })));
        assert!(matches!(c.encode(&[8, 0]), Err(Error::CoordinateOutOfRange { dim: 0, .. })));
        assert!(matches!(c.encode(&[0, 9]), Err(Error::CoordinateOutOfRange { dim: 1, .. })));
    }

    #[test]
    fn decode_reference_values() {
        let c = cfg(2, 3);
        assert_eq!(c.decode(51).unwrap(), vec![5, 5]);
        assert_eq!(c.decode(40).unwrap(), vec![0, 6]);
        assert_eq!(c.decode(0).unwrap(), vec![0, 0]);
        assert!(matches!(c.decode(64), Err(Error::ZValueOutOfRange { .. })));
    }

    #[test]
    fn round_trip_exhaustive_small() {
        for (dims, bits) in [(2, 3), (3, 2), (4, 2), (1, 6)] {
            let c = cfg(dims, bits);
            for z in 0..=c.max_z() {
                let coords = c.decode(z).unwrap();
                assert_eq!(c.encode(&coords).unwrap(), z, "dims={dims} bits={bits} z={z}");
            }
        }
    }

    #[test]
    fn coord_of_agrees_with_decode() {
        let c = cfg(3, 3);
        for z in 0..=c.max_z() {
            let coords = c.decode(z).unwrap();
            for d in 0..3 {
                assert_eq!(c.coord_of(z, d), coords[d]);
            }
        }
    }

    #[test]
    fn encode_is_componentwise_monotone_small() {
        // x <= y componentwise implies encode(x) <= encode(y).
        let c = cfg(2, 3);
        for a in 0..=c.max_z() {
            let pa = c.decode(a).unwrap();
            for b in 0..=c.max_z() {
                let pb = c.decode(b).unwrap();
                if pa.iter().zip(&pb).all(|(x, y)| x <= y) {
                    assert!(a <= b, "decode({a})={pa:?} <= decode({b})={pb:?} but z order disagrees");
                }
            }
        }
    }

    #[test]
    fn next_layered_cell_reference_values() {
        let c = cfg(2, 3);
        assert_eq!(c.next_layered_cell(36, 2), Some(38));
        assert_eq!(c.next_layered_cell(36, 4), Some(40));
        assert_eq!(c.next_layered_cell(0, 1), Some(1));
        assert_eq!(c.next_layered_cell(12, 5), Some(16));
    }

    #[test]
    fn next_layered_cell_is_aligned_and_minimal() {
        let c = cfg(2, 3);
        for z in 0..=c.max_z() {
            for layer in 1..=c.z_bits() {
                let step = 1u128 << (layer - 1);
                match c.next_layered_cell(z, layer) {
                    Some(n) => {
                        assert!(n > z && n % step == 0);
                        assert!(n - z <= step, "not the next boundary: z={z} layer={layer} n={n}");
                    }
                    None => assert!((z >> (layer - 1)) == c.max_z() >> (layer - 1)),
                }
            }
        }
    }

    #[test]
    fn next_layered_cell_overflow() {
        let c = cfg(2, 3);
        for layer in 1..=6 {
            assert_eq!(c.next_layered_cell(63, layer), None);
        }
        assert_eq!(c.next_layered_cell(48, 5), None);
        let wide = cfg(1, 128);
        assert_eq!(wide.next_layered_cell(u128::MAX, 1), None);
        assert_eq!(wide.next_layered_cell(u128::MAX - 1, 1), Some(u128::MAX));
    }

    #[test]
    #[should_panic(expected = "layer 7 outside")]
    fn next_layered_cell_rejects_bad_layer() {
        cfg(2, 3).next_layered_cell(0, 7);
    }
}
