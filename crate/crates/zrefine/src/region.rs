//! Query regions over the grid and their bracketing z-ranges.
//!
//! A [`QueryRegion`] is one inclusive `[start, end]` interval per dimension,
//! validated against a [`SpaceConfig`]. Encoding its min and max corners
//! yields the inclusive [`ZRange`] that brackets every in-region z-value;
//! componentwise order is preserved by the interleaving, so nothing in the
//! region falls outside that range. [`ValueDomain`] maps signed application
//! values onto the unsigned grid, and [`parse_conditions`] reads the
//! `lo..hi` text syntax shared by the CLI.

use crate::error::Error;
use crate::zspace::{SpaceConfig, ZValue};

/// Inclusive range of z-values, `start <= end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ZRange {
    pub start: ZValue,
    pub end: ZValue,
}

impl ZRange {
    /// # Panics
    ///
    /// If `start > end`.
    pub fn new(start: ZValue, end: ZValue) -> Self {
        assert!(start <= end, "inverted z-range {start}..{end}");
        ZRange { start, end }
    }

    /// Number of values covered, saturating at `u128::MAX` for the full
    /// 128-bit space.
    pub fn len(&self) -> u128 {
        (self.end - self.start).saturating_add(1)
    }

    pub fn contains(&self, z: ZValue) -> bool {
        self.start <= z && z <= self.end
    }
}

/// Per-dimension restriction in application-value space. `None` keeps the
/// dimension unrestricted (full span).
pub type Condition = Option<(i128, i128)>;

/// Axis-aligned region of grid cells: one inclusive `[start, end]` bound per
/// dimension, each below `2^bits`. Regions are never empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryRegion {
    cfg: SpaceConfig,
    bounds: Vec<(u128, u128)>,
}

impl QueryRegion {
    pub fn new(cfg: SpaceConfig, bounds: Vec<(u128, u128)>) -> Result<Self, Error> {
        if bounds.len() != cfg.dims() as usize {
            return Err(Error::DimensionMismatch { expected: cfg.dims() as usize, actual: bounds.len() });
        }
        let max = cfg.max_coord();
        for (dim, &(start, end)) in bounds.iter().enumerate() {
            if start > end || end > max {
                return Err(Error::InvalidBounds { dim, start, end, max });
            }
        }
        Ok(QueryRegion { cfg, bounds })
    }

    /// Builds the grid region selected by per-dimension application-value
    /// conditions. Conditions are clamped to the domain; omitted dimensions
    /// become the full span. `Ok(None)` signals an empty selection (some
    /// condition misses the domain entirely), which callers short-circuit
    /// to an empty result.
    pub fn from_values(domain: &ValueDomain, conditions: &[Condition]) -> Result<Option<Self>, Error> {
        let cfg = SpaceConfig::new(conditions.len() as u32, domain.bits())?;
        let (dmin, dmax) = (domain.min_value(), domain.max_value());
        let mut bounds = Vec::with_capacity(conditions.len());
        for cond in conditions {
            let (lo, hi) = match cond {
                None => (dmin, dmax),
                Some((lo, hi)) => (*lo.max(&dmin), *hi.min(&dmax)),
            };
            if lo > hi {
                return Ok(None);
            }
            bounds.push(((lo - dmin) as u128, (hi - dmin) as u128));
        }
        Ok(Some(QueryRegion { cfg, bounds }))
    }

    pub fn config(&self) -> SpaceConfig {
        self.cfg
    }

    pub fn bounds(&self) -> &[(u128, u128)] {
        &self.bounds
    }

    pub fn dims(&self) -> usize {
        self.bounds.len()
    }

    pub fn min_corner(&self) -> Vec<u128> {
        self.bounds.iter().map(|&(s, _)| s).collect()
    }

    pub fn max_corner(&self) -> Vec<u128> {
        self.bounds.iter().map(|&(_, e)| e).collect()
    }

    /// Componentwise membership test.
    ///
    /// # Panics
    ///
    /// If `coords` does not match the region's dimension count.
    pub fn contains(&self, coords: &[u128]) -> bool {
        assert_eq!(coords.len(), self.bounds.len(), "dimension mismatch");
        self.bounds.iter().zip(coords).all(|(&(s, e), &c)| s <= c && c <= e)
    }

    /// Membership of a z-value's decoded point, without allocating.
    pub fn contains_z(&self, z: ZValue) -> bool {
        self.bounds
            .iter()
            .enumerate()
            .all(|(d, &(s, e))| {
                let c = self.cfg.coord_of(z, d);
                s <= c && c <= e
            })
    }

    /// The inclusive z-range between the encoded min and max corners. Every
    /// in-region z-value lies within it.
    pub fn to_z_range(&self) -> ZRange {
        let start = self.cfg.encode(&self.min_corner()).expect("bounds validated");
        let end = self.cfg.encode(&self.max_corner()).expect("bounds validated");
        ZRange::new(start, end)
    }

    /// Number of grid cells inside the region, the interior cost of a
    /// one-by-one scan. Saturates at `u128::MAX`.
    pub fn volume(&self) -> u128 {
        self.bounds
            .iter()
            .map(|&(s, e)| (e - s).saturating_add(1))
            .fold(1u128, |acc, side| acc.saturating_mul(side))
    }

    /// Upper bound on boundary crossings of a run walk: twice the sum over
    /// dimensions of the region's face cell counts. Saturates at `u128::MAX`.
    pub fn surface_jumps(&self) -> u128 {
        let sides: Vec<u128> = self.bounds.iter().map(|&(s, e)| (e - s).saturating_add(1)).collect();
        let mut total = 0u128;
        for skip in 0..sides.len() {
            let face = sides
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != skip)
                .fold(1u128, |acc, (_, &side)| acc.saturating_mul(side));
            total = total.saturating_add(face);
        }
        total.saturating_mul(2)
    }
}

/// Signed application-value domain of a grid axis: values span
/// `[min, min + 2^bits - 1]` and map to grid coordinates by subtracting
/// `min`. The same domain applies to every dimension of a store.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValueDomain {
    min: i64,
    bits: u32,
}

impl ValueDomain {
    /// Requires `1 <= bits <= 127` so the domain maximum fits in `i128`.
    pub fn new(min: i64, bits: u32) -> Result<Self, Error> {
        if bits == 0 || bits > 127 {
            return Err(Error::DomainTooWide { min, bits });
        }
        Ok(ValueDomain { min, bits })
    }

    pub fn min(&self) -> i64 {
        self.min
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn min_value(&self) -> i128 {
        self.min as i128
    }

    pub fn max_value(&self) -> i128 {
        self.min as i128 + ((1i128 << self.bits) - 1)
    }

    /// Grid coordinate of an application value, or `None` outside the domain.
    pub fn grid(&self, v: i64) -> Option<u128> {
        let v = v as i128;
        if v < self.min_value() || v > self.max_value() {
            None
        } else {
            Some((v - self.min_value()) as u128)
        }
    }

    /// Application value at a grid coordinate.
    pub fn value(&self, g: u128) -> i128 {
        debug_assert!(g < (1u128 << self.bits));
        self.min as i128 + g as i128
    }
}

/// Parses the region text syntax: comma-separated per-dimension entries,
/// each either an inclusive `lo..hi` pair of signed integers or `*` for an
/// unrestricted dimension. Example: `-510..-507,*,3..9`.
pub fn parse_conditions(text: &str) -> Result<Vec<Condition>, Error> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::RegionSyntax("empty region".into()));
    }
    text.split(',')
        .map(|tok| {
            let tok = tok.trim();
            if tok == "*" {
                return Ok(None);
            }
            let parts: Vec<&str> = tok.split("..").collect();
            if parts.len() != 2 {
                return Err(Error::RegionSyntax(format!("expected `lo..hi` or `*`, got `{tok}`")));
            }
            let lo: i128 = parts[0]
                .trim()
                .parse()
                .map_err(|_| Error::RegionSyntax(format!("bad integer `{}` in `{tok}`", parts[0])))?;
            let hi: i128 = parts[1]
                .trim()
                .parse()
                .map_err(|_| Error::RegionSyntax(format!("bad integer `{}` in `{tok}`", parts[1])))?;
            Ok(Some((lo, hi)))
        })
        .collect()
}
