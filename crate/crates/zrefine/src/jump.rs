//! Run-boundary jumps along the z-order walk.
//!
//! Inside a bracketing z-range, in-region values form maximal consecutive
//! runs. [`jump_in`] lands on the next run's first value from outside a
//! region in one pass over the bits (no gap walking); [`jump_out`] finds
//! where the run containing a given start leaves the region, by trying the
//! per-dimension forward exits ([`slide_out`]) and then backward carries
//! across layered-cell boundaries.

use crate::refine::RefineCounters;
use crate::region::{QueryRegion, ZRange};
use crate::zspace::ZValue;

/// Re-encodes `z` with dimension `dim`'s coordinate pushed one past the
/// region's end bound: the z-value reached when a run slides out of the
/// region along that dimension. `None` when the region already touches the
/// grid edge there.
///
/// # Panics
///
/// If `decode(z)` lies outside the region or `dim` is out of range.
pub fn slide_out(z: ZValue, region: &QueryRegion, dim: usize) -> Option<ZValue> {
    assert!(dim < region.dims(), "dimension {dim} out of range");
    let point = region.config().decode(z).expect("z inside the space");
    assert!(region.contains(&point), "slide_out requires an in-region value");
    slide_out_point(&point, region, dim)
}

fn slide_out_point(point: &[u128], region: &QueryRegion, dim: usize) -> Option<ZValue> {
    let cfg = region.config();
    let end = region.bounds()[dim].1;
    if end == cfg.max_coord() {
        return None;
    }
    let mut coords = point.to_vec();
    coords[dim] = end + 1;
    Some(cfg.encode(&coords).expect("coordinates within the grid"))
}

/// Smallest z-value at or after `z` whose point lies in the region, or
/// `None` when `z` already exceeds every in-region value. Runs in one pass
/// over the `dims * bits` positions: the interleaved min/max corner codes
/// are cut down around `z` bit by bit, keeping the best "load 1000..."
/// candidate seen at each split.
///
/// # Panics
///
/// If `z` lies outside `zr` or decodes to an in-region point.
pub fn jump_in(z: ZValue, zr: ZRange, region: &QueryRegion) -> Option<ZValue> {
    assert!(zr.contains(z), "jump_in requires z inside the bracketing range");
    assert!(!region.contains_z(z), "jump_in requires an out-of-region value");
    let cfg = region.config();
    let dims = cfg.dims();

    let mut dim_masks = vec![0u128; dims as usize];
    for p in 0..cfg.z_bits() {
        dim_masks[(p % dims) as usize] |= 1u128 << p;
    }

    let corners = region.to_z_range();
    let mut zmin = corners.start;
    let mut zmax = corners.end;
    let mut candidate: Option<ZValue> = None;

    for p in (0..cfg.z_bits()).rev() {
        let bit = 1u128 << p;
        // Bits below `p` that belong to the same dimension.
        let lower = dim_masks[(p % dims) as usize] & (bit - 1);
        let key = (z & bit != 0, zmin & bit != 0, zmax & bit != 0);
        match key {
            (false, false, false) | (true, true, true) => {}
            (false, false, true) => {
                // The box spans both halves at this bit. Remember the upper
                // half's min corner, keep searching the lower half.
                candidate = Some((zmin | bit) & !lower);
                zmax = (zmax & !bit) | lower;
            }
            (false, true, true) => return Some(zmin),
            (true, false, false) => return candidate,
            (true, false, true) => {
                // z is in the upper half; the lower half falls behind it.
                zmin = (zmin | bit) & !lower;
            }
            (false, true, false) | (true, true, false) => {
                unreachable!("corner codes inverted at bit {p}")
            }
        }
    }
    // Walking off the last bit would mean z itself sits in the box.
    unreachable!("jump_in entered with an in-region value")
}

/// Where the run starting at `z` leaves the region: the smallest z-value
/// greater than `z` that decodes outside the region, capped at `zr.end`.
/// `z` must be a run start (a `jump_in` result or the bracket start).
///
/// Phase one slides forward out of the region over each dimension and keeps
/// the nearest candidate. Phase two walks layers upward from 2; at each
/// zero bit of `z` it probes the next layered cell, stopping at the first
/// probe that is out of region (a nearer exit) or past the best candidate.
///
/// An in-region cell start is not enough to rule the cell out: a layered
/// cell is an axis-aligned box, and the run can end strictly inside it.
/// From z = 6 in the region x in [0,3], y in [1,2] (2 dims, 3 bits), the
/// first outside value is 10, in the middle of cell [8, 15] whose start 8
/// is still inside. Phase two therefore certifies a cell by also testing
/// its max corner (corners inside means the box is fully inside) and
/// descends into the first uncertified cell for the exact exit.
///
/// # Panics
///
/// If `z` lies outside `zr` or decodes outside the region.
pub fn jump_out(z: ZValue, zr: ZRange, region: &QueryRegion) -> ZValue {
    let mut counters = RefineCounters::default();
    jump_out_counted(z, zr, region, &mut counters)
}

pub(crate) fn jump_out_counted(
    z: ZValue,
    zr: ZRange,
    region: &QueryRegion,
    counters: &mut RefineCounters,
) -> ZValue {
    assert!(zr.contains(z), "jump_out requires z inside the bracketing range");
    let cfg = region.config();
    let point = cfg.decode(z).expect("z inside the space");
    assert!(region.contains(&point), "jump_out requires an in-region run start");

    let mut nearest = zr.end;
    for dim in 0..region.dims() {
        if let Some(cand) = slide_out_point(&point, region, dim) {
            if cand < nearest {
                nearest = cand;
            }
        }
    }

    for layer in 2..=cfg.z_bits() {
        if (z >> (layer - 1)) & 1 == 1 {
            continue;
        }
        let Some(cell) = cfg.next_layered_cell(z, layer) else {
            break;
        };
        if cell >= nearest {
            break;
        }
        counters.membership_checks += 1;
        if !region.contains_z(cell) {
            nearest = cell;
            break;
        }
        counters.in_region_checks += 1;
        let cell_max = cell + (1u128 << (layer - 1)) - 1;
        counters.membership_checks += 1;
        if region.contains_z(cell_max) {
            // Both corners inside: the box is fully inside, no exit here.
            counters.in_region_checks += 1;
            continue;
        }
        // The run ends somewhere in this cell; nothing past the cell's end
        // can beat the exit found inside it.
        let exit = first_out_in_cell(cell, layer - 1, region, counters);
        if exit < nearest {
            nearest = exit;
        }
        break;
    }
    nearest
}

/// Smallest z-value in the aligned cell `[start, start + 2^size_log2 - 1]`
/// that decodes outside the region. `start` must be inside and the cell's
/// max corner outside; halving the span keeps that shape until the exit is
/// pinned down.
fn first_out_in_cell(
    start: ZValue,
    size_log2: u32,
    region: &QueryRegion,
    counters: &mut RefineCounters,
) -> ZValue {
    let mut lo = start;
    let mut log2 = size_log2;
    loop {
        if log2 == 1 {
            // The lower half is `lo` itself, known inside.
            return lo + 1;
        }
        let half = 1u128 << (log2 - 1);
        counters.membership_checks += 1;
        if !region.contains_z(lo + half - 1) {
            // Lower half's max corner is out: the exit is below the split.
            log2 -= 1;
            continue;
        }
        counters.in_region_checks += 1;
        // Lower half fully inside; the exit is the upper half's first
        // outside value, starting from its min corner.
        counters.membership_checks += 1;
        if !region.contains_z(lo + half) {
            return lo + half;
        }
        counters.in_region_checks += 1;
        lo += half;
        log2 -= 1;
    }
}
