//! Splitting a bracketing z-range into its exact in-region runs.
//!
//! Both refiners return the same list of ranges: the maximal consecutive
//! runs of in-region z-values inside the window. [`refine_scan`] walks the
//! window one value at a time, paying one membership test per value plus a
//! jump over each gap. [`refine_jump`] never walks: it alternates
//! [`jump_out`](crate::jump::jump_out) and [`jump_in`](crate::jump::jump_in)
//! from run boundary to run boundary, so its cost follows the number of
//! runs rather than the region's interior volume.

use crate::jump::{jump_in, jump_out_counted};
use crate::region::{QueryRegion, ZRange};

/// Work counters of one refinement.
///
/// `membership_checks` counts every region-membership test the algorithm
/// performed and `in_region_checks` the subset that answered "inside"; for
/// `refine_scan` the in-region count equals the region's volume when the
/// window is the region's own bracket. `jumps_in` and `jumps_out` count
/// calls of the respective jump primitives.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RefineCounters {
    pub membership_checks: u64,
    pub in_region_checks: u64,
    pub jumps_in: u64,
    pub jumps_out: u64,
}

/// Result of a refinement: disjoint in-region runs in ascending order, plus
/// the work counters.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RefinedRanges {
    pub ranges: Vec<ZRange>,
    pub counters: RefineCounters,
}

impl RefinedRanges {
    /// Total number of z-values covered by the runs.
    pub fn covered(&self) -> u128 {
        self.ranges.iter().fold(0u128, |acc, r| acc.saturating_add(r.len()))
    }
}

/// One-by-one walk. Every value of the window is tested until a gap is hit,
/// then a single jump lands on the next run. The window `zr` may be any
/// range; runs are reported relative to it.
pub fn refine_scan(zr: ZRange, region: &QueryRegion) -> RefinedRanges {
    let mut out = RefinedRanges::default();
    let mut run_start = zr.start;
    let mut z = zr.start;
    loop {
        out.counters.membership_checks += 1;
        if region.contains_z(z) {
            out.counters.in_region_checks += 1;
            if z == zr.end {
                out.ranges.push(ZRange::new(run_start, z));
                break;
            }
            z += 1;
        } else {
            if z > run_start {
                out.ranges.push(ZRange::new(run_start, z - 1));
            }
            out.counters.jumps_in += 1;
            match jump_in(z, zr, region) {
                Some(next) if next <= zr.end => {
                    run_start = next;
                    z = next;
                }
                _ => break,
            }
        }
    }
    out
}

/// Boundary-to-boundary refinement. Starting from the first run, each
/// iteration jumps out to the run's end and in to the next run's start;
/// interior values are never visited.
pub fn refine_jump(zr: ZRange, region: &QueryRegion) -> RefinedRanges {
    let mut out = RefinedRanges::default();
    let mut run_start = zr.start;

    out.counters.membership_checks += 1;
    if region.contains_z(zr.start) {
        out.counters.in_region_checks += 1;
    } else {
        // Widened window: land on the first run before jumping out.
        out.counters.jumps_in += 1;
        match jump_in(zr.start, zr, region) {
            Some(v) if v <= zr.end => run_start = v,
            _ => return out,
        }
    }

    loop {
        out.counters.jumps_out += 1;
        let exit = jump_out_counted(run_start, zr, region, &mut out.counters);
        if exit < zr.end {
            out.ranges.push(ZRange::new(run_start, exit - 1));
            out.counters.jumps_in += 1;
            match jump_in(exit, zr, region) {
                Some(v) if v <= zr.end => run_start = v,
                _ => break,
            }
        } else {
            // The exit hit the window cap: the final run reaches the end of
            // the window unless the end value itself is outside the region.
            out.counters.membership_checks += 1;
            if region.contains_z(zr.end) {
                out.counters.in_region_checks += 1;
                out.ranges.push(ZRange::new(run_start, zr.end));
            } else {
                out.ranges.push(ZRange::new(run_start, zr.end - 1));
            }
            break;
        }
    }
    out
}
