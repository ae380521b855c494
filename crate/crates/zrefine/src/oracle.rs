//! Linear-scan reference implementations.
//!
//! These walk every z-value of a window and derive runs and boundaries by
//! brute force. They define the contracts the jump and refine algorithms
//! are tested against, and back the CLI's `--oracle` verification flag. A
//! window longer than [`SCAN_GUARD`] values is refused rather than walked.

use crate::error::Error;
use crate::refine::RefinedRanges;
use crate::region::{QueryRegion, ZRange};
use crate::zspace::ZValue;

/// Largest window (in z-values) the oracles agree to walk.
pub const SCAN_GUARD: u128 = 1 << 24;

fn check_guard(zr: ZRange) -> Result<(), Error> {
    let len = zr.len();
    if len > SCAN_GUARD {
        return Err(Error::ScanGuardExceeded { len, guard: SCAN_GUARD });
    }
    Ok(())
}

/// Maximal consecutive in-region runs inside the window, by scanning every
/// value. Counter fields report the scan itself: one membership check per
/// value, no jumps.
pub fn oracle_runs(zr: ZRange, region: &QueryRegion) -> Result<RefinedRanges, Error> {
    check_guard(zr)?;
    let mut out = RefinedRanges::default();
    let mut run_start: Option<ZValue> = None;
    for z in zr.start..=zr.end {
        out.counters.membership_checks += 1;
        if region.contains_z(z) {
            out.counters.in_region_checks += 1;
            run_start.get_or_insert(z);
        } else if let Some(start) = run_start.take() {
            out.ranges.push(ZRange::new(start, z - 1));
        }
    }
    if let Some(start) = run_start {
        out.ranges.push(ZRange::new(start, zr.end));
    }
    Ok(out)
}

/// First in-region value at or after `z` within the window, or `None` when
/// the rest of the window stays outside the region.
///
/// # Panics
///
/// If `z` lies outside `zr`.
pub fn oracle_next_in(z: ZValue, zr: ZRange, region: &QueryRegion) -> Result<Option<ZValue>, Error> {
    assert!(zr.contains(z), "z outside the window");
    check_guard(zr)?;
    Ok((z..=zr.end).find(|&w| region.contains_z(w)))
}

/// First out-of-region value after `z`, capped at the window end: the exit
/// point of the run containing `z`.
///
/// # Panics
///
/// If `z` lies outside `zr`.
pub fn oracle_next_out(z: ZValue, zr: ZRange, region: &QueryRegion) -> Result<ZValue, Error> {
    assert!(zr.contains(z), "z outside the window");
    check_guard(zr)?;
    if z == zr.end {
        return Ok(zr.end);
    }
    Ok((z + 1..=zr.end).find(|&w| !region.contains_z(w)).unwrap_or(zr.end))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zspace::SpaceConfig;

    fn region(dims: u32, bits: u32, bounds: &[(u128, u128)]) -> QueryRegion {
        QueryRegion::new(SpaceConfig::new(dims, bits).unwrap(), bounds.to_vec()).unwrap()
    }

    fn fig1_region() -> QueryRegion {
        region(2, 3, &[(2, 5), (2, 5)])
    }

    #[test]
    fn runs_reference_values() {
        let r = fig1_region();
        let out = oracle_runs(r.to_z_range(), &r).unwrap();
        let expect: Vec<ZRange> = [(12, 15), (24, 27), (36, 39), (48, 51)]
            .iter()
            .map(|&(s, e)| ZRange::new(s, e))
            .collect();
        assert_eq!(out.ranges, expect);
        assert_eq!(out.counters.membership_checks, 40);
        assert_eq!(out.counters.in_region_checks, 16);
    }

    #[test]
    fn runs_point_region() {
        let r = region(2, 3, &[(3, 3), (4, 4)]);
        let zr = r.to_z_range();
        let out = oracle_runs(zr, &r).unwrap();
        assert_eq!(out.ranges, vec![ZRange::new(zr.start, zr.start)]);
    }

    #[test]
    fn guard_refuses_long_windows() {
        let r = region(1, 30, &[(0, (1 << 30) - 1)]);
        match oracle_runs(r.to_z_range(), &r) {
            Err(Error::ScanGuardExceeded { len, guard }) => {
                assert_eq!(len, 1 << 30);
                assert_eq!(guard, SCAN_GUARD);
            }
            other => panic!("expected guard refusal, got {other:?}"),
        }
    }

    #[test]
    fn next_in_reference_values() {
        let r = fig1_region();
        let zr = r.to_z_range();
        assert_eq!(oracle_next_in(16, zr, &r).unwrap(), Some(24));
        assert_eq!(oracle_next_in(12, zr, &r).unwrap(), Some(12));
        assert_eq!(oracle_next_in(52, ZRange::new(0, 63), &r).unwrap(), None);
    }

    #[test]
    fn next_out_reference_values() {
        let r = fig1_region();
        let zr = r.to_z_range();
        assert_eq!(oracle_next_out(12, zr, &r).unwrap(), 16);
        assert_eq!(oracle_next_out(48, zr, &r).unwrap(), 51);
        assert_eq!(oracle_next_out(51, zr, &r).unwrap(), 51);
    }

    /// The runs decomposition is exact: disjoint, ascending, maximal, and
    /// covering precisely the in-region values of the window. Asserted
    /// exhaustively over every region of the 2-dim 3-bit space, for both
    /// the region's own bracket and the full window.
    #[test]
    fn runs_are_exact_exhaustively_2x3() {
        for s1 in 0..8u128 {
            for e1 in s1..8 {
                for s2 in 0..8u128 {
                    for e2 in s2..8 {
                        let r = region(2, 3, &[(s1, e1), (s2, e2)]);
                        for zr in [r.to_z_range(), ZRange::new(0, 63)] {
                            let out = oracle_runs(zr, &r).unwrap();
                            let mut prev_end: Option<u128> = None;
                            for run in &out.ranges {
                                assert!(zr.contains(run.start) && zr.contains(run.end));
                                if let Some(p) = prev_end {
                                    // Ascending with a real gap between runs.
                                    assert!(run.start > p + 1);
                                }
                                // Maximal: in-region inside, outside at both flanks.
                                for z in run.start..=run.end {
                                    assert!(r.contains_z(z));
                                }
                                assert!(run.start == zr.start || !r.contains_z(run.start - 1));
                                assert!(run.end == zr.end || !r.contains_z(run.end + 1));
                                prev_end = Some(run.end);
                            }
                            let covered = out.covered();
                            let inside = (zr.start..=zr.end).filter(|&z| r.contains_z(z)).count();
                            assert_eq!(covered, inside as u128);
                            if zr == r.to_z_range() {
                                assert_eq!(covered, r.volume());
                            }
                        }
                    }
                }
            }
        }
    }
}
