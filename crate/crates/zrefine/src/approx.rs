//! Query-region approximation along power-of-two boundaries.
//!
//! Refinement cost follows the region's surface, and a face's contribution
//! shrinks as its bound aligns with coarser power-of-two cells. Each face
//! gets a surface estimate `prod(other side lengths) / 2^((m-1)*b + dim)`
//! where `b` counts the bound's trailing zeros (start side) or trailing
//! ones (end side). [`approximate`] repeatedly widens the face with the
//! largest estimate (start bounds drop their lowest set bit, end bounds
//! fill their lowest clear bit) until the total over all faces falls to
//! the threshold. The result is a superset of the input region, so a query
//! that post-filters scanned tuples returns unchanged answers.
//!
//! Estimates are dyadic rationals kept exact as (numerator, exponent)
//! pairs; comparisons and the threshold test never round.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use std::cmp::Ordering;

use crate::region::QueryRegion;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceSide {
    Start,
    End,
}

/// One of a region's `2 * dims` faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Face {
    pub dim: usize,
    pub side: FaceSide,
}

/// Exact surface estimate of one face: `numerator / 2^exponent`. A face
/// whose bound already sits on the grid edge cannot widen; it is marked
/// non-expandable and its estimate is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceEstimate {
    pub face: Face,
    pub numerator: u128,
    pub exponent: u32,
    pub expandable: bool,
}

impl FaceEstimate {
    /// Exact value comparison (faces are ignored).
    pub fn value_cmp(&self, other: &FaceEstimate) -> Ordering {
        // Cross-compare a/2^x vs b/2^y as a*2^y vs b*2^x, shifting only by
        // the exponent difference. Shifts can pass 128 bits, so widen.
        let (a, x) = (self.numerator, self.exponent);
        let (b, y) = (other.numerator, other.exponent);
        let low = x.min(y);
        let lhs = BigInt::from(a) << (y - low);
        let rhs = BigInt::from(b) << (x - low);
        lhs.cmp(&rhs)
    }

    /// Lossy value for display.
    pub fn value_f64(&self) -> f64 {
        self.numerator as f64 / 2f64.powi(self.exponent as i32)
    }

    fn value_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.numerator), BigInt::one() << self.exponent)
    }
}

/// Expansion policy: widen while the face total exceeds `threshold`, up to
/// `max_expansions` rounds (`None` means the structural maximum of
/// `2 * dims * bits`, which expansion cannot reach anyway since every round
/// strictly coarsens one bound).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxParams {
    pub threshold: f64,
    pub max_expansions: Option<u32>,
}

impl Default for ApproxParams {
    fn default() -> Self {
        ApproxParams { threshold: 500.0, max_expansions: None }
    }
}

impl ApproxParams {
    pub fn with_threshold(threshold: f64) -> Self {
        ApproxParams { threshold, ..ApproxParams::default() }
    }
}

fn trailing_zeros_capped(v: u128, bits: u32) -> u32 {
    v.trailing_zeros().min(bits)
}

fn trailing_ones_capped(v: u128, bits: u32) -> u32 {
    v.trailing_ones().min(bits)
}

/// Surface estimate of one face of the region.
pub fn face_surface(region: &QueryRegion, face: Face) -> FaceEstimate {
    let cfg = region.config();
    assert!(face.dim < region.dims(), "dimension {} out of range", face.dim);
    let (start, end) = region.bounds()[face.dim];
    let b = match face.side {
        FaceSide::Start => trailing_zeros_capped(start, cfg.bits()),
        FaceSide::End => trailing_ones_capped(end, cfg.bits()),
    };
    if b == cfg.bits() {
        return FaceEstimate { face, numerator: 0, exponent: 0, expandable: false };
    }
    // prod of the other side lengths stays below 2^((dims-1)*bits) <= 2^127.
    let numerator = region
        .bounds()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != face.dim)
        .fold(1u128, |acc, (_, &(s, e))| acc * (e - s + 1));
    let exponent = (cfg.dims() - 1) * b + face.dim as u32;
    FaceEstimate { face, numerator, exponent, expandable: true }
}

/// Estimates of all `2 * dims` faces, in (dimension, start-before-end)
/// order.
pub fn surface_estimates(region: &QueryRegion) -> Vec<FaceEstimate> {
    let mut out = Vec::with_capacity(region.dims() * 2);
    for dim in 0..region.dims() {
        out.push(face_surface(region, Face { dim, side: FaceSide::Start }));
        out.push(face_surface(region, Face { dim, side: FaceSide::End }));
    }
    out
}

fn total_exceeds(region: &QueryRegion, threshold: f64) -> bool {
    let limit = BigRational::from_float(threshold).expect("finite threshold");
    let total: BigRational = surface_estimates(region)
        .iter()
        .map(FaceEstimate::value_rational)
        .sum();
    total > limit
}

/// Widens the face with the largest estimate by one power-of-two step
/// (ties: lowest dimension, start before end). Returns the widened region
/// and the chosen face, or `None` when every bound already sits on the
/// grid edge.
pub fn expand_once(region: &QueryRegion) -> Option<(QueryRegion, Face)> {
    let estimates = surface_estimates(region);
    let mut best: Option<&FaceEstimate> = None;
    for est in estimates.iter().filter(|e| e.expandable) {
        match best {
            // Strict comparison keeps the first of equals: listing order is
            // the tie-break order.
            Some(b) if est.value_cmp(b) != Ordering::Greater => {}
            _ => best = Some(est),
        }
    }
    let chosen = best?.face;
    let mut bounds = region.bounds().to_vec();
    let (start, end) = bounds[chosen.dim];
    bounds[chosen.dim] = match chosen.side {
        FaceSide::Start => (start & (start - 1), end),
        FaceSide::End => (start, end | (end + 1)),
    };
    let widened = QueryRegion::new(region.config(), bounds).expect("widened bounds stay valid");
    Some((widened, chosen))
}

/// Repeatedly expands the worst face while the surface total exceeds the
/// threshold. The result contains the input region; with a threshold of
/// zero it grows to the full grid.
///
/// # Panics
///
/// If the threshold is negative or not finite.
pub fn approximate(region: &QueryRegion, params: &ApproxParams) -> QueryRegion {
    assert!(
        params.threshold.is_finite() && params.threshold >= 0.0,
        "threshold must be finite and non-negative"
    );
    let cap = params.max_expansions.unwrap_or(2 * region.config().z_bits());
    let mut current = region.clone();
    for _ in 0..cap {
        if !total_exceeds(&current, params.threshold) {
            break;
        }
        match expand_once(&current) {
            Some((widened, _)) => current = widened,
            None => break,
        }
    }
    current
}
