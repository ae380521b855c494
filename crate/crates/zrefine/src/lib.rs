//! Z-order range refinement toolkit.
//!
//! A multi-dimensional range query over z-ordered (Morton-interleaved) keys
//! maps to one contiguous z-range that brackets the region but also covers
//! values outside it. This crate splits that bracket into the exact set of
//! in-region runs, either by walking values one at a time (`refine_scan`) or
//! by jumping run-to-run with bit arithmetic (`refine_jump`), and can first
//! widen the region along cheap power-of-two boundaries (`approximate`) so
//! that fewer, coarser runs remain. A small ordered tuple store and linear
//! reference oracles round out the pieces.
//!
//! Configurations are generic over `dims * bits <= 128`; z-values are `u128`.

mod error;

pub mod approx;
pub mod jump;
pub mod oracle;
pub mod refine;
pub mod region;
pub mod store;
pub mod zspace;

pub use approx::{approximate, expand_once, face_surface, ApproxParams, Face, FaceEstimate, FaceSide};
pub use error::Error;
pub use jump::{jump_in, jump_out, slide_out};
pub use refine::{refine_jump, refine_scan, RefineCounters, RefinedRanges};
pub use region::{parse_conditions, Condition, QueryRegion, ValueDomain, ZRange};
pub use store::{QueryMode, QueryStats, TupleStore};
pub use zspace::{SpaceConfig, ZValue};
