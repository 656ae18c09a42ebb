//! A finite truncated-presheaf calculus for simplicial, bisimplicial and
//! marked objects: exact hom enumeration, lifting-property fibration
//! checkers, Cartesian-edge detection via slices, the four transfer
//! adjunctions between the simplicial and bisimplicial worlds, and finite
//! category oracles that cross-check all of it.

pub mod bisimplicial;
pub mod cartesian;
pub mod cat;
pub mod delta;
pub mod error;
pub mod hom;
pub mod lifting;
pub mod map;
pub mod marked;
pub mod ops;
pub mod presheaf;
pub mod report;
pub mod shape;
pub mod standard;
pub mod transfer;
mod unionfind;

pub use error::{Error, Result};
pub use presheaf::{PresheafRef, TruncatedPresheaf};
pub use report::{CheckReport, Exactness, Verdict, Witness};
pub use shape::{Dim, IndexShape, Level};
