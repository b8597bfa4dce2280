//! Gauss diagrams of free, flat and virtual knots, Reidemeister moves on
//! their codes, parities and the invariants built from them.

pub mod diagram;
pub mod error;
pub mod invariants;
pub mod link;
pub mod moves;
pub mod parity;
pub mod search;
pub mod smoothing;
pub mod snf;
pub mod surface;
pub mod universal;
pub mod z2;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/codes.md")]
    mod codes {}
    #[doc = include_str!("../../../book/src/moves.md")]
    mod moves {}
    #[doc = include_str!("../../../book/src/parity.md")]
    mod parity {}
    #[doc = include_str!("../../../book/src/surface.md")]
    mod surface {}
    #[doc = include_str!("../../../book/src/universal.md")]
    mod universal {}
    #[doc = include_str!("../../../book/src/invariants.md")]
    mod invariants {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
