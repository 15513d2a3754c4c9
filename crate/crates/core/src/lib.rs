//! Desk-scale simulation of measurement-based quantum computation.

pub mod aklt;
pub mod bell;
pub mod compiler;
pub mod entanglement;
pub mod error;
pub mod gates;
pub mod growth;
pub mod pattern;
pub mod stabilizer;
pub mod statevec;

pub use error::{Error, Result};
pub use num_complex::Complex64;

#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    pub mod intro {}
    #[doc = include_str!("../../../book/src/states.md")]
    pub mod states {}
    #[doc = include_str!("../../../book/src/patterns.md")]
    pub mod patterns {}
    #[doc = include_str!("../../../book/src/compiler.md")]
    pub mod compiler {}
    #[doc = include_str!("../../../book/src/growth.md")]
    pub mod growth {}
    #[doc = include_str!("../../../book/src/aklt.md")]
    pub mod aklt {}
    #[doc = include_str!("../../../book/src/entanglement.md")]
    pub mod entanglement {}
    #[doc = include_str!("../../../book/src/bell.md")]
    pub mod bell {}
    #[doc = include_str!("../../../book/src/formats.md")]
    pub mod formats {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
