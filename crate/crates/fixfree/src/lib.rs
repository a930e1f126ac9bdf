//! Fix-free codes: construction for prescribed length profiles, de Bruijn
//! graph tools, pi-systems, and an exhaustive existence verifier.

pub mod cli;
pub mod constructors;
pub mod debruijn;
pub mod error;
pub mod pisystems;
pub mod verifier;
pub mod words;

pub use error::{Error, Result};
