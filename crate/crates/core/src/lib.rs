//! Deterministic procedural 4D city generation.
//!
//! The crate turns tagged geodata into a bird's-eye-view city layout (a
//! semantic map plus dual height fields), derives an HD map and traffic
//! scenarios from it, and renders background, building and vehicle layers
//! with closed-form volumetric integration before compositing them.
//!
//! Every stage that would normally be learned is replaced by a seeded,
//! reproducible stand-in, so identical inputs always produce identical
//! bytes.

pub mod compositor;
pub mod encoders;
mod error;
pub mod exec;
pub mod hashing;
pub mod hdmap;
pub mod layout;
pub mod osm;
pub mod png_io;
pub mod render;
pub mod traffic;

pub use error::{Error, Result};
pub use exec::Exec;
