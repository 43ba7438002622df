//! Counting metastable complex vector bundles over complex projective space
//! through Steenrod-module resolutions, Adams charts and the
//! Atiyah-Hirzebruch spectral sequence.

pub mod adams;
pub mod ahss;
pub mod cache;
pub mod census;
pub mod cli;
pub mod error;
pub mod fp;
pub mod intlat;
pub mod module;
pub mod prime;
pub mod reference;
pub mod render;
pub mod resolution;
pub mod steenrod;
pub mod strings;

pub use error::{Error, Result};
pub use prime::Prime;
