//! Sanitizable signatures built on a McEliece-style chameleon hash.

pub mod binmat;
pub mod error;
pub mod gf2m;
pub mod goppa;
pub mod params;

pub use error::Error;
pub use params::CodeParams;
pub mod analysis;
pub mod bench;
pub mod chameleon;
pub mod codec;
pub mod sss;
pub mod testkit;
