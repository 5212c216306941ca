//! Surface-group representations into PSL(2,R): Fuchsian holonomies assembled
//! from pants decompositions, folded representations with prescribed Euler
//! class, and finite length-spectrum probes of strict domination.

pub mod dd;
pub mod domination;
pub mod error;
pub mod folding;
pub mod io;
pub mod moebius;
pub mod pants;
pub mod presentation;
pub mod surface;
pub mod univcover;
pub mod words;

pub use error::{Error, Result};
