//! Spectral laboratory for parabolic equations of order 2m with singular
//! potentials c/|x|^{2m} and their regularizations c/(eps^{2m} + |x|^{2m}).
//!
//! All computation is radial on balls: [`discretize`] builds the separated
//! radial operators, [`spectral`] resolves their point spectrum and
//! [`evolution`] propagates data exactly in the discrete eigenbasis.

pub mod band;
pub mod discretize;
pub mod error;
pub mod evolution;
pub mod fit;
pub mod model;
pub mod spectral;

pub use error::{Error, ErrorClass, Result};
