//! Microlocal Sobolev calculus on periodic spectral grids.
//!
//! Distributions on the torus `[0,1)^m` are carried by their Fourier
//! coefficients ([`SpectralDistribution`]). On top of that sit cone-localized
//! seminorms, dyadic order estimation of wave front sets, conic set algebra,
//! and the index gates and constructions for tensor and diagonal products.

pub mod claim;
pub mod conic;
pub mod cutoff;
pub mod directions;
pub mod error;
pub mod fft;
pub mod four_term;
pub mod grid;
pub mod indices;
pub mod product;
pub mod region;
pub mod seminorm;
pub mod spectral;
pub mod synth;
pub mod wavefront;
pub mod window;

pub use error::{Error, GateCode, Result};
pub use grid::GridSpec;
pub use region::{CellLattice, SpatialRegion};
pub use spectral::SpectralDistribution;
pub use synth::{synthesize, DistributionSpec};
pub use window::WindowFunction;
