//! Grids, Fourier multipliers, annular radial quadrature and
//! Gauss-Hermite machinery.

pub mod annuli;
pub mod grid;
pub mod hermite;

pub use annuli::{gauss_legendre, AnnularNode, RadialAnnuli};
pub use grid::{
    apply_multiplier, apply_multiplier_real, circulant_entry, circulant_kernel, Dft, FreqGrid,
    SpaceGrid,
};
pub use hermite::{gauss_hermite_nodes, oscillator_values, HermiteBasis, E_POW_E};
