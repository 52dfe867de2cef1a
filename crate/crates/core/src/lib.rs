//! Spectral classification, model channels, and finite-time scattering
//! diagnostics for self-adjoint Toeplitz operators with piecewise-smooth
//! symbols on the unit circle.

pub mod channel;
pub mod classifier;
pub mod error;
pub mod intervals;
pub mod poly;
pub mod quad;
pub mod scattering;
pub mod symbol;
pub mod toeplitz;

pub use channel::{BumpProfile, IndicatorChannel, JumpModelSymbol, PropagatorSample};
pub use classifier::{
    AdmissibleInterval, MultiplicityReport, PointClass, PreimageArcs, SpectrumPartition,
};
pub use error::{Error, Result};
pub use intervals::IntervalSet;
pub use scattering::{
    ChannelDecomposition, ChannelKind, ChannelMass, ChannelState, CookReport, DiscreteSpaces,
    ModelModeEvaluator, TimeSign, TwoSidedReport, WaveApprox,
};
pub use symbol::{
    Angle, FourierCoeffs, JumpClass, JumpInfo, PieceKind, PiecewiseSymbol, PolyPiece, Side,
    SpectralSets,
};
pub use toeplitz::{CountingReport, HankelBlock, TruncatedToeplitz};
