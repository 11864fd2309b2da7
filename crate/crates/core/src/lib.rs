//! Toolkit for fuzzy-hint UAV navigation: bearing hints and prompts, a
//! 99-bin numerical action codec with intrinsic landing, a seeded kinematic
//! simulator, a scripted expert, geometry-consistent curation, a tabular
//! behavior-cloning policy and NE/SR/OSR/SPL evaluation.
//!
//! The geometric and codec primitives are generic over [`Scalar`]
//! (`f32`/`f64`); the simulator and pipeline run at `f64` through the
//! aliases below.

pub mod bc;
pub mod codec;
pub mod codec_check;
pub mod config;
pub mod curation;
pub mod episode;
pub mod error;
pub mod eval;
pub mod expert;
pub mod geometry;
pub mod io;
pub mod mosaic;
pub mod pipeline;
pub mod plot;
pub mod prompting;
pub mod route;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Pose = geometry::Pose<f64>;
pub type RelativeBearing = geometry::RelativeBearing<f64>;
pub type Action = codec::Action<f64>;
pub type VelocityCommand = codec::VelocityCommand<f64>;
pub type Aabb = sim::Aabb<f64>;

pub use codec::{ActionTokens, TokenTriple};
pub use episode::{Frame, Status, Trajectory};
pub use prompting::FuzzyHint;
pub use sim::{DepthProbe, Scene};
