pub mod capacity;
pub mod encode;
pub mod error;
pub mod memory;
pub mod model;
pub mod space;

pub use error::{HvError, Result};
pub use memory::{recover_factor, Cleanup, ItemMemory};
pub use model::{Model, ModelKind, ModelParams, Normalization};
pub use space::{random_hv, similarity, Bits, Components, Hypervector, Metric, RngStream, SpaceKind, SpaceSpec};
