//! Mission planning for a charging UAV serving a wireless rechargeable
//! sensor network.
//!
//! The planner answers two questions for a field of ground sensor nodes:
//! where should the UAV hover so that every node sits inside its charging
//! range (a minimal disk-cover style problem, solved by [`psofkp`]), and in
//! which order should it visit those hover points (a closed-tour problem,
//! solved by [`psod2p`]). [`energy`] converts a finished plan into a
//! propulsion/charging energy budget, [`baselines`] provides reference
//! schedulers and exact small-instance oracles, and [`experiment`] runs
//! seeded repetitions and writes the statistics and plot data files.

pub mod baselines;
pub mod config;
pub mod energy;
mod error;
pub mod experiment;
pub mod geometry;
pub mod kmeans;
pub mod objective;
pub mod psod2p;
pub mod psofkp;
pub mod scenario;

pub use error::{Error, Result};
pub use geometry::HoverPoint;
pub use objective::{HoverPlan, ObjectiveValue};
pub use psod2p::Tour;
pub use scenario::Scenario;
