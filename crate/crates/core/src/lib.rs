//! Direct comparison of community structures over a shared graph.
//!
//! Two community sets produced by different detection algorithms on the same
//! graph are compared head-to-head: similar communities are paired by maximum
//! node overlap, and the nodes that the primary community keeps but its
//! partner does not ("analytical nodes") are scored by how much of their
//! neighborhood each side retains. The resulting topological variance (TV)
//! feeds two ranking schemes: per-dataset ranks (DTV) and overall ranks
//! across datasets (OTV).
//!
//! The crate also ships classical quality metrics (modularity, conductance,
//! isolability) for cross-checking TV-based rankings, two deterministic
//! reference detectors (label propagation and greedy modularity
//! agglomeration), and a manifest-driven pipeline that emits stable CSV/JSON
//! report bundles.

pub mod community;
pub mod detect;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod pairing;
pub mod pipeline;
pub mod ranking;
pub mod report;
pub mod tv;

pub use community::{Community, CommunitySet, SetKind};
pub use error::Error;
pub use graph::{Graph, GraphStats, NodeId};
pub use pairing::{ComparablePair, PairAssignment};
pub use ranking::{AtvGrid, RankTable};
pub use tv::{PairTv, SetTv, TvMatrix};

pub type Result<T> = std::result::Result<T, Error>;
