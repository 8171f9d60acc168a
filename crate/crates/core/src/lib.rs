//! Bucket elimination over discrete graphical models.
//!
//! The crate answers belief updating, most probable explanation (MPE),
//! maximum a-posteriori hypothesis (MAP) and maximum expected utility (MEU)
//! queries by processing an ordered partition of functions, one bucket per
//! variable. It also provides a conditioning hybrid that trades time for
//! space, directional resolution for CNF theories, and brute-force oracles for
//! every query.
//!
//! Runnable walkthroughs live in the `examples/` directory of this crate.

pub mod bucket;
pub mod cli;
pub mod engines;
pub mod error;
pub mod factor;
pub mod fixtures;
pub mod graph;
pub mod model;
pub mod oracle;
pub mod resolution;

pub use bucket::{BucketSchedule, TraceEntry};
pub use engines::{elim_bel, elim_cond_max, elim_map, elim_max, elim_meu, CondOptions, QueryKind, QueryResult};
pub use error::{Error, Result};
pub use factor::{ArgTable, DiscreteFactor, Elimination};
pub use graph::{GraphView, Ordering, OrderingKind, WidthReport};
pub use model::{BeliefNetwork, CnfTheory, Evidence, InfluenceDiagram, Variable};
pub use resolution::{directional_resolution, generate_model, DirectionalExtension};
