//! Lazily evaluated universal structures built by adding witnesses stage by stage.

pub mod limit;
pub mod oracle;
pub mod schedule;
pub mod stage;

pub use limit::{limit, LazyLimit, ResolvedItem, ScheduleMode, StagePlan, MATERIALIZE_LIMIT, SEARCH_BUDGET};
pub use oracle::{lazy_delta, AcOracle, DeltaOracle, IndexRule, Requirement};
pub use schedule::{Item, SubsetFamily, TripleFamily, MAX_RANKED};
pub use stage::{eager_stages, witness_stage, Schedule, StageOutput};
