//! Block partitions, shard layouts for the model-parallel regimes, and
//! gather/scatter between full matrices and device-resident shards.

mod layout;
mod partition;
mod sharded;

pub use layout::ShardLayout;
pub use partition::BlockPartition;
pub use sharded::{gather, scatter, ShardedTensor};
