use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Result;
use crate::sharding::BlockPartition;

/// How a tensor is placed across virtual devices.
///
/// Each layout induces a block grid on the tensor: blocks are defined to
/// coincide with device-resident shards, so block-local work never needs
/// cross-device traffic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShardLayout {
    /// No parallelism; one device holds the whole tensor.
    Single,
    /// Megatron-style column-parallel split: `c` devices each hold an
    /// `m x (n/c)` shard.
    ColumnParallel(usize),
    /// Row-parallel split: `r` devices each hold an `(m/r) x n` shard.
    RowParallel(usize),
    /// 2D grid of `r x c` rectangular shards.
    Grid(usize, usize),
    /// Contiguous slices along the first dimension (FSDP2-style dim-0
    /// sharding); same induced partition as row-parallel.
    Dim0(usize),
}

impl ShardLayout {
    /// Induced block grid dimensions `(r, c)`.
    pub fn grid_dims(&self) -> (usize, usize) {
        match *self {
            ShardLayout::Single => (1, 1),
            ShardLayout::ColumnParallel(c) => (1, c),
            ShardLayout::RowParallel(r) => (r, 1),
            ShardLayout::Grid(r, c) => (r, c),
            ShardLayout::Dim0(r) => (r, 1),
        }
    }

    /// Number of devices, equal to the number of blocks.
    pub fn world_size(&self) -> usize {
        let (r, c) = self.grid_dims();
        r * c
    }

    /// The deterministic partition this layout induces on an
    /// `rows x cols` tensor. Uneven divisions are rejected with the
    /// offending axis named.
    pub fn induced_partition(&self, rows: usize, cols: usize) -> Result<BlockPartition> {
        let (r, c) = self.grid_dims();
        BlockPartition::uniform(rows, cols, r, c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.world_size() == 0 {
            return Err(crate::error::Error::InvalidConfig(
                "shard layout degree must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

impl fmt::Display for ShardLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ShardLayout::Single => write!(f, "none"),
            ShardLayout::ColumnParallel(c) => write!(f, "column_parallel({c})"),
            ShardLayout::RowParallel(r) => write!(f, "row_parallel({r})"),
            ShardLayout::Grid(r, c) => write!(f, "grid({r},{c})"),
            ShardLayout::Dim0(r) => write!(f, "dim0({r})"),
        }
    }
}

impl FromStr for ShardLayout {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s == "none" {
            return Ok(ShardLayout::Single);
        }
        let (kind, args) = s
            .split_once('(')
            .and_then(|(k, rest)| rest.strip_suffix(')').map(|a| (k.trim(), a)))
            .ok_or_else(|| format!("unrecognized shard layout '{s}'"))?;
        let nums: Vec<usize> = args
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| format!("bad layout degree in '{s}': {e}"))?;
        match (kind, nums.as_slice()) {
            ("column_parallel", [c]) => Ok(ShardLayout::ColumnParallel(*c)),
            ("row_parallel", [r]) => Ok(ShardLayout::RowParallel(*r)),
            ("grid", [r, c]) => Ok(ShardLayout::Grid(*r, *c)),
            ("dim0", [r]) => Ok(ShardLayout::Dim0(*r)),
            _ => Err(format!("unrecognized shard layout '{s}'")),
        }
    }
}

impl Serialize for ShardLayout {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ShardLayout {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}
