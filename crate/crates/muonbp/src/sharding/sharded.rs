use crate::error::{Error, Result};
use crate::sharding::{BlockPartition, ShardLayout};
use crate::tensor::Matrix;

/// A matrix distributed across virtual devices under a [`ShardLayout`].
///
/// Device ids are dense integers `0..world_size` in row-major block
/// order (`device = i * c + j`), so gather/scatter are exact placement
/// with no arithmetic and round-trip bit-identically.
#[derive(Debug, Clone, PartialEq)]
pub struct ShardedTensor {
    layout: ShardLayout,
    rows: usize,
    cols: usize,
    shards: Vec<Matrix>,
}

impl ShardedTensor {
    /// Zero tensor of the given global shape.
    pub fn zeros(layout: ShardLayout, rows: usize, cols: usize) -> Result<Self> {
        scatter(&Matrix::zeros(rows, cols), layout)
    }

    pub fn layout(&self) -> ShardLayout {
        self.layout
    }

    pub fn global_shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn num_shards(&self) -> usize {
        self.shards.len()
    }

    pub fn shard(&self, device: usize) -> &Matrix {
        &self.shards[device]
    }

    pub fn shards(&self) -> &[Matrix] {
        &self.shards
    }

    pub fn partition(&self) -> BlockPartition {
        self.layout
            .induced_partition(self.rows, self.cols)
            .expect("layout validated at construction")
    }

    pub fn is_finite(&self) -> bool {
        self.shards.iter().all(|s| s.is_finite())
    }

    /// Apply `f` independently to every shard. The result does not
    /// depend on device iteration order because no shard reads another;
    /// `f` must preserve each shard's shape.
    pub fn per_shard_map(&self, f: impl Fn(&Matrix) -> Matrix) -> Result<ShardedTensor> {
        let mut shards = Vec::with_capacity(self.shards.len());
        for (device, shard) in self.shards.iter().enumerate() {
            let out = f(shard);
            if out.shape() != shard.shape() {
                return Err(Error::ShardShapeChanged {
                    device,
                    expected: shard.shape(),
                    got: out.shape(),
                });
            }
            shards.push(out);
        }
        Ok(ShardedTensor {
            layout: self.layout,
            rows: self.rows,
            cols: self.cols,
            shards,
        })
    }

    /// Shard-by-shard combination of two tensors with identical layout
    /// and shape (the momentum recursion runs through this).
    pub fn zip_shards(
        &self,
        other: &ShardedTensor,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<ShardedTensor> {
        self.check_compatible(other, "zip_shards")?;
        let shards = self
            .shards
            .iter()
            .zip(&other.shards)
            .map(|(a, b)| a.zip_map(b, &f))
            .collect();
        Ok(ShardedTensor {
            layout: self.layout,
            rows: self.rows,
            cols: self.cols,
            shards,
        })
    }

    pub fn check_compatible(&self, other: &ShardedTensor, context: &str) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::InvalidConfig(format!(
                "{context}: layouts differ ({} vs {})",
                self.layout, other.layout
            )));
        }
        if self.global_shape() != other.global_shape() {
            return Err(Error::ShapeMismatch {
                expected: self.global_shape(),
                got: other.global_shape(),
                context: context.into(),
            });
        }
        Ok(())
    }
}

/// Split a full matrix into device-resident shards.
pub fn scatter(x: &Matrix, layout: ShardLayout) -> Result<ShardedTensor> {
    layout.validate()?;
    let part = layout.induced_partition(x.rows(), x.cols())?;
    let shards = part
        .iter_blocks()
        .map(|(i, j)| part.extract(x, i, j))
        .collect();
    Ok(ShardedTensor {
        layout,
        rows: x.rows(),
        cols: x.cols(),
        shards,
    })
}

/// Reassemble the full matrix from its shards (exact inverse of
/// [`scatter`], bit for bit).
pub fn gather(s: &ShardedTensor) -> Matrix {
    let part = s.partition();
    part.assemble(&s.shards)
        .expect("shard shapes are maintained by construction")
}
