use crate::error::{Error, Result};
use crate::tensor::Matrix;

/// An `r x c` tiling of an `m x n` matrix into contiguous blocks.
///
/// Stored as full boundary lists `[0, ..., rows]` / `[0, ..., cols]`,
/// strictly increasing, so the blocks tile the matrix exactly with no
/// overlap. `r = c = 1` means "no blocking".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    row_bounds: Vec<usize>,
    col_bounds: Vec<usize>,
}

impl BlockPartition {
    /// The trivial single-block partition.
    pub fn single(rows: usize, cols: usize) -> Self {
        Self {
            row_bounds: vec![0, rows],
            col_bounds: vec![0, cols],
        }
    }

    /// Uniform `r x c` grid; both dimensions must divide evenly.
    pub fn uniform(rows: usize, cols: usize, r: usize, c: usize) -> Result<Self> {
        if r == 0 || rows % r != 0 {
            return Err(Error::UnevenSharding {
                axis: "row",
                dim: rows,
                degree: r,
            });
        }
        if c == 0 || cols % c != 0 {
            return Err(Error::UnevenSharding {
                axis: "column",
                dim: cols,
                degree: c,
            });
        }
        let rb = (0..=r).map(|i| i * (rows / r)).collect();
        let cb = (0..=c).map(|j| j * (cols / c)).collect();
        Ok(Self {
            row_bounds: rb,
            col_bounds: cb,
        })
    }

    /// Build from interior cut positions (exclusive of 0 and the full
    /// dimension), e.g. `row_cuts = [2, 5]` on 8 rows gives blocks of
    /// heights 2, 3, 3.
    pub fn from_cuts(
        rows: usize,
        cols: usize,
        row_cuts: &[usize],
        col_cuts: &[usize],
    ) -> Result<Self> {
        fn bounds(dim: usize, cuts: &[usize], axis: &'static str) -> Result<Vec<usize>> {
            let mut b = Vec::with_capacity(cuts.len() + 2);
            b.push(0);
            b.extend_from_slice(cuts);
            b.push(dim);
            for w in b.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::PartitionMismatch {
                        axis,
                        detail: format!("cuts {cuts:?} not strictly increasing inside (0, {dim})"),
                    });
                }
            }
            Ok(b)
        }
        Ok(Self {
            row_bounds: bounds(rows, row_cuts, "row")?,
            col_bounds: bounds(cols, col_cuts, "column")?,
        })
    }

    pub fn rows(&self) -> usize {
        *self.row_bounds.last().unwrap()
    }

    pub fn cols(&self) -> usize {
        *self.col_bounds.last().unwrap()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    /// Number of row blocks `r`.
    pub fn num_row_blocks(&self) -> usize {
        self.row_bounds.len() - 1
    }

    /// Number of column blocks `c`.
    pub fn num_col_blocks(&self) -> usize {
        self.col_bounds.len() - 1
    }

    pub fn num_blocks(&self) -> usize {
        self.num_row_blocks() * self.num_col_blocks()
    }

    pub fn is_trivial(&self) -> bool {
        self.num_blocks() == 1
    }

    /// Row/column range of block `(i, j)` as `(r0, r1, c0, c1)`.
    pub fn block_range(&self, i: usize, j: usize) -> (usize, usize, usize, usize) {
        (
            self.row_bounds[i],
            self.row_bounds[i + 1],
            self.col_bounds[j],
            self.col_bounds[j + 1],
        )
    }

    pub fn block_shape(&self, i: usize, j: usize) -> (usize, usize) {
        let (r0, r1, c0, c1) = self.block_range(i, j);
        (r1 - r0, c1 - c0)
    }

    /// True when every block has the same shape.
    pub fn is_uniform(&self) -> bool {
        let first = self.block_shape(0, 0);
        self.iter_blocks().all(|(i, j)| self.block_shape(i, j) == first)
    }

    /// Block indices in row-major order, matching device-id order.
    pub fn iter_blocks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let c = self.num_col_blocks();
        (0..self.num_blocks()).map(move |d| (d / c, d % c))
    }

    /// Check that this partition tiles `x` exactly.
    pub fn check_matches(&self, x: &Matrix, context: &str) -> Result<()> {
        if self.shape() != x.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                got: x.shape(),
                context: context.into(),
            });
        }
        Ok(())
    }

    /// Copy out block `(i, j)` of `x`. Caller must have validated shapes.
    pub fn extract(&self, x: &Matrix, i: usize, j: usize) -> Matrix {
        let (r0, r1, c0, c1) = self.block_range(i, j);
        x.submatrix(r0, r1, c0, c1)
    }

    /// Assemble a full matrix from per-block values in row-major block
    /// order (the inverse of extracting every block).
    pub fn assemble(&self, blocks: &[Matrix]) -> Result<Matrix> {
        if blocks.len() != self.num_blocks() {
            return Err(Error::PartitionMismatch {
                axis: "block",
                detail: format!(
                    "expected {} blocks, got {}",
                    self.num_blocks(),
                    blocks.len()
                ),
            });
        }
        let mut out = Matrix::zeros(self.rows(), self.cols());
        for (d, (i, j)) in self.iter_blocks().enumerate() {
            let (r0, _, c0, _) = self.block_range(i, j);
            if blocks[d].shape() != self.block_shape(i, j) {
                return Err(Error::ShapeMismatch {
                    expected: self.block_shape(i, j),
                    got: blocks[d].shape(),
                    context: format!("assemble block ({i}, {j})"),
                });
            }
            out.set_submatrix(r0, c0, &blocks[d]);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_shapes() {
        let p = BlockPartition::uniform(6, 9, 2, 3).unwrap();
        assert_eq!(p.num_blocks(), 6);
        for (i, j) in p.iter_blocks() {
            assert_eq!(p.block_shape(i, j), (3, 3));
        }
        assert!(p.is_uniform());
    }

    #[test]
    fn uneven_rejected_with_axis() {
        let err = BlockPartition::uniform(6, 9, 4, 3).unwrap_err();
        assert!(matches!(err, Error::UnevenSharding { axis: "row", .. }));
        let err = BlockPartition::uniform(6, 9, 2, 4).unwrap_err();
        assert!(matches!(err, Error::UnevenSharding { axis: "column", .. }));
    }

    #[test]
    fn cuts_validation() {
        assert!(BlockPartition::from_cuts(8, 4, &[2, 5], &[]).is_ok());
        assert!(BlockPartition::from_cuts(8, 4, &[5, 2], &[]).is_err());
        assert!(BlockPartition::from_cuts(8, 4, &[8], &[]).is_err());
    }

    #[test]
    fn extract_assemble_round_trip() {
        let x = Matrix::from_fn(6, 4, |i, j| (i * 4 + j) as f64);
        let p = BlockPartition::uniform(6, 4, 3, 2).unwrap();
        let blocks: Vec<Matrix> = p.iter_blocks().map(|(i, j)| p.extract(&x, i, j)).collect();
        assert_eq!(p.assemble(&blocks).unwrap(), x);
    }

    #[test]
    fn single_block_is_trivial() {
        let p = BlockPartition::single(5, 7);
        assert!(p.is_trivial());
        assert_eq!(p.block_shape(0, 0), (5, 7));
    }
}
