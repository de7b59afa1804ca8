//! Enumeration of every vertex set that induces a connected subgraph.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex, VertexSet};

/// Default upper bound on the number of enumerated sets.
pub const DEFAULT_SET_CAP: usize = 5_000_000;

/// The family of connected vertex sets of a graph, ordered by cardinality.
///
/// Sets are stored as packed bitset blocks with a fixed stride. Within one
/// cardinality layer the sets are sorted by their blocks, so membership is a
/// binary search inside the layer.
#[derive(Clone, Debug)]
pub struct ConnectedSetIndex {
    n: usize,
    stride: usize,
    blocks: Vec<usize>,
    /// `layer_start[k]..layer_start[k + 1]` holds the sets of size `k`.
    layer_start: Vec<usize>,
}

impl ConnectedSetIndex {
    /// Number of vertices of the underlying graph.
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.blocks.len() / self.stride.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest cardinality present.
    pub fn max_size(&self) -> usize {
        self.layer_start.len().saturating_sub(2)
    }

    /// Index range of the sets with exactly `size` members.
    pub fn layer(&self, size: usize) -> std::ops::Range<usize> {
        if size + 1 >= self.layer_start.len() {
            let end = self.len();
            return end..end;
        }
        self.layer_start[size]..self.layer_start[size + 1]
    }

    pub(crate) fn blocks_of(&self, i: usize) -> &[usize] {
        &self.blocks[i * self.stride..(i + 1) * self.stride]
    }

    pub fn set(&self, i: usize) -> VertexSet {
        VertexSet::from_blocks(self.n, self.blocks_of(i))
    }

    pub fn size_of(&self, i: usize) -> usize {
        // layer_start is nondecreasing; find the layer containing i
        self.layer_start.partition_point(|&start| start <= i) - 1
    }

    pub fn contains_vertex(&self, i: usize, v: Vertex) -> bool {
        let bits = usize::BITS as usize;
        self.blocks_of(i)[v / bits] >> (v % bits) & 1 == 1
    }

    pub fn members(&self, i: usize) -> impl Iterator<Item = Vertex> + '_ {
        let bits = usize::BITS as usize;
        self.blocks_of(i)
            .iter()
            .enumerate()
            .flat_map(move |(b, &word)| {
                let mut w = word;
                std::iter::from_fn(move || {
                    if w == 0 {
                        return None;
                    }
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(b * bits + t)
                })
            })
    }

    /// Position of `s` in the index, or `None` when `s` is not a listed set.
    pub fn position(&self, s: &VertexSet) -> Option<usize> {
        if s.universe() != self.n {
            return None;
        }
        self.position_blocks(s.blocks(), s.len())
    }

    pub(crate) fn position_blocks(&self, blocks: &[usize], size: usize) -> Option<usize> {
        let range = self.layer(size);
        let (mut lo, mut hi) = (range.start, range.end);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            match self.blocks_of(mid).cmp(blocks) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexSet> + '_ {
        (0..self.len()).map(|i| self.set(i))
    }
}

struct Enumerator<'g> {
    graph: &'g Graph,
    max_size: usize,
    cap: usize,
    count: usize,
    layers: Vec<Vec<usize>>,
}

impl Enumerator<'_> {
    fn emit(&mut self, s: &FixedBitSet, size: usize) -> Result<()> {
        self.count += 1;
        if self.count > self.cap {
            return Err(Error::BudgetExceeded {
                count: self.count - 1,
                cap: self.cap,
            });
        }
        self.layers[size].extend_from_slice(s.as_slice());
        Ok(())
    }

    /// Emits `s` and every connected superset of it that avoids `excluded`.
    /// `cand` holds exactly the neighbors of `s` outside `s ∪ excluded`.
    fn extend(
        &mut self,
        s: &mut FixedBitSet,
        size: usize,
        mut cand: FixedBitSet,
        mut excluded: FixedBitSet,
    ) -> Result<()> {
        self.emit(s, size)?;
        if size == self.max_size {
            return Ok(());
        }
        while let Some(u) = cand.minimum() {
            cand.remove(u);
            let mut next = cand.clone();
            for &w in self.graph.neighbors(u) {
                if !s.contains(w) && !excluded.contains(w) {
                    next.insert(w);
                }
            }
            s.insert(u);
            self.extend(s, size + 1, next, excluded.clone())?;
            s.remove(u);
            excluded.insert(u);
        }
        Ok(())
    }
}

/// Lists every nonempty vertex set of size at most `max_size` that induces a
/// connected subgraph, each exactly once. Fails with
/// [`Error::BudgetExceeded`] once more than `cap` sets have been produced.
pub fn enumerate_connected_sets(
    g: &Graph,
    max_size: Option<usize>,
    cap: usize,
) -> Result<ConnectedSetIndex> {
    if cap == 0 {
        return Err(Error::invalid("set cap must be positive"));
    }
    let n = g.vertex_count();
    let max_size = max_size.unwrap_or(n).min(n);
    let mut en = Enumerator {
        graph: g,
        max_size,
        cap,
        count: 0,
        layers: vec![Vec::new(); max_size + 1],
    };
    if max_size > 0 {
        // Each set is generated from its smallest member; smaller ids are excluded.
        for root in 0..n {
            let mut s = FixedBitSet::with_capacity(n);
            s.insert(root);
            let mut excluded = FixedBitSet::with_capacity(n);
            excluded.insert_range(..root);
            let mut cand = FixedBitSet::with_capacity(n);
            for &w in g.neighbors(root) {
                if w > root {
                    cand.insert(w);
                }
            }
            en.extend(&mut s, 1, cand, excluded)?;
        }
    }

    let stride = n.div_ceil(usize::BITS as usize).max(1);
    let mut blocks = Vec::with_capacity(en.count * stride);
    let mut layer_start = Vec::with_capacity(max_size + 2);
    for layer in en.layers {
        layer_start.push(blocks.len() / stride);
        let mut chunks: Vec<&[usize]> = layer.chunks_exact(stride).collect();
        chunks.sort_unstable();
        for chunk in chunks {
            blocks.extend_from_slice(chunk);
        }
    }
    layer_start.push(blocks.len() / stride);
    Ok(ConnectedSetIndex {
        n,
        stride,
        blocks,
        layer_start,
    })
}
