use super::{Edge, ReplacementGraph};
use crate::error::{Error, Result};
use crate::rule::Word;

/// The induced subgraph of the tiles inside `X_w`, with its identification
/// onto the lower-level graph by the shift.
#[derive(Clone, Debug)]
pub struct PrefixSubgraph {
    pub prefix: Word,
    /// First vertex of the block; the block is contiguous in index order.
    pub start: usize,
    pub len: usize,
    /// Induced edges, relabelled by `u ↦ u - start` (the shift `σ^k`).
    pub edges: Vec<Edge>,
}

impl PrefixSubgraph {
    pub fn vertices(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len
    }
}

/// Induced subgraph on the words with prefix `w`, checked to be isomorphic
/// to a freshly built `G_{n-k}`.
pub fn prefix_subgraph(g: &ReplacementGraph, w: &Word) -> Result<PrefixSubgraph> {
    let k = w.len() as u32;
    if k >= g.level() {
        return Err(Error::domain(format!(
            "prefix {w} is not shorter than the graph level {}",
            g.level()
        )));
    }
    let lower = ReplacementGraph::build_with(g.level() - k, g.alphabet(), g.policy())?;
    prefix_subgraph_onto(g, w, &lower)
}

/// As [`prefix_subgraph`] but checks against an already built lower graph.
pub fn prefix_subgraph_onto(
    g: &ReplacementGraph,
    w: &Word,
    lower: &ReplacementGraph,
) -> Result<PrefixSubgraph> {
    let k = w.len() as u32;
    if k >= g.level() || lower.level() != g.level() - k {
        return Err(Error::domain(format!(
            "prefix {w} does not take level {} to level {}",
            g.level(),
            lower.level()
        )));
    }
    let p = w.index(g.alphabet()).ok_or_else(|| {
        Error::domain(format!("{w} uses letters outside the {} alphabet", g.alphabet().name()))
    })?;
    let len = lower.vertex_count();
    let start = p * len;
    let end = start + len;
    let mut edges = Vec::new();
    for u in start..end {
        for &(v, kind) in g.neighbors(u) {
            let v = v as usize;
            if v > u && v < end {
                edges.push(Edge {
                    u: (u - start) as u32,
                    v: (v - start) as u32,
                    kind,
                });
            }
        }
    }
    edges.sort();
    if edges != lower.edges() {
        let missing = lower.edges().iter().find(|e| edges.binary_search(e).is_err());
        let extra = edges.iter().find(|e| lower.edges().binary_search(e).is_err());
        return Err(Error::Consistency(format!(
            "subgraph under prefix {w} is not isomorphic to G_{}: missing {missing:?}, extra {extra:?}",
            lower.level()
        )));
    }
    Ok(PrefixSubgraph {
        prefix: w.clone(),
        start,
        len,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::CentralEdgePolicy;
    use crate::rule::{Alphabet, Word};

    #[test]
    fn every_letter_prefix_at_level_two() {
        for policy in [CentralEdgePolicy::On, CentralEdgePolicy::Off] {
            let g = ReplacementGraph::build(2, policy).unwrap();
            let g1 = ReplacementGraph::build(1, policy).unwrap();
            for i in 0..10 {
                let w = Word::from_index(Alphabet::Pillow, 1, i);
                let sub = prefix_subgraph_onto(&g, &w, &g1).unwrap();
                assert_eq!(sub.len, 10);
                assert_eq!(sub.start, i * 10);
            }
        }
    }

    #[test]
    fn empty_prefix_is_identity() {
        let g = ReplacementGraph::build(2, CentralEdgePolicy::On).unwrap();
        let sub = prefix_subgraph(&g, &Word::empty());
        // the empty prefix has k = 0 < n, and maps G_2 onto itself
        let sub = sub.unwrap();
        assert_eq!(sub.start, 0);
        assert_eq!(sub.edges.as_slice(), g.edges());
    }

    #[test]
    fn too_long_prefix() {
        let g = ReplacementGraph::build(1, CentralEdgePolicy::On).unwrap();
        assert!(prefix_subgraph(&g, &"5".parse().unwrap()).is_err());
    }
}
