//! Relabeling-invariant node ordering for the sorted adjacency matrix.
//!
//! The order is produced by the group-partition traversal: the next node
//! always comes from the first group. Which member of the first group is
//! taken does change the resulting codelengths, so the choice is made
//! canonically:
//!
//! 1. only members with the largest color-refinement color are eligible;
//! 2. twins (nodes swapped by an automorphism that fixes everything else)
//!    are collapsed to one candidate;
//! 3. the remaining ties are searched and the branch whose sequence of group
//!    one-counts is lexicographically largest wins.
//!
//! The sequence of group one-counts determines the sorted matrix, so the
//! result is a canonical form. The search is capped by a work budget; past
//! it, ties fall to the lowest node id, which is still a valid order but may
//! no longer be invariant under relabeling.

use std::collections::HashMap;

use crate::graph::Graph;
use crate::partition::GroupPartition;

/// Search budget in member-visits.
const SEARCH_BUDGET: u64 = 40_000_000;

/// Stable color refinement (1-dimensional Weisfeiler–Leman) starting from
/// degrees. Colors are ranks of sorted signatures, hence invariant under
/// relabeling.
pub fn color_refinement(g: &Graph) -> Vec<u32> {
    let n = g.node_count();
    let mut colors: Vec<u32> = g.degrees().into_iter().map(|d| d as u32).collect();
    let mut classes = distinct(&colors);
    loop {
        let signatures: Vec<(u32, Vec<u32>)> = (0..n)
            .map(|v| {
                let mut around: Vec<u32> = g.neighbors(v).map(|u| colors[u]).collect();
                around.sort_unstable();
                (colors[v], around)
            })
            .collect();
        let mut sorted: Vec<&(u32, Vec<u32>)> = signatures.iter().collect();
        sorted.sort();
        sorted.dedup();
        let next: Vec<u32> = signatures
            .iter()
            .map(|s| sorted.binary_search(&s).unwrap() as u32)
            .collect();
        let next_classes = sorted.len();
        colors = next;
        if next_classes == classes {
            return colors;
        }
        classes = next_classes;
    }
}

fn distinct(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

struct Search<'g> {
    graph: &'g Graph,
    colors: Vec<u32>,
    best: Option<(Vec<u32>, Vec<usize>)>,
    work: u64,
}

impl Search<'_> {
    fn candidates(&self, first: &[usize]) -> Vec<usize> {
        let top = first.iter().map(|&u| self.colors[u]).max().unwrap();
        let mut tied: Vec<usize> = first.iter().copied().filter(|&u| self.colors[u] == top).collect();
        tied.sort_unstable();
        if tied.len() == 1 {
            return tied;
        }
        let mut seen: HashMap<Vec<u64>, ()> = HashMap::new();
        let mut kept = Vec::new();
        for u in tied {
            let open = self.graph.row(u).to_vec();
            let mut closed = open.clone();
            closed[u / 64] |= 1 << (u % 64);
            if seen.contains_key(&open) || seen.contains_key(&closed) {
                continue;
            }
            seen.insert(open, ());
            seen.insert(closed, ());
            kept.push(u);
        }
        kept
    }

    /// Codes `node` next. Returns false when the branch falls below the best
    /// sequence found so far.
    fn step(
        &mut self,
        part: &mut GroupPartition,
        node: usize,
        seq: &mut Vec<u32>,
        order: &mut Vec<usize>,
        ahead: &mut bool,
    ) -> bool {
        part.take(node).expect("candidate comes from the first group");
        let g = self.graph;
        for group in part.groups() {
            let ones = group.iter().filter(|&&u| g.has_edge(node, u)).count() as u32;
            if !*ahead {
                let best = &self.best.as_ref().expect("behind implies a best exists").0;
                match ones.cmp(&best[seq.len()]) {
                    std::cmp::Ordering::Less => return false,
                    std::cmp::Ordering::Greater => *ahead = true,
                    std::cmp::Ordering::Equal => {}
                }
            }
            seq.push(ones);
        }
        self.work += part.remaining() as u64 + 1;
        part.refine(|u| g.has_edge(node, u));
        order.push(node);
        true
    }

    /// `ahead` is true when the prefix `seq` already beats the best
    /// sequence, or no best exists yet; otherwise the prefix equals it.
    fn run(&mut self, mut part: GroupPartition, mut seq: Vec<u32>, mut order: Vec<usize>, mut ahead: bool) {
        loop {
            let Some(first) = part.first_group() else {
                if ahead {
                    self.best = Some((seq, order));
                }
                return;
            };
            let cands = self.candidates(first);
            if cands.len() == 1 {
                if !self.step(&mut part, cands[0], &mut seq, &mut order, &mut ahead) {
                    return;
                }
                continue;
            }
            for (i, &c) in cands.iter().enumerate() {
                if i > 0 && self.work > SEARCH_BUDGET {
                    break;
                }
                // After the first child returns, the best sequence shares
                // this prefix exactly.
                let mut child_ahead = if i == 0 { ahead } else { false };
                let (mut p, mut s, mut o) = (part.clone(), seq.clone(), order.clone());
                if self.step(&mut p, c, &mut s, &mut o, &mut child_ahead) {
                    self.run(p, s, o, child_ahead);
                }
            }
            return;
        }
    }
}

/// Node visitation order of the sorted adjacency matrix; see the module docs.
pub fn canonical_order(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    let mut search = Search { graph: g, colors: color_refinement(g), best: None, work: 0 };
    search.run(GroupPartition::new(n), Vec::new(), Vec::with_capacity(n), true);
    search.best.map(|(_, order)| order).unwrap_or_default()
}

/// The adjacency matrix reordered by [`canonical_order`].
pub fn sorted_matrix(g: &Graph) -> Graph {
    g.permuted(&canonical_order(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    #[test]
    fn trivial_graphs() {
        assert_eq!(sorted_matrix(&Graph::empty(6)), Graph::empty(6));
        assert_eq!(sorted_matrix(&Graph::complete(6)), Graph::complete(6));
        assert!(canonical_order(&Graph::empty(0)).is_empty());
        let order = canonical_order(&Graph::complete(40));
        assert_eq!(order.len(), 40);
    }

    #[test]
    fn invariant_under_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..100 {
            let n = rng.gen_range(1..=8);
            let g = random_graph(n, rng.gen_range(0.1..0.9), &mut rng);
            let reference = sorted_matrix(&g);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            assert_eq!(sorted_matrix(&g.relabeled(&perm)), reference, "trial {trial}: {g:?}");
        }
    }

    #[test]
    fn regular_but_not_transitive() {
        // C3 + C5: color refinement cannot split it, the search has to.
        let mut edges: Vec<(usize, usize)> = vec![(0, 1), (1, 2), (2, 0)];
        edges.extend((0..5).map(|i| (3 + i, 3 + (i + 1) % 5)));
        let g = Graph::from_edges(8, edges).unwrap();
        let reference = sorted_matrix(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let mut perm: Vec<usize> = (0..8).collect();
            perm.shuffle(&mut rng);
            assert_eq!(sorted_matrix(&g.relabeled(&perm)), reference);
        }
    }

    #[test]
    fn order_is_a_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = random_graph(60, 0.2, &mut rng);
        let mut order = canonical_order(&g);
        order.sort_unstable();
        assert_eq!(order, (0..60).collect::<Vec<_>>());
    }

    #[test]
    fn refinement_colors_are_invariant() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let c = color_refinement(&g);
        assert_eq!(c[0], c[4]);
        assert_eq!(c[1], c[3]);
        assert_ne!(c[0], c[2]);
    }
}
