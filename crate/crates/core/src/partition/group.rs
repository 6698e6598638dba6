use crate::error::{Error, Result};

/// Ordered partition of the not-yet-coded nodes.
///
/// Members of one group have identical adjacency to every coded node. Groups
/// are ordered lexicographically by that shared pattern, a 1 sorting before a
/// 0, and empty groups are never kept.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupPartition {
    groups: Vec<Vec<usize>>,
}

impl GroupPartition {
    /// A single group holding nodes `0..n`.
    pub fn new(n: usize) -> Self {
        let groups = if n == 0 { Vec::new() } else { vec![(0..n).collect()] };
        Self { groups }
    }

    pub fn from_groups(groups: Vec<Vec<usize>>) -> Self {
        Self { groups: groups.into_iter().filter(|g| !g.is_empty()).collect() }
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Remaining node count.
    pub fn remaining(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn first_group(&self) -> Option<&[usize]> {
        self.groups.first().map(Vec::as_slice)
    }

    /// Removes and returns the lowest node id of the first group.
    pub fn select_next_node(&mut self) -> Result<usize> {
        let first = self
            .groups
            .first()
            .ok_or_else(|| Error::contract("select from an empty partition"))?;
        let node = *first.iter().min().unwrap();
        self.take(node)?;
        Ok(node)
    }

    /// Removes `node`, which must belong to the first group.
    pub fn take(&mut self, node: usize) -> Result<()> {
        let first = self
            .groups
            .first_mut()
            .ok_or_else(|| Error::contract("take from an empty partition"))?;
        let at = first
            .iter()
            .position(|&u| u == node)
            .ok_or_else(|| Error::contract(format!("node {node} is not in the first group")))?;
        first.remove(at);
        if first.is_empty() {
            self.groups.remove(0);
        }
        Ok(())
    }

    /// Splits every group into (neighbors, non-neighbors) of the node just
    /// coded, neighbors first, keeping member order inside each part.
    pub fn refine<F: Fn(usize) -> bool>(&mut self, is_neighbor: F) {
        let mut next = Vec::with_capacity(self.groups.len() * 2);
        for group in self.groups.drain(..) {
            let (hit, miss): (Vec<usize>, Vec<usize>) = group.into_iter().partition(|&u| is_neighbor(u));
            if !hit.is_empty() {
                next.push(hit);
            }
            if !miss.is_empty() {
                next.push(miss);
            }
        }
        self.groups = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_rules() {
        let mut p = GroupPartition::from_groups(vec![vec![5, 2, 9]]);
        assert_eq!(p.select_next_node().unwrap(), 2);
        assert_eq!(p.groups(), &[vec![5, 9]]);

        let mut p = GroupPartition::from_groups(vec![vec![7], vec![1, 3]]);
        assert_eq!(p.select_next_node().unwrap(), 7);
        assert_eq!(p.groups(), &[vec![1, 3]]);

        assert!(GroupPartition::new(0).select_next_node().is_err());
        assert!(GroupPartition::from_groups(vec![vec![1], vec![2]]).take(2).is_err());
    }

    #[test]
    fn refine_splits_neighbors_first() {
        let mut p = GroupPartition::new(9);
        p.refine(|u| u < 5);
        assert_eq!(p.sizes(), vec![5, 4]);
        p.refine(|u| u % 2 == 0);
        assert_eq!(p.groups(), &[vec![0, 2, 4], vec![1, 3], vec![6, 8], vec![5, 7]]);

        let before = p.clone();
        p.refine(|_| false);
        assert_eq!(p, before);
    }
}
