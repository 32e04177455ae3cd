//! The item neighbour graph: two items are neighbours when they cover at
//! least one common element.

use serde::Serialize;
use thiserror::Error;

use crate::instance::Instance;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("empty instance")]
    EmptyInstance,
}

/// Symmetric, irreflexive adjacency over items. Lists are ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighbourGraph {
    adj: Vec<Vec<usize>>,
}

impl NeighbourGraph {
    /// Builds the graph by pairing the items that cover each element.
    pub fn build(inst: &Instance) -> Self {
        let n = inst.n();
        // mark[i'] == i + 1 once i' has been recorded as a neighbour of i
        let mut mark = vec![0usize; n];
        let mut adj = Vec::with_capacity(n);
        for i in 0..n {
            let stamp = i + 1;
            mark[i] = stamp;
            let mut list = Vec::new();
            for &j in inst.cover(i) {
                for &other in inst.covered_by(j) {
                    if mark[other] != stamp {
                        mark[other] = stamp;
                        list.push(other);
                    }
                }
            }
            list.sort_unstable();
            adj.push(list);
        }
        NeighbourGraph { adj }
    }

    pub fn neighbours(&self, item: usize) -> &[usize] {
        &self.adj[item]
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    /// Sum of neighbour list lengths (twice the number of edges).
    pub fn degree_sum(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }
}

/// Structural statistics of an instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceStats {
    pub n: usize,
    pub m: usize,
    pub edges: usize,
    /// Realized density of the incidence matrix.
    pub alpha: f64,
    /// Probability that two random items share an element, `1 - (1 - alpha^2)^m`.
    pub sigma: f64,
    pub mean_gamma: f64,
    pub max_gamma: usize,
}

pub fn instance_stats(inst: &Instance) -> Result<InstanceStats, StatsError> {
    instance_stats_with(inst, &NeighbourGraph::build(inst))
}

/// Same as [`instance_stats`] but reuses an already built graph.
pub fn instance_stats_with(
    inst: &Instance,
    graph: &NeighbourGraph,
) -> Result<InstanceStats, StatsError> {
    let (n, m) = (inst.n(), inst.m());
    if n == 0 || m == 0 {
        return Err(StatsError::EmptyInstance);
    }
    let edges = inst.edge_count();
    let alpha = edges as f64 / (n as f64 * m as f64);
    let sigma = 1.0 - (1.0 - alpha * alpha).powf(m as f64);
    Ok(InstanceStats {
        n,
        m,
        edges,
        alpha,
        sigma,
        mean_gamma: graph.degree_sum() as f64 / n as f64,
        max_gamma: (0..n).map(|i| graph.neighbours(i).len()).max().unwrap_or(0),
    })
}


#[cfg(test)]
mod tests {
    use super::fixtures::six_items;
    use super::*;
    use crate::instance::fixtures::instance_x;

    fn one_based(g: &NeighbourGraph) -> Vec<Vec<usize>> {
        (0..g.len())
            .map(|i| g.neighbours(i).iter().map(|j| j + 1).collect())
            .collect()
    }

    #[test]
    fn six_item_neighbours() {
        let g = NeighbourGraph::build(&six_items());
        assert_eq!(
            one_based(&g),
            vec![
                vec![2, 6],
                vec![1, 3, 6],
                vec![2, 4],
                vec![3],
                vec![6],
                vec![1, 2, 5]
            ]
        );
    }

    #[test]
    fn instance_x_neighbours() {
        let g = NeighbourGraph::build(&instance_x());
        assert_eq!(one_based(&g), vec![vec![2], vec![1, 3], vec![2]]);
    }

    #[test]
    fn disjoint_covers() {
        let inst = Instance::new(5, vec![1; 3], vec![1; 3], vec![vec![0], vec![1], vec![2]]).unwrap();
        let g = NeighbourGraph::build(&inst);
        assert!((0..3).all(|i| g.neighbours(i).is_empty()));
    }

    #[test]
    fn stats_instance_x() {
        let s = instance_stats(&instance_x()).unwrap();
        assert!((s.alpha - 5.0 / 9.0).abs() < 1e-12);
        let expected_sigma = 1.0 - (1.0 - 25.0f64 / 81.0).powi(3);
        assert!((s.sigma - expected_sigma).abs() < 1e-12);
        assert!((s.mean_gamma - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.max_gamma, 2);
    }

    #[test]
    fn stats_extremes() {
        let full = Instance::new(1, vec![1; 2], vec![1; 3], vec![vec![0, 1, 2]; 2]).unwrap();
        let s = instance_stats(&full).unwrap();
        assert_eq!((s.alpha, s.sigma), (1.0, 1.0));

        let none = Instance::new(1, vec![1; 2], vec![1; 3], vec![vec![]; 2]).unwrap();
        let s = instance_stats(&none).unwrap();
        assert_eq!((s.alpha, s.sigma), (0.0, 0.0));

        let empty = Instance::new(1, vec![], vec![1], vec![]).unwrap();
        assert_eq!(instance_stats(&empty), Err(StatsError::EmptyInstance));
    }
}
