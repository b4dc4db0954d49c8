//! Per-node structural measures and whole-network summary statistics.

use std::fmt;
use std::str::FromStr;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Number of measures tracked per node.
pub const MEASURE_COUNT: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    InDegree,
    OutDegree,
    Degree,
    Clustering,
}

impl Measure {
    pub const ALL: [Measure; MEASURE_COUNT] = [
        Measure::InDegree,
        Measure::OutDegree,
        Measure::Degree,
        Measure::Clustering,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::InDegree => "indegree",
            Measure::OutDegree => "outdegree",
            Measure::Degree => "degree",
            Measure::Clustering => "clustering",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownMeasure(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeMeasures {
    pub node: NodeId,
    pub indegree: usize,
    pub outdegree: usize,
    pub degree: usize,
    pub clustering: f64,
    /// Min-max normalized values, in [`Measure::ALL`] order.
    pub normalized: [f64; MEASURE_COUNT],
    /// Sum of `normalized`.
    pub nm: f64,
}

impl NodeMeasures {
    pub fn raw(&self, measure: Measure) -> f64 {
        match measure {
            Measure::InDegree => self.indegree as f64,
            Measure::OutDegree => self.outdegree as f64,
            Measure::Degree => self.degree as f64,
            Measure::Clustering => self.clustering,
        }
    }

    pub fn raw_values(&self) -> [f64; MEASURE_COUNT] {
        Measure::ALL.map(|m| self.raw(m))
    }
}

/// Raw measures for every node, in ascending node-id order. The normalized
/// fields are left at zero.
pub fn compute_node_measures(g: &Graph) -> Vec<NodeMeasures> {
    let one = |v: usize| {
        let indegree = g.in_at(v).len();
        let outdegree = g.out_at(v).len();
        NodeMeasures {
            node: g.id_at(v),
            indegree,
            outdegree,
            degree: indegree + outdegree,
            clustering: clustering_at(g, v),
            normalized: [0.0; MEASURE_COUNT],
            nm: 0.0,
        }
    };
    #[cfg(feature = "parallel")]
    {
        (0..g.node_count()).into_par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..g.node_count()).map(one).collect()
    }
}

/// Local clustering coefficient on the undirected projection of `g`.
pub fn local_clustering(g: &Graph, node: NodeId) -> Result<f64> {
    Ok(clustering_at(g, g.idx(node)?))
}

fn clustering_at(g: &Graph, v: usize) -> f64 {
    let nb = g.neighbors_at(v);
    let k = nb.len();
    if k < 2 {
        return 0.0;
    }
    let mut links = 0usize;
    for (i, &a) in nb.iter().enumerate() {
        // count b in nb[i+1..] adjacent to a; both lists are sorted
        links += sorted_intersection_count(&nb[i + 1..], g.neighbors_at(a));
    }
    links as f64 / (k * (k - 1) / 2) as f64
}

fn sorted_intersection_count(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub reciprocal_fraction: f64,
    pub avg_indegree: f64,
    pub avg_outdegree: f64,
    pub avg_degree: f64,
    pub avg_clustering: f64,
}

pub fn summary_stats(g: &Graph) -> SummaryStats {
    let n = g.node_count();
    let e = g.edge_count();
    let reciprocal = (0..n)
        .map(|s| {
            g.out_at(s)
                .iter()
                .filter(|&&t| g.out_at(t).binary_search(&s).is_ok())
                .count()
        })
        .sum::<usize>();
    let ratio = |num: f64, den: usize| if den == 0 { 0.0 } else { num / den as f64 };
    let clustering_sum: f64 = compute_node_measures(g).iter().map(|m| m.clustering).sum();
    SummaryStats {
        node_count: n,
        edge_count: e,
        reciprocal_fraction: ratio(reciprocal as f64, e),
        avg_indegree: ratio(e as f64, n),
        avg_outdegree: ratio(e as f64, n),
        avg_degree: ratio(2.0 * e as f64, n),
        avg_clustering: ratio(clustering_sum, n),
    }
}

impl fmt::Display for SummaryStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "node_count {}", self.node_count)?;
        writeln!(f, "edge_count {}", self.edge_count)?;
        writeln!(f, "reciprocal_fraction {:.4}", self.reciprocal_fraction)?;
        writeln!(f, "avg_indegree {:.4}", self.avg_indegree)?;
        writeln!(f, "avg_outdegree {:.4}", self.avg_outdegree)?;
        writeln!(f, "avg_degree {:.4}", self.avg_degree)?;
        write!(f, "avg_clustering {:.4}", self.avg_clustering)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_edge_list;

    fn measures_of(g: &Graph, id: u64) -> NodeMeasures {
        compute_node_measures(g)
            .into_iter()
            .find(|m| m.node == NodeId(id))
            .unwrap()
    }

    #[test]
    fn reciprocal_triangle() {
        let g = Graph::from_edges([(1u64, 2u64), (2, 1), (2, 3), (3, 2), (1, 3), (3, 1)]);
        for m in compute_node_measures(&g) {
            assert_eq!((m.indegree, m.outdegree, m.degree), (2, 2, 4));
            assert_eq!(m.clustering, 1.0);
        }
    }

    #[test]
    fn isolated_node_is_zero() {
        let mut b = crate::graph::GraphBuilder::new();
        b.add_node(NodeId(7));
        b.add_edge(NodeId(1), NodeId(2));
        let g = b.build();
        let m = measures_of(&g, 7);
        assert_eq!((m.indegree, m.outdegree, m.degree), (0, 0, 0));
        assert_eq!(m.clustering, 0.0);
    }

    #[test]
    fn directed_path_middle() {
        let g = Graph::from_edges([(1u64, 2u64), (2, 3)]);
        let m = measures_of(&g, 2);
        assert_eq!((m.indegree, m.outdegree, m.degree), (1, 1, 2));
        assert_eq!(m.clustering, 0.0);
    }

    #[test]
    fn clustering_examples() {
        let tri = Graph::from_edges([(1u64, 2u64), (2, 3), (3, 1)]);
        assert_eq!(local_clustering(&tri, NodeId(1)).unwrap(), 1.0);

        let star = Graph::from_edges([(0u64, 1u64), (0, 2), (3, 0), (0, 4)]);
        assert_eq!(local_clustering(&star, NodeId(0)).unwrap(), 0.0);

        let chorded = Graph::from_edges([(1u64, 2u64), (2, 3), (3, 4), (4, 1), (1, 3)]);
        assert_eq!(local_clustering(&chorded, NodeId(2)).unwrap(), 1.0);
        // node 1: neighbours {2,3,4}, links 2-3 and 3-4
        assert!((local_clustering(&chorded, NodeId(1)).unwrap() - 2.0 / 3.0).abs() < 1e-15);

        assert!(matches!(
            local_clustering(&tri, NodeId(9)),
            Err(Error::NodeNotFound(_))
        ));
    }

    #[test]
    fn summary_of_three_edge_example() {
        let g = load_edge_list("1 2\n2 1\n2 3").unwrap().graph;
        let s = summary_stats(&g);
        assert_eq!(s.node_count, 3);
        assert_eq!(s.edge_count, 3);
        assert!((s.reciprocal_fraction - 0.6667).abs() < 1e-4);
        assert!((s.avg_indegree - 1.0).abs() < 1e-12);
        assert!((s.avg_degree - 2.0).abs() < 1e-12);
    }

    #[test]
    fn summary_of_degenerate_graphs() {
        let mut b = crate::graph::GraphBuilder::new();
        b.add_node(NodeId(1));
        let s = summary_stats(&b.build());
        assert_eq!(s.node_count, 1);
        assert_eq!(s.avg_indegree, 0.0);
        assert_eq!(s.avg_degree, 0.0);
        assert_eq!(s.avg_clustering, 0.0);
        assert_eq!(s.reciprocal_fraction, 0.0);

        let s = summary_stats(&Graph::empty());
        assert_eq!(s.avg_degree, 0.0);
    }

    #[test]
    fn measure_names_parse() {
        for m in Measure::ALL {
            assert_eq!(m.name().parse::<Measure>().unwrap(), m);
        }
        assert!("betweenness".parse::<Measure>().is_err());
    }
}
