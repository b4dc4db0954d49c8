//! Whole-network reference profile shared read-only by every sampling run.

use std::collections::HashMap;

use crate::distribution::{
    apply_normalization, compute_bounds, histogram_counts, Distribution, NormalizationBounds,
};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::measures::{compute_node_measures, Measure, NodeMeasures, MEASURE_COUNT};

/// Measures, normalization bounds and reference distributions of a graph.
#[derive(Clone, Debug)]
pub struct NetworkProfile {
    measures: Vec<NodeMeasures>,
    index: HashMap<NodeId, usize>,
    bounds: NormalizationBounds,
    reference: Vec<Distribution>,
    bins: usize,
    avg_degree: f64,
}

impl NetworkProfile {
    pub fn new(graph: &Graph, bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::config("histogram needs at least one bin"));
        }
        let mut measures = compute_node_measures(graph);
        let bounds = compute_bounds(&measures)?;
        apply_normalization(&mut measures, &bounds);
        let reference = Measure::ALL
            .iter()
            .map(|m| {
                let counts =
                    histogram_counts(measures.iter().map(|r| r.normalized[m.index()]), bins);
                Distribution::from_counts(&counts)
            })
            .collect();
        let index = measures
            .iter()
            .enumerate()
            .map(|(i, r)| (r.node, i))
            .collect();
        let avg_degree = 2.0 * graph.edge_count() as f64 / graph.node_count() as f64;
        Ok(NetworkProfile {
            measures,
            index,
            bounds,
            reference,
            bins,
            avg_degree,
        })
    }

    pub fn node_count(&self) -> usize {
        self.measures.len()
    }

    /// Node records in ascending id order, normalized fields filled.
    pub fn measures(&self) -> &[NodeMeasures] {
        &self.measures
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.measures.iter().map(|m| m.node)
    }

    pub fn get(&self, node: NodeId) -> Result<&NodeMeasures> {
        self.index
            .get(&node)
            .map(|&i| &self.measures[i])
            .ok_or(Error::NodeNotFound(node))
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.index.contains_key(&node)
    }

    pub fn bounds(&self) -> &NormalizationBounds {
        &self.bounds
    }

    /// Reference distributions, in [`Measure::ALL`] order.
    pub fn reference(&self) -> &[Distribution] {
        &self.reference
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Mean total degree, 2E/N.
    pub fn avg_degree(&self) -> f64 {
        self.avg_degree
    }

    pub fn nm_values(&self) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.measures.iter().map(|m| (m.node, m.nm))
    }

    /// Sum of raw (unnormalized) measures per node.
    pub fn raw_aggregates(&self) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.measures
            .iter()
            .map(|m| (m.node, m.raw_values().iter().sum()))
    }

    /// Normalized values of the given nodes, grouped per measure.
    pub fn sample_values<'a>(
        &self,
        nodes: impl IntoIterator<Item = &'a NodeId>,
    ) -> Result<Vec<Vec<f64>>> {
        let mut values = vec![Vec::new(); MEASURE_COUNT];
        for node in nodes {
            let m = self.get(*node)?;
            for (col, v) in values.iter_mut().zip(m.normalized) {
                col.push(v);
            }
        }
        Ok(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_of_small_graph() {
        let g = Graph::from_edges([(1u64, 2u64), (2, 1), (2, 3), (3, 1)]);
        let p = NetworkProfile::new(&g, 4).unwrap();
        assert_eq!(p.node_count(), 3);
        assert_eq!(p.reference().len(), MEASURE_COUNT);
        for d in p.reference() {
            assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!((p.avg_degree() - 8.0 / 3.0).abs() < 1e-12);
        let m2 = p.get(NodeId(2)).unwrap();
        assert_eq!(m2.degree, 3);
        assert!((m2.nm - m2.normalized.iter().sum::<f64>()).abs() < 1e-15);
        assert!(NetworkProfile::new(&Graph::empty(), 4).is_err());
        assert!(NetworkProfile::new(&g, 0).is_err());
    }
}
