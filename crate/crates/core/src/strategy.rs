//! Target-set selection strategies.
//!
//! K-bins stratifies all nodes by their aggregated normalized measure into
//! equal-width bins and draws a size-proportional quota, at least one, from
//! every non-empty bin. The other strategies are baselines: uniform random,
//! lowest aggregated raw value first, and lowest value of a single measure.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distribution::bin_index;
use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::measures::{Measure, NodeMeasures, MEASURE_COUNT};
use crate::profile::NetworkProfile;

/// Default number of NM bins.
pub const DEFAULT_KBINS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Random,
    KBins,
    AggregateAscending,
    LowestMeasure(Measure),
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Random => f.write_str("random"),
            Strategy::KBins => f.write_str("kbins"),
            Strategy::AggregateAscending => f.write_str("agg-asc"),
            Strategy::LowestMeasure(m) => write!(f, "lowest:{m}"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Strategy::Random),
            "kbins" => Ok(Strategy::KBins),
            "agg-asc" => Ok(Strategy::AggregateAscending),
            _ => match s.strip_prefix("lowest:") {
                Some(m) => Ok(Strategy::LowestMeasure(m.parse()?)),
                None => Err(Error::UnknownStrategy(s.to_string())),
            },
        }
    }
}

/// Nodes requested in one stage.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TargetSet {
    pub nodes: BTreeSet<NodeId>,
}

impl TargetSet {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.nodes.contains(&node)
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().copied()
    }
}

impl FromIterator<NodeId> for TargetSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        TargetSet {
            nodes: iter.into_iter().collect(),
        }
    }
}

/// Uniform sample without replacement of `min(count, |pool|)` nodes.
pub fn select_random(pool: &[NodeId], count: usize, seed: u64) -> TargetSet {
    select_random_with(pool, count, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub(crate) fn select_random_with<R: Rng>(pool: &[NodeId], count: usize, rng: &mut R) -> TargetSet {
    let mut pool = pool.to_vec();
    // canonical order so the draw only depends on the pool's contents
    pool.sort_unstable();
    pool.dedup();
    let count = count.min(pool.len());
    let (chosen, _) = pool.partial_shuffle(rng, count);
    chosen.iter().copied().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KBinsConfig {
    pub k: usize,
    pub target_size: usize,
}

impl KBinsConfig {
    pub fn new(k: usize, target_size: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::config("kbins needs at least one bin"));
        }
        if target_size == 0 {
            return Err(Error::config("target size must be at least one"));
        }
        Ok(KBinsConfig { k, target_size })
    }
}

/// Per-bin quotas: `max(1, round(target_size * N_k / N))` for non-empty
/// bins, 0 for empty ones, rounding half up.
pub fn kbins_quotas(bin_sizes: &[usize], target_size: usize) -> Vec<usize> {
    let n: usize = bin_sizes.iter().sum();
    bin_sizes
        .iter()
        .map(|&nk| {
            if nk == 0 {
                0
            } else {
                let raw = target_size as f64 * nk as f64 / n as f64;
                ((raw + 0.5).floor() as usize).max(1)
            }
        })
        .collect()
}

/// NM stratification of every node, reusable across stages.
#[derive(Clone, Debug)]
pub struct KBinsIndex {
    // each bin sorted by (nm, id)
    bins: Vec<Vec<NodeId>>,
    upper: f64,
}

impl KBinsIndex {
    /// `upper` is the top of the NM domain (the number of measures).
    pub fn new(nm_per_node: impl IntoIterator<Item = (NodeId, f64)>, k: usize, upper: f64) -> Self {
        let mut entries: Vec<(f64, NodeId)> =
            nm_per_node.into_iter().map(|(id, nm)| (nm, id)).collect();
        entries.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut bins = vec![Vec::new(); k];
        for (nm, id) in entries {
            bins[bin_index(nm, upper, k)].push(id);
        }
        KBinsIndex { bins, upper }
    }

    pub fn from_profile(profile: &NetworkProfile, k: usize) -> Self {
        Self::new(profile.nm_values(), k, MEASURE_COUNT as f64)
    }

    pub fn bin_sizes(&self) -> Vec<usize> {
        self.bins.iter().map(Vec::len).collect()
    }

    pub fn bin_of_value(&self, nm: f64) -> usize {
        bin_index(nm, self.upper, self.bins.len())
    }

    /// Members of bin `k`, sorted by NM then id.
    pub fn members(&self, k: usize) -> &[NodeId] {
        &self.bins[k]
    }

    /// Per-call quotas with border-to-middle picks within each bin.
    pub fn select(&self, surveyed: &BTreeSet<NodeId>, target_size: usize) -> TargetSet {
        let mut unused = ChaCha8Rng::seed_from_u64(0);
        self.select_with(
            surveyed,
            target_size,
            WithinBin::BorderToMiddle,
            QuotaBasis::PerCall,
            &mut unused,
        )
    }

    /// `rng` is only drawn from by [`WithinBin::Random`].
    pub fn select_with<R: Rng>(
        &self,
        surveyed: &BTreeSet<NodeId>,
        target_size: usize,
        within: WithinBin,
        basis: QuotaBasis,
        rng: &mut R,
    ) -> TargetSet {
        let quotas: Vec<usize> = match basis {
            QuotaBasis::PerCall => kbins_quotas(&self.bin_sizes(), target_size),
            QuotaBasis::Cumulative => kbins_quotas(&self.bin_sizes(), surveyed.len() + target_size)
                .into_iter()
                .zip(&self.bins)
                .map(|(q, members)| {
                    let have = members.iter().filter(|id| surveyed.contains(id)).count();
                    q.saturating_sub(have)
                })
                .collect(),
        };
        let mut out = BTreeSet::new();
        for (members, quota) in self.bins.iter().zip(quotas) {
            if quota == 0 {
                continue;
            }
            match within {
                WithinBin::BorderToMiddle => out.extend(
                    border_to_middle(members)
                        .filter(|id| !surveyed.contains(id))
                        .take(quota),
                ),
                WithinBin::Stride => {
                    let open = unsurveyed(members, surveyed);
                    out.extend(evenly_spaced(&open, quota));
                }
                WithinBin::Random => {
                    let open = unsurveyed(members, surveyed);
                    out.extend(select_random_with(&open, quota, rng).iter());
                }
            }
        }
        TargetSet { nodes: out }
    }
}

fn unsurveyed(members: &[NodeId], surveyed: &BTreeSet<NodeId>) -> Vec<NodeId> {
    members
        .iter()
        .copied()
        .filter(|id| !surveyed.contains(id))
        .collect()
}

/// Midpoints of `count` equal rank slices of `items`.
fn evenly_spaced(items: &[NodeId], count: usize) -> impl Iterator<Item = NodeId> + '_ {
    let q = count.min(items.len());
    (0..q).map(move |i| items[(2 * i + 1) * items.len() / (2 * q)])
}

/// What a K-bins quota is computed for.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum QuotaBasis {
    /// Quotas for `target_size` new nodes, regardless of what is surveyed.
    PerCall,
    /// Quotas for the whole sample after this stage
    /// (`surveyed + target_size` nodes); each bin requests only its shortfall.
    #[default]
    Cumulative,
}

impl fmt::Display for QuotaBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuotaBasis::PerCall => "stage",
            QuotaBasis::Cumulative => "cumulative",
        })
    }
}

impl FromStr for QuotaBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stage" => Ok(QuotaBasis::PerCall),
            "cumulative" => Ok(QuotaBasis::Cumulative),
            _ => Err(Error::config(format!("unknown quota basis '{s}'"))),
        }
    }
}

/// How a bin's quota is drawn from its unsurveyed members, which are kept
/// sorted by NM.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WithinBin {
    /// Alternately from both ends toward the middle.
    BorderToMiddle,
    /// Evenly spaced ranks (the midpoints of `quota` equal slices).
    #[default]
    Stride,
    /// Uniformly at random.
    Random,
}

impl fmt::Display for WithinBin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WithinBin::BorderToMiddle => "border",
            WithinBin::Stride => "stride",
            WithinBin::Random => "random",
        })
    }
}

impl FromStr for WithinBin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "border" => Ok(WithinBin::BorderToMiddle),
            "stride" => Ok(WithinBin::Stride),
            "random" => Ok(WithinBin::Random),
            _ => Err(Error::config(format!("unknown within-bin order '{s}'"))),
        }
    }
}

/// Yields `items[0], items[n-1], items[1], items[n-2], ...`.
fn border_to_middle<T: Copy>(items: &[T]) -> impl Iterator<Item = T> + '_ {
    let n = items.len();
    (0..n).map(move |i| {
        if i % 2 == 0 {
            items[i / 2]
        } else {
            items[n - 1 - i / 2]
        }
    })
}

/// K-bins selection over NM values of all nodes in `[0, MEASURE_COUNT]`.
pub fn select_k_bins(
    nm_per_node: impl IntoIterator<Item = (NodeId, f64)>,
    surveyed: &BTreeSet<NodeId>,
    cfg: KBinsConfig,
) -> TargetSet {
    KBinsIndex::new(nm_per_node, cfg.k, MEASURE_COUNT as f64).select(surveyed, cfg.target_size)
}

/// Precomputed ascending order for the "lowest value first" baselines.
#[derive(Clone, Debug)]
pub struct AscendingOrder {
    order: Vec<NodeId>,
}

impl AscendingOrder {
    pub fn new(values: impl IntoIterator<Item = (NodeId, f64)>) -> Self {
        let mut entries: Vec<(f64, NodeId)> = values.into_iter().map(|(id, v)| (v, id)).collect();
        entries.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        AscendingOrder {
            order: entries.into_iter().map(|(_, id)| id).collect(),
        }
    }

    pub fn select(&self, surveyed: &BTreeSet<NodeId>, count: usize) -> TargetSet {
        self.order
            .iter()
            .copied()
            .filter(|id| !surveyed.contains(id))
            .take(count)
            .collect()
    }
}

/// The `count` unsurveyed nodes with the lowest aggregated raw value.
pub fn select_aggregate_ascending(
    aggregate_per_node: impl IntoIterator<Item = (NodeId, f64)>,
    surveyed: &BTreeSet<NodeId>,
    count: usize,
) -> TargetSet {
    AscendingOrder::new(aggregate_per_node).select(surveyed, count)
}

/// The `count` unsurveyed nodes with the lowest raw value of one measure.
pub fn select_lowest_measure(
    measure_id: &str,
    measures: &[NodeMeasures],
    surveyed: &BTreeSet<NodeId>,
    count: usize,
) -> Result<TargetSet> {
    let measure: Measure = measure_id.parse()?;
    Ok(
        AscendingOrder::new(measures.iter().map(|m| (m.node, m.raw(measure))))
            .select(surveyed, count),
    )
}

/// K-bins settings used inside the sampling loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KBinsMode {
    pub k: usize,
    pub within: WithinBin,
    pub basis: QuotaBasis,
}

impl Default for KBinsMode {
    fn default() -> Self {
        KBinsMode {
            k: DEFAULT_KBINS,
            within: WithinBin::default(),
            basis: QuotaBasis::default(),
        }
    }
}

/// A strategy bound to one network profile, with any ordering precomputed.
#[derive(Clone, Debug)]
pub enum Selector {
    Random {
        pool: Vec<NodeId>,
    },
    KBins {
        index: KBinsIndex,
        within: WithinBin,
        basis: QuotaBasis,
    },
    Ascending(AscendingOrder),
}

impl Selector {
    pub fn new(strategy: Strategy, profile: &NetworkProfile, kbins: KBinsMode) -> Self {
        match strategy {
            Strategy::Random => Selector::Random {
                pool: profile.node_ids().collect(),
            },
            Strategy::KBins => Selector::KBins {
                index: KBinsIndex::from_profile(profile, kbins.k),
                within: kbins.within,
                basis: kbins.basis,
            },
            Strategy::AggregateAscending => {
                Selector::Ascending(AscendingOrder::new(profile.raw_aggregates()))
            }
            Strategy::LowestMeasure(m) => Selector::Ascending(AscendingOrder::new(
                profile.measures().iter().map(|r| (r.node, r.raw(m))),
            )),
        }
    }

    pub fn select<R: Rng>(
        &self,
        surveyed: &BTreeSet<NodeId>,
        target_size: usize,
        rng: &mut R,
    ) -> TargetSet {
        match self {
            Selector::Random { pool } => {
                let eligible: Vec<NodeId> = pool
                    .iter()
                    .copied()
                    .filter(|id| !surveyed.contains(id))
                    .collect();
                select_random_with(&eligible, target_size, rng)
            }
            Selector::KBins {
                index,
                within,
                basis,
            } => index.select_with(surveyed, target_size, *within, *basis, rng),
            Selector::Ascending(order) => order.select(surveyed, target_size),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u64]) -> Vec<NodeId> {
        v.iter().copied().map(NodeId).collect()
    }

    fn set(v: &[u64]) -> BTreeSet<NodeId> {
        ids(v).into_iter().collect()
    }

    #[test]
    fn strategy_names() {
        for s in [
            "random",
            "kbins",
            "agg-asc",
            "lowest:indegree",
            "lowest:clustering",
        ] {
            assert_eq!(s.parse::<Strategy>().unwrap().to_string(), s);
        }
        assert!(matches!(
            "snowball".parse::<Strategy>(),
            Err(Error::UnknownStrategy(_))
        ));
        assert!(matches!(
            "lowest:pagerank".parse::<Strategy>(),
            Err(Error::UnknownMeasure(_))
        ));
    }

    #[test]
    fn random_edge_cases() {
        let pool = ids(&[1, 2, 3, 4]);
        assert!(select_random(&pool, 0, 1).is_empty());
        assert_eq!(select_random(&pool, 9, 1).nodes, set(&[1, 2, 3, 4]));
        assert_eq!(select_random(&pool, 2, 5).len(), 2);
    }

    #[test]
    fn random_golden_subset() {
        let pool = ids(&(1..=10).collect::<Vec<_>>());
        let a = select_random(&pool, 3, 42);
        let mut shuffled = pool.clone();
        shuffled.reverse();
        assert_eq!(select_random(&shuffled, 3, 42), a);
        // frozen from the first seeded run
        assert_eq!(a.nodes, set(&GOLDEN_RANDOM_1_10_SEED42));
    }

    const GOLDEN_RANDOM_1_10_SEED42: [u64; 3] = [2, 3, 7];

    #[test]
    fn quota_examples() {
        assert_eq!(kbins_quotas(&[70, 20, 8, 2], 10), vec![7, 2, 1, 1]);
        assert_eq!(kbins_quotas(&[0, 50, 0], 7), vec![0, 7, 0]);
        // half rounds up
        assert_eq!(kbins_quotas(&[5, 5], 3), vec![2, 2]);
    }

    #[test]
    fn single_value_collapses_to_one_bin() {
        let nm: Vec<(NodeId, f64)> = (0..30).map(|i| (NodeId(i), 1.3)).collect();
        let t = select_k_bins(nm, &BTreeSet::new(), KBinsConfig::new(20, 6).unwrap());
        assert_eq!(t.len(), 6);
    }

    #[test]
    fn borders_first_within_bin() {
        // all three land in bin 0 when k = 1
        let nm = vec![(NodeId(1), 0.5), (NodeId(0), 0.1), (NodeId(2), 0.9)];
        let index = KBinsIndex::new(nm.clone(), 1, 4.0);
        assert_eq!(index.members(0), &ids(&[0, 1, 2])[..]);
        let order: Vec<NodeId> = border_to_middle(index.members(0)).collect();
        assert_eq!(order, ids(&[0, 2, 1]));

        // quota 2 out of 3 nodes: a (0.1) and c (0.9)
        let t = index.select(&BTreeSet::new(), 2);
        assert_eq!(t.nodes, set(&[0, 2]));
        // with a surveyed, the next border pick is c then b
        let t = index.select(&set(&[0]), 2);
        assert_eq!(t.nodes, set(&[1, 2]));
    }

    #[test]
    fn nm_upper_boundary_in_last_bin() {
        let nm = vec![(NodeId(0), 0.0), (NodeId(1), 4.0)];
        let index = KBinsIndex::new(nm, 20, 4.0);
        assert_eq!(index.bin_sizes()[0], 1);
        assert_eq!(index.bin_sizes()[19], 1);
    }

    #[test]
    fn all_surveyed_gives_empty() {
        let nm: Vec<(NodeId, f64)> = (0..5).map(|i| (NodeId(i), i as f64 * 0.7)).collect();
        let t = select_k_bins(nm, &set(&[0, 1, 2, 3, 4]), KBinsConfig::new(4, 3).unwrap());
        assert!(t.is_empty());
    }

    #[test]
    fn aggregate_ascending_examples() {
        let agg = vec![(NodeId(0), 5.0), (NodeId(1), 1.0), (NodeId(2), 3.0)];
        assert_eq!(
            select_aggregate_ascending(agg.clone(), &BTreeSet::new(), 2).nodes,
            set(&[1, 2])
        );
        assert!(select_aggregate_ascending(agg, &BTreeSet::new(), 0).is_empty());
        let tie = vec![(NodeId(8), 2.0), (NodeId(3), 2.0)];
        assert_eq!(
            select_aggregate_ascending(tie, &BTreeSet::new(), 1).nodes,
            set(&[3])
        );
    }

    fn rec(id: u64, indegree: usize, clustering: f64) -> NodeMeasures {
        NodeMeasures {
            node: NodeId(id),
            indegree,
            outdegree: 0,
            degree: indegree,
            clustering,
            normalized: [0.0; 4],
            nm: 0.0,
        }
    }

    #[test]
    fn lowest_measure_examples() {
        let ms = vec![rec(0, 0, 0.5), rec(1, 7, 0.0), rec(2, 3, 0.2)];
        let none = BTreeSet::new();
        assert_eq!(
            select_lowest_measure("indegree", &ms, &none, 1)
                .unwrap()
                .nodes,
            set(&[0])
        );
        assert_eq!(
            select_lowest_measure("clustering", &ms, &none, 1)
                .unwrap()
                .nodes,
            set(&[1])
        );
        assert_eq!(
            select_lowest_measure("degree", &ms, &none, 10)
                .unwrap()
                .len(),
            3
        );
        assert_eq!(
            select_lowest_measure("indegree", &ms, &set(&[0]), 1)
                .unwrap()
                .nodes,
            set(&[2])
        );
        assert!(matches!(
            select_lowest_measure("eigen", &ms, &none, 1),
            Err(Error::UnknownMeasure(_))
        ));
    }

    #[test]
    fn config_validation() {
        assert!(KBinsConfig::new(0, 5).is_err());
        assert!(KBinsConfig::new(5, 0).is_err());
    }

    #[test]
    fn cumulative_quota_requests_shortfall() {
        // bin 0 holds 90 nodes (NM 0.0), bin 1 holds 10 (NM 3.9)
        let nodes: Vec<(NodeId, f64)> = (0..100u64)
            .map(|i| (NodeId(i), if i < 90 { 0.0 } else { 3.9 }))
            .collect();
        let index = KBinsIndex::new(nodes, 2, 4.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let surveyed: BTreeSet<NodeId> = (90..92).map(NodeId).collect();

        // sample of 2 + 10 wants 11 from bin 0 and 1 from bin 1, which is covered
        let cum = index.select_with(
            &surveyed,
            10,
            WithinBin::Stride,
            QuotaBasis::Cumulative,
            &mut rng,
        );
        assert_eq!(cum.nodes.len(), 11);
        assert!(cum.nodes.iter().all(|id| id.0 < 90));

        let per_call = index.select_with(
            &surveyed,
            10,
            WithinBin::Stride,
            QuotaBasis::PerCall,
            &mut rng,
        );
        assert_eq!(per_call.nodes.len(), 10);
        assert_eq!(per_call.nodes.iter().filter(|id| id.0 >= 90).count(), 1);
    }

    #[test]
    fn stride_spreads_over_ranks() {
        let items = ids(&[0, 1, 2, 3, 4, 5, 6, 7, 8, 9]);
        let picked: Vec<NodeId> = evenly_spaced(&items, 2).collect();
        assert_eq!(picked, ids(&[2, 7]));
        assert_eq!(evenly_spaced(&items, 20).count(), 10);
    }

    #[test]
    fn mode_names_round_trip() {
        for w in ["border", "stride", "random"] {
            assert_eq!(w.parse::<WithinBin>().unwrap().to_string(), w);
        }
        for b in ["stage", "cumulative"] {
            assert_eq!(b.parse::<QuotaBasis>().unwrap().to_string(), b);
        }
        assert!("middle".parse::<WithinBin>().is_err());
        assert!("total".parse::<QuotaBasis>().is_err());
    }
}
