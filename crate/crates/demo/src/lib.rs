//! Browser demo: generate a preferential-attachment graph, then compare
//! K-bins and random sampling on it.
//!
//! [`Demo`] holds the logic and is usable natively; [`DemoHandle`] is the
//! thin JavaScript binding around it. Results cross the boundary as flat
//! `f64` arrays.

use std::collections::BTreeSet;

use mscs_core::*;
use wasm_bindgen::prelude::*;

pub struct Demo {
    profile: NetworkProfile,
    edges: usize,
}

impl Demo {
    pub fn new(n: usize, m: usize, rho: f64, seed: u64) -> Result<Self> {
        let graph = GeneratorSpec::preferential_attachment(n, m, rho, seed).generate()?;
        let profile = NetworkProfile::new(&graph, DEFAULT_BINS)?;
        Ok(Demo {
            profile,
            edges: graph.edge_count(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.profile.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// Per NM bin: `[population, kbins picks, random picks]`, flattened.
    /// Both strategies choose from an empty sample with the same budget.
    pub fn nm_bins(&self, k: usize, target_size: usize, seed: u64) -> Result<Vec<f64>> {
        let cfg = KBinsConfig::new(k, target_size)?;
        let index = KBinsIndex::from_profile(&self.profile, k);
        let kbins = select_k_bins(self.profile.nm_values(), &BTreeSet::new(), cfg);
        let pool: Vec<NodeId> = self.profile.node_ids().collect();
        let random = select_random(&pool, kbins.nodes.len(), seed);

        let mut out = vec![0.0; 3 * k];
        for (b, size) in index.bin_sizes().into_iter().enumerate() {
            out[3 * b] = size as f64;
        }
        for (col, set) in [(1, &kbins), (2, &random)] {
            for &id in &set.nodes {
                let b = index.bin_of_value(self.profile.get(id)?.nm);
                out[3 * b + col] += 1.0;
            }
        }
        Ok(out)
    }

    /// Stage-by-stage `[sample fraction, ev]` pairs, flattened, for one run
    /// that stops once `max_fraction` of the nodes are surveyed.
    pub fn trajectory(
        &self,
        strategy: &str,
        target_size: usize,
        rate: f64,
        max_fraction: f64,
        seed: u64,
    ) -> Result<Vec<f64>> {
        let per_stage = (target_size as f64 * rate.max(1e-3)).max(1.0);
        let stages = (max_fraction * self.node_count() as f64 / per_stage).ceil() as usize;
        let config = ControllerConfig {
            strategy: strategy.parse()?,
            target_size,
            response: ResponseModel {
                rate,
                bias_exponent: 0.0,
            },
            max_stages: 4 * stages + 10,
            stop_fraction: Some(max_fraction),
            seed,
            ..Default::default()
        };
        let run = run_mscs_on(&self.profile, &config)?;
        Ok(run
            .records
            .iter()
            .flat_map(|r| [r.sample_fraction, r.ev])
            .collect())
    }

    /// Reference distribution of `measure` followed by the distribution of a
    /// sample of `size` nodes chosen by `strategy`.
    pub fn histograms(
        &self,
        measure: &str,
        strategy: &str,
        size: usize,
        seed: u64,
    ) -> Result<Vec<f64>> {
        let measure: Measure = measure.parse()?;
        let strategy: Strategy = strategy.parse()?;
        let none = BTreeSet::new();
        let nodes = match strategy {
            Strategy::Random => {
                let pool: Vec<NodeId> = self.profile.node_ids().collect();
                select_random(&pool, size, seed)
            }
            Strategy::KBins => select_k_bins(
                self.profile.nm_values(),
                &none,
                KBinsConfig::new(DEFAULT_KBINS, size)?,
            ),
            Strategy::AggregateAscending => {
                select_aggregate_ascending(self.profile.raw_aggregates(), &none, size)
            }
            Strategy::LowestMeasure(m) => {
                select_lowest_measure(m.name(), self.profile.measures(), &none, size)?
            }
        };
        let values = self.profile.sample_values(&nodes.nodes)?;
        let reference = &self.profile.reference()[measure.index()];
        let sample = build_histogram(&values[measure.index()], reference.bins())?;
        Ok(reference
            .probs()
            .iter()
            .chain(sample.probs())
            .copied()
            .collect())
    }
}

fn js_err(e: Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

#[wasm_bindgen]
pub struct DemoHandle(Demo);

#[wasm_bindgen]
impl DemoHandle {
    #[wasm_bindgen(constructor)]
    pub fn new(
        n: usize,
        m: usize,
        rho: f64,
        seed: u64,
    ) -> std::result::Result<DemoHandle, JsValue> {
        Demo::new(n, m, rho, seed).map(DemoHandle).map_err(js_err)
    }

    #[wasm_bindgen(js_name = nodeCount)]
    pub fn node_count(&self) -> usize {
        self.0.node_count()
    }

    #[wasm_bindgen(js_name = edgeCount)]
    pub fn edge_count(&self) -> usize {
        self.0.edge_count()
    }

    #[wasm_bindgen(js_name = nmBins)]
    pub fn nm_bins(
        &self,
        k: usize,
        target_size: usize,
        seed: u64,
    ) -> std::result::Result<Vec<f64>, JsValue> {
        self.0.nm_bins(k, target_size, seed).map_err(js_err)
    }

    pub fn trajectory(
        &self,
        strategy: &str,
        target_size: usize,
        rate: f64,
        max_fraction: f64,
        seed: u64,
    ) -> std::result::Result<Vec<f64>, JsValue> {
        self.0
            .trajectory(strategy, target_size, rate, max_fraction, seed)
            .map_err(js_err)
    }

    pub fn histograms(
        &self,
        measure: &str,
        strategy: &str,
        size: usize,
        seed: u64,
    ) -> std::result::Result<Vec<f64>, JsValue> {
        self.0
            .histograms(measure, strategy, size, seed)
            .map_err(js_err)
    }
}
