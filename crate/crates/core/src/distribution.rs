//! Normalization, shared-edge histograms, smoothed KL divergence and the
//! weighted evaluation score.

use std::io::Write;

use crate::error::{Error, Result};
use crate::measures::{Measure, NodeMeasures, MEASURE_COUNT};
use crate::numfmt::sig6;

/// Default histogram resolution for measure distributions.
pub const DEFAULT_BINS: usize = 20;
/// Default additive smoothing mass per bin.
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Per-measure (min, max) over the whole network.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalizationBounds {
    pub bounds: [(f64, f64); MEASURE_COUNT],
}

impl NormalizationBounds {
    pub fn get(&self, measure: Measure) -> (f64, f64) {
        self.bounds[measure.index()]
    }

    pub fn normalize_all(&self, raw: &[f64; MEASURE_COUNT]) -> [f64; MEASURE_COUNT] {
        std::array::from_fn(|i| normalize(raw[i], self.bounds[i]))
    }
}

pub fn compute_bounds(measures: &[NodeMeasures]) -> Result<NormalizationBounds> {
    if measures.is_empty() {
        return Err(Error::Empty("no node measures to bound"));
    }
    let mut bounds = [(f64::INFINITY, f64::NEG_INFINITY); MEASURE_COUNT];
    for m in measures {
        for (b, v) in bounds.iter_mut().zip(m.raw_values()) {
            b.0 = b.0.min(v);
            b.1 = b.1.max(v);
        }
    }
    Ok(NormalizationBounds { bounds })
}

/// Min-max scaling clamped to [0, 1]; degenerate bounds map to 0.
pub fn normalize(value: f64, (min, max): (f64, f64)) -> f64 {
    if max <= min {
        return 0.0;
    }
    ((value - min) / (max - min)).clamp(0.0, 1.0)
}

/// The aggregated normalized measure: the plain sum of normalized values.
pub fn aggregate_nm(normalized: &[f64]) -> f64 {
    normalized.iter().sum()
}

/// Fills `normalized` and `nm` on every record from full-network bounds.
pub fn apply_normalization(measures: &mut [NodeMeasures], bounds: &NormalizationBounds) {
    for m in measures {
        m.normalized = bounds.normalize_all(&m.raw_values());
        m.nm = aggregate_nm(&m.normalized);
    }
}

/// Bin index of `v` among `bins` equal-width bins over `[0, upper]`; the
/// upper boundary belongs to the last bin.
pub(crate) fn bin_index(v: f64, upper: f64, bins: usize) -> usize {
    let scaled = (v / upper * bins as f64).floor();
    if scaled <= 0.0 {
        0
    } else {
        (scaled as usize).min(bins - 1)
    }
}

/// Empirical histogram over [0, 1] with equal-width bins.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    edges: Vec<f64>,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn bins(&self) -> usize {
        self.probs.len()
    }

    pub(crate) fn from_counts(counts: &[usize]) -> Self {
        let total: usize = counts.iter().sum();
        Distribution {
            edges: uniform_edges(counts.len()),
            probs: counts.iter().map(|&c| c as f64 / total as f64).collect(),
        }
    }
}

pub(crate) fn uniform_edges(bins: usize) -> Vec<f64> {
    (0..=bins).map(|i| i as f64 / bins as f64).collect()
}

pub(crate) fn histogram_counts(values: impl IntoIterator<Item = f64>, bins: usize) -> Vec<usize> {
    let mut counts = vec![0usize; bins];
    for v in values {
        counts[bin_index(v, 1.0, bins)] += 1;
    }
    counts
}

pub fn build_histogram(values: &[f64], bins: usize) -> Result<Distribution> {
    if values.is_empty() {
        return Err(Error::Empty("no values to histogram"));
    }
    if bins == 0 {
        return Err(Error::config("histogram needs at least one bin"));
    }
    Ok(Distribution::from_counts(&histogram_counts(
        values.iter().copied(),
        bins,
    )))
}

/// KL(p ‖ q) in nats after adding `epsilon` to every bin of both and
/// renormalizing.
pub fn kl_divergence(p: &Distribution, q: &Distribution, epsilon: f64) -> Result<f64> {
    if p.edges != q.edges {
        return Err(Error::EdgeMismatch);
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::config("smoothing epsilon must be positive"));
    }
    Ok(smoothed_kl(&p.probs, &q.probs, epsilon))
}

pub(crate) fn smoothed_kl(p: &[f64], q: &[f64], epsilon: f64) -> f64 {
    let h = p.len() as f64;
    let p_norm = 1.0 + h * epsilon;
    let q_norm = 1.0 + h * epsilon;
    let kl: f64 = p
        .iter()
        .zip(q)
        .map(|(&pk, &qk)| {
            let ps = (pk + epsilon) / p_norm;
            let qs = (qk + epsilon) / q_norm;
            ps * (ps / qs).ln()
        })
        .sum();
    // rounding can leave a tiny negative residue for equal inputs
    kl.max(0.0)
}

/// Argument order for the per-measure divergence.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KlDirection {
    /// KL(reference ‖ sample): empty sample bins where the network has mass
    /// are penalized.
    #[default]
    ReferenceFirst,
    /// KL(sample ‖ reference).
    SampleFirst,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub kl: Vec<f64>,
    pub weights: Vec<f64>,
    pub ev: f64,
}

impl Evaluation {
    pub(crate) fn combine(kl: Vec<f64>, weights: &[f64]) -> Self {
        let ev = kl.iter().zip(weights).map(|(k, w)| k * w).sum();
        Evaluation {
            kl,
            weights: weights.to_vec(),
            ev,
        }
    }

    /// Record used when no node has responded yet.
    pub fn undefined(weights: &[f64]) -> Self {
        Evaluation {
            kl: vec![f64::INFINITY; weights.len()],
            weights: weights.to_vec(),
            ev: f64::INFINITY,
        }
    }
}

pub(crate) fn check_weights(weights: &[f64], expected: usize) -> Result<()> {
    if weights.len() != expected {
        return Err(Error::InvalidWeight(format!(
            "expected {expected} weights, got {}",
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::InvalidWeight(format!(
            "{w} is not a finite non-negative number"
        )));
    }
    Ok(())
}

/// Weighted sum of per-measure divergences between the reference
/// distributions and histograms of the sample's normalized values.
///
/// `sample_values[i]` holds the normalized values of measure `i` for every
/// surveyed node.
pub fn evaluate_sample(
    reference: &[Distribution],
    sample_values: &[Vec<f64>],
    weights: &[f64],
    epsilon: f64,
) -> Result<Evaluation> {
    evaluate_sample_directed(
        reference,
        sample_values,
        weights,
        epsilon,
        KlDirection::ReferenceFirst,
    )
}

pub fn evaluate_sample_directed(
    reference: &[Distribution],
    sample_values: &[Vec<f64>],
    weights: &[f64],
    epsilon: f64,
    direction: KlDirection,
) -> Result<Evaluation> {
    check_weights(weights, reference.len())?;
    if sample_values.len() != reference.len() {
        return Err(Error::config(format!(
            "expected sample values for {} measures, got {}",
            reference.len(),
            sample_values.len()
        )));
    }
    let kl = reference
        .iter()
        .zip(sample_values)
        .map(|(r, values)| {
            let sample =
                build_histogram(values, r.bins()).map_err(|_| Error::Empty("sample is empty"))?;
            match direction {
                KlDirection::ReferenceFirst => kl_divergence(r, &sample, epsilon),
                KlDirection::SampleFirst => kl_divergence(&sample, r, epsilon),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Evaluation::combine(kl, weights))
}

/// Writes one CSV row per bin: measure, bin index, left edge, right edge,
/// probability.
pub fn write_distributions_csv<W: Write>(
    mut w: W,
    distributions: &[(Measure, &Distribution)],
) -> std::io::Result<()> {
    writeln!(w, "measure,bin,left,right,probability")?;
    for (measure, d) in distributions {
        for (k, p) in d.probs.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{}",
                measure,
                k,
                sig6(d.edges[k]),
                sig6(d.edges[k + 1]),
                sig6(*p)
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeId;

    fn record(raw: [f64; 4]) -> NodeMeasures {
        NodeMeasures {
            node: NodeId(0),
            indegree: raw[0] as usize,
            outdegree: raw[1] as usize,
            degree: raw[2] as usize,
            clustering: raw[3],
            normalized: [0.0; 4],
            nm: 0.0,
        }
    }

    fn dist(probs: &[f64]) -> Distribution {
        Distribution {
            edges: uniform_edges(probs.len()),
            probs: probs.to_vec(),
        }
    }

    #[test]
    fn bounds_examples() {
        let ms = vec![
            record([2.0, 1.0, 2.0, 0.0]),
            record([4.0, 1.0, 4.0, 0.5]),
            record([6.0, 1.0, 6.0, 0.0]),
        ];
        let b = compute_bounds(&ms).unwrap();
        assert_eq!(b.get(Measure::InDegree), (2.0, 6.0));
        assert_eq!(b.get(Measure::OutDegree), (1.0, 1.0));
        assert_eq!(b.get(Measure::Clustering), (0.0, 0.5));
        assert!(compute_bounds(&[]).is_err());
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(4.0, (2.0, 6.0)), 0.5);
        assert_eq!(normalize(7.0, (2.0, 6.0)), 1.0);
        assert_eq!(normalize(1.0, (2.0, 6.0)), 0.0);
        assert_eq!(normalize(123.0, (3.0, 3.0)), 0.0);
    }

    #[test]
    fn aggregate_examples() {
        assert!((aggregate_nm(&[0.2, 0.3, 0.5, 0.0]) - 1.0).abs() < 1e-15);
        assert_eq!(aggregate_nm(&[0.0; 4]), 0.0);
        assert_eq!(aggregate_nm(&[1.0; 4]), 4.0);
    }

    #[test]
    fn histogram_examples() {
        let d = build_histogram(&[0.0, 0.5, 1.0], 2).unwrap();
        assert_eq!(d.probs(), &[1.0 / 3.0, 2.0 / 3.0]);
        assert_eq!(d.edges(), &[0.0, 0.5, 1.0]);

        let d = build_histogram(&[0.0], 5).unwrap();
        assert_eq!(d.probs(), &[1.0, 0.0, 0.0, 0.0, 0.0]);

        let h = 20;
        let grid: Vec<f64> = (0..h).map(|k| (k as f64 + 0.5) / h as f64).collect();
        let d = build_histogram(&grid, h).unwrap();
        assert!(d
            .probs()
            .iter()
            .all(|&p| (p - 1.0 / h as f64).abs() < 1e-15));

        assert!(build_histogram(&[], 3).is_err());
        assert!(build_histogram(&[0.1], 0).is_err());
    }

    #[test]
    fn histogram_edges_invariants() {
        let d = build_histogram(&[0.3, 0.31, 0.99], 7).unwrap();
        assert_eq!(d.edges()[0], 0.0);
        assert_eq!(*d.edges().last().unwrap(), 1.0);
        assert!(d.edges().windows(2).all(|w| w[0] < w[1]));
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn kl_examples() {
        let p = dist(&[0.5, 0.5]);
        assert!(kl_divergence(&p, &p, 1e-6).unwrap() <= 1e-12);

        // closed form 0.5 ln 2 + 0.5 ln(2/3)
        let oracle = 0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
        let q = dist(&[0.25, 0.75]);
        let kl = kl_divergence(&p, &q, 1e-12).unwrap();
        assert!((kl - oracle).abs() < 1e-5);
        assert!((kl - 0.143841).abs() < 1e-5);

        let a = dist(&[1.0, 0.0]);
        let b = dist(&[0.0, 1.0]);
        let kl = kl_divergence(&a, &b, 1e-6).unwrap();
        assert!(kl.is_finite() && kl > 0.0);
    }

    #[test]
    fn kl_errors() {
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[0.2, 0.3, 0.5]);
        assert!(matches!(
            kl_divergence(&p, &q, 1e-6),
            Err(Error::EdgeMismatch)
        ));
        assert!(kl_divergence(&p, &p, 0.0).is_err());
    }

    #[test]
    fn evaluate_single_measure_is_its_kl() {
        let reference = vec![build_histogram(&[0.1, 0.2, 0.9, 0.95], 4).unwrap()];
        let sample = vec![vec![0.1, 0.9]];
        let e = evaluate_sample(&reference, &sample, &[1.0], 1e-6).unwrap();
        let direct = kl_divergence(
            &reference[0],
            &build_histogram(&sample[0], 4).unwrap(),
            1e-6,
        )
        .unwrap();
        assert_eq!(e.ev, direct);
        assert_eq!(e.kl, vec![direct]);
    }

    #[test]
    fn weighted_sum_arithmetic() {
        let e = Evaluation::combine(vec![0.1, 0.2], &[1.0, 2.0]);
        assert!((e.ev - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_weights_zero_ev() {
        let reference = vec![
            build_histogram(&[0.0, 1.0], 2).unwrap(),
            build_histogram(&[0.3, 0.6], 2).unwrap(),
        ];
        let sample = vec![vec![0.0], vec![0.9]];
        let e = evaluate_sample(&reference, &sample, &[0.0, 0.0], 1e-6).unwrap();
        assert_eq!(e.ev, 0.0);
        assert!(e.kl.iter().all(|&k| k > 0.0));
    }

    #[test]
    fn evaluate_errors() {
        let reference = vec![build_histogram(&[0.0, 1.0], 2).unwrap()];
        assert!(matches!(
            evaluate_sample(&reference, &[vec![]], &[1.0], 1e-6),
            Err(Error::Empty(_))
        ));
        assert!(matches!(
            evaluate_sample(&reference, &[vec![0.5]], &[-1.0], 1e-6),
            Err(Error::InvalidWeight(_))
        ));
        assert!(matches!(
            evaluate_sample(&reference, &[vec![0.5]], &[1.0, 1.0], 1e-6),
            Err(Error::InvalidWeight(_))
        ));
    }

    #[test]
    fn direction_is_selectable() {
        let reference = vec![build_histogram(&[0.1, 0.1, 0.1, 0.9], 2).unwrap()];
        let sample = vec![vec![0.1, 0.9]];
        let fwd = evaluate_sample_directed(
            &reference,
            &sample,
            &[1.0],
            1e-6,
            KlDirection::ReferenceFirst,
        )
        .unwrap();
        let rev =
            evaluate_sample_directed(&reference, &sample, &[1.0], 1e-6, KlDirection::SampleFirst)
                .unwrap();
        // KL([.75,.25] || [.5,.5]) vs KL([.5,.5] || [.75,.25])
        assert!((fwd.ev - (0.75 * 1.5f64.ln() + 0.25 * 0.5f64.ln())).abs() < 1e-5);
        assert!((rev.ev - (0.5 * (0.5f64 / 0.75).ln() + 0.5 * 2f64.ln())).abs() < 1e-5);
    }

    #[test]
    fn csv_rows() {
        let d = build_histogram(&[0.0, 0.5, 1.0], 2).unwrap();
        let mut buf = Vec::new();
        write_distributions_csv(&mut buf, &[(Measure::Degree, &d)]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "measure,bin,left,right,probability\n\
             degree,0,0,0.5,0.333333\n\
             degree,1,0.5,1,0.666667\n"
        );
    }
}
