//! Exact sampling of chain realizations by uniformization.
//!
//! Candidate events arrive as a Poisson process of rate `λ`. At an event at
//! time `t` the next node is drawn from `a(t)/λ`; drawing the current node is
//! a self-transition and extends the current dwell. Because every row of the
//! balanced rate matrix sums to exactly `λ`, no thinning is needed.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::scheme::BalancedScheme;
use crate::error::{Error, Result};
use crate::tolerances::TOLERANCES;

/// One visit: evolve under `H_node` for `dwell`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub node: usize,
    pub dwell: f64,
}

/// A sampled trajectory of the chain over `[0, total]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub segments: Vec<Segment>,
    pub total: f64,
    /// Poisson candidate events, self-transitions included.
    pub candidate_events: usize,
}

impl Realization {
    /// Node changes (segments minus one).
    pub fn true_jumps(&self) -> usize {
        self.segments.len().saturating_sub(1)
    }

    pub fn dwells(&self) -> impl Iterator<Item = f64> + '_ {
        self.segments.iter().map(|s| s.dwell)
    }

    /// Node occupied at time `t` (the later segment at a boundary).
    pub fn node_at(&self, t: f64) -> Option<usize> {
        if !(0.0..=self.total).contains(&t) {
            return None;
        }
        let mut start = 0.0;
        for s in &self.segments {
            if t < start + s.dwell {
                return Some(s.node);
            }
            start += s.dwell;
        }
        self.segments.last().map(|s| s.node)
    }

    /// Total time spent in `node`.
    pub fn occupation(&self, node: usize) -> f64 {
        self.segments.iter().filter(|s| s.node == node).map(|s| s.dwell).sum()
    }
}

/// Draw an index from unnormalized nonnegative `weights` summing to `total`.
fn categorical(weights: &[f64], total: f64, rng: &mut impl Rng) -> usize {
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    // round-off: fall back to the last node with positive weight
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1)
}

/// Sample one realization of the balanced chain over `[0, horizon]`, with
/// the initial node drawn from `w(0)`.
pub fn sample_realization(scheme: &BalancedScheme, horizon: f64, rng: &mut impl Rng) -> Result<Realization> {
    if !(horizon >= 0.0) || horizon > scheme.horizon() * (1.0 + 1e-12) {
        return Err(Error::Config(format!(
            "sampling horizon {horizon} outside the validated range [0, {}]",
            scheme.horizon()
        )));
    }
    let w0 = scheme.schedule().value(0.0);
    let mut node = categorical(&w0, w0.iter().sum(), rng);
    let lambda = scheme.lambda();
    let q = scheme.nodes();

    let mut segments = Vec::new();
    let mut seg_start = 0.0;
    let mut t = 0.0;
    let mut candidate_events = 0;
    loop {
        let gap: f64 = Exp1.sample(rng);
        t += gap / lambda;
        if t >= horizon {
            break;
        }
        candidate_events += 1;
        if q == 1 {
            continue;
        }
        let mut a = scheme.rates(t)?;
        for x in a.iter_mut() {
            // rates() already rejected anything below -rate_negativity
            *x = x.max(0.0);
        }
        let total: f64 = a.iter().sum();
        debug_assert!((total - lambda).abs() < 1e3 * TOLERANCES.rate_negativity * lambda.max(1.0));
        let next = categorical(&a, total, rng);
        if next != node {
            let dwell = t - seg_start;
            if dwell > 0.0 {
                segments.push(Segment { node, dwell });
            }
            seg_start = t;
            node = next;
        }
    }
    let dwell = horizon - seg_start;
    if dwell > 0.0 || segments.is_empty() {
        segments.push(Segment { node, dwell });
    }
    Ok(Realization { segments, total: horizon, candidate_events })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::WeightSchedule;
    use crate::rng::stream;

    #[test]
    fn single_node_is_one_segment() {
        let s = BalancedScheme::new(WeightSchedule::constant(vec![1.0]).unwrap(), 50.0, 2.0).unwrap();
        let r = sample_realization(&s, 2.0, &mut stream(1, 0)).unwrap();
        assert_eq!(r.segments, vec![Segment { node: 0, dwell: 2.0 }]);
        assert!(r.candidate_events > 0);
    }

    #[test]
    fn dwell_sums_to_total_and_nodes_alternate() {
        let s = BalancedScheme::new(WeightSchedule::constant(vec![0.2, 0.5, 0.3]).unwrap(), 40.0, 1.5).unwrap();
        for k in 0..200 {
            let r = sample_realization(&s, 1.5, &mut stream(3, k)).unwrap();
            let total: f64 = r.dwells().sum();
            assert!((total - 1.5).abs() < 1e-12);
            assert!(r.segments.windows(2).all(|w| w[0].node != w[1].node));
            assert!(r.segments.iter().all(|s| s.node < 3 && s.dwell > 0.0));
            assert!(r.true_jumps() <= r.candidate_events);
        }
    }

    #[test]
    fn same_seed_same_realization() {
        let s = BalancedScheme::new(WeightSchedule::clamped_adiabatic(0.1, 1.0).unwrap(), 20.0, 1.0).unwrap();
        let a = sample_realization(&s, 1.0, &mut stream(42, 7)).unwrap();
        let b = sample_realization(&s, 1.0, &mut stream(42, 7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn node_at_and_occupation() {
        let r = Realization {
            segments: vec![Segment { node: 1, dwell: 0.25 }, Segment { node: 0, dwell: 0.75 }],
            total: 1.0,
            candidate_events: 3,
        };
        assert_eq!(r.node_at(0.1), Some(1));
        assert_eq!(r.node_at(0.5), Some(0));
        assert_eq!(r.node_at(1.0), Some(0));
        assert_eq!(r.node_at(1.5), None);
        assert_eq!(r.occupation(0), 0.75);
    }

    #[test]
    fn horizon_beyond_validation_is_rejected() {
        let s = BalancedScheme::new(WeightSchedule::uniform(2).unwrap(), 5.0, 1.0).unwrap();
        assert!(sample_realization(&s, 2.0, &mut stream(0, 0)).is_err());
    }
}
