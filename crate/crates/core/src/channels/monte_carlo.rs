//! Monte-Carlo estimate of the average compiled channel.
//!
//! Realization `k` draws from its own counter-based stream `(seed, k)`, and
//! realizations are grouped into fixed-size chunks reduced in index order, so
//! the estimate is bit-for-bit independent of the thread count.

use num_complex::Complex;
use rayon::prelude::*;

use crate::compiler::{compile_with_spectra, GateSequence};
use crate::error::{Error, Result};
use crate::markov::{sample_realization, BalancedScheme};
use crate::rng::{stream, StreamRng};
use crate::{Matrix, SpectralF64, State};

/// Realizations per parallel work unit.
pub const MC_CHUNK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    pub realizations: usize,
    pub seed: u64,
    /// Depolarizing strength applied after every gate, if any.
    pub epsilon1: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ChannelEstimate {
    pub output: State,
    /// Trace-norm-scale standard error `sqrt(d Σ_jk Var(ρ_jk) / M)`, an
    /// upper estimate of `E||ρ̂ - E ρ̂||_1` since `||X||_1 <= sqrt(d) ||X||_F`.
    pub stderr: f64,
    pub realizations: usize,
    pub mean_segments: f64,
    pub segments_stderr: f64,
    pub mean_total_dwell: f64,
}

/// `(1 - ε) ρ + ε tr(ρ) I/d`.
pub fn depolarize(rho: &Matrix, epsilon: f64) -> Matrix {
    let d = rho.dim();
    let mut out = rho.scale(1.0 - epsilon);
    let shift = epsilon * rho.trace().re / d as f64;
    for i in 0..d {
        out[(i, i)] += Complex::new(shift, 0.0);
    }
    out
}

fn propagate(rho0: &Matrix, seq: &GateSequence, epsilon1: Option<f64>) -> Matrix {
    match epsilon1 {
        None => match seq.product() {
            Some(u) => rho0.conjugate_by(u.matrix()),
            None => rho0.clone(),
        },
        Some(eps) => seq.gates.iter().fold(rho0.clone(), |r, g| depolarize(&r.conjugate_by(g.unitary.matrix()), eps)),
    }
}

/// Running mean and sum of squared deviations (Welford), merged with Chan's
/// pairwise formula.
struct Partial {
    n: f64,
    mean: Matrix,
    m2: Vec<f64>,
    seg_mean: f64,
    seg_m2: f64,
    dwell: f64,
}

impl Partial {
    fn new(d: usize) -> Self {
        Self { n: 0.0, mean: Matrix::zeros(d), m2: vec![0.0; d * d], seg_mean: 0.0, seg_m2: 0.0, dwell: 0.0 }
    }

    fn push(&mut self, x: &Matrix, segments: f64, dwell: f64) {
        self.n += 1.0;
        let inv = 1.0 / self.n;
        for ((mu, m2), z) in self.mean.as_mut_slice().iter_mut().zip(&mut self.m2).zip(x.as_slice()) {
            let delta = z - *mu;
            *mu += delta * inv;
            *m2 += (delta.conj() * (z - *mu)).re;
        }
        let delta = segments - self.seg_mean;
        self.seg_mean += delta * inv;
        self.seg_m2 += delta * (segments - self.seg_mean);
        self.dwell += dwell;
    }

    fn merge(&mut self, other: &Partial) {
        if other.n == 0.0 {
            return;
        }
        let n = self.n + other.n;
        let (fa, fb) = (self.n / n, other.n / n);
        let w = self.n * other.n / n;
        for ((mu, m2), (mu_b, m2_b)) in self.mean.as_mut_slice().iter_mut().zip(&mut self.m2).zip(other.mean.as_slice().iter().zip(&other.m2)) {
            let delta = mu_b - *mu;
            *m2 += m2_b + delta.norm_sqr() * w;
            *mu = *mu * fa + mu_b * fb;
        }
        let delta = other.seg_mean - self.seg_mean;
        self.seg_m2 += other.seg_m2 + delta * delta * w;
        self.seg_mean = self.seg_mean * fa + other.seg_mean * fb;
        self.dwell += other.dwell;
        self.n = n;
    }
}

/// Average `ρ ↦ S ρ S†` over `realizations` gate sequences produced by
/// `sample(rng, index)`.
pub fn mc_average<F>(rho0: &State, opts: &McOptions, sample: F) -> Result<ChannelEstimate>
where
    F: Fn(&mut StreamRng, u64) -> Result<GateSequence> + Sync,
{
    let m = opts.realizations;
    if m == 0 {
        return Err(Error::Config("need at least one realization".into()));
    }
    if let Some(e) = opts.epsilon1 {
        if !(0.0..=1.0).contains(&e) {
            return Err(Error::Config(format!("epsilon1 = {e} outside [0, 1]")));
        }
    }
    let d = rho0.dim();
    let chunks = m.div_ceil(MC_CHUNK);
    let partials: Vec<Result<Partial>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Partial::new(d);
            for k in c * MC_CHUNK..((c + 1) * MC_CHUNK).min(m) {
                let mut rng = stream(opts.seed, k as u64);
                let seq = sample(&mut rng, k as u64)?;
                if seq.dim().is_some_and(|sd| sd != d) {
                    return Err(Error::DimensionMismatch { expected: d, got: seq.dim().unwrap_or(0) });
                }
                let out = propagate(rho0.matrix(), &seq, opts.epsilon1);
                acc.push(&out, seq.len() as f64, seq.dwells().sum());
            }
            Ok(acc)
        })
        .collect();

    let mut total = Partial::new(d);
    for p in partials {
        total.merge(&p?);
    }
    let mf = m as f64;
    let denom = (mf - 1.0).max(1.0);
    let var_sum: f64 = total.m2.iter().map(|v| v / denom).sum();
    let seg_var = total.seg_m2 / denom;
    Ok(ChannelEstimate {
        output: State::new(total.mean)?,
        stderr: (d as f64 * var_sum / mf).sqrt(),
        realizations: m,
        mean_segments: total.seg_mean,
        segments_stderr: (seg_var / mf).sqrt(),
        mean_total_dwell: total.dwell / mf,
    })
}

/// Monte-Carlo estimate for the balanced chain over `[0, horizon]`.
pub fn mc_channel(scheme: &BalancedScheme, spectra: &[SpectralF64], horizon: f64, rho0: &State, opts: &McOptions) -> Result<ChannelEstimate> {
    if spectra.len() != scheme.nodes() {
        return Err(Error::DimensionMismatch { expected: scheme.nodes(), got: spectra.len() });
    }
    mc_average(rho0, opts, |rng, _| compile_with_spectra(&sample_realization(scheme, horizon, rng)?, spectra))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::WeightSchedule;
    use crate::quantum::{pauli_to_dense, PauliTerm};

    fn plus() -> State {
        State::pure(&[Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)]).unwrap()
    }

    fn setup() -> (BalancedScheme, Vec<SpectralF64>) {
        let s = BalancedScheme::new(WeightSchedule::uniform(2).unwrap(), 8.0, 1.0).unwrap();
        let spectra = ["X", "Z"].iter().map(|w| pauli_to_dense(&[PauliTerm::new(1.0, *w)], 1).unwrap().spectral()).collect();
        (s, spectra)
    }

    #[test]
    fn deterministic_across_thread_pools() {
        let (s, spectra) = setup();
        let opts = McOptions { realizations: 300, seed: 11, epsilon1: None };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| mc_channel(&s, &spectra, 1.0, &plus(), &opts)).unwrap();
        let b = four.install(|| mc_channel(&s, &spectra, 1.0, &plus(), &opts)).unwrap();
        assert_eq!(a.output.matrix().as_slice(), b.output.matrix().as_slice());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }

    #[test]
    fn segment_statistics_are_sane() {
        let (s, spectra) = setup();
        let est = mc_channel(&s, &spectra, 1.0, &plus(), &McOptions { realizations: 2000, seed: 5, epsilon1: None }).unwrap();
        assert!((est.mean_total_dwell - 1.0).abs() < 1e-12);
        // expected true jumps for uniform weights: λT/2, so segments ≈ 1 + 4
        assert!((est.mean_segments - 5.0).abs() < 4.0 * est.segments_stderr + 0.05);
    }

    #[test]
    fn depolarizing_preserves_trace() {
        let r = depolarize(plus().matrix(), 0.3);
        assert!((r.trace().re - 1.0).abs() < 1e-15);
        assert!((r[(0, 1)].re - 0.35).abs() < 1e-15);
        assert!((r[(0, 0)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_realizations_rejected() {
        let (s, spectra) = setup();
        assert!(mc_channel(&s, &spectra, 1.0, &plus(), &McOptions { realizations: 0, seed: 0, epsilon1: None }).is_err());
    }

    #[test]
    fn single_node_single_realization_is_exact() {
        let s = BalancedScheme::new(WeightSchedule::uniform(1).unwrap(), 8.0, 1.0).unwrap();
        let h = pauli_to_dense(&[PauliTerm::new(1.0, "Y")], 1).unwrap();
        let est = mc_channel(&s, &[h.spectral()], 1.0, &plus(), &McOptions { realizations: 1, seed: 0, epsilon1: None }).unwrap();
        assert!(est.output.matrix().max_abs_diff(plus().evolve(&h.exp(1.0)).matrix()) < 1e-14);
        assert_eq!(est.stderr, 0.0);
    }
}
