//! Channel probabilities, Shannon entropy curves and the average scattering
//! entropy (ASE).
//!
//! The ASE of an equilateral graph is the mean of `H(k)` over one period
//! `K = 2 pi / l` of `k`. It is integrated with composite Gauss-Legendre
//! panels. Each panel is compared against the sum of its two halves, and the
//! panels with the largest discrepancies are bisected until the discrepancies
//! add up to less than `tolerance * K`. The rule has no endpoint nodes, so
//! `k = 0` is never sampled.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::MetricGraph;
use crate::quadrature::GaussLegendre;
use crate::scattering::{ScatteringError, ScatteringMatrix, Scatterer, JITTER, MAX_JITTERS};

/// Allowed deviation of the summed probabilities from 1.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-8;
/// Accuracy of a single entropy evaluation, in bits. Panels whose
/// discrepancy per unit length is below it are not refined further, so
/// tolerances under it end in `NoConvergence`.
pub const INTEGRAND_NOISE: f64 = 1e-13;
/// Negative probabilities above this are rounding noise.
const NEGATIVE_CLAMP: f64 = -1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error("probabilities at k = {k} sum to {sum}")]
    NormalizationFailure { k: f64, sum: f64 },

    #[error("graph is not equilateral; the ASE needs periodic probabilities")]
    NotEquilateral,

    #[error("quadrature did not converge on [{a}, {b}] at bisection depth {depth}")]
    NoConvergence { a: f64, b: f64, depth: usize },

    #[error("entrance channel {channel} out of range ({count} leads)")]
    ChannelOutOfRange { channel: usize, count: usize },

    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(&'static str),

    #[error(transparent)]
    Scattering(#[from] ScatteringError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    pub entries: Vec<f64>,
    pub entrance: usize,
    pub k: f64,
}

impl ProbabilityVector {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Bound on the estimated absolute error of the averaged entropy.
    pub tolerance: f64,
    pub initial_panels: usize,
    pub nodes_per_panel: usize,
    /// Maximum bisection depth below an initial panel.
    pub max_doublings: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { tolerance: 1e-7, initial_panels: 64, nodes_per_panel: 16, max_doublings: 24 }
    }
}

impl QuadratureConfig {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self { tolerance, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), EntropyError> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(EntropyError::InvalidConfig("tolerance must be positive"));
        }
        if self.initial_panels == 0 || self.nodes_per_panel == 0 || self.max_doublings == 0 {
            return Err(EntropyError::InvalidConfig("panel, node and doubling counts must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AseResult {
    /// Average entropy in bits.
    pub value: f64,
    pub entrance: usize,
    /// Length of the averaging window.
    pub period: f64,
    /// Number of leaf panels in the final composite rule.
    pub panels: usize,
    pub error_estimate: f64,
    pub singular_retries: usize,
}

/// `p_j = |S_{j, entrance}|^2`, renormalized to sum to one.
pub fn channel_probabilities(s: &ScatteringMatrix, entrance: usize) -> Result<ProbabilityVector, EntropyError> {
    let l = s.dim();
    if entrance >= l {
        return Err(EntropyError::ChannelOutOfRange { channel: entrance, count: l });
    }
    let column: Vec<C64> = s.entries.iter().map(|row| row[entrance]).collect();
    column_probabilities(&column, entrance, s.k)
}

/// Probabilities from one column of `S(k)`.
pub fn column_probabilities(column: &[C64], entrance: usize, k: f64) -> Result<ProbabilityVector, EntropyError> {
    let mut entries: Vec<f64> = column.iter().map(|c| c.norm_sqr()).collect();
    for p in &mut entries {
        if *p < 0.0 && *p >= NEGATIVE_CLAMP {
            *p = 0.0;
        }
    }
    let sum: f64 = entries.iter().sum();
    if (sum - 1.0).abs().is_nan() || (sum - 1.0).abs() > NORMALIZATION_TOLERANCE || entries.iter().any(|&p| p < 0.0) {
        return Err(EntropyError::NormalizationFailure { k, sum });
    }
    for p in &mut entries {
        *p = (*p / sum).min(1.0);
    }
    Ok(ProbabilityVector { entries, entrance, k })
}

/// Entropy in bits, with `0 log 0 = 0`.
pub fn shannon_entropy(p: &ProbabilityVector) -> f64 {
    entropy_bits(&p.entries)
}

pub(crate) fn entropy_bits(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum::<f64>().max(0.0)
}

/// `2 pi / l` for an equilateral graph with edge length `l`. A graph without
/// edges scatters identically at every `k` and is given period `2 pi`.
pub fn period(g: &MetricGraph) -> Result<f64, EntropyError> {
    if g.num_edges() == 0 {
        return Ok(TAU);
    }
    g.common_length().map(|l| TAU / l).ok_or(EntropyError::NotEquilateral)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub k: f64,
    pub entropy: f64,
    pub probabilities: ProbabilityVector,
}

pub fn entropy_curve(g: &MetricGraph, entrance: usize, grid: &[f64]) -> Result<Vec<CurvePoint>, EntropyError> {
    check_entrance(g, entrance)?;
    let scatterer = Scatterer::new(g);
    grid.par_iter()
        .map(|&k| {
            let (entropy, mut probabilities, _) = evaluate(&scatterer, entrance, k)?;
            probabilities.k = k;
            Ok(CurvePoint { k, entropy, probabilities })
        })
        .collect()
}

fn check_entrance(g: &MetricGraph, entrance: usize) -> Result<(), EntropyError> {
    if entrance >= g.num_leads() {
        return Err(EntropyError::ChannelOutOfRange { channel: entrance, count: g.num_leads() });
    }
    Ok(())
}

/// Entropy at `k`. Singular systems and columns that fail the normalization
/// check both mark a resonance and are retried at jittered wave numbers.
fn evaluate(s: &Scatterer<'_>, entrance: usize, k: f64) -> Result<(f64, ProbabilityVector, usize), EntropyError> {
    let mut last = None;
    for retries in 0..=MAX_JITTERS {
        let shifted = k + retries as f64 * JITTER;
        let column = match s.column(shifted, entrance) {
            Ok(column) => column,
            Err(e @ ScatteringError::SingularSystem { .. }) => {
                last = Some(e.into());
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        match column_probabilities(&column, entrance, shifted) {
            Ok(p) => return Ok((shannon_entropy(&p), p, retries)),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

pub fn average_scattering_entropy(
    g: &MetricGraph,
    entrance: usize,
    config: &QuadratureConfig,
) -> Result<AseResult, EntropyError> {
    let k_period = period(g)?;
    average_entropy_over(g, entrance, config, k_period)
}

/// Mean of `H(k)` over `[0, span]`. With `span` a multiple of the period this
/// equals the ASE.
pub fn average_entropy_over(
    g: &MetricGraph,
    entrance: usize,
    config: &QuadratureConfig,
    span: f64,
) -> Result<AseResult, EntropyError> {
    config.validate()?;
    check_entrance(g, entrance)?;
    let scatterer = Scatterer::new(g);
    let rule = GaussLegendre::new(config.nodes_per_panel);
    let integrand = |k: f64| evaluate(&scatterer, entrance, k).map(|(h, _, retries)| (h, retries));
    let budget = config.tolerance * span;

    let width = span / config.initial_panels as f64;
    let mut retries = 0;
    let mut leaves = Vec::with_capacity(config.initial_panels);
    let initial: Vec<Result<(Leaf, usize), EntropyError>> = (0..config.initial_panels)
        .into_par_iter()
        .map(|m| {
            let a = m as f64 * width;
            let b = if m + 1 == config.initial_panels { span } else { (m + 1) as f64 * width };
            let (whole, r) = estimate(&rule, &integrand, a, b)?;
            let (leaf, more) = Leaf::split(&rule, &integrand, a, b, whole, 0)?;
            Ok((leaf, r + more))
        })
        .collect();
    for piece in initial {
        let (leaf, r) = piece?;
        leaves.push(leaf);
        retries += r;
    }

    loop {
        let error: f64 = leaves.iter().map(Leaf::error).sum();
        if error <= budget {
            break;
        }
        let mut order: Vec<usize> = (0..leaves.len()).collect();
        order.sort_by(|&i, &j| leaves[j].error().total_cmp(&leaves[i].error()).then(i.cmp(&j)));
        let mut chosen = vec![false; leaves.len()];
        let mut remaining = error;
        for &i in &order {
            if remaining <= 0.5 * budget {
                break;
            }
            if leaves[i].depth + 1 < config.max_doublings && !leaves[i].settled() {
                chosen[i] = true;
                remaining -= leaves[i].error();
            }
        }
        if !chosen.contains(&true) {
            let worst = &leaves[order[0]];
            return Err(EntropyError::NoConvergence { a: worst.a, b: worst.b, depth: worst.depth + 1 });
        }

        let next: Vec<Result<(Vec<Leaf>, usize), EntropyError>> = leaves
            .par_iter()
            .zip(chosen.par_iter())
            .map(|(leaf, &split)| if split { leaf.bisect(&rule, &integrand) } else { Ok((vec![*leaf], 0)) })
            .collect();
        leaves = Vec::with_capacity(leaves.len() * 2);
        for piece in next {
            let (children, r) = piece?;
            leaves.extend(children);
            retries += r;
        }
    }

    // fixed summation order keeps the result independent of scheduling
    let integral: f64 = leaves.iter().map(Leaf::integral).sum();
    let error: f64 = leaves.iter().map(Leaf::error).sum();
    Ok(AseResult {
        value: (integral / span).clamp(0.0, (g.num_leads() as f64).log2()),
        entrance,
        period: span,
        panels: 2 * leaves.len(),
        error_estimate: error / span,
        singular_retries: retries,
    })
}

/// An interval integrated both as one panel and as two half panels.
#[derive(Debug, Clone, Copy)]
struct Leaf {
    a: f64,
    b: f64,
    depth: usize,
    whole: f64,
    left: f64,
    right: f64,
}

impl Leaf {
    fn integral(&self) -> f64 {
        self.left + self.right
    }

    fn error(&self) -> f64 {
        (self.whole - self.integral()).abs()
    }

    /// The discrepancy is at the noise level of the integrand; bisecting
    /// further cannot reduce it.
    fn settled(&self) -> bool {
        self.error() <= INTEGRAND_NOISE * (self.b - self.a)
    }

    fn split<F>(rule: &GaussLegendre, f: &F, a: f64, b: f64, whole: f64, depth: usize) -> Result<(Leaf, usize), EntropyError>
    where
        F: Fn(f64) -> Result<(f64, usize), EntropyError>,
    {
        let m = 0.5 * (a + b);
        let (left, rl) = estimate(rule, f, a, m)?;
        let (right, rr) = estimate(rule, f, m, b)?;
        Ok((Leaf { a, b, depth, whole, left, right }, rl + rr))
    }

    fn bisect<F>(&self, rule: &GaussLegendre, f: &F) -> Result<(Vec<Leaf>, usize), EntropyError>
    where
        F: Fn(f64) -> Result<(f64, usize), EntropyError>,
    {
        let m = 0.5 * (self.a + self.b);
        let (lo, rl) = Leaf::split(rule, f, self.a, m, self.left, self.depth + 1)?;
        let (hi, rr) = Leaf::split(rule, f, m, self.b, self.right, self.depth + 1)?;
        Ok((vec![lo, hi], rl + rr))
    }
}

/// Gauss-Legendre estimate on `[a, b]` and the number of jitters it needed.
fn estimate<F>(rule: &GaussLegendre, f: &F, a: f64, b: f64) -> Result<(f64, usize), EntropyError>
where
    F: Fn(f64) -> Result<(f64, usize), EntropyError>,
{
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = 0.0;
    let mut retries = 0;
    for (x, w) in rule.nodes().iter().zip(rule.weights()) {
        let (h, r) = f(mid + half * x)?;
        sum += w * h;
        retries += r;
    }
    Ok((sum * half, retries))
}
