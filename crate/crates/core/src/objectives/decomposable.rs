use std::sync::Arc;

use super::ValueOracle;
use crate::{Element, Error, Result};

/// The per-point components `f_e` of an additively decomposable objective
/// `f(S) = (1/|V|) Σ_{e ∈ V} f_e(S)`.
pub trait ComponentFamily: Send + Sync {
    fn component(&self, point: &Element, set: &[&Element]) -> Result<f64>;
}

/// Facility location: `f_e(S) = max_{s ∈ S} exp(-‖x_e - x_s‖² / bandwidth)`,
/// zero on the empty set. Requires feature vectors.
#[derive(Debug, Clone, Copy)]
pub struct FacilityLocation {
    pub bandwidth: f64,
}

impl FacilityLocation {
    pub fn new(bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0) {
            return Err(Error::config("facility-location bandwidth must be positive"));
        }
        Ok(FacilityLocation { bandwidth })
    }

    fn features(e: &Element) -> Result<&[f64]> {
        e.features
            .as_deref()
            .ok_or_else(|| Error::domain(format!("element {} has no feature vector", e.id)))
    }
}

impl ComponentFamily for FacilityLocation {
    fn component(&self, point: &Element, set: &[&Element]) -> Result<f64> {
        let x = Self::features(point)?;
        let mut best = 0.0f64;
        for s in set {
            let y = Self::features(s)?;
            if y.len() != x.len() {
                return Err(Error::domain(format!(
                    "feature length mismatch between elements {} and {}",
                    point.id, s.id
                )));
            }
            let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
            best = best.max((-d2 / self.bandwidth).exp());
        }
        Ok(best)
    }
}

/// Sample-mean estimate `f_W(S) = (1/|W|) Σ_{e ∈ W} f_e(S)`.
///
/// Components are divided by a fixed `scale` so that `|f_e| <= 1` on the
/// probed sets.
#[derive(Clone)]
pub struct DecomposableOracle {
    family: Arc<dyn ComponentFamily>,
    sample: Vec<Element>,
    scale: f64,
}

impl DecomposableOracle {
    /// Builds the estimator over `sample`, deriving the scale from the
    /// component values on every singleton of `candidates` and on
    /// `candidates` itself. The scale only ever shrinks components.
    pub fn new(
        family: Arc<dyn ComponentFamily>,
        sample: Vec<Element>,
        candidates: &[Element],
    ) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::config("decomposable estimate needs a non-empty sample"));
        }
        let all: Vec<&Element> = candidates.iter().collect();
        let mut max_abs = 0.0f64;
        for w in &sample {
            for c in candidates {
                max_abs = max_abs.max(family.component(w, &[c])?.abs());
            }
            max_abs = max_abs.max(family.component(w, &all)?.abs());
        }
        Self::with_scale(family, sample, max_abs.max(1.0))
    }

    pub fn with_scale(
        family: Arc<dyn ComponentFamily>,
        sample: Vec<Element>,
        scale: f64,
    ) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::config("decomposable estimate needs a non-empty sample"));
        }
        if !(scale > 0.0) {
            return Err(Error::config("component scale must be positive"));
        }
        Ok(DecomposableOracle {
            family,
            sample,
            scale,
        })
    }

    /// The exact decomposable function over `ground`, sharing this
    /// estimator's scale.
    pub fn exact_over(&self, ground: Vec<Element>) -> Result<Self> {
        Self::with_scale(self.family.clone(), ground, self.scale)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn sample(&self) -> &[Element] {
        &self.sample
    }
}

impl ValueOracle for DecomposableOracle {
    fn eval(&self, set: &[&Element]) -> Result<f64> {
        let mut total = 0.0;
        for w in &self.sample {
            total += self.family.component(w, set)? / self.scale;
        }
        Ok(total / self.sample.len() as f64)
    }
}

/// Sample size guaranteeing `|f_W(S) - f(S)| <= eps` simultaneously for all
/// `|S| <= k` with probability `1 - delta`:
/// `⌈(2k² ln(2/δ) + 2k³ ln|V|) / ε²⌉`.
pub fn sample_size_bound(k: usize, eps: f64, delta: f64, ground_size: usize) -> Result<usize> {
    if k < 1 {
        return Err(Error::config("k must be at least 1"));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::config(format!("eps = {eps} must lie in (0, 1]")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::config(format!("delta = {delta} must lie in (0, 1)")));
    }
    if ground_size < 2 {
        return Err(Error::config("ground size must be at least 2"));
    }
    Ok(bound_from_logs(k, eps, (2.0 / delta).ln(), (ground_size as f64).ln()))
}

fn bound_from_logs(k: usize, eps: f64, log_two_over_delta: f64, log_ground: f64) -> usize {
    let k = k as f64;
    let raw = (2.0 * k * k * log_two_over_delta + 2.0 * k * k * k * log_ground) / (eps * eps);
    // absorb rounding in the logarithms before taking the ceiling
    (raw * (1.0 - 1e-12)).ceil() as usize
}
