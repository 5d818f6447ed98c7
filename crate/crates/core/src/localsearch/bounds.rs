use crate::{Error, Result};

fn check_alpha_beta(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::config(format!("alpha = {alpha} must lie in (0, 1]")));
    }
    if !(beta > 0.0 && beta <= 0.5) {
        return Err(Error::config(format!("beta = {beta} must lie in (0, 1/2]")));
    }
    Ok(())
}

/// Number of chained instances, `⌈√(2β/α) + 1⌉`.
pub fn chain_length(alpha: f64, beta: f64) -> Result<usize> {
    check_alpha_beta(alpha, beta)?;
    let raw = (2.0 * beta / alpha).sqrt() + 1.0;
    Ok((raw - 1e-9).ceil() as usize)
}

/// Approximation ratio of the thresholded chain for backbone factor `alpha`,
/// unconstrained factor `beta`, `d` knapsacks and grid parameter `eps`:
///
/// `(1-ε) / ((1/√α + 1/√(2β)) (1/√α + 2d√α + 1/√(2β)))`
///
/// With `d = 0`, `eps = 0` and `β = 1/2` this is `1/(1 + 1/√α)²`.
pub fn guarantee_bound(alpha: f64, beta: f64, d: usize, eps: f64) -> Result<f64> {
    check_alpha_beta(alpha, beta)?;
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::config(format!("eps = {eps} must lie in [0, 1)")));
    }
    let (inv_a, inv_b) = (1.0 / alpha.sqrt(), 1.0 / (2.0 * beta).sqrt());
    let knap = 2.0 * d as f64 * alpha.sqrt();
    Ok((1.0 - eps) / ((inv_a + inv_b) * (inv_a + knap + inv_b)))
}

/// Lower end `γ` of the density-threshold range for max singleton value `m`:
/// `2m / ((1/√α + 1/√(2β)) (1/√α + 2d√α + 1/√(2β)))`.
pub fn density_floor(m: f64, alpha: f64, beta: f64, d: usize) -> Result<f64> {
    Ok(2.0 * m * guarantee_bound(alpha, beta, d, 0.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_lengths() {
        assert_eq!(chain_length(0.25, 0.5).unwrap(), 3);
        assert_eq!(chain_length(1.0, 0.5).unwrap(), 2);
        // √(8/3) + 1 ≈ 2.63
        assert_eq!(chain_length(0.25, 1.0 / 3.0).unwrap(), 3);
        // β = 1/2 reduces to ⌈1/√α + 1⌉
        for p in 1..=6 {
            let alpha = 1.0 / (4.0 * p as f64);
            let expect = (1.0 / alpha.sqrt() + 1.0 - 1e-9).ceil() as usize;
            assert_eq!(chain_length(alpha, 0.5).unwrap(), expect);
            assert!(chain_length(alpha, 1.0 / 3.0).unwrap() >= 2);
        }
    }

    #[test]
    fn bound_values() {
        assert!((guarantee_bound(0.25, 0.5, 0, 0.0).unwrap() - 1.0 / 9.0).abs() < 1e-15);
        assert!((guarantee_bound(1.0, 0.5, 0, 0.0).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn general_beta_reduces_to_proof_form() {
        // √(2β) / (1/√α + 1/√(2β))² · 1/√(2β) for d = 0, eps = 0
        for &(a, b) in &[(0.25f64, 1.0 / 3.0), (0.125, 0.5), (0.5, 0.2)] {
            let s = (2.0f64 * b).sqrt();
            let proof = s / (1.0 / a.sqrt() + 1.0 / s).powi(2) / s;
            assert!((guarantee_bound(a, b, 0, 0.0).unwrap() - proof).abs() < 1e-15);
        }
    }

    #[test]
    fn gamma_example() {
        // m = 1, α = 1/4, d = 1, β = 1/2: 2 / (3 · 4) = 1/6
        assert!((density_floor(1.0, 0.25, 0.5, 1).unwrap() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn parameter_ranges() {
        assert!(guarantee_bound(0.0, 0.5, 0, 0.0).is_err());
        assert!(guarantee_bound(0.5, 0.6, 0, 0.0).is_err());
        assert!(guarantee_bound(0.5, 0.5, 0, 1.0).is_err());
        assert!(chain_length(1.5, 0.5).is_err());
    }
}
