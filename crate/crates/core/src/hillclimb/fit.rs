use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: f64,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub stderr: f64,
    /// `ln` of the prefactor.
    pub intercept: f64,
}

/// Weighted least squares of `ln(mean)` on `ln(n)`.
///
/// The log-scale variance of a point is approximated by `(std / mean)^2`.
/// With every `std` zero the fit is unweighted and the standard error comes
/// from the residuals; zero `std` next to positive ones is raised to the
/// smallest positive relative spread.
pub fn fit_scaling_exponent(points: &[ScalingPoint]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::invalid(
            "points",
            format!("need >= 3 points, got {}", points.len()),
        ));
    }
    if let Some(p) = points
        .iter()
        .find(|p| !(p.n > 0.0 && p.mean > 0.0 && p.std >= 0.0 && p.n.is_finite() && p.mean.is_finite()))
    {
        return Err(Error::invalid("points", format!("need positive n and mean, got {p:?}")));
    }
    let rel: Vec<f64> = points.iter().map(|p| p.std / p.mean).collect();
    let floor = rel.iter().copied().filter(|r| *r > 0.0).fold(f64::INFINITY, f64::min);
    let known_variance = floor.is_finite();
    let weights: Vec<f64> = rel
        .iter()
        .map(|&r| {
            if known_variance {
                1.0 / r.max(floor).powi(2)
            } else {
                1.0
            }
        })
        .collect();
    let xs: Vec<f64> = points.iter().map(|p| p.n.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean.ln()).collect();

    let sw: f64 = weights.iter().sum();
    let xbar = weights.iter().zip(&xs).map(|(w, x)| w * x).sum::<f64>() / sw;
    let ybar = weights.iter().zip(&ys).map(|(w, y)| w * y).sum::<f64>() / sw;
    let sxx: f64 = weights.iter().zip(&xs).map(|(w, x)| w * (x - xbar).powi(2)).sum();
    let sxy: f64 = weights
        .iter()
        .zip(xs.iter().zip(&ys))
        .map(|(w, (x, y))| w * (x - xbar) * (y - ybar))
        .sum();
    if sxx.is_nan() || sxx <= 1e-12 * sw {
        return Err(Error::Degenerate("all points share the same n".into()));
    }
    let exponent = sxy / sxx;
    let intercept = ybar - exponent * xbar;
    let stderr = if known_variance {
        (1.0 / sxx).sqrt()
    } else {
        let rss: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - intercept - exponent * x).powi(2))
            .sum();
        (rss / (points.len() - 2) as f64 / sxx).sqrt()
    };
    Ok(ScalingFit {
        exponent,
        stderr,
        intercept,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn exact_power_law() {
        let pts: Vec<ScalingPoint> = [10.0, 30.0, 100.0, 300.0, 1000.0]
            .iter()
            .map(|&n: &f64| ScalingPoint {
                n,
                mean: 7.0 * n.powf(1.5),
                std: 0.0,
            })
            .collect();
        let fit = fit_scaling_exponent(&pts).unwrap();
        assert!((fit.exponent - 1.5).abs() < 1e-9);
        assert!((fit.intercept - 7f64.ln()).abs() < 1e-9);
        assert!(fit.stderr < 1e-9);
    }

    #[test]
    fn noisy_quadratic() {
        let mut rng = stream(12, 0);
        let noise = Normal::new(0.0, 0.05).unwrap();
        let pts: Vec<ScalingPoint> = [100.0, 200.0, 400.0, 800.0, 1600.0, 3200.0]
            .iter()
            .map(|&n: &f64| {
                let mean = n * n * (1.0 + noise.sample(&mut rng));
                ScalingPoint {
                    n,
                    mean,
                    std: 0.05 * mean,
                }
            })
            .collect();
        let fit = fit_scaling_exponent(&pts).unwrap();
        assert!((fit.exponent - 2.0).abs() < 3.0 * fit.stderr, "{fit:?}");
        assert!(fit.stderr > 0.0 && fit.stderr < 0.1);
    }

    #[test]
    fn rejects_bad_input() {
        let p = |n, mean| ScalingPoint { n, mean, std: 1.0 };
        assert!(fit_scaling_exponent(&[p(1.0, 1.0), p(2.0, 2.0)]).is_err());
        assert!(fit_scaling_exponent(&[p(1.0, 1.0), p(2.0, -2.0), p(3.0, 1.0)]).is_err());
        assert!(matches!(
            fit_scaling_exponent(&[p(5.0, 1.0), p(5.0, 2.0), p(5.0, 3.0)]),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn weights_favour_precise_points() {
        let pts = [
            ScalingPoint {
                n: 10.0,
                mean: 10.0,
                std: 0.01,
            },
            ScalingPoint {
                n: 100.0,
                mean: 100.0,
                std: 0.1,
            },
            ScalingPoint {
                n: 1000.0,
                mean: 5000.0,
                std: 4000.0,
            },
        ];
        let fit = fit_scaling_exponent(&pts).unwrap();
        assert!((fit.exponent - 1.0).abs() < 0.05, "{fit:?}");
    }
}
