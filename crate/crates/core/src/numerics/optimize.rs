use serde::{Deserialize, Serialize};

use super::{norm, NumericsError, Result};

/// A differentiable objective over `R^D`.
pub trait Objective {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
}

/// Adapts a pair of closures into an [`Objective`].
pub struct FnObjective<F, G> {
    pub value: F,
    pub gradient: G,
}

impl<F, G> Objective for FnObjective<F, G>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Projection {
    None,
    UnitSphere,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub learning_rate: f64,
    pub max_iterations: usize,
    /// Stop once `|F_t − F_{t−1}|` falls below this.
    pub tolerance: f64,
    pub projection: Projection,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            learning_rate: 0.01,
            max_iterations: 300,
            tolerance: 1e-6,
            projection: Projection::None,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(NumericsError::InvalidArgument("learning rate must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(NumericsError::InvalidArgument("max iterations must be positive".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(NumericsError::InvalidArgument("tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    /// Lowest-objective iterate visited (the start point included).
    pub x: Vec<f64>,
    pub value: f64,
    /// Objective value at the start and after every step.
    pub trace: Vec<f64>,
    pub converged: bool,
}

fn project(x: &mut [f64], projection: Projection, iteration: usize) -> Result<()> {
    if projection == Projection::UnitSphere {
        let n = norm(x);
        if !(n > 0.0) || !n.is_finite() {
            return Err(NumericsError::NonFinite { iteration });
        }
        x.iter_mut().for_each(|v| *v /= n);
    }
    Ok(())
}

/// Plain gradient descent with optional renormalization onto the unit
/// sphere after every step.
///
/// Returns the best iterate seen, so the result never scores worse than the
/// (projected) starting point even when a step overshoots.
pub fn minimize(f: &dyn Objective, x0: &[f64], cfg: &OptimizerConfig) -> Result<Minimum> {
    cfg.validate()?;
    let mut x = x0.to_vec();
    project(&mut x, cfg.projection, 0)?;
    let mut current = f.value(&x);
    if !current.is_finite() {
        return Err(NumericsError::NonFinite { iteration: 0 });
    }
    let mut trace = vec![current];
    let mut best = (x.clone(), current);
    let mut converged = false;

    for iteration in 1..=cfg.max_iterations {
        let grad = f.gradient(&x);
        if grad.len() != x.len() || grad.iter().any(|g| !g.is_finite()) {
            return Err(NumericsError::NonFinite { iteration });
        }
        for (xi, gi) in x.iter_mut().zip(&grad) {
            *xi -= cfg.learning_rate * gi;
        }
        project(&mut x, cfg.projection, iteration)?;
        let next = f.value(&x);
        if !next.is_finite() {
            return Err(NumericsError::NonFinite { iteration });
        }
        trace.push(next);
        if next < best.1 {
            best = (x.clone(), next);
        }
        let delta = (next - current).abs();
        current = next;
        if delta < cfg.tolerance {
            converged = true;
            break;
        }
    }
    Ok(Minimum {
        x: best.0,
        value: best.1,
        trace,
        converged,
    })
}

/// Largest component-wise relative error between the analytic gradient and
/// central finite differences with step `h`.
///
/// Relative error is `|a − n| / max(1e-8, |a| + |n|)`.
pub fn grad_check(f: &dyn Objective, x: &[f64], h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(NumericsError::InvalidArgument(
            "finite-difference step must be positive".into(),
        ));
    }
    let analytic = f.gradient(x);
    if analytic.len() != x.len() {
        return Err(NumericsError::DimensionMismatch(format!(
            "gradient has {} components for a {}-vector",
            analytic.len(),
            x.len()
        )));
    }
    let mut probe = x.to_vec();
    let mut worst: f64 = 0.0;
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = f.value(&probe);
        probe[i] = x[i] - h;
        let down = f.value(&probe);
        probe[i] = x[i];
        let numeric = (up - down) / (2.0 * h);
        let err = (analytic[i] - numeric).abs() / (analytic[i].abs() + numeric.abs()).max(1e-8);
        worst = worst.max(err);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bowl() -> impl Objective {
        FnObjective {
            value: |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>(),
            gradient: |x: &[f64]| x.iter().map(|v| 2.0 * v).collect::<Vec<_>>(),
        }
    }

    #[test]
    fn convex_bowl_reaches_origin() {
        let cfg = OptimizerConfig {
            learning_rate: 0.1,
            tolerance: 1e-12,
            ..Default::default()
        };
        let m = minimize(&bowl(), &[1.0, 1.0], &cfg).unwrap();
        assert!(norm(&m.x) < 1e-3);
        assert!(m.converged);
    }

    #[test]
    fn constant_stops_immediately() {
        let f = FnObjective {
            value: |_: &[f64]| 3.0,
            gradient: |x: &[f64]| vec![0.0; x.len()],
        };
        let m = minimize(&f, &[0.5, -2.0], &OptimizerConfig::default()).unwrap();
        assert_eq!(m.x, vec![0.5, -2.0]);
        assert_eq!(m.trace.len(), 2);
    }

    #[test]
    fn small_steps_are_monotone() {
        let cfg = OptimizerConfig {
            learning_rate: 1e-3,
            tolerance: 1e-15,
            max_iterations: 200,
            ..Default::default()
        };
        let m = minimize(&bowl(), &[0.3, -0.7, 2.0], &cfg).unwrap();
        assert!(m.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn sphere_projection_keeps_unit_norm() {
        // minimize x₀ on the sphere → (-1, 0)
        let f = FnObjective {
            value: |x: &[f64]| x[0],
            gradient: |_: &[f64]| vec![1.0, 0.0],
        };
        let cfg = OptimizerConfig {
            learning_rate: 0.1,
            max_iterations: 1000,
            tolerance: 1e-14,
            projection: Projection::UnitSphere,
        };
        let m = minimize(&f, &[0.6, 0.8], &cfg).unwrap();
        assert!((norm(&m.x) - 1.0).abs() < 1e-12);
        assert!(m.x[0] < -0.99);
    }

    #[test]
    fn non_finite_objective_is_an_error() {
        let f = FnObjective {
            value: |x: &[f64]| if x[0] < 0.5 { f64::NAN } else { x[0] },
            gradient: |_: &[f64]| vec![1.0],
        };
        let cfg = OptimizerConfig {
            learning_rate: 1.0,
            ..Default::default()
        };
        assert_eq!(
            minimize(&f, &[1.0], &cfg).unwrap_err(),
            NumericsError::NonFinite { iteration: 1 }
        );
    }

    #[test]
    fn grad_check_linear_and_quadratic() {
        let linear = FnObjective {
            value: |x: &[f64]| 3.0 * x[0] - 2.0 * x[1] + 0.5 * x[2],
            gradient: |_: &[f64]| vec![3.0, -2.0, 0.5],
        };
        assert!(grad_check(&linear, &[0.1, 0.2, 0.3], 1e-5).unwrap() <= 1e-10);
        assert!(grad_check(&bowl(), &[0.37, -1.2, 0.05], 1e-5).unwrap() <= 1e-6);
        let wrong = FnObjective {
            value: |x: &[f64]| x[0] * x[0],
            gradient: |x: &[f64]| vec![x[0]],
        };
        assert!(grad_check(&wrong, &[1.0], 1e-5).unwrap() > 0.3);
    }
}
