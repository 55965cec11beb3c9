//! One-dimensional rules used across the crate.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

/// Nodes and weights of a 1-D rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Gauss-Legendre rule of the given order on `[a, b]`.
pub fn gauss_legendre(order: usize, a: f64, b: f64) -> Rule {
    let order = NonZeroUsize::new(order).expect("rule order must be positive");
    let gl = GaussLegendre::new(order);
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut pairs: Vec<(f64, f64)> =
        gl.as_node_weight_pairs().iter().map(|&(x, w)| (mid + half * x, half * w)).collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Rule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
}

/// Composite Gauss-Legendre over consecutive panels `[breaks[i], breaks[i+1]]`.
pub fn composite_gauss_legendre(breaks: &[f64], order: usize) -> Rule {
    let mut rule = Rule { nodes: Vec::new(), weights: Vec::new() };
    for pair in breaks.windows(2) {
        let panel = gauss_legendre(order, pair[0], pair[1]);
        rule.nodes.extend(panel.nodes);
        rule.weights.extend(panel.weights);
    }
    rule
}

/// `count + 1` breakpoints from `lo` to `hi`, equally spaced in `log`.
pub fn log_breaks(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count > 0);
    let (a, b) = (lo.ln(), hi.ln());
    (0..=count).map(|i| (a + (b - a) * i as f64 / count as f64).exp()).collect()
}

/// Trapezoid rule on `n + 1` equispaced nodes over `[-radius, radius]`.
///
/// For integrands that decay to rounding level inside the interval this is
/// spectrally accurate, including oscillating complex Gaussians.
pub fn trapezoid_symmetric(radius: f64, n: usize) -> Rule {
    assert!(n >= 2 && radius > 0.0);
    let h = 2.0 * radius / n as f64;
    let nodes: Vec<f64> = (0..=n).map(|i| -radius + h * i as f64).collect();
    let mut weights = vec![h; n + 1];
    weights[0] *= 0.5;
    weights[n] *= 0.5;
    Rule { nodes, weights }
}
