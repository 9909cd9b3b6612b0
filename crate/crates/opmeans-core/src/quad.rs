//! Gauss–Legendre quadrature, used to integrate matrix-valued curves
//! against density measures on [0, 1]. Thirty-three nodes integrate the
//! geodesic weight profiles arising here to full double precision.

pub const DEFAULT_NODES: usize = 33;

/// Nodes and weights for ∫ f over a fixed interval.
#[derive(Clone, Debug)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Legendre polynomial value and derivative at x by the three-term
/// recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre rule with `n` nodes on [−1, 1], by Newton iteration from
/// the Chebyshev initial guesses.
pub fn gauss_legendre(n: usize) -> Quadrature {
    assert!(n >= 1, "quadrature needs at least one node");
    if n == 1 {
        return Quadrature {
            nodes: vec![0.0],
            weights: vec![2.0],
        };
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes[n - 1 - k] = x;
        weights[n - 1 - k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    Quadrature { nodes, weights }
}

impl Quadrature {
    /// Affinely transplant the rule onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> Quadrature {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        Quadrature {
            nodes: self.nodes.iter().map(|&x| mid + half * x).collect(),
            weights: self.weights.iter().map(|&w| w * half).collect(),
        }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// The default rule on [0, 1].
pub fn unit_rule() -> Quadrature {
    gauss_legendre(DEFAULT_NODES).mapped(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1, 2, 5, 33] {
            let q = gauss_legendre(n);
            let total: f64 = q.weights.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "n={n}: {total}");
        }
    }

    #[test]
    fn nodes_are_symmetric_and_sorted() {
        let q = gauss_legendre(33);
        for k in 1..33 {
            assert!(q.nodes[k] > q.nodes[k - 1]);
        }
        for k in 0..33 {
            assert!((q.nodes[k] + q.nodes[32 - k]).abs() < 1e-14);
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let q = gauss_legendre(5).mapped(0.0, 1.0);
        for k in 0..10 {
            let val = q.integrate(|x| x.powi(k));
            let exact = 1.0 / (k as f64 + 1.0);
            assert!((val - exact).abs() < 1e-14, "x^{k}: {val} vs {exact}");
        }
    }

    #[test]
    fn reproduces_the_logarithmic_mean() {
        // ∫_0^1 a^{1−t} b^t dt = (b − a)/(log b − log a); at (1, e) this is e − 1.
        let q = unit_rule();
        let val = q.integrate(|t| std::f64::consts::E.powf(t));
        assert!((val - (std::f64::consts::E - 1.0)).abs() < 1e-14);
        let (a, b): (f64, f64) = (0.3, 7.0);
        let val = q.integrate(|t| a.powf(1.0 - t) * b.powf(t));
        let exact = (b - a) / (b.ln() - a.ln());
        assert!((val - exact).abs() < 1e-13 * exact);
    }
}
