//! Cole–Hopf reference solution for the Burgers benchmark.
//!
//! With initial data u(x,0) = -sin(pi x) and viscosity nu, the Cole–Hopf
//! transform gives
//!
//! ```text
//!            integral sin(pi(x-eta)) f(x-eta) exp(-eta^2/4 nu t) d eta
//! u(x,t) = - ---------------------------------------------------------
//!            integral            f(x-eta) exp(-eta^2/4 nu t) d eta
//!
//! f(y)   = exp(-cos(pi y) / (2 pi nu))
//! ```
//!
//! Substituting eta = 2 sqrt(nu t) z turns both integrals into the
//! Gauss–Hermite form `integral g(z) exp(-z^2) dz`, evaluated here with a
//! fixed node count. Stability is checked by doubling the node count.

use super::BURGERS_NU;
use std::f64::consts::PI;

/// Gauss–Hermite quadrature bound to the Burgers initial data.
pub struct ColeHopf {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl ColeHopf {
    pub fn with_nodes(n: usize) -> Self {
        let (nodes, weights) = gauss_hermite(n);
        ColeHopf { nodes, weights }
    }

    pub fn value(&self, x: f64, t: f64) -> f64 {
        if t <= 0.0 {
            return -(PI * x).sin();
        }
        let s = 2.0 * (BURGERS_NU * t).sqrt();
        let inv_two_pi_nu = 1.0 / (2.0 * PI * BURGERS_NU);
        let mut num = 0.0;
        let mut den = 0.0;
        for (&z, &w) in self.nodes.iter().zip(&self.weights) {
            let y = x - s * z;
            let f = (-(PI * y).cos() * inv_two_pi_nu).exp();
            num += w * (PI * y).sin() * f;
            den += w * f;
        }
        -num / den
    }
}

/// Nodes and weights of n-point Gauss–Hermite quadrature (weight e^{-x^2}).
///
/// Roots of the degree-n Hermite polynomial by Newton iteration on the
/// orthonormal three-term recurrence (which stays O(1) in magnitude, so no
/// overflow at large n); weights w_i = 1 / (n * h_{n-1}(x_i)^2).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "need at least two quadrature nodes");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    let nf = n as f64;

    let mut z = 0.0;
    for i in 0..half {
        // classic initial guesses, largest root first
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        for _ in 0..100 {
            let (h, h_deriv, _) = orthonormal_hermite(n, z);
            let dz = h / h_deriv;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, _, h_prev) = orthonormal_hermite(n, z);
        nodes[i] = z;
        weights[i] = 1.0 / (nf * h_prev * h_prev);
        nodes[n - 1 - i] = -z;
        weights[n - 1 - i] = weights[i];
    }
    if n % 2 == 1 {
        nodes[half - 1] = 0.0;
        let (_, _, prev) = orthonormal_hermite(n, 0.0);
        weights[half - 1] = 1.0 / (nf * prev * prev);
    }
    // ascending order
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// Evaluate the orthonormal Hermite polynomial h_n and its derivative at x.
/// Returns (h_n, h_n', h_{n-1}).
fn orthonormal_hermite(n: usize, x: f64) -> (f64, f64, f64) {
    let mut h_prev = std::f64::consts::PI.powf(-0.25);
    let mut h = (2.0f64).sqrt() * x * h_prev;
    for k in 1..n {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * h - (kf / (kf + 1.0)).sqrt() * h_prev;
        h_prev = h;
        h = next;
    }
    let deriv = (2.0 * n as f64).sqrt() * h_prev;
    (h, deriv, h_prev)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_rule_is_exact() {
        let (nodes, weights) = gauss_hermite(2);
        let expected = 1.0 / (2.0f64).sqrt();
        assert!((nodes[0] + expected).abs() < 1e-14);
        assert!((nodes[1] - expected).abs() < 1e-14);
        let half_sqrt_pi = PI.sqrt() / 2.0;
        assert!((weights[0] - half_sqrt_pi).abs() < 1e-14);
        assert!((weights[1] - half_sqrt_pi).abs() < 1e-14);
    }

    #[test]
    fn moments_match_for_large_rules() {
        for n in [50, 200, 400] {
            let (nodes, weights) = gauss_hermite(n);
            let m0: f64 = weights.iter().sum();
            let m2: f64 = nodes
                .iter()
                .zip(&weights)
                .map(|(x, w)| w * x * x)
                .sum();
            let m4: f64 = nodes
                .iter()
                .zip(&weights)
                .map(|(x, w)| w * x.powi(4))
                .sum();
            let sqrt_pi = PI.sqrt();
            assert!((m0 - sqrt_pi).abs() / sqrt_pi < 1e-12, "n={n}: m0={m0}");
            assert!((m2 - sqrt_pi / 2.0).abs() / sqrt_pi < 1e-12, "n={n}: m2={m2}");
            assert!(
                (m4 - 3.0 * sqrt_pi / 4.0).abs() / sqrt_pi < 1e-12,
                "n={n}: m4={m4}"
            );
        }
    }

    #[test]
    fn nodes_are_symmetric_and_sorted() {
        let (nodes, weights) = gauss_hermite(200);
        for i in 0..100 {
            assert!((nodes[i] + nodes[199 - i]).abs() < 1e-13);
            assert!((weights[i] - weights[199 - i]).abs() <= weights[i] * 1e-12);
        }
        assert!(nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn initial_slice_matches_initial_condition() {
        let q = ColeHopf::with_nodes(200);
        for x in [-0.9, -0.3, 0.0, 0.5, 1.0] {
            assert!((q.value(x, 0.0) + (PI * x).sin()).abs() < 1e-15);
            // continuity into t > 0
            assert!((q.value(x, 1e-8) + (PI * x).sin()).abs() < 1e-6);
        }
    }

    #[test]
    fn boundary_values_stay_near_zero() {
        let q = ColeHopf::with_nodes(200);
        for t in [0.1, 0.5, 1.0, 5.0 / PI] {
            assert!(q.value(-1.0, t).abs() < 1e-9, "u(-1,{t})");
            assert!(q.value(1.0, t).abs() < 1e-9, "u(1,{t})");
        }
    }

    #[test]
    fn odd_symmetry_in_x() {
        let q = ColeHopf::with_nodes(200);
        for t in [0.2, 0.8] {
            for x in [0.1, 0.4, 0.75] {
                assert!((q.value(x, t) + q.value(-x, t)).abs() < 1e-9);
            }
        }
    }
}
