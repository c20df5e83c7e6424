//! MLP definition, seeded initialization and parameter handling.
//!
//! Networks map (x, t) to a scalar u. `depth` counts hidden layers; the
//! output layer is linear. Weights are Glorot-uniform from a ChaCha stream
//! keyed by `init_seed`, biases start at zero, so two networks built from the
//! same (architecture, seed) are bit-identical.

use crate::activation::Activation;
use ndarray::{Array1, Array2};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

pub const INPUT_DIM: usize = 2;
pub const OUTPUT_DIM: usize = 1;

/// One point of the search space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlpArchitecture {
    /// Neurons per hidden layer.
    pub width: usize,
    /// Number of hidden layers.
    pub depth: usize,
    pub activation: Activation,
    /// Fraction of the epoch budget trained with Adam before switching to
    /// L-BFGS.
    pub changing_point: f64,
}

impl MlpArchitecture {
    pub fn new(width: usize, depth: usize, activation: Activation, changing_point: f64) -> Self {
        Self {
            width,
            depth,
            activation,
            changing_point,
        }
    }

    /// Short human-readable tag, e.g. `464x5-tanh-cp0.5`.
    pub fn tag(&self) -> String {
        format!(
            "{}x{}-{}-cp{}",
            self.width, self.depth, self.activation, self.changing_point
        )
    }
}

/// A dense layer computing `z = W a + b`, weights stored `(out_dim, in_dim)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Layer {
    pub fn out_dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn in_dim(&self) -> usize {
        self.weights.ncols()
    }

    pub fn n_params(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpNetwork {
    pub arch: MlpArchitecture,
    /// `depth + 1` layers: input->width, (width->width) x (depth-1), width->1.
    pub layers: Vec<Layer>,
    pub init_seed: u64,
}

/// Glorot-uniform initialization, zero biases.
pub fn init_network(arch: MlpArchitecture, seed: u64) -> MlpNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dims = Vec::with_capacity(arch.depth + 2);
    dims.push(INPUT_DIM);
    dims.extend(std::iter::repeat(arch.width).take(arch.depth));
    dims.push(OUTPUT_DIM);

    let layers = dims
        .windows(2)
        .map(|w| {
            let (fan_in, fan_out) = (w[0], w[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let mut weights = Vec::with_capacity(fan_in * fan_out);
            for _ in 0..fan_in * fan_out {
                weights.push((2.0 * unit_uniform(&mut rng) - 1.0) * limit);
            }
            Layer {
                weights: Array2::from_shape_vec((fan_out, fan_in), weights)
                    .expect("dims match weight count"),
                bias: Array1::zeros(fan_out),
            }
        })
        .collect();

    MlpNetwork {
        arch,
        layers,
        init_seed: seed,
    }
}

/// Uniform f64 in [0, 1) built from the top 53 bits of the ChaCha stream.
/// Constructed by hand so the value stream is pinned by this crate, not by a
/// distribution crate's internals.
fn unit_uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

impl MlpNetwork {
    pub fn n_params(&self) -> usize {
        self.layers.iter().map(Layer::n_params).sum()
    }

    /// Plain forward pass (no derivatives).
    pub fn forward_value(&self, x: f64, t: f64) -> f64 {
        let mut a = vec![x, t];
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = vec![0.0; layer.out_dim()];
            for (j, zj) in z.iter_mut().enumerate() {
                let mut acc = layer.bias[j];
                for (k, ak) in a.iter().enumerate() {
                    acc += layer.weights[[j, k]] * ak;
                }
                *zj = acc;
            }
            if i < last {
                for zj in z.iter_mut() {
                    *zj = self.arch.activation.value(*zj);
                }
            }
            a = z;
        }
        a[0]
    }

    /// All parameters as one flat vector: per layer, row-major weights then
    /// biases. The optimizers work on this representation.
    pub fn flat_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for layer in &self.layers {
            out.extend(layer.weights.iter());
            out.extend(layer.bias.iter());
        }
        out
    }

    /// Inverse of [`flat_params`](Self::flat_params).
    pub fn set_flat_params(&mut self, params: &[f64]) {
        assert_eq!(params.len(), self.n_params(), "parameter count mismatch");
        let mut offset = 0;
        for layer in &mut self.layers {
            let nw = layer.weights.len();
            layer
                .weights
                .as_slice_mut()
                .expect("standard layout")
                .copy_from_slice(&params[offset..offset + nw]);
            offset += nw;
            let nb = layer.bias.len();
            layer
                .bias
                .as_slice_mut()
                .expect("standard layout")
                .copy_from_slice(&params[offset..offset + nb]);
            offset += nb;
        }
    }
}

/// Per-layer gradient tensors, shape-congruent with the owning network.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGradient {
    pub layers: Vec<Layer>,
}

impl ParamGradient {
    pub fn zeros_like(net: &MlpNetwork) -> Self {
        ParamGradient {
            layers: net
                .layers
                .iter()
                .map(|l| Layer {
                    weights: Array2::zeros(l.weights.raw_dim()),
                    bias: Array1::zeros(l.bias.raw_dim()),
                })
                .collect(),
        }
    }

    pub fn add_assign(&mut self, other: &ParamGradient) {
        assert_eq!(self.layers.len(), other.layers.len());
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            a.weights += &b.weights;
            a.bias += &b.bias;
        }
    }

    /// Same layout as [`MlpNetwork::flat_params`].
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for layer in &self.layers {
            out.extend(layer.weights.iter());
            out.extend(layer.bias.iter());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arch(width: usize, depth: usize) -> MlpArchitecture {
        MlpArchitecture::new(width, depth, Activation::Tanh, 0.5)
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let a = init_network(arch(16, 3), 42);
        let b = init_network(arch(16, 3), 42);
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let a = init_network(arch(16, 3), 1);
        let b = init_network(arch(16, 3), 2);
        assert_ne!(a, b);
    }

    #[test]
    fn layer_shapes_follow_architecture() {
        let net = init_network(arch(24, 4), 0);
        let dims: Vec<(usize, usize)> = net
            .layers
            .iter()
            .map(|l| (l.out_dim(), l.in_dim()))
            .collect();
        assert_eq!(dims, vec![(24, 2), (24, 24), (24, 24), (24, 24), (1, 24)]);
        for layer in &net.layers {
            assert!(layer.bias.iter().all(|&b| b == 0.0));
        }
    }

    #[test]
    fn weights_respect_glorot_bound() {
        let net = init_network(arch(16, 3), 7);
        for layer in &net.layers {
            let limit = (6.0 / (layer.in_dim() + layer.out_dim()) as f64).sqrt();
            for &w in layer.weights.iter() {
                assert!(w.abs() <= limit, "weight {w} exceeds Glorot bound {limit}");
            }
        }
    }

    #[test]
    fn flat_params_round_trip() {
        let mut net = init_network(arch(8, 3), 3);
        let p = net.flat_params();
        assert_eq!(p.len(), net.n_params());
        let mut copy = net.clone();
        let mut bumped = p.clone();
        for v in bumped.iter_mut() {
            *v += 0.125;
        }
        copy.set_flat_params(&bumped);
        assert_ne!(net, copy);
        net.set_flat_params(&bumped);
        assert_eq!(net, copy);
        assert_eq!(net.flat_params(), bumped);
    }
}
