//! Second-order jet propagation through a network.
//!
//! A jet bundles a function value with its first and second derivatives with
//! respect to the two network inputs. Propagating the jet forward through
//! every layer yields u, du/dx, du/dt, d2u/dx2 and d2u/dt2 in a single pass —
//! exact to floating point, no tape required. The mixed derivative d2u/dxdt
//! is not carried: no benchmark operator uses it.
//!
//! For a linear layer the five components transform independently; through an
//! activation they couple by the chain rule:
//!
//! ```text
//! a    = f(z)
//! a_x  = f'(z) z_x
//! a_xx = f''(z) z_x^2 + f'(z) z_xx      (t analogous)
//! ```

use crate::network::MlpNetwork;
use serde::{Deserialize, Serialize};

/// Network output with its input derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JetValue {
    pub u: f64,
    pub du_dx: f64,
    pub du_dt: f64,
    pub d2u_dx2: f64,
    pub d2u_dt2: f64,
}

impl JetValue {
    pub fn constant(u: f64) -> Self {
        JetValue {
            u,
            ..JetValue::default()
        }
    }
}

/// Anything that can evaluate a solution jet at a point. Implemented by
/// networks and, in tests, by analytic solution stubs.
pub trait JetEvaluator {
    fn jet_at(&self, x: f64, t: f64) -> JetValue;
}

impl JetEvaluator for MlpNetwork {
    fn jet_at(&self, x: f64, t: f64) -> JetValue {
        forward_jet(self, x, t)
    }
}

/// Evaluate the network and its first/second input derivatives at `(x, t)`.
///
/// Reference single-point path; the trainer uses a batched equivalent that is
/// cross-checked against this one.
pub fn forward_jet(net: &MlpNetwork, x: f64, t: f64) -> JetValue {
    let mut val = vec![x, t];
    let mut dx = vec![1.0, 0.0];
    let mut dt = vec![0.0, 1.0];
    let mut dxx = vec![0.0, 0.0];
    let mut dtt = vec![0.0, 0.0];

    let last = net.layers.len() - 1;
    for (i, layer) in net.layers.iter().enumerate() {
        let out = layer.out_dim();
        let mut z = vec![0.0; out];
        let mut zx = vec![0.0; out];
        let mut zt = vec![0.0; out];
        let mut zxx = vec![0.0; out];
        let mut ztt = vec![0.0; out];
        for j in 0..out {
            let mut acc = layer.bias[j];
            let (mut ax, mut at, mut axx, mut att) = (0.0, 0.0, 0.0, 0.0);
            for k in 0..layer.in_dim() {
                let w = layer.weights[[j, k]];
                acc += w * val[k];
                ax += w * dx[k];
                at += w * dt[k];
                axx += w * dxx[k];
                att += w * dtt[k];
            }
            z[j] = acc;
            zx[j] = ax;
            zt[j] = at;
            zxx[j] = axx;
            ztt[j] = att;
        }
        if i < last {
            for j in 0..out {
                let f = net.arch.activation.eval(z[j]);
                z[j] = f.value;
                zxx[j] = f.d2 * zx[j] * zx[j] + f.d1 * zxx[j];
                ztt[j] = f.d2 * zt[j] * zt[j] + f.d1 * ztt[j];
                zx[j] *= f.d1;
                zt[j] *= f.d1;
            }
        }
        val = z;
        dx = zx;
        dt = zt;
        dxx = zxx;
        dtt = ztt;
    }

    JetValue {
        u: val[0],
        du_dx: dx[0],
        du_dt: dt[0],
        d2u_dx2: dxx[0],
        d2u_dt2: dtt[0],
    }
}
