//! Batched jet propagation with reverse accumulation.
//!
//! The trainer's hot path. Points are processed in fixed-size chunks; within
//! a chunk, each layer's pre-activations for all carried jet channels are
//! stacked into one matrix `(dim x m*C)` so the whole forward pass is a
//! handful of GEMMs. The reverse pass walks the stored per-layer records and
//! produces the exact gradient of the composite loss with respect to every
//! parameter.
//!
//! Chunk boundaries are a compile-time constant and all reductions run in
//! chunk order, so results are bit-identical regardless of how many threads
//! the surrounding trial executor uses.
//!
//! Channel blocks are laid out `[val | x | t | xx | tt]`, restricted to the
//! channels a problem actually reads (a second-derivative channel implies its
//! first-derivative base; constraints add their own needs per category).
//!
//! Backward through an activation couples the channels:
//!
//! ```text
//! dz_xx += da_xx s1
//! dz_x  += da_x  s1 + da_xx 2 s2 zx
//! dz_v  += da_v  s1 + da_x  s2 zx + da_xx (s3 zx^2 + s2 zxx)   (t analogous)
//! ```
//!
//! which is where the activation's third derivative enters.

use crate::jet::JetValue;
use crate::loss::LossBreakdown;
use crate::network::{MlpNetwork, ParamGradient};
use crate::pde::{ChannelMask, ConstraintKind, Edge, PdeProblem};
use crate::sampling::PointSet;
use ndarray::Array2;

/// Points per chunk. Fixed: changing it changes floating-point grouping.
const CHUNK: usize = 256;

/// Which jet channels a batch carries, and where each block sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Channels {
    x: Option<usize>,
    t: Option<usize>,
    xx: Option<usize>,
    tt: Option<usize>,
    count: usize,
}

impl Channels {
    fn from_mask(mask: ChannelMask) -> Self {
        let mut next = 1; // block 0 is the value channel
        let mut slot = |on: bool| {
            if on {
                let s = next;
                next += 1;
                Some(s)
            } else {
                None
            }
        };
        let x = slot(mask.x);
        let t = slot(mask.t);
        let xx = slot(mask.xx);
        let tt = slot(mask.tt);
        Channels {
            x,
            t,
            xx,
            tt,
            count: next,
        }
    }

    fn value_only() -> Self {
        Channels {
            x: None,
            t: None,
            xx: None,
            tt: None,
            count: 1,
        }
    }
}

/// Per-layer state kept for the reverse pass.
struct LayerRecord {
    /// Input to the layer (post-activation of the previous one), stacked.
    a_in: Array2<f64>,
    /// Pre-activation output, stacked. `None` for the final linear layer once
    /// its jets have been extracted.
    z: Array2<f64>,
}

/// Forward pass over one chunk. Returns the per-layer records and the output
/// jets (one per point).
fn forward_chunk(
    net: &MlpNetwork,
    pts: &[(f64, f64)],
    ch: Channels,
) -> (Vec<LayerRecord>, Vec<JetValue>) {
    let m = pts.len();
    let cols = m * ch.count;
    let mut a = Array2::<f64>::zeros((2, cols));
    for (j, &(x, t)) in pts.iter().enumerate() {
        a[[0, j]] = x;
        a[[1, j]] = t;
        if let Some(bx) = ch.x {
            a[[0, bx * m + j]] = 1.0;
        }
        if let Some(bt) = ch.t {
            a[[1, bt * m + j]] = 1.0;
        }
    }

    let last = net.layers.len() - 1;
    let mut records = Vec::with_capacity(net.layers.len());
    for (l, layer) in net.layers.iter().enumerate() {
        let mut z = layer.weights.dot(&a);
        {
            // bias feeds the value block only
            let zs = z.as_slice_mut().expect("standard layout");
            for (i, &b) in layer.bias.iter().enumerate() {
                let row = &mut zs[i * cols..i * cols + m];
                for v in row {
                    *v += b;
                }
            }
        }
        let a_next = if l < last {
            activation_forward(net, &z, m, ch)
        } else {
            z.clone()
        };
        records.push(LayerRecord { a_in: a, z });
        a = a_next;
    }

    let out = &a;
    let jets = (0..m)
        .map(|j| JetValue {
            u: out[[0, j]],
            du_dx: ch.x.map_or(0.0, |b| out[[0, b * m + j]]),
            du_dt: ch.t.map_or(0.0, |b| out[[0, b * m + j]]),
            d2u_dx2: ch.xx.map_or(0.0, |b| out[[0, b * m + j]]),
            d2u_dt2: ch.tt.map_or(0.0, |b| out[[0, b * m + j]]),
        })
        .collect();
    (records, jets)
}

fn activation_forward(net: &MlpNetwork, z: &Array2<f64>, m: usize, ch: Channels) -> Array2<f64> {
    let act = net.arch.activation;
    let rows = z.nrows();
    let cols = z.ncols();
    let mut out = Array2::<f64>::zeros((rows, cols));
    let zs = z.as_slice().expect("standard layout");
    let os = out.as_slice_mut().expect("standard layout");
    for i in 0..rows {
        let base = i * cols;
        for j in 0..m {
            let f = act.eval(zs[base + j]);
            os[base + j] = f.value;
            if let Some(bx) = ch.x {
                let zx = zs[base + bx * m + j];
                os[base + bx * m + j] = f.d1 * zx;
                if let Some(bxx) = ch.xx {
                    let zxx = zs[base + bxx * m + j];
                    os[base + bxx * m + j] = f.d2 * zx * zx + f.d1 * zxx;
                }
            }
            if let Some(bt) = ch.t {
                let zt = zs[base + bt * m + j];
                os[base + bt * m + j] = f.d1 * zt;
                if let Some(btt) = ch.tt {
                    let ztt = zs[base + btt * m + j];
                    os[base + btt * m + j] = f.d2 * zt * zt + f.d1 * ztt;
                }
            }
        }
    }
    out
}

/// Given dL/d(post-activation) and the stored pre-activation, produce
/// dL/d(pre-activation) in place.
fn activation_backward(
    net: &MlpNetwork,
    da: &mut Array2<f64>,
    z: &Array2<f64>,
    m: usize,
    ch: Channels,
) {
    let act = net.arch.activation;
    let rows = z.nrows();
    let cols = z.ncols();
    let zs = z.as_slice().expect("standard layout");
    let ds = da.as_slice_mut().expect("standard layout");
    for i in 0..rows {
        let base = i * cols;
        for j in 0..m {
            let f = act.eval(zs[base + j]);
            let mut dz_val = ds[base + j] * f.d1;
            if let Some(bx) = ch.x {
                let zx = zs[base + bx * m + j];
                let da_x = ds[base + bx * m + j];
                let mut dz_x = da_x * f.d1;
                dz_val += da_x * f.d2 * zx;
                if let Some(bxx) = ch.xx {
                    let zxx = zs[base + bxx * m + j];
                    let da_xx = ds[base + bxx * m + j];
                    dz_x += da_xx * 2.0 * f.d2 * zx;
                    dz_val += da_xx * (f.d3 * zx * zx + f.d2 * zxx);
                    ds[base + bxx * m + j] = da_xx * f.d1;
                }
                ds[base + bx * m + j] = dz_x;
            }
            if let Some(bt) = ch.t {
                let zt = zs[base + bt * m + j];
                let da_t = ds[base + bt * m + j];
                let mut dz_t = da_t * f.d1;
                dz_val += da_t * f.d2 * zt;
                if let Some(btt) = ch.tt {
                    let ztt = zs[base + btt * m + j];
                    let da_tt = ds[base + btt * m + j];
                    dz_t += da_tt * 2.0 * f.d2 * zt;
                    dz_val += da_tt * (f.d3 * zt * zt + f.d2 * ztt);
                    ds[base + btt * m + j] = da_tt * f.d1;
                }
                ds[base + bt * m + j] = dz_t;
            }
            ds[base + j] = dz_val;
        }
    }
}

/// Backward pass over one chunk: seeds are dL/d(output jet) per point.
fn backward_chunk(
    net: &MlpNetwork,
    records: Vec<LayerRecord>,
    seeds: &[JetValue],
    ch: Channels,
    grad: &mut ParamGradient,
) {
    let m = seeds.len();
    let cols = m * ch.count;
    let mut dz = Array2::<f64>::zeros((1, cols));
    for (j, s) in seeds.iter().enumerate() {
        dz[[0, j]] = s.u;
        if let Some(b) = ch.x {
            dz[[0, b * m + j]] = s.du_dx;
        }
        if let Some(b) = ch.t {
            dz[[0, b * m + j]] = s.du_dt;
        }
        if let Some(b) = ch.xx {
            dz[[0, b * m + j]] = s.d2u_dx2;
        }
        if let Some(b) = ch.tt {
            dz[[0, b * m + j]] = s.d2u_dt2;
        }
    }

    for (l, record) in records.iter().enumerate().rev() {
        let glayer = &mut grad.layers[l];
        glayer.weights += &dz.dot(&record.a_in.t());
        {
            let dzs = dz.as_slice().expect("standard layout");
            for (i, gb) in glayer.bias.iter_mut().enumerate() {
                let row = &dzs[i * cols..i * cols + m];
                *gb += row.iter().sum::<f64>();
            }
        }
        if l > 0 {
            let mut da = net.layers[l].weights.t().dot(&dz);
            activation_backward(net, &mut da, &records[l - 1].z, m, ch);
            dz = da;
        }
    }
}

/// Per-term mismatch counts used for the mean semantics of the constraint
/// losses: each term averages over the points at its own location.
fn boundary_term_counts(problem: &PdeProblem, points: &PointSet) -> Vec<usize> {
    problem
        .bc_terms
        .iter()
        .map(|term| {
            let edge_x = match term.edge {
                Edge::Left => problem.x_range.0,
                Edge::Right => problem.x_range.1,
            };
            points.boundary.iter().filter(|&&(x, _)| x == edge_x).count()
        })
        .collect()
}

fn constraint_seed_slot(kind: ConstraintKind, weight: f64, seed: &mut JetValue) {
    match kind {
        ConstraintKind::Value => seed.u += weight,
        ConstraintKind::SpaceDerivative => seed.du_dx += weight,
        ConstraintKind::TimeDerivative => seed.du_dt += weight,
    }
}

/// Composite loss and its exact parameter gradient over a point set.
pub(crate) fn loss_and_gradient(
    net: &MlpNetwork,
    points: &PointSet,
    problem: &PdeProblem,
) -> (LossBreakdown, ParamGradient) {
    let mut grad = ParamGradient::zeros_like(net);

    // collocation: residual channels
    let res_channels = Channels::from_mask(problem.channels());
    let n_r = points.collocation.len();
    let mut residual_part = 0.0;
    for chunk in points.collocation.chunks(CHUNK) {
        let (records, jets) = forward_chunk(net, chunk, res_channels);
        let mut seeds = Vec::with_capacity(jets.len());
        let mut part = 0.0;
        for (&(x, t), jet) in chunk.iter().zip(&jets) {
            let r = problem.residual(jet, x, t);
            part += r * r;
            let g = problem.residual_jet_gradient(jet, x, t);
            let w = 2.0 * r / n_r as f64;
            seeds.push(JetValue {
                u: w * g.u,
                du_dx: w * g.du_dx,
                du_dt: w * g.du_dt,
                d2u_dx2: w * g.d2u_dx2,
                d2u_dt2: w * g.d2u_dt2,
            });
        }
        residual_part += part;
        backward_chunk(net, records, &seeds, res_channels, &mut grad);
    }
    if n_r > 0 {
        residual_part /= n_r as f64;
    }

    // boundary: value plus whatever derivative kinds the terms pin
    let bc_mask = ChannelMask {
        x: problem
            .bc_terms
            .iter()
            .any(|b| b.kind == ConstraintKind::SpaceDerivative),
        t: problem
            .bc_terms
            .iter()
            .any(|b| b.kind == ConstraintKind::TimeDerivative),
        xx: false,
        tt: false,
    };
    let bc_channels = Channels::from_mask(bc_mask);
    let bc_counts = boundary_term_counts(problem, points);
    let mut bc_sums = vec![0.0; problem.bc_terms.len()];
    for chunk in points.boundary.chunks(CHUNK) {
        let (records, jets) = forward_chunk(net, chunk, bc_channels);
        let mut seeds = vec![JetValue::default(); jets.len()];
        for (j, (&(x, t), jet)) in chunk.iter().zip(&jets).enumerate() {
            for (k, term) in problem.bc_terms.iter().enumerate() {
                let edge_x = match term.edge {
                    Edge::Left => problem.x_range.0,
                    Edge::Right => problem.x_range.1,
                };
                if x != edge_x || bc_counts[k] == 0 {
                    continue;
                }
                let mismatch = term.kind.extract(jet) - (term.target)(x, t);
                bc_sums[k] += mismatch * mismatch;
                constraint_seed_slot(
                    term.kind,
                    2.0 * mismatch / bc_counts[k] as f64,
                    &mut seeds[j],
                );
            }
        }
        backward_chunk(net, records, &seeds, bc_channels, &mut grad);
    }
    let boundary_part: f64 = bc_sums
        .iter()
        .zip(&bc_counts)
        .filter(|(_, &c)| c > 0)
        .map(|(s, &c)| s / c as f64)
        .sum();

    // initial: value plus time-derivative kinds
    let ic_mask = ChannelMask {
        x: problem
            .ic_terms
            .iter()
            .any(|b| b.kind == ConstraintKind::SpaceDerivative),
        t: problem
            .ic_terms
            .iter()
            .any(|b| b.kind == ConstraintKind::TimeDerivative),
        xx: false,
        tt: false,
    };
    let ic_channels = Channels::from_mask(ic_mask);
    let n_i = points.initial.len();
    let mut ic_sums = vec![0.0; problem.ic_terms.len()];
    for chunk in points.initial.chunks(CHUNK) {
        let (records, jets) = forward_chunk(net, chunk, ic_channels);
        let mut seeds = vec![JetValue::default(); jets.len()];
        for (j, (&(x, t), jet)) in chunk.iter().zip(&jets).enumerate() {
            for (k, term) in problem.ic_terms.iter().enumerate() {
                let mismatch = term.kind.extract(jet) - (term.target)(x, t);
                ic_sums[k] += mismatch * mismatch;
                constraint_seed_slot(term.kind, 2.0 * mismatch / n_i as f64, &mut seeds[j]);
            }
        }
        backward_chunk(net, records, &seeds, ic_channels, &mut grad);
    }
    let initial_part: f64 = if n_i > 0 {
        ic_sums.iter().map(|s| s / n_i as f64).sum()
    } else {
        0.0
    };

    (
        LossBreakdown {
            total: residual_part + boundary_part + initial_part,
            residual: residual_part,
            boundary: boundary_part,
            initial: initial_part,
        },
        grad,
    )
}

/// Value-only batched forward over arbitrary points.
pub(crate) fn batch_values(net: &MlpNetwork, pts: &[(f64, f64)]) -> Vec<f64> {
    let ch = Channels::value_only();
    let mut out = Vec::with_capacity(pts.len());
    for chunk in pts.chunks(1024) {
        let m = chunk.len();
        let mut a = Array2::<f64>::zeros((2, m));
        for (j, &(x, t)) in chunk.iter().enumerate() {
            a[[0, j]] = x;
            a[[1, j]] = t;
        }
        let last = net.layers.len() - 1;
        for (l, layer) in net.layers.iter().enumerate() {
            let mut z = layer.weights.dot(&a);
            let zs = z.as_slice_mut().expect("standard layout");
            for (i, &b) in layer.bias.iter().enumerate() {
                for v in &mut zs[i * m..(i + 1) * m] {
                    *v += b;
                }
            }
            if l < last {
                a = activation_forward(net, &z, m, ch);
            } else {
                a = z;
            }
        }
        out.extend(a.row(0).iter());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::Activation;
    use crate::jet::forward_jet;
    use crate::network::{init_network, MlpArchitecture};
    use crate::pde::PdeId;
    use crate::sampling::{preset_spec, sample_points};

    #[test]
    fn batched_jets_match_single_point_path() {
        for id in PdeId::ALL {
            let problem = PdeProblem::new(id);
            let ch = Channels::from_mask(problem.channels());
            let net = init_network(MlpArchitecture::new(10, 3, Activation::Tanh, 0.5), 4);
            let pts: Vec<(f64, f64)> = (0..7)
                .map(|i| {
                    let s = i as f64 / 7.0;
                    (
                        problem.x_range.0 + (problem.x_range.1 - problem.x_range.0) * (0.1 + 0.8 * s),
                        problem.t_range.0 + (problem.t_range.1 - problem.t_range.0) * (0.9 - 0.8 * s),
                    )
                })
                .collect();
            let (_, jets) = forward_chunk(&net, &pts, ch);
            for (&(x, t), jet) in pts.iter().zip(&jets) {
                let reference = forward_jet(&net, x, t);
                assert!((jet.u - reference.u).abs() < 1e-12);
                if ch.x.is_some() {
                    assert!((jet.du_dx - reference.du_dx).abs() < 1e-12);
                }
                if ch.t.is_some() {
                    assert!((jet.du_dt - reference.du_dt).abs() < 1e-12);
                }
                if ch.xx.is_some() {
                    assert!((jet.d2u_dx2 - reference.d2u_dx2).abs() < 1e-11);
                }
                if ch.tt.is_some() {
                    assert!((jet.d2u_dt2 - reference.d2u_dt2).abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn batch_values_match_forward_value() {
        let net = init_network(MlpArchitecture::new(12, 4, Activation::Swish, 0.5), 8);
        let pts: Vec<(f64, f64)> = (0..20)
            .map(|i| (i as f64 * 0.05 - 0.5, 1.0 - i as f64 * 0.04))
            .collect();
        let batched = batch_values(&net, &pts);
        for (&(x, t), v) in pts.iter().zip(&batched) {
            assert!((v - net.forward_value(x, t)).abs() < 1e-12);
        }
    }

    #[test]
    fn chunking_does_not_change_results() {
        // more points than one chunk, exercising the chunk-order reduction
        let problem = PdeProblem::new(PdeId::Reaction);
        let spec = preset_spec(PdeId::Reaction, "random", 7).unwrap();
        let points = sample_points(&problem, &spec).unwrap();
        let net = init_network(MlpArchitecture::new(8, 3, Activation::Tanh, 0.5), 2);
        let (a_loss, a_grad) = loss_and_gradient(&net, &points, &problem);
        let (b_loss, b_grad) = loss_and_gradient(&net, &points, &problem);
        assert_eq!(a_loss.total.to_bits(), b_loss.total.to_bits());
        assert_eq!(a_grad, b_grad);
    }
}
