//! Composite training loss: residual + boundary + initial.
//!
//! Each part is a mean of squared mismatches and the total is their
//! unweighted sum. Boundary and initial losses average per constraint term
//! over the points at that term's location, then the term losses add — so
//! duplicating every sample point leaves every part unchanged.
//!
//! [`composite_loss`] is the single-point reference path, generic over any
//! jet evaluator (tests feed it analytic solution stubs). [`loss_gradient`]
//! is the batched path the trainer uses; the two are cross-checked.

use crate::batch;
use crate::jet::JetEvaluator;
use crate::network::{MlpNetwork, ParamGradient};
use crate::pde::{Edge, PdeProblem};
use crate::sampling::PointSet;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub total: f64,
    pub residual: f64,
    pub boundary: f64,
    pub initial: f64,
}

/// Mean-squared residual, boundary and initial losses of an evaluator over a
/// point set.
pub fn composite_loss<E: JetEvaluator>(
    evaluator: &E,
    points: &PointSet,
    problem: &PdeProblem,
) -> LossBreakdown {
    let mut residual = 0.0;
    for &(x, t) in &points.collocation {
        let r = problem.residual(&evaluator.jet_at(x, t), x, t);
        residual += r * r;
    }
    if !points.collocation.is_empty() {
        residual /= points.collocation.len() as f64;
    }

    let mut boundary = 0.0;
    for term in &problem.bc_terms {
        let edge_x = match term.edge {
            Edge::Left => problem.x_range.0,
            Edge::Right => problem.x_range.1,
        };
        let mut sum = 0.0;
        let mut count = 0usize;
        for &(x, t) in &points.boundary {
            if x != edge_x {
                continue;
            }
            let mismatch = term.kind.extract(&evaluator.jet_at(x, t)) - (term.target)(x, t);
            sum += mismatch * mismatch;
            count += 1;
        }
        if count > 0 {
            boundary += sum / count as f64;
        }
    }

    let mut initial = 0.0;
    for term in &problem.ic_terms {
        let mut sum = 0.0;
        for &(x, t) in &points.initial {
            let mismatch = term.kind.extract(&evaluator.jet_at(x, t)) - (term.target)(x, t);
            sum += mismatch * mismatch;
        }
        if !points.initial.is_empty() {
            initial += sum / points.initial.len() as f64;
        }
    }

    LossBreakdown {
        total: residual + boundary + initial,
        residual,
        boundary,
        initial,
    }
}

/// Composite loss and its exact gradient with respect to every network
/// parameter, by reverse accumulation through the jet-propagating forward
/// pass.
pub fn loss_gradient(
    net: &MlpNetwork,
    points: &PointSet,
    problem: &PdeProblem,
) -> (LossBreakdown, ParamGradient) {
    batch::loss_and_gradient(net, points, problem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::Activation;
    use crate::jet::JetValue;
    use crate::network::{init_network, MlpArchitecture};
    use crate::pde::{PdeId, reference::analytic_jet};
    use crate::sampling::{preset_spec, sample_points};
    use std::f64::consts::PI;

    /// Evaluator stub that reproduces an exact solution's jet.
    struct ExactStub(PdeId);

    impl JetEvaluator for ExactStub {
        fn jet_at(&self, x: f64, t: f64) -> JetValue {
            analytic_jet(self.0, x, t)
        }
    }

    #[test]
    fn exact_solution_stub_zeroes_every_part() {
        for (id, preset) in [
            (PdeId::Heat0, "uniform1"),
            (PdeId::Heat1, "uniform1"),
            (PdeId::Wave, "uniform1"),
            (PdeId::Reaction, "uniform"),
        ] {
            let problem = PdeProblem::new(id);
            let spec = preset_spec(id, preset, 0).unwrap();
            let points = sample_points(&problem, &spec).unwrap();
            let loss = composite_loss(&ExactStub(id), &points, &problem);
            assert!(loss.total < 1e-12, "{id}: {loss:?}");
            assert!(loss.residual < 1e-12 && loss.boundary < 1e-12 && loss.initial < 1e-12);
        }
    }

    #[test]
    fn zero_network_on_heat0_has_closed_form_parts() {
        let problem = PdeProblem::new(PdeId::Heat0);
        let spec = preset_spec(PdeId::Heat0, "uniform1", 0).unwrap();
        let points = sample_points(&problem, &spec).unwrap();
        let mut net = init_network(MlpArchitecture::new(8, 3, Activation::Tanh, 0.5), 0);
        net.set_flat_params(&vec![0.0; net.n_params()]);

        let loss = composite_loss(&net, &points, &problem);
        // boundary targets are identically zero
        assert_eq!(loss.boundary, 0.0);
        // initial part reduces to the mean of sin^2(pi x) over the sampled x
        let expected: f64 = points
            .initial
            .iter()
            .map(|&(x, _)| (PI * x).sin().powi(2))
            .sum::<f64>()
            / points.initial.len() as f64;
        assert!((loss.initial - expected).abs() < 1e-15);
    }

    #[test]
    fn duplicating_points_leaves_loss_and_gradient_unchanged() {
        let problem = PdeProblem::new(PdeId::Wave);
        let spec = preset_spec(PdeId::Wave, "random1", 5).unwrap();
        let mut points = sample_points(&problem, &spec).unwrap();
        points.collocation.truncate(40);
        points.boundary.truncate(20);
        points.initial.truncate(10);
        let net = init_network(MlpArchitecture::new(8, 3, Activation::Sigmoid, 0.5), 1);

        let (base_loss, base_grad) = loss_gradient(&net, &points, &problem);
        let doubled = PointSet {
            collocation: [points.collocation.clone(), points.collocation.clone()].concat(),
            boundary: [points.boundary.clone(), points.boundary.clone()].concat(),
            initial: [points.initial.clone(), points.initial.clone()].concat(),
            requested_collocation: points.requested_collocation * 2,
        };
        let (dup_loss, dup_grad) = loss_gradient(&net, &doubled, &problem);
        assert!((base_loss.total - dup_loss.total).abs() < 1e-13);
        assert!((base_loss.residual - dup_loss.residual).abs() < 1e-13);
        assert!((base_loss.boundary - dup_loss.boundary).abs() < 1e-13);
        assert!((base_loss.initial - dup_loss.initial).abs() < 1e-13);
        let a = base_grad.to_flat();
        let b = dup_grad.to_flat();
        for (ga, gb) in a.iter().zip(&b) {
            assert!((ga - gb).abs() < 1e-13 * ga.abs().max(1.0));
        }
    }

    #[test]
    fn zero_mismatch_points_give_zero_loss_and_gradient() {
        // a zero network on heat_0 with points chosen where every target
        // vanishes: sin(pi x) = 0 at x in {-1, 0, 1}, forcing term too
        let problem = PdeProblem::new(PdeId::Heat0);
        let points = PointSet {
            collocation: vec![(0.0, 0.3), (0.0, 0.8)],
            boundary: vec![(-1.0, 0.2), (1.0, 0.6)],
            initial: vec![(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)],
            requested_collocation: 2,
        };
        let mut net = init_network(MlpArchitecture::new(6, 3, Activation::Tanh, 0.5), 0);
        net.set_flat_params(&vec![0.0; net.n_params()]);
        let (loss, grad) = loss_gradient(&net, &points, &problem);
        assert!(loss.total.abs() < 1e-30);
        assert!(grad.to_flat().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn batched_loss_matches_reference_path() {
        for id in PdeId::ALL {
            let problem = PdeProblem::new(id);
            let name = match id {
                PdeId::Burgers => "uniform1",
                PdeId::Reaction => "random",
                _ => "random1",
            };
            let spec = preset_spec(id, name, 11).unwrap();
            let mut points = sample_points(&problem, &spec).unwrap();
            points.collocation.truncate(60);
            points.boundary.truncate(30);
            points.initial.truncate(15);
            let net = init_network(MlpArchitecture::new(9, 3, Activation::Swish, 0.5), 3);
            let reference = composite_loss(&net, &points, &problem);
            let (batched, _) = loss_gradient(&net, &points, &problem);
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-30);
            assert!(rel(batched.total, reference.total) < 1e-12, "{id}");
            assert!(rel(batched.residual, reference.residual) < 1e-12, "{id}");
            assert!(rel(batched.boundary, reference.boundary) < 1e-12, "{id}");
            assert!(rel(batched.initial, reference.initial) < 1e-12, "{id}");
        }
    }

    #[test]
    fn gradient_matches_parameter_finite_differences_per_component() {
        let problem = PdeProblem::new(PdeId::Wave);
        let spec = preset_spec(PdeId::Wave, "random1", 21).unwrap();
        let mut points = sample_points(&problem, &spec).unwrap();
        points.collocation.truncate(25);
        points.boundary.truncate(12);
        points.initial.truncate(8);

        // isolate each loss component by emptying the others
        let only = |c: bool, b: bool, i: bool| PointSet {
            collocation: if c { points.collocation.clone() } else { vec![] },
            boundary: if b { points.boundary.clone() } else { vec![] },
            initial: if i { points.initial.clone() } else { vec![] },
            requested_collocation: points.requested_collocation,
        };

        for (component, pts) in [
            ("residual", only(true, false, false)),
            ("boundary", only(false, true, false)),
            ("initial", only(false, false, true)),
        ] {
            let net = init_network(MlpArchitecture::new(8, 3, Activation::Tanh, 0.5), 13);
            let (_, grad) = loss_gradient(&net, &pts, &problem);
            let grad = grad.to_flat();
            let params = net.flat_params();
            let h = 1e-5;
            // spot-check a spread of parameters
            for idx in (0..params.len()).step_by(37) {
                let mut up = net.clone();
                let mut p = params.clone();
                p[idx] += h;
                up.set_flat_params(&p);
                let mut dn = net.clone();
                p[idx] -= 2.0 * h;
                dn.set_flat_params(&p);
                let fd = (composite_loss(&up, &pts, &problem).total
                    - composite_loss(&dn, &pts, &problem).total)
                    / (2.0 * h);
                let rel = (fd - grad[idx]).abs() / grad[idx].abs().max(1e-8);
                assert!(
                    rel < 1e-4,
                    "{component} param {idx}: fd {fd} vs grad {}",
                    grad[idx]
                );
            }
        }
    }
}
