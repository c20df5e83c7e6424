//! Analytic jets of the closed-form benchmark solutions.
//!
//! Hand-derived value/derivative bundles, independent of the network
//! evaluation path. Used as oracles: feeding these jets into a residual
//! operator must give (numerically) zero for the smooth benchmarks.
//!
//! Advection jets are only defined away from the jump line (derivatives are
//! zero on either side); Burgers has no closed form and is not provided here.

use crate::jet::JetValue;
use crate::pde::PdeId;
use std::f64::consts::PI;

/// Jet of the exact solution at (x, t). Panics for Burgers.
pub fn analytic_jet(id: PdeId, x: f64, t: f64) -> JetValue {
    match id {
        PdeId::Heat0 => {
            let u = (-t).exp() * (PI * x).sin();
            JetValue {
                u,
                du_dx: PI * (-t).exp() * (PI * x).cos(),
                du_dt: -u,
                d2u_dx2: -PI * PI * u,
                d2u_dt2: u,
            }
        }
        PdeId::Heat1 => {
            let decay = (-4.0 * PI * PI * t).exp();
            let cos2 = (2.0 * PI * x).cos();
            let sin2 = (2.0 * PI * x).sin();
            JetValue {
                u: 1.0 + t + decay * cos2 + x * t.sin(),
                du_dx: -2.0 * PI * decay * sin2 + t.sin(),
                du_dt: 1.0 - 4.0 * PI * PI * decay * cos2 + x * t.cos(),
                d2u_dx2: -4.0 * PI * PI * decay * cos2,
                d2u_dt2: 16.0 * PI.powi(4) * decay * cos2 - x * t.sin(),
            }
        }
        PdeId::Wave => JetValue {
            u: (x + t).sin() + x * (t - t.sin()),
            du_dx: (x + t).cos() + t - t.sin(),
            du_dt: (x + t).cos() + x * (1.0 - t.cos()),
            d2u_dx2: -(x + t).sin(),
            d2u_dt2: -(x + t).sin() + x * t.sin(),
        },
        PdeId::Advection0 | PdeId::Advection1 => {
            let jump = 1.0 + t;
            assert!(
                x != jump,
                "advection jet undefined on the jump line x = 1 + t"
            );
            let (lo, hi) = if id == PdeId::Advection0 {
                (2.0, 0.0)
            } else {
                (1.0, -1.0)
            };
            JetValue::constant(if x < jump { lo } else { hi })
        }
        PdeId::Reaction => {
            let g = x - 1.0;
            let h = (-g * g).exp();
            let hp = -2.0 * g * h;
            let hpp = (4.0 * g * g - 2.0) * h;
            let e = t.exp();
            let d = h * e + 1.0 - h;
            let u = h * e / d;
            // du/dh = e/d^2 ; d2u/dh2 = -2 e (e-1) / d^3
            let du_dh = e / (d * d);
            let d2u_dh2 = -2.0 * e * (e - 1.0) / (d * d * d);
            JetValue {
                u,
                du_dx: du_dh * hp,
                du_dt: u * (1.0 - u),
                d2u_dx2: d2u_dh2 * hp * hp + du_dh * hpp,
                d2u_dt2: u * (1.0 - u) * (1.0 - 2.0 * u),
            }
        }
        PdeId::Burgers => panic!("no closed-form jet for the Burgers benchmark"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::PdeProblem;

    /// Central finite differences of the exact solution cross-check the
    /// hand-derived jets.
    #[test]
    fn jets_match_finite_differences_of_exact_solution() {
        let h = 1e-5;
        let cases = [
            (PdeId::Heat0, 0.31, 0.62),
            (PdeId::Heat1, 0.44, 0.53),
            (PdeId::Wave, 0.27, 0.71),
            (PdeId::Reaction, 1.37, 0.42),
        ];
        for (id, x, t) in cases {
            let p = PdeProblem::new(id);
            let f = |x: f64, t: f64| p.exact_solution(x, t).unwrap();
            let jet = analytic_jet(id, x, t);
            assert!((jet.u - f(x, t)).abs() < 1e-12, "{id} value");
            let dx = (f(x + h, t) - f(x - h, t)) / (2.0 * h);
            let dt = (f(x, t + h) - f(x, t - h)) / (2.0 * h);
            let dxx = (f(x + h, t) - 2.0 * f(x, t) + f(x - h, t)) / (h * h);
            let dtt = (f(x, t + h) - 2.0 * f(x, t) + f(x, t - h)) / (h * h);
            assert!((jet.du_dx - dx).abs() < 1e-7, "{id} du_dx {} {dx}", jet.du_dx);
            assert!((jet.du_dt - dt).abs() < 1e-7, "{id} du_dt {} {dt}", jet.du_dt);
            assert!(
                (jet.d2u_dx2 - dxx).abs() < 1e-4,
                "{id} d2u_dx2 {} {dxx}",
                jet.d2u_dx2
            );
            assert!(
                (jet.d2u_dt2 - dtt).abs() < 1e-4,
                "{id} d2u_dt2 {} {dtt}",
                jet.d2u_dt2
            );
        }
    }
}
