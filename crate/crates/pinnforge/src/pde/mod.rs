//! The seven benchmark PDE problems.
//!
//! Each problem supplies its residual operator over a solution jet, the
//! boundary/initial constraint terms, the domain bounds and an exact (or
//! reference) solution evaluator. All problems live on one space dimension
//! plus time; boundary terms sit on the x extremes, initial terms at the
//! start of the time range.
//!
//! The Burgers reference solution has no closed form and is evaluated through
//! the Cole–Hopf transform by Gauss–Hermite quadrature (see [`burgers`]).

pub mod burgers;
pub mod reference;

use crate::error::{Error, Result};
use crate::jet::JetValue;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Kinematic viscosity of the Burgers benchmark.
pub const BURGERS_NU: f64 = 0.01 / PI;

/// Default Gauss–Hermite node count for the Burgers reference.
pub const BURGERS_QUADRATURE_NODES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdeId {
    Heat0,
    Heat1,
    Wave,
    Burgers,
    Advection0,
    Advection1,
    Reaction,
}

impl PdeId {
    pub const ALL: [PdeId; 7] = [
        PdeId::Heat0,
        PdeId::Heat1,
        PdeId::Wave,
        PdeId::Burgers,
        PdeId::Advection0,
        PdeId::Advection1,
        PdeId::Reaction,
    ];
}

impl fmt::Display for PdeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PdeId::Heat0 => "heat_0",
            PdeId::Heat1 => "heat_1",
            PdeId::Wave => "wave",
            PdeId::Burgers => "burgers",
            PdeId::Advection0 => "advection_0",
            PdeId::Advection1 => "advection_1",
            PdeId::Reaction => "reaction",
        };
        f.write_str(s)
    }
}

impl FromStr for PdeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "heat_0" => Ok(PdeId::Heat0),
            "heat_1" => Ok(PdeId::Heat1),
            "wave" => Ok(PdeId::Wave),
            "burgers" => Ok(PdeId::Burgers),
            "advection_0" => Ok(PdeId::Advection0),
            "advection_1" => Ok(PdeId::Advection1),
            "reaction" => Ok(PdeId::Reaction),
            other => Err(Error::InvalidConfig(format!("unknown PDE id '{other}'"))),
        }
    }
}

/// Which x extreme a boundary term constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Edge {
    Left,
    Right,
}

/// What a constraint pins: the value, the spatial derivative or the temporal
/// derivative of the solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintKind {
    Value,
    SpaceDerivative,
    TimeDerivative,
}

impl ConstraintKind {
    pub fn extract(self, jet: &JetValue) -> f64 {
        match self {
            ConstraintKind::Value => jet.u,
            ConstraintKind::SpaceDerivative => jet.du_dx,
            ConstraintKind::TimeDerivative => jet.du_dt,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BoundaryTerm {
    pub edge: Edge,
    pub kind: ConstraintKind,
    pub target: fn(f64, f64) -> f64,
}

#[derive(Debug, Clone, Copy)]
pub struct InitialTerm {
    pub kind: ConstraintKind,
    pub target: fn(f64, f64) -> f64,
}

/// Jet components a problem's residual and constraints actually read.
/// The trainer propagates only these. The value channel is always carried;
/// a second-derivative channel implies its first-derivative base.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelMask {
    pub x: bool,
    pub t: bool,
    pub xx: bool,
    pub tt: bool,
}

pub struct PdeProblem {
    pub id: PdeId,
    pub x_range: (f64, f64),
    pub t_range: (f64, f64),
    pub bc_terms: Vec<BoundaryTerm>,
    pub ic_terms: Vec<InitialTerm>,
    cole_hopf: Option<burgers::ColeHopf>,
}

impl PdeProblem {
    pub fn new(id: PdeId) -> Self {
        let (x_range, t_range) = match id {
            PdeId::Heat0 => ((-1.0, 1.0), (0.0, 1.0)),
            PdeId::Heat1 | PdeId::Wave => ((0.0, 1.0), (0.0, 1.0)),
            PdeId::Burgers => ((-1.0, 1.0), (0.0, 5.0 / PI)),
            PdeId::Advection0 | PdeId::Advection1 | PdeId::Reaction => ((0.0, 2.0), (0.0, 1.0)),
        };
        let bc_terms: Vec<BoundaryTerm> = match id {
            PdeId::Heat0 | PdeId::Burgers => vec![
                BoundaryTerm {
                    edge: Edge::Left,
                    kind: ConstraintKind::Value,
                    target: |_, _| 0.0,
                },
                BoundaryTerm {
                    edge: Edge::Right,
                    kind: ConstraintKind::Value,
                    target: |_, _| 0.0,
                },
            ],
            PdeId::Heat1 => vec![
                BoundaryTerm {
                    edge: Edge::Left,
                    kind: ConstraintKind::SpaceDerivative,
                    target: |_, t| t.sin(),
                },
                BoundaryTerm {
                    edge: Edge::Right,
                    kind: ConstraintKind::SpaceDerivative,
                    target: |_, t| t.sin(),
                },
            ],
            // Both conditions sit on the x = 0 edge.
            PdeId::Wave => vec![
                BoundaryTerm {
                    edge: Edge::Left,
                    kind: ConstraintKind::Value,
                    target: |_, t| t.sin(),
                },
                BoundaryTerm {
                    edge: Edge::Left,
                    kind: ConstraintKind::SpaceDerivative,
                    target: |_, t| t.cos() - t.sin() + t,
                },
            ],
            PdeId::Advection0 => vec![
                BoundaryTerm {
                    edge: Edge::Left,
                    kind: ConstraintKind::Value,
                    target: |_, _| 2.0,
                },
                BoundaryTerm {
                    edge: Edge::Right,
                    kind: ConstraintKind::Value,
                    target: |_, _| 0.0,
                },
            ],
            PdeId::Advection1 => vec![
                BoundaryTerm {
                    edge: Edge::Left,
                    kind: ConstraintKind::Value,
                    target: |_, _| 1.0,
                },
                BoundaryTerm {
                    edge: Edge::Right,
                    kind: ConstraintKind::Value,
                    target: |_, _| -1.0,
                },
            ],
            PdeId::Reaction => vec![BoundaryTerm {
                edge: Edge::Left,
                kind: ConstraintKind::Value,
                target: |_, t| {
                    let h = (-1.0f64).exp();
                    h * t.exp() / (h * t.exp() + 1.0 - h)
                },
            }],
        };
        let ic_terms: Vec<InitialTerm> = match id {
            PdeId::Heat0 => vec![InitialTerm {
                kind: ConstraintKind::Value,
                target: |x, _| (PI * x).sin(),
            }],
            PdeId::Heat1 => vec![InitialTerm {
                kind: ConstraintKind::Value,
                target: |x, _| 1.0 + (2.0 * PI * x).cos(),
            }],
            PdeId::Wave => vec![
                InitialTerm {
                    kind: ConstraintKind::Value,
                    target: |x, _| x.sin(),
                },
                InitialTerm {
                    kind: ConstraintKind::TimeDerivative,
                    target: |x, _| x.cos(),
                },
            ],
            PdeId::Burgers => vec![InitialTerm {
                kind: ConstraintKind::Value,
                target: |x, _| -(PI * x).sin(),
            }],
            PdeId::Advection0 => vec![InitialTerm {
                kind: ConstraintKind::Value,
                target: |x, _| step_values(x, 2.0, 0.0),
            }],
            PdeId::Advection1 => vec![InitialTerm {
                kind: ConstraintKind::Value,
                target: |x, _| step_values(x, 1.0, -1.0),
            }],
            PdeId::Reaction => vec![InitialTerm {
                kind: ConstraintKind::Value,
                target: |x, _| (-(x - 1.0) * (x - 1.0)).exp(),
            }],
        };
        let cole_hopf = match id {
            PdeId::Burgers => Some(burgers::ColeHopf::with_nodes(BURGERS_QUADRATURE_NODES)),
            _ => None,
        };
        PdeProblem {
            id,
            x_range,
            t_range,
            bc_terms,
            ic_terms,
            cole_hopf,
        }
    }

    /// N[u] - f at (x, t), evaluated on a solution jet.
    pub fn residual(&self, jet: &JetValue, x: f64, t: f64) -> f64 {
        match self.id {
            PdeId::Heat0 => {
                let s = (PI * x).sin();
                jet.du_dt - jet.d2u_dx2 + (-t).exp() * (s - PI * PI * s)
            }
            PdeId::Heat1 => jet.du_dt - jet.d2u_dx2 - (1.0 + x * t.cos()),
            PdeId::Wave => jet.d2u_dt2 - jet.d2u_dx2 - x * t.sin(),
            PdeId::Burgers => jet.du_dt + jet.u * jet.du_dx - BURGERS_NU * jet.d2u_dx2,
            PdeId::Advection0 | PdeId::Advection1 => jet.du_dt + jet.du_dx,
            PdeId::Reaction => jet.du_dt - jet.u * (1.0 - jet.u),
        }
    }

    /// Partial derivatives of [`residual`](Self::residual) with respect to the
    /// five jet slots, stored in the matching slots of the returned value.
    /// Cross-checked against finite differences over jet entries in tests.
    pub fn residual_jet_gradient(&self, jet: &JetValue, _x: f64, _t: f64) -> JetValue {
        match self.id {
            PdeId::Heat0 | PdeId::Heat1 => JetValue {
                u: 0.0,
                du_dx: 0.0,
                du_dt: 1.0,
                d2u_dx2: -1.0,
                d2u_dt2: 0.0,
            },
            PdeId::Wave => JetValue {
                u: 0.0,
                du_dx: 0.0,
                du_dt: 0.0,
                d2u_dx2: -1.0,
                d2u_dt2: 1.0,
            },
            PdeId::Burgers => JetValue {
                u: jet.du_dx,
                du_dx: jet.u,
                du_dt: 1.0,
                d2u_dx2: -BURGERS_NU,
                d2u_dt2: 0.0,
            },
            PdeId::Advection0 | PdeId::Advection1 => JetValue {
                u: 0.0,
                du_dx: 1.0,
                du_dt: 1.0,
                d2u_dx2: 0.0,
                d2u_dt2: 0.0,
            },
            PdeId::Reaction => JetValue {
                u: 2.0 * jet.u - 1.0,
                du_dx: 0.0,
                du_dt: 1.0,
                d2u_dx2: 0.0,
                d2u_dt2: 0.0,
            },
        }
    }

    /// Reference solution value.
    ///
    /// Advection queries exactly on the jump line x = 1 + t are rejected;
    /// the caller perturbs or excludes such points.
    pub fn exact_solution(&self, x: f64, t: f64) -> Result<f64> {
        match self.id {
            PdeId::Heat0 => Ok((-t).exp() * (PI * x).sin()),
            PdeId::Heat1 => {
                Ok(1.0 + t + (-4.0 * PI * PI * t).exp() * (2.0 * PI * x).cos() + x * t.sin())
            }
            PdeId::Wave => Ok((x + t).sin() + x * (t - t.sin())),
            PdeId::Burgers => Ok(self
                .cole_hopf
                .as_ref()
                .expect("burgers problem carries quadrature")
                .value(x, t)),
            PdeId::Advection0 => piecewise_advection(x, t, 2.0, 0.0),
            PdeId::Advection1 => piecewise_advection(x, t, 1.0, -1.0),
            PdeId::Reaction => {
                let h = (-(x - 1.0) * (x - 1.0)).exp();
                Ok(h * t.exp() / (h * t.exp() + 1.0 - h))
            }
        }
    }

    pub fn channels(&self) -> ChannelMask {
        let mut mask = match self.id {
            PdeId::Heat0 | PdeId::Heat1 | PdeId::Burgers => ChannelMask {
                x: false,
                t: true,
                xx: true,
                tt: false,
            },
            PdeId::Wave => ChannelMask {
                x: false,
                t: true,
                xx: true,
                tt: true,
            },
            PdeId::Advection0 | PdeId::Advection1 => ChannelMask {
                x: true,
                t: true,
                xx: false,
                tt: false,
            },
            PdeId::Reaction => ChannelMask {
                x: false,
                t: true,
                xx: false,
                tt: false,
            },
        };
        for bc in &self.bc_terms {
            match bc.kind {
                ConstraintKind::SpaceDerivative => mask.x = true,
                ConstraintKind::TimeDerivative => mask.t = true,
                ConstraintKind::Value => {}
            }
        }
        for ic in &self.ic_terms {
            match ic.kind {
                ConstraintKind::SpaceDerivative => mask.x = true,
                ConstraintKind::TimeDerivative => mask.t = true,
                ConstraintKind::Value => {}
            }
        }
        if mask.xx {
            mask.x = true;
        }
        if mask.tt {
            mask.t = true;
        }
        mask
    }

    pub fn contains(&self, x: f64, t: f64) -> bool {
        x >= self.x_range.0 && x <= self.x_range.1 && t >= self.t_range.0 && t <= self.t_range.1
    }

    pub fn is_interior(&self, x: f64, t: f64) -> bool {
        x > self.x_range.0 && x < self.x_range.1 && t > self.t_range.0 && t < self.t_range.1
    }

    /// Aspect ratio x-extent : t-extent, used to shape uniform grids.
    pub fn aspect_ratio(&self) -> f64 {
        (self.x_range.1 - self.x_range.0) / (self.t_range.1 - self.t_range.0)
    }

    /// Reference value with an explicit quadrature resolution (Burgers only);
    /// lets tests check stability under node-count refinement.
    pub fn burgers_reference(&self, x: f64, t: f64, nodes: usize) -> f64 {
        assert_eq!(self.id, PdeId::Burgers);
        burgers::ColeHopf::with_nodes(nodes).value(x, t)
    }
}

fn step_values(x: f64, lo_side: f64, hi_side: f64) -> f64 {
    if x < 1.0 {
        lo_side
    } else if x > 1.0 {
        hi_side
    } else {
        0.5 * (lo_side + hi_side)
    }
}

fn piecewise_advection(x: f64, t: f64, lo_side: f64, hi_side: f64) -> Result<f64> {
    let jump = 1.0 + t;
    if x == jump {
        return Err(Error::DiscontinuityPoint { x, t });
    }
    Ok(if x < jump { lo_side } else { hi_side })
}
