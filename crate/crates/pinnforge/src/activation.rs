//! Hidden-layer activation functions with closed-form derivatives.
//!
//! Jet propagation needs the first and second derivative of each activation;
//! reverse accumulation through a second-order jet additionally needs the
//! third. All four are supplied in closed form. ReLU's second and third
//! derivatives are defined as 0 everywhere, including at the kink: the
//! distributional delta is unusable in collocation training.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Sigmoid,
    Relu,
    Swish,
}

/// Value and first three derivatives of an activation at one point.
#[derive(Debug, Clone, Copy)]
pub struct ActJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Activation {
    /// The four options, in search-space order. Ties in median-based
    /// selections break toward the earlier entry.
    pub const ALL: [Activation; 4] = [
        Activation::Tanh,
        Activation::Sigmoid,
        Activation::Relu,
        Activation::Swish,
    ];

    pub fn value(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => sigmoid(x),
            Activation::Relu => x.max(0.0),
            Activation::Swish => x * sigmoid(x),
        }
    }

    pub fn d1(self, x: f64) -> f64 {
        self.eval(x).d1
    }

    pub fn d2(self, x: f64) -> f64 {
        self.eval(x).d2
    }

    pub fn d3(self, x: f64) -> f64 {
        self.eval(x).d3
    }

    /// Value and derivatives in one evaluation; the shared `exp` dominates,
    /// so fusing the four is what the hot loop uses.
    pub fn eval(self, x: f64) -> ActJet {
        match self {
            Activation::Tanh => {
                let v = x.tanh();
                let d1 = 1.0 - v * v;
                let d2 = -2.0 * v * d1;
                let d3 = -2.0 * (d1 * d1 + v * d2);
                ActJet { value: v, d1, d2, d3 }
            }
            Activation::Sigmoid => {
                let s = sigmoid(x);
                let d1 = s * (1.0 - s);
                let d2 = d1 * (1.0 - 2.0 * s);
                let d3 = d2 * (1.0 - 2.0 * s) - 2.0 * d1 * d1;
                ActJet { value: s, d1, d2, d3 }
            }
            Activation::Relu => {
                let on = x > 0.0;
                ActJet {
                    value: if on { x } else { 0.0 },
                    d1: if on { 1.0 } else { 0.0 },
                    d2: 0.0,
                    d3: 0.0,
                }
            }
            Activation::Swish => {
                let s = sigmoid(x);
                let s1 = s * (1.0 - s);
                let s2 = s1 * (1.0 - 2.0 * s);
                let s3 = s2 * (1.0 - 2.0 * s) - 2.0 * s1 * s1;
                ActJet {
                    value: x * s,
                    d1: s + x * s1,
                    d2: 2.0 * s1 + x * s2,
                    d3: 3.0 * s2 + x * s3,
                }
            }
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
            Activation::Relu => "relu",
            Activation::Swish => "swish",
        };
        f.write_str(name)
    }
}

impl FromStr for Activation {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tanh" => Ok(Activation::Tanh),
            "sigmoid" => Ok(Activation::Sigmoid),
            "relu" => Ok(Activation::Relu),
            "swish" => Ok(Activation::Swish),
            other => Err(crate::Error::InvalidConfig(format!(
                "unknown activation '{other}' (expected tanh, sigmoid, relu or swish)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_core::RngCore;

    fn uniform(rng: &mut impl RngCore, lo: f64, hi: f64) -> f64 {
        let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1.0)
    }

    /// Central finite differences of `f` at `x`.
    fn fd1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn derivatives_match_finite_differences() {
        use rand_chacha::ChaCha8Rng;
        use rand_core::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let h = 1e-5;
        for act in Activation::ALL {
            for _ in 0..1000 {
                let mut x = uniform(&mut rng, -5.0, 5.0);
                if act == Activation::Relu {
                    // keep a margin from the kink
                    while x.abs() < 1e-3 {
                        x = uniform(&mut rng, -5.0, 5.0);
                    }
                }
                let jet = act.eval(x);
                assert_eq!(jet.value, act.value(x));
                let d1 = fd1(|y| act.value(y), x, h);
                let d2 = fd1(|y| act.d1(y), x, h);
                assert!(
                    rel_err(d1, jet.d1) < 1e-4,
                    "{act} d1 at {x}: fd {d1} vs closed {}",
                    jet.d1
                );
                assert!(
                    rel_err(d2, jet.d2) < 1e-4,
                    "{act} d2 at {x}: fd {d2} vs closed {}",
                    jet.d2
                );
            }
        }
    }

    #[test]
    fn third_derivative_matches_finite_differences() {
        use rand_chacha::ChaCha8Rng;
        use rand_core::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(0xd3);
        for act in [Activation::Tanh, Activation::Sigmoid, Activation::Swish] {
            for _ in 0..200 {
                let x = uniform(&mut rng, -4.0, 4.0);
                let d3 = fd1(|y| act.d2(y), x, 1e-5);
                assert!(
                    rel_err(d3, act.d3(x)) < 1e-4,
                    "{act} d3 at {x}: fd {d3} vs closed {}",
                    act.d3(x)
                );
            }
        }
    }

    #[test]
    fn relu_curvature_is_zero_everywhere() {
        for x in [-3.0, -1e-9, 0.0, 1e-9, 7.0] {
            assert_eq!(Activation::Relu.d2(x), 0.0);
            assert_eq!(Activation::Relu.d3(x), 0.0);
        }
        assert_eq!(Activation::Relu.value(0.0), 0.0);
        assert_eq!(Activation::Relu.d1(0.0), 0.0);
    }

    #[test]
    fn swish_matches_definition() {
        for x in [-2.0, -0.5, 0.0, 0.3, 4.0] {
            let direct = x / (1.0 + (-x).exp());
            assert!((Activation::Swish.value(x) - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn parse_and_display_round_trip() {
        for act in Activation::ALL {
            assert_eq!(act.to_string().parse::<Activation>().unwrap(), act);
        }
        assert!("gelu".parse::<Activation>().is_err());
    }
}
