//! Training-point generation and dense test grids.
//!
//! Two schemes: `Random` draws i.i.d. uniform points from a seeded stream;
//! `Uniform` lays a near-square interior grid whose (n_x, n_t) factorization
//! matches the domain aspect ratio as closely as possible. Named presets
//! mirror the benchmark sampling table row by row and are addressable as
//! `"heat_0/uniform1"`, `"burgers/uniform2"`, `"reaction/random"`, ...
//!
//! Collocation points are strictly interior; boundary points sit on the two
//! x extremes; initial points sit at the start of the time range.

use crate::error::{Error, Result};
use crate::pde::{PdeId, PdeProblem};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingScheme {
    Random,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingSpec {
    pub scheme: SamplingScheme,
    pub n_collocation: usize,
    pub n_boundary: usize,
    pub n_initial: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    /// Interior (x, t) points.
    pub collocation: Vec<(f64, f64)>,
    /// Points on the x extremes, spanning the time range.
    pub boundary: Vec<(f64, f64)>,
    /// Points at the initial time.
    pub initial: Vec<(f64, f64)>,
    /// What the spec asked for; differs from `collocation.len()` only when a
    /// uniform grid had to fall back to the closest factorizable count.
    pub requested_collocation: usize,
}

impl PointSet {
    pub fn counts(&self) -> (usize, usize, usize) {
        (
            self.collocation.len(),
            self.boundary.len(),
            self.initial.len(),
        )
    }

    /// True when the uniform-grid fallback did not kick in.
    pub fn is_exact(&self) -> bool {
        self.collocation.len() == self.requested_collocation
    }
}

/// One row of the benchmark sampling table.
#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub problem: PdeId,
    pub name: &'static str,
    pub scheme: SamplingScheme,
    pub n_collocation: usize,
    pub n_boundary: usize,
    pub n_initial: usize,
}

use SamplingScheme::{Random, Uniform};

pub const PRESETS: [Preset; 20] = [
    preset_row(PdeId::Heat0, "random1", Random, 105, 40, 20),
    preset_row(PdeId::Heat0, "random2", Random, 512, 200, 100),
    preset_row(PdeId::Heat0, "uniform1", Uniform, 105, 40, 20),
    preset_row(PdeId::Heat0, "uniform2", Uniform, 512, 200, 100),
    preset_row(PdeId::Heat1, "random1", Random, 400, 100, 50),
    preset_row(PdeId::Heat1, "random2", Random, 2500, 500, 250),
    preset_row(PdeId::Heat1, "uniform1", Uniform, 400, 100, 50),
    preset_row(PdeId::Heat1, "uniform2", Uniform, 2500, 500, 250),
    preset_row(PdeId::Wave, "random1", Random, 2025, 200, 200),
    preset_row(PdeId::Wave, "random2", Random, 5041, 500, 500),
    preset_row(PdeId::Wave, "uniform1", Uniform, 2025, 200, 200),
    preset_row(PdeId::Wave, "uniform2", Uniform, 5041, 500, 500),
    preset_row(PdeId::Burgers, "uniform1", Uniform, 5040, 500, 500),
    preset_row(PdeId::Burgers, "uniform2", Uniform, 10057, 1000, 1000),
    preset_row(PdeId::Advection0, "random1", Random, 200, 40, 20),
    preset_row(PdeId::Advection0, "random2", Random, 800, 160, 80),
    preset_row(PdeId::Advection1, "random1", Random, 200, 40, 20),
    preset_row(PdeId::Advection1, "random2", Random, 800, 160, 80),
    preset_row(PdeId::Reaction, "random", Random, 800, 160, 80),
    preset_row(PdeId::Reaction, "uniform", Uniform, 800, 160, 80),
];

const fn preset_row(
    problem: PdeId,
    name: &'static str,
    scheme: SamplingScheme,
    n_collocation: usize,
    n_boundary: usize,
    n_initial: usize,
) -> Preset {
    Preset {
        problem,
        name,
        scheme,
        n_collocation,
        n_boundary,
        n_initial,
    }
}

/// Look up a preset row and bind it to a seed.
pub fn preset_spec(problem: PdeId, name: &str, seed: u64) -> Result<SamplingSpec> {
    let wanted = name.to_ascii_lowercase();
    PRESETS
        .iter()
        .find(|p| p.problem == problem && p.name == wanted)
        .map(|p| SamplingSpec {
            scheme: p.scheme,
            n_collocation: p.n_collocation,
            n_boundary: p.n_boundary,
            n_initial: p.n_initial,
            seed,
        })
        .ok_or_else(|| {
            let available: Vec<&str> = PRESETS
                .iter()
                .filter(|p| p.problem == problem)
                .map(|p| p.name)
                .collect();
            Error::InvalidConfig(format!(
                "no sampling preset '{name}' for {problem}; available: {}",
                available.join(", ")
            ))
        })
}

/// Parse a combined id like `"heat_0/uniform1"`.
pub fn parse_preset(id: &str, seed: u64) -> Result<(PdeId, SamplingSpec)> {
    let (problem, name) = id
        .split_once('/')
        .ok_or_else(|| Error::InvalidConfig(format!("preset id '{id}' is not <pde>/<sampling>")))?;
    let pde: PdeId = problem.parse()?;
    Ok((pde, preset_spec(pde, name, seed)?))
}

/// Generate the training point set for a problem.
pub fn sample_points(problem: &PdeProblem, spec: &SamplingSpec) -> Result<PointSet> {
    if spec.n_collocation == 0 || spec.n_boundary == 0 || spec.n_initial == 0 {
        return Err(Error::InvalidConfig(
            "sampling counts must be positive".into(),
        ));
    }
    match spec.scheme {
        SamplingScheme::Random => Ok(sample_random(problem, spec)),
        SamplingScheme::Uniform => sample_uniform(problem, spec),
    }
}

fn unit_uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn sample_random(problem: &PdeProblem, spec: &SamplingSpec) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (x0, x1) = problem.x_range;
    let (t0, t1) = problem.t_range;

    let mut collocation = Vec::with_capacity(spec.n_collocation);
    while collocation.len() < spec.n_collocation {
        let x = x0 + (x1 - x0) * unit_uniform(&mut rng);
        let t = t0 + (t1 - t0) * unit_uniform(&mut rng);
        if problem.is_interior(x, t) {
            collocation.push((x, t));
        }
    }
    let boundary = (0..spec.n_boundary)
        .map(|_| {
            let x = if rng.next_u64() & 1 == 0 { x0 } else { x1 };
            let t = t0 + (t1 - t0) * unit_uniform(&mut rng);
            (x, t)
        })
        .collect();
    let initial = (0..spec.n_initial)
        .map(|_| (x0 + (x1 - x0) * unit_uniform(&mut rng), t0))
        .collect();

    PointSet {
        collocation,
        boundary,
        initial,
        requested_collocation: spec.n_collocation,
    }
}

fn sample_uniform(problem: &PdeProblem, spec: &SamplingSpec) -> Result<PointSet> {
    let (x0, x1) = problem.x_range;
    let (t0, t1) = problem.t_range;
    let (n_x, n_t) = interior_grid_shape(spec.n_collocation, problem.aspect_ratio())?;

    // offset grid: endpoints excluded so every point is strictly interior
    let mut collocation = Vec::with_capacity(n_x * n_t);
    for i in 1..=n_x {
        let x = x0 + (x1 - x0) * i as f64 / (n_x + 1) as f64;
        for j in 1..=n_t {
            let t = t0 + (t1 - t0) * j as f64 / (n_t + 1) as f64;
            collocation.push((x, t));
        }
    }

    let n_left = spec.n_boundary.div_ceil(2);
    let n_right = spec.n_boundary - n_left;
    let mut boundary = Vec::with_capacity(spec.n_boundary);
    for t in linspace(t0, t1, n_left) {
        boundary.push((x0, t));
    }
    for t in linspace(t0, t1, n_right) {
        boundary.push((x1, t));
    }

    let initial = linspace(x0, x1, spec.n_initial)
        .into_iter()
        .map(|x| (x, t0))
        .collect();

    Ok(PointSet {
        collocation,
        boundary,
        initial,
        requested_collocation: spec.n_collocation,
    })
}

/// Pick (n_x, n_t) with n_x * n_t == n and n_x/n_t closest to the aspect
/// ratio (log distance). Counts below 2 per axis are not grids; if `n` has no
/// such factorization, the closest factorizable count below it is used (the
/// caller sees the shortfall through `PointSet::requested_collocation`).
pub fn interior_grid_shape(n: usize, aspect: f64) -> Result<(usize, usize)> {
    for candidate in (4..=n).rev() {
        let mut best: Option<(usize, usize, f64)> = None;
        let mut d = 2;
        while d * d <= candidate {
            if candidate % d == 0 {
                let other = candidate / d;
                for (nx, nt) in [(d, other), (other, d)] {
                    if nx < 2 || nt < 2 {
                        continue;
                    }
                    let score = ((nx as f64 / nt as f64).ln() - aspect.ln()).abs();
                    if best.is_none_or(|(_, _, s)| score < s) {
                        best = Some((nx, nt, score));
                    }
                }
            }
            d += 1;
        }
        if let Some((nx, nt, _)) = best {
            return Ok((nx, nt));
        }
    }
    Err(Error::GridInfeasible {
        requested: n,
        achieved: 0,
    })
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// A dense evaluation grid paired with exact solution values.
#[derive(Debug, Clone)]
pub struct TestGrid {
    pub points: Vec<(f64, f64)>,
    pub exact: Vec<f64>,
    /// Cached sum of squared exact values (the relative-L2 denominator).
    pub exact_norm_sq: f64,
}

/// Uniform n-per-axis grid over the closed domain, paired with exact values.
/// Advection grids drop points within 1e-9 of the jump line x = 1 + t.
pub fn test_grid(problem: &PdeProblem, n_per_axis: usize) -> TestGrid {
    assert!(n_per_axis >= 2, "test grid needs at least 2 points per axis");
    let xs = linspace(problem.x_range.0, problem.x_range.1, n_per_axis);
    let ts = linspace(problem.t_range.0, problem.t_range.1, n_per_axis);
    let mut points = Vec::with_capacity(n_per_axis * n_per_axis);
    let mut exact = Vec::with_capacity(n_per_axis * n_per_axis);
    let advection = matches!(problem.id, PdeId::Advection0 | PdeId::Advection1);
    for &x in &xs {
        for &t in &ts {
            if advection && (x - (1.0 + t)).abs() < 1e-9 {
                continue;
            }
            points.push((x, t));
            exact.push(
                problem
                    .exact_solution(x, t)
                    .expect("jump line already excluded"),
            );
        }
    }
    let exact_norm_sq = exact.iter().map(|v| v * v).sum();
    TestGrid {
        points,
        exact,
        exact_norm_sq,
    }
}
