//! Limited-memory BFGS with a strong Wolfe line search.
//!
//! Two-loop recursion over a bounded (s, y) history, cubic-interpolating
//! line search enforcing the strong Wolfe conditions (sufficient decrease
//! c1, curvature c2), with a capped number of loss/gradient evaluations per
//! outer iteration. One outer iteration is one "epoch" of the second training
//! phase; line-search evaluations do not count as epochs.
//!
//! Non-finite trial losses inside the line search are treated as infinitely
//! bad, which shrinks the bracket back toward the known-good region instead
//! of poisoning the interpolation.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy)]
pub struct LbfgsConfig {
    /// Number of (s, y) pairs retained.
    pub history: usize,
    /// Sufficient-decrease constant.
    pub c1: f64,
    /// Curvature constant.
    pub c2: f64,
    /// Maximum loss/gradient evaluations per line search.
    pub max_line_search: usize,
    /// Bracket width (times direction norm) below which the zoom stops.
    pub tolerance_change: f64,
}

impl Default for LbfgsConfig {
    fn default() -> Self {
        LbfgsConfig {
            history: 50,
            c1: 1e-4,
            c2: 0.9,
            max_line_search: 25,
            tolerance_change: 1e-16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LbfgsOutcome {
    /// Accepted a step; params/loss/grad were updated.
    Moved,
    /// Line search failed; history cleared, next iteration is steepest
    /// descent from the same point.
    Restarted,
    /// Even steepest descent finds no acceptable point: numerically
    /// stationary. Further calls return immediately.
    Stalled,
    /// Current loss or gradient is non-finite; the caller should halt.
    Diverged,
}

#[derive(Debug)]
pub struct Lbfgs {
    cfg: LbfgsConfig,
    s_list: VecDeque<Vec<f64>>,
    y_list: VecDeque<Vec<f64>>,
    rho_list: VecDeque<f64>,
    stalled: bool,
    taken_first_step: bool,
}

impl Lbfgs {
    pub fn new(cfg: LbfgsConfig) -> Self {
        Lbfgs {
            cfg,
            s_list: VecDeque::with_capacity(cfg.history),
            y_list: VecDeque::with_capacity(cfg.history),
            rho_list: VecDeque::with_capacity(cfg.history),
            stalled: false,
        taken_first_step: false,
        }
    }

    pub fn is_stalled(&self) -> bool {
        self.stalled
    }

    /// One outer iteration. `eval` returns (loss, gradient) at the queried
    /// parameters; `params`, `loss` and `grad` hold the current state and are
    /// updated in place when a step is accepted.
    pub fn step<F>(
        &mut self,
        params: &mut Vec<f64>,
        loss: &mut f64,
        grad: &mut Vec<f64>,
        mut eval: F,
    ) -> LbfgsOutcome
    where
        F: FnMut(&[f64]) -> (f64, Vec<f64>),
    {
        if self.stalled {
            return LbfgsOutcome::Stalled;
        }
        if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return LbfgsOutcome::Diverged;
        }

        let was_steepest = self.s_list.is_empty();
        let mut direction = self.two_loop_direction(grad);
        let mut gtd = dot(&direction, grad);
        if gtd >= 0.0 {
            // not a descent direction; fall back to steepest descent
            self.clear_history();
            direction = grad.iter().map(|g| -g).collect();
            gtd = -dot(grad, grad);
            if gtd >= 0.0 {
                self.stalled = true;
                return LbfgsOutcome::Stalled;
            }
        }

        let t0 = if self.taken_first_step {
            1.0
        } else {
            let g1: f64 = grad.iter().map(|g| g.abs()).sum();
            (1.0 / g1.max(f64::MIN_POSITIVE)).min(1.0)
        };

        let result = strong_wolfe(&mut eval, params, t0, &direction, *loss, grad, gtd, &self.cfg);

        let improved = result.f.is_finite() && result.f < *loss;
        if result.satisfied || improved {
            self.taken_first_step = true;
            let new_params: Vec<f64> = params
                .iter()
                .zip(&direction)
                .map(|(p, d)| p + result.t * d)
                .collect();
            let s: Vec<f64> = direction.iter().map(|d| result.t * d).collect();
            let y: Vec<f64> = result.g.iter().zip(grad.iter()).map(|(n, o)| n - o).collect();
            let sy = dot(&s, &y);
            let s_norm = norm(&s);
            let y_norm = norm(&y);
            if sy > 1e-10 * s_norm * y_norm && sy.is_finite() {
                if self.s_list.len() == self.cfg.history {
                    self.s_list.pop_front();
                    self.y_list.pop_front();
                    self.rho_list.pop_front();
                }
                self.s_list.push_back(s);
                self.y_list.push_back(y);
                self.rho_list.push_back(1.0 / sy);
            }
            *params = new_params;
            *loss = result.f;
            *grad = result.g;
            return LbfgsOutcome::Moved;
        }

        if was_steepest {
            self.stalled = true;
            LbfgsOutcome::Stalled
        } else {
            self.clear_history();
            LbfgsOutcome::Restarted
        }
    }

    fn clear_history(&mut self) {
        self.s_list.clear();
        self.y_list.clear();
        self.rho_list.clear();
    }

    /// Approximate -H * grad via the two-loop recursion, scaling the seed
    /// matrix by s'y / y'y of the newest pair.
    fn two_loop_direction(&self, grad: &[f64]) -> Vec<f64> {
        let mut q: Vec<f64> = grad.to_vec();
        let k = self.s_list.len();
        let mut alphas = vec![0.0; k];
        for i in (0..k).rev() {
            let alpha = self.rho_list[i] * dot(&self.s_list[i], &q);
            alphas[i] = alpha;
            axpy(-alpha, &self.y_list[i], &mut q);
        }
        let gamma = match (self.s_list.back(), self.y_list.back()) {
            (Some(s), Some(y)) => dot(s, y) / dot(y, y),
            _ => 1.0,
        };
        for v in q.iter_mut() {
            *v *= gamma;
        }
        for i in 0..k {
            let beta = self.rho_list[i] * dot(&self.y_list[i], &q);
            axpy(alphas[i] - beta, &self.s_list[i], &mut q);
        }
        for v in q.iter_mut() {
            *v = -*v;
        }
        q
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

struct LineSearchResult {
    satisfied: bool,
    t: f64,
    f: f64,
    g: Vec<f64>,
    #[allow(dead_code)]
    evals: usize,
}

/// Strong Wolfe line search: bracket then zoom with cubic interpolation.
#[allow(clippy::too_many_arguments)]
fn strong_wolfe<F>(
    eval: &mut F,
    x0: &[f64],
    mut t: f64,
    direction: &[f64],
    f0: f64,
    g0: &[f64],
    gtd0: f64,
    cfg: &LbfgsConfig,
) -> LineSearchResult
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let d_norm = direction.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut probe = |t: f64| -> (f64, Vec<f64>, f64) {
        let x: Vec<f64> = x0
            .iter()
            .zip(direction)
            .map(|(p, d)| p + t * d)
            .collect();
        let (f, g) = eval(&x);
        let f = if f.is_nan() { f64::INFINITY } else { f };
        let gtd = dot(&g, direction);
        (f, g, gtd)
    };

    let (mut f_new, mut g_new, mut gtd_new) = probe(t);
    let mut evals = 1usize;

    // bracketing phase
    let mut t_prev = 0.0;
    let mut f_prev = f0;
    let mut g_prev = g0.to_vec();
    let mut gtd_prev = gtd0;
    let mut bracket: [(f64, f64, Vec<f64>, f64); 2];
    let mut done = false;
    loop {
        if f_new > f0 + cfg.c1 * t * gtd0 || (evals > 1 && f_new >= f_prev) {
            bracket = [
                (t_prev, f_prev, g_prev, gtd_prev),
                (t, f_new, g_new.clone(), gtd_new),
            ];
            break;
        }
        if gtd_new.abs() <= -cfg.c2 * gtd0 {
            bracket = [
                (t, f_new, g_new.clone(), gtd_new),
                (t, f_new, g_new.clone(), gtd_new),
            ];
            done = true;
            break;
        }
        if gtd_new >= 0.0 {
            bracket = [
                (t_prev, f_prev, g_prev, gtd_prev),
                (t, f_new, g_new.clone(), gtd_new),
            ];
            break;
        }
        if evals >= cfg.max_line_search {
            bracket = [
                (0.0, f0, g0.to_vec(), gtd0),
                (t, f_new, g_new.clone(), gtd_new),
            ];
            break;
        }
        let min_step = t + 0.01 * (t - t_prev);
        let max_step = t * 10.0;
        let next = cubic_interpolate(
            t_prev,
            f_prev,
            gtd_prev,
            t,
            f_new,
            gtd_new,
            Some((min_step, max_step)),
        );
        t_prev = t;
        f_prev = f_new;
        g_prev = g_new.clone();
        gtd_prev = gtd_new;
        t = next;
        let (f, g, gtd) = probe(t);
        f_new = f;
        g_new = g;
        gtd_new = gtd;
        evals += 1;
    }

    // zoom phase
    let mut insufficient_progress = false;
    let (mut low, mut high) = if bracket[0].1 <= bracket[1].1 {
        (0usize, 1usize)
    } else {
        (1usize, 0usize)
    };
    while !done && evals < cfg.max_line_search {
        let (ta, fa, _, ga) = (
            bracket[0].0,
            bracket[0].1,
            bracket[0].2.clone(),
            bracket[0].3,
        );
        let (tb, fb, _, gb) = (
            bracket[1].0,
            bracket[1].1,
            bracket[1].2.clone(),
            bracket[1].3,
        );
        if (tb - ta).abs() * d_norm < cfg.tolerance_change {
            break;
        }
        t = cubic_interpolate(ta, fa, ga, tb, fb, gb, None);

        // keep interpolation a safe distance from the bracket edges
        let hi_t = ta.max(tb);
        let lo_t = ta.min(tb);
        let eps = 0.1 * (hi_t - lo_t);
        if (hi_t - t).min(t - lo_t) < eps {
            if insufficient_progress || t >= hi_t || t <= lo_t {
                t = if (t - hi_t).abs() < (t - lo_t).abs() {
                    hi_t - eps
                } else {
                    lo_t + eps
                };
                insufficient_progress = false;
            } else {
                insufficient_progress = true;
            }
        } else {
            insufficient_progress = false;
        }

        let (f, g, gtd) = probe(t);
        f_new = f;
        g_new = g;
        gtd_new = gtd;
        evals += 1;

        if f_new > f0 + cfg.c1 * t * gtd0 || f_new >= bracket[low].1 {
            bracket[high] = (t, f_new, g_new.clone(), gtd_new);
            (low, high) = if bracket[0].1 <= bracket[1].1 {
                (0, 1)
            } else {
                (1, 0)
            };
        } else {
            if gtd_new.abs() <= -cfg.c2 * gtd0 {
                done = true;
            } else if gtd_new * (bracket[high].0 - bracket[low].0) >= 0.0 {
                bracket[high] = bracket[low].clone();
            }
            bracket[low] = (t, f_new, g_new.clone(), gtd_new);
        }
    }

    let (t_best, f_best, g_best, _) = bracket[low].clone();
    if done {
        // the point satisfying both Wolfe conditions is at bracket[low]
        LineSearchResult {
            satisfied: true,
            t: t_best,
            f: f_best,
            g: g_best,
            evals,
        }
    } else {
        LineSearchResult {
            satisfied: false,
            t: t_best,
            f: f_best,
            g: g_best,
            evals,
        }
    }
}

/// Minimum of the cubic through (x1, f1, g1), (x2, f2, g2), clamped to
/// bounds; falls back to the midpoint when the data is degenerate.
fn cubic_interpolate(
    x1: f64,
    f1: f64,
    g1: f64,
    x2: f64,
    f2: f64,
    g2: f64,
    bounds: Option<(f64, f64)>,
) -> f64 {
    let (lo, hi) = bounds.unwrap_or(if x1 <= x2 { (x1, x2) } else { (x2, x1) });
    if !(f1.is_finite() && f2.is_finite() && g1.is_finite() && g2.is_finite()) {
        return 0.5 * (lo + hi);
    }
    let d1 = g1 + g2 - 3.0 * (f1 - f2) / (x1 - x2);
    let d2_square = d1 * d1 - g1 * g2;
    if d2_square >= 0.0 {
        let d2 = d2_square.sqrt();
        let min_pos = if x1 <= x2 {
            x2 - (x2 - x1) * ((g2 + d2 - d1) / (g2 - g1 + 2.0 * d2))
        } else {
            x1 - (x1 - x2) * ((g1 + d2 - d1) / (g1 - g2 + 2.0 * d2))
        };
        if min_pos.is_finite() {
            min_pos.clamp(lo, hi)
        } else {
            0.5 * (lo + hi)
        }
    } else {
        0.5 * (lo + hi)
    }
}
