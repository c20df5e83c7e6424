//! Adam with bias correction, operating on flat parameter vectors.

#[derive(Debug, Clone, Copy)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamConfig {
    pub fn with_learning_rate(learning_rate: f64) -> Self {
        AdamConfig {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Adam {
    cfg: AdamConfig,
    first_moment: Vec<f64>,
    second_moment: Vec<f64>,
    step: u64,
}

impl Adam {
    pub fn new(cfg: AdamConfig, n_params: usize) -> Self {
        Adam {
            cfg,
            first_moment: vec![0.0; n_params],
            second_moment: vec![0.0; n_params],
            step: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        assert_eq!(params.len(), self.first_moment.len());
        assert_eq!(params.len(), grad.len());
        self.step += 1;
        let b1 = self.cfg.beta1;
        let b2 = self.cfg.beta2;
        let bias1 = 1.0 - b1.powi(self.step as i32);
        let bias2 = 1.0 - b2.powi(self.step as i32);
        let lr = self.cfg.learning_rate;
        for i in 0..params.len() {
            let g = grad[i];
            let m = b1 * self.first_moment[i] + (1.0 - b1) * g;
            let v = b2 * self.second_moment[i] + (1.0 - b2) * g * g;
            self.first_moment[i] = m;
            self.second_moment[i] = v;
            let m_hat = m / bias1;
            let v_hat = v / bias2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + self.cfg.epsilon);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let mut adam = Adam::new(AdamConfig::with_learning_rate(1e-3), 4);
        let mut params = vec![1.0, -2.0, 0.5, 3.25];
        let before = params.clone();
        adam.step(&mut params, &[0.0; 4]);
        adam.step(&mut params, &[0.0; 4]);
        assert_eq!(params, before);
    }

    #[test]
    fn descends_a_quadratic() {
        // f(p) = p^2, gradient 2p
        let mut adam = Adam::new(AdamConfig::with_learning_rate(0.1), 1);
        let mut params = vec![3.0];
        for _ in 0..500 {
            let g = 2.0 * params[0];
            adam.step(&mut params, &[g]);
        }
        assert!(params[0].abs() < 0.05, "got {}", params[0]);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        // with bias correction, |first update| = lr regardless of gradient scale
        let mut adam = Adam::new(AdamConfig::with_learning_rate(1e-2), 2);
        let mut params = vec![0.0, 0.0];
        adam.step(&mut params, &[123.0, -0.5]);
        assert!((params[0] + 1e-2).abs() < 1e-9);
        assert!((params[1] - 1e-2).abs() < 1e-9);
    }
}
