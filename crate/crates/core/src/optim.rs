//! Derivative-free simplex minimization with box projection.

/// Nelder–Mead with the standard coefficients (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2). Every candidate point is clamped into the
/// box `[-bound, bound]^d` before evaluation, realizing a compact search set.
#[derive(Debug, Clone)]
pub struct NelderMead {
    /// Half-width of the coordinate box.
    pub bound: f64,
    /// Edge length of the initial axis-aligned simplex.
    pub init_step: f64,
    /// Stop when both the simplex diameter and the value spread fall below this.
    pub tol: f64,
    pub max_iters: usize,
}

/// Outcome of one simplex run.
#[derive(Debug, Clone)]
pub struct SimplexOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iters: usize,
    pub converged: bool,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { bound: 2.0, init_step: 0.25, tol: 1e-7, max_iters: 400 }
    }
}

impl NelderMead {
    fn clamp(&self, x: &mut [f64]) {
        for v in x.iter_mut() {
            *v = v.clamp(-self.bound, self.bound);
        }
    }

    /// Minimizes `f` from `x0`. `f` may return infinity for infeasible points.
    pub fn minimize<F: Fn(&[f64]) -> f64>(&self, f: F, x0: &[f64]) -> SimplexOutcome {
        let d = x0.len();
        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
        let mut base = x0.to_vec();
        self.clamp(&mut base);
        simplex.push(base.clone());
        for i in 0..d {
            let mut v = base.clone();
            // Step inward if the vertex would leave the box.
            if v[i] + self.init_step <= self.bound {
                v[i] += self.init_step;
            } else {
                v[i] -= self.init_step;
            }
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

        let mut iters = 0;
        let mut converged = false;
        while iters < self.max_iters {
            iters += 1;
            // Order vertices by value.
            let mut order: Vec<usize> = (0..=d).collect();
            order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
            let best = order[0];
            let worst = order[d];
            let second_worst = order[d - 1];

            // Convergence: diameter and value spread.
            let mut diam = 0.0f64;
            for v in &simplex {
                for (a, b) in v.iter().zip(&simplex[best]) {
                    diam = diam.max((a - b).abs());
                }
            }
            let spread = if values[worst].is_finite() {
                values[worst] - values[best]
            } else {
                f64::INFINITY
            };
            if diam < self.tol && spread < self.tol {
                converged = true;
                break;
            }

            // Centroid of all but the worst vertex.
            let mut centroid = vec![0.0f64; d];
            for (i, v) in simplex.iter().enumerate() {
                if i == worst {
                    continue;
                }
                for (c, a) in centroid.iter_mut().zip(v) {
                    *c += a;
                }
            }
            for c in centroid.iter_mut() {
                *c /= d as f64;
            }

            let blend = |t: f64| -> Vec<f64> {
                let mut x: Vec<f64> = centroid
                    .iter()
                    .zip(&simplex[worst])
                    .map(|(c, w)| c + t * (c - w))
                    .collect();
                self.clamp(&mut x);
                x
            };

            let reflected = blend(1.0);
            let fr = f(&reflected);
            if fr < values[best] {
                let expanded = blend(2.0);
                let fe = f(&expanded);
                if fe < fr {
                    simplex[worst] = expanded;
                    values[worst] = fe;
                } else {
                    simplex[worst] = reflected;
                    values[worst] = fr;
                }
            } else if fr < values[second_worst] {
                simplex[worst] = reflected;
                values[worst] = fr;
            } else {
                let contracted = if fr < values[worst] { blend(0.5) } else { blend(-0.5) };
                let fc = f(&contracted);
                if fc < values[worst].min(fr) {
                    simplex[worst] = contracted;
                    values[worst] = fc;
                } else {
                    // Shrink toward the best vertex.
                    let best_v = simplex[best].clone();
                    for (i, v) in simplex.iter_mut().enumerate() {
                        if i == best {
                            continue;
                        }
                        for (a, b) in v.iter_mut().zip(&best_v) {
                            *a = b + 0.5 * (*a - b);
                        }
                        self.clamp(v);
                        values[i] = f(v);
                    }
                }
            }
        }

        let mut best = 0;
        for i in 1..=d {
            if values[i] < values[best] {
                best = i;
            }
        }
        SimplexOutcome {
            x: simplex[best].clone(),
            value: values[best],
            iters,
            converged,
        }
    }
}
