//! Derivative-free minimization.

/// Nelder–Mead settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    /// Edge length of the initial simplex along each axis.
    pub initial_step: f64,
    pub max_evaluations: usize,
    /// Stop once the spread of simplex values falls below this.
    pub f_tol: f64,
    /// Stop once every vertex is within this distance of the best one.
    pub x_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            initial_step: 0.5,
            max_evaluations: 400,
            f_tol: 1e-10,
            x_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

impl NelderMead {
    /// Minimizes `f` from `start` with standard coefficients
    /// (reflect 1, expand 2, contract 1/2, shrink 1/2). Non-finite values
    /// are treated as `+inf`, so such points are never accepted.
    pub fn minimize<F>(&self, mut f: F, start: &[f64]) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let n = start.len();
        let mut evaluations = 0;
        let mut eval = |x: &[f64]| {
            evaluations += 1;
            let v = f(x);
            if v.is_finite() {
                v
            } else {
                f64::INFINITY
            }
        };
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((start.to_vec(), eval(start)));
        for i in 0..n {
            let mut x = start.to_vec();
            x[i] += self.initial_step;
            let v = eval(&x);
            simplex.push((x, v));
        }
        if n == 0 {
            let (x, value) = simplex.swap_remove(0);
            return Minimum {
                x,
                value,
                evaluations: 1,
            };
        }

        let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
            a.iter().zip(b).map(|(a, b)| a + t * (b - a)).collect()
        };
        let mut used = n + 1;
        while used < self.max_evaluations {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (best, worst) = (simplex[0].1, simplex[n].1);
            let spread_x = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if (worst - best).abs() <= self.f_tol || spread_x <= self.x_tol {
                break;
            }
            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / n as f64;
                }
            }
            let reflected = lerp(&centroid, &simplex[n].0, -1.0);
            let fr = eval(&reflected);
            used += 1;
            if fr < simplex[0].1 {
                let expanded = lerp(&centroid, &simplex[n].0, -2.0);
                let fe = eval(&expanded);
                used += 1;
                simplex[n] = if fe < fr {
                    (expanded, fe)
                } else {
                    (reflected, fr)
                };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (reflected, fr);
                continue;
            }
            let (contracted, fc) = if fr < simplex[n].1 {
                let c = lerp(&centroid, &reflected, 0.5);
                let v = eval(&c);
                (c, v)
            } else {
                let c = lerp(&centroid, &simplex[n].0, 0.5);
                let v = eval(&c);
                (c, v)
            };
            used += 1;
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (contracted, fc);
                continue;
            }
            let best_x = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let x = lerp(&best_x, &vertex.0, 0.5);
                let v = eval(&x);
                *vertex = (x, v);
            }
            used += n;
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, value) = simplex.swap_remove(0);
        Minimum {
            x,
            value,
            evaluations,
        }
    }
}
