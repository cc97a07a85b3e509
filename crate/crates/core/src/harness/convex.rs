//! Projections and a projected-gradient minimizer on intersections of
//! convex sets.

/// A closed convex set with a Euclidean projection.
pub trait ConvexSet {
    fn project(&self, x: &[f64]) -> Vec<f64>;
}

/// Probability simplex `{x ≥ 0, Σ x = 1}`.
#[derive(Debug, Clone, Copy)]
pub struct Simplex;

/// `{x : ‖x − center‖₁ ≤ radius}`.
#[derive(Debug, Clone)]
pub struct L1Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// `{x : normal · x = offset}`.
#[derive(Debug, Clone)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// Projection onto `{x ≥ 0, Σ x = z}` by sorting.
fn project_scaled_simplex(y: &[f64], z: f64) -> Vec<f64> {
    let mut u = y.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        acc += ui;
        let t = (acc - z) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    y.iter().map(|v| (v - theta).max(0.0)).collect()
}

impl ConvexSet for Simplex {
    fn project(&self, x: &[f64]) -> Vec<f64> {
        project_scaled_simplex(x, 1.0)
    }
}

impl ConvexSet for L1Ball {
    fn project(&self, x: &[f64]) -> Vec<f64> {
        let d: Vec<f64> = x.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        if d.iter().map(|v| v.abs()).sum::<f64>() <= self.radius {
            return x.to_vec();
        }
        let abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
        let w = project_scaled_simplex(&abs, self.radius);
        self.center.iter().zip(&d).zip(w).map(|((c, v), w)| c + v.signum() * w).collect()
    }
}

impl ConvexSet for Hyperplane {
    fn project(&self, x: &[f64]) -> Vec<f64> {
        let dot: f64 = x.iter().zip(&self.normal).map(|(a, b)| a * b).sum();
        let nn: f64 = self.normal.iter().map(|b| b * b).sum();
        let k = (dot - self.offset) / nn;
        x.iter().zip(&self.normal).map(|(a, b)| a - k * b).collect()
    }
}

/// Projection onto an intersection by Dykstra's alternating scheme. The last
/// set is applied last, so the result lies in it exactly.
pub fn project_intersection(sets: &[&dyn ConvexSet], x: &[f64], tol: f64, max_iter: usize) -> Vec<f64> {
    if sets.len() == 1 {
        return sets[0].project(x);
    }
    let mut cur = x.to_vec();
    let mut incr = vec![vec![0.0; x.len()]; sets.len()];
    for _ in 0..max_iter {
        let prev = cur.clone();
        for (set, p) in sets.iter().zip(incr.iter_mut()) {
            let shifted: Vec<f64> = cur.iter().zip(p.iter()).map(|(c, q)| c + q).collect();
            let y = set.project(&shifted);
            for ((q, s), yi) in p.iter_mut().zip(&shifted).zip(&y) {
                *q = s - yi;
            }
            cur = y;
        }
        let moved = cur.iter().zip(&prev).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if moved <= tol {
            break;
        }
    }
    cur
}

#[derive(Debug, Clone, Copy)]
pub struct PgOptions {
    pub max_iter: usize,
    /// Stop once a step moves no coordinate by more than this.
    pub step_tol: f64,
    /// Gradient entries are clamped to `±grad_cap`.
    pub grad_cap: f64,
}

impl Default for PgOptions {
    fn default() -> Self {
        PgOptions { max_iter: 20_000, step_tol: 1e-13, grad_cap: 1e6 }
    }
}

#[derive(Debug, Clone)]
pub struct PgResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Projected gradient with Armijo backtracking on a convex objective.
pub fn projected_gradient<F, P>(objective: F, project: P, x0: &[f64], opts: PgOptions) -> PgResult
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
    P: Fn(&[f64]) -> Vec<f64>,
{
    let mut x = project(x0);
    let (mut fx, mut g) = objective(&x);
    let mut step: f64 = 1.0;
    for iter in 0..opts.max_iter {
        for gi in &mut g {
            *gi = gi.clamp(-opts.grad_cap, opts.grad_cap);
        }
        step = (step * 2.0).min(1e3);
        loop {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            let y = project(&trial);
            let d: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
            let moved = d.iter().map(|v| v.abs()).fold(0.0, f64::max);
            if moved <= opts.step_tol {
                return PgResult { x, value: fx, iterations: iter, converged: true };
            }
            let (fy, gy) = objective(&y);
            let lin: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
            let quad: f64 = d.iter().map(|v| v * v).sum::<f64>() / (2.0 * step);
            if fy <= fx + lin + quad || (fy < fx && step < 1e-12) {
                let done = (fx - fy).abs() <= 1e-16 * fx.abs().max(1.0);
                x = y;
                fx = fy;
                g = gy;
                if done {
                    return PgResult { x, value: fx, iterations: iter + 1, converged: true };
                }
                break;
            }
            step *= 0.5;
            if step < 1e-18 {
                return PgResult { x, value: fx, iterations: iter, converged: false };
            }
        }
    }
    PgResult { x, value: fx, iterations: opts.max_iter, converged: false }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_projection() {
        assert_eq!(Simplex.project(&[0.2, 0.8]), vec![0.2, 0.8]);
        let p = Simplex.project(&[2.0, 0.0]);
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1] == 0.0);
        let p = Simplex.project(&[0.5, 0.5, 0.5]);
        assert!(p.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn l1_ball_projection() {
        let ball = L1Ball { center: vec![0.5, 0.5], radius: 0.1 };
        let p = ball.project(&[1.0, 0.0]);
        assert!((p[0] - 0.55).abs() < 1e-15 && (p[1] - 0.45).abs() < 1e-15);
        assert_eq!(ball.project(&[0.52, 0.49]), vec![0.52, 0.49]);
    }

    #[test]
    fn dykstra_finds_intersection_projection() {
        // simplex ∩ {x_0 = 0.3} in 3d: projection of (1, 1, 0) is (0.3, 0.7, 0)
        let plane = Hyperplane { normal: vec![1.0, 0.0, 0.0], offset: 0.3 };
        let p = project_intersection(&[&plane, &Simplex], &[1.0, 1.0, 0.0], 1e-15, 10_000);
        assert!((p[0] - 0.3).abs() < 1e-10 && (p[1] - 0.7).abs() < 1e-10 && p[2].abs() < 1e-10, "{p:?}");
    }

    #[test]
    fn minimizes_quadratic_on_simplex() {
        let target = [0.9, 0.4, -0.2];
        let f = |x: &[f64]| {
            let v = x.iter().zip(&target).map(|(a, b)| (a - b) * (a - b)).sum();
            (v, x.iter().zip(&target).map(|(a, b)| 2.0 * (a - b)).collect())
        };
        let r = projected_gradient(f, |x| Simplex.project(x), &[1.0 / 3.0; 3], PgOptions::default());
        assert!(r.converged);
        let exact = Simplex.project(&target);
        for (a, b) in r.x.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
