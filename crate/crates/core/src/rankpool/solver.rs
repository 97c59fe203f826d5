//! Exact rank pooling: squared epsilon-insensitive support vector regression
//! of the frame index on the smoothed frame vectors.
//!
//! ```text
//! f(w) = 1/2 ||w||^2 + C/2 * sum_{t=1..J} max(|t - w.v_t| - eps, 0)^2
//! ```
//!
//! `f` is strongly convex and continuously differentiable with a piecewise
//! constant generalized Hessian `I + C * sum_{active t} v_t v_t^T`, where a
//! frame is active when `|t - w.v_t| > eps`. The solver takes damped Newton
//! steps with that Hessian and an Armijo backtracking line search, starting
//! from `w = 0`. The Newton system is solved in frame space through the
//! Woodbury identity, so its size is bounded by the window length rather than
//! the feature dimension.

use crate::error::{Error, Result};
use crate::preprocess::SmoothedSequence;
use crate::scalar::{dot, Real};

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

/// The rank pooling objective over one smoothed segment.
#[derive(Debug, Clone, Copy)]
pub struct RankObjective<'a, T> {
    v: &'a SmoothedSequence<T>,
    c: T,
    epsilon: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub w: Vec<T>,
    pub objective: T,
    pub iterations: usize,
}

impl<'a, T: Real> RankObjective<'a, T> {
    pub fn new(v: &'a SmoothedSequence<T>, c: f64, epsilon: f64) -> Self {
        Self {
            v,
            c: T::of(c),
            epsilon: T::of(epsilon),
        }
    }

    fn excess(&self, target: T, score: T) -> T {
        ((target - score).abs() - self.epsilon).max(T::zero())
    }

    pub fn value(&self, w: &[T]) -> T {
        let half = T::of(0.5);
        let loss: T = self
            .v
            .rows()
            .enumerate()
            .map(|(t, v)| {
                let e = self.excess(T::of((t + 1) as f64), dot(w, v));
                e * e
            })
            .sum();
        half * dot(w, w) + half * self.c * loss
    }

    /// `w - C * sum_t sign(r_t) * max(|r_t| - eps, 0) * v_t` with `r_t = t - w.v_t`.
    pub fn gradient(&self, w: &[T]) -> Vec<T> {
        let mut g = w.to_vec();
        for (t, v) in self.v.rows().enumerate() {
            let r = T::of((t + 1) as f64) - dot(w, v);
            let e = self.excess(T::of((t + 1) as f64), dot(w, v));
            if e > T::zero() {
                let coef = self.c * e * r.signum();
                g.iter_mut().zip(v).for_each(|(gi, &vi)| *gi -= coef * vi);
            }
        }
        g
    }

    /// Minimizes the objective from `w = 0`.
    ///
    /// Stops once half the squared Newton decrement (the predicted remaining
    /// decrease) falls below `tol * (1 + |f|)`, or when the line search can no
    /// longer decrease `f` in floating point.
    pub fn minimize(&self, tol: f64, max_iters: usize) -> Result<Solution<T>> {
        let dim = self.v.dim();
        let frames: Vec<&[T]> = self.v.rows().collect();
        let n = frames.len();
        let tol = T::of(tol);
        let half = T::of(0.5);

        // Frame gram matrix, reused by every Newton system.
        let mut kernel = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..=i {
                let k = dot(frames[i], frames[j]);
                kernel[i * n + j] = k;
                kernel[j * n + i] = k;
            }
        }

        let mut w = vec![T::zero(); dim];
        let mut scores = vec![T::zero(); n];
        let mut f = self.value(&w);
        for iter in 0..max_iters {
            // residual-driven gradient and active set
            let mut g = w.clone();
            let mut active = Vec::with_capacity(n);
            for (t, v) in frames.iter().enumerate() {
                let r = T::of((t + 1) as f64) - scores[t];
                let e = (r.abs() - self.epsilon).max(T::zero());
                if e > T::zero() {
                    active.push(t);
                    let coef = self.c * e * r.signum();
                    g.iter_mut().zip(v.iter()).for_each(|(gi, &vi)| *gi -= coef * vi);
                }
            }

            let p = self.newton_direction(&g, &frames, &kernel, n, &active);
            let slope = dot(&g, &p);
            let decrement = -slope;
            if half * decrement <= tol * (T::one() + f.abs()) || decrement <= T::zero() {
                return Ok(Solution {
                    w,
                    objective: f,
                    iterations: iter,
                });
            }

            // Line search along p using precomputed projections.
            let proj: Vec<T> = frames.iter().map(|v| dot(&p, v)).collect();
            let ww = dot(&w, &w);
            let wp = dot(&w, &p);
            let pp = dot(&p, &p);
            let trial = |step: T| -> T {
                let loss: T = scores
                    .iter()
                    .zip(&proj)
                    .enumerate()
                    .map(|(t, (&s, &q))| {
                        let e = self.excess(T::of((t + 1) as f64), s + step * q);
                        e * e
                    })
                    .sum();
                half * (ww + T::of(2.0) * step * wp + step * step * pp) + half * self.c * loss
            };
            let mut step = T::one();
            let mut accepted = None;
            for _ in 0..MAX_HALVINGS {
                let f_new = trial(step);
                if f_new <= f + T::of(ARMIJO) * step * slope {
                    accepted = Some(f_new);
                    break;
                }
                step *= half;
            }
            let Some(f_new) = accepted else {
                // no representable decrease left
                return Ok(Solution {
                    w,
                    objective: f,
                    iterations: iter,
                });
            };
            w.iter_mut().zip(&p).for_each(|(wi, &pi)| *wi += step * pi);
            scores.iter_mut().zip(&proj).for_each(|(s, &q)| *s += step * q);
            f = f_new;
        }
        Err(Error::NonConvergence {
            iterations: max_iters,
            objective: f.as_f64(),
        })
    }

    /// Solves `(I + C V_A^T V_A) p = -g` via
    /// `p = -g + C V_A^T (I + C K_AA)^{-1} V_A g`.
    fn newton_direction(&self, g: &[T], frames: &[&[T]], kernel: &[T], n: usize, active: &[usize]) -> Vec<T> {
        let mut p: Vec<T> = g.iter().map(|&x| -x).collect();
        let m = active.len();
        if m == 0 {
            return p;
        }
        let mut system = vec![T::zero(); m * m];
        for (a, &i) in active.iter().enumerate() {
            for (b, &j) in active.iter().enumerate() {
                system[a * m + b] = self.c * kernel[i * n + j];
            }
            system[a * m + a] += T::one();
        }
        let mut rhs: Vec<T> = active.iter().map(|&i| dot(frames[i], g)).collect();
        if !cholesky_solve(&mut system, m, &mut rhs) {
            return p;
        }
        for (&i, &y) in active.iter().zip(&rhs) {
            let coef = self.c * y;
            p.iter_mut().zip(frames[i]).for_each(|(pi, &vi)| *pi += coef * vi);
        }
        p
    }
}

/// In-place Cholesky factorization and solve of an SPD `n x n` system.
/// Returns false if a pivot is not positive.
fn cholesky_solve<T: Real>(a: &mut [T], n: usize, b: &mut [T]) -> bool {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if d.is_nan() || d <= T::zero() {
            return false;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= a[i * n + k] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= a[k * n + i] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_matches_known_solution() {
        // [[4, 2], [2, 3]] x = [2, 1] -> x = [0.5, 0]
        let mut a = vec![4.0, 2.0, 2.0, 3.0];
        let mut b = vec![2.0, 1.0];
        assert!(cholesky_solve(&mut a, 2, &mut b));
        assert!((b[0] - 0.5f64).abs() < 1e-12 && b[1].abs() < 1e-12);
        let mut bad = vec![0.0, 1.0, 1.0, 0.0];
        assert!(!cholesky_solve(&mut bad, 2, &mut [1.0f64, 1.0]));
    }

    #[test]
    fn gradient_vanishes_at_solution() {
        let v = SmoothedSequence::from_rows(&[vec![0.6, 0.8], vec![0.8, 0.6], vec![1.0, 0.0]]);
        let obj = RankObjective::new(&v, 1.0, 0.1);
        let sol = obj.minimize(1e-10, 100).unwrap();
        let g = obj.gradient(&sol.w);
        assert!(g.iter().all(|x: &f64| x.abs() < 1e-6), "{g:?}");
        assert!(sol.iterations < 50);
    }

    #[test]
    fn non_convergence_reports_objective() {
        let v = SmoothedSequence::from_rows(&[vec![0.6, 0.8], vec![0.8, 0.6], vec![1.0, 0.0]]);
        let err = RankObjective::new(&v, 10.0, 0.0).minimize(1e-12, 0).unwrap_err();
        match err {
            Error::NonConvergence { iterations, objective } => {
                assert_eq!(iterations, 0);
                assert!(objective > 0.0);
            }
            other => panic!("{other:?}"),
        }
    }
}
