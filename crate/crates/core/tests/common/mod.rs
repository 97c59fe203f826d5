//! Brute-force references used only by tests. Nothing here calls into the
//! solver or the scan it checks.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rank pooling objective written out directly from its definition.
pub fn objective(v: &[Vec<f64>], w: &[f64], c: f64, eps: f64) -> f64 {
    let reg: f64 = w.iter().map(|x| x * x).sum::<f64>() * 0.5;
    let loss: f64 = v
        .iter()
        .enumerate()
        .map(|(t, vt)| {
            let s: f64 = vt.iter().zip(w).map(|(a, b)| a * b).sum();
            let e = ((t as f64 + 1.0 - s).abs() - eps).max(0.0);
            e * e
        })
        .sum();
    reg + 0.5 * c * loss
}

/// Radius of a ball that must contain the minimizer: f(w*) <= f(0) and
/// f(w) >= ||w||^2 / 2.
pub fn search_radius(v: &[Vec<f64>], c: f64, eps: f64) -> f64 {
    let dim = v[0].len();
    (2.0 * objective(v, &vec![0.0; dim], c, eps)).sqrt() + 1.0
}

pub fn ternary_min(mut lo: f64, mut hi: f64, iters: usize, f: impl Fn(f64) -> f64) -> (f64, f64) {
    for _ in 0..iters {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Minimizes a convex 1-D function: grid of the given step over
/// `[lo, hi]`, then ternary search on the bracketing cell pair.
pub fn grid_then_ternary(lo: f64, hi: f64, step: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let n = ((hi - lo) / step).ceil() as usize;
    let mut best = (lo, f(lo));
    for k in 1..=n {
        let x = (lo + k as f64 * step).min(hi);
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    let refined = ternary_min((best.0 - step).max(lo), (best.0 + step).min(hi), 200, &f);
    if refined.1 < best.1 {
        refined
    } else {
        best
    }
}

/// Global minimum of the rank pooling objective for `dim <= 2`.
///
/// 1-D: grid search at `step` plus ternary refinement. 2-D: a coarse grid,
/// then nested ternary search (the inner minimum of a jointly convex
/// function is convex in the outer coordinate), then a step-`step` local
/// grid around the result with coordinate-wise ternary polishing.
pub fn oracle_min(v: &[Vec<f64>], c: f64, eps: f64, step: f64) -> (Vec<f64>, f64) {
    let r = search_radius(v, c, eps);
    match v[0].len() {
        1 => {
            let (x, fx) = grid_then_ternary(-r, r, step, |x| objective(v, &[x], c, eps));
            (vec![x], fx)
        }
        2 => {
            let inner = |x: f64| ternary_min(-r, r, 120, |y| objective(v, &[x, y], c, eps));
            let (x, _) = ternary_min(-r, r, 120, |x| inner(x).1);
            let (y, _) = inner(x);
            let mut best = (vec![x, y], objective(v, &[x, y], c, eps));
            // local grid at the requested step
            for dx in -20..=20 {
                for dy in -20..=20 {
                    let p = [x + dx as f64 * step, y + dy as f64 * step];
                    let fp = objective(v, &p, c, eps);
                    if fp < best.1 {
                        best = (p.to_vec(), fp);
                    }
                }
            }
            // coordinate-wise ternary polish
            for _ in 0..20 {
                let (b0, b1) = (best.0[0], best.0[1]);
                let (nx, _) = ternary_min(b0 - step, b0 + step, 100, |t| objective(v, &[t, b1], c, eps));
                let (ny, fy) = ternary_min(b1 - step, b1 + step, 100, |t| objective(v, &[nx, t], c, eps));
                if fy < best.1 {
                    best = (vec![nx, ny], fy);
                }
            }
            best
        }
        d => panic!("oracle supports dim <= 2, got {d}"),
    }
}

pub fn central_difference(f: impl Fn(&[f64]) -> f64, w: &[f64], h: f64) -> Vec<f64> {
    (0..w.len())
        .map(|k| {
            let mut up = w.to_vec();
            let mut dn = w.to_vec();
            up[k] += h;
            dn[k] -= h;
            (f(&up) - f(&dn)) / (2.0 * h)
        })
        .collect()
}

pub fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-9 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// All maximal diagonal runs `(i, j, r)` with `r >= min_run` and every cell
/// `> t`, by enumerating every start and every length.
pub fn brute_force_runs(g: &[Vec<f64>], t: f64, min_run: usize) -> Vec<(usize, usize, usize)> {
    let a = g.len();
    let b = g.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    for i in 0..a {
        for j in 0..b {
            for r in 1..=a.min(b) {
                if i + r > a || j + r > b {
                    break;
                }
                if !(0..r).all(|p| g[i + p][j + p] > t) {
                    continue;
                }
                let extends_back = i > 0 && j > 0 && g[i - 1][j - 1] > t;
                let extends_fwd = i + r < a && j + r < b && g[i + r][j + r] > t;
                if !extends_back && !extends_fwd && r >= min_run {
                    out.push((i, j, r));
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Random gram-like matrix with planted diagonal streaks so long runs occur.
pub fn random_gram(rng: &mut ChaCha8Rng, a: usize, b: usize) -> Vec<Vec<f64>> {
    let mut g: Vec<Vec<f64>> = (0..a)
        .map(|_| (0..b).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    for _ in 0..rng.random_range(0..4) {
        let (i, j) = (rng.random_range(0..a), rng.random_range(0..b));
        let len = rng.random_range(1..=a.min(b));
        for p in 0..len {
            if i + p < a && j + p < b {
                g[i + p][j + p] = rng.random_range(0.5..1.0);
            }
        }
    }
    g
}
