//! Lloyd's k-means with k-means++ seeding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansParams {
    pub k: usize,
    pub max_iters: usize,
    /// Stop when inertia improves by less than this fraction.
    pub rel_tol: f64,
    pub seed: u64,
}

impl Default for KMeansParams {
    fn default() -> Self {
        Self {
            k: 10,
            max_iters: 100,
            rel_tol: 1e-4,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult<T> {
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<T>>,
    pub inertia: T,
    pub iterations: usize,
}

fn sq_dist<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
}

fn nearest<T: Real>(p: &[T], centroids: &[Vec<T>]) -> (usize, T) {
    let mut best = (0, T::infinity());
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(p, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Clusters `points` (all of one dimension) into at most `k` groups.
pub fn kmeans<T: Real>(points: &[Vec<T>], params: &KMeansParams) -> KMeansResult<T> {
    let n = points.len();
    let k = params.k.min(n);
    if k == 0 {
        return KMeansResult {
            labels: vec![],
            centroids: vec![],
            inertia: T::zero(),
            iterations: 0,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    // k-means++ seeding
    let mut centroids = vec![points[rng.random_range(0..n)].clone()];
    let mut d2: Vec<T> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().map(|d| d.as_f64()).sum();
        let pick = if total > 0.0 {
            let mut r = rng.random::<f64>() * total;
            let mut idx = n - 1;
            for (i, d) in d2.iter().enumerate() {
                r -= d.as_f64();
                if r <= 0.0 && d.as_f64() > 0.0 {
                    idx = i;
                    break;
                }
            }
            idx
        } else {
            // every point coincides with a centroid already
            rng.random_range(0..n)
        };
        centroids.push(points[pick].clone());
        for (d, p) in d2.iter_mut().zip(points) {
            *d = (*d).min(sq_dist(p, centroids.last().unwrap()));
        }
    }

    let dim = points[0].len();
    let mut labels = vec![0; n];
    let mut inertia = T::infinity();
    let mut iterations = 0;
    for iter in 0..params.max_iters.max(1) {
        iterations = iter + 1;
        let mut new_inertia = T::zero();
        for (label, p) in labels.iter_mut().zip(points) {
            let (c, d) = nearest(p, &centroids);
            *label = c;
            new_inertia += d;
        }
        let mut sums = vec![vec![T::zero(); dim]; k];
        let mut counts = vec![0usize; k];
        for (&label, p) in labels.iter().zip(points) {
            counts[label] += 1;
            sums[label].iter_mut().zip(p).for_each(|(s, &x)| *s += x);
        }
        for c in 0..k {
            // empty clusters keep their centroid
            if counts[c] > 0 {
                let cnt = T::of(counts[c] as f64);
                centroids[c] = sums[c].iter().map(|&s| s / cnt).collect();
            }
        }
        let improved = inertia - new_inertia;
        let converged = inertia.is_finite() && improved <= T::of(params.rel_tol) * inertia;
        inertia = new_inertia;
        if converged {
            break;
        }
    }
    // final assignment against the last centroids
    let mut final_inertia = T::zero();
    for (label, p) in labels.iter_mut().zip(points) {
        let (c, d) = nearest(p, &centroids);
        *label = c;
        final_inertia += d;
    }
    KMeansResult {
        labels,
        centroids,
        inertia: final_inertia.min(inertia),
        iterations,
    }
}
