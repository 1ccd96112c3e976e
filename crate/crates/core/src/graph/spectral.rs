//! Adjacency spectrum diagnostics: minimum/maximum degree and
//! `λ = max(|μ₂|, |μₙ|)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{Graph, Topology};

/// Graphs up to this order get a dense symmetric eigensolve.
pub const EXACT_SPECTRUM_THRESHOLD: usize = 4096;

const POWER_ITERATIONS: usize = 200;
const POWER_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralMethod {
    ExactEigensolve,
    PowerIterationEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    pub min_degree: usize,
    pub max_degree: usize,
    pub lambda: f64,
    /// Largest adjacency eigenvalue.
    pub mu1: f64,
    pub method: SpectralMethod,
}

pub fn spectral_profile(g: &Graph) -> SpectralProfile {
    spectral_profile_with_threshold(g, EXACT_SPECTRUM_THRESHOLD)
}

pub fn spectral_profile_with_threshold(g: &Graph, exact_threshold: usize) -> SpectralProfile {
    let (mu1, lambda, method) = if g.n() <= exact_threshold {
        let (values, _) = adjacency_spectrum(g);
        let lambda = if values.len() < 2 {
            0.0
        } else {
            values[1].abs().max(values[values.len() - 1].abs())
        };
        (values[0], lambda, SpectralMethod::ExactEigensolve)
    } else {
        let (mu1, lambda) = power_estimate(g);
        (mu1, lambda, SpectralMethod::PowerIterationEstimate)
    };
    SpectralProfile {
        min_degree: g.min_degree(),
        max_degree: g.max_degree(),
        lambda: lambda.clamp(0.0, g.max_degree() as f64),
        mu1,
        method,
    }
}

/// Dense adjacency matrix.
pub fn adjacency_matrix(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    let mut a = DMatrix::zeros(n, n);
    for (u, v) in g.edges() {
        a[(u, v)] = 1.0;
        a[(v, u)] = 1.0;
    }
    a
}

/// All eigenvalues in descending order, with the matching unit
/// eigenvectors as columns.
pub fn adjacency_spectrum(g: &Graph) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(adjacency_matrix(g));
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(g.n(), g.n(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

fn multiply(g: &Graph, x: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(g.n(), |v, _| {
        g.neighbors(v).iter().map(|&u| x[u as usize]).sum()
    })
}

/// `μ₁` by power iteration on `A + Δ·I` (positive spectrum, so the Perron
/// vector dominates even for bipartite graphs), then `λ` by power iteration
/// on `A − μ₁·v·vᵀ` using the norm ratio.
fn power_estimate(g: &Graph) -> (f64, f64) {
    let n = g.n();
    let shift = g.max_degree() as f64;
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut mu1 = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let mut w = multiply(g, &v) + &v * shift;
        let norm = w.norm();
        if norm == 0.0 {
            break;
        }
        w /= norm;
        let estimate = norm - shift;
        v = w;
        let done = (estimate - mu1).abs() <= POWER_TOLERANCE * estimate.abs().max(1.0);
        mu1 = estimate;
        if done {
            break;
        }
    }

    // Deterministic start vector with no special symmetry.
    let mut x = DVector::from_fn(n, |i, _| ((i as f64 + 1.0) * 0.618_033_988_75).fract() - 0.5);
    x -= &v * v.dot(&x);
    let mut lambda = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let norm = x.norm();
        if norm == 0.0 {
            return (mu1, 0.0);
        }
        x /= norm;
        let mut y = multiply(g, &x);
        y -= &v * (mu1 * v.dot(&x));
        let estimate = y.norm();
        let done = (estimate - lambda).abs() <= POWER_TOLERANCE * estimate.max(1.0);
        lambda = estimate;
        x = y;
        if done {
            break;
        }
    }
    (mu1, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4_profile() {
        let p = spectral_profile(&Graph::complete(4).unwrap());
        assert_eq!((p.min_degree, p.max_degree), (3, 3));
        assert!((p.lambda - 1.0).abs() < 1e-12);
        assert!((p.mu1 - 3.0).abs() < 1e-12);
        assert_eq!(p.method, SpectralMethod::ExactEigensolve);
    }

    #[test]
    fn star_profile() {
        let p = spectral_profile(&Graph::star(5).unwrap());
        assert_eq!((p.min_degree, p.max_degree), (1, 4));
        assert!((p.lambda - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cycle_profile() {
        let (values, _) = adjacency_spectrum(&Graph::cycle(4).unwrap());
        let expect = [2.0, 0.0, 0.0, -2.0];
        for (a, b) in values.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((spectral_profile(&Graph::cycle(4).unwrap()).lambda - 2.0).abs() < 1e-12);
    }

    #[test]
    fn single_vertex() {
        let p = spectral_profile(&Graph::complete(1).unwrap());
        assert_eq!(p.lambda, 0.0);
    }

    #[test]
    fn power_estimate_tracks_exact_on_cycle_and_petersen_like() {
        // C_9: spectrum 2cos(2πk/9); λ = |2cos(8π/9)| ≈ 1.879.
        let g = Graph::cycle(9).unwrap();
        let exact = spectral_profile(&g);
        let approx = spectral_profile_with_threshold(&g, 0);
        assert_eq!(approx.method, SpectralMethod::PowerIterationEstimate);
        assert!((approx.mu1 - 2.0).abs() < 1e-4);
        assert!((approx.lambda - exact.lambda).abs() < 0.05, "{approx:?} vs {exact:?}");
    }
}
