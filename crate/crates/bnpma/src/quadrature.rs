//! Gauss-Hermite quadrature, used to take expectations of smooth functions
//! of a standard normal variable.

use nalgebra::{DMatrix, SymmetricEigen};

/// Nodes and weights for ∫ f(x) e^{-x²} dx ≈ Σ wᵢ f(xᵢ).
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Golub-Welsch construction: nodes are eigenvalues of the Jacobi matrix
    /// of the Hermite recurrence, weights come from the first eigenvector
    /// components scaled by μ₀ = √π.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for k in 1..n {
            let off = (k as f64 / 2.0).sqrt();
            jacobi[(k - 1, k)] = off;
            jacobi[(k, k - 1)] = off;
        }
        let eigen = SymmetricEigen::new(jacobi);
        let mu0 = std::f64::consts::PI.sqrt();
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let node = eigen.eigenvalues[i];
                let v0 = eigen.eigenvectors[(0, i)];
                (node, mu0 * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        GaussHermite {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// E[f(Z)] for Z ~ N(0,1).
    pub fn expect_std_normal(&self, f: impl Fn(f64) -> f64) -> f64 {
        let sqrt2 = std::f64::consts::SQRT_2;
        let norm = std::f64::consts::PI.sqrt();
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(sqrt2 * x);
        }
        acc / norm
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// E[sigmoid(c + sd Z)] for Z ~ N(0,1), accurate below 1e-8 at any scale.
///
/// Gauss-Hermite handles the expectation while the sigmoid stays smooth
/// on the node spacing, which holds up to sd = 2; for wider priors the
/// nodes straddle the sigmoid transition and the error climbs toward
/// 1e-2. There the identity sigmoid(t) = P(L <= t) for L standard
/// logistic swaps the roles: E[sigmoid(c + sd Z)] = E[Phi((c - L)/sd)],
/// whose integrand only gets smoother as sd grows, and composite
/// Simpson over the logistic density is exact to machine precision.
pub fn sigmoid_normal_mean(c: f64, sd: f64, gh: &GaussHermite) -> f64 {
    if sd <= 2.0 {
        gh.expect_std_normal(|z| crate::logistic::sigmoid(c + sd * z))
    } else {
        probit_logistic_mean(c, sd)
    }
}

/// Composite Simpson for ∫ Phi((c - l)/sd) logistic_pdf(l) dl on [-60, 60].
/// The density truncates below 1e-26 outside; step 0.05 resolves the
/// probit factor whenever sd is not small.
fn probit_logistic_mean(c: f64, sd: f64) -> f64 {
    const LIM: f64 = 60.0;
    const STEPS: usize = 2_400; // even
    let h = 2.0 * LIM / STEPS as f64;
    let mut acc = 0.0;
    for k in 0..=STEPS {
        let l = -LIM + k as f64 * h;
        let e = (-l.abs()).exp();
        let pdf = e / ((1.0 + e) * (1.0 + e));
        let f = std_normal_cdf((c - l) / sd) * pdf;
        let coef = if k == 0 || k == STEPS {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += coef * f;
    }
    acc * h / 3.0
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}
