//! Continuous-time recursive least squares with exponential forgetting.
//!
//! Estimates the sensitivity vector `ĥ` of the parametric model `z = ĥᵀφ`
//! through the coupled laws
//!
//! ```text
//! ĥ̇ = P ε φ,      Ṗ = β P − P φ φᵀ P,      ε = z − ĥᵀφ,
//! ```
//!
//! integrated with the same fixed-step RK4 as the rest of the loop. The
//! covariance is re-symmetrized after every step to kill accumulation
//! drift and must stay positive definite (checked by Cholesky). Under
//! forgetting (`β > 0`) the covariance grows without bound once the
//! regressor loses excitation; instead of clamping silently, any entry
//! exceeding a configurable ceiling raises [`Error::CovarianceDiverged`].

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::Error;

/// Default covariance ceiling used when the caller does not set one.
pub const DEFAULT_COVARIANCE_BOUND: f64 = 1e8;

/// Relative symmetry tolerance `‖P − Pᵀ‖∞ ≤ tol·‖P‖∞` checked each step.
const SYMMETRY_TOL: f64 = 1e-9;

/// Gradient estimate and covariance of the forgetting-factor RLS law.
#[derive(Clone, Debug, PartialEq)]
pub struct Rls {
    grad: DVector<f64>,
    covariance: DMatrix<f64>,
    forgetting: f64,
    last_residual: f64,
    bound: f64,
}

/// Time derivatives of the estimator state at a given `(z, φ)`.
pub struct RlsRates {
    pub residual: f64,
    pub grad: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

impl Rls {
    /// Fresh estimator: `ĥ = 0`, `P = p0·I`.
    pub fn new(dim: usize, p0: f64, forgetting: f64) -> Result<Self, Error> {
        if dim == 0 {
            return Err(Error::config("rls: dimension must be at least 1"));
        }
        if !p0.is_finite() || p0 <= 0.0 {
            return Err(Error::config(format!("p0: must be > 0, got {p0}")));
        }
        if !forgetting.is_finite() || forgetting < 0.0 {
            return Err(Error::config(format!("beta: must be >= 0, got {forgetting}")));
        }
        Ok(Rls {
            grad: DVector::zeros(dim),
            covariance: DMatrix::identity(dim, dim) * p0,
            forgetting,
            last_residual: 0.0,
            bound: DEFAULT_COVARIANCE_BOUND,
        })
    }

    /// Replaces the covariance ceiling (config bound for divergence detection).
    pub fn with_covariance_bound(mut self, bound: f64) -> Result<Self, Error> {
        if !bound.is_finite() || bound <= 0.0 {
            return Err(Error::config(format!("p_max: must be > 0, got {bound}")));
        }
        self.bound = bound;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn grad(&self) -> &DVector<f64> {
        &self.grad
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn covariance_trace(&self) -> f64 {
        self.covariance.trace()
    }

    pub fn forgetting(&self) -> f64 {
        self.forgetting
    }

    /// Residual `ε` computed from the state at entry to the last step.
    pub fn last_residual(&self) -> f64 {
        self.last_residual
    }

    pub fn covariance_bound(&self) -> f64 {
        self.bound
    }

    /// Estimator vector field at `(grad, covariance)` for the regressor pair.
    pub fn rates(
        grad: &DVector<f64>,
        covariance: &DMatrix<f64>,
        forgetting: f64,
        z: f64,
        phi: &DVector<f64>,
    ) -> RlsRates {
        let residual = z - grad.dot(phi);
        let p_phi = covariance * phi;
        RlsRates {
            residual,
            grad: &p_phi * residual,
            covariance: covariance * forgetting - &p_phi * p_phi.transpose(),
        }
    }

    /// Advances `(ĥ, P)` one RK4 step with the pair `(z, φ)` held constant,
    /// then re-symmetrizes and checks the exit-state invariants.
    pub fn step(&mut self, z: f64, phi: &DVector<f64>, dt: f64) -> Result<(), Error> {
        if phi.len() != self.dim() {
            return Err(Error::config(format!(
                "rls step: expected {}-dimensional phi, got {}",
                self.dim(),
                phi.len()
            )));
        }
        if !z.is_finite() {
            return Err(Error::NonFinite("rls input z"));
        }
        if !phi.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("rls input phi"));
        }
        if dt <= 0.0 {
            return Err(Error::config("rls step: dt must be > 0"));
        }

        let beta = self.forgetting;
        let k1 = Self::rates(&self.grad, &self.covariance, beta, z, phi);
        let g2 = &self.grad + &k1.grad * (dt / 2.0);
        let p2 = &self.covariance + &k1.covariance * (dt / 2.0);
        let k2 = Self::rates(&g2, &p2, beta, z, phi);
        let g3 = &self.grad + &k2.grad * (dt / 2.0);
        let p3 = &self.covariance + &k2.covariance * (dt / 2.0);
        let k3 = Self::rates(&g3, &p3, beta, z, phi);
        let g4 = &self.grad + &k3.grad * dt;
        let p4 = &self.covariance + &k3.covariance * dt;
        let k4 = Self::rates(&g4, &p4, beta, z, phi);

        self.grad += (k1.grad + k2.grad * 2.0 + k3.grad * 2.0 + k4.grad) * (dt / 6.0);
        self.covariance +=
            (k1.covariance + k2.covariance * 2.0 + k3.covariance * 2.0 + k4.covariance)
                * (dt / 6.0);
        self.last_residual = k1.residual;

        symmetrize(&mut self.covariance);
        self.check_invariants()
    }

    fn check_invariants(&self) -> Result<(), Error> {
        if !self.grad.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("rls gradient estimate"));
        }
        check_covariance(&self.covariance, self.bound)
    }
}

/// Averages a matrix with its transpose in place.
pub fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// Checks finiteness, the configured ceiling, symmetry and positive
/// definiteness (via Cholesky) of a covariance matrix.
pub fn check_covariance(covariance: &DMatrix<f64>, bound: f64) -> Result<(), Error> {
    let mut max_abs: f64 = 0.0;
    for v in covariance.iter() {
        if !v.is_finite() {
            return Err(Error::NonFinite("covariance entry"));
        }
        max_abs = max_abs.max(v.abs());
    }
    if max_abs > bound {
        return Err(Error::CovarianceDiverged { bound });
    }
    let mut max_asym: f64 = 0.0;
    for i in 0..covariance.nrows() {
        for j in (i + 1)..covariance.ncols() {
            max_asym = max_asym.max((covariance[(i, j)] - covariance[(j, i)]).abs());
        }
    }
    if max_asym > SYMMETRY_TOL * max_abs.max(f64::MIN_POSITIVE) {
        return Err(Error::CovarianceNotPd);
    }
    if Cholesky::new(covariance.clone()).is_none() {
        return Err(Error::CovarianceNotPd);
    }
    Ok(())
}
