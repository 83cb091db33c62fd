use thiserror::Error;

/// Constant coefficients of the model, plus the exponents and the domain.
///
/// Units: r, m, mu, d are rates (1/time); K, a are densities; lambda is
/// 1/(density*time); delta1, delta3 are length^2/time and delta2 generalizes
/// that when p != 2; chi1, chi2 are taxis strengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub r: f64,
    pub k: f64,
    pub lambda: f64,
    pub m: f64,
    pub a: f64,
    pub mu: f64,
    pub d: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub chi1: f64,
    pub chi2: f64,
    /// Dispersal exponent of the infected class, >= 2. p = 2 is classical
    /// diffusion; p > 2 makes the flux vanish where the gradient vanishes.
    pub p: f64,
    /// Mortality exponent in (0, 1]. gamma < 1 enables finite-time extinction.
    pub gamma: f64,
    /// Flux regularization: the face weight is (g^2 + eps_reg)^((p-2)/2).
    /// Must be positive when p > 2.
    pub eps_reg: f64,
    /// Domain length; the model lives on (0, domain_len).
    pub domain_len: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parameter `{field}` {reason}")]
pub struct ParamError {
    pub field: &'static str,
    pub reason: &'static str,
}

fn positive(field: &'static str, v: f64) -> Result<(), ParamError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ParamError { field, reason: "must be finite and strictly positive" })
    }
}

fn nonnegative(field: &'static str, v: f64) -> Result<(), ParamError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(ParamError { field, reason: "must be finite and nonnegative" })
    }
}

impl ModelParams {
    /// Rates and domain shared by the bundled `fig1`..`fig5` presets:
    /// r=5, K=75, lambda=3, m=70.8, a=12, mu=3.4, d=8.3, delta=(1,1,2),
    /// p=2, gamma=1, domain (0, 30*pi). Taxis is off; presets set chi1, chi2.
    pub fn baseline() -> Self {
        ModelParams {
            r: 5.0,
            k: 75.0,
            lambda: 3.0,
            m: 70.8,
            a: 12.0,
            mu: 3.4,
            d: 8.3,
            delta1: 1.0,
            delta2: 1.0,
            delta3: 2.0,
            chi1: 0.0,
            chi2: 0.0,
            p: 2.0,
            gamma: 1.0,
            eps_reg: 0.0,
            domain_len: 30.0 * std::f64::consts::PI,
        }
    }

    /// Validates every field. Diffusion coefficients may be zero (the
    /// spatially homogeneous submodel sets all of them to zero); everything
    /// else follows the signs stated on the fields.
    pub fn validate(&self) -> Result<(), ParamError> {
        positive("r", self.r)?;
        positive("k", self.k)?;
        positive("lambda", self.lambda)?;
        positive("m", self.m)?;
        positive("a", self.a)?;
        positive("mu", self.mu)?;
        positive("d", self.d)?;
        nonnegative("delta1", self.delta1)?;
        nonnegative("delta2", self.delta2)?;
        nonnegative("delta3", self.delta3)?;
        nonnegative("chi1", self.chi1)?;
        nonnegative("chi2", self.chi2)?;
        positive("domain_len", self.domain_len)?;
        if !self.p.is_finite() || self.p < 2.0 {
            return Err(ParamError { field: "p", reason: "must be >= 2" });
        }
        if !self.gamma.is_finite() || self.gamma <= 0.0 || self.gamma > 1.0 {
            return Err(ParamError { field: "gamma", reason: "must lie in (0, 1]" });
        }
        nonnegative("eps_reg", self.eps_reg)?;
        if self.p > 2.0 && self.eps_reg == 0.0 {
            return Err(ParamError { field: "eps_reg", reason: "must be positive when p > 2" });
        }
        Ok(())
    }

    /// Rates for which the coexistence state is both feasible and linearly
    /// stable, unlike [`baseline`](Self::baseline) whose equilibrium carries
    /// an unstable oscillatory pair. Satisfies m*r/d > lambda*K > mu with
    /// R0 = 2, so it doubles as the persistence demo set.
    pub fn stable_coexistence() -> Self {
        ModelParams {
            r: 8.0,
            k: 40.0,
            lambda: 1.5,
            m: 45.0,
            a: 20.0,
            mu: 9.0,
            d: 3.0,
            ..Self::baseline()
        }
    }

    /// lambda * K, the linear growth bound on the infection term.
    pub fn lambda_k(&self) -> f64 {
        self.lambda * self.k
    }

    /// (k*pi/l)^2, the k-th eigenvalue of -d^2/dx^2 with Neumann ends;
    /// the spatial decay rate felt by the cos(k*pi*x/l) mode.
    pub fn neumann_eigenvalue(&self, k: usize) -> f64 {
        let w = k as f64 * std::f64::consts::PI / self.domain_len;
        w * w
    }
}
