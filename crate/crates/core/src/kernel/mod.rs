//! Quintic spline smoothing kernel and SPH gradient operators.
//!
//! ```text
//! W(q) = sigma_d / h^d * [ (3-q)^5 - 6 (2-q)^5 + 15 (1-q)^5 ],  q = r/h
//! ```
//! where each bracketed term only contributes while its base is positive.
//! The normalisation constants are 1/120 (1D), 7/(478 pi) (2D) and
//! 1/(120 pi) (3D). The frequently quoted 3D value 3/(359 pi) integrates to
//! 1.0028 and is not used.

mod gradient;

pub use gradient::{
    grad_asymmetric, grad_corrected, grad_standard, grad_symmetric, gradient_of,
    tangential_projection, Correction, FieldSample, Gradient, GradientVariant,
    CONDITION_LIMIT,
};

use std::f64::consts::PI;

use crate::{Error, Result};

/// Support radius in units of h.
pub const KAPPA: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    h: f64,
    dim: usize,
    inv_h: f64,
    /// sigma_d / h^d
    norm: f64,
    /// sigma_d / h^(d+1)
    dnorm: f64,
}

impl KernelSpec {
    pub fn new(h: f64, dim: usize) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Domain(format!("smoothing length must be positive, got {h}")));
        }
        let sigma = match dim {
            1 => 1.0 / 120.0,
            2 => 7.0 / (478.0 * PI),
            3 => 1.0 / (120.0 * PI),
            _ => return Err(Error::Domain(format!("dimension must be 1, 2 or 3, got {dim}"))),
        };
        let norm = sigma / h.powi(dim as i32);
        Ok(Self {
            h,
            dim,
            inv_h: 1.0 / h,
            norm,
            dnorm: norm / h,
        })
    }

    /// Rejects any scaling factor other than the quintic spline's 3.
    pub fn with_kappa(h: f64, kappa: f64, dim: usize) -> Result<Self> {
        if kappa != KAPPA {
            return Err(Error::Domain(format!(
                "the quintic spline has kappa = 3, got {kappa}"
            )));
        }
        Self::new(h, dim)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kappa(&self) -> f64 {
        KAPPA
    }

    pub fn support_radius(&self) -> f64 {
        KAPPA * self.h
    }

    /// Kernel value for `r >= 0`. Callers guarantee the sign.
    #[inline]
    pub fn w(&self, r: f64) -> f64 {
        let q = r * self.inv_h;
        if q >= 3.0 {
            return 0.0;
        }
        let a = 3.0 - q;
        let mut s = pow5(a);
        if q < 2.0 {
            s -= 6.0 * pow5(2.0 - q);
            if q < 1.0 {
                s += 15.0 * pow5(1.0 - q);
            }
        }
        self.norm * s
    }

    /// dW/dr for `r >= 0`.
    #[inline]
    pub fn dw(&self, r: f64) -> f64 {
        let q = r * self.inv_h;
        if q >= 3.0 {
            return 0.0;
        }
        let mut s = -5.0 * pow4(3.0 - q);
        if q < 2.0 {
            s += 30.0 * pow4(2.0 - q);
            if q < 1.0 {
                s -= 75.0 * pow4(1.0 - q);
            }
        }
        self.dnorm * s
    }
}

#[inline]
fn pow4(x: f64) -> f64 {
    let x2 = x * x;
    x2 * x2
}

#[inline]
fn pow5(x: f64) -> f64 {
    pow4(x) * x
}

/// W(r, h) of the quintic spline.
pub fn kernel_value(r: f64, spec: &KernelSpec) -> Result<f64> {
    check_distance(r)?;
    Ok(spec.w(r))
}

/// dW/dr of the quintic spline; never positive.
pub fn kernel_derivative(r: f64, spec: &KernelSpec) -> Result<f64> {
    check_distance(r)?;
    Ok(spec.dw(r))
}

fn check_distance(r: f64) -> Result<()> {
    if r >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("kernel distance must be non-negative, got {r}")))
    }
}
