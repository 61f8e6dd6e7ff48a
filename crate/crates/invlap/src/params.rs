use crate::{Error, Result};

/// Dimension and drift parameter of the operator, validated on construction.
///
/// Invariants: `n >= 3` and `alpha > -1/2`. The second is exactly the range
/// in which the Dirichlet problem is solvable; at `alpha = -1/2` the kernel
/// normalization constant degenerates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    n: usize,
    alpha: f64,
}

impl ModelParams {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParams(format!("n = {n}, need n >= 3")));
        }
        if !alpha.is_finite() || alpha <= -0.5 {
            return Err(Error::InvalidParams(format!(
                "alpha = {alpha}, need finite alpha > -1/2"
            )));
        }
        Ok(Self { n, alpha })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Dimension as f64, purely for arithmetic convenience.
    pub fn nf(&self) -> f64 {
        self.n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_solvable_range() {
        assert!(ModelParams::new(3, 0.0).is_ok());
        assert!(ModelParams::new(3, -0.49).is_ok());
        assert!(ModelParams::new(6, 12.5).is_ok());
    }

    #[test]
    fn rejects_low_dimension() {
        assert!(ModelParams::new(2, 0.0).is_err());
        assert!(ModelParams::new(0, 1.0).is_err());
    }

    #[test]
    fn rejects_alpha_at_and_below_boundary() {
        assert!(ModelParams::new(3, -0.5).is_err());
        assert!(ModelParams::new(3, -0.6).is_err());
        assert!(ModelParams::new(3, f64::NAN).is_err());
        assert!(ModelParams::new(3, f64::INFINITY).is_err());
    }
}
