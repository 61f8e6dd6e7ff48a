//! The Poisson-type kernel of the operator, its zonal profile, axis
//! gradient, total mass, and a finite-difference application of the operator
//! itself.
//!
//! The kernel for a ball point `x` and boundary point `zeta` is
//!
//! ```text
//! P(x, zeta) = C * (1 - |x|^2)^(1 + 2 alpha) / |x - zeta|^(n + 2 alpha)
//! ```
//!
//! with `C` the normalization from [`crate::specfun::c_n_alpha`]. Rotating
//! `x` to the north-pole axis turns the kernel into a function of `r = |x|`
//! and the cosine `t` of the polar angle; that zonal profile is what every
//! integral in the crate actually evaluates.

use crate::specfun::{c_n_alpha, hyp2f1};
use crate::{Error, ModelParams, Result};

/// A point of the open unit ball with explicit dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint {
    coords: Vec<f64>,
}

impl BallPoint {
    /// Validates that the coordinates are finite and strictly inside the
    /// ball.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("ball point with non-finite coordinate".into()));
        }
        let point = Self { coords };
        if point.norm() >= 1.0 {
            return Err(Error::Domain(format!(
                "ball point has norm {} >= 1",
                point.norm()
            )));
        }
        Ok(point)
    }

    /// The axis point `r * e_n` in dimension `n`.
    pub fn on_axis(r: f64, n: usize) -> Result<Self> {
        let mut coords = vec![0.0; n];
        coords[n - 1] = r;
        Self::new(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// A point of the unit sphere, renormalized on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    /// Accepts coordinates within 1e-9 of unit length and rescales them to
    /// unit length exactly; anything farther off is a domain error.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain(
                "sphere point with non-finite coordinate".into(),
            ));
        }
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "sphere point has norm {norm}, expected 1"
            )));
        }
        let coords = coords.into_iter().map(|c| c / norm).collect();
        Ok(Self { coords })
    }

    /// The north pole `e_n` in dimension `n`.
    pub fn pole(n: usize) -> Self {
        let mut coords = vec![0.0; n];
        coords[n - 1] = 1.0;
        Self { coords }
    }

    /// A sphere point with prescribed last coordinate `t`, placed in the
    /// plane spanned by `e_1` and `e_n`.
    pub fn with_polar_cosine(t: f64, n: usize) -> Result<Self> {
        if !(-1.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("polar cosine {t} outside [-1, 1]")));
        }
        let mut coords = vec![0.0; n];
        coords[0] = (1.0 - t * t).max(0.0).sqrt();
        coords[n - 1] = t;
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Precomputed zonal kernel profile at fixed radius: fast `t -> P` evaluation
/// for the quadrature loops.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ZonalKernel {
    /// `C * (1 - r^2)^(1 + 2 alpha)`
    scale: f64,
    /// `(n + 2 alpha) / 2`, the exponent on the squared chordal distance.
    half_power: f64,
    r: f64,
}

impl ZonalKernel {
    pub(crate) fn new(params: &ModelParams, r: f64) -> Self {
        debug_assert!((0.0..1.0).contains(&r));
        let a = params.alpha();
        let scale = c_n_alpha(params) * (1.0 - r * r).powf(1.0 + 2.0 * a);
        Self {
            scale,
            half_power: (params.nf() + 2.0 * a) / 2.0,
            r,
        }
    }

    #[inline]
    pub(crate) fn eval(&self, t: f64) -> f64 {
        let d2 = 1.0 + self.r * self.r - 2.0 * self.r * t;
        self.scale * d2.powf(-self.half_power)
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("radius {r} outside [0, 1)")));
    }
    Ok(())
}

/// Kernel value at a ball point and a boundary point.
pub fn poisson_kernel(params: &ModelParams, x: &BallPoint, zeta: &SpherePoint) -> Result<f64> {
    if x.dim() != params.n() || zeta.dim() != params.n() {
        return Err(Error::Domain(format!(
            "dimension mismatch: params n = {}, x dim = {}, zeta dim = {}",
            params.n(),
            x.dim(),
            zeta.dim()
        )));
    }
    let a = params.alpha();
    let d2: f64 = x
        .coords()
        .iter()
        .zip(zeta.coords())
        .map(|(xi, zi)| (xi - zi) * (xi - zi))
        .sum();
    let r2 = x.coords().iter().map(|c| c * c).sum::<f64>();
    Ok(c_n_alpha(params) * (1.0 - r2).powf(1.0 + 2.0 * a)
        * d2.powf(-(params.nf() + 2.0 * a) / 2.0))
}

/// Zonal kernel profile: the kernel at `x = r e_n` against a boundary point
/// with polar cosine `t`, as a function of `(r, t)` alone.
///
/// Strictly increasing in `t` for `r > 0`, with minimum at `t = -1` and
/// maximum at `t = 1`.
pub fn kernel_zonal(params: &ModelParams, r: f64, t: f64) -> Result<f64> {
    check_radius(r)?;
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("polar cosine {t} outside [-1, 1]")));
    }
    Ok(ZonalKernel::new(params, r).eval(t))
}

/// Total kernel mass over the boundary sphere, in closed form:
/// `C * 2F1(-alpha, n/2 - 1 - alpha; n/2; r^2)`.
///
/// Equals `C` at `r = 0` and tends to 1 as `r -> 1`. It is bounded by 1 for
/// `alpha` in `(-1/2, 0] union [n/2 - 1, inf)`; between those ranges the mass
/// may exceed 1 (it starts at `C > 1`).
pub fn kernel_mass(params: &ModelParams, r: f64) -> Result<f64> {
    check_radius(r)?;
    let a = params.alpha();
    let h = params.nf() / 2.0;
    Ok(c_n_alpha(params) * hyp2f1(-a, h - 1.0 - a, h, r * r)?)
}

/// Spatial gradient of `x -> P(x, eta)` evaluated at the axis point
/// `x = r e_n`, returned as an n-vector.
///
/// At `r = 0` this reduces to `C (n + 2 alpha) eta`, the kernel of the
/// gradient-at-origin functional.
pub fn kernel_gradient_axis(params: &ModelParams, r: f64, eta: &SpherePoint) -> Result<Vec<f64>> {
    check_radius(r)?;
    if eta.dim() != params.n() {
        return Err(Error::Domain(format!(
            "dimension mismatch: params n = {}, eta dim = {}",
            params.n(),
            eta.dim()
        )));
    }
    let n = params.n();
    let a = params.alpha();
    let npa = params.nf() + 2.0 * a;
    let c = c_n_alpha(params);
    let one_m_r2 = 1.0 - r * r;

    // diff = eta - r e_n, d2 = |eta - r e_n|^2
    let mut diff: Vec<f64> = eta.coords().to_vec();
    diff[n - 1] -= r;
    let d2: f64 = diff.iter().map(|d| d * d).sum();

    // grad P = C (1-r^2)^(2a) * [ (n+2a)(1-r^2) diff - 2(1+2a) r e_n d2 ]
    //          / d2^((n + 2 + 2a)/2)
    let front = c * one_m_r2.powf(2.0 * a) * d2.powf(-(npa + 2.0) / 2.0);
    let mut grad: Vec<f64> = diff
        .iter()
        .map(|d| front * npa * one_m_r2 * d)
        .collect();
    grad[n - 1] -= front * 2.0 * (1.0 + 2.0 * a) * r * d2;
    Ok(grad)
}

/// Applies the operator to a scalar field by second-order central
/// differences:
///
/// ```text
/// (1 - |x|^2) [ (1 - |x|^2)/4 * lap(u) + alpha <x, grad u> + alpha (n/2 - 1 - alpha) u ]
/// ```
///
/// The stencil needs `|x| + 2h < 1` so every sample stays inside the ball.
/// Truncation error is `O(h^2)` times fourth derivatives of `u`.
pub fn apply_invariant_laplacian<F: Fn(&[f64]) -> f64>(
    params: &ModelParams,
    u: F,
    x: &[f64],
    h: f64,
) -> Result<f64> {
    fd_invariant_laplacian(params, &u, x, h)
}

/// Richardson-extrapolated variant: combines the `h` and `h/2` stencils to
/// cancel the leading `O(h^2)` truncation term.
pub fn apply_invariant_laplacian_refined<F: Fn(&[f64]) -> f64>(
    params: &ModelParams,
    u: F,
    x: &[f64],
    h: f64,
) -> Result<f64> {
    let coarse = fd_invariant_laplacian(params, &u, x, h)?;
    let fine = fd_invariant_laplacian(params, &u, x, h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

fn fd_invariant_laplacian<F: Fn(&[f64]) -> f64>(
    params: &ModelParams,
    u: &F,
    x: &[f64],
    h: f64,
) -> Result<f64> {
    if x.len() != params.n() {
        return Err(Error::Domain(format!(
            "dimension mismatch: params n = {}, x dim = {}",
            params.n(),
            x.len()
        )));
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Domain(format!("step h = {h} must be positive")));
    }
    let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm + 2.0 * h >= 1.0 {
        return Err(Error::Domain(format!(
            "stencil leaves the ball: |x| + 2h = {}",
            norm + 2.0 * h
        )));
    }
    let a = params.alpha();
    let center = u(x);
    let mut lap = 0.0;
    let mut drift = 0.0;
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = u(&probe);
        probe[i] = x[i] - h;
        let um = u(&probe);
        probe[i] = x[i];
        lap += (up - 2.0 * center + um) / (h * h);
        drift += x[i] * (up - um) / (2.0 * h);
    }
    let w = 1.0 - norm * norm;
    Ok(w * (w / 4.0 * lap + a * drift + a * (params.nf() / 2.0 - 1.0 - a) * center))
}
