//! Solving the weighted Dirichlet problem for zonal boundary data, two ways.
//!
//! Data depending only on the polar cosine admit two independent solution
//! routes:
//!
//! 1. **Direct quadrature**: `u(x) = integral K(|x|, t) f(t) dsigma` along
//!    the axis, with panels adapted to the kernel and to the data's own
//!    breakpoints.
//! 2. **Eigenfunction series**: expand `f` in normalized Gegenbauer
//!    harmonics `Y_k`, then propagate each mode inward with the radial
//!    multiplier `Phi_k(rho^2) / Phi_k(1) * rho^k`, where `Phi_k` is the
//!    crate's Gauss-hypergeometric radial profile.
//!
//! Keeping both routes lets every solve be cross-checked; the module also
//! builds the data families that achieve (or approach) the sharp bounds:
//! the Hoelder-equality datum for finite conjugate exponents and the
//! antisymmetric shrinking-cap family for `p = 1`.

use std::sync::Arc;

use crate::extremal::{a_star, conjugate_exponent};
use crate::kernel::kernel_zonal;
use crate::oracle::grid_sup;
use crate::quadrature::{
    kernel_rule, singular_locus, surface_weight_norm, zonal_rule, QuadratureRule, DEFAULT_ORDER,
};
use crate::specfun::{gegenbauer, gegenbauer_one, log_gamma, phi_k_alpha};
use crate::{Error, ModelParams, Result};

/// Degree beyond which a projection is flagged as high-degree (the
/// coefficient integrals need ever finer quadrature as the harmonics
/// oscillate).
pub const HIGH_DEGREE: usize = 60;

/// Eigenvalue-denominator threshold for the degeneracy detector in the
/// series route.
const DEGENERACY_TOL: f64 = 1e-12;

/// Boundary data on the sphere depending only on the polar cosine.
#[derive(Clone)]
pub struct ZonalData {
    profile: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    breakpoints: Vec<f64>,
    /// Exact norms known by construction, as `(p, value)` pairs.
    norm_hints: Vec<(f64, f64)>,
}

impl std::fmt::Debug for ZonalData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ZonalData")
            .field("breakpoints", &self.breakpoints)
            .field("norm_hints", &self.norm_hints)
            .finish_non_exhaustive()
    }
}

impl ZonalData {
    pub fn new(profile: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            profile: Arc::new(profile),
            breakpoints: Vec::new(),
            norm_hints: Vec::new(),
        }
    }

    /// Marks discontinuities or kinks of the profile so quadrature panels
    /// break there.
    pub fn with_breakpoints(mut self, pts: &[f64]) -> Self {
        self.breakpoints.extend_from_slice(pts);
        self
    }

    /// Records a norm known exactly by construction; `lp_norm` returns it
    /// verbatim instead of integrating.
    pub fn with_norm_hint(mut self, p: f64, value: f64) -> Self {
        self.norm_hints.push((p, value));
        self
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.profile)(t)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    fn hinted_norm(&self, p: f64) -> Option<f64> {
        self.norm_hints
            .iter()
            .find(|(hp, _)| *hp == p)
            .map(|(_, v)| *v)
    }
}

/// `L^p` norm of zonal data against the normalized surface measure;
/// `p = infinity` is a sup over a fine grid refined at breakpoints.
pub fn lp_norm(params: &ModelParams, data: &ZonalData, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("norm exponent {p} below 1")));
    }
    if let Some(v) = data.hinted_norm(p) {
        return Ok(v);
    }
    if p.is_infinite() {
        let mut sup = grid_sup(&|t| data.eval(t).abs(), -1.0, 1.0, 4001);
        for &b in data.breakpoints() {
            let lo = (b - 1e-3).max(-1.0);
            let hi = (b + 1e-3).min(1.0);
            sup = sup.max(grid_sup(&|t| data.eval(t).abs(), lo, hi, 101));
        }
        return Ok(sup);
    }
    let mut breaks = vec![-1.0, 1.0];
    breaks.extend_from_slice(data.breakpoints());
    let rule = zonal_rule(params, DEFAULT_ORDER, &breaks);
    let val = rule.integrate(|t| data.eval(t).abs().powf(p));
    Ok(val.powf(1.0 / p))
}

/// Mean of the data against the normalized surface measure.
pub fn mean(params: &ModelParams, data: &ZonalData) -> f64 {
    let mut breaks = vec![-1.0, 1.0];
    breaks.extend_from_slice(data.breakpoints());
    zonal_rule(params, DEFAULT_ORDER, &breaks).integrate(|t| data.eval(t))
}

/// Solution value on the axis, `u(r e_n)`, by direct kernel quadrature.
pub fn solve_axis(params: &ModelParams, data: &ZonalData, r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("radius {r} outside [0, 1)")));
    }
    let rule = kernel_rule(params, r, DEFAULT_ORDER, data.breakpoints());
    Ok(rule.integrate(|t| {
        kernel_zonal(params, r, t).expect("nodes stay in [-1, 1]") * data.eval(t)
    }))
}

/// Expansion of zonal data in normalized Gegenbauer harmonics.
#[derive(Debug, Clone)]
pub struct ZonalExpansion {
    /// Coefficient of `Y_k(t) = C_k(t) / C_k(1)` for `k = 0..=degree`.
    pub coeffs: Vec<f64>,
    /// Sup-norm distance between the data and the truncated expansion on a
    /// uniform grid (absolute).
    pub reconstruction_error: f64,
    /// Set when the requested degree exceeds [`HIGH_DEGREE`].
    pub high_degree: bool,
}

/// Squared norm `<Y_k, Y_k>` of the normalized harmonic against the
/// normalized surface measure, via the Gegenbauer orthogonality constant
/// `h_k = pi 2^(1-2 lambda) Gamma(k+2 lambda) / [(k+lambda) k! Gamma(lambda)^2]`.
fn harmonic_norm_sq(params: &ModelParams, k: usize) -> f64 {
    let lambda = (params.nf() - 2.0) / 2.0;
    let kf = k as f64;
    let ln_h = std::f64::consts::PI.ln()
        + (1.0 - 2.0 * lambda) * std::f64::consts::LN_2
        + log_gamma(kf + 2.0 * lambda).unwrap()
        - (kf + lambda).ln()
        - log_gamma(kf + 1.0).unwrap()
        - 2.0 * log_gamma(lambda).unwrap();
    let c_at_one = gegenbauer_one(k, lambda);
    surface_weight_norm(params) * ln_h.exp() / (c_at_one * c_at_one)
}

/// Normalized zonal harmonic `Y_k(t)`, value 1 at `t = 1`.
pub fn zonal_harmonic(params: &ModelParams, k: usize, t: f64) -> f64 {
    let lambda = (params.nf() - 2.0) / 2.0;
    gegenbauer(k, lambda, t) / gegenbauer_one(k, lambda)
}

/// Projects zonal data onto harmonics of degree at most `max_degree`.
pub fn project_zonal(
    params: &ModelParams,
    data: &ZonalData,
    max_degree: usize,
) -> Result<ZonalExpansion> {
    let mut breaks = vec![-1.0, 1.0];
    breaks.extend_from_slice(data.breakpoints());
    let rule = zonal_rule(params, DEFAULT_ORDER, &breaks);
    let coeffs: Vec<f64> = (0..=max_degree)
        .map(|k| {
            let inner = rule.integrate(|t| data.eval(t) * zonal_harmonic(params, k, t));
            inner / harmonic_norm_sq(params, k)
        })
        .collect();

    let reconstruction_error = grid_sup(
        &|t| {
            let rebuilt: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * zonal_harmonic(params, k, t))
                .sum();
            (rebuilt - data.eval(t)).abs()
        },
        -1.0,
        1.0,
        801,
    );
    Ok(ZonalExpansion {
        coeffs,
        reconstruction_error,
        high_degree: max_degree > HIGH_DEGREE,
    })
}

/// Radial multiplier of mode `k` at radius `rho`:
/// `Phi_k(rho^2) / Phi_k(1) * rho^k`, with a degeneracy guard on the
/// boundary denominator.
pub fn mode_multiplier(params: &ModelParams, k: usize, rho: f64) -> Result<f64> {
    let at_one = phi_k_alpha(params, k, 1.0)?;
    if at_one.abs() < DEGENERACY_TOL {
        return Err(Error::DegenerateEigenvalue(format!(
            "mode {k}: boundary profile value {at_one:e} vanishes; the series \
             solution cannot match this mode's boundary data"
        )));
    }
    Ok(phi_k_alpha(params, k, rho * rho)? / at_one * rho.powi(k as i32))
}

/// Series solution at radius `rho` and polar cosine `s`.
pub fn solve_series(
    params: &ModelParams,
    expansion: &ZonalExpansion,
    rho: f64,
    s: f64,
) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::Domain(format!("radius {rho} outside [0, 1)")));
    }
    if !(-1.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!("polar cosine {s} outside [-1, 1]")));
    }
    let mut total = 0.0;
    for (k, c) in expansion.coeffs.iter().enumerate() {
        if *c == 0.0 {
            continue;
        }
        total += c * mode_multiplier(params, k, rho)? * zonal_harmonic(params, k, s);
    }
    Ok(total)
}

/// Series solution at a general interior point (radius and polar cosine are
/// read off the coordinates; the data's axis is `e_n`).
pub fn solution_at(params: &ModelParams, expansion: &ZonalExpansion, x: &[f64]) -> Result<f64> {
    if x.len() != params.n() {
        return Err(Error::Domain(format!(
            "point dimension {} does not match n = {}",
            x.len(),
            params.n()
        )));
    }
    let rho = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if rho == 0.0 {
        // Only the constant mode survives at the center (0^0 = 1 in the
        // radial factor); the polar cosine is immaterial.
        return solve_series(params, expansion, 0.0, 1.0);
    }
    let s = (x[params.n() - 1] / rho).clamp(-1.0, 1.0);
    solve_series(params, expansion, rho, s)
}

/// Quadrature and closed-form values of the mode-`k` axis solution: boundary
/// datum `Y_k` solved at `r e_n` by direct integration, next to the radial
/// multiplier it must equal.
pub fn eigen_check(params: &ModelParams, k: usize, r: f64) -> Result<(f64, f64)> {
    let p = params.clone();
    let data = ZonalData::new(move |t| zonal_harmonic(&p, k, t));
    let by_quadrature = solve_axis(params, &data, r)?;
    let closed = mode_multiplier(params, k, r)?;
    Ok((by_quadrature, closed))
}

/// `L^p` mean of the solution over the shell of radius `r`, from its series
/// expansion; `p = infinity` is a sup over the polar cosine.
pub fn radial_mean(
    params: &ModelParams,
    expansion: &ZonalExpansion,
    r: f64,
    p: f64,
) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("norm exponent {p} below 1")));
    }
    if p.is_infinite() {
        return Ok(grid_sup(
            &|s| solve_series(params, expansion, r, s).expect("validated arguments").abs(),
            -1.0,
            1.0,
            2001,
        ));
    }
    let rule = zonal_rule(params, DEFAULT_ORDER, &[-1.0, 1.0]);
    let val = rule.integrate(|s| {
        solve_series(params, expansion, r, s)
            .expect("validated arguments")
            .abs()
            .powf(p)
    });
    Ok(val.powf(1.0 / p))
}

/// The Hoelder-equality datum at radius `r` for data exponent `p`: the
/// shifted kernel's signed power, normalized to unit `L^p` norm.
///
/// Its solve recovers the sharp bound exactly: the datum has zero mean by
/// the optimality of the shift, and its pairing with the shifted kernel is
/// the equality case in Hoelder's inequality, so `u(r e_n) = G_p(r)`.
/// Finite `p > 1` only (`p = 1` has no extremizer in `L^1`; see the cap
/// family instead).
pub fn sign_datum(params: &ModelParams, r: f64, p: f64) -> Result<ZonalData> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("radius {r} outside [0, 1)")));
    }
    if r == 0.0 {
        return Err(Error::Domain(
            "no extremal datum at the center: every bound value is 0 there".into(),
        ));
    }
    let q = conjugate_exponent(p)?;
    if p == 1.0 {
        return Err(Error::Domain(
            "p = 1 has no L^1 extremizer; use the cap family".into(),
        ));
    }

    let pp = params.clone();
    if p.is_infinite() {
        // q = 1: bang-bang datum, the sign of the kernel minus its median.
        let shift = kernel_zonal(params, r, 0.0)?;
        let profile = move |t: f64| (kernel_zonal(&pp, r, t).unwrap() - shift).signum();
        return Ok(ZonalData::new(profile)
            .with_breakpoints(&[0.0])
            .with_norm_hint(f64::INFINITY, 1.0));
    }

    let shift = a_star(params, r, q)?;
    let g = crate::extremal::phi_q(params, r, shift, q)?;
    let ln_g = g.ln();
    let profile = move |t: f64| {
        let psi = kernel_zonal(&pp, r, t).unwrap() - shift;
        if psi == 0.0 {
            0.0
        } else {
            // sign(psi) |psi / G|^(q-1), stable in log space for large q.
            psi.signum() * ((q - 1.0) * (psi.abs().ln() - ln_g)).exp()
        }
    };
    let mut data = ZonalData::new(profile).with_norm_hint(p, 1.0);
    if let Some(t0) = singular_locus(params, r, shift).crossing() {
        // The fractional power has a cusp at the crossing; flank it with
        // micro-panels so plain panels never straddle it.
        data = data.with_breakpoints(&[t0 - 1e-3, t0, t0 + 1e-3]);
    }
    Ok(data)
}

/// Normalized measure of the polar cap `{t >= c}`.
pub fn cap_measure(params: &ModelParams, c: f64) -> f64 {
    zonal_rule(params, DEFAULT_ORDER, &[-1.0, c, 1.0]).integrate(|t| if t >= c { 1.0 } else { 0.0 })
}

/// Antisymmetric cap pair at stage `i`: height `1/(2 sigma)` on the cap
/// `{t >= c_i}`, `-1/(2 sigma)` on its mirror, zero between, with
/// `c_i = 1 - 1/(2 i^2)` and `sigma` the cap measure. The `L^1` norm is 1 by
/// construction and the mean is 0 by antisymmetry; as `i` grows the solves
/// approach the `p = 1` bound, which no single `L^1` datum attains.
pub fn cap_datum(params: &ModelParams, i: usize) -> Result<ZonalData> {
    if i == 0 {
        return Err(Error::Domain("cap stage must be at least 1".into()));
    }
    let c = 1.0 - 1.0 / (2.0 * (i as f64) * (i as f64));
    let sigma = cap_measure(params, c);
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!(
            "cap at c = {c} has vanishing measure"
        )));
    }
    let height = 1.0 / (2.0 * sigma);
    let profile = move |t: f64| {
        if t >= c {
            height
        } else if t <= -c {
            -height
        } else {
            0.0
        }
    };
    Ok(ZonalData::new(profile)
        .with_breakpoints(&[-c, c])
        .with_norm_hint(1.0, 1.0))
}

/// Verdict of one sharpness trial: the solve at a radius, the bound it must
/// respect (`G_p(r) ||f||_p`), and the margin `bound - |u|` (nonnegative
/// when the bound holds).
#[derive(Debug, Clone, Copy)]
pub struct BoundTrial {
    pub r: f64,
    pub solution: f64,
    pub bound: f64,
    pub margin: f64,
}

/// Checks the sharp bound on given zero-mean data at one radius: solves by
/// direct quadrature, evaluates `G_p(r) ||f||_p`, and reports the margin.
pub fn bound_trial(params: &ModelParams, data: &ZonalData, r: f64, p: f64) -> Result<BoundTrial> {
    let norm = lp_norm(params, data, p)?;
    let solution = solve_axis(params, data, r)?;
    let bound = crate::extremal::g_p(params, r, p)?.g_value * norm;
    Ok(BoundTrial {
        r,
        solution,
        bound,
        margin: bound - solution.abs(),
    })
}

/// Plain composite rule over the data's breakpoints, exposed for tests and
/// the verification battery.
pub fn data_rule(params: &ModelParams, data: &ZonalData, order: usize) -> QuadratureRule {
    let mut breaks = vec![-1.0, 1.0];
    breaks.extend_from_slice(data.breakpoints());
    zonal_rule(params, order, &breaks)
}
