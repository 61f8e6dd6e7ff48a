//! Surface integration of zonal functions, reduced to one-dimensional
//! weighted quadrature.
//!
//! For a function of the polar cosine alone,
//!
//! ```text
//! integral over S^(n-1) of f(eta_n) dsigma
//!     = N_n * integral_{-1}^{1} f(t) (1 - t^2)^((n-3)/2) dt,
//! N_n = Gamma(n/2) / (sqrt(pi) Gamma((n-1)/2)),
//! ```
//!
//! with `dsigma` the normalized surface measure. Rules here bake the weight
//! and `N_n` into the node weights, so applying a rule to `f` directly yields
//! the normalized surface integral.
//!
//! Composite structure: the interval is split into panels at caller-supplied
//! breakpoints plus (for kernel integrands) a geometric cascade toward `t = 1`
//! that resolves the `(1 - r)^2` length scale of the kernel. Odd dimensions
//! have a polynomial weight, absorbed into the integrand; even dimensions get
//! one-sided Gauss-Jacobi panels at the endpoints for the half-integer
//! exponent. Integrals of `|kernel - a|` powers additionally split at the
//! level crossing and, for exponents `q` in (1, 2), change variables
//! `t = t0 +/- s^(1/(q-1))` next to it so the fractional power becomes smooth.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::kernel::ZonalKernel;
use crate::specfun::{c_n_alpha, log_gamma};
use crate::{Error, ModelParams, Result};

/// Nodes per panel used by the crate's own integrals.
pub const DEFAULT_ORDER: usize = 96;

/// Tolerance for treating two breakpoints as the same panel edge.
const BREAK_DEDUP: f64 = 1e-13;

/// Half-width of the substitution panels around a level crossing.
const CROSSING_HALF_WIDTH: f64 = 1e-3;

/// A composite quadrature rule for normalized zonal surface integrals.
///
/// Invariants: nodes ascend strictly inside (-1, 1), weights are positive,
/// and the weights of a freshly built rule sum to 1 within 1e-12 (the
/// normalized measure of the whole sphere).
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    order: usize,
    split_points: Vec<f64>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes per panel the rule was built with.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Interior panel boundaries (excludes -1 and 1).
    pub fn split_points(&self) -> &[f64] {
        &self.split_points
    }

    /// Applies the rule: `sum w_i f(t_i)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(t, w)| w * f(*t))
            .sum()
    }
}

/// Normalized surface integral of a zonal function using a prepared rule.
pub fn zonal_integral<F: Fn(f64) -> f64>(f: F, rule: &QuadratureRule) -> f64 {
    rule.integrate(f)
}

/// Location of the kernel level crossing `kernel_zonal(r, .) = a`.
///
/// The zonal kernel is strictly increasing in `t`, so there is at most one
/// crossing coordinate `t0`. `lambda1` records it when it lies in `[0, 1]`;
/// `lambda2` records the mirrored value `-t0` when the crossing lies in
/// `[-1, 0)`. Both are absent when the level misses the kernel's range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularLocus {
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
}

impl SingularLocus {
    pub fn absent() -> Self {
        Self {
            lambda1: None,
            lambda2: None,
        }
    }

    /// The crossing coordinate `t0` in `[-1, 1]`, whichever field holds it.
    pub fn crossing(&self) -> Option<f64> {
        self.lambda1.or(self.lambda2.map(|l| -l))
    }
}

/// Solves `kernel_zonal(r, t0) = a` for the crossing coordinate.
///
/// Inverting the kernel profile gives
/// `t0 = [(1 + r^2) - (C (1-r^2)^(1+2 alpha) / a)^(2/(n+2 alpha))] / (2r)`,
/// clamped to absent when it leaves `[-1, 1]` (level outside the kernel's
/// range) or when the level `a` is not positive.
pub fn singular_locus(params: &ModelParams, r: f64, a: f64) -> SingularLocus {
    if !(r > 0.0 && r < 1.0) || !(a > 0.0) || !a.is_finite() {
        return SingularLocus::absent();
    }
    let alpha = params.alpha();
    let ln_level = c_n_alpha(params).ln() + (1.0 + 2.0 * alpha) * (1.0 - r * r).ln() - a.ln();
    let d2 = (2.0 / (params.nf() + 2.0 * alpha) * ln_level).exp();
    let t0 = ((1.0 + r * r) - d2) / (2.0 * r);
    if !(-1.0..=1.0).contains(&t0) {
        return SingularLocus::absent();
    }
    if t0 >= 0.0 {
        SingularLocus {
            lambda1: Some(t0),
            lambda2: None,
        }
    } else {
        SingularLocus {
            lambda1: None,
            lambda2: Some(-t0),
        }
    }
}

/// Builds a composite rule with panels at the crossing locations.
///
/// `order >= 8` nodes per panel. The rule integrates the zonal surface
/// measure exactly on each panel; accuracy for a given integrand comes from
/// the panel layout.
pub fn build_rule(params: &ModelParams, order: usize, splits: &SingularLocus) -> QuadratureRule {
    let mut breaks = vec![-1.0, 1.0];
    if let Some(t0) = splits.crossing() {
        breaks.push(t0);
    }
    zonal_rule(params, order, &breaks)
}

/// Builds a composite rule from explicit breakpoints (deduplicated, clamped
/// to [-1, 1]; the endpoints are always included).
pub(crate) fn zonal_rule(params: &ModelParams, order: usize, breaks: &[f64]) -> QuadratureRule {
    assert!(order >= 8, "panel order {order} below minimum 8");
    let edges = refine_endpoint_cascade(clean_breakpoints(breaks), params.n() % 2 == 1);
    let beta = (params.nf() - 3.0) / 2.0;
    let norm = surface_weight_norm(params);

    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for win in edges.windows(2) {
        let (lo, hi) = (win[0], win[1]);
        push_panel(params, lo, hi, order, beta, norm, &mut nodes, &mut weights);
    }
    let rule = QuadratureRule {
        nodes,
        weights,
        order,
        split_points: edges[1..edges.len() - 1].to_vec(),
    };
    debug_assert!(rule.weights.iter().all(|w| *w > 0.0));
    rule
}

/// `N_n`: ratio of the sphere's surface measure to the weighted t-integral.
pub(crate) fn surface_weight_norm(params: &ModelParams) -> f64 {
    let h = params.nf() / 2.0;
    (log_gamma(h).unwrap() - log_gamma(h - 0.5).unwrap()).exp() / std::f64::consts::PI.sqrt()
}

fn clean_breakpoints(breaks: &[f64]) -> Vec<f64> {
    let mut edges: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|b| b.is_finite())
        .map(|b| b.clamp(-1.0, 1.0))
        .collect();
    edges.push(-1.0);
    edges.push(1.0);
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup_by(|a, b| (*a - *b).abs() <= BREAK_DEDUP);
    // dedup_by removes the later element; make sure the exact endpoints
    // survive rather than a neighbor within tolerance.
    *edges.first_mut().unwrap() = -1.0;
    *edges.last_mut().unwrap() = 1.0;
    edges
}

/// Splits panels so none is much longer than its distance to an endpoint
/// whose weight factor it folds pointwise.
///
/// In even dimension the surface weight has half-integer exponents at both
/// endpoints. A panel touching an endpoint absorbs that endpoint's factor
/// exactly through a Jacobi rule, but the factor from the opposite endpoint
/// is folded into the integrand, and that fold converges geometrically with
/// rate set by (distance to the endpoint) / (panel length). Splitting at
/// distance-to-endpoint from the near edge yields a doubling cascade that
/// keeps the ratio at least 1/1.5 everywhere. Odd dimensions fold a
/// polynomial exactly and need no refinement.
fn refine_endpoint_cascade(mut edges: Vec<f64>, odd_dim: bool) -> Vec<f64> {
    if odd_dim || edges.len() < 3 {
        // Full-span rules are pure symmetric Jacobi; nothing to refine.
        return edges;
    }
    let mut guard = 0;
    let mut i = 0;
    while i + 1 < edges.len() && guard < 400 {
        let lo = edges[i];
        let hi = edges[i + 1];
        let len = hi - lo;
        let mut split_at = None;
        if lo > -1.0 {
            let d = 1.0 + lo;
            if len > 1.5 * d {
                split_at = Some(lo + d);
            }
        }
        if split_at.is_none() && hi < 1.0 {
            let d = 1.0 - hi;
            if len > 1.5 * d {
                split_at = Some(hi - d);
            }
        }
        match split_at {
            Some(p) => {
                edges.insert(i + 1, p);
                guard += 1;
            }
            None => i += 1,
        }
    }
    edges
}

/// Appends one panel's nodes and weights, handling the boundary weight.
///
/// Interior panels (and every panel in odd dimension, where the weight is a
/// polynomial) use Gauss-Legendre with the weight folded into the node
/// weights. Panels touching an endpoint in even dimension use a one-sided
/// Gauss-Jacobi rule for the half-integer exponent.
#[allow(clippy::too_many_arguments)]
fn push_panel(
    params: &ModelParams,
    lo: f64,
    hi: f64,
    order: usize,
    beta: f64,
    norm: f64,
    nodes: &mut Vec<f64>,
    weights: &mut Vec<f64>,
) {
    let n = params.n();
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let odd_dim = n % 2 == 1;
    let m = beta.round() as i32;

    if odd_dim || (lo > -1.0 && hi < 1.0) {
        let gl = gauss_nodes(order, 0.0, 0.0);
        for (x, w) in gl.0.iter().zip(&gl.1) {
            let t = mid + half * x;
            let wt = if odd_dim {
                // Polynomial weight: exact fold.
                (1.0 - t * t).powi(m)
            } else {
                (1.0 - t * t).powf(beta)
            };
            nodes.push(t);
            weights.push(norm * half * w * wt);
        }
    } else if lo == -1.0 && hi == 1.0 {
        // Full-interval panel: the half-integer weight is live at both
        // endpoints, which is exactly the symmetric Jacobi rule.
        let gj = gauss_nodes(order, beta, beta);
        for (x, w) in gj.0.iter().zip(&gj.1) {
            nodes.push(*x);
            weights.push(norm * w);
        }
    } else if hi == 1.0 {
        // Weight (1-t)^beta is singular-derivative at the right endpoint:
        // Jacobi rule with exponents (beta, 0) after the affine map,
        // (1 - t) = half * (1 - x).
        let gj = gauss_nodes(order, beta, 0.0);
        let scale = norm * half.powf(beta + 1.0);
        for (x, w) in gj.0.iter().zip(&gj.1) {
            let t = mid + half * x;
            nodes.push(t);
            weights.push(scale * w * (1.0 + t).powf(beta));
        }
    } else {
        // lo == -1.0: mirrored case, Jacobi exponents (0, beta).
        let gj = gauss_nodes(order, 0.0, beta);
        let scale = norm * half.powf(beta + 1.0);
        for (x, w) in gj.0.iter().zip(&gj.1) {
            let t = mid + half * x;
            nodes.push(t);
            weights.push(scale * w * (1.0 - t).powf(beta));
        }
    }
}

type NodeSet = Arc<(Vec<f64>, Vec<f64>)>;

/// Gauss-Jacobi nodes and weights on [-1, 1] for weight
/// `(1-x)^a (1+x)^b`, cached per (order, a, b); `a = b = 0` is
/// Gauss-Legendre. Nodes ascend.
pub(crate) fn gauss_nodes(order: usize, a: f64, b: f64) -> NodeSet {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64, u64), NodeSet>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (order, a.to_bits(), b.to_bits());
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return hit.clone();
    }
    let fresh: NodeSet = Arc::new(jacobi_rule(order, a, b));
    cache.lock().unwrap().insert(key, fresh.clone());
    fresh
}

/// Computes a Gauss-Jacobi rule by Newton iteration on the three-term
/// recurrence, largest root first, with the classic starting guesses.
fn jacobi_rule(n: usize, alf: f64, bet: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let nf = n as f64;
    let mut x = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    let mut z = 0.0f64;

    for i in 0..n {
        match i {
            0 => {
                let an = alf / nf;
                let bn = bet / nf;
                let r1 = (1.0 + alf) * (2.78 / (4.0 + nf * nf) + 0.768 * an / nf);
                let r2 = 1.0 + 1.48 * an + 0.96 * bn + 0.452 * an * an + 0.83 * an * bn;
                z = 1.0 - r1 / r2;
            }
            1 => {
                let r1 = (4.1 + alf) / ((1.0 + alf) * (1.0 + 0.156 * alf));
                let r2 = 1.0 + 0.06 * (nf - 8.0) * (1.0 + 0.12 * alf) / nf;
                let r3 = 1.0 + 0.012 * bet * (1.0 + 0.25 * alf.abs()) / nf;
                z -= (1.0 - z) * r1 * r2 * r3;
            }
            2 => {
                let r1 = (1.67 + 0.28 * alf) / (1.0 + 0.37 * alf);
                let r2 = 1.0 + 0.22 * (nf - 8.0) / nf;
                let r3 = 1.0 + 8.0 * bet / ((6.28 + bet) * nf * nf);
                z -= (x[0] - z) * r1 * r2 * r3;
            }
            _ if i == n - 2 => {
                let r1 = (1.0 + 0.235 * bet) / (0.766 + 0.119 * bet);
                let r2 = 1.0 / (1.0 + 0.639 * (nf - 4.0) / (1.0 + 0.71 * (nf - 4.0)));
                let r3 = 1.0 / (1.0 + 20.0 * alf / ((7.5 + alf) * nf * nf));
                z += (z - x[i - 2]) * r1 * r2 * r3;
            }
            _ if i == n - 1 => {
                let r1 = (1.0 + 0.37 * bet) / (1.67 + 0.28 * bet);
                let r2 = 1.0 / (1.0 + 0.22 * (nf - 8.0) / nf);
                let r3 = 1.0 / (1.0 + 8.0 * alf / ((6.28 + alf) * nf * nf));
                z += (z - x[i - 2]) * r1 * r2 * r3;
            }
            _ => {
                z = 3.0 * x[i - 1] - 3.0 * x[i - 2] + x[i - 3];
            }
        }

        let alfbet = alf + bet;
        // Degree-n polynomial value, previous value, and derivative at z via
        // the three-term recurrence.
        let eval = |z: f64| {
            let mut temp = 2.0 + alfbet;
            let mut p1 = (alf - bet + temp * z) / 2.0;
            let mut p2 = 1.0;
            for j in 2..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                temp = 2.0 * jf + alfbet;
                let a1 = 2.0 * jf * (jf + alfbet) * (temp - 2.0);
                let b1 = (temp - 1.0) * (alf * alf - bet * bet + temp * (temp - 2.0) * z);
                let c1 = 2.0 * (jf - 1.0 + alf) * (jf - 1.0 + bet) * temp;
                p1 = (b1 * p2 - c1 * p3) / a1;
            }
            let pp = (nf * (alf - bet - temp * z) * p1 + 2.0 * (nf + alf) * (nf + bet) * p2)
                / (temp * (1.0 - z * z));
            (p1, p2, pp)
        };
        let mut converged = false;
        for _ in 0..60 {
            let (p1, _, pp) = eval(z);
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        assert!(converged, "Jacobi node {i} of {n} (a={alf}, b={bet}) did not converge");
        x[i] = z;
        // Weight from recurrence values at the accepted root, not the last
        // Newton iterate.
        let (_, p2, pp) = eval(z);
        let lg = log_gamma(alf + nf).unwrap() + log_gamma(bet + nf).unwrap()
            - log_gamma(nf + 1.0).unwrap()
            - log_gamma(nf + alfbet + 1.0).unwrap();
        w[i] = lg.exp() * (2.0 * nf + alfbet) * 2.0f64.powf(alfbet) / (pp * p2);
    }

    // The gamma-ratio prefactor is shared by every weight and is the least
    // accurate piece at large order; rescale so the weights sum to the exact
    // total mass 2^(a+b+1) B(a+1, b+1), which only needs small gamma
    // arguments.
    let ln_mass = (alf + bet + 1.0) * std::f64::consts::LN_2
        + log_gamma(alf + 1.0).unwrap()
        + log_gamma(bet + 1.0).unwrap()
        - log_gamma(alf + bet + 2.0).unwrap();
    let correction = ln_mass.exp() / w.iter().sum::<f64>();
    w.iter_mut().for_each(|wi| *wi *= correction);

    // Largest-first construction; flip to ascending and sanity-check.
    x.reverse();
    w.reverse();
    for i in 0..n {
        assert!(
            x[i].is_finite() && x[i] > -1.0 && x[i] < 1.0 && w[i] > 0.0,
            "bad Jacobi node/weight at {i}: x={}, w={}",
            x[i],
            w[i]
        );
        if i > 0 {
            assert!(x[i] > x[i - 1], "Jacobi nodes out of order at {i}");
        }
    }
    (x, w)
}

/// Breakpoints adapted to the zonal kernel at radius `r`: a panel edge at 0
/// plus a geometric cascade toward `t = 1` that resolves the kernel's
/// `(1 - r)^2` variation scale.
pub(crate) fn kernel_breakpoints(r: f64, extra: &[f64]) -> Vec<f64> {
    let mut breaks = vec![-1.0, 0.0, 1.0];
    breaks.extend_from_slice(extra);
    if r > 0.0 {
        let scale = ((1.0 - r) * (1.0 - r) / (2.0 * r)).min(0.5);
        let mut width = 0.5f64;
        let mut guard = 0;
        while width > scale && guard < 60 {
            width *= 0.5;
            breaks.push(1.0 - width);
            guard += 1;
        }
    }
    breaks
}

/// Composite rule tuned for integrands containing the kernel at radius `r`,
/// with optional extra panel edges (data breakpoints, crossing points).
pub(crate) fn kernel_rule(
    params: &ModelParams,
    r: f64,
    order: usize,
    extra: &[f64],
) -> QuadratureRule {
    zonal_rule(params, order, &kernel_breakpoints(r, extra))
}

/// Normalized surface integral of level-power integrands built from the
/// zonal kernel `K` at radius `r`:
///
/// * `signed = false`: integrand `|(K(t) - a) / scale|^q`,
/// * `signed = true`: integrand `sign(K(t) - a) * |(K(t) - a) / scale|^(q-1)`.
///
/// `scale` guards against overflow at large exponents: placing it at the
/// kernel's maximum keeps the base at most 1, so arbitrary powers stay
/// finite (callers multiply the appropriate power of `scale` back in).
/// Panels split at the level crossing; for `q` in (1, 2) the two panels
/// flanking it are evaluated under `t = t0 +/- s^(1/(q-1))`, which maps the
/// fractional-power factor to a smooth one.
pub(crate) fn power_level_integral(
    params: &ModelParams,
    r: f64,
    a: f64,
    q: f64,
    signed: bool,
    scale: f64,
    order: usize,
) -> f64 {
    debug_assert!(scale > 0.0);
    let kernel = ZonalKernel::new(params, r);
    let power = if signed { q - 1.0 } else { q };
    let integrand = move |t: f64| {
        let psi = (kernel.eval(t) - a) / scale;
        if signed {
            psi.signum() * psi.abs().powf(power)
        } else {
            psi.abs().powf(power)
        }
    };

    let crossing = singular_locus(params, r, a).crossing();
    let needs_substitution = crossing.is_some() && q > 1.0 && q < 2.0;

    let mut extra = Vec::new();
    if let Some(t0) = crossing {
        extra.push(t0);
        if needs_substitution {
            extra.push(t0 - CROSSING_HALF_WIDTH);
            extra.push(t0 + CROSSING_HALF_WIDTH);
        }
    }
    let edges = refine_endpoint_cascade(
        clean_breakpoints(&kernel_breakpoints(r, &extra)),
        params.n() % 2 == 1,
    );

    // The crossing's exact representative after dedup.
    let t0_snap = crossing.map(|t0| {
        *edges
            .iter()
            .min_by(|a, b| (**a - t0).abs().partial_cmp(&(**b - t0).abs()).unwrap())
            .unwrap()
    });

    let beta = (params.nf() - 3.0) / 2.0;
    let norm = surface_weight_norm(params);
    let odd_dim = params.n() % 2 == 1;
    let m_poly = beta.round() as i32;
    let weight = |t: f64| {
        if odd_dim {
            (1.0 - t * t).powi(m_poly)
        } else {
            (1.0 - t * t).powf(beta)
        }
    };

    let mut total = 0.0;
    for win in edges.windows(2) {
        let (lo, hi) = (win[0], win[1]);
        let sub = match (needs_substitution, t0_snap) {
            (true, Some(t0)) if hi == t0 => Some((t0, -1.0)),
            (true, Some(t0)) if lo == t0 => Some((t0, 1.0)),
            _ => None,
        };
        if let Some((t0, dir)) = sub {
            // t = t0 + dir * s^m on s in [0, (hi-lo)^(1/m)]; weight folded in.
            let m = 1.0 / (q - 1.0);
            let s_max = (hi - lo).powf(1.0 / m);
            let gl = gauss_nodes(order, 0.0, 0.0);
            let half = 0.5 * s_max;
            for (xs, ws) in gl.0.iter().zip(&gl.1) {
                let s = half + half * xs;
                let t = (t0 + dir * s.powf(m)).clamp(-1.0, 1.0);
                let jac = m * s.powf(m - 1.0);
                total += norm * half * ws * jac * weight(t) * integrand(t);
            }
        } else {
            let mut nodes = Vec::with_capacity(order);
            let mut weights = Vec::with_capacity(order);
            push_panel(params, lo, hi, order, beta, norm, &mut nodes, &mut weights);
            total += nodes
                .iter()
                .zip(&weights)
                .map(|(t, w)| w * integrand(*t))
                .sum::<f64>();
        }
    }
    total
}

/// Convenience wrapper for the common "integrate `f` against the kernel
/// geometry at radius `r`" pattern.
pub(crate) fn integrate_with_kernel_splits<F: Fn(f64) -> f64>(
    params: &ModelParams,
    r: f64,
    extra: &[f64],
    order: usize,
    f: F,
) -> f64 {
    kernel_rule(params, r, order, extra).integrate(f)
}

/// Quadrature counterpart of the closed-form kernel mass, used by the
/// verification battery: the zonal kernel integrated by a kernel-adapted
/// rule.
pub fn kernel_mass_quadrature(params: &ModelParams, r: f64, order: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("radius {r} outside [0, 1)")));
    }
    let kernel = ZonalKernel::new(params, r);
    Ok(integrate_with_kernel_splits(params, r, &[], order, |t| {
        kernel.eval(t)
    }))
}
