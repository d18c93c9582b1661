//! Sector-decomposed quadrature of the pair-product ansatz at general
//! exponent v: energy functional, norm, and the density and correlation
//! marginals.
//!
//! With the center of mass factored out the configuration space reduces to
//! the relative coordinates (u, w) = (x2 - x1, x3 - x1) on the unit torus;
//! majority exchange symmetry halves it to the triangle 0 <= u <= w <= 1.
//! The triangle splits into four regions inside which every ring distance
//! is linear in (u, w), so the integrand is analytic per region (the pair
//! factor cos[k(d - 1/2)] stays positive for k <= pi). The kinetic density
//! uses the log-derivative form
//!   T = 2 int_tri Psi^2 (lu^2 + lw^2 + lu lw),
//! and the contact terms reduce to one-dimensional line integrals with the
//! cusp-substituted coefficient 2 v k sin(k/2) cos(k/2)^(2v-1), which stays
//! finite in the Tonks-Girardeau limit.

use crate::jastrow;
use crate::model::{g_from_k, CouplingSet, JastrowParams};
use crate::{CorrelationCurve, DensityGrid, EnergyReport, Error, Method, PairKind, Result};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadRule {
    GaussLegendreComposite,
    Trapezoid,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    /// Base resolution per relative coordinate; at least 16.
    pub points_per_dim: usize,
    pub rule: QuadRule,
    /// Target for the self-reported relative error (resolution doubling).
    pub tol_report: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            points_per_dim: 24,
            rule: QuadRule::GaussLegendreComposite,
            tol_report: 1e-9,
        }
    }
}

impl QuadratureConfig {
    fn validate(&self) -> Result<()> {
        if self.points_per_dim < 16 {
            return Err(Error::Domain(format!(
                "points_per_dim must be at least 16, got {}",
                self.points_per_dim
            )));
        }
        if !(self.tol_report > 0.0) {
            return Err(Error::Domain(format!(
                "tol_report must be positive, got {}",
                self.tol_report
            )));
        }
        Ok(())
    }
}

/// Energy from quadrature with its self-reported relative error
/// |E(n) - E(2n)| / |E(2n)|.
#[derive(Debug, Clone, Copy)]
pub struct QuadEnergy {
    pub report: EnergyReport,
    pub error: f64,
}

/// Frame for the Jacobi-coordinate density: which particle sits at the
/// apex coordinate xi while the other two form the base pair r.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobiFrame {
    /// xi locates one majority atom against the impurity-majority base
    /// pair; breaks xi-reflection symmetry when k != k'.
    MajorityApex,
    /// xi locates the impurity against the majority base pair; exactly
    /// xi-symmetric for every (k, k') since both legs carry k.
    ImpurityApex,
}

/// Unnormalized ansatz value Prod cos^v[k_ij (d_ij - 1/2)] at three ring
/// positions.
pub fn wavefunction_value(x1: f64, x2: f64, x3: f64, params: &JastrowParams) -> f64 {
    let pairs = [
        (x1 - x2, params.k),
        (x1 - x3, params.k),
        (x2 - x3, params.k_prime),
    ];
    let mut psi = 1.0;
    for (sep, kappa) in pairs {
        let base = (kappa * (jastrow::ring_distance(sep) - 0.5)).cos();
        // k <= pi keeps |k(d - 1/2)| <= pi/2, so the base cannot go
        // negative and non-integer v is well defined.
        assert!(base >= -1e-12, "cosine base went negative: {base}");
        psi *= base.max(0.0).powf(params.v);
    }
    psi
}

// ---------------------------------------------------------------------------
// Node and panel machinery.

/// Gauss-Legendre nodes and weights on [0, 1].
fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let step = p0 / dp;
            z -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        let wi = 1.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Nodes and weights of the configured rule on [0, 1].
fn unit_nodes(rule: QuadRule, n: usize) -> (Vec<f64>, Vec<f64>) {
    match rule {
        QuadRule::GaussLegendreComposite => gauss_legendre_unit(n),
        QuadRule::Trapezoid => {
            let h = 1.0 / (n - 1) as f64;
            let x = (0..n).map(|i| i as f64 * h).collect();
            let w = (0..n)
                .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
                .collect();
            (x, w)
        }
    }
}

/// Number of geometric panels packed toward a graded end, ratio 1/4.
const GRADE_PANELS: usize = 9;

/// Partition of [0, 1] into panels; graded ends receive geometrically
/// shrinking panels to resolve contact boundary layers.
fn subdivide(grade_lo: bool, grade_hi: bool) -> Vec<(f64, f64)> {
    fn graded_up(a: f64, b: f64) -> Vec<(f64, f64)> {
        // Panels accumulate toward a: [a + L/4^j], largest last.
        let len = b - a;
        let mut edges = vec![a];
        for j in (0..=GRADE_PANELS).rev() {
            edges.push(a + len * 0.25_f64.powi(j as i32));
        }
        edges.windows(2).map(|e| (e[0], e[1])).collect()
    }
    match (grade_lo, grade_hi) {
        (false, false) => vec![(0.0, 1.0)],
        (true, false) => graded_up(0.0, 1.0),
        (false, true) => {
            let mut v: Vec<(f64, f64)> =
                graded_up(0.0, 1.0).iter().rev().map(|&(a, b)| (1.0 - b, 1.0 - a)).collect();
            v.sort_by(|p, q| p.0.total_cmp(&q.0));
            v
        }
        (true, true) => {
            let mut v = subdivide(true, false)
                .iter()
                .map(|&(a, b)| (0.5 * a, 0.5 * b))
                .collect::<Vec<_>>();
            v.extend(subdivide(false, true).iter().map(|&(a, b)| (0.5 + 0.5 * a, 0.5 + 0.5 * b)));
            v
        }
    }
}

/// Flattened composite rule on [0, 1]: panel partition times per-panel
/// nodes.
fn composite_nodes(rule: QuadRule, n: usize, grade_lo: bool, grade_hi: bool) -> (Vec<f64>, Vec<f64>) {
    let panels = subdivide(grade_lo, grade_hi);
    // Graded meshes converge through the panel count; a moderate per-panel
    // order suffices and keeps the node budget bounded.
    let per = if panels.len() > 1 { (n / 3).max(8) } else { n };
    let (bx, bw) = unit_nodes(rule, per);
    let mut x = Vec::with_capacity(panels.len() * per);
    let mut w = Vec::with_capacity(panels.len() * per);
    for &(a, b) in &panels {
        let len = b - a;
        for (xi, wi) in bx.iter().zip(&bw) {
            x.push(a + len * xi);
            w.push(len * wi);
        }
    }
    (x, w)
}

// ---------------------------------------------------------------------------
// Triangle engine.

/// Per-leg value and log-derivative of cos^v[kappa (d - 1/2)].
#[inline]
fn leg(kappa: f64, v: f64, d: f64) -> (f64, f64) {
    let arg = kappa * (d - 0.5);
    let a = arg.cos().powf(v);
    let l = -v * kappa * arg.tan();
    (a, l)
}

struct TriangleSums {
    /// int_tri Psi^2
    norm: f64,
    /// int_tri Psi^2 (lu^2 + lw^2 + lu lw)
    kinetic: f64,
}

/// Integrate Psi^2 and its kinetic density over the ordered triangle
/// 0 <= u <= w <= 1 (half of the relative torus).
fn triangle_sums(p: &JastrowParams, rule: QuadRule, n: usize, graded: bool) -> TriangleSums {
    // Regions with linear distance formulas; signs are the derivatives
    // d(d_ij)/du resp. d(d_ij)/dw entering the chain rule.
    //   id, u-range, w-bounds, (s12, s13, s23)
    // A: u in [0,1/2], w in [u, 1/2],    d = (u,     w,     w-u)
    // B: u in [0,1/2], w in [1/2, u+1/2], d = (u,     1-w,   w-u)
    // C: u in [0,1/2], w in [u+1/2, 1],  d = (u,     1-w,   1-(w-u))
    // D: u in [1/2,1], w in [u, 1],      d = (1-u,   1-w,   w-u)
    let (ux, uw) = composite_nodes(rule, n, graded, graded);
    let (sx, sw) = composite_nodes(rule, n, graded, graded);
    let (k, kp, v) = (p.k, p.k_prime, p.v);
    let mut norm = 0.0;
    let mut kinetic = 0.0;
    for region in 0..4 {
        let (ua, ub): (f64, f64) = if region == 3 { (0.5, 1.0) } else { (0.0, 0.5) };
        for (ui, uweight) in ux.iter().zip(&uw) {
            let u = ua + (ub - ua) * ui;
            let wu = uweight * (ub - ua);
            let (wa, wb) = match region {
                0 => (u, 0.5),
                1 => (0.5, u + 0.5),
                2 => (u + 0.5, 1.0),
                _ => (u, 1.0),
            };
            if wb - wa <= 0.0 {
                continue;
            }
            for (si, sweight) in sx.iter().zip(&sw) {
                let w = wa + (wb - wa) * si;
                let weight = wu * sweight * (wb - wa);
                let (d12, d13, d23, s12, s13, s23) = match region {
                    0 => (u, w, w - u, 1.0, 1.0, 1.0),
                    1 => (u, 1.0 - w, w - u, 1.0, -1.0, 1.0),
                    2 => (u, 1.0 - w, 1.0 - (w - u), 1.0, -1.0, -1.0),
                    _ => (1.0 - u, 1.0 - w, w - u, -1.0, -1.0, 1.0),
                };
                let (a12, l12) = leg(k, v, d12);
                let (a13, l13) = leg(k, v, d13);
                let (a23, l23) = leg(kp, v, d23);
                let psi2 = (a12 * a13 * a23).powi(2);
                let lu = s12 * l12 - s23 * l23;
                let lw = s13 * l13 + s23 * l23;
                norm += weight * psi2;
                kinetic += weight * psi2 * (lu * lu + lw * lw + lu * lw);
            }
        }
    }
    TriangleSums { norm, kinetic }
}

/// Contact line integrals: (int_0^1 (A_k A_k')^2 dt, int_0^1 A_k^4 dt),
/// both reduced to [0, 1/2] by ring-distance symmetry.
fn contact_lines(p: &JastrowParams, rule: QuadRule, n: usize, graded: bool) -> (f64, f64) {
    let (tx, tw) = composite_nodes(rule, n, graded, false);
    let (mut im, mut mm) = (0.0, 0.0);
    for (ti, weight) in tx.iter().zip(&tw) {
        let t = 0.5 * ti;
        let wgt = weight; // dt over [0,1/2] then doubled below
        let (ak, _) = leg(p.k, p.v, t);
        let (akp, _) = leg(p.k_prime, p.v, t);
        im += wgt * (ak * akp).powi(2);
        mm += wgt * ak.powi(4);
    }
    // composite weights sum to 1 on the unit interval; the map t = ti/2
    // contributes 1/2 and the fold r -> 1-r contributes 2.
    (im, mm)
}

fn grading_active(p: &JastrowParams) -> bool {
    p.k.max(p.k_prime) > 3.05 && (p.v - 1.0).abs() > 1e-12
}

/// Cusp-substituted contact coefficient g cos^2v(k/2) = 2 v k sin(k/2)
/// cos(k/2)^(2v-1); finite at k = pi for v > 1/2.
fn contact_coefficient(kappa: f64, v: f64) -> f64 {
    2.0 * v * kappa * (0.5 * kappa).sin() * (0.5 * kappa).cos().powf(2.0 * v - 1.0)
}

struct RawEnergy {
    total: f64,
    kinetic: f64,
    interaction: f64,
}

fn energy_at(p: &JastrowParams, rule: QuadRule, n: usize, graded: bool) -> RawEnergy {
    let tri = triangle_sums(p, rule, n, graded);
    let (line_im, line_mm) = contact_lines(p, rule, n, graded);
    let norm = 2.0 * tri.norm;
    let kin = 2.0 * tri.kinetic / norm;
    let pot = (2.0 * contact_coefficient(p.k, p.v) * line_im
        + contact_coefficient(p.k_prime, p.v) * line_mm)
        / norm;
    RawEnergy {
        total: kin + pot,
        kinetic: kin,
        interaction: pot,
    }
}

fn check_consistency(p: &JastrowParams, couplings: &CouplingSet) -> Result<()> {
    for (kappa, g, name) in [(p.k, couplings.g, "g"), (p.k_prime, couplings.g_prime, "g'")] {
        let ok = if g.is_infinite() {
            kappa >= PI - 1e-9
        } else {
            (g_from_k(kappa, p.v)? - g).abs() <= 1e-8 * g.max(1.0)
        };
        if !ok {
            return Err(Error::Domain(format!(
                "params inconsistent with couplings: pair momentum {kappa} does not solve the \
                 cusp condition for {name}={g} at v={}",
                p.v
            )));
        }
    }
    Ok(())
}

/// Rayleigh quotient of the ansatz at exponent v by sector quadrature,
/// with kinetic and interaction parts and a doubling error estimate.
pub fn variational_energy(
    params: &JastrowParams,
    couplings: &CouplingSet,
    cfg: &QuadratureConfig,
) -> Result<QuadEnergy> {
    cfg.validate()?;
    check_consistency(params, couplings)?;
    if params.v <= 0.5 + 1e-12 && params.k.max(params.k_prime) >= PI - 1e-9 {
        return Err(Error::Numerics(format!(
            "kinetic integral diverges: v = {} <= 1/2 with a pair momentum at pi",
            params.v
        )));
    }
    let graded = grading_active(params);
    let coarse = energy_at(params, cfg.rule, cfg.points_per_dim, graded);
    let fine = energy_at(params, cfg.rule, 2 * cfg.points_per_dim, graded);
    // Free case: both integrals are exactly the torus volume, energy 0.
    let scale = fine.total.abs().max(1e-12);
    let error = (coarse.total - fine.total).abs() / scale;
    Ok(QuadEnergy {
        report: EnergyReport {
            total: fine.total,
            kinetic: fine.kinetic,
            interaction: fine.interaction,
            method: Method::JastrowVariational,
        },
        error,
    })
}

/// Norm integral int |Psi|^2 and its doubling error, by the same sector
/// decomposition.
pub fn norm_quadrature(params: &JastrowParams, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    cfg.validate()?;
    let graded = grading_active(params);
    let coarse = 2.0 * triangle_sums(params, cfg.rule, cfg.points_per_dim, graded).norm;
    let fine = 2.0 * triangle_sums(params, cfg.rule, 2 * cfg.points_per_dim, graded).norm;
    Ok((fine, (coarse - fine).abs() / fine))
}

// ---------------------------------------------------------------------------
// Marginals and densities.

/// 1-D integral of prod of two squared legs at separation offset r, with
/// panel splits at every ring-distance kink.
fn overlap_line(
    ka: f64,
    kb: f64,
    v: f64,
    r: f64,
    rule: QuadRule,
    n: usize,
) -> f64 {
    let mut cuts = vec![0.0, 0.5, 1.0, r.fract(), (r + 0.5).fract()];
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let (bx, bw) = unit_nodes(rule, n);
    let mut sum = 0.0;
    for seg in cuts.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        if b - a < 1e-14 {
            continue;
        }
        for (xi, wi) in bx.iter().zip(bw.iter()) {
            let t = a + (b - a) * xi;
            let (fa, _) = leg(ka, v, jastrow::ring_distance(t));
            let (fb, _) = leg(kb, v, jastrow::ring_distance(t - r));
            sum += wi * (b - a) * (fa * fb).powi(2);
        }
    }
    sum
}

/// One point of the normalized pair-distance marginal, with the error of
/// the pointwise quadrature and the shared norm combined.
pub fn pair_marginal_at(
    params: &JastrowParams,
    kind: PairKind,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    cfg.validate()?;
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Domain(format!("separation outside [0, 1]: r={r}")));
    }
    let (norm, norm_err) = norm_quadrature(params, cfg)?;
    let (value, err) = marginal_point(params, kind, r, cfg, norm);
    Ok((value, err + norm_err))
}

fn marginal_point(
    params: &JastrowParams,
    kind: PairKind,
    r: f64,
    cfg: &QuadratureConfig,
    norm: f64,
) -> (f64, f64) {
    let (k, kp, v) = (params.k, params.k_prime, params.v);
    // mm: fixed majority pair at separation r, impurity integrated out.
    // im: fixed impurity-majority pair, remaining majority integrated out.
    let (fixed_kappa, la, lb) = match kind {
        PairKind::MajorityMajority => (kp, k, k),
        PairKind::ImpurityMajority => (k, k, kp),
    };
    let (ffix, _) = leg(fixed_kappa, v, jastrow::ring_distance(r));
    let coarse = overlap_line(la, lb, v, r, cfg.rule, cfg.points_per_dim);
    let fine = overlap_line(la, lb, v, r, cfg.rule, 2 * cfg.points_per_dim);
    let value = ffix.powi(2) * fine / norm;
    (value, (coarse - fine).abs() / fine.abs().max(1e-300))
}

/// Normalized pair-distance marginal on a 201-point grid over [0, 1].
pub fn pair_marginal(
    params: &JastrowParams,
    kind: PairKind,
    cfg: &QuadratureConfig,
) -> Result<CorrelationCurve> {
    pair_marginal_resolved(params, kind, cfg, 201)
}

/// Same as [`pair_marginal`] with an explicit grid resolution.
pub fn pair_marginal_resolved(
    params: &JastrowParams,
    kind: PairKind,
    cfg: &QuadratureConfig,
    resolution: usize,
) -> Result<CorrelationCurve> {
    cfg.validate()?;
    if resolution < 2 {
        return Err(Error::Domain(format!("resolution must be >= 2, got {resolution}")));
    }
    let (norm, norm_err) = norm_quadrature(params, cfg)?;
    let r_grid = crate::linspace(0.0, 1.0, resolution);
    let mut values = Vec::with_capacity(resolution);
    let mut worst = 0.0_f64;
    for &r in &r_grid {
        let (value, err) = marginal_point(params, kind, r, cfg, norm);
        values.push(value);
        worst = worst.max(err);
    }
    Ok(CorrelationCurve {
        r_grid,
        values,
        kind,
        params: *params,
        error: worst + norm_err,
    })
}

/// Two-body density of the majority pair over (x_m1, x_m2) in [0, 1]^2 on
/// a 101 x 101 grid; depends on the positions only through their ring
/// distance.
pub fn two_body_density(params: &JastrowParams, cfg: &QuadratureConfig) -> Result<DensityGrid> {
    two_body_density_resolved(params, cfg, 101)
}

/// Same as [`two_body_density`] with an explicit per-axis resolution.
pub fn two_body_density_resolved(
    params: &JastrowParams,
    cfg: &QuadratureConfig,
    resolution: usize,
) -> Result<DensityGrid> {
    cfg.validate()?;
    if resolution < 2 {
        return Err(Error::Domain(format!("resolution must be >= 2, got {resolution}")));
    }
    let (norm, norm_err) = norm_quadrature(params, cfg)?;
    let axis = crate::linspace(0.0, 1.0, resolution);
    // The marginal depends on |i - j| only; precompute the distinct rows.
    let steps = resolution - 1;
    let mut by_offset = Vec::with_capacity(steps + 1);
    let mut worst = 0.0_f64;
    for offset in 0..=steps {
        let r = offset as f64 / steps as f64;
        let (value, err) = marginal_point(params, PairKind::MajorityMajority, r, cfg, norm);
        by_offset.push(value);
        worst = worst.max(err);
    }
    let mut values = vec![0.0; resolution * resolution];
    for i in 0..resolution {
        for j in 0..resolution {
            values[i * resolution + j] = by_offset[i.abs_diff(j)];
        }
    }
    Ok(DensityGrid {
        x: axis.clone(),
        y: axis,
        values,
        error: worst + norm_err,
    })
}

/// Jacobi-coordinate density in the majority-apex frame (the frame in
/// which broken integrability shows up as xi-asymmetry).
pub fn jacobi_density(params: &JastrowParams, cfg: &QuadratureConfig) -> Result<DensityGrid> {
    jacobi_density_in_frame(params, JacobiFrame::MajorityApex, cfg, 101)
}

/// Jacobi-coordinate density rho(xi, r) on [-1/2, 1/2]^2.
///
/// With the center of mass at the origin the apex particle sits at xi and
/// the base pair at -xi/2 +- r/2; the (u, w) Jacobian contributes 3/2, so
/// rho integrates to 1 on a fundamental cell of the (xi, r) lattice
/// (area 2/3) and to 3/2 over the displayed square window.
pub fn jacobi_density_in_frame(
    params: &JastrowParams,
    frame: JacobiFrame,
    cfg: &QuadratureConfig,
    resolution: usize,
) -> Result<DensityGrid> {
    cfg.validate()?;
    if resolution < 2 {
        return Err(Error::Domain(format!("resolution must be >= 2, got {resolution}")));
    }
    let (norm, norm_err) = norm_quadrature(params, cfg)?;
    let axis = crate::linspace(-0.5, 0.5, resolution);
    let mut values = vec![0.0; resolution * resolution];
    for (i, &xi) in axis.iter().enumerate() {
        for (j, &r) in axis.iter().enumerate() {
            let psi = match frame {
                // Apex x2 = xi against base (x1, x3) = (-xi/2 + r/2, -xi/2 - r/2):
                // d12 carries k, d23 carries k', the base separation carries k.
                JacobiFrame::MajorityApex => wavefunction_value(
                    -0.5 * xi + 0.5 * r,
                    xi,
                    -0.5 * xi - 0.5 * r,
                    params,
                ),
                // Apex x1 = xi against the majority base pair.
                JacobiFrame::ImpurityApex => wavefunction_value(
                    xi,
                    -0.5 * xi + 0.5 * r,
                    -0.5 * xi - 0.5 * r,
                    params,
                ),
            };
            values[i * resolution + j] = 1.5 * psi * psi / norm;
        }
    }
    Ok(DensityGrid {
        x: axis.clone(),
        y: axis,
        values,
        error: norm_err,
    })
}

/// Three-body density sampled on the plane through the center of mass
/// orthogonal to (1,1,1), spanned by e1 = (1,-1,0)/sqrt(2) and
/// e2 = (1,1,-2)/sqrt(6); a display window, not a normalized marginal.
pub fn three_body_contour(
    params: &JastrowParams,
    cfg: &QuadratureConfig,
    resolution: usize,
) -> Result<DensityGrid> {
    cfg.validate()?;
    if resolution < 2 {
        return Err(Error::Domain(format!("resolution must be >= 2, got {resolution}")));
    }
    let (norm, norm_err) = norm_quadrature(params, cfg)?;
    let axis = crate::linspace(-0.75, 0.75, resolution);
    let (s2, s6) = (2.0_f64.sqrt(), 6.0_f64.sqrt());
    let mut values = vec![0.0; resolution * resolution];
    for (i, &c1) in axis.iter().enumerate() {
        for (j, &c2) in axis.iter().enumerate() {
            let x1 = c1 / s2 + c2 / s6;
            let x2 = -c1 / s2 + c2 / s6;
            let x3 = -2.0 * c2 / s6;
            let psi = wavefunction_value(x1, x2, x3, params);
            values[i * resolution + j] = psi * psi / norm;
        }
    }
    Ok(DensityGrid {
        x: axis.clone(),
        y: axis,
        values,
        error: norm_err,
    })
}

// ---------------------------------------------------------------------------
// Internal consistency probes (exposed to the verification suite).

/// Relative mismatch between 12x the fundamental-sector norm integral and
/// the full norm; meaningful only for exchange-symmetric k = k'.
///
/// The three gaps (u, w-u, 1-w) admit 3! orderings, each covering 1/12 of
/// the relative square, and the square itself double-counts the ordered
/// triangle through majority exchange.
pub(crate) fn sector_consistency_residual(params: &JastrowParams, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    let (k, kp, v) = (params.k, params.k_prime, params.v);
    let n = cfg.points_per_dim;
    let (ux, uw) = composite_nodes(cfg.rule, n, false, false);
    let (sx, sw) = composite_nodes(cfg.rule, n, false, false);
    // Fundamental ordering sector u <= w - u <= 1 - w: u in [0, 1/3],
    // w in [2u, (1+u)/2], split at w = 1/2 where d13 switches branch.
    let mut fund = 0.0;
    for (ui, uweight) in ux.iter().zip(&uw) {
        let u = ui / 3.0;
        let wu = uweight / 3.0;
        let (wlo, whi) = (2.0 * u, 0.5 * (1.0 + u));
        for (wa, wb) in [(wlo, whi.min(0.5)), (wlo.max(0.5), whi)] {
            if wb - wa <= 0.0 {
                continue;
            }
            for (si, sweight) in sx.iter().zip(&sw) {
                let w = wa + (wb - wa) * si;
                let d13 = if w <= 0.5 { w } else { 1.0 - w };
                let (a12, _) = leg(k, v, u);
                let (a13, _) = leg(k, v, d13);
                let (a23, _) = leg(kp, v, w - u);
                fund += wu * sweight * (wb - wa) * (a12 * a13 * a23).powi(2);
            }
        }
    }
    let full = 2.0 * triangle_sums(params, cfg.rule, n, false).norm;
    Ok((12.0 * fund - full).abs() / full)
}

/// Worst relative mismatch between the numerically extracted derivative
/// jump across a contact and g Psi(contact), over both pair kinds.
pub(crate) fn cusp_residual(params: &JastrowParams) -> Result<f64> {
    let couplings = params.couplings()?;
    if couplings.g.is_infinite() || couplings.g_prime.is_infinite() {
        return Err(Error::Domain(
            "cusp residual needs finite couplings (Psi vanishes at contact in the TG limit)".into(),
        ));
    }
    let eps = 5e-5;
    let mut worst = 0.0_f64;
    for (g, at) in [
        (couplings.g, &(|e: f64| wavefunction_value(0.11 + e, 0.11, 0.37, params)) as &dyn Fn(f64) -> f64),
        (couplings.g_prime, &(|e: f64| wavefunction_value(0.37, 0.11 + e, 0.11, params)) as &dyn Fn(f64) -> f64),
    ] {
        let jump = |e: f64| (at(e) + at(-e) - 2.0 * at(0.0)) / e;
        // Richardson: D(eps) = jump + c1 eps + c2 eps^2, so 2D(eps/2) - D(eps)
        // leaves an O(eps^2) defect.
        let extrapolated = 2.0 * jump(0.5 * eps) - jump(eps);
        let expected = g * at(0.0);
        worst = worst.max((extrapolated - expected).abs() / expected);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jastrow::{jastrow_energy, norm_integral, pair_corr_im, pair_corr_mm};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn v1_params(k: f64, kp: f64) -> (JastrowParams, CouplingSet) {
        let p = JastrowParams::new(k, kp, 1.0).unwrap();
        (p, p.couplings().unwrap())
    }

    #[test]
    fn gauss_legendre_exactness() {
        // Degree 2n-1 polynomials integrate exactly.
        let (x, w) = gauss_legendre_unit(8);
        for deg in 0..16 {
            let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg)).sum();
            assert!((got - 1.0 / (deg + 1) as f64).abs() < 1e-14, "degree {deg}");
        }
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn v1_energy_matches_closed_form() {
        let cfg = QuadratureConfig::default();
        for &(k, kp) in &[
            (2.0, 1.0),
            (5.0 * PI / 6.0, PI / 3.0),
            (1.3, 2.9),
            (0.5 * PI, PI / 6.0),
            (PI / 3.0, PI / 3.0),
            (2.0, 2.0),
        ] {
            let (p, c) = v1_params(k, kp);
            let q = variational_energy(&p, &c, &cfg).unwrap();
            let closed = jastrow_energy(k, kp).unwrap();
            assert!(rel(q.report.total, closed.total) < 1e-9, "E({k},{kp})");
            assert!(rel(q.report.interaction, closed.interaction) < 1e-8, "V({k},{kp})");
            assert!(q.error < 1e-9, "self-reported error at ({k},{kp})");
        }
    }

    #[test]
    fn tg_anchor_through_quadrature() {
        let (p, c) = v1_params(PI, PI);
        let q = variational_energy(&p, &c, &QuadratureConfig::default()).unwrap();
        assert!(rel(q.report.total, 4.0 * PI * PI) < 1e-5);
    }

    #[test]
    fn free_case_is_zero() {
        for v in [0.6, 1.0, 2.3] {
            let p = JastrowParams::new(0.0, 0.0, v).unwrap();
            let c = CouplingSet::new(0.0, 0.0).unwrap();
            let q = variational_energy(&p, &c, &QuadratureConfig::default()).unwrap();
            assert!(q.report.total.abs() < 1e-12, "v={v}");
        }
    }

    #[test]
    fn norm_matches_closed_form() {
        let cfg = QuadratureConfig::default();
        for &(k, kp) in &[(2.0, 1.0), (5.0 * PI / 6.0, PI / 3.0), (2.0, 2.0)] {
            let (p, _) = v1_params(k, kp);
            let (norm, err) = norm_quadrature(&p, &cfg).unwrap();
            assert!(rel(norm, norm_integral(k, kp).unwrap()) < 1e-10, "I({k},{kp})");
            assert!(err < 1e-9);
        }
    }

    #[test]
    fn general_v_consistency_guard() {
        let c = CouplingSet::new(2.0, 2.0).unwrap();
        let p = JastrowParams::new(1.0, 1.0, 1.0).unwrap(); // wrong momenta for g=2
        assert!(variational_energy(&p, &c, &QuadratureConfig::default()).is_err());
        let p = JastrowParams::from_couplings(&c, 0.8).unwrap();
        assert!(variational_energy(&p, &c, &QuadratureConfig::default()).is_ok());
    }

    #[test]
    fn divergence_guard_at_tg_small_v() {
        let c = CouplingSet::new(f64::INFINITY, f64::INFINITY).unwrap();
        let p = JastrowParams::from_couplings(&c, 0.4).unwrap();
        assert!(matches!(
            variational_energy(&p, &c, &QuadratureConfig::default()),
            Err(Error::Numerics(_))
        ));
    }

    #[test]
    fn graded_path_handles_tg_exponents() {
        let c = CouplingSet::new(f64::INFINITY, f64::INFINITY).unwrap();
        let exact = 4.0 * PI * PI;
        // v = 1 is the exact impenetrable ground state; other exponents
        // must land above it even with the singular contact layers.
        for v in [0.9, 1.2] {
            let p = JastrowParams::from_couplings(&c, v).unwrap();
            let q = variational_energy(&p, &c, &QuadratureConfig::default()).unwrap();
            assert!(q.report.total > exact - 1e-6, "v={v}: {}", q.report.total);
        }
        let p = JastrowParams::from_couplings(&c, 1.0).unwrap();
        let q = variational_energy(&p, &c, &QuadratureConfig::default()).unwrap();
        assert!(rel(q.report.total, exact) < 1e-5);
    }

    #[test]
    fn doubling_error_decreases() {
        let (p, c) = v1_params(2.0, 1.0);
        let coarse = variational_energy(
            &p,
            &c,
            &QuadratureConfig { points_per_dim: 16, ..Default::default() },
        )
        .unwrap();
        let fine = variational_energy(
            &p,
            &c,
            &QuadratureConfig { points_per_dim: 32, ..Default::default() },
        )
        .unwrap();
        // Monotone decrease holds above the roundoff floor; at (2,1) with
        // v=1 even n=16 is already converged to ~1e-15.
        assert!(
            fine.error <= coarse.error || fine.error < 1e-12,
            "coarse {:e} fine {:e}",
            coarse.error,
            fine.error
        );
        // A slowly converging case shows the decrease strictly.
        let c = CouplingSet::new(40.0, 3.0).unwrap();
        let p = JastrowParams::from_couplings(&c, 0.7).unwrap();
        let coarse = variational_energy(
            &p,
            &c,
            &QuadratureConfig { points_per_dim: 16, ..Default::default() },
        )
        .unwrap();
        let fine = variational_energy(
            &p,
            &c,
            &QuadratureConfig { points_per_dim: 32, ..Default::default() },
        )
        .unwrap();
        assert!(
            fine.error <= coarse.error || fine.error < 1e-12,
            "hard case: coarse {:e} fine {:e}",
            coarse.error,
            fine.error
        );
    }

    #[test]
    fn trapezoid_agrees_loosely() {
        let (p, c) = v1_params(2.0, 1.0);
        let cfg = QuadratureConfig {
            points_per_dim: 64,
            rule: QuadRule::Trapezoid,
            tol_report: 1e-3,
        };
        let q = variational_energy(&p, &c, &cfg).unwrap();
        assert!(rel(q.report.total, jastrow_energy(2.0, 1.0).unwrap().total) < 1e-3);
    }

    #[test]
    fn marginals_match_closed_form_at_v1() {
        let cfg = QuadratureConfig::default();
        for &(k, kp) in &[(2.0, 1.0), (5.0 * PI / 6.0, PI / 3.0)] {
            let (p, _) = v1_params(k, kp);
            for i in 0..21 {
                let r = i as f64 / 20.0;
                let (mm, _) = pair_marginal_at(&p, PairKind::MajorityMajority, r, &cfg).unwrap();
                let (im, _) = pair_marginal_at(&p, PairKind::ImpurityMajority, r, &cfg).unwrap();
                assert!((mm - pair_corr_mm(r, k, kp).unwrap()).abs() < 1e-8, "mm r={r}");
                assert!((im - pair_corr_im(r, k, kp).unwrap()).abs() < 1e-8, "im r={r}");
            }
        }
    }

    #[test]
    fn marginal_curve_normalized_and_symmetric() {
        let cfg = QuadratureConfig::default();
        let c = CouplingSet::new(12.0, 3.0).unwrap();
        let p = JastrowParams::from_couplings(&c, 0.85).unwrap();
        for kind in [PairKind::MajorityMajority, PairKind::ImpurityMajority] {
            let curve = pair_marginal(&p, kind, &cfg).unwrap();
            let n = curve.r_grid.len();
            // Simpson over the odd-sized uniform grid.
            let h = 1.0 / (n - 1) as f64;
            let mut integral = curve.values[0] + curve.values[n - 1];
            for i in 1..n - 1 {
                integral += curve.values[i] * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            integral *= h / 3.0;
            assert!((integral - 1.0).abs() < 1e-8, "norm for {kind:?}: {integral}");
            for i in 0..n {
                let delta = (curve.values[i] - curve.values[n - 1 - i]).abs();
                assert!(delta < 1e-10, "r <-> 1-r symmetry at i={i}");
            }
            assert!(curve.values.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn two_body_density_structure() {
        let cfg = QuadratureConfig::default();
        let (p, _) = v1_params(5.0 * PI / 6.0, PI / 3.0);
        let grid = two_body_density(&p, &cfg).unwrap();
        let n = grid.x.len();
        for (i, &xi) in grid.x.iter().enumerate() {
            for (j, &xj) in grid.y.iter().enumerate() {
                let want = pair_corr_mm(xi - xj, p.k, p.k_prime).unwrap();
                assert!((grid.values[i * n + j] - want).abs() < 1e-8);
            }
        }
        // Trapezoid integral over the square (periodic duplication at the
        // edges is exactly compensated by the half weights).
        let h = 1.0 / (n - 1) as f64;
        let mut integral = 0.0;
        for i in 0..n {
            for j in 0..n {
                let wi = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                let wj = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                integral += wi * wj * grid.values[i * n + j];
            }
        }
        integral *= h * h;
        // The residual is the display grid's own trapezoid defect (the
        // marginal has a derivative kink at contact), not quadrature error.
        assert!((integral - 1.0).abs() < 1e-4, "two-body norm: {integral}");
        // Uniform when free.
        let free = two_body_density(
            &JastrowParams::new(0.0, 0.0, 1.0).unwrap(),
            &cfg,
        )
        .unwrap();
        assert!(free.values.iter().all(|&x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn jacobi_density_pinned_and_symmetry() {
        let cfg = QuadratureConfig::default();
        let (p, _) = v1_params(2.5, 1.5);
        let grid = jacobi_density(&p, &cfg).unwrap();
        let n = grid.x.len();
        let at = |i: usize, j: usize| grid.values[i * n + j];
        // xi = 0.2, r = 0.3 sit exactly on the 101-point axes.
        assert!(rel(at(70, 80), 1.516_257_393_323_193_19) < 1e-9);
        let mut asym = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                asym = asym.max((at(i, j) - at(n - 1 - i, j)).abs());
            }
        }
        assert!(rel(asym, 2.100_668_325_129_132_23) < 1e-6, "asym={asym}");
        // Integrable case: exactly xi-symmetric in any frame.
        let (ps, _) = v1_params(2.0, 2.0);
        let sym = jacobi_density(&ps, &cfg).unwrap();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((sym.values[i * n + j] - sym.values[(n - 1 - i) * n + j]).abs());
            }
        }
        assert!(worst < 1e-12);
        // Impurity-apex frame: symmetric even off the integrable line.
        let imp = jacobi_density_in_frame(&p, JacobiFrame::ImpurityApex, &cfg, 101).unwrap();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((imp.values[i * n + j] - imp.values[(n - 1 - i) * n + j]).abs());
            }
        }
        assert!(worst < 1e-12);
    }

    #[test]
    fn wavefunction_symmetries() {
        let p = JastrowParams::new(2.2, 1.1, 0.8).unwrap();
        let a = wavefunction_value(0.15, 0.4, 0.83, &p);
        let b = wavefunction_value(0.15, 0.83, 0.4, &p);
        assert!((a - b).abs() < 1e-15, "majority exchange");
        let c = wavefunction_value(0.35, 0.6, 0.03, &p); // global shift by 0.2
        assert!(rel(a, c) < 1e-12, "translation invariance");
        let free = JastrowParams::new(0.0, 0.0, 1.7).unwrap();
        assert_eq!(wavefunction_value(0.1, 0.5, 0.9, &free), 1.0);
    }

    #[test]
    fn sector_and_cusp_probes() {
        let cfg = QuadratureConfig::default();
        for v in [1.0, 0.8] {
            let c = CouplingSet::new(6.0, 6.0).unwrap();
            let p = JastrowParams::from_couplings(&c, v).unwrap();
            let sector = sector_consistency_residual(&p, &cfg).unwrap();
            assert!(sector < 1e-9, "sector v={v}: {sector:e}");
            let cusp = cusp_residual(&p).unwrap();
            assert!(cusp < 1e-8, "cusp v={v}: {cusp:e}");
        }
        // Mixed couplings still satisfy the cusp identity pair by pair.
        let c = CouplingSet::new(9.0, 2.0).unwrap();
        let p = JastrowParams::from_couplings(&c, 1.2).unwrap();
        let cusp = cusp_residual(&p).unwrap();
        assert!(cusp < 1e-8, "mixed cusp: {cusp:e}");
    }

    #[test]
    fn config_validation() {
        let bad = QuadratureConfig { points_per_dim: 8, ..Default::default() };
        let (p, c) = v1_params(1.0, 1.0);
        assert!(variational_energy(&p, &c, &bad).is_err());
        let bad = QuadratureConfig { tol_report: 0.0, ..Default::default() };
        assert!(variational_energy(&p, &c, &bad).is_err());
    }
}
