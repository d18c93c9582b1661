//! Closed-form quantities of the pair-product ansatz at exponent v = 1:
//! normalization, total energy with its kinetic/interaction split, both
//! pair-correlation functions, and the correlation-transition curve.
//!
//! The ansatz is Psi = C f(d12; k) f(d13; k) f(d23; k') with
//! f(d; k) = cos[k (d - 1/2)] on the ring distance d in [0, 1/2]; pairs
//! (1,2) and (1,3) couple the impurity to the majority atoms, (2,3) is the
//! majority pair. The generic (k != k') closed forms divide by
//! (k^2 - k'^2)^2, so evaluation switches to an expansion in
//! delta = k' - k inside |delta| < `BRANCH_RADIUS`; both branches agree to
//! better than 1e-6 relative at |delta| = 1e-4.

use crate::{EnergyReport, Error, Method, Result};
use std::f64::consts::PI;

/// Half-width of the expansion branch around the integrable line.
pub const BRANCH_RADIUS: f64 = 1e-3;

/// Pair momenta below this are treated as exactly zero (free pair).
const AXIS_EPS: f64 = 1e-12;

/// Ring distance in [0, 1/2] for a signed separation r on the unit ring.
pub fn ring_distance(r: f64) -> f64 {
    let t = r - r.floor();
    t.min(1.0 - t)
}

/// Pair function cos[k (d(r) - 1/2)]; nonnegative for k in [0, pi].
pub fn pair_function(r: f64, k: f64) -> f64 {
    (k * (ring_distance(r) - 0.5)).cos()
}

fn check_momentum(name: &str, k: f64, limit: f64) -> Result<()> {
    if !(0.0..=limit).contains(&k) {
        return Err(Error::Domain(format!(
            "{name} must lie in [0, {limit:.3}], got {k}"
        )));
    }
    Ok(())
}

/// Norm integral I(k, k') = int |f12 f13 f23|^2 over the two relative
/// coordinates. The normalization constant is C^2 = 1/I.
pub fn norm_integral(k: f64, k_prime: f64) -> Result<f64> {
    check_momentum("k", k, 2.0 * PI)?;
    check_momentum("k'", k_prime, 2.0 * PI)?;
    Ok(norm_dispatch(k, k_prime))
}

/// Squared normalization constant C^2 = 1 / I(k, k').
pub fn norm_c2(k: f64, k_prime: f64) -> Result<f64> {
    Ok(1.0 / norm_integral(k, k_prime)?)
}

/// Ground-state energy of the v = 1 ansatz with its kinetic/interaction
/// split. Exact (not variationally bound) only at k = k'; an upper bound
/// otherwise.
pub fn jastrow_energy(k: f64, k_prime: f64) -> Result<EnergyReport> {
    check_momentum("k", k, PI)?;
    check_momentum("k'", k_prime, PI)?;
    let total = energy_dispatch(k, k_prime);
    let interaction = interaction_part(k, k_prime);
    Ok(EnergyReport {
        total,
        kinetic: total - interaction,
        interaction,
        method: Method::JastrowAnalytic,
    })
}

/// Majority-majority pair correlation rho(r) = f(r; k')^2 J(r; k) / I,
/// normalized so that its integral over r in [0, 1] is one.
pub fn pair_corr_mm(r: f64, k: f64, k_prime: f64) -> Result<f64> {
    check_momentum("k", k, 2.0 * PI)?;
    check_momentum("k'", k_prime, 2.0 * PI)?;
    let f = pair_function(r, k_prime);
    Ok(f * f * xi_marginal_mm(r, k) / norm_dispatch(k, k_prime))
}

/// Impurity-majority pair correlation rho(r) = f(r; k)^2 J_im(r; k, k') / I.
/// Identical to [`pair_corr_mm`] at k = k'.
pub fn pair_corr_im(r: f64, k: f64, k_prime: f64) -> Result<f64> {
    check_momentum("k", k, 2.0 * PI)?;
    check_momentum("k'", k_prime, 2.0 * PI)?;
    let f = pair_function(r, k);
    Ok(f * f * xi_marginal_im(r, k, k_prime) / norm_dispatch(k, k_prime))
}

/// Majority coupling k'*(k) at which the majority-pair correlation takes
/// equal values at r = 1/2 and r = 1/3 (onset of the split maxima).
///
/// May exceed pi for k near the Tonks-Girardeau point, where no repulsive
/// coupling reaches the transition.
pub fn transition_kprime_star(k: f64) -> Result<f64> {
    check_momentum("k", k, PI)?;
    if k < AXIS_EPS {
        return Ok(0.0);
    }
    // rho(1/2) = rho(1/3) reduces to cos(k'/6) = sqrt(J(1/2)/J(1/3));
    // the xi marginal decreases towards r = 1/2, so the ratio is in (0, 1].
    let ratio = xi_marginal_mm(0.5, k) / xi_marginal_mm(1.0 / 3.0, k);
    Ok(6.0 * ratio.sqrt().min(1.0).acos())
}

// ---------------------------------------------------------------------------
// Energy and norm branches.

fn energy_dispatch(k: f64, q: f64) -> f64 {
    if k < AXIS_EPS && q < AXIS_EPS {
        return 0.0;
    }
    if k < AXIS_EPS {
        // Free impurity: only the majority pair interacts.
        return q * q;
    }
    if q < AXIS_EPS {
        // Free majority pair: two independent impurity-majority bonds
        // (the cross term of the two legs integrates to zero).
        return 2.0 * k * k;
    }
    let delta = q - k;
    if delta.abs() < BRANCH_RADIUS {
        energy_series(k, delta)
    } else {
        energy_generic(k, q)
    }
}

fn norm_dispatch(k: f64, q: f64) -> f64 {
    if k < AXIS_EPS && q < AXIS_EPS {
        return 1.0;
    }
    if k < AXIS_EPS {
        return (q + q.sin()) / (2.0 * q);
    }
    if q < AXIS_EPS {
        let h = (k + k.sin()) / (2.0 * k);
        return h * h;
    }
    let delta = q - k;
    if delta.abs() < BRANCH_RADIUS {
        norm_series(k, delta)
    } else {
        norm_generic(k, q)
    }
}

/// Contact (interaction) part of the energy,
/// V = [2 k sin k J_im(0; k, k') + k' sin k' J(0; k)] / I,
/// using g f(0)^2 = k sin k from the cusp condition at v = 1.
fn interaction_part(k: f64, q: f64) -> f64 {
    if k < AXIS_EPS && q < AXIS_EPS {
        return 0.0;
    }
    let num = 2.0 * k * k.sin() * xi_marginal_im(0.0, k, q)
        + q * q.sin() * xi_marginal_mm(0.0, k);
    num / norm_dispatch(k, q)
}

/// P bracket of the generic energy formula.
fn p_bracket(k: f64, q: f64) -> f64 {
    let (sk, ck) = k.sin_cos();
    let (sq, cq) = q.sin_cos();
    -2.0 * k * q * cq * sk * sk + (k * k * k - k * q * q + (k * k + q * q) * ck * sk) * sq
}

/// B bracket shared by the generic energy denominator and the norm.
fn b_bracket(k: f64, q: f64) -> f64 {
    let (sk, ck) = k.sin_cos();
    let (sq, cq) = q.sin_cos();
    let m = k * k - q * q;
    let s2k = 2.0 * sk * ck;
    4.0 * q * (m * m + k.powi(4) * cq) * sk * sk
        + 8.0 * k * m * m * sk * (q + sq)
        + k * (4.0 * k * q * m * m
            + (4.0 * k.powi(5) - 10.0 * k.powi(3) * q * q
                + 6.0 * k * q.powi(4)
                + q * q * (q * q - 3.0 * k * k) * s2k)
                * sq)
}

pub(crate) fn energy_generic(k: f64, q: f64) -> f64 {
    2.0 * k * k + q * q + 6.0 * k.powi(3) * q * q * p_bracket(k, q) / b_bracket(k, q)
}

pub(crate) fn norm_generic(k: f64, q: f64) -> f64 {
    let m = k * k - q * q;
    b_bracket(k, q) / (32.0 * q * k * k * m * m)
}

/// Coefficients of P = delta^2 (P2 + P3 d + P4 d^2 + P5 d^3 + P6 d^4).
fn series_p_coeffs(k: f64) -> [f64; 5] {
    let (s, c) = k.sin_cos();
    let k2 = k * k;
    [
        -2.0 * k2 * c + k * s + s * s * c,
        2.0 * k2 * s / 3.0 - k * c + s * c * c,
        k2 * c / 3.0 + k * s / 6.0 - s * s * c / 2.0,
        -k2 * s / 15.0 + k * c / 6.0 - s * c * c / 6.0,
        -k2 * c / 60.0 - k * s / 40.0 + s * s * c / 24.0,
    ]
}

/// Coefficients of B = delta^2 (B2 + B3 d + B4 d^2 + B5 d^3 + B6 d^4).
fn series_b_coeffs(k: f64) -> [f64; 5] {
    let (s, c) = k.sin_cos();
    let (k2, s2) = (k * k, s * s);
    let k3 = k2 * k;
    let b2 = k3 * (4.0 * k2 * c + 16.0 * k2 + 54.0 * k * s + 6.0 * s2 * c + 48.0 * s2);
    let b3 = k2
        * (-4.0 * k3 * s / 3.0 + 26.0 * k2 * c + 32.0 * k2 - 6.0 * k * s2 * s
            + 32.0 * k * s * c
            + 94.0 * k * s
            + 8.0 * s2 * c
            + 64.0 * s2);
    let b4 = k / 3.0
        * (-2.0 * k2 * k2 * c - 37.0 * k3 * s - 9.0 * k2 * s2 * c - 48.0 * k2 * s2
            + 72.0 * k2 * c
            + 60.0 * k2
            - 24.0 * k * s2 * s
            + 96.0 * k * s * c
            + 162.0 * k * s
            + 6.0 * s2 * c
            + 84.0 * s2);
    let b5 = 2.0 * k3 * k2 * s / 15.0 - 13.0 * k2 * k2 * c / 3.0 + k3 * s2 * s
        - 16.0 * k3 * s * c / 3.0
        - 13.0 * k3 * s
        - 4.0 * k2 * s2 * c
        - 16.0 * k2 * s2
        + 6.0 * k2 * c
        + 4.0 * k2
        - 2.0 * k * s2 * s
        + 8.0 * k * s * c
        + 10.0 * k * s
        + 4.0 * s2;
    let b6 = k / 60.0
        * (2.0 * k2 * k2 * c + 63.0 * k3 * s + 15.0 * k2 * s2 * c + 80.0 * k2 * s2
            - 240.0 * k2 * c
            + 80.0 * k * s2 * s
            - 320.0 * k * s * c
            - 260.0 * k * s
            - 60.0 * s2 * c
            - 240.0 * s2);
    [b2, b3, b4, b5, b6]
}

fn poly4(c: &[f64; 5], d: f64) -> f64 {
    c[0] + d * (c[1] + d * (c[2] + d * (c[3] + d * c[4])))
}

/// Energy on and near the integrable line, delta = k' - k; the removable
/// delta^2 factors of P and B are cancelled analytically.
pub(crate) fn energy_series(k: f64, delta: f64) -> f64 {
    let q = k + delta;
    let p = poly4(&series_p_coeffs(k), delta);
    let b = poly4(&series_b_coeffs(k), delta);
    2.0 * k * k + q * q + 6.0 * k.powi(3) * q * q * p / b
}

pub(crate) fn norm_series(k: f64, delta: f64) -> f64 {
    let q = k + delta;
    let b = poly4(&series_b_coeffs(k), delta);
    b / (32.0 * q * k * k * (2.0 * k + delta) * (2.0 * k + delta))
}

/// Integrable-line energy through its own closed form,
/// E = 3 k^2 + 3 k^2 / (3 - 16 N / D). Kept alongside the series branch
/// (which is better conditioned at small k) as an independent expression.
pub(crate) fn energy_integrable_nd(k: f64) -> f64 {
    let n = 3.0 + 2.0 * k * k + 2.0 * k * k * k.cos() - 3.0 * (2.0 * k).cos() + 6.0 * k * k.sin();
    let d = (8.0 * k * k - 1.0) * k.cos() + (3.0 * k).cos() - 4.0 * k * k.sin();
    3.0 * k * k + 3.0 * k * k / (3.0 - 16.0 * n / d)
}

// ---------------------------------------------------------------------------
// Correlation marginals.

/// Marginal of the two impurity legs at fixed majority separation r:
/// J(r; k) = [4k + 2kr cos(2k(1-r)) + sin(2k(1-r))
///            + 2k(1-r) cos(2kr) + sin(2kr) + 8 sin k] / (16 k).
pub(crate) fn xi_marginal_mm(r: f64, k: f64) -> f64 {
    if k < AXIS_EPS {
        return 1.0;
    }
    // J is symmetric under r -> 1 - r; evaluate on the ring distance.
    let r = ring_distance(r);
    let br = 4.0 * k
        + 2.0 * k * r * (2.0 * k * (1.0 - r)).cos()
        + (2.0 * k * (1.0 - r)).sin()
        + 2.0 * k * (1.0 - r) * (2.0 * k * r).cos()
        + (2.0 * k * r).sin()
        + 8.0 * k.sin();
    br / (16.0 * k)
}

/// Marginal of the remaining impurity leg and the majority pair at fixed
/// impurity-majority separation r:
/// J_im(r; k, k') = (1/4) [1 + sin k / k + sin k' / k'
///   + (k sin k cos(k'(1-2r)) - k' sin k' cos(k(1-2r))) / (k^2 - k'^2)].
pub(crate) fn xi_marginal_im(r: f64, k: f64, q: f64) -> f64 {
    if k < AXIS_EPS && q < AXIS_EPS {
        return 1.0;
    }
    if k < AXIS_EPS {
        return (q + q.sin()) / (2.0 * q);
    }
    if q < AXIS_EPS {
        return (k + k.sin()) / (2.0 * k);
    }
    let r = ring_distance(r);
    let delta = q - k;
    if delta.abs() < BRANCH_RADIUS {
        return jim_series(r, k, delta);
    }
    0.25 * (1.0
        + k.sin() / k
        + q.sin() / q
        + (k * k.sin() * (q * (1.0 - 2.0 * r)).cos() - q * q.sin() * (k * (1.0 - 2.0 * r)).cos())
            / (k * k - q * q))
}

/// Expansion of J_im in delta = k' - k through third order; the zeroth
/// coefficient is exactly J(r; k).
fn jim_series(r: f64, k: f64, delta: f64) -> f64 {
    let ja = xi_marginal_mm(r, k);
    let jb = (1_f64/16.0)*k.recip() - 1_f64/4.0*k.powi(-2)*k.sin() - 1_f64/8.0*k.recip()*r + (1_f64/4.0)*k.recip()*k.cos() - 1_f64/8.0*k.recip()*k.cos().powi(2) - 1_f64/8.0*k.recip()*(k*r).cos().powi(2) + (1_f64/16.0)*k.powi(-2)*k.sin()*k.cos() - 1_f64/8.0*k.powi(-2)*(k*r).sin()*(k*r).cos() + (1_f64/8.0)*k.recip()*r*k.cos().powi(2) + (1_f64/4.0)*k.recip()*r*(k*r).cos().powi(2) + (1_f64/4.0)*k.recip()*k.cos().powi(2)*(k*r).cos().powi(2) + (1_f64/4.0)*r*k.sin()*k.cos() - 1_f64/2.0*r*(k*r).sin()*(k*r).cos() - 1_f64/4.0*r.powi(2)*k.sin()*k.cos() + (1_f64/2.0)*r.powi(2)*(k*r).sin()*(k*r).cos() - 1_f64/8.0*k.powi(-2)*k.sin()*k.cos()*(k*r).cos().powi(2) + (1_f64/8.0)*k.powi(-2)*(k*r).sin()*k.cos().powi(2)*(k*r).cos() - 1_f64/4.0*k.recip()*r*k.cos().powi(2)*(k*r).cos().powi(2) - 1_f64/2.0*r*k.sin()*k.cos()*(k*r).cos().powi(2) + (1_f64/2.0)*r*(k*r).sin()*k.cos().powi(2)*(k*r).cos() + (1_f64/2.0)*r.powi(2)*k.sin()*k.cos()*(k*r).cos().powi(2) - 1_f64/2.0*r.powi(2)*(k*r).sin()*k.cos().powi(2)*(k*r).cos() + (1_f64/4.0)*k.recip()*k.sin()*(k*r).sin()*k.cos()*(k*r).cos() - 1_f64/4.0*k.recip()*r*k.sin()*(k*r).sin()*k.cos()*(k*r).cos();
    let jc = -1_f64/32.0*k.powi(-2) - 1_f64/8.0*r + (1_f64/4.0)*r.powi(2) - 1_f64/6.0*r.powi(3) + (1_f64/4.0)*k.powi(-3)*k.sin() + (1_f64/16.0)*k.powi(-2)*r - 1_f64/4.0*k.powi(-2)*k.cos() + (1_f64/16.0)*k.powi(-2)*k.cos().powi(2) + (1_f64/16.0)*k.powi(-2)*(k*r).cos().powi(2) - 1_f64/8.0*k.recip()*k.sin() + (1_f64/8.0)*r*k.cos().powi(2) + (1_f64/4.0)*r*(k*r).cos().powi(2) - 1_f64/4.0*r.powi(2)*k.cos().powi(2) - 1_f64/2.0*r.powi(2)*(k*r).cos().powi(2) + (1_f64/6.0)*r.powi(3)*k.cos().powi(2) + (1_f64/3.0)*r.powi(3)*(k*r).cos().powi(2) - 1_f64/32.0*k.powi(-3)*k.sin()*k.cos() + (1_f64/16.0)*k.powi(-3)*(k*r).sin()*(k*r).cos() - 1_f64/16.0*k.powi(-2)*r*k.cos().powi(2) - 1_f64/8.0*k.powi(-2)*r*(k*r).cos().powi(2) - 1_f64/8.0*k.powi(-2)*k.cos().powi(2)*(k*r).cos().powi(2) + (1_f64/16.0)*k.recip()*k.sin()*k.cos() - 1_f64/8.0*k.recip()*(k*r).sin()*(k*r).cos() - 1_f64/4.0*r*k.cos().powi(2)*(k*r).cos().powi(2) + (1_f64/2.0)*r.powi(2)*k.cos().powi(2)*(k*r).cos().powi(2) - 1_f64/3.0*r.powi(3)*k.cos().powi(2)*(k*r).cos().powi(2) + (1_f64/16.0)*k.powi(-3)*k.sin()*k.cos()*(k*r).cos().powi(2) - 1_f64/16.0*k.powi(-3)*(k*r).sin()*k.cos().powi(2)*(k*r).cos() + (1_f64/8.0)*k.powi(-2)*r*k.cos().powi(2)*(k*r).cos().powi(2) - 1_f64/8.0*k.recip()*r*k.sin()*k.cos() + (1_f64/4.0)*k.recip()*r*(k*r).sin()*(k*r).cos() + (1_f64/8.0)*k.recip()*r.powi(2)*k.sin()*k.cos() - 1_f64/4.0*k.recip()*r.powi(2)*(k*r).sin()*(k*r).cos() - 1_f64/8.0*k.recip()*k.sin()*k.cos()*(k*r).cos().powi(2) + (1_f64/8.0)*k.recip()*(k*r).sin()*k.cos().powi(2)*(k*r).cos() - 1_f64/8.0*k.powi(-2)*k.sin()*(k*r).sin()*k.cos()*(k*r).cos() + (1_f64/4.0)*k.recip()*r*k.sin()*k.cos()*(k*r).cos().powi(2) - 1_f64/4.0*k.recip()*r*(k*r).sin()*k.cos().powi(2)*(k*r).cos() - 1_f64/4.0*k.recip()*r.powi(2)*k.sin()*k.cos()*(k*r).cos().powi(2) + (1_f64/4.0)*k.recip()*r.powi(2)*(k*r).sin()*k.cos().powi(2)*(k*r).cos() - 1_f64/4.0*r*k.sin()*(k*r).sin()*k.cos()*(k*r).cos() + (1_f64/2.0)*r.powi(2)*k.sin()*(k*r).sin()*k.cos()*(k*r).cos() - 1_f64/3.0*r.powi(3)*k.sin()*(k*r).sin()*k.cos()*(k*r).cos() + (1_f64/8.0)*k.powi(-2)*r*k.sin()*(k*r).sin()*k.cos()*(k*r).cos() - 1_f64/24.0*(k*r).cos().powi(2) + 1_f64/48.0;
    let jd = (1_f64/64.0)*k.powi(-3) - 1_f64/96.0*k.recip() - 1_f64/4.0*k.powi(-4)*k.sin() - 1_f64/32.0*k.powi(-3)*r + (1_f64/4.0)*k.powi(-3)*k.cos() - 1_f64/32.0*k.powi(-3)*k.cos().powi(2) - 1_f64/32.0*k.powi(-3)*(k*r).cos().powi(2) + (1_f64/8.0)*k.powi(-2)*k.sin() + (1_f64/16.0)*k.recip()*r - 1_f64/8.0*k.recip()*r.powi(2) + (1_f64/12.0)*k.recip()*r.powi(3) - 1_f64/24.0*k.recip()*k.cos() + (1_f64/48.0)*k.recip()*k.cos().powi(2) + (1_f64/48.0)*k.recip()*(k*r).cos().powi(2) + (1_f64/64.0)*k.powi(-4)*k.sin()*k.cos() - 1_f64/32.0*k.powi(-4)*(k*r).sin()*(k*r).cos() + (1_f64/32.0)*k.powi(-3)*r*k.cos().powi(2) + (1_f64/16.0)*k.powi(-3)*r*(k*r).cos().powi(2) + (1_f64/16.0)*k.powi(-3)*k.cos().powi(2)*(k*r).cos().powi(2) - 1_f64/32.0*k.powi(-2)*k.sin()*k.cos() + (1_f64/16.0)*k.powi(-2)*(k*r).sin()*(k*r).cos() - 1_f64/16.0*k.recip()*r*k.cos().powi(2) - 1_f64/8.0*k.recip()*r*(k*r).cos().powi(2) + (1_f64/8.0)*k.recip()*r.powi(2)*k.cos().powi(2) + (1_f64/4.0)*k.recip()*r.powi(2)*(k*r).cos().powi(2) - 1_f64/12.0*k.recip()*r.powi(3)*k.cos().powi(2) - 1_f64/6.0*k.recip()*r.powi(3)*(k*r).cos().powi(2) - 1_f64/24.0*k.recip()*k.cos().powi(2)*(k*r).cos().powi(2) - 1_f64/24.0*r*k.sin()*k.cos() + (1_f64/12.0)*r*(k*r).sin()*(k*r).cos() + (1_f64/8.0)*r.powi(2)*k.sin()*k.cos() - 1_f64/4.0*r.powi(2)*(k*r).sin()*(k*r).cos() - 1_f64/6.0*r.powi(3)*k.sin()*k.cos() + (1_f64/3.0)*r.powi(3)*(k*r).sin()*(k*r).cos() + (1_f64/12.0)*r.powi(4)*k.sin()*k.cos() - 1_f64/6.0*r.powi(4)*(k*r).sin()*(k*r).cos() - 1_f64/32.0*k.powi(-4)*k.sin()*k.cos()*(k*r).cos().powi(2) + (1_f64/32.0)*k.powi(-4)*(k*r).sin()*k.cos().powi(2)*(k*r).cos() - 1_f64/16.0*k.powi(-3)*r*k.cos().powi(2)*(k*r).cos().powi(2) + (1_f64/16.0)*k.powi(-2)*r*k.sin()*k.cos() - 1_f64/8.0*k.powi(-2)*r*(k*r).sin()*(k*r).cos() - 1_f64/16.0*k.powi(-2)*r.powi(2)*k.sin()*k.cos() + (1_f64/8.0)*k.powi(-2)*r.powi(2)*(k*r).sin()*(k*r).cos() + (1_f64/16.0)*k.powi(-2)*k.sin()*k.cos()*(k*r).cos().powi(2) - 1_f64/16.0*k.powi(-2)*(k*r).sin()*k.cos().powi(2)*(k*r).cos() + (1_f64/8.0)*k.recip()*r*k.cos().powi(2)*(k*r).cos().powi(2) - 1_f64/4.0*k.recip()*r.powi(2)*k.cos().powi(2)*(k*r).cos().powi(2) + (1_f64/6.0)*k.recip()*r.powi(3)*k.cos().powi(2)*(k*r).cos().powi(2) + (1_f64/12.0)*r*k.sin()*k.cos()*(k*r).cos().powi(2) - 1_f64/12.0*r*(k*r).sin()*k.cos().powi(2)*(k*r).cos() - 1_f64/4.0*r.powi(2)*k.sin()*k.cos()*(k*r).cos().powi(2) + (1_f64/4.0)*r.powi(2)*(k*r).sin()*k.cos().powi(2)*(k*r).cos() + (1_f64/3.0)*r.powi(3)*k.sin()*k.cos()*(k*r).cos().powi(2) - 1_f64/3.0*r.powi(3)*(k*r).sin()*k.cos().powi(2)*(k*r).cos() - 1_f64/6.0*r.powi(4)*k.sin()*k.cos()*(k*r).cos().powi(2) + (1_f64/6.0)*r.powi(4)*(k*r).sin()*k.cos().powi(2)*(k*r).cos() + (1_f64/16.0)*k.powi(-3)*k.sin()*(k*r).sin()*k.cos()*(k*r).cos() - 1_f64/8.0*k.powi(-2)*r*k.sin()*k.cos()*(k*r).cos().powi(2) + (1_f64/8.0)*k.powi(-2)*r*(k*r).sin()*k.cos().powi(2)*(k*r).cos() + (1_f64/8.0)*k.powi(-2)*r.powi(2)*k.sin()*k.cos()*(k*r).cos().powi(2) - 1_f64/8.0*k.powi(-2)*r.powi(2)*(k*r).sin()*k.cos().powi(2)*(k*r).cos() - 1_f64/24.0*k.recip()*k.sin()*(k*r).sin()*k.cos()*(k*r).cos() - 1_f64/16.0*k.powi(-3)*r*k.sin()*(k*r).sin()*k.cos()*(k*r).cos() + (1_f64/8.0)*k.recip()*r*k.sin()*(k*r).sin()*k.cos()*(k*r).cos() - 1_f64/4.0*k.recip()*r.powi(2)*k.sin()*(k*r).sin()*k.cos()*(k*r).cos() + (1_f64/6.0)*k.recip()*r.powi(3)*k.sin()*(k*r).sin()*k.cos()*(k*r).cos();
    ja + delta * (jb + delta * (jc + delta * jd))
}
