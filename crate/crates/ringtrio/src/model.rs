//! Couplings, the cusp condition linking them to pair quasi-momenta, and
//! the quasi-1D coupling constant from trap geometry.
//!
//! The pair function of the ansatz is cos[k(d - 1/2)] on the ring distance
//! d in [0, 1]; its contact cusp fixes the coupling through
//! g = 2 v k tan(k/2), equivalently k = 2 atan(g / (2 v k)), with
//! k in [0, pi] for repulsive g in [0, inf].

use crate::{Error, Result};
use std::f64::consts::PI;

/// |zeta(1/2)|, the Riemann zeta function at 1/2.
pub const ZETA_HALF_ABS: f64 = 1.460_354_508_809_586_8;

/// Per-pair contact couplings: `g` between the impurity and each majority
/// atom, `g_prime` within the majority pair. Repulsive (nonnegative);
/// `f64::INFINITY` is the Tonks-Girardeau sentinel.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CouplingSet {
    pub g: f64,
    pub g_prime: f64,
}

impl CouplingSet {
    pub fn new(g: f64, g_prime: f64) -> Result<Self> {
        if !(g >= 0.0) || !(g_prime >= 0.0) {
            return Err(Error::Domain(format!(
                "couplings must be nonnegative, got g={g}, g'={g_prime}"
            )));
        }
        Ok(CouplingSet { g, g_prime })
    }

    /// Couplings realizing pair momenta (k, k') at exponent v = 1.
    pub fn from_pair_momenta(k: f64, k_prime: f64) -> Result<Self> {
        Ok(CouplingSet {
            g: g_from_k(k, 1.0)?,
            g_prime: g_from_k(k_prime, 1.0)?,
        })
    }

    pub fn is_integrable(&self) -> bool {
        self.g == self.g_prime
    }
}

/// Harmonic transverse confinement around the ring, lengths in units of
/// the ring circumference.
#[derive(Debug, Clone, Copy)]
pub struct TrapGeometry {
    /// 3-D s-wave scattering length.
    pub a_3d: f64,
    /// Transverse oscillator length.
    pub a_perp: f64,
}

/// Parameters of the pair-product ansatz: pair momenta for the two
/// impurity-majority legs (`k`) and the majority pair (`k_prime`), plus the
/// common variational exponent `v`.
///
/// Consistency with a coupling set means k solves k = 2 atan(g / (2 v k))
/// and k' the same relation with g'.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct JastrowParams {
    pub k: f64,
    pub k_prime: f64,
    pub v: f64,
}

impl JastrowParams {
    pub fn new(k: f64, k_prime: f64, v: f64) -> Result<Self> {
        if !(v > 0.0) {
            return Err(Error::Domain(format!("exponent must be positive, got v={v}")));
        }
        for (name, val) in [("k", k), ("k'", k_prime)] {
            if !(0.0..=PI).contains(&val) {
                return Err(Error::Domain(format!("{name} outside [0, pi]: {val}")));
            }
        }
        Ok(JastrowParams { k, k_prime, v })
    }

    /// Solve both cusp conditions for the given couplings at exponent v.
    pub fn from_couplings(couplings: &CouplingSet, v: f64) -> Result<Self> {
        JastrowParams::new(k_from_g(couplings.g, v)?, k_from_g(couplings.g_prime, v)?, v)
    }

    /// Couplings this parameter set is consistent with.
    pub fn couplings(&self) -> Result<CouplingSet> {
        Ok(CouplingSet {
            g: g_from_k(self.k, self.v)?,
            g_prime: g_from_k(self.k_prime, self.v)?,
        })
    }
}

/// Pair quasi-momentum k in [0, pi] solving k = 2 atan(g / (2 v k)).
///
/// Strictly increasing in g at fixed v, strictly decreasing in v at fixed
/// g > 0. `g = 0` maps to 0 and `g = inf` to pi exactly.
pub fn k_from_g(g: f64, v: f64) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::Domain(format!("exponent must be positive, got v={v}")));
    }
    if !(g >= 0.0) {
        return Err(Error::Domain(format!("coupling must be nonnegative, got g={g}")));
    }
    if g == 0.0 {
        return Ok(0.0);
    }
    if g.is_infinite() {
        return Ok(PI);
    }
    // F(k) = 2 v k tan(k/2) - g is strictly increasing on (0, pi) with
    // F(0+) = -g and F(pi-) = +inf; bisection cannot escape the bracket.
    let f = |k: f64| 2.0 * v * k * (0.5 * k).tan() - g;
    let mut lo = 0.0_f64;
    let mut hi = PI * (1.0 - 1e-16);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut k = 0.5 * (lo + hi);
    // Newton polish; the derivative is positive on the bracket.
    for _ in 0..4 {
        let t = (0.5 * k).tan();
        let c = (0.5 * k).cos();
        let df = 2.0 * v * t + v * k / (c * c);
        let step = f(k) / df;
        let next = k - step;
        if next > lo && next < hi {
            k = next;
        }
    }
    // Near k = pi the slope of F reaches ~g^2, so the F-residual of the
    // best representable k grows with g; the Newton step measures the
    // remaining error in k itself and stays at machine precision.
    let t = (0.5 * k).tan();
    let c = (0.5 * k).cos();
    let step = ((2.0 * v * k * t - g) / (2.0 * v * t + v * k / (c * c))).abs();
    if !(step < 1e-12) {
        return Err(Error::Numerics(format!(
            "cusp solve left error {step:.3e} in k at g={g}, v={v}"
        )));
    }
    Ok(k)
}

/// Coupling g = 2 v k tan(k/2) for k in [0, pi]; returns `f64::INFINITY`
/// at k = pi.
pub fn g_from_k(k: f64, v: f64) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::Domain(format!("exponent must be positive, got v={v}")));
    }
    if !(0.0..=PI).contains(&k) {
        return Err(Error::Domain(format!("pair momentum outside [0, pi]: k={k}")));
    }
    if k == PI {
        return Ok(f64::INFINITY);
    }
    Ok(2.0 * v * k * (0.5 * k).tan())
}

/// Effective 1-D coupling from transverse confinement,
/// g = (2 a_3d / a_perp^2) / (1 - |zeta(1/2)| a_3d / (sqrt(2) a_perp)),
/// in units hbar^2 / (M L).
///
/// Errors at and beyond the confinement-induced resonance, where the
/// denominator is nonpositive.
pub fn g1d_from_geometry(geom: TrapGeometry) -> Result<f64> {
    if !(geom.a_3d > 0.0) || !(geom.a_perp > 0.0) {
        return Err(Error::Domain(format!(
            "lengths must be positive, got a_3d={}, a_perp={}",
            geom.a_3d, geom.a_perp
        )));
    }
    let denom = 1.0 - ZETA_HALF_ABS * geom.a_3d / (2.0_f64.sqrt() * geom.a_perp);
    if denom <= 0.0 {
        return Err(Error::Domain(format!(
            "confinement-induced resonance: a_3d={} >= sqrt(2) a_perp / |zeta(1/2)| = {}",
            geom.a_3d,
            2.0_f64.sqrt() * geom.a_perp / ZETA_HALF_ABS
        )));
    }
    Ok(2.0 * geom.a_3d / (geom.a_perp * geom.a_perp) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cusp_round_trip_log_grid() {
        // 25 log-spaced couplings per exponent, relative closure 1e-10.
        for &v in &[0.5, 1.0, 2.0] {
            for i in 0..25 {
                let g = 10f64.powf(-6.0 + 12.0 * i as f64 / 24.0);
                let k = k_from_g(g, v).unwrap();
                let back = g_from_k(k, v).unwrap();
                assert!(
                    ((back - g) / g).abs() < 1e-10,
                    "round trip failed at g={g}, v={v}: {back}"
                );
            }
        }
    }

    #[test]
    fn k_monotone_in_g_and_v() {
        let mut prev = 0.0;
        for i in 0..60 {
            let g = 10f64.powf(-4.0 + 8.0 * i as f64 / 59.0);
            let k = k_from_g(g, 1.0).unwrap();
            assert!(k > prev, "k not increasing at g={g}");
            assert!((0.0..=PI).contains(&k));
            prev = k;
        }
        let g = 3.0;
        let mut prev = f64::INFINITY;
        for &v in &[0.3, 0.5, 1.0, 2.0, 4.0] {
            let k = k_from_g(g, v).unwrap();
            assert!(k < prev, "k not decreasing in v at v={v}");
            prev = k;
        }
    }

    #[test]
    fn sentinels_and_fixed_points() {
        assert_eq!(k_from_g(0.0, 1.0).unwrap(), 0.0);
        assert_eq!(k_from_g(f64::INFINITY, 1.0).unwrap(), PI);
        assert_eq!(g_from_k(PI, 1.0).unwrap(), f64::INFINITY);
        assert_eq!(g_from_k(0.0, 1.0).unwrap(), 0.0);
        // g(pi/2, v=1) = pi tan(pi/4) = pi.
        assert!((g_from_k(0.5 * PI, 1.0).unwrap() - PI).abs() < 1e-14);
    }

    #[test]
    fn pinned_v1_map_values() {
        let cases = [
            (5.0 * PI / 6.0, 19.540_972_333_137_066_7),
            (PI / 3.0, 1.209_199_576_156_145_23),
            (PI / 6.0, 0.280_595_738_158_977_641),
            (2.5, 15.047_848_369_314_156_4),
            (1.5, 2.794_789_379_832_217_38),
        ];
        for &(k, g) in &cases {
            assert!(
                ((g_from_k(k, 1.0).unwrap() - g) / g).abs() < 1e-14,
                "g_from_k({k}) mismatch"
            );
            assert!(
                (k_from_g(g, 1.0).unwrap() - k).abs() < 1e-12,
                "k_from_g({g}) mismatch"
            );
        }
    }

    #[test]
    fn domain_errors() {
        assert!(k_from_g(-1.0, 1.0).is_err());
        assert!(k_from_g(1.0, 0.0).is_err());
        assert!(g_from_k(3.5, 1.0).is_err());
        assert!(CouplingSet::new(-0.1, 1.0).is_err());
    }

    #[test]
    fn g1d_pinned_value_and_resonance() {
        let g = g1d_from_geometry(TrapGeometry { a_3d: 0.01, a_perp: 1.0 }).unwrap();
        assert!(
            ((g - 0.020_208_680_202_452_740_6) / g).abs() < 1e-14,
            "g1d mismatch: {g}"
        );
        // At the resonance the denominator vanishes.
        let a_res = 2.0_f64.sqrt() / ZETA_HALF_ABS;
        assert!(g1d_from_geometry(TrapGeometry { a_3d: a_res, a_perp: 1.0 }).is_err());
        assert!(g1d_from_geometry(TrapGeometry { a_3d: 2.0 * a_res, a_perp: 1.0 }).is_err());
    }
}
