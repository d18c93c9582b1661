//! Bethe-ansatz ground state of N bosons on the unit ring with equal
//! contact coupling g.
//!
//! Ground-state quasi-momenta solve
//! k_m + sum_n 2 atan((k_m - k_n)/g) = 2 pi (m - (N+1)/2), m = 1..N,
//! and the energy is E = (1/2) sum k_m^2. For N = 3 the symmetric root set
//! {-kappa, 0, kappa} reduces the system to the single equation
//! kappa = 2 [pi - atan(kappa/g) - atan(2 kappa/g)] with kappa in (0, 2 pi].

use crate::{Error, Method, Result};
use crate::{model, EnergyReport};
use std::f64::consts::PI;

/// Quasi-momentum roots, ground energy, and the residual of the solved
/// system.
#[derive(Debug, Clone)]
pub struct BetheSolution {
    pub roots: Vec<f64>,
    /// E = (1/2) sum roots^2.
    pub energy: f64,
    /// Max-norm residual of the Bethe equations at the returned roots.
    pub residual: f64,
    pub coupling: f64,
}

impl BetheSolution {
    pub fn energy_report(&self) -> EnergyReport {
        EnergyReport {
            total: self.energy,
            kinetic: self.energy,
            interaction: 0.0,
            method: Method::Bethe,
        }
    }
}

/// Three-boson ground state at coupling g >= 0 (g = inf gives the
/// Tonks-Girardeau point kappa = 2 pi, E = 4 pi^2 exactly).
pub fn bethe_three_body(g: f64) -> Result<BetheSolution> {
    if !(g >= 0.0) {
        return Err(Error::Domain(format!("coupling must be nonnegative, got g={g}")));
    }
    if g == 0.0 {
        return Ok(BetheSolution { roots: vec![0.0; 3], energy: 0.0, residual: 0.0, coupling: g });
    }
    if g.is_infinite() {
        let kappa = 2.0 * PI;
        return Ok(BetheSolution {
            roots: vec![-kappa, 0.0, kappa],
            energy: kappa * kappa,
            residual: 0.0,
            coupling: g,
        });
    }
    // F(kappa) = kappa - 2 pi + 2 atan(kappa/g) + 2 atan(2 kappa/g) is
    // strictly increasing with F(0) = -2 pi < 0 < F(2 pi).
    let f = |k: f64| k - 2.0 * PI + 2.0 * (k / g).atan() + 2.0 * (2.0 * k / g).atan();
    let mut lo = 0.0_f64;
    let mut hi = 2.0 * PI;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut kappa = 0.5 * (lo + hi);
    for _ in 0..4 {
        let d1 = 1.0 + 2.0 / g / (1.0 + (kappa / g).powi(2)) + 4.0 / g / (1.0 + (2.0 * kappa / g).powi(2));
        kappa -= f(kappa) / d1;
    }
    let residual = f(kappa).abs();
    if residual > 1e-12 {
        return Err(Error::Numerics(format!("three-body root residual {residual:.3e} at g={g}")));
    }
    Ok(BetheSolution {
        roots: vec![-kappa, 0.0, kappa],
        energy: kappa * kappa,
        residual,
        coupling: g,
    })
}

/// Ground state of N bosons at coupling g, by Newton iteration with
/// continuation from the free-fermion seed at large g.
///
/// The seed k_m = 2 pi (m - (N+1)/2) solves the system at g = inf; g is
/// then lowered in log steps, reusing the previous roots as the next seed.
pub fn bethe_general(g: f64, n: usize) -> Result<BetheSolution> {
    if n < 2 {
        return Err(Error::Domain(format!("need at least two particles, got n={n}")));
    }
    if !(g >= 0.0) {
        return Err(Error::Domain(format!("coupling must be nonnegative, got g={g}")));
    }
    let seed: Vec<f64> = (1..=n)
        .map(|m| 2.0 * PI * (m as f64 - 0.5 * (n as f64 + 1.0)))
        .collect();
    if g == 0.0 {
        return Ok(BetheSolution { roots: vec![0.0; n], energy: 0.0, residual: 0.0, coupling: g });
    }
    if g.is_infinite() {
        let energy = 0.5 * seed.iter().map(|k| k * k).sum::<f64>();
        return Ok(BetheSolution { roots: seed, energy, residual: 0.0, coupling: g });
    }
    let g_start = 1e8_f64.max(g);
    let steps = (4.0 * (g_start / g).log10()).ceil().max(1.0) as usize;
    let mut roots = seed;
    for step in 0..=steps {
        let g_cur = g_start * (g / g_start).powf(step as f64 / steps as f64);
        newton_solve(&mut roots, g_cur, n)?;
    }
    let residual = residual_norm(&roots, g, n);
    if residual > 1e-10 {
        return Err(Error::Numerics(format!(
            "Bethe residual {residual:.3e} after continuation at g={g}, n={n}"
        )));
    }
    let energy = 0.5 * roots.iter().map(|k| k * k).sum::<f64>();
    Ok(BetheSolution { roots, energy, residual, coupling: g })
}

/// Two-boson ground energy E = k^2 with 2 k tan(k/2) = g.
pub fn two_body_energy(g: f64) -> Result<EnergyReport> {
    let k = model::k_from_g(g, 1.0)?;
    Ok(EnergyReport { total: k * k, kinetic: k * k, interaction: 0.0, method: Method::Bethe })
}

fn bethe_residuals(roots: &[f64], g: f64, n: usize, out: &mut [f64]) {
    for m in 0..n {
        let target = 2.0 * PI * ((m + 1) as f64 - 0.5 * (n as f64 + 1.0));
        let mut s = roots[m];
        for j in 0..n {
            if j != m {
                s += 2.0 * ((roots[m] - roots[j]) / g).atan();
            }
        }
        out[m] = s - target;
    }
}

fn residual_norm(roots: &[f64], g: f64, n: usize) -> f64 {
    let mut r = vec![0.0; n];
    bethe_residuals(roots, g, n, &mut r);
    r.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
}

fn newton_solve(roots: &mut [f64], g: f64, n: usize) -> Result<()> {
    let mut res = vec![0.0; n];
    let mut jac = vec![0.0; n * n];
    for _ in 0..50 {
        bethe_residuals(roots, g, n, &mut res);
        if res.iter().all(|r| r.abs() < 1e-13) {
            return Ok(());
        }
        for m in 0..n {
            let mut diag = 1.0;
            for j in 0..n {
                if j != m {
                    let w = 2.0 / g / (1.0 + ((roots[m] - roots[j]) / g).powi(2));
                    jac[m * n + j] = -w;
                    diag += w;
                }
            }
            jac[m * n + m] = diag;
        }
        let mut rhs = res.clone();
        solve_dense(&mut jac, &mut rhs, n)?;
        for m in 0..n {
            roots[m] -= rhs[m];
        }
    }
    let norm = residual_norm(roots, g, n);
    if norm < 1e-10 {
        Ok(())
    } else {
        Err(Error::Numerics(format!("Newton stalled at g={g}, residual {norm:.3e}")))
    }
}

/// Gaussian elimination with partial pivoting; `a` is row-major n x n and
/// is destroyed, `b` is replaced by the solution.
fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Result<()> {
    for col in 0..n {
        let mut piv = col;
        for row in col + 1..n {
            if a[row * n + col].abs() > a[piv * n + col].abs() {
                piv = row;
            }
        }
        if a[piv * n + col].abs() < 1e-300 {
            return Err(Error::Numerics("singular Jacobian".into()));
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            b.swap(col, piv);
        }
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            for j in col..n {
                a[row * n + j] -= f * a[col * n + j];
            }
            b[row] -= f * b[col];
        }
    }
    for row in (0..n).rev() {
        let mut s = b[row];
        for j in row + 1..n {
            s -= a[row * n + j] * b[j];
        }
        b[row] = s / a[row * n + row];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_body_pinned_roots() {
        let cases = [
            (1.0, 1.665_100_243_242_426_246, 2.772_558_820_045_987_05),
            (5.0, 3.281_875_021_150_235_46, 10.770_703_654_449_858_5),
            (10.0, 4.122_242_067_811_133_14, 16.992_879_665_631_806_8),
            (50.0, 5.617_379_782_397_465_52, 31.554_955_619_687_797_1),
        ];
        for &(g, kappa, energy) in &cases {
            let sol = bethe_three_body(g).unwrap();
            assert!((sol.roots[2] - kappa).abs() < 1e-12, "kappa mismatch at g={g}");
            assert!(((sol.energy - energy) / energy).abs() < 1e-13, "E mismatch at g={g}");
            assert!(sol.residual < 1e-12);
        }
    }

    #[test]
    fn tonks_girardeau_exact() {
        let sol = bethe_three_body(f64::INFINITY).unwrap();
        assert_eq!(sol.roots[2], 2.0 * PI);
        assert!((sol.energy - 4.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn general_matches_three_body_on_log_grid() {
        for i in 0..50 {
            let g = 10f64.powf(-2.0 + 6.0 * i as f64 / 49.0);
            let a = bethe_three_body(g).unwrap().energy;
            let b = bethe_general(g, 3).unwrap().energy;
            assert!(
                ((a - b) / a.max(1e-12)).abs() < 1e-9,
                "N=3 consistency failed at g={g}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn general_pinned_roots_n4_n5() {
        let s5 = bethe_general(10.0, 5).unwrap();
        assert!(((s5.energy - 62.407_469_308_682_461_3) / s5.energy).abs() < 1e-12);
        assert!((s5.roots[2]).abs() < 1e-10);
        assert!((s5.roots[3] - 3.471_007_855_703_528_09).abs() < 1e-10);
        assert!((s5.roots[4] - 7.096_447_968_831_086_78).abs() < 1e-10);

        let s4 = bethe_general(2.0, 4).unwrap();
        assert!(((s4.energy - 10.400_792_157_526_657_4) / s4.energy).abs() < 1e-12);
        assert!((s4.roots[2] - 0.980_829_640_964_191_366).abs() < 1e-10);
        assert!((s4.roots[3] - 3.072_257_374_135_948_41).abs() < 1e-10);
    }

    #[test]
    fn energy_monotone_in_g() {
        let mut prev = -1.0;
        for i in 0..30 {
            let g = 10f64.powf(-2.0 + 5.0 * i as f64 / 29.0);
            let e = bethe_three_body(g).unwrap().energy;
            assert!(e > prev, "energy not increasing at g={g}");
            prev = e;
        }
        assert!(prev < 4.0 * PI * PI);
    }

    #[test]
    fn two_body_pinned() {
        let e1 = two_body_energy(1.0).unwrap().total;
        assert!(((e1 - 0.921_962_673_589_738_776) / e1).abs() < 1e-13);
        let e10 = two_body_energy(10.0).unwrap().total;
        assert!(((e10 - 5.218_728_751_143_930_97) / e10).abs() < 1e-13);
        // k(1) pinned directly as well.
        let k = crate::model::k_from_g(1.0, 1.0).unwrap();
        assert!((k - 0.960_188_873_914_782_859).abs() < 1e-12);
    }
}
