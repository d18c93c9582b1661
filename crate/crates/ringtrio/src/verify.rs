//! Cross-validation harness: every closed form is checked against an
//! independent numerical route, and deliberately corrupted variants of
//! the formulas are checked to fail, so a silent transcription slip in
//! either direction cannot survive a clean report.
//!
//! Checks gate on implementation invariants only. Physics-level gaps
//! between the ansatz and the oracle are reported as metrics: they
//! measure the ansatz, not the code.

use crate::bethe::{bethe_general, bethe_three_body};
use crate::jastrow::{
    self, jastrow_energy, norm_c2, pair_corr_im, pair_corr_mm, transition_kprime_star,
};
use crate::model::{g_from_k, k_from_g, CouplingSet, JastrowParams};
use crate::quad::{
    cusp_residual, norm_quadrature, pair_marginal_at, sector_consistency_residual,
    variational_energy, QuadratureConfig,
};
use crate::varopt::{optimize_v, stability_scan};
use crate::{PairKind, Result};
use std::f64::consts::PI;
use std::fmt::Write as _;

#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Bound the measured value is held to (direction given by the name).
    pub tolerance: f64,
    pub measured: f64,
    pub detail: String,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct MetricEntry {
    pub name: String,
    pub value: f64,
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaRowKind {
    /// Closed form that must match its numerical reference.
    Accepted,
    /// Corrupted variant that must be distinguishable from the reference.
    Mutation,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FormulaRow {
    pub formula: String,
    /// Brute-force quadrature value.
    pub reference: f64,
    /// Closed-form (or corrupted closed-form) value.
    pub analytic: f64,
    pub deviation: f64,
    pub kind: FormulaRowKind,
    pub passed: bool,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct VerifyReport {
    pub quick: bool,
    pub checks: Vec<CheckResult>,
    pub formula_rows: Vec<FormulaRow>,
    pub metrics: Vec<MetricEntry>,
    pub passed: bool,
    pub elapsed_seconds: f64,
}

impl VerifyReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mode = if self.quick { "quick" } else { "full" };
        let _ = writeln!(out, "verification report ({mode} mode)");
        let _ = writeln!(out);
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "[{tag}] {:<44} tol {:>10.3e}  measured {:>10.3e}  {}",
                c.name, c.tolerance, c.measured, c.detail
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "closed-form cross-checks (reference = quadrature):");
        for r in &self.formula_rows {
            let tag = match (r.kind, r.passed) {
                (FormulaRowKind::Accepted, true) => "match",
                (FormulaRowKind::Accepted, false) => "MISMATCH",
                (FormulaRowKind::Mutation, true) => "detected",
                (FormulaRowKind::Mutation, false) => "UNDETECTED",
            };
            let _ = writeln!(
                out,
                "  {tag:<10} {:<52} ref {:>18.12e}  got {:>18.12e}  dev {:>9.3e}",
                r.formula, r.reference, r.analytic, r.deviation
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "metrics (informational, not gated):");
        for m in &self.metrics {
            let _ = writeln!(out, "  {:<44} {:>14.6e}  {}", m.name, m.value, m.note);
        }
        let _ = writeln!(out);
        let verdict = if self.passed { "all checks passed" } else { "CHECKS FAILED" };
        let _ = writeln!(out, "{verdict} in {:.1} s", self.elapsed_seconds);
        out
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-12)
}

struct Harness {
    checks: Vec<CheckResult>,
    formula_rows: Vec<FormulaRow>,
    metrics: Vec<MetricEntry>,
}

impl Harness {
    fn check(&mut self, name: &str, tolerance: f64, measured: f64, detail: String) {
        self.checks.push(CheckResult {
            name: name.into(),
            passed: measured < tolerance,
            tolerance,
            measured,
            detail,
        });
    }

    fn check_with(&mut self, name: &str, tolerance: f64, measured: f64, passed: bool, detail: String) {
        self.checks.push(CheckResult { name: name.into(), passed, tolerance, measured, detail });
    }

    fn metric(&mut self, name: &str, value: f64, note: String) {
        self.metrics.push(MetricEntry { name: name.into(), value, note });
    }
}

/// Closed forms against brute-force quadrature, plus corrupted variants
/// that must visibly fail. perturb_c2 multiplies the analytic C^2 by
/// (1 + perturb_c2) to demonstrate the check has teeth.
pub fn formula_report(perturb_c2: f64) -> Result<Vec<FormulaRow>> {
    let cfg = QuadratureConfig::default();
    let mut rows = Vec::new();
    let grid = [(PI / 3.0, PI / 3.0), (5.0 * PI / 6.0, PI / 3.0), (1.1, 2.2)];
    for (k, kp) in grid {
        let params = JastrowParams::new(k, kp, 1.0)?;
        let (norm, _) = norm_quadrature(&params, &cfg)?;
        let ref_c2 = 1.0 / norm;
        let analytic = norm_c2(k, kp)? * (1.0 + perturb_c2);
        rows.push(FormulaRow {
            formula: format!("norm C^2 at (k={k:.4}, k'={kp:.4})"),
            reference: ref_c2,
            analytic,
            deviation: rel(analytic, ref_c2),
            kind: FormulaRowKind::Accepted,
            passed: rel(analytic, ref_c2) < 1e-7,
        });
        let couplings = CouplingSet::from_pair_momenta(k, kp)?;
        let ref_e = variational_energy(&params, &couplings, &cfg)?.report.total;
        let analytic_e = jastrow_energy(k, kp)?.total;
        rows.push(FormulaRow {
            formula: format!("energy at (k={k:.4}, k'={kp:.4})"),
            reference: ref_e,
            analytic: analytic_e,
            deviation: rel(analytic_e, ref_e),
            kind: FormulaRowKind::Accepted,
            passed: rel(analytic_e, ref_e) < 1e-6,
        });
        for (kind, label, value) in [
            (PairKind::MajorityMajority, "mm", pair_corr_mm(0.3, k, kp)?),
            (PairKind::ImpurityMajority, "im", pair_corr_im(0.3, k, kp)?),
        ] {
            let (reference, _) = pair_marginal_at(&params, kind, 0.3, &cfg)?;
            rows.push(FormulaRow {
                formula: format!("pair corr {label}(0.3) at (k={k:.4}, k'={kp:.4})"),
                reference,
                analytic: value,
                deviation: rel(value, reference),
                kind: FormulaRowKind::Accepted,
                passed: rel(value, reference) < 1e-7,
            });
        }
    }
    // Corrupted variants at one generic point. Each must deviate by at
    // least 1e-3 so the equivalence checks above cannot pass by luck.
    let (k, q) = (5.0 * PI / 6.0, PI / 3.0);
    let params = JastrowParams::new(k, q, 1.0)?;
    let couplings = CouplingSet::from_pair_momenta(k, q)?;
    let ref_e = variational_energy(&params, &couplings, &cfg)?.report.total;
    // Energy with the bracket prefactor 6 k^3 q^2 misread as (3/2) k^3 q^2.
    let e_gen = jastrow::energy_generic(k, q);
    let mutant_e = 2.0 * k * k + q * q + (e_gen - 2.0 * k * k - q * q) / 4.0;
    rows.push(FormulaRow {
        formula: "mutation: energy bracket prefactor quartered".into(),
        reference: ref_e,
        analytic: mutant_e,
        deviation: rel(mutant_e, ref_e),
        kind: FormulaRowKind::Mutation,
        passed: rel(mutant_e, ref_e) >= 1e-3,
    });
    // Normalization with the 4 k' factor dropped from the denominator.
    let (norm, _) = norm_quadrature(&params, &cfg)?;
    let ref_c2 = 1.0 / norm;
    let mutant_c2 = norm_c2(k, q)? / (4.0 * q);
    rows.push(FormulaRow {
        formula: "mutation: norm denominator missing 4 k'".into(),
        reference: ref_c2,
        analytic: mutant_c2,
        deviation: rel(mutant_c2, ref_c2),
        kind: FormulaRowKind::Mutation,
        passed: rel(mutant_c2, ref_c2) >= 1e-3,
    });
    // Impurity-majority marginal with sin k' flipped to -sin k'.
    let (ref_im, _) = pair_marginal_at(&params, PairKind::ImpurityMajority, 0.3, &cfg)?;
    let f = jastrow::pair_function(0.3, k);
    let xi = jastrow::xi_marginal_im(0.3, k, q) - q.sin() / (2.0 * q);
    let mutant_im = f * f * xi / jastrow::norm_integral(k, q)?;
    rows.push(FormulaRow {
        formula: "mutation: im marginal with sin k' sign flipped".into(),
        reference: ref_im,
        analytic: mutant_im,
        deviation: rel(mutant_im, ref_im),
        kind: FormulaRowKind::Mutation,
        passed: rel(mutant_im, ref_im) >= 1e-3,
    });
    Ok(rows)
}

/// Run the invariant suite. Quick mode covers every closed-form and
/// quadrature invariant on reduced grids; full mode adds the
/// diagonalization oracle and the variational optimizer.
pub fn run_verify(quick: bool, perturb_c2: f64) -> Result<VerifyReport> {
    let start = std::time::Instant::now();
    let mut h = Harness { checks: Vec::new(), formula_rows: Vec::new(), metrics: Vec::new() };
    let cfg = QuadratureConfig::default();

    // Coupling relation round trip over a log grid in g.
    let mut worst = 0.0_f64;
    for i in 0..=24 {
        let g = 10.0_f64.powf(-3.0 + 0.25 * i as f64);
        for v in [0.5, 1.0, 2.0] {
            let k = k_from_g(g, v)?;
            worst = worst.max((g_from_k(k, v)? - g).abs() / g.max(1.0));
        }
    }
    h.check("coupling round trip g -> k -> g", 1e-10, worst, "log grid g in [1e-3, 1e3]".into());

    // Bethe solver residuals and the exact TG point.
    let mut worst = 0.0_f64;
    for g in [1.0, 10.0, 100.0] {
        worst = worst.max(bethe_three_body(g)?.residual);
        worst = worst.max(rel(bethe_general(g, 3)?.energy, bethe_three_body(g)?.energy));
    }
    h.check("bethe residuals and n=3 agreement", 1e-10, worst, "g in {1, 10, 100}".into());
    let tg = bethe_three_body(f64::INFINITY)?.energy;
    h.check("bethe TG point 4 pi^2", 1e-14, rel(tg, 4.0 * PI * PI), String::new());
    let anchor = jastrow_energy(PI, PI)?.total;
    h.check("ansatz TG anchor 4 pi^2", 1e-9, rel(anchor, 4.0 * PI * PI), String::new());

    // Closed forms against quadrature, with mutation sensitivity.
    let rows = formula_report(perturb_c2)?;
    let worst_accepted = rows
        .iter()
        .filter(|r| r.kind == FormulaRowKind::Accepted && r.formula.starts_with("norm"))
        .map(|r| r.deviation)
        .fold(0.0, f64::max);
    h.check("norm_c2 quadrature equivalence", 1e-7, worst_accepted, "3-point (k, k') grid".into());
    let worst_energy = rows
        .iter()
        .filter(|r| r.kind == FormulaRowKind::Accepted && r.formula.starts_with("energy"))
        .map(|r| r.deviation)
        .fold(0.0, f64::max);
    h.check("energy quadrature equivalence", 1e-6, worst_energy, "3-point (k, k') grid".into());
    let worst_corr = rows
        .iter()
        .filter(|r| r.kind == FormulaRowKind::Accepted && r.formula.starts_with("pair"))
        .map(|r| r.deviation)
        .fold(0.0, f64::max);
    h.check("pair correlation quadrature equivalence", 1e-7, worst_corr, "both kinds".into());
    let min_mutation = rows
        .iter()
        .filter(|r| r.kind == FormulaRowKind::Mutation)
        .map(|r| r.deviation)
        .fold(f64::INFINITY, f64::min);
    h.check_with(
        "mutation sensitivity of the equivalence checks",
        1e-3,
        min_mutation,
        min_mutation >= 1e-3,
        "corrupted variants must deviate".into(),
    );
    h.formula_rows = rows;

    // Branch continuity across the integrable line.
    let mut worst_e = 0.0_f64;
    let mut worst_c = 0.0_f64;
    let mut worst_i = 0.0_f64;
    for i in 1..=30 {
        let k = 3.04 * i as f64 / 30.0;
        worst_e = worst_e.max(rel(jastrow_energy(k, k + 1e-6)?.total, jastrow_energy(k, k)?.total));
        worst_c = worst_c.max(rel(norm_c2(k, k + 1e-6)?, norm_c2(k, k)?));
        worst_i = worst_i.max(rel(pair_corr_im(0.3, k, k + 1e-6)?, pair_corr_im(0.3, k, k)?));
    }
    h.check("branch continuity at k' = k + 1e-6", 1e-3, worst_e.max(worst_c).max(worst_i), "energy, norm, im marginal".into());
    let mut worst = 0.0_f64;
    for k in [0.7, 1.4, 2.1, 2.8] {
        worst = worst.max(rel(jastrow::energy_series(k, 1e-4), jastrow::energy_generic(k, k + 1e-4)));
        worst = worst.max(rel(jastrow::norm_series(k, 1e-4), jastrow::norm_generic(k, k + 1e-4)));
    }
    h.check("series vs generic branch at |k - k'| = 1e-4", 1e-6, worst, String::new());
    let mut worst = 0.0_f64;
    for i in 0..30 {
        // The closed N/D form loses digits below k ~ 0.5 to cancellation;
        // the series branch owns that region.
        let k = 0.5 + (PI - 0.5) * i as f64 / 29.0;
        worst = worst.max(rel(jastrow::energy_integrable_nd(k), jastrow_energy(k, k)?.total));
    }
    h.check("integrable closed form vs series branch", 1e-10, worst, "k in [0.5, pi]".into());

    // Marginal normalization by Simpson on 201 points.
    let mut worst = 0.0_f64;
    for (k, kp) in [(PI / 2.0, PI / 2.0), (5.0 * PI / 6.0, PI / 3.0), (0.6, 2.9)] {
        for kind in [PairKind::MajorityMajority, PairKind::ImpurityMajority] {
            let n = 200;
            let mut s = 0.0;
            for i in 0..=n {
                let r = i as f64 / n as f64;
                let v = match kind {
                    PairKind::MajorityMajority => pair_corr_mm(r, k, kp)?,
                    PairKind::ImpurityMajority => pair_corr_im(r, k, kp)?,
                };
                let w = if i == 0 || i == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                s += w * v;
            }
            worst = worst.max((s / (3.0 * n as f64) - 1.0).abs());
        }
    }
    h.check("marginal normalization", 1e-8, worst, "Simpson, 201 points".into());

    // Exchange symmetry of the integrable marginals.
    let mut worst = 0.0_f64;
    for k in [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, PI] {
        for i in 0..=100 {
            let r = i as f64 / 100.0;
            worst = worst.max((pair_corr_mm(r, k, k)? - pair_corr_im(r, k, k)?).abs());
        }
    }
    h.check("integrable mm = im identity", 1e-10, worst, "101-point grid, 4 momenta".into());

    // Marginal reflection symmetry and positivity.
    let mut worst_sym = 0.0_f64;
    let mut min_val = f64::INFINITY;
    for (k, kp) in [(2.0, 1.0), (PI, PI), (0.5, 3.0)] {
        for i in 0..=50 {
            let r = i as f64 / 50.0;
            worst_sym = worst_sym.max((pair_corr_mm(r, k, kp)? - pair_corr_mm(1.0 - r, k, kp)?).abs());
            min_val = min_val.min(pair_corr_mm(r, k, kp)?).min(pair_corr_im(r, k, kp)?);
        }
    }
    h.check("marginal reflection symmetry", 1e-10, worst_sym, String::new());
    h.check_with("marginal positivity", 0.0, min_val, min_val >= 0.0, "minimum sampled value".into());

    // Transition self-consistency: equal marginal at r = 1/2 and 1/3.
    let mut worst = 0.0_f64;
    for i in 0..=8 {
        let k = 0.3 + (PI - 0.31) * i as f64 / 8.0;
        let kps = transition_kprime_star(k)?;
        worst = worst.max((pair_corr_mm(0.5, k, kps)? - pair_corr_mm(1.0 / 3.0, k, kps)?).abs());
    }
    h.check("transition curve self-consistency", 1e-8, worst, "rho(1/2) = rho(1/3) at k'*".into());

    // Quadrature internals: sector decomposition, cusp conditions, grid
    // refinement behavior.
    // The 12-fold tiling identity needs the exchange-symmetric state, so
    // the sector probe runs on integrable couplings only; the cusp probe
    // covers a mixed pair as well.
    let mut worst_sector = 0.0_f64;
    let mut worst_cusp = 0.0_f64;
    for v in [1.0, 0.8] {
        let params = JastrowParams::from_couplings(&CouplingSet::new(6.0, 6.0)?, v)?;
        worst_sector = worst_sector.max(sector_consistency_residual(&params, &cfg)?);
        worst_cusp = worst_cusp.max(cusp_residual(&params)?);
    }
    let mixed = JastrowParams::from_couplings(&CouplingSet::new(9.0, 2.0)?, 1.2)?;
    worst_cusp = worst_cusp.max(cusp_residual(&mixed)?);
    h.check("sector decomposition consistency", 1e-9, worst_sector, "12-fold tiling vs full torus".into());
    h.check("contact cusp conditions", 1e-8, worst_cusp, "both pair kinds, mixed couplings included".into());
    let refine_params = JastrowParams::new(2.0, 1.0, 0.85)?;
    let refine_couplings = refine_params.couplings()?;
    let coarse = variational_energy(
        &refine_params,
        &refine_couplings,
        &QuadratureConfig { points_per_dim: 16, ..Default::default() },
    )?;
    let fine = variational_energy(&refine_params, &refine_couplings, &cfg)?;
    h.check_with(
        "quadrature error decreases under refinement",
        0.0,
        fine.error,
        fine.error <= coarse.error || fine.error < 1e-12,
        format!("{:.2e} -> {:.2e}", coarse.error, fine.error),
    );

    // Bit-level determinism of a repeated pipeline.
    let det_params = JastrowParams::new(2.0, 1.0, 0.9)?;
    let det_couplings = det_params.couplings()?;
    let a = variational_energy(&det_params, &det_couplings, &cfg)?;
    let b = variational_energy(&det_params, &det_couplings, &cfg)?;
    let (ma, _) = pair_marginal_at(&JastrowParams::new(2.5, 1.5, 1.1)?, PairKind::MajorityMajority, 0.4, &cfg)?;
    let (mb, _) = pair_marginal_at(&JastrowParams::new(2.5, 1.5, 1.1)?, PairKind::MajorityMajority, 0.4, &cfg)?;
    let identical = a.report.total.to_bits() == b.report.total.to_bits() && ma.to_bits() == mb.to_bits();
    h.check_with(
        "repeated evaluation is bit-identical",
        0.0,
        if identical { 0.0 } else { 1.0 },
        identical,
        String::new(),
    );

    // Stability slope trend.
    let scan = stability_scan(&[0.5, 3.0])?;
    h.check_with(
        "stability slope larger at k=0.5 than k=3.0",
        0.0,
        scan.slope[1].abs() / scan.slope[0].abs(),
        scan.slope[0].abs() > scan.slope[1].abs(),
        format!("{:.4} vs {:.4}", scan.slope[0], scan.slope[1]),
    );

    // Ansatz-quality metrics on the integrable line (informational).
    let ks: &[f64] = if quick { &[1.0, 2.0, 2.5, 3.0] } else { &[0.4, 0.8, 1.2, 1.6, 2.0, 2.3, 2.5, 2.65, 2.8, 3.0] };
    let mut max_dev = 0.0_f64;
    let mut arg_max = 0.0_f64;
    for &k in ks {
        let eb = bethe_three_body(g_from_k(k, 1.0)?)?.energy;
        let dev = jastrow_energy(k, k)?.total / eb - 1.0;
        if dev > max_dev {
            max_dev = dev;
            arg_max = k;
        }
    }
    h.metric(
        "max ansatz energy deviation vs exact (v = 1)",
        max_dev,
        format!("at k = {arg_max}; ansatz accuracy, not a code property"),
    );

    if !quick {
        full_checks(&mut h, &cfg)?;
    }

    let passed = h.checks.iter().all(|c| c.passed) && h.formula_rows.iter().all(|r| r.passed);
    Ok(VerifyReport {
        quick,
        checks: h.checks,
        formula_rows: h.formula_rows,
        metrics: h.metrics,
        passed,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

fn full_checks(h: &mut Harness, cfg: &QuadratureConfig) -> Result<()> {
    // Variational optimizer on the integrable line: the optimum improves
    // on v = 1 and sits below it.
    let mut worst_gain = f64::INFINITY;
    let mut max_dev_var = 0.0_f64;
    for k in [1.0, 2.0, 2.65, 3.0] {
        let couplings = CouplingSet::from_pair_momenta(k, k)?;
        let res = optimize_v(&couplings, cfg)?;
        let e_v1 = jastrow_energy(k, k)?.total;
        worst_gain = worst_gain.min((e_v1 - res.energy.total) / e_v1);
        let eb = bethe_three_body(g_from_k(k, 1.0)?)?.energy;
        max_dev_var = max_dev_var.max(res.energy.total / eb - 1.0);
        if res.v_opt >= 1.0 {
            h.check_with(
                "integrable optimum below v = 1",
                1.0,
                res.v_opt,
                false,
                format!("v_opt = {} at k = {k}", res.v_opt),
            );
        }
    }
    h.check_with(
        "optimization improves on the plain ansatz",
        0.0,
        worst_gain,
        worst_gain > -1e-12,
        "relative energy gain, integrable line".into(),
    );
    h.metric(
        "max optimized deviation vs exact",
        max_dev_var,
        "ansatz accuracy after optimizing the exponent".into(),
    );

    #[cfg(feature = "ed")]
    oracle_checks(h, cfg)?;
    #[cfg(not(feature = "ed"))]
    h.metric(
        "oracle cross-checks",
        f64::NAN,
        "skipped: built without the ed feature".into(),
    );
    Ok(())
}

#[cfg(feature = "ed")]
fn oracle_checks(h: &mut Harness, cfg: &QuadratureConfig) -> Result<()> {
    use crate::ed::{ed_energy, EDConfig};
    let ed_cfg = EDConfig {
        n_max: 24,
        extrapolate: true,
        n_max_sequence: vec![12, 16, 20, 24],
        ..Default::default()
    };
    // Integrable line: two independent exact routes must meet.
    let mut worst = 0.0_f64;
    let mut worst_v1_band = 0.0_f64;
    for g in [1.0, 5.0, 10.0, 50.0] {
        let couplings = CouplingSet::new(g, g)?;
        let res = ed_energy(&couplings, 3, &ed_cfg)?;
        let ex = res.extrapolated_energy.expect("extrapolation requested");
        let eb = bethe_three_body(g)?.energy;
        worst = worst.max(rel(ex, eb));
        let k = k_from_g(g, 1.0)?;
        worst_v1_band = worst_v1_band.max((jastrow_energy(k, k)?.total / ex - 1.0).abs());
    }
    h.check("oracle vs exact energy, integrable", 5e-4, worst, "g in {1, 5, 10, 50}".into());
    h.check("ansatz vs oracle within error band", 4e-3, worst_v1_band, "twice the closed-form bound".into());

    // Non-integrable: the optimized energy stays an upper bound on the
    // oracle within its extrapolation uncertainty; the actual gap is an
    // ansatz property and is reported, not gated.
    let mut worst_bound = f64::INFINITY;
    let mut max_gap = 0.0_f64;
    for (k, kp) in [(5.0 * PI / 6.0, PI / 3.0), (PI / 3.0, 5.0 * PI / 6.0), (PI / 2.0, PI / 6.0)] {
        let couplings = CouplingSet::from_pair_momenta(k, kp)?;
        let var = optimize_v(&couplings, cfg)?;
        let res = ed_energy(&couplings, 3, &ed_cfg)?;
        let ex = res.extrapolated_energy.expect("extrapolation requested");
        let unc = res.extrapolation_uncertainty.unwrap_or(0.0);
        worst_bound = worst_bound.min(var.energy.total - (ex - 3.0 * unc));
        max_gap = max_gap.max((var.energy.total - ex).abs() / ex);
    }
    h.check_with(
        "variational energy bounds the oracle",
        0.0,
        worst_bound,
        worst_bound > 0.0,
        "margin above extrapolated - 3 sigma".into(),
    );
    h.metric(
        "max optimized vs oracle gap, non-integrable",
        max_gap,
        "ansatz accuracy off the integrable line".into(),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_report_passes_clean() {
        let report = run_verify(true, 0.0).unwrap();
        assert!(report.passed, "failing checks: {}", report.render());
        assert!(report.quick);
        assert!(report.checks.len() >= 15);
        assert!(report.formula_rows.iter().any(|r| r.kind == FormulaRowKind::Mutation));
    }

    #[test]
    fn perturbed_norm_fails_by_name() {
        let report = run_verify(true, 0.01).unwrap();
        assert!(!report.passed);
        let failed: Vec<&CheckResult> = report.checks.iter().filter(|c| !c.passed).collect();
        assert!(
            failed.iter().any(|c| c.name == "norm_c2 quadrature equivalence"),
            "failures: {:?}",
            failed.iter().map(|c| &c.name).collect::<Vec<_>>()
        );
        // Nothing else breaks: the perturbation is confined to one check.
        assert!(failed.iter().all(|c| c.name == "norm_c2 quadrature equivalence"));
    }

    #[test]
    fn render_lists_every_check() {
        let report = run_verify(true, 0.0).unwrap();
        let text = report.render();
        for c in &report.checks {
            assert!(text.contains(&c.name), "missing {}", c.name);
        }
        assert!(text.contains("all checks passed"));
    }
}
