//! Browser bindings for the ringtrio library. Every export takes plain
//! numbers and returns a JSON string, so the page needs no glue types;
//! failures come back as `{"error": "..."}` instead of a thrown exception.
//! The functions are ordinary Rust on native targets, which is where the
//! unit tests run.

use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

use ringtrio::model::{g_from_k, JastrowParams};
use ringtrio::quad::{self, JacobiFrame, QuadratureConfig};
use ringtrio::{bethe, jastrow, linspace};

fn error_json(message: String) -> String {
    serde_json::json!({ "error": message }).to_string()
}

fn to_json<T: Serialize>(payload: &T) -> String {
    serde_json::to_string(payload).unwrap_or_else(|e| error_json(e.to_string()))
}

#[derive(Serialize)]
struct CorrelationCurves {
    k: f64,
    k_prime: f64,
    g: f64,
    g_prime: f64,
    r: Vec<f64>,
    mm: Vec<f64>,
    im: Vec<f64>,
}

/// Pair correlation curves of the v = 1 ansatz on `resolution` separations
/// in [0, 1]: majority-majority and impurity-majority marginals, plus the
/// couplings the momenta correspond to.
#[wasm_bindgen]
pub fn correlation_curves(k: f64, k_prime: f64, resolution: usize) -> String {
    if resolution < 2 {
        return error_json(format!("resolution must be at least 2, got {resolution}"));
    }
    let result = (|| -> ringtrio::Result<CorrelationCurves> {
        // Validates the momentum ranges before any curve work.
        JastrowParams::new(k, k_prime, 1.0)?;
        let r = linspace(0.0, 1.0, resolution);
        let mut mm = Vec::with_capacity(resolution);
        let mut im = Vec::with_capacity(resolution);
        for &x in &r {
            mm.push(jastrow::pair_corr_mm(x, k, k_prime)?);
            im.push(jastrow::pair_corr_im(x, k, k_prime)?);
        }
        Ok(CorrelationCurves {
            k,
            k_prime,
            g: g_from_k(k, 1.0)?,
            g_prime: g_from_k(k_prime, 1.0)?,
            r,
            mm,
            im,
        })
    })();
    match result {
        Ok(curves) => to_json(&curves),
        Err(e) => error_json(e.to_string()),
    }
}

#[derive(Serialize)]
struct IntegrableScan {
    k: Vec<f64>,
    e_v1: Vec<f64>,
    e_bethe: Vec<f64>,
    e_tg: f64,
}

/// Ground-state energy along the integrable line k' = k: the closed-form
/// v = 1 ansatz energy against the exact solution, with the infinite-coupling
/// value 4 pi^2 as reference. The grid spans [0.05, 3.1].
#[wasm_bindgen]
pub fn integrable_scan(resolution: usize) -> String {
    if resolution < 2 {
        return error_json(format!("resolution must be at least 2, got {resolution}"));
    }
    let result = (|| -> ringtrio::Result<IntegrableScan> {
        let k = linspace(0.05, 3.1, resolution);
        let mut e_v1 = Vec::with_capacity(resolution);
        let mut e_bethe = Vec::with_capacity(resolution);
        for &ki in &k {
            e_v1.push(jastrow::jastrow_energy(ki, ki)?.total);
            e_bethe.push(bethe::bethe_three_body(g_from_k(ki, 1.0)?)?.energy);
        }
        Ok(IntegrableScan { k, e_v1, e_bethe, e_tg: 4.0 * std::f64::consts::PI.powi(2) })
    })();
    match result {
        Ok(scan) => to_json(&scan),
        Err(e) => error_json(e.to_string()),
    }
}

#[derive(Serialize)]
struct Heatmap {
    x: Vec<f64>,
    y: Vec<f64>,
    values: Vec<f64>,
    max: f64,
}

/// Ground-state density in Jacobi coordinates with one particle pinned at a
/// triangle apex, on a `resolution` x `resolution` grid in the fundamental
/// cell. `apex` selects which particle is pinned: "majority" or "impurity".
#[wasm_bindgen]
pub fn jacobi_heatmap(k: f64, k_prime: f64, apex: &str, resolution: usize) -> String {
    let frame = match apex {
        "majority" => JacobiFrame::MajorityApex,
        "impurity" => JacobiFrame::ImpurityApex,
        other => return error_json(format!("apex must be majority or impurity, got {other}")),
    };
    if !(2..=121).contains(&resolution) {
        return error_json(format!("resolution must be in [2, 121], got {resolution}"));
    }
    let result = (|| -> ringtrio::Result<Heatmap> {
        let params = JastrowParams::new(k, k_prime, 1.0)?;
        let grid = quad::jacobi_density_in_frame(&params, frame, &QuadratureConfig::default(), resolution)?;
        let max = grid.values.iter().fold(0.0_f64, |a, &b| a.max(b));
        Ok(Heatmap { x: grid.x, y: grid.y, values: grid.values, max })
    })();
    match result {
        Ok(map) => to_json(&map),
        Err(e) => error_json(e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).expect("export returned invalid JSON")
    }

    fn floats(v: &Value, key: &str) -> Vec<f64> {
        v[key].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
    }

    #[test]
    fn correlation_curves_json_shape_and_diagonal_identity() {
        let v = parse(&correlation_curves(1.2, 1.2, 41));
        assert!(v.get("error").is_none());
        let mm = floats(&v, "mm");
        let im = floats(&v, "im");
        assert_eq!(mm.len(), 41);
        for (a, b) in mm.iter().zip(&im) {
            assert!((a - b).abs() < 1e-12, "diagonal mm/im split: {a} vs {b}");
        }
        assert!(v["g"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn correlation_curves_reports_bad_momentum() {
        let v = parse(&correlation_curves(4.0, 1.0, 41));
        assert!(v["error"].as_str().is_some());
        let v = parse(&correlation_curves(1.0, 1.0, 1));
        assert!(v["error"].as_str().is_some());
    }

    #[test]
    fn integrable_scan_respects_variational_bound() {
        let v = parse(&integrable_scan(30));
        let e_v1 = floats(&v, "e_v1");
        let e_bethe = floats(&v, "e_bethe");
        assert_eq!(e_v1.len(), 30);
        for (a, b) in e_v1.iter().zip(&e_bethe) {
            // Rayleigh quotient of a trial state never undercuts the exact
            // ground energy.
            assert!(*b <= a + 1e-9 * a.abs(), "bound violated: v1 {a} vs exact {b}");
        }
        let e_tg = v["e_tg"].as_f64().unwrap();
        assert!((e_tg - 4.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn jacobi_heatmap_is_mirror_symmetric_on_the_diagonal() {
        let v = parse(&jacobi_heatmap(2.0, 2.0, "majority", 31));
        let values = floats(&v, "values");
        let n = 31;
        assert_eq!(values.len(), n * n);
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((values[i * n + j] - values[(n - 1 - i) * n + j]).abs());
            }
        }
        assert!(worst < 1e-10, "diagonal coupling broke the xi mirror: {worst}");
        assert!(v["max"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn jacobi_heatmap_rejects_unknown_apex() {
        let v = parse(&jacobi_heatmap(2.0, 2.0, "corner", 31));
        assert!(v["error"].as_str().is_some());
    }
}
