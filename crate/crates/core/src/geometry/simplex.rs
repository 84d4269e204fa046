//! Probability-simplex helpers: Euclidean projection and feasibility checks.

use crate::error::{Result, VrviError};

/// Tolerance on `|sum - 1|` for accepting a vector as a simplex point.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Euclidean projection onto `{x : sum(x) = 1, x >= 0}`.
///
/// Uses Condat's linear-time threshold search: a running estimate of the
/// threshold over a shrinking active set, with no full sort.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    project_simplex_into(v, &mut out);
    out
}

/// In-place variant of [`project_simplex`] writing into `out`.
pub fn project_simplex_into(v: &[f64], out: &mut [f64]) {
    assert_eq!(v.len(), out.len());
    assert!(!v.is_empty(), "cannot project onto an empty simplex");
    let theta = simplex_threshold(v);
    for (o, &vi) in out.iter_mut().zip(v) {
        *o = (vi - theta).max(0.0);
    }
}

fn simplex_threshold(y: &[f64]) -> f64 {
    let mut active = Vec::with_capacity(y.len());
    let mut parked = Vec::new();
    active.push(y[0]);
    let mut rho = y[0] - 1.0;
    for &yn in &y[1..] {
        if yn > rho {
            rho += (yn - rho) / (active.len() + 1) as f64;
            if rho > yn - 1.0 {
                active.push(yn);
            } else {
                parked.append(&mut active);
                active.push(yn);
                rho = yn - 1.0;
            }
        }
    }
    for &yn in &parked {
        if yn > rho {
            active.push(yn);
            rho += (yn - rho) / active.len() as f64;
        }
    }
    loop {
        let before = active.len();
        let mut i = 0;
        while i < active.len() {
            let yn = active[i];
            if yn <= rho {
                active.swap_remove(i);
                rho += (rho - yn) / active.len() as f64;
            } else {
                i += 1;
            }
        }
        if active.len() == before {
            return rho;
        }
    }
}

/// Checks that `v` lies on the simplex within [`SIMPLEX_TOL`] and returns an
/// exactly renormalized copy.
pub fn checked_simplex(v: &[f64], what: &str) -> Result<Vec<f64>> {
    if let Some(i) = v.iter().position(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(VrviError::Domain(format!(
            "{what}: coordinate {i} = {} is negative or not finite",
            v[i]
        )));
    }
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > SIMPLEX_TOL {
        return Err(VrviError::Domain(format!(
            "{what}: coordinates sum to {s}, not 1"
        )));
    }
    Ok(v.iter().map(|x| x / s).collect())
}

pub fn on_simplex(v: &[f64], tol: f64) -> bool {
    v.iter().all(|&x| x >= 0.0) && (v.iter().sum::<f64>() - 1.0).abs() <= tol
}
