//! Joint-space points, Bregman geometries and the mirror-step primitives.
//!
//! Entropic iterates are carried in the dual (log) domain: a dual vector holds
//! `log z_i` normalized per block, and primal points are recovered with a
//! max-shifted softmax. Euclidean dual vectors coincide with primal points.

mod point;
mod prox;
mod simplex;

pub use point::Point;
pub use prox::{BlockFunction, DualSet, ProxFriendlyG};
pub use simplex::{checked_simplex, on_simplex, project_simplex, project_simplex_into, SIMPLEX_TOL};

use crate::error::{Result, VrviError};
use serde::{Deserialize, Serialize};

/// The mirror structure used by the Bregman steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Geometry {
    /// `h = 1/2 ||z||^2`, `D(u, v) = 1/2 ||u - v||^2`.
    Euclidean,
    /// Negative entropy on `simplex(n) x simplex(m)`, `D` is the KL divergence.
    EntropicSimplex { n: usize, m: usize },
}

impl Geometry {
    pub fn is_entropic(&self) -> bool {
        matches!(self, Geometry::EntropicSimplex { .. })
    }

    fn check_shape(&self, z: &Point) -> Result<()> {
        if let Geometry::EntropicSimplex { n, m } = *self {
            if z.n() != n {
                return Err(VrviError::Dimension { expected: n, got: z.n() });
            }
            if z.m() != m {
                return Err(VrviError::Dimension { expected: m, got: z.m() });
            }
        }
        Ok(())
    }

    /// `grad h(z)`: the identity for Euclidean, normalized `log z` for entropic.
    pub fn to_dual(&self, z: &Point) -> Result<Vec<f64>> {
        self.check_shape(z)?;
        match self {
            Geometry::Euclidean => Ok(z.as_slice().to_vec()),
            Geometry::EntropicSimplex { .. } => {
                let x = checked_simplex(z.x(), "x block")?;
                let y = checked_simplex(z.y(), "y block")?;
                let dual: Vec<f64> = x.iter().chain(&y).map(|v| v.ln()).collect();
                if dual.iter().any(|d| !d.is_finite()) {
                    return Err(VrviError::Domain(
                        "entropic dual requires strictly positive coordinates".into(),
                    ));
                }
                Ok(dual)
            }
        }
    }

    /// Inverse of [`Geometry::to_dual`]. The entropic dual is renormalized in place.
    pub fn to_primal(&self, dual: &mut [f64], n: usize) -> Result<Point> {
        let mut out = vec![0.0; dual.len()];
        self.to_primal_into(dual, n, &mut out)?;
        Point::from_vec(out, n)
    }

    pub(crate) fn to_primal_into(self, dual: &mut [f64], n: usize, out: &mut [f64]) -> Result<()> {
        match self {
            Geometry::Euclidean => {
                out.copy_from_slice(dual);
                Ok(())
            }
            Geometry::EntropicSimplex { .. } => {
                let (dx, dy) = dual.split_at_mut(n);
                let (ox, oy) = out.split_at_mut(n);
                softmax_block(dx, ox)?;
                softmax_block(dy, oy)
            }
        }
    }
}

/// Max-shifted softmax of one block. Also rewrites `dual` as `log(out)`.
fn softmax_block(dual: &mut [f64], out: &mut [f64]) -> Result<()> {
    let max = dual.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(VrviError::Numeric("non-finite dual coordinate".into()));
    }
    let mut sum = 0.0;
    for (o, d) in out.iter_mut().zip(dual.iter()) {
        *o = (d - max).exp();
        sum += *o;
    }
    let log_sum = sum.ln();
    for (o, d) in out.iter_mut().zip(dual.iter_mut()) {
        *o /= sum;
        *d = *d - max - log_sum;
    }
    if dual.iter().any(|d| d.is_nan()) {
        return Err(VrviError::Numeric("non-finite dual coordinate".into()));
    }
    Ok(())
}

/// Bregman divergence `D(u, v) = h(u) - h(v) - <grad h(v), u - v>`.
///
/// For the entropic geometry both arguments must lie on the simplex product
/// (within [`SIMPLEX_TOL`], then renormalized) and `v_i > 0` wherever `u_i > 0`;
/// `0 log 0 = 0`.
pub fn bregman_div(geom: &Geometry, u: &Point, v: &Point) -> Result<f64> {
    if !u.same_shape(v) {
        return Err(VrviError::Dimension {
            expected: u.dim(),
            got: v.dim(),
        });
    }
    match geom {
        Geometry::Euclidean => Ok(0.5 * crate::linalg::dist2_sq(u.as_slice(), v.as_slice())),
        Geometry::EntropicSimplex { .. } => {
            geom.check_shape(u)?;
            let mut total = 0.0;
            for (ub, vb, name) in [(u.x(), v.x(), "x"), (u.y(), v.y(), "y")] {
                let ub = checked_simplex(ub, name)?;
                let vb = checked_simplex(vb, name)?;
                for (i, (&a, &b)) in ub.iter().zip(&vb).enumerate() {
                    if a > 0.0 {
                        if b <= 0.0 {
                            return Err(VrviError::Domain(format!(
                                "divergence is infinite: {name}[{i}] > 0 against a zero reference"
                            )));
                        }
                        // a log(a/b) - a + b is termwise nonnegative and sums to KL.
                        total += a * (a / b).ln() - a + b;
                    } else {
                        total += b;
                    }
                }
            }
            Ok(total.max(0.0))
        }
    }
}

/// Solves
/// `argmin_z { g(z) + <linear_term, z> + (alpha/tau) D(z, z1) + ((1-alpha)/tau) D(z, z2) }`
/// given the dual images `z1_dual = grad h(z1)` and `z2_dual = grad h(z2)`.
///
/// Returns the minimizer and its dual image. The entropic case requires `g`
/// to be the simplex indicator and uses the closed form
/// `dual = alpha z1_dual + (1 - alpha) z2_dual - tau linear_term`; the
/// Euclidean case is `prox_{tau g}(alpha z1 + (1 - alpha) z2 - tau linear_term)`.
#[allow(clippy::too_many_arguments)]
pub fn mirror_argmin(
    geom: &Geometry,
    g: &ProxFriendlyG,
    linear_term: &[f64],
    alpha: f64,
    tau: f64,
    z1: &Point,
    z1_dual: &[f64],
    z2_dual: &[f64],
) -> Result<(Point, Vec<f64>)> {
    let d = z1.dim();
    for len in [linear_term.len(), z1_dual.len(), z2_dual.len()] {
        if len != d {
            return Err(VrviError::Dimension { expected: d, got: len });
        }
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(VrviError::Domain(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    if !(tau > 0.0) {
        return Err(VrviError::Domain(format!("step must be positive, got {tau}")));
    }
    g.check_dims(z1.n(), z1.m())?;
    let mut dual = vec![0.0; d];
    let mut primal = vec![0.0; d];
    mirror_argmin_into(geom, g, linear_term, alpha, tau, z1.n(), z1_dual, z2_dual, &mut dual, &mut primal)?;
    Ok((Point::from_vec(primal, z1.n())?, dual))
}

/// Buffer-reusing core of [`mirror_argmin`]. `dual_out` receives the dual
/// image and `primal_out` the minimizer.
#[allow(clippy::too_many_arguments)]
pub(crate) fn mirror_argmin_into(
    geom: &Geometry,
    g: &ProxFriendlyG,
    linear_term: &[f64],
    alpha: f64,
    tau: f64,
    n: usize,
    z1_dual: &[f64],
    z2_dual: &[f64],
    dual_out: &mut [f64],
    primal_out: &mut [f64],
) -> Result<()> {
    for (((o, a), b), l) in dual_out.iter_mut().zip(z1_dual).zip(z2_dual).zip(linear_term) {
        *o = alpha * a + (1.0 - alpha) * b - tau * l;
    }
    match geom {
        Geometry::Euclidean => {
            g.prox_into(dual_out, n, tau, primal_out);
            dual_out.copy_from_slice(primal_out);
        }
        Geometry::EntropicSimplex { .. } => {
            if !matches!(g, ProxFriendlyG::SimplexIndicator { .. }) {
                return Err(VrviError::Config(
                    "the entropic geometry requires the simplex indicator".into(),
                ));
            }
            geom.to_primal_into(dual_out, n, primal_out)?;
        }
    }
    if !crate::linalg::all_finite(primal_out) {
        return Err(VrviError::Numeric("mirror step produced a non-finite point".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const LN2: f64 = std::f64::consts::LN_2;

    fn random_simplex(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
        let v: Vec<f64> = (0..d).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
        let s: f64 = v.iter().sum();
        v.iter().map(|x| x / s).collect()
    }

    fn random_pair_point(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Point {
        Point::new(&random_simplex(rng, n), &random_simplex(rng, m)).unwrap()
    }

    #[test]
    fn euclidean_divergence_cases() {
        let u = Point::new(&[1.0], &[0.0]).unwrap();
        let v = Point::new(&[0.0], &[1.0]).unwrap();
        assert_eq!(bregman_div(&Geometry::Euclidean, &u, &u).unwrap(), 0.0);
        assert_eq!(bregman_div(&Geometry::Euclidean, &u, &v).unwrap(), 1.0);
    }

    #[test]
    fn entropic_divergence_of_vertex_against_uniform() {
        let geom = Geometry::EntropicSimplex { n: 2, m: 2 };
        let u = Point::new(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        let v = Point::uniform(2, 2);
        let d = bregman_div(&geom, &u, &v).unwrap();
        assert!((d - LN2).abs() < 1e-15, "{d}");
    }

    #[test]
    fn entropic_divergence_rejects_bad_domains() {
        let geom = Geometry::EntropicSimplex { n: 2, m: 2 };
        let v = Point::new(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        let u = Point::uniform(2, 2);
        assert!(bregman_div(&geom, &u, &v).is_err());
        let off = Point::new(&[0.5, 0.6], &[0.5, 0.5]).unwrap();
        assert!(bregman_div(&geom, &off, &u).is_err());
        let neg = Point::new(&[1.5, -0.5], &[0.5, 0.5]).unwrap();
        assert!(bregman_div(&geom, &neg, &u).is_err());
    }

    #[test]
    fn mirror_argmin_examples() {
        // alpha = 1, zero drift, Euclidean with simplex constraint: returns z1.
        let g = ProxFriendlyG::simplex(2, 2);
        let z1 = Point::new(&[0.3, 0.7], &[0.6, 0.4]).unwrap();
        let (p, _) = mirror_argmin(
            &Geometry::Euclidean, &g, &[0.0; 4], 1.0, 0.5, &z1, z1.as_slice(), &[9.0; 4],
        )
        .unwrap();
        for (a, b) in p.as_slice().iter().zip(z1.as_slice()) {
            assert!((a - b).abs() < 1e-15);
        }

        // Entropic: softmax(log(1/2, 1/2) - (log 2, 0)) = (1/3, 2/3).
        let geom = Geometry::EntropicSimplex { n: 2, m: 2 };
        let z1 = Point::uniform(2, 2);
        let d1 = geom.to_dual(&z1).unwrap();
        let (p, _) = mirror_argmin(&geom, &g, &[LN2, 0.0, 0.0, 0.0], 1.0, 1.0, &z1, &d1, &d1).unwrap();
        assert!((p.x()[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.x()[1] - 2.0 / 3.0).abs() < 1e-15);

        // alpha = 0 returns z2.
        let z2 = Point::new(&[0.1, 0.9], &[0.25, 0.75]).unwrap();
        let d2 = geom.to_dual(&z2).unwrap();
        let (p, _) = mirror_argmin(&geom, &g, &[0.0; 4], 0.0, 0.3, &z1, &d1, &d2).unwrap();
        for (a, b) in p.as_slice().iter().zip(z2.as_slice()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn entropic_argmin_requires_simplex_indicator() {
        let geom = Geometry::EntropicSimplex { n: 2, m: 2 };
        let z = Point::uniform(2, 2);
        let d = geom.to_dual(&z).unwrap();
        let r = mirror_argmin(&geom, &ProxFriendlyG::Zero, &[0.0; 4], 1.0, 1.0, &z, &d, &d);
        assert!(matches!(r, Err(VrviError::Config(_))));
    }

    #[test]
    fn huge_drift_does_not_overflow() {
        let geom = Geometry::EntropicSimplex { n: 3, m: 2 };
        let g = ProxFriendlyG::simplex(3, 2);
        let z = Point::uniform(3, 2);
        let d = geom.to_dual(&z).unwrap();
        let (p, dual) =
            mirror_argmin(&geom, &g, &[-1e4, 0.0, 1e4, 5e3, -5e3], 1.0, 1.0, &z, &d, &d).unwrap();
        assert!((p.x().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(dual.iter().all(|v| v.is_finite()));
        assert_eq!(p.x()[0], 1.0);
    }

    #[test]
    fn pinsker_lower_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let geom = Geometry::EntropicSimplex { n: 4, m: 3 };
        for _ in 0..100 {
            let u = random_pair_point(&mut rng, 4, 3);
            let v = random_pair_point(&mut rng, 4, 3);
            let d = bregman_div(&geom, &u, &v).unwrap();
            let l1x: f64 = u.x().iter().zip(v.x()).map(|(a, b)| (a - b).abs()).sum();
            let l1y: f64 = u.y().iter().zip(v.y()).map(|(a, b)| (a - b).abs()).sum();
            assert!(d >= 0.5 * (l1x * l1x + l1y * l1y) - 1e-12, "{d}");
        }
    }

    #[test]
    fn three_point_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for geom in [Geometry::Euclidean, Geometry::EntropicSimplex { n: 3, m: 2 }] {
            for _ in 0..50 {
                let z = random_pair_point(&mut rng, 3, 2);
                let zp = random_pair_point(&mut rng, 3, 2);
                let z1 = random_pair_point(&mut rng, 3, 2);
                let lhs = bregman_div(&geom, &z, &z1).unwrap();
                let gp = geom.to_dual(&zp).unwrap();
                let g1 = geom.to_dual(&z1).unwrap();
                let cross: f64 = gp
                    .iter()
                    .zip(&g1)
                    .zip(z.as_slice().iter().zip(zp.as_slice()))
                    .map(|((a, b), (c, d))| (a - b) * (c - d))
                    .sum();
                let rhs = bregman_div(&geom, &z, &zp).unwrap() + bregman_div(&geom, &zp, &z1).unwrap() + cross;
                assert!((lhs - rhs).abs() < 1e-9, "{geom:?}: {lhs} vs {rhs}");
            }
        }
    }

    /// First-order optimality of the entropic argmin: the residual
    /// `tau l + grad h(z+) - alpha grad h(z1) - (1 - alpha) grad h(z2)` is
    /// constant on each block (normal cone of the simplex).
    #[test]
    fn entropic_argmin_first_order_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let geom = Geometry::EntropicSimplex { n: 4, m: 3 };
        let g = ProxFriendlyG::simplex(4, 3);
        for _ in 0..50 {
            let z1 = random_pair_point(&mut rng, 4, 3);
            let z2 = random_pair_point(&mut rng, 4, 3);
            let l: Vec<f64> = (0..7).map(|_| rng.random::<f64>() - 0.5).collect();
            let alpha = rng.random::<f64>();
            let tau = 0.1 + rng.random::<f64>();
            let d1 = geom.to_dual(&z1).unwrap();
            let d2 = geom.to_dual(&z2).unwrap();
            let (zp, _) = mirror_argmin(&geom, &g, &l, alpha, tau, &z1, &d1, &d2).unwrap();
            let r: Vec<f64> = (0..7)
                .map(|i| tau * l[i] + zp.as_slice()[i].ln() - alpha * d1[i] - (1.0 - alpha) * d2[i])
                .collect();
            for block in [&r[..4], &r[4..]] {
                let mean = block.iter().sum::<f64>() / block.len() as f64;
                assert!(block.iter().all(|v| (v - mean).abs() <= 1e-8));
            }
        }
    }

    /// Euclidean argmin with `g = 0`: gradient of the objective vanishes.
    #[test]
    fn euclidean_argmin_first_order_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let z1 = Point::from_vec((0..5).map(|_| rng.random::<f64>()).collect(), 2).unwrap();
            let z2: Vec<f64> = (0..5).map(|_| rng.random::<f64>()).collect();
            let l: Vec<f64> = (0..5).map(|_| rng.random::<f64>() - 0.5).collect();
            let (alpha, tau) = (rng.random::<f64>(), 0.5);
            let (zp, _) = mirror_argmin(&Geometry::Euclidean, &ProxFriendlyG::Zero, &l, alpha, tau, &z1, z1.as_slice(), &z2).unwrap();
            for i in 0..5 {
                let grad = l[i] + (alpha * (zp.as_slice()[i] - z1.as_slice()[i]) + (1.0 - alpha) * (zp.as_slice()[i] - z2[i])) / tau;
                assert!(grad.abs() <= 1e-8);
            }
        }
    }
}
