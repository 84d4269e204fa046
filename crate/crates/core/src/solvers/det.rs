//! Deterministic extragradient (Euclidean) and mirror-prox (entropic) with
//! full operator evaluations; `F(z)` is cached across iterations.

use super::{shifted, Solver};
use crate::error::Result;
use crate::geometry::mirror_argmin_into;

pub(super) fn step(s: &mut Solver) -> Result<()> {
    let tau = s.params.tau;
    let oracle = &s.problem.oracle;
    let geom = &s.problem.geometry;
    let g = &s.problem.g;
    let w = &mut s.work;
    if geom.is_entropic() {
        mirror_argmin_into(geom, g, &s.fz, 1.0, tau, s.n, &s.z_dual, &s.z_dual, &mut w.half_dual, &mut w.half)?;
        oracle.full_into(&w.half, &mut w.est, &mut w.scratch);
        mirror_argmin_into(geom, g, &w.est, 1.0, tau, s.n, &s.z_dual, &s.z_dual, &mut w.next_dual, &mut w.next)?;
        s.z_dual.copy_from_slice(&w.next_dual);
    } else {
        shifted(&s.z, tau, &s.fz, &mut w.anchor);
        g.prox_into(&w.anchor, s.n, tau, &mut w.half);
        oracle.full_into(&w.half, &mut w.est, &mut w.scratch);
        shifted(&s.z, tau, &w.est, &mut w.anchor);
        g.prox_into(&w.anchor, s.n, tau, &mut w.next);
    }
    s.counters.prox_calls += 2;
    s.avg.add(&w.half);
    s.last_half.copy_from_slice(&w.half);
    s.z.copy_from_slice(&w.next);
    s.w.copy_from_slice(&w.next);
    oracle.full_into(&s.z, &mut s.fz, &mut w.scratch);
    s.fw.copy_from_slice(&s.fz);
    s.counters.full_evals += 2;
    s.counters.cost += 2.0 * oracle.full_cost();
    Ok(())
}
