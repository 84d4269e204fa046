//! Double-loop mirror-prox with variance reduction.
//!
//! Both mirror steps anchor at `alpha z_k + (1 - alpha) w_bar` in the dual.
//! After `K` inner steps the snapshot becomes the primal mean of the `z_k`,
//! the Bregman anchor `w_bar` the dual mean, and `F(w)` is recomputed.
//! Initially `w = w_bar = z0`.

use super::{Solver, StepChoice};
use crate::error::Result;
use crate::geometry::mirror_argmin_into;

pub(super) fn half_step(s: &mut Solver) -> Result<()> {
    let (alpha, tau) = (s.params.alpha, s.params.tau);
    let w = &mut s.work;
    mirror_argmin_into(
        &s.problem.geometry,
        &s.problem.g,
        &s.fw,
        alpha,
        tau,
        s.n,
        &s.z_dual,
        &s.wbar_dual,
        &mut w.half_dual,
        &mut w.half,
    )?;
    s.counters.prox_calls += 1;
    Ok(())
}

pub(super) fn step(s: &mut Solver, choice: StepChoice) -> Result<()> {
    let (alpha, tau) = (s.params.alpha, s.params.tau);
    half_step(s)?;
    let draw = s.draw(choice, true);
    s.estimate_at(&draw, true);
    let w = &mut s.work;
    mirror_argmin_into(
        &s.problem.geometry,
        &s.problem.g,
        &w.est,
        alpha,
        tau,
        s.n,
        &s.z_dual,
        &s.wbar_dual,
        &mut w.next_dual,
        &mut w.next,
    )?;
    s.counters.prox_calls += 1;
    s.avg.add(&w.half);
    s.last_half.copy_from_slice(&w.half);
    s.z.copy_from_slice(&w.next);
    s.z_dual.copy_from_slice(&w.next_dual);
    s.sum_w.add(&s.z);
    s.sum_dual.add(&s.z_dual);
    s.inner += 1;
    if s.inner == s.params.k_inner {
        s.w = s.sum_w.mean().expect("inner loop is non-empty");
        s.wbar_dual = s.sum_dual.mean().expect("inner loop is non-empty");
        s.sum_w.reset();
        s.sum_dual.reset();
        s.inner = 0;
        s.outer += 1;
        s.problem.oracle.full_into(&s.w, &mut s.fw, &mut s.work.scratch);
        s.charge_full();
    }
    Ok(())
}
