//! Loopless extragradient and forward-backward-forward with variance reduction.

use super::{shifted, Solver, StepChoice};
use crate::error::Result;
use crate::linalg::lincomb;
use crate::oracle::Draw;

/// `zbar = alpha z + (1 - alpha) w`, `z_half = prox(zbar - tau F(w))`.
pub(super) fn half_step(s: &mut Solver) {
    let (alpha, tau) = (s.params.alpha, s.params.tau);
    let w = &mut s.work;
    lincomb(alpha, &s.z, 1.0 - alpha, &s.w, &mut w.zbar);
    shifted(&w.zbar, tau, &s.fw, &mut w.anchor);
    s.problem.g.prox_into(&w.anchor, s.n, tau, &mut w.half);
    s.counters.prox_calls += 1;
}

pub(super) fn step(s: &mut Solver, choice: StepChoice, forward_backward_forward: bool) -> Result<()> {
    let tau = s.params.tau;
    half_step(s);
    let draw = s.draw(choice, true);
    if forward_backward_forward {
        // z+ = z_half - tau (F_xi(z_half) - F_xi(w)); no resolvent.
        let oracle = &s.problem.oracle;
        let w = &mut s.work;
        w.next.copy_from_slice(&w.half);
        if let Draw::Exact = draw {
            oracle.full_into(&w.half, &mut w.est, &mut w.scratch);
            for ((o, f), g) in w.next.iter_mut().zip(&w.est).zip(&s.fw) {
                *o -= tau * (f - g);
            }
            s.counters.full_evals += 1;
            s.counters.cost += oracle.full_cost();
        } else {
            oracle.add_diff(&draw, -tau, &w.half, &s.w, &mut w.next, &mut w.oracle);
            s.counters.sample_evals += 2;
            s.counters.cost += 2.0 * oracle.sample_cost();
        }
    } else {
        s.estimate_at(&draw, true);
        let w = &mut s.work;
        shifted(&w.zbar, tau, &w.est, &mut w.anchor);
        s.problem.g.prox_into(&w.anchor, s.n, tau, &mut w.next);
        s.counters.prox_calls += 1;
    }
    s.avg.add(&s.work.half);
    s.last_half.copy_from_slice(&s.work.half);
    s.z.copy_from_slice(&s.work.next);
    if s.coin(choice) {
        s.refresh_snapshot();
    }
    Ok(())
}
