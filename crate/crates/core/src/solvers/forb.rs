//! Forward-reflected-backward with variance reduction.
//!
//! `z_{k+1} = prox(zbar_k - tau F(w_k) - tau (F_xi(z_k) - F_xi(w_{k-1})))`
//! with `w_{-1} = w_0`, so the first correction vanishes. The reported
//! average is over `z_k`.

use super::{shifted, Solver, StepChoice};
use crate::error::Result;
use crate::linalg::lincomb;
use crate::oracle::Draw;

pub(super) fn step(s: &mut Solver, choice: StepChoice) -> Result<()> {
    let (alpha, tau) = (s.params.alpha, s.params.tau);
    s.avg.add(&s.z);
    let draw = s.draw(choice, false);
    let oracle = &s.problem.oracle;
    let w = &mut s.work;
    lincomb(alpha, &s.z, 1.0 - alpha, &s.w, &mut w.zbar);
    w.est.copy_from_slice(&s.fw);
    if let Draw::Exact = draw {
        oracle.full_into(&s.z, &mut w.half, &mut w.scratch);
        for ((e, a), b) in w.est.iter_mut().zip(&w.half).zip(&s.prev_fw) {
            *e += a - b;
        }
        s.counters.full_evals += 1;
        s.counters.cost += oracle.full_cost();
    } else {
        oracle.add_diff(&draw, 1.0, &s.z, &s.prev_w, &mut w.est, &mut w.oracle);
        s.counters.sample_evals += 2;
        s.counters.cost += 2.0 * oracle.sample_cost();
    }
    shifted(&w.zbar, tau, &w.est, &mut w.anchor);
    s.problem.g.prox_into(&w.anchor, s.n, tau, &mut w.next);
    s.counters.prox_calls += 1;
    s.z.copy_from_slice(&s.work.next);
    s.prev_w.copy_from_slice(&s.w);
    s.prev_fw.copy_from_slice(&s.fw);
    if s.coin(choice) {
        s.refresh_snapshot();
    }
    Ok(())
}
