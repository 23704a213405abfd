//! Bounded-variable two-phase primal simplex.
//!
//! Standard form used here: every row `a.x (sense) b` becomes `a.x + s = b`
//! with a logical variable `s` whose bounds encode the sense (`<=`: `[0,inf)`,
//! `>=`: `(-inf,0]`, `=`: `[0,0]`). The initial basis is all logicals; rows
//! whose residual violates the logical bounds get an artificial variable
//! instead, and phase 1 drives the sum of artificial magnitudes to zero with
//! static costs. Entering variables are priced with Dantzig's rule and the
//! ratio test allows bound flips; after a configurable streak of degenerate
//! pivots the solver falls back to Bland's rule until it makes a
//! nondegenerate step, which the highly degenerate scheduling bases need.
//!
//! The basis is kept as a sparse LU factorization plus product-form eta
//! updates, refactorized periodically; basic values are recomputed from
//! scratch at each refactorization to shed drift.

use std::time::Instant;

use super::lu::LuFactors;
use super::{Ilp01, LpStatus, RelaxedSolution, Sense, SolverConfig, SolverError};

const ZERO_EPS: f64 = 1e-11;
const DUAL_EPS: f64 = 1e-9;
const PERTURB_REL: f64 = 1e-5;
const RATIO_TIE: f64 = 1e-9;
const DEGEN_EPS: f64 = 1e-9;
// Bland's rule guarantees termination but creeps; leave it as a genuine
// last resort against cycling and let Devex walk degenerate plateaus.
const DEGEN_STREAK_LIMIT: u32 = 10_000;
const REFACTOR_EVERY: usize = 100;
const DEADLINE_CHECK_MASK: u64 = 0xff;

/// Result of one LP solve, crate-internal so branch and bound can observe a
/// deadline without widening the public error type.
#[derive(Debug, Clone)]
pub(crate) enum LpOutcome {
    Solved(RelaxedSolution),
    DeadlineHit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum VStat {
    Basic(u32),
    Lower,
    Upper,
}

struct Eta {
    slot: u32,
    pivot: f64,
    entries: Vec<(u32, f64)>,
}

enum LoopExit {
    Optimal,
    Unbounded,
    Phase1Clean,
    DeadlineHit,
}

pub(crate) struct SimplexSolver {
    m: usize,
    n_struct: usize,
    /// Structural columns, row-sorted, duplicates coalesced.
    cols: Vec<Vec<(u32, f64)>>,
    obj: Vec<f64>,
    rhs: Vec<f64>,
    senses: Vec<Sense>,
    eps_feas: f64,
    pivot_tol: f64,

    // Per-solve state. Variable layout: structurals, then one logical per
    // row, then any artificials.
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    vstat: Vec<VStat>,
    basis: Vec<u32>,
    art_rows: Vec<u32>,
    /// Devex reference weights, one per variable.
    devex_w: Vec<f64>,
    lu: Option<LuFactors>,
    etas: Vec<Eta>,
    iters: u64,
    degen_streak: u32,
    bland: bool,

    // Scratch buffers.
    work_rows: Vec<f64>,
    w_col: Vec<f64>,
    w_pattern: Vec<u32>,
    y_dual: Vec<f64>,
    cb: Vec<f64>,
    g_steps: Vec<f64>,
    rho: Vec<f64>,
}

impl SimplexSolver {
    pub fn new(p: &Ilp01, cfg: &SolverConfig) -> Self {
        let m = p.constraints().len();
        let n = p.num_vars();
        let mut cols: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        for (i, c) in p.constraints().iter().enumerate() {
            for &(j, a) in &c.terms {
                if a != 0.0 {
                    cols[j].push((i as u32, a));
                }
            }
        }
        for col in &mut cols {
            col.sort_by_key(|&(r, _)| r);
            col.dedup_by(|next, prev| {
                if next.0 == prev.0 {
                    prev.1 += next.1;
                    true
                } else {
                    false
                }
            });
            col.retain(|&(_, a)| a != 0.0);
        }

        Self {
            m,
            n_struct: n,
            cols,
            obj: p.objective().to_vec(),
            rhs: p.constraints().iter().map(|c| c.rhs).collect(),
            senses: p.constraints().iter().map(|c| c.sense).collect(),
            eps_feas: cfg.eps_feas,
            pivot_tol: cfg.pivot_tol,
            lower: Vec::new(),
            upper: Vec::new(),
            cost: Vec::new(),
            x: Vec::new(),
            vstat: Vec::new(),
            basis: Vec::new(),
            art_rows: Vec::new(),
            devex_w: Vec::new(),
            lu: None,
            etas: Vec::new(),
            iters: 0,
            degen_streak: 0,
            bland: false,
            work_rows: vec![0.0; m],
            w_col: vec![0.0; m],
            w_pattern: Vec::with_capacity(64),
            y_dual: vec![0.0; m],
            cb: vec![0.0; m],
            g_steps: vec![0.0; m],
            rho: vec![0.0; m],
        }
    }

    /// Solves the relaxation with optional extra 0/1 fixings on structural
    /// variables. Each call starts from a fresh logical basis.
    pub fn solve(
        &mut self,
        extra_bounds: &[(usize, u8)],
        deadline: Option<Instant>,
    ) -> Result<LpOutcome, SolverError> {
        let (m, n) = (self.m, self.n_struct);

        self.lower = vec![0.0; n + m];
        self.upper = vec![1.0; n + m];
        for &(j, v) in extra_bounds {
            assert!(j < n, "extra bound on unknown variable {j}");
            let v = f64::from(v);
            // Conflicting fixings make the box empty.
            if (self.lower[j] - v).abs() > 0.5 && self.lower[j] == self.upper[j] {
                return Ok(LpOutcome::Solved(infeasible_solution()));
            }
            self.lower[j] = v;
            self.upper[j] = v;
        }
        for (i, s) in self.senses.iter().enumerate() {
            let (lo, up) = match s {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            self.lower[n + i] = lo;
            self.upper[n + i] = up;
        }

        self.x = vec![0.0; n + m];
        self.vstat = vec![VStat::Lower; n + m];
        for j in 0..n {
            self.x[j] = self.lower[j];
        }

        // Residuals with structurals at their lower bounds decide which rows
        // start on a logical and which need an artificial.
        let mut resid = self.rhs.clone();
        for j in 0..n {
            if self.x[j] != 0.0 {
                for &(r, a) in &self.cols[j] {
                    resid[r as usize] -= a * self.x[j];
                }
            }
        }

        self.basis = vec![0; m];
        self.art_rows.clear();
        for i in 0..m {
            let lv = n + i;
            let r = resid[i];
            if r >= self.lower[lv] - self.eps_feas && r <= self.upper[lv] + self.eps_feas {
                self.basis[i] = lv as u32;
                self.vstat[lv] = VStat::Basic(i as u32);
                self.x[lv] = r;
            } else {
                self.vstat[lv] = match self.senses[i] {
                    Sense::Ge => VStat::Upper,
                    _ => VStat::Lower,
                };
                self.x[lv] = match self.vstat[lv] {
                    VStat::Upper => self.upper[lv],
                    _ => self.lower[lv],
                };
                // The nonbasic logical sits at its (perturbed) bound and
                // stays in the row, so the artificial picks up the rest.
                let r_adj = r - self.x[lv];
                let av = n + m + self.art_rows.len();
                self.art_rows.push(i as u32);
                if r_adj > 0.0 {
                    self.lower.push(0.0);
                    self.upper.push(f64::INFINITY);
                } else {
                    self.lower.push(f64::NEG_INFINITY);
                    self.upper.push(0.0);
                }
                self.x.push(r_adj);
                self.vstat.push(VStat::Basic(i as u32));
                self.basis[i] = av as u32;
            }
        }

        self.etas.clear();
        self.iters = 0;
        self.degen_streak = 0;
        self.bland = false;
        self.devex_w = vec![1.0; self.num_total()];
        self.refactor()?;

        // Phase 1: drive artificials to zero.
        if !self.art_rows.is_empty() {
            self.cost = vec![0.0; self.num_total()];
            for (a, _) in self.art_rows.iter().enumerate() {
                let av = n + m + a;
                self.cost[av] = if self.upper[av].is_infinite() { -1.0 } else { 1.0 };
            }
            match self.run_loop(true, deadline)? {
                LoopExit::DeadlineHit => return Ok(LpOutcome::DeadlineHit),
                LoopExit::Unbounded => {
                    return Err(SolverError::NumericalInstability(
                        "phase 1 reported an unbounded direction".to_string(),
                    ));
                }
                LoopExit::Optimal | LoopExit::Phase1Clean => {}
            }
            self.refactor()?;
            if self.infeasibility_sum() > self.eps_feas {
                return Ok(LpOutcome::Solved(infeasible_solution()));
            }
            // Feasible: freeze every artificial at zero for phase 2.
            for (a, _) in self.art_rows.iter().enumerate() {
                let av = n + m + a;
                self.lower[av] = 0.0;
                self.upper[av] = 0.0;
                if !matches!(self.vstat[av], VStat::Basic(_)) {
                    self.x[av] = 0.0;
                }
            }
        }

        // Phase 2: the real objective, with a tiny deterministic cost
        // perturbation that breaks the reduced-cost ties interchangeable
        // clinicians create. The verification rounds below re-price with the
        // exact objective, so the perturbation cannot change the answer.
        self.cost = vec![0.0; self.num_total()];
        self.cost[..n].copy_from_slice(&self.obj);
        let scale = self.obj.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        for (j, c) in self.cost[..n].iter_mut().enumerate() {
            *c += scale * PERTURB_REL * (1.0 + index_noise(j));
        }
        self.degen_streak = 0;
        self.bland = false;
        self.devex_w.fill(1.0);
        let mut verify_rounds = 0;
        let mut exact_costs = false;
        loop {
            match self.run_loop(false, deadline)? {
                LoopExit::DeadlineHit => return Ok(LpOutcome::DeadlineHit),
                LoopExit::Unbounded => {
                    return Ok(LpOutcome::Solved(RelaxedSolution {
                        status: LpStatus::Unbounded,
                        values: Vec::new(),
                        objective: f64::INFINITY,
                    }));
                }
                LoopExit::Phase1Clean => unreachable!("phase 2 has no artificial target"),
                LoopExit::Optimal => {
                    // Drop the perturbation once, then refactorize and
                    // re-verify; drift can hide a few final pivots. Resume
                    // if anything still improves under the exact objective.
                    if !exact_costs {
                        self.cost[..n].copy_from_slice(&self.obj);
                        exact_costs = true;
                    }
                    self.refactor()?;
                    verify_rounds += 1;
                    if verify_rounds >= 5 || !self.has_entering_candidate() {
                        break;
                    }
                }
            }
        }

        let worst = self.primal_violation();
        if worst > 100.0 * self.eps_feas {
            return Err(SolverError::NumericalInstability(format!(
                "primal violation {worst:.3e} after cleanup"
            )));
        }

        let values: Vec<f64> = (0..n)
            .map(|j| self.x[j].clamp(self.lower[j].max(0.0), self.upper[j].min(1.0)))
            .collect();
        let objective = values.iter().zip(&self.obj).map(|(v, c)| v * c).sum();
        Ok(LpOutcome::Solved(RelaxedSolution {
            status: LpStatus::Optimal,
            values,
            objective,
        }))
    }

    fn num_total(&self) -> usize {
        self.n_struct + self.m + self.art_rows.len()
    }

    fn infeasibility_sum(&self) -> f64 {
        (0..self.art_rows.len())
            .map(|a| self.x[self.n_struct + self.m + a].abs())
            .sum()
    }

    fn primal_violation(&self) -> f64 {
        let mut worst = 0.0f64;
        for slot in 0..self.m {
            let v = self.basis[slot] as usize;
            worst = worst.max(self.lower[v] - self.x[v]).max(self.x[v] - self.upper[v]);
        }
        worst
    }

    /// Rebuilds the LU factors from the current basis and recomputes basic
    /// values from scratch.
    fn refactor(&mut self) -> Result<(), SolverError> {
        let n = self.n_struct;
        let basis_cols: Vec<Vec<(u32, f64)>> = self
            .basis
            .iter()
            .map(|&v| {
                let v = v as usize;
                if v < n {
                    self.cols[v].clone()
                } else if v < n + self.m {
                    vec![((v - n) as u32, 1.0)]
                } else {
                    vec![(self.art_rows[v - n - self.m], 1.0)]
                }
            })
            .collect();
        let lu = LuFactors::factorize(self.m, &basis_cols, self.pivot_tol).map_err(|e| {
            SolverError::NumericalInstability(format!(
                "singular basis at column {} (best pivot {:.3e})",
                e.column, e.best_pivot
            ))
        })?;
        self.etas.clear();

        self.work_rows.copy_from_slice(&self.rhs);
        for j in 0..self.num_total() {
            if matches!(self.vstat[j], VStat::Basic(_)) || self.x[j] == 0.0 {
                continue;
            }
            if j < n {
                for &(r, a) in &self.cols[j] {
                    self.work_rows[r as usize] -= a * self.x[j];
                }
            } else if j < n + self.m {
                self.work_rows[j - n] -= self.x[j];
            } else {
                self.work_rows[self.art_rows[j - n - self.m] as usize] -= self.x[j];
            }
        }
        lu.ftran(&mut self.work_rows, &mut self.w_col);
        for slot in 0..self.m {
            self.x[self.basis[slot] as usize] = self.w_col[slot];
            self.w_col[slot] = 0.0;
        }
        self.lu = Some(lu);
        Ok(())
    }

    /// Duals for the current basis into `y_dual`.
    fn compute_duals(&mut self) {
        for slot in 0..self.m {
            self.cb[slot] = self.cost[self.basis[slot] as usize];
        }
        for eta in self.etas.iter().rev() {
            let mut acc = self.cb[eta.slot as usize];
            for &(i, wi) in &eta.entries {
                acc -= self.cb[i as usize] * wi;
            }
            self.cb[eta.slot as usize] = acc / eta.pivot;
        }
        self.lu
            .as_ref()
            .expect("factorized")
            .btran(&mut self.cb, &mut self.y_dual, &mut self.g_steps);
    }

    fn reduced_cost(&self, j: usize) -> f64 {
        let n = self.n_struct;
        let dot = if j < n {
            self.cols[j]
                .iter()
                .map(|&(r, a)| a * self.y_dual[r as usize])
                .sum::<f64>()
        } else {
            self.y_dual[(j - n) as usize]
        };
        self.cost[j] - dot
    }

    /// Dantzig pricing (or Bland in fallback mode). Assumes fresh duals.
    fn price(&self) -> Option<usize> {
        let priced = self.n_struct + self.m; // artificials never re-enter
        let mut best: Option<(f64, usize)> = None;
        for j in 0..priced {
            match self.vstat[j] {
                VStat::Basic(_) => continue,
                VStat::Lower => {
                    if self.lower[j] == self.upper[j] {
                        continue;
                    }
                    let d = self.reduced_cost(j);
                    if d > DUAL_EPS {
                        if self.bland {
                            return Some(j);
                        }
                        let score = d * d / self.devex_w[j];
                        if best.map_or(true, |(s, _)| score > s) {
                            best = Some((score, j));
                        }
                    }
                }
                VStat::Upper => {
                    if self.lower[j] == self.upper[j] {
                        continue;
                    }
                    let d = self.reduced_cost(j);
                    if d < -DUAL_EPS {
                        if self.bland {
                            return Some(j);
                        }
                        let score = d * d / self.devex_w[j];
                        if best.map_or(true, |(s, _)| score > s) {
                            best = Some((score, j));
                        }
                    }
                }
            }
        }
        best.map(|(_, j)| j)
    }

    fn has_entering_candidate(&mut self) -> bool {
        self.compute_duals();
        self.price().is_some()
    }

    /// Forrest-Goldfarb reference weight update after a basis change; needs
    /// the pivot row, one extra BTRAN per pivot. Bound flips skip this.
    fn update_devex_weights(&mut self, entering: usize, leaving: usize, slot: u32) {
        let pivot = self.w_col[slot as usize];
        let gamma = self.devex_w[entering];

        // rho = row `slot` of the basis inverse.
        self.cb.fill(0.0);
        self.cb[slot as usize] = 1.0;
        for eta in self.etas.iter().rev() {
            let mut acc = self.cb[eta.slot as usize];
            for &(i, wi) in &eta.entries {
                acc -= self.cb[i as usize] * wi;
            }
            self.cb[eta.slot as usize] = acc / eta.pivot;
        }
        let (rho, cb, g) = (&mut self.rho, &mut self.cb, &mut self.g_steps);
        self.lu.as_ref().expect("factorized").btran(cb, rho, g);

        let n = self.n_struct;
        let mut w_max = 1.0f64;
        for j in 0..n + self.m {
            if matches!(self.vstat[j], VStat::Basic(_)) || self.lower[j] == self.upper[j] {
                continue;
            }
            let alpha = if j < n {
                self.cols[j]
                    .iter()
                    .map(|&(r, a)| a * self.rho[r as usize])
                    .sum::<f64>()
            } else {
                self.rho[j - n]
            };
            if alpha != 0.0 {
                let ratio = alpha / pivot;
                let cand = ratio * ratio * gamma;
                if cand > self.devex_w[j] {
                    self.devex_w[j] = cand;
                }
                w_max = w_max.max(self.devex_w[j]);
            }
        }
        if leaving < self.devex_w.len() {
            self.devex_w[leaving] = (gamma / (pivot * pivot)).max(1.0);
        }
        // Stale frameworks drift; start a fresh one.
        if w_max > 1e8 {
            self.devex_w.fill(1.0);
        }
    }

    /// FTRAN of variable `j`'s column through LU and etas into `w_col`,
    /// collecting the significant pattern into `w_pattern`.
    fn ftran_column(&mut self, j: usize) {
        let n = self.n_struct;
        if j < n {
            for &(r, a) in &self.cols[j] {
                self.work_rows[r as usize] = a;
            }
        } else if j < n + self.m {
            self.work_rows[j - n] = 1.0;
        } else {
            self.work_rows[self.art_rows[j - n - self.m] as usize] = 1.0;
        }
        self.lu
            .as_ref()
            .expect("factorized")
            .ftran(&mut self.work_rows, &mut self.w_col);
        for eta in &self.etas {
            let zr = self.w_col[eta.slot as usize];
            if zr != 0.0 {
                let t = zr / eta.pivot;
                self.w_col[eta.slot as usize] = t;
                for &(i, wi) in &eta.entries {
                    self.w_col[i as usize] -= wi * t;
                }
            }
        }
        self.w_pattern.clear();
        for slot in 0..self.m {
            if self.w_col[slot].abs() > ZERO_EPS {
                self.w_pattern.push(slot as u32);
            }
        }
    }

    fn run_loop(&mut self, phase1: bool, deadline: Option<Instant>) -> Result<LoopExit, SolverError> {
        let iter_fuse = 20_000 + 60 * (self.m as u64 + self.n_struct as u64);
        loop {
            self.iters += 1;
            if self.iters > iter_fuse {
                return Err(SolverError::NumericalInstability(format!(
                    "iteration fuse blown after {} pivots",
                    self.iters
                )));
            }
            if let Some(d) = deadline {
                if self.iters & DEADLINE_CHECK_MASK == 0 && Instant::now() >= d {
                    return Ok(LoopExit::DeadlineHit);
                }
            }
            if self.etas.len() >= REFACTOR_EVERY {
                self.refactor()?;
            }

            self.compute_duals();
            let Some(entering) = self.price() else {
                return Ok(LoopExit::Optimal);
            };

            self.ftran_column(entering);
            let dir = match self.vstat[entering] {
                VStat::Lower => 1.0,
                VStat::Upper => -1.0,
                VStat::Basic(_) => unreachable!("basic variable priced"),
            };

            // Ratio test over blocking basics, plus the entering variable's
            // own bound flip.
            let flip = self.upper[entering] - self.lower[entering];
            let mut best_t = flip;
            let mut leave: Option<(u32, bool)> = None; // (slot, leaves-at-upper)
            let mut leave_w = 0.0f64;
            let mut tiny_block = false;
            for pi in 0..self.w_pattern.len() {
                let slot = self.w_pattern[pi];
                let w = self.w_col[slot as usize];
                let rate = -dir * w;
                let bv = self.basis[slot as usize] as usize;
                let (ratio, to_upper) = if rate > 0.0 {
                    if self.upper[bv].is_infinite() {
                        continue;
                    }
                    (((self.upper[bv] - self.x[bv]) / rate).max(0.0), true)
                } else {
                    if self.lower[bv].is_infinite() {
                        continue;
                    }
                    (((self.x[bv] - self.lower[bv]) / -rate).max(0.0), false)
                };
                if w.abs() < self.pivot_tol {
                    if ratio < best_t - RATIO_TIE {
                        tiny_block = true;
                    }
                    continue;
                }
                let better = if ratio < best_t - RATIO_TIE {
                    true
                } else if ratio <= best_t + RATIO_TIE {
                    match leave {
                        None => ratio < best_t, // never displace a strictly better flip
                        Some((ls, _)) => {
                            if self.bland {
                                (self.basis[slot as usize]) < self.basis[ls as usize]
                            } else {
                                let lw = leave_w.abs();
                                w.abs() > lw + RATIO_TIE
                                    || (w.abs() >= lw - RATIO_TIE && slot < ls)
                            }
                        }
                    }
                } else {
                    false
                };
                if better {
                    best_t = ratio.min(best_t);
                    leave = Some((slot, to_upper));
                    leave_w = w;
                }
            }

            if best_t.is_infinite() {
                if tiny_block {
                    return Err(SolverError::NumericalInstability(
                        "all blocking pivots below the pivot tolerance".to_string(),
                    ));
                }
                return Ok(LoopExit::Unbounded);
            }

            if best_t <= DEGEN_EPS {
                self.degen_streak += 1;
                if self.degen_streak > DEGEN_STREAK_LIMIT {
                    self.bland = true;
                }
            } else {
                self.degen_streak = 0;
                self.bland = false;
            }

            // Apply the step.
            if best_t > 0.0 {
                self.x[entering] += dir * best_t;
                for &slot in &self.w_pattern {
                    let bv = self.basis[slot as usize] as usize;
                    self.x[bv] -= dir * best_t * self.w_col[slot as usize];
                }
            }
            match leave {
                None => {
                    // Bound flip, no basis change.
                    self.vstat[entering] = match self.vstat[entering] {
                        VStat::Lower => {
                            self.x[entering] = self.upper[entering];
                            VStat::Upper
                        }
                        VStat::Upper => {
                            self.x[entering] = self.lower[entering];
                            VStat::Lower
                        }
                        VStat::Basic(_) => unreachable!(),
                    };
                }
                Some((slot, to_upper)) => {
                    let leaving = self.basis[slot as usize] as usize;
                    self.vstat[leaving] = if to_upper { VStat::Upper } else { VStat::Lower };
                    self.x[leaving] = if to_upper {
                        self.upper[leaving]
                    } else {
                        self.lower[leaving]
                    };
                    // A nonbasic artificial never comes back.
                    if leaving >= self.n_struct + self.m {
                        self.lower[leaving] = 0.0;
                        self.upper[leaving] = 0.0;
                        self.x[leaving] = 0.0;
                    }
                    self.basis[slot as usize] = entering as u32;
                    self.vstat[entering] = VStat::Basic(slot);
                    let entries: Vec<(u32, f64)> = self
                        .w_pattern
                        .iter()
                        .filter(|&&s| s != slot)
                        .map(|&s| (s, self.w_col[s as usize]))
                        .collect();
                    self.update_devex_weights(entering, leaving, slot);
                    self.etas.push(Eta {
                        slot,
                        pivot: self.w_col[slot as usize],
                        entries,
                    });
                }
            }

            if phase1 && self.infeasibility_sum() <= 1e-12 {
                return Ok(LoopExit::Phase1Clean);
            }
        }
    }
}

/// Deterministic pseudo-noise in `[0, 1)` from a variable index
/// (SplitMix64 finalizer).
fn index_noise(j: usize) -> f64 {
    let mut z = (j as u64).wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64
}

fn infeasible_solution() -> RelaxedSolution {
    RelaxedSolution {
        status: LpStatus::Infeasible,
        values: Vec::new(),
        objective: f64::NEG_INFINITY,
    }
}

/// Solves the LP relaxation of `p` over the box `[0,1]^n`, tightened by
/// `extra_bounds` fixings. An `Optimal` result is vertex-optimal; an
/// `Infeasible` one is certified by a positive phase-1 optimum.
pub fn solve_relaxation(
    p: &Ilp01,
    cfg: &SolverConfig,
    extra_bounds: &[(usize, u8)],
) -> Result<RelaxedSolution, SolverError> {
    let mut solver = SimplexSolver::new(p, cfg);
    match solver.solve(extra_bounds, None)? {
        LpOutcome::Solved(r) => Ok(r),
        LpOutcome::DeadlineHit => unreachable!("no deadline given"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilp::Sense;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn single_variable_bound() {
        let mut p = Ilp01::new(1);
        p.set_objective(0, 1.0);
        p.add_constraint(vec![(0, 1.0)], Sense::Le, 1.0);
        let r = solve_relaxation(&p, &cfg(), &[]).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective - 1.0).abs() < 1e-9);
        assert!((r.values[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn facet_optimum() {
        let mut p = Ilp01::new(2);
        p.set_objective(0, 1.0);
        p.set_objective(1, 1.0);
        p.add_constraint(vec![(0, 1.0), (1, 1.0)], Sense::Le, 1.0);
        let r = solve_relaxation(&p, &cfg(), &[]).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective - 1.0).abs() < 1e-9);
    }

    #[test]
    fn equality_row_needs_phase_one() {
        let mut p = Ilp01::new(2);
        p.set_objective(1, 1.0);
        p.add_constraint(vec![(0, 1.0)], Sense::Eq, 1.0);
        p.add_constraint(vec![(0, 1.0), (1, 1.0)], Sense::Le, 1.5);
        let r = solve_relaxation(&p, &cfg(), &[]).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.values[0] - 1.0).abs() < 1e-7);
        assert!((r.values[1] - 0.5).abs() < 1e-7);
    }

    #[test]
    fn infeasible_window() {
        let mut p = Ilp01::new(1);
        p.add_constraint(vec![(0, 1.0)], Sense::Le, 0.3);
        p.add_constraint(vec![(0, 1.0)], Sense::Ge, 0.7);
        let r = solve_relaxation(&p, &cfg(), &[]).unwrap();
        assert_eq!(r.status, LpStatus::Infeasible);
    }

    #[test]
    fn extra_bounds_fix_variables() {
        let mut p = Ilp01::new(2);
        p.set_objective(0, 1.0);
        p.set_objective(1, 1.0);
        p.add_constraint(vec![(0, 1.0), (1, 1.0)], Sense::Le, 2.0);
        let r = solve_relaxation(&p, &cfg(), &[(0, 0)]).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!(r.values[0].abs() < 1e-9);
        assert!((r.objective - 1.0).abs() < 1e-9);

        let r = solve_relaxation(&p, &cfg(), &[(0, 0), (0, 1)]).unwrap();
        assert_eq!(r.status, LpStatus::Infeasible, "conflicting fixings");
    }

    #[test]
    fn greater_equal_rows_force_values_up() {
        let mut p = Ilp01::new(3);
        for j in 0..3 {
            p.set_objective(j, -1.0);
        }
        p.add_constraint(vec![(0, 1.0), (1, 1.0)], Sense::Ge, 1.2);
        p.add_constraint(vec![(1, 1.0), (2, 1.0)], Sense::Ge, 0.8);
        let r = solve_relaxation(&p, &cfg(), &[]).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        // Best is x1 = 1 covering both rows, x0 = 0.2.
        assert!((r.objective + 1.2).abs() < 1e-7, "objective {}", r.objective);
    }

    #[test]
    fn empty_rows_are_harmless() {
        let mut p = Ilp01::new(1);
        p.set_objective(0, 1.0);
        p.add_constraint(vec![], Sense::Le, 0.0);
        p.add_constraint(vec![], Sense::Ge, 0.0);
        let r = solve_relaxation(&p, &cfg(), &[]).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective - 1.0).abs() < 1e-9);

        let mut p = Ilp01::new(1);
        p.add_constraint(vec![], Sense::Ge, 1.0);
        let r = solve_relaxation(&p, &cfg(), &[]).unwrap();
        assert_eq!(r.status, LpStatus::Infeasible, "0 >= 1 never holds");
    }

    #[test]
    fn tiny_pivots_raise_instability() {
        // Wildly scaled row: after phase 1 the surplus logical prices in,
        // but its only blocking pivot is 1e-10, below the pivot tolerance.
        // The true optimum is x0 = 1; the solver must refuse to guess and
        // ask for rescaling instead.
        let mut p = Ilp01::new(1);
        p.set_objective(0, 100.0);
        p.add_constraint(vec![(0, 1e10)], Sense::Ge, 5e9);
        let err = solve_relaxation(&p, &cfg(), &[]).unwrap_err();
        assert!(matches!(err, SolverError::NumericalInstability(_)));
    }

    #[test]
    fn deterministic_values() {
        let mut p = Ilp01::new(4);
        for j in 0..4 {
            p.set_objective(j, 1.0 + j as f64 * 0.25);
        }
        p.add_constraint(vec![(0, 1.0), (1, 1.0), (2, 1.0)], Sense::Le, 2.0);
        p.add_constraint(vec![(1, 1.0), (3, 1.0)], Sense::Eq, 1.0);
        p.add_constraint(vec![(0, 1.0), (3, -1.0)], Sense::Ge, -0.5);
        let a = solve_relaxation(&p, &cfg(), &[]).unwrap();
        let b = solve_relaxation(&p, &cfg(), &[]).unwrap();
        assert_eq!(a, b);
    }
}
