//! Bounded-variable primal simplex on a dense tableau of nonbasic columns.
//!
//! Rows are equilibrated, inequality rows receive a bounded slack and rows
//! whose slack cannot start feasible receive a phase-one artificial. Pricing
//! is Dantzig with a Harris two-pass ratio test; after a run of degenerate
//! pivots the solver falls back to Bland's rule until it makes progress.
//!
//! A [`SimplexSession`] runs phase one once and then optimizes any number of
//! objectives over the same polytope, each starting from the previous basis.

use crate::linalg::{Lu, Mat};
use crate::lp::{dot_sparse, LinearProgram, Sense};
use crate::result::{Residuals, SolveResult, SolveStatus};
use crate::{Real, Tolerances};

const STALL_THRESHOLD: usize = 50;
const MAX_RESTARTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pos {
    Basic(usize),
    NonBasic(usize),
    Dead,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Structural,
    Slack,
    Artificial,
}

enum Step<T> {
    Flip,
    Pivot { row: usize, theta: T, to_upper: bool },
    Unbounded,
}

enum Outcome {
    Optimal,
    Unbounded { col: usize, dir_up: bool },
    IterationLimit,
    Numerical,
}

/// Simplex state over a fixed feasible region.
#[derive(Debug, Clone)]
pub struct SimplexSession<T> {
    tol: Tolerances,
    n_struct: usize,
    m: usize,
    kind: Vec<Kind>,
    /// Sparse columns of the row-scaled constraint matrix.
    cols: Vec<Vec<(usize, T)>>,
    b: Vec<T>,
    row_scale: Vec<T>,
    lo: Vec<T>,
    hi: Vec<T>,
    x: Vec<T>,
    cost: Vec<T>,
    pos: Vec<Pos>,
    basis: Vec<usize>,
    nonbasic: Vec<usize>,
    ncols: usize,
    tab: Vec<T>,
    d: Vec<T>,
    dead_cols: usize,
    pivots_since_refactor: usize,
    feasible: SolveStatus,
    phase_one_iterations: usize,
    /// Phase-one multipliers when the region is empty.
    farkas: Option<Vec<T>>,
    cost_scale: T,
}

/// Solves a single linear program.
pub fn solve_lp<T: Real>(lp: &LinearProgram<T>, tol: &Tolerances) -> SolveResult<T> {
    if lp.validate().is_err() {
        return SolveResult::failed(SolveStatus::NumericalFailure, lp.num_vars(), 0);
    }
    let mut session = SimplexSession::new(lp, tol);
    let mut res = session.optimize(&lp.objective, lp.sense);
    if res.status.is_optimal() {
        if let Some((y, dual_value)) = session.dual_solution(&lp.objective, lp.sense, lp) {
            res.dual = y;
            res.dual_value = dual_value;
        }
    }
    res
}

impl<T: Real> SimplexSession<T> {
    /// Builds the internal form and runs phase one.
    pub fn new(lp: &LinearProgram<T>, tol: &Tolerances) -> Self {
        let n = lp.num_vars();
        let n_eq = lp.eq_rows.len();
        let n_in = lp.ineq_rows.len();
        let m = n_eq + n_in;

        // Row scaling from the largest structural coefficient.
        let mut row_scale = vec![T::one(); m];
        let rows = lp.eq_rows.iter().chain(lp.ineq_rows.iter());
        for (i, row) in rows.enumerate() {
            let mx = row.iter().fold(T::zero(), |a, &(_, v)| a.max(v.abs()));
            if mx > T::zero() {
                row_scale[i] = T::one() / mx;
            }
        }

        let mut cols: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
        for (i, row) in lp.eq_rows.iter().chain(lp.ineq_rows.iter()).enumerate() {
            for &(j, v) in row {
                if v != T::zero() {
                    cols[j].push((i, v * row_scale[i]));
                }
            }
        }
        for c in &mut cols {
            merge_duplicates(c);
        }
        let mut b = vec![T::zero(); m];
        for i in 0..n_eq {
            b[i] = lp.eq_rhs[i] * row_scale[i];
        }
        let mut lo = lp.lower.clone();
        let mut hi = lp.upper.clone();
        let mut kind = vec![Kind::Structural; n];
        // Slacks: a·x - s = 0 with s in the scaled range.
        for k in 0..n_in {
            let i = n_eq + k;
            cols.push(vec![(i, -T::one())]);
            lo.push(lp.ineq_lo[k] * row_scale[i]);
            hi.push(lp.ineq_hi[k] * row_scale[i]);
            kind.push(Kind::Slack);
        }
        let mut x: Vec<T> = (0..lo.len()).map(|j| initial_value(lo[j], hi[j])).collect();

        // Residual of every row with all current variables nonbasic.
        let mut resid = b.clone();
        for j in 0..n {
            if x[j] != T::zero() {
                for &(i, v) in &cols[j] {
                    resid[i] -= v * x[j];
                }
            }
        }
        let mut basis = vec![usize::MAX; m];
        // Inequality rows: the slack is basic if a·x already lies in range.
        for k in 0..n_in {
            let i = n_eq + k;
            let s = n + k;
            let val = -resid[i];
            if val >= lo[s] && val <= hi[s] {
                x[s] = val;
                basis[i] = s;
                resid[i] = T::zero();
            } else {
                let bound = if val < lo[s] { lo[s] } else { hi[s] };
                x[s] = bound;
                resid[i] += bound;
            }
        }
        for i in 0..m {
            if basis[i] != usize::MAX {
                continue;
            }
            let sign = if resid[i] >= T::zero() { T::one() } else { -T::one() };
            let a = cols.len();
            cols.push(vec![(i, sign)]);
            lo.push(T::zero());
            hi.push(T::infinity());
            x.push(resid[i].abs());
            kind.push(Kind::Artificial);
            basis[i] = a;
        }

        let nt = cols.len();
        let mut pos = vec![Pos::Dead; nt];
        for (i, &v) in basis.iter().enumerate() {
            pos[v] = Pos::Basic(i);
        }
        let mut nonbasic = Vec::new();
        for j in 0..nt {
            if pos[j] == Pos::Dead && kind[j] != Kind::Artificial {
                pos[j] = Pos::NonBasic(nonbasic.len());
                nonbasic.push(j);
            }
        }
        let ncols = nonbasic.len();
        // B is diagonal with entries -1 (slack) or ±1 (artificial).
        let mut tab = vec![T::zero(); m * ncols];
        for (c, &j) in nonbasic.iter().enumerate() {
            for &(i, v) in &cols[j] {
                let diag = cols[basis[i]][0].1;
                tab[i * ncols + c] = v / diag;
            }
        }
        let cost: Vec<T> = kind.iter().map(|k| if *k == Kind::Artificial { T::one() } else { T::zero() }).collect();

        let mut s = Self {
            tol: *tol,
            n_struct: n,
            m,
            kind,
            cols,
            b,
            row_scale,
            lo,
            hi,
            x,
            cost,
            pos,
            basis,
            nonbasic,
            ncols,
            tab,
            d: vec![T::zero(); ncols],
            dead_cols: 0,
            pivots_since_refactor: 0,
            feasible: SolveStatus::Optimal,
            phase_one_iterations: 0,
            farkas: None,
            cost_scale: T::one(),
        };
        s.phase_one();
        s
    }

    /// Status of phase one: `Optimal` when the region is nonempty.
    pub fn feasibility(&self) -> SolveStatus {
        self.feasible
    }

    pub fn num_rows(&self) -> usize {
        self.m
    }

    fn phase_one(&mut self) {
        let has_art = self.kind.contains(&Kind::Artificial);
        if !has_art {
            self.finish_phase_one();
            return;
        }
        self.recompute_reduced_costs();
        let mut restarts = 0;
        let mut iters = 0;
        let mut infeas;
        loop {
            let outcome = loop {
                let (o, it) = self.iterate(restarts > 0);
                iters += it;
                match o {
                    Outcome::Numerical if restarts < MAX_RESTARTS => {
                        restarts += 1;
                        if !self.refactor() {
                            break Outcome::Numerical;
                        }
                    }
                    o => break o,
                }
            };
            self.phase_one_iterations = iters;
            match outcome {
                Outcome::Optimal => {}
                Outcome::IterationLimit => {
                    self.feasible = SolveStatus::IterationLimit;
                    return;
                }
                // Phase one is bounded below by zero.
                Outcome::Unbounded { .. } | Outcome::Numerical => {
                    self.feasible = SolveStatus::NumericalFailure;
                    return;
                }
            }
            infeas = self.artificial_sum();
            if infeas <= T::c(self.tol.feas) * T::c(10.0) || restarts >= MAX_RESTARTS {
                break;
            }
            // Reduced costs drift on badly scaled bases; a fresh
            // factorization often reveals an improving column.
            restarts += 1;
            if !self.refactor() {
                self.feasible = SolveStatus::NumericalFailure;
                return;
            }
            infeas = self.artificial_sum();
            if self.price(false).is_none() {
                break;
            }
        }
        if infeas > T::c(self.tol.feas) * T::c(10.0) {
            self.feasible = SolveStatus::Infeasible;
            self.farkas = self.basis_duals().map(|y| y.iter().zip(&self.row_scale).map(|(&a, &s)| a * s).collect());
            return;
        }
        self.finish_phase_one();
    }

    fn artificial_sum(&self) -> T {
        (0..self.m).map(|i| self.basis[i]).filter(|&v| self.kind[v] == Kind::Artificial).map(|v| self.x[v].abs()).sum()
    }

    /// Drives zero-level artificials out of the basis and fixes the rest.
    fn finish_phase_one(&mut self) {
        let ptol = T::c(self.tol.pivot);
        for r in 0..self.m {
            let v = self.basis[r];
            if self.kind[v] != Kind::Artificial {
                continue;
            }
            let mut best: Option<(usize, T)> = None;
            for c in 0..self.ncols {
                let j = self.nonbasic[c];
                if self.pos[j] == Pos::Dead || self.lo[j] == self.hi[j] {
                    continue;
                }
                let a = self.tab[r * self.ncols + c].abs();
                if a > ptol && best.map_or(true, |(_, b)| a > b) {
                    best = Some((c, a));
                }
            }
            match best {
                Some((c, _)) => {
                    self.x[v] = T::zero();
                    self.pivot(r, c);
                }
                None => {
                    // Redundant row: keep the artificial basic but pinned at zero.
                    self.hi[v] = T::zero();
                    self.x[v] = T::zero();
                }
            }
        }
        for j in 0..self.cost.len() {
            self.cost[j] = T::zero();
        }
        self.compact();
    }

    /// Optimizes `objective` (sparse over structural variables) from the
    /// current basis.
    pub fn optimize(&mut self, objective: &[(usize, T)], sense: Sense) -> SolveResult<T> {
        let n = self.n_struct;
        if self.feasible != SolveStatus::Optimal {
            let mut r = SolveResult::failed(self.feasible, n, self.phase_one_iterations);
            r.certificate = self.farkas.clone();
            return r;
        }
        let sign: T = sense.sign();
        for c in self.cost.iter_mut() {
            *c = T::zero();
        }
        // Reduced costs are compared with an absolute tolerance, so the
        // objective is normalized to unit size.
        let mag = objective.iter().fold(T::zero(), |a, &(_, v)| a.max(v.abs()));
        self.cost_scale = if mag > T::zero() && mag.is_finite() { mag } else { T::one() };
        for &(j, v) in objective {
            self.cost[j] += sign * v / self.cost_scale;
        }
        self.recompute_reduced_costs();
        let mut restarts = 0;
        let mut iters = 0;
        loop {
            let (o, it) = self.iterate(restarts > 0);
            iters += it;
            match o {
                Outcome::Optimal => {
                    if self.primal_residual() <= T::c(self.tol.feas) || restarts >= MAX_RESTARTS {
                        break;
                    }
                    restarts += 1;
                    if !self.refactor() {
                        return SolveResult::failed(SolveStatus::NumericalFailure, n, iters);
                    }
                }
                Outcome::Numerical => {
                    if restarts >= MAX_RESTARTS || !self.refactor() {
                        return SolveResult::failed(SolveStatus::NumericalFailure, n, iters);
                    }
                    restarts += 1;
                }
                Outcome::IterationLimit => {
                    return SolveResult::failed(SolveStatus::IterationLimit, n, iters);
                }
                Outcome::Unbounded { col, dir_up } => {
                    let mut r = SolveResult::failed(SolveStatus::Unbounded, n, iters);
                    r.certificate = Some(self.ray(col, dir_up));
                    return r;
                }
            }
        }
        let primal: Vec<T> = self.x[..n].to_vec();
        let value = dot_sparse(objective, &primal);
        let pres = self.primal_residual();
        let dres = self.max_reduced_cost_violation();
        if pres > T::c(self.tol.feas) * T::c(100.0) {
            return SolveResult::failed(SolveStatus::NumericalFailure, n, iters);
        }
        SolveResult {
            status: SolveStatus::Optimal,
            value,
            dual_value: value,
            primal,
            dual: Vec::new(),
            dual_blocks: Vec::new(),
            certificate: None,
            residuals: Residuals { primal_feas: pres.to_f64_lossy(), dual_feas: dres.to_f64_lossy(), gap: dres.to_f64_lossy() },
            iterations: iters,
        }
    }

    /// Row multipliers (equalities first, then inequalities) and the dual
    /// objective for the current basis under `objective`.
    pub fn dual_solution(&self, objective: &[(usize, T)], sense: Sense, lp: &LinearProgram<T>) -> Option<(Vec<T>, T)> {
        let ys = self.basis_duals()?;
        let sign: T = sense.sign();
        // Internal multipliers refer to scaled rows and the signed cost.
        let y: Vec<T> = ys.iter().zip(&self.row_scale).map(|(&a, &s)| a * s * self.cost_scale).collect();
        let mut c = vec![T::zero(); self.n_struct];
        for &(j, v) in objective {
            c[j] += sign * v;
        }
        let mut rc = c.clone();
        for (i, row) in lp.eq_rows.iter().chain(lp.ineq_rows.iter()).enumerate() {
            for &(j, v) in row {
                rc[j] -= y[i] * v;
            }
        }
        let scale = c.iter().fold(T::one(), |a, &v| a.max(v.abs()));
        let ztol = T::c(self.tol.opt).max(T::c(1e-9)) * scale;
        let mut obj = T::zero();
        for (i, &rhs) in lp.eq_rhs.iter().enumerate() {
            obj += y[i] * rhs;
        }
        let mut add = |r: T, lo: T, hi: T| {
            if r > ztol {
                obj += r * lo;
            } else if r < -ztol {
                obj += r * hi;
            }
        };
        for j in 0..self.n_struct {
            add(rc[j], lp.lower[j], lp.upper[j]);
        }
        let n_eq = lp.eq_rows.len();
        for k in 0..lp.ineq_rows.len() {
            add(y[n_eq + k], lp.ineq_lo[k], lp.ineq_hi[k]);
        }
        let y_out = y.iter().map(|&v| sign * v).collect();
        let obj = if obj.is_nan() { T::neg_infinity() } else { obj };
        Some((y_out, sign * obj))
    }

    /// Solves `B^T y = c_B` for the current basis (scaled rows).
    fn basis_duals(&self) -> Option<Vec<T>> {
        let lu = self.factor_basis()?;
        let cb: Vec<T> = self.basis.iter().map(|&v| self.cost[v]).collect();
        Some(lu.solve_transposed(&cb))
    }

    fn factor_basis(&self) -> Option<Lu<T>> {
        let m = self.m;
        let mut bm = Mat::zeros(m, m);
        for (r, &v) in self.basis.iter().enumerate() {
            for &(i, a) in &self.cols[v] {
                bm[(i, r)] = a;
            }
        }
        Lu::factor(bm)
    }

    /// Rebuilds the tableau, reduced costs and basic values from scratch.
    fn refactor(&mut self) -> bool {
        self.compact();
        let Some(lu) = self.factor_basis() else {
            return false;
        };
        let m = self.m;
        let nc = self.ncols;
        let mut col = vec![T::zero(); m];
        for c in 0..nc {
            let j = self.nonbasic[c];
            col.iter_mut().for_each(|v| *v = T::zero());
            for &(i, a) in &self.cols[j] {
                col[i] = a;
            }
            let t = lu.solve(&col);
            for i in 0..m {
                self.tab[i * nc + c] = t[i];
            }
        }
        let mut rhs = self.b.clone();
        for &j in &self.nonbasic {
            let xj = self.x[j];
            if xj != T::zero() {
                for &(i, a) in &self.cols[j] {
                    rhs[i] -= a * xj;
                }
            }
        }
        let xb = lu.solve(&rhs);
        for (r, &v) in self.basis.iter().enumerate() {
            self.x[v] = xb[r];
        }
        self.recompute_reduced_costs();
        self.pivots_since_refactor = 0;
        true
    }

    fn refactor_interval(&self) -> usize {
        let m = self.m.max(1);
        let nc = self.ncols.max(1);
        (m * m / (3 * nc) + m).clamp(100, 4000)
    }

    fn recompute_reduced_costs(&mut self) {
        let nc = self.ncols;
        self.d = self.nonbasic.iter().map(|&j| self.cost[j]).collect();
        for r in 0..self.m {
            let cb = self.cost[self.basis[r]];
            if cb == T::zero() {
                continue;
            }
            let row = &self.tab[r * nc..(r + 1) * nc];
            for (dj, &t) in self.d.iter_mut().zip(row) {
                *dj -= cb * t;
            }
        }
    }

    /// Removes dead columns from the tableau.
    fn compact(&mut self) {
        if self.dead_cols == 0 {
            return;
        }
        let keep: Vec<usize> = (0..self.ncols).filter(|&c| self.pos[self.nonbasic[c]] != Pos::Dead).collect();
        let nc = keep.len();
        let mut tab = vec![T::zero(); self.m * nc];
        for r in 0..self.m {
            let old = &self.tab[r * self.ncols..(r + 1) * self.ncols];
            let new = &mut tab[r * nc..(r + 1) * nc];
            for (k, &c) in keep.iter().enumerate() {
                new[k] = old[c];
            }
        }
        let nonbasic: Vec<usize> = keep.iter().map(|&c| self.nonbasic[c]).collect();
        let d: Vec<T> = keep.iter().map(|&c| self.d[c]).collect();
        for (k, &j) in nonbasic.iter().enumerate() {
            self.pos[j] = Pos::NonBasic(k);
        }
        self.tab = tab;
        self.nonbasic = nonbasic;
        self.d = d;
        self.ncols = nc;
        self.dead_cols = 0;
    }

    fn primal_residual(&self) -> T {
        let mut r = self.b.clone();
        for (j, col) in self.cols.iter().enumerate() {
            if self.pos[j] == Pos::Dead {
                continue;
            }
            let xj = self.x[j];
            if xj != T::zero() {
                for &(i, a) in col {
                    r[i] -= a * xj;
                }
            }
        }
        let mut worst = r.iter().fold(T::zero(), |a, &v| a.max(v.abs()));
        for j in 0..self.x.len() {
            if self.pos[j] == Pos::Dead {
                continue;
            }
            worst = worst.max(self.lo[j] - self.x[j]).max(self.x[j] - self.hi[j]);
        }
        worst
    }

    fn max_reduced_cost_violation(&self) -> T {
        let mut worst = T::zero();
        for c in 0..self.ncols {
            let j = self.nonbasic[c];
            if self.pos[j] == Pos::Dead {
                continue;
            }
            let dj = self.d[c];
            let v = if self.lo[j] == self.hi[j] {
                T::zero()
            } else if self.x[j] <= self.lo[j] {
                -dj
            } else if self.x[j] >= self.hi[j] {
                dj
            } else {
                dj.abs()
            };
            worst = worst.max(v);
        }
        worst
    }

    /// Improving direction in structural space for an unbounded column.
    fn ray(&self, col: usize, dir_up: bool) -> Vec<T> {
        let dir = if dir_up { T::one() } else { -T::one() };
        let mut ray = vec![T::zero(); self.n_struct];
        let q = self.nonbasic[col];
        if q < self.n_struct {
            ray[q] = dir;
        }
        for r in 0..self.m {
            let v = self.basis[r];
            if v < self.n_struct {
                ray[v] = -dir * self.tab[r * self.ncols + col];
            }
        }
        ray
    }

    /// Chooses an entering column: `(col, increase?)`.
    fn price(&self, bland: bool) -> Option<(usize, bool)> {
        let otol = T::c(self.tol.opt);
        let mut best: Option<(usize, bool, T)> = None;
        let mut best_var = usize::MAX;
        for c in 0..self.ncols {
            let j = self.nonbasic[c];
            if self.pos[j] == Pos::Dead || self.lo[j] == self.hi[j] {
                continue;
            }
            let dj = self.d[c];
            let at_lo = self.x[j] <= self.lo[j];
            let at_hi = self.x[j] >= self.hi[j];
            let cand = if dj < -otol && !at_hi {
                Some(true)
            } else if dj > otol && !at_lo {
                Some(false)
            } else {
                None
            };
            let Some(up) = cand else { continue };
            let score = dj.abs();
            if bland {
                if j < best_var {
                    best_var = j;
                    best = Some((c, up, score));
                }
            } else if best.map_or(true, |(_, _, s)| score > s) {
                best = Some((c, up, score));
            }
        }
        best.map(|(c, up, _)| (c, up))
    }

    fn ratio_test(&self, col: usize, up: bool, bland: bool) -> Step<T> {
        let ftol = T::c(self.tol.feas);
        let ptol = T::c(self.tol.pivot);
        let dir = if up { T::one() } else { -T::one() };
        let nc = self.ncols;
        let q = self.nonbasic[col];
        let flip = self.hi[q] - self.lo[q];

        // Pass one: largest step with bounds relaxed by the tolerance.
        let mut theta_max = T::infinity();
        for r in 0..self.m {
            let alpha = -dir * self.tab[r * nc + col];
            if alpha.abs() <= ptol {
                continue;
            }
            let v = self.basis[r];
            let lim = if alpha < T::zero() { (self.x[v] - self.lo[v] + ftol) / -alpha } else { (self.hi[v] - self.x[v] + ftol) / alpha };
            if lim < theta_max {
                theta_max = lim;
            }
        }
        if theta_max.is_infinite() && flip.is_infinite() {
            return Step::Unbounded;
        }
        if flip <= theta_max && flip.is_finite() {
            return Step::Flip;
        }
        // Pass two: among rows within theta_max pick the largest pivot
        // (Bland: the smallest leaving index among minimum ratios).
        let mut chosen: Option<(usize, T, T, bool)> = None;
        let mut min_ratio = T::infinity();
        if bland {
            for r in 0..self.m {
                let alpha = -dir * self.tab[r * nc + col];
                if alpha.abs() <= ptol {
                    continue;
                }
                let v = self.basis[r];
                let t = if alpha < T::zero() { (self.x[v] - self.lo[v]) / -alpha } else { (self.hi[v] - self.x[v]) / alpha };
                min_ratio = min_ratio.min(t.max(T::zero()));
            }
        }
        for r in 0..self.m {
            let alpha = -dir * self.tab[r * nc + col];
            if alpha.abs() <= ptol {
                continue;
            }
            let v = self.basis[r];
            let (t, to_upper) = if alpha < T::zero() { ((self.x[v] - self.lo[v]) / -alpha, false) } else { ((self.hi[v] - self.x[v]) / alpha, true) };
            if !t.is_finite() || t > theta_max {
                continue;
            }
            let t = t.max(T::zero());
            if bland {
                if t <= min_ratio + ftol * T::c(1e-3) {
                    let better = match chosen {
                        None => true,
                        Some((cr, _, _, _)) => v < self.basis[cr],
                    };
                    if better {
                        chosen = Some((r, t, alpha.abs(), to_upper));
                    }
                }
            } else if chosen.map_or(true, |(_, _, a, _)| alpha.abs() > a) {
                chosen = Some((r, t, alpha.abs(), to_upper));
            }
        }
        match chosen {
            Some((row, theta, _, to_upper)) => {
                if flip.is_finite() && flip < theta {
                    Step::Flip
                } else {
                    Step::Pivot { row, theta, to_upper }
                }
            }
            None => Step::Unbounded,
        }
    }

    /// Runs pivots with the current cost until optimal or stopped.
    fn iterate(&mut self, start_bland: bool) -> (Outcome, usize) {
        let mut degenerate = if start_bland { STALL_THRESHOLD } else { 0 };
        let ftol = T::c(self.tol.feas);
        let mut iters = 0;
        loop {
            if iters >= self.tol.max_iter {
                return (Outcome::IterationLimit, iters);
            }
            let bland = degenerate >= STALL_THRESHOLD;
            let Some((col, up)) = self.price(bland) else {
                return (Outcome::Optimal, iters);
            };
            iters += 1;
            let q = self.nonbasic[col];
            let dir = if up { T::one() } else { -T::one() };
            match self.ratio_test(col, up, bland) {
                Step::Unbounded => return (Outcome::Unbounded { col, dir_up: up }, iters),
                Step::Flip => {
                    let theta = self.hi[q] - self.lo[q];
                    self.move_basics(col, dir * theta);
                    self.x[q] = if up { self.hi[q] } else { self.lo[q] };
                    degenerate = 0;
                }
                Step::Pivot { row, theta, to_upper } => {
                    let leaving = self.basis[row];
                    self.move_basics(col, dir * theta);
                    self.x[q] += dir * theta;
                    self.x[leaving] = if to_upper { self.hi[leaving] } else { self.lo[leaving] };
                    let p = self.tab[row * self.ncols + col];
                    if !p.is_finite() || p == T::zero() {
                        return (Outcome::Numerical, iters);
                    }
                    self.pivot(row, col);
                    if theta <= ftol * T::c(1e-3) {
                        degenerate += 1;
                    } else {
                        degenerate = 0;
                    }
                    self.pivots_since_refactor += 1;
                    if self.pivots_since_refactor >= self.refactor_interval() && !self.refactor() {
                        return (Outcome::Numerical, iters);
                    }
                }
            }
        }
    }

    fn move_basics(&mut self, col: usize, delta: T) {
        let nc = self.ncols;
        for r in 0..self.m {
            let t = self.tab[r * nc + col];
            if t != T::zero() {
                let v = self.basis[r];
                self.x[v] -= delta * t;
            }
        }
    }

    /// Exchanges the basic variable of `row` with the nonbasic in `col`.
    fn pivot(&mut self, row: usize, col: usize) {
        let nc = self.ncols;
        let p = self.tab[row * nc + col];
        let inv = T::one() / p;
        {
            let prow = &mut self.tab[row * nc..(row + 1) * nc];
            for v in prow.iter_mut() {
                *v *= inv;
            }
            prow[col] = inv;
        }
        let prow: Vec<T> = self.tab[row * nc..(row + 1) * nc].to_vec();
        // Truncation LPs are sparse for a long time; skipping zero entries of
        // the pivot row changes nothing numerically.
        let nz: Vec<usize> = (0..nc).filter(|&j| prow[j] != T::zero()).collect();
        let sparse = nz.len() * 3 < nc;
        for r in 0..self.m {
            if r == row {
                continue;
            }
            let f = self.tab[r * nc + col];
            if f == T::zero() {
                continue;
            }
            let trow = &mut self.tab[r * nc..(r + 1) * nc];
            if sparse {
                for &j in &nz {
                    trow[j] -= f * prow[j];
                }
            } else {
                for (t, &pv) in trow.iter_mut().zip(&prow) {
                    *t -= f * pv;
                }
            }
            trow[col] = -f * inv;
        }
        let f = self.d[col];
        if f != T::zero() {
            for (dj, &pv) in self.d.iter_mut().zip(&prow) {
                *dj -= f * pv;
            }
            self.d[col] = -f * inv;
        }
        let entering = self.nonbasic[col];
        let leaving = self.basis[row];
        self.basis[row] = entering;
        self.pos[entering] = Pos::Basic(row);
        self.nonbasic[col] = leaving;
        if self.kind[leaving] == Kind::Artificial {
            self.pos[leaving] = Pos::Dead;
            self.x[leaving] = T::zero();
            self.dead_cols += 1;
            if self.dead_cols * 4 > self.ncols {
                self.compact();
            }
        } else {
            self.pos[leaving] = Pos::NonBasic(col);
        }
    }
}

fn initial_value<T: Real>(lo: T, hi: T) -> T {
    if lo.is_finite() {
        lo
    } else if hi.is_finite() {
        hi
    } else {
        T::zero()
    }
}

fn merge_duplicates<T: Real>(col: &mut Vec<(usize, T)>) {
    col.sort_by_key(|&(i, _)| i);
    let mut out: Vec<(usize, T)> = Vec::with_capacity(col.len());
    for &(i, v) in col.iter() {
        match out.last_mut() {
            Some((li, lv)) if *li == i => *lv += v,
            _ => out.push((i, v)),
        }
    }
    out.retain(|&(_, v)| v != T::zero());
    *col = out;
}
