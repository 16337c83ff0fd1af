//! Random instances and oracles shared by the solver tests and the
//! acceptance run. Each suite returns the first failure as an error.

#![allow(dead_code)]

use cmebound_opt::{solve_lp, solve_sdp, ConicProgram64, LinearProgram64, PsdBlock, Sense, SolveStatus, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `Σ a_j x_j (≤ | =) b`.
#[derive(Clone, Debug)]
pub struct Row {
    pub a: Vec<f64>,
    pub b: f64,
    pub eq: bool,
}

/// Solves the square system by Gaussian elimination with partial pivoting.
pub fn solve_square(mut m: Vec<Vec<f64>>, mut r: Vec<f64>) -> Option<Vec<f64>> {
    let n = r.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))?;
        if m[p][k].abs() < 1e-10 {
            return None;
        }
        m.swap(k, p);
        r.swap(k, p);
        for i in (k + 1)..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                m[i][j] -= f * m[k][j];
            }
            r[i] -= f * r[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (r[i] - s) / m[i][i];
    }
    Some(x)
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Maximum of `c·x` over the vertices of the (bounded) polytope.
pub fn vertex_oracle(c: &[f64], rows: &[Row]) -> Option<f64> {
    let n = c.len();
    let eqs: Vec<&Row> = rows.iter().filter(|r| r.eq).collect();
    let ineqs: Vec<&Row> = rows.iter().filter(|r| !r.eq).collect();
    if eqs.len() > n {
        return None;
    }
    let mut best: Option<f64> = None;
    for combo in combinations(ineqs.len(), n - eqs.len()) {
        let active: Vec<&Row> = eqs.iter().copied().chain(combo.iter().map(|&i| ineqs[i])).collect();
        let m: Vec<Vec<f64>> = active.iter().map(|r| r.a.clone()).collect();
        let rhs: Vec<f64> = active.iter().map(|r| r.b).collect();
        let Some(x) = solve_square(m, rhs) else { continue };
        let feasible = rows.iter().all(|r| {
            let v: f64 = r.a.iter().zip(&x).map(|(a, b)| a * b).sum();
            if r.eq {
                (v - r.b).abs() <= 1e-9
            } else {
                v <= r.b + 1e-9
            }
        });
        if feasible {
            let val: f64 = c.iter().zip(&x).map(|(a, b)| a * b).sum();
            best = Some(best.map_or(val, |b: f64| b.max(val)));
        }
    }
    best
}

/// Random bounded LP with the origin (or a chosen point) feasible.
pub fn random_problem(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<Row>, LinearProgram64) {
    let n = rng.random_range(2..=6);
    let m = rng.random_range(1..=6);
    let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let upper: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..3.0)).collect();
    let mut rows = Vec::new();
    let mut lp = LinearProgram64::new();
    for (j, &u) in upper.iter().enumerate() {
        lp.add_var(format!("x{j}"), 0.0, u);
        let mut a = vec![0.0; n];
        a[j] = 1.0;
        rows.push(Row { a: a.clone(), b: u, eq: false });
        a[j] = -1.0;
        rows.push(Row { a, b: 0.0, eq: false });
    }
    // Interior point used to make equality rows consistent.
    let x0: Vec<f64> = upper.iter().map(|&u| u * rng.random_range(0.2..0.8)).collect();
    let n_eq = if n > 2 && rng.random_bool(0.4) { 1 } else { 0 };
    for k in 0..m {
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v: f64 = a.iter().zip(&x0).map(|(p, q)| p * q).sum();
        let row: Vec<(usize, f64)> = a.iter().copied().enumerate().collect();
        if k < n_eq {
            lp.add_eq(row, v);
            rows.push(Row { a, b: v, eq: true });
        } else {
            let b = v + rng.random_range(0.0..1.0);
            lp.add_le(row, b);
            rows.push(Row { a, b, eq: false });
        }
    }
    lp.set_objective(c.iter().copied().enumerate().collect(), Sense::Maximize);
    (c, rows, lp)
}

/// `[[1, vᵀ], [v, Y]] ⪰ 0`, minimize `tr(W Y)`: optimum `vᵀ W v` at `Y = v vᵀ`.
pub fn rank_one_instance(rng: &mut ChaCha8Rng) -> (ConicProgram64, f64) {
    let k = rng.random_range(2..=4);
    let v: Vec<f64> = (0..k).map(|_| rng.random_range(-2.0..2.0)).collect();
    // W = B Bᵀ + I.
    let bmat: Vec<Vec<f64>> = (0..k).map(|_| (0..k).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let mut w = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            w[i][j] = (0..k).map(|l| bmat[i][l] * bmat[j][l]).sum::<f64>() + if i == j { 1.0 } else { 0.0 };
        }
    }
    let mut idx = vec![vec![0usize; k]; k];
    let mut nv = 0;
    for i in 0..k {
        for j in 0..=i {
            idx[i][j] = nv;
            idx[j][i] = nv;
            nv += 1;
        }
    }
    let mut cp = ConicProgram64::new(nv);
    let mut blk = PsdBlock::new(k + 1);
    blk.add(None, 0, 0, 1.0);
    for i in 0..k {
        blk.add(None, i + 1, 0, v[i]);
        for j in 0..=i {
            blk.add(Some(idx[i][j]), i + 1, j + 1, 1.0);
        }
    }
    cp.add_block(blk);
    let mut c = vec![0.0; nv];
    for i in 0..k {
        for j in 0..k {
            c[idx[i][j]] += w[i][j];
        }
    }
    cp.set_objective(c, Sense::Minimize);
    let value: f64 = (0..k).map(|i| (0..k).map(|j| v[i] * w[i][j] * v[j]).sum::<f64>()).sum();
    (cp, value)
}

/// `max c·x s.t. A x ≤ b, 0 ≤ x ≤ u` as an LP and as a single diagonal block.
pub fn lp_and_diagonal_sdp(rng: &mut ChaCha8Rng) -> (LinearProgram64, ConicProgram64) {
    let n = rng.random_range(2..=5);
    let m = rng.random_range(1..=4);
    let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let u: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    let rows: Vec<(Vec<f64>, f64)> = (0..m)
        .map(|_| {
            let a: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            (a, rng.random_range(0.2..1.5))
        })
        .collect();
    let mut lp = LinearProgram64::new();
    for j in 0..n {
        lp.add_var(format!("x{j}"), 0.0, u[j]);
    }
    for (a, b) in &rows {
        lp.add_le(a.iter().copied().enumerate().collect(), *b);
    }
    lp.set_objective(c.iter().copied().enumerate().collect(), Sense::Maximize);

    let mut cp = ConicProgram64::new(n);
    let mut blk = PsdBlock::new(2 * n + m);
    for j in 0..n {
        blk.add(Some(j), j, j, 1.0);
        blk.add(None, n + j, n + j, u[j]);
        blk.add(Some(j), n + j, n + j, -1.0);
    }
    for (r, (a, b)) in rows.iter().enumerate() {
        let d = 2 * n + r;
        blk.add(None, d, d, *b);
        for (j, &aj) in a.iter().enumerate() {
            blk.add(Some(j), d, d, -aj);
        }
    }
    cp.add_block(blk);
    cp.set_objective(c, Sense::Maximize);
    (lp, cp)
}

/// Simplex against vertex enumeration; returns the largest deviation.
pub fn lp_suite(cases: usize, seed: u64) -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = Tolerances::default();
    let mut worst = 0.0f64;
    for case in 0..cases {
        let (c, rows, lp) = random_problem(&mut rng);
        let expected = vertex_oracle(&c, &rows).ok_or(format!("case {case}: oracle found no vertex"))?;
        let r = solve_lp(&lp, &tol);
        if r.status != SolveStatus::Optimal {
            return Err(format!("case {case}: status {:?}", r.status));
        }
        let err = (r.value - expected).abs();
        worst = worst.max(err);
        if err > 1e-9 || lp.max_violation(&r.primal) > 1e-9 {
            return Err(format!("case {case}: {} vs {}", r.value, expected));
        }
        // Weak duality for a maximization: dual bound ≥ primal value.
        if r.dual_value < r.value - 1e-9 || (r.dual_value - r.value).abs() > 1e-8 {
            return Err(format!("case {case}: dual {} primal {}", r.dual_value, r.value));
        }
    }
    Ok(worst)
}

/// Rank-one SDPs with known optima; returns the largest gap seen and the
/// smallest block eigenvalue.
pub fn sdp_suite(cases: usize, seed: u64) -> Result<(f64, f64), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = Tolerances::default();
    let (mut gap, mut eig) = (0.0f64, f64::INFINITY);
    for case in 0..cases {
        let (cp, expected) = rank_one_instance(&mut rng);
        let r = solve_sdp(&cp, &tol);
        if r.status != SolveStatus::Optimal {
            return Err(format!("case {case}: status {:?}", r.status));
        }
        let rel = (r.value - expected).abs() / (1.0 + expected.abs());
        if rel >= 1e-6 {
            return Err(format!("case {case}: {} vs {expected}", r.value));
        }
        // The dual value is a lower bound for a minimization.
        if r.dual_value > expected + 1e-7 * (1.0 + expected.abs()) {
            return Err(format!("case {case}: dual {} above optimum", r.dual_value));
        }
        let e = cp.min_block_eigenvalue(&r.primal);
        gap = gap.max(r.residuals.gap);
        eig = eig.min(e);
        if e < -1e-8 || r.residuals.gap > 1e-7 || r.residuals.primal_feas > tol.feas || r.residuals.dual_feas > tol.feas {
            return Err(format!("case {case}: eig {e}, residuals {:?}", r.residuals));
        }
    }
    Ok((gap, eig))
}

/// Diagonal SDPs against the simplex; returns the largest deviation.
pub fn diagonal_suite(cases: usize, seed: u64) -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = Tolerances::default();
    let mut worst = 0.0f64;
    for case in 0..cases {
        let (lp, cp) = lp_and_diagonal_sdp(&mut rng);
        let a = solve_lp(&lp, &tol);
        let b = solve_sdp(&cp, &tol);
        if a.status != SolveStatus::Optimal || b.status != SolveStatus::Optimal {
            return Err(format!("case {case}: {:?} / {:?}", a.status, b.status));
        }
        let err = (a.value - b.value).abs();
        worst = worst.max(err);
        if err > 1e-7 {
            return Err(format!("case {case}: {} vs {}", a.value, b.value));
        }
    }
    Ok(worst)
}
