//! Dense primal-dual interior point method for [`ConicProgram`].
//!
//! The program is first reduced: linear equalities are eliminated with a
//! pivoted QR factorization, the remaining free variables are whitened so that
//! their block coefficients are orthonormal (directions with no coefficient
//! anywhere are dropped or reported as unbounded), blocks and objective are
//! normalized. The reduced problem
//!
//! ```text
//! max b·y   s.t.  Z = C - Σ y_i A_i ⪰ 0        (the original program)
//! min <C,X> s.t.  <A_i, X> = b_i,  X ⪰ 0      (its dual)
//! ```
//!
//! is solved by an infeasible path-following method with the HKM search
//! direction and a Mehrotra predictor-corrector.

use crate::conic::{fill_sym, ConicProgram};
use crate::linalg::{cholesky, cholesky_inverse, congruence_inverse, pivoted_qr, sym_eigen, Mat};
use crate::result::{Residuals, SolveResult, SolveStatus};
use crate::{Real, Tolerances};

const MAX_IPM_ITER: usize = 250;

struct Block<T> {
    dim: usize,
    /// Normalization applied to the original block.
    nu: T,
    c: Mat<T>,
    a: Vec<Mat<T>>,
}

/// Reduced problem plus the affine map back to the original variables.
struct Reduced<T> {
    blocks: Vec<Block<T>>,
    b: Vec<T>,
    /// `y = y0 + map · s`.
    y0: Vec<T>,
    map: Mat<T>,
    /// Internal objective is `sign · c·y = kappa · (-b·s) + const`.
    kappa: T,
    sign: T,
    /// Null direction of the block map along which the objective improves.
    ray: Option<Vec<T>>,
}

enum Reduction<T> {
    Ready(Reduced<T>),
    Infeasible,
}

/// Solves `cp` with the dense interior point method.
pub fn solve_sdp<T: Real>(cp: &ConicProgram<T>, tol: &Tolerances) -> SolveResult<T> {
    let n = cp.num_vars;
    if cp.validate().is_err() || cp.blocks.iter().any(|b| b.dim > tol.dense_limit) {
        return SolveResult::failed(SolveStatus::NumericalFailure, n, 0);
    }
    let red = match reduce(cp, tol) {
        Reduction::Ready(r) => r,
        Reduction::Infeasible => return SolveResult::failed(SolveStatus::Infeasible, n, 0),
    };
    let m = red.b.len();
    if m == 0 {
        return finish_fixed_point(cp, &red, tol);
    }
    let out = path_following(&red, tol);
    let mut res = assemble(cp, &red, out, tol);
    if res.status.is_optimal() {
        if let Some(ray) = &red.ray {
            res.status = SolveStatus::Unbounded;
            res.certificate = Some(ray.clone());
        }
    }
    res
}

fn reduce<T: Real>(cp: &ConicProgram<T>, tol: &Tolerances) -> Reduction<T> {
    let n = cp.num_vars;
    let feas = T::c(tol.feas);
    // Affine parametrization y = y0 + N t of the equality set.
    let (y0, null) = if cp.eq_rows.is_empty() {
        (vec![T::zero(); n], Mat::identity(n))
    } else {
        let p = cp.eq_rows.len();
        let mut at = Mat::zeros(n, p);
        for (i, row) in cp.eq_rows.iter().enumerate() {
            for &(j, v) in row {
                at[(j, i)] += v;
            }
        }
        let qr = pivoted_qr(&at, T::c(1e-12));
        let r = qr.rank;
        // Pᵀ A = Rᵀ Qᵀ, so with y = Q1 z we need R11ᵀ z = (Pᵀ b)[..r].
        let pb: Vec<T> = qr.perm.iter().map(|&k| cp.eq_rhs[k]).collect();
        let mut z = vec![T::zero(); r];
        for i in 0..r {
            let mut s = pb[i];
            for k in 0..i {
                s -= qr.r[(k, i)] * z[k];
            }
            z[i] = s / qr.r[(i, i)];
        }
        let mut y0 = vec![T::zero(); n];
        for (k, &zk) in z.iter().enumerate() {
            for i in 0..n {
                y0[i] += qr.q[(i, k)] * zk;
            }
        }
        let bnorm = cp.eq_rhs.iter().fold(T::one(), |a, &v| a.max(v.abs()));
        if cp.max_eq_violation(&y0) > feas * bnorm * T::c(10.0) {
            return Reduction::Infeasible;
        }
        let mut null = Mat::zeros(n, n - r);
        for i in 0..n {
            for k in r..n {
                null[(i, k - r)] = qr.q[(i, k)];
            }
        }
        (y0, null)
    };
    let nt = null.cols();

    // Blocks in t: constant F(y0), coefficients Σ_i N_il G_i.
    let mut blocks = Vec::with_capacity(cp.blocks.len());
    for blk in &cp.blocks {
        let d = blk.dim;
        let mut c = Mat::zeros(d, d);
        fill_sym(&mut c, &blk.constant, T::one());
        let mut a = vec![Mat::zeros(d, d); nt];
        for (k, e) in &blk.coeffs {
            if y0[*k] != T::zero() {
                fill_sym(&mut c, e, y0[*k]);
            }
            for (l, al) in a.iter_mut().enumerate() {
                let w = null[(*k, l)];
                if w != T::zero() {
                    fill_sym(al, e, w);
                }
            }
        }
        let mut nu = c.frobenius_norm();
        for al in &a {
            nu = nu.max(al.frobenius_norm());
        }
        if nu == T::zero() {
            nu = T::one();
        }
        let inv = T::one() / nu;
        c.scale(inv);
        for al in &mut a {
            al.scale(inv);
        }
        blocks.push(Block { dim: d, nu, c, a });
    }
    let sign: T = cp.sense.sign();
    let mut ct = vec![T::zero(); nt];
    for l in 0..nt {
        for i in 0..n {
            ct[l] += sign * cp.objective[i] * null[(i, l)];
        }
    }

    // Whitening: Gram matrix of the coefficient matrices.
    let mut gram = Mat::zeros(nt, nt);
    for blk in &blocks {
        for l in 0..nt {
            for k in 0..=l {
                let g = blk.a[l].dot(&blk.a[k]);
                gram[(l, k)] += g;
                if k != l {
                    gram[(k, l)] += g;
                }
            }
        }
    }
    let (vals, vecs) = sym_eigen(&gram);
    let lmax = vals.iter().fold(T::zero(), |a, &v| a.max(v));
    let cut = lmax * T::c(1e-12);
    let keep: Vec<usize> = (0..nt).filter(|&q| vals[q] > cut && vals[q] > T::zero()).collect();
    let cnorm = ct.iter().fold(T::zero(), |a, &v| a.max(v.abs()));
    let mut ray = None;
    let mut ct_proj = ct.clone();
    for q in 0..nt {
        if keep.contains(&q) {
            continue;
        }
        let cu: T = (0..nt).map(|l| ct[l] * vecs[(l, q)]).sum();
        if cu.abs() > T::c(1e-9) * cnorm.max(T::one()) && ray.is_none() {
            // Moving against the objective along u never leaves the region.
            let mut r = vec![T::zero(); n];
            for i in 0..n {
                let v: T = (0..nt).map(|l| null[(i, l)] * vecs[(l, q)]).sum();
                r[i] = -v * cu.signum();
            }
            ray = Some(r);
        }
        for l in 0..nt {
            ct_proj[l] -= cu * vecs[(l, q)];
        }
    }
    let ns = keep.len();
    // t = W s with W = V_keep Λ^{-1/2}.
    let mut w = Mat::zeros(nt, ns);
    for (col, &q) in keep.iter().enumerate() {
        let f = T::one() / vals[q].sqrt();
        for l in 0..nt {
            w[(l, col)] = vecs[(l, q)] * f;
        }
    }
    for blk in &mut blocks {
        let d = blk.dim;
        let mut a2 = vec![Mat::zeros(d, d); ns];
        for (col, a2c) in a2.iter_mut().enumerate() {
            for l in 0..nt {
                let f = w[(l, col)];
                if f != T::zero() {
                    a2c.add_scaled(f, &blk.a[l]);
                }
            }
        }
        // Reduced standard form uses Z = C - Σ s_i A_i.
        for a in &mut a2 {
            a.scale(-T::one());
        }
        blk.a = a2;
    }
    let mut cs = vec![T::zero(); ns];
    for col in 0..ns {
        for l in 0..nt {
            cs[col] += ct_proj[l] * w[(l, col)];
        }
    }
    let kappa = cs.iter().fold(T::zero(), |a, &v| a.max(v.abs()));
    let kappa = if kappa > T::zero() { kappa } else { T::one() };
    let b: Vec<T> = cs.iter().map(|&v| -v / kappa).collect();
    let map = null.matmul(&w);
    Reduction::Ready(Reduced { blocks, b, y0, map, kappa, sign, ray })
}

struct IpmOut<T> {
    status: SolveStatus,
    x: Vec<Mat<T>>,
    y: Vec<T>,
    pinf: T,
    dinf: T,
    gap: T,
    iterations: usize,
}

fn apply_a<T: Real>(red: &Reduced<T>, x: &[Mat<T>]) -> Vec<T> {
    let m = red.b.len();
    let mut out = vec![T::zero(); m];
    for (blk, xk) in red.blocks.iter().zip(x) {
        for i in 0..m {
            out[i] += blk.a[i].dot(xk);
        }
    }
    out
}

fn apply_at<T: Real>(blk: &Block<T>, y: &[T]) -> Mat<T> {
    let mut out = Mat::zeros(blk.dim, blk.dim);
    for (ai, &yi) in blk.a.iter().zip(y) {
        if yi != T::zero() {
            out.add_scaled(yi, ai);
        }
    }
    out
}

/// Largest `α ≤ 1/γ`-scaled step keeping `X + α dX ⪰ 0`.
fn max_step<T: Real>(x: &Mat<T>, dx: &Mat<T>) -> T {
    let Some(l) = cholesky(x) else { return T::zero() };
    let w = congruence_inverse(&l, dx);
    let (vals, _) = sym_eigen(&w);
    let lmin = vals.first().copied().unwrap_or(T::zero());
    if lmin >= T::zero() {
        T::infinity()
    } else {
        -T::one() / lmin
    }
}

fn path_following<T: Real>(red: &Reduced<T>, tol: &Tolerances) -> IpmOut<T> {
    let m = red.b.len();
    let nb = red.blocks.len();
    let ntot: usize = red.blocks.iter().map(|b| b.dim).sum();
    let nt = T::c(ntot.max(1) as f64);
    let feas = T::c(tol.feas);
    let gap_tol = T::c(tol.gap);
    let bnorm = red.b.iter().map(|&v| v * v).sum::<T>().sqrt();
    let cnorm = red.blocks.iter().map(|b| b.c.dot(&b.c)).sum::<T>().sqrt();

    let mut xi = T::c(10.0).max(nt.sqrt());
    let mut eta = T::c(10.0).max(nt.sqrt());
    for (i, &bi) in red.b.iter().enumerate() {
        let an: T = red.blocks.iter().map(|b| b.a[i].dot(&b.a[i])).sum::<T>().sqrt();
        xi = xi.max(nt * (T::one() + bi.abs()) / (T::one() + an));
        eta = eta.max(an);
    }
    eta = eta.max(cnorm * T::c(10.0)).max(T::c(10.0));
    let mut x: Vec<Mat<T>> = red.blocks.iter().map(|b| Mat::scaled_identity(b.dim, xi)).collect();
    let mut z: Vec<Mat<T>> = red.blocks.iter().map(|b| Mat::scaled_identity(b.dim, eta)).collect();
    let mut y = vec![T::zero(); m];
    let tr0: T = x.iter().map(|m| m.trace()).sum();

    let mut stalls = 0;
    let mut polish = 0;
    let mut best: Option<IpmOut<T>> = None;
    let mut last = (T::infinity(), T::infinity(), T::infinity());
    let max_iter = tol.max_iter.min(MAX_IPM_ITER);
    for iter in 0..max_iter {
        // Residuals.
        let ax = apply_a(red, &x);
        let rp: Vec<T> = red.b.iter().zip(&ax).map(|(&b, &a)| b - a).collect();
        let rd: Vec<Mat<T>> = red
            .blocks
            .iter()
            .zip(&z)
            .map(|(blk, zk)| {
                let mut r = blk.c.clone();
                r.add_scaled(-T::one(), zk);
                r.add_scaled(-T::one(), &apply_at(blk, &y));
                r
            })
            .collect();
        let pobj: T = red.blocks.iter().zip(&x).map(|(b, xk)| b.c.dot(xk)).sum();
        let dobj: T = red.b.iter().zip(&y).map(|(&b, &v)| b * v).sum();
        let xz: T = x.iter().zip(&z).map(|(a, b)| a.dot(b)).sum();
        let mu = xz / nt;
        let pinf = rp.iter().map(|&v| v * v).sum::<T>().sqrt() / (T::one() + bnorm);
        let dinf = rd.iter().map(|r| r.dot(r)).sum::<T>().sqrt() / (T::one() + cnorm);
        let gap = (pobj - dobj).abs() / (T::one() + pobj.abs() + dobj.abs());
        let rel_xz = xz / (T::one() + pobj.abs() + dobj.abs());
        last = (pinf, dinf, gap.max(rel_xz));
        if pinf <= feas && dinf <= feas && gap <= gap_tol && rel_xz <= gap_tol {
            // Keep polishing for a few iterations: the returned values are
            // then well inside the tolerances.
            let tight = T::c(1e-2);
            let done = (pinf <= feas * tight && dinf <= feas * tight && gap <= gap_tol * tight && rel_xz <= gap_tol * tight) || polish >= 6;
            polish += 1;
            let out = IpmOut { status: SolveStatus::Optimal, x: x.clone(), y: y.clone(), pinf, dinf, gap, iterations: iter };
            if done {
                return out;
            }
            best = Some(out);
        }
        // Infeasibility heuristics.
        let trx: T = x.iter().map(|m| m.trace()).sum();
        if best.is_none() && trx > T::c(1e8) * (T::one() + tr0) && pobj < T::zero() {
            let axn = ax.iter().map(|&v| v * v).sum::<T>().sqrt();
            if axn / -pobj < T::c(1e-6) {
                return IpmOut { status: SolveStatus::Infeasible, x, y, pinf, dinf, gap, iterations: iter };
            }
        }
        let ynorm = y.iter().map(|&v| v * v).sum::<T>().sqrt();
        if best.is_none() && ynorm > T::c(1e8) && dobj > T::zero() {
            let r: T = red
                .blocks
                .iter()
                .zip(&z)
                .map(|(blk, zk)| {
                    let mut t = apply_at(blk, &y);
                    t.add_scaled(T::one(), zk);
                    t.dot(&t)
                })
                .sum::<T>()
                .sqrt();
            if r / dobj < T::c(1e-6) {
                return IpmOut { status: SolveStatus::Unbounded, x, y, pinf, dinf, gap, iterations: iter };
            }
        }

        // Schur complement M_ij = Σ_k tr(A_i X A_j Z^{-1}).
        let mut zinv = Vec::with_capacity(nb);
        for zk in &z {
            match cholesky(zk) {
                Some(l) => zinv.push(cholesky_inverse(&l)),
                None => return best.unwrap_or(IpmOut { status: SolveStatus::NumericalFailure, x, y, pinf, dinf, gap, iterations: iter }),
            }
        }
        let mut mm = Mat::zeros(m, m);
        for (k, blk) in red.blocks.iter().enumerate() {
            for j in 0..m {
                let bj = x[k].matmul(&blk.a[j]).matmul(&zinv[k]);
                for i in 0..=j {
                    let v = blk.a[i].dot(&bj);
                    mm[(i, j)] += v;
                }
            }
        }
        for j in 0..m {
            for i in 0..j {
                mm[(j, i)] = mm[(i, j)];
            }
        }
        let Some(lm) = factor_regularized(&mm) else {
            return best.unwrap_or(IpmOut { status: SolveStatus::NumericalFailure, x, y, pinf, dinf, gap, iterations: iter });
        };

        let direction = |kmat: &[Mat<T>]| -> (Vec<Mat<T>>, Vec<T>, Vec<Mat<T>>) {
            // G = K Z^{-1} - X - X R_d Z^{-1}.
            let mut rhs = rp.clone();
            let mut g_blocks = Vec::with_capacity(nb);
            for k in 0..nb {
                let mut g = kmat[k].matmul(&zinv[k]);
                g.add_scaled(-T::one(), &x[k]);
                let xr = x[k].matmul(&rd[k]).matmul(&zinv[k]);
                g.add_scaled(-T::one(), &xr);
                g_blocks.push(g);
            }
            let ag = apply_a(red, &g_blocks);
            for i in 0..m {
                rhs[i] -= ag[i];
            }
            crate::linalg::cholesky_solve(&lm, &mut rhs);
            let dy = rhs;
            let mut dzs = Vec::with_capacity(nb);
            let mut dxs = Vec::with_capacity(nb);
            for k in 0..nb {
                let mut dz = rd[k].clone();
                dz.add_scaled(-T::one(), &apply_at(&red.blocks[k], &dy));
                let mut dx = kmat[k].matmul(&zinv[k]);
                dx.add_scaled(-T::one(), &x[k]);
                let xdz = x[k].matmul(&dz).matmul(&zinv[k]);
                dx.add_scaled(-T::one(), &xdz);
                dx.symmetrize();
                dzs.push(dz);
                dxs.push(dx);
            }
            (dxs, dy, dzs)
        };

        // Predictor.
        let zero_k: Vec<Mat<T>> = red.blocks.iter().map(|b| Mat::zeros(b.dim, b.dim)).collect();
        let (dxa, _dya, dza) = direction(&zero_k);
        let (ap, ad) = step_lengths(&x, &dxa, &z, &dza);
        let ap_a = ap.min(T::one());
        let ad_a = ad.min(T::one());
        let mut xz_a = T::zero();
        for k in 0..nb {
            let mut xa = x[k].clone();
            xa.add_scaled(ap_a, &dxa[k]);
            let mut za = z[k].clone();
            za.add_scaled(ad_a, &dza[k]);
            xz_a += xa.dot(&za);
        }
        let ratio = (xz_a / xz).max(T::zero()).min(T::one());
        let sigma = ratio * ratio * ratio;
        // Corrector.
        let kmat: Vec<Mat<T>> = (0..nb)
            .map(|k| {
                let mut km = Mat::scaled_identity(red.blocks[k].dim, sigma * mu);
                let c = dxa[k].matmul(&dza[k]);
                km.add_scaled(-T::one(), &c);
                km
            })
            .collect();
        let (dx, dy, dz) = direction(&kmat);
        let (ap, ad) = step_lengths(&x, &dx, &z, &dz);
        let gamma = T::c(0.9) + T::c(0.09) * ap.min(ad).min(T::one());
        let ap = (gamma * ap).min(T::one());
        let ad = (gamma * ad).min(T::one());
        if ap < T::c(1e-10) && ad < T::c(1e-10) {
            stalls += 1;
            if stalls >= 3 {
                break;
            }
        } else {
            stalls = 0;
        }
        for k in 0..nb {
            x[k].add_scaled(ap, &dx[k]);
            x[k].symmetrize();
            z[k].add_scaled(ad, &dz[k]);
            z[k].symmetrize();
        }
        for i in 0..m {
            y[i] += ad * dy[i];
        }
    }
    if let Some(b) = best {
        return b;
    }
    let status = if stalls >= 3 { SolveStatus::NumericalFailure } else { SolveStatus::IterationLimit };
    IpmOut { status, x, y, pinf: last.0, dinf: last.1, gap: last.2, iterations: max_iter }
}

fn step_lengths<T: Real>(x: &[Mat<T>], dx: &[Mat<T>], z: &[Mat<T>], dz: &[Mat<T>]) -> (T, T) {
    let mut ap = T::infinity();
    let mut ad = T::infinity();
    for k in 0..x.len() {
        ap = ap.min(max_step(&x[k], &dx[k]));
        ad = ad.min(max_step(&z[k], &dz[k]));
    }
    (ap, ad)
}

/// Cholesky of the Schur complement with growing diagonal regularization.
fn factor_regularized<T: Real>(m: &Mat<T>) -> Option<Mat<T>> {
    if let Some(l) = cholesky(m) {
        return Some(l);
    }
    let dmax = (0..m.rows()).fold(T::zero(), |a, i| a.max(m[(i, i)].abs()));
    let mut delta = dmax.max(T::min_positive_value()) * T::c(1e-14);
    for _ in 0..6 {
        let mut r = m.clone();
        for i in 0..m.rows() {
            r[(i, i)] += delta;
        }
        if let Some(l) = cholesky(&r) {
            return Some(l);
        }
        delta *= T::c(100.0);
    }
    None
}

fn to_original<T: Real>(red: &Reduced<T>, s: &[T]) -> Vec<T> {
    let mut y = red.y0.clone();
    for (i, yi) in y.iter_mut().enumerate() {
        for (l, &sl) in s.iter().enumerate() {
            *yi += red.map[(i, l)] * sl;
        }
    }
    y
}

fn assemble<T: Real>(cp: &ConicProgram<T>, red: &Reduced<T>, out: IpmOut<T>, tol: &Tolerances) -> SolveResult<T> {
    let y = to_original(red, &out.y);
    let value = cp.objective_value(&y);
    // <C, X> in the reduced problem bounds -b·s from above, which maps to a
    // bound on the original objective from the conservative side.
    let cx: T = red.blocks.iter().zip(&out.x).map(|(b, xk)| b.c.dot(xk)).sum();
    let c0: T = cp.objective_value(&red.y0);
    let internal_bound = -cx * red.kappa + red.sign * c0;
    let dual_value = red.sign * internal_bound;
    let dual_blocks: Vec<Vec<T>> = red
        .blocks
        .iter()
        .zip(&out.x)
        .map(|(b, xk)| {
            let mut m = xk.clone();
            m.scale(red.kappa / b.nu);
            m.into_vec()
        })
        .collect();
    let dual = equality_multipliers(cp, &dual_blocks, red.sign);
    let mut status = out.status;
    let min_eig = cp.min_block_eigenvalue(&y);
    if status.is_optimal() && min_eig < -T::c(tol.feas) * T::c(10.0) {
        status = SolveStatus::NumericalFailure;
    }
    let certificate = match status {
        SolveStatus::Infeasible => Some(dual_blocks.iter().flatten().copied().collect()),
        SolveStatus::Unbounded => {
            let mut r = to_original(red, &out.y);
            for (ri, &y0) in r.iter_mut().zip(&red.y0) {
                *ri -= y0;
            }
            Some(r)
        }
        _ => None,
    };
    SolveResult {
        status,
        value,
        dual_value,
        primal: y,
        dual,
        dual_blocks,
        certificate,
        residuals: Residuals { primal_feas: out.dinf.to_f64_lossy(), dual_feas: out.pinf.to_f64_lossy(), gap: out.gap.to_f64_lossy() },
        iterations: out.iterations,
    }
}

/// Least-squares multipliers `λ` with `Aᵀλ ≈ s·c - Σ_k <G_k, X_k>`.
fn equality_multipliers<T: Real>(cp: &ConicProgram<T>, dual_blocks: &[Vec<T>], sign: T) -> Vec<T> {
    let p = cp.eq_rows.len();
    if p == 0 {
        return Vec::new();
    }
    let n = cp.num_vars;
    let mut r: Vec<T> = cp.objective.iter().map(|&c| sign * c).collect();
    for (blk, xk) in cp.blocks.iter().zip(dual_blocks) {
        let xm = Mat::from_vec(blk.dim, blk.dim, xk.clone());
        for (k, e) in &blk.coeffs {
            let mut g = Mat::zeros(blk.dim, blk.dim);
            fill_sym(&mut g, e, T::one());
            r[*k] -= g.dot(&xm);
        }
    }
    let mut at = Mat::zeros(n, p);
    for (i, row) in cp.eq_rows.iter().enumerate() {
        for &(j, v) in row {
            at[(j, i)] += v;
        }
    }
    let qr = pivoted_qr(&at, T::c(1e-12));
    let rank = qr.rank;
    let qtr: Vec<T> = (0..rank).map(|k| (0..n).map(|i| qr.q[(i, k)] * r[i]).sum()).collect();
    let mut w = vec![T::zero(); p];
    for i in (0..rank).rev() {
        let mut s = qtr[i];
        for k in (i + 1)..rank {
            s -= qr.r[(i, k)] * w[k];
        }
        w[i] = s / qr.r[(i, i)];
    }
    let mut lambda = vec![T::zero(); p];
    for (k, &orig) in qr.perm.iter().enumerate() {
        lambda[orig] = sign * w[k];
    }
    lambda
}

/// No free direction remains: the equalities pin the point.
fn finish_fixed_point<T: Real>(cp: &ConicProgram<T>, red: &Reduced<T>, tol: &Tolerances) -> SolveResult<T> {
    let y = red.y0.clone();
    let min_eig = cp.min_block_eigenvalue(&y);
    if min_eig < -T::c(tol.feas) {
        return SolveResult::failed(SolveStatus::Infeasible, cp.num_vars, 0);
    }
    let value = cp.objective_value(&y);
    let status = if red.ray.is_some() { SolveStatus::Unbounded } else { SolveStatus::Optimal };
    SolveResult {
        status,
        value,
        dual_value: value,
        primal: y,
        dual: Vec::new(),
        dual_blocks: Vec::new(),
        certificate: red.ray.clone(),
        residuals: Residuals::default(),
        iterations: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::PsdBlock;
    use crate::lp::Sense;

    #[test]
    fn two_by_two_bound() {
        let mut cp = ConicProgram::<f64>::new(1);
        let mut b = PsdBlock::new(2);
        b.add(None, 0, 0, 1.0);
        b.add(None, 1, 1, 1.0);
        b.add(Some(0), 1, 0, 1.0);
        cp.add_block(b);
        cp.set_objective(vec![1.0], Sense::Maximize);
        let r = solve_sdp(&cp, &Tolerances::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.value - 1.0).abs() < 1e-6, "{}", r.value);
        assert!(r.dual_value >= 1.0 - 1e-7);
        assert!(r.dual_value - r.value < 1e-6);
    }

    #[test]
    fn moment_matrix_boundary() {
        // M = [[1, y1], [y1, y2]], y1 = 0.5: min y2 = 0.25.
        let mut cp = ConicProgram::<f64>::new(2);
        let mut b = PsdBlock::new(2);
        b.add(None, 0, 0, 1.0);
        b.add(Some(0), 1, 0, 1.0);
        b.add(Some(1), 1, 1, 1.0);
        cp.add_block(b);
        cp.add_eq(vec![(0, 1.0)], 0.5);
        cp.set_objective(vec![0.0, 1.0], Sense::Minimize);
        let r = solve_sdp(&cp, &Tolerances::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.value - 0.25).abs() < 1e-6);
        assert!(r.dual_value <= 0.25 + 1e-9);
        assert_eq!(r.dual.len(), 1);
    }

    #[test]
    fn detects_infeasible_equalities() {
        let mut cp = ConicProgram::<f64>::new(1);
        cp.add_eq(vec![(0, 1.0)], 1.0);
        cp.add_eq(vec![(0, 2.0)], 3.0);
        let r = solve_sdp(&cp, &Tolerances::default());
        assert_eq!(r.status, SolveStatus::Infeasible);
    }

    #[test]
    fn detects_infeasible_block() {
        // [[y, 0], [0, -1 - y]] ⪰ 0 needs y ≥ 0 and y ≤ -1.
        let mut cp = ConicProgram::<f64>::new(1);
        let mut b = PsdBlock::new(2);
        b.add(Some(0), 0, 0, 1.0);
        b.add(None, 1, 1, -1.0);
        b.add(Some(0), 1, 1, -1.0);
        cp.add_block(b);
        cp.set_objective(vec![1.0], Sense::Minimize);
        let r = solve_sdp(&cp, &Tolerances::default());
        assert_eq!(r.status, SolveStatus::Infeasible);
    }

    #[test]
    fn detects_unbounded_free_direction() {
        // y2 appears nowhere; maximize y2.
        let mut cp = ConicProgram::<f64>::new(2);
        let mut b = PsdBlock::new(1);
        b.add(None, 0, 0, 1.0);
        b.add(Some(0), 0, 0, -1.0);
        cp.add_block(b);
        cp.set_objective(vec![0.0, 1.0], Sense::Maximize);
        let r = solve_sdp(&cp, &Tolerances::default());
        assert_eq!(r.status, SolveStatus::Unbounded);
        assert!(r.certificate.unwrap()[1] > 0.0);
    }

    #[test]
    fn detects_unbounded_recession() {
        // [[y, 0],[0, 1]] ⪰ 0, maximize y.
        let mut cp = ConicProgram::<f64>::new(1);
        let mut b = PsdBlock::new(2);
        b.add(Some(0), 0, 0, 1.0);
        b.add(None, 1, 1, 1.0);
        cp.add_block(b);
        cp.set_objective(vec![1.0], Sense::Maximize);
        let r = solve_sdp(&cp, &Tolerances::default());
        assert_eq!(r.status, SolveStatus::Unbounded);
    }
}
