//! SDPA sparse format (`.dat-s`).
//!
//! SDPA solves `min Σ c_i x_i  s.t.  Σ_i F_i x_i - F_0 ⪰ 0`. A
//! [`ConicProgram`] block `G_0 + Σ y_i G_i` maps to `F_0 = -G_0`, `F_i = G_i`
//! with `x = y`. Maximization negates `c`. Equalities `a·y = b` become pairs
//! of diagonal entries `a·y - b ≥ 0`, `b - a·y ≥ 0` in a trailing LP block.
//! Header comment lines record the sense and the number of equality pairs so
//! that [`read_sdpa`] restores the original program exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::conic::{ConicProgram, PsdBlock};
use crate::lp::Sense;
use crate::{OptError, Real};

const SENSE_TAG: &str = "* cmebound sense ";
const EQ_TAG: &str = "* cmebound equality-pairs ";

pub fn write_sdpa<T: Real, W: Write>(cp: &ConicProgram<T>, mut w: W) -> std::io::Result<()> {
    let m = cp.num_vars;
    let n_eq = cp.eq_rows.len();
    writeln!(w, "{SENSE_TAG}{}", cp.sense.as_str())?;
    writeln!(w, "{EQ_TAG}{n_eq}")?;
    let nblocks = cp.blocks.len() + usize::from(n_eq > 0);
    writeln!(w, "{m}")?;
    writeln!(w, "{nblocks}")?;
    let mut sizes: Vec<String> = cp.blocks.iter().map(|b| b.dim.to_string()).collect();
    if n_eq > 0 {
        sizes.push(format!("-{}", 2 * n_eq));
    }
    writeln!(w, "{}", sizes.join(" "))?;
    let sign: T = cp.sense.sign();
    let c: Vec<String> = cp.objective.iter().map(|&v| fmt_num(sign * v)).collect();
    writeln!(w, "{}", c.join(" "))?;

    // Entries grouped by matrix number, then block, then position.
    let mut entries: Vec<(usize, usize, usize, usize, T)> = Vec::new();
    for (bi, blk) in cp.blocks.iter().enumerate() {
        for &(i, j, v) in &blk.constant {
            entries.push((0, bi + 1, j + 1, i + 1, -v));
        }
        for (k, e) in &blk.coeffs {
            for &(i, j, v) in e {
                entries.push((k + 1, bi + 1, j + 1, i + 1, v));
            }
        }
    }
    if n_eq > 0 {
        let lb = cp.blocks.len() + 1;
        for (r, (row, &b)) in cp.eq_rows.iter().zip(&cp.eq_rhs).enumerate() {
            let (p, q) = (2 * r + 1, 2 * r + 2);
            entries.push((0, lb, p, p, b));
            entries.push((0, lb, q, q, -b));
            for &(k, v) in row {
                entries.push((k + 1, lb, p, p, v));
                entries.push((k + 1, lb, q, q, -v));
            }
        }
    }
    entries.sort_by(|a, b| (a.0, a.1, a.2, a.3).cmp(&(b.0, b.1, b.2, b.3)));
    for (mat, blk, i, j, v) in entries {
        if v != T::zero() {
            writeln!(w, "{mat} {blk} {i} {j} {}", fmt_num(v))?;
        }
    }
    w.flush()
}

/// Writes `cp` to `path` in SDPA sparse format.
pub fn export_sdpa<T: Real>(cp: &ConicProgram<T>, path: &Path) -> Result<(), OptError> {
    let f = File::create(path)?;
    write_sdpa(cp, BufWriter::new(f))?;
    Ok(())
}

/// Shortest representation that parses back to the same value.
fn fmt_num<T: Real>(v: T) -> String {
    let v = if v == T::zero() { T::zero() } else { v };
    format!("{v:e}")
}

pub fn read_sdpa_file<T: Real>(path: &Path) -> Result<ConicProgram<T>, OptError> {
    read_sdpa(BufReader::new(File::open(path)?))
}

/// Parses SDPA sparse format. Files written by [`write_sdpa`] come back as
/// the original program; other files are read as a minimization with every
/// block (LP blocks as diagonal PSD blocks).
pub fn read_sdpa<T: Real, R: BufRead>(r: R) -> Result<ConicProgram<T>, OptError> {
    let mut sense = Sense::Minimize;
    let mut n_eq = 0usize;
    let mut tokens: Vec<(usize, String)> = Vec::new();
    let mut header_lines = Vec::new();
    for (ln, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = ln + 1;
        if let Some(rest) = line.strip_prefix(SENSE_TAG) {
            sense = if rest.trim() == "max" { Sense::Maximize } else { Sense::Minimize };
            continue;
        }
        if let Some(rest) = line.strip_prefix(EQ_TAG) {
            n_eq = rest.trim().parse().map_err(|_| OptError::Parse { line: lineno, msg: "bad equality count".into() })?;
            continue;
        }
        let t = line.trim_start();
        if t.starts_with('*') || t.starts_with('"') || t.is_empty() {
            continue;
        }
        header_lines.push((lineno, line));
    }
    let parse_err = |line: usize, msg: &str| OptError::Parse { line, msg: msg.to_string() };
    let clean = |s: &str| s.replace([',', '{', '}', '(', ')'], " ");
    let mut it = header_lines.into_iter();
    let (l1, s1) = it.next().ok_or_else(|| parse_err(0, "missing variable count"))?;
    let m: usize = clean(&s1).split_whitespace().next().and_then(|v| v.parse().ok()).ok_or_else(|| parse_err(l1, "bad variable count"))?;
    let (l2, s2) = it.next().ok_or_else(|| parse_err(l1, "missing block count"))?;
    let nblocks: usize = clean(&s2).split_whitespace().next().and_then(|v| v.parse().ok()).ok_or_else(|| parse_err(l2, "bad block count"))?;
    let (l3, s3) = it.next().ok_or_else(|| parse_err(l2, "missing block structure"))?;
    let sizes: Vec<i64> = clean(&s3)
        .split_whitespace()
        .take(nblocks)
        .map(|v| v.parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| parse_err(l3, "bad block structure"))?;
    if sizes.len() != nblocks || sizes.contains(&0) {
        return Err(parse_err(l3, "bad block structure"));
    }
    // The objective may span several lines.
    let mut c: Vec<T> = Vec::with_capacity(m);
    let mut last = l3;
    while c.len() < m {
        let (l, s) = it.next().ok_or_else(|| parse_err(last, "missing objective"))?;
        last = l;
        for tok in clean(&s).split_whitespace() {
            if c.len() < m {
                c.push(tok.parse::<T>().map_err(|_| parse_err(l, "bad objective entry"))?);
            }
        }
    }
    for (l, s) in it {
        tokens.push((l, s));
    }

    let lp_block = if n_eq > 0 { Some(nblocks - 1) } else { None };
    if let Some(lb) = lp_block {
        if sizes[lb] != -(2 * n_eq as i64) {
            return Err(parse_err(l3, "equality block size does not match header"));
        }
    }
    let mut blocks: Vec<PsdBlock<T>> =
        sizes.iter().enumerate().filter(|(b, _)| Some(*b) != lp_block).map(|(_, &s)| PsdBlock::new(s.unsigned_abs() as usize)).collect();
    let mut eq_rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); n_eq];
    let mut eq_rhs = vec![T::zero(); n_eq];
    for (l, s) in tokens {
        let f: Vec<&str> = s.split_whitespace().collect();
        if f.len() < 5 {
            return Err(parse_err(l, "expected five fields"));
        }
        let mat: usize = f[0].parse().map_err(|_| parse_err(l, "bad matrix number"))?;
        let blk: usize = f[1].parse().map_err(|_| parse_err(l, "bad block number"))?;
        let i: usize = f[2].parse().map_err(|_| parse_err(l, "bad row"))?;
        let j: usize = f[3].parse().map_err(|_| parse_err(l, "bad column"))?;
        let v: T = f[4].parse().map_err(|_| parse_err(l, "bad value"))?;
        if mat > m || blk == 0 || blk > nblocks || i == 0 || j == 0 {
            return Err(parse_err(l, "index out of range"));
        }
        let size = sizes[blk - 1].unsigned_abs() as usize;
        if i > size || j > size || (sizes[blk - 1] < 0 && i != j) {
            return Err(parse_err(l, "entry outside block"));
        }
        if Some(blk - 1) == lp_block {
            // Odd diagonal positions hold `a·y - b`; their partners are mirrors.
            if i % 2 == 0 {
                continue;
            }
            let r = (i - 1) / 2;
            if mat == 0 {
                eq_rhs[r] = v;
            } else {
                eq_rows[r].push((mat - 1, v));
            }
            continue;
        }
        let bi = if lp_block.is_some_and(|lb| blk - 1 > lb) { blk - 2 } else { blk - 1 };
        let (a, b) = (i - 1, j - 1);
        if mat == 0 {
            blocks[bi].add(None, a, b, -v);
        } else {
            blocks[bi].add(Some(mat - 1), a, b, v);
        }
    }
    let sign: T = sense.sign();
    let mut cp = ConicProgram::new(m);
    cp.objective = c.into_iter().map(|v| sign * v).collect();
    cp.sense = sense;
    for b in blocks {
        cp.add_block(b);
    }
    for (row, b) in eq_rows.into_iter().zip(eq_rhs) {
        cp.add_eq(row, b);
    }
    cp.canonicalize();
    Ok(cp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trivial() -> ConicProgram<f64> {
        let mut cp = ConicProgram::new(1);
        let mut b = PsdBlock::new(2);
        b.add(None, 0, 0, 1.0);
        b.add(None, 1, 1, 1.0);
        b.add(Some(0), 1, 0, 1.0);
        cp.add_block(b);
        cp.set_objective(vec![1.0], Sense::Maximize);
        cp.canonicalize();
        cp
    }

    #[test]
    fn trivial_structure() {
        let mut out = Vec::new();
        write_sdpa(&trivial(), &mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        let body: Vec<&str> = s.lines().filter(|l| !l.starts_with('*')).collect();
        assert_eq!(body[0], "1");
        assert_eq!(body[1], "1");
        assert_eq!(body[2], "2");
        assert_eq!(body[3], "-1e0");
        assert!(body.contains(&"1 1 1 2 1e0"));
    }

    #[test]
    fn round_trip_with_equalities() {
        let mut cp = trivial();
        cp.num_vars = 2;
        cp.objective = vec![1.0, -0.1];
        cp.add_eq(vec![(0, 0.3), (1, 1.0 / 3.0)], 0.7);
        cp.canonicalize();
        let mut out = Vec::new();
        write_sdpa(&cp, &mut out).unwrap();
        let back: ConicProgram<f64> = read_sdpa(&out[..]).unwrap();
        assert_eq!(back, cp);
    }
}
