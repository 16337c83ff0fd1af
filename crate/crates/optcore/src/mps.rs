//! Fixed-format MPS writer.
//!
//! Rows are named `R0000001…`, columns `C0000001…`. Numeric fields are 12
//! characters wide, so values are rounded to the longest scientific form that
//! fits (about 6 significant digits for negative exponents); the file is for
//! handing problems to external solvers, not for exact round trips.
//! Maximization problems are written with a negated objective.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::lp::{LinearProgram, Sense};
use crate::{OptError, Real};

pub fn write_mps<T: Real, W: Write>(lp: &LinearProgram<T>, name: &str, mut w: W) -> std::io::Result<()> {
    let n = lp.num_vars();
    let n_eq = lp.eq_rows.len();
    let rows = n_eq + lp.ineq_rows.len();
    let rname = |i: usize| format!("R{:07}", i + 1);
    let cname = |j: usize| format!("C{:07}", j + 1);
    if lp.sense == Sense::Maximize {
        writeln!(w, "* maximization: objective coefficients negated")?;
    }
    writeln!(w, "NAME          {}", name.chars().take(8).collect::<String>())?;
    writeln!(w, "ROWS")?;
    writeln!(w, " N  COST")?;
    let mut kinds = Vec::with_capacity(rows);
    for i in 0..rows {
        let k = if i < n_eq {
            "E"
        } else {
            let k = i - n_eq;
            let (lo, hi) = (lp.ineq_lo[k], lp.ineq_hi[k]);
            match (lo.is_finite(), hi.is_finite()) {
                (true, true) if lo == hi => "E",
                (true, _) => "G",
                (false, true) => "L",
                (false, false) => "N",
            }
        };
        kinds.push(k);
        writeln!(w, " {:<2} {}", k, rname(i))?;
    }

    // Column-major view.
    let mut cols: Vec<Vec<(String, T)>> = vec![Vec::new(); n];
    let sign: T = lp.sense.sign();
    for &(j, v) in &lp.objective {
        cols[j].push(("COST".to_string(), sign * v));
    }
    for (i, row) in lp.eq_rows.iter().chain(lp.ineq_rows.iter()).enumerate() {
        for &(j, v) in row {
            cols[j].push((rname(i), v));
        }
    }
    writeln!(w, "COLUMNS")?;
    for (j, entries) in cols.iter().enumerate() {
        if entries.is_empty() {
            writeln!(w, "    {:<8}  {:<8}  {:>12}", cname(j), "COST", fmt12(T::zero()))?;
        }
        for pair in entries.chunks(2) {
            let mut line = format!("    {:<8}  {:<8}  {:>12}", cname(j), pair[0].0, fmt12(pair[0].1));
            if let Some((r, v)) = pair.get(1) {
                line.push_str(&format!("   {:<8}  {:>12}", r, fmt12(*v)));
            }
            writeln!(w, "{line}")?;
        }
    }
    writeln!(w, "RHS")?;
    for i in 0..rows {
        let rhs = if i < n_eq {
            lp.eq_rhs[i]
        } else {
            let k = i - n_eq;
            match kinds[i] {
                "E" | "G" => lp.ineq_lo[k],
                "L" => lp.ineq_hi[k],
                _ => T::zero(),
            }
        };
        if rhs != T::zero() {
            writeln!(w, "    {:<8}  {:<8}  {:>12}", "RHS", rname(i), fmt12(rhs))?;
        }
    }
    let mut ranges = Vec::new();
    for k in 0..lp.ineq_rows.len() {
        let (lo, hi) = (lp.ineq_lo[k], lp.ineq_hi[k]);
        if kinds[n_eq + k] == "G" && hi.is_finite() {
            ranges.push((rname(n_eq + k), hi - lo));
        }
    }
    if !ranges.is_empty() {
        writeln!(w, "RANGES")?;
        for (r, v) in ranges {
            writeln!(w, "    {:<8}  {:<8}  {:>12}", "RNG", r, fmt12(v))?;
        }
    }
    writeln!(w, "BOUNDS")?;
    for j in 0..n {
        let (lo, hi) = (lp.lower[j], lp.upper[j]);
        let c = cname(j);
        if lo == hi {
            writeln!(w, " FX BND       {:<8}  {:>12}", c, fmt12(lo))?;
            continue;
        }
        match (lo.is_finite(), hi.is_finite()) {
            (false, false) => writeln!(w, " FR BND       {c}")?,
            (false, true) => {
                writeln!(w, " MI BND       {c}")?;
                writeln!(w, " UP BND       {:<8}  {:>12}", c, fmt12(hi))?;
            }
            (true, fin_hi) => {
                if lo != T::zero() {
                    writeln!(w, " LO BND       {:<8}  {:>12}", c, fmt12(lo))?;
                }
                if fin_hi {
                    writeln!(w, " UP BND       {:<8}  {:>12}", c, fmt12(hi))?;
                }
            }
        }
    }
    writeln!(w, "ENDATA")?;
    w.flush()
}

pub fn export_mps<T: Real>(lp: &LinearProgram<T>, name: &str, path: &Path) -> Result<(), OptError> {
    let f = File::create(path)?;
    write_mps(lp, name, BufWriter::new(f))?;
    Ok(())
}

/// Most precise rendering of `v` within 12 characters.
fn fmt12<T: Real>(v: T) -> String {
    let x = v.to_f64_lossy();
    let plain = format!("{x}");
    if plain.len() <= 12 {
        return plain;
    }
    for prec in (0..=10).rev() {
        let s = format!("{x:.prec$e}");
        if s.len() <= 12 {
            return s;
        }
    }
    format!("{x:.0e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields_fit() {
        assert_eq!(fmt12(1.5f64), "1.5");
        assert!(fmt12(1.0f64 / 3.0).len() <= 12);
        assert!(fmt12(-1.234567890123e-200f64).len() <= 12);
    }

    #[test]
    fn writes_sections() {
        let mut lp = LinearProgram::<f64>::new();
        let a = lp.add_var("a", 0.0, 2.0);
        let b = lp.add_var("b", f64::NEG_INFINITY, f64::INFINITY);
        lp.add_eq(vec![(a, 1.0), (b, 1.0)], 1.0);
        lp.add_range(vec![(b, 1.0)], -1.0, 1.0);
        lp.set_objective(vec![(a, 1.0)], Sense::Maximize);
        let mut out = Vec::new();
        write_mps(&lp, "test", &mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        for sec in ["NAME", "ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS", "ENDATA"] {
            assert!(s.contains(sec), "{sec}");
        }
        assert!(s.contains(" FR BND       C0000002"));
        assert!(s.lines().any(|l| l.starts_with("    C0000001  COST") && l[24..36].trim() == "-1"));
    }
}
