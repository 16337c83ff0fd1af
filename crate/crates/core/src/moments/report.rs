use serde_json::{json, Value};

use super::MomentBound;

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.12e}")
    } else if v > 0.0 {
        "inf".into()
    } else if v < 0.0 {
        "-inf".into()
    } else {
        "nan".into()
    }
}

/// `target,d,lower,upper,status_lo,status_hi,gap` rows.
pub fn hierarchy_csv(bounds: &[MomentBound]) -> String {
    let mut s = String::from("target,d,lower,upper,status_lo,status_hi,gap\n");
    for b in bounds {
        s.push_str(&format!("{},{},{},{},{},{},{}\n", b.target, b.d, num(b.lower), num(b.upper), b.status_lo, b.status_hi, num(b.gap())));
    }
    s
}

/// Same table with solver residuals; infinite bounds become `null`.
pub fn hierarchy_json(bounds: &[MomentBound], warnings: &[String]) -> Value {
    let f = |v: f64| if v.is_finite() { json!(v) } else { Value::Null };
    let rows: Vec<Value> = bounds
        .iter()
        .map(|b| {
            json!({
                "target": b.target,
                "d": b.d,
                "lower": f(b.lower),
                "upper": f(b.upper),
                "status_lo": b.status_lo.as_str(),
                "status_hi": b.status_hi.as_str(),
                "gap": f(b.gap()),
                "rational_basis": b.rational_basis,
                "residuals_lo": {"primal_feas": b.residuals_lo.primal_feas, "dual_feas": b.residuals_lo.dual_feas, "gap": b.residuals_lo.gap},
                "residuals_hi": {"primal_feas": b.residuals_hi.primal_feas, "dual_feas": b.residuals_hi.dual_feas, "gap": b.residuals_hi.gap},
            })
        })
        .collect();
    json!({ "bounds": rows, "warnings": warnings })
}
