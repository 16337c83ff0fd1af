//! Parsing of flag values into core types.

use cmebound::model::{parse_expression, parse_polynomial, ReactionNetwork, State};
use cmebound::moments::{MomentOptions, MomentScaling, Target};
use cmebound::opt::Tolerances;
use cmebound::statebounds::{LpMethod, LpOptions, WeightSpec};
use cmebound::{Error, Poly, Rational};
use num_traits::ToPrimitive;

use crate::args::{BoundArgs, TolArgs};

fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// An exact constant such as `5.0901e8`, `1/1215` or `46^6`.
pub fn rational(text: &str) -> Result<Rational, Error> {
    parse_expression(text.trim(), &[]).ok().and_then(|f| f.as_constant()).ok_or_else(|| config(format!("`{text}` is not a numeric constant")))
}

pub fn number(text: &str) -> Result<f64, Error> {
    rational(text)?.to_f64().filter(|v| v.is_finite()).ok_or_else(|| config(format!("`{text}` is out of range")))
}

/// `4..10`, `4..10:2` or `4,6,8`; strictly increasing.
pub fn orders(text: &str) -> Result<Vec<u32>, Error> {
    let bad = || config(format!("bad order list `{text}` (use 4..10, 4..10:2 or 4,6,8)"));
    let out: Vec<u32> = if let Some((a, rest)) = text.split_once("..") {
        let (b, step) = rest.split_once(':').unwrap_or((rest, "1"));
        let (a, b, step): (u32, u32, usize) =
            (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?, step.trim().parse().map_err(|_| bad())?);
        if step == 0 || a > b {
            return Err(bad());
        }
        (a..=b).step_by(step).collect()
    } else {
        text.split(',').map(|s| s.trim().parse::<u32>().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if out.is_empty() || out.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad());
    }
    Ok(out)
}

/// Strictly increasing positive truncation levels.
pub fn r_list(text: &str) -> Result<Vec<f64>, Error> {
    let rs: Vec<f64> = text.split(',').map(number).collect::<Result<_, _>>()?;
    if rs.is_empty() || rs.iter().any(|&r| !(r > 0.0)) {
        return Err(config("truncation levels must be positive"));
    }
    if rs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(config(format!("r list `{text}` is not strictly increasing")));
    }
    Ok(rs)
}

pub fn state(text: &str, net: &ReactionNetwork) -> Result<State, Error> {
    let x: State = text.split(',').map(|s| s.trim().parse::<u32>().map_err(|_| config(format!("bad state `{text}`")))).collect::<Result<_, _>>()?;
    if x.len() != net.n() {
        return Err(config(format!("state `{text}` has {} coordinates, network has {} species", x.len(), net.n())));
    }
    Ok(x)
}

/// Species by name or 1-based index.
pub fn axis(text: &str, net: &ReactionNetwork) -> Result<usize, Error> {
    let t = text.trim();
    if let Some(i) = net.species().iter().position(|s| s == t) {
        return Ok(i);
    }
    match t.parse::<usize>() {
        Ok(i) if (1..=net.n()).contains(&i) => Ok(i - 1),
        _ => Err(config(format!("`{text}` is neither a species nor an index in 1..={}", net.n()))),
    }
}

pub fn polynomial(text: &str, net: &ReactionNetwork) -> Result<Poly, Error> {
    parse_polynomial(text, net.species()).map_err(|e| config(format!("in `{text}`: {e}")))
}

/// The weight, defaulting to the sum of all species.
pub fn weight_poly(text: Option<&str>, net: &ReactionNetwork) -> Result<(String, Poly), Error> {
    let text = match text {
        Some(t) => t.to_string(),
        None => net.species().join(" + "),
    };
    let p = polynomial(&text, net)?;
    Ok((text, p))
}

pub fn weight(w: &Poly, c: f64) -> Result<WeightSpec, Error> {
    Ok(WeightSpec::detect(w.clone(), c)?)
}

pub fn targets(text: Option<&str>, net: &ReactionNetwork) -> Result<Vec<(String, Target)>, Error> {
    let list: Vec<String> = match text {
        Some(t) => t.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        None => net.species().to_vec(),
    };
    if list.is_empty() {
        return Err(config("no targets given"));
    }
    list.into_iter()
        .map(|t| {
            let p = polynomial(&t, net)?;
            Ok((t, Target::from_polynomial(net, &p)))
        })
        .collect()
}

pub fn sdp_tolerances(t: &TolArgs) -> Tolerances {
    let mut tol = Tolerances::default();
    if let Some(v) = t.feas_tol {
        tol.feas = v;
    }
    if let Some(v) = t.gap_tol {
        tol.gap = v;
    }
    if let Some(v) = t.opt_tol {
        tol.opt = v;
    }
    if let Some(v) = t.max_iter {
        tol.max_iter = v;
    }
    tol
}

pub fn moment_options(t: &TolArgs, scaling: &str) -> Result<MomentOptions, Error> {
    let scaling = match scaling.trim() {
        "auto" => MomentScaling::Auto,
        "none" => MomentScaling::None,
        s => MomentScaling::Fixed(s.split(',').map(number).collect::<Result<_, _>>()?),
    };
    let mut o = MomentOptions { tol: sdp_tolerances(t), scaling, ..MomentOptions::default() };
    if let Some(s) = t.sdp_slack {
        o.slack = s;
    }
    Ok(o)
}

pub fn lp_options(t: &TolArgs, b: &BoundArgs) -> Result<LpOptions, Error> {
    let mut o = LpOptions { method: b.lp_method.parse::<LpMethod>().map_err(config)?, ..LpOptions::default() };
    if let Some(v) = t.lp_feas_tol {
        o.tol.feas = v;
    }
    if let Some(v) = t.opt_tol {
        o.tol.opt = v;
    }
    if let Some(v) = t.max_iter {
        o.tol.max_iter = v;
    }
    if let Some(cap) = b.state_cap {
        o.state_cap = cap;
    }
    Ok(o)
}

/// Where the tail constant comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum CSource {
    User(f64),
    Sdp { d: u32, f: Option<String> },
}

pub fn c_source(text: &str) -> Result<CSource, Error> {
    let bad = || config(format!("bad c source `{text}` (use user:VALUE or sdp:D[:F])"));
    let (kind, rest) = text.split_once(':').ok_or_else(bad)?;
    match kind.trim() {
        "user" => {
            let c = number(rest)?;
            if !(c > 0.0) {
                return Err(config("c must be positive"));
            }
            Ok(CSource::User(c))
        }
        "sdp" => {
            let (d, f) = match rest.split_once(':') {
                Some((d, f)) => (d, Some(f.trim().to_string())),
                None => (rest, None),
            };
            Ok(CSource::Sdp { d: d.trim().parse().map_err(|_| bad())?, f })
        }
        _ => Err(bad()),
    }
}
