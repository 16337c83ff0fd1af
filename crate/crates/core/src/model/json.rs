use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::parser::parse_constraint;
use super::{ModelError, Propensity, Reaction, ReactionNetwork};
use crate::polyalg::{poly_from_triples, poly_to_triples, Triple};
use crate::{Poly, RatFn, Rational};

#[derive(Serialize, Deserialize)]
struct NetworkDoc {
    species: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constraint: Option<String>,
    reactions: Vec<ReactionDoc>,
    denominator: Vec<Triple>,
}

#[derive(Serialize, Deserialize)]
struct ReactionDoc {
    v_minus: Vec<u32>,
    v_plus: Vec<u32>,
    numerator: Vec<Triple>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    propensity: Option<PropensityDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum PropensityDoc {
    MassAction { rate: String },
    Rational { numerator: Vec<Triple>, factors: Vec<FactorDoc> },
}

#[derive(Serialize, Deserialize)]
struct FactorDoc {
    terms: Vec<Triple>,
    power: u32,
}

fn invalid(msg: impl Into<String>) -> ModelError {
    ModelError::Invalid(msg.into())
}

/// Canonical JSON document: species, per-reaction stoichiometry with the
/// numerator `s_j` and the propensity as written, and the common
/// denominator `o`, all polynomials as graded-lex `[α, num, den]` triples.
pub fn network_to_json(net: &ReactionNetwork) -> Value {
    let reactions = net
        .reactions()
        .iter()
        .zip(net.numerators())
        .map(|(r, s)| ReactionDoc {
            v_minus: r.v_minus.clone(),
            v_plus: r.v_plus.clone(),
            numerator: poly_to_triples(s),
            propensity: Some(match &r.propensity {
                Propensity::MassAction(k) => PropensityDoc::MassAction { rate: k.to_string() },
                Propensity::Rational(f) => PropensityDoc::Rational {
                    numerator: poly_to_triples(f.numerator()),
                    factors: f.factors().iter().map(|(g, m)| FactorDoc { terms: poly_to_triples(g), power: *m }).collect(),
                },
            }),
        })
        .collect();
    let doc = NetworkDoc {
        species: net.species().to_vec(),
        constraint: net.constraint().map(|c| c.to_string_with(net.species())),
        reactions,
        denominator: poly_to_triples(net.denominator()),
    };
    serde_json::to_value(doc).expect("network document serializes")
}

/// Inverse of [`network_to_json`]. Reactions without a `propensity` entry
/// use `s_j / o`. The stored numerators and denominator must agree with the
/// ones recomputed from the propensities.
pub fn network_from_json(v: &Value) -> Result<ReactionNetwork, ModelError> {
    let doc: NetworkDoc = serde_json::from_value(v.clone()).map_err(|e| invalid(e.to_string()))?;
    let n = doc.species.len();
    let poly = |t: &[Triple]| poly_from_triples(n, t).map_err(invalid);
    let den = poly(&doc.denominator)?;
    let mut reactions = Vec::new();
    for r in &doc.reactions {
        let propensity = match &r.propensity {
            Some(PropensityDoc::MassAction { rate }) => {
                Propensity::MassAction(rate.parse::<Rational>().map_err(|_| invalid(format!("bad rate `{rate}`")))?)
            }
            Some(PropensityDoc::Rational { numerator, factors }) => {
                let fs = factors.iter().map(|f| Ok((poly(&f.terms)?, f.power))).collect::<Result<Vec<(Poly, u32)>, ModelError>>()?;
                Propensity::Rational(RatFn::new(poly(numerator)?, fs).ok_or_else(|| invalid("zero factor"))?)
            }
            None => Propensity::Rational(RatFn::new(poly(&r.numerator)?, vec![(den.clone(), 1)]).ok_or_else(|| invalid("zero denominator"))?),
        };
        reactions.push(Reaction { v_minus: r.v_minus.clone(), v_plus: r.v_plus.clone(), propensity });
    }
    let constraint = doc.constraint.as_deref().map(|c| parse_constraint(c, &doc.species)).transpose()?;
    let net = ReactionNetwork::new(doc.species.clone(), reactions, constraint)?;
    let explicit = doc.reactions.iter().all(|r| r.propensity.is_some());
    if explicit {
        if net.denominator() != &den {
            return Err(invalid("denominator does not match the propensities"));
        }
        for (j, r) in doc.reactions.iter().enumerate() {
            if net.numerator(j) != &poly(&r.numerator)? {
                return Err(invalid(format!("reaction {}: numerator does not match its propensity", j + 1)));
            }
        }
    }
    Ok(net)
}
