mod common;

use cmebound::model::{parse_network, ReactionNetwork};
use cmebound::polyalg::{generator_polynomial, MultiIndex};
use cmebound::statebounds::{bound_distribution, bound_marginal, LpOptions, Partition, WeightSpec};
use cmebound::Rational;
use common::*;
use proptest::prelude::*;

fn ok(c: Check) -> Result<(), TestCaseError> {
    c.map_err(TestCaseError::fail)
}

// Random networks over A, B, C in the text format.
fn reaction_line() -> impl Strategy<Value = String> {
    let side = prop::collection::vec(0u32..3, 3);
    let name = |i: usize| ["A", "B", "C"][i];
    let fmt_side = move |v: &Vec<u32>| {
        let terms: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(i, &k)| if k == 1 { name(i).to_string() } else { format!("{k} {}", name(i)) })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    };
    (side.clone(), side, 1u32..20, 1u32..5, 0usize..3, 1u32..4, any::<bool>()).prop_filter_map(
        "reactants equal products",
        move |(lhs, rhs, p, q, s, h, hill)| {
            if lhs == rhs {
                return None;
            }
            let rate = if hill && lhs.iter().all(|&k| k == 0) { format!("{p}/({q} + {}^{h})", name(s)) } else { format!("mass_action({p}/{q})") };
            Some(format!("{} -> {} @ {rate}", fmt_side(&lhs), fmt_side(&rhs)))
        },
    )
}

fn random_network() -> impl Strategy<Value = ReactionNetwork> {
    prop::collection::vec(reaction_line(), 1..6).prop_map(|lines| parse_network(&format!("species: A, B, C\n{}", lines.join("\n"))).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_and_json_round_trip(net in random_network()) {
        ok(round_trip(&net))?;
    }

    #[test]
    fn generator_degree_is_bounded(net in random_network(), e in prop::collection::vec(0u32..4, 3)) {
        let alpha = MultiIndex::new(e);
        let g = generator_polynomial(&net, &alpha);
        if !g.is_zero() {
            prop_assert!(g.degree() + 1 <= alpha.degree() + net.d_a());
        }
    }

    #[test]
    fn propensities_nonnegative_and_incoming_bounded(net in random_network(), x in prop::collection::vec(0u32..8, 3)) {
        for j in 0..net.m() {
            prop_assert!(net.propensity_f64(j, &x) >= 0.0);
        }
        prop_assert!(net.incoming_states(&x).unwrap().len() <= net.m());
    }

    #[test]
    fn adjoint_identity_holds(which in 0usize..3, k in 1u32..7) {
        ok(adjoint_identity(["schlogl_unimodal.txt", "schlogl_bimodal.txt", "mm_inf.txt"][which], k))?;
    }

    #[test]
    fn exact_moments_are_feasible(which in 0usize..2, d in 3u32..9) {
        ok(exact_moments_feasible(["schlogl_unimodal.txt", "mm_inf.txt"][which], d))?;
    }

    #[test]
    fn restricted_pi_is_feasible(which in 0usize..2, r in 20u32..200) {
        ok(restriction_feasible(["schlogl_unimodal.txt", "mm_inf.txt"][which], r as f64))?;
    }

    #[test]
    fn closed_form_monotone_in_r(which in 0usize..3, r in 20u32..600, step in 1u32..50) {
        let (name, c) = [("schlogl_unimodal.txt", 17.97), ("mm_inf.txt", 5.0), ("schlogl_bimodal.txt", 100.0)][which];
        ok(closed_form_monotone(name, c, r as f64, (r + step) as f64))?;
    }

    #[test]
    fn detailed_balance_holds(which in 0usize..3) {
        ok(detailed_balance(["schlogl_unimodal.txt", "schlogl_bimodal.txt", "mm_inf.txt"][which]))?;
    }

    #[test]
    fn simulation_is_seed_deterministic(seed in any::<u64>(), x0 in 0u32..40) {
        ok(seed_determinism("schlogl_unimodal.txt", vec![x0], seed))?;
    }
}

#[test]
fn lp_bounds_monotone_in_r() {
    lp_monotone("schlogl_unimodal.txt", 17.97, &[30.0, 45.0, 70.0, 120.0]).unwrap();
    lp_monotone("mm_inf.txt", 5.5, &[30.0, 45.0, 70.0, 120.0]).unwrap();
}

// Summing state bounds over a cell never beats the cell bounds themselves.
#[test]
fn marginals_dominate_summed_state_bounds() {
    let net = model("toggle.txt");
    let w = WeightSpec::linear_power(vec![Rational::from_integer(1.into()), Rational::from_integer(2.into())], 6, 5.0901e8).unwrap();
    let r = 46f64.powi(6);
    let opts = LpOptions::default();
    let db = bound_distribution(&net, &w, r, &opts).unwrap();
    let mb = bound_marginal(&net, &w, r, &Partition::Axis(0), &opts).unwrap();
    for (i, cell) in mb.cells.iter().enumerate() {
        let v: u32 = cell.parse().unwrap();
        let (lo, hi) = db.states.iter().enumerate().filter(|(_, s)| s[0] == v).fold((0.0, 0.0), |(l, u), (k, _)| (l + db.lower[k], u + db.upper[k]));
        assert!(mb.lower[i] >= lo - 1e-9, "cell {cell}");
        assert!(mb.upper[i] <= hi + 1e-9, "cell {cell}");
    }
}

// Long-run occupation fractions approach the analytic distribution.
#[test]
fn schlogl_occupation_matches_analytic() {
    let (net, _, pi) = birth_death("schlogl_unimodal.txt");
    let cfg = cmebound::ssa::SimConfig::new(vec![0], 500.0, 11);
    let h = cmebound::ssa::occupation_histogram(&net, &cfg, None).unwrap();
    let emp = h.fractions();
    let n = pi.pi.len().max(emp.keys().map(|k| k[0] as usize + 1).max().unwrap_or(0));
    let tv: f64 = 0.5 * (0..n).map(|x| (emp.get(&vec![x as u32]).copied().unwrap_or(0.0) - pi.get(x)).abs()).sum::<f64>();
    assert!(tv < 0.05, "total variation {tv}");
}
