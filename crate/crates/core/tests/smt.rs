use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rvt_core::expr::{CmpOp, Expr, Lin, Value};
use rvt_core::rational::int;
use rvt_core::smt::{all_models_projected, minimize_core, solve, SmtConfig, SmtOutcome, SmtProblem, Sort};

fn cfg() -> SmtConfig {
    SmtConfig::default()
}

fn x_cmp(var: &str, op: CmpOp, k: i64) -> Expr<String> {
    let mut lin = Lin::var(var.to_string());
    lin.constant = int(-k);
    Expr::cmp(lin, op)
}

fn var(n: &str) -> Expr<String> {
    Expr::Var(n.to_string())
}

#[test]
fn contradictory_bounds_are_unsat() {
    let mut p = SmtProblem::default();
    p.declare("x", Sort::Real);
    p.assert(x_cmp("x", CmpOp::Ge, 0));
    p.assert(x_cmp("x", CmpOp::Le, -1));
    assert_eq!(solve(&p, &cfg()).unwrap(), SmtOutcome::Unsat(None));
}

#[test]
fn model_is_in_range() {
    let mut p = SmtProblem::default();
    p.declare("x", Sort::Real);
    p.assert(x_cmp("x", CmpOp::Ge, 0));
    p.assert(x_cmp("x", CmpOp::Le, 3));
    let SmtOutcome::Sat(m) = solve(&p, &cfg()).unwrap() else { panic!("expected sat") };
    let x = m["x"].as_num().unwrap().clone();
    assert!(x >= int(0) && x <= int(3));
}

#[test]
fn fractional_models_are_exact() {
    let mut p = SmtProblem::default();
    p.declare("x", Sort::Real);
    let mut lin = Lin::term("x".to_string(), int(3));
    lin.constant = int(-1);
    p.assert(Expr::cmp(lin, CmpOp::Eq));
    let SmtOutcome::Sat(m) = solve(&p, &cfg()).unwrap() else { panic!("expected sat") };
    assert_eq!(m["x"], Value::Num(rvt_core::rational::frac(1, 3)));
}

#[test]
fn core_is_sound_and_small() {
    let mut p = SmtProblem::default();
    p.declare("x", Sort::Real);
    p.declare("y", Sort::Real);
    p.assert_named("a", x_cmp("x", CmpOp::Ge, 1));
    p.assert_named("b", x_cmp("x", CmpOp::Le, 0));
    p.assert_named("c", x_cmp("y", CmpOp::Eq, 0));
    let SmtOutcome::Unsat(Some(core)) = solve(&p, &cfg()).unwrap() else { panic!("expected unsat core") };
    let min = minimize_core(&p, &core, &cfg()).unwrap();
    assert!(min.minimal);
    assert_eq!(min.core, ["a", "b"].iter().map(|s| s.to_string()).collect());
    // Re-solving only the core is unsat.
    let mut q = SmtProblem { decls: p.decls.clone(), ..Default::default() };
    for (n, e) in &p.assertions {
        if min.core.contains(n.as_deref().unwrap()) {
            q.assert(e.clone());
        }
    }
    assert!(solve(&q, &cfg()).unwrap().is_unsat());
}

#[test]
fn allsat_disjunction() {
    let mut p = SmtProblem::default();
    p.declare("p", Sort::Bool);
    p.declare("q", Sort::Bool);
    p.assert(Expr::or([var("p"), var("q")]));
    let proj = vec!["p".to_string(), "q".to_string()];
    let models: BTreeSet<_> = all_models_projected(&p, &proj, &cfg(), 1 << 16).unwrap().into_iter().collect();
    assert_eq!(models.len(), 3);
    assert!(!models.contains(&[("p".to_string(), false), ("q".to_string(), false)].into_iter().collect()));
}

#[test]
fn allsat_over_real_regions() {
    // (x >= 0 <-> p) & (x >= 1 <-> q): q implies p.
    let mut p = SmtProblem::default();
    p.declare("x", Sort::Real);
    p.declare("p", Sort::Bool);
    p.declare("q", Sort::Bool);
    p.assert(Expr::iff(x_cmp("x", CmpOp::Ge, 0), var("p")));
    p.assert(Expr::iff(x_cmp("x", CmpOp::Ge, 1), var("q")));
    let proj = vec!["p".to_string(), "q".to_string()];
    let models: BTreeSet<Vec<bool>> = all_models_projected(&p, &proj, &cfg(), 1 << 16)
        .unwrap()
        .into_iter()
        .map(|m| vec![m["p"], m["q"]])
        .collect();
    // Case analysis: x < 0, 0 <= x < 1, x >= 1.
    let expected: BTreeSet<Vec<bool>> = [vec![false, false], vec![true, false], vec![true, true]].into_iter().collect();
    assert_eq!(models, expected);
}

#[test]
fn allsat_of_unsat_is_empty() {
    let mut p = SmtProblem::default();
    p.declare("p", Sort::Bool);
    p.assert(var("p"));
    p.assert(Expr::not(var("p")));
    assert!(all_models_projected(&p, &["p".to_string()], &cfg(), 16).unwrap().is_empty());
}

#[test]
fn allsat_cap_is_enforced() {
    let mut p = SmtProblem::default();
    p.declare("p", Sort::Bool);
    p.declare("q", Sort::Bool);
    let err = all_models_projected(&p, &["p".to_string(), "q".to_string()], &cfg(), 2).unwrap_err();
    assert_eq!(err.to_string(), "model enumeration exceeds 2 models");
}

#[test]
fn bounded_integers_respect_range() {
    let mut p = SmtProblem::default();
    p.declare("e", Sort::Int { lo: Some(0), hi: Some(2) });
    p.assert(x_cmp("e", CmpOp::Gt, 1));
    let SmtOutcome::Sat(m) = solve(&p, &cfg()).unwrap() else { panic!("expected sat") };
    assert_eq!(m["e"], Value::Num(int(2)));
    p.assert(x_cmp("e", CmpOp::Gt, 2));
    assert!(solve(&p, &cfg()).unwrap().is_unsat());
}

#[test]
fn missing_solver_is_an_error() {
    let cfg = SmtConfig { solver: "/nonexistent/solver-binary".into(), ..SmtConfig::default() };
    let mut p = SmtProblem::default();
    p.declare("p", Sort::Bool);
    assert!(solve(&p, &cfg).is_err());
}

#[test]
fn transcripts_are_dumped() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SmtConfig { dump_dir: Some(dir.path().to_path_buf()), ..SmtConfig::default() };
    let mut p = SmtProblem::default();
    p.declare("p", Sort::Bool);
    p.assert(var("p"));
    solve(&p, &cfg).unwrap();
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let text = std::fs::read_to_string(files[0].as_ref().unwrap().path()).unwrap();
    assert!(text.contains("(check-sat)"));
}

fn brute_force(clauses: &[Vec<(usize, bool)>], n: usize) -> BTreeSet<Vec<bool>> {
    (0..1u32 << n)
        .map(|bits| (0..n).map(|i| bits >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|a| clauses.iter().all(|c| c.iter().any(|&(v, pos)| a[v] == pos)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn allsat_matches_truth_tables(
        n in 1usize..=4,
        raw in prop::collection::vec(prop::collection::vec((0usize..4, any::<bool>()), 1..3), 0..4),
    ) {
        let clauses: Vec<Vec<(usize, bool)>> =
            raw.into_iter().map(|c| c.into_iter().map(|(v, b)| (v % n, b)).collect()).collect();
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let mut p = SmtProblem::default();
        for name in &names {
            p.declare(name.clone(), Sort::Bool);
        }
        for c in &clauses {
            p.assert(Expr::or(c.iter().map(|&(v, pos)| if pos { var(&names[v]) } else { Expr::not(var(&names[v])) })));
        }
        let got: BTreeSet<Vec<bool>> = all_models_projected(&p, &names, &cfg(), 1 << 16)
            .unwrap()
            .into_iter()
            .map(|m: BTreeMap<String, bool>| names.iter().map(|n| m[n]).collect())
            .collect();
        prop_assert_eq!(got, brute_force(&clauses, n));
    }

    #[test]
    fn emitted_text_is_deterministic(k in -5i64..5, names in prop::collection::vec("[a-z]{1,3}", 1..4)) {
        let build = || {
            let mut p = SmtProblem::default();
            for n in &names {
                p.declare(n.clone(), Sort::Real);
            }
            p.assert(x_cmp(&names[0], CmpOp::Le, k));
            p.to_smtlib()
        };
        prop_assert_eq!(build(), build());
    }
}
