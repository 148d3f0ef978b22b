//! Plain-text rendering of diagnostics, check results and traces.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rvt_core::checks::ConstraintDiagnostic;
use rvt_core::project::requirements_for;
use rvt_core::{CheckKind, CheckResult, HybridTrace, Project, StepKind};

pub fn diagnostic(d: &ConstraintDiagnostic, source: Option<&str>) -> String {
    let mut out = format!("{d}\n");
    if let Some(src) = source {
        let _ = writeln!(out, "    {src}");
        let width = d.end.saturating_sub(d.start).max(1);
        let _ = writeln!(out, "    {}{}", " ".repeat(src[..d.start.min(src.len())].chars().count()), "^".repeat(width));
    }
    out
}

fn prose_lines(out: &mut String, project: &Project, ids: &BTreeSet<String>) {
    if let Ok(reqs) = requirements_for(project, ids) {
        for r in reqs {
            let _ = writeln!(out, "  {}: {}", r.id, r.text);
        }
    }
}

pub fn check(r: &CheckResult, project: &Project) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}: {}", r.kind, r.verdict);
    match &r.kind {
        CheckKind::Scenario(id) | CheckKind::Property(id) => prose_lines(&mut out, project, &[id.clone()].into()),
        CheckKind::Consistency => {}
    }
    if let Some(core) = &r.culprit_core {
        let qualifier = if r.core_minimal == Some(false) { " (not guaranteed minimal)" } else { "" };
        let _ = writeln!(out, "conflicting requirements{qualifier}:");
        prose_lines(&mut out, project, core);
    }
    if let Some(w) = &r.witness {
        let _ = writeln!(out, "witness:");
        for line in trace(w).lines() {
            let _ = writeln!(out, "  {line}");
        }
    }
    let s = &r.stats;
    let bounds: Vec<String> = s.bound_schedule.iter().map(ToString::to_string).collect();
    let _ = write!(out, "stats: bounds {}; lasso search {} ms", bounds.join(","), s.bmc_ms);
    if let Some(v) = &s.bmc_verdict {
        let _ = write!(out, " ({v})");
    }
    if let Some(v) = &s.cegar_verdict {
        let _ = write!(out, "; refinement {} ms, {} iterations, {} predicates ({v})", s.cegar_ms, s.cegar_iterations, s.predicates);
    }
    let _ = writeln!(out, "; total {} ms", s.total_ms);
    out
}

/// One row per step: kind, duration, changed variables, derivatives.
pub fn trace(t: &HybridTrace) -> String {
    let mut out = String::new();
    if let Some(first) = t.states.first() {
        let init: Vec<String> = first.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        let _ = writeln!(out, "initial: {}", if init.is_empty() { "(no variables)".into() } else { init.join(", ") });
    }
    let mut rows = vec![["step".to_string(), "kind".into(), "delta".into(), "changes".into(), "derivatives".into()]];
    for (j, step) in t.steps.iter().enumerate() {
        let (s, s2) = (&t.states[j], &t.states[j + 1]);
        let changes: Vec<String> = s2
            .iter()
            .filter(|(k, v)| s.get(*k) != Some(*v))
            .map(|(k, v)| format!("{k}: {} -> {v}", s.get(k).map(ToString::to_string).unwrap_or_default()))
            .collect();
        let ders: Vec<String> = step.ders.iter().map(|(k, d)| format!("der({k}) = {d}")).collect();
        let kind = match step.kind {
            StepKind::Flow => "flow",
            StepKind::Jump => "jump",
        };
        rows.push([j.to_string(), kind.into(), step.delta.clone(), changes.join(", "), ders.join(", ")]);
    }
    let widths: Vec<usize> = (0..5).map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
    for r in &rows {
        let line: Vec<String> = r.iter().zip(&widths).map(|(cell, w)| format!("{cell:<w$}")).collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    let _ = writeln!(out, "↺ to step {}", t.loop_start);
    out
}
