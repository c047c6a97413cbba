//! Plain-text renderers in the style of hand-written proofs.

use std::fmt::Write as _;

use crate::capset::{BoundTableRow, CapCheck};
use crate::cone::ConeCertificate;
use crate::equivalence::DigitSetClass;
use crate::json::rational_string;
use crate::progressions::{ConstraintSystem, ProgressionTable, WeightedProgression};
use crate::reducibility::{DigitTrace, MatrixTrace, Verdict};
use crate::search::{CertificateBundle, Evidence, Maximality, SearchReport};
use crate::zp::EquationClassPartition;

fn set(digits: &[u32]) -> String {
    let inner: Vec<String> = digits.iter().map(u32::to_string).collect();
    format!("{{{}}}", inner.join(", "))
}

fn triples(rows: &[WeightedProgression], per_line: usize) -> String {
    let items: Vec<String> = rows.iter().map(ToString::to_string).collect();
    items.chunks(per_line.max(1)).map(|c| format!("  {}", c.join(", "))).collect::<Vec<_>>().join(",\n")
}

pub fn progressions(table: &ProgressionTable) -> String {
    let mut out = format!(
        "{} with D = {}, D' = {}: {} progressions\n",
        table.equation.display_form(),
        set(table.pair.digits()),
        set(table.pair.fixed()),
        table.len()
    );
    if !table.is_empty() {
        let _ = writeln!(out, "{}", triples(&table.rows, 8));
    }
    out
}

pub fn digit_trace(trace: &DigitTrace) -> String {
    let mut out = format!("{}:\n", trace.equation.display_form());
    for step in &trace.steps {
        let removed: Vec<String> = step.removed.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "  {} does not occur in position {}; remove {}.", step.digit, step.position, removed.join(", "));
    }
    match trace.verdict {
        Verdict::ReducedToEmpty => out.push_str("  No progressions remain.\n"),
        Verdict::Stuck => {
            let _ = writeln!(out, "  Stuck with {} progressions:", trace.remaining.len());
            let _ = writeln!(out, "{}", triples(&trace.remaining, 8));
        }
    }
    out
}

pub fn matrix_trace(trace: &MatrixTrace, system: &ConstraintSystem) -> String {
    let mut out = format!("{}: {} columns v1..v{}\n", trace.equation.display_form(), trace.columns, trace.columns);
    for step in &trace.steps {
        let cols: Vec<String> = step.eliminated.iter().map(|j| format!("v{} = {}", j + 1, system.column_labels[*j])).collect();
        let _ = writeln!(out, "  round {}, row {} is single-signed; delete {}.", step.round + 1, step.row + 1, cols.join(", "));
    }
    match trace.verdict {
        Verdict::ReducedToEmpty => out.push_str("  All columns deleted.\n"),
        Verdict::Stuck => {
            let left: Vec<String> = trace.remaining.iter().map(|j| format!("v{}", j + 1)).collect();
            let _ = writeln!(out, "  Stuck with {}.", left.join(", "));
        }
    }
    out
}

pub fn certificate(cert: &ConeCertificate) -> String {
    match cert {
        ConeCertificate::Trivial { dual } => {
            let y: Vec<String> = dual.iter().map(rational_string::format).collect();
            format!("cone trivial, dual y = ({})", y.join(", "))
        }
        ConeCertificate::Nontrivial { witness } => {
            let x: Vec<String> = witness.iter().map(ToString::to_string).collect();
            format!("cone nontrivial, witness chi = ({})", x.join(", "))
        }
    }
}

pub fn bundle(b: &CertificateBundle) -> String {
    let mut out = format!("{}: {}\n", b.pair, if b.admissible { "admissible" } else { "not admissible" });
    for ev in &b.representatives {
        let detail = match &ev.evidence {
            Evidence::Digit { trace } => format!("digit-reduced in {} steps", trace.steps.len()),
            Evidence::Matrix { trace } => format!("matrix-reduced in {} steps", trace.steps.len()),
            Evidence::Cone { certificate: c } => certificate(c),
        };
        let _ = writeln!(out, "  {}: {}", ev.equation.display_form(), detail);
    }
    out
}

pub fn equation_classes(partition: &EquationClassPartition) -> String {
    let mut out = String::new();
    for class in &partition.classes {
        let forms: Vec<String> =
            class.members.iter().map(|&b| crate::zp::LineEquation::new(partition.p, b).expect("class member").display_form()).collect();
        let _ = writeln!(out, "{{{}}}", forms.join(", "));
    }
    out
}

pub fn cap_check(check: &CapCheck, size: usize) -> String {
    match check {
        CapCheck::Ok => format!("ok: {size} points, no three collinear\n"),
        CapCheck::Violation { points } => {
            let pts: Vec<String> =
                points.iter().map(|p| format!("({})", p.iter().map(u32::to_string).collect::<Vec<_>>().join(", "))).collect();
            format!("violation: {} are collinear\n", pts.join(", "))
        }
    }
}

pub fn report(r: &SearchReport) -> String {
    let mut out = format!("p = {}: largest admissible size {}\n", r.p, r.max_size);
    for level in &r.levels {
        match &level.admissible {
            Some(entry) => {
                let _ = write!(out, "  size {}: {} after {} candidates", level.size, set(&entry.digits), level.candidates_examined);
                if let Some(fixed) = &entry.minimal_fixed {
                    let _ = write!(out, ", minimal D' = {}", set(fixed));
                }
                out.push('\n');
            }
            None => {
                let _ = writeln!(out, "  size {}: none of {} candidates", level.size, level.candidates_examined);
            }
        }
    }
    match &r.maximality {
        Maximality::Proven { size, refutations } => {
            let _ = writeln!(out, "maximality proven: all {} candidates of size {size} refuted", refutations.len());
        }
        Maximality::NotAttempted => out.push_str("maximality not established\n"),
    }
    if r.budget_exhausted {
        out.push_str("budget exhausted\n");
    }
    out
}

pub fn classes(classes: &[DigitSetClass]) -> String {
    let mut out = String::new();
    for c in classes {
        let members: Vec<String> = c.members.iter().map(|m| format!("{} (x -> {}x + {})", set(&m.digits), m.map.a, m.map.b)).collect();
        let gaps: Vec<String> = c.fingerprint.gaps.iter().map(u32::to_string).collect();
        let _ = writeln!(out, "class {}: representative {}, gaps {{{}}}", c.id, set(&c.representative), gaps.join(","));
        for m in members {
            let _ = writeln!(out, "  {m}");
        }
    }
    out
}

/// Cuts (not rounds) to `places` decimals, as printed tables do.
pub fn truncated(x: f64, places: usize) -> String {
    let scale = 10f64.powi(places as i32);
    format!("{:.*}", places, (x * scale).floor() / scale)
}

pub fn bound_table(rows: &[BoundTableRow]) -> String {
    let mut out = format!("{:>4}  {:>10}  {:>10}  {:>4}  {:>10}  {:>8}\n", "p", "p^(2/3)", "edel", "new", "improve %", "mu");
    for r in rows {
        let (new, mu) = if r.new_bound == 0 { ("-".to_string(), "-".to_string()) } else { (r.new_bound.to_string(), truncated(r.mu, 5)) };
        let imp = r.improvement_percent.map_or(String::new(), |v| format!("{v:.4}"));
        let _ = writeln!(out, "{:>4}  {:>10}  {:>10}  {:>4}  {:>10}  {:>8}", r.p, truncated(r.bose, 5), truncated(r.edel, 5), new, imp, mu);
    }
    out
}
