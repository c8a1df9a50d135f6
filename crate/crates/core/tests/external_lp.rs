//! CI-optional smoke test: the exported LP text is consumable by an
//! external MILP solver (HiGHS through scipy). Ignored by default; run with
//! `cargo test -p scenegen-core --test external_lp -- --ignored`
//! on a machine with python3 + scipy.

use std::io::Write;
use std::process::{Command, Stdio};

use scenegen_core::constraints::{eval_constraint, parse_scene_graph, Constraint};
use scenegen_core::geometry::{Point2, Rect};
use scenegen_core::milp::{encode, export_lp, solve_bundled};
use scenegen_core::solver::{ObjectDims, PlacementProblem};

const SOLVER_SCRIPT: &str = r#"
import sys
import numpy as np
from scipy.optimize import milp, LinearConstraint, Bounds

text = sys.stdin.read()
section = None
objective = []
rows = []
bounds = {}
binaries = []

def parse_terms(expr):
    toks = expr.split()
    if toks == ["0"]:
        return []
    terms, sign, i = [], 1.0, 0
    while i < len(toks):
        t = toks[i]
        if t == "+":
            sign = 1.0; i += 1; continue
        if t == "-":
            sign = -sign; i += 1; continue
        try:
            coef = float(t)
            i += 1
            var = toks[i]
        except ValueError:
            coef, var = 1.0, t
        terms.append((sign * coef, var)); sign = 1.0; i += 1
    return terms

for raw in text.splitlines():
    line = raw.strip()
    if not line or line.startswith("\\"):
        continue
    if line in ("Maximize", "Subject To", "Bounds", "Binary", "End"):
        section = line
        continue
    if section == "Maximize":
        objective = parse_terms(line.split(":", 1)[1].strip())
    elif section == "Subject To":
        name, rest = line.split(":", 1)
        for op in ("<=", ">=", "="):
            if op in rest:
                lhs, rhs = rest.split(op, 1)
                rows.append((parse_terms(lhs.strip()), op, float(rhs)))
                break
    elif section == "Bounds":
        lo, var, hi = line.split("<=")
        bounds[var.strip()] = (float(lo), float(hi))
    elif section == "Binary":
        binaries.append(line)

variables = []
for terms in [objective] + [r[0] for r in rows]:
    for _, v in terms:
        if v not in variables:
            variables.append(v)
for v in list(bounds) + binaries:
    if v not in variables:
        variables.append(v)
index = {v: i for i, v in enumerate(variables)}
n = len(variables)

c = np.zeros(n)
for coef, v in objective:
    c[index[v]] -= coef  # maximize -> minimize the negation

A, lb, ub = [], [], []
for terms, op, rhs in rows:
    row = np.zeros(n)
    for coef, v in terms:
        row[index[v]] += coef
    A.append(row)
    lb.append(rhs if op in (">=", "=") else -np.inf)
    ub.append(rhs if op in ("<=", "=") else np.inf)

lo = np.full(n, -np.inf)
hi = np.full(n, np.inf)
integrality = np.zeros(n)
for v, (l, h) in bounds.items():
    lo[index[v]], hi[index[v]] = l, h
for v in binaries:
    lo[index[v]], hi[index[v]], integrality[index[v]] = 0.0, 1.0, 1

result = milp(
    c,
    constraints=[LinearConstraint(np.array(A), lb, ub)] if A else [],
    bounds=Bounds(lo, hi),
    integrality=integrality,
)
if not result.success:
    print(f"status: {result.status} {result.message}")
    sys.exit(1)
print(f"objective {-result.fun}")
"#;

fn solve_external(lp_text: &str) -> Option<f64> {
    let mut child = Command::new("python3")
        .arg("-c")
        .arg(SOLVER_SCRIPT)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .ok()?;
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(lp_text.as_bytes())
        .unwrap();
    let output = child.wait_with_output().unwrap();
    if !output.status.success() {
        panic!(
            "external solver rejected the LP: {}{}",
            String::from_utf8_lossy(&output.stdout),
            String::from_utf8_lossy(&output.stderr)
        );
    }
    String::from_utf8_lossy(&output.stdout)
        .lines()
        .find_map(|l| l.strip_prefix("objective ").and_then(|v| v.trim().parse().ok()))
}

#[test]
#[ignore = "needs python3 with scipy"]
fn external_solver_accepts_exported_models() {
    // A near-pair whose optimum is known: the external solver works on
    // continuous positions, so its distance objective must be at least the
    // grid-restricted bundled solver's.
    let room = Rect::new(Point2::new(0.0, 0.0), Point2::new(3.0, 3.0));
    let graph = parse_scene_graph("a-0 | edge\nb-0 | edge | near, a-0").unwrap();
    let mut p = PlacementProblem::new(
        room,
        vec![ObjectDims::new("a-0", 1.0, 0.5), ObjectDims::new("b-0", 0.5, 0.5)],
        graph,
    );
    p.grid_step_m = 0.5;
    let model = encode(&p).unwrap();
    let bundled = solve_bundled(&model, 0.5).unwrap();
    let bundled_distance: usize = model
        .distance_terms
        .iter()
        .filter(|t| {
            let subject = &bundled.placements[&model.objects[t.subject].id];
            let target = &bundled.placements[&model.objects[t.target].id];
            let c = match t.kind {
                scenegen_core::milp::DistanceKind::Near => Constraint::Near(String::new()),
                scenegen_core::milp::DistanceKind::Far => Constraint::Far(String::new()),
            };
            eval_constraint(&c, subject, Some(target), &model.room, &model.params).unwrap()
        })
        .count();

    let objective = solve_external(&export_lp(&model)).expect("external solve");
    assert!(
        objective + 1e-6 >= bundled_distance as f64,
        "external objective {} below bundled {}",
        objective,
        bundled_distance
    );

    // A larger model from the residential living-room fixture: syntax-level
    // acceptance (parse + optimal solve).
    let room = Rect::new(Point2::new(0.0, 0.0), Point2::new(5.0, 8.0));
    let graph = parse_scene_graph(
        "sofa-0 | edge\n\
         coffee table-0 | middle | near, sofa-0 | in front of, sofa-0 | center aligned, sofa-0 | face to, sofa-0\n\
         tv stand-0 | edge | far, coffee table-0 | in front of, coffee table-0 | center aligned, coffee table-0 | face to, coffee table-0",
    )
    .unwrap();
    let p = PlacementProblem::new(
        room,
        vec![
            ObjectDims::new("sofa-0", 2.0, 0.9),
            ObjectDims::new("coffee table-0", 1.2, 0.6),
            ObjectDims::new("tv stand-0", 1.6, 0.4),
        ],
        graph,
    );
    let model = encode(&p).unwrap();
    let objective = solve_external(&export_lp(&model)).expect("external solve");
    // Both distance terms (near + far) are satisfiable in a 5 x 8 room.
    assert!(objective + 1e-6 >= 2.0, "objective {}", objective);
}
