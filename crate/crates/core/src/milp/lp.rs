//! A small LP-format subset: Maximize / Subject To / Bounds / Binary / End.
//! The writer emits a canonical layout and the parser accepts exactly that
//! subset, so write -> parse -> write is byte-stable.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn as_str(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coef: f64,
    pub var: String,
}

impl Term {
    pub fn new(coef: f64, var: impl Into<String>) -> Self {
        Self {
            coef,
            var: var.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    pub terms: Vec<Term>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub var: String,
    pub lo: f64,
    pub hi: f64,
}

/// A maximization problem in the supported LP subset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LpProblem {
    pub objective: Vec<Term>,
    pub rows: Vec<Row>,
    pub bounds: Vec<Bound>,
    pub binaries: Vec<String>,
}

fn format_number(v: f64) -> String {
    format!("{}", v)
}

fn format_terms(terms: &[Term]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, t) in terms.iter().enumerate() {
        let mag = t.coef.abs();
        let body = if mag == 1.0 {
            t.var.clone()
        } else {
            format!("{} {}", format_number(mag), t.var)
        };
        if i == 0 {
            if t.coef < 0.0 {
                out.push_str("- ");
            }
        } else if t.coef < 0.0 {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&body);
    }
    out
}

/// Serializes to LP text. Term order, row order, and names are preserved.
pub fn write_lp(p: &LpProblem) -> String {
    let mut out = String::new();
    out.push_str("Maximize\n");
    out.push_str(&format!(" obj: {}\n", format_terms(&p.objective)));
    out.push_str("Subject To\n");
    for row in &p.rows {
        out.push_str(&format!(
            " {}: {} {} {}\n",
            row.name,
            format_terms(&row.terms),
            row.sense.as_str(),
            format_number(row.rhs)
        ));
    }
    if !p.bounds.is_empty() {
        out.push_str("Bounds\n");
        for b in &p.bounds {
            out.push_str(&format!(
                " {} <= {} <= {}\n",
                format_number(b.lo),
                b.var,
                format_number(b.hi)
            ));
        }
    }
    if !p.binaries.is_empty() {
        out.push_str("Binary\n");
        for v in &p.binaries {
            out.push_str(&format!(" {}\n", v));
        }
    }
    out.push_str("End\n");
    out
}

#[derive(Debug, Error, PartialEq)]
pub enum LpParseError {
    #[error("line {lineno}: unexpected content: {line}")]
    Unexpected { lineno: usize, line: String },
    #[error("line {lineno}: cannot parse expression: {detail}")]
    BadExpression { lineno: usize, detail: String },
    #[error("missing End marker")]
    MissingEnd,
}

fn parse_terms(expr: &str, lineno: usize) -> Result<Vec<Term>, LpParseError> {
    let tokens: Vec<&str> = expr.split_whitespace().collect();
    if tokens == ["0"] {
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    let mut i = 0;
    let mut sign = 1.0;
    let mut expect_operand = true;
    while i < tokens.len() {
        let tok = tokens[i];
        match tok {
            "+" if !expect_operand || i == 0 => {
                sign = 1.0;
                expect_operand = true;
                i += 1;
            }
            "-" => {
                sign = -sign;
                expect_operand = true;
                i += 1;
            }
            _ => {
                let (coef, var) = if let Ok(num) = tok.parse::<f64>() {
                    i += 1;
                    let var = tokens.get(i).ok_or_else(|| LpParseError::BadExpression {
                        lineno,
                        detail: format!("dangling coefficient {}", tok),
                    })?;
                    (num, var.to_string())
                } else {
                    (1.0, tok.to_string())
                };
                terms.push(Term::new(sign * coef, var));
                sign = 1.0;
                expect_operand = false;
                i += 1;
            }
        }
    }
    Ok(terms)
}

/// Parses text produced by [`write_lp`].
pub fn parse_lp(text: &str) -> Result<LpProblem, LpParseError> {
    #[derive(PartialEq)]
    enum Section {
        Start,
        Objective,
        Rows,
        Bounds,
        Binary,
        Done,
    }
    let mut section = Section::Start;
    let mut out = LpProblem::default();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        match line {
            "Maximize" => {
                section = Section::Objective;
                continue;
            }
            "Subject To" => {
                section = Section::Rows;
                continue;
            }
            "Bounds" => {
                section = Section::Bounds;
                continue;
            }
            "Binary" => {
                section = Section::Binary;
                continue;
            }
            "End" => {
                section = Section::Done;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Objective => {
                let expr = line
                    .split_once(':')
                    .map(|(_, e)| e)
                    .unwrap_or(line)
                    .trim();
                out.objective = parse_terms(expr, lineno)?;
            }
            Section::Rows => {
                let (name, rest) = line.split_once(':').ok_or_else(|| LpParseError::Unexpected {
                    lineno,
                    line: line.to_string(),
                })?;
                let rest = rest.trim();
                let (sense, pos) = if let Some(p) = rest.find("<=") {
                    (Sense::Le, p)
                } else if let Some(p) = rest.find(">=") {
                    (Sense::Ge, p)
                } else if let Some(p) = rest.find('=') {
                    (Sense::Eq, p)
                } else {
                    return Err(LpParseError::BadExpression {
                        lineno,
                        detail: "no relational operator".into(),
                    });
                };
                let op_len = if sense == Sense::Eq { 1 } else { 2 };
                let lhs = rest[..pos].trim();
                let rhs_str = rest[pos + op_len..].trim();
                let rhs = rhs_str.parse::<f64>().map_err(|_| LpParseError::BadExpression {
                    lineno,
                    detail: format!("bad rhs '{}'", rhs_str),
                })?;
                out.rows.push(Row {
                    name: name.trim().to_string(),
                    terms: parse_terms(lhs, lineno)?,
                    sense,
                    rhs,
                });
            }
            Section::Bounds => {
                let parts: Vec<&str> = line.split("<=").map(str::trim).collect();
                if parts.len() != 3 {
                    return Err(LpParseError::Unexpected {
                        lineno,
                        line: line.to_string(),
                    });
                }
                let lo = parts[0].parse::<f64>().map_err(|_| LpParseError::BadExpression {
                    lineno,
                    detail: format!("bad lower bound '{}'", parts[0]),
                })?;
                let hi = parts[2].parse::<f64>().map_err(|_| LpParseError::BadExpression {
                    lineno,
                    detail: format!("bad upper bound '{}'", parts[2]),
                })?;
                out.bounds.push(Bound {
                    var: parts[1].to_string(),
                    lo,
                    hi,
                });
            }
            Section::Binary => {
                out.binaries.push(line.to_string());
            }
            Section::Start | Section::Done => {
                return Err(LpParseError::Unexpected {
                    lineno,
                    line: line.to_string(),
                });
            }
        }
    }
    if section != Section::Done {
        return Err(LpParseError::MissingEnd);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> LpProblem {
        LpProblem {
            objective: vec![Term::new(1.0, "z0"), Term::new(1.0, "z1")],
            rows: vec![
                Row {
                    name: "c0".into(),
                    terms: vec![Term::new(1.0, "x_0"), Term::new(-0.5, "r90_0")],
                    sense: Sense::Ge,
                    rhs: 0.5,
                },
                Row {
                    name: "c1".into(),
                    terms: vec![Term::new(2.5, "x_0"), Term::new(1.0, "y_0")],
                    sense: Sense::Le,
                    rhs: 7.25,
                },
            ],
            bounds: vec![Bound {
                var: "x_0".into(),
                lo: 0.0,
                hi: 4.0,
            }],
            binaries: vec!["r90_0".into(), "z0".into(), "z1".into()],
        }
    }

    #[test]
    fn write_parse_write_is_byte_stable() {
        let text = write_lp(&sample());
        let parsed = parse_lp(&text).unwrap();
        assert_eq!(write_lp(&parsed), text);
    }

    #[test]
    fn empty_problem_round_trips() {
        let text = write_lp(&LpProblem::default());
        assert!(text.contains("obj: 0"));
        let parsed = parse_lp(&text).unwrap();
        assert_eq!(parsed, LpProblem::default());
        assert_eq!(write_lp(&parsed), text);
    }

    #[test]
    fn negative_leading_coefficient() {
        let p = LpProblem {
            objective: vec![Term::new(-2.0, "a")],
            rows: vec![Row {
                name: "r".into(),
                terms: vec![Term::new(-1.0, "a"), Term::new(3.0, "b")],
                sense: Sense::Eq,
                rhs: -1.5,
            }],
            bounds: vec![],
            binaries: vec![],
        };
        let text = write_lp(&p);
        let parsed = parse_lp(&text).unwrap();
        assert_eq!(parsed, p);
    }

    #[test]
    fn missing_end_is_an_error() {
        let err = parse_lp("Maximize\n obj: 0\nSubject To\n").unwrap_err();
        assert_eq!(err, LpParseError::MissingEnd);
    }
}
