use std::fmt;

use thiserror::Error;

use super::{AgentId, Instance, Side, Warning};

/// Result of parsing: the normalized instance plus the entries that were
/// dropped because they were not listed back.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub instance: Instance,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based line number in the input.
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    MalformedHeader(String),
    MalformedLine(String),
    UnknownAgent(String),
    RepeatedAgent(AgentId),
    OutOfRange { agent: AgentId, value: String },
    Duplicate { agent: AgentId, partner: usize },
    Tie { agent: AgentId },
    MissingHeader,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::MalformedHeader(s) => write!(f, "malformed header `{s}`"),
            ParseErrorKind::MalformedLine(s) => write!(f, "malformed line `{s}`"),
            ParseErrorKind::UnknownAgent(s) => write!(f, "unknown agent `{s}`"),
            ParseErrorKind::RepeatedAgent(a) => write!(f, "list for {a} given twice"),
            ParseErrorKind::OutOfRange { agent, value } => {
                write!(f, "{agent} lists `{value}`, which is out of range")
            }
            ParseErrorKind::Duplicate { agent, partner } => {
                write!(f, "{agent} lists {partner} more than once")
            }
            ParseErrorKind::Tie { agent } => {
                write!(f, "{agent} has tied entries; preferences must be strict")
            }
            ParseErrorKind::MissingHeader => write!(f, "expected `men:` and `women:` header lines"),
        }
    }
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn parse_header(
    line_no: usize,
    text: Option<(usize, &str)>,
    key: &str,
) -> Result<usize, ParseError> {
    let Some((line_no, text)) = text else {
        return Err(err(line_no, ParseErrorKind::MissingHeader));
    };
    let malformed = || err(line_no, ParseErrorKind::MalformedHeader(text.to_string()));
    let (k, v) = text.split_once(':').ok_or_else(malformed)?;
    if k.trim() != key {
        return Err(malformed());
    }
    v.trim().parse().map_err(|_| malformed())
}

/// Parses the text format:
///
/// ```text
/// men: 2
/// women: 2
/// m1: 1 2
/// m2: 2 1
/// w1: 2 1
/// w2: 1 2
/// ```
///
/// Lines starting with `#` and blank lines are ignored. Agents without a line
/// get an empty list. Entries that are not listed back are dropped and
/// reported as warnings.
pub fn parse_instance(text: &str) -> Result<Parsed, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let last_line = text.lines().count().max(1);

    let num_men = parse_header(last_line, lines.next(), "men")?;
    let num_women = parse_header(last_line, lines.next(), "women")?;

    let mut men: Vec<Option<Vec<usize>>> = vec![None; num_men];
    let mut women: Vec<Option<Vec<usize>>> = vec![None; num_women];

    for (line_no, line) in lines {
        let (head, body) = line
            .split_once(':')
            .ok_or_else(|| err(line_no, ParseErrorKind::MalformedLine(line.to_string())))?;
        let head = head.trim();
        let (side, slots, bound) = match head.chars().next() {
            Some('m') => (Side::Man, &mut men, num_women),
            Some('w') => (Side::Woman, &mut women, num_men),
            _ => {
                return Err(err(
                    line_no,
                    ParseErrorKind::MalformedLine(line.to_string()),
                ))
            }
        };
        let index = match head[1..].parse::<usize>() {
            Ok(i) if i >= 1 && i <= slots.len() => i - 1,
            _ => return Err(err(line_no, ParseErrorKind::UnknownAgent(head.to_string()))),
        };
        let agent = AgentId { side, index };
        if slots[index].is_some() {
            return Err(err(line_no, ParseErrorKind::RepeatedAgent(agent)));
        }
        if body.contains(['(', ')', '{', '}', '=', '[', ']']) {
            return Err(err(line_no, ParseErrorKind::Tie { agent }));
        }
        let mut list = Vec::new();
        for tok in body.split_whitespace() {
            let value = match tok.parse::<usize>() {
                Ok(v) if v >= 1 && v <= bound => v - 1,
                _ => {
                    return Err(err(
                        line_no,
                        ParseErrorKind::OutOfRange {
                            agent,
                            value: tok.to_string(),
                        },
                    ))
                }
            };
            if list.contains(&value) {
                return Err(err(
                    line_no,
                    ParseErrorKind::Duplicate {
                        agent,
                        partner: value + 1,
                    },
                ));
            }
            list.push(value);
        }
        slots[index] = Some(list);
    }

    let men = men.into_iter().map(Option::unwrap_or_default).collect();
    let women = women.into_iter().map(Option::unwrap_or_default).collect();
    let (instance, warnings) =
        Instance::normalized(men, women).expect("parser validated ranges and duplicates");
    Ok(Parsed { instance, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_instance() {
        let p = parse_instance("men:1\nwomen:1\nm1: 1\nw1: 1\n").unwrap();
        assert_eq!(p.instance.num_men(), 1);
        assert_eq!(p.instance.acceptable_pairs(), vec![(0, 0)]);
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn six_by_six_fixture() {
        let p = parse_instance(crate::fixtures::POSET6).unwrap();
        assert_eq!(p.instance.num_men(), 6);
        assert_eq!(p.instance.man_list(1), &[1, 0, 2, 5]);
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn one_sided_entry_is_dropped_with_warning() {
        let p = parse_instance("men: 1\nwomen: 1\nm1: 1\nw1:\n").unwrap();
        assert!(p.instance.man_list(0).is_empty());
        assert!(p.instance.woman_list(0).is_empty());
        assert_eq!(p.warnings.len(), 1);
    }

    #[test]
    fn comments_and_missing_lines() {
        let p = parse_instance("# hi\n\nmen: 2\n# mid\nwomen: 1\nm2: 1\nw1: 2\n").unwrap();
        assert!(p.instance.man_list(0).is_empty());
        assert_eq!(p.instance.man_list(1), &[0]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_instance("men 2\nwomen: 2\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(matches!(e.kind, ParseErrorKind::MalformedHeader(_)));

        let e = parse_instance("men: 2\nwomen: 2\nm1: 1 1\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(matches!(e.kind, ParseErrorKind::Duplicate { .. }));

        let e = parse_instance("men: 2\nwomen: 2\n\nm1: 1 3\n").unwrap_err();
        assert_eq!(e.line, 4);
        assert!(matches!(e.kind, ParseErrorKind::OutOfRange { .. }));

        let e = parse_instance("men: 1\nwomen: 2\nm1: (1 2)\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Tie { .. }));

        let e = parse_instance("men: 1\nwomen: 1\nm2: 1\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::UnknownAgent(_)));

        let e = parse_instance("men: 1\nwomen: 1\nm1: 1\nm1: 1\n").unwrap_err();
        assert_eq!(e.line, 4);
        assert!(matches!(e.kind, ParseErrorKind::RepeatedAgent(_)));

        let e = parse_instance("men: 1\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingHeader);
    }

    #[test]
    fn empty_instance() {
        let p = parse_instance("men: 0\nwomen: 0\n").unwrap();
        assert_eq!(p.instance.num_men(), 0);
        assert_eq!(p.instance.to_text(), "men: 0\nwomen: 0\n");
    }
}
