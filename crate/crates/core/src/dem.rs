//! Detector error model: mechanism/model types, the likelihood cost map, and a
//! line-oriented text parser and serializer for `error(p) D.. L..` instruction files.

use thiserror::Error;

/// Largest detector or observable index a model may reference.
pub const MAX_INDEX: u64 = u32::MAX as u64;

#[derive(Debug, Error)]
pub enum DemError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}, column {col}: probability {p} outside (0, 1)")]
    ProbabilityRange { line: usize, col: usize, p: f64 },
    #[error("line {line}, column {col}: probability {p} not supported, decoding requires p < 0.5")]
    UnsupportedProbability { line: usize, col: usize, p: f64 },
    #[error("line {line}, column {col}: index overflow in `{token}`")]
    IndexOverflow { line: usize, col: usize, token: String },
    #[error("mechanism {index}: {msg}")]
    InvalidMechanism { index: usize, msg: String },
    #[error("probability {p} outside the open interval (0, 0.5)")]
    ProbabilityDomain { p: f64 },
}

/// Instruction with a keyword this parser does not know; the line was skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWarning {
    pub line: usize,
    pub keyword: String,
}

impl std::fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: ignoring unknown instruction `{}`", self.line, self.keyword)
    }
}

/// One independent error mechanism of the model.
///
/// `detectors` is the set of detectors this mechanism flips (sorted, distinct,
/// nonempty) and `observables` the logical observables it flips (sorted,
/// distinct, possibly empty). `likelihood_cost` caches ln((1-p)/p).
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorMechanism {
    pub index: usize,
    pub probability: f64,
    pub likelihood_cost: f64,
    pub detectors: Vec<u32>,
    pub observables: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DetectorErrorModel {
    pub errors: Vec<ErrorMechanism>,
    pub num_detectors: usize,
    pub num_observables: usize,
}

impl DetectorErrorModel {
    pub fn num_errors(&self) -> usize {
        self.errors.len()
    }

    /// Builds a model from (probability, detectors, observables) triples.
    ///
    /// Unlike the text parser this is strict: a zero or out-of-domain
    /// probability and a detector list that cancels to empty are errors, since
    /// a programmatic caller producing them has a bug the parser's file-level
    /// leniency would hide.
    pub fn from_parts<I>(parts: I) -> Result<Self, DemError>
    where
        I: IntoIterator<Item = (f64, Vec<u32>, Vec<u32>)>,
    {
        let mut errors = Vec::new();
        for (index, (probability, detectors, observables)) in parts.into_iter().enumerate() {
            let likelihood_cost = likelihood_cost(probability)
                .map_err(|_| DemError::InvalidMechanism {
                    index,
                    msg: format!("probability {probability} outside (0, 0.5)"),
                })?;
            let detectors = cancel_pairs(detectors);
            if detectors.is_empty() {
                return Err(DemError::InvalidMechanism {
                    index,
                    msg: "detector set is empty after pairwise cancellation".into(),
                });
            }
            let observables = cancel_pairs(observables);
            errors.push(ErrorMechanism {
                index,
                probability,
                likelihood_cost,
                detectors,
                observables,
            });
        }
        Ok(finish_model(errors))
    }
}

/// ln((1-p)/p), the cost of including a mechanism of probability p in a
/// minimum-cost configuration. Defined for 0 < p < 0.5, where it is positive
/// and strictly decreasing.
pub fn likelihood_cost(p: f64) -> Result<f64, DemError> {
    if p > 0.0 && p < 0.5 {
        Ok(((1.0 - p) / p).ln())
    } else {
        Err(DemError::ProbabilityDomain { p })
    }
}

/// Sorts and removes index pairs: an index mentioned an even number of times
/// cancels out (XOR semantics), an odd number of times is kept once.
fn cancel_pairs(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    let mut out = Vec::with_capacity(v.len());
    let mut i = 0;
    while i < v.len() {
        let mut run = 1;
        while i + run < v.len() && v[i + run] == v[i] {
            run += 1;
        }
        if run % 2 == 1 {
            out.push(v[i]);
        }
        i += run;
    }
    out
}

fn finish_model(mut errors: Vec<ErrorMechanism>) -> DetectorErrorModel {
    let mut num_detectors = 0usize;
    let mut num_observables = 0usize;
    for (i, e) in errors.iter_mut().enumerate() {
        e.index = i;
        if let Some(&d) = e.detectors.last() {
            num_detectors = num_detectors.max(d as usize + 1);
        }
        if let Some(&o) = e.observables.last() {
            num_observables = num_observables.max(o as usize + 1);
        }
    }
    DetectorErrorModel { errors, num_detectors, num_observables }
}

pub fn parse_dem(text: &str) -> Result<DetectorErrorModel, DemError> {
    parse_dem_verbose(text).map(|(model, _)| model)
}

/// Like [`parse_dem`] but also returns one warning per skipped unknown
/// instruction, for callers that surface diagnostics.
pub fn parse_dem_verbose(text: &str) -> Result<(DetectorErrorModel, Vec<ParseWarning>), DemError> {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    for (line_idx, raw) in text.lines().enumerate() {
        let line_no = line_idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let tokens = tokenize(content);
        let Some(&(head_col, head)) = tokens.first() else { continue };
        let keyword = head.split('(').next().unwrap_or(head);
        match keyword {
            "error" => {
                if let Some(mech) = parse_error_instruction(line_no, head_col, head, &tokens[1..])? {
                    errors.push(mech);
                }
            }
            // Coordinate and metadata instructions carry no decoding content.
            "detector" | "logical_observable" | "shift_detectors" => {}
            _ => warnings.push(ParseWarning { line: line_no, keyword: keyword.to_string() }),
        }
    }
    Ok((finish_model(errors), warnings))
}

/// Splits on spaces and tabs, keeping each token's 1-based starting column.
fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let bytes = line.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b' ' || bytes[i] == b'\t' {
            i += 1;
            continue;
        }
        let start = i;
        while i < bytes.len() && bytes[i] != b' ' && bytes[i] != b'\t' {
            i += 1;
        }
        tokens.push((start + 1, &line[start..i]));
    }
    tokens
}

/// Parses one `error(<p>) <targets>` instruction. Returns Ok(None) for
/// instructions that are dropped: zero probability, or a detector list that
/// cancels to empty (such a mechanism cannot influence any syndrome).
fn parse_error_instruction(
    line: usize,
    head_col: usize,
    head: &str,
    targets: &[(usize, &str)],
) -> Result<Option<ErrorMechanism>, DemError> {
    let syntax = |col: usize, msg: String| DemError::Syntax { line, col, msg };

    let inner = head
        .strip_prefix("error(")
        .and_then(|rest| rest.strip_suffix(')'))
        .ok_or_else(|| syntax(head_col, "malformed error instruction, expected `error(<p>)`".into()))?;
    let p_col = head_col + "error(".len();
    let p: f64 = inner
        .parse()
        .map_err(|_| syntax(p_col, format!("`{inner}` is not a probability")))?;
    if !(p >= 0.0) || p > 1.0 {
        return Err(DemError::ProbabilityRange { line, col: p_col, p });
    }
    if p == 0.0 {
        return Ok(None);
    }
    if p >= 0.5 {
        return Err(DemError::UnsupportedProbability { line, col: p_col, p });
    }

    let mut detectors = Vec::new();
    let mut observables = Vec::new();
    for &(col, tok) in targets {
        let (kind, digits) = tok.split_at(1);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(syntax(col, format!("`{tok}` is not a D<n> or L<n> target")));
        }
        let idx = match digits.parse::<u64>() {
            Ok(v) if v <= MAX_INDEX => v as u32,
            _ => return Err(DemError::IndexOverflow { line, col, token: tok.to_string() }),
        };
        match kind {
            "D" => detectors.push(idx),
            "L" => observables.push(idx),
            _ => return Err(syntax(col, format!("`{tok}` is not a D<n> or L<n> target"))),
        }
    }

    let detectors = cancel_pairs(detectors);
    if detectors.is_empty() {
        return Ok(None);
    }
    let likelihood = likelihood_cost(p).expect("validated above");
    Ok(Some(ErrorMechanism {
        index: 0, // assigned by finish_model
        probability: p,
        likelihood_cost: likelihood,
        detectors,
        observables: cancel_pairs(observables),
    }))
}

/// Emits one `error(p) D.. L..` line per mechanism, in index order.
/// Probabilities print in the shortest form that parses back to the same f64,
/// so parse -> serialize -> parse is the identity on the parsed model.
pub fn serialize_dem(model: &DetectorErrorModel) -> String {
    let mut out = String::new();
    for e in &model.errors {
        out.push_str(&format!("error({})", e.probability));
        for d in &e.detectors {
            out.push_str(&format!(" D{d}"));
        }
        for o in &e.observables {
            out.push_str(&format!(" L{o}"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN_9: f64 = 2.197_224_577_336_219_6;
    const LN_4: f64 = 1.386_294_361_119_890_6;

    #[test]
    fn likelihood_cost_values() {
        assert!((likelihood_cost(0.001).unwrap() - 6.906754778648554).abs() < 1e-12);
        assert!((likelihood_cost(0.1).unwrap() - LN_9).abs() < 1e-12);
        assert!((likelihood_cost(0.2).unwrap() - LN_4).abs() < 1e-12);
        // p = 1/(1+e) maps to a cost of exactly 1.
        assert!((likelihood_cost(0.2689414213699951).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn likelihood_cost_domain() {
        for p in [0.0, 0.5, -0.1, 0.7, 1.0, f64::NAN] {
            assert!(likelihood_cost(p).is_err(), "p = {p} should be out of domain");
        }
    }

    #[test]
    fn likelihood_cost_is_positive_and_decreasing() {
        let mut prev = f64::INFINITY;
        for i in 1..500 {
            let p = 0.4999 * (i as f64) / 500.0;
            let c = likelihood_cost(p).unwrap();
            assert!(c > 0.0);
            assert!(c < prev);
            prev = c;
        }
    }

    #[test]
    fn parse_two_instruction_model() {
        let m = parse_dem("error(0.1) D0 D1 L0\nerror(0.2) D1\n").unwrap();
        assert_eq!(m.num_errors(), 2);
        assert_eq!(m.num_detectors, 2);
        assert_eq!(m.num_observables, 1);
        assert_eq!(m.errors[0].detectors, vec![0, 1]);
        assert_eq!(m.errors[0].observables, vec![0]);
        assert!((m.errors[0].likelihood_cost - LN_9).abs() < 1e-12);
        assert_eq!(m.errors[1].detectors, vec![1]);
        assert!(m.errors[1].observables.is_empty());
        assert!((m.errors[1].likelihood_cost - LN_4).abs() < 1e-12);
        assert_eq!(m.errors[0].index, 0);
        assert_eq!(m.errors[1].index, 1);
    }

    #[test]
    fn duplicate_detectors_cancel_pairwise() {
        let m = parse_dem("error(0.1) D0 D0 D1\n").unwrap();
        assert_eq!(m.num_errors(), 1);
        assert_eq!(m.errors[0].detectors, vec![1]);

        // A list cancelling to empty drops the whole instruction.
        let m = parse_dem("error(0.1) D0 D0\nerror(0.2) D3\n").unwrap();
        assert_eq!(m.num_errors(), 1);
        assert_eq!(m.errors[0].detectors, vec![3]);
    }

    #[test]
    fn zero_probability_dropped() {
        let m = parse_dem("error(0) D0\nerror(0.25) D0\n").unwrap();
        assert_eq!(m.num_errors(), 1);
        assert!((m.errors[0].probability - 0.25).abs() == 0.0);
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = "# full comment line\n\nerror(0.1) D0 # trailing comment\n   \n";
        let m = parse_dem(text).unwrap();
        assert_eq!(m.num_errors(), 1);
        assert_eq!(m.errors[0].detectors, vec![0]);
    }

    #[test]
    fn metadata_instructions_silently_skipped() {
        let text = "detector(0, 1) D0\nlogical_observable L0\nshift_detectors(1) 2\nerror(0.1) D0\n";
        let (m, warnings) = parse_dem_verbose(text).unwrap();
        assert_eq!(m.num_errors(), 1);
        assert!(warnings.is_empty());
    }

    #[test]
    fn unknown_keyword_warns() {
        let (m, warnings) = parse_dem_verbose("frobnicate D0\nerror(0.1) D0\n").unwrap();
        assert_eq!(m.num_errors(), 1);
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].line, 1);
        assert_eq!(warnings[0].keyword, "frobnicate");
    }

    #[test]
    fn unsupported_probability_rejected() {
        match parse_dem("error(0.5) D0\n") {
            Err(DemError::UnsupportedProbability { line: 1, col: 7, p }) => {
                assert!((p - 0.5).abs() == 0.0)
            }
            other => panic!("expected unsupported-probability error, got {other:?}"),
        }
        assert!(matches!(
            parse_dem("error(0.7) D0\n"),
            Err(DemError::UnsupportedProbability { .. })
        ));
    }

    #[test]
    fn out_of_range_probability_rejected() {
        assert!(matches!(
            parse_dem("error(-0.1) D0\n"),
            Err(DemError::ProbabilityRange { line: 1, col: 7, .. })
        ));
        assert!(matches!(parse_dem("error(1.5) D0\n"), Err(DemError::ProbabilityRange { .. })));
        assert!(matches!(parse_dem("error(nan) D0\n"), Err(DemError::ProbabilityRange { .. })));
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        match parse_dem("error(0.1) D0\nerror 0.1 D0\n") {
            Err(DemError::Syntax { line, col, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(col, 1);
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse_dem("error(0.1) D1x\n") {
            Err(DemError::Syntax { line: 1, col, .. }) => assert_eq!(col, 12),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse_dem("error(oops) D0\n") {
            Err(DemError::Syntax { line: 1, col, .. }) => assert_eq!(col, 7),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(matches!(parse_dem("error(0.1) X7\n"), Err(DemError::Syntax { .. })));
    }

    #[test]
    fn index_overflow_rejected() {
        assert!(matches!(
            parse_dem("error(0.1) D99999999999\n"),
            Err(DemError::IndexOverflow { line: 1, .. })
        ));
        assert!(matches!(
            parse_dem("error(0.1) L4294967296\n"),
            Err(DemError::IndexOverflow { .. })
        ));
        // Largest representable index is fine.
        assert!(parse_dem("error(0.1) D4294967295\n").is_ok());
    }

    #[test]
    fn counts_are_one_past_max_index() {
        let m = parse_dem("error(0.1) D5\n").unwrap();
        assert_eq!(m.num_detectors, 6);
        assert_eq!(m.num_observables, 0);
        let m = parse_dem("").unwrap();
        assert_eq!(m.num_detectors, 0);
        assert_eq!(m.num_errors(), 0);
    }

    #[test]
    fn serialize_round_trips() {
        let text = "error(0.1) D0 D1 L0\nerror(0.2) D1\nerror(0.001) D2 D4 L1\n";
        let m1 = parse_dem(text).unwrap();
        let s = serialize_dem(&m1);
        let m2 = parse_dem(&s).unwrap();
        assert_eq!(m1, m2);
        assert_eq!(s, text);
        assert_eq!(serialize_dem(&DetectorErrorModel::default()), "");
    }

    #[test]
    fn from_parts_builds_and_validates() {
        let m = DetectorErrorModel::from_parts(vec![
            (0.1, vec![1, 0], vec![0]),
            (0.2, vec![1], vec![]),
        ])
        .unwrap();
        assert_eq!(m.errors[0].detectors, vec![0, 1]);
        assert_eq!(m.num_detectors, 2);

        assert!(DetectorErrorModel::from_parts(vec![(0.0, vec![0], vec![])]).is_err());
        assert!(DetectorErrorModel::from_parts(vec![(0.6, vec![0], vec![])]).is_err());
        assert!(DetectorErrorModel::from_parts(vec![(0.1, vec![2, 2], vec![])]).is_err());
    }
}
