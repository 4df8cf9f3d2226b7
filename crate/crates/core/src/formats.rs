//! Line-oriented text formats.
//!
//! Blank lines and lines starting with `#` are ignored everywhere. Subsets
//! are comma-separated indices with `-` for the empty set.
//!
//! | file          | header                 | lines                     |
//! |---------------|------------------------|---------------------------|
//! | input table   |                        | `X : value`, `I \| X : value` |
//! | graph         | `n m [directed]`       | `u v w`                   |
//! | matrix        | `k n`                  | `n` entries per row       |
//! | scores        |                        | `X : score`               |

use std::fmt;
use std::str::FromStr;

use crate::algebra::{
    Adjoined, CountWeight, CountWeightSemiring, FreeMultiset, MaxWeight, MinPlus, Multiset,
    NatSum, Semigroup, WitnessMax, Witnessed, WordBag, WordSum,
};
use crate::apps::{Graph, RectMatrix, ScoreTable};
use crate::summation::{DisjointInput, IntersectionInput, OutputTable};
use crate::universe::{Subset, Universe};
use crate::{Error, Result};

/// Text encoding of a contract's values.
pub trait ValueText: Semigroup {
    /// Parses a value stored under the subset `key`.
    fn parse_value(&self, text: &str, key: &Subset) -> Result<Self::Value>;

    fn format_value(&self, value: &Self::Value) -> String;
}

fn parse_float(text: &str) -> Result<f64> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| Error::format(format!("'{}' is not a number", text.trim())))?;
    if v.is_nan() {
        return Err(Error::format("NaN is not a valid value"));
    }
    Ok(v)
}

impl ValueText for NatSum {
    fn parse_value(&self, text: &str, _: &Subset) -> Result<u64> {
        text.trim()
            .parse()
            .map_err(|_| Error::format(format!("'{}' is not a natural number", text.trim())))
    }

    fn format_value(&self, value: &u64) -> String {
        value.to_string()
    }
}

impl ValueText for MaxWeight {
    fn parse_value(&self, text: &str, _: &Subset) -> Result<f64> {
        parse_float(text)
    }

    fn format_value(&self, value: &f64) -> String {
        value.to_string()
    }
}

impl ValueText for MinPlus {
    fn parse_value(&self, text: &str, _: &Subset) -> Result<f64> {
        parse_float(text)
    }

    fn format_value(&self, value: &f64) -> String {
        value.to_string()
    }
}

impl ValueText for CountWeightSemiring {
    fn parse_value(&self, text: &str, _: &Subset) -> Result<CountWeight> {
        let (count, weight) = text
            .split_once(',')
            .ok_or_else(|| Error::format(format!("expected 'count,weight', got '{}'", text.trim())))?;
        let count = count
            .trim()
            .parse()
            .map_err(|_| Error::format(format!("bad count '{}'", count.trim())))?;
        Ok(CountWeight::new(count, parse_float(weight)?))
    }

    fn format_value(&self, value: &CountWeight) -> String {
        value.to_string()
    }
}

/// Whitespace-separated tokens; a repeated token has multiplicity > 1.
/// `{}` is the empty multiset.
impl ValueText for FreeMultiset<String> {
    fn parse_value(&self, text: &str, _: &Subset) -> Result<Multiset<String>> {
        let text = text.trim();
        if text == "{}" {
            return Ok(Multiset::default());
        }
        Ok(Multiset::from_tokens(text.split_whitespace().map(str::to_owned)))
    }

    fn format_value(&self, value: &Multiset<String>) -> String {
        if value.is_empty() {
            return "{}".to_owned();
        }
        let mut parts = Vec::new();
        for (token, count) in value.iter() {
            for _ in 0..count {
                parts.push(token.as_str());
            }
        }
        parts.join(" ")
    }
}

/// Words joined by `+`, each word a run of letters. `1` is the empty word
/// and `0` the empty bag, so neither digit can be a letter.
impl ValueText for WordSum<char> {
    fn parse_value(&self, text: &str, _: &Subset) -> Result<WordBag<char>> {
        let text = text.trim();
        if text == "0" {
            return Ok(Multiset::default());
        }
        let mut words = Vec::new();
        for word in text.split('+') {
            let word = word.trim();
            if word == "1" {
                words.push(Vec::new());
                continue;
            }
            if word.is_empty() || word.chars().any(|c| c.is_whitespace() || c == '0' || c == '1') {
                return Err(Error::format(format!("bad word '{word}' in '{text}'")));
            }
            words.push(word.chars().collect());
        }
        Ok(Multiset::from_tokens(words))
    }

    fn format_value(&self, value: &WordBag<char>) -> String {
        if value.is_empty() {
            return "0".to_owned();
        }
        let mut parts = Vec::new();
        for (word, count) in value.iter() {
            let text: String = if word.is_empty() {
                "1".to_owned()
            } else {
                word.iter().collect()
            };
            for _ in 0..count {
                parts.push(text.clone());
            }
        }
        parts.join("+")
    }
}

/// `score` (the witness is the row's set) or `score @ W`.
impl ValueText for WitnessMax<Subset> {
    fn parse_value(&self, text: &str, key: &Subset) -> Result<Witnessed<Subset>> {
        match text.split_once('@') {
            Some((score, witness)) => Ok(Witnessed {
                weight: parse_float(score)?,
                witness: Subset::parse(witness, key.level())?,
            }),
            None => Ok(Witnessed {
                weight: parse_float(text)?,
                witness: key.clone(),
            }),
        }
    }

    fn format_value(&self, value: &Witnessed<Subset>) -> String {
        format!("{} @ {}", value.weight, value.witness)
    }
}

/// Contracts selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemiringName {
    NatSum,
    Max,
    MinPlus,
    CountWeight,
    Multiset,
    WordSum,
    WitnessMax,
}

impl SemiringName {
    pub const ALL: [SemiringName; 7] = [
        SemiringName::NatSum,
        SemiringName::Max,
        SemiringName::MinPlus,
        SemiringName::CountWeight,
        SemiringName::Multiset,
        SemiringName::WordSum,
        SemiringName::WitnessMax,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SemiringName::NatSum => "nat-sum",
            SemiringName::Max => "max",
            SemiringName::MinPlus => "min-plus",
            SemiringName::CountWeight => "count-weight",
            SemiringName::Multiset => "multiset",
            SemiringName::WordSum => "word-sum",
            SemiringName::WitnessMax => "witness-max",
        }
    }

    /// Whether the contract has a product.
    pub fn is_semiring(self) -> bool {
        !matches!(self, SemiringName::Multiset | SemiringName::WitnessMax)
    }
}

impl fmt::Display for SemiringName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SemiringName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SemiringName::ALL
            .into_iter()
            .find(|name| name.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = SemiringName::ALL.iter().map(|n| n.as_str()).collect();
                Error::param(format!("unknown semiring '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

/// Non-blank, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn at_line(line: usize, err: Error) -> Error {
    match err {
        Error::Format(msg) => Error::Format(format!("line {line}: {msg}")),
        Error::InvalidKey(msg) => Error::InvalidKey(format!("line {line}: {msg}")),
        other => other,
    }
}

fn parse_set(text: &str, universe: Universe) -> Result<Subset> {
    let set = Subset::parse(text, universe.height())?;
    if universe.mentions_phantom(&set) {
        return Err(Error::InvalidKey(format!(
            "subset '{}' names an element ≥ n={}",
            text.trim(),
            universe.n()
        )));
    }
    Ok(set)
}

/// Splits `key : value`.
fn split_entry(line: &str) -> Result<(&str, &str)> {
    line.split_once(':')
        .ok_or_else(|| Error::format(format!("expected 'key : value', got '{line}'")))
}

/// Reads `I | X : value` lines; `X : value` stands for `∅ | X : value`.
pub fn parse_intersection_table<S: ValueText>(
    text: &str,
    n: u64,
    p: usize,
    q: usize,
    contract: &S,
) -> Result<IntersectionInput<S::Value>> {
    let mut table = IntersectionInput::new(n, p, q)?;
    let u = table.universe();
    for (line, content) in content_lines(text) {
        let parsed = (|| {
            let (key, value) = split_entry(content)?;
            let (active, set) = match key.split_once('|') {
                Some((i, x)) => (parse_set(i, u)?, parse_set(x, u)?),
                None => (Subset::empty(u.height()), parse_set(key, u)?),
            };
            if table.get(&active, &set).is_some() {
                return Err(Error::format(format!("duplicate entry ({active} | {set})")));
            }
            let value = contract.parse_value(value, &set)?;
            table.insert(active, set, value)
        })();
        parsed.map_err(|e| at_line(line, e))?;
    }
    Ok(table)
}

/// Reads `X : value` lines with `|X| = p`.
pub fn parse_disjoint_table<S: ValueText>(
    text: &str,
    n: u64,
    p: usize,
    contract: &S,
) -> Result<DisjointInput<S::Value>> {
    let mut table = DisjointInput::new(n, p)?;
    let u = table.universe();
    for (line, content) in content_lines(text) {
        let parsed = (|| {
            let (key, value) = split_entry(content)?;
            let set = parse_set(key, u)?;
            if table.get(&set).is_some() {
                return Err(Error::format(format!("duplicate entry {set}")));
            }
            let value = contract.parse_value(value, &set)?;
            table.insert(set, value)
        })();
        parsed.map_err(|e| at_line(line, e))?;
    }
    Ok(table)
}

/// Largest element named by any key of an input table, plus one. Lets
/// callers infer `n` when it is not given.
pub fn infer_ground_size(text: &str) -> Result<u64> {
    let mut n = 1;
    for (line, content) in content_lines(text) {
        let (key, _) = split_entry(content).map_err(|e| at_line(line, e))?;
        for part in key.split(['|', ',']) {
            let part = part.trim();
            if part == "-" || part.is_empty() {
                continue;
            }
            let m: u64 = part
                .parse()
                .map_err(|_| at_line(line, Error::format(format!("bad element '{part}'"))))?;
            n = n.max(m.checked_add(1).ok_or(Error::Overflow("element index"))?);
        }
    }
    Ok(n)
}

/// One `A : value` line per output; empty sums print as `empty`.
pub fn format_output_table<S: ValueText>(table: &OutputTable<S::Value>, contract: &S) -> String {
    let mut out = String::new();
    for (label, value) in table.iter() {
        let text = match value {
            Adjoined::Identity => "empty".to_owned(),
            Adjoined::Carrier(v) => contract.format_value(v),
        };
        out.push_str(&format!("{label} : {text}\n"));
    }
    out
}

fn header_numbers(line: usize, content: &str, want: usize) -> Result<(Vec<usize>, Vec<&str>)> {
    let mut fields = content.split_whitespace();
    let mut numbers = Vec::with_capacity(want);
    for _ in 0..want {
        let field = fields
            .next()
            .ok_or_else(|| at_line(line, Error::format("header is too short")))?;
        numbers.push(
            field
                .parse()
                .map_err(|_| at_line(line, Error::format(format!("bad header field '{field}'"))))?,
        );
    }
    Ok((numbers, fields.collect()))
}

/// Header `n m [directed]`, then `m` lines `u v w`. `directed` in the header
/// or `force_directed` makes every edge an arc.
pub fn parse_graph(text: &str, force_directed: bool) -> Result<Graph> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| Error::format("empty graph file"))?;
    let (numbers, rest) = header_numbers(line, header, 2)?;
    let directed = match rest.as_slice() {
        [] => force_directed,
        ["directed"] => true,
        ["undirected"] => force_directed,
        _ => return Err(at_line(line, Error::format(format!("unexpected header '{header}'")))),
    };
    let (n, m) = (numbers[0], numbers[1]);
    let mut graph = Graph::new(n, directed).map_err(|e| at_line(line, Error::format(e.to_string())))?;
    let mut seen = 0;
    for (line, content) in lines {
        let fields: Vec<&str> = content.split_whitespace().collect();
        let [u, v, w] = fields.as_slice() else {
            return Err(at_line(line, Error::format(format!("expected 'u v w', got '{content}'"))));
        };
        let vertex = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| at_line(line, Error::format(format!("bad vertex '{s}'"))))
        };
        let weight = parse_float(w).map_err(|e| at_line(line, e))?;
        graph
            .add_edge(vertex(u)?, vertex(v)?, weight)
            .map_err(|e| at_line(line, Error::format(e.to_string())))?;
        seen += 1;
    }
    if seen != m {
        return Err(Error::format(format!("header declares {m} edges, found {seen}")));
    }
    Ok(graph)
}

/// Header `k n`, then `k` rows of `n` whitespace-separated entries.
pub fn parse_matrix<S: ValueText>(text: &str, contract: &S) -> Result<RectMatrix<S::Value>> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| Error::format("empty matrix file"))?;
    let (numbers, rest) = header_numbers(line, header, 2)?;
    if !rest.is_empty() {
        return Err(at_line(line, Error::format(format!("unexpected header '{header}'"))));
    }
    let (k, n) = (numbers[0], numbers[1]);
    let key = Subset::empty(0);
    let mut entries = Vec::with_capacity(k.saturating_mul(n));
    let mut rows = 0;
    for (line, content) in lines {
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != n {
            return Err(at_line(
                line,
                Error::format(format!("expected {n} entries, got {}", fields.len())),
            ));
        }
        for f in fields {
            entries.push(contract.parse_value(f, &key).map_err(|e| at_line(line, e))?);
        }
        rows += 1;
    }
    if rows != k {
        return Err(Error::format(format!("header declares {k} rows, found {rows}")));
    }
    RectMatrix::new(k, n, entries).map_err(|e| Error::format(e.to_string()))
}

/// `X : score` lines over `[n]`.
pub fn parse_scores(text: &str, n: u64) -> Result<ScoreTable> {
    let mut table = ScoreTable::new(n)?;
    let u = table.universe();
    for (line, content) in content_lines(text) {
        let parsed = (|| {
            let (key, value) = split_entry(content)?;
            let set = parse_set(key, u)?;
            if table.get(&set).is_some() {
                return Err(Error::format(format!("duplicate score for {set}")));
            }
            table.insert(set, parse_float(value)?)
        })();
        parsed.map_err(|e| at_line(line, e))?;
    }
    Ok(table)
}
