//! Problem instances: items with costs, elements with weights, the incidence
//! between them and a budget.
//!
//! Two on-disk encodings are supported. The text format is line oriented and
//! whitespace separated:
//!
//! ```text
//! # comment lines start with '#'
//! n m L
//! c_1 ... c_n
//! w_1 ... w_m
//! k_1 e_1 ... e_k1        <- one line per item, 1-based element indices
//! ...
//! ```
//!
//! The JSON encoding mirrors the same fields (see [`InstanceFile`]). Indices
//! are 1-based on disk and 0-based in memory.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

fn parse_err(line: usize, msg: impl Into<String>) -> InstanceError {
    InstanceError::Parse {
        line,
        msg: msg.into(),
    }
}

/// An immutable budgeted maximum coverage instance.
///
/// `cover[i]` lists the elements covered by item `i` and `covered_by[j]` the
/// items covering element `j`; both are sorted and exact transposes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    budget: i64,
    costs: Vec<i64>,
    weights: Vec<i64>,
    cover: Vec<Vec<usize>>,
    covered_by: Vec<Vec<usize>>,
}

/// Serialized form shared by the JSON encoding. Element indices are 1-based.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub m: usize,
    pub budget: i64,
    pub costs: Vec<i64>,
    pub weights: Vec<i64>,
    pub cover: Vec<Vec<usize>>,
}

impl Instance {
    /// Builds an instance from 0-based cover lists. Lists may be unsorted but
    /// must not contain duplicates or out-of-range indices.
    pub fn new(
        budget: i64,
        costs: Vec<i64>,
        weights: Vec<i64>,
        cover: Vec<Vec<usize>>,
    ) -> Result<Self, InstanceError> {
        if budget < 0 {
            return Err(InstanceError::Invalid("negative budget".into()));
        }
        if cover.len() != costs.len() {
            return Err(InstanceError::Invalid(format!(
                "{} cover lists for {} items",
                cover.len(),
                costs.len()
            )));
        }
        if let Some(i) = costs.iter().position(|&c| c < 0) {
            return Err(InstanceError::Invalid(format!(
                "negative cost for item {}",
                i + 1
            )));
        }
        if let Some(j) = weights.iter().position(|&w| w < 0) {
            return Err(InstanceError::Invalid(format!(
                "negative weight for element {}",
                j + 1
            )));
        }
        let m = weights.len();
        let mut cover = cover;
        let mut covered_by = vec![Vec::new(); m];
        for (i, list) in cover.iter_mut().enumerate() {
            list.sort_unstable();
            for w in list.windows(2) {
                if w[0] == w[1] {
                    return Err(InstanceError::Invalid(format!(
                        "duplicate edge: item {} lists element {} twice",
                        i + 1,
                        w[0] + 1
                    )));
                }
            }
            if let Some(&j) = list.last() {
                if j >= m {
                    return Err(InstanceError::Invalid(format!(
                        "element index out of range: item {} lists element {} (m = {})",
                        i + 1,
                        j + 1,
                        m
                    )));
                }
            }
            for &j in list.iter() {
                covered_by[j].push(i);
            }
        }
        Ok(Instance {
            budget,
            costs,
            weights,
            cover,
            covered_by,
        })
    }

    /// Number of items.
    pub fn n(&self) -> usize {
        self.costs.len()
    }

    /// Number of elements.
    pub fn m(&self) -> usize {
        self.weights.len()
    }

    pub fn budget(&self) -> i64 {
        self.budget
    }

    pub fn cost(&self, item: usize) -> i64 {
        self.costs[item]
    }

    pub fn weight(&self, element: usize) -> i64 {
        self.weights[element]
    }

    pub fn costs(&self) -> &[i64] {
        &self.costs
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    /// Elements covered by `item`, ascending.
    pub fn cover(&self, item: usize) -> &[usize] {
        &self.cover[item]
    }

    /// Items covering `element`, ascending.
    pub fn covered_by(&self, element: usize) -> &[usize] {
        &self.covered_by[element]
    }

    /// Total number of item/element incidences.
    pub fn edge_count(&self) -> usize {
        self.cover.iter().map(Vec::len).sum()
    }

    /// Parses the line-oriented text format. Errors carry 1-based line numbers.
    pub fn parse_text(text: &str) -> Result<Self, InstanceError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(no, l)| (no + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let last_line = text.lines().count();
        let mut next_line = |what: &str| {
            lines
                .next()
                .ok_or_else(|| parse_err(last_line + 1, format!("truncated file: missing {what}")))
        };

        let (hline, header) = next_line("header")?;
        let header = parse_ints(hline, header)?;
        if header.len() != 3 {
            return Err(parse_err(hline, "header must be \"n m L\""));
        }
        let n = to_count(hline, header[0], "n")?;
        let m = to_count(hline, header[1], "m")?;
        let budget = header[2];
        if budget < 0 {
            return Err(parse_err(hline, "negative budget"));
        }

        let (cline, costs) = next_line("costs")?;
        let costs = parse_ints(cline, costs)?;
        if costs.len() != n {
            return Err(parse_err(
                cline,
                format!("expected {n} costs, found {}", costs.len()),
            ));
        }
        if costs.iter().any(|&c| c < 0) {
            return Err(parse_err(cline, "negative cost"));
        }

        let (wline, weights) = next_line("weights")?;
        let weights = parse_ints(wline, weights)?;
        if weights.len() != m {
            return Err(parse_err(
                wline,
                format!("expected {m} weights, found {}", weights.len()),
            ));
        }
        if weights.iter().any(|&w| w < 0) {
            return Err(parse_err(wline, "negative weight"));
        }

        let mut cover = Vec::with_capacity(n);
        for item in 0..n {
            let (line, raw) = next_line(&format!("cover line for item {}", item + 1))?;
            let vals = parse_ints(line, raw)?;
            let (&k, rest) = vals
                .split_first()
                .ok_or_else(|| parse_err(line, "empty cover line"))?;
            let k = to_count(line, k, "cover size")?;
            if rest.len() != k {
                return Err(parse_err(
                    line,
                    format!("cover size {k} but {} element indices", rest.len()),
                ));
            }
            let mut list = Vec::with_capacity(k);
            for &e in rest {
                if e < 1 || e as u64 > m as u64 {
                    return Err(parse_err(
                        line,
                        format!("element index out of range: {e} (m = {m})"),
                    ));
                }
                list.push((e - 1) as usize);
            }
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(parse_err(line, "duplicate edge"));
            }
            cover.push(list);
        }
        if let Some((line, _)) = lines.next() {
            return Err(parse_err(line, "trailing content after last cover line"));
        }

        Instance::new(budget, costs, weights, cover)
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        let file: InstanceFile = serde_json::from_str(text)?;
        Instance::try_from(file)
    }

    /// Loads a file, choosing the JSON decoder for `.json` paths.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, InstanceError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Instance::from_json(&text)
        } else {
            Instance::parse_text(&text)
        }
    }

    /// Writes the instance in the text format.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), InstanceError> {
        let path = path.as_ref();
        let body = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            serde_json::to_string(&self.to_file())?
        } else {
            self.to_text()
        };
        std::fs::write(path, body)?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {}", self.n(), self.m(), self.budget);
        out.push_str(&join(self.costs.iter()));
        out.push('\n');
        out.push_str(&join(self.weights.iter()));
        out.push('\n');
        for list in &self.cover {
            let _ = write!(out, "{}", list.len());
            for &j in list {
                let _ = write!(out, " {}", j + 1);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            n: self.n(),
            m: self.m(),
            budget: self.budget,
            costs: self.costs.clone(),
            weights: self.weights.clone(),
            cover: self
                .cover
                .iter()
                .map(|l| l.iter().map(|j| j + 1).collect())
                .collect(),
        }
    }
}

impl TryFrom<InstanceFile> for Instance {
    type Error = InstanceError;

    fn try_from(f: InstanceFile) -> Result<Self, Self::Error> {
        if f.costs.len() != f.n || f.cover.len() != f.n {
            return Err(InstanceError::Invalid(format!(
                "n = {} but {} costs and {} cover lists",
                f.n,
                f.costs.len(),
                f.cover.len()
            )));
        }
        if f.weights.len() != f.m {
            return Err(InstanceError::Invalid(format!(
                "m = {} but {} weights",
                f.m,
                f.weights.len()
            )));
        }
        let mut cover = Vec::with_capacity(f.n);
        for (i, list) in f.cover.into_iter().enumerate() {
            let mut zero_based = Vec::with_capacity(list.len());
            for e in list {
                if e == 0 || e > f.m {
                    return Err(InstanceError::Invalid(format!(
                        "element index out of range: item {} lists element {e} (m = {})",
                        i + 1,
                        f.m
                    )));
                }
                zero_based.push(e - 1);
            }
            cover.push(zero_based);
        }
        Instance::new(f.budget, f.costs, f.weights, cover)
    }
}

fn join<'a>(vals: impl Iterator<Item = &'a i64>) -> String {
    let mut s = String::new();
    for (k, v) in vals.enumerate() {
        if k > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{v}");
    }
    s
}

fn parse_ints(line: usize, raw: &str) -> Result<Vec<i64>, InstanceError> {
    raw.split_whitespace()
        .map(|tok| {
            tok.parse::<i64>()
                .map_err(|_| parse_err(line, format!("not an integer: {tok:?}")))
        })
        .collect()
}

fn to_count(line: usize, v: i64, what: &str) -> Result<usize, InstanceError> {
    usize::try_from(v).map_err(|_| parse_err(line, format!("negative {what}")))
}

/// From-scratch objective and cost of an item set: `W` sums the weights of
/// elements covered at least once, `C` sums item costs. Feasibility is not
/// checked. Duplicate items count once.
pub fn evaluate(inst: &Instance, items: &[usize]) -> (i64, i64) {
    let mut covered = vec![false; inst.m()];
    let mut seen = vec![false; inst.n()];
    let mut cost = 0i64;
    for &i in items {
        if std::mem::replace(&mut seen[i], true) {
            continue;
        }
        cost += inst.cost(i);
        for &j in inst.cover(i) {
            covered[j] = true;
        }
    }
    let weight = covered
        .iter()
        .zip(inst.weights())
        .filter(|(c, _)| **c)
        .map(|(_, w)| *w)
        .sum();
    (weight, cost)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::Instance;

    /// n=3, m=3, c=(2,3,4), w=(5,7,9), L=5; Cover(1)={1}, Cover(2)={1,2},
    /// Cover(3)={2,3} (1-based).
    pub const INSTANCE_X: &str = "3 3 5\n2 3 4\n5 7 9\n1 1\n2 1 2\n2 2 3\n";

    pub fn instance_x() -> Instance {
        Instance::parse_text(INSTANCE_X).unwrap()
    }
}
