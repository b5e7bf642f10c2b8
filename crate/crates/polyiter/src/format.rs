//! JSON files describing system families and hash parameters.
//!
//! A system file looks like
//!
//! ```json
//! {
//!   "p": 3,
//!   "m": 1,
//!   "S": [1, 2, 0, 1],
//!   "systems": [
//!     { "G": [[{ "exps": [0, 2], "coeff": 1 }, { "exps": [0, 0], "coeff": 1 }]],
//!       "H": [[]],
//!       "gm": 1, "hm": 1 }
//!   ],
//!   "schedule": "constant"
//! }
//! ```
//!
//! `S` may also be given as a list of rows. `G` and `H` hold one term list per
//! level `0..m`. A hash parameter file carries the same `p`, `m`, `S`, a
//! `members` list in the `systems` layout, the block width `r` and the start
//! vector `w0`.

use std::path::Path;

use polyiter_core::hash::HashParams;
use polyiter_core::system::ValidationReport;
use polyiter_core::{MultiPoly, Prime, Schedule, ShapeMatrix, SystemFamily, TriangularSystem};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// Syntax or type error; the message carries line and column.
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    /// Well-formed JSON with an unusable value at the given JSON path.
    #[error("{path}: at {at}: {msg}")]
    Value { path: String, at: String, msg: String },
}

impl FormatError {
    fn value(at: impl Into<String>, msg: impl ToString) -> Self {
        FormatError::Value {
            path: String::new(),
            at: at.into(),
            msg: msg.to_string(),
        }
    }

    fn with_path(mut self, file: &str) -> Self {
        match &mut self {
            FormatError::Io { path, .. } | FormatError::Json { path, .. } | FormatError::Value { path, .. } => {
                *path = file.to_string()
            }
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermEntry {
    pub exps: Vec<u32>,
    pub coeff: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ShapeEntry {
    Flat(Vec<u64>),
    Rows(Vec<Vec<u64>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScheduleEntry {
    Named(String),
    List(Vec<usize>),
}

impl Default for ScheduleEntry {
    fn default() -> Self {
        ScheduleEntry::Named("constant".into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemEntry {
    #[serde(rename = "G")]
    pub g: Vec<Vec<TermEntry>>,
    #[serde(rename = "H")]
    pub h: Vec<Vec<TermEntry>>,
    pub gm: u64,
    pub hm: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub p: u64,
    pub m: usize,
    #[serde(rename = "S")]
    pub shape: ShapeEntry,
    pub systems: Vec<SystemEntry>,
    #[serde(default)]
    pub schedule: ScheduleEntry,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub p: u64,
    pub m: usize,
    #[serde(rename = "S")]
    pub shape: ShapeEntry,
    pub members: Vec<SystemEntry>,
    pub r: u32,
    pub w0: Vec<u64>,
}

/// Members as read from disk, before class membership is enforced.
#[derive(Debug, Clone)]
pub struct LoadedSystems {
    pub members: Vec<TriangularSystem>,
    pub schedule: Schedule,
}

impl LoadedSystems {
    /// Validation reports of the members outside the class, by index.
    pub fn failures(&self) -> Vec<(usize, ValidationReport)> {
        self.members
            .iter()
            .enumerate()
            .map(|(i, s)| (i, s.validate()))
            .filter(|(_, r)| !r.is_ok())
            .collect()
    }

    pub fn family(&self) -> polyiter_core::Result<SystemFamily> {
        SystemFamily::new(self.members.clone(), self.schedule.clone())
    }
}

fn read(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, FormatError> {
    serde_json::from_str(text).map_err(|source| FormatError::Json {
        path: String::new(),
        source,
    })
}

fn shape_rows(entry: &ShapeEntry, m: usize) -> Result<ShapeMatrix, FormatError> {
    let size = m.checked_add(1).ok_or_else(|| FormatError::value("m", "too large"))?;
    let rows = match entry {
        ShapeEntry::Flat(v) => {
            if Some(v.len()) != size.checked_mul(size) {
                return Err(FormatError::value(
                    "S",
                    format!("{} entries, expected (m+1)^2 for m = {m}", v.len()),
                ));
            }
            v.chunks(size).map(<[u64]>::to_vec).collect()
        }
        ShapeEntry::Rows(r) => {
            if r.len() != size {
                return Err(FormatError::value("S", format!("{} rows, expected m+1 = {size}", r.len())));
            }
            r.clone()
        }
    };
    ShapeMatrix::new(rows).map_err(|e| FormatError::value("S", e))
}

fn poly(terms: &[TermEntry], p: Prime, arity: usize, at: &str) -> Result<MultiPoly, FormatError> {
    for (t, term) in terms.iter().enumerate() {
        if term.exps.len() != arity {
            return Err(FormatError::value(
                format!("{at}[{t}].exps"),
                format!("{} exponents, expected m+1 = {arity}", term.exps.len()),
            ));
        }
    }
    MultiPoly::from_terms(p, arity, terms.iter().map(|t| (t.exps.clone(), t.coeff)))
        .map_err(|e| FormatError::value(at, e))
}

fn build_member(entry: &SystemEntry, shape: &ShapeMatrix, p: Prime, at: &str) -> Result<TriangularSystem, FormatError> {
    let m = shape.m();
    let mut levels = Vec::with_capacity(2);
    for (name, lists) in [("G", &entry.g), ("H", &entry.h)] {
        if lists.len() != m {
            return Err(FormatError::value(
                format!("{at}.{name}"),
                format!("{} levels, expected m = {m}", lists.len()),
            ));
        }
        let polys = lists
            .iter()
            .enumerate()
            .map(|(i, terms)| poly(terms, p, m + 1, &format!("{at}.{name}[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        levels.push(polys);
    }
    let h = levels.pop().expect("two levels");
    let g = levels.pop().expect("two levels");
    TriangularSystem::new(shape.clone(), p, g, h, entry.gm, entry.hm).map_err(|e| FormatError::value(at, e))
}

fn build_members(
    p: u64,
    m: usize,
    shape: &ShapeEntry,
    entries: &[SystemEntry],
    key: &str,
) -> Result<Vec<TriangularSystem>, FormatError> {
    let p = Prime::new(p).map_err(|e| FormatError::value("p", e))?;
    let shape = shape_rows(shape, m)?;
    if entries.is_empty() {
        return Err(FormatError::value(key, "no systems given"));
    }
    entries
        .iter()
        .enumerate()
        .map(|(i, e)| build_member(e, &shape, p, &format!("{key}[{i}]")))
        .collect()
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        parse_json(text)
    }

    pub fn build(&self) -> Result<LoadedSystems, FormatError> {
        let members = build_members(self.p, self.m, &self.shape, &self.systems, "systems")?;
        let schedule = match &self.schedule {
            ScheduleEntry::Named(s) if s == "constant" => Schedule::Constant,
            ScheduleEntry::Named(s) if s == "cyclic" => Schedule::Cyclic,
            ScheduleEntry::Named(s) => {
                return Err(FormatError::value(
                    "schedule",
                    format!("unknown schedule {s:?}, expected \"constant\", \"cyclic\" or an index list"),
                ))
            }
            ScheduleEntry::List(list) => {
                if let Some((k, &i)) = list.iter().enumerate().find(|(_, &i)| i >= members.len()) {
                    return Err(FormatError::value(
                        format!("schedule[{k}]"),
                        format!("member {i} does not exist, {} given", members.len()),
                    ));
                }
                Schedule::Explicit(list.clone())
            }
        };
        Ok(LoadedSystems { members, schedule })
    }

    /// The file describing `members` under `schedule`.
    pub fn describe(members: &[TriangularSystem], schedule: &Schedule) -> Self {
        let first = &members[0];
        SystemFile {
            p: first.modulus().get(),
            m: first.m(),
            shape: ShapeEntry::Rows(first.shape().rows().to_vec()),
            systems: members.iter().map(describe_member).collect(),
            schedule: match schedule {
                Schedule::Constant => ScheduleEntry::Named("constant".into()),
                Schedule::Cyclic => ScheduleEntry::Named("cyclic".into()),
                Schedule::Explicit(list) => ScheduleEntry::List(list.clone()),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

fn describe_poly(f: &MultiPoly) -> Vec<TermEntry> {
    f.terms()
        .map(|(mono, c)| TermEntry {
            exps: mono.exponents().to_vec(),
            coeff: c as i64,
        })
        .collect()
}

fn describe_member(sys: &TriangularSystem) -> SystemEntry {
    SystemEntry {
        g: (0..sys.m()).map(|i| describe_poly(sys.g(i))).collect(),
        h: (0..sys.m()).map(|i| describe_poly(sys.h(i))).collect(),
        gm: sys.gm(),
        hm: sys.hm(),
    }
}

impl ParamsFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        parse_json(text)
    }

    /// Members as loaded, before the permutation and size checks.
    pub fn build_members(&self) -> Result<Vec<TriangularSystem>, FormatError> {
        build_members(self.p, self.m, &self.shape, &self.members, "members")
    }

    pub fn describe(params: &HashParams) -> Self {
        let first = &params.members()[0];
        ParamsFile {
            p: first.modulus().get(),
            m: first.m(),
            shape: ShapeEntry::Rows(first.shape().rows().to_vec()),
            members: params.members().iter().map(describe_member).collect(),
            r: params.block_bits(),
            w0: params.w0().to_vec(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

pub fn load_system_file(path: &Path) -> Result<LoadedSystems, FormatError> {
    let file = path.display().to_string();
    read(path)
        .and_then(|text| SystemFile::parse(&text))
        .and_then(|f| f.build())
        .map_err(|e| e.with_path(&file))
}

pub fn load_params_file(path: &Path) -> Result<ParamsFile, FormatError> {
    let file = path.display().to_string();
    read(path)
        .and_then(|text| ParamsFile::parse(&text))
        .map_err(|e| e.with_path(&file))
}
