//! Test-suite files: a TOML schema describing the target program, the test
//! cases with expected outputs and step thresholds, the search settings, and
//! the input generator domain.

use crate::exec::{ArrayDomain, GeneratorSpec, ProgramInput, ScalarDomain};
use crate::lang::{parse, parse_expr, Program};
use crate::repair::{SearchConfig, TestCase};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error at {field}: {message}")]
    Schema { field: String, message: String },
    #[error("duplicate test id `{0}`")]
    DuplicateTestId(String),
    #[error("program error: {0}")]
    Lang(#[from] crate::lang::LangError),
}

fn schema(field: &str, message: impl Into<String>) -> SuiteError {
    SuiteError::Schema { field: field.to_string(), message: message.into() }
}

/// Array contents: either explicit values or a compact form (length, fill
/// value, optional tiling pattern from index 0, optional patch written at an
/// offset).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ArraySpec {
    Explicit(Vec<i64>),
    Compact {
        len: usize,
        #[serde(default)]
        fill: i64,
        #[serde(default)]
        repeat: Vec<i64>,
        #[serde(default)]
        pattern: Vec<i64>,
        #[serde(default)]
        at: usize,
    },
}

impl ArraySpec {
    fn build(&self) -> Vec<i64> {
        match self {
            ArraySpec::Explicit(v) => v.clone(),
            ArraySpec::Compact { len, fill, repeat, pattern, at } => {
                let mut out = vec![*fill; *len];
                if !repeat.is_empty() {
                    for (i, slot) in out.iter_mut().enumerate() {
                        *slot = repeat[i % repeat.len()];
                    }
                }
                for (i, v) in pattern.iter().enumerate() {
                    if let Some(slot) = out.get_mut(at + i) {
                        *slot = *v;
                    }
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputSection {
    #[serde(default)]
    scalars: BTreeMap<String, i64>,
    #[serde(default)]
    arrays: BTreeMap<String, ArraySpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseSection {
    id: String,
    threshold: u64,
    #[serde(default)]
    stream: Vec<i64>,
    expected: BTreeMap<String, i64>,
    #[serde(default)]
    input: Option<InputSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SearchSection {
    #[serde(default = "d_population")]
    population: usize,
    #[serde(default = "d_generations")]
    generations: usize,
    #[serde(default = "d_mutation_rate")]
    mutation_rate: f64,
    #[serde(default = "d_workers")]
    workers: usize,
    #[serde(default = "d_falsification")]
    falsification_budget: usize,
    #[serde(default = "d_patch_len")]
    max_patch_len: usize,
    #[serde(default = "d_candidate_cap")]
    candidate_cap: usize,
}

fn d_population() -> usize {
    40
}
fn d_generations() -> usize {
    20
}
fn d_mutation_rate() -> f64 {
    0.5
}
fn d_workers() -> usize {
    1
}
fn d_falsification() -> usize {
    64
}
fn d_patch_len() -> usize {
    3
}
fn d_candidate_cap() -> usize {
    8
}

impl Default for SearchSection {
    fn default() -> SearchSection {
        SearchSection {
            population: d_population(),
            generations: d_generations(),
            mutation_rate: d_mutation_rate(),
            workers: d_workers(),
            falsification_budget: d_falsification(),
            max_patch_len: d_patch_len(),
            candidate_cap: d_candidate_cap(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScalarGen {
    name: String,
    range: Option<[i64; 2]>,
    formula: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrayGen {
    name: String,
    len: String,
    values: [i64; 2],
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorSection {
    #[serde(default)]
    scalar: Vec<ScalarGen>,
    #[serde(default)]
    array: Vec<ArrayGen>,
    stream_len: Option<[u32; 2]>,
    stream_values: Option<[i64; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    program: String,
    budget: u64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    search: SearchSection,
    #[serde(default)]
    generator: GeneratorSection,
    #[serde(default)]
    case: Vec<CaseSection>,
}

/// A loaded, validated suite: program, cases, budgets, and generator domain.
#[derive(Debug, Clone)]
pub struct TestSuite {
    pub program: Program,
    pub program_path: PathBuf,
    pub budget: u64,
    pub seed: u64,
    pub search: SearchConfig,
    pub falsification_budget: usize,
    pub generator: GeneratorSpec,
    pub cases: Vec<TestCase>,
}

pub fn load_suite(path: &Path) -> Result<TestSuite, SuiteError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| SuiteError::Io { path: path.to_path_buf(), source })?;
    let file: SuiteFile = toml::from_str(&text)
        .map_err(|e| schema("(toml)", e.message().to_string()))?;

    let dir = path.parent().unwrap_or(Path::new("."));
    let program_path = dir.join(&file.program);
    let source = std::fs::read_to_string(&program_path)
        .map_err(|source| SuiteError::Io { path: program_path.clone(), source })?;
    let program = parse(&source)?;
    let diags = crate::lang::check(&program);
    if !diags.is_empty() {
        return Err(schema("program", diags[0].to_string()));
    }

    if file.budget == 0 {
        return Err(schema("budget", "must be at least 1"));
    }
    if file.case.is_empty() {
        return Err(schema("case", "suite must declare at least one test case"));
    }

    let mut cases = Vec::with_capacity(file.case.len());
    let mut seen = std::collections::BTreeSet::new();
    for (k, c) in file.case.iter().enumerate() {
        let at = |f: &str| format!("case[{k}].{f}");
        if !seen.insert(c.id.clone()) {
            return Err(SuiteError::DuplicateTestId(c.id.clone()));
        }
        if c.threshold == 0 {
            return Err(schema(&at("threshold"), "must be at least 1"));
        }
        for out in &program.outputs {
            if !c.expected.contains_key(out) {
                return Err(schema(&at("expected"), format!("missing declared output `{out}`")));
            }
        }
        let input = c.input.clone().unwrap_or(InputSection {
            scalars: BTreeMap::new(),
            arrays: BTreeMap::new(),
        });
        cases.push(TestCase {
            id: c.id.clone(),
            input: ProgramInput {
                scalars: input.scalars,
                arrays: input.arrays.iter().map(|(n, s)| (n.clone(), s.build())).collect(),
                stream: c.stream.clone(),
            },
            expected: c.expected.clone(),
            threshold: c.threshold,
        });
    }

    let mut scalars = Vec::new();
    for (k, s) in file.generator.scalar.iter().enumerate() {
        let field = format!("generator.scalar[{k}]");
        let dom = match (&s.range, &s.formula) {
            (Some([lo, hi]), None) if lo <= hi => ScalarDomain::Range(*lo, *hi),
            (None, Some(f)) => ScalarDomain::Formula(
                parse_expr(f).map_err(|e| schema(&field, e.to_string()))?,
            ),
            _ => return Err(schema(&field, "need exactly one of `range` (lo <= hi) or `formula`")),
        };
        scalars.push((s.name.clone(), dom));
    }
    let mut arrays = Vec::new();
    for (k, a) in file.generator.array.iter().enumerate() {
        let field = format!("generator.array[{k}]");
        arrays.push((
            a.name.clone(),
            ArrayDomain {
                len: parse_expr(&a.len).map_err(|e| schema(&field, e.to_string()))?,
                values: (a.values[0], a.values[1]),
            },
        ));
    }
    let generator = GeneratorSpec {
        scalars,
        arrays,
        stream_len: file.generator.stream_len.map(|[a, b]| (a, b)).unwrap_or((0, 0)),
        stream_values: file.generator.stream_values.map(|[a, b]| (a, b)).unwrap_or((0, 0)),
    };

    Ok(TestSuite {
        program,
        program_path,
        budget: file.budget,
        seed: file.seed,
        search: SearchConfig {
            population: file.search.population,
            generations: file.search.generations,
            mutation_rate: file.search.mutation_rate,
            workers: file.search.workers,
            seed: file.seed,
            max_patch_len: file.search.max_patch_len,
            candidate_cap: file.search.candidate_cap,
        },
        falsification_budget: file.search.falsification_budget,
        generator,
        cases,
    })
}
