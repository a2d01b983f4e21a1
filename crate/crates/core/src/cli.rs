//! Command implementations behind the `probdl` binary. Each command returns
//! a [`Report`] instead of printing, so the binary stays a thin shell.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::Error;
use crate::generate::{random_instance, synthetic, synthetic_query, RandomKbParams};
use crate::justify::{Budget, Method, DEFAULT_HST_BUDGET, DEFAULT_TIMEOUT};
use crate::kb::KnowledgeBase;
use crate::parser::{parse_kb_with_lines, parse_query, serialize_kb};
use crate::semantics::{
    kb_is_consistent, probability_query, Engine, QueryConfig, DEFAULT_WORLD_LIMIT,
};
use crate::tableau::DEFAULT_NODE_BUDGET;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_RESOURCE: i32 = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Human,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunConfig {
    pub method: Method,
    pub engine: Engine,
    pub timeout: Duration,
    pub max_tableau_nodes: usize,
    pub max_hst_nodes: usize,
    pub world_limit: usize,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            method: Method::default(),
            engine: Engine::default(),
            timeout: DEFAULT_TIMEOUT,
            max_tableau_nodes: DEFAULT_NODE_BUDGET,
            max_hst_nodes: DEFAULT_HST_BUDGET,
            world_limit: DEFAULT_WORLD_LIMIT,
            format: OutputFormat::Human,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.timeout.is_zero() {
            return Err(Error::InvalidArgument("timeout must be positive".into()));
        }
        Ok(())
    }

    pub fn query_config(&self) -> QueryConfig {
        QueryConfig {
            method: self.method,
            engine: self.engine,
            budget: Budget {
                timeout: Some(self.timeout),
                max_tableau_nodes: self.max_tableau_nodes,
                max_hst_nodes: self.max_hst_nodes,
            },
            world_limit: self.world_limit,
        }
    }

    fn json(&self) -> ConfigJson {
        ConfigJson {
            method: self.method,
            engine: self.engine,
            timeout_secs: self.timeout.as_secs_f64(),
            max_tableau_nodes: self.max_tableau_nodes,
            max_hst_nodes: self.max_hst_nodes,
            world_limit: self.world_limit,
        }
    }
}

/// What a command wants printed and the process exit status.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Report {
    fn ok(stdout: String) -> Self {
        Report {
            exit_code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn failure(err: &Error) -> Self {
        let exit_code = if err.is_resource_error() {
            EXIT_RESOURCE
        } else {
            EXIT_INPUT
        };
        let mut stderr = format!("error: {err}\n");
        if let Error::Exhausted { stats, .. } = err {
            let _ = writeln!(
                stderr,
                "partial statistics: {} tableau calls, {} hitting set tree nodes",
                stats.tableau_calls, stats.hst_nodes
            );
        }
        Report {
            exit_code,
            stdout: String::new(),
            stderr,
        }
    }

    fn io_failure(path: &Path, err: std::io::Error) -> Self {
        Report {
            exit_code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: cannot read {}: {err}\n", path.display()),
        }
    }
}

#[derive(Serialize)]
struct ConfigJson {
    method: Method,
    engine: Engine,
    timeout_secs: f64,
    max_tableau_nodes: usize,
    max_hst_nodes: usize,
    world_limit: usize,
}

#[derive(Serialize)]
struct AxiomJson {
    index: usize,
    line: usize,
    axiom: String,
}

#[derive(Serialize)]
struct QueryJson {
    probability: f64,
    justifications: Option<Vec<Vec<AxiomJson>>>,
    formula: Option<String>,
    bdd_nodes: Option<usize>,
    time_ms: f64,
    config: ConfigJson,
}

fn load_kb(path: &Path) -> Result<(KnowledgeBase, Vec<usize>), Report> {
    let text = fs::read_to_string(path).map_err(|e| Report::io_failure(path, e))?;
    parse_kb_with_lines(&text).map_err(|e| Report {
        exit_code: EXIT_INPUT,
        stdout: String::new(),
        stderr: format!("error: {}:{e}\n", path.display()),
    })
}

/// Computes the probability of `query` over the KB stored at `kb_path`.
pub fn cmd_query(kb_path: &Path, query: &str, config: &RunConfig, dot: Option<&Path>) -> Report {
    if let Err(e) = config.validate() {
        return Report::failure(&e);
    }
    let (kb, lines) = match load_kb(kb_path) {
        Ok(x) => x,
        Err(r) => return r,
    };
    let q = match parse_query(query) {
        Ok(q) => q,
        Err(e) => {
            return Report {
                exit_code: EXIT_INPUT,
                stdout: String::new(),
                stderr: format!("error: query:{e}\n"),
            }
        }
    };
    let result = match probability_query(&kb, &q, &config.query_config()) {
        Ok(r) => r,
        Err(e) => return Report::failure(&e),
    };

    if let (Some(path), Some(diagram)) = (dot, &result.diagram) {
        if let Err(e) = fs::write(path, diagram.manager.to_dot(diagram.root)) {
            return Report {
                exit_code: EXIT_INPUT,
                stdout: String::new(),
                stderr: format!("error: cannot write {}: {e}\n", path.display()),
            };
        }
    }

    let time_ms = result.elapsed.as_secs_f64() * 1e3;
    let stdout = match config.format {
        OutputFormat::Json => {
            let justifications = result.covering_set.as_ref().map(|cs| {
                cs.iter()
                    .map(|j| {
                        j.iter()
                            .map(|i| AxiomJson {
                                index: i,
                                line: lines[i],
                                axiom: kb.axiom(i).to_string(),
                            })
                            .collect()
                    })
                    .collect()
            });
            let json = QueryJson {
                probability: result.probability,
                justifications,
                formula: result.formula.as_ref().map(ToString::to_string),
                bdd_nodes: result.bdd_nodes(),
                time_ms,
                config: config.json(),
            };
            let mut s = serde_json::to_string(&json).expect("query report serializes");
            s.push('\n');
            s
        }
        OutputFormat::Human => {
            let mut s = String::new();
            let _ = writeln!(s, "query: {q}");
            let _ = writeln!(s, "probability: {}", result.probability);
            if let Some(cs) = &result.covering_set {
                let _ = writeln!(s, "justifications: {}", cs.len());
                for (k, j) in cs.iter().enumerate() {
                    let _ = writeln!(s, "  #{}", k + 1);
                    for i in j.iter() {
                        let _ = writeln!(s, "    line {}: {}", lines[i], kb.axiom(i));
                    }
                }
            }
            if let Some(f) = &result.formula {
                let _ = writeln!(s, "formula: {f}");
            }
            if let Some(n) = result.bdd_nodes() {
                let _ = writeln!(s, "bdd nodes: {n}");
            }
            if result.covering_set.is_some() {
                let _ = writeln!(
                    s,
                    "tableau calls: {}, hitting set tree nodes: {}",
                    result.stats.tableau_calls, result.stats.hst_nodes
                );
            }
            let _ = writeln!(s, "time: {time_ms:.3} ms");
            let _ = writeln!(
                s,
                "config: method={} engine={}",
                config.method, config.engine
            );
            s
        }
    };
    Report::ok(stdout)
}

/// Consistency of the whole KB, every probabilistic axiom included.
pub fn cmd_check(kb_path: &Path, config: &RunConfig) -> Report {
    if let Err(e) = config.validate() {
        return Report::failure(&e);
    }
    let (kb, _) = match load_kb(kb_path) {
        Ok(x) => x,
        Err(r) => return r,
    };
    match kb_is_consistent(&kb, &config.query_config().budget) {
        Ok(consistent) => {
            let stdout = match config.format {
                OutputFormat::Json => format!(
                    "{}\n",
                    serde_json::json!({ "consistent": consistent, "axioms": kb.len() })
                ),
                OutputFormat::Human => format!(
                    "{} ({} axioms, {} probabilistic)\n",
                    if consistent {
                        "consistent"
                    } else {
                        "inconsistent"
                    },
                    kb.len(),
                    kb.probabilistic_count()
                ),
            };
            Report::ok(stdout)
        }
        Err(e) => Report::failure(&e),
    }
}

/// Serialized layered benchmark KB with `n` layers.
pub fn cmd_gen_synthetic(n: usize) -> Report {
    match synthetic(n) {
        Ok(kb) => Report::ok(serialize_kb(&kb)),
        Err(e) => Report::failure(&e),
    }
}

/// Serialized random KB; the query drawn with it goes into a trailing comment.
pub fn cmd_gen_random(seed: u64, params: RandomKbParams) -> Report {
    let (kb, q) = random_instance(seed, params);
    let mut out = format!("# seed {seed}\n# query: {q}\n");
    out.push_str(&serialize_kb(&kb));
    Report::ok(out)
}

/// One row of the scaling table. `None` fields mean the run timed out or
/// the engine does not produce that quantity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub axioms: usize,
    pub timed_out: bool,
    pub justifications: Option<usize>,
    pub bdd_nodes: Option<usize>,
    pub probability: Option<f64>,
    pub time_s: Option<f64>,
}

/// Runs `B0 <= Bn` on the layered KB for `n = 2, 4, ..., max_n`. Timeouts
/// and budget overruns are recorded in the row instead of aborting.
pub fn bench_rows(max_n: usize, config: &RunConfig) -> Result<Vec<BenchRow>, Error> {
    config.validate()?;
    let mut rows = Vec::new();
    for n in (2..=max_n).step_by(2) {
        let kb = synthetic(n)?;
        let q = synthetic_query(n);
        let start = Instant::now();
        let row = match probability_query(&kb, &q, &config.query_config()) {
            Ok(r) => BenchRow {
                n,
                axioms: kb.len(),
                timed_out: false,
                justifications: r.covering_set.as_ref().map(|c| c.len()),
                bdd_nodes: r.bdd_nodes(),
                probability: Some(r.probability),
                time_s: Some(start.elapsed().as_secs_f64()),
            },
            Err(e) if e.is_resource_error() => BenchRow {
                n,
                axioms: kb.len(),
                timed_out: true,
                justifications: None,
                bdd_nodes: None,
                probability: None,
                time_s: None,
            },
            Err(e) => return Err(e),
        };
        rows.push(row);
    }
    Ok(rows)
}

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "--".into())
}

pub fn cmd_bench(max_n: usize, config: &RunConfig) -> Report {
    if max_n < 1 {
        return Report::failure(&Error::InvalidArgument("max-n must be at least 1".into()));
    }
    let rows = match bench_rows(max_n, config) {
        Ok(rows) => rows,
        Err(e) => return Report::failure(&e),
    };
    let stdout = match config.format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string(&rows).expect("bench rows serialize");
            s.push('\n');
            s
        }
        OutputFormat::Human => {
            let mut s = format!(
                "{:>4} {:>7} {:>15} {:>10} {:>22} {:>10}\n",
                "n", "axioms", "justifications", "bdd_nodes", "probability", "time_s"
            );
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{:>4} {:>7} {:>15} {:>10} {:>22} {:>10}",
                    r.n,
                    r.axioms,
                    if r.timed_out {
                        "--".into()
                    } else {
                        cell(r.justifications)
                    },
                    cell(r.bdd_nodes),
                    cell(r.probability),
                    cell(r.time_s.map(|t| format!("{t:.3}"))),
                );
            }
            s
        }
    };
    Report::ok(stdout)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_timeout_is_rejected() {
        let config = RunConfig {
            timeout: Duration::ZERO,
            ..RunConfig::default()
        };
        assert!(config.validate().is_err());
        assert_eq!(cmd_bench(2, &config).exit_code, EXIT_INPUT);
    }

    #[test]
    fn bench_boundary_prints_header_only() {
        let r = cmd_bench(1, &RunConfig::default());
        assert_eq!(r.exit_code, EXIT_OK);
        assert_eq!(r.stdout.lines().count(), 1);
        assert!(r.stdout.contains("justifications"));
    }

    #[test]
    fn gen_rejects_zero_layers() {
        assert_eq!(cmd_gen_synthetic(0).exit_code, EXIT_INPUT);
        assert_eq!(cmd_gen_synthetic(1).stdout.lines().count(), 3);
    }
}
