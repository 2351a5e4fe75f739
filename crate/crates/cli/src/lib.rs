//! Library surface of the command-line tool: a `JobSpec` describes one
//! invocation (buildable from flags or a JSON job file) and `run`
//! produces the JSON report; the binary is a thin wrapper, so library
//! and CLI output are byte-identical for the same job.

pub mod expr;

use fgreg_core::chain::lambda_l_word;
use fgreg_core::classify::{classify, classify_relative, RelativeVerdict, Verdict};
use fgreg_core::measures::{fk_relative, lambda_measure, mu0_mu1, mu_s, TransferMatrix};
use fgreg_core::sample::Walker;
use fgreg_core::transversal::SchreierTransversal;
use fgreg_core::words::sphere_size;
use fgreg_core::{Alphabet, Error, Result, StallingsGraph, Word};
use num::{BigInt, BigRational, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JobSpec {
    pub rank: usize,
    #[serde(flatten)]
    pub command: Command,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub limit: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    Stallings {
        generators: Vec<String>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        dot: Option<String>,
    },
    Transversal {
        generators: Vec<String>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        tree_index: Option<usize>,
        max_len: usize,
    },
    Classify {
        set: String,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        relative_to: Option<String>,
    },
    Measure {
        which: MeasureKind,
        set: String,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        relative_to: Option<String>,
        k_from: usize,
        k_to: usize,
        #[serde(skip_serializing_if = "Vec::is_empty", default)]
        s: Vec<String>,
    },
    Sample {
        walk: WalkKind,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        s: Option<String>,
        samples: u64,
        seed: u64,
        max_len: usize,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Fk,
    Mu,
    Mu01,
    Lambda,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum WalkKind {
    Ws,
    W0,
}

/// Exit code per error family: 2 parse, 3 precondition, 4 resources.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::InvalidRank(_)
        | Error::LetterOutOfRange { .. }
        | Error::Unreduced(_) => 2,
        Error::ResourceLimit(_) => 4,
        _ => 3,
    }
}

/// Exact rational as a JSON pair of exact string and float approximation.
pub fn rat_json(r: &BigRational) -> Value {
    json!({
        "exact": format!("{}/{}", r.numer(), r.denom()),
        "approx": r.to_f64(),
    })
}

/// Parses "p/q", a decimal like "0.5", or an integer, exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidParameter(format!("cannot parse '{s}' as a rational"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let digits = format!("{int}{frac}");
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(BigRational::new(n, d));
    }
    let n: BigInt = s.trim().parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

fn check_limit(states: usize, limit: Option<usize>) -> Result<()> {
    match limit {
        Some(l) if states > l => Err(Error::ResourceLimit(format!(
            "{states} states exceeds the limit of {l}"
        ))),
        _ => Ok(()),
    }
}

fn parse_generators(alphabet: Alphabet, generators: &[String]) -> Result<Vec<Word>> {
    generators
        .iter()
        .map(|g| alphabet.parse_word(g, true))
        .collect()
}

fn word_json(w: &Word) -> Value {
    Value::String(w.to_string())
}

/// Runs one job and returns the full JSON report, including the tool
/// version and the resolved job for reproducibility.
pub fn run(job: &JobSpec) -> Result<Value> {
    let alphabet = Alphabet::new(job.rank)?;
    let body = match &job.command {
        Command::Stallings { generators, dot } => {
            let gens = parse_generators(alphabet, generators)?;
            let graph = StallingsGraph::build(alphabet, &gens)?;
            check_limit(graph.vertex_count(), job.limit)?;
            let frontier: Vec<Value> = graph
                .frontier()
                .iter()
                .map(|f| {
                    json!({
                        "vertex": f.boundary_vertex,
                        "missing": f.missing_direction.to_char().to_string(),
                    })
                })
                .collect();
            let mut report = json!({
                "vertices": graph.vertex_count(),
                "edges": graph.edge_count(),
                "rank": graph.rank(),
                "finite_index": graph.finite_index(),
                "frontier": frontier,
                "spanning_trees": graph.count_spanning_trees().to_string(),
            });
            if dot.is_some() {
                report["dot"] = Value::String(graph.to_dot());
            }
            report
        }
        Command::Transversal {
            generators,
            tree_index,
            max_len,
        } => {
            let gens = parse_generators(alphabet, generators)?;
            let graph = StallingsGraph::build(alphabet, &gens)?;
            check_limit(graph.vertex_count(), job.limit)?;
            let transversal = match tree_index {
                None => SchreierTransversal::geodesic(graph),
                Some(i) => {
                    let trees = graph.enumerate_spanning_trees(64)?;
                    let tree = trees
                        .get(*i)
                        .ok_or_else(|| {
                            Error::InvalidParameter(format!(
                                "tree index {i} out of range ({} trees)",
                                trees.len()
                            ))
                        })?
                        .clone();
                    SchreierTransversal::new(graph, tree)
                }
            };
            let reps: Vec<Value> = transversal
                .enumerate(*max_len)
                .into_iter()
                .map(|(w, c)| {
                    json!({
                        "representative": w.to_string(),
                        "internal": c.internal,
                        "geodesic": c.geodesic,
                        "stable": c.stable,
                        "singular": c.singular,
                    })
                })
                .collect();
            json!({
                "count": reps.len(),
                "representatives": reps,
            })
        }
        Command::Classify { set, relative_to } => {
            let a = expr::parse(set, alphabet)?;
            check_limit(a.state_count(), job.limit)?;
            match relative_to {
                None => {
                    let report = classify(&a);
                    json!({
                        "verdict": match report.verdict {
                            Verdict::Thick => "thick",
                            Verdict::ExponentiallyNegligible => "exponentially_negligible",
                        },
                        "witness": report.witness.as_ref().map(word_json),
                        "delta": report.rate_bound.as_ref().map(rat_json),
                        "taxonomy": format!("{:?}", report.taxonomy),
                        "verified_from": report.verified_from,
                    })
                }
                Some(l) => {
                    let l = expr::parse(l, alphabet)?;
                    check_limit(l.state_count(), job.limit)?;
                    let report = classify_relative(&a, &l)?;
                    let parts: Vec<Value> = report
                        .parts
                        .iter()
                        .map(|p| {
                            json!({
                                "lambda_r3": rat_json(&p.lambda_r3),
                                "dead_mass": rat_json(&p.dead_mass),
                                "q": rat_json(&p.q),
                                "lambda_r2": rat_json(&p.lambda_r2),
                            })
                        })
                        .collect();
                    json!({
                        "verdict": match report.verdict {
                            RelativeVerdict::NonSmallCone => "non_small_cone",
                            RelativeVerdict::ExponentiallyMeasurable =>
                                "exponentially_measurable",
                        },
                        "witness": report.witness.as_ref().map(word_json),
                        "parts": parts,
                    })
                }
            }
        }
        Command::Measure {
            which,
            set,
            relative_to,
            k_from,
            k_to,
            s,
        } => {
            let a = expr::parse(set, alphabet)?;
            check_limit(a.state_count(), job.limit)?;
            let ambient = relative_to
                .as_ref()
                .map(|l| expr::parse(l, alphabet))
                .transpose()?;
            match which {
                MeasureKind::Fk => {
                    let counts = TransferMatrix::of(&a).counts_up_to(*k_to);
                    let ks: Vec<usize> = (*k_from..=*k_to).collect();
                    let n_k: Vec<Value> =
                        ks.iter().map(|k| json!(counts[*k].to_string())).collect();
                    let f_k: Vec<Value> = match &ambient {
                        None => ks
                            .iter()
                            .map(|k| {
                                rat_json(&BigRational::new(
                                    counts[*k].clone(),
                                    sphere_size(*k, &alphabet),
                                ))
                            })
                            .collect(),
                        Some(l) => ks
                            .iter()
                            .map(|k| match fk_relative(&a, l, *k) {
                                Some(r) => rat_json(&r),
                                None => json!("undefined"),
                            })
                            .collect(),
                    };
                    json!({
                        "k_range": [k_from, k_to],
                        "n_k": n_k,
                        "f_k": f_k,
                    })
                }
                MeasureKind::Mu => {
                    let mut values = Vec::new();
                    for raw in s {
                        let sv = parse_rational(raw)?;
                        values.push(json!({
                            "s": raw,
                            "mu": rat_json(&mu_s(&a, &sv)?),
                        }));
                    }
                    json!({ "mu_s": values })
                }
                MeasureKind::Mu01 => {
                    let (mu0, mu1) = mu0_mu1(&a);
                    json!({
                        "mu0": mu0.as_ref().map(rat_json).unwrap_or(json!("divergent")),
                        "mu1": mu1.as_ref().map(rat_json).unwrap_or(json!("undefined")),
                    })
                }
                MeasureKind::Lambda => match &ambient {
                    None => {
                        let value = lambda_measure(&a);
                        json!({
                            "lambda": value.as_ref().map(rat_json).unwrap_or(json!("infinite")),
                        })
                    }
                    Some(l) => {
                        // λ_L of a single word relative to an ambient language
                        let words = a.enumerate_words(usize::MAX.min(64));
                        if words.len() != 1 {
                            return Err(Error::InvalidParameter(
                                "relative lambda expects a single-word set".into(),
                            ));
                        }
                        json!({
                            "lambda_l": rat_json(&lambda_l_word(&words[0], l)?),
                        })
                    }
                },
            }
        }
        Command::Sample {
            walk,
            s,
            samples,
            seed,
            max_len,
        } => {
            let mut walker = Walker::new(alphabet, *seed);
            let mut lengths = std::collections::BTreeMap::<usize, u64>::new();
            let mut total_len = 0u64;
            match walk {
                WalkKind::Ws => {
                    let raw = s.as_ref().ok_or_else(|| {
                        Error::InvalidParameter("ws needs a stopping probability".into())
                    })?;
                    let sv = parse_rational(raw)?;
                    for _ in 0..*samples {
                        let w = walker.sample_ws(&sv)?;
                        *lengths.entry(w.len()).or_default() += 1;
                        total_len += w.len() as u64;
                    }
                    // goodness of fit against the geometric marginal
                    let sf = sv.to_f64().unwrap();
                    let histogram: Vec<Value> = lengths
                        .iter()
                        .map(|(k, c)| {
                            let expected = sf * (1.0 - sf).powi(*k as i32);
                            let observed = *c as f64 / *samples as f64;
                            let se =
                                (expected * (1.0 - expected) / *samples as f64).sqrt();
                            json!({
                                "k": k,
                                "count": c,
                                "observed": observed,
                                "expected": expected,
                                "z": if se > 0.0 { (observed - expected) / se } else { 0.0 },
                            })
                        })
                        .collect();
                    let mean = total_len as f64 / *samples as f64;
                    json!({
                        "histogram": histogram,
                        "mean_length": mean,
                        "expected_mean_length": 1.0 / sf - 1.0,
                    })
                }
                WalkKind::W0 => {
                    let mut words = std::collections::BTreeMap::<String, u64>::new();
                    for _ in 0..*samples {
                        let w = walker.sample_w0(*max_len);
                        *words.entry(w.to_string()).or_default() += 1;
                    }
                    let sphere = sphere_size(*max_len, &alphabet)
                        .to_f64()
                        .unwrap_or(f64::INFINITY);
                    let histogram: Vec<Value> = words
                        .iter()
                        .map(|(w, c)| {
                            json!({
                                "word": w,
                                "count": c,
                                "observed": *c as f64 / *samples as f64,
                                "expected": 1.0 / sphere,
                            })
                        })
                        .collect();
                    json!({
                        "length": max_len,
                        "distinct": words.len(),
                        "sphere_size": sphere,
                        "histogram": histogram,
                    })
                }
            }
        }
    };
    Ok(json!({
        "version": env!("CARGO_PKG_VERSION"),
        "job": serde_json::to_value(job).expect("job serializes"),
        "report": body,
    }))
}
