use std::fmt::Write as _;
use std::io::Read;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use dbcover::analysis::{
    bounds, hypothesis_ratio, janson_bound, janson_inputs_estimate, overlap_expectation, JansonInputs,
    OverlapEstimate, OverlapStats, Sampling,
};
use dbcover::construct::{construct, ConstructOptions, RealMode};
use dbcover::coverage::{verify, VerifyOptions};
use dbcover::search::{optimal_length, SearchOptions};
use dbcover::spaces::{Limits, Space, SpaceKind};
use dbcover::windows::CyclicString;

use crate::args::{
    BoundsArgs, Cli, Command, ConstructArgs, Format, OverlapArgs, SearchArgs, SpaceArg, SpaceArgs, VerifyArgs,
};

/// Overrides every enumeration cap.
pub const CAP_ENV: &str = "DBCOVER_MAX_CLASSES";

pub struct Outcome {
    pub output: String,
    pub exit_code: i32,
    /// Lines for the diagnostic stream.
    pub notes: Vec<String>,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Self {
            output,
            exit_code: 0,
            notes: Vec::new(),
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    #[serde(flatten)]
    body: &'a T,
}

fn json<T: Serialize>(schema: &'static str, body: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Envelope { schema, body })?;
    s.push('\n');
    Ok(s)
}

pub fn limits() -> Result<Limits> {
    match std::env::var(CAP_ENV) {
        Ok(v) => {
            let cap: u128 = v
                .trim()
                .parse()
                .with_context(|| format!("{CAP_ENV}={v:?} is not a non-negative integer"))?;
            Ok(Limits::uniform(cap))
        }
        Err(_) => Ok(Limits::default()),
    }
}

fn space(args: &SpaceArgs) -> Result<Space> {
    Ok(match args.space {
        SpaceArg::Perm => Space::permutation(args.n, args.radius)?,
        SpaceArg::Hamming => Space::hamming(args.q, args.n, args.radius)?,
    })
}

fn seed_or_fresh(seed: Option<u64>, notes: &mut Vec<String>) -> u64 {
    seed.unwrap_or_else(|| {
        let fresh = rand::random::<u64>();
        notes.push(format!("seed: {fresh}"));
        fresh
    })
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let limits = limits()?;
    match &cli.command {
        Command::Construct(args) => run_construct(args, cli.format, &limits),
        Command::Verify(args) => run_verify(args, cli.format, &limits),
        Command::Bounds(args) => run_bounds(args, cli.format),
        Command::Overlap(args) => run_overlap(args, cli.format, &limits),
        Command::Search(args) => run_search(args, cli.format, &limits),
    }
}

fn unsupported(format: Format, command: &str) -> Result<Outcome> {
    bail!("--format {format:?} is not supported by `{command}`")
}

fn run_verify(args: &VerifyArgs, format: Format, limits: &Limits) -> Result<Outcome> {
    let space = space(&args.space)?;
    let text = match (&args.code, &args.input) {
        (Some(code), _) => code.clone(),
        (None, Some(path)) if path.as_os_str() == "-" => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        }
        (None, Some(path)) => {
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
        }
        (None, None) => bail!("either --code or --input is required"),
    };
    let text: String = text.split_whitespace().collect();
    let code = CyclicString::parse(space.kind, &text).context("malformed string")?;
    let options = VerifyOptions {
        limits: *limits,
        max_listed: args.max_listed,
    };
    let report = verify(&code, &space, &options)?;
    let output = match format {
        Format::Json => json("dbcover.coverage/1", &report)?,
        Format::Text => {
            let mut s = format!(
                "{space}: M = {}, covered {} of {}, {}\n",
                report.length,
                report.covered_count,
                report.covered_count + report.uncovered_total,
                if report.is_covering { "covering" } else { "NOT covering" }
            );
            for &r in &report.uncovered {
                writeln!(s, "uncovered {}", space.unrank_class(r)?)?;
            }
            s
        }
        Format::Csv => return unsupported(format, "verify"),
    };
    Ok(Outcome {
        output,
        exit_code: if report.is_covering { 0 } else { 1 },
        notes: Vec::new(),
    })
}

fn run_construct(args: &ConstructArgs, format: Format, limits: &Limits) -> Result<Outcome> {
    let space = space(&args.space)?;
    let mut notes = Vec::new();
    let seed = seed_or_fresh(args.seed, &mut notes);
    let options = ConstructOptions {
        c: args.c,
        max_attempts: args.max_attempts,
        patch_slack: args.patch_slack,
        real_mode: if args.iid_reals { RealMode::Iid } else { RealMode::Shuffle },
        limits: *limits,
    };
    let result = construct(&space, seed, &options)?;
    let output = match format {
        Format::Json => json("dbcover.construction/1", &result)?,
        Format::Text => format!(
            "{space}: seed {seed}, base M {}, patched {}, final length {}, attempts {}\n{}\n",
            result.base_length, result.patched_classes, result.final_length, result.attempts, result.code
        ),
        Format::Csv => return unsupported(format, "construct"),
    };
    Ok(Outcome {
        output,
        exit_code: 0,
        notes,
    })
}

fn run_bounds(args: &BoundsArgs, format: Format) -> Result<Outcome> {
    let space = space(&args.space)?;
    let report = bounds(&space, args.c)?;
    let output = match format {
        Format::Json => json("dbcover.bounds/1", &report)?,
        Format::Csv => format!(
            "space,q,n,R,C,class_count,K,lower,upper_target,asymptotic_lower,asymptotic_upper\n{},{},{},{},{},{},{},{},{},{},{}\n",
            kind_name(&space),
            q_of(&space),
            space.n,
            space.radius,
            report.c,
            report.class_count,
            report.ball_size,
            report.lower,
            report.upper_target,
            report.asymptotic_lower,
            report.asymptotic_upper
        ),
        Format::Text => format!(
            "{space}: |Pi| = {}, K = {}, lower {}, upper target {:.3} (C = {})\n",
            report.class_count, report.ball_size, report.lower, report.upper_target, report.c
        ),
    };
    Ok(Outcome::ok(output))
}

fn kind_name(space: &Space) -> &'static str {
    match space.kind {
        SpaceKind::Hamming { .. } => "hamming",
        SpaceKind::Permutation => "permutation",
    }
}

fn q_of(space: &Space) -> String {
    match space.kind {
        SpaceKind::Hamming { q } => q.to_string(),
        SpaceKind::Permutation => String::new(),
    }
}

#[derive(Serialize)]
struct SingleOverlap {
    space: Space,
    seed: Option<u64>,
    sampling: Sampling,
    estimate: OverlapEstimate,
}

#[derive(Serialize)]
struct JansonReport {
    #[serde(rename = "M")]
    length: usize,
    inputs: JansonInputs,
    bound: f64,
}

#[derive(Serialize)]
struct OverlapSweep {
    seed: Option<u64>,
    sampling: Sampling,
    sweep: Vec<OverlapStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    janson: Option<JansonReport>,
}

const CSV_HEADER: &str = "space,q,n,R,k,K,samples,exact,mean,std_error";

fn csv_row(out: &mut String, space: &Space, k_ball: u64, e: &OverlapEstimate) -> Result<()> {
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{}",
        kind_name(space),
        q_of(space),
        space.n,
        space.radius,
        e.k,
        k_ball,
        e.samples,
        e.exact,
        e.mean,
        e.std_error
    )?;
    Ok(())
}

fn run_overlap(args: &OverlapArgs, format: Format, limits: &Limits) -> Result<Outcome> {
    let base = space(&args.space)?;
    let mut notes = Vec::new();
    let sampling = if args.exhaustive {
        Sampling::Exhaustive
    } else {
        Sampling::MonteCarlo { samples: args.samples }
    };
    let seed = match sampling {
        Sampling::Exhaustive => args.seed,
        Sampling::MonteCarlo { .. } => Some(seed_or_fresh(args.seed, &mut notes)),
    };
    let rng_seed = seed.unwrap_or(0);

    if let Some(k) = args.k {
        if args.n_max.is_some() {
            bail!("--k and --n-max cannot be combined");
        }
        let estimate = overlap_expectation(&base, k, sampling, rng_seed, limits)?;
        let output = match format {
            Format::Json => json(
                "dbcover.overlap/1",
                &SingleOverlap {
                    space: base,
                    seed,
                    sampling,
                    estimate,
                },
            )?,
            Format::Csv => {
                let mut s = format!("{CSV_HEADER}\n");
                let k_ball = u64::try_from(base.ball_size()?)?;
                csv_row(&mut s, &base, k_ball, &estimate)?;
                s
            }
            Format::Text => format!(
                "{base}: E(T_{k}) = {} (se {}, {} samples)\n",
                estimate.mean, estimate.std_error, estimate.samples
            ),
        };
        return Ok(Outcome {
            output,
            exit_code: 0,
            notes,
        });
    }

    let n_max = args.n_max.unwrap_or(base.n);
    if n_max < base.n {
        bail!("--n-max must be at least --n");
    }
    let sweep = (base.n..=n_max)
        .map(|n| hypothesis_ratio(&Space { n, ..base }, sampling, rng_seed, limits))
        .collect::<dbcover::Result<Vec<_>>>()?;
    let janson = match args.janson_length {
        Some(m) => {
            let inputs = janson_inputs_estimate(&base, m, sampling, rng_seed, limits)?;
            Some(JansonReport {
                length: m,
                inputs,
                bound: janson_bound(&inputs)?,
            })
        }
        None => None,
    };
    let output = match format {
        Format::Json => json(
            "dbcover.overlap-sweep/1",
            &OverlapSweep {
                seed,
                sampling,
                sweep,
                janson,
            },
        )?,
        Format::Csv => {
            let mut s = format!("{CSV_HEADER}\n");
            for stats in &sweep {
                for e in &stats.per_k {
                    csv_row(&mut s, &stats.space, stats.ball_size, e)?;
                }
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for stats in &sweep {
                writeln!(
                    s,
                    "{}: sum E(T_k) = {} (se {}), K = {}, ratio {}",
                    stats.space, stats.sum_estimate, stats.sum_std_error, stats.ball_size, stats.hypothesis_ratio
                )?;
            }
            if let Some(j) = &janson {
                writeln!(
                    s,
                    "janson M={}: mu {} Delta {} delta {} -> bound {}",
                    j.length, j.inputs.mu, j.inputs.big_delta, j.inputs.delta, j.bound
                )?;
            }
            s
        }
    };
    Ok(Outcome {
        output,
        exit_code: 0,
        notes,
    })
}

fn run_search(args: &SearchArgs, format: Format, limits: &Limits) -> Result<Outcome> {
    let space = space(&args.space)?;
    let defaults = SearchOptions::for_space(&space);
    let options = SearchOptions {
        max_length: args.max_length.unwrap_or(defaults.max_length),
        symbol_budget: args.symbol_budget,
        rotation: !args.no_rotation,
        relabel: !args.no_relabel,
        limits: *limits,
    };
    let result = optimal_length(&space, &options)?;
    let output = match format {
        Format::Json => json("dbcover.search/1", &result)?,
        Format::Text => match (&result.optimal_length, &result.witness) {
            (Some(m), Some(w)) => format!(
                "{space}: M_opt = {m} (lower bound {}), witness {w}\n",
                result.lower_bound
            ),
            _ => format!(
                "{space}: no covering string of length <= {}\n",
                result.max_length
            ),
        },
        Format::Csv => return unsupported(format, "search"),
    };
    Ok(Outcome::ok(output))
}
