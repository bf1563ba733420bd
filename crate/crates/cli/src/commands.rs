//! Dispatch of a merged [`ExperimentConfig`] to the core library.

use std::fs;
use std::path::Path;

use dirset_core::arith::{count_checkpoints, representable_count_segmented, SieveKind};
use dirset_core::diagnostics::{
    closure_checks, coverage_streaming, estimate_accumulation, estimate_density, find_3aps, ratio_gaps, ratio_profile,
    GapMode,
};
use dirset_core::engine::{
    build_truncation, witness_in_box, BuildOptions, EnumerationMode, TupleSpace, DEFAULT_TUPLE_BUDGET,
};
use dirset_core::geometry::{probe_grid, NormKind, OpenBox, ProbeScheme};
use dirset_core::intsets::{enumerate_detailed, IntegerSetSpec};
use dirset_core::report::{render, ApReport, CountReport, EnumerationReport, Format, Reportable};
use dirset_core::scenarios::{run_scenario, ScenarioOptions, DEFAULT_SEED, SCENARIOS};
use dirset_core::Error;
use num_rational::Ratio;

use crate::config::{missing, ExperimentConfig};

type Result<T> = std::result::Result<T, Error>;

/// Tuples drawn in sampled mode unless `budget.samples` says otherwise.
const DEFAULT_SAMPLES: u64 = 10_000_000;

fn need<T: Clone>(v: &Option<T>, field: &str) -> Result<T> {
    v.clone().ok_or_else(|| missing(field))
}

fn parse_specs(c: &ExperimentConfig) -> Result<Vec<IntegerSetSpec>> {
    let raw = need(&c.specs, "specs")?;
    if raw.is_empty() {
        return Err(missing("specs"));
    }
    raw.iter()
        .enumerate()
        .map(|(i, s)| s.parse::<IntegerSetSpec>().map_err(|e| Error::Config(format!("specs[{i}] `{s}`: {e}"))))
        .collect()
}

fn single_spec(c: &ExperimentConfig) -> Result<IntegerSetSpec> {
    let mut specs = parse_specs(c)?;
    if specs.len() != 1 {
        return Err(Error::Config(format!("specs: this command takes one set, got {}", specs.len())));
    }
    Ok(specs.remove(0))
}

/// One spec per coordinate; a lone spec is repeated `k` times.
fn tuple_specs(c: &ExperimentConfig) -> Result<Vec<IntegerSetSpec>> {
    let specs = parse_specs(c)?;
    let k = match (specs.len(), c.k) {
        (1, None) => return Err(Error::Config("k: a single spec needs `k` to set the dimension".into())),
        (1, Some(k)) => k,
        (n, Some(k)) if k != n => return Err(Error::Config(format!("k = {k} but {n} specs were given"))),
        (n, _) => n,
    };
    if k < 2 {
        return Err(Error::Config(format!("k: direction sets need k >= 2, got {k}")));
    }
    Ok(if specs.len() == 1 { vec![specs[0].clone(); k] } else { specs })
}

fn norm(c: &ExperimentConfig) -> Result<NormKind> {
    c.norm.as_deref().map_or(Ok(NormKind::Euclidean), str::parse)
}

fn format(c: &ExperimentConfig) -> Result<Format> {
    c.format.as_deref().map_or(Ok(Format::Structured), str::parse)
}

fn workers(c: &ExperimentConfig) -> usize {
    c.workers.unwrap_or(0)
}

fn build_options(c: &ExperimentConfig) -> BuildOptions {
    let budget = c.budget.as_ref().and_then(|b| b.tuples).map_or(DEFAULT_TUPLE_BUDGET, u128::from);
    BuildOptions { budget, workers: workers(c) }
}

fn sampled(c: &ExperimentConfig) -> Result<EnumerationMode> {
    let seed = c.seed.ok_or_else(|| Error::Config("seed: sampled mode needs an explicit `seed`".into()))?;
    let count = c.budget.as_ref().and_then(|b| b.samples).unwrap_or(DEFAULT_SAMPLES);
    Ok(EnumerationMode::Sampled { seed, count })
}

fn enumeration_mode(c: &ExperimentConfig, specs: &[IntegerSetSpec], bound: u64, distinct: bool) -> Result<EnumerationMode> {
    match c.mode.as_deref().unwrap_or("auto") {
        "exhaustive" => Ok(EnumerationMode::Exhaustive),
        "sampled" => sampled(c),
        "auto" => {
            let (space, _) = TupleSpace::new(specs, bound, distinct)?;
            if space.size() <= build_options(c).budget {
                Ok(EnumerationMode::Exhaustive)
            } else {
                sampled(c)
            }
        }
        other => Err(Error::Config(format!("mode: unknown `{other}` (exhaustive, sampled or auto)"))),
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

/// Prints the report, or writes `<stem>.txt` / `<stem>.csv` under `out`.
fn emit(c: &ExperimentConfig, stem: &str, r: &dyn Reportable) -> Result<()> {
    let f = format(c)?;
    let text = render(r, f)?;
    match &c.out {
        Some(dir) => write_file(dir, &format!("{stem}.{}", if f == Format::Csv { "csv" } else { "txt" }), &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_ratio(s: &str, field: &str) -> Result<Ratio<u64>> {
    s.trim().parse::<Ratio<u64>>().map_err(|e| Error::Config(format!("{field}: `{s}` is not a rational p/q ({e})")))
}

fn parse_box(items: &[String]) -> Result<OpenBox> {
    let intervals = items
        .iter()
        .map(|it| {
            let (lo, hi) = it.split_once(':').ok_or_else(|| Error::Config(format!("box: `{it}` is not lo:hi")))?;
            let p = |v: &str| v.trim().parse::<f64>().map_err(|_| Error::Config(format!("box: `{v}` is not a number")));
            Ok((p(lo)?, p(hi)?))
        })
        .collect::<Result<Vec<_>>>()?;
    OpenBox::new(&intervals)
}

pub fn run(c: &ExperimentConfig) -> Result<u8> {
    let command =
        c.command.as_deref().ok_or_else(|| Error::Config("missing `command`: give a subcommand or set `command`".into()))?;
    format(c)?;
    match command {
        "enumerate" => {
            let spec = single_spec(c)?;
            let bound = need(&c.bound, "bound")?;
            let e = enumerate_detailed(&spec, bound)?;
            emit(c, "enumerate", &EnumerationReport { spec: spec.to_string(), bound, enumeration: &e })?;
        }
        "directions" => {
            let specs = tuple_specs(c)?;
            let bound = need(&c.bound, "bound")?;
            let distinct = c.distinct.unwrap_or(false);
            let mode = enumeration_mode(c, &specs, bound, distinct)?;
            let t = build_truncation(&specs, bound, distinct, mode, build_options(c))?;
            emit(c, "directions", &t)?;
            if let Some(dir) = &c.out {
                write_file(dir, "directions.points.txt", &t.to_text())?;
            }
        }
        "density" => {
            let spec = single_spec(c)?;
            let bound = need(&c.bound, "bound")?;
            let cps = match &c.checkpoints {
                Some(cps) => cps.clone(),
                None => count_checkpoints(bound).into_iter().filter(|&x| x >= 100).collect(),
            };
            emit(c, "density", &estimate_density(&spec, bound, &cps)?)?;
        }
        "ratios" => {
            let spec = single_spec(c)?;
            let p = ratio_profile(&spec, need(&c.bound, "bound")?, need(&c.window, "window")?)?;
            emit(c, "ratios", &p)?;
        }
        "cover" => {
            let specs = tuple_specs(c)?;
            let bound = need(&c.bound, "bound")?;
            let eps = need(&c.epsilon, "epsilon")?;
            let resolution = need(&c.resolution, "resolution")? as usize;
            let distinct = c.distinct.unwrap_or(false);
            let scheme = match c.probes.as_deref().unwrap_or("grid") {
                "grid" => ProbeScheme::Grid,
                "random" => ProbeScheme::Random {
                    seed: c.seed.ok_or_else(|| Error::Config("seed: random probes need an explicit `seed`".into()))?,
                },
                other => return Err(Error::Config(format!("probes: unknown scheme `{other}` (grid or random)"))),
            };
            let probes = probe_grid(specs.len(), resolution, scheme, norm(c)?)?;
            let mode = enumeration_mode(c, &specs, bound, distinct)?;
            let (space, _) = TupleSpace::new(&specs, bound, distinct)?;
            if mode == EnumerationMode::Exhaustive {
                space.check_budget(build_options(c).budget)?;
            }
            emit(c, "cover", &coverage_streaming(&space, mode, eps, &probes, workers(c))?)?;
        }
        "gaps" => {
            let spec = single_spec(c)?;
            let scan = c.scan.clone().unwrap_or_default();
            let lo = parse_ratio(&need(&scan.lo, "lo")?, "lo")?;
            let hi = parse_ratio(&need(&scan.hi, "hi")?, "hi")?;
            let method: GapMode = scan.method.as_deref().unwrap_or("auto").parse()?;
            let r = ratio_gaps(&spec, need(&c.bound, "bound")?, lo, hi, need(&c.resolution, "resolution")?, method, workers(c))?;
            emit(c, "gaps", &r)?;
        }
        "accumulate" | "closure" => {
            let specs = tuple_specs(c)?;
            let ladder = need(&c.ladder, "ladder")?;
            let eps = need(&c.epsilon, "epsilon")?;
            let approx = estimate_accumulation(&specs, &ladder, eps, c.distinct.unwrap_or(false), norm(c)?, build_options(c))?;
            if command == "accumulate" {
                emit(c, "accumulate", &approx)?;
            } else {
                emit(c, "closure", &closure_checks(&approx, workers(c))?)?;
            }
        }
        "aps" => {
            let spec = single_spec(c)?;
            let bound = need(&c.bound, "bound")?;
            let aps = find_3aps(&spec, bound, c.limit, workers(c))?;
            emit(c, "aps", &ApReport { spec: spec.to_string(), bound, aps: &aps })?;
        }
        "count-fx" => {
            let function = need(&c.function, "function")?;
            let kind: SieveKind = function.parse()?;
            if kind == SieveKind::Primes {
                return Err(Error::Config("function: expected omega or totient".into()));
            }
            let bound = need(&c.bound, "bound")?;
            let cps = representable_count_segmented(kind, bound, workers(c))?;
            emit(c, "count-fx", &CountReport { kind: kind.name(), bound, checkpoints: &cps })?;
        }
        "witness" => {
            let specs = tuple_specs(c)?;
            let bx = parse_box(&need(&c.open_box, "box")?)?;
            let search = c.search_bound.or(c.bound).ok_or_else(|| missing("search_bound"))?;
            let w = witness_in_box(&specs, &bx, search, c.distinct.unwrap_or(false), norm(c)?)?;
            emit(c, "witness", &w)?;
        }
        "reproduce" => {
            let name = c.scenario.as_deref().ok_or_else(|| {
                Error::Config(format!("missing `scenario`: one of {}", SCENARIOS.join(", ")))
            })?;
            let opts = ScenarioOptions { workers: workers(c), seed: c.seed.unwrap_or(DEFAULT_SEED) };
            let outcome = run_scenario(name, &opts)?;
            if let Some(dir) = &c.out {
                for a in &outcome.artifacts {
                    write_file(&dir.join(name), &a.file_name, &a.contents)?;
                }
            }
            print!("{}", outcome.artifacts[0].contents);
            return Ok(if outcome.passed() { 0 } else { 3 });
        }
        other => return Err(Error::Config(format!("command: unknown `{other}`"))),
    }
    Ok(0)
}
