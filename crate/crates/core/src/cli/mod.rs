//! Batch command-line front end. [`run`] does all the work and returns the
//! exit status with the text to print, so commands are testable in-process.
//!
//! Exit status: 0 on success, 2 when the result is dominated by `UNKNOWN`
//! answers or a resource limit was hit (partial output is still printed),
//! 1 on errors.

pub mod syntax;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::ends::{
    ball_to_dot, build_cover_truncation, cayley_ball, complement_components, figure1_probe, split_complex,
    truncation_to_dot, Group,
};
use crate::magnus::{check_step, hierarchy, HierarchyStep, MagnusError, OneRelatorOracle};
use crate::presentations::{abelian_invariants, OneRelatorPresentation, Presentation};
use crate::splittings::{FactorOracle, SplitGroup, SplittingData, Verdict};
use crate::stallings::{build_and_fold, build_and_fold_shuffled, Index, SubgroupGraph};
use crate::words::{free_reduce, Generator, Word};
use crate::Limits;

use syntax::{is_splitting_text, parse_presentation, parse_splitting, parse_word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "cgt", version, about = "Combinatorial group theory at desk scale")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_depth: u64,
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_ball_radius: u64,
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..))]
    pub oracle_length: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SubgroupArgs {
    /// Generators of the ambient free group (default: those in the --gen words).
    #[arg(long)]
    pub alphabet: Option<String>,
    /// A subgroup generator; repeat for several.
    #[arg(long = "gen")]
    pub gens: Vec<String>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Freely reduce a word.
    Reduce {
        word: String,
        /// Also cyclically reduce.
        #[arg(long)]
        cyclic: bool,
    },
    /// Abelian invariants of a presentation.
    Abel { file: PathBuf },
    /// Folded subgroup graph of a free-group subgroup.
    Fold {
        #[command(flatten)]
        sub: SubgroupArgs,
    },
    /// Membership of a word in a free-group subgroup.
    Member {
        #[command(flatten)]
        sub: SubgroupArgs,
        #[arg(long)]
        word: String,
    },
    /// Rank and index of a free-group subgroup.
    Index {
        #[command(flatten)]
        sub: SubgroupArgs,
    },
    /// Normal form of a word in an amalgam or HNN extension.
    Nf {
        file: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Word problem in a one-relator group or a splitting.
    Wp {
        #[arg(long, conflicts_with = "splitting", required_unless_present = "splitting")]
        one_relator: Option<PathBuf>,
        #[arg(long)]
        splitting: Option<PathBuf>,
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        word: Option<String>,
        /// Number of random words.
        #[arg(long)]
        random: Option<usize>,
        /// Maximal length of random words.
        #[arg(long, default_value_t = 10)]
        length: usize,
    },
    /// Magnus–Moldavanskii hierarchy certificate of a one-relator group.
    Hierarchy {
        file: PathBuf,
        /// Same as --format json.
        #[arg(long)]
        json: bool,
    },
    /// Cayley ball of a presentation or splitting.
    Ball {
        file: PathBuf,
        #[arg(long)]
        radius: usize,
    },
    /// Components of B(N) − B(n).
    Ends {
        file: PathBuf,
        #[arg(long)]
        n: usize,
        /// Horizon; defaults to 2n + 4.
        #[arg(long = "N")]
        horizon: Option<usize>,
    },
    /// Sizes of the two halves of a truncated amalgam cover.
    Split {
        file: PathBuf,
        #[arg(long)]
        radius: usize,
    },
    /// Incidence of Γ₀ − B(n) with the halves of a truncated amalgam cover.
    Probe {
        file: PathBuf,
        #[arg(long)]
        n: usize,
        /// Truncation radius; defaults to 2n + 4.
        #[arg(long = "N")]
        horizon: Option<usize>,
    },
}

impl RunConfig {
    pub fn limits(&self) -> Limits {
        Limits {
            max_depth: self.max_depth as usize,
            max_ball_radius: self.max_ball_radius as usize,
            oracle_length: self.oracle_length as usize,
            ..Limits::default()
        }
    }
}

/// Printed output of one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { status: 0, stdout, stderr: String::new() }
    }

    fn partial(stdout: String, why: String) -> Self {
        Outcome { status: 2, stdout, stderr: why }
    }
}

/// `Err` carries the message of a status-1 failure.
type CmdResult = Result<Outcome, String>;

pub fn run(config: &RunConfig) -> Outcome {
    match dispatch(config) {
        Ok(o) => o,
        Err(msg) => Outcome { status: 1, stdout: String::new(), stderr: format!("error: {msg}\n") },
    }
}

/// Parses `args` (program name first) and runs.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(c) => run(&c),
        Err(e) => {
            let status = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if status == 0 {
                Outcome::ok(text)
            } else {
                Outcome { status, stdout: String::new(), stderr: text }
            }
        }
    }
}

/// `count` freely reduced words over `alphabet` of length at most `max_len`,
/// each obtained by reducing a uniform random string of uniform length.
pub fn random_words(alphabet: &[Generator], count: usize, max_len: usize, seed: u64) -> Vec<Word> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let letters: Vec<_> = alphabet.iter().flat_map(|g| [g.pos(), g.neg()]).collect();
    (0..count)
        .map(|_| {
            let len = rng.gen_range(0..=max_len);
            free_reduce((0..len).map(|_| letters[rng.gen_range(0..letters.len())].clone()))
        })
        .collect()
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_presentation(path: &PathBuf) -> Result<Presentation, String> {
    parse_presentation(&read(path)?).map_err(|e| format!("{}:{e}", path.display()))
}

fn load_splitting(path: &PathBuf) -> Result<SplittingData, String> {
    parse_splitting(&read(path)?).map_err(|e| format!("{}:{e}", path.display()))
}

fn load_one_relator(path: &PathBuf) -> Result<OneRelatorPresentation, String> {
    OneRelatorPresentation::try_from(load_presentation(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_group(path: &PathBuf, limits: &Limits) -> Result<Group, String> {
    let text = read(path)?;
    if is_splitting_text(&text) {
        let s = parse_splitting(&text).map_err(|e| format!("{}:{e}", path.display()))?;
        Ok(Group::from_splitting(s, limits))
    } else {
        let p = parse_presentation(&text).map_err(|e| format!("{}:{e}", path.display()))?;
        Ok(Group::from_presentation(p, limits))
    }
}

fn word_arg(s: &str) -> Result<Word, String> {
    parse_word(s).map_err(|e| format!("word {s:?}: {e}"))
}

fn check_letters(alphabet: &[Generator], w: &Word) -> Result<(), String> {
    match w.letters().iter().find(|l| !alphabet.contains(&l.gen)) {
        Some(l) => Err(format!("generator {} is not in the alphabet", l.gen)),
        None => Ok(()),
    }
}

fn json_out(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

fn with_format(command: &str, mut v: Value) -> Value {
    let obj = v.as_object_mut().expect("object");
    obj.insert("format".into(), json!(1));
    obj.insert("command".into(), json!(command));
    v
}

/// A radius beyond the limit is a limit hit (status 2), not an error.
fn radius_limit(r: usize, limits: &Limits) -> Option<Outcome> {
    (r > limits.max_ball_radius).then(|| {
        Outcome::partial(String::new(), format!("radius {r} exceeds --max-ball-radius {}\n", limits.max_ball_radius))
    })
}

fn dispatch(c: &RunConfig) -> CmdResult {
    let limits = c.limits();
    match &c.command {
        Command::Reduce { word, cyclic } => cmd_reduce(c, word, *cyclic),
        Command::Abel { file } => {
            let p = load_presentation(file)?;
            let inv = abelian_invariants(&p);
            Ok(Outcome::ok(match c.format {
                Format::Json => json_out(with_format("abel", json!({ "free_rank": inv.free_rank, "torsion": inv.torsion, "display": inv.to_string() }))),
                _ => format!("{inv}\n"),
            }))
        }
        Command::Fold { sub } => {
            let (graph, _) = subgroup(c, sub)?;
            Ok(Outcome::ok(match c.format {
                Format::Dot => graph.to_dot(),
                Format::Json => json_out(with_format("fold", graph_json(&graph))),
                Format::Text => graph_text(&graph),
            }))
        }
        Command::Member { sub, word } => {
            let (graph, alphabet) = subgroup(c, sub)?;
            let w = word_arg(word)?;
            check_letters(&alphabet, &w)?;
            let expr = graph.express(&w);
            Ok(Outcome::ok(match c.format {
                Format::Json => json_out(with_format(
                    "member",
                    json!({ "word": w.to_string(), "member": expr.is_some(), "expression": expr.map(|e| e.to_string()) }),
                )),
                _ => match expr {
                    Some(e) => format!("YES {e}\n"),
                    None => "NO\n".to_string(),
                },
            }))
        }
        Command::Index { sub } => {
            let (graph, _) = subgroup(c, sub)?;
            let index = match graph.index() {
                Index::Finite(k) => json!(k),
                Index::Infinite => json!("infinite"),
            };
            Ok(Outcome::ok(match c.format {
                Format::Json => json_out(with_format("index", json!({ "rank": graph.rank(), "index": index }))),
                _ => format!("rank: {}\nindex: {}\n", graph.rank(), index.as_str().map(str::to_string).unwrap_or(index.to_string())),
            }))
        }
        Command::Nf { file, word } => {
            let data = load_splitting(file)?;
            let w = word_arg(word)?;
            check_letters(&data.alphabet(), &w)?;
            let group = SplitGroup::new(data, &limits);
            let (form, canonical, complete) = match group.normal_form(&w).map_err(|e| e.to_string())? {
                Ok(nf) => (nf.to_string(), nf.is_canonical(), true),
                Err(u) => (u.partial.to_string(), false, false),
            };
            let out = match c.format {
                Format::Json => json_out(with_format(
                    "nf",
                    json!({ "word": w.to_string(), "normal_form": form, "canonical": canonical, "complete": complete }),
                )),
                _ => format!("{form}\n"),
            };
            if complete {
                Ok(Outcome::ok(out))
            } else {
                Ok(Outcome::partial(out, "factor oracle answered UNKNOWN; partial form shown\n".into()))
            }
        }
        Command::Wp { one_relator, splitting, word, random, length } => {
            let (alphabet, oracle): (Vec<Generator>, Box<dyn Fn(&Word) -> Verdict>) = if let Some(f) = one_relator {
                let p = load_one_relator(f)?;
                let alphabet = p.alphabet().to_vec();
                let o = OneRelatorOracle::new(p, Vec::new(), limits);
                (alphabet, Box::new(move |w| o.word_problem(w)))
            } else {
                let data = load_splitting(splitting.as_ref().expect("clap requires one input"))?;
                let alphabet = data.alphabet();
                let g = SplitGroup::new(data, &limits);
                (alphabet, Box::new(move |w| g.word_problem(w).unwrap_or(Verdict::Unknown)))
            };
            let words = match (word, random) {
                (Some(s), _) => {
                    let w = word_arg(s)?;
                    check_letters(&alphabet, &w)?;
                    vec![w]
                }
                (None, Some(k)) => random_words(&alphabet, *k, *length, c.seed),
                (None, None) => unreachable!("clap requires --word or --random"),
            };
            let verdicts: Vec<Verdict> = words.iter().map(|w| oracle(w)).collect();
            let unknown = verdicts.iter().filter(|v| **v == Verdict::Unknown).count();
            let out = match c.format {
                Format::Json => json_out(with_format(
                    "wp",
                    json!({
                        "seed": c.seed,
                        "results": words.iter().zip(&verdicts).map(|(w, v)| json!({ "word": w.to_string(), "verdict": v })).collect::<Vec<_>>(),
                    }),
                )),
                _ if word.is_some() => format!("{}\n", verdicts[0]),
                _ => words.iter().zip(&verdicts).map(|(w, v)| format!("{v}\t{w}\n")).collect(),
            };
            if unknown * 2 > verdicts.len() || (word.is_some() && unknown > 0) {
                Ok(Outcome::partial(out, format!("{unknown} of {} answers UNKNOWN\n", verdicts.len())))
            } else {
                Ok(Outcome::ok(out))
            }
        }
        Command::Hierarchy { file, json } => {
            let p = load_one_relator(file)?;
            let as_json = *json || c.format == Format::Json;
            let (steps, base, stuck) = match hierarchy(&p, &limits) {
                Ok(h) => (h.steps, Some(h.base), None),
                Err(MagnusError::LimitExceeded(partial)) => (partial.steps, None, Some(partial.stuck)),
                Err(e) => return Err(e.to_string()),
            };
            let checks: Vec<_> = steps.iter().map(|s| check_step(s, &limits)).collect();
            let out = if as_json {
                json_out(with_format(
                    "hierarchy",
                    json!({
                        "input": p.to_string(),
                        "complete": base.is_some(),
                        "steps": steps.iter().zip(&checks).map(|(s, ch)| step_json(s, ch)).collect::<Vec<_>>(),
                        "base": base,
                        "stuck": stuck.as_ref().map(|s| s.to_string()),
                    }),
                ))
            } else {
                let mut s = format!("input: {p}\n");
                for (i, (st, ch)) in steps.iter().zip(&checks).enumerate() {
                    let _ = writeln!(
                        s,
                        "step {}: {} stable {} base {} check {}",
                        i + 1,
                        st.kind,
                        st.stable,
                        st.base,
                        if ch.passed() { "ok" } else { "FAILED" }
                    );
                }
                match (&base, &stuck) {
                    (Some(b), _) => {
                        let _ = writeln!(s, "base: {b}");
                    }
                    (_, Some(st)) => {
                        let _ = writeln!(s, "stopped at: {st}");
                    }
                    _ => {}
                }
                s
            };
            match stuck {
                Some(st) => Ok(Outcome::partial(out, format!("hierarchy limits exceeded at {st}\n"))),
                None if checks.iter().all(|ch| ch.passed()) => Ok(Outcome::ok(out)),
                None => Err("a hierarchy step failed its check".into()),
            }
        }
        Command::Ball { file, radius } => {
            if let Some(o) = radius_limit(*radius, &limits) {
                return Ok(o);
            }
            let g = load_group(file, &limits)?;
            let ball = cayley_ball(&g, *radius);
            let out = match c.format {
                Format::Dot => ball_to_dot(&ball, None),
                Format::Json => json_out(with_format(
                    "ball",
                    json!({
                        "radius": ball.radius,
                        "size": ball.len(),
                        "sphere_sizes": ball.sphere_sizes(),
                        "approximate": ball.approximate,
                        "vertices": ball.vertices.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                    }),
                )),
                Format::Text => format!(
                    "size: {}\nspheres: {}\n{}",
                    ball.len(),
                    ball.sphere_sizes().iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" "),
                    if ball.approximate { "approximate\n" } else { "" }
                ),
            };
            approximate_status(out, ball.approximate)
        }
        Command::Ends { file, n, horizon } => {
            let big = horizon.unwrap_or(2 * n + 4);
            if let Some(o) = radius_limit(big, &limits) {
                return Ok(o);
            }
            let g = load_group(file, &limits)?;
            let ball = cayley_ball(&g, big);
            let report = complement_components(&ball, *n).map_err(|e| e.to_string())?;
            let out = match c.format {
                Format::Dot => ball_to_dot(&ball, Some(&report)),
                Format::Json => {
                    let mut v = serde_json::to_value(&report).expect("serializable");
                    v["component_words"] = json!(report
                        .components
                        .iter()
                        .map(|comp| comp.iter().map(|&i| ball.vertices[i].to_string()).collect::<Vec<_>>())
                        .collect::<Vec<_>>());
                    json_out(with_format("ends", v))
                }
                Format::Text => {
                    let mut s = format!(
                        "cut: {}\nhorizon: {}\ncomponents: {}\nreaching horizon: {}\n",
                        report.cut,
                        report.horizon,
                        report.count(),
                        report.reaching_horizon()
                    );
                    for (i, comp) in report.components.iter().enumerate() {
                        let _ = writeln!(
                            s,
                            "  {i}: size {} inner {} outer {} first {}",
                            comp.len(),
                            report.inner_contacts[i],
                            report.outer_contacts[i],
                            ball.vertices[comp[0]]
                        );
                    }
                    s
                }
            };
            approximate_status(out, report.approximate)
        }
        Command::Split { file, radius } => {
            if let Some(o) = radius_limit(*radius, &limits) {
                return Ok(o);
            }
            let g = Group::from_splitting(load_splitting(file)?, &limits);
            let tr = build_cover_truncation(&g, *radius).map_err(|e| e.to_string())?;
            if tr.approximate {
                let out = match c.format {
                    Format::Dot => truncation_to_dot(&tr, None),
                    _ => String::new(),
                };
                return Ok(Outcome::partial(out, "truncation is approximate\n".into()));
            }
            let sc = split_complex(&tr).map_err(|e| e.to_string())?;
            let inter = sc.intersection();
            let out = match c.format {
                Format::Dot => truncation_to_dot(&tr, Some(&sc)),
                Format::Json => json_out(with_format(
                    "split",
                    json!({
                        "radius": radius,
                        "vertices": tr.ball.len(),
                        "gamma0": sc.gamma0.len(),
                        "zplus": sc.zplus.len(),
                        "zminus": sc.zminus.len(),
                        "intersection": inter.len(),
                        "intersection_is_gamma0": inter == sc.gamma0,
                    }),
                )),
                Format::Text => format!(
                    "vertices: {}\ngamma0: {}\nzplus: {}\nzminus: {}\nintersection: {}\nintersection is gamma0: {}\n",
                    tr.ball.len(),
                    sc.gamma0.len(),
                    sc.zplus.len(),
                    sc.zminus.len(),
                    inter.len(),
                    inter == sc.gamma0
                ),
            };
            Ok(Outcome::ok(out))
        }
        Command::Probe { file, n, horizon } => {
            let big = horizon.unwrap_or(2 * n + 4);
            if let Some(o) = radius_limit(big, &limits) {
                return Ok(o);
            }
            let g = Group::from_splitting(load_splitting(file)?, &limits);
            let tr = build_cover_truncation(&g, big).map_err(|e| e.to_string())?;
            let report = match figure1_probe(&tr, *n) {
                Ok(r) => r,
                Err(e) => return Ok(Outcome::partial(String::new(), format!("{e}\n"))),
            };
            let out = match c.format {
                Format::Json => json_out(with_format("probe", serde_json::to_value(&report).expect("serializable"))),
                _ => {
                    let row = |r: &Vec<bool>| r.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
                    let mut s = format!(
                        "cut: {}\ngamma components: {}\nzplus components: {}\nzminus components: {}\n",
                        report.cut,
                        report.gamma_components.len(),
                        report.plus_components.len(),
                        report.minus_components.len()
                    );
                    for i in 0..report.gamma_components.len() {
                        let _ = writeln!(
                            s,
                            "  gamma {i}: plus {} minus {}",
                            row(&report.plus_incidence[i]),
                            row(&report.minus_incidence[i])
                        );
                    }
                    s
                }
            };
            Ok(Outcome::ok(out))
        }
    }
}

fn approximate_status(out: String, approximate: bool) -> CmdResult {
    if approximate {
        Ok(Outcome::partial(out, "some equalities were UNKNOWN; the ball is approximate\n".into()))
    } else {
        Ok(Outcome::ok(out))
    }
}

fn cmd_reduce(c: &RunConfig, word: &str, cyclic: bool) -> CmdResult {
    let w = word_arg(word)?;
    let (core, conj) = w.cyclic_reduce();
    Ok(Outcome::ok(match c.format {
        Format::Json => {
            let mut v = json!({ "word": w.to_string(), "length": w.len() });
            if cyclic {
                v["core"] = json!(core.to_string());
                v["conjugator"] = json!(conj.to_string());
            }
            json_out(with_format("reduce", v))
        }
        _ if cyclic => format!("{core}\nconjugator: {conj}\n"),
        _ => format!("{w}\n"),
    }))
}

fn subgroup(c: &RunConfig, sub: &SubgroupArgs) -> Result<(SubgroupGraph, Vec<Generator>), String> {
    let gens: Vec<Word> = sub.gens.iter().map(|s| word_arg(s)).collect::<Result<_, _>>()?;
    let alphabet: Vec<Generator> = match &sub.alphabet {
        Some(a) => a.split_whitespace().map(|t| word_arg(t).map(|w| w.letters()[0].gen.clone())).collect::<Result<_, _>>()?,
        None => {
            let mut all: Vec<Generator> = gens.iter().flat_map(|g| g.generators()).collect();
            all.sort();
            all.dedup();
            all
        }
    };
    for g in &gens {
        check_letters(&alphabet, g)?;
    }
    let graph = if c.seed == 0 { build_and_fold(&alphabet, &gens) } else { build_and_fold_shuffled(&alphabet, &gens, c.seed) };
    Ok((graph, alphabet))
}

fn graph_json(g: &SubgroupGraph) -> Value {
    let (n, edges) = g.canonical_form();
    json!({
        "vertices": n,
        "edges": edges.iter().map(|(f, l, t)| json!({ "from": f, "label": l, "to": t })).collect::<Vec<_>>(),
        "rank": g.rank(),
        "index": match g.index() { Index::Finite(k) => json!(k), Index::Infinite => json!("infinite") },
    })
}

fn graph_text(g: &SubgroupGraph) -> String {
    let (n, edges) = g.canonical_form();
    let mut s = format!("vertices: {n}\n");
    for (f, l, t) in edges {
        let _ = writeln!(s, "{f} -{l}-> {t}");
    }
    s
}

fn words_json(ws: &[Generator]) -> Value {
    json!(ws.iter().map(|g| g.to_string()).collect::<Vec<_>>())
}

fn map_json(m: &std::collections::BTreeMap<Generator, Word>) -> Value {
    Value::Object(m.iter().map(|(g, w)| (g.to_string(), json!(w.to_string()))).collect())
}

fn step_json(s: &HierarchyStep, check: &crate::magnus::StepCheck) -> Value {
    json!({
        "kind": s.kind,
        "input": s.input.to_string(),
        "stable": s.stable.to_string(),
        "basis_change": map_json(&s.basis_change),
        "rewritten": s.rewritten.to_string(),
        "base_generators": words_json(s.base.alphabet()),
        "base_relator": s.base.relator().to_string(),
        "base_relator_length": s.base.relator().len(),
        "split_free_rank": s.split_free_rank,
        "edge_neg": words_json(&s.edge_neg),
        "edge_pos": words_json(&s.edge_pos),
        "reconstruction": map_json(&s.reconstruction),
        "check": check,
    })
}
