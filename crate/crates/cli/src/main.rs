use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use quasikit::adhesive::{regular_union, CubeReport};
use quasikit::classifier::Classifier;
use quasikit::error::{Error, Result};
use quasikit::exponential::exponential;
use quasikit::homs::{Budget, DEFAULT_MAX_ENUM};
use quasikit::io::{bundle, Item, Workspace};
use quasikit::limits::{self, Cone};
use quasikit::presheaf::{FuzzyMorphism, FuzzyPresheaf, Subobject};
use quasikit::rewrite::{apply_right_step, describe_state, transmit, TransmissionDemo};
use quasikit::slice::{category_of_elements, slice_exponential, SliceObject};
use quasikit::suites::{self, SuiteConfig};
use quasikit::topology;

/// Finite fuzzy presheaves: validate exchange files, compute limits,
/// exponentials and classifying maps, run property suites and rewrite.
#[derive(Parser)]
#[command(name = "quasikit", version)]
struct Cli {
    /// Write the resulting artifact here (a directory for `demo`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on candidates explored by enumerations.
    #[arg(long, global = true, env = "QUASIKIT_MAX_ENUM", default_value_t = DEFAULT_MAX_ENUM)]
    max_enum: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate exchange files (directories are scanned for *.json).
    Validate {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Run a construction on values given as references (`file.json#name`).
    Compute {
        #[arg(value_enum)]
        op: Op,
        args: Vec<String>,
    },
    /// Run property suites.
    Check {
        #[arg(value_parser = suite_names())]
        suite: String,
    },
    /// Apply the right half of a rewrite step.
    Rewrite { rule: String, host: String },
    /// Run the resource-transmission example.
    Demo,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Op {
    Terminal,
    Product,
    Pullback,
    Pushout,
    Equalizer,
    Coequalizer,
    Exp,
    Chi,
    Union,
    Notnot,
    Elements,
    SliceExp,
}

impl Op {
    fn arity(self) -> usize {
        match self {
            Op::Terminal | Op::Chi | Op::Notnot | Op::Elements => 1,
            _ => 2,
        }
    }
}

fn suite_names() -> Vec<&'static str> {
    let mut names: Vec<&'static str> = suites::registry().iter().map(|s| s.name()).collect();
    names.push("all");
    names
}

/// A failed command: exit code and message.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::EnumerationCap(_)) { 3 } else { 1 };
        Failure(code, format!("error[{}]: {e}", e.code()))
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure(1, format!("error[Io]: {}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            if !msg.is_empty() {
                eprintln!("{msg}");
            }
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> std::result::Result<(), Failure> {
    match &cli.command {
        Command::Validate { paths } => validate(cli, paths),
        Command::Compute { op, args } => compute(cli, *op, args),
        Command::Check { suite } => check(cli, suite),
        Command::Rewrite { rule, host } => rewrite(cli, rule, host),
        Command::Demo => demo(cli),
    }
}

fn emit(cli: &Cli, text: &str, value: Value) {
    match cli.format {
        Format::Text => print!("{text}"),
        Format::Json => println!("{}", serde_json::to_string_pretty(&value).expect("json values serialize")),
    }
}

fn write_artifact(path: &Path, item: &Item) -> std::result::Result<(), Failure> {
    std::fs::write(path, item.to_pretty()).map_err(|e| io_failure(path, e))
}

fn json_files(paths: &[PathBuf]) -> std::result::Result<Vec<PathBuf>, Failure> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| io_failure(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "json"))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn validate(cli: &Cli, paths: &[PathBuf]) -> std::result::Result<(), Failure> {
    let mut ws = Workspace::new(Budget::new(cli.max_enum));
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut worst = 0;
    for path in json_files(paths)? {
        match ws.load(&path) {
            Ok(item) => {
                text += &format!("{}: ok ({})\n", path.display(), item.kind());
                rows.push(json!({"file": path.display().to_string(), "valid": true, "kind": item.kind()}));
            }
            Err(e) => {
                worst = worst.max(if matches!(e, Error::EnumerationCap(_)) { 3 } else { 1 });
                text += &format!("{}: {}: {e}\n", path.display(), e.code());
                rows.push(json!({"file": path.display().to_string(), "valid": false, "error": e.code(), "message": e.to_string()}));
            }
        }
    }
    emit(cli, &text, json!({"files": rows}));
    if worst == 0 {
        Ok(())
    } else {
        Err(Failure(worst, String::new()))
    }
}

fn arg_origin() -> PathBuf {
    PathBuf::from("<command line>")
}

fn presheaf_arg(ws: &mut Workspace, r: &str) -> Result<Arc<FuzzyPresheaf>> {
    match ws.resolve(r, &arg_origin())? {
        Item::Presheaf(p) => Ok(p),
        Item::Subobject(s) => Ok(s.ambient().clone()),
        other => Err(Error::ParseError(format!("`{r}` is a {}, expected a presheaf", other.kind()))),
    }
}

fn morphism_arg(ws: &mut Workspace, r: &str) -> Result<FuzzyMorphism> {
    match ws.resolve(r, &arg_origin())? {
        Item::Morphism(m) => Ok(m),
        other => Err(Error::ParseError(format!("`{r}` is a {}, expected a morphism", other.kind()))),
    }
}

fn subobject_arg(ws: &mut Workspace, r: &str) -> Result<Subobject> {
    match ws.resolve(r, &arg_origin())? {
        Item::Subobject(s) => Ok(s),
        Item::Morphism(m) => Subobject::canonical(&m),
        other => Err(Error::ParseError(format!("`{r}` is a {}, expected a subobject", other.kind()))),
    }
}

/// Carrier sizes and membership tables.
fn describe(p: &FuzzyPresheaf) -> (String, Value) {
    let base = p.base();
    let mut text = String::new();
    let mut objects = serde_json::Map::new();
    for o in 0..base.object_count() {
        let elems: Vec<String> = (0..p.size(o)).map(|x| format!("{}:{}", p.elem_name(o, x), p.membership_name(o, x))).collect();
        text += &format!("  {} ({}): {}\n", base.object_name(o), p.size(o), elems.join(" "));
        let table: serde_json::Map<String, Value> =
            (0..p.size(o)).map(|x| (p.elem_name(o, x).to_string(), json!(p.membership_name(o, x)))).collect();
        objects.insert(base.object_name(o).to_string(), json!({"size": p.size(o), "membership": table}));
    }
    (text, Value::Object(objects))
}

fn cone_bundle(cone: &Cone, leg_names: &[&str]) -> Item {
    let mut items = vec![("apex".to_string(), Item::Presheaf(cone.apex.clone()))];
    for (leg, name) in cone.legs.iter().zip(leg_names) {
        items.push((name.to_string(), Item::Morphism(leg.clone())));
    }
    bundle(items)
}

fn compute(cli: &Cli, op: Op, args: &[String]) -> std::result::Result<(), Failure> {
    if args.len() != op.arity() {
        return Err(Failure(2, format!("error: this operation takes {} argument(s), got {}", op.arity(), args.len())));
    }
    let mut ws = Workspace::new(Budget::new(cli.max_enum));
    let (artifact, shown) = compute_item(&mut ws, op, args)?;
    let explored = ws.budget().used();
    let (table, summary) = describe(&shown);
    let name = op.to_possible_value().expect("named").get_name().to_string();
    let mut text = format!("{name}: explored {explored} candidates\n{table}");
    if let Some(path) = &cli.out {
        write_artifact(path, &artifact)?;
        text += &format!("wrote {}\n", path.display());
    } else if cli.format == Format::Text {
        text += &artifact.to_pretty();
    }
    emit(cli, &text, json!({"op": name, "explored": explored, "summary": summary, "artifact": artifact.to_json()}));
    Ok(())
}

/// The artifact and the presheaf whose table is summarised.
fn compute_item(ws: &mut Workspace, op: Op, args: &[String]) -> Result<(Item, Arc<FuzzyPresheaf>)> {
    let pair =
        |ws: &mut Workspace| -> Result<(FuzzyMorphism, FuzzyMorphism)> { Ok((morphism_arg(ws, &args[0])?, morphism_arg(ws, &args[1])?)) };
    Ok(match op {
        Op::Terminal => {
            let a = presheaf_arg(ws, &args[0])?;
            let one = Arc::new(limits::terminal(a.base(), a.labels()));
            (Item::Presheaf(one.clone()), one)
        }
        Op::Product => {
            let (a, b) = (presheaf_arg(ws, &args[0])?, presheaf_arg(ws, &args[1])?);
            let c = limits::product(&a, &b)?;
            (cone_bundle(&c, &["p1", "p2"]), c.apex)
        }
        Op::Pullback => {
            let (f, g) = pair(ws)?;
            let c = limits::pullback(&f, &g)?;
            (cone_bundle(&c, &["p1", "p2"]), c.apex)
        }
        Op::Equalizer => {
            let (f, g) = pair(ws)?;
            let c = limits::equalizer(&f, &g)?;
            (cone_bundle(&c, &["e"]), c.apex)
        }
        Op::Pushout => {
            let (f, g) = pair(ws)?;
            let c = limits::pushout(&f, &g)?;
            (cone_bundle(&c, &["i1", "i2"]), c.apex)
        }
        Op::Coequalizer => {
            let (f, g) = pair(ws)?;
            let c = limits::coequalizer(&f, &g)?;
            (cone_bundle(&c, &["q"]), c.apex)
        }
        Op::Exp => {
            let (a, b) = (presheaf_arg(ws, &args[0])?, presheaf_arg(ws, &args[1])?);
            let e = exponential(&a, &b, ws.budget())?;
            let (_, ev) = e.eval()?;
            let art = bundle([("exponential".to_string(), Item::Presheaf(e.object.clone())), ("eval".to_string(), Item::Morphism(ev))]);
            (art, e.object.clone())
        }
        Op::Chi => {
            let sub = subobject_arg(ws, &args[0])?;
            let cls = Classifier::for_object(sub.ambient(), ws.budget())?;
            let chi = cls.chi(&sub)?;
            let omega = chi.target().clone();
            (Item::Morphism(chi), omega)
        }
        Op::Union => {
            let (f, g) = (subobject_arg(ws, &args[0])?, subobject_arg(ws, &args[1])?);
            let u = regular_union(&f, &g)?;
            let domain = u.mediator.source().clone();
            let art = bundle([("union".to_string(), Item::Subobject(u.subobject)), ("mediator".to_string(), Item::Morphism(u.mediator))]);
            (art, domain)
        }
        Op::Notnot => {
            let sub = subobject_arg(ws, &args[0])?;
            let closed = topology::notnot_closure(&sub)?;
            let shown = Arc::new(closed.domain());
            (Item::Subobject(closed), shown)
        }
        Op::Elements => {
            let d = presheaf_arg(ws, &args[0])?;
            let el = category_of_elements(&d)?;
            let mut items = vec![("category".to_string(), Item::Category(el.category.clone()))];
            for (o, l) in el.labels.iter().enumerate() {
                items.push((format!("label {}", el.category.object_name(o)), Item::Lattice(l.clone())));
            }
            (bundle(items), d)
        }
        Op::SliceExp => {
            let (p, q) = pair(ws)?;
            let el = category_of_elements(p.target())?;
            let e = slice_exponential(&el, &SliceObject::new(p), &SliceObject::new(q), ws.budget())?;
            let shown = e.anchor.source().clone();
            (Item::Morphism(e.anchor), shown)
        }
    })
}

fn check(cli: &Cli, suite: &str) -> std::result::Result<(), Failure> {
    let cfg = SuiteConfig { seed: cli.seed, max_enum: cli.max_enum };
    let results = suites::run(suite, &cfg)?;
    let failed = results.iter().filter(|r| !r.passed).count();
    let mut text = format!("check {suite} (seed {}, max-enum {})\n", cli.seed, cli.max_enum);
    for r in &results {
        text += &r.line();
        text.push('\n');
    }
    text += &format!("{} properties, {} failed\n", results.len(), failed);
    let rows: Vec<Value> = results.iter().map(|r| r.to_json()).collect();
    emit(cli, &text, json!({"suite": suite, "seed": cli.seed, "results": rows, "failed": failed}));
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure(1, String::new()))
    }
}

fn cube_lines(r: &CubeReport) -> (String, Value) {
    let yes = |b: bool| if b { "yes" } else { "no" };
    let opt = |b: Option<bool>| b.map_or("n/a", yes);
    let text = format!(
        "  back faces pullbacks: {} {}\n  bottom face pushout: {}\n  top face pushout: {}\n  front faces pullbacks: {} {}\n  van kampen: {}\n",
        yes(r.back_pullbacks.0),
        yes(r.back_pullbacks.1),
        yes(r.bottom_pushout),
        yes(r.top_pushout),
        yes(r.front_pullbacks.0),
        yes(r.front_pullbacks.1),
        opt(r.vk),
    );
    let value = json!({
        "back_pullbacks": [r.back_pullbacks.0, r.back_pullbacks.1],
        "bottom_pushout": r.bottom_pushout,
        "top_pushout": r.top_pushout,
        "front_pullbacks": [r.front_pullbacks.0, r.front_pullbacks.1],
        "van_kampen": r.vk,
    });
    (text, value)
}

fn rewrite(cli: &Cli, rule: &str, host: &str) -> std::result::Result<(), Failure> {
    let mut ws = Workspace::new(Budget::new(cli.max_enum));
    let rule = match ws.resolve(rule, &arg_origin())? {
        Item::Rule(r) => r,
        other => return Err(Error::ParseError(format!("`{rule}` is a {}, expected a rule", other.kind())).into()),
    };
    let host = match ws.resolve(host, &arg_origin())? {
        Item::Host(h) => h,
        other => return Err(Error::ParseError(format!("`{host}` is a {}, expected a host", other.kind())).into()),
    };
    let step = apply_right_step(&rule, &host, ws.budget())?;
    let (table, summary) = describe(&step.g_r);
    let (faces, report) = cube_lines(&step.report);
    let mut text = format!("post-state:\n{table}cube:\n{faces}");
    let artifact = bundle([
        ("post".to_string(), Item::Presheaf(step.g_r.clone())),
        ("w".to_string(), Item::Morphism(step.w.clone())),
        ("g_R".to_string(), Item::Morphism(step.g_r_map.clone())),
        ("w'".to_string(), Item::Morphism(step.w_prime.clone())),
    ]);
    if let Some(path) = &cli.out {
        write_artifact(path, &artifact)?;
        text += &format!("wrote {}\n", path.display());
    }
    emit(cli, &text, json!({"post": summary, "cube": report}));
    Ok(())
}

fn demo(cli: &Cli) -> std::result::Result<(), Failure> {
    let budget = Budget::new(cli.max_enum);
    let d = TransmissionDemo::build()?;
    let step = transmit(&d.pre_state, &budget)?;
    let matches = *step.g_r == *d.expected_post;
    let show = |p: &FuzzyPresheaf| {
        describe_state(p)
            .into_iter()
            .map(|(o, elems)| format!("  {o}: {}\n", elems.iter().map(|(x, l)| format!("{x}@{l}")).collect::<Vec<_>>().join(" ")))
            .collect::<String>()
    };
    let (faces, report) = cube_lines(&step.report);
    let mut text = format!("pre-state:\n{}post-state:\n{}cube:\n{faces}", show(&d.pre_state), show(&step.g_r));
    text += &format!("post-state matches expected: {}\n", if matches { "yes" } else { "no" });
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
        write_artifact(&dir.join("pre.json"), &Item::Presheaf(d.pre_state.clone()))?;
        write_artifact(&dir.join("post.json"), &Item::Presheaf(step.g_r.clone()))?;
        write_artifact(&dir.join("expected-post.json"), &Item::Presheaf(d.expected_post.clone()))?;
        write_artifact(&dir.join("cube.json"), &Item::Cube(Box::new(step.cube.clone())))?;
        text += &format!("wrote {}\n", dir.display());
    }
    emit(cli, &text, json!({"matches_expected": matches, "cube": report}));
    if matches {
        Ok(())
    } else {
        Err(Failure(1, String::new()))
    }
}
