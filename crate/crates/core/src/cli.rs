//! The `origami` command line: argument handling, input loading and reports.
//!
//! [`run`] does all the work and returns the exit code with both output
//! streams, so the binary is a thin wrapper and tests can drive it in-process.
//! Exit codes: 0 success, 1 a verification failed, 2 usage, input or
//! resource error.

use std::fmt::Write as _;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algver::{self, Manifest};
use crate::dessin::{self, DessinMonodromy};
use crate::flatgeom::{self, Direction};
use crate::grpcore;
use crate::gtledger::{self, LedgerScript};
use crate::origami::Origami;
use crate::veech::{self, IntMatrix2};
use crate::Error;

pub const ORBIT_BOUND_ENV: &str = "ORIGAMI_ORBIT_BOUND";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Format {
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "origami", version, about = "Origamis, Veech groups, dessin pullbacks and exact verification suites")]
struct Args {
    /// Output format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Bound on orbit and group enumerations; overrides ORIGAMI_ORBIT_BOUND.
    #[arg(long, global = true)]
    orbit_bound: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse an origami and report its canonical form.
    Validate { file: String },
    /// Genus, stratum, marked points, block systems, monodromy group order.
    Invariants { file: String },
    /// Veech group, cusps, elliptic points and curve genus.
    Veech { file: String },
    /// Cylinder decomposition in a rational direction.
    Cylinders {
        file: String,
        /// Direction as p/q.
        #[arg(long)]
        direction: String,
    },
    /// Whether two origamis lie in one SL(2,Z)-orbit.
    SameCurve { file1: String, file2: String },
    /// Build the origami of a pure dessin.
    FromDessin {
        file: String,
        /// Treat the cylinder fingerprint as a claim and fail when it does not hold.
        #[arg(long)]
        check: bool,
    },
    /// Record of invariants preserved by the Galois action.
    Fingerprint { file: String },
    /// Exact identities for the hyperelliptic families.
    VerifyFamilies {
        /// Manifest file; defaults to the built-in one.
        #[arg(long)]
        manifest: Option<String>,
    },
    /// Abelianization ledger in braid-group quotients.
    VerifyGt {
        /// Ledger script; defaults to the built-in one.
        #[arg(long)]
        script: Option<String>,
    },
}

/// Settings shared by every subcommand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub orbit_bound: usize,
    pub format: Format,
    pub inputs: Vec<String>,
}

impl RunConfig {
    pub fn new(orbit_bound: usize, format: Format, inputs: Vec<String>) -> Result<Self, Error> {
        if orbit_bound == 0 {
            return Err(Error::Invalid("orbit bound must be positive".into()));
        }
        Ok(RunConfig { orbit_bound, format, inputs })
    }
}

/// Exit code and captured streams of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Result of a subcommand before formatting.
struct Report {
    value: Value,
    text: String,
    /// Descriptions of the claims that did not hold.
    failures: Vec<String>,
}

impl Report {
    fn ok(value: Value, text: String) -> Self {
        Report { value, text, failures: Vec::new() }
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Verification(_) => 1,
        _ => 2,
    }
}

fn bound_from_env() -> Result<Option<usize>, Error> {
    match std::env::var(ORBIT_BOUND_ENV) {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|e| Error::Invalid(format!("{}={:?}: {}", ORBIT_BOUND_ENV, s, e))),
        Err(_) => Ok(None),
    }
}

/// Runs one command line; `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let bound = match args.orbit_bound.map(Ok).unwrap_or_else(|| bound_from_env().map(|b| b.unwrap_or(veech::DEFAULT_ORBIT_BOUND))) {
        Ok(b) => b,
        Err(e) => return fail(&e),
    };
    let cfg = match RunConfig::new(bound, args.format, inputs_of(&args.command)) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    match dispatch(&args.command, &cfg) {
        Ok(rep) => {
            let mut stdout = match cfg.format {
                Format::Json => serde_json::to_string_pretty(&rep.value).expect("serializable"),
                Format::Text => rep.text.trim_end().to_string(),
            };
            stdout.push('\n');
            let mut stderr = String::new();
            for f in &rep.failures {
                let _ = writeln!(stderr, "verification failed: {}", f);
            }
            let code = if rep.failures.is_empty() { 0 } else { 1 };
            Outcome { code, stdout, stderr }
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> Outcome {
    Outcome { code: error_code(e), stdout: String::new(), stderr: format!("error: {}\n", e) }
}

fn inputs_of(c: &Command) -> Vec<String> {
    match c {
        Command::Validate { file }
        | Command::Invariants { file }
        | Command::Veech { file }
        | Command::Cylinders { file, .. }
        | Command::FromDessin { file, .. }
        | Command::Fingerprint { file } => vec![file.clone()],
        Command::SameCurve { file1, file2 } => vec![file1.clone(), file2.clone()],
        Command::VerifyFamilies { manifest } => manifest.iter().cloned().collect(),
        Command::VerifyGt { script } => script.iter().cloned().collect(),
    }
}

fn read(path: &str) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {}", path, e)))
}

/// A file path, or the name of a built-in origami when no such file exists.
pub fn load_origami(arg: &str) -> Result<Origami, Error> {
    if Path::new(arg).exists() {
        return Origami::from_json(&read(arg)?).map_err(|e| in_file(arg, e));
    }
    Origami::builtin(arg).ok_or_else(|| Error::Invalid(format!("{}: no such file or built-in origami (torus, L22, S2)", arg)))
}

/// A file path, or `D6` / `D2`.
pub fn load_dessin(arg: &str) -> Result<DessinMonodromy, Error> {
    if Path::new(arg).exists() {
        return DessinMonodromy::from_json(&read(arg)?).map_err(|e| in_file(arg, e));
    }
    DessinMonodromy::builtin(arg).ok_or_else(|| Error::Invalid(format!("{}: no such file or built-in dessin (D6, D2)", arg)))
}

fn in_file(path: &str, e: Error) -> Error {
    match e {
        Error::Parse(m) => Error::Parse(format!("{}: {}", path, m)),
        Error::Invalid(m) => Error::Invalid(format!("{}: {}", path, m)),
        other => other,
    }
}

fn dispatch(c: &Command, cfg: &RunConfig) -> Result<Report, Error> {
    match c {
        Command::Validate { file } => validate(&load_origami(file)?),
        Command::Invariants { file } => invariants(&load_origami(file)?, cfg),
        Command::Veech { file } => veech_cmd(&load_origami(file)?, cfg),
        Command::Cylinders { file, direction } => cylinders(&load_origami(file)?, direction.parse()?),
        Command::SameCurve { file1, file2 } => same_curve(&load_origami(file1)?, &load_origami(file2)?, cfg),
        Command::FromDessin { file, check } => from_dessin(&load_dessin(file)?, *check),
        Command::Fingerprint { file } => fingerprint(&load_origami(file)?, cfg),
        Command::VerifyFamilies { manifest } => {
            let m = match manifest {
                Some(p) => Manifest::from_json(&read(p)?).map_err(|e| in_file(p, e))?,
                None => algver::builtin_manifest(),
            };
            verify_families(&m)
        }
        Command::VerifyGt { script } => {
            let s = match script {
                Some(p) => LedgerScript::parse(&read(p)?).map_err(|e| in_file(p, e))?,
                None => LedgerScript::parse(gtledger::S2_LEDGER)?,
            };
            verify_gt(&s)
        }
    }
}

fn matrix_json(m: &IntMatrix2) -> Value {
    json!(m.rows())
}

fn validate(o: &Origami) -> Result<Report, Error> {
    let sd = o.singularity_data();
    let value = json!({
        "valid": true,
        "degree": o.degree(),
        "canonical": serde_json::from_str::<Value>(&o.to_json()).expect("valid json"),
        "genus": sd.genus,
        "stratum": sd.stratum(),
    });
    let text = format!("valid origami of degree {}\ncanonical {}\ngenus {}, stratum {}", o.degree(), o.to_json(), sd.genus, sd.stratum());
    Ok(Report::ok(value, text))
}

fn invariants(o: &Origami, cfg: &RunConfig) -> Result<Report, Error> {
    let sd = o.singularity_data();
    let blocks = grpcore::block_systems(&[o.h().clone(), o.v().clone()], o.degree())?;
    let order = match grpcore::enumerate_group(&[o.h().clone(), o.v().clone()], cfg.orbit_bound) {
        Ok(g) => Some(g.len()),
        Err(Error::BoundExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let spin = flatgeom::spin_parity(o)?;
    let value = json!({
        "degree": o.degree(),
        "genus": sd.genus,
        "stratum": sd.stratum(),
        "zero_orders": sd.zero_orders,
        "n": sd.n,
        "commutator_cycle_type": sd.commutator_cycle_type,
        "block_systems": blocks,
        "monodromy_group_order": order,
        "spin_parity": spin.value(),
    });
    let mut text = String::new();
    let _ = writeln!(text, "degree {}", o.degree());
    let _ = writeln!(text, "genus {}", sd.genus);
    let _ = writeln!(text, "stratum {}", sd.stratum());
    let _ = writeln!(text, "marked points {}", sd.n);
    let _ = writeln!(text, "commutator cycle type {:?}", sd.commutator_cycle_type);
    let _ = writeln!(text, "spin parity {}", spin);
    match order {
        Some(k) => {
            let _ = writeln!(text, "monodromy group order {}", k);
        }
        None => {
            let _ = writeln!(text, "monodromy group order > {}", cfg.orbit_bound);
        }
    }
    let _ = writeln!(text, "block systems {}", blocks.len());
    for b in &blocks {
        let _ = writeln!(text, "  {}", render_blocks(b));
    }
    Ok(Report::ok(value, text))
}

fn render_blocks(b: &[Vec<usize>]) -> String {
    let parts: Vec<String> =
        b.iter().map(|blk| format!("{{{}}}", blk.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))).collect();
    parts.join(" ")
}

fn veech_cmd(o: &Origami, cfg: &RunConfig) -> Result<Report, Error> {
    let vg = veech::veech_group(o, cfg.orbit_bound)?;
    let cr = veech::cusp_report(o, &vg)?;
    let g2 = veech::equals_gamma2(&vg, o);
    let s_in = veech::contains(&vg, &IntMatrix2::S, o);
    let t_in = veech::contains(&vg, &IntMatrix2::T, o);
    let gens: Vec<Value> = vg.generators.iter().map(|(w, m)| json!({"word": w.to_string(), "matrix": matrix_json(m)})).collect();
    let cusps: Vec<Value> = cr
        .cusps
        .iter()
        .map(|c| json!({"width": c.width, "representative": matrix_json(&c.representative), "node_count": c.node_count}))
        .collect();
    let value = json!({
        "sl2_index": vg.sl2_index(),
        "projective_index": vg.projective_index(),
        "contains_minus_identity": vg.contains_minus_identity,
        "contains_S": s_in,
        "contains_T": t_in,
        "generators": gens,
        "cusps": cusps,
        "e2": cr.e2,
        "e3": cr.e3,
        "curve_genus": cr.curve_genus,
        "equals_gamma2": g2,
        "maximally_degenerate_cusps": cr.maximally_degenerate,
    });
    let mut text = String::new();
    let _ = writeln!(text, "index in SL(2,Z) {}, in PSL(2,Z) {}", vg.sl2_index(), vg.projective_index());
    let _ = writeln!(text, "contains -I: {}", vg.contains_minus_identity);
    let _ = writeln!(text, "contains S: {}, contains T: {}", s_in, t_in);
    let _ = writeln!(text, "generators {}", vg.generators.len());
    for (w, m) in &vg.generators {
        let _ = writeln!(text, "  {}  =  {}", w, m);
    }
    let _ = writeln!(text, "cusps {}", cr.cusps.len());
    let _ = writeln!(text, "  {:>5}  {:>5}  representative", "width", "nodes");
    for c in &cr.cusps {
        let _ = writeln!(text, "  {:>5}  {:>5}  {}", c.width, c.node_count, c.representative);
    }
    let _ = writeln!(text, "elliptic points of order 2: {}, of order 3: {}", cr.e2, cr.e3);
    let _ = writeln!(text, "curve genus {}", cr.curve_genus);
    let _ = writeln!(text, "equals Gamma(2): {}", g2);
    if !cr.maximally_degenerate.is_empty() {
        let _ = writeln!(text, "maximally degenerate cusps {:?}", cr.maximally_degenerate);
    }
    Ok(Report::ok(value, text))
}

fn cylinders(o: &Origami, dir: Direction) -> Result<Report, Error> {
    let cd = flatgeom::cylinder_decomposition(o, dir);
    let cyl: Vec<Value> = cd.cylinders.iter().map(|c| json!({"width": c.width, "height": c.height})).collect();
    let value = json!({
        "direction": dir.to_string(),
        "maximal_cylinders": cd.cylinders.len(),
        "cylinders": cyl,
        "unit_strips": cd.unit_strip_count,
    });
    let mut text = String::new();
    let _ = writeln!(text, "direction {}: {} maximal cylinders, {} unit strips", dir, cd.cylinders.len(), cd.unit_strip_count);
    let _ = writeln!(text, "  {:>5}  {:>6}", "width", "height");
    for c in &cd.cylinders {
        let _ = writeln!(text, "  {:>5}  {:>6}", c.width, c.height);
    }
    Ok(Report::ok(value, text))
}

fn same_curve(a: &Origami, b: &Origami, cfg: &RunConfig) -> Result<Report, Error> {
    let same = veech::same_teichmueller_curve(a, b, cfg.orbit_bound)?;
    let value = json!({"same_curve": same, "first": json_of(a), "second": json_of(b)});
    let text = format!("{} and {}: {}", a.to_json(), b.to_json(), if same { "same origami curve" } else { "different SL(2,Z)-orbits" });
    Ok(Report::ok(value, text))
}

fn json_of(o: &Origami) -> Value {
    serde_json::from_str(&o.to_json()).expect("valid json")
}

fn from_dessin(d: &DessinMonodromy, check: bool) -> Result<Report, Error> {
    let o = dessin::origami_from_dessin(d)?;
    let fp = dessin::fingerprint_check(&o, d)?;
    let verdict = fp.check();
    let sd = o.singularity_data();
    let value = json!({
        "dessin": serde_json::from_str::<Value>(&d.to_json()).expect("valid json"),
        "origami": json_of(&o),
        "degree": o.degree(),
        "genus": sd.genus,
        "stratum": sd.stratum(),
        "fingerprint": fp,
        "fingerprint_holds": verdict.is_ok(),
    });
    let mut text = String::new();
    let _ = writeln!(text, "dessin {} of degree {}, pure: {}", d.to_json(), d.degree(), d.is_pure());
    let _ = writeln!(text, "origami {}", o.to_json());
    let _ = writeln!(text, "degree {}, genus {}, stratum {}", o.degree(), sd.genus, sd.stratum());
    let _ = writeln!(text, "  {:>9}  {:>9}  {:>10}  heights", "direction", "cylinders", "unit strips");
    for c in &fp.directions {
        let _ = writeln!(text, "  {:>9}  {:>9}  {:>10}  {:?}", c.direction, c.maximal_cylinders, c.unit_strips, c.heights);
    }
    let msg = match &verdict {
        Ok(()) => "fingerprint: counts contain 1 and D/2, all heights 2".to_string(),
        Err(e) => format!("fingerprint: {}", e),
    };
    let _ = writeln!(text, "{}", msg);
    let mut rep = Report::ok(value, text);
    if check {
        if let Err(e) = verdict {
            rep.failures.push(format!("cylinder fingerprint of the dessin origami: {}", e));
        }
    }
    Ok(rep)
}

fn fingerprint(o: &Origami, cfg: &RunConfig) -> Result<Report, Error> {
    let sd = o.singularity_data();
    let spin = flatgeom::spin_parity(o)?;
    let vg = veech::veech_group(o, cfg.orbit_bound)?;
    let cr = veech::cusp_report(o, &vg)?;
    let mut widths: Vec<usize> = cr.cusps.iter().map(|c| c.width).collect();
    let mut nodes: Vec<usize> = cr.cusps.iter().map(|c| c.node_count).collect();
    widths.sort_unstable();
    nodes.sort_unstable();
    let value = json!({
        "degree": o.degree(),
        "stratum": sd.stratum(),
        "ramification_profile": sd.commutator_cycle_type,
        "spin_parity": spin.value(),
        "veech_index": vg.projective_index(),
        "cusp_widths": widths,
        "node_counts": nodes,
    });
    let mut text = String::new();
    let _ = writeln!(text, "degree {}", o.degree());
    let _ = writeln!(text, "stratum {}", sd.stratum());
    let _ = writeln!(text, "ramification profile {:?}", sd.commutator_cycle_type);
    let _ = writeln!(text, "spin parity {}", spin);
    let _ = writeln!(text, "Veech index {}", vg.projective_index());
    let _ = writeln!(text, "cusp widths {:?}", widths);
    let _ = writeln!(text, "node counts {:?}", nodes);
    Ok(Report::ok(value, text))
}

fn verify_families(m: &Manifest) -> Result<Report, Error> {
    let outcomes = algver::run_manifest(m)?;
    let mut text = String::new();
    for c in &outcomes {
        let _ = writeln!(text, "[{}] {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    let failures: Vec<String> = outcomes.iter().filter(|c| !c.passed).map(|c| format!("{} ({})", c.name, c.detail)).collect();
    let _ = writeln!(text, "verdict: {}", if failures.is_empty() { "pass" } else { "fail" });
    let value = json!({"checks": outcomes, "passed": failures.is_empty()});
    Ok(Report { value, text, failures })
}

fn verify_gt(s: &LedgerScript) -> Result<Report, Error> {
    let rep = gtledger::verify_ledger_script(s)?;
    let failures: Vec<String> = rep.failures().iter().map(|f| format!("{} ({})", f.label, f.detail)).collect();
    let mut value = serde_json::to_value(&rep).expect("serializable");
    value["passed"] = json!(rep.passed());
    Ok(Report { value, text: rep.render_text(), failures })
}
