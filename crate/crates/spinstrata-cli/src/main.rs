use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{rngs::StdRng, Rng, SeedableRng};
use serde_json::{json, Value};

use spinstrata::curve_system::{
    build_curve_system, build_prototype, salter_conditions_check, CurveName, LabelingCase, Prototype,
};
use spinstrata::euclid_engine::{aux_curve_c, euclidean_trace, shear_with_marking, TwistWord, Verifier};
use spinstrata::framed_rep::{humphries_generators, orbit_bfs, orbit_sizes, spin_pullback_power, Alphabet};
use spinstrata::origami_core::{
    are_isomorphic, cylinders, genus, shear_cylinder, singularity_profile, CylDirection, Origami,
};
use spinstrata::spin_algebra::{
    arf_of_spin, census_threaded, component_census, gcd_of, genus_of_partition, Spin, SpinStructure, DEFAULT_CAP,
};
use spinstrata::{Error, Result};

#[derive(Parser)]
#[command(name = "spinstrata", version, about = "Prototype origamis, r-spin censuses and twist-word certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Out {
    Json,
    Dot,
}

#[derive(Args, Clone)]
struct Common {
    /// Stratum as a comma list of zero orders, e.g. 5,7
    #[arg(long, value_delimiter = ',')]
    kappa: Option<Vec<usize>>,
    #[arg(long)]
    spin: Option<Spin>,
    #[arg(long)]
    genus: Option<usize>,
    #[arg(long)]
    r: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    out: Out,
    /// State limit for enumerations
    #[arg(long, env = "SPINSTRATA_CAP", default_value_t = DEFAULT_CAP)]
    cap: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Origami JSON, either bare or as emitted by `prototype`
    #[arg(long)]
    origami_file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Prototype origami of a stratum, or analysis of a given origami
    Prototype(Common),
    /// Spin structure census for (genus, r), or component census for κ
    Census(Common),
    /// Orbits of the twist action on r-spin structures
    Orbit(Common),
    /// Arf invariant of a prototype's spin structure or of given values
    Arf {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<u64>>,
    },
    /// Euclidean reduction trace with certificate words
    Euclid(Common),
    /// Shear every cylinder and check the result
    Shear(Common),
    /// Generation hypotheses for κ = (r, …, r)
    SalterCheck(Common),
    /// Check that a word maps one curve to another
    Verify {
        #[command(flatten)]
        common: Common,
        /// JSON word, e.g. [["b3",1],["a2",-1]]
        #[arg(long)]
        word: String,
        #[arg(long)]
        source: CurveName,
        #[arg(long)]
        target: CurveName,
    },
}

fn kappa_of(c: &Common) -> Result<Vec<usize>> {
    let k = c.kappa.clone().ok_or_else(|| Error::InvalidInput("--kappa is required".into()))?;
    genus_of_partition(&k)?;
    Ok(k)
}

fn spin_for(kappa: &[usize], spin: Option<Spin>) -> Result<Option<Spin>> {
    if gcd_of(kappa) % 2 == 1 {
        if spin.is_some() {
            return Err(Error::InvalidInput("--spin applies only to even gcd".into()));
        }
        return Ok(None);
    }
    spin.ok_or_else(|| Error::InvalidInput("--spin {even,odd} is required for even gcd".into())).map(Some)
}

fn prototype_of(c: &Common) -> Result<Prototype> {
    let k = kappa_of(c)?;
    build_prototype(&k, spin_for(&k, c.spin)?)
}

fn read_origami(path: &PathBuf) -> Result<Origami> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("origami JSON: {e}")))?;
    let inner = v.get("origami").cloned().unwrap_or(v);
    serde_json::from_value(inner).map_err(|e| Error::InvalidInput(format!("origami JSON: {e}")))
}

fn to_value<T: spinstrata::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn origami_summary(o: &Origami) -> Value {
    json!({
        "origami": o,
        "genus": genus(o),
        "profile": singularity_profile(o),
        "horizontal_cylinders": cylinders(o, CylDirection::Horizontal).len(),
        "vertical_cylinders": cylinders(o, CylDirection::Vertical).len(),
    })
}

enum Output {
    Json(Value),
    Text(String),
}

fn prototype_cmd(c: &Common) -> Result<Output> {
    if let Some(path) = &c.origami_file {
        return Ok(Output::Json(origami_summary(&read_origami(path)?)));
    }
    let k = kappa_of(c)?;
    let spin = spin_for(&k, c.spin)?;
    if let Out::Dot = c.out {
        return Ok(Output::Text(build_curve_system(&k, spin)?.to_dot()));
    }
    let p = build_prototype(&k, spin)?;
    let r = p.r();
    let phi = p.spin_structure(r)?;
    let arf = if r % 2 == 0 { Some(arf_of_spin(&phi)?) } else { None };
    let mut v = origami_summary(&p.origami);
    v["kappa"] = json!(k);
    v["spin"] = to_value(&spin);
    v["labeling"] = to_value(&p.labeling());
    v["r"] = json!(r);
    v["phi"] = json!(phi.values);
    v["arf"] = json!(arf);
    v["b_indices"] = json!(p.system.selected_b());
    v["curve_system"] = to_value(&p.system);
    Ok(Output::Json(v))
}

fn census_cmd(c: &Common) -> Result<Output> {
    if c.kappa.is_some() {
        let k = kappa_of(c)?;
        let g = genus_of_partition(&k)?;
        return Ok(Output::Json(to_value(&component_census(&k, g, c.cap)?)));
    }
    let (g, r) = match (c.genus, c.r) {
        (Some(g), Some(r)) => (g, r),
        _ => return Err(Error::InvalidInput("census needs --genus and --r, or --kappa".into())),
    };
    Ok(Output::Json(to_value(&census_threaded(r, g, c.cap, c.threads)?)))
}

fn orbit_cmd(c: &Common) -> Result<Output> {
    let (g, r) = match (c.genus, c.r) {
        (Some(g), Some(r)) => (g, r),
        _ => return Err(Error::InvalidInput("orbit needs --genus and --r".into())),
    };
    let (kappa, gens) = humphries_generators(g, r)?;
    let mut rng = StdRng::seed_from_u64(c.seed);
    let start = SpinStructure::new(r, (0..2 * g).map(|_| rng.gen_range(0..r)).collect())?;
    let orbit = orbit_bfs(&start, &gens, c.cap)?;
    let sizes = orbit_sizes(r, g, &gens, c.cap)?;
    let arf = if r % 2 == 0 { Some(arf_of_spin(&start)?) } else { None };
    Ok(Output::Json(json!({
        "g": g,
        "r": r,
        "reference_kappa": kappa,
        "generators": gens.iter().map(|t| t.name.to_string()).collect::<Vec<_>>(),
        "start": start.values,
        "start_arf": arf,
        "start_orbit_size": orbit.len(),
        "orbit_sizes": sizes,
    })))
}

fn arf_cmd(c: &Common, values: &Option<Vec<u64>>) -> Result<Output> {
    if let Some(v) = values {
        let r = c.r.ok_or_else(|| Error::InvalidInput("--values needs --r".into()))?;
        let phi = SpinStructure::new(r, v.clone())?;
        return Ok(Output::Json(json!({ "r": r, "values": phi.values, "arf": arf_of_spin(&phi)? })));
    }
    let p = prototype_of(c)?;
    let phi = p.spin_structure(p.r())?;
    Ok(Output::Json(json!({
        "kappa": p.system.kappa,
        "r": phi.r,
        "values": phi.values,
        "arf": arf_of_spin(&phi)?,
    })))
}

fn euclid_cmd(c: &Common) -> Result<Output> {
    let k = kappa_of(c)?;
    let trace = euclidean_trace(&k, spin_for(&k, c.spin)?)?;
    let mut v = to_value(&trace);
    let last = trace.stages.last().map(|s| s.r_next).unwrap_or(trace.r);
    v["final_r"] = json!(last);
    Ok(Output::Json(v))
}

fn shear_cmd(c: &Common) -> Result<Output> {
    if let Some(path) = &c.origami_file {
        let o = read_origami(path)?;
        let profile = singularity_profile(&o);
        let mut rows = Vec::new();
        for dir in [CylDirection::Horizontal, CylDirection::Vertical] {
            for cyl in cylinders(&o, dir) {
                let s = shear_cylinder(&o, &cyl)?;
                rows.push(json!({
                    "direction": dir,
                    "squares": cyl.rows,
                    "isomorphic": are_isomorphic(&o, &s.origami).is_some(),
                    "profile_kept": singularity_profile(&s.origami) == profile,
                    "exponent": s.exponent,
                }));
            }
        }
        return Ok(Output::Json(json!({ "origami": o, "shears": rows })));
    }
    let p = prototype_of(c)?;
    let r = p.r();
    let phi = p.spin_structure(r)?;
    let alphabet = Alphabet::new(&p, r)?;
    let mut rows = Vec::new();
    for (name, _) in &p.cylinders {
        let (s, word) = shear_with_marking(&p, *name)?;
        let (letter, e) = word.letters[0];
        let pulled = spin_pullback_power(&phi, alphabet.get(letter)?, e as i64)?;
        rows.push(json!({
            "core": name,
            "marking": word,
            "isomorphic": are_isomorphic(&p.origami, &s.origami).is_some(),
            "profile_kept": singularity_profile(&s.origami) == singularity_profile(&p.origami),
            "stabilizes_spin": pulled == phi,
        }));
    }
    Ok(Output::Json(json!({ "kappa": p.system.kappa, "shears": rows })))
}

fn salter_cmd(c: &Common) -> Result<Output> {
    let p = prototype_of(c)?;
    let phi = p.spin_structure(p.r())?;
    let extra = if p.labeling() == LabelingCase::OneTwo && p.r() + 2 < p.g() as u64 {
        vec![aux_curve_c(&p)?]
    } else {
        Vec::new()
    };
    let report = salter_conditions_check(&p, &phi, &extra)?;
    let mut v = to_value(&report);
    v["auxiliary"] = to_value(&extra);
    Ok(Output::Json(v))
}

fn verify_cmd(c: &Common, word: &str, source: CurveName, target: CurveName) -> Result<Output> {
    let k = kappa_of(c)?;
    let w: TwistWord = serde_json::from_str(word).map_err(|e| Error::InvalidInput(format!("word JSON: {e}")))?;
    let v = Verifier::new(&k, spin_for(&k, c.spin)?)?;
    let verdict = v.verify_word(&w, source, target, None::<&BTreeSet<CurveName>>)?;
    let mut out = to_value(&verdict);
    out["passed"] = json!(verdict.passed());
    Ok(Output::Json(out))
}

fn run(cli: Cli) -> Result<Output> {
    match &cli.command {
        Command::Prototype(c) => prototype_cmd(c),
        Command::Census(c) => census_cmd(c),
        Command::Orbit(c) => orbit_cmd(c),
        Command::Arf { common, values } => arf_cmd(common, values),
        Command::Euclid(c) => euclid_cmd(c),
        Command::Shear(c) => shear_cmd(c),
        Command::SalterCheck(c) => salter_cmd(c),
        Command::Verify { common, word, source, target } => verify_cmd(common, word, *source, *target),
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    let _ = std::io::stdout().write_all(s.as_bytes());
}

fn fail(kind: &str, message: String) -> ExitCode {
    let v = json!({ "error": { "kind": kind, "message": message } });
    emit(&format!("{}\n", serde_json::to_string_pretty(&v).expect("json")));
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            emit(&e.to_string());
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.render().to_string().trim().to_string()),
    };
    match run(cli) {
        Ok(Output::Json(v)) => {
            emit(&format!("{}\n", serde_json::to_string_pretty(&v).expect("json")));
            ExitCode::SUCCESS
        }
        Ok(Output::Text(s)) => {
            emit(&s);
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.kind(), e.to_string()),
    }
}
