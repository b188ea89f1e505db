//! Subcommand dispatch shared by the command-line tool and the tests:
//! validated configuration in, deterministic report text out.

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::codes::{build_pipeline, evaluate_code, min_distance, Code, PipelineOptions};
use crate::error::{Error, Result};
use crate::info::{capacity, RenyiOrder};
use crate::io::{code_to_toml, read_channel, read_code, read_rep};
use crate::protocol::{audit_protocol, passive_cheat_best_reveal, ProtocolInstance};
use crate::quantum::Budget;
use crate::separators::{find_separators_with, verify_separators, SeparatorFamily, SeparatorOptions};
use crate::symmetric::symmetric_capacity;
use crate::{Channel, Dist};

/// Revision of the file formats, report layout and exit codes.
pub const INTERFACE_REVISION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Capacity,
    Symmetric,
    Separators,
    BuildCode,
    Audit,
    Simulate,
    ConverseCheck,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub channel: Option<PathBuf>,
    pub rep: Option<PathBuf>,
    pub code: Option<PathBuf>,
    /// Where `build-code` writes the code table.
    pub code_out: Option<PathBuf>,
    /// Input distribution for `build-code`; uniform when absent.
    pub input_dist: Option<Vec<f64>>,
    pub n: Option<usize>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub alpha: f64,
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub seed: u64,
    pub budget: Budget,
    pub trials: u64,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            channel: None,
            rep: None,
            code: None,
            code_out: None,
            input_dist: None,
            n: None,
            r1: None,
            r2: None,
            alpha: 2.0,
            eps1: None,
            eps2: None,
            seed: 0,
            budget: Budget::default(),
            trials: 10_000,
            format: OutputFormat::Json,
        }
    }

    /// Range checks on every numeric parameter.
    pub fn validate(&self) -> Result<()> {
        RenyiOrder::new(self.alpha)?;
        if let Some(e) = self.eps1 {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::validation(format!("eps1 = {e} must be positive")));
            }
        }
        if let Some(e) = self.eps2 {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::validation(format!("eps2 = {e} must lie in (0, 1)")));
            }
        }
        if let Some(n) = self.n {
            if !(1..=64).contains(&n) {
                return Err(Error::validation(format!("n = {n} must lie in [1, 64]")));
            }
        }
        for (name, r) in [("r1", self.r1), ("r2", self.r2)] {
            if let Some(r) = r {
                if !(r.is_finite() && (0.0..=64.0).contains(&r)) {
                    return Err(Error::validation(format!("{name} = {r} must lie in [0, 64]")));
                }
            }
        }
        if self.budget.max_dense_dim == 0 || self.budget.max_enumeration == 0 {
            return Err(Error::validation("budgets must be positive"));
        }
        if !(1..=1_000_000_000).contains(&self.trials) {
            return Err(Error::validation(format!("trials = {} must lie in [1, 10^9]", self.trials)));
        }
        if let Some(p) = &self.input_dist {
            Dist::new(p.clone())?;
        }
        let need = |o: &Option<PathBuf>, what: &str| {
            if o.is_none() {
                Err(Error::validation(format!("{what} file is required")))
            } else {
                Ok(())
            }
        };
        match self.command {
            Command::Symmetric => need(&self.rep, "rep")?,
            Command::Capacity | Command::Separators => need(&self.channel, "channel")?,
            Command::BuildCode => {
                need(&self.channel, "channel")?;
                for (name, v) in [("n", self.n.map(|x| x as f64)), ("r1", self.r1), ("r2", self.r2)] {
                    if v.is_none() {
                        return Err(Error::validation(format!("{name} is required")));
                    }
                }
            }
            Command::Audit | Command::Simulate | Command::ConverseCheck => {
                need(&self.channel, "channel")?;
                need(&self.code, "code")?;
            }
        }
        Ok(())
    }
}

/// Runs one subcommand and returns the formatted report.
pub fn run(cfg: &RunConfig) -> Result<String> {
    cfg.validate()?;
    let result = match cfg.command {
        Command::Capacity => run_capacity(cfg)?,
        Command::Symmetric => run_symmetric(cfg)?,
        Command::Separators => run_separators(cfg)?,
        Command::BuildCode => run_build_code(cfg)?,
        Command::Audit => run_audit(cfg)?,
        Command::Simulate => run_simulate(cfg)?,
        Command::ConverseCheck => run_converse(cfg)?,
    };
    let report = json!({
        "interface_revision": INTERFACE_REVISION,
        "config": to_value(cfg),
        "result": result,
    });
    Ok(match cfg.format {
        OutputFormat::Json => format_json(&report),
        OutputFormat::Csv => format_csv(&report),
    })
}

/// Machine-readable error line for stderr.
pub fn error_json(e: &Error) -> String {
    format_json(&json!({
        "error": e.kind(),
        "exit_code": e.exit_code(),
        "message": e.to_string(),
    }))
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn channel(cfg: &RunConfig) -> Result<Channel> {
    read_channel(cfg.channel.as_ref().expect("validated"))
}

fn run_capacity(cfg: &RunConfig) -> Result<Value> {
    let w = channel(cfg)?;
    let r = capacity(&w)?;
    if !r.certified {
        return Err(Error::NonConvergence {
            iterations: r.iterations,
            best_value: r.value,
            gap: r.certificate_gap,
        });
    }
    Ok(json!({
        "value_bits": r.value,
        "argmax_P": r.argmax.probs(),
        "labels": w.labels(),
        "certificate_gap": r.certificate_gap,
        "iterations": r.iterations,
    }))
}

fn run_symmetric(cfg: &RunConfig) -> Result<Value> {
    let (rep, rho) = read_rep(cfg.rep.as_ref().expect("validated"))?;
    let cap = symmetric_capacity(&rep, &rho)?;
    let g = rep.group();
    let names = |s: &[usize]| s.iter().map(|&x| g.name(x).to_string()).collect::<Vec<_>>();
    let coset_map: Vec<Value> = cap
        .induced
        .cosets
        .iter()
        .zip(cap.induced.channel.labels())
        .map(|(c, label)| json!({ "label": label, "elements": names(c) }))
        .collect();
    let components: Vec<Value> = cap
        .decomposition
        .components
        .iter()
        .map(|c| {
            json!({
                "label": c.label,
                "irrep_dim": c.irrep_dim,
                "multiplicity": c.multiplicity,
                "weight": c.weight,
            })
        })
        .collect();
    Ok(json!({
        "stabilizer": names(&cap.stabilizer),
        "coset_map": coset_map,
        "components": components,
        "capacity_bits": cap.value,
        "direct_bits": cap.direct,
        "cross_check_gap": cap.cross_check_gap(),
    }))
}

fn dump(m: &crate::quantum::CMatrix<f64>) -> Value {
    to_value(
        &(0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    )
}

fn run_separators(cfg: &RunConfig) -> Result<Value> {
    let w = channel(cfg)?;
    let (fam, solves) = find_separators_with(&w, &SeparatorOptions::default())?;
    let (e1, e2) = (cfg.eps1.unwrap_or(fam.epsilon1), cfg.eps2.unwrap_or(fam.epsilon2));
    let fam = fam.with_epsilons(e1, e2)?;
    let check = verify_separators(&w, &fam)?;
    let xis: Vec<Value> = w
        .labels()
        .iter()
        .zip(&fam.xis)
        .zip(&solves)
        .map(|((l, x), s)| json!({ "label": l, "matrix": dump(x.matrix()), "solve": to_value(s) }))
        .collect();
    Ok(json!({
        "xis": xis,
        "zeta1": fam.zeta1,
        "zeta2": fam.zeta2,
        "epsilon1": fam.epsilon1,
        "epsilon2": fam.epsilon2,
        "lemma_margin": fam.lemma_margin(),
        "check": to_value(&check),
    }))
}

/// Separators with `ε₂ = 1/(2n)` and `ε₁ = ζ₁ε₂/4` unless overridden.
fn family_for(w: &Channel, n: usize, cfg: &RunConfig) -> Result<SeparatorFamily> {
    let fam = find_separators_with(w, &SeparatorOptions::default())?.0;
    let e2 = cfg.eps2.unwrap_or(1.0 / (2.0 * n as f64));
    let e1 = cfg.eps1.unwrap_or(fam.zeta1 * e2 / 4.0);
    fam.with_epsilons(e1, e2)
}

fn code_value(code: &Code, w: &Channel) -> Value {
    json!({
        "n": code.n,
        "messages": code.messages,
        "randomness": code.randomness,
        "rows": code.rows.iter().map(|r| r.iter().map(|&x| w.label(x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

fn run_build_code(cfg: &RunConfig) -> Result<Value> {
    let w = channel(cfg)?;
    let p = match &cfg.input_dist {
        Some(v) => Dist::new(v.clone())?,
        None => Dist::uniform(w.len())?,
    };
    let opts = PipelineOptions {
        alpha: RenyiOrder::new(cfg.alpha)?,
        epsilon1: cfg.eps1,
        epsilon2: cfg.eps2,
        budget: cfg.budget,
        ..PipelineOptions::default()
    };
    let out = build_pipeline(
        &w,
        &p,
        cfg.n.expect("validated"),
        cfg.r1.expect("validated"),
        cfg.r2.expect("validated"),
        cfg.seed,
        &opts,
    )?;
    if let Some(path) = &cfg.code_out {
        std::fs::write(path, code_to_toml(&out.code, &w)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(json!({
        "report": to_value(&out.report),
        "code": code_value(&out.code, &w),
    }))
}

fn load_instance(cfg: &RunConfig) -> Result<(Channel, Code, SeparatorFamily)> {
    let w = channel(cfg)?;
    let code = read_code(cfg.code.as_ref().expect("validated"), &w)?;
    let fam = family_for(&w, code.n, cfg)?;
    Ok((w, code, fam))
}

fn run_audit(cfg: &RunConfig) -> Result<Value> {
    let (w, code, fam) = load_instance(cfg)?;
    let (ev, _) = evaluate_code(&w, &fam, &code, RenyiOrder::new(cfg.alpha)?, &cfg.budget)?;
    let min_d = min_distance(&code.rows);
    Ok(json!({
        "n": code.n,
        "messages": code.messages,
        "randomness": code.randomness,
        "epsilon1": fam.epsilon1,
        "epsilon2": fam.epsilon2,
        "zeta1": fam.zeta1,
        "zeta2": fam.zeta2,
        "eps_a": ev.eps_a.max,
        "eps_a_average": ev.eps_a.average,
        "delta_b": ev.delta_b,
        "delta_b_half": ev.delta_b_half,
        "delta_c": ev.delta_c,
        "e_alpha": ev.e_alpha,
        "bounds": to_value(&ev.bounds),
        "min_distance": min_d,
        "mufv": min_d.is_none_or(|d| d as f64 > code.n as f64 * fam.epsilon2),
    }))
}

fn bernoulli_count(rng: &mut ChaCha8Rng, p: f64, trials: u64) -> u64 {
    (0..trials).filter(|_| rng.random_bool(p.clamp(0.0, 1.0))).count() as u64
}

fn run_simulate(cfg: &RunConfig) -> Result<Value> {
    let (w, code, fam) = load_instance(cfg)?;
    let inst = ProtocolInstance::new(w, &fam, code)?;
    let report = audit_protocol(&inst, &cfg.budget)?;
    let mut runs = Vec::new();
    for r in 0..inst.code.rows.len() {
        let (m, l) = inst.reveal_of(r);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(r as u64);
        let honest = inst.verifier.accept_prob(&inst.code.rows[r], r);
        let (reveal, cheat) = passive_cheat_best_reveal(&inst, m, l)?;
        runs.push(json!({
            "m": m,
            "l": l,
            "honest_exact": honest,
            "honest_accepted": bernoulli_count(&mut rng, honest, cfg.trials),
            "passive_reveal": to_value(&reveal),
            "passive_exact": cheat,
            "passive_accepted": bernoulli_count(&mut rng, cheat, cfg.trials),
        }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(u64::MAX);
    let ac = &report.active_cheat;
    let [a, b] = ac.reveals;
    let pa = inst.verifier.accept_prob(&ac.word, a.m * inst.code.randomness + a.l);
    let pb = inst.verifier.accept_prob(&ac.word, b.m * inst.code.randomness + b.l);
    Ok(json!({
        "trials": cfg.trials,
        "runs": runs,
        "active": {
            "word": ac.word.iter().map(|&x| inst.channel.label(x)).collect::<Vec<_>>(),
            "reveals": to_value(&ac.reveals),
            "exact": [pa, pb],
            "accepted": [bernoulli_count(&mut rng, pa, cfg.trials), bernoulli_count(&mut rng, pb, cfg.trials)],
        },
        "protocol": to_value(&report),
    }))
}

fn run_converse(cfg: &RunConfig) -> Result<Value> {
    let (w, code, fam) = load_instance(cfg)?;
    let inst = ProtocolInstance::new(w, &fam, code)?;
    let report = audit_protocol(&inst, &cfg.budget)?;
    Ok(json!({
        "eps_a": report.eps_a,
        "delta_a": report.delta_a,
        "converse": to_value(&report.converse),
    }))
}

/// JSON with every float printed to 17 significant digits.
pub fn format_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_number(out: &mut String, n: &serde_json::Number) {
    if let Some(u) = n.as_u64() {
        write!(out, "{u}").unwrap();
    } else if let Some(i) = n.as_i64() {
        write!(out, "{i}").unwrap();
    } else {
        let f = n.as_f64().expect("finite float");
        write!(out, "{f:.16e}").unwrap();
    }
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.push_str(&"  ".repeat(d));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => write!(out, "{b}").unwrap(),
        Value::Number(n) => write_number(out, n),
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string")),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, x, depth + 1);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(o) if o.is_empty() => out.push_str("{}"),
        Value::Object(o) => {
            out.push_str("{\n");
            for (i, (k, x)) in o.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&serde_json::to_string(k).expect("key"));
                out.push_str(": ");
                write_value(out, x, depth + 1);
                out.push_str(if i + 1 < o.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

/// Flattened `key,value` table.
pub fn format_csv(v: &Value) -> String {
    let mut out = String::from("key,value\n");
    flatten(&mut out, "", v);
    out
}

fn flatten(out: &mut String, prefix: &str, v: &Value) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(out, &join(&i.to_string()), x);
            }
        }
        Value::Object(o) => {
            for (k, x) in o {
                flatten(out, &join(k), x);
            }
        }
        leaf => {
            let mut s = String::new();
            match leaf {
                Value::String(text) => s.push_str(text),
                _ => write_value(&mut s, leaf, 0),
            }
            if s.contains([',', '"', '\n']) {
                s = format!("\"{}\"", s.replace('"', "\"\""));
            }
            writeln!(out, "{},{}", prefix, s).unwrap();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        let s = format_json(&json!({ "a": 0.1, "b": 3, "c": f64::INFINITY, "d": [] }));
        assert!(s.contains("\"a\": 1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"b\": 3"));
        assert!(s.contains("\"c\": null"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"].as_f64(), Some(0.1));
    }

    #[test]
    fn csv_flattens() {
        let s = format_csv(&json!({ "x": { "y": [1, 2] }, "z": "a,b" }));
        assert!(s.contains("x.y.1,2\n"));
        assert!(s.contains("z,\"a,b\"\n"), "{s}");
        assert!(format_csv(&json!({ "q": "say \"hi\"" })).contains("q,\"say \"\"hi\"\"\"\n"));
    }

    #[test]
    fn missing_inputs_rejected() {
        let cfg = RunConfig::new(Command::BuildCode);
        assert!(matches!(run(&cfg), Err(Error::Validation(_))));
        let mut cfg = RunConfig::new(Command::Capacity);
        cfg.alpha = 2.5;
        assert!(matches!(run(&cfg), Err(Error::Validation(_))));
    }
}
