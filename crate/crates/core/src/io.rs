//! TOML files for channels, codes and symmetric-channel specifications.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::codes::Code;
use crate::error::{Error, Result};
use crate::quantum::{CMatrix, DENSITY_TOL, HERMITIAN_TOL};
use crate::scalar::C;
use crate::symmetric::ProjectiveRep;
use crate::{Channel, Density};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelFile {
    dim: usize,
    letters: Vec<LetterEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LetterEntry {
    label: String,
    /// Rows of `[re, im]` pairs.
    matrix: Vec<Vec<Vec<f64>>>,
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn parse_toml<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::validation(format!("{what}: {e}")))
}

fn parse_matrix(rows: &[Vec<Vec<f64>>], dim: usize, name: &str) -> Result<CMatrix<f64>> {
    if rows.len() != dim {
        return Err(Error::validation(format!("{name}: {} rows, expected {dim}", rows.len())));
    }
    let mut m = CMatrix::<f64>::zeros(dim, dim);
    for (r, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::validation(format!(
                "{name}: row {r} has {} entries, expected {dim}",
                row.len()
            )));
        }
        for (c, e) in row.iter().enumerate() {
            if e.len() != 2 || !e.iter().all(|v| v.is_finite()) {
                return Err(Error::validation(format!(
                    "{name}: row {r} column {c} must be a finite [re, im] pair"
                )));
            }
            m[(r, c)] = C::new(e[0], e[1]);
        }
    }
    Ok(m)
}

fn parse_density(rows: &[Vec<Vec<f64>>], dim: usize, name: &str) -> Result<Density> {
    let m = parse_matrix(rows, dim, name)?;
    for r in 0..dim {
        for c in 0..dim {
            if (m[(r, c)] - m[(c, r)].conj()).norm() > HERMITIAN_TOL {
                return Err(Error::validation(format!(
                    "{name}: entries ({r},{c}) and ({c},{r}) are not conjugate"
                )));
            }
        }
    }
    let tr: f64 = (0..dim).map(|i| m[(i, i)].re).sum();
    if (tr - 1.0).abs() > DENSITY_TOL {
        return Err(Error::validation(format!("{name}: trace {tr} is not 1")));
    }
    Density::new(m).map_err(|e| Error::validation(format!("{name}: {e}")))
}

fn dump_matrix(m: &CMatrix<f64>) -> Vec<Vec<Vec<f64>>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| vec![m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

pub fn parse_channel(text: &str) -> Result<Channel> {
    let f: ChannelFile = parse_toml(text, "channel file")?;
    if f.dim == 0 {
        return Err(Error::validation("channel file: dim must be positive"));
    }
    let states = f
        .letters
        .iter()
        .map(|l| parse_density(&l.matrix, f.dim, &format!("letter '{}'", l.label)))
        .collect::<Result<Vec<_>>>()?;
    Channel::new(f.letters.into_iter().map(|l| l.label).collect(), states)
}

pub fn read_channel(path: &Path) -> Result<Channel> {
    parse_channel(&read_text(path)?)
}

pub fn channel_to_toml(w: &Channel) -> String {
    let f = ChannelFile {
        dim: w.dim(),
        letters: w
            .labels()
            .iter()
            .zip(w.states())
            .map(|(l, s)| LetterEntry {
                label: l.clone(),
                matrix: dump_matrix(s.matrix()),
            })
            .collect(),
    };
    toml::to_string(&f).expect("channel serializes")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeFile {
    n: usize,
    messages: usize,
    randomness: usize,
    alphabet: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// Reads a code whose letters are labels of `w`.
pub fn parse_code(text: &str, w: &Channel) -> Result<Code> {
    let f: CodeFile = parse_toml(text, "code file")?;
    if f.alphabet != w.labels() {
        return Err(Error::validation(format!(
            "code alphabet {:?} does not match channel labels {:?}",
            f.alphabet,
            w.labels()
        )));
    }
    let rows = f
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .enumerate()
                .map(|(j, s)| {
                    w.index_of(s)
                        .ok_or_else(|| Error::validation(format!("code row {i} position {j}: unknown letter '{s}'")))
                })
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Code::new(f.n, w.len(), f.messages, f.randomness, rows)
}

pub fn read_code(path: &Path, w: &Channel) -> Result<Code> {
    parse_code(&read_text(path)?, w)
}

pub fn code_to_toml(code: &Code, w: &Channel) -> String {
    let f = CodeFile {
        n: code.n,
        messages: code.messages,
        randomness: code.randomness,
        alphabet: w.labels().to_vec(),
        rows: code
            .rows
            .iter()
            .map(|r| r.iter().map(|&x| w.label(x).to_string()).collect())
            .collect(),
    };
    toml::to_string(&f).expect("code serializes")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RepFile {
    /// `"Z_d"` or `"Z_d^2"`.
    group: String,
    d: usize,
    #[serde(default = "one")]
    multiplicity: usize,
    /// `"clock"` or `"scalar"` for `Z_d`.
    #[serde(default)]
    action: Option<String>,
    #[serde(default)]
    amplitudes: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    rho: Option<Vec<Vec<Vec<f64>>>>,
}

fn one() -> usize {
    1
}

/// Representation and input state of a symmetric channel.
pub fn parse_rep(text: &str) -> Result<(ProjectiveRep<f64>, Density)> {
    let f: RepFile = parse_toml(text, "rep file")?;
    let rep = match (f.group.as_str(), f.action.as_deref()) {
        ("Z_d", None | Some("clock")) => ProjectiveRep::clock(f.d, f.multiplicity)?,
        ("Z_d", Some("scalar")) => ProjectiveRep::scalar(f.d, f.multiplicity)?,
        ("Z_d^2", None | Some("weyl-heisenberg")) => ProjectiveRep::weyl_heisenberg(f.d, f.multiplicity)?,
        (g, a) => {
            return Err(Error::validation(format!(
                "rep file: unsupported group/action {g}/{}",
                a.unwrap_or("default")
            )))
        }
    };
    let dim = rep.dim();
    let rho = match (&f.amplitudes, &f.rho) {
        (Some(a), None) => {
            if a.len() != dim {
                return Err(Error::validation(format!("rep file: {} amplitudes, expected {dim}", a.len())));
            }
            let amps = a
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    if e.len() == 2 && e.iter().all(|v| v.is_finite()) {
                        Ok(C::new(e[0], e[1]))
                    } else {
                        Err(Error::validation(format!("rep file: amplitude {i} must be a finite [re, im] pair")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Density::pure(&amps)?
        }
        (None, Some(r)) => parse_density(r, dim, "rho")?,
        _ => return Err(Error::validation("rep file: give exactly one of `amplitudes` or `rho`")),
    };
    Ok((rep, rho))
}

pub fn read_rep(path: &Path) -> Result<(ProjectiveRep<f64>, Density)> {
    parse_rep(&read_text(path)?)
}
