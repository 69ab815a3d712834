//! Text formats: generator job files, density-matrix state files and bench
//! grid files. Strict line-oriented parsing with positional error messages.

use super::{JobSpec, PipelineError};
use crate::circuit::RunMode;
use crate::generator::GeneratorSpec;
use crate::qmatrix::{CMat, DensityMatrix, C64};

fn err(line: usize, message: impl Into<String>) -> PipelineError {
    PipelineError::Parse {
        line,
        message: message.into(),
    }
}

/// Lines with comments stripped, paired with their 1-based line numbers.
fn logical_lines(text: &str) -> Vec<(usize, String)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let no_comment = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            };
            let trimmed = no_comment.trim();
            if trimmed.is_empty() {
                None
            } else {
                Some((i + 1, trimmed.to_string()))
            }
        })
        .collect()
}

fn parse_complex(tok: &str, line: usize) -> Result<C64, PipelineError> {
    let (re, im) = tok.split_once(',').ok_or_else(|| {
        err(
            line,
            format!("expected a complex entry `re,im`, got `{tok}`"),
        )
    })?;
    let re: f64 = re
        .trim()
        .parse()
        .map_err(|_| err(line, format!("bad real part `{re}`")))?;
    let im: f64 = im
        .trim()
        .parse()
        .map_err(|_| err(line, format!("bad imaginary part `{im}`")))?;
    Ok(C64::new(re, im))
}

fn parse_matrix_rows(
    lines: &[(usize, String)],
    start: usize,
    n: usize,
) -> Result<(CMat, usize), PipelineError> {
    let mut m = CMat::zeros(n);
    for r in 0..n {
        let (line_no, line) = lines.get(start + r).ok_or_else(|| {
            err(
                lines.last().map_or(0, |l| l.0),
                format!("missing row {} of a {n}x{n} matrix", r + 1),
            )
        })?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != n {
            return Err(err(
                *line_no,
                format!("expected {n} complex entries, got {}", toks.len()),
            ));
        }
        for (c, tok) in toks.iter().enumerate() {
            m.set(r, c, parse_complex(tok, *line_no)?);
        }
    }
    Ok((m, start + n))
}

struct RawSections {
    a: Option<CMat>,
    h: Option<CMat>,
    scalars: Vec<(usize, String, String)>,
}

fn parse_sections(text: &str) -> Result<RawSections, PipelineError> {
    let lines = logical_lines(text);
    let mut out = RawSections {
        a: None,
        h: None,
        scalars: Vec::new(),
    };
    let mut i = 0;
    while i < lines.len() {
        let (line_no, line) = &lines[i];
        if line.eq_ignore_ascii_case("a:") {
            if out.a.is_some() {
                return Err(err(*line_no, "duplicate section `A:`"));
            }
            let (m, next) = parse_matrix_rows(&lines, i + 1, 3)?;
            out.a = Some(m);
            i = next;
        } else if line.eq_ignore_ascii_case("h:") {
            if out.h.is_some() {
                return Err(err(*line_no, "duplicate section `H:`"));
            }
            let (m, next) = parse_matrix_rows(&lines, i + 1, 2)?;
            out.h = Some(m);
            i = next;
        } else if let Some((key, value)) = line.split_once(':') {
            let key = key.trim().to_ascii_lowercase();
            if out.scalars.iter().any(|(_, k, _)| *k == key) {
                return Err(err(*line_no, format!("duplicate key `{key}`")));
            }
            out.scalars.push((*line_no, key, value.trim().to_string()));
            i += 1;
        } else {
            return Err(err(*line_no, format!("unrecognised line `{line}`")));
        }
    }
    Ok(out)
}

fn scalar_f64(line: usize, key: &str, value: &str) -> Result<f64, PipelineError> {
    value
        .parse()
        .map_err(|_| err(line, format!("`{key}` expects a number, got `{value}`")))
}

/// Parses a generator job file: sections `A:` (3x3) and `H:` (2x2) with
/// `re,im` entries, scalars `t`, `eps` and optional `k`, `seed`, `mode`,
/// `trajectories`. Generator invariants are validated on load.
pub fn parse_jobspec(text: &str) -> Result<JobSpec, PipelineError> {
    let sections = parse_sections(text)?;
    let a = sections.a.ok_or_else(|| err(0, "missing section `A:`"))?;
    let h = sections.h.ok_or_else(|| err(0, "missing section `H:`"))?;
    let generator = GeneratorSpec::new(a, h)?;
    let mut job = JobSpec {
        generator,
        t: f64::NAN,
        eps: f64::NAN,
        mode: RunMode::Deterministic,
        trajectories: 10_000,
        seed: 0,
        k_override: None,
    };
    let (mut saw_t, mut saw_eps) = (false, false);
    for (line, key, value) in &sections.scalars {
        match key.as_str() {
            "t" => {
                job.t = scalar_f64(*line, key, value)?;
                saw_t = true;
            }
            "eps" => {
                job.eps = scalar_f64(*line, key, value)?;
                saw_eps = true;
            }
            "k" => {
                let k: u32 = value.parse().map_err(|_| {
                    err(
                        *line,
                        format!("`k` expects a positive integer, got `{value}`"),
                    )
                })?;
                if k < 1 {
                    return Err(err(*line, "`k` must be >= 1"));
                }
                job.k_override = Some(k);
            }
            "seed" => {
                job.seed = value
                    .parse()
                    .map_err(|_| err(*line, format!("`seed` expects an integer, got `{value}`")))?;
            }
            "trajectories" => {
                job.trajectories = value.parse().map_err(|_| {
                    err(
                        *line,
                        format!("`trajectories` expects an integer, got `{value}`"),
                    )
                })?;
            }
            "mode" => {
                job.mode = match value.to_ascii_lowercase().as_str() {
                    "deterministic" => RunMode::Deterministic,
                    "sampled" => RunMode::Sampled,
                    other => {
                        return Err(err(
                            *line,
                            format!("`mode` must be deterministic or sampled, got `{other}`"),
                        ))
                    }
                };
            }
            other => return Err(err(*line, format!("unknown key `{other}`"))),
        }
    }
    if !saw_t {
        return Err(err(0, "missing scalar `t`"));
    }
    if !saw_eps {
        return Err(err(0, "missing scalar `eps`"));
    }
    job.validate()?;
    Ok(job)
}

fn fmt_c(z: C64) -> String {
    format!("{:.16e},{:.16e}", z.re, z.im)
}

/// Serialises a job back to the file format parsed by [`parse_jobspec`].
pub fn write_jobspec(job: &JobSpec) -> String {
    let mut out = String::from("A:\n");
    let a = job.generator.gks();
    for i in 0..3 {
        let row: Vec<String> = (0..3).map(|j| fmt_c(a.at(i, j))).collect();
        out.push_str(&row.join("  "));
        out.push('\n');
    }
    out.push_str("H:\n");
    let h = job.generator.hamiltonian();
    for i in 0..2 {
        let row: Vec<String> = (0..2).map(|j| fmt_c(h.at(i, j))).collect();
        out.push_str(&row.join("  "));
        out.push('\n');
    }
    out.push_str(&format!("t: {:.16e}\n", job.t));
    out.push_str(&format!("eps: {:.16e}\n", job.eps));
    if let Some(k) = job.k_override {
        out.push_str(&format!("k: {k}\n"));
    }
    out.push_str(&format!("seed: {}\n", job.seed));
    out.push_str(&format!(
        "mode: {}\n",
        match job.mode {
            RunMode::Deterministic => "deterministic",
            RunMode::Sampled => "sampled",
        }
    ));
    out.push_str(&format!("trajectories: {}\n", job.trajectories));
    out
}

/// Parses a 2x2 density-matrix state file (two rows of two `re,im` entries,
/// optionally preceded by a `rho:` header).
pub fn parse_state(text: &str) -> Result<DensityMatrix, PipelineError> {
    let mut lines = logical_lines(text);
    if let Some((_, first)) = lines.first() {
        if first.eq_ignore_ascii_case("rho:") {
            lines.remove(0);
        }
    }
    let (m, used) = parse_matrix_rows(&lines, 0, 2)?;
    if used < lines.len() {
        return Err(err(lines[used].0, "trailing content after the 2x2 state"));
    }
    DensityMatrix::new(m).map_err(PipelineError::from)
}

/// Serialises a density matrix in the state-file format.
pub fn write_state(rho: &DensityMatrix) -> String {
    let mut out = String::new();
    for i in 0..2 {
        let row: Vec<String> = (0..2).map(|j| fmt_c(rho.mat().at(i, j))).collect();
        out.push_str(&row.join("  "));
        out.push('\n');
    }
    out
}

/// A bench grid: one generator plus the Cartesian product of `ts` and `epss`.
#[derive(Clone, Debug)]
pub struct BenchGrid {
    pub generator: GeneratorSpec,
    pub ts: Vec<f64>,
    pub epss: Vec<f64>,
    pub k_override: Option<u32>,
}

/// Parses a bench grid file: sections `A:`, `H:` plus `ts:` and `epss:` lists
/// of numbers and an optional fixed `k`.
pub fn parse_grid(text: &str) -> Result<BenchGrid, PipelineError> {
    let sections = parse_sections(text)?;
    let a = sections.a.ok_or_else(|| err(0, "missing section `A:`"))?;
    let h = sections.h.ok_or_else(|| err(0, "missing section `H:`"))?;
    let generator = GeneratorSpec::new(a, h)?;
    let mut ts = Vec::new();
    let mut epss = Vec::new();
    let mut k_override = None;
    for (line, key, value) in &sections.scalars {
        match key.as_str() {
            "ts" => {
                ts = value
                    .split_whitespace()
                    .map(|tok| scalar_f64(*line, "ts", tok))
                    .collect::<Result<_, _>>()?;
            }
            "epss" => {
                epss = value
                    .split_whitespace()
                    .map(|tok| scalar_f64(*line, "epss", tok))
                    .collect::<Result<_, _>>()?;
            }
            "k" => {
                k_override = Some(value.parse().map_err(|_| {
                    err(
                        *line,
                        format!("`k` expects a positive integer, got `{value}`"),
                    )
                })?);
            }
            other => return Err(err(*line, format!("unknown key `{other}`"))),
        }
    }
    if ts.is_empty() {
        return Err(err(0, "missing or empty `ts:` list"));
    }
    if epss.is_empty() {
        return Err(err(0, "missing or empty `epss:` list"));
    }
    Ok(BenchGrid {
        generator,
        ts,
        epss,
        k_override,
    })
}
