//! Problem-file schema and assembly into operators. Files are JSON with
//! explicit {re, im} complex pairs; function kinds are tags, not
//! expressions, so parsing stays unambiguous.

use std::path::Path;

use serde::Deserialize;

use nepkit_core::bifurcation::ParametricNep;
use nepkit_core::linalg::{CMatrix, C64};
use nepkit_core::operator::{NepOperator, ScalarFunction, Term};

use crate::CliError;

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexEntry {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FunctionSpec {
    Monomial { power: u32 },
    Rational { pole: ComplexEntry },
    Exp,
    Log,
    Sin,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub function: FunctionSpec,
    pub matrix: Vec<Vec<ComplexEntry>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterSpec {
    pub name: String,
    /// "base" or "term:i" with i a term index.
    pub affects: String,
    /// "shift-identity" adds μI to the target; "scale" multiplies it by μ.
    pub mode: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dimension: usize,
    pub base: Vec<Vec<ComplexEntry>>,
    pub terms: Vec<TermSpec>,
    #[serde(default)]
    pub parameter: Option<ParameterSpec>,
}

pub enum ParsedProblem {
    Fixed(NepOperator),
    Parametric(ParametricNep),
}

fn matrix_of(rows: &[Vec<ComplexEntry>], n: usize, what: &str) -> Result<CMatrix, CliError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Usage(format!(
            "{what} must be {n}x{n} to match the declared dimension"
        )));
    }
    let mut m = CMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            if !e.re.is_finite() || !e.im.is_finite() {
                return Err(CliError::Usage(format!("{what} entry ({i},{j}) is not finite")));
            }
            m[(i, j)] = C64::new(e.re, e.im);
        }
    }
    Ok(m)
}

fn function_of(spec: &FunctionSpec) -> ScalarFunction {
    match spec {
        FunctionSpec::Monomial { power } => ScalarFunction::Monomial { power: *power },
        FunctionSpec::Rational { pole } => {
            ScalarFunction::RationalPole { pole: C64::new(pole.re, pole.im) }
        }
        FunctionSpec::Exp => ScalarFunction::Exponential,
        FunctionSpec::Log => ScalarFunction::Logarithmic,
        FunctionSpec::Sin => ScalarFunction::Sinusoidal,
    }
}

/// Target of the parameter transform, validated against the term count.
enum Affects {
    Base,
    Term(usize),
}

fn parse_affects(p: &ParameterSpec, n_terms: usize) -> Result<Affects, CliError> {
    if p.affects == "base" {
        return Ok(Affects::Base);
    }
    if let Some(idx) = p.affects.strip_prefix("term:") {
        let i: usize = idx
            .parse()
            .map_err(|_| CliError::Usage(format!("bad parameter target {:?}", p.affects)))?;
        if i >= n_terms {
            return Err(CliError::Usage(format!(
                "parameter targets term {i} but the problem has {n_terms} terms"
            )));
        }
        return Ok(Affects::Term(i));
    }
    Err(CliError::Usage(format!(
        "parameter \"affects\" must be \"base\" or \"term:i\", got {:?}",
        p.affects
    )))
}

fn transformed(m: &CMatrix, mode: &str, mu: f64) -> CMatrix {
    match mode {
        "shift-identity" => m.add(&CMatrix::identity(m.rows()).scale(C64::new(mu, 0.0))),
        "scale" => m.scale(C64::new(mu, 0.0)),
        _ => unreachable!("mode validated at parse time"),
    }
}

fn assemble(file: &ProblemFile, mu: Option<f64>) -> Result<NepOperator, CliError> {
    let n = file.dimension;
    let mut base = matrix_of(&file.base, n, "base")?;
    let mut coeffs = Vec::with_capacity(file.terms.len());
    for (i, t) in file.terms.iter().enumerate() {
        coeffs.push(matrix_of(&t.matrix, n, &format!("term {i} matrix"))?);
    }
    if let (Some(p), Some(mu)) = (&file.parameter, mu) {
        match parse_affects(p, file.terms.len())? {
            Affects::Base => base = transformed(&base, &p.mode, mu),
            Affects::Term(i) => coeffs[i] = transformed(&coeffs[i], &p.mode, mu),
        }
    }
    let terms = file
        .terms
        .iter()
        .zip(coeffs)
        .map(|(t, coeff)| Term { coeff, func: function_of(&t.function) })
        .collect();
    NepOperator::new(base, terms).map_err(|e| CliError::Usage(format!("invalid operator: {e}")))
}

pub fn parse_problem(path: &Path) -> Result<ParsedProblem, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let file: ProblemFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    if file.dimension == 0 {
        return Err(CliError::Usage("dimension must be positive".into()));
    }
    match &file.parameter {
        None => Ok(ParsedProblem::Fixed(assemble(&file, None)?)),
        Some(p) => {
            if p.name.is_empty() {
                return Err(CliError::Usage("parameter name must not be empty".into()));
            }
            if p.mode != "shift-identity" && p.mode != "scale" {
                return Err(CliError::Usage(format!(
                    "parameter mode must be \"shift-identity\" or \"scale\", got {:?}",
                    p.mode
                )));
            }
            parse_affects(p, file.terms.len())?;
            if file.terms.is_empty() {
                return Err(CliError::Usage(
                    "parametric problems need at least one term".into(),
                ));
            }
            // Probe once so assembly errors surface as parse errors.
            assemble(&file, Some(0.0))?;
            let dim = file.dimension;
            let fam = ParametricNep::new(dim, move |mu| {
                assemble(&file, Some(mu)).expect("assembly validated at parse time")
            });
            Ok(ParsedProblem::Parametric(fam))
        }
    }
}
