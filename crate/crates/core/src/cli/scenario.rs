//! Scenario files: JSON with a `schema` key, complex numbers as `[re, im]`.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::block::NormalizingQuantity;
use crate::block_prescribe::{BlockPrescription, BlockRitz};
use crate::linalg::{CMat, C64};
use crate::prescribe::{Basis, FullPrescription, ScalarPrescription};

use super::{mtx, CliError};

pub const SCHEMA: u32 = 1;

/// A real or complex number; complex values are written as `[re, im]`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Num {
    Re(f64),
    Cx([f64; 2]),
}

impl Num {
    pub fn value(self) -> C64 {
        match self {
            Num::Re(x) => C64::new(x, 0.0),
            Num::Cx([re, im]) => C64::new(re, im),
        }
    }

    pub fn from_c64(z: C64) -> Self {
        if z.im == 0.0 {
            Num::Re(z.re)
        } else {
            Num::Cx([z.re, z.im])
        }
    }
}

/// Dense matrix as a list of rows.
pub type Rows = Vec<Vec<Num>>;

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Gmres,
    RestartedGmres,
    BlockGmres,
    RestartedBlockGmres,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BasisSpec {
    Standard,
    RandomUnitary {
        seed: u64,
    },
    /// Matrix Market file, relative to the scenario file.
    Explicit {
        path: PathBuf,
    },
}

/// Block Ritz data for one step: either the solvents or the coefficient
/// blocks `C_0..C_{j-1}` of the matrix polynomial.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BlockRitzSpec {
    Solvents(Vec<Rows>),
    Coefficients(Vec<Rows>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GmresSpec {
    pub schema: u32,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub residuals: Vec<f64>,
    /// Ritz values for steps `1..n`.
    pub ritz: Vec<Vec<Num>>,
    pub eigenvalues: Vec<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RestartedSpec {
    pub schema: u32,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub m: usize,
    pub cycles: usize,
    /// Per cycle, the values at steps `0..m`.
    pub residuals: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminal: Option<f64>,
    /// Per cycle, the Ritz values of steps `1..=m`.
    pub ritz: Vec<Vec<Vec<Num>>>,
    /// Per cycle, `m + 1` values for the extended Hessenberg.
    pub spectra: Vec<Vec<Num>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<Vec<Num>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    pub schema: u32,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub p: usize,
    pub m: usize,
    #[serde(default = "one")]
    pub cycles: usize,
    /// Per cycle, the upper triangular `p x p` values at steps `0..m`.
    pub residuals: Vec<Vec<Rows>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminal: Option<Rows>,
    pub ritz: Vec<Vec<BlockRitzSpec>>,
    pub spectra: Vec<BlockRitzSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scenario {
    Gmres(GmresSpec),
    Restarted(RestartedSpec),
    Block(BlockSpec),
}

/// A scenario turned into library inputs.
#[derive(Clone, Debug)]
pub enum Prescription {
    Full(FullPrescription),
    Scalar(ScalarPrescription),
    Block(BlockPrescription),
}

fn typed<T: DeserializeOwned>(value: serde_json::Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value)
        .map_err(|e| CliError::Parse(format!("key `{}`: {}", e.path(), e.inner())))
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| {
            CliError::Parse(format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        let schema = value
            .get("schema")
            .ok_or_else(|| CliError::Parse("missing key `schema`".into()))?;
        if schema.as_u64() != Some(SCHEMA as u64) {
            return Err(CliError::Parse(format!(
                "key `schema`: unsupported version {schema}, expected {SCHEMA}"
            )));
        }
        let kind: Kind = typed(
            value
                .get("kind")
                .cloned()
                .ok_or_else(|| CliError::Parse("missing key `kind`".into()))?,
        )
        .map_err(|e| CliError::Parse(format!("key `kind`: {e}")))?;
        let sc = match kind {
            Kind::Gmres => Scenario::Gmres(typed(value)?),
            Kind::RestartedGmres => Scenario::Restarted(typed(value)?),
            Kind::BlockGmres | Kind::RestartedBlockGmres => Scenario::Block(typed(value)?),
        };
        // JSON has no literal for non-finite numbers and serde_json rejects
        // overflowing ones, so every parsed number is finite
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = match self {
            Scenario::Gmres(s) => serde_json::to_string_pretty(s),
            Scenario::Restarted(s) => serde_json::to_string_pretty(s),
            Scenario::Block(s) => serde_json::to_string_pretty(s),
        }
        .expect("scenario serializes");
        s.push('\n');
        s
    }

    pub fn kind(&self) -> Kind {
        match self {
            Scenario::Gmres(s) => s.kind,
            Scenario::Restarted(s) => s.kind,
            Scenario::Block(s) => s.kind,
        }
    }

    pub fn tolerance(&self) -> Option<f64> {
        match self {
            Scenario::Gmres(s) => s.tolerance,
            Scenario::Restarted(s) => s.tolerance,
            Scenario::Block(s) => s.tolerance,
        }
    }

    /// Library inputs; `base` resolves explicit basis paths.
    pub fn prescription(&self, base: &Path) -> Result<Prescription, CliError> {
        match self {
            Scenario::Gmres(s) => {
                let n = s.residuals.len();
                expect_len("n", s.n.unwrap_or(n), n)?;
                expect_len("ritz", s.ritz.len(), n.saturating_sub(1))?;
                expect_len("eigenvalues", s.eigenvalues.len(), n)?;
                Ok(Prescription::Full(FullPrescription {
                    residuals: s.residuals.clone(),
                    ritz: s.ritz.iter().map(|set| values(set)).collect(),
                    eigenvalues: values(&s.eigenvalues),
                    basis: basis(s.basis.as_ref(), base)?,
                }))
            }
            Scenario::Restarted(s) => {
                let (m, cycles) = (s.m, s.cycles);
                if m == 0 || cycles == 0 {
                    return Err(CliError::Parse(
                        "keys `m` and `cycles` must be positive".into(),
                    ));
                }
                expect_len("n", s.n.unwrap_or(m * cycles), m * cycles)?;
                expect_len("residuals", s.residuals.len(), cycles)?;
                expect_len("ritz", s.ritz.len(), cycles)?;
                expect_len("spectra", s.spectra.len(), cycles)?;
                for k in 0..cycles {
                    expect_len(&format!("residuals[{k}]"), s.residuals[k].len(), m)?;
                    expect_len(&format!("ritz[{k}]"), s.ritz[k].len(), m)?;
                    expect_len(&format!("spectra[{k}]"), s.spectra[k].len(), m + 1)?;
                }
                if let Some(t) = &s.tail {
                    expect_len("tail", t.len(), m * cycles)?;
                }
                Ok(Prescription::Scalar(ScalarPrescription {
                    m,
                    cycles,
                    residuals: s.residuals.clone(),
                    terminal: s.terminal,
                    ritz: s
                        .ritz
                        .iter()
                        .map(|c| c.iter().map(|set| values(set)).collect())
                        .collect(),
                    spectra: s.spectra.iter().map(|set| values(set)).collect(),
                    basis: basis(s.basis.as_ref(), base)?,
                    tail: s.tail.as_ref().map(|t| values(t)),
                }))
            }
            Scenario::Block(s) => {
                let (p, m, cycles) = (s.p, s.m, s.cycles);
                if p == 0 || m == 0 || cycles == 0 {
                    return Err(CliError::Parse(
                        "keys `p`, `m` and `cycles` must be positive".into(),
                    ));
                }
                if s.kind == Kind::BlockGmres && cycles != 1 {
                    return Err(CliError::Parse(
                        "key `cycles`: block_gmres has a single cycle".into(),
                    ));
                }
                let n = p * m * cycles;
                expect_len("n", s.n.unwrap_or(n), n)?;
                expect_len("residuals", s.residuals.len(), cycles)?;
                expect_len("ritz", s.ritz.len(), cycles)?;
                expect_len("spectra", s.spectra.len(), cycles)?;
                let mut residuals = Vec::with_capacity(cycles);
                for (k, cyc) in s.residuals.iter().enumerate() {
                    expect_len(&format!("residuals[{k}]"), cyc.len(), m)?;
                    let mut out = Vec::with_capacity(m);
                    for (j, r) in cyc.iter().enumerate() {
                        out.push(quantity(&format!("residuals[{k}][{j}]"), r, p)?);
                    }
                    residuals.push(out);
                }
                let terminal = s
                    .terminal
                    .as_ref()
                    .map(|t| quantity("terminal", t, p))
                    .transpose()?;
                let mut ritz = Vec::with_capacity(cycles);
                for (k, cyc) in s.ritz.iter().enumerate() {
                    expect_len(&format!("ritz[{k}]"), cyc.len(), m)?;
                    let mut out = Vec::with_capacity(m);
                    for (j, r) in cyc.iter().enumerate() {
                        out.push(block_ritz(&format!("ritz[{k}][{j}]"), r, p, j + 1)?);
                    }
                    ritz.push(out);
                }
                let mut spectra = Vec::with_capacity(cycles);
                for (k, r) in s.spectra.iter().enumerate() {
                    spectra.push(block_ritz(&format!("spectra[{k}]"), r, p, m + 1)?);
                }
                let tail = s
                    .tail
                    .as_ref()
                    .map(|t| matrix("tail", t, Some((n, p))))
                    .transpose()?;
                Ok(Prescription::Block(BlockPrescription {
                    p,
                    m,
                    cycles,
                    residuals,
                    terminal,
                    ritz,
                    spectra,
                    basis: basis(s.basis.as_ref(), base)?,
                    tail,
                }))
            }
        }
    }

    pub fn from_full(p: &FullPrescription, basis: Option<BasisSpec>) -> Self {
        Scenario::Gmres(GmresSpec {
            schema: SCHEMA,
            kind: Kind::Gmres,
            n: Some(p.n()),
            residuals: p.residuals.clone(),
            ritz: p.ritz.iter().map(|s| nums(s)).collect(),
            eigenvalues: nums(&p.eigenvalues),
            basis,
            tolerance: None,
        })
    }

    pub fn from_scalar(p: &ScalarPrescription, basis: Option<BasisSpec>) -> Self {
        Scenario::Restarted(RestartedSpec {
            schema: SCHEMA,
            kind: Kind::RestartedGmres,
            n: Some(p.n()),
            m: p.m,
            cycles: p.cycles,
            residuals: p.residuals.clone(),
            terminal: p.terminal,
            ritz: p
                .ritz
                .iter()
                .map(|c| c.iter().map(|s| nums(s)).collect())
                .collect(),
            spectra: p.spectra.iter().map(|s| nums(s)).collect(),
            basis,
            tail: p.tail.as_ref().map(|t| nums(t)),
            tolerance: None,
        })
    }

    /// Block Ritz data is written in the form it is held in.
    pub fn from_block(p: &BlockPrescription, basis: Option<BasisSpec>) -> Self {
        let ritz_spec = |r: &BlockRitz| match r {
            BlockRitz::Solvents(s) => BlockRitzSpec::Solvents(s.iter().map(rows).collect()),
            BlockRitz::Coefficients(c) => BlockRitzSpec::Coefficients(c.iter().map(rows).collect()),
        };
        Scenario::Block(BlockSpec {
            schema: SCHEMA,
            kind: if p.cycles == 1 {
                Kind::BlockGmres
            } else {
                Kind::RestartedBlockGmres
            },
            n: Some(p.n()),
            p: p.p,
            m: p.m,
            cycles: p.cycles,
            residuals: p
                .residuals
                .iter()
                .map(|c| c.iter().map(|f| rows(f.matrix())).collect())
                .collect(),
            terminal: p.terminal.as_ref().map(|f| rows(f.matrix())),
            ritz: p
                .ritz
                .iter()
                .map(|c| c.iter().map(ritz_spec).collect())
                .collect(),
            spectra: p.spectra.iter().map(ritz_spec).collect(),
            basis,
            tail: p.tail.as_ref().map(rows),
            tolerance: None,
        })
    }
}

fn expect_len(key: &str, got: usize, want: usize) -> Result<(), CliError> {
    if got == want {
        Ok(())
    } else {
        Err(CliError::Parse(format!(
            "key `{key}`: expected {want} entries, found {got}"
        )))
    }
}

fn values(v: &[Num]) -> Vec<C64> {
    v.iter().map(|x| x.value()).collect()
}

fn nums(v: &[C64]) -> Vec<Num> {
    v.iter().map(|&z| Num::from_c64(z)).collect()
}

pub fn rows(m: &CMat) -> Rows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| Num::from_c64(m[(i, j)])).collect())
        .collect()
}

fn matrix(key: &str, r: &Rows, shape: Option<(usize, usize)>) -> Result<CMat, CliError> {
    let nr = r.len();
    let nc = r.first().map_or(0, Vec::len);
    if r.iter().any(|row| row.len() != nc) || nr == 0 {
        return Err(CliError::Parse(format!(
            "key `{key}`: rows of unequal length or empty matrix"
        )));
    }
    if let Some(s) = shape {
        if s != (nr, nc) {
            return Err(CliError::Parse(format!(
                "key `{key}`: expected {}x{} matrix, found {nr}x{nc}",
                s.0, s.1
            )));
        }
    }
    Ok(CMat::from_fn(nr, nc, |i, j| r[i][j].value()))
}

fn quantity(key: &str, r: &Rows, p: usize) -> Result<NormalizingQuantity, CliError> {
    let m = matrix(key, r, Some((p, p)))?;
    for j in 0..p {
        for i in j + 1..p {
            if m[(i, j)] != C64::new(0.0, 0.0) {
                return Err(CliError::Parse(format!(
                    "key `{key}`: not upper triangular"
                )));
            }
        }
    }
    NormalizingQuantity::new(m).map_err(|e| CliError::Parse(format!("key `{key}`: {e}")))
}

fn block_ritz(
    key: &str,
    r: &BlockRitzSpec,
    p: usize,
    degree: usize,
) -> Result<BlockRitz, CliError> {
    let (list, solvents) = match r {
        BlockRitzSpec::Solvents(l) => (l, true),
        BlockRitzSpec::Coefficients(l) => (l, false),
    };
    expect_len(key, list.len(), degree)?;
    let mats = list
        .iter()
        .enumerate()
        .map(|(i, m)| matrix(&format!("{key}[{i}]"), m, Some((p, p))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(if solvents {
        BlockRitz::Solvents(mats)
    } else {
        BlockRitz::Coefficients(mats)
    })
}

fn basis(spec: Option<&BasisSpec>, base: &Path) -> Result<Basis, CliError> {
    Ok(match spec {
        None | Some(BasisSpec::Standard) => Basis::Standard,
        Some(BasisSpec::RandomUnitary { seed }) => Basis::RandomUnitary { seed: *seed },
        Some(BasisSpec::Explicit { path }) => Basis::Explicit(mtx::read(&base.join(path))?),
    })
}
