use crate::block_prescribe::{construct_restarted_block, BlockRestartedConstruction};
use crate::linalg::CMat;
use crate::prescribe::{
    construct_full_gmres, construct_restarted, FullConstruction, RestartedConstruction,
};
use crate::verify::{verify_block, verify_full, verify_scalar, VerificationReport, VerifyOptions};

use super::Prescription;

/// A constructed system of any kind.
#[derive(Clone, Debug)]
pub enum Built {
    Full(FullConstruction),
    Scalar(RestartedConstruction),
    Block(BlockRestartedConstruction),
}

pub fn build(p: &Prescription) -> crate::Result<Built> {
    Ok(match p {
        Prescription::Full(p) => Built::Full(construct_full_gmres(p)?),
        Prescription::Scalar(p) => Built::Scalar(construct_restarted(p)?),
        Prescription::Block(p) => Built::Block(construct_restarted_block(p)?),
    })
}

impl Built {
    pub fn a(&self) -> &CMat {
        match self {
            Built::Full(c) => &c.a,
            Built::Scalar(c) => c.a(),
            Built::Block(c) => c.a(),
        }
    }

    pub fn b(&self) -> &CMat {
        match self {
            Built::Full(c) => &c.b,
            Built::Scalar(c) => c.b(),
            Built::Block(c) => c.b(),
        }
    }

    /// Restart length and number of cycles the system is built for.
    pub fn m_cycles(&self) -> (usize, usize) {
        match self {
            Built::Full(c) => (c.a.nrows(), 1),
            Built::Scalar(c) => (c.assembly.m, c.assembly.cycles),
            Built::Block(c) => (c.assembly.m, c.assembly.cycles),
        }
    }

    /// The same construction with `(A, B)` replaced, e.g. by matrices read
    /// back from disk; verification then runs the solver on these.
    pub fn with_system(mut self, a: CMat, b: CMat) -> Self {
        match &mut self {
            Built::Full(c) => {
                c.a = a;
                c.b = b;
            }
            Built::Scalar(c) => {
                c.assembly.a = a;
                c.assembly.b = b;
            }
            Built::Block(c) => {
                c.assembly.a = a;
                c.assembly.b = b;
            }
        }
        self
    }

    pub fn verify(&self, p: &Prescription, opts: &VerifyOptions) -> VerificationReport {
        match (self, p) {
            (Built::Full(c), Prescription::Full(p)) => verify_full(c, p, opts),
            (Built::Scalar(c), Prescription::Scalar(p)) => verify_scalar(c, p, opts),
            (Built::Block(c), Prescription::Block(p)) => verify_block(c, p, opts),
            _ => panic!("construction and prescription kinds differ"),
        }
    }

    /// Per-cycle factor matrices, named for the output directory.
    pub fn factor_files(&self) -> Vec<(String, CMat)> {
        let mut out = Vec::new();
        match self {
            Built::Full(c) => {
                out.push(("V.mtx".into(), c.v.clone()));
                out.push(("H.mtx".into(), c.factor.h.clone()));
                out.push(("DU.mtx".into(), c.factor.du()));
                out.push(("C.mtx".into(), c.factor.c.clone()));
            }
            Built::Scalar(c) => {
                for (k, f) in c.factors.iter().enumerate() {
                    out.push((format!("cycle{}_H.mtx", k + 1), f.factor.h.clone()));
                    out.push((format!("cycle{}_DU.mtx", k + 1), f.factor.du()));
                    out.push((format!("cycle{}_C.mtx", k + 1), f.factor.c.clone()));
                    out.push((
                        format!("cycle{}_g.mtx", k + 1),
                        CMat::from_column_slice(f.g.len(), 1, f.g.as_slice()),
                    ));
                }
                out.push(("Htilde.mtx".into(), c.assembly.h_with_tail()));
                out.push(("Vtilde.mtx".into(), c.assembly.v_tilde.clone()));
            }
            Built::Block(c) => {
                for (k, f) in c.factors.iter().enumerate() {
                    out.push((format!("cycle{}_H.mtx", k + 1), f.factor.h.clone()));
                    out.push((format!("cycle{}_DU.mtx", k + 1), f.factor.du()));
                    out.push((format!("cycle{}_C.mtx", k + 1), f.factor.c.clone()));
                    out.push((format!("cycle{}_G.mtx", k + 1), f.g.clone()));
                }
                out.push(("Htilde.mtx".into(), c.assembly.h_with_tail()));
                out.push(("Vtilde.mtx".into(), c.assembly.v_tilde.clone()));
            }
        }
        out
    }

    pub fn cond_du(&self) -> Vec<f64> {
        match self {
            Built::Full(c) => vec![c.factor.cond_du],
            Built::Scalar(c) => c.factors.iter().map(|f| f.factor.cond_du).collect(),
            Built::Block(c) => c.factors.iter().map(|f| f.factor.cond_du).collect(),
        }
    }

    pub fn cond_v(&self) -> Option<f64> {
        match self {
            Built::Full(_) => None,
            Built::Scalar(c) => Some(c.assembly.cond_v()),
            Built::Block(c) => Some(c.assembly.cond_v()),
        }
    }
}
