//! Seeded scenario generators: random admissible prescriptions and systems
//! engineered to stagnate at the end of a restart cycle.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::block::{blnorm, NormalizingQuantity};
use crate::block_prescribe::{BlockPrescription, BlockRitz};
use crate::error::Result;
use crate::linalg::{c64, diag, random_unitary, real, rng_from_seed, set_block, CMat, C64};
use crate::prescribe::{
    construct_full_gmres, Basis, FullConstruction, FullPrescription, ScalarPrescription,
};

/// Ratio range between consecutive prescribed residual values.
pub const RATIO: (f64, f64) = (0.35, 0.9);
/// Modulus range of random Ritz values and eigenvalues.
pub const ANNULUS: (f64, f64) = (0.5, 2.0);

pub fn annulus_point(rng: &mut ChaCha8Rng) -> C64 {
    let r = rng.random_range(ANNULUS.0..=ANNULUS.1);
    let t = rng.random_range(0.0..std::f64::consts::TAU);
    C64::from_polar(r, t)
}

fn annulus_set(rng: &mut ChaCha8Rng, count: usize) -> Vec<C64> {
    (0..count).map(|_| annulus_point(rng)).collect()
}

/// Strictly decreasing sequence starting at 1.
fn decreasing(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let mut f = Vec::with_capacity(len);
    let mut cur = 1.0;
    for _ in 0..len {
        f.push(cur);
        cur *= rng.random_range(RATIO.0..=RATIO.1);
    }
    f
}

/// Strictly decreasing full GMRES prescription of size `n`.
pub fn random_full(n: usize, seed: u64) -> FullPrescription {
    let mut rng = rng_from_seed(seed);
    let residuals = decreasing(&mut rng, n);
    let ritz = (1..n).map(|j| annulus_set(&mut rng, j)).collect();
    let eigenvalues = annulus_set(&mut rng, n);
    FullPrescription {
        residuals,
        ritz,
        eigenvalues,
        basis: Basis::Standard,
    }
}

/// Strictly decreasing restarted prescription with `cycles` cycles of length `m`.
pub fn random_restarted(m: usize, cycles: usize, seed: u64) -> ScalarPrescription {
    let mut rng = rng_from_seed(seed);
    let all = decreasing(&mut rng, m * cycles);
    let residuals = all.chunks(m).map(<[f64]>::to_vec).collect();
    let ritz = (0..cycles)
        .map(|_| (1..=m).map(|j| annulus_set(&mut rng, j)).collect())
        .collect();
    let spectra = (0..cycles).map(|_| annulus_set(&mut rng, m + 1)).collect();
    ScalarPrescription {
        m,
        cycles,
        residuals,
        terminal: None,
        ritz,
        spectra,
        basis: Basis::Standard,
        tail: None,
    }
}

/// `p x p` matrix with prescribed eigenvalues: a random unitary similarity of
/// an upper triangular matrix with small off-diagonal entries.
fn matrix_with_eigenvalues(rng: &mut ChaCha8Rng, values: &[C64]) -> CMat {
    let p = values.len();
    let mut t = diag(values);
    for j in 0..p {
        for i in 0..j {
            t[(i, j)] = c64(rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2));
        }
    }
    let q = random_unitary(p, rng.random());
    &q * t * q.adjoint()
}

fn random_solvents(rng: &mut ChaCha8Rng, p: usize, count: usize) -> BlockRitz {
    BlockRitz::Solvents(
        (0..count)
            .map(|_| {
                let vals = annulus_set(rng, p);
                matrix_with_eigenvalues(rng, &vals)
            })
            .collect(),
    )
}

/// Next normalizing quantity `F'` with `F'^* F' = F^* S F`, where `S` is
/// Hermitian with eigenvalues in `RATIO^2`; strictly Loewner smaller.
fn contract(rng: &mut ChaCha8Rng, f: &NormalizingQuantity) -> NormalizingQuantity {
    let p = f.p();
    let sig: Vec<C64> = (0..p)
        .map(|_| real(rng.random_range(RATIO.0..=RATIO.1)))
        .collect();
    let u = random_unitary(p, rng.random());
    blnorm(&(diag(&sig) * u.adjoint() * f.matrix()))
}

/// Strictly Loewner decreasing block prescription with solvent Ritz data.
pub fn random_block(p: usize, m: usize, cycles: usize, seed: u64) -> BlockPrescription {
    let mut rng = rng_from_seed(seed);
    let mut f0 = CMat::identity(p, p);
    for j in 0..p {
        f0[(j, j)] = real(rng.random_range(1.0..2.0));
        for i in 0..j {
            f0[(i, j)] = c64(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3));
        }
    }
    let mut cur = NormalizingQuantity::new(f0).expect("positive diagonal");
    let mut residuals = Vec::with_capacity(cycles);
    for _ in 0..cycles {
        let mut cyc = Vec::with_capacity(m);
        for _ in 0..m {
            cyc.push(cur.clone());
            cur = contract(&mut rng, &cur);
        }
        residuals.push(cyc);
    }
    let ritz = (0..cycles)
        .map(|_| (1..=m).map(|j| random_solvents(&mut rng, p, j)).collect())
        .collect();
    let spectra = (0..cycles)
        .map(|_| random_solvents(&mut rng, p, m + 1))
        .collect();
    BlockPrescription {
        p,
        m,
        cycles,
        residuals,
        terminal: None,
        ritz,
        spectra,
        basis: Basis::Standard,
        tail: None,
    }
}

/// The block prescription with `p = 1` that mirrors a scalar one.
pub fn scalar_as_block(sp: &ScalarPrescription) -> BlockPrescription {
    let one = |v: f64| NormalizingQuantity::scalar(v).expect("positive residual");
    let as_blocks = |set: &Vec<C64>| {
        BlockRitz::Solvents(set.iter().map(|&z| CMat::from_element(1, 1, z)).collect())
    };
    BlockPrescription {
        p: 1,
        m: sp.m,
        cycles: sp.cycles,
        residuals: sp
            .residuals
            .iter()
            .map(|c| c.iter().map(|&v| one(v)).collect())
            .collect(),
        terminal: sp.terminal.map(one),
        ritz: sp
            .ritz
            .iter()
            .map(|c| c.iter().map(as_blocks).collect())
            .collect(),
        spectra: sp.spectra.iter().map(as_blocks).collect(),
        basis: sp.basis.clone(),
        tail: sp
            .tail
            .as_ref()
            .map(|t| CMat::from_column_slice(t.len(), 1, t)),
    }
}

/// A full GMRES system that stagnates at the end of the first restart cycle.
///
/// `s = 1`: `n = 4`, `f = (1, .9, .9, .5)`, restart length 2.
/// `s = 2`: `n = 6`, `f = (1, .9, .9, .9, .5, .2)`, restart length 3.
pub fn engineered_stagnation(s: usize) -> Result<Engineered> {
    let (residuals, m) = match s {
        1 => (vec![1.0, 0.9, 0.9, 0.5], 2),
        2 => (vec![1.0, 0.9, 0.9, 0.9, 0.5, 0.2], 3),
        _ => panic!("engineered stagnation is available for s = 1 and s = 2"),
    };
    let n = residuals.len();
    let flat: Vec<bool> = (1..n).map(|j| residuals[j] == residuals[j - 1]).collect();
    let ritz: Vec<Vec<C64>> = (1..n)
        .map(|j| {
            let mut set: Vec<C64> = (0..j)
                .map(|i| c64(1.0 + 0.25 * i as f64, 0.3 * (j as f64 - i as f64)))
                .collect();
            if flat[j - 1] {
                set[0] = real(0.0);
            }
            set
        })
        .collect();
    let eigenvalues = (0..n)
        .map(|i| c64(0.8 + 0.2 * i as f64, if i % 2 == 0 { 0.4 } else { -0.4 }))
        .collect();
    let prescription = FullPrescription {
        residuals,
        ritz,
        eigenvalues,
        basis: Basis::Standard,
    };
    let construction = construct_full_gmres(&prescription)?;
    Ok(Engineered {
        prescription,
        construction,
        m,
    })
}

/// A full GMRES construction meant to be run with restart length `m`.
#[derive(Clone, Debug)]
pub struct Engineered {
    pub prescription: FullPrescription,
    pub construction: FullConstruction,
    pub m: usize,
}

impl Engineered {
    pub fn cycles(&self) -> usize {
        self.prescription.n() / self.m
    }
}

/// Random full GMRES system of size `n` in which each step stagnates with
/// probability `prob`; used to probe restarted runs for mirroring.
pub fn random_stagnating_full(n: usize, prob: f64, seed: u64) -> Result<FullConstruction> {
    let mut rng = rng_from_seed(seed);
    let mut residuals = vec![1.0];
    let mut ritz = Vec::with_capacity(n - 1);
    for j in 1..n {
        let flat = rng.random_bool(prob);
        let prev = residuals[j - 1];
        residuals.push(if flat {
            prev
        } else {
            prev * rng.random_range(RATIO.0..=RATIO.1)
        });
        let mut set = annulus_set(&mut rng, j);
        if flat {
            set[0] = real(0.0);
        }
        ritz.push(set);
    }
    let eigenvalues = annulus_set(&mut rng, n);
    construct_full_gmres(&FullPrescription {
        residuals,
        ritz,
        eigenvalues,
        basis: Basis::Standard,
    })
}

/// Decoupled block system `A1 (+) A2` with `B = [b1 (+) 0, 0 (+) b2]`: the
/// first column follows the engineered `s = 1` stagnating system, the
/// second a strictly decreasing one. Block GMRES then stagnates along `e_1`
/// at the end of the first cycle of length 2.
pub fn block_directional_stagnation() -> Result<(CMat, CMat, usize)> {
    let Engineered {
        construction: first,
        m,
        ..
    } = engineered_stagnation(1)?;
    let second = construct_full_gmres(&FullPrescription {
        residuals: vec![1.0, 0.6, 0.3, 0.1],
        ritz: vec![
            vec![real(1.2)],
            vec![c64(0.9, 0.5), c64(1.4, -0.2)],
            vec![real(0.7), real(1.6), c64(1.1, 0.8)],
        ],
        eigenvalues: vec![real(0.6), c64(1.3, 0.3), real(1.8), c64(0.9, -0.7)],
        basis: Basis::Standard,
    })?;
    let n1 = first.a.nrows();
    let n = n1 + second.a.nrows();
    let mut a = CMat::zeros(n, n);
    set_block(&mut a, 0, 0, &first.a);
    set_block(&mut a, n1, n1, &second.a);
    let mut b = CMat::zeros(n, 2);
    set_block(&mut b, 0, 0, &first.b);
    set_block(&mut b, n1, 1, &second.b);
    Ok((a, b, m))
}
