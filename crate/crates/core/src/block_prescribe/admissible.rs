use super::BlockPrescription;
use crate::block::{equal_direction, loewner_cmp, Loewner, NormalizingQuantity};
use crate::linalg::CVec;
use crate::prescribe::AdmissibilityReport;

fn fmt_direction(u: &CVec) -> String {
    let parts: Vec<String> = u
        .iter()
        .map(|z| format!("{:.4}{:+.4}i", z.re, z.im))
        .collect();
    format!("[{}]", parts.join(", "))
}

fn witness(prev: &NormalizingQuantity, cur: &NormalizingQuantity) -> String {
    match equal_direction(prev, cur) {
        Some(u) => format!("; equal direction u = {}", fmt_direction(&u)),
        None => String::new(),
    }
}

/// Loewner monotonicity, strict transitions, and the restriction of the
/// construction to strict decrease or total stagnation with a vanishing
/// constant coefficient.
pub fn validate_block_admissible(bp: &BlockPrescription) -> AdmissibilityReport {
    let mut rep = AdmissibilityReport::default();
    let (p, m) = (bp.p, bp.m);
    if p == 0 || m == 0 || bp.cycles == 0 {
        rep.push(
            None,
            None,
            "block size, cycle length and cycle count must be positive",
        );
        return rep;
    }
    if bp.residuals.len() != bp.cycles
        || bp.ritz.len() != bp.cycles
        || bp.spectra.len() != bp.cycles
    {
        rep.push(
            None,
            None,
            format!(
                "residual, Ritz and spectral data must cover {} cycles",
                bp.cycles
            ),
        );
        return rep;
    }
    for k in 0..bp.cycles {
        let c = Some(k + 1);
        if bp.residuals[k].len() != m {
            rep.push(
                c,
                None,
                format!(
                    "expected {m} normalizing quantities, got {}",
                    bp.residuals[k].len()
                ),
            );
        }
        for (j, f) in bp.residuals[k].iter().enumerate() {
            if f.p() != p || !f.is_positive(0.0) {
                rep.push(
                    c,
                    Some(j),
                    format!("F_{j} must be a {p}x{p} normalizing quantity with positive diagonal"),
                );
            }
        }
        if bp.ritz[k].len() != m {
            rep.push(
                c,
                None,
                format!("expected Ritz data for {m} steps, got {}", bp.ritz[k].len()),
            );
        }
        for (i, r) in bp.ritz[k].iter().enumerate() {
            if r.degree() != i + 1 {
                rep.push(
                    c,
                    Some(i + 1),
                    format!(
                        "step {} needs degree {} data, got {}",
                        i + 1,
                        i + 1,
                        r.degree()
                    ),
                );
            }
            if let Err(e) = r.coefficients() {
                rep.push(c, Some(i + 1), e.to_string());
            }
        }
        if bp.spectra[k].degree() != m + 1 {
            rep.push(
                c,
                None,
                format!(
                    "cycle spectral data needs degree {}, got {}",
                    m + 1,
                    bp.spectra[k].degree()
                ),
            );
        } else if let Err(e) = bp.spectra[k].coefficients() {
            rep.push(c, None, e.to_string());
        }
    }
    if let Some(t) = &bp.terminal {
        if t.p() != p || !t.is_positive(0.0) {
            rep.push(
                Some(bp.cycles),
                Some(m),
                "terminal value must be a positive normalizing quantity",
            );
        }
    }
    if let Some(t) = &bp.tail {
        if t.shape() != (bp.n(), p) {
            rep.push(
                None,
                None,
                format!("tail is {:?}, expected {}x{p}", t.shape(), bp.n()),
            );
        }
    }
    if !rep.is_ok() {
        return rep;
    }
    for k in 0..bp.cycles {
        let c = Some(k + 1);
        let f = bp.cycle_values(k);
        for j in 1..=m {
            let (prev, cur) = (&f[j - 1], &f[j]);
            let order = loewner_cmp(cur, prev);
            let zero = bp.ritz[k][j - 1].zero_constant().unwrap_or(false);
            let singular = bp.ritz[k][j - 1].singular_constant().unwrap_or(true);
            if j == m {
                if order != Loewner::Less {
                    let what = if k + 1 < bp.cycles {
                        "non-strict transition"
                    } else {
                        "terminal value must be strictly below the last residual"
                    };
                    rep.push(
                        c,
                        Some(j),
                        format!("{what} ({order}){}", witness(prev, cur)),
                    );
                }
                if singular {
                    rep.push(c, Some(j), "singular constant coefficient at the last step means end-of-cycle stagnation");
                }
                continue;
            }
            match order {
                Loewner::Less if singular => rep.push(
                    c,
                    Some(j),
                    "singular constant coefficient requires stagnation at this step",
                ),
                Loewner::Less => {}
                Loewner::Equal if zero => {}
                Loewner::Equal => rep.push(
                    c,
                    Some(j),
                    "total stagnation requires a vanishing constant coefficient",
                ),
                Loewner::LessOrEqual => rep.push(
                    c,
                    Some(j),
                    format!(
                        "stagnation in a single direction cannot be constructed{}",
                        witness(prev, cur)
                    ),
                ),
                Loewner::Greater | Loewner::GreaterOrEqual | Loewner::Incomparable => rep.push(
                    c,
                    Some(j),
                    format!("not Loewner non-increasing ({order}){}", witness(prev, cur)),
                ),
            }
        }
    }
    rep
}
