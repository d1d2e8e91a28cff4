//! Identities tying the volume function J to Littlewood-Richardson
//! multiplicities for su(3) and su(4).

use super::decompose::triple_multiplicity;
use super::hive::{lr_coefficient, root_lattice_check};
use crate::error::{HornError, Result};
use crate::scalar::int;
use crate::spectra::{rho_shift, weight_to_rational_spectrum, DynkinWeight};
use crate::su_density::j_exact;
use num_rational::BigRational;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum BridgeOutcome {
    Checked(IdentityCheck),
    Skipped { name: String, reason: String },
}

impl BridgeOutcome {
    pub fn holds(&self) -> Option<bool> {
        match self {
            BridgeOutcome::Checked(c) => Some(c.holds),
            BridgeOutcome::Skipped { .. } => None,
        }
    }
}

fn j_of(l: &DynkinWeight, m: &DynkinWeight, v: &DynkinWeight) -> Result<BigRational> {
    let s = |w: &DynkinWeight| weight_to_rational_spectrum(w);
    Ok(j_exact(&s(l), &s(m), &s(v))?.value)
}

fn checked(name: &str, lhs: BigRational, rhs: BigRational) -> BridgeOutcome {
    BridgeOutcome::Checked(IdentityCheck {
        name: name.into(),
        holds: lhs == rhs,
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
    })
}

fn skipped(name: &str, reason: &str) -> BridgeOutcome {
    BridgeOutcome::Skipped {
        name: name.into(),
        reason: reason.into(),
    }
}

/// Checks every identity that applies to the triple, in exact arithmetic.
pub fn verify_bridge(
    lambda: &DynkinWeight,
    mu: &DynkinWeight,
    nu: &DynkinWeight,
) -> Result<Vec<BridgeOutcome>> {
    let rank = lambda.rank();
    if mu.rank() != rank || nu.rank() != rank {
        return Err(HornError::DimensionMismatch {
            expected: rank,
            found: mu.rank().max(nu.rank()),
        });
    }
    let shifted = |w: &DynkinWeight| rho_shift(w, 1).expect("raising is always dominant");
    let in_lattice = root_lattice_check(lambda, mu, nu);
    let mut out = Vec::new();
    match rank {
        2 => {
            let name = "J(l+rho, m+rho; n+rho) = N";
            if in_lattice {
                let j = j_of(&shifted(lambda), &shifted(mu), &shifted(nu))?;
                out.push(checked(name, j, int(lr_coefficient(lambda, mu, nu) as i64)));
            } else {
                out.push(skipped(name, "l + m - n is not in the root lattice"));
            }
        }
        3 => {
            let name = "24 J(l+rho, m+rho; n+rho) = 9 N + N(l, m, w1+w3; n)";
            if in_lattice {
                let j = j_of(&shifted(lambda), &shifted(mu), &shifted(nu))?;
                let adj = DynkinWeight::new(vec![1, 0, 1]);
                let extra = triple_multiplicity(lambda, mu, &adj, nu);
                let rhs = 9 * lr_coefficient(lambda, mu, nu) + extra;
                out.push(checked(name, int(24) * j, int(rhs as i64)));
            } else {
                out.push(skipped(name, "l + m - n is not in the root lattice"));
            }
            let name = "6 J(l, m; n) = N(l-rho, m-rho, w2; n-rho)";
            let lowered = (rho_shift(lambda, -1), rho_shift(mu, -1), rho_shift(nu, -1));
            match lowered {
                (Ok(l), Ok(m), Ok(v)) if in_lattice => {
                    let w2 = DynkinWeight::new(vec![0, 1, 0]);
                    let rhs = triple_multiplicity(&l, &m, &w2, &v);
                    let j = j_of(lambda, mu, nu)?;
                    out.push(checked(name, int(6) * j, int(rhs as i64)));
                }
                (Ok(_), Ok(_), Ok(_)) => {
                    out.push(skipped(name, "l + m - n is not in the root lattice"))
                }
                _ => out.push(skipped(name, "a weight has a zero Dynkin label")),
            }
        }
        _ => {}
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[u32]) -> DynkinWeight {
        DynkinWeight::new(v.to_vec())
    }

    #[test]
    fn su3_adjoint() {
        let a = w(&[1, 1]);
        let r = verify_bridge(&a, &a, &a).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].holds(), Some(true));
    }

    #[test]
    fn su3_outside_lattice_skips() {
        let r = verify_bridge(&w(&[1, 0]), &w(&[0, 0]), &w(&[0, 0])).unwrap();
        assert_eq!(r[0].holds(), None);
    }

    #[test]
    fn su4_both() {
        let l = w(&[2, 1, 1]);
        let r = verify_bridge(&l, &w(&[1, 1, 2]), &w(&[1, 2, 1])).unwrap();
        assert_eq!(r.len(), 2);
        for o in &r {
            assert_eq!(o.holds(), Some(true), "{o:?}");
        }
    }
}
