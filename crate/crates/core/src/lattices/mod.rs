//! Lattices and theta series: the Golay/Leech construction, exact
//! short-vector enumeration, degree-1 lattice theta series, and genus theta
//! series of binary quadratic forms.

pub mod enumerate;
pub mod genus;
pub mod golay;
pub mod leech;

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{rat, Rat};
use crate::characters::kronecker;
use crate::eisenstein::{delta_expansion_exec, eis1_exec, EisError};
use crate::exec::Exec;
use crate::qexp::{linear_combine1, Expansion1, QexpError};
use crate::quadforms::FormError;

pub use enumerate::{short_vector_counts, short_vector_counts_exec};
pub use genus::{genus_bqf, genus_theta, genus_theta1, genus_theta2, GenusBqf};
pub use golay::{golay_code, BinaryCode};
pub use leech::leech_lattice;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("Gram matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("Gram matrix is not integral")]
    NonIntegralGram,
    #[error("genus needs a prime p ≡ 3 (mod 4), got {p}")]
    InvalidGenusPrime { p: u64 },
    #[error("degree {degree} not supported (1 or 2)")]
    InvalidDegree { degree: u8 },
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Qexp(#[from] QexpError),
    #[error(transparent)]
    Eis(#[from] EisError),
}

/// A full-rank lattice presented by its Gram matrix of exact rationals,
/// together with the basis (in ambient scaled coordinates) and a provenance
/// note describing how it was assembled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralLattice {
    gram: Vec<Vec<Rat>>,
    basis: Vec<Vec<i64>>,
    provenance: String,
}

impl IntegralLattice {
    pub fn new(gram: Vec<Vec<Rat>>, basis: Vec<Vec<i64>>, provenance: impl Into<String>) -> Self {
        let lat = IntegralLattice { gram, basis, provenance: provenance.into() };
        assert!(!lat.gram.is_empty() && lat.gram.iter().all(|r| r.len() == lat.gram.len()));
        lat
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<Rat>] {
        &self.gram
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Integer image of the Gram matrix; enumeration requires it.
    pub fn gram_int(&self) -> Result<Vec<Vec<i64>>, LatticeError> {
        self.gram
            .iter()
            .map(|row| {
                row.iter()
                    .map(|q| {
                        if q.is_integer() {
                            num_traits::ToPrimitive::to_i64(&q.to_integer())
                                .ok_or(LatticeError::NonIntegralGram)
                        } else {
                            Err(LatticeError::NonIntegralGram)
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Exact determinant by fraction-free elimination on the rational Gram.
    pub fn det(&self) -> Rat {
        let n = self.rank();
        let mut m: Vec<Vec<Rat>> = self.gram.clone();
        let mut det = Rat::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&i| !m[i][col].is_zero()) else {
                return Rat::zero();
            };
            if piv != col {
                m.swap(piv, col);
                det = -det;
            }
            let pivot = m[col][col].clone();
            det *= &pivot;
            for i in col + 1..n {
                if m[i][col].is_zero() {
                    continue;
                }
                let factor = &m[i][col] / &pivot;
                for j in col..n {
                    let sub = &factor * &m[col][j];
                    m[i][j] -= sub;
                }
            }
        }
        det
    }
}

/// Degree-1 theta series of a lattice: `a(t)` counts vectors of norm `2t`.
pub fn lattice_theta1(lat: &IntegralLattice, t_max: u32) -> Expansion1 {
    lattice_theta1_exec(lat, t_max, Exec::default())
}

pub fn lattice_theta1_exec(lat: &IntegralLattice, t_max: u32, ex: Exec) -> Expansion1 {
    let counts = short_vector_counts_exec(lat, 2 * t_max as u64, ex);
    Expansion1::from_fn("theta_lattice^(1)", t_max, |t| {
        rat(counts.get(&(2 * t as u64)).copied().unwrap_or(0) as i64, 1)
    })
}

/// Outcome of the Leech degree-1 verification: enumerated shell counts, the
/// identity cross-check against `E12 - (65520/691) Delta`, and the mod-23
/// vanishing sweep on the identity expansion.
#[derive(Debug, Clone, Serialize)]
pub struct LeechIdentityReport {
    pub enum_bound: u32,
    pub t_max: u32,
    pub counts: BTreeMap<u64, u64>,
    pub identity_mismatches: Vec<u32>,
    pub wilton_violations: Vec<u32>,
}

impl LeechIdentityReport {
    pub fn passed(&self) -> bool {
        self.identity_mismatches.is_empty() && self.wilton_violations.is_empty()
    }
}

/// Verify `theta_Leech = E12 - (65520/691) Delta` by enumeration for
/// `t <= enum_bound`, then check the mod-23 vanishing on
/// `chi_{-23}(t) = -1` up to `t_max` using the identity expansion.
pub fn leech_theta_identity_check(
    t_max: u32,
    enum_bound: u32,
    ex: Exec,
) -> Result<LeechIdentityReport, LatticeError> {
    let lat = leech_lattice();
    let counts = short_vector_counts_exec(lat, 2 * enum_bound as u64, ex);

    let e12 = eis1_exec(12, t_max, ex)?;
    let delta = delta_expansion_exec(t_max, ex);
    let identity = linear_combine1(&[
        (Rat::one(), &e12),
        (rat(-65520, 691), &delta),
    ]);

    let mut identity_mismatches = Vec::new();
    for t in 0..=enum_bound {
        let counted = rat(counts.get(&(2 * t as u64)).copied().unwrap_or(0) as i64, 1);
        if identity.coeff(t) != &counted {
            identity_mismatches.push(t);
        }
    }

    let mut wilton_violations = Vec::new();
    for t in 1..=t_max {
        if kronecker(-23, t as i64).expect("t > 0") == -1 {
            let r = crate::arith::residue_mod_p(identity.coeff(t), 23)?;
            if r != 0 {
                wilton_violations.push(t);
            }
        }
    }

    Ok(LeechIdentityReport {
        enum_bound,
        t_max,
        counts,
        identity_mismatches,
        wilton_violations,
    })
}

impl From<crate::arith::ArithError> for LatticeError {
    fn from(e: crate::arith::ArithError) -> Self {
        LatticeError::Qexp(QexpError::Arith(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat_int, Int};

    #[test]
    fn det_of_simple_gram() {
        let gram = vec![
            vec![rat_int(2), rat_int(1)],
            vec![rat_int(1), rat_int(2)],
        ];
        let lat = IntegralLattice::new(gram, Vec::new(), "A2");
        assert_eq!(lat.det(), rat_int(3));
        assert_eq!(lat.gram_int().unwrap(), vec![vec![2, 1], vec![1, 2]]);
    }

    #[test]
    fn non_integral_gram_detected() {
        let gram = vec![
            vec![rat_int(2), Rat::new(Int::from(1), Int::from(2))],
            vec![Rat::new(Int::from(1), Int::from(2)), rat_int(2)],
        ];
        let lat = IntegralLattice::new(gram, Vec::new(), "half");
        assert!(matches!(lat.gram_int(), Err(LatticeError::NonIntegralGram)));
    }
}
