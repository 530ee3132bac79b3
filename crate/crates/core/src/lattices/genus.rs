//! Genus theta series of binary quadratic forms of discriminant -p.
//!
//! The genus average is mass-weighted over SL2(Z) classes: weight 1/|aut|
//! per class, normalized by the total mass. Degree-1 coefficients count
//! representations Q(x,y) = t; degree-2 coefficients at T count 2x2 integer
//! matrices X with GramQ[X] = 2T, i.e. pairs (u, v) with Q(u) = a,
//! Q(v) = c and bilinear form b. This normalization is validated against
//! the weight-(p+1)/2 Eisenstein congruence rather than assumed.

use num_traits::{One, Zero};

use crate::arith::{rat, Rat};
use crate::exec::Exec;
use crate::qexp::{Expansion, Expansion1, Expansion2, Region2};
use crate::quadforms::{class_list, isqrt, BinaryQf, FormClassList};

use super::LatticeError;

/// A genus of binary quadratic forms of discriminant `-p`, `p ≡ 3 (mod 4)`.
#[derive(Debug, Clone)]
pub struct GenusBqf {
    pub p: u64,
    pub classes: FormClassList,
    /// `1/|aut|` per class.
    pub weights: Vec<Rat>,
}

impl GenusBqf {
    pub fn mass(&self) -> Rat {
        let mut m = Rat::zero();
        for w in &self.weights {
            m += w;
        }
        m
    }
}

pub fn genus_bqf(p: u64) -> Result<GenusBqf, LatticeError> {
    if !crate::arith::is_prime(p) || p % 4 != 3 {
        return Err(LatticeError::InvalidGenusPrime { p });
    }
    let classes = class_list(-(p as i64))?;
    let weights = classes.aut_orders.iter().map(|&w| rat(1, w as i64)).collect();
    Ok(GenusBqf { p, classes, weights })
}

/// All integer representations `Q(x,y) = n`, `n >= 0`.
pub fn representations(q: &BinaryQf, n: i64) -> Vec<(i64, i64)> {
    debug_assert!(q.is_pos_def() && n >= 0);
    if n == 0 {
        return vec![(0, 0)];
    }
    let det2 = q.det2();
    let xb = isqrt((4 * q.c * n / det2) as u64) as i64 + 1;
    let yb = isqrt((4 * q.a * n / det2) as u64) as i64 + 1;
    let mut out = Vec::new();
    for x in -xb..=xb {
        for y in -yb..=yb {
            if q.eval(x, y) == n {
                out.push((x, y));
            }
        }
    }
    out
}

/// Bilinear form `B(u, v) = Q(u+v) - Q(u) - Q(v)` of `q`.
fn bilinear(q: &BinaryQf, u: (i64, i64), v: (i64, i64)) -> i64 {
    2 * q.a * u.0 * v.0 + q.b * (u.0 * v.1 + u.1 * v.0) + 2 * q.c * u.1 * v.1
}

/// Degree-1 genus theta: mass-weighted representation counts.
pub fn genus_theta1(p: u64, t_max: u32) -> Result<Expansion1, LatticeError> {
    let genus = genus_bqf(p)?;
    let mass = genus.mass();
    Ok(Expansion1::from_fn(format!("genus_theta1(p={p})"), t_max, |t| {
        if t == 0 {
            return Rat::one();
        }
        let mut acc = Rat::zero();
        for (q, w) in genus.classes.classes.iter().zip(&genus.weights) {
            let count = representations(q, t as i64).len();
            if count > 0 {
                acc += w * rat(count as i64, 1);
            }
        }
        acc / &mass
    }))
}

/// Degree-2 genus theta coefficient at a psd index.
pub fn genus_theta2_coefficient(genus: &GenusBqf, t: &BinaryQf) -> Rat {
    let mass = genus.mass();
    let mut acc = Rat::zero();
    for (q, w) in genus.classes.classes.iter().zip(&genus.weights) {
        let us = representations(q, t.a);
        if us.is_empty() {
            continue;
        }
        let vs = representations(q, t.c);
        let mut count = 0i64;
        for &u in &us {
            for &v in &vs {
                if bilinear(q, u, v) == t.b {
                    count += 1;
                }
            }
        }
        if count > 0 {
            acc += w * rat(count, 1);
        }
    }
    acc / mass
}

/// Degree-2 genus theta on a chosen region (trace-complete or det2 classes).
pub fn genus_theta2(p: u64, region: Region2, ex: Exec) -> Result<Expansion2, LatticeError> {
    let genus = genus_bqf(p)?;
    Ok(Expansion2::from_class_fn(
        format!("genus_theta2(p={p})"),
        region,
        ex,
        move |t| genus_theta2_coefficient(&genus, t),
    ))
}

/// Spec-level entry point: degree 1 uses `bound` as `t_max`; degree 2 uses
/// `bound` as the det2 class bound (the theorem-sweep region).
pub fn genus_theta(p: u64, degree: u8, bound: u64, ex: Exec) -> Result<Expansion, LatticeError> {
    match degree {
        1 => Ok(Expansion::One(genus_theta1(p, bound as u32)?)),
        2 => Ok(Expansion::Two(genus_theta2(p, Region2::Det2Classes(bound), ex)?)),
        d => Err(LatticeError::InvalidDegree { degree: d }),
    }
}
