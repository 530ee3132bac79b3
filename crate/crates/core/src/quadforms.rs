//! Binary quadratic forms / half-integral 2x2 index matrices.
//!
//! `(a, b, c)` stands for the matrix `[[a, b/2], [b/2, c]]`, i.e. the form
//! `a x^2 + b x y + c y^2`. `det2 = 4ac - b^2` is the determinant of the
//! doubled matrix, so `det = det2 / 4` exactly as a rational. Positive
//! definite forms are reduced in the Gauss sense `-a < b <= a <= c` (with
//! `b >= 0` when `a = c`); GL2-class representatives additionally take
//! `b >= 0`.

use num_bigint::BigInt;
use num_integer::Integer;
use thiserror::Error;

use crate::arith::{rat, Rat};
use crate::characters::{quad_char, CharError, QuadCharacter};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("form ({a},{b},{c}) is not positive definite")]
    NotPositiveDefinite { a: i64, b: i64, c: i64 },
    #[error("{d} is not a negative discriminant ≡ 0,1 mod 4")]
    InvalidDiscriminant { d: i64 },
    #[error(transparent)]
    Char(#[from] CharError),
}

/// Index triple `(a, b, c)` for the half-integral matrix `[[a,b/2],[b/2,c]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryQf {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl BinaryQf {
    pub const ZERO: BinaryQf = BinaryQf { a: 0, b: 0, c: 0 };

    pub fn new(a: i64, b: i64, c: i64) -> Self {
        BinaryQf { a, b, c }
    }

    /// `det(2T) = 4ac - b^2`.
    pub fn det2(&self) -> i64 {
        4 * self.a * self.c - self.b * self.b
    }

    /// `det(T) = det2/4` as an exact rational.
    pub fn det_rat(&self) -> Rat {
        rat(self.det2(), 4)
    }

    pub fn trace(&self) -> i64 {
        self.a + self.c
    }

    /// `gcd(a, b, c)`; 0 only for the zero form.
    pub fn content(&self) -> i64 {
        self.a.gcd(&self.b).gcd(&self.c)
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    pub fn is_pos_def(&self) -> bool {
        self.a > 0 && self.det2() > 0
    }

    pub fn is_psd(&self) -> bool {
        self.a >= 0 && self.c >= 0 && self.det2() >= 0
    }

    pub fn is_reduced(&self) -> bool {
        self.is_pos_def()
            && -self.a < self.b
            && self.b <= self.a
            && self.a <= self.c
            && (self.a != self.c || self.b >= 0)
    }

    /// Form value `a x^2 + b x y + c y^2`.
    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    /// Key string used in JSON maps and violation lists: `"a,b,c"`.
    pub fn key(&self) -> String {
        format!("{},{},{}", self.a, self.b, self.c)
    }

    pub fn parse_key(s: &str) -> Option<BinaryQf> {
        let mut it = s.split(',');
        let a = it.next()?.trim().parse().ok()?;
        let b = it.next()?.trim().parse().ok()?;
        let c = it.next()?.trim().parse().ok()?;
        if it.next().is_some() {
            return None;
        }
        Some(BinaryQf { a, b, c })
    }
}

/// SL2(Z)-reduce a positive definite form. Idempotent on reduced input.
pub fn gauss_reduce(f: BinaryQf) -> Result<BinaryQf, FormError> {
    if !f.is_pos_def() {
        return Err(FormError::NotPositiveDefinite { a: f.a, b: f.b, c: f.c });
    }
    let (mut a, mut b, mut c) = (f.a, f.b, f.c);
    loop {
        if c < a {
            (a, b, c) = (c, -b, a);
            continue;
        }
        if b > a || b <= -a {
            // translate: b -> b - 2ak into (-a, a], c -> a k^2 - b k + c
            let k = Integer::div_floor(&(b + a), &(2 * a));
            let nb = b - 2 * a * k;
            let nc = a * k * k - b * k + c;
            b = nb;
            c = nc;
            if b == -a {
                b = a;
            }
            continue;
        }
        if a == c && b < 0 {
            b = -b;
        }
        break;
    }
    Ok(BinaryQf { a, b, c })
}

/// Canonical GL2(Z) representative of a psd form: the zero form maps to
/// itself, rank-1 forms to `(content, 0, 0)`, positive definite forms to the
/// reduced form with `b >= 0`.
pub fn gl2_canonical(f: BinaryQf) -> Result<BinaryQf, FormError> {
    if !f.is_psd() {
        return Err(FormError::NotPositiveDefinite { a: f.a, b: f.b, c: f.c });
    }
    if f.is_zero() {
        return Ok(f);
    }
    if f.det2() == 0 {
        return Ok(BinaryQf::new(f.content(), 0, 0));
    }
    let mut r = gauss_reduce(f)?;
    r.b = r.b.abs();
    Ok(r)
}

/// All reduced forms of a negative discriminant, with proper automorphism
/// orders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormClassList {
    pub discriminant: i64,
    pub classes: Vec<BinaryQf>,
    pub aut_orders: Vec<u32>,
}

impl FormClassList {
    pub fn class_number(&self) -> u64 {
        self.classes.len() as u64
    }
}

fn aut_order(f: &BinaryQf) -> u32 {
    let g = f.content();
    if f.a == g && f.b == g && f.c == g {
        6
    } else if f.a == g && f.b == 0 && f.c == g {
        4
    } else {
        2
    }
}

/// Enumerate all reduced forms of discriminant `d < 0` by bounded scan.
pub fn class_list(d: i64) -> Result<FormClassList, FormError> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(FormError::InvalidDiscriminant { d });
    }
    let mut classes = Vec::new();
    let abs_d = -d;
    let a_max = isqrt(abs_d as u64 / 3) as i64;
    for a in 1..=a_max.max(1) {
        for b in (-a + 1)..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c >= a && !(a == c && b < 0) {
                classes.push(BinaryQf::new(a, b, c));
            }
        }
    }
    let aut_orders = classes.iter().map(aut_order).collect();
    Ok(FormClassList { discriminant: d, classes, aut_orders })
}

/// Hurwitz class number `H(n)`: reduced forms of discriminant `-n` weighted
/// by `2 / |proper automorphisms|`. Zero when `-n` is not a discriminant.
/// This is the counting route, independent of the Bernoulli-based `cohen_h`.
pub fn hurwitz_weighted_count(n: u64) -> Rat {
    if n == 0 || !matches!((-(n as i64)).rem_euclid(4), 0 | 1) {
        return Rat::from_integer(BigInt::from(0));
    }
    let list = class_list(-(n as i64)).expect("valid discriminant");
    let mut total = Rat::from_integer(BigInt::from(0));
    for w in &list.aut_orders {
        total += rat(2, *w as i64);
    }
    total
}

/// `chi_T` for positive definite `T`: the character of discriminant
/// `-det(2T)`, which is automatically ≡ 0,1 mod 4.
pub fn chi_of_matrix(t: BinaryQf) -> Result<QuadCharacter, FormError> {
    if !t.is_pos_def() {
        return Err(FormError::NotPositiveDefinite { a: t.a, b: t.b, c: t.c });
    }
    Ok(quad_char(-t.det2())?)
}

pub(crate) fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r > 0 && r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// All psd triples with `a + c <= trace_bound`, ordered lexicographically by
/// `(trace, a, b)`.
pub fn enumerate_psd(trace_bound: u32) -> Vec<BinaryQf> {
    let tb = trace_bound as i64;
    let mut out = Vec::new();
    for tr in 0..=tb {
        for a in 0..=tr {
            let c = tr - a;
            let b_max = isqrt(4 * (a * c) as u64) as i64;
            for b in -b_max..=b_max {
                out.push(BinaryQf::new(a, b, c));
            }
        }
    }
    out
}

/// GL2(Z)-class representatives (reduced, `b >= 0`) of all positive definite
/// forms with `det2 <= det2_bound`, ordered by `(det2, a, b)`.
pub fn enumerate_pos_def_reduced(det2_bound: u64) -> Vec<BinaryQf> {
    let mut out = Vec::new();
    if det2_bound < 3 {
        return out;
    }
    let a_max = isqrt(det2_bound / 3) as i64;
    for a in 1..=a_max {
        for b in 0..=a {
            let mut c = a;
            loop {
                let det2 = 4 * a * c - b * b;
                if det2 > det2_bound as i64 {
                    break;
                }
                if det2 > 0 {
                    out.push(BinaryQf::new(a, b, c));
                }
                c += 1;
            }
        }
    }
    out.sort_by_key(|f| (f.det2(), f.a, f.b));
    out
}

/// Derive the trace bound that covers every reduced class up to `det2_bound`
/// (reduced representatives minimize the trace within their class).
pub fn trace_bound_for_det2(det2_bound: u64) -> u32 {
    enumerate_pos_def_reduced(det2_bound)
        .iter()
        .map(|f| f.trace())
        .max()
        .unwrap_or(0) as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_examples() {
        assert_eq!(gauss_reduce(BinaryQf::new(1, 3, 3)).unwrap(), BinaryQf::new(1, 1, 1));
        assert_eq!(gauss_reduce(BinaryQf::new(2, 2, 3)).unwrap(), BinaryQf::new(2, 2, 3));
        assert_eq!(gauss_reduce(BinaryQf::new(2, -1, 3)).unwrap(), BinaryQf::new(2, -1, 3));
        assert!(gauss_reduce(BinaryQf::new(1, 3, 1)).is_err());
        // idempotent and discriminant/content preserving on a grid
        for a in 1..6i64 {
            for b in -6..=6i64 {
                for c in 1..6i64 {
                    let f = BinaryQf::new(a, b, c);
                    if !f.is_pos_def() {
                        continue;
                    }
                    let r = gauss_reduce(f).unwrap();
                    assert!(r.is_reduced(), "{f:?} -> {r:?}");
                    assert_eq!(r.det2(), f.det2());
                    assert_eq!(r.content(), f.content());
                    assert_eq!(gauss_reduce(r).unwrap(), r);
                }
            }
        }
    }

    #[test]
    fn class_list_examples() {
        let l = class_list(-23).unwrap();
        assert_eq!(
            l.classes,
            vec![BinaryQf::new(1, 1, 6), BinaryQf::new(2, -1, 3), BinaryQf::new(2, 1, 3)]
        );
        assert_eq!(l.class_number(), 3);
        assert_eq!(l.aut_orders, vec![2, 2, 2]);

        let l = class_list(-3).unwrap();
        assert_eq!(l.classes, vec![BinaryQf::new(1, 1, 1)]);
        assert_eq!(l.aut_orders, vec![6]);

        let l = class_list(-4).unwrap();
        assert_eq!(l.classes, vec![BinaryQf::new(1, 0, 1)]);
        assert_eq!(l.aut_orders, vec![4]);

        assert!(class_list(-1).is_err());
        assert!(class_list(5).is_err());
    }

    #[test]
    fn hurwitz_counts() {
        assert_eq!(hurwitz_weighted_count(3), rat(1, 3));
        assert_eq!(hurwitz_weighted_count(4), rat(1, 2));
        assert_eq!(hurwitz_weighted_count(12), rat(4, 3));
        assert_eq!(hurwitz_weighted_count(23), rat(3, 1));
        assert_eq!(hurwitz_weighted_count(1), rat(0, 1));
    }

    #[test]
    fn chi_of_matrix_examples() {
        let chi = chi_of_matrix(BinaryQf::new(1, 1, 1)).unwrap();
        assert_eq!((chi.fundamental_discriminant(), chi.conductor()), (-3, 3));
        let chi = chi_of_matrix(BinaryQf::new(1, 0, 1)).unwrap();
        assert_eq!((chi.fundamental_discriminant(), chi.conductor()), (-4, 4));
        let chi = chi_of_matrix(BinaryQf::new(1, 0, 2)).unwrap();
        assert_eq!((chi.fundamental_discriminant(), chi.conductor()), (-8, 8));
        assert!(chi_of_matrix(BinaryQf::new(0, 0, 1)).is_err());
    }

    #[test]
    fn chi_is_class_invariant() {
        for a in 1..5i64 {
            for b in -5..=5i64 {
                for c in 1..5i64 {
                    let f = BinaryQf::new(a, b, c);
                    if !f.is_pos_def() {
                        continue;
                    }
                    let r = gauss_reduce(f).unwrap();
                    assert_eq!(chi_of_matrix(f).unwrap(), chi_of_matrix(r).unwrap());
                }
            }
        }
    }

    #[test]
    fn enumerate_psd_counts() {
        assert_eq!(enumerate_psd(0), vec![BinaryQf::ZERO]);
        assert_eq!(enumerate_psd(1).len(), 3);
        assert_eq!(enumerate_psd(2).len(), 10);
        // ordered by (trace, a, b)
        let v = enumerate_psd(3);
        for w in v.windows(2) {
            let ka = (w[0].trace(), w[0].a, w[0].b);
            let kb = (w[1].trace(), w[1].a, w[1].b);
            assert!(ka < kb);
        }
    }

    #[test]
    fn enumerate_reduced_examples() {
        assert_eq!(enumerate_pos_def_reduced(3), vec![BinaryQf::new(1, 1, 1)]);
        assert_eq!(
            enumerate_pos_def_reduced(4),
            vec![BinaryQf::new(1, 1, 1), BinaryQf::new(1, 0, 1)]
        );
        assert!(enumerate_pos_def_reduced(2).is_empty());
        for f in enumerate_pos_def_reduced(200) {
            assert!(f.is_reduced() && f.b >= 0 && f.det2() <= 200);
        }
        assert_eq!(enumerate_pos_def_reduced(200).len(), 350);
        assert_eq!(enumerate_pos_def_reduced(4000).len(), 25495);
    }

    #[test]
    fn gl2_canonical_cases() {
        assert_eq!(gl2_canonical(BinaryQf::ZERO).unwrap(), BinaryQf::ZERO);
        assert_eq!(gl2_canonical(BinaryQf::new(1, 2, 1)).unwrap(), BinaryQf::new(1, 0, 0));
        assert_eq!(gl2_canonical(BinaryQf::new(4, 4, 1)).unwrap(), BinaryQf::new(1, 0, 0));
        assert_eq!(gl2_canonical(BinaryQf::new(2, 0, 0)).unwrap(), BinaryQf::new(2, 0, 0));
        assert_eq!(gl2_canonical(BinaryQf::new(2, -1, 3)).unwrap(), BinaryQf::new(2, 1, 3));
        assert!(gl2_canonical(BinaryQf::new(1, 5, 1)).is_err());
    }

    #[test]
    fn key_round_trip() {
        let f = BinaryQf::new(-2, 7, 31);
        assert_eq!(BinaryQf::parse_key(&f.key()), Some(f));
        assert_eq!(BinaryQf::parse_key("1,2"), None);
        assert_eq!(BinaryQf::parse_key("1,2,3,4"), None);
    }
}
