//! Leech lattice construction from the Golay code.
//!
//! Working coordinates are Z^24 scaled by 1/sqrt(8): a vector x belongs to
//! the lattice iff all coordinates share a parity m in {0,1}, the set
//! {i : x_i ≡ m+2 (mod 4)} supports a Golay codeword, and sum(x_i) ≡ 4m
//! (mod 8). The basis is assembled by Hermite-normal-form reduction of the
//! generating vectors {2c : c generator word} ∪ {4(e_1 - e_i)} ∪
//! {(-3,1,...,1)}; the covolume check det = 2^36 proves the generators span
//! the full lattice (their HNF could only cut out a sublattice, never more,
//! since every generator satisfies the membership predicate).

use std::sync::OnceLock;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{Int, Rat};

use super::enumerate::short_vector_counts;
use super::golay::{golay_code, BinaryCode};
use super::IntegralLattice;

/// Membership predicate in the 1/sqrt(8)-scaled integer coordinates.
pub fn in_leech(x: &[i64; 24], code: &BinaryCode) -> bool {
    let m = x[0].rem_euclid(2);
    if x.iter().any(|&xi| xi.rem_euclid(2) != m) {
        return false;
    }
    let mut support: u32 = 0;
    for (i, &xi) in x.iter().enumerate() {
        if (xi - m - 2).rem_euclid(4) == 0 {
            support |= 1 << i;
        }
    }
    if !code.contains(support) {
        return false;
    }
    let sum: i64 = x.iter().sum();
    (sum - 4 * m).rem_euclid(8) == 0
}

fn generating_vectors(code: &BinaryCode) -> Vec<[i64; 24]> {
    let mut gens: Vec<[i64; 24]> = Vec::with_capacity(36);
    for row in code.generators() {
        let mut v = [0i64; 24];
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = 2 * (row >> i & 1) as i64;
        }
        gens.push(v);
    }
    for i in 1..24 {
        let mut v = [0i64; 24];
        v[0] = 4;
        v[i] = -4;
        gens.push(v);
    }
    let mut v = [1i64; 24];
    v[0] = -3;
    gens.push(v);
    gens
}

/// Row-style Hermite normal form over Z via extended-gcd row combinations.
/// Returns the nonzero rows (the lattice basis).
fn hnf(rows: Vec<Vec<Int>>) -> Vec<Vec<Int>> {
    let mut a = rows;
    let m = a.len();
    let n = a[0].len();
    let mut r = 0usize;
    for col in 0..n {
        let Some(piv) = (r..m).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, piv);
        for i in r + 1..m {
            if a[i][col].is_zero() {
                continue;
            }
            let x = a[r][col].clone();
            let y = a[i][col].clone();
            let e = x.extended_gcd(&y);
            let (u, v) = (-&y / &e.gcd, &x / &e.gcd);
            for j in 0..n {
                let top = &e.x * &a[r][j] + &e.y * &a[i][j];
                let bot = &u * &a[r][j] + &v * &a[i][j];
                a[r][j] = top;
                a[i][j] = bot;
            }
        }
        if a[r][col].is_negative() {
            for j in 0..n {
                a[r][j] = -a[r][j].clone();
            }
        }
        let pivot = a[r][col].clone();
        for i in 0..r {
            let q = a[i][col].div_floor(&pivot);
            if !q.is_zero() {
                for j in 0..n {
                    a[i][j] = &a[i][j] - &q * &a[r][j];
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

fn build() -> IntegralLattice {
    let code = golay_code();
    let gens = generating_vectors(code);
    for g in &gens {
        assert!(in_leech(g, code), "generator fails the membership predicate: {g:?}");
    }

    let rows: Vec<Vec<Int>> = gens
        .iter()
        .map(|g| g.iter().map(|&x| Int::from(x)).collect())
        .collect();
    let basis_int = hnf(rows);
    assert_eq!(basis_int.len(), 24, "generators span rank 24");

    // covolume: det of the triangular basis must be 8^12 = 2^36, i.e. the
    // generators span the whole lattice rather than a proper sublattice
    let mut det = Int::from(1);
    for (i, row) in basis_int.iter().enumerate() {
        det *= &row[i];
    }
    assert_eq!(det, Int::from(1u64 << 36), "HNF completion lost covolume");

    let basis: Vec<[i64; 24]> = basis_int
        .iter()
        .map(|row| {
            let mut v = [0i64; 24];
            for (i, x) in row.iter().enumerate() {
                v[i] = x.to_i64().expect("basis entry fits i64");
            }
            v
        })
        .collect();
    for row in &basis {
        assert!(in_leech(row, code), "basis row escapes the lattice: {row:?}");
    }

    // Gram = B B^T / 8, integral with even diagonal
    let mut gram_int = vec![vec![0i64; 24]; 24];
    for i in 0..24 {
        for j in 0..24 {
            let dot: i64 = (0..24).map(|k| basis[i][k] * basis[j][k]).sum();
            assert_eq!(dot % 8, 0, "inner product not divisible by 8");
            gram_int[i][j] = dot / 8;
        }
        assert_eq!(gram_int[i][i] % 2, 0, "diagonal must be even");
    }
    let gram: Vec<Vec<Rat>> = gram_int
        .iter()
        .map(|row| row.iter().map(|&x| Rat::from_integer(Int::from(x))).collect())
        .collect();

    let lat = IntegralLattice::new(
        gram,
        basis.iter().map(|r| r.to_vec()).collect(),
        "Leech: Golay [24,12,8] generator words doubled + 4(e1-ei) + (-3,1,...,1), HNF-reduced, Gram/8",
    );
    assert_eq!(lat.det(), Rat::from_integer(Int::from(1)), "determinant 1");

    // minimal norm 4: no vectors of norm 2 (norm 4 witnesses sit on the diagonal)
    let counts = short_vector_counts(&lat, 2);
    assert_eq!(counts.get(&2), None, "no norm-2 vectors");
    assert!(gram_int.iter().enumerate().any(|(i, row)| row[i] == 4));
    lat
}

/// The Leech lattice, built and validated once per process.
pub fn leech_lattice() -> &'static IntegralLattice {
    static LEECH: OnceLock<IntegralLattice> = OnceLock::new();
    LEECH.get_or_init(build)
}
