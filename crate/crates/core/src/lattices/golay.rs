//! Extended binary Golay code [24, 12, 8].
//!
//! The length-23 quadratic-residue code is cyclic with a degree-11 generator
//! polynomial dividing x^23 + 1 over GF(2); exactly two such divisors exist
//! (reciprocals of each other, the QR and QNR factors) and we take the
//! numerically smaller, g(x) = 0xAE3. Appending an overall parity bit gives
//! the [24, 12, 8] code. All advertised invariants are verified at
//! construction and any failure is fatal.

use std::collections::BTreeMap;
use std::sync::OnceLock;

/// Words are 24-bit masks, bit `i` = coordinate `i`; bit 23 is the parity
/// coordinate of the extension.
#[derive(Debug, Clone)]
pub struct BinaryCode {
    generators: [u32; 12],
    codewords: Vec<u32>,
}

impl BinaryCode {
    pub const LENGTH: u32 = 24;
    pub const DIMENSION: u32 = 12;

    pub fn generators(&self) -> &[u32; 12] {
        &self.generators
    }

    /// All 4096 codewords, sorted ascending.
    pub fn codewords(&self) -> &[u32] {
        &self.codewords
    }

    pub fn contains(&self, word: u32) -> bool {
        self.codewords.binary_search(&word).is_ok()
    }

    pub fn weight_distribution(&self) -> BTreeMap<u32, u32> {
        let mut dist = BTreeMap::new();
        for w in &self.codewords {
            *dist.entry(w.count_ones()).or_insert(0) += 1;
        }
        dist
    }

    pub fn min_nonzero_weight(&self) -> u32 {
        self.codewords
            .iter()
            .filter(|&&w| w != 0)
            .map(|w| w.count_ones())
            .min()
            .expect("nonzero words exist")
    }

    /// Generator rows as 24-character bitstrings, LSB coordinate first.
    pub fn generator_bitstrings(&self) -> Vec<String> {
        self.generators
            .iter()
            .map(|row| {
                (0..24)
                    .map(|i| if row >> i & 1 == 1 { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }
}

/// Degree of a GF(2) polynomial in bitmask form.
fn poly_degree(p: u32) -> i32 {
    31 - p.leading_zeros() as i32
}

/// Remainder of GF(2) polynomial division.
fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

/// The two monic degree-11 divisors of x^23 + 1 over GF(2), ascending.
fn degree11_factors() -> Vec<u32> {
    let x23p1: u32 = (1 << 23) | 1;
    (1u32 << 11..1 << 12)
        .filter(|cand| cand & 1 == 1 && poly_rem(x23p1, *cand) == 0)
        .collect()
}

fn build() -> BinaryCode {
    let factors = degree11_factors();
    assert_eq!(factors.len(), 2, "x^23+1 must have exactly two degree-11 factors");
    let g = factors[0];
    assert_eq!(g, 0xAE3);

    let mut generators = [0u32; 12];
    for (i, row) in generators.iter_mut().enumerate() {
        let w23 = g << i; // x^i * g(x), degree <= 22
        let parity = w23.count_ones() & 1;
        *row = w23 | (parity << 23);
    }

    let mut codewords = vec![0u32];
    for row in generators {
        let mut doubled: Vec<u32> = codewords.iter().map(|c| c ^ row).collect();
        codewords.append(&mut doubled);
    }
    codewords.sort_unstable();
    codewords.dedup();

    let code = BinaryCode { generators, codewords };
    // construction self-checks: any failure here is fatal
    assert_eq!(code.codewords.len(), 4096, "dimension 12 lost");
    assert_eq!(code.min_nonzero_weight(), 8, "minimum weight");
    let dist = code.weight_distribution();
    assert_eq!(dist.get(&8), Some(&759), "759 octads");
    for i in 0..12 {
        for j in i..12 {
            assert_eq!(
                (code.generators[i] & code.generators[j]).count_ones() % 2,
                0,
                "self-duality"
            );
        }
    }
    code
}

/// The extended Golay code, built once per process.
pub fn golay_code() -> &'static BinaryCode {
    static CODE: OnceLock<BinaryCode> = OnceLock::new();
    CODE.get_or_init(build)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants() {
        let code = golay_code();
        assert!(code.contains(0));
        assert_eq!(code.codewords().len(), 4096);
        assert_eq!(code.min_nonzero_weight(), 8);
        let dist = code.weight_distribution();
        assert_eq!(dist.get(&8), Some(&759));
        assert_eq!(dist.get(&12), Some(&2576));
        assert_eq!(dist.get(&16), Some(&759));
        assert_eq!(dist.get(&24), Some(&1));
    }

    #[test]
    fn closed_under_addition_spot() {
        let code = golay_code();
        let words = code.codewords();
        for i in (0..words.len()).step_by(97) {
            for j in (0..words.len()).step_by(211) {
                assert!(code.contains(words[i] ^ words[j]));
            }
        }
    }

    #[test]
    fn bitstrings_have_even_weight_eight() {
        let code = golay_code();
        for s in code.generator_bitstrings() {
            assert_eq!(s.len(), 24);
            assert_eq!(s.chars().filter(|&c| c == '1').count(), 8);
        }
    }
}
