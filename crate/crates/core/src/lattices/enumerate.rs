//! Exact short-vector counting by depth-first enumeration.
//!
//! The triangular decomposition G = L D L^T is computed in exact rational
//! arithmetic. The DFS prunes with f64 images of those pivots plus a fixed
//! 0.25 slack: every exact partial norm is a rational a few ulps away from
//! its f64 image, so no branch with exact partial <= max_norm is ever cut.
//! Accepted leaves are measured with the integer Gram matrix itself, so the
//! final counts are exact; the float side can only admit candidates that the
//! exact check then rejects.
//!
//! x and -x are enumerated once (highest-index nonzero coordinate positive)
//! and counted twice; the zero vector contributes the single norm-0 entry.

use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::Rat;
use crate::exec::{self, Exec};

use super::{IntegralLattice, LatticeError};

/// Unit-lower-triangular L and positive diagonal D with G = L D L^T, exact.
pub fn ldl_decompose(gram: &[Vec<Rat>]) -> Result<(Vec<Vec<Rat>>, Vec<Rat>), LatticeError> {
    let n = gram.len();
    let mut l = vec![vec![Rat::zero(); n]; n];
    let mut d = vec![Rat::zero(); n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = gram[i][j].clone();
            for k in 0..j {
                sum -= &l[i][k] * &l[j][k] * &d[k];
            }
            if i == j {
                if !sum.is_positive() {
                    return Err(LatticeError::NotPositiveDefinite);
                }
                d[i] = sum;
                l[i][i] = Rat::from_integer(1.into());
            } else {
                l[i][j] = sum / &d[j];
            }
        }
    }
    Ok((l, d))
}

fn rat_to_f64(q: &Rat) -> f64 {
    q.to_f64().expect("pivot magnitudes are tiny")
}

struct Shape {
    gram: Vec<Vec<i64>>,
    d: Vec<f64>,
    /// `lt[i][j - i - 1] = L[j][i]` for `j > i`: the factors feeding the
    /// center of level `i` from the already-fixed coordinates.
    lt: Vec<Vec<f64>>,
    limit: f64,
    max_norm: i64,
}

/// A subtree root handed to the worker pool.
#[derive(Clone)]
struct Task {
    level: usize,
    xs: Vec<i64>,
    partial: f64,
    acc: i64,
    nonzero_seen: bool,
}

impl Shape {
    /// Float center and exact Gram cross term of `level`, from the
    /// coordinates fixed above it.
    fn level_terms(&self, level: usize, xs: &[i64]) -> (f64, i64) {
        let mut c = 0.0;
        let mut cross: i64 = 0;
        let grow = &self.gram[level];
        for (off, &f) in self.lt[level].iter().enumerate() {
            let j = level + 1 + off;
            let xj = xs[j];
            if xj != 0 {
                c += f * xj as f64;
                cross += grow[j] * xj;
            }
        }
        (c, cross)
    }

    fn dfs(
        &self,
        level: usize,
        xs: &mut [i64],
        partial: f64,
        acc: i64,
        nonzero_seen: bool,
        counts: &mut BTreeMap<u64, u64>,
    ) {
        let (c, cross) = self.level_terms(level, xs);
        let room = self.limit - partial;
        if room < 0.0 {
            return;
        }
        let radius = (room / self.d[level]).sqrt();
        let mut lo = (-c - radius).ceil() as i64;
        let hi = (-c + radius).floor() as i64;
        if !nonzero_seen {
            lo = lo.max(0);
        }
        for x in lo..=hi {
            let y = x as f64 + c;
            let child_partial = partial + self.d[level] * y * y;
            if child_partial > self.limit {
                continue;
            }
            let child_acc = acc + self.gram[level][level] * x * x + 2 * x * cross;
            let child_nonzero = nonzero_seen || x != 0;
            if level == 0 {
                if child_nonzero && child_acc <= self.max_norm {
                    debug_assert!(child_acc > 0);
                    *counts.entry(child_acc as u64).or_insert(0) += 2;
                }
            } else {
                xs[level] = x;
                self.dfs(level - 1, xs, child_partial, child_acc, child_nonzero, counts);
            }
        }
    }

    /// Fix the top levels sequentially, emitting subtree roots.
    fn split(&self, level: usize, split_level: usize, task: Task, out: &mut Vec<Task>) {
        if level == split_level {
            out.push(task);
            return;
        }
        let (c, cross) = self.level_terms(level, &task.xs);
        let room = self.limit - task.partial;
        if room < 0.0 {
            return;
        }
        let radius = (room / self.d[level]).sqrt();
        let mut lo = (-c - radius).ceil() as i64;
        let hi = (-c + radius).floor() as i64;
        if !task.nonzero_seen {
            lo = lo.max(0);
        }
        for x in lo..=hi {
            let y = x as f64 + c;
            let partial = task.partial + self.d[level] * y * y;
            if partial > self.limit {
                continue;
            }
            let mut xs = task.xs.clone();
            xs[level] = x;
            self.split(
                level - 1,
                split_level,
                Task {
                    level: level - 1,
                    xs,
                    partial,
                    acc: task.acc + self.gram[level][level] * x * x + 2 * x * cross,
                    nonzero_seen: task.nonzero_seen || x != 0,
                },
                out,
            );
        }
    }
}

/// Exact counts of lattice vectors by norm, `norm <= max_norm`, including
/// `x` and `-x` separately; the count at 0 is 1.
pub fn short_vector_counts(lat: &IntegralLattice, max_norm: u64) -> BTreeMap<u64, u64> {
    short_vector_counts_exec(lat, max_norm, Exec::default())
}

pub fn short_vector_counts_exec(
    lat: &IntegralLattice,
    max_norm: u64,
    ex: Exec,
) -> BTreeMap<u64, u64> {
    let gram = lat.gram_int().expect("integral Gram");
    let n = gram.len();
    let (l, d) = ldl_decompose(lat.gram()).expect("positive definite");
    let mut lt = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            let f = rat_to_f64(&l[j][i]);
            lt[i].push(f);
        }
    }
    let shape = Shape {
        gram,
        d: d.iter().map(rat_to_f64).collect(),
        lt,
        limit: max_norm as f64 + 0.25,
        max_norm: max_norm as i64,
    };

    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    if n >= 10 {
        let split_level = n - 7;
        let root = Task {
            level: n - 1,
            xs: vec![0; n],
            partial: 0.0,
            acc: 0,
            nonzero_seen: false,
        };
        let mut tasks = Vec::new();
        shape.split(n - 1, split_level, root, &mut tasks);
        let partials = exec::map_collect(ex, tasks, |task| {
            let mut local = BTreeMap::new();
            let mut xs = task.xs;
            shape.dfs(task.level, &mut xs, task.partial, task.acc, task.nonzero_seen, &mut local);
            local
        });
        for partial in partials {
            for (norm, count) in partial {
                *counts.entry(norm).or_insert(0) += count;
            }
        }
    } else {
        let mut xs = vec![0; n];
        shape.dfs(n - 1, &mut xs, 0.0, 0, false, &mut counts);
    }
    counts.insert(0, 1);
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat_int, Int};

    fn lattice_from_int(gram: Vec<Vec<i64>>) -> IntegralLattice {
        let g = gram
            .iter()
            .map(|r| r.iter().map(|&x| Rat::from_integer(Int::from(x))).collect())
            .collect();
        IntegralLattice::new(g, Vec::new(), "test")
    }

    #[test]
    fn ldl_reconstructs() {
        let lat = lattice_from_int(vec![vec![2, 1, 0], vec![1, 2, 1], vec![0, 1, 4]]);
        let (l, d) = ldl_decompose(lat.gram()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut sum = Rat::zero();
                for k in 0..3 {
                    sum += &l[i][k] * &l[j][k] * &d[k];
                }
                assert_eq!(sum, lat.gram()[i][j]);
            }
        }
        assert_eq!(l[0][0], rat_int(1));
    }

    #[test]
    fn ldl_rejects_indefinite() {
        let lat = lattice_from_int(vec![vec![1, 3], vec![3, 1]]);
        assert!(matches!(
            ldl_decompose(lat.gram()),
            Err(LatticeError::NotPositiveDefinite)
        ));
    }

    #[test]
    fn z2_counts() {
        // Z^2: x and -x counted separately
        let lat = lattice_from_int(vec![vec![1, 0], vec![0, 1]]);
        let counts = short_vector_counts(&lat, 5);
        assert_eq!(counts.get(&0), Some(&1));
        assert_eq!(counts.get(&1), Some(&4));
        assert_eq!(counts.get(&2), Some(&4));
        assert_eq!(counts.get(&3), None);
        assert_eq!(counts.get(&4), Some(&4));
        assert_eq!(counts.get(&5), Some(&8));
    }

    #[test]
    fn a2_counts() {
        // hexagonal lattice: 6 minimal vectors of norm 2
        let lat = lattice_from_int(vec![vec![2, 1], vec![1, 2]]);
        let counts = short_vector_counts(&lat, 6);
        assert_eq!(counts.get(&2), Some(&6));
        assert_eq!(counts.get(&6), Some(&6));
    }

    #[test]
    fn counts_even_and_symmetric() {
        let lat = lattice_from_int(vec![vec![2, 0, 1], vec![0, 4, 1], vec![1, 1, 6]]);
        let counts = short_vector_counts(&lat, 20);
        for (&norm, &c) in &counts {
            if norm > 0 {
                assert_eq!(c % 2, 0);
            }
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        // rank >= 10 so the split path engages
        let mut gram = vec![vec![0i64; 12]; 12];
        for i in 0..12 {
            gram[i][i] = 2;
            if i + 1 < 12 {
                gram[i][i + 1] = 1;
                gram[i + 1][i] = 1;
            }
        }
        let lat = lattice_from_int(gram);
        let a = short_vector_counts_exec(&lat, 6, Exec::Sequential);
        let b = short_vector_counts_exec(&lat, 6, Exec::Parallel);
        assert_eq!(a, b);
        // A12 root system: 12*13 = 156 roots of norm 2
        assert_eq!(a.get(&2), Some(&156));
    }
}
