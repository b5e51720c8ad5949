#![allow(dead_code)]

pub mod props;

use proptest::prelude::*;
use sullivan_core::linalg::q;
use sullivan_core::{Cdga, FreeCga, Generator, Morphism, Polynomial};

/// Closed generators first (zero differential), then generators whose
/// differential is a decomposable polynomial in the closed ones.
#[derive(Clone, Debug)]
pub struct TwoStage {
    pub closed: Vec<u32>,
    pub upper: Vec<u32>,
    pub seed: Vec<i64>,
}

pub fn two_stage() -> impl Strategy<Value = TwoStage> {
    (
        prop::collection::vec(1u32..=4, 1..=3),
        prop::collection::vec(3u32..=8, 0..=2),
        prop::collection::vec(-2i64..=2, 12),
    )
        .prop_map(|(closed, upper, seed)| TwoStage { closed, upper, seed })
}

impl TwoStage {
    pub fn names(&self, prefix: &str) -> Vec<String> {
        (0..self.closed.len())
            .map(|i| format!("{prefix}a{i}"))
            .chain((0..self.upper.len()).map(|j| format!("{prefix}b{j}")))
            .collect()
    }

    pub fn build(&self, prefix: &str) -> Cdga {
        let names = self.names(prefix);
        let degrees = self.closed.iter().chain(&self.upper);
        let gens = names
            .iter()
            .zip(degrees)
            .map(|(n, &d)| Generator::new(n.clone(), d))
            .collect();
        let alg = FreeCga::new(gens).unwrap();
        let c = self.closed.len();
        let mut d = vec![alg.zero(); alg.arity()];
        let mut s = 0usize;
        for (j, &deg) in self.upper.iter().enumerate() {
            let mut v = alg.zero();
            for m in alg.graded_basis(deg + 1) {
                let only_closed = m.exponents()[c..].iter().all(|&e| e == 0);
                if only_closed && m.length() >= 2 {
                    let coeff = self.seed[s % self.seed.len()];
                    s += 1;
                    v.add_term(m, q(coeff));
                }
            }
            d[c + j] = v;
        }
        Cdga::new(alg, d).unwrap()
    }

    /// The projection killing the closed generators flagged in `kill`.
    pub fn projection(&self, y: &Cdga, kill: &[bool]) -> Morphism {
        let ya = y.algebra();
        let c = self.closed.len();
        let keep: Vec<usize> = (0..ya.arity())
            .filter(|&i| i >= c || !kill.get(i).copied().unwrap_or(false))
            .collect();
        let xa = FreeCga::new(keep.iter().map(|&i| ya.generator(i).clone()).collect()).unwrap();
        let mut images: Vec<Polynomial> = vec![xa.zero(); ya.arity()];
        for (k, &i) in keep.iter().enumerate() {
            images[i] = xa.gen(k);
        }
        let d = keep
            .iter()
            .map(|&i| ya.substitute(y.differential_of(i), &xa, &images).unwrap())
            .collect();
        let x = Cdga::new(xa, d).unwrap();
        Morphism::new(y.clone(), x, images).unwrap()
    }
}

/// Small matrices with entries in -3..=3.
pub fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=6, 1usize..=7).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-3i64..=3, c), r))
}
