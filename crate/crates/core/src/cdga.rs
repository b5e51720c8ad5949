//! Commutative differential graded algebras and their morphisms.

use num_traits::{One, Zero};

use crate::algebra::{FreeCga, Monomial, Polynomial};
use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, solve_affine, subquotient_basis, Matrix, Subspace, Q};
use crate::prelude::*;

/// A free graded-commutative algebra with a differential of degree +1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cdga {
    alg: FreeCga,
    d: Vec<Polynomial>,
}

impl Cdga {
    /// Validate generator differentials: degree `|g|+1`, `d∘d = 0`, and
    /// compatibility with square-zero caps.
    pub fn new(alg: FreeCga, d: Vec<Polynomial>) -> Result<Self> {
        if d.len() != alg.arity() {
            return Err(Error::contract("one differential value per generator is required"));
        }
        for (i, v) in d.iter().enumerate() {
            let g = alg.generator(i);
            if v.ambient() != alg.ambient() {
                return Err(Error::contract(format!("d({}) lives in another algebra", g.name)));
            }
            if let Some(k) = alg.homogeneous_degree(v)? {
                if k != g.degree + 1 {
                    return Err(Error::Degree {
                        context: format!("d({})", g.name),
                        expected: i64::from(g.degree + 1),
                        found: i64::from(k),
                    });
                }
            }
        }
        let a = Cdga { alg, d };
        for i in 0..a.alg.arity() {
            let dd = a.d(&a.d[i]);
            if !dd.is_zero() {
                return Err(Error::DifferentialSquare {
                    generator: a.alg.generator(i).name.clone(),
                    residual: a.alg.format(&dd),
                });
            }
            let g = a.alg.generator(i);
            if !g.is_odd() && g.squares_to_zero() {
                // d(g²) = 2g·dg must vanish since g² = 0
                let r = a.alg.mul(&a.alg.gen(i), &a.d[i]);
                if !r.is_zero() {
                    return Err(Error::contract(format!(
                        "d({0}) is incompatible with {0}² = 0: {0}·d({0}) = {1}",
                        g.name,
                        a.alg.format(&r)
                    )));
                }
            }
        }
        Ok(a)
    }

    /// Differential given by name; generators not listed have `d = 0`.
    pub fn from_named(alg: FreeCga, values: &[(&str, Polynomial)]) -> Result<Self> {
        let mut d = vec![alg.zero(); alg.arity()];
        for (name, v) in values {
            d[alg.index_of(name)?] = v.clone();
        }
        Self::new(alg, d)
    }

    /// Zero differential.
    pub fn formal(alg: FreeCga) -> Self {
        let d = vec![alg.zero(); alg.arity()];
        Cdga { alg, d }
    }

    pub fn algebra(&self) -> &FreeCga {
        &self.alg
    }

    pub fn differential_values(&self) -> &[Polynomial] {
        &self.d
    }

    pub fn differential_of(&self, i: usize) -> &Polynomial {
        &self.d[i]
    }

    /// `d(p)`.
    pub fn d(&self, p: &Polynomial) -> Polynomial {
        let phi: Vec<Polynomial> = (0..self.alg.arity()).map(|i| self.alg.gen(i)).collect();
        self.alg
            .apply_derivation(p, &self.alg, &phi, &self.d, true)
            .unwrap_or_else(|e| panic!("{e}"))
    }

    /// Matrix of `d: A^k → A^{k+1}` on the monomial bases.
    pub fn differential_matrix(&self, k: u32) -> Matrix {
        let src = self.alg.graded_basis(k);
        let tgt = self.alg.graded_basis(k + 1);
        let cols: Vec<Vec<(usize, Q)>> = src
            .iter()
            .map(|m| {
                let dm = self.d(&Polynomial::term(self.alg.ambient(), m.clone(), Q::one()));
                sparse_coords(&dm, &tgt)
            })
            .collect();
        Matrix::from_sparse_columns(tgt.len(), &cols)
    }

    /// True iff every generator differential has zero linear part.
    pub fn is_minimal(&self) -> bool {
        self.d.iter().all(|v| v.terms().all(|(m, _)| m.length() >= 2))
    }

    pub fn require_minimal(&self, what: &str) -> Result<()> {
        if let Some(i) = (0..self.alg.arity()).find(|&i| self.d[i].terms().any(|(m, _)| m.length() < 2)) {
            return Err(Error::NotMinimal(format!(
                "{what}: d({}) = {} has a linear part",
                self.alg.generator(i).name,
                self.alg.format(&self.d[i])
            )));
        }
        Ok(())
    }

    /// Degree-`k` cohomology computed on the monomial basis.
    pub fn cohomology(&self, k: u32) -> Cohomology {
        let basis = self.alg.graded_basis(k);
        let cycles = kernel_basis(&self.differential_matrix(k));
        let boundaries = if k == 0 {
            Subspace::zero(basis.len())
        } else {
            let m = self.differential_matrix(k - 1);
            Subspace::span(basis.len(), &m.transpose().to_rows())
        };
        let (_, reps) = subquotient_basis(&cycles, &boundaries)
            .unwrap_or_else(|e| panic!("boundaries outside cycles in degree {k}: {e}"));
        let representatives = reps
            .iter()
            .map(|v| self.alg.from_coordinates(v, &basis))
            .collect();
        Cohomology {
            degree: k,
            basis,
            cycles,
            boundaries,
            rep_vectors: reps,
            representatives,
        }
    }

    /// Augmentation `ε: A → ℚ`.
    pub fn augment(&self, p: &Polynomial) -> Q {
        p.constant_term()
    }
}

pub(crate) fn sparse_coords(p: &Polynomial, basis: &[Monomial]) -> Vec<(usize, Q)> {
    p.terms()
        .map(|(m, c)| {
            let k = basis
                .binary_search(m)
                .unwrap_or_else(|_| panic!("monomial outside the degree basis"));
            (k, c.clone())
        })
        .collect()
}

/// `H^k` of a CDGA with chosen cocycle representatives.
#[derive(Clone, Debug)]
pub struct Cohomology {
    pub degree: u32,
    pub basis: Vec<Monomial>,
    pub cycles: Subspace,
    pub boundaries: Subspace,
    rep_vectors: Vec<Vec<Q>>,
    pub representatives: Vec<Polynomial>,
}

impl Cohomology {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    /// Coordinates of the class of a cocycle in the representative basis.
    pub fn class_of(&self, alg: &FreeCga, p: &Polynomial) -> Result<Vec<Q>> {
        let v = alg.coordinates(p, &self.basis)?;
        if !self.cycles.contains(&v) {
            return Err(Error::contract(format!(
                "{} is not a cocycle",
                alg.format(p)
            )));
        }
        let mut cols: Vec<Vec<(usize, Q)>> = self
            .rep_vectors
            .iter()
            .chain(self.boundaries.basis().iter())
            .map(|c| {
                c.iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(i, x)| (i, x.clone()))
                    .collect()
            })
            .collect();
        if cols.is_empty() {
            cols.push(Vec::new());
        }
        let m = Matrix::from_sparse_columns(self.basis.len(), &cols);
        let (x, _) = solve_affine(&m, &v)?
            .ok_or_else(|| Error::Inconsistent("cocycle outside representatives plus boundaries".into()))?;
        Ok(x[..self.dim()].to_vec())
    }

    pub fn is_exact(&self, alg: &FreeCga, p: &Polynomial) -> Result<bool> {
        Ok(self.class_of(alg, p)?.iter().all(Zero::is_zero))
    }
}

/// Degree-preserving chain algebra map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    source: Cdga,
    target: Cdga,
    images: Vec<Polynomial>,
}

impl Morphism {
    pub fn new(source: Cdga, target: Cdga, images: Vec<Polynomial>) -> Result<Self> {
        let m = Self::unchecked(source, target, images)?;
        let bad = m.failing_generators();
        if !bad.is_empty() {
            return Err(Error::ChainCondition { generators: bad });
        }
        Ok(m)
    }

    /// Images by generator name; unlisted generators map to 0.
    pub fn from_named(source: Cdga, target: Cdga, values: &[(&str, Polynomial)]) -> Result<Self> {
        let mut images = vec![target.algebra().zero(); source.algebra().arity()];
        for (name, v) in values {
            images[source.algebra().index_of(name)?] = v.clone();
        }
        Self::new(source, target, images)
    }

    /// Checks shapes and degrees only; the chain condition is left to
    /// [`Morphism::failing_generators`].
    pub fn unchecked(source: Cdga, target: Cdga, images: Vec<Polynomial>) -> Result<Self> {
        let sa = source.algebra();
        let ta = target.algebra();
        if images.len() != sa.arity() {
            return Err(Error::contract("one image per source generator is required"));
        }
        for (i, v) in images.iter().enumerate() {
            let g = sa.generator(i);
            if v.ambient() != ta.ambient() {
                return Err(Error::contract(format!("image of {} lives in another algebra", g.name)));
            }
            if let Some(k) = ta.homogeneous_degree(v)? {
                if k != g.degree {
                    return Err(Error::Degree {
                        context: format!("image of {}", g.name),
                        expected: i64::from(g.degree),
                        found: i64::from(k),
                    });
                }
            }
        }
        Ok(Morphism {
            source,
            target,
            images,
        })
    }

    /// Generators on which `φ∘d = d∘φ` or a square-zero cap fails.
    pub fn failing_generators(&self) -> Vec<String> {
        let sa = self.source.algebra();
        let ta = self.target.algebra();
        let mut bad = Vec::new();
        for i in 0..sa.arity() {
            let g = sa.generator(i);
            let lhs = self.apply(self.source.differential_of(i));
            let rhs = self.target.d(&self.images[i]);
            let cap_ok = g.is_odd() || !g.squares_to_zero() || ta.mul(&self.images[i], &self.images[i]).is_zero();
            if lhs != rhs || !cap_ok {
                bad.push(g.name.clone());
            }
        }
        bad
    }

    pub fn identity(a: &Cdga) -> Self {
        let images = (0..a.algebra().arity()).map(|i| a.algebra().gen(i)).collect();
        Morphism {
            source: a.clone(),
            target: a.clone(),
            images,
        }
    }

    pub fn source(&self) -> &Cdga {
        &self.source
    }

    pub fn target(&self) -> &Cdga {
        &self.target
    }

    pub fn images(&self) -> &[Polynomial] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &Polynomial {
        &self.images[i]
    }

    pub fn apply(&self, p: &Polynomial) -> Polynomial {
        self.source
            .algebra()
            .substitute(p, self.target.algebra(), &self.images)
            .unwrap_or_else(|e| panic!("{e}"))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Morphism) -> Result<Morphism> {
        if other.source != self.target {
            return Err(Error::contract("composition of morphisms with mismatched ends"));
        }
        let images = self.images.iter().map(|v| other.apply(v)).collect();
        Ok(Morphism {
            source: self.source.clone(),
            target: other.target.clone(),
            images,
        })
    }

    /// Induced map on indecomposables, degree by degree.
    pub fn linear_part(&self) -> LinearPart {
        let sa = self.source.algebra();
        let ta = self.target.algebra();
        let top = sa.max_generator_degree().max(ta.max_generator_degree());
        let mut degrees = Vec::new();
        for k in 1..=top {
            let s = sa.generators_of_degree(k);
            let t = ta.generators_of_degree(k);
            if s.is_empty() && t.is_empty() {
                continue;
            }
            let rows: Vec<Vec<Q>> = t
                .iter()
                .map(|&j| {
                    let mj = Monomial::generator(ta.arity(), j);
                    s.iter().map(|&i| self.images[i].coeff(&mj)).collect()
                })
                .collect();
            let matrix = Matrix::from_rows(s.len(), rows);
            let rank = matrix.rank();
            degrees.push(LinearPartDegree {
                degree: k,
                source: s.iter().map(|&i| sa.generator(i).name.clone()).collect(),
                target: t.iter().map(|&j| ta.generator(j).name.clone()).collect(),
                injective: rank == s.len(),
                surjective: rank == t.len(),
                matrix,
            });
        }
        LinearPart {
            minimal: self.source.is_minimal() && self.target.is_minimal(),
            degrees,
        }
    }
}

/// Map on indecomposables `W^k → V^k` for each degree `k` where either side is nonzero.
#[derive(Clone, Debug)]
pub struct LinearPart {
    /// False when source or target is not minimal; the matrices are still the
    /// generator-linear parts but no longer compute the map on homotopy.
    pub minimal: bool,
    pub degrees: Vec<LinearPartDegree>,
}

#[derive(Clone, Debug)]
pub struct LinearPartDegree {
    pub degree: u32,
    pub source: Vec<String>,
    pub target: Vec<String>,
    /// Rows indexed by target generators, columns by source generators.
    pub matrix: Matrix,
    pub injective: bool,
    pub surjective: bool,
}

impl LinearPart {
    pub fn is_zero(&self) -> bool {
        self.degrees.iter().all(|d| d.matrix.is_zero())
    }

    pub fn injective(&self) -> bool {
        self.degrees.iter().all(|d| d.injective)
    }

    pub fn surjective(&self) -> bool {
        self.degrees.iter().all(|d| d.surjective)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Generator;
    use crate::linalg::q;

    fn sphere4() -> Cdga {
        let a = FreeCga::from_degrees(&[("w4", 4), ("w7", 7)]).unwrap();
        let w4sq = a.pow(&a.gen(0), 2);
        Cdga::from_named(a, &[("w7", w4sq)]).unwrap()
    }

    fn cp2() -> Cdga {
        let a = FreeCga::from_degrees(&[("v2", 2), ("v5", 5)]).unwrap();
        let v = a.pow(&a.gen(0), 3);
        Cdga::from_named(a, &[("v5", v)]).unwrap()
    }

    #[test]
    fn validation() {
        let a = FreeCga::from_degrees(&[("w4", 4), ("w7", 7), ("v3", 3)]).unwrap();
        let w4 = a.gen(0);
        let hopf = Cdga::from_named(a.clone(), &[("w7", a.pow(&w4, 2)), ("v3", w4.clone())]).unwrap();
        assert!(!hopf.is_minimal());

        let b = FreeCga::from_degrees(&[("w1", 2), ("w3", 3)]).unwrap();
        let e = Cdga::from_named(b.clone(), &[("w3", b.pow(&b.gen(0), 3))]).unwrap_err();
        assert_eq!(
            e,
            Error::Degree {
                context: "d(w3)".into(),
                expected: 4,
                found: 6
            }
        );

        let c = FreeCga::from_degrees(&[("a", 2), ("b", 3), ("c", 4)]).unwrap();
        let (ga, gb) = (c.gen(0), c.gen(1));
        let e = Cdga::from_named(c.clone(), &[("b", c.mul(&ga, &ga)), ("c", c.mul(&ga, &gb))]).unwrap_err();
        match e {
            Error::DifferentialSquare { generator, residual } => {
                assert_eq!(generator, "c");
                assert_eq!(residual, "a^3");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sphere_cohomology() {
        let s = sphere4();
        let h4 = s.cohomology(4);
        assert_eq!(h4.dim(), 1);
        assert_eq!(s.algebra().format(&h4.representatives[0]), "w4");
        assert_eq!(s.cohomology(8).dim(), 0);
        assert_eq!(s.cohomology(0).dim(), 1);
        assert!(s.is_minimal());
    }

    #[test]
    fn truncated_cohomology() {
        let a = FreeCga::new(vec![
            Generator::new("u3", 3),
            Generator::new("v3", 3),
            Generator::truncated("x", 6),
        ])
        .unwrap();
        let e = Cdga::formal(a);
        let h = e.cohomology(12);
        assert_eq!(h.dim(), 1);
        assert_eq!(e.algebra().format(&h.representatives[0]), "u3*v3*x");
    }

    #[test]
    fn morphisms() {
        let s = sphere4();
        let c = cp2();
        let ta = c.algebra();
        let f = Morphism::from_named(
            s.clone(),
            c.clone(),
            &[("w4", ta.pow(&ta.gen(0), 2)), ("w7", ta.mul(&ta.gen(0), &ta.gen(1)))],
        )
        .unwrap();
        assert!(f.linear_part().is_zero());
        let bad = Morphism::from_named(s.clone(), c.clone(), &[("w4", ta.pow(&ta.gen(0), 2))]).unwrap_err();
        assert_eq!(bad, Error::ChainCondition { generators: vec!["w7".into()] });
        let id = Morphism::identity(&s);
        let lp = id.linear_part();
        assert!(lp.injective() && lp.surjective());
        assert_eq!(f.then(&Morphism::identity(&c)).unwrap(), f);
    }

    #[test]
    fn class_coordinates() {
        let a = FreeCga::from_degrees(&[("x", 2), ("y", 2)]).unwrap();
        let e = Cdga::formal(a.clone());
        let h = e.cohomology(2);
        assert_eq!(h.dim(), 2);
        let p = &a.gen(0).scale(&q(3)) - &a.gen(1);
        let c = h.class_of(&a, &p).unwrap();
        assert_eq!(c.len(), 2);
        assert!(!h.is_exact(&a, &p).unwrap());
    }
}
