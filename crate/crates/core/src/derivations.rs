//! φ-derivation complexes, their homology, and evaluation subgroups.
//!
//! A φ-derivation θ of degree n from A to B lowers degree by n and satisfies
//! `θ(xy) = θ(x)φ(y) + (-1)^{n|x|} φ(x)θ(y)`; it is determined by its values
//! on generators. The boundary is `δ(θ) = d_B∘θ - (-1)^n θ∘d_A`.

use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::algebra::{FreeCga, Monomial, Polynomial};
use crate::cdga::{sparse_coords, Cdga, Morphism};
use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, subquotient_basis, Matrix, Subspace, Q};
use crate::prelude::*;

/// A derivation given by its generator values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub degree: u32,
    /// One value per source generator, in the target algebra.
    pub values: Vec<Polynomial>,
}

/// Basis symbol `(g, m)`: the derivation sending generator `g` to the
/// monomial `m` and every other generator to 0.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Symbol {
    pub generator: usize,
    pub monomial: Monomial,
}

/// The complex `Der(A, B; φ)` for a chain algebra map φ.
#[derive(Clone, Debug)]
pub struct DerivationComplex {
    phi: Morphism,
}

/// Monomial bases of `B^{|g|-n}` for each source generator `g`.
#[derive(Clone, Debug)]
pub struct DerBasis {
    pub degree: u32,
    pub per_generator: Vec<Vec<Monomial>>,
    offsets: Vec<usize>,
    dim: usize,
}

impl DerBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        self.per_generator
            .iter()
            .enumerate()
            .flat_map(|(g, ms)| {
                ms.iter().map(move |m| Symbol {
                    generator: g,
                    monomial: m.clone(),
                })
            })
            .collect()
    }

    /// Position of the symbol `(g, m)`, if it belongs to this degree.
    pub fn index_of(&self, g: usize, m: &Monomial) -> Option<usize> {
        self.per_generator[g]
            .binary_search(m)
            .ok()
            .map(|k| self.offsets[g] + k)
    }
}

/// Homology of the derivation complex in one degree.
#[derive(Clone, Debug)]
pub struct DerHomology {
    pub degree: u32,
    pub basis: DerBasis,
    pub cycles: Subspace,
    pub boundaries: Subspace,
    /// Cocycle representatives of a basis of the homology.
    pub classes: Vec<Derivation>,
}

impl DerHomology {
    pub fn dim(&self) -> usize {
        self.classes.len()
    }
}

/// A subspace of `Hom(W^n, ℚ)`, coordinates indexed by the listed generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    pub degree: u32,
    pub generators: Vec<String>,
    pub space: Subspace,
}

impl Subgroup {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn full(degree: u32, generators: Vec<String>) -> Self {
        let n = generators.len();
        Subgroup {
            degree,
            generators,
            space: Subspace::full(n),
        }
    }

    pub fn zero(degree: u32, generators: Vec<String>) -> Self {
        let n = generators.len();
        Subgroup {
            degree,
            generators,
            space: Subspace::zero(n),
        }
    }

    /// Basis functionals rendered as `w4*`, `w4* - 2*w5*`.
    pub fn basis_strings(&self) -> Vec<String> {
        self.space
            .basis()
            .iter()
            .map(|v| format_functional(&self.generators, v))
            .collect()
    }
}

/// Render a functional on generators, e.g. `w4* + 1/2*w5*`.
pub fn format_functional(generators: &[String], v: &[Q]) -> String {
    let mut s = String::new();
    for (name, c) in generators.iter().zip(v) {
        if c.is_zero() {
            continue;
        }
        let abs = c.abs();
        if s.is_empty() {
            if c.is_negative() {
                s.push('-');
            }
        } else {
            s.push_str(if c.is_negative() { " - " } else { " + " });
        }
        if !abs.is_one() {
            s.push_str(&format!("{abs}*"));
        }
        s.push_str(&format!("{name}*"));
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

impl DerivationComplex {
    pub fn new(phi: Morphism) -> Self {
        DerivationComplex { phi }
    }

    /// `Der(A, A; id)`.
    pub fn endomorphisms(a: &Cdga) -> Self {
        Self::new(Morphism::identity(a))
    }

    pub fn phi(&self) -> &Morphism {
        &self.phi
    }

    pub fn source(&self) -> &Cdga {
        self.phi.source()
    }

    pub fn target(&self) -> &Cdga {
        self.phi.target()
    }

    fn src(&self) -> &FreeCga {
        self.phi.source().algebra()
    }

    fn tgt(&self) -> &FreeCga {
        self.phi.target().algebra()
    }

    pub fn basis(&self, n: u32) -> DerBasis {
        let mut per_generator = Vec::new();
        let mut offsets = Vec::new();
        let mut dim = 0;
        for g in self.src().generators() {
            offsets.push(dim);
            let ms = if g.degree >= n {
                self.tgt().graded_basis(g.degree - n)
            } else {
                Vec::new()
            };
            dim += ms.len();
            per_generator.push(ms);
        }
        DerBasis {
            degree: n,
            per_generator,
            offsets,
            dim,
        }
    }

    pub fn zero(&self, n: u32) -> Derivation {
        Derivation {
            degree: n,
            values: vec![self.tgt().zero(); self.src().arity()],
        }
    }

    /// The basis derivation `(g, m)`.
    pub fn symbol(&self, n: u32, s: &Symbol) -> Derivation {
        let mut d = self.zero(n);
        d.values[s.generator] = Polynomial::term(self.tgt().ambient(), s.monomial.clone(), Q::one());
        d
    }

    /// Build a derivation from generator values, checking degrees.
    pub fn derivation(&self, n: u32, values: Vec<Polynomial>) -> Result<Derivation> {
        if values.len() != self.src().arity() {
            return Err(Error::contract("one value per source generator is required"));
        }
        for (i, v) in values.iter().enumerate() {
            let g = self.src().generator(i);
            if v.ambient() != self.tgt().ambient() {
                return Err(Error::contract(format!("value on {} lives in another algebra", g.name)));
            }
            if let Some(k) = self.tgt().homogeneous_degree(v)? {
                if i64::from(k) != i64::from(g.degree) - i64::from(n) {
                    return Err(Error::Degree {
                        context: format!("derivation value on {}", g.name),
                        expected: i64::from(g.degree) - i64::from(n),
                        found: i64::from(k),
                    });
                }
            }
        }
        Ok(Derivation { degree: n, values })
    }

    pub fn from_coordinates(&self, basis: &DerBasis, coords: &[Q]) -> Derivation {
        let mut d = self.zero(basis.degree);
        for (g, ms) in basis.per_generator.iter().enumerate() {
            let off = basis.offsets[g];
            d.values[g] = self.tgt().from_coordinates(&coords[off..off + ms.len()], ms);
        }
        d
    }

    pub fn coordinates(&self, basis: &DerBasis, theta: &Derivation) -> Result<Vec<Q>> {
        if theta.degree != basis.degree {
            return Err(Error::contract("derivation degree differs from basis degree"));
        }
        let mut v = vec![Q::zero(); basis.dim];
        for (g, ms) in basis.per_generator.iter().enumerate() {
            let c = self.tgt().coordinates(&theta.values[g], ms)?;
            let off = basis.offsets[g];
            v[off..off + ms.len()].clone_from_slice(&c);
        }
        Ok(v)
    }

    fn sparse_coordinates(&self, basis: &DerBasis, theta: &Derivation) -> Vec<(usize, Q)> {
        let mut out = Vec::new();
        for (g, ms) in basis.per_generator.iter().enumerate() {
            for (k, c) in sparse_coords(&theta.values[g], ms) {
                out.push((basis.offsets[g] + k, c));
            }
        }
        out
    }

    /// θ applied to an element of the source, by the Leibniz rule.
    pub fn apply(&self, theta: &Derivation, p: &Polynomial) -> Polynomial {
        self.src()
            .apply_derivation(p, self.tgt(), self.phi.images(), &theta.values, theta.degree % 2 == 1)
            .unwrap_or_else(|e| panic!("{e}"))
    }

    /// `δ(θ) = d_B∘θ - (-1)^n θ∘d_A`, a derivation of degree `n - 1`.
    pub fn delta(&self, theta: &Derivation) -> Result<Derivation> {
        let n = theta.degree;
        if n == 0 {
            return Err(Error::contract("δ is only defined on derivations of positive degree"));
        }
        let mut values = Vec::with_capacity(self.src().arity());
        for (i, v) in theta.values.iter().enumerate() {
            let mut out = self.target().d(v);
            let t = self.apply(theta, self.source().differential_of(i));
            if n % 2 == 0 {
                out = &out - &t;
            } else {
                out = &out + &t;
            }
            values.push(out);
        }
        Ok(Derivation {
            degree: n - 1,
            values,
        })
    }

    /// Matrix of `δ: Der_n → Der_{n-1}` in the symbol bases.
    pub fn delta_matrix(&self, n: u32) -> Matrix {
        let src = self.basis(n);
        let tgt = self.basis(n - 1);
        let cols: Vec<Vec<(usize, Q)>> = src
            .symbols()
            .iter()
            .map(|s| {
                let dt = self.delta(&self.symbol(n, s)).expect("positive degree");
                self.sparse_coordinates(&tgt, &dt)
            })
            .collect();
        Matrix::from_sparse_columns(tgt.dim, &cols)
    }

    /// Kernel of `δ` on `Der_n`.
    pub fn cycles(&self, n: u32) -> Subspace {
        if n == 0 {
            return Subspace::full(self.basis(0).dim);
        }
        kernel_basis(&self.delta_matrix(n))
    }

    /// Image of `δ: Der_{n+1} → Der_n`.
    pub fn boundaries(&self, n: u32) -> Subspace {
        let t = self.delta_matrix(n + 1).transpose();
        Subspace::span_sparse(t.cols(), (0..t.rows()).map(|j| t.sparse_row(j)).collect())
    }

    /// `H_n(Der(A, B; φ))` from `Der_{n+1} → Der_n → Der_{n-1}`.
    pub fn homology(&self, n: u32) -> Result<DerHomology> {
        if n == 0 {
            return Err(Error::contract("derivation homology is computed in positive degrees"));
        }
        let basis = self.basis(n);
        let cycles = self.cycles(n);
        let boundaries = self.boundaries(n);
        let (_, reps) = subquotient_basis(&cycles, &boundaries).map_err(|e| {
            Error::Inconsistent(format!("derivation complex is not a chain complex in degree {n}: {e}"))
        })?;
        let classes = reps.iter().map(|v| self.from_coordinates(&basis, v)).collect();
        Ok(DerHomology {
            degree: n,
            basis,
            cycles,
            boundaries,
            classes,
        })
    }

    /// Degree-`n` generators of the source, in declaration order.
    pub fn source_generators_of_degree(&self, n: u32) -> Vec<usize> {
        self.src().generators_of_degree(n)
    }

    /// `G_n(A, B; φ)`: restrictions of δ-cycles of `Der_n` to `(g, 1)`, `|g| = n`.
    pub fn evaluation_subgroup(&self, n: u32) -> Result<Subgroup> {
        if n == 0 {
            return Err(Error::contract("evaluation subgroups are defined in positive degrees"));
        }
        self.source().require_minimal("evaluation subgroup source")?;
        let gens = self.source_generators_of_degree(n);
        let basis = self.basis(n);
        let one = Monomial::one(self.tgt().arity());
        let coords: Vec<usize> = gens
            .iter()
            .map(|&g| basis.index_of(g, &one).expect("(g,1) is a basis symbol"))
            .collect();
        let space = self.cycles(n).project(&coords);
        Ok(Subgroup {
            degree: n,
            generators: gens.iter().map(|&g| self.src().generator(g).name.clone()).collect(),
            space,
        })
    }

    /// Render in symbol notation, e.g. `(w4, 1) + 2*(w7, v3)`.
    pub fn format(&self, theta: &Derivation) -> String {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (g, v) in theta.values.iter().enumerate() {
            let name = &self.src().generator(g).name;
            for (m, c) in v.terms().collect::<Vec<_>>().into_iter().rev() {
                let sym = format!("({name}, {})", self.tgt().format_monomial(m));
                let abs = c.abs();
                let body = if abs.is_one() { sym } else { format!("{abs}*{sym}") };
                parts.push((c.is_negative(), body));
            }
        }
        if parts.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (neg, body)) in parts.into_iter().enumerate() {
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            s.push_str(&body);
        }
        s
    }

    pub fn show<'a>(&'a self, theta: &'a Derivation) -> impl fmt::Display + 'a {
        Shown(self, theta)
    }
}

struct Shown<'a>(&'a DerivationComplex, &'a Derivation);

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.format(self.1))
    }
}

/// `G_n(A) = G_n(A, A; id)`.
pub fn gottlieb_group(a: &Cdga, n: u32) -> Result<Subgroup> {
    DerivationComplex::endomorphisms(a).evaluation_subgroup(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    fn sphere(n: u32) -> Cdga {
        if n % 2 == 1 {
            Cdga::formal(FreeCga::from_degrees(&[(&format!("w{n}"), n)]).unwrap())
        } else {
            let a = FreeCga::from_degrees(&[(&format!("w{n}"), n), (&format!("w{}", 2 * n - 1), 2 * n - 1)]).unwrap();
            let sq = a.pow(&a.gen(0), 2);
            let d = vec![a.zero(), sq];
            Cdga::new(a, d).unwrap()
        }
    }

    fn cp2() -> Cdga {
        let a = FreeCga::from_degrees(&[("v2", 2), ("v5", 5)]).unwrap();
        let v = a.pow(&a.gen(0), 3);
        Cdga::from_named(a, &[("v5", v)]).unwrap()
    }

    #[test]
    fn bases() {
        let s3s3 = Cdga::formal(FreeCga::from_degrees(&[("u3", 3), ("v3", 3)]).unwrap());
        assert_eq!(DerivationComplex::endomorphisms(&s3s3).basis(5).dim(), 0);
        let c = DerivationComplex::endomorphisms(&cp2());
        let b = c.basis(3);
        assert_eq!(b.dim(), 1);
        assert_eq!(c.format(&c.symbol(3, &b.symbols()[0])), "(v5, v2)");
    }

    #[test]
    fn homology_examples() {
        let c = DerivationComplex::endomorphisms(&cp2());
        let h = c.homology(3).unwrap();
        assert_eq!(h.dim(), 1);
        assert_eq!(c.format(&h.classes[0]), "(v5, v2)");
        let s = Cdga::formal(FreeCga::from_degrees(&[("xb", 1), ("yb", 2)]).unwrap());
        let h = DerivationComplex::endomorphisms(&s).homology(1).unwrap();
        assert_eq!(h.dim(), 2);
    }

    #[test]
    fn gottlieb_dichotomy() {
        for n in [3u32, 5, 7] {
            assert_eq!(gottlieb_group(&sphere(n), n).unwrap().dim(), 1);
        }
        for n in [2u32, 4] {
            let s = sphere(n);
            assert_eq!(gottlieb_group(&s, n).unwrap().dim(), 0);
            assert_eq!(gottlieb_group(&s, 2 * n - 1).unwrap().dim(), 1);
        }
    }

    #[test]
    fn delta_even_sphere() {
        let s = sphere(4);
        let c = DerivationComplex::endomorphisms(&s);
        let b = c.basis(4);
        let sym = b.symbols().into_iter().find(|s| s.generator == 0).unwrap();
        let d = c.delta(&c.symbol(4, &sym)).unwrap();
        assert_eq!(c.format(&d), "-2*(w7, w4)");
        assert_eq!(c.delta(&d).unwrap(), c.zero(2));
        let _ = q(0);
    }
}
