//! Free graded-commutative algebras over ℚ.
//!
//! A [`FreeCga`] is an ordered list of generators. Odd generators are exterior;
//! an even generator may carry a square-zero cap, giving ℚ[x]/(x²). Monomials
//! are exponent vectors in declaration order, so the monomial `g₀^e₀ g₁^e₁ …`
//! is the canonical representative of every word in its generators. Koszul
//! signs only arise when odd generators are moved past each other.

use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::Q;
use crate::prelude::*;

/// Exponent cap of a generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Truncation {
    None,
    /// `g² = 0`.
    Square,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
    /// Declared cap. Odd generators behave as `Square` whatever is declared.
    pub cap: Truncation,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: u32) -> Self {
        Generator {
            name: name.into(),
            degree,
            cap: Truncation::None,
        }
    }

    pub fn truncated(name: impl Into<String>, degree: u32) -> Self {
        Generator {
            name: name.into(),
            degree,
            cap: Truncation::Square,
        }
    }

    pub fn is_odd(&self) -> bool {
        self.degree % 2 == 1
    }

    /// Largest exponent allowed in a nonzero monomial.
    pub fn max_exponent(&self) -> Option<u32> {
        if self.is_odd() || self.cap == Truncation::Square {
            Some(1)
        } else {
            None
        }
    }

    /// True when `g² = 0` holds in the algebra.
    pub fn squares_to_zero(&self) -> bool {
        self.max_exponent() == Some(1)
    }
}

/// Exponent vector in declaration order of the ambient generators.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    pub fn generator(arity: usize, i: usize) -> Self {
        let mut e = vec![0; arity];
        e[i] = 1;
        Monomial(e)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// Word length `Σ eᵢ`.
    pub fn length(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Generator indices in canonical order, with repetition.
    pub fn word(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &e)| core::iter::repeat_n(i, e as usize))
            .collect()
    }
}

/// Identity of the algebra a polynomial lives in: its generator count and a
/// fingerprint of the generator list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ambient {
    arity: usize,
    id: u64,
}

impl Ambient {
    pub fn arity(&self) -> usize {
        self.arity
    }
}

/// A finite ℚ-linear combination of monomials of one ambient algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    ambient: Ambient,
    terms: BTreeMap<Monomial, Q>,
}

impl Polynomial {
    pub fn zero(ambient: Ambient) -> Self {
        Polynomial {
            ambient,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ambient: Ambient, c: Q) -> Self {
        Self::term(ambient, Monomial::one(ambient.arity), c)
    }

    pub fn term(ambient: Ambient, m: Monomial, c: Q) -> Self {
        let mut p = Polynomial::zero(ambient);
        p.add_term(m, c);
        p
    }

    pub fn from_terms(ambient: Ambient, terms: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut p = Polynomial::zero(ambient);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn arity(&self) -> usize {
        self.ambient.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&Monomial::one(self.ambient.arity))
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        assert_eq!(m.arity(), self.ambient.arity, "monomial from a different algebra");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Polynomial, c: &Q) {
        assert_eq!(self.ambient, other.ambient, "polynomials from different algebras");
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn scale(&self, c: &Q) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.ambient);
        }
        Polynomial {
            ambient: self.ambient,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Keep only the terms satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Monomial) -> bool) -> Polynomial {
        Polynomial {
            ambient: self.ambient,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, v)| (m.clone(), v.clone()))
                .collect(),
        }
    }
}

impl core::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &Q::one());
        out
    }
}

impl core::ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &-Q::one());
        out
    }
}

impl core::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Q::one())
    }
}

/// Free graded-commutative algebra on an ordered generator list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreeCga {
    gens: Vec<Generator>,
    ambient: Ambient,
}

impl FreeCga {
    pub fn new(gens: Vec<Generator>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for g in &gens {
            if g.degree == 0 {
                return Err(Error::Degree {
                    context: format!("generator {}", g.name),
                    expected: 1,
                    found: 0,
                });
            }
            if g.name.is_empty() {
                return Err(Error::contract("empty generator name"));
            }
            if !seen.insert(g.name.as_str()) {
                return Err(Error::contract(format!("duplicate generator name `{}`", g.name)));
            }
        }
        let ambient = Ambient {
            arity: gens.len(),
            id: fingerprint(&gens),
        };
        Ok(FreeCga { gens, ambient })
    }

    /// Generators `names[i]` of degree `degrees[i]`, no caps.
    pub fn from_degrees(spec: &[(&str, u32)]) -> Result<Self> {
        Self::new(spec.iter().map(|&(n, d)| Generator::new(n, d)).collect())
    }

    /// `A ⊗ B` with the generators of `a` first.
    pub fn concat(a: &FreeCga, b: &FreeCga) -> Result<Self> {
        let mut gens = a.gens.clone();
        gens.extend(b.gens.iter().cloned());
        Self::new(gens)
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn arity(&self) -> usize {
        self.gens.len()
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn generator(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.gens
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn degree_of(&self, i: usize) -> u32 {
        self.gens[i].degree
    }

    /// Indices of generators of the given degree.
    pub fn generators_of_degree(&self, k: u32) -> Vec<usize> {
        (0..self.arity()).filter(|&i| self.gens[i].degree == k).collect()
    }

    pub fn max_generator_degree(&self) -> u32 {
        self.gens.iter().map(|g| g.degree).max().unwrap_or(0)
    }

    pub fn zero(&self) -> Polynomial {
        Polynomial::zero(self.ambient)
    }

    pub fn one(&self) -> Polynomial {
        Polynomial::constant(self.ambient, Q::one())
    }

    pub fn constant(&self, c: Q) -> Polynomial {
        Polynomial::constant(self.ambient, c)
    }

    pub fn gen(&self, i: usize) -> Polynomial {
        Polynomial::term(self.ambient, Monomial::generator(self.arity(), i), Q::one())
    }

    pub fn gen_named(&self, name: &str) -> Result<Polynomial> {
        Ok(self.gen(self.index_of(name)?))
    }

    pub fn monomial_degree(&self, m: &Monomial) -> u32 {
        m.0.iter().zip(&self.gens).map(|(e, g)| e * g.degree).sum()
    }

    /// True when every exponent respects its cap.
    pub fn is_admissible(&self, m: &Monomial) -> bool {
        m.arity() == self.arity()
            && m.0
                .iter()
                .zip(&self.gens)
                .all(|(&e, g)| g.max_exponent().is_none_or(|c| e <= c))
    }

    fn check(&self, p: &Polynomial) -> Result<()> {
        if p.ambient() != self.ambient {
            return Err(Error::contract(
                "polynomial belongs to a different algebra".to_string(),
            ));
        }
        Ok(())
    }

    /// Degree of a homogeneous polynomial; `None` for zero.
    pub fn homogeneous_degree(&self, p: &Polynomial) -> Result<Option<u32>> {
        self.check(p)?;
        let mut deg = None;
        for m in p.terms.keys() {
            let d = self.monomial_degree(m);
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => {
                    return Err(Error::contract(format!(
                        "non-homogeneous polynomial {} (degrees {e} and {d})",
                        self.format(p)
                    )))
                }
                _ => {}
            }
        }
        Ok(deg)
    }

    /// Sort a word of generator indices into canonical order.
    ///
    /// Returns `None` when the product vanishes (repeated odd or capped
    /// generator) and the Koszul sign otherwise.
    pub fn normalize_word(&self, word: &[usize]) -> Result<Option<(i8, Monomial)>> {
        if let Some(&bad) = word.iter().find(|&&i| i >= self.arity()) {
            return Err(Error::contract(format!("generator index {bad} is foreign to this algebra")));
        }
        let mut exps = vec![0u32; self.arity()];
        let mut odd_inversions = 0usize;
        for (pos, &i) in word.iter().enumerate() {
            exps[i] += 1;
            if self.gens[i].is_odd() {
                odd_inversions += word[..pos]
                    .iter()
                    .filter(|&&j| j > i && self.gens[j].is_odd())
                    .count();
            }
        }
        let m = Monomial(exps);
        if !self.is_admissible(&m) {
            return Ok(None);
        }
        Ok(Some((if odd_inversions % 2 == 0 { 1 } else { -1 }, m)))
    }

    /// Word of generator names, normalised.
    pub fn normalize_named(&self, word: &[&str]) -> Result<Option<(i8, Monomial)>> {
        let idx: Vec<usize> = word
            .iter()
            .map(|n| self.index_of(n))
            .collect::<Result<_>>()?;
        self.normalize_word(&idx)
    }

    /// Product of canonical monomials with its Koszul sign, or `None` if it vanishes.
    pub fn mul_monomials(&self, a: &Monomial, b: &Monomial) -> Option<(bool, Monomial)> {
        let mut sign_negative = false;
        let mut exps = Vec::with_capacity(self.arity());
        // moving each odd generator of b left past the odd generators of a with larger index
        let mut odd_in_a_after = 0u32;
        for i in (0..self.arity()).rev() {
            let g = &self.gens[i];
            if g.is_odd() && b.0[i] == 1 && odd_in_a_after % 2 == 1 {
                sign_negative = !sign_negative;
            }
            if g.is_odd() {
                odd_in_a_after += a.0[i];
            }
        }
        for i in 0..self.arity() {
            let e = a.0[i] + b.0[i];
            if self.gens[i].max_exponent().is_some_and(|c| e > c) {
                return None;
            }
            exps.push(e);
        }
        Some((sign_negative, Monomial(exps)))
    }

    pub fn try_mul(&self, p: &Polynomial, q: &Polynomial) -> Result<Polynomial> {
        self.check(p)?;
        self.check(q)?;
        let mut out = self.zero();
        for (a, ca) in &p.terms {
            for (b, cb) in &q.terms {
                if let Some((neg, m)) = self.mul_monomials(a, b) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    /// Graded-commutative product. Panics on polynomials from another algebra.
    pub fn mul(&self, p: &Polynomial, q: &Polynomial) -> Polynomial {
        self.try_mul(p, q).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn pow(&self, p: &Polynomial, k: u32) -> Polynomial {
        let mut out = self.one();
        for _ in 0..k {
            out = self.mul(&out, p);
        }
        out
    }

    pub fn product(&self, factors: &[Polynomial]) -> Polynomial {
        factors.iter().fold(self.one(), |acc, f| self.mul(&acc, f))
    }

    /// All admissible monomials of degree exactly `k`, in canonical order.
    pub fn graded_basis(&self, k: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut exps = vec![0u32; self.arity()];
        self.enumerate(0, k, &mut exps, &mut out);
        out.sort();
        out
    }

    fn enumerate(&self, i: usize, remaining: u32, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == self.arity() {
            if remaining == 0 {
                out.push(Monomial(exps.clone()));
            }
            return;
        }
        let d = self.gens[i].degree;
        let max = remaining / d;
        let max = self.gens[i].max_exponent().map_or(max, |c| max.min(c));
        for e in 0..=max {
            exps[i] = e;
            self.enumerate(i + 1, remaining - e * d, exps, out);
        }
        exps[i] = 0;
    }

    /// Coordinates of `p` in `basis`; fails if `p` has a term outside it.
    pub fn coordinates(&self, p: &Polynomial, basis: &[Monomial]) -> Result<Vec<Q>> {
        self.check(p)?;
        let mut v = vec![Q::zero(); basis.len()];
        for (m, c) in &p.terms {
            let k = basis
                .binary_search(m)
                .map_err(|_| Error::contract(format!("monomial {} outside the basis", self.format_monomial(m))))?;
            v[k] = c.clone();
        }
        Ok(v)
    }

    pub fn from_coordinates(&self, coords: &[Q], basis: &[Monomial]) -> Polynomial {
        Polynomial::from_terms(
            self.ambient,
            basis.iter().cloned().zip(coords.iter().cloned()),
        )
    }

    /// Split a homogeneous polynomial into its generator-linear part and the rest.
    ///
    /// The rest lies in the square of the augmentation ideal unless `p` has degree 0.
    pub fn linear_decomposable_split(&self, p: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        self.homogeneous_degree(p)?;
        let linear = p.filter(|m| m.length() == 1);
        let rest = p.filter(|m| m.length() != 1);
        Ok((linear, rest))
    }

    /// Image of `p` under the algebra map sending generator `i` to `images[i]`,
    /// computed in `target`.
    pub fn substitute(&self, p: &Polynomial, target: &FreeCga, images: &[Polynomial]) -> Result<Polynomial> {
        self.check(p)?;
        if images.len() != self.arity() {
            return Err(Error::contract("substitution needs one image per generator"));
        }
        let mut out = target.zero();
        for (m, c) in &p.terms {
            let mut acc = target.one();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    acc = target.try_mul(&acc, &images[i])?;
                }
                if acc.is_zero() {
                    break;
                }
            }
            out.add_assign_scaled(&acc, c);
        }
        Ok(out)
    }

    /// Move `p` along an order-preserving inclusion of generator lists.
    pub fn embed(&self, p: &Polynomial, target: &FreeCga, positions: &[usize]) -> Polynomial {
        assert_eq!(positions.len(), self.arity(), "embedding needs one position per generator");
        debug_assert!(positions.windows(2).all(|w| w[0] < w[1]), "embedding must preserve order");
        Polynomial::from_terms(
            target.ambient,
            p.terms.iter().map(|(m, c)| {
                let mut e = vec![0; target.arity()];
                for (i, &x) in m.0.iter().enumerate() {
                    e[positions[i]] = x;
                }
                (Monomial(e), c.clone())
            }),
        )
    }

    /// Apply the φ-derivation with generator values `values` to `p`.
    ///
    /// `self` is the source algebra; `phi` and `values` live in `target`. On a
    /// word `x₁…x_k` the result is
    /// `Σᵢ ± φ(x₁)…φ(x_{i-1}) θ(xᵢ) φ(x_{i+1})…φ(x_k)` with sign
    /// `(-1)^{|x₁|+…+|x_{i-1}|}` when the derivation has odd degree.
    pub fn apply_derivation(
        &self,
        p: &Polynomial,
        target: &FreeCga,
        phi: &[Polynomial],
        values: &[Polynomial],
        odd: bool,
    ) -> Result<Polynomial> {
        self.check(p)?;
        if phi.len() != self.arity() || values.len() != self.arity() {
            return Err(Error::contract("derivation needs one image and one value per generator"));
        }
        let mut out = target.zero();
        for (m, c) in &p.terms {
            let word = m.word();
            let k = word.len();
            let mut suffix = vec![target.one(); k + 1];
            for i in (0..k).rev() {
                suffix[i] = target.try_mul(&phi[word[i]], &suffix[i + 1])?;
            }
            let mut prefix = target.one();
            let mut prefix_degree = 0u32;
            for i in 0..k {
                let g = word[i];
                if !values[g].is_zero() {
                    let t = target.try_mul(&target.try_mul(&prefix, &values[g])?, &suffix[i + 1])?;
                    let negative = odd && prefix_degree % 2 == 1;
                    out.add_assign_scaled(&t, &if negative { -c.clone() } else { c.clone() });
                }
                prefix = target.try_mul(&prefix, &phi[g])?;
                prefix_degree += self.gens[g].degree;
            }
        }
        Ok(out)
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (i, &e) in m.0.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(self.gens[i].name.clone()),
                _ => parts.push(format!("{}^{e}", self.gens[i].name)),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    /// Render `p` in the input syntax, e.g. `v2^2 + 2*w4*x - 1/2*u3*v3`.
    pub fn format(&self, p: &Polynomial) -> String {
        if p.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        // highest monomial first reads naturally: `v2^4 + 2*v2^2*x`
        for (k, (m, c)) in p.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                s.push_str(&abs.to_string());
            } else if abs.is_one() {
                s.push_str(&self.format_monomial(m));
            } else {
                s.push_str(&format!("{abs}*{}", self.format_monomial(m)));
            }
        }
        s
    }

    /// Display adaptor for a polynomial of this algebra.
    pub fn show<'a>(&'a self, p: &'a Polynomial) -> impl fmt::Display + 'a {
        Shown(self, p)
    }
}

fn fingerprint(gens: &[Generator]) -> u64 {
    // FNV-1a over names, degrees and caps
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |bytes: &[u8]| {
        for &b in bytes {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    };
    for g in gens {
        feed(g.name.as_bytes());
        feed(&[0xff]);
        feed(&g.degree.to_le_bytes());
        feed(&[g.squares_to_zero() as u8]);
    }
    h
}

struct Shown<'a>(&'a FreeCga, &'a Polynomial);

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.format(self.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    fn alg(spec: &[(&str, u32)]) -> FreeCga {
        FreeCga::from_degrees(spec).unwrap()
    }

    #[test]
    fn odd_swap_sign() {
        let a = alg(&[("u3", 3), ("v3", 3)]);
        let (s, m) = a.normalize_named(&["v3", "u3"]).unwrap().unwrap();
        assert_eq!(s, -1);
        assert_eq!(m, Monomial(vec![1, 1]));
        assert_eq!(a.normalize_named(&["v3", "v3"]).unwrap(), None);
    }

    #[test]
    fn square_zero_cap() {
        let a = FreeCga::new(vec![Generator::truncated("x", 4)]).unwrap();
        assert_eq!(a.normalize_named(&["x", "x"]).unwrap(), None);
        assert!(a.normalize_word(&[3]).is_err());
    }

    #[test]
    fn products() {
        let a = alg(&[("u3", 3), ("v3", 3)]);
        let uv = a.mul(&a.gen(0), &a.gen(1));
        assert!(a.mul(&uv, &uv).is_zero());
        assert_eq!(a.mul(&a.one(), &uv), uv);
        let vu = a.mul(&a.gen(1), &a.gen(0));
        assert_eq!(vu, -&uv);

        let b = FreeCga::new(vec![Generator::new("w4", 4), Generator::truncated("x", 4)]).unwrap();
        let c = q(3);
        let f = &b.gen(0) + &b.gen(1).scale(&c);
        let sq = b.mul(&f, &f);
        let expected = &b.pow(&b.gen(0), 2) + &b.mul(&b.gen(0), &b.gen(1)).scale(&q(6));
        assert_eq!(sq, expected);
        assert!(b.try_mul(&f, &a.gen(0)).is_err());
    }

    #[test]
    fn bases() {
        let a = alg(&[("w4", 4), ("w7", 7), ("v3", 3)]);
        let b = a.graded_basis(7);
        assert_eq!(b.len(), 2);
        assert_eq!(a.format_monomial(&b[0]), "w7");
        assert_eq!(a.format_monomial(&b[1]), "w4*v3");
        let c = alg(&[("v2", 2), ("v5", 5)]);
        assert_eq!(c.graded_basis(6), vec![Monomial(vec![3, 0])]);
        let d = alg(&[("xb", 1), ("yb", 2)]);
        assert_eq!(d.graded_basis(2), vec![Monomial(vec![0, 1])]);
        assert_eq!(d.graded_basis(0), vec![Monomial(vec![0, 0])]);
    }

    #[test]
    fn splits() {
        let a = alg(&[("w1", 2), ("w2", 2), ("v", 3), ("w4", 4), ("v2", 2)]);
        let w1w2 = a.mul(&a.gen(0), &a.gen(1));
        assert_eq!(a.linear_decomposable_split(&w1w2).unwrap(), (a.zero(), w1w2.clone()));
        let w4 = a.gen(3);
        assert_eq!(a.linear_decomposable_split(&w4).unwrap(), (w4.clone(), a.zero()));
        let p = &a.pow(&a.gen(4), 2) - &w4;
        assert_eq!(a.linear_decomposable_split(&p).unwrap(), (-&w4, a.pow(&a.gen(4), 2)));
        assert!(a.linear_decomposable_split(&(&w4 + &a.gen(2))).is_err());
    }

    #[test]
    fn formatting() {
        let a = alg(&[("v2", 2), ("x", 4)]);
        let p = &a.pow(&a.gen(0), 2) - &a.mul(&a.gen(0), &a.gen(1)).scale(&crate::linalg::q_frac(1, 2));
        assert_eq!(a.format(&p), "v2^2 - 1/2*v2*x");
        assert_eq!(a.format(&a.zero()), "0");
        assert_eq!(a.format(&a.constant(q(-2))), "-2");
    }
}
