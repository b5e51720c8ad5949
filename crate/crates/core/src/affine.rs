//! Polynomials whose coefficients are affine functions of unknowns.
//!
//! A [`LinearFamily`] is `p₀ + Σ zₖ pₖ` with fixed polynomials `pₖ` and
//! rational unknowns `zₖ`. Products are allowed only when every product of two
//! unknown-dependent parts vanishes in the algebra, which is what happens over
//! a sphere base where all unknowns multiply the square-zero class `x`.

use num_traits::{One, Zero};

use crate::algebra::{Ambient, FreeCga, Monomial, Polynomial};
use crate::error::{Error, Result};
use crate::linalg::Q;
use crate::prelude::*;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearFamily {
    pub constant: Polynomial,
    /// Unknown index → coefficient polynomial; zero coefficients are not stored.
    pub coeffs: BTreeMap<usize, Polynomial>,
}

/// One scalar equation `Σ aₖ zₖ = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearEquation {
    pub coeffs: BTreeMap<usize, Q>,
    pub rhs: Q,
}

impl LinearFamily {
    pub fn zero(ambient: Ambient) -> Self {
        Self::fixed(Polynomial::zero(ambient))
    }

    pub fn fixed(p: Polynomial) -> Self {
        LinearFamily {
            constant: p,
            coeffs: BTreeMap::new(),
        }
    }

    /// `z_k · p`.
    pub fn unknown(ambient: Ambient, k: usize, p: Polynomial) -> Self {
        let mut f = Self::zero(ambient);
        if !p.is_zero() {
            f.coeffs.insert(k, p);
        }
        f
    }

    pub fn ambient(&self) -> Ambient {
        self.constant.ambient()
    }

    pub fn is_fixed(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.is_empty()
    }

    pub fn unknowns(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn coeff(&self, k: usize) -> Polynomial {
        self.coeffs
            .get(&k)
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(self.ambient()))
    }

    pub fn add_assign_scaled(&mut self, other: &LinearFamily, c: &Q) {
        self.constant.add_assign_scaled(&other.constant, c);
        for (k, p) in &other.coeffs {
            let e = self
                .coeffs
                .entry(*k)
                .or_insert_with(|| Polynomial::zero(p.ambient()));
            e.add_assign_scaled(p, c);
        }
        self.coeffs.retain(|_, p| !p.is_zero());
    }

    pub fn add_poly(&mut self, p: &Polynomial, c: &Q) {
        self.constant.add_assign_scaled(p, c);
    }

    pub fn add_unknown_term(&mut self, k: usize, p: &Polynomial, c: &Q) {
        let e = self
            .coeffs
            .entry(k)
            .or_insert_with(|| Polynomial::zero(p.ambient()));
        e.add_assign_scaled(p, c);
        if e.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::zero(self.ambient());
        out.add_assign_scaled(self, c);
        out
    }

    pub fn plus(&self, other: &LinearFamily) -> Self {
        let mut out = self.clone();
        out.add_assign_scaled(other, &Q::one());
        out
    }

    pub fn minus(&self, other: &LinearFamily) -> Self {
        let mut out = self.clone();
        out.add_assign_scaled(other, &-Q::one());
        out
    }

    /// Value at an assignment; unknowns missing from `values` count as 0.
    pub fn instantiate(&self, values: &BTreeMap<usize, Q>) -> Polynomial {
        let mut p = self.constant.clone();
        for (k, c) in &self.coeffs {
            if let Some(v) = values.get(k) {
                p.add_assign_scaled(c, v);
            }
        }
        p
    }

    /// Rename unknowns by `map`; unknowns not in `map` are kept.
    pub fn relabel(&self, map: &BTreeMap<usize, usize>) -> Self {
        let mut out = Self::fixed(self.constant.clone());
        for (k, p) in &self.coeffs {
            out.add_unknown_term(*map.get(k).unwrap_or(k), p, &Q::one());
        }
        out
    }

    /// Substitute affine expressions for unknowns: `z_k ↦ Σ` as given.
    pub fn substitute_unknowns(&self, subst: &BTreeMap<usize, (Q, BTreeMap<usize, Q>)>) -> Self {
        let mut out = Self::fixed(self.constant.clone());
        for (k, p) in &self.coeffs {
            match subst.get(k) {
                None => out.add_unknown_term(*k, p, &Q::one()),
                Some((c0, lin)) => {
                    out.add_poly(p, c0);
                    for (j, a) in lin {
                        out.add_unknown_term(*j, p, a);
                    }
                }
            }
        }
        out
    }

    /// One equation per monomial of `self = 0`.
    pub fn equations(&self) -> Vec<LinearEquation> {
        let mut by_mono: BTreeMap<Monomial, LinearEquation> = BTreeMap::new();
        let blank = || LinearEquation {
            coeffs: BTreeMap::new(),
            rhs: Q::zero(),
        };
        for (m, c) in self.constant.terms() {
            by_mono.entry(m.clone()).or_insert_with(blank).rhs = -c.clone();
        }
        for (k, p) in &self.coeffs {
            for (m, c) in p.terms() {
                by_mono
                    .entry(m.clone())
                    .or_insert_with(blank)
                    .coeffs
                    .insert(*k, c.clone());
            }
        }
        by_mono.into_values().collect()
    }

    pub fn format(&self, alg: &FreeCga, names: &dyn Fn(usize) -> String) -> String {
        // one term per (monomial, unknown) pair, highest monomial first
        let mut terms: BTreeMap<Monomial, Vec<(Option<usize>, Q)>> = BTreeMap::new();
        for (m, c) in self.constant.terms() {
            terms.entry(m.clone()).or_default().push((None, c.clone()));
        }
        for (k, p) in &self.coeffs {
            for (m, c) in p.terms() {
                terms.entry(m.clone()).or_default().push((Some(*k), c.clone()));
            }
        }
        if terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (m, list) in terms.iter().rev() {
            for (k, c) in list {
                let neg = c < &Q::zero();
                let abs = if neg { -c.clone() } else { c.clone() };
                if s.is_empty() {
                    if neg {
                        s.push('-');
                    }
                } else {
                    s.push_str(if neg { " - " } else { " + " });
                }
                let mut factors: Vec<String> = Vec::new();
                if !abs.is_one() || (k.is_none() && m.is_one()) {
                    factors.push(abs.to_string());
                }
                if let Some(k) = k {
                    factors.push(names(*k));
                }
                if !m.is_one() {
                    factors.push(alg.format_monomial(m));
                }
                s.push_str(&factors.join("*"));
            }
        }
        s
    }
}

/// A scalar `c₀ + Σ cₖ zₖ`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Affine {
    pub constant: Q,
    pub coeffs: BTreeMap<usize, Q>,
}

impl Affine {
    pub fn constant(c: Q) -> Self {
        Affine {
            constant: c,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn unknown(k: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(k, Q::one());
        Affine {
            constant: Q::zero(),
            coeffs,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_scaled(&mut self, other: &Affine, c: &Q) {
        self.constant += &other.constant * c;
        for (k, v) in &other.coeffs {
            *self.coeffs.entry(*k).or_insert_with(Q::zero) += v * c;
        }
        self.coeffs.retain(|_, v| !v.is_zero());
    }

    pub fn eval(&self, values: &BTreeMap<usize, Q>) -> Q {
        let mut out = self.constant.clone();
        for (k, c) in &self.coeffs {
            if let Some(v) = values.get(k) {
                out += c * v;
            }
        }
        out
    }

    /// `self · p` as a family.
    pub fn times(&self, p: &Polynomial) -> LinearFamily {
        let mut f = LinearFamily::fixed(p.scale(&self.constant));
        for (k, c) in &self.coeffs {
            f.add_unknown_term(*k, p, c);
        }
        f
    }

    pub fn format(&self, names: &dyn Fn(usize) -> String) -> String {
        let mut s = String::new();
        let mut push = |c: &Q, name: Option<String>| {
            let neg = c < &Q::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            match name {
                None => s.push_str(&abs.to_string()),
                Some(n) if abs.is_one() => s.push_str(&n),
                Some(n) => s.push_str(&format!("{abs}*{n}")),
            }
        };
        if !self.constant.is_zero() {
            push(&self.constant, None);
        }
        for (k, c) in &self.coeffs {
            push(c, Some(names(*k)));
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

impl LinearFamily {
    /// The coefficient of `m` as an affine scalar.
    pub fn coefficient(&self, m: &Monomial) -> Affine {
        Affine {
            constant: self.constant.coeff(m),
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, p)| (*k, p.coeff(m)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// Apply a map of polynomials to the constant and every coefficient.
    pub fn map_polys(&self, mut f: impl FnMut(&Polynomial) -> Polynomial) -> LinearFamily {
        let mut out = LinearFamily::fixed(f(&self.constant));
        for (k, p) in &self.coeffs {
            out.add_unknown_term(*k, &f(p), &Q::one());
        }
        out
    }

    /// Substitute values for some unknowns, keeping the others.
    pub fn partial_instantiate(&self, values: &BTreeMap<usize, Q>) -> LinearFamily {
        let mut out = LinearFamily::fixed(self.constant.clone());
        for (k, p) in &self.coeffs {
            match values.get(k) {
                Some(v) => out.add_poly(p, v),
                None => out.add_unknown_term(*k, p, &Q::one()),
            }
        }
        out
    }

    /// Replace every unknown by an affine expression in other unknowns.
    pub fn compose(&self, subst: &BTreeMap<usize, Affine>) -> LinearFamily {
        let mut out = LinearFamily::fixed(self.constant.clone());
        for (k, p) in &self.coeffs {
            match subst.get(k) {
                None => out.add_unknown_term(*k, p, &Q::one()),
                Some(a) => out.add_assign_scaled(&a.times(p), &Q::one()),
            }
        }
        out
    }
}

/// Generators that divide every monomial of every unknown coefficient and
/// square to zero; a product of two such families has no quadratic part.
fn nilpotent_factors(alg: &FreeCga, f: &LinearFamily) -> Option<BTreeSet<usize>> {
    let mut common: Option<BTreeSet<usize>> = None;
    for p in f.coeffs.values() {
        for (m, _) in p.terms() {
            let here: BTreeSet<usize> = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(i, e)| **e > 0 && alg.generator(*i).squares_to_zero())
                .map(|(i, _)| i)
                .collect();
            common = Some(match common {
                None => here,
                Some(c) => c.intersection(&here).copied().collect(),
            });
        }
    }
    common
}

/// Product of two families; fails if a quadratic term in the unknowns survives.
pub fn mul(alg: &FreeCga, a: &LinearFamily, b: &LinearFamily) -> Result<LinearFamily> {
    let mut out = LinearFamily::fixed(alg.try_mul(&a.constant, &b.constant)?);
    for (k, p) in &a.coeffs {
        out.add_unknown_term(*k, &alg.try_mul(p, &b.constant)?, &Q::one());
    }
    for (k, p) in &b.coeffs {
        out.add_unknown_term(*k, &alg.try_mul(&a.constant, p)?, &Q::one());
    }
    if !a.coeffs.is_empty() && !b.coeffs.is_empty() {
        let shared = match (nilpotent_factors(alg, a), nilpotent_factors(alg, b)) {
            (Some(x), Some(y)) => x.intersection(&y).next().is_some(),
            _ => false,
        };
        if !shared {
            for (i, p) in &a.coeffs {
                for (j, r) in &b.coeffs {
                    let prod = alg.try_mul(p, r)?;
                    if !prod.is_zero() {
                        return Err(Error::Nonlinear(format!(
                            "unknowns {i} and {j} multiply to {}",
                            alg.format(&prod)
                        )));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Image of a fixed polynomial under the algebra map with family-valued
/// generator images.
pub fn substitute(
    source: &FreeCga,
    p: &Polynomial,
    target: &FreeCga,
    images: &[LinearFamily],
) -> Result<LinearFamily> {
    if p.ambient() != source.ambient() || images.len() != source.arity() {
        return Err(Error::contract("substitution data does not match the source algebra"));
    }
    let mut out = LinearFamily::zero(target.ambient());
    for (m, c) in p.terms() {
        let mut acc = LinearFamily::fixed(target.one());
        for (i, &e) in m.exponents().iter().enumerate() {
            for _ in 0..e {
                acc = mul(target, &acc, &images[i])?;
            }
        }
        out.add_assign_scaled(&acc, c);
    }
    Ok(out)
}

/// Image of a family under an algebra map with family-valued images. Each
/// unknown coefficient must map to a fixed polynomial.
pub fn map_family(
    source: &FreeCga,
    fam: &LinearFamily,
    target: &FreeCga,
    images: &[LinearFamily],
) -> Result<LinearFamily> {
    let mut out = substitute(source, &fam.constant, target, images)?;
    for (k, p) in &fam.coeffs {
        let s = substitute(source, p, target, images)?;
        if !s.is_fixed() {
            return Err(Error::Nonlinear(format!(
                "unknown {k} multiplies an unknown-dependent image"
            )));
        }
        out.add_unknown_term(*k, &s.constant, &Q::one());
    }
    Ok(out)
}

/// Apply a derivation of `alg` (φ = id) whose generator values are families
/// to a family; `odd` gives the parity of the derivation.
pub fn apply_derivation(
    alg: &FreeCga,
    values: &[LinearFamily],
    odd: bool,
    p: &LinearFamily,
) -> Result<LinearFamily> {
    let ids: Vec<Polynomial> = (0..alg.arity()).map(|i| alg.gen(i)).collect();
    let split = |k: Option<usize>| -> Vec<Polynomial> {
        values
            .iter()
            .map(|v| match k {
                None => v.constant.clone(),
                Some(k) => v.coeff(k),
            })
            .collect()
    };
    let value_unknowns: BTreeSet<usize> = values.iter().flat_map(|v| v.unknowns()).collect();
    let mut out = LinearFamily::zero(alg.ambient());
    let v0 = split(None);
    out.add_poly(&alg.apply_derivation(&p.constant, alg, &ids, &v0, odd)?, &Q::one());
    for (k, pk) in &p.coeffs {
        out.add_unknown_term(*k, &alg.apply_derivation(pk, alg, &ids, &v0, odd)?, &Q::one());
    }
    for &j in &value_unknowns {
        let vj = split(Some(j));
        out.add_unknown_term(j, &alg.apply_derivation(&p.constant, alg, &ids, &vj, odd)?, &Q::one());
        for (k, pk) in &p.coeffs {
            let r = alg.apply_derivation(pk, alg, &ids, &vj, odd)?;
            if !r.is_zero() {
                return Err(Error::Nonlinear(format!(
                    "unknowns {j} and {k} multiply to {}",
                    alg.format(&r)
                )));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Generator;
    use crate::linalg::q;

    #[test]
    fn square_of_shifted_class() {
        let a = FreeCga::new(vec![Generator::new("w4", 4), Generator::truncated("x", 4)]).unwrap();
        let f = LinearFamily::fixed(a.gen(0)).plus(&LinearFamily::unknown(a.ambient(), 0, a.gen(1)));
        let sq = mul(&a, &f, &f).unwrap();
        let names = |_: usize| "c".to_string();
        assert_eq!(sq.format(&a, &names), "w4^2 + 2*c*w4*x");
        let mut at = BTreeMap::new();
        at.insert(0, q(3));
        assert_eq!(
            sq.instantiate(&at),
            &a.pow(&a.gen(0), 2) + &a.mul(&a.gen(0), &a.gen(1)).scale(&q(6))
        );
    }

    #[test]
    fn genuine_quadratic_is_rejected() {
        let a = FreeCga::from_degrees(&[("w4", 4)]).unwrap();
        let f = LinearFamily::unknown(a.ambient(), 0, a.gen(0));
        assert!(matches!(mul(&a, &f, &f), Err(Error::Nonlinear(_))));
    }

    #[test]
    fn equations_per_monomial() {
        let a = FreeCga::from_degrees(&[("u", 2), ("v", 2)]).unwrap();
        let mut f = LinearFamily::fixed(a.gen(0).scale(&q(2)));
        f.add_unknown_term(0, &a.gen(0), &Q::one());
        f.add_unknown_term(1, &a.gen(1), &q(3));
        let eqs = f.equations();
        assert_eq!(eqs.len(), 2);
        assert_eq!(eqs[1].rhs, q(-2));
    }
}
