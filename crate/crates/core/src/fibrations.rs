//! KS-extensions, twisted products over spheres, classifying classes, the
//! ρ-map, sections, and the trivial-fibration builder for generator
//! projections.
//!
//! Over a sphere the base is `Λx/x²` with `|x| = n` (exterior when n is odd,
//! `ℚ[x]/(x²)` when n is even). In a twisted product the fiber generators come
//! first and `x` last. A twist θ ∈ Der_{n-1}(X) gives the differential
//! `D′(v) = d_X(v) - (-1)^{n|v|} θ(v)·x`.

use num_traits::{One, Zero};

use crate::algebra::{FreeCga, Generator, Monomial, Polynomial};
use crate::cdga::{Cdga, Morphism};
use crate::derivations::{DerHomology, Derivation, DerivationComplex};
use crate::error::{Error, Result};
use crate::linalg::{solve_affine, Matrix, Q};
use crate::prelude::*;

/// A relative Sullivan algebra `(B, d) → (B ⊗ ΛV, D) → (ΛV, D̄)`.
#[derive(Clone, Debug)]
pub struct KsExtension {
    base: Cdga,
    total: Cdga,
    base_pos: Vec<usize>,
    fiber_pos: Vec<usize>,
    fiber: Cdga,
}

impl KsExtension {
    /// The algebra `B ⊗ ΛV` with base generators first, for writing `D` values.
    pub fn total_algebra(base: &Cdga, fiber_gens: &[Generator]) -> Result<FreeCga> {
        let f = FreeCga::new(fiber_gens.to_vec())?;
        FreeCga::concat(base.algebra(), &f)
    }

    /// Extension with base generators first; `d_fiber[i]` is `D` of the i-th
    /// fiber generator, written in [`KsExtension::total_algebra`].
    pub fn new(base: Cdga, fiber_gens: Vec<Generator>, d_fiber: Vec<Polynomial>) -> Result<Self> {
        let alg = Self::total_algebra(&base, &fiber_gens)?;
        if d_fiber.len() != fiber_gens.len() {
            return Err(Error::contract("one D value per fiber generator is required"));
        }
        let nb = base.algebra().arity();
        let base_pos: Vec<usize> = (0..nb).collect();
        let fiber_pos: Vec<usize> = (nb..alg.arity()).collect();
        let mut d: Vec<Polynomial> = (0..nb)
            .map(|i| base.algebra().embed(base.differential_of(i), &alg, &base_pos))
            .collect();
        d.extend(d_fiber);
        check_nilpotence(&alg, &d, &base_pos, &fiber_pos)?;
        let total = Cdga::new(alg, d)?;
        Self::from_total(base, total, base_pos, fiber_pos)
    }

    /// Wrap an already built total CDGA, given where the base and fiber
    /// generators sit in it.
    pub fn from_total(base: Cdga, total: Cdga, base_pos: Vec<usize>, fiber_pos: Vec<usize>) -> Result<Self> {
        let alg = total.algebra();
        if base_pos.len() != base.algebra().arity() || base_pos.len() + fiber_pos.len() != alg.arity() {
            return Err(Error::contract("base and fiber positions must partition the total generators"));
        }
        for (i, &p) in base_pos.iter().enumerate() {
            let (g, h) = (base.algebra().generator(i), alg.generator(p));
            if g.name != h.name || g.degree != h.degree || g.squares_to_zero() != h.squares_to_zero() {
                return Err(Error::contract(format!("base generator {} is not at its position", g.name)));
            }
            let expected = base.algebra().embed(base.differential_of(i), alg, &base_pos);
            if total.differential_of(p) != &expected {
                return Err(Error::contract(format!(
                    "D({}) = {} differs from the base differential {}",
                    g.name,
                    alg.format(total.differential_of(p)),
                    alg.format(&expected)
                )));
            }
        }
        check_nilpotence(alg, total.differential_values(), &base_pos, &fiber_pos)?;
        let fiber_alg = FreeCga::new(fiber_pos.iter().map(|&p| alg.generator(p).clone()).collect())?;
        let mut kill = vec![fiber_alg.zero(); alg.arity()];
        for (k, &p) in fiber_pos.iter().enumerate() {
            kill[p] = fiber_alg.gen(k);
        }
        let d_fiber = fiber_pos
            .iter()
            .map(|&p| alg.substitute(total.differential_of(p), &fiber_alg, &kill))
            .collect::<Result<Vec<_>>>()?;
        let fiber = Cdga::new(fiber_alg, d_fiber)?;
        Ok(KsExtension {
            base,
            total,
            base_pos,
            fiber_pos,
            fiber,
        })
    }

    pub fn base(&self) -> &Cdga {
        &self.base
    }

    pub fn total(&self) -> &Cdga {
        &self.total
    }

    /// The fiber model `(ΛV, D̄)`.
    pub fn fiber(&self) -> &Cdga {
        &self.fiber
    }

    pub fn base_positions(&self) -> &[usize] {
        &self.base_pos
    }

    pub fn fiber_positions(&self) -> &[usize] {
        &self.fiber_pos
    }

    /// `D` of the i-th fiber generator.
    pub fn fiber_differential(&self, i: usize) -> &Polynomial {
        self.total.differential_of(self.fiber_pos[i])
    }

    /// The base inclusion `B → B ⊗ ΛV`.
    pub fn inclusion(&self) -> Morphism {
        let images = self.base_pos.iter().map(|&p| self.total.algebra().gen(p)).collect();
        Morphism::new(self.base.clone(), self.total.clone(), images).expect("base inclusion is a chain map")
    }

    /// The projection `q: B ⊗ ΛV → ΛV` killing the base.
    pub fn projection(&self) -> Morphism {
        let fa = self.fiber.algebra();
        let mut images = vec![fa.zero(); self.total.algebra().arity()];
        for (k, &p) in self.fiber_pos.iter().enumerate() {
            images[p] = fa.gen(k);
        }
        Morphism::new(self.total.clone(), self.fiber.clone(), images).expect("fiber projection is a chain map")
    }

    /// True iff no `D(v)` has a linear part.
    pub fn is_decomposable(&self) -> bool {
        self.fiber_pos
            .iter()
            .all(|&p| self.total.differential_of(p).terms().all(|(m, _)| m.length() != 1))
    }

    /// Generator-linear part of `D(v)` for the i-th fiber generator.
    pub fn linear_part(&self, i: usize) -> Polynomial {
        self.fiber_differential(i).filter(|m| m.length() == 1)
    }

    /// Degree and base position when the base is a sphere `Λx/x²`.
    pub fn sphere(&self) -> Result<(u32, usize)> {
        let b = self.base.algebra();
        if b.arity() != 1 || !b.generator(0).squares_to_zero() || !self.base.differential_of(0).is_zero() {
            return Err(Error::contract("the base is not a sphere model Λx/x²"));
        }
        Ok((b.generator(0).degree, self.base_pos[0]))
    }
}

fn check_nilpotence(alg: &FreeCga, d: &[Polynomial], base_pos: &[usize], fiber_pos: &[usize]) -> Result<()> {
    for (i, &p) in fiber_pos.iter().enumerate() {
        let later: BTreeSet<usize> = fiber_pos[i..].iter().copied().collect();
        let offending = d[p]
            .terms()
            .any(|(m, _)| m.exponents().iter().enumerate().any(|(j, &e)| e > 0 && later.contains(&j)));
        if offending {
            return Err(Error::Nilpotence {
                generator: alg.generator(p).name.clone(),
            });
        }
    }
    debug_assert!(base_pos.iter().all(|p| !fiber_pos.contains(p)));
    Ok(())
}

/// `Λx/x²` with `|x| = n`.
pub fn sphere_base(n: u32, name: &str) -> Result<Cdga> {
    if n == 0 {
        return Err(Error::contract("sphere dimension must be positive"));
    }
    Ok(Cdga::formal(FreeCga::new(vec![Generator::truncated(name, n)])?))
}

/// A name for the sphere class not clashing with the fiber generators.
pub fn sphere_generator_name(fiber: &FreeCga) -> String {
    let mut name = "x".to_string();
    while fiber.index_of(&name).is_ok() {
        name.push('_');
    }
    name
}

/// `ΛV ⊗ Λx/x²` with the fiber generators first.
pub fn sphere_total_algebra(fiber: &FreeCga, n: u32, xname: &str) -> Result<FreeCga> {
    FreeCga::concat(fiber, &FreeCga::new(vec![Generator::truncated(xname, n)])?)
}

/// Twisted differential values `D′(v) = d_X(v) - (-1)^{n|v|} θ(v)·x` on the
/// fiber generators, in the sphere total algebra.
pub fn twisted_differential(x: &Cdga, n: u32, theta: &Derivation, total: &FreeCga) -> Vec<Polynomial> {
    let xa = x.algebra();
    let k = xa.arity();
    let pos: Vec<usize> = (0..k).collect();
    let xgen = total.gen(k);
    (0..k)
        .map(|i| {
            let dv = xa.embed(x.differential_of(i), total, &pos);
            let tv = total.mul(&xa.embed(&theta.values[i], total, &pos), &xgen);
            let sign_negative = (u64::from(n) * u64::from(xa.degree_of(i))) % 2 == 0;
            if sign_negative {
                &dv - &tv
            } else {
                &dv + &tv
            }
        })
        .collect()
}

/// The KS-extension over `S^n` defined by a cocycle θ ∈ Der_{n-1}(X).
pub fn twist_to_extension(x: &Cdga, n: u32, theta: &Derivation, xname: Option<&str>) -> Result<KsExtension> {
    if n < 2 {
        return Err(Error::contract("sphere twists need n ≥ 2"));
    }
    if theta.degree != n - 1 {
        return Err(Error::Degree {
            context: "twist derivation".into(),
            expected: i64::from(n - 1),
            found: i64::from(theta.degree),
        });
    }
    let complex = DerivationComplex::endomorphisms(x);
    let dt = complex.delta(theta)?;
    if dt.values.iter().any(|v| !v.is_zero()) {
        return Err(Error::MalformedTwist(format!(
            "θ = {} is not a δ-cocycle (δθ = {}), so D′∘D′ ≠ 0",
            complex.format(theta),
            complex.format(&dt)
        )));
    }
    let xname = xname.map_or_else(|| sphere_generator_name(x.algebra()), |s| s.to_string());
    let alg = sphere_total_algebra(x.algebra(), n, &xname)?;
    let k = x.algebra().arity();
    let mut d = twisted_differential(x, n, theta, &alg);
    d.push(alg.zero());
    let total = Cdga::new(alg, d)?;
    KsExtension::from_total(sphere_base(n, &xname)?, total, vec![k], (0..k).collect())
}

/// The twist θ of an extension over a sphere and its class in `H_{n-1}(Der X)`.
#[derive(Clone, Debug)]
pub struct ClassifyingClass {
    pub n: u32,
    pub complex: DerivationComplex,
    pub theta: Derivation,
    pub homology: DerHomology,
    /// Coordinates in the basis `homology.classes`.
    pub coordinates: Vec<Q>,
}

impl ClassifyingClass {
    pub fn is_zero(&self) -> bool {
        self.coordinates.iter().all(Zero::is_zero)
    }
}

/// Recover θ from `D′ - d_X` and its homology class.
pub fn classifying_class(ks: &KsExtension) -> Result<ClassifyingClass> {
    let (n, xpos) = ks.sphere()?;
    if n < 2 {
        return Err(Error::contract("classifying classes need a sphere of dimension ≥ 2"));
    }
    let x = ks.fiber();
    let xa = x.algebra();
    let ta = ks.total().algebra();
    let fpos = ks.fiber_positions();
    let mut values = Vec::with_capacity(xa.arity());
    for (i, &p) in fpos.iter().enumerate() {
        let dv = xa.embed(x.differential_of(i), ta, fpos);
        let rest = ks.total().differential_of(p) - &dv;
        let mut r = xa.zero();
        for (m, c) in rest.terms() {
            if m.exponents()[xpos] != 1 {
                return Err(Error::MalformedTwist(format!(
                    "D({}) - d({}) contains {} which is not a multiple of {}",
                    xa.generator(i).name,
                    xa.generator(i).name,
                    ta.format_monomial(m),
                    ta.generator(xpos).name
                )));
            }
            let e: Vec<u32> = fpos.iter().map(|&q| m.exponents()[q]).collect();
            // monomials are m·x with x last, so D′ - d = R·x = -(-1)^{n|v|} θ(v)·x
            let positions_after_x = fpos.iter().filter(|&&q| q > xpos).count();
            debug_assert_eq!(positions_after_x, 0, "sphere class must be the last generator");
            r.add_term(Monomial(e), c.clone());
        }
        let negate = (u64::from(n) * u64::from(xa.degree_of(i))) % 2 == 0;
        values.push(if negate { -&r } else { r });
    }
    let complex = DerivationComplex::endomorphisms(x);
    let theta = complex.derivation(n - 1, values)?;
    let homology = complex.homology(n - 1)?;
    let coordinates = class_coordinates(&complex, &homology, &theta)?;
    Ok(ClassifyingClass {
        n,
        complex,
        theta,
        homology,
        coordinates,
    })
}

/// Coordinates of a δ-cocycle in the homology basis.
pub fn class_coordinates(complex: &DerivationComplex, h: &DerHomology, theta: &Derivation) -> Result<Vec<Q>> {
    let v = complex.coordinates(&h.basis, theta)?;
    if !h.cycles.contains(&v) {
        return Err(Error::Inconsistent(format!(
            "twist {} is not a δ-cocycle although D′∘D′ = 0",
            complex.format(theta)
        )));
    }
    let mut cols: Vec<Vec<(usize, Q)>> = Vec::new();
    for c in h.classes.iter() {
        cols.push(nonzero(&complex.coordinates(&h.basis, c)?));
    }
    for b in h.boundaries.basis() {
        cols.push(nonzero(&b));
    }
    if cols.is_empty() {
        return Ok(Vec::new());
    }
    let m = Matrix::from_sparse_columns(h.basis.dim(), &cols);
    let (sol, _) = solve_affine(&m, &v)?
        .ok_or_else(|| Error::Inconsistent("cocycle outside classes plus boundaries".into()))?;
    Ok(sol[..h.dim()].to_vec())
}

fn nonzero(v: &[Q]) -> Vec<(usize, Q)> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn is_rationally_trivial(ks: &KsExtension) -> Result<bool> {
    Ok(classifying_class(ks)?.is_zero())
}

/// The map `H^k(X) → H^{k-n+1}(X)`, `[w] ↦ [θ(w)]`, in one degree.
#[derive(Clone, Debug)]
pub struct RhoBlock {
    pub k: u32,
    /// Rows index `H^{k-n+1}` representatives, columns `H^k` representatives.
    pub matrix: Matrix,
}

/// ρ of a single derivation class, for cohomological degrees `k ≤ cap`.
pub fn rho_of(x: &Cdga, theta: &Derivation, cap: u32) -> Result<Vec<RhoBlock>> {
    let complex = DerivationComplex::endomorphisms(x);
    let s = theta.degree;
    let xa = x.algebra();
    let mut blocks = Vec::new();
    for k in s..=cap {
        let hk = x.cohomology(k);
        let hl = x.cohomology(k - s);
        let mut cols = Vec::with_capacity(hk.dim());
        for w in &hk.representatives {
            let img = complex.apply(theta, w);
            let c = hl.class_of(xa, &img).map_err(|_| {
                Error::Inconsistent(format!(
                    "θ = {} sends the cocycle {} to the non-cocycle {}",
                    complex.format(theta),
                    xa.format(w),
                    xa.format(&img)
                ))
            })?;
            cols.push(nonzero(&c));
        }
        blocks.push(RhoBlock {
            k,
            matrix: Matrix::from_sparse_columns(hl.dim(), &cols),
        });
    }
    Ok(blocks)
}

/// ρ on every basis class of `H_{n-1}(Der X)`.
#[derive(Clone, Debug)]
pub struct Rho {
    pub n: u32,
    pub cap: u32,
    pub homology: DerHomology,
    /// `blocks[c]` is ρ of the c-th homology class.
    pub blocks: Vec<Vec<RhoBlock>>,
}

impl Rho {
    pub fn is_zero(&self) -> bool {
        self.blocks.iter().flatten().all(|b| b.matrix.is_zero())
    }
}

pub fn rho(x: &Cdga, n: u32, cap: u32) -> Result<Rho> {
    if n < 2 {
        return Err(Error::contract("ρ needs n ≥ 2"));
    }
    x.require_minimal("ρ-map fiber")?;
    let homology = DerivationComplex::endomorphisms(x).homology(n - 1)?;
    let blocks = homology
        .classes
        .iter()
        .map(|t| rho_of(x, t, cap))
        .collect::<Result<Vec<_>>>()?;
    Ok(Rho {
        n,
        cap,
        homology,
        blocks,
    })
}

/// True iff `H*(X)` injects into `H*(E)` up to degree `cap`, decided by ρ of
/// the classifying class and cross-checked against cohomology dimensions.
pub fn is_tncz(ks: &KsExtension, cap: u32) -> Result<bool> {
    let cc = classifying_class(ks)?;
    let x = ks.fiber();
    let verdict = rho_of(x, &cc.theta, cap)?.iter().all(|b| b.matrix.is_zero());
    let n = cc.n;
    let mut product_dims = true;
    for k in 0..=cap {
        let e = ks.total().cohomology(k).dim();
        let f = x.cohomology(k).dim() + if k >= n { x.cohomology(k - n).dim() } else { 0 };
        if e != f {
            product_dims = false;
            break;
        }
    }
    if verdict != product_dims {
        return Err(Error::Inconsistent(format!(
            "ρ says tncz = {verdict} but total cohomology dimensions up to degree {cap} say {product_dims}"
        )));
    }
    Ok(verdict)
}

/// A retraction `r: E → Λx/x²` with `r(x) = x`, if one exists. Fiber
/// generators of degree n go to multiples of x, all others to 0.
pub fn find_section_over_sphere(ks: &KsExtension) -> Result<Option<Morphism>> {
    let (n, xpos) = ks.sphere()?;
    let ta = ks.total().algebra();
    let fpos = ks.fiber_positions();
    let unknowns: Vec<usize> = fpos.iter().copied().filter(|&p| ta.degree_of(p) == n).collect();
    let xm = Monomial::generator(ta.arity(), xpos);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for &p in fpos.iter().filter(|&&p| ta.degree_of(p) + 1 == n) {
        let dv = ks.total().differential_of(p);
        rows.push(
            unknowns
                .iter()
                .map(|&u| dv.coeff(&Monomial::generator(ta.arity(), u)))
                .collect::<Vec<Q>>(),
        );
        rhs.push(-dv.coeff(&xm));
    }
    let tau = if rows.is_empty() {
        vec![Q::zero(); unknowns.len()]
    } else {
        match solve_affine(&Matrix::from_rows(unknowns.len(), rows), &rhs)? {
            None => return Ok(None),
            Some((x, _)) => x,
        }
    };
    let base = ks.base();
    let ba = base.algebra();
    let mut images = vec![ba.zero(); ta.arity()];
    images[xpos] = ba.gen(0);
    for (u, t) in unknowns.iter().zip(tau) {
        images[*u] = ba.gen(0).scale(&t);
    }
    match Morphism::new(ks.total().clone(), base.clone(), images) {
        Ok(r) => Ok(Some(r)),
        Err(Error::ChainCondition { generators }) => Err(Error::Inconsistent(format!(
            "section solution fails the chain condition on {}",
            generators.join(", ")
        ))),
        Err(e) => Err(e),
    }
}

/// `M(a): M(Y) → Λx/x²`, `w ↦ a(w)·x` on degree-n generators, 0 elsewhere.
/// `a` is indexed like `Y.algebra().generators_of_degree(n)`.
pub fn map_to_sphere(y: &Cdga, sphere: &Cdga, a: &[Q]) -> Result<Morphism> {
    let n = sphere.algebra().degree_of(0);
    let gens = y.algebra().generators_of_degree(n);
    if gens.len() != a.len() {
        return Err(Error::contract(format!(
            "the class needs {} coordinates (one per degree-{n} generator)",
            gens.len()
        )));
    }
    let sa = sphere.algebra();
    let mut images = vec![sa.zero(); y.algebra().arity()];
    for (g, c) in gens.iter().zip(a) {
        images[*g] = sa.gen(0).scale(c);
    }
    Morphism::new(y.clone(), sphere.clone(), images)
}

/// Outcome of checking the diagram `q∘F = M(f)`, `r∘F = M(a)`, `r(x) = x`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiagramCheck {
    pub lift_is_chain_map: bool,
    pub fiber_composite: bool,
    pub section_composite: bool,
    pub section_is_retraction: bool,
    pub failures: Vec<String>,
}

impl DiagramCheck {
    pub fn passed(&self) -> bool {
        self.lift_is_chain_map && self.fiber_composite && self.section_composite && self.section_is_retraction
    }
}

/// Check a lift `F: M(Y) → E` given by generator images against the model
/// `f: M(Y) → X`, the section `r` and the class `a`.
pub fn verify_diagram(
    ks: &KsExtension,
    r: &Morphism,
    lift_images: &[Polynomial],
    f: &Morphism,
    a: &[Q],
) -> Result<DiagramCheck> {
    let (_, xpos) = ks.sphere()?;
    let y = f.source();
    let ta = ks.total().algebra();
    let mut out = DiagramCheck::default();
    let lift = Morphism::unchecked(y.clone(), ks.total().clone(), lift_images.to_vec())?;
    let bad = lift.failing_generators();
    out.lift_is_chain_map = bad.is_empty();
    if !bad.is_empty() {
        out.failures.push(format!("F is not a chain map on {}", bad.join(", ")));
    }
    let q = ks.projection();
    if f.target().algebra() != q.target().algebra() {
        return Err(Error::contract("the map model does not land in the fiber model"));
    }
    let ya = y.algebra();
    out.fiber_composite = true;
    for i in 0..ya.arity() {
        let lhs = q.apply(&lift_images[i]);
        if &lhs != f.image(i) {
            out.fiber_composite = false;
            out.failures.push(format!(
                "q∘F({}) = {} but f({}) = {}",
                ya.generator(i).name,
                q.target().algebra().format(&lhs),
                ya.generator(i).name,
                q.target().algebra().format(f.image(i))
            ));
        }
    }
    let ma = map_to_sphere(y, ks.base(), a)?;
    out.section_composite = true;
    for i in 0..ya.arity() {
        let lhs = r.apply(&lift_images[i]);
        if &lhs != ma.image(i) {
            out.section_composite = false;
            out.failures.push(format!(
                "r∘F({}) = {} but M(a)({}) = {}",
                ya.generator(i).name,
                ks.base().algebra().format(&lhs),
                ya.generator(i).name,
                ks.base().algebra().format(ma.image(i))
            ));
        }
    }
    let rx = r.apply(&ta.gen(xpos));
    out.section_is_retraction = rx == ks.base().algebra().gen(0) && r.failing_generators().is_empty();
    if !out.section_is_retraction {
        out.failures.push("r is not a chain retraction with r(x) = x".into());
    }
    Ok(out)
}

/// Verification gates of the trivial-fibration builder.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BuilderGates {
    pub differential_squares_to_zero: bool,
    pub lift_is_chain_map: bool,
    pub fiber_composite: bool,
    pub section_composite: bool,
    pub classifying_class_zero: bool,
    pub section_found: bool,
    pub failures: Vec<String>,
}

impl BuilderGates {
    pub fn passed(&self) -> bool {
        self.differential_squares_to_zero
            && self.lift_is_chain_map
            && self.fiber_composite
            && self.section_composite
            && self.classifying_class_zero
            && self.section_found
    }
}

/// Output of [`build_trivial_fibration`].
#[derive(Clone, Debug)]
pub struct TrivialFibration {
    pub n: u32,
    pub extension: KsExtension,
    /// σ̄ ∈ Der_n(ΛV).
    pub sigma_bar: Derivation,
    /// The twist δ(σ̄) ∈ Der_{n-1}(ΛV).
    pub twist: Derivation,
    /// F′ on the generators of M(Y).
    pub lift_images: Vec<Polynomial>,
    /// `M(s)`: x ↦ x, fiber generators ↦ 0.
    pub section: Morphism,
    pub gates: BuilderGates,
}

/// How a generator of `W` is treated by a generator projection.
fn projection_targets(p: &Morphism) -> Result<Vec<Option<usize>>> {
    let sa = p.source().algebra();
    let ta = p.target().algebra();
    let mut hit = vec![0usize; ta.arity()];
    let mut out = Vec::with_capacity(sa.arity());
    for i in 0..sa.arity() {
        let img = p.image(i);
        if img.is_zero() {
            out.push(None);
            continue;
        }
        let single = img.len() == 1
            && img
                .terms()
                .next()
                .is_some_and(|(m, c)| m.length() == 1 && c.is_one());
        if !single {
            return Err(Error::NotProjection(format!(
                "{} ↦ {} is neither a generator nor 0",
                sa.generator(i).name,
                ta.format(img)
            )));
        }
        let (m, _) = img.terms().next().expect("one term");
        let j = m.exponents().iter().position(|&e| e == 1).expect("a generator");
        hit[j] += 1;
        out.push(Some(j));
    }
    if let Some(j) = hit.iter().position(|&h| h != 1) {
        return Err(Error::NotProjection(format!(
            "target generator {} is the image of {} source generators (exactly one is required)",
            ta.generator(j).name,
            hit[j]
        )));
    }
    Ok(out)
}

/// Construct the rationally trivial fibration over `S^n` with a section and a
/// lift of `M(a)` through a generator projection `p: ΛW → ΛV`.
///
/// σ ∈ Der_n(ΛW, ΛV; p) is `σ(w) = (-1)^{n|w|} a(w)` on degree-n generators,
/// σ̄(v) = σ(i(v)), `D′ = d̄ - δ(σ̄)·x` and `F′(w) = p(w) + (-1)^{n|w|} σ(w)·x`.
/// Every output is checked; failed checks are reported in `gates`.
pub fn build_trivial_fibration(p: &Morphism, n: u32, a: &[Q]) -> Result<TrivialFibration> {
    if n < 2 {
        return Err(Error::contract("the builder needs n ≥ 2"));
    }
    let targets = projection_targets(p)?;
    let y = p.source();
    let x = p.target();
    let ya = y.algebra();
    let xa = x.algebra();
    let deg_n = ya.generators_of_degree(n);
    if deg_n.len() != a.len() {
        return Err(Error::contract(format!(
            "the class needs {} coordinates (one per degree-{n} generator)",
            deg_n.len()
        )));
    }
    let mut sigma_w = vec![Q::zero(); ya.arity()];
    for (g, c) in deg_n.iter().zip(a) {
        // (-1)^{n·n} = (-1)^n
        sigma_w[*g] = if n % 2 == 0 { c.clone() } else { -c.clone() };
    }
    let mut sigma_bar_values = vec![xa.zero(); xa.arity()];
    for (i, t) in targets.iter().enumerate() {
        if let Some(j) = t {
            sigma_bar_values[*j] = xa.constant(sigma_w[i].clone());
        }
    }
    let complex = DerivationComplex::endomorphisms(x);
    let sigma_bar = complex.derivation(n, sigma_bar_values)?;
    let twist = complex.delta(&sigma_bar)?;
    let extension = twist_to_extension(x, n, &twist, None)?;
    let ta = extension.total().algebra();
    let k = xa.arity();
    let pos: Vec<usize> = (0..k).collect();
    let xgen = ta.gen(k);
    let lift_images: Vec<Polynomial> = (0..ya.arity())
        .map(|i| {
            let base = xa.embed(p.image(i), ta, &pos);
            let sign_negative = (u64::from(n) * u64::from(ya.degree_of(i))) % 2 == 1;
            let s = if sign_negative { -sigma_w[i].clone() } else { sigma_w[i].clone() };
            &base + &xgen.scale(&s)
        })
        .collect();
    let sphere = extension.base().clone();
    let mut s_images = vec![sphere.algebra().zero(); ta.arity()];
    s_images[k] = sphere.algebra().gen(0);
    let mut gates = BuilderGates {
        differential_squares_to_zero: true,
        ..Default::default()
    };
    let section = match Morphism::new(extension.total().clone(), sphere.clone(), s_images.clone()) {
        Ok(s) => s,
        Err(_) => {
            gates.failures.push("M(s) is not a chain map".into());
            Morphism::unchecked(extension.total().clone(), sphere.clone(), s_images)?
        }
    };
    let check = verify_diagram(&extension, &section, &lift_images, p, a)?;
    gates.lift_is_chain_map = check.lift_is_chain_map;
    gates.fiber_composite = check.fiber_composite;
    gates.section_composite = check.section_composite && check.section_is_retraction;
    gates.failures.extend(check.failures);
    gates.classifying_class_zero = classifying_class(&extension)?.is_zero();
    if !gates.classifying_class_zero {
        gates.failures.push("classifying class is nonzero".into());
    }
    gates.section_found = find_section_over_sphere(&extension)?.is_some();
    if !gates.section_found {
        gates.failures.push("no section exists".into());
    }
    Ok(TrivialFibration {
        n,
        extension,
        sigma_bar,
        twist,
        lift_images,
        section,
        gates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    fn cp(m: u32) -> Cdga {
        let top = 2 * m + 1;
        let a = FreeCga::from_degrees(&[("v2", 2), (&format!("w{top}"), top)]).unwrap();
        let v = a.pow(&a.gen(0), m + 1);
        Cdga::new(a.clone(), vec![a.zero(), v]).unwrap()
    }

    fn sphere_model(n: u32) -> Cdga {
        if n % 2 == 1 {
            Cdga::formal(FreeCga::from_degrees(&[(&format!("w{n}"), n)]).unwrap())
        } else {
            let a = FreeCga::from_degrees(&[(&format!("w{n}"), n), (&format!("w{}", 2 * n - 1), 2 * n - 1)]).unwrap();
            let sq = a.pow(&a.gen(0), 2);
            Cdga::new(a.clone(), vec![a.zero(), sq]).unwrap()
        }
    }

    #[test]
    fn ks_examples() {
        let b = FreeCga::from_degrees(&[("w1", 2), ("w2", 2), ("w3", 3), ("w4", 3)]).unwrap();
        let base = Cdga::new(
            b.clone(),
            vec![b.zero(), b.zero(), b.pow(&b.gen(0), 2), b.pow(&b.gen(1), 2)],
        )
        .unwrap();
        let fg = vec![Generator::new("v", 3)];
        let t = KsExtension::total_algebra(&base, &fg).unwrap();
        let ks = KsExtension::new(base.clone(), fg.clone(), vec![t.mul(&t.gen(0), &t.gen(1))]).unwrap();
        assert!(ks.is_decomposable());
        assert!(ks.fiber().differential_of(0).is_zero());

        let s4 = sphere_model(4);
        let fg = vec![Generator::new("v3", 3)];
        let t = KsExtension::total_algebra(&s4, &fg).unwrap();
        let hopf = KsExtension::new(s4.clone(), fg.clone(), vec![t.gen(0)]).unwrap();
        assert!(!hopf.is_decomposable());
        assert!(!hopf.total().is_minimal());

        let fg = vec![Generator::new("v2", 2), Generator::new("v3", 3)];
        let t = KsExtension::total_algebra(&s4, &fg).unwrap();
        let d3 = &t.pow(&t.gen(2), 2) - &t.gen(0);
        let ks = KsExtension::new(s4.clone(), fg, vec![t.zero(), d3]).unwrap();
        assert_eq!(ks.fiber().algebra().format(ks.fiber().differential_of(1)), "v2^2");

        let fg = vec![Generator::new("v3", 3), Generator::new("v2", 2)];
        let t = KsExtension::total_algebra(&s4, &fg).unwrap();
        let d3 = &t.pow(&t.gen(3), 2) - &t.gen(0);
        assert!(matches!(
            KsExtension::new(s4, fg, vec![d3, t.zero()]),
            Err(Error::Nilpotence { .. })
        ));
    }

    #[test]
    fn cp3_twist() {
        let x = cp(3);
        let c = DerivationComplex::endomorphisms(&x);
        let xa = x.algebra();
        let theta = c
            .derivation(3, vec![xa.zero(), xa.pow(&xa.gen(0), 2).scale(&q(-2))])
            .unwrap();
        let ks = twist_to_extension(&x, 4, &theta, None).unwrap();
        let ta = ks.total().algebra();
        assert_eq!(ta.format(ks.fiber_differential(1)), "v2^4 + 2*v2^2*x");
        let cc = classifying_class(&ks).unwrap();
        assert_eq!(cc.theta, theta);
        assert!(!cc.is_zero());
        assert!(is_tncz(&ks, 12).unwrap());
        assert!(find_section_over_sphere(&ks).unwrap().is_some());
    }

    #[test]
    fn loop_space_twist() {
        let a = FreeCga::from_degrees(&[("xb", 1), ("yb", 2)]).unwrap();
        let x = Cdga::formal(a.clone());
        let c = DerivationComplex::endomorphisms(&x);
        let theta = c.derivation(1, vec![a.zero(), a.gen(0)]).unwrap();
        let ks = twist_to_extension(&x, 2, &theta, None).unwrap();
        assert!(!is_tncz(&ks, 4).unwrap());
        assert_eq!(ks.total().cohomology(2).dim(), 1);
        let r = find_section_over_sphere(&ks).unwrap().unwrap();
        assert!(r.image(1).is_zero());
        let zero = twist_to_extension(&x, 2, &c.zero(1), None).unwrap();
        assert_eq!(zero.total().cohomology(2).dim(), 2);
        assert!(is_tncz(&zero, 4).unwrap());
        let rho = rho(&x, 2, 4).unwrap();
        assert!(!rho.is_zero());
    }

    #[test]
    fn no_section() {
        let base = sphere_base(4, "x").unwrap();
        let fg = vec![Generator::new("v3", 3)];
        let t = KsExtension::total_algebra(&base, &fg).unwrap();
        let ks = KsExtension::new(base, fg, vec![t.gen(0)]).unwrap();
        assert!(find_section_over_sphere(&ks).unwrap().is_none());
    }

    #[test]
    fn builder_on_spheres() {
        for n in [3u32, 4, 5, 6] {
            let s = sphere_model(n);
            let id = Morphism::identity(&s);
            let out = build_trivial_fibration(&id, n, &[q(1)]).unwrap();
            assert!(out.gates.passed(), "n = {n}: {:?}", out.gates.failures);
            let ta = out.extension.total().algebra();
            assert_eq!(ta.format(&out.lift_images[0]), format!("w{n} + x"));
            if n % 2 == 0 {
                assert_eq!(ta.format(out.extension.fiber_differential(1)), format!("w{n}^2 + 2*w{n}*x"));
            } else {
                assert!(out.extension.fiber_differential(0).is_zero());
            }
        }
    }

    #[test]
    fn rho_cp2_vanishes() {
        assert!(rho(&cp(2), 4, 6).unwrap().is_zero());
    }
}
