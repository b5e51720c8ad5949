//! Lifting a map model through extensions over a sphere.
//!
//! Given `f: M(Y) → X`, a class `a` on the degree-n generators of `M(Y)` and
//! a twist θ on `X`, we look for `F: M(Y) → E = X ⊗ Λx/x²` and a retraction
//! `r: E → Λx/x²` with `q∘F = f`, `r∘F = M(a)` and `r(x) = x`. Writing
//! `F(w) = f(w) + h(w)·x` and `r(u) = τ_u·x`, every condition is linear in the
//! coordinates of `h`, in `τ`, in the twist coefficients and in the class,
//! because every unknown multiplies `x` and `x² = 0`.

use num_traits::{One, Zero};

use crate::affine::{self, Affine, LinearEquation, LinearFamily};
use crate::algebra::{FreeCga, Polynomial};
use crate::cdga::{Cdga, Morphism};
use crate::derivations::{Derivation, DerivationComplex};
use crate::error::{Error, Result};
use crate::fibrations::{
    sphere_base, sphere_generator_name, sphere_total_algebra, twist_to_extension, verify_diagram, DiagramCheck,
};
use crate::linalg::{kernel_basis, solve_affine, Matrix, Subspace, Q};
use crate::prelude::*;

/// What an unknown of the lift system stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Unknown {
    Parameter(String),
    /// Coefficient of the k-th derivation of the twist family.
    Twist(usize),
    /// `r(u) = τ·x` for a fiber generator `u` of degree n.
    Section(String),
    /// Coefficient of `m·x` in `F(w)`.
    Lift { generator: String, monomial: String },
}

impl Unknown {
    pub fn label(&self) -> String {
        match self {
            Unknown::Parameter(p) => p.clone(),
            Unknown::Twist(k) => format!("t{k}"),
            Unknown::Section(u) => format!("r({u})"),
            Unknown::Lift { generator, monomial } => format!("h({generator})[{monomial}]"),
        }
    }
}

/// Input of the lift problem. Parameters are unknowns `0..params.len()`.
#[derive(Clone, Debug)]
pub struct LiftProblem {
    pub map: Morphism,
    pub n: u32,
    pub params: Vec<String>,
    /// `a(w)` for each source generator of degree n, in order.
    pub class: Vec<Affine>,
    /// Fixed part of θ on the fiber generators, affine in the parameters.
    pub twist: Vec<LinearFamily>,
    /// Extra cocycles whose coefficients are free.
    pub twist_family: Vec<Derivation>,
    pub xname: Option<String>,
}

impl LiftProblem {
    /// Concrete class and twist, no parameters.
    pub fn fixed(map: Morphism, n: u32, a: &[Q], theta: &Derivation) -> Result<Self> {
        let twist = theta.values.iter().cloned().map(LinearFamily::fixed).collect();
        let class = a.iter().cloned().map(Affine::constant).collect();
        let p = LiftProblem {
            map,
            n,
            params: Vec::new(),
            class,
            twist,
            twist_family: Vec::new(),
            xname: None,
        };
        p.check()?;
        Ok(p)
    }

    /// The class is a free parameter per degree-n generator and θ ranges over
    /// the span of `family`.
    pub fn search(map: Morphism, n: u32, family: Vec<Derivation>) -> Result<Self> {
        let ya = map.source().algebra();
        let gens = ya.generators_of_degree(n);
        let params = gens.iter().map(|&g| format!("a({})", ya.generator(g).name)).collect();
        let class = (0..gens.len()).map(Affine::unknown).collect();
        let xa = map.target().algebra();
        let twist = (0..xa.arity()).map(|_| LinearFamily::zero(xa.ambient())).collect();
        let p = LiftProblem {
            map,
            n,
            params,
            class,
            twist,
            twist_family: family,
            xname: None,
        };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::contract("lifts over S^n need n ≥ 2"));
        }
        let ya = self.map.source().algebra();
        let xa = self.map.target().algebra();
        let k = ya.generators_of_degree(self.n).len();
        if self.class.len() != k {
            return Err(Error::contract(format!(
                "the class needs {k} coordinates (one per degree-{} generator)",
                self.n
            )));
        }
        if self.twist.len() != xa.arity() {
            return Err(Error::contract("the twist needs one value per fiber generator"));
        }
        let np = self.params.len();
        let bad_param = |a: &Affine| a.coeffs.keys().any(|&j| j >= np);
        if self.class.iter().any(bad_param) {
            return Err(Error::contract("the class uses an undeclared parameter"));
        }
        for (i, t) in self.twist.iter().enumerate() {
            if t.ambient() != xa.ambient() || t.unknowns().any(|j| j >= np) {
                return Err(Error::contract("twist values must be fiber polynomials in the parameters"));
            }
            let want = i64::from(xa.degree_of(i)) - i64::from(self.n) + 1;
            for p in core::iter::once(&t.constant).chain(t.coeffs.values()) {
                if let Some(found) = xa.homogeneous_degree(p)? {
                    if i64::from(found) != want {
                        return Err(Error::Degree {
                            context: format!("θ({})", xa.generator(i).name),
                            expected: want,
                            found: i64::from(found),
                        });
                    }
                }
            }
        }
        for d in &self.twist_family {
            if d.degree + 1 != self.n || d.values.len() != xa.arity() {
                return Err(Error::contract("twist family members must lie in Der_{n-1}"));
            }
        }
        Ok(())
    }

    fn xname(&self) -> String {
        self.xname
            .clone()
            .unwrap_or_else(|| sphere_generator_name(self.map.target().algebra()))
    }
}

/// One block of equations; blocks are solved in order.
#[derive(Clone, Debug)]
pub struct Stage {
    /// Source generator whose chain condition the block encodes; `None` for
    /// the section and class constraints.
    pub generator: Option<usize>,
    pub equations: Vec<LinearEquation>,
}

/// The assembled linear system.
#[derive(Clone, Debug)]
pub struct LiftSystem {
    pub problem: LiftProblem,
    pub total: FreeCga,
    pub sphere: Cdga,
    pub unknowns: Vec<Unknown>,
    /// Twist values θ(v) on the fiber generators, in the fiber algebra.
    pub twist: Vec<LinearFamily>,
    /// `D′` on the generators of the total algebra.
    pub differential: Vec<LinearFamily>,
    /// `F(w)` for each source generator.
    pub lift: Vec<LinearFamily>,
    /// `r` on the generators of the total algebra.
    pub section: Vec<LinearFamily>,
    pub stages: Vec<Stage>,
    /// Stage that introduces each unknown; parameters, twist and section
    /// unknowns belong to stage 0.
    owner: Vec<usize>,
}

/// `D′(v) = d_X v - (-1)^{n|v|} θ(v)·x` with family-valued θ; `x ↦ 0`.
pub fn twisted_family(x: &Cdga, n: u32, twist: &[LinearFamily], total: &FreeCga) -> Result<Vec<LinearFamily>> {
    let xa = x.algebra();
    let k = xa.arity();
    let pos: Vec<usize> = (0..k).collect();
    let xgen = LinearFamily::fixed(total.gen(k));
    let mut out = Vec::with_capacity(k + 1);
    for (i, t) in twist.iter().enumerate() {
        let mut dv = LinearFamily::fixed(xa.embed(x.differential_of(i), total, &pos));
        let tv = affine::mul(total, &t.map_polys(|p| xa.embed(p, total, &pos)), &xgen)?;
        let sign_negative = (u64::from(n) * u64::from(xa.degree_of(i))) % 2 == 0;
        dv.add_assign_scaled(&tv, &if sign_negative { -Q::one() } else { Q::one() });
        out.push(dv);
    }
    out.push(LinearFamily::zero(total.ambient()));
    Ok(out)
}

impl LiftSystem {
    pub fn assemble(problem: &LiftProblem) -> Result<Self> {
        problem.check()?;
        let n = problem.n;
        let f = &problem.map;
        let y = f.source();
        let ya = y.algebra();
        let x = f.target();
        let xa = x.algebra();
        let xname = problem.xname();
        let total = sphere_total_algebra(xa, n, &xname)?;
        let sphere = sphere_base(n, &xname)?;
        let sa = sphere.algebra();
        let k = xa.arity();
        let xpos = k;
        let pos: Vec<usize> = (0..k).collect();

        let mut unknowns: Vec<Unknown> = problem.params.iter().cloned().map(Unknown::Parameter).collect();
        let mut owner = vec![0; unknowns.len()];

        let mut twist = problem.twist.clone();
        for (j, d) in problem.twist_family.iter().enumerate() {
            let id = unknowns.len();
            unknowns.push(Unknown::Twist(j));
            owner.push(0);
            for (i, v) in d.values.iter().enumerate() {
                twist[i].add_unknown_term(id, v, &Q::one());
            }
        }
        let differential = twisted_family(x, n, &twist, &total)?;

        let mut section: Vec<LinearFamily> = (0..=k).map(|_| LinearFamily::zero(sa.ambient())).collect();
        section[xpos] = LinearFamily::fixed(sa.gen(0));
        for u in xa.generators_of_degree(n) {
            let id = unknowns.len();
            unknowns.push(Unknown::Section(xa.generator(u).name.clone()));
            owner.push(0);
            section[u] = LinearFamily::unknown(sa.ambient(), id, sa.gen(0));
        }

        // source generators in increasing degree
        let mut order: Vec<usize> = (0..ya.arity()).collect();
        order.sort_by_key(|&i| (ya.degree_of(i), i));
        let mut lift: Vec<LinearFamily> = vec![LinearFamily::zero(total.ambient()); ya.arity()];
        for (si, &w) in order.iter().enumerate() {
            let mut fw = LinearFamily::fixed(xa.embed(f.image(w), &total, &pos));
            let deg = ya.degree_of(w);
            if deg >= n {
                for m in xa.graded_basis(deg - n) {
                    let id = unknowns.len();
                    unknowns.push(Unknown::Lift {
                        generator: ya.generator(w).name.clone(),
                        monomial: if m.is_one() { "1".into() } else { xa.format_monomial(&m) },
                    });
                    owner.push(si + 1);
                    let mx = total.mul(&xa.embed(&Polynomial::term(xa.ambient(), m, Q::one()), &total, &pos), &total.gen(xpos));
                    fw.add_unknown_term(id, &mx, &Q::one());
                }
            }
            lift[w] = fw;
        }

        let mut stages = Vec::new();
        // r∘D′ = 0 on the total generators (the sphere has zero differential)
        let mut first = Vec::new();
        for v in 0..=k {
            first.extend(affine::map_family(&total, &differential[v], sa, &section)?.equations());
        }
        // r∘F = M(a)
        for (w, a) in ya.generators_of_degree(n).into_iter().zip(&problem.class) {
            let rf = affine::map_family(&total, &lift[w], sa, &section)?;
            first.extend(rf.minus(&a.times(&sa.gen(0))).equations());
        }
        stages.push(Stage {
            generator: None,
            equations: first,
        });
        for &w in &order {
            let lhs = affine::apply_derivation(&total, &differential, true, &lift[w])?;
            let rhs = affine::substitute(ya, y.differential_of(w), &total, &lift)?;
            let mut eqs = lhs.minus(&rhs).equations();
            let g = ya.generator(w);
            if !g.is_odd() && g.squares_to_zero() {
                eqs.extend(affine::mul(&total, &lift[w], &lift[w])?.equations());
            }
            stages.push(Stage {
                generator: Some(w),
                equations: eqs,
            });
        }
        Ok(LiftSystem {
            problem: problem.clone(),
            total,
            sphere,
            unknowns,
            twist,
            differential,
            lift,
            section,
            stages,
            owner,
        })
    }

    pub fn parameter_count(&self) -> usize {
        self.problem.params.len()
    }

    pub fn unknown_label(&self, k: usize) -> String {
        self.unknowns[k].label()
    }

    fn equations_through(&self, last_stage: usize) -> Vec<LinearEquation> {
        self.stages[..=last_stage]
            .iter()
            .flat_map(|s| s.equations.iter().cloned())
            .collect()
    }

    pub fn all_equations(&self) -> Vec<LinearEquation> {
        self.equations_through(self.stages.len() - 1)
    }

    /// Values of the parameters for which a lift exists: `point + span`.
    pub fn achievable(&self) -> Result<Option<(Vec<Q>, Subspace)>> {
        let np = self.parameter_count();
        Ok(solve_equations(self.unknowns.len(), &self.all_equations())?.map(|(z, k)| {
            let coords: Vec<usize> = (0..np).collect();
            let span = if np == 0 { Subspace::zero(0) } else { k.project(&coords) };
            (z[..np].to_vec(), span)
        }))
    }

    /// Every unknown as an affine function of the parameters, valid on all of
    /// parameter space, if the equations allow that.
    pub fn parametric_solution(&self, eqs: &[LinearEquation]) -> Result<Option<Vec<Affine>>> {
        let nu = self.unknowns.len();
        let np = self.parameter_count();
        let at = |j: Option<usize>| -> Result<Option<Vec<Q>>> {
            let mut e = eqs.to_vec();
            for p in 0..np {
                e.push(pin(p, if Some(p) == j { Q::one() } else { Q::zero() }));
            }
            Ok(solve_equations(nu, &e)?.map(|(z, _)| z))
        };
        let Some(z0) = at(None)? else { return Ok(None) };
        let mut out: Vec<Affine> = z0.iter().cloned().map(Affine::constant).collect();
        for j in 0..np {
            let Some(zj) = at(Some(j))? else { return Ok(None) };
            for i in 0..nu {
                let d = &zj[i] - &z0[i];
                if !d.is_zero() {
                    out[i].coeffs.insert(j, d);
                }
            }
        }
        Ok(Some(out))
    }

    /// First stage whose equations are inconsistent with the earlier ones at
    /// the given parameter values.
    pub fn first_failure(&self, at: &[Q]) -> Result<Option<usize>> {
        let mut eqs: Vec<LinearEquation> = at.iter().enumerate().map(|(j, v)| pin(j, v.clone())).collect();
        for (si, st) in self.stages.iter().enumerate() {
            eqs.extend(st.equations.iter().cloned());
            if solve_equations(self.unknowns.len(), &eqs)?.is_none() {
                return Ok(Some(si));
            }
        }
        Ok(None)
    }

    fn substitution(&self, sol: &[Affine]) -> BTreeMap<usize, Affine> {
        (self.parameter_count()..self.unknowns.len())
            .map(|k| (k, sol[k].clone()))
            .collect()
    }
}

fn pin(k: usize, v: Q) -> LinearEquation {
    let mut coeffs = BTreeMap::new();
    coeffs.insert(k, Q::one());
    LinearEquation { coeffs, rhs: v }
}

fn equation_matrix(unknowns: usize, eqs: &[LinearEquation]) -> (Matrix, Vec<Q>) {
    let rows = eqs
        .iter()
        .map(|e| e.coeffs.iter().map(|(k, c)| (*k, c.clone())).collect())
        .collect();
    (
        Matrix::from_sparse_rows(unknowns, rows),
        eqs.iter().map(|e| e.rhs.clone()).collect(),
    )
}

/// Solution set `point + kernel` of a system, or `None` if inconsistent.
pub fn solve_equations(unknowns: usize, eqs: &[LinearEquation]) -> Result<Option<(Vec<Q>, Subspace)>> {
    if eqs.is_empty() {
        return Ok(Some((vec![Q::zero(); unknowns], Subspace::full(unknowns))));
    }
    let (a, b) = equation_matrix(unknowns, eqs);
    solve_affine(&a, &b)
}

/// Multipliers `y` with `yᵀA = 0` and `yᵀb ≠ 0`: a proof that `Az = b` has no
/// solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InconsistencyCertificate {
    pub unknowns: usize,
    pub equations: Vec<LinearEquation>,
    pub multipliers: Vec<Q>,
}

impl InconsistencyCertificate {
    pub fn find(unknowns: usize, equations: Vec<LinearEquation>) -> Result<Option<Self>> {
        let (a, b) = equation_matrix(unknowns, &equations);
        let left = kernel_basis(&a.transpose());
        for y in left.basis() {
            let yb: Q = y.iter().zip(&b).map(|(u, v)| u * v).sum();
            if !yb.is_zero() {
                let scaled: Vec<Q> = y.iter().map(|u| u / &yb).collect();
                return Ok(Some(InconsistencyCertificate {
                    unknowns,
                    equations,
                    multipliers: scaled,
                }));
            }
        }
        Ok(None)
    }

    /// `Σ yᵢ (row i)` has zero left side and right side 1.
    pub fn verify(&self) -> bool {
        if self.multipliers.len() != self.equations.len() {
            return false;
        }
        let mut lhs = vec![Q::zero(); self.unknowns];
        let mut rhs = Q::zero();
        for (y, e) in self.multipliers.iter().zip(&self.equations) {
            for (k, c) in &e.coeffs {
                if *k >= self.unknowns {
                    return false;
                }
                lhs[*k] += y * c;
            }
            rhs += y * &e.rhs;
        }
        lhs.iter().all(Zero::is_zero) && rhs.is_one()
    }

    /// Number of equations with a nonzero multiplier.
    pub fn support(&self) -> usize {
        self.multipliers.iter().filter(|y| !y.is_zero()).count()
    }
}

/// `[F(d w) - D′ f(w)]` is a nonzero class in the total space for every
/// admissible choice on lower generators, so no `h(w)` can make `F` a chain map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyWitness {
    pub generator: String,
    pub degree: u32,
    /// `d w` in the source algebra.
    pub boundary: String,
    /// `F(d w) - D′ f(w)` in the total algebra, in the parameters when the
    /// lower stages determine it on all of parameter space.
    pub residual: String,
    /// Class coordinates of the residual at the obstructed parameter values.
    pub class: Vec<Q>,
}

#[derive(Clone, Debug)]
pub struct Obstruction {
    pub params: Vec<String>,
    /// Parameter values admitting a lift; `None` when no value does.
    pub achievable: Option<(Vec<Q>, Subspace)>,
    /// Parameter values at which the obstruction is exhibited.
    pub at: Vec<Q>,
    /// Source generator of the first failing stage; `None` when the section
    /// and class constraints already fail.
    pub generator: Option<String>,
    pub degree: Option<u32>,
    pub certificate: InconsistencyCertificate,
    pub cohomology: Option<CohomologyWitness>,
}

impl Obstruction {
    pub fn verify(&self) -> bool {
        self.certificate.verify()
    }
}

#[derive(Clone, Debug)]
pub enum LiftOutcome {
    Found(Box<LiftCertificate>),
    Obstructed(Box<Obstruction>),
    Undetermined { reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiftOptions {
    pub max_parameters: usize,
}

impl Default for LiftOptions {
    fn default() -> Self {
        LiftOptions { max_parameters: 2 }
    }
}

/// A lift, section and twist, affine in named parameters.
#[derive(Clone, Debug)]
pub struct LiftCertificate {
    pub map: Morphism,
    pub n: u32,
    pub params: Vec<String>,
    pub class: Vec<Affine>,
    pub twist: Vec<LinearFamily>,
    pub total: FreeCga,
    pub sphere: Cdga,
    pub differential: Vec<LinearFamily>,
    /// `F` on the source generators.
    pub lift: Vec<LinearFamily>,
    /// `r` on the total generators.
    pub section: Vec<LinearFamily>,
}

/// Result of checking a certificate, symbolically and at sample points.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CertificateCheck {
    pub symbolic_failures: Vec<String>,
    pub samples: Vec<(Vec<Q>, DiagramCheck)>,
}

impl CertificateCheck {
    pub fn passed(&self) -> bool {
        self.symbolic_failures.is_empty() && self.samples.iter().all(|(_, c)| c.passed())
    }
}

impl LiftCertificate {
    /// Assemble from user data; `D′` is computed from the twist.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        map: Morphism,
        n: u32,
        xname: Option<String>,
        params: Vec<String>,
        class: Vec<Affine>,
        twist: Vec<LinearFamily>,
        lift: Vec<LinearFamily>,
        section: Vec<LinearFamily>,
    ) -> Result<Self> {
        let problem = LiftProblem {
            map: map.clone(),
            n,
            params: params.clone(),
            class: class.clone(),
            twist: twist.clone(),
            twist_family: Vec::new(),
            xname,
        };
        problem.check()?;
        let xname = problem.xname();
        let xa = map.target().algebra();
        let total = sphere_total_algebra(xa, n, &xname)?;
        let sphere = sphere_base(n, &xname)?;
        let np = params.len();
        if lift.len() != map.source().algebra().arity() || section.len() != total.arity() {
            return Err(Error::contract("the lift needs one image per source generator and the section one per total generator"));
        }
        for l in &lift {
            if l.ambient() != total.ambient() || l.unknowns().any(|j| j >= np) {
                return Err(Error::contract("lift images must be total-space polynomials in the parameters"));
            }
        }
        for s in &section {
            if s.ambient() != sphere.algebra().ambient() || s.unknowns().any(|j| j >= np) {
                return Err(Error::contract("section images must be sphere polynomials in the parameters"));
            }
        }
        let differential = twisted_family(map.target(), n, &twist, &total)?;
        Ok(LiftCertificate {
            map,
            n,
            params,
            class,
            twist,
            total,
            sphere,
            differential,
            lift,
            section,
        })
    }

    fn from_system(sys: &LiftSystem, sol: &[Affine]) -> Result<Self> {
        let subst = sys.substitution(sol);
        let c = |v: &[LinearFamily]| v.iter().map(|f| f.compose(&subst)).collect::<Vec<_>>();
        LiftCertificate::new(
            sys.problem.map.clone(),
            sys.problem.n,
            Some(sys.sphere.algebra().generator(0).name.clone()),
            sys.problem.params.clone(),
            sys.problem.class.clone(),
            c(&sys.twist),
            c(&sys.lift),
            c(&sys.section),
        )
    }

    pub fn xname(&self) -> &str {
        &self.sphere.algebra().generator(0).name
    }

    pub fn param_name(&self, k: usize) -> String {
        self.params.get(k).cloned().unwrap_or_else(|| format!("z{k}"))
    }

    pub fn format_total(&self, f: &LinearFamily) -> String {
        f.format(&self.total, &|k| self.param_name(k))
    }

    /// Concrete twist at parameter values.
    pub fn twist_at(&self, values: &[Q]) -> Derivation {
        let m = assignment(values);
        Derivation {
            degree: self.n - 1,
            values: self.twist.iter().map(|t| t.instantiate(&m)).collect(),
        }
    }

    pub fn class_at(&self, values: &[Q]) -> Vec<Q> {
        let m = assignment(values);
        self.class.iter().map(|a| a.eval(&m)).collect()
    }

    /// Check the diagram at concrete parameter values.
    pub fn check_at(&self, values: &[Q]) -> Result<DiagramCheck> {
        let m = assignment(values);
        let ks = twist_to_extension(self.map.target(), self.n, &self.twist_at(values), Some(self.xname()))?;
        let r_images = self.section.iter().map(|s| s.instantiate(&m)).collect();
        let r = Morphism::unchecked(ks.total().clone(), ks.base().clone(), r_images)?;
        let f_images: Vec<Polynomial> = self.lift.iter().map(|l| l.instantiate(&m)).collect();
        verify_diagram(&ks, &r, &f_images, &self.map, &self.class_at(values))
    }

    /// Symbolic check of every identity, then concrete checks at 0, at each
    /// unit vector and at each pairwise sum.
    pub fn verify(&self) -> Result<CertificateCheck> {
        let mut out = CertificateCheck::default();
        let ta = &self.total;
        let ya = self.map.source().algebra();
        let sa = self.sphere.algebra();
        let names = |k: usize| self.param_name(k);
        let xa = self.map.target().algebra();
        let k = xa.arity();

        // twist is a δ-cocycle in every parameter direction
        let complex = DerivationComplex::endomorphisms(self.map.target());
        let np = self.params.len();
        for j in core::iter::once(None).chain((0..np).map(Some)) {
            let theta = Derivation {
                degree: self.n - 1,
                values: self
                    .twist
                    .iter()
                    .map(|t| match j {
                        None => t.constant.clone(),
                        Some(j) => t.coeff(j),
                    })
                    .collect(),
            };
            let dt = complex.delta(&theta)?;
            if dt.values.iter().any(|v| !v.is_zero()) {
                out.symbolic_failures.push(format!("δθ = {} is not zero", complex.format(&dt)));
            }
        }
        for v in 0..=k {
            let dd = affine::apply_derivation(ta, &self.differential, true, &self.differential[v])?;
            if !dd.is_zero() {
                out.symbolic_failures.push(format!(
                    "D′D′({}) = {}",
                    ta.generator(v).name,
                    dd.format(ta, &names)
                ));
            }
        }
        for w in 0..ya.arity() {
            let gname = &ya.generator(w).name;
            let lhs = affine::apply_derivation(ta, &self.differential, true, &self.lift[w])?;
            let rhs = affine::substitute(ya, self.map.source().differential_of(w), ta, &self.lift)?;
            let diff = lhs.minus(&rhs);
            if !diff.is_zero() {
                out.symbolic_failures.push(format!(
                    "D′F({gname}) - F(d {gname}) = {}",
                    diff.format(ta, &names)
                ));
            }
            let g = ya.generator(w);
            if !g.is_odd() && g.squares_to_zero() {
                let sq = affine::mul(ta, &self.lift[w], &self.lift[w])?;
                if !sq.is_zero() {
                    out.symbolic_failures.push(format!("F({gname})^2 = {}", sq.format(ta, &names)));
                }
            }
            let q = self.lift[w].map_polys(|p| project_to_fiber(ta, xa, p));
            if q != LinearFamily::fixed(self.map.image(w).clone()) {
                out.symbolic_failures.push(format!(
                    "q∘F({gname}) = {} but f({gname}) = {}",
                    q.format(xa, &names),
                    xa.format(self.map.image(w))
                ));
            }
        }
        let a_of: BTreeMap<usize, &Affine> = ya.generators_of_degree(self.n).into_iter().zip(&self.class).collect();
        for w in 0..ya.arity() {
            let rf = affine::map_family(ta, &self.lift[w], sa, &self.section)?;
            let want = match a_of.get(&w) {
                Some(a) => a.times(&sa.gen(0)),
                None => LinearFamily::zero(sa.ambient()),
            };
            if rf != want {
                out.symbolic_failures.push(format!(
                    "r∘F({}) = {} but M(a) gives {}",
                    ya.generator(w).name,
                    rf.format(sa, &names),
                    want.format(sa, &names)
                ));
            }
        }
        for v in 0..=k {
            let rd = affine::map_family(ta, &self.differential[v], sa, &self.section)?;
            if !rd.is_zero() {
                out.symbolic_failures.push(format!(
                    "r(D′{}) = {}",
                    ta.generator(v).name,
                    rd.format(sa, &names)
                ));
            }
        }
        if self.section[k] != LinearFamily::fixed(sa.gen(0)) {
            out.symbolic_failures.push("r(x) ≠ x".into());
        }

        let mut points = vec![vec![Q::zero(); np]];
        for i in 0..np {
            let mut e = vec![Q::zero(); np];
            e[i] = Q::one();
            points.push(e);
            for j in i + 1..np {
                let mut e = vec![Q::zero(); np];
                e[i] = Q::one();
                e[j] = Q::one();
                points.push(e);
            }
        }
        for p in points {
            let c = self.check_at(&p)?;
            out.samples.push((p, c));
        }
        Ok(out)
    }
}

fn assignment(values: &[Q]) -> BTreeMap<usize, Q> {
    values.iter().cloned().enumerate().collect()
}

/// `q: X ⊗ Λx → X`, `x ↦ 0`; the fiber generators come first.
fn project_to_fiber(total: &FreeCga, fiber: &FreeCga, p: &Polynomial) -> Polynomial {
    let k = fiber.arity();
    let mut images: Vec<Polynomial> = (0..k).map(|i| fiber.gen(i)).collect();
    images.push(fiber.zero());
    total
        .substitute(p, fiber, &images)
        .unwrap_or_else(|e| panic!("{e}"))
}

/// Decide whether a lift exists for every value of the parameters.
pub fn solve_lift(problem: &LiftProblem, options: LiftOptions) -> Result<LiftOutcome> {
    problem.check()?;
    if problem.params.len() > options.max_parameters {
        return Ok(LiftOutcome::Undetermined {
            reason: format!(
                "{} parameters exceed the limit of {}",
                problem.params.len(),
                options.max_parameters
            ),
        });
    }
    let sys = LiftSystem::assemble(problem)?;
    let np = sys.parameter_count();
    let achievable = sys.achievable()?;
    if let Some((_, span)) = &achievable {
        if span.dim() == np {
            let sol = sys
                .parametric_solution(&sys.all_equations())?
                .ok_or_else(|| Error::Inconsistent("a full solution family has no affine section".into()))?;
            let cert = LiftCertificate::from_system(&sys, &sol)?;
            let check = cert.verify()?;
            if !check.passed() {
                return Err(Error::Inconsistent(format!(
                    "solved lift fails verification: {:?}",
                    check.symbolic_failures
                )));
            }
            return Ok(LiftOutcome::Found(Box::new(cert)));
        }
    }
    let at = match &achievable {
        None => vec![Q::zero(); np],
        Some((p0, span)) => {
            let j = (0..np)
                .find(|&j| {
                    let mut e = vec![Q::zero(); np];
                    e[j] = Q::one();
                    !span.contains(&e)
                })
                .ok_or_else(|| Error::Inconsistent("achievable set is full yet not found".into()))?;
            let mut p = p0.clone();
            p[j] += Q::one();
            p
        }
    };
    Ok(LiftOutcome::Obstructed(Box::new(obstruction(&sys, achievable, at)?)))
}

fn obstruction(sys: &LiftSystem, achievable: Option<(Vec<Q>, Subspace)>, at: Vec<Q>) -> Result<Obstruction> {
    let si = sys
        .first_failure(&at)?
        .ok_or_else(|| Error::Inconsistent("no stage fails at an unreachable class".into()))?;
    let mut eqs: Vec<LinearEquation> = at.iter().enumerate().map(|(j, v)| pin(j, v.clone())).collect();
    eqs.extend(sys.equations_through(si));
    let certificate = InconsistencyCertificate::find(sys.unknowns.len(), eqs)?
        .ok_or_else(|| Error::Inconsistent("inconsistent system without a left-kernel certificate".into()))?;
    let ya = sys.problem.map.source().algebra();
    let generator = sys.stages[si].generator;
    let cohomology = match generator {
        Some(w) if sys.problem.twist_family.is_empty() => cohomology_witness(sys, si, w, &at)?,
        _ => None,
    };
    Ok(Obstruction {
        params: sys.problem.params.clone(),
        achievable,
        at,
        generator: generator.map(|w| ya.generator(w).name.clone()),
        degree: generator.map(|w| ya.degree_of(w)),
        certificate,
        cohomology,
    })
}

fn cohomology_witness(sys: &LiftSystem, si: usize, w: usize, at: &[Q]) -> Result<Option<CohomologyWitness>> {
    let problem = &sys.problem;
    let y = problem.map.source();
    let ya = y.algebra();
    let xa = problem.map.target().algebra();
    let ta = &sys.total;
    let pos: Vec<usize> = (0..xa.arity()).collect();
    let fw = LinearFamily::fixed(xa.embed(problem.map.image(w), ta, &pos));
    let lhs = affine::substitute(ya, y.differential_of(w), ta, &sys.lift)?;
    let rhs = affine::apply_derivation(ta, &sys.differential, true, &fw)?;
    let residual = lhs.minus(&rhs);
    if residual.unknowns().any(|k| sys.owner[k] >= si) {
        return Ok(None);
    }
    let mut lower: Vec<LinearEquation> = at.iter().enumerate().map(|(j, v)| pin(j, v.clone())).collect();
    lower.extend(sys.equations_through(si - 1));
    let Some((z0, kernel)) = solve_equations(sys.unknowns.len(), &lower)? else {
        return Ok(None);
    };
    let ks = twist_to_extension(
        problem.map.target(),
        problem.n,
        &Derivation {
            degree: problem.n - 1,
            values: sys.twist.iter().map(|t| t.instantiate(&assignment(at))).collect(),
        },
        Some(&sys.sphere.algebra().generator(0).name),
    )?;
    let degree = ya.degree_of(w) + 1;
    let h = ks.total().cohomology(degree);
    let point: BTreeMap<usize, Q> = z0.iter().cloned().enumerate().collect();
    let r0 = residual.instantiate(&point);
    let Ok(c0) = h.class_of(ta, &r0) else { return Ok(None) };
    let mut moves = Vec::new();
    for k in kernel.basis() {
        let mut p = Polynomial::zero(ta.ambient());
        for (j, c) in &residual.coeffs {
            p.add_assign_scaled(c, &k[*j]);
        }
        let Ok(cls) = h.class_of(ta, &p) else { return Ok(None) };
        moves.push(cls);
    }
    if Subspace::span(h.dim(), &moves).contains(&c0) {
        return Ok(None);
    }
    let shown = match sys.parametric_solution(&sys.equations_through(si - 1))? {
        Some(sol) => residual
            .compose(&sys.substitution(&sol))
            .format(ta, &|k| problem.params.get(k).cloned().unwrap_or_default()),
        None => ta.format(&r0),
    };
    Ok(Some(CohomologyWitness {
        generator: ya.generator(w).name.clone(),
        degree,
        boundary: ya.format(y.differential_of(w)),
        residual: shown,
        class: c0,
    }))
}

/// Basis of the coboundaries `δ(Der_n X) ⊆ Der_{n-1} X`.
pub fn coboundary_twists(x: &Cdga, n: u32) -> Vec<Derivation> {
    let c = DerivationComplex::endomorphisms(x);
    let b = c.basis(n - 1);
    c.boundaries(n - 1)
        .basis()
        .iter()
        .map(|v| c.from_coordinates(&b, v))
        .collect()
}

/// Basis of the δ-cocycles in `Der_{n-1} X`.
pub fn cocycle_twists(x: &Cdga, n: u32) -> Vec<Derivation> {
    let c = DerivationComplex::endomorphisms(x);
    let b = c.basis(n - 1);
    c.cycles(n - 1)
        .basis()
        .iter()
        .map(|v| c.from_coordinates(&b, v))
        .collect()
}

/// Basis of the cocycles θ ∈ `Der_{n-1} X` acting trivially on `H^k(X)` for
/// every `k ≤ cap`, i.e. the twists of extensions whose fiber inclusion is
/// onto in cohomology through that degree.
pub fn tncz_twists(x: &Cdga, n: u32, cap: u32) -> Result<Vec<Derivation>> {
    let cocycles = cocycle_twists(x, n);
    let xa = x.algebra();
    let complex = DerivationComplex::endomorphisms(x);
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for k in (n - 1)..=cap {
        let hk = x.cohomology(k);
        if hk.dim() == 0 {
            continue;
        }
        let target = k + 1 - n;
        let basis = xa.graded_basis(target);
        let ann = x.cohomology(target).boundaries.annihilator();
        if ann.dim() == 0 {
            continue;
        }
        for rep in &hk.representatives {
            let images: Vec<Vec<Q>> = cocycles
                .iter()
                .map(|t| xa.coordinates(&complex.apply(t, rep), &basis))
                .collect::<Result<_>>()?;
            for lambda in ann.basis() {
                rows.push(
                    images
                        .iter()
                        .map(|v| v.iter().zip(&lambda).map(|(a, b)| a * b).sum())
                        .collect(),
                );
            }
        }
    }
    if rows.is_empty() {
        return Ok(cocycles);
    }
    let kernel = kernel_basis(&Matrix::from_rows(cocycles.len(), rows));
    Ok(kernel
        .basis()
        .iter()
        .map(|s| {
            let mut values: Vec<Polynomial> = (0..xa.arity()).map(|_| xa.zero()).collect();
            for (c, t) in s.iter().zip(&cocycles) {
                for (v, tv) in values.iter_mut().zip(&t.values) {
                    v.add_assign_scaled(tv, c);
                }
            }
            Derivation { degree: n - 1, values }
        })
        .collect())
}

/// Classes `a ∈ Hom(π_n, ℚ)` realized by some lift over an extension with
/// twist in the span of `family`, as a subspace of the degree-n coordinates.
pub fn realizable_classes(map: &Morphism, n: u32, family: Vec<Derivation>) -> Result<Subspace> {
    let problem = LiftProblem::search(map.clone(), n, family)?;
    let sys = LiftSystem::assemble(&problem)?;
    match sys.achievable()? {
        Some((p0, span)) if p0.iter().all(Zero::is_zero) => Ok(span),
        Some(_) => Err(Error::Inconsistent("homogeneous lift system has a non-homogeneous solution set".into())),
        None => Err(Error::Inconsistent("homogeneous lift system is inconsistent".into())),
    }
}

/// A lift realizing the class `a` over some twist in the span of `family`.
pub fn realize(map: &Morphism, n: u32, family: Vec<Derivation>, a: &[Q]) -> Result<Option<LiftCertificate>> {
    let problem = LiftProblem::search(map.clone(), n, family)?;
    let sys = LiftSystem::assemble(&problem)?;
    let np = sys.parameter_count();
    if a.len() != np {
        return Err(Error::contract(format!("the class needs {np} coordinates")));
    }
    let mut eqs: Vec<LinearEquation> = a.iter().enumerate().map(|(j, v)| pin(j, v.clone())).collect();
    eqs.extend(sys.all_equations());
    let Some((z, _)) = solve_equations(sys.unknowns.len(), &eqs)? else {
        return Ok(None);
    };
    let subst: BTreeMap<usize, Affine> = z.into_iter().map(Affine::constant).enumerate().collect();
    let c = |v: &[LinearFamily]| v.iter().map(|f| f.compose(&subst)).collect::<Vec<_>>();
    let cert = LiftCertificate::new(
        map.clone(),
        n,
        Some(sys.sphere.algebra().generator(0).name.clone()),
        Vec::new(),
        a.iter().cloned().map(Affine::constant).collect(),
        c(&sys.twist),
        c(&sys.lift),
        c(&sys.section),
    )?;
    Ok(Some(cert))
}

/// Why the class `a` is not realized over any twist in the span of `family`.
pub fn explain_unrealizable(map: &Morphism, n: u32, family: Vec<Derivation>, a: &[Q]) -> Result<Obstruction> {
    let problem = LiftProblem::search(map.clone(), n, family)?;
    let sys = LiftSystem::assemble(&problem)?;
    let achievable = sys.achievable()?;
    obstruction(&sys, achievable, a.to_vec())
}
