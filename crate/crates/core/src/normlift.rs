//! Arithmetic in `T̄·𝒯` and certification of explicit complements.
//!
//! An element `t·ṅ_w` is stored as a torus exponent vector over `Z/M` and a
//! Weyl id; the `ℋ` part of any Tits element is absorbed into `t` through
//! `ι(h_i) = M/2`. The product is
//! `(t₁, w₁)(t₂, w₂) = (t₁ + M_{w₁} t₂ + ι(c(w₁, w₂)), w₁w₂)`.

use crate::arith;
use crate::chevtits::{TitsElement, TitsGroup, DEFAULT_CLOSURE_CAP};
use crate::error::{Error, Result};
use crate::linmod;
use crate::matrix::IntMatrix;
use crate::rootsys::RootSystem;
use crate::torus::{
    choose_modulus, fixed_structure, sigma_n_matrix, Family, FrobConfig, TorusStructure,
    TorusVector,
};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet, VecDeque};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormalizerElement {
    pub t: TorusVector,
    /// Weyl id; the Tits part is the canonical lift `ṅ_w`.
    pub w: usize,
}

/// Which torus-valued parameter multiplies a generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TorusParam {
    None,
    /// `H_1 = (α, α^{(εq)^3+1}, α^{q^4}, α^{q^2})`.
    H1,
    /// `H_2`, the same shape in `β = α^{((εq)^3+1)/2}`.
    H2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorRecipe {
    pub name: String,
    pub torus: TorusParam,
    /// Tits word; `n0` denotes the family's central lift over `w0`.
    pub word: String,
}

impl GeneratorRecipe {
    fn new(name: &str, torus: TorusParam, word: &str) -> Self {
        GeneratorRecipe {
            name: name.into(),
            torus,
            word: word.into(),
        }
    }

    pub fn label(&self) -> String {
        match self.torus {
            TorusParam::None => self.word.clone(),
            TorusParam::H1 => format!("H1·{}", self.word),
            TorusParam::H2 => format!("H2·{}", self.word),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplementRecipe {
    pub family: Family,
    pub class_id: usize,
    /// Lift `n` of the class representative.
    pub n_word: String,
    pub generators: Vec<GeneratorRecipe>,
    pub relations: Vec<String>,
    /// `ε` for the torus-valued parameters, where used.
    pub epsilon: Option<i8>,
}

/// The explicit lifts and complement generators for each torus class.
pub fn complement_recipes(family: Family, class_id: usize) -> Result<ComplementRecipe> {
    use TorusParam::*;
    let g = GeneratorRecipe::new;
    let rel = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let dihedral = rel(&["a^2", "b^2", "(ab)^6"]);
    let klein = rel(&["a^2", "b^2", "[a,b]"]);
    let sl23 = rel(&["a^4", "b^3", "aba^-1bab", "(b^-1a)^3"]);
    let (n_word, generators, relations, epsilon) = match (family, class_id) {
        (Family::G2, 1 | 4) => (
            if class_id == 1 { "1" } else { "n0" },
            vec![g("a", None, "h2n1"), g("b", None, "h1n2")],
            dihedral,
            Option::None,
        ),
        (Family::G2, 2 | 3) => (
            if class_id == 2 { "h1n2" } else { "h1n2n0" },
            vec![g("a", None, "h1n2"), g("b", None, "h1n4")],
            klein,
            Option::None,
        ),
        (Family::G2, 5 | 6) => (
            if class_id == 5 { "n1n3" } else { "n1n3n0" },
            vec![g("a", None, "n1n3"), g("n0", None, "n0")],
            rel(&["a^3", "n0^2", "[a,n0]"]),
            Option::None,
        ),
        (Family::Ree, 1) => ("n0", vec![g("a", None, "n0")], rel(&["a^2"]), Option::None),
        (Family::Ree, 2..=4) => (
            ["n1", "h2n3", "h2n4"][class_id - 2],
            vec![g("a", None, "n1n2")],
            rel(&["a^6"]),
            Option::None,
        ),
        (Family::Triality, 1 | 7) => (
            if class_id == 1 { "1" } else { "n0" },
            vec![g("a", None, "h1h3h4n2"), g("b", None, "h2n1n3n4")],
            dihedral,
            Option::None,
        ),
        (Family::Triality, 2 | 3) => (
            if class_id == 2 { "n12" } else { "n0n12" },
            vec![g("a", H1, "n0"), g("b", H2, "n12")],
            klein,
            Some(if class_id == 2 { -1 } else { 1 }),
        ),
        (Family::Triality, 4 | 5) => (
            if class_id == 4 { "n12n2" } else { "n0n12n2" },
            vec![g("a", None, "n1n2n3n7"), g("b", None, "n1n7")],
            sl23,
            Option::None,
        ),
        (Family::Triality, 6) => (
            "n1n2",
            vec![g("a", None, "n1n2n3n7")],
            rel(&["a^4"]),
            Option::None,
        ),
        _ => {
            return Err(Error::UnknownClass {
                family: family.to_string(),
                class: class_id,
            })
        }
    };
    Ok(ComplementRecipe {
        family,
        class_id,
        n_word: n_word.into(),
        generators,
        relations,
        epsilon,
    })
}

/// The literal word for the central lift over `w0`.
pub fn n0_word(family: Family) -> &'static str {
    match family {
        Family::G2 | Family::Ree => "h1n1n6",
        Family::Triality => "n1n3n4n12",
    }
}

/// A Tits group together with a central lift of `w0`.
#[derive(Clone, Debug)]
pub struct FamilyTits {
    pub family: Family,
    pub tits: TitsGroup,
    pub n0: TitsElement,
    /// Set when the literal `n0` word had to be multiplied by an `ℋ` element.
    pub n0_correction: Option<String>,
}

impl FamilyTits {
    pub fn new(family: Family) -> Result<Self> {
        let sys = RootSystem::build(family.root_system_type());
        let tits = TitsGroup::new(&sys);
        let literal = tits.parse_word(n0_word(family))?;
        let (n0, n0_correction) = if tits.is_central(literal) {
            (literal, None)
        } else {
            let central = tits.central_lifts(tits.pi(literal));
            let fix = *central
                .first()
                .ok_or_else(|| Error::NoSolution(format!("no central lift over w0 in {family}")))?;
            let h = tits.mul(fix, tits.inv(literal));
            (
                fix,
                Some(format!(
                    "{} is not central; using {}·{}",
                    n0_word(family),
                    tits.format(h),
                    n0_word(family)
                )),
            )
        };
        Ok(FamilyTits {
            family,
            tits,
            n0,
            n0_correction,
        })
    }

    /// Parse a Tits word that may mention `n0`.
    pub fn word(&self, word: &str) -> Result<TitsElement> {
        let mut acc = TitsElement::IDENTITY;
        let mut rest = word.trim();
        if rest == "1" {
            return Ok(acc);
        }
        while !rest.is_empty() {
            let (head, tail) = match rest.find("n0") {
                Some(0) => {
                    let after = &rest[2..];
                    if after.starts_with(|c: char| c.is_ascii_digit()) {
                        let end = rest
                            .find(|c: char| c != 'n' && !c.is_ascii_digit())
                            .unwrap_or(rest.len());
                        (&rest[..end], &rest[end..])
                    } else {
                        acc = self.tits.mul(acc, self.n0);
                        rest = after;
                        continue;
                    }
                }
                Some(k) => (&rest[..k], &rest[k..]),
                None => (rest, ""),
            };
            acc = self.tits.mul(acc, self.tits.parse_word(head)?);
            rest = tail;
        }
        Ok(acc)
    }
}

/// Everything needed to compute in `N̄_{σn}` for one `(family, q, n)`.
#[derive(Clone, Debug)]
pub struct NormContext {
    pub ft: FamilyTits,
    pub config: FrobConfig,
    pub n: TitsElement,
    pub action: IntMatrix,
    pub structure: TorusStructure,
    pub k: u32,
    pub modulus: i64,
    n_elem: NormalizerElement,
}

impl NormContext {
    /// `modulus_multiple` forces `M` to be a multiple of extra orders
    /// (used for torus parameters of prescribed order).
    pub fn new(ft: FamilyTits, q: u64, n: TitsElement, modulus_multiple: u64) -> Result<Self> {
        let config = FrobConfig::for_family(ft.family, q)?;
        if q.is_multiple_of(2) {
            return Err(Error::CharacteristicTwo(q));
        }
        let action = sigma_n_matrix(&config, &ft.tits, n)?;
        let structure = fixed_structure(&action)?;
        let need = TorusStructure {
            invariant_factors: vec![arith::lcm(
                structure.exponent() as i128,
                modulus_multiple.max(1) as i128,
            ) as u64],
            order: 0,
        };
        let (k, modulus) = choose_modulus(&need, config.p())?;
        let mut ctx = NormContext {
            ft,
            config,
            n,
            action,
            structure,
            k,
            modulus,
            n_elem: NormalizerElement {
                t: TorusVector::zero(0, 2),
                w: 0,
            },
        };
        ctx.n_elem = ctx.from_tits(n);
        Ok(ctx)
    }

    pub fn tits(&self) -> &TitsGroup {
        &self.ft.tits
    }

    pub fn rank(&self) -> usize {
        self.ft.tits.rank()
    }

    pub fn identity(&self) -> NormalizerElement {
        NormalizerElement {
            t: TorusVector::zero(self.rank(), self.modulus),
            w: 0,
        }
    }

    pub fn from_tits(&self, u: TitsElement) -> NormalizerElement {
        NormalizerElement {
            t: TorusVector::from_h(u.h, self.rank(), self.modulus),
            w: u.weyl(),
        }
    }

    pub fn from_torus(&self, t: TorusVector) -> NormalizerElement {
        NormalizerElement { t, w: 0 }
    }

    fn iota(&self, h: u8) -> TorusVector {
        TorusVector::from_h(h, self.rank(), self.modulus)
    }

    fn mul(&self, x: &NormalizerElement, y: &NormalizerElement) -> NormalizerElement {
        let tits = self.tits();
        let conj = y.t.apply(&tits.weyl().coroot_action(x.w));
        NormalizerElement {
            t: x.t.add(&conj).add(&self.iota(tits.cocycle(x.w, y.w))),
            w: tits.weyl().mul(x.w, y.w),
        }
    }

    pub fn norm_mult(
        &self,
        x: &NormalizerElement,
        y: &NormalizerElement,
    ) -> Result<NormalizerElement> {
        for z in [x, y] {
            if z.t.modulus != self.modulus {
                return Err(Error::ModulusMismatch(z.t.modulus, self.modulus));
            }
        }
        Ok(self.mul(x, y))
    }

    pub fn inv(&self, x: &NormalizerElement) -> NormalizerElement {
        let tits = self.tits();
        let ninv = tits.inv(TitsElement {
            h: 0,
            w: x.w as u16,
        });
        let wi = ninv.weyl();
        let t = self
            .iota(ninv.h)
            .add(&x.t.neg().apply(&tits.weyl().coroot_action(wi)));
        NormalizerElement { t, w: wi }
    }

    pub fn pow(&self, x: &NormalizerElement, k: i64) -> NormalizerElement {
        let base = if k < 0 { self.inv(x) } else { x.clone() };
        (0..k.unsigned_abs()).fold(self.identity(), |acc, _| self.mul(&acc, &base))
    }

    pub fn product(&self, xs: &[NormalizerElement]) -> NormalizerElement {
        xs.iter().fold(self.identity(), |acc, x| self.mul(&acc, x))
    }

    /// `σ(t·ṅ_w) = σ(t)·σ(ṅ_w)`.
    pub fn sigma(&self, x: &NormalizerElement) -> NormalizerElement {
        let t = x.t.apply(&self.config.exponent_matrix);
        let u = self.tits().sigma(
            self.config.twist(),
            TitsElement {
                h: 0,
                w: x.w as u16,
            },
        );
        self.mul(&self.from_torus(t), &self.from_tits(u))
    }

    /// `x ↦ n σ(x) n⁻¹`.
    pub fn sigma_n(&self, x: &NormalizerElement) -> NormalizerElement {
        self.product(&[self.n_elem.clone(), self.sigma(x), self.inv(&self.n_elem)])
    }

    pub fn is_fixed_element(&self, x: &NormalizerElement) -> bool {
        self.sigma_n(x) == *x
    }

    /// Exponent of `α` with `α^{X/2} = -1`, `X = ((εq)^3+1)(εq-1)`.
    pub fn alpha_exponent(&self, epsilon: i8) -> Result<i64> {
        let eq = epsilon as i128 * self.config.q() as i128;
        let x = (eq * eq * eq + 1) * (eq - 1);
        let m = self.modulus as i128;
        arith::solve_linear_congruence(x / 2, m / 2, m)
            .map(|a| a as i64)
            .ok_or_else(|| {
                Error::NoSolution(format!(
                    "alpha^(X/2) = -1 with X = {x} has no solution modulo M = {m}"
                ))
            })
    }

    /// `(λ, λ^{(εq)^3+1}, λ^{q^4}, λ^{q^2})` for `λ = ζ^e`.
    pub fn h_shape(&self, e: i64, epsilon: i8) -> TorusVector {
        let q = self.config.q() as i128;
        let eq = epsilon as i128 * q;
        let m = self.modulus as i128;
        let e = e as i128;
        let exps = [e, e * (eq * eq * eq + 1), e * q.pow(4), e * q * q]
            .iter()
            .map(|v| v.rem_euclid(m) as i64)
            .collect();
        TorusVector::new(exps, self.modulus)
    }

    pub fn torus_param(&self, p: TorusParam, epsilon: Option<i8>) -> Result<TorusVector> {
        if p == TorusParam::None {
            return Ok(TorusVector::zero(self.rank(), self.modulus));
        }
        let eps = epsilon.ok_or_else(|| Error::NoSolution("torus parameter needs ε".into()))?;
        let a = self.alpha_exponent(eps)?;
        let q = self.config.q() as i128;
        let eq = eps as i128 * q;
        let e = match p {
            TorusParam::H1 => a,
            _ => {
                let half = (eq * eq * eq + 1) / 2;
                (a as i128 * half).rem_euclid(self.modulus as i128) as i64
            }
        };
        Ok(self.h_shape(e, eps))
    }

    /// Enumerate `⟨gens⟩`, failing once it exceeds `cap` elements.
    pub fn closure(
        &self,
        gens: &[NormalizerElement],
        cap: usize,
    ) -> Result<Vec<NormalizerElement>> {
        let id = self.identity();
        let mut seen: HashSet<NormalizerElement> = HashSet::from([id.clone()]);
        let mut out = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = self.mul(&x, g);
                if !seen.contains(&y) {
                    if out.len() >= cap {
                        return Err(Error::ClosureCap { cap });
                    }
                    seen.insert(y.clone());
                    out.push(y.clone());
                    queue.push_back(y);
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Evaluate a relator such as `aba^-1bab`, `(ab)^6` or `[a,n0]`.
    pub fn eval_relator(
        &self,
        relator: &str,
        names: &HashMap<String, NormalizerElement>,
    ) -> Result<NormalizerElement> {
        let chars: Vec<char> = relator.chars().filter(|c| !c.is_whitespace()).collect();
        let mut parser = Relator {
            ctx: self,
            names,
            chars: &chars,
            pos: 0,
        };
        let v = parser.expr()?;
        if parser.pos != chars.len() {
            return Err(Error::Parse(format!(
                "trailing input in relator `{relator}`"
            )));
        }
        Ok(v)
    }

    pub fn format(&self, x: &NormalizerElement) -> String {
        let w = self.tits().weyl().word_string(x.w);
        let t: Vec<String> = x.t.exps.iter().map(i64::to_string).collect();
        format!("({})·ṅ[{}]", t.join(","), w)
    }
}

struct Relator<'a> {
    ctx: &'a NormContext,
    names: &'a HashMap<String, NormalizerElement>,
    chars: &'a [char],
    pos: usize,
}

impl Relator<'_> {
    fn err(&self) -> Error {
        let s: String = self.chars.iter().collect();
        Error::Parse(format!("bad relator `{s}` at offset {}", self.pos))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<NormalizerElement> {
        let mut acc = self.ctx.identity();
        while let Some(c) = self.peek() {
            if c == ')' || c == ',' || c == ']' {
                break;
            }
            let t = self.term()?;
            acc = self.ctx.mul(&acc, &t);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<NormalizerElement> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let neg = self.peek() == Some('-');
            if neg {
                self.pos += 1;
            }
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let k: i64 = self.chars[start..self.pos]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| self.err())?;
            return Ok(self.ctx.pow(&base, if neg { -k } else { k }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<NormalizerElement> {
        match self.peek().ok_or_else(|| self.err())? {
            '(' => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err());
                }
                self.pos += 1;
                Ok(v)
            }
            '[' => {
                self.pos += 1;
                let x = self.expr()?;
                if self.peek() != Some(',') {
                    return Err(self.err());
                }
                self.pos += 1;
                let y = self.expr()?;
                if self.peek() != Some(']') {
                    return Err(self.err());
                }
                self.pos += 1;
                let c = &self.ctx;
                Ok(c.product(&[c.inv(&x), c.inv(&y), x, y]))
            }
            c if c.is_ascii_alphabetic() => {
                let start = self.pos;
                self.pos += 1;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                self.names.get(&name).cloned().ok_or_else(|| self.err())
            }
            _ => Err(self.err()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub relation: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorReport {
    pub name: String,
    pub recipe: String,
    pub exponents: Vec<i64>,
    pub weyl_word: String,
    pub fixed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplementCertificate {
    pub family: Family,
    pub q: u64,
    pub class_id: usize,
    pub n_word: String,
    pub weyl_image_of_n: String,
    pub modulus: i64,
    pub torus_invariant_factors: Vec<u64>,
    pub generators: Vec<GeneratorReport>,
    pub group_order: usize,
    pub centralizer_order: usize,
    pub image_ok: bool,
    pub intersection_trivial: bool,
    pub relations_checked: Vec<RelationCheck>,
    pub corrections: Vec<String>,
    pub valid: bool,
}

/// Check that `gens` generate a complement to `T̄_{σn}` in `N̄_{σn}`.
///
/// `w` is the Weyl image of `n`; relations are evaluated with `names`.
pub fn verify_complement(
    ctx: &NormContext,
    gens: &[(String, NormalizerElement)],
    relations: &[String],
    cap: usize,
) -> Result<(Vec<RelationCheck>, usize, bool, bool, usize)> {
    for (i, (name, g)) in gens.iter().enumerate() {
        if !ctx.is_fixed_element(g) {
            return Err(Error::NotFixed {
                index: i,
                word: name.clone(),
            });
        }
    }
    let elems: Vec<NormalizerElement> = gens.iter().map(|(_, g)| g.clone()).collect();
    let group = ctx.closure(&elems, cap)?;
    let weyl = ctx.tits().weyl();
    let w = ctx.tits().pi(ctx.n);
    let cent: Vec<usize> = weyl.centralizer_sigma(ctx.config.twist(), w);
    let mut image: Vec<usize> = group.iter().map(|x| x.w).collect();
    image.sort_unstable();
    image.dedup();
    let image_ok = image == cent && group.len() == cent.len();
    let intersection_trivial = group.iter().filter(|x| x.w == 0).count() == 1;
    let names: HashMap<String, NormalizerElement> = gens.iter().cloned().collect();
    let checks = relations
        .iter()
        .map(|r| {
            Ok(RelationCheck {
                relation: r.clone(),
                holds: ctx.eval_relator(r, &names)? == ctx.identity(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((
        checks,
        group.len(),
        image_ok,
        intersection_trivial,
        cent.len(),
    ))
}

/// Closure cap from `TORUS_SPLIT_CAP`, defaulting to one million.
pub fn closure_cap_from_env() -> usize {
    std::env::var("TORUS_SPLIT_CAP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_CLOSURE_CAP)
}

/// Build the recipe's `n` and generators at `q` and certify them.
///
/// A generator that is not fixed under the pinned sign convention is
/// replaced by the first `ℋ`-multiple that is, and the change is recorded.
pub fn certify_recipe(
    recipe: &ComplementRecipe,
    q: u64,
    cap: usize,
) -> Result<ComplementCertificate> {
    certify_recipe_with(recipe, q, cap, &FamilyTits::new(recipe.family)?)
}

pub fn certify_recipe_with(
    recipe: &ComplementRecipe,
    q: u64,
    cap: usize,
    ft: &FamilyTits,
) -> Result<ComplementCertificate> {
    let n = ft.word(&recipe.n_word)?;
    let ctx = NormContext::new(ft.clone(), q, n, recipe_modulus_multiple(recipe, q))?;
    let mut corrections: Vec<String> = ft.n0_correction.iter().cloned().collect();
    let gens = build_generators(&ctx, recipe, &mut corrections)?;
    finish_certificate(&ctx, recipe, &recipe.n_word, gens, corrections, cap)
}

/// Extra orders the modulus must absorb for the recipe's torus parameters.
fn recipe_modulus_multiple(recipe: &ComplementRecipe, q: u64) -> u64 {
    match recipe.epsilon {
        Some(e) => {
            let eq = e as i128 * q as i128;
            ((eq * eq * eq + 1) * (eq - 1)).unsigned_abs() as u64
        }
        None => 1,
    }
}

fn build_generators(
    ctx: &NormContext,
    recipe: &ComplementRecipe,
    corrections: &mut Vec<String>,
) -> Result<Vec<(String, NormalizerElement)>> {
    let mut gens = Vec::new();
    for g in &recipe.generators {
        let u = ctx.ft.word(&g.word)?;
        let t = ctx.torus_param(g.torus, recipe.epsilon)?;
        let mut x = ctx.mul(&ctx.from_torus(t), &ctx.from_tits(u));
        if !ctx.is_fixed_element(&x) {
            let fix = (1..1u8 << ctx.rank())
                .map(|h| ctx.mul(&ctx.from_tits(ctx.tits().from_h(h)), &x))
                .enumerate()
                .find(|(_, y)| ctx.is_fixed_element(y));
            match fix {
                Some((i, y)) => {
                    let h = ctx.tits().format(ctx.tits().from_h(i as u8 + 1));
                    corrections.push(format!(
                        "{} = {} is not fixed by σn; using {}·{}",
                        g.name,
                        g.label(),
                        h,
                        g.label()
                    ));
                    x = y;
                }
                None => {
                    return Err(Error::NotFixed {
                        index: gens.len(),
                        word: g.label(),
                    })
                }
            }
        }
        gens.push((g.name.clone(), x));
    }
    Ok(gens)
}

fn finish_certificate(
    ctx: &NormContext,
    recipe: &ComplementRecipe,
    n_word: &str,
    gens: Vec<(String, NormalizerElement)>,
    corrections: Vec<String>,
    cap: usize,
) -> Result<ComplementCertificate> {
    let reports = recipe
        .generators
        .iter()
        .zip(&gens)
        .map(|(g, (_, x))| GeneratorReport {
            name: g.name.clone(),
            recipe: g.label(),
            exponents: x.t.exps.clone(),
            weyl_word: ctx.tits().weyl().word_string(x.w),
            fixed: ctx.is_fixed_element(x),
        })
        .collect();
    let (checks, order, image_ok, inter, cent) =
        verify_complement(ctx, &gens, &recipe.relations, cap)?;
    let valid = image_ok && inter && order == cent && checks.iter().all(|c| c.holds);
    Ok(ComplementCertificate {
        family: recipe.family,
        q: ctx.config.q(),
        class_id: recipe.class_id,
        n_word: n_word.to_string(),
        weyl_image_of_n: ctx.tits().weyl().word_string(ctx.tits().pi(ctx.n)),
        modulus: ctx.modulus,
        torus_invariant_factors: ctx.structure.invariant_factors.clone(),
        generators: reports,
        group_order: order,
        centralizer_order: cent,
        image_ok,
        intersection_trivial: inter,
        relations_checked: checks,
        corrections,
        valid,
    })
}

/// Largest `K` tried when looking for a torus element that moves one lift
/// of `w` to another.
const MAX_TRANSPORT_K: u32 = 36;

/// Certify the recipe's complement for another lift `n_word` of the same
/// Weyl element.
///
/// With `s ∈ T̄` such that `s⁻¹ n σ(s) = n'`, conjugation by `s` carries
/// `N̄_{σn}` onto `N̄_{σn'}`, so `s⁻¹ K s` is a complement for `n'`. The
/// condition on `s` is the congruence `(A - I) s ≡ c` with `c` the torus
/// part of `n' n⁻¹`; `M = p^K - 1` is enlarged until it is solvable.
pub fn certify_transported(
    recipe: &ComplementRecipe,
    q: u64,
    n_word: &str,
    cap: usize,
) -> Result<ComplementCertificate> {
    let ft = FamilyTits::new(recipe.family)?;
    let n = ft.word(&recipe.n_word)?;
    let target = ft.word(n_word)?;
    if ft.tits.pi(n) != ft.tits.pi(target) {
        return Err(Error::HypothesesNotMet(format!(
            "{n_word} and {} lie over different Weyl elements",
            recipe.n_word
        )));
    }
    let base = NormContext::new(ft.clone(), q, n, recipe_modulus_multiple(recipe, q))?;
    let p = base.config.p() as i64;
    for j in 1.. {
        let k = base.k * j;
        if k > MAX_TRANSPORT_K {
            break;
        }
        let Some(m) = p.checked_pow(k).map(|x| x - 1) else {
            break;
        };
        let ctx = NormContext::new(ft.clone(), q, n, m as u64)?;
        let diff = ctx.mul(&ctx.from_tits(target), &ctx.inv(&ctx.from_tits(n)));
        debug_assert_eq!(diff.w, 0);
        let a = &ctx.action - &IntMatrix::identity(ctx.rank());
        let rows: Vec<linmod::Congruence> = (0..ctx.rank())
            .map(|i| linmod::Congruence {
                coeffs: a.row(i).to_vec(),
                rhs: diff.t.exps[i],
                modulus: m as u64,
            })
            .collect();
        let Some(s) = linmod::solve_congruences(ctx.rank(), &rows) else {
            continue;
        };
        let s = ctx.from_torus(TorusVector::new(s, m));
        let mut corrections: Vec<String> = ft.n0_correction.iter().cloned().collect();
        let gens = build_generators(&ctx, recipe, &mut corrections)?;
        let moved = NormContext::new(ft.clone(), q, target, m as u64)?;
        if moved.modulus != m {
            return Err(Error::ModulusMismatch(moved.modulus, m));
        }
        let s_inv = ctx.inv(&s);
        let gens = gens
            .into_iter()
            .map(|(name, g)| (name, ctx.product(&[s_inv.clone(), g, s.clone()])))
            .collect();
        corrections.push(format!(
            "generators conjugated from n = {} by s = ({})",
            recipe.n_word,
            s.t.exps
                .iter()
                .map(i64::to_string)
                .collect::<Vec<_>>()
                .join(",")
        ));
        return finish_certificate(&moved, recipe, n_word, gens, corrections, cap);
    }
    Err(Error::NoSolution(format!(
        "no torus element moves {} to {n_word} with K <= {MAX_TRANSPORT_K}",
        recipe.n_word
    )))
}
