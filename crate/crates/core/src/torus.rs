//! Fixed points of twisted Frobenius maps on a maximal torus, computed on
//! the exponent lattice.
//!
//! A torus element `h_{r_1}(λ_1)…h_{r_l}(λ_l)` with `λ_i = ζ^{e_i}` is the
//! exponent vector `e`. The map `x ↦ n σ(x) n⁻¹` acts on exponents by
//! `A = M_{π(n)} · E`, where `E` is the Frobenius part and `M_w` the action
//! of `w` on coroots, so the fixed subgroup is the cokernel of `A - I`.

use crate::arith;
use crate::chevtits::{TitsElement, TitsGroup};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::rootsys::{RootSystem, RootSystemType};
use crate::weyl::{WeylGroup, WeylTwist};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// The three exceptional families with explicit complements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "G2")]
    G2,
    #[serde(rename = "2G2")]
    Ree,
    #[serde(rename = "3D4")]
    Triality,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::G2, Family::Ree, Family::Triality];

    pub fn root_system_type(self) -> RootSystemType {
        match self {
            Family::G2 | Family::Ree => RootSystemType::G2,
            Family::Triality => RootSystemType::D4,
        }
    }

    pub fn twist(self) -> WeylTwist {
        match self {
            Family::G2 => WeylTwist::Identity,
            Family::Ree => WeylTwist::Ree,
            Family::Triality => WeylTwist::Triality,
        }
    }

    pub fn num_classes(self) -> usize {
        match self {
            Family::G2 => 6,
            Family::Ree => 4,
            Family::Triality => 7,
        }
    }

    /// Table representative of each class as a product of reflections.
    pub fn representative_reflections(self, class_id: usize) -> Result<&'static [i32]> {
        let reps: &[&[i32]] = match self {
            Family::G2 => &[&[], &[2], &[4], &[1, 6], &[1, 3], &[1, 5]],
            Family::Ree => &[&[], &[1], &[3], &[4]],
            Family::Triality => &[
                &[],
                &[12],
                &[1, 3, 4],
                &[12, 2],
                &[1, 3, 4, 2],
                &[1, 2],
                &[1, 3, 4, 12],
            ],
        };
        class_id
            .checked_sub(1)
            .and_then(|i| reps.get(i))
            .copied()
            .ok_or(Error::UnknownClass {
                family: self.to_string(),
                class: class_id,
            })
    }

    /// Display label of the representative, e.g. `w1w6`.
    pub fn representative_label(self, class_id: usize) -> Result<String> {
        let r = self.representative_reflections(class_id)?;
        Ok(match (self, class_id) {
            (Family::Triality, 3) => "w0w12".into(),
            (Family::Triality, 5) => "w0w12w2".into(),
            (Family::Triality, 7) => "w0".into(),
            _ if r.is_empty() => "1".into(),
            _ => r.iter().map(|i| format!("w{i}")).collect(),
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "G2" => Ok(Family::G2),
            "2G2" => Ok(Family::Ree),
            "3D4" => Ok(Family::Triality),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::G2 => "G2",
            Family::Ree => "2G2",
            Family::Triality => "3D4",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrobKind {
    Split { q: u64 },
    Triality { q: u64 },
    Ree { m: u32 },
}

/// A Frobenius map with its action `E` on torus exponents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobConfig {
    pub kind: FrobKind,
    pub exponent_matrix: IntMatrix,
}

fn checked_q(family: Family, q: u64) -> Result<(u64, u32)> {
    arith::prime_power(q).ok_or_else(|| Error::InvalidQ {
        family: family.to_string(),
        q,
        reason: "not a prime power".into(),
    })
}

impl FrobConfig {
    /// `E = q·I` on a rank-`l` lattice.
    pub fn split(q: u64, rank: usize) -> Result<Self> {
        checked_q(Family::G2, q)?;
        Ok(FrobConfig {
            kind: FrobKind::Split { q },
            exponent_matrix: IntMatrix::scalar(rank, q as i64),
        })
    }

    /// `E = q·P_ρ` on the D4 lattice, `P_ρ e_i = e_{ρ(i)}`.
    pub fn triality(q: u64) -> Result<Self> {
        checked_q(Family::Triality, q)?;
        let sys = RootSystem::build(RootSystemType::D4);
        let mut e = IntMatrix::zeros(4, 4);
        for i in 0..4 {
            e[(sys.symmetry_on_simple(i)?, i)] = q as i64;
        }
        Ok(FrobConfig {
            kind: FrobKind::Triality { q },
            exponent_matrix: e,
        })
    }

    /// `(e_1, e_2) ↦ (3^m e_2, 3^{m+1} e_1)`, i.e. `h_1(t_1)h_2(t_2) ↦
    /// h_1(t_2^{3^m}) h_2(t_1^{3^{m+1}})`.
    pub fn ree(m: u32) -> Result<Self> {
        let a = 3i64.checked_pow(m).ok_or(Error::InvalidQ {
            family: "2G2".into(),
            q: 0,
            reason: "m too large".into(),
        })?;
        Ok(FrobConfig {
            kind: FrobKind::Ree { m },
            exponent_matrix: IntMatrix::from_rows(&[vec![0, a], vec![3 * a, 0]]),
        })
    }

    /// The Frobenius map of a family over `F_q`, validating `q`.
    pub fn for_family(family: Family, q: u64) -> Result<Self> {
        match family {
            Family::G2 => {
                checked_q(family, q)?;
                Self::split(q, 2)
            }
            Family::Triality => Self::triality(q),
            Family::Ree => {
                let (p, e) = checked_q(family, q)?;
                if p != 3 || e % 2 == 0 || e < 3 {
                    return Err(Error::InvalidQ {
                        family: family.to_string(),
                        q,
                        reason: "expected q = 3^(2m+1) with m >= 1".into(),
                    });
                }
                Self::ree((e - 1) / 2)
            }
        }
    }

    pub fn q(&self) -> u64 {
        match self.kind {
            FrobKind::Split { q } | FrobKind::Triality { q } => q,
            FrobKind::Ree { m } => 3u64.pow(2 * m + 1),
        }
    }

    pub fn p(&self) -> u64 {
        arith::prime_power(self.q()).expect("validated").0
    }

    pub fn twist(&self) -> WeylTwist {
        match self.kind {
            FrobKind::Split { .. } => WeylTwist::Identity,
            FrobKind::Triality { .. } => WeylTwist::Triality,
            FrobKind::Ree { .. } => WeylTwist::Ree,
        }
    }

    pub fn rank(&self) -> usize {
        self.exponent_matrix.rows()
    }
}

/// Exponent action of `σw`: `M_w · E`.
pub fn sigma_w_matrix(config: &FrobConfig, weyl: &WeylGroup, w: usize) -> Result<IntMatrix> {
    let m = weyl.coroot_action(w);
    if m.rows() != config.rank() {
        return Err(Error::DimensionMismatch {
            expected: config.rank(),
            found: m.rows(),
        });
    }
    Ok(&m * &config.exponent_matrix)
}

/// Exponent action of `σn`. The `ℋ` part of `n` acts trivially on the torus.
pub fn sigma_n_matrix(config: &FrobConfig, tits: &TitsGroup, n: TitsElement) -> Result<IntMatrix> {
    sigma_w_matrix(config, tits.weyl(), tits.pi(n))
}

/// Abelian invariants of a finite torus: `d_1 | d_2 | …`, all `> 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusStructure {
    pub invariant_factors: Vec<u64>,
    pub order: u64,
}

impl TorusStructure {
    pub fn is_cyclic(&self) -> bool {
        self.invariant_factors.len() <= 1
    }

    pub fn exponent(&self) -> u64 {
        self.invariant_factors.last().copied().unwrap_or(1)
    }
}

/// Diagonal of the Smith normal form (absolute values, divisibility chain,
/// length `min(rows, cols)`, zeros last).
///
/// Pivots are chosen by least absolute value, ties by least row then column.
pub fn smith_diagonal(m: &IntMatrix) -> Vec<i128> {
    let (r, c) = (m.rows(), m.cols());
    let mut a: Vec<Vec<i128>> = (0..r)
        .map(|i| m.row(i).iter().map(|&x| x as i128).collect())
        .collect();
    let k = r.min(c);
    for t in 0..k {
        loop {
            let pivot = (t..r)
                .flat_map(|i| (t..c).map(move |j| (i, j)))
                .filter(|&(i, j)| a[i][j] != 0)
                .min_by_key(|&(i, j)| (a[i][j].abs(), i, j));
            let Some((pi, pj)) = pivot else { break };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..r {
                let f = a[i][t].div_euclid(a[t][t]);
                if f != 0 {
                    for j in t..c {
                        a[i][j] -= f * a[t][j];
                    }
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..c {
                let f = a[t][j].div_euclid(a[t][t]);
                if f != 0 {
                    for i in t..r {
                        a[i][j] -= f * a[i][t];
                    }
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            let d = a[t][t];
            let offender = (t + 1..r).find(|&i| (t + 1..c).any(|j| a[i][j] % d != 0));
            match offender {
                Some(i) => {
                    for j in t..c {
                        a[t][j] += a[i][j];
                    }
                }
                None => break,
            }
        }
    }
    let mut diag: Vec<i128> = (0..k).map(|i| a[i][i].abs()).collect();
    diag.sort_by_key(|&d| (d == 0, d));
    diag
}

/// Structure of the cokernel of `A - I`.
pub fn fixed_structure(a: &IntMatrix) -> Result<TorusStructure> {
    let b = a - &IntMatrix::identity(a.rows());
    let det = b.det();
    if det == 0 {
        return Err(Error::SingularTwist);
    }
    let diag = smith_diagonal(&b);
    let factors: Vec<u64> = diag.iter().filter(|&&d| d > 1).map(|&d| d as u64).collect();
    let order = factors.iter().product::<u64>();
    debug_assert_eq!(order as i128, det.abs());
    debug_assert!(factors.windows(2).all(|w| w[1] % w[0] == 0));
    Ok(TorusStructure {
        invariant_factors: factors,
        order,
    })
}

/// Minimal `K` with the exponent of `T` dividing `p^K - 1`, and `M = p^K - 1`.
pub fn choose_modulus(structure: &TorusStructure, p: u64) -> Result<(u32, i64)> {
    let d = structure.exponent() as i128;
    let k = arith::multiplicative_order(p as i128, d).ok_or_else(|| {
        Error::NoSolution(format!(
            "p = {p} is not invertible modulo the torus exponent {d}"
        ))
    })?;
    let k = k.max(1) as u32;
    let m = (p as i64)
        .checked_pow(k)
        .map(|x| x - 1)
        .ok_or_else(|| Error::NoSolution(format!("{p}^{k} - 1 overflows")))?;
    Ok((k, m))
}

/// A torus element in exponent coordinates over `Z/M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusVector {
    pub exps: Vec<i64>,
    pub modulus: i64,
}

impl TorusVector {
    pub fn new(exps: Vec<i64>, modulus: i64) -> Self {
        let exps = exps.into_iter().map(|e| e.rem_euclid(modulus)).collect();
        TorusVector { exps, modulus }
    }

    pub fn zero(rank: usize, modulus: i64) -> Self {
        TorusVector {
            exps: vec![0; rank],
            modulus,
        }
    }

    /// `ι(h)`: each `h_i` becomes exponent `M/2` (the element `-1`).
    pub fn from_h(h: u8, rank: usize, modulus: i64) -> Self {
        let exps = (0..rank)
            .map(|i| if h >> i & 1 == 1 { modulus / 2 } else { 0 })
            .collect();
        TorusVector { exps, modulus }
    }

    pub fn is_zero(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.modulus, other.modulus);
        TorusVector {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| (a + b).rem_euclid(self.modulus))
                .collect(),
            modulus: self.modulus,
        }
    }

    pub fn neg(&self) -> Self {
        TorusVector::new(self.exps.iter().map(|e| -e).collect(), self.modulus)
    }

    pub fn scale(&self, k: i64) -> Self {
        let m = self.modulus as i128;
        TorusVector {
            exps: self
                .exps
                .iter()
                .map(|&e| ((e as i128 * k as i128).rem_euclid(m)) as i64)
                .collect(),
            modulus: self.modulus,
        }
    }

    pub fn apply(&self, a: &IntMatrix) -> Self {
        TorusVector {
            exps: a.mul_vec_mod(&self.exps, self.modulus),
            modulus: self.modulus,
        }
    }

    /// Order of the element in `(Z/M)^l`.
    pub fn order(&self) -> i64 {
        self.exps.iter().fold(1i64, |acc, &e| {
            let o = self.modulus / arith::gcd(e as i128, self.modulus as i128) as i64;
            arith::lcm(acc as i128, o as i128) as i64
        })
    }
}

/// `A · v ≡ v (mod M)`, where `M` must be the modulus the caller chose.
pub fn is_fixed_point(v: &TorusVector, a: &IntMatrix, modulus: i64) -> Result<bool> {
    if v.modulus != modulus {
        return Err(Error::ModulusMismatch(v.modulus, modulus));
    }
    if v.exps.len() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            found: v.exps.len(),
        });
    }
    Ok(v.apply(a) == *v)
}

/// Torus orders as listed in the tables, as polynomials in `q`.
pub fn table_order(family: Family, class_id: usize, q: u64) -> Result<i128> {
    let q = q as i128;
    let unknown = || Error::UnknownClass {
        family: family.to_string(),
        class: class_id,
    };
    Ok(match family {
        Family::G2 => match class_id {
            1 => (q - 1) * (q - 1),
            2 | 3 => q * q - 1,
            4 => (q + 1) * (q + 1),
            5 => q * q + q + 1,
            6 => q * q - q + 1,
            _ => return Err(unknown()),
        },
        Family::Ree => {
            let s = ree_sqrt3q(q as u64)? as i128;
            match class_id {
                1 => q - 1,
                2 => q - s + 1,
                3 => q + 1,
                4 => q + s + 1,
                _ => return Err(unknown()),
            }
        }
        Family::Triality => match class_id {
            1 => (q * q * q - 1) * (q - 1),
            2 => (q * q * q - 1) * (q + 1),
            3 => (q * q * q + 1) * (q - 1),
            4 => (q * q + q + 1) * (q * q + q + 1),
            5 => (q * q - q + 1) * (q * q - q + 1),
            6 => q * q * q * q - q * q + 1,
            7 => (q * q * q + 1) * (q + 1),
            _ => return Err(unknown()),
        },
    })
}

/// `√(3q) = 3^{m+1}` for `q = 3^{2m+1}`.
pub fn ree_sqrt3q(q: u64) -> Result<u64> {
    match FrobConfig::for_family(Family::Ree, q)?.kind {
        FrobKind::Ree { m } => Ok(3u64.pow(m + 1)),
        _ => unreachable!(),
    }
}

/// `|C_{W,σ}(w)|` as listed in the tables.
pub fn table_centralizer_order(family: Family, class_id: usize) -> Result<usize> {
    let orders: &[usize] = match family {
        Family::G2 => &[12, 4, 4, 12, 6, 6],
        Family::Ree => &[2, 6, 6, 6],
        Family::Triality => &[12, 4, 4, 24, 24, 4, 12],
    };
    class_id
        .checked_sub(1)
        .and_then(|i| orders.get(i))
        .copied()
        .ok_or(Error::UnknownClass {
            family: family.to_string(),
            class: class_id,
        })
}

/// Everything about one torus class at one `q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusClassReport {
    pub family: Family,
    pub q: u64,
    pub class_id: usize,
    pub representative: String,
    pub centralizer_order: usize,
    pub invariant_factors: Vec<u64>,
    pub order: u64,
    pub expected_order: i128,
    pub order_matches: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

/// Shared context for computing one family's table at one `q`.
#[derive(Clone, Debug)]
pub struct FamilyContext {
    pub family: Family,
    pub config: FrobConfig,
    pub weyl: WeylGroup,
}

impl FamilyContext {
    pub fn new(family: Family, q: u64) -> Result<Self> {
        let config = FrobConfig::for_family(family, q)?;
        let sys = RootSystem::build(family.root_system_type());
        Ok(FamilyContext {
            family,
            config,
            weyl: WeylGroup::new(&sys),
        })
    }

    pub fn representative(&self, class_id: usize) -> Result<usize> {
        let r = self.family.representative_reflections(class_id)?;
        Ok(self.weyl.from_reflections(r))
    }

    pub fn class_report(&self, class_id: usize) -> Result<TorusClassReport> {
        let w = self.representative(class_id)?;
        let a = sigma_w_matrix(&self.config, &self.weyl, w)?;
        let st = fixed_structure(&a)?;
        let q = self.config.q();
        let expected = table_order(self.family, class_id, q)?;
        let mut notes = Vec::new();
        if self.family == Family::Ree && (class_id == 1 || class_id == 2) {
            notes.push(
                "table row lists the parameter set z^(q-sqrt(3q)+1)=1 under order q-1 and \
                 z^(q-1)=1 under order q-sqrt(3q)+1; the recomputed order follows the \
                 per-class derivation"
                    .into(),
            );
        }
        Ok(TorusClassReport {
            family: self.family,
            q,
            class_id,
            representative: self.family.representative_label(class_id)?,
            centralizer_order: self.weyl.centralizer_sigma(self.config.twist(), w).len(),
            order: st.order,
            order_matches: st.order as i128 == expected,
            invariant_factors: st.invariant_factors,
            expected_order: expected,
            notes,
        })
    }
}
