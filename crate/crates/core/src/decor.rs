//! δ-stability calculus for decorated sheaves in the coordinate-flag model:
//! `M`, `L`, `μ(E•, α; φ)`, δ- and asymptotic (semi)stability over explicit
//! filtration families, effective thresholds, candidate walls and chambers.
//!
//! Filtrations are numeric shadows (ranks, weights, sub-Hilbert polynomials)
//! evaluated against the generic tensor of the decoration in a chosen frame.
//! Verdicts are therefore relative to the supplied family; an `Unstable`
//! verdict always comes with a concrete violating member.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fans::{self, TestSet};
use crate::kempf::{self, Stability};
use crate::ratcore::{int, serde_rat, Rational, RatPolynomial};
use crate::rep::{gamma_vector, index_tuples, TensorPoint, WeightedFlag};

/// Rank, Hilbert polynomial and the Hilbert polynomial of `O_X`, which fixes
/// the degree convention `deg F = coeff_{n−1}(P_F) − rk F · coeff_{n−1}(P_O)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SheafNumerics {
    pub rank: usize,
    pub hilbert: RatPolynomial,
    pub structure: RatPolynomial,
    pub dim_x: usize,
}

impl SheafNumerics {
    /// Curve of genus `g`: `P(x) = d + r·(x + 1 − g)`.
    pub fn curve(rank: usize, degree: i64, genus: i64) -> Self {
        let structure = RatPolynomial::from_ints(&[1 - genus, 1]);
        let hilbert = &structure.scale(&int(rank as i64)) + &RatPolynomial::constant(int(degree));
        Self { rank, hilbert, structure, dim_x: 1 }
    }

    pub fn new(rank: usize, hilbert: RatPolynomial, structure: RatPolynomial) -> Result<Self> {
        let dim_x = structure
            .degree()
            .filter(|&n| n >= 1 && structure.is_positive())
            .ok_or_else(|| Error::Parameter("structure polynomial must have positive degree".into()))?;
        if rank == 0 {
            return Err(Error::Dimension("rank must be positive".into()));
        }
        if hilbert.degree() != Some(dim_x) || !hilbert.is_positive() {
            return Err(Error::Parameter(format!("Hilbert polynomial must have degree {dim_x}")));
        }
        Ok(Self { rank, hilbert, structure, dim_x })
    }

    pub fn degree_of(&self, p: &RatPolynomial, rk: usize) -> Rational {
        let k = self.dim_x - 1;
        p.coeff(k) - int(rk as i64) * self.structure.coeff(k)
    }

    pub fn degree(&self) -> Rational {
        self.degree_of(&self.hilbert, self.rank)
    }

    /// The Hilbert polynomial `rk·P_O + deg·x^{n−1}` of a rank-`rk` subsheaf.
    pub fn sub_hilbert(&self, rk: usize, degree: &Rational) -> RatPolynomial {
        &self.structure.scale(&int(rk as i64)) + &RatPolynomial::monomial(degree.clone(), self.dim_x - 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationNumerics {
    pub flag: WeightedFlag,
    /// `P(E_i)` for the `s` proper levels.
    pub sub_hilberts: Vec<RatPolynomial>,
    pub saturated: bool,
}

impl FiltrationNumerics {
    pub fn new(flag: WeightedFlag, sub_hilberts: Vec<RatPolynomial>) -> Result<Self> {
        if sub_hilberts.len() != flag.len() {
            return Err(Error::Dimension(format!(
                "{} sub-Hilbert polynomials for a flag of length {}",
                sub_hilberts.len(),
                flag.len()
            )));
        }
        let n = sub_hilberts.first().and_then(|p| p.degree());
        if sub_hilberts.iter().any(|p| p.degree() != n || !p.is_positive()) {
            return Err(Error::Parameter("sub-Hilbert polynomials need a common degree and positive lead".into()));
        }
        Ok(Self { flag, sub_hilberts, saturated: true })
    }

    pub fn from_degrees(sheaf: &SheafNumerics, flag: WeightedFlag, degrees: &[Rational]) -> Result<Self> {
        if degrees.len() != flag.len() {
            return Err(Error::Dimension("one sub-degree per proper level expected".into()));
        }
        let hs = flag.ranks().iter().zip(degrees).map(|(&k, e)| sheaf.sub_hilbert(k, e)).collect();
        Self::new(flag, hs)
    }

    pub fn degrees(&self, sheaf: &SheafNumerics) -> Vec<Rational> {
        self.flag
            .ranks()
            .iter()
            .zip(&self.sub_hilberts)
            .map(|(&k, p)| sheaf.degree_of(p, k))
            .collect()
    }
}

fn check_ranks(sheaf: &SheafNumerics, filt: &FiltrationNumerics) -> Result<()> {
    if filt.flag.ambient_rank() != sheaf.rank {
        return Err(Error::Dimension(format!(
            "flag of ambient rank {} on a sheaf of rank {}",
            filt.flag.ambient_rank(),
            sheaf.rank
        )));
    }
    if let Some(p) = filt.sub_hilberts.first() {
        if p.degree() != Some(sheaf.dim_x) {
            return Err(Error::Dimension("sub-Hilbert polynomials must have degree dim X".into()));
        }
    }
    Ok(())
}

/// `M = Σ α_i (P·r_i − P_i·r)` and its `x^{dim X − 1}` coefficient `L`.
pub fn m_and_l(sheaf: &SheafNumerics, filt: &FiltrationNumerics) -> Result<(RatPolynomial, Rational)> {
    check_ranks(sheaf, filt)?;
    let r = int(sheaf.rank as i64);
    let mut m = RatPolynomial::zero();
    for ((&ri, pi), ai) in filt.flag.ranks().iter().zip(&filt.sub_hilberts).zip(filt.flag.alphas()) {
        let term = &sheaf.hilbert.scale(&int(ri as i64)) - &pi.scale(&r);
        m = &m + &term.scale(ai);
    }
    let l = m.coeff(sheaf.dim_x - 1);
    Ok((m, l))
}

/// Degree of the character line bundle, telescoped over graded pieces:
/// `Σ_j γ^(j) (deg E_j − deg E_{j−1})` with `E_0 = 0`, `E_{s+1} = E`.
pub fn character_line_degree(sheaf: &SheafNumerics, filt: &FiltrationNumerics) -> Result<Rational> {
    check_ranks(sheaf, filt)?;
    let gamma = gamma_vector(&filt.flag).block_values;
    let mut degs = filt.degrees(sheaf);
    degs.push(sheaf.degree());
    let mut prev = Rational::zero();
    let mut total = Rational::zero();
    for (g, e) in gamma.iter().zip(&degs) {
        total += g * (e - &prev);
        prev = e.clone();
    }
    Ok(total)
}

/// `μ = −min Σ_l γ^(j_l)` over level tuples on which `φ` does not vanish; in
/// the coordinate model the best tuple for a coefficient at `(i₁…i_a)` puts
/// each `i_l` in its own level.
pub fn mu_of_flag(flag: &WeightedFlag, w: &TensorPoint) -> Result<Rational> {
    if flag.ambient_rank() != w.r() {
        return Err(Error::Dimension("flag and tensor ranks differ".into()));
    }
    let gamma = gamma_vector(flag).block_values;
    let level_val: Vec<Rational> = (1..=w.r()).map(|p| gamma[flag.level_of(p) - 1].clone()).collect();
    let min = w
        .coeffs()
        .keys()
        .map(|(idx, _)| idx.iter().map(|&i| level_val[i - 1].clone()).sum::<Rational>())
        .min()
        .expect("valid points are nonzero");
    Ok(-min)
}

pub fn mu_decoration(filt: &FiltrationNumerics, w: &TensorPoint) -> Result<Rational> {
    mu_of_flag(&filt.flag, w)
}

/// All values `−Σ_l γ^(j_l)` over level tuples, i.e. every μ a vanishing
/// pattern can produce for this flag.
pub fn mu_values_of_flag(flag: &WeightedFlag, a: usize) -> BTreeSet<Rational> {
    let gamma = gamma_vector(flag).block_values;
    index_tuples(a, gamma.len())
        .into_iter()
        .map(|t| -t.iter().map(|&j| gamma[j - 1].clone()).sum::<Rational>())
        .collect()
}

/// Frame in which a coordinate flag is read.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    #[default]
    Identity,
    /// `E_j` is spanned by the original basis vectors `perm[0..r_j]` (0-based).
    Permutation(Vec<usize>),
    /// `E_j` is spanned by the first `r_j` vectors of the new basis `g`.
    Matrix(#[serde(with = "crate::ratcore::serde_rat_mat")] Vec<Vec<Rational>>),
}

impl Frame {
    pub fn apply(&self, w: &TensorPoint) -> Result<TensorPoint> {
        match self {
            Frame::Identity => Ok(w.clone()),
            Frame::Permutation(perm) => {
                let mut inv = vec![usize::MAX; perm.len()];
                for (k, &i) in perm.iter().enumerate() {
                    if i >= perm.len() || inv[i] != usize::MAX {
                        return Err(Error::Parameter(format!("{perm:?} is not a permutation")));
                    }
                    inv[i] = k;
                }
                w.permute(&inv)
            }
            Frame::Matrix(g) => w.transform(g),
        }
    }
}

/// All `r!` permutation frames in lexicographic order.
pub fn permutation_frames(r: usize) -> Vec<Frame> {
    let base: Vec<i64> = (0..r as i64).collect();
    fans::weyl_translates(&[base])
        .into_iter()
        .map(|p| Frame::Permutation(p.into_iter().map(|x| x as usize).collect()))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyMember {
    pub filt: FiltrationNumerics,
    pub frame: Frame,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoratedConfig {
    pub sheaf: SheafNumerics,
    pub a: usize,
    pub b: usize,
    pub c: i64,
    pub d_lambda: Rational,
    pub generic_point: TensorPoint,
}

impl DecoratedConfig {
    pub fn new(
        sheaf: SheafNumerics,
        a: usize,
        b: usize,
        c: i64,
        d_lambda: Rational,
        generic_point: TensorPoint,
    ) -> Result<Self> {
        let w = &generic_point;
        if (w.r(), w.a(), w.b(), w.c()) != (sheaf.rank, a, b, c) {
            return Err(Error::Dimension(format!(
                "point of type (r,a,b,c) = ({},{},{},{}) for a ({},{},{},{}) decoration",
                w.r(),
                w.a(),
                w.b(),
                w.c(),
                sheaf.rank,
                a,
                b,
                c
            )));
        }
        Ok(Self { sheaf, a, b, c, d_lambda, generic_point })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MemberValue {
    pub index: usize,
    pub m: RatPolynomial,
    #[serde(with = "serde_rat")]
    pub mu: Rational,
    pub value: RatPolynomial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub stability: Stability,
    /// Verdicts only quantify over the supplied family.
    pub relative_to_family: bool,
    pub family_size: usize,
    /// The violating member for `Unstable`, a member at value zero for
    /// `Semistable`.
    pub certificate: Option<MemberValue>,
    pub reason: String,
}

fn check_delta(sheaf: &SheafNumerics, delta: &RatPolynomial) -> Result<()> {
    if !delta.is_positive() {
        return Err(Error::Parameter(format!("δ = {delta} is not positive")));
    }
    if delta.degree().is_some_and(|k| k + 1 > sheaf.dim_x) {
        return Err(Error::Parameter(format!("δ = {delta} has degree ≥ dim X")));
    }
    Ok(())
}

/// `(M, μ)` of each family member.
pub fn member_values(config: &DecoratedConfig, family: &[FamilyMember]) -> Result<Vec<(RatPolynomial, Rational)>> {
    let mut points: BTreeMap<usize, TensorPoint> = BTreeMap::new();
    let mut frames: Vec<&Frame> = Vec::new();
    family
        .iter()
        .map(|m| {
            let (mm, _) = m_and_l(&config.sheaf, &m.filt)?;
            let slot = match frames.iter().position(|f| **f == m.frame) {
                Some(i) => i,
                None => {
                    frames.push(&m.frame);
                    points.insert(frames.len() - 1, m.frame.apply(&config.generic_point)?);
                    frames.len() - 1
                }
            };
            let mu = mu_of_flag(&m.filt.flag, &points[&slot])?;
            Ok((mm, mu))
        })
        .collect()
}

fn classify(
    values: impl Iterator<Item = (usize, RatPolynomial, Rational, RatPolynomial)>,
    family_size: usize,
    reason_unstable: &str,
) -> Verdict {
    let mut zero: Option<MemberValue> = None;
    for (index, m, mu, value) in values {
        if value.signum().is_lt() {
            return Verdict {
                stability: Stability::Unstable,
                relative_to_family: true,
                family_size,
                certificate: Some(MemberValue { index, m, mu, value }),
                reason: reason_unstable.into(),
            };
        }
        if value.is_zero() && zero.is_none() {
            zero = Some(MemberValue { index, m, mu, value });
        }
    }
    let stability = if zero.is_some() { Stability::Semistable } else { Stability::Stable };
    Verdict { stability, relative_to_family: true, family_size, certificate: zero, reason: String::new() }
}

pub fn delta_semistable(config: &DecoratedConfig, delta: &RatPolynomial, family: &[FamilyMember]) -> Result<Verdict> {
    check_delta(&config.sheaf, delta)?;
    if family.is_empty() {
        return Err(Error::Parameter("empty filtration family".into()));
    }
    let vals = member_values(config, family)?;
    let it = vals.into_iter().enumerate().map(|(i, (m, mu))| {
        let v = &m + &delta.scale(&mu);
        (i, m, mu, v)
    });
    Ok(classify(it, family.len(), "M + δ·μ ≺ 0"))
}

/// Condition a) on the generic point under the identity and the supplied
/// basis changes, then condition b) on the members with `μ = 0`.
pub fn asymptotically_semistable(
    config: &DecoratedConfig,
    family: &[FamilyMember],
    basis_changes: &[Vec<Vec<Rational>>],
) -> Result<Verdict> {
    if !kempf::semistable_under(&config.generic_point, basis_changes)? {
        return Ok(Verdict {
            stability: Stability::Unstable,
            relative_to_family: true,
            family_size: family.len(),
            certificate: None,
            reason: "generic point is torus-unstable".into(),
        });
    }
    let vals = member_values(config, family)?;
    let it = vals
        .into_iter()
        .enumerate()
        .filter(|(_, (_, mu))| mu.is_zero())
        .map(|(i, (m, mu))| (i, m.clone(), mu, m));
    Ok(classify(it, family.len(), "M ≺ 0 on a filtration with μ = 0"))
}

/// Candidate sub-Hilbert polynomials per rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubBounds {
    /// Inclusive integer degree intervals.
    Degrees(BTreeMap<usize, (i64, i64)>),
    Hilberts(BTreeMap<usize, Vec<RatPolynomial>>),
}

impl SubBounds {
    pub fn candidates(&self, sheaf: &SheafNumerics, rk: usize) -> Result<Vec<RatPolynomial>> {
        let out: Vec<RatPolynomial> = match self {
            SubBounds::Degrees(m) => match m.get(&rk) {
                Some(&(lo, hi)) => (lo..=hi).map(|e| sheaf.sub_hilbert(rk, &int(e))).collect(),
                None => Vec::new(),
            },
            SubBounds::Hilberts(m) => m.get(&rk).cloned().unwrap_or_default(),
        };
        if out.is_empty() {
            return Err(Error::Parameter(format!("empty sub-sheaf bounds for rank {rk}")));
        }
        Ok(out)
    }
}

fn cartesian<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    lists.iter().fold(vec![Vec::new()], |acc, l| {
        acc.into_iter()
            .flat_map(|pre| {
                l.iter().map(move |x| {
                    let mut v = pre.clone();
                    v.push(x.clone());
                    v
                })
            })
            .collect()
    })
}

/// Signatures × frames × all sub-Hilbert tuples inside the bounds.
pub fn bounded_family(
    sheaf: &SheafNumerics,
    signatures: &[WeightedFlag],
    bounds: &SubBounds,
    frames: &[Frame],
) -> Result<Vec<FamilyMember>> {
    let mut out = Vec::new();
    for sig in signatures {
        let lists = sig
            .ranks()
            .iter()
            .map(|&k| bounds.candidates(sheaf, k))
            .collect::<Result<Vec<_>>>()?;
        for hs in cartesian(&lists) {
            let filt = FiltrationNumerics::new(sig.clone(), hs)?;
            for f in frames {
                out.push(FamilyMember { filt: filt.clone(), frame: f.clone() });
            }
        }
    }
    Ok(out)
}

/// Numeric class of decorated sheaves sharing `(r, P, a, b, c, deg Λ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigClass {
    pub r: usize,
    pub d: i64,
    #[serde(rename = "dimX", default = "one")]
    pub dim_x: usize,
    #[serde(default)]
    pub genus: i64,
    pub a: usize,
    pub b: usize,
    pub c: i64,
    #[serde(rename = "dLambda", with = "serde_rat")]
    pub d_lambda: Rational,
    /// Required when `dimX > 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hilbert: Option<RatPolynomial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<RatPolynomial>,
}

fn one() -> usize {
    1
}

impl ConfigClass {
    pub fn curve(r: usize, d: i64, a: usize, b: usize, c: i64, d_lambda: i64) -> Self {
        Self { r, d, dim_x: 1, genus: 0, a, b, c, d_lambda: int(d_lambda), hilbert: None, structure: None }
    }

    pub fn sheaf(&self) -> Result<SheafNumerics> {
        if self.dim_x == 1 && self.hilbert.is_none() {
            return Ok(SheafNumerics::curve(self.r, self.d, self.genus));
        }
        let (Some(p), Some(o)) = (&self.hilbert, &self.structure) else {
            return Err(Error::Parameter("dimX > 1 needs both hilbert and structure polynomials".into()));
        };
        let s = SheafNumerics::new(self.r, p.clone(), o.clone())?;
        if s.dim_x != self.dim_x || s.degree() != int(self.d) {
            return Err(Error::Parameter("hilbert data disagree with dimX or d".into()));
        }
        Ok(s)
    }
}

/// One `(M, μ)` pair producing a wall `−M/μ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallSource {
    pub m: RatPolynomial,
    #[serde(with = "serde_rat")]
    pub mu: Rational,
    /// Test-set entries (0-based) whose flags produced `M` and `μ`.
    pub m_signature: usize,
    pub mu_signature: usize,
    /// Common denominator of the weights of the `μ` signature; multiplying
    /// `M` and `μ` of one flag by it gives integral-normalization values.
    #[serde(with = "serde_rat")]
    pub scale: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chamber {
    pub lower: RatPolynomial,
    /// `None` for the unbounded top chamber.
    pub upper: Option<RatPolynomial>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallReport {
    pub walls: Vec<RatPolynomial>,
    pub chambers: Vec<Chamber>,
    pub provenance: Vec<Vec<WallSource>>,
    /// Per wall, whether a single filtration changes sign across it; only
    /// filled by the verify pass.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confirmed: Option<Vec<bool>>,
    #[serde(default)]
    pub test_set: Vec<WeightedFlag>,
}

fn alpha_scale(flag: &WeightedFlag) -> Rational {
    let l = flag.alphas().iter().fold(BigInt::one(), |acc, a| acc.lcm(a.denom()));
    Rational::from_integer(l)
}

pub fn candidate_walls(class: &ConfigClass, bounds: &SubBounds, verify: bool) -> Result<WallReport> {
    let sheaf = class.sheaf()?;
    let ts = fans::test_set(class.a, class.b, class.c, class.r)?;
    candidate_walls_for(&sheaf, class.a, &ts, bounds, verify)
}

/// Walls `{−Q/z ≻ 0}` with `Q` over all `M` values and `z` over all nonzero
/// `μ` values attainable with test-set signatures.
pub fn candidate_walls_for(
    sheaf: &SheafNumerics,
    a: usize,
    ts: &TestSet,
    bounds: &SubBounds,
    verify: bool,
) -> Result<WallReport> {
    let mut us: BTreeSet<(RatPolynomial, usize)> = BTreeSet::new();
    let mut vs: BTreeSet<(Rational, usize)> = BTreeSet::new();
    for (si, sig) in ts.entries.iter().enumerate() {
        let lists = sig
            .ranks()
            .iter()
            .map(|&k| bounds.candidates(sheaf, k))
            .collect::<Result<Vec<_>>>()?;
        for hs in cartesian(&lists) {
            let filt = FiltrationNumerics::new(sig.clone(), hs)?;
            us.insert((m_and_l(sheaf, &filt)?.0, si));
        }
        for z in mu_values_of_flag(sig, a) {
            if !z.is_zero() {
                vs.insert((z, si));
            }
        }
    }
    let mut walls: BTreeMap<RatPolynomial, Vec<WallSource>> = BTreeMap::new();
    for (q, qs) in &us {
        for (z, zs) in &vs {
            let w = q.scale(&-z.recip());
            if w.is_positive() {
                walls.entry(w).or_default().push(WallSource {
                    m: q.clone(),
                    mu: z.clone(),
                    m_signature: *qs,
                    mu_signature: *zs,
                    scale: alpha_scale(&ts.entries[*zs]),
                });
            }
        }
    }
    let (walls, provenance): (Vec<_>, Vec<_>) = walls.into_iter().unzip();
    let confirmed = verify.then(|| {
        provenance
            .iter()
            .map(|srcs: &Vec<WallSource>| srcs.iter().any(|s| s.m_signature == s.mu_signature))
            .collect()
    });
    Ok(WallReport { chambers: chambers_of(&walls), walls, provenance, confirmed, test_set: ts.entries.clone() })
}

pub fn chambers_of(walls: &[RatPolynomial]) -> Vec<Chamber> {
    let mut lower = RatPolynomial::zero();
    let mut out = Vec::new();
    for w in walls {
        out.push(Chamber { lower: lower.clone(), upper: Some(w.clone()) });
        lower = w.clone();
    }
    out.push(Chamber { lower, upper: None });
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChamberClass {
    /// 1-based wall index.
    OnWall { index: usize },
    /// Between walls `index` and `index + 1` (1-based).
    InChamber { index: usize, lower: RatPolynomial, upper: RatPolynomial },
    TopChamber,
    BottomChamber,
}

pub fn chamber_report(walls: &[RatPolynomial], delta: &RatPolynomial) -> Result<ChamberClass> {
    if !delta.is_positive() {
        return Err(Error::Parameter(format!("δ = {delta} is not positive")));
    }
    if let Some(i) = walls.iter().position(|w| w == delta) {
        return Ok(ChamberClass::OnWall { index: i + 1 });
    }
    let below = walls.iter().filter(|w| *w < delta).count();
    Ok(match below {
        k if k == walls.len() => ChamberClass::TopChamber,
        0 => ChamberClass::BottomChamber,
        k => ChamberClass::InChamber { index: k, lower: walls[k - 1].clone(), upper: walls[k].clone() },
    })
}

/// `n_{r − rk F}` keyed by `r − rk F`.
pub type NPerRank = BTreeMap<usize, i64>;

/// `δ₀ = max{0, deg Λ}` and `δ₁ = max{δ₀, −C}` with
/// `C = min_T Σ α_i (d(r_i − r) − n_{r−r_i}·deg Λ·r)`.
pub fn delta_bounds(class: &ConfigClass, ts: &TestSet, n_per_rank: &NPerRank) -> Result<(Rational, Rational)> {
    let zero = Rational::zero();
    let delta0 = class.d_lambda.clone().max(zero);
    let r = class.r as i64;
    let d = int(class.d);
    let mut c: Option<Rational> = None;
    for sig in &ts.entries {
        let mut sum = Rational::zero();
        for (&ri, ai) in sig.ranks().iter().zip(sig.alphas()) {
            let k = class.r - ri;
            let n = n_per_rank
                .get(&k)
                .ok_or_else(|| Error::Parameter(format!("missing n for corank {k}")))?;
            sum += ai * (&d * int(ri as i64 - r) - int(*n) * &class.d_lambda * int(r));
        }
        c = Some(match c {
            Some(prev) => prev.min(sum),
            None => sum,
        });
    }
    let c = c.unwrap_or_else(Rational::zero);
    let delta1 = delta0.clone().max(-c);
    Ok((delta0, delta1))
}

fn ceil_rat(x: &Rational) -> i64 {
    x.ceil().to_integer().to_i64().expect("bound fits in i64")
}

fn floor_rat(x: &Rational) -> i64 {
    x.floor().to_integer().to_i64().expect("bound fits in i64")
}

/// Default degree box per rank `k`: `[⌈k(d/r − C₃)⌉, ⌊k(d/r + C₂)⌋]`.
///
/// `C₁` comes from `deg F ≤ d + n_{r−k}·deg Λ`, `C₂ = max{0, C₁, δ̄∞·a(r−1)/r}`
/// with `δ̄∞ = δ₁ + 1`. Every term of `L` is then at least `−α_i·C₂′` with
/// `C₂′ = C₂(r−1)r`, and `C₃` is the smallest slope drop of one level that
/// forces `L > δ̄∞·a·Σα_i(r−1)` for every test-set signature.
pub fn default_degree_bounds(class: &ConfigClass, ts: &TestSet, n_per_rank: &NPerRank) -> Result<BTreeMap<usize, (i64, i64)>> {
    let r = class.r;
    let ri = int(r as i64);
    let d = int(class.d);
    let slope = &d / &ri;
    let (_, delta1) = delta_bounds(class, ts, n_per_rank)?;
    let dinf = delta1 + int(1);
    let mut c1 = Rational::zero();
    for k in 1..r {
        let n = n_per_rank.get(&(r - k)).copied().unwrap_or(0);
        let bound = (&d + int(n) * &class.d_lambda) / int(k as i64) - &slope;
        c1 = c1.max(bound);
    }
    let a = int(class.a as i64);
    let c2 = c1.max(&dinf * &a * int(r as i64 - 1) / &ri).max(Rational::zero());
    let c2p = &c2 * int(r as i64 - 1) * &ri;
    let mut c3 = Rational::one();
    for sig in &ts.entries {
        let sum_alpha: Rational = sig.alphas().iter().sum();
        for (&r0, a0) in sig.ranks().iter().zip(sig.alphas()) {
            let others = &sum_alpha - a0;
            let need = (&dinf * &a * int(r as i64 - 1) * &sum_alpha + &c2p * others) / (a0 * &ri * int(r0 as i64));
            c3 = c3.max(need);
        }
    }
    Ok((1..r)
        .map(|k| {
            let kk = int(k as i64);
            (k, (ceil_rat(&(&kk * (&slope - &c3))), floor_rat(&(&kk * (&slope + &c2)))))
        })
        .collect())
}

/// Split-bundle model `E = ⊕ O(D_k)` on a genus-`g` curve: the coefficient of
/// `φ` at `(i₁…i_a)` may be nonzero only if `Σ D_{i_l} ≤ c·d + deg Λ`, and
/// coordinate subsheaves in a permuted basis have partial-sum degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitBundle {
    pub degrees: Vec<i64>,
    pub genus: i64,
}

impl SplitBundle {
    pub fn degree(&self) -> i64 {
        self.degrees.iter().sum()
    }

    pub fn sheaf(&self) -> SheafNumerics {
        SheafNumerics::curve(self.degrees.len(), self.degree(), self.genus)
    }

    pub fn allowed(&self, idx: &[usize], c: i64, d_lambda: i64) -> bool {
        let s: i64 = idx.iter().map(|&i| self.degrees[i - 1]).sum();
        s <= c * self.degree() + d_lambda
    }

    /// Family of coordinate filtrations: each signature in each permuted frame
    /// with sub-degrees read off the split summands.
    pub fn family(&self, signatures: &[WeightedFlag]) -> Result<Vec<FamilyMember>> {
        let sheaf = self.sheaf();
        let r = self.degrees.len();
        let mut out = Vec::new();
        for frame in permutation_frames(r) {
            let Frame::Permutation(perm) = &frame else { unreachable!() };
            let partial: Vec<i64> = perm
                .iter()
                .scan(0, |acc, &i| {
                    *acc += self.degrees[i];
                    Some(*acc)
                })
                .collect();
            for sig in signatures {
                let degs: Vec<Rational> = sig.ranks().iter().map(|&k| int(partial[k - 1])).collect();
                let filt = FiltrationNumerics::from_degrees(&sheaf, sig.clone(), &degs)?;
                out.push(FamilyMember { filt, frame: frame.clone() });
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratcore::rat;
    use proptest::prelude::*;

    fn flag(r: usize, ranks: &[usize], alphas: &[Rational]) -> WeightedFlag {
        WeightedFlag::new(r, ranks.to_vec(), alphas.to_vec()).unwrap()
    }

    fn curve_filt(sheaf: &SheafNumerics, f: WeightedFlag, degs: &[i64]) -> FiltrationNumerics {
        let d: Vec<Rational> = degs.iter().map(|&x| int(x)).collect();
        FiltrationNumerics::from_degrees(sheaf, f, &d).unwrap()
    }

    fn pt(r: usize, a: usize, tuples: &[&[usize]]) -> TensorPoint {
        let t: Vec<Vec<usize>> = tuples.iter().map(|x| x.to_vec()).collect();
        TensorPoint::from_support(r, a, 0, &t).unwrap()
    }

    fn c(x: i64) -> RatPolynomial {
        RatPolynomial::constant(int(x))
    }

    #[test]
    fn m_and_l_examples() {
        let s = SheafNumerics::curve(2, 0, 0);
        let f = curve_filt(&s, flag(2, &[1], &[int(1)]), &[-1]);
        assert_eq!(m_and_l(&s, &f).unwrap(), (c(2), int(2)));
        let s = SheafNumerics::curve(2, 3, 2);
        let f = curve_filt(&s, flag(2, &[1], &[int(1)]), &[1]);
        assert_eq!(m_and_l(&s, &f).unwrap().1, int(1));
        let s = SheafNumerics::curve(4, 6, 1);
        let f = curve_filt(&s, flag(4, &[2], &[int(1)]), &[3]);
        assert_eq!(m_and_l(&s, &f).unwrap().1, int(0));
        let wrong = curve_filt(&SheafNumerics::curve(3, 0, 0), flag(3, &[1], &[int(1)]), &[0]);
        assert!(matches!(m_and_l(&s, &wrong), Err(Error::Dimension(_))));
    }

    #[test]
    fn surface_m_keeps_the_full_polynomial() {
        // P_O = x²/2 + 3x/2 + 1 on the plane
        let o = RatPolynomial::new(vec![int(1), rat(3, 2), rat(1, 2)]);
        let p = &o.scale(&int(2)) + &RatPolynomial::from_ints(&[0, 1]);
        let s = SheafNumerics::new(2, p, o.clone()).unwrap();
        assert_eq!(s.degree(), int(1));
        // a rank-one subsheaf of degree 0 with a twisted constant term
        let p1 = &o + &RatPolynomial::constant(int(-1));
        let f = FiltrationNumerics::new(flag(2, &[1], &[int(1)]), vec![p1]).unwrap();
        let (m, l) = m_and_l(&s, &f).unwrap();
        assert_eq!(l, int(1));
        assert_eq!(m, RatPolynomial::from_ints(&[2, 1]));
        assert_eq!(character_line_degree(&s, &f).unwrap(), l);
    }

    #[test]
    fn mu_decoration_examples() {
        let f = flag(2, &[1], &[int(1)]);
        assert_eq!(mu_of_flag(&f, &pt(2, 1, &[&[1]])).unwrap(), int(1));
        assert_eq!(mu_of_flag(&f, &pt(2, 1, &[&[2]])).unwrap(), int(-1));
        assert_eq!(mu_of_flag(&f, &pt(2, 2, &[&[2, 2]])).unwrap(), int(-2));
        // the flag of −λ pairs like μ_κ(λ, ·)
        let w = pt(3, 2, &[&[1, 2], &[3, 3]]);
        let g = flag(3, &[1, 2], &[int(1), int(1)]);
        let gamma = gamma_vector(&g).entry_values;
        let lam: Vec<i64> = gamma.iter().map(|x| -x.to_integer().to_i64().unwrap()).collect();
        let l = crate::rep::OneParamSubgroup::new(lam).unwrap();
        assert_eq!(mu_of_flag(&g, &w).unwrap(), crate::rep::mu_kappa(&l, &w).unwrap());
    }

    #[test]
    fn character_line_degree_examples() {
        let s = SheafNumerics::curve(2, 3, 0);
        let f = curve_filt(&s, flag(2, &[1], &[int(1)]), &[1]);
        assert_eq!(character_line_degree(&s, &f).unwrap(), int(1));
        let s = SheafNumerics::curve(3, 0, 0);
        let f = curve_filt(&s, flag(3, &[1, 2], &[rat(1, 3), rat(1, 3)]), &[-1, -1]);
        assert_eq!(character_line_degree(&s, &f).unwrap(), int(2));
    }

    fn thaddeus(d: i64, coords: &[&[usize]]) -> DecoratedConfig {
        DecoratedConfig::new(SheafNumerics::curve(2, d, 0), 1, 1, 0, int(0), pt(2, 1, coords)).unwrap()
    }

    #[test]
    fn delta_semistable_examples() {
        let cfg = thaddeus(3, &[&[2]]);
        let fam = vec![FamilyMember {
            filt: curve_filt(&cfg.sheaf, flag(2, &[1], &[int(1)]), &[1]),
            frame: Frame::Identity,
        }];
        let v = delta_semistable(&cfg, &RatPolynomial::constant(rat(1, 2)), &fam).unwrap();
        assert_eq!(v.stability, Stability::Stable);
        let v = delta_semistable(&cfg, &c(2), &fam).unwrap();
        assert_eq!(v.stability, Stability::Unstable);
        assert_eq!(v.certificate.unwrap().value, c(-1));
        let v = delta_semistable(&cfg, &c(1), &fam).unwrap();
        assert_eq!(v.stability, Stability::Semistable);
        assert!(delta_semistable(&cfg, &c(0), &fam).is_err());
        assert!(delta_semistable(&cfg, &RatPolynomial::from_ints(&[0, 1]), &fam).is_err());
    }

    #[test]
    fn asymptotic_examples() {
        let unstable = thaddeus(3, &[&[1]]);
        let fam = bounded_family(
            &unstable.sheaf,
            &[flag(2, &[1], &[int(1)])],
            &SubBounds::Degrees(BTreeMap::from([(1, (0, 1))])),
            &permutation_frames(2),
        )
        .unwrap();
        assert_eq!(asymptotically_semistable(&unstable, &fam, &[]).unwrap().stability, Stability::Unstable);
        let both = thaddeus(3, &[&[1], &[2]]);
        let v = asymptotically_semistable(&both, &fam, &[]).unwrap();
        assert!(v.stability.is_semistable());
        // a = 2: φ on e1⊗e2 gives μ = 0 for the rank-one flag, and d r₁ − e₁ r = −1
        let cfg = DecoratedConfig::new(SheafNumerics::curve(2, 1, 0), 2, 1, 0, int(0), pt(2, 2, &[&[1, 2]])).unwrap();
        let fam = vec![FamilyMember {
            filt: curve_filt(&cfg.sheaf, flag(2, &[1], &[int(1)]), &[1]),
            frame: Frame::Identity,
        }];
        let v = asymptotically_semistable(&cfg, &fam, &[]).unwrap();
        assert_eq!(v.stability, Stability::Unstable);
        assert_eq!(v.certificate.unwrap().m, c(-1));
    }

    fn walls_of(r: usize, d: i64, a: usize, lo: i64, hi: i64) -> Vec<RatPolynomial> {
        let class = ConfigClass::curve(r, d, a, 1, 0, 0);
        let b = SubBounds::Degrees((1..r).map(|k| (k, (lo, hi))).collect());
        candidate_walls(&class, &b, false).unwrap().walls
    }

    #[test]
    fn candidate_wall_examples() {
        assert_eq!(walls_of(2, 3, 1, 0, 1), vec![c(1), c(3)]);
        assert_eq!(walls_of(2, 0, 1, -2, 0), vec![c(2), c(4)]);
        assert!(walls_of(2, 3, 0, 0, 1).is_empty());
        let class = ConfigClass::curve(2, 3, 1, 1, 0, 0);
        let empty = SubBounds::Degrees(BTreeMap::from([(1, (2, 1))]));
        assert!(matches!(candidate_walls(&class, &empty, false), Err(Error::Parameter(_))));
        let rep = candidate_walls(&class, &SubBounds::Degrees(BTreeMap::from([(1, (0, 1))])), true).unwrap();
        assert_eq!(rep.confirmed, Some(vec![true, true]));
        assert_eq!(rep.chambers.len(), 3);
    }

    #[test]
    fn chamber_report_examples() {
        let walls = vec![c(1), c(3)];
        assert!(matches!(chamber_report(&walls, &c(2)).unwrap(), ChamberClass::InChamber { index: 1, .. }));
        assert_eq!(chamber_report(&walls, &c(3)).unwrap(), ChamberClass::OnWall { index: 2 });
        assert_eq!(chamber_report(&walls, &c(7)).unwrap(), ChamberClass::TopChamber);
        assert_eq!(chamber_report(&walls, &RatPolynomial::constant(rat(1, 2))).unwrap(), ChamberClass::BottomChamber);
        assert_eq!(chamber_report(&[], &c(1)).unwrap(), ChamberClass::TopChamber);
        assert!(chamber_report(&walls, &c(-1)).is_err());
    }

    #[test]
    fn delta_bounds_examples() {
        let ts = fans::test_set(1, 1, 0, 2).unwrap();
        let n = NPerRank::from([(1, 3)]);
        let class = ConfigClass::curve(2, 0, 1, 1, 0, 0);
        assert_eq!(delta_bounds(&class, &ts, &n).unwrap(), (int(0), int(0)));
        let class = ConfigClass::curve(2, 4, 1, 1, 0, 5);
        let (d0, d1) = delta_bounds(&class, &ts, &n).unwrap();
        assert_eq!(d0, int(5));
        // C = 1·(4·(1 − 2) − 3·5·2) = −34
        assert_eq!(d1, int(34));
        assert!(matches!(delta_bounds(&class, &ts, &NPerRank::new()), Err(Error::Parameter(_))));
    }

    #[test]
    fn default_bounds_contain_the_balanced_degree() {
        let class = ConfigClass::curve(3, 2, 1, 1, 0, 0);
        let ts = fans::test_set(1, 1, 0, 3).unwrap();
        let b = default_degree_bounds(&class, &ts, &NPerRank::from([(1, 0), (2, 0)])).unwrap();
        for (k, (lo, hi)) in b {
            assert!(lo <= hi);
            let balanced = int(2 * k as i64) / int(3);
            assert!(int(lo) <= balanced && balanced <= int(hi));
        }
    }

    #[test]
    fn split_bundle_family_degrees() {
        let sb = SplitBundle { degrees: vec![2, -1, 0], genus: 0 };
        let fam = sb.family(&[flag(3, &[1, 2], &[int(1), int(1)])]).unwrap();
        assert_eq!(fam.len(), 6);
        let degs: BTreeSet<Vec<Rational>> = fam.iter().map(|m| m.filt.degrees(&sb.sheaf())).collect();
        assert!(degs.contains(&vec![int(2), int(1)]));
        assert!(degs.contains(&vec![int(-1), int(-1)]));
        assert!(sb.allowed(&[2], 0, 0) && !sb.allowed(&[1], 0, 0));
    }

    #[test]
    fn frames_relabel_the_point() {
        // E₁ spanned by original e₂: φ = e₂* does not vanish there
        let w = pt(2, 1, &[&[2]]);
        let moved = Frame::Permutation(vec![1, 0]).apply(&w).unwrap();
        assert_eq!(mu_of_flag(&flag(2, &[1], &[int(1)]), &moved).unwrap(), int(1));
        assert_eq!(permutation_frames(3).len(), 6);
    }

    fn thaddeus_family(d: i64) -> Vec<FamilyMember> {
        let sheaf = SheafNumerics::curve(2, d, 0);
        let b = SubBounds::Degrees(BTreeMap::from([(1, (0, (d + 1) / 2))]));
        bounded_family(&sheaf, &[flag(2, &[1], &[int(1)])], &b, &permutation_frames(2)).unwrap()
    }

    #[test]
    fn semistable_next_to_a_wall_is_semistable_on_it() {
        for d in 1..=6 {
            let class = ConfigClass::curve(2, d, 1, 1, 0, 0);
            let b = SubBounds::Degrees(BTreeMap::from([(1, (0, (d + 1) / 2))]));
            let rep = candidate_walls(&class, &b, false).unwrap();
            let fam = thaddeus_family(d);
            for support in [vec![vec![1]], vec![vec![2]], vec![vec![1], vec![2]]] {
                let cfg = thaddeus(d, &support.iter().map(|v| v.as_slice()).collect::<Vec<_>>());
                let verdict = |x: Rational| delta_semistable(&cfg, &RatPolynomial::constant(x), &fam).unwrap().stability;
                for (i, w) in rep.walls.iter().enumerate() {
                    let at = verdict(w.coeff(0));
                    let lo = rep.chambers[i].lower.coeff(0);
                    let hi = rep.chambers[i + 1].upper.as_ref().map(|u| u.coeff(0)).unwrap_or(w.coeff(0) + int(2));
                    for side in [(&lo + w.coeff(0)) / int(2), (w.coeff(0) + &hi) / int(2)] {
                        if verdict(side).is_semistable() {
                            assert!(at.is_semistable(), "d = {d}, wall {w}");
                        }
                    }
                }
            }
        }
    }

    fn arb_flag() -> impl Strategy<Value = WeightedFlag> {
        (2usize..=4).prop_flat_map(|r| {
            (Just(r), prop::collection::btree_set(1..r, 1..r), prop::collection::vec((1i64..=6, 1i64..=6), r))
                .prop_map(|(r, ranks, ws)| {
                    let ranks: Vec<usize> = ranks.into_iter().collect();
                    let alphas = ws.into_iter().take(ranks.len()).map(|(n, d)| rat(n, d)).collect();
                    WeightedFlag::new(r, ranks, alphas).unwrap()
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn degcomp_matches_l(f in arb_flag(), d in -6i64..=6, degs in prop::collection::vec(-6i64..=6, 3)) {
            let s = SheafNumerics::curve(f.ambient_rank(), d, 1);
            let e: Vec<i64> = degs.into_iter().take(f.len()).collect();
            let filt = curve_filt(&s, f, &e);
            prop_assert_eq!(character_line_degree(&s, &filt).unwrap(), m_and_l(&s, &filt).unwrap().1);
        }

        #[test]
        fn corrected_mu_lower_bound(f in arb_flag(), a in 1usize..=3, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let r = f.ambient_rank();
            let tuples: Vec<Vec<usize>> = (0..rng.gen_range(1..=4))
                .map(|_| (0..a).map(|_| rng.gen_range(1..=r)).collect())
                .collect();
            let w = TensorPoint::from_support(r, a, 0, &tuples).unwrap();
            let mu = mu_of_flag(&f, &w).unwrap();
            let sum: Rational = f.alphas().iter().sum();
            prop_assert!(mu >= -(int(a as i64) * sum * int(r as i64 - 1)));
        }

        #[test]
        fn verdict_flips_bracket_a_wall(
            d in -3i64..=5, a in 1usize..=2, c in 0i64..=1, dl in 0i64..=2, lo in -2i64..=2, w in 0i64..=3,
            x1 in (1i64..=40, 1i64..=4), x2 in (1i64..=40, 1i64..=4), seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let class = ConfigClass::curve(2, d, a, 1, c, dl);
            let b = SubBounds::Degrees(BTreeMap::from([(1, (lo, lo + w))]));
            let rep = candidate_walls(&class, &b, false).unwrap();
            let all = index_tuples(a, 2);
            let k = rng.gen_range(1..=all.len());
            let support: Vec<Vec<usize>> = all.into_iter().take(k).collect();
            let sheaf = class.sheaf().unwrap();
            let cfg = DecoratedConfig::new(sheaf.clone(), a, 1, c, int(dl),
                TensorPoint::from_support(2, a, c, &support).unwrap()).unwrap();
            let fam = bounded_family(&sheaf, &rep.test_set, &b, &permutation_frames(2)).unwrap();
            let (p, q) = (rat(x1.0, x1.1), rat(x2.0, x2.1));
            let (p, q) = if p <= q { (p, q) } else { (q, p) };
            let vp = delta_semistable(&cfg, &RatPolynomial::constant(p.clone()), &fam).unwrap().stability;
            let vq = delta_semistable(&cfg, &RatPolynomial::constant(q.clone()), &fam).unwrap().stability;
            if vp != vq {
                prop_assert!(rep.walls.iter().any(|w| p <= w.coeff(0) && w.coeff(0) <= q));
            }
        }

        #[test]
        fn verdict_is_invariant_under_alpha_scaling(
            d in -3i64..=3, e in -3i64..=3, t in (1i64..=5, 1i64..=5), delta in (1i64..=9, 1i64..=4),
            coords in prop::sample::subsequence(vec![1usize, 2, 3], 1..=3),
        ) {
            let s = SheafNumerics::curve(3, d, 0);
            let tuples: Vec<Vec<usize>> = coords.iter().map(|&i| vec![i]).collect();
            let cfg = DecoratedConfig::new(s.clone(), 1, 1, 0, int(0),
                TensorPoint::from_support(3, 1, 0, &tuples).unwrap()).unwrap();
            let f = flag(3, &[1, 2], &[rat(1, 3), rat(2, 3)]);
            let base = curve_filt(&s, f.clone(), &[e, e]);
            let scaled = curve_filt(&s, f.scaled(&rat(t.0, t.1)), &[e, e]);
            let dl = RatPolynomial::constant(rat(delta.0, delta.1));
            let fam = |filt: FiltrationNumerics| vec![FamilyMember { filt, frame: Frame::Identity }];
            prop_assert_eq!(
                delta_semistable(&cfg, &dl, &fam(base)).unwrap().stability,
                delta_semistable(&cfg, &dl, &fam(scaled)).unwrap().stability
            );
        }
    }
}
