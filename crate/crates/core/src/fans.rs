//! Refinement of the dominant chamber `{λ₁ ≤ … ≤ λ_r, Σλ = 0}` by the
//! difference hyperplanes of weight sets, its edge generators, the finite
//! test set of weighted-flag signatures and the product threshold `η_∞`.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kempf::{self, Stability};
use crate::linalg;
use crate::ratcore::{int, primitive_int_vec, primitive_integer, serde_rat, Rational};
use crate::rep::{enumerate_weights, weighted_flag_of_ops, Character, OneParamSubgroup, TensorPoint, WeightedFlag};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Cone {
    pub generators: Vec<Vec<i64>>,
    /// Inward normals: `⟨λ, n⟩ ≥ 0` on the cone.
    pub facet_normals: Vec<Vec<i64>>,
    /// Side of each fan hyperplane (`+1`/`-1`), in [`Fan::hyperplanes`] order.
    pub sign_vector: Vec<i8>,
}

impl Cone {
    pub fn contains(&self, lambda: &[Rational]) -> bool {
        self.facet_normals.iter().all(|n| !pair_ri(lambda, n).is_negative())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fan {
    pub rank: usize,
    pub hyperplanes: Vec<Vec<i64>>,
    pub cones: Vec<Cone>,
    pub edge_generators: Vec<Vec<i64>>,
}

/// Interior slice vector `ρ = (−(r−1), −(r−3), …, r−1)`.
pub fn rho(r: usize) -> Vec<i64> {
    (0..r).map(|i| 2 * i as i64 - (r as i64 - 1)).collect()
}

fn pair_ri(lambda: &[Rational], n: &[i64]) -> Rational {
    lambda.iter().zip(n).map(|(l, &x)| l * int(x)).sum()
}

fn chamber_walls(r: usize) -> Vec<Vec<i64>> {
    (0..r - 1)
        .map(|i| {
            let mut n = vec![0; r];
            n[i] = -1;
            n[i + 1] = 1;
            n
        })
        .collect()
}

/// Trace-zero, primitive, sign-canonical representative of the hyperplane
/// `⟨λ, n⟩ = 0` inside the trace-zero subspace; `None` if it is everything.
pub fn normalize_normal(n: &[i64]) -> Option<Vec<i64>> {
    let r = n.len() as i64;
    let s: i64 = n.iter().sum();
    let v: Vec<i64> = n.iter().map(|x| r * x - s).collect();
    if v.iter().all(|&x| x == 0) {
        return None;
    }
    let mut v = primitive_int_vec(&v);
    if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    Some(v)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Vertices of `{⟨λ,n⟩ ≥ 0 ∀n, Σλ = 0, ⟨λ,ρ⟩ = 1}`.
fn vertices(ineqs: &[Vec<i64>], r: usize) -> Vec<Vec<Rational>> {
    let rho = rho(r);
    let mut out = BTreeSet::new();
    for s in subsets(ineqs.len(), r - 2) {
        let mut a: Vec<Vec<Rational>> = s.iter().map(|&i| ineqs[i].iter().map(|&x| int(x)).collect()).collect();
        a.push(vec![int(1); r]);
        a.push(rho.iter().map(|&x| int(x)).collect());
        let mut b = vec![Rational::zero(); r - 1];
        b.push(int(1));
        let Some(v) = linalg::solve(&a, &b) else { continue };
        if ineqs.iter().all(|n| !pair_ri(&v, n).is_negative()) {
            out.insert(v);
        }
    }
    out.into_iter().collect()
}

/// Drops inequalities that do not define facets of the sliced polytope.
fn facets(ineqs: &[Vec<i64>], verts: &[Vec<Rational>], r: usize) -> Vec<Vec<i64>> {
    ineqs
        .iter()
        .filter(|n| {
            let tight: Vec<Vec<Rational>> = verts.iter().filter(|v| pair_ri(v, n).is_zero()).cloned().collect();
            linalg::rank(&tight) >= r - 2
        })
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

struct Cell {
    ineqs: Vec<Vec<i64>>,
    verts: Vec<Vec<Rational>>,
    signs: Vec<i8>,
}

/// Common refinement of the dominant chamber by every difference hyperplane
/// `⟨λ, χ − χ′⟩ = 0` with `χ, χ′` in the same weight set.
pub fn chamber_fan(weight_sets: &[BTreeSet<Character>], r: usize) -> Result<Fan> {
    if r < 2 {
        return Err(Error::Dimension(format!("fans need r ≥ 2, got {r}")));
    }
    let mut hyper = BTreeSet::new();
    for set in weight_sets {
        if let Some(bad) = set.iter().find(|c| c.len() != r) {
            return Err(Error::Dimension(format!("character {bad:?} has length ≠ {r}")));
        }
        let v: Vec<&Character> = set.iter().collect();
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                let d: Vec<i64> = v[i].iter().zip(v[j]).map(|(a, b)| a - b).collect();
                if let Some(n) = normalize_normal(&d) {
                    hyper.insert(n);
                }
            }
        }
    }
    let hyperplanes: Vec<Vec<i64>> = hyper.into_iter().collect();
    let walls = chamber_walls(r);
    let verts = vertices(&walls, r);
    let mut cells = vec![Cell { ineqs: facets(&walls, &verts, r), verts, signs: Vec::new() }];
    for h in &hyperplanes {
        let neg_h: Vec<i64> = h.iter().map(|x| -x).collect();
        let mut next = Vec::with_capacity(cells.len());
        for mut cell in cells {
            let vals: Vec<Rational> = cell.verts.iter().map(|v| pair_ri(v, h)).collect();
            let has_pos = vals.iter().any(|x| x.is_positive());
            let has_neg = vals.iter().any(|x| x.is_negative());
            if has_pos && has_neg {
                for (normal, sign) in [(h, 1i8), (&neg_h, -1i8)] {
                    let mut ineqs = cell.ineqs.clone();
                    ineqs.push(normal.clone());
                    let verts = vertices(&ineqs, r);
                    let ineqs = facets(&ineqs, &verts, r);
                    let mut signs = cell.signs.clone();
                    signs.push(sign);
                    next.push(Cell { ineqs, verts, signs });
                }
            } else {
                cell.signs.push(if has_neg { -1 } else { 1 });
                next.push(cell);
            }
        }
        cells = next;
    }
    let mut cones: Vec<Cone> = cells
        .into_iter()
        .map(|c| {
            let mut generators: Vec<Vec<i64>> = c.verts.iter().map(|v| primitive_integer(v)).collect();
            generators.sort();
            Cone { generators, facet_normals: c.ineqs, sign_vector: c.signs }
        })
        .collect();
    cones.sort();
    let edge_generators: Vec<Vec<i64>> = cones
        .iter()
        .flat_map(|c| c.generators.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    Ok(Fan { rank: r, hyperplanes, cones, edge_generators })
}

/// Deduplicated weighted-flag signatures of the edges of the chamber fan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestSet {
    pub rank: usize,
    pub entries: Vec<WeightedFlag>,
}

impl Serialize for TestSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Sig<'a> {
            ranks: &'a [usize],
            #[serde(with = "crate::ratcore::serde_rat_vec")]
            alphas: &'a [Rational],
        }
        let sigs: Vec<Sig> = self.entries.iter().map(|f| Sig { ranks: f.ranks(), alphas: f.alphas() }).collect();
        let mut st = s.serialize_struct("TestSet", 2)?;
        st.serialize_field("r", &self.rank)?;
        st.serialize_field("entries", &sigs)?;
        st.end()
    }
}

pub fn test_set_of_edges(edges: &[Vec<i64>], r: usize) -> TestSet {
    let entries = edges
        .iter()
        .filter_map(|e| OneParamSubgroup::new(e.clone()).ok())
        .map(|l| weighted_flag_of_ops(&l).0)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    TestSet { rank: r, entries }
}

/// The fan is built on the full weight set of `κ_{a,b,c}`; every subset
/// contributes only difference hyperplanes already present there.
pub fn test_set(a: usize, b: usize, c: i64, r: usize) -> Result<TestSet> {
    if r < 2 {
        return Ok(TestSet { rank: r, entries: Vec::new() });
    }
    let wt: BTreeSet<Character> = enumerate_weights(a, b.max(1), c, r).into_keys().collect();
    let fan = chamber_fan(&[wt], r)?;
    Ok(test_set_of_edges(&fan.edge_generators, r))
}

/// `(K₁, K₂, η_∞)` for the joint fan of two weight sets.
pub fn product_constants(
    weights_1: &BTreeSet<Character>,
    weights_2: &BTreeSet<Character>,
    r: usize,
) -> Result<(i64, i64, Rational)> {
    if weights_1.is_empty() || weights_2.is_empty() {
        return Err(Error::Parameter("weight sets must be nonempty".into()));
    }
    let fan = chamber_fan(&[weights_1.clone(), weights_2.clone()], r)?;
    let vals: Vec<i64> = fan
        .edge_generators
        .iter()
        .flat_map(|l| weights_1.iter().map(move |chi| l.iter().zip(chi).map(|(a, b)| a * b).sum()))
        .collect();
    let k1 = *vals.iter().max().expect("nonempty");
    let k2 = *vals.iter().min().expect("nonempty");
    Ok((k1, k2, int(k1.max(-k2))))
}

pub fn product_threshold(
    weights_1: &BTreeSet<Character>,
    weights_2: &BTreeSet<Character>,
    r: usize,
) -> Result<Rational> {
    Ok(product_constants(weights_1, weights_2, r)?.2)
}

/// All distinct coordinate permutations of the given vectors.
pub fn weyl_translates(vectors: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut out = BTreeSet::new();
    for v in vectors {
        let mut p = v.clone();
        p.sort();
        loop {
            out.insert(p.clone());
            if !next_permutation(&mut p) {
                break;
            }
        }
    }
    out.into_iter().collect()
}

fn next_permutation(v: &mut [i64]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn max_pair(l: &[i64], set: &BTreeSet<Character>) -> i64 {
    set.iter().map(|c| l.iter().zip(c).map(|(a, b)| a * b).sum()).max().expect("nonempty state")
}

/// Torus verdict of a product state at parameter `η`, read off the sign of
/// `μ₁ + η·μ₂` on the Weyl translates of the given edge generators.
pub fn product_verdict_on_edges(
    edges: &[Vec<i64>],
    state_1: &BTreeSet<Character>,
    state_2: &BTreeSet<Character>,
    eta: &Rational,
) -> Stability {
    let min = weyl_translates(edges)
        .iter()
        .map(|l| int(max_pair(l, state_1)) + eta * int(max_pair(l, state_2)))
        .min()
        .expect("at least one edge");
    Stability::from_sign(&min)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    pub eta: Rational,
    pub unstable: bool,
    pub lambda_star: Option<Vec<i64>>,
    pub combined_mu: Option<Rational>,
    pub norm_sq: Option<Rational>,
    pub mu2: Option<Rational>,
}

impl Serialize for ProbeReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct R<'a>(#[serde(with = "serde_rat")] &'a Rational);
        let mut st = s.serialize_struct("ProbeReport", 6)?;
        st.serialize_field("eta", &R(&self.eta))?;
        st.serialize_field("status", if self.unstable { "unstable" } else { "semistable" })?;
        st.serialize_field("lambda_star", &self.lambda_star)?;
        st.serialize_field("combined_mu", &self.combined_mu.as_ref().map(R))?;
        st.serialize_field("norm_sq", &self.norm_sq.as_ref().map(R))?;
        st.serialize_field("mu2", &self.mu2.as_ref().map(R))?;
        st.end()
    }
}

/// Instability direction of `(w1, w2)` for the linearization `μ₁ + η·μ₂`.
///
/// The combined weights are the Minkowski points `χ₁ + η·χ₂`, whose
/// max-pairing is exactly `μ₁(λ) + η·μ₂(λ)`; the optimal direction is their
/// projected min-norm point, which minimizes the normalized combined weight
/// over all trace-zero directions at once.
pub fn product_instability_probe(w1: &TensorPoint, w2: &TensorPoint, eta: &Rational) -> Result<ProbeReport> {
    if !eta.is_positive() {
        return Err(Error::Parameter("η must be positive".into()));
    }
    if w1.r() != w2.r() {
        return Err(Error::Dimension("factors have different ranks".into()));
    }
    if !kempf::torus_semistable(w2) {
        return Err(Error::Precondition("second factor is torus-unstable".into()));
    }
    let s1 = w1.state_weights();
    let s2 = w2.state_weights();
    let points: Vec<Vec<Rational>> = s1
        .iter()
        .flat_map(|a| {
            s2.iter().map(move |b| a.iter().zip(b).map(|(&x, &y)| int(x) + eta * int(y)).collect())
        })
        .collect();
    match kempf::optimal_direction(&points, false) {
        None => Ok(ProbeReport {
            eta: eta.clone(),
            unstable: false,
            lambda_star: None,
            combined_mu: None,
            norm_sq: None,
            mu2: None,
        }),
        Some((lam, _)) => {
            let mu1 = int(max_pair(&lam, &s1));
            let mu2 = int(max_pair(&lam, &s2));
            let norm = int(lam.iter().map(|x| x * x).sum());
            Ok(ProbeReport {
                eta: eta.clone(),
                unstable: true,
                lambda_star: Some(lam),
                combined_mu: Some(mu1 + eta * &mu2),
                norm_sq: Some(norm),
                mu2: Some(mu2),
            })
        }
    }
}
