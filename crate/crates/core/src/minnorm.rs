//! Minimum-norm point of the convex hull of finitely many rational points.
//!
//! The exhaustive solver walks all affinely independent subsets of size at
//! most `dim + 1`; Wolfe's method is a faster route whose answer is certified
//! by the optimality test `⟨x, p⟩ ≥ ‖x‖²` and which falls back to the
//! exhaustive solver whenever it meets a degenerate step.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::linalg;
use crate::ratcore::{dot, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinNorm {
    pub point: Vec<Rational>,
    pub norm_sq: Rational,
}

fn dedup(points: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
}

/// Affine min-norm point of `span_aff(S)` as barycentric coordinates, or
/// `None` when `S` is affinely dependent.
fn affine_min_norm(points: &[&Vec<Rational>]) -> Option<Vec<Rational>> {
    let k = points.len();
    let mut a = vec![vec![Rational::zero(); k + 1]; k + 1];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = dot(points[i], points[j]);
        }
        a[i][k] = -Rational::one();
        a[k][i] = Rational::one();
    }
    let mut b = vec![Rational::zero(); k + 1];
    b[k] = Rational::one();
    let mut sol = linalg::solve(&a, &b)?;
    sol.pop();
    Some(sol)
}

fn combine(points: &[&Vec<Rational>], coeffs: &[Rational]) -> Vec<Rational> {
    let dim = points[0].len();
    let mut x = vec![Rational::zero(); dim];
    for (p, c) in points.iter().zip(coeffs) {
        for (xi, pi) in x.iter_mut().zip(p.iter()) {
            *xi += c * pi;
        }
    }
    x
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Exhaustive exact solver. `dim` bounds the affine dimension of the points.
pub fn exhaustive(points: &[Vec<Rational>], dim: usize) -> MinNorm {
    let pts = dedup(points);
    assert!(!pts.is_empty(), "min-norm point of an empty set");
    let mut best: Option<MinNorm> = None;
    for k in 1..=(dim + 1).min(pts.len()) {
        for s in subsets(pts.len(), k) {
            let sel: Vec<&Vec<Rational>> = s.iter().map(|&i| &pts[i]).collect();
            let Some(coeffs) = affine_min_norm(&sel) else { continue };
            if coeffs.iter().any(|c| c.is_negative()) {
                continue;
            }
            let x = combine(&sel, &coeffs);
            let n = dot(&x, &x);
            if best.as_ref().is_none_or(|b| n < b.norm_sq) {
                best = Some(MinNorm { point: x, norm_sq: n });
            }
        }
    }
    best.expect("singletons are always candidates")
}

/// Wolfe's method in exact arithmetic. `None` signals a degenerate step.
pub fn wolfe(points: &[Vec<Rational>]) -> Option<MinNorm> {
    let pts = dedup(points);
    let start = (0..pts.len()).min_by_key(|&i| dot(&pts[i], &pts[i]))?;
    let mut support = vec![start];
    let mut lam = vec![Rational::one()];
    for _ in 0..10_000 {
        let sel: Vec<&Vec<Rational>> = support.iter().map(|&i| &pts[i]).collect();
        let x = combine(&sel, &lam);
        let xx = dot(&x, &x);
        let (j, xj) = pts
            .iter()
            .enumerate()
            .map(|(i, p)| (i, dot(&x, p)))
            .min_by(|a, b| a.1.cmp(&b.1))?;
        if xj >= xx {
            return Some(MinNorm { point: x, norm_sq: xx });
        }
        if support.contains(&j) {
            return None;
        }
        support.push(j);
        lam.push(Rational::zero());
        loop {
            let sel: Vec<&Vec<Rational>> = support.iter().map(|&i| &pts[i]).collect();
            let y = affine_min_norm(&sel)?;
            if y.iter().all(|c| c.is_positive()) {
                lam = y;
                break;
            }
            let theta = lam
                .iter()
                .zip(&y)
                .filter(|(_, yi)| !yi.is_positive())
                .map(|(li, yi)| li / (li - yi))
                .min()?;
            lam = lam
                .iter()
                .zip(&y)
                .map(|(li, yi)| &theta * yi + (Rational::one() - &theta) * li)
                .collect();
            let keep: Vec<bool> = lam.iter().map(|l| l.is_positive()).collect();
            if keep.iter().all(|&k| k) {
                return None;
            }
            support = support.iter().zip(&keep).filter(|(_, &k)| k).map(|(&i, _)| i).collect();
            lam = lam.into_iter().zip(&keep).filter(|(_, &k)| k).map(|(l, _)| l).collect();
            if support.is_empty() {
                return None;
            }
        }
    }
    None
}

/// Wolfe first, exhaustive on any degeneracy.
pub fn min_norm_point(points: &[Vec<Rational>], dim: usize) -> MinNorm {
    wolfe(points).unwrap_or_else(|| exhaustive(points, dim))
}
