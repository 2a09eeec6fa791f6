//! Torus-level instability: semistability test, the optimal destabilizing
//! one-parameter subgroup and the destabilizing certificate.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::minnorm;
use crate::ratcore::{cmp_normalized, int, primitive_integer, serde_rat, serde_rat_vec, Rational};
use crate::rep::{gamma_vector, weighted_flag_of_ops, Character, OneParamSubgroup, TensorPoint, WeightedFlag};

/// Three-way GIT verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Unstable,
    Semistable,
    Stable,
}

impl Stability {
    /// Verdict for a minimum weight: negative, zero or positive.
    pub fn from_sign(min_weight: &Rational) -> Self {
        match min_weight.cmp(&Rational::zero()) {
            Ordering::Less => Stability::Unstable,
            Ordering::Equal => Stability::Semistable,
            Ordering::Greater => Stability::Stable,
        }
    }

    pub fn is_semistable(self) -> bool {
        self != Stability::Unstable
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstabilityCertificate {
    pub lambda_star: OneParamSubgroup,
    #[serde(with = "serde_rat")]
    pub mu_value: Rational,
    #[serde(with = "serde_rat")]
    pub norm_sq: Rational,
    pub flag: WeightedFlag,
    /// Sorting permutation of `lambda_star` (0-based source coordinates).
    pub basis_permutation: Vec<usize>,
    #[serde(with = "serde_rat")]
    pub q: Rational,
    #[serde(rename = "chi_star", with = "serde_rat_vec")]
    pub chi_star_block_exponents: Vec<Rational>,
}

impl InstabilityCertificate {
    /// `m₀² = μ² / ‖λ*‖²`.
    pub fn m0_sq(&self) -> Rational {
        &self.mu_value * &self.mu_value / &self.norm_sq
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidualPoint {
    pub point: TensorPoint,
    #[serde(with = "serde_rat")]
    pub level_value: Rational,
}

/// Projection `χ − mean(χ)·(1,…,1)` onto the trace-zero subspace.
pub fn project_trace_zero(chi: &[Rational]) -> Vec<Rational> {
    let n = int(chi.len() as i64);
    let mean: Rational = chi.iter().sum::<Rational>() / n;
    chi.iter().map(|x| x - &mean).collect()
}

/// Min-norm point of the projected hull of rational weights. Zero means
/// semistable; otherwise the optimal direction is the primitive vector on
/// the ray of `−p*`, returned with `‖p*‖²`.
pub fn optimal_direction(points: &[Vec<Rational>], exhaustive: bool) -> Option<(Vec<i64>, Rational)> {
    let r = points.first()?.len();
    let proj: Vec<Vec<Rational>> = points.iter().map(|p| project_trace_zero(p)).collect();
    let dim = r.saturating_sub(1);
    let m = if exhaustive {
        minnorm::exhaustive(&proj, dim)
    } else {
        minnorm::min_norm_point(&proj, dim)
    };
    if m.norm_sq.is_zero() {
        return None;
    }
    let neg: Vec<Rational> = m.point.iter().map(|x| -x).collect();
    Some((primitive_integer(&neg), m.norm_sq))
}

/// Semistability of the state set for the trace-zero diagonal torus.
pub fn state_semistable(state: &BTreeSet<Character>) -> bool {
    optimal_direction(&to_rational(state), true).is_none()
}

fn to_rational(state: &BTreeSet<Character>) -> Vec<Vec<Rational>> {
    state.iter().map(|c| c.iter().map(|&x| int(x)).collect()).collect()
}

pub fn torus_semistable(w: &TensorPoint) -> bool {
    state_semistable(&w.state_weights())
}

/// Instability data of an unstable state set.
pub fn instability_of_state(state: &BTreeSet<Character>) -> Result<InstabilityCertificate> {
    let (lam, m0_sq) = optimal_direction(&to_rational(state), true)
        .ok_or_else(|| Error::NoCertificate("point is torus-semistable".into()))?;
    let lambda_star = OneParamSubgroup::new_sl(lam)?;
    let mu_value = int(state.iter().map(|chi| lambda_star.pair(chi)).max().expect("nonempty state"));
    let norm_sq = int(lambda_star.norm_sq());
    debug_assert_eq!(&mu_value * &mu_value / &norm_sq, m0_sq);
    let (flag, basis_permutation) = weighted_flag_of_ops(&lambda_star);
    let q = mu_value.clone();
    let chi_star_block_exponents = gamma_vector(&flag).block_values.iter().map(|g| &q * g).collect();
    Ok(InstabilityCertificate {
        lambda_star,
        mu_value,
        norm_sq,
        flag,
        basis_permutation,
        q,
        chi_star_block_exponents,
    })
}

pub fn instability_ops(w: &TensorPoint) -> Result<InstabilityCertificate> {
    instability_of_state(&w.state_weights())
}

pub fn destabilizing_certificate(w: &TensorPoint) -> Result<(InstabilityCertificate, ResidualPoint)> {
    let cert = instability_ops(w)?;
    let level = cert.mu_value.clone();
    let point = w.restrict(|chi| int(cert.lambda_star.pair(chi)) == level)?;
    Ok((cert, ResidualPoint { point, level_value: level }))
}

/// Semistability relative to a finite family of basis changes: the identity
/// plus every listed `g`. A `false` answer is always sound.
pub fn semistable_under(w: &TensorPoint, basis_changes: &[Vec<Vec<Rational>>]) -> Result<bool> {
    if !torus_semistable(w) {
        return Ok(false);
    }
    for g in basis_changes {
        if !torus_semistable(&w.transform(g)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Most destabilizing certificate over the identity and the listed basis
/// changes, with the index of the winning translate (0 = identity).
pub fn instability_under(
    w: &TensorPoint,
    basis_changes: &[Vec<Vec<Rational>>],
) -> Result<(usize, InstabilityCertificate)> {
    let mut best: Option<(usize, InstabilityCertificate)> = None;
    let mut candidates = vec![w.clone()];
    for g in basis_changes {
        candidates.push(w.transform(g)?);
    }
    for (i, p) in candidates.iter().enumerate() {
        if let Ok(c) = instability_ops(p) {
            let better = best.as_ref().is_none_or(|(_, b)| {
                cmp_normalized(&c.mu_value, &c.norm_sq, &b.mu_value, &b.norm_sq) == Ordering::Less
            });
            if better {
                best = Some((i, c));
            }
        }
    }
    best.ok_or_else(|| Error::NoCertificate("semistable under every supplied translate".into()))
}
