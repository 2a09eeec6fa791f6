//! Exact feasibility of small systems `A y ≤ b` by Fourier–Motzkin elimination.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::ratcore::Rational;

/// One inequality `⟨coeffs, y⟩ ≤ rhs`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Ineq {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

impl Ineq {
    pub fn new(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Self { coeffs, rhs }
    }

    /// Scales so the first nonzero coefficient has absolute value one.
    fn normalized(mut self) -> Self {
        if let Some(p) = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            for c in self.coeffs.iter_mut() {
                *c /= &p;
            }
            self.rhs /= &p;
        }
        self
    }
}

/// Adds `⟨coeffs, y⟩ = rhs` as two inequalities.
pub fn push_eq(sys: &mut Vec<Ineq>, coeffs: Vec<Rational>, rhs: Rational) {
    sys.push(Ineq::new(coeffs.iter().map(|c| -c).collect(), -rhs.clone()));
    sys.push(Ineq::new(coeffs, rhs));
}

pub fn feasible(system: &[Ineq]) -> bool {
    let Some(n) = system.first().map(|i| i.coeffs.len()) else {
        return true;
    };
    let mut cur: BTreeSet<Ineq> = system.iter().cloned().map(Ineq::normalized).collect();
    for var in 0..n {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), BTreeSet::new());
        for q in cur {
            let c = &q.coeffs[var];
            if c.is_positive() {
                pos.push(q);
            } else if c.is_negative() {
                neg.push(q);
            } else {
                rest.insert(q);
            }
        }
        // each coefficient at `var` is ±1 after normalization
        for p in &pos {
            for m in &neg {
                let coeffs: Vec<Rational> = p.coeffs.iter().zip(&m.coeffs).map(|(a, b)| a + b).collect();
                let comb = Ineq::new(coeffs, &p.rhs + &m.rhs).normalized();
                if comb.coeffs.iter().all(|c| c.is_zero()) {
                    if comb.rhs.is_negative() {
                        return false;
                    }
                } else {
                    rest.insert(comb);
                }
            }
        }
        cur = rest;
        if cur.iter().any(|q| q.coeffs.iter().all(|c| c.is_zero()) && q.rhs.is_negative()) {
            return false;
        }
    }
    cur.iter().all(|q| !q.rhs.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratcore::{int, to_vec_rat};

    fn ineq(c: &[i64], b: i64) -> Ineq {
        Ineq::new(to_vec_rat(c), int(b))
    }

    #[test]
    fn boxes_and_contradictions() {
        // 0 ≤ x ≤ 1, 0 ≤ y ≤ 1, x + y ≥ 3 is infeasible
        let mut sys = vec![ineq(&[1, 0], 1), ineq(&[-1, 0], 0), ineq(&[0, 1], 1), ineq(&[0, -1], 0)];
        assert!(feasible(&sys));
        sys.push(ineq(&[-1, -1], -3));
        assert!(!feasible(&sys));
        sys.pop();
        sys.push(ineq(&[-1, -1], -2));
        assert!(feasible(&sys));
        let mut eq = Vec::new();
        push_eq(&mut eq, to_vec_rat(&[1, 1]), int(1));
        push_eq(&mut eq, to_vec_rat(&[1, -1]), int(3));
        assert!(feasible(&eq));
        eq.push(ineq(&[0, 1], -2));
        assert!(!feasible(&eq));
    }
}
