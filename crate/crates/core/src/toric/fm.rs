//! Exact feasibility of small linear systems by Fourier-Motzkin elimination.

use num::{One, Signed, Zero};

use crate::arith::BigRat;

/// A row `coeffs . x (<= | =) rhs`.
#[derive(Clone, Debug)]
pub struct Row {
    pub coeffs: Vec<BigRat>,
    pub rhs: BigRat,
}

impl Row {
    pub fn new(coeffs: Vec<BigRat>, rhs: BigRat) -> Self {
        Row { coeffs, rhs }
    }

    fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Scales by a positive factor so the first nonzero entry is +-1.
    fn normalized(mut self) -> Row {
        if let Some(lead) = self.coeffs.iter().chain(std::iter::once(&self.rhs)).find(|c| !c.is_zero()) {
            let s = lead.abs().recip();
            for c in &mut self.coeffs {
                *c *= &s;
            }
            self.rhs *= &s;
        }
        self
    }
}

/// Whether some real `x` satisfies all `equalities` and `inequalities`
/// (`<=`). Every row must have the same number of coefficients.
pub fn feasible(equalities: Vec<Row>, inequalities: Vec<Row>) -> bool {
    let mut eqs = equalities;
    let mut ineqs = inequalities;

    // Gaussian substitution of the equalities.
    while let Some(row) = eqs.pop() {
        let Some(j) = row.coeffs.iter().position(|c| !c.is_zero()) else {
            if !row.rhs.is_zero() {
                return false;
            }
            continue;
        };
        let pivot = row.coeffs[j].clone();
        let eliminate = |r: &mut Row| {
            if r.coeffs[j].is_zero() {
                return;
            }
            let f = &r.coeffs[j] / &pivot;
            for (c, p) in r.coeffs.iter_mut().zip(&row.coeffs) {
                *c -= &f * p;
            }
            r.rhs -= &f * &row.rhs;
        };
        eqs.iter_mut().for_each(eliminate);
        ineqs.iter_mut().for_each(eliminate);
    }

    let n = ineqs.first().map_or(0, |r| r.coeffs.len());
    for j in 0..n {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut keep = Vec::new();
        for r in ineqs {
            let c = &r.coeffs[j];
            if c.is_positive() {
                pos.push(r.normalized_at(j));
            } else if c.is_negative() {
                neg.push(r.normalized_at(j));
            } else {
                keep.push(r);
            }
        }
        for p in &pos {
            for q in &neg {
                // p has +1 at j, q has -1 at j
                let coeffs = p.coeffs.iter().zip(&q.coeffs).map(|(a, b)| a + b).collect();
                keep.push(Row::new(coeffs, &p.rhs + &q.rhs).normalized());
            }
        }
        keep.retain(|r| !(r.is_trivial() && !r.rhs.is_negative()));
        if keep.iter().any(|r| r.is_trivial() && r.rhs.is_negative()) {
            return false;
        }
        dedup(&mut keep);
        ineqs = keep;
    }
    ineqs.iter().all(|r| !r.rhs.is_negative())
}

impl Row {
    fn normalized_at(mut self, j: usize) -> Row {
        let s = self.coeffs[j].abs().recip();
        for c in &mut self.coeffs {
            *c *= &s;
        }
        self.rhs *= &s;
        self
    }
}

fn dedup(rows: &mut Vec<Row>) {
    let mut seen: Vec<Row> = Vec::with_capacity(rows.len());
    for r in rows.drain(..) {
        if !seen.iter().any(|s| s.coeffs == r.coeffs && s.rhs == r.rhs) {
            seen.push(r);
        }
    }
    *rows = seen;
}

/// `-x_i <= 0` for every variable.
pub fn nonnegativity(n: usize) -> Vec<Row> {
    (0..n)
        .map(|i| {
            let mut c = vec![BigRat::zero(); n];
            c[i] = -BigRat::one();
            Row::new(c, BigRat::zero())
        })
        .collect()
}
