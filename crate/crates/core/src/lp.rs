//! Exact phase-one simplex for `A x = b, x ≥ 0`.
//!
//! Bland's rule is used for both the entering and the leaving variable, so
//! the method terminates on degenerate problems. On infeasibility the dual
//! of the phase-one optimum gives a Farkas certificate.

use num::{BigRational, Signed, Zero};

/// Result of a feasibility solve.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Feasibility {
    /// Nonnegative `x` with `A x = b`.
    Feasible(Vec<BigRational>),
    /// `c` with `cᵀA ≥ 0` componentwise and `cᵀb < 0`.
    Infeasible(Vec<BigRational>),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// Decide `A x = b, x ≥ 0` for the `m × n` matrix given by rows.
pub fn solve_nonneg(a: &[Vec<BigRational>], b: &[BigRational]) -> Feasibility {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    assert_eq!(b.len(), m, "right-hand side length");

    let width = n + m;
    let mut flipped = vec![false; m];
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    let mut rhs: Vec<BigRational> = Vec::with_capacity(m);
    for i in 0..m {
        flipped[i] = b[i].is_negative();
        let mut row = Vec::with_capacity(width);
        for x in &a[i] {
            row.push(if flipped[i] { -x.clone() } else { x.clone() });
        }
        for k in 0..m {
            row.push(if k == i {
                BigRational::from_integer(1.into())
            } else {
                BigRational::zero()
            });
        }
        t.push(row);
        rhs.push(b[i].abs());
    }
    let mut basic: Vec<usize> = (n..n + m).collect();
    // reduced costs of the phase-one objective (sum of artificials)
    let mut cost = vec![BigRational::zero(); width];
    for row in &t {
        for j in 0..n {
            cost[j] -= &row[j];
        }
    }

    while let Some(enter) = (0..width).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &rhs[i] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && basic[i] < basic[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (p, _) = leave.expect("phase one is bounded below");
        pivot(&mut t, &mut rhs, &mut cost, p, enter);
        basic[p] = enter;
    }

    let residual = basic
        .iter()
        .zip(&rhs)
        .filter(|(&j, _)| j >= n)
        .fold(BigRational::zero(), |acc, (_, v)| acc + v);
    if residual.is_zero() {
        let mut x = vec![BigRational::zero(); n];
        for (i, &j) in basic.iter().enumerate() {
            if j < n {
                x[j] = rhs[i].clone();
            }
        }
        Feasibility::Feasible(x)
    } else {
        // y_i = Σ_r c_{basic[r]} (B⁻¹)_{r,i}; B⁻¹ sits in the artificial block
        let mut c = vec![BigRational::zero(); m];
        for (r, &j) in basic.iter().enumerate() {
            if j >= n {
                for i in 0..m {
                    c[i] += &t[r][n + i];
                }
            }
        }
        for i in 0..m {
            c[i] = if flipped[i] { c[i].clone() } else { -c[i].clone() };
        }
        Feasibility::Infeasible(c)
    }
}

fn pivot(
    t: &mut [Vec<BigRational>],
    rhs: &mut [BigRational],
    cost: &mut [BigRational],
    p: usize,
    q: usize,
) {
    let inv = t[p][q].recip();
    for x in t[p].iter_mut() {
        if !x.is_zero() {
            *x *= &inv;
        }
    }
    rhs[p] *= &inv;
    let prow = t[p].clone();
    let prhs = rhs[p].clone();
    for i in 0..t.len() {
        if i == p || t[i][q].is_zero() {
            continue;
        }
        let f = t[i][q].clone();
        for (x, y) in t[i].iter_mut().zip(&prow) {
            if !y.is_zero() {
                *x -= &f * y;
            }
        }
        rhs[i] -= &f * &prhs;
    }
    if !cost[q].is_zero() {
        let f = cost[q].clone();
        for (x, y) in cost.iter_mut().zip(&prow) {
            if !y.is_zero() {
                *x -= &f * y;
            }
        }
    }
}

/// Check a certificate returned by [`solve_nonneg`] by direct arithmetic.
pub fn verify(a: &[Vec<BigRational>], b: &[BigRational], result: &Feasibility) -> bool {
    let n = a.first().map_or(0, Vec::len);
    match result {
        Feasibility::Feasible(x) => {
            x.len() == n
                && x.iter().all(|v| !v.is_negative())
                && a.iter().zip(b).all(|(row, bi)| {
                    row.iter()
                        .zip(x)
                        .fold(BigRational::zero(), |acc, (r, v)| acc + r * v)
                        == *bi
                })
        }
        Feasibility::Infeasible(c) => {
            let cb = c
                .iter()
                .zip(b)
                .fold(BigRational::zero(), |acc, (ci, bi)| acc + ci * bi);
            c.len() == a.len()
                && cb.is_negative()
                && (0..n).all(|j| {
                    !c.iter()
                        .zip(a)
                        .fold(BigRational::zero(), |acc, (ci, row)| acc + ci * &row[j])
                        .is_negative()
                })
        }
    }
}
