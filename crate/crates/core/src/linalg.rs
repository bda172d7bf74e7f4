//! Exact rational row reduction.

use num::{BigRational, One, Zero};

/// Row echelon form in place; returns pivot columns.
fn echelon(rows: &mut [Vec<BigRational>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let (head, tail) = if i < r {
                    let (a, b) = rows.split_at_mut(r);
                    (&mut a[i], &b[0])
                } else {
                    let (a, b) = rows.split_at_mut(i);
                    (&mut b[0], &a[r])
                };
                for (x, y) in head.iter_mut().zip(tail) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m = rows.to_vec();
    echelon(&mut m).len()
}

/// Basis of `{x : rows · x = 0}`.
pub fn kernel(rows: &[Vec<BigRational>], ncols: usize) -> Vec<Vec<BigRational>> {
    let mut m = rows.to_vec();
    let pivots = echelon(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![BigRational::zero(); ncols];
            x[f] = BigRational::one();
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = -m[r][f].clone();
            }
            x
        })
        .collect()
}

/// Smallest integer multiple of a rational vector, sign kept.
pub fn primitive_integer(v: &[BigRational]) -> Vec<num::BigInt> {
    use num::Integer;
    let lcm = v
        .iter()
        .fold(num::BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<num::BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints
        .iter()
        .fold(num::BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Primitive integer normal of the hyperplane spanned by `rows`, or none
/// when their rank is not `ncols - 1`. Fraction-free elimination in `i128`,
/// with the rational path as fallback on overflow.
pub fn hyperplane_normal(rows: &[Vec<i64>], ncols: usize) -> Option<Vec<i64>> {
    match normal_i128(rows, ncols) {
        Ok(n) => n,
        Err(()) => {
            let q: Vec<Vec<BigRational>> = rows
                .iter()
                .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
                .collect();
            let ker = kernel(&q, ncols);
            if ker.len() != 1 {
                return None;
            }
            primitive_integer(&ker[0]).iter().map(num::ToPrimitive::to_i64).collect()
        }
    }
}

fn normal_i128(rows: &[Vec<i64>], ncols: usize) -> Result<Option<Vec<i64>>, ()> {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut pivots = Vec::new();
    let mut prev: i128 = 1;
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        let piv = m[r][c];
        for i in 0..m.len() {
            if i == r {
                continue;
            }
            let f = m[i][c];
            for j in 0..ncols {
                let a = piv.checked_mul(m[i][j]).ok_or(())?;
                let b = f.checked_mul(m[r][j]).ok_or(())?;
                let v = a.checked_sub(b).ok_or(())?;
                if v % prev != 0 {
                    return Err(());
                }
                m[i][j] = v / prev;
            }
        }
        prev = piv;
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    if pivots.len() + 1 != ncols {
        return Ok(None);
    }
    let free = (0..ncols).find(|c| !pivots.contains(c)).unwrap();
    // x_free = 1, x_p = -m[r][free] / m[r][p]; clear denominators
    let mut lcm: i128 = 1;
    for (r, &p) in pivots.iter().enumerate() {
        lcm = num::Integer::lcm(&lcm, &(m[r][p].abs() / num::Integer::gcd(&m[r][p], &m[r][free]).max(1)));
        if lcm > i64::MAX as i128 {
            return Err(());
        }
    }
    let mut x = vec![0i128; ncols];
    x[free] = lcm;
    for (r, &p) in pivots.iter().enumerate() {
        let num = -m[r][free].checked_mul(lcm).ok_or(())?;
        if num % m[r][p] != 0 {
            return Err(());
        }
        x[p] = num / m[r][p];
    }
    let g = x.iter().fold(0i128, |acc, v| num::Integer::gcd(&acc, v));
    x.iter()
        .map(|v| i64::try_from(v / g.max(1)).map_err(|_| ()))
        .collect::<Result<Vec<i64>, ()>>()
        .map(Some)
}
