//! Small exact linear algebra: rational Gaussian elimination, integer
//! Hermite and Smith normal forms, and dense rank computation modulo a
//! prime.
//!
//! Matrices are plain `Vec<Vec<_>>` row lists. The rational and integer
//! routines only ever see tiny matrices (lattice bases in up to six
//! variables); the mod-p rank routine handles the larger truncated Jacobian
//! matrices of the Milnor oracle.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::Rational;

/// Determinant by fraction-free-ish Gaussian elimination (exact rationals).
pub fn det(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "determinant needs a square matrix");
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut acc = Rational::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero());
        let pivot = match pivot {
            Some(p) => p,
            None => return Rational::zero(),
        };
        if pivot != col {
            a.swap(pivot, col);
            acc = -acc;
        }
        let pv = a[col][col].clone();
        acc *= &pv;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &pv;
            for c in col..n {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
        }
    }
    acc
}

/// Inverse of a square rational matrix, `None` when singular.
pub fn inverse(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "inverse needs a square matrix");
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(pivot, col);
        inv.swap(pivot, col);
        let pv = a[col][col].clone();
        for c in 0..n {
            a[col][c] /= &pv;
            inv[col][c] /= &pv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in 0..n {
                let da = &factor * &a[col][c];
                a[r][c] -= da;
                let di = &factor * &inv[col][c];
                inv[r][c] -= di;
            }
        }
    }
    Some(inv)
}

/// Matrix-vector product over the rationals.
pub fn mat_vec(m: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v.iter())
                .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
        })
        .collect()
}

/// Row-style Hermite-like echelon basis of the row space of an integer
/// matrix: returns the nonzero rows of an upper-echelon form with positive
/// pivots. The rows span the same lattice as the input rows.
pub fn row_echelon_lattice_basis(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let n = rows[0].len();
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let mut pivot_row = 0;
    for col in 0..n {
        // Reduce all rows below pivot_row to a single nonzero entry in this
        // column via gcd steps.
        loop {
            let mut best: Option<usize> = None;
            for r in pivot_row..a.len() {
                if !a[r][col].is_zero() {
                    best = match best {
                        None => Some(r),
                        Some(b) if a[r][col].abs() < a[b][col].abs() => Some(r),
                        keep => keep,
                    };
                }
            }
            let b = match best {
                Some(b) => b,
                None => break,
            };
            a.swap(pivot_row, b);
            let mut done = true;
            for r in pivot_row + 1..a.len() {
                if a[r][col].is_zero() {
                    continue;
                }
                let q = div_round(&a[r][col], &a[pivot_row][col]);
                for c in 0..n {
                    let delta = &q * &a[pivot_row][c];
                    a[r][c] -= delta;
                }
                if !a[r][col].is_zero() {
                    done = false;
                }
            }
            if done {
                if a[pivot_row][col].is_negative() {
                    for c in 0..n {
                        a[pivot_row][c] = -a[pivot_row][c].clone();
                    }
                }
                pivot_row += 1;
                break;
            }
        }
        if pivot_row >= a.len() {
            break;
        }
    }
    a.truncate(pivot_row);
    a
}

/// Nearest-integer division (rounding toward the closest quotient keeps the
/// gcd steps shrinking).
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    let double = &r * BigInt::from(2);
    if double.abs() > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + BigInt::one()
        } else {
            q - BigInt::one()
        }
    } else {
        q
    }
}

/// Smith normal form with transforms: returns `(u, d, v)` with
/// `u * a * v = d`, `u` and `v` unimodular and `d` diagonal with
/// nonnegative entries, each dividing the next.
pub fn smith_normal_form(
    a: &[Vec<BigInt>],
) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let m = a.len();
    let n = if m > 0 { a[0].len() } else { 0 };
    let mut d: Vec<Vec<BigInt>> = a.to_vec();
    let mut u: Vec<Vec<BigInt>> = identity(m);
    let mut v: Vec<Vec<BigInt>> = identity(n);

    let mut t = 0;
    while t < m.min(n) {
        // Find the smallest nonzero entry in the remaining block.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !d[i][j].is_zero() {
                    pivot = match pivot {
                        None => Some((i, j)),
                        Some((pi, pj)) if d[i][j].abs() < d[pi][pj].abs() => Some((i, j)),
                        keep => keep,
                    };
                }
            }
        }
        let (pi, pj) = match pivot {
            Some(p) => p,
            None => break,
        };
        swap_rows(&mut d, &mut u, t, pi);
        swap_cols(&mut d, &mut v, t, pj);

        let mut clean = false;
        while !clean {
            clean = true;
            for i in t + 1..m {
                if d[i][t].is_zero() {
                    continue;
                }
                let q = div_round(&d[i][t], &d[t][t]);
                row_sub(&mut d, &mut u, i, t, &q);
                if !d[i][t].is_zero() {
                    // Remainder became the new, smaller pivot.
                    swap_rows(&mut d, &mut u, t, i);
                    clean = false;
                }
            }
            for j in t + 1..n {
                if d[t][j].is_zero() {
                    continue;
                }
                let q = div_round(&d[t][j], &d[t][t]);
                col_sub(&mut d, &mut v, j, t, &q);
                if !d[t][j].is_zero() {
                    swap_cols(&mut d, &mut v, t, j);
                    clean = false;
                }
            }
        }

        // Enforce the divisibility ladder: pivot must divide every entry of
        // the trailing block.
        let mut redo = false;
        'outer: for i in t + 1..m {
            for j in t + 1..n {
                if !(&d[i][j] % &d[t][t]).is_zero() {
                    // Fold row i into row t and restart this pivot.
                    let one = BigInt::one();
                    for c in 0..n {
                        let add = d[i][c].clone() * &one;
                        d[t][c] += add;
                    }
                    for c in 0..m {
                        let add = u[i][c].clone() * &one;
                        u[t][c] += add;
                    }
                    redo = true;
                    break 'outer;
                }
            }
        }
        if redo {
            continue;
        }
        if d[t][t].is_negative() {
            for c in 0..n {
                d[t][c] = -d[t][c].clone();
            }
            for c in 0..m {
                u[t][c] = -u[t][c].clone();
            }
        }
        t += 1;
    }
    (u, d, v)
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

fn swap_rows(d: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], a: usize, b: usize) {
    if a != b {
        d.swap(a, b);
        u.swap(a, b);
    }
}

fn swap_cols(d: &mut [Vec<BigInt>], v: &mut [Vec<BigInt>], a: usize, b: usize) {
    if a == b {
        return;
    }
    for row in d.iter_mut() {
        row.swap(a, b);
    }
    for row in v.iter_mut() {
        row.swap(a, b);
    }
}

fn row_sub(d: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], i: usize, t: usize, q: &BigInt) {
    let n = d[0].len();
    for c in 0..n {
        let delta = q * &d[t][c];
        d[i][c] -= delta;
    }
    let m = u[0].len();
    for c in 0..m {
        let delta = q * &u[t][c];
        u[i][c] -= delta;
    }
}

fn col_sub(d: &mut [Vec<BigInt>], v: &mut [Vec<BigInt>], j: usize, t: usize, q: &BigInt) {
    for row in d.iter_mut() {
        let delta = q * &row[t];
        row[j] -= delta;
    }
    for row in v.iter_mut() {
        let delta = q * &row[t];
        row[j] -= delta;
    }
}

/// Modular inverse via extended Euclid; `p` must be prime and `a` nonzero
/// mod `p`.
pub fn mod_inverse(a: u64, p: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        let tmp_r = old_r - q * r;
        old_r = r;
        r = tmp_r;
        let tmp_s = old_s - q * s;
        old_s = s;
        s = tmp_s;
    }
    debug_assert_eq!(old_r, 1, "inverse of a noninvertible residue");
    (old_s.rem_euclid(p as i128)) as u64
}

/// Reduce a rational mod p; `None` when the denominator vanishes mod p
/// (caller should switch primes).
pub fn rational_mod_p(r: &Rational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let num = ((r.numer() % &pb) + &pb) % &pb;
    let den = ((r.denom() % &pb) + &pb) % &pb;
    let num: u64 = num.try_into().ok()?;
    let den: u64 = den.try_into().ok()?;
    if den == 0 {
        return None;
    }
    Some((num as u128 * mod_inverse(den, p) as u128 % p as u128) as u64)
}

/// Rank of a dense matrix mod a prime `p < 2^31` by in-place Gaussian
/// elimination.
pub fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    debug_assert!(p < (1 << 31));
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut rank = 0;
    for col in 0..ncols {
        let pivot = (rank..rows.len()).find(|&r| rows[r][col] % p != 0);
        let pivot = match pivot {
            Some(pv) => pv,
            None => continue,
        };
        rows.swap(rank, pivot);
        let inv = mod_inverse(rows[rank][col] % p, p);
        for c in col..ncols {
            rows[rank][c] = (rows[rank][c] as u128 * inv as u128 % p as u128) as u64;
        }
        let pivot_row = rows[rank].clone();
        for r in rows.iter_mut().skip(rank + 1) {
            let factor = r[col] % p;
            if factor == 0 {
                continue;
            }
            for c in col..ncols {
                let sub = factor as u128 * pivot_row[c] as u128 % p as u128;
                r[c] = ((r[c] as u128 + p as u128 - sub) % p as u128) as u64;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{frac, rat};

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn ratm(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| rat(x)).collect())
            .collect()
    }

    #[test]
    fn det_and_inverse() {
        let m = ratm(&[&[2, 1], &[1, 1]]);
        assert_eq!(det(&m), rat(1));
        let inv = inverse(&m).unwrap();
        assert_eq!(inv[0][0], rat(1));
        assert_eq!(inv[0][1], rat(-1));
        assert_eq!(inv[1][0], rat(-1));
        assert_eq!(inv[1][1], rat(2));
        let singular = ratm(&[&[1, 2], &[2, 4]]);
        assert_eq!(det(&singular), rat(0));
        assert!(inverse(&singular).is_none());
        let half = vec![vec![frac(1, 2), rat(0)], vec![rat(0), rat(1)]];
        assert_eq!(det(&half), frac(1, 2));
    }

    #[test]
    fn echelon_basis_spans_lattice() {
        // Rows 2*e1, 2*e2, (1,1): lattice = {(a,b) : a+b even} + (1,1)…
        // actually Z(1,1) + Z(2,0), index 2 in Z^2.
        let basis = row_echelon_lattice_basis(&big(&[&[2, 0], &[0, 2], &[1, 1]]));
        assert_eq!(basis.len(), 2);
        let d = &basis[0][0] * &basis[1][1];
        assert_eq!(d, BigInt::from(2));
    }

    #[test]
    fn smith_form_diagonal_and_transforms() {
        let a = big(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
        let (u, d, v) = smith_normal_form(&a);
        // Check u*a*v == d.
        let mul = |x: &Vec<Vec<BigInt>>, y: &Vec<Vec<BigInt>>| -> Vec<Vec<BigInt>> {
            let rows = x.len();
            let inner = y.len();
            let cols = y[0].len();
            (0..rows)
                .map(|i| {
                    (0..cols)
                        .map(|j| {
                            (0..inner).fold(BigInt::zero(), |acc, k| acc + &x[i][k] * &y[k][j])
                        })
                        .collect()
                })
                .collect()
        };
        let ad = mul(&mul(&u, &a), &v);
        assert_eq!(ad, d);
        // Diagonal, nonnegative, divisibility ladder.
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(d[i][j].is_zero());
                }
            }
        }
        for i in 0..2 {
            if !d[i + 1][i + 1].is_zero() {
                assert!((&d[i + 1][i + 1] % &d[i][i]).is_zero());
            }
        }
        // Unimodularity.
        let det_u = det(&u.iter()
            .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect::<Vec<_>>());
        assert_eq!(det_u.numer().abs(), BigInt::one());
    }

    #[test]
    fn rank_mod_p_detects_dependencies() {
        let p = 2_147_483_629u64;
        let rows = vec![
            vec![1, 2, 3],
            vec![2, 4, 6],
            vec![0, 1, 1],
        ];
        assert_eq!(rank_mod_p(rows, p), 2);
        assert_eq!(rank_mod_p(vec![vec![0, 0]], p), 0);
    }

    #[test]
    fn rational_reduction_mod_p() {
        let p = 1_000_003u64;
        let r = frac(1, 2);
        let v = rational_mod_p(&r, p).unwrap();
        assert_eq!(v as u128 * 2 % p as u128, 1);
        let bad = frac(1, 1_000_003);
        assert!(rational_mod_p(&bad, p).is_none());
    }
}
