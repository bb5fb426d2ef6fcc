//! Stirling-type triangles from their row recurrences. Nothing here touches
//! power series, so these tables are an independent route to the numbers
//! built by `special::triangle`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rational::{int, Rational};

/// Integer triangle with `rows[n][k]`, `0 <= k <= min(n, kmax)`.
pub type IntRows = Vec<Vec<BigInt>>;
/// Rational triangle with `rows[n][k]`.
pub type RatRows = Vec<Vec<Rational>>;

fn int_rows(nmax: usize, kmax: usize, step: impl Fn(usize, usize) -> BigInt) -> IntRows {
    // step(n, k) multiplies T(n, k) in T(n+1, k) = T(n, k-1) + step * T(n, k).
    let mut rows: IntRows = vec![vec![BigInt::one()]];
    for n in 0..nmax {
        let width = (n + 1).min(kmax) + 1;
        let prev = &rows[n];
        let mut next = vec![BigInt::zero(); width];
        for (k, slot) in next.iter_mut().enumerate() {
            if k >= 1 && k - 1 < prev.len() {
                *slot += &prev[k - 1];
            }
            if k < prev.len() {
                *slot += step(n, k) * &prev[k];
            }
        }
        rows.push(next);
    }
    rows
}

fn rat_rows(nmax: usize, kmax: usize, step: impl Fn(usize, usize) -> Rational) -> RatRows {
    let mut rows: RatRows = vec![vec![Rational::one()]];
    for n in 0..nmax {
        let width = (n + 1).min(kmax) + 1;
        let prev = &rows[n];
        let mut next = vec![Rational::zero(); width];
        for (k, slot) in next.iter_mut().enumerate() {
            if k >= 1 && k - 1 < prev.len() {
                *slot += &prev[k - 1];
            }
            if k < prev.len() {
                *slot += step(n, k) * &prev[k];
            }
        }
        rows.push(next);
    }
    rows
}

/// Signed Stirling numbers of the first kind, `S1(n+1,k) = S1(n,k-1) - n S1(n,k)`.
pub fn stirling1(nmax: usize, kmax: usize) -> IntRows {
    int_rows(nmax, kmax, |n, _| -BigInt::from(n))
}

/// `S2(n+1,k) = S2(n,k-1) + k S2(n,k)`.
pub fn stirling2(nmax: usize, kmax: usize) -> IntRows {
    int_rows(nmax, kmax, |_, k| BigInt::from(k))
}

/// Unsigned Lah numbers, `L(n+1,k) = L(n,k-1) + (n+k) L(n,k)`.
pub fn lah(nmax: usize, kmax: usize) -> IntRows {
    int_rows(nmax, kmax, |n, k| BigInt::from(n + k))
}

/// `S1_lambda(n+1,k) = S1_lambda(n,k-1) + (k lambda - n) S1_lambda(n,k)`.
pub fn deg_stirling1(lambda: &Rational, nmax: usize, kmax: usize) -> RatRows {
    rat_rows(nmax, kmax, |n, k| int(k as i64) * lambda - int(n as i64))
}

/// `S2_lambda(n+1,k) = S2_lambda(n,k-1) + (k - n lambda) S2_lambda(n,k)`.
pub fn deg_stirling2(lambda: &Rational, nmax: usize, kmax: usize) -> RatRows {
    rat_rows(nmax, kmax, |n, k| int(k as i64) - int(n as i64) * lambda)
}

/// Looks up `rows[n][k]`, zero outside the stored range.
pub fn at<T: Clone + Zero>(rows: &[Vec<T>], n: usize, k: usize) -> T {
    rows.get(n)
        .and_then(|row| row.get(k))
        .cloned()
        .unwrap_or_else(T::zero)
}

/// Integer entry as a rational.
pub fn at_q(rows: &IntRows, n: usize, k: usize) -> Rational {
    Rational::from_integer(at(rows, n, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn small_rows() {
        let s1 = stirling1(4, 4);
        let row: Vec<i64> = s1[4].iter().map(|v| v.try_into().unwrap()).collect();
        assert_eq!(row, vec![0, -6, 11, -6, 1]);
        let s2 = stirling2(5, 5);
        assert_eq!(at(&s2, 5, 2), BigInt::from(15));
        assert_eq!(at(&lah(4, 4), 4, 2), BigInt::from(36));
    }

    #[test]
    fn column_cap() {
        let s2 = stirling2(30, 3);
        assert_eq!(s2[30].len(), 4);
        let full = stirling2(30, 30);
        for k in 0..=3 {
            assert_eq!(s2[30][k], full[30][k]);
        }
    }

    #[test]
    fn degenerate_at_zero_is_classical() {
        let zero = Rational::zero();
        let d1 = deg_stirling1(&zero, 8, 8);
        let d2 = deg_stirling2(&zero, 8, 8);
        let s1 = stirling1(8, 8);
        let s2 = stirling2(8, 8);
        for n in 0..=8 {
            for k in 0..=n {
                assert_eq!(d1[n][k], at_q(&s1, n, k));
                assert_eq!(d2[n][k], at_q(&s2, n, k));
            }
        }
        // S2_lambda(2,1) = 1 - lambda
        assert_eq!(deg_stirling2(&rat(1, 3), 2, 2)[2][1], rat(2, 3));
    }
}
