/// Gaussian binomial coefficient `[a b]_q`, the number of b-dimensional
/// subspaces of GF(q)^a. Zero when `b > a`.
///
/// Computed with the q-Pascal recurrence `[a b] = [a-1 b-1] + q^b [a-1 b]`
/// in checked 128-bit arithmetic; `None` on overflow.
pub fn checked_gaussian(a: u32, b: u32, q: u64) -> Option<u128> {
    if b > a {
        return Some(0);
    }
    let b = b.min(a - b) as usize;
    let q = q as u128;
    // row[j] = [i j]_q for the current i
    let mut row = vec![0u128; b + 1];
    row[0] = 1;
    for i in 1..=a as usize {
        for j in (1..=b.min(i)).rev() {
            let qj = q.checked_pow(j as u32)?;
            row[j] = row[j - 1].checked_add(qj.checked_mul(row[j])?)?;
        }
    }
    Some(row[b])
}

/// Panics if the value does not fit in `u128`, far beyond anything enumerable.
pub fn gaussian(a: u32, b: u32, q: u64) -> u128 {
    checked_gaussian(a, b, q).expect("gaussian coefficient overflows u128")
}

/// `theta_m = [m+1 1]_q = q^m + ... + q + 1`, the number of points of PG(m, q).
pub fn theta(m: u32, q: u64) -> u128 {
    gaussian(m + 1, 1, q)
}

/// Number of flags of the given type (strictly increasing dimensions) in GF(q)^n.
pub fn flag_count(n: u32, omega: &[u8], q: u64) -> u128 {
    let mut total = 1u128;
    let mut upper = n;
    for &d in omega.iter().rev() {
        total = total
            .checked_mul(gaussian(upper, d as u32, q))
            .expect("flag count overflows u128");
        upper = d as u32;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    // Product form straight from the definition, exact in u128 for these sizes.
    fn product_form(a: u32, b: u32, q: u128) -> u128 {
        if b > a {
            return 0;
        }
        let mut num = 1u128;
        let mut den = 1u128;
        for i in 0..b {
            num *= q.pow(a - i) - 1;
            den *= q.pow(i + 1) - 1;
        }
        num / den
    }

    #[test]
    fn known_values() {
        assert_eq!(gaussian(3, 1, 3), 13);
        assert_eq!(gaussian(4, 1, 3), 40);
        assert_eq!(gaussian(4, 2, 3), 130);
        assert_eq!(gaussian(5, 2, 3), 1210);
        assert_eq!(gaussian(5, 1, 2), 31);
        assert_eq!(gaussian(2, 5, 7), 0);
        for a in 0..8 {
            assert_eq!(gaussian(a, 0, 5), 1);
        }
    }

    #[test]
    fn matches_product_form_and_symmetry() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            for a in 0..=8u32 {
                for b in 0..=a {
                    let g = gaussian(a, b, q);
                    assert_eq!(g, product_form(a, b, q as u128), "[{a} {b}]_{q}");
                    assert_eq!(g, gaussian(a, a - b, q));
                }
            }
        }
    }

    #[test]
    fn theta_values() {
        assert_eq!(theta(2, 2), 7);
        assert_eq!(theta(3, 2), 15);
        assert_eq!(theta(3, 3), 40);
        assert_eq!(theta(4, 2), 31);
        for q in 2..20u64 {
            assert_eq!(theta(3, q), (q.pow(4) - 1) as u128 / (q - 1) as u128);
        }
    }

    #[test]
    fn flag_counts() {
        assert_eq!(flag_count(5, &[2, 3], 2), 1085);
        assert_eq!(flag_count(5, &[2, 4], 2), 1085);
        assert_eq!(flag_count(5, &[2, 3], 3), 15730);
        assert_eq!(flag_count(5, &[1], 2), 31);
    }

    #[test]
    fn overflow_is_reported() {
        assert_eq!(checked_gaussian(60, 30, 27), None);
    }
}
