use serde::Serialize;

use crate::geometry::{gaussian, theta};

/// Largest EKR sets of `qK_{5;{2,4}}` (point-pencils): `θ3·θ2`.
pub fn e0_24(q: u64) -> u128 {
    theta(3, q) * theta(2, q)
}

/// Bound for EKR sets of `qK_{5;{2,4}}` not inside a point-pencil:
/// `2q^4 + 3q^3 + 4q^2 + 2q + 1`.
pub fn e1_24(q: u64) -> u128 {
    let q = q as u128;
    2 * q.pow(4) + 3 * q.pow(3) + 4 * q * q + 2 * q + 1
}

/// Largest EKR sets of line-plane flags: `[4 3]·[3 2] + q^2 [3 1] = θ2 (θ3 + q^2)`.
pub fn e0_23(q: u64) -> u128 {
    theta(2, q) * (theta(3, q) + (q as u128).pow(2))
}

/// Bound for EKR sets of line-plane flags outside the four maximum families:
/// `4q^4 + 9q^3 + 4q^2 + q + 1`.
pub fn e1_23(q: u64) -> u128 {
    let q = q as u128;
    4 * q.pow(4) + 9 * q.pow(3) + 4 * q * q + q + 1
}

/// Size of the special part of each maximum line-plane family: `q^2 θ2`.
pub fn special_part_size(q: u64) -> u128 {
    (q as u128).pow(2) * theta(2, q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub lhs: i128,
    pub rhs: i128,
    pub equal: bool,
}

/// Line-plane flag count two ways:
/// `[5 3][3 2] = (θ3 - q)·e0 - (2q^7 + 3q^6 + 4q^5 + 3q^4 + 2q^3 + q^2)`.
pub fn line_plane_identity(q: u64) -> IdentityCheck {
    let lhs = (gaussian(5, 3, q) * gaussian(3, 2, q)) as i128;
    let qi = q as i128;
    let classes = theta(3, q) as i128 - qi;
    let correction = 2 * qi.pow(7) + 3 * qi.pow(6) + 4 * qi.pow(5) + 3 * qi.pow(4) + 2 * qi.pow(3) + qi * qi;
    let rhs = classes * e0_23(q) as i128 - correction;
    IdentityCheck {
        lhs,
        rhs,
        equal: lhs == rhs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_at_small_q() {
        assert_eq!(e0_24(2), 105);
        assert_eq!(e0_24(3), 520);
        assert_eq!(e1_24(2), 77);
        assert_eq!(e0_23(2), 133);
        assert_eq!(e0_23(3), 637);
        assert_eq!(e1_23(2), 155);
        assert_eq!(special_part_size(2), 28);
        assert_eq!(special_part_size(3), 117);
    }

    #[test]
    fn e0_23_two_forms_agree() {
        for q in 2..30u64 {
            let direct = gaussian(4, 3, q) * gaussian(3, 2, q) + (q as u128).pow(2) * gaussian(3, 1, q);
            assert_eq!(direct, e0_23(q));
        }
    }

    #[test]
    fn e1_24_factors_through_theta2() {
        // e1 = (2q^2 + q + 1) θ2
        for q in 2..30u64 {
            let qq = q as u128;
            assert_eq!(e1_24(q), (2 * qq * qq + qq + 1) * theta(2, q));
        }
    }

    #[test]
    fn identity_small_values() {
        let c = line_plane_identity(2);
        assert_eq!((c.lhs, c.rhs), (1085, 1085));
        assert_eq!(13 * 133 - 644, 1085);
        let c = line_plane_identity(3);
        assert_eq!((c.lhs, c.rhs), (15730, 15730));
        assert_eq!(37 * 637 - 7839, 15730);
    }

    #[test]
    fn identity_holds_for_q_up_to_16() {
        for q in 2..=16 {
            assert!(line_plane_identity(q).equal, "q = {q}");
        }
    }
}
