use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// `ℙ(0), …, ℙ(n)` by Euler's pentagonal recurrence.
pub fn partition_counts(n: usize) -> Vec<BigUint> {
    let mut p: Vec<BigUint> = Vec::with_capacity(n + 1);
    p.push(BigUint::from(1u8));
    for m in 1..=n {
        let mut plus = BigUint::zero();
        let mut minus = BigUint::zero();
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > m {
                break;
            }
            let target = if k % 2 == 1 { &mut plus } else { &mut minus };
            *target += &p[m - g1];
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= m {
                *target += &p[m - g2];
            }
        }
        p.push(plus - minus);
    }
    p
}

/// Number of integer partitions of `n`.
pub fn partition_count(n: usize) -> BigUint {
    partition_counts(n).pop().expect("table includes n")
}

/// Natural log of a big integer, accurate to double precision.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("64-bit mantissa").ln() + shift as f64 * std::f64::consts::LN_2
}
