//! Exhaustive desk-scale counting experiments: the fixed-denominator
//! normality census and its decay fit, Farey length statistics, the
//! denominator-normality proportion, base-b string counts, the b-adic
//! segment census, and the enclosure of the non-normal measure at a fixed
//! CF depth.

mod denom;
mod dyadic;
mod farey_stats;
mod scheerer;
mod strings;
mod thm14;

pub use denom::{denominator_normal_census, DenomCensusReport};
pub use dyadic::{dyadic_segment_census, implied_constant, DyadicMode, DyadicReport};
pub use farey_stats::{farey_length_stats, LengthStats};
pub use scheerer::{scheerer_measure, ScheererEnclosure, ScheererOptions};
pub use strings::{ce_string_census, CeMode, CeReport};
pub use thm14::{
    census_sweep, fit_decay, fixed_denominator_census, CensusRecord, DecayFit, VariantPolicy,
};

/// Euler totients `phi(0..=n)` by a linear sieve.
pub fn totient_sieve(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut phi: Vec<u64> = (0..=n as u64).collect();
    for p in 2..=n {
        if phi[p] == p as u64 {
            // p is prime
            let mut k = p;
            while k <= n {
                phi[k] -= phi[k] / p as u64;
                k += p;
            }
        }
    }
    phi
}

/// Primes up to `n` by Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut p = 2;
    while p * p <= n {
        if sieve[p] {
            let mut k = p * p;
            while k <= n {
                sieve[k] = false;
                k += p;
            }
        }
        p += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &is_p)| is_p.then_some(i as u64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totients() {
        let phi = totient_sieve(12);
        assert_eq!(phi[1..], [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]);
    }

    #[test]
    fn totient_matches_gcd_count() {
        let phi = totient_sieve(200);
        for d in 1..=200u64 {
            let direct = (1..=d).filter(|&a| num_integer::gcd(a, d) == 1).count() as u64;
            assert_eq!(phi[d as usize], direct, "d={d}");
        }
    }

    #[test]
    fn primes() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(primes_up_to(1), Vec::<u64>::new());
        assert_eq!(primes_up_to(10_000).len(), 1229);
    }
}
