//! Small integer helpers: factorization, totients, modular inverses.

use num_integer::Integer;

/// Prime factorization by trial division, as `(prime, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

pub fn totient(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(n) {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

/// Möbius function.
pub fn mobius(n: u64) -> i32 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u128;
    let mut b = (base % m) as u128;
    let m128 = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inv(a: i64, m: i64) -> Option<i64> {
    let e = a.rem_euclid(m).extended_gcd(&m);
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m))
}

/// Multiplicative order of `a` modulo `m` (requires gcd(a, m) = 1).
pub fn mult_order(a: u64, m: u64) -> u64 {
    let phi = totient(m);
    let mut ord = phi;
    for (p, _) in factorize(phi) {
        while ord % p == 0 && mod_pow(a, ord / p, m) == 1 {
            ord /= p;
        }
    }
    ord
}

/// Generators of (Z/n)^× giving a direct product decomposition into cyclic
/// subgroups, as `(generator, order)` pairs. Trivial factors are omitted.
pub fn unit_group_basis(n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    if n <= 2 {
        return out;
    }
    let factors = factorize(n);
    for &(p, e) in &factors {
        let pe = p.pow(e);
        let rest = n / pe;
        // lift a residue mod p^e to one that is 1 modulo the other prime powers
        let lift = |r: u64| -> u64 {
            if rest == 1 {
                return r % n;
            }
            let inv = mod_inv(rest as i64, pe as i64).unwrap() as u64;
            let a = ((r + pe - 1) % pe) as u128 * inv as u128 % pe as u128;
            ((1 + a * rest as u128) % n as u128) as u64
        };
        if p == 2 {
            if e >= 2 {
                out.push((lift(pe - 1), 2));
            }
            if e >= 3 {
                out.push((lift(5), pe / 4));
            }
        } else {
            let phi = pe / p * (p - 1);
            let g = (2..pe)
                .find(|&g| g % p != 0 && mult_order(g, pe) == phi)
                .expect("odd prime powers have primitive roots");
            out.push((lift(g), phi));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_and_totient() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(totient(156), 48);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
        assert!(is_prime(13) && !is_prime(9) && !is_prime(1));
    }

    #[test]
    fn unit_basis_generates_group() {
        for n in [3u64, 4, 8, 12, 16, 20, 24, 156, 240, 620] {
            let basis = unit_group_basis(n);
            let prod: u64 = basis.iter().map(|&(_, o)| o).product();
            assert_eq!(prod, totient(n), "n = {n}");
            let mut seen = std::collections::HashSet::new();
            let mut elems = vec![1u64];
            for &(g, o) in &basis {
                assert_eq!(mult_order(g, n), o);
                let mut next = Vec::new();
                for &x in &elems {
                    let mut y = x;
                    for _ in 0..o {
                        next.push(y);
                        y = y * g % n;
                    }
                }
                elems = next;
            }
            for x in elems {
                assert!(seen.insert(x), "duplicate {x} for n = {n}");
            }
            assert_eq!(seen.len() as u64, totient(n));
        }
    }
}
