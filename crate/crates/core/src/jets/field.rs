//! Finite fields `F_{p^e}` with logarithm tables, and univariate root
//! counting over them.

use crate::error::{Error, Result};

/// Largest field order for which tables are built.
pub const MAX_FIELD_ORDER: u64 = 1 << 24;

/// Elements are `0..q`, read as base-`p` digit vectors (coefficients of the
/// defining polynomial's residue classes); the prime subfield is `0..p`.
#[derive(Clone, Debug)]
pub struct Field {
    p: u32,
    e: u32,
    q: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Residue arithmetic on digit vectors modulo a monic polynomial of degree
/// `e` over `F_p`; `modulus` holds the low coefficients `c_0..c_{e−1}`.
struct PolyRing<'a> {
    p: u64,
    modulus: &'a [u64],
}

impl PolyRing<'_> {
    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let e = self.modulus.len();
        let mut prod = vec![0u64; 2 * e];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        for k in (e..2 * e).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            // x^e = −Σ c_i x^i
            for (i, &m) in self.modulus.iter().enumerate() {
                let idx = k - e + i;
                prod[idx] = (prod[idx] + self.p - (c * m) % self.p) % self.p;
            }
        }
        prod.truncate(e);
        prod
    }

    fn pow(&self, base: &[u64], mut k: u64) -> Vec<u64> {
        let e = self.modulus.len();
        let mut acc = vec![0u64; e];
        acc[0] = 1;
        let mut b = base.to_vec();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            k >>= 1;
        }
        acc
    }
}

impl Field {
    /// `F_{p^e}`, built from the first primitive polynomial in lexicographic
    /// order of its coefficient digits.
    pub fn new(p: u32, e: u32) -> Result<Self> {
        if !is_prime(p as u64) || e == 0 {
            return Err(Error::Invalid(format!("F_{{{p}^{e}}} is not a field")));
        }
        let q = (p as u64)
            .checked_pow(e)
            .filter(|&q| q <= MAX_FIELD_ORDER)
            .ok_or_else(|| Error::Invalid(format!("field order {p}^{e} exceeds the table limit {MAX_FIELD_ORDER}")))?;
        let (p64, eu) = (p as u64, e as usize);
        let order = q - 1;
        let factors = prime_factors(order);
        let mut x = vec![0u64; eu];
        if eu > 1 {
            x[1] = 1;
        }
        let mut modulus = None;
        for code in 0..q {
            let coeffs: Vec<u64> = (0..eu).map(|i| code / p64.pow(i as u32) % p64).collect();
            if coeffs[0] == 0 {
                continue;
            }
            let ring = PolyRing { p: p64, modulus: &coeffs };
            // for e = 1 the class of x is −c_0
            let gen: Vec<u64> = if eu == 1 { vec![(p64 - coeffs[0]) % p64] } else { x.clone() };
            let mut one = vec![0u64; eu];
            one[0] = 1;
            if ring.pow(&gen, order) != one {
                continue;
            }
            if factors.iter().all(|&r| ring.pow(&gen, order / r) != one) {
                modulus = Some((coeffs, gen));
                break;
            }
        }
        let (coeffs, gen) = modulus.expect("a primitive polynomial exists");
        let ring = PolyRing { p: p64, modulus: &coeffs };
        let encode = |v: &[u64]| v.iter().rev().fold(0u64, |acc, &d| acc * p64 + d) as u32;
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; q as usize];
        let mut cur = vec![0u64; eu];
        cur[0] = 1;
        for k in 0..order {
            let code = encode(&cur);
            exp.push(code);
            log[code as usize] = k as u32;
            cur = ring.mul(&cur, &gen);
        }
        Ok(Self { p, e, q: q as u32, exp, log })
    }

    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.e == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0u32, 1u32);
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place = place.wrapping_mul(self.p);
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.e == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        let (mut a, mut out, mut place) = (a, 0u32, 1u32);
        while a > 0 {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place = place.wrapping_mul(self.p);
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] as u64 + self.log[b as usize] as u64;
        self.exp[(s % (self.q as u64 - 1)) as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        let l = self.log[a as usize];
        self.exp[((self.q - 1 - l) % (self.q - 1)) as usize]
    }

    pub fn pow(&self, a: u32, k: u64) -> u32 {
        if k == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = self.log[a as usize] as u128 * k as u128;
        self.exp[(l % (self.q as u128 - 1)) as usize]
    }

    /// Discrete logarithm to the table generator; `a ≠ 0`.
    pub fn log(&self, a: u32) -> u32 {
        assert!(a != 0, "logarithm of zero");
        self.log[a as usize]
    }

    pub fn exp(&self, k: u64) -> u32 {
        self.exp[(k % (self.q as u64 - 1)) as usize]
    }

    /// Image of an integer in the prime subfield.
    pub fn from_i128(&self, c: i128) -> u32 {
        c.rem_euclid(self.p as i128) as u32
    }

    pub fn elements(&self) -> std::ops::Range<u32> {
        0..self.q
    }

    fn trim(&self, mut f: Vec<u32>) -> Vec<u32> {
        while f.last() == Some(&0) {
            f.pop();
        }
        f
    }

    fn poly_mulmod(&self, a: &[u32], b: &[u32], m: &[u32]) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut prod = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = self.add(prod[i + j], self.mul(x, y));
            }
        }
        self.poly_rem(prod, m)
    }

    fn poly_rem(&self, mut a: Vec<u32>, m: &[u32]) -> Vec<u32> {
        let dm = m.len() - 1;
        let lead_inv = self.inv(m[dm]);
        while a.len() > dm {
            let top = *a.last().expect("nonempty");
            if top != 0 {
                let c = self.mul(top, lead_inv);
                let shift = a.len() - 1 - dm;
                for (i, &mi) in m.iter().enumerate() {
                    a[shift + i] = self.sub(a[shift + i], self.mul(c, mi));
                }
            }
            a.pop();
        }
        self.trim(a)
    }

    fn poly_gcd(&self, a: Vec<u32>, b: Vec<u32>) -> Vec<u32> {
        let (mut a, mut b) = (self.trim(a), self.trim(b));
        while !b.is_empty() {
            let r = self.poly_rem(a, &b);
            a = b;
            b = r;
        }
        a
    }

    fn eval_poly(&self, f: &[u32], x: u32) -> u32 {
        f.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// Solutions of `x^d = c` with `c ≠ 0`.
    fn binomial_roots(&self, d: u64, c: u32) -> Vec<u32> {
        let n = self.q as u64 - 1;
        let g = num_integer::gcd(d, n);
        let lc = self.log(c) as u64;
        if !lc.is_multiple_of(g) {
            return vec![];
        }
        let (d1, n1) = (d / g, n / g);
        // d1 is invertible modulo n1
        let inv = mod_inverse(d1 % n1.max(1), n1.max(1));
        let base = (lc / g) * inv % n1.max(1);
        let mut roots: Vec<u32> = (0..g).map(|k| self.exp(base + k * n1)).collect();
        roots.sort_unstable();
        roots
    }

    /// Number of distinct roots in the field of a nonzero polynomial given
    /// by its coefficients (lowest degree first).
    pub fn count_roots(&self, f: &[u32]) -> u64 {
        let f = self.trim(f.to_vec());
        assert!(!f.is_empty(), "root count of the zero polynomial");
        let low = f.iter().position(|&c| c != 0).expect("nonzero");
        let h = &f[low..];
        let at_zero = u64::from(low > 0);
        let d = h.len() - 1;
        if d == 0 {
            return at_zero;
        }
        if d == 1 || h[1..d].iter().all(|&c| c == 0) {
            // a x^d + b with b ≠ 0
            let c = self.neg(self.mul(h[0], self.inv(h[d])));
            return at_zero + self.binomial_roots(d as u64, c).len() as u64;
        }
        if d == 2 && self.p != 2 {
            let disc = self.sub(self.mul(h[1], h[1]), self.mul(self.from_i128(4), self.mul(h[0], h[2])));
            let roots = if disc == 0 {
                1
            } else if self.log(disc).is_multiple_of(2) {
                2
            } else {
                0
            };
            // x = 0 is not a root of h
            return at_zero + roots;
        }
        // deg gcd(h, x^q − x)
        let mut xq = vec![0, 1];
        let mut k = self.q as u64;
        let mut acc = vec![1u32];
        let mut base = self.poly_rem(xq.clone(), h);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.poly_mulmod(&acc, &base, h);
            }
            base = self.poly_mulmod(&base, &base, h);
            k >>= 1;
        }
        xq = acc;
        xq.resize(xq.len().max(2), 0);
        xq[1] = self.sub(xq[1], 1);
        let g = self.poly_gcd(h.to_vec(), xq);
        at_zero + (g.len() as u64).saturating_sub(1)
    }

    /// Distinct roots, sorted.
    pub fn roots(&self, f: &[u32]) -> Vec<u32> {
        let f = self.trim(f.to_vec());
        assert!(!f.is_empty(), "roots of the zero polynomial");
        let low = f.iter().position(|&c| c != 0).expect("nonzero");
        let h = &f[low..];
        let d = h.len() - 1;
        let mut out = if low > 0 { vec![0] } else { vec![] };
        if d == 0 {
            return out;
        }
        if d == 1 || h[1..d].iter().all(|&c| c == 0) {
            let c = self.neg(self.mul(h[0], self.inv(h[d])));
            out.extend(self.binomial_roots(d as u64, c));
        } else if d == 2 && self.p != 2 {
            let disc = self.sub(self.mul(h[1], h[1]), self.mul(self.from_i128(4), self.mul(h[0], h[2])));
            let inv2a = self.inv(self.mul(self.from_i128(2), h[2]));
            let nb = self.neg(h[1]);
            if disc == 0 {
                out.push(self.mul(nb, inv2a));
            } else if self.log(disc).is_multiple_of(2) {
                let s = self.exp(self.log(disc) as u64 / 2);
                out.push(self.mul(self.add(nb, s), inv2a));
                out.push(self.mul(self.sub(nb, s), inv2a));
            }
        } else {
            out.extend(self.elements().filter(|&x| x != 0 && self.eval_poly(h, x) == 0));
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn mod_inverse(a: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (n as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "not invertible");
    t.rem_euclid(n as i128) as u64
}
