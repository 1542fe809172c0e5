//! Arithmetic in the tower `F_p ⊂ F_q ⊂ F_{q^n}`, `q = p^r`.
//!
//! `F_q` elements are `u32` indices: the little-endian base-`p` digits are the
//! coefficients over `F_p` in the power basis of the base modulus root. This
//! integer order is the canonical scalar order everywhere in the crate.
//! `F_{q^n}` elements are length-`n` coefficient vectors over `F_q`.
//!
//! Both moduli default to the lexicographically least monic irreducible
//! polynomial, comparing coefficients from the constant term upward.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::Serialize;

use crate::abelian::is_prime;
use crate::error::{precondition, structural, Error, Result};
use crate::linalg;
use crate::subspace::Subspace;

/// Largest base-field order.
pub const MAX_BASE_ORDER: u64 = 1 << 16;
/// Largest extension order `q^n` accepted at construction.
pub const MAX_TOWER_ORDER: u64 = 1 << 24;
/// Largest `q^n` for exhaustive element sweeps.
pub const MAX_SWEEP_ORDER: u64 = 1 << 12;

/// The base field `F_q`.
#[derive(Debug, Clone)]
pub struct BaseField {
    p: u32,
    r: u32,
    q: u32,
    /// Monic, degree `r`, over `F_p`, low to high.
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    add_table: Option<Vec<u32>>,
}

impl PartialEq for BaseField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.r == other.r && self.modulus == other.modulus
    }
}

impl Eq for BaseField {}

impl Hash for BaseField {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.p.hash(state);
        self.r.hash(state);
        self.modulus.hash(state);
    }
}

impl BaseField {
    /// `F_q` with the default (lexicographically least) modulus.
    pub fn new(p: u64, r: u32) -> Result<Arc<Self>> {
        let prime = Self::prime(p)?;
        if r == 0 {
            return Err(precondition("extension degree r must be positive"));
        }
        if r == 1 {
            return Ok(prime);
        }
        check_order(p, r as u64, MAX_BASE_ORDER, "base field")?;
        let modulus = least_irreducible(&prime, r as usize);
        Ok(Arc::new(Self::build(p as u32, r, modulus)))
    }

    /// `F_q` defined by an explicit modulus over `F_p` (monic, low to high).
    pub fn with_modulus(p: u64, modulus: Vec<u32>) -> Result<Arc<Self>> {
        let prime = Self::prime(p)?;
        if modulus.len() < 2 {
            return Err(structural("base modulus must have degree >= 1"));
        }
        let r = (modulus.len() - 1) as u32;
        check_order(p, r as u64, MAX_BASE_ORDER, "base field")?;
        if modulus.iter().any(|&c| c as u64 >= p) || *modulus.last().unwrap() != 1 {
            return Err(structural("base modulus must be monic with coefficients in F_p"));
        }
        if !is_irreducible(&prime, &modulus) {
            return Err(structural(format!("base modulus {modulus:?} is reducible over F_{p}")));
        }
        if r == 1 {
            // any monic linear modulus gives the same field; keep the canonical one
            return Ok(prime);
        }
        Ok(Arc::new(Self::build(p as u32, r, modulus)))
    }

    /// The prime field `F_p`, modulus `x`.
    pub fn prime(p: u64) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p > MAX_BASE_ORDER {
            return Err(Error::CapExceeded(format!("prime {p} exceeds {MAX_BASE_ORDER}")));
        }
        Ok(Arc::new(Self::build(p as u32, 1, vec![0, 1])))
    }

    fn build(p: u32, r: u32, modulus: Vec<u32>) -> Self {
        let q = p.pow(r);
        let slow_mul = |a: u32, b: u32| -> u32 {
            if r == 1 {
                ((a as u64 * b as u64) % p as u64) as u32
            } else {
                let da = to_digits(a, p, r);
                let db = to_digits(b, p, r);
                let prod = prime_poly_mulmod(&da, &db, &modulus, p);
                from_digits(&prod, p)
            }
        };
        // primitive element search: least g whose order is q - 1
        let order = (q - 1) as u64;
        let factors = prime_factors(order);
        let pow = |g: u32, mut e: u64| -> u32 {
            let mut acc = 1u32;
            let mut base = g;
            while e > 0 {
                if e & 1 == 1 {
                    acc = slow_mul(acc, base);
                }
                base = slow_mul(base, base);
                e >>= 1;
            }
            acc
        };
        let gen = (1..q)
            .find(|&g| factors.iter().all(|&f| pow(g, order / f) != 1))
            .unwrap_or(1);
        let mut exp = vec![0u32; q as usize];
        let mut log = vec![0u32; q as usize];
        let mut cur = 1u32;
        for (i, slot) in exp.iter_mut().enumerate().take((q - 1) as usize) {
            *slot = cur;
            log[cur as usize] = i as u32;
            cur = slow_mul(cur, gen);
        }
        let add_table = if p != 2 && r > 1 && q <= 256 {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = digit_add(a, b, p, r);
                }
            }
            Some(t)
        } else {
            None
        };
        BaseField {
            p,
            r,
            q,
            modulus,
            exp,
            log,
            add_table,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            a ^ b
        } else if self.r == 1 {
            let s = a + b;
            if s >= self.p {
                s - self.p
            } else {
                s
            }
        } else if let Some(t) = &self.add_table {
            t[(a * self.q + b) as usize]
        } else {
            digit_add(a, b, self.p, self.r)
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            a
        } else if self.r == 1 {
            if a == 0 {
                0
            } else {
                self.p - a
            }
        } else {
            let d: Vec<u32> = to_digits(a, self.p, self.r)
                .into_iter()
                .map(|c| if c == 0 { 0 } else { self.p - c })
                .collect();
            from_digits(&d, self.p)
        }
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
        if self.r == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        let s = self.log[a as usize] + self.log[b as usize];
        let m = self.q - 1;
        self.exp[(if s >= m { s - m } else { s }) as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        if self.q == 2 {
            return Ok(1);
        }
        let m = self.q - 1;
        let l = self.log[a as usize];
        Ok(self.exp[((m - l) % m) as usize])
    }

    pub fn digits(&self, a: u32) -> Vec<u32> {
        to_digits(a, self.p, self.r)
    }

    pub fn from_digits(&self, d: &[u32]) -> Result<u32> {
        if d.len() != self.r as usize || d.iter().any(|&c| c >= self.p) {
            return Err(structural(format!(
                "F_q scalar needs {} digits in [0,{})",
                self.r, self.p
            )));
        }
        Ok(from_digits(d, self.p))
    }
}

fn check_order(p: u64, e: u64, cap: u64, what: &str) -> Result<u64> {
    let mut acc: u64 = 1;
    for _ in 0..e {
        acc = acc
            .checked_mul(p)
            .filter(|&v| v <= cap)
            .ok_or_else(|| Error::CapExceeded(format!("{what} order {p}^{e} exceeds {cap}")))?;
    }
    Ok(acc)
}

fn to_digits(mut a: u32, p: u32, r: u32) -> Vec<u32> {
    let mut d = Vec::with_capacity(r as usize);
    for _ in 0..r {
        d.push(a % p);
        a /= p;
    }
    d
}

fn from_digits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn digit_add(mut a: u32, mut b: u32, p: u32, r: u32) -> u32 {
    let mut out = 0;
    let mut place = 1;
    for _ in 0..r {
        out += ((a % p + b % p) % p) * place;
        a /= p;
        b /= p;
        place *= p;
    }
    out
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

fn prime_poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let r = m.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    for k in (r..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (i, &mi) in m.iter().enumerate().take(r) {
            let idx = k - r + i;
            prod[idx] = (prod[idx] + (p as u64 - c) * mi as u64) % p as u64;
        }
    }
    prod.truncate(r);
    prod.resize(r, 0);
    prod.into_iter().map(|c| c as u32).collect()
}

// --- polynomials over F_q, coefficient vectors low to high, trimmed ---

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(f: &BaseField, a: &[u32], m: &[u32]) -> Vec<u32> {
    let mut a = trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = f.inv(*m.last().unwrap()).expect("nonzero leading coefficient");
    while a.len() > dm {
        let k = a.len() - 1;
        let c = f.mul(a[k], lead_inv);
        for (i, &mi) in m.iter().enumerate() {
            let idx = k - dm + i;
            a[idx] = f.sub(a[idx], f.mul(c, mi));
        }
        a = trim(a);
    }
    a
}

fn poly_mul(f: &BaseField, a: &[u32], b: &[u32]) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(out)
}

fn poly_powmod(f: &BaseField, base: &[u32], mut e: u64, m: &[u32]) -> Vec<u32> {
    let mut acc = vec![1u32];
    let mut b = poly_rem(f, base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_rem(f, &poly_mul(f, &acc, &b), m);
        }
        b = poly_rem(f, &poly_mul(f, &b, &b), m);
        e >>= 1;
    }
    acc
}

fn poly_gcd(f: &BaseField, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(f, &a, &b);
        a = b;
        b = r;
    }
    a
}

/// Ben-Or irreducibility test for a monic polynomial over `f`.
pub fn is_irreducible(f: &BaseField, poly: &[u32]) -> bool {
    let poly = trim(poly.to_vec());
    if poly.len() < 2 {
        return false;
    }
    let d = poly.len() - 1;
    let x = vec![0, 1];
    let mut h = x.clone();
    for _ in 0..d / 2 {
        h = poly_powmod(f, &h, f.q() as u64, &poly);
        let mut diff = h.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = f.sub(diff[1], 1);
        let g = poly_gcd(f, &poly, &trim(diff));
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Least monic irreducible of degree `n` over `f`, comparing coefficient
/// tuples `(c_0, c_1, ..., c_{n-1})` lexicographically.
pub fn least_irreducible(f: &BaseField, n: usize) -> Vec<u32> {
    let q = f.q() as u64;
    let total = q.pow(n as u32);
    for idx in 0..total {
        let mut coeffs = vec![0u32; n + 1];
        let mut rest = idx;
        // c_0 is the most significant digit of idx
        for j in (0..n).rev() {
            coeffs[j] = (rest % q) as u32;
            rest /= q;
        }
        coeffs[n] = 1;
        if is_irreducible(f, &coeffs) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// An element of `F_{q^n}` as coordinates over `F_q` in the power basis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct FieldElement(pub Vec<u32>);

impl FieldElement {
    pub fn coeffs(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// The extension `F_q ⊂ F_{q^n}`.
#[derive(Debug, Clone)]
pub struct FieldTower {
    base: Arc<BaseField>,
    n: usize,
    /// Monic degree `n` over `F_q`, low to high.
    top_modulus: Vec<u32>,
    /// `x^k mod top_modulus` for `k` in `n..2n-1`.
    reductions: Vec<Vec<u32>>,
    /// Columns are images of the power basis under `x ↦ x^q`.
    frobenius: Vec<Vec<u32>>,
    order: u64,
}

impl PartialEq for FieldTower {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.n == other.n && self.top_modulus == other.top_modulus
    }
}

impl Eq for FieldTower {}

impl FieldTower {
    /// The tower with default moduli.
    pub fn new(p: u64, r: u32, n: usize) -> Result<Self> {
        let base = BaseField::new(p, r)?;
        Self::over(base, n)
    }

    pub fn over(base: Arc<BaseField>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(precondition("extension degree n must be positive"));
        }
        check_order(base.q() as u64, n as u64, MAX_TOWER_ORDER, "extension")?;
        let top = least_irreducible(&base, n);
        Ok(Self::build(base, n, top))
    }

    pub fn with_moduli(p: u64, base_modulus: Vec<u32>, top_modulus: Vec<u32>) -> Result<Self> {
        let base = BaseField::with_modulus(p, base_modulus)?;
        if top_modulus.len() < 2 {
            return Err(structural("top modulus must have degree >= 1"));
        }
        let n = top_modulus.len() - 1;
        check_order(base.q() as u64, n as u64, MAX_TOWER_ORDER, "extension")?;
        if top_modulus.iter().any(|&c| c >= base.q()) || *top_modulus.last().unwrap() != 1 {
            return Err(structural("top modulus must be monic with coefficients in F_q"));
        }
        if !is_irreducible(&base, &top_modulus) {
            return Err(structural(format!("top modulus {top_modulus:?} is reducible over F_q")));
        }
        Ok(Self::build(base, n, top_modulus))
    }

    fn build(base: Arc<BaseField>, n: usize, top_modulus: Vec<u32>) -> Self {
        let order = (base.q() as u64).pow(n as u32);
        let mut reductions = Vec::with_capacity(n);
        let mut cur: Vec<u32> = top_modulus[..n].iter().map(|&c| base.neg(c)).collect();
        for _ in n..2 * n {
            reductions.push(cur.clone());
            // multiply by x
            let carry = cur[n - 1];
            let mut next = vec![0u32; n];
            next[1..n].copy_from_slice(&cur[..n - 1]);
            for (i, slot) in next.iter_mut().enumerate() {
                *slot = base.add(*slot, base.mul(carry, base.neg(top_modulus[i])));
            }
            cur = next;
        }
        let mut tower = FieldTower {
            base,
            n,
            top_modulus,
            reductions,
            frobenius: Vec::new(),
            order,
        };
        let q = tower.base.q() as u64;
        tower.frobenius = (0..n)
            .map(|i| {
                let mut e = vec![0u32; n];
                e[i] = 1;
                tower.pow(&FieldElement(e), q).0
            })
            .collect();
        tower
    }

    pub fn base(&self) -> &Arc<BaseField> {
        &self.base
    }

    pub fn p(&self) -> u32 {
        self.base.p()
    }

    pub fn r(&self) -> u32 {
        self.base.r()
    }

    pub fn q(&self) -> u32 {
        self.base.q()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn top_modulus(&self) -> &[u32] {
        &self.top_modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(vec![0; self.n])
    }

    pub fn one(&self) -> FieldElement {
        let mut v = vec![0; self.n];
        v[0] = 1;
        FieldElement(v)
    }

    /// The class of `x`, i.e. the modulus root.
    pub fn generator(&self) -> FieldElement {
        if self.n == 1 {
            return FieldElement(vec![self.base.neg(self.top_modulus[0])]);
        }
        let mut v = vec![0; self.n];
        v[1] = 1;
        FieldElement(v)
    }

    pub fn element(&self, coeffs: Vec<u32>) -> Result<FieldElement> {
        if coeffs.len() != self.n {
            return Err(structural(format!(
                "element needs {} coefficients, got {}",
                self.n,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|&c| c >= self.q()) {
            return Err(structural("element coefficient out of range for F_q"));
        }
        Ok(FieldElement(coeffs))
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        x.0.len() == self.n && x.0.iter().all(|&c| c < self.q())
    }

    /// Position in lexicographic order of coefficient vectors.
    pub fn index_of(&self, x: &FieldElement) -> u64 {
        linalg::vector_index(self.q(), &x.0)
    }

    pub fn from_index(&self, idx: u64) -> FieldElement {
        FieldElement(linalg::vector_from_index(self.q(), self.n, idx))
    }

    /// All elements in canonical order. Capped at [`MAX_SWEEP_ORDER`].
    pub fn elements(&self) -> Result<impl Iterator<Item = FieldElement> + '_> {
        if self.order > MAX_SWEEP_ORDER {
            return Err(Error::CapExceeded(format!(
                "element sweep over {} elements exceeds {}",
                self.order, MAX_SWEEP_ORDER
            )));
        }
        Ok((0..self.order).map(|i| self.from_index(i)))
    }

    pub fn add(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        FieldElement(x.0.iter().zip(&y.0).map(|(&a, &b)| self.base.add(a, b)).collect())
    }

    pub fn sub(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        FieldElement(x.0.iter().zip(&y.0).map(|(&a, &b)| self.base.sub(a, b)).collect())
    }

    pub fn neg(&self, x: &FieldElement) -> FieldElement {
        FieldElement(x.0.iter().map(|&a| self.base.neg(a)).collect())
    }

    pub fn scalar_mul(&self, c: u32, x: &FieldElement) -> FieldElement {
        FieldElement(x.0.iter().map(|&a| self.base.mul(c, a)).collect())
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let f = &self.base;
        let n = self.n;
        let mut prod = vec![0u32; 2 * n - 1];
        for (i, &a) in x.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.0.iter().enumerate() {
                if b != 0 {
                    prod[i + j] = f.add(prod[i + j], f.mul(a, b));
                }
            }
        }
        let mut out: Vec<u32> = prod[..n].to_vec();
        for (k, &c) in prod.iter().enumerate().skip(n) {
            if c == 0 {
                continue;
            }
            for (slot, &red) in out.iter_mut().zip(&self.reductions[k - n]) {
                *slot = f.add(*slot, f.mul(c, red));
            }
        }
        FieldElement(out)
    }

    pub fn pow(&self, x: &FieldElement, mut e: u64) -> FieldElement {
        let mut acc = self.one();
        let mut b = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(x, self.order - 2))
    }

    /// `x ↦ x^q`, applied as a linear map.
    pub fn frobenius(&self, x: &FieldElement) -> FieldElement {
        let f = &self.base;
        let mut out = vec![0u32; self.n];
        for (i, &c) in x.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (slot, &m) in out.iter_mut().zip(&self.frobenius[i]) {
                *slot = f.add(*slot, f.mul(c, m));
            }
        }
        FieldElement(out)
    }

    pub fn frobenius_pow(&self, x: &FieldElement, d: usize) -> FieldElement {
        (0..d).fold(x.clone(), |acc, _| self.frobenius(&acc))
    }

    /// Degree of the minimal polynomial of `x` over `F_q`: the least `d | n`
    /// with `x^{q^d} = x`.
    pub fn degree_over_base(&self, x: &FieldElement) -> usize {
        let mut cur = x.clone();
        for d in 1..=self.n {
            cur = self.frobenius(&cur);
            if self.n.is_multiple_of(d) && cur == *x {
                return d;
            }
        }
        self.n
    }

    pub fn is_primitive_element(&self, x: &FieldElement) -> bool {
        !x.is_zero() && self.degree_over_base(x) == self.n
    }

    /// Matrix (as rows) of `y ↦ x·y` in the power basis.
    pub fn mul_matrix(&self, x: &FieldElement) -> Vec<Vec<u32>> {
        let cols: Vec<Vec<u32>> = (0..self.n)
            .map(|i| {
                let mut e = vec![0u32; self.n];
                e[i] = 1;
                self.mul(x, &FieldElement(e)).0
            })
            .collect();
        linalg::transpose(&cols, self.n)
    }

    /// The embedded subfield `F_{q^d}` for each divisor `d` of `n`, ascending,
    /// computed as the fixed space of `x ↦ x^{q^d}`.
    pub fn subfield_lattice(&self) -> Vec<SubfieldDescriptor> {
        divisors(self.n)
            .into_iter()
            .map(|d| SubfieldDescriptor {
                d,
                subspace: self.fixed_space(d),
            })
            .collect()
    }

    /// `{x : x^{q^d} = x}` as an `F_q`-subspace.
    pub fn fixed_space(&self, d: usize) -> Subspace {
        let n = self.n;
        let f = &self.base;
        // columns of Frob^d
        let cols: Vec<Vec<u32>> = (0..n)
            .map(|i| {
                let mut e = vec![0u32; n];
                e[i] = 1;
                self.frobenius_pow(&FieldElement(e), d).0
            })
            .collect();
        let mut rows = linalg::transpose(&cols, n);
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = f.sub(row[i], 1);
        }
        let kernel = linalg::kernel(f, &rows, n);
        Subspace::span(self.base.clone(), n, kernel).expect("kernel vectors are well formed")
    }

    /// The subfield `F_q(x)`.
    pub fn generated_subfield(&self, x: &FieldElement) -> Subspace {
        self.fixed_space(self.degree_over_base(x))
    }

    pub fn largest_proper_divisor(&self) -> usize {
        largest_proper_divisor(self.n)
    }
}

/// One intermediate field `F_{q^d}` of `F_q ⊂ F_{q^n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubfieldDescriptor {
    pub d: usize,
    pub subspace: Subspace,
}

pub fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Largest divisor of `n` below `n`; 0 for `n = 1`.
pub fn largest_proper_divisor(n: usize) -> usize {
    divisors(n).into_iter().filter(|&d| d < n).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_field_axioms_f9() {
        let f = BaseField::new(3, 2).unwrap();
        assert_eq!(f.q(), 9);
        assert_eq!(f.modulus(), &[1, 0, 1]); // x^2 + 1 is the least irreducible quadratic over F_3
        for a in 0..9 {
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            for b in 0..9 {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
            }
        }
    }

    #[test]
    fn least_irreducibles() {
        let f2 = BaseField::prime(2).unwrap();
        assert_eq!(least_irreducible(&f2, 2), vec![1, 1, 1]);
        assert_eq!(least_irreducible(&f2, 3), vec![1, 0, 1, 1]);
        assert_eq!(least_irreducible(&f2, 4), vec![1, 0, 0, 1, 1]);
        assert_eq!(least_irreducible(&f2, 1), vec![0, 1]);
        assert!(!is_irreducible(&f2, &[1, 0, 1]));
        assert!(!is_irreducible(&f2, &[1, 0, 1, 0, 1]));
    }

    #[test]
    fn f4_products() {
        let t = FieldTower::new(2, 1, 2).unwrap();
        let w = t.generator();
        let x = t.one();
        assert_eq!(t.mul(&w, &x), w);
        assert!(t.mul(&w, &t.zero()).is_zero());
        assert_eq!(t.mul(&w, &w), t.element(vec![1, 1]).unwrap());
    }

    #[test]
    fn inverse_of_zero_fails() {
        let t = FieldTower::new(2, 1, 3).unwrap();
        assert_eq!(t.inv(&t.zero()), Err(Error::ZeroInverse));
        let f = BaseField::new(5, 1).unwrap();
        assert_eq!(f.inv(0), Err(Error::ZeroInverse));
    }

    #[test]
    fn field_axioms_exhaustive_small_towers() {
        for (p, r, n) in [(2, 1, 4), (3, 1, 2), (2, 2, 2)] {
            let t = FieldTower::new(p, r, n).unwrap();
            let els: Vec<_> = t.elements().unwrap().collect();
            for x in &els {
                if !x.is_zero() {
                    assert_eq!(t.mul(x, &t.inv(x).unwrap()), t.one());
                }
                for y in &els {
                    assert_eq!(t.mul(x, y), t.mul(y, x));
                }
            }
        }
    }

    #[test]
    fn degrees_of_trivial_elements() {
        let t = FieldTower::new(2, 1, 4).unwrap();
        assert_eq!(t.degree_over_base(&t.zero()), 1);
        assert_eq!(t.degree_over_base(&t.one()), 1);
        assert_eq!(t.degree_over_base(&t.generator()), 4);
    }

    #[test]
    fn lattice_dimensions() {
        let t = FieldTower::new(2, 1, 4).unwrap();
        let dims: Vec<_> = t.subfield_lattice().iter().map(|s| (s.d, s.subspace.dim())).collect();
        assert_eq!(dims, vec![(1, 1), (2, 2), (4, 4)]);
        let t = FieldTower::new(2, 1, 6).unwrap();
        let dims: Vec<_> = t.subfield_lattice().iter().map(|s| s.subspace.dim()).collect();
        assert_eq!(dims, vec![1, 2, 3, 6]);
    }

    #[test]
    fn d2_subfield_of_f16_is_the_fixed_set_of_x4() {
        let t = FieldTower::new(2, 1, 4).unwrap();
        let sub = &t.subfield_lattice()[1].subspace;
        let fixed: Vec<_> = t.elements().unwrap().filter(|x| t.pow(x, 4) == *x).collect();
        assert_eq!(fixed.len(), 4);
        assert!(fixed.iter().all(|x| sub.contains(&x.0)));
    }

    #[test]
    fn tower_caps() {
        assert!(matches!(FieldTower::new(2, 1, 25), Err(Error::CapExceeded(_))));
        assert!(matches!(FieldTower::new(4, 1, 2), Err(Error::NotPrime(4))));
        assert!(FieldTower::new(2, 1, 0).is_err());
        let big = FieldTower::new(2, 1, 13).unwrap();
        assert!(big.elements().is_err());
    }

    #[test]
    fn explicit_moduli_are_checked() {
        assert!(FieldTower::with_moduli(2, vec![0, 1], vec![1, 0, 1]).is_err());
        let t = FieldTower::with_moduli(2, vec![0, 1], vec![1, 1, 1]).unwrap();
        assert_eq!(t, FieldTower::new(2, 1, 2).unwrap());
    }
}
