//! Arithmetic in the finite field `F_q`, `q = p^e <= 2^16`.
//!
//! Elements are stored as their canonical integer encoding: the base-`p`
//! digit vector of the polynomial representative, least significant digit
//! first. For prime fields this is just the residue. Multiplication goes
//! through discrete log / antilog tables built once per field.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

// Above this order the q*q addition table is not materialised.
const ADD_TABLE_LIMIT: u32 = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime power")]
    NotAPrimePower(u64),
    #[error("field order {0} is outside the supported range 2..=65536")]
    Unsupported(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields (F_{0} and F_{1})")]
    SpecMismatch(u32, u32),
    #[error("value {value} is not an element of F_{q}")]
    OutOfRange { value: u64, q: u32 },
}

struct FieldInner {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    xi: u32,
    /// `exp[i] = xi^i`, length `2 * (q - 1)` so that `exp[log a + log b]` needs no reduction.
    exp: Vec<u32>,
    /// `log[a]` for `a != 0`; `log[0]` is unused.
    log: Vec<u32>,
    add: Option<Vec<u32>>,
    neg: Vec<u32>,
}

/// A finite field `F_q`. Cheap to clone; all clones share the same tables.
///
/// Construction is deterministic: the defining polynomial is the
/// lexicographically smallest monic irreducible of degree `e` (coefficients
/// compared from the constant term up) and the designated primitive element
/// is the smallest encoding that generates `F_q^*`.
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("q", &self.0.q)
            .field("p", &self.0.p)
            .field("e", &self.0.e)
            .field("modulus", &self.0.modulus)
            .field("xi", &self.0.xi)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        // construction is deterministic in q
        self.0.q == other.0.q
    }
}

impl Eq for Field {}

/// Splits `q` into `(p, e)` with `q = p^e`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            break;
        }
        p += 1;
    }
    if p * p > q {
        return Some((q, 1));
    }
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

// Polynomials over F_p as coefficient vectors, constant term first.

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let b = poly_trim(b.to_vec());
    let mut r = poly_trim(a.to_vec());
    let lead_inv = inv_mod(*b.last().expect("nonzero divisor"), p);
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let factor = (r[r.len() - 1] as u64 * lead_inv as u64 % p as u64) as u32;
        for (i, &bc) in b.iter().enumerate() {
            let t = (factor as u64 * bc as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - t) % p;
        }
        r = poly_trim(r);
    }
    r
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // p prime, a != 0
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    result as u32
}

/// Decodes the integer `index` into `len` base-`p` digits, most significant digit first.
fn digits_msb_first(mut index: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = (index % p as u64) as u32;
        index /= p as u64;
    }
    out
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let e = f.len() - 1;
    // a reducible polynomial of degree e has a monic factor of degree <= e/2
    for deg in 1..=e / 2 {
        let count = (p as u64).pow(deg as u32);
        for idx in 0..count {
            let mut g = digits_msb_first(idx, p, deg);
            g.push(1);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, e: u32) -> Vec<u32> {
    let count = (p as u64).pow(e);
    for idx in 0..count {
        // lexicographic order on (c_0, c_1, ..., c_{e-1})
        let mut f = digits_msb_first(idx, p, e as usize);
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn encode(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn decode(mut value: u32, p: u32, e: u32) -> Vec<u32> {
    (0..e)
        .map(|_| {
            let d = value % p;
            value /= p;
            d
        })
        .collect()
}

fn digit_add(a: u32, b: u32, p: u32, e: u32) -> u32 {
    let da = decode(a, p, e);
    let db = decode(b, p, e);
    let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
    encode(&sum, p)
}

fn slow_mul(a: u32, b: u32, p: u32, e: u32, modulus: &[u32]) -> u32 {
    if e == 1 {
        return (a as u64 * b as u64 % p as u64) as u32;
    }
    let da = decode(a, p, e);
    let db = decode(b, p, e);
    let mut prod = vec![0u32; 2 * e as usize];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
        }
    }
    let mut r = poly_rem(&prod, modulus, p);
    r.resize(e as usize, 0);
    encode(&r, p)
}

impl Field {
    /// Builds `F_q`.
    pub fn new(q: u64) -> Result<Self, FieldError> {
        if !(2..=MAX_ORDER).contains(&q) {
            return if prime_power(q).is_some() || q > MAX_ORDER {
                Err(FieldError::Unsupported(q))
            } else {
                Err(FieldError::NotAPrimePower(q))
            };
        }
        let (p, e) = prime_power(q).ok_or(FieldError::NotAPrimePower(q))?;
        let (p, q) = (p as u32, q as u32);
        let modulus = if e == 1 { Vec::new() } else { smallest_irreducible(p, e) };

        let order = q - 1;
        let mut exp = vec![0u32; 2 * order as usize];
        let mut log = vec![0u32; q as usize];
        let mut xi = 0;
        'candidates: for g in 1..q {
            let mut seen = vec![false; q as usize];
            let mut x = 1u32;
            for i in 0..order {
                if seen[x as usize] {
                    continue 'candidates;
                }
                seen[x as usize] = true;
                exp[i as usize] = x;
                x = slow_mul(x, g, p, e, &modulus);
            }
            xi = g;
            break;
        }
        for i in 0..order as usize {
            exp[order as usize + i] = exp[i];
            log[exp[i] as usize] = i as u32;
        }

        let neg = (0..q)
            .map(|a| {
                let d: Vec<u32> = decode(a, p, e).iter().map(|&c| (p - c) % p).collect();
                encode(&d, p)
            })
            .collect();
        let add = (p != 2 && e > 1 && q <= ADD_TABLE_LIMIT).then(|| {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = digit_add(a, b, p, e);
                }
            }
            table
        });

        Ok(Field(Arc::new(FieldInner { p, e, q, modulus, xi, exp, log, add, neg })))
    }

    pub fn order(&self) -> u32 {
        self.0.q
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.e
    }

    /// Coefficients of the defining polynomial, constant term first; empty for prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// The designated primitive element.
    pub fn xi(&self) -> u32 {
        self.0.xi
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let f = &*self.0;
        if f.p == 2 {
            a ^ b
        } else if f.e == 1 {
            let s = a + b;
            if s >= f.p {
                s - f.p
            } else {
                s
            }
        } else if let Some(table) = &f.add {
            table[(a * f.q + b) as usize]
        } else {
            digit_add(a, b, f.p, f.e)
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.0.neg[a as usize]
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
        let f = &*self.0;
        f.exp[(f.log[a as usize] + f.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32, FieldError> {
        if a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let f = &*self.0;
        let order = f.q - 1;
        Ok(f.exp[((order - f.log[a as usize]) % order) as usize])
    }

    /// `a^n`; negative exponents go through the inverse.
    pub fn pow(&self, a: u32, n: i64) -> Result<u32, FieldError> {
        if a == 0 {
            return match n.signum() {
                0 => Ok(1),
                1 => Ok(0),
                _ => Err(FieldError::DivisionByZero),
            };
        }
        let f = &*self.0;
        let order = (f.q - 1) as i64;
        let l = (f.log[a as usize] as i64 * n.rem_euclid(order)).rem_euclid(order);
        Ok(f.exp[l as usize])
    }

    /// `xi^i` for any integer `i`.
    pub fn xi_pow(&self, i: i64) -> u32 {
        let order = (self.0.q - 1) as i64;
        self.0.exp[i.rem_euclid(order) as usize]
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.0.q
    }

    pub fn element(&self, value: u64) -> Result<FieldElement, FieldError> {
        if value >= self.0.q as u64 {
            return Err(FieldError::OutOfRange { value, q: self.0.q });
        }
        Ok(FieldElement { field: self.clone(), value: value as u32 })
    }

    pub fn check(&self, value: u64) -> Result<u32, FieldError> {
        self.element(value).map(|e| e.value)
    }
}

/// An element together with its field, for checked arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    value: u32,
}

impl FieldElement {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    fn same_field(&self, other: &Self) -> Result<(), FieldError> {
        if self.field != other.field {
            return Err(FieldError::SpecMismatch(self.field.order(), other.field.order()));
        }
        Ok(())
    }

    fn wrap(&self, value: u32) -> FieldElement {
        FieldElement { field: self.field.clone(), value }
    }

    pub fn add(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        Ok(self.wrap(self.field.add(self.value, other.value)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        Ok(self.wrap(self.field.mul(self.value, other.value)))
    }

    pub fn neg(&self) -> Self {
        self.wrap(self.field.neg(self.value))
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        Ok(self.wrap(self.field.inv(self.value)?))
    }

    pub fn pow(&self, n: i64) -> Result<Self, FieldError> {
        Ok(self.wrap(self.field.pow(self.value, n)?))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
