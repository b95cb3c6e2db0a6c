//! Weighted monomials and F_2 polynomials over a named generator alphabet.
//!
//! Monomials are ordered graded-lexicographically: first by weighted degree,
//! then lexicographically on the exponent vector. Every basis list in the
//! crate (quotient normal forms, wreath slices, matrix columns) uses it.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Largest alphabet a [`Monomial`] can index.
pub const MAX_GENERATORS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

/// Ordered list of named generators with positive degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    generators: Vec<Generator>,
}

/// Exponent vector over an [`Alphabet`], with its weighted degree cached.
///
/// Field order matters: the derived `Ord` is the graded-lex order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    degree: u32,
    exps: [u8; MAX_GENERATORS],
    len: u8,
}

impl Alphabet {
    pub fn new<S: Into<String>>(generators: impl IntoIterator<Item = (S, u32)>) -> Result<Self> {
        let generators: Vec<Generator> = generators
            .into_iter()
            .map(|(name, degree)| Generator {
                name: name.into(),
                degree,
            })
            .collect();
        if generators.len() > MAX_GENERATORS {
            return Err(Error::InvalidInput(format!(
                "alphabet has {} generators, at most {MAX_GENERATORS} supported",
                generators.len()
            )));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.degree == 0 {
                return Err(Error::InvalidInput(format!("generator {} has degree 0", g.name)));
            }
            if generators[..i].iter().any(|h| h.name == g.name) {
                return Err(Error::InvalidInput(format!("duplicate generator {}", g.name)));
            }
        }
        Ok(Self { generators })
    }

    /// `w1, ..., wn` with `deg wi = i`.
    pub fn stiefel_whitney(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| (format!("w{i}"), i as u32)))
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn one(&self) -> Monomial {
        Monomial {
            degree: 0,
            exps: [0; MAX_GENERATORS],
            len: self.len() as u8,
        }
    }

    pub fn generator(&self, i: usize) -> Monomial {
        let mut m = self.one();
        m.exps[i] = 1;
        m.degree = self.generators[i].degree;
        m
    }

    pub fn monomial(&self, exps: &[u8]) -> Result<Monomial> {
        if exps.len() != self.len() {
            return Err(Error::AlphabetMismatch {
                left: self.len(),
                right: exps.len(),
            });
        }
        let mut m = self.one();
        m.exps[..exps.len()].copy_from_slice(exps);
        m.degree = exps
            .iter()
            .zip(&self.generators)
            .map(|(&e, g)| e as u32 * g.degree)
            .sum();
        Ok(m)
    }

    /// All monomials of weighted degree exactly `d`, in canonical order.
    pub fn enumerate(&self, d: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = self.one();
        self.enumerate_from(0, d, &mut cur, &mut out);
        out.sort_unstable();
        out
    }

    fn enumerate_from(&self, idx: usize, remaining: u32, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if idx == self.len() {
            if remaining == 0 {
                out.push(*cur);
            }
            return;
        }
        let g = self.generators[idx].degree;
        let mut e = 0u32;
        loop {
            cur.exps[idx] = e as u8;
            cur.degree += e * g;
            self.enumerate_from(idx + 1, remaining - e * g, cur, out);
            cur.degree -= e * g;
            if (e + 1) * g > remaining {
                break;
            }
            e += 1;
        }
        cur.exps[idx] = 0;
    }

    /// Graded-lex comparison; monomials from a different-size alphabet are rejected.
    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Result<Ordering> {
        for m in [a, b] {
            if m.len() != self.len() {
                return Err(Error::AlphabetMismatch {
                    left: self.len(),
                    right: m.len(),
                });
            }
        }
        Ok(a.cmp(b))
    }

    /// Text form `w1^2.w3`; the empty monomial prints as `1`.
    pub fn format_monomial(&self, m: &Monomial) -> String {
        let parts: Vec<String> = m
            .exponents()
            .iter()
            .zip(&self.generators)
            .filter(|(&e, _)| e > 0)
            .map(|(&e, g)| {
                if e == 1 {
                    g.name.clone()
                } else {
                    format!("{}^{e}", g.name)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(".")
        }
    }

    pub fn format_poly(&self, p: &F2Poly) -> String {
        if p.is_zero() {
            return "0".to_string();
        }
        p.terms()
            .map(|m| self.format_monomial(m))
            .collect::<Vec<_>>()
            .join("+")
    }
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn exponents(&self) -> &[u8] {
        &self.exps[..self.len as usize]
    }

    pub fn exponent(&self, i: usize) -> u8 {
        self.exps[i]
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.len, other.len);
        let mut out = *self;
        for (a, b) in out.exps.iter_mut().zip(&other.exps) {
            *a = a.checked_add(*b).expect("exponent overflow");
        }
        out.degree += other.degree;
        out
    }

    /// Reorders exponents: output slot `i` takes input slot `perm[i]`.
    /// The degree is recomputed against `target`.
    pub fn permuted(&self, perm: &[usize], target: &Alphabet) -> Monomial {
        let mut out = target.one();
        for (i, &src) in perm.iter().enumerate() {
            out.exps[i] = self.exps[src];
            out.degree += self.exps[src] as u32 * target.generators[i].degree;
        }
        out
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Monomial{:?}", self.exponents())
    }
}

/// A sum of distinct monomials with coefficients in F_2.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct F2Poly {
    terms: BTreeSet<Monomial>,
}

impl F2Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(m: Monomial) -> Self {
        Self {
            terms: BTreeSet::from([m]),
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = Monomial>) -> Self {
        let mut p = Self::zero();
        for m in terms {
            p.toggle(m);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.iter()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.terms.contains(m)
    }

    /// Adds one copy of `m`, cancelling an existing copy.
    pub fn toggle(&mut self, m: Monomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn add_assign(&mut self, other: &F2Poly) {
        for m in &other.terms {
            self.toggle(*m);
        }
    }

    pub fn add(&self, other: &F2Poly) -> F2Poly {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn mul(&self, other: &F2Poly) -> F2Poly {
        let mut out = F2Poly::zero();
        for a in &self.terms {
            for b in &other.terms {
                out.toggle(a.mul(b));
            }
        }
        out
    }

    /// Common degree of all terms; `None` for mixed degrees or zero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.iter().map(Monomial::degree);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    /// The part of `self` in degree `d`.
    pub fn component(&self, d: u32) -> F2Poly {
        Self {
            terms: self.terms.iter().filter(|m| m.degree() == d).copied().collect(),
        }
    }
}

/// Product in F_2[alphabet]; repeated monomials cancel in pairs.
pub fn poly_mul(p: &F2Poly, q: &F2Poly) -> F2Poly {
    p.mul(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn w12() -> Alphabet {
        Alphabet::stiefel_whitney(2).unwrap()
    }

    /// Partitions of `d` into parts drawn from `parts` (with repetition).
    fn partition_count(d: usize, parts: &[usize]) -> usize {
        let mut ways = vec![0usize; d + 1];
        ways[0] = 1;
        for &p in parts {
            for s in p..=d {
                ways[s] += ways[s - p];
            }
        }
        ways[d]
    }

    #[test]
    fn enumerate_small_cases() {
        let a = w12();
        let d3 = a.enumerate(3);
        assert_eq!(d3.len(), 2);
        let names: Vec<String> = d3.iter().map(|m| a.format_monomial(m)).collect();
        assert!(names.contains(&"w1^3".to_string()));
        assert!(names.contains(&"w1.w2".to_string()));
        assert_eq!(a.enumerate(0), vec![a.one()]);
        assert_eq!(Alphabet::stiefel_whitney(5).unwrap().enumerate(0).len(), 1);
    }

    #[test]
    fn enumerate_counts_partitions() {
        let a = Alphabet::stiefel_whitney(4).unwrap();
        assert_eq!(a.enumerate(6).len(), partition_count(6, &[1, 2, 3, 4]));
        let b = Alphabet::new([("x", 2), ("y", 3), ("z", 3), ("u", 5)]).unwrap();
        for d in 0..25 {
            let ms = b.enumerate(d);
            assert_eq!(ms.len(), partition_count(d as usize, &[2, 3, 3, 5]), "d = {d}");
            assert!(ms.windows(2).all(|w| w[0] < w[1]));
            assert!(ms.iter().all(|m| m.degree() == d));
        }
    }

    #[test]
    fn enumeration_is_deterministic() {
        let a = Alphabet::stiefel_whitney(5).unwrap();
        let first = a.enumerate(9);
        for _ in 0..5 {
            assert_eq!(a.enumerate(9), first);
        }
        let mut sorted = first.clone();
        sorted.sort();
        assert_eq!(sorted, first);
    }

    #[test]
    fn compare_basics() {
        let a = w12();
        let w1 = a.generator(0);
        assert_eq!(a.compare(&w1, &w1).unwrap(), Ordering::Equal);
        assert_eq!(a.compare(&a.one(), &w1).unwrap(), Ordering::Less);
        let other = Alphabet::stiefel_whitney(3).unwrap();
        assert!(matches!(
            a.compare(&w1, &other.generator(0)),
            Err(Error::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn alphabet_validation() {
        assert!(Alphabet::new([("a", 1), ("a", 2)]).is_err());
        assert!(Alphabet::new([("a", 0)]).is_err());
    }

    #[test]
    fn freshmans_dream() {
        let a = w12();
        let s = F2Poly::from_terms([a.generator(0), a.generator(1)]);
        let sq = poly_mul(&s, &s);
        let expected = F2Poly::from_terms([
            a.generator(0).mul(&a.generator(0)),
            a.generator(1).mul(&a.generator(1)),
        ]);
        assert_eq!(sq, expected);
        assert_eq!(poly_mul(&s, &F2Poly::monomial(a.one())), s);
    }

    fn random_poly(rng: &mut ChaCha8Rng, a: &Alphabet) -> F2Poly {
        let mut p = F2Poly::zero();
        for _ in 0..rng.random_range(0..6) {
            let d = rng.random_range(0..6);
            let ms = a.enumerate(d);
            p.toggle(ms[rng.random_range(0..ms.len())]);
        }
        p
    }

    #[test]
    fn product_matches_integer_arithmetic() {
        let a = Alphabet::stiefel_whitney(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let p = random_poly(&mut rng, &a);
            let q = random_poly(&mut rng, &a);
            // integer coefficients keyed by raw exponent vectors
            let mut acc: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
            for x in p.terms() {
                for y in q.terms() {
                    let key: Vec<u32> = x
                        .exponents()
                        .iter()
                        .zip(y.exponents())
                        .map(|(&u, &v)| u as u32 + v as u32)
                        .collect();
                    *acc.entry(key).or_default() += 1;
                }
            }
            let expected = F2Poly::from_terms(acc.into_iter().filter(|(_, c)| c % 2 == 1).map(|(k, _)| {
                let e: Vec<u8> = k.iter().map(|&x| x as u8).collect();
                a.monomial(&e).unwrap()
            }));
            assert_eq!(poly_mul(&p, &q), expected);
        }
    }

    #[test]
    fn formatting() {
        let a = Alphabet::stiefel_whitney(3).unwrap();
        assert_eq!(a.format_monomial(&a.one()), "1");
        assert_eq!(a.format_monomial(&a.monomial(&[2, 0, 1]).unwrap()), "w1^2.w3");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn mono() -> impl Strategy<Value = Monomial> {
            proptest::collection::vec(0u8..4, 4)
                .prop_map(|e| Alphabet::stiefel_whitney(4).unwrap().monomial(&e).unwrap())
        }

        fn poly() -> impl Strategy<Value = F2Poly> {
            proptest::collection::vec(mono(), 0..5).prop_map(F2Poly::from_terms)
        }

        proptest! {
            #[test]
            fn graded_lex_is_a_total_order(a in mono(), b in mono(), c in mono()) {
                let al = Alphabet::stiefel_whitney(4).unwrap();
                let ab = al.compare(&a, &b).unwrap();
                prop_assert_eq!(ab.reverse(), al.compare(&b, &a).unwrap());
                if ab == Ordering::Equal { prop_assert_eq!(a, b); }
                if a <= b && b <= c { prop_assert!(a <= c); }
                if a.degree() < b.degree() { prop_assert_eq!(ab, Ordering::Less); }
            }

            #[test]
            fn multiplication_laws(p in poly(), q in poly(), r in poly()) {
                prop_assert_eq!(poly_mul(&p, &q), poly_mul(&q, &p));
                prop_assert_eq!(poly_mul(&poly_mul(&p, &q), &r), poly_mul(&p, &poly_mul(&q, &r)));
            }

            #[test]
            fn homogeneous_degrees_add(a in mono(), b in mono(), c in mono()) {
                let p = F2Poly::monomial(a);
                let q = F2Poly::from_terms([b, c]).component(b.degree());
                let prod = poly_mul(&p, &q);
                if !prod.is_zero() {
                    prop_assert_eq!(prod.homogeneous_degree(), Some(a.degree() + b.degree()));
                }
            }
        }
    }
}
