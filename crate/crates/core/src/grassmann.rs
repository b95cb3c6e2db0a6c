//! Mod-2 cohomology of the real Grassmannian `G_n(R^{n+k})` in Borel's
//! presentation
//!
//! ```text
//! F_2[w_1..w_n, wb_1..wb_k] / ( components of (1 + w_1 + .. + w_n)(1 + wb_1 + .. + wb_k) - 1 )
//! ```
//!
//! together with the complement involution `w_i <-> wb_i` on `G_n(R^{2n})`
//! and the resulting `E_2` dimensions of the Borel-construction spectral
//! sequence.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::f2::{row_reduce, BitMatrix, BitVector, EchelonBasis};
use crate::monomial::{Alphabet, F2Poly, Monomial};

/// Borel presentation of `H*(G_n(R^{n+k}); F_2)`.
#[derive(Clone, Debug)]
pub struct GrassmannRing {
    n: usize,
    k: usize,
    alphabet: Alphabet,
    relations: Vec<F2Poly>,
}

/// `H^j` split into copies of the regular module `F_2[Z/2]` and trivial summands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Z2ModuleDecomposition {
    pub degree: usize,
    pub free_rank: usize,
    pub trivial_rank: usize,
}

/// Degree-`j` piece of the quotient with canonical normal forms.
///
/// Columns are the degree-`j` monomials in canonical order; the relation
/// slice is row reduced and the non-pivot monomials form the quotient basis.
#[derive(Clone, Debug)]
pub struct QuotientSlice {
    pub degree: usize,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    rref: BitMatrix,
    pivots: Vec<usize>,
    standard: Vec<usize>,
}

impl GrassmannRing {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::InvalidInput(format!(
                "Grassmannian needs n, k >= 1 (got n = {n}, k = {k})"
            )));
        }
        let gens = (1..=n)
            .map(|i| (format!("w{i}"), i as u32))
            .chain((1..=k).map(|j| (format!("wb{j}"), j as u32)));
        let alphabet = Alphabet::new(gens)?;
        let w = |i: usize| -> Monomial {
            if i == 0 {
                alphabet.one()
            } else {
                alphabet.generator(i - 1)
            }
        };
        let wb = |j: usize| -> Monomial {
            if j == 0 {
                alphabet.one()
            } else {
                alphabet.generator(n + j - 1)
            }
        };
        let relations = (1..=n + k)
            .map(|d| {
                F2Poly::from_terms(
                    (d.saturating_sub(k)..=d.min(n)).map(|i| w(i).mul(&wb(d - i))),
                )
            })
            .collect();
        Ok(Self {
            n,
            k,
            alphabet,
            relations,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Relation generators; entry `d - 1` is the degree-`d` component.
    pub fn relations(&self) -> &[F2Poly] {
        &self.relations
    }

    pub fn top_degree(&self) -> usize {
        self.n * self.k
    }

    fn check_degree(&self, j: usize) -> Result<()> {
        if j > self.top_degree() {
            return Err(Error::DegreeOutOfRange {
                degree: j,
                max: self.top_degree(),
            });
        }
        Ok(())
    }

    /// Rows spanning the degree-`j` piece of the relation ideal.
    fn ideal_rows(&self, j: usize, index: &HashMap<Monomial, usize>) -> Vec<Vec<usize>> {
        let mut rows = Vec::new();
        for (e, rel) in self.relations.iter().enumerate() {
            let e = e + 1;
            if e > j {
                break;
            }
            for m in self.alphabet.enumerate((j - e) as u32) {
                rows.push(rel.terms().map(|t| index[&t.mul(&m)]).collect());
            }
        }
        rows
    }

    /// `dim H^j(G_n(R^{n+k}); F_2)` as monomial count minus relation-slice rank.
    pub fn graded_dimension(&self, j: usize) -> Result<usize> {
        self.check_degree(j)?;
        let monomials = self.alphabet.enumerate(j as u32);
        let index: HashMap<Monomial, usize> =
            monomials.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let mut basis = EchelonBasis::new(monomials.len());
        for row in self.ideal_rows(j, &index) {
            basis.insert_indices(row);
        }
        Ok(monomials.len() - basis.rank())
    }

    pub fn quotient_slice(&self, j: usize) -> Result<QuotientSlice> {
        self.check_degree(j)?;
        let monomials = self.alphabet.enumerate(j as u32);
        let index: HashMap<Monomial, usize> =
            monomials.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let rows: Vec<BitVector> = self
            .ideal_rows(j, &index)
            .into_iter()
            .map(|r| BitVector::from_indices(monomials.len(), r))
            .collect();
        let (rref, pivots) = row_reduce(&BitMatrix::from_vectors(monomials.len(), &rows)?);
        let standard = (0..monomials.len())
            .filter(|c| pivots.binary_search(c).is_err())
            .collect();
        Ok(QuotientSlice {
            degree: j,
            monomials,
            index,
            rref,
            pivots,
            standard,
        })
    }

    /// Exchanges `w_i <-> wb_i`; only defined when `n = k`.
    pub fn swap_action(&self, p: &F2Poly) -> Result<F2Poly> {
        let perm = self.swap_permutation()?;
        Ok(F2Poly::from_terms(
            p.terms().map(|m| m.permuted(&perm, &self.alphabet)),
        ))
    }

    fn swap_permutation(&self) -> Result<Vec<usize>> {
        if self.n != self.k {
            return Err(Error::UnsupportedAction {
                n: self.n,
                k: self.k,
            });
        }
        let n = self.n;
        Ok((0..2 * n).map(|i| if i < n { i + n } else { i - n }).collect())
    }

    /// Decomposes `H^j(G_n(R^{2n}))` under the swap via `rank(1 + omega)`.
    pub fn z2_decompose(&self, j: usize) -> Result<Z2ModuleDecomposition> {
        let perm = self.swap_permutation()?;
        let slice = self.quotient_slice(j)?;
        let mut image = EchelonBasis::new(slice.monomials.len());
        for &c in &slice.standard {
            let swapped = slice.monomials[c].permuted(&perm, &self.alphabet);
            let mut v = slice.reduce(&F2Poly::monomial(swapped));
            v.flip(c);
            image.insert(&v)?;
        }
        let dim = slice.dimension();
        let free_rank = image.rank();
        Ok(Z2ModuleDecomposition {
            degree: j,
            free_rank,
            trivial_rank: dim - 2 * free_rank,
        })
    }
}

impl QuotientSlice {
    pub fn dimension(&self) -> usize {
        self.standard.len()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// Quotient basis: the monomials that are not relation pivots.
    pub fn standard_monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.standard.iter().map(|&c| &self.monomials[c])
    }

    /// Canonical representative of a homogeneous degree-`j` polynomial,
    /// supported on the standard monomials.
    pub fn reduce(&self, p: &F2Poly) -> BitVector {
        let v = BitVector::from_indices(
            self.monomials.len(),
            p.terms().map(|m| {
                *self
                    .index
                    .get(m)
                    .expect("polynomial is not homogeneous of the slice degree")
            }),
        );
        crate::f2::reduce_by_rref(&v, &self.rref, &self.pivots)
    }

    pub fn is_zero_in_quotient(&self, p: &F2Poly) -> bool {
        self.reduce(p).is_zero()
    }
}

/// Dual classes `wb_1..wb_k` as polynomials in `w_1..w_n`, from
/// `wb_j = sum_{i=1}^{min(j,n)} w_i wb_{j-i}`.
pub fn dual_classes(n: usize, k: usize) -> Result<(Alphabet, Vec<F2Poly>)> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidInput(format!(
            "dual classes need n, k >= 1 (got n = {n}, k = {k})"
        )));
    }
    let alphabet = Alphabet::stiefel_whitney(n)?;
    let mut duals = vec![F2Poly::monomial(alphabet.one())];
    for j in 1..=k {
        let mut acc = F2Poly::zero();
        for i in 1..=j.min(n) {
            acc.add_assign(&duals[j - i].mul(&F2Poly::monomial(alphabet.generator(i - 1))));
        }
        duals.push(acc);
    }
    duals.remove(0);
    Ok((alphabet, duals))
}

/// `dim E_2^{i,j}` for the Borel construction of `G_n(R^{2n})` under the swap.
///
/// Free summands contribute only to column 0; each trivial summand gives a
/// copy of `H^i(Z/2; F_2) = F_2` in every column.
pub fn borel_e2_dimension(ring: &GrassmannRing, i: usize, j: usize) -> Result<usize> {
    if j > ring.top_degree() {
        return Ok(0);
    }
    let d = ring.z2_decompose(j)?;
    Ok(if i == 0 {
        d.free_rank + d.trivial_rank
    } else {
        d.trivial_rank
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Partitions fitting in an `n × k` box, counted by the Schubert-cell recursion.
    fn box_partitions(j: usize, n: usize, k: usize) -> usize {
        // p(j; n, k) = p(j; n-1, k) + p(j-n; n, k-1)  (largest part < n or = n)
        fn go(j: isize, n: usize, k: usize, memo: &mut HashMap<(isize, usize, usize), usize>) -> usize {
            if j < 0 {
                return 0;
            }
            if j == 0 {
                return 1;
            }
            if n == 0 || k == 0 {
                return 0;
            }
            if let Some(&v) = memo.get(&(j, n, k)) {
                return v;
            }
            let v = go(j, n - 1, k, memo) + go(j - n as isize, n, k - 1, memo);
            memo.insert((j, n, k), v);
            v
        }
        go(j as isize, n, k, &mut HashMap::new())
    }

    fn binomial(n: usize, r: usize) -> usize {
        (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn dual_classes_of_projective_line_bundle() {
        let (a, d) = dual_classes(1, 3).unwrap();
        let w1 = a.generator(0);
        assert_eq!(d[0], F2Poly::monomial(w1));
        assert_eq!(d[1], F2Poly::monomial(w1.mul(&w1)));
        assert_eq!(d[2], F2Poly::monomial(w1.mul(&w1).mul(&w1)));
    }

    #[test]
    fn dual_classes_n2_k2() {
        let (a, d) = dual_classes(2, 2).unwrap();
        assert_eq!(a.format_poly(&d[0]), "w1");
        assert_eq!(a.format_poly(&d[1]), "w2+w1^2");
    }

    #[test]
    fn dual_identity_through_top_degree() {
        for n in 1..=6 {
            for k in 1..=6 {
                // the inverse series carried to degree n+k multiplies back to 1
                let (a, duals) = dual_classes(n, n + k).unwrap();
                let total_w = F2Poly::from_terms(
                    std::iter::once(a.one()).chain((0..n).map(|i| a.generator(i))),
                );
                let mut total_dual = F2Poly::monomial(a.one());
                for d in &duals {
                    total_dual.add_assign(d);
                }
                let prod = total_w.mul(&total_dual);
                assert_eq!(prod.component(0), F2Poly::monomial(a.one()));
                for deg in 1..=(n + k) as u32 {
                    assert!(prod.component(deg).is_zero(), "n={n} k={k} deg={deg}");
                }
            }
        }
    }

    #[test]
    fn dual_classes_agree_with_the_quotient() {
        for (n, k) in [(1, 3), (2, 2), (2, 3), (3, 3)] {
            let ring = GrassmannRing::new(n, k).unwrap();
            let (_, duals) = dual_classes(n, n + k).unwrap();
            let embed = |p: &F2Poly| {
                // w_i keep their slots in the ring alphabet
                F2Poly::from_terms(p.terms().map(|m| {
                    let mut e = vec![0u8; n + k];
                    e[..n].copy_from_slice(m.exponents());
                    ring.alphabet().monomial(&e).unwrap()
                }))
            };
            for j in 1..=(n + k).min(n * k) {
                let slice = ring.quotient_slice(j).unwrap();
                let mut diff = embed(&duals[j - 1]);
                if j <= k {
                    diff.toggle(ring.alphabet().generator(n + j - 1));
                }
                assert!(slice.is_zero_in_quotient(&diff), "n={n} k={k} j={j}");
            }
        }
    }

    #[test]
    fn g2_r4_dimensions() {
        let r = GrassmannRing::new(2, 2).unwrap();
        let dims: Vec<usize> = (0..=4).map(|j| r.graded_dimension(j).unwrap()).collect();
        assert_eq!(dims, vec![1, 1, 2, 1, 1]);
        let circle = GrassmannRing::new(1, 1).unwrap();
        assert_eq!(
            (0..=1).map(|j| circle.graded_dimension(j).unwrap()).collect::<Vec<_>>(),
            vec![1, 1]
        );
    }

    #[test]
    fn dimensions_count_schubert_cells() {
        for n in 1..=3 {
            for k in 1..=3 {
                let r = GrassmannRing::new(n, k).unwrap();
                let mut total = 0;
                for j in 0..=n * k {
                    let d = r.graded_dimension(j).unwrap();
                    assert_eq!(d, box_partitions(j, n, k), "n={n} k={k} j={j}");
                    assert_eq!(d, r.graded_dimension(n * k - j).unwrap());
                    total += d;
                }
                assert_eq!(total, binomial(n + k, n));
            }
        }
    }

    #[test]
    fn degree_above_top_is_rejected() {
        let r = GrassmannRing::new(2, 2).unwrap();
        assert!(matches!(r.graded_dimension(5), Err(Error::DegreeOutOfRange { .. })));
    }

    #[test]
    fn swap_basics() {
        let r = GrassmannRing::new(2, 2).unwrap();
        let a = r.alphabet();
        let w2 = F2Poly::monomial(a.generator(a.index_of("w2").unwrap()));
        let wb2 = F2Poly::monomial(a.generator(a.index_of("wb2").unwrap()));
        assert_eq!(r.swap_action(&w2).unwrap(), wb2);
        assert_eq!(r.swap_action(&r.swap_action(&w2).unwrap()).unwrap(), w2);
        let rect = GrassmannRing::new(2, 3).unwrap();
        assert_eq!(
            rect.swap_action(&F2Poly::zero()),
            Err(Error::UnsupportedAction { n: 2, k: 3 })
        );
    }

    #[test]
    fn swap_is_a_ring_map() {
        use rand::{Rng, SeedableRng};
        let r = GrassmannRing::new(3, 3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let random = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut p = F2Poly::zero();
            for _ in 0..4 {
                let ms = r.alphabet().enumerate(rng.random_range(0..5));
                p.toggle(ms[rng.random_range(0..ms.len())]);
            }
            p
        };
        for _ in 0..100 {
            let p = random(&mut rng);
            let q = random(&mut rng);
            let lhs = r.swap_action(&p.mul(&q)).unwrap();
            let rhs = r.swap_action(&p).unwrap().mul(&r.swap_action(&q).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn swap_preserves_the_relation_ideal() {
        let r = GrassmannRing::new(3, 3).unwrap();
        for (d, rel) in r.relations().iter().enumerate() {
            let slice = r.quotient_slice(d + 1).unwrap();
            assert!(slice.is_zero_in_quotient(&r.swap_action(rel).unwrap()));
        }
    }

    #[test]
    fn z2_decomposition_n2() {
        let r = GrassmannRing::new(2, 2).unwrap();
        let d: Vec<_> = (0..=4).map(|j| r.z2_decompose(j).unwrap()).collect();
        assert_eq!((d[0].free_rank, d[0].trivial_rank), (0, 1));
        assert_eq!((d[1].free_rank, d[1].trivial_rank), (0, 1));
        assert_eq!((d[2].free_rank, d[2].trivial_rank), (1, 0));
        assert_eq!((d[3].free_rank, d[3].trivial_rank), (0, 1));
        assert_eq!((d[4].free_rank, d[4].trivial_rank), (0, 1));
    }

    #[test]
    fn z2_ranks_are_consistent() {
        for n in 1..=3 {
            let r = GrassmannRing::new(n, n).unwrap();
            for j in 0..=n * n {
                let d = r.z2_decompose(j).unwrap();
                assert_eq!(2 * d.free_rank + d.trivial_rank, r.graded_dimension(j).unwrap());
            }
        }
    }

    #[test]
    fn e2_tables() {
        let r2 = GrassmannRing::new(2, 2).unwrap();
        for i in 0..6 {
            assert_eq!(borel_e2_dimension(&r2, i, 2).unwrap(), usize::from(i == 0));
            for j in [0, 1, 3, 4] {
                assert_eq!(borel_e2_dimension(&r2, i, j).unwrap(), 1);
            }
            assert_eq!(borel_e2_dimension(&r2, i, 5).unwrap(), 0);
        }
        let r1 = GrassmannRing::new(1, 1).unwrap();
        for i in 0..6 {
            assert_eq!(borel_e2_dimension(&r1, i, 1).unwrap(), 1);
        }
    }
}
