//! Cohomology of the wreath square `B(O(n) wr Z/2)` (or `B(SO(n) wr Z/2)`)
//! with F_2 coefficients, and the Stiefel-Whitney classes of wreath-square
//! bundles.
//!
//! Additively the ring has the basis
//!
//! * `t^i . P(m)` for `i >= 0` and `m` a monomial in the `w_j`, where
//!   `P(m) = m ⊗ m`, of degree `i + 2 deg m`;
//! * `Q(a|b) = a ⊗ b + b ⊗ a` for monomials `a < b`, of degree `deg a + deg b`.
//!
//! Products follow from `P` being multiplicative, `t . Q(-) = 0` and
//! expanding `Q . Q` as tensors:
//!
//! ```text
//! t^i P(m) . t^j P(m') = t^(i+j) P(m m')
//! P(m) . Q(a|b)        = Q(ma|mb),   t^i P(m) . Q(a|b) = 0 for i > 0
//! Q(a|b) . Q(c|d)      = Q(ac|bd) + Q(ad|bc),   Q(x|x) = 0
//! ```

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::monomial::{Alphabet, F2Poly, Monomial};

/// Which classifying space the wreath square is taken over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WreathContext {
    n: usize,
    oriented: bool,
    alphabet: Alphabet,
}

/// One additive basis element of the wreath-square cohomology.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WreathBasis {
    /// `t^t . P(m)`.
    TP { t: u32, m: Monomial },
    /// `Q(lo|hi)` with `lo < hi`.
    Q { lo: Monomial, hi: Monomial },
}

/// A finite F_2-combination of [`WreathBasis`] elements.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WreathElement {
    n: usize,
    oriented: bool,
    terms: BTreeSet<WreathBasis>,
}

impl WreathBasis {
    pub fn degree(&self) -> u32 {
        match self {
            WreathBasis::TP { t, m } => t + 2 * m.degree(),
            WreathBasis::Q { lo, hi } => lo.degree() + hi.degree(),
        }
    }

    /// Canonical `Q(a|b)`; `None` when `a = b` since `Q(a|a) = 0`.
    pub fn q(a: Monomial, b: Monomial) -> Option<WreathBasis> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(WreathBasis::Q { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Some(WreathBasis::Q { lo: b, hi: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    /// Product of two basis elements, as a list of basis terms (at most two).
    fn mul(&self, other: &WreathBasis) -> [Option<WreathBasis>; 2] {
        use WreathBasis::*;
        match (self, other) {
            (TP { t: i, m }, TP { t: j, m: m2 }) => [Some(TP { t: i + j, m: m.mul(m2) }), None],
            (TP { t, m }, Q { lo, hi }) | (Q { lo, hi }, TP { t, m }) => {
                if *t == 0 {
                    [WreathBasis::q(m.mul(lo), m.mul(hi)), None]
                } else {
                    [None, None]
                }
            }
            (Q { lo: a, hi: b }, Q { lo: c, hi: d }) => [
                WreathBasis::q(a.mul(c), b.mul(d)),
                WreathBasis::q(a.mul(d), b.mul(c)),
            ],
        }
    }
}

impl WreathContext {
    /// Unoriented context: generators `w1..wn`. Oriented: `w2..wn` (`w1 = 0` on `BSO(n)`).
    pub fn new(n: usize, oriented: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("wreath context needs n >= 1".into()));
        }
        let first = if oriented { 2 } else { 1 };
        let alphabet = Alphabet::new((first..=n).map(|i| (format!("w{i}"), i as u32)))?;
        Ok(Self {
            n,
            oriented,
            alphabet,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn oriented(&self) -> bool {
        self.oriented
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// `w_i` as a monomial: `w_0 = 1`; `None` when the class is zero
    /// (`i > n`, or `i = 1` in the oriented context).
    pub fn w(&self, i: usize) -> Option<Monomial> {
        match i {
            0 => Some(self.alphabet.one()),
            _ if i > self.n => None,
            1 if self.oriented => None,
            _ => Some(self.alphabet.generator(i - if self.oriented { 2 } else { 1 })),
        }
    }

    pub fn zero(&self) -> WreathElement {
        WreathElement {
            n: self.n,
            oriented: self.oriented,
            terms: BTreeSet::new(),
        }
    }

    pub fn element(&self, terms: impl IntoIterator<Item = WreathBasis>) -> WreathElement {
        let mut e = self.zero();
        for b in terms {
            e.toggle(b);
        }
        e
    }

    pub fn unit(&self) -> WreathElement {
        self.tp(0, self.alphabet.one())
    }

    /// `t^i . P(m)` for a single monomial.
    pub fn tp(&self, t: u32, m: Monomial) -> WreathElement {
        self.element([WreathBasis::TP { t, m }])
    }

    pub fn t_power(&self, i: u32) -> WreathElement {
        self.tp(i, self.alphabet.one())
    }

    /// `P(p) = p ⊗ p`, expanded over the terms of `p`: the diagonal terms give
    /// `P(m_i)` and each unordered pair of distinct terms gives `Q(m_i|m_j)`.
    pub fn p_of(&self, p: &F2Poly) -> WreathElement {
        let terms: Vec<&Monomial> = p.terms().collect();
        let mut out = self.zero();
        for (i, a) in terms.iter().enumerate() {
            out.toggle(WreathBasis::TP { t: 0, m: **a });
            for b in &terms[i + 1..] {
                if let Some(q) = WreathBasis::q(**a, **b) {
                    out.toggle(q);
                }
            }
        }
        out
    }

    pub fn q_of(&self, a: Monomial, b: Monomial) -> WreathElement {
        self.element(WreathBasis::q(a, b))
    }

    /// Canonically ordered basis of the degree-`d` piece.
    pub fn degree_slice_basis(&self, d: u32) -> Vec<WreathBasis> {
        let mut out = Vec::new();
        for t in (0..=d).filter(|t| (d - t) % 2 == 0) {
            out.extend(
                self.alphabet
                    .enumerate((d - t) / 2)
                    .into_iter()
                    .map(|m| WreathBasis::TP { t, m }),
            );
        }
        for a in 0..=d / 2 {
            let low = self.alphabet.enumerate(a);
            if 2 * a == d {
                for (i, x) in low.iter().enumerate() {
                    for y in &low[i + 1..] {
                        out.push(WreathBasis::Q { lo: *x, hi: *y });
                    }
                }
            } else {
                let high = self.alphabet.enumerate(d - a);
                for x in &low {
                    for y in &high {
                        out.push(WreathBasis::Q { lo: *x, hi: *y });
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// `w_k` of the wreath square of the universal rank-`n` bundle:
    ///
    /// `sum_i Q(w_i|w_{k-i}) + sum_i C(n-i, k-2i) t^(k-2i) P(w_i)`,
    /// both sums starting at `max(0, k-n)`, the first ending at `⌊(k-1)/2⌋`
    /// and the second at `⌊k/2⌋`, with parities from Lucas' theorem.
    pub fn sw_component(&self, k: usize) -> Result<WreathElement> {
        let n = self.n;
        if k > 2 * n {
            return Err(Error::DegreeOutOfRange {
                degree: k,
                max: 2 * n,
            });
        }
        let mut out = self.zero();
        let start = k.saturating_sub(n);
        for i in start..=k / 2 {
            if 2 * i < k {
                if let (Some(a), Some(b)) = (self.w(i), self.w(k - i)) {
                    out.toggle(WreathBasis::Q { lo: a, hi: b });
                }
            }
            if binom_mod2((n - i) as u64, (k - 2 * i) as u64) {
                if let Some(m) = self.w(i) {
                    out.toggle(WreathBasis::TP {
                        t: (k - 2 * i) as u32,
                        m,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Homogeneous components `w_1..w_2n` of the total class
    /// `sum_{r<s} Q(w_r|w_s) + sum_r P(w_r)(1+t)^(n-r)`, obtained by expanding
    /// the powers of `1 + t` through ring multiplication.
    pub fn total_sw(&self) -> Vec<WreathElement> {
        let n = self.n;
        let mut total = self.zero();
        for r in 0..=n {
            for s in r + 1..=n {
                if let (Some(a), Some(b)) = (self.w(r), self.w(s)) {
                    total.add_assign(&self.q_of(a, b));
                }
            }
        }
        let one_plus_t = self.unit().add(&self.t_power(1));
        for r in 0..=n {
            let Some(m) = self.w(r) else { continue };
            let mut term = self.tp(0, m);
            for _ in r..n {
                term = term.mul_unchecked(&one_plus_t);
            }
            total.add_assign(&term);
        }
        (1..=2 * n as u32).map(|d| total.component(d)).collect()
    }

    /// `Q(a|b)` prints as `Q(a|b)`, `t^i P(m)` as `t^i.P(m)` (`P(m)` when `i = 0`).
    pub fn format(&self, e: &WreathElement) -> String {
        if e.is_zero() {
            return "0".into();
        }
        e.terms()
            .map(|b| self.format_basis(b))
            .collect::<Vec<_>>()
            .join("+")
    }

    pub fn format_basis(&self, b: &WreathBasis) -> String {
        let a = &self.alphabet;
        match b {
            WreathBasis::TP { t: 0, m } => format!("P({})", a.format_monomial(m)),
            WreathBasis::TP { t, m } => format!("t^{t}.P({})", a.format_monomial(m)),
            WreathBasis::Q { lo, hi } => {
                format!("Q({}|{})", a.format_monomial(lo), a.format_monomial(hi))
            }
        }
    }
}

impl WreathElement {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &WreathBasis> {
        self.terms.iter()
    }

    pub fn contains(&self, b: &WreathBasis) -> bool {
        self.terms.contains(b)
    }

    /// The `t^i P(m)` terms as `(i, m)` pairs.
    pub fn t_part(&self) -> impl Iterator<Item = (u32, Monomial)> + '_ {
        self.terms.iter().filter_map(|b| match b {
            WreathBasis::TP { t, m } => Some((*t, *m)),
            _ => None,
        })
    }

    /// The `Q(a|b)` terms as ordered pairs `a < b`.
    pub fn q_part(&self) -> impl Iterator<Item = (Monomial, Monomial)> + '_ {
        self.terms.iter().filter_map(|b| match b {
            WreathBasis::Q { lo, hi } => Some((*lo, *hi)),
            _ => None,
        })
    }

    pub fn toggle(&mut self, b: WreathBasis) {
        if let WreathBasis::Q { lo, hi } = b {
            if lo == hi {
                return;
            }
            debug_assert!(lo < hi, "non-canonical Q pair");
        }
        if !self.terms.remove(&b) {
            self.terms.insert(b);
        }
    }

    pub fn add_assign(&mut self, other: &WreathElement) {
        for b in &other.terms {
            self.toggle(*b);
        }
    }

    pub fn add(&self, other: &WreathElement) -> WreathElement {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    fn same_context(&self, other: &WreathElement) -> bool {
        self.n == other.n && self.oriented == other.oriented
    }

    pub fn multiply(&self, other: &WreathElement) -> Result<WreathElement> {
        if !self.same_context(other) {
            return Err(Error::ContextMismatch);
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &WreathElement) -> WreathElement {
        let mut out = WreathElement {
            n: self.n,
            oriented: self.oriented,
            terms: BTreeSet::new(),
        };
        for a in &self.terms {
            for b in &other.terms {
                for p in a.mul(b).into_iter().flatten() {
                    out.toggle(p);
                }
            }
        }
        out
    }

    /// The degree-`d` part.
    pub fn component(&self, d: u32) -> WreathElement {
        WreathElement {
            n: self.n,
            oriented: self.oriented,
            terms: self.terms.iter().filter(|b| b.degree() == d).copied().collect(),
        }
    }

    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.iter().map(WreathBasis::degree);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }
}

impl fmt::Debug for WreathElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.terms.iter()).finish()
    }
}

/// `C(a, b) mod 2` by Lucas' theorem: odd iff no binary digit of `b`
/// exceeds the matching digit of `a`. Zero when `b > a`.
pub fn binom_mod2(a: u64, b: u64) -> bool {
    b <= a && b & !a == 0
}

/// Explicit tensor model of a wreath element: the column-0 part as a set of
/// pure tensors `x ⊗ y` in `H*(B) ⊗ H*(B)`, and the `t`-divisible part as
/// sheets `(i, m)` standing for `t^i (m ⊗ m)` with `i >= 1`.
///
/// Products here are computed term by term on tensors, independently of the
/// basis multiplication table in [`WreathBasis`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorForm {
    pub tensor: BTreeSet<(Monomial, Monomial)>,
    pub sheets: BTreeSet<(u32, Monomial)>,
}

fn toggle<T: Ord>(set: &mut BTreeSet<T>, x: T) {
    if !set.remove(&x) {
        set.insert(x);
    }
}

impl TensorForm {
    /// Naive product: tensors multiply factorwise; `t` kills every
    /// off-diagonal tensor and sees a diagonal `m ⊗ m` as `P(m)`.
    pub fn mul(&self, other: &TensorForm) -> TensorForm {
        let mut out = TensorForm::default();
        for (a, b) in &self.tensor {
            for (c, d) in &other.tensor {
                toggle(&mut out.tensor, (a.mul(c), b.mul(d)));
            }
        }
        let diag = |f: &TensorForm| -> Vec<Monomial> {
            f.tensor.iter().filter(|(x, y)| x == y).map(|(x, _)| *x).collect()
        };
        for (i, m) in &self.sheets {
            for x in diag(other) {
                toggle(&mut out.sheets, (*i, m.mul(&x)));
            }
            for (j, m2) in &other.sheets {
                toggle(&mut out.sheets, (i + j, m.mul(m2)));
            }
        }
        for (j, m2) in &other.sheets {
            for x in diag(self) {
                toggle(&mut out.sheets, (*j, x.mul(m2)));
            }
        }
        out
    }
}

/// Writes each basis element out as tensors: `P(m) -> m ⊗ m`,
/// `Q(a|b) -> a ⊗ b + b ⊗ a`, `t^i P(m) -> sheet (i, m)`.
pub fn tensor_expand(x: &WreathElement) -> TensorForm {
    let mut out = TensorForm::default();
    for b in x.terms() {
        match *b {
            WreathBasis::TP { t: 0, m } => toggle(&mut out.tensor, (m, m)),
            WreathBasis::TP { t, m } => toggle(&mut out.sheets, (t, m)),
            WreathBasis::Q { lo, hi } => {
                toggle(&mut out.tensor, (lo, hi));
                toggle(&mut out.tensor, (hi, lo));
            }
        }
    }
    out
}

/// Inverse of [`tensor_expand`]; fails on tensors that are not swap-invariant.
pub fn tensor_collapse(ctx: &WreathContext, f: &TensorForm) -> Result<WreathElement> {
    let mut out = ctx.zero();
    for &(a, b) in &f.tensor {
        if a == b {
            out.toggle(WreathBasis::TP { t: 0, m: a });
        } else if !f.tensor.contains(&(b, a)) {
            return Err(Error::InvalidInput("tensor is not swap invariant".into()));
        } else if a < b {
            out.toggle(WreathBasis::Q { lo: a, hi: b });
        }
    }
    for &(t, m) in &f.sheets {
        out.toggle(WreathBasis::TP { t, m });
    }
    Ok(out)
}
