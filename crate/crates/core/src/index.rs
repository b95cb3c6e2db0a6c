//! The index as the smallest power of `t` inside the ideal `J` generated by
//! the wreath-square Stiefel–Whitney classes.
//!
//! `J` is never materialized. For each degree `d` the engine spans the
//! degree-`d` piece of `J` by `generator × basis element` products and tests
//! whether the coordinate vector of `t^d` lies in that span. `J ∩ F_2[t]`
//! is an ideal of `F_2[t]`, so the first `d` that succeeds is the index.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2::EchelonBasis;
use crate::wreath::{WreathBasis, WreathContext, WreathElement};

/// Unoriented `G_n(R^2n)` or oriented `~G_n(R^2n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Oriented,
    Unoriented,
}

impl Variant {
    pub fn is_oriented(self) -> bool {
        self == Variant::Oriented
    }

    pub fn context(self, n: usize) -> Result<WreathContext> {
        WreathContext::new(n, self.is_oriented())
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Oriented => "oriented",
            Variant::Unoriented => "unoriented",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oriented" => Ok(Variant::Oriented),
            "unoriented" => Ok(Variant::Unoriented),
            other => Err(Error::InvalidInput(format!(
                "unknown variant {other:?} (expected oriented or unoriented)"
            ))),
        }
    }
}

/// Size of one degree slice visited by the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceDims {
    pub degree: u32,
    pub basis_size: usize,
    pub ideal_rank: usize,
}

/// Outcome of [`index_power`], with the two membership facts that pin `s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexCertificate {
    pub n: usize,
    pub variant: Variant,
    #[serde(rename = "index_power")]
    pub s: u32,
    /// Set when `s` comes from the closed form rather than the ideal search.
    pub closed_form_only: bool,
    /// `t^s ∈ J_s`.
    pub witness_in: bool,
    /// `t^(s-1) ∉ J_(s-1)`; vacuous when `s = 1`.
    pub witness_out: bool,
    pub witness_in_degree: u32,
    pub witness_out_degree: Option<u32>,
    pub slice_dims: Vec<SliceDims>,
}

/// Degree-`d` piece of an ideal, as a row space over the canonical slice basis.
#[derive(Clone, Debug)]
pub struct DegreeSliceMatrix {
    pub degree: u32,
    basis: Vec<WreathBasis>,
    index: HashMap<WreathBasis, usize>,
    rows: EchelonBasis,
}

impl DegreeSliceMatrix {
    pub fn basis(&self) -> &[WreathBasis] {
        &self.basis
    }

    pub fn basis_size(&self) -> usize {
        self.basis.len()
    }

    pub fn rank(&self) -> usize {
        self.rows.rank()
    }

    pub fn dims(&self) -> SliceDims {
        SliceDims {
            degree: self.degree,
            basis_size: self.basis.len(),
            ideal_rank: self.rows.rank(),
        }
    }

    fn coordinates(&self, x: &WreathElement) -> Result<Vec<usize>> {
        x.terms()
            .map(|b| {
                self.index.get(b).copied().ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "element has a term of degree {} in a degree-{} slice",
                        b.degree(),
                        self.degree
                    ))
                })
            })
            .collect()
    }

    /// Membership of a homogeneous element of this slice's degree.
    pub fn contains(&self, x: &WreathElement) -> Result<bool> {
        let coords = self.coordinates(x)?;
        Ok(self.rows.contains_indices(coords))
    }
}

/// Spans the degree-`d` piece of the ideal generated by `generators`.
///
/// Every generator of degree `e <= d` is multiplied by every basis element
/// of degree `d - e`; the basis spans the ring slice-wise, so these products
/// span the ideal's slice. Duplicate rows are dropped before elimination.
pub fn ideal_slice(
    ctx: &WreathContext,
    generators: &[WreathElement],
    d: u32,
) -> Result<DegreeSliceMatrix> {
    let basis = ctx.degree_slice_basis(d);
    let index: HashMap<WreathBasis, usize> =
        basis.iter().enumerate().map(|(i, b)| (*b, i)).collect();
    let mut rows = EchelonBasis::new(basis.len());
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut lower_cache: HashMap<u32, Vec<WreathBasis>> = HashMap::new();
    for g in generators {
        if g.is_zero() {
            continue;
        }
        let e = g.homogeneous_degree().ok_or_else(|| {
            Error::InvalidInput("ideal generators must be homogeneous".into())
        })?;
        if e > d {
            continue;
        }
        let lower = lower_cache
            .entry(d - e)
            .or_insert_with(|| ctx.degree_slice_basis(d - e));
        for b in lower.iter() {
            if rows.is_full() {
                break;
            }
            let prod = g.multiply(&ctx.element([*b]))?;
            if prod.is_zero() {
                continue;
            }
            let mut coords: Vec<usize> = prod.terms().map(|t| index[t]).collect();
            coords.sort_unstable();
            if seen.insert(coords.clone()) {
                rows.insert_indices(coords);
            }
        }
    }
    Ok(DegreeSliceMatrix {
        degree: d,
        basis,
        index,
        rows,
    })
}

/// Generators of the kernel ideal: `w_1..w_2n` of the wreath square
/// (`w_2..w_2n` in the oriented case).
pub fn kernel_generators(ctx: &WreathContext) -> Vec<WreathElement> {
    let first = if ctx.oriented() { 2 } else { 1 };
    (first..=2 * ctx.n())
        .map(|k| ctx.sw_component(k).expect("k within 0..=2n"))
        .collect()
}

/// Components `w_1..w_last` (from `w_2` when oriented).
fn leading_generators(ctx: &WreathContext, last: usize) -> Vec<WreathElement> {
    let first = if ctx.oriented() { 2 } else { 1 };
    (first..=last)
        .map(|k| ctx.sw_component(k).expect("k within 0..=2n"))
        .collect()
}

/// `n = 2^a (2b + 1)`; returns `a`.
pub fn two_adic_valuation(n: usize) -> u32 {
    n.trailing_zeros()
}

/// Exponent `s` of the index `<t^s>`: `2^(a+1)`, except `3` for oriented
/// Grassmannians with `a = 1`.
pub fn closed_form_power(n: usize, variant: Variant) -> Result<u32> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let a = two_adic_valuation(n);
    Ok(match variant {
        Variant::Oriented if a == 1 => 3,
        _ => 1 << (a + 1),
    })
}

/// Searches `d = 1, 2, ...` for the first `t^d` in the kernel ideal.
///
/// Oriented Grassmannians with odd `n` fall outside the kernel-ideal model;
/// their certificate carries the closed form with `closed_form_only` set.
pub fn index_power(n: usize, variant: Variant) -> Result<IndexCertificate> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    if variant.is_oriented() && n % 2 == 1 {
        let s = closed_form_power(n, variant)?;
        return Ok(IndexCertificate {
            n,
            variant,
            s,
            closed_form_only: true,
            witness_in: false,
            witness_out: false,
            witness_in_degree: s,
            witness_out_degree: None,
            slice_dims: Vec::new(),
        });
    }
    let ctx = variant.context(n)?;
    let generators = kernel_generators(&ctx);
    let cap = 4 * n as u32;
    let mut slice_dims = Vec::new();
    for d in 1..=cap {
        let slice = ideal_slice(&ctx, &generators, d)?;
        slice_dims.push(slice.dims());
        if slice.contains(&ctx.t_power(d))? {
            return Ok(IndexCertificate {
                n,
                variant,
                s: d,
                closed_form_only: false,
                witness_in: true,
                // every lower degree was tested and failed
                witness_out: true,
                witness_in_degree: d,
                witness_out_degree: (d > 1).then_some(d - 1),
                slice_dims,
            });
        }
    }
    Err(Error::Internal(format!(
        "no power of t up to degree {cap} lies in the kernel ideal for n = {n} ({variant})"
    )))
}

/// Whether `t^d` lies in the full kernel ideal.
pub fn t_power_in_kernel(n: usize, variant: Variant, d: u32) -> Result<bool> {
    let ctx = variant.context(n)?;
    let slice = ideal_slice(&ctx, &kernel_generators(&ctx), d)?;
    slice.contains(&ctx.t_power(d))
}

/// Which of the four relation shapes applies to `w_k` for `n = 2^a (2b+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum RelationCase {
    /// `k` odd, `k <= 2^(a+1) - 3`: the `Q` sum vanishes.
    OddQSum,
    /// `k` even, not of the form below: `P_(k/2)` equals the `Q` sum.
    EvenGeneric,
    /// `k = 2^(a+1) - 2^(r+1)`: `P_(k/2) = t^k + Q` sum.
    EvenPower { r: u32 },
    /// `k = 2^(a+1) - 1`: `t P_(2^a - 1)` equals the `Q` sum.
    Last,
}

pub fn relation_case(n: usize, k: usize) -> Result<RelationCase> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidInput(format!("relations need even n (got {n})")));
    }
    let a = two_adic_valuation(n);
    let top = (1usize << (a + 1)) - 1;
    if k == 0 || k > top {
        return Err(Error::DegreeOutOfRange { degree: k, max: top });
    }
    if k == top {
        return Ok(RelationCase::Last);
    }
    if k % 2 == 1 {
        return Ok(RelationCase::OddQSum);
    }
    for r in 0..a {
        if k == (1usize << (a + 1)) - (1usize << (r + 1)) {
            return Ok(RelationCase::EvenPower { r });
        }
    }
    Ok(RelationCase::EvenGeneric)
}

/// The relation's two sides moved to one side, so that the claim reads
/// `w_k ≡ relation_expression(k)` modulo `w_1..w_(k-1)`.
pub fn relation_expression(ctx: &WreathContext, k: usize) -> Result<WreathElement> {
    let n = ctx.n();
    let case = relation_case(n, k)?;
    let mut expr = ctx.zero();
    for i in k.saturating_sub(n)..=(k - 1) / 2 {
        if let (Some(a), Some(b)) = (ctx.w(i), ctx.w(k - i)) {
            expr.add_assign(&ctx.q_of(a, b));
        }
    }
    let p = |i: usize, t: u32| -> WreathElement {
        ctx.w(i).map_or_else(|| ctx.zero(), |m| ctx.tp(t, m))
    };
    match case {
        RelationCase::OddQSum => {}
        RelationCase::EvenGeneric => expr.add_assign(&p(k / 2, 0)),
        RelationCase::EvenPower { .. } => {
            expr.add_assign(&p(k / 2, 0));
            expr.add_assign(&ctx.t_power(k as u32));
        }
        RelationCase::Last => {
            let a = two_adic_valuation(n);
            expr.add_assign(&p((1 << a) - 1, 1));
        }
    }
    Ok(expr)
}

/// Checks that `w_k` agrees with the stated relation modulo the ideal
/// generated by `w_1..w_(k-1)`, by slice membership of their difference.
pub fn verify_prop_relations(n: usize, variant: Variant, k: usize) -> Result<bool> {
    let ctx = variant.context(n)?;
    let expr = relation_expression(&ctx, k)?;
    let diff = ctx.sw_component(k)?.add(&expr);
    let slice = ideal_slice(&ctx, &leading_generators(&ctx, k - 1), k as u32)?;
    slice.contains(&diff)
}

/// `t^(2^(a+1))` lies in the ideal generated by `w_1..w_(2^(a+1)-1)` alone.
pub fn verify_t_vanishing(n: usize, variant: Variant) -> Result<bool> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidInput(format!("t-vanishing needs even n (got {n})")));
    }
    let ctx = variant.context(n)?;
    let d = 1u32 << (two_adic_valuation(n) + 1);
    let slice = ideal_slice(&ctx, &leading_generators(&ctx, d as usize - 1), d)?;
    slice.contains(&ctx.t_power(d))
}
