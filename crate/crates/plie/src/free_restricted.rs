//! The free restricted Lie algebra on r generators, realized concretely as
//! the restricted primitives of the truncated tensor algebra.
//!
//! Degree by degree, the primitives of T(V) form the free restricted Lie
//! algebra on a basis of V: brackets (commutators) and p-th powers of
//! primitives are again primitive, and nothing else is. [`FreeLayers`]
//! computes each graded layer as an exact kernel and wraps it in a solver so
//! that arbitrary primitives can be re-expressed in the layer basis.
//!
//! There is an independent route to the layer dimensions that never touches
//! linear algebra: the free (unrestricted) Lie algebra has graded dimensions
//! given by the necklace-counting Witt formula
//!
//!   W(d, r) = (1/d) Σ_{e | d} μ(e) r^{d/e},
//!
//! and a basis of the free restricted Lie algebra is obtained by closing a
//! free Lie basis under p-th powers, so its degree-n layer has dimension
//! Σ W(n / p^k, r) over all k ≥ 0 with p^k dividing n. The two routes are
//! checked against each other in the tests and by the CLI.

use serde::Serialize;

use crate::error::Error;
use crate::fp::{FpVector, Prime, SpanSolver};
use crate::tensor::{primitive_basis, TensorContext, TensorElement};

/// One graded layer of the free restricted Lie algebra: a basis of the
/// degree-d primitives together with a solver over their span.
pub struct FreeLayer {
    degree: usize,
    basis: Vec<TensorElement>,
    solver: SpanSolver,
}

impl FreeLayer {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[TensorElement] {
        &self.basis
    }

    /// Coordinates of a homogeneous degree-d element in the layer basis, or
    /// None when the element has terms of other degrees or lies outside the
    /// primitive span. The zero element expresses as all zeros.
    pub fn express(&self, x: &TensorElement) -> Option<FpVector> {
        if x.degrees().iter().any(|&d| d != self.degree) {
            return None;
        }
        self.solver.express(&x.coords_of_degree(self.degree))
    }
}

/// All layers of the free restricted Lie algebra on `ctx.rank()` generators
/// up to the truncation degree.
pub struct FreeLayers {
    ctx: TensorContext,
    layers: Vec<FreeLayer>,
}

impl FreeLayers {
    pub fn new(ctx: TensorContext) -> Result<FreeLayers, Error> {
        let mut layers = Vec::with_capacity(ctx.max_degree());
        for d in 1..=ctx.max_degree() {
            let basis = primitive_basis(ctx, d)?;
            let coords: Vec<FpVector> =
                basis.iter().map(|b| b.coords_of_degree(d)).collect();
            let solver = SpanSolver::new(ctx.p(), ctx.rank().pow(d as u32), &coords);
            layers.push(FreeLayer { degree: d, basis, solver });
        }
        Ok(FreeLayers { ctx, layers })
    }

    pub fn ctx(&self) -> TensorContext {
        self.ctx
    }

    pub fn max_degree(&self) -> usize {
        self.ctx.max_degree()
    }

    pub fn layer(&self, degree: usize) -> &FreeLayer {
        assert!(
            degree >= 1 && degree <= self.layers.len(),
            "degree {degree} out of range"
        );
        &self.layers[degree - 1]
    }

    pub fn layers(&self) -> &[FreeLayer] {
        &self.layers
    }

    pub fn dims(&self) -> Vec<usize> {
        self.layers.iter().map(FreeLayer::dim).collect()
    }

    /// Splits an element into its layer coordinates, one vector per degree
    /// 1..=max_degree. None when the element has a constant term or some
    /// homogeneous component is not primitive.
    pub fn decompose(&self, x: &TensorElement) -> Option<Vec<FpVector>> {
        if !x.counit().is_zero() {
            return None;
        }
        (1..=self.max_degree())
            .map(|d| self.layer(d).express(&x.homogeneous_component(d)))
            .collect()
    }

    /// Verifies that the computed layers are closed under the restricted
    /// operations: every commutator of basis primitives (total degree within
    /// the truncation) and every p-th power of basis primitives re-expresses
    /// in the appropriate layer.
    pub fn closure_report(&self) -> ClosureReport {
        let n = self.max_degree();
        let p = self.ctx.p().get() as usize;
        let mut report = ClosureReport {
            p: self.ctx.p(),
            rank: self.ctx.rank(),
            max_degree: n,
            dims: self.dims(),
            brackets_checked: 0,
            powers_checked: 0,
            bracket_failures: Vec::new(),
            power_failures: Vec::new(),
        };
        for a in 1..n {
            for b in 1..=(n - a) {
                for (i, u) in self.layer(a).basis.iter().enumerate() {
                    for (j, v) in self.layer(b).basis.iter().enumerate() {
                        let c = u.commutator(v).expect("same context");
                        report.brackets_checked += 1;
                        if self.layer(a + b).express(&c).is_none() {
                            report.bracket_failures.push(BracketClosureFailure {
                                deg_left: a,
                                idx_left: i,
                                deg_right: b,
                                idx_right: j,
                            });
                        }
                    }
                }
            }
        }
        for a in 1..=n / p {
            for (i, u) in self.layer(a).basis.iter().enumerate() {
                let w = u.pow(p).expect("p*a within truncation");
                report.powers_checked += 1;
                if self.layer(p * a).express(&w).is_none() {
                    report
                        .power_failures
                        .push(PowerClosureFailure { degree: a, index: i });
                }
            }
        }
        report
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BracketClosureFailure {
    pub deg_left: usize,
    pub idx_left: usize,
    pub deg_right: usize,
    pub idx_right: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerClosureFailure {
    pub degree: usize,
    pub index: usize,
}

/// Outcome of the closure checks, together with the layer dimensions.
#[derive(Clone, Debug, Serialize)]
pub struct ClosureReport {
    pub p: Prime,
    pub rank: usize,
    pub max_degree: usize,
    pub dims: Vec<usize>,
    pub brackets_checked: usize,
    pub powers_checked: usize,
    pub bracket_failures: Vec<BracketClosureFailure>,
    pub power_failures: Vec<PowerClosureFailure>,
}

impl ClosureReport {
    pub fn passed(&self) -> bool {
        self.bracket_failures.is_empty() && self.power_failures.is_empty()
    }
}

fn moebius(mut n: usize) -> i64 {
    debug_assert!(n >= 1);
    let mut factors = 0;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return 0;
            }
            factors += 1;
        }
        d += 1;
    }
    if n > 1 {
        factors += 1;
    }
    if factors % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The Witt necklace number W(d, r) = (1/d) Σ_{e|d} μ(e) r^{d/e}: the
/// dimension of the degree-d layer of the free (unrestricted) Lie algebra on
/// r generators.
pub fn witt_dimension(degree: usize, rank: usize) -> u128 {
    assert!(degree >= 1, "degree must be positive");
    let mut total: i128 = 0;
    for e in 1..=degree {
        if !degree.is_multiple_of(e) {
            continue;
        }
        let mu = moebius(e);
        if mu == 0 {
            continue;
        }
        total += mu as i128 * (rank as i128).pow((degree / e) as u32);
    }
    assert!(total >= 0 && total % degree as i128 == 0);
    (total / degree as i128) as u128
}

/// The dimension of the degree-n layer of the free restricted Lie algebra on
/// r generators over F_p: a free Lie basis closed under p-th powers gives
/// Σ_{p^k | n} W(n / p^k, r).
pub fn free_restricted_dimension(degree: usize, rank: usize, p: Prime) -> u128 {
    assert!(degree >= 1, "degree must be positive");
    let p = p.get() as usize;
    let mut total = 0u128;
    let mut q = 1usize;
    loop {
        if degree.is_multiple_of(q) {
            total += witt_dimension(degree / q, rank);
        }
        match q.checked_mul(p) {
            Some(next) if next <= degree => q = next,
            _ => break,
        }
    }
    total
}
