//! Executable verification of the monadic decomposition: the equivalence
//! between restricted Lie algebras and Eilenberg–Moore algebras for the
//! primitives-of-the-tensor-algebra monad, checked exactly at a fixed
//! truncation degree.
//!
//! An [`EmObject`] is a space V₀ together with a structure map μ₀ given
//! degree by degree on the primitive layers of the truncated tensor algebra
//! on V₀ (exactly the value of the monad at V₀). Three executable facts tie
//! the knot:
//!
//! * [`em_object_from_lie`] extracts μ₀ from a restricted Lie algebra L by
//!   evaluating each primitive layer in ũ(L) through PBW straightening and
//!   pulling the (primitive) result back along the unit isomorphism
//!   L ≅ 𝒫ũ(L).
//! * [`lie_from_em`] goes the other way, reading structure constants off
//!   μ₀ (degree-2 commutators) and the p-operation (degree-p powers);
//!   [`roundtrip_check`] verifies the two are mutually inverse on the nose.
//! * [`sandwich_certificate`] certifies, filtration degree by degree, that
//!   the quotient of the tensor algebra by the μ₀-relations coincides with
//!   ũ(L): an upper bound from the spanned relations and a lower bound from
//!   the rank of the evaluation map pinch the dimension against the PBW
//!   count, so equality of all three is a proof in that degree.
//!
//! [`EmObject::check_em_laws`] verifies the two algebra laws (unit and
//! associativity) on nested inputs covering every degree pattern inside the
//! truncation; [`check_em_morphism`] does the same for morphisms.

use serde::Serialize;

use crate::enveloping::{EnvElement, EnvelopingAlgebra};
use crate::error::Error;
use crate::fp::{EchelonBasis, FpMatrix, FpVector, Prime};
use crate::free_restricted::FreeLayers;
use crate::lie::{AxiomReport, RestrictedLieAlgebra};
use crate::tensor::{words_of_degree, TensorContext, TensorElement};

/// An Eilenberg–Moore algebra at a fixed truncation: a structure map from
/// every primitive layer of the truncated tensor algebra on V₀ back to V₀.
/// `layer_maps[d-1]` sends layer-d coordinates (in the basis computed by
/// [`FreeLayers`]) to V₀ coordinates.
pub struct EmObject {
    p: Prime,
    names: Vec<String>,
    truncation: usize,
    layers: FreeLayers,
    layer_maps: Vec<FpMatrix>,
}

impl EmObject {
    /// Validates shapes (one matrix per degree, each dim(V₀) × layer-dim,
    /// all over the same field). The algebra laws are *not* assumed here;
    /// [`EmObject::check_em_laws`] verifies them.
    pub fn new(
        p: Prime,
        names: Vec<String>,
        truncation: usize,
        layer_maps: Vec<FpMatrix>,
    ) -> Result<EmObject, Error> {
        let n = names.len();
        let ctx = TensorContext::new(p, n, truncation)?;
        let layers = FreeLayers::new(ctx)?;
        if layer_maps.len() != truncation {
            return Err(Error::DimensionMismatch(format!(
                "expected {truncation} layer maps, got {}",
                layer_maps.len()
            )));
        }
        for (d, m) in layer_maps.iter().enumerate() {
            let want_cols = layers.layer(d + 1).dim();
            if m.rows() != n || m.cols() != want_cols {
                return Err(Error::DimensionMismatch(format!(
                    "layer {} map is {}x{}, expected {n}x{want_cols}",
                    d + 1,
                    m.rows(),
                    m.cols()
                )));
            }
            if m.modulus() != p.get() {
                return Err(Error::MixedContext(format!(
                    "layer {} map over F_{} in an object over F_{}",
                    d + 1,
                    m.modulus(),
                    p
                )));
            }
        }
        Ok(EmObject { p, names, truncation, layers, layer_maps })
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn layers(&self) -> &FreeLayers {
        &self.layers
    }

    pub fn layer_map(&self, degree: usize) -> &FpMatrix {
        &self.layer_maps[degree - 1]
    }

    /// The context whose letters are the basis of V₀.
    pub fn letter_ctx(&self) -> TensorContext {
        self.layers.ctx()
    }

    /// μ₀ applied to an arbitrary primitive of the truncated tensor algebra
    /// on V₀: decompose into layers, apply each layer map, sum.
    pub fn apply(&self, z: &TensorElement) -> Result<FpVector, Error> {
        let parts = self.layers.decompose(z).ok_or_else(|| {
            Error::DimensionMismatch(
                "element is not a primitive of the truncated tensor algebra".into(),
            )
        })?;
        let mut out = FpVector::zeros(self.p, self.dim());
        for (map, coords) in self.layer_maps.iter().zip(&parts) {
            out = out.add(&map.mul_vec(coords));
        }
        Ok(out)
    }

    /// Verifies the two Eilenberg–Moore laws up to the truncation.
    ///
    /// Unit: the degree-1 layer map is the identity. Associativity: nested
    /// inputs are brackets and p-th powers whose letters are injected layer
    /// basis elements, covering every degree pattern (d₁, d₂) with
    /// d₁ + d₂ ≤ N and every p·d ≤ N; evaluating the inner elements first
    /// (and then the pattern on the images) must agree with flattening the
    /// nesting by multiplying out (and evaluating once).
    pub fn check_em_laws(&self) -> EmLawsReport {
        let n = self.truncation;
        let p = self.p.get() as usize;
        let ctx = self.letter_ctx();
        let mut report = EmLawsReport {
            p: self.p,
            dim: self.dim(),
            truncation: n,
            unit_law_holds: self.layer_maps[0].is_identity(),
            bracket_patterns_checked: 0,
            power_patterns_checked: 0,
            bracket_failures: Vec::new(),
            power_failures: Vec::new(),
        };
        for d1 in 1..n {
            for d2 in 1..=(n - d1) {
                for (i, u) in self.layers.layer(d1).basis().iter().enumerate() {
                    for (j, v) in self.layers.layer(d2).basis().iter().enumerate() {
                        report.bracket_patterns_checked += 1;
                        let residual = self.bracket_pattern_residual(ctx, u, v);
                        if !residual.is_zero() {
                            report.bracket_failures.push(BracketLawFailure {
                                deg_left: d1,
                                idx_left: i,
                                deg_right: d2,
                                idx_right: j,
                                residual,
                            });
                        }
                    }
                }
            }
        }
        for d in 1..=n / p {
            for (i, u) in self.layers.layer(d).basis().iter().enumerate() {
                report.power_patterns_checked += 1;
                let residual = self.power_pattern_residual(ctx, u);
                if !residual.is_zero() {
                    report.power_failures.push(PowerLawFailure { degree: d, index: i, residual });
                }
            }
        }
        report
    }

    /// Difference of the two evaluation orders on the nested bracket
    /// [z₁, z₂] with z₁, z₂ injected layer elements. Both routes stay inside
    /// the truncation by construction, so evaluation cannot fail.
    fn bracket_pattern_residual(
        &self,
        ctx: TensorContext,
        u: &TensorElement,
        v: &TensorElement,
    ) -> FpVector {
        const WITHIN: &str = "law-check inputs stay within the truncation";
        // inner evaluation first: μ₀ of each nested element, then the
        // pattern on the degree-1 images
        let a = self.apply(u).expect(WITHIN);
        let b = self.apply(v).expect(WITHIN);
        let nested = TensorElement::linear(ctx, &a)
            .commutator(&TensorElement::linear(ctx, &b))
            .expect(WITHIN);
        let inner_first = self.apply(&nested).expect(WITHIN);
        // flatten first: multiply the nesting out, evaluate once
        let flattened = self.apply(&u.commutator(v).expect(WITHIN)).expect(WITHIN);
        inner_first.sub(&flattened)
    }

    /// Difference of the two evaluation orders on the nested p-th power
    /// z^{⊗p} with z an injected layer element.
    fn power_pattern_residual(&self, ctx: TensorContext, u: &TensorElement) -> FpVector {
        const WITHIN: &str = "law-check inputs stay within the truncation";
        let p = self.p.get() as usize;
        let a = self.apply(u).expect(WITHIN);
        let nested = TensorElement::linear(ctx, &a).pow(p).expect(WITHIN);
        let inner_first = self.apply(&nested).expect(WITHIN);
        let flattened = self.apply(&u.pow(p).expect(WITHIN)).expect(WITHIN);
        inner_first.sub(&flattened)
    }
}

/// Outcome of the Eilenberg–Moore law checks.
#[derive(Clone, Debug, Serialize)]
pub struct EmLawsReport {
    pub p: Prime,
    pub dim: usize,
    pub truncation: usize,
    pub unit_law_holds: bool,
    pub bracket_patterns_checked: usize,
    pub power_patterns_checked: usize,
    pub bracket_failures: Vec<BracketLawFailure>,
    pub power_failures: Vec<PowerLawFailure>,
}

impl EmLawsReport {
    pub fn passed(&self) -> bool {
        self.unit_law_holds
            && self.bracket_failures.is_empty()
            && self.power_failures.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BracketLawFailure {
    pub deg_left: usize,
    pub idx_left: usize,
    pub deg_right: usize,
    pub idx_right: usize,
    pub residual: FpVector,
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerLawFailure {
    pub degree: usize,
    pub index: usize,
    pub residual: FpVector,
}

/// Extracts the Eilenberg–Moore structure of a restricted Lie algebra: each
/// primitive layer basis element is evaluated in ũ(L) by straightening its
/// words; the result is a restricted primitive, so the unit isomorphism
/// L ≅ 𝒫ũ(L) (verified first) reads it back as an element of L.
pub fn em_object_from_lie(
    lie: &RestrictedLieAlgebra,
    truncation: usize,
    size_limit: u64,
) -> Result<EmObject, Error> {
    let env = EnvelopingAlgebra::new(lie.clone(), size_limit)?;
    let unit_iso = env.check_unit_isomorphism();
    if !unit_iso.passed() {
        return Err(Error::UnitNotIso(format!(
            "lie dim {}, primitive dim {}, singleton rank {}, {} bracket and {} p-power mismatches",
            unit_iso.lie_dim,
            unit_iso.primitive_dim,
            unit_iso.singleton_rank,
            unit_iso.bracket_mismatches.len(),
            unit_iso.pmap_mismatches.len(),
        )));
    }
    let p = lie.p();
    let n = lie.dim();
    let ctx = TensorContext::new(p, n, truncation)?;
    let layers = FreeLayers::new(ctx)?;
    let mut layer_maps = Vec::with_capacity(truncation);
    for d in 1..=truncation {
        let layer = layers.layer(d);
        let mut columns = Vec::with_capacity(layer.dim());
        for z in layer.basis() {
            let image = evaluate_in_env(&env, z)?;
            columns.push(read_back_through_unit(&env, &image)?);
        }
        let m = if columns.is_empty() {
            FpMatrix::zeros(p, n, 0)
        } else {
            FpMatrix::from_columns(p, &columns)
        };
        layer_maps.push(m);
    }
    EmObject::new(p, lie.names().to_vec(), truncation, layer_maps)
}

/// The algebra map T(L) → ũ(L) on an element written in words of basis
/// letters: straighten every word and sum.
fn evaluate_in_env(env: &EnvelopingAlgebra, z: &TensorElement) -> Result<EnvElement, Error> {
    let mut out = EnvElement::zero(env.p());
    for (w, c) in z.terms() {
        out = out.add(&env.straighten(w.letters())?.scale(c));
    }
    Ok(out)
}

/// Inverse of the unit isomorphism on a restricted primitive: the element
/// must be a combination of degree-one monomials, whose coordinates are the
/// answer.
fn read_back_through_unit(
    env: &EnvelopingAlgebra,
    image: &EnvElement,
) -> Result<FpVector, Error> {
    let n = env.lie().dim();
    let mut out = FpVector::zeros(env.p(), n);
    for (m, c) in image.terms() {
        if m.degree() != 1 {
            return Err(Error::UnitNotIso(format!(
                "evaluated primitive contains a degree-{} monomial",
                m.degree()
            )));
        }
        let i = m
            .exponents()
            .iter()
            .position(|&e| e == 1)
            .expect("degree-one monomial has one unit exponent");
        out.set(i, c);
    }
    Ok(out)
}

/// An Eilenberg–Moore object for the lifted (second-stage) monad. The second
/// structure map is forced by idempotence of the first-stage adjunction, so
/// only a witness that the laws were verified is stored alongside the object.
pub struct M2Object {
    em: EmObject,
    idempotency_witness: bool,
}

impl M2Object {
    /// Wraps an object, recording whether the algebra laws actually hold at
    /// its truncation.
    pub fn new(em: EmObject) -> M2Object {
        let idempotency_witness = em.check_em_laws().passed();
        M2Object { em, idempotency_witness }
    }

    pub fn from_lie(
        lie: &RestrictedLieAlgebra,
        truncation: usize,
        size_limit: u64,
    ) -> Result<M2Object, Error> {
        Ok(M2Object::new(em_object_from_lie(lie, truncation, size_limit)?))
    }

    pub fn em(&self) -> &EmObject {
        &self.em
    }

    pub fn witness(&self) -> bool {
        self.idempotency_witness
    }
}

/// Reads a restricted Lie algebra off an Eilenberg–Moore object: structure
/// constants from μ₀ on degree-2 commutators of generators, the p-operation
/// from μ₀ on degree-p powers. Needs truncation ≥ p so the power layer
/// exists.
pub fn lie_from_em(m2: &M2Object) -> Result<RestrictedLieAlgebra, Error> {
    let em = m2.em();
    let p = em.p();
    let pu = p.get() as usize;
    if em.truncation() < pu {
        return Err(Error::TruncationTooSmall {
            degree: em.truncation(),
            needed: pu,
        });
    }
    let ctx = em.letter_ctx();
    let n = em.dim();
    let mut upper = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let gi = TensorElement::generator(ctx, i);
            let gj = TensorElement::generator(ctx, j);
            upper.push(em.apply(&gi.commutator(&gj)?)?);
        }
    }
    let mut pmap_rows = Vec::with_capacity(n);
    for i in 0..n {
        let gi = TensorElement::generator(ctx, i);
        pmap_rows.push(em.apply(&gi.pow(pu)?)?);
    }
    RestrictedLieAlgebra::new(p, em.names().to_vec(), upper, pmap_rows)
}

/// Outcome of the round trip L → EM object → L.
#[derive(Clone, Debug, Serialize)]
pub struct RoundtripReport {
    pub p: Prime,
    pub dim: usize,
    pub truncation: usize,
    pub em_laws_hold: bool,
    pub bracket_mismatches: Vec<(usize, usize)>,
    pub pmap_mismatches: Vec<usize>,
    pub recovered_axioms: AxiomReport,
}

impl RoundtripReport {
    pub fn passed(&self) -> bool {
        self.em_laws_hold
            && self.bracket_mismatches.is_empty()
            && self.pmap_mismatches.is_empty()
            && self.recovered_axioms.passed()
    }
}

/// Extracts the Eilenberg–Moore structure of `lie`, reads a Lie algebra
/// back, and compares the two tables exactly. The recovered algebra is also
/// re-checked against the axioms (sampling with `samples`/`seed`).
pub fn roundtrip_check(
    lie: &RestrictedLieAlgebra,
    truncation: usize,
    size_limit: u64,
    samples: usize,
    seed: u64,
) -> Result<RoundtripReport, Error> {
    let m2 = M2Object::from_lie(lie, truncation, size_limit)?;
    let recovered = lie_from_em(&m2)?;
    let n = lie.dim();
    let mut bracket_mismatches = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if lie.bracket_basis(i, j) != recovered.bracket_basis(i, j) {
                bracket_mismatches.push((i, j));
            }
        }
    }
    let mut pmap_mismatches = Vec::new();
    for i in 0..n {
        if lie.pmap_basis_row(i) != recovered.pmap_basis_row(i) {
            pmap_mismatches.push(i);
        }
    }
    Ok(RoundtripReport {
        p: lie.p(),
        dim: n,
        truncation,
        em_laws_hold: m2.witness(),
        bracket_mismatches,
        pmap_mismatches,
        recovered_axioms: recovered.check_axioms(samples, seed),
    })
}

/// One degree of the sandwich: the three independently computed dimensions.
#[derive(Clone, Debug, Serialize)]
pub struct SandwichDegree {
    pub degree: usize,
    /// rank of the evaluation map T^{≤d} → ũ(L) (straightened words)
    pub rank_phi: usize,
    /// dim T^{≤d} minus the dimension spanned by the relations
    /// a·(z − ι(μ₀ z))·b of total degree ≤ d
    pub span_quotient_dim: usize,
    /// number of PBW monomials of filtration degree ≤ d (pure counting)
    pub pbw_filtration_dim: usize,
}

/// Per-degree certificate that the quotient of the tensor algebra by the
/// μ₀-relations is ũ(L): the evaluation rank is a lower bound for the true
/// quotient dimension and the spanned relations give an upper bound, so
/// agreement of the two (and of the PBW count) pins all three to the same
/// number.
#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    pub p: Prime,
    pub lie_dim: usize,
    pub truncation: usize,
    pub env_dim: usize,
    pub degrees: Vec<SandwichDegree>,
    /// layer elements z where φ(z) ≠ φ(ι(μ₀ z)) — must be empty for the
    /// quotient bound to be sound
    pub soundness_failures: Vec<(usize, usize)>,
    pub certified_up_to: usize,
}

impl SandwichReport {
    pub fn passed(&self) -> bool {
        self.soundness_failures.is_empty() && self.certified_up_to == self.truncation
    }
}

pub fn sandwich_certificate(m2: &M2Object, size_limit: u64) -> Result<SandwichReport, Error> {
    let em = m2.em();
    let p = em.p();
    let n = em.dim();
    let big_n = em.truncation();
    let lie = lie_from_em(m2)?;
    let env = EnvelopingAlgebra::new(lie, size_limit)?;
    let ctx = em.letter_ctx();

    // route one: rank of the evaluation map on T^{≤d}, word by word
    let mut rank_phi = Vec::with_capacity(big_n);
    {
        let mut ech = EchelonBasis::new(p, env.dim());
        ech.insert(env.one().coords(&env).values());
        for d in 1..=big_n {
            for w in words_of_degree(n, d) {
                let img = env.straighten(w.letters())?;
                ech.insert(img.coords(&env).values());
            }
            rank_phi.push(ech.rank());
        }
    }

    // soundness of the relation span: φ(z) = φ(ι(μ₀ z)) for every layer
    // basis element z
    let mut soundness_failures = Vec::new();
    for d in 1..=big_n {
        for (i, z) in em.layers().layer(d).basis().iter().enumerate() {
            let lhs = evaluate_in_env(&env, z)?;
            let image = em.layer_map(d).column(i);
            let rhs = env.element_from_lie(&image);
            if lhs != rhs {
                soundness_failures.push((d, i));
            }
        }
    }

    // route two: dim T^{≤d} minus the span of a·(z − ι(μ₀ z))·b with
    // deg(a) + deg(z) + deg(b) ≤ d, accumulated degree by degree. Layer-1
    // relations are identically zero (μ₀ is the identity there) and are
    // skipped.
    let ambient = (0..=big_n).map(|k| n.pow(k as u32)).sum::<usize>();
    let mut span_quotient = Vec::with_capacity(big_n);
    {
        let mut relations: Vec<(usize, TensorElement)> = Vec::new();
        for dz in 2..=big_n {
            for (i, z) in em.layers().layer(dz).basis().iter().enumerate() {
                let image = em.layer_map(dz).column(i);
                let r = z.sub(&TensorElement::linear(ctx, &image));
                relations.push((dz, r));
            }
        }
        let mut ech = EchelonBasis::new(p, ambient);
        let mut dim_t = 1usize; // the empty word
        for d in 1..=big_n {
            dim_t += n.pow(d as u32);
            for (dz, r) in &relations {
                if *dz > d {
                    continue;
                }
                let outer = d - dz;
                for da in 0..=outer {
                    let db = outer - da;
                    for a in words_of_degree(n, da) {
                        let left = TensorElement::from_word(ctx, a).concat_mul(r)?;
                        for b in words_of_degree(n, db) {
                            let prod =
                                left.concat_mul(&TensorElement::from_word(ctx, b))?;
                            ech.insert(prod.coords_truncated(big_n).values());
                        }
                    }
                }
            }
            span_quotient.push(dim_t - ech.rank());
        }
    }

    // route three: count PBW monomials of exponent sum ≤ d — no linear
    // algebra, no rewriting
    let mut degree_histogram = vec![0usize; n * (p.get() as usize - 1) + 1];
    for idx in 0..env.dim() {
        degree_histogram[env.monomial_from_index(idx).degree()] += 1;
    }
    let pbw_counts: Vec<usize> = (1..=big_n)
        .map(|d| degree_histogram.iter().take(d.min(degree_histogram.len() - 1) + 1).sum())
        .collect();

    let degrees: Vec<SandwichDegree> = (1..=big_n)
        .map(|d| SandwichDegree {
            degree: d,
            rank_phi: rank_phi[d - 1],
            span_quotient_dim: span_quotient[d - 1],
            pbw_filtration_dim: pbw_counts[d - 1],
        })
        .collect();
    let certified_up_to = degrees
        .iter()
        .take_while(|t| {
            t.rank_phi == t.span_quotient_dim && t.rank_phi == t.pbw_filtration_dim
        })
        .count();

    Ok(SandwichReport {
        p,
        lie_dim: n,
        truncation: big_n,
        env_dim: env.dim(),
        degrees,
        soundness_failures,
        certified_up_to,
    })
}

/// Outcome of checking that a linear map V₀ → V₀′ is a morphism of
/// Eilenberg–Moore objects, and that it therefore intertwines the induced
/// brackets and p-operations.
#[derive(Clone, Debug, Serialize)]
pub struct EmMorphismReport {
    pub source_dim: usize,
    pub target_dim: usize,
    pub truncation: usize,
    pub layers_checked: usize,
    /// (degree, index) of source layer elements where f∘μ₀ ≠ μ₀′∘f
    pub commuting_failures: Vec<(usize, usize)>,
    /// basis pairs (i, j) where f([eᵢ,eⱼ]) ≠ [f(eᵢ), f(eⱼ)]′
    pub bracket_failures: Vec<(usize, usize)>,
    /// basis indices where f(eᵢ^[p]) ≠ f(eᵢ)^[p]′
    pub pmap_failures: Vec<usize>,
}

impl EmMorphismReport {
    pub fn passed(&self) -> bool {
        self.commuting_failures.is_empty()
            && self.bracket_failures.is_empty()
            && self.pmap_failures.is_empty()
    }
}

/// Checks that `map` (target-dim × source-dim) commutes with μ₀ degreewise,
/// and that it consequently preserves the induced bracket and p-operation.
pub fn check_em_morphism(
    source: &EmObject,
    target: &EmObject,
    map: &FpMatrix,
) -> Result<EmMorphismReport, Error> {
    if source.p() != target.p() {
        return Err(Error::MixedContext(format!(
            "objects over F_{} and F_{}",
            source.p(),
            target.p()
        )));
    }
    if source.truncation() != target.truncation() {
        return Err(Error::DimensionMismatch(format!(
            "truncations {} and {} differ",
            source.truncation(),
            target.truncation()
        )));
    }
    if map.rows() != target.dim() || map.cols() != source.dim() {
        return Err(Error::DimensionMismatch(format!(
            "map is {}x{}, expected {}x{}",
            map.rows(),
            map.cols(),
            target.dim(),
            source.dim()
        )));
    }
    let n = source.truncation();
    let p = source.p().get() as usize;
    let images: Vec<FpVector> = (0..source.dim()).map(|i| map.column(i)).collect();
    let tctx = target.letter_ctx();

    let mut report = EmMorphismReport {
        source_dim: source.dim(),
        target_dim: target.dim(),
        truncation: n,
        layers_checked: 0,
        commuting_failures: Vec::new(),
        bracket_failures: Vec::new(),
        pmap_failures: Vec::new(),
    };

    for d in 1..=n {
        report.layers_checked += 1;
        for (i, z) in source.layers().layer(d).basis().iter().enumerate() {
            let lhs = map.mul_vec(&source.apply(z)?);
            let pushed = z.substitute(tctx, &images)?;
            let rhs = target.apply(&pushed)?;
            if lhs != rhs {
                report.commuting_failures.push((d, i));
            }
        }
    }

    let sctx = source.letter_ctx();
    for i in 0..source.dim() {
        for j in 0..source.dim() {
            let gi = TensorElement::generator(sctx, i);
            let gj = TensorElement::generator(sctx, j);
            let lhs = map.mul_vec(&source.apply(&gi.commutator(&gj)?)?);
            let fi = TensorElement::linear(tctx, &images[i]);
            let fj = TensorElement::linear(tctx, &images[j]);
            let rhs = target.apply(&fi.commutator(&fj)?)?;
            if lhs != rhs && !report.bracket_failures.contains(&(i, j)) {
                report.bracket_failures.push((i, j));
            }
        }
        if n >= p {
            let gi = TensorElement::generator(sctx, i);
            let lhs = map.mul_vec(&source.apply(&gi.pow(p)?)?);
            let fi = TensorElement::linear(tctx, &images[i]);
            let rhs = target.apply(&fi.pow(p)?)?;
            if lhs != rhs {
                report.pmap_failures.push(i);
            }
        }
    }

    Ok(report)
}
