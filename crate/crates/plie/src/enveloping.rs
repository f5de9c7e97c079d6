//! The restricted universal enveloping bialgebra ũ(L) in PBW normal form.
//!
//! For a restricted Lie algebra L of dimension n over F_p, ũ(L) has the
//! monomials e_0^{a_0} ⋯ e_{n-1}^{a_{n-1}} with 0 ≤ a_i < p as a basis, so
//! dim ũ(L) = p^n. Arbitrary products are rewritten into this normal form by
//! [`EnvelopingAlgebra::straighten`], which repeatedly applies
//!
//! * the commutation rule e_a e_b = e_b e_a + [e_a, e_b] at the leftmost
//!   out-of-order adjacent pair, and
//! * the p-th power rule e_g^p = e_g^[p] at the leftmost run of p equal
//!   letters once the word is sorted.
//!
//! Both rules strictly decrease (word length, inversion count) in
//! lexicographic order, so the rewriting terminates; results are memoized
//! per word. The coalgebra structure is determined by declaring the
//! generators primitive: Δ(e_i) = e_i ⊗ 1 + 1 ⊗ e_i, extended as an algebra
//! map. An element x is a restricted primitive when Δ(x) = x ⊗ 1 + 1 ⊗ x;
//! [`EnvelopingAlgebra::restricted_primitives`] computes the space of all of
//! them as an exact kernel, and [`EnvelopingAlgebra::check_unit_isomorphism`]
//! verifies that the inclusion of L into ũ(L) identifies L with that space,
//! bracket and p-operation included.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use serde::Serialize;

use crate::error::Error;
use crate::fp::{Fp, FpMatrix, FpVector, Prime, SpanSolver};
use crate::lie::RestrictedLieAlgebra;

/// A PBW basis monomial, stored as its exponent vector (one entry per
/// generator, each in 0..p). Ordered by total degree, then lexicographically.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PbwMonomial(Vec<u8>);

impl PbwMonomial {
    pub fn unit(n: usize) -> PbwMonomial {
        PbwMonomial(vec![0; n])
    }

    pub fn from_exponents(exps: Vec<u8>) -> PbwMonomial {
        PbwMonomial(exps)
    }

    pub fn exponents(&self) -> &[u8] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// The sorted word realizing this monomial: letter i repeated a_i times.
    pub fn word(&self) -> Vec<u8> {
        let mut w = Vec::with_capacity(self.degree());
        for (i, &e) in self.0.iter().enumerate() {
            for _ in 0..e {
                w.push(i as u8);
            }
        }
        w
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.is_unit() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        for (i, &e) in self.0.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(names[i].clone()),
                _ => parts.push(format!("{}^{}", names[i], e)),
            }
        }
        parts.join("*")
    }
}

impl PartialOrd for PbwMonomial {
    fn partial_cmp(&self, other: &PbwMonomial) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PbwMonomial {
    fn cmp(&self, other: &PbwMonomial) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// An element of ũ(L): an exact linear combination of PBW monomials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EnvElement {
    p: Prime,
    terms: BTreeMap<PbwMonomial, u64>,
}

impl EnvElement {
    pub fn zero(p: Prime) -> EnvElement {
        EnvElement { p, terms: BTreeMap::new() }
    }

    pub fn monomial(p: Prime, mono: PbwMonomial) -> EnvElement {
        let mut e = EnvElement::zero(p);
        e.add_term(mono, Fp::from_u64(1, p));
        e
    }

    pub fn modulus(&self) -> Prime {
        self.p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PbwMonomial, Fp)> {
        self.terms.iter().map(|(m, &c)| (m, Fp::from_u64(c, self.p)))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, mono: &PbwMonomial) -> Fp {
        Fp::from_u64(self.terms.get(mono).copied().unwrap_or(0), self.p)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, mono: PbwMonomial, c: Fp) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = Fp::from_u64(*o.get(), self.p) + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum.value();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.value());
            }
        }
    }

    pub fn add(&self, other: &EnvElement) -> EnvElement {
        assert_eq!(self.p, other.p, "mixed moduli");
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), Fp::from_u64(c, self.p));
        }
        out
    }

    pub fn sub(&self, other: &EnvElement) -> EnvElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> EnvElement {
        self.scale(Fp::new(-1, self.p))
    }

    pub fn scale(&self, c: Fp) -> EnvElement {
        let mut out = EnvElement::zero(self.p);
        for (m, &v) in &self.terms {
            out.add_term(m.clone(), Fp::from_u64(v, self.p) * c);
        }
        out
    }

    /// Coordinates in the full PBW basis of the given enveloping algebra.
    pub fn coords(&self, env: &EnvelopingAlgebra) -> FpVector {
        let mut v = FpVector::zeros(self.p, env.dim());
        for (m, &c) in &self.terms {
            v.set(env.monomial_index(m), Fp::from_u64(c, self.p));
        }
        v
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (m, &c) in &self.terms {
            let mono = m.render(names);
            if c == 1 && !m.is_unit() {
                parts.push(mono);
            } else if m.is_unit() {
                parts.push(format!("{c}"));
            } else {
                parts.push(format!("{c}*{mono}"));
            }
        }
        parts.join(" + ")
    }
}

/// An element of ũ(L) ⊗ ũ(L), indexed by pairs of PBW monomials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EnvSquareElement {
    p: Prime,
    n: usize,
    terms: BTreeMap<(PbwMonomial, PbwMonomial), u64>,
}

impl EnvSquareElement {
    pub fn zero(p: Prime, n: usize) -> EnvSquareElement {
        EnvSquareElement { p, n, terms: BTreeMap::new() }
    }

    pub fn unit(p: Prime, n: usize) -> EnvSquareElement {
        let mut e = EnvSquareElement::zero(p, n);
        e.add_term(PbwMonomial::unit(n), PbwMonomial::unit(n), Fp::from_u64(1, p));
        e
    }

    /// x ⊗ y for plain elements x, y.
    pub fn tensor(x: &EnvElement, y: &EnvElement, n: usize) -> EnvSquareElement {
        assert_eq!(x.p, y.p, "mixed moduli");
        let mut out = EnvSquareElement::zero(x.p, n);
        for (mx, cx) in x.terms() {
            for (my, cy) in y.terms() {
                out.add_term(mx.clone(), my.clone(), cx * cy);
            }
        }
        out
    }

    fn add_term(&mut self, left: PbwMonomial, right: PbwMonomial, c: Fp) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((left, right)) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = Fp::from_u64(*o.get(), self.p) + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum.value();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.value());
            }
        }
    }

    pub fn add(&self, other: &EnvSquareElement) -> EnvSquareElement {
        assert_eq!(self.p, other.p, "mixed moduli");
        let mut out = self.clone();
        for ((l, r), &c) in &other.terms {
            out.add_term(l.clone(), r.clone(), Fp::from_u64(c, self.p));
        }
        out
    }

    pub fn sub(&self, other: &EnvSquareElement) -> EnvSquareElement {
        let mut out = self.clone();
        for ((l, r), &c) in &other.terms {
            out.add_term(l.clone(), r.clone(), -Fp::from_u64(c, self.p));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(PbwMonomial, PbwMonomial), Fp)> {
        self.terms.iter().map(|(k, &c)| (k, Fp::from_u64(c, self.p)))
    }

    /// Componentwise product (x⊗y)(z⊗w) = xz ⊗ yw.
    pub fn mul(&self, other: &EnvSquareElement, env: &EnvelopingAlgebra) -> Result<EnvSquareElement, Error> {
        let mut out = EnvSquareElement::zero(self.p, self.n);
        for ((l1, r1), c1) in self.terms() {
            for ((l2, r2), c2) in other.terms() {
                let mut lword = l1.word();
                lword.extend_from_slice(&l2.word());
                let mut rword = r1.word();
                rword.extend_from_slice(&r2.word());
                let left = env.straighten(&lword)?;
                let right = env.straighten(&rword)?;
                let c = c1 * c2;
                for (ml, cl) in left.terms() {
                    for (mr, cr) in right.terms() {
                        out.add_term(ml.clone(), mr.clone(), c * cl * cr);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Multiply on the right by e_i ⊗ 1 + 1 ⊗ e_i.
    fn mul_primitive_generator(
        &self,
        env: &EnvelopingAlgebra,
        i: usize,
    ) -> Result<EnvSquareElement, Error> {
        let mut out = EnvSquareElement::zero(self.p, self.n);
        for ((l, r), c) in self.terms() {
            let mut lword = l.word();
            lword.push(i as u8);
            for (m, cm) in env.straighten(&lword)?.terms() {
                out.add_term(m.clone(), r.clone(), c * cm);
            }
            let mut rword = r.word();
            rword.push(i as u8);
            for (m, cm) in env.straighten(&rword)?.terms() {
                out.add_term(l.clone(), m.clone(), c * cm);
            }
        }
        Ok(out)
    }
}

/// ũ(L) with a memoized straightening rewriter.
#[derive(Debug)]
pub struct EnvelopingAlgebra {
    lie: RestrictedLieAlgebra,
    dim: usize,
    cache: Mutex<HashMap<Vec<u8>, EnvElement>>,
}

impl EnvelopingAlgebra {
    /// Wraps a restricted Lie algebra, refusing when p^dim(L) exceeds
    /// `size_limit` (the PBW basis of ũ(L) has p^dim(L) elements and several
    /// operations enumerate it).
    pub fn new(lie: RestrictedLieAlgebra, size_limit: u64) -> Result<EnvelopingAlgebra, Error> {
        let p = lie.p().get();
        let n = lie.dim();
        let mut dim: u128 = 1;
        for _ in 0..n {
            dim = dim.saturating_mul(p as u128);
        }
        if dim > size_limit as u128 {
            return Err(Error::SizeBound { p, n, dim, limit: size_limit as u128 });
        }
        Ok(EnvelopingAlgebra {
            lie,
            dim: dim as usize,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn lie(&self) -> &RestrictedLieAlgebra {
        &self.lie
    }

    pub fn p(&self) -> Prime {
        self.lie.p()
    }

    /// Dimension of ũ(L) as an F_p vector space: p^dim(L).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn one(&self) -> EnvElement {
        EnvElement::monomial(self.p(), PbwMonomial::unit(self.lie.dim()))
    }

    pub fn singleton(&self, i: usize) -> EnvElement {
        let mut exps = vec![0u8; self.lie.dim()];
        exps[i] = 1;
        EnvElement::monomial(self.p(), PbwMonomial::from_exponents(exps))
    }

    /// The image of a Lie element under the canonical inclusion L → ũ(L).
    pub fn element_from_lie(&self, x: &FpVector) -> EnvElement {
        assert_eq!(x.len(), self.lie.dim(), "element length");
        let mut out = EnvElement::zero(self.p());
        for i in 0..x.len() {
            let c = x.get(i);
            if !c.is_zero() {
                out = out.add(&self.singleton(i).scale(c));
            }
        }
        out
    }

    /// Little-endian index of a PBW monomial: Σ a_i p^i.
    pub fn monomial_index(&self, mono: &PbwMonomial) -> usize {
        let p = self.p().get() as usize;
        let mut idx = 0usize;
        let mut stride = 1usize;
        for &e in mono.exponents() {
            idx += e as usize * stride;
            stride *= p;
        }
        idx
    }

    pub fn monomial_from_index(&self, mut idx: usize) -> PbwMonomial {
        let p = self.p().get() as usize;
        let mut exps = vec![0u8; self.lie.dim()];
        for slot in exps.iter_mut() {
            *slot = (idx % p) as u8;
            idx /= p;
        }
        debug_assert_eq!(idx, 0, "index out of range");
        PbwMonomial::from_exponents(exps)
    }

    /// Rewrites the product of the generators named by `word` (indices into
    /// the Lie basis, left to right) into PBW normal form.
    pub fn straighten(&self, word: &[u8]) -> Result<EnvElement, Error> {
        let n = self.lie.dim();
        if let Some(&bad) = word.iter().find(|&&l| l as usize >= n) {
            return Err(Error::DimensionMismatch(format!(
                "letter {bad} out of range for dimension {n}"
            )));
        }
        Ok(self.straighten_checked(word))
    }

    fn straighten_checked(&self, word: &[u8]) -> EnvElement {
        if let Some(hit) = self.cache.lock().expect("cache lock").get(word) {
            return hit.clone();
        }
        let result = self.straighten_step(word);
        self.cache
            .lock()
            .expect("cache lock")
            .insert(word.to_vec(), result.clone());
        result
    }

    fn straighten_step(&self, word: &[u8]) -> EnvElement {
        let p = self.p();
        // leftmost out-of-order adjacent pair: commute it
        for i in 0..word.len().saturating_sub(1) {
            let (a, b) = (word[i], word[i + 1]);
            if a > b {
                let mut swapped = word.to_vec();
                swapped.swap(i, i + 1);
                let mut acc = self.straighten_checked(&swapped);
                let bracket = self.lie.bracket_basis(a as usize, b as usize);
                for k in 0..bracket.len() {
                    let c = bracket.get(k);
                    if c.is_zero() {
                        continue;
                    }
                    let mut contracted = Vec::with_capacity(word.len() - 1);
                    contracted.extend_from_slice(&word[..i]);
                    contracted.push(k as u8);
                    contracted.extend_from_slice(&word[i + 2..]);
                    acc = acc.add(&self.straighten_checked(&contracted).scale(c));
                }
                return acc;
            }
        }
        // sorted: leftmost run of p equal letters collapses via the
        // p-operation table
        let pu = p.get() as usize;
        let mut start = 0;
        while start < word.len() {
            let letter = word[start];
            let mut end = start + 1;
            while end < word.len() && word[end] == letter {
                end += 1;
            }
            if end - start >= pu {
                let row = self.lie.pmap_basis_row(letter as usize);
                let mut acc = EnvElement::zero(p);
                for k in 0..row.len() {
                    let t = row.get(k);
                    if t.is_zero() {
                        continue;
                    }
                    let mut contracted = Vec::with_capacity(word.len() - pu + 1);
                    contracted.extend_from_slice(&word[..start]);
                    contracted.push(k as u8);
                    contracted.extend_from_slice(&word[start + pu..]);
                    acc = acc.add(&self.straighten_checked(&contracted).scale(t));
                }
                return acc;
            }
            start = end;
        }
        // sorted with all runs shorter than p: a basis monomial
        let mut exps = vec![0u8; self.lie.dim()];
        for &l in word {
            exps[l as usize] += 1;
        }
        EnvElement::monomial(p, PbwMonomial::from_exponents(exps))
    }

    fn validate(&self, x: &EnvElement) -> Result<(), Error> {
        if x.p != self.p() {
            return Err(Error::MixedContext(format!(
                "element over F_{} in an algebra over F_{}",
                x.p,
                self.p()
            )));
        }
        let n = self.lie.dim();
        for (m, _) in x.terms() {
            if m.exponents().len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "monomial over {} generators, expected {n}",
                    m.exponents().len()
                )));
            }
            if m.exponents().iter().any(|&e| e as u64 >= self.p().get()) {
                return Err(Error::DimensionMismatch(
                    "monomial exponent at or above p".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn env_mul(&self, x: &EnvElement, y: &EnvElement) -> Result<EnvElement, Error> {
        self.validate(x)?;
        self.validate(y)?;
        let mut out = EnvElement::zero(self.p());
        for (mx, cx) in x.terms() {
            for (my, cy) in y.terms() {
                let mut word = mx.word();
                word.extend_from_slice(&my.word());
                out = out.add(&self.straighten_checked(&word).scale(cx * cy));
            }
        }
        Ok(out)
    }

    pub fn env_pow(&self, x: &EnvElement, k: u64) -> Result<EnvElement, Error> {
        let mut out = self.one();
        for _ in 0..k {
            out = self.env_mul(&out, x)?;
        }
        Ok(out)
    }

    pub fn commutator(&self, x: &EnvElement, y: &EnvElement) -> Result<EnvElement, Error> {
        Ok(self.env_mul(x, y)?.sub(&self.env_mul(y, x)?))
    }

    /// Δ(x), computed per monomial as Π_i (e_i ⊗ 1 + 1 ⊗ e_i)^{a_i}.
    pub fn coproduct(&self, x: &EnvElement) -> Result<EnvSquareElement, Error> {
        self.validate(x)?;
        let n = self.lie.dim();
        let mut out = EnvSquareElement::zero(self.p(), n);
        for (m, c) in x.terms() {
            let mut acc = EnvSquareElement::unit(self.p(), n);
            for (i, &e) in m.exponents().iter().enumerate() {
                for _ in 0..e {
                    acc = acc.mul_primitive_generator(self, i)?;
                }
            }
            let mut scaled = EnvSquareElement::zero(self.p(), n);
            for ((l, r), v) in acc.terms() {
                scaled.add_term(l.clone(), r.clone(), v * c);
            }
            out = out.add(&scaled);
        }
        Ok(out)
    }

    /// Δ(x) − x ⊗ 1 − 1 ⊗ x; zero exactly when x is a restricted primitive.
    pub fn primitivity_defect(&self, x: &EnvElement) -> Result<EnvSquareElement, Error> {
        let n = self.lie.dim();
        let delta = self.coproduct(x)?;
        let left = EnvSquareElement::tensor(x, &self.one(), n);
        let right = EnvSquareElement::tensor(&self.one(), x, n);
        Ok(delta.sub(&left).sub(&right))
    }

    /// The space of restricted primitives, with its induced bracket and
    /// p-operation tables. The defect rows of all p^n basis monomials are
    /// assembled into one exact linear system; its kernel is the space.
    pub fn restricted_primitives(&self) -> RestrictedPrimitiveSpace {
        let p = self.p();
        let dim = self.dim;
        // Sparse assembly: most (left, right) monomial pairs never occur, so
        // only rows that are touched become rows of the matrix.
        let mut row_of_pair: BTreeMap<usize, usize> = BTreeMap::new();
        let mut entries: Vec<(usize, usize, Fp)> = Vec::new();
        for a in 0..dim {
            let x = EnvElement::monomial(p, self.monomial_from_index(a));
            let defect = self
                .primitivity_defect(&x)
                .expect("basis monomials are valid");
            for ((l, r), c) in defect.terms() {
                let pair = self.monomial_index(l) * dim + self.monomial_index(r);
                let next = row_of_pair.len();
                let row = *row_of_pair.entry(pair).or_insert(next);
                entries.push((row, a, c));
            }
        }
        let rows = row_of_pair.len().max(1);
        let mut m = FpMatrix::zeros(p, rows, dim);
        for (r, c, v) in entries {
            m.set(r, c, v);
        }
        let kernel = m.kernel_basis();
        let basis: Vec<EnvElement> = kernel
            .iter()
            .map(|v| {
                let mut e = EnvElement::zero(p);
                for idx in 0..dim {
                    let c = v.get(idx);
                    if !c.is_zero() {
                        e.add_term(self.monomial_from_index(idx), c);
                    }
                }
                e
            })
            .collect();
        let solver = SpanSolver::new(p, dim, &kernel);
        let k = basis.len();
        let mut defects = Vec::new();
        let mut bracket_table = vec![vec![FpVector::zeros(p, k); k]; k];
        let mut pmap_table = vec![FpVector::zeros(p, k); k];
        for i in 0..k {
            for j in 0..k {
                let comm = self
                    .commutator(&basis[i], &basis[j])
                    .expect("kernel vectors are valid");
                match solver.express(&comm.coords(self)) {
                    Some(coords) => bracket_table[i][j] = coords,
                    None => defects.push(format!(
                        "commutator of primitives {i} and {j} left the primitive span"
                    )),
                }
            }
            let power = self
                .env_pow(&basis[i], p.get())
                .expect("kernel vectors are valid");
            match solver.express(&power.coords(self)) {
                Some(coords) => pmap_table[i] = coords,
                None => defects.push(format!(
                    "p-th power of primitive {i} left the primitive span"
                )),
            }
        }
        RestrictedPrimitiveSpace {
            p,
            ambient_dim: dim,
            basis,
            solver,
            bracket_table,
            pmap_table,
            defects,
        }
    }

    /// Verifies that L → ũ(L) is an isomorphism onto the restricted
    /// primitives: every basis element lands in the primitive space, the
    /// images are independent and exhaust it, and bracket and p-operation
    /// match on both sides (as exact identities between straightened
    /// elements).
    pub fn check_unit_isomorphism(&self) -> UnitIsoReport {
        let space = self.restricted_primitives();
        let n = self.lie.dim();
        let p = self.p();
        let mut missing = Vec::new();
        let mut image_rows = Vec::new();
        for k in 0..n {
            match space.solver.express(&self.singleton(k).coords(self)) {
                Some(coords) => image_rows.push(coords),
                None => missing.push(k),
            }
        }
        let singleton_rank = if image_rows.is_empty() {
            0
        } else {
            FpMatrix::from_rows(p, &image_rows).rank()
        };

        let mut bracket_mismatches = Vec::new();
        let mut pmap_mismatches = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let lhs = self
                    .commutator(&self.singleton(i), &self.singleton(j))
                    .expect("singletons are valid");
                let rhs = self.element_from_lie(
                    &self
                        .lie
                        .bracket(&self.lie.basis_vector(i), &self.lie.basis_vector(j))
                        .expect("dimensions agree"),
                );
                if lhs != rhs {
                    bracket_mismatches.push((i, j));
                }
            }
            let lhs = self
                .env_pow(&self.singleton(i), p.get())
                .expect("singletons are valid");
            let rhs = self.element_from_lie(self.lie.pmap_basis_row(i));
            if lhs != rhs {
                pmap_mismatches.push(i);
            }
        }

        UnitIsoReport {
            lie_dim: n,
            primitive_dim: space.dim(),
            singleton_rank,
            missing_singletons: missing,
            bracket_mismatches,
            pmap_mismatches,
            closure_defects: space.defects.clone(),
        }
    }
}

/// The restricted primitives of ũ(L), with the bracket and p-operation they
/// inherit from the ambient algebra (xy − yx and x^p), expressed in the
/// computed primitive basis.
pub struct RestrictedPrimitiveSpace {
    pub p: Prime,
    pub ambient_dim: usize,
    pub basis: Vec<EnvElement>,
    pub solver: SpanSolver,
    pub bracket_table: Vec<Vec<FpVector>>,
    pub pmap_table: Vec<FpVector>,
    pub defects: Vec<String>,
}

impl RestrictedPrimitiveSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Packages the inherited tables as a restricted Lie algebra in their
    /// own right. Fails when a commutator or p-th power escaped the span.
    pub fn as_lie_algebra(&self, names: Vec<String>) -> Result<RestrictedLieAlgebra, Error> {
        if !self.defects.is_empty() {
            return Err(Error::UnitNotIso(format!(
                "primitive space is not closed: {}",
                self.defects.join("; ")
            )));
        }
        let k = self.dim();
        let mut upper = Vec::with_capacity(k * (k - 1) / 2);
        for i in 0..k {
            for j in (i + 1)..k {
                upper.push(self.bracket_table[i][j].clone());
            }
        }
        RestrictedLieAlgebra::new(self.p, names, upper, self.pmap_table.clone())
    }
}

/// Outcome of the unit-isomorphism check; pass means L sits inside ũ(L) as
/// exactly the restricted primitives, structure included.
#[derive(Clone, Debug, Serialize)]
pub struct UnitIsoReport {
    pub lie_dim: usize,
    pub primitive_dim: usize,
    pub singleton_rank: usize,
    pub missing_singletons: Vec<usize>,
    pub bracket_mismatches: Vec<(usize, usize)>,
    pub pmap_mismatches: Vec<usize>,
    pub closure_defects: Vec<String>,
}

impl UnitIsoReport {
    pub fn passed(&self) -> bool {
        self.missing_singletons.is_empty()
            && self.singleton_rank == self.lie_dim
            && self.primitive_dim == self.lie_dim
            && self.bracket_mismatches.is_empty()
            && self.pmap_mismatches.is_empty()
            && self.closure_defects.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::fixtures::{abelian_dim1, algebra, heisenberg, sl2_p5};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn env(l: RestrictedLieAlgebra) -> EnvelopingAlgebra {
        EnvelopingAlgebra::new(l, 3125).unwrap()
    }

    fn mono(e: &EnvelopingAlgebra, exps: &[u8]) -> EnvElement {
        EnvElement::monomial(e.p(), PbwMonomial::from_exponents(exps.to_vec()))
    }

    #[test]
    fn size_limit_is_enforced() {
        let l = heisenberg(5); // 5^3 = 125
        assert!(matches!(
            EnvelopingAlgebra::new(l.clone(), 100),
            Err(Error::SizeBound { p: 5, n: 3, .. })
        ));
        assert!(EnvelopingAlgebra::new(l, 125).is_ok());
    }

    #[test]
    fn monomial_index_roundtrip() {
        let e = env(heisenberg(3));
        assert_eq!(e.dim(), 27);
        for idx in 0..27 {
            let m = e.monomial_from_index(idx);
            assert_eq!(e.monomial_index(&m), idx);
            assert!(m.exponents().iter().all(|&x| x < 3));
        }
    }

    #[test]
    fn straighten_fixes_normal_forms() {
        let e = env(heisenberg(3));
        // already-sorted words with small runs are monomials
        assert_eq!(e.straighten(&[0, 1]).unwrap(), mono(&e, &[1, 1, 0]));
        assert_eq!(e.straighten(&[0, 0, 2]).unwrap(), mono(&e, &[2, 0, 1]));
        assert_eq!(e.straighten(&[]).unwrap(), e.one());
    }

    #[test]
    fn straighten_commutes_one_inversion() {
        // yx = xy - z; over F_2 that is xy + z, over F_3 it is xy + 2z
        let e2 = env(heisenberg(2));
        let expect2 = mono(&e2, &[1, 1, 0]).add(&mono(&e2, &[0, 0, 1]));
        assert_eq!(e2.straighten(&[1, 0]).unwrap(), expect2);

        let e3 = env(heisenberg(3));
        let z = mono(&e3, &[0, 0, 1]);
        let expect3 = mono(&e3, &[1, 1, 0]).add(&z.scale(Fp::new(-1, e3.p())));
        assert_eq!(e3.straighten(&[1, 0]).unwrap(), expect3);
    }

    #[test]
    fn p_runs_collapse_through_the_p_operation() {
        // trivial p-operation: x^2 = 0 in ũ over F_2
        let e = env(heisenberg(2));
        assert!(e.straighten(&[0, 0]).unwrap().is_zero());
        // x^[2] = x: the run becomes the singleton again
        let e = env(abelian_dim1(2, 1));
        let x = e.singleton(0);
        assert_eq!(e.env_mul(&x, &x).unwrap(), x);
        // and x^[5] = 3x over F_5
        let e = env(abelian_dim1(5, 3));
        let x = e.singleton(0);
        assert_eq!(
            e.env_pow(&x, 5).unwrap(),
            x.scale(Fp::new(3, e.p()))
        );
    }

    #[test]
    fn letters_out_of_range_are_rejected() {
        let e = env(heisenberg(2));
        assert!(matches!(
            e.straighten(&[0, 3]),
            Err(Error::DimensionMismatch(_))
        ));
        let bad = mono(&e, &[1, 1]); // wrong number of generators
        assert!(matches!(
            e.env_mul(&bad, &bad),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn multiplication_is_associative_on_all_basis_monomials() {
        for l in [heisenberg(2), heisenberg(3)] {
            let e = env(l);
            let monos: Vec<EnvElement> = (0..e.dim())
                .map(|i| EnvElement::monomial(e.p(), e.monomial_from_index(i)))
                .collect();
            for a in &monos {
                for b in &monos {
                    let ab = e.env_mul(a, b).unwrap();
                    for c in &monos {
                        let bc = e.env_mul(b, c).unwrap();
                        assert_eq!(
                            e.env_mul(&ab, c).unwrap(),
                            e.env_mul(a, &bc).unwrap()
                        );
                    }
                }
            }
        }
    }

    fn random_element(e: &EnvelopingAlgebra, rng: &mut ChaCha8Rng) -> EnvElement {
        let mut out = EnvElement::zero(e.p());
        for _ in 0..4 {
            let idx = rng.gen_range(0..e.dim());
            let c = rng.gen_range(0..e.p().get());
            out = out.add(
                &EnvElement::monomial(e.p(), e.monomial_from_index(idx))
                    .scale(Fp::from_u64(c, e.p())),
            );
        }
        out
    }

    #[test]
    fn multiplication_is_associative_on_seeded_elements() {
        let e = env(sl2_p5());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..8 {
            let a = random_element(&e, &mut rng);
            let b = random_element(&e, &mut rng);
            let c = random_element(&e, &mut rng);
            let lhs = e.env_mul(&e.env_mul(&a, &b).unwrap(), &c).unwrap();
            let rhs = e.env_mul(&a, &e.env_mul(&b, &c).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn unit_laws_hold() {
        let e = env(sl2_p5());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let a = random_element(&e, &mut rng);
            assert_eq!(e.env_mul(&e.one(), &a).unwrap(), a);
            assert_eq!(e.env_mul(&a, &e.one()).unwrap(), a);
        }
    }

    #[test]
    fn generators_are_primitive() {
        let e = env(heisenberg(2));
        for i in 0..3 {
            assert!(e.primitivity_defect(&e.singleton(i)).unwrap().is_zero());
        }
        // the unit is not primitive: its defect is -1⊗1
        let defect = e.primitivity_defect(&e.one()).unwrap();
        assert_eq!(defect.term_count(), 1);
    }

    #[test]
    fn coproduct_of_a_square_is_binomial() {
        // Δ(x²) = x²⊗1 + 2 x⊗x + 1⊗x² over F_3
        let e = env(abelian_dim1(3, 0));
        let x2 = mono(&e, &[2]);
        let delta = e.coproduct(&x2).unwrap();
        let p = e.p();
        let unit = PbwMonomial::unit(1);
        let x = PbwMonomial::from_exponents(vec![1]);
        let xx = PbwMonomial::from_exponents(vec![2]);
        let mut expect = EnvSquareElement::zero(p, 1);
        expect.add_term(xx.clone(), unit.clone(), Fp::new(1, p));
        expect.add_term(x.clone(), x.clone(), Fp::new(2, p));
        expect.add_term(unit, xx, Fp::new(1, p));
        assert_eq!(delta, expect);
    }

    #[test]
    fn coproduct_is_an_algebra_map() {
        let e = env(heisenberg(3));
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..6 {
            let a = random_element(&e, &mut rng);
            let b = random_element(&e, &mut rng);
            let lhs = e.coproduct(&e.env_mul(&a, &b).unwrap()).unwrap();
            let rhs = e
                .coproduct(&a)
                .unwrap()
                .mul(&e.coproduct(&b).unwrap(), &e)
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn frobenius_rule_for_commuting_sums() {
        // abelian rank 2 with x^[3] = y, y^[3] = 0: (x+y)^3 = x^3 + y^3 = y
        let l = algebra(3, &["x", "y"], &[], &[(0, &[(1, 1)])]);
        let e = env(l);
        let x = e.singleton(0);
        let y = e.singleton(1);
        let sum_cubed = e.env_pow(&x.add(&y), 3).unwrap();
        assert_eq!(sum_cubed, y);
    }

    #[test]
    fn heisenberg_primitive_space_is_the_lie_algebra() {
        let e = env(heisenberg(2));
        let space = e.restricted_primitives();
        assert_eq!(e.dim(), 8);
        assert_eq!(space.dim(), 3);
        assert!(space.defects.is_empty());
        for b in &space.basis {
            assert!(e.primitivity_defect(b).unwrap().is_zero());
        }
        let recovered = space
            .as_lie_algebra(vec!["a".into(), "b".into(), "c".into()])
            .unwrap();
        assert!(recovered.check_axioms(50, 0).passed());
    }

    #[test]
    fn unit_isomorphism_holds_for_good_algebras() {
        for l in [heisenberg(2), heisenberg(3), abelian_dim1(2, 1), abelian_dim1(3, 0)] {
            let e = env(l);
            let report = e.check_unit_isomorphism();
            assert!(report.passed(), "{report:?}");
        }
    }

    #[test]
    fn unit_isomorphism_holds_for_sl2() {
        let e = env(sl2_p5());
        let report = e.check_unit_isomorphism();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.primitive_dim, 3);
    }

    #[test]
    fn rendering_is_readable() {
        let e = env(heisenberg(2));
        let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let el = mono(&e, &[1, 1, 0]).add(&mono(&e, &[0, 0, 1]));
        assert_eq!(el.render(&names), "z + x*y");
        assert_eq!(e.one().render(&names), "1");
        assert_eq!(EnvElement::zero(e.p()).render(&names), "0");
        let sq = mono(&env(heisenberg(3)), &[2, 0, 1]);
        assert_eq!(sq.render(&names), "x^2*z");
    }
}
