//! The degree-truncated tensor algebra on a finite generating set, with its
//! bialgebra structure and a solver for primitive elements.
//!
//! Words in the generators form a basis. Multiplication is concatenation,
//! with every term of degree above the truncation bound discarded. The
//! coproduct makes each generator primitive and extends multiplicatively,
//! which on a word works out to the sum over all ways of splitting the
//! word's positions into a subword and its complement:
//!
//! Δ(w) = Σ_{S ⊆ positions(w)} w|_S ⊗ w|_complement(S)
//!
//! The counit takes the coefficient of the empty word. An element z is
//! primitive when Δ(z) = z⊗1 + 1⊗z; per degree these form the kernel of an
//! explicit F_p matrix, computed in [`primitive_basis`].

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::Error;
use crate::fp::{Fp, FpMatrix, FpVector, Prime};

/// Shared parameters of a truncated tensor algebra: the field, the number of
/// generators, and the truncation degree. Operations between elements of
/// different contexts are rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TensorContext {
    p: Prime,
    rank: usize,
    max_degree: usize,
}

impl TensorContext {
    pub fn new(p: Prime, rank: usize, max_degree: usize) -> Result<TensorContext, Error> {
        if rank == 0 || rank > 64 {
            return Err(Error::ContextTooLarge(format!(
                "rank {rank} outside the supported range 1..=64"
            )));
        }
        if max_degree == 0 || max_degree > 16 {
            return Err(Error::DegreeOutOfRange { degree: max_degree, max: 16 });
        }
        // keep the word basis enumerable
        let mut count: u128 = 1;
        for _ in 0..max_degree {
            count = count.saturating_mul(rank as u128);
            if count > 1 << 22 {
                return Err(Error::ContextTooLarge(format!(
                    "rank {rank} at degree {max_degree} needs more than 2^22 words"
                )));
            }
        }
        Ok(TensorContext { p, rank, max_degree })
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    fn check_same(&self, other: &TensorContext) -> Result<(), Error> {
        if self != other {
            return Err(Error::MixedContext(format!(
                "(p={}, rank={}, max_degree={}) vs (p={}, rank={}, max_degree={})",
                self.p, self.rank, self.max_degree, other.p, other.rank, other.max_degree
            )));
        }
        Ok(())
    }
}

/// A word in the generators; the letter i stands for the i-th generator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn letter(i: u8) -> Word {
        Word(vec![i])
    }

    pub fn from_letters(letters: &[u8]) -> Word {
        Word(letters.to_vec())
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

/// Words order by degree first, then lexicographically, matching the column
/// order used by the degree-wise solvers.
impl Ord for Word {
    fn cmp(&self, other: &Word) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Word) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|l| format!("x{l}")).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// All words of the given degree over `rank` letters, in lexicographic
/// order (the index of a word is its base-`rank` reading).
pub fn words_of_degree(rank: usize, degree: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut current = vec![0u8; degree];
    loop {
        out.push(Word(current.clone()));
        // increment as a base-rank counter, most significant letter first
        let mut pos = degree;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if (current[pos] as usize) + 1 < rank {
                current[pos] += 1;
                for c in current[pos + 1..].iter_mut() {
                    *c = 0;
                }
                break;
            }
        }
    }
}

/// The index of a degree-d word among `words_of_degree(rank, d)`.
pub fn word_index(rank: usize, w: &Word) -> usize {
    w.letters().iter().fold(0, |acc, &l| acc * rank + l as usize)
}

/// An element of the truncated tensor algebra: a finite F_p-combination of
/// words of degree at most the truncation bound. Zero coefficients are never
/// stored.
#[derive(Clone, PartialEq, Eq)]
pub struct TensorElement {
    ctx: TensorContext,
    terms: BTreeMap<Word, u64>,
}

impl TensorElement {
    pub fn zero(ctx: TensorContext) -> TensorElement {
        TensorElement { ctx, terms: BTreeMap::new() }
    }

    pub fn unit(ctx: TensorContext) -> TensorElement {
        let mut t = TensorElement::zero(ctx);
        t.add_in_place(Word::empty(), 1);
        t
    }

    pub fn generator(ctx: TensorContext, i: usize) -> TensorElement {
        assert!(i < ctx.rank, "generator index out of range");
        let mut t = TensorElement::zero(ctx);
        t.add_in_place(Word::letter(i as u8), 1);
        t
    }

    /// The degree-one element with the given generator coordinates.
    pub fn linear(ctx: TensorContext, coords: &FpVector) -> TensorElement {
        assert_eq!(coords.len(), ctx.rank, "coordinate length");
        assert_eq!(coords.modulus(), ctx.p.get(), "mixed moduli");
        let mut t = TensorElement::zero(ctx);
        for i in 0..coords.len() {
            t.add_in_place(Word::letter(i as u8), coords.get(i).value());
        }
        t
    }

    pub fn from_word(ctx: TensorContext, w: Word) -> TensorElement {
        assert!(w.degree() <= ctx.max_degree, "word exceeds truncation");
        assert!(w.letters().iter().all(|&l| (l as usize) < ctx.rank));
        let mut t = TensorElement::zero(ctx);
        t.add_in_place(w, 1);
        t
    }

    pub fn ctx(&self) -> &TensorContext {
        &self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, Fp)> {
        let p = self.ctx.p;
        self.terms.iter().map(move |(w, &c)| (w, Fp::from_u64(c, p)))
    }

    pub fn coefficient(&self, w: &Word) -> Fp {
        Fp::from_u64(self.terms.get(w).copied().unwrap_or(0), self.ctx.p)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// The largest degree carrying a nonzero term (zero for the zero element).
    pub fn top_degree(&self) -> usize {
        self.terms.keys().next_back().map_or(0, Word::degree)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut ds: Vec<usize> = self.terms.keys().map(Word::degree).collect();
        ds.dedup();
        ds
    }

    fn add_in_place(&mut self, w: Word, c: u64) {
        let p = self.ctx.p.get();
        let c = c % p;
        if c == 0 {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = (*e.get() + c) % p;
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add(&self, rhs: &TensorElement) -> TensorElement {
        assert_eq!(self.ctx, rhs.ctx, "mixed contexts");
        let mut out = self.clone();
        for (w, &c) in &rhs.terms {
            out.add_in_place(w.clone(), c);
        }
        out
    }

    pub fn sub(&self, rhs: &TensorElement) -> TensorElement {
        assert_eq!(self.ctx, rhs.ctx, "mixed contexts");
        let p = self.ctx.p.get();
        let mut out = self.clone();
        for (w, &c) in &rhs.terms {
            out.add_in_place(w.clone(), p - c);
        }
        out
    }

    pub fn scale(&self, c: Fp) -> TensorElement {
        assert_eq!(c.modulus(), self.ctx.p.get(), "mixed moduli");
        let mut out = TensorElement::zero(self.ctx);
        for (w, &v) in &self.terms {
            out.add_in_place(w.clone(), v * c.value());
        }
        out
    }

    pub fn neg(&self) -> TensorElement {
        self.scale(Fp::new(-1, self.ctx.p))
    }

    /// Concatenation product. Terms whose degree would exceed the truncation
    /// bound are discarded.
    pub fn concat_mul(&self, rhs: &TensorElement) -> Result<TensorElement, Error> {
        self.ctx.check_same(&rhs.ctx)?;
        let mut out = TensorElement::zero(self.ctx);
        for (wa, &ca) in &self.terms {
            for (wb, &cb) in &rhs.terms {
                if wa.degree() + wb.degree() > self.ctx.max_degree {
                    continue;
                }
                out.add_in_place(wa.concat(wb), ca * cb);
            }
        }
        Ok(out)
    }

    /// ab - ba.
    pub fn commutator(&self, rhs: &TensorElement) -> Result<TensorElement, Error> {
        Ok(self.concat_mul(rhs)?.sub(&rhs.concat_mul(self)?))
    }

    /// k-th concatenation power.
    pub fn pow(&self, k: usize) -> Result<TensorElement, Error> {
        let mut acc = TensorElement::unit(self.ctx);
        for _ in 0..k {
            acc = acc.concat_mul(self)?;
        }
        Ok(acc)
    }

    /// The coproduct: per word, the sum over position subsets of
    /// subword ⊗ complementary subword.
    pub fn coproduct(&self) -> TensorSquareElement {
        let mut out = TensorSquareElement::zero(self.ctx);
        for (w, &c) in &self.terms {
            let k = w.degree();
            let letters = w.letters();
            for mask in 0u32..(1u32 << k) {
                let mut left = Vec::new();
                let mut right = Vec::new();
                for (pos, &l) in letters.iter().enumerate() {
                    if mask >> pos & 1 == 1 {
                        left.push(l);
                    } else {
                        right.push(l);
                    }
                }
                out.add_in_place((Word(left), Word(right)), c);
            }
        }
        out
    }

    /// The counit: the coefficient of the empty word.
    pub fn counit(&self) -> Fp {
        self.coefficient(&Word::empty())
    }

    /// Δ(z) - z⊗1 - 1⊗z; zero exactly when z is primitive.
    pub fn primitivity_defect(&self) -> TensorSquareElement {
        let unit = TensorElement::unit(self.ctx);
        self.coproduct()
            .sub(&TensorSquareElement::from_product(self, &unit).expect("same context"))
            .sub(&TensorSquareElement::from_product(&unit, self).expect("same context"))
    }

    pub fn is_primitive(&self) -> bool {
        self.primitivity_defect().is_zero()
    }

    /// The terms of exactly the given degree, as a new element.
    pub fn homogeneous_component(&self, degree: usize) -> TensorElement {
        let mut out = TensorElement::zero(self.ctx);
        for (w, &c) in &self.terms {
            if w.degree() == degree {
                out.add_in_place(w.clone(), c);
            }
        }
        out
    }

    /// Coordinates over the lexicographic word basis of one degree.
    /// Terms of other degrees must not be present.
    pub fn coords_of_degree(&self, degree: usize) -> FpVector {
        let rank = self.ctx.rank;
        let mut v = FpVector::zeros(self.ctx.p, rank.pow(degree as u32));
        for (w, &c) in &self.terms {
            assert_eq!(w.degree(), degree, "element is not homogeneous");
            v.set(word_index(rank, w), Fp::from_u64(c, self.ctx.p));
        }
        v
    }

    /// Coordinates over all words of degree at most `degree`, ordered by
    /// (degree, lexicographic).
    pub fn coords_truncated(&self, degree: usize) -> FpVector {
        let rank = self.ctx.rank;
        let mut offsets = vec![0usize; degree + 2];
        for d in 0..=degree {
            offsets[d + 1] = offsets[d] + rank.pow(d as u32);
        }
        let mut v = FpVector::zeros(self.ctx.p, offsets[degree + 1]);
        for (w, &c) in &self.terms {
            assert!(w.degree() <= degree, "term exceeds requested degree");
            let idx = offsets[w.degree()] + word_index(rank, w);
            v.set(idx, Fp::from_u64(c, self.ctx.p));
        }
        v
    }

    /// Letterwise linear substitution: each letter i is replaced by the
    /// degree-one element of `target` with coordinates `images[i]`, and the
    /// result is multiplied out (with truncation in the target context).
    pub fn substitute(
        &self,
        target: TensorContext,
        images: &[FpVector],
    ) -> Result<TensorElement, Error> {
        let image_elems: Vec<TensorElement> = images
            .iter()
            .map(|v| TensorElement::linear(target, v))
            .collect();
        self.substitute_elements(target, &image_elems)
    }

    /// Letterwise substitution by arbitrary elements of the target context:
    /// each letter i is replaced by `images[i]` and the result is multiplied
    /// out (with truncation in the target context).
    pub fn substitute_elements(
        &self,
        target: TensorContext,
        images: &[TensorElement],
    ) -> Result<TensorElement, Error> {
        if target.p != self.ctx.p {
            return Err(Error::MixedContext(format!(
                "p={} vs p={}",
                self.ctx.p, target.p
            )));
        }
        assert_eq!(images.len(), self.ctx.rank, "one image per generator");
        for im in images {
            if *im.ctx() != target {
                return Err(Error::MixedContext(
                    "substitution image from a different context".into(),
                ));
            }
        }
        let mut out = TensorElement::zero(target);
        for (w, &c) in &self.terms {
            let mut prod = TensorElement::unit(target);
            for &l in w.letters() {
                prod = prod.concat_mul(&images[l as usize])?;
            }
            out = out.add(&prod.scale(Fp::from_u64(c, target.p)));
        }
        Ok(out)
    }
}

impl fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| if *c == 1 { format!("{w:?}") } else { format!("{c}*{w:?}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// An element of the tensor square of the truncated tensor algebra. Pairs
/// whose total degree exceeds the truncation bound are discarded.
#[derive(Clone, PartialEq, Eq)]
pub struct TensorSquareElement {
    ctx: TensorContext,
    terms: BTreeMap<(Word, Word), u64>,
}

impl TensorSquareElement {
    pub fn zero(ctx: TensorContext) -> TensorSquareElement {
        TensorSquareElement { ctx, terms: BTreeMap::new() }
    }

    pub fn unit(ctx: TensorContext) -> TensorSquareElement {
        let mut t = TensorSquareElement::zero(ctx);
        t.add_in_place((Word::empty(), Word::empty()), 1);
        t
    }

    /// a ⊗ b.
    pub fn from_product(
        a: &TensorElement,
        b: &TensorElement,
    ) -> Result<TensorSquareElement, Error> {
        a.ctx.check_same(&b.ctx)?;
        let mut out = TensorSquareElement::zero(a.ctx);
        for (wa, &ca) in &a.terms {
            for (wb, &cb) in &b.terms {
                out.add_in_place((wa.clone(), wb.clone()), ca * cb);
            }
        }
        Ok(out)
    }

    fn add_in_place(&mut self, key: (Word, Word), c: u64) {
        if key.0.degree() + key.1.degree() > self.ctx.max_degree {
            return;
        }
        let p = self.ctx.p.get();
        let c = c % p;
        if c == 0 {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = (*e.get() + c) % p;
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn ctx(&self) -> &TensorContext {
        &self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Word, Word), Fp)> {
        let p = self.ctx.p;
        self.terms.iter().map(move |(k, &c)| (k, Fp::from_u64(c, p)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, rhs: &TensorSquareElement) -> TensorSquareElement {
        assert_eq!(self.ctx, rhs.ctx, "mixed contexts");
        let mut out = self.clone();
        for (k, &c) in &rhs.terms {
            out.add_in_place(k.clone(), c);
        }
        out
    }

    pub fn sub(&self, rhs: &TensorSquareElement) -> TensorSquareElement {
        assert_eq!(self.ctx, rhs.ctx, "mixed contexts");
        let p = self.ctx.p.get();
        let mut out = self.clone();
        for (k, &c) in &rhs.terms {
            out.add_in_place(k.clone(), p - c);
        }
        out
    }

    /// Componentwise concatenation product; pairs whose total degree exceeds
    /// the truncation bound are discarded.
    pub fn mul(&self, rhs: &TensorSquareElement) -> Result<TensorSquareElement, Error> {
        self.ctx.check_same(&rhs.ctx)?;
        let mut out = TensorSquareElement::zero(self.ctx);
        for ((la, ra), &ca) in &self.terms {
            for ((lb, rb), &cb) in &rhs.terms {
                out.add_in_place((la.concat(lb), ra.concat(rb)), ca * cb);
            }
        }
        Ok(out)
    }

    /// (ε ⊗ id): keeps pairs with empty left component.
    pub fn counit_left(&self) -> TensorElement {
        let mut out = TensorElement::zero(self.ctx);
        for ((l, r), &c) in &self.terms {
            if l.degree() == 0 {
                out.add_in_place(r.clone(), c);
            }
        }
        out
    }

    /// (id ⊗ ε): keeps pairs with empty right component.
    pub fn counit_right(&self) -> TensorElement {
        let mut out = TensorElement::zero(self.ctx);
        for ((l, r), &c) in &self.terms {
            if r.degree() == 0 {
                out.add_in_place(l.clone(), c);
            }
        }
        out
    }
}

impl fmt::Debug for TensorSquareElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((l, r), c)| {
                if *c == 1 {
                    format!("{l:?}(x){r:?}")
                } else {
                    format!("{c}*{l:?}(x){r:?}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A basis of the primitive elements of pure degree `degree`: the kernel of
/// the map z ↦ Δ(z) - z⊗1 - 1⊗z restricted to degree-`degree` words, whose
/// image coordinates live on the mixed-bidegree pairs only (the (0,n) and
/// (n,0) components cancel identically).
pub fn primitive_basis(
    ctx: TensorContext,
    degree: usize,
) -> Result<Vec<TensorElement>, Error> {
    if degree == 0 || degree > ctx.max_degree {
        return Err(Error::DegreeOutOfRange { degree, max: ctx.max_degree });
    }
    let rank = ctx.rank;
    let words = words_of_degree(rank, degree);

    // row index for every mixed-bidegree pair (i, degree-i), 0 < i < degree
    let mut pair_offset = Vec::with_capacity(degree);
    let mut rows = 0usize;
    for i in 1..degree {
        pair_offset.push(rows);
        rows += rank.pow(i as u32) * rank.pow((degree - i) as u32);
    }
    let mut matrix = FpMatrix::zeros(ctx.p, rows, words.len());

    for (j, w) in words.iter().enumerate() {
        let letters = w.letters();
        for mask in 1u32..(1u32 << degree) - 1 {
            let mut left = Vec::new();
            let mut right = Vec::new();
            for (pos, &l) in letters.iter().enumerate() {
                if mask >> pos & 1 == 1 {
                    left.push(l);
                } else {
                    right.push(l);
                }
            }
            let i = left.len();
            let row = pair_offset[i - 1]
                + word_index(rank, &Word(left)) * rank.pow((degree - i) as u32)
                + word_index(rank, &Word(right));
            let v = matrix.get(row, j) + Fp::one(ctx.p);
            matrix.set(row, j, v);
        }
    }

    let kernel = matrix.kernel_basis();
    Ok(kernel
        .into_iter()
        .map(|v| {
            let mut elem = TensorElement::zero(ctx);
            for (j, w) in words.iter().enumerate() {
                elem.add_in_place(w.clone(), v.get(j).value());
            }
            elem
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn ctx(p: u64, rank: usize, n: usize) -> TensorContext {
        TensorContext::new(Prime::new(p).unwrap(), rank, n).unwrap()
    }

    fn w(letters: &[u8]) -> Word {
        Word::from_letters(letters)
    }

    #[test]
    fn concatenation_has_unit_and_truncates() {
        let c = ctx(2, 2, 2);
        let x = TensorElement::generator(c, 0);
        let y = TensorElement::generator(c, 1);
        let one = TensorElement::unit(c);
        assert_eq!(one.concat_mul(&x).unwrap(), x);
        assert_eq!(x.concat_mul(&one).unwrap(), x);
        let xy = x.concat_mul(&y).unwrap();
        assert_eq!(xy.coefficient(&w(&[0, 1])).value(), 1);
        assert_eq!(xy.term_count(), 1);
        // degree 3 exceeds the bound and is dropped
        assert!(xy.concat_mul(&x).unwrap().is_zero());
    }

    #[test]
    fn mixed_contexts_are_rejected() {
        let a = TensorElement::unit(ctx(2, 2, 4));
        let b = TensorElement::unit(ctx(2, 2, 5));
        assert!(matches!(a.concat_mul(&b), Err(Error::MixedContext(_))));
        let c = TensorElement::unit(ctx(3, 2, 4));
        assert!(matches!(a.concat_mul(&c), Err(Error::MixedContext(_))));
    }

    #[test]
    fn generators_are_primitive() {
        let c = ctx(5, 2, 3);
        let x = TensorElement::generator(c, 0);
        let delta = x.coproduct();
        let mut expect = TensorSquareElement::zero(c);
        expect = expect.add(
            &TensorSquareElement::from_product(&x, &TensorElement::unit(c)).unwrap(),
        );
        expect = expect.add(
            &TensorSquareElement::from_product(&TensorElement::unit(c), &x).unwrap(),
        );
        assert_eq!(delta, expect);
        assert!(x.is_primitive());
    }

    #[test]
    fn coproduct_of_a_two_letter_word_has_four_splits() {
        let c = ctx(2, 2, 2);
        let xy = TensorElement::from_word(c, w(&[0, 1]));
        let delta = xy.coproduct();
        let pairs: Vec<((Word, Word), u64)> = delta
            .terms()
            .map(|(k, v)| (k.clone(), v.value()))
            .collect();
        assert_eq!(
            pairs,
            vec![
                ((w(&[]), w(&[0, 1])), 1),
                ((w(&[0]), w(&[1])), 1),
                ((w(&[1]), w(&[0])), 1),
                ((w(&[0, 1]), w(&[])), 1),
            ]
        );
        // independent route: Δ is multiplicative, so Δ(xy) = Δ(x)Δ(y)
        let x = TensorElement::generator(c, 0);
        let y = TensorElement::generator(c, 1);
        assert_eq!(delta, x.coproduct().mul(&y.coproduct()).unwrap());
    }

    #[test]
    fn counit_picks_the_empty_word_coefficient() {
        let c = ctx(3, 1, 2);
        let x = TensorElement::generator(c, 0);
        let e = TensorElement::unit(c).scale(Fp::from_u64(2, Prime::new(3).unwrap()));
        assert_eq!(e.counit().value(), 2);
        assert_eq!(x.counit().value(), 0);
        assert_eq!(e.add(&x).counit().value(), 2);
    }

    #[test]
    fn primitive_basis_in_degree_one_is_the_generators() {
        let c = ctx(5, 3, 2);
        let basis = primitive_basis(c, 1).unwrap();
        assert_eq!(basis.len(), 3);
        for (i, b) in basis.iter().enumerate() {
            assert_eq!(*b, TensorElement::generator(c, i));
        }
    }

    #[test]
    fn square_of_a_generator_is_primitive_only_in_characteristic_two() {
        let c2 = ctx(2, 1, 2);
        let basis2 = primitive_basis(c2, 2).unwrap();
        assert_eq!(basis2.len(), 1);
        assert_eq!(basis2[0], TensorElement::from_word(c2, w(&[0, 0])));

        let c3 = ctx(3, 1, 2);
        assert!(primitive_basis(c3, 2).unwrap().is_empty());
    }

    #[test]
    fn degree_bounds_are_enforced() {
        let c = ctx(2, 1, 3);
        assert!(matches!(
            primitive_basis(c, 0),
            Err(Error::DegreeOutOfRange { .. })
        ));
        assert!(matches!(
            primitive_basis(c, 4),
            Err(Error::DegreeOutOfRange { .. })
        ));
    }

    #[test]
    fn primitive_basis_elements_are_primitive_and_independent() {
        for (p, rank, degree) in [(2u64, 2usize, 4usize), (3, 2, 3), (5, 2, 2)] {
            let c = ctx(p, rank, degree);
            let basis = primitive_basis(c, degree).unwrap();
            for b in &basis {
                assert!(b.is_primitive());
            }
            let prime = Prime::new(p).unwrap();
            let vectors: Vec<FpVector> =
                basis.iter().map(|b| b.coords_of_degree(degree)).collect();
            let m = FpMatrix::from_rows(prime, &vectors);
            assert_eq!(m.rank(), basis.len());
        }
    }

    #[test]
    fn substitution_is_linear_on_letters() {
        let p = Prime::new(3).unwrap();
        let src = ctx(3, 2, 3);
        let dst = ctx(3, 3, 3);
        // x ↦ u + 2w, y ↦ v
        let images = vec![
            FpVector::from_values(p, &[1, 0, 2]),
            FpVector::from_values(p, &[0, 1, 0]),
        ];
        let xy = TensorElement::from_word(src, w(&[0, 1]));
        let out = xy.substitute(dst, &images).unwrap();
        assert_eq!(out.coefficient(&w(&[0, 1])).value(), 1);
        assert_eq!(out.coefficient(&w(&[2, 1])).value(), 2);
        assert_eq!(out.term_count(), 2);
    }

    // random elements of degree ≤ 2 so that products stay inside the bound
    fn arb_element() -> impl Strategy<Value = TensorElement> {
        (0usize..3, proptest::collection::vec(0u64..5, 7)).prop_map(|(pi, coeffs)| {
            let p = [2u64, 3, 5][pi];
            let c = ctx(p, 2, 4);
            let mut words: Vec<Word> = vec![Word::empty()];
            words.extend(words_of_degree(2, 1));
            words.extend(words_of_degree(2, 2));
            let mut t = TensorElement::zero(c);
            for (word, &coeff) in words.iter().zip(&coeffs) {
                t.add_in_place(word.clone(), coeff);
            }
            t
        })
    }

    fn same_ctx(a: &TensorElement, b: &TensorElement) -> (TensorElement, TensorElement) {
        if a.ctx() == b.ctx() {
            (a.clone(), b.clone())
        } else {
            // regenerate b in a's context by transporting coefficients
            let mut t = TensorElement::zero(*a.ctx());
            for (word, c) in b.terms() {
                t.add_in_place(word.clone(), c.value());
            }
            (a.clone(), t)
        }
    }

    type Triple = BTreeMap<(Word, Word, Word), u64>;

    fn expand_left(sq: &TensorSquareElement) -> Triple {
        // (Δ ⊗ id) applied to a square element
        let p = sq.ctx().p().get();
        let mut out = Triple::new();
        for ((l, r), c) in sq.terms() {
            let le = TensorElement::from_word(*sq.ctx(), l.clone());
            for ((a, b), d) in le.coproduct().terms() {
                let key = (a.clone(), b.clone(), r.clone());
                let slot = out.entry(key).or_insert(0);
                *slot = (*slot + c.value() * d.value()) % p;
                if *slot == 0 {
                    out.remove(&(a.clone(), b.clone(), r.clone()));
                }
            }
        }
        out
    }

    fn expand_right(sq: &TensorSquareElement) -> Triple {
        // (id ⊗ Δ) applied to a square element
        let p = sq.ctx().p().get();
        let mut out = Triple::new();
        for ((l, r), c) in sq.terms() {
            let re = TensorElement::from_word(*sq.ctx(), r.clone());
            for ((a, b), d) in re.coproduct().terms() {
                let key = (l.clone(), a.clone(), b.clone());
                let slot = out.entry(key).or_insert(0);
                *slot = (*slot + c.value() * d.value()) % p;
                if *slot == 0 {
                    out.remove(&(l.clone(), a.clone(), b.clone()));
                }
            }
        }
        out
    }

    proptest! {
        #[test]
        fn coproduct_is_coassociative(a in arb_element()) {
            let delta = a.coproduct();
            prop_assert_eq!(expand_left(&delta), expand_right(&delta));
        }

        #[test]
        fn counit_laws_hold(a in arb_element()) {
            let delta = a.coproduct();
            prop_assert_eq!(delta.counit_left(), a.clone());
            prop_assert_eq!(delta.counit_right(), a);
        }

        #[test]
        fn coproduct_is_an_algebra_map(a in arb_element(), b in arb_element()) {
            let (a, b) = same_ctx(&a, &b);
            let prod = a.concat_mul(&b).unwrap();
            let lhs = prod.coproduct();
            let rhs = a.coproduct().mul(&b.coproduct()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn counit_is_an_algebra_map(a in arb_element(), b in arb_element()) {
            let (a, b) = same_ctx(&a, &b);
            let prod = a.concat_mul(&b).unwrap();
            prop_assert_eq!(prod.counit(), a.counit() * b.counit());
        }
    }
}
