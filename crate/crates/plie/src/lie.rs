//! Restricted Lie algebras over F_p presented by structure constants.
//!
//! A restricted Lie algebra carries, on top of the bracket, a p-operation
//! x ↦ x^[p] subject to three axioms:
//!
//! * (αx)^[p] = α^p x^[p],
//! * ad(x^[p]) = ad(x)^p,
//! * (x+y)^[p] = x^[p] + y^[p] + s(x,y),
//!
//! where the correction term s(x,y) = Σ_{i=1}^{p-1} s_i(x,y)/i and s_i(x,y)
//! is the coefficient of β^{i-1} in ad(βx+y)^{p-1}(x), computed here with an
//! honest polynomial in the formal variable β. The p-operation is stored on
//! basis elements only; [`RestrictedLieAlgebra::pmap`] extends it to general
//! elements by folding the sum rule over the basis decomposition, using the
//! scalar axiom on each summand. The bracket table is stored for index pairs
//! i < j only; the diagonal is forced to zero and swapped pairs to the
//! negation, so alternation holds structurally and is not an axiom to check.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Error;
use crate::fp::{Fp, FpMatrix, FpVector, Prime};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RestrictedLieAlgebra {
    p: Prime,
    names: Vec<String>,
    /// bracket table [e_i, e_j] for i < j, flattened in row order
    upper: Vec<FpVector>,
    /// p-operation table, one row per basis element
    pmap_rows: Vec<FpVector>,
}

pub(crate) fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl RestrictedLieAlgebra {
    /// Builds an algebra from its tables. `upper` lists [e_i, e_j] for all
    /// i < j in row order ((0,1), (0,2), ..., (1,2), ...). No axiom is
    /// verified here; that is [`RestrictedLieAlgebra::check_axioms`]'s job.
    pub fn new(
        p: Prime,
        names: Vec<String>,
        upper: Vec<FpVector>,
        pmap_rows: Vec<FpVector>,
    ) -> Result<RestrictedLieAlgebra, Error> {
        let n = names.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("empty basis".into()));
        }
        for (k, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::Name(String::new()));
            }
            if names[..k].contains(name) {
                return Err(Error::Name(name.clone()));
            }
        }
        if upper.len() != n * (n - 1) / 2 {
            return Err(Error::DimensionMismatch(format!(
                "expected {} bracket rows for dimension {n}, got {}",
                n * (n - 1) / 2,
                upper.len()
            )));
        }
        if pmap_rows.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "expected {n} p-operation rows, got {}",
                pmap_rows.len()
            )));
        }
        for v in upper.iter().chain(&pmap_rows) {
            if v.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "table row of length {} in dimension {n}",
                    v.len()
                )));
            }
            if v.modulus() != p.get() {
                return Err(Error::MixedContext(format!(
                    "table row over F_{} in an algebra over F_{}",
                    v.modulus(),
                    p
                )));
            }
        }
        Ok(RestrictedLieAlgebra { p, names, upper, pmap_rows })
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

    pub fn zero_vector(&self) -> FpVector {
        FpVector::zeros(self.p, self.dim())
    }

    pub fn basis_vector(&self, i: usize) -> FpVector {
        FpVector::basis(self.p, self.dim(), i)
    }

    pub fn pmap_basis_row(&self, i: usize) -> &FpVector {
        &self.pmap_rows[i]
    }

    /// [e_i, e_j] for any pair; the diagonal is zero and swapped pairs
    /// negate the stored value.
    pub fn bracket_basis(&self, i: usize, j: usize) -> FpVector {
        let n = self.dim();
        assert!(i < n && j < n, "basis index out of range");
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => self.zero_vector(),
            std::cmp::Ordering::Less => self.upper[pair_index(n, i, j)].clone(),
            std::cmp::Ordering::Greater => self.upper[pair_index(n, j, i)].neg(),
        }
    }

    pub fn bracket(&self, x: &FpVector, y: &FpVector) -> Result<FpVector, Error> {
        let n = self.dim();
        if x.len() != n || y.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "elements of length {} and {} in dimension {n}",
                x.len(),
                y.len()
            )));
        }
        let mut out = self.zero_vector();
        for i in 0..n {
            for j in (i + 1)..n {
                let c = x.get(i) * y.get(j) - x.get(j) * y.get(i);
                if !c.is_zero() {
                    out = out.add(&self.upper[pair_index(n, i, j)].scale(c));
                }
            }
        }
        Ok(out)
    }

    /// The matrix of ad(x) = [x, -] acting on coordinate columns.
    pub fn ad_matrix(&self, x: &FpVector) -> FpMatrix {
        let n = self.dim();
        assert_eq!(x.len(), n, "element length");
        let mut m = FpMatrix::zeros(self.p, n, n);
        for j in 0..n {
            let col = self
                .bracket(x, &self.basis_vector(j))
                .expect("dimensions agree");
            for k in 0..n {
                m.set(k, j, col.get(k));
            }
        }
        m
    }

    /// Jacobson's correction term s(x,y).
    ///
    /// The β-polynomial ad(βx+y)^{p-1}(x) is computed coefficient-wise:
    /// applying ad(βx+y) sends the β^k coefficient c_k to [y,c_k] + [x,c_{k-1}]
    /// shifted appropriately. Then s(x,y) = Σ_{i=1}^{p-1} s_i / i with s_i the
    /// coefficient of β^{i-1}.
    pub fn s_term(&self, x: &FpVector, y: &FpVector) -> Result<FpVector, Error> {
        let n = self.dim();
        if x.len() != n || y.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "elements of length {} and {} in dimension {n}",
                x.len(),
                y.len()
            )));
        }
        let p = self.p.get();
        // coefficients of the β-polynomial, index = power of β
        let mut poly: Vec<FpVector> = vec![x.clone()];
        for _ in 0..(p - 1) {
            let mut next: Vec<FpVector> = Vec::with_capacity(poly.len() + 1);
            for k in 0..=poly.len() {
                let mut c = self.zero_vector();
                if k < poly.len() {
                    c = c.add(&self.bracket(y, &poly[k])?);
                }
                if k > 0 {
                    c = c.add(&self.bracket(x, &poly[k - 1])?);
                }
                next.push(c);
            }
            while next.len() > 1 && next.last().is_some_and(FpVector::is_zero) {
                next.pop();
            }
            poly = next;
        }
        let mut s = self.zero_vector();
        for i in 1..p {
            let Some(coeff) = poly.get((i - 1) as usize) else {
                break;
            };
            let inv = Fp::from_u64(i, self.p).inv().expect("1 <= i < p");
            s = s.add(&coeff.scale(inv));
        }
        Ok(s)
    }

    /// The p-operation on an arbitrary element, by folding the sum rule over
    /// the basis decomposition in basis order: with a_k the partial sum of
    /// the first k terms,
    ///
    /// a_k^[p] = a_{k-1}^[p] + (α_k e_k)^[p] + s(a_{k-1}, α_k e_k),
    ///
    /// and (α e_k)^[p] = α^p e_k^[p] by the scalar axiom.
    pub fn pmap(&self, x: &FpVector) -> FpVector {
        self.pmap_in_order(x, &(0..self.dim()).collect::<Vec<_>>())
    }

    /// Same fold along an arbitrary permutation of the basis. When the
    /// axioms hold the result does not depend on the order; tests rely on
    /// this to cross-check the fold.
    fn pmap_in_order(&self, x: &FpVector, order: &[usize]) -> FpVector {
        let n = self.dim();
        assert_eq!(x.len(), n, "element length");
        assert_eq!(order.len(), n, "order must be a permutation");
        let mut partial = self.zero_vector();
        let mut result = self.zero_vector();
        for &k in order {
            let alpha = x.get(k);
            if alpha.is_zero() {
                continue;
            }
            let term = self.basis_vector(k).scale(alpha);
            let scalar_power = alpha.pow(self.p.get());
            result = result.add(&self.pmap_rows[k].scale(scalar_power));
            result = result.add(
                &self
                    .s_term(&partial, &term)
                    .expect("dimensions agree"),
            );
            partial = partial.add(&term);
        }
        result
    }

    pub fn random_vector<R: Rng>(&self, rng: &mut R) -> FpVector {
        let p = self.p.get();
        let values: Vec<u64> = (0..self.dim()).map(|_| rng.gen_range(0..p)).collect();
        FpVector::from_values(self.p, &values)
    }

    /// Checks the axioms: the Jacobi identity on every basis triple, the
    /// compatibility ad(x^[p]) = ad(x)^p on every basis element, and the sum
    /// and scalar rules for the p-operation on seeded random samples. All
    /// residuals are exact; pass means every one of them is zero.
    pub fn check_axioms(&self, samples: usize, seed: u64) -> AxiomReport {
        let n = self.dim();
        let p = self.p.get();
        let mut report = AxiomReport {
            dim: n,
            p: self.p,
            samples,
            seed,
            jacobi_checked: 0,
            jacobi_failures: Vec::new(),
            restricted_failures: Vec::new(),
            sum_failures: Vec::new(),
            scalar_failures: Vec::new(),
        };

        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    report.jacobi_checked += 1;
                    let ei = self.basis_vector(i);
                    let ej = self.basis_vector(j);
                    let ek = self.basis_vector(k);
                    let t1 = self
                        .bracket(&self.bracket(&ei, &ej).unwrap(), &ek)
                        .unwrap();
                    let t2 = self
                        .bracket(&self.bracket(&ej, &ek).unwrap(), &ei)
                        .unwrap();
                    let t3 = self
                        .bracket(&self.bracket(&ek, &ei).unwrap(), &ej)
                        .unwrap();
                    let residual = t1.add(&t2).add(&t3);
                    if !residual.is_zero() {
                        report.jacobi_failures.push(JacobiFailure { i, j, k, residual });
                    }
                }
            }
        }

        for i in 0..n {
            let lhs = self.ad_matrix(&self.pmap_rows[i]);
            let rhs = self.ad_matrix(&self.basis_vector(i)).pow(p);
            let residual = lhs.sub(&rhs);
            if !residual.is_zero() {
                report
                    .restricted_failures
                    .push(RestrictedFailure { index: i, residual });
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for sample in 0..samples {
            let x = self.random_vector(&mut rng);
            let y = self.random_vector(&mut rng);
            let residual = self
                .pmap(&x.add(&y))
                .sub(&self.pmap(&x))
                .sub(&self.pmap(&y))
                .sub(&self.s_term(&x, &y).unwrap());
            if !residual.is_zero() {
                report.sum_failures.push(SampleFailure { sample, residual });
            }

            let alpha = Fp::from_u64(rng.gen_range(0..p), self.p);
            let z = self.random_vector(&mut rng);
            let residual = self
                .pmap(&z.scale(alpha))
                .sub(&self.pmap(&z).scale(alpha.pow(p)));
            if !residual.is_zero() {
                report.scalar_failures.push(SampleFailure { sample, residual });
            }
        }

        report
    }
}

/// Exact residuals from the axiom checks; pass means all lists are empty.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub dim: usize,
    pub p: Prime,
    pub samples: usize,
    pub seed: u64,
    pub jacobi_checked: usize,
    pub jacobi_failures: Vec<JacobiFailure>,
    pub restricted_failures: Vec<RestrictedFailure>,
    pub sum_failures: Vec<SampleFailure>,
    pub scalar_failures: Vec<SampleFailure>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.jacobi_failures.is_empty()
            && self.restricted_failures.is_empty()
            && self.sum_failures.is_empty()
            && self.scalar_failures.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct JacobiFailure {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub residual: FpVector,
}

#[derive(Clone, Debug, Serialize)]
pub struct RestrictedFailure {
    pub index: usize,
    pub residual: FpMatrix,
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleFailure {
    pub sample: usize,
    pub residual: FpVector,
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    #[allow(clippy::type_complexity)]
    pub fn algebra(
        p: u64,
        names: &[&str],
        brackets: &[(usize, usize, &[(usize, i64)])],
        pmap: &[(usize, &[(usize, i64)])],
    ) -> RestrictedLieAlgebra {
        let prime = Prime::new(p).unwrap();
        let n = names.len();
        let mut upper = vec![FpVector::zeros(prime, n); n * (n - 1) / 2];
        for &(i, j, entries) in brackets {
            assert!(i < j);
            let mut v = FpVector::zeros(prime, n);
            for &(k, c) in entries {
                v.set(k, Fp::new(c, prime));
            }
            upper[pair_index(n, i, j)] = v;
        }
        let mut rows = vec![FpVector::zeros(prime, n); n];
        for &(i, entries) in pmap {
            let mut v = FpVector::zeros(prime, n);
            for &(k, c) in entries {
                v.set(k, Fp::new(c, prime));
            }
            rows[i] = v;
        }
        RestrictedLieAlgebra::new(
            prime,
            names.iter().map(|s| s.to_string()).collect(),
            upper,
            rows,
        )
        .unwrap()
    }

    /// [x,y] = z, z central, trivial p-operation.
    pub fn heisenberg(p: u64) -> RestrictedLieAlgebra {
        algebra(p, &["x", "y", "z"], &[(0, 1, &[(2, 1)])], &[])
    }

    /// Basis e, h, f with [h,e] = 2e, [e,f] = h, [h,f] = -2f and
    /// e^[5] = f^[5] = 0, h^[5] = h.
    pub fn sl2_p5() -> RestrictedLieAlgebra {
        algebra(
            5,
            &["e", "h", "f"],
            &[(0, 1, &[(0, -2)]), (0, 2, &[(1, 1)]), (1, 2, &[(2, -2)])],
            &[(1, &[(1, 1)])],
        )
    }

    /// One-dimensional algebra with x^[p] = c x.
    pub fn abelian_dim1(p: u64, c: i64) -> RestrictedLieAlgebra {
        algebra(p, &["x"], &[], &[(0, &[(0, c)])])
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn vec_of(l: &RestrictedLieAlgebra, values: &[i64]) -> FpVector {
        let mut v = l.zero_vector();
        for (i, &c) in values.iter().enumerate() {
            v.set(i, Fp::new(c, l.p()));
        }
        v
    }

    #[test]
    fn bracket_is_alternating_by_construction() {
        let l = heisenberg(3);
        assert!(l.bracket_basis(0, 0).is_zero());
        assert_eq!(l.bracket_basis(1, 0), l.bracket_basis(0, 1).neg());
        let x = vec_of(&l, &[1, 2, 0]);
        assert!(l.bracket(&x, &x).unwrap().is_zero());
    }

    #[test]
    fn bracket_is_bilinear() {
        let l = sl2_p5();
        let p = l.p();
        for a in 0..5i64 {
            let x = vec_of(&l, &[1, 2, 3]);
            let y = vec_of(&l, &[4, 0, 1]);
            let z = vec_of(&l, &[2, 2, 0]);
            let lhs = l
                .bracket(&x.scale(Fp::new(a, p)).add(&y), &z)
                .unwrap();
            let rhs = l
                .bracket(&x, &z)
                .unwrap()
                .scale(Fp::new(a, p))
                .add(&l.bracket(&y, &z).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let l = heisenberg(2);
        let short = FpVector::zeros(l.p(), 2);
        assert!(matches!(
            l.bracket(&short, &l.zero_vector()),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            l.s_term(&l.zero_vector(), &short),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn s_term_in_characteristic_two_is_the_reversed_bracket() {
        // p = 2 degenerates to s(x,y) = [y,x]: a single application of
        // ad(βx+y) to x, coefficient of β^0
        let l = heisenberg(2);
        for xb in 0..8u64 {
            for yb in 0..8u64 {
                let x = FpVector::from_values(l.p(), &[xb & 1, xb >> 1 & 1, xb >> 2 & 1]);
                let y = FpVector::from_values(l.p(), &[yb & 1, yb >> 1 & 1, yb >> 2 & 1]);
                assert_eq!(
                    l.s_term(&x, &y).unwrap(),
                    l.bracket(&y, &x).unwrap()
                );
            }
        }
    }

    #[test]
    fn heisenberg_correction_term_frozen_values() {
        let l2 = heisenberg(2);
        let x = l2.basis_vector(0);
        let y = l2.basis_vector(1);
        // s(x,y) = [y,x] = -z = z over F_2
        assert_eq!(l2.s_term(&x, &y).unwrap(), l2.basis_vector(2));
        // and the sum rule gives (x+y)^[2] = 0 + 0 + z
        assert_eq!(l2.pmap(&x.add(&y)), l2.basis_vector(2));

        // for p = 3 the central z kills the second application, so s = 0
        let l3 = heisenberg(3);
        let x = l3.basis_vector(0);
        let y = l3.basis_vector(1);
        assert!(l3.s_term(&x, &y).unwrap().is_zero());
        assert!(l3.pmap(&x.add(&y)).is_zero());
    }

    #[test]
    fn sl2_frozen_values() {
        let l = sl2_p5();
        let p = l.p();
        // ad(h) = diag(2, 0, -2) on (e, h, f)
        let ad_h = l.ad_matrix(&l.basis_vector(1));
        let mut expect = FpMatrix::zeros(p, 3, 3);
        expect.set(0, 0, Fp::new(2, p));
        expect.set(2, 2, Fp::new(-2, p));
        assert_eq!(ad_h, expect);
        // p-operation table
        assert!(l.pmap(&l.basis_vector(0)).is_zero());
        assert!(l.pmap(&l.basis_vector(2)).is_zero());
        assert_eq!(l.pmap(&l.basis_vector(1)), l.basis_vector(1));
        assert!(l.check_axioms(50, 0).passed());
    }

    #[test]
    fn fold_order_does_not_change_the_p_operation() {
        let l = sl2_p5();
        let orders: [&[usize]; 3] = [&[0, 1, 2], &[2, 1, 0], &[1, 0, 2]];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x = l.random_vector(&mut rng);
            let reference = l.pmap_in_order(&x, orders[0]);
            for order in &orders[1..] {
                assert_eq!(l.pmap_in_order(&x, order), reference);
            }
        }

        let l2 = heisenberg(2);
        for bits in 0..8u64 {
            let x = FpVector::from_values(
                l2.p(),
                &[bits & 1, bits >> 1 & 1, bits >> 2 & 1],
            );
            assert_eq!(
                l2.pmap_in_order(&x, &[0, 1, 2]),
                l2.pmap_in_order(&x, &[2, 0, 1])
            );
        }
    }

    #[test]
    fn ad_intertwines_bracket_and_matrix_commutator() {
        let l = sl2_p5();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let x = l.random_vector(&mut rng);
            let y = l.random_vector(&mut rng);
            let lhs = l.ad_matrix(&l.bracket(&x, &y).unwrap());
            let ax = l.ad_matrix(&x);
            let ay = l.ad_matrix(&y);
            let rhs = ax.mul(&ay).sub(&ay.mul(&ax));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn axiom_checks_pass_on_good_algebras() {
        assert!(heisenberg(2).check_axioms(100, 0).passed());
        assert!(heisenberg(3).check_axioms(100, 0).passed());
        assert!(abelian_dim1(2, 1).check_axioms(100, 0).passed());
        assert!(abelian_dim1(5, 0).check_axioms(100, 0).passed());
    }

    #[test]
    fn jacobi_violation_is_pinpointed() {
        // [x,y] = z, [y,z] = x, [x,z] = x: the Jacobi sum on (x,y,z) is -z
        let l = algebra(
            2,
            &["x", "y", "z"],
            &[
                (0, 1, &[(2, 1)]),
                (1, 2, &[(0, 1)]),
                (0, 2, &[(0, 1)]),
            ],
            &[],
        );
        let report = l.check_axioms(10, 0);
        assert!(!report.passed());
        assert_eq!(report.jacobi_failures.len(), 1);
        let fail = &report.jacobi_failures[0];
        assert_eq!((fail.i, fail.j, fail.k), (0, 1, 2));
        assert_eq!(fail.residual, l.basis_vector(2));
    }

    #[test]
    fn restrictedness_violation_is_pinpointed() {
        // x^[2] = y is incompatible with ad(x)^2 = 0 in the Heisenberg bracket
        let l = algebra(2, &["x", "y", "z"], &[(0, 1, &[(2, 1)])], &[(0, &[(1, 1)])]);
        let report = l.check_axioms(10, 0);
        assert!(!report.passed());
        assert_eq!(report.restricted_failures.len(), 1);
        assert_eq!(report.restricted_failures[0].index, 0);
        assert!(!report.restricted_failures[0].residual.is_zero());
    }

    #[test]
    fn scalar_rule_holds_exhaustively_in_small_cases() {
        let l = abelian_dim1(5, 3);
        for a in 0..5u64 {
            for x in 0..5u64 {
                let alpha = Fp::from_u64(a, l.p());
                let v = FpVector::from_values(l.p(), &[x]);
                assert_eq!(
                    l.pmap(&v.scale(alpha)),
                    l.pmap(&v).scale(alpha.pow(5))
                );
            }
        }
    }

    #[test]
    fn duplicate_and_empty_names_are_rejected() {
        let p = Prime::new(2).unwrap();
        let err = RestrictedLieAlgebra::new(
            p,
            vec!["x".into(), "x".into()],
            vec![FpVector::zeros(p, 2)],
            vec![FpVector::zeros(p, 2); 2],
        );
        assert!(matches!(err, Err(Error::Name(_))));
    }
}
