//! Subspaces of GF(q)^n in canonical reduced row-echelon form.
//!
//! Dimensions are vector-space dimensions throughout: a point is a
//! 1-dimensional subspace, a line is 2-dimensional. Every enumeration returns
//! its results sorted, so indices derived from them are reproducible.

use thiserror::Error;

use crate::gf::{Field, FieldElement};

/// Enumerations refuse to materialise more than this many objects.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

pub type Vector = Vec<FieldElement>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("ambient dimensions differ ({left} vs {right})")]
    AmbientMismatch { left: usize, right: usize },
    #[error("vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("need 0 <= t <= d, got d = {d}, t = {t}")]
    OutOfRange { d: u32, t: u32 },
    #[error("enumeration of {count} objects exceeds the limit")]
    TooLarge { count: u128 },
}

/// A nonzero vector scaled so that its first nonzero entry is 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjectivePoint(Vector);

impl ProjectivePoint {
    /// Normalises `v`; `None` for the zero vector.
    pub fn new(field: &Field, v: &[FieldElement]) -> Option<Self> {
        let lead = *v.iter().find(|x| !x.is_zero())?;
        let inv = field.inv(lead).ok()?;
        Some(ProjectivePoint(v.iter().map(|&x| field.mul(inv, x)).collect()))
    }

    pub fn rep(&self) -> &[FieldElement] {
        &self.0
    }

    pub fn into_rep(self) -> Vector {
        self.0
    }

    pub fn to_subspace(&self) -> Subspace {
        // already in echelon form
        Subspace {
            n: self.0.len(),
            rows: vec![self.0.clone()],
        }
    }
}

/// A linear subspace stored by its unique reduced row-echelon basis, so two
/// subspaces are equal exactly when their representations are.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subspace {
    n: usize,
    rows: Vec<Vector>,
}

pub fn dot(field: &Field, u: &[FieldElement], v: &[FieldElement]) -> FieldElement {
    u.iter()
        .zip(v)
        .fold(field.zero(), |acc, (&a, &b)| field.add(acc, field.mul(a, b)))
}

/// `Σ coeffs[i] · rows[i]`.
pub fn combine(field: &Field, coeffs: &[FieldElement], rows: &[Vector], n: usize) -> Vector {
    let mut out = vec![field.zero(); n];
    for (&c, row) in coeffs.iter().zip(rows) {
        if c.is_zero() {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(row) {
            *o = field.add(*o, field.mul(c, x));
        }
    }
    out
}

/// Reduced row-echelon form of the span of `rows`; zero rows are dropped.
pub fn rref(field: &Field, n: usize, rows: Vec<Vector>) -> Result<Subspace, LinalgError> {
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(LinalgError::LengthMismatch {
            expected: n,
            found: bad.len(),
        });
    }
    Ok(rref_unchecked(field, n, rows))
}

fn rref_unchecked(field: &Field, n: usize, mut m: Vec<Vector>) -> Subspace {
    let mut rank = 0;
    for col in 0..n {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = field.inv(m[rank][col]).expect("pivot is nonzero");
        for x in m[rank].iter_mut() {
            *x = field.mul(inv, *x);
        }
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col];
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                *x = field.sub(*x, field.mul(factor, y));
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    m.truncate(rank);
    Subspace { n, rows: m }
}

/// All normalised nonzero vectors of GF(q)^m in lexicographic order.
pub fn projective_points(field: &Field, m: usize) -> Result<Vec<ProjectivePoint>, LinalgError> {
    let q = field.order() as u128;
    let count = if m == 0 { 0 } else { (q.pow(m as u32) - 1) / (q - 1) };
    if count > ENUMERATION_LIMIT {
        return Err(LinalgError::TooLarge { count });
    }
    let mut out = Vec::with_capacity(count as usize);
    for lead in 0..m {
        let tail = m - lead - 1;
        let total = (q as u64).pow(tail as u32);
        for mut idx in 0..total {
            let mut v = vec![field.zero(); m];
            v[lead] = field.one();
            for slot in v[lead + 1..].iter_mut().rev() {
                *slot = field.from_index((idx % q as u64) as u32).expect("digit < q");
                idx /= q as u64;
            }
            out.push(ProjectivePoint(v));
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn checked_count(count: u128) -> Result<(), LinalgError> {
    if count > ENUMERATION_LIMIT {
        Err(LinalgError::TooLarge { count })
    } else {
        Ok(())
    }
}

/// Number of `t`-dimensional subspaces of GF(q)^d.
pub fn gaussian_binomial(d: u32, t: u32, q: u64) -> Result<u128, LinalgError> {
    if t > d {
        return Err(LinalgError::OutOfRange { d, t });
    }
    let q = q as u128;
    let overflow = LinalgError::TooLarge { count: u128::MAX };
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 1..=t {
        let top = q.checked_pow(d - i + 1).ok_or(overflow.clone())? - 1;
        let bottom = q.checked_pow(i).ok_or(overflow.clone())? - 1;
        let g = gcd(top, den);
        let (top, den_part) = (top / g, den / g);
        let g2 = gcd(num, bottom);
        num = (num / g2).checked_mul(top).ok_or(overflow.clone())?;
        den = den_part.checked_mul(bottom / g2).ok_or(overflow.clone())?;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    debug_assert_eq!(den, 1);
    Ok(num / den)
}

/// `[m] = (q^m - 1)/(q - 1)`, the number of points of GF(q)^m; zero for m ≤ 0.
pub fn gaussm(m: i64, q: u64) -> u128 {
    if m <= 0 {
        return 0;
    }
    let q = q as u128;
    (q.pow(m as u32) - 1) / (q - 1)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace { n, rows: Vec::new() }
    }

    pub fn full(field: &Field, n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut v = vec![field.zero(); n];
                v[i] = field.one();
                v
            })
            .collect();
        Subspace { n, rows }
    }

    pub fn span(field: &Field, n: usize, rows: Vec<Vector>) -> Result<Self, LinalgError> {
        rref(field, n, rows)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[Vector] {
        &self.rows
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|r| r.iter().position(|x| !x.is_zero()).expect("rows are nonzero"))
            .collect()
    }

    fn same_ambient(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.n != other.n {
            return Err(LinalgError::AmbientMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn contains(&self, field: &Field, v: &[FieldElement]) -> Result<bool, LinalgError> {
        if v.len() != self.n {
            return Err(LinalgError::LengthMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        // reduce v against the echelon basis
        let mut r = v.to_vec();
        for (row, piv) in self.rows.iter().zip(self.pivots()) {
            let c = r[piv];
            if c.is_zero() {
                continue;
            }
            for (x, &y) in r.iter_mut().zip(row) {
                *x = field.sub(*x, field.mul(c, y));
            }
        }
        Ok(r.iter().all(|x| x.is_zero()))
    }

    pub fn contains_subspace(&self, field: &Field, other: &Subspace) -> Result<bool, LinalgError> {
        self.same_ambient(other)?;
        for row in &other.rows {
            if !self.contains(field, row)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The span `⟨self, other⟩`.
    pub fn join(&self, field: &Field, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.same_ambient(other)?;
        let rows = self.rows.iter().chain(&other.rows).cloned().collect();
        Ok(rref_unchecked(field, self.n, rows))
    }

    pub fn join_vector(&self, field: &Field, v: &[FieldElement]) -> Result<Subspace, LinalgError> {
        if v.len() != self.n {
            return Err(LinalgError::LengthMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        let mut rows = self.rows.clone();
        rows.push(v.to_vec());
        Ok(rref_unchecked(field, self.n, rows))
    }

    /// Solutions `w` of `row · w = 0` for every basis row.
    pub fn annihilator(&self, field: &Field) -> Subspace {
        null_space(field, self.n, &self.rows, &self.pivots())
    }

    /// Intersection, computed as the common solutions of both annihilators.
    pub fn meet(&self, field: &Field, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.same_ambient(other)?;
        let a = self.annihilator(field);
        let b = other.annihilator(field);
        let eqs = rref_unchecked(field, self.n, a.rows.into_iter().chain(b.rows).collect());
        Ok(eqs.annihilator(field))
    }

    /// The points of this subspace, sorted by representative.
    pub fn points(&self, field: &Field) -> Result<Vec<ProjectivePoint>, LinalgError> {
        // a normalised coefficient vector applied to an echelon basis yields a
        // normalised ambient vector, so no further scaling is needed
        let mut pts: Vec<ProjectivePoint> = projective_points(field, self.dim())?
            .into_iter()
            .map(|c| ProjectivePoint(combine(field, c.rep(), &self.rows, self.n)))
            .collect();
        pts.sort_unstable();
        Ok(pts)
    }

    /// All subspaces of codimension one in `self`, sorted.
    pub fn hyperplanes(&self, field: &Field) -> Result<Vec<Subspace>, LinalgError> {
        let r = self.dim();
        let mut out = Vec::new();
        for w in projective_points(field, r)? {
            let pivot = w.rep().iter().position(|x| !x.is_zero()).expect("nonzero");
            let kernel = null_space(field, r, std::slice::from_ref(&w.0), &[pivot]);
            let rows = kernel
                .rows
                .iter()
                .map(|c| combine(field, c, &self.rows, self.n))
                .collect();
            out.push(rref_unchecked(field, self.n, rows));
        }
        out.sort_unstable();
        Ok(out)
    }

    /// All `t`-dimensional subspaces of `self`, sorted.
    pub fn subspaces(&self, field: &Field, t: usize) -> Result<Vec<Subspace>, LinalgError> {
        let r = self.dim();
        let count = gaussian_binomial(r as u32, t as u32, field.order() as u64)?;
        checked_count(count)?;
        let mut out = Vec::with_capacity(count as usize);
        let q = field.order() as u64;
        for pivots in combinations(r, t) {
            // free positions: (row i, col j) with j > pivot_i and j not a pivot
            let free: Vec<(usize, usize)> = pivots
                .iter()
                .enumerate()
                .flat_map(|(i, &pc)| {
                    (pc + 1..r)
                        .filter(|j| !pivots.contains(j))
                        .map(move |j| (i, j))
                })
                .collect();
            let total = q.pow(free.len() as u32);
            for mut idx in 0..total {
                let mut m = vec![vec![field.zero(); r]; t];
                for (i, &pc) in pivots.iter().enumerate() {
                    m[i][pc] = field.one();
                }
                for &(i, j) in &free {
                    m[i][j] = field.from_index((idx % q) as u32).expect("digit < q");
                    idx /= q;
                }
                let rows = m.iter().map(|c| combine(field, c, &self.rows, self.n)).collect();
                out.push(rref_unchecked(field, self.n, rows));
            }
        }
        out.sort_unstable();
        Ok(out)
    }
}

/// Basis of `{w : row · w = 0}` for an echelon matrix with the given pivots.
fn null_space(field: &Field, n: usize, rows: &[Vector], pivots: &[usize]) -> Subspace {
    let mut basis = Vec::with_capacity(n - rows.len());
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![field.zero(); n];
        v[free] = field.one();
        for (row, &pc) in rows.iter().zip(pivots) {
            v[pc] = field.neg(row[free]);
        }
        basis.push(v);
    }
    rref_unchecked(field, n, basis)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(field: &Field, xs: &[u32]) -> Vector {
        xs.iter().map(|&x| field.from_index(x).unwrap()).collect()
    }

    #[test]
    fn rref_examples() {
        let f2 = Field::new(2, 1).unwrap();
        let s = rref(&f2, 2, vec![v(&f2, &[1, 1]), v(&f2, &[0, 1])]).unwrap();
        assert_eq!(s, Subspace::full(&f2, 2));

        let f3 = Field::new(3, 1).unwrap();
        let s = rref(&f3, 3, vec![v(&f3, &[2, 2, 0])]).unwrap();
        assert_eq!(s.basis(), &[v(&f3, &[1, 1, 0])]);

        let s = rref(&f3, 3, vec![]).unwrap();
        assert_eq!(s.dim(), 0);
        assert!(rref(&f3, 3, vec![v(&f3, &[1])]).is_err());
    }

    #[test]
    fn span_and_meet_small_cases() {
        let f2 = Field::new(2, 1).unwrap();
        let a = rref(&f2, 3, vec![v(&f2, &[1, 0, 0])]).unwrap();
        let b = rref(&f2, 3, vec![v(&f2, &[0, 1, 0])]).unwrap();
        assert_eq!(a.join(&f2, &b).unwrap().dim(), 2);
        assert_eq!(a.meet(&f2, &b).unwrap().dim(), 0);
        assert_eq!(a.join(&f2, &a).unwrap(), a);
        assert_eq!(a.meet(&f2, &a).unwrap(), a);
        assert_eq!(a.join(&f2, &Subspace::zero(3)).unwrap(), a);
        assert!(matches!(
            a.join(&f2, &Subspace::zero(4)),
            Err(LinalgError::AmbientMismatch { .. })
        ));
    }

    #[test]
    fn point_and_hyperplane_counts() {
        let f2 = Field::new(2, 1).unwrap();
        let f3 = Field::new(3, 1).unwrap();
        let pt = rref(&f2, 3, vec![v(&f2, &[0, 1, 1])]).unwrap();
        assert_eq!(pt.points(&f2).unwrap().len(), 1);
        assert_eq!(pt.hyperplanes(&f2).unwrap(), vec![Subspace::zero(3)]);
        assert_eq!(Subspace::full(&f2, 3).points(&f2).unwrap().len(), 7);
        assert_eq!(Subspace::full(&f2, 3).hyperplanes(&f2).unwrap().len(), 7);
        assert_eq!(Subspace::full(&f3, 2).points(&f3).unwrap().len(), 4);
        assert_eq!(Subspace::full(&f3, 2).hyperplanes(&f3).unwrap().len(), 4);
    }

    #[test]
    fn gaussian_binomials() {
        assert_eq!(gaussian_binomial(4, 2, 2).unwrap(), 35);
        assert_eq!(gaussian_binomial(7, 0, 5).unwrap(), 1);
        for d in 0..7 {
            for t in 0..=d {
                assert_eq!(
                    gaussian_binomial(d, t, 3).unwrap(),
                    gaussian_binomial(d, d - t, 3).unwrap()
                );
            }
        }
        assert_eq!(
            gaussian_binomial(2, 3, 2),
            Err(LinalgError::OutOfRange { d: 2, t: 3 })
        );
        assert_eq!(gaussm(3, 2), 7);
        assert_eq!(gaussm(0, 2), 0);
    }

    #[test]
    fn subspace_enumeration_matches_counts() {
        let f2 = Field::new(2, 1).unwrap();
        let full4 = Subspace::full(&f2, 4);
        assert_eq!(full4.subspaces(&f2, 2).unwrap().len(), 35);
        assert_eq!(full4.subspaces(&f2, 4).unwrap(), vec![full4.clone()]);
        let full3 = Subspace::full(&f2, 3);
        assert_eq!(full3.subspaces(&f2, 1).unwrap().len(), 7);
        let all: std::collections::BTreeSet<_> = full4.subspaces(&f2, 2).unwrap().into_iter().collect();
        assert_eq!(all.len(), 35);

        let f4 = Field::new(2, 2).unwrap();
        for t in 0..=4 {
            let subs = Subspace::full(&f4, 4).subspaces(&f4, t).unwrap();
            assert_eq!(subs.len() as u128, gaussian_binomial(4, t as u32, 4).unwrap());
            assert!(subs.iter().all(|s| s.dim() == t));
        }
    }

    #[test]
    fn enumeration_guard() {
        let f = Field::new(2, 1).unwrap();
        assert!(matches!(
            Subspace::full(&f, 30).subspaces(&f, 15),
            Err(LinalgError::TooLarge { .. })
        ));
    }

    #[test]
    fn parallel_classes_of_an_affine_space() {
        // hyperplanes H != L of P group by H ∩ L into [r-1] classes of size q
        for (q, r) in [(2u64, 3usize), (3, 3), (2, 4), (4, 3)] {
            let f = Field::with_order(q).unwrap();
            let p = Subspace::full(&f, r);
            let hyps = p.hyperplanes(&f).unwrap();
            let l = hyps[0].clone();
            let mut classes = std::collections::BTreeMap::<Subspace, usize>::new();
            for h in hyps.iter().filter(|h| **h != l) {
                *classes.entry(h.meet(&f, &l).unwrap()).or_default() += 1;
            }
            assert_eq!(
                classes.len() as u128,
                gaussian_binomial(r as u32 - 1, r as u32 - 2, q).unwrap()
            );
            assert!(classes.values().all(|&c| c as u64 == q));
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn field_and_rows() -> impl Strategy<Value = (u64, usize, Vec<Vec<u32>>, Vec<Vec<u32>>)> {
            prop_oneof![Just(2u64), Just(3), Just(4), Just(5)].prop_flat_map(|q| {
                (1usize..6).prop_flat_map(move |n| {
                    let row = prop::collection::vec(0..q as u32, n);
                    (
                        Just(q),
                        Just(n),
                        prop::collection::vec(row.clone(), 0..5),
                        prop::collection::vec(row, 0..5),
                    )
                })
            })
        }

        fn to_vecs(f: &Field, rows: &[Vec<u32>]) -> Vec<Vector> {
            rows.iter().map(|r| v(f, r)).collect()
        }

        proptest! {
            #[test]
            fn canonical_under_change_of_generators(
                (q, n, rows, mix) in field_and_rows()
            ) {
                let f = Field::with_order(q).unwrap();
                let s = rref(&f, n, to_vecs(&f, &rows)).unwrap();
                // random combinations of the basis plus the basis itself
                let mut gens: Vec<Vector> = mix
                    .iter()
                    .map(|m| {
                        let coeffs: Vec<_> = m.iter().take(s.dim()).map(|&x| f.from_index(x).unwrap()).collect();
                        combine(&f, &coeffs, s.basis(), n)
                    })
                    .collect();
                gens.extend(s.basis().iter().rev().cloned());
                prop_assert_eq!(rref(&f, n, gens).unwrap(), s.clone());
                prop_assert_eq!(rref(&f, n, s.basis().to_vec()).unwrap(), s);
            }

            #[test]
            fn modular_dimension_law((q, n, a, b) in field_and_rows()) {
                let f = Field::with_order(q).unwrap();
                let a = rref(&f, n, to_vecs(&f, &a)).unwrap();
                let b = rref(&f, n, to_vecs(&f, &b)).unwrap();
                let join = a.join(&f, &b).unwrap();
                let meet = a.meet(&f, &b).unwrap();
                prop_assert_eq!(join.dim() + meet.dim(), a.dim() + b.dim());
                prop_assert!(join.contains_subspace(&f, &a).unwrap());
                prop_assert!(a.contains_subspace(&f, &meet).unwrap());
                prop_assert!(b.contains_subspace(&f, &meet).unwrap());
                prop_assert_eq!(a.points(&f).unwrap().len() as u128, gaussm(a.dim() as i64, q));
                if a.dim() > 0 {
                    prop_assert_eq!(a.hyperplanes(&f).unwrap().len() as u128, gaussm(a.dim() as i64, q));
                }
            }
        }
    }
}
