//! The six finite classical polar spaces.
//!
//! | kind     | ambient | e   | form                                        |
//! |----------|---------|-----|---------------------------------------------|
//! | `OPlus`  | 2d      | 0   | x1x2 + x3x4 + … + x_{2d-1}x_{2d}            |
//! | `OOdd`   | 2d+1    | 1   | x1² + x2x3 + … + x_{2d}x_{2d+1}             |
//! | `OMinus` | 2d+2    | 2   | f(x1,x2) + x3x4 + … + x_{2d+1}x_{2d+2}      |
//! | `Sp`     | 2d      | 1   | Σ x_{2i-1}y_{2i} − x_{2i}y_{2i-1}           |
//! | `UEven`  | 2d      | 1/2 | Σ x_i y_i^√q                                |
//! | `UOdd`   | 2d+1    | 3/2 | Σ x_i y_i^√q                                |
//!
//! For `OMinus`, `f = x1² + c·x1x2 + c′·x2²` with `(c, c′)` the
//! lexicographically first pair making `f` irreducible.
//!
//! Orthogonal spaces keep the quadratic form as the primary datum and use its
//! polarization `B(u,v) = Q(u+v) − Q(u) − Q(v)` for perpendicularity. In
//! characteristic 2 with odd ambient dimension `B` has a one-dimensional
//! radical (spanned by `e1`, which is not singular), so `perp` contains it;
//! among singular points perpendicularity is still exactly collinearity.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::gf::{Field, FieldElement, FieldError};
use crate::linalg::{
    gaussm, projective_points, rref, LinalgError, ProjectivePoint, Subspace, Vector,
};

/// Upper bound on the number of isotropic points [`PolarSpace::isotropic_points`] will list.
pub const POINT_LIMIT: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolarError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("unitary polar spaces need a square field order, got q = {0}")]
    NonSquareField(u64),
    #[error("rank must be at least {min}, got {d}")]
    RankTooSmall { d: usize, min: usize },
    #[error("vector has length {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subspace has dimension {found}, expected {expected}")]
    BadDimension { expected: usize, found: usize },
    #[error("subspace is not totally isotropic")]
    NotIsotropic,
    #[error("{0} has no quadratic form")]
    NoQuadraticForm(PolarKind),
    #[error("{count} isotropic points exceeds the enumeration limit")]
    TooLarge { count: u128 },
    #[error("unknown polar space kind {0:?}")]
    UnknownKind(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolarKind {
    OPlus,
    OOdd,
    OMinus,
    Sp,
    UEven,
    UOdd,
}

impl PolarKind {
    pub const ALL: [PolarKind; 6] = [
        PolarKind::OPlus,
        PolarKind::OOdd,
        PolarKind::OMinus,
        PolarKind::Sp,
        PolarKind::UEven,
        PolarKind::UOdd,
    ];

    /// Short identifier used on the command line and in files.
    pub fn slug(self) -> &'static str {
        match self {
            PolarKind::OPlus => "o-plus",
            PolarKind::OOdd => "o-odd",
            PolarKind::OMinus => "o-minus",
            PolarKind::Sp => "sp",
            PolarKind::UEven => "u-even",
            PolarKind::UOdd => "u-odd",
        }
    }

    pub fn ambient_dim(self, d: usize) -> usize {
        match self {
            PolarKind::OPlus | PolarKind::Sp | PolarKind::UEven => 2 * d,
            PolarKind::OOdd | PolarKind::UOdd => 2 * d + 1,
            PolarKind::OMinus => 2 * d + 2,
        }
    }

    /// `2e`, so that half-integral parameters stay integral.
    pub fn twice_e(self) -> u32 {
        match self {
            PolarKind::OPlus => 0,
            PolarKind::UEven => 1,
            PolarKind::OOdd | PolarKind::Sp => 2,
            PolarKind::UOdd => 3,
            PolarKind::OMinus => 4,
        }
    }

    pub fn is_orthogonal(self) -> bool {
        matches!(self, PolarKind::OPlus | PolarKind::OOdd | PolarKind::OMinus)
    }

    pub fn is_unitary(self) -> bool {
        matches!(self, PolarKind::UEven | PolarKind::UOdd)
    }

    /// Classical group notation, e.g. `Sp(6,2)`.
    pub fn label(self, d: usize, q: u64) -> String {
        let n = self.ambient_dim(d);
        match self {
            PolarKind::OPlus => format!("O+({n},{q})"),
            PolarKind::OOdd => format!("O({n},{q})"),
            PolarKind::OMinus => format!("O-({n},{q})"),
            PolarKind::Sp => format!("Sp({n},{q})"),
            PolarKind::UEven | PolarKind::UOdd => format!("U({n},{q})"),
        }
    }
}

impl fmt::Display for PolarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for PolarKind {
    type Err = PolarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PolarKind::ALL
            .into_iter()
            .find(|k| k.slug() == s)
            .ok_or_else(|| PolarError::UnknownKind(s.to_string()))
    }
}

/// Parameters `(v, k, λ, μ)` of a strongly regular graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SrgParams {
    pub v: u64,
    pub k: u64,
    pub lambda: u64,
    pub mu: u64,
}

impl SrgParams {
    /// `k(k − λ − 1) = (v − k − 1)μ`.
    pub fn is_feasible(&self) -> bool {
        self.k < self.v
            && self.lambda < self.k
            && self.k * (self.k - self.lambda - 1) == (self.v - self.k - 1) * self.mu
    }
}

impl fmt::Display for SrgParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.v, self.k, self.lambda, self.mu)
    }
}

/// Point count and collinearity count of a quotient `S^⊥/S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientSummary {
    pub rank: usize,
    pub points: usize,
    pub collinear_pairs: usize,
}

/// A polar space of a given kind, field and rank with its standard form.
#[derive(Clone, Debug)]
pub struct PolarSpace {
    kind: PolarKind,
    field: Field,
    d: usize,
    n: usize,
    /// `Q(x) = Σ c x_i x_j` over `(i, j, c)`, orthogonal kinds only.
    quad: Vec<(usize, usize, FieldElement)>,
    /// `B(u, v) = Σ c u_i σ(v_j)` over `(i, j, c)`.
    gram: Vec<(usize, usize, FieldElement)>,
    /// `σ` as a lookup table, unitary kinds only.
    conj: Option<Vec<FieldElement>>,
    minus_form: Option<(FieldElement, FieldElement)>,
}

impl PolarSpace {
    pub fn new(kind: PolarKind, q: u64, d: usize) -> Result<Self, PolarError> {
        let field = Field::with_order(q)?;
        Self::with_field(kind, field, d)
    }

    pub fn with_field(kind: PolarKind, field: Field, d: usize) -> Result<Self, PolarError> {
        if d < 1 {
            return Err(PolarError::RankTooSmall { d, min: 1 });
        }
        if kind.is_unitary() && !field.is_square_order() {
            return Err(PolarError::NonSquareField(field.order() as u64));
        }
        let n = kind.ambient_dim(d);
        let one = field.one();
        let mut quad = Vec::new();
        let mut gram = Vec::new();
        let mut conj = None;
        let mut minus_form = None;
        match kind {
            PolarKind::OPlus => {
                for j in 0..d {
                    quad.push((2 * j, 2 * j + 1, one));
                }
            }
            PolarKind::OOdd => {
                quad.push((0, 0, one));
                for j in 0..d {
                    quad.push((2 * j + 1, 2 * j + 2, one));
                }
            }
            PolarKind::OMinus => {
                let (c, c2) = irreducible_binary_quadratic(&field);
                minus_form = Some((c, c2));
                quad.push((0, 0, one));
                quad.push((0, 1, c));
                quad.push((1, 1, c2));
                for j in 1..=d {
                    quad.push((2 * j, 2 * j + 1, one));
                }
            }
            PolarKind::Sp => {
                for j in 0..d {
                    gram.push((2 * j, 2 * j + 1, one));
                    gram.push((2 * j + 1, 2 * j, field.neg(one)));
                }
            }
            PolarKind::UEven | PolarKind::UOdd => {
                for i in 0..n {
                    gram.push((i, i, one));
                }
                conj = Some(
                    field
                        .elements()
                        .map(|a| field.conjugate(a))
                        .collect::<Result<Vec<_>, _>>()?,
                );
            }
        }
        quad.retain(|t| !t.2.is_zero());
        if kind.is_orthogonal() {
            for &(i, j, c) in &quad {
                if i == j {
                    gram.push((i, i, field.add(c, c)));
                } else {
                    gram.push((i, j, c));
                    gram.push((j, i, c));
                }
            }
        }
        gram.retain(|t| !t.2.is_zero());
        Ok(PolarSpace {
            kind,
            field,
            d,
            n,
            quad,
            gram,
            conj,
            minus_form,
        })
    }

    pub fn kind(&self) -> PolarKind {
        self.kind
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.field.order() as u64
    }

    pub fn rank(&self) -> usize {
        self.d
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn twice_e(&self) -> u32 {
        self.kind.twice_e()
    }

    /// `(c, c′)` of the irreducible `f` for `OMinus`.
    pub fn minus_form(&self) -> Option<(FieldElement, FieldElement)> {
        self.minus_form
    }

    pub fn label(&self) -> String {
        self.kind.label(self.d, self.q())
    }

    fn check_len(&self, v: &[FieldElement]) -> Result<(), PolarError> {
        if v.len() != self.n {
            return Err(PolarError::DimensionMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        Ok(())
    }

    fn check_subspace(&self, s: &Subspace) -> Result<(), PolarError> {
        if s.ambient_dim() != self.n {
            return Err(PolarError::DimensionMismatch {
                expected: self.n,
                found: s.ambient_dim(),
            });
        }
        Ok(())
    }

    #[inline]
    fn sigma(&self, a: FieldElement) -> FieldElement {
        match &self.conj {
            Some(t) => t[a.index() as usize],
            None => a,
        }
    }

    /// The quadratic form; orthogonal kinds only.
    pub fn quad_eval(&self, u: &[FieldElement]) -> Result<FieldElement, PolarError> {
        if !self.kind.is_orthogonal() {
            return Err(PolarError::NoQuadraticForm(self.kind));
        }
        self.check_len(u)?;
        Ok(self.quad_unchecked(u))
    }

    fn quad_unchecked(&self, u: &[FieldElement]) -> FieldElement {
        let f = &self.field;
        self.quad.iter().fold(f.zero(), |acc, &(i, j, c)| {
            f.add(acc, f.mul(c, f.mul(u[i], u[j])))
        })
    }

    /// The reflexive form: symplectic, Hermitian, or the polarization of `Q`.
    pub fn form_eval(&self, u: &[FieldElement], v: &[FieldElement]) -> Result<FieldElement, PolarError> {
        self.check_len(u)?;
        self.check_len(v)?;
        Ok(self.form_unchecked(u, v))
    }

    fn form_unchecked(&self, u: &[FieldElement], v: &[FieldElement]) -> FieldElement {
        let f = &self.field;
        self.gram.iter().fold(f.zero(), |acc, &(i, j, c)| {
            f.add(acc, f.mul(c, f.mul(u[i], self.sigma(v[j]))))
        })
    }

    /// Coefficients `w` with `form_eval(b, v) = 0 ⇔ w · v = 0`.
    pub fn perp_equation(&self, b: &[FieldElement]) -> Vector {
        let f = &self.field;
        let mut w = vec![f.zero(); self.n];
        for &(i, j, c) in &self.gram {
            w[j] = f.add(w[j], f.mul(c, b[i]));
        }
        if self.conj.is_some() {
            // Σ w_j σ(v_j) = 0  ⇔  Σ σ(w_j) v_j = 0
            for x in w.iter_mut() {
                *x = self.sigma(*x);
            }
        }
        w
    }

    pub fn is_isotropic_vector(&self, v: &[FieldElement]) -> bool {
        if self.kind.is_orthogonal() {
            self.quad_unchecked(v).is_zero()
        } else {
            self.form_unchecked(v, v).is_zero()
        }
    }

    /// Whether the form vanishes identically on `s`.
    ///
    /// Checking the basis and all basis pairs suffices: for orthogonal kinds
    /// `Q(Σ c_i b_i) = Σ c_i² Q(b_i) + Σ_{i<j} c_i c_j B(b_i, b_j)`.
    pub fn is_isotropic(&self, s: &Subspace) -> Result<bool, PolarError> {
        self.check_subspace(s)?;
        let basis = s.basis();
        for (i, b) in basis.iter().enumerate() {
            if !self.is_isotropic_vector(b) {
                return Ok(false);
            }
            for c in &basis[i + 1..] {
                if !self.form_unchecked(b, c).is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `{v : form_eval(b, v) = 0 for every basis vector b of s}`.
    pub fn perp(&self, s: &Subspace) -> Result<Subspace, PolarError> {
        self.check_subspace(s)?;
        let eqs = s.basis().iter().map(|b| self.perp_equation(b)).collect();
        Ok(rref(&self.field, self.n, eqs)?.annihilator(&self.field))
    }

    pub fn perp_of_vector(&self, v: &[FieldElement]) -> Result<Subspace, PolarError> {
        self.check_len(v)?;
        Ok(rref(&self.field, self.n, vec![self.perp_equation(v)])?.annihilator(&self.field))
    }

    /// `q^(m/2)` for the integer `m`, `None` if negative.
    pub fn q_pow_half(&self, m: i64) -> Option<u128> {
        if m < 0 {
            return None;
        }
        let q = self.q() as u128;
        if m % 2 == 0 {
            Some(q.pow((m / 2) as u32))
        } else {
            let s = (q as f64).sqrt().round() as u128;
            (s * s == q).then(|| s.pow(m as u32))
        }
    }

    /// `(q^{t/2} + 1)·[m]`, with the convention that the product is zero when `[m]` is.
    pub(crate) fn capped(&self, twice_exp: i64, m: i64) -> u128 {
        let g = gaussm(m, self.q());
        if g == 0 {
            return 0;
        }
        let pow = self.q_pow_half(twice_exp).expect("exponent is nonnegative when [m] > 0");
        (pow + 1) * g
    }

    /// Number of points of the polar space of this kind and field at rank `r`.
    pub fn point_count_at_rank(&self, r: usize) -> u128 {
        let e2 = self.twice_e() as i64;
        let r = r as i64;
        self.capped(2 * (r - 1) + e2, r)
    }

    /// Closed-form collinearity graph parameters at rank `r ≥ 1`.
    pub fn srg_params_at_rank(&self, r: usize) -> SrgParams {
        let e2 = self.twice_e() as i64;
        let q = self.q() as u128;
        let ri = r as i64;
        let v = self.capped(2 * (ri - 1) + e2, ri);
        let k = q * self.capped(2 * (ri - 2) + e2, ri - 1);
        let lambda = q - 1 + q * q * self.capped(2 * (ri - 3) + e2, ri - 2);
        let mu = self.capped(2 * (ri - 2) + e2, ri - 1);
        SrgParams {
            v: v as u64,
            k: k as u64,
            lambda: lambda as u64,
            mu: mu as u64,
        }
    }

    /// `(v0, k0, λ0, μ0)` of the collinearity graph.
    pub fn srg_params(&self) -> Result<SrgParams, PolarError> {
        if self.d < 2 {
            return Err(PolarError::RankTooSmall { d: self.d, min: 2 });
        }
        Ok(self.srg_params_at_rank(self.d))
    }

    /// `q^e + 1`, the number of generators on a (d−1)-subspace.
    pub fn generators_per_hyperplane(&self) -> u128 {
        self.q_pow_half(self.twice_e() as i64).expect("e >= 0") + 1
    }

    /// All isotropic points, in lexicographic order of their representatives.
    pub fn isotropic_points(&self) -> Result<Vec<ProjectivePoint>, PolarError> {
        let count = self.point_count_at_rank(self.d);
        if count > POINT_LIMIT {
            return Err(PolarError::TooLarge { count });
        }
        let all = projective_points(&self.field, self.n)?;
        Ok(all
            .into_iter()
            .filter(|p| self.is_isotropic_vector(p.rep()))
            .collect())
    }

    /// Isotropic points lying in `s`, sorted.
    pub fn isotropic_points_in(&self, s: &Subspace) -> Result<Vec<ProjectivePoint>, PolarError> {
        self.check_subspace(s)?;
        Ok(s.points(&self.field)?
            .into_iter()
            .filter(|p| self.is_isotropic_vector(p.rep()))
            .collect())
    }

    /// Extends `s` one point at a time, always taking the first isotropic
    /// point of `s^⊥ ∖ s`, until `s` has dimension `target` or cannot grow.
    pub fn extend_greedily(&self, s: &Subspace, target: usize) -> Result<Subspace, PolarError> {
        if !self.is_isotropic(s)? {
            return Err(PolarError::NotIsotropic);
        }
        let mut cur = s.clone();
        while cur.dim() < target {
            let perp = self.perp(&cur)?;
            let mut next = None;
            for p in self.isotropic_points_in(&perp)? {
                if !cur.contains(&self.field, p.rep())? {
                    next = Some(p);
                    break;
                }
            }
            match next {
                Some(p) => cur = cur.join_vector(&self.field, p.rep())?,
                None => break,
            }
        }
        Ok(cur)
    }

    /// Greedy isotropic subspace of dimension `dim` grown from the first
    /// isotropic point; the default choice of `L` uses `dim = d − 1`.
    pub fn canonical_isotropic(&self, dim: usize) -> Result<Subspace, PolarError> {
        if dim > self.d {
            return Err(PolarError::BadDimension {
                expected: self.d,
                found: dim,
            });
        }
        let start = Subspace::zero(self.n);
        let s = self.extend_greedily(&start, dim)?;
        if s.dim() != dim {
            return Err(PolarError::Inconsistent(format!(
                "greedy extension stopped at dimension {}",
                s.dim()
            )));
        }
        Ok(s)
    }

    /// The generators through the isotropic (d−1)-subspace `l`, sorted.
    pub fn generators_through(&self, l: &Subspace) -> Result<Vec<Subspace>, PolarError> {
        self.check_subspace(l)?;
        if l.dim() + 1 != self.d {
            return Err(PolarError::BadDimension {
                expected: self.d - 1,
                found: l.dim(),
            });
        }
        if !self.is_isotropic(l)? {
            return Err(PolarError::NotIsotropic);
        }
        let perp = self.perp(l)?;
        let mut gens = BTreeSet::new();
        for p in self.isotropic_points_in(&perp)? {
            if !l.contains(&self.field, p.rep())? {
                gens.insert(l.join_vector(&self.field, p.rep())?);
            }
        }
        Ok(gens.into_iter().collect())
    }

    /// Points and collinear pairs of `s^⊥/s`; errors unless they match the
    /// closed forms for rank `d − dim s`.
    pub fn quotient(&self, s: &Subspace) -> Result<QuotientSummary, PolarError> {
        if !self.is_isotropic(s)? {
            return Err(PolarError::NotIsotropic);
        }
        if s.dim() >= self.d {
            return Err(PolarError::BadDimension {
                expected: self.d - 1,
                found: s.dim(),
            });
        }
        let perp = self.perp(s)?;
        let mut classes = BTreeSet::new();
        let mut reps = Vec::new();
        for p in self.isotropic_points_in(&perp)? {
            if s.contains(&self.field, p.rep())? {
                continue;
            }
            if classes.insert(s.join_vector(&self.field, p.rep())?) {
                reps.push(p);
            }
        }
        let mut collinear_pairs = 0;
        for (i, x) in reps.iter().enumerate() {
            for y in &reps[i + 1..] {
                if self.form_unchecked(x.rep(), y.rep()).is_zero() {
                    collinear_pairs += 1;
                }
            }
        }
        let rank = self.d - s.dim();
        let summary = QuotientSummary {
            rank,
            points: reps.len(),
            collinear_pairs,
        };
        let expected = self.srg_params_at_rank(rank);
        let expected_pairs = if rank >= 2 { expected.v * expected.k / 2 } else { 0 };
        if summary.points as u64 != expected.v || summary.collinear_pairs as u64 != expected_pairs {
            return Err(PolarError::Inconsistent(format!(
                "quotient has {} points and {} collinear pairs, expected {} and {}",
                summary.points, summary.collinear_pairs, expected.v, expected_pairs
            )));
        }
        Ok(summary)
    }
}

/// First `(c, c′)` in lexicographic order with `t² + c t + c′` rootless.
fn irreducible_binary_quadratic(field: &Field) -> (FieldElement, FieldElement) {
    for c in field.elements() {
        for c2 in field.elements() {
            let has_root = field.elements().any(|t| {
                field
                    .add(field.add(field.mul(t, t), field.mul(c, t)), c2)
                    .is_zero()
            });
            if !has_root {
                return (c, c2);
            }
        }
    }
    unreachable!("every finite field has an irreducible quadratic")
}
