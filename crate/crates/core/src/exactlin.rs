//! Exact rational arithmetic and sparse linear algebra.
//!
//! Everything here works over [`Scalar`] (arbitrary-precision rationals), so
//! every identity checked downstream is checked with zero tolerance.
//!
//! Matrices are stored as sparse rows sorted by column index. Row reduction
//! always pivots on the lowest column carrying a nonzero entry, which makes
//! the reduced row-echelon form, and therefore every nullspace basis derived
//! from it, a deterministic function of the input.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Ground-field element. `BigRational` keeps numerator and denominator
/// coprime with a positive denominator, and represents zero as `0/1`.
pub type Scalar = BigRational;

/// Integer scalar.
pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

/// `num / den` as a scalar. Panics if `den == 0`.
pub fn frac(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

/// `2^exp` for any integer exponent.
pub fn pow2(exp: i64) -> Scalar {
    let two = int(2);
    if exp >= 0 {
        num_traits::pow(two, exp as usize)
    } else {
        num_traits::pow(two, (-exp) as usize).recip()
    }
}

/// A finitely supported vector indexed by an ordered key type.
///
/// No stored coefficient is ever zero, so structural equality is
/// mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparseVec<K: Ord> {
    entries: BTreeMap<K, Scalar>,
}

impl<K: Ord> Default for SparseVec<K> {
    fn default() -> Self {
        SparseVec {
            entries: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> SparseVec<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit(key: K) -> Self {
        Self::term(key, Scalar::one())
    }

    pub fn term(key: K, coeff: Scalar) -> Self {
        let mut v = Self::zero();
        v.add_term(key, coeff);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Coefficient at `key` (zero when absent).
    pub fn coeff(&self, key: &K) -> Scalar {
        self.entries.get(key).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn get(&self, key: &K) -> Option<&Scalar> {
        self.entries.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Scalar)> {
        self.entries.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.entries.keys()
    }

    /// Smallest key in the support.
    pub fn first_key(&self) -> Option<&K> {
        self.entries.keys().next()
    }

    pub fn last_key(&self) -> Option<&K> {
        self.entries.keys().next_back()
    }

    pub fn add_term(&mut self, key: K, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.entries.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, other: &SparseVec<K>, factor: &Scalar) {
        if factor.is_zero() {
            return;
        }
        for (k, c) in other.iter() {
            self.add_term(k.clone(), c * factor);
        }
    }

    pub fn scaled(&self, factor: &Scalar) -> SparseVec<K> {
        if factor.is_zero() {
            return Self::zero();
        }
        SparseVec {
            entries: self
                .entries
                .iter()
                .map(|(k, c)| (k.clone(), c * factor))
                .collect(),
        }
    }

    pub fn plus(&self, other: &SparseVec<K>) -> SparseVec<K> {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::one());
        out
    }

    pub fn minus(&self, other: &SparseVec<K>) -> SparseVec<K> {
        let mut out = self.clone();
        out.add_scaled(other, &-Scalar::one());
        out
    }

    /// Keeps only the entries whose key satisfies `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&K) -> bool) -> SparseVec<K> {
        SparseVec {
            entries: self
                .entries
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Relabels keys; colliding keys are summed.
    pub fn map_keys<L: Ord + Clone>(&self, mut f: impl FnMut(&K) -> L) -> SparseVec<L> {
        let mut out = SparseVec::zero();
        for (k, c) in self.iter() {
            out.add_term(f(k), c.clone());
        }
        out
    }

    pub fn dot(&self, other: &SparseVec<K>) -> Scalar {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .iter()
            .filter_map(|(k, c)| large.get(k).map(|d| c * d))
            .fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl<K: Ord + Clone> FromIterator<(K, Scalar)> for SparseVec<K> {
    fn from_iter<T: IntoIterator<Item = (K, Scalar)>>(iter: T) -> Self {
        let mut v = SparseVec::zero();
        for (k, c) in iter {
            v.add_term(k, c);
        }
        v
    }
}

impl<K: Ord + fmt::Debug> fmt::Debug for SparseVec<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.entries.iter().map(|(k, c)| (k, c.to_string())))
            .finish()
    }
}

/// Column vector, indexed by position.
pub type ColVec = SparseVec<usize>;

/// Dense helper: builds a column vector from a slice of scalars.
pub fn col_vec(values: &[Scalar]) -> ColVec {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| (i, v.clone()))
        .collect()
}

/// Sparse rational matrix, stored by rows.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RatMatrix {
    rows: Vec<ColVec>,
    ncols: usize,
}

impl RatMatrix {
    pub fn new(ncols: usize) -> Self {
        RatMatrix {
            rows: Vec::new(),
            ncols,
        }
    }

    /// Builds a matrix from sparse rows. Panics if a row has a column index
    /// `>= ncols`.
    pub fn from_rows(ncols: usize, rows: Vec<ColVec>) -> Self {
        let mut m = RatMatrix::new(ncols);
        for r in rows {
            m.push_row(r);
        }
        m
    }

    pub fn from_dense(ncols: usize, rows: &[Vec<Scalar>]) -> Self {
        Self::from_rows(ncols, rows.iter().map(|r| col_vec(r)).collect())
    }

    /// Integer convenience constructor, mostly for tests.
    pub fn from_i64(ncols: usize, rows: &[&[i64]]) -> Self {
        Self::from_rows(
            ncols,
            rows.iter()
                .map(|r| r.iter().enumerate().map(|(i, &v)| (i, int(v))).collect())
                .collect(),
        )
    }

    pub fn push_row(&mut self, row: ColVec) {
        if let Some(&last) = row.last_key() {
            assert!(
                last < self.ncols,
                "column index {last} out of range for {} columns",
                self.ncols
            );
        }
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[ColVec] {
        &self.rows
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// `M · v`.
    pub fn mul_vec(&self, v: &ColVec) -> ColVec {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.dot(v)))
            .collect()
    }

    /// `u · M` for a row-indexed `u`.
    pub fn left_mul(&self, u: &ColVec) -> ColVec {
        let mut out = ColVec::zero();
        for (&i, c) in u.iter() {
            if let Some(r) = self.rows.get(i) {
                out.add_scaled(r, c);
            }
        }
        out
    }
}

/// Incremental Gauss-Jordan reducer.
///
/// Holds a set of rows in reduced row-echelon form keyed by pivot column:
/// every stored row has a leading 1 at its pivot and zeros at all other
/// pivot columns.
#[derive(Clone, Debug, Default)]
pub struct RowReducer {
    pivots: BTreeMap<usize, ColVec>,
}

impl RowReducer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    /// Rows of the reduced form, ordered by pivot column.
    pub fn rows(&self) -> impl Iterator<Item = &ColVec> {
        self.pivots.values()
    }

    /// Reduces `row` against the stored pivots. The result has no entries in
    /// pivot columns.
    pub fn reduce(&self, row: &ColVec) -> ColVec {
        let mut out = row.clone();
        let hits: Vec<(usize, Scalar)> = row
            .iter()
            .filter(|(c, _)| self.pivots.contains_key(c))
            .map(|(c, v)| (*c, v.clone()))
            .collect();
        // Stored rows are fully reduced, so subtracting one never creates an
        // entry in another pivot column.
        for (col, coeff) in hits {
            out.add_scaled(&self.pivots[&col], &-coeff);
        }
        out
    }

    /// Adds `row` to the span. Returns `true` if it was independent of the
    /// rows already present.
    pub fn insert(&mut self, row: &ColVec) -> bool {
        let reduced = self.reduce(row);
        let Some(&pivot) = reduced.first_key() else {
            return false;
        };
        let lead = reduced.coeff(&pivot);
        let normalized = reduced.scaled(&lead.recip());
        for other in self.pivots.values_mut() {
            let c = other.coeff(&pivot);
            if !c.is_zero() {
                other.add_scaled(&normalized, &-c);
            }
        }
        self.pivots.insert(pivot, normalized);
        true
    }

    /// True iff `row` lies in the span of the inserted rows.
    pub fn contains(&self, row: &ColVec) -> bool {
        self.reduce(row).is_zero()
    }
}

/// Reduced row-echelon form and rank.
pub fn rref(m: &RatMatrix) -> (RatMatrix, usize) {
    let mut red = RowReducer::new();
    for r in m.rows() {
        red.insert(r);
    }
    let rank = red.rank();
    (RatMatrix::from_rows(m.ncols(), red.rows().cloned().collect()), rank)
}

/// Basis of `{v : M v = 0}`.
///
/// One vector per free column, in increasing column order; the vector for
/// free column `f` has a 1 at `f` and zeros at every other free column.
pub fn nullspace(m: &RatMatrix) -> Vec<ColVec> {
    let mut red = RowReducer::new();
    for r in m.rows() {
        red.insert(r);
    }
    nullspace_of_reduced(&red, m.ncols())
}

pub(crate) fn nullspace_of_reduced(red: &RowReducer, ncols: usize) -> Vec<ColVec> {
    let pivots: Vec<(usize, &ColVec)> = red.pivots.iter().map(|(c, r)| (*c, r)).collect();
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; ncols];
        for (c, _) in &pivots {
            v[*c] = true;
        }
        v
    };
    // Column -> list of (pivot column, entry) for fast kernel assembly.
    let mut by_free: BTreeMap<usize, Vec<(usize, Scalar)>> = BTreeMap::new();
    for (pc, row) in &pivots {
        for (c, v) in row.iter() {
            if *c != *pc {
                by_free.entry(*c).or_default().push((*pc, v.clone()));
            }
        }
    }
    (0..ncols)
        .filter(|c| !is_pivot[*c])
        .map(|free| {
            let mut v = ColVec::unit(free);
            if let Some(entries) = by_free.get(&free) {
                for (pc, val) in entries {
                    v.add_term(*pc, -val.clone());
                }
            }
            v
        })
        .collect()
}

/// Outcome of an exact linear feasibility query `A v = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    /// A solution with all free variables set to zero.
    Feasible(ColVec),
    /// A left-nullspace witness `u` with `u A = 0` and `u b != 0`.
    Infeasible { certificate: ColVec },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn solution(&self) -> Option<&ColVec> {
        match self {
            Feasibility::Feasible(v) => Some(v),
            Feasibility::Infeasible { .. } => None,
        }
    }
}

/// Decides `A v = b` exactly.
///
/// Each row is augmented with `b` and with an identity block that records
/// which combination of original rows produced it, so an inconsistent row
/// carries its own certificate.
pub fn solve_feasible(a: &RatMatrix, b: &ColVec) -> Feasibility {
    let n = a.ncols();
    let rhs_col = n;
    let tag = |i: usize| n + 1 + i;
    let mut red = RowReducer::new();
    for (i, row) in a.rows().iter().enumerate() {
        let mut aug = row.clone();
        aug.add_term(rhs_col, b.coeff(&i));
        aug.add_term(tag(i), Scalar::one());
        red.insert(&aug);
    }
    if let Some(row) = red.pivots.get(&rhs_col) {
        let certificate = row
            .iter()
            .filter(|(c, _)| **c > rhs_col)
            .map(|(c, v)| (c - rhs_col - 1, v.clone()))
            .collect();
        return Feasibility::Infeasible { certificate };
    }
    let solution = red
        .pivots
        .iter()
        .filter(|(c, _)| **c < n)
        .map(|(c, row)| (*c, row.coeff(&rhs_col)))
        .collect();
    Feasibility::Feasible(solution)
}

/// True iff `v` is a rational linear combination of `basis`.
pub fn in_span<K: Ord + Clone>(v: &SparseVec<K>, basis: &[SparseVec<K>]) -> bool {
    let mut index: BTreeMap<K, usize> = BTreeMap::new();
    for k in basis.iter().flat_map(|b| b.keys()).chain(v.keys()) {
        let next = index.len();
        index.entry(k.clone()).or_insert(next);
    }
    let mut red = RowReducer::new();
    for b in basis {
        red.insert(&b.map_keys(|k| index[k]));
    }
    red.contains(&v.map_keys(|k| index[k]))
}

/// Rank of a list of vectors.
pub fn rank_of<K: Ord + Clone>(vectors: &[SparseVec<K>]) -> usize {
    let mut index: BTreeMap<K, usize> = BTreeMap::new();
    for k in vectors.iter().flat_map(|b| b.keys()) {
        let next = index.len();
        index.entry(k.clone()).or_insert(next);
    }
    let mut red = RowReducer::new();
    for b in vectors {
        red.insert(&b.map_keys(|k| index[k]));
    }
    red.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(ncols: usize, rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_i64(ncols, rows)
    }

    #[test]
    fn scalar_normal_form() {
        let s = frac(6, -4);
        assert_eq!(s.numer(), &BigInt::from(-3));
        assert_eq!(s.denom(), &BigInt::from(2));
        assert_eq!(frac(0, 5), Scalar::zero());
        assert_eq!(frac(0, 5).denom(), &BigInt::from(1));
        assert_eq!(pow2(-3), frac(1, 8));
        assert_eq!(pow2(4), int(16));
    }

    #[test]
    fn sparse_vec_drops_zeros() {
        let mut v = SparseVec::unit(3usize);
        v.add_term(3, int(-1));
        assert!(v.is_zero());
        v.add_term(1, Scalar::zero());
        assert!(v.is_empty());
    }

    #[test]
    fn rref_identity_zero_dependent() {
        let id = m(2, &[&[1, 0], &[0, 1]]);
        assert_eq!(rref(&id), (id.clone(), 2));

        let (r, rank) = rref(&m(2, &[&[0, 0], &[0, 0]]));
        assert_eq!(rank, 0);
        assert_eq!(r.nrows(), 0);

        let (r, rank) = rref(&m(2, &[&[1, 2], &[2, 4]]));
        assert_eq!(rank, 1);
        assert_eq!(r, m(2, &[&[1, 2]]));
    }

    #[test]
    fn rref_normalizes_and_back_substitutes() {
        let (r, rank) = rref(&m(3, &[&[0, 2, 4], &[3, 0, 3], &[3, 2, 7]]));
        assert_eq!(rank, 2);
        assert_eq!(r, m(3, &[&[1, 0, 1], &[0, 1, 2]]));
    }

    #[test]
    fn nullspace_examples() {
        assert!(nullspace(&m(2, &[&[1, 0], &[0, 1]])).is_empty());

        let ns = nullspace(&m(2, &[&[1, -1]]));
        assert_eq!(ns, vec![col_vec(&[int(1), int(1)])]);

        let a = m(3, &[&[1, 2, 3]]);
        let ns = nullspace(&a);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(a.mul_vec(v).is_zero());
        }
        assert_eq!(rank_of(&ns), 2);
    }

    #[test]
    fn feasible_examples() {
        let id = m(2, &[&[1, 0], &[0, 1]]);
        let b = col_vec(&[int(3), int(-1)]);
        assert_eq!(solve_feasible(&id, &b), Feasibility::Feasible(b.clone()));

        let a = m(2, &[&[1, 1]]);
        let b = col_vec(&[int(2)]);
        let v = solve_feasible(&a, &b).solution().cloned().unwrap();
        assert_eq!(a.mul_vec(&v), b);
    }

    #[test]
    fn infeasible_with_certificate() {
        let a = m(2, &[&[1, 0], &[1, 0]]);
        let b = col_vec(&[int(1), int(2)]);
        match solve_feasible(&a, &b) {
            Feasibility::Infeasible { certificate } => {
                // Proportional to (1, -1).
                let ratio = certificate.coeff(&0) / certificate.coeff(&1);
                assert_eq!(ratio, int(-1));
                assert!(a.left_mul(&certificate).is_zero());
                assert!(!certificate.dot(&b).is_zero());
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn feasible_with_empty_matrix() {
        let a = RatMatrix::new(3);
        assert!(solve_feasible(&a, &ColVec::zero()).is_feasible());
    }

    #[test]
    fn span_examples() {
        let basis = vec![col_vec(&[int(1), int(0)])];
        assert!(in_span(&ColVec::zero(), &basis));
        assert!(in_span(&ColVec::zero(), &[]));
        assert!(!in_span(&col_vec(&[int(1), int(1)]), &basis));
        assert!(in_span(
            &col_vec(&[int(2), int(4)]),
            &[col_vec(&[int(1), int(2)])]
        ));
    }
}
