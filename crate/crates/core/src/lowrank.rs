//! Factored low-rank matrices `Θ S Ψᵀ` over the velocity grid.
//!
//! Every matrix keeps orthonormal column factors and a nonnegative,
//! nonincreasing core. Rank zero (empty factors) is the zero matrix and acts
//! as the identity of [`LowRankMatrix::truncated_sum`].

use nalgebra::{DMatrix, DVector};

use crate::error::LowRankError;

/// Singular values at or below `NOISE_FLOOR * σ_max` are discarded when a
/// factorization is rebuilt without an explicit tolerance.
const NOISE_FLOOR: f64 = f64::EPSILON;

#[derive(Clone, Debug, PartialEq)]
pub struct LowRankMatrix {
    left: DMatrix<f64>,
    core: DVector<f64>,
    right: DMatrix<f64>,
}

impl LowRankMatrix {
    /// The rank-0 matrix of the given shape.
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            left: DMatrix::zeros(nrows, 0),
            core: DVector::zeros(0),
            right: DMatrix::zeros(ncols, 0),
        }
    }

    /// `scale · col · rowᵀ` with normalized factors.
    ///
    /// A negative scale is absorbed into the right factor so the core stays
    /// nonnegative.
    pub fn rank1(col: &[f64], scale: f64, row: &[f64]) -> Self {
        let col = DVector::from_column_slice(col);
        let row = DVector::from_column_slice(row);
        let (nc, nr) = (col.norm(), row.norm());
        let sigma = scale * nc * nr;
        if sigma == 0.0 || !sigma.is_finite() {
            return Self::zeros(col.len(), row.len());
        }
        let sign = sigma.signum();
        Self {
            left: DMatrix::from_column_slice(col.len(), 1, (col / nc).as_slice()),
            core: DVector::from_element(1, sigma.abs()),
            right: DMatrix::from_column_slice(row.len(), 1, (row * (sign / nr)).as_slice()),
        }
    }

    /// Builds a matrix from raw factors, re-orthonormalizing them.
    ///
    /// `left` is `nrows × r`, `right` is `ncols × r`, `core` has length `r`
    /// and may hold arbitrary signs.
    pub fn from_factors(
        left: DMatrix<f64>,
        core: DVector<f64>,
        right: DMatrix<f64>,
    ) -> Result<Self, LowRankError> {
        if left.ncols() != core.len() || right.ncols() != core.len() {
            return Err(LowRankError::Dimension {
                expected: core.len(),
                found: left.ncols().max(right.ncols()),
            });
        }
        let zero = Self::zeros(left.nrows(), right.nrows());
        let raw = Self { left, core, right };
        sum_scaled(&[(1.0, &raw), (1.0, &zero)], 0.0)
    }

    pub fn nrows(&self) -> usize {
        self.left.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.right.nrows()
    }

    pub fn rank(&self) -> usize {
        self.core.len()
    }

    pub fn left(&self) -> &DMatrix<f64> {
        &self.left
    }

    pub fn core(&self) -> &DVector<f64> {
        &self.core
    }

    pub fn right(&self) -> &DMatrix<f64> {
        &self.right
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.core.norm()
    }

    /// `s · A`; the sign of `s` moves into the right factor.
    pub fn scaled(&self, s: f64) -> Self {
        if s == 0.0 {
            return Self::zeros(self.nrows(), self.ncols());
        }
        let mut out = self.clone();
        out.core *= s.abs();
        if s < 0.0 {
            out.right.neg_mut();
        }
        out
    }

    /// Drops trailing singular values `<= tol`.
    pub fn truncated(mut self, tol: f64) -> Self {
        let r = self.core.iter().take_while(|&&s| s > tol).count();
        if r < self.rank() {
            self.left = self.left.columns(0, r).into_owned();
            self.right = self.right.columns(0, r).into_owned();
            self.core = self.core.rows(0, r).into_owned();
        }
        self
    }

    /// Low-rank approximation of `self + other`, dropping singular values
    /// `<= tol` (absolute threshold).
    pub fn truncated_sum(&self, other: &Self, tol: f64) -> Result<Self, LowRankError> {
        sum_scaled(&[(1.0, self), (1.0, other)], tol)
    }

    /// Pairwise-tree reduction of `Σ terms` with [`Self::truncated_sum`].
    pub fn hierarchical_sum(terms: &[Self], tol: f64) -> Result<Self, LowRankError> {
        let scaled: Vec<(f64, &Self)> = terms.iter().map(|t| (1.0, t)).collect();
        Self::hierarchical_sum_scaled(&scaled, tol)
    }

    /// Pairwise-tree reduction of `Σ cᵢ Aᵢ`.
    ///
    /// Scalars are folded into the cores of the leaves, so the truncation
    /// threshold applies to the scaled sum itself.
    pub fn hierarchical_sum_scaled(
        terms: &[(f64, &Self)],
        tol: f64,
    ) -> Result<Self, LowRankError> {
        let Some(&(_, first)) = terms.first() else {
            return Err(LowRankError::EmptySum);
        };
        let (nr, nc) = (first.nrows(), first.ncols());
        if let Some(&(_, bad)) = terms.iter().find(|(_, t)| t.nrows() != nr || t.ncols() != nc) {
            return Err(LowRankError::Dimension {
                expected: nr,
                found: if bad.nrows() != nr { bad.nrows() } else { bad.ncols() },
            });
        }
        if terms.len() == 1 {
            let (c, a) = terms[0];
            return Ok(a.scaled(c).truncated(tol));
        }
        // First level pairs the scaled leaves directly.
        let mut level: Vec<Self> = terms
            .chunks(2)
            .map(|pair| match pair {
                [a, b] => sum_scaled(&[*a, *b], tol),
                [a] => Ok(a.1.scaled(a.0)),
                _ => unreachable!(),
            })
            .collect::<Result<_, _>>()?;
        while level.len() > 1 {
            let mut next = Vec::with_capacity(level.len().div_ceil(2));
            let mut iter = level.into_iter();
            while let Some(a) = iter.next() {
                match iter.next() {
                    Some(b) => next.push(a.truncated_sum(&b, tol)?),
                    None => next.push(a),
                }
            }
            level = next;
        }
        Ok(level.pop().expect("non-empty level"))
    }

    /// Factorization of `diag(d) · A`.
    pub fn scale_rows(&self, d: &[f64]) -> Result<Self, LowRankError> {
        check_len(d.len(), self.nrows())?;
        let mut left = self.left.clone();
        for (mut row, &di) in left.row_iter_mut().zip(d) {
            row *= di;
        }
        refactor(left, &self.core, self.right.clone())
            .ok_or(LowRankError::SvdFailed { ranks: (self.rank(), 0) })
    }

    /// Factorization of `A · diag(d)`.
    pub fn scale_cols(&self, d: &[f64]) -> Result<Self, LowRankError> {
        check_len(d.len(), self.ncols())?;
        let mut right = self.right.clone();
        for (mut row, &di) in right.row_iter_mut().zip(d) {
            row *= di;
        }
        let t = refactor(right, &self.core, self.left.clone())
            .ok_or(LowRankError::SvdFailed { ranks: (self.rank(), 0) })?;
        Ok(Self {
            left: t.right,
            core: t.core,
            right: t.left,
        })
    }

    /// Weighted double sum `Σ_{m,n} wx_m wy_n A_{mn}` evaluated on the factors
    /// in `O(N_v r + r)` work.
    pub fn lrdi(&self, wx: &[f64], wy: &[f64]) -> f64 {
        debug_assert_eq!(wx.len(), self.nrows());
        debug_assert_eq!(wy.len(), self.ncols());
        (0..self.rank())
            .map(|l| {
                let a: f64 = self.left.column(l).iter().zip(wx).map(|(u, w)| u * w).sum();
                let b: f64 = self.right.column(l).iter().zip(wy).map(|(u, w)| u * w).sum();
                self.core[l] * a * b
            })
            .sum()
    }

    /// Projections `Θᵀ w` of the left factor, one entry per rank.
    pub fn left_projection(&self, w: &[f64]) -> DVector<f64> {
        self.left.tr_mul(&DVector::from_column_slice(w))
    }

    /// Projections `Ψᵀ w` of the right factor, one entry per rank.
    pub fn right_projection(&self, w: &[f64]) -> DVector<f64> {
        self.right.tr_mul(&DVector::from_column_slice(w))
    }

    /// Row `m` of the represented matrix.
    pub fn dense_row(&self, m: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.ncols()];
        for l in 0..self.rank() {
            let c = self.core[l] * self.left[(m, l)];
            for (o, v) in out.iter_mut().zip(self.right.column(l).iter()) {
                *o += c * v;
            }
        }
        out
    }

    /// Dense reconstruction `Θ S Ψᵀ`.
    #[cfg(any(test, feature = "oracle"))]
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut scaled = self.left.clone();
        for (mut col, &s) in scaled.column_iter_mut().zip(self.core.iter()) {
            col *= s;
        }
        scaled * self.right.transpose()
    }

    /// Truncated SVD of a dense matrix.
    #[cfg(any(test, feature = "oracle"))]
    pub fn from_dense(a: &DMatrix<f64>, tol: f64) -> Result<Self, LowRankError> {
        let (u, sigma, v) =
            thin_svd(a).ok_or(LowRankError::SvdFailed { ranks: (a.nrows(), a.ncols()) })?;
        let r = sigma.iter().take_while(|&&s| s > tol).count();
        Ok(Self {
            left: u.columns(0, r).into_owned(),
            core: sigma.rows(0, r).into_owned(),
            right: v.columns(0, r).into_owned(),
        })
    }
}

fn check_len(found: usize, expected: usize) -> Result<(), LowRankError> {
    if found == expected {
        Ok(())
    } else {
        Err(LowRankError::Dimension { expected, found })
    }
}

/// Restores the invariants of `X diag(core) Yᵀ` where only `Y` is known to
/// be orthonormal.
fn refactor(x: DMatrix<f64>, core: &DVector<f64>, y: DMatrix<f64>) -> Option<LowRankMatrix> {
    let (nx, ny) = (x.nrows(), y.nrows());
    if core.is_empty() {
        return Some(LowRankMatrix::zeros(nx, ny));
    }
    let qr = x.qr();
    let q = qr.q();
    let mut rs = qr.unpack_r();
    for (mut col, &s) in rs.column_iter_mut().zip(core.iter()) {
        col *= s;
    }
    let (u, sigma, v) = thin_svd(&rs)?;
    let smax = sigma.iter().copied().fold(0.0, f64::max);
    let r = sigma.iter().take_while(|&&s| s > NOISE_FLOOR * smax).count();
    Some(LowRankMatrix {
        left: q * u.columns(0, r),
        core: sigma.rows(0, r).into_owned(),
        right: y * v.columns(0, r),
    })
}

/// Thin SVD `A = U diag(σ) Vᵀ` with `σ` non-increasing. Computed with faer:
/// nalgebra's bidiagonal iteration returns inaccurate singular vectors for
/// some strongly graded matrices, which is exactly the structure of
/// Maxwellian-like data.
fn thin_svd(a: &DMatrix<f64>) -> Option<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
    let m = faer::Mat::<f64>::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)]);
    let svd = m.thin_svd().ok()?;
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let k = s.nrows();
    Some((
        DMatrix::from_fn(a.nrows(), k, |i, j| u[(i, j)]),
        DVector::from_fn(k, |i, _| s[i]),
        DMatrix::from_fn(a.ncols(), k, |i, j| v[(i, j)]),
    ))
}

/// Truncated sum of scaled operands: augment bases, reduced QR of each,
/// SVD of the small core `R_x S R_yᵀ`, keep singular values `> tol`.
fn sum_scaled(terms: &[(f64, &LowRankMatrix)], tol: f64) -> Result<LowRankMatrix, LowRankError> {
    let (nr, nc) = (terms[0].1.nrows(), terms[0].1.ncols());
    let live: Vec<(f64, &LowRankMatrix)> = terms
        .iter()
        .copied()
        .filter(|(c, a)| *c != 0.0 && a.rank() > 0)
        .collect();
    match live.len() {
        0 => return Ok(LowRankMatrix::zeros(nr, nc)),
        1 if tol > 0.0 => return Ok(live[0].1.scaled(live[0].0).truncated(tol)),
        _ => {}
    }
    let total: usize = live.iter().map(|(_, a)| a.rank()).sum();
    let mut xs = DMatrix::zeros(nr, total);
    let mut ys = DMatrix::zeros(nc, total);
    let mut s = DVector::zeros(total);
    let mut off = 0;
    for &(c, a) in &live {
        let r = a.rank();
        xs.columns_mut(off, r).copy_from(&a.left);
        ys.columns_mut(off, r).copy_from(&a.right);
        s.rows_mut(off, r).copy_from(&(&a.core * c));
        off += r;
    }
    let qx = xs.qr();
    let qy = ys.qr();
    let mut rx = qx.r();
    for (mut col, &si) in rx.column_iter_mut().zip(s.iter()) {
        col *= si;
    }
    let small = rx * qy.r().transpose();
    let ranks = (live[0].1.rank(), live.get(1).map_or(0, |t| t.1.rank()));
    let (u, sigma, v) = thin_svd(&small).ok_or(LowRankError::SvdFailed { ranks })?;
    let floor = if tol > 0.0 {
        tol
    } else {
        NOISE_FLOOR * sigma.iter().copied().fold(0.0, f64::max)
    };
    let r = sigma.iter().take_while(|&&v| v > floor).count();
    if r == 0 {
        return Ok(LowRankMatrix::zeros(nr, nc));
    }
    Ok(LowRankMatrix {
        left: qx.q() * u.columns(0, r),
        core: sigma.rows(0, r).into_owned(),
        right: qy.q() * v.columns(0, r),
    })
}
