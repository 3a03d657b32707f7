//! Closed-form norm bounds for lowered convolutions and the banded Toeplitz
//! machinery behind the overlapping depthwise case.

use crate::error::{Error, Result};
use crate::linalg::{self, frobenius_norm, norm_inf_row_l1, DenseMatrix};
use crate::lowering::{ConvKind, ConvWeight};

/// `√m ‖W‖_F`, an upper bound on `‖γ(W)‖_σ` for a standard convolution.
pub fn bound_standard(w: &ConvWeight, m: usize) -> f64 {
    (m as f64).sqrt() * frobenius_norm(w.filters())
}

/// Exact `‖γ(W)‖_F = √m ‖W‖_F` when every filter is applied `m` times.
pub fn gamma_f_norm_standard(w: &ConvWeight, m: usize) -> f64 {
    bound_standard(w, m)
}

/// `max_i ‖w^i‖_2`: the exact spectral norm of a depthwise convolution whose
/// windows do not overlap.
pub fn exact_depthwise_nonoverlap(w: &ConvWeight) -> Result<f64> {
    expect_kind(w, ConvKind::Depthwise)?;
    let f = w.filters();
    Ok((0..f.rows()).map(|i| linalg::l2(f.row(i))).fold(0.0, f64::max))
}

/// `‖W‖_F`, the non-overlapping depthwise bound.
pub fn bound_depthwise_nonoverlap(w: &ConvWeight) -> Result<f64> {
    expect_kind(w, ConvKind::Depthwise)?;
    Ok(frobenius_norm(w.filters()))
}

/// `‖W‖_∞` (max row ℓ1), the overlapping depthwise bound.
pub fn bound_depthwise_overlap(w: &ConvWeight) -> Result<f64> {
    expect_kind(w, ConvKind::Depthwise)?;
    Ok(norm_inf_row_l1(w.filters()))
}

/// Exact `‖γ(W)‖_σ = ‖W‖_σ` for a pointwise convolution, from the small matrix.
pub fn spectral_pointwise(w: &ConvWeight) -> Result<f64> {
    expect_kind(w, ConvKind::Pointwise)?;
    linalg::spectral_norm_dense_oracle(w.filters())
}

/// `a √d_out`, bounding the 2,1-norm of a fully connected matrix.
pub fn bound_21_fc(a: f64, d_out: usize) -> f64 {
    a * (d_out as f64).sqrt()
}

/// `a m √c`, bounding the 2,1-norm of `γ(W)` for `c` filters applied `m` times.
pub fn bound_21_conv(a: f64, m: usize, c: usize) -> f64 {
    a * m as f64 * (c as f64).sqrt()
}

fn expect_kind(w: &ConvWeight, kind: ConvKind) -> Result<()> {
    if w.kind() == kind {
        Ok(())
    } else {
        Err(Error::KindMismatch(format!(
            "expected {:?} weights, got {:?}",
            kind,
            w.kind()
        )))
    }
}

/// Generating sequence `t_0..t_b` of a symmetric banded Toeplitz matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzSpec {
    t: Vec<f64>,
}

impl ToeplitzSpec {
    /// From an explicit sequence `t_0..t_b`.
    pub fn new(t: Vec<f64>) -> Result<Self> {
        if t.is_empty() {
            return Err(Error::Domain("Toeplitz sequence needs t_0".into()));
        }
        if t.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("Toeplitz sequence must be finite".into()));
        }
        Ok(Self { t })
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn band(&self) -> usize {
        self.t.len() - 1
    }

    /// `t_s`, zero beyond the band.
    pub fn at(&self, s: usize) -> f64 {
        self.t.get(s).copied().unwrap_or(0.0)
    }

    /// The `n x n` matrix with entry `(p, q) = t_{|p-q|}`.
    pub fn materialize(&self, n: usize) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(n, n);
        for p in 0..n {
            for q in 0..n {
                out.set(p, q, self.at(p.abs_diff(q)));
            }
        }
        out
    }
}

/// `t_s = Σ_{j=1}^{k-sl} w_{sl+j} w_j` for `s = 0..=⌈k/l⌉`; empty sums are zero.
pub fn toeplitz_sequence(w: &[f64], stride: usize) -> Result<ToeplitzSpec> {
    let k = w.len();
    if stride == 0 || stride >= k {
        return Err(Error::NotOverlapping { k, stride });
    }
    let b = k.div_ceil(stride);
    let t = (0..=b)
        .map(|s| {
            let shift = s * stride;
            if shift >= k {
                0.0
            } else {
                (0..k - shift).map(|j| w[shift + j] * w[j]).sum()
            }
        })
        .collect();
    ToeplitzSpec::new(t)
}

/// `|t_0| + 2 Σ_{i=1}^{b} |t_i|`, bounding every eigenvalue of the matrix.
pub fn toeplitz_eig_bound(spec: &ToeplitzSpec) -> f64 {
    spec.t[0].abs() + 2.0 * spec.t[1..].iter().map(|x| x.abs()).sum::<f64>()
}
