//! Sliding-window index sets and the fully connected matrices that realise
//! standard, depthwise and pointwise convolutions.
//!
//! Index sets are 1-based. Multi-channel inputs are flattened channel-blocked:
//! every spatial position of channel 0, then channel 1, and so on.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Positions (1-based) selected by one application of a filter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(indices: Vec<usize>) -> Self {
        Self(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoweringPlan {
    input_dim: usize,
    filter_dim: usize,
    stride: usize,
    sets: Vec<IndexSet>,
}

impl LoweringPlan {
    /// Plan from arbitrary index sets. Every set must have the same length,
    /// hold distinct indices and stay inside `1..=input_dim`.
    pub fn custom(input_dim: usize, stride: usize, sets: Vec<IndexSet>) -> Result<Self> {
        let filter_dim = sets.first().map_or(0, IndexSet::len);
        if sets.is_empty() || filter_dim == 0 {
            return Err(Error::Domain("a plan needs at least one non-empty index set".into()));
        }
        if stride == 0 {
            return Err(Error::Domain("stride must be at least 1".into()));
        }
        for (j, set) in sets.iter().enumerate() {
            if set.len() != filter_dim {
                return Err(Error::DimensionMismatch(format!(
                    "index set {} has {} entries, expected {}",
                    j + 1,
                    set.len(),
                    filter_dim
                )));
            }
            let mut seen = set.0.clone();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Domain(format!("index set {} repeats an index", j + 1)));
            }
            if seen[0] == 0 || *seen.last().unwrap() > input_dim {
                return Err(Error::Domain(format!(
                    "index set {} leaves the range 1..={}",
                    j + 1,
                    input_dim
                )));
            }
        }
        Ok(Self {
            input_dim,
            filter_dim,
            stride,
            sets,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn filter_dim(&self) -> usize {
        self.filter_dim
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    /// Number of filter applications `m`.
    pub fn num_ops(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[IndexSet] {
        &self.sets
    }

    /// Stacks `channels` copies of a single-channel plan so that each window
    /// covers the same spatial positions in every channel (channel-major
    /// within the window).
    pub fn replicate_channels(&self, channels: usize) -> Result<Self> {
        if channels == 0 {
            return Err(Error::Domain("channel count must be positive".into()));
        }
        let sets = self
            .sets
            .iter()
            .map(|s| {
                IndexSet(
                    (0..channels)
                        .flat_map(|ch| s.0.iter().map(move |&i| ch * self.input_dim + i))
                        .collect(),
                )
            })
            .collect();
        Ok(Self {
            input_dim: self.input_dim * channels,
            filter_dim: self.filter_dim * channels,
            stride: self.stride,
            sets,
        })
    }

    /// True when no index appears in two different sets.
    pub fn is_disjoint(&self) -> bool {
        let mut seen = vec![false; self.input_dim + 1];
        for s in &self.sets {
            for &i in &s.0 {
                if seen[i] {
                    return false;
                }
                seen[i] = true;
            }
        }
        true
    }
}

/// Output length of a valid (unpadded) 1D sliding window.
pub fn output_len(input_len: usize, k: usize, stride: usize) -> Result<usize> {
    if k == 0 || stride == 0 {
        return Err(Error::Domain("filter size and stride must be at least 1".into()));
    }
    if k > input_len {
        return Err(Error::FilterLargerThanInput {
            filter: k,
            input: input_len,
        });
    }
    Ok((input_len - k) / stride + 1)
}

pub fn plan_1d(input_len: usize, k: usize, stride: usize) -> Result<LoweringPlan> {
    let m = output_len(input_len, k, stride)?;
    let sets = (0..m)
        .map(|j| IndexSet((1..=k).map(|t| stride * j + t).collect()))
        .collect();
    Ok(LoweringPlan {
        input_dim: input_len,
        filter_dim: k,
        stride,
        sets,
    })
}

/// Valid 2D plan over a row-major `h x w` input. Window positions and the
/// elements inside each window are both enumerated row-major.
pub fn plan_2d(h: usize, w: usize, kh: usize, kw: usize, stride: usize) -> Result<LoweringPlan> {
    let out_h = output_len(h, kh, stride)?;
    let out_w = output_len(w, kw, stride)?;
    let mut sets = Vec::with_capacity(out_h * out_w);
    for pr in 0..out_h {
        for pc in 0..out_w {
            let mut idx = Vec::with_capacity(kh * kw);
            for dr in 0..kh {
                for dc in 0..kw {
                    idx.push((pr * stride + dr) * w + pc * stride + dc + 1);
                }
            }
            sets.push(IndexSet(idx));
        }
    }
    Ok(LoweringPlan {
        input_dim: h * w,
        filter_dim: kh * kw,
        stride,
        sets,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvKind {
    Standard,
    Depthwise,
    Pointwise,
}

/// Convolution weights `W` (one filter per row) plus the metadata needed to
/// lower them.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvWeight {
    filters: DenseMatrix,
    kind: ConvKind,
    spatial_k: usize,
    channels_in: usize,
    channels_out: usize,
}

impl ConvWeight {
    /// `c_out` filters of length `channels_in * spatial_k`.
    pub fn standard(filters: DenseMatrix, spatial_k: usize, channels_in: usize) -> Result<Self> {
        if spatial_k == 0 || channels_in == 0 || filters.cols() != spatial_k * channels_in {
            return Err(Error::DimensionMismatch(format!(
                "standard filters have {} columns, expected {} channels x {} taps",
                filters.cols(),
                channels_in,
                spatial_k
            )));
        }
        Ok(Self {
            channels_out: filters.rows(),
            filters,
            kind: ConvKind::Standard,
            spatial_k,
            channels_in,
        })
    }

    /// One filter of `spatial_k` taps per channel.
    pub fn depthwise(filters: DenseMatrix) -> Self {
        let c = filters.rows();
        Self {
            spatial_k: filters.cols(),
            filters,
            kind: ConvKind::Depthwise,
            channels_in: c,
            channels_out: c,
        }
    }

    /// `c_out x c_in` channel-mixing matrix.
    pub fn pointwise(filters: DenseMatrix) -> Self {
        Self {
            channels_in: filters.cols(),
            channels_out: filters.rows(),
            filters,
            kind: ConvKind::Pointwise,
            spatial_k: 1,
        }
    }

    pub fn filters(&self) -> &DenseMatrix {
        &self.filters
    }

    pub fn kind(&self) -> ConvKind {
        self.kind
    }

    pub fn spatial_k(&self) -> usize {
        self.spatial_k
    }

    pub fn channels_in(&self) -> usize {
        self.channels_in
    }

    pub fn channels_out(&self) -> usize {
        self.channels_out
    }

    /// Number of filters `c`.
    pub fn num_filters(&self) -> usize {
        self.filters.rows()
    }

    /// Filter length `r`.
    pub fn filter_dim(&self) -> usize {
        self.filters.cols()
    }

    fn expect(&self, kind: ConvKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::KindMismatch(format!(
                "expected {:?} weights, got {:?}",
                kind, self.kind
            )))
        }
    }
}

fn check_filter_dim(w: &ConvWeight, plan: &LoweringPlan) -> Result<()> {
    if w.filter_dim() != plan.filter_dim() {
        return Err(Error::DimensionMismatch(format!(
            "filter length {} differs from plan filter_dim {}",
            w.filter_dim(),
            plan.filter_dim()
        )));
    }
    Ok(())
}

/// `γ(W)` for a standard convolution: row `i*m + j` holds filter `i` at the
/// columns of `S_j`.
pub fn gamma_standard(w: &ConvWeight, plan: &LoweringPlan) -> Result<DenseMatrix> {
    check_filter_dim(w, plan)?;
    let m = plan.num_ops();
    let c = w.num_filters();
    let mut out = DenseMatrix::zeros(m * c, plan.input_dim());
    for i in 0..c {
        let filter = w.filters().row(i);
        for (j, set) in plan.sets().iter().enumerate() {
            for (&col, &v) in set.indices().iter().zip(filter) {
                out.set(i * m + j, col - 1, v);
            }
        }
    }
    Ok(out)
}

/// `Ω(w)`: a single filter lowered with `plan`.
pub fn omega(filter: &[f64], plan: &LoweringPlan) -> Result<DenseMatrix> {
    let row = DenseMatrix::new(1, filter.len(), filter.to_vec())?;
    gamma_standard(&ConvWeight::standard(row, filter.len(), 1)?, plan)
}

/// Standard convolution evaluated by gathering inputs window by window.
pub fn mu_direct(w: &ConvWeight, plan: &LoweringPlan, z: &DenseMatrix) -> Result<DenseMatrix> {
    check_filter_dim(w, plan)?;
    check_rows(z, plan.input_dim())?;
    let m = plan.num_ops();
    let c = w.num_filters();
    let n = z.cols();
    let mut out = DenseMatrix::zeros(m * c, n);
    for i in 0..c {
        let filter = w.filters().row(i);
        for (j, set) in plan.sets().iter().enumerate() {
            for p in 0..n {
                let mut acc = 0.0;
                for (&idx, &wv) in set.indices().iter().zip(filter) {
                    if wv != 0.0 {
                        acc += wv * z.get(idx - 1, p);
                    }
                }
                out.set(i * m + j, p, acc);
            }
        }
    }
    Ok(out)
}

/// Block-diagonal `γ(W)` of a depthwise convolution; `plan` covers one
/// channel's spatial positions.
pub fn gamma_depthwise(w: &ConvWeight, plan: &LoweringPlan) -> Result<DenseMatrix> {
    w.expect(ConvKind::Depthwise)?;
    check_filter_dim(w, plan)?;
    let m = plan.num_ops();
    let spatial = plan.input_dim();
    let c = w.num_filters();
    let mut out = DenseMatrix::zeros(m * c, spatial * c);
    for i in 0..c {
        let filter = w.filters().row(i);
        for (j, set) in plan.sets().iter().enumerate() {
            for (&col, &v) in set.indices().iter().zip(filter) {
                out.set(i * m + j, i * spatial + col - 1, v);
            }
        }
    }
    Ok(out)
}

/// Depthwise convolution applied channel by channel without materialising γ.
pub fn mu_depthwise(w: &ConvWeight, plan: &LoweringPlan, z: &DenseMatrix) -> Result<DenseMatrix> {
    w.expect(ConvKind::Depthwise)?;
    check_filter_dim(w, plan)?;
    let spatial = plan.input_dim();
    let c = w.num_filters();
    check_rows(z, spatial * c)?;
    let m = plan.num_ops();
    let n = z.cols();
    let mut out = DenseMatrix::zeros(m * c, n);
    for i in 0..c {
        let filter = w.filters().row(i);
        for (j, set) in plan.sets().iter().enumerate() {
            for p in 0..n {
                let mut acc = 0.0;
                for (&idx, &wv) in set.indices().iter().zip(filter) {
                    if wv != 0.0 {
                        acc += wv * z.get(i * spatial + idx - 1, p);
                    }
                }
                out.set(i * m + j, p, acc);
            }
        }
    }
    Ok(out)
}

/// `γ(W)` of a pointwise convolution over `m` spatial positions. Under the
/// channel-blocked layout, row `i*m + s` holds `W[i][ch]` at column `ch*m + s`.
pub fn gamma_pointwise(w: &ConvWeight, m: usize) -> Result<DenseMatrix> {
    w.expect(ConvKind::Pointwise)?;
    if m == 0 {
        return Err(Error::Domain("m must be at least 1".into()));
    }
    let (c_out, c_in) = w.filters().shape();
    let mut out = DenseMatrix::zeros(c_out * m, c_in * m);
    for i in 0..c_out {
        for ch in 0..c_in {
            let v = w.filters().get(i, ch);
            for s in 0..m {
                out.set(i * m + s, ch * m + s, v);
            }
        }
    }
    Ok(out)
}

/// Pointwise convolution: mixes channels independently at each position.
pub fn mu_pointwise(w: &ConvWeight, m: usize, z: &DenseMatrix) -> Result<DenseMatrix> {
    w.expect(ConvKind::Pointwise)?;
    let (c_out, c_in) = w.filters().shape();
    check_rows(z, c_in * m)?;
    let n = z.cols();
    let mut out = DenseMatrix::zeros(c_out * m, n);
    for i in 0..c_out {
        for s in 0..m {
            for p in 0..n {
                let mut acc = 0.0;
                for ch in 0..c_in {
                    let wv = w.filters().get(i, ch);
                    if wv != 0.0 {
                        acc += wv * z.get(ch * m + s, p);
                    }
                }
                out.set(i * m + s, p, acc);
            }
        }
    }
    Ok(out)
}

/// `Θ(V, I_m) = V ⊗ I_m`: block `(i, j)` is `V[i][j] * I_m`.
pub fn theta(v: &DenseMatrix, m: usize) -> Result<DenseMatrix> {
    if !v.is_square() {
        return Err(Error::NotSquare {
            rows: v.rows(),
            cols: v.cols(),
        });
    }
    if m == 0 {
        return Err(Error::Domain("m must be at least 1".into()));
    }
    let n = v.rows();
    let mut out = DenseMatrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            let x = v.get(i, j);
            for s in 0..m {
                out.set(i * m + s, j * m + s, x);
            }
        }
    }
    Ok(out)
}

fn check_rows(z: &DenseMatrix, expected: usize) -> Result<()> {
    if z.rows() != expected {
        return Err(Error::DimensionMismatch(format!(
            "input has {} rows, expected {}",
            z.rows(),
            expected
        )));
    }
    Ok(())
}
