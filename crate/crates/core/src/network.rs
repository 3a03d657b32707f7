//! Architecture description, validation, forward evaluation and per-layer
//! norm extraction.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::{Error, Result};
use crate::linalg::{self, frobenius_norm, norm_2_1, DenseMatrix, DEFAULT_ORACLE_CAP};
use crate::lowering::{self, ConvWeight, LoweringPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerKind {
    FullyConnected,
    StandardConv,
    DepthwiseConv,
    PointwiseConv,
}

impl LayerKind {
    pub fn is_conv(self) -> bool {
        self != LayerKind::FullyConnected
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LayerKind::FullyConnected => "fully_connected",
            LayerKind::StandardConv => "standard_conv",
            LayerKind::DepthwiseConv => "depthwise_conv",
            LayerKind::PointwiseConv => "pointwise_conv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Identity,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Identity => x,
        }
    }
}

/// One layer. Conv layers read their input as `c_in` channel blocks of
/// `d_in / c_in` positions; `in_h` switches to a 2D `in_h x (spatial/in_h)`
/// grid with a square `k x k` kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub kind: LayerKind,
    pub d_in: usize,
    pub d_out: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_in: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_out: Option<usize>,
    pub lipschitz: f64,
    pub activation: Activation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub in_h: Option<usize>,
}

impl LayerSpec {
    pub fn fully_connected(d_in: usize, d_out: usize, activation: Activation) -> Self {
        Self {
            kind: LayerKind::FullyConnected,
            d_in,
            d_out,
            k: None,
            stride: None,
            c_in: None,
            c_out: None,
            lipschitz: 1.0,
            activation,
            in_h: None,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn conv(
        kind: LayerKind,
        c_in: usize,
        c_out: usize,
        in_h: Option<usize>,
        spatial: usize,
        k: usize,
        stride: usize,
        activation: Activation,
    ) -> Result<Self> {
        let mut spec = Self {
            kind,
            d_in: c_in * spatial,
            d_out: 0,
            k: Some(k),
            stride: Some(stride),
            c_in: Some(c_in),
            c_out: Some(c_out),
            lipschitz: 1.0,
            activation,
            in_h,
        };
        spec.d_out = spec.geometry()?.d_out();
        Ok(spec)
    }

    /// 1D standard convolution over `len` positions per channel.
    pub fn standard_1d(
        c_in: usize,
        c_out: usize,
        len: usize,
        k: usize,
        stride: usize,
        act: Activation,
    ) -> Result<Self> {
        Self::conv(LayerKind::StandardConv, c_in, c_out, None, len, k, stride, act)
    }

    /// 2D standard convolution on `h x w` inputs with a `k x k` kernel.
    pub fn standard_2d(
        c_in: usize,
        c_out: usize,
        h: usize,
        w: usize,
        k: usize,
        stride: usize,
        act: Activation,
    ) -> Result<Self> {
        Self::conv(LayerKind::StandardConv, c_in, c_out, Some(h), h * w, k, stride, act)
    }

    pub fn depthwise_1d(c: usize, len: usize, k: usize, stride: usize, act: Activation) -> Result<Self> {
        Self::conv(LayerKind::DepthwiseConv, c, c, None, len, k, stride, act)
    }

    pub fn depthwise_2d(c: usize, h: usize, w: usize, k: usize, stride: usize, act: Activation) -> Result<Self> {
        Self::conv(LayerKind::DepthwiseConv, c, c, Some(h), h * w, k, stride, act)
    }

    /// Pointwise convolution over `m` spatial positions.
    pub fn pointwise(c_in: usize, c_out: usize, m: usize, act: Activation) -> Result<Self> {
        Self::conv(LayerKind::PointwiseConv, c_in, c_out, None, m, 1, 1, act)
    }

    pub fn with_lipschitz(mut self, rho: f64) -> Self {
        self.lipschitz = rho;
        self
    }

    /// Spatial geometry of a conv layer.
    pub fn geometry(&self) -> Result<ConvGeometry> {
        if !self.kind.is_conv() {
            return Err(Error::KindMismatch(
                "fully connected layers have no conv geometry".into(),
            ));
        }
        let field = |v: Option<usize>, name: &str| {
            v.filter(|&x| x > 0)
                .ok_or_else(|| Error::Domain(format!("{name} must be a positive integer")))
        };
        let c_in = field(self.c_in, "c_in")?;
        let c_out = field(self.c_out, "c_out")?;
        let k = field(self.k, "k")?;
        let stride = field(self.stride, "stride")?;
        if !self.d_in.is_multiple_of(c_in) {
            return Err(Error::DimensionMismatch(format!(
                "d_in {} is not a multiple of c_in {}",
                self.d_in, c_in
            )));
        }
        let spatial = self.d_in / c_in;
        let (in_h, in_w) = match self.in_h {
            None => (1, spatial),
            Some(h) => {
                if h == 0 || !spatial.is_multiple_of(h) {
                    return Err(Error::DimensionMismatch(format!(
                        "in_h {} does not divide the {} spatial positions",
                        h, spatial
                    )));
                }
                (h, spatial / h)
            }
        };
        let two_d = self.in_h.is_some();
        let (out_h, out_w) = if two_d {
            (
                lowering::output_len(in_h, k, stride)?,
                lowering::output_len(in_w, k, stride)?,
            )
        } else {
            (1, lowering::output_len(in_w, k, stride)?)
        };
        Ok(ConvGeometry {
            c_in,
            c_out,
            k,
            stride,
            in_h,
            in_w,
            two_d,
            out_h,
            out_w,
        })
    }

    /// Expected weight shape (rows, cols).
    pub fn weight_shape(&self) -> Result<(usize, usize)> {
        if self.kind == LayerKind::FullyConnected {
            return Ok((self.d_out, self.d_in));
        }
        let g = self.geometry()?;
        Ok(match self.kind {
            LayerKind::StandardConv => (g.c_out, g.c_in * g.taps()),
            LayerKind::DepthwiseConv => (g.c_in, g.taps()),
            LayerKind::PointwiseConv => (g.c_out, g.c_in),
            LayerKind::FullyConnected => unreachable!(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvGeometry {
    pub c_in: usize,
    pub c_out: usize,
    pub k: usize,
    pub stride: usize,
    pub in_h: usize,
    pub in_w: usize,
    pub two_d: bool,
    pub out_h: usize,
    pub out_w: usize,
}

impl ConvGeometry {
    /// Filter taps per channel.
    pub fn taps(&self) -> usize {
        if self.two_d {
            self.k * self.k
        } else {
            self.k
        }
    }

    pub fn spatial_in(&self) -> usize {
        self.in_h * self.in_w
    }

    /// Outputs per filter `m`.
    pub fn spatial_out(&self) -> usize {
        self.out_h * self.out_w
    }

    pub fn d_out(&self) -> usize {
        self.c_out * self.spatial_out()
    }

    /// Single-channel plan over the spatial grid.
    pub fn spatial_plan(&self) -> Result<LoweringPlan> {
        if self.two_d {
            lowering::plan_2d(self.in_h, self.in_w, self.k, self.k, self.stride)
        } else {
            lowering::plan_1d(self.in_w, self.k, self.stride)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub input_dim: usize,
    pub layers: Vec<LayerSpec>,
}

/// One validation failure. `layer` is 1-based; 0 marks network-level issues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub layer: usize,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.layer == 0 {
            write!(f, "network: {}", self.message)
        } else {
            write!(f, "layer {}: {}", self.layer, self.message)
        }
    }
}

impl NetworkSpec {
    pub fn new(input_dim: usize, layers: Vec<LayerSpec>) -> Self {
        Self { input_dim, layers }
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(self.input_dim, |l| l.d_out)
    }

    /// Every violated invariant, in layer order. Empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |layer: usize, message: String| out.push(Violation { layer, message });
        if self.layers.is_empty() {
            push(0, "L must be >= 1".into());
        }
        if self.input_dim == 0 {
            push(0, "input_dim must be positive".into());
        }
        let mut prev = self.input_dim;
        for (idx, layer) in self.layers.iter().enumerate() {
            let i = idx + 1;
            if layer.d_in != prev {
                push(
                    i,
                    format!("d_in {} does not match previous output {}", layer.d_in, prev),
                );
            }
            prev = layer.d_out;
            if layer.d_in == 0 || layer.d_out == 0 {
                push(i, "dimensions must be positive".into());
            }
            if !(layer.lipschitz.is_finite() && layer.lipschitz > 0.0) {
                push(
                    i,
                    format!("lipschitz constant {} must be positive and finite", layer.lipschitz),
                );
            } else {
                match layer.activation {
                    Activation::Relu if layer.lipschitz != 1.0 => {
                        push(i, format!("relu is 1-Lipschitz but lipschitz = {}", layer.lipschitz))
                    }
                    Activation::Identity if layer.lipschitz < 1.0 => {
                        push(i, format!("identity needs lipschitz >= 1, got {}", layer.lipschitz))
                    }
                    _ => {}
                }
            }
            if !layer.kind.is_conv() {
                if layer.k.is_some() || layer.stride.is_some() || layer.in_h.is_some() {
                    push(i, "fully connected layers take no k, stride or in_h".into());
                }
                continue;
            }
            let g = match layer.geometry() {
                Ok(g) => g,
                Err(e) => {
                    push(i, e.to_string());
                    continue;
                }
            };
            if g.d_out() != layer.d_out {
                push(i, format!("d_out {} differs from m*c_out = {}", layer.d_out, g.d_out()));
            }
            match layer.kind {
                LayerKind::DepthwiseConv if g.c_in != g.c_out => push(
                    i,
                    format!("depthwise needs c_in == c_out, got {} and {}", g.c_in, g.c_out),
                ),
                LayerKind::PointwiseConv if g.k != 1 || g.stride != 1 => {
                    push(i, "pointwise layers need k = 1 and stride = 1".into())
                }
                _ => {}
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            let msg: Vec<String> = v.iter().map(ToString::to_string).collect();
            Err(Error::Domain(msg.join("; ")))
        }
    }
}

fn check_weight(layer: &LayerSpec, weight: &DenseMatrix) -> Result<()> {
    let expected = layer.weight_shape()?;
    if weight.shape() != expected {
        return Err(Error::DimensionMismatch(format!(
            "{} weight is {}x{}, expected {}x{}",
            layer.kind.as_str(),
            weight.rows(),
            weight.cols(),
            expected.0,
            expected.1
        )));
    }
    Ok(())
}

/// Weight wrapped with the conv metadata of its layer.
pub fn conv_weight(layer: &LayerSpec, weight: &DenseMatrix) -> Result<ConvWeight> {
    check_weight(layer, weight)?;
    let g = layer.geometry()?;
    Ok(match layer.kind {
        LayerKind::StandardConv => ConvWeight::standard(weight.clone(), g.taps(), g.c_in)?,
        LayerKind::DepthwiseConv => ConvWeight::depthwise(weight.clone()),
        LayerKind::PointwiseConv => ConvWeight::pointwise(weight.clone()),
        LayerKind::FullyConnected => unreachable!("geometry() rejects fully connected layers"),
    })
}

/// The plan `γ` is built from: channel-replicated for standard layers,
/// single-channel spatial for depthwise and pointwise ones.
pub fn layer_plan(layer: &LayerSpec) -> Result<LoweringPlan> {
    let g = layer.geometry()?;
    let plan = g.spatial_plan()?;
    match layer.kind {
        LayerKind::StandardConv => plan.replicate_channels(g.c_in),
        _ => Ok(plan),
    }
}

/// The fully connected matrix `C_i` of a layer.
pub fn effective_matrix(layer: &LayerSpec, weight: &DenseMatrix) -> Result<DenseMatrix> {
    check_weight(layer, weight)?;
    match layer.kind {
        LayerKind::FullyConnected => Ok(weight.clone()),
        LayerKind::StandardConv => lowering::gamma_standard(&conv_weight(layer, weight)?, &layer_plan(layer)?),
        LayerKind::DepthwiseConv => lowering::gamma_depthwise(&conv_weight(layer, weight)?, &layer_plan(layer)?),
        LayerKind::PointwiseConv => {
            lowering::gamma_pointwise(&conv_weight(layer, weight)?, layer.geometry()?.spatial_in())
        }
    }
}

/// `C_i Z` computed with the direct convolution operators.
pub fn apply_linear(layer: &LayerSpec, weight: &DenseMatrix, z: &DenseMatrix) -> Result<DenseMatrix> {
    check_weight(layer, weight)?;
    match layer.kind {
        LayerKind::FullyConnected => weight.matmul(z),
        LayerKind::StandardConv => lowering::mu_direct(&conv_weight(layer, weight)?, &layer_plan(layer)?, z),
        LayerKind::DepthwiseConv => lowering::mu_depthwise(&conv_weight(layer, weight)?, &layer_plan(layer)?, z),
        LayerKind::PointwiseConv => {
            lowering::mu_pointwise(&conv_weight(layer, weight)?, layer.geometry()?.spatial_in(), z)
        }
    }
}

/// Network output for the columns of `x`.
pub fn forward(spec: &NetworkSpec, weights: &[DenseMatrix], x: &DenseMatrix) -> Result<DenseMatrix> {
    spec.ensure_valid()?;
    if weights.len() != spec.depth() {
        return Err(Error::DimensionMismatch(format!(
            "{} weight matrices for {} layers",
            weights.len(),
            spec.depth()
        )));
    }
    if x.rows() != spec.input_dim {
        return Err(Error::DimensionMismatch(format!(
            "input has {} rows, expected {}",
            x.rows(),
            spec.input_dim
        )));
    }
    let mut z = x.clone();
    for (layer, w) in spec.layers.iter().zip(weights) {
        let lin = apply_linear(layer, w, &z)?;
        let act = layer.activation;
        z = DenseMatrix::new(
            lin.rows(),
            lin.cols(),
            lin.data().iter().map(|&v| act.apply(v)).collect(),
        )?;
    }
    Ok(z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMode {
    Exact,
    Bounded,
}

impl NormMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NormMode::Exact => "exact",
            NormMode::Bounded => "bounded",
        }
    }
}

/// Per-layer norms. `a` is `‖W‖_F` of the stored weight, `s` the spectral
/// norm of `C_i`, `n21` its 2,1-norm and `fro_effective` its Frobenius norm.
/// In bounded mode `s`, `n21` and `fro_effective` are the closed-form values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerNorms {
    pub a: f64,
    pub s: f64,
    pub n21: f64,
    pub fro_effective: f64,
    pub mode: NormMode,
}

pub fn layer_norms(layer: &LayerSpec, weight: &DenseMatrix, mode: NormMode) -> Result<LayerNorms> {
    layer_norms_capped(layer, weight, mode, DEFAULT_ORACLE_CAP)
}

/// [`layer_norms`] with an explicit dense-oracle size cap.
pub fn layer_norms_capped(layer: &LayerSpec, weight: &DenseMatrix, mode: NormMode, cap: usize) -> Result<LayerNorms> {
    check_weight(layer, weight)?;
    let a = frobenius_norm(weight);
    if mode == NormMode::Exact {
        let c = effective_matrix(layer, weight)?;
        return Ok(LayerNorms {
            a,
            s: linalg::spectral_norm_dense_oracle_capped(&c, cap)?,
            n21: norm_2_1(&c),
            fro_effective: frobenius_norm(&c),
            mode,
        });
    }
    if layer.kind == LayerKind::FullyConnected {
        return Ok(LayerNorms {
            a,
            s: linalg::spectral_norm_dense_oracle_capped(weight, cap)?,
            n21: bounds::bound_21_fc(a, layer.d_out),
            fro_effective: a,
            mode,
        });
    }
    let g = layer.geometry()?;
    let w = conv_weight(layer, weight)?;
    let m = g.spatial_out();
    let s = match layer.kind {
        LayerKind::StandardConv => bounds::bound_standard(&w, m),
        LayerKind::DepthwiseConv if g.stride >= g.k => bounds::bound_depthwise_nonoverlap(&w)?,
        LayerKind::DepthwiseConv => bounds::bound_depthwise_overlap(&w)?,
        LayerKind::PointwiseConv => linalg::spectral_norm_dense_oracle_capped(weight, cap)?,
        LayerKind::FullyConnected => unreachable!(),
    };
    Ok(LayerNorms {
        a,
        s,
        n21: bounds::bound_21_conv(a, m, g.c_out),
        fro_effective: bounds::gamma_f_norm_standard(&w, m),
        mode,
    })
}

/// Norms for every layer, in order.
pub fn network_norms(
    spec: &NetworkSpec,
    weights: &[DenseMatrix],
    mode: NormMode,
    cap: usize,
) -> Result<Vec<LayerNorms>> {
    spec.ensure_valid()?;
    if weights.len() != spec.depth() {
        return Err(Error::DimensionMismatch(format!(
            "{} weight matrices for {} layers",
            weights.len(),
            spec.depth()
        )));
    }
    spec.layers
        .iter()
        .zip(weights)
        .map(|(l, w)| layer_norms_capped(l, w, mode, cap))
        .collect()
}
