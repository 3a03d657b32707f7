//! Six norm-based generalization-bound families, evaluated in the log domain.
//!
//! Every family is the bare expression inside its `O(·)`: unit constant, no
//! log factors. Reports therefore compare shapes, not certified values.

use std::fmt;

use crate::complexity::{self, ComplexityLayer};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::network::{self, Activation, LayerNorms, LayerSpec, NetworkSpec, NormMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundFamily {
    Neyshabur15,
    BartlettSpectral17,
    NeyshaburPAC17,
    Golowich18,
    Li18,
    Ours,
}

impl BoundFamily {
    pub const ALL: [BoundFamily; 6] = [
        BoundFamily::Neyshabur15,
        BoundFamily::BartlettSpectral17,
        BoundFamily::NeyshaburPAC17,
        BoundFamily::Golowich18,
        BoundFamily::Li18,
        BoundFamily::Ours,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundFamily::Neyshabur15 => "Neyshabur15",
            BoundFamily::BartlettSpectral17 => "BartlettSpectral17",
            BoundFamily::NeyshaburPAC17 => "NeyshaburPAC17",
            BoundFamily::Golowich18 => "Golowich18",
            BoundFamily::Li18 => "Li18",
            BoundFamily::Ours => "Ours",
        }
    }
}

impl fmt::Display for BoundFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One family's value. `log10` stays finite when `value` overflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyBound {
    pub family: BoundFamily,
    pub value: f64,
    pub log10: f64,
}

impl FamilyBound {
    fn from_ln(family: BoundFamily, ln: f64) -> Self {
        Self {
            family,
            value: ln.exp(),
            log10: ln / std::f64::consts::LN_10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub mode: NormMode,
    /// Sorted ascending by `log10`; ties keep family order.
    pub families: Vec<FamilyBound>,
    pub layers: Vec<LayerNorms>,
}

impl BoundReport {
    fn new(mode: NormMode, mut families: Vec<FamilyBound>, layers: Vec<LayerNorms>) -> Self {
        families.sort_by(|a, b| a.log10.total_cmp(&b.log10).then(a.family.cmp(&b.family)));
        Self { mode, families, layers }
    }

    pub fn get(&self, family: BoundFamily) -> &FamilyBound {
        self.families
            .iter()
            .find(|f| f.family == family)
            .expect("every report holds all six families")
    }
}

fn check_norms(norms: &[LayerNorms]) -> Result<()> {
    if norms.is_empty() {
        return Err(Error::Domain("bounds need at least one layer".into()));
    }
    for (i, n) in norms.iter().enumerate() {
        if n.s == 0.0 {
            return Err(Error::ZeroSpectralNorm { layer: i + 1 });
        }
        let ok = [n.a, n.s, n.n21, n.fro_effective]
            .iter()
            .all(|v| v.is_finite() && *v >= 0.0);
        if !ok {
            return Err(Error::Domain(format!(
                "layer {}: norms must be finite and non-negative",
                i + 1
            )));
        }
    }
    Ok(())
}

/// Shared evaluator. `ln_half_r` is `ln(𝓡/2)` and `width` the `d` (or `cm`)
/// entering the PAC and Li families.
fn evaluate(norms: &[LayerNorms], ln_half_r: f64, width: f64, n: usize) -> Result<Vec<FamilyBound>> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let depth = norms.len() as f64;
    let ln_n = (n as f64).ln();
    let ln_prod_s: f64 = norms.iter().map(|x| x.s.ln()).sum();
    let ln_prod_f: f64 = norms.iter().map(|x| x.fro_effective.ln()).sum();
    let bart_sum: f64 = norms.iter().map(|x| (x.n21 / x.s).powf(2.0 / 3.0)).sum();
    let pac_sum: f64 = norms.iter().map(|x| (x.fro_effective / x.s).powi(2)).sum();
    let gol = (-0.25 * ln_n).min(0.5 * (depth.ln() - ln_n));

    use BoundFamily::*;
    Ok(vec![
        FamilyBound::from_ln(Neyshabur15, depth * std::f64::consts::LN_2 + ln_prod_f - 0.5 * ln_n),
        FamilyBound::from_ln(BartlettSpectral17, ln_prod_s - 0.5 * ln_n + 1.5 * bart_sum.ln()),
        FamilyBound::from_ln(
            NeyshaburPAC17,
            ln_prod_s - 0.5 * ln_n + 0.5 * (depth * depth * width * pac_sum).ln(),
        ),
        FamilyBound::from_ln(Golowich18, ln_prod_f + gol),
        FamilyBound::from_ln(Li18, ln_prod_s + 0.5 * (depth * width * width).ln() - 0.5 * ln_n),
        FamilyBound::from_ln(Ours, 0.25 * ln_half_r - 0.5 * ln_n),
    ])
}

fn half_complexity_ln(layers: &[ComplexityLayer]) -> Result<f64> {
    Ok(complexity::sensitive_complexity(layers)?.ln - std::f64::consts::LN_2)
}

/// Fully connected network with widths `dims = (d_0, ..., d_L)`.
pub fn fnn_bounds(norms: &[LayerNorms], dims: &[usize], n: usize) -> Result<BoundReport> {
    check_norms(norms)?;
    if dims.len() != norms.len() + 1 {
        return Err(Error::DimensionMismatch(format!(
            "{} widths for {} layers",
            dims.len(),
            norms.len()
        )));
    }
    let layers: Vec<ComplexityLayer> = norms
        .iter()
        .zip(dims.windows(2))
        .map(|(x, d)| ComplexityLayer::Fc {
            rho: 1.0,
            s: x.s,
            a: x.a,
            d_in: d[0],
            d_out: d[1],
        })
        .collect();
    let width = dims[1..].iter().copied().max().unwrap_or(0) as f64;
    let fams = evaluate(norms, half_complexity_ln(&layers)?, width, n)?;
    Ok(BoundReport::new(norms[0].mode, fams, norms.to_vec()))
}

/// Fully convolutional network with `c` filters of length `r`, each applied
/// `m` times, in every layer.
pub fn fcnn_bounds(norms: &[LayerNorms], c: usize, m: usize, r: usize, n: usize) -> Result<BoundReport> {
    check_norms(norms)?;
    if c == 0 || m == 0 || r == 0 {
        return Err(Error::Domain("c, m and r must be positive".into()));
    }
    let layers: Vec<ComplexityLayer> = norms
        .iter()
        .map(|x| ComplexityLayer::Conv {
            rho: 1.0,
            s: x.s,
            a: x.a,
            c,
            r,
            d: c * m,
        })
        .collect();
    let fams = evaluate(norms, half_complexity_ln(&layers)?, (c * m) as f64, n)?;
    Ok(BoundReport::new(norms[0].mode, fams, norms.to_vec()))
}

/// Norms and bounds for a concrete network. Width is the largest layer
/// output; `ignore_n` evaluates every family at `n = 1`.
pub fn architecture_comparison(
    spec: &NetworkSpec,
    weights: &[DenseMatrix],
    mode: NormMode,
    ignore_n: bool,
    n: usize,
    oracle_cap: usize,
) -> Result<BoundReport> {
    let norms = network::network_norms(spec, weights, mode, oracle_cap)?;
    check_norms(&norms)?;
    let layers = complexity::complexity_layers(spec, &norms)?;
    let width = spec.layers.iter().map(|l| l.d_out).max().unwrap_or(0) as f64;
    let n = if ignore_n { 1 } else { n };
    let fams = evaluate(&norms, half_complexity_ln(&layers)?, width, n)?;
    Ok(BoundReport::new(mode, fams, norms))
}

fn check_positive(vals: &[(&str, f64)]) -> Result<()> {
    for (name, v) in vals {
        if !(*v > 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
        }
    }
    Ok(())
}

/// Closed forms for uniform FNNs: every layer has width `d`, `‖A‖_σ ≤ s`,
/// `‖A‖_F ≤ a`. Returned in family order.
pub fn simplified_fnn_bounds(a: f64, s: f64, d: f64, depth: usize, n: usize) -> Result<Vec<FamilyBound>> {
    check_positive(&[("a", a), ("s", s), ("d", d)])?;
    if depth == 0 || n == 0 {
        return Err(Error::Domain("L and n must be at least 1".into()));
    }
    let l = depth as f64;
    let (la, ls, ld, ll, ln_n) = (a.ln(), s.ln(), d.ln(), l.ln(), (n as f64).ln());
    let root_n = -0.5 * ln_n;
    let gol = (-0.25 * ln_n).min(0.5 * (ll - ln_n));
    let spectral = (l - 1.0) * ls + 1.5 * ll + la + 0.5 * ld + root_n;
    use BoundFamily::*;
    Ok(vec![
        FamilyBound::from_ln(Neyshabur15, l * std::f64::consts::LN_2 + l * la + root_n),
        FamilyBound::from_ln(BartlettSpectral17, spectral),
        FamilyBound::from_ln(NeyshaburPAC17, spectral),
        FamilyBound::from_ln(Golowich18, l * la + gol),
        FamilyBound::from_ln(Li18, l * ls + 0.5 * ll + ld + root_n),
        FamilyBound::from_ln(Ours, 0.25 * (l - 1.0) * ls + 0.75 * ll + 0.25 * la + ld + root_n),
    ])
}

/// Closed forms for uniform FCNNs with `c` channels, filter length `r` and
/// `m` outputs per filter. Returned in family order.
pub fn simplified_fcnn_bounds(
    a: f64,
    s: f64,
    c: f64,
    m: f64,
    r: f64,
    depth: usize,
    n: usize,
) -> Result<Vec<FamilyBound>> {
    check_positive(&[("a", a), ("s", s), ("c", c), ("m", m), ("r", r)])?;
    if depth == 0 || n == 0 {
        return Err(Error::Domain("L and n must be at least 1".into()));
    }
    let l = depth as f64;
    let (la, ls, lc, lm, lr, ll, ln_n) = (a.ln(), s.ln(), c.ln(), m.ln(), r.ln(), l.ln(), (n as f64).ln());
    let root_n = -0.5 * ln_n;
    let gol = (-0.25 * ln_n).min(0.5 * (ll - ln_n));
    let spectral = (l - 1.0) * ls + 1.5 * ll + la + 0.5 * lc + lm + root_n;
    use BoundFamily::*;
    Ok(vec![
        FamilyBound::from_ln(Neyshabur15, l * std::f64::consts::LN_2 + l * la + 0.5 * l * lm + root_n),
        FamilyBound::from_ln(BartlettSpectral17, spectral),
        FamilyBound::from_ln(NeyshaburPAC17, spectral),
        FamilyBound::from_ln(Golowich18, l * la + 0.5 * l * lm + gol),
        FamilyBound::from_ln(Li18, l * ls + 0.5 * ll + lc + lm + root_n),
        FamilyBound::from_ln(
            Ours,
            0.25 * (l - 1.0) * ls + 0.75 * ll + 0.25 * la + 0.5 * lc + 0.125 * lm + 0.5 * lr + root_n,
        ),
    ])
}

/// A MobileNet-V1 body: 13 depthwise (3x3) + pointwise pairs on a square
/// input with valid padding, followed by a fully connected classifier. The
/// input is the `32 * width`-channel stem output at `resolution` pixels.
pub fn mobilenet_v1_spec(width: f64, resolution: usize, classes: usize) -> Result<NetworkSpec> {
    const CHANNELS: [usize; 14] = [32, 64, 128, 128, 256, 256, 512, 512, 512, 512, 512, 512, 1024, 1024];
    const STRIDES: [usize; 13] = [1, 2, 1, 2, 1, 2, 1, 1, 1, 1, 1, 2, 1];
    if !(width > 0.0 && width.is_finite()) || classes == 0 {
        return Err(Error::Domain("width must be positive and classes at least 1".into()));
    }
    let chans: Vec<usize> = CHANNELS.iter().map(|&c| ((c as f64 * width) as usize).max(1)).collect();
    let mut layers = Vec::with_capacity(27);
    let mut side = resolution;
    for (i, &stride) in STRIDES.iter().enumerate() {
        let dw = LayerSpec::depthwise_2d(chans[i], side, side, 3, stride, Activation::Relu)?;
        let g = dw.geometry()?;
        side = g.out_h;
        layers.push(dw);
        layers.push(LayerSpec::pointwise(
            chans[i],
            chans[i + 1],
            side * side,
            Activation::Relu,
        )?);
    }
    let d = chans[13] * side * side;
    layers.push(LayerSpec::fully_connected(d, classes, Activation::Identity));
    Ok(NetworkSpec::new(chans[0] * resolution * resolution, layers))
}
