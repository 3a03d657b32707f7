//! Sensitive complexity, covering-number and Rademacher formulas, ramp loss,
//! margins and the assembled generalization bound.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::network::{LayerKind, LayerNorms, NetworkSpec};

/// Linear value guarded by a log-domain twin.
///
/// `value` is the directly evaluated product when it is finite and at most
/// `1e300`; otherwise it is `exp(ln)` and `overflow` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Magnitude {
    pub value: f64,
    pub ln: f64,
    pub overflow: bool,
}

const LINEAR_LIMIT: f64 = 1e300;

impl Magnitude {
    fn from_parts(direct: f64, ln: f64) -> Self {
        if direct.is_finite() && direct <= LINEAR_LIMIT {
            Self {
                value: direct,
                ln,
                overflow: false,
            }
        } else {
            Self {
                value: ln.exp(),
                ln,
                overflow: true,
            }
        }
    }

    pub fn log10(&self) -> f64 {
        self.ln / std::f64::consts::LN_10
    }
}

impl From<f64> for Magnitude {
    fn from(v: f64) -> Self {
        Self::from_parts(v, v.ln())
    }
}

/// One layer's contribution to the sensitive complexity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComplexityLayer {
    /// Fully connected layer `d_in -> d_out`.
    Fc {
        rho: f64,
        s: f64,
        a: f64,
        d_in: usize,
        d_out: usize,
    },
    /// Conv layer with `c` filters of length `r` and output dimension `d`.
    Conv {
        rho: f64,
        s: f64,
        a: f64,
        c: usize,
        r: usize,
        d: usize,
    },
}

impl ComplexityLayer {
    fn rho_s(&self) -> (f64, f64) {
        match *self {
            ComplexityLayer::Fc { rho, s, .. } | ComplexityLayer::Conv { rho, s, .. } => (rho, s),
        }
    }

    fn check(&self, layer: usize) -> Result<()> {
        let (rho, s) = self.rho_s();
        let a = match *self {
            ComplexityLayer::Fc { a, .. } | ComplexityLayer::Conv { a, .. } => a,
        };
        if s == 0.0 {
            return Err(Error::ZeroSpectralNorm { layer });
        }
        if !(s > 0.0 && s.is_finite()) || !(rho > 0.0 && rho.is_finite()) || !(a >= 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!(
                "layer {layer}: need s > 0, rho > 0, a >= 0 (got s={s}, rho={rho}, a={a})"
            )));
        }
        if let ComplexityLayer::Conv { c, d, .. } = *self {
            if c == 0 || d == 0 {
                return Err(Error::Domain(format!("layer {layer}: c and d must be positive")));
            }
        }
        Ok(())
    }

    /// `d_i² d_{i-1}² a_i / s_i` or `c_i² r_i² a_i √(d_i/c_i) / s_i`.
    fn term(&self) -> f64 {
        match *self {
            ComplexityLayer::Fc { s, a, d_in, d_out, .. } => {
                let (di, dp) = (d_out as f64, d_in as f64);
                di * di * dp * dp * a / s
            }
            ComplexityLayer::Conv { s, a, c, r, d, .. } => {
                let (c, r) = (c as f64, r as f64);
                c * c * r * r * a * (d as f64 / c).sqrt() / s
            }
        }
    }
}

/// Per-layer terms for a whole network from its norms.
pub fn complexity_layers(spec: &NetworkSpec, norms: &[LayerNorms]) -> Result<Vec<ComplexityLayer>> {
    if norms.len() != spec.depth() {
        return Err(Error::DimensionMismatch(format!(
            "{} norm records for {} layers",
            norms.len(),
            spec.depth()
        )));
    }
    spec.layers
        .iter()
        .zip(norms)
        .map(|(l, n)| {
            Ok(match l.kind {
                LayerKind::FullyConnected => ComplexityLayer::Fc {
                    rho: l.lipschitz,
                    s: n.s,
                    a: n.a,
                    d_in: l.d_in,
                    d_out: l.d_out,
                },
                _ => {
                    let (c, r) = l.weight_shape()?;
                    ComplexityLayer::Conv {
                        rho: l.lipschitz,
                        s: n.s,
                        a: n.a,
                        c,
                        r,
                        d: l.d_out,
                    }
                }
            })
        })
        .collect()
}

fn assemble(prod: f64, ln_prod: f64, sum: f64, depth: usize) -> Magnitude {
    let l = depth as f64;
    let direct = 2.0 * prod * sum * l * l;
    let ln = std::f64::consts::LN_2 + ln_prod + sum.ln() + 2.0 * l.ln();
    Magnitude::from_parts(direct, ln)
}

/// `𝓡 = 2 ∏ρ_i s_i · Σ_i term_i · L²` over a mixed FC/conv network.
pub fn sensitive_complexity(layers: &[ComplexityLayer]) -> Result<Magnitude> {
    if layers.is_empty() {
        return Err(Error::Domain("sensitive complexity needs at least one layer".into()));
    }
    let mut prod = 1.0;
    let mut ln_prod = 0.0;
    let mut sum = 0.0;
    for (i, layer) in layers.iter().enumerate() {
        layer.check(i + 1)?;
        let (rho, s) = layer.rho_s();
        prod *= rho * s;
        ln_prod += rho.ln() + s.ln();
        sum += layer.term();
    }
    Ok(assemble(prod, ln_prod, sum, layers.len()))
}

/// Fully connected layer record for [`sensitive_complexity_fc`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FcTerm {
    pub rho: f64,
    pub s: f64,
    pub a: f64,
    pub d_in: usize,
    pub d_out: usize,
}

/// Conv layer record for [`sensitive_complexity_conv`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvTerm {
    pub rho: f64,
    pub s: f64,
    pub a: f64,
    pub c: usize,
    pub r: usize,
    pub d: usize,
}

/// All-FC specialisation `𝓡_A`.
pub fn sensitive_complexity_fc(layers: &[FcTerm]) -> Result<Magnitude> {
    if layers.is_empty() {
        return Err(Error::Domain("sensitive complexity needs at least one layer".into()));
    }
    let mut prod = 1.0;
    let mut ln_prod = 0.0;
    let mut sum = 0.0;
    for (i, t) in layers.iter().enumerate() {
        ComplexityLayer::Fc {
            rho: t.rho,
            s: t.s,
            a: t.a,
            d_in: t.d_in,
            d_out: t.d_out,
        }
        .check(i + 1)?;
        prod *= t.rho * t.s;
        ln_prod += t.rho.ln() + t.s.ln();
        let (di, dp) = (t.d_out as f64, t.d_in as f64);
        sum += di * di * dp * dp * t.a / t.s;
    }
    Ok(assemble(prod, ln_prod, sum, layers.len()))
}

/// All-conv specialisation `𝓡_W`.
pub fn sensitive_complexity_conv(layers: &[ConvTerm]) -> Result<Magnitude> {
    if layers.is_empty() {
        return Err(Error::Domain("sensitive complexity needs at least one layer".into()));
    }
    let mut prod = 1.0;
    let mut ln_prod = 0.0;
    let mut sum = 0.0;
    for (i, t) in layers.iter().enumerate() {
        ComplexityLayer::Conv {
            rho: t.rho,
            s: t.s,
            a: t.a,
            c: t.c,
            r: t.r,
            d: t.d,
        }
        .check(i + 1)?;
        prod *= t.rho * t.s;
        ln_prod += t.rho.ln() + t.s.ln();
        let (c, r) = (t.c as f64, t.r as f64);
        sum += c * c * r * r * t.a * (t.d as f64 / c).sqrt() / t.s;
    }
    Ok(assemble(prod, ln_prod, sum, layers.len()))
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite, got {v}")))
    }
}

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} must be non-negative and finite, got {v}"
        )))
    }
}

/// Log covering number of a radius-`a` ball in `r` dimensions: `r ln(1 + 2a/ε)`.
pub fn covering_ball_bound(r: usize, a: f64, eps: f64) -> Result<f64> {
    nonnegative("a", a)?;
    positive("eps", eps)?;
    Ok(r as f64 * (2.0 * a / eps).ln_1p())
}

/// `d_in d_out ln(1 + 2 a ‖Z‖_F / ε)`.
pub fn covering_fc_layer_bound(d_in: usize, d_out: usize, a: f64, z_fnorm: f64, eps: f64) -> Result<f64> {
    nonnegative("a", a)?;
    nonnegative("z_fnorm", z_fnorm)?;
    positive("eps", eps)?;
    Ok((d_in * d_out) as f64 * (2.0 * a * z_fnorm / eps).ln_1p())
}

/// `c r ln(1 + 2 a √m ‖Z‖_F / ε)`.
pub fn covering_conv_layer_bound(c: usize, r: usize, a: f64, m: usize, z_fnorm: f64, eps: f64) -> Result<f64> {
    nonnegative("a", a)?;
    nonnegative("z_fnorm", z_fnorm)?;
    positive("eps", eps)?;
    if m == 0 {
        return Err(Error::Domain("m must be at least 1".into()));
    }
    Ok((c * r) as f64 * (2.0 * a * (m as f64).sqrt() * z_fnorm / eps).ln_1p())
}

/// `sqrt(‖X‖_F 𝓡 / ε)`.
pub fn covering_network_bound(x_fnorm: f64, complexity: f64, eps: f64) -> Result<f64> {
    nonnegative("x_fnorm", x_fnorm)?;
    nonnegative("R", complexity)?;
    positive("eps", eps)?;
    Ok((x_fnorm * complexity / eps).sqrt())
}

/// Margin `η`, confidence `δ`, sample count `n` and `‖X‖_F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub eta: f64,
    pub delta: f64,
    pub n: usize,
    pub x_fnorm: f64,
}

impl BoundParams {
    pub fn validate(&self) -> Result<()> {
        positive("eta", self.eta)?;
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Domain(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if self.n == 0 {
            return Err(Error::Domain("n must be at least 1".into()));
        }
        nonnegative("x_fnorm", self.x_fnorm)
    }
}

/// `16 n^{-5/8} (2 ‖X‖_F 𝓡 / η)^{1/4}`. `δ` is not used here.
pub fn rademacher_bound(params: &BoundParams, complexity: f64) -> Result<f64> {
    positive("eta", params.eta)?;
    if params.n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    nonnegative("x_fnorm", params.x_fnorm)?;
    nonnegative("R", complexity)?;
    let n = params.n as f64;
    Ok(16.0 * n.powf(-0.625) * (2.0 * params.x_fnorm * complexity / params.eta).powf(0.25))
}

/// `3 sqrt(ln(1/δ) / (2n))`.
pub fn confidence_term(params: &BoundParams) -> Result<f64> {
    params.validate()?;
    Ok(3.0 * ((1.0 / params.delta).ln() / (2.0 * params.n as f64)).sqrt())
}

/// Empirical ramp risk plus twice the Rademacher bound plus the confidence term.
pub fn generalization_bound(empirical_risk: f64, params: &BoundParams, complexity: f64) -> Result<f64> {
    params.validate()?;
    if !(0.0..=1.0).contains(&empirical_risk) {
        return Err(Error::Domain(format!(
            "empirical risk must lie in [0, 1], got {empirical_risk}"
        )));
    }
    Ok(empirical_risk + 2.0 * rademacher_bound(params, complexity)? + confidence_term(params)?)
}

/// `f_y - max_{j != y} f_j`; `y` is 1-based.
pub fn margin(logits: &[f64], y: usize) -> Result<f64> {
    if logits.len() < 2 {
        return Err(Error::Domain("margins need at least two classes".into()));
    }
    if y == 0 || y > logits.len() {
        return Err(Error::Domain(format!("label {y} outside 1..={}", logits.len())));
    }
    let other = logits
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != y - 1)
        .map(|(_, &v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(logits[y - 1] - other)
}

/// `g_η(r)`: 0 below `-η`, `1 + r/η` on `[-η, 0]`, 1 above 0.
pub fn ramp(r: f64, eta: f64) -> f64 {
    if r < -eta {
        0.0
    } else if r <= 0.0 {
        1.0 + r / eta
    } else {
        1.0
    }
}

/// `ℓ_η = g_η(-margin)`.
pub fn ramp_loss(logits: &[f64], y: usize, eta: f64) -> Result<f64> {
    positive("eta", eta)?;
    Ok(ramp(-margin(logits, y)?, eta))
}

/// Logits (`k x n`, one column per example) with 1-based labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskSample {
    logits: DenseMatrix,
    labels: Vec<usize>,
}

impl RiskSample {
    pub fn new(logits: DenseMatrix, labels: Vec<usize>) -> Result<Self> {
        if logits.rows() < 2 {
            return Err(Error::Domain("need at least two classes".into()));
        }
        if labels.len() != logits.cols() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} examples",
                labels.len(),
                logits.cols()
            )));
        }
        if let Some(bad) = labels.iter().find(|&&y| y == 0 || y > logits.rows()) {
            return Err(Error::Domain(format!("label {bad} outside 1..={}", logits.rows())));
        }
        Ok(Self { logits, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Logits of example `p`.
    pub fn column(&self, p: usize) -> Vec<f64> {
        (0..self.logits.rows()).map(|i| self.logits.get(i, p)).collect()
    }

    pub fn margins(&self) -> Vec<f64> {
        (0..self.len())
            .map(|p| margin(&self.column(p), self.labels[p]).expect("labels validated"))
            .collect()
    }

    /// 1-based argmax per example; ties go to the smallest index.
    pub fn predictions(&self) -> Vec<usize> {
        (0..self.len())
            .map(|p| {
                let col = self.column(p);
                let mut best = 0;
                for (j, &v) in col.iter().enumerate() {
                    if v > col[best] {
                        best = j;
                    }
                }
                best + 1
            })
            .collect()
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn empirical_ramp_risk(sample: &RiskSample, eta: f64) -> Result<f64> {
    positive("eta", eta)?;
    let n = sample.len() as f64;
    Ok(compensated_sum(sample.margins().into_iter().map(|m| ramp(-m, eta))) / n)
}

pub fn empirical_zero_one_risk(sample: &RiskSample) -> f64 {
    let wrong = sample
        .predictions()
        .iter()
        .zip(sample.labels())
        .filter(|(p, y)| p != y)
        .count();
    wrong as f64 / sample.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1e-300)
    }

    fn fc1() -> ComplexityLayer {
        ComplexityLayer::Fc {
            rho: 1.0,
            s: 1.0,
            a: 1.0,
            d_in: 1,
            d_out: 1,
        }
    }

    #[test]
    fn sensitive_complexity_examples() {
        assert_eq!(sensitive_complexity(&[fc1()]).unwrap().value, 2.0);

        let zero = ComplexityLayer::Fc {
            rho: 1.0,
            s: 1.0,
            a: 0.0,
            d_in: 3,
            d_out: 2,
        };
        let r = sensitive_complexity(&[zero]).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(!r.overflow);

        let conv = ComplexityLayer::Conv {
            rho: 1.0,
            s: 1.0,
            a: 1.0,
            c: 2,
            r: 3,
            d: 8,
        };
        let r = sensitive_complexity(&[conv, conv]).unwrap();
        assert_eq!(r.value, 1152.0);
        assert!((r.ln - 1152f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_spectral_norm_rejected() {
        let bad = ComplexityLayer::Conv {
            rho: 1.0,
            s: 0.0,
            a: 1.0,
            c: 1,
            r: 1,
            d: 1,
        };
        assert_eq!(
            sensitive_complexity(&[fc1(), bad]),
            Err(Error::ZeroSpectralNorm { layer: 2 })
        );
        assert!(sensitive_complexity(&[]).is_err());
    }

    #[test]
    fn overflow_switches_to_log_domain() {
        let big = ComplexityLayer::Fc {
            rho: 1.0,
            s: 1e100,
            a: 1.0,
            d_in: 1,
            d_out: 1,
        };
        let r = sensitive_complexity(&[big; 5]).unwrap();
        assert!(r.overflow);
        assert!(r.value.is_infinite());
        let expected = std::f64::consts::LN_2 + 500.0 * std::f64::consts::LN_10 + 5f64.ln()
            - 100.0 * std::f64::consts::LN_10
            + 2.0 * 5f64.ln();
        assert!((r.ln - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn specialisations_are_bit_identical() {
        let mut rng = SplitMix64::new(4);
        let fcs: Vec<FcTerm> = (0..4)
            .map(|_| FcTerm {
                rho: 1.0,
                s: rng.uniform(0.5, 2.0),
                a: rng.uniform(0.5, 2.0),
                d_in: rng.range(1, 9),
                d_out: rng.range(1, 9),
            })
            .collect();
        let general: Vec<ComplexityLayer> = fcs
            .iter()
            .map(|t| ComplexityLayer::Fc {
                rho: t.rho,
                s: t.s,
                a: t.a,
                d_in: t.d_in,
                d_out: t.d_out,
            })
            .collect();
        let a = sensitive_complexity_fc(&fcs).unwrap();
        let b = sensitive_complexity(&general).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.ln.to_bits(), b.ln.to_bits());
    }

    #[test]
    fn covering_examples() {
        assert_eq!(covering_ball_bound(5, 0.0, 1.0).unwrap(), 0.0);
        assert!(close(covering_ball_bound(1, 1.0, 2.0).unwrap(), 2f64.ln()));
        assert!(close(covering_ball_bound(3, 1.0, 1.0).unwrap(), 3.0 * 3f64.ln()));
        assert!(covering_ball_bound(3, 1.0, 0.0).is_err());

        assert_eq!(covering_fc_layer_bound(3, 4, 0.0, 1.0, 1.0).unwrap(), 0.0);
        assert!(close(covering_fc_layer_bound(1, 1, 1.0, 1.0, 1.0).unwrap(), 3f64.ln()));
        assert!(
            covering_fc_layer_bound(2, 2, 1.0, 2.0, 1.0).unwrap()
                > covering_fc_layer_bound(2, 2, 1.0, 1.0, 1.0).unwrap()
        );

        assert_eq!(covering_conv_layer_bound(2, 2, 0.0, 3, 1.0, 1.0).unwrap(), 0.0);
        assert!(close(
            covering_conv_layer_bound(1, 1, 1.0, 1, 1.0, 1.0).unwrap(),
            3f64.ln()
        ));

        assert_eq!(covering_network_bound(1.0, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(covering_network_bound(4.0, 1.0, 1.0).unwrap(), 2.0);
        let a = covering_network_bound(3.0, 5.0, 1.0).unwrap();
        let b = covering_network_bound(3.0, 5.0, 0.25).unwrap();
        assert!(close(b, 2.0 * a));
    }

    #[test]
    fn rademacher_examples() {
        let p = BoundParams {
            eta: 2.0,
            delta: 0.5,
            n: 1,
            x_fnorm: 1.0,
        };
        assert_eq!(rademacher_bound(&p, 0.0).unwrap(), 0.0);
        assert_eq!(rademacher_bound(&p, 1.0).unwrap(), 16.0);
        let q = BoundParams { n: 16, ..p };
        let ratio = rademacher_bound(&p, 3.0).unwrap() / rademacher_bound(&q, 3.0).unwrap();
        assert!(close(ratio, 16f64.powf(0.625)));
    }

    #[test]
    fn generalization_examples() {
        let p = BoundParams {
            eta: 1.0,
            delta: 1.0,
            n: 2,
            x_fnorm: 1.0,
        };
        assert!(matches!(generalization_bound(0.0, &p, 0.0), Err(Error::Domain(_))));
        let p = BoundParams {
            delta: (-2.0f64).exp(),
            ..p
        };
        assert!(close(generalization_bound(0.0, &p, 0.0).unwrap(), 3.0 / 2f64.sqrt()));

        let p = BoundParams {
            eta: 0.7,
            delta: 0.05,
            n: 100,
            x_fnorm: 3.0,
        };
        let total = generalization_bound(0.25, &p, 12.0).unwrap();
        let middle = total - 0.25 - confidence_term(&p).unwrap();
        assert!(close(middle, 2.0 * rademacher_bound(&p, 12.0).unwrap()));
        assert!(generalization_bound(1.5, &p, 1.0).is_err());
        assert!(generalization_bound(0.0, &BoundParams { eta: 0.0, ..p }, 1.0).is_err());
        assert!(generalization_bound(0.0, &BoundParams { delta: 0.0, ..p }, 1.0).is_err());
    }

    #[test]
    fn margin_examples() {
        assert_eq!(margin(&[2.0, 1.0], 1).unwrap(), 1.0);
        assert_eq!(margin(&[1.0, 1.0], 2).unwrap(), 0.0);
        assert_eq!(margin(&[0.0, 3.0, 5.0], 2).unwrap(), -2.0);
        assert!(margin(&[1.0], 1).is_err());
        assert!(margin(&[1.0, 2.0], 3).is_err());
        assert!(margin(&[1.0, 2.0], 0).is_err());
    }

    #[test]
    fn ramp_examples() {
        let eta = 0.5;
        assert_eq!(ramp_loss(&[2.0 * eta, 0.0], 1, eta).unwrap(), 0.0);
        assert_eq!(ramp_loss(&[0.0, 1.0], 1, eta).unwrap(), 1.0);
        assert_eq!(ramp_loss(&[eta / 2.0, 0.0], 1, eta).unwrap(), 0.5);
        assert_eq!(ramp(eta, eta), 1.0);
        assert_eq!(ramp(0.0, eta), 1.0);
        assert_eq!(ramp(-0.0, eta), 1.0);
        assert_eq!(ramp(-eta, eta), 0.0);
    }

    #[test]
    fn risk_examples() {
        let eta = 1.0;
        let perfect = RiskSample::new(DenseMatrix::from_rows(&[[3.0, 0.0], [0.0, 3.0]]).unwrap(), vec![1, 2]).unwrap();
        assert_eq!(empirical_ramp_risk(&perfect, eta).unwrap(), 0.0);
        assert_eq!(empirical_zero_one_risk(&perfect), 0.0);

        let wrong = RiskSample::new(DenseMatrix::from_rows(&[[3.0, 0.0], [0.0, 3.0]]).unwrap(), vec![2, 1]).unwrap();
        assert_eq!(empirical_ramp_risk(&wrong, eta).unwrap(), 1.0);
        assert_eq!(empirical_zero_one_risk(&wrong), 1.0);

        // Margins η and -η.
        let half = RiskSample::new(DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap(), vec![1, 1]).unwrap();
        assert_eq!(empirical_ramp_risk(&half, eta).unwrap(), 0.5);
    }

    #[test]
    fn ties_go_to_smallest_class() {
        let s = RiskSample::new(DenseMatrix::from_rows(&[[1.0], [1.0], [0.0]]).unwrap(), vec![2]).unwrap();
        assert_eq!(s.predictions(), vec![1]);
        assert_eq!(empirical_zero_one_risk(&s), 1.0);
        // The ramp loss is 1 at margin 0, so it still dominates.
        assert_eq!(empirical_ramp_risk(&s, 0.3).unwrap(), 1.0);
    }

    #[test]
    fn risk_sample_validation() {
        let l = DenseMatrix::zeros(3, 2);
        assert!(RiskSample::new(l.clone(), vec![1]).is_err());
        assert!(RiskSample::new(l.clone(), vec![1, 4]).is_err());
        assert!(RiskSample::new(DenseMatrix::zeros(1, 2), vec![1, 1]).is_err());
        assert!(RiskSample::new(l, vec![3, 1]).is_ok());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(xs), 2.0);
    }

    #[test]
    fn magnitude_from_f64() {
        let m = Magnitude::from(1e10);
        assert_eq!(m.value, 1e10);
        assert!(!m.overflow);
        assert!((m.log10() - 10.0).abs() < 1e-12);
    }
}
