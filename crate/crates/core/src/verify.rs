//! Randomised oracle suite: every closed-form claim is checked against dense
//! linear algebra on seeded random instances.

use crate::bounds;
use crate::error::Result;
use crate::linalg::{self, frobenius_norm, norm_2_1, spectral_norm_dense_oracle, symmetric_eigenvalues, DenseMatrix};
use crate::lowering::{self, ConvWeight, LoweringPlan};
use crate::network::{self, LayerKind, NetworkSpec, NormMode};
use crate::rng::SplitMix64;

/// Relative tolerance of the lowering-equivalence check.
pub const LOWERING_TOL: f64 = 1e-13;
/// Slack for spectral inequalities and equalities.
pub const SPECTRAL_TOL: f64 = 1e-10;
/// Slack for 2,1-norm inequalities.
pub const NORM21_TOL: f64 = 1e-12;
/// Tolerance of the Toeplitz structure check.
pub const TOEPLITZ_TOL: f64 = 1e-13;
/// Tolerance of the Θ spectrum check.
pub const THETA_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyOutcome {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    /// Largest observed error, scaled so that values above 1 are failures.
    pub worst: f64,
    /// Trials skipped because a matrix exceeded the oracle cap.
    pub skipped: usize,
}

impl PropertyOutcome {
    fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            trials: 0,
            failures: 0,
            worst: 0.0,
            skipped: 0,
        }
    }

    /// Records one trial whose error was `err` against allowance `tol`.
    fn record(&mut self, err: f64, tol: f64) {
        self.trials += 1;
        let ratio = if tol > 0.0 {
            err / tol
        } else if err > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        let ratio = if ratio.is_nan() { f64::INFINITY } else { ratio };
        if ratio > 1.0 {
            self.failures += 1;
        }
        self.worst = self.worst.max(ratio);
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn random(rows: usize, cols: usize, rng: &mut SplitMix64) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.gaussian()).expect("gaussian entries are finite")
}

/// Normwise relative difference allowance: `tol * max(‖a‖_max, ‖b‖_max)`.
fn normwise(a: &DenseMatrix, b: &DenseMatrix, tol: f64) -> (f64, f64) {
    let diff = a.max_abs_diff(b).unwrap_or(f64::INFINITY);
    (diff, tol * a.max_abs().max(b.max_abs()).max(f64::MIN_POSITIVE))
}

/// Lowering cases exercised by [`check_lowering`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoweringCase {
    Standard1d,
    Standard2d,
    DepthwiseOverlap,
    DepthwiseNonOverlap,
    Pointwise,
}

impl LoweringCase {
    pub const ALL: [LoweringCase; 5] = [
        LoweringCase::Standard1d,
        LoweringCase::Standard2d,
        LoweringCase::DepthwiseOverlap,
        LoweringCase::DepthwiseNonOverlap,
        LoweringCase::Pointwise,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LoweringCase::Standard1d => "standard_1d",
            LoweringCase::Standard2d => "standard_2d",
            LoweringCase::DepthwiseOverlap => "depthwise_overlap",
            LoweringCase::DepthwiseNonOverlap => "depthwise_nonoverlap",
            LoweringCase::Pointwise => "pointwise",
        }
    }
}

fn random_standard(rng: &mut SplitMix64, two_d: bool) -> (ConvWeight, LoweringPlan) {
    let c_in = rng.range(1, 3);
    let c = rng.range(1, 4);
    let stride = rng.range(1, 3);
    let base = if two_d {
        let (kh, kw) = (rng.range(1, 3), rng.range(1, 3));
        let (h, w) = (rng.range(kh, 6), rng.range(kw, 6));
        lowering::plan_2d(h, w, kh, kw, stride).expect("window fits")
    } else {
        let k = rng.range(1, 5);
        let n = rng.range(k, 14);
        lowering::plan_1d(n, k, stride).expect("window fits")
    };
    let plan = base.replicate_channels(c_in).expect("positive channels");
    let taps = base.filter_dim();
    let w = ConvWeight::standard(random(c, taps * c_in, rng), taps, c_in).expect("shape matches");
    (w, plan)
}

fn random_depthwise(rng: &mut SplitMix64, overlap: bool) -> (ConvWeight, LoweringPlan) {
    let c = rng.range(1, 4);
    let (k, stride) = if overlap {
        let k = rng.range(2, 5);
        (k, rng.range(1, k - 1))
    } else {
        let k = rng.range(1, 4);
        (k, rng.range(k, k + 2))
    };
    let n = rng.range(k, 16);
    let plan = lowering::plan_1d(n, k, stride).expect("window fits");
    (ConvWeight::depthwise(random(c, k, rng)), plan)
}

/// Direct convolution against `γ(W) Z`, normwise relative.
pub fn check_lowering(case: LoweringCase, trials: usize, rng: &mut SplitMix64) -> Result<PropertyOutcome> {
    let mut out = PropertyOutcome::new(format!("lowering_{}", case.name()));
    for _ in 0..trials {
        let cols = rng.range(1, 4);
        let (direct, lowered) = match case {
            LoweringCase::Standard1d | LoweringCase::Standard2d => {
                let (w, plan) = random_standard(rng, case == LoweringCase::Standard2d);
                let z = random(plan.input_dim(), cols, rng);
                (
                    lowering::mu_direct(&w, &plan, &z)?,
                    lowering::gamma_standard(&w, &plan)?.matmul(&z)?,
                )
            }
            LoweringCase::DepthwiseOverlap | LoweringCase::DepthwiseNonOverlap => {
                let (w, plan) = random_depthwise(rng, case == LoweringCase::DepthwiseOverlap);
                let z = random(plan.input_dim() * w.num_filters(), cols, rng);
                (
                    lowering::mu_depthwise(&w, &plan, &z)?,
                    lowering::gamma_depthwise(&w, &plan)?.matmul(&z)?,
                )
            }
            LoweringCase::Pointwise => {
                let w = ConvWeight::pointwise(random(rng.range(1, 6), rng.range(1, 6), rng));
                let m = rng.range(1, 6);
                let z = random(w.channels_in() * m, cols, rng);
                (
                    lowering::mu_pointwise(&w, m, &z)?,
                    lowering::gamma_pointwise(&w, m)?.matmul(&z)?,
                )
            }
        };
        let (err, tol) = normwise(&direct, &lowered, LOWERING_TOL);
        out.record(err, tol);
    }
    Ok(out)
}

fn spectral_slack(reference: f64) -> f64 {
    SPECTRAL_TOL * reference.max(1.0)
}

/// `‖γ(W)‖_σ ≤ √m ‖W‖_F` for standard convolutions.
pub fn check_standard_bound(trials: usize, rng: &mut SplitMix64) -> Result<PropertyOutcome> {
    let mut out = PropertyOutcome::new("standard_spectral_bound");
    for i in 0..trials {
        let (w, plan) = random_standard(rng, i % 2 == 1);
        let oracle = spectral_norm_dense_oracle(&lowering::gamma_standard(&w, &plan)?)?;
        let bound = bounds::bound_standard(&w, plan.num_ops());
        out.record((oracle - bound).max(0.0), spectral_slack(bound));
    }
    Ok(out)
}

/// Non-overlapping depthwise: `‖γ(W)‖_σ = max_i ‖w^i‖` and `≤ ‖W‖_F`.
pub fn check_depthwise_nonoverlap(trials: usize, rng: &mut SplitMix64) -> Result<PropertyOutcome> {
    let mut out = PropertyOutcome::new("depthwise_nonoverlap_exact");
    for _ in 0..trials {
        let (w, plan) = random_depthwise(rng, false);
        let oracle = spectral_norm_dense_oracle(&lowering::gamma_depthwise(&w, &plan)?)?;
        let exact = bounds::exact_depthwise_nonoverlap(&w)?;
        let bound = bounds::bound_depthwise_nonoverlap(&w)?;
        let err = (oracle - exact).abs().max(oracle - bound);
        out.record(err.max(0.0), spectral_slack(exact));
    }
    Ok(out)
}

/// Overlapping depthwise: `‖γ(W)‖_σ ≤ ‖W‖_∞`.
pub fn check_depthwise_overlap(trials: usize, rng: &mut SplitMix64) -> Result<PropertyOutcome> {
    let mut out = PropertyOutcome::new("depthwise_overlap_bound");
    for _ in 0..trials {
        let (w, plan) = random_depthwise(rng, true);
        let oracle = spectral_norm_dense_oracle(&lowering::gamma_depthwise(&w, &plan)?)?;
        let bound = bounds::bound_depthwise_overlap(&w)?;
        out.record((oracle - bound).max(0.0), SPECTRAL_TOL);
    }
    Ok(out)
}

/// Pointwise: `‖γ(W)‖_σ = ‖W‖_σ` with `c, c', m ∈ 1..=8`.
pub fn check_pointwise(trials: usize, rng: &mut SplitMix64) -> Result<PropertyOutcome> {
    let mut out = PropertyOutcome::new("pointwise_spectral_equality");
    for _ in 0..trials {
        let (c_out, c_in, m) = (rng.range(1, 8), rng.range(1, 8), rng.range(1, 8));
        let w = ConvWeight::pointwise(random(c_out, c_in, rng));
        let oracle = spectral_norm_dense_oracle(&lowering::gamma_pointwise(&w, m)?)?;
        let small = bounds::spectral_pointwise(&w)?;
        out.record((oracle - small).abs(), SPECTRAL_TOL * small.max(f64::MIN_POSITIVE));
    }
    Ok(out)
}

/// `‖A‖_{2,1} ≤ ‖A‖_F √d_out` for fully connected matrices.
pub fn check_fc_21(trials: usize, rng: &mut SplitMix64) -> Result<PropertyOutcome> {
    let mut out = PropertyOutcome::new("fc_2_1_bound");
    for _ in 0..trials {
        let a = random(rng.range(1, 12), rng.range(1, 12), rng);
        let bound = bounds::bound_21_fc(frobenius_norm(&a), a.rows());
        out.record((norm_2_1(&a) - bound).max(0.0), NORM21_TOL * bound.max(1.0));
    }
    Ok(out)
}

/// `‖γ(W)‖_{2,1} ≤ ‖W‖_F m √c` across all three conv kinds.
pub fn check_conv_21(trials: usize, rng: &mut SplitMix64) -> Result<PropertyOutcome> {
    let mut out = PropertyOutcome::new("conv_2_1_bound");
    for i in 0..trials {
        let (gamma, w, m, c) = match i % 3 {
            0 => {
                let (w, plan) = random_standard(rng, i % 2 == 0);
                let g = lowering::gamma_standard(&w, &plan)?;
                let c = w.num_filters();
                (g, w, plan.num_ops(), c)
            }
            1 => {
                let overlap = rng.range(0, 1) == 1;
                let (w, plan) = random_depthwise(rng, overlap);
                let g = lowering::gamma_depthwise(&w, &plan)?;
                let c = w.num_filters();
                (g, w, plan.num_ops(), c)
            }
            _ => {
                let w = ConvWeight::pointwise(random(rng.range(1, 6), rng.range(1, 6), rng));
                let m = rng.range(1, 6);
                let c = w.channels_out();
                (lowering::gamma_pointwise(&w, m)?, w, m, c)
            }
        };
        let bound = bounds::bound_21_conv(frobenius_norm(w.filters()), m, c);
        out.record((norm_2_1(&gamma) - bound).max(0.0), NORM21_TOL * bound.max(1.0));
    }
    Ok(out)
}

/// `Ω(w)Ω(w)ᵀ` equals the Toeplitz matrix `t_{|p-q|}` for overlapping plans.
pub fn check_toeplitz_structure(trials: usize, rng: &mut SplitMix64) -> Result<PropertyOutcome> {
    let mut out = PropertyOutcome::new("toeplitz_structure");
    for _ in 0..trials {
        let k = rng.range(2, 6);
        let stride = rng.range(1, k - 1);
        let n = rng.range(k, 20);
        let w: Vec<f64> = (0..k).map(|_| rng.gaussian()).collect();
        let spec = bounds::toeplitz_sequence(&w, stride)?;
        let gram = lowering::omega(&w, &lowering::plan_1d(n, k, stride)?)?.gram_rows();
        let expected = spec.materialize(gram.rows());
        let err = gram.max_abs_diff(&expected).unwrap_or(f64::INFINITY);
        out.record(err, TOEPLITZ_TOL * spec.at(0).max(1.0));
    }
    Ok(out)
}

/// Every eigenvalue of the materialised `T_n` (n ≤ 20) is at most the
/// Toeplitz bound.
pub fn check_toeplitz_eigen(trials: usize, rng: &mut SplitMix64) -> Result<PropertyOutcome> {
    let mut out = PropertyOutcome::new("toeplitz_eigen_bound");
    for _ in 0..trials {
        let b = rng.range(0, 5);
        let spec = bounds::ToeplitzSpec::new((0..=b).map(|_| rng.gaussian()).collect())?;
        let bound = bounds::toeplitz_eig_bound(&spec);
        let n = rng.range(1, 20);
        let eig = symmetric_eigenvalues(&spec.materialize(n))?;
        let worst = eig.iter().map(|e| e.abs() - bound).fold(f64::NEG_INFINITY, f64::max);
        out.record(worst.max(0.0), 1e-12 * bound.max(1.0));
    }
    Ok(out)
}

/// Spectrum of `Θ(V, I_m)` is that of `V` repeated `m` times (PSD `V`).
pub fn check_theta_similarity(trials: usize, rng: &mut SplitMix64) -> Result<PropertyOutcome> {
    let mut out = PropertyOutcome::new("theta_similarity");
    for _ in 0..trials {
        let n = rng.range(1, 8);
        let m = rng.range(1, 6);
        let v = random(n, rng.range(1, 8), rng).gram_rows();
        let ev = symmetric_eigenvalues(&v)?;
        let et = symmetric_eigenvalues(&lowering::theta(&v, m)?)?;
        let err = et
            .iter()
            .enumerate()
            .map(|(i, x)| (x - ev[i / m]).abs())
            .fold(0.0, f64::max);
        out.record(err, THETA_TOL * ev[0].abs().max(1.0));
    }
    Ok(out)
}

/// Seed of the `index`-th property stream.
fn stream(seed: u64, index: u64) -> SplitMix64 {
    SplitMix64::new(seed ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// The full suite with `trials` random instances per property.
pub fn run_suite(trials: usize, seed: u64) -> Result<Vec<PropertyOutcome>> {
    let mut results = Vec::new();
    let mut idx = 0u64;
    let mut next = || {
        idx += 1;
        stream(seed, idx)
    };
    for case in LoweringCase::ALL {
        results.push(check_lowering(case, trials, &mut next())?);
    }
    results.push(check_standard_bound(trials, &mut next())?);
    results.push(check_depthwise_nonoverlap(trials, &mut next())?);
    results.push(check_depthwise_overlap(trials, &mut next())?);
    results.push(check_pointwise(trials, &mut next())?);
    results.push(check_fc_21(trials, &mut next())?);
    results.push(check_conv_21(trials, &mut next())?);
    results.push(check_toeplitz_structure(trials, &mut next())?);
    results.push(check_toeplitz_eigen(trials, &mut next())?);
    results.push(check_theta_similarity(trials, &mut next())?);
    Ok(results)
}

/// Checks on a concrete network: per-layer lowering equivalence on `trials`
/// random inputs and exact-vs-bounded norms. Layers whose effective matrix
/// exceeds `cap` in its smaller dimension are skipped and counted.
pub fn check_network(
    spec: &NetworkSpec,
    weights: &[DenseMatrix],
    trials: usize,
    seed: u64,
    cap: usize,
) -> Result<Vec<PropertyOutcome>> {
    spec.ensure_valid()?;
    let mut rng = stream(seed, 0xB0B);
    let mut lower = PropertyOutcome::new("network_layer_lowering");
    let mut norms = PropertyOutcome::new("network_exact_within_bounded");
    for (layer, w) in spec.layers.iter().zip(weights) {
        let small = layer.d_in.min(layer.d_out);
        if small > cap {
            lower.skipped += 1;
            norms.skipped += 1;
            continue;
        }
        let c = network::effective_matrix(layer, w)?;
        for _ in 0..trials.max(1) {
            let z = random(layer.d_in, 1, &mut rng);
            let direct = network::apply_linear(layer, w, &z)?;
            let (err, tol) = normwise(&direct, &c.matmul(&z)?, LOWERING_TOL);
            lower.record(err, tol);
        }
        let exact = network::layer_norms_capped(layer, w, NormMode::Exact, cap)?;
        let bounded = network::layer_norms_capped(layer, w, NormMode::Bounded, cap)?;
        let equality = matches!(layer.kind, LayerKind::PointwiseConv | LayerKind::FullyConnected);
        let err = if equality {
            (exact.s - bounded.s).abs()
        } else {
            (exact.s - bounded.s).max(0.0)
        };
        norms.record(err, spectral_slack(bounded.s));
        let s_power = linalg::spectral_norm(&c, seed).value;
        norms.record((s_power - exact.s).abs(), 1e-8 * exact.s.max(1e-2));
    }
    Ok(vec![lower, norms])
}
