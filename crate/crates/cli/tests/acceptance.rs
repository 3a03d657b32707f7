//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

use std::time::{Duration, Instant};

use convbound::bounds::{toeplitz_eig_bound, toeplitz_sequence};
use convbound::complexity::{
    covering_ball_bound, covering_conv_layer_bound, covering_fc_layer_bound, covering_network_bound,
    generalization_bound, rademacher_bound, ramp_loss, sensitive_complexity, sensitive_complexity_conv,
    sensitive_complexity_fc, BoundParams, ComplexityLayer, ConvTerm, FcTerm,
};
use convbound::linalg::{frobenius_norm, norm_2_1, spectral_norm_dense_oracle, symmetric_eigenvalues, DenseMatrix};
use convbound::lowering::{
    gamma_depthwise, gamma_pointwise, gamma_standard, mu_depthwise, mu_direct, mu_pointwise, omega, plan_1d, plan_2d,
    theta, ConvWeight,
};
use convbound::rng::SplitMix64;
use convbound::zoo::{simplified_fnn_bounds, BoundFamily};
use convbound_cli::run_cli;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn random(rows: usize, cols: usize, rng: &mut SplitMix64) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.gaussian()).unwrap()
}

fn rel_close(a: &DenseMatrix, b: &DenseMatrix, tol: f64) -> bool {
    a.max_abs_diff(b).unwrap() <= tol * a.max_abs().max(b.max_abs()).max(f64::MIN_POSITIVE)
}

fn spot(got: f64, want: f64) -> bool {
    if want == 0.0 {
        got == 0.0
    } else {
        (got - want).abs() <= 1e-12 * want.abs()
    }
}

fn worked_example() -> Outcome {
    let expected_sets: [[usize; 4]; 6] = [
        [1, 2, 5, 6],
        [2, 3, 6, 7],
        [3, 4, 7, 8],
        [5, 6, 9, 10],
        [6, 7, 10, 11],
        [7, 8, 11, 12],
    ];
    let (w11, w12, w21, w22) = (1.5, -2.25, 3.125, 0.75);
    let z = 0.0;
    #[rustfmt::skip]
    let expected = DenseMatrix::from_rows(&[
        vec![w11, w12, z, z, w21, w22, z, z, z, z, z, z],
        vec![z, w11, w12, z, z, w21, w22, z, z, z, z, z],
        vec![z, z, w11, w12, z, z, w21, w22, z, z, z, z],
        vec![z, z, z, z, w11, w12, z, z, w21, w22, z, z],
        vec![z, z, z, z, z, w11, w12, z, z, w21, w22, z],
        vec![z, z, z, z, z, z, w11, w12, z, z, w21, w22],
    ])
    .unwrap();
    let weight = DenseMatrix::from_rows(&[vec![w11, w12, w21, w22]]).unwrap();

    let start = Instant::now();
    let plan = plan_2d(3, 4, 2, 2, 1).unwrap();
    let gamma = gamma_standard(&ConvWeight::standard(weight, 4, 1).unwrap(), &plan).unwrap();
    let elapsed = start.elapsed();

    let sets_ok = plan.num_ops() == 6 && plan.sets().iter().zip(&expected_sets).all(|(s, e)| s.indices() == e);
    let gamma_ok = gamma.shape() == (6, 12) && gamma.max_abs_diff(&expected).unwrap() == 0.0;
    let fast = elapsed < Duration::from_millis(1);
    (
        sets_ok && gamma_ok && fast,
        format!("index sets {sets_ok}, 6x12 matrix exact {gamma_ok}, {elapsed:?} (< 1 ms)"),
    )
}

fn lowering_equivalence() -> Outcome {
    let mut rng = SplitMix64::new(0xACCE_0002);
    let trials = 200;
    let mut failures = [0usize; 5];
    let start = Instant::now();
    for _ in 0..trials {
        // Standard 1D, multi-channel.
        let (c_in, c) = (rng.range(1, 3), rng.range(1, 4));
        let len = rng.range(2, 20);
        let k = rng.range(1, len.min(6));
        let s = rng.range(1, 4);
        let plan = plan_1d(len, k, s).unwrap().replicate_channels(c_in).unwrap();
        let w = ConvWeight::standard(random(c, k * c_in, &mut rng), k, c_in).unwrap();
        let z = random(plan.input_dim(), 2, &mut rng);
        let g = gamma_standard(&w, &plan).unwrap().matmul(&z).unwrap();
        failures[0] += !rel_close(&mu_direct(&w, &plan, &z).unwrap(), &g, 1e-13) as usize;

        // Standard 2D, multi-channel.
        let (h, wd) = (rng.range(2, 8), rng.range(2, 8));
        let k = rng.range(1, h.min(wd).min(3));
        let s = rng.range(1, 2);
        let plan = plan_2d(h, wd, k, k, s).unwrap().replicate_channels(c_in).unwrap();
        let w = ConvWeight::standard(random(c, k * k * c_in, &mut rng), k * k, c_in).unwrap();
        let z = random(plan.input_dim(), 2, &mut rng);
        let g = gamma_standard(&w, &plan).unwrap().matmul(&z).unwrap();
        failures[1] += !rel_close(&mu_direct(&w, &plan, &z).unwrap(), &g, 1e-13) as usize;

        // Depthwise, overlapping then non-overlapping.
        for (slot, overlap) in [(2usize, true), (3, false)] {
            let ch = rng.range(1, 5);
            let k = rng.range(2, 5);
            let s = if overlap {
                rng.range(1, k - 1)
            } else {
                rng.range(k, k + 2)
            };
            let len = rng.range(k, 24);
            let plan = plan_1d(len, k, s).unwrap();
            let w = ConvWeight::depthwise(random(ch, k, &mut rng));
            let z = random(len * ch, 2, &mut rng);
            let g = gamma_depthwise(&w, &plan).unwrap().matmul(&z).unwrap();
            failures[slot] += !rel_close(&mu_depthwise(&w, &plan, &z).unwrap(), &g, 1e-13) as usize;
        }

        // Pointwise.
        let (co, ci, m) = (rng.range(1, 8), rng.range(1, 8), rng.range(1, 8));
        let w = ConvWeight::pointwise(random(co, ci, &mut rng));
        let z = random(ci * m, 2, &mut rng);
        let g = gamma_pointwise(&w, m).unwrap().matmul(&z).unwrap();
        failures[4] += !rel_close(&mu_pointwise(&w, m, &z).unwrap(), &g, 1e-13) as usize;
    }
    let elapsed = start.elapsed();
    let ok = failures.iter().all(|&f| f == 0) && elapsed < Duration::from_secs(10);
    (
        ok,
        format!(
            "{trials} instances per kind, failures [std1d, std2d, dw-overlap, dw-disjoint, pointwise] = {failures:?}, {elapsed:?} (< 10 s)"
        ),
    )
}

fn proposition_suite() -> Outcome {
    let mut rng = SplitMix64::new(0xACCE_0003);
    let trials = 200;
    let slack = 1e-10;
    let mut fails = [0usize; 6];
    let start = Instant::now();
    for _ in 0..trials {
        // Standard conv: ‖γ‖σ ≤ √m ‖W‖_F.
        let (c_in, c) = (rng.range(1, 3), rng.range(1, 4));
        let (h, wd) = (rng.range(2, 7), rng.range(2, 7));
        let k = rng.range(1, h.min(wd).min(3));
        let s = rng.range(1, 3);
        let base = plan_2d(h, wd, k, k, s).unwrap();
        let m = base.num_ops();
        let plan = base.replicate_channels(c_in).unwrap();
        let wm = random(c, k * k * c_in, &mut rng);
        let w = ConvWeight::standard(wm.clone(), k * k, c_in).unwrap();
        let sigma = spectral_norm_dense_oracle(&gamma_standard(&w, &plan).unwrap()).unwrap();
        let bound = (m as f64).sqrt() * frobenius_norm(&wm);
        fails[0] += (sigma > bound + slack * bound.max(1.0)) as usize;

        // Conv 2,1-norm on the same materialized matrix.
        let n21 = norm_2_1(&gamma_standard(&w, &plan).unwrap());
        let b21 = frobenius_norm(&wm) * m as f64 * (c as f64).sqrt();
        fails[5] += (n21 > b21 * (1.0 + 1e-12)) as usize;

        // Depthwise, disjoint windows: ‖γ‖σ = max_i ‖w^i‖ ≤ ‖W‖_F.
        let ch = rng.range(1, 6);
        let k = rng.range(1, 5);
        let stride = k + rng.range(0, 2);
        let len = rng.range(k, 20);
        let wm = random(ch, k, &mut rng);
        let g = gamma_depthwise(&ConvWeight::depthwise(wm.clone()), &plan_1d(len, k, stride).unwrap()).unwrap();
        let sigma = spectral_norm_dense_oracle(&g).unwrap();
        let max_row = (0..ch)
            .map(|i| (0..k).map(|t| wm.get(i, t).powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let f = frobenius_norm(&wm);
        fails[1] += ((sigma - max_row).abs() > slack * max_row.max(1.0) || sigma > f + slack) as usize;

        // Depthwise, overlapping windows: ‖γ‖σ ≤ ‖W‖_∞.
        let k = rng.range(2, 6);
        let stride = rng.range(1, k - 1);
        let len = rng.range(k, 24);
        let wm = random(ch, k, &mut rng);
        let g = gamma_depthwise(&ConvWeight::depthwise(wm.clone()), &plan_1d(len, k, stride).unwrap()).unwrap();
        let inf = (0..ch)
            .map(|i| (0..k).map(|t| wm.get(i, t).abs()).sum::<f64>())
            .fold(0.0, f64::max);
        fails[2] += (spectral_norm_dense_oracle(&g).unwrap() > inf + slack) as usize;

        // Pointwise: ‖γ‖σ = ‖W‖σ over (c, c', m) in {1..8}^3.
        let (co, ci, m) = (rng.range(1, 8), rng.range(1, 8), rng.range(1, 8));
        let wm = random(co, ci, &mut rng);
        let big = spectral_norm_dense_oracle(&gamma_pointwise(&ConvWeight::pointwise(wm.clone()), m).unwrap()).unwrap();
        let small = spectral_norm_dense_oracle(&wm).unwrap();
        fails[3] += ((big - small).abs() > slack * small) as usize;

        // Fully connected 2,1-norm: ‖A‖_{2,1} ≤ √d_out ‖A‖_F.
        let (r, cc) = (rng.range(1, 16), rng.range(1, 16));
        let a = random(r, cc, &mut rng);
        fails[4] += (norm_2_1(&a) > (r as f64).sqrt() * frobenius_norm(&a) * (1.0 + 1e-12)) as usize;
    }
    let elapsed = start.elapsed();
    let ok = fails.iter().all(|&f| f == 0) && elapsed < Duration::from_secs(60);
    (
        ok,
        format!(
            "{trials} trials each, violations [standard, dw-disjoint, dw-overlap, pointwise, fc-2,1, conv-2,1] = {fails:?}, {elapsed:?} (< 60 s)"
        ),
    )
}

fn toeplitz_suite() -> Outcome {
    let mut rng = SplitMix64::new(0xACCE_0004);
    let mut structure_fail = 0;
    let mut eig_fail = 0;
    let start = Instant::now();
    for _ in 0..100 {
        let k = rng.range(2, 7);
        let s = rng.range(1, k - 1);
        let w: Vec<f64> = (0..k).map(|_| rng.gaussian()).collect();
        // t_j = Σ_i w_i w_{i + j s}
        let t: Vec<f64> = (0..k.div_ceil(s))
            .map(|j| (0..k).filter(|i| i + j * s < k).map(|i| w[i] * w[i + j * s]).sum())
            .collect();
        let len = rng.range(k, 30);
        let gram = omega(&w, &plan_1d(len, k, s).unwrap()).unwrap().gram_rows();
        let scale = t[0].max(1.0);
        for p in 0..gram.rows() {
            for q in 0..gram.cols() {
                let want = t.get(p.abs_diff(q)).copied().unwrap_or(0.0);
                structure_fail += ((gram.get(p, q) - want).abs() > 1e-13 * scale) as usize;
            }
        }
        let spec = toeplitz_sequence(&w, s).unwrap();
        let bound = toeplitz_eig_bound(&spec);
        let independent = t[0].abs() + 2.0 * t[1..].iter().map(|x| x.abs()).sum::<f64>();
        eig_fail += ((bound - independent).abs() > 1e-13 * scale) as usize;
        for n in 1..=20 {
            for e in symmetric_eigenvalues(&spec.materialize(n)).unwrap() {
                eig_fail += (e.abs() > bound * (1.0 + 1e-12)) as usize;
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = structure_fail == 0 && eig_fail == 0 && elapsed < Duration::from_secs(5);
    (
        ok,
        format!(
            "100 sequences, entry mismatches {structure_fail}, eigenvalue violations {eig_fail}, {elapsed:?} (< 5 s)"
        ),
    )
}

fn theta_similarity() -> Outcome {
    let mut rng = SplitMix64::new(0xACCE_0005);
    let mut fails = 0;
    let mut cases = 0;
    let start = Instant::now();
    for n in 1..=8 {
        for m in 1..=6 {
            for _ in 0..4 {
                let v = random(n, n + rng.range(0, 3), &mut rng).gram_rows();
                let ev = symmetric_eigenvalues(&v).unwrap();
                let et = symmetric_eigenvalues(&theta(&v, m).unwrap()).unwrap();
                let tol = 1e-10 * ev[0].abs().max(1.0);
                let repeated: Vec<f64> = ev.iter().flat_map(|&x| std::iter::repeat_n(x, m)).collect();
                fails +=
                    (et.len() != repeated.len() || et.iter().zip(&repeated).any(|(a, b)| (a - b).abs() > tol)) as usize;
                cases += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    (
        fails == 0 && elapsed < Duration::from_secs(5),
        format!("{cases} PSD matrices up to 8x8, m <= 6, mismatches {fails}, {elapsed:?} (< 5 s)"),
    )
}

fn formula_spot_values() -> Outcome {
    let start = Instant::now();
    let mut checks: Vec<(&str, bool)> = Vec::new();

    let fc1 = [FcTerm {
        rho: 1.0,
        s: 1.0,
        a: 1.0,
        d_in: 1,
        d_out: 1,
    }];
    checks.push(("R fc unit", spot(sensitive_complexity_fc(&fc1).unwrap().value, 2.0)));
    let fc0 = [FcTerm { a: 0.0, ..fc1[0] }];
    checks.push((
        "R zero weights",
        spot(sensitive_complexity_fc(&fc0).unwrap().value, 0.0),
    ));
    let conv = [ConvTerm {
        rho: 1.0,
        s: 1.0,
        a: 1.0,
        c: 2,
        r: 3,
        d: 8,
    }; 2];
    checks.push((
        "R conv 1152",
        spot(sensitive_complexity_conv(&conv).unwrap().value, 1152.0),
    ));

    checks.push(("ball a=0", spot(covering_ball_bound(5, 0.0, 1.0).unwrap(), 0.0)));
    checks.push(("ball ln2", spot(covering_ball_bound(1, 1.0, 2.0).unwrap(), 2f64.ln())));
    checks.push((
        "ball 3ln3",
        spot(covering_ball_bound(3, 1.0, 1.0).unwrap(), 3.0 * 3f64.ln()),
    ));
    checks.push((
        "fc ln3",
        spot(covering_fc_layer_bound(1, 1, 1.0, 1.0, 1.0).unwrap(), 3f64.ln()),
    ));
    checks.push((
        "fc a=0",
        spot(covering_fc_layer_bound(3, 2, 0.0, 1.0, 1.0).unwrap(), 0.0),
    ));
    checks.push((
        "conv ln3",
        spot(covering_conv_layer_bound(1, 1, 1.0, 1, 1.0, 1.0).unwrap(), 3f64.ln()),
    ));
    checks.push((
        "conv a=0",
        spot(covering_conv_layer_bound(2, 3, 0.0, 4, 1.0, 1.0).unwrap(), 0.0),
    ));
    checks.push(("network 2", spot(covering_network_bound(4.0, 1.0, 1.0).unwrap(), 2.0)));
    checks.push(("network R=0", spot(covering_network_bound(4.0, 0.0, 1.0).unwrap(), 0.0)));

    let p = BoundParams {
        eta: 2.0,
        delta: 0.5,
        n: 1,
        x_fnorm: 1.0,
    };
    checks.push(("rademacher 16", spot(rademacher_bound(&p, 1.0).unwrap(), 16.0)));
    checks.push(("rademacher R=0", spot(rademacher_bound(&p, 0.0).unwrap(), 0.0)));
    let p16 = BoundParams { n: 16, ..p };
    checks.push((
        "rademacher n->16n",
        spot(rademacher_bound(&p16, 1.0).unwrap(), 16.0 / 16f64.powf(0.625)),
    ));
    let g = BoundParams {
        eta: 1.0,
        delta: (-2.0f64).exp(),
        n: 2,
        x_fnorm: 1.0,
    };
    checks.push((
        "generalization 3/sqrt2",
        spot(generalization_bound(0.0, &g, 0.0).unwrap(), 3.0 / 2f64.sqrt()),
    ));
    let bad = BoundParams { delta: 1.0, ..g };
    checks.push(("delta=1 rejected", generalization_bound(0.0, &bad, 0.0).is_err()));

    let mut rng = SplitMix64::new(0xACCE_0006);
    let mut collapse = true;
    for depth in 1..=12 {
        let fcs: Vec<FcTerm> = (0..depth)
            .map(|_| FcTerm {
                rho: rng.uniform(1.0, 2.0),
                s: rng.uniform(0.1, 5.0),
                a: rng.uniform(0.0, 5.0),
                d_in: rng.range(1, 300),
                d_out: rng.range(1, 300),
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
        let (x, y) = (
            sensitive_complexity(&general).unwrap(),
            sensitive_complexity_fc(&fcs).unwrap(),
        );
        collapse &= x.value.to_bits() == y.value.to_bits() && x.ln.to_bits() == y.ln.to_bits();

        let convs: Vec<ConvTerm> = (0..depth)
            .map(|_| ConvTerm {
                rho: rng.uniform(1.0, 2.0),
                s: rng.uniform(0.1, 5.0),
                a: rng.uniform(0.0, 5.0),
                c: rng.range(1, 64),
                r: rng.range(1, 50),
                d: rng.range(1, 5000),
            })
            .collect();
        let general: Vec<ComplexityLayer> = convs
            .iter()
            .map(|t| ComplexityLayer::Conv {
                rho: t.rho,
                s: t.s,
                a: t.a,
                c: t.c,
                r: t.r,
                d: t.d,
            })
            .collect();
        let (x, y) = (
            sensitive_complexity(&general).unwrap(),
            sensitive_complexity_conv(&convs).unwrap(),
        );
        collapse &= x.value.to_bits() == y.value.to_bits() && x.ln.to_bits() == y.ln.to_bits();
    }
    checks.push(("general form collapses bit-identically", collapse));

    let elapsed = start.elapsed();
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    (
        failed.is_empty() && elapsed < Duration::from_secs(1),
        format!("{} spot checks, failed {failed:?}, {elapsed:?} (< 1 s)", checks.len()),
    )
}

fn mobilenet_ordering() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("mobilenet.json");
    let bundle = bundle.to_str().unwrap();
    let start = Instant::now();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let gen = [
        "convbound",
        "gen",
        "--arch",
        "mobilenet-v1",
        "--seed",
        "2024",
        "--scale",
        "unit-frobenius",
        "--out",
        bundle,
    ];
    if run_cli(gen, &mut out, &mut err) != 0 {
        return (false, format!("gen failed: {}", String::from_utf8_lossy(&err)));
    }
    out.clear();
    let code = run_cli(
        ["convbound", "compare", bundle, "--mode", "bounded", "--ignore-n"],
        &mut out,
        &mut err,
    );
    let elapsed = start.elapsed();
    if code != 0 {
        return (
            false,
            format!("compare exited {code}: {}", String::from_utf8_lossy(&err)),
        );
    }
    let text = String::from_utf8(out).unwrap();
    let ranking: Vec<(String, String)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].to_string(), f[3].to_string())
        })
        .collect();
    let names: Vec<&str> = ranking.iter().map(|r| r.0.as_str()).collect();
    let ours_first = names.first() == Some(&"Ours");
    let mut top_two: Vec<&str> = names.iter().rev().take(2).copied().collect();
    top_two.sort_unstable();
    let exp_last = top_two == ["Golowich18", "Neyshabur15"];
    let listing: Vec<String> = ranking
        .iter()
        .map(|(n, l)| format!("{n}={:.2}", l.parse::<f64>().unwrap_or(f64::NAN)))
        .collect();
    (
        ours_first && exp_last && elapsed < Duration::from_secs(30),
        format!(
            "Ours smallest {ours_first}, Neyshabur15/Golowich18 largest two {exp_last}, log10 ascending [{}], {elapsed:?} (< 30 s)",
            listing.join(", ")
        ),
    )
}

fn table_asymptotics() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for depth in 5..=50 {
        let v = simplified_fnn_bounds(1.0, 1.0, 1.0, depth, 1).unwrap();
        let get = |f: BoundFamily| v.iter().find(|b| b.family == f).unwrap().value;
        let (ours, bart, ney) = (
            get(BoundFamily::Ours),
            get(BoundFamily::BartlettSpectral17),
            get(BoundFamily::Neyshabur15),
        );
        let l = depth as f64;
        let matches = spot(ours, l.powf(0.75)) && spot(bart, l.powf(1.5)) && spot(ney, 2f64.powf(l));
        if !(ours <= bart && bart <= ney && matches) {
            bad.push(depth);
        }
    }
    let elapsed = start.elapsed();
    (
        bad.is_empty() && elapsed < Duration::from_secs(1),
        format!("L in 5..=50, violating depths {bad:?}, {elapsed:?} (< 1 s)"),
    )
}

fn ramp_lipschitz() -> Outcome {
    let mut rng = SplitMix64::new(0xACCE_0009);
    let start = Instant::now();
    let mut worst_excess = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let k = rng.range(2, 10);
        let eta = rng.uniform(0.01, 5.0);
        let y = rng.range(1, k);
        let f: Vec<f64> = (0..k).map(|_| eta * rng.gaussian()).collect();
        let step = eta * 10f64.powf(rng.uniform(-4.0, 0.5));
        let g: Vec<f64> = f.iter().map(|v| v + step * rng.gaussian()).collect();
        let dist = f.iter().zip(&g).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if dist == 0.0 {
            continue;
        }
        let slope = (ramp_loss(&f, y, eta).unwrap() - ramp_loss(&g, y, eta).unwrap()).abs() / dist;
        worst_excess = worst_excess.max(slope - 2.0 / eta);
    }
    let eta = 0.7;
    let at = |m: f64| ramp_loss(&[m, 0.0], 1, eta).unwrap();
    let boundary = [at(-eta), at(0.0), at(eta)];
    let elapsed = start.elapsed();
    let ok = worst_excess <= 1e-8 && boundary == [1.0, 1.0, 0.0] && elapsed < Duration::from_secs(1);
    (
        ok,
        format!(
            "1000 pairs, max(slope - 2/eta) = {worst_excess:.3e}, boundary values {boundary:?}, {elapsed:?} (< 1 s)"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("worked example fidelity", worked_example),
        ("lowering equivalence", lowering_equivalence),
        ("proposition suite", proposition_suite),
        ("toeplitz suite", toeplitz_suite),
        ("theta similarity", theta_similarity),
        ("formula evaluators", formula_spot_values),
        ("mobilenet ordering", mobilenet_ordering),
        ("table asymptotics", table_asymptotics),
        ("ramp-loss lipschitz", ramp_lipschitz),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (ok, detail) = run();
        failed += !ok as usize;
        println!(
            "criterion {} [{}] {name}: {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
