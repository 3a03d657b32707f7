use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use convbound::bundle::{self, NetBundle, ScaleMode};
use convbound::complexity::{self, BoundParams, RiskSample};
use convbound::linalg::DEFAULT_ORACLE_CAP;
use convbound::network::{self, NetworkSpec, NormMode};
use convbound::{verify, zoo};

use crate::table::{self, num};
use crate::{invalid, ArchArg, CliError, Command, ScaleArg};

/// Overrides the largest matrix dimension handed to the dense oracle.
pub const ORACLE_CAP_ENV: &str = "CONVBOUND_ORACLE_CAP";

type CmdResult = Result<(), CliError>;

fn oracle_cap() -> Result<usize, CliError> {
    match std::env::var(ORACLE_CAP_ENV) {
        Err(_) => Ok(DEFAULT_ORACLE_CAP),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| invalid(format!("{ORACLE_CAP_ENV} must be a positive integer, got {v:?}"))),
    }
}

fn load(path: &Path) -> Result<NetBundle, CliError> {
    bundle::load_bundle(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(format!("--{name} must be positive, got {v}")))
    }
}

pub fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::Lower {
            bundle,
            layer,
            out: file,
        } => lower(&bundle, layer, file.as_deref(), out),
        Command::Norms { bundle, mode } => norms(&bundle, mode.into(), out),
        Command::Verify { bundle, trials, seed } => run_verify(&bundle, trials, seed, out),
        Command::Complexity { bundle, eta, mode } => sensitive(&bundle, eta, mode.into(), out),
        Command::Bound {
            bundle,
            eta,
            delta,
            n,
            x_fnorm,
            risk_file,
            mode,
        } => {
            let params = BoundParams { eta, delta, n, x_fnorm };
            bound(&bundle, params, risk_file.as_deref(), mode.into(), out)
        }
        Command::Compare {
            bundle,
            mode,
            ignore_n,
            n,
        } => compare(&bundle, mode.into(), ignore_n, n, out, err),
        Command::Margins {
            bundle,
            data,
            labels,
            eta,
            per_example,
        } => margins(&bundle, &data, &labels, eta, per_example.as_deref(), out),
        Command::Gen {
            arch,
            spec,
            width,
            resolution,
            classes,
            seed,
            scale,
            sigma,
            inline,
            out: path,
        } => {
            let spec = match (arch, spec) {
                (Some(ArchArg::MobilenetV1), _) => {
                    zoo::mobilenet_v1_spec(width, resolution, classes).map_err(invalid)?
                }
                (None, Some(p)) => read_spec(&p)?,
                (None, None) => return Err(CliError::Usage("either --arch or --spec is required".into())),
            };
            let scale = match scale {
                ScaleArg::UnitFrobenius => ScaleMode::UnitFrobenius,
                ScaleArg::Gaussian => ScaleMode::Gaussian(positive("sigma", sigma)?),
            };
            generate(&spec, seed, scale, inline, &path, out)
        }
    }
}

fn read_spec(path: &Path) -> Result<NetworkSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        invalid(format!(
            "{}: line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

fn lower(path: &Path, layer: usize, file: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let b = load(path)?;
    if layer == 0 || layer > b.spec.depth() {
        return Err(invalid(format!(
            "--layer must lie in 1..={}, got {layer}",
            b.spec.depth()
        )));
    }
    let c = network::effective_matrix(&b.spec.layers[layer - 1], &b.weights[layer - 1]).map_err(invalid)?;
    let emit = |sink: &mut dyn Write| -> CmdResult {
        let mut w = table::writer(sink);
        let header: Vec<String> = (1..=c.cols()).map(|j| format!("c{j}")).collect();
        w.write_record(&header).map_err(invalid)?;
        for i in 0..c.rows() {
            w.write_record(c.row(i).iter().map(|&v| num(v))).map_err(invalid)?;
        }
        table::finish(w)
    };
    match file {
        Some(p) => {
            let f = File::create(p).map_err(|e| invalid(format!("{}: {e}", p.display())))?;
            emit(&mut BufWriter::new(f))
        }
        None => emit(out),
    }
}

fn norms(path: &Path, mode: NormMode, out: &mut dyn Write) -> CmdResult {
    let b = load(path)?;
    let rows = network::network_norms(&b.spec, &b.weights, mode, oracle_cap()?).map_err(invalid)?;
    let mut w = table::writer(out);
    w.write_record(["layer", "kind", "mode", "a", "s", "n21", "fro_effective"])
        .map_err(invalid)?;
    for (i, (l, n)) in b.spec.layers.iter().zip(&rows).enumerate() {
        w.write_record([
            (i + 1).to_string(),
            l.kind.as_str().to_string(),
            mode.as_str().to_string(),
            num(n.a),
            num(n.s),
            num(n.n21),
            num(n.fro_effective),
        ])
        .map_err(invalid)?;
    }
    table::finish(w)
}

fn run_verify(path: &Path, trials: usize, seed: u64, out: &mut dyn Write) -> CmdResult {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let b = load(path)?;
    let mut results = verify::run_suite(trials, seed).map_err(invalid)?;
    results.extend(verify::check_network(&b.spec, &b.weights, trials, seed, oracle_cap()?).map_err(invalid)?);
    let mut w = table::writer(out);
    w.write_record(["property", "trials", "failures", "skipped", "worst", "status"])
        .map_err(invalid)?;
    for r in &results {
        w.write_record([
            r.name.clone(),
            r.trials.to_string(),
            r.failures.to_string(),
            r.skipped.to_string(),
            num(r.worst),
            if r.passed() { "pass" } else { "fail" }.to_string(),
        ])
        .map_err(invalid)?;
    }
    table::finish(w)?;
    if results.iter().all(|r| r.passed()) {
        Ok(())
    } else {
        Err(CliError::VerifyFailed)
    }
}

fn complexity_of(b: &NetBundle, mode: NormMode) -> Result<complexity::Magnitude, CliError> {
    let norms = network::network_norms(&b.spec, &b.weights, mode, oracle_cap()?).map_err(invalid)?;
    let layers = complexity::complexity_layers(&b.spec, &norms).map_err(invalid)?;
    complexity::sensitive_complexity(&layers).map_err(invalid)
}

fn sensitive(path: &Path, eta: f64, mode: NormMode, out: &mut dyn Write) -> CmdResult {
    positive("eta", eta)?;
    let b = load(path)?;
    let r = complexity_of(&b, mode)?;
    let mut w = table::writer(out);
    w.write_record(["mode", "eta", "complexity", "ln", "log10", "overflow"])
        .map_err(invalid)?;
    w.write_record([
        mode.as_str().to_string(),
        num(eta),
        num(r.value),
        num(r.ln),
        num(r.log10()),
        r.overflow.to_string(),
    ])
    .map_err(invalid)?;
    table::finish(w)
}

fn bound(path: &Path, params: BoundParams, risk_file: Option<&Path>, mode: NormMode, out: &mut dyn Write) -> CmdResult {
    params.validate().map_err(invalid)?;
    let risk = risk_file.map(table::read_risk).transpose()?.unwrap_or(0.0);
    let b = load(path)?;
    let r = complexity_of(&b, mode)?;
    let rad = complexity::rademacher_bound(&params, r.value).map_err(invalid)?;
    let conf = complexity::confidence_term(&params).map_err(invalid)?;
    let total = complexity::generalization_bound(risk, &params, r.value).map_err(invalid)?;
    let mut w = table::writer(out);
    w.write_record([
        "mode",
        "complexity",
        "empirical_risk",
        "rademacher",
        "confidence",
        "bound",
    ])
    .map_err(invalid)?;
    w.write_record([
        mode.as_str().to_string(),
        num(r.value),
        num(risk),
        num(rad),
        num(conf),
        num(total),
    ])
    .map_err(invalid)?;
    table::finish(w)
}

fn compare(
    path: &Path,
    mode: NormMode,
    ignore_n: bool,
    n: Option<usize>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    if n == Some(0) {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let b = load(path)?;
    let ignore = ignore_n || n.is_none();
    let report = zoo::architecture_comparison(&b.spec, &b.weights, mode, ignore, n.unwrap_or(1), oracle_cap()?)
        .map_err(invalid)?;
    let _ = writeln!(
        err,
        "note: each family is its bare asymptotic expression (unit constant, no log factors){}",
        if ignore { ", n ignored" } else { "" }
    );
    let mut w = table::writer(out);
    w.write_record(["rank", "family", "value", "log10", "mode"])
        .map_err(invalid)?;
    for (i, f) in report.families.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            f.family.name().to_string(),
            num(f.value),
            num(f.log10),
            report.mode.as_str().to_string(),
        ])
        .map_err(invalid)?;
    }
    table::finish(w)
}

fn margins(
    path: &Path,
    data: &Path,
    labels: &Path,
    eta: f64,
    per_example: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    positive("eta", eta)?;
    let b = load(path)?;
    let x = table::read_examples(data, b.spec.input_dim)?;
    let labels = table::read_labels(labels)?;
    let logits = network::forward(&b.spec, &b.weights, &x).map_err(invalid)?;
    let sample = RiskSample::new(logits, labels).map_err(invalid)?;
    let ms = sample.margins();
    let ramp = complexity::empirical_ramp_risk(&sample, eta).map_err(invalid)?;
    let zero_one = complexity::empirical_zero_one_risk(&sample);

    let mut sorted = ms.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let mean = complexity::compensated_sum(ms.iter().copied()) / n as f64;

    let mut w = table::writer(out);
    w.write_record([
        "n",
        "eta",
        "ramp_risk",
        "zero_one_risk",
        "margin_min",
        "margin_median",
        "margin_mean",
        "margin_max",
    ])
    .map_err(invalid)?;
    w.write_record([
        n.to_string(),
        num(eta),
        num(ramp),
        num(zero_one),
        num(sorted[0]),
        num(median),
        num(mean),
        num(sorted[n - 1]),
    ])
    .map_err(invalid)?;
    table::finish(w)?;

    if let Some(p) = per_example {
        let f = File::create(p).map_err(|e| invalid(format!("{}: {e}", p.display())))?;
        let mut w = table::writer(BufWriter::new(f));
        w.write_record(["index", "label", "prediction", "margin", "ramp_loss"])
            .map_err(invalid)?;
        let preds = sample.predictions();
        for (i, (&m, &y)) in ms.iter().zip(sample.labels()).enumerate() {
            w.write_record([
                (i + 1).to_string(),
                y.to_string(),
                preds[i].to_string(),
                num(m),
                num(complexity::ramp(-m, eta)),
            ])
            .map_err(invalid)?;
        }
        table::finish(w)?;
    }
    Ok(())
}

fn generate(
    spec: &NetworkSpec,
    seed: u64,
    scale: ScaleMode,
    inline: bool,
    path: &Path,
    out: &mut dyn Write,
) -> CmdResult {
    let b = bundle::gen_weights(spec, seed, scale).map_err(invalid)?;
    let saved = if inline {
        bundle::save_bundle_inline(&b, path)
    } else {
        bundle::save_bundle(&b, path)
    };
    saved.map_err(invalid)?;
    let params: usize = b.weights.iter().map(|w| w.rows() * w.cols()).sum();
    let mut w = table::writer(out);
    w.write_record(["layers", "parameters", "seed"]).map_err(invalid)?;
    w.write_record([b.spec.depth().to_string(), params.to_string(), seed.to_string()])
        .map_err(invalid)?;
    table::finish(w)
}
