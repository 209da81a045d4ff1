use std::fs;
use std::io::Write;
use std::path::Path;

use mubcert::certify::{full_certificate, min_asp_for_nontrivial_eta, CertificateReport};
use mubcert::mub::{
    fourier_mub_pair, is_mutually_unbiased, norm_sum, overlap_entropy, paper_mub_pair_d4, s_max,
    MubError, MubPair,
};
use mubcert::photonics::{
    calibrate_drift_sigma, ideal_counts, mean_fringe_visibility, simulate_detections,
    simulate_pulses, InterferometerConfig, PhaseNoiseModel, PhotonicsError,
};
use mubcert::qla::DEFAULT_TOL;
use mubcert::qrac::{estimate_asp, quantum_optimum, AspEstimate};
use mubcert::CountsTable;
use serde::Serialize;
use serde_json::json;

use crate::args::{
    CertifyArgs, Cli, Command, ConstructionArg, FigureDataArgs, MubArgs, OutputFormat, SimulateArgs,
};
use crate::error::{CliError, Result};
use crate::manifest::{self, RunManifest};

/// Everything a command needs besides its parsed arguments.
pub struct Invocation {
    pub argv: Vec<String>,
    pub started_at: String,
    /// Configuration recorded in a manifest, used instead of re-reading the file.
    pub config_override: Option<InterferometerConfig>,
}

pub fn run(cli: Cli, inv: Invocation) -> Result<()> {
    match cli.command {
        Command::Mub(a) => cmd_mub(a, inv),
        Command::Simulate(a) => cmd_simulate(a, inv),
        Command::Certify(a) => cmd_certify(a, inv),
        Command::FigureData(a) => cmd_figure_data(a, inv),
        Command::Replay(a) => cmd_replay(&a.manifest),
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(CliError::io(parent))?;
    }
    fs::write(path, contents).map_err(CliError::io(path))
}

fn print(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(CliError::io("<stdout>"))
}

fn read_counts(path: &Path) -> Result<CountsTable> {
    let file = fs::File::open(path).map_err(CliError::io(path))?;
    CountsTable::read_csv(file).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn mub_error(e: MubError) -> CliError {
    match e {
        MubError::InvalidDimension(_) => CliError::Args(e.to_string()),
        other => CliError::Data(other.to_string()),
    }
}

#[derive(Serialize)]
struct MubMetrics {
    overlap_entropy: f64,
    norm_sum_first: f64,
    norm_sum_second: f64,
    s_max: f64,
    unbiased: bool,
}

fn cmd_mub(args: MubArgs, inv: Invocation) -> Result<()> {
    let pair: MubPair = match args.construction {
        ConstructionArg::PaperD4 if args.d != 4 => {
            return Err(CliError::Args(format!(
                "the paper-d4 construction has d = 4, got --d {}",
                args.d
            )))
        }
        ConstructionArg::PaperD4 => paper_mub_pair_d4(),
        ConstructionArg::Fourier => fourier_mub_pair(args.d).map_err(mub_error)?,
    };
    let metrics = MubMetrics {
        overlap_entropy: overlap_entropy(&pair),
        norm_sum_first: norm_sum(pair.first()).map_err(mub_error)?,
        norm_sum_second: norm_sum(pair.second()).map_err(mub_error)?,
        s_max: s_max(&pair).map_err(mub_error)?,
        unbiased: is_mutually_unbiased(&pair, DEFAULT_TOL).map_err(mub_error)?,
    };
    let pair_value: serde_json::Value =
        serde_json::from_str(&pair.to_json()).expect("pair JSON is valid");
    let doc = json!({ "pair": pair_value, "metrics": metrics });
    let text = serde_json::to_string_pretty(&doc).expect("serializable") + "\n";

    match &args.out {
        Some(out) => {
            write_file(out, text.as_bytes())?;
            let mut m = RunManifest::new("mub", inv.argv, inv.started_at);
            m.outputs.push(out.clone());
            m.write(&args.manifest.unwrap_or_else(|| manifest::default_path(out)))
        }
        None => {
            print(&text)?;
            match args.manifest {
                Some(path) => RunManifest::new("mub", inv.argv, inv.started_at).write(&path),
                None => Ok(()),
            }
        }
    }
}

fn photonics_error(e: PhotonicsError) -> CliError {
    match e {
        PhotonicsError::InvalidVisibilityTarget(_) => CliError::Args(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

fn load_config(path: Option<&Path>) -> Result<InterferometerConfig> {
    let Some(path) = path else {
        return Ok(InterferometerConfig::default());
    };
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    InterferometerConfig::from_json(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn cmd_simulate(args: SimulateArgs, mut inv: Invocation) -> Result<()> {
    let config = match inv.config_override.take() {
        Some(c) => {
            c.validate().map_err(photonics_error)?;
            c
        }
        None => load_config(args.config.as_deref())?,
    };
    let mut m = RunManifest::new("simulate", Vec::new(), inv.started_at);
    m.config = Some(config.clone());
    m.inputs.extend(args.config.clone());

    let counts = if args.ideal {
        m.details = json!({ "mode": "ideal" });
        ideal_counts(args.rounds)
    } else {
        let seed = args.seed.unwrap_or_else(rand::random);
        if args.seed.is_none() {
            inv.argv.extend(["--seed".to_string(), seed.to_string()]);
        }
        m.seed = Some(seed);
        let mut run_config = config.clone();
        if let Some(target) = args.visibility_target {
            let sigma = calibrate_drift_sigma(&config, target, seed).map_err(photonics_error)?;
            let model = match config.phase_noise.model {
                PhaseNoiseModel::None => PhaseNoiseModel::GaussianDrift,
                model => model,
            };
            run_config = config.clone().with_noise(model, sigma);
            let achieved = mean_fringe_visibility(&run_config, seed).map_err(photonics_error)?;
            m.details = json!({
                "visibility_target": target,
                "calibrated_sigma": sigma,
                "mean_fringe_visibility": achieved,
            });
        }
        match args.pulses {
            Some(pulses) => simulate_pulses(&run_config, pulses, seed),
            None => simulate_detections(&run_config, args.rounds, seed),
        }
        .map_err(photonics_error)?
    };

    write_file(&args.out, counts.to_csv_string().as_bytes())?;
    m.argv = inv.argv;
    m.outputs.push(args.out.clone());
    if let serde_json::Value::Object(map) = &mut m.details {
        map.insert("detections".into(), counts.total().into());
    } else {
        m.details = json!({ "detections": counts.total() });
    }
    m.write(
        &args
            .manifest
            .unwrap_or_else(|| manifest::default_path(&args.out)),
    )
}

fn certify_report(args: &CertifyArgs) -> Result<CertificateReport> {
    if let Some(path) = &args.counts {
        let counts = read_counts(path)?;
        if let Some(d) = args.d.filter(|&d| d != counts.dim()) {
            return Err(CliError::Data(format!(
                "counts have dimension {}, but --d {d} was given",
                counts.dim()
            )));
        }
        let estimate = estimate_asp(&counts).map_err(|e| CliError::Data(e.to_string()))?;
        return Ok(full_certificate(&estimate, counts.dim()));
    }
    let asp = args.asp.expect("clap requires --asp without --counts");
    let d = args.d.unwrap_or(4);
    if d < 2 {
        return Err(CliError::Args(format!("--d must be at least 2, got {d}")));
    }
    if !(args.sigma.is_finite() && args.sigma >= 0.0) {
        return Err(CliError::Args(format!(
            "--sigma must be non-negative, got {}",
            args.sigma
        )));
    }
    if !(asp > 0.5 && asp <= 1.0) {
        return Err(CliError::Data(format!("ASP {asp} outside (1/2, 1]")));
    }
    Ok(full_certificate(
        &AspEstimate::from_value(asp, args.sigma),
        d,
    ))
}

fn cmd_certify(args: CertifyArgs, inv: Invocation) -> Result<()> {
    let report = certify_report(&args)?;
    let json = report.to_json() + "\n";
    if let Some(out) = &args.out {
        write_file(out, json.as_bytes())?;
    }
    match args.format {
        OutputFormat::Table => print(&report.table())?,
        OutputFormat::Json => print(&json)?,
    }
    let manifest_path = args
        .manifest
        .clone()
        .or_else(|| args.out.as_deref().map(manifest::default_path));
    if let Some(path) = manifest_path {
        let mut m = RunManifest::new("certify", inv.argv, inv.started_at);
        m.inputs.extend(args.counts.clone());
        m.outputs.extend(args.out.clone());
        m.write(&path)?;
    }
    Ok(())
}

pub const OUTCOME_FILE: &str = "outcome_probabilities.csv";
pub const PER_STATE_FILE: &str = "per_state_asp.csv";

fn csv_bytes(header: Vec<String>, rows: Vec<Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn cmd_figure_data(args: FigureDataArgs, inv: Invocation) -> Result<()> {
    let counts = read_counts(&args.counts)?;
    let estimate = estimate_asp(&counts).map_err(|e| CliError::Data(e.to_string()))?;
    let d = counts.dim();

    let mut header = vec!["y".to_string(), "i".into(), "j".into()];
    header.extend((1..=d).map(|k| format!("p_{k}")));
    let mut rows = Vec::new();
    for y in 0..2 {
        for i in 0..d {
            for j in 0..d {
                let cells = counts.setting(i, j, y);
                let total = counts.setting_total(i, j, y) as f64;
                let mut row = vec![
                    (y + 1).to_string(),
                    (i + 1).to_string(),
                    (j + 1).to_string(),
                ];
                row.extend(cells.iter().map(|&c| (c as f64 / total).to_string()));
                rows.push(row);
            }
        }
    }
    let outcome_csv = csv_bytes(header, rows);

    let optimum = quantum_optimum(d).to_string();
    let eta_line = min_asp_for_nontrivial_eta(d).to_string();
    let header = [
        "i",
        "j",
        "asp",
        "asp_y1",
        "asp_y2",
        "optimal_asp",
        "nontrivial_eta_asp",
    ]
    .map(String::from)
    .to_vec();
    let mut rows = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let [a, b] = estimate.per_input[i][j];
            rows.push(vec![
                (i + 1).to_string(),
                (j + 1).to_string(),
                (0.5 * (a + b)).to_string(),
                a.to_string(),
                b.to_string(),
                optimum.clone(),
                eta_line.clone(),
            ]);
        }
    }
    let per_state_csv = csv_bytes(header, rows);

    let outcome_path = args.out_dir.join(OUTCOME_FILE);
    let per_state_path = args.out_dir.join(PER_STATE_FILE);
    write_file(&outcome_path, &outcome_csv)?;
    write_file(&per_state_path, &per_state_csv)?;

    let mut m = RunManifest::new("figure-data", inv.argv, inv.started_at);
    m.inputs.push(args.counts.clone());
    m.outputs = vec![outcome_path, per_state_path];
    m.write(
        &args
            .manifest
            .unwrap_or_else(|| args.out_dir.join("figure-data.manifest.json")),
    )
}

fn cmd_replay(path: &Path) -> Result<()> {
    let recorded = RunManifest::read(path)?;
    let cli = crate::parse(&recorded.argv).map_err(|e| {
        CliError::Data(format!("{}: recorded argv is invalid: {e}", path.display()))
    })?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(CliError::Data(
            "a manifest cannot replay another replay".into(),
        ));
    }
    let inv = Invocation {
        argv: recorded.argv.clone(),
        started_at: manifest::now(),
        config_override: recorded.config.clone(),
    };
    run(cli, inv)
}
