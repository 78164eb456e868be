// Copyright (c) 2026 The bbrsim Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied. See the License for the specific language governing
// permissions and limitations under the License.

//! Command-line interface: `run` one experiment, `sweep` a grid, or
//! `report` an output tree. Config errors exit with status 2.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bbrsim::cc::CcAlgo;
use bbrsim::harness::{
    self, ExperimentConfig, HarnessError, PartialConfig, Scenario, UTIL_LOSSES,
};

/// Environment variable naming the default output root.
const OUT_ENV: &str = "BBRSIM_OUT";

#[derive(Parser)]
#[command(
    name = "bbrsim",
    version,
    about = "Deterministic congestion control experiments on a dumbbell network"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario case and write its CSV files.
    Run(RunArgs),
    /// Run every case of a scenario for several algorithms; utilization
    /// also sweeps its loss grid.
    Sweep(SweepArgs),
    /// Aggregate run summaries under a directory into comparison tables.
    Report(ReportArgs),
}

#[derive(Args)]
struct RunArgs {
    /// intra_fairness, rtt_unfairness, utilization, responsiveness, or
    /// inter_protocol.
    #[arg(long)]
    scenario: Option<String>,
    /// Case id from the scenario's table.
    #[arg(long)]
    case: Option<u32>,
    /// reno, cubic, bbr, bbr_prime, bbrplus, bbr_hsr, tsunami, or bbr2.
    #[arg(long)]
    algo: Option<String>,
    /// Random loss rate on the bottleneck, in [0, 1].
    #[arg(long)]
    loss: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output root (default: $BBRSIM_OUT, then ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// RTprop compensation factor for bbr_hsr.
    #[arg(long)]
    lambda: Option<f64>,
    /// Print the resolved config and exit without running.
    #[arg(long)]
    print_config: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    scenario: String,
    /// Comma-separated algorithm list.
    #[arg(long, value_delimiter = ',', required = true)]
    algos: Vec<String>,
    /// Comma-separated seeds; more than one adds per-seed directories.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    /// Output root (default: $BBRSIM_OUT, then ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// RTprop compensation factor for bbr_hsr.
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Args)]
struct ReportArgs {
    /// Output root to aggregate.
    #[arg(long)]
    dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Run(a) => cmd_run(a),
        Cmd::Sweep(a) => cmd_sweep(a),
        Cmd::Report(a) => cmd_report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

impl RunArgs {
    fn layers(&self) -> Result<PartialConfig, HarnessError> {
        let cli = PartialConfig {
            scenario: self.scenario.clone(),
            case: self.case,
            algo: self.algo.clone(),
            loss: self.loss,
            seed: self.seed,
            rtprop_lambda: self.lambda,
            ..PartialConfig::default()
        };
        Ok(match &self.config {
            Some(path) => cli.or(PartialConfig::from_toml_file(path)?),
            None => cli,
        })
    }
}

fn out_root(cli_out: &Option<PathBuf>, cfg: &ExperimentConfig) -> PathBuf {
    if let Some(p) = cli_out {
        return p.clone();
    }
    if let Some(p) = &cfg.out_dir {
        return PathBuf::from(p);
    }
    match std::env::var(OUT_ENV) {
        Ok(p) if !p.is_empty() => PathBuf::from(p),
        _ => PathBuf::from("out"),
    }
}

fn summary_line(dir: &std::path::Path, s: &bbrsim::metrics::ScenarioSummary) -> String {
    format!(
        "{}: jain={:.4} ratio={:.4} util={:.4} owd={:.3}ms loss={:.6}",
        dir.display(),
        s.jain,
        s.ratio,
        s.util,
        s.mean_owd_ms,
        s.loss_rate
    )
}

fn cmd_run(args: &RunArgs) -> Result<(), HarnessError> {
    let cfg = args.layers()?.resolve()?;
    if args.print_config {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    let dir = out_root(&args.out, &cfg).join(harness::run_dir(&cfg));
    let summary = harness::execute(&cfg, &dir)?;
    println!("{}", summary_line(&dir, &summary));
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), HarnessError> {
    let scenario: Scenario = args.scenario.parse().map_err(HarnessError::Config)?;
    let algos: Vec<CcAlgo> = args
        .algos
        .iter()
        .map(|s| s.parse::<CcAlgo>().map_err(HarnessError::Config))
        .collect::<Result<_, _>>()?;
    let seeds = if args.seeds.is_empty() {
        vec![1]
    } else {
        args.seeds.clone()
    };
    let losses: &[f64] = if scenario == Scenario::Utilization {
        &UTIL_LOSSES
    } else {
        &[0.0]
    };
    let mut runs = 0u32;
    for case in scenario.cases() {
        for algo in &algos {
            for &loss in losses {
                for &seed in &seeds {
                    let cfg = PartialConfig {
                        scenario: Some(scenario.as_str().into()),
                        case: Some(case),
                        algo: Some(algo.as_str().into()),
                        loss: Some(loss),
                        seed: Some(seed),
                        rtprop_lambda: args.lambda,
                        ..PartialConfig::default()
                    }
                    .resolve()?;
                    let mut dir = out_root(&args.out, &cfg).join(harness::run_dir(&cfg));
                    if seeds.len() > 1 {
                        dir.push(format!("seed{seed}"));
                    }
                    let summary = harness::execute(&cfg, &dir)?;
                    println!("{}", summary_line(&dir, &summary));
                    runs += 1;
                }
            }
        }
    }
    println!("{runs} runs complete");
    Ok(())
}

fn cmd_report(args: &ReportArgs) -> Result<(), HarnessError> {
    let records = harness::collect(&args.dir)?;
    if records.is_empty() {
        return Err(HarnessError::Config(format!(
            "no run directories under {}",
            args.dir.display()
        )));
    }
    print!("{}", harness::render(&records));
    Ok(())
}
