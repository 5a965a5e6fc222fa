//! Implementations of the CLI subcommands.

use std::io::Write;

use serde::Serialize;

use fairnoma_core::channel::{ChannelPair, SystemParams};
use fairnoma_core::ergodic::{
    ergodic_c1_noma_at_a_inf, ergodic_c1_oma, ergodic_c2_noma_at_a_sup, ergodic_c2_oma,
    ergodic_sum_oma, QuadratureConfig,
};
use fairnoma_core::mc;
use fairnoma_core::noma::{capacity_report, fair_region, noma_capacities, PowerAllocation};
use fairnoma_core::{AllocationPolicy, Quantity};

use crate::error::CliError;
use crate::rows::{write_rows, OutputFormat, ResultRow};

/// Monte Carlo sample count used when a sweep needs a stochastic fallback
/// but the user did not ask for Monte Carlo columns.
const FALLBACK_SAMPLES: u64 = 1_000_000;

const METHOD_CLOSED: &str = "closed-form";
const METHOD_QUAD: &str = "quadrature";
const METHOD_MC: &str = "monte-carlo";

/// Allocation policy as it appears on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PolicyArg {
    Fixed,
    AtInf,
    AtSup,
    Midpoint,
}

impl PolicyArg {
    /// Attach the `--alpha` value where the policy needs one.
    pub fn into_policy(self, alpha: Option<f64>) -> Result<AllocationPolicy, CliError> {
        match self {
            PolicyArg::Fixed => {
                let a = alpha.ok_or_else(|| {
                    CliError::usage("--policy fixed requires --alpha <fraction in (0, 1)>")
                })?;
                let a = PowerAllocation::new(a)
                    .map_err(|e| CliError::usage(format!("--alpha: {e}")))?;
                Ok(AllocationPolicy::Fixed(a))
            }
            PolicyArg::AtInf => Ok(AllocationPolicy::AtInf),
            PolicyArg::AtSup => Ok(AllocationPolicy::AtSup),
            PolicyArg::Midpoint => Ok(AllocationPolicy::Midpoint),
        }
    }

    /// Suffix appended to Monte Carlo quantity names.
    pub fn label(self, alpha: Option<f64>) -> String {
        match self {
            PolicyArg::Fixed => match alpha {
                Some(a) => format!("a{a}"),
                None => "fixed".to_string(),
            },
            PolicyArg::AtInf => "at_inf".to_string(),
            PolicyArg::AtSup => "at_sup".to_string(),
            PolicyArg::Midpoint => "midpoint".to_string(),
        }
    }
}

/// Per-endpoint slice of a capacity report, for serialization.
#[derive(Debug, Serialize)]
struct EndpointCapacities {
    a: f64,
    c1_oma: f64,
    c2_oma: f64,
    c1_noma: f64,
    c2_noma: f64,
    sum_oma: f64,
    sum_noma: f64,
}

impl EndpointCapacities {
    fn at(params: &SystemParams, pair: &ChannelPair, a: f64) -> Result<Self, CliError> {
        let allocation = PowerAllocation::new(a)?;
        let report = capacity_report(params, pair, allocation)?;
        Ok(Self {
            a,
            c1_oma: report.c1_oma,
            c2_oma: report.c2_oma,
            c1_noma: report.c1_noma,
            c2_noma: report.c2_noma,
            sum_oma: report.sum_oma,
            sum_noma: report.sum_noma,
        })
    }

    fn text_row(&self, name: &str) -> String {
        format!(
            "  {name:<8} {:<10.6} {:<10.6} {:<10.6} {:<10.6} {:<10.6} {:<10.6} {:<10.6}",
            self.a,
            self.c1_oma,
            self.c1_noma,
            self.c2_oma,
            self.c2_noma,
            self.sum_oma,
            self.sum_noma
        )
    }
}

#[derive(Debug, Serialize)]
struct RegionOutput {
    snr_db: f64,
    xi: f64,
    beta: f64,
    g_weak: f64,
    g_strong: f64,
    a_inf: f64,
    a_sup: f64,
    at_a_inf: EndpointCapacities,
    at_a_sup: EndpointCapacities,
}

/// `region`: fair-allocation interval plus the six capacities at both of its
/// endpoints.
pub fn cmd_region(
    out: &mut dyn Write,
    gains: (f64, f64),
    snr_db: f64,
    beta: f64,
    format: OutputFormat,
) -> Result<(), CliError> {
    let params = SystemParams::from_snr_db(snr_db, beta)
        .map_err(|e| CliError::usage(format!("--snr-db/--beta: {e}")))?;
    let pair =
        ChannelPair::new(gains.0, gains.1).map_err(|e| CliError::usage(format!("--gains: {e}")))?;
    let region = fair_region(&params, &pair)?;

    let output = RegionOutput {
        snr_db,
        xi: params.xi(),
        beta,
        g_weak: pair.g_weak(),
        g_strong: pair.g_strong(),
        a_inf: region.a_inf(),
        a_sup: region.a_sup(),
        at_a_inf: EndpointCapacities::at(&params, &pair, region.a_inf())?,
        at_a_sup: EndpointCapacities::at(&params, &pair, region.a_sup())?,
    };

    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, &output)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            writeln!(out, "snr_db    {}", output.snr_db)?;
            writeln!(out, "xi        {}", output.xi)?;
            writeln!(out, "beta      {}", output.beta)?;
            writeln!(out, "g_weak    {}", output.g_weak)?;
            writeln!(out, "g_strong  {}", output.g_strong)?;
            writeln!(out, "a_inf     {}", output.a_inf)?;
            writeln!(out, "a_sup     {}", output.a_sup)?;
            writeln!(out)?;
            writeln!(
                out,
                "  {:<8} {:<10} {:<10} {:<10} {:<10} {:<10} {:<10} {:<10}",
                "", "a", "c1_oma", "c1_noma", "c2_oma", "c2_noma", "sum_oma", "sum_noma"
            )?;
            writeln!(out, "{}", output.at_a_inf.text_row("a_inf"))?;
            writeln!(out, "{}", output.at_a_sup.text_row("a_sup"))?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct CapacityOutput {
    snr_db: f64,
    xi: f64,
    beta: f64,
    g_weak: f64,
    g_strong: f64,
    a: f64,
    a_inf: f64,
    a_sup: f64,
    in_fair_region: bool,
    c1_oma: f64,
    c2_oma: f64,
    c1_noma: f64,
    c2_noma: f64,
    sum_oma: f64,
    sum_noma: f64,
    sic_margin: f64,
}

/// `capacity`: the full report at one explicit allocation.
pub fn cmd_capacity(
    out: &mut dyn Write,
    gains: (f64, f64),
    snr_db: f64,
    beta: f64,
    alpha: f64,
    format: OutputFormat,
) -> Result<(), CliError> {
    let params = SystemParams::from_snr_db(snr_db, beta)
        .map_err(|e| CliError::usage(format!("--snr-db/--beta: {e}")))?;
    let pair =
        ChannelPair::new(gains.0, gains.1).map_err(|e| CliError::usage(format!("--gains: {e}")))?;
    let allocation =
        PowerAllocation::new(alpha).map_err(|e| CliError::usage(format!("--alpha: {e}")))?;
    let region = fair_region(&params, &pair)?;
    let report = capacity_report(&params, &pair, allocation)?;

    let output = CapacityOutput {
        snr_db,
        xi: params.xi(),
        beta,
        g_weak: pair.g_weak(),
        g_strong: pair.g_strong(),
        a: alpha,
        a_inf: region.a_inf(),
        a_sup: region.a_sup(),
        in_fair_region: region.contains(alpha),
        c1_oma: report.c1_oma,
        c2_oma: report.c2_oma,
        c1_noma: report.c1_noma,
        c2_noma: report.c2_noma,
        sum_oma: report.sum_oma,
        sum_noma: report.sum_noma,
        sic_margin: fairnoma_core::noma::sic_margin(&params, &pair, allocation),
    };

    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, &output)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            writeln!(out, "snr_db          {}", output.snr_db)?;
            writeln!(out, "xi              {}", output.xi)?;
            writeln!(out, "beta            {}", output.beta)?;
            writeln!(out, "g_weak          {}", output.g_weak)?;
            writeln!(out, "g_strong        {}", output.g_strong)?;
            writeln!(out, "a               {}", output.a)?;
            writeln!(out, "a_inf           {}", output.a_inf)?;
            writeln!(out, "a_sup           {}", output.a_sup)?;
            writeln!(out, "in_fair_region  {}", output.in_fair_region)?;
            writeln!(out, "c1_oma          {}", output.c1_oma)?;
            writeln!(out, "c2_oma          {}", output.c2_oma)?;
            writeln!(out, "c1_noma         {}", output.c1_noma)?;
            writeln!(out, "c2_noma         {}", output.c2_noma)?;
            writeln!(out, "sum_oma         {}", output.sum_oma)?;
            writeln!(out, "sum_noma        {}", output.sum_noma)?;
            writeln!(out, "sic_margin      {}", output.sic_margin)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Evenly spaced sweep grid.
fn grid(start: f64, stop: f64, steps: u32) -> Vec<f64> {
    (0..steps)
        .map(|i| start + (stop - start) * i as f64 / (steps - 1) as f64)
        .collect()
}

pub struct SnrSweep {
    pub start: f64,
    pub stop: f64,
    pub steps: u32,
    pub beta: f64,
    pub samples: Option<u64>,
    pub policies: Vec<(PolicyArg, Option<f64>)>,
    pub seed: u64,
}

/// `sweep-snr`: ergodic capacities on a transmit-SNR grid (dB). Closed forms
/// and endpoint quadratures are always emitted; Monte Carlo columns appear
/// when `--samples` is given. A grid point whose quadrature cannot converge
/// falls back to a Monte Carlo row so no value is ever silently missing.
pub fn cmd_sweep_snr(
    out: &mut dyn Write,
    sweep: &SnrSweep,
    config: &QuadratureConfig,
    format: OutputFormat,
) -> Result<(), CliError> {
    validate_grid(sweep.start, sweep.stop, sweep.steps)?;

    let mc_samples = sweep.samples.unwrap_or(FALLBACK_SAMPLES);
    let mut rows = Vec::new();
    for &snr_db in &grid(sweep.start, sweep.stop, sweep.steps) {
        let params = SystemParams::from_snr_db(snr_db, sweep.beta)
            .map_err(|e| CliError::usage(format!("--beta: {e}")))?;

        for (name, est) in [
            ("c1_oma", ergodic_c1_oma(&params)?),
            ("c2_oma", ergodic_c2_oma(&params)?),
            ("sum_oma", ergodic_sum_oma(&params)?),
        ] {
            rows.push(ResultRow::new(
                snr_db,
                name,
                METHOD_CLOSED,
                est.value,
                est.error_bound,
            ));
        }

        let endpoints: [(&str, _, AllocationPolicy, Quantity); 2] = [
            (
                "c1_noma_at_inf",
                ergodic_c1_noma_at_a_inf(&params, config),
                AllocationPolicy::AtInf,
                Quantity::C1Noma,
            ),
            (
                "c2_noma_at_sup",
                ergodic_c2_noma_at_a_sup(&params, config),
                AllocationPolicy::AtSup,
                Quantity::C2Noma,
            ),
        ];
        for (name, outcome, policy, quantity) in endpoints {
            match outcome {
                Ok(est) => {
                    rows.push(ResultRow::new(
                        snr_db,
                        name,
                        METHOD_QUAD,
                        est.value,
                        est.error_bound,
                    ));
                }
                Err(_) => {
                    let r = mc::estimate(&params, policy, quantity, mc_samples, sweep.seed);
                    rows.push(ResultRow::new(snr_db, name, METHOD_MC, r.mean, r.std_error));
                }
            }
        }

        if sweep.samples.is_some() {
            for (name, quantity) in [
                ("c1_oma", Quantity::C1Oma),
                ("c2_oma", Quantity::C2Oma),
                ("sum_oma", Quantity::SumOma),
            ] {
                let r = mc::estimate(
                    &params,
                    AllocationPolicy::Midpoint,
                    quantity,
                    mc_samples,
                    sweep.seed,
                );
                rows.push(ResultRow::new(snr_db, name, METHOD_MC, r.mean, r.std_error));
            }
            for &(arg, alpha) in &sweep.policies {
                let policy = arg.into_policy(alpha)?;
                let label = arg.label(alpha);
                for (stem, quantity) in [
                    ("c1_noma", Quantity::C1Noma),
                    ("c2_noma", Quantity::C2Noma),
                    ("sum_noma", Quantity::SumNoma),
                ] {
                    let r = mc::estimate(&params, policy, quantity, mc_samples, sweep.seed);
                    rows.push(ResultRow::new(
                        snr_db,
                        format!("{stem}_{label}"),
                        METHOD_MC,
                        r.mean,
                        r.std_error,
                    ));
                }
            }
        }
    }

    write_rows(out, &rows, format)?;
    Ok(())
}

pub struct AlphaSweep {
    pub start: f64,
    pub stop: f64,
    pub steps: u32,
    pub snr_db: f64,
    pub beta: f64,
    pub gains: Option<(f64, f64)>,
    pub samples: Option<u64>,
    pub seed: u64,
}

/// `sweep-alpha`: capacities across an allocation grid, either as Monte Carlo
/// expectations over the fading distribution (`--samples`) or exactly for one
/// fixed pair (`--gains`). Emits region-endpoint marker rows after the grid.
pub fn cmd_sweep_alpha(
    out: &mut dyn Write,
    sweep: &AlphaSweep,
    format: OutputFormat,
) -> Result<(), CliError> {
    validate_grid(sweep.start, sweep.stop, sweep.steps)?;
    if !(sweep.start > 0.0 && sweep.stop < 1.0) {
        return Err(CliError::usage(
            "--start/--stop: the allocation grid must lie inside (0, 1)",
        ));
    }
    let params = SystemParams::from_snr_db(sweep.snr_db, sweep.beta)
        .map_err(|e| CliError::usage(format!("--snr-db/--beta: {e}")))?;

    let mut rows = Vec::new();
    match (sweep.gains, sweep.samples) {
        (Some(_), Some(_)) => {
            return Err(CliError::usage(
                "--gains and --samples are mutually exclusive: sweep one fixed pair or a Monte Carlo expectation",
            ));
        }
        (None, None) => {
            return Err(CliError::usage(
                "sweep-alpha needs either --gains <g1,g2> (fixed pair) or --samples <n> (expectation)",
            ));
        }
        (Some(gains), None) => {
            let pair = ChannelPair::new(gains.0, gains.1)
                .map_err(|e| CliError::usage(format!("--gains: {e}")))?;
            for &alpha in &grid(sweep.start, sweep.stop, sweep.steps) {
                let a = PowerAllocation::new(alpha)
                    .map_err(|e| CliError::usage(format!("--start/--stop: {e}")))?;
                let (c1, c2) = noma_capacities(&params, &pair, a);
                rows.push(ResultRow::new(alpha, "c1_noma", METHOD_CLOSED, c1, 0.0));
                rows.push(ResultRow::new(alpha, "c2_noma", METHOD_CLOSED, c2, 0.0));
                rows.push(ResultRow::new(
                    alpha,
                    "sum_noma",
                    METHOD_CLOSED,
                    c1 + c2,
                    0.0,
                ));
            }
            let region = fair_region(&params, &pair)?;
            rows.push(ResultRow::new(
                region.a_inf(),
                "a_inf",
                METHOD_CLOSED,
                region.a_inf(),
                0.0,
            ));
            rows.push(ResultRow::new(
                region.a_sup(),
                "a_sup",
                METHOD_CLOSED,
                region.a_sup(),
                0.0,
            ));
        }
        (None, Some(samples)) => {
            for &alpha in &grid(sweep.start, sweep.stop, sweep.steps) {
                let a = PowerAllocation::new(alpha)
                    .map_err(|e| CliError::usage(format!("--start/--stop: {e}")))?;
                let policy = AllocationPolicy::Fixed(a);
                for (name, quantity) in [
                    ("c1_noma", Quantity::C1Noma),
                    ("c2_noma", Quantity::C2Noma),
                    ("sum_noma", Quantity::SumNoma),
                ] {
                    let r = mc::estimate(&params, policy, quantity, samples, sweep.seed);
                    rows.push(ResultRow::new(alpha, name, METHOD_MC, r.mean, r.std_error));
                }
            }
            let (lower, upper) = mc::region_bounds_means(&params, samples, sweep.seed);
            rows.push(ResultRow::new(
                lower.mean,
                "mean_a_inf",
                METHOD_MC,
                lower.mean,
                lower.std_error,
            ));
            rows.push(ResultRow::new(
                upper.mean,
                "mean_a_sup",
                METHOD_MC,
                upper.mean,
                upper.std_error,
            ));
        }
    }

    write_rows(out, &rows, format)?;
    Ok(())
}

fn validate_grid(start: f64, stop: f64, steps: u32) -> Result<(), CliError> {
    if !(start.is_finite() && stop.is_finite() && start < stop) {
        return Err(CliError::usage(format!(
            "--start must be below --stop (got {start} and {stop})"
        )));
    }
    if steps < 2 {
        return Err(CliError::usage(format!(
            "--steps must be at least 2 (got {steps})"
        )));
    }
    Ok(())
}
