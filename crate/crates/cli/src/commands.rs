use std::fs;
use std::path::Path;

use anyhow::Context;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use sharpcert::deficit::fd_battery;
use sharpcert::penrose::penrose_check;
use sharpcert::report::CsvRecord;
use sharpcert::schrod::{cm_certificate, lens_model_check, LensGrid};
use sharpcert::sphere::{emit_tables, gap_certificate, KSplit};
use sharpcert::wave::wave_audit;
use sharpcert::{CoeffTable, SphereParams, Verdict};

use crate::{Cli, Command, Format, RunOptions};

pub const SCHEMA: u32 = 1;
const LENS_MODES: u32 = 5;
const FD_MODELS: usize = 24;
const SEED: u64 = 20_240_601;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(anyhow::Error),
    Compute(sharpcert::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Io(_) => 3,
            // a computation that cannot finish leaves the verdict open
            CliError::Compute(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "invalid arguments: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e:#}"),
            CliError::Compute(e) => write!(f, "computation failed: {e}"),
        }
    }
}

impl From<sharpcert::Error> for CliError {
    fn from(e: sharpcert::Error) -> Self {
        match e {
            sharpcert::Error::Domain(m) | sharpcert::Error::Precondition(m) => CliError::Usage(m),
            other => CliError::Compute(other),
        }
    }
}

type Res<T> = std::result::Result<T, CliError>;

fn dims(o: &RunOptions, lo: u32, hi: u32) -> Res<Vec<u32>> {
    let (a, b) = match o.d {
        Some(d) => (d, d),
        None => (o.d_min.unwrap_or(lo), o.d_max.unwrap_or(hi)),
    };
    if a > b {
        return Err(CliError::Usage(format!("--d-min {a} exceeds --d-max {b}")));
    }
    Ok((a..=b).collect())
}

fn write(dir: &Path, name: &str, body: &str) -> Res<()> {
    fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .map_err(CliError::Io)?;
    let path = dir.join(name);
    fs::write(&path, body)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(CliError::Io)
}

fn write_json<T: Serialize>(dir: &Path, name: &str, v: &T) -> Res<()> {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    write(dir, name, &s)
}

fn csv<R: CsvRecord>(t: &CoeffTable<R>) -> String {
    t.to_csv()
}

pub fn run(cli: &Cli) -> Res<Verdict> {
    let o = &cli.opts;
    if !(o.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", o.tol)));
    }
    if !(o.r_max > 0.0) {
        return Err(CliError::Usage(format!("--r-max must be positive, got {}", o.r_max)));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(o.parallelism)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    pool.install(|| dispatch(cli.command, o))
}

fn dispatch(cmd: Command, o: &RunOptions) -> Res<Verdict> {
    match cmd {
        Command::SphereTables => sphere_tables(o),
        Command::SphereVerify => sphere_verify(o),
        Command::SchrodVerify => schrod_verify(o),
        Command::WaveAudit => wave(o),
        Command::PenroseCheck => penrose(o),
        Command::DeficitDemo => deficit(o),
        Command::All => {
            let mut v = Verdict::Pass;
            for c in [
                Command::SphereTables,
                Command::SphereVerify,
                Command::SchrodVerify,
                Command::WaveAudit,
                Command::PenroseCheck,
                Command::DeficitDemo,
            ] {
                v = v.combine(dispatch(c, o)?);
            }
            println!("all: {v}");
            Ok(v)
        }
    }
}

fn sphere_tables(o: &RunOptions) -> Res<Verdict> {
    let ds = dims(o, 2, 60)?;
    let t = emit_tables(ds[0], *ds.last().unwrap(), o.r_max, o.tol)?;
    match o.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            write(&o.output, "sphere_table1.csv", &csv(&t.table1))?;
            write(&o.output, "sphere_table2.csv", &csv(&t.table2))?;
        }
        Format::Json => write_json(
            &o.output,
            "sphere_tables.json",
            &json!({ "schema": SCHEMA, "command": "sphere-tables", "tables": t }),
        )?,
    }
    println!(
        "sphere-tables: d={}..={} rows={}+{}",
        ds[0],
        ds.last().unwrap(),
        t.table1.rows.len(),
        t.table2.rows.len()
    );
    Ok(Verdict::Pass)
}

fn sphere_verify(o: &RunOptions) -> Res<Verdict> {
    let ds = dims(o, 2, 60)?;
    let certs = ds
        .par_iter()
        .map(|&d| {
            let params = SphereParams::new(d)?;
            let split = KSplit::standard(d);
            let cert = gap_certificate(&params, split, o.r_max, o.tol, o.k_max)?;
            Ok((split, cert))
        })
        .collect::<sharpcert::Result<Vec<_>>>()?;
    let verdict = Verdict::all(certs.iter().map(|(_, c)| c.report.verdict));
    for (split, c) in &certs {
        let tag = if c.report.flags.is_empty() { "" } else { " (flagged)" };
        println!("sphere-verify d={} k_numeric={}: {}{tag}", c.d, split.k_numeric, c.report.verdict);
    }
    match o.format.unwrap_or(Format::Json) {
        Format::Json => {
            let entries: Vec<_> = certs
                .iter()
                .map(|(split, c)| {
                    json!({
                        "d": c.d,
                        "k_numeric": split.k_numeric,
                        "k_tail": split.k_tail,
                        "tail_cited": split.tail_cited,
                        "verdict": c.report.verdict,
                        "epsilon": c.report.epsilon,
                        "flags": c.report.flags,
                        "c0": c.c0,
                        "rows": c.rows,
                        "margins": c.report.margins,
                    })
                })
                .collect();
            write_json(
                &o.output,
                "sphere_verify.json",
                &json!({ "schema": SCHEMA, "command": "sphere-verify", "verdict": verdict, "certificates": entries }),
            )?;
        }
        Format::Csv => {
            let mut s = String::from("d,k_numeric,k_tail,tail_cited,verdict,epsilon\n");
            for (split, c) in &certs {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    c.d,
                    split.k_numeric,
                    split.k_tail,
                    split.tail_cited,
                    c.report.verdict,
                    c.report.epsilon.map(|e| e.to_string()).unwrap_or_default()
                ));
            }
            write(&o.output, "sphere_verify.csv", &s)?;
        }
    }
    Ok(verdict)
}

fn schrod_verify(o: &RunOptions) -> Res<Verdict> {
    let ds = dims(o, 1, 20)?;
    let lens_m = o.m_max.min(LENS_MODES);
    let results = ds
        .par_iter()
        .map(|&d| {
            let c = cm_certificate(d, o.m_max, o.tol)?;
            let lens = if lens_m >= 2 {
                Some(lens_model_check(d, lens_m, LensGrid::for_modes(lens_m), 1e-14)?)
            } else {
                None
            };
            Ok((c, lens))
        })
        .collect::<sharpcert::Result<Vec<_>>>()?;
    let verdict = Verdict::all(results.iter().flat_map(|(c, l)| {
        std::iter::once(c.verdict).chain(l.as_ref().map(|l| l.report.verdict))
    }));
    for (c, l) in &results {
        let lv = l.as_ref().map(|l| l.report.verdict.to_string()).unwrap_or_else(|| "skipped".into());
        println!(
            "schrod-verify d={} m_max={}: {} (min gap {:.6}), lens {lv}",
            c.d, c.m_max, c.verdict, c.min_gap
        );
    }
    match o.format.unwrap_or(Format::Json) {
        Format::Json => {
            let reports: Vec<_> = results
                .iter()
                .map(|(c, l)| {
                    json!({
                        "d": c.d,
                        "m_max": c.m_max,
                        "min_gap": c.min_gap,
                        "verdict": c.verdict,
                        "flags": c.report.flags,
                        "per_m": c.per_m,
                        "lens": l,
                    })
                })
                .collect();
            write_json(
                &o.output,
                "schrod_verify.json",
                &json!({ "schema": SCHEMA, "command": "schrod-verify", "verdict": verdict, "reports": reports }),
            )?;
        }
        Format::Csv => {
            let mut s = String::from("d,m,cm,method_spread\n");
            for (c, _) in &results {
                for e in &c.per_m {
                    s.push_str(&format!("{},{},{},{}\n", c.d, e.m, e.cm, e.method_spread));
                }
            }
            write(&o.output, "schrod_cm.csv", &s)?;
        }
    }
    Ok(verdict)
}

fn wave(o: &RunOptions) -> Res<Verdict> {
    let ds = dims(o, 3, 3)?;
    let audits = ds
        .par_iter()
        .map(|&d| wave_audit(d, o.ell_max, 1000, o.tol))
        .collect::<sharpcert::Result<Vec<_>>>()?;
    let verdict = Verdict::all(audits.iter().map(|a| a.report.verdict));
    for a in &audits {
        println!(
            "wave-audit d={}: {} rho={} C(1) direct={} closed={}",
            a.d, a.report.verdict, a.rho, a.discrepancy.c_sharp_h1, a.discrepancy.c_h_one
        );
    }
    match o.format.unwrap_or(Format::Json) {
        Format::Json => write_json(
            &o.output,
            "wave_audit.json",
            &json!({ "schema": SCHEMA, "command": "wave-audit", "verdict": verdict, "audits": audits }),
        )?,
        Format::Csv => {
            let rows: Vec<_> = audits.iter().flat_map(|a| a.modes.iter().cloned()).collect();
            write(&o.output, "wave_modes.csv", &csv(&CoeffTable::new("wave_modes", rows)))?;
        }
    }
    Ok(verdict)
}

fn penrose(o: &RunOptions) -> Res<Verdict> {
    let c = penrose_check(100, 1e-5, SEED)?;
    println!(
        "penrose-check: {} conformal={:e} omega0={:e}",
        c.report.verdict, c.conformal_max, c.omega0_max
    );
    write_json(
        &o.output,
        "penrose_check.json",
        &json!({ "schema": SCHEMA, "command": "penrose-check", "verdict": c.report.verdict, "check": c }),
    )?;
    Ok(c.report.verdict)
}

fn deficit(o: &RunOptions) -> Res<Verdict> {
    let b = fd_battery(FD_MODELS, 8, SEED)?;
    let verdict = if b.min_first_order >= 1.8 && b.min_second_order >= 1.8 && b.max_coupling_ratio <= 1e-12 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    println!(
        "deficit-demo: {verdict} models={} orders {:.3}/{:.3}",
        b.models, b.min_first_order, b.min_second_order
    );
    write_json(
        &o.output,
        "deficit_demo.json",
        &json!({ "schema": SCHEMA, "command": "deficit-demo", "verdict": verdict, "battery": b }),
    )?;
    Ok(verdict)
}
