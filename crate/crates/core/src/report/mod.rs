//! Result bundles: CSV tables, JSON fit summaries and SVG charts. Floats are
//! written in shortest round-trip form, so equal results give equal bytes.

pub mod svg;

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::exp1::{Experiment1Result, SimulatedAgent};
use crate::experiments::sweep::{ASummary, RatioSlope, SelectedRun, SweepCell, SweepResult};
use crate::model::GroomerSpec;
use crate::sim::SimLedger;
use crate::statfit::ccdf;
use svg::{Chart, Mark, Series};

pub const SWEEP_CSV: &str = "sweep.csv";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const RATIOS_CSV: &str = "ratios.csv";
pub const SELECTED_CSV: &str = "selected.csv";
pub const RATIO_SLOPES_CSV: &str = "ratio_slopes.csv";
pub const THRESHOLD_JSON: &str = "threshold_fit.json";
pub const EXP1_AGENTS_CSV: &str = "exp1_agents.csv";
pub const EXP1_CCDF_CSV: &str = "exp1_ccdf.csv";
pub const EXP1_JSON: &str = "exp1_fit.json";
pub const SIM_GROOMERS_CSV: &str = "sim_groomers.csv";
pub const SIM_STRENGTHS_CSV: &str = "sim_strengths.csv";

/// One row of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub a: f64,
    pub alpha_mean: f64,
    pub alpha_sd: f64,
    pub phi_mean: f64,
    pub phi_sd: f64,
}

impl From<&ASummary> for SummaryRow {
    fn from(s: &ASummary) -> Self {
        Self {
            a: s.a,
            alpha_mean: s.alpha_mean,
            alpha_sd: s.alpha_sd,
            phi_mean: s.phi_mean,
            phi_sd: s.phi_sd,
        }
    }
}

/// One row of `ratios.csv`: mean `H_k / H_{k+1}` at `a`, empty when undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub a: f64,
    pub k: usize,
    pub ratio: Option<f64>,
}

/// One row of `exp1_ccdf.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdfRow {
    pub source: String,
    pub d: f64,
    pub p: f64,
}

pub fn ratio_rows(summary: &[ASummary]) -> Vec<RatioRow> {
    summary
        .iter()
        .flat_map(|s| {
            s.ratio_means.iter().enumerate().map(|(k, r)| RatioRow {
                a: s.a,
                k: k + 1,
                ratio: *r,
            })
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_writer<W: Write>(out: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    Ok(w)
}

pub fn write_sweep_csv<W: Write>(out: W, cells: &[SweepCell]) -> Result<()> {
    let mut w = csv_writer(out, &["a", "alpha", "rep", "seed", "e", "phi"])?;
    for c in cells {
        w.write_record([
            c.a.to_string(),
            c.alpha.to_string(),
            c.rep.to_string(),
            c.seed.to_string(),
            c.e.to_string(),
            c.phi.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(out: W, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv_writer(out, &["a", "alpha_mean", "alpha_sd", "phi_mean", "phi_sd"])?;
    for r in rows {
        w.write_record([
            r.a.to_string(),
            r.alpha_mean.to_string(),
            r.alpha_sd.to_string(),
            r.phi_mean.to_string(),
            r.phi_sd.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ratios_csv<W: Write>(out: W, rows: &[RatioRow]) -> Result<()> {
    let mut w = csv_writer(out, &["a", "k", "ratio"])?;
    for r in rows {
        w.write_record([r.a.to_string(), r.k.to_string(), opt(r.ratio)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_selected_csv<W: Write>(out: W, runs: &[SelectedRun]) -> Result<()> {
    let mut w = csv_writer(out, &["a", "alpha", "mean_e", "seed", "phi"])?;
    for r in runs {
        w.write_record([
            r.a.to_string(),
            r.alpha.to_string(),
            r.mean_e.to_string(),
            r.seed.to_string(),
            r.phi.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ratio_slopes_csv<W: Write>(out: W, slopes: &[RatioSlope]) -> Result<()> {
    let mut w = csv_writer(out, &["k", "slope", "intercept", "se_slope", "p_slope", "n"])?;
    for s in slopes {
        let f = s.fit.as_ref();
        w.write_record([
            s.k.to_string(),
            opt(f.map(|f| f.slope)),
            opt(f.map(|f| f.intercept)),
            opt(f.map(|f| f.se_slope)),
            opt(f.map(|f| f.p_slope)),
            f.map(|f| f.n.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_exp1_agents_csv<W: Write>(out: W, agents: &[SimulatedAgent]) -> Result<()> {
    let mut w = csv_writer(out, &["id", "C", "N", "m", "N_sim", "m_sim"])?;
    for a in agents {
        w.write_record([
            a.id.clone(),
            a.cost.to_string(),
            a.ties.to_string(),
            a.mean_strength.to_string(),
            a.sim_ties.to_string(),
            a.sim_mean_strength.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ccdf_csv<W: Write>(out: W, rows: &[CcdfRow]) -> Result<()> {
    let mut w = csv_writer(out, &["source", "d", "p"])?;
    for r in rows {
        w.write_record([r.source.clone(), r.d.to_string(), r.p.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn ccdf_rows<'a>(source: &str, points: &'a [(f64, f64)]) -> impl Iterator<Item = CcdfRow> + 'a {
    let source = source.to_string();
    points.iter().map(move |&(d, p)| CcdfRow {
        source: source.clone(),
        d,
        p,
    })
}

fn read_table<R: Read, T: for<'de> Deserialize<'de>>(input: R, columns: &[&str]) -> Result<Vec<T>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    for need in columns {
        if !headers.iter().any(|h| h == *need) {
            return Err(Error::Schema(format!(
                "missing column `{need}` (expected {})",
                columns.join(",")
            )));
        }
    }
    reader
        .deserialize()
        .map(|row| {
            row.map_err(|e: csv::Error| Error::InvalidRow {
                line: e.position().map_or(0, |p| p.line()),
                reason: e.to_string(),
            })
        })
        .collect()
}

pub fn read_summary_csv<R: Read>(input: R) -> Result<Vec<SummaryRow>> {
    read_table(input, &["a", "alpha_mean", "alpha_sd", "phi_mean", "phi_sd"])
}

pub fn read_ratios_csv<R: Read>(input: R) -> Result<Vec<RatioRow>> {
    read_table(input, &["a", "k", "ratio"])
}

pub fn read_ccdf_csv<R: Read>(input: R) -> Result<Vec<CcdfRow>> {
    read_table(input, &["source", "d", "p"])
}

pub fn read_exp1_agents_csv<R: Read>(input: R) -> Result<Vec<SimulatedAgent>> {
    #[derive(Deserialize)]
    struct Row {
        id: String,
        #[serde(rename = "C")]
        cost: f64,
        #[serde(rename = "N")]
        ties: u32,
        m: f64,
        #[serde(rename = "N_sim")]
        sim_ties: f64,
        m_sim: f64,
    }
    let rows: Vec<Row> = read_table(input, &["id", "C", "N", "m", "N_sim", "m_sim"])?;
    Ok(rows
        .into_iter()
        .map(|r| SimulatedAgent {
            id: r.id,
            cost: r.cost,
            ties: r.ties,
            mean_strength: r.m,
            sim_ties: r.sim_ties,
            sim_mean_strength: r.m_sim,
        })
        .collect())
}

pub fn phi_chart(rows: &[SummaryRow]) -> Chart {
    Chart::new("power-law exponent by a", "a", "phi").push(
        Series::new(
            "phi",
            rows.iter().map(|r| (r.a, r.phi_mean)).collect(),
            Mark::LinePoints,
        )
        .with_errors(rows.iter().map(|r| r.phi_sd).collect()),
    )
}

pub fn alpha_chart(rows: &[SummaryRow]) -> Chart {
    Chart::new("selected alpha by a", "a", "alpha").push(
        Series::new(
            "alpha",
            rows.iter().map(|r| (r.a, r.alpha_mean)).collect(),
            Mark::LinePoints,
        )
        .with_errors(rows.iter().map(|r| r.alpha_sd).collect()),
    )
}

pub fn ratio_chart(rows: &[RatioRow]) -> Chart {
    let mut ks: Vec<usize> = rows.iter().map(|r| r.k).collect();
    ks.sort_unstable();
    ks.dedup();
    ks.into_iter()
        .fold(Chart::new("hierarchy ratios by a", "a", "H_k / H_k+1"), |chart, k| {
            let pts = rows
                .iter()
                .filter(|r| r.k == k)
                .filter_map(|r| r.ratio.map(|v| (r.a, v)))
                .collect();
            chart.push(Series::new(format!("k = {k}"), pts, Mark::Line))
        })
}

pub fn scatter_chart(agents: &[SimulatedAgent]) -> Chart {
    let (data, sim): (Vec<_>, Vec<_>) = agents.iter().filter_map(SimulatedAgent::normalized).unzip();
    let swap = |v: Vec<(f64, f64)>| v.into_iter().map(|(n, m)| (m, n)).collect();
    Chart::new("ties against strength", "log m / log C", "log N / log C")
        .push(Series::new("data", swap(data), Mark::Points))
        .push(Series::new("simulation", swap(sim), Mark::Points))
}

pub fn ccdf_chart(rows: &[CcdfRow]) -> Chart {
    let mut sources: Vec<&str> = Vec::new();
    for r in rows {
        if !sources.contains(&r.source.as_str()) {
            sources.push(&r.source);
        }
    }
    sources.into_iter().fold(
        Chart::new("strength distribution", "d", "P(X >= d)").log_log(),
        |chart, src| {
            let pts = rows.iter().filter(|r| r.source == src).map(|r| (r.d, r.p)).collect();
            chart.push(Series::new(src, pts, Mark::Line))
        },
    )
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("cannot create output directory {}: {e}", dir.display()),
        ))
    })
}

/// Collects written paths; writes go through a buffer and land in one call.
struct Bundle<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl<'a> Bundle<'a> {
    fn new(dir: &'a Path) -> Result<Self> {
        create_dir(dir)?;
        Ok(Self {
            dir,
            written: Vec::new(),
        })
    }

    fn put(&mut self, name: &str, fill: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        fill(&mut buf)?;
        let path = self.dir.join(name);
        fs::write(&path, buf)
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
        self.written.push(path);
        Ok(())
    }

    fn chart(&mut self, name: &str, chart: &Chart) -> Result<()> {
        self.put(name, |b| {
            b.extend_from_slice(chart.render().as_bytes());
            Ok(())
        })
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.put(name, |b| {
            serde_json::to_writer_pretty(&mut *b, value)?;
            b.push(b'\n');
            Ok(())
        })
    }
}

pub fn write_exp2_bundle(dir: &Path, res: &SweepResult) -> Result<Vec<PathBuf>> {
    let summary: Vec<SummaryRow> = res.summary.iter().map(SummaryRow::from).collect();
    let ratios = ratio_rows(&res.summary);
    let mut b = Bundle::new(dir)?;
    b.put(SWEEP_CSV, |w| write_sweep_csv(w, &res.cells))?;
    b.put(SUMMARY_CSV, |w| write_summary_csv(w, &summary))?;
    b.put(RATIOS_CSV, |w| write_ratios_csv(w, &ratios))?;
    b.put(SELECTED_CSV, |w| write_selected_csv(w, &res.selected))?;
    b.put(RATIO_SLOPES_CSV, |w| write_ratio_slopes_csv(w, &res.ratio_slopes))?;
    b.json(THRESHOLD_JSON, &res.threshold)?;
    render_exp2_charts(&mut b, &summary, &ratios)?;
    Ok(b.written)
}

fn render_exp2_charts(b: &mut Bundle, summary: &[SummaryRow], ratios: &[RatioRow]) -> Result<()> {
    b.chart("phi_vs_a.svg", &phi_chart(summary))?;
    b.chart("alpha_vs_a.svg", &alpha_chart(summary))?;
    b.chart("ratios.svg", &ratio_chart(ratios))
}

/// `exp1_fit.json`: everything but the per-agent table and the CCDFs.
#[derive(Serialize)]
struct Exp1Fit<'a> {
    a: f64,
    b: f64,
    horizon: u32,
    groomers: usize,
    master_seed: u64,
    calibration_cost: f64,
    alpha: f64,
    error: f64,
    flat: bool,
    evaluations: &'a [(f64, f64)],
    population_seed: u64,
    agents: usize,
    excluded: usize,
    sim_phi: Option<f64>,
    data_phi: Option<f64>,
    budget_r: Option<f64>,
    budget_p: Option<f64>,
    budget_n: Option<usize>,
}

pub fn write_exp1_bundle(dir: &Path, res: &Experiment1Result) -> Result<Vec<PathBuf>> {
    let ccdfs: Vec<CcdfRow> = ccdf_rows("simulation", &res.sim_ccdf)
        .chain(ccdf_rows("data", &res.data_ccdf))
        .collect();
    let fit = Exp1Fit {
        a: res.config.a,
        b: res.config.b,
        horizon: res.config.horizon,
        groomers: res.config.groomers,
        master_seed: res.config.master_seed,
        calibration_cost: res.calibration_cost,
        alpha: res.optimum.alpha,
        error: res.optimum.error,
        flat: res.optimum.flat,
        evaluations: &res.optimum.evaluations,
        population_seed: res.population_seed,
        agents: res.agents.len(),
        excluded: res.excluded,
        sim_phi: res.sim_powerlaw.as_ref().map(|f| f.phi),
        data_phi: res.data_powerlaw.as_ref().map(|f| f.phi),
        budget_r: res.budget.map(|c| c.r),
        budget_p: res.budget.map(|c| c.p),
        budget_n: res.budget.map(|c| c.n),
    };
    let mut b = Bundle::new(dir)?;
    b.put(EXP1_AGENTS_CSV, |w| write_exp1_agents_csv(w, &res.agents))?;
    b.put(EXP1_CCDF_CSV, |w| write_ccdf_csv(w, &ccdfs))?;
    b.json(EXP1_JSON, &fit)?;
    b.chart("exp1_scatter.svg", &scatter_chart(&res.agents))?;
    b.chart("exp1_ccdf.svg", &ccdf_chart(&ccdfs))?;
    Ok(b.written)
}

pub fn write_simulation_bundle(dir: &Path, specs: &[GroomerSpec], ledger: &SimLedger) -> Result<Vec<PathBuf>> {
    let mut b = Bundle::new(dir)?;
    b.put(SIM_GROOMERS_CSV, |out| {
        let mut w = csv_writer(out, &["id", "C", "N_target", "m_target", "N", "m"])?;
        for (s, g) in specs.iter().zip(&ledger.groomers) {
            let (n, m) = g.realized();
            w.write_record([
                s.id.to_string(),
                s.cost.to_string(),
                s.target_ties.to_string(),
                s.target_mean.to_string(),
                n.to_string(),
                m.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    })?;
    b.put(SIM_STRENGTHS_CSV, |out| {
        let mut w = csv_writer(out, &["groomer", "d"])?;
        for (s, g) in specs.iter().zip(&ledger.groomers) {
            for d in &g.strengths {
                w.write_record([s.id.to_string(), d.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    })?;
    let rows: Vec<CcdfRow> = ccdf_rows("simulation", &ccdf(&ledger.pooled_strengths())).collect();
    b.chart("sim_ccdf.svg", &ccdf_chart(&rows))?;
    Ok(b.written)
}

/// Re-renders charts from the tables found in `input`; returns the SVGs written.
pub fn rerender(input: &Path, out: &Path) -> Result<Vec<PathBuf>> {
    let open = |name: &str| -> Result<Option<fs::File>> {
        let path = input.join(name);
        match fs::File::open(&path) {
            Ok(f) => Ok(Some(f)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    };
    let mut b = Bundle::new(out)?;
    let mut found = false;
    if let (Some(s), Some(r)) = (open(SUMMARY_CSV)?, open(RATIOS_CSV)?) {
        render_exp2_charts(&mut b, &read_summary_csv(s)?, &read_ratios_csv(r)?)?;
        found = true;
    }
    if let Some(f) = open(EXP1_AGENTS_CSV)? {
        b.chart("exp1_scatter.svg", &scatter_chart(&read_exp1_agents_csv(f)?))?;
        found = true;
    }
    if let Some(f) = open(EXP1_CCDF_CSV)? {
        b.chart("exp1_ccdf.svg", &ccdf_chart(&read_ccdf_csv(f)?))?;
        found = true;
    }
    if !found {
        return Err(Error::InsufficientData(format!(
            "no result tables in {} ({SUMMARY_CSV}+{RATIOS_CSV}, {EXP1_AGENTS_CSV} or {EXP1_CCDF_CSV})",
            input.display()
        )));
    }
    Ok(b.written)
}
