use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use chrono::{Datelike, NaiveDate, Weekday};
use log::info;
use mfdfa::synth::{gen_binomial_cascade, gen_gaussian_noise, CascadeSpec, NoiseSpec};
use mfdfa::{
    analyze_series, day_resolve, day_resolve_stride5, difference_trace, evolve_spectra,
    log_returns, parse_prices, plan_windows, shuffle_test_series, DayLabel, DayResolvedReturns,
    MfdfaError, SpectrumTrace,
};
use sha2::{Digest, Sha256};

use crate::args::{RunArgs, SynthArgs};
use crate::report::{Cell, InputInfo, Report, Table};
use crate::CliError;

struct Ingested {
    info: InputInfo,
    resolved: DayResolvedReturns,
}

fn read_input(path: &Path) -> Result<Vec<u8>, CliError> {
    let mut bytes = Vec::new();
    if path.as_os_str() == "-" {
        io::stdin()
            .read_to_end(&mut bytes)
            .map_err(|e| CliError::Ingestion(format!("stdin: {e}")))?;
    } else {
        bytes = fs::read(path).map_err(|e| CliError::Ingestion(format!("{}: {e}", path.display())))?;
    }
    Ok(bytes)
}

fn ingest(args: &RunArgs) -> Result<Ingested, CliError> {
    let bytes = read_input(&args.input)?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|e| CliError::Ingestion(e.to_string()))?;
    let market = args.market.clone().unwrap_or_else(|| {
        args.input
            .file_stem()
            .and_then(|s| s.to_str())
            .filter(|s| *s != "-")
            .unwrap_or("stdin")
            .to_string()
    });
    let parsed = parse_prices(&text, args.config.column.into(), &market).map_err(CliError::ingestion)?;
    let returns = log_returns(&parsed.series).map_err(CliError::ingestion)?;
    let resolved = if args.config.stride5 {
        day_resolve_stride5(&returns)
    } else {
        day_resolve(&returns)
    };
    info!(
        "{market}: {} prices, {} dropped, {} returns",
        parsed.series.len(),
        parsed.dropped_rows,
        returns.len()
    );
    Ok(Ingested {
        info: InputInfo {
            path: args.input.display().to_string(),
            sha256,
            market,
            prices: parsed.series.len(),
            dropped_rows: parsed.dropped_rows,
            weekend_excluded: resolved.weekend_excluded,
        },
        resolved,
    })
}

fn selected_days(args: &RunArgs, default: &[DayLabel]) -> Vec<DayLabel> {
    if args.days.is_empty() {
        default.to_vec()
    } else {
        let mut days: Vec<DayLabel> = args.days.iter().map(|&d| d.into()).collect();
        days.sort();
        days.dedup();
        days
    }
}

const ALL_ROWS: [DayLabel; 6] = [
    DayLabel::Monday,
    DayLabel::Tuesday,
    DayLabel::Wednesday,
    DayLabel::Thursday,
    DayLabel::Friday,
    DayLabel::All,
];

fn write_output(args_output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match args_output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display()))),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Output(e.to_string())),
    }
}

/// Writes the report, then fails if every row errored.
fn finish(args: &RunArgs, report: &Report, first_error: Option<MfdfaError>, any_ok: bool) -> Result<(), CliError> {
    write_output(args.output.as_deref(), &report.render(args.format))?;
    match first_error {
        Some(e) if !any_ok => Err(CliError::Analysis(e.to_string())),
        _ => Ok(()),
    }
}

pub fn analyze(args: &RunArgs) -> Result<(), CliError> {
    let ingested = ingest(args)?;
    let settings = args.config.analysis_settings();
    let mut report = Report::new("analyze", ingested.info, &args.config);
    let mut params = Table::new(
        "params",
        &[
            "day", "n", "alpha0", "width", "skew", "alpha_min", "alpha_max", "h2", "degenerate", "status",
        ],
    );
    let mut spectra = Table::new("spectra", &["day", "q", "h", "alpha", "f_alpha"]);
    let (mut first_error, mut any_ok) = (None, false);

    for day in selected_days(args, &ALL_ROWS) {
        let series = &ingested.resolved.get(day).returns;
        match analyze_series(series, &settings) {
            Ok(a) => {
                any_ok = true;
                let p = a.params;
                params.push(vec![
                    day.as_str().into(),
                    series.len().into(),
                    p.alpha0.into(),
                    p.width.into(),
                    p.skew.into(),
                    p.alpha_min.into(),
                    p.alpha_max.into(),
                    a.hurst.at(2.0).into(),
                    p.degenerate.into(),
                    "ok".into(),
                ]);
                for (i, &q) in a.spectrum.source_q.iter().enumerate() {
                    let h = a.hurst.at(q);
                    spectra.push(vec![
                        day.as_str().into(),
                        q.into(),
                        h.into(),
                        a.spectrum.alpha[i].into(),
                        a.spectrum.f_alpha[i].into(),
                    ]);
                }
            }
            Err(e) => {
                let mut row = vec![day.as_str().into(), series.len().into()];
                row.extend(std::iter::repeat_n(Cell::Empty, 7));
                row.push(format!("error: {e}").into());
                params.push(row);
                first_error.get_or_insert(e);
            }
        }
    }
    report.tables.push(params);
    if args.spectra {
        report.tables.push(spectra);
    }
    finish(args, &report, first_error, any_ok)
}

pub fn shuffle_test(args: &RunArgs) -> Result<(), CliError> {
    let ingested = ingest(args)?;
    let settings = args.config.analysis_settings();
    let shuffle = args.config.shuffle_settings();
    if shuffle.repetitions == 0 {
        return Err(CliError::Config("--repetitions must be positive".into()));
    }
    let mut report = Report::new("shuffle-test", ingested.info, &args.config);
    let mut table = Table::new(
        "shuffle",
        &[
            "day",
            "n",
            "alpha0",
            "width",
            "shuffled_alpha0_mean",
            "shuffled_alpha0_std",
            "shuffled_width_mean",
            "shuffled_width_std",
            "shuffled_skew_mean",
            "shuffled_skew_std",
            "delta_alpha0",
            "delta_width",
            "repetitions",
            "transpositions",
            "failures",
            "status",
        ],
    );
    let (mut first_error, mut any_ok) = (None, false);
    for day in selected_days(args, &DayLabel::WEEKDAYS) {
        let series = &ingested.resolved.get(day).returns;
        match shuffle_test_series(day, series, &settings, &shuffle) {
            Ok(r) => {
                any_ok = true;
                table.push(vec![
                    day.as_str().into(),
                    series.len().into(),
                    r.original.alpha0.into(),
                    r.original.width.into(),
                    r.mean_params.alpha0.into(),
                    r.std_params.alpha0.into(),
                    r.mean_params.width.into(),
                    r.std_params.width.into(),
                    r.mean_params.skew.into(),
                    r.std_params.skew.into(),
                    r.delta_alpha0.into(),
                    r.delta_width.into(),
                    r.n_repetitions.into(),
                    (r.transpositions_per_rep as usize).into(),
                    r.failures.into(),
                    "ok".into(),
                ]);
            }
            Err(e) => {
                let mut row = vec![day.as_str().into(), series.len().into()];
                row.extend(std::iter::repeat_n(Cell::Empty, 13));
                row.push(format!("error: {e}").into());
                table.push(row);
                first_error.get_or_insert(e);
            }
        }
    }
    report.tables.push(table);
    finish(args, &report, first_error, any_ok)
}

pub fn evolve(args: &RunArgs) -> Result<(), CliError> {
    let ingested = ingest(args)?;
    let settings = args.config.analysis_settings();
    let baseline: DayLabel = args.baseline.into();
    let mut days = selected_days(args, &DayLabel::WEEKDAYS);
    if !days.contains(&baseline) {
        days.insert(0, baseline);
    }

    let mut traces: Vec<(DayLabel, SpectrumTrace)> = Vec::new();
    for &day in &days {
        let series = ingested.resolved.get(day);
        let plan = plan_windows(series.len(), args.config.window, args.config.step)
            .map_err(|e| CliError::Analysis(format!("{day}: {e}")))?;
        let trace = evolve_spectra(series, &plan, &settings, args.spectra)
            .map_err(|e| CliError::Analysis(format!("{day}: {e}")))?;
        info!("{day}: {} windows, {} failed", plan.count, trace.failures());
        traces.push((day, trace));
    }

    let mut report = Report::new("evolve", ingested.info, &args.config);
    let mut trace_table = Table::new(
        "traces",
        &["window_index", "window_end_date", "day", "alpha0", "width", "skew", "status"],
    );
    let mut spectra = Table::new("spectra", &["window_index", "window_end_date", "day", "q", "alpha", "f_alpha"]);
    for (day, trace) in &traces {
        for (t, date) in trace.window_times.iter().enumerate() {
            let mut row: Vec<Cell> = vec![t.into(), date.to_string().into(), day.as_str().into()];
            match (&trace.params[t], &trace.errors[t]) {
                (Some(p), _) => {
                    row.extend([p.alpha0.into(), p.width.into(), p.skew.into(), "ok".into()]);
                }
                (None, e) => {
                    let msg = e.as_ref().map_or("error".to_string(), |e| format!("error: {e}"));
                    row.extend([Cell::Empty, Cell::Empty, Cell::Empty, msg.into()]);
                }
            }
            trace_table.push(row);
            if let Some(Some(s)) = trace.spectra.as_ref().map(|v| &v[t]) {
                for i in 0..s.len() {
                    spectra.push(vec![
                        t.into(),
                        date.to_string().into(),
                        day.as_str().into(),
                        s.source_q[i].into(),
                        s.alpha[i].into(),
                        s.f_alpha[i].into(),
                    ]);
                }
            }
        }
    }
    let mut diff_table = Table::new(
        "differences",
        &["window_index", "window_end_date", "baseline_day", "other_day", "delta_alpha0", "delta_width"],
    );
    let base_trace = &traces.iter().find(|(d, _)| *d == baseline).expect("baseline traced").1;
    for (day, trace) in traces.iter().filter(|(d, _)| *d != baseline) {
        match difference_trace(baseline, base_trace, *day, trace) {
            Ok(d) => {
                for k in 0..d.window_index.len() {
                    diff_table.push(vec![
                        d.window_index[k].into(),
                        d.window_times[k].to_string().into(),
                        baseline.as_str().into(),
                        day.as_str().into(),
                        d.delta_alpha0[k].into(),
                        d.delta_width[k].into(),
                    ]);
                }
            }
            Err(e) => log::warn!("{baseline} vs {day}: {e}"),
        }
    }
    report.tables.push(trace_table);
    report.tables.push(diff_table);
    if args.spectra {
        report.tables.push(spectra);
    }
    write_output(args.output.as_deref(), &report.render(args.format))
}

/// `key=value` pairs, case-insensitive keys.
fn parse_pairs(items: &[String]) -> Result<Vec<(String, String)>, CliError> {
    items
        .iter()
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.split_once('=')
                .map(|(k, v)| (k.trim().to_ascii_lowercase(), v.trim().to_string()))
                .ok_or_else(|| CliError::Config(format!("expected key=value, got {s:?}")))
        })
        .collect()
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("bad value for {key}: {value:?}")))
}

/// Weekday dates starting at `start`, skipping weekends.
fn weekday_dates(start: NaiveDate, count: usize) -> Vec<NaiveDate> {
    let mut dates = Vec::with_capacity(count);
    let mut day = start;
    while dates.len() < count {
        if !matches!(day.weekday(), Weekday::Sat | Weekday::Sun) {
            dates.push(day);
        }
        day = day.succ_opt().expect("date in range");
    }
    dates
}

/// Price file whose log returns reproduce `returns` on consecutive weekdays
/// from `start`; the anchor close of 100 sits on the preceding weekday.
pub fn synthetic_price_csv(returns: &[f64], start: NaiveDate) -> String {
    let mut anchor = start.pred_opt().expect("date in range");
    while matches!(anchor.weekday(), Weekday::Sat | Weekday::Sun) {
        anchor = anchor.pred_opt().expect("date in range");
    }
    let mut out = String::from("Date,Close\n");
    let mut close = 100.0f64;
    out.push_str(&format!("{anchor},{close}\n"));
    for (date, r) in weekday_dates(start, returns.len()).into_iter().zip(returns) {
        close *= r.exp();
        out.push_str(&format!("{date},{close}\n"));
    }
    out
}

/// Noise returns are scaled to a daily-return magnitude so the cumulative
/// price path stays within floating-point range.
const NOISE_RETURN_SCALE: f64 = 0.01;

pub fn synth(args: &SynthArgs) -> Result<(), CliError> {
    let start = NaiveDate::parse_from_str(&args.start, "%Y-%m-%d")
        .map_err(|_| CliError::Config(format!("bad --start date {:?}", args.start)))?;
    if matches!(start.weekday(), Weekday::Sat | Weekday::Sun) {
        return Err(CliError::Config("--start must be a weekday".into()));
    }
    let returns = if let Some(items) = &args.cascade {
        let (mut a, mut k, mut seed) = (None, None, args.seed);
        for (key, value) in parse_pairs(items)? {
            match key.as_str() {
                "a" => a = Some(parse_value(&key, &value)?),
                "k" => k = Some(parse_value(&key, &value)?),
                "seed" => seed = parse_value(&key, &value)?,
                _ => return Err(CliError::Config(format!("unknown cascade key {key:?}"))),
            }
        }
        let spec = CascadeSpec {
            multiplier: a.ok_or_else(|| CliError::Config("cascade needs a=".into()))?,
            levels: k.ok_or_else(|| CliError::Config("cascade needs k=".into()))?,
            seed,
        };
        gen_binomial_cascade(&spec).map_err(|e| CliError::Config(e.to_string()))?
    } else {
        let items = args.noise.as_deref().unwrap_or_default();
        let (mut h, mut n, mut seed) = (0.5, None, args.seed);
        for (key, value) in parse_pairs(items)? {
            match key.as_str() {
                "h" => h = parse_value(&key, &value)?,
                "n" => n = Some(parse_value(&key, &value)?),
                "seed" => seed = parse_value(&key, &value)?,
                _ => return Err(CliError::Config(format!("unknown noise key {key:?}"))),
            }
        }
        let spec = NoiseSpec {
            len: n.ok_or_else(|| CliError::Config("noise needs N=".into()))?,
            hurst: h,
            seed,
        };
        let x = gen_gaussian_noise(&spec).map_err(|e| match e {
            MfdfaError::InvalidSpec(m) => CliError::Config(m),
            other => CliError::Analysis(other.to_string()),
        })?;
        x.into_iter().map(|v| v * NOISE_RETURN_SCALE).collect()
    };
    write_output(args.output.as_deref(), &synthetic_price_csv(&returns, start))
}
