use delc_core::atomic::{
    analytic_resonances, channel_capacity, channel_markers, criteria_profile, find_peaks, match_channels, spectrum,
    DressingCase,
};
use delc_core::criteria::{classify_tri_region, Criterion};
use delc_core::sweep::sweep_criteria;
use delc_core::validation::run_checks;
use delc_core::{Error as CoreError, System};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::output::{num, open, with_suffix, write_csv, write_json};

#[derive(Serialize)]
struct RegionRow {
    #[serde(rename = "G1")]
    g1: f64,
    #[serde(rename = "G2")]
    g2: f64,
    #[serde(rename = "G3", skip_serializing_if = "Option::is_none")]
    g3: Option<f64>,
    criterion: Criterion,
    value: f64,
    entangled: bool,
    region: Option<&'static str>,
}

pub fn region_scan(cfg: &RunConfig) -> Result<(), CliError> {
    let grid = cfg.gain_grid()?;
    let criteria = cfg.criteria()?;
    let rows = sweep_criteria(&grid, &criteria, true)?;
    let rows: Vec<RegionRow> = rows
        .into_iter()
        .map(|r| RegionRow {
            g1: r.gains.g1(),
            g2: r.gains.g2(),
            g3: r.gains.g3(),
            region: (grid.system == System::Tri).then(|| classify_tri_region(&r.gains).label()),
            criterion: r.criterion,
            value: r.value,
            entangled: r.entangled,
        })
        .collect();
    let w = open(cfg.out.as_deref())?;
    match cfg.format_or(Format::Csv) {
        Format::Json => write_json(w, &rows),
        Format::Csv => {
            let header: &[&str] = match grid.system {
                System::Tri => &["G1", "G2", "criterion", "value", "entangled", "region"],
                System::Quad => &["G1", "G2", "G3", "criterion", "value", "entangled", "region"],
            };
            write_csv(
                w,
                header,
                rows.iter().map(|r| {
                    let mut v = vec![num(r.g1), num(r.g2)];
                    v.extend(r.g3.map(num));
                    v.extend([
                        r.criterion.label(),
                        num(r.value),
                        r.entangled.to_string(),
                        r.region.unwrap_or("").to_string(),
                    ]);
                    v
                }),
            )
        }
    }
}

#[derive(Serialize)]
struct SpectrumRow {
    delta1: f64,
    abs_rho_normalized: f64,
    abs_rho_raw: f64,
    real: f64,
    imag: f64,
}

pub fn spectrum_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let p = cfg.atomic()?;
    let grid = cfg.delta1_axis()?;
    let cases = cfg.cases()?;
    if cases.len() > 1 && cfg.out.is_none() && cfg.format_or(Format::Csv) == Format::Csv {
        return Err(CliError::Config(
            "several cases in CSV format need --out (used as a file name prefix)".into(),
        ));
    }
    let mut json = serde_json::Map::new();
    for case in &cases {
        let peaks = find_peaks(*case, &p, &grid)?;
        eprintln!(
            "{case}: {} peaks at δ1 = [{}]",
            peaks.len(),
            peaks.iter().map(|pk| format!("{:.3}", pk.delta1)).collect::<Vec<_>>().join(", ")
        );
        let rows: Vec<SpectrumRow> = spectrum(*case, &p, &grid)?
            .into_iter()
            .map(|s| SpectrumRow {
                delta1: s.delta1,
                abs_rho_normalized: s.normalized,
                abs_rho_raw: s.abs,
                real: s.value.re,
                imag: s.value.im,
            })
            .collect();
        match cfg.format_or(Format::Csv) {
            Format::Json => {
                json.insert(case.label().to_string(), serde_json::to_value(&rows).expect("rows serialize"));
            }
            Format::Csv => {
                let path = match (&cfg.out, cases.len()) {
                    (Some(out), n) if n > 1 => Some(with_suffix(out, case.label(), "csv")),
                    (out, _) => out.clone(),
                };
                write_csv(
                    open(path.as_deref())?,
                    &["delta1", "abs_rho_normalized", "abs_rho_raw", "real", "imag"],
                    rows.iter().map(|r| {
                        [r.delta1, r.abs_rho_normalized, r.abs_rho_raw, r.real, r.imag].map(num)
                    }),
                )?;
            }
        }
    }
    if cfg.format_or(Format::Csv) == Format::Json {
        write_json(open(cfg.out.as_deref())?, &json)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ChannelEntry {
    channel: String,
    delta1: f64,
    delta2: f64,
    delta2p: f64,
    delta3: f64,
    numeric_delta1: Option<f64>,
    numeric_height: Option<f64>,
    difference: Option<f64>,
}

#[derive(Serialize)]
struct ChannelReport {
    case: DressingCase,
    channels: Vec<ChannelEntry>,
    peak_count: usize,
    numeric_peaks: Vec<f64>,
    capacity: Option<u64>,
    warnings: Vec<String>,
}

pub fn channels(cfg: &RunConfig) -> Result<(), CliError> {
    let p = cfg.atomic()?;
    let grid = cfg.delta1_axis()?;
    let mut reports = Vec::new();
    for case in cfg.cases()? {
        let peaks = find_peaks(case, &p, &grid)?;
        let mut warnings = Vec::new();
        let analytic = match analytic_resonances(case, &p) {
            Ok(a) => a,
            Err(CoreError::NoRealResonance { discriminant }) => {
                warnings.push(format!("no real resonance: discriminant {discriminant} < 0"));
                Vec::new()
            }
            Err(e) => return Err(e.into()),
        };
        let channels: Vec<ChannelEntry> = match_channels(&analytic, &peaks)
            .into_iter()
            .map(|m| ChannelEntry {
                channel: m.channel.label(),
                delta1: m.channel.delta1,
                delta2: m.channel.delta2,
                delta2p: m.channel.delta2p,
                delta3: m.channel.delta3,
                numeric_delta1: m.peak.map(|pk| pk.delta1),
                numeric_height: m.peak.map(|pk| pk.height),
                difference: m.difference,
            })
            .collect();
        if !analytic.is_empty() && analytic.len() != peaks.len() {
            warnings.push(format!(
                "{} analytic channels but {} numeric peaks",
                analytic.len(),
                peaks.len()
            ));
        }
        let n = u32::try_from(channels.len()).unwrap_or(u32::MAX);
        reports.push(ChannelReport {
            case,
            capacity: channel_capacity(n).ok(),
            peak_count: peaks.len(),
            numeric_peaks: peaks.iter().map(|pk| pk.delta1).collect(),
            channels,
            warnings,
        });
    }
    let w = open(cfg.out.as_deref())?;
    match cfg.format_or(Format::Json) {
        Format::Json => write_json(w, &reports),
        Format::Csv => {
            let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
            let rows = reports.iter().flat_map(|r| {
                r.channels.iter().map(move |c| {
                    vec![
                        r.case.label().to_string(),
                        c.channel.clone(),
                        num(c.delta1),
                        num(c.delta2),
                        num(c.delta2p),
                        num(c.delta3),
                        opt(c.numeric_delta1),
                        opt(c.difference),
                        r.capacity.map(|x| x.to_string()).unwrap_or_default(),
                    ]
                })
            });
            write_csv(
                w,
                &[
                    "case",
                    "channel",
                    "delta1",
                    "delta2",
                    "delta2p",
                    "delta3",
                    "numeric_delta1",
                    "difference",
                    "capacity",
                ],
                rows,
            )
        }
    }
}

#[derive(Serialize)]
struct ProfileJson<'a> {
    rows: Vec<ProfileJsonRow>,
    markers: &'a [delc_core::atomic::ChannelMarker<f64>],
}

#[derive(Serialize)]
struct ProfileJsonRow {
    delta1: f64,
    #[serde(rename = "G1")]
    g1: f64,
    criterion: Criterion,
    value: f64,
    entangled: bool,
}

pub fn profile(cfg: &RunConfig) -> Result<(), CliError> {
    let p = cfg.atomic()?;
    let grid = cfg.delta1_axis()?;
    let cases = cfg.cases()?;
    if cases.len() != 1 {
        return Err(CliError::Config("profile takes exactly one dressing case".into()));
    }
    let case = cases[0];
    let criteria = cfg.criteria()?;
    let rows = criteria_profile(cfg.system, case, &p, &grid, &cfg.mapping, &cfg.fixed_gains, &criteria, true)?;
    let markers = channel_markers(case, &p, &grid, &cfg.mapping)?;
    let w = open(cfg.out.as_deref())?;
    match cfg.format_or(Format::Csv) {
        Format::Json => write_json(
            w,
            &ProfileJson {
                rows: rows
                    .into_iter()
                    .map(|r| ProfileJsonRow {
                        delta1: r.delta1,
                        g1: r.g1,
                        criterion: r.criterion,
                        value: r.value,
                        entangled: r.entangled,
                    })
                    .collect(),
                markers: &markers,
            },
        ),
        Format::Csv => {
            // Marker rows carry `channel:C<n>` in the criterion column and leave
            // value and entangled empty.
            let data = rows.iter().map(|r| {
                vec![num(r.delta1), num(r.g1), r.criterion.label(), num(r.value), r.entangled.to_string()]
            });
            let marks = markers
                .iter()
                .map(|m| vec![num(m.delta1), num(m.g1), format!("channel:{}", m.label), String::new(), String::new()]);
            write_csv(w, &["delta1", "G1", "criterion", "value", "entangled"], data.chain(marks))
        }
    }
}

pub fn validate(cfg: &RunConfig, filter: Option<&str>, json: bool) -> Result<(), CliError> {
    let report = run_checks(filter).map_err(|e| match e {
        CoreError::Configuration(m) => CliError::Config(m),
        other => other.into(),
    })?;
    if json {
        write_json(open(None)?, &report)?;
    } else {
        println!("{:>3}  {:<22} {:<12} {:<6} {:>8}  detail", "id", "check", "group", "result", "seconds");
        for c in &report.checks {
            println!(
                "{:>3}  {:<22} {:<12} {:<6} {:>8.3}  {}",
                c.id,
                c.name,
                c.group,
                if c.passed { "PASS" } else { "FAIL" },
                c.seconds,
                c.detail
            );
        }
    }
    if let Some(out) = &cfg.out {
        write_json(open(Some(out))?, &report)?;
    }
    if report.all_passed() {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name).collect();
        Err(CliError::Failed(format!("failing checks: {}", names.join(", "))))
    }
}
