use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;

use anyhow::Context;
use rayon::prelude::*;
use segc_core::advisor::{self, AdvisorConfig};
use segc_core::complexity::{complexity_report, measure_pair, ComplexityReport, ImageComplexity};
use segc_core::degrade::{degrade_masks, rows_to_csv, run_degradation};
use segc_core::fixture::{self, Rows};
use segc_core::format::NumberStyle;
use segc_core::raster::synth;
use segc_core::regress::{fit_table, FitTable};
use segc_core::{BinaryMask, DatasetManifest, GrayImage, Measure, PolyFit};

use crate::args::{AdviseArgs, ComplexityArgs, DegradeArgs, FitArgs, Format, ReproduceArgs, Response};
use crate::inputs::{self, FitDocument};
use crate::output::{check_target, emit};
use crate::UsageError;

/// Reference comparison that did not meet its target.
#[derive(Debug)]
pub struct Mismatch(pub String);

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Mismatch {}

fn json<T: serde::Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn complexity(args: ComplexityArgs) -> anyhow::Result<()> {
    if let Some(path) = &args.out.output {
        check_target(path, args.out.force)?;
    }
    let manifest = DatasetManifest::load(&args.manifest)?;
    let report = complexity_report(&manifest, args.bins)?;
    let text = match args.format {
        Format::Csv => report.to_csv(args.out.style()),
        Format::Json => report.to_json() + "\n",
    };
    emit(args.out.output.as_deref(), args.out.force, &text)
}

pub fn degrade(args: DegradeArgs) -> anyhow::Result<()> {
    if let Some(f) = args.factors.iter().find(|&&f| f < 2) {
        return Err(UsageError(format!("factor {f} is invalid; factors must be at least 2")).into());
    }
    if let Some(path) = &args.out.output {
        check_target(path, args.out.force)?;
    }
    let manifest = DatasetManifest::load(&args.manifest)?;
    let rows = run_degradation(&manifest, &args.factors, args.levels)?;
    let text = match args.format {
        Format::Csv => rows_to_csv(&rows, args.out.style()),
        Format::Json => json(&rows)?,
    };
    emit(args.out.output.as_deref(), args.out.force, &text)
}

fn response_name(r: Response) -> &'static str {
    match r {
        Response::E => "E",
        Response::D => "D",
    }
}

pub fn fit(args: FitArgs) -> anyhow::Result<()> {
    if !args.paper_fixture && args.degrade.is_empty() {
        return Err(UsageError("either --paper-fixture or --degrade with --complexity is required".into()).into());
    }
    if args.max_degree == 0 {
        return Err(UsageError("--max-degree must be at least 1".into()).into());
    }
    if let Some(path) = &args.out.output {
        check_target(path, args.out.force)?;
    }
    let input = if args.paper_fixture {
        let response = match args.response {
            Response::E => fixture::Response::E,
            Response::D => fixture::Response::D,
        };
        fixture::fit_input(Rows::Regression, response)?
    } else {
        inputs::measured_fit_input(&args.degrade, &args.complexity, args.response)?
    };
    let table = fit_table(&input, 1..=args.max_degree)?;
    let text = match args.format {
        Format::Csv => table.to_csv(args.out.style(), args.select),
        Format::Json => {
            let selections = table.selections();
            json(&FitDocument { response: response_name(args.response).into(), table, selections })?
        }
    };
    emit(args.out.output.as_deref(), args.out.force, &text)
}

fn fits_from_table(table: &FitTable, measure: Measure, degree: usize) -> anyhow::Result<BTreeMap<u32, PolyFit>> {
    let fits: BTreeMap<u32, PolyFit> = table
        .cells
        .iter()
        .filter(|c| c.measure == measure && c.dof == degree)
        .filter_map(|c| c.fit.clone().map(|f| (c.factor, f)))
        .collect();
    if fits.is_empty() {
        return Err(UsageError(format!("no degree-{degree} fits for {measure} in the fit file")).into());
    }
    Ok(fits)
}

pub fn advise(args: AdviseArgs) -> anyhow::Result<()> {
    if let Some(path) = &args.output {
        check_target(path, args.force)?;
    }
    let fits = if args.paper_fixture {
        fixture::fits(args.measure, args.degree, fixture::Response::E)?
    } else if let Some(path) = &args.fits {
        let doc = inputs::fit_document(path)?;
        if doc.response != "E" {
            return Err(UsageError(format!(
                "{} holds fits of {}, advice needs fits of E",
                path.display(),
                doc.response
            ))
            .into());
        }
        fits_from_table(&doc.table, args.measure, args.degree)?
    } else {
        return Err(UsageError("either --paper-fixture or --fits is required".into()).into());
    };
    let value = match (&args.complexity, args.value) {
        (Some(path), _) => inputs::complexity_report(path)?.aggregate.get(args.measure),
        (None, Some(v)) => Some(v),
        (None, None) => return Err(UsageError("either --complexity or --value is required".into()).into()),
    };
    let Some(value) = value.filter(|v| v.is_finite()) else {
        return Err(UsageError(format!(
            "{} is undefined for this dataset (blank image or empty mask), so no recommendation can be made",
            args.measure
        ))
        .into());
    };
    let config = AdvisorConfig { measure: args.measure, budget: args.eps, tau: args.tau };
    let rec = advisor::advise(&fits, Some(value), &config)?;
    emit(args.output.as_deref(), args.force, &(rec.to_json() + "\n"))
}

/// Small seeded dataset: vessel-like masks and disks over noisy backgrounds.
fn synthetic_dataset(seed: u64) -> anyhow::Result<Vec<(String, GrayImage, BinaryMask)>> {
    const SIZE: usize = 96;
    (0..6u64)
        .map(|i| {
            let mask = if i < 3 {
                synth::vessels(
                    SIZE,
                    SIZE,
                    synth::VesselParams { count: 4 + 2 * i as usize, ..Default::default() },
                    seed + i,
                )?
            } else {
                synth::centered_disk(SIZE, SIZE, 12.0 + 6.0 * (i - 3) as f64)?
            };
            let noise = synth::noise(SIZE, SIZE, seed.wrapping_add(1000 + i))?;
            let image = GrayImage::from_fn(SIZE, SIZE, |x, y| {
                0.8 * f64::from(u8::from(mask.get(x, y))) + 0.2 * noise.get(x, y)
            })?;
            Ok((format!("synthetic/{i:02}"), image, mask))
        })
        .collect()
}

struct Outputs {
    files: Vec<(&'static str, String)>,
    summary: Vec<String>,
    failures: Vec<String>,
}

fn reference_suite(out: &mut Outputs) -> anyhow::Result<()> {
    let expected = fixture::expected_fits()?;
    let table = fit_table(&fixture::fit_input(Rows::Regression, fixture::Response::E)?, fixture::DEGREES)?;
    let dice = fit_table(&fixture::fit_input(Rows::Regression, fixture::Response::D)?, fixture::DEGREES)?;
    out.files.push(("fit_e.csv", table.to_csv(NumberStyle::RoundTrip, true)));
    out.files.push(("fit_d.csv", dice.to_csv(NumberStyle::RoundTrip, true)));

    let checks = fixture::compare_grid(&table, &expected);
    let mut csv = String::from("measure,factor,dof,statistic,expected,actual,tolerance,pass\n");
    for c in &checks {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            c.measure,
            c.factor,
            c.dof,
            c.statistic,
            c.expected,
            NumberStyle::RoundTrip.optional(c.actual),
            c.tolerance,
            c.passed()
        );
    }
    out.files.push(("grid_comparison.csv", csv));
    let passed = checks.iter().filter(|c| c.passed()).count();
    out.summary.push(format!("grid cells within tolerance: {passed}/{}", checks.len()));
    if passed != checks.len() {
        out.failures.push(format!("{} grid cells out of tolerance", checks.len() - passed));
    }

    let selection = fixture::compare_selection(&table, &expected);
    let mut csv = String::from("measure,factor,expected_dof,selected_dof,pass\n");
    for s in &selection {
        let actual = s.actual.map_or("null".to_string(), |k| k.to_string());
        let _ = writeln!(csv, "{},{},{},{},{}", s.measure, s.factor, s.expected, actual, s.passed());
    }
    out.files.push(("selection.csv", csv));
    let agree = selection.iter().filter(|s| s.passed()).count();
    out.summary.push(format!("minimum-AICc degree agreements: {agree}/{}", selection.len()));
    if agree < 10 {
        out.failures.push(format!("only {agree} of {} selections agree", selection.len()));
    }

    let mut csv = String::from("factor,de,mnf,mdf,pc,mdf_best\n");
    let mut ranking_ok = true;
    for factor in fixture::FACTORS {
        let r2 = |m| table.get(m, factor, 1).and_then(|c| c.diagnostics.as_ref()).and_then(|d| d.r2);
        let [de, mnf, mdf, pc] = Measure::ALL.map(r2);
        let ok = match (de, mnf, mdf, pc) {
            (Some(de), Some(mnf), Some(mdf), Some(pc)) => mdf >= mnf && mnf > de && mdf > pc,
            _ => false,
        };
        ranking_ok &= ok;
        let f = |v| NumberStyle::RoundTrip.optional(v);
        let _ = writeln!(csv, "{factor},{},{},{},{},{ok}", f(de), f(mnf), f(mdf), f(pc));
    }
    out.files.push(("ranking.csv", csv));
    out.summary.push(format!("MDF ranks first at degree 1 for every factor: {ranking_ok}"));
    if !ranking_ok {
        out.failures.push("degree-1 ranking does not put MDF first".into());
    }

    let fits = fixture::fits(Measure::Mdf, 1, fixture::Response::E)?;
    let config = AdvisorConfig::default();
    let mut csv = String::from("dataset,mdf,max_factor,depth\n");
    for d in fixture::complexity()? {
        let rec = advisor::advise(&fits, Some(d.mdf), &config)?;
        let _ = writeln!(csv, "{},{},{},{}", d.dataset, d.mdf, rec.max_factor, rec.depth_choice);
    }
    out.files.push(("advice.csv", csv));
    Ok(())
}

fn synthetic_suite(out: &mut Outputs, args: &ReproduceArgs) -> anyhow::Result<()> {
    let items = synthetic_dataset(args.seed)?;
    let measured: Vec<segc_core::Result<ImageComplexity>> = items
        .par_iter()
        .map(|(label, image, mask)| {
            Ok(ImageComplexity { path: label.clone(), measures: measure_pair(image, mask, args.bins)? })
        })
        .collect();
    let per_image = measured.into_iter().collect::<segc_core::Result<Vec<_>>>()?;
    let report = ComplexityReport::from_items("synthetic", per_image);
    out.files.push(("synthetic_complexity.csv", report.to_csv(NumberStyle::RoundTrip)));

    let masks: Vec<BinaryMask> = items.into_iter().map(|(_, _, m)| m).collect();
    let rows = degrade_masks("synthetic", &masks, &segc_core::degrade::DEFAULT_FACTORS, args.levels)?;
    let monotone = rows.windows(2).all(|w| w[0].metrics.e <= w[1].metrics.e);
    out.files.push(("synthetic_degrade.csv", rows_to_csv(&rows, NumberStyle::RoundTrip)));
    out.summary.push(format!("synthetic E non-decreasing in factor: {monotone}"));
    if !monotone {
        out.failures.push("synthetic E decreases with the factor".into());
    }
    Ok(())
}

pub fn reproduce(args: ReproduceArgs) -> anyhow::Result<()> {
    let mut out = Outputs { files: Vec::new(), summary: Vec::new(), failures: Vec::new() };
    reference_suite(&mut out)?;
    synthetic_suite(&mut out, &args)?;
    let mut summary = out.summary.join("\n");
    summary.push('\n');
    out.files.push(("summary.txt", summary.clone()));

    fs::create_dir_all(&args.output_dir).with_context(|| format!("creating {}", args.output_dir.display()))?;
    for (name, _) in &out.files {
        check_target(&args.output_dir.join(name), args.force)?;
    }
    for (name, content) in &out.files {
        let path = args.output_dir.join(name);
        fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    }
    print!("{summary}");
    if out.failures.is_empty() {
        Ok(())
    } else {
        Err(Mismatch(out.failures.join("; ")).into())
    }
}
