//! `farfield`: synthesize near fields, extrapolate them to the far field and
//! score the result.

mod error;
mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use farfield_core::field_model::{fresnel_parameter, Medium};
use farfield_core::fieldfile::{read_field, write_field, Field, FieldFile};
use farfield_core::harness::{
    chamber_scenario_with, compare_magnitudes, hold_max_prediction, oracle_profile, ArrayLength,
    Method, SourceLayout, StudyConfig, DEFAULT_STRIDE,
};
use farfield_core::linear::{
    fls_decompose, fls_propagate, flt_magnitude, CutoffFilter, HarmonicSelection, LineField,
};
use farfield_core::planar::{fpk_predict, fps_decompose, fps_propagate, FarFieldRequest};
use farfield_core::sampling::Window;
use farfield_core::Point3;
use serde_json::json;

use crate::error::{CliError, Result};
use crate::table::Row;

#[derive(Parser, Debug)]
#[command(
    name = "farfield",
    version,
    about = "Near-field to far-field acoustic extrapolation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SourceArg {
    MonopolePair,
    DipolePair,
}

impl From<SourceArg> for SourceLayout {
    fn from(s: SourceArg) -> Self {
        match s {
            SourceArg::MonopolePair => SourceLayout::MonopolePair,
            SourceArg::DipolePair => SourceLayout::DipolePair,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LayoutArg {
    Planar,
    Line,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Fps,
    Fpk,
    Fls,
    Flt,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Fps => Method::Fps,
            MethodArg::Fpk => Method::Fpk,
            MethodArg::Fls => Method::Fls,
            MethodArg::Flt => Method::Flt,
        }
    }
}

fn elements(n: usize) -> Result<ArrayLength> {
    match n {
        21 => Ok(ArrayLength::Elements21),
        22 => Ok(ArrayLength::Elements22),
        other => Err(CliError::Usage(format!(
            "--elements must be 21 or 22, got {other}"
        ))),
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the synthetic near field of the two-source scenario.
    Synth {
        #[arg(long)]
        freq: f64,
        #[arg(long, value_enum)]
        source: SourceArg,
        #[arg(long, value_enum, default_value = "planar")]
        layout: LayoutArg,
        /// Array length: 21 (2.0 m) or 22 elements.
        #[arg(long, default_value_t = 21)]
        elements: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the exact field on the y = 0 line at `--zfar` over the array's x lattice.
    Oracle {
        #[arg(long)]
        freq: f64,
        #[arg(long, value_enum)]
        source: SourceArg,
        #[arg(long)]
        zfar: f64,
        #[arg(long, default_value_t = 21)]
        elements: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict the field at `--zfar` over the input file's node lattice.
    Propagate {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        zfar: f64,
        #[arg(long = "M", default_value_t = 200)]
        harmonics: usize,
        #[arg(long, default_value_t = 1)]
        lmax: u32,
        /// Width of the k_x cutoff roll-off in lattice steps; 0 is a hard cutoff.
        #[arg(long = "kxmax-taper", default_value_t = 2)]
        kxmax_taper: u32,
        /// Equal node weights instead of the Hann taper.
        #[arg(long)]
        no_window: bool,
        /// Line methods only: keep every k_x harmonic.
        #[arg(long)]
        no_cutoff: bool,
        /// Planar methods only: restrict the output to this y row.
        #[arg(long)]
        y: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a predicted table against a reference table on the same lattice.
    Compare {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        oracle: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
    /// Hold-max FLS over every sub-array of each size.
    ApertureStudy {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 2.03)]
        zfar: f64,
        #[arg(long, default_value_t = DEFAULT_STRIDE)]
        stride: usize,
        /// Also score each size against this source layout's exact field.
        #[arg(long, value_enum)]
        source: Option<SourceArg>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the Fresnel parameter λR/D².
    Fresnel {
        #[arg(long)]
        freq: f64,
        #[arg(long)]
        c: f64,
        #[arg(long = "R")]
        r: f64,
        #[arg(long = "D")]
        d: f64,
    },
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Synth {
            freq,
            source,
            layout,
            elements: n,
            out,
        } => {
            let scenario = chamber_scenario_with(freq, source.into(), elements(n)?)?;
            let field = match layout {
                LayoutArg::Planar => Field::Planar(scenario.near_field()?),
                LayoutArg::Line => Field::Line(scenario.near_line_field()?),
            };
            let file = FieldFile::new(freq, scenario.model.medium(), field)?;
            write_field(&file, &out)?;
        }
        Command::Oracle {
            freq,
            source,
            zfar,
            elements: n,
            out,
        } => {
            let scenario = chamber_scenario_with(freq, source.into(), elements(n)?)?;
            let xs = scenario.near_line.x_coords();
            let points: Vec<Point3> = xs.iter().map(|&x| Point3::new(x, 0.0, zfar)).collect();
            let values = farfield_core::field_model::sample_points(&scenario.model, &points)?;
            let rows: Vec<Row> = points
                .iter()
                .zip(&values)
                .map(|(p, v)| Row::complex(*p, *v))
                .collect();
            table::write_table(&out, &rows)?;
        }
        Command::Propagate {
            method,
            input,
            zfar,
            harmonics,
            lmax,
            kxmax_taper,
            no_window,
            no_cutoff,
            y,
            out,
        } => {
            let opts = PropagateOptions {
                method: method.into(),
                zfar,
                harmonics,
                lmax,
                taper_bins: kxmax_taper as f64,
                window: if no_window {
                    Window::Rectangular
                } else {
                    Window::Hann
                },
                cutoff: !no_cutoff,
                y,
            };
            let rows = propagate(&read_field(&input)?, &opts)?;
            table::write_table(&out, &rows)?;
        }
        Command::Compare {
            pred,
            oracle,
            report,
            method,
        } => {
            let (p, o) = (table::read_table(&pred)?, table::read_table(&oracle)?);
            let same = p.len() == o.len()
                && p.iter()
                    .zip(&o)
                    .all(|(a, b)| same_coord(a.x, b.x) && same_coord(a.y, b.y));
            if !same {
                return Err(CliError::Compute(
                    "prediction and oracle tables are on different lattices".into(),
                ));
            }
            let magnitudes = |rows: &[Row]| rows.iter().map(|r| r.abs_p).collect::<Vec<_>>();
            let r = compare_magnitudes(&magnitudes(&p), &magnitudes(&o))?;
            let body = json!({
                "method": method.map(|m| Method::from(m).label()),
                "rms_divergence": r.rms_divergence,
                "peak_ratio": r.peak_ratio,
                "null_depth_db": r.null_depth_db,
            });
            let text = serde_json::to_string_pretty(&body)
                .map_err(|e| CliError::Compute(e.to_string()))?;
            std::fs::write(&report, text + "\n")?;
        }
        Command::ApertureStudy {
            input,
            sizes,
            zfar,
            stride,
            source,
            out,
        } => {
            aperture(&input, &sizes, zfar, stride, source, &out)?;
        }
        Command::Fresnel { freq, c, r, d } => {
            let wavelength = Medium::new(c)?.wavelength(freq);
            println!("{:.1}", fresnel_parameter(wavelength, r, d)?);
        }
    }
    Ok(())
}

fn same_coord(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

struct PropagateOptions {
    method: Method,
    zfar: f64,
    harmonics: usize,
    lmax: u32,
    taper_bins: f64,
    window: Window,
    cutoff: bool,
    y: Option<f64>,
}

fn propagate(file: &FieldFile, opts: &PropagateOptions) -> Result<Vec<Row>> {
    let k = file.wavenumber();
    match (&file.field, opts.method) {
        (Field::Planar(field), Method::Fps | Method::Fpk) => {
            let grid = field.grid();
            let ys = match opts.y {
                Some(y) => vec![y],
                None => grid.y_coords().to_vec(),
            };
            let request = FarFieldRequest::plane(grid.x_coords(), &ys, opts.zfar)?;
            let values = if opts.method == Method::Fps {
                let spectrum = fps_decompose(field, k, opts.harmonics, opts.window)?;
                fps_propagate(&spectrum, &request)?
            } else {
                fpk_predict(field, k, &request, opts.window)?
            };
            Ok(request
                .points()
                .iter()
                .zip(&values)
                .map(|(p, v)| Row::complex(*p, *v))
                .collect())
        }
        (Field::Line(field), Method::Fls | Method::Flt) => propagate_line(field, k, opts),
        (field, method) => Err(CliError::Usage(format!(
            "{method} cannot process a {} field",
            field.kind()
        ))),
    }
}

fn propagate_line(field: &LineField, k: f64, opts: &PropagateOptions) -> Result<Vec<Row>> {
    let spectrum = fls_decompose(field, k, opts.harmonics, opts.window)?;
    let filter = if opts.cutoff {
        CutoffFilter::for_sources(
            spectrum.lattice(),
            opts.lmax,
            field.grid().z_plane(),
            opts.taper_bins,
        )?
    } else {
        CutoffFilter::pass_all()
    };
    let xs = field.grid().x_coords();
    let y0 = field.grid().y0();
    if opts.method == Method::Fls {
        let values = fls_propagate(&spectrum, &filter, xs, opts.zfar)?;
        return Ok(xs
            .iter()
            .zip(&values)
            .map(|(&x, v)| Row::complex(Point3::new(x, y0, opts.zfar), *v))
            .collect());
    }
    xs.iter()
        .map(|&x| {
            let magnitude = flt_magnitude(
                &spectrum,
                &filter,
                x.atan2(opts.zfar),
                x.hypot(opts.zfar),
                HarmonicSelection::Nearest,
            )?;
            Ok(Row::magnitude(x, y0, magnitude))
        })
        .collect()
}

fn aperture(
    input: &Path,
    sizes: &[usize],
    zfar: f64,
    stride: usize,
    source: Option<SourceArg>,
    out: &Path,
) -> Result<()> {
    let file = read_field(input)?;
    let Field::Line(line) = &file.field else {
        return Err(CliError::Usage("aperture-study needs a line field".into()));
    };
    let config = StudyConfig {
        stride,
        ..StudyConfig::default()
    };
    let xs = line.grid().x_coords();
    let y0 = line.grid().y0();
    let reference = match source {
        Some(s) => {
            let model =
                farfield_core::harness::source_model(file.frequency, s.into(), file.medium)?;
            Some(oracle_profile(&model, xs, y0, zfar)?)
        }
        None => None,
    };
    let mut rows = Vec::new();
    for &size in sizes {
        let (subsets, profile) =
            hold_max_prediction(line, file.wavenumber(), size, xs, zfar, &config)?;
        if let Some(oracle) = &reference {
            let r = compare_magnitudes(&profile.magnitude, &oracle.magnitude)?;
            println!(
                "size {size}: subsets {subsets} rms_divergence {:.4} null_depth_db {:.1}",
                r.rms_divergence, r.null_depth_db
            );
        }
        rows.extend(
            table::from_profile(&profile, y0)
                .into_iter()
                .map(|r| (Some(size.to_string()), r)),
        );
    }
    table::write_rows(out, Some("size"), rows)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            eprint!("error[usage]: {}", text.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.tag());
            ExitCode::from(e.exit_code())
        }
    }
}
