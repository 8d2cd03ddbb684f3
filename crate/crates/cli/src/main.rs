use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fractal_tops::attractor::{
    render_adaptive, render_chaos_with, render_deterministic_from, DEFAULT_BURN_IN,
};
use fractal_tops::config::IfsConfig;
use fractal_tops::diagnostics::{area_probe, continuity_probe, refinement_check};
use fractal_tops::gallery::{by_name, GALLERY};
use fractal_tops::tops::{build_partition, enumerate_addresses, tops_orbit, DEFAULT_MAX_BRANCHES};
use fractal_tops::transform::{color_steal, transform_picture_deterministic, StealOptions};
use fractal_tops::{ppm, Error, Ifs, PixelGrid, Point2, Viewport};

#[derive(Parser)]
#[command(
    name = "fractops",
    version,
    about = "Attractors, tops functions and fractal transformations of planar IFSs"
)]
struct Cli {
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render an attractor mask.
    Render {
        /// Gallery name or config file.
        ifs: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "512x512", value_parser = parse_size)]
        size: (usize, usize),
        #[arg(long, value_enum, default_value_t = RenderMethod::Det)]
        method: RenderMethod,
        #[arg(long, default_value_t = 10_000_000)]
        iters: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Fixed composition depth for `det`; pixel-converged when omitted.
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Transform a picture on G's attractor onto F's attractor.
    Transform {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// P6 picture spanning G's viewport; a `.coverage.pgm` sidecar is used if present.
        #[arg(long)]
        picture: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = TransformMethod::Steal)]
        method: TransformMethod,
        #[arg(long, default_value_t = 48)]
        depth: usize,
        #[arg(long, default_value_t = 10_000_000)]
        iters: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output grid over F's viewport.
        #[arg(long, default_value = "512x512", value_parser = parse_size)]
        size: (usize, usize),
    },
    /// Print the tops address prefix of a point.
    Tops(PointArgs),
    /// Print every address prefix of a point, largest first.
    Addresses(PointArgs),
    /// Continuity, refinement or area probes of the transformation F -> G.
    Diagnose(DiagnoseArgs),
    /// List the built-in IFSs.
    Gallery,
}

#[derive(Args)]
struct PointArgs {
    ifs: String,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    point: Point2,
    #[arg(long)]
    depth: usize,
    /// Resolution of the attractor partition.
    #[arg(long, default_value = "512x512", value_parser = parse_size)]
    size: (usize, usize),
}

#[derive(Args)]
struct DiagnoseArgs {
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
    #[arg(long, group = "probe")]
    continuity: bool,
    #[arg(long, group = "probe")]
    refinement: bool,
    /// Region x0,y0,x1,y1 in F's viewport.
    #[arg(long, group = "probe", value_parser = parse_rect, allow_hyphen_values = true)]
    area: Option<Viewport>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "512x512", value_parser = parse_size)]
    size: (usize, usize),
}

#[derive(Clone, Copy, ValueEnum)]
enum RenderMethod {
    Chaos,
    Det,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformMethod {
    Steal,
    Det,
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WxH")?;
    let w: usize = w.trim().parse().map_err(|_| format!("bad width {w:?}"))?;
    let h: usize = h.trim().parse().map_err(|_| format!("bad height {h:?}"))?;
    if w == 0 || h == 0 {
        return Err("size must be positive".into());
    }
    Ok((w, h))
}

fn parse_numbers<const K: usize>(s: &str) -> Result<[f64; K], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number {t:?}"))
        })
        .collect::<Result<_, _>>()?;
    v.try_into()
        .map_err(|_| format!("expected {K} comma-separated numbers"))
}

fn parse_point(s: &str) -> Result<Point2, String> {
    let [x, y] = parse_numbers::<2>(s)?;
    Ok(Point2::new(x, y))
}

fn parse_rect(s: &str) -> Result<Viewport, String> {
    let [x0, y0, x1, y1] = parse_numbers::<4>(s)?;
    Viewport::new(x0, y0, x1, y1).map_err(|e| e.to_string())
}

fn load_ifs(spec: &str) -> fractal_tops::Result<Ifs> {
    let path = Path::new(spec);
    if path.is_file() {
        let cfg: IfsConfig = std::fs::read_to_string(path)?.parse()?;
        return cfg.to_ifs();
    }
    by_name(spec)
}

fn grid_for(ifs: &Ifs, (w, h): (usize, usize)) -> fractal_tops::Result<PixelGrid> {
    PixelGrid::new(w, h, ifs.viewport())
}

fn run(cli: Cli) -> fractal_tops::Result<()> {
    let workers = cli.workers.max(1);
    match cli.command {
        Command::Render {
            ifs,
            out,
            size,
            method,
            iters,
            seed,
            depth,
        } => {
            let f = load_ifs(&ifs)?;
            let grid = grid_for(&f, size)?;
            let start = Instant::now();
            let mask = match (method, depth) {
                (RenderMethod::Chaos, _) => {
                    render_chaos_with(&f, iters, seed, &grid, DEFAULT_BURN_IN, workers)
                }
                (RenderMethod::Det, Some(d)) => {
                    render_deterministic_from(&f, d, &grid, f.viewport().center(), workers)?
                }
                (RenderMethod::Det, None) => render_adaptive(&f, &grid, workers)?.mask,
            };
            ppm::save_mask(&out, &mask)?;
            eprintln!("{} pixels set in {:.2?}", mask.count(), start.elapsed());
        }
        Command::Transform {
            from,
            to,
            picture,
            out,
            method,
            depth,
            iters,
            seed,
            size,
        } => {
            let f = load_ifs(&from)?;
            let g = load_ifs(&to)?;
            let pic = ppm::load_picture(&picture, g.viewport())?;
            let grid = grid_for(&f, size)?;
            let part = build_partition(&f, &grid, workers)?;
            let (result, report) = match method {
                TransformMethod::Steal => {
                    let opts = StealOptions {
                        iterations: iters,
                        seed,
                        depth,
                        burn_in: DEFAULT_BURN_IN,
                        workers,
                    };
                    color_steal(&f, &g, &pic, part.mask(), &opts)?
                }
                TransformMethod::Det => {
                    transform_picture_deterministic(&part, &g, &pic, depth, workers)?
                }
            };
            ppm::save_picture(&out, &result)?;
            eprintln!(
                "{} pixels written, {} conflicts, coverage {:.4}",
                report.pixels_written, report.update_conflicts, report.coverage_fraction
            );
            if !report.sampling_ok() {
                eprintln!("warning: coverage below 0.99; increase --iters");
            }
        }
        Command::Tops(args) => {
            let f = load_ifs(&args.ifs)?;
            let part = build_partition(&f, &grid_for(&f, args.size)?, workers)?;
            let it = tops_orbit(&part, args.point, args.depth)?;
            println!("{}", it.prefix);
            if !it.complete {
                eprintln!("orbit left the attractor after {} steps", it.prefix.len());
            }
        }
        Command::Addresses(args) => {
            let f = load_ifs(&args.ifs)?;
            let part = build_partition(&f, &grid_for(&f, args.size)?, workers)?;
            for w in enumerate_addresses(
                &f,
                part.images(),
                args.point,
                args.depth,
                DEFAULT_MAX_BRANCHES,
            )? {
                println!("{w}");
            }
        }
        Command::Diagnose(args) => diagnose(args, workers)?,
        Command::Gallery => {
            for e in GALLERY {
                println!("{:<36} {}", e.name, e.description);
            }
        }
    }
    Ok(())
}

fn diagnose(args: DiagnoseArgs, workers: usize) -> fractal_tops::Result<()> {
    let f = load_ifs(&args.from)?;
    let g = load_ifs(&args.to)?;
    let grid = grid_for(&f, args.size)?;
    if args.refinement {
        let depth = args.depth.unwrap_or(10);
        let v = refinement_check(
            &f,
            &g,
            depth,
            args.samples.unwrap_or(1000),
            &grid,
            args.seed,
            workers,
        )?;
        println!("{v}");
        return Ok(());
    }
    let part = build_partition(&f, &grid, workers)?;
    let depth = args.depth.unwrap_or(30);
    if let Some(region) = args.area {
        let r = area_probe(
            &part,
            &g,
            region,
            args.samples.unwrap_or(1_000_000),
            args.seed,
            depth,
            workers,
        )?;
        println!("area_f {:.6} ± {:.6}", r.area_f.area, r.area_f.uncertainty);
        println!("area_g {:.6} ± {:.6}", r.area_g.area, r.area_g.uncertainty);
        println!("ratio  {:.6} ± {:.6}", r.ratio(), r.ratio_uncertainty());
        return Ok(());
    }
    if !args.continuity {
        eprintln!("no probe selected; running --continuity");
    }
    let scales: Vec<f64> = [2.0, 4.0, 8.0, 16.0, 32.0]
        .iter()
        .map(|k| k * grid.pitch())
        .collect();
    let rows = continuity_probe(
        &part,
        &g,
        &scales,
        args.samples.unwrap_or(20_000),
        depth,
        args.seed,
        workers,
    )?;
    println!("{:>12} {:>12} {:>8}", "epsilon", "max_disp", "pairs");
    for r in rows {
        println!(
            "{:>12.6} {:>12.6} {:>8}",
            r.epsilon, r.max_displacement, r.pairs
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::Io(_)) { 3 } else { 2 })
        }
    }
}
