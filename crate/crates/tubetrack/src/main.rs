use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use tubetrack::bench::{compare_models, markdown_summary, persist_scene, write_csv, SCENE_QUANTILE};
use tubetrack::config::{load_config, parse_weighting};
use tubetrack::core::eval::{accuracy, generate_scene, SceneKind, SceneSpec};
use tubetrack::core::graph::TrackedPath;
use tubetrack::core::{PipelineConfig, Pixel};
use tubetrack::io::{read_image, read_mask};
use tubetrack::server::{router, SessionStore};
use tubetrack::session::Session;

#[derive(Parser)]
#[command(name = "tubetrack", version, about = "Curvature-penalized centerline tracking for tubular structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute features, trajectories and the priced graph, filling the cache.
    Prepare {
        #[arg(long)]
        image: PathBuf,
        /// TOML configuration; unspecified keys keep their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Also write the trajectories as JSON.
        #[arg(long)]
        trajectories: Option<PathBuf>,
    },
    /// Trace a centerline through two or more seed points.
    Track {
        #[arg(long)]
        image: PathBuf,
        /// Seeds as `x1,y1;x2,y2[;...]`, origin top-left, y down.
        #[arg(long)]
        points: String,
        /// fsr, fe or angle; defaults to the configured metric.
        #[arg(long)]
        metric: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Path JSON; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the three edge weightings on a generated scene.
    Bench {
        /// spiral, crossing-pair, tortuous-pair or line.
        #[arg(long)]
        scene: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// CSV with columns scene, model, J, seconds.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Markdown summary; printed to stdout when absent.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Directory receiving the scene PNG and ground truth.
        #[arg(long)]
        save_scene: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        noise: Option<f64>,
    },
    /// Score a path JSON against a ground-truth mask PNG.
    Eval {
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        gt: PathBuf,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Allow clients to open images by server-side path.
        #[arg(long)]
        allow_paths: bool,
    },
}

fn config_or_default(path: Option<&PathBuf>) -> anyhow::Result<PipelineConfig> {
    Ok(match path {
        Some(p) => load_config(p).with_context(|| format!("loading {}", p.display()))?,
        None => PipelineConfig::default(),
    })
}

fn parse_points(s: &str) -> anyhow::Result<Vec<Pixel>> {
    let mut out = Vec::new();
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let Some((x, y)) = part.split_once(',') else {
            bail!("point {part:?} is not of the form x,y");
        };
        out.push(Pixel::new(
            x.trim().parse().with_context(|| format!("bad x in {part:?}"))?,
            y.trim().parse().with_context(|| format!("bad y in {part:?}"))?,
        ));
    }
    if out.len() < 2 {
        bail!("need at least two points");
    }
    Ok(out)
}

fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_max_level(tracing::Level::INFO)
        .with_writer(std::io::stderr)
        .init();
    match Cli::parse().command {
        Command::Prepare {
            image,
            config,
            cache,
            trajectories,
        } => {
            let cfg = config_or_default(config.as_ref())?;
            let img = read_image(&image)?;
            let (session, stats) = Session::prepare(img, &cfg, cache.as_deref())?;
            let model = session.model(cfg.weighting())?;
            if let Some(p) = trajectories {
                std::fs::write(&p, serde_json::to_string_pretty(&session.trajectories_doc())?)
                    .with_context(|| format!("writing {}", p.display()))?;
            }
            let summary = serde_json::json!({
                "session_id": session.id(),
                "trajectories": session.extraction().trajectories.len(),
                "edges": model.graph().edges().len(),
                "features_cached": stats.features_cached,
                "graph_cached": stats.graph_cached,
                "seconds": stats.seconds,
            });
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Track {
            image,
            points,
            metric,
            config,
            cache,
            out,
        } => {
            let cfg = config_or_default(config.as_ref())?;
            let seeds = parse_points(&points)?;
            let weighting = match metric {
                Some(m) => parse_weighting(&m)?,
                None => cfg.weighting(),
            };
            let img = read_image(&image)?;
            let (session, _) = Session::prepare(img, &cfg, cache.as_deref())?;
            let report = match session.track(&seeds, weighting) {
                Ok(r) => r,
                Err(e) => bail!("{}: {}", e.code(), e.detail()),
            };
            let json = serde_json::to_string_pretty(&report.path)?;
            match out {
                Some(p) => std::fs::write(&p, json).with_context(|| format!("writing {}", p.display()))?,
                None => println!("{json}"),
            }
            let legs: Vec<_> = report
                .legs
                .iter()
                .map(|l| serde_json::json!({"nodes": l.nodes, "weights": l.weights, "cost": l.cost}))
                .collect();
            eprintln!(
                "{}",
                serde_json::json!({"metric": report.metric, "legs": legs, "seconds": report.seconds})
            );
        }
        Command::Bench {
            scene,
            seed,
            report,
            summary,
            save_scene,
            config,
            noise,
        } => {
            let Some(kind) = SceneKind::parse(&scene) else {
                bail!("unknown scene {scene:?}; expected spiral, crossing-pair, tortuous-pair or line");
            };
            let cfg = match config {
                Some(p) => load_config(&p)?,
                None => PipelineConfig {
                    threshold_quantile: SCENE_QUANTILE,
                    ..PipelineConfig::default()
                },
            };
            let mut spec = SceneSpec::new(kind, seed);
            if let Some(n) = noise {
                spec.noise = n;
            }
            let sc = generate_scene(&spec)?;
            if let Some(dir) = &save_scene {
                persist_scene(dir, &sc)?;
            }
            let st = &sc.structures[0];
            let name = format!("{}-{}", kind.name(), seed);
            let rows = compare_models(&name, &sc, 0, &[st.seeds.0, st.seeds.1], &cfg)?;
            if let Some(p) = &report {
                write_csv(p, &rows)?;
            }
            let md = markdown_summary(&rows);
            match summary {
                Some(p) => std::fs::write(&p, md).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{md}"),
            }
        }
        Command::Eval { path, gt } => {
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let tracked: TrackedPath = serde_json::from_str(&text).context("parsing path JSON")?;
            let mask = read_mask(&gt)?;
            let score = accuracy(&tracked.polyline, &mask)?;
            println!("{}", serde_json::to_string(&score)?);
        }
        Command::Serve {
            addr,
            config,
            cache,
            allow_paths,
        } => {
            let cfg = config_or_default(config.as_ref())?;
            let store = Arc::new(SessionStore::new(cfg, cache, allow_paths));
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind(&addr).await?;
                tracing::info!("listening on {}", listener.local_addr()?);
                axum::serve(listener, router(store))
                    .with_graceful_shutdown(async {
                        let _ = tokio::signal::ctrl_c().await;
                    })
                    .await?;
                anyhow::Ok(())
            })?;
        }
    }
    Ok(())
}
