use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use contact_cli::api::{self, Failure, Format, Status};
use contact_cli::server;
use serde_json::{json, Map, Value};

/// Contact structures, characteristic foliations and Legendrian fronts.
#[derive(Parser)]
#[command(name = "contact", version)]
struct Cli {
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; svg is available for foliate, dividing-set and render.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Svg,
}

#[derive(clap::Args)]
struct DomainArgs {
    /// Verification box: `lo,hi` for every axis or `xlo,xhi,ylo,yhi,zlo,zhi`.
    #[arg(long = "box", value_delimiter = ',', allow_hyphen_values = true)]
    bounds: Option<Vec<f64>>,
    /// Identify `y` and `z` with these periods: `py,pz`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    period: Option<Vec<f64>>,
}

#[derive(clap::Args)]
struct SurfaceArgs {
    /// 1-form text such as `dz + x*dy - y*dx`.
    #[arg(long)]
    form: String,
    /// Surface description (JSON file).
    #[arg(long)]
    surface: PathBuf,
    #[command(flatten)]
    domain: DomainArgs,
    /// Chart grid cells per axis.
    #[arg(long)]
    grid: Option<usize>,
    /// Tolerance of the contact verification.
    #[arg(long)]
    tol: Option<f64>,
    /// Foliation options (JSON file); flags override its values.
    #[arg(long)]
    options: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the contact condition of a 1-form on a box.
    CheckContact {
        #[arg(long)]
        form: String,
        #[command(flatten)]
        domain: DomainArgs,
        /// Grid nodes per axis.
        #[arg(long)]
        grid: Option<usize>,
        /// Nodes with `|alpha ^ d alpha| <= tol` fail.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Characteristic foliation of a surface.
    Foliate(SurfaceArgs),
    /// Dividing set of a surface with its certificate.
    DividingSet(SurfaceArgs),
    /// Classical invariants of a front word.
    FrontInvariants {
        word: String,
        /// Use the reversed orientation.
        #[arg(long)]
        reversed: bool,
    },
    /// Apply a Legendrian Reidemeister move.
    FrontMove {
        word: String,
        /// One of I, I', I-, II, II', II-, III, commute.
        #[arg(long)]
        kind: String,
        /// 1-based event index of the pattern.
        #[arg(long)]
        at: Option<usize>,
        /// Slot and strand of a kink insertion.
        #[arg(long)]
        slot: Option<usize>,
        #[arg(long)]
        strand: Option<usize>,
        /// Only report whether the move applies.
        #[arg(long)]
        dry_run: bool,
    },
    /// Add a zig-zag.
    Stabilize {
        word: String,
        /// `+` or `-`.
        #[arg(long, allow_hyphen_values = true)]
        sign: String,
        #[arg(long)]
        slot: usize,
        #[arg(long)]
        strand: usize,
        #[arg(long)]
        reversed: bool,
    },
    /// Invariants against the Seifert bound, with knot-type data.
    Bennequin {
        word: String,
        #[arg(long)]
        reversed: bool,
    },
    /// Legendrian approximation of a closed polyline.
    Approximate {
        /// JSON array of `[x, y, z]` vertices.
        #[arg(long)]
        input: PathBuf,
        /// Hausdorff tolerance.
        #[arg(long, alias = "epsilon")]
        tol: f64,
        /// Upper bound on the length of the output word.
        #[arg(long)]
        max_events: Option<usize>,
    },
    /// Draw a front; svg by default.
    Render {
        word: String,
        /// Space-curve samples per strand segment.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Run the JSON service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

fn fail(f: Failure) -> ExitCode {
    eprint!("{}", f.to_json());
    ExitCode::from(f.status.exit_code())
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::invalid("io", format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::invalid("schema", format!("{}: {e}", path.display())))
}

fn insert_domain(req: &mut Map<String, Value>, d: &DomainArgs) -> Result<(), Failure> {
    if let Some(b) = &d.bounds {
        req.insert("box".into(), json!(b));
    }
    if let Some(p) = &d.period {
        match p[..] {
            [py, pz] => req.insert("period".into(), json!([py, pz])),
            _ => return Err(Failure::invalid("domain", "--period needs two numbers: py,pz")),
        };
    }
    Ok(())
}

fn surface_request(a: &SurfaceArgs) -> Result<Value, Failure> {
    let mut req = Map::new();
    req.insert("form".into(), json!(a.form));
    req.insert("surface".into(), read_json(&a.surface)?);
    insert_domain(&mut req, &a.domain)?;
    if let Some(t) = a.tol {
        req.insert("tol".into(), json!(t));
    }
    let mut options = match &a.options {
        Some(p) => read_json(p)?,
        None => json!({}),
    };
    if let (Some(g), Some(obj)) = (a.grid, options.as_object_mut()) {
        obj.insert("grid".into(), json!(g));
    }
    req.insert("options".into(), options);
    Ok(Value::Object(req))
}

/// The route and request body equivalent to a subcommand.
fn request(cmd: &Command) -> Result<(&'static str, Value), Failure> {
    Ok(match cmd {
        Command::CheckContact {
            form,
            domain,
            grid,
            tol,
        } => {
            let mut req = Map::new();
            req.insert("form".into(), json!(form));
            insert_domain(&mut req, domain)?;
            if let Some(g) = grid {
                req.insert("grid".into(), json!(g));
            }
            if let Some(t) = tol {
                req.insert("tol".into(), json!(t));
            }
            (api::CONTACT_CHECK, Value::Object(req))
        }
        Command::Foliate(a) => (api::FOLIATION_RUN, surface_request(a)?),
        Command::DividingSet(a) => (api::DIVIDING_SET, surface_request(a)?),
        Command::FrontInvariants { word, reversed } => {
            (api::FRONT_INVARIANTS, json!({ "word": word, "reversed": reversed }))
        }
        Command::Bennequin { word, reversed } => (api::FRONT_BENNEQUIN, json!({ "word": word, "reversed": reversed })),
        Command::FrontMove {
            word,
            kind,
            at,
            slot,
            strand,
            dry_run,
        } => {
            let mut mv = Map::new();
            mv.insert("kind".into(), json!(kind));
            for (key, value) in [("at", at), ("slot", slot), ("strand", strand)] {
                if let Some(v) = value {
                    mv.insert(key.into(), json!(v));
                }
            }
            (api::FRONT_MOVE, json!({ "word": word, "move": mv, "dry_run": dry_run }))
        }
        Command::Stabilize {
            word,
            sign,
            slot,
            strand,
            reversed,
        } => (
            api::FRONT_STABILIZE,
            json!({ "word": word, "sign": sign, "site": { "slot": slot, "strand": strand }, "reversed": reversed }),
        ),
        Command::Approximate { input, tol, max_events } => {
            let mut req = json!({ "points": read_json(input)?, "epsilon": tol });
            if let Some(n) = max_events {
                req["options"] = json!({ "max_events": n });
            }
            (api::FRONT_APPROXIMATE, req)
        }
        Command::Render { word, samples } => {
            let mut req = json!({ "word": word });
            if let Some(n) = samples {
                req["samples"] = json!(n);
            }
            (api::FRONT_GEOMETRY, req)
        }
        Command::Serve { .. } => unreachable!("serve has no request body"),
    })
}

fn serve(host: &str, port: u16) -> ExitCode {
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(r) => r,
        Err(e) => return fail(Failure::invalid("runtime", e.to_string())),
    };
    runtime.block_on(async {
        let listener = match server::bind(host, port).await {
            Ok(l) => l,
            Err(e) => return fail(Failure::invalid("port", format!("cannot listen on {host}:{port}: {e}"))),
        };
        if let Ok(addr) = listener.local_addr() {
            eprintln!("listening on http://{addr}");
        }
        match server::serve(listener).await {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(Failure::invalid("io", e.to_string())),
        }
    })
}

fn usage_error(e: clap::Error) -> ExitCode {
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        _ => {}
    }
    let first = if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
        "a subcommand is required".to_string()
    } else {
        let message = e.to_string();
        message
            .lines()
            .next()
            .unwrap_or("")
            .trim_start_matches("error: ")
            .to_string()
    };
    let unknown = matches!(
        e.kind(),
        ErrorKind::InvalidSubcommand
            | ErrorKind::MissingSubcommand
            | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
    );
    let f = Failure::invalid(if unknown { "unknown_subcommand" } else { "usage" }, first);
    eprint!("{}", f.to_json());
    ExitCode::from(if unknown { 64 } else { 2 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => return usage_error(e),
    };
    if let Command::Serve { port, host } = &cli.command {
        return serve(host, *port);
    }
    let (route, body) = match request(&cli.command) {
        Ok(r) => r,
        Err(f) => return fail(f),
    };
    let format = match cli.format {
        Some(FormatArg::Svg) => Format::Svg,
        Some(FormatArg::Json) => Format::Json,
        None if matches!(cli.command, Command::Render { .. }) => Format::Svg,
        None => Format::Json,
    };
    let bytes = serde_json::to_vec(&body).expect("request serializes");
    let reply = api::run(route, &bytes, format);
    if reply.status != Status::Ok {
        eprint!("{}", reply.body);
        return ExitCode::from(reply.status.exit_code());
    }
    let written = match &cli.out {
        Some(path) => fs::write(path, &reply.body)
            .map_err(|e| Failure::invalid("io", format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(reply.body.as_bytes())
            .map_err(|e| Failure::invalid("io", e.to_string())),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => fail(f),
    }
}
