use std::fmt;
use std::io::Write;
use std::net::IpAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use qualibd_core::dsl::{format, parse, FormatError, ParseError};
use qualibd_core::export::{decode_unchecked, render_svg, to_dot, JsonError};
use qualibd_core::{validate, Model, Severity};
use qualibd_server::{ServerConfig, DEFAULT_PORT, DEFAULT_STORE};

const EXIT_FINDINGS: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "qualibd",
    version,
    about = "Goal models for Big Data quality requirements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model (.qbd or .json) and print its diagnostics.
    Validate {
        file: PathBuf,
        /// Print diagnostics as JSON.
        #[arg(long)]
        json: bool,
        /// Also print a summary line.
        #[arg(short, long)]
        verbose: bool,
    },
    /// Render a model as Graphviz DOT or SVG.
    Render {
        file: PathBuf,
        #[arg(long, value_enum)]
        format: RenderFormat,
        /// Write to this file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rewrite a .qbd file in canonical form.
    Fmt {
        file: PathBuf,
        /// Only report whether the file is canonical.
        #[arg(long)]
        check: bool,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = DEFAULT_PORT)]
        port: u16,
        #[arg(long, env = "QUALIBD_STORE", default_value = DEFAULT_STORE)]
        store: PathBuf,
        /// Directory of the web UI bundle.
        #[arg(long)]
        ui: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RenderFormat {
    Dot,
    Svg,
}

enum LoadError {
    Read(std::io::Error),
    Dsl(Vec<ParseError>),
    Json(JsonError),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Read(e) => write!(f, "cannot read file: {e}"),
            LoadError::Dsl(errors) => {
                for (i, e) in errors.iter().enumerate() {
                    if i > 0 {
                        writeln!(f)?;
                    }
                    write!(f, "{e}")?;
                }
                Ok(())
            }
            LoadError::Json(e) => write!(f, "{e}"),
        }
    }
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// JSON documents are read without the structural checks so that
/// validation can report on them.
fn load(path: &Path) -> Result<Model, LoadError> {
    let text = std::fs::read_to_string(path).map_err(LoadError::Read)?;
    if is_json(path) {
        decode_unchecked(&text).map_err(LoadError::Json)
    } else {
        parse(&text).map_err(LoadError::Dsl)
    }
}

fn report_load_error(path: &Path, error: &LoadError) {
    match error {
        LoadError::Dsl(errors) => {
            for e in errors {
                eprintln!("{}:{e}", path.display());
            }
        }
        other => eprintln!("{}: {other}", path.display()),
    }
}

fn run_validate(path: &Path, json: bool, verbose: bool) -> u8 {
    let model = match load(path) {
        Ok(model) => model,
        Err(e) => {
            if json {
                if let LoadError::Dsl(errors) = &e {
                    println!(
                        "{}",
                        serde_json::to_string(errors).expect("errors serialize")
                    );
                }
            }
            report_load_error(path, &e);
            return EXIT_PARSE;
        }
    };
    let diagnostics = validate(&model);
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&diagnostics).expect("diagnostics serialize")
        );
    } else {
        for d in &diagnostics {
            println!("{}: {d}", path.display());
        }
    }
    let errors = diagnostics
        .iter()
        .filter(|d| d.severity == Severity::Error)
        .count();
    if verbose {
        eprintln!(
            "{}: {} error(s), {} warning(s)",
            path.display(),
            errors,
            diagnostics.len() - errors
        );
    }
    if errors > 0 {
        EXIT_FINDINGS
    } else {
        0
    }
}

fn run_render(path: &Path, format: RenderFormat, output: Option<&Path>) -> u8 {
    let model = match load(path) {
        Ok(model) => model,
        Err(e) => {
            report_load_error(path, &e);
            return EXIT_PARSE;
        }
    };
    let text = match format {
        RenderFormat::Dot => to_dot(&model),
        RenderFormat::Svg => render_svg(&model),
    };
    let written = match output {
        Some(out) => std::fs::write(out, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    match written {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("cannot write output: {e}");
            EXIT_FINDINGS
        }
    }
}

fn run_fmt(path: &Path, check: bool) -> u8 {
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            report_load_error(path, &LoadError::Read(e));
            return EXIT_PARSE;
        }
    };
    let model = match parse(&text) {
        Ok(model) => model,
        Err(errors) => {
            report_load_error(path, &LoadError::Dsl(errors));
            return EXIT_PARSE;
        }
    };
    let canonical = match format(&model) {
        Ok(canonical) => canonical,
        Err(FormatError::Structural(found)) => {
            for d in found {
                eprintln!("{}: {d}", path.display());
            }
            return EXIT_FINDINGS;
        }
    };
    if canonical == text {
        return 0;
    }
    if check {
        eprintln!("{}: not in canonical form", path.display());
        return EXIT_FINDINGS;
    }
    match std::fs::write(path, canonical) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}: cannot write: {e}", path.display());
            EXIT_FINDINGS
        }
    }
}

fn run_serve(config: ServerConfig) -> u8 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let runtime = match tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
    {
        Ok(runtime) => runtime,
        Err(e) => {
            eprintln!("cannot start runtime: {e}");
            return EXIT_FINDINGS;
        }
    };
    match runtime.block_on(qualibd_server::serve(config)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            EXIT_FINDINGS
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let code = match cli.command {
        Command::Validate {
            file,
            json,
            verbose,
        } => run_validate(&file, json, verbose),
        Command::Render {
            file,
            format,
            output,
        } => run_render(&file, format, output.as_deref()),
        Command::Fmt { file, check } => run_fmt(&file, check),
        Command::Serve {
            port,
            store,
            ui,
            bind,
        } => run_serve(ServerConfig {
            bind,
            port,
            store,
            ui,
        }),
    };
    ExitCode::from(code)
}
