//! Command-line entry point: compile SHACL profiles, extend them with
//! layers, lint extensions, validate instances, convert to RDF, generate
//! artifacts, and harvest remote catalogs.
//!
//! Exit codes: 0 success/conformant, 1 non-conformant or lint findings,
//! 2 usage error, 3 internal/IO error.

use anyhow::{bail, Context as _};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dcatkit::artifact::{gen_docs, gen_jsonschema, gen_shacl, to_pretty_json, ShapeIriPolicy};
use dcatkit::extend::{extend_with, lint_extension, resolve_layer};
use dcatkit::harvest::{harvest, load_source};
use dcatkit::ingest::{compile, parse_jsonld_with_context};
use dcatkit::instance::InstanceDocument;
use dcatkit::ir::SchemaIR;
use dcatkit::rdf::{materialize_super_properties, to_triples, write_ntriples, write_turtle};
use dcatkit::report::{Severity, ValidationReport};
use dcatkit::validate::validate;
use std::collections::BTreeMap;
use std::io::{IsTerminal, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "dcatkit", version, about = "Application-profile toolchain: SHACL in, validated metadata and artifacts out.")]
struct Cli {
    /// Print extra diagnostics to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    /// Disable colored report output.
    #[arg(long, global = true)]
    no_color: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compile a SHACL application profile (JSON-LD) into a profile IR.
    ImportShacl(ImportArgs),
    /// Apply extension layers to a compiled profile.
    Extend(ExtendArgs),
    /// Check an extension layer against the profile extension rules.
    Lint(LintArgs),
    /// Validate an instance document against a compiled profile.
    Validate(ValidateArgs),
    /// Convert a conformant instance document to RDF.
    Convert(ConvertArgs),
    /// Generate artifacts from a compiled profile.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Print a built-in extension layer as .layer.json.
    ExportLayer(ExportLayerArgs),
    /// Fetch records from a remote endpoint, validate, and export RDF.
    Harvest(HarvestArgs),
}

#[derive(Debug, Args)]
struct ImportArgs {
    /// Input .jsonld file, or `-` for stdin.
    input: String,
    /// Output .profile.json path.
    #[arg(short, long)]
    output: PathBuf,
    /// Profile id (defaults to the input file stem).
    #[arg(long)]
    id: Option<String>,
    /// JSON file with prefix bindings replacing a remote @context.
    #[arg(long)]
    context: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExtendArgs {
    /// Base .profile.json.
    base: PathBuf,
    /// Layer to apply: `plus`, `chem`, or a .layer.json path. Repeatable;
    /// applied left to right.
    #[arg(short, long = "layer", required = true)]
    layers: Vec<String>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct LintArgs {
    /// Base .profile.json.
    base: PathBuf,
    /// Layer to check: `plus`, `chem`, or a .layer.json path.
    #[arg(short, long)]
    layer: String,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Instance document (.yaml or .json).
    instance: PathBuf,
    #[arg(short, long)]
    profile: PathBuf,
    /// Root class the document claims to conform to.
    #[arg(short, long)]
    class: String,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    instance: PathBuf,
    #[arg(short, long)]
    profile: PathBuf,
    #[arg(short, long)]
    class: String,
    #[arg(short, long, value_enum, default_value_t = RdfFormat::Nt)]
    format: RdfFormat,
    /// Also emit triples for every super-slot along sub-slot chains.
    #[arg(long)]
    materialize_super: bool,
    /// Output file (stdout when absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// Regenerate SHACL shapes (Turtle) with explicit shape IRIs.
    Shacl {
        #[arg(short, long)]
        profile: PathBuf,
        /// Base IRI for generated shape identifiers.
        #[arg(long)]
        shape_base: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a draft 2020-12 JSON Schema for a root class.
    Jsonschema {
        #[arg(short, long)]
        profile: PathBuf,
        #[arg(short, long)]
        class: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate Markdown documentation.
    Docs {
        #[arg(short, long)]
        profile: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Args)]
struct ExportLayerArgs {
    /// `plus` or `chem`.
    layer: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct HarvestArgs {
    /// Source config YAML (name, url, profile, root_class, ...).
    #[arg(short, long)]
    source: PathBuf,
    /// Output directory for records, reports, graph and run summary.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RdfFormat {
    Nt,
    Ttl,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    match &cli.command {
        Command::ImportShacl(args) => import_shacl(cli, args),
        Command::Extend(args) => extend(cli, args),
        Command::Lint(args) => lint(cli, args),
        Command::Validate(args) => run_validate(cli, args),
        Command::Convert(args) => convert(cli, args),
        Command::Gen(args) => gen(args),
        Command::ExportLayer(args) => export_layer(args),
        Command::Harvest(args) => run_harvest(cli, args),
    }
}

fn load_profile(path: &Path) -> anyhow::Result<SchemaIR> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    SchemaIR::from_json(&bytes).with_context(|| format!("loading profile {}", path.display()))
}

fn write_or_stdout(output: Option<&PathBuf>, content: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => {
            std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

fn render_report(report: &ValidationReport, format: ReportFormat, color: bool) -> String {
    match format {
        ReportFormat::Json => {
            serde_json::to_string_pretty(report).expect("report renders") + "\n"
        }
        ReportFormat::Text => {
            if !color {
                return report.to_text();
            }
            let mut out = String::new();
            for f in &report.findings {
                let tag = match f.severity {
                    Severity::Error => "\x1b[31mERROR\x1b[0m",
                    Severity::Warning => "\x1b[33mWARNING\x1b[0m",
                };
                out.push_str(&format!("{tag} [{}] {}: {}\n", f.rule, f.path, f.message));
            }
            out.push_str(&format!("conformant: {}\n", report.conformant));
            out
        }
    }
}

fn use_color(cli: &Cli) -> bool {
    !cli.no_color && std::io::stdout().is_terminal()
}

fn import_shacl(cli: &Cli, args: &ImportArgs) -> anyhow::Result<ExitCode> {
    let bytes = if args.input == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf)?;
        buf
    } else {
        std::fs::read(&args.input).with_context(|| format!("reading {}", args.input))?
    };

    let overrides: BTreeMap<String, String> = match &args.context {
        Some(path) => {
            let text = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_slice(&text).context("context override must be a JSON object of prefix -> IRI")?
        }
        None => BTreeMap::new(),
    };

    let profile_id = args.id.clone().unwrap_or_else(|| {
        Path::new(&args.input)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "profile".to_string())
    });

    let shapes = parse_jsonld_with_context(&bytes, &overrides)?;
    let compiled = compile(&shapes, &profile_id)?;
    for finding in &compiled.report.findings {
        eprintln!("{finding}");
    }
    if cli.verbose > 0 {
        eprintln!(
            "compiled {}: {} classes, {} slots, {} datatypes",
            profile_id,
            compiled.ir.classes.len(),
            compiled.ir.slots.len(),
            compiled.ir.datatypes.len()
        );
    }
    std::fs::write(&args.output, compiled.ir.to_canonical_json())
        .with_context(|| format!("writing {}", args.output.display()))?;
    Ok(ExitCode::SUCCESS)
}

fn extend(cli: &Cli, args: &ExtendArgs) -> anyhow::Result<ExitCode> {
    let mut ir = load_profile(&args.base)?;
    for layer in &args.layers {
        ir = extend_with(&ir, layer).with_context(|| format!("applying layer {layer}"))?;
        if cli.verbose > 0 {
            eprintln!(
                "after {layer}: {} classes, {} slots",
                ir.classes.len(),
                ir.slots.len()
            );
        }
    }
    std::fs::write(&args.output, ir.to_canonical_json())
        .with_context(|| format!("writing {}", args.output.display()))?;
    Ok(ExitCode::SUCCESS)
}

fn lint(cli: &Cli, args: &LintArgs) -> anyhow::Result<ExitCode> {
    let base = load_profile(&args.base)?;
    let layer = resolve_layer(&args.layer)?;
    let report = lint_extension(&base, &layer)?;
    print!("{}", render_report(&report, args.format, use_color(cli)));
    Ok(if report.findings.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn load_instance(path: &Path, class: &str) -> anyhow::Result<InstanceDocument> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(InstanceDocument::parse(
        &text,
        class,
        path.display().to_string(),
    )?)
}

fn run_validate(cli: &Cli, args: &ValidateArgs) -> anyhow::Result<ExitCode> {
    let ir = load_profile(&args.profile)?;
    let doc = load_instance(&args.instance, &args.class)?;
    let report = validate(&doc, &ir)?;
    print!("{}", render_report(&report, args.format, use_color(cli)));
    Ok(if report.conformant {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn convert(cli: &Cli, args: &ConvertArgs) -> anyhow::Result<ExitCode> {
    let ir = load_profile(&args.profile)?;
    let doc = load_instance(&args.instance, &args.class)?;
    let report = validate(&doc, &ir)?;
    if !report.conformant {
        eprint!("{}", render_report(&report, ReportFormat::Text, false));
        return Ok(ExitCode::from(1));
    }
    let mut triples = to_triples(&doc, &ir).expect("conformant documents emit triples");
    if args.materialize_super {
        triples = materialize_super_properties(&triples, &ir);
    }
    let rendered = match args.format {
        RdfFormat::Nt => write_ntriples(&triples),
        RdfFormat::Ttl => write_turtle(&triples, &ir.prefix_map),
    };
    write_or_stdout(args.output.as_ref(), &rendered)?;
    if cli.verbose > 0 {
        eprintln!("{} triples", triples.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn gen(args: &GenCommand) -> anyhow::Result<ExitCode> {
    match args {
        GenCommand::Shacl {
            profile,
            shape_base,
            output,
        } => {
            let ir = load_profile(profile)?;
            let policy = match shape_base {
                Some(base) => ShapeIriPolicy::fragment(base.clone()),
                None => ShapeIriPolicy::default_for(&ir),
            };
            let turtle = gen_shacl(&ir, &policy)?;
            write_or_stdout(output.as_ref(), &turtle)?;
        }
        GenCommand::Jsonschema {
            profile,
            class,
            output,
        } => {
            let ir = load_profile(profile)?;
            let schema = gen_jsonschema(&ir, class)?;
            write_or_stdout(output.as_ref(), &to_pretty_json(&schema))?;
        }
        GenCommand::Docs { profile, out_dir } => {
            let ir = load_profile(profile)?;
            std::fs::create_dir_all(out_dir)?;
            for (filename, content) in gen_docs(&ir) {
                std::fs::write(out_dir.join(&filename), content)
                    .with_context(|| format!("writing {filename}"))?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn export_layer(args: &ExportLayerArgs) -> anyhow::Result<ExitCode> {
    let layer = match args.layer.as_str() {
        "plus" => dcatkit::extend::dcat_ap_plus(),
        "chem" => dcatkit::extend::chem_dcat_ap(),
        other => bail!("unknown built-in layer `{other}` (expected `plus` or `chem`)"),
    };
    write_or_stdout(args.output.as_ref(), &layer.to_json())?;
    Ok(ExitCode::SUCCESS)
}

fn run_harvest(cli: &Cli, args: &HarvestArgs) -> anyhow::Result<ExitCode> {
    let source = load_source(&args.source)?;
    std::fs::create_dir_all(&args.out)?;
    let run = harvest(&source, &args.out)?;
    if cli.verbose > 0 {
        for record in &run.records {
            eprintln!(
                "{}: {}",
                record.id,
                if record.conformant { "conformant" } else { "non-conformant" }
            );
        }
    }
    println!(
        "fetched={} conformant={} graph={}",
        run.fetched, run.conformant, run.graph_path
    );
    Ok(ExitCode::SUCCESS)
}
