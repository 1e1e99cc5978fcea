use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use coropt_cli::{
    bench_texts, gen, parse_bounding, parse_mode, read_instance_dir, run_solve,
    verify_instance, verify_random_batch, Format, VerifyOutcome,
};
use coropt_core::SolverConfig;

#[derive(Parser)]
#[command(name = "coropt", about = "Constraint optimizer with unsatisfiable-core search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SolveOpts {
    /// bb | basic | nested | nested-notify
    #[arg(long, default_value = "nested")]
    mode: String,
    /// std | disjoint | lp
    #[arg(long = "bound", default_value = "std")]
    bound: String,
    /// Wall-clock limit in seconds
    #[arg(long = "time-limit")]
    time_limit: Option<f64>,
    #[arg(long = "conflict-limit")]
    conflict_limit: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write solve statistics as JSON to this path
    #[arg(long)]
    stats: Option<PathBuf>,
    /// wcnf | cop | auto
    #[arg(long, default_value = "auto")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print MAXSAT-convention output
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Cross-check every mode/bounding combination against the oracle
    Verify {
        /// Instance file; omit when using --random
        instance: Option<PathBuf>,
        /// Verify this many seeded random instances instead of a file
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "auto")]
        format: String,
    },
    /// Run solver variants over a directory of instances
    Bench {
        #[arg(long)]
        dir: PathBuf,
        /// Comma-separated variants, e.g. "bb:std,nested-notify:disjoint"
        #[arg(long, default_value = "bb:std,basic:disjoint,nested:disjoint,nested-notify:std")]
        variants: String,
        #[arg(long = "time-limit")]
        time_limit: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report path (TSV); stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a seeded instance
    Gen {
        /// random | planted | cop
        #[arg(long, default_value = "random")]
        family: String,
        #[arg(long, default_value_t = 10)]
        vars: usize,
        /// Number of soft clauses / constraints
        #[arg(long, default_value_t = 20)]
        soft: usize,
        #[arg(long, default_value_t = 4)]
        hard: usize,
        #[arg(long, default_value_t = 3)]
        width: usize,
        #[arg(long = "weight-max", default_value_t = 8)]
        weight_max: u64,
        /// Planted family: softs the optimum must violate
        #[arg(long, default_value_t = 2)]
        violations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_format(s: &str) -> Result<Format, String> {
    match s {
        "wcnf" => Ok(Format::Wcnf),
        "cop" => Ok(Format::Cop),
        "auto" => Ok(Format::Auto),
        other => Err(format!("unknown format `{other}`")),
    }
}

fn solve_config(opts: &SolveOpts) -> Result<SolverConfig, String> {
    Ok(SolverConfig {
        mode: parse_mode(&opts.mode)?,
        bounding: parse_bounding(&opts.bound)?,
        time_limit: opts.time_limit,
        conflict_limit: opts.conflict_limit,
        seed: opts.seed,
        stats_sink: opts.stats.clone(),
        ..SolverConfig::default()
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Solve { instance, opts } => {
            let text = std::fs::read_to_string(&instance)
                .map_err(|e| format!("{}: {e}", instance.display()))?;
            let cfg = solve_config(&opts)?;
            let fmt = parse_format(&opts.format)?;
            let mut stdout = std::io::stdout();
            run_solve(&text, &instance.display().to_string(), fmt, &cfg, &mut stdout)
        }
        Command::Verify { instance, random, seed, format } => {
            if let Some(count) = random {
                let (ok, total, table) = verify_random_batch(count, seed);
                if ok == total {
                    println!("{ok}/{total} agree");
                    Ok(0)
                } else {
                    println!("{ok}/{total} agree");
                    print!("{table}");
                    Ok(1)
                }
            } else {
                let path = instance.ok_or("verify needs an instance or --random N")?;
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                let fmt = parse_format(&format)?;
                let p = coropt_cli::parse_instance(&text, fmt, &path.display().to_string())?;
                match verify_instance(&p, seed) {
                    VerifyOutcome::Agree(Some(c)) => {
                        println!("all 12 combinations agree: optimum {c}");
                        Ok(0)
                    }
                    VerifyOutcome::Agree(None) => {
                        println!("all 12 combinations agree: unsatisfiable");
                        Ok(0)
                    }
                    VerifyOutcome::Disagree(table) => {
                        print!("{table}");
                        Ok(1)
                    }
                    VerifyOutcome::CapExceeded => {
                        eprintln!("oracle enumeration cap exceeded");
                        Ok(2)
                    }
                }
            }
        }
        Command::Bench { dir, variants, time_limit, seed, out } => {
            let mut parsed = Vec::new();
            for v in variants.split(',') {
                let (m, b) = v
                    .split_once(':')
                    .ok_or_else(|| format!("variant `{v}` must be mode:bounding"))?;
                parsed.push((parse_mode(m)?, parse_bounding(b)?));
            }
            let instances = read_instance_dir(&dir).map_err(|e| e.to_string())?;
            let report = bench_texts(&instances, &parsed, time_limit, seed);
            let tsv = report.to_tsv();
            match out {
                Some(path) => std::fs::write(&path, tsv).map_err(|e| e.to_string())?,
                None => print!("{tsv}"),
            }
            Ok(0)
        }
        Command::Gen { family, vars, soft, hard, width, weight_max, violations, seed, out } => {
            let text = match family.as_str() {
                "random" => gen::random_wcnf_text(
                    &gen::RandomParams {
                        vars,
                        soft_clauses: soft,
                        hard_clauses: hard,
                        width,
                        weight_max,
                    },
                    seed,
                ),
                "planted" => gen::planted_wcnf_text(
                    &gen::PlantedParams {
                        vars,
                        soft_clauses: soft,
                        violations,
                        hard_clauses: hard,
                    },
                    seed,
                ),
                "cop" => gen::random_cop_text(
                    &gen::CopParams {
                        int_vars: vars.clamp(1, 6),
                        bool_vars: 2,
                        domain: 6,
                        soft_constraints: soft,
                        hard_constraints: hard,
                        weight_max,
                    },
                    seed,
                ),
                other => return Err(format!("unknown family `{other}`")),
            };
            match out {
                Some(path) => std::fs::write(&path, text).map_err(|e| e.to_string())?,
                None => print!("{text}"),
            }
            Ok(0)
        }
    }
}
