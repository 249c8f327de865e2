//! Command-line front end: classification, invariants, delta thresholds,
//! dual-graph rendering, class generation and inclusion scans.
//!
//! Machine output (`--output machine`) is line-oriented `key=value` records
//! with every value printed as an exact token; identical invocations produce
//! byte-identical output. Human output may add decimal approximations,
//! always marked with `~`.
//!
//! Exit codes: 0 success; 2 invalid class or flags; 3 undecidable within the
//! refinement budget; 4 generator constraint violated.

use clap::{Parser, Subcommand};
use npival::*;
use num_bigint::BigInt;
use std::path::Path;

#[derive(Parser)]
#[command(name = "npival", version, about = "Exact NPI tests, dual graphs and generation for plane valuation discrete classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide NPI membership of a class in a surface context.
    Classify {
        /// Inline class "g; b1, b2, ..." or a file with one class per line.
        #[arg(long)]
        class: String,
        /// Surface context: p2 | special:<delta> | nonspecial:<delta>.
        #[arg(long)]
        surface: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u32,
        /// human | machine.
        #[arg(long, default_value = "human")]
        output: String,
    },
    /// Print the derived invariants (e, n, w, contact values, ratio).
    Invariants {
        #[arg(long)]
        class: String,
        #[arg(long, default_value = "human")]
        output: String,
    },
    /// Least special delta and greatest non-special delta containing the class.
    Thresholds {
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u32,
        #[arg(long, default_value = "human")]
        output: String,
    },
    /// Build and render the resolution dual graph.
    Graph {
        #[arg(long)]
        class: String,
        /// Certified tail digits kept for irrational classes.
        #[arg(long, default_value_t = 8)]
        truncate: usize,
        /// dot | ascii | text.
        #[arg(long, default_value = "text")]
        format: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u32,
    },
    /// Extend an NPI class by new exponents.
    Generate {
        #[arg(long)]
        class: String,
        #[arg(long)]
        surface: String,
        /// output1 | output2-irrational | output2-integer | chain.
        #[arg(long)]
        mode: String,
        /// Strategy tokens, e.g. single:8/3, denom:3, irrational:pi, max-tail.
        /// Repeat the flag to script a chain.
        #[arg(long)]
        strategy: Vec<String>,
        /// Integer tail for output2-integer: a number or "max".
        #[arg(long)]
        tail: Option<String>,
        /// Emission cap for enumeration streams.
        #[arg(long, default_value_t = 10)]
        limit: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u32,
        #[arg(long, default_value = "human")]
        output: String,
    },
    /// Check the inclusion laws over a finite class grid.
    Scan {
        #[arg(long, default_value_t = 2)]
        max_g: usize,
        #[arg(long, default_value_t = 20)]
        max_numerator: i64,
        #[arg(long, default_value_t = 5)]
        max_denominator: i64,
        #[arg(long, default_value_t = 0)]
        delta_min: u64,
        #[arg(long, default_value_t = 4)]
        delta_max: u64,
        /// Comma-separated constant tokens appended as irrational tails.
        #[arg(long)]
        irrational_tails: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u32,
        #[arg(long, default_value = "human")]
        output: String,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Undecidable { .. } | Error::UndecidableDigit { .. } => 3,
        Error::NotExtensible { .. } | Error::ChoiceRejected(_) => 4,
        _ => 2,
    }
}

fn fail(e: Error) -> ! {
    eprintln!("error: {e}");
    std::process::exit(exit_code(&e));
}

fn machine_mode(output: &str) -> bool {
    match output {
        "machine" => true,
        "human" => false,
        other => fail(Error::Parse(format!("unknown output mode {other:?}"))),
    }
}

/// `--class` accepts the inline syntax directly, or a path to a file holding
/// one class per line (blank lines and #-comments skipped).
fn load_classes(arg: &str) -> Result<Vec<DiscreteClass>> {
    match DiscreteClass::parse(arg) {
        Ok(t) => Ok(vec![t]),
        Err(inline_err) => {
            if Path::new(arg).is_file() {
                let text = std::fs::read_to_string(arg)
                    .map_err(|e| Error::Parse(format!("cannot read {arg:?}: {e}")))?;
                let mut out = Vec::new();
                for (i, line) in text.lines().enumerate() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    out.push(DiscreteClass::parse(line).map_err(|e| {
                        Error::Parse(format!("{arg}:{}: {e}", i + 1))
                    })?);
                }
                if out.is_empty() {
                    return Err(Error::Parse(format!("{arg:?} holds no classes")));
                }
                Ok(out)
            } else {
                Err(inline_err)
            }
        }
    }
}

fn approx(e: &ExtendedExponent) -> String {
    format!("~{:.6}", e.approx_f64())
}

fn tri(v: &TriBool) -> &'static str {
    match v {
        TriBool::True => "true",
        TriBool::False => "false",
        TriBool::Unknown(_) => "unknown",
    }
}

fn print_verdict(t: &DiscreteClass, v: &Verdict, machine: bool) {
    if machine {
        println!("class={t}");
        println!("context={}", v.context);
        println!("member={}", tri(&v.member));
        println!("strict={}", tri(&v.strict));
        println!("lhs={}", v.lhs);
        println!("rhs={}", v.rhs);
        println!("margin={}", v.margin);
    } else {
        let word = match (&v.member, &v.strict) {
            (TriBool::True, TriBool::True) => "member (strictly)".to_string(),
            (TriBool::True, _) => "member (boundary)".to_string(),
            (TriBool::False, _) => "not a member".to_string(),
            (TriBool::Unknown(w), _) => {
                format!("undecided at this budget (enclosure width {w})")
            }
        };
        println!("{t}  in  {}: {word}", v.context);
        println!("  lhs    = {} ({})", v.lhs, approx(&ExtendedExponent::Rational(v.lhs.clone())));
        println!("  rhs    = {} ({})", v.rhs, approx(&v.rhs));
        println!("  margin = {} ({})", v.margin, approx(&v.margin));
    }
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn run_classify(class: &str, surface: &str, budget: u32, output: &str) -> Result<()> {
    let machine = machine_mode(output);
    let ctx = SurfaceContext::parse(surface)?;
    let classes = load_classes(class)?;
    for (i, t) in classes.iter().enumerate() {
        if i > 0 {
            println!();
        }
        let v = classify(t, &ctx, budget)?;
        print_verdict(t, &v, machine);
    }
    Ok(())
}

fn run_invariants(class: &str, output: &str) -> Result<()> {
    let machine = machine_mode(output);
    let classes = load_classes(class)?;
    for (i, t) in classes.iter().enumerate() {
        if i > 0 {
            println!();
        }
        let data = contact_data(t);
        let ratio = normalized_ratio(t);
        if machine {
            println!("class={t}");
            println!("kind={}", t.kind());
            println!("g={}", t.g());
            println!("e={}", join(&data.e));
            println!("n={}", join(&data.n));
            println!("w={}", join(&data.w));
            println!("beta_bar={} {}", join(&data.beta_bar), data.beta_bar_last);
            println!("normalized_ratio={ratio}");
        } else {
            println!("{t} ({}, g = {})", t.kind(), t.g());
            println!("  e        = ({})", join(&data.e));
            println!("  n        = ({})", join(&data.n));
            println!("  w        = ({})", join(&data.w));
            println!("  beta_bar = ({} {})", join(&data.beta_bar), data.beta_bar_last);
            println!("  beta_bar_last / beta_bar_0^2 = {ratio} ({})", approx(&ratio));
        }
    }
    Ok(())
}

fn run_thresholds(class: &str, budget: u32, output: &str) -> Result<()> {
    let machine = machine_mode(output);
    let classes = load_classes(class)?;
    for (i, t) in classes.iter().enumerate() {
        if i > 0 {
            println!();
        }
        let dmin = special_min_delta(t, budget)?;
        let dmax = nonspecial_max_delta(t, budget)?;
        let dmax_tok = dmax.map(|d| d.to_string()).unwrap_or_else(|| "none".into());
        if machine {
            println!("class={t}");
            println!("special_min_delta={dmin}");
            println!("nonspecial_max_delta={dmax_tok}");
        } else {
            println!("{t}");
            println!("  NPI special for every delta >= {dmin}");
            match dmax_tok.as_str() {
                "none" => println!("  NPI non-special for no positive delta"),
                d => println!("  NPI non-special exactly for 1 <= delta <= {d}"),
            }
        }
    }
    Ok(())
}

fn run_graph(class: &str, truncate: usize, format: &str, budget: u32) -> Result<()> {
    let format = RenderFormat::parse(format)?;
    let classes = load_classes(class)?;
    for (i, t) in classes.iter().enumerate() {
        if i > 0 {
            println!();
        }
        let g = build(t, truncate, budget)?;
        print!("{}", g.render(format));
    }
    Ok(())
}

fn print_step(idx: usize, step: &ChainStep, machine: bool) {
    if machine {
        println!("step={}", idx + 1);
        println!("input={}", step.input);
        println!("context={}", step.context);
        if step.bound_is_tail {
            println!("C={}", step.bound);
        } else {
            println!("B={}", step.bound);
        }
        println!("chosen={}", step.chosen);
        println!("result={}", step.result);
    } else {
        let bound_name = if step.bound_is_tail { "C" } else { "B" };
        println!(
            "step {}: {} [{}]  {bound_name} = {}, chose {}  ->  {}",
            idx + 1,
            step.input,
            step.context,
            step.bound,
            step.chosen,
            step.result
        );
    }
}

#[allow(clippy::too_many_arguments)]
fn run_generate(
    class: &str,
    surface: &str,
    mode: &str,
    strategies: &[String],
    tail: Option<&str>,
    limit: usize,
    budget: u32,
    output: &str,
) -> Result<()> {
    let machine = machine_mode(output);
    let ctx = SurfaceContext::parse(surface)?;
    let classes = load_classes(class)?;
    let parsed: Vec<ChoiceStrategy> = strategies
        .iter()
        .map(|s| ChoiceStrategy::parse(s))
        .collect::<Result<_>>()?;

    for (i, t) in classes.iter().enumerate() {
        if i > 0 {
            println!();
        }
        match mode {
            "output1" => {
                let strategy = parsed.first().cloned().unwrap_or(
                    ChoiceStrategy::EnumerateByDenominator { max_denominator: None },
                );
                let line = check_input(t, &ctx)?;
                let produced = output1_stream(t, &ctx, &strategy, budget, limit)?;
                if machine {
                    println!("class={t}");
                    println!("context={ctx}");
                    println!("B={}", line.bound);
                    for c in &produced {
                        println!("result={c}");
                    }
                } else {
                    println!("{t} [{ctx}]  B = {}", line.bound);
                    for c in &produced {
                        println!("  -> {c}");
                    }
                }
            }
            "output2-irrational" => {
                let Some(ChoiceStrategy::Irrational(c)) = parsed.first() else {
                    return Err(Error::Parse(
                        "output2-irrational needs --strategy irrational:<constant>".into(),
                    ));
                };
                let line = check_input(t, &ctx)?;
                let got = output2_irrational(t, &ctx, c, budget)?;
                if machine {
                    println!("class={t}");
                    println!("context={ctx}");
                    println!("B={}", line.bound);
                    println!("chosen={c}");
                    println!("result={got}");
                } else {
                    println!("{t} [{ctx}]  B = {}, chose {c}  ->  {got}", line.bound);
                }
            }
            "output2-integer" => {
                let bound = output2_integer_bound(t, &ctx)?;
                let requested = match tail {
                    None | Some("max") => bound.max_tail.clone(),
                    Some(m) => m
                        .parse::<BigInt>()
                        .map_err(|_| Error::Parse(format!("bad tail {m:?}")))?,
                };
                let got = output2_integer(t, &ctx, &requested, budget)?;
                if machine {
                    println!("class={t}");
                    println!("context={ctx}");
                    println!("C={}", bound.c_bound);
                    println!("max_tail={}", bound.max_tail);
                    println!("chosen={requested}");
                    println!("result={got}");
                } else {
                    println!(
                        "{t} [{ctx}]  C = {}, max tail {}, chose {requested}  ->  {got}",
                        bound.c_bound, bound.max_tail
                    );
                }
            }
            "chain" => {
                if parsed.is_empty() {
                    return Err(Error::Parse("chain needs at least one --strategy".into()));
                }
                let outcome = chain(t, &ctx, &parsed, budget)?;
                for (idx, step) in outcome.steps.iter().enumerate() {
                    print_step(idx, step, machine);
                }
                if let Some(stop) = outcome.stopped {
                    if machine {
                        println!("stopped={stop}");
                    } else {
                        println!("stopped: {stop}");
                    }
                    // a stopped chain is a generator-constraint outcome
                    std::process::exit(4);
                }
            }
            other => return Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_scan(
    max_g: usize,
    max_numerator: i64,
    max_denominator: i64,
    delta_min: u64,
    delta_max: u64,
    irrational_tails: Option<&str>,
    budget: u32,
    output: &str,
) -> Result<()> {
    let machine = machine_mode(output);
    if delta_min > delta_max {
        return Err(Error::Parse("delta-min exceeds delta-max".into()));
    }
    let tails = match irrational_tails {
        None => Vec::new(),
        Some(toks) => toks
            .split(',')
            .map(npival::numeric::parse_constant)
            .collect::<Result<Vec<_>>>()?,
    };
    let spec = GridSpec {
        max_g,
        max_numerator,
        max_denominator,
        irrational_tails: tails,
    };
    let classes = spec.enumerate()?;
    let report = check_inclusions(&classes, delta_min, delta_max, budget)?;
    if machine {
        println!("classes={}", report.classes);
        println!("checks={}", report.checks);
        println!("violations={}", report.violations.len());
        println!("undecided={}", report.undecided);
        for v in &report.violations {
            println!("violation={} | {}", v.class, v.detail);
        }
    } else {
        println!(
            "scanned {} classes over delta in [{delta_min}, {delta_max}]: {} checks, {} violations, {} undecided",
            report.classes,
            report.checks,
            report.violations.len(),
            report.undecided
        );
        for v in &report.violations {
            println!("  VIOLATION {} : {}", v.class, v.detail);
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Classify { class, surface, budget, output } => {
            run_classify(class, surface, *budget, output)
        }
        Command::Invariants { class, output } => run_invariants(class, output),
        Command::Thresholds { class, budget, output } => run_thresholds(class, *budget, output),
        Command::Graph { class, truncate, format, budget } => {
            run_graph(class, *truncate, format, *budget)
        }
        Command::Generate { class, surface, mode, strategy, tail, limit, budget, output } => {
            run_generate(class, surface, mode, strategy, tail.as_deref(), *limit, *budget, output)
        }
        Command::Scan {
            max_g,
            max_numerator,
            max_denominator,
            delta_min,
            delta_max,
            irrational_tails,
            budget,
            output,
        } => run_scan(
            *max_g,
            *max_numerator,
            *max_denominator,
            *delta_min,
            *delta_max,
            irrational_tails.as_deref(),
            *budget,
            output,
        ),
    };
    if let Err(e) = result {
        fail(e);
    }
}
