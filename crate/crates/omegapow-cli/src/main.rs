use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use omegapow::crosscheck::crosscheck;
use omegapow::diagonal::{decode_g, encode_g, pair, phi_forward, phi_inverse, unpair, DiagonalPrefix, GParams, GridPoint, Markers};
use omegapow::eraser::{eval_approx, eval_tilde, in_l3, EvalResult};
use omegapow::letter::{format_word, parse_word, Letter, Word};
use omegapow::machine::{
    accepts, enumerate_accepted, materialize, parse_machine, serialize_machine, CounterSystem, SharedSystem,
};
use omegapow::omega::{
    factorizations, is_omega_power_prefix, replay_lasso, up_membership_bounded, up_membership_regular, Move, UPWord,
    UpVerdict,
};
use omegapow::oracle::LanguageOracle;
use omegapow::pi::{build_pn, p_base_dfa, pn_oracle, PipelineArtifact, PipelineError};
use omegapow::sigma::{build_sn, claim2_classify, has_one, sn_oracle, AInfinityCase};
use omegapow::suite::{run_suite, DEFAULT_SEED};

#[derive(Parser)]
#[command(name = "omegapow", version, about = "Counter automata and omega-power constructions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the one-counter machine for level n of the P pipeline.
    BuildPn(BuildArgs),
    /// Build the one-counter machine for level n of the S pipeline.
    BuildSn(BuildArgs),
    /// Decide membership of a word; exit 0 on accept, 1 on reject.
    Accept {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        word: String,
    },
    /// List accepted words up to a length.
    Enumerate {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        max_len: usize,
    },
    /// Compare a machine with the stagewise oracle of its level.
    Crosscheck {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        max_len: usize,
    },
    /// Evaluate backspaces in a word over letters and `BS`.
    Eraser {
        #[arg(long)]
        word: String,
    },
    /// Diagonal index of a grid point.
    Pair {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: u64,
    },
    /// Grid point of a diagonal index.
    Unpair {
        #[arg(long)]
        q: u64,
    },
    /// Geometric block coding of a word.
    EncodeG {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        word: String,
    },
    /// Invert the block coding; exit 1 outside its image.
    DecodeG {
        #[arg(long)]
        word: String,
    },
    /// Blocks to a binary word with `--block`, or back with `--word`.
    Phi {
        #[arg(long, default_value_t = 0)]
        l: u32,
        #[arg(long, conflicts_with = "block")]
        word: Option<String>,
        #[arg(long)]
        block: Vec<String>,
    },
    /// Factorizations of a word into members of P_n.
    Factorize {
        #[arg(long)]
        pn: usize,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 20)]
        limit: usize,
    },
    /// Membership of stem·period^ω in the ω-power of a language.
    Upword {
        #[arg(long, default_value = "")]
        stem: String,
        #[arg(long)]
        period: String,
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 16)]
        counter_cap: u32,
        #[arg(long, default_value_t = 256)]
        unroll_cap: usize,
    },
    /// Case analysis of a factorization into words over {0, 1, 2, 3}.
    Classify {
        #[arg(long = "factor", required = true)]
        factors: Vec<String>,
        /// Language of letter words: `any` or `has-one`.
        #[arg(long, default_value = "any")]
        lang: String,
    },
    /// Run the acceptance battery.
    Suite {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Comma-separated criterion ids; all by default.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// Also print timings to stderr.
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    n: usize,
    /// Write the explicit machine to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest explicit table `--out` will write.
    #[arg(long, default_value_t = 1_000_000)]
    budget: usize,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Machine file.
    #[arg(long)]
    machine: Option<PathBuf>,
    /// Level n of the P pipeline.
    #[arg(long)]
    pn: Option<usize>,
    /// Level n of the S pipeline.
    #[arg(long)]
    sn: Option<usize>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Malformed(_) => 3,
            CliError::Unsupported(_) => 4,
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> CliError {
        match e {
            PipelineError::Unsupported(m) => CliError::Unsupported(m),
            PipelineError::InvalidN(_) | PipelineError::AboveCap { .. } => CliError::Usage(e.to_string()),
            other => CliError::Malformed(other.to_string()),
        }
    }
}

type Outcome = Result<bool, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn load(source: &Source) -> Result<(SharedSystem, Option<LanguageOracle>), CliError> {
    if let Some(path) = &source.machine {
        let text = fs::read_to_string(path).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))?;
        let m = parse_machine(&text).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))?;
        return Ok((Arc::new(m), None));
    }
    if let Some(n) = source.pn {
        return Ok((build_pn(n)?.system, Some(pn_oracle(n)?)));
    }
    let n = source.sn.expect("clap requires one source");
    Ok((build_sn(n)?.system, Some(sn_oracle(n)?)))
}

fn word_in(sys: &dyn CounterSystem, text: &str) -> Result<Word, CliError> {
    let w = parse_word(text);
    if let Some(l) = w.iter().find(|l| !sys.alphabet().contains(l)) {
        return Err(CliError::Malformed(format!("letter {l} is not in the machine alphabet")));
    }
    Ok(w)
}

fn run(command: Command) -> Outcome {
    match command {
        Command::BuildPn(a) => build(build_pn(a.n)?, &a),
        Command::BuildSn(a) => build(build_sn(a.n)?, &a),
        Command::Accept { source, word } => {
            let (sys, _) = load(&source)?;
            let w = word_in(sys.as_ref(), &word)?;
            let yes = accepts(sys.as_ref(), &w).map_err(|e| CliError::Malformed(e.to_string()))?;
            println!("{}", if yes { "accept" } else { "reject" });
            Ok(yes)
        }
        Command::Enumerate { source, max_len } => {
            let (sys, _) = load(&source)?;
            let words = enumerate_accepted(sys.as_ref(), max_len);
            for w in &words {
                println!("{}", format_word(w));
            }
            println!("count={}", words.len());
            Ok(true)
        }
        Command::Crosscheck { source, max_len } => {
            let (sys, oracle) = load(&source)?;
            let oracle = oracle.ok_or_else(|| CliError::Usage("crosscheck needs --pn or --sn".into()))?;
            let report = crosscheck(sys.as_ref(), &oracle, max_len);
            println!("{report}");
            Ok(report.agrees())
        }
        Command::Eraser { word } => {
            let w = parse_word(&word);
            println!("tilde={}", format_word(&eval_tilde(&w)));
            match eval_approx(&w) {
                EvalResult::Word(x) => println!("approx={}", format_word(&x)),
                EvalResult::Underflow => println!("approx=underflow"),
            }
            let member = in_l3(&w);
            println!("l3={member}");
            Ok(true)
        }
        Command::Pair { n, p } => {
            println!("{}", pair(GridPoint::new(n, p)));
            Ok(true)
        }
        Command::Unpair { q } => {
            let g = unpair(q);
            println!("{} {}", g.n, g.p);
            Ok(true)
        }
        Command::EncodeG { n, l, word } => {
            let p = GParams::new(n, l).map_err(|e| CliError::Usage(e.to_string()))?;
            let w = encode_g(p, &parse_word(&word), Markers::standard())
                .map_err(|e| CliError::Unsupported(e.to_string()))?;
            println!("{}", format_word(&w));
            Ok(true)
        }
        Command::DecodeG { word } => match decode_g(&parse_word(&word), Markers::standard()) {
            Some((p, sigma)) => {
                println!("n={} l={} word={}", p.n, p.l, format_word(&sigma));
                Ok(true)
            }
            None => {
                println!("not a coding word");
                Ok(false)
            }
        },
        Command::Phi { l, word, block } => {
            if let Some(word) = word {
                let d = phi_inverse(l, &parse_word(&word)).map_err(|e| CliError::Malformed(e.to_string()))?;
                for b in &d.blocks {
                    println!("{}", format_word(b));
                }
            } else {
                let blocks = block.iter().map(|b| parse_word(b)).collect();
                let w = phi_forward(&DiagonalPrefix { l, blocks }).map_err(|e| CliError::Malformed(e.to_string()))?;
                println!("{}", format_word(&w));
            }
            Ok(true)
        }
        Command::Factorize { pn, word, limit } => {
            let oracle = pn_oracle(pn)?;
            let w = parse_word(&word);
            let fs = factorizations(&w, &oracle, limit);
            for f in &fs {
                let parts: Vec<String> = f.factors(&w).iter().map(|x| format_word(x)).collect();
                println!("{}", parts.join(" | "));
            }
            println!("count={}", fs.len());
            if pn <= 2 {
                let dfa = p_base_dfa(pn)?;
                let viable = oracle.with_prefix_viability(move |x| dfa.is_viable_prefix(x));
                println!("omega-power-prefix={}", is_omega_power_prefix(&w, &viable));
            }
            Ok(!fs.is_empty())
        }
        Command::Upword {
            stem,
            period,
            source,
            counter_cap,
            unroll_cap,
        } => {
            let x = UPWord::new(parse_word(&stem), parse_word(&period)).map_err(|e| CliError::Usage(e.to_string()))?;
            if let Some(n @ (1 | 2)) = source.pn {
                let yes = up_membership_regular(&x, &p_base_dfa(n)?);
                println!("verdict={}", if yes { "yes" } else { "no" });
                println!("method=exact");
                return Ok(yes);
            }
            let (sys, _) = load(&source)?;
            upword(&x, sys.as_ref(), counter_cap, unroll_cap)
        }
        Command::Classify { factors, lang } => {
            let l: &dyn Fn(&[Letter]) -> bool = match lang.as_str() {
                "any" => &|_| true,
                "has-one" => &has_one,
                other => return Err(CliError::Usage(format!("unknown language {other}"))),
            };
            let fs: Vec<Word> = factors.iter().map(|f| parse_word(f)).collect();
            match claim2_classify(&fs, l).map_err(|e| CliError::Malformed(e.to_string()))? {
                AInfinityCase::MuPower => println!("case=mu-power"),
                AInfinityCase::InK0 => println!("case=in-k0"),
                AInfinityCase::Shifted { t, i, n, v } => {
                    println!("case=shifted");
                    println!("t={}", format_word(&t));
                    println!("i={i} n={n}");
                    println!("v={}", format_word(&v));
                }
            }
            Ok(true)
        }
        Command::Suite { seed, only, timings } => {
            let report = run_suite(seed, &only);
            print!("{}", report.render());
            if timings {
                eprint!("{}", report.render_timings());
            }
            Ok(report.all_passed())
        }
    }
}

fn build(art: PipelineArtifact, a: &BuildArgs) -> Outcome {
    print!("{}", art.report());
    if let Some(path) = &a.out {
        let m = materialize(art.system.as_ref(), a.budget).map_err(|e| CliError::Unsupported(e.to_string()))?;
        fs::write(path, serialize_machine(&m)).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))?;
        println!("wrote {} states to {}", m.num_states(), path.display());
    }
    Ok(true)
}

fn show_move(sys: &dyn CounterSystem, mv: &Move) -> String {
    match mv {
        Move::Cut => "cut".to_owned(),
        Move::Step(e) => {
            let letter = e.letter.map_or("λ".to_owned(), |l| l.name().to_owned());
            let delta: Vec<String> = (0..sys.counters()).map(|m| e.delta.get(m).to_string()).collect();
            format!("read {letter} -> {} delta={}", sys.state_label(e.target), delta.join(","))
        }
    }
}

fn upword(x: &UPWord, sys: &dyn CounterSystem, counter_cap: u32, unroll_cap: usize) -> Outcome {
    match up_membership_bounded(x, sys, counter_cap, unroll_cap) {
        UpVerdict::Yes(lasso) => {
            println!("verdict=yes");
            println!("replays={}", replay_lasso(x, sys, &lasso));
            for mv in &lasso.stem {
                println!("stem {}", show_move(sys, mv));
            }
            for mv in &lasso.cycle {
                println!("cycle {}", show_move(sys, mv));
            }
            Ok(true)
        }
        UpVerdict::No => {
            println!("verdict=no");
            Ok(false)
        }
        UpVerdict::Unknown => {
            println!("verdict=unknown counter_cap={counter_cap} unroll_cap={unroll_cap}");
            Ok(false)
        }
    }
}
