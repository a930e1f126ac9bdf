//! Command-line front end. Every command prints a block of `key=value`
//! lines, a blank line, then its payload.
//!
//! Exit codes: 0 found (or success), 1 nonexistent, 2 unknown, 3 input error.

use std::ffi::OsString;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::constructors::{construct_with, Construction};
use crate::debruijn::{self, CycleKind, CyclicSeq};
use crate::pisystems::{self, PiSystem};
use crate::verifier::{self, LengthsSeq, Reading, SearchOptions, Verdict};
use crate::words::{fits, fmt_rational, is_free, parse_rational, shadow, LevelSet, Mode, Profile, Word};
use crate::{Error, Result};

pub const EXIT_FOUND: i32 = 0;
pub const EXIT_NONEXISTENT: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "fixfree", version, about = "Fix-free code construction and verification")]
pub struct Cli {
    /// Search node budget.
    #[arg(long, global = true, env = "FIXFREE_BUDGET", default_value_t = 10_000_000)]
    pub budget: u64,
    /// Recorded in the report; every command is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for search.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Payload of construct and verify.
    #[arg(long, global = true, value_enum, default_value_t = Format::Code)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Code,
    Profile,
}

/// Profile or code given inline, as a file path, or on stdin.
#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Inline text such as `q=2 alpha=0,1,2,4`, or a single file path.
    /// Reads stdin when empty.
    pub text: Vec<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a fix-free code fitting each profile.
    Construct(Input),
    /// Decide existence by exhaustive search, or check a given code.
    Verify {
        #[command(flatten)]
        input: Input,
        /// Code file to check against the profile instead of searching.
        #[arg(long)]
        check_witness: Option<String>,
    },
    /// A profile just above 3/4 with no fix-free code.
    Counterexample {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        eps: String,
    },
    /// The su and ne products and the madcor test for binary lengths.
    Sune {
        /// Comma-separated nondecreasing lengths.
        lengths: String,
        #[arg(long, value_enum, default_value_t = ReadingArg::Shifted)]
        reading: ReadingArg,
    },
    /// De Bruijn graph tools.
    #[command(subcommand)]
    Debruijn(DebruijnCmd),
    /// Build a pi-system, optionally extended to a profile.
    Pi {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Vertex count of the lower level; one-level system when absent.
        #[arg(long)]
        l: Option<u64>,
        /// Profile to extend the system to.
        #[arg(long)]
        extend: Option<String>,
    },
    /// Kraft sum of a profile or code.
    Kraft(Input),
    /// Shadow of a code at one level.
    Shadow {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        level: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Fix)]
        mode: ModeArg,
        /// Print the words outside the shadow instead.
        #[arg(long)]
        free: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum DebruijnCmd {
    /// Cycle of length `l` in B_q(n).
    Lempel {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: u64,
    },
    /// Two disjoint binary cycles of lengths `l` and `2^n - 1 - l`.
    Golomb {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: u64,
    },
    /// A k-regular subgraph of B_q(n) on `l` vertices.
    Regular {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: u64,
    },
    /// Classify a cyclic sequence in B_q(n).
    Check {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        seq: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReadingArg {
    Shifted,
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Prefix,
    Suffix,
    Fix,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let msg = e.to_string();
            let line = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("bad arguments");
            let _ = writeln!(err, "{line}");
            return EXIT_INPUT;
        }
    };
    match execute(&cli, stdin, out) {
        Ok(code) => code,
        // A reader that closed the pipe early is not an error worth reporting.
        Err(Error::Io(m)) if m == BROKEN_PIPE => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

const BROKEN_PIPE: &str = "broken pipe";

fn io(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::BrokenPipe {
        return Error::Io(BROKEN_PIPE.into());
    }
    Error::Io(e.to_string())
}

fn read_input(input: &Input, stdin: &mut dyn Read) -> Result<String> {
    match input.text.as_slice() {
        [] => {
            let mut s = String::new();
            stdin.read_to_string(&mut s).map_err(io)?;
            Ok(s)
        }
        [one] if !one.contains('=') => std::fs::read_to_string(one).map_err(|e| Error::Parse(format!("{one}: {e}"))),
        many => Ok(many.join(" ")),
    }
}

/// One profile per non-empty line; inline arguments form a single line.
fn read_profiles(input: &Input, stdin: &mut dyn Read) -> Result<Vec<Profile>> {
    let text = read_input(input, stdin)?;
    let ps = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(Profile::parse)
        .collect::<Result<Vec<_>>>()?;
    if ps.is_empty() {
        return Err(Error::Parse("no profile given".into()));
    }
    Ok(ps)
}

/// Code text, or `q=<int>` followed by words on one line.
fn parse_code(text: &str) -> Result<LevelSet> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    LevelSet::parse_code_text(&tokens.join("\n"))
}

fn report(out: &mut dyn Write, pairs: &[(&str, String)]) -> Result<()> {
    for (k, v) in pairs {
        writeln!(out, "{k}={v}").map_err(io)?;
    }
    writeln!(out).map_err(io)
}

fn payload(out: &mut dyn Write, s: &str) -> Result<()> {
    out.write_all(s.as_bytes()).map_err(io)?;
    if !s.is_empty() && !s.ends_with('\n') {
        writeln!(out).map_err(io)?;
    }
    Ok(())
}

fn code_payload(c: &LevelSet, format: Format) -> String {
    match format {
        Format::Code => c.to_code_text(),
        Format::Profile => format!("{}\n", c.profile()),
    }
}

fn search_opts(cli: &Cli) -> SearchOptions {
    SearchOptions {
        budget: cli.budget,
        jobs: cli.jobs.max(1),
        deterministic: true,
    }
}

fn execute(cli: &Cli, stdin: &mut dyn Read, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Construct(input) => {
            let mut worst = EXIT_FOUND;
            for p in read_profiles(input, stdin)? {
                let code = construct_one(cli, &p, out)?;
                worst = worst.max(code);
            }
            Ok(worst)
        }
        Command::Verify { input, check_witness } => {
            let ps = read_profiles(input, stdin)?;
            if let Some(path) = check_witness {
                let [p] = ps.as_slice() else {
                    return Err(Error::Parse("--check-witness takes exactly one profile".into()));
                };
                let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
                return check_witness_cmd(p, &LevelSet::parse_code_text(&text)?, out);
            }
            let mut worst = EXIT_FOUND;
            for p in ps {
                worst = worst.max(verify_one(cli, &p, out)?);
            }
            Ok(worst)
        }
        Command::Counterexample { q, eps } => {
            let eps = parse_rational(eps)?;
            let (p, cert) = verifier::counterexample(*q, &eps)?;
            report(
                out,
                &[
                    ("command", "counterexample".into()),
                    ("q", q.to_string()),
                    ("eps", fmt_rational(&eps)),
                    ("m", cert.m.to_string()),
                    ("alpha_m", cert.alpha_m.to_string()),
                    ("n", cert.n.to_string()),
                    ("alpha_n", cert.alpha_n.to_string()),
                    ("kraft", fmt_rational(&p.kraft_sum())),
                    ("shadow", cert.shadow.to_string()),
                    ("certificate", cert.to_string()),
                    ("holds", cert.holds().to_string()),
                ],
            )?;
            payload(out, &format!("{p}\n"))?;
            Ok(EXIT_FOUND)
        }
        Command::Sune { lengths, reading } => {
            let s = LengthsSeq::parse(lengths)?;
            let r = match reading {
                ReadingArg::Shifted => Reading::Shifted,
                ReadingArg::Literal => Reading::Literal,
            };
            report(
                out,
                &[
                    ("command", "sune".into()),
                    ("reading", r.name().into()),
                    ("chosen_reading", verifier::CHOSEN_READING.name().into()),
                    ("kraft", fmt_rational(&s.kraft_sum())),
                    ("su", fmt_rational(&verifier::su_with(&s, r))),
                    ("ne", fmt_rational(&verifier::ne_with(&s, r))),
                    ("madcor", verifier::madcor_check(&s).to_string()),
                ],
            )?;
            payload(out, &format!("{s}\n"))?;
            Ok(EXIT_FOUND)
        }
        Command::Debruijn(cmd) => debruijn_cmd(cmd, out),
        Command::Pi { q, n, k, l, extend } => {
            let pi: PiSystem = match l {
                None => pisystems::one_level_pi(*q, *n, *k)?,
                Some(l) => pisystems::two_level_pi(*q, *n, *k, *l)?,
            };
            let code = pi.code();
            let mut pairs = vec![
                ("command", "pi".to_string()),
                ("q", q.to_string()),
                ("n", n.to_string()),
                ("k", k.to_string()),
                ("words", code.len().to_string()),
                ("kraft", fmt_rational(&code.kraft_sum())),
                ("is_pi_system", pisystems::is_pi_system(&pi).to_string()),
            ];
            match extend {
                None => {
                    report(out, &pairs)?;
                    payload(out, &pi.to_text())?;
                }
                Some(t) => {
                    let target = Profile::parse(t)?;
                    let c = pisystems::pi_extend(&pi, &target)?;
                    pairs.push(("extended_to", target.to_string()));
                    report(out, &pairs)?;
                    payload(out, &code_payload(&c, cli.format))?;
                }
            }
            Ok(EXIT_FOUND)
        }
        Command::Kraft(input) => {
            let text = read_input(input, stdin)?;
            let trimmed = text.trim();
            let (what, sum) = if trimmed.contains("alpha=") {
                let p = Profile::parse(trimmed)?;
                (p.to_string(), p.kraft_sum())
            } else {
                let c = parse_code(trimmed)?;
                (c.profile().to_string(), c.kraft_sum())
            };
            report(out, &[("command", "kraft".into()), ("profile", what)])?;
            payload(out, &format!("{}\n", fmt_rational(&sum)))?;
            Ok(EXIT_FOUND)
        }
        Command::Shadow { input, level, mode, free } => {
            let c = parse_code(&read_input(input, stdin)?)?;
            let m = match mode {
                ModeArg::Prefix => Mode::Prefix,
                ModeArg::Suffix => Mode::Suffix,
                ModeArg::Fix => Mode::Fix,
            };
            let sh = shadow(&c, *level, m)?;
            let hit = sh.count_ones(..);
            report(
                out,
                &[
                    ("command", "shadow".into()),
                    ("q", c.q().to_string()),
                    ("level", level.to_string()),
                    ("shadow", hit.to_string()),
                    ("free", (sh.len() - hit).to_string()),
                ],
            )?;
            let mut s = String::new();
            for v in 0..sh.len() {
                if sh[v] != *free {
                    s.push_str(&Word::new(c.q(), *level, v as u64)?.to_string());
                    s.push('\n');
                }
            }
            payload(out, &s)?;
            Ok(EXIT_FOUND)
        }
    }
}

fn construct_one(cli: &Cli, p: &Profile, out: &mut dyn Write) -> Result<i32> {
    let mut pairs = vec![
        ("command", "construct".to_string()),
        ("profile", p.to_string()),
        ("kraft", fmt_rational(&p.kraft_sum())),
        ("seed", cli.seed.to_string()),
    ];
    match construct_with(p, &search_opts(cli)) {
        Construction::Found(r) => {
            pairs.push(("status", "found".into()));
            pairs.push(("builder", r.tag.name().into()));
            pairs.push(("words", r.code.len().to_string()));
            report(out, &pairs)?;
            payload(out, &code_payload(&r.code, cli.format))?;
            Ok(EXIT_FOUND)
        }
        Construction::Nonexistent { reason } => {
            pairs.push(("status", "nonexistent".into()));
            pairs.push(("reason", reason));
            report(out, &pairs)?;
            Ok(EXIT_NONEXISTENT)
        }
        Construction::Unknown { reason } => {
            pairs.push(("status", "unknown".into()));
            pairs.push(("reason", reason));
            report(out, &pairs)?;
            Ok(EXIT_UNKNOWN)
        }
    }
}

fn verify_one(cli: &Cli, p: &Profile, out: &mut dyn Write) -> Result<i32> {
    let r = verifier::search(p, &search_opts(cli));
    report(
        out,
        &[
            ("command", "verify".into()),
            ("profile", p.to_string()),
            ("kraft", fmt_rational(&p.kraft_sum())),
            ("verdict", r.verdict.to_string()),
            ("nodes", r.nodes.to_string()),
            ("budget", cli.budget.to_string()),
            ("jobs", cli.jobs.to_string()),
            ("seed", cli.seed.to_string()),
        ],
    )?;
    if let Some(w) = &r.witness {
        payload(out, &code_payload(w, cli.format))?;
    }
    Ok(match r.verdict {
        Verdict::Found => EXIT_FOUND,
        Verdict::Nonexistent => EXIT_NONEXISTENT,
        Verdict::Unknown => EXIT_UNKNOWN,
    })
}

fn check_witness_cmd(p: &Profile, c: &LevelSet, out: &mut dyn Write) -> Result<i32> {
    if c.q() != p.q() {
        return Err(Error::Parse(format!("code has q={}, profile has q={}", c.q(), p.q())));
    }
    let free = is_free(c, Mode::Fix);
    let fit = fits(c, p);
    report(
        out,
        &[
            ("command", "verify".into()),
            ("profile", p.to_string()),
            ("fix_free", free.to_string()),
            ("fits", fit.to_string()),
            ("witness", if free && fit { "valid" } else { "invalid" }.into()),
        ],
    )?;
    Ok(if free && fit { EXIT_FOUND } else { EXIT_NONEXISTENT })
}

fn debruijn_cmd(cmd: &DebruijnCmd, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        DebruijnCmd::Lempel { q, n, l } => {
            let w = debruijn::lempel_cycle(*q, *n, *l)?;
            report(
                out,
                &[("command", "debruijn lempel".into()), ("q", q.to_string()), ("n", n.to_string()), ("length", w.len().to_string())],
            )?;
            payload(out, &format!("{w}\n"))?;
        }
        DebruijnCmd::Golomb { n, l } => {
            let (a, b) = debruijn::golomb_split(*n, *l)?;
            report(
                out,
                &[
                    ("command", "debruijn golomb".into()),
                    ("n", n.to_string()),
                    ("lengths", format!("{},{}", a.len(), b.len())),
                ],
            )?;
            payload(out, &format!("{a}\n{b}\n"))?;
        }
        DebruijnCmd::Regular { q, n, k, l } => {
            let g = debruijn::k_regular_subgraph(*q, *n, *k, *l)?;
            let w = debruijn::euler_circuit(&g)?;
            report(
                out,
                &[
                    ("command", "debruijn regular".into()),
                    ("edges", g.len().to_string()),
                    ("vertices", g.vertices().len().to_string()),
                    ("sequence", w.to_string()),
                ],
            )?;
            payload(out, &g.to_text())?;
        }
        DebruijnCmd::Check { q, n, seq } => {
            let w = CyclicSeq::parse(*q, seq)?;
            let kind = match debruijn::cycle_check(&w, *n) {
                CycleKind::Cycle => "cycle",
                CycleKind::ClosedPath => "closed_path",
                CycleKind::Neither => "neither",
            };
            report(out, &[("command", "debruijn check".into()), ("length", w.len().to_string()), ("kind", kind.into())])?;
            payload(out, &format!("{w}\n"))?;
        }
    }
    Ok(EXIT_FOUND)
}
