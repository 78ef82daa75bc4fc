//! Command-line driver: dispatches the searches, writes certificates, and
//! re-verifies existing certificates.
//!
//! Exit status: 0 = found/verified, 1 = exhausted/unresolved (a legitimate
//! bounded negative), 2 = input error or failed verification. A certificate
//! is written on status 0 and 1.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use hjset::cert::{
    Certificate, CheckRow, CsetTableRow, HomImageRow, InstanceRow, NumberWitness, PairRow,
    ProductRow, ResultObject, WordColor,
};
use hjset::hj::{self, HjNumberOutcome, LineOutcome};
use hjset::jset::{self, AdequateOutcome, Elem, JsetOutcome};
use hjset::lift::{
    self, CsetOutcome, Fs1Outcome, Lemma1Outcome, MatrixSpec, Thm16Outcome, Thm17Outcome,
    Thm3Outcome,
};
use hjset::textio;
use hjset::words::{Alphabet, Word};
use hjset::{Bounds, Error, Result};

const HOM_CHECK_BOUND: usize = 3;

#[derive(Parser)]
#[command(name = "hjset", version, about = "certificate-producing combinatorial searches")]
struct Cli {
    /// Certificate output path (written on exit status 0 and 1)
    #[arg(long, global = true, default_value = "hjset-cert.toml")]
    out: PathBuf,
    /// Worker threads (0 = library default); affects wall clock only
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest witness arity to try
    #[arg(long = "m-max", global = true)]
    m_max: Option<usize>,
    /// Largest sequence index to touch
    #[arg(long, global = true)]
    horizon: Option<usize>,
    /// Length cap for pool words
    #[arg(long = "pool-len", global = true)]
    pool_len: Option<usize>,
    /// Length cap for searched words
    #[arg(long = "word-len", global = true)]
    word_len: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hales-Jewett line searches
    Hj {
        #[command(subcommand)]
        cmd: HjCmd,
    },
    /// Bounded J-set witness searches
    Jset {
        #[command(subcommand)]
        cmd: JsetCmd,
    },
    /// Partial semigroup truncation queries
    Psg {
        #[command(subcommand)]
        cmd: PsgCmd,
    },
    /// Witness lifting and constrained variable-word searches
    Lift {
        #[command(subcommand)]
        cmd: LiftCmd,
    },
    /// Re-check a certificate without re-running its search
    Verify {
        #[arg(long)]
        cert: PathBuf,
    },
}

#[derive(Subcommand)]
enum HjCmd {
    /// Find the least monochromatic n-variable line of a coloring
    FindLine {
        #[arg(long)]
        k: usize,
        /// coloring file: one `word<TAB>color` per line
        #[arg(long)]
        colors: PathBuf,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Search for a line-free coloring by backtracking
    LineFree {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        c: u32,
        #[arg(long = "N")]
        len: usize,
    },
    /// Least N with no line-free coloring, up to a cap
    Number {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        c: u32,
        #[arg(long)]
        max: usize,
    },
}

#[derive(Subcommand)]
enum JsetCmd {
    /// Bounded witness search for a predicate against a sequence family
    Check {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        seqs: PathBuf,
        /// words | nat | psg
        #[arg(long, default_value = "words")]
        ambient: String,
        /// alphabet size for word ambients
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// truncation config for the psg ambient
        #[arg(long)]
        psg: Option<PathBuf>,
        /// sigma constraint elements, e.g. "H=[1]; H=[2]"
        #[arg(long = "l-elems")]
        l_elems: Option<String>,
    },
    /// Certify that S0 fails the bounded J-set condition in Sn ∪ S0
    RefuteS0 {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum PsgCmd {
    /// Bounded adequacy check of a truncation
    Adequacy {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 2)]
        bound: usize,
    },
    /// Common right-composability set of given elements
    Sigma {
        #[arg(long)]
        config: PathBuf,
        /// elements, e.g. "H=[1]; H=[2,3]"
        #[arg(long)]
        elems: String,
    },
}

#[derive(Args)]
struct AlphabetArg {
    /// alphabet size
    #[arg(long, default_value_t = 2)]
    k: usize,
}

#[derive(Subcommand)]
enum LiftCmd {
    /// Lift a J-set witness through identity-on-S0 homomorphisms
    Lemma1 {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        seqs: PathBuf,
        #[arg(long)]
        homs: PathBuf,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[command(flatten)]
        alphabet: AlphabetArg,
    },
    /// n-variable word with every instance in D
    Thm3 {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        alphabet: AlphabetArg,
        /// skip the cross-checking lift route
        #[arg(long)]
        no_lift_route: bool,
    },
    /// Variable word with instances in D and variable count in FS(x)
    Fs1 {
        #[arg(long)]
        pred: PathBuf,
        /// generator prefix, comma separated, e.g. 2,4
        #[arg(long)]
        x: String,
        #[command(flatten)]
        alphabet: AlphabetArg,
    },
    /// n-variable word with instances in D and pattern extraction in FP(y)
    Thm16 {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        n: usize,
        /// pattern variable count (k < n)
        #[arg(long)]
        k: usize,
        /// pattern words, one per line
        #[arg(long = "pattern-seq")]
        pattern_seq: PathBuf,
        /// alphabet size
        #[arg(long, default_value_t = 2)]
        alphabet: usize,
    },
    /// n-variable word with hom images in D and M psi(w) in FS prefixes
    Thm17 {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long = "fs-prefixes")]
        fs_prefixes: PathBuf,
        #[arg(long)]
        n: usize,
        /// S0-preserving homomorphisms; defaults to every substitution
        #[arg(long)]
        homs: Option<PathBuf>,
        /// counting homomorphisms; defaults to variable counters
        #[arg(long)]
        taus: Option<PathBuf>,
        #[command(flatten)]
        alphabet: AlphabetArg,
    },
    /// C-set product sequence with full verification table
    Cset {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        homs: PathBuf,
        #[arg(long)]
        len: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[command(flatten)]
        alphabet: AlphabetArg,
    },
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn resolve_bounds(cli: &Cli) -> Result<Bounds> {
    let mut bounds = Bounds::default();
    if let Ok(path) = std::env::var("HJSET_BOUNDS") {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::InvalidInput(format!("cannot read bounds file {path}: {e}")))?;
        bounds = textio::parse_bounds(&text, bounds)?;
    }
    if let Some(v) = cli.m_max {
        bounds.m_max = v;
    }
    if let Some(v) = cli.horizon {
        bounds.t_horizon = v;
    }
    if let Some(v) = cli.pool_len {
        bounds.pool_len = v;
    }
    if let Some(v) = cli.word_len {
        bounds.word_len = v;
    }
    if let Some(v) = cli.threads {
        bounds.threads = v;
    }
    Ok(bounds)
}

fn echo_bounds(input: &mut BTreeMap<String, String>, bounds: &Bounds) {
    input.insert("m-max".into(), bounds.m_max.to_string());
    input.insert("horizon".into(), bounds.t_horizon.to_string());
    input.insert("pool-len".into(), bounds.pool_len.to_string());
    input.insert("word-len".into(), bounds.word_len.to_string());
}

struct RunOutput {
    subcommand: String,
    input: BTreeMap<String, String>,
    result: ResultObject,
    verification: Vec<CheckRow>,
    summary: String,
    /// exit 0 (found/verified) or 1 (exhausted/unresolved)
    found: bool,
}

fn word_colors(alphabet: &Alphabet, coloring: &hj::Coloring) -> Vec<WordColor> {
    coloring
        .entries(alphabet)
        .into_iter()
        .map(|(w, c)| WordColor {
            word: alphabet.display_word(&w),
            color: c,
        })
        .collect()
}

fn instance_rows(alphabet: &Alphabet, rows: &[lift::InstanceCheck]) -> Vec<InstanceRow> {
    rows.iter()
        .map(|r| InstanceRow {
            tuple: alphabet.display_word(&r.tuple),
            instance: alphabet.display_word(&r.instance),
            verdict: r.verdict,
        })
        .collect()
}

fn run_hj(cmd: HjCmd) -> Result<RunOutput> {
    match cmd {
        HjCmd::FindLine { k, colors, n } => {
            let colors_text = read(&colors)?;
            let alphabet = Alphabet::new(k, n)?;
            let coloring = textio::parse_coloring(&colors_text, &alphabet)?;
            let mut input = BTreeMap::new();
            input.insert("k".into(), k.to_string());
            input.insert("nvars".into(), n.to_string());
            input.insert("n".into(), n.to_string());
            input.insert("colors".into(), colors_text);
            let outcome = hj::find_mono_line(&coloring, n)?;
            match outcome {
                LineOutcome::Found {
                    line,
                    roots_checked,
                } => {
                    hj::verify_line(&alphabet, &coloring, &line, n)?;
                    let points: Vec<WordColor> = line
                        .points
                        .iter()
                        .map(|p| WordColor {
                            word: alphabet.display_word(p),
                            color: line.color,
                        })
                        .collect();
                    let verification = points
                        .iter()
                        .map(|p| CheckRow {
                            claim: format!("point {} has color {}", p.word, p.color),
                            ok: true,
                        })
                        .collect();
                    let summary = format!(
                        "monochromatic line: root {} (color {}, {} roots checked)",
                        alphabet.display_word(&line.root),
                        line.color,
                        roots_checked
                    );
                    Ok(RunOutput {
                        subcommand: "hj find-line".into(),
                        input,
                        result: ResultObject::HjFindLine {
                            found: true,
                            n: n as u64,
                            root: Some(alphabet.display_word(&line.root)),
                            color: Some(line.color),
                            points,
                            roots_checked,
                        },
                        verification,
                        summary,
                        found: true,
                    })
                }
                LineOutcome::None { roots_checked } => Ok(RunOutput {
                    subcommand: "hj find-line".into(),
                    input,
                    result: ResultObject::HjFindLine {
                        found: false,
                        n: n as u64,
                        root: None,
                        color: None,
                        points: Vec::new(),
                        roots_checked,
                    },
                    verification: vec![CheckRow {
                        claim: format!("no monochromatic line among {roots_checked} roots"),
                        ok: true,
                    }],
                    summary: format!("no monochromatic line ({roots_checked} roots checked)"),
                    found: false,
                }),
            }
        }
        HjCmd::LineFree { k, c, len } => {
            let alphabet = Alphabet::new(k, 0)?;
            let mut input = BTreeMap::new();
            input.insert("k".into(), k.to_string());
            input.insert("nvars".into(), "0".into());
            input.insert("c".into(), c.to_string());
            input.insert("N".into(), len.to_string());
            let outcome = hj::search_line_free(k, c, len)?;
            match outcome.coloring {
                Some(coloring) => {
                    let checked = hj::verify_line_free(&alphabet, &coloring)?;
                    Ok(RunOutput {
                        subcommand: "hj line-free".into(),
                        input,
                        result: ResultObject::HjLineFree {
                            found: true,
                            coloring: word_colors(&alphabet, &coloring),
                            roots_total: checked,
                            nodes_visited: outcome.nodes_visited,
                        },
                        verification: vec![CheckRow {
                            claim: format!("all {checked} lines polychromatic"),
                            ok: true,
                        }],
                        summary: format!("line-free coloring found ({checked} lines checked)"),
                        found: true,
                    })
                }
                None => Ok(RunOutput {
                    subcommand: "hj line-free".into(),
                    input,
                    result: ResultObject::HjLineFree {
                        found: false,
                        coloring: Vec::new(),
                        roots_total: outcome.lines_count,
                        nodes_visited: outcome.nodes_visited,
                    },
                    verification: vec![CheckRow {
                        claim: "every coloring has a monochromatic line (search exhausted)"
                            .into(),
                        ok: true,
                    }],
                    summary: "no line-free coloring exists".into(),
                    found: false,
                }),
            }
        }
        HjCmd::Number { k, c, max } => {
            let alphabet = Alphabet::new(k, 0)?;
            let mut input = BTreeMap::new();
            input.insert("k".into(), k.to_string());
            input.insert("nvars".into(), "0".into());
            input.insert("c".into(), c.to_string());
            input.insert("max".into(), max.to_string());
            let outcome = hj::hj_number(k, c, max)?;
            let build = |witnesses: Vec<(usize, hj::Coloring)>,
                         cylinder: Vec<(usize, bool)>|
             -> Vec<NumberWitness> {
                witnesses
                    .into_iter()
                    .map(|(n, coloring)| NumberWitness {
                        n: n as u64,
                        coloring: word_colors(&alphabet, &coloring),
                        cylinder_line_free: cylinder
                            .iter()
                            .find(|&&(cn, _)| cn == n)
                            .map(|&(_, ok)| ok),
                    })
                    .collect()
            };
            match outcome {
                HjNumberOutcome::Found {
                    number,
                    witnesses,
                    cylinder_checks,
                } => {
                    let witnesses = build(witnesses, cylinder_checks);
                    let verification = witnesses
                        .iter()
                        .map(|w| CheckRow {
                            claim: format!("length {} admits a line-free coloring", w.n),
                            ok: true,
                        })
                        .chain(std::iter::once(CheckRow {
                            claim: format!("length {number} admits none"),
                            ok: true,
                        }))
                        .collect();
                    Ok(RunOutput {
                        subcommand: "hj number".into(),
                        input,
                        result: ResultObject::HjNumber {
                            resolved: true,
                            number: Some(number as u64),
                            max: max as u64,
                            witnesses,
                        },
                        verification,
                        summary: format!("HJ number: {number}"),
                        found: true,
                    })
                }
                HjNumberOutcome::Unresolved {
                    max: cap,
                    witnesses,
                    cylinder_checks,
                } => Ok(RunOutput {
                    subcommand: "hj number".into(),
                    input,
                    result: ResultObject::HjNumber {
                        resolved: false,
                        number: None,
                        max: cap as u64,
                        witnesses: build(witnesses, cylinder_checks),
                    },
                    verification: Vec::new(),
                    summary: format!("unresolved at {cap}"),
                    found: false,
                }),
            }
        }
    }
}

fn run_jset(cmd: JsetCmd, bounds: &Bounds) -> Result<RunOutput> {
    match cmd {
        JsetCmd::Check {
            pred,
            seqs,
            ambient,
            k,
            psg,
            l_elems,
        } => {
            let pred_text = read(&pred)?;
            let seqs_text = read(&seqs)?;
            let mut input = BTreeMap::new();
            input.insert("ambient".into(), ambient.clone());
            input.insert("pred".into(), pred_text.clone());
            input.insert("seqs".into(), seqs_text.clone());
            echo_bounds(&mut input, bounds);
            match ambient.as_str() {
                "words" => {
                    let alphabet = Alphabet::new(k, 0)?;
                    input.insert("k".into(), k.to_string());
                    input.insert("nvars".into(), "0".into());
                    let pred = textio::parse_predicate(&pred_text, Some(&alphabet))?;
                    let seqs = textio::parse_sequences(&seqs_text, Some(&alphabet))?;
                    let pool: Vec<Elem> = alphabet
                        .s0_words_upto(bounds.pool_len)
                        .into_iter()
                        .map(Elem::Word)
                        .collect();
                    let outcome =
                        jset::find_witness(&pred, &seqs, Some(&alphabet), &pool, bounds)?;
                    jset_check_output(input, outcome, Some(&alphabet))
                }
                "nat" => {
                    let pred = textio::parse_predicate(&pred_text, None)?;
                    let seqs = textio::parse_sequences(&seqs_text, None)?;
                    let pool: Vec<Elem> = (1..=bounds.t_horizon as u64).map(Elem::Nat).collect();
                    let outcome = jset::find_witness(&pred, &seqs, None, &pool, bounds)?;
                    jset_check_output(input, outcome, None)
                }
                "psg" => {
                    let psg_path = psg.ok_or_else(|| {
                        Error::InvalidInput("psg ambient needs --psg <config>".into())
                    })?;
                    let psg_text = read(&psg_path)?;
                    input.insert("psg".into(), psg_text.clone());
                    let (trunc, _) = textio::parse_psg_config(&psg_text)?;
                    let pred = textio::parse_predicate(&pred_text, None)?;
                    let seqs = textio::parse_psg_sequences(&seqs_text)?;
                    let l_ids = match &l_elems {
                        Some(text) => {
                            input.insert("l-elems".into(), text.clone());
                            textio::parse_elem_list(text, &trunc)?
                        }
                        None => Vec::new(),
                    };
                    let pool: Vec<usize> = (0..trunc.len()).collect();
                    let outcome =
                        jset::find_witness_adequate(&pred, &seqs, &l_ids, &trunc, &pool, bounds)?;
                    match outcome {
                        AdequateOutcome::Found(found) => {
                            let products: Vec<ProductRow> = found
                                .per_seq
                                .iter()
                                .map(|(seq, p, verdict)| ProductRow {
                                    seq: seq.clone(),
                                    product: trunc.display_elem(*p),
                                    verdict: *verdict,
                                })
                                .collect();
                            let verification = products
                                .iter()
                                .map(|p| CheckRow {
                                    claim: format!("product {} lands in the target set", p.product),
                                    ok: p.verdict,
                                })
                                .collect();
                            let summary =
                                format!("witness found: m={}, t={:?}", found.m, found.t);
                            Ok(RunOutput {
                                subcommand: "jset check".into(),
                                input,
                                result: ResultObject::JsetCheck {
                                    found: true,
                                    m: Some(found.m as u64),
                                    t: found.t.iter().map(|&x| x as u64).collect(),
                                    a: found
                                        .a
                                        .iter()
                                        .map(|&e| trunc.display_elem_short(e))
                                        .collect(),
                                    products,
                                    candidates: found.candidates_preceding,
                                },
                                verification,
                                summary,
                                found: true,
                            })
                        }
                        AdequateOutcome::Exhausted { candidates_checked } => Ok(RunOutput {
                            subcommand: "jset check".into(),
                            input,
                            result: ResultObject::JsetCheck {
                                found: false,
                                m: None,
                                t: Vec::new(),
                                a: Vec::new(),
                                products: Vec::new(),
                                candidates: candidates_checked,
                            },
                            verification: Vec::new(),
                            summary: format!(
                                "exhausted: {candidates_checked} candidates, no witness (bounded negative)"
                            ),
                            found: false,
                        }),
                    }
                }
                other => Err(Error::InvalidInput(format!("unknown ambient {other:?}"))),
            }
        }
        JsetCmd::RefuteS0 { n, k } => {
            let alphabet = Alphabet::new(k, n)?;
            let mut input = BTreeMap::new();
            input.insert("k".into(), k.to_string());
            input.insert("nvars".into(), n.to_string());
            input.insert("n".into(), n.to_string());
            echo_bounds(&mut input, bounds);
            let r = jset::refute_s0_jset(&alphabet, n, bounds)?;
            let ok = r.passing == 0;
            Ok(RunOutput {
                subcommand: "jset refute-s0".into(),
                input,
                result: ResultObject::JsetRefute {
                    n: r.n as u64,
                    pool_size: r.pool_size as u64,
                    candidates_checked: r.candidates_checked,
                    passing: r.passing,
                    structural_tag: r.structural_tag.to_string(),
                },
                verification: vec![CheckRow {
                    claim: format!(
                        "all {} candidate products contain a variable",
                        r.candidates_checked
                    ),
                    ok,
                }],
                summary: format!(
                    "refutation: {} candidates checked, {} landed in S0",
                    r.candidates_checked, r.passing
                ),
                found: ok,
            })
        }
    }
}

fn jset_check_output(
    input: BTreeMap<String, String>,
    outcome: JsetOutcome,
    alphabet: Option<&Alphabet>,
) -> Result<RunOutput> {
    match outcome {
        JsetOutcome::Found(found) => {
            let products: Vec<ProductRow> = found
                .per_seq
                .iter()
                .map(|row| ProductRow {
                    seq: row.seq.clone(),
                    product: row.product.display(alphabet),
                    verdict: row.verdict,
                })
                .collect();
            let verification = products
                .iter()
                .map(|p| CheckRow {
                    claim: format!("product {} satisfies the predicate", p.product),
                    ok: p.verdict,
                })
                .collect();
            let summary = format!(
                "witness found: m={}, t={:?}, a={:?}",
                found.witness.m,
                found.witness.t,
                found
                    .witness
                    .a
                    .iter()
                    .map(|e| e.display(alphabet))
                    .collect::<Vec<_>>()
            );
            Ok(RunOutput {
                subcommand: "jset check".into(),
                input,
                result: ResultObject::JsetCheck {
                    found: true,
                    m: Some(found.witness.m as u64),
                    t: found.witness.t.iter().map(|&x| x as u64).collect(),
                    a: found
                        .witness
                        .a
                        .iter()
                        .map(|e| e.display(alphabet))
                        .collect(),
                    products,
                    candidates: found.candidates_preceding,
                },
                verification,
                summary,
                found: true,
            })
        }
        JsetOutcome::Exhausted { candidates_checked } => Ok(RunOutput {
            subcommand: "jset check".into(),
            input,
            result: ResultObject::JsetCheck {
                found: false,
                m: None,
                t: Vec::new(),
                a: Vec::new(),
                products: Vec::new(),
                candidates: candidates_checked,
            },
            verification: Vec::new(),
            summary: format!(
                "exhausted: {candidates_checked} candidates, no witness (bounded negative)"
            ),
            found: false,
        }),
    }
}

fn run_psg(cmd: PsgCmd) -> Result<RunOutput> {
    match cmd {
        PsgCmd::Adequacy { config, bound } => {
            let config_text = read(&config)?;
            let (trunc, _) = textio::parse_psg_config(&config_text)?;
            let mut input = BTreeMap::new();
            input.insert("psg".into(), config_text);
            input.insert("bound".into(), bound.to_string());
            let report = trunc.is_adequate(bound)?;
            let failing: Vec<String> = report
                .failing
                .clone()
                .unwrap_or_default()
                .iter()
                .map(|&e| trunc.display_elem(e))
                .collect();
            let summary = if report.adequate {
                format!(
                    "adequate within bound {bound} ({} subsets checked)",
                    report.subsets_checked
                )
            } else if report.horizon_exhaustion {
                format!("sigma empties at {failing:?} (horizon exhaustion, not genuine inadequacy)")
            } else {
                format!("inadequate: sigma empty at {failing:?}")
            };
            Ok(RunOutput {
                subcommand: "psg adequacy".into(),
                input,
                result: ResultObject::PsgAdequacy {
                    adequate: report.adequate,
                    failing,
                    horizon_exhaustion: report.horizon_exhaustion,
                    subsets_checked: report.subsets_checked,
                },
                verification: vec![CheckRow {
                    claim: format!("{} subsets scanned", report.subsets_checked),
                    ok: true,
                }],
                summary,
                found: report.adequate,
            })
        }
        PsgCmd::Sigma { config, elems } => {
            let config_text = read(&config)?;
            let (trunc, _) = textio::parse_psg_config(&config_text)?;
            let ids = textio::parse_elem_list(&elems, &trunc)?;
            let mut input = BTreeMap::new();
            input.insert("psg".into(), config_text);
            let sigma = trunc.sigma(&ids)?;
            let summary = format!("sigma has {} element(s)", sigma.len());
            Ok(RunOutput {
                subcommand: "psg sigma".into(),
                input,
                result: ResultObject::PsgSigma {
                    elems: ids.iter().map(|&e| trunc.display_elem_short(e)).collect(),
                    sigma: sigma.iter().map(|&e| trunc.display_elem(e)).collect(),
                },
                verification: vec![CheckRow {
                    claim: format!("sigma computed over {} elements", trunc.len()),
                    ok: true,
                }],
                summary,
                found: true,
            })
        }
    }
}

fn run_lift(cmd: LiftCmd, bounds: &Bounds) -> Result<RunOutput> {
    match cmd {
        LiftCmd::Lemma1 {
            pred,
            seqs,
            homs,
            n,
            alphabet,
        } => {
            let alphabet = Alphabet::new(alphabet.k, n)?;
            let pred_text = read(&pred)?;
            let seqs_text = read(&seqs)?;
            let homs_text = read(&homs)?;
            let mut input = BTreeMap::new();
            input.insert("k".into(), alphabet.k().to_string());
            input.insert("nvars".into(), n.to_string());
            input.insert("n".into(), n.to_string());
            input.insert("pred".into(), pred_text.clone());
            input.insert("seqs".into(), seqs_text.clone());
            input.insert("homs".into(), homs_text.clone());
            echo_bounds(&mut input, bounds);
            let pred = textio::parse_predicate(&pred_text, Some(&alphabet))?;
            let seqs = textio::parse_sequences(&seqs_text, Some(&alphabet))?;
            let hom_list = textio::parse_homs(&homs_text, &alphabet)?;
            let outcome = lift::lemma1_lift(
                &alphabet,
                n,
                &seqs,
                &hom_list,
                &pred,
                bounds,
                HOM_CHECK_BOUND,
            )?;
            match outcome {
                Lemma1Outcome::Found(found) => {
                    let pairs: Vec<PairRow> = found
                        .pair_checks
                        .iter()
                        .map(|p| PairRow {
                            seq: p.seq.clone(),
                            hom: p.hom.clone(),
                            product: alphabet.display_word(&p.product),
                            image: alphabet.display_word(&p.image),
                            verdict: p.verdict,
                        })
                        .collect();
                    let verification = pairs
                        .iter()
                        .map(|p| CheckRow {
                            claim: format!("{} maps {} into D", p.hom, p.product),
                            ok: p.verdict,
                        })
                        .collect();
                    let summary = format!(
                        "lifted witness: m={}, t={:?} ({} pair checks)",
                        found.witness.m,
                        found.witness.t,
                        found.pair_checks.len()
                    );
                    Ok(RunOutput {
                        subcommand: "lift lemma1".into(),
                        input,
                        result: ResultObject::LiftLemma1 {
                            found: true,
                            m: Some(found.witness.m as u64),
                            t: found.witness.t.iter().map(|&x| x as u64).collect(),
                            a: found
                                .witness
                                .a
                                .iter()
                                .map(|e| e.display(Some(&alphabet)))
                                .collect(),
                            inner_witness_equal: found.witness == found.inner.witness,
                            pairs,
                            g_family: Vec::new(),
                            candidates: found.inner.candidates_preceding,
                        },
                        verification,
                        summary,
                        found: true,
                    })
                }
                Lemma1Outcome::Exhausted {
                    g_family,
                    candidates_checked,
                } => Ok(RunOutput {
                    subcommand: "lift lemma1".into(),
                    input,
                    result: ResultObject::LiftLemma1 {
                        found: false,
                        m: None,
                        t: Vec::new(),
                        a: Vec::new(),
                        inner_witness_equal: false,
                        pairs: Vec::new(),
                        g_family,
                        candidates: candidates_checked,
                    },
                    verification: Vec::new(),
                    summary: format!(
                        "inner search exhausted after {candidates_checked} candidates"
                    ),
                    found: false,
                }),
            }
        }
        LiftCmd::Thm3 {
            pred,
            n,
            alphabet,
            no_lift_route,
        } => {
            let alphabet = Alphabet::new(alphabet.k, n)?;
            let pred_text = read(&pred)?;
            let mut input = BTreeMap::new();
            input.insert("k".into(), alphabet.k().to_string());
            input.insert("nvars".into(), n.to_string());
            input.insert("n".into(), n.to_string());
            input.insert("pred".into(), pred_text.clone());
            echo_bounds(&mut input, bounds);
            let pred = textio::parse_predicate(&pred_text, Some(&alphabet))?;
            let outcome = lift::theorem3_find(&pred, n, &alphabet, bounds, !no_lift_route)?;
            match outcome {
                Thm3Outcome::Found(found) => {
                    let instances = instance_rows(&alphabet, &found.instances);
                    let verification = instances
                        .iter()
                        .map(|i| CheckRow {
                            claim: format!("instance {} lies in D", i.instance),
                            ok: i.verdict,
                        })
                        .collect();
                    let summary = format!(
                        "word {} ({} instances verified)",
                        alphabet.display_word(&found.word),
                        instances.len()
                    );
                    Ok(RunOutput {
                        subcommand: "lift thm3".into(),
                        input,
                        result: ResultObject::LiftThm3 {
                            found: true,
                            word: Some(alphabet.display_word(&found.word)),
                            instances,
                            words_scanned: found.words_scanned,
                            lift_word: found
                                .lift_word
                                .as_ref()
                                .map(|w| alphabet.display_word(w)),
                            routes_agree: found.routes_agree,
                        },
                        verification,
                        summary,
                        found: true,
                    })
                }
                Thm3Outcome::Exhausted { words_scanned } => Ok(RunOutput {
                    subcommand: "lift thm3".into(),
                    input,
                    result: ResultObject::LiftThm3 {
                        found: false,
                        word: None,
                        instances: Vec::new(),
                        words_scanned,
                        lift_word: None,
                        routes_agree: None,
                    },
                    verification: Vec::new(),
                    summary: format!("exhausted after {words_scanned} words"),
                    found: false,
                }),
            }
        }
        LiftCmd::Fs1 { pred, x, alphabet } => {
            let alphabet = Alphabet::new(alphabet.k, 1)?;
            let pred_text = read(&pred)?;
            let gens: Result<Vec<u64>> = x
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| Error::InvalidInput(format!("bad generator {s:?}")))
                })
                .collect();
            let gens = gens?;
            let mut input = BTreeMap::new();
            input.insert("k".into(), alphabet.k().to_string());
            input.insert("nvars".into(), "1".into());
            input.insert("pred".into(), pred_text.clone());
            input.insert(
                "x".into(),
                gens.iter()
                    .map(|g| g.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            echo_bounds(&mut input, bounds);
            let pred = textio::parse_predicate(&pred_text, Some(&alphabet))?;
            let outcome = lift::fs_constrained_find(&pred, &gens, &alphabet, bounds)?;
            match outcome {
                Fs1Outcome::Found(found) => {
                    let instances = instance_rows(&alphabet, &found.instances);
                    let mut verification: Vec<CheckRow> = instances
                        .iter()
                        .map(|i| CheckRow {
                            claim: format!("instance {} lies in D", i.instance),
                            ok: i.verdict,
                        })
                        .collect();
                    verification.push(CheckRow {
                        claim: format!(
                            "variable count {} is the FS sum over indices {:?}",
                            found.tau, found.fs_indices
                        ),
                        ok: true,
                    });
                    let summary = format!(
                        "word {} with variable count {} in FS",
                        alphabet.display_word(&found.word),
                        found.tau
                    );
                    Ok(RunOutput {
                        subcommand: "lift fs1".into(),
                        input,
                        result: ResultObject::LiftFs1 {
                            found: true,
                            word: Some(alphabet.display_word(&found.word)),
                            tau: Some(found.tau),
                            fs_indices: found.fs_indices.iter().map(|&i| i as u64).collect(),
                            instances,
                            words_scanned: found.words_scanned,
                        },
                        verification,
                        summary,
                        found: true,
                    })
                }
                Fs1Outcome::Exhausted { words_scanned } => Ok(RunOutput {
                    subcommand: "lift fs1".into(),
                    input,
                    result: ResultObject::LiftFs1 {
                        found: false,
                        word: None,
                        tau: None,
                        fs_indices: Vec::new(),
                        instances: Vec::new(),
                        words_scanned,
                    },
                    verification: Vec::new(),
                    summary: format!("exhausted after {words_scanned} words"),
                    found: false,
                }),
            }
        }
        LiftCmd::Thm16 {
            pred,
            n,
            k,
            pattern_seq,
            alphabet: alphabet_k,
        } => {
            let alphabet = Alphabet::new(alphabet_k, n)?;
            let pred_text = read(&pred)?;
            let pattern_text = read(&pattern_seq)?;
            let pattern: Result<Vec<Word>> = pattern_text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(|l| alphabet.parse_word(l))
                .collect();
            let pattern = pattern?;
            let mut input = BTreeMap::new();
            input.insert("k".into(), alphabet.k().to_string());
            input.insert("nvars".into(), n.to_string());
            input.insert("n".into(), n.to_string());
            input.insert("kvars".into(), k.to_string());
            input.insert("pred".into(), pred_text.clone());
            input.insert("pattern-seq".into(), pattern_text.clone());
            echo_bounds(&mut input, bounds);
            let pred = textio::parse_predicate(&pred_text, Some(&alphabet))?;
            let outcome = lift::theorem16_find(&pred, n, k, &pattern, &alphabet, bounds)?;
            match outcome {
                Thm16Outcome::Found(found) => {
                    let instances = instance_rows(&alphabet, &found.instances);
                    let mut verification: Vec<CheckRow> = instances
                        .iter()
                        .map(|i| CheckRow {
                            claim: format!("instance {} lies in D", i.instance),
                            ok: i.verdict,
                        })
                        .collect();
                    verification.push(CheckRow {
                        claim: format!(
                            "extraction {} is the FP product over indices {:?}",
                            alphabet.display_word(&found.extract),
                            found.fp_indices
                        ),
                        ok: true,
                    });
                    let summary = format!(
                        "word {} with extraction {}",
                        alphabet.display_word(&found.word),
                        alphabet.display_word(&found.extract)
                    );
                    Ok(RunOutput {
                        subcommand: "lift thm16".into(),
                        input,
                        result: ResultObject::LiftThm16 {
                            found: true,
                            word: Some(alphabet.display_word(&found.word)),
                            extract: Some(alphabet.display_word(&found.extract)),
                            fp_indices: found.fp_indices.iter().map(|&i| i as u64).collect(),
                            instances,
                            words_scanned: found.words_scanned,
                        },
                        verification,
                        summary,
                        found: true,
                    })
                }
                Thm16Outcome::Exhausted { words_scanned } => Ok(RunOutput {
                    subcommand: "lift thm16".into(),
                    input,
                    result: ResultObject::LiftThm16 {
                        found: false,
                        word: None,
                        extract: None,
                        fp_indices: Vec::new(),
                        instances: Vec::new(),
                        words_scanned,
                    },
                    verification: Vec::new(),
                    summary: format!("exhausted after {words_scanned} words"),
                    found: false,
                }),
            }
        }
        LiftCmd::Thm17 {
            pred,
            matrix,
            fs_prefixes,
            n,
            homs,
            taus,
            alphabet,
        } => {
            let alphabet = Alphabet::new(alphabet.k, n)?;
            let pred_text = read(&pred)?;
            let matrix_text = read(&matrix)?;
            let prefixes_text = read(&fs_prefixes)?;
            let (rows, cols, entries) = textio::parse_matrix(&matrix_text)?;
            let matrix_spec = MatrixSpec::new(rows, cols, entries)?;
            let prefixes = textio::parse_fs_prefixes(&prefixes_text)?;

            let homs_text = match &homs {
                Some(path) => read(path)?,
                None => default_substitution_homs(&alphabet, n),
            };
            let taus_text = match &taus {
                Some(path) => read(path)?,
                None => (1..=cols)
                    .map(|i| format!("(var-count {i})\n"))
                    .collect::<String>(),
            };
            let mut input = BTreeMap::new();
            input.insert("k".into(), alphabet.k().to_string());
            input.insert("nvars".into(), n.to_string());
            input.insert("n".into(), n.to_string());
            input.insert("pred".into(), pred_text.clone());
            input.insert("matrix".into(), matrix_text.clone());
            input.insert("fs-prefixes".into(), prefixes_text.clone());
            input.insert("homs".into(), homs_text.clone());
            input.insert("taus".into(), taus_text.clone());
            echo_bounds(&mut input, bounds);
            let pred = textio::parse_predicate(&pred_text, Some(&alphabet))?;
            let hom_list = textio::parse_homs(&homs_text, &alphabet)?;
            let tau_list = textio::parse_homs(&taus_text, &alphabet)?;
            let outcome = lift::theorem17_find(
                &pred,
                &hom_list,
                &matrix_spec,
                &tau_list,
                &prefixes,
                n,
                &alphabet,
                bounds,
                HOM_CHECK_BOUND,
            )?;
            match outcome {
                Thm17Outcome::Found(found) => {
                    let hom_checks: Vec<HomImageRow> = found
                        .hom_checks
                        .iter()
                        .map(|(hom, img, verdict)| HomImageRow {
                            hom: hom.clone(),
                            image: alphabet.display_word(img),
                            verdict: *verdict,
                        })
                        .collect();
                    let mut verification: Vec<CheckRow> = hom_checks
                        .iter()
                        .map(|h| CheckRow {
                            claim: format!("{} image {} lies in D", h.hom, h.image),
                            ok: h.verdict,
                        })
                        .collect();
                    verification.push(CheckRow {
                        claim: format!(
                            "M psi(w) = {:?} lands coordinatewise in the FS prefixes",
                            found.m_psi
                        ),
                        ok: true,
                    });
                    let summary = format!(
                        "word {} with M psi = {:?}",
                        alphabet.display_word(&found.word),
                        found.m_psi
                    );
                    Ok(RunOutput {
                        subcommand: "lift thm17".into(),
                        input,
                        result: ResultObject::LiftThm17 {
                            found: true,
                            word: Some(alphabet.display_word(&found.word)),
                            psi: found.psi.clone(),
                            m_psi: found.m_psi.clone(),
                            coord_witnesses: found
                                .coord_witnesses
                                .iter()
                                .map(|w| w.iter().map(|&i| i as u64).collect())
                                .collect(),
                            hom_checks,
                            words_scanned: found.words_scanned,
                        },
                        verification,
                        summary,
                        found: true,
                    })
                }
                Thm17Outcome::Exhausted { words_scanned } => Ok(RunOutput {
                    subcommand: "lift thm17".into(),
                    input,
                    result: ResultObject::LiftThm17 {
                        found: false,
                        word: None,
                        psi: Vec::new(),
                        m_psi: Vec::new(),
                        coord_witnesses: Vec::new(),
                        hom_checks: Vec::new(),
                        words_scanned,
                    },
                    verification: Vec::new(),
                    summary: format!("exhausted after {words_scanned} words"),
                    found: false,
                }),
            }
        }
        LiftCmd::Cset {
            structure,
            homs,
            len,
            n,
            alphabet,
        } => {
            let alphabet = Alphabet::new(alphabet.k, n)?;
            let structure_text = read(&structure)?;
            let homs_text = read(&homs)?;
            let mut input = BTreeMap::new();
            input.insert("k".into(), alphabet.k().to_string());
            input.insert("nvars".into(), n.to_string());
            input.insert("n".into(), n.to_string());
            input.insert("structure".into(), structure_text.clone());
            input.insert("homs".into(), homs_text.clone());
            input.insert("len".into(), len.to_string());
            echo_bounds(&mut input, bounds);
            let cs = textio::parse_cset_structure(&structure_text, &alphabet)?;
            let hom_list = textio::parse_homs(&homs_text, &alphabet)?;
            let outcome =
                lift::cset_sequence(&cs, &hom_list, len, n, &alphabet, bounds, HOM_CHECK_BOUND)?;
            cset_output(input, outcome, &alphabet)
        }
    }
}

fn default_substitution_homs(alphabet: &Alphabet, n: usize) -> String {
    let letters: Vec<char> = (0..alphabet.k())
        .map(|i| alphabet.letter_char(i as u16).unwrap())
        .collect();
    let mut out = String::new();
    let mut digits = vec![0usize; n];
    loop {
        let tuple: String = digits.iter().map(|&d| letters[d]).collect();
        out.push_str(&format!("(subst \"{tuple}\")\n"));
        let mut i = n;
        let mut done = false;
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < letters.len() {
                break;
            }
            digits[i] = 0;
        }
        if done {
            break;
        }
    }
    out
}

fn cset_output(
    input: BTreeMap<String, String>,
    outcome: CsetOutcome,
    alphabet: &Alphabet,
) -> Result<RunOutput> {
    let table: Vec<CsetTableRow> = outcome
        .table
        .iter()
        .map(|row| CsetTableRow {
            h: row.h.iter().map(|&x| x as u64).collect(),
            phi: row.phi.iter().map(|&x| x as u64).collect(),
            product: alphabet.display_word(&row.product),
            verdict: row.verdict,
        })
        .collect();
    let verification = table
        .iter()
        .map(|row| CheckRow {
            claim: format!("product {} over H={:?} lies in D_1", row.product, row.h),
            ok: row.verdict,
        })
        .collect();
    let summary = if outcome.complete {
        format!(
            "sequence of {} words; all {} products verified in D_1",
            outcome.words.len(),
            table.len()
        )
    } else {
        format!(
            "partial sequence of {} words: {}",
            outcome.words.len(),
            outcome.failure.clone().unwrap_or_default()
        )
    };
    let complete = outcome.complete;
    Ok(RunOutput {
        subcommand: "lift cset".into(),
        input,
        result: ResultObject::LiftCset {
            complete: outcome.complete,
            words: outcome
                .words
                .iter()
                .map(|w| alphabet.display_word(w))
                .collect(),
            target_depths: outcome
                .steps
                .iter()
                .map(|s| s.target_depth as u64)
                .collect(),
            table,
            failure: outcome.failure,
        },
        verification,
        summary,
        found: complete,
    })
}

fn dispatch(command: Command, bounds: &Bounds) -> Result<Option<RunOutput>> {
    match command {
        Command::Hj { cmd } => run_hj(cmd).map(Some),
        Command::Jset { cmd } => run_jset(cmd, bounds).map(Some),
        Command::Psg { cmd } => run_psg(cmd).map(Some),
        Command::Lift { cmd } => run_lift(cmd, bounds).map(Some),
        Command::Verify { cert } => {
            let text = read(&cert)?;
            let certificate = Certificate::from_toml(&text)?;
            hjset::cert::verify(&certificate)?;
            println!("certificate verifies: {}", certificate.meta.subcommand);
            Ok(None)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let bounds = match resolve_bounds(&cli) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let out_path = cli.out.clone();
    let threads = bounds.threads;
    let started = Instant::now();

    let run = || dispatch(cli.command, &bounds);
    let outcome = if threads > 0 {
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                eprintln!("error: cannot build thread pool: {e}");
                return ExitCode::from(2);
            }
        }
    } else {
        run()
    };

    match outcome {
        Ok(None) => ExitCode::SUCCESS, // verify mode prints its own line
        Ok(Some(output)) => {
            let wall = started.elapsed().as_millis() as u64;
            let cert = match Certificate::new(
                &output.subcommand,
                output.input,
                output.result,
                output.verification,
                threads,
                wall,
            ) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let text = match cert.to_toml() {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Err(e) = std::fs::write(&out_path, text) {
                eprintln!("error: cannot write {}: {e}", out_path.display());
                return ExitCode::from(2);
            }
            println!("{}", output.summary);
            println!("certificate: {}", out_path.display());
            if output.found {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
