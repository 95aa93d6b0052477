//! rss-kit: command line front end for the random substitution toolkit.
//!
//! Every run is deterministic: identical inputs produce byte-identical
//! output. Exit status 0 means success, 1 means a yes/no query answered
//! "no" (word not legal, no radius certified, nothing found), 2 means a
//! usage or spec-file error.

use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rss_core::decomposition::{decompositions, induced_set};
use rss_core::groups::shuffle_group_order;
use rss_core::language::Language;
use rss_core::recognisability::{local_radius, word_radius};
use rss_core::substitution::{parse_substitution, RandomSubstitution};
use rss_core::{
    compile_conveyor, compile_marker_automorphism, compile_shuffle, find_markers,
    nontrivial_witness, verify_endomorphism, verify_inverse, ConveyorSpec, Error, IndexCode,
    MarkerSpec, ShuffleSpec,
};

#[derive(Parser)]
#[command(name = "rss-kit", version, about = "computing with random substitutions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Structural properties of a substitution
    Props { spec: String },
    /// All legal words of one length, sorted
    Language {
        spec: String,
        #[arg(long)]
        length: usize,
        /// Cap on the number of stored closure words
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Is the word legal?
    Legal {
        spec: String,
        word: String,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Least m such that every legal m-word contains the given word
    Gaps {
        spec: String,
        word: String,
        /// Largest m searched
        #[arg(long, default_value_t = 30)]
        cap: usize,
    },
    /// Periodic candidates: words whose repetitions stay legal
    Periodic {
        spec: String,
        #[arg(long)]
        max_period: usize,
        /// Number of repetitions each candidate must survive
        #[arg(long, default_value_t = 8)]
        reps: usize,
    },
    /// All inflation word decompositions of a legal word
    Decompose { spec: String, word: String },
    /// Induced decompositions of the subword at positions i..=j
    Induced {
        spec: String,
        word: String,
        i: usize,
        j: usize,
        /// Read i and j as 1-based positions
        #[arg(long)]
        one_based: bool,
    },
    /// Smallest recognisability radius of a word, within a bound
    Recognise {
        spec: String,
        word: String,
        #[arg(long, default_value_t = 6)]
        max_radius: usize,
    },
    /// Local (hence global) recognisability of the substitution
    Recognisable {
        spec: String,
        #[arg(long, default_value_t = 6)]
        max_radius: usize,
    },
    /// Compile a level-n shuffle and print its window table
    Shuffle {
        spec: String,
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long)]
        letter: char,
        /// Permutation of the sorted image list, e.g. 1,0
        #[arg(long)]
        perm: String,
        /// Bound for the recognisability certificate
        #[arg(long, default_value_t = 6)]
        max_radius: usize,
    },
    /// Compile the full-shift embedding code for a letter
    Embed {
        spec: String,
        #[arg(long)]
        letter: char,
        /// Permutation acting on realisation indices, e.g. 1,0
        #[arg(long)]
        perm: String,
        #[arg(long, default_value_t = 6)]
        max_radius: usize,
        /// Largest letter gap searched
        #[arg(long, default_value_t = 16)]
        cap: usize,
    },
    /// Marker search: gap words v with u v u legal, grouped by root
    Marker {
        spec: String,
        word: String,
        /// Gap length
        #[arg(long)]
        length: usize,
        /// Bound certifying the marker word recognisable
        #[arg(long, default_value_t = 0)]
        max_radius: usize,
    },
    /// Compile a conveyor belt code from a four-block marker family
    Conveyor {
        spec: String,
        word: String,
        /// Gap length of the block family
        #[arg(long)]
        length: usize,
        /// Index permutation applied on the two-track circle, e.g. 1,0
        #[arg(long)]
        perm: String,
        #[arg(long, default_value_t = 0)]
        max_radius: usize,
        /// Run-splitting gap threshold; defaults to the block length
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Verify a compiled construction: endomorphism, inverse, non-triviality
    Verify {
        spec: String,
        /// Construction to build: shuffle or marker
        construction: String,
        /// Marker word, for the marker construction
        word: Option<String>,
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long)]
        letter: Option<char>,
        #[arg(long)]
        perm: String,
        /// Gap length, for the marker construction
        #[arg(long)]
        length: Option<usize>,
        #[arg(long, default_value_t = 6)]
        max_radius: usize,
        /// Lengths checked by the endomorphism test
        #[arg(long, default_value_t = 4)]
        reps: usize,
    },
    /// Shuffle group orders at one level, in exact decimal
    Orders {
        spec: String,
        #[arg(long, default_value_t = 1)]
        level: usize,
    },
}

fn load(path: &str) -> Result<RandomSubstitution, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    parse_substitution(&text).map_err(|e| format!("{path}: {e}"))
}

fn language(sub: RandomSubstitution, cap: Option<usize>) -> Result<Language, Error> {
    match cap {
        Some(c) => Language::with_cap(sub, c),
        None => Language::new(sub),
    }
}

fn parse_perm(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad permutation '{s}': {e}")))
        .collect()
}

/// An index code of radius zero given by a permutation of realisations.
fn index_code(perm: &[usize]) -> Result<IndexCode, Error> {
    IndexCode::from_permutation(perm)
}

fn inverse_perm(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

fn fmt_bool(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

fn edge(b: bool) -> &'static str {
    if b {
        "exact"
    } else {
        "partial"
    }
}

/// Exit 1 is the domain "no"; exit 2 a usage or input error.
enum Outcome {
    Yes,
    No,
}

fn run(cli: Cli) -> Result<Outcome, String> {
    let fail = |e: Error| e.to_string();
    match cli.cmd {
        Cmd::Props { spec } => {
            let sub = load(&spec)?;
            let alphabet = sub.alphabet();
            let symbols: Vec<String> =
                alphabet.letters().map(|l| alphabet.symbol(l).to_string()).collect();
            println!("alphabet: {}", symbols.join(" "));
            println!("compatible: {}", fmt_bool(sub.is_compatible()));
            println!("primitive: {}", fmt_bool(sub.is_primitive()));
            match sub.constant_length() {
                Some(n) => println!("constant_length: {n}"),
                None => println!("constant_length: none"),
            }
            println!(
                "disjoint_letter_images: {}",
                fmt_bool(sub.has_disjoint_letter_images())
            );
            if let Ok(m) = sub.substitution_matrix() {
                for (i, row) in m.entries.iter().enumerate() {
                    let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
                    println!("matrix {}: {}", symbols[i], cells.join(" "));
                }
            }
            Ok(Outcome::Yes)
        }
        Cmd::Language { spec, length, cap } => {
            let l = language(load(&spec)?, cap).map_err(fail)?;
            let slice = l.legal_words(length).map_err(fail)?;
            println!("count: {}", slice.words.len());
            println!("stabilisation: {}", slice.stabilisation);
            let sub = l.substitution();
            for w in &slice.words {
                println!("{}", sub.format_word(w));
            }
            Ok(Outcome::Yes)
        }
        Cmd::Legal { spec, word, cap } => {
            let l = language(load(&spec)?, cap).map_err(fail)?;
            let u = l.substitution().word(&word).map_err(fail)?;
            let legal = l.is_legal(&u).map_err(fail)?;
            println!("legal: {}", fmt_bool(legal));
            Ok(if legal { Outcome::Yes } else { Outcome::No })
        }
        Cmd::Gaps { spec, word, cap } => {
            let l = language(load(&spec)?, None).map_err(fail)?;
            let u = l.substitution().word(&word).map_err(fail)?;
            match l.word_gap_bound(&u, cap).map_err(fail)? {
                Some(m) => {
                    println!("gap_bound: {m}");
                    Ok(Outcome::Yes)
                }
                None => {
                    println!("gap_bound: none");
                    Ok(Outcome::No)
                }
            }
        }
        Cmd::Periodic { spec, max_period, reps } => {
            let l = language(load(&spec)?, None).map_err(fail)?;
            let found = l.periodic_candidates(max_period, reps).map_err(fail)?;
            println!("count: {}", found.len());
            let sub = l.substitution();
            for w in &found {
                println!("{}", sub.format_word(w));
            }
            Ok(if found.is_empty() { Outcome::No } else { Outcome::Yes })
        }
        Cmd::Decompose { spec, word } => {
            let l = language(load(&spec)?, None).map_err(fail)?;
            let sub = l.substitution().clone();
            let u = sub.word(&word).map_err(fail)?;
            for d in decompositions(&l, &u).map_err(fail)? {
                let pieces: Vec<String> = d.pieces.iter().map(|p| sub.format_word(p)).collect();
                println!(
                    "[{}] root={} edges={},{}",
                    pieces.join("|"),
                    sub.format_word(&d.root),
                    edge(d.first_is_exact(&sub)),
                    edge(d.last_is_exact(&sub)),
                );
            }
            Ok(Outcome::Yes)
        }
        Cmd::Induced { spec, word, i, j, one_based } => {
            let l = language(load(&spec)?, None).map_err(fail)?;
            let sub = l.substitution().clone();
            let u = sub.word(&word).map_err(fail)?;
            let (i, j) = if one_based {
                if i == 0 || j == 0 {
                    return Err("positions are 1-based; 0 is out of range".into());
                }
                (i - 1, j - 1)
            } else {
                (i, j)
            };
            for d in induced_set(&l, &u, i, j).map_err(fail)? {
                let pieces: Vec<String> = d.pieces.iter().map(|p| sub.format_word(p)).collect();
                println!("[{}] root={}", pieces.join("|"), sub.format_word(&d.root));
            }
            Ok(Outcome::Yes)
        }
        Cmd::Recognise { spec, word, max_radius } => {
            let l = language(load(&spec)?, None).map_err(fail)?;
            let sub = l.substitution().clone();
            let u = sub.word(&word).map_err(fail)?;
            let v = word_radius(&l, &u, max_radius).map_err(fail)?;
            match v.radius {
                Some(n) => {
                    println!("radius: {n}");
                    Ok(Outcome::Yes)
                }
                None => {
                    println!("radius: none");
                    if let Some(w) = v.witness {
                        println!("witness: {}", sub.format_word(&w.extension));
                        println!("offset: {}", w.offset);
                    }
                    Ok(Outcome::No)
                }
            }
        }
        Cmd::Recognisable { spec, max_radius } => {
            let l = language(load(&spec)?, None).map_err(fail)?;
            let sub = l.substitution().clone();
            let v = local_radius(&l, max_radius).map_err(fail)?;
            println!("recognisable: {}", fmt_bool(v.radius.is_some()));
            match v.radius {
                Some(n) => println!("radius: {n}"),
                None => println!("radius: none"),
            }
            for entry in &v.table {
                let r = entry
                    .radius
                    .map(|n| n.to_string())
                    .unwrap_or_else(|| "none".into());
                println!("word {}: radius {}", sub.format_word(&entry.subject), r);
            }
            Ok(if v.radius.is_some() { Outcome::Yes } else { Outcome::No })
        }
        Cmd::Shuffle { spec, level, letter, perm, max_radius } => {
            let l = language(load(&spec)?, None).map_err(fail)?;
            let letter = l.substitution().alphabet().letter_of(letter).map_err(fail)?;
            let perm = parse_perm(&perm)?;
            let code = compile_shuffle(&l, &ShuffleSpec { level, letter, perm }, max_radius)
                .map_err(fail)?;
            print!("{}", code.export(&l).map_err(fail)?);
            Ok(Outcome::Yes)
        }
        Cmd::Embed { spec, letter, perm, max_radius, cap } => {
            let l = language(load(&spec)?, None).map_err(fail)?;
            let letter = l.substitution().alphabet().letter_of(letter).map_err(fail)?;
            let alpha = index_code(&parse_perm(&perm)?).map_err(fail)?;
            let code = rss_core::compile_full_shift_embedding(
                std::sync::Arc::new(l),
                letter,
                &alpha,
                max_radius,
                cap,
            )
            .map_err(fail)?;
            println!("radius: {}", code.radius());
            println!("provenance: {}", code.provenance());
            Ok(Outcome::Yes)
        }
        Cmd::Marker { spec, word, length, max_radius } => {
            let l = language(load(&spec)?, None).map_err(fail)?;
            let sub = l.substitution().clone();
            let u = sub.word(&word).map_err(fail)?;
            let report = find_markers(&l, &u, length, max_radius).map_err(fail)?;
            println!("families: {}", report.grouped.len());
            for (root, vs) in &report.grouped {
                let vs: Vec<String> = vs.iter().map(|v| sub.format_word(v)).collect();
                println!("root {}: {}", sub.format_word(root), vs.join(" "));
            }
            if !report.ungrouped.is_empty() {
                let vs: Vec<String> =
                    report.ungrouped.iter().map(|v| sub.format_word(v)).collect();
                println!("ungrouped: {}", vs.join(" "));
            }
            Ok(if report.grouped.is_empty() && report.ungrouped.is_empty() {
                Outcome::No
            } else {
                Outcome::Yes
            })
        }
        Cmd::Conveyor { spec, word, length, perm, max_radius, cap } => {
            let l = language(load(&spec)?, None).map_err(fail)?;
            let sub = l.substitution().clone();
            let u = sub.word(&word).map_err(fail)?;
            let report = find_markers(&l, &u, length, max_radius).map_err(fail)?;
            let family = report
                .grouped
                .values()
                .find(|vs| vs.len() >= 4)
                .ok_or("no marker family with four gap words at this length")?;
            let alpha = index_code(&parse_perm(&perm)?).map_err(fail)?;
            let alpha_inv = index_code(&inverse_perm(&parse_perm(&perm)?)).map_err(fail)?;
            let blocks = [
                [family[0].clone(), family[1].clone()],
                [family[2].clone(), family[3].clone()],
            ];
            let threshold = cap.unwrap_or(2 * u.len() + length);
            let code = compile_conveyor(
                &l,
                &ConveyorSpec {
                    u: u.clone(),
                    u_radius: max_radius,
                    blocks,
                    threshold,
                    alpha,
                    alpha_inv,
                },
            )
            .map_err(fail)?;
            println!("radius: {}", code.radius());
            let vs: Vec<String> = family.iter().map(|v| sub.format_word(v)).collect();
            println!("blocks: {}", vs.join(" "));
            println!("threshold: {threshold}");
            Ok(Outcome::Yes)
        }
        Cmd::Verify {
            spec,
            construction,
            word,
            level,
            letter,
            perm,
            length,
            max_radius,
            reps,
        } => {
            let l = language(load(&spec)?, None).map_err(fail)?;
            let perm = parse_perm(&perm)?;
            let (code, inverse) = match construction.as_str() {
                "shuffle" => {
                    let c = letter.ok_or("shuffle verification needs --letter")?;
                    let letter = l.substitution().alphabet().letter_of(c).map_err(fail)?;
                    let f = compile_shuffle(
                        &l,
                        &ShuffleSpec { level, letter, perm: perm.clone() },
                        max_radius,
                    )
                    .map_err(fail)?;
                    let g = compile_shuffle(
                        &l,
                        &ShuffleSpec { level, letter, perm: inverse_perm(&perm) },
                        max_radius,
                    )
                    .map_err(fail)?;
                    (f, g)
                }
                "marker" => {
                    let word = word.ok_or("marker verification needs a marker word")?;
                    let u = l.substitution().word(&word).map_err(fail)?;
                    let n = length.ok_or("marker verification needs --length")?;
                    let report = find_markers(&l, &u, n, max_radius).map_err(fail)?;
                    let gaps = report
                        .grouped
                        .values()
                        .find(|vs| vs.len() == perm.len())
                        .cloned()
                        .ok_or_else(|| {
                            format!("no marker family of size {} at gap length {n}", perm.len())
                        })?;
                    let f = compile_marker_automorphism(
                        &l,
                        &MarkerSpec {
                            u: u.clone(),
                            u_radius: max_radius,
                            gaps: gaps.clone(),
                            perm: perm.clone(),
                        },
                    )
                    .map_err(fail)?;
                    let g = compile_marker_automorphism(
                        &l,
                        &MarkerSpec { u, u_radius: max_radius, gaps, perm: inverse_perm(&perm) },
                    )
                    .map_err(fail)?;
                    (f, g)
                }
                other => return Err(format!("unknown construction '{other}'")),
            };
            let endo = verify_endomorphism(&code, &l, reps).map_err(fail)?;
            println!("endomorphism: {}", if endo.ok { "pass" } else { "fail" });
            let inv = verify_inverse(&code, &inverse, &l).map_err(fail)?;
            println!("inverse: {}", if inv.ok { "pass" } else { "fail" });
            let nontrivial = nontrivial_witness(&code, &l).map_err(fail)?.is_some();
            println!("nontrivial: {}", fmt_bool(nontrivial));
            Ok(if endo.ok && inv.ok { Outcome::Yes } else { Outcome::No })
        }
        Cmd::Orders { spec, level } => {
            let sub = load(&spec)?;
            let report = shuffle_group_order(&sub, level).map_err(fail)?;
            println!("level: {}", report.level);
            let alphabet = sub.alphabet();
            for (l, c) in &report.counts {
                println!("count {}: {}", alphabet.symbol(*l), c);
            }
            println!("full_order: {}", report.full_order);
            println!("alternating_order: {}", report.alternating_order);
            println!("index: {}", report.index);
            println!("index_bound: {}", report.index_bound);
            Ok(Outcome::Yes)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Yes) => ExitCode::from(0),
        Ok(Outcome::No) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
