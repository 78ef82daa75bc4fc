//! Certificates: self-contained, re-checkable records of every search.
//!
//! A certificate embeds the full input echo, the result object, and a
//! verification table, serialized as TOML with a schema version. The
//! result object is hashed (SHA-256 of its canonical TOML) so any field
//! mutation is detected; `verify` additionally replays every membership,
//! product, and color claim through the independent verifier paths without
//! re-running the search. Canonical ordering is part of the contract: a
//! reordered-but-equal result fails verification.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hj::{self, Coloring, Line};
use crate::jset::{verify_witness, Elem, PredicateSpec, Witness};
use crate::lift::MatrixSpec;
use crate::psg::{PsgTruncation, PsgValue};
use crate::textio;
use crate::words::{apply_hom, Alphabet, HomValue, Word};
use crate::Bounds;

pub const SCHEMA_VERSION: u32 = 1;

const DETERMINISM_NOTE: &str =
    "canonical-least search order; result independent of thread count and pool permutation";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Meta {
    pub schema_version: u32,
    pub tool: String,
    pub subcommand: String,
    /// wall clock of the producing run; excluded from the result hash
    pub wall_clock_ms: u64,
    pub threads: usize,
    pub result_sha256: String,
    pub determinism: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRow {
    pub claim: String,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordColor {
    pub word: String,
    pub color: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductRow {
    pub seq: String,
    pub product: String,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRow {
    pub seq: String,
    pub hom: String,
    pub product: String,
    pub image: String,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRow {
    pub tuple: String,
    pub instance: String,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomImageRow {
    pub hom: String,
    pub image: String,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumberWitness {
    pub n: u64,
    pub coloring: Vec<WordColor>,
    pub cylinder_line_free: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsetTableRow {
    pub h: Vec<u64>,
    pub phi: Vec<u64>,
    pub product: String,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ResultObject {
    HjFindLine {
        found: bool,
        n: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        root: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        color: Option<u32>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        points: Vec<WordColor>,
        roots_checked: u64,
    },
    HjLineFree {
        found: bool,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        coloring: Vec<WordColor>,
        roots_total: u64,
        nodes_visited: u64,
    },
    HjNumber {
        resolved: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        number: Option<u64>,
        max: u64,
        witnesses: Vec<NumberWitness>,
    },
    JsetCheck {
        found: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<u64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        t: Vec<u64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        a: Vec<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        products: Vec<ProductRow>,
        candidates: u64,
    },
    JsetRefute {
        n: u64,
        pool_size: u64,
        candidates_checked: u64,
        passing: u64,
        structural_tag: String,
    },
    PsgAdequacy {
        adequate: bool,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        failing: Vec<String>,
        horizon_exhaustion: bool,
        subsets_checked: u64,
    },
    PsgSigma {
        elems: Vec<String>,
        sigma: Vec<String>,
    },
    LiftLemma1 {
        found: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<u64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        t: Vec<u64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        a: Vec<String>,
        inner_witness_equal: bool,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        pairs: Vec<PairRow>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        g_family: Vec<String>,
        candidates: u64,
    },
    LiftThm3 {
        found: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        word: Option<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        instances: Vec<InstanceRow>,
        words_scanned: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lift_word: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        routes_agree: Option<bool>,
    },
    LiftFs1 {
        found: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        word: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau: Option<u64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        fs_indices: Vec<u64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        instances: Vec<InstanceRow>,
        words_scanned: u64,
    },
    LiftThm16 {
        found: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        word: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        extract: Option<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        fp_indices: Vec<u64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        instances: Vec<InstanceRow>,
        words_scanned: u64,
    },
    LiftThm17 {
        found: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        word: Option<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        psi: Vec<u64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        m_psi: Vec<u64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        coord_witnesses: Vec<Vec<u64>>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        hom_checks: Vec<HomImageRow>,
        words_scanned: u64,
    },
    LiftCset {
        complete: bool,
        words: Vec<String>,
        target_depths: Vec<u64>,
        table: Vec<CsetTableRow>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        failure: Option<String>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    pub meta: Meta,
    pub input: BTreeMap<String, String>,
    pub result: ResultObject,
    pub verification: Vec<CheckRow>,
}

fn result_hash(result: &ResultObject) -> Result<String> {
    let body = toml::to_string(result)
        .map_err(|e| Error::Certificate(format!("result serialization failed: {e}")))?;
    let mut hasher = Sha256::new();
    hasher.update(body.as_bytes());
    Ok(format!("{:x}", hasher.finalize()))
}

impl Certificate {
    pub fn new(
        subcommand: &str,
        input: BTreeMap<String, String>,
        result: ResultObject,
        verification: Vec<CheckRow>,
        threads: usize,
        wall_clock_ms: u64,
    ) -> Result<Self> {
        let result_sha256 = result_hash(&result)?;
        Ok(Certificate {
            meta: Meta {
                schema_version: SCHEMA_VERSION,
                tool: format!("hjset {}", crate::VERSION),
                subcommand: subcommand.to_string(),
                wall_clock_ms,
                threads,
                result_sha256,
                determinism: DETERMINISM_NOTE.to_string(),
            },
            input,
            result,
            verification,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self)
            .map_err(|e| Error::Certificate(format!("serialization failed: {e}")))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text)
            .map_err(|e| Error::Certificate(format!("schema mismatch: {e}")))
    }

    /// Canonical TOML of the result object alone (the determinism unit).
    pub fn result_toml(&self) -> Result<String> {
        toml::to_string(&self.result)
            .map_err(|e| Error::Certificate(format!("result serialization failed: {e}")))
    }
}

fn input_str<'a>(cert: &'a Certificate, key: &str) -> Result<&'a str> {
    cert.input
        .get(key)
        .map(String::as_str)
        .ok_or_else(|| Error::Certificate(format!("input echo is missing {key:?}")))
}

fn input_usize(cert: &Certificate, key: &str) -> Result<usize> {
    input_str(cert, key)?
        .parse()
        .map_err(|_| Error::Certificate(format!("input echo {key:?} is not a number")))
}

fn echo_alphabet(cert: &Certificate) -> Result<Alphabet> {
    let k = input_usize(cert, "k")?;
    let nvars = input_usize(cert, "nvars").unwrap_or(0);
    let mut alphabet = Alphabet::new(k, nvars)?;
    // replayed products may be far longer than constructed inputs
    alphabet.set_max_word_len(1 << 20);
    Ok(alphabet)
}

fn echo_bounds(cert: &Certificate) -> Bounds {
    let get = |key: &str, default: usize| {
        cert.input
            .get(key)
            .and_then(|v| v.parse().ok())
            .unwrap_or(default)
    };
    let d = Bounds::default();
    Bounds {
        m_max: get("m-max", d.m_max),
        t_horizon: get("horizon", d.t_horizon),
        pool_len: get("pool-len", d.pool_len),
        word_len: get("word-len", d.word_len),
        threads: 0,
    }
}

fn fail(msg: impl Into<String>) -> Error {
    Error::Certificate(msg.into())
}

fn check(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(fail(msg))
    }
}

fn coloring_from_rows(alphabet: &Alphabet, rows: &[WordColor]) -> Result<Coloring> {
    let mut text = String::new();
    for row in rows {
        text.push_str(&row.word);
        text.push('\t');
        text.push_str(&row.color.to_string());
        text.push('\n');
    }
    textio::parse_coloring(&text, alphabet)
}

/// Canonical-order check plus replay for a coloring: the rows must be
/// exactly the canonical rendering of the coloring they describe.
fn check_coloring_rows(alphabet: &Alphabet, rows: &[WordColor]) -> Result<Coloring> {
    let coloring = coloring_from_rows(alphabet, rows)?;
    let canonical: Vec<WordColor> = coloring
        .entries(alphabet)
        .into_iter()
        .map(|(w, c)| WordColor {
            word: alphabet.display_word(&w),
            color: c,
        })
        .collect();
    check(
        canonical == rows.to_vec(),
        "coloring rows are not in canonical order",
    )?;
    Ok(coloring)
}

fn parse_witness_words(
    alphabet: &Alphabet,
    m: Option<u64>,
    t: &[u64],
    a: &[String],
) -> Result<Witness> {
    let m = m.ok_or_else(|| fail("witness marked found but m is missing"))? as usize;
    let a: Result<Vec<Elem>> = a
        .iter()
        .map(|s| alphabet.parse_word(s).map(Elem::Word))
        .collect();
    Ok(Witness {
        m,
        t: t.iter().map(|&x| x as usize).collect(),
        a: a?,
    })
}

fn verify_hj_find_line(cert: &Certificate) -> Result<()> {
    let ResultObject::HjFindLine {
        found,
        n,
        root,
        color,
        points,
        ..
    } = &cert.result
    else {
        unreachable!()
    };
    let n = *n as usize;
    let alphabet = {
        let k = input_usize(cert, "k")?;
        let mut a = Alphabet::new(k, n)?;
        a.set_max_word_len(1 << 20);
        a
    };
    let coloring = textio::parse_coloring(input_str(cert, "colors")?, &alphabet)?;
    if !found {
        // exhaustion is attested, not replayed
        return Ok(());
    }
    let root = root
        .as_ref()
        .ok_or_else(|| fail("line marked found but root is missing"))?;
    let root = alphabet.parse_word(root)?;
    let color = color.ok_or_else(|| fail("line marked found but color is missing"))?;
    let line = Line {
        root,
        points: points
            .iter()
            .map(|p| alphabet.parse_word(&p.word))
            .collect::<Result<Vec<Word>>>()?,
        color,
    };
    for p in points {
        check(p.color == color, "line point colors are not uniform")?;
    }
    hj::verify_line(&alphabet, &coloring, &line, n)
}

fn verify_hj_line_free(cert: &Certificate) -> Result<()> {
    let ResultObject::HjLineFree {
        found,
        coloring,
        roots_total,
        ..
    } = &cert.result
    else {
        unreachable!()
    };
    if !*found {
        return Ok(());
    }
    let alphabet = echo_alphabet(cert)?;
    let c = input_usize(cert, "c")? as u32;
    let coloring = check_coloring_rows(&alphabet, coloring)?;
    check(
        coloring.color_count() <= c,
        "coloring uses more colors than allowed",
    )?;
    let checked = hj::verify_line_free(&alphabet, &coloring)?;
    check(
        checked == *roots_total,
        "checked-line count differs from the certificate",
    )
}

fn verify_hj_number(cert: &Certificate) -> Result<()> {
    let ResultObject::HjNumber {
        resolved,
        number,
        max,
        witnesses,
    } = &cert.result
    else {
        unreachable!()
    };
    let alphabet = echo_alphabet(cert)?;
    let c = input_usize(cert, "c")? as u32;
    let expected_tail = if *resolved {
        let n = number.ok_or_else(|| fail("resolved without a number"))?;
        check(n >= 1 && n <= *max, "number outside 1..=max")?;
        n - 1
    } else {
        *max
    };
    let ns: Vec<u64> = witnesses.iter().map(|w| w.n).collect();
    check(
        ns == (1..=expected_tail).collect::<Vec<u64>>(),
        "line-free witnesses do not cover exactly the lengths below the answer",
    )?;
    for w in witnesses {
        let coloring = check_coloring_rows(&alphabet, &w.coloring)?;
        check(
            coloring.len() == w.n as usize,
            "witness coloring has the wrong length",
        )?;
        check(
            coloring.color_count() <= c,
            "witness coloring uses more colors than allowed",
        )?;
        hj::verify_line_free(&alphabet, &coloring)?;
    }
    Ok(())
}

fn verify_jset_check(cert: &Certificate) -> Result<()> {
    let ResultObject::JsetCheck {
        found,
        m,
        t,
        a,
        products,
        ..
    } = &cert.result
    else {
        unreachable!()
    };
    if !*found {
        return Ok(());
    }
    let ambient = input_str(cert, "ambient")?;
    match ambient {
        "words" => {
            let alphabet = echo_alphabet(cert)?;
            let pred = textio::parse_predicate(input_str(cert, "pred")?, Some(&alphabet))?;
            let seqs = textio::parse_sequences(input_str(cert, "seqs")?, Some(&alphabet))?;
            let witness = parse_witness_words(&alphabet, *m, t, a)?;
            check(
                verify_witness(&pred, &seqs, Some(&alphabet), &witness)?,
                "witness fails the independent verifier",
            )?;
            replay_products_words(&alphabet, &pred, &seqs, &witness, products)
        }
        "nat" => {
            let pred = textio::parse_predicate(input_str(cert, "pred")?, None)?;
            let seqs = textio::parse_sequences(input_str(cert, "seqs")?, None)?;
            let m = m.ok_or_else(|| fail("witness marked found but m is missing"))? as usize;
            let a: Result<Vec<Elem>> = a
                .iter()
                .map(|s| {
                    s.parse::<u64>()
                        .map(Elem::Nat)
                        .map_err(|_| fail("non-numeric witness element"))
                })
                .collect();
            let witness = Witness {
                m,
                t: t.iter().map(|&x| x as usize).collect(),
                a: a?,
            };
            check(
                verify_witness(&pred, &seqs, None, &witness)?,
                "witness fails the independent verifier",
            )?;
            replay_products_nat(&pred, &seqs, &witness, products)
        }
        "psg" => {
            let (trunc, _) = textio::parse_psg_config(input_str(cert, "psg")?)?;
            let pred = textio::parse_predicate(input_str(cert, "pred")?, None)?;
            let seqs = textio::parse_psg_sequences(input_str(cert, "seqs")?)?;
            let l_elems = match cert.input.get("l-elems") {
                Some(text) if !text.trim().is_empty() => textio::parse_elem_list(text, &trunc)?,
                _ => Vec::new(),
            };
            let m = m.ok_or_else(|| fail("witness marked found but m is missing"))? as usize;
            check(t.len() == m && a.len() == m + 1, "witness shape mismatch")?;
            check(
                t.windows(2).all(|w| w[0] < w[1]) && t.first().copied().unwrap_or(0) >= 1,
                "witness t-tuple must be strictly increasing",
            )?;
            let a_ids: Result<Vec<usize>> = a
                .iter()
                .map(|s| {
                    textio::parse_elem_list(s, &trunc)?
                        .into_iter()
                        .next()
                        .ok_or_else(|| fail("empty witness element"))
                })
                .collect();
            let a_ids = a_ids?;
            let sigma_l: Option<Vec<usize>> = if l_elems.is_empty() {
                None
            } else {
                Some(trunc.sigma(&l_elems)?)
            };
            check(products.len() == seqs.len(), "one product row per sequence")?;
            for (f, row) in seqs.iter().zip(products) {
                let mut acc = a_ids[0];
                for j in 0..m {
                    let ft = f.eval(&trunc, t[j] as usize)?;
                    acc = trunc
                        .op(acc, ft)
                        .ok_or_else(|| fail("undefined partial product in witness"))?;
                    acc = trunc
                        .op(acc, a_ids[j + 1])
                        .ok_or_else(|| fail("undefined partial product in witness"))?;
                }
                let elem = match trunc.value(acc) {
                    PsgValue::Nat(v) => Elem::Nat(v),
                    PsgValue::Word(w) => Elem::Word(w),
                    PsgValue::Label(l) => Elem::Label(l),
                };
                check(pred.eval(&elem)?, "product fails the predicate")?;
                if let Some(sigma) = &sigma_l {
                    check(sigma.contains(&acc), "product escapes sigma(L)")?;
                }
                check(
                    row.product == trunc.display_elem(acc) && row.verdict,
                    "product row differs from replay",
                )?;
            }
            Ok(())
        }
        other => Err(fail(format!("unknown ambient {other:?}"))),
    }
}

fn replay_products_words(
    alphabet: &Alphabet,
    pred: &PredicateSpec,
    seqs: &[crate::jset::SequenceSpec],
    witness: &Witness,
    rows: &[ProductRow],
) -> Result<()> {
    check(rows.len() == seqs.len(), "one product row per sequence")?;
    for (f, row) in seqs.iter().zip(rows) {
        let mut acc = witness.a[0].clone();
        for j in 0..witness.m {
            acc = acc.combine(&f.eval(Some(alphabet), witness.t[j])?)?;
            acc = acc.combine(&witness.a[j + 1])?;
        }
        let rendered = acc.display(Some(alphabet));
        let verdict = pred.eval(&acc)?;
        check(
            row.product == rendered && row.verdict == verdict && verdict,
            "product row differs from replay",
        )?;
    }
    Ok(())
}

fn replay_products_nat(
    pred: &PredicateSpec,
    seqs: &[crate::jset::SequenceSpec],
    witness: &Witness,
    rows: &[ProductRow],
) -> Result<()> {
    check(rows.len() == seqs.len(), "one product row per sequence")?;
    for (f, row) in seqs.iter().zip(rows) {
        let mut acc = witness.a[0].clone();
        for j in 0..witness.m {
            acc = acc.combine(&f.eval(None, witness.t[j])?)?;
            acc = acc.combine(&witness.a[j + 1])?;
        }
        let verdict = pred.eval(&acc)?;
        check(
            row.product == acc.display(None) && row.verdict == verdict && verdict,
            "product row differs from replay",
        )?;
    }
    Ok(())
}

fn verify_jset_refute(cert: &Certificate) -> Result<()> {
    let ResultObject::JsetRefute {
        n,
        pool_size,
        candidates_checked,
        passing,
        ..
    } = &cert.result
    else {
        unreachable!()
    };
    check(*passing == 0, "refutation certificate records passing candidates")?;
    // the refutation is itself an exhaustive check; replay it
    let alphabet = echo_alphabet(cert)?;
    let bounds = echo_bounds(cert);
    let replay = crate::jset::refute_s0_jset(&alphabet, *n as usize, &bounds)?;
    check(
        replay.pool_size as u64 == *pool_size
            && replay.candidates_checked == *candidates_checked
            && replay.passing == *passing,
        "refutation replay differs from the certificate",
    )
}

fn verify_psg_adequacy(cert: &Certificate) -> Result<()> {
    let ResultObject::PsgAdequacy {
        adequate,
        failing,
        horizon_exhaustion,
        subsets_checked,
    } = &cert.result
    else {
        unreachable!()
    };
    let (trunc, _) = textio::parse_psg_config(input_str(cert, "psg")?)?;
    let bound = input_usize(cert, "bound")?;
    let report = trunc.is_adequate(bound)?;
    let failing_replay: Vec<String> = report
        .failing
        .clone()
        .unwrap_or_default()
        .iter()
        .map(|&e| trunc.display_elem(e))
        .collect();
    check(
        report.adequate == *adequate
            && failing_replay == *failing
            && report.horizon_exhaustion == *horizon_exhaustion
            && report.subsets_checked == *subsets_checked,
        "adequacy replay differs from the certificate",
    )?;
    if let Some(elems) = &report.failing {
        check(
            trunc.sigma(elems)?.is_empty(),
            "claimed failing subset has a nonempty sigma",
        )?;
    }
    Ok(())
}

fn verify_psg_sigma(cert: &Certificate) -> Result<()> {
    let ResultObject::PsgSigma { elems, sigma } = &cert.result else {
        unreachable!()
    };
    let (trunc, _) = textio::parse_psg_config(input_str(cert, "psg")?)?;
    let ids = textio::parse_elem_list(&elems.join("; "), &trunc)?;
    let replay: Vec<String> = trunc
        .sigma(&ids)?
        .iter()
        .map(|&e| trunc.display_elem(e))
        .collect();
    check(replay == *sigma, "sigma replay differs from the certificate")
}

fn verify_lift_lemma1(cert: &Certificate) -> Result<()> {
    let ResultObject::LiftLemma1 {
        found,
        m,
        t,
        a,
        inner_witness_equal,
        pairs,
        ..
    } = &cert.result
    else {
        unreachable!()
    };
    if !*found {
        return Ok(());
    }
    let alphabet = echo_alphabet(cert)?;
    let pred = textio::parse_predicate(input_str(cert, "pred")?, Some(&alphabet))?;
    let seqs = textio::parse_sequences(input_str(cert, "seqs")?, Some(&alphabet))?;
    let homs = textio::parse_homs(input_str(cert, "homs")?, &alphabet)?;
    let witness = parse_witness_words(&alphabet, *m, t, a)?;
    check(
        *inner_witness_equal,
        "lifted witness must equal the inner witness tuple",
    )?;
    check(
        pairs.len() == seqs.len() * homs.len(),
        "one pair row per (sequence, homomorphism)",
    )?;
    let mut idx = 0;
    for f in &seqs {
        for nu in &homs {
            let row = &pairs[idx];
            idx += 1;
            let mut product = match &witness.a[0] {
                Elem::Word(w) => w.clone(),
                _ => return Err(fail("non-word witness element")),
            };
            for j in 0..witness.m {
                let Elem::Word(ft) = f.eval(Some(&alphabet), witness.t[j])? else {
                    return Err(fail("non-word sequence value"));
                };
                product = product.concat(&ft);
                let Elem::Word(aj) = &witness.a[j + 1] else {
                    return Err(fail("non-word witness element"));
                };
                product = product.concat(aj);
            }
            let HomValue::Word(image) = apply_hom(nu, &alphabet, &product)? else {
                return Err(fail("count-valued homomorphism in a lift"));
            };
            let verdict = pred.eval(&Elem::Word(image.clone()))?;
            check(
                row.product == alphabet.display_word(&product)
                    && row.image == alphabet.display_word(&image)
                    && row.verdict == verdict
                    && verdict,
                "pair row differs from replay",
            )?;
        }
    }
    Ok(())
}

fn replay_instances(
    alphabet: &Alphabet,
    pred: &PredicateSpec,
    word: &Word,
    n: usize,
    rows: &[InstanceRow],
) -> Result<()> {
    let k = alphabet.k();
    check(
        rows.len() == k.pow(n as u32),
        "expected one instance row per substitution tuple",
    )?;
    let letters = alphabet.letter_syms();
    let mut odo = crate::util::TupleOdometer::new(k, n);
    let mut idx = 0;
    while let Some(digits) = odo.next() {
        let x: Vec<crate::words::Sym> = digits.iter().map(|&d| letters[d]).collect();
        let tuple = Word::from_syms(x.clone());
        let instance = word.substitute(alphabet, &x)?;
        let verdict = pred.eval(&Elem::Word(instance.clone()))?;
        let row = &rows[idx];
        idx += 1;
        check(
            row.tuple == alphabet.display_word(&tuple)
                && row.instance == alphabet.display_word(&instance)
                && row.verdict == verdict
                && verdict,
            "instance row differs from replay",
        )?;
    }
    Ok(())
}

fn verify_lift_thm3(cert: &Certificate) -> Result<()> {
    let ResultObject::LiftThm3 {
        found,
        word,
        instances,
        lift_word,
        routes_agree,
        ..
    } = &cert.result
    else {
        unreachable!()
    };
    if !*found {
        return Ok(());
    }
    let alphabet = echo_alphabet(cert)?;
    let n = input_usize(cert, "n")?;
    let pred = textio::parse_predicate(input_str(cert, "pred")?, Some(&alphabet))?;
    let word = alphabet.parse_word(word.as_ref().ok_or_else(|| fail("missing word"))?)?;
    check(word.in_sn(n), "word is not an n-variable word")?;
    replay_instances(&alphabet, &pred, &word, n, instances)?;
    if let Some(agree) = routes_agree {
        let lift_matches = lift_word.as_deref() == Some(alphabet.display_word(&word).as_str());
        check(
            *agree == lift_matches,
            "routes-agree flag contradicts the recorded words",
        )?;
        check(*agree, "search routes disagreed")?;
    }
    Ok(())
}

fn verify_lift_fs1(cert: &Certificate) -> Result<()> {
    let ResultObject::LiftFs1 {
        found,
        word,
        tau,
        fs_indices,
        instances,
        ..
    } = &cert.result
    else {
        unreachable!()
    };
    if !*found {
        return Ok(());
    }
    let alphabet = echo_alphabet(cert)?;
    let pred = textio::parse_predicate(input_str(cert, "pred")?, Some(&alphabet))?;
    let gens: Vec<u64> = input_str(cert, "x")?
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| fail("bad generator echo")))
        .collect::<Result<Vec<u64>>>()?;
    let word = alphabet.parse_word(word.as_ref().ok_or_else(|| fail("missing word"))?)?;
    check(word.in_sn(1), "word is not a variable word")?;
    let tau = tau.ok_or_else(|| fail("missing tau"))?;
    check(word.var_count(1) as u64 == tau, "tau differs from the variable count")?;
    // FS membership re-verified through the truncation
    let trunc = PsgTruncation::fs_prefix_nat(&gens)?;
    let indices: Vec<u32> = fs_indices.iter().map(|&i| i as u32).collect();
    let elem = trunc
        .elem_by_indices(&indices)
        .ok_or_else(|| fail("FS index witness is not an element"))?;
    check(
        trunc.value(elem) == PsgValue::Nat(tau),
        "FS index witness does not sum to tau",
    )?;
    replay_instances(&alphabet, &pred, &word, 1, instances)
}

fn verify_lift_thm16(cert: &Certificate) -> Result<()> {
    let ResultObject::LiftThm16 {
        found,
        word,
        extract,
        fp_indices,
        instances,
        ..
    } = &cert.result
    else {
        unreachable!()
    };
    if !*found {
        return Ok(());
    }
    let alphabet = echo_alphabet(cert)?;
    let n = input_usize(cert, "n")?;
    let kvars = input_usize(cert, "kvars")?;
    let pred = textio::parse_predicate(input_str(cert, "pred")?, Some(&alphabet))?;
    let pattern: Result<Vec<Word>> = input_str(cert, "pattern-seq")?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| alphabet.parse_word(l))
        .collect();
    let pattern = pattern?;
    let word = alphabet.parse_word(word.as_ref().ok_or_else(|| fail("missing word"))?)?;
    check(word.in_sn(n), "word is not an n-variable word")?;
    let extract_claim =
        alphabet.parse_word(extract.as_ref().ok_or_else(|| fail("missing extract"))?)?;
    check(
        word.pattern_extract(n, kvars)? == extract_claim,
        "extraction differs from replay",
    )?;
    // FP membership re-verified through the truncation
    let trunc = PsgTruncation::fp_prefix_word(&pattern)?;
    let indices: Vec<u32> = fp_indices.iter().map(|&i| i as u32).collect();
    let elem = trunc
        .elem_by_indices(&indices)
        .ok_or_else(|| fail("FP index witness is not an element"))?;
    check(
        trunc.value(elem) == PsgValue::Word(extract_claim),
        "FP index witness does not multiply out to the extraction",
    )?;
    replay_instances(&alphabet, &pred, &word, n, instances)
}

fn verify_lift_thm17(cert: &Certificate) -> Result<()> {
    let ResultObject::LiftThm17 {
        found,
        word,
        psi,
        m_psi,
        coord_witnesses,
        hom_checks,
        ..
    } = &cert.result
    else {
        unreachable!()
    };
    if !*found {
        return Ok(());
    }
    let alphabet = echo_alphabet(cert)?;
    let pred = textio::parse_predicate(input_str(cert, "pred")?, Some(&alphabet))?;
    let homs = textio::parse_homs(input_str(cert, "homs")?, &alphabet)?;
    let taus = textio::parse_homs(input_str(cert, "taus")?, &alphabet)?;
    let (rows, cols, entries) = textio::parse_matrix(input_str(cert, "matrix")?)?;
    let matrix = MatrixSpec::new(rows, cols, entries)?;
    let prefixes = textio::parse_fs_prefixes(input_str(cert, "fs-prefixes")?)?;
    let word = alphabet.parse_word(word.as_ref().ok_or_else(|| fail("missing word"))?)?;

    let psi_replay: Result<Vec<u64>> = taus
        .iter()
        .map(|tau| {
            apply_hom(tau, &alphabet, &word)?
                .as_count()
                .ok_or_else(|| fail("tau is not count-valued"))
        })
        .collect();
    let psi_replay = psi_replay?;
    check(psi_replay == *psi, "psi differs from replay")?;
    // both matrix routes, compared to each other and the certificate
    let one = matrix.mat_vec(&psi_replay)?;
    let two = matrix.row_dot(&psi_replay)?;
    check(one == two, "matrix product routes disagree")?;
    check(one == *m_psi, "matrix image differs from replay")?;
    check(
        coord_witnesses.len() == prefixes.len() && m_psi.len() == prefixes.len(),
        "one FS witness per coordinate",
    )?;
    for ((coord, witness), gens) in m_psi.iter().zip(coord_witnesses).zip(&prefixes) {
        let trunc = PsgTruncation::fs_prefix_nat(gens)?;
        let indices: Vec<u32> = witness.iter().map(|&i| i as u32).collect();
        let elem = trunc
            .elem_by_indices(&indices)
            .ok_or_else(|| fail("FS coordinate witness is not an element"))?;
        check(
            trunc.value(elem) == PsgValue::Nat(*coord),
            "FS coordinate witness does not sum to the coordinate",
        )?;
    }
    check(hom_checks.len() == homs.len(), "one row per homomorphism")?;
    for (nu, row) in homs.iter().zip(hom_checks) {
        let HomValue::Word(image) = apply_hom(nu, &alphabet, &word)? else {
            return Err(fail("count-valued membership homomorphism"));
        };
        let verdict = pred.eval(&Elem::Word(image.clone()))?;
        check(
            row.image == alphabet.display_word(&image) && row.verdict == verdict && verdict,
            "homomorphism row differs from replay",
        )?;
    }
    Ok(())
}

fn verify_lift_cset(cert: &Certificate) -> Result<()> {
    let ResultObject::LiftCset {
        complete,
        words,
        target_depths,
        table,
        ..
    } = &cert.result
    else {
        unreachable!()
    };
    if !*complete {
        return Ok(());
    }
    let alphabet = echo_alphabet(cert)?;
    let cs = textio::parse_cset_structure(input_str(cert, "structure")?, &alphabet)?;
    let homs = textio::parse_homs(input_str(cert, "homs")?, &alphabet)?;
    let words: Result<Vec<Word>> = words.iter().map(|w| alphabet.parse_word(w)).collect();
    let words = words?;
    check(
        target_depths.len() == words.len(),
        "one target depth per word",
    )?;
    let m = words.len();
    let expected_rows: u64 = (1..=m as u64)
        .map(|j| {
            let mut c = 1u64;
            for i in 0..j {
                c = c * (m as u64 - i) / (i + 1);
            }
            c * (homs.len() as u64).pow(j as u32)
        })
        .sum();
    check(
        table.len() as u64 == expected_rows,
        "product table has the wrong row count",
    )?;
    let d1 = cs.level(1)?;
    let mut idx = 0usize;
    for h_mask in 1u32..(1 << m) {
        let positions: Vec<usize> = (0..m).filter(|i| h_mask & (1 << i) != 0).collect();
        let mut phi_odo = crate::util::TupleOdometer::new(homs.len(), positions.len());
        while let Some(phi) = phi_odo.next() {
            let row = table
                .get(idx)
                .ok_or_else(|| fail("product table ended early"))?;
            idx += 1;
            let mut product = Word::empty();
            for (slot, &pos) in positions.iter().enumerate() {
                let HomValue::Word(img) = apply_hom(&homs[phi[slot]], &alphabet, &words[pos])?
                else {
                    return Err(fail("count-valued homomorphism in a product"));
                };
                product = product.concat(&img);
            }
            let verdict = d1.eval(&Elem::Word(product.clone()))?;
            let h_claim: Vec<u64> = positions.iter().map(|&p| p as u64 + 1).collect();
            let phi_claim: Vec<u64> = phi.iter().map(|&p| p as u64).collect();
            check(
                row.h == h_claim
                    && row.phi == phi_claim
                    && row.product == alphabet.display_word(&product)
                    && row.verdict == verdict
                    && verdict,
                "product table row differs from replay",
            )?;
        }
    }
    Ok(())
}

/// Re-check every claim of a certificate without re-running its search.
/// Structural canonicity (row order, monotone tuples) is part of the
/// contract and is checked too. Exhaustion outcomes carry no replayable
/// claims and verify structurally only.
pub fn verify(cert: &Certificate) -> Result<()> {
    check(
        cert.meta.schema_version == SCHEMA_VERSION,
        "unsupported schema version",
    )?;
    let hash = result_hash(&cert.result)?;
    check(
        hash == cert.meta.result_sha256,
        "result hash mismatch: certificate was modified",
    )?;
    match &cert.result {
        ResultObject::HjFindLine { .. } => verify_hj_find_line(cert),
        ResultObject::HjLineFree { .. } => verify_hj_line_free(cert),
        ResultObject::HjNumber { .. } => verify_hj_number(cert),
        ResultObject::JsetCheck { .. } => verify_jset_check(cert),
        ResultObject::JsetRefute { .. } => verify_jset_refute(cert),
        ResultObject::PsgAdequacy { .. } => verify_psg_adequacy(cert),
        ResultObject::PsgSigma { .. } => verify_psg_sigma(cert),
        ResultObject::LiftLemma1 { .. } => verify_lift_lemma1(cert),
        ResultObject::LiftThm3 { .. } => verify_lift_thm3(cert),
        ResultObject::LiftFs1 { .. } => verify_lift_fs1(cert),
        ResultObject::LiftThm16 { .. } => verify_lift_thm16(cert),
        ResultObject::LiftThm17 { .. } => verify_lift_thm17(cert),
        ResultObject::LiftCset { .. } => verify_lift_cset(cert),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_cert() -> Certificate {
        let mut input = BTreeMap::new();
        input.insert("k".into(), "2".into());
        input.insert("nvars".into(), "0".into());
        input.insert("c".into(), "2".into());
        Certificate::new(
            "hj line-free",
            input,
            ResultObject::HjLineFree {
                found: true,
                coloring: vec![
                    WordColor {
                        word: "a".into(),
                        color: 1,
                    },
                    WordColor {
                        word: "b".into(),
                        color: 2,
                    },
                ],
                roots_total: 1,
                nodes_visited: 2,
            },
            vec![CheckRow {
                claim: "no monochromatic 1-variable line".into(),
                ok: true,
            }],
            1,
            3,
        )
        .unwrap()
    }

    #[test]
    fn toml_roundtrip_preserves_result_hash() {
        let cert = tiny_cert();
        let text = cert.to_toml().unwrap();
        let back = Certificate::from_toml(&text).unwrap();
        assert_eq!(back.meta.result_sha256, cert.meta.result_sha256);
        assert_eq!(back.result_toml().unwrap(), cert.result_toml().unwrap());
        verify(&back).unwrap();
    }

    #[test]
    fn tampered_certificate_fails() {
        let mut cert = tiny_cert();
        if let ResultObject::HjLineFree { coloring, .. } = &mut cert.result {
            coloring[1].color = 1;
        }
        assert!(verify(&cert).is_err());
    }

    #[test]
    fn reordered_rows_fail_canonical_check() {
        let mut cert = tiny_cert();
        if let ResultObject::HjLineFree { coloring, .. } = &mut cert.result {
            coloring.swap(0, 1);
        }
        // refresh the hash so only the ordering contract can fail
        cert.meta.result_sha256 = result_hash(&cert.result).unwrap();
        let e = verify(&cert).unwrap_err();
        assert!(e.to_string().contains("canonical"));
    }
}
