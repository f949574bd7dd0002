//! Fixtures shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sessionrm"))
}

pub fn run_cli(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn sessionrm")
}

/// Fixture files on disk.
pub struct Fixture {
    pub corpus: PathBuf,
    pub sessions: PathBuf,
    pub qrels: PathBuf,
}

impl Fixture {
    pub fn write(dir: &Path, corpus: &str, sessions: &Value, qrels: &str) -> Fixture {
        let f = Fixture {
            corpus: dir.join("corpus.jsonl"),
            sessions: dir.join("sessions.json"),
            qrels: dir.join("qrels.txt"),
        };
        fs::write(&f.corpus, corpus).unwrap();
        fs::write(&f.sessions, serde_json::to_string_pretty(sessions).unwrap()).unwrap();
        fs::write(&f.qrels, qrels).unwrap();
        f
    }
}

pub fn corpus_jsonl<'a>(docs: impl IntoIterator<Item = (&'a str, String)>) -> String {
    docs.into_iter()
        .map(|(id, text)| json!({ "id": id, "text": text }).to_string() + "\n")
        .collect()
}

struct Sense {
    name: &'static str,
    words: [&'static str; 4],
}

struct Head {
    word: &'static str,
    senses: [Sense; 2],
}

const HEADS: [Head; 5] = [
    Head {
        word: "jaguar",
        senses: [
            Sense { name: "car", words: ["engine", "sedan", "dealer", "motor"] },
            Sense { name: "cat", words: ["jungle", "predator", "rainforest", "prey"] },
        ],
    },
    Head {
        word: "python",
        senses: [
            Sense { name: "code", words: ["programming", "interpreter", "library", "script"] },
            Sense { name: "snake", words: ["reptile", "venom", "constrictor", "scales"] },
        ],
    },
    Head {
        word: "apple",
        senses: [
            Sense { name: "fruit", words: ["orchard", "cider", "harvest", "juice"] },
            Sense { name: "company", words: ["iphone", "laptop", "shares", "keynote"] },
        ],
    },
    Head {
        word: "mercury",
        senses: [
            Sense { name: "planet", words: ["orbit", "solar", "telescope", "spacecraft"] },
            Sense { name: "element", words: ["metal", "toxic", "thermometer", "liquid"] },
        ],
    },
    Head {
        word: "java",
        senses: [
            Sense { name: "island", words: ["indonesia", "volcano", "beach", "jakarta"] },
            Sense { name: "language", words: ["compiler", "bytecode", "virtual", "classes"] },
        ],
    },
];

/// Facet word asked for by the session targeting each sense.
const FACETS: [&str; 2] = ["history", "price"];
const NEUTRAL_FACET: &str = "photos";
const FILLER: [&str; 6] = ["page", "information", "article", "website", "read", "more"];

fn doc_id(h: usize, s: usize, i: usize) -> String {
    format!("{}-{}-{i}", HEADS[h].word, HEADS[h].senses[s].name)
}

/// Facet of document `i` of sense `s`: documents 1-3 carry their own
/// sense's facet, document 4 the other sense's, document 0 a neutral one.
fn doc_facet(s: usize, i: usize) -> &'static str {
    match i {
        0 => NEUTRAL_FACET,
        4 => FACETS[1 - s],
        _ => FACETS[s],
    }
}

/// 50 documents: five ambiguous head words, two senses each, five documents
/// per sense. Each document mixes its sense vocabulary with a facet word,
/// and a facet leans toward one sense, so the top results for
/// "head facet" are mostly of that sense.
pub fn directional_corpus() -> Vec<(String, String)> {
    let mut docs = Vec::new();
    for (h, head) in HEADS.iter().enumerate() {
        for (s, sense) in head.senses.iter().enumerate() {
            for i in 0..5 {
                let w = &sense.words;
                let text = format!(
                    "{} {} {} {} {} {}. {} {}",
                    head.word,
                    w[i % 4],
                    w[(i + 1) % 4],
                    doc_facet(s, i),
                    if i % 2 == 0 { head.word } else { w[(i + 2) % 4] },
                    FILLER[(i + h) % 6],
                    FILLER[(i + 2 * s + h) % 6],
                    w[(i + 3) % 4],
                );
                docs.push((doc_id(h, s, i), text));
            }
        }
    }
    docs
}

/// Ten sessions, one per (head, sense). The user searches the head word,
/// clicks a document of the intended sense, refines with a sense word that
/// occurs in the clicked document, clicks again, and finally asks for the
/// sense's facet (which occurs in the second clicked document). Relevant
/// documents are those of the intended sense; grade 2 when they also carry
/// the facet word.
pub fn directional_fixture() -> (String, Value, String) {
    let corpus = directional_corpus();
    let mut sessions = Vec::new();
    let mut qrels = String::new();
    for (h, head) in HEADS.iter().enumerate() {
        for (s, sense) in head.senses.iter().enumerate() {
            let other = 1 - s;
            let shown: Vec<String> = (0..5)
                .flat_map(|i| [doc_id(h, other, i), doc_id(h, s, i)])
                .collect();
            let first_click = doc_id(h, s, 0);
            let second_click = doc_id(h, s, 2);
            // sense words at positions 0, 1 and 3 occur in document 0
            let added = sense.words[1];
            let facet = FACETS[s];
            sessions.push(json!({
                "session_id": format!("{}-{}", head.word, sense.name),
                "topic_id": format!("{}-{}", head.word, sense.name),
                "steps": [
                    { "query": head.word, "impressions": shown, "clicks": [{ "doc": first_click, "dwell": 45.0 }] },
                    { "query": format!("{} {}", head.word, added), "impressions": shown,
                      "clicks": [{ "doc": second_click }] },
                ],
                "current_query": format!("{} {}", head.word, facet),
            }));
            for (id, text) in &corpus {
                if !id.starts_with(&format!("{}-", head.word)) {
                    continue;
                }
                let grade = if id.starts_with(&format!("{}-{}-", head.word, sense.name)) {
                    if text.contains(facet) { 2 } else { 1 }
                } else {
                    0
                };
                qrels.push_str(&format!("{}-{} 0 {id} {grade}\n", head.word, sense.name));
            }
        }
    }
    let corpus = corpus_jsonl(corpus.iter().map(|(id, t)| (id.as_str(), t.clone())));
    (corpus, json!({ "sessions": sessions }), qrels)
}

/// Single-session tuning fixture whose session model reduces to
/// `(1 - lambda) * MLE("lava") + lambda * MLE(clicked)` for every gamma and
/// m. The relevant document `r` overtakes `x` once lambda passes a
/// threshold that lies strictly between two grid values.
pub const PLANTED_DOCS: [(&str, &str); 4] = [
    ("clicked", "ash cone ash cone"),
    ("r", "lava ash cone rock rock"),
    ("x", "lava lava surf reef reef"),
    ("y", "surf reef wave"),
];
pub const PLANTED_MU: f64 = 2.0;

pub fn planted_fixture() -> (String, Value, String) {
    let corpus = corpus_jsonl(PLANTED_DOCS.iter().map(|(id, t)| (*id, t.to_string())));
    let sessions = json!({ "sessions": [{
        "session_id": "planted",
        "topic_id": "volcanic",
        "steps": [{ "query": "lava", "impressions": ["clicked", "r", "x"], "clicks": [{ "doc": "clicked" }] }],
        "current_query": "lava",
    }]});
    (corpus, sessions, "volcanic 0 r 1\nvolcanic 0 x 0\n".to_string())
}
