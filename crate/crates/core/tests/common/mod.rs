#![allow(dead_code)]

use compareviz_core::dataset::{load_dataset, Dataset};
use compareviz_core::engine::{Engine, EngineConfig};
use compareviz_core::lexicon::Lexicon;
use serde_json::Value;

pub const BOOKS: &[u8] = include_bytes!("../../../../data/books.csv");
pub const NETFLIX: &[u8] = include_bytes!("../../../../data/netflix.csv");
pub const OLYMPICS: &[u8] = include_bytes!("../../../../data/olympics.csv");

/// One utterance per (cardinality, concreteness) cell of the Books table.
pub const BOOKS_MATRIX: [(&str, &str, &str); 16] = [
    ("compare the user rating of The Alchemist and Becoming", "1-1", "ev-ea"),
    ("compare the popularity of The Alchemist and Becoming", "1-1", "ev-ia"),
    ("compare the user rating of a bestseller book and a cheap book", "1-1", "iv-ea"),
    ("compare the popularity of a cheap book and a bestseller book", "1-1", "iv-ia"),
    ("compare the price of The Alchemist to other fiction books", "1-n", "ev-ea"),
    ("compare the popularity of The Alchemist to other fiction books", "1-n", "ev-ia"),
    ("compare the price of a bestseller book to other high rated books", "1-n", "iv-ea"),
    ("compare the popularity of a cheap book to other high rated books", "1-n", "iv-ia"),
    ("compare the price across all fiction books", "n", "ev-ea"),
    ("compare the popularity across all fiction books", "n", "ev-ia"),
    ("compare the price of all high rated books", "n", "iv-ea"),
    ("compare the popularity of all expensive books", "n", "iv-ia"),
    ("compare fiction books to non fiction books in terms of price", "n-m", "ev-ea"),
    ("compare fiction books to non fiction books in terms of popularity", "n-m", "ev-ia"),
    ("compare high rated fiction books to high rated non fiction books in terms of price", "n-m", "iv-ea"),
    ("compare high rated non fiction books to cheap non fiction books in terms of popularity", "n-m", "iv-ia"),
];

pub fn dataset(csv: &[u8]) -> Dataset {
    load_dataset(csv).unwrap()
}

pub fn engine(csv: &[u8]) -> Engine {
    Engine::new(dataset(csv), Lexicon::default(), EngineConfig::default())
}

/// The bundled schema's `$ref`s contain characters that are not valid in a
/// URI fragment; percent-encode them before compiling.
pub fn schema_validator() -> jsonschema::Validator {
    let raw = include_str!("../vega-lite-v5.schema.json");
    let mut schema: Value = serde_json::from_str(raw).unwrap();
    fn fix(v: &mut Value) {
        match v {
            Value::Object(map) => {
                for (k, v) in map.iter_mut() {
                    if k == "$ref" {
                        if let Value::String(s) = v {
                            *s = encode_ref(s);
                        }
                    } else {
                        fix(v);
                    }
                }
            }
            Value::Array(items) => items.iter_mut().for_each(fix),
            _ => {}
        }
    }
    fix(&mut schema);
    jsonschema::draft7::new(&schema).unwrap()
}

fn encode_ref(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '<' => out.push_str("%3C"),
            '>' => out.push_str("%3E"),
            '|' => out.push_str("%7C"),
            ' ' => out.push_str("%20"),
            '"' => out.push_str("%22"),
            '{' => out.push_str("%7B"),
            '}' => out.push_str("%7D"),
            '[' => out.push_str("%5B"),
            ']' => out.push_str("%5D"),
            c => out.push(c),
        }
    }
    out
}

pub fn schema_errors(v: &jsonschema::Validator, spec: &Value) -> Vec<String> {
    v.iter_errors(spec).map(|e| format!("{} at {}", e, e.instance_path())).collect()
}

pub const SALES: &[u8] = include_bytes!("../../../../data/sales.csv");
