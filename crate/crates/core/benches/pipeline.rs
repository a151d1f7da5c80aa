use std::hint::black_box;

use compareviz_core::dataset::{apply_filter_with, column_stats, load_dataset, Comparator, Measure, Predicate, Threshold};
use compareviz_core::engine::{Engine, EngineConfig};
use compareviz_core::lexicon::Lexicon;
use compareviz_core::par::Execution;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const UTTERANCES: [&str; 8] = [
    "compare the user rating of The Alchemist and Becoming",
    "compare the popularity of a cheap book and a bestseller book",
    "compare the price of The Alchemist to other fiction books",
    "compare the popularity of a cheap book to other high rated books",
    "compare the price across all fiction books",
    "compare the popularity of all expensive books",
    "compare fiction books to non fiction books in terms of price",
    "compare high rated non fiction books to cheap non fiction books in terms of popularity",
];

fn batch(c: &mut Criterion) {
    let d = load_dataset(include_bytes!("../../../data/books.csv")).unwrap();
    let engine = Engine::new(d, Lexicon::default(), EngineConfig::default());
    let queries: Vec<&str> = UTTERANCES.iter().cycle().take(64).copied().collect();
    let mut g = c.benchmark_group("query_batch");
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(engine.query_batch(&queries, exec)))
        });
    }
    g.finish();
}

fn filter_scan(c: &mut Criterion) {
    let mut csv = String::from("Id,X\n");
    for i in 0..200_000u64 {
        csv.push_str(&format!("r{i},{}\n", (i * 7919) % 10_007));
    }
    let d = load_dataset(csv.as_bytes()).unwrap();
    let stats = column_stats(&d, "X").unwrap();
    let pred = Predicate::new(Measure::Attribute("X".into()), Comparator::Gt, Threshold::Percentile { p: 80.0 });
    let mut g = c.benchmark_group("filter_scan");
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(apply_filter_with(&d, &pred, Some(&stats), exec).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, batch, filter_scan);
criterion_main!(benches);
