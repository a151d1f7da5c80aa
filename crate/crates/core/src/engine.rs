//! The whole pipeline for one dataset: parse, resolve, recommend, emit.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::catalog::DesignDescriptor;
use crate::dataset::{Dataset, StatsCache};
use crate::emitter::{emit_prepared, prepare, ChartSpec, EmitterConfig};
use crate::error::Result;
use crate::lexicon::Lexicon;
use crate::par::{self, Execution};
use crate::parser::{ParsedComparison, Parser, ParserConfig, SchemaIndex};
use crate::recommend::recommend;
use crate::resolver::{build_plan, ResolutionPlan, ResolverConfig};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EngineConfig {
    pub parser: ParserConfig,
    pub resolver: ResolverConfig,
    pub emitter: EmitterConfig,
    pub execution: Execution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedSpec {
    pub rank: usize,
    pub tier: usize,
    pub design: DesignDescriptor,
    pub rationale: String,
    pub spec: ChartSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResponse {
    pub query_id: String,
    pub parse: ParsedComparison,
    pub plan: ResolutionPlan,
    pub recommendations: Vec<RankedSpec>,
}

/// First 16 hex digits of SHA-256 over the utterance and the chosen
/// interpretation indices.
pub fn query_id(utterance: &str, choices: &[(String, usize)]) -> String {
    let mut h = Sha256::new();
    h.update(utterance.as_bytes());
    for (reference, index) in choices {
        h.update(format!("\n{reference}={index}").as_bytes());
    }
    h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone)]
pub struct Engine {
    dataset: Dataset,
    lexicon: Lexicon,
    index: SchemaIndex,
    stats: StatsCache,
    config: EngineConfig,
}

impl Engine {
    pub fn new(dataset: Dataset, lexicon: Lexicon, config: EngineConfig) -> Self {
        let index = SchemaIndex::new(&dataset, config.parser.fuzzy);
        let stats = StatsCache::build(&dataset);
        Self {
            dataset,
            lexicon,
            index,
            stats,
            config,
        }
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn stats(&self) -> &StatsCache {
        &self.stats
    }

    pub fn parse(&self, utterance: &str) -> Result<ParsedComparison> {
        Parser::with_index(&self.index, &self.lexicon).parse(utterance)
    }

    pub fn plan(&self, p: &ParsedComparison) -> Result<ResolutionPlan> {
        build_plan(p, &self.dataset, &self.stats, &self.lexicon, &self.config.resolver)
    }

    pub fn query(&self, utterance: &str) -> Result<QueryResponse> {
        self.query_with(utterance, &[])
    }

    /// Runs the pipeline with some interpretations overridden by
    /// `(reference, index)` pairs.
    pub fn query_with(&self, utterance: &str, choices: &[(String, usize)]) -> Result<QueryResponse> {
        let p = self.parse(utterance)?;
        let mut plan = self.plan(&p)?;
        for (reference, index) in choices {
            plan.choose(reference, *index)?;
        }
        self.respond(p, plan)
    }

    pub fn respond(&self, p: ParsedComparison, plan: ResolutionPlan) -> Result<QueryResponse> {
        let recs = recommend(&p, &plan)?;
        let prep = prepare(&p, &plan, &self.dataset, &self.stats, self.config.emitter)?;
        let specs = par::map(&recs, self.config.execution, |r| emit_prepared(r, &prep));
        let recommendations = recs
            .into_iter()
            .zip(specs)
            .map(|(r, spec)| RankedSpec {
                rank: r.rank,
                tier: r.tier,
                design: r.design,
                rationale: r.rationale,
                spec,
            })
            .collect();
        Ok(QueryResponse {
            query_id: query_id(&p.utterance, &plan.choices()),
            parse: p,
            plan,
            recommendations,
        })
    }

    /// Independent queries, in input order.
    pub fn query_batch<S: AsRef<str> + Sync>(&self, utterances: &[S], exec: Execution) -> Vec<Result<QueryResponse>> {
        par::map(utterances, exec, |u| self.query(u.as_ref()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::load_dataset;

    fn engine() -> Engine {
        let d = load_dataset(include_bytes!("../../../data/books.csv")).unwrap();
        Engine::new(d, Lexicon::default(), EngineConfig::default())
    }

    #[test]
    fn query_id_is_content_hash() {
        let a = query_id("compare x and y", &[("attribute".into(), 0)]);
        assert_eq!(a.len(), 16);
        assert_eq!(a, query_id("compare x and y", &[("attribute".into(), 0)]));
        assert_ne!(a, query_id("compare x and y", &[("attribute".into(), 1)]));
    }

    #[test]
    fn explicit_default_choice_keeps_the_id() {
        let e = engine();
        let u = "compare the popularity of The Alchemist and Becoming";
        let a = e.query(u).unwrap();
        let b = e.query_with(u, &[("attribute".into(), 0)]).unwrap();
        assert_eq!(a.query_id, b.query_id);
        assert_eq!(a.recommendations.len(), 4);
        let c = e.query_with(u, &[("attribute".into(), 1)]).unwrap();
        assert_ne!(a.query_id, c.query_id);
        assert_ne!(a.recommendations[0].spec.data, c.recommendations[0].spec.data);
    }

    #[test]
    fn batch_modes_agree() {
        let e = engine();
        let us = [
            "compare the price of The Alchemist to other fiction books",
            "compare fiction books to non fiction books in terms of price",
            "what is the price of Becoming",
        ];
        let seq = e.query_batch(&us, Execution::Sequential);
        let par = e.query_batch(&us, Execution::Parallel);
        assert_eq!(seq.len(), 3);
        for (a, b) in seq.iter().zip(&par) {
            match (a, b) {
                (Ok(a), Ok(b)) => assert_eq!(a, b),
                (Err(a), Err(b)) => assert_eq!(a.code(), b.code()),
                _ => panic!("modes disagree"),
            }
        }
        assert!(seq[2].is_err());
    }
}
