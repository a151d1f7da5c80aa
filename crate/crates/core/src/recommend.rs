use serde::{Deserialize, Serialize};

use crate::catalog::{lookup, preference_tiers, DesignDescriptor};
use crate::error::Result;
use crate::parser::ParsedComparison;
use crate::resolver::ResolutionPlan;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recommendation {
    pub design: DesignDescriptor,
    pub rank: usize,
    pub tier: usize,
    pub rationale: String,
}

/// The four designs of the comparison's cardinality in preference order.
/// Tied designs keep catalog-letter order. The concreteness cell does not
/// change the order.
pub fn recommend(p: &ParsedComparison, plan: &ResolutionPlan) -> Result<Vec<Recommendation>> {
    plan.check(p)?;
    let tiers = preference_tiers(p.cardinality);
    let order = tiers
        .iter()
        .map(|t| {
            t.iter()
                .map(|id| id.to_string())
                .collect::<Vec<_>>()
                .join(" = ")
        })
        .collect::<Vec<_>>()
        .join(" > ");
    let mut out = Vec::with_capacity(4);
    for (t, tier) in tiers.iter().enumerate() {
        for id in tier {
            let rank = out.len() + 1;
            let tie = if tier.len() > 1 { ", tied within its tier" } else { "" };
            out.push(Recommendation {
                design: lookup(*id),
                rank,
                tier: t + 1,
                rationale: format!(
                    "{} ranks {rank} of 4 for {} comparisons (tier {} of {}{tie}; preference order {order})",
                    id,
                    p.cardinality,
                    t + 1,
                    tiers.len()
                ),
            });
        }
    }
    Ok(out)
}
