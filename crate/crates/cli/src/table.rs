//! Plain-text renderings for `--format table`.

use compareviz_core::catalog::catalog_document;
use compareviz_core::engine::QueryResponse;
use compareviz_core::parser::ParsedComparison;
use compareviz_core::resolver::ResolutionPlan;

/// Left-aligned columns separated by two spaces; the last column is not padded.
fn render(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (i, cell) in row.iter().enumerate() {
            if i + 1 == row.len() {
                line.push_str(cell);
            } else {
                line.push_str(&format!("{cell:<w$}  ", w = widths[i]));
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn row<const N: usize>(cells: [&str; N]) -> Vec<String> {
    cells.iter().map(|s| s.to_string()).collect()
}

pub fn classify(p: &ParsedComparison) -> String {
    let values: Vec<String> = p.value_refs.iter().map(|v| v.label()).collect();
    let attribute = p
        .attribute_ref
        .explicit_attribute()
        .map(str::to_string)
        .unwrap_or_else(|| format!("{} (implicit)", p.attribute_ref.surface));
    render(&[
        row(["cardinality", p.cardinality.as_str()]),
        row(["cell", p.concreteness.cell.as_str()]),
        row(["mixed_flag", if p.concreteness.mixed_flag { "true" } else { "false" }]),
        row(["values", &values.join(" | ")]),
        row(["attribute", &attribute]),
    ])
}

pub fn resolve(plan: &ResolutionPlan) -> String {
    let mut rows = vec![row(["reference", "index", "chosen", "confidence", "interpretation"])];
    for (reference, entry) in &plan.entries {
        for (i, interp) in entry.interpretations.iter().enumerate() {
            rows.push(vec![
                reference.clone(),
                i.to_string(),
                if i == entry.chosen { "*".into() } else { String::new() },
                format!("{:.2}", interp.confidence),
                interp.provenance.clone(),
            ]);
        }
    }
    render(&rows)
}

pub fn recommend(r: &QueryResponse) -> String {
    let mut rows = vec![row(["rank", "tier", "design", "name"])];
    for s in &r.recommendations {
        rows.push(vec![
            s.rank.to_string(),
            s.tier.to_string(),
            s.design.id.to_string(),
            s.design.name.clone(),
        ]);
    }
    render(&rows)
}

pub fn catalog() -> String {
    let doc = catalog_document();
    let mut rows = vec![row(["design", "cardinality", "name"])];
    for d in &doc.designs {
        rows.push(vec![d.id.to_string(), d.cardinality.to_string(), d.name.clone()]);
    }
    render(&rows)
}
