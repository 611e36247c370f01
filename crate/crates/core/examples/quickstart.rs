//! Minimal end-to-end use of the library: parse a graph, score one pair,
//! evaluate one missing-link split. Mirrors the README example.

use lbnet::evaluation::{auc_predictor, split_missing, AucMethod};
use lbnet::graph::{EdgeListOptions, Graph};
use lbnet::predictors::{lb_score, PredictorId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Two 4-cliques joined by the bridge c-e.
    let text = "a b\na c\na d\nb c\nb d\nc d\ne f\ne g\ne h\nf g\nf h\ng h\nc e\n";
    let g = Graph::from_edge_list_str(text, &EdgeListOptions::default())?;
    let score = lb_score(&g, 0, 4)?;
    let split = split_missing(&g, 0.25, 7)?;
    let outcome = auc_predictor(&split, PredictorId::Lb, AucMethod::Exact, 0, 0)?;
    println!("lb(a, e) = {score:.3}, auc = {:.3}", outcome.value);
    Ok(())
}
