use std::fmt;

use serde::Serialize;

use super::StmModel;

/// A clause read as a rule: the conjunction of its included literals and
/// the weight it casts for every class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rule {
    pub clause: usize,
    /// Included features, as tokens when the model has a vocabulary.
    pub conditions: Vec<String>,
    pub weights: Vec<i32>,
    /// Class with the largest absolute weight (lowest index on ties).
    pub class: usize,
    pub class_name: String,
}

impl Rule {
    pub fn weight(&self) -> i32 {
        self.weights[self.class]
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.weight();
        let not = if w < 0 { "NOT " } else { "" };
        write!(f, "IF {} THEN {not}{} (w={w})", self.conditions.join(" AND "), self.class_name)
    }
}

/// Rules for every clause with at least one included literal, strongest
/// first by maximum absolute weight, truncated to `top_k`.
pub fn export_rules(model: &StmModel, top_k: usize) -> Vec<Rule> {
    let limits = model.bank().limits();
    let classes = model.class_count() as usize;
    let mut rules: Vec<Rule> = model
        .bank()
        .clauses()
        .iter()
        .enumerate()
        .filter_map(|(j, clause)| {
            let included = clause.included_literals(limits);
            if included.is_empty() {
                return None;
            }
            let conditions = included
                .iter()
                .map(|&f| match model.meta.vocabulary.as_ref().and_then(|v| v.token(f)) {
                    Some(tok) => tok.to_owned(),
                    None => format!("x{f}"),
                })
                .collect();
            let weights: Vec<i32> = (0..classes).map(|c| model.weights().get(c, j)).collect();
            let mut class = 0;
            for c in 1..classes {
                if weights[c].unsigned_abs() > weights[class].unsigned_abs() {
                    class = c;
                }
            }
            let class_name = match &model.meta.class_names {
                Some(names) => names[class].clone(),
                None => class.to_string(),
            };
            Some(Rule { clause: j, conditions, weights, class, class_name })
        })
        .collect();
    rules.sort_by(|a, b| b.weight().unsigned_abs().cmp(&a.weight().unsigned_abs()).then(a.clause.cmp(&b.clause)));
    rules.truncate(top_k);
    rules
}
