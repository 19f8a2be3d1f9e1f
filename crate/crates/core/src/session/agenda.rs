//! The interview agenda: which goals are pursued, in which order.

use crate::kb::{Dimension, KnowledgeBase};

/// A goal attribute and the dimension it reports on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Goal {
    pub attribute: String,
    pub dimension: Dimension,
}

/// Name of the verdict goal for `dimension`.
pub fn verdict_attribute(dimension: Dimension) -> String {
    format!("{}_verdict", dimension.as_str())
}

/// Name of the caveat goal for `dimension`.
pub fn caveat_attribute(dimension: Dimension) -> String {
    format!("{}_caveats", dimension.as_str())
}

/// Goals in interview order. Dimensions are taken in [`Dimension::ALL`]
/// order; within a dimension the verdict goal comes first, then the caveat
/// goal, then any other goals by id.
///
/// A goal is a derived attribute of the dimension that nothing else reads,
/// i.e. an end point of reasoning. For the risk and cost/benefit groups
/// every calculator output is also a goal, since the report presents them
/// directly.
pub fn agenda(kb: &KnowledgeBase) -> Vec<Goal> {
    let mut goals = Vec::new();
    for dimension in Dimension::ALL {
        let verdict = verdict_attribute(dimension);
        let caveats = caveat_attribute(dimension);
        let reported = matches!(dimension, Dimension::Risk | Dimension::Costbenefit);
        let mut ids: Vec<&str> = kb
            .attributes_in(dimension)
            .filter(|a| !a.askable)
            .filter(|a| !kb.is_referenced(&a.id) || (reported && kb.binding(&a.id).is_some()))
            .map(|a| a.id.as_str())
            .collect();
        ids.sort_by_key(|id| (*id != verdict, *id != caveats, *id));
        goals.extend(ids.into_iter().map(|id| Goal { attribute: id.to_string(), dimension }));
    }
    goals
}

/// Goal attribute ids in interview order.
pub fn goal_ids(kb: &KnowledgeBase) -> Vec<String> {
    agenda(kb).into_iter().map(|g| g.attribute).collect()
}
