//! Depth-first finite reachability trees with domination pruning.

use std::collections::{BTreeSet, HashSet};

use crate::explore::normalize;
use crate::order::{ConfigKey, Mode};
use crate::semantics::{successors, Config, ErrorMarker, Label, QueueItem};
use crate::syntax::{Program, VarName};

/// A node dominating one of its proper ancestors, with the labels of the
/// path between them.
#[derive(Clone, Debug)]
pub struct Domination<M> {
    pub ancestor: Config<M>,
    pub descendant: Config<M>,
    pub path: Vec<Label>,
    pub ancestor_depth: usize,
}

#[derive(Clone, Debug)]
pub struct FrtResult<M> {
    /// Tree nodes expanded or closed.
    pub nodes: usize,
    pub witness: Option<Domination<M>>,
    /// Error markers of erroneous leaves, deduplicated.
    pub errors: Vec<ErrorMarker>,
    /// The node budget ran out before the tree was complete.
    pub exhausted: bool,
}

struct Frame<M> {
    config: Config<M>,
    key: ConfigKey,
    label: Option<Label>,
    children: Vec<(Label, Config<M>)>,
    next: usize,
}

/// Build the tree from `init`. A node is a leaf when it has no successor,
/// when some actor is stuck on an error, or when it dominates a proper
/// ancestor; the search stops at the first domination. Subtrees already
/// closed without a domination are not expanded again.
pub fn finite_reachability_tree<M: QueueItem>(
    program: &Program,
    init: Config<M>,
    mode: Mode,
    main_free: &BTreeSet<VarName>,
    budget: usize,
) -> FrtResult<M> {
    let mut result = FrtResult {
        nodes: 0,
        witness: None,
        errors: Vec::new(),
        exhausted: false,
    };
    let mut closed: HashSet<Config<M>> = HashSet::new();
    let mut stack: Vec<Frame<M>> = Vec::new();
    let mut pending: Option<(Option<Label>, Config<M>)> = Some((None, normalize(&init)));
    loop {
        if let Some((label, config)) = pending.take() {
            if !closed.contains(&config) {
                result.nodes += 1;
                if result.nodes > budget {
                    result.exhausted = true;
                    return result;
                }
                let key = ConfigKey::of(&config, mode, main_free);
                if let Some(d) = stack.iter().position(|f| f.key.leq(&key)) {
                    let mut path: Vec<Label> = stack[d + 1..]
                        .iter()
                        .filter_map(|f| f.label.clone())
                        .collect();
                    path.extend(label);
                    result.witness = Some(Domination {
                        ancestor: stack[d].config.clone(),
                        descendant: config,
                        path,
                        ancestor_depth: d,
                    });
                    return result;
                }
                let succ = successors(program, &config);
                let children = if succ.errors.is_empty() {
                    succ.steps
                        .into_iter()
                        .map(|s| (s.label, normalize(&s.config)))
                        .collect()
                } else {
                    for e in succ.errors {
                        if !result.errors.contains(&e) {
                            result.errors.push(e);
                        }
                    }
                    Vec::new()
                };
                stack.push(Frame {
                    config,
                    key,
                    label,
                    children,
                    next: 0,
                });
            }
        }
        let Some(top) = stack.last_mut() else {
            return result;
        };
        if top.next < top.children.len() {
            let (l, c) = top.children[top.next].clone();
            top.next += 1;
            pending = Some((Some(l), c));
        } else {
            let done = stack.pop().expect("non-empty stack");
            closed.insert(done.config);
        }
    }
}
