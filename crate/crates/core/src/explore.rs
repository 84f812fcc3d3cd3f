//! Exhaustive forward exploration of the reachable configurations, used as
//! the reference against which the deciders are checked.

use std::collections::{HashMap, VecDeque};

use crate::order::{canonical_process, Mode};
use crate::semantics::{successors, Config, QueueItem};
use crate::syntax::{free_vars_ordered, substitute, Process, Program, Subst, Value, VarName};

/// Rename the fresh variables `$k` of a configuration to `$0, $1, ...` in
/// order of first occurrence (actors by name; state, then process, then
/// queue) and reset the fresh-variable counter past them. Configurations
/// with equal normal forms have isomorphic futures.
pub fn normalize<M: QueueItem>(c: &Config<M>) -> Config<M> {
    let mut map: HashMap<u32, u32> = HashMap::new();
    let see = |v: &Value, map: &mut HashMap<u32, u32>| {
        if let Value::Var(VarName::Fresh(k)) = v {
            let n = map.len() as u32;
            map.entry(*k).or_insert(n);
        }
    };
    for t in c.actors.values() {
        for v in t.state.values() {
            see(v, &mut map);
        }
        for x in free_vars_ordered(&t.process) {
            see(&Value::Var(x), &mut map);
        }
        for m in &t.queue {
            for v in &m.message().args {
                see(v, &mut map);
            }
        }
    }
    let rename = |v: &Value| match v {
        Value::Var(VarName::Fresh(k)) => Value::Var(VarName::Fresh(map[k])),
        other => other.clone(),
    };
    let subst: Subst = map
        .iter()
        .map(|(&k, &n)| (VarName::Fresh(k), Value::Var(VarName::Fresh(n))))
        .collect();
    let identity = map.iter().all(|(k, n)| k == n);
    let mut out = c.clone();
    for t in out.actors.values_mut() {
        if identity {
            break;
        }
        for v in t.state.values_mut() {
            *v = rename(v);
        }
        t.process = substitute(&t.process, &subst);
        t.queue = t
            .queue
            .iter()
            .map(|m| {
                let mut msg = m.message().clone();
                msg.args = msg.args.iter().map(rename).collect();
                M::build(
                    msg,
                    m.sigma().to_vec(),
                    m.target().unwrap_or(&crate::syntax::ActorName::root()),
                )
            })
            .collect();
    }
    out.alloc.next_fresh = map.len() as u32;
    out
}

/// The reachable part of a transition system, up to fresh-variable
/// renaming.
#[derive(Clone, Debug)]
pub struct StateSpace<M> {
    pub states: Vec<Config<M>>,
    pub edges: Vec<Vec<usize>>,
    /// Some actor of the state is stuck on an error; such states are not
    /// expanded.
    pub erroneous: Vec<bool>,
    /// False when a bound was hit before the frontier emptied.
    pub complete: bool,
}

/// Size limits for an exploration. States exceeding them are dropped and
/// the space is marked incomplete.
#[derive(Clone, Copy, Debug)]
pub struct Bounds {
    pub states: usize,
    /// Longest queue of a single actor.
    pub queue: usize,
    pub actors: usize,
}

impl Bounds {
    pub fn states(states: usize) -> Self {
        Bounds { states, queue: 64, actors: 64 }
    }
}

/// Breadth-first exploration from `init`, visiting at most `max_states`
/// states with the default queue and actor limits.
pub fn explore<M: QueueItem>(program: &Program, init: Config<M>, max_states: usize) -> StateSpace<M> {
    explore_within(program, init, Bounds::states(max_states))
}

/// Breadth-first exploration from `init` within `bounds`.
pub fn explore_within<M: QueueItem>(program: &Program, init: Config<M>, bounds: Bounds) -> StateSpace<M> {
    let max_states = bounds.states;
    let init = normalize(&init);
    let mut index: HashMap<Config<M>, usize> = HashMap::new();
    index.insert(init.clone(), 0);
    let mut space = StateSpace {
        states: vec![init],
        edges: vec![Vec::new()],
        erroneous: vec![false],
        complete: true,
    };
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let succ = successors(program, &space.states[i]);
        if !succ.errors.is_empty() {
            space.erroneous[i] = true;
            continue;
        }
        let mut out = Vec::with_capacity(succ.steps.len());
        for step in succ.steps {
            let c = normalize(&step.config);
            if c.actors.len() > bounds.actors || c.actors.values().any(|t| t.queue.len() > bounds.queue) {
                space.complete = false;
                continue;
            }
            let j = match index.get(&c) {
                Some(&j) => j,
                None => {
                    if space.states.len() >= max_states {
                        space.complete = false;
                        continue;
                    }
                    let j = space.states.len();
                    index.insert(c.clone(), j);
                    space.states.push(c);
                    space.edges.push(Vec::new());
                    space.erroneous.push(false);
                    queue.push_back(j);
                    j
                }
            };
            out.push(j);
        }
        space.edges[i] = out;
    }
    space
}

impl<M: QueueItem> StateSpace<M> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Whether the transition graph has a cycle, by repeatedly removing
    /// states without successors.
    pub fn has_cycle(&self) -> bool {
        let n = self.states.len();
        let mut outdeg: Vec<usize> = self.edges.iter().map(Vec::len).collect();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, es) in self.edges.iter().enumerate() {
            for &j in es {
                preds[j].push(i);
            }
        }
        let mut ready: Vec<usize> = (0..n).filter(|&i| outdeg[i] == 0).collect();
        let mut removed = 0;
        while let Some(j) = ready.pop() {
            removed += 1;
            for &i in &preds[j] {
                outdeg[i] -= 1;
                if outdeg[i] == 0 {
                    ready.push(i);
                }
            }
        }
        removed < n
    }

    /// `Some(true)` when every run is finite, `Some(false)` when some run is
    /// infinite, `None` when the exploration was cut short.
    pub fn terminates(&self) -> Option<bool> {
        if self.has_cycle() {
            Some(false)
        } else if self.complete {
            Some(true)
        } else {
            None
        }
    }

    /// A shortest path of state indices from the initial state to `j`.
    pub fn path_to(&self, j: usize) -> Vec<usize> {
        let mut parent: Vec<Option<usize>> = vec![None; self.states.len()];
        let mut seen = vec![false; self.states.len()];
        seen[0] = true;
        let mut work = VecDeque::from([0usize]);
        while let Some(i) = work.pop_front() {
            if i == j {
                break;
            }
            for &k in &self.edges[i] {
                if !seen[k] {
                    seen[k] = true;
                    parent[k] = Some(i);
                    work.push_back(k);
                }
            }
        }
        let mut path = vec![j];
        while let Some(i) = parent[*path.last().expect("non-empty")] {
            path.push(i);
        }
        path.reverse();
        path
    }

    pub fn any_error(&self) -> bool {
        self.erroneous.iter().any(|&e| e)
    }

    /// Whether some explored state satisfies `pred`; `None` if none does and
    /// the exploration was cut short.
    pub fn reaches(&self, pred: impl Fn(&Config<M>) -> bool) -> Option<bool> {
        if self.states.iter().any(pred) {
            Some(true)
        } else if self.complete {
            Some(false)
        } else {
            None
        }
    }

    /// Whether some actor of some explored state runs a process equal to `q`
    /// up to renaming of variables and actor names.
    pub fn reaches_process(&self, program: &Program, q: &Process) -> Option<bool> {
        let mf = program.main_free();
        let key = canonical_process(q, Mode::Abstract, &mf);
        self.reaches(|c| {
            c.actors
                .values()
                .any(|t| canonical_process(&t.process, Mode::Abstract, &mf) == key)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::initial_configuration;
    use crate::syntax::parse_program;

    #[test]
    fn fresh_variables_are_identified() {
        // Each round instantiates a fresh variable; up to renaming the loop closes.
        let p = parse_program("class C() { def m() = this!n(x) def n(y) = this!m() } main { let c = new C() in c!m() }").unwrap();
        let s = explore(&p, initial_configuration(&p), 1000);
        assert!(s.len() < 1000);
    }

    #[test]
    fn cycles_and_termination() {
        let p = parse_program("class C() { def m() = this!m() } main { let c = new C() in c!m() }")
            .unwrap();
        let s = explore(&p, initial_configuration(&p), 1000);
        assert_eq!(s.terminates(), Some(false));
        let p =
            parse_program("class C() { def m() = 0 } main { let c = new C() in c!m() . c!m() }")
                .unwrap();
        let s = explore(&p, initial_configuration(&p), 1000);
        assert_eq!(s.terminates(), Some(true));
        assert!(!s.any_error());
    }
}
