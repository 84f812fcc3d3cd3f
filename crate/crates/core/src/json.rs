//! JSON encoding of configurations, trace events and digests.
//!
//! A configuration is an object `{"actors": [...]}`; each actor carries its
//! `name`, `process` (in source syntax), `state` (field to value) and
//! `queue`. A queued message has `method` and `args`, plus `target` for
//! abstract messages and `sigma` when decorated. Values are written in
//! source syntax, so they round-trip through the parser.

use serde_json::{json, Map, Value as Json};
use sha2::{Digest, Sha256};

use crate::deciders::AnyConfig;
use crate::semantics::{
    render_decoration, AbstractMessage, ActorTerm, Allocator, Config, Label, Message, QueueItem,
    State,
};
use crate::syntax::{parse_process, parse_value, ActorName, FieldName, MethodName, Value};

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error("malformed configuration: {0}")]
    Shape(String),
    #[error("cannot parse {what} `{text}`: {message}")]
    Syntax {
        what: &'static str,
        text: String,
        message: String,
    },
}

fn shape(msg: impl Into<String>) -> JsonError {
    JsonError::Shape(msg.into())
}

fn message_json<M: QueueItem>(m: &M) -> Json {
    let mut o = Map::new();
    o.insert("method".into(), json!(m.message().method.to_string()));
    o.insert(
        "args".into(),
        Json::Array(m.message().args.iter().map(|v| json!(v.to_string())).collect()),
    );
    if let Some(t) = m.target() {
        o.insert("target".into(), json!(t.to_string()));
    }
    if M::DECORATED {
        o.insert("sigma".into(), json!(m.sigma()));
    }
    Json::Object(o)
}

/// The JSON form of a configuration. Actors appear in name order.
pub fn config_to_json<M: QueueItem>(c: &Config<M>) -> Json {
    let actors: Vec<Json> = c
        .actors
        .iter()
        .map(|(name, t)| {
            let mut o = Map::new();
            o.insert("name".into(), json!(name.to_string()));
            o.insert("process".into(), json!(t.process.to_string()));
            if M::DECORATED {
                o.insert("sigma".into(), json!(t.sigma));
            }
            let state: Map<String, Json> = t
                .state
                .iter()
                .map(|(f, v)| (f.to_string(), json!(v.to_string())))
                .collect();
            o.insert("state".into(), Json::Object(state));
            o.insert(
                "queue".into(),
                Json::Array(t.queue.iter().map(message_json).collect()),
            );
            Json::Object(o)
        })
        .collect();
    json!({ "actors": actors })
}

pub fn any_config_to_json(c: &AnyConfig) -> Json {
    match c {
        AnyConfig::Concrete(c) => config_to_json(c),
        AnyConfig::Abstract(c) => config_to_json(c),
    }
}

/// The first 16 hexadecimal digits of the SHA-256 hash of the compact JSON
/// text.
pub fn digest(j: &Json) -> String {
    let text = serde_json::to_string(j).expect("JSON values serialize");
    let hash = Sha256::digest(text.as_bytes());
    hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

pub fn config_digest<M: QueueItem>(c: &Config<M>) -> String {
    digest(&config_to_json(c))
}

/// One line of a JSON trace.
pub fn trace_event<M: QueueItem>(step: usize, label: &Label, c: &Config<M>, full: bool) -> Json {
    let cj = config_to_json(c);
    let mut o = Map::new();
    o.insert("step".into(), json!(step));
    o.insert("rule".into(), json!(label.rule.tag()));
    o.insert("actor".into(), json!(label.actor.to_string()));
    o.insert("config-digest".into(), json!(digest(&cj)));
    if M::BY_CLASS || M::DECORATED {
        o.insert("label".into(), label_json(label));
    }
    if full {
        o.insert("config".into(), cj);
    }
    Json::Object(o)
}

/// A transition label: rule, actor, decoration and emitted message.
pub fn label_json(label: &Label) -> Json {
    let mut o = Map::new();
    o.insert("rule".into(), json!(label.rule.tag()));
    o.insert("actor".into(), json!(label.actor.to_string()));
    o.insert("sigma".into(), json!(render_decoration(&label.sigma)));
    if let Some((m, target)) = &label.emitted {
        o.insert(
            "emitted".into(),
            json!({
                "method": m.method.to_string(),
                "args": m.args.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "target": target.to_string(),
            }),
        );
    }
    Json::Object(o)
}

fn str_field<'a>(o: &'a Map<String, Json>, key: &str) -> Result<&'a str, JsonError> {
    o.get(key)
        .and_then(Json::as_str)
        .ok_or_else(|| shape(format!("missing string field `{key}`")))
}

fn value(text: &str) -> Result<Value, JsonError> {
    parse_value(text).map_err(|e| JsonError::Syntax {
        what: "value",
        text: text.into(),
        message: e.to_string(),
    })
}

fn actor(text: &str) -> Result<ActorName, JsonError> {
    match value(text)? {
        Value::Actor(a) => Ok(a),
        _ => Err(shape(format!("`{text}` is not an actor name"))),
    }
}

struct RawActor {
    name: ActorName,
    term: ActorTerm<Message>,
    targets: Vec<Option<ActorName>>,
}

fn read_actors(j: &Json) -> Result<Vec<RawActor>, JsonError> {
    let actors = j
        .get("actors")
        .and_then(Json::as_array)
        .ok_or_else(|| shape("missing `actors` array"))?;
    let mut out = Vec::new();
    for a in actors {
        let o = a.as_object().ok_or_else(|| shape("actor is not an object"))?;
        let name = actor(str_field(o, "name")?)?;
        let ptext = o.get("process").and_then(Json::as_str).unwrap_or("0");
        let process = parse_process(ptext).map_err(|e| JsonError::Syntax {
            what: "process",
            text: ptext.into(),
            message: e.to_string(),
        })?;
        let mut state = State::new();
        if let Some(s) = o.get("state") {
            let s = s.as_object().ok_or_else(|| shape("`state` is not an object"))?;
            for (f, v) in s {
                let v = v.as_str().ok_or_else(|| shape("state value is not a string"))?;
                state.insert(FieldName::new(f), value(v)?);
            }
        }
        let mut term = ActorTerm::idle(state);
        term.process = process;
        let mut targets = Vec::new();
        if let Some(q) = o.get("queue") {
            let q = q.as_array().ok_or_else(|| shape("`queue` is not an array"))?;
            for m in q {
                let mo = m.as_object().ok_or_else(|| shape("message is not an object"))?;
                let method = MethodName::new(str_field(mo, "method")?);
                let args = match mo.get("args") {
                    None => Vec::new(),
                    Some(a) => a
                        .as_array()
                        .ok_or_else(|| shape("`args` is not an array"))?
                        .iter()
                        .map(|v| v.as_str().ok_or_else(|| shape("argument is not a string")).and_then(value))
                        .collect::<Result<_, _>>()?,
                };
                term.queue.push_back(Message { method, args });
                targets.push(mo.get("target").and_then(Json::as_str).map(actor).transpose()?);
            }
        }
        out.push(RawActor { name, term, targets });
    }
    Ok(out)
}

/// Read a configuration. It is abstract when some queued message names a
/// target, and concrete otherwise.
pub fn any_config_from_json(j: &Json) -> Result<AnyConfig, JsonError> {
    let raw = read_actors(j)?;
    let is_abstract = raw.iter().any(|a| a.targets.iter().any(Option::is_some));
    if !is_abstract {
        let actors = raw.into_iter().map(|a| (a.name, a.term)).collect();
        let alloc = Allocator::covering(&actors);
        return Ok(AnyConfig::Concrete(Config { actors, alloc }));
    }
    let actors = raw
        .into_iter()
        .map(|a| {
            let queue = a
                .term
                .queue
                .iter()
                .zip(&a.targets)
                .map(|(m, t)| AbstractMessage {
                    msg: m.clone(),
                    sigma: Vec::new(),
                    target: t.clone().unwrap_or_else(|| a.name.clone()),
                })
                .collect();
            let term = ActorTerm {
                process: a.term.process,
                sigma: Vec::new(),
                state: a.term.state,
                queue,
            };
            (a.name, term)
        })
        .collect();
    let alloc = Allocator::covering(&actors);
    Ok(AnyConfig::Abstract(Config { actors, alloc }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{initial_configuration, run, Policy};
    use crate::syntax::parse_program;

    #[test]
    fn configurations_round_trip() {
        let p = parse_program(
            "class C(f) { def m(x) = x!n(x) def n(y) = 0 } main { let c = new C(u) in c!m(c) . c!n(u) }",
        )
        .unwrap();
        let t = run(&p, &Policy::DeterministicFirst, 3);
        for c in std::iter::once(&t.initial).chain(t.events.iter().map(|e| &e.config)) {
            let j = config_to_json(c);
            let back = any_config_from_json(&j).unwrap();
            assert_eq!(back, AnyConfig::Concrete(c.clone()));
        }
    }

    #[test]
    fn digest_is_stable_and_short() {
        let p = parse_program("main { 0 }").unwrap();
        let c = initial_configuration(&p);
        let d = config_digest(&c);
        assert_eq!(d.len(), 16);
        assert_eq!(d, config_digest(&c.clone()));
        let text = serde_json::to_string(&config_to_json(&c)).unwrap();
        assert_eq!(text, r#"{"actors":[{"name":"Root#0","process":"0","queue":[],"state":{}}]}"#);
    }

    #[test]
    fn abstract_targets_are_detected() {
        let j: Json = serde_json::from_str(
            r#"{"actors":[{"name":"A#0","process":"0","state":{},"queue":[{"method":"m","args":[],"target":"A#3"}]}]}"#,
        )
        .unwrap();
        let AnyConfig::Abstract(c) = any_config_from_json(&j).unwrap() else { panic!() };
        assert_eq!(c.actors[&ActorName::new("A", 0)].queue[0].target, ActorName::new("A", 3));
    }

    #[test]
    fn malformed_input_is_rejected() {
        let j: Json = serde_json::from_str(r#"{"actors":[{"process":"0"}]}"#).unwrap();
        assert!(any_config_from_json(&j).is_err());
        let j: Json = serde_json::from_str(r#"{"actors":[{"name":"A#0","process":"x!"}]}"#).unwrap();
        assert!(any_config_from_json(&j).is_err());
    }
}
