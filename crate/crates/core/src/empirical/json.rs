//! Versioned JSON interchange format for empirical models.
//!
//! ```json
//! {
//!   "version": 1,
//!   "signature": [{"name": "Bob", "settings": [{"label": "0", "outcomes": ["0", "1"]}]}],
//!   "tables": {"0": {"0": 5.0000000000000000e-1, "1": 5.0000000000000000e-1}},
//!   "metadata": {"scenario": "minimal"}
//! }
//! ```
//!
//! Table keys are setting labels joined with `|`; entry keys are outcome
//! labels joined with `,`. Floats are written with 17 significant digits,
//! which reproduces every `f64` bit for bit.

use std::collections::BTreeMap;
use std::io;

use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Map, Value};

use super::{EmpiricalModel, PartySignature, SettingSignature, Signature};
use crate::error::{Error, Result};
use crate::qsim::OutcomeDistribution;

pub const JSON_VERSION: u64 = 1;

struct PreciseFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for PreciseFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty-prints a JSON value with 17-significant-digit floats and a
/// trailing newline.
pub fn write_json_value(value: &Value) -> String {
    use serde::Serialize;
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, PreciseFormatter(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .expect("serializing to memory cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

pub fn to_json(model: &EmpiricalModel) -> String {
    let sig = &model.signature;
    let signature: Vec<Value> = sig
        .parties
        .iter()
        .map(|p| {
            json!({
                "name": p.name,
                "settings": p.settings.iter().map(|s| json!({
                    "label": s.label,
                    "outcomes": s.outcomes,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut tables = Map::new();
    for (i, table) in model.tables.iter().enumerate() {
        let entries: Map<String, Value> = table
            .iter()
            .map(|(labels, p)| (labels.join(","), json!(p)))
            .collect();
        tables.insert(sig.context_key(&sig.context(i)), Value::Object(entries));
    }
    write_json_value(&json!({
        "version": JSON_VERSION,
        "signature": signature,
        "tables": tables,
        "metadata": model.metadata,
    }))
}

fn escape(token: &str) -> String {
    token.replace('~', "~0").replace('/', "~1")
}

fn violation(path: &str, message: impl Into<String>) -> Error {
    Error::SchemaViolation {
        path: if path.is_empty() {
            "/".into()
        } else {
            path.into()
        },
        message: message.into(),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| violation(path, format!("missing key `{key}`")))
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| violation(path, "expected an object"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| violation(path, "expected an array"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| violation(path, "expected a string"))
}

fn parse_signature(v: &Value) -> Result<Signature> {
    let path = "/signature";
    let mut parties = Vec::new();
    for (i, p) in as_array(v, path)?.iter().enumerate() {
        let ppath = format!("{path}/{i}");
        let obj = as_object(p, &ppath)?;
        let name = as_str(field(obj, &ppath, "name")?, &format!("{ppath}/name"))?;
        let spath = format!("{ppath}/settings");
        let mut settings = Vec::new();
        for (j, s) in as_array(field(obj, &ppath, "settings")?, &spath)?
            .iter()
            .enumerate()
        {
            let sp = format!("{spath}/{j}");
            let sobj = as_object(s, &sp)?;
            let label = as_str(field(sobj, &sp, "label")?, &format!("{sp}/label"))?;
            let op = format!("{sp}/outcomes");
            let outcomes = as_array(field(sobj, &sp, "outcomes")?, &op)?
                .iter()
                .enumerate()
                .map(|(k, o)| as_str(o, &format!("{op}/{k}")).map(str::to_string))
                .collect::<Result<Vec<_>>>()?;
            settings.push(SettingSignature {
                label: label.to_string(),
                outcomes,
            });
        }
        parties.push(PartySignature {
            name: name.to_string(),
            settings,
        });
    }
    Signature::new(parties).map_err(|e| violation(path, e.to_string()))
}

/// Parses and validates a model. Every context and every outcome tuple must
/// be present exactly once.
pub fn from_json(bytes: &[u8]) -> Result<EmpiricalModel> {
    let root: Value =
        serde_json::from_slice(bytes).map_err(|e| violation("", format!("not valid JSON: {e}")))?;
    let obj = as_object(&root, "")?;
    match field(obj, "", "version")?.as_u64() {
        Some(JSON_VERSION) => {}
        _ => return Err(violation("/version", format!("expected {JSON_VERSION}"))),
    }
    let signature = parse_signature(field(obj, "", "signature")?)?;

    let tables_obj = as_object(field(obj, "", "tables")?, "/tables")?;
    let keys: Vec<String> = signature
        .contexts()
        .iter()
        .map(|c| signature.context_key(c))
        .collect();
    if let Some(extra) = tables_obj.keys().find(|k| !keys.contains(k)) {
        return Err(violation(
            &format!("/tables/{}", escape(extra)),
            "unknown context",
        ));
    }
    let mut tables = Vec::with_capacity(keys.len());
    for (i, key) in keys.iter().enumerate() {
        let tpath = format!("/tables/{}", escape(key));
        let entries = tables_obj
            .get(key)
            .ok_or_else(|| violation("/tables", format!("missing context `{key}`")))?;
        let entries = as_object(entries, &tpath)?;
        let alphabets = signature.outcome_alphabets(&signature.context(i));
        let size: usize = alphabets.iter().map(Vec::len).product();
        let mut probs = Vec::with_capacity(size);
        let mut expected = Vec::with_capacity(size);
        for flat in 0..size {
            let tuple = crate::qsim::unflatten(&alphabets, flat);
            let tkey = tuple
                .iter()
                .zip(&alphabets)
                .map(|(&k, a)| a[k].as_str())
                .collect::<Vec<_>>()
                .join(",");
            let epath = format!("{tpath}/{}", escape(&tkey));
            let p = entries
                .get(&tkey)
                .ok_or_else(|| violation(&tpath, format!("missing outcome `{tkey}`")))?
                .as_f64()
                .ok_or_else(|| violation(&epath, "expected a number"))?;
            probs.push(p);
            expected.push(tkey);
        }
        if let Some(extra) = entries.keys().find(|k| !expected.contains(k)) {
            return Err(violation(
                &format!("{tpath}/{}", escape(extra)),
                "unknown outcome tuple",
            ));
        }
        tables.push(
            OutcomeDistribution::new(alphabets, probs)
                .map_err(|e| violation(&tpath, e.to_string()))?,
        );
    }

    let mut metadata = BTreeMap::new();
    if let Some(m) = obj.get("metadata") {
        for (k, v) in as_object(m, "/metadata")? {
            let s = as_str(v, &format!("/metadata/{}", escape(k)))?;
            metadata.insert(k.clone(), s.to_string());
        }
    }
    EmpiricalModel::new(signature, tables, metadata).map_err(|e| violation("", e.to_string()))
}
