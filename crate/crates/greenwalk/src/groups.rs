//! Word-problem oracles for the group catalog.
//!
//! Every downstream computation (balls, convolutions, estimators) needs an
//! exact word problem: canonical normal forms with payload equality deciding
//! group equality. The catalog is therefore closed: free groups, free
//! abelian groups, free products of finite cyclics, direct products of
//! catalog entries, and the lamplighter group `Z2 wr Z`. Arbitrary finite
//! presentations are rejected up front rather than half-supported.
//!
//! Generating sets are the standard ones per variant, optionally extended by
//! user-supplied words in the base generators (each added together with its
//! inverse), which is how non-tree Cayley graphs of free groups arise.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

static NEXT_ORACLE_ID: AtomicU64 = AtomicU64::new(1);

/// Catalog group description, deserializable from run configs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GroupSpec {
    /// Free group of the given rank, generators `a, b, c, ...`.
    Free {
        rank: u32,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        extra: Vec<String>,
    },
    /// Free abelian group `Z^rank`, generators `x1, .., xrank`.
    FreeAbelian {
        rank: u32,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        extra: Vec<String>,
    },
    /// Free product of cyclic groups `Z_n1 * Z_n2 * ...`, generators `g1, g2, ...`.
    FreeProduct {
        orders: Vec<u32>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        extra: Vec<String>,
    },
    /// Direct product of two catalog groups; labels get `l.`/`r.` prefixes.
    DirectProduct {
        left: Box<GroupSpec>,
        right: Box<GroupSpec>,
    },
    /// Lamplighter group `Z2 wr Z`; generators `t` (move) and `s` (toggle).
    Lamplighter,
}

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("malformed group spec: {0}")]
    MalformedSpec(String),
    #[error("bad extra generator word {word:?}: {reason}")]
    BadExtraWord { word: String, reason: String },
    #[error("elements belong to different oracles")]
    OracleMismatch,
}

/// Canonical normal-form payload. Equality of payloads from the same oracle
/// is equality in the group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Payload {
    /// Freely reduced word; letter `k > 0` is generator `k-1`, `-k` its inverse.
    Word(Vec<i8>),
    /// Integer coordinate vector.
    Vector(Vec<i64>),
    /// Alternating syllables `(factor, exponent)` with `1 <= exponent < order`.
    Syllables(Vec<(u16, u32)>),
    /// Componentwise pair for direct products.
    Pair(Box<(Payload, Payload)>),
    /// Sorted lit-lamp positions plus head position.
    Lamp { lamps: Vec<i64>, pos: i64 },
}

/// A group element: a normal-form payload tagged with its oracle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    oracle_id: u64,
    payload: Payload,
}

impl GroupElement {
    pub fn payload(&self) -> &Payload {
        &self.payload
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Free { rank: u32 },
    FreeAbelian { rank: u32 },
    FreeProduct { orders: Vec<u32> },
    DirectProduct(Box<Kind>, Box<Kind>),
    Lamplighter,
}

/// Word-problem oracle: multiplication, inversion, identity, normal forms.
///
/// Oracles are immutable after construction and safe to share across
/// threads.
#[derive(Debug, Clone)]
pub struct GroupOracle {
    id: u64,
    kind: Kind,
    spec: GroupSpec,
}

/// Ordered, inversion-closed generating set with labels.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    labels: Vec<String>,
    elements: Vec<GroupElement>,
    inverse: Vec<usize>,
}

impl GeneratorSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn element(&self, i: usize) -> &GroupElement {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    /// Index of the generator whose element is the inverse of generator `i`.
    pub fn inverse_index(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Transience classification per the rank-at-most-two rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Transience {
    Recurrent,
    Transient,
}

impl GroupSpec {
    fn validate(&self) -> Result<(), GroupError> {
        match self {
            GroupSpec::Free { rank, .. } => {
                if *rank < 1 || *rank > 26 {
                    return Err(GroupError::MalformedSpec(format!(
                        "free rank must be in 1..=26, got {rank}"
                    )));
                }
            }
            GroupSpec::FreeAbelian { rank, .. } => {
                if *rank < 1 || *rank > 64 {
                    return Err(GroupError::MalformedSpec(format!(
                        "free abelian rank must be in 1..=64, got {rank}"
                    )));
                }
            }
            GroupSpec::FreeProduct { orders, .. } => {
                if orders.is_empty() || orders.len() > 64 {
                    return Err(GroupError::MalformedSpec(
                        "free product needs 1..=64 factors".into(),
                    ));
                }
                if let Some(o) = orders.iter().find(|&&o| o < 2) {
                    return Err(GroupError::MalformedSpec(format!(
                        "cyclic factor orders must be >= 2, got {o}"
                    )));
                }
            }
            GroupSpec::DirectProduct { left, right } => {
                left.validate()?;
                right.validate()?;
            }
            GroupSpec::Lamplighter => {}
        }
        Ok(())
    }

    /// Rank of the abelian group this spec is virtually equal to, or `None`
    /// if it is not virtually abelian.
    pub fn virtual_abelian_rank(&self) -> Option<u32> {
        match self {
            GroupSpec::Free { rank, .. } => {
                if *rank == 1 {
                    Some(1)
                } else {
                    None
                }
            }
            GroupSpec::FreeAbelian { rank, .. } => Some(*rank),
            GroupSpec::FreeProduct { orders, .. } => match orders.as_slice() {
                [_] => Some(0),
                [2, 2] => Some(1),
                _ => None,
            },
            GroupSpec::DirectProduct { left, right } => {
                Some(left.virtual_abelian_rank()? + right.virtual_abelian_rank()?)
            }
            GroupSpec::Lamplighter => None,
        }
    }
}

/// Recurrent iff the group is virtually abelian of rank at most two
/// (Varopoulos classification); extra generators never change the group.
pub fn classify_transience(spec: &GroupSpec) -> Transience {
    match spec.virtual_abelian_rank() {
        Some(r) if r <= 2 => Transience::Recurrent,
        _ => Transience::Transient,
    }
}

fn base_generators(kind: &Kind) -> (Vec<String>, Vec<Payload>, Vec<usize>) {
    match kind {
        Kind::Free { rank } => {
            let mut labels = Vec::new();
            let mut payloads = Vec::new();
            let mut inv = Vec::new();
            for i in 0..*rank {
                let c = (b'a' + i as u8) as char;
                labels.push(c.to_string());
                payloads.push(Payload::Word(vec![(i + 1) as i8]));
                labels.push(c.to_ascii_uppercase().to_string());
                payloads.push(Payload::Word(vec![-((i + 1) as i8)]));
                inv.push(2 * i as usize + 1);
                inv.push(2 * i as usize);
            }
            (labels, payloads, inv)
        }
        Kind::FreeAbelian { rank } => {
            let mut labels = Vec::new();
            let mut payloads = Vec::new();
            let mut inv = Vec::new();
            for i in 0..*rank as usize {
                let mut v = vec![0i64; *rank as usize];
                v[i] = 1;
                labels.push(format!("x{}", i + 1));
                payloads.push(Payload::Vector(v.clone()));
                v[i] = -1;
                labels.push(format!("X{}", i + 1));
                payloads.push(Payload::Vector(v));
                inv.push(2 * i + 1);
                inv.push(2 * i);
            }
            (labels, payloads, inv)
        }
        Kind::FreeProduct { orders } => {
            let mut labels = Vec::new();
            let mut payloads = Vec::new();
            let mut inv = Vec::new();
            for (i, &o) in orders.iter().enumerate() {
                if o == 2 {
                    labels.push(format!("g{}", i + 1));
                    payloads.push(Payload::Syllables(vec![(i as u16, 1)]));
                    inv.push(inv.len());
                } else {
                    let k = labels.len();
                    labels.push(format!("g{}", i + 1));
                    payloads.push(Payload::Syllables(vec![(i as u16, 1)]));
                    labels.push(format!("G{}", i + 1));
                    payloads.push(Payload::Syllables(vec![(i as u16, o - 1)]));
                    inv.push(k + 1);
                    inv.push(k);
                }
            }
            (labels, payloads, inv)
        }
        Kind::DirectProduct(l, r) => {
            let (ll, lp, li) = base_generators(l);
            let (rl, rp, ri) = base_generators(r);
            let lid = identity_payload(l);
            let rid = identity_payload(r);
            let mut labels = Vec::new();
            let mut payloads = Vec::new();
            let mut inv = Vec::new();
            for (i, (lab, p)) in ll.iter().zip(lp).enumerate() {
                labels.push(format!("l.{lab}"));
                payloads.push(Payload::Pair(Box::new((p, rid.clone()))));
                inv.push(li[i]);
            }
            let off = labels.len();
            for (i, (lab, p)) in rl.iter().zip(rp).enumerate() {
                labels.push(format!("r.{lab}"));
                payloads.push(Payload::Pair(Box::new((lid.clone(), p))));
                inv.push(off + ri[i]);
            }
            (labels, payloads, inv)
        }
        Kind::Lamplighter => (
            vec!["t".into(), "T".into(), "s".into()],
            vec![
                Payload::Lamp {
                    lamps: vec![],
                    pos: 1,
                },
                Payload::Lamp {
                    lamps: vec![],
                    pos: -1,
                },
                Payload::Lamp {
                    lamps: vec![0],
                    pos: 0,
                },
            ],
            vec![1, 0, 2],
        ),
    }
}

fn identity_payload(kind: &Kind) -> Payload {
    match kind {
        Kind::Free { .. } => Payload::Word(vec![]),
        Kind::FreeAbelian { rank } => Payload::Vector(vec![0; *rank as usize]),
        Kind::FreeProduct { .. } => Payload::Syllables(vec![]),
        Kind::DirectProduct(l, r) => {
            Payload::Pair(Box::new((identity_payload(l), identity_payload(r))))
        }
        Kind::Lamplighter => Payload::Lamp {
            lamps: vec![],
            pos: 0,
        },
    }
}

fn kind_of(spec: &GroupSpec) -> Kind {
    match spec {
        GroupSpec::Free { rank, .. } => Kind::Free { rank: *rank },
        GroupSpec::FreeAbelian { rank, .. } => Kind::FreeAbelian { rank: *rank },
        GroupSpec::FreeProduct { orders, .. } => Kind::FreeProduct {
            orders: orders.clone(),
        },
        GroupSpec::DirectProduct { left, right } => {
            Kind::DirectProduct(Box::new(kind_of(left)), Box::new(kind_of(right)))
        }
        GroupSpec::Lamplighter => Kind::Lamplighter,
    }
}

fn extra_words(spec: &GroupSpec) -> &[String] {
    match spec {
        GroupSpec::Free { extra, .. }
        | GroupSpec::FreeAbelian { extra, .. }
        | GroupSpec::FreeProduct { extra, .. } => extra,
        _ => &[],
    }
}

/// Builds the oracle and its symmetric generator set.
pub fn make_group(spec: &GroupSpec) -> Result<(GroupOracle, GeneratorSet), GroupError> {
    spec.validate()?;
    let id = NEXT_ORACLE_ID.fetch_add(1, Ordering::Relaxed);
    let kind = kind_of(spec);
    let oracle = GroupOracle {
        id,
        kind: kind.clone(),
        spec: spec.clone(),
    };

    let (mut labels, payloads, mut inverse) = base_generators(&kind);
    let mut elements: Vec<GroupElement> = payloads
        .into_iter()
        .map(|payload| GroupElement {
            oracle_id: id,
            payload,
        })
        .collect();

    for word in extra_words(spec) {
        let el = parse_word(&oracle, &labels, &elements, word)?;
        if el.payload == identity_payload(&kind) {
            return Err(GroupError::BadExtraWord {
                word: word.clone(),
                reason: "evaluates to the identity".into(),
            });
        }
        let el_inv = oracle.invert(&el);
        let k = labels.len();
        if el == el_inv {
            labels.push(word.clone());
            elements.push(el);
            inverse.push(k);
        } else {
            labels.push(word.clone());
            labels.push(inverse_label(word));
            elements.push(el);
            elements.push(el_inv);
            inverse.push(k + 1);
            inverse.push(k);
        }
    }

    Ok((
        oracle,
        GeneratorSet {
            labels,
            elements,
            inverse,
        },
    ))
}

fn inverse_label(word: &str) -> String {
    if word.chars().all(|c| c.is_ascii_alphabetic()) {
        word.chars()
            .rev()
            .map(|c| {
                if c.is_ascii_lowercase() {
                    c.to_ascii_uppercase()
                } else {
                    c.to_ascii_lowercase()
                }
            })
            .collect()
    } else {
        format!("~{word}")
    }
}

/// Splits a word over generator labels into label indices:
/// whitespace-separated labels, or compact concatenation when every label
/// is a single character.
pub fn parse_word_indices(labels: &[String], word: &str) -> Result<Vec<usize>, GroupError> {
    if word.is_empty() {
        return Err(GroupError::BadExtraWord {
            word: word.into(),
            reason: "empty word".into(),
        });
    }
    let tokens: Vec<String> = if word.contains(char::is_whitespace) {
        word.split_whitespace().map(str::to_owned).collect()
    } else if labels.iter().all(|l| l.len() == 1) {
        word.chars().map(|c| c.to_string()).collect()
    } else {
        vec![word.to_owned()]
    };
    tokens
        .iter()
        .map(|t| {
            labels
                .iter()
                .position(|l| l == t)
                .ok_or_else(|| GroupError::BadExtraWord {
                    word: word.into(),
                    reason: format!("unknown generator label {t:?}"),
                })
        })
        .collect()
}

/// Evaluates a label word against the generator set.
pub fn element_of_word(
    oracle: &GroupOracle,
    gens: &GeneratorSet,
    word: &str,
) -> Result<GroupElement, GroupError> {
    let idx = parse_word_indices(gens.labels(), word)?;
    Ok(oracle.evaluate(gens, &idx))
}

fn parse_word(
    oracle: &GroupOracle,
    labels: &[String],
    elements: &[GroupElement],
    word: &str,
) -> Result<GroupElement, GroupError> {
    let idx = parse_word_indices(labels, word)?;
    let mut acc = oracle.identity();
    for i in idx {
        acc = oracle.multiply(&acc, &elements[i]).expect("same oracle");
    }
    Ok(acc)
}

impl GroupOracle {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            oracle_id: self.id,
            payload: identity_payload(&self.kind),
        }
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        g.payload == identity_payload(&self.kind)
    }

    /// Canonical normal form of `g * h`.
    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement, GroupError> {
        if g.oracle_id != self.id || h.oracle_id != self.id {
            return Err(GroupError::OracleMismatch);
        }
        Ok(GroupElement {
            oracle_id: self.id,
            payload: mul_payload(&self.kind, &g.payload, &h.payload),
        })
    }

    pub fn invert(&self, g: &GroupElement) -> GroupElement {
        debug_assert_eq!(g.oracle_id, self.id);
        GroupElement {
            oracle_id: self.id,
            payload: inv_payload(&self.kind, &g.payload),
        }
    }

    /// Evaluates a word of generator indices left to right.
    pub fn evaluate(&self, gens: &GeneratorSet, word: &[usize]) -> GroupElement {
        let mut acc = self.identity();
        for &i in word {
            acc = self.multiply(&acc, gens.element(i)).expect("same oracle");
        }
        acc
    }

    /// Compact byte encoding of the normal form, appended to `out`.
    /// Decodable by [`GroupOracle::decode`] given the same oracle.
    pub fn encode(&self, g: &GroupElement, out: &mut Vec<u8>) {
        encode_payload(&g.payload, out);
    }

    pub fn decode(&self, bytes: &[u8]) -> GroupElement {
        let (payload, rest) = decode_payload(&self.kind, bytes);
        debug_assert!(rest.is_empty());
        GroupElement {
            oracle_id: self.id,
            payload,
        }
    }

    /// Human-readable normal form for CSV exports and diagnostics.
    pub fn display(&self, g: &GroupElement) -> String {
        display_payload(&self.kind, &g.payload)
    }
}

fn mul_payload(kind: &Kind, a: &Payload, b: &Payload) -> Payload {
    match (kind, a, b) {
        (Kind::Free { .. }, Payload::Word(u), Payload::Word(v)) => {
            let mut w = u.clone();
            for &c in v {
                if w.last() == Some(&-c) {
                    w.pop();
                } else {
                    w.push(c);
                }
            }
            Payload::Word(w)
        }
        (Kind::FreeAbelian { .. }, Payload::Vector(u), Payload::Vector(v)) => {
            Payload::Vector(u.iter().zip(v).map(|(x, y)| x + y).collect())
        }
        (Kind::FreeProduct { orders }, Payload::Syllables(u), Payload::Syllables(v)) => {
            let mut w = u.clone();
            for &(f, e) in v {
                push_syllable(orders, &mut w, f, e);
            }
            Payload::Syllables(w)
        }
        (Kind::DirectProduct(kl, kr), Payload::Pair(p), Payload::Pair(q)) => Payload::Pair(
            Box::new((mul_payload(kl, &p.0, &q.0), mul_payload(kr, &p.1, &q.1))),
        ),
        (
            Kind::Lamplighter,
            Payload::Lamp { lamps: la, pos: pa },
            Payload::Lamp { lamps: lb, pos: pb },
        ) => {
            // lamps of b act shifted by a's head position; Z2 lamps cancel
            let mut lamps = la.clone();
            for &l in lb {
                let shifted = l + pa;
                match lamps.binary_search(&shifted) {
                    Ok(i) => {
                        lamps.remove(i);
                    }
                    Err(i) => lamps.insert(i, shifted),
                }
            }
            Payload::Lamp {
                lamps,
                pos: pa + pb,
            }
        }
        _ => unreachable!("payload does not match oracle variant"),
    }
}

fn push_syllable(orders: &[u32], w: &mut Vec<(u16, u32)>, f: u16, e: u32) {
    let e = e % orders[f as usize];
    if e == 0 {
        return;
    }
    match w.last().copied() {
        Some((lf, le)) if lf == f => {
            let ne = (le + e) % orders[f as usize];
            w.pop();
            if ne != 0 {
                // merged syllable may cascade with the previous one
                push_syllable(orders, w, f, ne);
            }
        }
        _ => w.push((f, e)),
    }
}

fn inv_payload(kind: &Kind, a: &Payload) -> Payload {
    match (kind, a) {
        (Kind::Free { .. }, Payload::Word(u)) => {
            Payload::Word(u.iter().rev().map(|&c| -c).collect())
        }
        (Kind::FreeAbelian { .. }, Payload::Vector(u)) => {
            Payload::Vector(u.iter().map(|x| -x).collect())
        }
        (Kind::FreeProduct { orders }, Payload::Syllables(u)) => Payload::Syllables(
            u.iter()
                .rev()
                .map(|&(f, e)| (f, orders[f as usize] - e))
                .collect(),
        ),
        (Kind::DirectProduct(kl, kr), Payload::Pair(p)) => {
            Payload::Pair(Box::new((inv_payload(kl, &p.0), inv_payload(kr, &p.1))))
        }
        (Kind::Lamplighter, Payload::Lamp { lamps, pos }) => {
            let mut shifted: Vec<i64> = lamps.iter().map(|l| l - pos).collect();
            shifted.sort_unstable();
            Payload::Lamp {
                lamps: shifted,
                pos: -pos,
            }
        }
        _ => unreachable!("payload does not match oracle variant"),
    }
}

fn encode_payload(p: &Payload, out: &mut Vec<u8>) {
    match p {
        Payload::Word(w) => out.extend(w.iter().map(|&c| c as u8)),
        Payload::Vector(v) => {
            for x in v {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        Payload::Syllables(s) => {
            for &(f, e) in s {
                out.extend_from_slice(&f.to_le_bytes());
                out.extend_from_slice(&e.to_le_bytes());
            }
        }
        Payload::Pair(p) => {
            let mut left = Vec::new();
            encode_payload(&p.0, &mut left);
            out.extend_from_slice(&(left.len() as u32).to_le_bytes());
            out.extend_from_slice(&left);
            encode_payload(&p.1, out);
        }
        Payload::Lamp { lamps, pos } => {
            out.extend_from_slice(&pos.to_le_bytes());
            for l in lamps {
                out.extend_from_slice(&l.to_le_bytes());
            }
        }
    }
}

fn decode_payload<'a>(kind: &Kind, bytes: &'a [u8]) -> (Payload, &'a [u8]) {
    match kind {
        Kind::Free { .. } => (Payload::Word(bytes.iter().map(|&b| b as i8).collect()), &[]),
        Kind::FreeAbelian { rank } => {
            let n = *rank as usize;
            debug_assert_eq!(bytes.len(), 8 * n);
            let v = bytes
                .chunks_exact(8)
                .map(|c| i64::from_le_bytes(c.try_into().unwrap()))
                .collect();
            (Payload::Vector(v), &[])
        }
        Kind::FreeProduct { .. } => {
            let s = bytes
                .chunks_exact(6)
                .map(|c| {
                    (
                        u16::from_le_bytes(c[..2].try_into().unwrap()),
                        u32::from_le_bytes(c[2..].try_into().unwrap()),
                    )
                })
                .collect();
            (Payload::Syllables(s), &[])
        }
        Kind::DirectProduct(kl, kr) => {
            let llen = u32::from_le_bytes(bytes[..4].try_into().unwrap()) as usize;
            let (l, _) = decode_payload(kl, &bytes[4..4 + llen]);
            let (r, rest) = decode_payload(kr, &bytes[4 + llen..]);
            (Payload::Pair(Box::new((l, r))), rest)
        }
        Kind::Lamplighter => {
            let pos = i64::from_le_bytes(bytes[..8].try_into().unwrap());
            let lamps = bytes[8..]
                .chunks_exact(8)
                .map(|c| i64::from_le_bytes(c.try_into().unwrap()))
                .collect();
            (Payload::Lamp { lamps, pos }, &[])
        }
    }
}

fn display_payload(kind: &Kind, p: &Payload) -> String {
    match (kind, p) {
        (_, Payload::Word(w)) => {
            if w.is_empty() {
                return "e".into();
            }
            w.iter()
                .map(|&c| {
                    let ch = (b'a' + (c.unsigned_abs() - 1)) as char;
                    if c > 0 {
                        ch
                    } else {
                        ch.to_ascii_uppercase()
                    }
                })
                .collect()
        }
        (_, Payload::Vector(v)) => {
            let body: Vec<String> = v.iter().map(i64::to_string).collect();
            format!("({})", body.join(","))
        }
        (_, Payload::Syllables(s)) => {
            if s.is_empty() {
                return "e".into();
            }
            s.iter()
                .map(|&(f, e)| {
                    if e == 1 {
                        format!("g{}", f + 1)
                    } else {
                        format!("g{}^{}", f + 1, e)
                    }
                })
                .collect::<Vec<_>>()
                .join("*")
        }
        (Kind::DirectProduct(kl, kr), Payload::Pair(p)) => {
            format!(
                "[{}|{}]",
                display_payload(kl, &p.0),
                display_payload(kr, &p.1)
            )
        }
        (_, Payload::Lamp { lamps, pos }) => {
            let body: Vec<String> = lamps.iter().map(i64::to_string).collect();
            format!("{{{}}};{}", body.join(","), pos)
        }
        _ => unreachable!(),
    }
}

impl fmt::Display for Transience {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transience::Recurrent => write!(f, "recurrent"),
            Transience::Transient => write!(f, "transient"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::stream_rng;
    use rand::Rng;

    fn catalog() -> Vec<GroupSpec> {
        vec![
            GroupSpec::Free {
                rank: 2,
                extra: vec![],
            },
            GroupSpec::Free {
                rank: 2,
                extra: vec!["ab".into()],
            },
            GroupSpec::FreeAbelian {
                rank: 3,
                extra: vec![],
            },
            GroupSpec::FreeProduct {
                orders: vec![2, 3],
                extra: vec![],
            },
            GroupSpec::DirectProduct {
                left: Box::new(GroupSpec::Free {
                    rank: 2,
                    extra: vec![],
                }),
                right: Box::new(GroupSpec::FreeAbelian {
                    rank: 1,
                    extra: vec![],
                }),
            },
            GroupSpec::Lamplighter,
        ]
    }

    #[test]
    fn free_group_generators_and_identity() {
        let (oracle, gens) = make_group(&GroupSpec::Free {
            rank: 2,
            extra: vec![],
        })
        .unwrap();
        assert_eq!(gens.labels(), &["a", "A", "b", "B"]);
        assert!(oracle.is_identity(&oracle.identity()));
        let a = gens.element(0);
        let a_inv = gens.element(gens.inverse_index(0));
        assert!(oracle.is_identity(&oracle.multiply(a, a_inv).unwrap()));
    }

    #[test]
    fn free_abelian_generators() {
        let (oracle, gens) = make_group(&GroupSpec::FreeAbelian {
            rank: 3,
            extra: vec![],
        })
        .unwrap();
        assert_eq!(gens.len(), 6);
        assert_eq!(oracle.display(&oracle.identity()), "(0,0,0)");
        let x1 = gens.element(0);
        let x2 = gens.element(2);
        let s = oracle.multiply(x1, x2).unwrap();
        assert_eq!(oracle.display(&s), "(1,1,0)");
    }

    #[test]
    fn extra_generator_gives_six_labels() {
        let (_, gens) = make_group(&GroupSpec::Free {
            rank: 2,
            extra: vec!["ab".into()],
        })
        .unwrap();
        assert_eq!(gens.len(), 6);
        assert_eq!(gens.label(4), "ab");
        assert_eq!(gens.label(5), "BA");
        assert_eq!(gens.inverse_index(4), 5);
    }

    #[test]
    fn extra_generator_identity_rejected() {
        let err = make_group(&GroupSpec::Free {
            rank: 2,
            extra: vec!["aA".into()],
        })
        .unwrap_err();
        assert!(matches!(err, GroupError::BadExtraWord { .. }));
        let err = make_group(&GroupSpec::Free {
            rank: 2,
            extra: vec!["q".into()],
        })
        .unwrap_err();
        assert!(matches!(err, GroupError::BadExtraWord { .. }));
    }

    #[test]
    fn free_reduction_and_inversion() {
        let (oracle, gens) = make_group(&GroupSpec::Free {
            rank: 2,
            extra: vec![],
        })
        .unwrap();
        let ab = oracle.evaluate(&gens, &[0, 2]);
        assert_eq!(oracle.display(&ab), "ab");
        assert_eq!(oracle.display(&oracle.invert(&ab)), "BA");
    }

    #[test]
    fn lamplighter_toggle_is_involution() {
        let (oracle, gens) = make_group(&GroupSpec::Lamplighter).unwrap();
        let s = gens.element(gens.index_of("s").unwrap());
        let ss = oracle.multiply(s, s).unwrap();
        assert!(oracle.is_identity(&ss));
        // t s T toggles the lamp at +1
        let w = oracle.evaluate(&gens, &[0, 2, 1]);
        assert_eq!(oracle.display(&w), "{1};0");
    }

    #[test]
    fn free_product_syllable_reduction() {
        let (oracle, gens) = make_group(&GroupSpec::FreeProduct {
            orders: vec![2, 3],
            extra: vec![],
        })
        .unwrap();
        // g1 has order 2: single self-inverse label
        let g1 = gens.index_of("g1").unwrap();
        assert_eq!(gens.inverse_index(g1), g1);
        let g2 = gens.index_of("g2").unwrap();
        let sq = oracle.evaluate(&gens, &[g2, g2, g2]);
        assert!(oracle.is_identity(&sq));
        let w = oracle.evaluate(&gens, &[g1, g2, g2]);
        assert_eq!(oracle.display(&w), "g1*g2^2");
    }

    #[test]
    fn transience_classification() {
        use Transience::*;
        let cases = vec![
            (
                GroupSpec::FreeAbelian {
                    rank: 2,
                    extra: vec![],
                },
                Recurrent,
            ),
            (
                GroupSpec::FreeAbelian {
                    rank: 3,
                    extra: vec![],
                },
                Transient,
            ),
            (
                GroupSpec::Free {
                    rank: 2,
                    extra: vec![],
                },
                Transient,
            ),
            (
                GroupSpec::Free {
                    rank: 1,
                    extra: vec![],
                },
                Recurrent,
            ),
            (
                GroupSpec::FreeProduct {
                    orders: vec![2, 2],
                    extra: vec![],
                },
                Recurrent,
            ),
            (
                GroupSpec::FreeProduct {
                    orders: vec![2, 3],
                    extra: vec![],
                },
                Transient,
            ),
            (GroupSpec::Lamplighter, Transient),
            (
                GroupSpec::DirectProduct {
                    left: Box::new(GroupSpec::FreeAbelian {
                        rank: 1,
                        extra: vec![],
                    }),
                    right: Box::new(GroupSpec::FreeProduct {
                        orders: vec![2, 2],
                        extra: vec![],
                    }),
                },
                Recurrent,
            ),
            (
                GroupSpec::DirectProduct {
                    left: Box::new(GroupSpec::FreeAbelian {
                        rank: 2,
                        extra: vec![],
                    }),
                    right: Box::new(GroupSpec::FreeAbelian {
                        rank: 1,
                        extra: vec![],
                    }),
                },
                Transient,
            ),
        ];
        for (spec, expect) in cases {
            assert_eq!(classify_transience(&spec), expect, "{spec:?}");
        }
    }

    #[test]
    fn cross_oracle_multiplication_fails() {
        let (o1, g1) = make_group(&GroupSpec::Free {
            rank: 2,
            extra: vec![],
        })
        .unwrap();
        let (_, g2) = make_group(&GroupSpec::Free {
            rank: 2,
            extra: vec![],
        })
        .unwrap();
        let err = o1.multiply(g1.element(0), g2.element(0)).unwrap_err();
        assert!(matches!(err, GroupError::OracleMismatch));
    }

    #[test]
    fn generator_sets_are_symmetric() {
        for spec in catalog() {
            let (oracle, gens) = make_group(&spec).unwrap();
            for i in 0..gens.len() {
                let j = gens.inverse_index(i);
                assert_eq!(gens.inverse_index(j), i);
                let prod = oracle.multiply(gens.element(i), gens.element(j)).unwrap();
                assert!(
                    oracle.is_identity(&prod),
                    "{spec:?} label {}",
                    gens.label(i)
                );
            }
        }
    }

    // Normal-form soundness: letter-by-letter evaluation agrees with every
    // rebracketing, and inversion commutes with evaluation.
    #[test]
    fn random_word_associativity_and_inversion() {
        for spec in catalog() {
            let (oracle, gens) = make_group(&spec).unwrap();
            let mut rng = stream_rng(7, 1);
            for _ in 0..10_000 {
                let len = rng.gen_range(0..12);
                let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..gens.len())).collect();
                let flat = oracle.evaluate(&gens, &word);
                if len > 1 {
                    let cut = rng.gen_range(1..len);
                    let left = oracle.evaluate(&gens, &word[..cut]);
                    let right = oracle.evaluate(&gens, &word[cut..]);
                    assert_eq!(flat, oracle.multiply(&left, &right).unwrap(), "{spec:?}");
                }
                let inv_word: Vec<usize> =
                    word.iter().rev().map(|&i| gens.inverse_index(i)).collect();
                assert_eq!(
                    oracle.evaluate(&gens, &inv_word),
                    oracle.invert(&flat),
                    "{spec:?}"
                );
            }
        }
    }

    #[test]
    fn encode_decode_roundtrip() {
        for spec in catalog() {
            let (oracle, gens) = make_group(&spec).unwrap();
            let mut rng = stream_rng(11, 2);
            for _ in 0..200 {
                let len = rng.gen_range(0..10);
                let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..gens.len())).collect();
                let g = oracle.evaluate(&gens, &word);
                let mut buf = Vec::new();
                oracle.encode(&g, &mut buf);
                assert_eq!(oracle.decode(&buf), g, "{spec:?}");
            }
        }
    }

    #[test]
    fn spec_json_schema() {
        let spec: GroupSpec =
            serde_json::from_str(r#"{"type":"free","rank":2,"extra":["ab"]}"#).unwrap();
        assert_eq!(
            spec,
            GroupSpec::Free {
                rank: 2,
                extra: vec!["ab".into()]
            }
        );
        let spec: GroupSpec = serde_json::from_str(r#"{"type":"lamplighter"}"#).unwrap();
        assert_eq!(spec, GroupSpec::Lamplighter);
        let spec: GroupSpec =
            serde_json::from_str(r#"{"type":"direct_product","left":{"type":"free_abelian","rank":1},"right":{"type":"free_abelian","rank":1}}"#)
                .unwrap();
        assert_eq!(classify_transience(&spec), Transience::Recurrent);
    }

    #[test]
    fn malformed_specs_rejected() {
        assert!(make_group(&GroupSpec::Free {
            rank: 0,
            extra: vec![]
        })
        .is_err());
        assert!(make_group(&GroupSpec::FreeProduct {
            orders: vec![1],
            extra: vec![]
        })
        .is_err());
        assert!(make_group(&GroupSpec::FreeProduct {
            orders: vec![],
            extra: vec![]
        })
        .is_err());
    }
}
