//! Reversible transformation log.
//!
//! Every rule that changes the graph appends one [`TransformEvent`]. Replaying
//! the events last-to-first turns an independent set of the final graph into
//! one of the graph the log started from; the committed weight of the events
//! is tracked as the log's offset.

use std::collections::BTreeSet;
use std::io::{self, Read, Write};

use thiserror::Error;

use crate::graph::{DynGraph, VertexId};
use crate::struction::StructionVariant;
use crate::weight::Weight;

/// What a vertex created by a struction encodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// `v_{x,y}` of the original and modified structions; layer `x`.
    Pair { x: VertexId, y: VertexId },
    /// `v_c` for an independent set `c` of the center's neighborhood.
    Set { c: Vec<VertexId> },
    /// `v_{c,y}` of the extended-reduced struction; layer `c`.
    SetPlus { c: Vec<VertexId>, y: VertexId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransformEvent<W> {
    /// `v` joins the solution; `N[v]` was removed.
    IncludedVertex { v: VertexId, weight: W },
    /// `v` was removed without contributing to the solution.
    ExcludedVertex { v: VertexId },
    /// `absorbed` (same open neighborhood as `kept`) was merged into `kept`.
    TwinMerge { kept: VertexId, absorbed: VertexId },
    /// `{v, u, x}` replaced by `folded`, `N(v) = {u, x}`.
    DegreeTwoFold { v: VertexId, v_weight: W, u: VertexId, x: VertexId, folded: VertexId },
    Struction {
        variant: StructionVariant,
        center: VertexId,
        center_weight: W,
        /// `N(v)` at application time with the weights it had then.
        neighborhood: Vec<(VertexId, W)>,
        created: Vec<(VertexId, Provenance)>,
    },
}

impl<W: Weight> TransformEvent<W> {
    /// Weight this event commits to the solution.
    pub fn offset_delta(&self) -> W {
        match self {
            TransformEvent::IncludedVertex { weight, .. } => *weight,
            TransformEvent::DegreeTwoFold { v_weight, .. } => *v_weight,
            TransformEvent::Struction { center_weight, .. } => *center_weight,
            TransformEvent::ExcludedVertex { .. } | TransformEvent::TwinMerge { .. } => W::zero(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("solution is not an independent set of the kernel")]
    NotIndependent,
    #[error("corrupt transformation log: {0}")]
    CorruptLog(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformLog<W> {
    events: Vec<TransformEvent<W>>,
    offset: W,
}

impl<W: Weight> Default for TransformLog<W> {
    fn default() -> Self {
        Self::new()
    }
}

impl<W: Weight> TransformLog<W> {
    pub fn new() -> Self {
        TransformLog { events: Vec::new(), offset: W::zero() }
    }

    pub fn record(&mut self, e: TransformEvent<W>) {
        self.offset = self.offset + e.offset_delta();
        self.events.push(e);
    }

    pub fn offset(&self) -> W {
        self.offset
    }

    pub fn events(&self) -> &[TransformEvent<W>] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Drops every event after the first `len`, restoring the offset.
    pub fn truncate(&mut self, len: usize) {
        for e in self.events.drain(len..) {
            self.offset = self.offset - e.offset_delta();
        }
    }

    /// Appends another log recorded on the graph this log ends with.
    pub fn extend(&mut self, other: TransformLog<W>) {
        self.offset = self.offset + other.offset;
        self.events.extend(other.events);
    }

    /// Maps an independent set of `kernel` (the graph the log ends with) to an
    /// independent set of the graph the log started from. For a maximum weight
    /// kernel solution the result weighs exactly `w(kernel_solution) + offset`;
    /// for any other independent set it weighs at least that much.
    pub fn lift(
        &self,
        kernel: &DynGraph<W>,
        kernel_solution: &[VertexId],
    ) -> Result<Vec<VertexId>, LiftError> {
        if !kernel.is_independent(kernel_solution) {
            return Err(LiftError::NotIndependent);
        }
        let mut set: BTreeSet<VertexId> = kernel_solution.iter().copied().collect();
        for e in self.events.iter().rev() {
            lift_event(e, &mut set)?;
        }
        Ok(set.into_iter().collect())
    }

    pub fn write_to<Wr: Write>(&self, out: &mut Wr) -> io::Result<()> {
        codec::write_log(self, out)
    }

    pub fn read_from<R: Read>(input: &mut R) -> io::Result<Self> {
        codec::read_log(input)
    }
}

fn lift_event<W: Weight>(
    e: &TransformEvent<W>,
    set: &mut BTreeSet<VertexId>,
) -> Result<(), LiftError> {
    match e {
        TransformEvent::IncludedVertex { v, .. } => {
            set.insert(*v);
        }
        TransformEvent::ExcludedVertex { .. } => {}
        TransformEvent::TwinMerge { kept, absorbed } => {
            if set.contains(kept) {
                set.insert(*absorbed);
            }
        }
        TransformEvent::DegreeTwoFold { v, u, x, folded, .. } => {
            if set.remove(folded) {
                set.insert(*u);
                set.insert(*x);
            } else {
                set.insert(*v);
            }
        }
        TransformEvent::Struction { variant, center, neighborhood, created, .. } => {
            let present: Vec<&Provenance> =
                created.iter().filter(|(id, _)| set.contains(id)).map(|(_, p)| p).collect();
            for (id, _) in created {
                set.remove(id);
            }
            let restored = match variant {
                StructionVariant::Original | StructionVariant::Modified => lift_pairs(&present)?,
                StructionVariant::Extended => match present.as_slice() {
                    [] => None,
                    [Provenance::Set { c }] => Some(c.clone()),
                    _ => return Err(corrupt("several extended struction vertices selected")),
                },
                StructionVariant::ExtendedReduced => lift_set_plus(&present)?,
            };
            match restored {
                Some(vs) => set.extend(vs),
                None => {
                    if !neighborhood.iter().any(|(u, _)| set.contains(u)) {
                        set.insert(*center);
                    }
                }
            }
        }
    }
    Ok(())
}

fn corrupt(msg: &str) -> LiftError {
    LiftError::CorruptLog(msg.to_string())
}

// Selected pair vertices all share a layer x (different layers are adjacent).
// x and every y go back in; an optimal solution already holds x, and adding it
// otherwise keeps the set independent because v_{x,y} was adjacent to every
// neighbor of x and y.
fn lift_pairs(present: &[&Provenance]) -> Result<Option<Vec<VertexId>>, LiftError> {
    let mut layer = None;
    let mut out = Vec::with_capacity(present.len() + 1);
    for p in present {
        let Provenance::Pair { x, y } = p else {
            return Err(corrupt("pair struction created a non-pair vertex"));
        };
        match layer {
            None => {
                layer = Some(*x);
                out.push(*x);
            }
            Some(l) if l != *x => return Err(corrupt("pair vertices from different layers")),
            _ => {}
        }
        out.push(*y);
    }
    Ok(layer.map(|_| out))
}

fn lift_set_plus(present: &[&Provenance]) -> Result<Option<Vec<VertexId>>, LiftError> {
    let mut base: Option<&Vec<VertexId>> = None;
    let mut seen_set = false;
    let mut extra = Vec::new();
    for p in present {
        let (c, y) = match p {
            Provenance::Set { c } => {
                if seen_set {
                    return Err(corrupt("two V_C vertices selected simultaneously"));
                }
                seen_set = true;
                (c, None)
            }
            Provenance::SetPlus { c, y } => (c, Some(*y)),
            Provenance::Pair { .. } => return Err(corrupt("pair vertex in extended-reduced struction")),
        };
        match base {
            None => base = Some(c),
            Some(b) if b != c => return Err(corrupt("V_E vertices from different layers")),
            _ => {}
        }
        extra.extend(y);
    }
    Ok(base.map(|c| {
        let mut out = c.clone();
        out.extend(extra);
        out
    }))
}

/// True iff `lifted` is independent in `original` and weighs `expected_weight`.
pub fn verify_lift<W: Weight>(original: &DynGraph<W>, lifted: &[VertexId], expected_weight: W) -> bool {
    original.is_independent(lifted) && original.set_weight_sum(lifted) == expected_weight
}

/// Binary log format, little endian:
///
/// ```text
/// magic "STLG" | version u32 | offset u64 | event count u64 | records...
/// record = tag u8 | payload length u32 | payload
/// ```
///
/// Ids are `u32`, weights `u64`, vertex lists are a `u32` count followed by
/// the ids.
mod codec {
    use super::*;

    const MAGIC: &[u8; 4] = b"STLG";
    const VERSION: u32 = 1;

    const TAG_INCLUDED: u8 = 1;
    const TAG_EXCLUDED: u8 = 2;
    const TAG_TWIN: u8 = 3;
    const TAG_FOLD: u8 = 4;
    const TAG_STRUCTION: u8 = 5;

    const PROV_PAIR: u8 = 1;
    const PROV_SET: u8 = 2;
    const PROV_SET_PLUS: u8 = 3;

    fn bad(msg: &str) -> io::Error {
        io::Error::new(io::ErrorKind::InvalidData, msg.to_string())
    }

    struct Buf(Vec<u8>);

    impl Buf {
        fn u8(&mut self, x: u8) {
            self.0.push(x);
        }
        fn u32(&mut self, x: u32) {
            self.0.extend_from_slice(&x.to_le_bytes());
        }
        fn id(&mut self, v: VertexId) {
            self.u32(v.0);
        }
        fn w<W: Weight>(&mut self, w: W) {
            self.0.extend_from_slice(&w.to_u64().to_le_bytes());
        }
        fn ids(&mut self, vs: &[VertexId]) {
            self.u32(vs.len() as u32);
            for &v in vs {
                self.id(v);
            }
        }
    }

    struct Cursor<'a>(&'a [u8]);

    impl Cursor<'_> {
        fn take(&mut self, n: usize) -> io::Result<&[u8]> {
            if self.0.len() < n {
                return Err(bad("truncated record"));
            }
            let (a, b) = self.0.split_at(n);
            self.0 = b;
            Ok(a)
        }
        fn u8(&mut self) -> io::Result<u8> {
            Ok(self.take(1)?[0])
        }
        fn u32(&mut self) -> io::Result<u32> {
            Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
        }
        fn id(&mut self) -> io::Result<VertexId> {
            self.u32().map(VertexId)
        }
        fn w<W: Weight>(&mut self) -> io::Result<W> {
            let raw = u64::from_le_bytes(self.take(8)?.try_into().unwrap());
            W::from_u64(raw).ok_or_else(|| bad("weight out of range"))
        }
        fn ids(&mut self) -> io::Result<Vec<VertexId>> {
            let n = self.u32()? as usize;
            (0..n).map(|_| self.id()).collect()
        }
    }

    fn variant_code(v: StructionVariant) -> u8 {
        match v {
            StructionVariant::Original => 0,
            StructionVariant::Modified => 1,
            StructionVariant::Extended => 2,
            StructionVariant::ExtendedReduced => 3,
        }
    }

    fn variant_from(code: u8) -> io::Result<StructionVariant> {
        Ok(match code {
            0 => StructionVariant::Original,
            1 => StructionVariant::Modified,
            2 => StructionVariant::Extended,
            3 => StructionVariant::ExtendedReduced,
            _ => return Err(bad("unknown struction variant")),
        })
    }

    fn encode<W: Weight>(e: &TransformEvent<W>) -> (u8, Vec<u8>) {
        let mut b = Buf(Vec::new());
        let tag = match e {
            TransformEvent::IncludedVertex { v, weight } => {
                b.id(*v);
                b.w(*weight);
                TAG_INCLUDED
            }
            TransformEvent::ExcludedVertex { v } => {
                b.id(*v);
                TAG_EXCLUDED
            }
            TransformEvent::TwinMerge { kept, absorbed } => {
                b.id(*kept);
                b.id(*absorbed);
                TAG_TWIN
            }
            TransformEvent::DegreeTwoFold { v, v_weight, u, x, folded } => {
                b.id(*v);
                b.w(*v_weight);
                b.id(*u);
                b.id(*x);
                b.id(*folded);
                TAG_FOLD
            }
            TransformEvent::Struction { variant, center, center_weight, neighborhood, created } => {
                b.u8(variant_code(*variant));
                b.id(*center);
                b.w(*center_weight);
                b.u32(neighborhood.len() as u32);
                for (u, w) in neighborhood {
                    b.id(*u);
                    b.w(*w);
                }
                b.u32(created.len() as u32);
                for (id, p) in created {
                    b.id(*id);
                    match p {
                        Provenance::Pair { x, y } => {
                            b.u8(PROV_PAIR);
                            b.id(*x);
                            b.id(*y);
                        }
                        Provenance::Set { c } => {
                            b.u8(PROV_SET);
                            b.ids(c);
                        }
                        Provenance::SetPlus { c, y } => {
                            b.u8(PROV_SET_PLUS);
                            b.ids(c);
                            b.id(*y);
                        }
                    }
                }
                TAG_STRUCTION
            }
        };
        (tag, b.0)
    }

    fn decode<W: Weight>(tag: u8, payload: &[u8]) -> io::Result<TransformEvent<W>> {
        let mut c = Cursor(payload);
        let e = match tag {
            TAG_INCLUDED => TransformEvent::IncludedVertex { v: c.id()?, weight: c.w()? },
            TAG_EXCLUDED => TransformEvent::ExcludedVertex { v: c.id()? },
            TAG_TWIN => TransformEvent::TwinMerge { kept: c.id()?, absorbed: c.id()? },
            TAG_FOLD => TransformEvent::DegreeTwoFold {
                v: c.id()?,
                v_weight: c.w()?,
                u: c.id()?,
                x: c.id()?,
                folded: c.id()?,
            },
            TAG_STRUCTION => {
                let variant = variant_from(c.u8()?)?;
                let center = c.id()?;
                let center_weight = c.w()?;
                let k = c.u32()? as usize;
                let neighborhood = (0..k).map(|_| Ok((c.id()?, c.w()?))).collect::<io::Result<_>>()?;
                let k = c.u32()? as usize;
                let mut created = Vec::with_capacity(k);
                for _ in 0..k {
                    let id = c.id()?;
                    let p = match c.u8()? {
                        PROV_PAIR => Provenance::Pair { x: c.id()?, y: c.id()? },
                        PROV_SET => Provenance::Set { c: c.ids()? },
                        PROV_SET_PLUS => Provenance::SetPlus { c: c.ids()?, y: c.id()? },
                        _ => return Err(bad("unknown provenance")),
                    };
                    created.push((id, p));
                }
                TransformEvent::Struction { variant, center, center_weight, neighborhood, created }
            }
            _ => return Err(bad("unknown event tag")),
        };
        if !c.0.is_empty() {
            return Err(bad("trailing bytes in record"));
        }
        Ok(e)
    }

    pub(super) fn write_log<W: Weight, Wr: Write>(log: &TransformLog<W>, out: &mut Wr) -> io::Result<()> {
        out.write_all(MAGIC)?;
        out.write_all(&VERSION.to_le_bytes())?;
        out.write_all(&log.offset.to_u64().to_le_bytes())?;
        out.write_all(&(log.events.len() as u64).to_le_bytes())?;
        for e in &log.events {
            let (tag, payload) = encode(e);
            out.write_all(&[tag])?;
            out.write_all(&(payload.len() as u32).to_le_bytes())?;
            out.write_all(&payload)?;
        }
        Ok(())
    }

    pub(super) fn read_log<W: Weight, R: Read>(input: &mut R) -> io::Result<TransformLog<W>> {
        let mut head = [0u8; 24];
        input.read_exact(&mut head)?;
        if &head[..4] != MAGIC {
            return Err(bad("not a transformation log"));
        }
        let version = u32::from_le_bytes(head[4..8].try_into().unwrap());
        if version != VERSION {
            return Err(bad("unsupported log version"));
        }
        let offset = u64::from_le_bytes(head[8..16].try_into().unwrap());
        let count = u64::from_le_bytes(head[16..24].try_into().unwrap());
        let mut log: TransformLog<W> = TransformLog::new();
        for _ in 0..count {
            let mut rec = [0u8; 5];
            input.read_exact(&mut rec)?;
            let len = u32::from_le_bytes(rec[1..5].try_into().unwrap()) as usize;
            let mut payload = vec![0u8; len];
            input.read_exact(&mut payload)?;
            log.record(decode(rec[0], &payload)?);
        }
        if Weight::to_u64(log.offset) != offset {
            return Err(bad("offset does not match events"));
        }
        Ok(log)
    }
}
