use std::collections::HashMap;
use std::sync::Arc;

use finbench_core::{EntityId, Timestamp, Window};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{EngineError, Result};
use crate::schema::{
    Direction, EdgeKind, EdgeRecord, Props, Value, VertexKind, VertexRecord, VertexRef,
};

type AdjEntry = (Timestamp, u64);

#[derive(Debug, Clone, Default)]
pub(crate) struct VertexData {
    pub props: Props,
    adj: Vec<(EdgeKind, Direction, Vec<AdjEntry>)>,
}

impl VertexData {
    fn new(props: Props) -> Self {
        VertexData {
            props,
            adj: Vec::new(),
        }
    }

    pub fn list(&self, kind: EdgeKind, dir: Direction) -> &[AdjEntry] {
        self.adj
            .iter()
            .find(|(k, d, _)| *k == kind && *d == dir)
            .map(|(_, _, l)| l.as_slice())
            .unwrap_or(&[])
    }

    fn list_mut(&mut self, kind: EdgeKind, dir: Direction) -> &mut Vec<AdjEntry> {
        let pos = match self
            .adj
            .iter()
            .position(|(k, d, _)| *k == kind && *d == dir)
        {
            Some(p) => p,
            None => {
                self.adj.push((kind, dir, Vec::new()));
                self.adj.len() - 1
            }
        };
        &mut self.adj[pos].2
    }

    pub fn degree(&self) -> usize {
        self.adj.iter().map(|(_, _, l)| l.len()).sum()
    }

    pub fn lists(&self) -> impl Iterator<Item = (EdgeKind, Direction, &[AdjEntry])> {
        self.adj.iter().map(|(k, d, l)| (*k, *d, l.as_slice()))
    }
}

/// Logical redo record; also the unit the log stores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RedoOp {
    InsertVertex(VertexRecord),
    InsertEdge(EdgeRecord),
    SetVertexProp {
        v: VertexRef,
        name: String,
        value: Value,
    },
    SetEdgeProp {
        kind: EdgeKind,
        edge_id: u64,
        name: String,
        value: Value,
    },
    DeleteEdge {
        kind: EdgeKind,
        edge_id: u64,
    },
    DeleteVertex(VertexRef),
}

#[derive(Debug, Clone)]
pub(crate) enum UndoOp {
    RemoveVertex(VertexRef),
    RemoveEdge(EdgeKind, u64),
    RestoreVertexProp(VertexRef, String, Option<Value>),
    RestoreEdge(Arc<EdgeRecord>),
    RestoreVertex(VertexRef, Props),
}

#[derive(Debug, Clone)]
pub(crate) struct Graph {
    vertices: Vec<HashMap<u64, VertexData>>,
    edges: Vec<HashMap<u64, Arc<EdgeRecord>>>,
    pub next_edge_id: [u64; 9],
}

impl Default for Graph {
    fn default() -> Self {
        Graph {
            vertices: (0..VertexKind::ALL.len()).map(|_| HashMap::new()).collect(),
            edges: (0..EdgeKind::ALL.len()).map(|_| HashMap::new()).collect(),
            next_edge_id: [1; 9],
        }
    }
}

impl Graph {
    pub fn vertex(&self, v: VertexRef) -> Option<&VertexData> {
        self.vertices[v.kind.index()].get(&v.id.0)
    }

    pub fn contains(&self, v: VertexRef) -> bool {
        self.vertices[v.kind.index()].contains_key(&v.id.0)
    }

    pub fn edge(&self, kind: EdgeKind, edge_id: u64) -> Option<&Arc<EdgeRecord>> {
        self.edges[kind.index()].get(&edge_id)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.iter().map(HashMap::len).sum()
    }

    pub fn vertex_count_of(&self, kind: VertexKind) -> usize {
        self.vertices[kind.index()].len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(HashMap::len).sum()
    }

    pub fn edge_count_of(&self, kind: EdgeKind) -> usize {
        self.edges[kind.index()].len()
    }

    pub fn alloc_edge_id(&mut self, kind: EdgeKind) -> u64 {
        let id = self.next_edge_id[kind.index()];
        self.next_edge_id[kind.index()] += 1;
        id
    }

    pub fn vertex_ids(&self, kind: VertexKind) -> Vec<u64> {
        let mut ids: Vec<u64> = self.vertices[kind.index()].keys().copied().collect();
        ids.sort_unstable();
        ids
    }

    /// Edges of `v` of one kind/direction with timestamps strictly inside
    /// `window`, in (timestamp, edge_id) order.
    pub fn adjacent(
        &self,
        v: VertexRef,
        kind: EdgeKind,
        dir: Direction,
        window: &Window,
    ) -> Vec<Arc<EdgeRecord>> {
        let Some(data) = self.vertex(v) else {
            return Vec::new();
        };
        let list = data.list(kind, dir);
        let lo = list.partition_point(|(t, _)| *t <= window.start);
        let hi = list.partition_point(|(t, _)| *t < window.end);
        if lo >= hi {
            return Vec::new();
        }
        let edges = &self.edges[kind.index()];
        list[lo..hi]
            .iter()
            .filter_map(|(_, id)| edges.get(id).cloned())
            .collect()
    }

    pub fn incident(&self, v: VertexRef) -> Vec<Arc<EdgeRecord>> {
        let Some(data) = self.vertex(v) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for (kind, _, list) in data.lists() {
            for (_, id) in list {
                if let Some(e) = self.edges[kind.index()].get(id) {
                    out.push(e.clone());
                }
            }
        }
        out
    }

    pub fn apply(&mut self, op: &RedoOp) -> Result<UndoOp> {
        match op {
            RedoOp::InsertVertex(rec) => {
                let map = &mut self.vertices[rec.kind.index()];
                if map.contains_key(&rec.id.0) {
                    return Err(EngineError::DuplicateVertex {
                        kind: rec.kind,
                        id: rec.id.0,
                    });
                }
                map.insert(rec.id.0, VertexData::new(rec.props.clone()));
                Ok(UndoOp::RemoveVertex(rec.vref()))
            }
            RedoOp::InsertEdge(rec) => {
                let kind = rec.kind;
                let next = &mut self.next_edge_id[kind.index()];
                *next = (*next).max(rec.edge_id.0 + 1);
                self.link(Arc::new(rec.clone()))?;
                Ok(UndoOp::RemoveEdge(kind, rec.edge_id.0))
            }
            RedoOp::SetVertexProp { v, name, value } => {
                let data = self.vertex_mut(*v)?;
                let old = data.props.insert(name.clone(), value.clone());
                Ok(UndoOp::RestoreVertexProp(*v, name.clone(), old))
            }
            RedoOp::SetEdgeProp {
                kind,
                edge_id,
                name,
                value,
            } => {
                let slot =
                    self.edges[kind.index()]
                        .get_mut(edge_id)
                        .ok_or(EngineError::EdgeNotFound {
                            kind: *kind,
                            edge_id: *edge_id,
                        })?;
                let old = slot.clone();
                Arc::make_mut(slot)
                    .props
                    .insert(name.clone(), value.clone());
                Ok(UndoOp::RestoreEdge(old))
            }
            RedoOp::DeleteEdge { kind, edge_id } => {
                let e = self.unlink(*kind, *edge_id)?;
                Ok(UndoOp::RestoreEdge(e))
            }
            RedoOp::DeleteVertex(v) => {
                let map = &mut self.vertices[v.kind.index()];
                match map.get(&v.id.0) {
                    None => Err(EngineError::VertexNotFound {
                        kind: v.kind,
                        id: v.id.0,
                    }),
                    Some(d) if d.degree() > 0 => Err(EngineError::Cardinality(format!(
                        "{v} still has {} edges",
                        d.degree()
                    ))),
                    Some(_) => {
                        let d = map.remove(&v.id.0).expect("checked");
                        Ok(UndoOp::RestoreVertex(*v, d.props))
                    }
                }
            }
        }
    }

    pub fn undo(&mut self, op: UndoOp) {
        match op {
            UndoOp::RemoveVertex(v) => {
                self.vertices[v.kind.index()].remove(&v.id.0);
            }
            UndoOp::RemoveEdge(kind, id) => {
                let _ = self.unlink(kind, id);
            }
            UndoOp::RestoreVertexProp(v, name, old) => {
                if let Some(d) = self.vertices[v.kind.index()].get_mut(&v.id.0) {
                    match old {
                        Some(val) => d.props.insert(name, val),
                        None => d.props.remove(&name),
                    };
                }
            }
            UndoOp::RestoreEdge(e) => {
                let map = &mut self.edges[e.kind.index()];
                if let Some(slot) = map.get_mut(&e.edge_id.0) {
                    *slot = e;
                } else {
                    let _ = self.link(e);
                }
            }
            UndoOp::RestoreVertex(v, props) => {
                self.vertices[v.kind.index()].insert(v.id.0, VertexData::new(props));
            }
        }
    }

    fn vertex_mut(&mut self, v: VertexRef) -> Result<&mut VertexData> {
        self.vertices[v.kind.index()]
            .get_mut(&v.id.0)
            .ok_or(EngineError::VertexNotFound {
                kind: v.kind,
                id: v.id.0,
            })
    }

    fn link(&mut self, e: Arc<EdgeRecord>) -> Result<()> {
        let entry = (e.timestamp, e.edge_id.0);
        if !self.contains(e.src) {
            return Err(missing(e.src));
        }
        if !self.contains(e.dst) {
            return Err(missing(e.dst));
        }
        for (v, dir) in [(e.src, Direction::Out), (e.dst, Direction::In)] {
            let list = self.vertex_mut(v)?.list_mut(e.kind, dir);
            let pos = list.partition_point(|x| *x < entry);
            list.insert(pos, entry);
        }
        self.edges[e.kind.index()].insert(e.edge_id.0, e);
        Ok(())
    }

    fn unlink(&mut self, kind: EdgeKind, edge_id: u64) -> Result<Arc<EdgeRecord>> {
        let e = self.edges[kind.index()]
            .remove(&edge_id)
            .ok_or(EngineError::EdgeNotFound { kind, edge_id })?;
        let entry = (e.timestamp, edge_id);
        for (v, dir) in [(e.src, Direction::Out), (e.dst, Direction::In)] {
            if let Ok(data) = self.vertex_mut(v) {
                let list = data.list_mut(kind, dir);
                if let Ok(pos) = list.binary_search(&entry) {
                    list.remove(pos);
                }
            }
        }
        Ok(e)
    }

    pub fn export_vertices(&self) -> Vec<VertexRecord> {
        let mut out = Vec::with_capacity(self.vertex_count());
        for kind in VertexKind::ALL {
            for id in self.vertex_ids(kind) {
                let d = &self.vertices[kind.index()][&id];
                out.push(VertexRecord {
                    kind,
                    id: EntityId(id),
                    props: d.props.clone(),
                });
            }
        }
        out
    }

    pub fn export_edges(&self) -> Vec<EdgeRecord> {
        let mut out = Vec::with_capacity(self.edge_count());
        for kind in EdgeKind::ALL {
            let map = &self.edges[kind.index()];
            let mut ids: Vec<u64> = map.keys().copied().collect();
            ids.sort_unstable();
            out.extend(ids.iter().map(|id| (*map[id]).clone()));
        }
        out
    }

    /// SHA-256 over a canonical rendering of every vertex and edge.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for v in self.export_vertices() {
            h.update(format!("V|{:?}|{}|{:?}\n", v.kind, v.id, v.props).as_bytes());
        }
        for e in self.export_edges() {
            h.update(
                format!(
                    "E|{:?}|{}|{}|{}|{}|{:?}\n",
                    e.kind, e.edge_id, e.src, e.dst, e.timestamp.0, e.props
                )
                .as_bytes(),
            );
        }
        hex::encode(h.finalize())
    }
}

fn missing(v: VertexRef) -> EngineError {
    EngineError::VertexNotFound {
        kind: v.kind,
        id: v.id.0,
    }
}
