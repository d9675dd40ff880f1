use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::mem;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use finbench_core::{EntityId, TruncationOrder, TruncationSpec, Window};
use parking_lot::{Mutex, RwLock};
use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};
use crate::graph::{Graph, RedoOp, UndoOp};
use crate::lock::{LockKey, LockManager, LockMode};
use crate::schema::{
    check_type, Direction, EdgeKind, EdgeRecord, Value, VertexKind, VertexRecord, VertexRef,
};
use crate::wal::{self, RecoveryInfo, Wal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IsolationLevel {
    ReadUncommitted,
    ReadCommitted,
    Serializable,
}

impl IsolationLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            IsolationLevel::ReadUncommitted => "read_uncommitted",
            IsolationLevel::ReadCommitted => "read_committed",
            IsolationLevel::Serializable => "serializable",
        }
    }
}

impl fmt::Display for IsolationLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IsolationLevel {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "read_uncommitted" => Ok(IsolationLevel::ReadUncommitted),
            "read_committed" => Ok(IsolationLevel::ReadCommitted),
            "serializable" => Ok(IsolationLevel::Serializable),
            _ => Err(format!("unknown isolation level {s}")),
        }
    }
}

/// Deliberate misbehaviour, used to give anomaly detectors something to find.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Every `every`-th commit reports success but discards its writes.
    DropWrite { every: u64 },
    /// Reads take no locks at any isolation level.
    LastWriterWins,
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub isolation: IsolationLevel,
    /// None runs the engine in volatile mode.
    pub wal_path: Option<PathBuf>,
    pub fsync: bool,
    pub lock_timeout: Duration,
    pub fault: Fault,
}

impl EngineConfig {
    pub fn volatile(isolation: IsolationLevel) -> Self {
        EngineConfig {
            isolation,
            wal_path: None,
            fsync: false,
            lock_timeout: Duration::from_secs(10),
            fault: Fault::None,
        }
    }

    pub fn durable(isolation: IsolationLevel, wal_path: impl Into<PathBuf>) -> Self {
        EngineConfig {
            wal_path: Some(wal_path.into()),
            ..EngineConfig::volatile(isolation)
        }
    }

    pub fn with_fault(mut self, fault: Fault) -> Self {
        self.fault = fault;
        self
    }

    pub fn with_lock_timeout(mut self, t: Duration) -> Self {
        self.lock_timeout = t;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeleteSummary {
    pub vertices: BTreeMap<VertexKind, u64>,
    pub edges: BTreeMap<EdgeKind, u64>,
}

impl DeleteSummary {
    pub fn edge_total(&self) -> u64 {
        self.edges.values().sum()
    }
}

impl fmt::Display for DeleteSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self
            .vertices
            .iter()
            .map(|(k, n)| format!("{k}:{n}"))
            .collect();
        let e: Vec<String> = self.edges.iter().map(|(k, n)| format!("{k}:{n}")).collect();
        write!(f, "{{{} edges: {}}}", v.join(", "), e.join(", "))
    }
}

/// Sorts by the truncation order (ties by edge id) and keeps the first `limit`.
pub fn truncate_edges(edges: &mut Vec<Arc<EdgeRecord>>, spec: &TruncationSpec) {
    match spec.order {
        TruncationOrder::TimestampAscending => {
            edges.sort_by_key(|e| (e.timestamp, e.edge_id));
        }
        TruncationOrder::TimestampDescending => {
            edges.sort_by_key(|e| (Reverse(e.timestamp), e.edge_id));
        }
        TruncationOrder::AmountAscending => {
            edges.sort_by_key(|e| (e.amount(), e.edge_id));
        }
        TruncationOrder::AmountDescending => {
            edges.sort_by_key(|e| (Reverse(e.amount()), e.edge_id));
        }
    }
    edges.truncate(spec.limit as usize);
}

struct Inner {
    config: EngineConfig,
    graph: RwLock<Graph>,
    locks: LockManager,
    wal: Mutex<Option<Wal>>,
    active: Mutex<HashMap<u64, Arc<Mutex<Vec<UndoOp>>>>>,
    next_txn: AtomicU64,
    commits: AtomicU64,
    crashed: AtomicBool,
    recovery: RecoveryInfo,
}

/// Shareable handle to one engine instance.
#[derive(Clone)]
pub struct Engine {
    inner: Arc<Inner>,
}

impl fmt::Debug for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Engine")
            .field("isolation", &self.inner.config.isolation)
            .field("wal_path", &self.inner.config.wal_path)
            .finish()
    }
}

impl Engine {
    /// Opens an empty engine, or recovers the committed state from the log.
    pub fn open(config: EngineConfig) -> Result<Engine> {
        let started = Instant::now();
        let (graph, wal, mut recovery) = match &config.wal_path {
            None => (Graph::default(), None, RecoveryInfo::default()),
            Some(p) => {
                let (g, w, info) = wal::recover(p, config.fsync)?;
                (g, Some(w), info)
            }
        };
        recovery.micros = started.elapsed().as_micros() as u64;
        if recovery.torn_bytes > 0 {
            log::warn!("discarded {} torn log bytes", recovery.torn_bytes);
        }
        Ok(Engine {
            inner: Arc::new(Inner {
                locks: LockManager::new(config.lock_timeout),
                config,
                graph: RwLock::new(graph),
                wal: Mutex::new(wal),
                active: Mutex::new(HashMap::new()),
                next_txn: AtomicU64::new(1),
                commits: AtomicU64::new(0),
                crashed: AtomicBool::new(false),
                recovery,
            }),
        })
    }

    pub fn volatile(isolation: IsolationLevel) -> Engine {
        Engine::open(EngineConfig::volatile(isolation)).expect("volatile open cannot fail")
    }

    pub fn config(&self) -> &EngineConfig {
        &self.inner.config
    }

    pub fn isolation(&self) -> IsolationLevel {
        self.inner.config.isolation
    }

    pub fn recovery_info(&self) -> &RecoveryInfo {
        &self.inner.recovery
    }

    pub fn begin(&self) -> Result<Txn> {
        if self.inner.crashed.load(Ordering::SeqCst) {
            return Err(EngineError::Crashed);
        }
        let id = self.inner.next_txn.fetch_add(1, Ordering::SeqCst);
        let undo = Arc::new(Mutex::new(Vec::new()));
        self.inner.active.lock().insert(id, undo.clone());
        Ok(Txn {
            inner: self.inner.clone(),
            id,
            state: TxnState::Active,
            undo,
            redo: Vec::new(),
        })
    }

    /// Runs `f` in a fresh transaction and commits, retrying conflicts.
    pub fn run<T>(&self, retries: usize, mut f: impl FnMut(&mut Txn) -> Result<T>) -> Result<T> {
        let mut attempt = 0;
        loop {
            let mut txn = self.begin()?;
            let out = f(&mut txn).and_then(|v| txn.commit().map(|_| v));
            match out {
                Err(e) if e.is_conflict() && attempt < retries => attempt += 1,
                other => return other,
            }
        }
    }

    /// Writes a snapshot of the committed state and empties the log.
    pub fn checkpoint(&self) -> Result<()> {
        let Some(path) = self.inner.config.wal_path.clone() else {
            return Ok(());
        };
        let mut wal = self.inner.wal.lock();
        let Some(w) = wal.as_mut() else {
            return Err(EngineError::Crashed);
        };
        let mut copy = self.inner.graph.read().clone();
        for undo in self.inner.active.lock().values() {
            for u in undo.lock().iter().rev() {
                copy.undo(u.clone());
            }
        }
        wal::write_snapshot(&wal::snapshot_path(&path), &copy, w.next_seq - 1)?;
        w.truncate()
    }

    /// Simulated ungraceful termination: no flush, no cleanup, every later
    /// call fails. Reopen from the same path to recover.
    pub fn crash(&self) {
        self.inner.crashed.store(true, Ordering::SeqCst);
        *self.inner.wal.lock() = None;
    }

    pub fn is_crashed(&self) -> bool {
        self.inner.crashed.load(Ordering::SeqCst)
    }

    /// Loads records outside the transaction machinery. Requires no active
    /// transactions. Durable engines checkpoint afterwards.
    pub fn bulk_load(&self, vertices: Vec<VertexRecord>, edges: Vec<EdgeRecord>) -> Result<()> {
        if !self.inner.active.lock().is_empty() {
            return Err(EngineError::Busy("bulk load needs a quiet engine".into()));
        }
        {
            let mut g = self.inner.graph.write();
            let mut undo = Vec::new();
            let res = (|| {
                for v in vertices {
                    v.validate()?;
                    undo.push(g.apply(&RedoOp::InsertVertex(v))?);
                }
                for mut e in edges {
                    e.validate()?;
                    check_edge(&g, &e)?;
                    e.edge_id = EntityId(g.alloc_edge_id(e.kind));
                    undo.push(g.apply(&RedoOp::InsertEdge(e))?);
                }
                Ok(())
            })();
            if let Err(e) = res {
                for u in undo.into_iter().rev() {
                    g.undo(u);
                }
                return Err(e);
            }
        }
        self.checkpoint()
    }

    pub fn vertex_count(&self) -> usize {
        self.inner.graph.read().vertex_count()
    }

    pub fn vertex_count_of(&self, kind: VertexKind) -> usize {
        self.inner.graph.read().vertex_count_of(kind)
    }

    pub fn edge_count(&self) -> usize {
        self.inner.graph.read().edge_count()
    }

    pub fn edge_count_of(&self, kind: EdgeKind) -> usize {
        self.inner.graph.read().edge_count_of(kind)
    }

    /// Content hash of the current in-memory state.
    pub fn state_digest(&self) -> String {
        self.inner.graph.read().digest()
    }

    /// All vertices and edges, sorted by kind then id.
    pub fn export(&self) -> (Vec<VertexRecord>, Vec<EdgeRecord>) {
        let g = self.inner.graph.read();
        (g.export_vertices(), g.export_edges())
    }
}

fn check_edge(g: &Graph, e: &EdgeRecord) -> Result<()> {
    for v in [e.src, e.dst] {
        if !g.contains(v) {
            return Err(EngineError::VertexNotFound {
                kind: v.kind,
                id: v.id.0,
            });
        }
    }
    if e.kind.single_per_pair() {
        let data = g.vertex(e.src).expect("checked");
        let dup = data
            .list(e.kind, Direction::Out)
            .iter()
            .any(|(_, id)| g.edge(e.kind, *id).is_some_and(|x| x.dst == e.dst));
        if dup {
            return Err(EngineError::Multiplicity {
                kind: e.kind,
                src: e.src.id.0,
                dst: e.dst.id.0,
            });
        }
    }
    if e.kind.single_in_edge() {
        let data = g.vertex(e.dst).expect("checked");
        if !data.list(e.kind, Direction::In).is_empty() {
            return Err(EngineError::Cardinality(format!(
                "{} already has an {} in-edge",
                e.dst, e.kind
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TxnState {
    Active,
    /// Lost a lock conflict; only abort is meaningful.
    Failed,
    Done,
}

/// One transaction. Dropping an unfinished transaction aborts it.
pub struct Txn {
    inner: Arc<Inner>,
    id: u64,
    state: TxnState,
    undo: Arc<Mutex<Vec<UndoOp>>>,
    redo: Vec<RedoOp>,
}

impl fmt::Debug for Txn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Txn")
            .field("id", &self.id)
            .field("state", &self.state)
            .finish()
    }
}

impl Txn {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn isolation(&self) -> IsolationLevel {
        self.inner.config.isolation
    }

    fn ready(&self) -> Result<()> {
        if self.inner.crashed.load(Ordering::SeqCst) {
            return Err(EngineError::Crashed);
        }
        match self.state {
            TxnState::Active => Ok(()),
            TxnState::Failed => Err(EngineError::SerializationConflict(self.id)),
            TxnState::Done => Err(EngineError::NotActive(self.id)),
        }
    }

    fn lock(&mut self, key: LockKey, mode: LockMode) -> Result<bool> {
        let r = self.inner.locks.acquire(self.id, key, mode);
        if let Err(e) = &r {
            if e.is_conflict() {
                self.state = TxnState::Failed;
            }
        }
        r
    }

    /// Takes read locks per isolation level; returns the ones to drop after
    /// the read.
    fn read_locks(&mut self, keys: &[LockKey]) -> Result<Vec<LockKey>> {
        let iso = self.inner.config.isolation;
        if iso == IsolationLevel::ReadUncommitted
            || self.inner.config.fault == Fault::LastWriterWins
        {
            return Ok(Vec::new());
        }
        let mut short = Vec::new();
        for k in keys {
            match self.lock(*k, LockMode::Shared) {
                Ok(newly) => {
                    if newly && iso == IsolationLevel::ReadCommitted {
                        short.push(*k);
                    }
                }
                Err(e) => {
                    self.release(short);
                    return Err(e);
                }
            }
        }
        Ok(short)
    }

    fn release(&self, keys: Vec<LockKey>) {
        for k in keys {
            self.inner.locks.release(self.id, k);
        }
    }

    fn apply(&mut self, op: RedoOp) -> Result<()> {
        let mut g = self.inner.graph.write();
        let undo = g.apply(&op)?;
        self.undo.lock().push(undo);
        drop(g);
        self.redo.push(op);
        Ok(())
    }

    pub fn insert_vertex(&mut self, rec: VertexRecord) -> Result<EntityId> {
        self.ready()?;
        rec.validate()?;
        let v = rec.vref();
        self.lock(LockKey::KindSet(v.kind), LockMode::IntentExclusive)?;
        self.lock(LockKey::Vertex(v), LockMode::Exclusive)?;
        self.apply(RedoOp::InsertVertex(rec))?;
        Ok(v.id)
    }

    pub fn insert_edge(&mut self, mut rec: EdgeRecord) -> Result<EntityId> {
        self.ready()?;
        rec.validate()?;
        self.lock(LockKey::Vertex(rec.src), LockMode::Shared)?;
        self.lock(LockKey::Vertex(rec.dst), LockMode::Shared)?;
        self.lock(
            LockKey::Adj(rec.src, rec.kind, Direction::Out),
            LockMode::Exclusive,
        )?;
        self.lock(
            LockKey::Adj(rec.dst, rec.kind, Direction::In),
            LockMode::Exclusive,
        )?;
        let mut g = self.inner.graph.write();
        check_edge(&g, &rec)?;
        rec.edge_id = EntityId(g.alloc_edge_id(rec.kind));
        let id = rec.edge_id;
        let op = RedoOp::InsertEdge(rec);
        let undo = g.apply(&op)?;
        self.undo.lock().push(undo);
        drop(g);
        self.redo.push(op);
        Ok(id)
    }

    pub fn get_vertex(&mut self, kind: VertexKind, id: u64) -> Result<Option<VertexRecord>> {
        self.ready()?;
        let v = VertexRef::new(kind, id);
        let short = self.read_locks(&[LockKey::Vertex(v)])?;
        let out = self.inner.graph.read().vertex(v).map(|d| VertexRecord {
            kind,
            id: v.id,
            props: d.props.clone(),
        });
        self.release(short);
        Ok(out)
    }

    pub fn vertex_exists(&mut self, v: VertexRef) -> Result<bool> {
        self.ready()?;
        let short = self.read_locks(&[LockKey::Vertex(v)])?;
        let out = self.inner.graph.read().contains(v);
        self.release(short);
        Ok(out)
    }

    /// Errors if the vertex is absent; `None` if the property is unset.
    pub fn get_property(&mut self, v: VertexRef, name: &str) -> Result<Option<Value>> {
        self.ready()?;
        let short = self.read_locks(&[LockKey::Vertex(v)])?;
        let out = self
            .inner
            .graph
            .read()
            .vertex(v)
            .map(|d| d.props.get(name).cloned());
        self.release(short);
        out.ok_or(EngineError::VertexNotFound {
            kind: v.kind,
            id: v.id.0,
        })
    }

    pub fn update_property(
        &mut self,
        v: VertexRef,
        name: &str,
        value: impl Into<Value>,
    ) -> Result<()> {
        self.ready()?;
        let value = value.into();
        check_type(name, &value)?;
        self.lock(LockKey::KindSet(v.kind), LockMode::IntentExclusive)?;
        self.lock(LockKey::Vertex(v), LockMode::Exclusive)?;
        self.apply(RedoOp::SetVertexProp {
            v,
            name: name.to_owned(),
            value,
        })
    }

    fn edge_endpoints(&self, kind: EdgeKind, edge_id: u64) -> Result<(VertexRef, VertexRef)> {
        self.inner
            .graph
            .read()
            .edge(kind, edge_id)
            .map(|e| (e.src, e.dst))
            .ok_or(EngineError::EdgeNotFound { kind, edge_id })
    }

    pub fn get_edge(&mut self, kind: EdgeKind, edge_id: u64) -> Result<Option<Arc<EdgeRecord>>> {
        self.ready()?;
        let Ok((src, _)) = self.edge_endpoints(kind, edge_id) else {
            return Ok(None);
        };
        let short = self.read_locks(&[LockKey::Adj(src, kind, Direction::Out)])?;
        let out = self.inner.graph.read().edge(kind, edge_id).cloned();
        self.release(short);
        Ok(out)
    }

    pub fn update_edge_property(
        &mut self,
        kind: EdgeKind,
        edge_id: u64,
        name: &str,
        value: impl Into<Value>,
    ) -> Result<()> {
        self.ready()?;
        let value = value.into();
        check_type(name, &value)?;
        let (src, dst) = self.edge_endpoints(kind, edge_id)?;
        self.lock(LockKey::Adj(src, kind, Direction::Out), LockMode::Exclusive)?;
        self.lock(LockKey::Adj(dst, kind, Direction::In), LockMode::Exclusive)?;
        self.apply(RedoOp::SetEdgeProp {
            kind,
            edge_id,
            name: name.to_owned(),
            value,
        })
    }

    /// Edges of one kind and direction at `v` with timestamps strictly inside
    /// `window`. Untruncated results are in timestamp order.
    pub fn neighbors(
        &mut self,
        v: VertexRef,
        kind: EdgeKind,
        dir: Direction,
        window: &Window,
        trunc: Option<&TruncationSpec>,
    ) -> Result<Vec<Arc<EdgeRecord>>> {
        self.ready()?;
        let short = self.read_locks(&[LockKey::Vertex(v), LockKey::Adj(v, kind, dir)])?;
        let g = self.inner.graph.read();
        let exists = g.contains(v);
        let mut out = g.adjacent(v, kind, dir, window);
        drop(g);
        self.release(short);
        if !exists {
            return Err(EngineError::VertexNotFound {
                kind: v.kind,
                id: v.id.0,
            });
        }
        if let Some(spec) = trunc {
            truncate_edges(&mut out, spec);
        }
        Ok(out)
    }

    /// All vertices of a kind, sorted by id.
    pub fn scan_vertices(&mut self, kind: VertexKind) -> Result<Vec<VertexRecord>> {
        self.ready()?;
        let short = self.read_locks(&[LockKey::KindSet(kind)])?;
        let g = self.inner.graph.read();
        let out = g
            .vertex_ids(kind)
            .into_iter()
            .map(|id| VertexRecord {
                kind,
                id: EntityId(id),
                props: g
                    .vertex(VertexRef::new(kind, id))
                    .expect("listed")
                    .props
                    .clone(),
            })
            .collect();
        drop(g);
        self.release(short);
        Ok(out)
    }

    fn lock_for_delete(&mut self, v: VertexRef) -> Result<()> {
        self.lock(LockKey::KindSet(v.kind), LockMode::IntentExclusive)?;
        self.lock(LockKey::Vertex(v), LockMode::Exclusive)?;
        for kind in EdgeKind::ALL {
            if kind.sources().contains(&v.kind) {
                self.lock(LockKey::Adj(v, kind, Direction::Out), LockMode::Exclusive)?;
            }
            if kind.targets().contains(&v.kind) {
                self.lock(LockKey::Adj(v, kind, Direction::In), LockMode::Exclusive)?;
            }
        }
        let incident = self.inner.graph.read().incident(v);
        for e in incident {
            let (other, dir) = if e.src == v {
                (e.dst, Direction::In)
            } else {
                (e.src, Direction::Out)
            };
            self.lock(LockKey::Adj(other, e.kind, dir), LockMode::Exclusive)?;
        }
        Ok(())
    }

    /// Deletes a vertex and its edges. An Account also takes every Loan it
    /// deposits from or repays to, along with those loans' edges.
    pub fn delete_vertex_cascade(&mut self, kind: VertexKind, id: u64) -> Result<DeleteSummary> {
        self.ready()?;
        let root = VertexRef::new(kind, id);
        self.lock_for_delete(root)?;
        if !self.inner.graph.read().contains(root) {
            return Err(EngineError::VertexNotFound { kind, id });
        }
        let mut doomed = vec![root];
        if kind == VertexKind::Account {
            let loans: BTreeSet<VertexRef> = self
                .inner
                .graph
                .read()
                .incident(root)
                .iter()
                .filter_map(|e| match e.kind {
                    EdgeKind::Deposit => Some(e.src),
                    EdgeKind::Repay => Some(e.dst),
                    _ => None,
                })
                .collect();
            for l in loans {
                self.lock_for_delete(l)?;
                doomed.push(l);
            }
        }
        let mut summary = DeleteSummary::default();
        let mut edges: BTreeSet<(EdgeKind, u64)> = BTreeSet::new();
        {
            let g = self.inner.graph.read();
            for v in &doomed {
                for e in g.incident(*v) {
                    edges.insert((e.kind, e.edge_id.0));
                }
            }
        }
        for (k, eid) in edges {
            self.apply(RedoOp::DeleteEdge {
                kind: k,
                edge_id: eid,
            })?;
            *summary.edges.entry(k).or_default() += 1;
        }
        for v in doomed {
            self.apply(RedoOp::DeleteVertex(v))?;
            *summary.vertices.entry(v.kind).or_default() += 1;
        }
        Ok(summary)
    }

    /// Makes the writes visible and durable. A transaction that lost a
    /// conflict is rolled back and reports the conflict here.
    pub fn commit(mut self) -> Result<()> {
        if self.inner.crashed.load(Ordering::SeqCst) {
            self.state = TxnState::Done;
            return Err(EngineError::Crashed);
        }
        match self.state {
            TxnState::Done => return Err(EngineError::NotActive(self.id)),
            TxnState::Failed => {
                self.rollback();
                return Err(EngineError::SerializationConflict(self.id));
            }
            TxnState::Active => {}
        }
        if let Fault::DropWrite { every } = self.inner.config.fault {
            let n = self.inner.commits.fetch_add(1, Ordering::SeqCst) + 1;
            if every > 0 && n.is_multiple_of(every) {
                self.rollback();
                return Ok(());
            }
        } else {
            self.inner.commits.fetch_add(1, Ordering::SeqCst);
        }
        let redo = mem::take(&mut self.redo);
        if self.inner.config.wal_path.is_some() {
            let mut wal = self.inner.wal.lock();
            let Some(w) = wal.as_mut() else {
                drop(wal);
                self.state = TxnState::Done;
                return Err(EngineError::Crashed);
            };
            if !redo.is_empty() {
                if let Err(e) = w.append_commit(self.id, redo) {
                    drop(wal);
                    self.rollback();
                    return Err(e);
                }
            }
            self.inner.active.lock().remove(&self.id);
        } else {
            self.inner.active.lock().remove(&self.id);
        }
        self.inner.locks.release_all(self.id);
        self.state = TxnState::Done;
        Ok(())
    }

    pub fn abort(mut self) {
        self.rollback();
    }

    fn rollback(&mut self) {
        if self.state == TxnState::Done {
            return;
        }
        {
            let mut g = self.inner.graph.write();
            let undo = mem::take(&mut *self.undo.lock());
            for u in undo.into_iter().rev() {
                g.undo(u);
            }
        }
        self.redo.clear();
        self.inner.active.lock().remove(&self.id);
        self.inner.locks.release_all(self.id);
        self.state = TxnState::Done;
    }
}

impl Drop for Txn {
    fn drop(&mut self) {
        if self.state != TxnState::Done && !self.inner.crashed.load(Ordering::SeqCst) {
            self.rollback();
        }
    }
}
