//! Log and snapshot files.
//!
//! Both are sequences of frames `[u32 len][u32 crc32][payload]`, little
//! endian, with a bincode payload.

use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};
use crate::graph::{Graph, RedoOp};
use crate::schema::{EdgeRecord, VertexRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LogRecord {
    Txn {
        seq: u64,
        txn_id: u64,
        ops: Vec<RedoOp>,
    },
    Commit {
        seq: u64,
        txn_id: u64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
enum SnapRecord {
    Header {
        last_seq: u64,
        next_edge_id: [u64; 9],
    },
    Vertex(VertexRecord),
    Edge(EdgeRecord),
    End {
        vertices: u64,
        edges: u64,
    },
}

pub fn encode_frame<T: Serialize>(rec: &T, out: &mut Vec<u8>) {
    let payload = bincode::serialize(rec).expect("in-memory serialization");
    out.extend_from_slice(&(payload.len() as u32).to_le_bytes());
    out.extend_from_slice(&crc32fast::hash(&payload).to_le_bytes());
    out.extend_from_slice(&payload);
}

#[derive(Debug, PartialEq)]
pub enum Tail {
    Clean,
    /// Incomplete or checksum-failing final frame starting at this offset.
    Torn(usize),
    /// Bad frame with more data after it.
    Corrupt(usize),
}

/// Splits `bytes` into frame payloads.
pub fn split_frames(bytes: &[u8]) -> (Vec<&[u8]>, Tail) {
    let mut out = Vec::new();
    let mut off = 0;
    while off < bytes.len() {
        let rest = &bytes[off..];
        if rest.len() < 8 {
            return (out, Tail::Torn(off));
        }
        let len = u32::from_le_bytes(rest[0..4].try_into().unwrap()) as usize;
        let crc = u32::from_le_bytes(rest[4..8].try_into().unwrap());
        if rest.len() - 8 < len {
            return (out, Tail::Torn(off));
        }
        let payload = &rest[8..8 + len];
        if crc32fast::hash(payload) != crc {
            let end = off + 8 + len;
            return if end == bytes.len() {
                (out, Tail::Torn(off))
            } else {
                (out, Tail::Corrupt(off))
            };
        }
        out.push(payload);
        off += 8 + len;
    }
    (out, Tail::Clean)
}

fn decode<T: DeserializeOwned>(payload: &[u8]) -> Option<T> {
    bincode::deserialize(payload).ok()
}

pub fn snapshot_path(wal: &Path) -> PathBuf {
    let mut s = wal.as_os_str().to_owned();
    s.push(".snapshot");
    PathBuf::from(s)
}

pub(crate) struct Wal {
    file: File,
    fsync: bool,
    pub next_seq: u64,
}

impl Wal {
    /// Writes the transaction and its commit marker in one append.
    pub fn append_commit(&mut self, txn_id: u64, ops: Vec<RedoOp>) -> Result<u64> {
        let seq = self.next_seq;
        let mut buf = Vec::new();
        encode_frame(&LogRecord::Txn { seq, txn_id, ops }, &mut buf);
        encode_frame(&LogRecord::Commit { seq, txn_id }, &mut buf);
        self.file.write_all(&buf)?;
        if self.fsync {
            self.file.sync_data()?;
        }
        self.next_seq += 1;
        Ok(seq)
    }

    pub fn truncate(&mut self) -> Result<()> {
        self.file.set_len(0)?;
        self.file.sync_all()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RecoveryInfo {
    pub snapshot_seq: u64,
    pub replayed_txns: u64,
    pub last_seq: u64,
    pub torn_bytes: u64,
    pub micros: u64,
}

/// Rebuilds the committed state from snapshot plus log and opens the log for
/// appending. A torn tail is cut off; corruption in the middle is an error.
pub(crate) fn recover(path: &Path, fsync: bool) -> Result<(Graph, Wal, RecoveryInfo)> {
    let mut info = RecoveryInfo::default();
    let mut graph = Graph::default();
    let snap = snapshot_path(path);
    if snap.exists() {
        let (g, seq) = read_snapshot(&snap)?;
        graph = g;
        info.snapshot_seq = seq;
    }
    let mut last_seq = info.snapshot_seq;
    let mut bytes = Vec::new();
    if path.exists() {
        File::open(path)?.read_to_end(&mut bytes)?;
    }
    let (frames, tail) = split_frames(&bytes);
    let mut pending: Option<(u64, u64, Vec<RedoOp>)> = None;
    let mut valid_len = 0usize;
    let mut consumed = 0usize;
    for payload in frames {
        consumed += 8 + payload.len();
        let rec: LogRecord = decode(payload).ok_or_else(|| EngineError::Recovery {
            last_valid_seq: last_seq,
            reason: "undecodable record".into(),
        })?;
        match rec {
            LogRecord::Txn { seq, txn_id, ops } => pending = Some((seq, txn_id, ops)),
            LogRecord::Commit { seq, txn_id } => {
                let Some((pseq, ptxn, ops)) = pending.take() else {
                    return Err(EngineError::Recovery {
                        last_valid_seq: last_seq,
                        reason: format!("commit {seq} without body"),
                    });
                };
                if pseq != seq || ptxn != txn_id {
                    return Err(EngineError::Recovery {
                        last_valid_seq: last_seq,
                        reason: format!("commit {seq} does not match body {pseq}"),
                    });
                }
                if seq > last_seq {
                    for op in &ops {
                        graph.apply(op).map_err(|e| EngineError::Recovery {
                            last_valid_seq: last_seq,
                            reason: e.to_string(),
                        })?;
                    }
                    last_seq = seq;
                    info.replayed_txns += 1;
                }
                valid_len = consumed;
            }
        }
    }
    match tail {
        Tail::Corrupt(off) => {
            return Err(EngineError::Recovery {
                last_valid_seq: last_seq,
                reason: format!("checksum mismatch at byte {off}"),
            })
        }
        Tail::Torn(_) | Tail::Clean => {}
    }
    info.torn_bytes = (bytes.len() - valid_len) as u64;
    info.last_seq = last_seq;
    let file = OpenOptions::new()
        .create(true)
        .read(true)
        .append(true)
        .open(path)?;
    if info.torn_bytes > 0 {
        file.set_len(valid_len as u64)?;
        file.sync_all()?;
    }
    let wal = Wal {
        file,
        fsync,
        next_seq: last_seq + 1,
    };
    Ok((graph, wal, info))
}

pub(crate) fn write_snapshot(path: &Path, graph: &Graph, last_seq: u64) -> Result<()> {
    let tmp = {
        let mut s = path.as_os_str().to_owned();
        s.push(".tmp");
        PathBuf::from(s)
    };
    let mut w = BufWriter::new(File::create(&tmp)?);
    let mut buf = Vec::new();
    encode_frame(
        &SnapRecord::Header {
            last_seq,
            next_edge_id: graph.next_edge_id,
        },
        &mut buf,
    );
    let vertices = graph.export_vertices();
    let edges = graph.export_edges();
    let (nv, ne) = (vertices.len() as u64, edges.len() as u64);
    for v in vertices {
        encode_frame(&SnapRecord::Vertex(v), &mut buf);
        if buf.len() > 1 << 20 {
            w.write_all(&buf)?;
            buf.clear();
        }
    }
    for e in edges {
        encode_frame(&SnapRecord::Edge(e), &mut buf);
        if buf.len() > 1 << 20 {
            w.write_all(&buf)?;
            buf.clear();
        }
    }
    encode_frame(
        &SnapRecord::End {
            vertices: nv,
            edges: ne,
        },
        &mut buf,
    );
    w.write_all(&buf)?;
    let file = w.into_inner().map_err(|e| EngineError::Io(e.to_string()))?;
    file.sync_all()?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn read_snapshot(path: &Path) -> Result<(Graph, u64)> {
    let bad = |reason: &str| EngineError::Recovery {
        last_valid_seq: 0,
        reason: format!("snapshot: {reason}"),
    };
    let bytes = fs::read(path)?;
    let (frames, tail) = split_frames(&bytes);
    if tail != Tail::Clean {
        return Err(bad("damaged frame"));
    }
    let mut graph = Graph::default();
    let mut last_seq = None;
    let mut ended = false;
    let (mut nv, mut ne) = (0u64, 0u64);
    for payload in frames {
        let rec: SnapRecord = decode(payload).ok_or_else(|| bad("undecodable record"))?;
        match rec {
            SnapRecord::Header {
                last_seq: s,
                next_edge_id,
            } => {
                last_seq = Some(s);
                graph.next_edge_id = next_edge_id;
            }
            SnapRecord::Vertex(v) => {
                graph
                    .apply(&RedoOp::InsertVertex(v))
                    .map_err(|e| bad(&e.to_string()))?;
                nv += 1;
            }
            SnapRecord::Edge(e) => {
                let counters = graph.next_edge_id;
                graph
                    .apply(&RedoOp::InsertEdge(e))
                    .map_err(|e| bad(&e.to_string()))?;
                graph.next_edge_id = counters;
                ne += 1;
            }
            SnapRecord::End { vertices, edges } => {
                if vertices != nv || edges != ne {
                    return Err(bad("record count mismatch"));
                }
                ended = true;
            }
        }
    }
    match (last_seq, ended) {
        (Some(s), true) => Ok((graph, s)),
        _ => Err(bad("missing header or end marker")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frames_detect_torn_and_corrupt() {
        let mut buf = Vec::new();
        encode_frame(&LogRecord::Commit { seq: 1, txn_id: 1 }, &mut buf);
        encode_frame(&LogRecord::Commit { seq: 2, txn_id: 2 }, &mut buf);
        let one = buf.len() / 2;
        let (f, t) = split_frames(&buf);
        assert_eq!((f.len(), t), (2, Tail::Clean));
        let (f, t) = split_frames(&buf[..buf.len() - 1]);
        assert_eq!((f.len(), t), (1, Tail::Torn(one)));
        let mut flipped = buf.clone();
        flipped[9] ^= 0xff;
        let (f, t) = split_frames(&flipped);
        assert_eq!((f.len(), t), (0, Tail::Corrupt(0)));
        let last = buf.len() - 1;
        let mut flipped = buf.clone();
        flipped[last] ^= 0xff;
        assert_eq!(split_frames(&flipped).1, Tail::Torn(one));
    }
}
